//! The distribution monad `D_R`: finitely supported `R`-weightings that sum
//! to one, over any ordered element type.
//!
//! Supports are stored in canonical element order with no zero weights, so
//! structural equality of distributions is semantic equality. The monad
//! operations (`push`, `flatten`, `product`) and the convex structure
//! (`convex_mix`) are all total on valid inputs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::semiring::Semiring;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Dist<T: Ord + Clone, R: Semiring> {
    weights: BTreeMap<T, R>,
}

impl<T: Ord + Clone, R: Semiring> Dist<T, R> {
    /// Builds a distribution from weighted elements. Duplicate elements are
    /// summed, zero weights dropped, and the total must equal one.
    pub fn new<I: IntoIterator<Item = (T, R)>>(pairs: I) -> Result<Self> {
        let mut weights: BTreeMap<T, R> = BTreeMap::new();
        for (t, w) in pairs {
            if w.is_zero() {
                continue;
            }
            match weights.get_mut(&t) {
                Some(cur) => *cur = cur.add(&w),
                None => {
                    weights.insert(t, w);
                }
            }
        }
        let d = Dist { weights };
        d.check_total()?;
        Ok(d)
    }

    /// The point mass `δ^t`.
    pub fn point(t: T) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(t, R::one());
        Dist { weights }
    }

    fn check_total(&self) -> Result<()> {
        let mut total = R::zero();
        for w in self.weights.values() {
            total = total.add(w);
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn weight(&self, t: &T) -> R {
        self.weights.get(t).cloned().unwrap_or_else(R::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.weights.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &R)> {
        self.weights.iter()
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_point(&self) -> bool {
        self.weights.len() == 1
    }

    /// Functorial action: `D_R(f)(p)(v) = Σ_{u ∈ f⁻¹(v)} p(u)`.
    pub fn push<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> Dist<U, R> {
        let mut weights: BTreeMap<U, R> = BTreeMap::new();
        for (t, w) in &self.weights {
            let u = f(t);
            match weights.get_mut(&u) {
                Some(cur) => *cur = cur.add(w),
                None => {
                    weights.insert(u, w.clone());
                }
            }
        }
        Dist { weights }
    }

    /// Fallible variant of [`Dist::push`] for partial element maps.
    pub fn try_push<U: Ord + Clone>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Dist<U, R>> {
        let mut pairs = Vec::with_capacity(self.weights.len());
        for (t, w) in &self.weights {
            pairs.push((f(t)?, w.clone()));
        }
        Dist::new(pairs)
    }

    /// Monad multiplication: `μ(P)(t) = Σ_q P(q)·q(t)`.
    pub fn flatten(nested: &Dist<Dist<T, R>, R>) -> Dist<T, R> {
        let mut weights: BTreeMap<T, R> = BTreeMap::new();
        for (inner, outer_w) in &nested.weights {
            for (t, w) in &inner.weights {
                let contrib = outer_w.mul(w);
                if contrib.is_zero() {
                    continue;
                }
                match weights.get_mut(t) {
                    Some(cur) => *cur = cur.add(&contrib),
                    None => {
                        weights.insert(t.clone(), contrib);
                    }
                }
            }
        }
        Dist { weights }
    }

    /// Product distribution `p·q(t, u) = p(t) q(u)`.
    pub fn product<U: Ord + Clone>(p: &Dist<T, R>, q: &Dist<U, R>) -> Dist<(T, U), R> {
        let mut weights = BTreeMap::new();
        for (t, wt) in &p.weights {
            for (u, wu) in &q.weights {
                let w = wt.mul(wu);
                if !w.is_zero() {
                    weights.insert((t.clone(), u.clone()), w);
                }
            }
        }
        Dist { weights }
    }
}

/// A family of distributions indexed by contexts or elements.
pub type DistFamily<K, T, R> = BTreeMap<K, Dist<T, R>>;

/// Convex structure `ν` on families of distributions sharing an index set:
/// `ν(Q)_k(x) = Σ_p Q(p) p_k(x)` pointwise at every index `k`.
///
/// Takes the mixture as weighted families; all families must have identical
/// index sets.
pub fn convex_mix<K, T, R>(
    mixture: &[(DistFamily<K, T, R>, R)],
) -> Result<DistFamily<K, T, R>>
where
    K: Ord + Clone + std::fmt::Debug,
    T: Ord + Clone,
    R: Semiring,
{
    let Some((first, _)) = mixture.first() else {
        return Err(Error::MixtureShape("empty mixture".into()));
    };
    let keys: Vec<&K> = first.keys().collect();
    for (family, _) in mixture {
        if family.len() != keys.len() || !keys.iter().all(|k| family.contains_key(k)) {
            return Err(Error::MixtureShape(format!(
                "families disagree on index set (expected {} indices)",
                keys.len()
            )));
        }
    }
    let mut out = BTreeMap::new();
    for k in keys {
        let mut weights: BTreeMap<T, R> = BTreeMap::new();
        for (family, q) in mixture {
            for (t, w) in family[k].iter() {
                let contrib = q.mul(w);
                if contrib.is_zero() {
                    continue;
                }
                match weights.get_mut(t) {
                    Some(cur) => *cur = cur.add(&contrib),
                    None => {
                        weights.insert(t.clone(), contrib);
                    }
                }
            }
        }
        out.insert(k.clone(), Dist { weights });
    }
    Ok(out)
}
