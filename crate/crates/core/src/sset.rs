//! Dimension-bounded simplicial sets: nerve spaces of complexes, standard
//! simplices, products and pull-backs, lifting-based scenario checks, the
//! relation transport `T(π)` with `μ̃`, and morphisms of simplicial bundle
//! scenarios including the embedding from bundle scenarios.
//!
//! Everything is represented levelwise up to a dimension bound `D`; all
//! "for every n" claims are decided for n ≤ D and reported as bounded
//! verification. Simplicial identities of every constructed set are checked
//! exhaustively at construction time.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::complex::{Complex, ComplexMap, Simplex};
use crate::error::{Error, Result};
use crate::nerve::{hat_n, SimplicialRelation};

/// Default dimension bound: distributions on nerves are determined at level
/// one and the comparison arguments manipulate levels ≤ 2, so three leaves a
/// safety margin.
pub const DEFAULT_DIM: usize = 3;

/// One slot of the element cap applies to every level.
pub const DEFAULT_LEVEL_CAP: usize = 200_000;

/// An element of a bounded simplicial set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum SsElem {
    /// Nerve-space tuple; `None` entries are the degenerate slots. Level `n`
    /// carries tuples of length `n`.
    Tuple(Vec<Option<Simplex>>),
    /// Standard-simplex element: a nondecreasing sequence in `0..=d`.
    Mono(Vec<u32>),
    /// Product or pull-back element.
    Pair(Box<SsElem>, Box<SsElem>),
}

impl SsElem {
    pub fn pair(a: SsElem, b: SsElem) -> SsElem {
        SsElem::Pair(Box::new(a), Box::new(b))
    }

    pub fn as_pair(&self) -> Result<(&SsElem, &SsElem)> {
        match self {
            SsElem::Pair(a, b) => Ok((a, b)),
            _ => Err(Error::InvalidSSet(format!("{self:?} is not a pair"))),
        }
    }

    pub fn as_tuple(&self) -> Result<&[Option<Simplex>]> {
        match self {
            SsElem::Tuple(t) => Ok(t),
            _ => Err(Error::InvalidSSet(format!("{self:?} is not a tuple"))),
        }
    }

    /// Canonical rendered label for serialization.
    pub fn label(&self) -> String {
        match self {
            SsElem::Tuple(t) => {
                let parts: Vec<String> = t
                    .iter()
                    .map(|e| match e {
                        Some(s) => s.to_string(),
                        None => "-".to_string(),
                    })
                    .collect();
                format!("({})", parts.join(";"))
            }
            SsElem::Mono(m) => {
                let parts: Vec<String> = m.iter().map(u32::to_string).collect();
                format!("<{}>", parts.join(""))
            }
            SsElem::Pair(a, b) => format!("[{}|{}]", a.label(), b.label()),
        }
    }
}

#[derive(PartialEq, Eq, Debug)]
struct SSetData {
    dim: usize,
    levels: Vec<Vec<SsElem>>,
    index: Vec<BTreeMap<SsElem, usize>>,
    /// `faces[n][i][k]`: index of `d_i` of element `k` at level `n ≥ 1`.
    faces: Vec<Vec<Vec<usize>>>,
    /// `degens[n][j][k]`: index of `s_j` of element `k`, for `n < dim`.
    degens: Vec<Vec<Vec<usize>>>,
}

/// A simplicial set truncated at a dimension bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoundedSSet(Arc<SSetData>);

impl BoundedSSet {
    /// Builds and validates from semantic face/degeneracy functions.
    pub fn build(
        dim: usize,
        levels: Vec<Vec<SsElem>>,
        face: impl Fn(usize, usize, &SsElem) -> Result<SsElem>,
        degeneracy: impl Fn(usize, usize, &SsElem) -> Result<SsElem>,
    ) -> Result<BoundedSSet> {
        if levels.len() != dim + 1 {
            return Err(Error::InvalidSSet(format!(
                "expected {} levels, got {}",
                dim + 1,
                levels.len()
            )));
        }
        let mut sorted_levels = Vec::with_capacity(levels.len());
        let mut index = Vec::with_capacity(levels.len());
        for level in levels {
            let set: BTreeSet<SsElem> = level.into_iter().collect();
            let sorted: Vec<SsElem> = set.into_iter().collect();
            let idx: BTreeMap<SsElem, usize> = sorted
                .iter()
                .enumerate()
                .map(|(i, e)| (e.clone(), i))
                .collect();
            index.push(idx);
            sorted_levels.push(sorted);
        }
        let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        for n in 1..=dim {
            let mut per_i = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let mut table = Vec::with_capacity(sorted_levels[n].len());
                for e in &sorted_levels[n] {
                    let img = face(n, i, e)?;
                    let Some(&k) = index[n - 1].get(&img) else {
                        return Err(Error::InvalidSSet(format!(
                            "face d_{i} of {e:?} missing at level {}",
                            n - 1
                        )));
                    };
                    table.push(k);
                }
                per_i.push(table);
            }
            faces.push(per_i);
        }
        let mut degens: Vec<Vec<Vec<usize>>> = Vec::new();
        for n in 0..dim {
            let mut per_j = Vec::with_capacity(n + 1);
            for j in 0..=n {
                let mut table = Vec::with_capacity(sorted_levels[n].len());
                for e in &sorted_levels[n] {
                    let img = degeneracy(n, j, e)?;
                    let Some(&k) = index[n + 1].get(&img) else {
                        return Err(Error::InvalidSSet(format!(
                            "degeneracy s_{j} of {e:?} missing at level {}",
                            n + 1
                        )));
                    };
                    table.push(k);
                }
                per_j.push(table);
            }
            degens.push(per_j);
        }
        degens.push(Vec::new());
        let sset = BoundedSSet(Arc::new(SSetData {
            dim,
            levels: sorted_levels,
            index,
            faces,
            degens,
        }));
        sset.check_identities()?;
        Ok(sset)
    }

    /// The simplicial identities, exhaustively up to the bound.
    fn check_identities(&self) -> Result<()> {
        let d = |n: usize, i: usize, k: usize| self.0.faces[n][i][k];
        let s = |n: usize, j: usize, k: usize| self.0.degens[n][j][k];
        let fail = |what: &str, n: usize, k: usize| {
            Err(Error::InvalidSSet(format!(
                "simplicial identity {what} fails at level {n}, element {k}"
            )))
        };
        for n in 2..=self.0.dim {
            for k in 0..self.0.levels[n].len() {
                for j in 0..=n {
                    for i in 0..j {
                        if d(n - 1, i, d(n, j, k)) != d(n - 1, j - 1, d(n, i, k)) {
                            return fail("d_i d_j = d_{j-1} d_i", n, k);
                        }
                    }
                }
            }
        }
        for n in 0..self.0.dim.saturating_sub(1) {
            for k in 0..self.0.levels[n].len() {
                for j in 0..=n {
                    for i in 0..=j {
                        if s(n + 1, i, s(n, j, k)) != s(n + 1, j + 1, s(n, i, k)) {
                            return fail("s_i s_j = s_{j+1} s_i", n, k);
                        }
                    }
                }
            }
        }
        for n in 1..self.0.dim {
            for k in 0..self.0.levels[n].len() {
                for j in 0..n {
                    for i in 0..=n {
                        let left = d(n + 1, i, s(n, j, k));
                        let expected = if i < j {
                            s(n - 1, j - 1, d(n, i, k))
                        } else if i == j || i == j + 1 {
                            k
                        } else {
                            s(n - 1, j, d(n, i - 1, k))
                        };
                        if left != expected {
                            return fail("d_i s_j relations", n, k);
                        }
                    }
                }
            }
        }
        // The loop above misses j = n (s_n exists at level n when n < dim).
        for n in 0..self.0.dim {
            for k in 0..self.0.levels[n].len() {
                let j = n;
                for i in 0..=n + 1 {
                    let left = d(n + 1, i, s(n, j, k));
                    let expected = if i < j {
                        s(n - 1, j - 1, d(n, i, k))
                    } else if i == j || i == j + 1 {
                        k
                    } else {
                        s(n - 1, j, d(n, i - 1, k))
                    };
                    if left != expected {
                        return fail("d_i s_n relations", n, k);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn level(&self, n: usize) -> &[SsElem] {
        &self.0.levels[n]
    }

    pub fn index_of(&self, n: usize, e: &SsElem) -> Result<usize> {
        self.0.index[n]
            .get(e)
            .copied()
            .ok_or_else(|| Error::InvalidSSet(format!("{e:?} is not at level {n}")))
    }

    pub fn face(&self, n: usize, i: usize, e: &SsElem) -> Result<SsElem> {
        let k = self.index_of(n, e)?;
        Ok(self.0.levels[n - 1][self.0.faces[n][i][k]].clone())
    }

    pub fn degeneracy(&self, n: usize, j: usize, e: &SsElem) -> Result<SsElem> {
        let k = self.index_of(n, e)?;
        Ok(self.0.levels[n + 1][self.0.degens[n][j][k]].clone())
    }

    pub(crate) fn face_idx(&self, n: usize, i: usize, k: usize) -> usize {
        self.0.faces[n][i][k]
    }

    pub(crate) fn degen_idx(&self, n: usize, j: usize, k: usize) -> usize {
        self.0.degens[n][j][k]
    }
}

/// A levelwise map of bounded simplicial sets commuting with the structure
/// maps up to the bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SSetMap {
    source: BoundedSSet,
    target: BoundedSSet,
    maps: Vec<Vec<usize>>,
}

impl SSetMap {
    pub fn build(
        source: BoundedSSet,
        target: BoundedSSet,
        f: impl Fn(usize, &SsElem) -> Result<SsElem>,
    ) -> Result<SSetMap> {
        if source.dim() != target.dim() {
            return Err(Error::InvalidSSet("dimension bounds differ".into()));
        }
        let mut maps = Vec::with_capacity(source.dim() + 1);
        for n in 0..=source.dim() {
            let mut table = Vec::with_capacity(source.level(n).len());
            for e in source.level(n) {
                table.push(target.index_of(n, &f(n, e)?)?);
            }
            maps.push(table);
        }
        let map = SSetMap {
            source,
            target,
            maps,
        };
        map.validate()?;
        Ok(map)
    }

    pub fn identity(x: &BoundedSSet) -> SSetMap {
        let maps = (0..=x.dim()).map(|n| (0..x.level(n).len()).collect()).collect();
        SSetMap {
            source: x.clone(),
            target: x.clone(),
            maps,
        }
    }

    fn validate(&self) -> Result<()> {
        for n in 1..=self.source.dim() {
            for k in 0..self.source.level(n).len() {
                for i in 0..=n {
                    let lhs = self.target.face_idx(n, i, self.maps[n][k]);
                    let rhs = self.maps[n - 1][self.source.face_idx(n, i, k)];
                    if lhs != rhs {
                        return Err(Error::InvalidSSet(format!(
                            "map does not commute with d_{i} at level {n}"
                        )));
                    }
                }
            }
        }
        for n in 0..self.source.dim() {
            for k in 0..self.source.level(n).len() {
                for j in 0..=n {
                    let lhs = self.target.degen_idx(n, j, self.maps[n][k]);
                    let rhs = self.maps[n + 1][self.source.degen_idx(n, j, k)];
                    if lhs != rhs {
                        return Err(Error::InvalidSSet(format!(
                            "map does not commute with s_{j} at level {n}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &BoundedSSet {
        &self.source
    }

    pub fn target(&self) -> &BoundedSSet {
        &self.target
    }

    pub fn apply(&self, n: usize, e: &SsElem) -> Result<SsElem> {
        let k = self.source.index_of(n, e)?;
        Ok(self.target.level(n)[self.maps[n][k]].clone())
    }

    pub(crate) fn apply_idx(&self, n: usize, k: usize) -> usize {
        self.maps[n][k]
    }

    /// `g ∘ self` (apply `self` first).
    pub fn then(&self, g: &SSetMap) -> Result<SSetMap> {
        if self.target != g.source {
            return Err(Error::InvalidSSet("composition mismatch".into()));
        }
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(n, table)| table.iter().map(|&k| g.maps[n][k]).collect())
            .collect();
        Ok(SSetMap {
            source: self.source.clone(),
            target: g.target.clone(),
            maps,
        })
    }

    pub fn is_surjective_levelwise(&self) -> bool {
        (0..=self.source.dim()).all(|n| {
            let mut hit = vec![false; self.target.level(n).len()];
            for &k in &self.maps[n] {
                hit[k] = true;
            }
            hit.into_iter().all(|h| h)
        })
    }
}

/// Scenario flags for simplicial set maps, with a witness for the first
/// failing lifting square.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SsFlags {
    pub surjective: bool,
    pub locally_surjective: bool,
    pub discrete_over_vertices: bool,
    pub witness: Option<String>,
}

impl SsFlags {
    pub fn scenario(&self) -> bool {
        self.surjective && self.locally_surjective && self.discrete_over_vertices
    }
}

/// Exhaustive lifting checks against `d^i` (local surjectivity) and `s^j`
/// (discreteness over vertices) for all commuting squares within the bound.
pub fn check_simplicial_scenario(f: &SSetMap) -> SsFlags {
    let (e_set, x_set) = (f.source(), f.target());
    let dim = e_set.dim();
    let surjective = f.is_surjective_levelwise();
    let mut witness = None;

    // Fibers per level: base index -> total indices over it.
    let fibers: Vec<Vec<Vec<usize>>> = (0..=dim)
        .map(|n| {
            let mut per_base = vec![Vec::new(); x_set.level(n).len()];
            for ek in 0..e_set.level(n).len() {
                per_base[f.apply_idx(n, ek)].push(ek);
            }
            per_base
        })
        .collect();

    let mut locally_surjective = true;
    'ls: for n in 1..=dim {
        for i in 0..=n {
            for xk in 0..x_set.level(n).len() {
                let dx = x_set.face_idx(n, i, xk);
                for &ek in &fibers[n - 1][dx] {
                    let lift = fibers[n][xk]
                        .iter()
                        .any(|&cand| e_set.face_idx(n, i, cand) == ek);
                    if !lift {
                        locally_surjective = false;
                        witness = Some(format!(
                            "no lift for d^{i} square at level {n}: base {}, corner {}",
                            x_set.level(n)[xk].label(),
                            e_set.level(n - 1)[ek].label()
                        ));
                        break 'ls;
                    }
                }
            }
        }
    }

    let mut discrete = true;
    'dv: for n in 1..=dim {
        for j in 0..n {
            for xk in 0..x_set.level(n - 1).len() {
                let sx = x_set.degen_idx(n - 1, j, xk);
                for &ek in &fibers[n][sx] {
                    let lift = fibers[n - 1][xk]
                        .iter()
                        .any(|&cand| e_set.degen_idx(n - 1, j, cand) == ek);
                    if !lift {
                        discrete = false;
                        witness = Some(format!(
                            "no lift for s^{j} square at level {n}: base {}, corner {}",
                            x_set.level(n - 1)[xk].label(),
                            e_set.level(n)[ek].label()
                        ));
                        break 'dv;
                    }
                }
            }
        }
    }

    SsFlags {
        surjective,
        locally_surjective,
        discrete_over_vertices: discrete,
        witness,
    }
}

/// The standard simplex `Δ[d]` up to the bound.
pub fn delta_sset(d: u32, dim: usize) -> Result<BoundedSSet> {
    let mut levels = Vec::with_capacity(dim + 1);
    for n in 0..=dim {
        let mut level = Vec::new();
        let mut cur: Vec<u32> = Vec::new();
        fn rec(d: u32, len: usize, cur: &mut Vec<u32>, out: &mut Vec<SsElem>) {
            if cur.len() == len {
                out.push(SsElem::Mono(cur.clone()));
                return;
            }
            let lo = cur.last().copied().unwrap_or(0);
            for v in lo..=d {
                cur.push(v);
                rec(d, len, cur, out);
                cur.pop();
            }
        }
        rec(d, n + 1, &mut cur, &mut level);
        levels.push(level);
    }
    BoundedSSet::build(
        dim,
        levels,
        |_, i, e| match e {
            SsElem::Mono(m) => {
                let mut m = m.clone();
                m.remove(i);
                Ok(SsElem::Mono(m))
            }
            _ => Err(Error::InvalidSSet("not a Δ element".into())),
        },
        |_, j, e| match e {
            SsElem::Mono(m) => {
                let mut m = m.clone();
                m.insert(j, m[j]);
                Ok(SsElem::Mono(m))
            }
            _ => Err(Error::InvalidSSet("not a Δ element".into())),
        },
    )
}

fn tuple_union(entries: &[Option<Simplex>]) -> Option<Simplex> {
    let parts: Vec<&Simplex> = entries.iter().flatten().collect();
    if parts.is_empty() {
        None
    } else {
        Some(Simplex::union_all(parts).expect("nonempty"))
    }
}

fn union_entries(a: &Option<Simplex>, b: &Option<Simplex>) -> Option<Simplex> {
    match (a, b) {
        (None, x) => x.clone(),
        (x, None) => x.clone(),
        (Some(x), Some(y)) => Some(x.union(y)),
    }
}

/// Face and degeneracy actions on nerve tuples.
pub fn tuple_face(i: usize, entries: &[Option<Simplex>]) -> Vec<Option<Simplex>> {
    let n = entries.len();
    let mut out: Vec<Option<Simplex>> = Vec::with_capacity(n - 1);
    if i == 0 {
        out.extend(entries[1..].iter().cloned());
    } else if i == n {
        out.extend(entries[..n - 1].iter().cloned());
    } else {
        out.extend(entries[..i - 1].iter().cloned());
        out.push(union_entries(&entries[i - 1], &entries[i]));
        out.extend(entries[i + 1..].iter().cloned());
    }
    out
}

pub fn tuple_degeneracy(j: usize, entries: &[Option<Simplex>]) -> Vec<Option<Simplex>> {
    let mut out = entries.to_vec();
    out.insert(j, None);
    out
}

/// The nerve space `NΣ` at bound `dim`: level `n` holds the tuples of
/// simplices-or-empty slots whose union is a simplex (or entirely empty).
pub fn nerve_space(sigma: &Complex, dim: usize, cap: usize) -> Result<BoundedSSet> {
    let simplices: Vec<Simplex> = sigma.simplices().cloned().collect();
    let mut levels: Vec<Vec<SsElem>> = Vec::with_capacity(dim + 1);
    for n in 0..=dim {
        let mut level: Vec<SsElem> = Vec::new();
        let mut cur: Vec<Option<Simplex>> = Vec::new();
        fn rec(
            sigma: &Complex,
            simplices: &[Simplex],
            len: usize,
            cur: &mut Vec<Option<Simplex>>,
            out: &mut Vec<SsElem>,
            cap: usize,
        ) -> Result<()> {
            if out.len() > cap {
                return Err(Error::CapExceeded(format!(
                    "nerve space level exceeds {cap} elements"
                )));
            }
            if cur.len() == len {
                out.push(SsElem::Tuple(cur.clone()));
                return Ok(());
            }
            // Partial unions must stay simplices, which prunes the search.
            cur.push(None);
            rec(sigma, simplices, len, cur, out, cap)?;
            cur.pop();
            for s in simplices {
                cur.push(Some(s.clone()));
                if tuple_union(cur).is_none_or(|u| sigma.contains(&u)) {
                    rec(sigma, simplices, len, cur, out, cap)?;
                }
                cur.pop();
            }
            Ok(())
        }
        rec(sigma, &simplices, n, &mut cur, &mut level, cap)?;
        levels.push(level);
    }
    BoundedSSet::build(
        dim,
        levels,
        |_, i, e| Ok(SsElem::Tuple(tuple_face(i, e.as_tuple()?))),
        |_, j, e| Ok(SsElem::Tuple(tuple_degeneracy(j, e.as_tuple()?))),
    )
}

/// The nerve of a complex map, componentwise on tuples.
pub fn nerve_smap(f: &ComplexMap, dim: usize, cap: usize) -> Result<SSetMap> {
    let source = nerve_space(f.source(), dim, cap)?;
    let target = nerve_space(f.target(), dim, cap)?;
    SSetMap::build(source, target, |_, e| {
        Ok(SsElem::Tuple(
            e.as_tuple()?
                .iter()
                .map(|slot| slot.as_ref().map(|s| f.apply(s)))
                .collect(),
        ))
    })
}

/// `T(π) : NΣ′ → NΣ`, applying `π̄` in every slot.
pub fn t_of_relation(pi: &SimplicialRelation, dim: usize, cap: usize) -> Result<SSetMap> {
    let source = nerve_space(pi.source(), dim, cap)?;
    let target = nerve_space(pi.target(), dim, cap)?;
    SSetMap::build(source, target, |_, e| {
        Ok(SsElem::Tuple(
            e.as_tuple()?
                .iter()
                .map(|slot| slot.as_ref().map(|s| pi.apply(s)))
                .collect(),
        ))
    })
}

/// `μ̃_Σ : NˆNΣ → NΣ`: unions a family of simplices in every slot.
pub fn mu_tilde(sigma: &Complex, dim: usize, cap: usize) -> Result<SSetMap> {
    let hat = hat_n(sigma, cap)?;
    let source = nerve_space(&hat, dim, cap)?;
    let target = nerve_space(sigma, dim, cap)?;
    SSetMap::build(source, target, |_, e| {
        Ok(SsElem::Tuple(
            e.as_tuple()?
                .iter()
                .map(|slot| {
                    slot.as_ref().map(|family| {
                        let parts: Vec<Simplex> = family
                            .vertices()
                            .iter()
                            .map(|v| v.as_set().expect("nerve vertex"))
                            .collect();
                        Simplex::union_all(parts.iter()).expect("nonempty family")
                    })
                })
                .collect(),
        ))
    })
}

/// Recovers the unique simplicial relation `π` with `T(π) = g` from a map
/// of nerve spaces (levels ≥ 1 are determined by level 1).
pub fn recover_relation(
    g: &SSetMap,
    source_complex: &Complex,
    target_complex: &Complex,
) -> Result<SimplicialRelation> {
    let mut assignment = BTreeMap::new();
    for x in source_complex.vertices() {
        let one = SsElem::Tuple(vec![Some(Simplex::singleton(x.clone()))]);
        let image = g.apply(1, &one)?;
        let slot = image.as_tuple()?[0]
            .clone()
            .ok_or_else(|| Error::InvalidMorphism(format!("vertex {x} maps to a degenerate slot")))?;
        assignment.insert(x.clone(), slot);
    }
    SimplicialRelation::new(source_complex.clone(), target_complex.clone(), assignment)
}

/// Recovers the unique complex map `α` with `Nα = g` for a map between
/// nerve spaces over a common base whose target map is discrete over
/// vertices.
pub fn recover_complex_map(
    g: &SSetMap,
    source_complex: &Complex,
    target_complex: &Complex,
) -> Result<ComplexMap> {
    let mut assignment = BTreeMap::new();
    for x in source_complex.vertices() {
        let one = SsElem::Tuple(vec![Some(Simplex::singleton(x.clone()))]);
        let image = g.apply(1, &one)?;
        let slot = image.as_tuple()?[0]
            .clone()
            .ok_or_else(|| Error::InvalidMorphism(format!("vertex {x} maps to a degenerate slot")))?;
        if slot.len() != 1 {
            return Err(Error::InvalidMorphism(format!(
                "vertex {x} maps to the non-vertex simplex {slot}"
            )));
        }
        assignment.insert(x.clone(), slot.vertices()[0].clone());
    }
    ComplexMap::new(source_complex.clone(), target_complex.clone(), assignment)
}

/// The levelwise pull-back of `f : E → X` along `π : X′ → X`.
pub struct SsPullback {
    pub total: BoundedSSet,
    pub to_total: SSetMap,
    pub to_base: SSetMap,
}

pub fn sset_pull_back(f: &SSetMap, pi: &SSetMap, cap: usize) -> Result<SsPullback> {
    if f.target() != pi.target() {
        return Err(Error::InvalidSSet("cospan targets differ".into()));
    }
    let dim = f.source().dim();
    let mut levels = Vec::with_capacity(dim + 1);
    for n in 0..=dim {
        let mut level = Vec::new();
        for (ek, e) in f.source().level(n).iter().enumerate() {
            for (xk, x) in pi.source().level(n).iter().enumerate() {
                if f.apply_idx(n, ek) == pi.apply_idx(n, xk) {
                    level.push(SsElem::pair(e.clone(), x.clone()));
                    if level.len() > cap {
                        return Err(Error::CapExceeded(format!(
                            "pull-back level exceeds {cap} elements"
                        )));
                    }
                }
            }
        }
        levels.push(level);
    }
    let e_set = f.source().clone();
    let x_set = pi.source().clone();
    let total = BoundedSSet::build(
        dim,
        levels,
        |n, i, e| {
            let (a, b) = e.as_pair()?;
            Ok(SsElem::pair(e_set.face(n, i, a)?, x_set.face(n, i, b)?))
        },
        |n, j, e| {
            let (a, b) = e.as_pair()?;
            Ok(SsElem::pair(
                e_set.degeneracy(n, j, a)?,
                x_set.degeneracy(n, j, b)?,
            ))
        },
    )?;
    let to_total = SSetMap::build(total.clone(), f.source().clone(), |_, e| {
        Ok(e.as_pair()?.0.clone())
    })?;
    let to_base = SSetMap::build(total.clone(), pi.source().clone(), |_, e| {
        Ok(e.as_pair()?.1.clone())
    })?;
    Ok(SsPullback {
        total,
        to_total,
        to_base,
    })
}

/// The levelwise product `X × Y` with its projections.
pub fn sset_product(x: &BoundedSSet, y: &BoundedSSet, cap: usize) -> Result<SsPullback> {
    // The product is the pull-back over the terminal object; build directly.
    if x.dim() != y.dim() {
        return Err(Error::InvalidSSet("dimension bounds differ".into()));
    }
    let dim = x.dim();
    let mut levels = Vec::with_capacity(dim + 1);
    for n in 0..=dim {
        let mut level = Vec::new();
        for a in x.level(n) {
            for b in y.level(n) {
                level.push(SsElem::pair(a.clone(), b.clone()));
                if level.len() > cap {
                    return Err(Error::CapExceeded(format!(
                        "product level exceeds {cap} elements"
                    )));
                }
            }
        }
        levels.push(level);
    }
    let (xc, yc) = (x.clone(), y.clone());
    let total = BoundedSSet::build(
        dim,
        levels,
        |n, i, e| {
            let (a, b) = e.as_pair()?;
            Ok(SsElem::pair(xc.face(n, i, a)?, yc.face(n, i, b)?))
        },
        |n, j, e| {
            let (a, b) = e.as_pair()?;
            Ok(SsElem::pair(xc.degeneracy(n, j, a)?, yc.degeneracy(n, j, b)?))
        },
    )?;
    let to_total = SSetMap::build(total.clone(), x.clone(), |_, e| Ok(e.as_pair()?.0.clone()))?;
    let to_base = SSetMap::build(total.clone(), y.clone(), |_, e| Ok(e.as_pair()?.1.clone()))?;
    Ok(SsPullback {
        total,
        to_total,
        to_base,
    })
}

/// A simplicial bundle scenario: a map with all three flags verified at the
/// bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplicialScenario {
    map: SSetMap,
}

impl SimplicialScenario {
    pub fn new(map: SSetMap) -> Result<Self> {
        let flags = check_simplicial_scenario(&map);
        if !flags.scenario() {
            return Err(Error::InvalidSSet(format!(
                "not a simplicial scenario: {}",
                flags.witness.unwrap_or_else(|| "flag failure".into())
            )));
        }
        Ok(SimplicialScenario { map })
    }

    pub fn map(&self) -> &SSetMap {
        &self.map
    }

    pub fn total(&self) -> &BoundedSSet {
        self.map.source()
    }

    pub fn base(&self) -> &BoundedSSet {
        self.map.target()
    }

    /// Elements of the fiber over a base element, with indices.
    pub fn fiber(&self, n: usize, x: &SsElem) -> Result<Vec<SsElem>> {
        let xk = self.base().index_of(n, x)?;
        Ok(self
            .total()
            .level(n)
            .iter()
            .enumerate()
            .filter(|(ek, _)| self.map.apply_idx(n, *ek) == xk)
            .map(|(_, e)| e.clone())
            .collect())
    }
}

/// A morphism of simplicial scenarios `f → f′`: a base map `π : X′ → X`
/// plus `α : π*(E) → E′` over `X′`, with the canonical pull-back cached.
#[derive(Clone, Debug)]
pub struct SScenMorphism {
    source: SimplicialScenario,
    target: SimplicialScenario,
    pi: SSetMap,
    pullback_bundle: SimplicialScenario,
    alpha: SSetMap,
}

impl PartialEq for SScenMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.pi == other.pi
            && self.alpha == other.alpha
    }
}
impl Eq for SScenMorphism {}

impl SScenMorphism {
    pub fn new(
        source: SimplicialScenario,
        target: SimplicialScenario,
        pi: SSetMap,
        alpha_fn: impl Fn(usize, &SsElem) -> Result<SsElem>,
        cap: usize,
    ) -> Result<Self> {
        if pi.target() != source.base() || pi.source() != target.base() {
            return Err(Error::InvalidMorphism(
                "base map must run from the target base to the source base".into(),
            ));
        }
        let pb = sset_pull_back(source.map(), &pi, cap)?;
        let pullback_bundle = SimplicialScenario::new(pb.to_base.clone())?;
        let alpha = SSetMap::build(pb.total.clone(), target.total().clone(), alpha_fn)?;
        // α must live over the new base: f′ ∘ α = f^π.
        if alpha.then(target.map())? != pb.to_base {
            return Err(Error::InvalidMorphism("α is not a map over the new base".into()));
        }
        Ok(SScenMorphism {
            source,
            target,
            pi,
            pullback_bundle,
            alpha,
        })
    }

    pub fn identity(f: &SimplicialScenario) -> Result<Self> {
        SScenMorphism::new(
            f.clone(),
            f.clone(),
            SSetMap::identity(f.base()),
            |_, e| Ok(e.as_pair()?.0.clone()),
            usize::MAX,
        )
    }

    pub fn source(&self) -> &SimplicialScenario {
        &self.source
    }

    pub fn target(&self) -> &SimplicialScenario {
        &self.target
    }

    pub fn pi(&self) -> &SSetMap {
        &self.pi
    }

    /// The pulled-back scenario `f^π` over the new base.
    pub fn pullback_bundle(&self) -> &SimplicialScenario {
        &self.pullback_bundle
    }

    pub fn alpha(&self) -> &SSetMap {
        &self.alpha
    }

    /// Composition `other ∘ self` (apply `self` first):
    /// `(π₁ ∘ π₂, α₂ ∘ π₂*(α₁))`, evaluated on canonical pull-back pairs.
    pub fn then(&self, other: &SScenMorphism, cap: usize) -> Result<SScenMorphism> {
        if self.target != other.source {
            return Err(Error::InvalidMorphism("composition mismatch".into()));
        }
        let pi = other.pi.then(&self.pi)?;
        let first = self.clone();
        let second = other.clone();
        SScenMorphism::new(
            self.source.clone(),
            other.target.clone(),
            pi,
            move |n, e| {
                let (a, z) = e.as_pair()?;
                let mid_base = second.pi.apply(n, z)?;
                let mid = first.alpha.apply(n, &SsElem::pair(a.clone(), mid_base))?;
                second.alpha.apply(n, &SsElem::pair(mid, z.clone()))
            },
            cap,
        )
    }
}

use crate::bundle::{pullback_vertex, BundleMorphism, BundleScenario};

/// The nerve of a bundle scenario, as a verified simplicial scenario.
pub fn nerve_of_bundle(f: &BundleScenario, dim: usize, cap: usize) -> Result<SimplicialScenario> {
    SimplicialScenario::new(nerve_smap(f.map(), dim, cap)?)
}

/// The canonical isomorphism `T(π)*(NΓ) → N(π*(ˆNΓ))` of the nerve
/// pull-back comparison: each slot of the pair of tuples is decomposed into
/// pull-back vertices through fiber restriction.
pub fn nerve_pullback_compare(
    f: &BundleScenario,
    pi: &SimplicialRelation,
    t_pullback: &SsPullback,
    nerve_of_relation_pullback: &BoundedSSet,
) -> Result<SSetMap> {
    let f = f.clone();
    let pi = pi.clone();
    SSetMap::build(
        t_pullback.total.clone(),
        nerve_of_relation_pullback.clone(),
        move |_, e| {
            let (gammas, sigmas) = e.as_pair()?;
            let slots = gammas
                .as_tuple()?
                .iter()
                .zip(sigmas.as_tuple()?)
                .map(|(g, s)| match (g, s) {
                    (None, None) => Ok(None),
                    (Some(gamma), Some(sigma)) => {
                        let members = sigma
                            .vertices()
                            .iter()
                            .map(|y| {
                                let part =
                                    f.restrict_fiber(gamma, pi.vertex_value(y))?;
                                Ok(pullback_vertex(&part, y))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok(Some(Simplex::new(members)?))
                    }
                    _ => Err(Error::InvalidSSet(
                        "mismatched degenerate slots in pull-back pair".into(),
                    )),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SsElem::Tuple(slots))
        },
    )
}

/// Embeds a bundle morphism as a morphism of the nerve scenarios:
/// `(π, α) ↦ (T(π), Nα)` with the outcome part transported through the
/// canonical comparison isomorphism.
pub fn embed_bundle(m: &BundleMorphism, dim: usize, cap: usize) -> Result<SScenMorphism> {
    let source = nerve_of_bundle(m.source(), dim, cap)?;
    let target = nerve_of_bundle(m.target(), dim, cap)?;
    let t_pi = t_of_relation(m.relation(), dim, cap)?;
    let f = m.source().clone();
    let pi = m.relation().clone();
    let alpha_complex = m.alpha().clone();
    SScenMorphism::new(
        source,
        target,
        t_pi,
        move |_, e| {
            let (gammas, sigmas) = e.as_pair()?;
            let slots = gammas
                .as_tuple()?
                .iter()
                .zip(sigmas.as_tuple()?)
                .map(|(g, s)| match (g, s) {
                    (None, None) => Ok(None),
                    (Some(gamma), Some(sigma)) => {
                        let members = sigma
                            .vertices()
                            .iter()
                            .map(|y| {
                                let part = f.restrict_fiber(gamma, pi.vertex_value(y))?;
                                Ok(pullback_vertex(&part, y))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok(Some(alpha_complex.apply(&Simplex::new(members)?)))
                    }
                    _ => Err(Error::InvalidSSet(
                        "mismatched degenerate slots in pull-back pair".into(),
                    )),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SsElem::Tuple(slots))
        },
        cap,
    )
}

/// Recovers the bundle morphism `(π, α)` from its embedded form between
/// nerve scenarios.
pub fn recover_bundle_morphism(
    m: &SScenMorphism,
    f: &BundleScenario,
    f_prime: &BundleScenario,
    cap: usize,
) -> Result<BundleMorphism> {
    let pi = recover_relation(m.pi(), f_prime.base(), f.base())?;
    // α on a pull-back vertex (ν, y): transport the 1-level image of the
    // embedded α.
    let pb = crate::bundle::RelationPullback::new(f, &pi, cap)?;
    let assignment = pb
        .bundle()
        .total()
        .vertices()
        .iter()
        .map(|v| {
            let (nu, y) = crate::bundle::split_pullback_vertex(v)?;
            let pair = SsElem::pair(
                SsElem::Tuple(vec![Some(nu)]),
                SsElem::Tuple(vec![Some(Simplex::singleton(y))]),
            );
            let image = m.alpha().apply(1, &pair)?;
            let slot = image.as_tuple()?[0]
                .clone()
                .ok_or_else(|| Error::InvalidMorphism("degenerate α image".into()))?;
            if slot.len() != 1 {
                return Err(Error::InvalidMorphism(format!(
                    "α image {slot} is not a vertex"
                )));
            }
            Ok((v.clone(), slot.vertices()[0].clone()))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    BundleMorphism::new(f.clone(), f_prime.clone(), pi, assignment, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{canonical_bundle, embed_scenario};
    use crate::complex::DEFAULT_SIMPLEX_CAP as CAP;
    use crate::sample;

    const LC: usize = DEFAULT_LEVEL_CAP;

    fn point_complex() -> Complex {
        Complex::from_maximal([crate::complex::Vertex::atom("v")], &[]).unwrap()
    }

    #[test]
    fn nerve_space_of_a_point_has_expected_levels() {
        let n = nerve_space(&point_complex(), 2, LC).unwrap();
        assert_eq!(n.level(0).len(), 1);
        assert_eq!(n.level(1).len(), 2);
        assert_eq!(n.level(2).len(), 4);
    }

    #[test]
    fn face_of_level_two_unions_the_entries() {
        let tri = sample::triangle();
        let n = nerve_space(&tri, 2, LC).unwrap();
        let s0 = Simplex::singleton(crate::complex::Vertex::atom("x0"));
        let s1 = Simplex::singleton(crate::complex::Vertex::atom("x1"));
        let e = SsElem::Tuple(vec![Some(s0.clone()), Some(s1.clone())]);
        let d1 = n.face(2, 1, &e).unwrap();
        assert_eq!(d1, SsElem::Tuple(vec![Some(s0.union(&s1))]));
        // d_0 and d_2 drop the outer entries.
        assert_eq!(n.face(2, 0, &e).unwrap(), SsElem::Tuple(vec![Some(s1)]));
        assert_eq!(n.face(2, 2, &e).unwrap(), SsElem::Tuple(vec![Some(s0)]));
    }

    #[test]
    fn delta_sset_identities_and_sizes() {
        let d1 = delta_sset(1, 3).unwrap();
        // Δ[1] levels: nondecreasing tuples over {0,1}: n+2 of length n+1.
        for n in 0..=3 {
            assert_eq!(d1.level(n).len(), n + 2);
        }
    }

    #[test]
    fn nerve_of_bundle_is_a_simplicial_scenario() {
        let scn = sample::triangle_z2();
        let f = canonical_bundle(&scn, CAP).unwrap();
        let nf = nerve_smap(f.map(), 3, LC).unwrap();
        let flags = check_simplicial_scenario(&nf);
        assert!(flags.scenario(), "witness: {:?}", flags.witness);
    }

    #[test]
    fn identity_is_a_scenario_and_projection_is_not_discrete() {
        let tri = sample::triangle();
        let n = nerve_space(&tri, 2, LC).unwrap();
        let id = SSetMap::identity(&n);
        assert!(check_simplicial_scenario(&id).scenario());

        // Projection X×Y → X with |Y₀| ≥ 2 is locally surjective but not
        // discrete over vertices.
        let y = nerve_space(&sample::square(), 2, LC).unwrap();
        let prod = sset_product(&n, &y, LC).unwrap();
        let flags = check_simplicial_scenario(&prod.to_total);
        assert!(flags.surjective);
        assert!(flags.locally_surjective);
        assert!(!flags.discrete_over_vertices);

        // The nerve of any complex map is discrete over vertices, even for
        // the fold map (which is not discrete as a complex map).
        let fold = {
            let edge = Complex::from_maximal(
                [crate::complex::Vertex::atom("a"), crate::complex::Vertex::atom("b")],
                &[Simplex::new([
                    crate::complex::Vertex::atom("a"),
                    crate::complex::Vertex::atom("b"),
                ])
                .unwrap()],
            )
            .unwrap();
            let point = point_complex();
            let map = [
                (crate::complex::Vertex::atom("a"), crate::complex::Vertex::atom("v")),
                (crate::complex::Vertex::atom("b"), crate::complex::Vertex::atom("v")),
            ]
            .into_iter()
            .collect();
            ComplexMap::new(edge, point, map).unwrap()
        };
        assert!(!fold.classify().discrete_over_vertices);
        let nfold = nerve_smap(&fold, 2, LC).unwrap();
        let flags = check_simplicial_scenario(&nfold);
        assert!(flags.discrete_over_vertices);
    }

    #[test]
    fn t_of_relation_laws() {
        let m = sample::triangle_to_square_morphism().unwrap();
        let pi = m.relation();
        let t = t_of_relation(pi, 2, LC).unwrap();

        // T(δ) = id.
        let delta = SimplicialRelation::delta(pi.source());
        let t_delta = t_of_relation(&delta, 2, LC).unwrap();
        assert_eq!(t_delta, SSetMap::identity(t.source()));

        // Level-1 action is π̄ slotwise.
        for sigma in pi.source().simplices() {
            let e = SsElem::Tuple(vec![Some(sigma.clone())]);
            let image = t.apply(1, &e).unwrap();
            assert_eq!(image, SsElem::Tuple(vec![Some(pi.apply(sigma))]));
        }

        // T factors through μ̃: T(π) = μ̃_Σ ∘ Nπ.
        let mu = mu_tilde(pi.target(), 2, LC).unwrap();
        let n_pi = {
            let as_map = pi.to_nerve_map(CAP).unwrap();
            nerve_smap(&as_map, 2, LC).unwrap()
        };
        assert_eq!(n_pi.then(&mu).unwrap(), t);

        // T(π ⋄ π′) = T(π) ∘ T(π′) and recovery round trip.
        let mut rng = crate::rng::Rng::new(2);
        let pi2 = sample::random_relation(pi.source(), pi.source(), &mut rng, 20).unwrap();
        let composed = pi.kleisli(&pi2).unwrap();
        let lhs = t_of_relation(&composed, 2, LC).unwrap();
        let rhs = t_of_relation(&pi2, 2, LC).unwrap().then(&t).unwrap();
        assert_eq!(lhs, rhs);
        let recovered = recover_relation(&lhs, composed.source(), composed.target()).unwrap();
        assert_eq!(recovered, composed);
    }

    #[test]
    fn pullback_of_identity_is_isomorphic_to_total() {
        let scn = sample::triangle_z2();
        let f = canonical_bundle(&scn, CAP).unwrap();
        let nf = nerve_smap(f.map(), 2, LC).unwrap();
        let id = SSetMap::identity(nf.target());
        let pb = sset_pull_back(&nf, &id, LC).unwrap();
        for n in 0..=2 {
            assert_eq!(pb.total.level(n).len(), nf.source().level(n).len());
        }
        // Scenario flags survive the pull-back.
        assert!(check_simplicial_scenario(&pb.to_base).scenario());
    }

    #[test]
    fn nerve_pullback_comparison_is_an_isomorphism() {
        // T(π)*(NΓ) ≅ N(π*(ˆNΓ)) through the slotwise decomposition map.
        let m = sample::triangle_to_square_morphism().unwrap();
        let f = canonical_bundle(m.source(), CAP).unwrap();
        let pi = m.relation();
        let t = t_of_relation(pi, 2, LC).unwrap();
        let nf = nerve_smap(f.map(), 2, LC).unwrap();
        let t_pb = sset_pull_back(&nf, &t, LC).unwrap();
        let complex_pb = crate::bundle::RelationPullback::new(&f, pi, CAP).unwrap();
        let n_of_pb = nerve_space(complex_pb.bundle().total(), 2, LC).unwrap();
        let compare = nerve_pullback_compare(&f, pi, &t_pb, &n_of_pb).unwrap();
        // Bijective in every level.
        for n in 0..=2 {
            let mut seen = std::collections::BTreeSet::new();
            for e in t_pb.total.level(n) {
                seen.insert(compare.apply(n, e).unwrap());
            }
            assert_eq!(seen.len(), t_pb.total.level(n).len());
            assert_eq!(seen.len(), n_of_pb.level(n).len());
        }
    }

    #[test]
    fn embed_bundle_functor_laws_and_recovery() {
        let m = sample::triangle_to_square_morphism().unwrap();
        let bm = embed_scenario(&m, CAP).unwrap();
        let sm = embed_bundle(&bm, 2, LC).unwrap();

        // Identity embeds to identity.
        let idb = crate::bundle::BundleMorphism::identity(bm.source()).unwrap();
        let embedded_id = embed_bundle(&idb, 2, LC).unwrap();
        let expected_id = SScenMorphism::identity(embedded_id.source()).unwrap();
        assert_eq!(embedded_id, expected_id);

        // Recover the bundle morphism from its embedding.
        let recovered = recover_bundle_morphism(&sm, bm.source(), bm.target(), CAP).unwrap();
        assert_eq!(recovered, bm);
    }

    #[test]
    fn sscen_composition_laws() {
        let m = sample::triangle_to_square_morphism().unwrap();
        let bm = embed_scenario(&m, CAP).unwrap();
        let sm = embed_bundle(&bm, 2, LC).unwrap();
        let id_src = SScenMorphism::identity(sm.source()).unwrap();
        let id_tgt = SScenMorphism::identity(sm.target()).unwrap();
        assert_eq!(id_src.then(&sm, LC).unwrap(), sm);
        assert_eq!(sm.then(&id_tgt, LC).unwrap(), sm);

        // N preserves composition.
        let mut rng = crate::rng::Rng::new(6);
        let m2 = sample::random_endomorphism(m.target(), &mut rng).unwrap();
        let bm2 = embed_scenario(&m2, CAP).unwrap();
        let lhs = embed_bundle(&bm.then(&bm2, CAP).unwrap(), 2, LC).unwrap();
        let rhs = embed_bundle(&bm, 2, LC)
            .unwrap()
            .then(&embed_bundle(&bm2, 2, LC).unwrap(), LC)
            .unwrap();
        assert_eq!(lhs, rhs);
    }
}
