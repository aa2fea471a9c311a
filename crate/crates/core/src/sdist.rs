//! Simplicial distributions on simplicial bundle scenarios: validation,
//! deterministic distributions, push-forwards, the natural isomorphism ζ
//! with bundle models, and the outcome-map correspondence for product
//! projections.

use std::collections::BTreeMap;

use crate::bundle::{BundleModel, BundleScenario};
use crate::dist::{Dist, DistFamily};
use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::sset::{nerve_smap, BoundedSSet, SScenMorphism, SSetMap, SsElem, SsPullback};

/// A levelwise assignment `p_n : X_n → D_R(E_n)` that is a simplicial map
/// into `D_R(E)` and whose supports sit in the fibers of the underlying map.
///
/// Defined over any simplicial set map (distributions on product
/// projections are meaningful even though projections are not scenarios).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplicialDistribution<R: Semiring> {
    map: SSetMap,
    tables: Vec<BTreeMap<SsElem, Dist<SsElem, R>>>,
}

impl<R: Semiring> SimplicialDistribution<R> {
    pub fn new(map: SSetMap, tables: Vec<BTreeMap<SsElem, Dist<SsElem, R>>>) -> Result<Self> {
        let sd = SimplicialDistribution { map, tables };
        sd.validate()?;
        Ok(sd)
    }

    pub fn map(&self) -> &SSetMap {
        &self.map
    }

    pub fn dist(&self, n: usize, x: &SsElem) -> Result<&Dist<SsElem, R>> {
        self.tables
            .get(n)
            .and_then(|t| t.get(x))
            .ok_or_else(|| Error::InvalidSDist(format!("no distribution at level {n} on {x:?}")))
    }

    pub fn tables(&self) -> &[BTreeMap<SsElem, Dist<SsElem, R>>] {
        &self.tables
    }

    /// Checks the simplicial-map property into `D_R(E)` and the fiber
    /// support condition; reports the failing level and element.
    pub fn validate(&self) -> Result<()> {
        let x_set = self.map.target();
        let e_set = self.map.source();
        let dim = x_set.dim();
        if self.tables.len() != dim + 1 {
            return Err(Error::InvalidSDist(format!(
                "expected {} levels of tables, got {}",
                dim + 1,
                self.tables.len()
            )));
        }
        for n in 0..=dim {
            for x in x_set.level(n) {
                let d = self
                    .tables[n]
                    .get(x)
                    .ok_or_else(|| Error::InvalidSDist(format!("missing entry at level {n}: {}", x.label())))?;
                for e in d.support() {
                    let mapped = self.map.apply(n, e)?;
                    if mapped != *x {
                        return Err(Error::InvalidSDist(format!(
                            "support escapes the fiber at level {n}: {} over {}",
                            e.label(),
                            x.label()
                        )));
                    }
                }
            }
        }
        for n in 1..=dim {
            for x in x_set.level(n) {
                for i in 0..=n {
                    let lhs = self.tables[n][x].try_push(|e| e_set.face(n, i, e))?;
                    let rhs = &self.tables[n - 1][&x_set.face(n, i, x)?];
                    if lhs != *rhs {
                        return Err(Error::InvalidSDist(format!(
                            "distribution does not commute with d_{i} at level {n} on {}",
                            x.label()
                        )));
                    }
                }
            }
        }
        for n in 0..dim {
            for x in x_set.level(n) {
                for j in 0..=n {
                    let lhs = self.tables[n][x].try_push(|e| e_set.degeneracy(n, j, e))?;
                    let rhs = &self.tables[n + 1][&x_set.degeneracy(n, j, x)?];
                    if lhs != *rhs {
                        return Err(Error::InvalidSDist(format!(
                            "distribution does not commute with s_{j} at level {n} on {}",
                            x.label()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The deterministic distribution `δ^s` of a section.
    pub fn deterministic(map: &SSetMap, section: &SSetMap) -> Result<Self> {
        if section.source() != map.target() || section.target() != map.source() {
            return Err(Error::InvalidSDist("section shape mismatch".into()));
        }
        if section.then(map)? != SSetMap::identity(map.target()) {
            return Err(Error::InvalidSDist("not a section".into()));
        }
        let mut tables = Vec::with_capacity(map.target().dim() + 1);
        for n in 0..=map.target().dim() {
            let mut table = BTreeMap::new();
            for x in map.target().level(n) {
                table.insert(x.clone(), Dist::point(section.apply(n, x)?));
            }
            tables.push(table);
        }
        SimplicialDistribution::new(map.clone(), tables)
    }

    /// Convex mixture (the `ν` structure of the simplicial-distribution set).
    pub fn mix(parts: &[(SimplicialDistribution<R>, R)]) -> Result<Self> {
        let Some((first, _)) = parts.first() else {
            return Err(Error::MixtureShape("empty mixture".into()));
        };
        let map = first.map.clone();
        if parts.iter().any(|(p, _)| p.map != map) {
            return Err(Error::MixtureShape("distributions on different scenarios".into()));
        }
        let dim = map.target().dim();
        let mut tables = Vec::with_capacity(dim + 1);
        for n in 0..=dim {
            let families: Vec<(DistFamily<SsElem, SsElem, R>, R)> = parts
                .iter()
                .map(|(p, w)| (p.tables[n].clone(), w.clone()))
                .collect();
            tables.push(crate::dist::convex_mix(&families)?);
        }
        SimplicialDistribution::new(map, tables)
    }

    /// Push-forward along a morphism of simplicial scenarios:
    /// `(π,α)_* p = D_R(α) ∘ π_*(p)` with
    /// `(π_* p)_n(x′) = p_n(π_n(x′))·δ^{x′}` on pull-back pairs.
    pub fn push_forward(&self, m: &SScenMorphism) -> Result<Self> {
        if m.source().map() != &self.map {
            return Err(Error::InvalidSDist(
                "distribution lives on a different scenario".into(),
            ));
        }
        let target = m.target().map().clone();
        let dim = target.target().dim();
        let mut tables = Vec::with_capacity(dim + 1);
        for n in 0..=dim {
            let mut table = BTreeMap::new();
            for x_prime in target.target().level(n) {
                let x = m.pi().apply(n, x_prime)?;
                let pulled = self.dist(n, &x)?;
                // Pair every support element with x′ and apply α.
                let pushed = pulled.try_push(|e| {
                    m.alpha().apply(n, &SsElem::pair(e.clone(), x_prime.clone()))
                })?;
                table.insert(x_prime.clone(), pushed);
            }
            tables.push(table);
        }
        SimplicialDistribution::new(target, tables)
    }
}

/// ζ: the simplicial distribution `Np` on the nerve of a bundle scenario,
/// `(Np)_n(σ₁,…,σ_n)(γ₁,…,γ_n) = p_{∪σᵢ}(∪γᵢ)` on fiber tuples.
///
/// The nerve map is built without re-running the scenario flag checks;
/// those are covered once by the structure-preservation tests.
pub fn zeta<R: Semiring>(
    f: &BundleScenario,
    p: &BundleModel<R>,
    dim: usize,
    cap: usize,
) -> Result<SimplicialDistribution<R>> {
    if p.bundle() != f {
        return Err(Error::InvalidModel("model/bundle mismatch".into()));
    }
    let map = nerve_smap(f.map(), dim, cap)?;
    // Group fibers per base element once.
    let mut fibers: Vec<BTreeMap<SsElem, Vec<SsElem>>> = Vec::with_capacity(dim + 1);
    for n in 0..=dim {
        let mut per_base: BTreeMap<SsElem, Vec<SsElem>> = BTreeMap::new();
        for e in map.source().level(n) {
            per_base.entry(map.apply(n, e)?).or_default().push(e.clone());
        }
        fibers.push(per_base);
    }
    let mut tables = Vec::with_capacity(dim + 1);
    for (n, level_fibers) in fibers.iter().enumerate() {
        let mut table = BTreeMap::new();
        for x in map.target().level(n) {
            let base_union = tuple_union_of(x)?;
            let pairs = level_fibers
                .get(x)
                .map(Vec::as_slice)
                .unwrap_or(&[])
                .iter()
                .map(|e| {
                    let w = match (&base_union, tuple_union_of(e)?) {
                        (None, None) => R::one(),
                        (Some(sigma), Some(gamma)) => p.dist(sigma)?.weight(&gamma),
                        _ => R::zero(),
                    };
                    Ok((e.clone(), w))
                })
                .collect::<Result<Vec<_>>>()?;
            table.insert(x.clone(), Dist::new(pairs)?);
        }
        tables.push(table);
    }
    SimplicialDistribution::new(map, tables)
}

fn tuple_union_of(e: &SsElem) -> Result<Option<crate::complex::Simplex>> {
    let slots = e.as_tuple()?;
    let parts: Vec<&crate::complex::Simplex> = slots.iter().flatten().collect();
    if parts.is_empty() {
        Ok(None)
    } else {
        Ok(Some(crate::complex::Simplex::union_all(parts)?))
    }
}

/// ζ⁻¹: a simplicial distribution on a nerve scenario is determined by its
/// level-one values.
pub fn zeta_inverse<R: Semiring>(
    f: &BundleScenario,
    sd: &SimplicialDistribution<R>,
) -> Result<BundleModel<R>> {
    let mut dists = BTreeMap::new();
    for sigma in f.base().simplices() {
        let x = SsElem::Tuple(vec![Some(sigma.clone())]);
        let d = sd.dist(1, &x)?.try_push(|e| {
            tuple_union_of(e)?
                .ok_or_else(|| Error::InvalidSDist("degenerate support over a simplex".into()))
        })?;
        dists.insert(sigma.clone(), d);
    }
    BundleModel::new(f.clone(), dists)
}

/// Enumerates all sections of a simplicial set map up to the bound, by
/// levelwise backtracking (degenerate values are forced by lower levels).
pub fn enumerate_sset_sections(f: &SSetMap, cap: usize) -> Result<Vec<SSetMap>> {
    let x_set = f.target().clone();
    let e_set = f.source().clone();
    let dim = x_set.dim();
    let mut complete: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut partial: Vec<Vec<usize>> = Vec::new();
    search_level(f, &x_set, &e_set, dim, 0, &mut partial, &mut complete, cap)?;
    complete
        .into_iter()
        .map(|maps| {
            SSetMap::build(x_set.clone(), e_set.clone(), |n, x| {
                let xk = x_set.index_of(n, x)?;
                Ok(e_set.level(n)[maps[n][xk]].clone())
            })
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn search_level(
    f: &SSetMap,
    x_set: &BoundedSSet,
    e_set: &BoundedSSet,
    dim: usize,
    n: usize,
    chosen: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<Vec<usize>>>,
    cap: usize,
) -> Result<()> {
    if out.len() > cap {
        return Err(Error::CapExceeded(format!("more than {cap} sections")));
    }
    if n > dim {
        out.push(chosen.clone());
        return Ok(());
    }
    // Candidates per element of X_n: fiber elements whose faces match the
    // already-chosen level, with degenerate elements forced.
    let level = x_set.level(n);
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(level.len());
    for (xk, x) in level.iter().enumerate() {
        let mut cands: Vec<usize> = Vec::new();
        'cand: for (ek, e) in e_set.level(n).iter().enumerate() {
            if f.apply(n, e)? != *x {
                continue;
            }
            if n >= 1 {
                for i in 0..=n {
                    let xf = x_set.face(n, i, x)?;
                    let xfk = x_set.index_of(n - 1, &xf)?;
                    let ef = e_set.face(n, i, e)?;
                    let efk = e_set.index_of(n - 1, &ef)?;
                    if chosen[n - 1][xfk] != efk {
                        continue 'cand;
                    }
                }
                // Degeneracies from below force values.
                for j in 0..n {
                    for (yk, _y) in x_set.level(n - 1).iter().enumerate() {
                        if x_set.degen_idx(n - 1, j, yk) == xk
                            && e_set.degen_idx(n - 1, j, chosen[n - 1][yk]) != ek
                        {
                            continue 'cand;
                        }
                    }
                }
            }
            cands.push(ek);
        }
        if cands.is_empty() {
            return Ok(());
        }
        candidates.push(cands);
    }
    // Product over the level.
    let mut assignment = vec![0usize; level.len()];
    product_assignments(f, x_set, e_set, dim, n, &candidates, 0, &mut assignment, chosen, out, cap)
}

#[allow(clippy::too_many_arguments)]
fn product_assignments(
    f: &SSetMap,
    x_set: &BoundedSSet,
    e_set: &BoundedSSet,
    dim: usize,
    n: usize,
    candidates: &[Vec<usize>],
    slot: usize,
    assignment: &mut Vec<usize>,
    chosen: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<Vec<usize>>>,
    cap: usize,
) -> Result<()> {
    if slot == candidates.len() {
        chosen.push(assignment.clone());
        search_level(f, x_set, e_set, dim, n + 1, chosen, out, cap)?;
        chosen.pop();
        return Ok(());
    }
    for &c in &candidates[slot] {
        assignment[slot] = c;
        product_assignments(
            f, x_set, e_set, dim, n, candidates, slot + 1, assignment, chosen, out, cap,
        )?;
    }
    Ok(())
}

/// Converts a simplicial distribution on the product projection
/// `X × Y → X` into the outcome map `X → D_R(Y)`: the `Y`-marginal at each
/// element.
pub fn to_outcome_map<R: Semiring>(
    p: &SimplicialDistribution<R>,
) -> Result<Vec<BTreeMap<SsElem, Dist<SsElem, R>>>> {
    let dim = p.map().target().dim();
    let mut tables = Vec::with_capacity(dim + 1);
    for n in 0..=dim {
        let mut table = BTreeMap::new();
        for x in p.map().target().level(n) {
            let q = p.dist(n, x)?.try_push(|e| Ok(e.as_pair()?.1.clone()))?;
            table.insert(x.clone(), q);
        }
        tables.push(table);
    }
    Ok(tables)
}

/// Lifts an outcome map `X → D_R(Y)` to a simplicial distribution on the
/// projection: `p_n(x) = δ^x · q_n(x)`.
pub fn from_outcome_map<R: Semiring>(
    projection: &SsPullback,
    q: &[BTreeMap<SsElem, Dist<SsElem, R>>],
) -> Result<SimplicialDistribution<R>> {
    let map = projection.to_total.clone();
    let dim = map.target().dim();
    let mut tables = Vec::with_capacity(dim + 1);
    for n in 0..=dim {
        let mut table = BTreeMap::new();
        for x in map.target().level(n) {
            let qd = q
                .get(n)
                .and_then(|t| t.get(x))
                .ok_or_else(|| Error::InvalidSDist(format!("missing outcome entry at level {n}")))?;
            let d = qd.push(|y| SsElem::pair(x.clone(), y.clone()));
            table.insert(x.clone(), d);
        }
        tables.push(table);
    }
    SimplicialDistribution::new(map, tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{canonical_bundle, embed_scenario, eta, push_forward_bundle};
    use crate::complex::{Simplex, Vertex, DEFAULT_SIMPLEX_CAP as CAP};
    use crate::sample;
    use crate::semiring::Rat;
    use crate::sset::{embed_bundle, sset_product, nerve_space, DEFAULT_LEVEL_CAP as LC};

    #[test]
    fn zeta_round_trips_on_random_models() {
        let scn = sample::triangle_z2();
        let f = canonical_bundle(&scn, CAP).unwrap();
        let mut rng = crate::rng::Rng::new(44);
        for _ in 0..4 {
            let e = sample::random_model(&scn, &mut rng).unwrap();
            let p = eta(&scn, &e, CAP).unwrap();
            let sd = zeta(&f, &p, 2, LC).unwrap();
            sd.validate().unwrap();
            assert_eq!(zeta_inverse(&f, &sd).unwrap(), p);
        }
    }

    #[test]
    fn zeta_level_values_match_the_formula() {
        // Level 1 restricts to p; level 2 on ({x0},{x1}) weights the pair
        // ((a),(b)) by p_{x0x1}(ab) = 1/4 for the uniform model.
        let scn = sample::triangle_z2();
        let f = canonical_bundle(&scn, CAP).unwrap();
        let e = sample::uniform_model(&scn).unwrap();
        let p = eta(&scn, &e, CAP).unwrap();
        let sd = zeta(&f, &p, 2, LC).unwrap();

        for (sigma, d) in p.dists() {
            let x = SsElem::Tuple(vec![Some(sigma.clone())]);
            let lifted = sd.dist(1, &x).unwrap();
            for (gamma, w) in d.iter() {
                assert_eq!(lifted.weight(&SsElem::Tuple(vec![Some(gamma.clone())])), w.clone());
            }
        }

        let x0 = Simplex::singleton(Vertex::atom("x0"));
        let x1 = Simplex::singleton(Vertex::atom("x1"));
        let x = SsElem::Tuple(vec![Some(x0.clone()), Some(x1.clone())]);
        let d2 = sd.dist(2, &x).unwrap();
        let quarter = Rat::new(1, 4).unwrap();
        for g0 in f.fiber(&x0).unwrap() {
            for g1 in f.fiber(&x1).unwrap() {
                let e2 = SsElem::Tuple(vec![Some(g0.clone()), Some(g1.clone())]);
                assert_eq!(d2.weight(&e2), quarter);
            }
        }
    }

    #[test]
    fn deterministic_distributions_validate() {
        let scn = sample::triangle_z2();
        let f = canonical_bundle(&scn, CAP).unwrap();
        let nerve = crate::sset::nerve_smap(f.map(), 2, LC).unwrap();
        let sections = enumerate_sset_sections(&nerve, 100_000).unwrap();
        // Nerve sections correspond to bundle sections: 2^3 global Z₂
        // assignments on the triangle.
        assert_eq!(sections.len(), 8);
        for s in &sections {
            let sd: SimplicialDistribution<Rat> =
                SimplicialDistribution::deterministic(&nerve, s).unwrap();
            sd.validate().unwrap();
        }
    }

    #[test]
    fn push_forward_matches_zeta_naturality() {
        // ζ(push(m, p)) = push(N m, ζ(p)) on the triangle → square morphism.
        let m = sample::triangle_to_square_morphism().unwrap();
        let bm = embed_scenario(&m, CAP).unwrap();
        let sm = embed_bundle(&bm, 2, LC).unwrap();
        let mut rng = crate::rng::Rng::new(91);
        for _ in 0..3 {
            let e = sample::random_model(m.source(), &mut rng).unwrap();
            let p = eta(m.source(), &e, CAP).unwrap();
            let lhs = zeta(bm.target(), &push_forward_bundle(&bm, &p).unwrap(), 2, LC).unwrap();
            let rhs = zeta(bm.source(), &p, 2, LC)
                .unwrap()
                .push_forward(&sm)
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn remark_conversions_are_mutually_inverse_at_dim_two() {
        // Simplicial distributions on X×Y → X versus outcome maps X → D(Y),
        // on a desk-sized product (section enumeration is exponential).
        let edge = crate::complex::Complex::from_maximal(
            [Vertex::atom("u"), Vertex::atom("w")],
            &[Simplex::new([Vertex::atom("u"), Vertex::atom("w")]).unwrap()],
        )
        .unwrap();
        let x = nerve_space(&edge, 2, LC).unwrap();
        let y = crate::sset::delta_sset(1, 2).unwrap();
        let prod = sset_product(&x, &y, LC).unwrap();

        // Build a simplicial distribution from a deterministic outcome map
        // plus a mixture, then convert both ways.
        let proj = prod.to_total.clone();
        let sections = enumerate_sset_sections(&proj, 10_000).unwrap();
        assert!(!sections.is_empty());
        let d0: SimplicialDistribution<Rat> =
            SimplicialDistribution::deterministic(&proj, &sections[0]).unwrap();
        let d1: SimplicialDistribution<Rat> =
            SimplicialDistribution::deterministic(&proj, sections.last().unwrap()).unwrap();
        let half = Rat::new(1, 2).unwrap();
        let mixed = SimplicialDistribution::mix(&[(d0, half.clone()), (d1, half)]).unwrap();

        let q = to_outcome_map(&mixed).unwrap();
        let back = from_outcome_map(&prod, &q).unwrap();
        assert_eq!(back, mixed);

        // And the other composite: outcome map → distribution → outcome map.
        let q2 = to_outcome_map(&back).unwrap();
        assert_eq!(q2, q);
    }

    #[test]
    fn mixing_commutes_with_push_forward() {
        let m = sample::triangle_to_square_morphism().unwrap();
        let bm = embed_scenario(&m, CAP).unwrap();
        let sm = embed_bundle(&bm, 2, LC).unwrap();
        let mut rng = crate::rng::Rng::new(17);
        let e1 = sample::random_model(m.source(), &mut rng).unwrap();
        let e2 = sample::random_model(m.source(), &mut rng).unwrap();
        let p1 = zeta(bm.source(), &eta(m.source(), &e1, CAP).unwrap(), 2, LC).unwrap();
        let p2 = zeta(bm.source(), &eta(m.source(), &e2, CAP).unwrap(), 2, LC).unwrap();
        let w = Rat::new(1, 3).unwrap();
        let cw = Rat::new(2, 3).unwrap();
        let mixed = SimplicialDistribution::mix(&[(p1.clone(), w.clone()), (p2.clone(), cw.clone())]).unwrap();
        let lhs = mixed.push_forward(&sm).unwrap();
        let rhs = SimplicialDistribution::mix(&[
            (p1.push_forward(&sm).unwrap(), w),
            (p2.push_forward(&sm).unwrap(), cw),
        ])
        .unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[cfg(test)]
mod extra_tests {
    use super::*;
    use crate::bundle::{canonical_bundle, eta};
    use crate::complex::DEFAULT_SIMPLEX_CAP as CAP;
    use crate::sample;
    use crate::semiring::Rat;
    use crate::sset::DEFAULT_LEVEL_CAP as LC;

    #[test]
    fn off_fiber_support_is_rejected_with_a_witness() {
        let scn = sample::triangle_z2();
        let f = canonical_bundle(&scn, CAP).unwrap();
        let e = sample::uniform_model(&scn).unwrap();
        let p = eta(&scn, &e, CAP).unwrap();
        let sd = zeta(&f, &p, 2, LC).unwrap();

        // Move one level-1 distribution onto a different base element.
        let mut tables = sd.tables().to_vec();
        let xs: Vec<SsElem> = sd.map().target().level(1).to_vec();
        let donor = xs
            .iter()
            .find(|x| {
                matches!(x.as_tuple().map(|t| t[0].is_some()), Ok(true))
            })
            .unwrap()
            .clone();
        let receiver = xs
            .iter()
            .find(|x| {
                **x != donor && matches!(x.as_tuple().map(|t| t[0].is_some()), Ok(true))
            })
            .unwrap()
            .clone();
        let moved = tables[1][&donor].clone();
        tables[1].insert(receiver, moved);
        let err = SimplicialDistribution::<Rat>::new(sd.map().clone(), tables).unwrap_err();
        assert!(err.to_string().contains("level 1"), "{err}");
    }
}
