//! Sections in all three settings, deterministic distributions, the Θ
//! comparison maps, and the contextuality decision with verifiable
//! certificates.
//!
//! Over the non-negative rationals the decision is exact convex-hull
//! membership: feasibility of the section-weight system on maximal
//! contexts, solved by the phase-I simplex. A feasible point is returned as
//! explicit weights (re-mixing exactly to the input model); infeasibility
//! yields a separating functional extracted from the phase-I duals and
//! verified by direct evaluation against every deterministic column.
//! Over the booleans the decision is support-extension analysis.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;

use crate::bundle::{BundleModel, BundleScenario};
use crate::complex::{ComplexMap, Outcome, Simplex, Vertex};
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::lp::{solve_feasibility, LpOutcome};
use crate::scenario::{EmpiricalModel, Scenario, SectionOver};
use crate::sdist::SimplicialDistribution;
use crate::semiring::{Rat, Semiring};
use crate::sset::{nerve_smap, SSetMap, SsElem};

/// Default refusal threshold for section enumeration.
pub const DEFAULT_SECTION_CAP: usize = 100_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    NonContextual,
    Contextual,
}

/// Outcome of a contextuality decision. `K` is the flavor's row key: a
/// (context, local element) coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate<K> {
    /// Exact convex weights over the canonical section list (rationals).
    Mixture { weights: Vec<(usize, Rat)> },
    /// A separating functional: its value on the model exceeds its maximum
    /// over all deterministic columns (rationals).
    Separation {
        coefficients: Vec<(K, BigRational)>,
        threshold: BigRational,
        value: BigRational,
    },
    /// The compatible-section family reproducing every context support
    /// (booleans).
    SupportCover { sections: Vec<usize> },
    /// A support element that extends to no global section (booleans).
    SupportGap { witness: K },
}

impl<K> Certificate<K> {
    pub fn verdict(&self) -> Verdict {
        match self {
            Certificate::Mixture { .. } | Certificate::SupportCover { .. } => {
                Verdict::NonContextual
            }
            Certificate::Separation { .. } | Certificate::SupportGap { .. } => Verdict::Contextual,
        }
    }
}

/// The row/column table of one decision instance: binary columns (one per
/// global section) against model values per row, plus an implicit
/// normalization row.
pub struct DecisionTable<K> {
    pub rows: Vec<(K, BigRational)>,
    /// Per section: sorted indices of the rows its deterministic model hits.
    pub columns: Vec<Vec<usize>>,
}

/// Decides membership of the model column in the convex hull of the
/// deterministic columns, exactly.
pub fn decide_table<K: Clone>(table: &DecisionTable<K>) -> Result<Certificate<K>> {
    let m = table.rows.len() + 1;
    let n = table.columns.len();
    let mut a = vec![vec![BigRational::zero(); n]; m];
    let mut b: Vec<BigRational> = table.rows.iter().map(|(_, v)| v.clone()).collect();
    for (j, hits) in table.columns.iter().enumerate() {
        for &i in hits {
            a[i][j] = BigRational::from_integer(1.into());
        }
        a[m - 1][j] = BigRational::from_integer(1.into());
    }
    b.push(BigRational::from_integer(1.into()));

    match solve_feasibility(&a, &b)? {
        LpOutcome::Feasible(x) => {
            let weights = x
                .into_iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(j, w)| Ok((j, Rat::from_big(w)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Certificate::Mixture { weights })
        }
        LpOutcome::Infeasible(y) => {
            // Drop the normalization coordinate; fold it into the threshold
            // by direct evaluation over all columns.
            let coefficients: Vec<(K, BigRational)> = table
                .rows
                .iter()
                .enumerate()
                .map(|(i, (k, _))| (k.clone(), y[i].clone()))
                .collect();
            let column_sum = |hits: &Vec<usize>| -> BigRational {
                hits.iter().map(|&i| y[i].clone()).sum()
            };
            let threshold = table
                .columns
                .iter()
                .map(column_sum)
                .max()
                .ok_or_else(|| Error::InvalidModel("no deterministic columns".into()))?;
            let value: BigRational = table
                .rows
                .iter()
                .enumerate()
                .map(|(i, (_, v))| &y[i] * v)
                .sum();
            if value <= threshold {
                return Err(Error::InvalidModel(
                    "internal: separating functional failed verification".into(),
                ));
            }
            Ok(Certificate::Separation {
                coefficients,
                threshold,
                value,
            })
        }
    }
}

/// Boolean decision data: per section, its local element per context, and
/// the supported (context, element) pairs of the model.
pub struct SupportTable<K: Ord + Clone> {
    pub supported: BTreeSet<K>,
    /// Per section: one key per context (all contexts, fixed order).
    pub columns: Vec<Vec<K>>,
}

/// Support-extension analysis: noncontextual iff every supported pair is
/// realized by a section whose every pair is supported.
pub fn decide_support_table<K: Ord + Clone>(table: &SupportTable<K>) -> Certificate<K> {
    let compatible: Vec<usize> = table
        .columns
        .iter()
        .enumerate()
        .filter(|(_, pairs)| pairs.iter().all(|k| table.supported.contains(k)))
        .map(|(j, _)| j)
        .collect();
    let mut covered: BTreeSet<&K> = BTreeSet::new();
    for &j in &compatible {
        covered.extend(table.columns[j].iter());
    }
    for k in &table.supported {
        if !covered.contains(k) {
            return Certificate::SupportGap { witness: k.clone() };
        }
    }
    Certificate::SupportCover {
        sections: compatible,
    }
}

// ---------------------------------------------------------------------------
// Scenario flavor
// ---------------------------------------------------------------------------

pub type ScenarioKey = (Simplex, SectionOver);

/// All global assignments `𝓔_O(Σ₀)`, canonically ordered; refuses beyond
/// the cap.
pub fn scenario_sections(scn: &Scenario, cap: usize) -> Result<Vec<BTreeMap<Vertex, Outcome>>> {
    if scn.global_section_count() > cap {
        return Err(Error::CapExceeded(format!(
            "{} global sections exceed the cap {cap}",
            scn.global_section_count()
        )));
    }
    let mut out: Vec<BTreeMap<Vertex, Outcome>> = vec![BTreeMap::new()];
    for v in scn.complex().vertices() {
        let mut next = Vec::with_capacity(out.len() * scn.outcomes_at(v).len());
        for prefix in &out {
            for o in scn.outcomes_at(v) {
                let mut row = prefix.clone();
                row.insert(v.clone(), o.clone());
                next.push(row);
            }
        }
        out = next;
    }
    Ok(out)
}

/// The deterministic model `δ^s` of a global assignment.
pub fn deterministic_scenario_model<R: Semiring>(
    scn: &Scenario,
    global: &BTreeMap<Vertex, Outcome>,
) -> Result<EmpiricalModel<R>> {
    let mut dists = BTreeMap::new();
    for sigma in scn.complex().simplices() {
        let values: Vec<Outcome> = sigma
            .vertices()
            .iter()
            .map(|v| {
                global
                    .get(v)
                    .cloned()
                    .ok_or_else(|| Error::InvalidScenario(format!("section misses {v}")))
            })
            .collect::<Result<_>>()?;
        dists.insert(
            sigma.clone(),
            Dist::point(SectionOver::new(sigma.clone(), values)?),
        );
    }
    EmpiricalModel::new(scn.clone(), dists)
}

/// Θ for scenarios: the convex mixture of the deterministic models of the
/// weighted sections.
pub fn theta_scenario<R: Semiring>(
    scn: &Scenario,
    sections: &[BTreeMap<Vertex, Outcome>],
    weights: &[(usize, R)],
) -> Result<EmpiricalModel<R>> {
    let parts = weights
        .iter()
        .map(|(j, w)| {
            let s = sections
                .get(*j)
                .ok_or_else(|| Error::InvalidModel(format!("section index {j} out of range")))?;
            Ok((deterministic_scenario_model(scn, s)?, w.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    EmpiricalModel::mix(&parts)
}

fn scenario_table(
    e: &EmpiricalModel<Rat>,
    sections: &[BTreeMap<Vertex, Outcome>],
    all_contexts: bool,
) -> Result<DecisionTable<ScenarioKey>> {
    let scn = e.scenario();
    let contexts: Vec<Simplex> = if all_contexts {
        scn.complex().simplices().cloned().collect()
    } else {
        scn.complex().maximal().to_vec()
    };
    let mut rows: Vec<(ScenarioKey, BigRational)> = Vec::new();
    let mut row_index: BTreeMap<ScenarioKey, usize> = BTreeMap::new();
    for sigma in &contexts {
        for t in scn.event_sections(sigma)? {
            let key = (sigma.clone(), t.clone());
            row_index.insert(key.clone(), rows.len());
            rows.push((key, e.dist(sigma)?.weight(&t).into_big()));
        }
    }
    let columns = sections
        .iter()
        .map(|s| {
            contexts
                .iter()
                .map(|sigma| {
                    let values: Vec<Outcome> =
                        sigma.vertices().iter().map(|v| s[v].clone()).collect();
                    let t = SectionOver::new(sigma.clone(), values)?;
                    Ok(row_index[&(sigma.clone(), t)])
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecisionTable { rows, columns })
}

/// Decides contextuality of a rational empirical model. The LP runs on
/// maximal contexts; faces are implied by marginalization.
pub fn decide_scenario(e: &EmpiricalModel<Rat>, cap: usize) -> Result<Certificate<ScenarioKey>> {
    e.validate()?;
    let sections = scenario_sections(e.scenario(), cap)?;
    decide_table(&scenario_table(e, &sections, false)?)
}

/// The all-contexts variant, used to cross-check the maximal-context LP.
pub fn decide_scenario_all_contexts(
    e: &EmpiricalModel<Rat>,
    cap: usize,
) -> Result<Certificate<ScenarioKey>> {
    e.validate()?;
    let sections = scenario_sections(e.scenario(), cap)?;
    decide_table(&scenario_table(e, &sections, true)?)
}

/// Boolean (possibilistic) decision for scenario models.
pub fn decide_scenario_boolean(
    e: &EmpiricalModel<bool>,
    cap: usize,
) -> Result<Certificate<ScenarioKey>> {
    e.validate()?;
    let scn = e.scenario();
    let sections = scenario_sections(scn, cap)?;
    let contexts: Vec<Simplex> = scn.complex().maximal().to_vec();
    let mut supported = BTreeSet::new();
    for sigma in &contexts {
        for t in e.dist(sigma)?.support() {
            supported.insert((sigma.clone(), t.clone()));
        }
    }
    let columns = sections
        .iter()
        .map(|s| {
            contexts
                .iter()
                .map(|sigma| {
                    let values: Vec<Outcome> =
                        sigma.vertices().iter().map(|v| s[v].clone()).collect();
                    Ok((sigma.clone(), SectionOver::new(sigma.clone(), values)?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(decide_support_table(&SupportTable { supported, columns }))
}

// ---------------------------------------------------------------------------
// Bundle flavor
// ---------------------------------------------------------------------------

pub type BundleKey = (Simplex, Simplex);

/// The deterministic bundle model `δ^s` of a section `s : Σ → Γ`.
pub fn deterministic_bundle_model<R: Semiring>(
    f: &BundleScenario,
    section: &ComplexMap,
) -> Result<BundleModel<R>> {
    let mut dists = BTreeMap::new();
    for sigma in f.base().simplices() {
        dists.insert(sigma.clone(), Dist::point(section.apply(sigma)));
    }
    BundleModel::new(f.clone(), dists)
}

/// Θ for bundle models.
pub fn theta_bundle<R: Semiring>(
    f: &BundleScenario,
    sections: &[ComplexMap],
    weights: &[(usize, R)],
) -> Result<BundleModel<R>> {
    let parts = weights
        .iter()
        .map(|(j, w)| {
            let s = sections
                .get(*j)
                .ok_or_else(|| Error::InvalidModel(format!("section index {j} out of range")))?;
            Ok((deterministic_bundle_model(f, s)?, w.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    BundleModel::mix(&parts)
}

fn bundle_table(
    p: &BundleModel<Rat>,
    sections: &[ComplexMap],
) -> Result<DecisionTable<BundleKey>> {
    let f = p.bundle();
    let contexts: Vec<Simplex> = f.base().maximal().to_vec();
    let mut rows: Vec<(BundleKey, BigRational)> = Vec::new();
    let mut row_index: BTreeMap<BundleKey, usize> = BTreeMap::new();
    for sigma in &contexts {
        for gamma in f.fiber(sigma)? {
            let key = (sigma.clone(), gamma.clone());
            row_index.insert(key.clone(), rows.len());
            rows.push((key, p.dist(sigma)?.weight(gamma).into_big()));
        }
    }
    let columns = sections
        .iter()
        .map(|s| {
            contexts
                .iter()
                .map(|sigma| Ok(row_index[&(sigma.clone(), s.apply(sigma))]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecisionTable { rows, columns })
}

pub fn decide_bundle(p: &BundleModel<Rat>, cap: usize) -> Result<Certificate<BundleKey>> {
    p.validate()?;
    let sections = p.bundle().sections(cap)?;
    decide_table(&bundle_table(p, &sections)?)
}

pub fn decide_bundle_boolean(
    p: &BundleModel<bool>,
    cap: usize,
) -> Result<Certificate<BundleKey>> {
    p.validate()?;
    let f = p.bundle();
    let sections = f.sections(cap)?;
    let contexts: Vec<Simplex> = f.base().maximal().to_vec();
    let mut supported = BTreeSet::new();
    for sigma in &contexts {
        for gamma in p.dist(sigma)?.support() {
            supported.insert((sigma.clone(), gamma.clone()));
        }
    }
    let columns = sections
        .iter()
        .map(|s| {
            contexts
                .iter()
                .map(|sigma| (sigma.clone(), s.apply(sigma)))
                .collect()
        })
        .collect();
    Ok(decide_support_table(&SupportTable { supported, columns }))
}

// ---------------------------------------------------------------------------
// Simplicial flavor (nerves of bundle scenarios)
// ---------------------------------------------------------------------------

pub type SimplicialKey = (usize, SsElem, SsElem);

/// Sections of the nerve scenario at the bound: exactly the nerves of the
/// bundle sections (each is verified to be a section of `Nf`).
pub fn nerve_sections(
    f: &BundleScenario,
    dim: usize,
    cap: usize,
) -> Result<Vec<SSetMap>> {
    let nf = nerve_smap(f.map(), dim, cap)?;
    let mut out = Vec::new();
    for s in f.sections(cap)? {
        let ns = nerve_smap(&s, dim, cap)?;
        if ns.then(&nf)? != SSetMap::identity(nf.target()) {
            return Err(Error::InvalidSDist(
                "internal: nerve of a bundle section is not a section".into(),
            ));
        }
        out.push(ns);
    }
    Ok(out)
}

/// Θ for simplicial distributions on a nerve scenario.
pub fn theta_sdist<R: Semiring>(
    f: &BundleScenario,
    dim: usize,
    sections: &[SSetMap],
    weights: &[(usize, R)],
    cap: usize,
) -> Result<SimplicialDistribution<R>> {
    let nf = nerve_smap(f.map(), dim, cap)?;
    let parts = weights
        .iter()
        .map(|(j, w)| {
            let s = sections
                .get(*j)
                .ok_or_else(|| Error::InvalidModel(format!("section index {j} out of range")))?;
            Ok((SimplicialDistribution::deterministic(&nf, s)?, w.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    SimplicialDistribution::mix(&parts)
}

fn sdist_table(
    sd: &SimplicialDistribution<Rat>,
    sections: &[SSetMap],
    max_level: usize,
) -> Result<DecisionTable<SimplicialKey>> {
    let x_set = sd.map().target();
    let e_set = sd.map().source();
    let mut rows: Vec<(SimplicialKey, BigRational)> = Vec::new();
    let mut row_index: BTreeMap<SimplicialKey, usize> = BTreeMap::new();
    for n in 0..=max_level.min(x_set.dim()) {
        let mut by_image: BTreeMap<SsElem, Vec<&SsElem>> = BTreeMap::new();
        for e in e_set.level(n) {
            by_image.entry(sd.map().apply(n, e)?).or_default().push(e);
        }
        for x in x_set.level(n) {
            let d = sd.dist(n, x)?;
            for e in by_image.get(x).map(Vec::as_slice).unwrap_or(&[]) {
                let key = (n, x.clone(), (*e).clone());
                row_index.insert(key.clone(), rows.len());
                rows.push((key, d.weight(e).into_big()));
            }
        }
    }
    let columns = sections
        .iter()
        .map(|s| {
            let mut hits = Vec::new();
            for n in 0..=max_level.min(x_set.dim()) {
                for x in x_set.level(n) {
                    let key = (n, x.clone(), s.apply(n, x)?);
                    hits.push(row_index[&key]);
                }
            }
            Ok(hits)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecisionTable { rows, columns })
}

/// Decides contextuality of a simplicial distribution on the nerve of a
/// bundle scenario.
///
/// Distributions on nerves are determined at level one, so the LP runs on
/// the level ≤ 1 rows first; a feasible mixture is then verified against
/// all levels (falling back to the full-row LP if that verification ever
/// failed, which the level-one determination rules out for nerves).
pub fn decide_sdist_nerve(
    f: &BundleScenario,
    sd: &SimplicialDistribution<Rat>,
    dim: usize,
    cap: usize,
) -> Result<Certificate<SimplicialKey>> {
    sd.validate()?;
    let sections = nerve_sections(f, dim, cap)?;
    let table = sdist_table(sd, &sections, 1)?;
    match decide_table(&table)? {
        Certificate::Mixture { weights } => {
            let mixed = theta_sdist(f, dim, &sections, &weights, cap)?;
            if &mixed == sd {
                Ok(Certificate::Mixture { weights })
            } else {
                // Not determined by level one: decide on all levels.
                decide_table(&sdist_table(sd, &sections, sd.map().target().dim())?)
            }
        }
        contextual => Ok(contextual),
    }
}

/// Boolean decision for simplicial distributions on nerves.
pub fn decide_sdist_nerve_boolean(
    f: &BundleScenario,
    sd: &SimplicialDistribution<bool>,
    dim: usize,
    cap: usize,
) -> Result<Certificate<SimplicialKey>> {
    sd.validate()?;
    let sections = nerve_sections(f, dim, cap)?;
    let x_set = sd.map().target();
    let mut supported = BTreeSet::new();
    for n in 0..=x_set.dim() {
        for x in x_set.level(n) {
            for e in sd.dist(n, x)?.support() {
                supported.insert((n, x.clone(), e.clone()));
            }
        }
    }
    let columns = sections
        .iter()
        .map(|s| {
            let mut pairs = Vec::new();
            for n in 0..=x_set.dim() {
                for x in x_set.level(n) {
                    pairs.push((n, x.clone(), s.apply(n, x)?));
                }
            }
            Ok(pairs)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(decide_support_table(&SupportTable { supported, columns }))
}

// ---------------------------------------------------------------------------
// Certificate verification helpers
// ---------------------------------------------------------------------------

/// Re-mixes a noncontextual scenario certificate and compares exactly.
pub fn verify_scenario_mixture(
    e: &EmpiricalModel<Rat>,
    weights: &[(usize, Rat)],
    cap: usize,
) -> Result<bool> {
    let sections = scenario_sections(e.scenario(), cap)?;
    Ok(&theta_scenario(e.scenario(), &sections, weights)? == e)
}

/// Evaluates a separating functional independently: value on the model and
/// maximum over deterministic columns.
pub fn verify_scenario_separation(
    e: &EmpiricalModel<Rat>,
    coefficients: &[(ScenarioKey, BigRational)],
    cap: usize,
) -> Result<bool> {
    let scn = e.scenario();
    let coeff: BTreeMap<&ScenarioKey, &BigRational> =
        coefficients.iter().map(|(k, v)| (k, v)).collect();
    let value: BigRational = coefficients
        .iter()
        .map(|((sigma, t), c)| c * e.dist(sigma).map(|d| d.weight(t).into_big()).unwrap_or_else(|_| BigRational::zero()))
        .sum();
    let mut best: Option<BigRational> = None;
    for s in scenario_sections(scn, cap)? {
        let mut total = BigRational::zero();
        for ((sigma, t), c) in &coeff {
            let values: Vec<Outcome> = sigma.vertices().iter().map(|v| s[v].clone()).collect();
            let restricted = SectionOver::new(sigma.clone(), values)?;
            if restricted == *t {
                total += *c;
            }
        }
        best = Some(match best {
            None => total,
            Some(b) => b.max(total),
        });
    }
    let threshold = best.ok_or_else(|| Error::InvalidModel("no sections".into()))?;
    Ok(value > threshold)
}

/// The canonical bundle sections in the order induced by scenario sections:
/// useful to transport weight vectors across flavors. For the canonical
/// bundle of a scenario, bundle sections correspond to global assignments.
pub fn match_section_orders(
    scn: &Scenario,
    sections: &[BTreeMap<Vertex, Outcome>],
    bundle_sections: &[ComplexMap],
) -> Result<Vec<usize>> {
    // For each scenario section, find the bundle section whose vertex images
    // are the matching outcome points.
    let mut mapping = Vec::with_capacity(sections.len());
    for s in sections {
        let mut found = None;
        for (j, bs) in bundle_sections.iter().enumerate() {
            let agrees = scn.complex().vertices().iter().all(|x| {
                let image = bs.apply_vertex(x);
                image == Vertex::point(x, &s[x])
            });
            if agrees {
                found = Some(j);
                break;
            }
        }
        mapping.push(found.ok_or_else(|| {
            Error::InvalidModel("bundle section list misses a scenario section".into())
        })?);
    }
    Ok(mapping)
}

/// Decodes a canonical-bundle fiber simplex into the section it represents,
/// for rendering bundle certificates in scenario terms.
pub fn bundle_key_section(gamma: &Simplex) -> Result<SectionOver> {
    crate::bundle::simplex_section(gamma)
}

/// Re-mix verification for bundle certificates.
pub fn verify_bundle_mixture(
    p: &BundleModel<Rat>,
    weights: &[(usize, Rat)],
    cap: usize,
) -> Result<bool> {
    let sections = p.bundle().sections(cap)?;
    Ok(&theta_bundle(p.bundle(), &sections, weights)? == p)
}

/// Re-mix verification for simplicial certificates on nerves.
pub fn verify_sdist_mixture(
    f: &BundleScenario,
    sd: &SimplicialDistribution<Rat>,
    weights: &[(usize, Rat)],
    dim: usize,
    cap: usize,
) -> Result<bool> {
    let sections = nerve_sections(f, dim, cap)?;
    Ok(&theta_sdist(f, dim, &sections, weights, cap)? == sd)
}
