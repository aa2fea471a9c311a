//! Sheaf-style scenarios `(Σ, O)`: the event presheaf, scenario morphisms
//! `(π, α)`, empirical models with the non-signaling check, and push-forward.
//!
//! The outcome part `α` of a morphism is stored vertexwise and assembled to
//! arbitrary contexts on demand, which makes naturality hold by
//! construction.

use std::collections::BTreeMap;

use crate::complex::{Complex, Outcome, Simplex, Vertex};
use crate::dist::{convex_mix, Dist, DistFamily};
use crate::error::{Error, Result};
use crate::nerve::SimplicialRelation;
use crate::semiring::Semiring;

/// A scenario: a complex of measurement contexts plus a nonempty finite
/// outcome set per measurement.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Scenario {
    complex: Complex,
    outcomes: BTreeMap<Vertex, Vec<Outcome>>,
}

impl Scenario {
    pub fn new(complex: Complex, outcomes: BTreeMap<Vertex, Vec<Outcome>>) -> Result<Self> {
        let mut normalized = BTreeMap::new();
        for v in complex.vertices() {
            let Some(os) = outcomes.get(v) else {
                return Err(Error::InvalidScenario(format!("vertex {v} has no outcome set")));
            };
            if os.is_empty() {
                return Err(Error::InvalidScenario(format!("empty outcome set at {v}")));
            }
            let mut os = os.clone();
            os.sort();
            os.dedup();
            normalized.insert(v.clone(), os);
        }
        if outcomes.len() != complex.vertices().len() {
            return Err(Error::InvalidScenario(
                "outcome table mentions unknown vertices".into(),
            ));
        }
        Ok(Scenario {
            complex,
            outcomes: normalized,
        })
    }

    /// Same outcome set at every vertex.
    pub fn uniform_outcomes(complex: Complex, outcomes: &[Outcome]) -> Result<Self> {
        let table = complex
            .vertices()
            .iter()
            .map(|v| (v.clone(), outcomes.to_vec()))
            .collect();
        Scenario::new(complex, table)
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn outcomes_at(&self, v: &Vertex) -> &[Outcome] {
        &self.outcomes[v]
    }

    pub fn outcomes(&self) -> &BTreeMap<Vertex, Vec<Outcome>> {
        &self.outcomes
    }

    /// The event set `𝓔_O(σ) = ∏_{x ∈ σ} O_x`, in lexicographic order.
    pub fn event_sections(&self, context: &Simplex) -> Result<Vec<SectionOver>> {
        if !self.complex.contains(context) {
            return Err(Error::InvalidSimplex(format!("{context} is not a context")));
        }
        let mut out = vec![Vec::new()];
        for v in context.vertices() {
            let mut next = Vec::with_capacity(out.len() * self.outcomes[v].len());
            for prefix in &out {
                for o in &self.outcomes[v] {
                    let mut row: Vec<Outcome> = prefix.clone();
                    row.push(o.clone());
                    next.push(row);
                }
            }
            out = next;
        }
        Ok(out
            .into_iter()
            .map(|values| SectionOver {
                context: context.clone(),
                values,
            })
            .collect())
    }

    /// Number of global assignments `|𝓔_O(Σ₀)|`, saturating at `usize::MAX`.
    pub fn global_section_count(&self) -> usize {
        let mut count: usize = 1;
        for os in self.outcomes.values() {
            count = count.saturating_mul(os.len());
        }
        count
    }
}

/// An outcome assignment over a context: the element `s ∈ 𝓔_O(σ)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SectionOver {
    context: Simplex,
    /// Aligned with the sorted vertices of `context`.
    values: Vec<Outcome>,
}

impl SectionOver {
    pub fn new(context: Simplex, values: Vec<Outcome>) -> Result<Self> {
        if values.len() != context.len() {
            return Err(Error::InvalidScenario(format!(
                "section over {context} needs {} values, got {}",
                context.len(),
                values.len()
            )));
        }
        Ok(SectionOver { context, values })
    }

    pub fn context(&self) -> &Simplex {
        &self.context
    }

    pub fn values(&self) -> &[Outcome] {
        &self.values
    }

    pub fn value_at(&self, v: &Vertex) -> Result<&Outcome> {
        let idx = self
            .context
            .vertices()
            .binary_search(v)
            .map_err(|_| Error::InvalidScenario(format!("{v} is outside the context")))?;
        Ok(&self.values[idx])
    }

    /// The restriction `s|_{σ′}` to a face of the context.
    pub fn restrict(&self, sub: &Simplex) -> Result<SectionOver> {
        if !sub.is_subset(&self.context) {
            return Err(Error::InvalidSimplex(format!(
                "{sub} is not a face of {}",
                self.context
            )));
        }
        let values = sub
            .vertices()
            .iter()
            .map(|v| self.value_at(v).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(SectionOver {
            context: sub.clone(),
            values,
        })
    }
}

impl std::fmt::Display for SectionOver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .context
            .vertices()
            .iter()
            .zip(&self.values)
            .map(|(v, o)| format!("{}={}", v.label(), o))
            .collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// An empirical model: one distribution per context, compatible under
/// restriction (the non-signaling condition).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EmpiricalModel<R: Semiring> {
    scenario: Scenario,
    dists: BTreeMap<Simplex, Dist<SectionOver, R>>,
}

impl<R: Semiring> EmpiricalModel<R> {
    /// Builds from a full context table and validates compatibility.
    pub fn new(scenario: Scenario, dists: BTreeMap<Simplex, Dist<SectionOver, R>>) -> Result<Self> {
        let model = EmpiricalModel { scenario, dists };
        model.validate()?;
        Ok(model)
    }

    /// Builds from distributions on the maximal contexts only, extending to
    /// faces by marginalization. Disagreement between overlapping maximal
    /// contexts is rejected by the final validation.
    pub fn from_maximal(
        scenario: Scenario,
        maximal: BTreeMap<Simplex, Dist<SectionOver, R>>,
    ) -> Result<Self> {
        for m in scenario.complex().maximal() {
            if !maximal.contains_key(m) {
                return Err(Error::InvalidModel(format!("missing distribution on {m}")));
            }
        }
        let mut dists = BTreeMap::new();
        for sigma in scenario.complex().simplices() {
            let host = scenario
                .complex()
                .maximal()
                .iter()
                .find(|m| sigma.is_subset(m))
                .expect("every simplex sits in a maximal one");
            let d = maximal[host].try_push(|s| s.restrict(sigma))?;
            dists.insert(sigma.clone(), d);
        }
        EmpiricalModel::new(scenario, dists)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn dist(&self, context: &Simplex) -> Result<&Dist<SectionOver, R>> {
        self.dists
            .get(context)
            .ok_or_else(|| Error::InvalidModel(format!("no distribution on {context}")))
    }

    pub fn dists(&self) -> &BTreeMap<Simplex, Dist<SectionOver, R>> {
        &self.dists
    }

    /// The compatibility (non-signaling) check; reports the first violating
    /// face pair.
    pub fn validate(&self) -> Result<()> {
        for sigma in self.scenario.complex().simplices() {
            let Some(d) = self.dists.get(sigma) else {
                return Err(Error::InvalidModel(format!("no distribution on {sigma}")));
            };
            for s in d.support() {
                if s.context() != sigma {
                    return Err(Error::InvalidModel(format!(
                        "distribution on {sigma} weights a section over {}",
                        s.context()
                    )));
                }
                for (v, o) in sigma.vertices().iter().zip(s.values()) {
                    if !self.scenario.outcomes_at(v).contains(o) {
                        return Err(Error::InvalidModel(format!(
                            "section {s} uses an outcome outside O_{v}"
                        )));
                    }
                }
            }
        }
        for sigma in self.scenario.complex().simplices() {
            for sub in self
                .scenario
                .complex()
                .simplices()
                .filter(|t| t.is_subset(sigma) && *t != sigma)
            {
                let marginal = self.dists[sigma].try_push(|s| s.restrict(sub))?;
                if marginal != self.dists[sub] {
                    return Err(Error::InvalidModel(format!(
                        "incompatible pair ({sub}, {sigma}): marginal differs"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Reduced compatibility check: only pairs `(σ′, σ)` where `σ′` is a
    /// codimension-1 face. Equivalent to the full check because restriction
    /// composes transitively.
    pub fn validate_codim1(&self) -> Result<()> {
        for sigma in self.scenario.complex().simplices().filter(|s| s.len() >= 2) {
            let d = self
                .dists
                .get(sigma)
                .ok_or_else(|| Error::InvalidModel(format!("no distribution on {sigma}")))?;
            for drop_i in 0..sigma.len() {
                let face: Vec<Vertex> = sigma
                    .vertices()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != drop_i)
                    .map(|(_, v)| v.clone())
                    .collect();
                let face = Simplex::new(face)?;
                let marginal = d.try_push(|s| s.restrict(&face))?;
                if Some(&marginal) != self.dists.get(&face) {
                    return Err(Error::InvalidModel(format!(
                        "incompatible pair ({face}, {sigma}): marginal differs"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Convex mixture of models on one scenario.
    pub fn mix(parts: &[(EmpiricalModel<R>, R)]) -> Result<EmpiricalModel<R>> {
        let Some((first, _)) = parts.first() else {
            return Err(Error::MixtureShape("empty model mixture".into()));
        };
        let scenario = first.scenario.clone();
        if parts.iter().any(|(m, _)| m.scenario != scenario) {
            return Err(Error::MixtureShape("models live on different scenarios".into()));
        }
        let families: Vec<(DistFamily<Simplex, SectionOver, R>, R)> = parts
            .iter()
            .map(|(m, w)| (m.dists.clone(), w.clone()))
            .collect();
        EmpiricalModel::new(scenario, convex_mix(&families)?)
    }
}

/// A morphism `(π, α) : (Σ, O) → (Σ′, O′)`: a simplicial relation
/// `π : Σ′ → Σ` together with vertexwise outcome maps
/// `α_{x′} : 𝓔_O(π(x′)) → O′_{x′}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScenarioMorphism {
    source: Scenario,
    target: Scenario,
    relation: SimplicialRelation,
    alpha: BTreeMap<Vertex, BTreeMap<SectionOver, Outcome>>,
}

impl ScenarioMorphism {
    pub fn new(
        source: Scenario,
        target: Scenario,
        relation: SimplicialRelation,
        alpha: BTreeMap<Vertex, BTreeMap<SectionOver, Outcome>>,
    ) -> Result<Self> {
        if relation.source() != target.complex() || relation.target() != source.complex() {
            return Err(Error::InvalidMorphism(
                "relation does not run from the target complex to the source complex".into(),
            ));
        }
        for x in target.complex().vertices() {
            let Some(table) = alpha.get(x) else {
                return Err(Error::InvalidMorphism(format!("no outcome map at {x}")));
            };
            let domain = source.event_sections(relation.vertex_value(x))?;
            if table.len() != domain.len() {
                return Err(Error::InvalidMorphism(format!(
                    "outcome map at {x} covers {} of {} sections",
                    table.len(),
                    domain.len()
                )));
            }
            for s in &domain {
                let Some(o) = table.get(s) else {
                    return Err(Error::InvalidMorphism(format!(
                        "outcome map at {x} misses section {s}"
                    )));
                };
                if !target.outcomes_at(x).contains(o) {
                    return Err(Error::InvalidMorphism(format!(
                        "outcome {o} at {x} is outside O′"
                    )));
                }
            }
        }
        Ok(ScenarioMorphism {
            source,
            target,
            relation,
            alpha,
        })
    }

    pub fn identity(scn: &Scenario) -> Result<Self> {
        let relation = SimplicialRelation::delta(scn.complex());
        let mut alpha = BTreeMap::new();
        for x in scn.complex().vertices() {
            let singleton = Simplex::singleton(x.clone());
            let mut table = BTreeMap::new();
            for s in scn.event_sections(&singleton)? {
                let o = s.values()[0].clone();
                table.insert(s, o);
            }
            alpha.insert(x.clone(), table);
        }
        ScenarioMorphism::new(scn.clone(), scn.clone(), relation, alpha)
    }

    pub fn source(&self) -> &Scenario {
        &self.source
    }

    pub fn target(&self) -> &Scenario {
        &self.target
    }

    pub fn relation(&self) -> &SimplicialRelation {
        &self.relation
    }

    pub fn alpha(&self) -> &BTreeMap<Vertex, BTreeMap<SectionOver, Outcome>> {
        &self.alpha
    }

    /// The assembled component `α_{σ′} : 𝓔_O(π̄(σ′)) → 𝓔_{O′}(σ′)`:
    /// `α_{σ′}(s)(x′) = α_{x′}(s|_{π(x′)})`.
    pub fn alpha_assembled(&self, context: &Simplex, s: &SectionOver) -> Result<SectionOver> {
        let values = context
            .vertices()
            .iter()
            .map(|x| {
                let restricted = s.restrict(self.relation.vertex_value(x))?;
                self.alpha[x]
                    .get(&restricted)
                    .cloned()
                    .ok_or_else(|| Error::InvalidMorphism(format!("α at {x} misses {restricted}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SectionOver::new(context.clone(), values)
    }

    /// Composition `other ∘ self` (apply `self` first).
    pub fn then(&self, other: &ScenarioMorphism) -> Result<ScenarioMorphism> {
        if self.target != other.source {
            return Err(Error::InvalidMorphism("composition mismatch".into()));
        }
        let relation = self.relation.kleisli(other.relation())?;
        let mut alpha = BTreeMap::new();
        for x in other.target.complex().vertices() {
            let mid_context = other.relation().vertex_value(x);
            let mut table = BTreeMap::new();
            for s in self.source.event_sections(relation.vertex_value(x))? {
                let mid = self.alpha_assembled(mid_context, &s)?;
                let out = other.alpha[x]
                    .get(&mid)
                    .cloned()
                    .ok_or_else(|| Error::InvalidMorphism(format!("α at {x} misses {mid}")))?;
                table.insert(s, out);
            }
            alpha.insert(x.clone(), table);
        }
        ScenarioMorphism::new(self.source.clone(), other.target.clone(), relation, alpha)
    }

    /// The push-forward `((π, α)_* e)_{σ′} = D_R(α_{σ′})(e_{π̄(σ′)})`.
    pub fn push_forward<R: Semiring>(&self, e: &EmpiricalModel<R>) -> Result<EmpiricalModel<R>> {
        if e.scenario() != &self.source {
            return Err(Error::InvalidModel("model lives on a different scenario".into()));
        }
        let mut dists = BTreeMap::new();
        for sigma in self.target.complex().simplices() {
            let pulled = self.relation.apply(sigma);
            let d = e.dist(&pulled)?.try_push(|s| self.alpha_assembled(sigma, s))?;
            dists.insert(sigma.clone(), d);
        }
        EmpiricalModel::new(self.target.clone(), dists)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use crate::semiring::Rat;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n, d).unwrap()
    }

    fn z2() -> Vec<Outcome> {
        vec![Outcome::new("0"), Outcome::new("1")]
    }

    #[test]
    fn event_sections_enumerate_products() {
        let scn = sample::triangle_z2();
        let x0 = Vertex::atom("x0");
        let single = Simplex::singleton(x0.clone());
        let sections = scn.event_sections(&single).unwrap();
        assert_eq!(sections.len(), 2);
        assert_eq!(sections[0].values()[0].as_str(), "0");
        assert_eq!(sections[1].values()[0].as_str(), "1");

        let edge = Simplex::new([x0, Vertex::atom("x1")]).unwrap();
        let sections = scn.event_sections(&edge).unwrap();
        let shown: Vec<String> = sections
            .iter()
            .map(|s| s.values().iter().map(|o| o.as_str()).collect::<String>())
            .collect();
        assert_eq!(shown, vec!["00", "01", "10", "11"]);

        // Restriction of (0,1) on {x0,x1} to {x1} is 1.
        let s = &sections[1];
        let r = s.restrict(&Simplex::singleton(Vertex::atom("x1"))).unwrap();
        assert_eq!(r.values()[0].as_str(), "1");
        drop(z2());
    }

    #[test]
    fn deterministic_models_are_accepted_and_violations_rejected() {
        let scn = sample::triangle_z2();
        // Global assignment x0=0, x1=1, x2=0 restricted to every context.
        let global: BTreeMap<Vertex, Outcome> = BTreeMap::from([
            (Vertex::atom("x0"), Outcome::new("0")),
            (Vertex::atom("x1"), Outcome::new("1")),
            (Vertex::atom("x2"), Outcome::new("0")),
        ]);
        let mut dists = BTreeMap::new();
        for sigma in scn.complex().simplices() {
            let values: Vec<Outcome> = sigma.vertices().iter().map(|v| global[v].clone()).collect();
            let s = SectionOver::new(sigma.clone(), values).unwrap();
            dists.insert(sigma.clone(), Dist::<_, Rat>::point(s));
        }
        let model = EmpiricalModel::new(scn.clone(), dists).unwrap();
        model.validate().unwrap();

        // Corrupt one vertex marginal.
        let mut bad = model.dists().clone();
        let x0 = Simplex::singleton(Vertex::atom("x0"));
        let flipped = SectionOver::new(x0.clone(), vec![Outcome::new("1")]).unwrap();
        bad.insert(x0.clone(), Dist::point(flipped));
        let err = EmpiricalModel::new(scn, bad).unwrap_err();
        assert!(err.to_string().contains("incompatible pair"));
    }

    #[test]
    fn pr_box_is_non_signaling() {
        let pr = sample::pr_box();
        pr.validate().unwrap();
        // All vertex marginals are uniform.
        for v in pr.scenario().complex().vertices() {
            let d = pr.dist(&Simplex::singleton(v.clone())).unwrap();
            assert_eq!(d.support_len(), 2);
            for (_s, w) in d.iter() {
                assert_eq!(*w, rat(1, 2));
            }
        }
    }

    #[test]
    fn push_forward_matches_the_diagonal_formula() {
        // Push a model on (△, Z₂) along the □ → △ morphism; on the context
        // {x2, x3} the result is e_{x2} on the diagonal and 0 off it.
        let m = sample::triangle_to_square_morphism().unwrap();
        let e = sample::uniform_model(m.source()).unwrap();
        let pushed = m.push_forward(&e).unwrap();

        let x2 = Vertex::atom("x2");
        let x3 = Vertex::atom("x3");
        let ctx = Simplex::new([x2.clone(), x3.clone()]).unwrap();
        let d = pushed.dist(&ctx).unwrap();
        for s in pushed.scenario().event_sections(&ctx).unwrap() {
            let a = s.value_at(&x2).unwrap().clone();
            let b = s.value_at(&x3).unwrap().clone();
            let expected = if a == b { rat(1, 2) } else { Rat::zero() };
            assert_eq!(d.weight(&s), expected, "at section {s}");
        }

        // The other three contexts restrict along π.
        let ctx01 = Simplex::new([Vertex::atom("x0"), Vertex::atom("x1")]).unwrap();
        assert_eq!(pushed.dist(&ctx01).unwrap().support_len(), 4);
    }

    #[test]
    fn morphism_laws_identity_and_associativity() {
        let m = sample::triangle_to_square_morphism().unwrap();
        let id_src = ScenarioMorphism::identity(m.source()).unwrap();
        let id_tgt = ScenarioMorphism::identity(m.target()).unwrap();
        assert_eq!(id_src.then(&m).unwrap(), m);
        assert_eq!(m.then(&id_tgt).unwrap(), m);

        // Associativity on a random-ish composable triple.
        let mut rng = crate::rng::Rng::new(11);
        let a = m.clone();
        let b = sample::random_endomorphism(m.target(), &mut rng).unwrap();
        let c = sample::random_endomorphism(m.target(), &mut rng).unwrap();
        let left = a.then(&b).unwrap().then(&c).unwrap();
        let right = a.then(&b.then(&c).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn push_forward_is_functorial_and_affine() {
        let mut rng = crate::rng::Rng::new(23);
        let m1 = sample::triangle_to_square_morphism().unwrap();
        let m2 = sample::random_endomorphism(m1.target(), &mut rng).unwrap();
        for _ in 0..5 {
            let e = sample::random_model(m1.source(), &mut rng).unwrap();
            let via_composite = m1.then(&m2).unwrap().push_forward(&e).unwrap();
            let via_steps = m2.push_forward(&m1.push_forward(&e).unwrap()).unwrap();
            assert_eq!(via_composite, via_steps);

            // Affinity: pushing a mixture = mixing the pushes.
            let f = sample::random_model(m1.source(), &mut rng).unwrap();
            let w = rat(1, 3);
            let cw = rat(2, 3);
            let mixed = EmpiricalModel::mix(&[(e.clone(), w.clone()), (f.clone(), cw.clone())]).unwrap();
            let lhs = m1.push_forward(&mixed).unwrap();
            let rhs = EmpiricalModel::mix(&[
                (m1.push_forward(&e).unwrap(), w),
                (m1.push_forward(&f).unwrap(), cw),
            ])
            .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn codim1_check_is_equivalent_to_full_check() {
        // The reduced codimension-1 check and the all-pairs check agree on
        // random models and on randomly corrupted variants of them.
        let mut rng = crate::rng::Rng::new(5);
        let mut corrupted_seen = 0;
        for round in 0..25 {
            let scn = sample::random_scenario(&mut rng, 5, 3).unwrap();
            let model = sample::random_model(&scn, &mut rng).unwrap();
            assert!(model.validate_codim1().is_ok());

            if round % 2 == 0 {
                // Swap one context's distribution for a point mass on its
                // first section and compare verdicts of both checks.
                let contexts: Vec<Simplex> = scn.complex().simplices().cloned().collect();
                let victim = rng.pick(&contexts).clone();
                let first = scn.event_sections(&victim).unwrap().remove(0);
                let mut dists = model.dists().clone();
                dists.insert(victim, Dist::point(first));
                let corrupted = EmpiricalModel {
                    scenario: scn.clone(),
                    dists,
                };
                let full = corrupted.validate().is_ok();
                let reduced = corrupted.validate_codim1().is_ok();
                assert_eq!(full, reduced);
                if !full {
                    corrupted_seen += 1;
                }
            }
        }
        assert!(corrupted_seen > 0, "corruption never produced a violation");
    }
}
