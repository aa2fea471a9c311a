//! Bundle scenarios of simplicial complexes: canonical outcome bundles,
//! pull-backs along simplicial relations, bundle morphisms with their
//! composition, empirical models on bundles, push-forwards, and the
//! embedding of sheaf scenarios together with the natural isomorphism η.
//!
//! A morphism `f → f′` is a relation `π` on the bases plus a complex map
//! `α : π*(ˆNΓ) → Γ′` over the new base. The pull-back is always the
//! canonical one and is cached on the morphism; it is built directly from
//! fibers, so the (much larger) nerve complexes never have to be
//! materialized outside the tests that check the pull-back squares.

use std::collections::BTreeMap;

use crate::complex::{Complex, ComplexMap, Outcome, Simplex, Vertex, DEFAULT_SIMPLEX_CAP};
use crate::dist::{convex_mix, Dist, DistFamily};
use crate::error::{Error, Result};
use crate::nerve::{hat_n, hat_n_map, SimplicialRelation};
use crate::scenario::{EmpiricalModel, Scenario, SectionOver, ScenarioMorphism};
use crate::semiring::Semiring;

/// A surjective, locally surjective, vertex-discrete complex map with
/// precomputed fibers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BundleScenario {
    map: ComplexMap,
    fibers: BTreeMap<Simplex, Vec<Simplex>>,
}

impl BundleScenario {
    pub fn new(map: ComplexMap) -> Result<Self> {
        let flags = map.classify();
        if !flags.bundle_scenario() {
            return Err(Error::NotBundle(format!(
                "surjective={}, locally_surjective={}, discrete={}",
                flags.surjective, flags.locally_surjective, flags.discrete_over_vertices
            )));
        }
        let fibers = map.fibers();
        Ok(BundleScenario { map, fibers })
    }

    pub fn map(&self) -> &ComplexMap {
        &self.map
    }

    pub fn total(&self) -> &Complex {
        self.map.source()
    }

    pub fn base(&self) -> &Complex {
        self.map.target()
    }

    pub fn fiber(&self, sigma: &Simplex) -> Result<&[Simplex]> {
        self.fibers
            .get(sigma)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidSimplex(format!("{sigma} has no fiber")))
    }

    /// The restriction map `r_{σ,σ′} : f⁻¹(σ) → f⁻¹(σ′)` applied to one
    /// fiber simplex: the unique face of `gamma` over `sub`.
    pub fn restrict_fiber(&self, gamma: &Simplex, sub: &Simplex) -> Result<Simplex> {
        self.map.restrict_simplex(gamma, sub)
    }

    /// All identity-section candidates: complex maps `s : Σ → Γ` with
    /// `f ∘ s = id`, found by choosing a fiber vertex per base vertex and
    /// keeping the simplicial ones. Canonically ordered; capped.
    pub fn sections(&self, cap: usize) -> Result<Vec<ComplexMap>> {
        let base = self.base().clone();
        let vertex_choices: Vec<(Vertex, Vec<Vertex>)> = base
            .vertices()
            .iter()
            .map(|x| {
                let fiber = self.fibers[&Simplex::singleton(x.clone())]
                    .iter()
                    .map(|s| s.vertices()[0].clone())
                    .collect();
                (x.clone(), fiber)
            })
            .collect();
        let mut out = Vec::new();
        let mut chosen: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        self.section_search(&vertex_choices, 0, &mut chosen, &mut out, cap)?;
        Ok(out)
    }

    fn section_search(
        &self,
        choices: &[(Vertex, Vec<Vertex>)],
        depth: usize,
        chosen: &mut BTreeMap<Vertex, Vertex>,
        out: &mut Vec<ComplexMap>,
        cap: usize,
    ) -> Result<()> {
        if out.len() > cap {
            return Err(Error::CapExceeded(format!("more than {cap} sections")));
        }
        if depth == choices.len() {
            let map = ComplexMap::new(self.base().clone(), self.total().clone(), chosen.clone())?;
            out.push(map);
            return Ok(());
        }
        let (x, fiber) = &choices[depth];
        'candidates: for v in fiber {
            chosen.insert(x.clone(), v.clone());
            // Prune: every maximal context fully assigned so far must map to
            // a simplex.
            for m in self.base().maximal() {
                if m.contains(x) && m.vertices().iter().all(|y| chosen.contains_key(y)) {
                    let image = Simplex::new(m.vertices().iter().map(|y| chosen[y].clone()))?;
                    if !self.total().contains(&image) {
                        chosen.remove(x);
                        continue 'candidates;
                    }
                }
            }
            self.section_search(choices, depth + 1, chosen, out, cap)?;
            chosen.remove(x);
        }
        Ok(())
    }
}

/// Encodes the simplex `ν ⊆ Γ` over base vertex `y` as the pull-back vertex
/// `(ν, y)` of `π*(ˆNΓ)`.
pub fn pullback_vertex(nu: &Simplex, y: &Vertex) -> Vertex {
    Vertex::pair(&Vertex::from_simplex(nu), y)
}

/// Decodes a pull-back vertex into its `Γ`-simplex and base-vertex parts.
pub fn split_pullback_vertex(v: &Vertex) -> Result<(Simplex, Vertex)> {
    let (first, second) = v
        .as_pair()
        .ok_or_else(|| Error::InvalidComplex(format!("{v} is not a pull-back vertex")))?;
    let nu = first
        .as_set()
        .ok_or_else(|| Error::InvalidComplex(format!("{v} has no simplex component")))?;
    Ok((nu, second))
}

/// The canonical pull-back `π*(ˆNΓ) → Σ′` of the nerve of a bundle along a
/// relation, built fiberwise without materializing the nerves.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RelationPullback {
    bundle: BundleScenario,
}

impl RelationPullback {
    pub fn new(f: &BundleScenario, pi: &SimplicialRelation, cap: usize) -> Result<Self> {
        if pi.target() != f.base() {
            return Err(Error::InvalidMorphism(
                "relation does not land in the bundle base".into(),
            ));
        }
        let mut vertices: Vec<Vertex> = Vec::new();
        let mut tops: Vec<Simplex> = Vec::new();
        for sigma in pi.source().simplices() {
            let pulled = pi.apply(sigma);
            for gamma in f.fiber(&pulled)? {
                let members = sigma
                    .vertices()
                    .iter()
                    .map(|y| {
                        let part = f.restrict_fiber(gamma, pi.vertex_value(y))?;
                        Ok(pullback_vertex(&part, y))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if sigma.len() == 1 {
                    vertices.extend(members.iter().cloned());
                }
                tops.push(Simplex::new(members)?);
            }
        }
        let complex = Complex::close_downward(vertices, &tops, cap)?;
        let map = complex
            .vertices()
            .iter()
            .map(|v| {
                let (_, y) = split_pullback_vertex(v)?;
                Ok((v.clone(), y))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        let map = ComplexMap::new(complex, pi.source().clone(), map)?;
        Ok(RelationPullback {
            bundle: BundleScenario::new(map)?,
        })
    }

    /// The pulled-back bundle `f^π`.
    pub fn bundle(&self) -> &BundleScenario {
        &self.bundle
    }

    /// `l̄` on simplices: union of the `Γ`-components.
    pub fn l_bar(&self, s: &Simplex) -> Result<Simplex> {
        let parts = s
            .vertices()
            .iter()
            .map(|v| split_pullback_vertex(v).map(|(nu, _)| nu))
            .collect::<Result<Vec<_>>>()?;
        Simplex::union_all(parts.iter())
    }

    /// The projection `l : π*(ˆNΓ) → ˆN(Γ)` as a complex map, materializing
    /// the nerve of the total complex (test-scale only).
    pub fn l_map(&self, f: &BundleScenario, cap: usize) -> Result<ComplexMap> {
        let nerve_total = hat_n(f.total(), cap)?;
        let map = self
            .bundle
            .total()
            .vertices()
            .iter()
            .map(|v| {
                let (nu, _) = split_pullback_vertex(v)?;
                Ok((v.clone(), Vertex::from_simplex(&nu)))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        ComplexMap::new(self.bundle.total().clone(), nerve_total, map)
    }
}

/// A morphism of bundle scenarios: the relation on bases plus the outcome
/// map from the canonical pull-back, which is cached together with its
/// projection data.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BundleMorphism {
    source: BundleScenario,
    target: BundleScenario,
    relation: SimplicialRelation,
    pullback: RelationPullback,
    alpha: ComplexMap,
}

impl BundleMorphism {
    /// `alpha` assigns a target total vertex to every vertex of the
    /// canonical pull-back `π*(ˆNΓ)`.
    pub fn new(
        source: BundleScenario,
        target: BundleScenario,
        relation: SimplicialRelation,
        alpha: BTreeMap<Vertex, Vertex>,
        cap: usize,
    ) -> Result<Self> {
        if relation.source() != target.base() || relation.target() != source.base() {
            return Err(Error::InvalidMorphism(
                "relation must run from the target base to the source base".into(),
            ));
        }
        let pullback = RelationPullback::new(&source, &relation, cap)?;
        BundleMorphism::with_pullback(source, target, relation, pullback, alpha)
    }

    /// Like [`BundleMorphism::new`] with the canonical pull-back already
    /// built (exhaustive enumerations construct many morphisms over one
    /// pull-back).
    pub fn with_pullback(
        source: BundleScenario,
        target: BundleScenario,
        relation: SimplicialRelation,
        pullback: RelationPullback,
        alpha: BTreeMap<Vertex, Vertex>,
    ) -> Result<Self> {
        let alpha = ComplexMap::new(
            pullback.bundle().total().clone(),
            target.total().clone(),
            alpha,
        )?;
        let morphism = BundleMorphism {
            source,
            target,
            relation,
            pullback,
            alpha,
        };
        morphism.validate()?;
        Ok(morphism)
    }

    fn validate(&self) -> Result<()> {
        // f′ ∘ α must agree with the pulled-back projection f^π.
        let left = self.alpha.then(self.target.map())?;
        if left != *self.pullback.bundle().map() {
            return Err(Error::InvalidMorphism(
                "α is not a map over the new base".into(),
            ));
        }
        Ok(())
    }

    pub fn identity(f: &BundleScenario) -> Result<Self> {
        let alpha = ComplexMap::identity(f.total());
        BundleMorphism::type_two(f, f, &alpha, DEFAULT_SIMPLEX_CAP)
    }

    /// The type I morphism `(π, id) : f → f^π` of a relation on the base.
    pub fn type_one(
        f: &BundleScenario,
        pi: &SimplicialRelation,
        cap: usize,
    ) -> Result<Self> {
        let pullback = RelationPullback::new(f, pi, cap)?;
        let target = pullback.bundle().clone();
        let alpha = target
            .total()
            .vertices()
            .iter()
            .map(|v| (v.clone(), v.clone()))
            .collect();
        BundleMorphism::new(f.clone(), target, pi.clone(), alpha, cap)
    }

    /// The type II morphism `(δ, α) : f → g` of a fiberwise map over one
    /// base (`g ∘ α = f`).
    pub fn type_two(
        f: &BundleScenario,
        g: &BundleScenario,
        alpha: &ComplexMap,
        cap: usize,
    ) -> Result<Self> {
        if alpha.source() != f.total() || alpha.target() != g.total() || f.base() != g.base() {
            return Err(Error::InvalidMorphism("not a map over one base".into()));
        }
        let relation = SimplicialRelation::delta(f.base());
        let pullback = RelationPullback::new(f, &relation, cap)?;
        let assignment = pullback
            .bundle()
            .total()
            .vertices()
            .iter()
            .map(|v| {
                let (nu, _) = split_pullback_vertex(v)?;
                // Over the δ relation, fibers over vertices are single
                // vertices of Γ.
                Ok((v.clone(), alpha.apply_vertex(&nu.vertices()[0])))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        BundleMorphism::new(f.clone(), g.clone(), relation, assignment, cap)
    }

    pub fn source(&self) -> &BundleScenario {
        &self.source
    }

    pub fn target(&self) -> &BundleScenario {
        &self.target
    }

    pub fn relation(&self) -> &SimplicialRelation {
        &self.relation
    }

    pub fn pullback(&self) -> &RelationPullback {
        &self.pullback
    }

    pub fn alpha(&self) -> &ComplexMap {
        &self.alpha
    }

    /// Composition `other ∘ self` (apply `self` first):
    /// `(π₁ ⋄ π₂, α₂ ∘ π₂*(ˆNα₁))`, with the middle map evaluated directly
    /// on canonical pull-back vertices.
    pub fn then(&self, other: &BundleMorphism, cap: usize) -> Result<BundleMorphism> {
        if self.target != other.source {
            return Err(Error::InvalidMorphism("composition mismatch".into()));
        }
        let relation = self.relation.kleisli(other.relation())?;
        let composite_pb = RelationPullback::new(&self.source, &relation, cap)?;
        let alpha = composite_pb
            .bundle()
            .total()
            .vertices()
            .iter()
            .map(|v| {
                let (nu, z) = split_pullback_vertex(v)?;
                // Split ν over the vertices of π₂(z) and push through α₁.
                let sigma_prime = other.relation().vertex_value(&z);
                let members = sigma_prime
                    .vertices()
                    .iter()
                    .map(|y| {
                        let part = self
                            .source
                            .restrict_fiber(&nu, self.relation.vertex_value(y))?;
                        Ok(pullback_vertex(&part, y))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mid = Simplex::new(members)?;
                let image = self.alpha.apply(&mid);
                Ok((v.clone(), other.alpha().apply_vertex(&pullback_vertex(&image, &z))))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        BundleMorphism::new(
            self.source.clone(),
            other.target.clone(),
            relation,
            alpha,
            cap,
        )
    }
}

/// An empirical model on a bundle scenario: one distribution on each fiber,
/// compatible under fiber restriction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BundleModel<R: Semiring> {
    bundle: BundleScenario,
    dists: BTreeMap<Simplex, Dist<Simplex, R>>,
}

impl<R: Semiring> BundleModel<R> {
    pub fn new(bundle: BundleScenario, dists: BTreeMap<Simplex, Dist<Simplex, R>>) -> Result<Self> {
        let model = BundleModel { bundle, dists };
        model.validate()?;
        Ok(model)
    }

    pub fn from_maximal(
        bundle: BundleScenario,
        maximal: BTreeMap<Simplex, Dist<Simplex, R>>,
    ) -> Result<Self> {
        let mut dists = BTreeMap::new();
        for sigma in bundle.base().simplices() {
            let host = bundle
                .base()
                .maximal()
                .iter()
                .find(|m| sigma.is_subset(m))
                .expect("simplex under a maximal one");
            let d = maximal
                .get(host)
                .ok_or_else(|| Error::InvalidModel(format!("missing distribution on {host}")))?
                .try_push(|gamma| bundle.restrict_fiber(gamma, sigma))?;
            dists.insert(sigma.clone(), d);
        }
        BundleModel::new(bundle, dists)
    }

    pub fn bundle(&self) -> &BundleScenario {
        &self.bundle
    }

    pub fn dist(&self, sigma: &Simplex) -> Result<&Dist<Simplex, R>> {
        self.dists
            .get(sigma)
            .ok_or_else(|| Error::InvalidModel(format!("no distribution on {sigma}")))
    }

    pub fn dists(&self) -> &BTreeMap<Simplex, Dist<Simplex, R>> {
        &self.dists
    }

    pub fn validate(&self) -> Result<()> {
        for sigma in self.bundle.base().simplices() {
            let Some(d) = self.dists.get(sigma) else {
                return Err(Error::InvalidModel(format!("no distribution on {sigma}")));
            };
            let fiber = self.bundle.fiber(sigma)?;
            for gamma in d.support() {
                if !fiber.contains(gamma) {
                    return Err(Error::InvalidModel(format!(
                        "support simplex {gamma} is outside the fiber of {sigma}"
                    )));
                }
            }
        }
        for sigma in self.bundle.base().simplices() {
            for sub in self
                .bundle
                .base()
                .simplices()
                .filter(|t| t.is_subset(sigma) && *t != sigma)
            {
                let marginal = self.dists[sigma].try_push(|g| self.bundle.restrict_fiber(g, sub))?;
                if marginal != self.dists[sub] {
                    return Err(Error::InvalidModel(format!(
                        "incompatible pair ({sub}, {sigma}) on the bundle"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn mix(parts: &[(BundleModel<R>, R)]) -> Result<BundleModel<R>> {
        let Some((first, _)) = parts.first() else {
            return Err(Error::MixtureShape("empty model mixture".into()));
        };
        let bundle = first.bundle.clone();
        if parts.iter().any(|(m, _)| m.bundle != bundle) {
            return Err(Error::MixtureShape("models live on different bundles".into()));
        }
        let families: Vec<(DistFamily<Simplex, Simplex, R>, R)> = parts
            .iter()
            .map(|(m, w)| (m.dists.clone(), w.clone()))
            .collect();
        BundleModel::new(bundle, convex_mix(&families)?)
    }
}

/// The canonical bundle `f_{(Σ,O)} : 𝓔_OΣ → Σ` of a scenario: vertices are
/// outcome points, the simplex over `(σ, s)` is the graph of `s`.
pub fn canonical_bundle(scn: &Scenario, cap: usize) -> Result<BundleScenario> {
    let mut vertices: Vec<Vertex> = Vec::new();
    for x in scn.complex().vertices() {
        for o in scn.outcomes_at(x) {
            vertices.push(Vertex::point(x, o));
        }
    }
    let mut tops: Vec<Simplex> = Vec::new();
    for m in scn.complex().maximal() {
        for s in scn.event_sections(m)? {
            tops.push(section_simplex(&s));
        }
    }
    let total = Complex::close_downward(vertices, &tops, cap)?;
    let map = total
        .vertices()
        .iter()
        .map(|v| {
            let (x, _) = v.as_point().expect("outcome point vertex");
            (v.clone(), x)
        })
        .collect();
    BundleScenario::new(ComplexMap::new(total, scn.complex().clone(), map)?)
}

/// The graph of a section as a simplex of the canonical bundle.
pub fn section_simplex(s: &SectionOver) -> Simplex {
    Simplex::new(
        s.context()
            .vertices()
            .iter()
            .zip(s.values())
            .map(|(x, o)| Vertex::point(x, o)),
    )
    .expect("nonempty context")
}

/// Decodes a canonical-bundle fiber simplex back into a section.
pub fn simplex_section(gamma: &Simplex) -> Result<SectionOver> {
    let mut context: Vec<Vertex> = Vec::new();
    let mut values: Vec<Outcome> = Vec::new();
    let mut pairs: Vec<(Vertex, Outcome)> = gamma
        .vertices()
        .iter()
        .map(|v| {
            v.as_point()
                .ok_or_else(|| Error::InvalidComplex(format!("{v} is not an outcome point")))
        })
        .collect::<Result<_>>()?;
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    for (x, o) in pairs {
        context.push(x);
        values.push(o);
    }
    SectionOver::new(Simplex::new(context)?, values)
}

/// The relative bundle `f_{𝓔_O∘π} : (𝓔_O∘π)Σ′ → Σ′` of a scenario along a
/// relation; identical to the canonical pull-back of the nerve of the
/// canonical bundle.
pub fn relative_bundle(
    scn: &Scenario,
    pi: &SimplicialRelation,
    cap: usize,
) -> Result<RelationPullback> {
    let bundle = canonical_bundle(scn, cap)?;
    RelationPullback::new(&bundle, pi, cap)
}

/// The embedding of scenario morphisms: `(π, α) ↦ (π, r(α))` where
/// `r(α)(σ′, s) = (σ′, α_{σ′}(s))` acts vertexwise on the relative bundle.
pub fn embed_scenario(m: &ScenarioMorphism, cap: usize) -> Result<BundleMorphism> {
    let source = canonical_bundle(m.source(), cap)?;
    let target = canonical_bundle(m.target(), cap)?;
    let pullback = RelationPullback::new(&source, m.relation(), cap)?;
    let alpha = pullback
        .bundle()
        .total()
        .vertices()
        .iter()
        .map(|v| {
            let (nu, x) = split_pullback_vertex(v)?;
            let s = simplex_section(&nu)?;
            let singleton = Simplex::singleton(x.clone());
            let image = m.alpha_assembled(&singleton, &s)?;
            Ok((v.clone(), Vertex::point(&x, &image.values()[0])))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    BundleMorphism::new(source, target, m.relation().clone(), alpha, cap)
}

/// η: identifies an empirical model on `(Σ, O)` with a bundle model on the
/// canonical bundle, context by context.
pub fn eta<R: Semiring>(scn: &Scenario, e: &EmpiricalModel<R>, cap: usize) -> Result<BundleModel<R>> {
    if e.scenario() != scn {
        return Err(Error::InvalidModel("model/scenario mismatch".into()));
    }
    let bundle = canonical_bundle(scn, cap)?;
    let mut dists = BTreeMap::new();
    for sigma in scn.complex().simplices() {
        let d = e.dist(sigma)?.push(section_simplex);
        dists.insert(sigma.clone(), d);
    }
    BundleModel::new(bundle, dists)
}

/// η⁻¹: decodes a bundle model on a canonical bundle back into an empirical
/// model.
pub fn eta_inverse<R: Semiring>(scn: &Scenario, p: &BundleModel<R>) -> Result<EmpiricalModel<R>> {
    let mut dists = BTreeMap::new();
    for sigma in scn.complex().simplices() {
        let d = p.dist(sigma)?.try_push(simplex_section)?;
        dists.insert(sigma.clone(), d);
    }
    EmpiricalModel::new(scn.clone(), dists)
}

/// `ˆNp`: the induced model on `ˆNf`, with
/// `(ˆNp)_F(G) = p_{∪F}(∪G)`. Materializes both nerves (cap-guarded).
pub fn hat_n_model<R: Semiring>(
    f: &BundleScenario,
    p: &BundleModel<R>,
    cap: usize,
) -> Result<BundleModel<R>> {
    if p.bundle() != f {
        return Err(Error::InvalidModel("model/bundle mismatch".into()));
    }
    let nf = BundleScenario::new(hat_n_map(f.map(), cap)?)?;
    let mut dists = BTreeMap::new();
    for family in nf.base().simplices() {
        let union_base = Simplex::union_all(
            family
                .vertices()
                .iter()
                .map(|v| v.as_set().expect("nerve vertex"))
                .collect::<Vec<_>>()
                .iter(),
        )?;
        let base_dist = p.dist(&union_base)?;
        let pairs = nf
            .fiber(family)?
            .iter()
            .map(|g| {
                let union_fiber = Simplex::union_all(
                    g.vertices()
                        .iter()
                        .map(|v| v.as_set().expect("nerve vertex"))
                        .collect::<Vec<_>>()
                        .iter(),
                )?;
                Ok((g.clone(), base_dist.weight(&union_fiber)))
            })
            .collect::<Result<Vec<_>>>()?;
        dists.insert(family.clone(), Dist::new(pairs)?);
    }
    BundleModel::new(nf, dists)
}

/// Push-forward along a bundle morphism: the relation step
/// `(π_*p)_{σ′}(γ′) = p_{π̄(σ′)}(l̄(γ′))` followed by the outcome step
/// `D_R(α|_fiber)`.
pub fn push_forward_bundle<R: Semiring>(
    m: &BundleMorphism,
    p: &BundleModel<R>,
) -> Result<BundleModel<R>> {
    if p.bundle() != m.source() {
        return Err(Error::InvalidModel("model lives on a different bundle".into()));
    }
    let mid = m.pullback().bundle();
    let mut pushed = BTreeMap::new();
    for sigma in mid.base().simplices() {
        let pulled_base = m.relation().apply(sigma);
        let base_dist = p.dist(&pulled_base)?;
        let pairs = mid
            .fiber(sigma)?
            .iter()
            .map(|gamma| {
                let weight = base_dist.weight(&m.pullback().l_bar(gamma)?);
                Ok((gamma.clone(), weight))
            })
            .collect::<Result<Vec<_>>>()?;
        pushed.insert(sigma.clone(), Dist::new(pairs)?);
    }
    let intermediate = BundleModel::new(mid.clone(), pushed)?;
    let mut out = BTreeMap::new();
    for (sigma, d) in intermediate.dists() {
        out.insert(sigma.clone(), d.push(|gamma| m.alpha().apply(gamma)));
    }
    BundleModel::new(m.target().clone(), out)
}

/// Enumerates every simplicial relation between two complexes (test scale).
pub fn enumerate_relations(from: &Complex, to: &Complex) -> Vec<SimplicialRelation> {
    let values: Vec<Simplex> = to.simplices().cloned().collect();
    let vs = from.vertices();
    let mut out = Vec::new();
    let mut assignment: BTreeMap<Vertex, Simplex> = BTreeMap::new();
    fn rec(
        from: &Complex,
        to: &Complex,
        vs: &[Vertex],
        values: &[Simplex],
        assignment: &mut BTreeMap<Vertex, Simplex>,
        out: &mut Vec<SimplicialRelation>,
    ) {
        if assignment.len() == vs.len() {
            if let Ok(rel) = SimplicialRelation::new(from.clone(), to.clone(), assignment.clone())
            {
                out.push(rel);
            }
            return;
        }
        let x = vs[assignment.len()].clone();
        for s in values {
            assignment.insert(x.clone(), s.clone());
            // Prune as soon as a fully assigned simplex fails to close.
            let ok = from
                .simplices()
                .filter(|t| t.contains(&x) && t.vertices().iter().all(|y| assignment.contains_key(y)))
                .all(|t| {
                    let union = Simplex::union_all(t.vertices().iter().map(|y| &assignment[y]))
                        .expect("nonempty");
                    to.contains(&union)
                });
            if ok {
                rec(from, to, vs, values, assignment, out);
            }
            assignment.remove(&x);
        }
    }
    rec(from, to, vs, &values, &mut assignment, &mut out);
    out
}

/// Enumerates every bundle morphism `f → f′` with the given relation
/// (test scale): all vertex assignments of the pull-back into the matching
/// vertex fibers that yield a simplicial map over the base.
pub fn enumerate_bundle_morphisms_with_relation(
    f: &BundleScenario,
    f_prime: &BundleScenario,
    relation: &SimplicialRelation,
    cap: usize,
) -> Result<Vec<BundleMorphism>> {
    let pullback = RelationPullback::new(f, relation, cap)?;
    let pb_total = pullback.bundle().total().clone();
    let vs: Vec<Vertex> = pb_total.vertices().to_vec();
    let _ = cap;
    // Candidate images: vertices of Γ′ over the same base vertex.
    let candidates: Vec<Vec<Vertex>> = vs
        .iter()
        .map(|v| {
            let (_, y) = split_pullback_vertex(v)?;
            Ok(f_prime
                .fiber(&Simplex::singleton(y))?
                .iter()
                .map(|s| s.vertices()[0].clone())
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut chosen: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &BundleScenario,
        f_prime: &BundleScenario,
        relation: &SimplicialRelation,
        pullback: &RelationPullback,
        pb_total: &Complex,
        vs: &[Vertex],
        candidates: &[Vec<Vertex>],
        chosen: &mut BTreeMap<Vertex, Vertex>,
        out: &mut Vec<BundleMorphism>,
    ) -> Result<()> {
        let depth = chosen.len();
        if depth == vs.len() {
            if let Ok(m) = BundleMorphism::with_pullback(
                f.clone(),
                f_prime.clone(),
                relation.clone(),
                pullback.clone(),
                chosen.clone(),
            ) {
                out.push(m);
            }
            return Ok(());
        }
        'cands: for w in &candidates[depth] {
            chosen.insert(vs[depth].clone(), w.clone());
            // Prune on fully assigned simplices.
            for t in pb_total.simplices() {
                if t.contains(&vs[depth])
                    && t.vertices().iter().all(|u| chosen.contains_key(u))
                {
                    let image = Simplex::new(t.vertices().iter().map(|u| chosen[u].clone()))?;
                    if !f_prime.total().contains(&image) {
                        chosen.remove(&vs[depth]);
                        continue 'cands;
                    }
                }
            }
            rec(
                f, f_prime, relation, pullback, pb_total, vs, candidates, chosen, out,
            )?;
            chosen.remove(&vs[depth]);
        }
        Ok(())
    }
    rec(
        f,
        f_prime,
        relation,
        &pullback,
        &pb_total,
        &vs,
        &candidates,
        &mut chosen,
        &mut out,
    )?;
    Ok(out)
}


#[cfg(test)]
mod extra_tests {
    use super::*;
    use crate::complex::DEFAULT_SIMPLEX_CAP as CAP;
    use crate::sample;

    #[test]
    fn push_along_identity_is_identity_and_fibers_behave() {
        let scn = sample::square_z2();
        let f = canonical_bundle(&scn, CAP).unwrap();
        let e = sample::pr_box();
        let p = eta(&scn, &e, CAP).unwrap();
        let id = BundleMorphism::identity(&f).unwrap();
        assert_eq!(push_forward_bundle(&id, &p).unwrap(), p);

        // PR box has support on 2 of the 4 fiber simplices per edge context.
        for sigma in f.base().simplices().filter(|s| s.len() == 2) {
            assert_eq!(f.fiber(sigma).unwrap().len(), 4);
            assert_eq!(p.dist(sigma).unwrap().support_len(), 2);
        }

        // Bundle-scenario basics: nonempty fibers everywhere, no edges within
        // a vertex fiber.
        for sigma in f.base().simplices() {
            assert!(!f.fiber(sigma).unwrap().is_empty());
        }
        for edge in f.total().simplices().filter(|s| s.len() == 2) {
            let [a, b] = [&edge.vertices()[0], &edge.vertices()[1]];
            assert_ne!(f.map().apply_vertex(a), f.map().apply_vertex(b));
        }
    }

    #[test]
    fn fiber_restriction_composes_along_nested_faces() {
        let scn = crate::scenario::Scenario::uniform_outcomes(
            Complex::from_maximal(
                [Vertex::atom("y0"), Vertex::atom("y1"), Vertex::atom("y2")],
                &[Simplex::new([
                    Vertex::atom("y0"),
                    Vertex::atom("y1"),
                    Vertex::atom("y2"),
                ])
                .unwrap()],
            )
            .unwrap(),
            &sample::z2(),
        )
        .unwrap();
        let f = canonical_bundle(&scn, CAP).unwrap();
        let top = Simplex::new([Vertex::atom("y0"), Vertex::atom("y1"), Vertex::atom("y2")])
            .unwrap();
        let mid = Simplex::new([Vertex::atom("y0"), Vertex::atom("y1")]).unwrap();
        let low = Simplex::new([Vertex::atom("y0")]).unwrap();
        for gamma in f.fiber(&top).unwrap() {
            let step = f
                .restrict_fiber(&f.restrict_fiber(gamma, &mid).unwrap(), &low)
                .unwrap();
            assert_eq!(step, f.restrict_fiber(gamma, &low).unwrap());
        }
        // Restriction is surjective onto the smaller fiber.
        let mut images = std::collections::BTreeSet::new();
        for gamma in f.fiber(&top).unwrap() {
            images.insert(f.restrict_fiber(gamma, &low).unwrap());
        }
        assert_eq!(images.len(), f.fiber(&low).unwrap().len());
    }

    #[test]
    fn removing_one_section_graph_shrinks_the_section_count() {
        // Restrict the canonical triangle bundle by deleting one maximal
        // simplex (the graph of one section over one context): still a
        // bundle, but two global sections die.
        let scn = sample::triangle_z2();
        let f = canonical_bundle(&scn, CAP).unwrap();
        assert_eq!(f.sections(1000).unwrap().len(), 8);
        let victim = f
            .total()
            .maximal()
            .iter()
            .find(|s| s.len() == 2)
            .unwrap()
            .clone();
        let remaining: std::collections::BTreeSet<Simplex> = f
            .total()
            .simplices()
            .filter(|s| **s != victim)
            .cloned()
            .collect();
        let total = Complex::from_simplices(remaining).unwrap();
        let map = ComplexMap::new(
            total.clone(),
            f.base().clone(),
            total
                .vertices()
                .iter()
                .map(|v| (v.clone(), f.map().apply_vertex(v)))
                .collect(),
        )
        .unwrap();
        let restricted = BundleScenario::new(map).unwrap();
        assert_eq!(restricted.sections(1000).unwrap().len(), 6);
    }
}

#[cfg(test)]
mod deterministic_transport_tests {
    use super::*;
    use crate::complex::DEFAULT_SIMPLEX_CAP as CAP;
    use crate::contextuality::deterministic_scenario_model;
    use crate::sample;
    use crate::sdist::zeta;
    use crate::semiring::Rat;
    use crate::sset::DEFAULT_LEVEL_CAP as LC;

    #[test]
    fn eta_and_zeta_send_deterministic_to_deterministic() {
        let scn = sample::triangle_z2();
        for global in sample::global_assignments(&scn).iter().take(3) {
            let det = deterministic_scenario_model::<Rat>(&scn, global).unwrap();
            let p = eta(&scn, &det, CAP).unwrap();
            for d in p.dists().values() {
                assert!(d.is_point());
            }
            let f = canonical_bundle(&scn, CAP).unwrap();
            let sd = zeta(&f, &p, 2, LC).unwrap();
            for table in sd.tables() {
                for d in table.values() {
                    assert!(d.is_point());
                }
            }
        }
    }
}
