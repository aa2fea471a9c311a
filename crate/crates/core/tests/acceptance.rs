//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Every tolerance here is exact equality; randomized suites run on fixed
//! seeds. The small-instance oracles (basic-solution search, functional
//! evaluation) are independent of the decision path they check.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use ctxscen::bundle::{
    canonical_bundle, embed_scenario, eta, eta_inverse, hat_n_model, push_forward_bundle,
    BundleMorphism, RelationPullback,
};
use ctxscen::complex::{
    classify_via_lifting, pull_back, verify_pullback_square, Complex, ComplexMap, Simplex, Vertex,
    DEFAULT_SIMPLEX_CAP as CAP,
};
use ctxscen::contextuality::{
    decide_bundle, decide_scenario, decide_scenario_all_contexts, decide_scenario_boolean,
    decide_sdist_nerve, decide_sdist_nerve_boolean, match_section_orders, nerve_sections,
    scenario_sections, theta_bundle, theta_scenario, theta_sdist, verify_bundle_mixture,
    verify_scenario_mixture, verify_scenario_separation, verify_sdist_mixture, Certificate,
    Verdict, DEFAULT_SECTION_CAP as SC,
};
use ctxscen::dist::Dist;
use ctxscen::nerve::{hat_n, hat_n_map, mu_vertex, nerve_unit, SimplicialRelation};
use ctxscen::rng::Rng;
use ctxscen::sample;
use ctxscen::scenario::{EmpiricalModel, SectionOver};
use ctxscen::sdist::{
    enumerate_sset_sections, from_outcome_map, to_outcome_map, zeta, zeta_inverse,
    SimplicialDistribution,
};
use ctxscen::semiring::{Rat, Semiring};
use ctxscen::sset::{
    check_simplicial_scenario, delta_sset, embed_bundle, mu_tilde, nerve_pullback_compare,
    nerve_smap, nerve_space, sset_product, sset_pull_back, t_of_relation, SSetMap,
    DEFAULT_LEVEL_CAP as LC,
};

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d).unwrap()
}

// ---------------------------------------------------------------------------
// Criterion 1 — paper example reproduction
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_paper_example_reproduction() {
    let m = sample::triangle_to_square_morphism().unwrap();
    let x2 = Vertex::atom("x2");
    let x3 = Vertex::atom("x3");
    let ctx = Simplex::new([x2.clone(), x3.clone()]).unwrap();
    let x2_single = Simplex::singleton(x2.clone());

    let mut rng = Rng::new(0xACCE01);
    let mut models = vec![sample::uniform_model(m.source()).unwrap()];
    for _ in 0..10 {
        models.push(sample::random_model(m.source(), &mut rng).unwrap());
    }
    for e in &models {
        let pushed = m.push_forward(e).unwrap();
        let d = pushed.dist(&ctx).unwrap();
        for s in pushed.scenario().event_sections(&ctx).unwrap() {
            let a = s.value_at(&x2).unwrap().clone();
            let b = s.value_at(&x3).unwrap().clone();
            let expected = if a == b {
                let source_section =
                    SectionOver::new(x2_single.clone(), vec![a.clone()]).unwrap();
                e.dist(&x2_single).unwrap().weight(&source_section)
            } else {
                Rat::zero()
            };
            assert_eq!(d.weight(&s), expected, "at {s}");
        }
    }

    // The uniform instance gives {(0,0): 1/2, (1,1): 1/2} exactly.
    let pushed = m.push_forward(&models[0]).unwrap();
    let d = pushed.dist(&ctx).unwrap();
    assert_eq!(d.support_len(), 2);
    for (s, w) in d.iter() {
        assert_eq!(s.values()[0], s.values()[1]);
        assert_eq!(*w, rat(1, 2));
    }
    println!("criterion 01 (paper example reproduction): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 2 — contextuality ground truth with independent oracles
// ---------------------------------------------------------------------------

/// Exact Gaussian solve of `A x = b` (free variables set to zero);
/// `None` when inconsistent.
fn gauss_solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = a.len();
    let k = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..m).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let pivot = aug[r][c].clone();
        for v in aug[r].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..m {
            if i != r && !aug[i][c].is_zero() {
                let factor = aug[i][c].clone();
                let row = aug[r].clone();
                for (j, v) in aug[i].iter_mut().enumerate() {
                    *v -= &factor * &row[j];
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    for row in aug.iter().take(m).skip(r) {
        if !row[k].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); k];
    for (row, &c) in pivot_cols.iter().enumerate() {
        x[c] = aug[row][k].clone();
    }
    Some(x)
}

/// Brute-force feasibility of `{x ≥ 0 : Ax = b}` via basic solutions over
/// all column subsets (sound and complete for small column counts).
fn brute_force_feasible(a: &[Vec<BigRational>], b: &[BigRational]) -> bool {
    let n = a.first().map_or(0, Vec::len);
    assert!(n <= 20, "oracle is for small instances");
    for mask in 0u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let sub: Vec<Vec<BigRational>> = a
            .iter()
            .map(|row| cols.iter().map(|&j| row[j].clone()).collect())
            .collect();
        if let Some(x) = gauss_solve(&sub, b) {
            if x.iter().all(|v| !v.is_negative()) {
                // Exact recheck.
                let ok = (0..a.len()).all(|i| {
                    let lhs: BigRational =
                        cols.iter().enumerate().map(|(t, &j)| &a[i][j] * &x[t]).sum();
                    lhs == b[i]
                });
                if ok {
                    return true;
                }
            }
        }
    }
    false
}

/// The scenario LP data (maximal contexts), for feeding the oracle.
fn scenario_lp(e: &EmpiricalModel<Rat>) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let scn = e.scenario();
    let sections = scenario_sections(scn, SC).unwrap();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut b: Vec<BigRational> = Vec::new();
    for sigma in scn.complex().maximal() {
        for t in scn.event_sections(sigma).unwrap() {
            let mut row = Vec::with_capacity(sections.len());
            for s in &sections {
                let values: Vec<_> = sigma.vertices().iter().map(|v| s[v].clone()).collect();
                let restricted = SectionOver::new(sigma.clone(), values).unwrap();
                row.push(if restricted == t {
                    BigRational::from_integer(1.into())
                } else {
                    BigRational::zero()
                });
            }
            rows.push(row);
            b.push(e.dist(sigma).unwrap().weight(&t).into_big());
        }
    }
    rows.push(vec![BigRational::from_integer(1.into()); sections.len()]);
    b.push(BigRational::from_integer(1.into()));
    (rows, b)
}

/// CHSH value `E(x0x1) + E(x1x2) + E(x2x3)·(-1 flip) …` for square models:
/// correlators with the {x2,x3} term negated.
fn chsh_value(e: &EmpiricalModel<Rat>) -> BigRational {
    let edge = |a: &str, b: &str| Simplex::new([Vertex::atom(a), Vertex::atom(b)]).unwrap();
    let correlator = |sigma: &Simplex| -> BigRational {
        let mut total = BigRational::zero();
        for (s, w) in e.dist(sigma).unwrap().iter() {
            let parity = s.values()[0] != s.values()[1];
            let sign = if parity {
                -BigRational::from_integer(1.into())
            } else {
                BigRational::from_integer(1.into())
            };
            total += sign * w.clone().into_big();
        }
        total
    };
    correlator(&edge("x0", "x1")) + correlator(&edge("x1", "x2")) + correlator(&edge("x3", "x0"))
        - correlator(&edge("x2", "x3"))
}

#[test]
fn criterion_02_contextuality_ground_truth() {
    let pr = sample::pr_box();
    let start = std::time::Instant::now();
    let cert = decide_scenario(&pr, SC).unwrap();
    assert_eq!(cert.verdict(), Verdict::Contextual);
    let Certificate::Separation {
        coefficients,
        threshold,
        value,
    } = &cert
    else {
        panic!("expected a functional")
    };
    assert!(value > threshold);
    assert!(verify_scenario_separation(&pr, coefficients, SC).unwrap());

    // Independent oracle for the contextual side: CHSH evaluates to 4 on
    // the PR box but is bounded by 2 on all sixteen deterministic columns
    // (so no convex combination can match the PR column).
    assert_eq!(chsh_value(&pr), BigRational::from_integer(4.into()));
    let sections = scenario_sections(pr.scenario(), SC).unwrap();
    assert_eq!(sections.len(), 16);
    for s in &sections {
        let det = ctxscen::contextuality::deterministic_scenario_model::<Rat>(pr.scenario(), s)
            .unwrap();
        let v = chsh_value(&det);
        assert!(v.abs() <= BigRational::from_integer(2.into()));
    }

    let uniform = sample::uniform_model(pr.scenario()).unwrap();
    let cert = decide_scenario(&uniform, SC).unwrap();
    let Certificate::Mixture { weights } = &cert else {
        panic!("expected weights")
    };
    assert!(verify_scenario_mixture(&uniform, weights, SC).unwrap());
    // Independent oracle for the noncontextual side: the uniform weights
    // over all sixteen sections re-mix to the uniform model by direct
    // evaluation.
    let w = rat(1, 16);
    let uniform_weights: Vec<(usize, Rat)> = (0..16).map(|j| (j, w.clone())).collect();
    assert_eq!(
        theta_scenario(pr.scenario(), &sections, &uniform_weights).unwrap(),
        uniform
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 1, "ground truth took {elapsed:?}");

    println!("criterion 02 (contextuality ground truth, PR box + uniform, {elapsed:?}): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 3 — Theorem-level equivalence of the three decisions
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_decision_equivalence_across_flavors() {
    let mut rng = Rng::new(0xACCE03);
    let mut contextual_seen = 0;
    let mut noncontextual_seen = 0;
    for round in 0..200 {
        let scn = sample::random_scenario(&mut rng, 5, 3).unwrap();
        let e = sample::random_model(&scn, &mut rng).unwrap();

        let c1 = decide_scenario(&e, SC).unwrap();
        let f = canonical_bundle(&scn, CAP).unwrap();
        let p = eta(&scn, &e, CAP).unwrap();
        let c2 = decide_bundle(&p, SC).unwrap();
        let sd = zeta(&f, &p, 2, LC).unwrap();
        let c3 = decide_sdist_nerve(&f, &sd, 2, SC).unwrap();

        assert_eq!(c1.verdict(), c2.verdict(), "round {round}");
        assert_eq!(c1.verdict(), c3.verdict(), "round {round}");

        match c1.verdict() {
            Verdict::Contextual => contextual_seen += 1,
            Verdict::NonContextual => noncontextual_seen += 1,
        }

        // Certificates transport: each flavor's weights re-mix exactly, and
        // the scenario weights re-mix in the other flavors through the
        // section correspondence.
        if let Certificate::Mixture { weights } = &c1 {
            assert!(verify_scenario_mixture(&e, weights, SC).unwrap());
            let sections = scenario_sections(&scn, SC).unwrap();
            let bsections = f.sections(SC).unwrap();
            let order = match_section_orders(&scn, &sections, &bsections).unwrap();
            let transported: Vec<(usize, Rat)> =
                weights.iter().map(|(j, w)| (order[*j], w.clone())).collect();
            assert!(verify_bundle_mixture(&p, &transported, SC).unwrap());
            assert!(verify_sdist_mixture(&f, &sd, &transported, 2, SC).unwrap());
        }
        if let Certificate::Mixture { weights } = &c2 {
            assert!(verify_bundle_mixture(&p, weights, SC).unwrap());
        }
        if let Certificate::Mixture { weights } = &c3 {
            assert!(verify_sdist_mixture(&f, &sd, weights, 2, SC).unwrap());
        }
    }
    assert!(contextual_seen > 10, "only {contextual_seen} contextual rounds");
    assert!(noncontextual_seen > 10);
    println!(
        "criterion 03 (verdict equivalence on 200 random models; {contextual_seen} contextual / {noncontextual_seen} noncontextual): PASS"
    );
}

// ---------------------------------------------------------------------------
// Criterion 4 — natural-isomorphism suites
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_natural_isomorphism_suites() {
    let mut rng = Rng::new(0xACCE04);
    for round in 0..100 {
        let source = sample::random_scenario(&mut rng, 4, 2).unwrap();
        let target = sample::random_scenario(&mut rng, 4, 2).unwrap();
        let m = sample::random_morphism(&source, &target, &mut rng).unwrap();
        let e = sample::random_model(&source, &mut rng).unwrap();

        // Round trips.
        let p = eta(&source, &e, CAP).unwrap();
        assert_eq!(eta_inverse(&source, &p).unwrap(), e, "round {round}");
        let f = canonical_bundle(&source, CAP).unwrap();
        let sd = zeta(&f, &p, 2, LC).unwrap();
        assert_eq!(zeta_inverse(&f, &sd).unwrap(), p, "round {round}");

        // η naturality.
        let bm = embed_scenario(&m, CAP).unwrap();
        let lhs = eta(&target, &m.push_forward(&e).unwrap(), CAP).unwrap();
        let rhs = push_forward_bundle(&bm, &p).unwrap();
        assert_eq!(lhs, rhs, "round {round}");

        // ζ naturality.
        let sm = embed_bundle(&bm, 2, LC).unwrap();
        let lhs = zeta(bm.target(), &rhs, 2, LC).unwrap();
        let rhs_sd = sd.push_forward(&sm).unwrap();
        assert_eq!(lhs, rhs_sd, "round {round}");
    }
    println!("criterion 04 (η/ζ naturality and round trips on 100 triples): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 5 — lifting oracle equivalence
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_lifting_oracle_equivalence() {
    let mut rng = Rng::new(0xACCE05);
    let mut checked = 0;
    let mut flag_mix: BTreeMap<(bool, bool, bool), usize> = BTreeMap::new();
    while checked < 200 {
        let source = sample::random_complex(&mut rng, 6, 3, "s");
        let target = sample::random_complex(&mut rng, 6, 3, "t");
        let Some(map) = sample::random_complex_map(&source, &target, &mut rng, 15) else {
            continue;
        };
        let direct = map.classify();
        let via_lifting = classify_via_lifting(&map).unwrap();
        assert_eq!(direct, via_lifting, "map #{checked}");
        *flag_mix
            .entry((
                direct.surjective,
                direct.locally_surjective,
                direct.discrete_over_vertices,
            ))
            .or_default() += 1;
        checked += 1;

        // Also throw in identities and canonical bundles for flag variety.
        if checked % 25 == 0 {
            let id = ComplexMap::identity(&source);
            assert_eq!(id.classify(), classify_via_lifting(&id).unwrap());
            let scn = sample::random_scenario(&mut rng, 3, 2).unwrap();
            let cb = canonical_bundle(&scn, CAP).unwrap();
            assert_eq!(cb.map().classify(), classify_via_lifting(cb.map()).unwrap());
            assert!(cb.map().classify().bundle_scenario());
        }
    }
    assert!(flag_mix.len() >= 3, "flag diversity too low: {flag_mix:?}");
    println!(
        "criterion 05 (classify vs lifting flags on 200 random maps, {} flag patterns): PASS",
        flag_mix.len()
    );
}

// ---------------------------------------------------------------------------
// Criterion 6 — category laws, functor laws, hom-set bijections
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_category_laws_and_full_faithfulness() {
    let mut rng = Rng::new(0xACCE06);

    // Identity and associativity in all three categories on random
    // composable triples, plus functor laws for the two embeddings.
    for _ in 0..12 {
        let a = sample::random_scenario(&mut rng, 3, 2).unwrap();
        let b = sample::random_scenario(&mut rng, 3, 2).unwrap();
        let c = sample::random_scenario(&mut rng, 3, 2).unwrap();
        let d = sample::random_scenario(&mut rng, 3, 2).unwrap();
        let m1 = sample::random_morphism(&a, &b, &mut rng).unwrap();
        let m2 = sample::random_morphism(&b, &c, &mut rng).unwrap();
        let m3 = sample::random_morphism(&c, &d, &mut rng).unwrap();

        // Scen.
        let id_a = ctxscen::scenario::ScenarioMorphism::identity(&a).unwrap();
        assert_eq!(id_a.then(&m1).unwrap(), m1);
        let left = m1.then(&m2).unwrap().then(&m3).unwrap();
        let right = m1.then(&m2.then(&m3).unwrap()).unwrap();
        assert_eq!(left, right);

        // bScen. Functor law for 𝓔 and associativity of the embedded triple.
        let b1 = embed_scenario(&m1, CAP).unwrap();
        let b2 = embed_scenario(&m2, CAP).unwrap();
        let b3 = embed_scenario(&m3, CAP).unwrap();
        assert_eq!(
            embed_scenario(&m1.then(&m2).unwrap(), CAP).unwrap(),
            b1.then(&b2, CAP).unwrap()
        );
        let left = b1.then(&b2, CAP).unwrap().then(&b3, CAP).unwrap();
        let right = b1.then(&b2.then(&b3, CAP).unwrap(), CAP).unwrap();
        assert_eq!(left, right);
        let idb = BundleMorphism::identity(b1.source()).unwrap();
        assert_eq!(idb.then(&b1, CAP).unwrap(), b1);

        // sScen. Functor law for N and associativity of the embedded triple.
        let s1 = embed_bundle(&b1, 2, LC).unwrap();
        let s2 = embed_bundle(&b2, 2, LC).unwrap();
        let s3 = embed_bundle(&b3, 2, LC).unwrap();
        assert_eq!(
            embed_bundle(&b1.then(&b2, CAP).unwrap(), 2, LC).unwrap(),
            s1.then(&s2, LC).unwrap()
        );
        let left = s1.then(&s2, LC).unwrap().then(&s3, LC).unwrap();
        let right = s1.then(&s2.then(&s3, LC).unwrap(), LC).unwrap();
        assert_eq!(left, right);
    }

    // Hom-set bijection for 𝓔 by exhaustive enumeration: |Scen(A,B)| counted
    // against |bScen(𝓔A, 𝓔B)| relation by relation.
    let edge = Complex::from_maximal(
        [Vertex::atom("u0"), Vertex::atom("u1")],
        &[Simplex::new([Vertex::atom("u0"), Vertex::atom("u1")]).unwrap()],
    )
    .unwrap();
    let path = Complex::from_maximal(
        [Vertex::atom("p0"), Vertex::atom("p1"), Vertex::atom("p2")],
        &[
            Simplex::new([Vertex::atom("p0"), Vertex::atom("p1")]).unwrap(),
            Simplex::new([Vertex::atom("p1"), Vertex::atom("p2")]).unwrap(),
        ],
    )
    .unwrap();
    let za = sample::z2();
    let scn_a = ctxscen::scenario::Scenario::uniform_outcomes(edge, &za).unwrap();
    let scn_b = ctxscen::scenario::Scenario::uniform_outcomes(path, &za).unwrap();
    let fa = canonical_bundle(&scn_a, CAP).unwrap();
    let fb = canonical_bundle(&scn_b, CAP).unwrap();

    let relations = ctxscen::bundle::enumerate_relations(scn_b.complex(), scn_a.complex());
    assert!(!relations.is_empty());

    // The embedding is a bijection onto the bundle hom-set: the key of a
    // bundle morphism is its relation plus the vertex action of α on the
    // pull-back; embedded scenario morphisms hit every enumerated key
    // exactly once, relation by relation.
    let morphism_key = |rel: &SimplicialRelation, alpha: &BTreeMap<Vertex, Vertex>| {
        let mut key = String::new();
        for x in scn_b.complex().vertices() {
            key.push_str(&format!("{x}:{};", rel.vertex_value(x)));
        }
        for (v, w) in alpha {
            key.push_str(&format!("{v}->{w};"));
        }
        key
    };
    let mut scen_total = 0usize;
    let mut bscen_total = 0usize;
    let mut scen_morphisms = 0usize;
    for rel in &relations {
        // Scen side: vertexwise outcome maps assemble freely.
        let mut scen_count = 1usize;
        for x in scn_b.complex().vertices() {
            let domain = scn_a.event_sections(rel.vertex_value(x)).unwrap().len();
            scen_count *= 2usize.pow(domain as u32);
        }
        scen_total += scen_count;
        // bScen side: exhaustive α enumeration over the pull-back.
        let morphisms =
            ctxscen::bundle::enumerate_bundle_morphisms_with_relation(&fa, &fb, rel, CAP)
                .unwrap();
        bscen_total += morphisms.len();
        assert_eq!(scen_count, morphisms.len(), "relation {rel:?}");
        let enumerated: std::collections::BTreeSet<String> = morphisms
            .iter()
            .map(|m| morphism_key(m.relation(), m.alpha().vertex_map()))
            .collect();
        let pullback = RelationPullback::new(&fa, rel, CAP).unwrap();
        // Enumerate all Scen morphisms with this relation, vertexwise.
        let mut alphas: Vec<BTreeMap<Vertex, BTreeMap<SectionOver, ctxscen::complex::Outcome>>> =
            vec![BTreeMap::new()];
        for x in scn_b.complex().vertices() {
            let sections = scn_a.event_sections(rel.vertex_value(x)).unwrap();
            let outcomes = scn_b.outcomes_at(x).to_vec();
            let mut next = Vec::new();
            for partial in &alphas {
                // All functions sections -> outcomes.
                let mut tables: Vec<BTreeMap<SectionOver, ctxscen::complex::Outcome>> =
                    vec![BTreeMap::new()];
                for s in &sections {
                    let mut grown = Vec::new();
                    for t in &tables {
                        for o in &outcomes {
                            let mut t2 = t.clone();
                            t2.insert(s.clone(), o.clone());
                            grown.push(t2);
                        }
                    }
                    tables = grown;
                }
                for t in tables {
                    let mut p2 = partial.clone();
                    p2.insert(x.clone(), t);
                    next.push(p2);
                }
            }
            alphas = next;
        }
        let mut embedded_keys = std::collections::BTreeSet::new();
        for alpha in alphas {
            // The embedded α acts on a pull-back vertex (ν, x) by decoding ν
            // into a section over π(x) and applying α_x.
            let assignment: BTreeMap<Vertex, Vertex> = pullback
                .bundle()
                .total()
                .vertices()
                .iter()
                .map(|v| {
                    let (nu, x) = ctxscen::bundle::split_pullback_vertex(v).unwrap();
                    let s = ctxscen::bundle::simplex_section(&nu).unwrap();
                    let o = alpha[&x][&s].clone();
                    (v.clone(), Vertex::point(&x, &o))
                })
                .collect();
            assert!(
                embedded_keys.insert(morphism_key(rel, &assignment)),
                "embedding collided"
            );
            scen_morphisms += 1;
        }
        assert_eq!(embedded_keys, enumerated, "relation {rel:?}");
    }
    assert_eq!(scen_total, bscen_total);
    assert_eq!(scen_morphisms, scen_total);

    // Hom-set bijection for N on a small pair: every base map of nerve
    // spaces comes from a unique relation, and every fiber map over a fixed
    // base comes from a unique complex map.
    let na = nerve_space(scn_a.complex(), 2, LC).unwrap();
    let nb = nerve_space(scn_b.complex(), 2, LC).unwrap();
    // Candidate level-1 functions determined on vertices of B, valued in
    // simplices of A (union-compatibility makes them simplicial relations).
    let a_simplices: Vec<Simplex> = scn_a.complex().simplices().cloned().collect();
    let b_vertices = scn_b.complex().vertices();
    let mut count_valid = 0usize;
    let mut assignments = vec![BTreeMap::<Vertex, Simplex>::new()];
    for x in b_vertices {
        let mut next = Vec::new();
        for partial in &assignments {
            for s in &a_simplices {
                let mut p2 = partial.clone();
                p2.insert(x.clone(), s.clone());
                next.push(p2);
            }
        }
        assignments = next;
    }
    for assignment in assignments {
        if let Ok(rel) =
            SimplicialRelation::new(scn_b.complex().clone(), scn_a.complex().clone(), assignment)
        {
            // Realizable as a simplicial set map; recovery round-trips.
            let t = t_of_relation(&rel, 2, LC).unwrap();
            assert_eq!(t.source(), &nb);
            assert_eq!(t.target(), &na);
            let back =
                ctxscen::sset::recover_relation(&t, scn_b.complex(), scn_a.complex()).unwrap();
            assert_eq!(back, rel);
            count_valid += 1;
        }
    }
    assert_eq!(count_valid, relations.len());

    // Fiber-map side of N's fullness, for one fixed relation: level-wise
    // candidate maps of nerve spaces over the base (vertex images in the
    // matching fibers, extended by unions) are exactly the nerves of the
    // enumerated complex-level fiber maps.
    let rel = relations
        .iter()
        .find(|r| {
            scn_b
                .complex()
                .vertices()
                .iter()
                .all(|x| r.vertex_value(x).len() == 1)
        })
        .expect("a map-valued relation exists");
    let bundle_morphisms =
        ctxscen::bundle::enumerate_bundle_morphisms_with_relation(&fa, &fb, rel, CAP).unwrap();
    let pullback = RelationPullback::new(&fa, rel, CAP).unwrap();
    let p_complex = pullback.bundle().total().clone();
    let n_p = nerve_space(&p_complex, 2, LC).unwrap();
    let n_gamma_b = nerve_space(fb.total(), 2, LC).unwrap();
    // All vertex assignments into the matching vertex fibers.
    let mut candidates: Vec<BTreeMap<Vertex, Vertex>> = vec![BTreeMap::new()];
    for v in p_complex.vertices() {
        let (_, y) = ctxscen::bundle::split_pullback_vertex(v).unwrap();
        let fiber: Vec<Vertex> = fb
            .fiber(&Simplex::singleton(y))
            .unwrap()
            .iter()
            .map(|s| s.vertices()[0].clone())
            .collect();
        let mut next = Vec::new();
        for partial in &candidates {
            for w in &fiber {
                let mut p2 = partial.clone();
                p2.insert(v.clone(), w.clone());
                next.push(p2);
            }
        }
        candidates = next;
    }
    let mut valid_sset_maps = 0usize;
    for cand in &candidates {
        // Tuple extension: map each simplex slot to the set of images; this
        // is a valid map of nerve spaces exactly when images of simplices
        // are simplices.
        let attempt = SSetMap::build(n_p.clone(), n_gamma_b.clone(), |_, e| {
            let slots = e
                .as_tuple()?
                .iter()
                .map(|slot| match slot {
                    None => Ok(None),
                    Some(s) => {
                        let images = Simplex::new(
                            s.vertices().iter().map(|v| cand[v].clone()),
                        )?;
                        Ok(Some(images))
                    }
                })
                .collect::<ctxscen::Result<Vec<_>>>()?;
            Ok(ctxscen::sset::SsElem::Tuple(slots))
        });
        if attempt.is_ok() {
            valid_sset_maps += 1;
        }
    }
    assert_eq!(valid_sset_maps, bundle_morphisms.len());

    println!(
        "criterion 06 (category/functor laws; hom bijection {} morphisms per side): PASS",
        scen_total
    );
}

// ---------------------------------------------------------------------------
// Criterion 7 — structure-preservation lemmas
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_structure_preservation() {
    let mut rng = Rng::new(0xACCE07);
    for round in 0..10 {
        let scn = sample::random_scenario(&mut rng, 3, 2).unwrap();
        let f = canonical_bundle(&scn, CAP).unwrap();

        // ˆN preserves bundle scenarios.
        let nf = hat_n_map(f.map(), CAP).unwrap();
        assert!(nf.classify().bundle_scenario(), "round {round}");

        // N preserves the scenario flags at D = 3.
        let nerve = nerve_smap(f.map(), 3, LC).unwrap();
        let flags = check_simplicial_scenario(&nerve);
        assert!(flags.scenario(), "round {round}: {:?}", flags.witness);

        // Pull-backs preserve bundles: along a random complex map into the
        // base (complex level) and along a random relation (type I level).
        let other = sample::random_complex(&mut rng, 3, 2, "q");
        if let Some(pi) = sample::random_complex_map(&other, f.base(), &mut rng, 15) {
            let pb = pull_back(f.map(), &pi, CAP).unwrap();
            assert!(pb.to_base.classify().bundle_scenario());
        }
        let rel = sample::random_relation(&other, f.base(), &mut rng, 15).unwrap();
        let rp = RelationPullback::new(&f, &rel, CAP).unwrap();
        assert!(rp.bundle().map().classify().bundle_scenario());

        // Simplicial pull-backs preserve the flags.
        let t = t_of_relation(&rel, 2, LC).unwrap();
        let nf2 = nerve_smap(f.map(), 2, LC).unwrap();
        let spb = sset_pull_back(&nf2, &t, LC).unwrap();
        assert!(check_simplicial_scenario(&spb.to_base).scenario());

        // Lemma-style comparison isomorphism T(π)*(NΓ) ≅ N(π*(ˆNΓ)).
        let n_of_pb = nerve_space(rp.bundle().total(), 2, LC).unwrap();
        let compare = nerve_pullback_compare(&f, &rel, &spb, &n_of_pb).unwrap();
        for n in 0..=2 {
            let mut seen = std::collections::BTreeSet::new();
            for e in spb.total.level(n) {
                seen.insert(compare.apply(n, e).unwrap());
            }
            assert_eq!(seen.len(), spb.total.level(n).len());
            assert_eq!(seen.len(), n_of_pb.level(n).len());
        }
        // The comparison commutes with both projections.
        let n_fpi = nerve_smap(rp.bundle().map(), 2, LC).unwrap();
        assert_eq!(compare.then(&n_fpi).unwrap(), spb.to_base);
        let l_map = rp.l_map(&f, CAP).unwrap();
        let n_l = nerve_smap(&l_map, 2, LC).unwrap();
        let mu = mu_tilde(f.total(), 2, LC).unwrap();
        assert_eq!(
            compare.then(&n_l).unwrap().then(&mu).unwrap(),
            spb.to_total
        );

        // The composed type I square is a pull-back of complexes (checked
        // through the universal property on a small instance).
        if round == 0 {
            let m = sample::triangle_to_square_morphism().unwrap();
            let fc = canonical_bundle(m.source(), CAP).unwrap();
            let rp = RelationPullback::new(&fc, m.relation(), CAP).unwrap();
            let l = rp.l_map(&fc, CAP).unwrap();
            let nfc = hat_n_map(fc.map(), CAP).unwrap();
            let pi_map = m.relation().to_nerve_map(CAP).unwrap();
            assert!(verify_pullback_square(&l, rp.bundle().map(), &nfc, &pi_map, 1).unwrap());

            // δ squares of discrete maps are pull-backs.
            let delta_total = nerve_unit(fc.total(), CAP).unwrap();
            let delta_base = nerve_unit(fc.base(), CAP).unwrap();
            assert!(
                verify_pullback_square(&delta_total, fc.map(), &nfc, &delta_base, 1).unwrap()
            );
        }
    }
    println!("criterion 07 (structure preservation: ˆN, N, pull-backs, comparison iso): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 8 — distribution-lift coherence and interchange laws
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_distribution_lift_coherence() {
    let mut rng = Rng::new(0xACCE08);
    for round in 0..25 {
        let scn = sample::random_scenario(&mut rng, 3, 2).unwrap();
        let f = canonical_bundle(&scn, CAP).unwrap();
        let e = sample::random_model(&scn, &mut rng).unwrap();
        let p = eta(&scn, &e, CAP).unwrap();

        // ˆNp is a well-defined model (constructor validates) and restricts
        // to p on singleton families.
        let np = hat_n_model(&f, &p, CAP).unwrap();
        for (sigma, d) in p.dists() {
            let family = Simplex::singleton(Vertex::from_simplex(sigma));
            let lifted = np.dist(&family).unwrap();
            for (gamma, w) in d.iter() {
                let g = Simplex::singleton(Vertex::from_simplex(gamma));
                assert_eq!(lifted.weight(&g), w.clone());
            }
        }

        // Np is a well-defined simplicial distribution determined by level 1.
        let sd = zeta(&f, &p, 2, LC).unwrap();
        sd.validate().unwrap();
        assert_eq!(zeta_inverse(&f, &sd).unwrap(), p, "round {round}");

        // Interchange: a general morphism equals its type I / type II
        // factorization on push-forwards, at the bundle level…
        let target = sample::random_scenario(&mut rng, 3, 2).unwrap();
        let m = sample::random_morphism(&scn, &target, &mut rng).unwrap();
        let bm = embed_scenario(&m, CAP).unwrap();
        let type_one = BundleMorphism::type_one(bm.source(), bm.relation(), CAP).unwrap();
        let mid = type_one.target().clone();
        let alpha_map = bm.alpha().clone();
        let type_two =
            BundleMorphism::type_two(&mid, bm.target(), &alpha_map, CAP).unwrap();
        let stepwise =
            push_forward_bundle(&type_two, &push_forward_bundle(&type_one, &p).unwrap()).unwrap();
        let direct = push_forward_bundle(&bm, &p).unwrap();
        assert_eq!(stepwise, direct, "round {round}");

        // …and compositions of relation-only pushes agree with the composed
        // relation (Kleisli step).
        let mid_base_scn = mid.base().clone();
        let third = sample::random_complex(&mut rng, 3, 2, "w");
        let rel2 = sample::random_relation(&third, &mid_base_scn, &mut rng, 15).unwrap();
        let type_one_2 = BundleMorphism::type_one(&mid, &rel2, CAP).unwrap();
        let two_step =
            push_forward_bundle(&type_one_2, &push_forward_bundle(&type_one, &p).unwrap())
                .unwrap();
        let composed_rel = bm.relation().kleisli(&rel2).unwrap();
        let one_step = push_forward_bundle(
            &BundleMorphism::type_one(bm.source(), &composed_rel, CAP).unwrap(),
            &p,
        )
        .unwrap();
        // The two sides live on isomorphic but differently named bundles;
        // compare through the base-indexed weights of l̄-images.
        for sigma in one_step.bundle().base().simplices() {
            let lhs = one_step.dist(sigma).unwrap();
            let rhs = two_step.dist(sigma).unwrap();
            assert_eq!(lhs.support_len(), rhs.support_len());
            let key = |pb: &RelationPullback, g: &Simplex| pb.l_bar(g).unwrap();
            let one_pb = RelationPullback::new(bm.source(), &composed_rel, CAP).unwrap();
            let lhs_w: BTreeMap<Simplex, Rat> = lhs
                .iter()
                .map(|(g, w)| (key(&one_pb, g), w.clone()))
                .collect();
            for (g, w) in rhs.iter() {
                // Unwrap the two-step pull-back vertex names layer by layer.
                let outer = RelationPullback::new(&mid, &rel2, CAP).unwrap();
                let mid_simplex = outer.l_bar(g).unwrap();
                let inner = RelationPullback::new(bm.source(), bm.relation(), CAP).unwrap();
                let gamma = inner.l_bar(&mid_simplex).unwrap();
                assert_eq!(lhs_w.get(&gamma), Some(w), "round {round}");
            }
        }

        // ζ intertwines both kinds of pushes (the nerve-level interchange).
        let sm = embed_bundle(&bm, 2, LC).unwrap();
        let lhs = zeta(bm.target(), &direct, 2, LC).unwrap();
        let rhs = sd.push_forward(&sm).unwrap();
        assert_eq!(lhs, rhs, "round {round}");
    }
    println!("criterion 08 (ˆNp/Np coherence, level-1 determination, interchange laws): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 9 — convexity
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_convexity() {
    let mut rng = Rng::new(0xACCE09);
    for _ in 0..20 {
        let source = sample::random_scenario(&mut rng, 4, 2).unwrap();
        let target = sample::random_scenario(&mut rng, 4, 2).unwrap();
        let m = sample::random_morphism(&source, &target, &mut rng).unwrap();
        let e1 = sample::random_model(&source, &mut rng).unwrap();
        let e2 = sample::random_model(&source, &mut rng).unwrap();
        let w = rat(1, 3);
        let cw = rat(2, 3);

        // Scenario-level affinity.
        let mixed = EmpiricalModel::mix(&[(e1.clone(), w.clone()), (e2.clone(), cw.clone())])
            .unwrap();
        let lhs = m.push_forward(&mixed).unwrap();
        let rhs = EmpiricalModel::mix(&[
            (m.push_forward(&e1).unwrap(), w.clone()),
            (m.push_forward(&e2).unwrap(), cw.clone()),
        ])
        .unwrap();
        assert_eq!(lhs, rhs);

        // Bundle-level affinity.
        let bm = embed_scenario(&m, CAP).unwrap();
        let p1 = eta(&source, &e1, CAP).unwrap();
        let p2 = eta(&source, &e2, CAP).unwrap();
        let pm = ctxscen::bundle::BundleModel::mix(&[(p1.clone(), w.clone()), (p2.clone(), cw.clone())])
            .unwrap();
        let lhs = push_forward_bundle(&bm, &pm).unwrap();
        let rhs = ctxscen::bundle::BundleModel::mix(&[
            (push_forward_bundle(&bm, &p1).unwrap(), w.clone()),
            (push_forward_bundle(&bm, &p2).unwrap(), cw.clone()),
        ])
        .unwrap();
        assert_eq!(lhs, rhs);

        // Simplicial-level affinity.
        let f = canonical_bundle(&source, CAP).unwrap();
        let sm = embed_bundle(&bm, 2, LC).unwrap();
        let sd1 = zeta(&f, &p1, 2, LC).unwrap();
        let sd2 = zeta(&f, &p2, 2, LC).unwrap();
        let sdm = SimplicialDistribution::mix(&[(sd1.clone(), w.clone()), (sd2.clone(), cw.clone())])
            .unwrap();
        let lhs = sdm.push_forward(&sm).unwrap();
        let rhs = SimplicialDistribution::mix(&[
            (sd1.push_forward(&sm).unwrap(), w.clone()),
            (sd2.push_forward(&sm).unwrap(), cw.clone()),
        ])
        .unwrap();
        assert_eq!(lhs, rhs);

        // Θ outputs are always valid and noncontextual, in every flavor.
        let sections = scenario_sections(&source, SC).unwrap();
        let k = sections.len().min(3);
        let ws = {
            let each = Rat::new(1, k as i64).unwrap();
            (0..k).map(|j| (j, each.clone())).collect::<Vec<_>>()
        };
        let theta_e = theta_scenario(&source, &sections, &ws).unwrap();
        theta_e.validate().unwrap();
        assert_eq!(decide_scenario(&theta_e, SC).unwrap().verdict(), Verdict::NonContextual);

        let bsections = f.sections(SC).unwrap();
        let theta_p = theta_bundle(&f, &bsections, &ws).unwrap();
        assert_eq!(decide_bundle(&theta_p, SC).unwrap().verdict(), Verdict::NonContextual);

        let nsections = nerve_sections(&f, 2, SC).unwrap();
        let theta_sd = theta_sdist(&f, 2, &nsections, &ws, SC).unwrap();
        assert_eq!(
            decide_sdist_nerve(&f, &theta_sd, 2, SC).unwrap().verdict(),
            Verdict::NonContextual
        );
    }
    println!("criterion 09 (ν commutes with push-forwards; Θ lands noncontextual): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 10 — monad suites and the projection correspondence
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_monad_and_projection_suites() {
    // Distribution monad laws on random nested distributions.
    let mut rng = Rng::new(0xACCE10);
    for _ in 0..60 {
        let n = 1 + rng.below(4);
        let inner: Vec<(Dist<u64, Rat>, Rat)> = (0..n)
            .map(|_| {
                let k = 1 + rng.below(4);
                let each = Rat::new(1, k as i64).unwrap();
                let d = Dist::new((0..k).map(|t| (t, each.clone()))).unwrap();
                (d, Rat::new(1, n as i64).unwrap())
            })
            .collect();
        let dd = Dist::new(inner).unwrap();
        let d = Dist::flatten(&dd);
        assert_eq!(Dist::flatten(&d.push(|t| Dist::point(*t))), d);
        assert_eq!(Dist::flatten(&Dist::point(d.clone())), d);
    }

    // Nerve monad laws, exhaustive on the graph complexes with ≤ 4 vertices
    // (vertex-level identities; the complex-map versions hold by
    // construction of the unit/multiplication maps).
    let complexes = [
        sample::triangle(),
        sample::square(),
        Complex::from_maximal(
            [Vertex::atom("a"), Vertex::atom("b")],
            &[Simplex::new([Vertex::atom("a"), Vertex::atom("b")]).unwrap()],
        )
        .unwrap(),
    ];
    for c in &complexes {
        let hat = hat_n(c, CAP).unwrap();
        for s in c.simplices() {
            let set = Vertex::from_simplex(s);
            let delta_hat = Vertex::from_simplex(&Simplex::singleton(set.clone()));
            assert_eq!(mu_vertex(&delta_hat), set);
            let singletons = Simplex::new(
                s.vertices()
                    .iter()
                    .map(|x| Vertex::from_simplex(&Simplex::singleton(x.clone()))),
            )
            .unwrap();
            assert_eq!(mu_vertex(&Vertex::from_simplex(&singletons)), set);
        }
        let hat2 = hat_n(&hat, 200_000).unwrap();
        for family in hat2.simplices() {
            let v = Vertex::from_simplex(family);
            let lhs = mu_vertex(&mu_vertex(&v));
            let mapped = Simplex::new(family.vertices().iter().map(mu_vertex)).unwrap();
            let rhs = mu_vertex(&Vertex::from_simplex(&mapped));
            assert_eq!(lhs, rhs);
        }
    }

    // Kleisli unit and associativity on random relations.
    for _ in 0..20 {
        let a = sample::random_complex(&mut rng, 4, 2, "a");
        let b = sample::random_complex(&mut rng, 4, 2, "b");
        let c = sample::random_complex(&mut rng, 4, 2, "c");
        let d = sample::random_complex(&mut rng, 4, 2, "d");
        let p1 = sample::random_relation(&b, &a, &mut rng, 10).unwrap();
        let p2 = sample::random_relation(&c, &b, &mut rng, 10).unwrap();
        let p3 = sample::random_relation(&d, &c, &mut rng, 10).unwrap();
        assert_eq!(p1.kleisli(&SimplicialRelation::delta(&b)).unwrap(), p1);
        assert_eq!(SimplicialRelation::delta(&a).kleisli(&p1).unwrap(), p1);
        let left = p1.kleisli(&p2).unwrap().kleisli(&p3).unwrap();
        let right = p1.kleisli(&p2.kleisli(&p3).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    // Projection correspondence at D = 2: the two conversions between
    // simplicial distributions on X×Y → X and outcome maps X → D(Y) are
    // mutually inverse.
    let edge = Complex::from_maximal(
        [Vertex::atom("m0"), Vertex::atom("m1")],
        &[Simplex::new([Vertex::atom("m0"), Vertex::atom("m1")]).unwrap()],
    )
    .unwrap();
    let x = nerve_space(&edge, 2, LC).unwrap();
    let y = delta_sset(1, 2).unwrap();
    let prod = sset_product(&x, &y, LC).unwrap();
    let proj = prod.to_total.clone();
    let sections = enumerate_sset_sections(&proj, 10_000).unwrap();
    assert!(sections.len() >= 2);
    let d0: SimplicialDistribution<Rat> =
        SimplicialDistribution::deterministic(&proj, &sections[0]).unwrap();
    let d1: SimplicialDistribution<Rat> =
        SimplicialDistribution::deterministic(&proj, sections.last().unwrap()).unwrap();
    let mixed =
        SimplicialDistribution::mix(&[(d0, rat(1, 2)), (d1, rat(1, 2))]).unwrap();
    let q = to_outcome_map(&mixed).unwrap();
    let back = from_outcome_map(&prod, &q).unwrap();
    assert_eq!(back, mixed);
    assert_eq!(to_outcome_map(&back).unwrap(), q);

    println!("criterion 10 (monad suites and projection correspondence): PASS");
}

// ---------------------------------------------------------------------------
// Cross-criterion regression: the decision agrees with the brute-force
// image oracle on instances with few sections, and the pushed Hardy-style
// boolean decisions stay aligned.
// ---------------------------------------------------------------------------

#[test]
fn small_instance_image_oracle_agreement() {
    let mut rng = Rng::new(0xACCEFF);
    let mut checked = 0;
    while checked < 25 {
        let scn = sample::random_scenario(&mut rng, 3, 2).unwrap();
        if scn.global_section_count() > 8 {
            continue;
        }
        let e = sample::random_model(&scn, &mut rng).unwrap();
        let verdict = decide_scenario(&e, SC).unwrap().verdict();
        let (a, b) = scenario_lp(&e);
        let oracle = if brute_force_feasible(&a, &b) {
            Verdict::NonContextual
        } else {
            Verdict::Contextual
        };
        assert_eq!(verdict, oracle);
        // The maximal-context LP also agrees with the all-context LP here.
        assert_eq!(
            verdict,
            decide_scenario_all_contexts(&e, SC).unwrap().verdict()
        );
        checked += 1;
    }
    println!("oracle agreement on {checked} small instances: PASS");
}

#[test]
fn boolean_decisions_transport_like_rational_ones() {
    let hardy = sample::hardy_model();
    let scn = hardy.scenario().clone();
    let v1 = decide_scenario_boolean(&hardy, SC).unwrap().verdict();
    let p = eta(&scn, &hardy, CAP).unwrap();
    let v2 = decide_bundle_boolean_wrap(&p);
    let f = canonical_bundle(&scn, CAP).unwrap();
    let sd = zeta(&f, &p, 2, LC).unwrap();
    let v3 = decide_sdist_nerve_boolean(&f, &sd, 2, SC).unwrap().verdict();
    assert_eq!(v1, Verdict::Contextual);
    assert_eq!(v1, v2);
    assert_eq!(v1, v3);
    println!("boolean flavor equivalence on the Hardy support model: PASS");
}

fn decide_bundle_boolean_wrap(p: &ctxscen::bundle::BundleModel<bool>) -> Verdict {
    ctxscen::contextuality::decide_bundle_boolean(p, SC)
        .unwrap()
        .verdict()
}
