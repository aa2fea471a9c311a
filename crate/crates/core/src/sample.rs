//! Named instances and seeded generators: the triangle/square pair, the PR
//! box, Hardy-style supports, and random scenarios, models, maps, and
//! morphisms for law checking and batch studies.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{Complex, ComplexMap, Outcome, Simplex, Vertex};
use crate::dist::Dist;
use crate::error::Result;
use crate::nerve::SimplicialRelation;
use crate::rng::Rng;
use crate::scenario::{EmpiricalModel, Scenario, SectionOver, ScenarioMorphism};
use crate::semiring::{Rat, Semiring};

pub fn z2() -> Vec<Outcome> {
    vec![Outcome::new("0"), Outcome::new("1")]
}

fn atom(l: &str) -> Vertex {
    Vertex::atom(l)
}

fn sx(ls: &[&str]) -> Simplex {
    Simplex::new(ls.iter().map(|l| atom(l))).expect("nonempty")
}

/// The hollow triangle with maximal contexts {x0,x1}, {x1,x2}, {x2,x0}.
pub fn triangle() -> Complex {
    Complex::from_maximal(
        [atom("x0"), atom("x1"), atom("x2")],
        &[sx(&["x0", "x1"]), sx(&["x1", "x2"]), sx(&["x2", "x0"])],
    )
    .expect("triangle")
}

/// The four-edge square with maximal contexts {x0,x1}, {x3,x0}, {x1,x2}, {x2,x3}.
pub fn square() -> Complex {
    Complex::from_maximal(
        [atom("x0"), atom("x1"), atom("x2"), atom("x3")],
        &[
            sx(&["x0", "x1"]),
            sx(&["x3", "x0"]),
            sx(&["x1", "x2"]),
            sx(&["x2", "x3"]),
        ],
    )
    .expect("square")
}

pub fn triangle_z2() -> Scenario {
    Scenario::uniform_outcomes(triangle(), &z2()).expect("scenario")
}

pub fn square_z2() -> Scenario {
    Scenario::uniform_outcomes(square(), &z2()).expect("scenario")
}

/// The morphism `(△, Z₂) → (□, Z₂)`: the relation collapses x3 onto x2 and
/// every outcome map is the identity on Z₂.
pub fn triangle_to_square_morphism() -> Result<ScenarioMorphism> {
    let source = triangle_z2();
    let target = square_z2();
    let pi_map = BTreeMap::from([
        (atom("x0"), atom("x0")),
        (atom("x1"), atom("x1")),
        (atom("x2"), atom("x2")),
        (atom("x3"), atom("x2")),
    ]);
    let pi = SimplicialRelation::from_map(&ComplexMap::new(
        target.complex().clone(),
        source.complex().clone(),
        pi_map,
    )?);
    let mut alpha = BTreeMap::new();
    for x in target.complex().vertices() {
        let mut table = BTreeMap::new();
        for s in source.event_sections(pi.vertex_value(x))? {
            let o = s.values()[0].clone();
            table.insert(s, o);
        }
        alpha.insert(x.clone(), table);
    }
    ScenarioMorphism::new(source, target, pi, alpha)
}

/// Uniform distribution on every context.
pub fn uniform_model(scn: &Scenario) -> Result<EmpiricalModel<Rat>> {
    let mut maximal = BTreeMap::new();
    for m in scn.complex().maximal() {
        let sections = scn.event_sections(m)?;
        let w = Rat::new(1, sections.len() as i64)?;
        maximal.insert(m.clone(), Dist::new(sections.into_iter().map(|s| (s, w.clone())))?);
    }
    EmpiricalModel::from_maximal(scn.clone(), maximal)
}

/// The PR box on `(□, Z₂)`: perfectly anti-correlated on {x2,x3} and
/// perfectly correlated on the other three contexts, uniform marginals.
pub fn pr_box() -> EmpiricalModel<Rat> {
    let scn = square_z2();
    let anti = sx(&["x2", "x3"]);
    let mut maximal = BTreeMap::new();
    for m in scn.complex().maximal() {
        let want_parity = *m == anti;
        let pairs: Vec<(SectionOver, Rat)> = scn
            .event_sections(m)
            .expect("sections")
            .into_iter()
            .filter(|s| {
                let parity = s.values()[0] != s.values()[1];
                parity == want_parity
            })
            .map(|s| (s, Rat::new(1, 2).expect("1/2")))
            .collect();
        maximal.insert(m.clone(), Dist::new(pairs).expect("pr dist"));
    }
    EmpiricalModel::from_maximal(scn, maximal).expect("pr box")
}

/// A Hardy-style possibilistic model on a four-cycle of contexts
/// {a0,b0}, {a0,b1}, {a1,b0}, {a1,b1}: the all-zero row is possible in the
/// first context, forbidden in the middle two, and 11 is forbidden in the
/// last.
pub fn hardy_model() -> EmpiricalModel<bool> {
    let complex = Complex::from_maximal(
        [atom("a0"), atom("a1"), atom("b0"), atom("b1")],
        &[
            sx(&["a0", "b0"]),
            sx(&["a0", "b1"]),
            sx(&["a1", "b0"]),
            sx(&["a1", "b1"]),
        ],
    )
    .expect("hardy complex");
    let scn = Scenario::uniform_outcomes(complex, &z2()).expect("hardy scenario");
    let forbidden = |ctx: &Simplex, s: &SectionOver| -> bool {
        let zero = Outcome::new("0");
        let one = Outcome::new("1");
        let a_val = |name: &str| s.value_at(&atom(name)).expect("in context").clone();
        if *ctx == sx(&["a0", "b1"]) {
            a_val("a0") == zero && a_val("b1") == zero
        } else if *ctx == sx(&["a1", "b0"]) {
            a_val("a1") == zero && a_val("b0") == zero
        } else if *ctx == sx(&["a1", "b1"]) {
            a_val("a1") == one && a_val("b1") == one
        } else {
            false
        }
    };
    let mut maximal = BTreeMap::new();
    for m in scn.complex().maximal() {
        let pairs: Vec<(SectionOver, bool)> = scn
            .event_sections(m)
            .expect("sections")
            .into_iter()
            .filter(|s| !forbidden(m, s))
            .map(|s| (s, true))
            .collect();
        maximal.insert(m.clone(), Dist::new(pairs).expect("support dist"));
    }
    EmpiricalModel::from_maximal(scn, maximal).expect("hardy model")
}

/// All global outcome assignments of a scenario, product order.
pub fn global_assignments(scn: &Scenario) -> Vec<BTreeMap<Vertex, Outcome>> {
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
    out
}

/// The deterministic model of a global assignment.
pub fn deterministic_model<R: Semiring>(
    scn: &Scenario,
    global: &BTreeMap<Vertex, Outcome>,
) -> Result<EmpiricalModel<R>> {
    let mut dists = BTreeMap::new();
    for sigma in scn.complex().simplices() {
        let values: Vec<Outcome> = sigma.vertices().iter().map(|v| global[v].clone()).collect();
        dists.insert(sigma.clone(), Dist::point(SectionOver::new(sigma.clone(), values)?));
    }
    EmpiricalModel::new(scn.clone(), dists)
}

/// Random weights summing to one over `n` slots (all nonzero).
fn random_weights(rng: &mut Rng, n: usize) -> Vec<Rat> {
    let raw: Vec<u64> = (0..n).map(|_| 1 + rng.below(6)).collect();
    let total: u64 = raw.iter().sum();
    raw.into_iter()
        .map(|w| Rat::new(w as i64, total as i64).expect("weight"))
        .collect()
}

/// Random mixture of deterministic models (noncontextual by construction).
pub fn random_section_mixture(scn: &Scenario, rng: &mut Rng) -> Result<EmpiricalModel<Rat>> {
    let globals = global_assignments(scn);
    let k = 1 + rng.below(3.min(globals.len() as u64)) as usize;
    let chosen: Vec<&BTreeMap<Vertex, Outcome>> =
        (0..k).map(|_| rng.pick(&globals)).collect();
    let ws = random_weights(rng, k);
    let parts: Vec<(EmpiricalModel<Rat>, Rat)> = chosen
        .into_iter()
        .zip(ws)
        .map(|(g, w)| Ok((deterministic_model(scn, g)?, w)))
        .collect::<Result<_>>()?;
    EmpiricalModel::mix(&parts)
}

/// Product of independent per-vertex distributions.
pub fn random_product_model(scn: &Scenario, rng: &mut Rng) -> Result<EmpiricalModel<Rat>> {
    let mut vertex_dists: BTreeMap<Vertex, Dist<Outcome, Rat>> = BTreeMap::new();
    for v in scn.complex().vertices() {
        let os = scn.outcomes_at(v);
        let ws = random_weights(rng, os.len());
        vertex_dists.insert(
            v.clone(),
            Dist::new(os.iter().cloned().zip(ws))?,
        );
    }
    let mut maximal = BTreeMap::new();
    for m in scn.complex().maximal() {
        let mut pairs: Vec<(SectionOver, Rat)> = Vec::new();
        for s in scn.event_sections(m)? {
            let mut w = Rat::one();
            for (v, o) in m.vertices().iter().zip(s.values()) {
                w = w.mul(&vertex_dists[v].weight(o));
            }
            pairs.push((s, w));
        }
        maximal.insert(m.clone(), Dist::new(pairs)?);
    }
    EmpiricalModel::from_maximal(scn.clone(), maximal)
}

/// Finds a cycle in the 1-skeleton, as an edge list, if one exists.
fn find_cycle(complex: &Complex) -> Option<Vec<Simplex>> {
    let mut adjacency: BTreeMap<Vertex, Vec<(Vertex, Simplex)>> = BTreeMap::new();
    for e in complex.simplices().filter(|s| s.len() == 2) {
        let (a, b) = (e.vertices()[0].clone(), e.vertices()[1].clone());
        adjacency.entry(a.clone()).or_default().push((b.clone(), e.clone()));
        adjacency.entry(b).or_default().push((a, e.clone()));
    }
    // DFS keeping parent edges; the first back edge closes a cycle.
    let mut parent: BTreeMap<Vertex, Option<(Vertex, Simplex)>> = BTreeMap::new();
    let path_to_root = |parent: &BTreeMap<Vertex, Option<(Vertex, Simplex)>>, from: &Vertex| {
        let mut u = from.clone();
        let mut seen = vec![u.clone()];
        while let Some(Some((p, _))) = parent.get(&u) {
            u = p.clone();
            seen.push(u.clone());
        }
        seen
    };
    for start in complex.vertices() {
        if parent.contains_key(start) {
            continue;
        }
        let mut stack = vec![(start.clone(), None::<(Vertex, Simplex)>)];
        while let Some((v, from)) = stack.pop() {
            if parent.contains_key(&v) {
                continue;
            }
            parent.insert(v.clone(), from.clone());
            for (w, e) in adjacency.get(&v).cloned().into_iter().flatten() {
                if let Some((_, from_edge)) = &from {
                    if e == *from_edge {
                        continue;
                    }
                }
                if parent.contains_key(&w) {
                    // Close the cycle: walk v and w up to their meeting point.
                    let pv = path_to_root(&parent, &v);
                    let pw = path_to_root(&parent, &w);
                    let meet = pv.iter().find(|u| pw.contains(u))?.clone();
                    let mut cycle: Vec<Simplex> = vec![e.clone()];
                    for endpoint in [&v, &w] {
                        let mut u = endpoint.clone();
                        while u != meet {
                            match parent.get(&u) {
                                Some(Some((p, pe))) => {
                                    cycle.push(pe.clone());
                                    u = p.clone();
                                }
                                _ => break,
                            }
                        }
                    }
                    return Some(cycle);
                }
                stack.push((w, Some((v.clone(), e))));
            }
        }
    }
    None
}

/// XOR model supported on the first two outcomes of each vertex: vertices
/// uniform, cycle edges correlated with random parities, other edges
/// independent. Only valid on one-dimensional scenarios.
pub fn random_xor_model(scn: &Scenario, rng: &mut Rng) -> Result<Option<EmpiricalModel<Rat>>> {
    if scn.complex().dim() != 1 {
        return Ok(None);
    }
    if scn
        .complex()
        .vertices()
        .iter()
        .any(|v| scn.outcomes_at(v).len() < 2)
    {
        return Ok(None);
    }
    let Some(cycle) = find_cycle(scn.complex()) else {
        return Ok(None);
    };
    let parities: BTreeMap<&Simplex, bool> =
        cycle.iter().map(|e| (e, rng.chance(1, 2))).collect();
    let half = Rat::new(1, 2)?;
    let quarter = Rat::new(1, 4)?;
    let mut maximal = BTreeMap::new();
    for m in scn.complex().maximal() {
        let mut pairs: Vec<(SectionOver, Rat)> = Vec::new();
        if m.len() == 1 {
            let v = &m.vertices()[0];
            for (i, o) in scn.outcomes_at(v).iter().take(2).enumerate() {
                let _ = i;
                pairs.push((SectionOver::new(m.clone(), vec![o.clone()])?, half.clone()));
            }
        } else {
            let (a, b) = (&m.vertices()[0], &m.vertices()[1]);
            let oa: Vec<&Outcome> = scn.outcomes_at(a).iter().take(2).collect();
            let ob: Vec<&Outcome> = scn.outcomes_at(b).iter().take(2).collect();
            for (i, x) in oa.iter().enumerate() {
                for (j, y) in ob.iter().enumerate() {
                    let w = match parities.get(m) {
                        Some(parity) => {
                            if (i != j) == *parity {
                                half.clone()
                            } else {
                                continue;
                            }
                        }
                        None => quarter.clone(),
                    };
                    pairs.push((
                        SectionOver::new(m.clone(), vec![(*x).clone(), (*y).clone()])?,
                        w,
                    ));
                }
            }
        }
        maximal.insert(m.clone(), Dist::new(pairs)?);
    }
    Ok(Some(EmpiricalModel::from_maximal(scn.clone(), maximal)?))
}

/// A random non-signaling model: a convex mixture of a section mixture, a
/// product model, and (on graph scenarios with a cycle) an XOR component
/// that is frequently contextual.
pub fn random_model(scn: &Scenario, rng: &mut Rng) -> Result<EmpiricalModel<Rat>> {
    let mut parts: Vec<EmpiricalModel<Rat>> = vec![random_section_mixture(scn, rng)?];
    if rng.chance(1, 2) {
        parts.push(random_product_model(scn, rng)?);
    }
    if let Some(xor) = random_xor_model(scn, rng)? {
        // Give the contextual component the lion's share most of the time.
        if rng.chance(4, 5) {
            parts = vec![xor];
        } else {
            parts.push(xor);
        }
    }
    let ws = random_weights(rng, parts.len());
    EmpiricalModel::mix(&parts.into_iter().zip(ws).collect::<Vec<_>>())
}

/// Random boolean model: the support of a random rational model, or a
/// support-restricted section family.
pub fn random_boolean_model(scn: &Scenario, rng: &mut Rng) -> Result<EmpiricalModel<bool>> {
    let rational = random_model(scn, rng)?;
    let mut dists = BTreeMap::new();
    for (sigma, d) in rational.dists() {
        dists.insert(
            sigma.clone(),
            Dist::new(d.support().map(|s| (s.clone(), true)))?,
        );
    }
    EmpiricalModel::new(scn.clone(), dists)
}

/// Random complex on up to `max_vertices` vertices with simplices of at most
/// `max_size` vertices.
pub fn random_complex(rng: &mut Rng, max_vertices: u64, max_size: u64, prefix: &str) -> Complex {
    let n = 1 + rng.below(max_vertices);
    let vs: Vec<Vertex> = (0..n).map(|i| atom(&format!("{prefix}{i}"))).collect();
    let mut tops: Vec<Simplex> = Vec::new();
    let attempts = 1 + rng.below(2 * n);
    for _ in 0..attempts {
        let size = (2 + rng.below(max_size.saturating_sub(1).max(1))).min(n);
        let mut members: BTreeSet<Vertex> = BTreeSet::new();
        for _ in 0..size {
            members.insert(vs[rng.below(n) as usize].clone());
        }
        if members.len() >= 2 {
            tops.push(Simplex::new(members).expect("nonempty"));
        }
    }
    Complex::from_maximal(vs, &tops).expect("random complex")
}

/// Random simplicial map between two complexes, if one exists among the
/// sampled vertex assignments.
pub fn random_complex_map(
    source: &Complex,
    target: &Complex,
    rng: &mut Rng,
    attempts: usize,
) -> Option<ComplexMap> {
    for _ in 0..attempts {
        let assignment: BTreeMap<Vertex, Vertex> = source
            .vertices()
            .iter()
            .map(|v| {
                let w = target.vertices()[rng.below(target.vertices().len() as u64) as usize].clone();
                (v.clone(), w)
            })
            .collect();
        if let Ok(map) = ComplexMap::new(source.clone(), target.clone(), assignment) {
            return Some(map);
        }
    }
    // Constant maps always work.
    let w = target.vertices()[rng.below(target.vertices().len() as u64) as usize].clone();
    let assignment = source
        .vertices()
        .iter()
        .map(|v| (v.clone(), w.clone()))
        .collect();
    ComplexMap::new(source.clone(), target.clone(), assignment).ok()
}

/// Random scenario with 2..=max outcomes per vertex; one-dimensional half of
/// the time so XOR components stay available.
pub fn random_scenario(rng: &mut Rng, max_vertices: u64, max_outcomes: u64) -> Result<Scenario> {
    let max_size = if rng.chance(1, 2) { 2 } else { 3 };
    let complex = random_complex(rng, max_vertices, max_size, "v");
    let mut outcomes = BTreeMap::new();
    for v in complex.vertices() {
        let k = 2 + rng.below(max_outcomes.saturating_sub(1).max(1));
        outcomes.insert(
            v.clone(),
            (0..k).map(|i| Outcome::new(&i.to_string())).collect(),
        );
    }
    Scenario::new(complex, outcomes)
}

/// Random simplicial relation `target_complex → ˆN(source_complex)`.
pub fn random_relation(
    from: &Complex,
    to: &Complex,
    rng: &mut Rng,
    attempts: usize,
) -> Result<SimplicialRelation> {
    let to_simplices: Vec<Simplex> = to.simplices().cloned().collect();
    for _ in 0..attempts {
        let assignment: BTreeMap<Vertex, Simplex> = from
            .vertices()
            .iter()
            .map(|v| (v.clone(), rng.pick(&to_simplices).clone()))
            .collect();
        if let Ok(rel) = SimplicialRelation::new(from.clone(), to.clone(), assignment) {
            return Ok(rel);
        }
    }
    // The constant relation onto a fixed simplex always closes up.
    let constant = rng.pick(&to_simplices).clone();
    let assignment = from
        .vertices()
        .iter()
        .map(|v| (v.clone(), constant.clone()))
        .collect();
    SimplicialRelation::new(from.clone(), to.clone(), assignment)
}

/// Random scenario morphism `source → target` (random relation plus random
/// vertexwise outcome maps).
pub fn random_morphism(
    source: &Scenario,
    target: &Scenario,
    rng: &mut Rng,
) -> Result<ScenarioMorphism> {
    let relation = random_relation(target.complex(), source.complex(), rng, 20)?;
    let mut alpha = BTreeMap::new();
    for x in target.complex().vertices() {
        let sections = source.event_sections(relation.vertex_value(x))?;
        let os = target.outcomes_at(x);
        let table: BTreeMap<SectionOver, Outcome> = sections
            .into_iter()
            .map(|s| {
                let o = os[rng.below(os.len() as u64) as usize].clone();
                (s, o)
            })
            .collect();
        alpha.insert(x.clone(), table);
    }
    ScenarioMorphism::new(source.clone(), target.clone(), relation, alpha)
}

/// Random endomorphism of one scenario.
pub fn random_endomorphism(scn: &Scenario, rng: &mut Rng) -> Result<ScenarioMorphism> {
    random_morphism(scn, scn, rng)
}
