//! The nerve complex monad on simplicial complexes and simplicial relations
//! as its Kleisli morphisms.
//!
//! The nerve of `Σ` has the simplices of `Σ` as vertices; a family of
//! simplices spans a simplex of the nerve exactly when its union is a
//! simplex of `Σ`. Vertices of nerves are interned `Set` names, so iterating
//! the construction keeps canonical identities (a vertex of `ˆN²Σ` is a set
//! of set-vertices).

use std::collections::BTreeMap;

use crate::complex::{Complex, ComplexMap, Simplex, Vertex};
use crate::error::{Error, Result};

/// The nerve complex `ˆNΣ`.
///
/// Maximal simplices of the nerve are the face sets of maximal simplices of
/// `Σ`; this is doubly exponential in simplex size, so the cap is enforced
/// up front.
pub fn hat_n(sigma: &Complex, cap: usize) -> Result<Complex> {
    let vertices: Vec<Vertex> = sigma.simplices().map(Vertex::from_simplex).collect();
    let mut tops = Vec::new();
    for m in sigma.maximal() {
        let faces: Vec<Vertex> = sigma
            .simplices()
            .filter(|s| s.is_subset(m))
            .map(Vertex::from_simplex)
            .collect();
        if faces.len() > 25 || (1u64 << faces.len()) - 1 > cap as u64 {
            return Err(Error::CapExceeded(format!(
                "nerve families over {m} have {} members",
                faces.len()
            )));
        }
        tops.push(Simplex::new(faces)?);
    }
    Complex::close_downward(vertices, &tops, cap)
}

/// Functorial action on maps: `ˆNf(γ) = f(γ)` on set vertices.
pub fn hat_n_map(f: &ComplexMap, cap: usize) -> Result<ComplexMap> {
    let source = hat_n(f.source(), cap)?;
    let target = hat_n(f.target(), cap)?;
    let map = source
        .vertices()
        .iter()
        .map(|v| {
            let s = v.as_set().expect("nerve vertex");
            (v.clone(), Vertex::from_simplex(&f.apply(&s)))
        })
        .collect();
    ComplexMap::new(source, target, map)
}

/// The unit `δ_Σ : Σ → ˆNΣ`, `x ↦ {x}`.
pub fn nerve_unit(sigma: &Complex, cap: usize) -> Result<ComplexMap> {
    let target = hat_n(sigma, cap)?;
    let map = sigma
        .vertices()
        .iter()
        .map(|v| {
            (
                v.clone(),
                Vertex::from_simplex(&Simplex::singleton(v.clone())),
            )
        })
        .collect();
    ComplexMap::new(sigma.clone(), target, map)
}

/// The multiplication `μ_Σ : ˆN²Σ → ˆNΣ`, union of a family of simplices.
///
/// `ˆN²` is materialized, which is only feasible for small complexes (the
/// composite of type I morphisms needs it in tests only).
pub fn nerve_mult(sigma: &Complex, cap: usize) -> Result<ComplexMap> {
    let hat = hat_n(sigma, cap)?;
    let hat2 = hat_n(&hat, cap)?;
    let map = hat2
        .vertices()
        .iter()
        .map(|v| (v.clone(), mu_vertex(v)))
        .collect();
    ComplexMap::new(hat2, hat, map)
}

/// The name-level action of `μ`: a vertex of `ˆN²Σ` (a family of set
/// vertices) goes to the set vertex of the union of its members.
pub fn mu_vertex(family: &Vertex) -> Vertex {
    let members = family.as_set().expect("nerve-of-nerve vertex");
    let parts: Vec<Simplex> = members
        .vertices()
        .iter()
        .map(|v| v.as_set().expect("set vertex"))
        .collect();
    Vertex::from_simplex(&Simplex::union_all(parts.iter()).expect("nonempty family"))
}

/// A simplicial relation `π : Σ′ → Σ`, i.e. a complex map `Σ′ → ˆNΣ`:
/// each vertex of `Σ′` is assigned a simplex of `Σ` such that unions over
/// simplices of `Σ′` stay simplices of `Σ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplicialRelation {
    source: Complex,
    target: Complex,
    assignment: BTreeMap<Vertex, Simplex>,
}

impl SimplicialRelation {
    pub fn new(
        source: Complex,
        target: Complex,
        assignment: BTreeMap<Vertex, Simplex>,
    ) -> Result<Self> {
        for v in source.vertices() {
            let Some(s) = assignment.get(v) else {
                return Err(Error::InvalidMorphism(format!("vertex {v} unassigned")));
            };
            if !target.contains(s) {
                return Err(Error::InvalidMorphism(format!(
                    "value {s} of {v} is not a simplex of the target"
                )));
            }
        }
        let rel = SimplicialRelation {
            source,
            target,
            assignment,
        };
        // Unions over maximal simplices suffice: faces give sub-unions.
        for m in rel.source.maximal() {
            let u = rel.apply(m);
            if !rel.target.contains(&u) {
                return Err(Error::InvalidMorphism(format!(
                    "relation image {u} of {m} is not a simplex"
                )));
            }
        }
        Ok(rel)
    }

    /// The relation `δ ∘ f` of a plain complex map.
    pub fn from_map(f: &ComplexMap) -> Self {
        let assignment = f
            .vertex_map()
            .iter()
            .map(|(v, w)| (v.clone(), Simplex::singleton(w.clone())))
            .collect();
        SimplicialRelation {
            source: f.source().clone(),
            target: f.target().clone(),
            assignment,
        }
    }

    /// The identity relation `δ_Σ`.
    pub fn delta(sigma: &Complex) -> Self {
        SimplicialRelation::from_map(&ComplexMap::identity(sigma))
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn vertex_value(&self, v: &Vertex) -> &Simplex {
        &self.assignment[v]
    }

    /// The induced simplex function `π̄(σ′) = ∪_{x′ ∈ σ′} π(x′)`.
    pub fn apply(&self, s: &Simplex) -> Simplex {
        Simplex::union_all(s.vertices().iter().map(|v| &self.assignment[v]))
            .expect("nonempty simplex")
    }

    /// Fallible variant that validates membership of `s` first.
    pub fn apply_checked(&self, s: &Simplex) -> Result<Simplex> {
        if !self.source.contains(s) {
            return Err(Error::InvalidSimplex(format!(
                "{s} is not a simplex of the relation source"
            )));
        }
        Ok(self.apply(s))
    }

    /// Kleisli composition: for `π : Σ′ → Σ` and `π′ : Σ″ → Σ′` the
    /// composite `π ⋄ π′ : Σ″ → Σ` sends `x″` to `π̄(π′(x″))`.
    pub fn kleisli(&self, inner: &SimplicialRelation) -> Result<SimplicialRelation> {
        if inner.target != self.source {
            return Err(Error::InvalidMorphism(
                "kleisli composition mismatch".into(),
            ));
        }
        let assignment = inner
            .assignment
            .iter()
            .map(|(v, s)| (v.clone(), self.apply(s)))
            .collect();
        SimplicialRelation::new(inner.source.clone(), self.target.clone(), assignment)
    }

    /// Realizes the relation as a complex map into the materialized nerve.
    pub fn to_nerve_map(&self, cap: usize) -> Result<ComplexMap> {
        let nerve = hat_n(&self.target, cap)?;
        let map = self
            .assignment
            .iter()
            .map(|(v, s)| (v.clone(), Vertex::from_simplex(s)))
            .collect();
        ComplexMap::new(self.source.clone(), nerve, map)
    }

    /// Recovers a relation from a complex map into a nerve.
    pub fn from_nerve_map(f: &ComplexMap, base: &Complex) -> Result<Self> {
        let assignment: BTreeMap<Vertex, Simplex> = f
            .vertex_map()
            .iter()
            .map(|(v, w)| {
                w.as_set()
                    .ok_or_else(|| Error::InvalidMorphism(format!("{w} is not a nerve vertex")))
                    .map(|s| (v.clone(), s))
            })
            .collect::<Result<_>>()?;
        SimplicialRelation::new(f.source().clone(), base.clone(), assignment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::DEFAULT_SIMPLEX_CAP as CAP;
    use std::collections::BTreeSet;

    fn v(l: &str) -> Vertex {
        Vertex::atom(l)
    }

    fn sx(ls: &[&str]) -> Simplex {
        Simplex::new(ls.iter().map(|l| v(l))).unwrap()
    }

    fn edge() -> Complex {
        Complex::from_maximal([v("x"), v("y")], &[sx(&["x", "y"])]).unwrap()
    }

    fn point() -> Complex {
        Complex::from_maximal([v("v")], &[]).unwrap()
    }

    fn triangle() -> Complex {
        Complex::from_maximal(
            [v("x0"), v("x1"), v("x2")],
            &[sx(&["x0", "x1"]), sx(&["x1", "x2"]), sx(&["x2", "x0"])],
        )
        .unwrap()
    }

    fn square() -> Complex {
        Complex::from_maximal(
            [v("x0"), v("x1"), v("x2"), v("x3")],
            &[
                sx(&["x0", "x1"]),
                sx(&["x3", "x0"]),
                sx(&["x1", "x2"]),
                sx(&["x2", "x3"]),
            ],
        )
        .unwrap()
    }

    /// π : □ → △ with x2, x3 ↦ x2, as a map and as a relation.
    pub(crate) fn square_to_triangle() -> ComplexMap {
        let map = BTreeMap::from([
            (v("x0"), v("x0")),
            (v("x1"), v("x1")),
            (v("x2"), v("x2")),
            (v("x3"), v("x2")),
        ]);
        ComplexMap::new(square(), triangle(), map).unwrap()
    }

    #[test]
    fn nerve_sizes_match_hand_counts() {
        let pt = hat_n(&point(), CAP).unwrap();
        assert_eq!(pt.vertices().len(), 1);
        assert_eq!(pt.simplex_count(), 1);

        // Edge: 3 simplices, so 3 vertices; every family unions into the
        // edge, so all 7 nonempty subsets appear.
        let n = hat_n(&edge(), CAP).unwrap();
        assert_eq!(n.vertices().len(), 3);
        assert_eq!(n.simplex_count(), 7);
    }

    #[test]
    fn unit_and_mult_laws_on_the_edge_complex() {
        let e = edge();
        let delta = nerve_unit(&e, CAP).unwrap();
        let mu = nerve_mult(&e, CAP).unwrap();

        // μ({{x},{x,y}}) = {x,y}
        let family = Vertex::from_simplex(
            &Simplex::new([
                Vertex::from_simplex(&sx(&["x"])),
                Vertex::from_simplex(&sx(&["x", "y"])),
            ])
            .unwrap(),
        );
        assert_eq!(mu.apply_vertex(&family), Vertex::from_simplex(&sx(&["x", "y"])));

        // μ ∘ δ_{ˆNΣ} = id and μ ∘ ˆNδ_Σ = id  (checked as maps).
        let hat = hat_n(&e, CAP).unwrap();
        let delta_hat = nerve_unit(&hat, CAP).unwrap();
        let left = delta_hat.then(&mu).unwrap();
        assert_eq!(left, ComplexMap::identity(&hat));
        let hat_delta = hat_n_map(&delta, CAP).unwrap();
        let right = hat_delta.then(&mu).unwrap();
        assert_eq!(right, ComplexMap::identity(&hat));
    }

    /// All complexes on subsets of the given vertex labels, with every
    /// simplex at most `max_size` vertices (kept small so nerves stay
    /// materializable).
    pub(crate) fn all_small_complexes(labels: &[&str], max_size: usize) -> Vec<Complex> {
        let vs: Vec<Vertex> = labels.iter().map(|l| v(l)).collect();
        // Candidate simplices of size 2..=max_size over the fixed vertex set.
        let mut candidates: Vec<Simplex> = Vec::new();
        let n = vs.len();
        for mask in 1u32..(1 << n) {
            let members: Vec<Vertex> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| vs[i].clone())
                .collect();
            if members.len() >= 2 && members.len() <= max_size {
                candidates.push(Simplex::new(members).unwrap());
            }
        }
        let mut out = Vec::new();
        for mask in 0u32..(1 << candidates.len()) {
            let chosen: Vec<Simplex> = (0..candidates.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| candidates[i].clone())
                .collect();
            // Downward closure within the candidate set.
            let set: BTreeSet<&Simplex> = chosen.iter().collect();
            let closed = chosen.iter().all(|s| {
                candidates
                    .iter()
                    .filter(|c| c.is_subset(s) && c.len() >= 2)
                    .all(|c| set.contains(c))
            });
            if !closed {
                continue;
            }
            out.push(Complex::from_maximal(vs.clone(), &chosen).unwrap());
        }
        out
    }

    #[test]
    fn monad_laws_exhaustively_on_small_complexes() {
        // Unit laws vertexwise on every complex with ≤ 4 vertices (edges
        // only, so that ˆN² stays small); associativity pointwise on the
        // vertices of ˆN³ (the simplices of ˆN²).
        let mut complexes = all_small_complexes(&["a", "b", "c", "d"], 2);
        complexes.extend(all_small_complexes(&["a", "b", "c"], 3));
        assert!(complexes.len() > 40);
        for c in complexes {
            if c.simplex_count() > 9 {
                continue;
            }
            let hat = match hat_n(&c, 100_000) {
                Ok(h) => h,
                Err(_) => continue,
            };
            // Unit laws on vertex names.
            for s in c.simplices() {
                let set = Vertex::from_simplex(s);
                // μ(δ_{ˆN}(v)) = v
                let delta_hat_v = Vertex::from_simplex(&Simplex::singleton(set.clone()));
                assert_eq!(mu_vertex(&delta_hat_v), set);
                // μ(ˆNδ(v)) = v: ˆNδ sends {x1..xk} to {{x1}..{xk}}.
                let singletons = Simplex::new(
                    s.vertices()
                        .iter()
                        .map(|x| Vertex::from_simplex(&Simplex::singleton(x.clone()))),
                )
                .unwrap();
                assert_eq!(mu_vertex(&Vertex::from_simplex(&singletons)), set);
            }
            // Associativity on simplices of ˆN² when it materializes.
            let hat2 = match hat_n(&hat, 100_000) {
                Ok(h) => h,
                Err(_) => continue,
            };
            for family in hat2.simplices() {
                // family: a simplex of ˆN², i.e. a vertex of ˆN³.
                let as_vertex = Vertex::from_simplex(family);
                // μ ∘ μ_{ˆN}: flatten the outer layer, then union.
                let lhs = mu_vertex(&mu_vertex(&as_vertex));
                // μ ∘ ˆNμ: union each member family first.
                let mapped = Simplex::new(family.vertices().iter().map(mu_vertex)).unwrap();
                let rhs = mu_vertex(&Vertex::from_simplex(&mapped));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn relations_compose_and_apply() {
        let pi = SimplicialRelation::from_map(&square_to_triangle());
        // π̄({x2, x3}) = {x2}
        assert_eq!(pi.apply(&sx(&["x2", "x3"])), sx(&["x2"]));

        // δ-relation from a plain map acts as the original image map.
        for s in square().simplices() {
            assert_eq!(pi.apply(s), square_to_triangle().apply(s));
        }

        // Constant relation always returns its value.
        let constant = SimplicialRelation::new(
            square(),
            triangle(),
            square()
                .vertices()
                .iter()
                .map(|x| (x.clone(), sx(&["x0", "x1"])))
                .collect(),
        )
        .unwrap();
        for s in square().simplices() {
            assert_eq!(constant.apply(s), sx(&["x0", "x1"]));
        }

        // Kleisli units.
        let delta_sq = SimplicialRelation::delta(&square());
        let delta_tri = SimplicialRelation::delta(&triangle());
        assert_eq!(pi.kleisli(&delta_sq).unwrap(), pi);
        assert_eq!(delta_tri.kleisli(&pi).unwrap(), pi);

        // Composite with a path collapsing x3 onto {x2, x3}.
        let path = Complex::from_maximal(
            [v("p0"), v("p1")],
            &[sx(&["p0", "p1"])],
        )
        .unwrap();
        let pi_prime = SimplicialRelation::new(
            path,
            square(),
            BTreeMap::from([(v("p0"), sx(&["x2"])), (v("p1"), sx(&["x2", "x3"]))]),
        )
        .unwrap();
        let composed = pi.kleisli(&pi_prime).unwrap();
        assert_eq!(composed.vertex_value(&v("p1")), &sx(&["x2"]));
        // (π ⋄ π′)‾ = π̄ ∘ π̄′ exhaustively on the source.
        for s in pi_prime.source().simplices() {
            assert_eq!(composed.apply(s), pi.apply(&pi_prime.apply(s)));
        }
    }

    #[test]
    fn nerve_map_round_trip() {
        let pi = SimplicialRelation::from_map(&square_to_triangle());
        let as_map = pi.to_nerve_map(CAP).unwrap();
        let back = SimplicialRelation::from_nerve_map(&as_map, &triangle()).unwrap();
        assert_eq!(back, pi);
    }

    #[test]
    fn hat_n_of_bundle_like_map_keeps_flags() {
        // The identity is a bundle scenario; so is its nerve image.
        let t = triangle();
        let id = ComplexMap::identity(&t);
        let nf = hat_n_map(&id, CAP).unwrap();
        assert!(nf.classify().bundle_scenario());
    }
}
