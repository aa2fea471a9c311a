//! The nerve complex monad: `ˆNΣ`, its unit and multiplication, and
//! simplicial relations composed in the Kleisli style.

use std::collections::BTreeMap;

use ctxscen::complex::{Complex, Simplex, Vertex, DEFAULT_SIMPLEX_CAP};
use ctxscen::nerve::{hat_n, nerve_mult, nerve_unit, SimplicialRelation};
use ctxscen::sample;

fn main() -> ctxscen::Result<()> {
    let edge = Complex::from_maximal(
        [Vertex::atom("x"), Vertex::atom("y")],
        &[Simplex::new([Vertex::atom("x"), Vertex::atom("y")])?],
    )?;
    let nerve = hat_n(&edge, DEFAULT_SIMPLEX_CAP)?;
    println!(
        "edge complex: {} simplices; nerve: {} vertices, {} simplices",
        edge.simplex_count(),
        nerve.vertices().len(),
        nerve.simplex_count()
    );

    let delta = nerve_unit(&edge, DEFAULT_SIMPLEX_CAP)?;
    for x in edge.vertices() {
        println!("delta({x}) = {}", delta.apply_vertex(x));
    }
    let mu = nerve_mult(&edge, DEFAULT_SIMPLEX_CAP)?;
    println!(
        "mu acts on {} nerve-of-nerve vertices (unions of families)",
        mu.source().vertices().len()
    );

    // The square-to-triangle relation and a Kleisli composite.
    let pi = SimplicialRelation::from_map(&{
        let map: BTreeMap<Vertex, Vertex> = [
            ("x0", "x0"),
            ("x1", "x1"),
            ("x2", "x2"),
            ("x3", "x2"),
        ]
        .into_iter()
        .map(|(a, b)| (Vertex::atom(a), Vertex::atom(b)))
        .collect();
        ctxscen::ComplexMap::new(sample::square(), sample::triangle(), map)?
    });
    println!("\nrelation sq -> triangle, applied to the square contexts:");
    for sigma in sample::square().maximal() {
        println!("  pi({sigma}) = {}", pi.apply(sigma));
    }

    let path = Complex::from_maximal(
        [Vertex::atom("p0"), Vertex::atom("p1")],
        &[Simplex::new([Vertex::atom("p0"), Vertex::atom("p1")])?],
    )?;
    let collapse = SimplicialRelation::new(
        path.clone(),
        sample::square(),
        [
            (Vertex::atom("p0"), Simplex::new([Vertex::atom("x2")])?),
            (
                Vertex::atom("p1"),
                Simplex::new([Vertex::atom("x2"), Vertex::atom("x3")])?,
            ),
        ]
        .into_iter()
        .collect(),
    )?;
    let composite = pi.kleisli(&collapse)?;
    println!("\nkleisli composite path -> triangle:");
    for v in path.vertices() {
        println!("  {v} |-> {}", composite.vertex_value(v));
    }
    Ok(())
}
