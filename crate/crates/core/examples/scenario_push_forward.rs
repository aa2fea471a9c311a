//! Push-forward of empirical models along a scenario morphism: the
//! triangle-to-square morphism whose relation collapses one square vertex
//! onto a triangle vertex.
//!
//! The pushed model copies the three surviving contexts and places the
//! remaining one on the diagonal: weight `e_{x2}(a)` at `(a, a)` and zero
//! off the diagonal.

use ctxscen::complex::{Simplex, Vertex};
use ctxscen::sample;

fn main() -> ctxscen::Result<()> {
    let morphism = sample::triangle_to_square_morphism()?;
    println!("source contexts (triangle):");
    for m in morphism.source().complex().maximal() {
        println!("  {m}");
    }
    println!("target contexts (square):");
    for m in morphism.target().complex().maximal() {
        println!("  {m}");
    }
    println!("relation:");
    for x in morphism.target().complex().vertices() {
        println!("  {x} |-> {}", morphism.relation().vertex_value(x));
    }

    let e = sample::uniform_model(morphism.source())?;
    let pushed = morphism.push_forward(&e)?;

    let ctx = Simplex::new([Vertex::atom("x2"), Vertex::atom("x3")])?;
    println!("\npushed distribution on {ctx}:");
    for s in pushed.scenario().event_sections(&ctx)? {
        println!("  {s}  ->  {}", pushed.dist(&ctx)?.weight(&s));
    }

    let plain = Simplex::new([Vertex::atom("x0"), Vertex::atom("x1")])?;
    println!("\npushed distribution on {plain} (uniform, copied through the relation):");
    for s in pushed.scenario().event_sections(&plain)? {
        println!("  {s}  ->  {}", pushed.dist(&plain)?.weight(&s));
    }
    Ok(())
}
