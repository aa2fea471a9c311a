//! The two faces of the bundle-scenario conditions: direct star/edge checks
//! versus right-lifting properties against cofaces and codegeneracies.

use std::collections::BTreeMap;

use ctxscen::complex::{
    classify_via_lifting, lifting_check, Complex, ComplexMap, Monotone, Simplex, Vertex,
};
use ctxscen::rng::Rng;
use ctxscen::sample;

fn main() -> ctxscen::Result<()> {
    // The fold map: an edge collapsed onto a point. Surjective and locally
    // surjective, but two fiber vertices form an edge.
    let edge = Complex::from_maximal(
        [Vertex::atom("a"), Vertex::atom("b")],
        &[Simplex::new([Vertex::atom("a"), Vertex::atom("b")])?],
    )?;
    let point = Complex::from_maximal([Vertex::atom("v")], &[])?;
    let fold = ComplexMap::new(
        edge,
        point,
        BTreeMap::from([
            (Vertex::atom("a"), Vertex::atom("v")),
            (Vertex::atom("b"), Vertex::atom("v")),
        ]),
    )?;
    let direct = fold.classify();
    let lifted = classify_via_lifting(&fold)?;
    println!("fold map flags (direct):  {direct:?}");
    println!("fold map flags (lifting): {lifted:?}");

    // The witnessing square: against s^0 no diagonal exists.
    let theta = Monotone::codegeneracy(0, 0);
    let lift = lifting_check(
        &fold,
        &theta,
        &[Vertex::atom("a"), Vertex::atom("b")],
        &[Vertex::atom("v")],
    )?;
    println!("lift against s^0: {lift:?}");

    // Random maps keep the two characterizations in agreement.
    let mut rng = Rng::new(12);
    let mut agreements = 0;
    for _ in 0..30 {
        let source = sample::random_complex(&mut rng, 5, 3, "s");
        let target = sample::random_complex(&mut rng, 5, 3, "t");
        if let Some(map) = sample::random_complex_map(&source, &target, &mut rng, 10) {
            assert_eq!(map.classify(), classify_via_lifting(&map)?);
            agreements += 1;
        }
    }
    println!("agreement on {agreements} random maps: ok");
    Ok(())
}
