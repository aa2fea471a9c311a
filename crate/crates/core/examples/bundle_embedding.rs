//! Canonical bundles and the embedding of scenarios into bundle scenarios:
//! builds the outcome bundle of the square, transports the PR box through
//! η, and pushes it along an embedded morphism.

use ctxscen::bundle::{canonical_bundle, embed_scenario, eta, eta_inverse, push_forward_bundle};
use ctxscen::complex::DEFAULT_SIMPLEX_CAP;
use ctxscen::sample;

fn main() -> ctxscen::Result<()> {
    let square = sample::square_z2();
    let bundle = canonical_bundle(&square, DEFAULT_SIMPLEX_CAP)?;
    println!(
        "canonical bundle of the square: {} outcome points over {} measurements, {} fiber edges",
        bundle.total().vertices().len(),
        bundle.base().vertices().len(),
        bundle.total().simplices().filter(|s| s.len() == 2).count()
    );

    let pr = sample::pr_box();
    let p = eta(&square, &pr, DEFAULT_SIMPLEX_CAP)?;
    println!("\nbundle model of the PR box, fiber supports per context:");
    for (sigma, d) in p.dists() {
        if sigma.len() == 2 {
            println!("  {sigma}: {} of {} fiber simplices", d.support_len(), bundle.fiber(sigma)?.len());
        }
    }
    assert_eq!(eta_inverse(&square, &p)?, pr);
    println!("eta round trip: ok");

    // Push the uniform triangle model through the embedded morphism.
    let m = sample::triangle_to_square_morphism()?;
    let bm = embed_scenario(&m, DEFAULT_SIMPLEX_CAP)?;
    println!(
        "\nembedded morphism: pull-back bundle has {} vertices over the square",
        bm.pullback().bundle().total().vertices().len()
    );
    let e = sample::uniform_model(m.source())?;
    let pushed = push_forward_bundle(&bm, &eta(m.source(), &e, DEFAULT_SIMPLEX_CAP)?)?;
    let back = eta_inverse(m.target(), &pushed)?;
    println!("pushed-then-decoded model on the square:");
    for (sigma, d) in back.dists() {
        if sigma.len() == 2 {
            let rows: Vec<String> = d.iter().map(|(s, w)| format!("{s}:{w}")).collect();
            println!("  {sigma}: {}", rows.join("  "));
        }
    }
    Ok(())
}
