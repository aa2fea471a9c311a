//! Nerve spaces and simplicial distributions: builds `Nf` for the triangle
//! bundle at dimension bound 3, transports a model through ζ, and shows the
//! level-one determination.

use ctxscen::bundle::{canonical_bundle, eta};
use ctxscen::complex::DEFAULT_SIMPLEX_CAP;
use ctxscen::sample;
use ctxscen::sdist::{zeta, zeta_inverse};
use ctxscen::sset::{check_simplicial_scenario, nerve_smap, DEFAULT_LEVEL_CAP};

fn main() -> ctxscen::Result<()> {
    let scn = sample::triangle_z2();
    let f = canonical_bundle(&scn, DEFAULT_SIMPLEX_CAP)?;
    let nf = nerve_smap(f.map(), 3, DEFAULT_LEVEL_CAP)?;
    println!("nerve of the triangle bundle at dimension bound 3:");
    for n in 0..=3 {
        println!(
            "  level {n}: {} total elements over {} base elements",
            nf.source().level(n).len(),
            nf.target().level(n).len()
        );
    }
    let flags = check_simplicial_scenario(&nf);
    println!(
        "scenario flags: surjective={} locally_surjective={} discrete={}",
        flags.surjective, flags.locally_surjective, flags.discrete_over_vertices
    );

    let e = sample::uniform_model(&scn)?;
    let p = eta(&scn, &e, DEFAULT_SIMPLEX_CAP)?;
    let sd = zeta(&f, &p, 3, DEFAULT_LEVEL_CAP)?;
    println!("\nsimplicial distribution of the uniform model:");
    let x = &nf.target().level(2)[5];
    let d = sd.dist(2, x)?;
    println!("  at level-2 element {}:", x.label());
    for (el, w) in d.iter() {
        println!("    {}  ->  {w}", el.label());
    }

    let back = zeta_inverse(&f, &sd)?;
    println!(
        "\nlevel-one determination: zeta_inverse(zeta(p)) == p is {}",
        back == p
    );
    Ok(())
}
