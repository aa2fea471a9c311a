//! Seeded batch study: decides random non-signaling models in all three
//! settings and tallies the verdicts, the way a sweep script would.
//!
//! Usage: `cargo run --example random_sweep -- [seed] [rounds]`

use ctxscen::bundle::{canonical_bundle, eta};
use ctxscen::complex::DEFAULT_SIMPLEX_CAP;
use ctxscen::contextuality::{
    decide_bundle, decide_scenario, decide_sdist_nerve, Verdict, DEFAULT_SECTION_CAP,
};
use ctxscen::rng::Rng;
use ctxscen::sample;
use ctxscen::sdist::zeta;
use ctxscen::sset::DEFAULT_LEVEL_CAP;

fn main() -> ctxscen::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args
        .next()
        .map(|s| s.parse().expect("seed"))
        .unwrap_or(Rng::DEFAULT_SEED);
    let rounds: usize = args.next().map(|s| s.parse().expect("rounds")).unwrap_or(40);
    let mut rng = Rng::new(seed);

    let mut contextual = 0;
    let mut noncontextual = 0;
    for round in 0..rounds {
        let scn = sample::random_scenario(&mut rng, 5, 3)?;
        let e = sample::random_model(&scn, &mut rng)?;
        let v1 = decide_scenario(&e, DEFAULT_SECTION_CAP)?.verdict();

        let f = canonical_bundle(&scn, DEFAULT_SIMPLEX_CAP)?;
        let p = eta(&scn, &e, DEFAULT_SIMPLEX_CAP)?;
        let v2 = decide_bundle(&p, DEFAULT_SECTION_CAP)?.verdict();
        let sd = zeta(&f, &p, 2, DEFAULT_LEVEL_CAP)?;
        let v3 = decide_sdist_nerve(&f, &sd, 2, DEFAULT_SECTION_CAP)?.verdict();

        assert_eq!(v1, v2);
        assert_eq!(v1, v3);
        match v1 {
            Verdict::Contextual => contextual += 1,
            Verdict::NonContextual => noncontextual += 1,
        }
        println!(
            "round {round:3}: {} vertices, {} contexts -> {:?} (all three flavors agree)",
            scn.complex().vertices().len(),
            scn.complex().maximal().len(),
            v1
        );
    }
    println!("\nseed {seed}: {contextual} contextual, {noncontextual} noncontextual");
    Ok(())
}
