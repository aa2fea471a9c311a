//! Possibilistic (boolean-semiring) contextuality: the Hardy-style support
//! model has an unextendable support element, found by support-extension
//! analysis.

use ctxscen::contextuality::{decide_scenario_boolean, Certificate, DEFAULT_SECTION_CAP};
use ctxscen::sample;

fn main() -> ctxscen::Result<()> {
    let hardy = sample::hardy_model();
    println!("Hardy support model (possible outcomes per context):");
    for (sigma, d) in hardy.dists() {
        if sigma.len() == 2 {
            let rows: Vec<String> = d.support().map(|s| s.to_string()).collect();
            println!("  {sigma}: {}", rows.join(" "));
        }
    }

    match decide_scenario_boolean(&hardy, DEFAULT_SECTION_CAP)? {
        Certificate::SupportGap { witness: (sigma, t) } => {
            println!("\nverdict: contextual (possibilistically)");
            println!("witness: the supported element {t} of context {sigma}");
            println!("extends to no global section whose restrictions are all possible");
        }
        other => println!("unexpected: {:?}", other.verdict()),
    }

    // A support model generated by a family of sections is always covered.
    let scn = sample::triangle_z2();
    let sections = ctxscen::contextuality::scenario_sections(&scn, DEFAULT_SECTION_CAP)?;
    let family: Vec<(usize, bool)> = vec![(1, true), (6, true)];
    let model = ctxscen::contextuality::theta_scenario(&scn, &sections, &family)?;
    match decide_scenario_boolean(&model, DEFAULT_SECTION_CAP)? {
        Certificate::SupportCover { sections: cover } => {
            println!(
                "\nsection-generated support model on the triangle: noncontextual, covered by {} sections",
                cover.len()
            );
        }
        other => println!("unexpected: {:?}", other.verdict()),
    }
    Ok(())
}
