//! Writes the standard document files used by the CLI walkthrough in the
//! README: scenarios, models, and the triangle-to-square morphism.
//!
//! Usage: `cargo run --example export_documents -- [output-dir]`
//! (defaults to `examples/files` under the crate root).

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use ctxscen::bundle::embed_scenario;
use ctxscen::complex::DEFAULT_SIMPLEX_CAP;
use ctxscen::doc::{
    boolean_model_to_value, document, morphism_to_value, rational_model_to_value,
    scenario_to_value, to_stable_string, MorphismDocument,
};
use ctxscen::sample;

fn main() -> ctxscen::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR"))
                .join("examples")
                .join("files")
        });
    fs::create_dir_all(&out)?;

    let write = |name: &str, value: serde_json::Value| -> ctxscen::Result<()> {
        let path = out.join(name);
        fs::write(&path, to_stable_string(&value))?;
        println!("wrote {}", path.display());
        Ok(())
    };

    // Scenarios.
    let triangle = sample::triangle_z2();
    let square = sample::square_z2();
    let wrap_scenario = |scn: &ctxscen::scenario::Scenario| {
        let payload = scenario_to_value(scn);
        document(
            "scenario",
            vec![
                ("complex", payload["complex"].clone()),
                ("outcomes", payload["outcomes"].clone()),
            ],
        )
    };
    write("triangle_scenario.json", wrap_scenario(&triangle))?;
    write("square_scenario.json", wrap_scenario(&square))?;

    // Models.
    let wrap_model = |v: serde_json::Value| {
        let mut obj = v.as_object().expect("model object").clone();
        obj.insert("kind".into(), serde_json::json!("model"));
        obj.insert("version".into(), serde_json::json!("1"));
        serde_json::Value::Object(obj)
    };
    write(
        "uniform_triangle_model.json",
        wrap_model(rational_model_to_value(&sample::uniform_model(&triangle)?)),
    )?;
    write(
        "uniform_square_model.json",
        wrap_model(rational_model_to_value(&sample::uniform_model(&square)?)),
    )?;
    write(
        "pr_box_model.json",
        wrap_model(rational_model_to_value(&sample::pr_box())),
    )?;
    write(
        "hardy_model.json",
        wrap_model(boolean_model_to_value(&sample::hardy_model())),
    )?;

    // The triangle-to-square morphism, with its outcome map rendered on the
    // canonical bundles.
    let m = sample::triangle_to_square_morphism()?;
    let bm = embed_scenario(&m, DEFAULT_SIMPLEX_CAP)?;
    let alpha: BTreeMap<String, String> = bm
        .alpha()
        .vertex_map()
        .iter()
        .map(|(v, w)| (v.label(), w.label()))
        .collect();
    let doc = MorphismDocument {
        source: triangle,
        target: square,
        relation: m.relation().clone(),
        alpha: Some(alpha),
    };
    write("triangle_to_square_morphism.json", morphism_to_value(&doc))?;

    Ok(())
}
