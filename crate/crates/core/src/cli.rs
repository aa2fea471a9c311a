//! Command-line front end: parse documents, run validations, constructions,
//! push-forwards, and contextuality decisions, and emit machine-readable
//! JSON reports.
//!
//! Exit codes are a function of the verdict only: 0 for success or a
//! noncontextual decision, 1 for a contextual decision, 2 for validation
//! failures, 3 for resource-cap refusals.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};

use crate::bundle::{
    canonical_bundle, eta, eta_inverse, push_forward_bundle, BundleMorphism, BundleScenario,
    RelationPullback,
};
use crate::complex::{Vertex, DEFAULT_SIMPLEX_CAP};
use crate::contextuality::{
    decide_scenario, decide_scenario_boolean, scenario_sections, Verdict, DEFAULT_SECTION_CAP,
};
use crate::doc::{
    self, certificate_to_value, complex_to_value, document, rational_model_to_value,
    read_document, sset_map_to_value, to_stable_string, ModelDocument, MorphismDocument,
    WorkspaceDocument,
};
use crate::error::{Error, Result};
use crate::nerve::{hat_n, hat_n_map};
use crate::rng::Rng;
use crate::scenario::EmpiricalModel;
use crate::sdist::{zeta, zeta_inverse};
use crate::semiring::Rat;
use crate::sset::{embed_bundle, nerve_smap, nerve_space, DEFAULT_DIM, DEFAULT_LEVEL_CAP};

#[derive(Clone, Debug)]
pub struct Options {
    pub dim: usize,
    pub dim_given: bool,
    pub cap: usize,
    pub semiring: Option<String>,
    pub seed: u64,
    pub format: String,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            dim: DEFAULT_DIM,
            dim_given: false,
            cap: DEFAULT_SIMPLEX_CAP,
            semiring: None,
            seed: Rng::DEFAULT_SEED,
            format: "json".into(),
        }
    }
}

/// Parses flags and a subcommand, runs it, and returns the report document
/// with the process exit status.
pub fn execute(args: &[String]) -> (Value, i32) {
    match execute_inner(args) {
        Ok((value, code)) => (value, code),
        Err(e) => (
            json!({
                "kind": "error",
                "version": doc::FORMAT_VERSION,
                "code": e.code(),
                "message": e.to_string(),
            }),
            e.exit_code(),
        ),
    }
}

/// Prints the report to standard output and returns the exit status.
pub fn run(args: &[String]) -> i32 {
    let (value, code) = execute(args);
    print!("{}", to_stable_string(&value));
    code
}

fn execute_inner(args: &[String]) -> Result<(Value, i32)> {
    let (command, positional, options) = parse_args(args)?;
    match command.as_str() {
        "validate" => cmd_validate(&positional, &options),
        "nerve" => cmd_nerve(&positional, &options),
        "pullback" => cmd_pullback(&positional, &options),
        "embed" => cmd_embed(&positional, &options),
        "push" => cmd_push(&positional, &options),
        "sections" => cmd_sections(&positional, &options),
        "decide" => cmd_decide(&positional, &options),
        "roundtrip" => cmd_roundtrip(&positional, &options),
        other => Err(Error::Parse {
            path: "<args>".into(),
            message: format!(
                "unknown subcommand {other:?} (expected validate, nerve, pullback, embed, push, sections, decide, roundtrip)"
            ),
        }),
    }
}

fn parse_args(args: &[String]) -> Result<(String, Vec<String>, Options)> {
    let mut options = Options::default();
    let mut positional = Vec::new();
    let mut command = None;
    let mut it = args.iter();
    let arg_err = |m: String| Error::Parse {
        path: "<args>".into(),
        message: m,
    };
    while let Some(a) = it.next() {
        match a.as_str() {
            "--dim" => {
                let v = it.next().ok_or_else(|| arg_err("--dim needs a value".into()))?;
                options.dim = v.parse().map_err(|_| arg_err(format!("bad --dim {v:?}")))?;
                options.dim_given = true;
            }
            "--cap" => {
                let v = it.next().ok_or_else(|| arg_err("--cap needs a value".into()))?;
                options.cap = v.parse().map_err(|_| arg_err(format!("bad --cap {v:?}")))?;
            }
            "--semiring" => {
                let v = it
                    .next()
                    .ok_or_else(|| arg_err("--semiring needs a value".into()))?;
                if v != "rational" && v != "boolean" {
                    return Err(arg_err(format!(
                        "bad --semiring {v:?} (expected rational or boolean)"
                    )));
                }
                options.semiring = Some(v.clone());
            }
            "--seed" => {
                let v = it.next().ok_or_else(|| arg_err("--seed needs a value".into()))?;
                options.seed = v.parse().map_err(|_| arg_err(format!("bad --seed {v:?}")))?;
            }
            "--format" => {
                let v = it
                    .next()
                    .ok_or_else(|| arg_err("--format needs a value".into()))?;
                if v != "json" {
                    return Err(arg_err(format!("bad --format {v:?} (only json)")));
                }
            }
            flag if flag.starts_with("--") => {
                return Err(arg_err(format!("unknown flag {flag:?}")));
            }
            _ => {
                if command.is_none() {
                    command = Some(a.clone());
                } else {
                    positional.push(a.clone());
                }
            }
        }
    }
    let command = command.ok_or_else(|| arg_err("missing subcommand".into()))?;
    Ok((command, positional, options))
}

fn one_path<'a>(positional: &'a [String], what: &str) -> Result<&'a Path> {
    if positional.len() != 1 {
        return Err(Error::Parse {
            path: "<args>".into(),
            message: format!("expected exactly one {what} file"),
        });
    }
    Ok(Path::new(&positional[0]))
}

fn two_paths<'a>(positional: &'a [String], what: &str) -> Result<(&'a Path, &'a Path)> {
    if positional.len() != 2 {
        return Err(Error::Parse {
            path: "<args>".into(),
            message: format!("expected two files: {what}"),
        });
    }
    Ok((Path::new(&positional[0]), Path::new(&positional[1])))
}

fn report(command: &str, mut fields: Vec<(&str, Value)>, warnings: Vec<String>) -> Value {
    fields.insert(0, ("command", json!(command)));
    if !warnings.is_empty() {
        fields.push(("warnings", json!(warnings)));
    }
    document("report", fields)
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_validate(positional: &[String], options: &Options) -> Result<(Value, i32)> {
    let path = one_path(positional, "document")?;
    let (parsed, warnings) = read_document(path, options.cap)?;
    Ok((
        report(
            "validate",
            vec![("document", json!(parsed.kind())), ("ok", json!(true))],
            warnings,
        ),
        0,
    ))
}

fn cmd_nerve(positional: &[String], options: &Options) -> Result<(Value, i32)> {
    let path = one_path(positional, "scenario or bundle")?;
    let (parsed, warnings) = read_document(path, options.cap)?;
    match parsed {
        WorkspaceDocument::Scenario(scn) => {
            if options.dim_given {
                let n = nerve_space(scn.complex(), options.dim, DEFAULT_LEVEL_CAP)?;
                let sizes: Vec<usize> = (0..=n.dim()).map(|k| n.level(k).len()).collect();
                let levels: Vec<Vec<String>> = (0..=n.dim())
                    .map(|k| n.level(k).iter().map(|e| e.label()).collect())
                    .collect();
                Ok((
                    report(
                        "nerve",
                        vec![
                            ("dim", json!(options.dim)),
                            ("level_sizes", json!(sizes)),
                            ("levels", json!(levels)),
                        ],
                        warnings,
                    ),
                    0,
                ))
            } else {
                let nerve = hat_n(scn.complex(), options.cap)?;
                Ok((
                    report("nerve", vec![("complex", complex_to_value(&nerve))], warnings),
                    0,
                ))
            }
        }
        WorkspaceDocument::Bundle(b) => {
            if options.dim_given {
                let nf = nerve_smap(b.map(), options.dim, DEFAULT_LEVEL_CAP)?;
                Ok((sset_map_to_value(&nf), 0))
            } else {
                let nf = BundleScenario::new(hat_n_map(b.map(), options.cap)?)?;
                Ok((
                    document(
                        "bundle",
                        vec![
                            ("total", complex_to_value(nf.total())),
                            ("base", complex_to_value(nf.base())),
                            ("map", bundle_map_value(&nf)),
                        ],
                    ),
                    0,
                ))
            }
        }
        other => Err(Error::Parse {
            path: path.display().to_string(),
            message: format!("nerve expects a scenario or bundle document, got {}", other.kind()),
        }),
    }
}

fn bundle_map_value(f: &BundleScenario) -> Value {
    let mut m = serde_json::Map::new();
    for (v, w) in f.map().vertex_map() {
        m.insert(v.label(), Value::String(w.label()));
    }
    Value::Object(m)
}

fn load_bundle(path: &Path, options: &Options) -> Result<(BundleScenario, Vec<String>)> {
    let (parsed, warnings) = read_document(path, options.cap)?;
    match parsed {
        WorkspaceDocument::Bundle(b) => Ok((b, warnings)),
        WorkspaceDocument::Scenario(scn) => {
            Ok((canonical_bundle(&scn, options.cap)?, warnings))
        }
        other => Err(Error::Parse {
            path: path.display().to_string(),
            message: format!("expected a bundle or scenario document, got {}", other.kind()),
        }),
    }
}

fn cmd_pullback(positional: &[String], options: &Options) -> Result<(Value, i32)> {
    let (bundle_path, morphism_path) = two_paths(positional, "bundle/scenario and morphism")?;
    let (bundle, mut warnings) = load_bundle(bundle_path, options)?;
    let (parsed, w2) = read_document(morphism_path, options.cap)?;
    warnings.extend(w2);
    let WorkspaceDocument::Morphism(m) = parsed else {
        return Err(Error::Parse {
            path: morphism_path.display().to_string(),
            message: "expected a morphism document".into(),
        });
    };
    if m.relation.target() != bundle.base() {
        return Err(Error::InvalidMorphism(
            "the relation does not land in the bundle base".into(),
        ));
    }
    let pb = RelationPullback::new(&bundle, &m.relation, options.cap)?;
    let f = pb.bundle();
    Ok((
        document(
            "bundle",
            vec![
                ("total", complex_to_value(f.total())),
                ("base", complex_to_value(f.base())),
                ("map", bundle_map_value(f)),
            ],
        ),
        0,
    ))
}

fn cmd_embed(positional: &[String], options: &Options) -> Result<(Value, i32)> {
    let path = one_path(positional, "scenario or bundle")?;
    let (parsed, _warnings) = read_document(path, options.cap)?;
    match parsed {
        WorkspaceDocument::Scenario(scn) => {
            let f = canonical_bundle(&scn, options.cap)?;
            Ok((
                document(
                    "bundle",
                    vec![
                        ("total", complex_to_value(f.total())),
                        ("base", complex_to_value(f.base())),
                        ("map", bundle_map_value(&f)),
                    ],
                ),
                0,
            ))
        }
        WorkspaceDocument::Bundle(b) => {
            let nf = nerve_smap(b.map(), options.dim, DEFAULT_LEVEL_CAP)?;
            Ok((sset_map_to_value(&nf), 0))
        }
        other => Err(Error::Parse {
            path: path.display().to_string(),
            message: format!("embed expects a scenario or bundle document, got {}", other.kind()),
        }),
    }
}

/// Builds the bundle morphism between canonical bundles described by a
/// morphism document (relation plus alpha on rendered vertex labels).
pub fn bundle_morphism_from_document(
    m: &MorphismDocument,
    cap: usize,
) -> Result<BundleMorphism> {
    let alpha = m.alpha.as_ref().ok_or_else(|| {
        Error::InvalidMorphism("the morphism document carries no alpha table".into())
    })?;
    let source = canonical_bundle(&m.source, cap)?;
    let target = canonical_bundle(&m.target, cap)?;
    let pb = RelationPullback::new(&source, &m.relation, cap)?;
    let target_by_label: BTreeMap<String, Vertex> = target
        .total()
        .vertices()
        .iter()
        .map(|v| (v.label(), v.clone()))
        .collect();
    let assignment = pb
        .bundle()
        .total()
        .vertices()
        .iter()
        .map(|v| {
            let label = v.label();
            let image_label = alpha.get(&label).ok_or_else(|| {
                Error::InvalidMorphism(format!("alpha misses the pull-back vertex {label:?}"))
            })?;
            let image = target_by_label.get(image_label).ok_or_else(|| {
                Error::InvalidMorphism(format!(
                    "alpha value {image_label:?} is not a vertex of the target bundle"
                ))
            })?;
            Ok((v.clone(), image.clone()))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    BundleMorphism::new(source, target, m.relation.clone(), assignment, cap)
}

fn cmd_push(positional: &[String], options: &Options) -> Result<(Value, i32)> {
    let (model_path, morphism_path) = two_paths(positional, "model and morphism")?;
    let (parsed, mut warnings) = read_document(model_path, options.cap)?;
    let WorkspaceDocument::Model(model) = parsed else {
        return Err(Error::Parse {
            path: model_path.display().to_string(),
            message: "expected a model document".into(),
        });
    };
    let ModelDocument::Rational(e) = model else {
        return Err(Error::UndecidableSemiring(
            "push currently transports rational models".into(),
        ));
    };
    let (parsed, w2) = read_document(morphism_path, options.cap)?;
    warnings.extend(w2);
    let WorkspaceDocument::Morphism(m) = parsed else {
        return Err(Error::Parse {
            path: morphism_path.display().to_string(),
            message: "expected a morphism document".into(),
        });
    };
    if e.scenario() != &m.source {
        return Err(Error::InvalidModel(
            "the model does not live on the morphism source".into(),
        ));
    }
    let bm = bundle_morphism_from_document(&m, options.cap)?;
    let p = eta(&m.source, &e, options.cap)?;
    let pushed = push_forward_bundle(&bm, &p)?;
    let result = eta_inverse(&m.target, &pushed)?;
    let mut value = rational_model_to_value(&result);
    let obj = value.as_object_mut().expect("model object");
    obj.insert("kind".into(), json!("model"));
    obj.insert("version".into(), json!(doc::FORMAT_VERSION));
    if !warnings.is_empty() {
        obj.insert("warnings".into(), json!(warnings));
    }
    Ok((value, 0))
}

fn cmd_sections(positional: &[String], options: &Options) -> Result<(Value, i32)> {
    let path = one_path(positional, "scenario or bundle")?;
    let (parsed, warnings) = read_document(path, options.cap)?;
    match parsed {
        WorkspaceDocument::Scenario(scn) => {
            let sections = scenario_sections(&scn, DEFAULT_SECTION_CAP)?;
            let rows: Vec<Value> = sections
                .iter()
                .map(|s| {
                    let mut m = serde_json::Map::new();
                    for (v, o) in s {
                        m.insert(v.label(), Value::String(o.as_str().to_string()));
                    }
                    Value::Object(m)
                })
                .collect();
            Ok((
                report(
                    "sections",
                    vec![("count", json!(rows.len())), ("sections", Value::Array(rows))],
                    warnings,
                ),
                0,
            ))
        }
        WorkspaceDocument::Bundle(b) => {
            let sections = b.sections(DEFAULT_SECTION_CAP)?;
            let rows: Vec<Value> = sections
                .iter()
                .map(|s| {
                    let mut m = serde_json::Map::new();
                    for (v, w) in s.vertex_map() {
                        m.insert(v.label(), Value::String(w.label()));
                    }
                    Value::Object(m)
                })
                .collect();
            Ok((
                report(
                    "sections",
                    vec![("count", json!(rows.len())), ("sections", Value::Array(rows))],
                    warnings,
                ),
                0,
            ))
        }
        other => Err(Error::Parse {
            path: path.display().to_string(),
            message: format!("sections expects a scenario or bundle document, got {}", other.kind()),
        }),
    }
}

fn cmd_decide(positional: &[String], options: &Options) -> Result<(Value, i32)> {
    let path = one_path(positional, "model")?;
    let (parsed, _warnings) = read_document(path, options.cap)?;
    let WorkspaceDocument::Model(model) = parsed else {
        return Err(Error::Parse {
            path: path.display().to_string(),
            message: "expected a model document".into(),
        });
    };
    match (&model, options.semiring.as_deref()) {
        (ModelDocument::Rational(_), Some("boolean")) | (ModelDocument::Boolean(_), Some("rational")) => {
            return Err(Error::UndecidableSemiring(
                "--semiring disagrees with the model document".into(),
            ));
        }
        _ => {}
    }
    match model {
        ModelDocument::Rational(e) => {
            let cert = decide_scenario(&e, DEFAULT_SECTION_CAP)?;
            let sections = scenario_sections(e.scenario(), DEFAULT_SECTION_CAP)?;
            let value = certificate_to_value(e.scenario(), &sections, &cert, "rational");
            let code = match cert.verdict() {
                Verdict::NonContextual => 0,
                Verdict::Contextual => 1,
            };
            Ok((value, code))
        }
        ModelDocument::Boolean(e) => {
            let cert = decide_scenario_boolean(&e, DEFAULT_SECTION_CAP)?;
            let sections = scenario_sections(e.scenario(), DEFAULT_SECTION_CAP)?;
            let value = certificate_to_value(e.scenario(), &sections, &cert, "boolean");
            let code = match cert.verdict() {
                Verdict::NonContextual => 0,
                Verdict::Contextual => 1,
            };
            Ok((value, code))
        }
    }
}

fn cmd_roundtrip(positional: &[String], options: &Options) -> Result<(Value, i32)> {
    let path = one_path(positional, "model")?;
    let (parsed, warnings) = read_document(path, options.cap)?;
    let WorkspaceDocument::Model(model) = parsed else {
        return Err(Error::Parse {
            path: path.display().to_string(),
            message: "expected a model document".into(),
        });
    };
    let ModelDocument::Rational(e) = model else {
        return Err(Error::UndecidableSemiring(
            "roundtrip currently checks rational models".into(),
        ));
    };
    let scn = e.scenario().clone();
    let dim = if options.dim_given { options.dim } else { 2 };
    let mut checks: Vec<(String, bool)> = Vec::new();

    let f = canonical_bundle(&scn, options.cap)?;
    let p = eta(&scn, &e, options.cap)?;
    checks.push(("eta_inverse_eta".into(), eta_inverse(&scn, &p)? == e));

    let sd = zeta(&f, &p, dim, DEFAULT_LEVEL_CAP)?;
    checks.push(("zeta_inverse_zeta".into(), zeta_inverse(&f, &sd)? == p));

    // Naturality along a seeded random endomorphism.
    let mut rng = Rng::new(options.seed);
    let m = crate::sample::random_endomorphism(&scn, &mut rng)?;
    let bm = crate::bundle::embed_scenario(&m, options.cap)?;
    let lhs = eta(&scn, &m.push_forward(&e)?, options.cap)?;
    let rhs = push_forward_bundle(&bm, &p)?;
    checks.push(("eta_naturality".into(), lhs == rhs));

    let sm = embed_bundle(&bm, dim, DEFAULT_LEVEL_CAP)?;
    let lhs = zeta(bm.target(), &rhs, dim, DEFAULT_LEVEL_CAP)?;
    let rhs_sd = sd.push_forward(&sm)?;
    checks.push(("zeta_naturality".into(), lhs == rhs_sd));

    // Mixing commutes with η on a seeded mixture with the uniform model.
    let uniform = crate::sample::uniform_model(&scn)?;
    let w = Rat::new(1, 2)?;
    let mixed = EmpiricalModel::mix(&[(e.clone(), w.clone()), (uniform.clone(), w.clone())])?;
    let lhs = eta(&scn, &mixed, options.cap)?;
    let rhs = crate::bundle::BundleModel::mix(&[
        (p.clone(), w.clone()),
        (eta(&scn, &uniform, options.cap)?, w),
    ])?;
    checks.push(("eta_is_affine".into(), lhs == rhs));

    let ok = checks.iter().all(|(_, b)| *b);
    let rows: Vec<Value> = checks
        .iter()
        .map(|(name, b)| json!({ "check": name, "ok": b }))
        .collect();
    Ok((
        report(
            "roundtrip",
            vec![
                ("ok", json!(ok)),
                ("seed", json!(options.seed)),
                ("checks", Value::Array(rows)),
            ],
            warnings,
        ),
        if ok { 0 } else { 2 },
    ))
}
