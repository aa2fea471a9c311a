//! Workspace documents: the JSON formats for scenarios, bundles, models,
//! morphisms, simplicial sets, certificates, and reports.
//!
//! All output is UTF-8 JSON with sorted keys (byte-stable across runs).
//! Parsing returns positioned errors: the `path` of a parse error is the
//! JSON-pointer-style location of the offending node.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::bundle::BundleScenario;
use crate::complex::{Complex, ComplexMap, Outcome, Simplex, Vertex};
use crate::contextuality::{Certificate, ScenarioKey, Verdict};
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::nerve::SimplicialRelation;
use crate::scenario::{EmpiricalModel, Scenario, SectionOver};
use crate::semiring::{Rat, Semiring};
use crate::sset::SSetMap;

pub const FORMAT_VERSION: &str = "1";

/// A parsed document of any recognized kind.
pub enum WorkspaceDocument {
    Scenario(Scenario),
    Bundle(BundleScenario),
    Model(ModelDocument),
    Morphism(MorphismDocument),
    SSet(Value),
    Certificate(Value),
    Report(Value),
}

impl WorkspaceDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            WorkspaceDocument::Scenario(_) => "scenario",
            WorkspaceDocument::Bundle(_) => "bundle",
            WorkspaceDocument::Model(_) => "model",
            WorkspaceDocument::Morphism(_) => "morphism",
            WorkspaceDocument::SSet(_) => "sset",
            WorkspaceDocument::Certificate(_) => "certificate",
            WorkspaceDocument::Report(_) => "report",
        }
    }
}

pub enum ModelDocument {
    Rational(EmpiricalModel<Rat>),
    Boolean(EmpiricalModel<bool>),
}

/// A morphism document: a relation between two scenarios plus, optionally,
/// the outcome map on the canonical bundles (vertex label to vertex label).
pub struct MorphismDocument {
    pub source: Scenario,
    pub target: Scenario,
    pub relation: SimplicialRelation,
    pub alpha: Option<BTreeMap<String, String>>,
}

// ---------------------------------------------------------------------------
// Parse helpers with positioned errors
// ---------------------------------------------------------------------------

fn perr(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

fn get<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| perr(&format!("{path}/{key}"), "missing field"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| perr(path, "expected a string"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| perr(path, "expected an array"))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| perr(path, "expected an object"))
}

fn value_to_outcome(v: &Value, path: &str) -> Result<Outcome> {
    match v {
        Value::String(s) => Ok(Outcome::new(s)),
        Value::Number(n) => Ok(Outcome::new(&n.to_string())),
        Value::Bool(b) => Ok(Outcome::new(if *b { "true" } else { "false" })),
        _ => Err(perr(path, "expected a scalar outcome value")),
    }
}

// ---------------------------------------------------------------------------
// Complexes
// ---------------------------------------------------------------------------

pub fn complex_to_value(c: &Complex) -> Value {
    let mut vertices: Vec<String> = c.vertices().iter().map(Vertex::label).collect();
    vertices.sort();
    let mut maximal: Vec<Vec<String>> = c
        .maximal()
        .iter()
        .map(|s| {
            let mut labels: Vec<String> = s.vertices().iter().map(Vertex::label).collect();
            labels.sort();
            labels
        })
        .collect();
    maximal.sort();
    json!({ "vertices": vertices, "maximal": maximal })
}

/// Parses a complex payload, closing the listed simplices downward.
/// Returns the complex plus warnings for redundant (non-maximal) entries.
pub fn complex_from_value(v: &Value, path: &str, cap: usize) -> Result<(Complex, Vec<String>)> {
    let vs = as_array(get(v, "vertices", path)?, &format!("{path}/vertices"))?;
    if vs.is_empty() {
        return Err(perr(&format!("{path}/vertices"), "empty vertex set"));
    }
    let mut vertices = Vec::with_capacity(vs.len());
    for (i, lv) in vs.iter().enumerate() {
        vertices.push(Vertex::atom(as_str(lv, &format!("{path}/vertices/{i}"))?));
    }
    let ms = as_array(get(v, "maximal", path)?, &format!("{path}/maximal"))?;
    let mut listed: Vec<Simplex> = Vec::with_capacity(ms.len());
    for (i, mv) in ms.iter().enumerate() {
        let mpath = format!("{path}/maximal/{i}");
        let labels = as_array(mv, &mpath)?;
        if labels.is_empty() {
            return Err(perr(&mpath, "empty simplex"));
        }
        let members = labels
            .iter()
            .enumerate()
            .map(|(j, lv)| Ok(Vertex::atom(as_str(lv, &format!("{mpath}/{j}"))?)))
            .collect::<Result<Vec<_>>>()?;
        listed.push(Simplex::new(members).map_err(|e| perr(&mpath, e.to_string()))?);
    }
    let mut warnings = Vec::new();
    for (i, s) in listed.iter().enumerate() {
        if listed
            .iter()
            .enumerate()
            .any(|(j, t)| i != j && s.is_subset(t) && s != t)
        {
            warnings.push(format!(
                "{path}/maximal/{i}: simplex is a face of another listed simplex; closure makes it redundant"
            ));
        }
    }
    let complex = Complex::close_downward(vertices, &listed, cap)
        .map_err(|e| match e {
            Error::CapExceeded(m) => Error::CapExceeded(m),
            other => perr(path, other.to_string()),
        })?;
    Ok((complex, warnings))
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

pub fn scenario_to_value(scn: &Scenario) -> Value {
    let mut outcomes = Map::new();
    for (v, os) in scn.outcomes() {
        outcomes.insert(
            v.label(),
            Value::Array(os.iter().map(|o| Value::String(o.as_str().to_string())).collect()),
        );
    }
    json!({
        "complex": complex_to_value(scn.complex()),
        "outcomes": Value::Object(outcomes),
    })
}

pub fn scenario_from_value(v: &Value, path: &str, cap: usize) -> Result<(Scenario, Vec<String>)> {
    let (complex, warnings) =
        complex_from_value(get(v, "complex", path)?, &format!("{path}/complex"), cap)?;
    let table = as_object(get(v, "outcomes", path)?, &format!("{path}/outcomes"))?;
    let mut outcomes = BTreeMap::new();
    for (label, arr) in table {
        let opath = format!("{path}/outcomes/{label}");
        let values = as_array(arr, &opath)?
            .iter()
            .enumerate()
            .map(|(i, ov)| value_to_outcome(ov, &format!("{opath}/{i}")))
            .collect::<Result<Vec<_>>>()?;
        outcomes.insert(Vertex::atom(label), values);
    }
    let scenario = Scenario::new(complex, outcomes).map_err(|e| perr(path, e.to_string()))?;
    Ok((scenario, warnings))
}

// ---------------------------------------------------------------------------
// Bundles
// ---------------------------------------------------------------------------

pub fn bundle_to_value(f: &BundleScenario) -> Value {
    let mut map = Map::new();
    for (v, w) in f.map().vertex_map() {
        map.insert(v.label(), Value::String(w.label()));
    }
    json!({
        "total": complex_to_value(f.total()),
        "base": complex_to_value(f.base()),
        "map": Value::Object(map),
    })
}

pub fn bundle_from_value(v: &Value, path: &str, cap: usize) -> Result<(BundleScenario, Vec<String>)> {
    let (total, mut warnings) =
        complex_from_value(get(v, "total", path)?, &format!("{path}/total"), cap)?;
    let (base, w2) = complex_from_value(get(v, "base", path)?, &format!("{path}/base"), cap)?;
    warnings.extend(w2);
    let table = as_object(get(v, "map", path)?, &format!("{path}/map"))?;
    let mut assignment = BTreeMap::new();
    for (from, to) in table {
        assignment.insert(
            Vertex::atom(from),
            Vertex::atom(as_str(to, &format!("{path}/map/{from}"))?),
        );
    }
    let map = ComplexMap::new(total, base, assignment).map_err(|e| perr(path, e.to_string()))?;
    let bundle = BundleScenario::new(map).map_err(|e| match e {
        Error::NotBundle(m) => Error::NotBundle(m),
        other => perr(path, other.to_string()),
    })?;
    Ok((bundle, warnings))
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

fn section_to_value(s: &SectionOver) -> Value {
    Value::Array(
        s.values()
            .iter()
            .map(|o| Value::String(o.as_str().to_string()))
            .collect(),
    )
}

pub fn model_to_value<R: Semiring>(
    e: &EmpiricalModel<R>,
    semiring: &str,
    weight: impl Fn(&R) -> Value,
) -> Value {
    let mut contexts = Vec::new();
    for (sigma, d) in e.dists() {
        let mut rows = Vec::new();
        for (s, w) in d.iter() {
            rows.push(json!({ "outcome": section_to_value(s), "w": weight(w) }));
        }
        let labels: Vec<String> = sigma.vertices().iter().map(Vertex::label).collect();
        contexts.push(json!({ "context": labels, "dist": rows }));
    }
    json!({
        "semiring": semiring,
        "scenario": scenario_to_value(e.scenario()),
        "model": contexts,
    })
}

pub fn rational_model_to_value(e: &EmpiricalModel<Rat>) -> Value {
    model_to_value(e, "rational", |w| Value::String(w.to_string()))
}

pub fn boolean_model_to_value(e: &EmpiricalModel<bool>) -> Value {
    model_to_value(e, "boolean", |w| Value::Bool(*w))
}

fn parse_weight_rational(v: &Value, path: &str) -> Result<Rat> {
    match v {
        Value::String(s) => s.parse::<Rat>().map_err(|e| perr(path, e.to_string())),
        Value::Number(n) if n.is_u64() => Ok(Rat::integer(n.as_u64().expect("checked"))),
        _ => Err(perr(path, "expected a rational weight string \"num/den\"")),
    }
}

fn parse_weight_boolean(v: &Value, path: &str) -> Result<bool> {
    v.as_bool()
        .ok_or_else(|| perr(path, "expected a boolean weight"))
}

fn model_table_from_value<R: Semiring>(
    v: &Value,
    path: &str,
    scn: &Scenario,
    parse_weight: impl Fn(&Value, &str) -> Result<R>,
) -> Result<EmpiricalModel<R>> {
    let rows = as_array(get(v, "model", path)?, &format!("{path}/model"))?;
    let mut table: BTreeMap<Simplex, Dist<SectionOver, R>> = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{path}/model/{i}");
        let ctx = as_array(get(row, "context", &rpath)?, &format!("{rpath}/context"))?;
        let members = ctx
            .iter()
            .enumerate()
            .map(|(j, lv)| Ok(Vertex::atom(as_str(lv, &format!("{rpath}/context/{j}"))?)))
            .collect::<Result<Vec<_>>>()?;
        let sigma = Simplex::new(members).map_err(|e| perr(&rpath, e.to_string()))?;
        if !scn.complex().contains(&sigma) {
            return Err(perr(&format!("{rpath}/context"), "not a context of the scenario"));
        }
        let entries = as_array(get(row, "dist", &rpath)?, &format!("{rpath}/dist"))?;
        let mut pairs = Vec::with_capacity(entries.len());
        for (k, entry) in entries.iter().enumerate() {
            let epath = format!("{rpath}/dist/{k}");
            let ov = as_array(get(entry, "outcome", &epath)?, &format!("{epath}/outcome"))?;
            let values = ov
                .iter()
                .enumerate()
                .map(|(j, o)| value_to_outcome(o, &format!("{epath}/outcome/{j}")))
                .collect::<Result<Vec<_>>>()?;
            let section =
                SectionOver::new(sigma.clone(), values).map_err(|e| perr(&epath, e.to_string()))?;
            let w = parse_weight(get(entry, "w", &epath)?, &format!("{epath}/w"))?;
            pairs.push((section, w));
        }
        let dist = Dist::new(pairs).map_err(|e| perr(&format!("{rpath}/dist"), e.to_string()))?;
        if table.insert(sigma, dist).is_some() {
            return Err(perr(&rpath, "duplicate context"));
        }
    }
    // Complete table if every simplex is present; otherwise extend from the
    // maximal contexts, then check any extra supplied contexts agree.
    let every = scn.complex().simplices().all(|s| table.contains_key(s));
    if every {
        return EmpiricalModel::new(scn.clone(), table).map_err(|e| perr(path, e.to_string()));
    }
    for m in scn.complex().maximal() {
        if !table.contains_key(m) {
            return Err(perr(
                &format!("{path}/model"),
                format!("missing distribution on the maximal context {m}"),
            ));
        }
    }
    let maximal: BTreeMap<Simplex, Dist<SectionOver, R>> = scn
        .complex()
        .maximal()
        .iter()
        .map(|m| (m.clone(), table[m].clone()))
        .collect();
    let model =
        EmpiricalModel::from_maximal(scn.clone(), maximal).map_err(|e| perr(path, e.to_string()))?;
    for (sigma, d) in &table {
        if model.dist(sigma).map(|md| md != d).unwrap_or(true) {
            return Err(perr(
                &format!("{path}/model"),
                format!("supplied distribution on {sigma} disagrees with the maximal extension"),
            ));
        }
    }
    Ok(model)
}

pub fn model_from_value(v: &Value, path: &str, cap: usize) -> Result<(ModelDocument, Vec<String>)> {
    let (scn, warnings) =
        scenario_from_value(get(v, "scenario", path)?, &format!("{path}/scenario"), cap)?;
    let semiring = match v.get("semiring") {
        Some(s) => as_str(s, &format!("{path}/semiring"))?,
        None => "rational",
    };
    let model = match semiring {
        "rational" => {
            ModelDocument::Rational(model_table_from_value(v, path, &scn, parse_weight_rational)?)
        }
        "boolean" => {
            ModelDocument::Boolean(model_table_from_value(v, path, &scn, parse_weight_boolean)?)
        }
        other => {
            return Err(perr(
                &format!("{path}/semiring"),
                format!("unknown semiring {other:?} (expected rational or boolean)"),
            ))
        }
    };
    Ok((model, warnings))
}

// ---------------------------------------------------------------------------
// Morphisms
// ---------------------------------------------------------------------------

pub fn morphism_to_value(doc: &MorphismDocument) -> Value {
    let mut relation = Map::new();
    for x in doc.target.complex().vertices() {
        let mut labels: Vec<String> = doc
            .relation
            .vertex_value(x)
            .vertices()
            .iter()
            .map(Vertex::label)
            .collect();
        labels.sort();
        relation.insert(x.label(), json!(labels));
    }
    let mut out = Map::new();
    out.insert("kind".into(), json!("morphism"));
    out.insert("version".into(), json!(FORMAT_VERSION));
    out.insert("source".into(), scenario_to_value(&doc.source));
    out.insert("target".into(), scenario_to_value(&doc.target));
    out.insert("relation".into(), Value::Object(relation));
    if let Some(alpha) = &doc.alpha {
        let mut table = Map::new();
        for (k, v) in alpha {
            table.insert(k.clone(), Value::String(v.clone()));
        }
        out.insert("alpha".into(), Value::Object(table));
    }
    Value::Object(out)
}

pub fn morphism_from_value(
    v: &Value,
    path: &str,
    cap: usize,
) -> Result<(MorphismDocument, Vec<String>)> {
    let (source, mut warnings) =
        scenario_from_value(get(v, "source", path)?, &format!("{path}/source"), cap)?;
    let (target, w2) =
        scenario_from_value(get(v, "target", path)?, &format!("{path}/target"), cap)?;
    warnings.extend(w2);
    let table = as_object(get(v, "relation", path)?, &format!("{path}/relation"))?;
    let mut assignment = BTreeMap::new();
    for (label, arr) in table {
        let rpath = format!("{path}/relation/{label}");
        let members = as_array(arr, &rpath)?
            .iter()
            .enumerate()
            .map(|(j, lv)| Ok(Vertex::atom(as_str(lv, &format!("{rpath}/{j}"))?)))
            .collect::<Result<Vec<_>>>()?;
        let value = Simplex::new(members).map_err(|e| perr(&rpath, e.to_string()))?;
        assignment.insert(Vertex::atom(label), value);
    }
    let relation = SimplicialRelation::new(
        target.complex().clone(),
        source.complex().clone(),
        assignment,
    )
    .map_err(|e| perr(&format!("{path}/relation"), e.to_string()))?;
    let alpha = match v.get("alpha") {
        None => None,
        Some(a) => {
            let table = as_object(a, &format!("{path}/alpha"))?;
            Some(
                table
                    .iter()
                    .map(|(k, val)| {
                        Ok((
                            k.clone(),
                            as_str(val, &format!("{path}/alpha/{k}"))?.to_string(),
                        ))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()?,
            )
        }
    };
    Ok((
        MorphismDocument {
            source,
            target,
            relation,
            alpha,
        },
        warnings,
    ))
}

// ---------------------------------------------------------------------------
// Simplicial set documents (emitted for nerve scenarios; revalidated on parse)
// ---------------------------------------------------------------------------

fn sset_tables_to_value(s: &crate::sset::BoundedSSet) -> Value {
    let dim = s.dim();
    let levels: Vec<Value> = (0..=dim)
        .map(|n| {
            Value::Array(
                s.level(n)
                    .iter()
                    .map(|e| Value::String(e.label()))
                    .collect(),
            )
        })
        .collect();
    let faces: Vec<Value> = (1..=dim)
        .map(|n| {
            let per_i: Vec<Value> = (0..=n)
                .map(|i| {
                    Value::Array(
                        (0..s.level(n).len())
                            .map(|k| json!(s.face_idx(n, i, k)))
                            .collect(),
                    )
                })
                .collect();
            Value::Array(per_i)
        })
        .collect();
    let degens: Vec<Value> = (0..dim)
        .map(|n| {
            let per_j: Vec<Value> = (0..=n)
                .map(|j| {
                    Value::Array(
                        (0..s.level(n).len())
                            .map(|k| json!(s.degen_idx(n, j, k)))
                            .collect(),
                    )
                })
                .collect();
            Value::Array(per_j)
        })
        .collect();
    json!({ "levels": levels, "faces": faces, "degens": degens })
}

pub fn sset_map_to_value(f: &SSetMap) -> Value {
    let dim = f.source().dim();
    let maps: Vec<Value> = (0..=dim)
        .map(|n| {
            Value::Array(
                (0..f.source().level(n).len())
                    .map(|k| json!(f.apply_idx(n, k)))
                    .collect(),
            )
        })
        .collect();
    json!({
        "kind": "sset",
        "version": FORMAT_VERSION,
        "dim": dim,
        "verified_up_to_dim": dim,
        "total": sset_tables_to_value(f.source()),
        "base": sset_tables_to_value(f.target()),
        "map": maps,
    })
}

/// Structural validation of an sset document: array shapes, index ranges,
/// simplicial identities of both table sets, and map commutation.
pub fn validate_sset_value(v: &Value, path: &str) -> Result<()> {
    let dim = get(v, "dim", path)?
        .as_u64()
        .ok_or_else(|| perr(&format!("{path}/dim"), "expected an integer"))? as usize;
    let total = SsTables::parse(get(v, "total", path)?, &format!("{path}/total"), dim)?;
    let base = SsTables::parse(get(v, "base", path)?, &format!("{path}/base"), dim)?;
    total.check_identities(&format!("{path}/total"))?;
    base.check_identities(&format!("{path}/base"))?;
    // Map tables.
    let maps = as_array(get(v, "map", path)?, &format!("{path}/map"))?;
    if maps.len() != dim + 1 {
        return Err(perr(&format!("{path}/map"), "wrong number of levels"));
    }
    let mut tables: Vec<Vec<usize>> = Vec::with_capacity(dim + 1);
    for (n, level) in maps.iter().enumerate() {
        let lpath = format!("{path}/map/{n}");
        let arr = as_array(level, &lpath)?;
        if arr.len() != total.sizes[n] {
            return Err(perr(&lpath, "wrong level size"));
        }
        let mut table = Vec::with_capacity(arr.len());
        for (k, idx) in arr.iter().enumerate() {
            let i = idx
                .as_u64()
                .ok_or_else(|| perr(&format!("{lpath}/{k}"), "expected an index"))?
                as usize;
            if i >= base.sizes[n] {
                return Err(perr(&format!("{lpath}/{k}"), "index out of range"));
            }
            table.push(i);
        }
        tables.push(table);
    }
    for n in 1..=dim {
        for i in 0..=n {
            for k in 0..total.sizes[n] {
                if base.faces[n - 1][i][tables[n][k]] != tables[n - 1][total.faces[n - 1][i][k]] {
                    return Err(perr(
                        &format!("{path}/map/{n}"),
                        format!("map does not commute with d_{i}"),
                    ));
                }
            }
        }
    }
    Ok(())
}

struct SsTables {
    sizes: Vec<usize>,
    /// `faces[n-1][i][k]` for levels 1..=dim.
    faces: Vec<Vec<Vec<usize>>>,
    degens: Vec<Vec<Vec<usize>>>,
}

impl SsTables {
    fn parse(v: &Value, path: &str, dim: usize) -> Result<SsTables> {
        let levels = as_array(get(v, "levels", path)?, &format!("{path}/levels"))?;
        if levels.len() != dim + 1 {
            return Err(perr(&format!("{path}/levels"), "wrong number of levels"));
        }
        let sizes: Vec<usize> = levels
            .iter()
            .enumerate()
            .map(|(n, l)| as_array(l, &format!("{path}/levels/{n}")).map(Vec::len))
            .collect::<Result<_>>()?;
        let parse_block = |key: &str, outer: usize, arity_of: &dyn Fn(usize) -> usize, from: usize| -> Result<Vec<Vec<Vec<usize>>>> {
            let block = as_array(get(v, key, path)?, &format!("{path}/{key}"))?;
            if block.len() != outer {
                return Err(perr(&format!("{path}/{key}"), "wrong number of levels"));
            }
            block
                .iter()
                .enumerate()
                .map(|(off, per)| {
                    let n = from + off;
                    let ppath = format!("{path}/{key}/{off}");
                    let per = as_array(per, &ppath)?;
                    if per.len() != arity_of(n) {
                        return Err(perr(&ppath, "wrong operator count"));
                    }
                    per.iter()
                        .enumerate()
                        .map(|(i, table)| {
                            let tpath = format!("{ppath}/{i}");
                            let arr = as_array(table, &tpath)?;
                            arr.iter()
                                .enumerate()
                                .map(|(k, idx)| {
                                    idx.as_u64()
                                        .map(|u| u as usize)
                                        .ok_or_else(|| perr(&format!("{tpath}/{k}"), "expected an index"))
                                })
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect()
        };
        let faces = parse_block("faces", dim, &|n| n + 1, 1)?;
        let degens = parse_block("degens", dim, &|n| n + 1, 0)?;
        // Shape and range checks.
        for n in 1..=dim {
            for (i, table) in faces[n - 1].iter().enumerate() {
                if table.len() != sizes[n] {
                    return Err(perr(&format!("{path}/faces/{}/{i}", n - 1), "wrong level size"));
                }
                if table.iter().any(|&t| t >= sizes[n - 1]) {
                    return Err(perr(&format!("{path}/faces/{}/{i}", n - 1), "index out of range"));
                }
            }
        }
        for n in 0..dim {
            for (j, table) in degens[n].iter().enumerate() {
                if table.len() != sizes[n] {
                    return Err(perr(&format!("{path}/degens/{n}/{j}"), "wrong level size"));
                }
                if table.iter().any(|&t| t >= sizes[n + 1]) {
                    return Err(perr(&format!("{path}/degens/{n}/{j}"), "index out of range"));
                }
            }
        }
        Ok(SsTables {
            sizes,
            faces,
            degens,
        })
    }

    fn check_identities(&self, path: &str) -> Result<()> {
        let dim = self.sizes.len() - 1;
        let d = |n: usize, i: usize, k: usize| self.faces[n - 1][i][k];
        let s = |n: usize, j: usize, k: usize| self.degens[n][j][k];
        for n in 2..=dim {
            for k in 0..self.sizes[n] {
                for j in 0..=n {
                    for i in 0..j {
                        if d(n - 1, i, d(n, j, k)) != d(n - 1, j - 1, d(n, i, k)) {
                            return Err(perr(path, "face identities fail"));
                        }
                    }
                }
            }
        }
        for n in 0..dim {
            for k in 0..self.sizes[n] {
                for j in 0..=n {
                    for i in 0..=n + 1 {
                        let left = d(n + 1, i, s(n, j, k));
                        let expected = if i < j {
                            s(n - 1, j - 1, d(n, i, k))
                        } else if i == j || i == j + 1 {
                            k
                        } else {
                            s(n - 1, j, d(n, i - 1, k))
                        };
                        if left != expected {
                            return Err(perr(path, "mixed identities fail"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

fn rational_string(v: &BigRational) -> String {
    if v.denom() == &num_bigint::BigInt::from(1) {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Renders a scenario-flavor certificate over the canonical section list.
pub fn certificate_to_value(
    scn: &Scenario,
    sections: &[BTreeMap<Vertex, Outcome>],
    cert: &Certificate<ScenarioKey>,
    semiring: &str,
) -> Value {
    let section_value = |j: usize| -> Value {
        let mut m = Map::new();
        for (v, o) in &sections[j] {
            m.insert(v.label(), Value::String(o.as_str().to_string()));
        }
        Value::Object(m)
    };
    let verdict = match cert.verdict() {
        Verdict::NonContextual => "noncontextual",
        Verdict::Contextual => "contextual",
    };
    let mut out = Map::new();
    out.insert("kind".into(), json!("certificate"));
    out.insert("version".into(), json!(FORMAT_VERSION));
    out.insert("semiring".into(), json!(semiring));
    out.insert("verdict".into(), json!(verdict));
    out.insert(
        "scenario".into(),
        json!({ "vertices": scn.complex().vertices().iter().map(Vertex::label).collect::<Vec<_>>() }),
    );
    match cert {
        Certificate::Mixture { weights } => {
            let rows: Vec<Value> = weights
                .iter()
                .map(|(j, w)| json!({ "section": section_value(*j), "w": w.to_string() }))
                .collect();
            out.insert("weights".into(), Value::Array(rows));
        }
        Certificate::Separation {
            coefficients,
            threshold,
            value,
        } => {
            let rows: Vec<Value> = coefficients
                .iter()
                .filter(|(_, c)| !num_traits::Zero::is_zero(c))
                .map(|((sigma, t), c)| {
                    json!({
                        "context": sigma.vertices().iter().map(Vertex::label).collect::<Vec<_>>(),
                        "outcome": section_to_value(t),
                        "c": rational_string(c),
                    })
                })
                .collect();
            out.insert(
                "witness".into(),
                json!({
                    "functional": {
                        "coefficients": rows,
                        "threshold": rational_string(threshold),
                        "value": rational_string(value),
                    }
                }),
            );
        }
        Certificate::SupportCover { sections: secs } => {
            let rows: Vec<Value> = secs.iter().map(|&j| section_value(j)).collect();
            out.insert("sections".into(), Value::Array(rows));
        }
        Certificate::SupportGap { witness: (sigma, t) } => {
            out.insert(
                "witness".into(),
                json!({
                    "context": sigma.vertices().iter().map(Vertex::label).collect::<Vec<_>>(),
                    "element": section_to_value(t),
                }),
            );
        }
    }
    Value::Object(out)
}

/// Shape validation for certificate documents (on re-parse).
pub fn validate_certificate_value(v: &Value, path: &str) -> Result<()> {
    let verdict = as_str(get(v, "verdict", path)?, &format!("{path}/verdict"))?;
    match verdict {
        "noncontextual" => {
            if v.get("weights").is_none() && v.get("sections").is_none() {
                return Err(perr(path, "noncontextual certificate carries no weights"));
            }
            if let Some(ws) = v.get("weights") {
                let rows = as_array(ws, &format!("{path}/weights"))?;
                let mut total = Rat::zero();
                for (i, row) in rows.iter().enumerate() {
                    let w = parse_weight_rational(
                        get(row, "w", &format!("{path}/weights/{i}"))?,
                        &format!("{path}/weights/{i}/w"),
                    )?;
                    total = total.add(&w);
                }
                if !total.is_one() {
                    return Err(perr(
                        &format!("{path}/weights"),
                        "weights do not sum to one",
                    ));
                }
            }
        }
        "contextual" => {
            if v.get("witness").is_none() {
                return Err(perr(path, "contextual certificate carries no witness"));
            }
        }
        other => return Err(perr(&format!("{path}/verdict"), format!("unknown verdict {other:?}"))),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Top-level parse / print
// ---------------------------------------------------------------------------

/// Parses any document, validating per kind. Returns the document plus
/// collected warnings.
pub fn parse_document(text: &str, cap: usize) -> Result<(WorkspaceDocument, Vec<String>)> {
    let v: Value = serde_json::from_str(text).map_err(|e| perr("", format!("not JSON: {e}")))?;
    let kind = as_str(get(&v, "kind", "")?, "/kind")?;
    if let Some(ver) = v.get("version") {
        let ver = as_str(ver, "/version")?;
        if ver != FORMAT_VERSION {
            return Err(perr("/version", format!("unrecognized version {ver:?}")));
        }
    }
    match kind {
        "scenario" => {
            let (scn, warnings) = scenario_from_value(&v, "", cap)?;
            Ok((WorkspaceDocument::Scenario(scn), warnings))
        }
        "bundle" => {
            let (b, warnings) = bundle_from_value(&v, "", cap)?;
            Ok((WorkspaceDocument::Bundle(b), warnings))
        }
        "model" => {
            let (m, warnings) = model_from_value(&v, "", cap)?;
            Ok((WorkspaceDocument::Model(m), warnings))
        }
        "morphism" => {
            let (m, warnings) = morphism_from_value(&v, "", cap)?;
            Ok((WorkspaceDocument::Morphism(m), warnings))
        }
        "sset" => {
            validate_sset_value(&v, "")?;
            Ok((WorkspaceDocument::SSet(v), Vec::new()))
        }
        "certificate" => {
            validate_certificate_value(&v, "")?;
            Ok((WorkspaceDocument::Certificate(v), Vec::new()))
        }
        "report" => Ok((WorkspaceDocument::Report(v), Vec::new())),
        other => Err(perr("/kind", format!("unknown document kind {other:?}"))),
    }
}

pub fn read_document(path: &std::path::Path, cap: usize) -> Result<(WorkspaceDocument, Vec<String>)> {
    let text = std::fs::read_to_string(path)?;
    parse_document(&text, cap)
}

/// Byte-stable pretty JSON (sorted keys come from the underlying map).
pub fn to_stable_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("valid JSON value");
    s.push('\n');
    s
}

/// Wraps a payload as a versioned document of the given kind.
pub fn document(kind: &str, fields: Vec<(&str, Value)>) -> Value {
    let mut out = Map::new();
    out.insert("kind".into(), json!(kind));
    out.insert("version".into(), json!(FORMAT_VERSION));
    for (k, v) in fields {
        out.insert(k.to_string(), v);
    }
    Value::Object(out)
}
