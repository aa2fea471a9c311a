//! Finite simplicial complexes, simplicial maps, stars, lifting checks,
//! fiber products, and fiber restriction.
//!
//! Complexes store the full downward-closed simplex set. Vertices are
//! interned structured names so that derived constructions (nerves, outcome
//! bundles, pull-backs) get canonical identities for free: a vertex is an
//! atom, an outcome point over a base vertex, a simplex viewed as a single
//! vertex, or a pull-back pair.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Default guard against exponential blowup when closing simplex sets.
pub const DEFAULT_SIMPLEX_CAP: usize = 1_000_000;

/// An outcome value attached to a measurement vertex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Outcome(Arc<str>);

impl Outcome {
    pub fn new(s: &str) -> Self {
        Outcome(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Structured vertex names. Every vertex in the crate is one of these.
#[derive(PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum VertexName {
    /// User-declared measurement label.
    Atom(String),
    /// Outcome point `(x, o)` over a base vertex; vertex of a canonical bundle.
    Point(Vertex, Outcome),
    /// A simplex viewed as a single vertex; vertex of a nerve complex.
    Set(Vec<Vertex>),
    /// A pull-back vertex `(a, b)`.
    Pair(Vertex, Vertex),
}

/// Interned vertex identifier with structural equality and a stable total
/// order. Identical names always share one allocation, so equality is a
/// pointer check.
#[derive(Clone)]
pub struct Vertex(Arc<VertexName>);

fn interner() -> &'static Mutex<HashSet<Arc<VertexName>>> {
    static INTERNER: OnceLock<Mutex<HashSet<Arc<VertexName>>>> = OnceLock::new();
    INTERNER.get_or_init(|| Mutex::new(HashSet::new()))
}

impl Vertex {
    fn intern(name: VertexName) -> Vertex {
        let mut table = interner().lock().expect("vertex interner poisoned");
        if let Some(existing) = table.get(&name) {
            return Vertex(Arc::clone(existing));
        }
        let arc = Arc::new(name);
        table.insert(Arc::clone(&arc));
        Vertex(arc)
    }

    pub fn atom(label: &str) -> Vertex {
        Vertex::intern(VertexName::Atom(label.to_string()))
    }

    pub fn point(base: &Vertex, outcome: &Outcome) -> Vertex {
        Vertex::intern(VertexName::Point(base.clone(), outcome.clone()))
    }

    pub fn from_simplex(s: &Simplex) -> Vertex {
        Vertex::intern(VertexName::Set(s.vertices().to_vec()))
    }

    pub fn pair(a: &Vertex, b: &Vertex) -> Vertex {
        Vertex::intern(VertexName::Pair(a.clone(), b.clone()))
    }

    pub fn name(&self) -> &VertexName {
        &self.0
    }

    /// The simplex a `Set` vertex stands for, if it is one.
    pub fn as_set(&self) -> Option<Simplex> {
        match self.name() {
            VertexName::Set(vs) => Some(Simplex::from_sorted(vs.clone())),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(Vertex, Vertex)> {
        match self.name() {
            VertexName::Pair(a, b) => Some((a.clone(), b.clone())),
            _ => None,
        }
    }

    pub fn as_point(&self) -> Option<(Vertex, Outcome)> {
        match self.name() {
            VertexName::Point(x, o) => Some((x.clone(), o.clone())),
            _ => None,
        }
    }

    /// Canonical rendered label, used by all serializers.
    pub fn label(&self) -> String {
        match self.name() {
            VertexName::Atom(s) => s.clone(),
            VertexName::Point(x, o) => format!("{}:{}", x.label(), o),
            VertexName::Set(vs) => {
                let inner: Vec<String> = vs.iter().map(Vertex::label).collect();
                format!("{{{}}}", inner.join(","))
            }
            VertexName::Pair(a, b) => format!("({}|{})", a.label(), b.label()),
        }
    }
}

impl PartialEq for Vertex {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}
impl Eq for Vertex {}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return std::cmp::Ordering::Equal;
        }
        self.0.cmp(&other.0)
    }
}
impl std::hash::Hash for Vertex {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}
impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A nonempty, strictly sorted, duplicate-free set of vertices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Simplex(Arc<[Vertex]>);

impl Simplex {
    /// Builds a simplex from vertices; duplicates collapse, empty input is
    /// rejected.
    pub fn new<I: IntoIterator<Item = Vertex>>(vs: I) -> Result<Simplex> {
        let set: BTreeSet<Vertex> = vs.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidSimplex("empty vertex set".into()));
        }
        Ok(Simplex(set.into_iter().collect()))
    }

    pub fn singleton(v: Vertex) -> Simplex {
        Simplex(Arc::from(vec![v]))
    }

    fn from_sorted(vs: Vec<Vertex>) -> Simplex {
        debug_assert!(vs.windows(2).all(|w| w[0] < w[1]) && !vs.is_empty());
        Simplex(Arc::from(vs))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.0.binary_search(v).is_ok()
    }

    pub fn is_subset(&self, other: &Simplex) -> bool {
        if self.len() > other.len() {
            return false;
        }
        self.0.iter().all(|v| other.contains(v))
    }

    pub fn union(&self, other: &Simplex) -> Simplex {
        let set: BTreeSet<Vertex> = self.0.iter().chain(other.0.iter()).cloned().collect();
        Simplex(set.into_iter().collect())
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a Simplex>>(parts: I) -> Result<Simplex> {
        let mut set: BTreeSet<Vertex> = BTreeSet::new();
        for s in parts {
            set.extend(s.vertices().iter().cloned());
        }
        if set.is_empty() {
            return Err(Error::InvalidSimplex("empty union".into()));
        }
        Ok(Simplex(set.into_iter().collect()))
    }

    /// All nonempty subsets, counted against `budget`.
    fn nonempty_subsets(&self, budget: usize) -> Result<Vec<Simplex>> {
        let k = self.len();
        if k > 25 || (1usize << k) - 1 > budget {
            return Err(Error::CapExceeded(format!(
                "closing a {k}-vertex simplex needs {} faces",
                if k > 25 { u64::MAX } else { (1u64 << k) - 1 }
            )));
        }
        let mut out = Vec::with_capacity((1 << k) - 1);
        for mask in 1u32..(1 << k) {
            let vs: Vec<Vertex> = (0..k)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.0[i].clone())
                .collect();
            out.push(Simplex::from_sorted(vs));
        }
        Ok(out)
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.0.iter().map(Vertex::label).collect();
        write!(f, "{{{}}}", inner.join(","))
    }
}

#[derive(PartialEq, Eq, Debug)]
struct ComplexData {
    vertices: Vec<Vertex>,
    simplices: BTreeSet<Simplex>,
    maximal: Vec<Simplex>,
}

/// A finite simplicial complex: a downward-closed family of simplices in
/// which every vertex appears as a 0-simplex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Complex(Arc<ComplexData>);

impl Complex {
    /// Smallest complex over `vertices` containing the given maximal
    /// simplices. Fails on an empty vertex set or when the closure would
    /// exceed `cap`.
    pub fn close_downward<I: IntoIterator<Item = Vertex>>(
        vertices: I,
        maximal: &[Simplex],
        cap: usize,
    ) -> Result<Complex> {
        let declared: BTreeSet<Vertex> = vertices.into_iter().collect();
        if declared.is_empty() {
            return Err(Error::InvalidComplex("empty vertex set".into()));
        }
        let mut simplices: BTreeSet<Simplex> = declared
            .iter()
            .map(|v| Simplex::singleton(v.clone()))
            .collect();
        for m in maximal {
            for v in m.vertices() {
                if !declared.contains(v) {
                    return Err(Error::InvalidComplex(format!(
                        "simplex {m} uses undeclared vertex {v}"
                    )));
                }
            }
            if simplices.len() > cap {
                return Err(Error::CapExceeded(format!("more than {cap} simplices")));
            }
            for face in m.nonempty_subsets(cap)? {
                simplices.insert(face);
                if simplices.len() > cap {
                    return Err(Error::CapExceeded(format!("more than {cap} simplices")));
                }
            }
        }
        Ok(Complex::from_closed(declared, simplices))
    }

    /// Like [`Complex::close_downward`] with the default cap.
    pub fn from_maximal<I: IntoIterator<Item = Vertex>>(
        vertices: I,
        maximal: &[Simplex],
    ) -> Result<Complex> {
        Complex::close_downward(vertices, maximal, DEFAULT_SIMPLEX_CAP)
    }

    /// Wraps an already downward-closed simplex set (checked).
    pub fn from_simplices(simplices: BTreeSet<Simplex>) -> Result<Complex> {
        if simplices.is_empty() {
            return Err(Error::InvalidComplex("empty complex".into()));
        }
        let mut vertices: BTreeSet<Vertex> = BTreeSet::new();
        for s in &simplices {
            vertices.extend(s.vertices().iter().cloned());
            if s.len() > 1 {
                // Spot-check downward closure on codimension-1 faces; full
                // closure follows by induction.
                for drop in 0..s.len() {
                    let face: Vec<Vertex> = s
                        .vertices()
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != drop)
                        .map(|(_, v)| v.clone())
                        .collect();
                    if !simplices.contains(&Simplex::from_sorted(face)) {
                        return Err(Error::InvalidComplex(format!(
                            "missing face of {s}: not downward closed"
                        )));
                    }
                }
            }
        }
        for v in &vertices {
            if !simplices.contains(&Simplex::singleton(v.clone())) {
                return Err(Error::InvalidComplex(format!("vertex {v} is not a 0-simplex")));
            }
        }
        Ok(Complex::from_closed(vertices, simplices))
    }

    fn from_closed(vertices: BTreeSet<Vertex>, simplices: BTreeSet<Simplex>) -> Complex {
        // Maximal faces: scan by decreasing size against maximals found so far.
        let mut by_size: Vec<&Simplex> = simplices.iter().collect();
        by_size.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        let mut maximal: Vec<Simplex> = Vec::new();
        for s in by_size {
            if !maximal.iter().any(|m| s.is_subset(m)) {
                maximal.push((*s).clone());
            }
        }
        maximal.sort();
        Complex(Arc::new(ComplexData {
            vertices: vertices.into_iter().collect(),
            simplices,
            maximal,
        }))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0.vertices
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.0.simplices.iter()
    }

    pub fn simplex_count(&self) -> usize {
        self.0.simplices.len()
    }

    pub fn maximal(&self) -> &[Simplex] {
        &self.0.maximal
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.0.simplices.contains(s)
    }

    pub fn contains_vertex(&self, v: &Vertex) -> bool {
        self.0.vertices.binary_search(v).is_ok()
    }

    /// Largest simplex size minus one.
    pub fn dim(&self) -> usize {
        self.0.maximal.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }

    /// The star `St(σ) = {σ′ ∈ Σ : σ ⊆ σ′}`, in canonical order.
    pub fn star(&self, s: &Simplex) -> Result<Vec<Simplex>> {
        if !self.contains(s) {
            return Err(Error::InvalidSimplex(format!("{s} is not a simplex here")));
        }
        Ok(self
            .simplices()
            .filter(|t| s.is_subset(t))
            .cloned()
            .collect())
    }
}

/// Flags of Definition-3.1 style map properties.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MapFlags {
    pub surjective: bool,
    pub locally_surjective: bool,
    pub discrete_over_vertices: bool,
}

impl MapFlags {
    pub fn bundle_scenario(&self) -> bool {
        self.surjective && self.locally_surjective && self.discrete_over_vertices
    }
}

/// A simplicial map determined by a vertex assignment under which the image
/// of every simplex is a simplex of the target.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComplexMap {
    source: Complex,
    target: Complex,
    map: BTreeMap<Vertex, Vertex>,
}

impl ComplexMap {
    pub fn new(source: Complex, target: Complex, map: BTreeMap<Vertex, Vertex>) -> Result<Self> {
        for v in source.vertices() {
            let Some(image) = map.get(v) else {
                return Err(Error::InvalidMap(format!("vertex {v} has no image")));
            };
            if !target.contains_vertex(image) {
                return Err(Error::InvalidMap(format!(
                    "image {image} of {v} is not a target vertex"
                )));
            }
        }
        let cm = ComplexMap { source, target, map };
        // Checking maximal simplices suffices: faces of simplices are simplices.
        for m in cm.source.maximal() {
            let image = cm.apply(m);
            if !cm.target.contains(&image) {
                return Err(Error::InvalidMap(format!(
                    "image {image} of simplex {m} is not a simplex"
                )));
            }
        }
        Ok(cm)
    }

    pub fn identity(c: &Complex) -> ComplexMap {
        let map = c.vertices().iter().map(|v| (v.clone(), v.clone())).collect();
        ComplexMap {
            source: c.clone(),
            target: c.clone(),
            map,
        }
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn vertex_map(&self) -> &BTreeMap<Vertex, Vertex> {
        &self.map
    }

    pub fn apply_vertex(&self, v: &Vertex) -> Vertex {
        self.map[v].clone()
    }

    pub fn apply(&self, s: &Simplex) -> Simplex {
        let set: BTreeSet<Vertex> = s.vertices().iter().map(|v| self.map[v].clone()).collect();
        Simplex(set.into_iter().collect::<Vec<_>>().into())
    }

    /// `g ∘ f` where `self` is applied first.
    pub fn then(&self, g: &ComplexMap) -> Result<ComplexMap> {
        if self.target != g.source {
            return Err(Error::InvalidMap("composition mismatch".into()));
        }
        let map = self
            .map
            .iter()
            .map(|(v, w)| (v.clone(), g.apply_vertex(w)))
            .collect();
        ComplexMap::new(self.source.clone(), g.target.clone(), map)
    }

    /// Groups source simplices by image.
    pub fn fibers(&self) -> BTreeMap<Simplex, Vec<Simplex>> {
        let mut fibers: BTreeMap<Simplex, Vec<Simplex>> = BTreeMap::new();
        for s in self.source.simplices() {
            fibers.entry(self.apply(s)).or_default().push(s.clone());
        }
        fibers
    }

    /// Direct checks of the three map properties.
    pub fn classify(&self) -> MapFlags {
        let fibers = self.fibers();
        let surjective = self.target.simplices().all(|t| fibers.contains_key(t));

        let mut locally_surjective = true;
        'outer: for gamma in self.source.simplices() {
            let image = self.apply(gamma);
            for tau in self.target.simplices().filter(|t| image.is_subset(t)) {
                let hit = fibers
                    .get(tau)
                    .map(|fs| fs.iter().any(|g| gamma.is_subset(g)))
                    .unwrap_or(false);
                if !hit {
                    locally_surjective = false;
                    break 'outer;
                }
            }
        }

        let mut discrete = true;
        'edges: for s in self.source.simplices().filter(|s| s.len() == 2) {
            let [x, y] = [&s.vertices()[0], &s.vertices()[1]];
            if self.map[x] == self.map[y] {
                discrete = false;
                break 'edges;
            }
        }

        MapFlags {
            surjective,
            locally_surjective,
            discrete_over_vertices: discrete,
        }
    }

    /// Unique face of `gamma` over `sub`, for maps that are discrete over
    /// vertices: the vertices of `gamma` sitting over `sub`.
    pub fn restrict_simplex(&self, gamma: &Simplex, sub: &Simplex) -> Result<Simplex> {
        let image = self.apply(gamma);
        if !sub.is_subset(&image) {
            return Err(Error::InvalidSimplex(format!(
                "{sub} is not a face of the image {image}"
            )));
        }
        let vs: Vec<Vertex> = gamma
            .vertices()
            .iter()
            .filter(|v| sub.contains(&self.map[v]))
            .cloned()
            .collect();
        Ok(Simplex::from_sorted(vs))
    }
}

/// A monotone map `[m] → [n]` of the simplex category, with `m = -1`
/// (the augmented empty object) encoded as an empty assignment.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Monotone {
    /// `values[i] = θ(i)`, nondecreasing, each `< n + 1`.
    pub values: Vec<usize>,
    /// Target is `[n]`.
    pub n: usize,
}

impl Monotone {
    pub fn new(values: Vec<usize>, n: usize) -> Result<Monotone> {
        if values.windows(2).any(|w| w[0] > w[1]) || values.iter().any(|&v| v > n) {
            return Err(Error::InvalidMap(format!(
                "not monotone into [{n}]: {values:?}"
            )));
        }
        Ok(Monotone { values, n })
    }

    /// The coface `d^i : [n-1] → [n]` skipping `i`.
    pub fn coface(i: usize, n: usize) -> Monotone {
        Monotone {
            values: (0..n).map(|j| if j < i { j } else { j + 1 }).collect(),
            n,
        }
    }

    /// The codegeneracy `s^j : [n+1] → [n]` doubling `j`.
    pub fn codegeneracy(j: usize, n: usize) -> Monotone {
        Monotone {
            values: (0..=n + 1).map(|i| if i <= j { i } else { i - 1 }).collect(),
            n,
        }
    }

    /// The inclusion of the empty object `[-1] → [n]`.
    pub fn augmented(n: usize) -> Monotone {
        Monotone { values: vec![], n }
    }
}

/// Searches for a diagonal lift in the square
///
/// ```text
///   Δ^m --top--> Γ
///    |θ          |f
///   Δ^n -bottom-> Σ
/// ```
///
/// `top` and `bottom` are vertex assignments (length `m+1` and `n+1`) whose
/// images must be simplices (or empty for the augmented object). Returns the
/// first lift in canonical order, or `None` when no lift exists. This is the
/// oracle side of the lifting characterization of map properties; it searches
/// by exhaustive vertex assignment with early pruning.
pub fn lifting_check(
    f: &ComplexMap,
    theta: &Monotone,
    top: &[Vertex],
    bottom: &[Vertex],
) -> Result<Option<Vec<Vertex>>> {
    if top.len() != theta.values.len() || bottom.len() != theta.n + 1 {
        return Err(Error::InvalidMap("square shape mismatch".into()));
    }
    if !top.is_empty() && !f.source.contains(&Simplex::new(top.iter().cloned())?) {
        return Err(Error::InvalidMap("top map image is not a simplex".into()));
    }
    if !f.target.contains(&Simplex::new(bottom.iter().cloned())?) {
        return Err(Error::InvalidMap("bottom map image is not a simplex".into()));
    }
    for (i, v) in top.iter().enumerate() {
        if f.apply_vertex(v) != bottom[theta.values[i]] {
            return Err(Error::InvalidMap("square does not commute".into()));
        }
    }

    // Candidates per slot: forced by top where θ hits, else the vertex fiber.
    let mut forced: Vec<Option<Vertex>> = vec![None; bottom.len()];
    for (i, v) in top.iter().enumerate() {
        let slot = theta.values[i];
        if let Some(prev) = &forced[slot] {
            if prev != v {
                return Ok(None);
            }
        }
        forced[slot] = Some(v.clone());
    }
    let mut candidates: Vec<Vec<Vertex>> = Vec::with_capacity(bottom.len());
    for (j, b) in bottom.iter().enumerate() {
        match &forced[j] {
            Some(v) => candidates.push(vec![v.clone()]),
            None => candidates.push(
                f.source
                    .vertices()
                    .iter()
                    .filter(|v| &f.apply_vertex(v) == b)
                    .cloned()
                    .collect(),
            ),
        }
    }

    fn search(
        f: &ComplexMap,
        candidates: &[Vec<Vertex>],
        chosen: &mut Vec<Vertex>,
    ) -> Option<Vec<Vertex>> {
        if chosen.len() == candidates.len() {
            return Some(chosen.clone());
        }
        let slot = chosen.len();
        for v in &candidates[slot] {
            chosen.push(v.clone());
            // Partial image must stay a simplex (downward closure makes this
            // a sound prune).
            let partial = Simplex::new(chosen.iter().cloned()).expect("nonempty");
            if f.source.contains(&partial) {
                if let Some(hit) = search(f, candidates, chosen) {
                    return Some(hit);
                }
            }
            chosen.pop();
        }
        None
    }

    Ok(search(f, &candidates, &mut Vec::new()))
}

/// Enumerates every function `[n] → vertices(c)` whose image is a simplex.
pub fn simplex_maps_into(c: &Complex, n: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let mut cur: Vec<Vertex> = Vec::new();
    fn rec(c: &Complex, n: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == n + 1 {
            out.push(cur.clone());
            return;
        }
        for v in c.vertices() {
            cur.push(v.clone());
            let image = Simplex::new(cur.iter().cloned()).expect("nonempty");
            if c.contains(&image) {
                rec(c, n, cur, out);
            }
            cur.pop();
        }
    }
    rec(c, n, &mut cur, &mut out);
    out
}

/// Decides the three map properties through lifting conditions only.
///
/// Surjectivity uses squares over the augmented object, local surjectivity
/// the last cofaces `d^n`, and discreteness the codegeneracy `s^0`; all in
/// the dimension range the underlying complexes can exercise.
pub fn classify_via_lifting(f: &ComplexMap) -> Result<MapFlags> {
    let dim_t = f.target.dim();

    let mut surjective = true;
    'surj: for n in 0..=dim_t {
        let theta = Monotone::augmented(n);
        for bottom in simplex_maps_into(&f.target, n) {
            if lifting_check(f, &theta, &[], &bottom)?.is_none() {
                surjective = false;
                break 'surj;
            }
        }
    }

    let mut locally_surjective = true;
    'ls: for n in 1..=dim_t + 1 {
        let theta = Monotone::coface(n, n);
        for top in simplex_maps_into(&f.source, n - 1) {
            let base: Vec<Vertex> = top.iter().map(|v| f.apply_vertex(v)).collect();
            for extra in f.target.vertices() {
                let mut bottom = base.clone();
                bottom.push(extra.clone());
                if !f
                    .target
                    .contains(&Simplex::new(bottom.iter().cloned())?)
                {
                    continue;
                }
                if lifting_check(f, &theta, &top, &bottom)?.is_none() {
                    locally_surjective = false;
                    break 'ls;
                }
            }
        }
    }

    let mut discrete = true;
    let theta = Monotone::codegeneracy(0, 0);
    'dv: for top in simplex_maps_into(&f.source, 1) {
        let (a, b) = (&top[0], &top[1]);
        if f.apply_vertex(a) != f.apply_vertex(b) {
            continue;
        }
        let bottom = vec![f.apply_vertex(a)];
        if lifting_check(f, &theta, &top, &bottom)?.is_none() {
            discrete = false;
            break 'dv;
        }
    }

    Ok(MapFlags {
        surjective,
        locally_surjective,
        discrete_over_vertices: discrete,
    })
}

/// The fiber product of `f : Γ → Σ` (required to classify as a bundle
/// scenario) and `π : Σ′ → Σ`: vertices are compatible pairs `(x, y)` with
/// `f(x) = π(y)`, simplices are the pair sets whose two projections are
/// simplices.
pub struct Pullback {
    pub complex: Complex,
    /// First projection, onto the source of `f`.
    pub to_total: ComplexMap,
    /// Second projection, onto the source of `π`.
    pub to_base: ComplexMap,
}

pub fn pull_back(f: &ComplexMap, pi: &ComplexMap, cap: usize) -> Result<Pullback> {
    if f.target != *pi.target() {
        return Err(Error::InvalidMap("cospan targets differ".into()));
    }
    if !f.classify().bundle_scenario() {
        return Err(Error::NotBundle(
            "pull-backs are formed along bundle scenarios".into(),
        ));
    }
    let mut vertices: BTreeSet<Vertex> = BTreeSet::new();
    let mut tops: Vec<Simplex> = Vec::new();
    for gamma in f.source.maximal() {
        for sigma in pi.source().maximal() {
            let mut compatible: Vec<Vertex> = Vec::new();
            for x in gamma.vertices() {
                for y in sigma.vertices() {
                    if f.apply_vertex(x) == pi.apply_vertex(y) {
                        compatible.push(Vertex::pair(x, y));
                    }
                }
            }
            if compatible.is_empty() {
                continue;
            }
            vertices.extend(compatible.iter().cloned());
            tops.push(Simplex::new(compatible)?);
        }
    }
    if vertices.is_empty() {
        return Err(Error::InvalidComplex("empty pull-back".into()));
    }
    let complex = Complex::close_downward(vertices, &tops, cap)?;
    let mut first: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    let mut second: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for v in complex.vertices() {
        let (a, b) = v.as_pair().expect("pull-back vertex");
        first.insert(v.clone(), a);
        second.insert(v.clone(), b);
    }
    let to_total = ComplexMap::new(complex.clone(), f.source.clone(), first)?;
    let to_base = ComplexMap::new(complex.clone(), pi.source().clone(), second)?;
    Ok(Pullback {
        complex,
        to_total,
        to_base,
    })
}

/// Checks the universal property of a commuting square
///
/// ```text
///   P --p1--> A
///   |p2       |f
///   B --pi--> C
/// ```
///
/// by exhaustive search: for every pair of test maps `Δ^k → A`, `Δ^k → B`
/// (`k ≤ max_dim`) agreeing in `C`, exactly one mediating map `Δ^k → P`
/// exists. Test-scale only.
pub fn verify_pullback_square(
    p1: &ComplexMap,
    p2: &ComplexMap,
    f: &ComplexMap,
    pi: &ComplexMap,
    max_dim: usize,
) -> Result<bool> {
    if p1.source() != p2.source() || f.target() != pi.target() {
        return Err(Error::InvalidMap("square shape mismatch".into()));
    }
    if p1.then(f)? != p2.then(pi)? {
        return Ok(false);
    }
    let p = p1.source();
    for k in 0..=max_dim {
        let into_p = simplex_maps_into(p, k);
        for u in simplex_maps_into(f.source(), k) {
            for v in simplex_maps_into(pi.source(), k) {
                let agree = u
                    .iter()
                    .zip(&v)
                    .all(|(a, b)| f.apply_vertex(a) == pi.apply_vertex(b));
                if !agree {
                    continue;
                }
                let mediating = into_p
                    .iter()
                    .filter(|w| {
                        w.iter().zip(&u).all(|(x, a)| &p1.apply_vertex(x) == a)
                            && w.iter().zip(&v).all(|(x, b)| &p2.apply_vertex(x) == b)
                    })
                    .count();
                if mediating != 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
