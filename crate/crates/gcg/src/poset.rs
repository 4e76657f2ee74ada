//! One-dimensional posets (small and big vertices with an incidence relation),
//! their geometric realisations, girth, hugeness and the structural convention
//! checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

/// A poset vertex id, as it appears in files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Small,
    Big,
}

/// A structural invariant violation of the poset data itself.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum PosetError {
    #[error("vertex {vertex} is listed as both small and big")]
    KindOverlap { vertex: VertexId },
    #[error("vertex {vertex} is listed twice")]
    DuplicateVertex { vertex: VertexId },
    #[error("incidence ({small}, {big}) refers to a vertex that is not a small/big pair")]
    UnknownVertex { small: VertexId, big: VertexId },
    #[error("incidence ({small}, {big}) is listed twice")]
    DuplicateIncidence { small: VertexId, big: VertexId },
    #[error("vertex {vertex} is not a small vertex")]
    NotSmall { vertex: VertexId },
    #[error("unknown vertex {vertex}")]
    NoSuchVertex { vertex: VertexId },
}

/// Serialized poset: `{"small": [ids], "big": [ids], "edges": [[small, big], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetData {
    pub small: Vec<VertexId>,
    pub big: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId)>,
}

/// A finite 1-dimensional poset. Vertices are kept sorted by id, small ones
/// first; dense indices follow that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneDimPoset {
    small: Vec<VertexId>,
    big: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
    index: BTreeMap<VertexId, usize>,
    // dense adjacency: for a small index, its big indices; for a big, its smalls
    adj: Vec<Vec<usize>>,
}

impl OneDimPoset {
    pub fn new(
        small: impl IntoIterator<Item = VertexId>,
        big: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, PosetError> {
        Self::from_data(PosetData {
            small: small.into_iter().collect(),
            big: big.into_iter().collect(),
            edges: edges.into_iter().collect(),
        })
    }

    pub fn from_data(data: PosetData) -> Result<Self, PosetError> {
        let mut small = data.small;
        let mut big = data.big;
        let mut seen = BTreeSet::new();
        for &v in &small {
            if !seen.insert(v) {
                return Err(PosetError::DuplicateVertex { vertex: v });
            }
        }
        let small_set = seen.clone();
        for &v in &big {
            if small_set.contains(&v) {
                return Err(PosetError::KindOverlap { vertex: v });
            }
            if !seen.insert(v) {
                return Err(PosetError::DuplicateVertex { vertex: v });
            }
        }
        small.sort_unstable();
        big.sort_unstable();
        let big_set: BTreeSet<_> = big.iter().copied().collect();
        let mut pairs = BTreeSet::new();
        for &(s, b) in &data.edges {
            if !small_set.contains(&s) || !big_set.contains(&b) {
                return Err(PosetError::UnknownVertex { small: s, big: b });
            }
            if !pairs.insert((s, b)) {
                return Err(PosetError::DuplicateIncidence { small: s, big: b });
            }
        }
        let edges: Vec<_> = pairs.into_iter().collect();
        let index: BTreeMap<VertexId, usize> =
            small.iter().chain(big.iter()).enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); small.len() + big.len()];
        for &(s, b) in &edges {
            let (i, j) = (index[&s], index[&b]);
            adj[i].push(j);
            adj[j].push(i);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Self { small, big, edges, index, adj })
    }

    pub fn to_data(&self) -> PosetData {
        PosetData { small: self.small.clone(), big: self.big.clone(), edges: self.edges.clone() }
    }

    pub fn small(&self) -> &[VertexId] {
        &self.small
    }

    pub fn big(&self) -> &[VertexId] {
        &self.big
    }

    /// Incidence pairs `(small, big)`, sorted.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.small.len() + self.big.len()
    }

    pub fn small_count(&self) -> usize {
        self.small.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    pub fn kind(&self, v: VertexId) -> Option<VertexKind> {
        self.index.get(&v).map(|&i| self.kind_of(i))
    }

    /// Dense index of a vertex.
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.index.get(&v).copied()
    }

    /// Vertex id at a dense index.
    pub fn id_of(&self, i: usize) -> VertexId {
        if i < self.small.len() {
            self.small[i]
        } else {
            self.big[i - self.small.len()]
        }
    }

    pub fn kind_of(&self, i: usize) -> VertexKind {
        if i < self.small.len() {
            VertexKind::Small
        } else {
            VertexKind::Big
        }
    }

    /// Dense neighbours of a dense vertex (bigs above a small, smalls below a big).
    pub fn neighbors_of(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn valence(&self, v: VertexId) -> Option<usize> {
        self.index_of(v).map(|i| self.adj[i].len())
    }

    /// Big vertices above a small one, as ids.
    pub fn bigs_above(&self, v: VertexId) -> Vec<VertexId> {
        self.index_of(v).map_or_else(Vec::new, |i| self.adj[i].iter().map(|&j| self.id_of(j)).collect())
    }

    /// Small vertices below a big one, as ids.
    pub fn smalls_below(&self, w: VertexId) -> Vec<VertexId> {
        self.bigs_above(w)
    }

    pub fn is_incident(&self, small: VertexId, big: VertexId) -> bool {
        self.edges.binary_search(&(small, big)).is_ok()
    }

    /// Dense index of an edge in [`Self::edges`].
    pub fn edge_index(&self, small: VertexId, big: VertexId) -> Option<usize> {
        self.edges.binary_search(&(small, big)).ok()
    }

    /// The realisation graph on dense indices.
    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.vertex_count(), self.edges.iter().map(|(s, b)| (self.index[s], self.index[b])))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph poset {\n  node [shape=circle];\n");
        for v in &self.small {
            out.push_str(&format!("  {v} [style=filled, fillcolor=gray];\n"));
        }
        for w in &self.big {
            out.push_str(&format!("  {w} [style=filled, fillcolor=white];\n"));
        }
        for (s, b) in &self.edges {
            out.push_str(&format!("  {s} -- {b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

impl Serialize for OneDimPoset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_data().serialize(s)
    }
}

impl<'de> Deserialize<'de> for OneDimPoset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Self::from_data(PosetData::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// The geometric realisation |Q|: one vertex per poset element, one edge per
/// incidence pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealisationGraph {
    pub ids: Vec<VertexId>,
    pub kinds: Vec<VertexKind>,
    pub graph: Graph,
}

impl RealisationGraph {
    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }
}

pub fn realise(q: &OneDimPoset) -> RealisationGraph {
    RealisationGraph {
        ids: (0..q.vertex_count()).map(|i| q.id_of(i)).collect(),
        kinds: (0..q.vertex_count()).map(|i| q.kind_of(i)).collect(),
        graph: q.graph(),
    }
}

/// Girth of a graph: a cycle length in edges, or infinite for forests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    pub fn finite(self) -> Option<usize> {
        match self {
            Girth::Finite(n) => Some(n),
            Girth::Infinite => None,
        }
    }

    /// Whether the girth is at least `n`.
    pub fn at_least(self, n: usize) -> bool {
        match self {
            Girth::Finite(g) => g >= n,
            Girth::Infinite => true,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(n) => write!(f, "{n}"),
            Girth::Infinite => write!(f, "infinite"),
        }
    }
}

pub fn girth(g: &RealisationGraph) -> Girth {
    g.graph.girth().map_or(Girth::Infinite, Girth::Finite)
}

/// Verdict of [`check_huge`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HugeCertificate {
    pub k: usize,
    pub girth: Girth,
    pub holds: bool,
    /// A shortest cycle of |Q| when the check fails.
    pub witness: Option<Vec<VertexId>>,
}

/// k-hugeness: every embedded cycle of |Q| has at least `k` small vertices,
/// i.e. the realisation has girth at least `2k`.
pub fn check_huge(q: &OneDimPoset, k: usize) -> HugeCertificate {
    let r = realise(q);
    let cycle = r.graph.shortest_cycle();
    let girth = cycle.as_ref().map_or(Girth::Infinite, |c| Girth::Finite(c.len()));
    let holds = girth.at_least(2 * k);
    let witness = if holds { None } else { cycle.map(|c| c.into_iter().map(|i| r.ids[i]).collect()) };
    HugeCertificate { k, girth, holds, witness }
}

/// The largest `k` for which `q` is k-huge (`None` when the realisation is a forest).
pub fn hugeness(q: &OneDimPoset) -> Option<usize> {
    q.graph().girth().map(|g| g / 2)
}

/// One failed structural convention, with a witness vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum ConventionFailure {
    Disconnected { unreachable: VertexId },
    ValenceOne { vertex: VertexId },
    CutVertex { vertex: VertexId },
    TooFewVertices { vertex: Option<VertexId> },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionReport {
    pub failures: Vec<ConventionFailure>,
}

impl ConventionReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Connectivity, absence of valence-one vertices, absence of cut vertices and
/// more than one vertex.
pub fn check_convention(q: &OneDimPoset) -> ConventionReport {
    let g = q.graph();
    let mut failures = Vec::new();
    if q.vertex_count() <= 1 {
        failures.push(ConventionFailure::TooFewVertices { vertex: (q.vertex_count() == 1).then(|| q.id_of(0)) });
    }
    let comps = g.components();
    if comps.len() > 1 {
        failures.push(ConventionFailure::Disconnected { unreachable: q.id_of(comps[1][0]) });
    }
    for i in 0..g.len() {
        if g.degree(i) == 1 {
            failures.push(ConventionFailure::ValenceOne { vertex: q.id_of(i) });
        }
    }
    for i in g.articulation_points() {
        failures.push(ConventionFailure::CutVertex { vertex: q.id_of(i) });
    }
    ConventionReport { failures }
}

/// Repeatedly removes valence-one vertices.
pub fn simplify(q: &OneDimPoset) -> OneDimPoset {
    let mut alive: BTreeSet<VertexId> = q.small().iter().chain(q.big()).copied().collect();
    let mut edges: BTreeSet<(VertexId, VertexId)> = q.edges().iter().copied().collect();
    loop {
        let mut degree: BTreeMap<VertexId, usize> = alive.iter().map(|&v| (v, 0)).collect();
        for (s, b) in &edges {
            *degree.get_mut(s).unwrap() += 1;
            *degree.get_mut(b).unwrap() += 1;
        }
        let leaves: BTreeSet<VertexId> = degree.iter().filter(|(_, &d)| d == 1).map(|(&v, _)| v).collect();
        if leaves.is_empty() {
            break;
        }
        alive.retain(|v| !leaves.contains(v));
        edges.retain(|(s, b)| !leaves.contains(s) && !leaves.contains(b));
    }
    OneDimPoset::new(
        q.small().iter().copied().filter(|v| alive.contains(v)),
        q.big().iter().copied().filter(|v| alive.contains(v)),
        edges,
    )
    .expect("a sub-poset of a valid poset is valid")
}

/// The star of a small vertex: the vertex, its incident edges and their big ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpSet {
    pub small: VertexId,
    pub bigs: Vec<VertexId>,
}

impl UpSet {
    pub fn edge_count(&self) -> usize {
        self.bigs.len()
    }

    /// Edge-path diameter of the star.
    pub fn diameter(&self) -> usize {
        match self.bigs.len() {
            0 => 0,
            1 => 1,
            _ => 2,
        }
    }
}

pub fn up_set(q: &OneDimPoset, v: VertexId) -> Result<UpSet, PosetError> {
    match q.kind(v) {
        None => Err(PosetError::NoSuchVertex { vertex: v }),
        Some(VertexKind::Big) => Err(PosetError::NotSmall { vertex: v }),
        Some(VertexKind::Small) => Ok(UpSet { small: v, bigs: q.bigs_above(v) }),
    }
}

/// The poset of simplices of a graph given by vertex count and edge list:
/// graph vertices become small vertices `0..n` and edge `i` becomes big vertex
/// `n + i`. Used for Coxeter-type families where vertices carry the small groups.
pub fn simplices_poset(n: usize, edges: &[(usize, usize)]) -> Result<OneDimPoset, PosetError> {
    let small = (0..n as u32).map(VertexId);
    let big = (0..edges.len() as u32).map(|i| VertexId(n as u32 + i));
    let inc = edges.iter().enumerate().flat_map(|(i, &(a, b))| {
        let w = VertexId((n + i) as u32);
        [(VertexId(a as u32), w), (VertexId(b as u32), w)]
    });
    OneDimPoset::new(small, big, inc)
}

/// The poset of simplices of an `n`-cycle (vertices small, edges big).
pub fn cycle_poset(n: usize) -> OneDimPoset {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    simplices_poset(n, &edges).expect("cycle is a simple graph for n >= 3")
}
