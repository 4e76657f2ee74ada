//! Hexagonal tori, hexagon patches and flat certificates.
//!
//! Hexagons use axial coordinates. A tiling vertex is a corner shared by
//! three hexagons: `Up(h) = {h, h+(1,0), h+(0,1)}` and
//! `Down(h) = {h+(1,0), h+(0,1), h+(1,1)}`. A tiling edge is named by the
//! hexagon `h` and the direction `d` with the other side at `h + DIRECTIONS[d]`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::develop::{develop_focused, resolve_word, CellId, DevelopedBall, GroupWord};
use crate::gcog::{validate, verify_triple, GraphicalComplexOfGroups, ProperTripleWitness};
use crate::graph::Graph;
use crate::poset::{self, Girth, OneDimPoset, PosetError, VertexId};
use crate::smallcancel::AngleAssignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Hex {
    pub q: i64,
    pub r: i64,
}

impl Hex {
    pub const fn new(q: i64, r: i64) -> Self {
        Self { q, r }
    }

    /// Number of hexagon steps between two hexagons.
    pub fn distance(self, other: Hex) -> i64 {
        let d = other - self;
        (d.q.abs() + d.r.abs() + (d.q + d.r).abs()) / 2
    }
}

impl Add for Hex {
    type Output = Hex;
    fn add(self, o: Hex) -> Hex {
        Hex::new(self.q + o.q, self.r + o.r)
    }
}

impl Sub for Hex {
    type Output = Hex;
    fn sub(self, o: Hex) -> Hex {
        Hex::new(self.q - o.q, self.r - o.r)
    }
}

impl Neg for Hex {
    type Output = Hex;
    fn neg(self) -> Hex {
        Hex::new(-self.q, -self.r)
    }
}

/// The three edge directions; the other three neighbours are their negatives.
pub const DIRECTIONS: [Hex; 3] = [Hex::new(1, 0), Hex::new(0, 1), Hex::new(1, -1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corner {
    Up,
    Down,
}

/// The three hexagons meeting at a tiling vertex.
pub fn corner_hexes(h: Hex, c: Corner) -> [Hex; 3] {
    match c {
        Corner::Up => [h, h + Hex::new(1, 0), h + Hex::new(0, 1)],
        Corner::Down => [h + Hex::new(1, 0), h + Hex::new(0, 1), h + Hex::new(1, 1)],
    }
}

/// The tiling edge between two adjacent hexagons, as `(hex, direction)`.
pub fn edge_between(a: Hex, b: Hex) -> Option<(Hex, usize)> {
    let d = b - a;
    if let Some(k) = DIRECTIONS.iter().position(|&x| x == d) {
        return Some((a, k));
    }
    DIRECTIONS.iter().position(|&x| x == -d).map(|k| (b, k))
}

/// The three tiling edges at a tiling vertex.
pub fn corner_edges(h: Hex, c: Corner) -> [(Hex, usize); 3] {
    let [a, b, x] = corner_hexes(h, c);
    [edge_between(a, b).unwrap(), edge_between(a, x).unwrap(), edge_between(b, x).unwrap()]
}

/// The two tiling vertices at the ends of a tiling edge.
pub fn edge_corners(h: Hex, dir: usize) -> [(Hex, Corner); 2] {
    match dir {
        0 => [(h, Corner::Up), (h - Hex::new(0, 1), Corner::Down)],
        1 => [(h, Corner::Up), (h - Hex::new(1, 0), Corner::Down)],
        _ => [(h - Hex::new(0, 1), Corner::Up), (h - Hex::new(0, 1), Corner::Down)],
    }
}

/// Tiling vertices around a hexagon.
pub fn hex_corners(h: Hex) -> [(Hex, Corner); 6] {
    [
        (h, Corner::Up),
        (h - Hex::new(1, 0), Corner::Up),
        (h - Hex::new(0, 1), Corner::Up),
        (h - Hex::new(1, 0), Corner::Down),
        (h - Hex::new(0, 1), Corner::Down),
        (h - Hex::new(1, 1), Corner::Down),
    ]
}

/// An element of the hexagon boundary: a tiling edge or a tiling vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundaryItem {
    Edge(Hex, usize),
    Vertex(Hex, Corner),
}

/// The boundary 12-cycle of a hexagon, alternating tiling edges and tiling
/// vertices.
pub fn hex_boundary(h: Hex) -> Vec<BoundaryItem> {
    let corners = hex_corners(h);
    let edges: Vec<(Hex, usize)> =
        DIRECTIONS.iter().flat_map(|&d| [edge_between(h, h + d).unwrap(), edge_between(h, h - d).unwrap()]).collect();
    let touches = |e: (Hex, usize), c: (Hex, Corner)| edge_corners(e.0, e.1).contains(&c);
    let mut out = vec![BoundaryItem::Edge(edges[0].0, edges[0].1)];
    let mut used_edges = BTreeSet::from([edges[0]]);
    let mut used_corners = BTreeSet::new();
    let mut current = edges[0];
    while let Some(&c) = corners.iter().find(|&&c| !used_corners.contains(&c) && touches(current, c)) {
        used_corners.insert(c);
        out.push(BoundaryItem::Vertex(c.0, c.1));
        let Some(&e) = edges.iter().find(|&&e| !used_edges.contains(&e) && touches(e, c)) else { break };
        used_edges.insert(e);
        out.push(BoundaryItem::Edge(e.0, e.1));
        current = e;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum FlatError {
    #[error("translations {0:?} and {1:?} are linearly dependent")]
    DegenerateLattice(Hex, Hex),
    #[error("torus quotient is not a simple poset: {0}")]
    QuotientNotSimple(String),
    #[error("torus poset has realisation girth {girth:?}, not 12")]
    GirthNotSix { girth: Option<usize> },
    #[error("patch {width}x{height} must be at least 1x1")]
    PatchSize { width: usize, height: usize },
    #[error("small vertex {0} of the patch is missing or not of order 2")]
    NotKleinShaped(VertexId),
    #[error("hexagon {0} is outside the patch")]
    HexOutOfPatch(usize),
}

impl From<PosetError> for FlatError {
    fn from(e: PosetError) -> Self {
        FlatError::QuotientNotSimple(e.to_string())
    }
}

/// The quotient of the hexagonal tiling by the lattice spanned by
/// `(a, b)` and `(0, d)`, kept in Hermite normal form (`0 <= b < d`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HexTorus {
    a: i64,
    b: i64,
    d: i64,
}

fn ext_gcd(x: i64, y: i64) -> (i64, i64, i64) {
    if y == 0 {
        (x, 1, 0)
    } else {
        let (g, s, t) = ext_gcd(y, x.rem_euclid(y));
        (g, t, s - x.div_euclid(y) * t)
    }
}

impl HexTorus {
    pub fn from_translations(t1: Hex, t2: Hex) -> Result<Self, FlatError> {
        let det = t1.q * t2.r - t1.r * t2.q;
        if det == 0 {
            return Err(FlatError::DegenerateLattice(t1, t2));
        }
        let (mut g, x, y) = ext_gcd(t1.q, t2.q);
        let mut r1 = x * t1.r + y * t2.r;
        if g < 0 {
            g = -g;
            r1 = -r1;
        }
        let d = (det / g).abs();
        Ok(Self { a: g, b: r1.rem_euclid(d), d })
    }

    /// Every torus with `n` hexagons, in the order `a`, then `b`.
    pub fn with_hex_count(n: usize) -> Vec<Self> {
        let n = n as i64;
        (1..=n)
            .filter(|a| n % a == 0)
            .flat_map(|a| {
                let d = n / a;
                (0..d).map(move |b| Self { a, b, d })
            })
            .collect()
    }

    /// The torus with fewest hexagons whose poset realisation has girth 12;
    /// ties go to the first in [`HexTorus::with_hex_count`] order.
    pub fn smallest_girth_six() -> Self {
        (1..).flat_map(Self::with_hex_count).find(|t| t.check_girth_six().is_ok()).expect("girth-six tori exist")
    }

    pub fn translations(&self) -> [Hex; 2] {
        [Hex::new(self.a, self.b), Hex::new(0, self.d)]
    }

    pub fn hex_count(&self) -> usize {
        (self.a * self.d) as usize
    }

    /// The representative with `0 <= q < a` and `0 <= r < d`.
    pub fn reduce(&self, h: Hex) -> Hex {
        let k = h.q.div_euclid(self.a);
        Hex::new(h.q - k * self.a, (h.r - k * self.b).rem_euclid(self.d))
    }

    pub fn hex_index(&self, h: Hex) -> usize {
        let h = self.reduce(h);
        (h.q * self.d + h.r) as usize
    }

    pub fn hex_at(&self, index: usize) -> Hex {
        let i = index as i64;
        Hex::new(i / self.d, i % self.d)
    }

    /// Small vertex of the tiling edge `(h, dir)`: `3·index + dir`.
    pub fn small_id(&self, h: Hex, dir: usize) -> VertexId {
        VertexId((3 * self.hex_index(h) + dir) as u32)
    }

    /// Big vertex of a tiling vertex: `3n + 2·index + (0 up, 1 down)`.
    pub fn big_id(&self, h: Hex, c: Corner) -> VertexId {
        let k = match c {
            Corner::Up => 0,
            Corner::Down => 1,
        };
        VertexId((3 * self.hex_count() + 2 * self.hex_index(h) + k) as u32)
    }

    fn boundary_id(&self, item: BoundaryItem) -> VertexId {
        match item {
            BoundaryItem::Edge(h, d) => self.small_id(h, d),
            BoundaryItem::Vertex(h, c) => self.big_id(h, c),
        }
    }

    /// Poset of simplices of the quotient tiling: tiling edges below the
    /// tiling vertices at their ends.
    pub fn poset(&self) -> Result<OneDimPoset, FlatError> {
        let n = self.hex_count();
        let small: Vec<VertexId> = (0..n).flat_map(|i| (0..3).map(move |d| VertexId((3 * i + d) as u32))).collect();
        let mut big = Vec::new();
        let mut edges = Vec::new();
        for i in 0..n {
            let h = self.hex_at(i);
            for c in [Corner::Up, Corner::Down] {
                let w = self.big_id(h, c);
                big.push(w);
                for (eh, d) in corner_edges(h, c) {
                    edges.push((self.small_id(eh, d), w));
                }
            }
        }
        let unique: BTreeSet<_> = edges.iter().collect();
        if unique.len() != edges.len() {
            return Err(FlatError::QuotientNotSimple("a tiling vertex meets one tiling edge twice".into()));
        }
        Ok(OneDimPoset::new(small, big, edges)?)
    }

    pub fn check_girth_six(&self) -> Result<(), FlatError> {
        let p = self.poset()?;
        match poset::girth(&poset::realise(&p)) {
            Girth::Finite(12) => Ok(()),
            g => Err(FlatError::GirthNotSix { girth: g.finite() }),
        }
    }
}

/// Two adjacent hexagons of a patch and the tiling edge between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchAdjacency {
    pub hexes: (usize, usize),
    pub small: VertexId,
    /// Big vertices at the two ends of the shared edge.
    pub bigs: [VertexId; 2],
}

/// A tiling vertex inside the patch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchCorner {
    pub hexes: [usize; 3],
    pub big: VertexId,
    /// Smalls between hexes (0,1), (0,2), (1,2).
    pub smalls: [VertexId; 3],
}

/// A `width × height` parallelogram of hexagons over a torus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexPatch {
    pub torus: HexTorus,
    pub width: usize,
    pub height: usize,
    /// Indexed by `r·width + q`.
    pub hexes: Vec<Hex>,
    pub adjacencies: Vec<PatchAdjacency>,
    pub corners: Vec<PatchCorner>,
}

impl HexPatch {
    pub fn index(&self, h: Hex) -> Option<usize> {
        let inside = (0..self.width as i64).contains(&h.q) && (0..self.height as i64).contains(&h.r);
        inside.then(|| h.r as usize * self.width + h.q as usize)
    }

    /// A hexagon graph path from hex 0 reaches everything within this many steps.
    pub fn diameter(&self) -> usize {
        self.width + self.height - 2
    }

    /// Ball radius that resolves every hexagon and checks every adjacency.
    pub fn required_radius(&self) -> u32 {
        (self.diameter() + 1) as u32
    }

    pub fn hex_graph(&self) -> Graph {
        Graph::from_edges(self.hexes.len(), self.adjacencies.iter().map(|a| a.hexes))
    }

    fn small_of(&self, a: Hex, b: Hex) -> VertexId {
        let (h, d) = edge_between(a, b).expect("adjacent hexes");
        self.torus.small_id(h, d)
    }
}

pub fn build_hex_patch(width: usize, height: usize, torus: &HexTorus) -> Result<HexPatch, FlatError> {
    if width == 0 || height == 0 {
        return Err(FlatError::PatchSize { width, height });
    }
    let hexes: Vec<Hex> = (0..height as i64).flat_map(|r| (0..width as i64).map(move |q| Hex::new(q, r))).collect();
    let mut patch = HexPatch { torus: *torus, width, height, hexes, adjacencies: Vec::new(), corners: Vec::new() };
    for (i, &h) in patch.hexes.iter().enumerate() {
        for (dir, &d) in DIRECTIONS.iter().enumerate() {
            if let Some(j) = patch.index(h + d) {
                let [c1, c2] = edge_corners(h, dir);
                patch.adjacencies.push(PatchAdjacency {
                    hexes: (i, j),
                    small: torus.small_id(h, dir),
                    bigs: [torus.big_id(c1.0, c1.1), torus.big_id(c2.0, c2.1)],
                });
            }
        }
        for c in [Corner::Up, Corner::Down] {
            let three = corner_hexes(h, c);
            let idx: Vec<usize> = three.iter().filter_map(|&x| patch.index(x)).collect();
            if idx.len() == 3 {
                patch.corners.push(PatchCorner {
                    hexes: [idx[0], idx[1], idx[2]],
                    big: torus.big_id(h, c),
                    smalls: [
                        patch.small_of(three[0], three[1]),
                        patch.small_of(three[0], three[2]),
                        patch.small_of(three[1], three[2]),
                    ],
                });
            }
        }
    }
    Ok(patch)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanningOrder {
    BreadthFirst,
    DepthFirst,
}

/// Group words labelling each hexagon, built along a spanning tree:
/// crossing the tiling edge of small `v` multiplies by the generator of `G_v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatLabelling {
    pub base: usize,
    pub labels: Vec<GroupWord>,
    pub parent: Vec<Option<usize>>,
}

impl FlatLabelling {
    pub fn is_tree_edge(&self, a: usize, b: usize) -> bool {
        self.parent[a] == Some(b) || self.parent[b] == Some(a)
    }
}

/// Breadth-first labelling from hexagon 0.
pub fn label_patch(gc: &GraphicalComplexOfGroups, patch: &HexPatch) -> Result<FlatLabelling, FlatError> {
    label_patch_from(gc, patch, 0, SpanningOrder::BreadthFirst)
}

pub fn label_patch_from(
    gc: &GraphicalComplexOfGroups,
    patch: &HexPatch,
    base: usize,
    order: SpanningOrder,
) -> Result<FlatLabelling, FlatError> {
    let n = patch.hexes.len();
    if base >= n {
        return Err(FlatError::HexOutOfPatch(base));
    }
    for a in &patch.adjacencies {
        if gc.group(a.small).map(|g| g.order()) != Some(2) {
            return Err(FlatError::NotKleinShaped(a.small));
        }
    }
    let mut nbrs: Vec<Vec<(usize, VertexId)>> = vec![Vec::new(); n];
    for a in &patch.adjacencies {
        nbrs[a.hexes.0].push((a.hexes.1, a.small));
        nbrs[a.hexes.1].push((a.hexes.0, a.small));
    }
    for list in &mut nbrs {
        list.sort();
    }
    let mut labels: Vec<Option<GroupWord>> = vec![None; n];
    let mut parent = vec![None; n];
    labels[base] = Some(GroupWord::default());
    let mut frontier = VecDeque::from([base]);
    while let Some(x) = match order {
        SpanningOrder::BreadthFirst => frontier.pop_front(),
        SpanningOrder::DepthFirst => frontier.pop_back(),
    } {
        for &(y, v) in &nbrs[x] {
            if labels[y].is_none() {
                let mut w = labels[x].clone().unwrap();
                w.push(v, 1);
                labels[y] = Some(w);
                parent[y] = Some(x);
                frontier.push_back(y);
            }
        }
    }
    Ok(FlatLabelling { base, labels: labels.into_iter().map(|w| w.unwrap_or_default()).collect(), parent })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum ConsistencyFailure {
    /// The three generators at a tiling vertex do not multiply to the identity.
    Corner { corner: usize, big: VertexId, smalls: [VertexId; 3] },
    /// Two adjacent hexagons resolve to cells not sharing the small instance.
    Adjacency { hexes: (usize, usize), small: VertexId, cells: (CellId, CellId) },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Consistency {
    Consistent,
    Inconsistent { witness: ConsistencyFailure },
    Unknown { required_radius: u32 },
}

/// Checks that the labelling closes up. The algebraic pass needs only the
/// complex: at each tiling vertex the images of the three generators must
/// satisfy `g_ab · g_bc = g_ac`. The ball pass resolves every label and
/// checks that adjacent hexagons land on cells sharing the expected small
/// instance.
pub fn verify_consistency(
    gc: &GraphicalComplexOfGroups,
    patch: &HexPatch,
    labelling: &FlatLabelling,
    ball: Option<&DevelopedBall>,
) -> Consistency {
    let q = gc.poset();
    for (k, c) in patch.corners.iter().enumerate() {
        let img = |v: VertexId| gc.map(v, c.big).map(|m| m[1]);
        let (Some(ab), Some(ac), Some(bc), Some(g)) =
            (img(c.smalls[0]), img(c.smalls[1]), img(c.smalls[2]), gc.group(c.big))
        else {
            return Consistency::Inconsistent {
                witness: ConsistencyFailure::Corner { corner: k, big: c.big, smalls: c.smalls },
            };
        };
        if g.mul(ab, bc) != ac {
            return Consistency::Inconsistent {
                witness: ConsistencyFailure::Corner { corner: k, big: c.big, smalls: c.smalls },
            };
        }
    }
    if patch.adjacencies.is_empty() {
        return Consistency::Consistent;
    }
    let Some(ball) = ball else {
        return Consistency::Unknown { required_radius: patch.required_radius() };
    };
    let Ok(cells) = labelling.labels.iter().map(|w| resolve_word(ball, w)).collect::<Result<Vec<_>, _>>() else {
        return Consistency::Unknown { required_radius: patch.required_radius().max(ball.radius() + 1) };
    };
    for a in &patch.adjacencies {
        let (x, y) = (cells[a.hexes.0], cells[a.hexes.1]);
        let v = q.index_of(a.small).expect("patch small in poset");
        if x == y || ball.instance_at(x, v) != ball.instance_at(y, v) {
            return Consistency::Inconsistent {
                witness: ConsistencyFailure::Adjacency { hexes: a.hexes, small: a.small, cells: (x, y) },
            };
        }
    }
    Consistency::Consistent
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum FlatFailure {
    Unresolved { hex: usize },
    NotWellDefined { hexes: (usize, usize), vertex: VertexId },
    NotInjective { hexes: (usize, usize), cell: CellId },
    ConeAngle { hex: usize, sum: u64 },
    SmallAngle { hexes: (usize, usize), sum: u64 },
    BigAngle { corner: usize, sum: u64 },
    NoTriple { corner: usize },
    NoInteriorVertex,
}

/// Result of mapping a patch into a ball and checking it is locally flat:
/// every interior angle sum is 2π under the Euclidean metric. Global
/// isometric embedding is not certified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub cells: Vec<Option<CellId>>,
    pub well_defined: bool,
    pub injective: bool,
    pub angle_sums_ok: bool,
    pub triples: Vec<ProperTripleWitness>,
    pub triples_ok: bool,
    pub failures: Vec<FlatFailure>,
    pub global_isometry_certified: bool,
}

impl EmbeddingReport {
    pub fn verified(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn embed_flat(ball: &DevelopedBall, patch: &HexPatch, labelling: &FlatLabelling) -> EmbeddingReport {
    let gc = ball.complex();
    let q = gc.poset();
    let angles = AngleAssignment::C6;
    let dense = |v: VertexId| q.index_of(v).expect("patch vertex in poset");
    let cells: Vec<Option<CellId>> = labelling.labels.iter().map(|w| resolve_word(ball, w).ok()).collect();
    let mut failures: Vec<FlatFailure> =
        cells.iter().enumerate().filter(|(_, c)| c.is_none()).map(|(hex, _)| FlatFailure::Unresolved { hex }).collect();
    if !failures.is_empty() {
        return EmbeddingReport {
            cells,
            well_defined: false,
            injective: false,
            angle_sums_ok: false,
            triples: Vec::new(),
            triples_ok: false,
            failures,
            global_isometry_certified: false,
        };
    }
    let cell = |i: usize| cells[i].unwrap();

    let mut well_defined = true;
    for a in &patch.adjacencies {
        let (x, y) = (cell(a.hexes.0), cell(a.hexes.1));
        for v in [a.small, a.bigs[0], a.bigs[1]] {
            if ball.instance_at(x, dense(v)) != ball.instance_at(y, dense(v)) {
                well_defined = false;
                failures.push(FlatFailure::NotWellDefined { hexes: a.hexes, vertex: v });
            }
        }
    }

    let mut injective = true;
    let mut seen: BTreeMap<CellId, usize> = BTreeMap::new();
    for i in 0..cells.len() {
        if let Some(&j) = seen.get(&cell(i)) {
            injective = false;
            failures.push(FlatFailure::NotInjective { hexes: (j, i), cell: cell(i) });
        } else {
            seen.insert(cell(i), i);
        }
    }

    let before = failures.len();
    let torus = &patch.torus;
    for (i, &h) in patch.hexes.iter().enumerate() {
        let boundary: Vec<usize> = hex_boundary(h).into_iter().map(|b| dense(torus.boundary_id(b))).collect();
        let instances: BTreeSet<_> = boundary.iter().map(|&u| ball.instance_at(cell(i), u)).collect();
        let closed =
            (0..boundary.len()).all(|k| q.neighbors_of(boundary[k]).contains(&boundary[(k + 1) % boundary.len()]));
        let sum = if closed && instances.len() == boundary.len() { angles.cone * boundary.len() as u64 } else { 0 };
        if sum != 2 * crate::smallcancel::UNITS_PER_PI {
            failures.push(FlatFailure::ConeAngle { hex: i, sum });
        }
    }
    for a in &patch.adjacencies {
        let (x, y) = (cell(a.hexes.0), cell(a.hexes.1));
        let bigs: BTreeSet<_> = a.bigs.iter().map(|&w| ball.instance_at(x, dense(w))).collect();
        let ok = x != y && bigs.len() == 2;
        let sum = if ok { 4 * angles.small } else { 0 };
        if sum != 2 * crate::smallcancel::UNITS_PER_PI {
            failures.push(FlatFailure::SmallAngle { hexes: a.hexes, sum });
        }
    }
    for (k, c) in patch.corners.iter().enumerate() {
        let xs = c.hexes.map(cell);
        let smalls: BTreeSet<_> =
            [(0, 0), (0, 1), (1, 2)].iter().map(|&(h, s)| ball.instance_at(xs[h], dense(c.smalls[s]))).collect();
        let shared = xs.iter().all(|&x| ball.instance_at(x, dense(c.big)) == ball.instance_at(xs[0], dense(c.big)));
        let distinct = xs[0] != xs[1] && xs[1] != xs[2] && xs[0] != xs[2];
        let sum = if shared && distinct && smalls.len() == 3 { 6 * angles.big } else { 0 };
        if sum != 2 * crate::smallcancel::UNITS_PER_PI {
            failures.push(FlatFailure::BigAngle { corner: k, sum });
        }
    }
    let angle_sums_ok = failures.len() == before;

    let mut triples = Vec::new();
    for (k, c) in patch.corners.iter().enumerate() {
        match corner_triple(ball, c, c.hexes.map(cell)) {
            Some(t) => triples.push(t),
            None => failures.push(FlatFailure::NoTriple { corner: k }),
        }
    }
    let triples_ok = triples.len() == patch.corners.len();
    EmbeddingReport {
        cells,
        well_defined,
        injective,
        angle_sums_ok,
        triples,
        triples_ok,
        failures,
        global_isometry_certified: false,
    }
}

/// The proper triple read off three cells meeting at a big instance: with
/// labels `la, lb, lc` there, `a = la⁻¹lb` and `b = la⁻¹lc`.
fn corner_triple(ball: &DevelopedBall, c: &PatchCorner, xs: [CellId; 3]) -> Option<ProperTripleWitness> {
    let gc = ball.complex();
    let q = gc.poset();
    let wi = q.index_of(c.big)?;
    let g = gc.group_at(wi);
    let (inst, la) = ball.attachment(xs[0], wi);
    let (ib, lb) = ball.attachment(xs[1], wi);
    let (ic, lc) = ball.attachment(xs[2], wi);
    if ib != inst || ic != inst {
        return None;
    }
    let a = g.mul(g.inv(la), lb);
    let b = g.mul(g.inv(la), lc);
    let a_inv_b = g.mul(g.inv(a), b);
    let [v_ab, v_ac, v_bc] = c.smalls;
    let pre = |v: VertexId, x: usize| {
        let e = gc.edge_between(q.index_of(v)?, wi)?;
        gc.edge_preimage(e, x)
    };
    let t = ProperTripleWitness {
        big: c.big,
        smalls: [v_ac, v_ab, v_bc],
        a,
        b,
        a_inv_b,
        elements: [(v_ab, pre(v_ab, a)?), (v_ac, pre(v_ac, b)?), (v_bc, pre(v_bc, a_inv_b)?)],
    };
    verify_triple(gc, &t).then_some(t)
}

/// Cells proposed as a flat, one per patch hexagon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatCandidate {
    pub patch: HexPatch,
    pub cells: Vec<CellId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeCertificate {
    pub holds: bool,
    pub failures: Vec<FlatFailure>,
}

/// Checks that the candidate has the shape of a flat: distinct cone points
/// one per hexagon, adjacent hexagons sharing their edge's small instance,
/// the three cells at each tiling vertex sharing its big instance, a proper
/// triple at each tiling vertex, and at least one tiling vertex.
pub fn check_flat_shape(ball: &DevelopedBall, candidate: &FlatCandidate) -> ShapeCertificate {
    let gc = ball.complex();
    let q = gc.poset();
    let patch = &candidate.patch;
    let cells = &candidate.cells;
    let mut failures = Vec::new();
    if patch.corners.is_empty() || cells.len() != patch.hexes.len() {
        failures.push(FlatFailure::NoInteriorVertex);
        return ShapeCertificate { holds: false, failures };
    }
    let mut seen: BTreeMap<CellId, usize> = BTreeMap::new();
    for (i, &c) in cells.iter().enumerate() {
        if let Some(&j) = seen.get(&c) {
            failures.push(FlatFailure::NotInjective { hexes: (j, i), cell: c });
        }
        seen.insert(c, i);
    }
    for a in &patch.adjacencies {
        let Some(v) = q.index_of(a.small) else { continue };
        let (x, y) = (cells[a.hexes.0], cells[a.hexes.1]);
        if ball.instance_at(x, v) != ball.instance_at(y, v) {
            failures.push(FlatFailure::NotWellDefined { hexes: a.hexes, vertex: a.small });
        }
    }
    for (k, c) in patch.corners.iter().enumerate() {
        let xs = c.hexes.map(|h| cells[h]);
        if corner_triple(ball, c, xs).is_none() {
            failures.push(FlatFailure::NoTriple { corner: k });
        }
    }
    ShapeCertificate { holds: failures.is_empty(), failures }
}

/// Ball radius used by [`find_flat`].
pub const FLAT_SEARCH_RADIUS: u32 = 6;

/// A certified flat patch found in the development.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatWitness {
    pub translations: [Hex; 2],
    pub width: usize,
    pub height: usize,
    pub radius: u32,
    pub labels: Vec<GroupWord>,
    pub cells: Vec<CellId>,
    pub triples: Vec<ProperTripleWitness>,
    pub global_isometry_certified: bool,
}

/// The torus whose poset of simplices is exactly the complex's poset, if the
/// complex is a valid locally Klein-four complex over one.
pub fn recognise_torus(gc: &GraphicalComplexOfGroups) -> Option<HexTorus> {
    let q = gc.poset();
    if !gc.is_locally_klein_shaped() || !q.small_count().is_multiple_of(3) || !validate(gc).is_valid() {
        return None;
    }
    let n = q.small_count() / 3;
    if q.big().len() != 2 * n {
        return None;
    }
    HexTorus::with_hex_count(n).into_iter().find(|t| t.poset().is_ok_and(|p| &p == q))
}

/// Looks for a 3×3 flat patch in a focused development around its labels.
pub fn find_flat(gc: &GraphicalComplexOfGroups) -> Option<FlatWitness> {
    let torus = recognise_torus(gc)?;
    let patch = build_hex_patch(3, 3, &torus).ok()?;
    let labelling = label_patch(gc, &patch).ok()?;
    if !matches!(verify_consistency(gc, &patch, &labelling, None), Consistency::Unknown { .. }) {
        return None;
    }
    let ball = develop_focused(gc, FLAT_SEARCH_RADIUS, &labelling.labels).ok()?;
    if verify_consistency(gc, &patch, &labelling, Some(&ball)) != Consistency::Consistent {
        return None;
    }
    let report = embed_flat(&ball, &patch, &labelling);
    if !report.verified() {
        return None;
    }
    let cells: Vec<CellId> = report.cells.iter().map(|c| c.unwrap()).collect();
    let shape = check_flat_shape(&ball, &FlatCandidate { patch: patch.clone(), cells: cells.clone() });
    shape.holds.then(|| FlatWitness {
        translations: torus.translations(),
        width: patch.width,
        height: patch.height,
        radius: FLAT_SEARCH_RADIUS,
        labels: labelling.labels,
        cells,
        triples: report.triples,
        global_isometry_certified: false,
    })
}

/// Draws the patch as pointy-top hexagons annotated with labels and cells.
pub fn patch_svg(patch: &HexPatch, labelling: &FlatLabelling, cells: Option<&[Option<CellId>]>) -> String {
    let size = 40.0_f64;
    let root3 = 3f64.sqrt();
    let centre = |h: Hex| (size * root3 * (h.q as f64 + h.r as f64 / 2.0), size * 1.5 * h.r as f64);
    let pts: Vec<(f64, f64)> = patch.hexes.iter().map(|&h| centre(h)).collect();
    let (minx, maxx) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (miny, maxy) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let (ox, oy) = (size - minx + 10.0, size - miny + 10.0);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\">\n",
        maxx - minx + 2.0 * size + 20.0,
        maxy - miny + 2.0 * size + 20.0
    );
    for (i, &(x, y)) in pts.iter().enumerate() {
        let corners: Vec<String> = (0..6)
            .map(|k| {
                let t = std::f64::consts::PI / 180.0 * (60.0 * k as f64 - 30.0);
                format!("{:.1},{:.1}", x + ox + size * t.cos(), y + oy + size * t.sin())
            })
            .collect();
        let _ = writeln!(s, "  <polygon points=\"{}\" fill=\"#eef\" stroke=\"#336\"/>", corners.join(" "));
        let word = labelling.labels[i].to_string();
        let word = if word.is_empty() { "e".to_string() } else { word };
        let _ = writeln!(
            s,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"8\" text-anchor=\"middle\">{}</text>",
            x + ox,
            y + oy - 2.0,
            word
        );
        if let Some(Some(c)) = cells.and_then(|cs| cs.get(i)) {
            let _ = writeln!(
                s,
                "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"9\" text-anchor=\"middle\">{}</text>",
                x + ox,
                y + oy + 10.0,
                c
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
