//! Angular link conditions, CAT(−1) remetrisation certificates, pieces and
//! the C(k) condition.
//!
//! Angles are exact integers in units of π/420 (420 is the least common
//! multiple of 2..=7), so a full turn is 840 and every comparison is exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::develop::{link_graph, CellId, DevelopedBall, InstanceId, LinkCentre, LinkVertex, VertexType};
use crate::gcog::{find_proper_triple, GraphicalComplexOfGroups};
use crate::graph::Graph;
use crate::poset::{self, VertexId, VertexKind};

/// Units of angle per π.
pub const UNITS_PER_PI: u64 = 420;
/// The CAT(0) link threshold 2π.
pub const FULL_TURN: u64 = 2 * UNITS_PER_PI;

/// Angles of the model triangle at its small, big and cone corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngleAssignment {
    pub small: u64,
    pub big: u64,
    pub cone: u64,
}

impl AngleAssignment {
    /// π/2, π/3, π/6: the Euclidean metric of the systolic case.
    pub const C6: Self = Self { small: 210, big: 140, cone: 70 };
    /// π/2, π/3, π/7: hyperbolic, for 7-huge inputs.
    pub const C6_HYP: Self = Self { small: 210, big: 140, cone: 60 };
    /// π/2, π/4, π/6: hyperbolic, for 6-huge inputs without proper triples.
    pub const NO_TRIPLE_HYP: Self = Self { small: 210, big: 105, cone: 70 };
    /// π/2, π/4, π/4: Euclidean, C(4)–T(4).
    pub const C4T4: Self = Self { small: 210, big: 105, cone: 105 };
    /// π/2, π/4, π/5: hyperbolic, C(5)–T(4).
    pub const C5T4: Self = Self { small: 210, big: 105, cone: 84 };

    pub fn sum(&self) -> u64 {
        self.small + self.big + self.cone
    }

    pub fn is_euclidean(&self) -> bool {
        self.sum() == UNITS_PER_PI
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.sum() < UNITS_PER_PI
    }

    /// Weight of a link edge at a vertex of the given type.
    pub fn at(&self, t: VertexType) -> u64 {
        match t {
            VertexType::Cone => self.cone,
            VertexType::Small => self.small,
            VertexType::Big => self.big,
        }
    }
}

impl FromStr for AngleAssignment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "c6" => Ok(Self::C6),
            "c6hyp" => Ok(Self::C6_HYP),
            "notriple-hyp" => Ok(Self::NO_TRIPLE_HYP),
            "c4t4" => Ok(Self::C4T4),
            "c5t4" => Ok(Self::C5T4),
            _ => Err(format!("unknown angle preset {s:?} (c6, c6hyp, notriple-hyp, c4t4, c5t4)")),
        }
    }
}

/// Renders an angle in units of π/420 as a reduced multiple of π.
pub fn format_angle(units: u64) -> String {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(units, UNITS_PER_PI).max(1);
    match (units / g, UNITS_PER_PI / g) {
        (0, _) => "0".into(),
        (1, 1) => "π".into(),
        (n, 1) => format!("{n}π"),
        (1, d) => format!("π/{d}"),
        (n, d) => format!("{n}π/{d}"),
    }
}

/// A vertex of a link, either in a local development computed from the
/// complex or in a developed ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocalVertex {
    Poset {
        id: VertexId,
    },
    /// A cone point `gc` in the link of a small or big vertex.
    ConePoint {
        element: usize,
    },
    /// The coset `g·img ψ_small` in the link of a big vertex, by least element.
    Coset {
        small: VertexId,
        rep: usize,
    },
    Cell {
        id: CellId,
    },
    Instance {
        id: InstanceId,
    },
}

impl From<LinkVertex> for LocalVertex {
    fn from(v: LinkVertex) -> Self {
        match v {
            LinkVertex::Cone(id) => LocalVertex::Cell { id },
            LinkVertex::Instance(id) => LocalVertex::Instance { id },
        }
    }
}

/// Where a link sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum LinkSite {
    Cone,
    Small { vertex: VertexId },
    Big { vertex: VertexId },
    BallCone { cell: CellId },
    BallInstance { instance: InstanceId },
}

/// Angular girth of one link. `girth` is `None` for a forest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkGirth {
    pub site: LinkSite,
    pub centre_type: VertexType,
    pub girth: Option<u64>,
    pub edges: Option<usize>,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<LocalVertex>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeSummary {
    pub centre_type: VertexType,
    pub links: usize,
    pub min_girth: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkConditionCertificate {
    pub angles: AngleAssignment,
    pub threshold: u64,
    pub holds: bool,
    pub summary: Vec<TypeSummary>,
    /// Every link, for complex-level checks; empty for balls.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<LinkGirth>,
    pub failures: Vec<LinkGirth>,
}

fn measure(
    site: LinkSite,
    centre_type: VertexType,
    graph: &Graph,
    weight: u64,
    name: impl Fn(usize) -> LocalVertex,
) -> LinkGirth {
    match graph.weighted_girth(|_, _| weight) {
        None => LinkGirth { site, centre_type, girth: None, edges: None, holds: true, cycle: None },
        Some((g, cycle)) => {
            let holds = g >= FULL_TURN;
            LinkGirth {
                site,
                centre_type,
                girth: Some(g),
                edges: Some(cycle.len()),
                holds,
                cycle: (!holds).then(|| cycle.iter().map(|&i| name(i)).collect()),
            }
        }
    }
}

fn certificate(angles: AngleAssignment, all: Vec<LinkGirth>, keep_links: bool) -> LinkConditionCertificate {
    let mut summary: BTreeMap<VertexType, TypeSummary> = BTreeMap::new();
    for l in &all {
        let s = summary.entry(l.centre_type).or_insert(TypeSummary {
            centre_type: l.centre_type,
            links: 0,
            min_girth: None,
        });
        s.links += 1;
        if let Some(g) = l.girth {
            s.min_girth = Some(s.min_girth.map_or(g, |m| m.min(g)));
        }
    }
    let failures: Vec<LinkGirth> = all.iter().filter(|l| !l.holds).cloned().collect();
    LinkConditionCertificate {
        angles,
        threshold: FULL_TURN,
        holds: failures.is_empty(),
        summary: summary.into_values().collect(),
        links: if keep_links { all } else { Vec::new() },
        failures,
    }
}

/// The local development at a small vertex: `|G_v|` cone points joined to
/// every big vertex above.
pub fn small_local_development(gc: &GraphicalComplexOfGroups, v: usize) -> (Graph, Vec<LocalVertex>) {
    let q = gc.poset();
    let order = gc.group_at(v).order();
    let bigs = q.neighbors_of(v);
    let mut names: Vec<LocalVertex> = (0..order).map(|element| LocalVertex::ConePoint { element }).collect();
    names.extend(bigs.iter().map(|&j| LocalVertex::Poset { id: q.id_of(j) }));
    let edges = (0..order).flat_map(|g| (0..bigs.len()).map(move |k| (g, order + k)));
    (Graph::from_edges(names.len(), edges), names)
}

/// The coset graph of `G_w` relative to the images of the smalls below: an
/// element is joined to each coset `g·img ψ_s` containing it.
pub fn big_local_development(gc: &GraphicalComplexOfGroups, w: usize) -> (Graph, Vec<LocalVertex>) {
    let q = gc.poset();
    let g = gc.group_at(w);
    let order = g.order();
    let mut names: Vec<LocalVertex> = (0..order).map(|element| LocalVertex::ConePoint { element }).collect();
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut edges = Vec::new();
    for &(s, e) in gc.incident(w) {
        for x in 0..order {
            let rep = gc.edge_image(e).iter().map(|&h| g.mul(x, h)).min().unwrap();
            let k = *index.entry((s, rep)).or_insert_with(|| {
                names.push(LocalVertex::Coset { small: q.id_of(s), rep });
                names.len() - 1
            });
            edges.push((x, k));
        }
    }
    (Graph::from_edges(names.len(), edges), names)
}

/// The link condition from the complex alone, on the three local
/// developments: `|Q|` at the cone vertex, the join at small vertices, the
/// coset graph at big vertices.
pub fn check_link_condition_complex(
    gc: &GraphicalComplexOfGroups,
    angles: AngleAssignment,
) -> LinkConditionCertificate {
    let q = gc.poset();
    let mut all = Vec::new();
    all.push(measure(LinkSite::Cone, VertexType::Cone, &q.graph(), angles.cone, |i| LocalVertex::Poset {
        id: q.id_of(i),
    }));
    for i in 0..q.vertex_count() {
        let id = q.id_of(i);
        let (site, t, (graph, names)) = match q.kind_of(i) {
            VertexKind::Small => (LinkSite::Small { vertex: id }, VertexType::Small, small_local_development(gc, i)),
            VertexKind::Big => (LinkSite::Big { vertex: id }, VertexType::Big, big_local_development(gc, i)),
        };
        all.push(measure(site, t, &graph, angles.at(t), |k| names[k]));
    }
    certificate(angles, all, true)
}

/// The link condition on every saturated link of a ball.
pub fn check_link_condition_ball(ball: &DevelopedBall, angles: AngleAssignment) -> LinkConditionCertificate {
    let mut all = Vec::new();
    let centres = ball
        .cells()
        .filter(|&c| ball.cell_saturated(c))
        .map(LinkCentre::Cone)
        .chain(ball.instances().filter(|&i| ball.is_saturated(i)).map(LinkCentre::Instance));
    for centre in centres {
        let link = link_graph(ball, centre);
        let site = match centre {
            LinkCentre::Cone(cell) => LinkSite::BallCone { cell },
            LinkCentre::Instance(instance) => LinkSite::BallInstance { instance },
        };
        all.push(measure(site, link.centre_type, &link.graph, angles.at(link.centre_type), |k| {
            link.vertices[k].into()
        }));
    }
    certificate(angles, all, false)
}

/// Which remetrisation case applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicCase {
    KHugeAtLeast7,
    SixHugeNoTriple,
    C5T4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatVerdict {
    Certified,
    Failed,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatMinusOneCertificate {
    pub verdict: CatVerdict,
    pub case: Option<HyperbolicCase>,
    pub angles: Option<AngleAssignment>,
    pub links: Option<LinkConditionCertificate>,
}

/// Picks the hyperbolic angle assignment by case (7-huge; 6-huge without
/// proper triples; 5-huge with T(4)) and runs the link condition with it.
pub fn cat_minus_one_certificate(gc: &GraphicalComplexOfGroups) -> CatMinusOneCertificate {
    let k = poset::hugeness(gc.poset());
    let at_least = |n: usize| k.is_none_or(|k| k >= n);
    let no_triple = || find_proper_triple(gc).is_none();
    let case = if at_least(7) {
        Some((HyperbolicCase::KHugeAtLeast7, AngleAssignment::C6_HYP))
    } else if at_least(6) && no_triple() {
        Some((HyperbolicCase::SixHugeNoTriple, AngleAssignment::NO_TRIPLE_HYP))
    } else if at_least(5) && no_triple() {
        Some((HyperbolicCase::C5T4, AngleAssignment::C5T4))
    } else {
        None
    };
    let Some((case, angles)) = case else {
        return CatMinusOneCertificate { verdict: CatVerdict::NotApplicable, case: None, angles: None, links: None };
    };
    let links = check_link_condition_complex(gc, angles);
    let verdict = if links.holds && angles.is_hyperbolic() { CatVerdict::Certified } else { CatVerdict::Failed };
    CatMinusOneCertificate { verdict, case: Some(case), angles: Some(angles), links: Some(links) }
}

/// A maximal path in the intersection of two distinct cone-cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub cells: (CellId, CellId),
    /// Poset vertices along the path (the same in both cells' copies).
    pub path: Vec<VertexId>,
    pub instances: Vec<InstanceId>,
}

impl Piece {
    /// Length in edges.
    pub fn len(&self) -> usize {
        self.path.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceReport {
    pub pieces: Vec<Piece>,
    pub max_len: usize,
    /// Pieces longer than 2, which the theory excludes.
    pub too_long: Vec<Piece>,
}

/// Dense small vertices whose instances two cells share.
fn shared_smalls(ball: &DevelopedBall, a: CellId, b: CellId) -> Vec<usize> {
    (0..ball.complex().poset().small_count()).filter(|&s| ball.instance_at(a, s) == ball.instance_at(b, s)).collect()
}

/// Dense edges `(small, big)` of `|Q|` shared by two cells with the given
/// shared smalls: the union of their up-sets.
fn shared_edges(gc: &GraphicalComplexOfGroups, smalls: &[usize]) -> Vec<(usize, usize)> {
    smalls.iter().flat_map(|&s| gc.incident(s).iter().map(move |&(j, _)| (s, j))).collect()
}

/// Maximal paths of a forest given by edges on dense vertices: the paths
/// between pairs of leaves of each component.
fn maximal_paths(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let g = Graph::from_edges(n, edges.iter().copied());
    let mut out = Vec::new();
    for comp in g.components() {
        if comp.len() < 2 {
            continue;
        }
        let leaves: Vec<usize> = comp.iter().copied().filter(|&v| g.degree(v) == 1).collect();
        for (k, &a) in leaves.iter().enumerate() {
            for &b in &leaves[k + 1..] {
                if let Some(p) = g.shortest_path(a, b) {
                    out.push(p);
                }
            }
        }
        if leaves.len() < 2 {
            // a component with a cycle has no leaf pair; report it whole
            out.push(comp);
        }
    }
    out
}

/// Every maximal shared path between pairs of cells sharing a small instance.
pub fn enumerate_pieces(ball: &DevelopedBall) -> PieceReport {
    let gc = ball.complex();
    let q = gc.poset();
    let mut pieces = Vec::new();
    for i in ball.instances().filter(|&i| ball.instance_type(i) == VertexType::Small) {
        let s = ball.instance_vertex(i);
        let members: Vec<CellId> = ball.members(i).map(|(_, c)| c).collect();
        for (k, &a) in members.iter().enumerate() {
            for &b in &members[k + 1..] {
                let smalls = shared_smalls(ball, a, b);
                if smalls[0] != s {
                    continue;
                }
                let edges = shared_edges(gc, &smalls);
                let (a, b) = (a.min(b), a.max(b));
                for path in maximal_paths(q.vertex_count(), &edges) {
                    pieces.push(Piece {
                        cells: (a, b),
                        instances: path.iter().map(|&u| ball.instance_at(a, u)).collect(),
                        path: path.into_iter().map(|u| q.id_of(u)).collect(),
                    });
                }
            }
        }
    }
    pieces.sort_by(|x, y| (x.cells, &x.path).cmp(&(y.cells, &y.path)));
    let max_len = pieces.iter().map(Piece::len).max().unwrap_or(0);
    let too_long = pieces.iter().filter(|p| p.len() > 2).cloned().collect();
    PieceReport { pieces, max_len, too_long }
}

/// Minimum number of arcs covering a cycle of `len` edges; arcs are
/// `(start, length)` runs of consecutive edges. `None` if they do not cover.
pub fn min_circular_cover(len: usize, arcs: &[(usize, usize)]) -> Option<usize> {
    if arcs.iter().any(|&(_, l)| l >= len) {
        return Some(1);
    }
    let mut best: Option<usize> = None;
    for &(s0, l0) in arcs {
        let goal = s0 + len;
        let mut reach = s0 + l0;
        let mut count = 1;
        while reach < goal {
            let mut next = reach;
            for &(s, l) in arcs {
                // shift the arc to the copy starting at or before `reach`
                let shifted = if s <= reach { s + (reach - s) / len * len } else { continue };
                if shifted + l > next {
                    next = shifted + l;
                }
                if shifted + len <= reach && shifted + len + l > next {
                    next = shifted + len + l;
                }
            }
            if next == reach {
                break;
            }
            reach = next;
            count += 1;
        }
        if reach >= goal {
            best = Some(best.map_or(count, |b: usize| b.min(count)));
        }
    }
    best
}

/// Maximal runs of consecutive cycle edges (edge `k` joins `cycle[k]` and
/// `cycle[k+1]`) satisfying `inside`, as `(start, length)`.
fn runs(len: usize, inside: impl Fn(usize) -> bool) -> Vec<(usize, usize)> {
    let flags: Vec<bool> = (0..len).map(inside).collect();
    if flags.iter().all(|&f| f) {
        return vec![(0, len)];
    }
    let mut out = Vec::new();
    for start in 0..len {
        if flags[start] && !flags[(start + len - 1) % len] {
            let mut l = 0;
            while flags[(start + l) % len] {
                l += 1;
            }
            out.push((start, l));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CkWitness {
    pub cell: CellId,
    pub cycle: Vec<VertexId>,
    pub pieces: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CkCertificate {
    pub k: usize,
    pub holds: bool,
    /// Girth of `|Q|`, the length of each cell's boundary cycles.
    pub girth: Option<usize>,
    pub cells_checked: usize,
    pub cycles_per_cell: usize,
    /// Fewest pieces covering any checked cycle; `None` when no cycle is a
    /// concatenation of pieces.
    pub min_pieces: Option<usize>,
    pub max_piece_len: usize,
    /// `max_piece_len / girth <= 1/k`.
    pub cprime_holds: bool,
    pub witness: Option<CkWitness>,
}

/// C(k) on every saturated cell: each checked boundary cycle needs at least
/// `k` pieces. By default the girth-realising cycles are checked; `all_cycles`
/// enumerates every embedded cycle of `|Q|`.
pub fn check_ck(ball: &DevelopedBall, k: usize, all_cycles: bool) -> CkCertificate {
    let gc = ball.complex();
    let q = gc.poset();
    let graph = q.graph();
    let girth = graph.girth();
    let cycles = match (girth, all_cycles) {
        (None, _) => Vec::new(),
        (Some(_), true) => graph.cycles_up_to(q.vertex_count()),
        (Some(g), false) => graph.cycles_of_length(g),
    };
    let pieces = enumerate_pieces(ball);
    let mut min_pieces: Option<usize> = None;
    let mut witness = None;
    let mut cells_checked = 0;
    for x in ball.cells().filter(|&c| ball.cell_saturated(c)) {
        cells_checked += 1;
        let mut neighbours: BTreeSet<CellId> = BTreeSet::new();
        for s in 0..q.small_count() {
            neighbours.extend(ball.members(ball.instance_at(x, s)).map(|(_, c)| c).filter(|&c| c != x));
        }
        let shared: Vec<BTreeSet<(usize, usize)>> =
            neighbours.iter().map(|&y| shared_edges(gc, &shared_smalls(ball, x, y)).into_iter().collect()).collect();
        for cycle in &cycles {
            let len = cycle.len();
            let edge = |e: usize| {
                let (a, b) = (cycle[e], cycle[(e + 1) % len]);
                if q.kind_of(a) == VertexKind::Small {
                    (a, b)
                } else {
                    (b, a)
                }
            };
            let arcs: Vec<(usize, usize)> =
                shared.iter().flat_map(|set| runs(len, |e| set.contains(&edge(e)))).collect();
            if let Some(n) = min_circular_cover(len, &arcs) {
                if min_pieces.is_none_or(|m| n < m) {
                    min_pieces = Some(n);
                    if n < k {
                        witness =
                            Some(CkWitness { cell: x, cycle: cycle.iter().map(|&u| q.id_of(u)).collect(), pieces: n });
                    }
                }
            }
        }
    }
    let cprime_holds = girth.is_none_or(|g| pieces.max_len * k <= g);
    CkCertificate {
        k,
        holds: min_pieces.is_none_or(|m| m >= k),
        girth,
        cells_checked,
        cycles_per_cell: cycles.len(),
        min_pieces,
        max_piece_len: pieces.max_len,
        cprime_holds,
        witness,
    }
}

impl fmt::Display for AngleAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}–{}–{}", format_angle(self.small), format_angle(self.big), format_angle(self.cone))
    }
}
