//! The nerve of the cone-cell cover, largeness, cut-up tetrahedra and the
//! retriangulation for valence-two small vertices.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::is_isomorphic_matching;
use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::develop::{link_graph, CellId, DevelopedBall, InstanceId, LinkCentre, LinkVertex, VertexType};
use crate::graph::Graph;
use crate::poset::{VertexId, VertexKind};

/// A simplicial complex on cells given by its maximal-candidate simplices
/// (one per vertex instance: the cells containing it).
#[derive(Debug, Clone)]
pub struct NerveComplex {
    simplices: Vec<Vec<usize>>,
    containing: Vec<Vec<usize>>,
    /// Vertices whose adjacencies are all present in the ball.
    certified: Vec<bool>,
    graph: Graph,
}

impl NerveComplex {
    /// Simplices are vertex sets; `certified[v]` says every simplex through
    /// `v` is listed.
    pub fn from_simplices(vertex_count: usize, simplices: Vec<Vec<usize>>, certified: Vec<bool>) -> Self {
        let mut graph = Graph::new(vertex_count);
        let mut containing = vec![Vec::new(); vertex_count];
        let simplices: Vec<Vec<usize>> = simplices
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        for (k, s) in simplices.iter().enumerate() {
            for (i, &a) in s.iter().enumerate() {
                containing[a].push(k);
                for &b in &s[i + 1..] {
                    graph.add_edge(a, b);
                }
            }
        }
        graph.canonicalize();
        Self { simplices, containing, certified, graph }
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.len()
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn is_certified(&self, v: usize) -> bool {
        self.certified[v]
    }

    /// Interior vertices have certified neighbourhoods, so their links are
    /// complete.
    pub fn is_interior(&self, v: usize) -> bool {
        self.certified[v] && self.graph.neighbors(v).iter().all(|&u| self.certified[u])
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.graph.has_edge(a, b)
    }

    /// Whether some simplex contains every vertex of `set`.
    pub fn is_simplex(&self, set: &[usize]) -> bool {
        let Some(&first) = set.first() else { return true };
        self.containing[first].iter().any(|&k| set.iter().all(|v| self.simplices[k].binary_search(v).is_ok()))
    }

    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.len()).max().and_then(|n| n.checked_sub(1))
    }

    /// Distinct simplices not contained in a larger one, sorted.
    pub fn maximal_simplices(&self) -> Vec<Vec<usize>> {
        let distinct: BTreeSet<&Vec<usize>> = self.simplices.iter().collect();
        distinct
            .into_iter()
            .filter(|s| {
                let Some(&first) = s.first() else { return false };
                !self.containing[first].iter().any(|&k| {
                    let t = &self.simplices[k];
                    t.len() > s.len() && s.iter().all(|v| t.binary_search(v).is_ok())
                })
            })
            .cloned()
            .collect()
    }

    pub fn to_data(&self) -> NerveData {
        let n = self.vertex_count();
        NerveData {
            vertices: n,
            simplices: self.maximal_simplices(),
            certified: self.certified.clone(),
            interior: (0..n).map(|v| self.is_interior(v)).collect(),
        }
    }

    /// The 1-skeleton, interior vertices filled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph nerve {\n  node [shape=circle];\n");
        for v in 0..self.vertex_count() {
            if self.is_interior(v) {
                out.push_str(&format!("  {v} [style=filled, fillcolor=gray];\n"));
            }
        }
        for a in 0..self.vertex_count() {
            for &b in self.graph.neighbors(a).iter().filter(|&&b| a < b) {
                out.push_str(&format!("  {a} -- {b};\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Serialized nerve: maximal simplices over cell ids, with certification flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerveData {
    pub vertices: usize,
    pub simplices: Vec<Vec<usize>>,
    pub certified: Vec<bool>,
    pub interior: Vec<bool>,
}

/// The nerve of a developed ball: vertices are cells, and a set of cells
/// spans a simplex when the cells share a vertex instance.
pub fn build_nerve(ball: &DevelopedBall) -> NerveComplex {
    let simplices = ball.instances().map(|i| ball.members(i).map(|(_, c)| c.0 as usize).collect()).collect();
    let certified = ball.cells().map(|c| ball.cell_saturated(c)).collect();
    NerveComplex::from_simplices(ball.cell_count(), simplices, certified)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub dimension: Option<usize>,
    /// `max |G_v| − 1` over the vertices of the poset.
    pub expected: usize,
    pub agrees: bool,
    /// No saturated instance of a largest group is in the ball, so the
    /// measured dimension only bounds the true one from below.
    pub lower_bound_only: bool,
}

pub fn nerve_dimension(ball: &DevelopedBall) -> DimensionReport {
    let gc = ball.complex();
    let q = gc.poset();
    let max_order = (0..q.vertex_count()).map(|u| gc.group_at(u).order()).max().unwrap_or(1);
    let nerve = build_nerve(ball);
    let dimension = nerve.dimension();
    let lower_bound_only =
        !ball.instances().any(|i| ball.is_saturated(i) && gc.group_at(ball.instance_vertex(i)).order() == max_order);
    DimensionReport { dimension, expected: max_order - 1, agrees: dimension == Some(max_order - 1), lower_bound_only }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LargenessCertificate {
    pub k: usize,
    pub holds: bool,
    pub interior_checked: usize,
    /// A clique around an interior vertex that spans no simplex.
    pub flag_failure: Option<Vec<CellId>>,
    /// An interior vertex and a diagonal-free cycle of length in `4..k` in
    /// its link.
    pub cycle_failure: Option<(CellId, Vec<CellId>)>,
}

/// k-largeness judged at interior vertices: the nerve is flag there, and
/// links have no induced cycles of length `4 <= l < k`.
pub fn check_k_largeness(nerve: &NerveComplex, k: usize) -> LargenessCertificate {
    let mut cert =
        LargenessCertificate { k, holds: true, interior_checked: 0, flag_failure: None, cycle_failure: None };
    let cells = |vs: &[usize]| vs.iter().map(|&v| CellId(v as u32)).collect::<Vec<_>>();
    for v in (0..nerve.vertex_count()).filter(|&v| nerve.is_interior(v)) {
        cert.interior_checked += 1;
        let nbrs = nerve.graph.neighbors(v);
        let local = Graph::from_edges(
            nbrs.len(),
            (0..nbrs.len())
                .flat_map(|i| (i + 1..nbrs.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| nerve.adjacent(nbrs[i], nbrs[j])),
        );
        if cert.flag_failure.is_none() {
            for clique in local.maximal_cliques() {
                let mut set: Vec<usize> = clique.iter().map(|&i| nbrs[i]).collect();
                set.push(v);
                set.sort_unstable();
                if !nerve.is_simplex(&set) {
                    cert.flag_failure = Some(cells(&set));
                    cert.holds = false;
                    break;
                }
            }
        }
        if cert.cycle_failure.is_none() && k > 4 {
            if let Some(cycle) = local.induced_cycle_in_range(4, k) {
                let cycle: Vec<usize> = cycle.iter().map(|&i| nbrs[i]).collect();
                cert.cycle_failure = Some((CellId(v as u32), cells(&cycle)));
                cert.holds = false;
            }
        }
        if cert.flag_failure.is_some() && cert.cycle_failure.is_some() {
            break;
        }
    }
    cert
}

/// Three cells in a common instance plus, for each pair, a fourth cell
/// sharing an instance with that pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutUpTetrahedron {
    pub central: [CellId; 3],
    /// `sides[0]` pairs with central 0 and 1, `sides[1]` with 1 and 2,
    /// `sides[2]` with 0 and 2.
    pub sides: [CellId; 3],
    pub isometric: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TetrahedronSearch {
    pub witness: Option<CutUpTetrahedron>,
    pub central_triangles: usize,
}

/// First isometrically embedded cut-up tetrahedron in the order of sorted
/// central triangles, then side cells. Every adjacency the isometry test
/// reads must have a certified endpoint.
pub fn find_cut_up_tetrahedron(nerve: &NerveComplex) -> TetrahedronSearch {
    let mut triangles = BTreeSet::new();
    for s in nerve.simplices() {
        let c: Vec<usize> = s.iter().copied().filter(|&v| nerve.is_certified(v)).collect();
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                for k in j + 1..c.len() {
                    triangles.insert([c[i], c[j], c[k]]);
                }
            }
        }
    }
    let sides_of = |a: usize, b: usize, skip: &[usize; 3]| -> Vec<usize> {
        let mut out = BTreeSet::new();
        for &k in &nerve.containing[a] {
            let s = &nerve.simplices[k];
            if s.binary_search(&b).is_ok() {
                out.extend(s.iter().copied().filter(|x| !skip.contains(x)));
            }
        }
        out.into_iter().collect()
    };
    let known = |a: usize, b: usize| nerve.is_certified(a) || nerve.is_certified(b);
    let apart = |a: usize, b: usize| known(a, b) && !nerve.adjacent(a, b);
    let central_triangles = triangles.len();
    for t in &triangles {
        let [v1, v2, v3] = *t;
        let s12 = sides_of(v1, v2, t);
        let s23 = sides_of(v2, v3, t);
        let s13 = sides_of(v1, v3, t);
        for &a in s12.iter().filter(|&&a| apart(a, v3)) {
            for &b in s23.iter().filter(|&&b| apart(b, v1) && apart(a, b)) {
                if let Some(&c) = s13.iter().find(|&&c| apart(c, v2) && apart(a, c) && apart(b, c)) {
                    let id = |v: usize| CellId(v as u32);
                    return TetrahedronSearch {
                        witness: Some(CutUpTetrahedron {
                            central: [id(v1), id(v2), id(v3)],
                            sides: [id(a), id(b), id(c)],
                            isometric: true,
                        }),
                        central_triangles,
                    };
                }
            }
        }
    }
    TetrahedronSearch { witness: None, central_triangles }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum WiseError {
    #[error("small vertex {vertex} has valence {valence}, retriangulation needs 2")]
    Valence { vertex: VertexId, valence: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum RetriangulatedVertex {
    Cone(CellId),
    Big(InstanceId),
}

/// The complex with each small vertex deleted and its two big neighbours
/// joined: triangles `(cone, big, big)`.
#[derive(Debug, Clone)]
pub struct Retriangulation {
    pub vertices: Vec<RetriangulatedVertex>,
    pub graph: Graph,
    pub triangles: Vec<[usize; 3]>,
    index: BTreeMap<RetriangulatedVertex, usize>,
    through: Vec<Vec<usize>>,
}

impl Retriangulation {
    pub fn index(&self, v: RetriangulatedVertex) -> Option<usize> {
        self.index.get(&v).copied()
    }

    /// Link of a vertex from the triangles through it, on the complex's own
    /// vertex indices.
    pub fn link(&self, v: usize) -> (Vec<usize>, Graph) {
        let mut local: BTreeMap<usize, usize> = BTreeMap::new();
        let mut edges = Vec::new();
        for t in self.through[v].iter().map(|&k| &self.triangles[k]) {
            let others: Vec<usize> = t.iter().copied().filter(|&x| x != v).collect();
            let n = local.len();
            let a = *local.entry(others[0]).or_insert(n);
            let n = local.len();
            let b = *local.entry(others[1]).or_insert(n);
            edges.push((a, b));
        }
        for &u in self.graph.neighbors(v) {
            let n = local.len();
            local.entry(u).or_insert(n);
        }
        let mut names = vec![0; local.len()];
        for (&u, &i) in &local {
            names[i] = u;
        }
        let mut g = Graph::from_edges(names.len(), edges);
        g.canonicalize();
        (names, g)
    }

    /// Node weights 0 for cones and 1 for bigs.
    pub fn to_petgraph(&self) -> UnGraph<u8, ()> {
        let mut g = UnGraph::new_undirected();
        let nodes: Vec<_> =
            self.vertices.iter().map(|v| g.add_node(matches!(v, RetriangulatedVertex::Big(_)) as u8)).collect();
        for (a, b) in self.graph.edges() {
            g.add_edge(nodes[a], nodes[b], ());
        }
        g
    }
}

pub fn retriangulate_valence2(ball: &DevelopedBall) -> Result<Retriangulation, WiseError> {
    let gc = ball.complex();
    let q = gc.poset();
    for s in 0..q.small_count() {
        let valence = q.neighbors_of(s).len();
        if valence != 2 {
            return Err(WiseError::Valence { vertex: q.id_of(s), valence });
        }
    }
    let mut vertices = Vec::new();
    let mut index = BTreeMap::new();
    let mut add = |v: RetriangulatedVertex, vertices: &mut Vec<RetriangulatedVertex>| -> usize {
        *index.entry(v).or_insert_with(|| {
            vertices.push(v);
            vertices.len() - 1
        })
    };
    let mut edges = Vec::new();
    let mut triangles = Vec::new();
    for c in ball.cells() {
        let cone = add(RetriangulatedVertex::Cone(c), &mut vertices);
        for j in q.small_count()..q.vertex_count() {
            let w = add(RetriangulatedVertex::Big(ball.instance_at(c, j)), &mut vertices);
            edges.push((cone, w));
        }
        for s in 0..q.small_count() {
            let up = q.neighbors_of(s);
            let w1 = add(RetriangulatedVertex::Big(ball.instance_at(c, up[0])), &mut vertices);
            let w2 = add(RetriangulatedVertex::Big(ball.instance_at(c, up[1])), &mut vertices);
            edges.push((w1, w2));
            triangles.push([cone, w1, w2]);
        }
    }
    let mut graph = Graph::from_edges(vertices.len(), edges);
    graph.canonicalize();
    triangles.sort_unstable();
    triangles.dedup();
    let mut through = vec![Vec::new(); vertices.len()];
    for (k, t) in triangles.iter().enumerate() {
        for &v in t {
            through[v].push(k);
        }
    }
    Ok(Retriangulation { vertices, graph, triangles, index, through })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetriangulationReport {
    pub cone_link_girth_before: Option<usize>,
    /// Distinct girths of saturated cone links afterwards.
    pub cone_link_girths_after: Vec<Option<usize>>,
    pub cone_girth_halved: bool,
    pub big_links_checked: usize,
    pub big_links_unchanged: bool,
    pub interior_checked: usize,
    pub interior_six_large: bool,
    pub small_vertices: usize,
}

impl RetriangulationReport {
    pub fn passes(&self) -> bool {
        self.cone_girth_halved && self.big_links_unchanged && self.interior_six_large && self.small_vertices == 0
    }
}

/// Checks the retriangulation against the ball it came from.
pub fn check_retriangulation(ball: &DevelopedBall, r: &Retriangulation) -> RetriangulationReport {
    let gc = ball.complex();
    let q = gc.poset();
    let before = q.graph().girth();
    let mut after = BTreeSet::new();
    for c in ball.cells().filter(|&c| ball.cell_saturated(c)) {
        let v = r.index(RetriangulatedVertex::Cone(c)).expect("cone vertex");
        after.insert(r.link(v).1.girth());
    }
    let cone_girth_halved = after.iter().all(|&g| match (before, g) {
        (Some(b), Some(a)) => b == 2 * a,
        (None, None) => true,
        _ => false,
    });

    // the other big of a small instance, seen from big instance `j`
    let other_big = |i: InstanceId, j: InstanceId| -> InstanceId {
        let s = ball.instance_vertex(i);
        let (_, c) = ball.members(i).next().expect("instances have members");
        q.neighbors_of(s).iter().map(|&u| ball.instance_at(c, u)).find(|&w| w != j).unwrap_or(j)
    };
    let mut big_links_checked = 0;
    let mut big_links_unchanged = true;
    for j in ball.instances().filter(|&j| ball.is_saturated(j) && ball.instance_type(j) == VertexType::Big) {
        big_links_checked += 1;
        let old = link_graph(ball, LinkCentre::Instance(j));
        let map = |v: LinkVertex| match v {
            LinkVertex::Cone(c) => r.index(RetriangulatedVertex::Cone(c)),
            LinkVertex::Instance(i) => r.index(RetriangulatedVertex::Big(other_big(i, j))),
        };
        let image: Vec<Option<usize>> = old.vertices.iter().map(|&v| map(v)).collect();
        let distinct: BTreeSet<_> = image.iter().collect();
        let v = r.index(RetriangulatedVertex::Big(j)).expect("big vertex");
        let (names, new) = r.link(v);
        let old_edges: BTreeSet<(usize, usize)> =
            old.graph.edges().filter_map(|(a, b)| Some((image[a]?.min(image[b]?), image[a]?.max(image[b]?)))).collect();
        let new_edges: BTreeSet<(usize, usize)> =
            new.edges().map(|(a, b)| (names[a].min(names[b]), names[a].max(names[b]))).collect();
        if distinct.len() != image.len() || image.iter().any(Option::is_none) || old_edges != new_edges {
            big_links_unchanged = false;
        }
    }

    // a cone is interior when its cell is saturated; a big when all its members are
    let interior = |v: usize| match r.vertices[v] {
        RetriangulatedVertex::Cone(c) => ball.cell_saturated(c),
        RetriangulatedVertex::Big(j) => ball.is_saturated(j) && ball.members(j).all(|(_, c)| ball.cell_saturated(c)),
    };
    let mut interior_checked = 0;
    let mut interior_six_large = true;
    for v in (0..r.vertices.len()).filter(|&v| interior(v)) {
        interior_checked += 1;
        let (names, link) = r.link(v);
        let induced: BTreeSet<(usize, usize)> = (0..names.len())
            .flat_map(|a| (a + 1..names.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| r.graph.has_edge(names[a], names[b]))
            .collect();
        let link_edges: BTreeSet<(usize, usize)> = link.edges().map(|(a, b)| (a.min(b), a.max(b))).collect();
        if induced != link_edges || link.girth().is_some_and(|g| g < 6) {
            interior_six_large = false;
        }
    }
    let small_vertices = r
        .vertices
        .iter()
        .filter(|v| match v {
            RetriangulatedVertex::Big(i) => q.kind_of(ball.instance_vertex(*i)) == VertexKind::Small,
            RetriangulatedVertex::Cone(_) => false,
        })
        .count();
    RetriangulationReport {
        cone_link_girth_before: before,
        cone_link_girths_after: after.into_iter().collect(),
        cone_girth_halved,
        big_links_checked,
        big_links_unchanged,
        interior_checked,
        interior_six_large,
        small_vertices,
    }
}

/// The `(2r+1) × (2r+1)` block of unit squares with their corners: square
/// centres (weight 0) joined to their four corners (weight 1), and corners
/// joined along grid edges.
pub fn square_grid_ball(radius: usize) -> UnGraph<u8, ()> {
    let n = 2 * radius + 1;
    let mut g = UnGraph::new_undirected();
    let squares: Vec<_> = (0..n * n).map(|_| g.add_node(0u8)).collect();
    let corners: Vec<_> = (0..(n + 1) * (n + 1)).map(|_| g.add_node(1u8)).collect();
    let corner = |x: usize, y: usize| corners[x * (n + 1) + y];
    for x in 0..n {
        for y in 0..n {
            for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                g.add_edge(squares[x * n + y], corner(x + dx, y + dy), ());
            }
        }
    }
    for x in 0..=n {
        for y in 0..=n {
            if x < n {
                g.add_edge(corner(x, y), corner(x + 1, y), ());
            }
            if y < n {
                g.add_edge(corner(x, y), corner(x, y + 1), ());
            }
        }
    }
    g
}

/// Whether a retriangulated ball is the square grid ball, respecting vertex types.
pub fn is_square_grid(r: &Retriangulation, radius: usize) -> bool {
    let a = r.to_petgraph();
    let b = square_grid_ball(radius);
    a.node_count() == b.node_count()
        && a.edge_count() == b.edge_count()
        && is_isomorphic_matching(&a, &b, |x, y| x == y, |_, _| true)
}
