//! Generators for the standard families: graphical products (right-angled
//! Coxeter groups in particular), Coxeter groups with 1-dimensional nerves,
//! the locally Klein-four hexagonal torus and its doubles.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flats::{FlatError, Hex, HexTorus};
use crate::gcog::{ComplexError, GraphicalComplexOfGroups};
use crate::groups::{dihedral, direct_product, FiniteGroup, GroupError};
use crate::poset::{self, simplices_poset, OneDimPoset, PosetError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExampleError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Flat(#[from] FlatError),
    #[error("no group given for small vertex {vertex}")]
    MissingSmallGroup { vertex: VertexId },
    #[error("a cycle needs at least 3 vertices, got {0}")]
    CycleLength(usize),
    #[error("bipartite sides need at least 2 vertices each, got {0} and {1}")]
    BipartiteSize(usize, usize),
    #[error("edge ({0}, {1}) refers to a vertex outside 0..{2}")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("curve direction must be 0, 1 or 2, got {0}")]
    CurveDirection(usize),
    #[error("the glued poset is only {hugeness:?}-huge")]
    DoubleNotSixHuge { hugeness: Option<usize> },
}

/// Klein four-group elements hit by the three smalls below a big vertex, in
/// small id order: `<(1,0)>`, `<(0,1)>`, `<(1,1)>` under the encoding `2a + b`.
pub const KLEIN_IMAGES: [usize; 3] = [2, 1, 3];

/// A warning when the poset is not `k`-huge; the generators still build the
/// complex.
pub fn hugeness_warning(q: &OneDimPoset, k: usize) -> Option<String> {
    let cert = poset::check_huge(q, k);
    (!cert.holds).then(|| format!("poset is not {k}-huge (realisation girth {})", cert.girth))
}

/// Big groups are the direct products of the groups of the small vertices
/// below (in id order), structure maps the factor inclusions.
pub fn graphical_product(
    poset: OneDimPoset,
    small_groups: &BTreeMap<VertexId, Arc<FiniteGroup>>,
) -> Result<GraphicalComplexOfGroups, ExampleError> {
    let mut groups = BTreeMap::new();
    for &v in poset.small() {
        let g = small_groups.get(&v).ok_or(ExampleError::MissingSmallGroup { vertex: v })?;
        groups.insert(v, g.clone());
    }
    let mut maps = BTreeMap::new();
    for &w in poset.big() {
        let below = poset.smalls_below(w);
        let factors: Vec<_> = below.iter().map(|v| groups[v].clone()).collect();
        let (product, inclusions) = direct_product(&factors)?;
        for (v, inc) in below.iter().zip(inclusions) {
            maps.insert((*v, w), inc.image().to_vec());
        }
        groups.insert(w, product);
    }
    Ok(GraphicalComplexOfGroups::new(poset, groups, maps)?)
}

fn z2() -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::cyclic(2).expect("order 2 is within any cap"))
}

/// The right-angled Coxeter group of a graph, as a graphical product over the
/// poset of simplices of the graph.
pub fn racg(n: usize, edges: &[(usize, usize)]) -> Result<GraphicalComplexOfGroups, ExampleError> {
    check_edges(n, edges.iter().copied())?;
    let poset = simplices_poset(n, edges)?;
    let groups = poset.small().iter().map(|&v| (v, z2())).collect();
    graphical_product(poset, &groups)
}

/// RACG over the `n`-cycle; the poset realisation is a `2n`-cycle, so the
/// complex is exactly `n`-huge.
pub fn racg_cycle(n: usize) -> Result<GraphicalComplexOfGroups, ExampleError> {
    if n < 3 {
        return Err(ExampleError::CycleLength(n));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    racg(n, &edges)
}

/// RACG over the complete bipartite graph `K_{n,m}`; `n = m = 2` is the 4-gon.
pub fn racg_bipartite(n: usize, m: usize) -> Result<GraphicalComplexOfGroups, ExampleError> {
    if n < 2 || m < 2 {
        return Err(ExampleError::BipartiteSize(n, m));
    }
    let edges: Vec<_> = (0..n).flat_map(|a| (0..m).map(move |b| (a, n + b))).collect();
    racg(n + m, &edges)
}

fn check_edges(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Result<(), ExampleError> {
    for (a, b) in edges {
        if a >= n || b >= n {
            return Err(ExampleError::EdgeOutOfRange(a, b, n));
        }
    }
    Ok(())
}

/// The Coxeter group whose nerve is the graph `L` on `n` vertices with edges
/// `(a, b, m)`: vertex groups `Z/2`, edge groups dihedral of order `2m`. For an
/// edge with `a < b`, `a` maps to the first standard reflection and `b` to the
/// second.
pub fn coxeter_nerve(n: usize, edges: &[(usize, usize, usize)]) -> Result<GraphicalComplexOfGroups, ExampleError> {
    check_edges(n, edges.iter().map(|&(a, b, _)| (a, b)))?;
    let plain: Vec<_> = edges.iter().map(|&(a, b, _)| (a, b)).collect();
    let poset = simplices_poset(n, &plain)?;
    let mut groups: BTreeMap<VertexId, Arc<FiniteGroup>> = poset.small().iter().map(|&v| (v, z2())).collect();
    let mut maps = BTreeMap::new();
    for (i, &(a, b, m)) in edges.iter().enumerate() {
        let w = VertexId((n + i) as u32);
        let (d, first, second) = dihedral(m)?;
        let (lo, hi) = (a.min(b), a.max(b));
        maps.insert((VertexId(lo as u32), w), first.image().to_vec());
        maps.insert((VertexId(hi as u32), w), second.image().to_vec());
        groups.insert(w, d);
    }
    Ok(GraphicalComplexOfGroups::new(poset, groups, maps)?)
}

/// The locally Klein-four complex over the poset of simplices of a hexagonal
/// torus: `Z/2` on tiling edges, the Klein four-group on tiling vertices, and
/// the three edges at each tiling vertex hitting the three order-two
/// subgroups ([`KLEIN_IMAGES`], by small id).
pub fn klein_four_torus(torus: &HexTorus) -> Result<GraphicalComplexOfGroups, ExampleError> {
    let poset = torus.poset()?;
    torus.check_girth_six()?;
    let klein = Arc::new(FiniteGroup::klein_four());
    let z = z2();
    let mut groups = BTreeMap::new();
    for &v in poset.small() {
        groups.insert(v, z.clone());
    }
    let mut maps = BTreeMap::new();
    for &w in poset.big() {
        groups.insert(w, klein.clone());
        for (rank, v) in poset.smalls_below(w).into_iter().enumerate() {
            maps.insert((v, w), vec![0, KLEIN_IMAGES[rank]]);
        }
    }
    Ok(GraphicalComplexOfGroups::new(poset, groups, maps)?)
}

/// [`klein_four_torus`] over [`HexTorus::smallest_girth_six`].
pub fn default_klein_four_torus() -> GraphicalComplexOfGroups {
    klein_four_torus(&HexTorus::smallest_girth_six()).expect("the default torus has girth six")
}

/// A closed straight curve on the torus through hexagon centres
/// `offset + k * direction`, crossing the shared edge of each consecutive
/// pair through its midpoint (so each hexagon is crossed between opposite
/// edges).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusCurve {
    /// Index into [`crate::flats::DIRECTIONS`].
    pub direction: usize,
    pub offset: Hex,
}

/// Small vertices (tiling edges) crossed by the curve, in crossing order.
pub fn curve_smalls(torus: &HexTorus, curve: TorusCurve) -> Result<Vec<VertexId>, ExampleError> {
    if curve.direction > 2 {
        return Err(ExampleError::CurveDirection(curve.direction));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let dir = crate::flats::DIRECTIONS[curve.direction];
    let mut h = torus.reduce(curve.offset);
    loop {
        let v = torus.small_id(h, curve.direction);
        if !seen.insert(v) {
            break;
        }
        out.push(v);
        h = torus.reduce(h + dir);
    }
    Ok(out)
}

/// Two copies of the Klein-four torus glued along the small vertices crossed
/// by `curve`. Copy one keeps the torus ids; copy two shifts every
/// non-identified id by the torus vertex count. Both copies carry the same
/// group data, so identified smalls have valence 4.
pub fn torus_double(torus: &HexTorus, curve: TorusCurve) -> Result<GraphicalComplexOfGroups, ExampleError> {
    let single = klein_four_torus(torus)?;
    let q = single.poset();
    let glued: BTreeSet<VertexId> = curve_smalls(torus, curve)?.into_iter().collect();
    let shift = q.vertex_count() as u32;
    let twin = |v: VertexId| if glued.contains(&v) { v } else { VertexId(v.0 + shift) };

    let mut small: Vec<VertexId> = q.small().to_vec();
    small.extend(q.small().iter().filter(|v| !glued.contains(v)).map(|&v| twin(v)));
    let mut big: Vec<VertexId> = q.big().to_vec();
    big.extend(q.big().iter().map(|&w| twin(w)));
    let mut edges = q.edges().to_vec();
    edges.extend(q.edges().iter().map(|&(s, w)| (twin(s), twin(w))));
    let poset = OneDimPoset::new(small, big, edges)?;

    let mut groups = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for &v in q.small().iter().chain(q.big()) {
        let g = single.group(v).expect("vertex of the torus").clone();
        groups.insert(v, g.clone());
        groups.insert(twin(v), g);
    }
    for &(s, w) in q.edges() {
        let image = single.map(s, w).expect("edge of the torus").to_vec();
        maps.insert((twin(s), twin(w)), image.clone());
        maps.insert((s, w), image);
    }
    let gc = GraphicalComplexOfGroups::new(poset, groups, maps)?;
    let hugeness = poset::hugeness(gc.poset());
    if hugeness.is_some_and(|k| k < 6) {
        return Err(ExampleError::DoubleNotSixHuge { hugeness });
    }
    Ok(gc)
}

/// The torus with fewest hexagons whose double along `curve` is 6-huge, in
/// [`HexTorus::with_hex_count`] order. On small tori a straight curve wraps
/// back next to itself and the double has short cycles.
pub fn smallest_doubling_torus(curve: TorusCurve) -> Result<HexTorus, ExampleError> {
    if curve.direction > 2 {
        return Err(ExampleError::CurveDirection(curve.direction));
    }
    Ok((1..)
        .flat_map(HexTorus::with_hex_count)
        .find(|t| torus_double(t, curve).is_ok())
        .expect("large rectangular tori double to 6-huge posets"))
}

/// A family with its parameters, as accepted on the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ExampleSpec {
    /// Graphical product over a graph's poset of simplices with cyclic
    /// vertex groups of the given orders.
    GraphicalProduct {
        vertices: usize,
        edges: Vec<(usize, usize)>,
        orders: Vec<usize>,
    },
    RacgCycle {
        n: usize,
    },
    RacgBipartite {
        n: usize,
        m: usize,
    },
    Coxeter {
        vertices: usize,
        edges: Vec<(usize, usize, usize)>,
    },
    KleinTorus {
        t1: Option<Hex>,
        t2: Option<Hex>,
    },
    TorusDouble {
        t1: Option<Hex>,
        t2: Option<Hex>,
        curve: TorusCurve,
    },
}

fn torus_of(t1: Option<Hex>, t2: Option<Hex>) -> Result<HexTorus, ExampleError> {
    Ok(match (t1, t2) {
        (Some(a), Some(b)) => HexTorus::from_translations(a, b)?,
        _ => HexTorus::smallest_girth_six(),
    })
}

impl ExampleSpec {
    pub fn generate(&self) -> Result<GraphicalComplexOfGroups, ExampleError> {
        match self {
            ExampleSpec::GraphicalProduct { vertices, edges, orders } => {
                check_edges(*vertices, edges.iter().copied())?;
                let poset = simplices_poset(*vertices, edges)?;
                let mut groups = BTreeMap::new();
                for (i, &v) in poset.small().iter().enumerate() {
                    let order = orders.get(i).copied().unwrap_or(2);
                    groups.insert(v, Arc::new(FiniteGroup::cyclic(order)?));
                }
                graphical_product(poset, &groups)
            }
            ExampleSpec::RacgCycle { n } => racg_cycle(*n),
            ExampleSpec::RacgBipartite { n, m } => racg_bipartite(*n, *m),
            ExampleSpec::Coxeter { vertices, edges } => coxeter_nerve(*vertices, edges),
            ExampleSpec::KleinTorus { t1, t2 } => klein_four_torus(&torus_of(*t1, *t2)?),
            ExampleSpec::TorusDouble { t1: Some(a), t2: Some(b), curve } => {
                torus_double(&HexTorus::from_translations(*a, *b)?, *curve)
            }
            ExampleSpec::TorusDouble { curve, .. } => torus_double(&smallest_doubling_torus(*curve)?, *curve),
        }
    }
}
