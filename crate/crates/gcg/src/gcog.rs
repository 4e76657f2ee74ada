//! Graphical complexes of groups: local groups on poset vertices, structure
//! maps on incidences, validation, proper triples, T(4) and classification.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flats::{self, FlatWitness};
use crate::groups::{check_monomorphism, FiniteGroup, GroupError, GroupTable, MonoViolation, Monomorphism};
use crate::poset::{self, OneDimPoset, PosetData, PosetError, VertexId, VertexKind};
use crate::smallcancel;

/// Errors that prevent a complex from being assembled at all.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("invalid poset: {0}")]
    Poset(#[from] PosetError),
    #[error("group at vertex {vertex}: {error}")]
    Group { vertex: VertexId, error: GroupError },
    #[error("no group given for vertex {vertex}")]
    MissingGroup { vertex: VertexId },
    #[error("a group is given for {vertex}, which is not a poset vertex")]
    ExtraGroup { vertex: VertexId },
    #[error("malformed key {key:?} (expected a vertex id, or \"small->big\" for maps)")]
    BadKey { key: String },
    #[error("no structure map for the incidence {small} <= {big}")]
    MissingMap { small: VertexId, big: VertexId },
    #[error("structure map {small}->{big} is not on an incidence pair")]
    ExtraMap { small: VertexId, big: VertexId },
    #[error("structure map {small}->{big} has the wrong shape: {violation}")]
    MapShape { small: VertexId, big: VertexId, violation: MonoViolation },
}

/// Serialized complex: `{"poset": .., "groups": {id: group}, "maps": {"v->w": [image]}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexData {
    pub poset: PosetData,
    pub groups: BTreeMap<String, GroupTable>,
    pub maps: BTreeMap<String, Vec<usize>>,
}

fn parse_vertex(key: &str) -> Result<VertexId, ComplexError> {
    key.trim().parse::<u32>().map(VertexId).map_err(|_| ComplexError::BadKey { key: key.to_string() })
}

fn parse_map_key(key: &str) -> Result<(VertexId, VertexId), ComplexError> {
    let (a, b) = key.split_once("->").ok_or_else(|| ComplexError::BadKey { key: key.to_string() })?;
    Ok((parse_vertex(a)?, parse_vertex(b)?))
}

/// Per incidence data cached for the hot loops of development.
#[derive(Debug, Clone)]
struct EdgeData {
    small: usize,
    big: usize,
    image: Vec<usize>,
    // preimage[x] = Some(g) iff image[g] = x
    preimage: Vec<Option<u32>>,
}

/// The graphical complex of groups G(Q).
#[derive(Debug, Clone)]
pub struct GraphicalComplexOfGroups {
    poset: OneDimPoset,
    groups: Vec<Arc<FiniteGroup>>,
    edges: Vec<EdgeData>,
    // for each dense vertex: incident (dense neighbour, edge index), sorted
    incident: Vec<Vec<(usize, usize)>>,
}

impl PartialEq for GraphicalComplexOfGroups {
    fn eq(&self, other: &Self) -> bool {
        self.poset == other.poset
            && self.groups == other.groups
            && self.edges.iter().map(|e| &e.image).eq(other.edges.iter().map(|e| &e.image))
    }
}

impl Eq for GraphicalComplexOfGroups {}

impl GraphicalComplexOfGroups {
    /// Assembles a complex. Maps must exist exactly on the incidence pairs and
    /// have the right length and range; the algebraic conditions are left to
    /// [`validate`].
    pub fn new(
        poset: OneDimPoset,
        groups: BTreeMap<VertexId, Arc<FiniteGroup>>,
        mut maps: BTreeMap<(VertexId, VertexId), Vec<usize>>,
    ) -> Result<Self, ComplexError> {
        let n = poset.vertex_count();
        let mut dense_groups = Vec::with_capacity(n);
        for i in 0..n {
            let v = poset.id_of(i);
            let g = groups.get(&v).ok_or(ComplexError::MissingGroup { vertex: v })?;
            dense_groups.push(g.clone());
        }
        if let Some(&v) = groups.keys().find(|v| !poset.contains(**v)) {
            return Err(ComplexError::ExtraGroup { vertex: v });
        }
        let mut edges = Vec::with_capacity(poset.edges().len());
        for &(s, b) in poset.edges() {
            let image = maps.remove(&(s, b)).ok_or(ComplexError::MissingMap { small: s, big: b })?;
            let (si, bi) = (poset.index_of(s).unwrap(), poset.index_of(b).unwrap());
            let (gs, gb) = (&dense_groups[si], &dense_groups[bi]);
            if image.len() != gs.order() {
                return Err(ComplexError::MapShape {
                    small: s,
                    big: b,
                    violation: MonoViolation::LengthMismatch { expected: gs.order(), found: image.len() },
                });
            }
            if let Some((element, &value)) = image.iter().enumerate().find(|(_, &x)| x >= gb.order()) {
                return Err(ComplexError::MapShape {
                    small: s,
                    big: b,
                    violation: MonoViolation::OutOfRange { element, value },
                });
            }
            let mut preimage = vec![None; gb.order()];
            for (g, &x) in image.iter().enumerate() {
                preimage[x].get_or_insert(g as u32);
            }
            edges.push(EdgeData { small: si, big: bi, image, preimage });
        }
        if let Some(&(s, b)) = maps.keys().next() {
            return Err(ComplexError::ExtraMap { small: s, big: b });
        }
        let mut incident = vec![Vec::new(); n];
        for (e, ed) in edges.iter().enumerate() {
            incident[ed.small].push((ed.big, e));
            incident[ed.big].push((ed.small, e));
        }
        for l in &mut incident {
            l.sort_unstable();
        }
        Ok(Self { poset, groups: dense_groups, edges, incident })
    }

    pub fn from_data(data: ComplexData) -> Result<Self, ComplexError> {
        let poset = OneDimPoset::from_data(data.poset)?;
        let mut groups = BTreeMap::new();
        for (key, table) in data.groups {
            let v = parse_vertex(&key)?;
            let g = FiniteGroup::from_table(table).map_err(|error| ComplexError::Group { vertex: v, error })?;
            groups.insert(v, Arc::new(g));
        }
        let mut maps = BTreeMap::new();
        for (key, image) in data.maps {
            maps.insert(parse_map_key(&key)?, image);
        }
        Self::new(poset, groups, maps)
    }

    pub fn to_data(&self) -> ComplexData {
        let groups =
            (0..self.groups.len()).map(|i| (self.poset.id_of(i).to_string(), self.groups[i].to_table())).collect();
        let maps = self
            .poset
            .edges()
            .iter()
            .zip(&self.edges)
            .map(|((s, b), e)| (format!("{s}->{b}"), e.image.clone()))
            .collect();
        ComplexData { poset: self.poset.to_data(), groups, maps }
    }

    pub fn poset(&self) -> &OneDimPoset {
        &self.poset
    }

    pub fn group(&self, v: VertexId) -> Option<&Arc<FiniteGroup>> {
        self.poset.index_of(v).map(|i| &self.groups[i])
    }

    /// Group at a dense vertex index.
    pub fn group_at(&self, i: usize) -> &Arc<FiniteGroup> {
        &self.groups[i]
    }

    /// The image array of the structure map `small -> big`.
    pub fn map(&self, small: VertexId, big: VertexId) -> Option<&[usize]> {
        self.poset.edge_index(small, big).map(|e| self.edges[e].image.as_slice())
    }

    pub fn monomorphism(&self, small: VertexId, big: VertexId) -> Option<Result<Monomorphism, GroupError>> {
        let e = self.poset.edge_index(small, big)?;
        let ed = &self.edges[e];
        Some(Monomorphism::new(self.groups[ed.small].clone(), self.groups[ed.big].clone(), ed.image.clone()))
    }

    /// Dense incident vertices with edge indices.
    pub fn incident(&self, i: usize) -> &[(usize, usize)] {
        &self.incident[i]
    }

    /// `psi(g)` along edge `e`.
    #[inline]
    pub fn edge_apply(&self, e: usize, g: usize) -> usize {
        self.edges[e].image[g]
    }

    /// The element of the small group mapping to `x` along edge `e`, if any.
    #[inline]
    pub fn edge_preimage(&self, e: usize, x: usize) -> Option<usize> {
        self.edges[e].preimage[x].map(|g| g as usize)
    }

    pub fn edge_image(&self, e: usize) -> &[usize] {
        &self.edges[e].image
    }

    /// Dense (small, big) of an edge.
    pub fn edge_ends(&self, e: usize) -> (usize, usize) {
        (self.edges[e].small, self.edges[e].big)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge index of dense (small, big).
    pub fn edge_between(&self, small: usize, big: usize) -> Option<usize> {
        self.incident[small].iter().find(|(j, _)| *j == big).map(|&(_, e)| e)
    }

    /// Largest local group order.
    pub fn max_group_order(&self) -> usize {
        self.groups.iter().map(|g| g.order()).max().unwrap_or(1)
    }

    /// Whether every small group has order 2, every big group is the Klein
    /// four-group, every big vertex has valence 3 and every structure map hits
    /// an order-two subgroup.
    pub fn is_locally_klein_shaped(&self) -> bool {
        let klein = FiniteGroup::klein_four();
        let ns = self.poset.small_count();
        (0..ns).all(|i| self.groups[i].order() == 2)
            && (ns..self.groups.len()).all(|j| *self.groups[j] == klein && self.incident[j].len() == 3)
    }
}

impl Serialize for GraphicalComplexOfGroups {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_data().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GraphicalComplexOfGroups {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Self::from_data(ComplexData::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// One violated condition of a graphical complex of groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum ComplexFailure {
    TrivialGroup { vertex: VertexId },
    NotMonomorphism { small: VertexId, big: VertexId, violation: MonoViolation },
    NotProper { small: VertexId, big: VertexId, small_order: usize, big_order: usize },
    ImagesMeet { big: VertexId, smalls: (VertexId, VertexId), shared: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexReport {
    pub failures: Vec<ComplexFailure>,
}

impl ComplexReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks non-trivial local groups, that every structure map is a proper
/// monomorphism, and that images at a big vertex pairwise meet trivially.
pub fn validate(gc: &GraphicalComplexOfGroups) -> ComplexReport {
    let q = gc.poset();
    let mut failures = Vec::new();
    for i in 0..q.vertex_count() {
        if gc.groups[i].order() < 2 {
            failures.push(ComplexFailure::TrivialGroup { vertex: q.id_of(i) });
        }
    }
    for (&(s, b), ed) in q.edges().iter().zip(&gc.edges) {
        let (gs, gb) = (&gc.groups[ed.small], &gc.groups[ed.big]);
        if let Err(violation) = check_monomorphism(gs, gb, &ed.image) {
            failures.push(ComplexFailure::NotMonomorphism { small: s, big: b, violation });
        }
        if gs.order() >= gb.order() {
            failures.push(ComplexFailure::NotProper {
                small: s,
                big: b,
                small_order: gs.order(),
                big_order: gb.order(),
            });
        }
    }
    for j in q.small_count()..q.vertex_count() {
        let below = &gc.incident[j];
        for (x, &(s1, e1)) in below.iter().enumerate() {
            for &(s2, e2) in &below[x + 1..] {
                let shared = gc.edges[e1].image.iter().find(|&&g| g != 0 && gc.edges[e2].preimage[g].is_some());
                if let Some(&shared) = shared {
                    failures.push(ComplexFailure::ImagesMeet {
                        big: q.id_of(j),
                        smalls: (q.id_of(s1), q.id_of(s2)),
                        shared,
                    });
                }
            }
        }
    }
    ComplexReport { failures }
}

/// Three distinct small vertices below a big vertex `w` with non-identity
/// `a ∈ img(v2)`, `b ∈ img(v1)` such that `a⁻¹b` is a non-identity element of
/// `img(v3)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProperTripleWitness {
    pub big: VertexId,
    pub smalls: [VertexId; 3],
    /// `a`, `b` and `a⁻¹b` as elements of the big group.
    pub a: usize,
    pub b: usize,
    pub a_inv_b: usize,
    /// The same three elements as (small vertex, element of its group) pairs:
    /// preimages in `v2`, `v1`, `v3`.
    pub elements: [(VertexId, usize); 3],
}

/// Checks the membership conditions of a witness against the complex.
pub fn verify_triple(gc: &GraphicalComplexOfGroups, t: &ProperTripleWitness) -> bool {
    let q = gc.poset();
    let [v1, v2, v3] = t.smalls;
    if v1 == v2 || v2 == v3 || v1 == v3 {
        return false;
    }
    let Some(g) = gc.group(t.big) else { return false };
    let edge = |v: VertexId| q.edge_index(v, t.big);
    let (Some(e1), Some(e2), Some(e3)) = (edge(v1), edge(v2), edge(v3)) else { return false };
    let pre = |e: usize, x: usize| x < g.order() && x != 0 && gc.edges[e].preimage[x].is_some();
    pre(e2, t.a) && pre(e1, t.b) && t.a_inv_b == g.mul(g.inv(t.a), t.b) && pre(e3, t.a_inv_b)
}

fn triple_at(gc: &GraphicalComplexOfGroups, j: usize) -> Option<ProperTripleWitness> {
    let q = gc.poset();
    let g = &gc.groups[j];
    let below = &gc.incident[j];
    for &(s1, e1) in below {
        for &(s2, e2) in below {
            if s2 == s1 {
                continue;
            }
            for &(s3, e3) in below {
                if s3 == s1 || s3 == s2 {
                    continue;
                }
                let mut img2: Vec<usize> = gc.edges[e2].image[1..].to_vec();
                let mut img1: Vec<usize> = gc.edges[e1].image[1..].to_vec();
                img2.sort_unstable();
                img1.sort_unstable();
                for &a in &img2 {
                    for &b in &img1 {
                        let c = g.mul(g.inv(a), b);
                        if c == 0 {
                            continue;
                        }
                        if let Some(pc) = gc.edges[e3].preimage[c] {
                            let pa = gc.edges[e2].preimage[a].unwrap() as usize;
                            let pb = gc.edges[e1].preimage[b].unwrap() as usize;
                            return Some(ProperTripleWitness {
                                big: q.id_of(j),
                                smalls: [q.id_of(s1), q.id_of(s2), q.id_of(s3)],
                                a,
                                b,
                                a_inv_b: c,
                                elements: [(q.id_of(s2), pa), (q.id_of(s1), pb), (q.id_of(s3), pc as usize)],
                            });
                        }
                    }
                }
            }
        }
    }
    None
}

/// Exhaustive search; the witness returned is the least in the order
/// (w, v1, v2, v3, a, b) by vertex id and element index.
pub fn find_proper_triple(gc: &GraphicalComplexOfGroups) -> Option<ProperTripleWitness> {
    let q = gc.poset();
    (q.small_count()..q.vertex_count()).find_map(|j| triple_at(gc, j))
}

/// The least witness at one big vertex.
pub fn find_proper_triple_at(gc: &GraphicalComplexOfGroups, big: VertexId) -> Option<ProperTripleWitness> {
    let j = gc.poset().index_of(big)?;
    if gc.poset().kind_of(j) != VertexKind::Big {
        return None;
    }
    triple_at(gc, j)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct T4Certificate {
    pub holds: bool,
    pub witness: Option<ProperTripleWitness>,
}

/// T(4), read as the absence of a proper triple.
pub fn check_t4(gc: &GraphicalComplexOfGroups) -> T4Certificate {
    let witness = find_proper_triple(gc);
    T4Certificate { holds: witness.is_none(), witness }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HyperbolicReason {
    KHugeAtLeast7,
    NoProperTriple,
    /// 5-huge with T(4): certified by the π/2–π/4–π/5 link condition.
    C5T4Metric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Systolic,
    C4T4,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    Hyperbolic { reason: HyperbolicReason, hugeness: Option<usize> },
    FlatFound { witness: Box<FlatWitness> },
    Inconclusive { regime: Regime, hugeness: Option<usize>, triple: Option<ProperTripleWitness> },
    OutOfTheory { hugeness: Option<usize>, t4: bool },
}

impl Verdict {
    pub fn is_out_of_theory(&self) -> bool {
        matches!(self, Verdict::OutOfTheory { .. })
    }
}

/// The classification verdict. `None` hugeness means the realisation is a
/// forest, which counts as k-huge for every k.
pub fn classify(gc: &GraphicalComplexOfGroups) -> Verdict {
    let k = poset::hugeness(gc.poset());
    let at_least = |n: usize| k.is_none_or(|k| k >= n);
    if at_least(7) {
        return Verdict::Hyperbolic { reason: HyperbolicReason::KHugeAtLeast7, hugeness: k };
    }
    let triple = find_proper_triple(gc);
    if at_least(6) {
        let Some(triple) = triple else {
            return Verdict::Hyperbolic { reason: HyperbolicReason::NoProperTriple, hugeness: k };
        };
        if let Some(witness) = flats::find_flat(gc) {
            return Verdict::FlatFound { witness: Box::new(witness) };
        }
        return Verdict::Inconclusive { regime: Regime::Systolic, hugeness: k, triple: Some(triple) };
    }
    let t4 = triple.is_none();
    if at_least(4) && t4 {
        if at_least(5) {
            let cert = smallcancel::check_link_condition_complex(gc, smallcancel::AngleAssignment::C5T4);
            if cert.holds {
                return Verdict::Hyperbolic { reason: HyperbolicReason::C5T4Metric, hugeness: k };
            }
        }
        return Verdict::Inconclusive { regime: Regime::C4T4, hugeness: k, triple: None };
    }
    Verdict::OutOfTheory { hugeness: k, t4 }
}

/// A generator of the presentation: a non-identity element of a local group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub vertex: VertexId,
    pub element: usize,
}

/// `lhs = rhs` as words in generator indices; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
}

/// The presentation of the fundamental group as the free product of the local
/// groups modulo the identifications along structure maps. No simplification.
pub fn fundamental_group_presentation(gc: &GraphicalComplexOfGroups) -> Presentation {
    let q = gc.poset();
    let mut generators = Vec::new();
    let mut first = Vec::with_capacity(q.vertex_count());
    for i in 0..q.vertex_count() {
        first.push(generators.len());
        for element in 1..gc.groups[i].order() {
            generators.push(Generator { vertex: q.id_of(i), element });
        }
    }
    let gen = |i: usize, x: usize| -> Vec<usize> {
        if x == 0 {
            Vec::new()
        } else {
            vec![first[i] + x - 1]
        }
    };
    let mut relations = Vec::new();
    for i in 0..q.vertex_count() {
        let g = &gc.groups[i];
        for x in 1..g.order() {
            for y in 1..g.order() {
                let mut lhs = gen(i, x);
                lhs.extend(gen(i, y));
                relations.push(Relation { lhs, rhs: gen(i, g.mul(x, y)) });
            }
        }
    }
    for ed in &gc.edges {
        for x in 1..ed.image.len() {
            relations.push(Relation { lhs: gen(ed.small, x), rhs: gen(ed.big, ed.image[x]) });
        }
    }
    Presentation { generators, relations }
}
