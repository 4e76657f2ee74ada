//! Balls of the development by link saturation.
//!
//! Every cone-cell is a copy of the cone over `|Q|` and corresponds to one
//! element of the fundamental group. A vertex instance of type `u` is a coset
//! `gG_u`; its members are the cells through it, each carrying a torsor label
//! in `G_u` relative to the instance's base cell (label `e`, slot 0). Cells
//! through a small instance share its whole up-set; at a big instance two
//! cells share the instance of a small `s` below iff their labels differ by
//! an element of `img ψ_s`.
//!
//! Layers are saturated in order of distance from the base cell, cells in id
//! order, vertices in dense order and missing labels in element order, so the
//! result is reproducible bit for bit.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gcog::{validate, ComplexFailure, GraphicalComplexOfGroups};
use crate::graph::Graph;
use crate::poset::{self, VertexId, VertexKind};

const NONE: u32 = u32::MAX;

pub const MAX_CELLS_ENV: &str = "GCG_MAX_CELLS";
pub const DEFAULT_MAX_CELLS: usize = 4_000_000;

/// The configured cap on the number of cells of a ball.
pub fn max_cells() -> usize {
    std::env::var(MAX_CELLS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_MAX_CELLS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InstanceId(pub u32);

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl fmt::Display for InstanceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i{}", self.0)
    }
}

/// The three vertex types of the development.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexType {
    Cone,
    Small,
    Big,
}

impl From<VertexKind> for VertexType {
    fn from(k: VertexKind) -> Self {
        match k {
            VertexKind::Small => VertexType::Small,
            VertexKind::Big => VertexType::Big,
        }
    }
}

/// Squared edge length between two vertex types on a triangle with angles
/// π/2 (small), π/3 (big) and π/6 (cone), scaled so the small–big edge is 1.
pub fn edge_length_squared(a: VertexType, b: VertexType) -> Option<u32> {
    use VertexType::*;
    match (a.min(b), a.max(b)) {
        (Small, Big) => Some(1),
        (Cone, Small) => Some(3),
        (Cone, Big) => Some(4),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum DevelopError {
    #[error("complex is not valid: {failures:?}")]
    Invalid { failures: Vec<ComplexFailure> },
    #[error("complex is {hugeness:?}-huge and T(4) is {t4}; need 6-huge, or 4-huge with T(4)")]
    NotHuge { hugeness: Option<usize>, t4: bool },
    #[error("saturation conflict at cell {cell}, vertex {vertex}: {detail}")]
    Inconsistent { cell: CellId, vertex: VertexId, detail: String },
    #[error("ball exceeds the cap of {cap} cells")]
    CellLimit { cap: usize },
    #[error("malformed ball data: {0}")]
    Malformed(String),
}

/// A word in the local groups; `(u, g)` stands for `g ∈ G_u`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupWord {
    pub letters: Vec<(VertexId, usize)>,
}

impl GroupWord {
    pub fn new(letters: Vec<(VertexId, usize)>) -> Self {
        Self { letters }
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn push(&mut self, u: VertexId, g: usize) {
        self.letters.push((u, g));
    }

    /// The formal inverse: reversed letters with inverted elements.
    pub fn inverse(&self, gc: &GraphicalComplexOfGroups) -> Option<Self> {
        let mut letters = Vec::with_capacity(self.letters.len());
        for &(u, g) in self.letters.iter().rev() {
            let group = gc.group(u)?;
            if g >= group.order() {
                return None;
            }
            letters.push((u, group.inv(g)));
        }
        Some(Self { letters })
    }

    pub fn concat(&self, other: &GroupWord) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self { letters }
    }

    pub fn repeat(&self, n: usize) -> Self {
        Self { letters: self.letters.repeat(n) }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (u, g)) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{u}:{g}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad word letter {0:?}: expected `vertex:element`")]
pub struct WordParseError(pub String);

impl FromStr for GroupWord {
    type Err = WordParseError;

    /// Parses `v:g,v:g,...`; the empty string is the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (u, g) = part.split_once(':').ok_or_else(|| WordParseError(part.into()))?;
            let u = u.trim().parse().map_err(|_| WordParseError(part.into()))?;
            let g = g.trim().parse().map_err(|_| WordParseError(part.into()))?;
            letters.push((VertexId(u), g));
        }
        Ok(Self { letters })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum ResolveError {
    #[error("letter {index} uses the identity element")]
    IdentityLetter { index: usize },
    #[error("letter {index} names unknown vertex {vertex}")]
    UnknownVertex { index: usize, vertex: VertexId },
    #[error("letter {index} names element {element} outside the group of {vertex}")]
    ElementOutOfRange { index: usize, vertex: VertexId, element: usize },
    /// The instance needed by the letter is not saturated.
    #[error("letter {index} leaves the developed ball at cell {cell}")]
    OutOfRadius { index: usize, cell: CellId },
}

/// A radius-`R` piece of the development.
#[derive(Debug, Clone)]
pub struct DevelopedBall {
    complex: GraphicalComplexOfGroups,
    radius: u32,
    focused: bool,
    nv: usize,
    orders: Vec<u32>,
    distance: Vec<u32>,
    attach: Vec<u32>,
    label: Vec<u32>,
    inst_vertex: Vec<u32>,
    inst_offset: Vec<u32>,
    inst_filled: Vec<u32>,
    slots: Vec<u32>,
    cap: usize,
}

/// Checks the development precondition: valid, and 6-huge or (4-huge and
/// T(4)). A forest realisation counts as huge for every k.
pub fn check_developable(gc: &GraphicalComplexOfGroups) -> Result<(), DevelopError> {
    let rep = validate(gc);
    if !rep.is_valid() {
        return Err(DevelopError::Invalid { failures: rep.failures });
    }
    let k = poset::hugeness(gc.poset());
    let at_least = |n: usize| k.is_none_or(|k| k >= n);
    if at_least(6) {
        return Ok(());
    }
    let t4 = crate::gcog::find_proper_triple(gc).is_none();
    if at_least(4) && t4 {
        return Ok(());
    }
    Err(DevelopError::NotHuge { hugeness: k, t4 })
}

/// Develops every instance within cell distance `< radius` of the base cell.
pub fn develop_ball(gc: &GraphicalComplexOfGroups, radius: u32) -> Result<DevelopedBall, DevelopError> {
    develop_ball_capped(gc, radius, max_cells())
}

/// [`develop_ball`] with an explicit cell cap in place of the configured one.
pub fn develop_ball_capped(
    gc: &GraphicalComplexOfGroups,
    radius: u32,
    cap: usize,
) -> Result<DevelopedBall, DevelopError> {
    check_developable(gc)?;
    let mut ball = DevelopedBall::seed(gc.clone(), radius, false);
    ball.cap = cap;
    let mut next = 0usize;
    while next < ball.distance.len() {
        let d = ball.distance[next];
        if d >= radius {
            break;
        }
        ball.saturate_cell(next, d + 1)?;
        next += 1;
    }
    Ok(ball)
}

/// Develops only around the cells the given words pass through: every cell
/// reached by a prefix of some word (and the base cell) has all its
/// instances saturated, provided its recorded distance is below `radius`.
/// Recorded distances are upper bounds in this mode.
pub fn develop_focused(
    gc: &GraphicalComplexOfGroups,
    radius: u32,
    words: &[GroupWord],
) -> Result<DevelopedBall, DevelopError> {
    check_developable(gc)?;
    let mut ball = DevelopedBall::seed(gc.clone(), radius, true);
    let mut focus: BTreeSet<u32> = BTreeSet::from([0]);
    let mut done: BTreeSet<u32> = BTreeSet::new();
    loop {
        let mut changed = false;
        let pending: Vec<u32> = focus.difference(&done).copied().collect();
        for c in pending {
            done.insert(c);
            let d = ball.distance[c as usize];
            if d < radius {
                ball.saturate_cell(c as usize, d + 1)?;
                changed = true;
            }
        }
        for w in words {
            for c in ball.walk(w) {
                changed |= focus.insert(c.0);
            }
        }
        if !changed {
            return Ok(ball);
        }
    }
}

impl DevelopedBall {
    fn seed(complex: GraphicalComplexOfGroups, radius: u32, focused: bool) -> Self {
        let nv = complex.poset().vertex_count();
        let orders = (0..nv).map(|i| complex.group_at(i).order() as u32).collect();
        let mut ball = Self {
            complex,
            radius,
            focused,
            nv,
            orders,
            distance: Vec::new(),
            attach: Vec::new(),
            label: Vec::new(),
            inst_vertex: Vec::new(),
            inst_offset: Vec::new(),
            inst_filled: Vec::new(),
            slots: Vec::new(),
            cap: max_cells(),
        };
        ball.distance.push(0);
        ball.attach.resize(nv, NONE);
        ball.label.resize(nv, NONE);
        for u in 0..nv {
            let i = ball.new_instance(u);
            ball.set_unchecked(0, u, i, 0);
        }
        ball
    }

    fn new_instance(&mut self, u: usize) -> u32 {
        let id = self.inst_vertex.len() as u32;
        self.inst_vertex.push(u as u32);
        self.inst_offset.push(self.slots.len() as u32);
        self.inst_filled.push(0);
        self.slots.extend(std::iter::repeat_n(NONE, self.orders[u] as usize));
        id
    }

    #[inline]
    fn slot(&self, inst: u32, l: u32) -> u32 {
        self.slots[(self.inst_offset[inst as usize] + l) as usize]
    }

    #[inline]
    fn set_unchecked(&mut self, x: usize, u: usize, inst: u32, l: u32) {
        self.attach[x * self.nv + u] = inst;
        self.label[x * self.nv + u] = l;
        let off = (self.inst_offset[inst as usize] + l) as usize;
        self.slots[off] = x as u32;
        self.inst_filled[inst as usize] += 1;
    }

    fn conflict(&self, x: usize, u: usize, detail: String) -> DevelopError {
        DevelopError::Inconsistent { cell: CellId(x as u32), vertex: self.complex.poset().id_of(u), detail }
    }

    fn set(&mut self, x: usize, u: usize, inst: u32, l: u32) -> Result<(), DevelopError> {
        let cur = self.attach[x * self.nv + u];
        if cur != NONE {
            if cur == inst && self.label[x * self.nv + u] == l {
                return Ok(());
            }
            return Err(self.conflict(x, u, format!("already attached to {cur}, now {inst} label {l}")));
        }
        let occupant = self.slot(inst, l);
        if occupant != NONE {
            return Err(self.conflict(x, u, format!("label {l} of instance {inst} held by cell {occupant}")));
        }
        self.set_unchecked(x, u, inst, l);
        Ok(())
    }

    fn saturate_cell(&mut self, x: usize, dist: u32) -> Result<(), DevelopError> {
        for u in 0..self.nv {
            let inst = self.attach[x * self.nv + u];
            if self.inst_filled[inst as usize] == self.orders[u] {
                continue;
            }
            for h in 0..self.orders[u] {
                if self.slot(inst, h) == NONE {
                    self.create_cell(inst, h, dist)?;
                }
            }
        }
        Ok(())
    }

    /// Creates the cell with label `h` at `inst` and attaches it everywhere.
    fn create_cell(&mut self, inst: u32, h: u32, dist: u32) -> Result<(), DevelopError> {
        if self.distance.len() >= self.cap {
            return Err(DevelopError::CellLimit { cap: self.cap });
        }
        let x = self.distance.len();
        self.distance.push(dist);
        self.attach.extend(std::iter::repeat_n(NONE, self.nv));
        self.label.extend(std::iter::repeat_n(NONE, self.nv));
        let u = self.inst_vertex[inst as usize] as usize;
        self.set(x, u, inst, h)?;
        let mut work = Vec::new();
        if self.complex.poset().kind_of(u) == VertexKind::Small {
            let base = self.slot(inst, 0) as usize;
            for k in 0..self.complex.incident(u).len() {
                let (j, e) = self.complex.incident(u)[k];
                let (bi, bl) = (self.attach[base * self.nv + j], self.label[base * self.nv + j]);
                let l = self.complex.group_at(j).mul(bl as usize, self.complex.edge_apply(e, h as usize));
                self.set(x, j, bi, l as u32)?;
                work.push(j);
            }
        } else {
            work.push(u);
        }
        self.close(x, work)?;
        for v in 0..self.nv {
            if self.attach[x * self.nv + v] == NONE {
                let i = self.new_instance(v);
                self.set_unchecked(x, v, i, 0);
            }
        }
        Ok(())
    }

    /// From each attached big instance, finds existing cells that share a
    /// small instance with `x` and attaches `x` to it and its up-set.
    fn close(&mut self, x: usize, mut work: Vec<usize>) -> Result<(), DevelopError> {
        let nv = self.nv;
        while let Some(p) = work.pop() {
            let (ip, lp) = (self.attach[x * nv + p], self.label[x * nv + p] as usize);
            let gp = self.complex.group_at(p).clone();
            for k in 0..self.complex.incident(p).len() {
                let (s, e) = self.complex.incident(p)[k];
                let found = self.complex.edge_image(e)[1..].iter().find_map(|&hh| {
                    let y = self.slot(ip, gp.mul(lp, hh) as u32);
                    (y != NONE).then_some((y as usize, hh))
                });
                let Some((y, hh)) = found else { continue };
                let kk = self.complex.edge_preimage(e, gp.inv(hh)).expect("inverse of an image element");
                let gs = self.complex.group_at(s);
                let ls = gs.mul(self.label[y * nv + s] as usize, kk) as u32;
                let is = self.attach[y * nv + s];
                let known = self.attach[x * nv + s] != NONE;
                self.set(x, s, is, ls)?;
                if known {
                    continue;
                }
                for m in 0..self.complex.incident(s).len() {
                    let (j, e2) = self.complex.incident(s)[m];
                    let gj = self.complex.group_at(j);
                    let lj = gj.mul(self.label[y * nv + j] as usize, self.complex.edge_apply(e2, kk)) as u32;
                    let ij = self.attach[y * nv + j];
                    let had = self.attach[x * nv + j] != NONE;
                    self.set(x, j, ij, lj)?;
                    if !had {
                        work.push(j);
                    }
                }
            }
        }
        Ok(())
    }

    /// Cells visited by the prefixes of `w`, stopping where it leaves the ball.
    fn walk(&self, w: &GroupWord) -> Vec<CellId> {
        let mut out = vec![CellId(0)];
        let mut x = 0usize;
        for &(u, g) in &w.letters {
            let Some(ui) = self.complex.poset().index_of(u) else { break };
            if g == 0 || g >= self.orders[ui] as usize {
                break;
            }
            let (inst, l) = (self.attach[x * self.nv + ui], self.label[x * self.nv + ui]);
            let target = self.complex.group_at(ui).mul(l as usize, g) as u32;
            let y = self.slot(inst, target);
            if y == NONE {
                break;
            }
            x = y as usize;
            out.push(CellId(y));
        }
        out
    }

    pub fn complex(&self) -> &GraphicalComplexOfGroups {
        &self.complex
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Whether this ball came from [`develop_focused`].
    pub fn is_focused(&self) -> bool {
        self.focused
    }

    pub fn base(&self) -> CellId {
        CellId(0)
    }

    pub fn cell_count(&self) -> usize {
        self.distance.len()
    }

    pub fn instance_count(&self) -> usize {
        self.inst_vertex.len()
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> {
        (0..self.distance.len() as u32).map(CellId)
    }

    pub fn instances(&self) -> impl Iterator<Item = InstanceId> {
        (0..self.inst_vertex.len() as u32).map(InstanceId)
    }

    /// Recorded distance from the base cell (exact unless focused).
    pub fn distance(&self, c: CellId) -> u32 {
        self.distance[c.0 as usize]
    }

    /// Instance and torsor label of cell `c` at dense vertex `u`.
    #[inline]
    pub fn attachment(&self, c: CellId, u: usize) -> (InstanceId, usize) {
        let k = c.0 as usize * self.nv + u;
        (InstanceId(self.attach[k]), self.label[k] as usize)
    }

    #[inline]
    pub fn instance_at(&self, c: CellId, u: usize) -> InstanceId {
        InstanceId(self.attach[c.0 as usize * self.nv + u])
    }

    /// Dense poset vertex of an instance.
    pub fn instance_vertex(&self, i: InstanceId) -> usize {
        self.inst_vertex[i.0 as usize] as usize
    }

    pub fn instance_type(&self, i: InstanceId) -> VertexType {
        self.complex.poset().kind_of(self.instance_vertex(i)).into()
    }

    pub fn instance_base(&self, i: InstanceId) -> CellId {
        CellId(self.slot(i.0, 0))
    }

    /// The member with a given label, if developed.
    pub fn member(&self, i: InstanceId, l: usize) -> Option<CellId> {
        let c = self.slot(i.0, l as u32);
        (c != NONE).then_some(CellId(c))
    }

    /// `(label, cell)` for every developed member.
    pub fn members(&self, i: InstanceId) -> impl Iterator<Item = (usize, CellId)> + '_ {
        let off = self.inst_offset[i.0 as usize] as usize;
        let n = self.orders[self.instance_vertex(i)] as usize;
        self.slots[off..off + n].iter().enumerate().filter(|(_, &c)| c != NONE).map(|(l, &c)| (l, CellId(c)))
    }

    pub fn member_count(&self, i: InstanceId) -> usize {
        self.inst_filled[i.0 as usize] as usize
    }

    /// An instance is saturated once all its labels carry cells.
    pub fn is_saturated(&self, i: InstanceId) -> bool {
        self.inst_filled[i.0 as usize] == self.orders[self.instance_vertex(i)]
    }

    /// A cone is saturated when every instance of its cell is.
    pub fn cell_saturated(&self, c: CellId) -> bool {
        (0..self.nv).all(|u| self.is_saturated(self.instance_at(c, u)))
    }

    /// Cells sharing at least one instance with `c`, sorted.
    pub fn neighbours(&self, c: CellId) -> Vec<CellId> {
        let mut out = BTreeSet::new();
        for u in 0..self.nv {
            for (_, y) in self.members(self.instance_at(c, u)) {
                if y != c {
                    out.insert(y);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Whether two cells share an instance.
    pub fn adjacent(&self, a: CellId, b: CellId) -> bool {
        a != b && (0..self.nv).any(|u| self.instance_at(a, u) == self.instance_at(b, u))
    }

    pub fn to_data(&self) -> BallData {
        let q = self.complex.poset();
        let cells = (0..self.cell_count())
            .map(|x| CellData {
                distance: self.distance[x],
                attach: (0..self.nv).map(|u| [self.attach[x * self.nv + u], self.label[x * self.nv + u]]).collect(),
            })
            .collect();
        let instances = self
            .instances()
            .map(|i| {
                let off = self.inst_offset[i.0 as usize] as usize;
                let n = self.orders[self.instance_vertex(i)] as usize;
                InstanceData {
                    vertex: q.id_of(self.instance_vertex(i)),
                    members: self.slots[off..off + n].iter().map(|&c| (c != NONE).then_some(c)).collect(),
                    saturated: self.is_saturated(i),
                }
            })
            .collect();
        BallData { complex: self.complex.clone(), radius: self.radius, focused: self.focused, cells, instances }
    }

    /// Rebuilds a ball, checking that attachments and member tables agree.
    pub fn from_data(data: BallData) -> Result<Self, DevelopError> {
        let bad = |m: String| DevelopError::Malformed(m);
        let q = data.complex.poset().clone();
        let mut ball = Self::seed(data.complex, data.radius, data.focused);
        ball.distance.clear();
        ball.attach.clear();
        ball.label.clear();
        ball.inst_vertex.clear();
        ball.inst_offset.clear();
        ball.inst_filled.clear();
        ball.slots.clear();
        for (k, inst) in data.instances.iter().enumerate() {
            let u = q.index_of(inst.vertex).ok_or_else(|| bad(format!("instance {k}: unknown vertex")))?;
            if inst.members.len() != ball.orders[u] as usize {
                return Err(bad(format!("instance {k}: member table has the wrong length")));
            }
            ball.new_instance(u);
        }
        if data.cells.is_empty() {
            return Err(bad("no cells".into()));
        }
        for (x, cell) in data.cells.iter().enumerate() {
            if cell.attach.len() != ball.nv {
                return Err(bad(format!("cell {x}: attachment row has the wrong length")));
            }
            ball.distance.push(cell.distance);
            for (u, &[inst, l]) in cell.attach.iter().enumerate() {
                if inst as usize >= ball.inst_vertex.len()
                    || ball.inst_vertex[inst as usize] as usize != u
                    || l >= ball.orders[u]
                {
                    return Err(bad(format!("cell {x}: bad attachment at dense vertex {u}")));
                }
                ball.attach.push(inst);
                ball.label.push(l);
            }
        }
        for (x, _) in data.cells.iter().enumerate() {
            for u in 0..ball.nv {
                let (inst, l) = (ball.attach[x * ball.nv + u], ball.label[x * ball.nv + u]);
                let off = (ball.inst_offset[inst as usize] + l) as usize;
                if ball.slots[off] != NONE {
                    return Err(bad(format!("instance {inst}: label {l} used twice")));
                }
                ball.slots[off] = x as u32;
                ball.inst_filled[inst as usize] += 1;
            }
        }
        for (k, inst) in data.instances.iter().enumerate() {
            let off = ball.inst_offset[k] as usize;
            for (l, m) in inst.members.iter().enumerate() {
                if m.unwrap_or(NONE) != ball.slots[off + l] {
                    return Err(bad(format!("instance {k}: member table disagrees with attachments")));
                }
            }
            if inst.members[0].is_none() {
                return Err(bad(format!("instance {k}: no base cell")));
            }
        }
        Ok(ball)
    }

    /// DOT export of the 1-skeleton: cones as points, small instances gray,
    /// big instances white.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph ball {\n");
        for c in self.cells() {
            out.push_str(&format!("  {c} [shape=point];\n"));
        }
        for i in self.instances() {
            let fill = match self.instance_type(i) {
                VertexType::Small => "gray",
                _ => "white",
            };
            out.push_str(&format!("  {i} [shape=circle, style=filled, fillcolor={fill}];\n"));
        }
        let mut edges = BTreeSet::new();
        for c in self.cells() {
            for u in 0..self.nv {
                out.push_str(&format!("  {c} -- {};\n", self.instance_at(c, u)));
            }
            for &(s, w) in self.complex.poset().edges() {
                let q = self.complex.poset();
                let (si, wi) = (q.index_of(s).unwrap(), q.index_of(w).unwrap());
                edges.insert((self.instance_at(c, si), self.instance_at(c, wi)));
            }
        }
        for (a, b) in edges {
            out.push_str(&format!("  {a} -- {b} [style=dashed];\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellData {
    pub distance: u32,
    /// `[instance, label]` per poset vertex in dense order.
    pub attach: Vec<[u32; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceData {
    pub vertex: VertexId,
    /// Cell per label, `null` where undeveloped.
    pub members: Vec<Option<u32>>,
    pub saturated: bool,
}

/// Serialized ball; embeds the complex so it loads on its own.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallData {
    pub complex: GraphicalComplexOfGroups,
    pub radius: u32,
    pub focused: bool,
    pub cells: Vec<CellData>,
    pub instances: Vec<InstanceData>,
}

impl Serialize for DevelopedBall {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_data().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DevelopedBall {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Self::from_data(BallData::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Resolves a word from the base cell, moving at each letter `(u, g)` to the
/// cell whose label at the current cell's `u`-instance is the current label
/// times `g`.
pub fn resolve_word(ball: &DevelopedBall, word: &GroupWord) -> Result<CellId, ResolveError> {
    let q = ball.complex.poset();
    let mut x = ball.base();
    for (index, &(u, g)) in word.letters.iter().enumerate() {
        let ui = q.index_of(u).ok_or(ResolveError::UnknownVertex { index, vertex: u })?;
        let group = ball.complex.group_at(ui);
        if g >= group.order() {
            return Err(ResolveError::ElementOutOfRange { index, vertex: u, element: g });
        }
        if g == 0 {
            return Err(ResolveError::IdentityLetter { index });
        }
        let (inst, l) = ball.attachment(x, ui);
        x = ball.member(inst, group.mul(l, g)).ok_or(ResolveError::OutOfRadius { index, cell: x })?;
    }
    Ok(x)
}

/// A vertex of a link: the cone point of a cell or a vertex instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum LinkVertex {
    Cone(CellId),
    Instance(InstanceId),
}

/// Which vertex a link belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum LinkCentre {
    Cone(CellId),
    Instance(InstanceId),
}

/// A link as an explicit graph with typed vertices.
#[derive(Debug, Clone)]
pub struct LinkGraph {
    pub centre: LinkCentre,
    pub centre_type: VertexType,
    pub vertices: Vec<LinkVertex>,
    pub graph: Graph,
}

/// Builds the link of a cone vertex or instance from the ball's triangles
/// `(cone, small, big)`. Meaningful when the centre is saturated.
pub fn link_graph(ball: &DevelopedBall, centre: LinkCentre) -> LinkGraph {
    let q = ball.complex.poset();
    let mut index: BTreeMap<LinkVertex, usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut id = |v: LinkVertex, vertices: &mut Vec<LinkVertex>| -> usize {
        *index.entry(v).or_insert_with(|| {
            vertices.push(v);
            vertices.len() - 1
        })
    };
    let centre_type = match centre {
        LinkCentre::Cone(c) => {
            for &(s, w) in q.edges() {
                let a = id(LinkVertex::Instance(ball.instance_at(c, q.index_of(s).unwrap())), &mut vertices);
                let b = id(LinkVertex::Instance(ball.instance_at(c, q.index_of(w).unwrap())), &mut vertices);
                edges.push((a, b));
            }
            // isolated vertices of |Q| still belong to the link
            for u in 0..q.vertex_count() {
                id(LinkVertex::Instance(ball.instance_at(c, u)), &mut vertices);
            }
            VertexType::Cone
        }
        LinkCentre::Instance(i) => {
            let u = ball.instance_vertex(i);
            for (_, c) in ball.members(i) {
                let a = id(LinkVertex::Cone(c), &mut vertices);
                for &(j, _) in ball.complex.incident(u) {
                    let b = id(LinkVertex::Instance(ball.instance_at(c, j)), &mut vertices);
                    edges.push((a, b));
                }
            }
            ball.instance_type(i)
        }
    };
    let mut graph = Graph::from_edges(vertices.len(), edges);
    graph.canonicalize();
    LinkGraph { centre, centre_type, vertices, graph }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum BallFailure {
    /// A cell is attached at vertex `vertex` to an instance of another type.
    ConeAttachment { cell: CellId, vertex: VertexId },
    /// A saturated instance whose member count differs from the group order.
    MemberCount { instance: InstanceId, expected: usize, found: usize },
    /// A member whose attachment disagrees with the instance table.
    LabelMismatch { instance: InstanceId, cell: CellId },
    /// Members of a small instance attached to different instances of a big
    /// vertex above it.
    UpSetNotShared { instance: InstanceId, big: VertexId },
    /// At a big instance, sharing the instance of `small` disagrees with the
    /// coset relation of the labels.
    CosetMismatch { instance: InstanceId, cells: (CellId, CellId), small: VertexId },
    /// A link vertex of valence below 2: a free face.
    FreeFace { centre: LinkCentre, vertex: LinkVertex, valence: usize },
    /// A triangle whose vertices are not one of each type.
    TypeColoring { cell: CellId, small: VertexId, big: VertexId },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallReport {
    /// Number of links (or triangles) examined.
    pub checked: usize,
    pub failures: Vec<BallFailure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl BallReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares every saturated link with the local development: `|Q|` at cone
/// vertices, `|Q_{>v}| * G_v` at small instances and the coset graph of
/// `G_w` at big instances.
pub fn check_links(ball: &DevelopedBall) -> BallReport {
    let gc = &ball.complex;
    let q = gc.poset();
    let mut rep = BallReport::default();
    for c in ball.cells().filter(|&c| ball.cell_saturated(c)) {
        rep.checked += 1;
        for u in 0..ball.nv {
            if ball.instance_vertex(ball.instance_at(c, u)) != u {
                rep.failures.push(BallFailure::ConeAttachment { cell: c, vertex: q.id_of(u) });
            }
        }
    }
    for i in ball.instances().filter(|&i| ball.is_saturated(i)) {
        rep.checked += 1;
        let u = ball.instance_vertex(i);
        let order = ball.orders[u] as usize;
        let members: Vec<(usize, CellId)> = ball.members(i).collect();
        if members.len() != order {
            rep.failures.push(BallFailure::MemberCount { instance: i, expected: order, found: members.len() });
            continue;
        }
        for &(l, c) in &members {
            if ball.attachment(c, u) != (i, l) {
                rep.failures.push(BallFailure::LabelMismatch { instance: i, cell: c });
            }
        }
        match q.kind_of(u) {
            VertexKind::Small => {
                for &(j, _) in gc.incident(u) {
                    let first = ball.instance_at(members[0].1, j);
                    if members.iter().any(|&(_, c)| ball.instance_at(c, j) != first) {
                        rep.failures.push(BallFailure::UpSetNotShared { instance: i, big: q.id_of(j) });
                    }
                }
            }
            VertexKind::Big => {
                let g = gc.group_at(u);
                for &(s, e) in gc.incident(u) {
                    for &(la, a) in &members {
                        for &(lb, b) in &members {
                            if a >= b {
                                continue;
                            }
                            let diff = g.mul(g.inv(la), lb);
                            let in_image = gc.edge_preimage(e, diff).is_some();
                            let shared = ball.instance_at(a, s) == ball.instance_at(b, s);
                            if in_image != shared {
                                rep.failures.push(BallFailure::CosetMismatch {
                                    instance: i,
                                    cells: (a, b),
                                    small: q.id_of(s),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    rep
}

/// Every vertex of every saturated link has valence at least 2, i.e. no edge
/// of the ball is a free face.
pub fn check_geodesic_completeness(ball: &DevelopedBall) -> BallReport {
    let mut rep = BallReport::default();
    let centres = ball
        .cells()
        .filter(|&c| ball.cell_saturated(c))
        .map(LinkCentre::Cone)
        .chain(ball.instances().filter(|&i| ball.is_saturated(i)).map(LinkCentre::Instance));
    for centre in centres {
        rep.checked += 1;
        let link = link_graph(ball, centre);
        for (k, &v) in link.vertices.iter().enumerate() {
            let valence = link.graph.degree(k);
            if valence < 2 {
                rep.failures.push(BallFailure::FreeFace { centre, vertex: v, valence });
            }
        }
    }
    if rep.checked == 0 {
        rep.warnings.push("no saturated link in the ball; the check is vacuous".into());
    }
    rep
}

/// Every triangle `(cone, small, big)` has one vertex of each type, and the
/// type-determined edge lengths make it a right triangle at the small vertex.
pub fn check_type_coloring(ball: &DevelopedBall) -> BallReport {
    let q = ball.complex.poset();
    let mut rep = BallReport::default();
    let right_angle = edge_length_squared(VertexType::Small, VertexType::Big).unwrap()
        + edge_length_squared(VertexType::Cone, VertexType::Small).unwrap()
        == edge_length_squared(VertexType::Cone, VertexType::Big).unwrap();
    for c in ball.cells() {
        for &(s, w) in q.edges() {
            rep.checked += 1;
            let (si, wi) = (q.index_of(s).unwrap(), q.index_of(w).unwrap());
            let types = [
                VertexType::Cone,
                ball.instance_type(ball.instance_at(c, si)),
                ball.instance_type(ball.instance_at(c, wi)),
            ];
            let distinct: BTreeSet<_> = types.iter().collect();
            let lengths_ok = (0..3).all(|a| (a + 1..3).all(|b| edge_length_squared(types[a], types[b]).is_some()));
            if distinct.len() != 3 || !lengths_ok || !right_angle {
                rep.failures.push(BallFailure::TypeColoring { cell: c, small: s, big: w });
            }
        }
    }
    rep
}

/// Breadth-first distances between cells in the ball's adjacency graph.
pub fn cell_distances(ball: &DevelopedBall, from: CellId) -> Vec<Option<u32>> {
    let mut dist = vec![None; ball.cell_count()];
    dist[from.0 as usize] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        let d = dist[c.0 as usize].unwrap();
        for y in ball.neighbours(c) {
            if dist[y.0 as usize].is_none() {
                dist[y.0 as usize] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum WitnessError {
    #[error("{vertex} is not a small vertex")]
    NotSmall { vertex: VertexId },
    #[error("vertices are at distance {distance:?} < 6; path {path:?}")]
    NotAntipodal { distance: Option<usize>, path: Vec<VertexId> },
    #[error("element {element} is not a non-identity element of the group of {vertex}")]
    BadElement { vertex: VertexId, element: usize },
}

/// Axis data for the product of non-identity elements of two antipodal small
/// groups. Angles are in units of π/420.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfiniteOrderWitness {
    pub v1: VertexId,
    pub v2: VertexId,
    pub g1: usize,
    pub g2: usize,
    /// Edge-path distance between `v1` and `v2` in `|Q|`.
    pub poset_distance: usize,
    /// Angle at every interior cone vertex of the axis.
    pub cone_angle: u64,
    /// Angle at every small vertex the axis crosses, one per crossing that
    /// could be checked in the ball.
    pub small_angles: Vec<u64>,
    /// Cells along the axis, one per prefix of the repeated word.
    pub axis: Vec<CellId>,
    /// Cells of `(g2 g1)^n` for `n = 1..`.
    pub powers: Vec<CellId>,
    pub cone_geodesic: bool,
    pub small_geodesic: bool,
    pub powers_distinct: bool,
    /// Number of letters that could not be resolved in the ball.
    pub unresolved: usize,
}

impl InfiniteOrderWitness {
    pub fn verified(&self) -> bool {
        self.cone_geodesic && self.small_geodesic && self.powers_distinct && self.unresolved == 0
    }
}

/// Half-turn in units of π/420.
const PI: u64 = 420;
const CONE_ANGLE: u64 = 70;
const SMALL_ANGLE: u64 = 210;

/// The word `(v2, g2)(v1, g1)` repeated `n` times.
pub fn axis_word(v1: VertexId, v2: VertexId, g1: usize, g2: usize, n: usize) -> GroupWord {
    GroupWord::new(vec![(v2, g2), (v1, g1)]).repeat(n)
}

/// Checks the local-geodesic conditions along the axis of `g2 g1` and that
/// its first `powers` powers resolve to pairwise distinct cells.
pub fn infinite_order_witness(
    ball: &DevelopedBall,
    v1: VertexId,
    v2: VertexId,
    elements: Option<(usize, usize)>,
    powers: usize,
) -> Result<InfiniteOrderWitness, WitnessError> {
    let gc = &ball.complex;
    let q = gc.poset();
    for v in [v1, v2] {
        if q.kind(v) != Some(VertexKind::Small) {
            return Err(WitnessError::NotSmall { vertex: v });
        }
    }
    let (i1, i2) = (q.index_of(v1).unwrap(), q.index_of(v2).unwrap());
    let graph = q.graph();
    let path = graph.shortest_path(i1, i2);
    let distance = path.as_ref().map(|p| p.len() - 1);
    if distance.is_some_and(|d| d < 6) {
        return Err(WitnessError::NotAntipodal {
            distance,
            path: path.unwrap().into_iter().map(|i| q.id_of(i)).collect(),
        });
    }
    let (g1, g2) = elements.unwrap_or((1, 1));
    for (v, i, g) in [(v1, i1, g1), (v2, i2, g2)] {
        if g == 0 || g >= gc.group_at(i).order() {
            return Err(WitnessError::BadElement { vertex: v, element: g });
        }
    }
    // a disconnected pair is at infinite distance
    let poset_distance = distance.unwrap_or(usize::MAX);
    let cone_angle = (poset_distance as u64).saturating_mul(CONE_ANGLE);

    let word = axis_word(v1, v2, g1, g2, powers);
    let mut axis = vec![ball.base()];
    let mut small_angles = Vec::new();
    let mut unresolved = 0;
    let mut x = ball.base();
    for (index, &(u, g)) in word.letters.iter().enumerate() {
        let ui = q.index_of(u).unwrap();
        let (inst, l) = ball.attachment(x, ui);
        let Some(y) = ball.member(inst, gc.group_at(ui).mul(l, g)) else {
            unresolved = word.len() - index;
            break;
        };
        // the two cone points meet at the small instance; measure them in its link
        let link = link_graph(ball, LinkCentre::Instance(inst));
        let pos = |c: CellId| link.vertices.iter().position(|&v| v == LinkVertex::Cone(c));
        if let (Some(a), Some(b)) = (pos(x), pos(y)) {
            let d = link.graph.distances_from(a)[b];
            small_angles.push(d.map_or(u64::MAX, |d| d as u64 * SMALL_ANGLE));
        }
        axis.push(y);
        x = y;
    }
    let powers_cells: Vec<CellId> = axis.iter().skip(2).step_by(2).copied().collect();
    let mut seen: BTreeSet<CellId> = BTreeSet::from([ball.base()]);
    let powers_distinct = powers_cells.iter().all(|c| seen.insert(*c));
    Ok(InfiniteOrderWitness {
        v1,
        v2,
        g1,
        g2,
        poset_distance,
        cone_angle,
        small_geodesic: !small_angles.is_empty() && small_angles.iter().all(|&a| a >= PI),
        small_angles,
        cone_geodesic: cone_angle >= PI,
        axis,
        powers: powers_cells,
        powers_distinct,
        unresolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use std::sync::Arc;

    fn ball(gc: &GraphicalComplexOfGroups, r: u32) -> DevelopedBall {
        develop_ball(gc, r).unwrap()
    }

    #[test]
    fn test_radius_zero_is_one_cell() {
        let gc = examples::racg_cycle(6).unwrap();
        let b = ball(&gc, 0);
        assert_eq!(b.cell_count(), 1);
        assert_eq!(b.instance_count(), 12);
        assert!(b.instances().all(|i| !b.is_saturated(i)));
        let rep = check_geodesic_completeness(&b);
        assert!(rep.passes());
        assert_eq!(rep.warnings.len(), 1);
    }

    /// Independent count: cells of radius 1 are the elements of the union of
    /// the local groups, i.e. 1 + Σ_small (|G_v| - 1) + Σ_big (|G_w| - 1 - Σ_{v<w} (|G_v| - 1)).
    #[test]
    fn test_radius_one_counts() {
        let gc = examples::racg_cycle(6).unwrap();
        let b = ball(&gc, 1);
        // 6 small neighbours, and per big vertex the product element ab
        assert_eq!(b.cell_count(), 1 + 6 + 6);
        let klein = examples::default_klein_four_torus();
        let kb = ball(&klein, 1);
        // every non-identity Klein element lies in one of the three images
        assert_eq!(kb.cell_count(), 1 + 21);
        for i in kb.instances().filter(|&i| kb.is_saturated(i)) {
            assert_eq!(kb.member_count(i), kb.complex().group_at(kb.instance_vertex(i)).order());
        }
    }

    #[test]
    fn test_links_and_invariants_radius_three() {
        let gc = examples::racg_cycle(6).unwrap();
        let b = ball(&gc, 3);
        for rep in [check_links(&b), check_geodesic_completeness(&b), check_type_coloring(&b)] {
            assert!(rep.passes(), "{:?}", rep.failures);
            assert!(rep.checked > 0);
        }
    }

    #[test]
    fn test_small_link_is_four_cycle() {
        let gc = examples::racg_cycle(6).unwrap();
        let b = ball(&gc, 2);
        let i = b.instance_at(b.base(), 0);
        let link = link_graph(&b, LinkCentre::Instance(i));
        assert_eq!(link.vertices.len(), 4);
        assert_eq!(link.graph.edge_count(), 4);
        assert_eq!(link.graph.girth(), Some(4));
    }

    #[test]
    fn test_klein_big_link_is_coset_graph() {
        let gc = examples::default_klein_four_torus();
        let b = ball(&gc, 1);
        let q = gc.poset();
        let w = q.small_count();
        let link = link_graph(&b, LinkCentre::Instance(b.instance_at(b.base(), w)));
        // 4 cone points and 2 cosets for each of the three subgroups
        assert_eq!(link.vertices.len(), 4 + 6);
        assert_eq!(link.graph.edge_count(), 12);
        assert_eq!(link.graph.girth(), Some(6));
    }

    #[test]
    fn test_free_face_detected() {
        // a pendant small vertex 12 below big vertex 6 (edge 0-1)
        let base = poset::cycle_poset(6).to_data();
        let mut data = base.clone();
        data.small.push(VertexId(12));
        data.edges.push((VertexId(12), VertexId(6)));
        let q = crate::poset::OneDimPoset::from_data(data).unwrap();
        let z2 = Arc::new(crate::groups::FiniteGroup::cyclic(2).unwrap());
        let groups = q.small().iter().map(|&v| (v, z2.clone())).collect();
        let gc = examples::graphical_product(q, &groups).unwrap();
        let b = ball(&gc, 1);
        let rep = check_geodesic_completeness(&b);
        assert!(rep.failures.iter().any(|f| matches!(f, BallFailure::FreeFace { valence: 1, .. })));
    }

    #[test]
    fn test_resolve_word_examples() {
        let gc = examples::racg_cycle(6).unwrap();
        let b = ball(&gc, 2);
        assert_eq!(resolve_word(&b, &GroupWord::default()), Ok(b.base()));
        let vv: GroupWord = "0:1,0:1".parse().unwrap();
        assert_eq!(resolve_word(&b, &vv), Ok(b.base()));
        assert_eq!(resolve_word(&b, &"0:0".parse().unwrap()), Err(ResolveError::IdentityLetter { index: 0 }));
    }

    #[test]
    fn test_small_letters_agree_with_big_letter() {
        let gc = examples::default_klein_four_torus();
        let q = gc.poset();
        let w = q.big()[0];
        let below = q.smalls_below(w);
        let (v1, v2) = (below[0], below[1]);
        let b = ball(&gc, 2);
        let g = gc.group(w).unwrap();
        let product = g.mul(gc.map(v1, w).unwrap()[1], gc.map(v2, w).unwrap()[1]);
        let by_smalls = resolve_word(&b, &GroupWord::new(vec![(v1, 1), (v2, 1)])).unwrap();
        let by_big = resolve_word(&b, &GroupWord::new(vec![(w, product)])).unwrap();
        assert_eq!(by_smalls, by_big);
    }

    #[test]
    fn test_word_times_inverse_returns_to_base() {
        let gc = examples::racg_cycle(6).unwrap();
        let b = ball(&gc, 4);
        let q = gc.poset();
        let words = [
            GroupWord::new(vec![(VertexId(0), 1), (VertexId(3), 1)]),
            GroupWord::new(vec![(q.big()[2], 3), (VertexId(5), 1)]),
        ];
        for w in words {
            let inv = w.inverse(&gc).unwrap();
            assert_eq!(resolve_word(&b, &w.concat(&inv)), Ok(b.base()));
        }
    }

    #[test]
    fn test_deterministic_and_monotone() {
        let gc = examples::racg_cycle(6).unwrap();
        let small = ball(&gc, 2);
        let again = ball(&gc, 2);
        assert_eq!(serde_json::to_string(&small).unwrap(), serde_json::to_string(&again).unwrap());
        let big = ball(&gc, 3);
        for c in small.cells() {
            for u in 0..12 {
                assert_eq!(small.attachment(c, u), big.attachment(c, u));
            }
        }
    }

    #[test]
    fn test_distances_are_bfs_distances() {
        let gc = examples::racg_cycle(6).unwrap();
        let b = ball(&gc, 3);
        let d = cell_distances(&b, b.base());
        for c in b.cells() {
            assert_eq!(d[c.0 as usize], Some(b.distance(c)));
        }
    }

    #[test]
    fn test_json_round_trip() {
        let gc = examples::racg_cycle(6).unwrap();
        let b = ball(&gc, 2);
        let json = serde_json::to_string(&b).unwrap();
        let back: DevelopedBall = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn test_precondition_rejects_five_huge_without_t4() {
        // a 5-cycle of Klein-four-shaped vertices is only 5-huge; the 5-cycle
        // RACG has T(4) and is accepted, a triangle RACG is not
        let tri = examples::racg_cycle(3).unwrap();
        assert!(matches!(develop_ball(&tri, 1), Err(DevelopError::NotHuge { .. })));
        assert!(develop_ball(&examples::racg_cycle(5).unwrap(), 1).is_ok());
    }

    #[test]
    fn test_antipodal_witness() {
        let gc = examples::racg_cycle(6).unwrap();
        let b = ball(&gc, 4);
        let w = infinite_order_witness(&b, VertexId(0), VertexId(3), None, 2).unwrap();
        assert!(w.verified(), "{w:?}");
        assert_eq!(w.poset_distance, 6);
        assert!(matches!(
            infinite_order_witness(&b, VertexId(0), VertexId(2), None, 2),
            Err(WitnessError::NotAntipodal { distance: Some(4), .. })
        ));
    }

    #[test]
    fn test_focused_resolves_long_word() {
        let gc = examples::default_klein_four_torus();
        let word: GroupWord = "0:1,5:1,9:1,13:1,2:1".parse().unwrap();
        let b = develop_focused(&gc, 6, std::slice::from_ref(&word)).unwrap();
        assert!(resolve_word(&b, &word).is_ok());
        assert!(check_links(&b).passes());
    }
}
