//! Finite groups stored as multiplication tables, and monomorphisms between them.
//!
//! The identity is always element `0`. Groups are immutable once built and are
//! shared through `Arc`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Environment variable overriding [`DEFAULT_MAX_GROUP_ORDER`].
pub const MAX_ORDER_ENV: &str = "GCG_MAX_GROUP_ORDER";
pub const DEFAULT_MAX_GROUP_ORDER: usize = 256;

/// The configured cap on group orders.
pub fn max_group_order() -> usize {
    std::env::var(MAX_ORDER_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_MAX_GROUP_ORDER)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group order must be positive")]
    EmptyGroup,
    #[error("table has {rows} rows but the declared order is {order}")]
    RowCount { order: usize, rows: usize },
    #[error("row {row} has {len} entries, expected {order}")]
    RowLength { row: usize, len: usize, order: usize },
    #[error("table[{a}][{b}] = {value} is not an element index")]
    EntryOutOfRange { a: usize, b: usize, value: usize },
    #[error("group order {order} exceeds the configured cap {cap} (set {MAX_ORDER_ENV} to raise it)")]
    OrderCap { order: usize, cap: usize },
    #[error("table violates the group axioms: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Axioms(Vec<AxiomViolation>),
    #[error("dihedral parameter m = {0} must be at least 2")]
    DihedralParameter(usize),
    #[error("cyclic group order must be positive")]
    CyclicParameter,
    #[error("direct product of an empty list")]
    EmptyProduct,
    #[error("the two monomorphisms have different target groups")]
    TargetMismatch,
    #[error("cannot compose: the first map's target is not the second map's source")]
    NotComposable,
    #[error("invalid monomorphism: {0}")]
    Monomorphism(MonoViolation),
}

/// One failed group axiom, with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    IdentityLaw { element: usize },
    RowNotPermutation { row: usize },
    ColumnNotPermutation { column: usize },
    MissingInverse { element: usize },
    Associativity { a: usize, b: usize, c: usize },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::IdentityLaw { element } => write!(f, "identity law fails at element {element}"),
            Self::RowNotPermutation { row } => write!(f, "row {row} is not a permutation"),
            Self::ColumnNotPermutation { column } => {
                write!(f, "column {column} is not a permutation")
            }
            Self::MissingInverse { element } => write!(f, "element {element} has no inverse"),
            Self::Associativity { a, b, c } => write!(f, "({a}*{b})*{c} != {a}*({b}*{c})"),
        }
    }
}

/// Result of [`validate_group`]: the list of violated axioms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupReport {
    pub violations: Vec<AxiomViolation>,
}

impl GroupReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Serialized form of a group: `{"name", "order", "table"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    pub name: String,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

fn check_shape(t: &GroupTable) -> Result<(), GroupError> {
    let n = t.order;
    if n == 0 {
        return Err(GroupError::EmptyGroup);
    }
    if t.table.len() != n {
        return Err(GroupError::RowCount { order: n, rows: t.table.len() });
    }
    for (a, row) in t.table.iter().enumerate() {
        if row.len() != n {
            return Err(GroupError::RowLength { row: a, len: row.len(), order: n });
        }
        if let Some((b, &value)) = row.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(GroupError::EntryOutOfRange { a, b, value });
        }
    }
    Ok(())
}

fn is_permutation(values: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    for v in values {
        if seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Checks every group axiom on a raw table, with element 0 as the identity.
///
/// Malformed dimensions or out-of-range entries are a structural error rather
/// than an axiom failure.
#[allow(clippy::needless_range_loop)]
pub fn validate_group(t: &GroupTable) -> Result<GroupReport, GroupError> {
    check_shape(t)?;
    let n = t.order;
    let m = &t.table;
    let mut violations = Vec::new();
    for x in 0..n {
        if m[0][x] != x || m[x][0] != x {
            violations.push(AxiomViolation::IdentityLaw { element: x });
        }
    }
    for a in 0..n {
        if !is_permutation(m[a].iter().copied(), n) {
            violations.push(AxiomViolation::RowNotPermutation { row: a });
        }
    }
    for b in 0..n {
        if !is_permutation((0..n).map(|a| m[a][b]), n) {
            violations.push(AxiomViolation::ColumnNotPermutation { column: b });
        }
    }
    for x in 0..n {
        if !(0..n).any(|y| m[x][y] == 0 && m[y][x] == 0) {
            violations.push(AxiomViolation::MissingInverse { element: x });
        }
    }
    'assoc: for a in 0..n {
        for b in 0..n {
            let ab = m[a][b];
            for c in 0..n {
                if m[ab][c] != m[a][m[b][c]] {
                    violations.push(AxiomViolation::Associativity { a, b, c });
                    break 'assoc;
                }
            }
        }
    }
    Ok(GroupReport { violations })
}

/// A finite group given by its multiplication table. Element 0 is the identity.
#[derive(Clone)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<u32>,
    inv: Vec<u32>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}

impl Eq for FiniteGroup {}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.order)
    }
}

impl FiniteGroup {
    /// Builds a group from a raw table, rejecting anything that is not a group or
    /// exceeds the order cap.
    pub fn from_table(t: GroupTable) -> Result<Self, GroupError> {
        let report = validate_group(&t)?;
        if !report.is_valid() {
            return Err(GroupError::Axioms(report.violations));
        }
        let cap = max_group_order();
        if t.order > cap {
            return Err(GroupError::OrderCap { order: t.order, cap });
        }
        Ok(Self::from_valid_rows(t.name, &t.table))
    }

    fn from_valid_rows(name: String, rows: &[Vec<usize>]) -> Self {
        let n = rows.len();
        let table: Vec<u32> = rows.iter().flatten().map(|&x| x as u32).collect();
        let mut inv = vec![0u32; n];
        for (x, slot) in inv.iter_mut().enumerate() {
            *slot = (0..n).find(|&y| table[x * n + y] == 0).expect("validated group") as u32;
        }
        Self { name, order: n, table, inv }
    }

    /// The cyclic group Z/n with element k standing for k.
    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::CyclicParameter);
        }
        let cap = max_group_order();
        if n > cap {
            return Err(GroupError::OrderCap { order: n, cap });
        }
        let rows: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Ok(Self::from_valid_rows(format!("Z/{n}"), &rows))
    }

    /// Z/2 x Z/2 with element `2a + b` standing for `(a, b)`.
    pub fn klein_four() -> Self {
        let rows: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        Self::from_valid_rows("Z/2 x Z/2".to_string(), &rows)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// Smallest `n >= 1` with `a^n = e`.
    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// Whether `set` (which must contain 0) is closed under products and inverses.
    pub fn is_subgroup(&self, set: &BTreeSet<usize>) -> bool {
        set.contains(&0)
            && set.iter().all(|&a| set.contains(&self.inv(a)) && set.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.order).map(|a| (0..self.order).map(|b| self.mul(a, b)).collect()).collect()
    }

    pub fn to_table(&self) -> GroupTable {
        GroupTable { name: self.name.clone(), order: self.order, table: self.rows() }
    }
}

impl Serialize for FiniteGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_table().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let t = GroupTable::deserialize(d)?;
        FiniteGroup::from_table(t).map_err(serde::de::Error::custom)
    }
}

/// Why an image array fails to define a monomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum MonoViolation {
    #[error("image has {found} entries, the source has order {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("image[{element}] = {value} is not an element of the target")]
    OutOfRange { element: usize, value: usize },
    #[error("the identity is sent to {value}")]
    IdentityNotFixed { value: usize },
    #[error("not a homomorphism at ({a}, {b})")]
    NotHomomorphism { a: usize, b: usize },
    #[error("elements {a} and {b} have the same image")]
    NotInjective { a: usize, b: usize },
}

/// Checks that `image` defines an injective homomorphism `source -> target`.
pub fn check_monomorphism(source: &FiniteGroup, target: &FiniteGroup, image: &[usize]) -> Result<(), MonoViolation> {
    if image.len() != source.order() {
        return Err(MonoViolation::LengthMismatch { expected: source.order(), found: image.len() });
    }
    if let Some((element, &value)) = image.iter().enumerate().find(|(_, &v)| v >= target.order()) {
        return Err(MonoViolation::OutOfRange { element, value });
    }
    if image[0] != 0 {
        return Err(MonoViolation::IdentityNotFixed { value: image[0] });
    }
    for a in source.elements() {
        for b in source.elements() {
            if image[source.mul(a, b)] != target.mul(image[a], image[b]) {
                return Err(MonoViolation::NotHomomorphism { a, b });
            }
        }
    }
    let mut first = vec![usize::MAX; target.order()];
    for (a, &x) in image.iter().enumerate() {
        if first[x] != usize::MAX {
            return Err(MonoViolation::NotInjective { a: first[x], b: a });
        }
        first[x] = a;
    }
    Ok(())
}

/// An injective homomorphism between two finite groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomorphism {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    image: Vec<usize>,
}

impl Monomorphism {
    pub fn new(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, image: Vec<usize>) -> Result<Self, GroupError> {
        check_monomorphism(&source, &target, &image).map_err(GroupError::Monomorphism)?;
        Ok(Self { source, target, image })
    }

    pub fn identity(g: Arc<FiniteGroup>) -> Self {
        let image = g.elements().collect();
        Self { source: g.clone(), target: g, image }
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, a: usize) -> usize {
        self.image[a]
    }

    /// The image as a set of target elements.
    pub fn image_set(&self) -> BTreeSet<usize> {
        self.image.iter().copied().collect()
    }

    /// Properness: the source is strictly smaller than the target.
    pub fn is_proper(&self) -> bool {
        self.source.order() < self.target.order()
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &Monomorphism) -> Result<Monomorphism, GroupError> {
        if *self.target != *then.source {
            return Err(GroupError::NotComposable);
        }
        let image = self.image.iter().map(|&x| then.image[x]).collect();
        Ok(Monomorphism { source: self.source.clone(), target: then.target.clone(), image })
    }
}

/// `image(a) ∩ image(b)` for two monomorphisms into the same group.
pub fn subgroup_intersection(a: &Monomorphism, b: &Monomorphism) -> Result<BTreeSet<usize>, GroupError> {
    if *a.target != *b.target {
        return Err(GroupError::TargetMismatch);
    }
    let other = b.image_set();
    Ok(a.image.iter().copied().filter(|x| other.contains(x)).collect())
}

/// The direct product of `groups` and its factor inclusions.
///
/// A tuple `(x_0, .., x_{k-1})` is encoded in mixed radix with the first factor
/// most significant, so for `[Z/2, Z/3]` the pair `(a, b)` is element `3a + b`.
pub fn direct_product(groups: &[Arc<FiniteGroup>]) -> Result<(Arc<FiniteGroup>, Vec<Monomorphism>), GroupError> {
    if groups.is_empty() {
        return Err(GroupError::EmptyProduct);
    }
    let cap = max_group_order();
    let mut order: usize = 1;
    for g in groups {
        order = order
            .checked_mul(g.order())
            .filter(|&o| o <= cap)
            .ok_or(GroupError::OrderCap { order: order.saturating_mul(g.order()), cap })?;
    }
    // strides[i] = product of the orders of the later factors
    let mut strides = vec![1usize; groups.len()];
    for i in (0..groups.len() - 1).rev() {
        strides[i] = strides[i + 1] * groups[i + 1].order();
    }
    let decode = |x: usize| -> Vec<usize> { groups.iter().zip(&strides).map(|(g, &s)| (x / s) % g.order()).collect() };
    let rows: Vec<Vec<usize>> = (0..order)
        .map(|x| {
            let xs = decode(x);
            (0..order)
                .map(|y| {
                    let ys = decode(y);
                    groups.iter().zip(&strides).enumerate().map(|(i, (g, &s))| g.mul(xs[i], ys[i]) * s).sum()
                })
                .collect()
        })
        .collect();
    let name = groups.iter().map(|g| g.name()).collect::<Vec<_>>().join(" x ");
    let product = Arc::new(FiniteGroup::from_valid_rows(name, &rows));
    let inclusions = groups
        .iter()
        .zip(&strides)
        .map(|(g, &s)| Monomorphism {
            source: g.clone(),
            target: product.clone(),
            image: g.elements().map(|a| a * s).collect(),
        })
        .collect();
    Ok((product, inclusions))
}

/// The dihedral group of order `2m` with the inclusions of the two standard
/// reflection subgroups.
///
/// Element `f*m + k` stands for `rho^k sigma^f` (rotation `rho`, reflection
/// `sigma`); the reflections are `sigma` and `rho sigma`.
pub fn dihedral(m: usize) -> Result<(Arc<FiniteGroup>, Monomorphism, Monomorphism), GroupError> {
    if m < 2 {
        return Err(GroupError::DihedralParameter(m));
    }
    let order = 2 * m;
    let cap = max_group_order();
    if order > cap {
        return Err(GroupError::OrderCap { order, cap });
    }
    let rows: Vec<Vec<usize>> = (0..order)
        .map(|x| {
            let (k1, f1) = (x % m, x / m);
            (0..order)
                .map(|y| {
                    let (k2, f2) = (y % m, y / m);
                    let k = if f1 == 0 { k1 + k2 } else { k1 + m - k2 } % m;
                    ((f1 + f2) % 2) * m + k
                })
                .collect()
        })
        .collect();
    let group = Arc::new(FiniteGroup::from_valid_rows(format!("D{m}"), &rows));
    let z2 = Arc::new(FiniteGroup::cyclic(2)?);
    let first = Monomorphism::new(z2.clone(), group.clone(), vec![0, m])?;
    let second = Monomorphism::new(z2, group.clone(), vec![0, m + 1])?;
    Ok((group, first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(n: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(n).unwrap())
    }

    fn table(rows: Vec<Vec<usize>>) -> GroupTable {
        GroupTable { name: "t".into(), order: rows.len(), table: rows }
    }

    #[test]
    fn test_z2_is_valid() {
        assert!(validate_group(&table(vec![vec![0, 1], vec![1, 0]])).unwrap().is_valid());
    }

    #[test]
    fn test_repeated_column_is_invalid() {
        let r = validate_group(&table(vec![vec![0, 1], vec![0, 1]])).unwrap();
        assert!(r.violations.contains(&AxiomViolation::ColumnNotPermutation { column: 0 }));
        assert!(!r.is_valid());
    }

    #[test]
    fn test_klein_four_valid_by_exhaustion() {
        // component-wise XOR on two bits, all 64 triples checked independently
        let rows: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        let mut triples = 0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    assert_eq!(rows[rows[a][b]][c], rows[a][rows[b][c]]);
                    triples += 1;
                }
            }
        }
        assert_eq!(triples, 64);
        assert!(validate_group(&table(rows)).unwrap().is_valid());
    }

    #[test]
    fn test_structural_errors_are_not_axiom_failures() {
        let bad = GroupTable { name: "x".into(), order: 3, table: vec![vec![0, 1], vec![1, 0]] };
        assert_eq!(validate_group(&bad), Err(GroupError::RowCount { order: 3, rows: 2 }));
        let bad = table(vec![vec![0, 5], vec![1, 0]]);
        assert!(matches!(validate_group(&bad), Err(GroupError::EntryOutOfRange { .. })));
    }

    #[test]
    fn test_associativity_failure_reported() {
        // Latin square with identity 0 that is not associative (order 5 loop)
        let rows = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let r = validate_group(&table(rows)).unwrap();
        assert!(r.violations.iter().any(|v| matches!(v, AxiomViolation::Associativity { .. })));
    }

    #[test]
    fn test_product_of_two_z2_is_klein() {
        let (g, incl) = direct_product(&[z(2), z(2)]).unwrap();
        assert_eq!(*g, FiniteGroup::klein_four());
        assert_eq!(incl.len(), 2);
    }

    #[test]
    fn test_unary_product() {
        let (g, incl) = direct_product(&[z(2)]).unwrap();
        assert_eq!(*g, *z(2));
        assert_eq!(incl[0].image(), &[0, 1]);
    }

    #[test]
    fn test_product_z2_z3_encoding() {
        let (g, incl) = direct_product(&[z(2), z(3)]).unwrap();
        assert_eq!(g.order(), 6);
        // oracle: tuple (a, b) -> 3a + b
        let enc = |a: usize, b: usize| 3 * a + b;
        let first: BTreeSet<usize> = (0..2).map(|a| enc(a, 0)).collect();
        let second: BTreeSet<usize> = (0..3).map(|b| enc(0, b)).collect();
        assert_eq!(first, BTreeSet::from([0, 3]));
        assert_eq!(second, BTreeSet::from([0, 1, 2]));
        assert_eq!(incl[0].image_set(), first);
        assert_eq!(incl[1].image_set(), second);
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    for d in 0..3 {
                        assert_eq!(g.mul(enc(a, b), enc(c, d)), enc((a + c) % 2, (b + d) % 3));
                    }
                }
            }
        }
    }

    #[test]
    fn test_product_respects_cap() {
        let big: Vec<_> = (0..9).map(|_| z(2)).collect();
        assert!(matches!(direct_product(&big), Err(GroupError::OrderCap { .. })));
    }

    #[test]
    fn test_dihedral_small_cases() {
        let (g, r, s) = dihedral(2).unwrap();
        assert_eq!(g.order(), 4);
        assert_ne!(r.image_set(), s.image_set());
        assert!(g.elements().all(|x| g.mul(x, x) == 0));
        assert!(matches!(dihedral(1), Err(GroupError::DihedralParameter(1))));
        assert!(matches!(dihedral(0), Err(GroupError::DihedralParameter(0))));
    }

    #[test]
    fn test_dihedral_reflections_meet_trivially() {
        for m in [3usize, 7] {
            let (g, r, s) = dihedral(m).unwrap();
            assert_eq!(g.order(), 2 * m);
            assert_eq!(subgroup_intersection(&r, &s).unwrap(), BTreeSet::from([0]));
            // the product of the two reflections is a rotation of order m
            assert_eq!(g.element_order(g.mul(r.apply(1), s.apply(1))), m);
            let t = g.to_table();
            assert!(validate_group(&t).unwrap().is_valid());
        }
    }

    #[test]
    fn test_intersection_cases() {
        let (_, incl) = direct_product(&[z(2), z(2)]).unwrap();
        assert_eq!(subgroup_intersection(&incl[0], &incl[1]).unwrap(), BTreeSet::from([0]));
        assert_eq!(subgroup_intersection(&incl[0], &incl[0]).unwrap(), incl[0].image_set());
        let other = Monomorphism::identity(z(2));
        assert_eq!(subgroup_intersection(&incl[0], &other), Err(GroupError::TargetMismatch));
    }

    #[test]
    fn test_klein_products_of_distinct_nontrivial() {
        let k = FiniteGroup::klein_four();
        let mut pairs = 0;
        for a in 1..4 {
            for b in 1..4 {
                if a != b {
                    let third = 6 - a - b;
                    assert_eq!(k.mul(a, b), third);
                    pairs += 1;
                }
            }
        }
        assert_eq!(pairs, 6);
    }

    #[test]
    fn test_monomorphism_violations() {
        let z4 = z(4);
        let z2 = z(2);
        assert!(Monomorphism::new(z2.clone(), z4.clone(), vec![0, 2]).unwrap().is_proper());
        let e = Monomorphism::new(z2.clone(), z4.clone(), vec![0, 1]).unwrap_err();
        assert_eq!(e, GroupError::Monomorphism(MonoViolation::NotHomomorphism { a: 1, b: 1 }));
        let e = Monomorphism::new(z2.clone(), z4.clone(), vec![1, 0]).unwrap_err();
        assert_eq!(e, GroupError::Monomorphism(MonoViolation::IdentityNotFixed { value: 1 }));
        let e = Monomorphism::new(z4, z2, vec![0, 1, 0, 1]).unwrap_err();
        assert!(matches!(
            e,
            GroupError::Monomorphism(MonoViolation::OutOfRange { .. })
                | GroupError::Monomorphism(MonoViolation::NotInjective { .. })
        ));
        assert!(!Monomorphism::identity(z(3)).is_proper());
    }

    #[test]
    fn test_json_round_trip_recomputes_inverses() {
        let g = FiniteGroup::cyclic(5).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"table\""));
        let back: FiniteGroup = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.inv(2), 3);
    }

    fn arb_cyclic_list() -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(1usize..6, 1..4)
    }

    proptest! {
        #[test]
        fn prop_products_are_groups_with_trivially_meeting_factors(orders in arb_cyclic_list()) {
            let gs: Vec<_> = orders.iter().map(|&n| z(n)).collect();
            let (g, incl) = direct_product(&gs).unwrap();
            prop_assert_eq!(g.order(), orders.iter().product::<usize>());
            prop_assert!(validate_group(&g.to_table()).unwrap().is_valid());
            for i in 0..incl.len() {
                for j in 0..incl.len() {
                    if i != j {
                        prop_assert_eq!(
                            subgroup_intersection(&incl[i], &incl[j]).unwrap(),
                            BTreeSet::from([0])
                        );
                    }
                }
            }
        }

        #[test]
        fn prop_composition_is_associative(a in 1usize..4, b in 1usize..3, c in 1usize..3) {
            // Z/a -> Z/a x Z/b -> Z/a x Z/b x Z/c -> (Z/a x Z/b x Z/c) x Z/2
            let (ab, i1) = direct_product(&[z(a), z(b)]).unwrap();
            let (abc, i2) = direct_product(&[ab.clone(), z(c)]).unwrap();
            let (abcd, i3) = direct_product(&[abc.clone(), z(2)]).unwrap();
            let left = i1[0].then(&i2[0]).unwrap().then(&i3[0]).unwrap();
            let right = i1[0].then(&i2[0].then(&i3[0]).unwrap()).unwrap();
            prop_assert_eq!(&left, &right);
            let img = left.image().to_vec();
            prop_assert!(check_monomorphism(&z(a), &abcd, &img).is_ok());
        }

        #[test]
        fn prop_dihedral_is_group(m in 2usize..12) {
            let (g, r, s) = dihedral(m).unwrap();
            prop_assert!(validate_group(&g.to_table()).unwrap().is_valid());
            prop_assert!(r.is_proper() && s.is_proper());
        }
    }
}
