//! Basic combinatorial objects and the arithmetic that governs when they can
//! exist.
//!
//! A *grouped design* lives on points `0..g*u` partitioned into `u` groups of
//! size `g` (point `p` belongs to group `p / g`).  Its blocks are triples that
//! meet every group at most once, and every pair of points from different
//! groups lies in exactly `lambda` blocks.  A *large set* is a collection of
//! such designs whose block sets together use every transverse triple exactly
//! once.
//!
//! The holed variants live on a point set `S` together with two extra points
//! `inf1` and `inf2`; blocks are classified by how many of the two extra
//! points they contain, and block sizes may exceed three.  The *good* variant
//! carries one arc set per member that records an orientation of the
//! one-infinity blocks.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Point label inside a single design.
pub type Point = u16;

/// Arc set attached to one member of a good holed large set.
pub type Digraph = BTreeSet<(Point, Point)>;

/// Largest point count the planner will materialise in one run.
pub const MAX_POINTS: usize = 120;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoreError {
    #[error("block has a repeated point: {0}")]
    RepeatedPoint(Point),
    #[error("block needs at least 3 points, got {0}")]
    BlockTooSmall(usize),
    #[error("quasigroup order must be odd and positive, got {0}")]
    BadQuasigroupOrder(usize),
}

/// A block: a strictly increasing list of at least three points.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block(Vec<Point>);

impl Block {
    /// Sorts the points and rejects duplicates and undersized blocks.
    pub fn new(mut points: Vec<Point>) -> Result<Self, CoreError> {
        if points.len() < 3 {
            return Err(CoreError::BlockTooSmall(points.len()));
        }
        points.sort_unstable();
        for w in points.windows(2) {
            if w[0] == w[1] {
                return Err(CoreError::RepeatedPoint(w[0]));
            }
        }
        Ok(Block(points))
    }

    /// Convenience constructor for a triple.
    pub fn triple(a: Point, b: Point, c: Point) -> Result<Self, CoreError> {
        Block::new(vec![a, b, c])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: Point) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.0.iter()
    }

    /// Applies a point relabelling and re-normalises.
    pub fn map(&self, f: impl Fn(Point) -> Point) -> Result<Self, CoreError> {
        Block::new(self.0.iter().map(|&p| f(p)).collect())
    }
}

impl<'a> IntoIterator for &'a Block {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A multiset of blocks with explicit multiplicities, ordered for stable
/// iteration and serialisation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockMultiset {
    map: BTreeMap<Block, u32>,
}

impl BlockMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, block: Block, mult: u32) {
        if mult == 0 {
            return;
        }
        *self.map.entry(block).or_insert(0) += mult;
    }

    /// Removes `mult` copies; panics if fewer are present (construction bug).
    pub fn remove(&mut self, block: &Block, mult: u32) {
        let cur = self.map.get_mut(block).unwrap_or_else(|| {
            panic!("removing {:?} which is not present", block.points())
        });
        assert!(*cur >= mult, "removing more copies than present");
        *cur -= mult;
        if *cur == 0 {
            self.map.remove(block);
        }
    }

    pub fn multiplicity(&self, block: &Block) -> u32 {
        self.map.get(block).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &BlockMultiset) {
        for (b, &m) in other.iter() {
            self.add(b.clone(), m);
        }
    }

    /// Number of distinct blocks.
    pub fn distinct_len(&self) -> usize {
        self.map.len()
    }

    /// Number of blocks counted with multiplicity.
    pub fn total(&self) -> usize {
        self.map.values().map(|&m| m as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Block, &u32)> {
        self.map.iter()
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.map.keys()
    }
}

impl FromIterator<(Block, u32)> for BlockMultiset {
    fn from_iter<T: IntoIterator<Item = (Block, u32)>>(iter: T) -> Self {
        let mut ms = BlockMultiset::new();
        for (b, m) in iter {
            ms.add(b, m);
        }
        ms
    }
}

/// Parameter triple shared by grouped designs and their large sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DesignParams {
    pub lambda: usize,
    pub g: usize,
    pub u: usize,
}

impl DesignParams {
    pub fn new(lambda: usize, g: usize, u: usize) -> Self {
        DesignParams { lambda, g, u }
    }

    pub fn point_count(&self) -> usize {
        self.g * self.u
    }
}

/// A triple-block grouped design on points `0..g*u`, groups of size `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedDesign {
    pub g: usize,
    pub u: usize,
    pub blocks: BlockMultiset,
}

impl GroupedDesign {
    pub fn point_count(&self) -> usize {
        self.g * self.u
    }

    pub fn group_of(&self, p: Point) -> usize {
        p as usize / self.g
    }
}

/// A large set of grouped designs: members share the same groups and their
/// blocks together use every transverse triple exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargeSet {
    pub lambda: usize,
    pub g: usize,
    pub u: usize,
    pub members: Vec<BlockMultiset>,
}

impl LargeSet {
    pub fn point_count(&self) -> usize {
        self.g * self.u
    }

    pub fn member_design(&self, r: usize) -> GroupedDesign {
        GroupedDesign {
            g: self.g,
            u: self.u,
            blocks: self.members[r].clone(),
        }
    }
}

/// Allowed block sizes, classified by how many of the two extra points a
/// block contains.  Size class 1 (exactly one extra point) is always `{3}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleProfile {
    pub lambda: usize,
    pub k0: BTreeSet<usize>,
    pub k2: BTreeSet<usize>,
}

impl HoleProfile {
    pub fn new(lambda: usize, k0: &[usize], k2: &[usize]) -> Self {
        HoleProfile {
            lambda,
            k0: k0.iter().copied().collect(),
            k2: k2.iter().copied().collect(),
        }
    }

    pub fn k1(&self) -> BTreeSet<usize> {
        [3].into_iter().collect()
    }
}

/// A large set on `s_size + 2` points in which the two largest points play a
/// special role: every triple of the full point set is covered exactly once
/// by the distinct blocks of all members together, every pair is covered
/// `lambda` times inside each member, and every distinct block of size `k`
/// appears exactly `k - 2` times in the multiset union of all members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoledLargeSet {
    pub s_size: usize,
    pub profile: HoleProfile,
    pub members: Vec<BlockMultiset>,
}

impl HoledLargeSet {
    pub fn v(&self) -> usize {
        self.s_size + 2
    }

    pub fn inf1(&self) -> Point {
        self.s_size as Point
    }

    pub fn inf2(&self) -> Point {
        (self.s_size + 1) as Point
    }

    pub fn expected_members(&self) -> usize {
        self.s_size / self.profile.lambda
    }
}

/// A holed large set whose members each carry an arc set on the non-extra
/// points, orienting the blocks that contain exactly one extra point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodLargeSet {
    pub ls: HoledLargeSet,
    pub digraphs: Vec<Digraph>,
}

/// A large set on `v` points with no distinguished extra points: every pair
/// is covered `lambda` times per member, every triple once by distinct
/// blocks, and every distinct block of size `k` appears `k - 2` times in the
/// multiset union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatLargeSet {
    pub v: usize,
    pub lambda: usize,
    pub members: Vec<BlockMultiset>,
}

/// An idempotent commutative quasigroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quasigroup {
    pub order: usize,
    table: Vec<Vec<u16>>,
}

impl Quasigroup {
    /// The standard idempotent commutative quasigroup of odd order `w`:
    /// `a * b = (w + 1) / 2 * (a + b) mod w`.
    pub fn idempotent_commutative(w: usize) -> Result<Self, CoreError> {
        if w == 0 || w % 2 == 0 {
            return Err(CoreError::BadQuasigroupOrder(w));
        }
        let h = (w + 1) / 2;
        let table = (0..w)
            .map(|a| (0..w).map(|b| ((h * (a + b)) % w) as u16).collect())
            .collect();
        Ok(Quasigroup { order: w, table })
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b] as usize
    }
}

/// One member of an `LrDesign`: a resolvable triple system split into
/// parallel classes, the first of which is the distinguished one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrMember {
    pub classes: Vec<Vec<Block>>,
}

impl LrMember {
    pub fn distinguished(&self) -> &[Block] {
        &self.classes[0]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.classes.iter().flatten()
    }
}

/// A pair-indexed family of `v - 1` resolvable triple systems on `v` points
/// (member `2k + j` is the `j`-th system of pair `k`) whose distinguished
/// classes on each side together form one common triple system, and whose
/// members together cover every triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrDesign {
    pub v: usize,
    pub members: Vec<LrMember>,
}

impl LrDesign {
    pub fn pair_count(&self) -> usize {
        (self.v - 1) / 2
    }

    pub fn member(&self, k: usize, j: usize) -> &LrMember {
        &self.members[2 * k + j]
    }
}

/// A partition of all transverse triples of a `g^u` group structure into
/// `g*u` classes, one per point, where the class of point `p` is a
/// triple-block grouped design of index one on the points outside `p`'s
/// group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub g: usize,
    pub u: usize,
    pub classes: Vec<Vec<Block>>,
}

impl Frame {
    pub fn point_count(&self) -> usize {
        self.g * self.u
    }
}

/// A triple system together with a quadruple set so that the triples cover
/// every pair exactly once and triples plus quadruples cover every triple of
/// the point set exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanDesign {
    pub v: usize,
    pub triples: Vec<Block>,
    pub quads: Vec<Block>,
}

/// Existence check outcome with one line per violated condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub failures: Vec<String>,
}

impl AdmissibilityReport {
    fn from_failures(failures: Vec<String>) -> Self {
        AdmissibilityReport {
            admissible: failures.is_empty(),
            failures,
        }
    }
}

/// Conditions for a simple grouped design with block size three to exist:
/// `u >= 3`, `1 <= lambda <= g*(u-2)`, `lambda*g*(u-1)` even and
/// `lambda*g^2*u*(u-1)` divisible by six.
pub fn admissible_simple_gdd(lambda: usize, g: usize, u: usize) -> AdmissibilityReport {
    let mut failures = Vec::new();
    if g < 1 {
        failures.push(format!("g = {g} must be at least 1"));
        return AdmissibilityReport::from_failures(failures);
    }
    if u < 3 {
        failures.push(format!("u = {u} must be at least 3"));
    }
    if lambda < 1 {
        failures.push(format!("lambda = {lambda} must be at least 1"));
    }
    if u >= 3 && lambda > g * (u - 2) {
        failures.push(format!(
            "lambda = {lambda} exceeds g*(u-2) = {}, so distinct blocks cannot cover a pair often enough",
            g * (u - 2)
        ));
    }
    if lambda * g * (u.max(1) - 1) % 2 != 0 {
        failures.push(format!(
            "lambda*g*(u-1) = {} is odd",
            lambda * g * (u - 1)
        ));
    }
    if u >= 1 && lambda * g * g * u * (u - 1) % 6 != 0 {
        failures.push(format!(
            "lambda*g^2*u*(u-1) = {} is not divisible by 6",
            lambda * g * g * u * (u - 1)
        ));
    }
    AdmissibilityReport::from_failures(failures)
}

/// Conditions for a large set of grouped designs to exist: the simple-design
/// conditions, `g*(u-2)` divisible by `lambda` (the member count), and the
/// one genuine exception `(lambda, g, u) = (1, 1, 7)`.
pub fn admissible_lgdd(lambda: usize, g: usize, u: usize) -> AdmissibilityReport {
    let mut report = admissible_simple_gdd(lambda, g, u);
    if lambda >= 1 && u >= 3 && g * (u - 2) % lambda != 0 {
        report.failures.push(format!(
            "g*(u-2) = {} is not divisible by lambda = {lambda}",
            g * (u - 2)
        ));
    }
    if (lambda, g, u) == (1, 1, 7) {
        report
            .failures
            .push("(lambda, g, u) = (1, 1, 7) is the known exception".to_string());
    }
    report.admissible = report.failures.is_empty();
    report
}

/// Member and per-member block counts of a large set with the given
/// parameters, when both are integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LargeSetCounts {
    pub members: usize,
    pub blocks_per_member: usize,
}

pub fn large_set_counts(lambda: usize, g: usize, u: usize) -> Option<LargeSetCounts> {
    if lambda == 0 || u < 3 {
        return None;
    }
    let m = g * (u - 2);
    let b = lambda * g * g * u * (u - 1);
    if m % lambda != 0 || b % 6 != 0 {
        return None;
    }
    Some(LargeSetCounts {
        members: m / lambda,
        blocks_per_member: b / 6,
    })
}

/// Number of triples meeting three distinct groups: `g^3 * C(u, 3)`.
pub fn transverse_triple_count(g: usize, u: usize) -> usize {
    if u < 3 {
        return 0;
    }
    g * g * g * (u * (u - 1) * (u - 2) / 6)
}

/// All transverse triples of the `g^u` group structure, in
/// lexicographic order.
pub fn all_transverse_triples(g: usize, u: usize) -> Vec<Block> {
    let n = g * u;
    let mut out = Vec::with_capacity(transverse_triple_count(g, u));
    for a in 0..n {
        for b in (a + 1)..n {
            if b / g == a / g {
                continue;
            }
            for c in (b + 1)..n {
                if c / g == a / g || c / g == b / g {
                    continue;
                }
                out.push(
                    Block::new(vec![a as Point, b as Point, c as Point])
                        .expect("distinct ascending points"),
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn block_normalises_order() {
        let b = Block::new(vec![5, 1, 3]).unwrap();
        assert_eq!(b.points(), &[1, 3, 5]);
    }

    #[test]
    fn block_rejects_duplicates_and_small_sizes() {
        assert_eq!(
            Block::new(vec![1, 2, 2]),
            Err(CoreError::RepeatedPoint(2))
        );
        assert_eq!(Block::new(vec![1, 2]), Err(CoreError::BlockTooSmall(2)));
    }

    #[test]
    fn multiset_tracks_multiplicities() {
        let mut ms = BlockMultiset::new();
        let b = Block::triple(0, 1, 2).unwrap();
        ms.add(b.clone(), 2);
        ms.add(b.clone(), 1);
        assert_eq!(ms.multiplicity(&b), 3);
        assert_eq!(ms.total(), 3);
        assert_eq!(ms.distinct_len(), 1);
        ms.remove(&b, 3);
        assert_eq!(ms.total(), 0);
    }

    #[test]
    fn counts_for_three_cubed_eight() {
        let c = large_set_counts(2, 3, 8).unwrap();
        assert_eq!(c.members, 9);
        assert_eq!(c.blocks_per_member, 168);
        assert_eq!(transverse_triple_count(3, 8), 9 * 168);
    }

    #[test]
    fn counts_for_singleton_groups() {
        let c = large_set_counts(1, 1, 9).unwrap();
        assert_eq!(c.members, 7);
        assert_eq!(c.blocks_per_member, 12);
    }

    #[test]
    fn inadmissible_when_block_count_fractional() {
        let report = admissible_lgdd(2, 2, 5);
        assert!(!report.admissible);
        assert!(report
            .failures
            .iter()
            .any(|f| f.contains("not divisible by 6")));
    }

    #[test]
    fn the_exceptional_parameters_are_rejected() {
        assert!(!admissible_lgdd(1, 1, 7).admissible);
        assert!(admissible_lgdd(5, 1, 7).admissible);
        assert!(admissible_lgdd(1, 2, 7).admissible);
    }

    #[test]
    fn simplicity_bound_is_enforced() {
        let report = admissible_simple_gdd(7, 1, 8);
        assert!(!report.admissible);
        assert!(report.failures.iter().any(|f| f.contains("exceeds")));
        assert!(admissible_simple_gdd(6, 1, 8).admissible);
    }

    #[test]
    fn quasigroup_is_idempotent_commutative_latin() {
        for w in [1usize, 3, 5, 7, 9, 11] {
            let q = Quasigroup::idempotent_commutative(w).unwrap();
            for a in 0..w {
                assert_eq!(q.mul(a, a), a);
                let mut row: Vec<usize> = (0..w).map(|b| q.mul(a, b)).collect();
                row.sort_unstable();
                assert_eq!(row, (0..w).collect::<Vec<_>>());
                for b in 0..w {
                    assert_eq!(q.mul(a, b), q.mul(b, a));
                }
            }
        }
        assert!(Quasigroup::idempotent_commutative(4).is_err());
    }

    #[test]
    fn transverse_triples_respect_groups() {
        let ts = all_transverse_triples(2, 4);
        assert_eq!(ts.len(), transverse_triple_count(2, 4));
        for t in &ts {
            let gs: BTreeSet<usize> = t.iter().map(|&p| p as usize / 2).collect();
            assert_eq!(gs.len(), 3);
        }
    }

    proptest! {
        #[test]
        fn block_construction_is_idempotent(mut pts in proptest::collection::vec(0u16..60, 3..6)) {
            pts.sort_unstable();
            pts.dedup();
            prop_assume!(pts.len() >= 3);
            let b1 = Block::new(pts.clone()).unwrap();
            let b2 = Block::new(b1.points().to_vec()).unwrap();
            prop_assert_eq!(b1, b2);
        }

        #[test]
        fn large_set_existence_implies_design_existence(
            lambda in 1usize..14, g in 1usize..7, u in 3usize..13
        ) {
            if admissible_lgdd(lambda, g, u).admissible {
                prop_assert!(admissible_simple_gdd(lambda, g, u).admissible);
                let c = large_set_counts(lambda, g, u).unwrap();
                prop_assert_eq!(c.members * c.blocks_per_member,
                                transverse_triple_count(g, u));
            }
        }
    }
}
