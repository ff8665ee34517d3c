//! Deterministic backtracking searches for the small designs the planner
//! cannot assemble from catalogue material, plus a certificate store that
//! caches and re-verifies previously found designs.
//!
//! The engine branches on the lexicographically first pair that still needs
//! coverage and tries candidate blocks in sorted order (or in a seeded
//! shuffle of it), with two symmetry cuts: the very first block of the first
//! member is pinned to the lexicographically smallest transverse triple, and
//! successive members must start with strictly increasing third points on
//! the first pair.  Both cuts are relabelling-sound, so an exhausted search
//! is a nonexistence proof for the encoded family.

use crate::core::{
    admissible_simple_gdd, Block, BlockMultiset, Frame, GroupedDesign, LargeSet, LrDesign,
    LrMember, Point, MAX_POINTS,
};
use crate::document::{
    frame_document, gdd_document, large_set_document, lr_document, DesignDocument, DocumentBody,
};
use crate::verifier::{verify_frame, verify_gdd, verify_large_set, verify_lr, VerifyOpts};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

/// The splittable pseudo-random stream used for candidate shuffling (and by
/// callers that need reproducible perturbations).  Seed zero conventionally
/// means "no shuffling" throughout this crate.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n.max(1)
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}

/// What to search for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchKind {
    /// A large set of triple-block grouped designs with these parameters.
    Lgdd { lambda: usize, g: usize, u: usize },
    /// A single simple triple-block grouped design.
    SimpleGdd { lambda: usize, g: usize, u: usize },
    /// A point-indexed partition into grouped designs of index one.
    Frame { g: usize, u: usize },
    /// A pair-indexed family of resolvable triple systems.
    Lr { v: usize },
}

/// A large set of triple systems on `v` points, encoded over singleton
/// groups.
pub fn ls_plain(v: usize, lambda: usize) -> SearchKind {
    SearchKind::Lgdd { lambda, g: 1, u: v }
}

impl SearchKind {
    /// Stable name used for certificate files.
    pub fn name(&self) -> String {
        match self {
            SearchKind::Lgdd { lambda, g, u } => format!("lgdd-l{lambda}-g{g}-u{u}"),
            SearchKind::SimpleGdd { lambda, g, u } => format!("gdd-l{lambda}-g{g}-u{u}"),
            SearchKind::Frame { g, u } => format!("frame-g{g}-u{u}"),
            SearchKind::Lr { v } => format!("lr-v{v}"),
        }
    }
}

/// Node and wall-clock limits for one search call.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub seed: u64,
    pub max_nodes: u64,
    pub time_limit: Duration,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 0,
            max_nodes: 100_000_000,
            time_limit: Duration::from_secs(600),
        }
    }
}

/// A found design, in the shape its kind promises.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    LargeSet(LargeSet),
    Gdd { design: GroupedDesign, lambda: usize },
    Frame(Frame),
    Lr(LrDesign),
}

impl Artifact {
    pub fn document(&self) -> DesignDocument {
        match self {
            Artifact::LargeSet(ls) => large_set_document(ls),
            Artifact::Gdd { design, lambda } => gdd_document(design, *lambda, true),
            Artifact::Frame(f) => frame_document(f),
            Artifact::Lr(lr) => lr_document(lr),
        }
    }

    pub fn from_document(doc: &DesignDocument) -> Option<Artifact> {
        match &doc.body {
            DocumentBody::LargeSet(ls) => Some(Artifact::LargeSet(ls.clone())),
            DocumentBody::Gdd { design, lambda, .. } => Some(Artifact::Gdd {
                design: design.clone(),
                lambda: *lambda,
            }),
            DocumentBody::Frame(f) => Some(Artifact::Frame(f.clone())),
            DocumentBody::Lr(lr) => Some(Artifact::Lr(lr.clone())),
            _ => None,
        }
    }

    fn matches(&self, kind: &SearchKind) -> bool {
        match (self, kind) {
            (Artifact::LargeSet(ls), SearchKind::Lgdd { lambda, g, u }) => {
                ls.lambda == *lambda && ls.g == *g && ls.u == *u
            }
            (Artifact::Gdd { design, lambda }, SearchKind::SimpleGdd { lambda: l, g, u }) => {
                lambda == l && design.g == *g && design.u == *u
            }
            (Artifact::Frame(f), SearchKind::Frame { g, u }) => f.g == *g && f.u == *u,
            (Artifact::Lr(lr), SearchKind::Lr { v }) => lr.v == *v,
            _ => false,
        }
    }

    /// Runs the matching independent checker and reports a clean result.
    pub fn verified(&self) -> bool {
        let opts = VerifyOpts::default();
        match self {
            Artifact::LargeSet(ls) => verify_large_set(ls, &opts).ok(),
            Artifact::Gdd { design, lambda } => verify_gdd(design, *lambda, true, &opts).ok(),
            Artifact::Frame(f) => verify_frame(f, &opts).ok(),
            Artifact::Lr(lr) => verify_lr(lr, &opts).ok(),
        }
    }
}

/// The three ways a search call can end.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found { artifact: Artifact, nodes: u64 },
    /// The whole (symmetry-reduced) space was explored without a hit: the
    /// design does not exist.
    Exhausted { nodes: u64 },
    /// Node or time budget ran out first.
    OutOfBudget { nodes: u64 },
    /// The parameters fall outside what this engine encodes.
    Unsupported(String),
}

struct Ctx {
    nodes: u64,
    max_nodes: u64,
    deadline: Instant,
    rng: Option<SplitMix64>,
    stopped: bool,
}

impl Ctx {
    fn new(cfg: &SearchConfig) -> Self {
        Ctx {
            nodes: 0,
            max_nodes: cfg.max_nodes,
            deadline: Instant::now() + cfg.time_limit,
            rng: (cfg.seed != 0).then(|| SplitMix64::new(cfg.seed)),
            stopped: false,
        }
    }

    /// Counts one placement; false once the budget is gone.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes >= self.max_nodes
            || (self.nodes % 4096 == 0 && Instant::now() >= self.deadline)
        {
            self.stopped = true;
        }
        !self.stopped
    }

    fn order(&mut self, cands: &mut [u32]) {
        if let Some(rng) = &mut self.rng {
            rng.shuffle(cands);
        }
    }
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum Step {
    Done,
    Fail,
    Stop,
}

/// Shared state for large-set and single-design searches over transverse
/// triples.
struct GddSearch {
    g: usize,
    v: usize,
    lambda: u8,
    n_members: usize,
    partition: bool,
    triples: Vec<[Point; 3]>,
    tri_pairs: Vec<[u32; 3]>,
    by_pair: Vec<Vec<u32>>,
    used: Vec<bool>,
    in_member: Vec<bool>,
    cover: Vec<u8>,
    members: Vec<Vec<u32>>,
    current: Vec<u32>,
    first_z: Vec<Point>,
    solution: Option<Vec<Vec<u32>>>,
}

impl GddSearch {
    fn new(g: usize, u: usize, lambda: usize, n_members: usize, partition: bool) -> Self {
        let v = g * u;
        let mut triples = Vec::new();
        for a in 0..v as Point {
            for b in (a + 1)..v as Point {
                if b as usize / g == a as usize / g {
                    continue;
                }
                for c in (b + 1)..v as Point {
                    if c as usize / g == a as usize / g || c as usize / g == b as usize / g {
                        continue;
                    }
                    triples.push([a, b, c]);
                }
            }
        }
        let pid = |x: Point, y: Point| x as usize * v + y as usize;
        let mut by_pair = vec![Vec::new(); v * v];
        let mut tri_pairs = Vec::with_capacity(triples.len());
        for (t, tri) in triples.iter().enumerate() {
            let ps = [
                pid(tri[0], tri[1]),
                pid(tri[0], tri[2]),
                pid(tri[1], tri[2]),
            ];
            for &p in &ps {
                by_pair[p].push(t as u32);
            }
            tri_pairs.push(ps.map(|p| p as u32));
        }
        GddSearch {
            g,
            v,
            lambda: lambda as u8,
            n_members,
            partition,
            used: vec![false; triples.len()],
            in_member: vec![false; triples.len()],
            cover: vec![0; v * v],
            members: Vec::new(),
            current: Vec::new(),
            first_z: Vec::new(),
            solution: None,
            triples,
            tri_pairs,
            by_pair,
        }
    }

    fn candidate_ok(&self, t: u32) -> bool {
        let ti = t as usize;
        if self.in_member[ti] || (self.partition && self.used[ti]) {
            return false;
        }
        self.tri_pairs[ti]
            .iter()
            .all(|&p| self.cover[p as usize] < self.lambda)
    }

    /// Fail-first branching: the open pair with the fewest usable blocks.
    /// Members always open on the first pair, which keeps the symmetry cuts
    /// on the opening block sound.
    fn branch_pair(&self) -> Option<usize> {
        if self.current.is_empty() {
            return Some(self.g);
        }
        let mut best: Option<(usize, usize)> = None;
        for x in 0..self.v {
            for y in (x + 1)..self.v {
                if y / self.g == x / self.g {
                    continue;
                }
                let p = x * self.v + y;
                if self.cover[p] >= self.lambda {
                    continue;
                }
                let count = self.by_pair[p]
                    .iter()
                    .filter(|&&t| self.candidate_ok(t))
                    .count();
                if count == 0 {
                    return Some(p);
                }
                if best.map_or(true, |(_, c)| count < c) {
                    best = Some((p, count));
                    if count == 1 {
                        return Some(p);
                    }
                }
            }
        }
        best.map(|(p, _)| p)
    }

    fn place(&mut self, t: u32) {
        for &p in &self.tri_pairs[t as usize] {
            self.cover[p as usize] += 1;
        }
        self.in_member[t as usize] = true;
        if self.partition {
            self.used[t as usize] = true;
        }
        if self.current.is_empty() {
            let tri = self.triples[t as usize];
            self.first_z.push(tri[2]);
        }
        self.current.push(t);
    }

    fn unplace(&mut self) {
        let t = self.current.pop().expect("unplace with empty member");
        for &p in &self.tri_pairs[t as usize] {
            self.cover[p as usize] -= 1;
        }
        self.in_member[t as usize] = false;
        if self.partition {
            self.used[t as usize] = false;
        }
        if self.current.is_empty() {
            self.first_z.pop();
        }
    }

    fn set_all_transverse(&mut self, value: u8) {
        for x in 0..self.v {
            for y in (x + 1)..self.v {
                if y / self.g != x / self.g {
                    self.cover[x * self.v + y] = value;
                }
            }
        }
    }

    fn extend(&mut self, ctx: &mut Ctx) -> Step {
        let Some(pid) = self.branch_pair() else {
            if self.members.len() + 1 == self.n_members {
                let mut all = self.members.clone();
                all.push(self.current.clone());
                self.solution = Some(all);
                return Step::Done;
            }
            let frozen = std::mem::take(&mut self.current);
            for &t in &frozen {
                self.in_member[t as usize] = false;
            }
            self.members.push(frozen);
            self.set_all_transverse(0);
            let step = self.extend(ctx);
            let frozen = self.members.pop().expect("member stack underflow");
            for &t in &frozen {
                self.in_member[t as usize] = true;
            }
            self.current = frozen;
            self.set_all_transverse(self.lambda);
            return step;
        };
        let (x, y) = ((pid / self.v) as Point, (pid % self.v) as Point);
        let first_of_member = self.current.is_empty();
        let z_floor: Option<Point> = if first_of_member {
            if self.members.is_empty() {
                None
            } else {
                Some(self.first_z[self.members.len() - 1])
            }
        } else {
            None
        };
        let mut cands: Vec<u32> = Vec::new();
        for &t in &self.by_pair[pid] {
            if !self.candidate_ok(t) {
                continue;
            }
            if first_of_member {
                let tri = self.triples[t as usize];
                let z = tri[0] as usize + tri[1] as usize + tri[2] as usize
                    - x as usize
                    - y as usize;
                match z_floor {
                    None => {
                        // The first member opens with the smallest triple.
                        if z != 2 * self.g {
                            continue;
                        }
                    }
                    Some(floor) => {
                        if z <= floor as usize {
                            continue;
                        }
                    }
                }
            }
            cands.push(t);
        }
        ctx.order(&mut cands);
        for t in cands {
            if !ctx.tick() {
                return Step::Stop;
            }
            self.place(t);
            let step = self.extend(ctx);
            self.unplace();
            if step != Step::Fail {
                return step;
            }
        }
        Step::Fail
    }

    fn materialise(&self) -> Vec<BlockMultiset> {
        self.solution
            .as_ref()
            .expect("materialise without a solution")
            .iter()
            .map(|member| {
                member
                    .iter()
                    .map(|&t| {
                        (
                            Block::new(self.triples[t as usize].to_vec())
                                .expect("search triples are valid blocks"),
                            1,
                        )
                    })
                    .collect()
            })
            .collect()
    }
}

/// Tables for the quotient of the transverse triples under rotating every
/// group in step: the map that sends each point to the next offset inside
/// its own group (wrapping at `g`) fixes every group setwise.  Each
/// transverse triple (and pair) lies in an orbit of size exactly `g`, and
/// the three pair orbits of a triple orbit are distinct, so a large set
/// whose members are unions of whole orbits is the same assignment problem
/// on the orbit representatives, `g` times smaller.  Only hits count: a
/// quotient with no solution proves nothing about the full space.
struct OrbitTables {
    triples: Vec<[Point; 3]>,
    pairs: Vec<[u32; 3]>,
}

/// Image of `p` after advancing every in-group offset by `k`.
fn rotate(p: Point, k: usize, g: usize) -> Point {
    let p = p as usize;
    ((p / g) * g + (p % g + k) % g) as Point
}

fn pair_rep(x: Point, y: Point, g: usize) -> (Point, Point) {
    (0..g)
        .map(|k| {
            let a = rotate(x, k, g);
            let b = rotate(y, k, g);
            (a.min(b), a.max(b))
        })
        .min()
        .expect("nonempty orbit")
}

fn triple_rep(tri: [Point; 3], g: usize) -> [Point; 3] {
    (0..g)
        .map(|k| {
            let mut t = tri.map(|p| rotate(p, k, g));
            t.sort_unstable();
            t
        })
        .min()
        .expect("nonempty orbit")
}

impl OrbitTables {
    fn new(g: usize, u: usize) -> Self {
        let base = GddSearch::new(g, u, 1, 1, false);
        let mut pair_ids: std::collections::BTreeMap<(Point, Point), u32> =
            std::collections::BTreeMap::new();
        let mut orbit_ids: std::collections::BTreeMap<[Point; 3], u32> =
            std::collections::BTreeMap::new();
        let mut triples = Vec::new();
        let mut pairs = Vec::new();
        for tri in &base.triples {
            let rep = triple_rep(*tri, g);
            if orbit_ids.contains_key(&rep) {
                continue;
            }
            orbit_ids.insert(rep, triples.len() as u32);
            let mut ps = [0u32; 3];
            for (slot, (a, b)) in [(rep[0], rep[1]), (rep[0], rep[2]), (rep[1], rep[2])]
                .into_iter()
                .enumerate()
            {
                let pr = pair_rep(a, b, g);
                let next = pair_ids.len() as u32;
                ps[slot] = *pair_ids.entry(pr).or_insert(next);
            }
            pairs.push(ps);
            triples.push(rep);
        }
        OrbitTables { triples, pairs }
    }
}

/// Large-set engine: assigns every transverse triple to one of the members
/// directly.  Each triple must land somewhere, so dead ends surface as soon
/// as any triple has no member left whose pair coverage and block quota
/// allow it.  Member indices are interchangeable; the engine only ever
/// opens member `m+1` after member `m` is in use, which breaks that
/// symmetry completely, so an exhausted run proves nonexistence.
struct AssignSearch {
    lambda: u8,
    n_members: usize,
    quota: u32,
    g: usize,
    /// Expansion factor: 1 on the full triple table, `g` on the rotation
    /// quotient, where every chosen representative stands for its orbit.
    orbit: usize,
    triples: Vec<[Point; 3]>,
    tri_pairs: Vec<[u32; 3]>,
    assign: Vec<i16>,
    cover: Vec<Vec<u8>>,
    counts: Vec<u32>,
    members_used: usize,
    assigned: usize,
    solution: Option<Vec<i16>>,
}

impl AssignSearch {
    fn new(g: usize, u: usize, lambda: usize, n_members: usize) -> Self {
        let base = GddSearch::new(g, u, 1, 1, false);
        let v = base.v;
        let quota = (lambda * g * g * u * (u - 1) / 6) as u32;
        AssignSearch {
            lambda: lambda as u8,
            n_members,
            quota,
            g,
            orbit: 1,
            assign: vec![-1; base.triples.len()],
            cover: vec![vec![0; v * v]; n_members],
            counts: vec![0; n_members],
            members_used: 0,
            assigned: 0,
            solution: None,
            triples: base.triples,
            tri_pairs: base.tri_pairs,
        }
    }

    /// The same engine over the rotation quotient; `None` when member block
    /// counts do not split into whole orbits.
    fn quotient(g: usize, u: usize, lambda: usize, n_members: usize) -> Option<AssignSearch> {
        let per_member = lambda * g * g * u * (u - 1) / 6;
        if g < 2 || per_member % g != 0 {
            return None;
        }
        let tables = OrbitTables::new(g, u);
        let slots = tables
            .pairs
            .iter()
            .flat_map(|ps| ps.iter())
            .max()
            .map_or(0, |&m| m as usize + 1);
        Some(AssignSearch {
            lambda: lambda as u8,
            n_members,
            quota: (per_member / g) as u32,
            g,
            orbit: g,
            assign: vec![-1; tables.triples.len()],
            cover: vec![vec![0; slots]; n_members],
            counts: vec![0; n_members],
            members_used: 0,
            assigned: 0,
            solution: None,
            triples: tables.triples,
            tri_pairs: tables.pairs,
        })
    }

    fn member_ok(&self, t: usize, m: usize) -> bool {
        self.counts[m] < self.quota
            && self.tri_pairs[t]
                .iter()
                .all(|&p| self.cover[m][p as usize] < self.lambda)
    }

    fn open_members(&self) -> usize {
        (self.members_used + 1).min(self.n_members)
    }

    /// The unassigned triple with the fewest members still open to it.
    fn branch_triple(&self) -> Option<usize> {
        let limit = self.open_members();
        let mut best: Option<(usize, usize)> = None;
        for t in 0..self.triples.len() {
            if self.assign[t] >= 0 {
                continue;
            }
            let count = (0..limit).filter(|&m| self.member_ok(t, m)).count();
            if count == 0 {
                return Some(t);
            }
            if best.map_or(true, |(_, c)| count < c) {
                best = Some((t, count));
                if count == 1 {
                    return Some(t);
                }
            }
        }
        best.map(|(t, _)| t)
    }

    fn extend(&mut self, ctx: &mut Ctx) -> Step {
        let Some(t) = self.branch_triple() else {
            self.solution = Some(self.assign.clone());
            return Step::Done;
        };
        let limit = self.open_members();
        let mut cands: Vec<u32> = (0..limit as u32)
            .filter(|&m| self.member_ok(t, m as usize))
            .collect();
        ctx.order(&mut cands);
        for m in cands {
            if !ctx.tick() {
                return Step::Stop;
            }
            let m = m as usize;
            self.assign[t] = m as i16;
            self.counts[m] += 1;
            self.assigned += 1;
            let was_used = self.members_used;
            if m == self.members_used {
                self.members_used += 1;
            }
            for &p in &self.tri_pairs[t] {
                self.cover[m][p as usize] += 1;
            }
            let step = self.extend(ctx);
            for &p in &self.tri_pairs[t] {
                self.cover[m][p as usize] -= 1;
            }
            self.members_used = was_used;
            self.assigned -= 1;
            self.counts[m] -= 1;
            self.assign[t] = -1;
            if step != Step::Fail {
                return step;
            }
        }
        Step::Fail
    }

    fn materialise(&self) -> Vec<BlockMultiset> {
        let assign = self
            .solution
            .as_ref()
            .expect("materialise without a solution");
        let mut members = vec![Vec::new(); self.n_members];
        for (t, &m) in assign.iter().enumerate() {
            for k in 0..self.orbit {
                let mut tri = self.triples[t].map(|p| rotate(p, k, self.g));
                tri.sort_unstable();
                members[m as usize].push(tri);
            }
        }
        members
            .into_iter()
            .map(|tris| {
                tris.into_iter()
                    .map(|tri| (Block::new(tri.to_vec()).expect("valid block"), 1))
                    .collect()
            })
            .collect()
    }
}

/// Counting conditions every large set must satisfy; unlike the public
/// admissibility test this does not bake in the known seven-point
/// exception, so the engine can prove that case empty on its own.
fn lgdd_arithmetic_ok(lambda: usize, g: usize, u: usize) -> bool {
    u >= 3
        && lambda >= 1
        && lambda <= g * (u - 2)
        && g * (u - 2) % lambda == 0
        && lambda * g * (u - 1) % 2 == 0
        && lambda * g * g * u * (u - 1) % 6 == 0
}

fn search_lgdd(lambda: usize, g: usize, u: usize, ctx: &mut Ctx) -> SearchOutcome {
    if g * u > MAX_POINTS {
        return SearchOutcome::Unsupported(format!(
            "{} points exceed the {MAX_POINTS}-point ceiling",
            g * u
        ));
    }
    if !lgdd_arithmetic_ok(lambda, g, u) {
        return SearchOutcome::Exhausted { nodes: 0 };
    }
    let n_members = g * (u - 2) / lambda;
    // Quotient pre-pass on a small node slice: only its hits count, misses
    // prove nothing.
    if lambda < 256 {
        if let Some(mut s) = AssignSearch::quotient(g, u, lambda, n_members) {
            let slice = (ctx.max_nodes - ctx.nodes).min(500_000);
            let mut octx = Ctx {
                nodes: 0,
                max_nodes: slice,
                deadline: ctx.deadline,
                rng: ctx.rng.clone(),
                stopped: false,
            };
            let step = s.extend(&mut octx);
            ctx.nodes += octx.nodes;
            if step == Step::Done {
                return SearchOutcome::Found {
                    artifact: Artifact::LargeSet(LargeSet {
                        lambda,
                        g,
                        u,
                        members: s.materialise(),
                    }),
                    nodes: ctx.nodes,
                };
            }
            if ctx.nodes >= ctx.max_nodes {
                return SearchOutcome::OutOfBudget { nodes: ctx.nodes };
            }
        }
    }
    let mut s = AssignSearch::new(g, u, lambda, n_members);
    match s.extend(ctx) {
        Step::Done => SearchOutcome::Found {
            artifact: Artifact::LargeSet(LargeSet {
                lambda,
                g,
                u,
                members: s.materialise(),
            }),
            nodes: ctx.nodes,
        },
        Step::Fail => SearchOutcome::Exhausted { nodes: ctx.nodes },
        Step::Stop => SearchOutcome::OutOfBudget { nodes: ctx.nodes },
    }
}

fn search_simple_gdd(lambda: usize, g: usize, u: usize, ctx: &mut Ctx) -> SearchOutcome {
    if g * u > MAX_POINTS {
        return SearchOutcome::Unsupported(format!(
            "{} points exceed the {MAX_POINTS}-point ceiling",
            g * u
        ));
    }
    if lambda > 255 {
        return SearchOutcome::Unsupported("index larger than 255".into());
    }
    if !admissible_simple_gdd(lambda, g, u).admissible {
        return SearchOutcome::Exhausted { nodes: 0 };
    }
    let mut s = GddSearch::new(g, u, lambda, 1, false);
    match s.extend(ctx) {
        Step::Done => SearchOutcome::Found {
            artifact: Artifact::Gdd {
                design: GroupedDesign {
                    g,
                    u,
                    blocks: s.materialise().pop().expect("one member"),
                },
                lambda,
            },
            nodes: ctx.nodes,
        },
        Step::Fail => SearchOutcome::Exhausted { nodes: ctx.nodes },
        Step::Stop => SearchOutcome::OutOfBudget { nodes: ctx.nodes },
    }
}

/// Point-indexed partition search: classes are filled in point order, each
/// being an index-one design on the points outside that point's group.
struct FrameSearch {
    g: usize,
    v: usize,
    triples: Vec<[Point; 3]>,
    tri_pairs: Vec<[u32; 3]>,
    by_pair: Vec<Vec<u32>>,
    used: Vec<bool>,
    cover: Vec<u8>,
    classes: Vec<Vec<u32>>,
    current: Vec<u32>,
    solution: Option<Vec<Vec<u32>>>,
}

impl FrameSearch {
    fn new(g: usize, u: usize) -> Self {
        let base = GddSearch::new(g, u, 1, 1, false);
        FrameSearch {
            g,
            v: base.v,
            used: vec![false; base.triples.len()],
            cover: vec![0; base.v * base.v],
            classes: Vec::new(),
            current: Vec::new(),
            solution: None,
            triples: base.triples,
            tri_pairs: base.tri_pairs,
            by_pair: base.by_pair,
        }
    }

    fn hole_group(&self) -> usize {
        self.classes.len() / self.g
    }

    fn candidate_ok(&self, t: u32, hole: usize) -> bool {
        let ti = t as usize;
        if self.used[ti] {
            return false;
        }
        let tri = self.triples[ti];
        if tri.iter().any(|&p| p as usize / self.g == hole) {
            return false;
        }
        self.tri_pairs[ti]
            .iter()
            .all(|&p| self.cover[p as usize] == 0)
    }

    /// Fail-first branching over the pairs the current class still owes.
    fn branch_pair(&self) -> Option<usize> {
        let hole = self.hole_group();
        let mut best: Option<(usize, usize)> = None;
        for x in 0..self.v {
            if x / self.g == hole {
                continue;
            }
            for y in (x + 1)..self.v {
                if y / self.g == x / self.g || y / self.g == hole {
                    continue;
                }
                let p = x * self.v + y;
                if self.cover[p] != 0 {
                    continue;
                }
                let count = self.by_pair[p]
                    .iter()
                    .filter(|&&t| self.candidate_ok(t, hole))
                    .count();
                if count == 0 {
                    return Some(p);
                }
                if best.map_or(true, |(_, c)| count < c) {
                    best = Some((p, count));
                    if count == 1 {
                        return Some(p);
                    }
                }
            }
        }
        best.map(|(p, _)| p)
    }

    fn recover_cover(&mut self) {
        self.cover.fill(0);
        for &t in &self.current {
            for &p in &self.tri_pairs[t as usize] {
                self.cover[p as usize] += 1;
            }
        }
    }

    fn extend(&mut self, ctx: &mut Ctx) -> Step {
        let pinned_first = self.classes.is_empty() && self.current.is_empty();
        let branch = if pinned_first {
            // Pin the very first block of the first class to its smallest
            // pair; only the pinned triple will pass the filter below.
            Some(self.g * self.v + 2 * self.g)
        } else {
            self.branch_pair()
        };
        let Some(pid) = branch else {
            if self.classes.len() + 1 == self.v {
                let mut all = self.classes.clone();
                all.push(self.current.clone());
                self.solution = Some(all);
                return Step::Done;
            }
            self.classes.push(std::mem::take(&mut self.current));
            self.cover.fill(0);
            let step = self.extend(ctx);
            self.current = self.classes.pop().expect("class stack underflow");
            self.recover_cover();
            return step;
        };
        let hole = self.hole_group();
        let mut cands: Vec<u32> = Vec::new();
        for &t in &self.by_pair[pid] {
            if !self.candidate_ok(t, hole) {
                continue;
            }
            if pinned_first {
                let want = [self.g as Point, 2 * self.g as Point, 3 * self.g as Point];
                if self.triples[t as usize] != want {
                    continue;
                }
            }
            cands.push(t);
        }
        ctx.order(&mut cands);
        for t in cands {
            if !ctx.tick() {
                return Step::Stop;
            }
            for &p in &self.tri_pairs[t as usize] {
                self.cover[p as usize] += 1;
            }
            self.used[t as usize] = true;
            self.current.push(t);
            let step = self.extend(ctx);
            self.current.pop();
            self.used[t as usize] = false;
            for &p in &self.tri_pairs[t as usize] {
                self.cover[p as usize] -= 1;
            }
            if step != Step::Fail {
                return step;
            }
        }
        Step::Fail
    }
}

fn search_frame(g: usize, u: usize, ctx: &mut Ctx) -> SearchOutcome {
    if g * u > MAX_POINTS {
        return SearchOutcome::Unsupported(format!(
            "{} points exceed the {MAX_POINTS}-point ceiling",
            g * u
        ));
    }
    if g == 0 || u < 4 {
        return SearchOutcome::Exhausted { nodes: 0 };
    }
    let mut s = FrameSearch::new(g, u);
    match s.extend(ctx) {
        Step::Done => {
            let classes = s
                .solution
                .as_ref()
                .expect("frame solution")
                .iter()
                .map(|class| {
                    class
                        .iter()
                        .map(|&t| {
                            Block::new(s.triples[t as usize].to_vec())
                                .expect("search triples are valid blocks")
                        })
                        .collect()
                })
                .collect();
            SearchOutcome::Found {
                artifact: Artifact::Frame(Frame { g, u, classes }),
                nodes: ctx.nodes,
            }
        }
        Step::Fail => SearchOutcome::Exhausted { nodes: ctx.nodes },
        Step::Stop => SearchOutcome::OutOfBudget { nodes: ctx.nodes },
    }
}

/// The four parallel classes of the nine-point affine triple system, used as
/// the shared distinguished system for the pair-indexed search.
fn affine_classes() -> Vec<Vec<[Point; 3]>> {
    vec![
        vec![[0, 1, 2], [3, 4, 5], [6, 7, 8]],
        vec![[0, 3, 6], [1, 4, 7], [2, 5, 8]],
        vec![[0, 4, 8], [1, 5, 6], [2, 3, 7]],
        vec![[0, 5, 7], [1, 3, 8], [2, 4, 6]],
    ]
}

struct LrSearch {
    triples: Vec<[Point; 3]>,
    tri_pairs: Vec<[u32; 3]>,
    by_pair: Vec<Vec<u32>>,
    is_shared: Vec<bool>,
    shared_classes: Vec<Vec<[Point; 3]>>,
    used: Vec<bool>,
    cover: Vec<u8>,
    extras: Vec<Vec<u32>>,
    current: Vec<u32>,
    solution: Option<Vec<Vec<u32>>>,
}

impl LrSearch {
    fn new() -> Self {
        let base = GddSearch::new(1, 9, 1, 1, false);
        let shared_classes = affine_classes();
        let mut is_shared = vec![false; base.triples.len()];
        for class in &shared_classes {
            for tri in class {
                let idx = base
                    .triples
                    .binary_search(tri)
                    .expect("shared triples exist");
                is_shared[idx] = true;
            }
        }
        LrSearch {
            is_shared,
            shared_classes,
            used: vec![false; base.triples.len()],
            cover: vec![0; 81],
            extras: Vec::new(),
            current: Vec::new(),
            solution: None,
            triples: base.triples,
            tri_pairs: base.tri_pairs,
            by_pair: base.by_pair,
        }
    }

    fn seed_cover(&mut self, k: usize) {
        self.cover.fill(0);
        for tri in &self.shared_classes[k].clone() {
            for (a, b) in [(tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])] {
                self.cover[a as usize * 9 + b as usize] += 1;
            }
        }
        for &t in &self.current {
            for &p in &self.tri_pairs[t as usize] {
                self.cover[p as usize] += 1;
            }
        }
    }

    fn first_open_pair(&self) -> Option<usize> {
        for x in 0..9 {
            for y in (x + 1)..9 {
                if self.cover[x * 9 + y] == 0 {
                    return Some(x * 9 + y);
                }
            }
        }
        None
    }

    fn dfs_member(&mut self, m: usize, ctx: &mut Ctx) -> Step {
        if m == 8 {
            self.solution = Some(self.extras.clone());
            return Step::Done;
        }
        self.seed_cover(m / 2);
        self.extend(m, ctx)
    }

    fn extend(&mut self, m: usize, ctx: &mut Ctx) -> Step {
        let Some(pid) = self.first_open_pair() else {
            let frozen = std::mem::take(&mut self.current);
            self.extras.push(frozen);
            let step = self.dfs_member(m + 1, ctx);
            self.current = self.extras.pop().expect("member stack underflow");
            self.seed_cover(m / 2);
            return step;
        };
        let mut cands: Vec<u32> = Vec::new();
        for &t in &self.by_pair[pid] {
            let ti = t as usize;
            if self.is_shared[ti] || self.used[ti] {
                continue;
            }
            let ps = self.tri_pairs[ti];
            if ps.iter().any(|&p| self.cover[p as usize] > 0) {
                continue;
            }
            cands.push(t);
        }
        ctx.order(&mut cands);
        for t in cands {
            if !ctx.tick() {
                return Step::Stop;
            }
            for &p in &self.tri_pairs[t as usize] {
                self.cover[p as usize] += 1;
            }
            self.used[t as usize] = true;
            self.current.push(t);
            let step = self.extend(m, ctx);
            self.current.pop();
            self.used[t as usize] = false;
            for &p in &self.tri_pairs[t as usize] {
                self.cover[p as usize] -= 1;
            }
            if step != Step::Fail {
                return step;
            }
        }
        Step::Fail
    }

    /// Splits the twelve blocks of one completed member into its four
    /// parallel classes, the shared class first.
    fn resolve_member(&self, k: usize, extras: &[u32]) -> LrMember {
        let mut blocks: Vec<[Point; 3]> = self.shared_classes[k].clone();
        blocks.extend(extras.iter().map(|&t| self.triples[t as usize]));
        let mut assigned = vec![false; blocks.len()];
        let mut classes: Vec<Vec<Block>> = Vec::new();
        for i in 0..blocks.len() {
            if assigned[i] {
                continue;
            }
            let mut class = vec![i];
            for j in (i + 1)..blocks.len() {
                if assigned[j] || blocks[j].iter().any(|p| blocks[i].contains(p)) {
                    continue;
                }
                if class
                    .iter()
                    .all(|&c| blocks[j].iter().all(|p| !blocks[c].contains(p)))
                {
                    class.push(j);
                }
            }
            assert_eq!(class.len(), 3, "triple systems on nine points resolve");
            for &c in &class {
                assigned[c] = true;
            }
            classes.push(
                class
                    .iter()
                    .map(|&c| Block::new(blocks[c].to_vec()).expect("valid block"))
                    .collect(),
            );
        }
        // The shared class holds block 0, so it is first already; keep the
        // remaining classes in discovery order.
        LrMember { classes }
    }
}

fn search_lr(v: usize, ctx: &mut Ctx) -> SearchOutcome {
    if v != 9 {
        return SearchOutcome::Unsupported(format!(
            "the pair-indexed search is implemented for nine points, not {v}"
        ));
    }
    let mut s = LrSearch::new();
    match s.dfs_member(0, ctx) {
        Step::Done => {
            let extras = s.solution.clone().expect("solution recorded");
            let members = extras
                .iter()
                .enumerate()
                .map(|(m, ex)| s.resolve_member(m / 2, ex))
                .collect();
            SearchOutcome::Found {
                artifact: Artifact::Lr(LrDesign { v, members }),
                nodes: ctx.nodes,
            }
        }
        Step::Fail => SearchOutcome::Exhausted { nodes: ctx.nodes },
        Step::Stop => SearchOutcome::OutOfBudget { nodes: ctx.nodes },
    }
}

/// Runs one search to completion, budget, or proof of nonexistence.  Found
/// artifacts have already passed the verifier.
pub fn run_search(kind: &SearchKind, cfg: &SearchConfig) -> SearchOutcome {
    let mut ctx = Ctx::new(cfg);
    let outcome = match *kind {
        SearchKind::Lgdd { lambda, g, u } => search_lgdd(lambda, g, u, &mut ctx),
        SearchKind::SimpleGdd { lambda, g, u } => search_simple_gdd(lambda, g, u, &mut ctx),
        SearchKind::Frame { g, u } => search_frame(g, u, &mut ctx),
        SearchKind::Lr { v } => search_lr(v, &mut ctx),
    };
    if let SearchOutcome::Found { artifact, .. } = &outcome {
        assert!(
            artifact.verified(),
            "search produced an invalid {} artifact",
            kind.name()
        );
    }
    outcome
}

#[derive(Serialize, Deserialize)]
struct CertFile {
    document: serde_json::Value,
    fingerprint: String,
    name: String,
    seed: u64,
}

/// Certificates shipped inside the binary, keyed by search name.
fn bundled_certs() -> &'static [(&'static str, &'static str)] {
    &[
        ("lgdd-l1-g1-u9", include_str!("../certs/lgdd-l1-g1-u9.json")),
        ("lgdd-l1-g2-u6", include_str!("../certs/lgdd-l1-g2-u6.json")),
        ("lgdd-l1-g3-u5", include_str!("../certs/lgdd-l1-g3-u5.json")),
        ("lgdd-l2-g1-u12", include_str!("../certs/lgdd-l2-g1-u12.json")),
        ("lr-v9", include_str!("../certs/lr-v9.json")),
    ]
}

/// Where a resolved artifact came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Cache(PathBuf),
    Bundled,
    Search { nodes: u64 },
}

/// A design obtained from cache, bundle, or a fresh search, with any
/// warnings gathered along the way.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub artifact: Artifact,
    pub source: Source,
    pub notes: Vec<String>,
}

/// On-disk certificate cache plus the built-in certificates.  Corrupt or
/// stale entries are reported and treated as absent.
#[derive(Debug, Clone, Default)]
pub struct CertStore {
    dir: Option<PathBuf>,
}

impl CertStore {
    pub fn new(dir: Option<PathBuf>) -> Self {
        CertStore { dir }
    }

    /// Reads the cache directory from `LGDD_CACHE_DIR` when set.
    pub fn from_env() -> Self {
        CertStore {
            dir: std::env::var_os("LGDD_CACHE_DIR").map(PathBuf::from),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn parse_cert(
        name: &str,
        text: &str,
        kind: &SearchKind,
    ) -> Result<Artifact, String> {
        let cert: CertFile =
            serde_json::from_str(text).map_err(|e| format!("unreadable certificate: {e}"))?;
        if cert.name != name {
            return Err(format!(
                "certificate names {:?}, expected {name:?}",
                cert.name
            ));
        }
        let doc_text = serde_json::to_string(&cert.document)
            .map_err(|e| format!("unreadable payload: {e}"))?;
        let doc = DesignDocument::from_json(&doc_text)
            .map_err(|e| format!("invalid payload: {e}"))?;
        if doc.fingerprint() != cert.fingerprint {
            return Err("fingerprint mismatch".into());
        }
        let artifact =
            Artifact::from_document(&doc).ok_or_else(|| "payload kind not searchable".to_string())?;
        if !artifact.matches(kind) {
            return Err("certificate parameters do not match the request".into());
        }
        if !artifact.verified() {
            return Err("certificate failed re-verification".into());
        }
        Ok(artifact)
    }

    /// Looks the kind up in the cache directory, then among bundled
    /// certificates.  Notes explain every rejected candidate.
    pub fn load(&self, kind: &SearchKind) -> (Option<Resolved>, Vec<String>) {
        let name = kind.name();
        let mut notes = Vec::new();
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{name}.json"));
            if path.exists() {
                match std::fs::read_to_string(&path) {
                    Ok(text) => match Self::parse_cert(&name, &text, kind) {
                        Ok(artifact) => {
                            return (
                                Some(Resolved {
                                    artifact,
                                    source: Source::Cache(path),
                                    notes,
                                }),
                                Vec::new(),
                            );
                        }
                        Err(e) => notes.push(format!("ignored {}: {e}", path.display())),
                    },
                    Err(e) => notes.push(format!("ignored {}: {e}", path.display())),
                }
            }
        }
        for (bundle_name, text) in bundled_certs() {
            if *bundle_name == name {
                match Self::parse_cert(&name, text, kind) {
                    Ok(artifact) => {
                        return (
                            Some(Resolved {
                                artifact,
                                source: Source::Bundled,
                                notes,
                            }),
                            Vec::new(),
                        );
                    }
                    Err(e) => notes.push(format!("ignored bundled certificate {name}: {e}")),
                }
            }
        }
        (None, notes)
    }

    /// Writes a certificate for a found artifact; returns its path.
    pub fn save(
        &self,
        kind: &SearchKind,
        artifact: &Artifact,
        seed: u64,
    ) -> std::io::Result<Option<PathBuf>> {
        let Some(dir) = &self.dir else {
            return Ok(None);
        };
        std::fs::create_dir_all(dir)?;
        let doc = artifact.document();
        let cert = CertFile {
            document: serde_json::from_str(&doc.to_json()).expect("documents are valid JSON"),
            fingerprint: doc.fingerprint(),
            name: kind.name(),
            seed,
        };
        let mut text =
            serde_json::to_string_pretty(&cert).expect("certificates always serialise");
        text.push('\n');
        let path = dir.join(format!("{}.json", kind.name()));
        std::fs::write(&path, text)?;
        Ok(Some(path))
    }
}

/// Cache lookup with search fallback; found designs are saved back to the
/// cache directory when one is configured.
pub fn find_or_search(
    kind: &SearchKind,
    store: &CertStore,
    cfg: &SearchConfig,
) -> (Option<Resolved>, Vec<String>) {
    let (hit, mut notes) = store.load(kind);
    if let Some(resolved) = hit {
        return (Some(resolved), notes);
    }
    match run_search(kind, cfg) {
        SearchOutcome::Found { artifact, nodes } => {
            match store.save(kind, &artifact, cfg.seed) {
                Ok(_) => {}
                Err(e) => notes.push(format!("could not save certificate: {e}")),
            }
            (
                Some(Resolved {
                    artifact,
                    source: Source::Search { nodes },
                    notes: Vec::new(),
                }),
                notes,
            )
        }
        SearchOutcome::Exhausted { nodes } => {
            notes.push(format!(
                "search for {} exhausted after {nodes} nodes: no such design",
                kind.name()
            ));
            (None, notes)
        }
        SearchOutcome::OutOfBudget { nodes } => {
            notes.push(format!(
                "search for {} ran out of budget after {nodes} nodes",
                kind.name()
            ));
            (None, notes)
        }
        SearchOutcome::Unsupported(msg) => {
            notes.push(format!("search for {} unsupported: {msg}", kind.name()));
            (None, notes)
        }
    }
}

/// The searches whose certificates ship with the crate, with the menu of
/// seeds used to generate them.
pub fn bundled_names() -> Vec<String> {
    bundled_certs().iter().map(|(n, _)| n.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(max_nodes: u64) -> SearchConfig {
        SearchConfig {
            seed: 0,
            max_nodes,
            time_limit: Duration::from_secs(120),
        }
    }

    #[test]
    fn small_large_set_is_found_and_verified() {
        let kind = SearchKind::Lgdd {
            lambda: 1,
            g: 2,
            u: 4,
        };
        match run_search(&kind, &cfg(10_000_000)) {
            SearchOutcome::Found { artifact, .. } => match artifact {
                Artifact::LargeSet(ls) => {
                    assert_eq!((ls.lambda, ls.g, ls.u), (1, 2, 4));
                    assert_eq!(ls.members.len(), 4);
                }
                other => panic!("unexpected artifact {other:?}"),
            },
            other => panic!("expected a hit, got {other:?}"),
        }
    }

    #[test]
    fn the_seven_point_large_set_is_proved_nonexistent() {
        let kind = ls_plain(7, 1);
        match run_search(&kind, &cfg(50_000_000)) {
            SearchOutcome::Exhausted { nodes } => assert!(nodes > 0),
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn a_single_seven_point_system_is_found() {
        let kind = SearchKind::SimpleGdd {
            lambda: 1,
            g: 1,
            u: 7,
        };
        match run_search(&kind, &cfg(1_000_000)) {
            SearchOutcome::Found { artifact, .. } => match artifact {
                Artifact::Gdd { design, .. } => assert_eq!(design.blocks.total(), 7),
                other => panic!("unexpected artifact {other:?}"),
            },
            other => panic!("expected a hit, got {other:?}"),
        }
    }

    #[test]
    fn the_tiny_frame_is_found() {
        let kind = SearchKind::Frame { g: 3, u: 4 };
        match run_search(&kind, &cfg(50_000_000)) {
            SearchOutcome::Found { artifact, .. } => match artifact {
                Artifact::Frame(f) => {
                    assert_eq!(f.classes.len(), 12);
                    assert!(f.classes.iter().all(|c| c.len() == 9));
                }
                other => panic!("unexpected artifact {other:?}"),
            },
            other => panic!("expected a hit, got {other:?}"),
        }
    }

    #[test]
    fn budgets_cut_searches_short() {
        let kind = SearchKind::Lgdd {
            lambda: 1,
            g: 3,
            u: 5,
        };
        match run_search(&kind, &cfg(50)) {
            SearchOutcome::OutOfBudget { nodes } => assert!(nodes <= 50),
            other => panic!("expected an out-of-budget stop, got {other:?}"),
        }
    }

    #[test]
    fn equal_seeds_find_equal_designs() {
        let kind = SearchKind::Lgdd {
            lambda: 1,
            g: 2,
            u: 4,
        };
        let mut cfg_seeded = cfg(10_000_000);
        cfg_seeded.seed = 7;
        let a = run_search(&kind, &cfg_seeded);
        let b = run_search(&kind, &cfg_seeded);
        assert_eq!(a, b);
        assert!(matches!(a, SearchOutcome::Found { .. }));
    }

    /// Regenerates the certificates bundled with the crate, restarting each
    /// search under fresh shuffle seeds when the lexicographic order stalls.
    /// Run manually (release mode recommended):
    /// `cargo test --release -p lgdd --lib regenerate -- --ignored --nocapture`
    #[test]
    #[ignore]
    fn regenerate_bundled_certificates() {
        let dir = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/certs"));
        let store = CertStore::new(Some(dir));
        let targets = [
            SearchKind::Lr { v: 9 },
            ls_plain(9, 1),
            SearchKind::Lgdd {
                lambda: 1,
                g: 3,
                u: 5,
            },
            SearchKind::Lgdd {
                lambda: 1,
                g: 2,
                u: 6,
            },
            SearchKind::Lgdd {
                lambda: 1,
                g: 2,
                u: 7,
            },
            SearchKind::Lgdd {
                lambda: 2,
                g: 1,
                u: 12,
            },
        ];
        for kind in targets {
            let started = Instant::now();
            let mut saved = false;
            for seed in 0..=40u64 {
                let cfg = SearchConfig {
                    seed,
                    max_nodes: 10_000_000,
                    time_limit: Duration::from_secs(120),
                };
                match run_search(&kind, &cfg) {
                    SearchOutcome::Found { artifact, nodes } => {
                        let path = store.save(&kind, &artifact, seed).unwrap();
                        println!(
                            "{}: found with seed {seed} after {nodes} nodes in {:?} -> {:?}",
                            kind.name(),
                            started.elapsed(),
                            path
                        );
                        saved = true;
                        break;
                    }
                    SearchOutcome::Exhausted { nodes } => {
                        println!(
                            "{}: exhausted after {nodes} nodes -- no such design",
                            kind.name()
                        );
                        saved = true;
                        break;
                    }
                    _ => {}
                }
            }
            if !saved {
                println!(
                    "{}: no seed in 0..=40 landed within budget ({:?})",
                    kind.name(),
                    started.elapsed()
                );
            }
        }
    }

    #[test]
    fn certificates_roundtrip_through_the_store() {
        let dir = std::env::temp_dir().join(format!("lgdd-cert-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let store = CertStore::new(Some(dir.clone()));
        let kind = SearchKind::Lgdd {
            lambda: 1,
            g: 2,
            u: 4,
        };
        let (first, notes) = find_or_search(&kind, &store, &cfg(10_000_000));
        assert!(notes.is_empty(), "{notes:?}");
        let first = first.expect("found");
        assert!(matches!(first.source, Source::Search { .. }));
        let (second, _) = find_or_search(&kind, &store, &cfg(10));
        let second = second.expect("cached");
        assert!(matches!(second.source, Source::Cache(_)));
        assert_eq!(second.artifact, first.artifact);
        // Corrupt the cache entry: it must be ignored with a note and the
        // tiny budget then stops the fallback search.
        let path = dir.join(format!("{}.json", kind.name()));
        std::fs::write(&path, "{broken").unwrap();
        let (third, notes) = find_or_search(&kind, &store, &cfg(10));
        assert!(third.is_none());
        assert!(notes.iter().any(|n| n.contains("ignored")));
        let _ = std::fs::remove_dir_all(&dir);
    }
}
