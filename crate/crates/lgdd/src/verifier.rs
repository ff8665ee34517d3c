//! Independent checker for every defining law of the objects in [`crate::core`].
//!
//! Each `verify_*` function re-derives the laws from scratch — coverage counts
//! are tallied from the raw blocks, triple coverage is checked by exhaustive
//! enumeration — so a verified object is correct regardless of how it was
//! built.  Violations are reported as human-readable lines, capped at a
//! configurable number per report while the total is still counted.

use crate::core::{
    Block, BlockMultiset, FanDesign, FlatLargeSet, Frame, GoodLargeSet, GroupedDesign,
    HoledLargeSet, LargeSet, LrDesign, Point,
};
use std::collections::BTreeMap;

/// Options shared by all checks.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOpts {
    /// How many violation lines to keep (the total is always counted).
    pub max_violations: usize,
    /// Number of worker threads for member-parallel checks.
    pub threads: usize,
}

impl Default for VerifyOpts {
    fn default() -> Self {
        VerifyOpts {
            max_violations: 10,
            threads: 1,
        }
    }
}

/// Outcome of a verification: the first few violations plus a full count.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub violations: Vec<String>,
    pub total_violations: usize,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.total_violations == 0
    }

    fn push(&mut self, opts: &VerifyOpts, line: String) {
        if self.violations.len() < opts.max_violations {
            self.violations.push(line);
        }
        self.total_violations += 1;
    }

    fn absorb(&mut self, opts: &VerifyOpts, other: Report) {
        for line in other.violations {
            if self.violations.len() < opts.max_violations {
                self.violations.push(line);
            }
        }
        self.total_violations += other.total_violations;
    }

    pub fn summary(&self) -> String {
        if self.ok() {
            "ok".to_string()
        } else {
            format!(
                "{} violation(s); first {}: {}",
                self.total_violations,
                self.violations.len(),
                self.violations.join(" | ")
            )
        }
    }
}

fn pair_index(v: usize, a: Point, b: Point) -> usize {
    debug_assert!(a < b);
    a as usize * v + b as usize
}

/// Tallies pair coverage (counting multiplicity, all pairs inside each block)
/// into a `v*v` upper-triangular table.
fn pair_coverage(v: usize, blocks: &BlockMultiset) -> Vec<u32> {
    let mut cov = vec![0u32; v * v];
    for (block, &mult) in blocks.iter() {
        let pts = block.points();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                cov[pair_index(v, pts[i], pts[j])] += mult;
            }
        }
    }
    cov
}

fn run_per_member<F>(members: usize, threads: usize, check: F) -> Vec<Report>
where
    F: Fn(usize) -> Report + Sync,
{
    if threads <= 1 || members <= 1 {
        return (0..members).map(check).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut reports: Vec<Report> = (0..members).map(|_| Report::default()).collect();
    let slots: Vec<std::sync::Mutex<Report>> = reports
        .drain(..)
        .map(std::sync::Mutex::new)
        .collect();
    std::thread::scope(|scope| {
        for _ in 0..threads.min(members) {
            scope.spawn(|| loop {
                let r = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if r >= members {
                    break;
                }
                *slots[r].lock().unwrap() = check(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap())
        .collect()
}

/// Checks a grouped design: triples only, transverse blocks, every
/// cross-group pair covered exactly `lambda` times, and (if `simple`) no
/// repeated blocks.
pub fn verify_gdd(d: &GroupedDesign, lambda: usize, simple: bool, opts: &VerifyOpts) -> Report {
    let mut rep = Report::default();
    let v = d.point_count();
    for (block, &mult) in d.blocks.iter() {
        if block.len() != 3 {
            rep.push(opts, format!("block {:?} has size {}", block.points(), block.len()));
            continue;
        }
        if block.points().iter().any(|&p| p as usize >= v) {
            rep.push(opts, format!("block {:?} leaves the point set", block.points()));
            continue;
        }
        let mut groups: Vec<usize> = block.iter().map(|&p| d.group_of(p)).collect();
        groups.dedup();
        if groups.len() != 3 {
            rep.push(
                opts,
                format!("block {:?} meets a group twice", block.points()),
            );
        }
        if simple && mult != 1 {
            rep.push(
                opts,
                format!("block {:?} repeated {} times", block.points(), mult),
            );
        }
    }
    let cov = pair_coverage(v, &d.blocks);
    for a in 0..v {
        for b in (a + 1)..v {
            let got = cov[a * v + b] as usize;
            let want = if a / d.g == b / d.g { 0 } else { lambda };
            if got != want {
                rep.push(
                    opts,
                    format!("pair {{{a},{b}}} covered {got} times, expected {want}"),
                );
            }
        }
    }
    rep
}

/// Checks a large set of grouped designs: every member is a simple grouped
/// design of index `lambda`, and all members together use every transverse
/// triple exactly once.
pub fn verify_large_set(ls: &LargeSet, opts: &VerifyOpts) -> Report {
    let mut rep = Report::default();
    let member_reports = run_per_member(ls.members.len(), opts.threads, |r| {
        let d = GroupedDesign {
            g: ls.g,
            u: ls.u,
            blocks: ls.members[r].clone(),
        };
        let mut mr = Report::default();
        let inner = verify_gdd(&d, ls.lambda, true, opts);
        for line in inner.violations {
            mr.push(opts, format!("member {r}: {line}"));
        }
        mr.total_violations = inner.total_violations;
        mr
    });
    for mr in member_reports {
        rep.absorb(opts, mr);
    }

    let mut seen: BTreeMap<&Block, u32> = BTreeMap::new();
    for member in &ls.members {
        for (block, &mult) in member.iter() {
            *seen.entry(block).or_insert(0) += mult;
        }
    }
    for t in crate::core::all_transverse_triples(ls.g, ls.u) {
        let got = seen.get(&t).copied().unwrap_or(0);
        if got != 1 {
            rep.push(
                opts,
                format!(
                    "transverse triple {:?} used {got} times across members, expected 1",
                    t.points()
                ),
            );
        }
    }
    let extras = seen.len() != crate::core::transverse_triple_count(ls.g, ls.u)
        && seen.values().all(|&m| m == 1);
    if extras {
        rep.push(opts, "members contain non-transverse blocks".to_string());
    }
    rep
}

/// The three shared large-set laws on `v` points: every pair covered
/// `lambda` times inside each member, every triple of the point set covered
/// exactly once by the distinct blocks of all members together, and every
/// distinct block of size `k` appearing exactly `k - 2` times in the multiset
/// union.
fn verify_ls_laws(
    v: usize,
    lambda: usize,
    members: &[BlockMultiset],
    opts: &VerifyOpts,
) -> Report {
    let mut rep = Report::default();
    let member_reports = run_per_member(members.len(), opts.threads, |r| {
        let mut mr = Report::default();
        for block in members[r].blocks() {
            if block.points().iter().any(|&p| p as usize >= v) {
                mr.push(
                    opts,
                    format!("member {r}: block {:?} leaves the point set", block.points()),
                );
            }
        }
        let cov = pair_coverage(v, &members[r]);
        for a in 0..v {
            for b in (a + 1)..v {
                let got = cov[a * v + b] as usize;
                if got != lambda {
                    mr.push(
                        opts,
                        format!(
                            "member {r}: pair {{{a},{b}}} covered {got} times, expected {lambda}"
                        ),
                    );
                }
            }
        }
        mr
    });
    for mr in member_reports {
        rep.absorb(opts, mr);
    }

    // Multiset union: distinct blocks with their total multiplicities.
    let mut union: BTreeMap<&Block, u32> = BTreeMap::new();
    for member in members {
        for (block, &mult) in member.iter() {
            *union.entry(block).or_insert(0) += mult;
        }
    }
    for (block, &total) in &union {
        let want = (block.len() - 2) as u32;
        if total != want {
            rep.push(
                opts,
                format!(
                    "distinct block {:?} appears {total} times in the union, expected {want}",
                    block.points()
                ),
            );
        }
    }

    // Triple coverage by distinct blocks, via exhaustive enumeration.
    let mut triple_cov: BTreeMap<(Point, Point, Point), u32> = BTreeMap::new();
    for block in union.keys() {
        let pts = block.points();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                for k in (j + 1)..pts.len() {
                    *triple_cov.entry((pts[i], pts[j], pts[k])).or_insert(0) += 1;
                }
            }
        }
    }
    for a in 0..v {
        for b in (a + 1)..v {
            for c in (b + 1)..v {
                let got = triple_cov
                    .get(&(a as Point, b as Point, c as Point))
                    .copied()
                    .unwrap_or(0);
                if got != 1 {
                    rep.push(
                        opts,
                        format!(
                            "triple {{{a},{b},{c}}} lies in {got} distinct blocks, expected 1"
                        ),
                    );
                }
            }
        }
    }
    rep
}

/// Checks a flat large set (no distinguished points).
pub fn verify_flat(ls: &FlatLargeSet, opts: &VerifyOpts) -> Report {
    let mut rep = Report::default();
    let expected = if ls.lambda > 0 && (ls.v - 2) % ls.lambda == 0 {
        Some((ls.v - 2) / ls.lambda)
    } else {
        None
    };
    match expected {
        Some(m) if m == ls.members.len() => {}
        _ => rep.push(
            opts,
            format!(
                "member count {} does not equal (v-2)/lambda for v={} lambda={}",
                ls.members.len(),
                ls.v,
                ls.lambda
            ),
        ),
    }
    rep.absorb(opts, verify_ls_laws(ls.v, ls.lambda, &ls.members, opts));
    rep
}

/// Checks a holed large set: the shared large-set laws plus the size profile
/// (blocks with one extra point are triples, the others have sizes from the
/// declared classes).
pub fn verify_holed(ls: &HoledLargeSet, opts: &VerifyOpts) -> Report {
    let mut rep = Report::default();
    let v = ls.v();
    let lambda = ls.profile.lambda;
    if lambda == 0 || ls.s_size % lambda != 0 || ls.members.len() != ls.s_size / lambda {
        rep.push(
            opts,
            format!(
                "member count {} does not equal s/lambda for s={} lambda={}",
                ls.members.len(),
                ls.s_size,
                lambda
            ),
        );
    }
    let inf1 = ls.inf1();
    let inf2 = ls.inf2();
    for (r, member) in ls.members.iter().enumerate() {
        for block in member.blocks() {
            let hits = block.contains(inf1) as usize + block.contains(inf2) as usize;
            let ok = match hits {
                0 => ls.profile.k0.contains(&block.len()),
                1 => block.len() == 3,
                _ => ls.profile.k2.contains(&block.len()),
            };
            if !ok {
                rep.push(
                    opts,
                    format!(
                        "member {r}: block {:?} has size {} with {hits} extra point(s), not in the profile",
                        block.points(),
                        block.len()
                    ),
                );
            }
        }
    }
    rep.absorb(opts, verify_ls_laws(v, lambda, &ls.members, opts));
    rep
}

/// Checks the star property: every block of size at least four appears
/// exactly `lambda` times in each member that contains it.
pub fn verify_star(ls: &HoledLargeSet, opts: &VerifyOpts) -> Report {
    let mut rep = Report::default();
    let lambda = ls.profile.lambda as u32;
    for (r, member) in ls.members.iter().enumerate() {
        for (block, &mult) in member.iter() {
            if block.len() >= 4 && mult != lambda {
                rep.push(
                    opts,
                    format!(
                        "member {r}: block {:?} of size {} appears {mult} times, expected {lambda}",
                        block.points(),
                        block.len()
                    ),
                );
            }
        }
    }
    rep
}

/// Checks a good holed large set: the holed laws plus, per member, the arc
/// laws — in-degree equals out-degree equals `lambda` minus the number of
/// blocks holding both extra points and the vertex, the undirected edge set
/// equals the set of pairs appearing in one-extra-point blocks, and every
/// ordered pair outside the two-extra-point blocks occurs in exactly one
/// member's arc set.
pub fn verify_good(gls: &GoodLargeSet, star: bool, opts: &VerifyOpts) -> Report {
    let ls = &gls.ls;
    let mut rep = verify_holed(ls, opts);
    if star {
        rep.absorb(opts, verify_star(ls, opts));
    }
    let s = ls.s_size;
    let lambda = ls.profile.lambda;
    let inf1 = ls.inf1();
    let inf2 = ls.inf2();
    if gls.digraphs.len() != ls.members.len() {
        rep.push(
            opts,
            format!(
                "{} arc sets for {} members",
                gls.digraphs.len(),
                ls.members.len()
            ),
        );
        return rep;
    }

    // Pairs lying inside some union block that holds both extra points are
    // exempt from the global ordered-pair law.
    let mut inside_hole = vec![false; s * s];
    for member in &ls.members {
        for block in member.blocks() {
            if block.contains(inf1) && block.contains(inf2) {
                let inner: Vec<Point> =
                    block.iter().copied().filter(|&p| (p as usize) < s).collect();
                for i in 0..inner.len() {
                    for j in 0..inner.len() {
                        if i != j {
                            inside_hole[inner[i] as usize * s + inner[j] as usize] = true;
                        }
                    }
                }
            }
        }
    }

    let mut ordered_cov = vec![0u32; s * s];
    for (r, arcs) in gls.digraphs.iter().enumerate() {
        let member = &ls.members[r];
        let mut t = vec![0usize; s];
        let mut edge_pairs = vec![false; s * s];
        for (block, &mult) in member.iter() {
            let h1 = block.contains(inf1);
            let h2 = block.contains(inf2);
            if h1 && h2 {
                for &p in block.iter().filter(|&&p| (p as usize) < s) {
                    t[p as usize] += mult as usize;
                }
            } else if h1 || h2 {
                let inner: Vec<Point> =
                    block.iter().copied().filter(|&p| (p as usize) < s).collect();
                edge_pairs[inner[0] as usize * s + inner[1] as usize] = true;
                edge_pairs[inner[1] as usize * s + inner[0] as usize] = true;
            }
        }
        let mut outdeg = vec![0usize; s];
        let mut indeg = vec![0usize; s];
        let mut arc_pairs = vec![false; s * s];
        for &(x, y) in arcs {
            if x as usize >= s || y as usize >= s || x == y {
                rep.push(opts, format!("member {r}: arc ({x},{y}) is not a valid pair"));
                continue;
            }
            outdeg[x as usize] += 1;
            indeg[y as usize] += 1;
            arc_pairs[x as usize * s + y as usize] = true;
            arc_pairs[y as usize * s + x as usize] = true;
            ordered_cov[x as usize * s + y as usize] += 1;
        }
        for x in 0..s {
            let want = lambda.saturating_sub(t[x]);
            if lambda < t[x] {
                rep.push(
                    opts,
                    format!(
                        "member {r}: point {x} lies in {} both-extra blocks, more than lambda = {lambda}",
                        t[x]
                    ),
                );
            }
            if outdeg[x] != want || indeg[x] != want {
                rep.push(
                    opts,
                    format!(
                        "member {r}: point {x} has out/in degree {}/{}, expected {want}",
                        outdeg[x], indeg[x]
                    ),
                );
            }
        }
        for a in 0..s {
            for b in (a + 1)..s {
                if edge_pairs[a * s + b] != arc_pairs[a * s + b] {
                    rep.push(
                        opts,
                        format!(
                            "member {r}: pair {{{a},{b}}} is {} the one-extra blocks but {} the arcs",
                            if edge_pairs[a * s + b] { "covered by" } else { "absent from" },
                            if arc_pairs[a * s + b] { "present in" } else { "missing from" },
                        ),
                    );
                }
            }
        }
    }
    for a in 0..s {
        for b in 0..s {
            if a == b {
                continue;
            }
            let got = ordered_cov[a * s + b];
            let want = if inside_hole[a * s + b] { 0 } else { 1 };
            if got != want {
                rep.push(
                    opts,
                    format!(
                        "ordered pair ({a},{b}) appears in {got} arc set(s), expected {want}"
                    ),
                );
            }
        }
    }
    rep
}

/// Checks a pair-indexed family of resolvable triple systems: each member is
/// a resolvable triple system on `v` points, the distinguished classes of
/// each side together form one common triple system (the same for both
/// sides), triples of that common system appear in exactly two members (once
/// per side, distinguished), and every other triple appears in exactly one
/// member.
pub fn verify_lr(lr: &LrDesign, opts: &VerifyOpts) -> Report {
    let mut rep = Report::default();
    let v = lr.v;
    if v < 3 || v % 2 == 0 || lr.members.len() != v - 1 {
        rep.push(
            opts,
            format!("{} members for v = {v}, expected v - 1", lr.members.len()),
        );
        return rep;
    }
    for (idx, m) in lr.members.iter().enumerate() {
        if m.classes.len() != (v - 1) / 2 {
            rep.push(
                opts,
                format!(
                    "member {idx}: {} classes, expected {}",
                    m.classes.len(),
                    (v - 1) / 2
                ),
            );
        }
        for (ci, class) in m.classes.iter().enumerate() {
            let mut seen = vec![false; v];
            let mut count = 0usize;
            for b in class {
                if b.len() != 3 {
                    rep.push(opts, format!("member {idx} class {ci}: non-triple block"));
                }
                for &p in b.iter() {
                    if (p as usize) < v && !seen[p as usize] {
                        seen[p as usize] = true;
                        count += 1;
                    } else {
                        rep.push(
                            opts,
                            format!("member {idx} class {ci}: point {p} repeated or out of range"),
                        );
                    }
                }
            }
            if count != v {
                rep.push(
                    opts,
                    format!("member {idx} class {ci}: covers {count} of {v} points"),
                );
            }
        }
        // Each member is a triple system: every pair exactly once.
        let ms: BlockMultiset = m.blocks().map(|b| (b.clone(), 1)).collect();
        let cov = pair_coverage(v, &ms);
        for a in 0..v {
            for b in (a + 1)..v {
                if cov[a * v + b] != 1 {
                    rep.push(
                        opts,
                        format!(
                            "member {idx}: pair {{{a},{b}}} covered {} times, expected 1",
                            cov[a * v + b]
                        ),
                    );
                }
            }
        }
    }
    // The two sides' distinguished classes each form a common triple system.
    let mut side_sets: Vec<BTreeMap<Block, u32>> = vec![BTreeMap::new(), BTreeMap::new()];
    for k in 0..lr.pair_count() {
        for j in 0..2 {
            for b in lr.member(k, j).distinguished() {
                *side_sets[j].entry(b.clone()).or_insert(0) += 1;
            }
        }
    }
    if side_sets[0] != side_sets[1] {
        rep.push(
            opts,
            "the two sides' distinguished classes differ".to_string(),
        );
    }
    for (b, &m) in &side_sets[0] {
        if m != 1 {
            rep.push(
                opts,
                format!(
                    "distinguished triple {:?} appears {m} times on one side",
                    b.points()
                ),
            );
        }
    }
    let common: BlockMultiset = side_sets[0].keys().map(|b| (b.clone(), 1)).collect();
    let cov = pair_coverage(v, &common);
    for a in 0..v {
        for b in (a + 1)..v {
            if cov[a * v + b] != 1 {
                rep.push(
                    opts,
                    format!(
                        "common distinguished system: pair {{{a},{b}}} covered {} times",
                        cov[a * v + b]
                    ),
                );
            }
        }
    }
    // Global triple usage: common triples twice (both distinguished), others once.
    let mut usage: BTreeMap<Block, u32> = BTreeMap::new();
    for m in &lr.members {
        for b in m.blocks() {
            *usage.entry(b.clone()).or_insert(0) += 1;
        }
    }
    for a in 0..v as Point {
        for b in (a + 1)..v as Point {
            for c in (b + 1)..v as Point {
                let t = Block::new(vec![a, b, c]).unwrap();
                let got = usage.get(&t).copied().unwrap_or(0);
                let want = if side_sets[0].contains_key(&t) { 2 } else { 1 };
                if got != want {
                    rep.push(
                        opts,
                        format!(
                            "triple {:?} used in {got} member(s), expected {want}",
                            t.points()
                        ),
                    );
                }
            }
        }
    }
    rep
}

/// Checks a point-indexed frame: one class per point, the class of point `p`
/// is a transverse triple system of index one on the points outside `p`'s
/// group, and all classes together use every transverse triple exactly once.
pub fn verify_frame(f: &Frame, opts: &VerifyOpts) -> Report {
    let mut rep = Report::default();
    let n = f.point_count();
    if f.classes.len() != n {
        rep.push(
            opts,
            format!("{} classes for {n} points, expected one per point", f.classes.len()),
        );
        return rep;
    }
    for (p, class) in f.classes.iter().enumerate() {
        let own = p / f.g;
        // The class must avoid group `own` entirely and cover every
        // cross-group pair of the remaining points exactly once.
        let ms: BlockMultiset = class.iter().map(|b| (b.clone(), 1)).collect();
        for block in ms.blocks() {
            let mut groups: Vec<usize> = block.iter().map(|&q| q as usize / f.g).collect();
            groups.sort_unstable();
            groups.dedup();
            if block.len() != 3 || groups.len() != 3 || groups.contains(&own) {
                rep.push(
                    opts,
                    format!(
                        "class {p}: block {:?} is not transverse outside group {own}",
                        block.points()
                    ),
                );
            }
        }
        let cov = pair_coverage(n, &ms);
        for a in 0..n {
            for b in (a + 1)..n {
                let cross = a / f.g != b / f.g && a / f.g != own && b / f.g != own;
                let want = if cross { 1 } else { 0 };
                if cov[a * n + b] as usize != want {
                    rep.push(
                        opts,
                        format!(
                            "class {p}: pair {{{a},{b}}} covered {} times, expected {want}",
                            cov[a * n + b]
                        ),
                    );
                }
            }
        }
    }
    let mut usage: BTreeMap<Block, u32> = BTreeMap::new();
    for class in &f.classes {
        for b in class {
            *usage.entry(b.clone()).or_insert(0) += 1;
        }
    }
    for t in crate::core::all_transverse_triples(f.g, f.u) {
        if usage.get(&t).copied().unwrap_or(0) != 1 {
            rep.push(
                opts,
                format!(
                    "transverse triple {:?} used {} times across classes, expected 1",
                    t.points(),
                    usage.get(&t).copied().unwrap_or(0)
                ),
            );
        }
    }
    rep
}

/// Checks a fan: the triples cover every pair exactly once and the triples
/// and quadruples together cover every triple of the point set exactly once.
pub fn verify_fan(f: &FanDesign, opts: &VerifyOpts) -> Report {
    let mut rep = Report::default();
    let v = f.v;
    let ms: BlockMultiset = f.triples.iter().map(|b| (b.clone(), 1)).collect();
    let cov = pair_coverage(v, &ms);
    for a in 0..v {
        for b in (a + 1)..v {
            if cov[a * v + b] != 1 {
                rep.push(
                    opts,
                    format!(
                        "pair {{{a},{b}}} covered {} times by the triples, expected 1",
                        cov[a * v + b]
                    ),
                );
            }
        }
    }
    let mut triple_cov: BTreeMap<(Point, Point, Point), u32> = BTreeMap::new();
    for block in f.triples.iter().chain(f.quads.iter()) {
        let pts = block.points();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                for k in (j + 1)..pts.len() {
                    *triple_cov.entry((pts[i], pts[j], pts[k])).or_insert(0) += 1;
                }
            }
        }
    }
    for a in 0..v as Point {
        for b in (a + 1)..v as Point {
            for c in (b + 1)..v as Point {
                let got = triple_cov.get(&(a, b, c)).copied().unwrap_or(0);
                if got != 1 {
                    rep.push(
                        opts,
                        format!("triple {{{a},{b},{c}}} covered {got} times, expected 1"),
                    );
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{HoleProfile, LargeSet};

    fn cube3() -> LargeSet {
        // Members of the sum construction on groups {0,1,2} fibres of size 3:
        // point (a, f) is 3*f + a ... here laid out as fibre-major: group i
        // holds points 3i..3i+3, and {x, y, z} with x+y+z = r mod 3.
        let g = 3usize;
        let mut members = Vec::new();
        for r in 0..3u16 {
            let mut ms = BlockMultiset::new();
            for a in 0..3u16 {
                for b in 0..3u16 {
                    let c = (3 + r as i32 - a as i32 - b as i32).rem_euclid(3) as u16;
                    ms.add(Block::new(vec![a, 3 + b, 6 + c]).unwrap(), 1);
                }
            }
            members.push(ms);
        }
        LargeSet {
            lambda: 1,
            g,
            u: 3,
            members,
        }
    }

    #[test]
    fn sum_members_form_a_large_set() {
        let ls = cube3();
        let rep = verify_large_set(&ls, &VerifyOpts::default());
        assert!(rep.ok(), "{}", rep.summary());
    }

    #[test]
    fn a_moved_block_is_caught() {
        let mut ls = cube3();
        let b = ls.members[0].blocks().next().unwrap().clone();
        ls.members[0].remove(&b, 1);
        ls.members[1].add(b, 1);
        let rep = verify_large_set(&ls, &VerifyOpts::default());
        assert!(!rep.ok());
    }

    #[test]
    fn violation_lines_are_capped_but_counted() {
        let mut ls = cube3();
        ls.members.pop();
        let rep = verify_large_set(&ls, &VerifyOpts { max_violations: 3, threads: 1 });
        assert!(!rep.ok());
        assert_eq!(rep.violations.len(), 3);
        assert!(rep.total_violations > 3);
    }

    #[test]
    fn threaded_and_serial_reports_agree() {
        let mut ls = cube3();
        let b = ls.members[2].blocks().next().unwrap().clone();
        ls.members[2].remove(&b, 1);
        let serial = verify_large_set(&ls, &VerifyOpts { max_violations: 100, threads: 1 });
        let par = verify_large_set(&ls, &VerifyOpts { max_violations: 100, threads: 4 });
        assert_eq!(serial.total_violations, par.total_violations);
        assert_eq!(serial.violations, par.violations);
    }

    #[test]
    fn full_block_family_is_a_holed_large_set() {
        // v - 2 members, each holding the full block lambda = 1 times.
        let v = 5usize;
        let full = Block::new((0..v as Point).collect()).unwrap();
        let members = (0..v - 2)
            .map(|_| [(full.clone(), 1u32)].into_iter().collect())
            .collect();
        let ls = HoledLargeSet {
            s_size: v - 2,
            profile: HoleProfile::new(1, &[], &[v]),
            members,
        };
        let rep = verify_holed(&ls, &VerifyOpts::default());
        assert!(rep.ok(), "{}", rep.summary());
        let star = verify_star(&ls, &VerifyOpts::default());
        assert!(star.ok(), "{}", star.summary());
    }

    #[test]
    fn holed_profile_violations_are_reported() {
        let v = 5usize;
        let full = Block::new((0..v as Point).collect()).unwrap();
        let members: Vec<BlockMultiset> = (0..v - 2)
            .map(|_| [(full.clone(), 1u32)].into_iter().collect())
            .collect();
        let ls = HoledLargeSet {
            s_size: v - 2,
            profile: HoleProfile::new(1, &[], &[4]), // wrong declared size
            members,
        };
        let rep = verify_holed(&ls, &VerifyOpts::default());
        assert!(!rep.ok());
        assert!(rep.violations.iter().any(|l| l.contains("profile")));
    }
}
