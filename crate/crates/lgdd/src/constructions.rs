//! Operations that combine verified designs into larger ones: weighting,
//! member merging and unions, hole filling, point doubling and widening,
//! breaking large sets over group structures, the resolvable-system pipeline,
//! the fan assembly, and the 98-point assembly.
//!
//! Each operation validates the shape of its inputs and fails with a
//! descriptive error rather than producing an unverified object; end-to-end
//! validity is established by re-verifying outputs with [`crate::verifier`].

use crate::catalog;
use crate::core::{
    Block, BlockMultiset, CoreError, Digraph, FanDesign, FlatLargeSet, Frame, GoodLargeSet,
    GroupedDesign, HoledLargeSet, HoleProfile, LargeSet, LrDesign, Point, Quasigroup,
};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("no ingredient provided for block size {0}")]
    MissingIngredient(usize),
    #[error("ingredient mismatch: {0}")]
    IngredientMismatch(String),
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),
    #[error("internal construction error: {0}")]
    Internal(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

type Result<T> = std::result::Result<T, ConstructionError>;

fn map_block(b: &Block, f: impl Fn(Point) -> Point) -> Result<Block> {
    b.map(&f)
        .map_err(|e| ConstructionError::Internal(format!("relabelling collapsed a block: {e}")))
}

/// Recomputes the size profile of holed members from their actual blocks.
fn profile_of(lambda: usize, inf1: Point, inf2: Point, members: &[BlockMultiset]) -> HoleProfile {
    let mut k0 = BTreeSet::new();
    let mut k2 = BTreeSet::new();
    for member in members {
        for block in member.blocks() {
            match block.contains(inf1) as usize + block.contains(inf2) as usize {
                0 => {
                    k0.insert(block.len());
                }
                2 => {
                    k2.insert(block.len());
                }
                _ => {}
            }
        }
    }
    HoleProfile { lambda, k0, k2 }
}

/// Gives every point of a large set weight `m`: point `p` becomes the fibre
/// `{p*m, .., p*m + m - 1}` and every block is replaced, per new member
/// `(r, j)`, by the triples of the sum labelling on its three fibres whose
/// levels sum to `j` modulo `m`.
pub fn inflate(ls: &LargeSet, m: usize) -> Result<LargeSet> {
    if m == 0 {
        return Err(ConstructionError::BadParams("weight must be positive".into()));
    }
    let mut members = Vec::with_capacity(ls.members.len() * m);
    for r in 0..ls.members.len() {
        for j in 0..m {
            let mut ms = BlockMultiset::new();
            for (block, &mult) in ls.members[r].iter() {
                if block.len() != 3 {
                    return Err(ConstructionError::UnsupportedInput(
                        "weighting expects triple blocks".into(),
                    ));
                }
                let pts = block.points();
                for a in 0..m {
                    for b in 0..m {
                        let c = (2 * m + j - a - b) % m;
                        let new = Block::new(vec![
                            (pts[0] as usize * m + a) as Point,
                            (pts[1] as usize * m + b) as Point,
                            (pts[2] as usize * m + c) as Point,
                        ])?;
                        ms.add(new, mult);
                    }
                }
            }
            members.push(ms);
        }
    }
    Ok(LargeSet {
        lambda: ls.lambda,
        g: ls.g * m,
        u: ls.u,
        members,
    })
}

/// Merges each run of `t` consecutive members into one, multiplying the
/// index by `t`.  The member count must be divisible by `t`.
pub fn merge(ls: &LargeSet, t: usize) -> Result<LargeSet> {
    if t == 0 || ls.members.len() % t != 0 {
        return Err(ConstructionError::BadParams(format!(
            "cannot merge {} members in runs of {t}",
            ls.members.len()
        )));
    }
    let members = ls
        .members
        .chunks(t)
        .map(|chunk| {
            let mut ms = BlockMultiset::new();
            for member in chunk {
                ms.merge(member);
            }
            ms
        })
        .collect();
    Ok(LargeSet {
        lambda: ls.lambda * t,
        g: ls.g,
        u: ls.u,
        members,
    })
}

/// Unions the first `t` members into a single simple grouped design of index
/// `t` times the input index.  Returns the design and its index.
pub fn union_members(ls: &LargeSet, t: usize) -> Result<(GroupedDesign, usize)> {
    if t == 0 || t > ls.members.len() {
        return Err(ConstructionError::BadParams(format!(
            "cannot union {t} of {} members",
            ls.members.len()
        )));
    }
    let mut blocks = BlockMultiset::new();
    for member in &ls.members[..t] {
        blocks.merge(member);
    }
    Ok((
        GroupedDesign {
            g: ls.g,
            u: ls.u,
            blocks,
        },
        ls.lambda * t,
    ))
}

/// Forgets the two distinguished points of a holed large set.
pub fn flatten(h: &HoledLargeSet) -> FlatLargeSet {
    FlatLargeSet {
        v: h.v(),
        lambda: h.profile.lambda,
        members: h.members.clone(),
    }
}

/// Reads a triples-only flat large set as a large set over singleton groups.
pub fn flat_as_lgdd(f: &FlatLargeSet) -> Result<LargeSet> {
    for member in &f.members {
        if member.blocks().any(|b| b.len() != 3) {
            return Err(ConstructionError::UnsupportedInput(
                "flat large set still contains blocks larger than a triple".into(),
            ));
        }
    }
    Ok(LargeSet {
        lambda: f.lambda,
        g: 1,
        u: f.v,
        members: f.members.clone(),
    })
}

/// Reads a large set over singleton groups as a flat large set.
pub fn lgdd_as_flat(ls: &LargeSet) -> Result<FlatLargeSet> {
    if ls.g != 1 {
        return Err(ConstructionError::UnsupportedInput(
            "only singleton-group large sets flatten losslessly".into(),
        ));
    }
    Ok(FlatLargeSet {
        v: ls.u,
        lambda: ls.lambda,
        members: ls.members.clone(),
    })
}

/// One block holding exactly one distinguished point, matched to an arc of
/// its member's arc set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct MatchedArc {
    /// 1 or 2, naming which distinguished point the block holds.
    label: u8,
    tail: Point,
    head: Point,
}

/// Pairs every one-distinguished-point block of a member with an arc on the
/// same point pair.  Block lists are ordered by label and arc lists
/// lexicographically, so the pairing is deterministic.
fn match_block_arcs(
    member: &BlockMultiset,
    arcs: &Digraph,
    inf1: Point,
    inf2: Point,
) -> Result<Vec<MatchedArc>> {
    let mut by_pair: BTreeMap<(Point, Point), (Vec<u8>, Vec<(Point, Point)>)> = BTreeMap::new();
    for (block, &mult) in member.iter() {
        let h1 = block.contains(inf1);
        let h2 = block.contains(inf2);
        if h1 ^ h2 {
            if block.len() != 3 {
                return Err(ConstructionError::UnsupportedInput(format!(
                    "block {:?} holds one distinguished point but is not a triple",
                    block.points()
                )));
            }
            let inner: Vec<Point> = block.iter().copied().filter(|&p| p < inf1).collect();
            let entry = by_pair.entry((inner[0], inner[1])).or_default();
            for _ in 0..mult {
                entry.0.push(if h1 { 1 } else { 2 });
            }
        }
    }
    for &(x, y) in arcs {
        let key = (x.min(y), x.max(y));
        by_pair.entry(key).or_default().1.push((x, y));
    }
    let mut out = Vec::new();
    for ((x, y), (mut labels, mut pair_arcs)) in by_pair {
        labels.sort_unstable();
        pair_arcs.sort_unstable();
        if labels.len() != pair_arcs.len() {
            return Err(ConstructionError::IngredientMismatch(format!(
                "pair {{{x},{y}}} has {} one-distinguished blocks but {} arcs",
                labels.len(),
                pair_arcs.len()
            )));
        }
        for (label, (tail, head)) in labels.into_iter().zip(pair_arcs) {
            out.push(MatchedArc { label, tail, head });
        }
    }
    Ok(out)
}

/// Appearance bundles of one distinct block: `(member index, bundle count)`
/// in member order, where each bundle stands for `chunk` copies.
fn bundles_of(
    members: &[BlockMultiset],
    block: &Block,
    chunk: u32,
) -> Result<Vec<(usize, u32)>> {
    let mut out = Vec::new();
    for (r, member) in members.iter().enumerate() {
        let mult = member.multiplicity(block);
        if mult == 0 {
            continue;
        }
        if mult % chunk != 0 {
            return Err(ConstructionError::IngredientMismatch(format!(
                "block {:?} appears {mult} times in member {r}, not a multiple of {chunk}",
                block.points()
            )));
        }
        out.push((r, mult / chunk));
    }
    Ok(out)
}

fn check_flat_filler(k: usize, lambda_f: usize, filler: &FlatLargeSet) -> Result<()> {
    if filler.v != k || filler.lambda != lambda_f {
        return Err(ConstructionError::IngredientMismatch(format!(
            "filler for size {k} has v={} lambda={}, expected v={k} lambda={lambda_f}",
            filler.v, filler.lambda
        )));
    }
    if (k - 2) % lambda_f != 0 || filler.members.len() != (k - 2) / lambda_f {
        return Err(ConstructionError::IngredientMismatch(format!(
            "filler for size {k} has {} members, expected {}",
            filler.members.len(),
            (k - 2) / lambda_f
        )));
    }
    Ok(())
}

/// Replaces every block of size `k` holding no distinguished point, for each
/// size with a filler, by the members of a flat large set on its points.
/// Appearances are consumed in bundles of `lambda_f` copies, in member
/// order, matched to filler members in index order.
pub fn fill_pure(
    host: &HoledLargeSet,
    lambda_f: usize,
    fillers: &BTreeMap<usize, FlatLargeSet>,
) -> Result<HoledLargeSet> {
    if lambda_f == 0 {
        return Err(ConstructionError::BadParams("filler index must be positive".into()));
    }
    let inf1 = host.inf1();
    let inf2 = host.inf2();
    let mut members = host.members.clone();
    for (&k, filler) in fillers {
        check_flat_filler(k, lambda_f, filler)?;
        let targets: Vec<Block> = {
            let mut seen = BTreeSet::new();
            for member in &members {
                for block in member.blocks() {
                    if block.len() == k && !block.contains(inf1) && !block.contains(inf2) {
                        seen.insert(block.clone());
                    }
                }
            }
            seen.into_iter().collect()
        };
        for block in targets {
            let bundles = bundles_of(&members, &block, lambda_f as u32)?;
            let total: u32 = bundles.iter().map(|&(_, n)| n).sum();
            if total as usize != filler.members.len() {
                return Err(ConstructionError::IngredientMismatch(format!(
                    "block {:?} yields {total} bundles for {} filler members",
                    block.points(),
                    filler.members.len()
                )));
            }
            let pts = block.points().to_vec();
            let mut s = 0usize;
            for (r, n) in bundles {
                for _ in 0..n {
                    members[r].remove(&block, lambda_f as u32);
                    for (fb, &fm) in filler.members[s].iter() {
                        members[r].add(map_block(fb, |p| pts[p as usize])?, fm);
                    }
                    s += 1;
                }
            }
        }
    }
    Ok(HoledLargeSet {
        s_size: host.s_size,
        profile: profile_of(host.profile.lambda, inf1, inf2, &members),
        members,
    })
}

fn check_holed_filler(k: usize, lambda_f: usize, filler: &GoodLargeSet) -> Result<()> {
    if filler.ls.v() != k || filler.ls.profile.lambda != lambda_f {
        return Err(ConstructionError::IngredientMismatch(format!(
            "hole filler for size {k} has v={} lambda={}, expected v={k} lambda={lambda_f}",
            filler.ls.v(),
            filler.ls.profile.lambda
        )));
    }
    if (k - 2) % lambda_f != 0 || filler.ls.members.len() != (k - 2) / lambda_f {
        return Err(ConstructionError::IngredientMismatch(format!(
            "hole filler for size {k} has {} members, expected {}",
            filler.ls.members.len(),
            (k - 2) / lambda_f
        )));
    }
    Ok(())
}

/// Replaces every block of size `k` holding both distinguished points, for
/// each size with a filler, by the members of a holed large set on its
/// points (distinguished points onto distinguished points), merging the
/// fillers' arc sets into the host's.
pub fn fill_holes(
    host: &GoodLargeSet,
    lambda_f: usize,
    fillers: &BTreeMap<usize, GoodLargeSet>,
) -> Result<GoodLargeSet> {
    if lambda_f == 0 {
        return Err(ConstructionError::BadParams("filler index must be positive".into()));
    }
    let inf1 = host.ls.inf1();
    let inf2 = host.ls.inf2();
    let mut members = host.ls.members.clone();
    let mut digraphs = host.digraphs.clone();
    for (&k, filler) in fillers {
        check_holed_filler(k, lambda_f, filler)?;
        let f_inf1 = filler.ls.inf1();
        let targets: Vec<Block> = {
            let mut seen = BTreeSet::new();
            for member in &members {
                for block in member.blocks() {
                    if block.len() == k && block.contains(inf1) && block.contains(inf2) {
                        seen.insert(block.clone());
                    }
                }
            }
            seen.into_iter().collect()
        };
        for block in targets {
            let bundles = bundles_of(&members, &block, lambda_f as u32)?;
            let total: u32 = bundles.iter().map(|&(_, n)| n).sum();
            if total as usize != filler.ls.members.len() {
                return Err(ConstructionError::IngredientMismatch(format!(
                    "hole block {:?} yields {total} bundles for {} filler members",
                    block.points(),
                    filler.ls.members.len()
                )));
            }
            let interior: Vec<Point> =
                block.iter().copied().filter(|&p| p < inf1).collect();
            let map = |p: Point| -> Point {
                if p == f_inf1 {
                    inf1
                } else if p == f_inf1 + 1 {
                    inf2
                } else {
                    interior[p as usize]
                }
            };
            let mut s = 0usize;
            for (r, n) in bundles {
                for _ in 0..n {
                    members[r].remove(&block, lambda_f as u32);
                    for (fb, &fm) in filler.ls.members[s].iter() {
                        members[r].add(map_block(fb, map)?, fm);
                    }
                    for &(a, b) in &filler.digraphs[s] {
                        if !digraphs[r].insert((map(a), map(b))) {
                            return Err(ConstructionError::Internal(format!(
                                "filler arc ({a},{b}) collides in member {r}"
                            )));
                        }
                    }
                    s += 1;
                }
            }
        }
    }
    Ok(GoodLargeSet {
        ls: HoledLargeSet {
            s_size: host.ls.s_size,
            profile: profile_of(host.ls.profile.lambda, inf1, inf2, &members),
            members,
        },
        digraphs,
    })
}

/// Fills hole blocks and pure blocks in one pass; either map may be empty.
pub fn fill(
    host: &GoodLargeSet,
    lambda_f: usize,
    hole_fillers: &BTreeMap<usize, GoodLargeSet>,
    pure_fillers: &BTreeMap<usize, FlatLargeSet>,
) -> Result<GoodLargeSet> {
    let after_holes = fill_holes(host, lambda_f, hole_fillers)?;
    let filled = fill_pure(&after_holes.ls, lambda_f, pure_fillers)?;
    Ok(GoodLargeSet {
        ls: filled,
        digraphs: after_holes.digraphs,
    })
}

/// Doubles the interior of a good holed large set whose arc sets are
/// symmetric: each member splits in two on twice the points, preserving the
/// index.  Hole blocks widen over the fibres, pure triples break into sum
/// labellings, and each matched pair of one-distinguished blocks turns into
/// four distinguished triples plus one fibre quadruple.
pub fn double(gls: &GoodLargeSet) -> Result<HoledLargeSet> {
    let ls = &gls.ls;
    let s = ls.s_size;
    let lambda = ls.profile.lambda;
    let inf1 = ls.inf1();
    let inf2 = ls.inf2();
    for (r, arcs) in gls.digraphs.iter().enumerate() {
        for &(x, y) in arcs {
            if !arcs.contains(&(y, x)) {
                return Err(ConstructionError::UnsupportedInput(format!(
                    "member {r}: arc ({x},{y}) lacks its reverse; doubling needs symmetric arc sets"
                )));
            }
        }
    }
    let cube2 = catalog::lgdd_cube(2)
        .map_err(|e| ConstructionError::Internal(e.to_string()))?;
    let new_inf1 = (2 * s) as Point;
    let new_inf2 = (2 * s + 1) as Point;
    let fp = |p: Point, a: usize| -> Point { (p as usize * 2 + a) as Point };
    let mut members: Vec<BlockMultiset> =
        (0..2 * ls.members.len()).map(|_| BlockMultiset::new()).collect();
    let mut pure_slots: BTreeMap<Block, usize> = BTreeMap::new();
    for (r, member) in ls.members.iter().enumerate() {
        for (block, &mult) in member.iter() {
            let h1 = block.contains(inf1);
            let h2 = block.contains(inf2);
            if h1 && h2 {
                let mut pts = vec![new_inf1, new_inf2];
                for &p in block.iter().filter(|&&p| p < inf1) {
                    pts.push(fp(p, 0));
                    pts.push(fp(p, 1));
                }
                let wide = Block::new(pts)?;
                for i in 0..2 {
                    members[2 * r + i].add(wide.clone(), mult);
                }
            } else if !h1 && !h2 {
                if block.len() != 3 {
                    return Err(ConstructionError::UnsupportedInput(
                        "doubling expects pure blocks to be triples".into(),
                    ));
                }
                let pts = block.points().to_vec();
                for _copy in 0..mult {
                    let slot = {
                        let e = pure_slots.entry(block.clone()).or_insert(0);
                        let s0 = *e;
                        *e += 1;
                        s0
                    };
                    for i in 0..2 {
                        let ing = cube2.members.get(2 * slot + i).ok_or_else(|| {
                            ConstructionError::IngredientMismatch(format!(
                                "pure block {:?} appears more often than its expansion allows",
                                pts
                            ))
                        })?;
                        for (ib, &im) in ing.iter() {
                            members[2 * r + i].add(
                                map_block(ib, |q| fp(pts[q as usize / 2], q as usize % 2))?,
                                im,
                            );
                        }
                    }
                }
            }
        }
        for &(x, y) in &gls.digraphs[r] {
            if x > y {
                continue;
            }
            if member.multiplicity(&Block::new(vec![inf1, x, y])?) != 1
                || member.multiplicity(&Block::new(vec![inf2, x, y])?) != 1
            {
                return Err(ConstructionError::UnsupportedInput(format!(
                    "member {r}: edge {{{x},{y}}} needs both distinguished triples exactly once"
                )));
            }
            for i in 0..2usize {
                members[2 * r + i].add(
                    Block::new(vec![new_inf1, fp(x, 0), fp(y, i)])?,
                    1,
                );
                members[2 * r + i].add(
                    Block::new(vec![new_inf1, fp(x, 1), fp(y, (1 + i) % 2)])?,
                    1,
                );
                members[2 * r + i].add(
                    Block::new(vec![new_inf2, fp(x, 0), fp(y, (1 + i) % 2)])?,
                    1,
                );
                members[2 * r + i].add(
                    Block::new(vec![new_inf2, fp(x, 1), fp(y, i)])?,
                    1,
                );
                members[2 * r + i].add(
                    Block::new(vec![fp(x, 0), fp(x, 1), fp(y, 0), fp(y, 1)])?,
                    1,
                );
            }
        }
    }
    Ok(HoledLargeSet {
        s_size: 2 * s,
        profile: profile_of(lambda, new_inf1, new_inf2, &members),
        members,
    })
}

fn check_breakup_ingredient(k: usize, g: usize, lambda: usize, ing: &LargeSet) -> Result<()> {
    if ing.g != g || ing.u != k || ing.lambda != lambda {
        return Err(ConstructionError::IngredientMismatch(format!(
            "ingredient for size {k} has (lambda,g,u)=({},{},{}), expected ({lambda},{g},{k})",
            ing.lambda, ing.g, ing.u
        )));
    }
    if lambda == 0 || (g * (k - 2)) % lambda != 0 || ing.members.len() != g * (k - 2) / lambda {
        return Err(ConstructionError::IngredientMismatch(format!(
            "ingredient for size {k} has {} members, expected {}",
            ing.members.len(),
            g * (k - 2) / lambda
        )));
    }
    Ok(())
}

/// Shared engine for breaking a large set over a `g^v` group structure.
/// Each appearance bundle of a distinct block consumes `g` fresh ingredient
/// members, one per output sub-member.
fn breakup_core(
    v: usize,
    lambda: usize,
    members: &[BlockMultiset],
    g: usize,
    ingredients: &BTreeMap<usize, LargeSet>,
    bundle_for: impl Fn(usize) -> usize,
) -> Result<LargeSet> {
    if g == 0 {
        return Err(ConstructionError::BadParams("group size must be positive".into()));
    }
    for (&k, ing) in ingredients {
        check_breakup_ingredient(k, g, bundle_for(k), ing)?;
    }
    let mut out: Vec<BlockMultiset> =
        (0..members.len() * g).map(|_| BlockMultiset::new()).collect();
    let mut slots: BTreeMap<Block, usize> = BTreeMap::new();
    for (r, member) in members.iter().enumerate() {
        for (block, &mult) in member.iter() {
            let k = block.len();
            let ing = ingredients
                .get(&k)
                .ok_or(ConstructionError::MissingIngredient(k))?;
            let chunk = bundle_for(k) as u32;
            if mult % chunk != 0 {
                return Err(ConstructionError::IngredientMismatch(format!(
                    "block {:?} appears {mult} times in member {r}, not a multiple of {chunk}",
                    block.points()
                )));
            }
            let pts = block.points().to_vec();
            for _bundle in 0..(mult / chunk) {
                let s = {
                    let e = slots.entry(block.clone()).or_insert(0);
                    let s0 = *e;
                    *e += 1;
                    s0
                };
                for j in 0..g {
                    let ing_member = ing.members.get(g * s + j).ok_or_else(|| {
                        ConstructionError::IngredientMismatch(format!(
                            "block {:?} appears more often than its expansion allows",
                            pts
                        ))
                    })?;
                    for (ib, &im) in ing_member.iter() {
                        out[r * g + j].add(
                            map_block(ib, |q| {
                                (pts[q as usize / g] as usize * g + q as usize % g) as Point
                            })?,
                            im,
                        );
                    }
                }
            }
        }
    }
    for (block, &used) in &slots {
        let k = block.len();
        let want = ingredients[&k].members.len() / g;
        if used != want {
            return Err(ConstructionError::IngredientMismatch(format!(
                "block {:?} used {used} expansion bundles, expected {want}",
                block.points()
            )));
        }
    }
    Ok(LargeSet {
        lambda,
        g,
        u: v,
        members: out,
    })
}

/// Breaks a flat large set over a `g^v` group structure using index-one
/// ingredient large sets, one per block size, consuming one ingredient
/// member per block appearance and sub-member.
pub fn breakup(
    host: &FlatLargeSet,
    g: usize,
    ingredients: &BTreeMap<usize, LargeSet>,
) -> Result<LargeSet> {
    breakup_core(host.v, host.lambda, &host.members, g, ingredients, |_| 1)
}

/// Breaks a holed large set with the per-member multiplicity property over a
/// `g^v` group structure: triples consume index-one ingredients per
/// appearance, while blocks of size at least four consume ingredients of the
/// host's index per containing member.
pub fn breakup_star(
    host: &HoledLargeSet,
    g: usize,
    ingredients: &BTreeMap<usize, LargeSet>,
) -> Result<LargeSet> {
    let lambda = host.profile.lambda;
    breakup_core(
        host.v(),
        lambda,
        &host.members,
        g,
        ingredients,
        move |k| if k == 3 { 1 } else { lambda },
    )
}

/// Shared engine for widening the interior by an odd factor `w`.  Hole
/// blocks widen over their fibres into every sub-member, pure triples break
/// into sum labellings, and each matched block/arc pair produces the
/// distinguished triples `{inf, (x,a), (y,a+i)}` and the quasigroup triples
/// `{(x,a), (x,b), (y,a*b+i)}`.
fn expand_core(
    gls: &GoodLargeSet,
    w: usize,
    star: bool,
) -> Result<(HoledLargeSet, Vec<Digraph>)> {
    if w == 0 || w % 2 == 0 {
        return Err(ConstructionError::BadParams(format!(
            "widening factor must be odd, got {w}"
        )));
    }
    let ls = &gls.ls;
    let s = ls.s_size;
    let lambda = ls.profile.lambda;
    let inf1 = ls.inf1();
    let inf2 = ls.inf2();
    if ls.profile.k0 != [3].into_iter().collect::<BTreeSet<_>>() {
        return Err(ConstructionError::UnsupportedInput(
            "widening expects all undistinguished blocks to be triples".into(),
        ));
    }
    if star {
        if ls.profile.k2.iter().any(|&k| k < 4) {
            return Err(ConstructionError::UnsupportedInput(
                "the multiplicity-property widening expects hole blocks of size at least four"
                    .into(),
            ));
        }
    } else if ls.profile.k2 != [3].into_iter().collect::<BTreeSet<_>>() {
        return Err(ConstructionError::UnsupportedInput(
            "the plain widening expects hole blocks to be triples".into(),
        ));
    }
    let q = Quasigroup::idempotent_commutative(w)?;
    let cube_w = catalog::lgdd_cube(w)
        .map_err(|e| ConstructionError::Internal(e.to_string()))?;
    let new_inf1 = (s * w) as Point;
    let new_inf2 = (s * w + 1) as Point;
    let fp = |p: Point, a: usize| -> Point { (p as usize * w + a) as Point };
    let count = ls.members.len();
    let mut members: Vec<BlockMultiset> =
        (0..count * w).map(|_| BlockMultiset::new()).collect();
    let mut digraphs: Vec<Digraph> = (0..count * w).map(|_| Digraph::new()).collect();
    let mut pure_slots: BTreeMap<Block, usize> = BTreeMap::new();
    for (r, member) in ls.members.iter().enumerate() {
        for (block, &mult) in member.iter() {
            let h1 = block.contains(inf1);
            let h2 = block.contains(inf2);
            if h1 && h2 {
                if star && mult as usize != lambda {
                    return Err(ConstructionError::UnsupportedInput(format!(
                        "member {r}: hole block {:?} appears {mult} times, expected {lambda}",
                        block.points()
                    )));
                }
                let mut pts = vec![new_inf1, new_inf2];
                for &p in block.iter().filter(|&&p| p < inf1) {
                    for a in 0..w {
                        pts.push(fp(p, a));
                    }
                }
                let wide = Block::new(pts)?;
                for i in 0..w {
                    members[r * w + i].add(wide.clone(), mult);
                }
            } else if !h1 && !h2 {
                for _copy in 0..mult {
                    let slot = {
                        let e = pure_slots.entry(block.clone()).or_insert(0);
                        let s0 = *e;
                        *e += 1;
                        s0
                    };
                    let pts = block.points().to_vec();
                    for i in 0..w {
                        let ing = cube_w.members.get(w * slot + i).ok_or_else(|| {
                            ConstructionError::IngredientMismatch(format!(
                                "pure block {:?} appears more often than its expansion allows",
                                pts
                            ))
                        })?;
                        for (ib, &im) in ing.iter() {
                            members[r * w + i].add(
                                map_block(ib, |p| fp(pts[p as usize / w], p as usize % w))?,
                                im,
                            );
                        }
                    }
                }
            }
        }
        for arc in match_block_arcs(member, &gls.digraphs[r], inf1, inf2)? {
            let inf = if arc.label == 1 { new_inf1 } else { new_inf2 };
            let (x, y) = (arc.tail, arc.head);
            for i in 0..w {
                let target = r * w + i;
                for a in 0..w {
                    members[target].add(
                        Block::new(vec![inf, fp(x, a), fp(y, (a + i) % w)])?,
                        1,
                    );
                    digraphs[target].insert((fp(x, a), fp(y, (a + i) % w)));
                }
                for a in 0..w {
                    for b in (a + 1)..w {
                        members[target].add(
                            Block::new(vec![fp(x, a), fp(x, b), fp(y, (q.mul(a, b) + i) % w)])?,
                            1,
                        );
                    }
                }
            }
        }
    }
    Ok((
        HoledLargeSet {
            s_size: s * w,
            profile: profile_of(lambda, new_inf1, new_inf2, &members),
            members,
        },
        digraphs,
    ))
}

/// Widens a good holed large set with triple hole blocks by an odd factor,
/// producing a good holed large set with hole blocks of size `w + 2`.
pub fn expand_w(gls: &GoodLargeSet, w: usize) -> Result<GoodLargeSet> {
    let (ls, digraphs) = expand_core(gls, w, false)?;
    Ok(GoodLargeSet { ls, digraphs })
}

/// Widens a good holed large set with the per-member multiplicity property
/// and hole blocks of size at least four; the arc structure is consumed.
pub fn expand_w_star(gls: &GoodLargeSet, w: usize) -> Result<HoledLargeSet> {
    let (ls, _) = expand_core(gls, w, true)?;
    Ok(ls)
}

/// Shared engine for the resolvable-system pipeline.  Each member of the
/// input family contributes, per variant `i` (kept separate or merged),
/// one output member: distinguished classes widen into size-six blocks,
/// other classes break into sum labellings, and blocks through the
/// distinguished input point become matched distinguished triples and arcs.
fn clr_core(lr: &LrDesign, star: bool) -> Result<GoodLargeSet> {
    let n = lr.v;
    if n < 3 || n % 2 == 0 || lr.members.len() != n - 1 {
        return Err(ConstructionError::UnsupportedInput(format!(
            "resolvable family on {n} points with {} members is not pair-indexed",
            lr.members.len()
        )));
    }
    let inf_lr = (n - 1) as Point;
    let s = 2 * (n - 1);
    let pc = lr.pair_count();
    let lambda = if star { 2 } else { 1 };
    let new_inf1 = s as Point;
    let new_inf2 = (s + 1) as Point;
    let fp = |p: Point, a: usize| -> Point { (p as usize * 2 + a) as Point };
    let count = if star { 2 * pc } else { 4 * pc };
    let mut members: Vec<BlockMultiset> = (0..count).map(|_| BlockMultiset::new()).collect();
    let mut digraphs: Vec<Digraph> = (0..count).map(|_| Digraph::new()).collect();
    let cube2 = catalog::lgdd_cube(2)
        .map_err(|e| ConstructionError::Internal(e.to_string()))?;
    for k in 0..pc {
        for j in 0..2 {
            let m = lr.member(k, j);
            if m.classes.is_empty() {
                return Err(ConstructionError::UnsupportedInput(
                    "member without a distinguished class".into(),
                ));
            }
            for i in 0..2usize {
                let target = if star {
                    j * pc + k
                } else {
                    (i * 2 + j) * pc + k
                };
                for (ci, class) in m.classes.iter().enumerate() {
                    for block in class {
                        if block.len() != 3 {
                            return Err(ConstructionError::UnsupportedInput(
                                "expected triple blocks".into(),
                            ));
                        }
                        let holds_inf = block.contains(inf_lr);
                        if ci == 0 {
                            let mut pts = Vec::new();
                            if holds_inf {
                                pts.push(new_inf1);
                                pts.push(new_inf2);
                            }
                            for &p in block.iter().filter(|&&p| p != inf_lr) {
                                pts.push(fp(p, 0));
                                pts.push(fp(p, 1));
                            }
                            members[target].add(Block::new(pts)?, 1);
                        } else if holds_inf {
                            let inner: Vec<Point> =
                                block.iter().copied().filter(|&p| p != inf_lr).collect();
                            let (x, y) = (inner[0], inner[1]);
                            // Variant i pairs the first distinguished point
                            // with the level-preserving diagonal (i = 0) or
                            // the level-swapping one (i = 1).
                            let d = i;
                            for a in 0..2usize {
                                members[target].add(
                                    Block::new(vec![new_inf1, fp(x, a), fp(y, (a + d) % 2)])?,
                                    1,
                                );
                                members[target].add(
                                    Block::new(vec![new_inf2, fp(x, a), fp(y, (a + d + 1) % 2)])?,
                                    1,
                                );
                                digraphs[target].insert((fp(x, a), fp(y, (a + d) % 2)));
                                digraphs[target].insert((fp(y, (a + d + 1) % 2), fp(x, a)));
                            }
                        } else {
                            let pts = block.points().to_vec();
                            for (ib, &im) in cube2.members[i].iter() {
                                members[target].add(
                                    map_block(ib, |q| fp(pts[q as usize / 2], q as usize % 2))?,
                                    im,
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(GoodLargeSet {
        ls: HoledLargeSet {
            s_size: s,
            profile: profile_of(lambda, new_inf1, new_inf2, &members),
            members,
        },
        digraphs,
    })
}

/// The index-one output of the resolvable-system pipeline: one member per
/// variant and input member.
pub fn clr(lr: &LrDesign) -> Result<GoodLargeSet> {
    clr_core(lr, false)
}

/// The index-two output of the resolvable-system pipeline: the two variants
/// of each input member are merged, yielding the per-member multiplicity
/// property.
pub fn clr_star(lr: &LrDesign) -> Result<GoodLargeSet> {
    clr_core(lr, true)
}

/// Assembles a good holed large set on `fan.v * m + 2` points from a fan, a
/// three-member ingredient whose members' hole blocks sweep the interior
/// fibres, and (when the fan has quadruples) a point-indexed frame.  Output
/// member `x` combines the ingredient members of all fan triples through
/// `x` with the frame classes of all quadruples through `x`.
pub fn pcs(
    fan: &FanDesign,
    ingredient: &GoodLargeSet,
    frame: Option<&Frame>,
) -> Result<GoodLargeSet> {
    let ils = &ingredient.ls;
    if ils.s_size % 3 != 0 {
        return Err(ConstructionError::IngredientMismatch(
            "ingredient interior must split into three fibres".into(),
        ));
    }
    let m = ils.s_size / 3;
    if ils.profile.lambda != m || ils.members.len() != 3 {
        return Err(ConstructionError::IngredientMismatch(format!(
            "ingredient has lambda={} and {} members, expected lambda={m} and 3",
            ils.profile.lambda,
            ils.members.len()
        )));
    }
    let i_inf1 = ils.inf1();
    let i_inf2 = ils.inf2();
    // Member r's unique hole block must cover the residue-r fibre.
    for (r, member) in ils.members.iter().enumerate() {
        let holes: Vec<&Block> = member
            .blocks()
            .filter(|b| b.contains(i_inf1) && b.contains(i_inf2))
            .collect();
        let expected: Vec<Point> = (0..m)
            .map(|j| (3 * j + r) as Point)
            .chain([i_inf1, i_inf2])
            .collect();
        let expected = Block::new(expected)?;
        if holes.len() != 1
            || *holes[0] != expected
            || member.multiplicity(&expected) as usize != m
        {
            return Err(ConstructionError::IngredientMismatch(format!(
                "ingredient member {r} does not hold the residue-{r} fibre hole block {m} times"
            )));
        }
    }
    if !fan.quads.is_empty() {
        let f = frame.ok_or(ConstructionError::BadParams(
            "fan has quadruples but no frame was provided".into(),
        ))?;
        if f.g != m || f.u != 4 {
            return Err(ConstructionError::IngredientMismatch(format!(
                "frame has type {}^{}, expected {m}^4",
                f.g, f.u
            )));
        }
    }
    let v_fan = fan.v;
    let s = v_fan * m;
    let new_inf1 = s as Point;
    let new_inf2 = (s + 1) as Point;
    let fp = |p: Point, a: usize| -> Point { (p as usize * m + a) as Point };
    let mut members: Vec<BlockMultiset> = (0..v_fan).map(|_| BlockMultiset::new()).collect();
    let mut digraphs: Vec<Digraph> = (0..v_fan).map(|_| Digraph::new()).collect();
    for x in 0..v_fan as Point {
        let target = x as usize;
        let own_hole = Block::new(
            (0..m)
                .map(|a| fp(x, a))
                .chain([new_inf1, new_inf2])
                .collect(),
        )?;
        members[target].add(own_hole, m as u32);
        for block in fan.triples.iter().filter(|b| b.contains(x)) {
            let pts = block.points().to_vec();
            let r = pts.iter().position(|&p| p == x).unwrap();
            let map = |p: Point| -> Point {
                if p == i_inf1 {
                    new_inf1
                } else if p == i_inf2 {
                    new_inf2
                } else {
                    fp(pts[p as usize % 3], p as usize / 3)
                }
            };
            for (ib, &im) in ingredient.ls.members[r].iter() {
                if ib.contains(i_inf1) && ib.contains(i_inf2) {
                    continue;
                }
                members[target].add(map_block(ib, map)?, im);
            }
            for &(a, b) in &ingredient.digraphs[r] {
                if !digraphs[target].insert((map(a), map(b))) {
                    return Err(ConstructionError::Internal(format!(
                        "ingredient arc ({a},{b}) collides in member {x}"
                    )));
                }
            }
        }
        for quad in fan.quads.iter().filter(|b| b.contains(x)) {
            let f = frame.unwrap();
            let pts = quad.points().to_vec();
            let pos = pts.iter().position(|&p| p == x).unwrap();
            for iq in 0..m {
                for block in &f.classes[pos * m + iq] {
                    members[target].add(
                        map_block(block, |q| fp(pts[q as usize / m], q as usize % m))?,
                        1,
                    );
                }
            }
        }
    }
    Ok(GoodLargeSet {
        ls: HoledLargeSet {
            s_size: s,
            profile: profile_of(m, new_inf1, new_inf2, &members),
            members,
        },
        digraphs,
    })
}

/// Assembles the 98-point large set with the multiplicity property from the
/// 18-point good large set, index-one ingredients of types `6^3` and `6^6`,
/// and the three offset tables: every input member splits into three, the
/// interior widens by six, and matched block/arc pairs expand through the
/// tables.  Fibre quadruples are then filled with the four-point triple
/// family.
pub fn build_ls98(
    gls18: &GoodLargeSet,
    lgdd63: &LargeSet,
    lgdd66: &LargeSet,
    tables: &[Vec<[u16; 3]>; 3],
) -> Result<HoledLargeSet> {
    let ls = &gls18.ls;
    if ls.s_size != 16 || ls.profile.lambda != 1 {
        return Err(ConstructionError::IngredientMismatch(format!(
            "expected an index-one input with 16 interior points, got s={} lambda={}",
            ls.s_size, ls.profile.lambda
        )));
    }
    check_breakup_ingredient(3, 6, 1, lgdd63)?;
    check_breakup_ingredient(6, 6, 1, lgdd66)?;
    for t in tables {
        if t.len() != 12 || t.iter().any(|row| row.iter().any(|&e| e >= 6)) {
            return Err(ConstructionError::IngredientMismatch(
                "offset tables must hold twelve rows over Z6".into(),
            ));
        }
    }
    let inf1 = ls.inf1();
    let inf2 = ls.inf2();
    let s = 16 * 6;
    let new_inf1 = s as Point;
    let new_inf2 = (s + 1) as Point;
    let fp = |p: Point, a: usize| -> Point { (p as usize * 6 + a % 6) as Point };
    let count = ls.members.len();
    let mut members: Vec<BlockMultiset> =
        (0..count * 3).map(|_| BlockMultiset::new()).collect();
    let mut pure_slots: BTreeMap<Block, usize> = BTreeMap::new();
    for (r, member) in ls.members.iter().enumerate() {
        for (block, &mult) in member.iter() {
            let h1 = block.contains(inf1);
            let h2 = block.contains(inf2);
            if h1 && h2 {
                let mut pts = vec![new_inf1, new_inf2];
                for &p in block.iter().filter(|&&p| p < inf1) {
                    for a in 0..6 {
                        pts.push(fp(p, a));
                    }
                }
                let wide = Block::new(pts)?;
                for i in 0..3 {
                    members[3 * r + i].add(wide.clone(), 2 * mult);
                }
            } else if !h1 && !h2 {
                let ing = match block.len() {
                    3 => lgdd63,
                    6 => lgdd66,
                    k => {
                        return Err(ConstructionError::MissingIngredient(k));
                    }
                };
                let pts = block.points().to_vec();
                for _copy in 0..mult {
                    let slot = {
                        let e = pure_slots.entry(block.clone()).or_insert(0);
                        let s0 = *e;
                        *e += 1;
                        s0
                    };
                    for i in 0..3usize {
                        for half in 0..2usize {
                            let ing_member =
                                ing.members.get(6 * slot + 2 * i + half).ok_or_else(|| {
                                    ConstructionError::IngredientMismatch(format!(
                                        "pure block {:?} appears more often than its expansion allows",
                                        pts
                                    ))
                                })?;
                            for (ib, &im) in ing_member.iter() {
                                members[3 * r + i].add(
                                    map_block(ib, |q| fp(pts[q as usize / 6], q as usize % 6))?,
                                    im,
                                );
                            }
                        }
                    }
                }
            }
        }
        for arc in match_block_arcs(member, &gls18.digraphs[r], inf1, inf2)? {
            let (x, y) = (arc.tail, arc.head);
            for i in 0..3usize {
                let target = 3 * r + i;
                for row in &tables[i] {
                    let (a, b, c) = (row[0] as usize, row[1] as usize, row[2] as usize);
                    members[target].add(
                        Block::new(vec![fp(x, a), fp(y, b), fp(y, c)])?,
                        1,
                    );
                    members[target].add(
                        Block::new(vec![fp(x, a + 3), fp(y, b + 3), fp(y, c + 3)])?,
                        1,
                    );
                }
                if arc.label == 1 {
                    for a in 0..6usize {
                        members[target].add(
                            Block::new(vec![
                                fp(x, a),
                                fp(x, a + 3),
                                fp(y, a + i),
                                fp(y, a + i + 3),
                            ])?,
                            1,
                        );
                    }
                } else {
                    for a in 0..6usize {
                        for inf in [new_inf1, new_inf2] {
                            members[target].add(
                                Block::new(vec![inf, fp(x, a), fp(y, a + i)])?,
                                1,
                            );
                            members[target].add(
                                Block::new(vec![inf, fp(x, a), fp(y, a + i + 3)])?,
                                1,
                            );
                        }
                    }
                }
            }
        }
    }
    let assembled = HoledLargeSet {
        s_size: s,
        profile: profile_of(2, new_inf1, new_inf2, &members),
        members,
    };
    let filler = catalog::all_triples_ls(4)
        .map_err(|e| ConstructionError::Internal(e.to_string()))?;
    fill_pure(&assembled, 2, &[(4, filler)].into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{base_gls, lgdd_cube, BaseGlsName};
    use crate::core::LrMember;
    use crate::verifier::{
        verify_flat, verify_gdd, verify_good, verify_holed, verify_large_set, verify_lr,
        verify_star, Report, VerifyOpts,
    };

    fn assert_ok(rep: &Report) {
        assert!(rep.ok(), "{}", rep.summary());
    }

    fn opts() -> VerifyOpts {
        VerifyOpts::default()
    }

    #[test]
    fn weighting_scales_group_size() {
        let ls = inflate(&lgdd_cube(3).unwrap(), 2).unwrap();
        assert_eq!((ls.lambda, ls.g, ls.u), (1, 6, 3));
        assert_eq!(ls.members.len(), 6);
        assert_ok(&verify_large_set(&ls, &opts()));
    }

    #[test]
    fn merging_consecutive_members_multiplies_the_index() {
        let ls = merge(&lgdd_cube(4).unwrap(), 2).unwrap();
        assert_eq!((ls.lambda, ls.g, ls.u), (2, 4, 3));
        assert_eq!(ls.members.len(), 2);
        assert_ok(&verify_large_set(&ls, &opts()));
        assert!(merge(&lgdd_cube(3).unwrap(), 2).is_err());
    }

    #[test]
    fn unioned_members_form_a_simple_design() {
        let (d, lambda) = union_members(&lgdd_cube(3).unwrap(), 3).unwrap();
        assert_eq!(lambda, 3);
        assert_ok(&verify_gdd(&d, lambda, true, &opts()));
    }

    #[test]
    fn flattening_and_reading_as_singleton_groups() {
        let v5 = base_gls(BaseGlsName::V5).unwrap().design;
        let flat = flatten(&v5.ls);
        assert_ok(&verify_flat(&flat, &opts()));
        let ls = flat_as_lgdd(&flat).unwrap();
        assert_eq!((ls.lambda, ls.g, ls.u), (3, 1, 5));
        assert_ok(&verify_large_set(&ls, &opts()));
        let back = lgdd_as_flat(&ls).unwrap();
        assert_eq!(back, flat);
    }

    #[test]
    fn filling_hole_blocks_turns_them_into_triples() {
        let v11 = base_gls(BaseGlsName::V11).unwrap().design;
        let v5 = base_gls(BaseGlsName::V5).unwrap().design;
        let filled = fill(
            &v11,
            3,
            &[(5, v5)].into_iter().collect(),
            &BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(filled.ls.profile.k2, [3].into_iter().collect());
        assert_ok(&verify_good(&filled, false, &opts()));
    }

    #[test]
    fn doubling_the_five_point_set() {
        let v5 = base_gls(BaseGlsName::V5).unwrap().design;
        let doubled = double(&v5).unwrap();
        assert_eq!(doubled.s_size, 6);
        assert_eq!(doubled.members.len(), 2);
        assert_eq!(doubled.profile.k0, [3, 4].into_iter().collect());
        assert_eq!(doubled.profile.k2, [4].into_iter().collect());
        assert_ok(&verify_holed(&doubled, &opts()));
    }

    #[test]
    fn doubling_rejects_unbalanced_arc_sets() {
        let v6 = base_gls(BaseGlsName::V6).unwrap().design;
        assert!(matches!(
            double(&v6),
            Err(ConstructionError::UnsupportedInput(_))
        ));
    }

    #[test]
    fn breaking_a_flat_set_over_groups() {
        let v11 = base_gls(BaseGlsName::V11).unwrap().design;
        let v5 = base_gls(BaseGlsName::V5).unwrap().design;
        let filled = fill(&v11, 3, &[(5, v5)].into_iter().collect(), &BTreeMap::new()).unwrap();
        let flat = flatten(&filled.ls);
        for g in [1usize, 2] {
            let ls = breakup(
                &flat,
                g,
                &[(3, lgdd_cube(g).unwrap())].into_iter().collect(),
            )
            .unwrap();
            assert_eq!((ls.lambda, ls.g, ls.u), (3, g, 11));
            assert_ok(&verify_large_set(&ls, &opts()));
        }
    }

    #[test]
    fn widening_the_six_point_set_by_three() {
        let v6 = base_gls(BaseGlsName::V6).unwrap().design;
        let wide = expand_w(&v6, 3).unwrap();
        assert_eq!(wide.ls.s_size, 12);
        assert_eq!(wide.ls.members.len(), 6);
        assert_eq!(wide.ls.profile.k2, [5].into_iter().collect());
        assert_ok(&verify_good(&wide, false, &opts()));
    }

    #[test]
    fn widening_with_the_multiplicity_property() {
        let v11 = base_gls(BaseGlsName::V11).unwrap().design;
        let wide = expand_w_star(&v11, 3).unwrap();
        assert_eq!(wide.s_size, 27);
        assert_eq!(wide.members.len(), 9);
        assert_eq!(wide.profile.k2, [11].into_iter().collect());
        assert_ok(&verify_holed(&wide, &opts()));
        assert_ok(&verify_star(&wide, &opts()));
    }

    fn tiny_lr() -> LrDesign {
        let m = LrMember {
            classes: vec![vec![Block::new(vec![0, 1, 2]).unwrap()]],
        };
        LrDesign {
            v: 3,
            members: vec![m.clone(), m],
        }
    }

    #[test]
    fn the_pipeline_accepts_the_trivial_resolvable_family() {
        let lr = tiny_lr();
        assert_ok(&verify_lr(&lr, &opts()));
        let plain = clr(&lr).unwrap();
        assert_eq!(plain.ls.s_size, 4);
        assert_eq!(plain.ls.members.len(), 4);
        assert_ok(&verify_good(&plain, false, &opts()));
        let star = clr_star(&lr).unwrap();
        assert_eq!(star.ls.members.len(), 2);
        assert_eq!(star.ls.profile.lambda, 2);
        assert_ok(&verify_good(&star, true, &opts()));
    }

    #[test]
    fn fan_assembly_reproduces_an_eleven_point_set() {
        let v11 = base_gls(BaseGlsName::V11).unwrap().design;
        let fan = crate::catalog::fan3();
        let out = pcs(&fan, &v11, None).unwrap();
        assert_eq!(out.ls.s_size, 9);
        assert_eq!(out.ls.members.len(), 3);
        assert_eq!(out.ls.profile.k2, [5].into_iter().collect());
        assert_ok(&verify_good(&out, true, &opts()));
    }
}
