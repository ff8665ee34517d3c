//! Routes requested parameters to a construction pipeline and executes it
//! with verification after every intermediate step.
//!
//! Planning is pure: it inspects admissibility and the fixed menu of base
//! families and returns a recipe tree (or the reason none exists).  Running
//! a recipe materialises every node, checks it with the independent
//! verifier, and records a transcript of sources and checks.

use crate::catalog::{base_gls, develop_cyclic, lgdd_complete, lgdd_cube, BaseGlsName, Loaded};
use crate::constructions::{
    breakup, double, expand_w, fill, flat_as_lgdd, flatten, inflate, merge, union_members,
};
use crate::core::{
    admissible_lgdd, admissible_simple_gdd, FlatLargeSet, GroupedDesign, LargeSet, MAX_POINTS,
};
use crate::search::{find_or_search, Artifact, CertStore, SearchConfig, SearchKind, Source};
use crate::verifier::{verify_flat, verify_gdd, verify_good, verify_holed, verify_large_set, VerifyOpts};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Why a request could not be turned into a design.
#[derive(Debug, Clone, Error)]
pub enum PlanFailure {
    /// The parameters fail a counting condition (or are a known exception):
    /// no such design exists.
    #[error("no such design: {}", reasons.join("; "))]
    Nonexistent { reasons: Vec<String> },
    /// The route exists in principle but an ingredient is out of reach.
    #[error("blocked: {what}")]
    Blocked { what: String, notes: Vec<String> },
    /// An internal step misbehaved; this indicates a bug, not a property of
    /// the parameters.
    #[error("internal failure: {0}")]
    Broken(String),
}

/// Flat large sets the router can produce, used as hosts for group
/// refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlatSource {
    /// Index 3 on five points, from the catalogued five-point set.
    Five,
    /// Index 2 on six points, from the catalogued six-point set.
    Six,
    /// Index 2 on ten points, from the catalogued ten-point set.
    Ten,
    /// Index 3 on eleven points: the catalogued eleven-point set with its
    /// five-point holes filled.
    Eleven,
    /// Index 3 on eight points with block sizes 3 and 4, by doubling the
    /// five-point set.
    DoubledFive,
    /// Index 2 on fourteen points with block sizes 3 and 5, by tripling the
    /// six-point set.
    WidenedSix,
}

/// A construction pipeline for a large set.
#[derive(Debug, Clone, PartialEq)]
pub enum Recipe {
    /// Sum-labelled triples over three groups: index 1, u = 3.
    Cube { g: usize },
    /// The single member holding every transverse triple.
    Complete { g: usize, u: usize },
    /// The catalogued cyclically developed index-2 set on eight groups of
    /// three.
    DevelopCyclic,
    /// A searched (or certificate-backed) design.
    Search(SearchKind),
    /// Multiply every group by `m`.
    Inflate { m: usize, base: Box<Recipe> },
    /// Fuse runs of `t` consecutive members.
    Merge { t: usize, base: Box<Recipe> },
    /// Read a flat set over singleton groups.
    FlatAsLgdd(FlatSource),
    /// Refine a flat set over groups of size `g`, substituting an
    /// ingredient large set for each block size.
    Breakup {
        g: usize,
        flat: FlatSource,
        fillers: BTreeMap<usize, Recipe>,
    },
}

/// A construction pipeline for a single simple design.
#[derive(Debug, Clone, PartialEq)]
pub enum SimpleRecipe {
    /// Union the first `t` members of a large set.
    UnionMembers { t: usize, base: Recipe },
    /// Search for the design directly.
    DirectSearch { lambda: usize, g: usize, u: usize },
}

/// One displayable node of a plan; `inputs` are the sub-plans consumed.
#[derive(Debug, Clone, Serialize)]
pub struct PlanStep {
    pub inputs: Vec<PlanStep>,
    pub op: String,
    pub yields: String,
}

fn leaf(op: &str, yields: String) -> PlanStep {
    PlanStep {
        inputs: Vec::new(),
        op: op.to_string(),
        yields,
    }
}

fn lgdd_name(lambda: usize, g: usize, u: usize) -> String {
    format!("(3,{lambda})-LGDD({g}^{u})")
}

impl FlatSource {
    /// (index, points, block sizes) of the flat set.
    fn shape(&self) -> (usize, usize, &'static [usize]) {
        match self {
            FlatSource::Five => (3, 5, &[3]),
            FlatSource::Six => (2, 6, &[3]),
            FlatSource::Ten => (2, 10, &[3]),
            FlatSource::Eleven => (3, 11, &[3]),
            FlatSource::DoubledFive => (3, 8, &[3, 4]),
            FlatSource::WidenedSix => (2, 14, &[3, 5]),
        }
    }

    fn describe(&self) -> PlanStep {
        let (lambda, v, _) = self.shape();
        let op = match self {
            FlatSource::Five => "flatten catalogued five-point set",
            FlatSource::Six => "flatten catalogued six-point set",
            FlatSource::Ten => "flatten catalogued ten-point set",
            FlatSource::Eleven => "fill and flatten catalogued eleven-point set",
            FlatSource::DoubledFive => "double and flatten catalogued five-point set",
            FlatSource::WidenedSix => "triple and flatten catalogued six-point set",
        };
        leaf(op, format!("flat large set, index {lambda}, {v} points"))
    }
}

impl Recipe {
    /// Parameters of the large set this recipe yields.
    pub fn shape(&self) -> (usize, usize, usize) {
        match self {
            Recipe::Cube { g } => (1, *g, 3),
            Recipe::Complete { g, u } => (g * (u - 2), *g, *u),
            Recipe::DevelopCyclic => (2, 3, 8),
            Recipe::Search(SearchKind::Lgdd { lambda, g, u }) => (*lambda, *g, *u),
            Recipe::Search(_) => unreachable!("only large-set searches appear in recipes"),
            Recipe::Inflate { m, base } => {
                let (l, g, u) = base.shape();
                (l, g * m, u)
            }
            Recipe::Merge { t, base } => {
                let (l, g, u) = base.shape();
                (l * t, g, u)
            }
            Recipe::FlatAsLgdd(src) => {
                let (l, v, _) = src.shape();
                (l, 1, v)
            }
            Recipe::Breakup { g, flat, .. } => {
                let (l, v, _) = flat.shape();
                (l, *g, v)
            }
        }
    }

    pub fn describe(&self) -> PlanStep {
        let (lambda, g, u) = self.shape();
        let yields = lgdd_name(lambda, g, u);
        match self {
            Recipe::Cube { .. } => leaf("sum-labelled cube", yields),
            Recipe::Complete { .. } => leaf("all transverse triples", yields),
            Recipe::DevelopCyclic => leaf("develop catalogued base blocks", yields),
            Recipe::Search(kind) => leaf(&format!("search {}", kind.name()), yields),
            Recipe::Inflate { m, base } => PlanStep {
                inputs: vec![base.describe()],
                op: format!("inflate by {m}"),
                yields,
            },
            Recipe::Merge { t, base } => PlanStep {
                inputs: vec![base.describe()],
                op: format!("merge runs of {t}"),
                yields,
            },
            Recipe::FlatAsLgdd(src) => PlanStep {
                inputs: vec![src.describe()],
                op: "read over singleton groups".to_string(),
                yields,
            },
            Recipe::Breakup { g, flat, fillers } => {
                let mut inputs = vec![flat.describe()];
                for (k, f) in fillers {
                    let mut step = f.describe();
                    step.op = format!("[size-{k} filler] {}", step.op);
                    inputs.push(step);
                }
                PlanStep {
                    inputs,
                    op: format!("refine over groups of {g}"),
                    yields,
                }
            }
        }
    }
}

impl SimpleRecipe {
    pub fn describe(&self) -> PlanStep {
        match self {
            SimpleRecipe::UnionMembers { t, base } => {
                let (l, g, u) = base.shape();
                PlanStep {
                    inputs: vec![base.describe()],
                    op: format!("union first {t} members"),
                    yields: format!("simple (3,{})-GDD({g}^{u})", l * t),
                }
            }
            SimpleRecipe::DirectSearch { lambda, g, u } => leaf(
                &format!(
                    "search {}",
                    SearchKind::SimpleGdd {
                        lambda: *lambda,
                        g: *g,
                        u: *u
                    }
                    .name()
                ),
                format!("simple (3,{lambda})-GDD({g}^{u})"),
            ),
        }
    }
}

/// Searches small enough to attempt: the point count must stay tiny and the
/// parameters admissible.
fn searchable_lgdd(lambda: usize, g: usize, u: usize) -> bool {
    g * u <= 15 && u <= 9 && admissible_lgdd(lambda, g, u).admissible
}

/// Index-1 route: direct for three groups, otherwise inflate a searchable
/// sub-group base.
fn unit_route_1(g: usize, u: usize) -> Result<Recipe, PlanFailure> {
    if u == 3 {
        return Ok(Recipe::Cube { g });
    }
    for g0 in 1..=g {
        if g % g0 != 0 || !searchable_lgdd(1, g0, u) {
            continue;
        }
        let base = Recipe::Search(SearchKind::Lgdd { lambda: 1, g: g0, u });
        return Ok(if g0 == g {
            base
        } else {
            Recipe::Inflate {
                m: g / g0,
                base: Box::new(base),
            }
        });
    }
    Err(PlanFailure::Blocked {
        what: format!("no searchable base for {}", lgdd_name(1, g, u)),
        notes: Vec::new(),
    })
}

fn inflate_from(base: Recipe, m: usize) -> Recipe {
    if m == 1 {
        base
    } else {
        Recipe::Inflate {
            m,
            base: Box::new(base),
        }
    }
}

/// Index-2 route over the flat catalogue (u = 0, 4 mod 6) or the
/// three-per-group bases (u = 2 mod 6).
fn unit_route_2(g: usize, u: usize) -> Result<Recipe, PlanFailure> {
    match u % 6 {
        0 | 4 => {
            let base = match u {
                4 => Recipe::Complete { g: 1, u: 4 },
                6 => Recipe::FlatAsLgdd(FlatSource::Six),
                10 => Recipe::FlatAsLgdd(FlatSource::Ten),
                12 => Recipe::Search(SearchKind::Lgdd {
                    lambda: 2,
                    g: 1,
                    u: 12,
                }),
                _ => {
                    return Err(PlanFailure::Blocked {
                        what: format!("no index-2 base on {u} singleton groups"),
                        notes: Vec::new(),
                    })
                }
            };
            Ok(inflate_from(base, g))
        }
        2 if g % 3 == 0 => {
            let base = match u {
                8 => Recipe::DevelopCyclic,
                14 => Recipe::Breakup {
                    g: 3,
                    flat: FlatSource::WidenedSix,
                    fillers: BTreeMap::from([
                        (3, Recipe::Cube { g: 3 }),
                        (
                            5,
                            Recipe::Search(SearchKind::Lgdd {
                                lambda: 1,
                                g: 3,
                                u: 5,
                            }),
                        ),
                    ]),
                },
                _ => {
                    return Err(PlanFailure::Blocked {
                        what: format!("no index-2 base on {u} groups of three"),
                        notes: Vec::new(),
                    })
                }
            };
            Ok(inflate_from(base, g / 3))
        }
        _ => Err(PlanFailure::Blocked {
            what: format!("no index-2 route for {}", lgdd_name(2, g, u)),
            notes: Vec::new(),
        }),
    }
}

/// Size-k ingredient of index 1 over groups of `g`, for refinement fillers.
fn unit_filler(g: usize, k: usize) -> Result<Recipe, PlanFailure> {
    match k {
        3 => Ok(Recipe::Cube { g }),
        4 if g % 2 == 0 => Ok(inflate_from(
            Recipe::Search(SearchKind::Lgdd {
                lambda: 1,
                g: 2,
                u: 4,
            }),
            g / 2,
        )),
        _ => Err(PlanFailure::Blocked {
            what: format!("no filler for size-{k} blocks over groups of {g}"),
            notes: Vec::new(),
        }),
    }
}

/// Index-3 route by refining a flat catalogue set (u = 5 mod 6 for any
/// group size, u = 8 for even group sizes).
fn unit_route_3(g: usize, u: usize) -> Result<Recipe, PlanFailure> {
    match u {
        5 => Ok(Recipe::Breakup {
            g,
            flat: FlatSource::Five,
            fillers: BTreeMap::from([(3, Recipe::Cube { g })]),
        }),
        11 => Ok(Recipe::Breakup {
            g,
            flat: FlatSource::Eleven,
            fillers: BTreeMap::from([(3, Recipe::Cube { g })]),
        }),
        8 if g % 2 == 0 => Ok(Recipe::Breakup {
            g,
            flat: FlatSource::DoubledFive,
            fillers: BTreeMap::from([(3, Recipe::Cube { g }), (4, unit_filler(g, 4)?)]),
        }),
        _ => Err(PlanFailure::Blocked {
            what: format!("no index-3 route for {}", lgdd_name(3, g, u)),
            notes: Vec::new(),
        }),
    }
}

/// Index-6 route: the complete single member on eight singleton groups.
fn unit_route_6(g: usize, u: usize) -> Result<Recipe, PlanFailure> {
    if u == 8 && g % 2 == 1 && g % 3 != 0 {
        return Ok(inflate_from(Recipe::Complete { g: 1, u: 8 }, g));
    }
    Err(PlanFailure::Blocked {
        what: format!("no index-6 route for {}", lgdd_name(6, g, u)),
        notes: Vec::new(),
    })
}

/// Plans a large set with the given parameters, or explains why none can be
/// produced.
pub fn plan_lgdd(lambda: usize, g: usize, u: usize) -> Result<Recipe, PlanFailure> {
    let report = admissible_lgdd(lambda, g, u);
    if !report.admissible {
        return Err(PlanFailure::Nonexistent {
            reasons: report.failures,
        });
    }
    if g * u > MAX_POINTS {
        return Err(PlanFailure::Blocked {
            what: format!("{} points exceed the {MAX_POINTS}-point ceiling", g * u),
            notes: Vec::new(),
        });
    }
    if lambda == g * (u - 2) {
        return Ok(Recipe::Complete { g, u });
    }
    let mut notes = Vec::new();
    for (unit, route) in [
        (1usize, unit_route_1 as fn(usize, usize) -> Result<Recipe, PlanFailure>),
        (2, unit_route_2),
        (3, unit_route_3),
        (6, unit_route_6),
    ] {
        if lambda % unit != 0 || !admissible_lgdd(unit, g, u).admissible {
            continue;
        }
        match route(g, u) {
            Ok(base) => {
                let t = lambda / unit;
                return Ok(if t == 1 {
                    base
                } else {
                    Recipe::Merge {
                        t,
                        base: Box::new(base),
                    }
                });
            }
            Err(PlanFailure::Blocked { what, .. }) => notes.push(what),
            Err(other) => return Err(other),
        }
    }
    Err(PlanFailure::Blocked {
        what: format!("no route reaches {}", lgdd_name(lambda, g, u)),
        notes,
    })
}

/// Plans a single simple design, preferring the smallest-index large set
/// whose members can be unioned; falls back to a direct search when small
/// enough.
pub fn plan_simple_gdd(lambda: usize, g: usize, u: usize) -> Result<SimpleRecipe, PlanFailure> {
    let report = admissible_simple_gdd(lambda, g, u);
    if !report.admissible {
        return Err(PlanFailure::Nonexistent {
            reasons: report.failures,
        });
    }
    if g * u > MAX_POINTS {
        return Err(PlanFailure::Blocked {
            what: format!("{} points exceed the {MAX_POINTS}-point ceiling", g * u),
            notes: Vec::new(),
        });
    }
    let mut notes = Vec::new();
    for d in 1..=lambda {
        if lambda % d != 0 {
            continue;
        }
        match plan_lgdd(d, g, u) {
            Ok(base) => {
                return Ok(SimpleRecipe::UnionMembers {
                    t: lambda / d,
                    base,
                })
            }
            Err(PlanFailure::Broken(msg)) => return Err(PlanFailure::Broken(msg)),
            Err(PlanFailure::Nonexistent { .. }) => {}
            Err(PlanFailure::Blocked { what, .. }) => notes.push(what),
        }
    }
    if g * u <= 15 && u <= 9 && lambda <= 255 {
        return Ok(SimpleRecipe::DirectSearch { lambda, g, u });
    }
    Err(PlanFailure::Blocked {
        what: format!("no route reaches a simple (3,{lambda})-GDD({g}^{u})"),
        notes,
    })
}

/// Everything an execution needs, plus the transcript it builds up.
pub struct PlanEnv {
    pub store: CertStore,
    pub search: SearchConfig,
    pub opts: VerifyOpts,
    pub transcript: Vec<String>,
}

impl Default for PlanEnv {
    fn default() -> Self {
        PlanEnv {
            store: CertStore::from_env(),
            search: SearchConfig::default(),
            opts: VerifyOpts::default(),
            transcript: Vec::new(),
        }
    }
}

impl PlanEnv {
    fn note_loaded<T>(&mut self, what: &str, loaded: &Loaded<T>) {
        match &loaded.repair {
            Some(note) => self.transcript.push(format!(
                "loaded {what} (repaired {}: {})",
                note.target, note.detail
            )),
            None => self.transcript.push(format!("loaded {what}")),
        }
    }
}

fn broken<E: std::fmt::Display>(e: E) -> PlanFailure {
    PlanFailure::Broken(e.to_string())
}

fn check_large_set(ls: &LargeSet, what: &str, env: &mut PlanEnv) -> Result<(), PlanFailure> {
    let report = verify_large_set(ls, &env.opts);
    if !report.ok() {
        return Err(PlanFailure::Broken(format!(
            "{what} failed verification: {}",
            report.summary()
        )));
    }
    env.transcript.push(format!(
        "verified {} = {what}: {} members x {} blocks",
        lgdd_name(ls.lambda, ls.g, ls.u),
        ls.members.len(),
        ls.members.first().map_or(0, |m| m.total()),
    ));
    Ok(())
}

/// Materialises one of the flat hosts, verifying each stage.
fn run_flat(src: &FlatSource, env: &mut PlanEnv) -> Result<FlatLargeSet, PlanFailure> {
    let flat = match src {
        FlatSource::Five => {
            let five = base_gls(BaseGlsName::V5).map_err(broken)?;
            env.note_loaded("five-point set", &five);
            flatten(&five.design.ls)
        }
        FlatSource::Six => {
            let six = base_gls(BaseGlsName::V6).map_err(broken)?;
            env.note_loaded("six-point set", &six);
            flatten(&six.design.ls)
        }
        FlatSource::Ten => {
            let ten = base_gls(BaseGlsName::V10).map_err(broken)?;
            env.note_loaded("ten-point set", &ten);
            flatten(&ten.design.ls)
        }
        FlatSource::Eleven => {
            let eleven = base_gls(BaseGlsName::V11).map_err(broken)?;
            env.note_loaded("eleven-point set", &eleven);
            let five = base_gls(BaseGlsName::V5).map_err(broken)?;
            env.note_loaded("five-point set", &five);
            let filled = fill(
                &eleven.design,
                3,
                &BTreeMap::from([(5, five.design)]),
                &BTreeMap::new(),
            )
            .map_err(broken)?;
            let report = verify_good(&filled, false, &env.opts);
            if !report.ok() {
                return Err(PlanFailure::Broken(format!(
                    "filled eleven-point set failed verification: {}",
                    report.summary()
                )));
            }
            env.transcript
                .push("verified filled eleven-point set".to_string());
            flatten(&filled.ls)
        }
        FlatSource::DoubledFive => {
            let five = base_gls(BaseGlsName::V5).map_err(broken)?;
            env.note_loaded("five-point set", &five);
            let doubled = double(&five.design).map_err(broken)?;
            let report = verify_holed(&doubled, &env.opts);
            if !report.ok() {
                return Err(PlanFailure::Broken(format!(
                    "doubled five-point set failed verification: {}",
                    report.summary()
                )));
            }
            env.transcript
                .push("verified doubled five-point set".to_string());
            flatten(&doubled)
        }
        FlatSource::WidenedSix => {
            let six = base_gls(BaseGlsName::V6).map_err(broken)?;
            env.note_loaded("six-point set", &six);
            let widened = expand_w(&six.design, 3).map_err(broken)?;
            let report = verify_good(&widened, false, &env.opts);
            if !report.ok() {
                return Err(PlanFailure::Broken(format!(
                    "tripled six-point set failed verification: {}",
                    report.summary()
                )));
            }
            env.transcript
                .push("verified tripled six-point set".to_string());
            flatten(&widened.ls)
        }
    };
    let report = verify_flat(&flat, &env.opts);
    if !report.ok() {
        return Err(PlanFailure::Broken(format!(
            "flat host failed verification: {}",
            report.summary()
        )));
    }
    env.transcript.push(format!(
        "verified flat host: index {}, {} points",
        flat.lambda, flat.v
    ));
    Ok(flat)
}

/// Materialises a recipe, verifying the output of every node.
pub fn run_recipe(recipe: &Recipe, env: &mut PlanEnv) -> Result<LargeSet, PlanFailure> {
    let ls = match recipe {
        Recipe::Cube { g } => lgdd_cube(*g).map_err(broken)?,
        Recipe::Complete { g, u } => lgdd_complete(*g, *u).map_err(broken)?,
        Recipe::DevelopCyclic => {
            let loaded = develop_cyclic().map_err(broken)?;
            env.note_loaded("cyclically developed eight-group set", &loaded);
            loaded.design
        }
        Recipe::Search(kind) => {
            let (resolved, notes) = find_or_search(kind, &env.store, &env.search);
            env.transcript.extend(notes.iter().cloned());
            match resolved {
                Some(r) => {
                    env.transcript.extend(r.notes.iter().cloned());
                    let origin = match &r.source {
                        Source::Cache(path) => format!("certificate {}", path.display()),
                        Source::Bundled => "bundled certificate".to_string(),
                        Source::Search { nodes } => format!("fresh search ({nodes} nodes)"),
                    };
                    env.transcript.push(format!("{}: {origin}", kind.name()));
                    match r.artifact {
                        Artifact::LargeSet(ls) => ls,
                        other => {
                            return Err(PlanFailure::Broken(format!(
                                "search {} returned a non-large-set artifact: {other:?}",
                                kind.name()
                            )))
                        }
                    }
                }
                None => {
                    return Err(PlanFailure::Blocked {
                        what: format!("ingredient {} is unavailable", kind.name()),
                        notes,
                    })
                }
            }
        }
        Recipe::Inflate { m, base } => inflate(&run_recipe(base, env)?, *m).map_err(broken)?,
        Recipe::Merge { t, base } => merge(&run_recipe(base, env)?, *t).map_err(broken)?,
        Recipe::FlatAsLgdd(src) => flat_as_lgdd(&run_flat(src, env)?).map_err(broken)?,
        Recipe::Breakup { g, flat, fillers } => {
            let host = run_flat(flat, env)?;
            let mut mats = BTreeMap::new();
            for (&k, f) in fillers {
                mats.insert(k, run_recipe(f, env)?);
            }
            breakup(&host, *g, &mats).map_err(broken)?
        }
    };
    let (lambda, g, u) = recipe.shape();
    let what = format!("{:?} output", variant_name(recipe));
    debug_assert_eq!((ls.lambda, ls.g, ls.u), (lambda, g, u));
    check_large_set(&ls, &what, env)?;
    Ok(ls)
}

fn variant_name(recipe: &Recipe) -> &'static str {
    match recipe {
        Recipe::Cube { .. } => "cube",
        Recipe::Complete { .. } => "complete",
        Recipe::DevelopCyclic => "develop",
        Recipe::Search(_) => "search",
        Recipe::Inflate { .. } => "inflate",
        Recipe::Merge { .. } => "merge",
        Recipe::FlatAsLgdd(_) => "flat",
        Recipe::Breakup { .. } => "refine",
    }
}

/// Materialises a simple-design recipe, verifying the result.
pub fn run_simple_recipe(
    recipe: &SimpleRecipe,
    env: &mut PlanEnv,
) -> Result<(GroupedDesign, usize), PlanFailure> {
    let (design, lambda) = match recipe {
        SimpleRecipe::UnionMembers { t, base } => {
            let ls = run_recipe(base, env)?;
            union_members(&ls, *t).map_err(broken)?
        }
        SimpleRecipe::DirectSearch { lambda, g, u } => {
            let kind = SearchKind::SimpleGdd {
                lambda: *lambda,
                g: *g,
                u: *u,
            };
            let (resolved, notes) = find_or_search(&kind, &env.store, &env.search);
            env.transcript.extend(notes.iter().cloned());
            match resolved {
                Some(r) => match r.artifact {
                    Artifact::Gdd { design, lambda } => (design, lambda),
                    other => {
                        return Err(PlanFailure::Broken(format!(
                            "search {} returned a non-design artifact: {other:?}",
                            kind.name()
                        )))
                    }
                },
                None => {
                    return Err(PlanFailure::Blocked {
                        what: format!("ingredient {} is unavailable", kind.name()),
                        notes,
                    })
                }
            }
        }
    };
    let report = verify_gdd(&design, lambda, true, &env.opts);
    if !report.ok() {
        return Err(PlanFailure::Broken(format!(
            "simple design failed verification: {}",
            report.summary()
        )));
    }
    env.transcript.push(format!(
        "verified simple (3,{lambda})-GDD({}^{}) with {} blocks",
        design.g,
        design.u,
        design.blocks.total()
    ));
    Ok((design, lambda))
}

/// Plans and runs in one call.
pub fn build_lgdd(
    lambda: usize,
    g: usize,
    u: usize,
    env: &mut PlanEnv,
) -> Result<(LargeSet, Recipe), PlanFailure> {
    let recipe = plan_lgdd(lambda, g, u)?;
    let ls = run_recipe(&recipe, env)?;
    Ok((ls, recipe))
}

/// Plans and runs a simple design in one call.
pub fn build_simple_gdd(
    lambda: usize,
    g: usize,
    u: usize,
    env: &mut PlanEnv,
) -> Result<(GroupedDesign, usize, SimpleRecipe), PlanFailure> {
    let recipe = plan_simple_gdd(lambda, g, u)?;
    let (design, l) = run_simple_recipe(&recipe, env)?;
    Ok((design, l, recipe))
}

/// Outcome of one parameter cell in a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub detail: String,
    pub g: usize,
    pub lambda: usize,
    pub status: String,
    pub u: usize,
}

/// Tally of a parameter sweep.
#[derive(Debug, Clone, Serialize, Default)]
pub struct SweepReport {
    pub blocked: usize,
    pub built: usize,
    pub cells: Vec<SweepCell>,
    pub nonexistent: usize,
}

/// Plans, runs, and verifies every parameter cell in the given ranges.
/// Inadmissible cells must come out nonexistent and admissible cells must
/// either build and verify or be blocked on a missing ingredient; any
/// disagreement or internal failure panics.
pub fn sweep_lgdd(
    max_lambda: usize,
    max_g: usize,
    max_u: usize,
    env: &mut PlanEnv,
) -> SweepReport {
    let mut report = SweepReport::default();
    for u in 3..=max_u {
        for g in 1..=max_g {
            for lambda in 1..=max_lambda.min(g * (u - 2)) {
                let admissible = admissible_lgdd(lambda, g, u).admissible;
                let (status, detail) = match build_lgdd(lambda, g, u, env) {
                    Ok((ls, _)) => {
                        assert!(
                            admissible,
                            "built an inadmissible {}",
                            lgdd_name(lambda, g, u)
                        );
                        (
                            "built".to_string(),
                            format!("{} members", ls.members.len()),
                        )
                    }
                    Err(PlanFailure::Nonexistent { reasons }) => {
                        assert!(
                            !admissible,
                            "{} is admissible but was called nonexistent",
                            lgdd_name(lambda, g, u)
                        );
                        ("nonexistent".to_string(), reasons.join("; "))
                    }
                    Err(PlanFailure::Blocked { what, .. }) => {
                        assert!(
                            admissible,
                            "inadmissible {} was blocked instead of nonexistent",
                            lgdd_name(lambda, g, u)
                        );
                        ("blocked".to_string(), what)
                    }
                    Err(PlanFailure::Broken(msg)) => {
                        panic!("sweep hit an internal failure at {}: {msg}", lgdd_name(lambda, g, u))
                    }
                };
                match status.as_str() {
                    "built" => report.built += 1,
                    "nonexistent" => report.nonexistent += 1,
                    _ => report.blocked += 1,
                }
                report.cells.push(SweepCell {
                    detail,
                    g,
                    lambda,
                    status,
                    u,
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> PlanEnv {
        PlanEnv {
            store: CertStore::new(None),
            ..PlanEnv::default()
        }
    }

    #[test]
    fn inadmissible_requests_are_called_nonexistent() {
        for (lambda, g, u) in [(9, 2, 8), (4, 3, 4), (6, 3, 11), (5, 1, 12), (1, 1, 7)] {
            match plan_lgdd(lambda, g, u) {
                Err(PlanFailure::Nonexistent { reasons }) => assert!(!reasons.is_empty()),
                other => panic!("expected nonexistent for ({lambda},{g},{u}), got {other:?}"),
            }
        }
    }

    #[test]
    fn the_complete_member_is_planned_as_a_leaf() {
        let recipe = plan_lgdd(4, 2, 4).unwrap();
        assert_eq!(recipe, Recipe::Complete { g: 2, u: 4 });
        let ls = run_recipe(&recipe, &mut env()).unwrap();
        assert_eq!(ls.members.len(), 1);
    }

    #[test]
    fn three_group_requests_use_the_cube() {
        let recipe = plan_lgdd(2, 4, 3).unwrap();
        let ls = run_recipe(&recipe, &mut env()).unwrap();
        assert_eq!((ls.lambda, ls.g, ls.u), (2, 4, 3));
        assert_eq!(ls.members.len(), 2);
    }

    #[test]
    fn five_group_requests_refine_the_five_point_catalogue_set() {
        let recipe = plan_lgdd(3, 2, 5).unwrap();
        assert!(matches!(
            recipe,
            Recipe::Breakup {
                flat: FlatSource::Five,
                ..
            }
        ));
        let mut e = env();
        let ls = run_recipe(&recipe, &mut e).unwrap();
        assert_eq!((ls.lambda, ls.g, ls.u), (3, 2, 5));
        assert_eq!(ls.members.len(), 2);
        assert!(e.transcript.iter().any(|t| t.contains("flat host")));
    }

    #[test]
    fn plans_render_as_step_trees() {
        let recipe = plan_lgdd(6, 3, 8).unwrap();
        let step = recipe.describe();
        let text = serde_json::to_string_pretty(&step).unwrap();
        assert!(text.contains("yields"));
        assert!(text.contains("(3,6)-LGDD(3^8)"));
    }

    #[test]
    fn oversized_requests_are_blocked_not_denied() {
        match plan_lgdd(1, 12, 11) {
            Err(PlanFailure::Blocked { what, .. }) => assert!(what.contains("ceiling")),
            other => panic!("expected blocked, got {other:?}"),
        }
    }

    #[test]
    fn simple_designs_union_the_smallest_index_route() {
        let recipe = plan_simple_gdd(4, 3, 8).unwrap();
        match &recipe {
            SimpleRecipe::UnionMembers { t, base } => {
                assert_eq!(*t, 2);
                assert_eq!(base.shape(), (2, 3, 8));
            }
            other => panic!("expected a union plan, got {other:?}"),
        }
        let (design, lambda) = run_simple_recipe(&recipe, &mut env()).unwrap();
        assert_eq!(lambda, 4);
        assert_eq!(design.blocks.total(), 336);
    }

    #[test]
    fn a_small_sweep_classifies_every_cell() {
        let mut e = env();
        e.search.max_nodes = 5_000_000;
        let report = sweep_lgdd(4, 2, 6, &mut e);
        assert!(report.built > 0);
        assert!(report.nonexistent > 0);
        assert_eq!(
            report.cells.len(),
            report.built + report.nonexistent + report.blocked
        );
    }
}
