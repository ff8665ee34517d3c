//! Command-line front end: plans and builds large sets of grouped triple
//! designs, runs the backtracking searches, verifies design documents, and
//! exports catalogued material.
//!
//! Exit codes: 0 success, 1 the requested design does not exist, 2 an
//! ingredient is out of reach (or a search ran out of budget), 3 a
//! verification failure, 4 a usage error.

use clap::{Parser, Subcommand};
use lgdd::catalog::{base_gls, data_integrity_report, develop_cyclic, fan3, sqs8_fan, BaseGlsName};
use lgdd::document::{
    fan_document, gdd_document, gls_document, large_set_document, DesignDocument, DocumentBody,
};
use lgdd::planner::{
    build_lgdd, build_simple_gdd, plan_lgdd, plan_simple_gdd, sweep_lgdd, PlanEnv, PlanFailure,
};
use lgdd::search::{run_search, CertStore, SearchConfig, SearchKind, SearchOutcome};
use lgdd::verifier::{
    verify_fan, verify_frame, verify_gdd, verify_good, verify_holed, verify_large_set, verify_lr,
    Report, VerifyOpts,
};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

const EXIT_OK: u8 = 0;
const EXIT_NONEXISTENT: u8 = 1;
const EXIT_BLOCKED: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_USAGE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "lgdd",
    version,
    about = "Builds, searches, and verifies large sets of grouped triple designs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Shuffle seed for searches (0 keeps lexicographic order).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for verification.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Certificate cache directory (defaults to $LGDD_CACHE_DIR).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Node budget per search.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    max_nodes: u64,
    /// Wall-clock budget per search, in seconds.
    #[arg(long, global = true, default_value_t = 600)]
    time_limit: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Show the construction pipeline for the requested parameters.
    Plan {
        lambda: usize,
        g: usize,
        u: usize,
        /// Plan a single simple design instead of a large set.
        #[arg(long)]
        simple: bool,
    },
    /// Plan, run, and verify; emits the design document as JSON.
    Build {
        lambda: usize,
        g: usize,
        u: usize,
        /// Build a single simple design instead of a large set.
        #[arg(long)]
        simple: bool,
        /// Write the document here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a JSON report (plan, transcript, fingerprint) here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Re-verify a design document.
    Verify { file: PathBuf },
    /// Run one backtracking search.
    Search {
        #[command(subcommand)]
        kind: SearchCmd,
        /// Write the found design document here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export catalogued material as a design document.
    Catalog {
        /// One of: v5, v6, v10, v11, cyclic, fan3, fan7, integrity.
        name: String,
        /// Write the document here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plan, build, and verify every parameter cell in a range.
    Sweep {
        #[arg(long, default_value_t = 6)]
        max_lambda: usize,
        #[arg(long, default_value_t = 4)]
        max_g: usize,
        #[arg(long, default_value_t = 8)]
        max_u: usize,
        /// Write the full cell-by-cell report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Large set of grouped triple designs.
    Lgdd { lambda: usize, g: usize, u: usize },
    /// Single simple grouped triple design.
    Gdd { lambda: usize, g: usize, u: usize },
    /// Large set of triple systems on singleton groups.
    Ls { v: usize, lambda: usize },
    /// Point-indexed partition into index-one designs.
    Frame { g: usize, u: usize },
    /// Pair-indexed family of resolvable triple systems.
    Lr { v: usize },
}

impl SearchCmd {
    fn kind(&self) -> SearchKind {
        match *self {
            SearchCmd::Lgdd { lambda, g, u } => SearchKind::Lgdd { lambda, g, u },
            SearchCmd::Gdd { lambda, g, u } => SearchKind::SimpleGdd { lambda, g, u },
            SearchCmd::Ls { v, lambda } => SearchKind::Lgdd { lambda, g: 1, u: v },
            SearchCmd::Frame { g, u } => SearchKind::Frame { g, u },
            SearchCmd::Lr { v } => SearchKind::Lr { v },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    run(cli)
}

fn env_from(cli: &Cli) -> PlanEnv {
    let store = match &cli.cache {
        Some(dir) => CertStore::new(Some(dir.clone())),
        None => CertStore::from_env(),
    };
    PlanEnv {
        store,
        search: SearchConfig {
            seed: cli.seed,
            max_nodes: cli.max_nodes,
            time_limit: Duration::from_secs(cli.time_limit),
        },
        opts: VerifyOpts {
            threads: cli.threads,
            ..VerifyOpts::default()
        },
        transcript: Vec::new(),
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn failure_exit(failure: &PlanFailure) -> ExitCode {
    match failure {
        PlanFailure::Nonexistent { reasons } => {
            eprintln!("no such design:");
            for r in reasons {
                eprintln!("  - {r}");
            }
            ExitCode::from(EXIT_NONEXISTENT)
        }
        PlanFailure::Blocked { what, notes } => {
            eprintln!("blocked: {what}");
            for n in notes {
                eprintln!("  - {n}");
            }
            ExitCode::from(EXIT_BLOCKED)
        }
        PlanFailure::Broken(msg) => {
            eprintln!("internal failure: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn run(cli: Cli) -> ExitCode {
    match &cli.cmd {
        Cmd::Plan {
            lambda,
            g,
            u,
            simple,
        } => {
            let step = if *simple {
                plan_simple_gdd(*lambda, *g, *u).map(|r| r.describe())
            } else {
                plan_lgdd(*lambda, *g, *u).map(|r| r.describe())
            };
            match step {
                Ok(step) => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&step).expect("plans serialise")
                    );
                    ExitCode::from(EXIT_OK)
                }
                Err(f) => failure_exit(&f),
            }
        }
        Cmd::Build {
            lambda,
            g,
            u,
            simple,
            out,
            report,
        } => {
            let mut env = env_from(&cli);
            let (doc, plan_step) = if *simple {
                match build_simple_gdd(*lambda, *g, *u, &mut env) {
                    Ok((design, l, recipe)) => {
                        (gdd_document(&design, l, true), recipe.describe())
                    }
                    Err(f) => return failure_exit(&f),
                }
            } else {
                match build_lgdd(*lambda, *g, *u, &mut env) {
                    Ok((ls, recipe)) => (large_set_document(&ls), recipe.describe()),
                    Err(f) => return failure_exit(&f),
                }
            };
            if let Some(path) = report {
                let body = serde_json::json!({
                    "fingerprint": doc.fingerprint(),
                    "params": { "g": g, "lambda": lambda, "simple": simple, "u": u },
                    "plan": plan_step,
                    "transcript": env.transcript,
                });
                let text = serde_json::to_string_pretty(&body).expect("reports serialise");
                if let Err(e) = std::fs::write(path, text + "\n") {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            match emit(&doc.to_json(), out) {
                Ok(()) => ExitCode::from(EXIT_OK),
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(EXIT_USAGE)
                }
            }
        }
        Cmd::Verify { file } => {
            let text = match std::fs::read_to_string(file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", file.display());
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            let doc = match DesignDocument::from_json(&text) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("not a valid design document: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            let opts = VerifyOpts {
                threads: cli.threads,
                ..VerifyOpts::default()
            };
            let report: Report = match &doc.body {
                DocumentBody::Gdd {
                    design,
                    lambda,
                    simple,
                } => verify_gdd(design, *lambda, *simple, &opts),
                DocumentBody::LargeSet(ls) => verify_large_set(ls, &opts),
                DocumentBody::Holed(h) => verify_holed(h, &opts),
                DocumentBody::Gls(gls) => verify_good(gls, false, &opts),
                DocumentBody::Lr(lr) => verify_lr(lr, &opts),
                DocumentBody::Frame(f) => verify_frame(f, &opts),
                DocumentBody::Fan(fan) => verify_fan(fan, &opts),
            };
            if report.ok() {
                println!("ok: {} {}", doc.kind(), doc.fingerprint());
                ExitCode::from(EXIT_OK)
            } else {
                eprintln!("verification failed: {}", report.summary());
                ExitCode::from(EXIT_INVALID)
            }
        }
        Cmd::Search { kind, out } => {
            let cfg = SearchConfig {
                seed: cli.seed,
                max_nodes: cli.max_nodes,
                time_limit: Duration::from_secs(cli.time_limit),
            };
            let kind = kind.kind();
            match run_search(&kind, &cfg) {
                SearchOutcome::Found { artifact, nodes } => {
                    eprintln!("{}: found after {nodes} nodes", kind.name());
                    match emit(&artifact.document().to_json(), out) {
                        Ok(()) => ExitCode::from(EXIT_OK),
                        Err(e) => {
                            eprintln!("{e}");
                            ExitCode::from(EXIT_USAGE)
                        }
                    }
                }
                SearchOutcome::Exhausted { nodes } => {
                    eprintln!(
                        "{}: exhausted after {nodes} nodes -- no such design",
                        kind.name()
                    );
                    ExitCode::from(EXIT_NONEXISTENT)
                }
                SearchOutcome::OutOfBudget { nodes } => {
                    eprintln!("{}: out of budget after {nodes} nodes", kind.name());
                    ExitCode::from(EXIT_BLOCKED)
                }
                SearchOutcome::Unsupported(msg) => {
                    eprintln!("{}: {msg}", kind.name());
                    ExitCode::from(EXIT_USAGE)
                }
            }
        }
        Cmd::Catalog { name, out } => {
            let doc = match name.as_str() {
                "v5" | "v6" | "v10" | "v11" => {
                    let which = match name.as_str() {
                        "v5" => BaseGlsName::V5,
                        "v6" => BaseGlsName::V6,
                        "v10" => BaseGlsName::V10,
                        _ => BaseGlsName::V11,
                    };
                    match base_gls(which) {
                        Ok(loaded) => gls_document(&loaded.design),
                        Err(e) => {
                            eprintln!("catalogue failure: {e}");
                            return ExitCode::from(EXIT_INVALID);
                        }
                    }
                }
                "cyclic" => match develop_cyclic() {
                    Ok(loaded) => large_set_document(&loaded.design),
                    Err(e) => {
                        eprintln!("catalogue failure: {e}");
                        return ExitCode::from(EXIT_INVALID);
                    }
                },
                "fan3" => fan_document(&fan3()),
                "fan7" => fan_document(&sqs8_fan()),
                "integrity" => {
                    let lines = data_integrity_report();
                    if lines.is_empty() {
                        println!("all embedded tables match their digests");
                        return ExitCode::from(EXIT_OK);
                    }
                    for line in &lines {
                        eprintln!("{line}");
                    }
                    return ExitCode::from(EXIT_INVALID);
                }
                other => {
                    eprintln!(
                        "unknown catalogue entry {other:?} (try v5, v6, v10, v11, cyclic, fan3, fan7, integrity)"
                    );
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            match emit(&doc.to_json(), out) {
                Ok(()) => ExitCode::from(EXIT_OK),
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(EXIT_USAGE)
                }
            }
        }
        Cmd::Sweep {
            max_lambda,
            max_g,
            max_u,
            report,
        } => {
            let mut env = env_from(&cli);
            let sweep = sweep_lgdd(*max_lambda, *max_g, *max_u, &mut env);
            println!(
                "swept {} cells: {} built, {} nonexistent, {} blocked",
                sweep.cells.len(),
                sweep.built,
                sweep.nonexistent,
                sweep.blocked
            );
            if let Some(path) = report {
                let text = serde_json::to_string_pretty(&sweep).expect("sweeps serialise");
                if let Err(e) = std::fs::write(path, text + "\n") {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            ExitCode::from(EXIT_OK)
        }
    }
}
