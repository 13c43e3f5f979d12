//! `lattes`: batch classification of Lattès-type maps.
//!
//! Exit codes: 0 on success, 1 on invalid input (with `{"error": ...}` on
//! stdout), 2 when an invariant is falsified.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use lattes_core::affine::ContractionParams;
use lattes_core::error::{OrbifoldError, QuotientError};
use lattes_core::lattice::RationalVector2;
use lattes_core::mesh::{preimage_mesh, round_sig12, DepthStat, MAX_MESH_DEPTH};
use lattes_core::orbifold::{self, PortraitFile, RamificationPortrait};
use lattes_core::quotient::{expected_signature, DatumFile, FiberPoint};
use lattes_core::suite::{run_invariant_suite, SuiteConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use lattes_core::{CrystGroup, GroupKind, QuotientMapDatum, Strategy};

const DEFAULT_DEPTH: u32 = 4;

#[derive(Parser, Debug)]
#[command(name = "lattes", version, about = "Classify and verify Lattès-type maps from crystallographic data")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Refinement depth, mesh-render only (default 4, at most 12).
    #[arg(long, global = true)]
    depth: Option<u32>,

    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Random cases per invariant in `verify`.
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,

    /// Run single-threaded.
    #[arg(long, global = true)]
    sequential: bool,

    /// Contraction check: multiplicative slack ε₁.
    #[arg(long, global = true, default_value_t = 0.5)]
    epsilon1: f64,

    /// Contraction check: additive slack ε₂.
    #[arg(long, global = true, default_value_t = 0.5)]
    epsilon2: f64,

    /// Contraction check: largest inverse iterate tried.
    #[arg(long, global = true, default_value_t = 20)]
    n_max: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full classification report of a datum file.
    Classify { input: PathBuf },
    /// Orbifold signature of the induced map.
    Signature { input: PathBuf },
    /// Fiber over `"point"` (or over every cone point) with local degrees.
    Fiber { input: PathBuf },
    /// Group element carrying `"x"` to `"y"`.
    DeckSolve { input: PathBuf },
    /// Orbifold classification of a raw ramification portrait.
    PortraitCheck { input: PathBuf },
    /// Preimage mesh as SVG, with diameter statistics.
    MeshRender { input: PathBuf },
    /// Randomized invariant suite on a datum.
    Verify { input: PathBuf },
}

enum Failure {
    Input(String),
    Falsified(String),
}

impl From<QuotientError> for Failure {
    fn from(e: QuotientError) -> Self {
        if e.is_invariant_failure() {
            Failure::Falsified(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<OrbifoldError> for Failure {
    fn from(e: OrbifoldError) -> Self {
        if e.is_invariant_failure() {
            Failure::Falsified(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

/// Everything a command wants written besides its exit status.
struct Output {
    main: String,
    side: Option<String>,
}

impl Output {
    fn json(v: &impl Serialize) -> Output {
        Output {
            main: pretty(v),
            side: None,
        }
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_datum(path: &Path) -> Result<QuotientMapDatum, Failure> {
    let file: DatumFile = read_json(path)?;
    Ok(QuotientMapDatum::from_file(&file)?)
}

fn classify(path: &Path, strategy: Strategy) -> Result<Output, Failure> {
    let datum = read_datum(path)?;
    Ok(Output::json(&datum.theorem_report(strategy)?))
}

fn signature(path: &Path, strategy: Strategy) -> Result<Output, Failure> {
    let datum = read_datum(path)?;
    let c = datum.classify_portrait(strategy)?;
    let kind = datum.group().kind();
    if expected_signature(kind).as_ref() != Some(&c.signature) {
        return Err(Failure::Falsified(format!("{kind} produced signature {}", c.signature)));
    }
    Ok(Output::json(&json!({
        "group": kind,
        "signature": c.signature,
        "euler_char": c.euler_char.to_string(),
    })))
}

#[derive(Deserialize)]
struct FiberInput {
    #[serde(flatten)]
    datum: DatumFile,
    #[serde(default)]
    point: Option<RationalVector2>,
}

#[derive(Serialize)]
struct FiberReport {
    over: RationalVector2,
    degree_sum: u64,
    points: Vec<FiberPoint>,
}

fn fiber(path: &Path, strategy: Strategy) -> Result<Output, Failure> {
    let input: FiberInput = read_json(path)?;
    let datum = QuotientMapDatum::from_file(&input.datum)?;
    let targets = match input.point {
        Some(p) => vec![p],
        None => datum
            .group()
            .cone_point_classes()
            .map_err(QuotientError::from)?
            .into_iter()
            .map(|c| c.representative)
            .collect(),
    };
    let fibers = targets
        .iter()
        .map(|p| {
            let points = datum.fiber(p, strategy)?;
            Ok(FiberReport {
                over: datum.canonical(p),
                degree_sum: points.iter().map(|f| f.degree).sum(),
                points,
            })
        })
        .collect::<Result<Vec<_>, QuotientError>>()?;
    Ok(Output::json(&json!({
        "group": datum.group().kind(),
        "degree": datum.degree().to_string(),
        "fibers": fibers,
    })))
}

#[derive(Deserialize)]
struct DeckInput {
    group: GroupKind,
    x: RationalVector2,
    y: RationalVector2,
}

fn deck_solve(path: &Path) -> Result<Output, Failure> {
    let input: DeckInput = read_json(path)?;
    let group = CrystGroup::new(input.group);
    let g = group
        .deck_solve(&input.x, &input.y)
        .map_err(|e| Failure::Input(e.to_string()))?;
    if group.apply(&g, &input.x) != input.y {
        return Err(Failure::Falsified(format!("{g} does not carry x to y")));
    }
    Ok(Output::json(&g))
}

fn portrait_check(path: &Path) -> Result<Output, Failure> {
    let file: PortraitFile = read_json(path)?;
    let portrait = RamificationPortrait::from_file(&file)?;
    if !portrait.has_critical() {
        let alpha = orbifold::ramification_function(&portrait)?;
        return Err(Failure::Input(format!(
            "not a Thurston map portrait: no critical labels (χ = {})",
            alpha.euler_characteristic()
        )));
    }
    Ok(Output::json(&orbifold::classify(&portrait)?))
}

fn rounded(stats: &[DepthStat]) -> Vec<Value> {
    stats
        .iter()
        .map(|s| json!({"depth": s.depth, "max_diam": round_sig12(s.max_diam), "cells": s.cells}))
        .collect()
}

fn mesh_render(path: &Path, depth: u32, strategy: Strategy) -> Result<Output, Failure> {
    if depth > MAX_MESH_DEPTH {
        return Err(QuotientError::DepthTooLarge(depth, MAX_MESH_DEPTH).into());
    }
    let datum = read_datum(path)?;
    let mesh = preimage_mesh(&datum, depth, strategy)?;
    let last = mesh.stats.last().expect("depth 0 always present");
    let stats = json!({
        "depth": depth,
        "max_diam": round_sig12(mesh.max_diam()),
        "cells": last.cells,
        "levels": rounded(&mesh.stats),
    });
    Ok(Output {
        main: mesh.to_svg(),
        side: Some(pretty(&stats)),
    })
}

fn verify(path: &Path, cli: &Cli, strategy: Strategy) -> Result<(Output, bool), Failure> {
    let datum = read_datum(path)?;
    let config = SuiteConfig {
        seed: cli.seed,
        samples: cli.samples,
        contraction: ContractionParams {
            epsilon1: cli.epsilon1,
            epsilon2: cli.epsilon2,
            n_max: cli.n_max,
        },
    };
    let outcomes = run_invariant_suite(&datum, &config, strategy);
    let passed = outcomes.iter().all(|o| o.passed);
    let lines: String = outcomes
        .iter()
        .map(|o| format!("{} {}: {}\n", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail))
        .collect();
    let report = json!({
        "datum": datum.to_file(),
        "seed": cli.seed,
        "samples": cli.samples,
        "passed": passed,
        "invariants": outcomes,
    });
    Ok((
        Output {
            main: pretty(&report),
            side: Some(lines),
        },
        passed,
    ))
}

fn emit(out: &Option<PathBuf>, output: Output) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, &output.main).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            if let Some(side) = output.side {
                print!("{side}");
            }
        }
        None => {
            print!("{}", output.main);
            if let Some(side) = output.side {
                eprint!("{side}");
            }
        }
    }
    std::io::stdout().flush().ok();
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let strategy = if cli.sequential { Strategy::Sequential } else { Strategy::Parallel };
    if cli.depth.is_some() && !matches!(cli.command, Command::MeshRender { .. }) {
        return Err(Failure::Input("--depth is only valid with mesh-render".into()));
    }
    let (output, ok) = match &cli.command {
        Command::Classify { input } => (classify(input, strategy)?, true),
        Command::Signature { input } => (signature(input, strategy)?, true),
        Command::Fiber { input } => (fiber(input, strategy)?, true),
        Command::DeckSolve { input } => (deck_solve(input)?, true),
        Command::PortraitCheck { input } => (portrait_check(input)?, true),
        Command::MeshRender { input } => (mesh_render(input, cli.depth.unwrap_or(DEFAULT_DEPTH), strategy)?, true),
        Command::Verify { input } => verify(input, cli, strategy)?,
    };
    emit(&cli.out, output)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            println!("{}", json!({"error": e.to_string().trim_end()}));
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Failure::Input(msg)) => {
            println!("{}", json!({"error": msg}));
            ExitCode::from(1)
        }
        Err(Failure::Falsified(msg)) => {
            println!("{}", json!({"error": msg}));
            ExitCode::from(2)
        }
    }
}
