//! Command-line front end: argument parsing, dispatch and JSON output.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use tautrank_core::coinv::{
    coinvariant_rank, jacobian_oracle, verify_trace, weight_zero_rank, CoinvariantReport,
    DEFAULT_STAB_WINDOW,
};
use tautrank_core::derham::{chain_map_check, rescale_check, twisted_cohomology, DerhamReport};
use tautrank_core::exactla::{ModularConfig, RankMode};
use tautrank_core::graphcalc::{
    graphs_with_valence, rank1_reduce, straighten, GraphSum, PluckerGraph,
};
use tautrank_core::models::{is_weight_zero, parse_section, Model, ModelKind, Section};
use tautrank_core::oracle::{
    count_a, hilbert_g2n, is_complete, nu, primitive_middle, rank_prediction,
};
use tautrank_core::Error;

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNSTABLE: i32 = 2;
pub const EXIT_CAPABILITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "tautrank",
    version,
    about = "Holonomic ranks of tautological systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension of the truncated coinvariant spaces.
    Rank(RankArgs),
    /// Twisted de Rham cohomology of the complement.
    Derham(DerhamArgs),
    /// Straighten a Plücker graph into crossing-free graphs.
    Straighten(GraphArgs),
    /// Reduce a torus-invariant graph to a constant on G(2,N) at the cyclic section.
    Rank1(Rank1Args),
    /// The closed form ν_n and its lattice count.
    Nu {
        #[arg(long)]
        n: usize,
    },
    /// Number of crossing-free graphs with d edges on N vertices.
    Hilbert {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Run every applicable route and compare.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Exact,
    Modular,
    Auto,
}

impl ModeArg {
    fn rank_mode(self) -> RankMode {
        match self {
            ModeArg::Exact => RankMode::Exact,
            ModeArg::Modular => RankMode::Modular(ModularConfig::default()),
            ModeArg::Auto => RankMode::default(),
        }
    }
}

#[derive(Debug, Args)]
pub struct Target {
    /// `pn:<n>` or `g2n:<N>`.
    #[arg(long)]
    pub model: String,
    /// `fermat`, `cyclic`, `@file` or an inline polynomial.
    #[arg(long)]
    pub section: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long)]
    pub dmax: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_STAB_WINDOW)]
    pub stab_window: usize,
    /// Restrict to torus weight zero.
    #[arg(long)]
    pub weight_zero: bool,
    /// Skip the cross-check against a second route.
    #[arg(long)]
    pub no_confirm: bool,
}

#[derive(Debug, Args)]
pub struct DerhamArgs {
    #[command(flatten)]
    pub target: Target,
    /// Total degree; defaults to dim X.
    #[arg(long)]
    pub k: Option<i64>,
    #[arg(long)]
    pub tmax: Option<u32>,
    #[arg(long)]
    pub experimental_g2n_derham: bool,
    /// Also run the chain-map check for p = 1, 2 (pn only).
    #[arg(long)]
    pub chain_map: bool,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub n: usize,
    /// Edge list such as `1-3,2-4`.
    #[arg(long)]
    pub graph: String,
}

#[derive(Debug, Args)]
pub struct Rank1Args {
    #[arg(long)]
    pub n: usize,
    /// Edge list; `all` runs every torus-invariant graph at `--level`.
    #[arg(long)]
    pub graph: String,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
    /// Confirm every trace relation by coinvariant membership.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long)]
    pub dmax: Option<usize>,
    #[arg(long)]
    pub tmax: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_STAB_WINDOW)]
    pub stab_window: usize,
    /// Allow the expensive routes on pn:n with n ≥ 3.
    #[arg(long)]
    pub long_tests: bool,
    #[arg(long)]
    pub experimental_g2n_derham: bool,
}

/// Exit code and JSON document of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capability(_) => EXIT_CAPABILITY,
        _ => EXIT_ERROR,
    }
}

fn error_outcome(e: &Error) -> Outcome {
    Outcome {
        code: exit_code(e),
        report: json!({ "schema": SCHEMA, "error": e.to_string() }),
    }
}

fn document<T: Serialize>(value: &T) -> Value {
    let mut v = serde_json::to_value(value).expect("reports serialize");
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(SCHEMA));
    }
    v
}

pub fn run(cli: &Cli) -> Outcome {
    let res = match &cli.command {
        Command::Rank(a) => cmd_rank(a),
        Command::Derham(a) => cmd_derham(a),
        Command::Straighten(a) => cmd_straighten(a),
        Command::Rank1(a) => cmd_rank1(a),
        Command::Nu { n } => cmd_nu(*n),
        Command::Hilbert { n, d } => cmd_hilbert(*n, *d),
        Command::Compare(a) => cmd_compare(a),
    };
    res.unwrap_or_else(|e| error_outcome(&e))
}

/// Model and section from the command line; `@path` reads the section text
/// from a file.
pub fn load(target: &Target) -> Result<(Model, Section), Error> {
    let m = Model::parse(&target.model)?;
    let text = match target.section.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| {
            Error::parse(
                target.section.clone(),
                format!("cannot read section file: {e}"),
            )
        })?,
        None => target.section.clone(),
    };
    let f = parse_section(&m, text.trim())?;
    Ok((m, f))
}

fn default_dmax(m: &Model, weight_zero: bool) -> usize {
    match m.kind() {
        ModelKind::G2N(_) if weight_zero => 4,
        _ => tautrank_core::coinv::default_dmax(m),
    }
}

fn coinvariant_report(
    m: &Model,
    f: &Section,
    dmax: Option<usize>,
    stab_window: usize,
    mode: &RankMode,
    weight_zero: bool,
) -> Result<CoinvariantReport, Error> {
    let dmax = dmax.unwrap_or_else(|| default_dmax(m, weight_zero));
    if weight_zero {
        weight_zero_rank(m, f, dmax, stab_window, mode)
    } else {
        coinvariant_rank(m, f, dmax, stab_window, mode)
    }
}

/// Second route for a coinvariant rank: the Jacobian ring on pn, and on
/// g2n at the cyclic section the level-1 graph reductions (every class of
/// level 1 is a multiple of 1).
fn confirm(m: &Model, f: &Section, report: &mut CoinvariantReport) {
    let Some(rank) = report.rank else { return };
    match m.kind() {
        ModelKind::Pn(n) => {
            if let Ok(v) = jacobian_oracle(n, f) {
                report.confirmed = Some(v == rank);
                report.confirmed_by = Some("jacobian".into());
            }
        }
        ModelKind::G2N(n) if f.source == "cyclic" && rank == 1 => {
            let ok = graphs_with_valence(n, &vec![2; n]).iter().all(|g| {
                rank1_reduce(n, g, 1_000_000)
                    .map(|o| !o.failed && o.constant.is_some())
                    .unwrap_or(false)
            });
            report.confirmed = Some(ok);
            report.confirmed_by = Some("rank1".into());
        }
        _ => {}
    }
}

fn cmd_rank(a: &RankArgs) -> Result<Outcome, Error> {
    let (m, f) = load(&a.target)?;
    let mode = a.target.mode.rank_mode();
    let mut report = coinvariant_report(&m, &f, a.dmax, a.stab_window, &mode, a.weight_zero)?;
    if !a.no_confirm {
        confirm(&m, &f, &mut report);
    }
    let code = if report.stabilized {
        EXIT_OK
    } else {
        EXIT_UNSTABLE
    };
    Ok(Outcome {
        code,
        report: document(&report),
    })
}

fn default_tmax(m: &Model) -> u32 {
    match m.kind() {
        ModelKind::Pn(n) => n as u32 + 2,
        ModelKind::G2N(_) => 4,
    }
}

fn cmd_derham(a: &DerhamArgs) -> Result<Outcome, Error> {
    let (m, f) = load(&a.target)?;
    let mode = a.target.mode.rank_mode();
    let k = a.k.unwrap_or(m.dim_x() as i64);
    let tmax = a.tmax.unwrap_or_else(|| default_tmax(&m));
    let report = twisted_cohomology(&m, &f, k, tmax, &mode, a.experimental_g2n_derham)?;
    let mut doc = document(&report);
    if let ModelKind::Pn(n) = m.kind() {
        doc["rescale_check"] = json!(rescale_check(&m, &f, k, tmax)?);
        if a.chain_map {
            let checks = (1..=2)
                .map(|p| chain_map_check(n, &f, p, a.samples, a.seed))
                .collect::<Result<Vec<_>, _>>()?;
            doc["chain_map"] = json!(checks);
        }
    }
    let code = if report.stabilized {
        EXIT_OK
    } else {
        EXIT_UNSTABLE
    };
    Ok(Outcome { code, report: doc })
}

fn cmd_straighten(a: &GraphArgs) -> Result<Outcome, Error> {
    let g = PluckerGraph::parse_edges(a.n, &a.graph)?;
    let out = straighten(&GraphSum::single(g.clone()));
    Ok(Outcome {
        code: EXIT_OK,
        report: json!({
            "schema": SCHEMA,
            "n": a.n,
            "input": g.edge_list(),
            "result": out.to_text(),
        }),
    })
}

fn cmd_rank1(a: &Rank1Args) -> Result<Outcome, Error> {
    let m = Model::g2n(a.n)?;
    let f = tautrank_core::models::cyclic(&m)?;
    let graphs = if a.graph == "all" {
        graphs_with_valence(a.n, &vec![2 * a.level; a.n])
    } else {
        vec![PluckerGraph::parse_edges(a.n, &a.graph)?]
    };
    let mut results = Vec::new();
    let mut closed = true;
    let mut verified = true;
    for g in &graphs {
        let out = rank1_reduce(a.n, g, a.budget)?;
        closed &= !out.failed;
        let mut doc = document(&out);
        doc["graph"] = json!(g.edge_list());
        if a.verify {
            let check = verify_trace(&m, &f, &out)?;
            verified &= check.ok();
            doc["verification"] = json!(check);
        }
        results.push(doc);
    }
    let code = if !verified {
        EXIT_ERROR
    } else if !closed {
        EXIT_UNSTABLE
    } else {
        EXIT_OK
    };
    let report = if results.len() == 1 && a.graph != "all" {
        results.pop().unwrap()
    } else {
        json!({ "schema": SCHEMA, "n": a.n, "level": a.level, "closed": closed, "results": results })
    };
    Ok(Outcome { code, report })
}

fn cmd_nu(n: usize) -> Result<Outcome, Error> {
    let v = nu(n)?;
    let c = count_a(n)?;
    Ok(Outcome {
        code: EXIT_OK,
        report: json!({ "schema": SCHEMA, "n": n, "nu": v.to_string(), "count_a": c.to_string(), "agree": v == c }),
    })
}

fn cmd_hilbert(n: usize, d: usize) -> Result<Outcome, Error> {
    let v = hilbert_g2n(n, d)?;
    Ok(Outcome {
        code: EXIT_OK,
        report: json!({ "schema": SCHEMA, "n": n, "d": d, "value": v }),
    })
}

/// One route of a comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Route {
    pub route: String,
    pub value: Option<usize>,
    pub stabilized: bool,
    pub skipped: Option<String>,
}

impl Route {
    fn skipped(name: &str, why: String) -> Route {
        Route {
            route: name.into(),
            value: None,
            stabilized: false,
            skipped: Some(why),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Pair {
    pub a: String,
    pub b: String,
    pub agree: bool,
}

/// Pairs of stabilized routes with their integer agreement; `agree` holds
/// only when at least one pair exists and every pair is equal.
pub fn agreement(routes: &[Route]) -> (Vec<Pair>, bool) {
    let done: Vec<&Route> = routes
        .iter()
        .filter(|r| r.stabilized && r.value.is_some())
        .collect();
    let mut pairs = Vec::new();
    for i in 0..done.len() {
        for j in i + 1..done.len() {
            pairs.push(Pair {
                a: done[i].route.clone(),
                b: done[j].route.clone(),
                agree: done[i].value == done[j].value,
            });
        }
    }
    let agree = !pairs.is_empty() && pairs.iter().all(|p| p.agree);
    (pairs, agree)
}

fn cmd_compare(a: &CompareArgs) -> Result<Outcome, Error> {
    let (m, f) = load(&a.target)?;
    let mode = a.target.mode.rank_mode();
    let heavy = matches!(m.kind(), ModelKind::Pn(n) if n >= 3) && !a.long_tests;
    let mut routes = Vec::new();

    let wz = matches!(m.kind(), ModelKind::G2N(_)) && is_weight_zero(&m, &f.poly);
    routes.push(if heavy {
        Route::skipped("coinvariants", "needs --long-tests".into())
    } else {
        match coinvariant_report(&m, &f, a.dmax, a.stab_window, &mode, wz) {
            Ok(r) => Route {
                route: "coinvariants".into(),
                value: r.rank,
                stabilized: r.stabilized,
                skipped: r.message.clone(),
            },
            Err(e) => Route::skipped("coinvariants", e.to_string()),
        }
    });

    let tmax = a.tmax.unwrap_or_else(|| default_tmax(&m));
    routes.push(
        match twisted_cohomology(
            &m,
            &f,
            m.dim_x() as i64,
            tmax,
            &mode,
            a.experimental_g2n_derham,
        ) {
            Ok(r) => route_from_derham(r),
            Err(e) => Route::skipped("derham", e.to_string()),
        },
    );

    routes.push(match m.kind() {
        ModelKind::Pn(n) => match jacobian_oracle(n, &f) {
            Ok(v) => Route {
                route: "jacobian".into(),
                value: Some(v),
                stabilized: true,
                skipped: None,
            },
            Err(e) => Route::skipped("jacobian", e.to_string()),
        },
        ModelKind::G2N(_) => Route::skipped("jacobian", "defined for pn only".into()),
    });

    let (pairs, agree) = agreement(&routes);
    let prediction = rank_prediction(&m)?;
    let report = json!({
        "schema": SCHEMA,
        "model": m.id(),
        "section": f.text(&m),
        "routes": routes,
        "pairs": pairs,
        "agree": agree,
        "complete": is_complete(&m)?,
        "primitive_middle": match m.kind() {
            ModelKind::G2N(n) => primitive_middle(n)?,
            ModelKind::Pn(_) => 0,
        },
        "prediction": prediction,
    });
    let code = if pairs.is_empty() {
        EXIT_UNSTABLE
    } else {
        EXIT_OK
    };
    Ok(Outcome { code, report })
}

fn route_from_derham(r: DerhamReport) -> Route {
    Route {
        route: if r.experimental {
            "derham (experimental)".into()
        } else {
            "derham".into()
        },
        value: r.dim,
        stabilized: r.stabilized,
        skipped: None,
    }
}

/// Serializes the report and writes it to `output` or stdout.
pub fn emit(outcome: &Outcome, output: Option<&PathBuf>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(&outcome.report).expect("json values serialize");
    match output {
        Some(path) => fs::write(path, text + "\n"),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => r,
        },
    }
}

/// Sizes the global thread pool from TAUTRANK_THREADS when set.
pub fn init_threads() {
    if let Some(n) = std::env::var("TAUTRANK_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}
