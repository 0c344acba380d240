//! Command-line front end.
//!
//! Every command writes plot-ready rows as CSV (preceded by a `#` line
//! holding the resolved configuration) or as JSON with a `config` member.
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bvp::{solve_adaptive, solve_riemann};
use crate::chain::{
    simulate, simulate_dominant, simulate_replications, truncated_stationary, KernelVariant, OracleConfig, SimConfig,
    SimStats,
};
use crate::error::Error;
use crate::meanvalue::{queue_bounds, symmetric_stability};
use crate::model::{ModelParams, SymmetricParams};
use crate::regions::{
    classify_drift, closure_boundary, dominant_rates, region_closure, region_verdict, trace_boundary, Dominant, Which,
};

#[derive(Debug, Parser)]
#[command(name = "ragnet", version, about = "Two-user random-access G-network toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte-Carlo simulation of the queue-length chain.
    Simulate(SimulateArgs),
    /// Stability and stable-throughput regions.
    Region(RegionArgs),
    /// Mean queue-length bounds over a parameter sweep.
    Bounds(BoundsArgs),
    /// The signalling network against plain slotted ALOHA over a sweep.
    Compare(CompareArgs),
    /// Boundary value solution of the symmetric system.
    Bvp(BvpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Point,
    Boundary,
    Closure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionKind {
    Stability,
    Throughput,
}

impl From<RegionKind> for Which {
    fn from(k: RegionKind) -> Which {
        match k {
            RegionKind::Stability => Which::Stability,
            RegionKind::Throughput => Which::Throughput,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DominantArg {
    R1,
    R2,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON file with either the ten per-user fields or the symmetric five.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Override one parameter, e.g. `--set lambda1=0.1`. Repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Total slots; accepts forms like `1e6`.
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub slots: u64,
    /// Defaults to a tenth of the slots.
    #[arg(long = "burn-in", value_parser = parse_count)]
    pub burn_in: Option<u64>,
    #[arg(long, default_value_t = 100)]
    pub batches: usize,
    #[arg(long, default_value_t = 1)]
    pub replications: u64,
    #[arg(long, value_enum)]
    pub dominant: Option<DominantArg>,
    #[arg(long = "global-malfunction")]
    pub global_malfunction: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "point")]
    pub mode: Mode,
    /// Restrict to one region; both are emitted otherwise.
    #[arg(long, value_enum)]
    pub which: Option<RegionKind>,
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub lambda2: Option<f64>,
    /// Boundary points, or arrival-grid size per axis in closure mode.
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
    /// Transmission-probability grid size per user in closure mode.
    #[arg(long = "alpha-resolution", default_value_t = 20)]
    pub alpha_resolution: usize,
    /// In closure mode, emit the outer boundary instead of grid membership.
    #[arg(long)]
    pub envelope: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Add the truncated-chain mean queue length.
    #[arg(long)]
    pub oracle: bool,
    /// Largest truncation level for the oracle.
    #[arg(long = "N", default_value_t = 256)]
    pub n: usize,
    /// Tail-mass threshold for the oracle.
    #[arg(long, default_value_t = 1e-8)]
    pub tail: f64,
    #[arg(long = "global-malfunction")]
    pub global_malfunction: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: Common,
    /// `NAME:START:STOP:STEPS` over a symmetric parameter.
    #[arg(long, value_parser = parse_sweep)]
    pub sweep: Sweep,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_sweep, default_value = "lambda:0.01:0.2:20")]
    pub sweep: Sweep,
    /// Signal probability of the baseline network.
    #[arg(long = "baseline-s", default_value_t = 0.0)]
    pub baseline_s: f64,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BvpArgs {
    #[command(flatten)]
    pub common: Common,
    /// Grid size, a power of two ≥ 256.
    #[arg(long = "M", default_value_t = 1024)]
    pub m: usize,
    /// Double M until successive solutions agree to 1e-7.
    #[arg(long)]
    pub adaptive: bool,
}

/// One swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|k| self.start + (self.stop - self.start) * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err("expected NAME:START:STOP:STEPS".into());
    }
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let steps: usize = parts[3].parse().map_err(|e| format!("{:?}: {e}", parts[3]))?;
    if steps < 2 {
        return Err("sweep needs at least 2 steps".into());
    }
    Ok(Sweep {
        name: parts[0].to_string(),
        start: num(parts[1])?,
        stop: num(parts[2])?,
        steps,
    })
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a count"))?;
    if v < 0.0 || v.fract() != 0.0 || v > 1e18 {
        return Err(format!("{s:?} is not a count"));
    }
    Ok(v as u64)
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: if e.is_input_error() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: msg.into(),
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Entry point of the binary; returns the exit code.
pub fn main() -> i32 {
    run(std::env::args_os())
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {}", e.message);
        return e.code;
    }
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("RAGNET_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| config_error(format!("RAGNET_THREADS={v:?} is not a positive integer")))?;
        // A pool that already exists keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn execute(cmd: &Command) -> CliResult<()> {
    match cmd {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Region(a) => cmd_region(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Bvp(a) => cmd_bvp(a),
    }
}

fn load_value(common: &Common) -> CliResult<Option<Value>> {
    let Some(path) = &common.params else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    Ok(Some(v))
}

fn overrides(common: &Common) -> CliResult<Vec<(String, f64)>> {
    common
        .set
        .iter()
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| config_error(format!("--set {s:?}: expected NAME=VALUE")))?;
            let v: f64 = v.parse().map_err(|_| config_error(format!("--set {s:?}: bad value")))?;
            Ok((k.to_string(), v))
        })
        .collect()
}

fn is_full(v: &Value) -> bool {
    v.get("lambda1").is_some()
}

/// Full parameters; symmetric input is embedded.
fn load_model(common: &Common, fallback: ModelParams) -> CliResult<ModelParams> {
    let mut p = match load_value(common)? {
        None => fallback,
        Some(v) if is_full(&v) => serde_json::from_value(v).map_err(|e| config_error(e.to_string()))?,
        Some(v) => serde_json::from_value::<SymmetricParams>(v)
            .map_err(|e| config_error(e.to_string()))?
            .embed(),
    };
    for (k, v) in overrides(common)? {
        if !p.set(&k, v) {
            // A symmetric name sets both users.
            let pair = [("lambda", "lambda1", "lambda2"), ("alpha", "alpha1", "alpha2"), ("s", "s1", "s2")];
            if let Some((_, a, b)) = pair.iter().find(|(n, _, _)| *n == k) {
                p.set(a, v);
                p.set(b, v);
            } else if k == "l_plus" || k == "l_minus" {
                let other = 1.0 - v;
                let (plus, minus) = if k == "l_plus" { (v, other) } else { (other, v) };
                for (n, x) in [("l1_plus", plus), ("l2_plus", plus), ("l1_minus", minus), ("l2_minus", minus)] {
                    p.set(n, x);
                }
            } else {
                return Err(config_error(format!("unknown parameter {k:?}")));
            }
        }
    }
    Ok(p.validate()?)
}

fn load_symmetric(common: &Common, fallback: SymmetricParams) -> CliResult<SymmetricParams> {
    let mut p = match load_value(common)? {
        None => fallback,
        Some(v) if is_full(&v) => {
            let full: ModelParams = serde_json::from_value(v).map_err(|e| config_error(e.to_string()))?;
            full.symmetric()
                .ok_or_else(|| config_error("parameters are not symmetric"))?
        }
        Some(v) => serde_json::from_value(v).map_err(|e| config_error(e.to_string()))?,
    };
    for (k, v) in overrides(common)? {
        if !p.set(&k, v) {
            return Err(config_error(format!("unknown symmetric parameter {k:?}")));
        }
    }
    Ok(p.validate()?)
}

/// Rows with named columns; `Null` cells print empty in CSV.
struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(headers: Vec<&'static str>) -> Self {
        Table { headers, rows: Vec::new() }
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: serde_json::Map<String, Value> =
                        self.headers.iter().map(|h| h.to_string()).zip(r.iter().cloned()).collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn opt(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

fn emit(common: &Common, default: Format, command: &str, config: Value, body: Payload) -> CliResult<()> {
    let format = common.format.unwrap_or(default);
    let mut buf: Vec<u8> = Vec::new();
    match format {
        Format::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("command".into(), json!(command));
            doc.insert("config".into(), config);
            match body {
                Payload::Table(t) => {
                    doc.insert("rows".into(), t.to_json());
                }
                Payload::Object(key, v) => {
                    doc.insert(key.into(), v);
                }
            }
            serde_json::to_writer_pretty(&mut buf, &Value::Object(doc)).map_err(|e| config_error(e.to_string()))?;
            buf.push(b'\n');
        }
        Format::Csv => {
            writeln!(buf, "# ragnet {command} {config}").expect("write to memory");
            let table = match body {
                Payload::Table(t) => t,
                Payload::Object(_, v) => flatten_object(&v),
            };
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&table.headers).map_err(|e| config_error(e.to_string()))?;
            for r in &table.rows {
                w.write_record(r.iter().map(cell)).map_err(|e| config_error(e.to_string()))?;
            }
            w.flush().map_err(|e| config_error(e.to_string()))?;
        }
    }
    match &common.out {
        Some(path) => std::fs::write(path, &buf).map_err(|e| config_error(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&buf)
            .map_err(|e| config_error(e.to_string())),
    }
}

enum Payload {
    Table(Table),
    Object(&'static str, Value),
}

/// `field,value` rows of a JSON object, nested keys joined by dots.
fn flatten_object(v: &Value) -> Table {
    fn walk(prefix: &str, v: &Value, rows: &mut Vec<Vec<Value>>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, rows);
                }
            }
            other => rows.push(vec![json!(prefix), other.clone()]),
        }
    }
    let mut t = Table::new(vec!["field", "value"]);
    walk("", v, &mut t.rows);
    t
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<()> {
    let p = load_model(&a.common, SymmetricParams::new(0.1, 0.5, 0.2, 0.5).embed())?;
    let burn_in = a.burn_in.unwrap_or(a.slots / 10);
    if a.slots <= burn_in {
        return Err(config_error("slots must exceed burn-in"));
    }
    if a.batches < 2 {
        return Err(config_error("at least 2 batches are needed"));
    }
    let cfg = SimConfig {
        slots: a.slots,
        burn_in,
        seed: a.seed,
        batches: a.batches,
        variant: variant(a.global_malfunction),
    };
    let dominant = a.dominant.map(|d| match d {
        DominantArg::R1 => Dominant::R1,
        DominantArg::R2 => Dominant::R2,
    });
    let (stats, formula) = match dominant {
        Some(d) => {
            if a.replications > 1 {
                return Err(config_error("--replications is not available with --dominant"));
            }
            let rates = dominant_rates(&p, d)?;
            (simulate_dominant(&p, d, &cfg), Some(rates))
        }
        None => (simulate_replications_or_single(&p, &cfg, a.replications), None),
    };
    let config = json!({
        "params": p,
        "seed": a.seed,
        "slots": a.slots,
        "burn_in": burn_in,
        "batches": a.batches,
        "replications": a.replications,
        "dominant": dominant,
        "global_malfunction": a.global_malfunction,
    });
    let body = json!({ "stats": stats, "dominant_formula": formula });
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Json => emit(&a.common, Format::Csv, "simulate", config, Payload::Object("result", body)),
        Format::Csv => {
            let mut t = Table::new(vec!["field", "value", "se"]);
            let (v, se) = (stats.values(), stats.std_errors());
            for (i, name) in crate::chain::stats::FIELDS.iter().enumerate() {
                t.rows.push(vec![json!(name), num(v[i]), num(se[i])]);
            }
            t.rows.push(vec![json!("slots"), json!(stats.slots), Value::Null]);
            t.rows.push(vec![json!("diverged"), json!(stats.diverged), Value::Null]);
            if let (Some(r), Some(d)) = (formula, dominant) {
                let name = match d {
                    Dominant::R1 => "formula_p_empty2",
                    Dominant::R2 => "formula_p_empty1",
                };
                t.rows.push(vec![json!(name), num(r.p_empty_other), Value::Null]);
            }
            emit(&a.common, Format::Csv, "simulate", config, Payload::Table(t))
        }
    }
}

fn simulate_replications_or_single(p: &ModelParams, cfg: &SimConfig, r: u64) -> SimStats {
    if r > 1 {
        simulate_replications(p, cfg, r)
    } else {
        simulate(p, cfg)
    }
}

fn variant(global: bool) -> KernelVariant {
    if global {
        KernelVariant::GlobalMalfunction
    } else {
        KernelVariant::Explicit
    }
}

fn which_list(w: Option<RegionKind>) -> Vec<Which> {
    match w {
        Some(k) => vec![k.into()],
        None => vec![Which::Stability, Which::Throughput],
    }
}

fn which_name(w: Which) -> &'static str {
    match w {
        Which::Stability => "stability",
        Which::Throughput => "throughput",
    }
}

fn cmd_region(a: &RegionArgs) -> CliResult<()> {
    let p = load_model(&a.common, SymmetricParams::new(0.1, 0.5, 0.1, 0.2).embed())?;
    let whiches = which_list(a.which);
    let config = json!({
        "params": p,
        "mode": format!("{:?}", a.mode).to_lowercase(),
        "which": whiches.iter().map(|w| which_name(*w)).collect::<Vec<_>>(),
        "resolution": a.resolution,
        "alpha_resolution": a.alpha_resolution,
        "envelope": a.envelope,
    });
    let table = match a.mode {
        Mode::Point => {
            let (l1, l2) = (a.lambda1.unwrap_or(p.lambda1), a.lambda2.unwrap_or(p.lambda2));
            if !(0.0..=1.0).contains(&l1) || !(0.0..=1.0).contains(&l2) {
                return Err(config_error("arrival rates out of [0,1]"));
            }
            let mut t = Table::new(vec![
                "which", "lambda1", "lambda2", "member", "via", "boundary", "margin_r1_q1", "margin_r1_q2",
                "margin_r2_q2", "margin_r2_q1", "drift",
            ]);
            for w in &whiches {
                let v = region_verdict(l1, l2, &p, *w);
                let drift = match (w, classify_drift(l1, l2, &p)) {
                    (Which::Stability, Ok(d)) => json!(d.verdict.to_string()),
                    (Which::Stability, Err(_)) => json!("indeterminate"),
                    _ => Value::Null,
                };
                let mut row = vec![json!(which_name(*w)), num(l1), num(l2), json!(v.member), json!(v.via.to_string()), json!(v.boundary)];
                row.extend(v.margins.iter().map(|&m| num(m)));
                row.push(drift);
                t.rows.push(row);
            }
            t
        }
        Mode::Boundary => {
            let mut t = Table::new(vec!["which", "lambda1", "lambda2"]);
            for w in &whiches {
                for (l1, l2) in trace_boundary(&p, *w, a.resolution)? {
                    t.rows.push(vec![json!(which_name(*w)), num(l1), num(l2)]);
                }
            }
            t
        }
        Mode::Closure if a.envelope => {
            let mut t = Table::new(vec!["which", "lambda1", "lambda2"]);
            for w in &whiches {
                for (l1, l2) in closure_boundary(&p, *w, a.alpha_resolution, a.resolution)? {
                    t.rows.push(vec![json!(which_name(*w)), num(l1), num(l2)]);
                }
            }
            t
        }
        Mode::Closure => {
            let mut t = Table::new(vec!["which", "lambda1", "lambda2", "member"]);
            for w in &whiches {
                let g = region_closure(&p, *w, a.alpha_resolution, a.resolution)?;
                let n = g.lambdas.len();
                for i in 0..n {
                    for j in 0..n {
                        t.rows.push(vec![json!(which_name(*w)), num(g.lambdas[i]), num(g.lambdas[j]), json!(g.at(i, j))]);
                    }
                }
            }
            t
        }
    };
    emit(&a.common, Format::Csv, "region", config, Payload::Table(table))
}

fn oracle_config(o: &OracleArgs) -> CliResult<OracleConfig> {
    let base = OracleConfig::default();
    if o.n < base.n0 {
        return Err(config_error(format!("--N must be at least {}", base.n0)));
    }
    Ok(OracleConfig {
        n_max: o.n,
        tail_tol: o.tail,
        variant: variant(o.global_malfunction),
        ..base
    })
}

/// Bounds and, optionally, the oracle mean at one symmetric point.
struct BoundRow {
    stable: bool,
    low: Option<f64>,
    up: Option<f64>,
    near_singular: Option<bool>,
    oracle: Option<f64>,
}

fn bound_row(p: &SymmetricParams, oracle: Option<&OracleConfig>) -> CliResult<BoundRow> {
    p.validate()?;
    if !symmetric_stability(p).stable {
        return Ok(BoundRow {
            stable: false,
            low: None,
            up: None,
            near_singular: None,
            oracle: None,
        });
    }
    let b = queue_bounds(p)?;
    let oracle = match oracle {
        None => None,
        Some(cfg) => match truncated_stationary(&p.embed(), cfg) {
            Ok(sol) => Some(sol.stats.mean_q1),
            Err(e @ Error::TruncationInsufficient { .. }) => {
                eprintln!("warning: {p:?}: {e}");
                None
            }
            Err(e) => return Err(e.into()),
        },
    };
    Ok(BoundRow {
        stable: true,
        low: Some(b.l_low),
        up: Some(b.l_up),
        near_singular: Some(b.near_singular),
        oracle,
    })
}

fn swept(base: &SymmetricParams, sweep: &Sweep) -> CliResult<Vec<(f64, SymmetricParams)>> {
    sweep
        .values()
        .into_iter()
        .map(|x| {
            let mut p = *base;
            if !p.set(&sweep.name, x) {
                return Err(config_error(format!("unknown sweep parameter {:?}", sweep.name)));
            }
            Ok((x, p))
        })
        .collect()
}

fn cmd_bounds(a: &BoundsArgs) -> CliResult<()> {
    let base = load_symmetric(&a.common, SymmetricParams::new(0.1, 0.5, 0.2, 0.5))?;
    let points = swept(&base, &a.sweep)?;
    let ocfg = if a.oracle.oracle { Some(oracle_config(&a.oracle)?) } else { None };
    let rows: Vec<BoundRow> = points
        .par_iter()
        .map(|(_, p)| bound_row(p, ocfg.as_ref()))
        .collect::<CliResult<_>>()?;
    let mut headers = vec!["x", "stable", "L_low", "L_up", "gap", "near_singular"];
    if a.oracle.oracle {
        headers.push("L_oracle");
    }
    let mut t = Table::new(headers);
    for ((x, _), r) in points.iter().zip(&rows) {
        let gap = r.low.zip(r.up).map(|(l, u)| u - l);
        let mut row = vec![
            num(*x),
            json!(r.stable),
            opt(r.low),
            opt(r.up),
            opt(gap),
            r.near_singular.map(Value::Bool).unwrap_or(Value::Null),
        ];
        if a.oracle.oracle {
            row.push(opt(r.oracle));
        }
        t.rows.push(row);
    }
    let config = json!({ "params": base, "sweep": a.sweep, "oracle": ocfg.as_ref().map(|c| json!({"n_max": c.n_max, "tail_tol": c.tail_tol})) });
    emit(&a.common, Format::Csv, "bounds", config, Payload::Table(t))
}

fn cmd_compare(a: &CompareArgs) -> CliResult<()> {
    let ragn = load_symmetric(&a.common, SymmetricParams::new(0.1, 0.6, 0.1, 1.0))?;
    let mut aloha = ragn;
    aloha.s = a.baseline_s;
    aloha.validate()?;
    let pr = swept(&ragn, &a.sweep)?;
    let pa = swept(&aloha, &a.sweep)?;
    let ocfg = if a.oracle.oracle { Some(oracle_config(&a.oracle)?) } else { None };
    let rows: Vec<(BoundRow, BoundRow)> = pr
        .par_iter()
        .zip(pa.par_iter())
        .map(|((_, p), (_, q))| Ok((bound_row(p, ocfg.as_ref())?, bound_row(q, ocfg.as_ref())?)))
        .collect::<CliResult<_>>()?;
    let mut headers = vec![
        "x", "ragn_stable", "baseline_stable", "ragn_L_low", "ragn_L_up", "baseline_L_low", "baseline_L_up",
    ];
    if a.oracle.oracle {
        headers.extend(["ragn_oracle", "baseline_oracle"]);
    }
    headers.push("diff");
    let mut t = Table::new(headers);
    for ((x, _), (r, b)) in pr.iter().zip(&rows) {
        let mut row = vec![num(*x), json!(r.stable), json!(b.stable), opt(r.low), opt(r.up), opt(b.low), opt(b.up)];
        let diff = if a.oracle.oracle {
            row.push(opt(r.oracle));
            row.push(opt(b.oracle));
            r.oracle.zip(b.oracle).map(|(u, v)| u - v)
        } else {
            r.low.zip(b.low).map(|(u, v)| u - v)
        };
        row.push(opt(diff));
        t.rows.push(row);
    }
    let config = json!({
        "ragn": ragn,
        "baseline": aloha,
        "sweep": a.sweep,
        "oracle": ocfg.as_ref().map(|c| json!({"n_max": c.n_max, "tail_tol": c.tail_tol})),
    });
    emit(&a.common, Format::Csv, "compare", config, Payload::Table(t))
}

fn cmd_bvp(a: &BvpArgs) -> CliResult<()> {
    let p = load_symmetric(&a.common, SymmetricParams::new(0.1, 0.5, 0.2, 0.5))?;
    let sol = if a.adaptive {
        solve_adaptive(&p, a.m, 1 << 16, 1e-7)?
    } else {
        solve_riemann(&p, a.m)?
    };
    let config = json!({ "params": p, "M": a.m, "adaptive": a.adaptive });
    let v = serde_json::to_value(&sol).map_err(|e| config_error(e.to_string()))?;
    emit(&a.common, Format::Json, "bvp", config, Payload::Object("solution", v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        let s = parse_sweep("alpha:0.3:0.6:4").unwrap();
        assert_eq!(s.values().len(), 4);
        assert!((s.values()[3] - 0.6).abs() < 1e-15);
        assert!(parse_sweep("alpha:0.3:0.6:1").is_err());
        assert!(parse_sweep("alpha:0.3").is_err());
    }

    #[test]
    fn count_parsing() {
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_count("250").unwrap(), 250);
        assert!(parse_count("1.5").is_err());
    }

    #[test]
    fn flatten_nested() {
        let t = flatten_object(&json!({"a": 1, "b": {"c": true}}));
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[1][0], json!("b.c"));
    }
}
