//! The `dyngeo` command line. Everything runs through [`run_cli`] so the
//! binary stays a one-liner and tests can drive commands in-process.
//!
//! Exit codes: 0 success, 1 internal failure (or a certificate that fails
//! validation), 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::run_bench;
use crate::dynamic::{sweep, SampleJson, Segment, SweepConfig};
use crate::error::Error;
use crate::geodesic::{compute_geodesic, eval_point, validate_supports, GeodesicJson, SupportSequence, Violation};
use crate::tree_model::{parse_newick, serialize_newick, LabelSet, PhyloTree, Split};

#[derive(Debug, Parser)]
#[command(name = "dyngeo", version, about = "Geodesics between phylogenetic trees and their maintenance along a moving endpoint")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Tree arguments are file paths, or inline Newick strings starting with `(`.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Geodesic distance between two trees, with a support summary.
    Distance {
        x: String,
        t: String,
        /// Emit the geodesic certificate as JSON.
        #[arg(long)]
        json: bool,
        /// Ignore pendant edges of both trees.
        #[arg(long)]
        exclude_leaves: bool,
        /// Print each pair's incompatibility network and flow as JSON.
        #[arg(long)]
        dump_networks: bool,
    },
    /// The tree at parameter LAMBDA along the geodesic, as Newick.
    Eval {
        x: String,
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Sweep X0 -> X1 (same topology) against a fixed T and report events.
    Sweep {
        x0: String,
        x1: String,
        t: String,
        /// Number of evenly spaced distance samples to print.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
    /// Check a geodesic certificate (JSON) against two trees.
    Validate {
        x: String,
        t: String,
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compare sweep updates with scratch recomputation on random segments.
    Bench {
        #[arg(long, default_value_t = 20)]
        leaves: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Omit wall-clock columns so output depends only on the seed.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ToleranceArgs {
    /// Arc flows at or below this count as empty (overrides DYNGEO_TOLERANCE).
    #[arg(long, value_parser = positive)]
    pub residual_tol: Option<f64>,
    /// Relative tolerance for equal ratios when merging pairs.
    #[arg(long, value_parser = positive)]
    pub ratio_tol: Option<f64>,
    /// Events closer than this are simultaneous.
    #[arg(long, value_parser = positive)]
    pub event_tol: Option<f64>,
    /// Abort a sweep after this many events.
    #[arg(long)]
    pub max_events: Option<usize>,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

impl ToleranceArgs {
    fn config(&self) -> Result<SweepConfig, Failure> {
        let mut cfg = SweepConfig::from_env().map_err(Failure::from)?;
        if let Some(v) = self.residual_tol {
            cfg.residual_tol = v;
        }
        if let Some(v) = self.ratio_tol {
            cfg.ratio_tol = v;
        }
        if let Some(v) = self.event_tol {
            cfg.event_tol = v;
        }
        cfg.max_events = self.max_events;
        Ok(cfg)
    }
}

enum Failure {
    Input(String),
    Internal(String),
    /// The reader went away; stop without a message.
    ClosedPipe,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) | Error::EventCap(_) | Error::InvalidNetwork(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure::ClosedPipe;
        }
        Failure::Internal(format!("write failed: {e}"))
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(err, "internal error: {msg}");
            1
        }
        Err(Failure::ClosedPipe) => 0,
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Distance {
            x,
            t,
            json,
            exclude_leaves,
            dump_networks,
        } => cmd_distance(&x, &t, json, exclude_leaves, dump_networks, out),
        Command::Eval { x, t, lambda } => cmd_eval(&x, &t, lambda, out),
        Command::Sweep {
            x0,
            x1,
            t,
            samples,
            json,
            tolerances,
        } => cmd_sweep(&x0, &x1, &t, samples, json, &tolerances.config()?, out),
        Command::Validate {
            x,
            t,
            certificate,
            json,
        } => cmd_validate(&x, &t, &certificate, json, out),
        Command::Bench {
            leaves,
            trials,
            seed,
            no_timing,
            json,
            tolerances,
        } => {
            let report = run_bench(leaves, trials, seed, &tolerances.config()?)?;
            if json {
                writeln!(out, "{}", to_json(&report)?)?;
            } else {
                write!(out, "{}", report.render(!no_timing))?;
                if trials > 0 {
                    writeln!(
                        out,
                        "sweep_aug <= scratch_aug on {} of {} trials",
                        report.sweep_wins(),
                        trials
                    )?;
                }
            }
            Ok(0)
        }
    }
}

fn read_text(arg: &str) -> Result<String, Failure> {
    if arg.trim_start().starts_with('(') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Failure::Input(format!("cannot read `{arg}`: {e}")))
}

fn read_tree(arg: &str, labels: Option<LabelSet>) -> Result<PhyloTree, Failure> {
    let text = read_text(arg)?;
    parse_newick(&text, labels).map_err(|e| Failure::Input(format!("{arg}: {e}")))
}

fn read_pair(x: &str, t: &str) -> Result<(PhyloTree, PhyloTree), Failure> {
    let x = read_tree(x, None)?;
    let t = read_tree(t, Some(x.labels()))?;
    Ok((x, t))
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Internal(e.to_string()))
}

fn list(splits: &[Split]) -> String {
    let parts: Vec<String> = splits.iter().map(|s| s.to_string()).collect();
    format!("[{}]", parts.join(" "))
}

fn cmd_distance(x: &str, t: &str, json: bool, exclude_leaves: bool, dump: bool, out: &mut dyn Write) -> Outcome {
    let (mut x, mut t) = read_pair(x, t)?;
    if exclude_leaves {
        x = x.without_leaf_edges();
        t = t.without_leaf_edges();
    }
    let geo = compute_geodesic(&x, &t)?;
    if json {
        writeln!(out, "{}", to_json(&geo.to_json())?)?;
    } else {
        writeln!(out, "{:.12}", geo.distance)?;
        writeln!(out, "k = {}", geo.supports.k())?;
        for (i, p) in geo.supports.pairs().iter().enumerate() {
            writeln!(
                out,
                "pair {}: |A| = {:.12} |B| = {:.12} ratio = {:.12}  A = {}  B = {}",
                i,
                p.norm_a(),
                p.norm_b(),
                p.ratio(),
                list(&p.a_splits()),
                list(&p.b_splits())
            )?;
        }
        writeln!(out, "common edges = {}", geo.supports.common().len())?;
    }
    if dump {
        for (i, p) in geo.supports.pairs().iter().enumerate() {
            let net = p.network()?;
            let flow = crate::flow::max_flow(&net, None);
            let dumped = serde_json::json!({ "pair": i, "network": net.debug_json(Some(&flow)) });
            writeln!(out, "{}", dumped)?;
        }
    }
    Ok(0)
}

fn cmd_eval(x: &str, t: &str, lambda: f64, out: &mut dyn Write) -> Outcome {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda).into());
    }
    let (x, t) = read_pair(x, t)?;
    let geo = compute_geodesic(&x, &t)?;
    writeln!(out, "{}", serialize_newick(&eval_point(&geo, lambda)?))?;
    Ok(0)
}

fn sample_points(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

fn cmd_sweep(
    x0: &str,
    x1: &str,
    t: &str,
    samples: usize,
    json: bool,
    cfg: &SweepConfig,
    out: &mut dyn Write,
) -> Outcome {
    let a = read_tree(x0, None)?;
    let b = read_tree(x1, Some(a.labels()))?;
    let target = read_tree(t, Some(a.labels()))?;
    let seg = Segment::new(a, b, target).map_err(|e| match e {
        Error::OrthantMismatch(_) => Failure::Input("segment must stay in one orthant: X0 and X1 have different topologies".into()),
        e => e.into(),
    })?;
    let res = sweep(&seg, cfg)?;
    let rows = sample_points(samples)
        .into_iter()
        .map(|l| Ok(SampleJson { lambda: l, distance: res.distance_at(l)? }))
        .collect::<Result<Vec<_>, Error>>()?;
    if json {
        let mut j = res.to_json();
        j.samples = rows;
        writeln!(out, "{}", to_json(&j)?)?;
        return Ok(0);
    }
    let n = res.events.len();
    writeln!(out, "{n} event{}", if n == 1 { "" } else { "s" })?;
    for (i, e) in res.events.iter().enumerate() {
        let what = match e.kind {
            crate::dynamic::EventKind::P2 => "P2Merge",
            crate::dynamic::EventKind::P3 => "P3Split",
        };
        writeln!(
            out,
            "event {i}: lambda = {:.12} kind = {what} pair = {} A = {} B = {} distance = {:.12}",
            e.lambda,
            e.pair_index,
            list(&e.cover_a),
            list(&e.cover_b),
            e.distance_after
        )?;
    }
    if !rows.is_empty() {
        writeln!(out, "lambda distance")?;
        for r in rows {
            writeln!(out, "{:.12} {:.12}", r.lambda, r.distance)?;
        }
    }
    Ok(0)
}

fn cmd_validate(x: &str, t: &str, cert: &std::path::Path, json: bool, out: &mut dyn Write) -> Outcome {
    let (x, t) = read_pair(x, t)?;
    let text = std::fs::read_to_string(cert)
        .map_err(|e| Failure::Input(format!("cannot read `{}`: {e}", cert.display())))?;
    let parsed: GeodesicJson = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("certificate does not match geodesic.v1: {e}")))?;
    let seq = SupportSequence::from_json(&parsed, &x, &t)?;
    let report = validate_supports(&seq, &x, &t);
    if json {
        writeln!(out, "{}", to_json(&report)?)?;
    } else if report.is_valid() {
        writeln!(out, "PASS")?;
    } else {
        for v in &report.violations {
            let line = match v {
                Violation::Structure { message } => format!("FAIL(structure): {message}"),
                Violation::P1 { later, earlier, a, b } => {
                    format!("FAIL(P1): A of pair {later} has {a}, incompatible with {b} in B of pair {earlier}")
                }
                Violation::P2 { index, left, right } => format!(
                    "FAIL(P2): ratio of pair {index} is {left:.12} > {right:.12} of pair {}",
                    index + 1
                ),
                Violation::P3 { index, c1, d1, c2, d2 } => format!(
                    "FAIL(P3): pair {index} splits into ({}, {}) ({}, {})",
                    list(c1),
                    list(d1),
                    list(c2),
                    list(d2)
                ),
            };
            writeln!(out, "{line}")?;
        }
    }
    Ok(if report.is_valid() { 0 } else { 1 })
}
