//! Command-line front end. [`run`] does all the work and returns the text
//! and exit code, so it can be driven from tests without a subprocess.

use std::ffi::OsString;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use meanmap_core::averaging::certify_uniform_weak_contractivity;
use meanmap_core::digraph::{default_tg_cap, tg_step, TriStateColoring};
use meanmap_core::invariant::{invariant_mean_eval, subsequence_limits, ConvergenceOptions};
use meanmap_core::oscillation;
use serde::Serialize;
use serde_json::json;

use crate::format::{fmt_point, fmt_sig};
use crate::spec_file::{load_spec, LoadedSpec};
use crate::verify::{run_suite, CheckStatus, VerifyOptions};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_FINDING: u8 = 2;

/// Significant digits in human-readable output.
const HUMAN_DIGITS: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "meanmap", version, about = "Analyze mean-type mappings and their invariant means")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the incidence graph and certify contractivity.
    Analyze {
        /// Spec file, `-` for stdin, or `builtin:<name>`.
        spec: String,
        #[arg(long)]
        json: bool,
    },
    /// Print iterates of the mapping starting from X.
    Iterate {
        spec: String,
        /// Starting point, comma separated.
        #[arg(allow_hyphen_values = true)]
        x: String,
        /// Number of applications.
        #[arg(short = 'n', long = "steps", default_value_t = 10)]
        n: usize,
        /// Print every step instead of only the first and last.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Compute the invariant mean at X, or subsequence limits with --modulus.
    Invariant {
        spec: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long)]
        modulus: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Run the tri-state dynamics on the incidence graph from C0.
    Tg {
        spec: String,
        /// Initial coloring over {-1, 0, 1}, comma separated.
        #[arg(allow_hyphen_values = true)]
        c0: String,
        /// Step cap, 3^p by default.
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Run the sampled property suite.
    Verify {
        spec: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String, code: u8) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code,
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(text, code)
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    match execute(cli.command) {
        Ok((stdout, code)) => Outcome::ok(stdout, code),
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e:#}\n"),
            code: EXIT_ERROR,
        },
    }
}

fn execute(cmd: Command) -> anyhow::Result<(String, u8)> {
    match cmd {
        Command::Analyze { spec, json } => analyze(&load(&spec)?, json),
        Command::Iterate { spec, x, n, trace, json } => iterate(&load(&spec)?, &parse_point(&x)?, n, trace, json),
        Command::Invariant {
            spec,
            x,
            tol,
            max_iter,
            modulus,
            json,
        } => {
            let opts = ConvergenceOptions { tol, max_iter };
            invariant(&load(&spec)?, &parse_point(&x)?, &opts, modulus, json)
        }
        Command::Tg {
            spec,
            c0,
            max_steps,
            json,
        } => tg(&load(&spec)?, &c0, max_steps, json),
        Command::Verify {
            spec,
            samples,
            seed,
            tol,
            json,
        } => {
            let convergence = ConvergenceOptions {
                tol,
                ..ConvergenceOptions::default()
            };
            convergence.validate()?;
            let report = run_suite(&load(&spec)?.mapping, &VerifyOptions { samples, seed, convergence });
            let code = if report.falsified { EXIT_FINDING } else { EXIT_OK };
            if json {
                return Ok((to_json(&report), code));
            }
            let mut out = String::new();
            writeln!(out, "certificate: {} ({})", class_name(report.certificate.class), report.certificate.evidence)?;
            for c in &report.checks {
                let status = match c.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "skipped",
                    CheckStatus::Info => "info",
                };
                writeln!(out, "{:<26} {:<8} {}", c.name, status, c.detail)?;
                for w in &c.witnesses {
                    writeln!(out, "{:<26} witness  {}", "", w)?;
                }
            }
            writeln!(out, "result: {}", if report.falsified { "falsified" } else { "nothing falsified" })?;
            Ok((out, code))
        }
    }
}

fn load(path: &str) -> anyhow::Result<LoadedSpec> {
    load_spec(path).with_context(|| format!("loading spec `{path}`"))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn split_list(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
}

pub fn parse_point(text: &str) -> anyhow::Result<Vec<f64>> {
    split_list(text)
        .map(|s| s.parse::<f64>().map_err(|e| anyhow!("bad coordinate `{s}`: {e}")))
        .collect()
}

fn analyze(spec: &LoadedSpec, json: bool) -> anyhow::Result<(String, u8)> {
    let m = &spec.mapping;
    let class = m.graph().classify();
    let cert = certify_uniform_weak_contractivity(m);
    if json {
        let report = json!({
            "p": m.p(),
            "graph": m.graph(),
            "classification": class,
            "certificate": cert,
        });
        return Ok((to_json(&report), EXIT_OK));
    }
    let mut out = String::new();
    let edges: Vec<String> = m
        .graph()
        .edges_one_based()
        .iter()
        .map(|[a, b]| format!("{a}->{b}"))
        .collect();
    writeln!(out, "p                    {}", m.p())?;
    writeln!(out, "edges                {}", edges.join(" "))?;
    writeln!(out, "irreducible          {}", class.irreducible)?;
    writeln!(out, "period               {}", opt(class.period))?;
    writeln!(out, "aperiodic            {}", class.aperiodic)?;
    writeln!(out, "ergodic              {}", class.ergodic)?;
    writeln!(out, "uniform_walk_length  {}", opt(class.uniform_walk_length))?;
    writeln!(out, "certificate          {}", class_name(cert.class))?;
    writeln!(out, "n0                   {}", opt(cert.n0))?;
    writeln!(out, "evidence             {}", cert.evidence)?;
    Ok((out, EXIT_OK))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "none".into(), |v| v.to_string())
}

fn iterate(spec: &LoadedSpec, x: &[f64], n: usize, trace: bool, json: bool) -> anyhow::Result<(String, u8)> {
    let points = spec.mapping.iterate(x, n)?;
    let shown: Vec<usize> = if trace || n == 0 { (0..=n).collect() } else { vec![0, n] };
    if json {
        let rows: Vec<_> = shown
            .iter()
            .map(|&k| json!({"step": k, "point": points[k], "oscillation": oscillation(&points[k])}))
            .collect();
        return Ok((to_json(&json!({"steps": n, "iterates": rows})), EXIT_OK));
    }
    let mut out = String::new();
    writeln!(out, "{:>6}  {:<60}  oscillation", "step", "point")?;
    for k in shown {
        writeln!(
            out,
            "{k:>6}  {:<60}  {}",
            fmt_point(&points[k], HUMAN_DIGITS),
            fmt_sig(oscillation(&points[k]), HUMAN_DIGITS)
        )?;
    }
    Ok((out, EXIT_OK))
}

fn invariant(
    spec: &LoadedSpec,
    x: &[f64],
    opts: &ConvergenceOptions,
    modulus: Option<usize>,
    json: bool,
) -> anyhow::Result<(String, u8)> {
    let m = &spec.mapping;
    match modulus {
        Some(0) => bail!("--modulus must be at least 1"),
        Some(k) if k > 1 => {
            let s = subsequence_limits(m, x, k, opts)?;
            let code = if s.all_converged() { EXIT_OK } else { EXIT_FINDING };
            if json {
                return Ok((to_json(&s), code));
            }
            let mut out = String::new();
            writeln!(out, "modulus {k}, {} iterations", s.iterations_used)?;
            for l in &s.limits {
                writeln!(
                    out,
                    "residue {:<3} {}  {}",
                    l.residue,
                    fmt_point(&l.point, HUMAN_DIGITS),
                    if l.converged { "converged" } else { "NOT converged" }
                )?;
            }
            writeln!(
                out,
                "cyclic residual {} ({})",
                fmt_sig(s.cyclic_residual, 3),
                if s.cyclic_consistent { "consistent" } else { "inconsistent" }
            )?;
            Ok((out, code))
        }
        _ => {
            let r = invariant_mean_eval(m, x, opts)?;
            let code = if r.converged { EXIT_OK } else { EXIT_FINDING };
            if json {
                return Ok((to_json(&r), code));
            }
            let mut out = String::new();
            match r.value {
                Some(v) => writeln!(
                    out,
                    "K(x) = {} +- {} after {} iterations",
                    fmt_sig(v, HUMAN_DIGITS),
                    fmt_sig(r.error_radius, 3),
                    r.iterations_used
                )?,
                None => writeln!(
                    out,
                    "no convergence after {} iterations; final oscillation {}",
                    r.iterations_used,
                    fmt_sig(2.0 * r.error_radius, HUMAN_DIGITS)
                )?,
            }
            writeln!(out, "final iterate {}", fmt_point(&r.final_iterate, HUMAN_DIGITS))?;
            Ok((out, code))
        }
    }
}

fn tg(spec: &LoadedSpec, c0: &str, max_steps: Option<u64>, json: bool) -> anyhow::Result<(String, u8)> {
    let g = spec.mapping.graph();
    let values: Vec<i8> = split_list(c0)
        .map(|s| s.parse::<i8>().map_err(|e| anyhow!("bad color `{s}`: {e}")))
        .collect::<anyhow::Result<_>>()?;
    let c0 = TriStateColoring::from_values(&values)?;
    if c0.len() != g.n_vertices() {
        bail!("expected {} colors, got {}", g.n_vertices(), c0.len());
    }
    let cap = max_steps.unwrap_or_else(|| default_tg_cap(g.n_vertices()));
    if cap == 0 {
        bail!("--max-steps must be at least 1");
    }
    let mut trajectory = vec![c0];
    let mut steps_to_constant = None;
    for step in 0..=cap {
        let cur = trajectory.last().expect("nonempty");
        if cur.constant_value().is_some() {
            steps_to_constant = Some(step);
            break;
        }
        if step == cap {
            break;
        }
        let next = tg_step(g, cur)?;
        trajectory.push(next);
    }
    let last = trajectory.last().expect("nonempty");
    let constant_value = steps_to_constant.and(last.constant_value());
    let ergodic = g.is_ergodic();
    // on an ergodic graph the dynamics must settle within 3^p steps
    let code = if ergodic && steps_to_constant.is_none() && cap >= default_tg_cap(g.n_vertices()) {
        EXIT_FINDING
    } else {
        EXIT_OK
    };
    if json {
        let report = json!({
            "ergodic": ergodic,
            "cap": cap,
            "trajectory": trajectory,
            "steps_to_constant": steps_to_constant,
            "constant_value": constant_value,
        });
        return Ok((to_json(&report), code));
    }
    let mut out = String::new();
    for (k, c) in trajectory.iter().enumerate() {
        let vals: Vec<String> = c.0.iter().map(|t| format!("{t:>2}")).collect();
        writeln!(out, "{k:>6}  {}", vals.join(" "))?;
    }
    match (steps_to_constant, constant_value) {
        (Some(s), Some(v)) => writeln!(out, "constant {v} at step {s}")?,
        _ => writeln!(out, "cap of {cap} steps reached, never constant")?,
    }
    Ok((out, code))
}

fn class_name(class: meanmap_core::CertificateClass) -> String {
    serde_json::to_value(class)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}
