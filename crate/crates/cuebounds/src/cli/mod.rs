//! The `cuebounds` command line.
//!
//! Exit codes: 0 success, 1 a suite failed or a computation did not
//! converge, 2 usage or invalid input, 3 a theorem hypothesis is violated.

mod output;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::delta2_numeric_m1;
use crate::bounds::{delta2_bound_curve, delta_chain, gamma_table_certify, table_cm, theta_curve, tv_alpha};
use crate::error::Error;
use crate::montecarlo::sample_traces;
use crate::spectral::char_fn_both;
use crate::trigpoly::XiVector;
use output::{Csv, Report};
pub use suites::{run_suite, SuiteOutcome, SuiteParams, SUITES};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "cuebounds", version, about = "Gaussian-approximation bounds for traces of Haar unitaries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format; `curve` and `sample` default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Replica count for Monte Carlo suites (each suite has its own default).
    #[arg(long, global = true)]
    pub reps: Option<usize>,
    /// Residual tolerance override for the identity suites.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Include wall-clock timing in the report (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    #[value(name = "cM")]
    CM,
    Gamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    Theta,
    #[value(name = "delta2-bound")]
    Delta2Bound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimateKind {
    #[value(name = "delta2-m1")]
    Delta2M1,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Δ⁽²⁾, Δ⁽¹⁾, total-variation and W₂ bounds with the Θ breakdown.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Also report the n^{-α} total-variation corollary.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Reproduce the c(M) table or certify the γ table.
    Table { kind: TableKind },
    /// Θ⁰…Θ³ (theta) or the Δ⁽²⁾ bound along a range of n.
    Curve {
        kind: CurveKind,
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// start:end:step
        #[arg(long = "n-range", default_value = "30:6000:3")]
        n_range: String,
    },
    /// F_{n,m}(ξ) by the Toeplitz and Borodin–Okounkov routes.
    Charfn {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// ξ₁,…,ξ_{2m}
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        xi: Vec<f64>,
    },
    /// Run a verification suite; exit 0 iff every gate passes.
    Verify {
        suite: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Numerical estimates.
    Estimate {
        kind: EstimateKind,
        #[arg(long)]
        n: usize,
    },
    /// Normalised traces T_k of Haar samples.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
    },
}

enum Outcome {
    Done,
    SuiteFailed,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) => 2,
            Error::Applicability(_) => 3,
            Error::Convergence(_) | Error::Numerical(_) => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::SuiteFailed) => 1,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn parse_range(s: &str) -> Result<(usize, usize, usize), Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || usage(format!("--n-range wants start:end:step, got {s}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<usize> = parts.iter().map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    Ok((v[0], v[1], v[2]))
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(usage("--threads must be positive"));
        }
        // a second call in the same process keeps the first pool, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let start = Instant::now();
    let mut outcome = Outcome::Done;
    let sink = Sink { path: cli.out.clone() };
    match &cli.command {
        Command::Bounds { n, m, alpha } => {
            let report = delta_chain(*n, *m)?;
            let mut results = serde_json::to_value(&report).unwrap_or(Value::Null);
            if let Some(a) = alpha {
                results["tv_alpha"] = serde_json::to_value(tv_alpha(*n as u64, *a)?).unwrap_or(Value::Null);
            }
            let inputs = json!({"n": n, "m": m, "alpha": alpha});
            emit_json(cli, &sink, "bounds", inputs, results, None, start)?;
        }
        Command::Table { kind } => {
            let fmt = cli.format.unwrap_or(Format::Json);
            match kind {
                TableKind::CM => {
                    let rows = table_cm()?;
                    let pass = rows.iter().all(|r| r.within_tol);
                    if fmt == Format::Csv {
                        let mut c = Csv::new("table cM", &["M", "gamma", "computed", "printed", "rel_err", "within_tol"]);
                        for r in &rows {
                            c.row(&[
                                r.big_m.to_string(),
                                fmt_f(r.gamma),
                                fmt_f(r.computed),
                                fmt_f(r.printed),
                                fmt_f(r.rel_err),
                                r.within_tol.to_string(),
                            ]);
                        }
                        sink.write(&c.finish())?;
                    } else {
                        let results = serde_json::to_value(&rows).unwrap_or(Value::Null);
                        emit_json(cli, &sink, "table cM", json!({}), results, Some(pass), start)?;
                    }
                }
                TableKind::Gamma => {
                    let cert = gamma_table_certify()?;
                    if fmt == Format::Csv {
                        let mut c = Csv::new("table gamma", &["m", "gamma", "theta", "lhs", "rhs", "slack"]);
                        for r in &cert.rows {
                            c.row(&[
                                r.m.to_string(),
                                fmt_f(r.gamma),
                                fmt_f(r.theta),
                                fmt_f(r.lhs),
                                fmt_f(r.rhs),
                                fmt_f(r.slack),
                            ]);
                        }
                        sink.write(&c.finish())?;
                    } else {
                        let pass = cert.passed;
                        let results = serde_json::to_value(&cert).unwrap_or(Value::Null);
                        emit_json(cli, &sink, "table gamma", json!({}), results, Some(pass), start)?;
                    }
                }
            }
        }
        Command::Curve { kind, m, n_range } => {
            let (a, b, s) = parse_range(n_range)?;
            let fmt = cli.format.unwrap_or(Format::Csv);
            match kind {
                CurveKind::Theta => {
                    let rows = theta_curve(*m, a, b, s)?;
                    if fmt == Format::Csv {
                        let mut c = Csv::new(
                            "curve theta",
                            &["n", "N", "log10_theta0", "log10_theta1", "log10_theta2", "log10_theta3"],
                        );
                        c.meta("m", m.to_string());
                        c.meta("n_range", n_range.clone());
                        c.meta("note", "log10_theta1 is empty where its Gamma argument leaves the domain");
                        for r in &rows {
                            c.row(&[
                                r.n.to_string(),
                                fmt_f(r.big_n),
                                fmt_f(r.log10_theta0),
                                r.log10_theta1.map(fmt_f).unwrap_or_default(),
                                fmt_f(r.log10_theta2),
                                fmt_f(r.log10_theta3),
                            ]);
                        }
                        sink.write(&c.finish())?;
                    } else {
                        let results = serde_json::to_value(&rows).unwrap_or(Value::Null);
                        emit_json(cli, &sink, "curve theta", json!({"m": m, "n_range": n_range}), results, None, start)?;
                    }
                }
                CurveKind::Delta2Bound => {
                    let rows = delta2_bound_curve(*m, a, b, s)?;
                    if fmt == Format::Csv {
                        let mut c = Csv::new("curve delta2-bound", &["n", "log10_delta2_bound"]);
                        c.meta("m", m.to_string());
                        c.meta("n_range", n_range.clone());
                        c.meta("quantity", "upper bound on Delta2, not Delta2 itself; rows with N <= 4m are omitted");
                        for (n, v) in &rows {
                            c.row(&[n.to_string(), fmt_f(*v)]);
                        }
                        sink.write(&c.finish())?;
                    } else {
                        let results: Vec<Value> =
                            rows.iter().map(|(n, v)| json!({"n": n, "log10_delta2_bound": v})).collect();
                        let inputs = json!({"m": m, "n_range": n_range, "quantity": "upper bound"});
                        emit_json(cli, &sink, "curve delta2-bound", inputs, Value::Array(results), None, start)?;
                    }
                }
            }
        }
        Command::Charfn { n, m, xi } => {
            if xi.len() != 2 * m {
                return Err(usage(format!("--xi needs 2m = {} values, got {}", 2 * m, xi.len())));
            }
            let v = XiVector::new(xi.clone())?;
            let (t, b) = char_fn_both(&v, *n)?;
            let results = json!({"toeplitz": t, "borodin_okounkov": b, "residual": t.residual});
            emit_json(cli, &sink, "charfn", json!({"n": n, "m": m, "xi": xi}), results, None, start)?;
        }
        Command::Verify { suite, n, m } => {
            let names: Vec<&str> = if suite == "all" {
                SUITES.to_vec()
            } else if SUITES.contains(&suite.as_str()) {
                vec![suite.as_str()]
            } else {
                return Err(usage(format!("unknown suite {suite}; expected all or one of {}", SUITES.join("|"))));
            };
            let params = SuiteParams { seed: cli.seed, reps: cli.reps, tol: cli.tol, n: *n, m: *m };
            let mut outcomes: Vec<SuiteOutcome> = Vec::new();
            for name in names {
                let o = run_suite(name, &params)?;
                eprintln!("{:<13} {}", o.suite, if o.passed { "pass" } else { "FAIL" });
                outcomes.push(o);
            }
            let pass = outcomes.iter().all(|o| o.passed);
            if !pass {
                outcome = Outcome::SuiteFailed;
            }
            let fmt = cli.format.unwrap_or(Format::Json);
            if fmt == Format::Csv {
                let mut c = Csv::new(&format!("verify {suite}"), &["suite", "gate", "value", "limit", "passed"]);
                c.meta("seed", cli.seed.to_string());
                for o in &outcomes {
                    for g in &o.gates {
                        c.row(&[o.suite.clone(), g.name.clone(), fmt_f(g.value), fmt_f(g.limit), g.passed.to_string()]);
                    }
                }
                sink.write(&c.finish())?;
            } else {
                let mut results = serde_json::to_value(&outcomes).unwrap_or(Value::Null);
                if cli.timing {
                    if let Value::Array(items) = &mut results {
                        for (v, o) in items.iter_mut().zip(&outcomes) {
                            v["seconds"] = json!(o.seconds);
                        }
                    }
                }
                let inputs = json!({"suite": suite, "seed": cli.seed, "reps": cli.reps, "tol": cli.tol, "n": n, "m": m});
                emit_json(cli, &sink, "verify", inputs, results, Some(pass), start)?;
            }
        }
        Command::Estimate { kind: EstimateKind::Delta2M1, n } => {
            let q = delta2_numeric_m1(*n)?;
            let results = serde_json::to_value(&q).unwrap_or(Value::Null);
            emit_json(cli, &sink, "estimate delta2-m1", json!({"n": n}), results, None, start)?;
        }
        Command::Sample { n, m, reps } => {
            let reps = cli.reps.unwrap_or(*reps);
            let samples = sample_traces(*n, *m, reps, cli.seed)?;
            let fmt = cli.format.unwrap_or(Format::Csv);
            if fmt == Format::Csv {
                let mut c = Csv::new("sample", &["rep", "k", "re_Tk", "im_Tk"]);
                c.meta("n", n.to_string());
                c.meta("m", m.to_string());
                c.meta("reps", reps.to_string());
                c.meta("seed", cli.seed.to_string());
                c.meta("normalisation", "T_k = sqrt(2/k) Tr U^k");
                for (r, s) in samples.iter().enumerate() {
                    for (k, t) in s.traces.iter().enumerate() {
                        c.row(&[r.to_string(), (k + 1).to_string(), fmt_f(t.re), fmt_f(t.im)]);
                    }
                }
                sink.write(&c.finish())?;
            } else {
                let rows: Vec<&Vec<num_complex::Complex64>> = samples.iter().map(|s| &s.traces).collect();
                let inputs = json!({"n": n, "m": m, "reps": reps, "seed": cli.seed});
                emit_json(cli, &sink, "sample", inputs, json!({ "traces": rows }), None, start)?;
            }
        }
    }
    Ok(outcome)
}

/// Shortest decimal that round-trips.
fn fmt_f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn emit_json(
    cli: &Cli,
    sink: &Sink,
    command: &str,
    inputs: Value,
    results: Value,
    passed: Option<bool>,
    start: Instant,
) -> Result<(), Failure> {
    if cli.format == Some(Format::Csv) {
        return Err(usage(format!("{command} has no csv form")));
    }
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        inputs,
        results,
        passed,
        seconds: cli.timing.then(|| start.elapsed().as_secs_f64()),
    };
    sink.write(&(to_pretty(&report) + "\n"))
}

fn to_pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).unwrap_or_else(|e| format!("{{\"error\": \"{e}\"}}"))
}

struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    fn write(&self, text: &str) -> Result<(), Failure> {
        let io = |e: std::io::Error| Failure { code: 1, message: format!("write failed: {e}") };
        match &self.path {
            Some(p) => std::fs::write(p, text).map_err(io),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(io)?;
                out.flush().map_err(io)
            }
        }
    }
}
