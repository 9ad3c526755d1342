//! Command-line front end: argument parsing, input decoding, JSON/CSV
//! output and the verification suites.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algorithms::{admissibility_walk, hyperbolicity_scan, hyperbolicity_scan_exact, sample_component, trace_reduce, DEFAULT_MAX_STEPS};
use crate::coords::{classify, parse_signs, triangle_coords, LambdaLengths, SignVector, TriangleCoords};
use crate::dynamics::{ellipse_k, relation_residual, twist34, vieta_flip, OmegaPoint, TraceCoords, Var};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::surface::{edge_curve, peripheral_curve, Edge, Tri, Vertex};
use crate::switches::triangle_switch;
use crate::traces::{curve_trace, edge_curve_trace_with, PairingConvention};
use crate::Exact;

pub mod suites;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_SUITE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "charvar", version = concat!(env!("CARGO_PKG_VERSION"), " (schema 1.0)"))]
#[command(about = "Type-preserving representations of the thrice-punctured projective plane")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Pairing {
    Printed,
    Swapped,
}

impl From<Pairing> for PairingConvention {
    fn from(p: Pairing) -> Self {
        match p {
            Pairing::Printed => PairingConvention::Printed,
            Pairing::Swapped => PairingConvention::Swapped,
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    #[arg(long, value_enum, default_value = "exact", global = true)]
    pub backend: Backend,
    /// RNG seed; falls back to $CHARVAR_SEED, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
}

impl RunConfig {
    pub fn resolved_seed(&self) -> Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var("CHARVAR_SEED") {
            Ok(v) => v.trim().parse().map_err(|_| Error::InvalidInput(format!("CHARVAR_SEED={v}"))),
            Err(_) => Ok(0),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw charts from a component (e, s).
    Sample {
        #[arg(long, allow_hyphen_values = true)]
        euler: i32,
        #[arg(long, allow_hyphen_values = true)]
        signs: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Euler class, cusp signs and subregion of a chart.
    Classify(ChartArgs),
    /// Edge-curve traces (closed forms from X, or the matrix engine from λ).
    Traces {
        #[command(flatten)]
        chart: ChartArgs,
        /// λ-lengths (a..f) instead of triangle coordinates.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, value_enum, default_value = "printed")]
        pairing: Pairing,
    },
    /// Triangle switch along one triangle.
    Switch {
        #[command(flatten)]
        chart: ChartArgs,
        #[arg(long)]
        along: String,
    },
    /// Trace reduction.
    Reduce {
        #[command(flatten)]
        chart: ChartArgs,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Write step,a,b,c,region,u,h,k here.
        #[arg(long)]
        diagnostics: Option<String>,
    },
    /// Tree scan of edge-curve traces (or of switch admissibility).
    Scan {
        #[command(flatten)]
        chart: ChartArgs,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long)]
        admissibility: bool,
    },
    /// Twist orbits on the Ω slice or on the trace variety.
    Orbit {
        #[arg(long, value_enum)]
        space: Space,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long)]
        list: bool,
        /// Test hook: pairing used by the e = ±1 closed form.
        #[arg(long, value_enum, default_value = "printed")]
        pairing: Pairing,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Space {
    Omega,
    Trace,
}

#[derive(Args, Clone, Debug)]
pub struct ChartArgs {
    /// Inline JSON array, or a file holding an array or {"coords", "signs"}.
    #[arg(long, allow_hyphen_values = true)]
    pub coords: Option<String>,
    /// Triangle signs ε, e.g. '[-1,-1,1,1]'.
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<String>,
}

/// Inline JSON, or the contents of a file.
fn load_json(text: &str) -> Result<Value> {
    if let Ok(v) = serde_json::from_str::<Value>(text) {
        return Ok(v);
    }
    let path = Path::new(text);
    let body = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{text}: {e}")))?;
    serde_json::from_str(&body).map_err(|e| Error::InvalidInput(format!("{text}: {e}")))
}

pub fn parse_scalar<T: Scalar>(v: &Value) -> Result<T> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(Error::InvalidInput(format!("not a number: {other}"))),
    };
    T::parse_str(&text).ok_or_else(|| Error::InvalidInput(format!("not a number: {text}")))
}

pub fn parse_scalars<T: Scalar>(v: &Value, n: usize) -> Result<Vec<T>> {
    let arr = v.as_array().ok_or_else(|| Error::InvalidInput("expected an array".into()))?;
    if arr.len() != n {
        return Err(Error::InvalidInput(format!("expected {n} values, got {}", arr.len())));
    }
    arr.iter().map(parse_scalar).collect()
}

fn parse_sign_vector(v: &Value) -> Result<SignVector> {
    let s: Vec<i8> = serde_json::from_value(v.clone()).map_err(|e| Error::InvalidInput(e.to_string()))?;
    SignVector::try_from(s)
}

fn load_chart<T: Scalar>(args: &ChartArgs) -> Result<(TriangleCoords<T>, SignVector)> {
    let coords = args.coords.as_deref().ok_or_else(|| Error::InvalidInput("--coords is required".into()))?;
    let v = load_json(coords)?;
    let (xv, sv) = match &v {
        Value::Object(m) => (m.get("coords").cloned().unwrap_or(Value::Null), m.get("signs").cloned()),
        _ => (v.clone(), None),
    };
    let x = TriangleCoords::new(parse_scalars::<T>(&xv, 4)?.try_into().expect("length checked"))?;
    let eps = match (&args.signs, sv) {
        (Some(s), _) => parse_sign_vector(&load_json(s)?)?,
        (None, Some(s)) => parse_sign_vector(&s)?,
        (None, None) => return Err(Error::InvalidInput("--signs is required".into())),
    };
    Ok((x, eps))
}

fn to_line(v: &impl serde::Serialize) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::InvalidInput(e.to_string()))
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    if !(cli.config.tolerance > 0.0) {
        let _ = writeln!(err, "error: --tolerance must be positive");
        return EXIT_USAGE;
    }
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            let _ = writeln!(out, "{}", json!({ "error": e.to_string() }));
            EXIT_DOMAIN
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = &cli.config;
    let io = |e: std::io::Error| Error::InvalidInput(e.to_string());
    match &cli.command {
        Command::Sample { euler, signs, count } => {
            let s = parse_signs(signs).ok_or_else(|| Error::InvalidInput(format!("signs {signs}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.resolved_seed()?);
            for _ in 0..*count {
                let (x, eps) = sample_component(*euler, &s, &mut rng)?;
                let line = match cfg.backend {
                    Backend::Exact => to_line(&json!({ "coords": x, "signs": eps }))?,
                    Backend::Float => {
                        let xf = x.x.map(|v| v.to_f64_lossy());
                        to_line(&json!({ "coords": xf, "signs": eps }))?
                    }
                };
                writeln!(out, "{line}").map_err(io)?;
            }
        }
        Command::Classify(chart) => {
            let line = match cfg.backend {
                Backend::Exact => {
                    let (x, eps) = load_chart::<Exact>(chart)?;
                    to_line(&classify(&x, &eps)?)?
                }
                Backend::Float => {
                    let (x, eps) = load_chart::<f64>(chart)?;
                    to_line(&classify(&x, &eps)?)?
                }
            };
            writeln!(out, "{line}").map_err(io)?;
        }
        Command::Traces { chart, lambda, pairing } => {
            let line = match cfg.backend {
                Backend::Exact => traces_cmd::<Exact>(chart, lambda.as_deref(), (*pairing).into())?,
                Backend::Float => traces_cmd::<f64>(chart, lambda.as_deref(), (*pairing).into())?,
            };
            writeln!(out, "{line}").map_err(io)?;
        }
        Command::Switch { chart, along } => {
            let l = Tri::parse(along).ok_or_else(|| Error::InvalidInput(format!("triangle {along}")))?;
            let line = match cfg.backend {
                Backend::Exact => {
                    let (x, eps) = load_chart::<Exact>(chart)?;
                    to_line(&triangle_switch(&x, &eps, l)?)?
                }
                Backend::Float => {
                    let (x, eps) = load_chart::<f64>(chart)?;
                    to_line(&triangle_switch(&x, &eps, l)?)?
                }
            };
            writeln!(out, "{line}").map_err(io)?;
        }
        Command::Reduce { chart, max_steps, diagnostics } => {
            let (line, csv) = match cfg.backend {
                Backend::Exact => {
                    let (x, eps) = load_chart::<Exact>(chart)?;
                    let (log, diag) = trace_reduce(&x, &eps, *max_steps)?;
                    (to_line(&log)?, diag.to_csv()?)
                }
                Backend::Float => {
                    let (x, eps) = load_chart::<f64>(chart)?;
                    let (log, diag) = trace_reduce(&x, &eps, *max_steps)?;
                    (to_line(&log)?, diag.to_csv()?)
                }
            };
            if let Some(path) = diagnostics {
                std::fs::write(path, csv).map_err(io)?;
            } else if cfg.format == Format::Csv {
                write!(out, "{csv}").map_err(io)?;
                return Ok(EXIT_OK);
            }
            writeln!(out, "{line}").map_err(io)?;
        }
        Command::Scan { chart, depth, admissibility } => {
            let line = match cfg.backend {
                Backend::Exact => {
                    let (x, eps) = load_chart::<Exact>(chart)?;
                    if *admissibility {
                        to_line(&admissibility_walk(&x, &eps, *depth)?)?
                    } else {
                        to_line(&hyperbolicity_scan_exact(&x, &eps, *depth)?)?
                    }
                }
                Backend::Float => {
                    let (x, eps) = load_chart::<f64>(chart)?;
                    if *admissibility {
                        to_line(&admissibility_walk(&x, &eps, *depth)?)?
                    } else {
                        to_line(&hyperbolicity_scan(&x, &eps, *depth)?)?
                    }
                }
            };
            writeln!(out, "{line}").map_err(io)?;
        }
        Command::Orbit { space, start, steps, out: path } => {
            let csv = match cfg.backend {
                Backend::Exact => orbit_csv::<Exact>(*space, start, *steps)?,
                Backend::Float => orbit_csv::<f64>(*space, start, *steps)?,
            };
            match path {
                Some(p) => std::fs::write(p, csv).map_err(io)?,
                None => write!(out, "{csv}").map_err(io)?,
            }
        }
        Command::Verify { suite, count, list, pairing } => {
            if *list {
                for name in suites::SUITES {
                    writeln!(out, "{name}").map_err(io)?;
                }
                return Ok(EXIT_OK);
            }
            let names: Vec<&str> = if suite == "all" {
                suites::SUITES.to_vec()
            } else {
                let n = suites::SUITES
                    .iter()
                    .find(|s| **s == suite.as_str())
                    .ok_or_else(|| Error::InvalidInput(format!("unknown suite {suite}")))?;
                vec![*n]
            };
            let opts = suites::SuiteOptions {
                count: *count,
                seed: cfg.resolved_seed()?,
                tolerance: cfg.tolerance,
                pairing: (*pairing).into(),
            };
            let mut all_pass = true;
            for name in names {
                let r = suites::run_suite(name, &opts)?;
                all_pass &= r.pass;
                writeln!(out, "{}", to_line(&r)?).map_err(io)?;
            }
            return Ok(if all_pass { EXIT_OK } else { EXIT_SUITE });
        }
    }
    Ok(EXIT_OK)
}

fn traces_cmd<T: Scalar>(chart: &ChartArgs, lambda: Option<&str>, conv: PairingConvention) -> Result<String> {
    let mut rows = Vec::new();
    if let Some(text) = lambda {
        let lam = LambdaLengths::new(parse_scalars::<T>(&load_json(text)?, 6)?.try_into().expect("length checked"))?;
        let eps = match &chart.signs {
            Some(s) => parse_sign_vector(&load_json(s)?)?,
            None => return Err(Error::InvalidInput("--signs is required".into())),
        };
        for e in Edge::ALL {
            let r = curve_trace(&edge_curve(e), &lam, &eps)?;
            rows.push(json!({ "curve": e.label(), "result": r }));
        }
        for v in Vertex::ALL {
            let r = curve_trace(&peripheral_curve(v), &lam, &eps)?;
            rows.push(json!({ "curve": format!("{v:?}").to_lowercase(), "result": r }));
        }
        let x = triangle_coords(&lam);
        return to_line(&json!({ "coords": x, "traces": rows }));
    }
    let (x, eps) = load_chart::<T>(chart)?;
    for e in Edge::ALL {
        let (i, j) = e.dual_pair();
        let r = edge_curve_trace_with(&x, &eps, i, j, conv)?;
        rows.push(json!({ "curve": e.label(), "pair": [i.number(), j.number()], "result": r }));
    }
    to_line(&json!({ "traces": rows }))
}

fn orbit_csv<T: Scalar>(space: Space, start: &str, steps: usize) -> Result<String> {
    let v = load_json(start)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::InvalidInput(e.to_string());
    match space {
        Space::Omega => {
            let vals = match &v {
                Value::Object(m) => ["a", "c", "d"]
                    .iter()
                    .map(|k| m.get(*k).ok_or_else(|| Error::InvalidInput(format!("missing {k}"))).and_then(parse_scalar))
                    .collect::<Result<Vec<T>>>()?,
                _ => parse_scalars::<T>(&v, 3)?,
            };
            let [a, c, d]: [T; 3] = vals.try_into().expect("length checked");
            let mut p = OmegaPoint::new(a, c, d)?;
            w.write_record(["step", "a", "c", "d", "k"]).map_err(err)?;
            for n in 0..=steps {
                let k = ellipse_k(&p)?;
                w.write_record([n.to_string(), p.a.to_string(), p.c.to_string(), p.d.to_string(), k.to_string()])
                    .map_err(err)?;
                if n < steps {
                    p = twist34(&p)?;
                }
            }
        }
        Space::Trace => {
            let vals = parse_scalars::<T>(&v, 7)?;
            let mut t = TraceCoords::from_array(vals.try_into().expect("length checked"));
            w.write_record(["step", "a", "b", "c", "d", "x", "y", "z", "residual"]).map_err(err)?;
            for n in 0..=steps {
                let mut rec = vec![n.to_string()];
                rec.extend(t.to_array().iter().map(|v| v.to_string()));
                rec.push(relation_residual(&t).to_string());
                w.write_record(rec).map_err(err)?;
                if n < steps {
                    // θ_a ∘ θ_b
                    t = vieta_flip(&vieta_flip(&t, Var::B), Var::A);
                }
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Entry point used by the binary.
pub fn main_with_args(args: impl IntoIterator<Item = OsString>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    run(args, &mut out, &mut err)
}
