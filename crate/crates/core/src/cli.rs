//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage, parse and domain errors, 2 when a
//! verification subcommand finds a violated bound or identity.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::budget::{self, BUDGET_ENV};
use crate::counting::{exact_max_free_set, lambda_poly, parse_spec, ProgressionSpec};
use crate::error::{Error, Result};
use crate::experiments::{
    character_norm_decay, counterexample_demo, discorrelation_sweep, greedy_free_set,
    restricted_ap_experiment, verify_counterexample_identity, weil_corollary_check, FamilyKind,
    OrderSelection, SweepReport, TrialFunctionFamily, DEFAULT_LADDER,
};
use crate::field::make_field;
use crate::harmonic::{gowers_direct, gowers_fast, FpFunction};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0xF1E1D;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "ffprog", version, about = "Polynomial progressions and Gowers norms over F_p")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    pub format: Format,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GowersMethod {
    /// Fourier-based for s >= 2, direct for s = 1.
    Auto,
    Fast,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchMethod {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// U^s norm of a function stored as a JSON fixture.
    Gowers {
        #[arg(long)]
        fixture: PathBuf,
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long, value_enum, default_value_t = GowersMethod::Auto)]
        method: GowersMethod,
    },
    /// Counting operator of a progression spec on fixture functions.
    Lambda {
        #[arg(long)]
        spec: String,
        /// One fixture per slot, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        fixtures: Vec<PathBuf>,
    },
    /// Discorrelation error sweep over a prime ladder.
    Discorrelate {
        #[arg(long)]
        spec: String,
        #[command(flatten)]
        ladder: Ladder,
        /// random-unimodular, random-indicator[:density], quadratic-phase[:a], character-phase.
        #[arg(long, default_value = "random-unimodular")]
        family: String,
        #[arg(long, default_value_t = 20)]
        trials: u64,
    },
    /// The quadratic-phase configuration on which discorrelation fails.
    Counterexample {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        a: u64,
    },
    /// Gowers norms of multiplicative characters against their bounds.
    Chardecay {
        #[command(flatten)]
        ladder: Ladder,
        #[arg(long, default_value_t = 2)]
        s: u32,
        /// A character order, or `all` for every divisor of p - 1.
        #[arg(long, default_value = "all")]
        k: String,
    },
    /// Character sum over a product of linear factors against 2r p^{-1/2}.
    Weil {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        k: u64,
        /// b_1, ..., b_{2r}, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<u64>,
    },
    /// APs with common difference restricted to k-th powers.
    RestrictedAp {
        #[command(flatten)]
        ladder: Ladder,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        k: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 20)]
        trials: u64,
    },
    /// Largest (exact) or greedy progression-free set.
    Search {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum, default_value_t = SearchMethod::Exact)]
        method: SearchMethod,
        /// Largest p accepted by the exact search.
        #[arg(long, default_value_t = crate::counting::DEFAULT_SEARCH_CAP)]
        cap: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Ladder {
    /// Comma-separated primes.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LADDER)]
    pub primes: Vec<u64>,
}

/// A single scalar-valued result, kept in insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Record {
    fields: Vec<(String, Value)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    List(Vec<u64>),
}

impl Record {
    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.fields.push((key.to_string(), value));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Int(v) => s.serialize_u64(*v),
            Value::Float(v) => s.serialize_f64(*v),
            Value::Bool(v) => s.serialize_bool(*v),
            Value::Text(v) => s.serialize_str(v),
            Value::List(v) => v.serialize(s),
        }
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.fields.len()))?;
        for (k, v) in &self.fields {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Value {
    fn plain(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Float(v) => format!("{v:.9}"),
            Value::Bool(v) => v.to_string(),
            Value::Text(v) => v.clone(),
            Value::List(v) => v.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
        }
    }

    /// Exact text for machine formats; floats use the shortest round-trip form.
    fn exact(&self) -> String {
        match self {
            Value::Float(v) => serde_json::to_string(v).expect("finite float"),
            other => other.plain(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Report(SweepReport),
    Record(Record),
}

/// Result of one subcommand: data to emit, and whether its checks passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: Output,
    pub passed: bool,
    /// Human-readable notes about failed checks.
    pub diagnostics: Vec<String>,
}

impl Outcome {
    fn ok(output: Output) -> Self {
        Self {
            output,
            passed: true,
            diagnostics: Vec::new(),
        }
    }
}

/// Same grammar as [`parse_spec`], printed back; `parse_spec(render_spec(s)) == s`.
pub fn render_spec(spec: &ProgressionSpec) -> String {
    spec.to_string()
}

fn load_fixture(path: &Path) -> Result<FpFunction> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    FpFunction::from_json_str(&text)
}

fn parse_orders(text: &str) -> Result<OrderSelection> {
    if text == "all" {
        return Ok(OrderSelection::AllDivisors);
    }
    text.parse()
        .map(OrderSelection::Specific)
        .map_err(|_| Error::InvalidArgument(format!("--k expects an integer or 'all', got '{text}'")))
}

/// Runs the selected subcommand.
pub fn run(config: &CliConfig) -> Result<Outcome> {
    match &config.command {
        Command::Gowers { fixture, s, method } => {
            let f = load_fixture(fixture)?;
            let norm = match (method, *s) {
                (GowersMethod::Direct, _) | (GowersMethod::Auto, 0..=1) => gowers_direct(&f, *s)?,
                _ => gowers_fast(&f, *s)?,
            };
            let record = Record::default()
                .with("p", Value::Int(f.p()))
                .with("s", Value::Int(*s as u64))
                .with("norm", Value::Float(norm));
            Ok(Outcome::ok(Output::Record(record)))
        }
        Command::Lambda { spec, fixtures } => {
            let spec = parse_spec(spec)?;
            let fs = fixtures.iter().map(|p| load_fixture(p)).collect::<Result<Vec<_>>>()?;
            let value = lambda_poly(&spec, &fs)?;
            let record = Record::default()
                .with("spec", Value::Text(spec.to_string()))
                .with("p", Value::Int(fs[0].p()))
                .with("re", Value::Float(value.re))
                .with("im", Value::Float(value.im))
                .with("modulus", Value::Float(value.norm()));
            Ok(Outcome::ok(Output::Record(record)))
        }
        Command::Discorrelate {
            spec,
            ladder,
            family,
            trials,
        } => {
            let spec = parse_spec(spec)?;
            let kind: FamilyKind = family.parse()?;
            let family = TrialFunctionFamily::new(kind, config.seed);
            let report = discorrelation_sweep(&ladder.primes, &spec, family, *trials)?;
            Ok(Outcome::ok(Output::Report(report)))
        }
        Command::Counterexample { p, a } => {
            let ctx = make_field(*p)?;
            ctx.require_odd()?;
            let identity = verify_counterexample_identity(&ctx);
            let (lhs, rhs) = counterexample_demo(&ctx, *a)?;
            let mut diagnostics = Vec::new();
            if !identity {
                diagnostics.push("phase identity fails".to_string());
            }
            if (lhs - 1.0).abs() > 1e-9 {
                diagnostics.push(format!("lhs = {lhs} is not 1"));
            }
            if rhs > 1e-12 {
                diagnostics.push(format!("rhs = {rhs} is not 0"));
            }
            let record = Record::default()
                .with("lhs", Value::Float(lhs))
                .with("rhs", Value::Float(rhs));
            Ok(Outcome {
                output: Output::Record(record),
                passed: diagnostics.is_empty(),
                diagnostics,
            })
        }
        Command::Chardecay { ladder, s, k } => {
            let out = character_norm_decay(&ladder.primes, *s, parse_orders(k)?)?;
            let diagnostics: Vec<String> = out
                .proof_violations
                .iter()
                .map(|(p, k)| format!("p={p} k={k}: norm^(2^s) exceeds 2^s p^(-1/2) + p^(-s)"))
                .collect();
            Ok(Outcome {
                output: Output::Report(out.report),
                passed: diagnostics.is_empty(),
                diagnostics,
            })
        }
        Command::Weil { p, k, points } => {
            let ctx = make_field(*p)?;
            let check = weil_corollary_check(&ctx, *k, points)?;
            let record = Record::default()
                .with("p", Value::Int(*p))
                .with("k", Value::Int(*k))
                .with("r", Value::Int(points.len() as u64 / 2))
                .with("modulus", Value::Float(check.modulus))
                .with("bound", Value::Float(check.bound))
                .with("holds", Value::Bool(check.holds));
            let diagnostics = if check.holds {
                Vec::new()
            } else {
                vec![format!("modulus {} exceeds bound {}", check.modulus, check.bound)]
            };
            Ok(Outcome {
                output: Output::Record(record),
                passed: check.holds,
                diagnostics,
            })
        }
        Command::RestrictedAp {
            ladder,
            m,
            k,
            density,
            trials,
        } => {
            let report = restricted_ap_experiment(&ladder.primes, *m, *k, *density, *trials, config.seed)?;
            Ok(Outcome::ok(Output::Report(report)))
        }
        Command::Search { p, spec, method, cap } => {
            let ctx = make_field(*p)?;
            let spec = parse_spec(spec)?;
            let (elements, name) = match method {
                SearchMethod::Exact => (exact_max_free_set(&ctx, &spec, *cap)?.elements, "exact"),
                SearchMethod::Greedy => (greedy_free_set(&ctx, &spec, config.seed).0, "greedy"),
            };
            let record = Record::default()
                .with("p", Value::Int(*p))
                .with("spec", Value::Text(spec.to_string()))
                .with("method", Value::Text(name.to_string()))
                .with("size", Value::Int(elements.len() as u64))
                .with("density", Value::Float(elements.len() as f64 / *p as f64))
                .with("set", Value::List(elements));
            Ok(Outcome::ok(Output::Record(record)))
        }
    }
}

fn record_csv(record: &Record) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(record.fields.iter().map(|(k, _)| k.as_str()))
        .expect("in-memory write");
    writer
        .write_record(record.fields.iter().map(|(_, v)| v.exact()))
        .expect("in-memory write");
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn report_pretty(report: &SweepReport) -> String {
    let mut out = format!("{}\n", report.spec);
    let _ = writeln!(out, "{:>8}  {:<20}  {:>14}  {:>6}  seed", "p", "stat", "value", "trials");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{:>8}  {:<20}  {:>14.6e}  {:>6}  {}",
            row.p, row.stat, row.value, row.trials, row.seed
        );
    }
    match report.fit {
        Some(fit) => {
            let _ = writeln!(out, "fit: c_hat={:.6} r2={:.6}", fit.c_hat, fit.r2);
        }
        None => out.push_str("fit: none\n"),
    }
    out
}

/// Serialized form of `output`; JSON and CSV are stable, pretty is not.
pub fn render(output: &Output, format: Format) -> String {
    match (output, format) {
        (Output::Report(r), Format::Json) => r.to_json(),
        (Output::Report(r), Format::Csv) => r.to_csv(),
        (Output::Report(r), Format::Pretty) => report_pretty(r),
        (Output::Record(r), Format::Json) => {
            let mut text = serde_json::to_string_pretty(r).expect("record serializes");
            text.push('\n');
            text
        }
        (Output::Record(r), Format::Csv) => record_csv(r),
        (Output::Record(r), Format::Pretty) => {
            let parts: Vec<String> = r.fields.iter().map(|(k, v)| format!("{k}={}", v.plain())).collect();
            format!("{}\n", parts.join(" "))
        }
    }
}

/// Writes `output` to `path`, or to standard output when `path` is `None`.
pub fn emit(output: &Output, format: Format, path: Option<&Path>) -> Result<()> {
    let text = render(output, format);
    match path {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn budget_from_env() -> Result<()> {
    match std::env::var(BUDGET_ENV) {
        Ok(text) => {
            let terms = text
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidArgument(format!("{BUDGET_ENV} must be an integer, got '{text}'")))?;
            budget::set_global_budget(terms);
            Ok(())
        }
        Err(_) => Ok(()),
    }
}

/// Parses `args`, runs, emits and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(config) => config,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = budget_from_env() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let outcome = match run(&config) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = emit(&outcome.output, config.format, config.output.as_deref()) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    for note in &outcome.diagnostics {
        eprintln!("check failed: {note}");
    }
    exit_code(&outcome)
}

pub fn exit_code(outcome: &Outcome) -> i32 {
    if outcome.passed {
        EXIT_OK
    } else {
        EXIT_ASSERTION
    }
}
