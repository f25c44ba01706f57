//! Command-line front end.
//!
//! Every command reads JSON (from its argument, or stdin when the argument is
//! omitted) and writes JSON to stdout. Errors go to stderr as
//! `{"error": {"kind": ..., "message": ...}}` with exit codes
//! 0 ok, 1 verification failure, 2 parse, 3 domain, 4 internal contradiction,
//! 5 resource limit.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bulldozer::{
    line_from_sequence, unique_unsweepable, unsweepable_towns, unsweepable_towns_simulated, TownLine,
};
use crate::error::{Error, Result};
use crate::hikita::{hikita_distribution, hikita_phi, weights_from_params, HikitaParams};
use crate::perm::{canonicalize, foata, foata_inverse, LinearOrdering};
use crate::rational::{format_rational, parse_rational, to_decimal_string, Rational};
use crate::sampler::{monte_carlo_watershed, ProcessW, RandomSource};
use crate::verify::{self, Fault, Level, VerifyConfig};
use crate::watershed::{
    even_total_brute, watershed_brute, watershed_count, watershed_count_total, watershed_fast,
    watershed_histogram_brute, DEFAULT_ENUMERATION_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Json,
    Plain,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CliConfig {
    /// Largest 2n enumerated exhaustively (even).
    #[arg(long = "cap", global = true, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub enumeration_cap: usize,

    /// Default Monte Carlo sample size.
    #[arg(long = "samples", global = true, default_value_t = 100_000)]
    pub monte_carlo_default_samples: u64,

    /// Seed for randomized commands; generated and echoed when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long = "output", global = true, value_enum, default_value_t = OutputMode::Json)]
    pub output_mode: OutputMode,

    /// Digits shown in decimal approximations.
    #[arg(long = "precision", global = true, default_value_t = 12)]
    pub decimal_precision: u32,
}

impl CliConfig {
    fn validate(&self) -> Result<()> {
        if !self.enumeration_cap.is_multiple_of(2) {
            return Err(Error::domain("--cap must be even"));
        }
        if self.monte_carlo_default_samples == 0 {
            return Err(Error::domain("--samples must be at least 1"));
        }
        Ok(())
    }

    fn seed_or_fresh(&self) -> u64 {
        self.seed.unwrap_or_else(rand::random)
    }
}

#[derive(Debug, Parser)]
#[command(name = "watershed", version, about = "Foata bijection, watershed statistic, Hikita probabilities and bulldozers")]
pub struct Cli {
    #[command(flatten)]
    pub config: CliConfig,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Foata map between cycle form and linear orderings.
    Foata {
        /// Cycles `{"cycles": [[...], ...]}` to an ordering.
        #[arg(long, conflicts_with = "inverse", required_unless_present = "inverse")]
        forward: bool,
        /// Ordering `[...]` to canonical cycles.
        #[arg(long)]
        inverse: bool,
        input: Option<String>,
    },
    /// Watershed of an even-length ordering.
    Watershed {
        input: Option<String>,
        #[arg(long)]
        trace: bool,
    },
    /// Number of orderings of {1..2n} with each watershed.
    Count {
        #[arg(long)]
        n: u64,
        /// Also count by enumeration, including the even-cycle-total count.
        #[arg(long)]
        brute: bool,
    },
    /// Hikita transition probabilities from `{"a": [...], "b": [...], "q": "p/q"}`.
    Hikita {
        input: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        /// Include decimal approximations.
        #[arg(long)]
        decimals: bool,
    },
    /// Draw orderings from the weighted process for the given parameters.
    Sample {
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<u64>,
        #[arg(long)]
        q: String,
        #[arg(long = "n-samples")]
        n_samples: Option<u64>,
        /// Emit a Monte Carlo watershed report instead of raw orderings.
        #[arg(long)]
        report: bool,
    },
    /// Unsweepable town for a bare sequence or `{"left": [...], "right": [...]}`.
    Bulldozer {
        input: Option<String>,
        /// Use the step-by-step sweep simulation.
        #[arg(long)]
        simulate: bool,
    },
    /// Run the verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        #[arg(long = "inject-fault", value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
}

/// A command result: JSON body plus exit code.
struct Output {
    body: Value,
    code: i32,
}

impl From<Value> for Output {
    fn from(body: Value) -> Self {
        Output { body, code: 0 }
    }
}

fn read_input(arg: Option<String>, stdin: &mut dyn Read) -> Result<Value> {
    let text = match arg {
        Some(s) => s,
        None => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| Error::Parse(format!("reading stdin: {e}")))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))
}

fn decode<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("expected {what}: {e}")))
}

fn ordering_from(v: Value) -> Result<LinearOrdering> {
    LinearOrdering::new(decode::<Vec<i64>>(v, "an array of integers")?)
}

fn rationals(v: &[Rational]) -> Value {
    Value::from(v.iter().map(format_rational).collect::<Vec<_>>())
}

fn cmd_foata(forward: bool, input: Value) -> Result<Value> {
    if forward {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Cycles {
            cycles: Vec<Vec<i64>>,
        }
        let raw: Cycles = decode(input, r#"{"cycles": [[...], ...]}"#)?;
        let perm = canonicalize(raw.cycles)?;
        Ok(json!(foata(&perm)))
    } else {
        let ordering = ordering_from(input)?;
        Ok(json!({ "cycles": foata_inverse(&ordering).cycles() }))
    }
}

fn cmd_watershed(input: Value, trace: bool) -> Result<Value> {
    let ordering = ordering_from(input)?;
    let (k, tr) = watershed_fast(&ordering)?;
    let brute = watershed_brute(&ordering)?;
    if brute != k {
        return Err(Error::contradiction(format!(
            "run collapse gives {k} but direct search gives {brute} for {ordering}"
        )));
    }
    let mut out = json!({ "k": k, "fast_equals_brute": true });
    if trace {
        out["trace"] = serde_json::to_value(&tr).expect("trace serializes");
    }
    Ok(out)
}

fn cmd_count(n: u64, brute: bool, config: &CliConfig) -> Result<Value> {
    let counts = (0..=n)
        .map(|k| watershed_count(n, k))
        .collect::<Result<Vec<_>>>()?;
    let total = watershed_count_total(n);
    let mut out = json!({
        "counts": counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "total": total.to_string(),
    });
    if brute {
        let n = n as usize;
        let hist = watershed_histogram_brute(n, config.enumeration_cap)?;
        let even = (0..=n)
            .map(|k| even_total_brute(n, k, config.enumeration_cap))
            .collect::<Result<Vec<_>>>()?;
        if hist != counts || even != counts {
            return Err(Error::contradiction("enumerated counts differ from the formula"));
        }
        out["brute_counts"] = json!(hist.iter().map(|c| c.to_string()).collect::<Vec<_>>());
        out["even_total_counts"] = json!(even.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    }
    Ok(out)
}

fn params_from(v: Value) -> Result<HikitaParams> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Raw {
        a: Vec<i64>,
        b: Vec<i64>,
        q: Value,
    }
    let raw: Raw = decode(v, r#"{"a": [...], "b": [...], "q": "p/q"}"#)?;
    let q = match raw.q {
        Value::String(s) => parse_rational(&s)?,
        Value::Number(n) if n.is_i64() => crate::rational::int(n.as_i64().unwrap()),
        other => return Err(Error::Parse(format!("q must be a \"p/q\" string, got {other}"))),
    };
    let positive = |v: Vec<i64>, name: &str| -> Result<Vec<u64>> {
        v.into_iter()
            .map(|x| u64::try_from(x).map_err(|_| Error::domain(format!("{name} entries must be positive"))))
            .collect()
    };
    HikitaParams::new(positive(raw.a, "a")?, positive(raw.b, "b")?, q)
}

fn cmd_hikita(input: Value, k: Option<usize>, decimals: bool, config: &CliConfig) -> Result<Value> {
    let params = params_from(input)?;
    let digits = config.decimal_precision;
    if let Some(k) = k {
        let phi = hikita_phi(&params, k)?;
        let mut out = json!({ "k": k, "phi": format_rational(&phi) });
        if decimals {
            out["decimal"] = json!(to_decimal_string(&phi, digits));
        }
        return Ok(out);
    }
    let dist = hikita_distribution(&params)?;
    let sum: Rational = dist.iter().sum();
    let mut out = json!({ "distribution": rationals(&dist), "sum": format_rational(&sum) });
    if decimals {
        out["decimals"] = json!(dist.iter().map(|p| to_decimal_string(p, digits)).collect::<Vec<_>>());
    }
    Ok(out)
}

fn cmd_sample(
    a: Vec<u64>,
    b: Vec<u64>,
    q: &str,
    n_samples: Option<u64>,
    report: bool,
    config: &CliConfig,
) -> Result<Value> {
    let params = HikitaParams::new(a, b, parse_rational(q)?)?;
    let seed = config.seed_or_fresh();
    if report {
        let samples = n_samples.unwrap_or(config.monte_carlo_default_samples);
        let report = monte_carlo_watershed(&params, samples, seed)?;
        return Ok(json!({ "seed": seed, "params": params, "report": report }));
    }
    let samples = n_samples.unwrap_or(1);
    if samples == 0 {
        return Err(Error::domain("--n-samples must be at least 1"));
    }
    let weights = weights_from_params(&params);
    let process = ProcessW::new(&weights);
    let elements: Vec<i64> = (1..=weights.len() as i64).collect();
    let mut rng = RandomSource::new(seed);
    let orderings = (0..samples)
        .map(|_| process.sample(&elements, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "seed": seed, "params": params, "weights": weights, "orderings": orderings }))
}

fn cmd_bulldozer(input: Value, simulate: bool) -> Result<Value> {
    let line = match input {
        Value::Array(_) => line_from_sequence(&ordering_from(input)?)?,
        Value::Object(_) => {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct Raw {
                left: Vec<Option<i64>>,
                right: Vec<Option<i64>>,
            }
            let raw: Raw = decode(input, r#"{"left": [...], "right": [...]}"#)?;
            TownLine::new(raw.left, raw.right)?
        }
        other => return Err(Error::Parse(format!("expected an array or a town line, got {other}"))),
    };
    let towns = if simulate { unsweepable_towns_simulated(&line)? } else { unsweepable_towns(&line)? };
    let town = unique_unsweepable(&towns)?;
    let seq = line.interior_sequence()?;
    let (k, _) = watershed_fast(&seq)?;
    Ok(json!({ "unsweepable_town": town, "watershed": k, "correspondence": town == k + 1 }))
}

fn cmd_verify(level: Level, fault: Option<Fault>, config: &CliConfig) -> Output {
    let mut vc = VerifyConfig::new(level, config.seed_or_fresh());
    vc.enumeration_cap = config.enumeration_cap;
    vc.monte_carlo_samples = config.monte_carlo_default_samples;
    vc.fault = fault;
    let report = verify::run(&vc);
    let code = if report.passed { 0 } else { 1 };
    Output { body: serde_json::to_value(&report).expect("report serializes"), code }
}

fn dispatch(cli: Cli, stdin: &mut dyn Read) -> Result<Output> {
    let config = &cli.config;
    config.validate()?;
    Ok(match cli.command {
        Command::Foata { forward, inverse: _, input } => cmd_foata(forward, read_input(input, stdin)?)?.into(),
        Command::Watershed { input, trace } => cmd_watershed(read_input(input, stdin)?, trace)?.into(),
        Command::Count { n, brute } => cmd_count(n, brute, config)?.into(),
        Command::Hikita { input, k, decimals } => {
            cmd_hikita(read_input(input, stdin)?, k, decimals, config)?.into()
        }
        Command::Sample { a, b, q, n_samples, report } => {
            cmd_sample(a, b, &q, n_samples, report, config)?.into()
        }
        Command::Bulldozer { input, simulate } => cmd_bulldozer(read_input(input, stdin)?, simulate)?.into(),
        Command::Verify { level, inject_fault } => cmd_verify(level, inject_fault, config),
    })
}

/// Flattens JSON into `key: value` lines.
pub fn render_plain(v: &Value) -> String {
    fn scalar(v: &Value) -> Option<String> {
        match v {
            Value::String(s) => Some(s.clone()),
            Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
                Some(a.iter().map(|x| scalar(x).unwrap_or_default()).collect::<Vec<_>>().join(" "))
            }
            Value::Object(_) | Value::Array(_) => None,
            other => Some(other.to_string()),
        }
    }
    fn walk(prefix: &str, v: &Value, out: &mut Vec<String>) {
        if let Some(s) = scalar(v) {
            out.push(if prefix.is_empty() { s } else { format!("{prefix}: {s}") });
            return;
        }
        let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| walk(&join(k), x, out)),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| walk(&join(&i.to_string()), x, out)),
            _ => unreachable!(),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out.join("\n")
}

fn error_json(e: &Error) -> Value {
    let mut inner = Map::new();
    inner.insert("kind".into(), json!(e.kind()));
    inner.insert("message".into(), json!(e.to_string()));
    json!({ "error": inner })
}

/// Runs the CLI on explicit streams and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let err = Error::Parse(e.to_string().trim().to_string());
            let _ = writeln!(stderr, "{}", error_json(&err));
            return err.exit_code();
        }
    };
    let mode = cli.config.output_mode;
    match dispatch(cli, stdin) {
        Ok(out) => {
            let text = match mode {
                OutputMode::Json => out.body.to_string(),
                OutputMode::Plain => render_plain(&out.body),
            };
            let _ = writeln!(stdout, "{text}");
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_json(&e));
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("watershed").chain(args.iter().copied());
        let code = run(argv, &mut std::io::empty(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn plain_rendering() {
        let v = json!({ "k": 2, "counts": ["9", "6"], "nested": { "x": [1, 2] } });
        assert_eq!(render_plain(&v), "counts: 9 6\nk: 2\nnested.x: 1 2");
        let (code, out, _) = call(&["--output", "plain", "watershed", "[2,1]"]);
        assert_eq!(code, 0);
        assert_eq!(out, "fast_equals_brute: true\nk: 0\n");
    }

    #[test]
    fn config_validation() {
        let (code, _, err) = call(&["--cap", "7", "count", "--n", "1"]);
        assert_eq!(code, 3);
        assert!(err.contains("\"domain\""));
        let (code, _, _) = call(&["--samples", "0", "count", "--n", "1"]);
        assert_eq!(code, 3);
    }

    #[test]
    fn unknown_subcommand_is_parse_error() {
        let (code, _, err) = call(&["frobnicate"]);
        assert_eq!(code, 2);
        assert!(err.contains("\"parse\""));
    }
}
