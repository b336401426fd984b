//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 1 on invalid input, 2 when a witness search exhausted its bounds.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::neps::{adjacency_matrix_with_limit, NepsSpec, Vertex, DEFAULT_DENSE_LIMIT};
use crate::report::{self, ser_f17};
use crate::spectral::TensorEigenbasis;
use crate::transfer::{self, TransferOptions, TransferReport};

#[derive(Parser, Debug)]
#[command(
    name = "nepswalk",
    version,
    about = "State transfer in quantum walks on NEPS of P2 and P3"
)]
struct Cli {
    /// Largest vertex count for dense matrix work.
    #[arg(long, global = true, default_value_t = DEFAULT_DENSE_LIMIT)]
    dense_limit: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distinct eigenvalues with multiplicities.
    Spectrum {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full PST / PGST / periodicity report.
    Classify {
        #[arg(short, long)]
        input: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Fidelity between two vertices on a uniform time grid.
    Fidelity {
        #[arg(short, long)]
        input: PathBuf,
        /// Source vertex, comma-separated 0-based coordinates.
        #[arg(long)]
        from: Vertex,
        #[arg(long)]
        to: Vertex,
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
        #[arg(long, default_value_t = 5000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// PGST witness search only.
    Search {
        #[arg(short, long)]
        input: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Report for the Cartesian product of two specs.
    Product {
        #[arg(short = 'a', long = "spec-a")]
        a: PathBuf,
        #[arg(short = 'b', long = "spec-b")]
        b: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Compare the tensor engine against the dense oracle.
    #[command(hide = true)]
    OracleCheck {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        times: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Largest accepted witness-time multiplier.
    #[arg(long, default_value_t = 1_000_000)]
    max_q: i128,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Validated settings shared by the subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub epsilon: f64,
    pub max_q: i128,
    pub t_max: f64,
    pub samples: usize,
    pub dense_limit: usize,
    pub out: Option<PathBuf>,
    pub json: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            epsilon: 1e-3,
            max_q: 1_000_000,
            t_max: 50.0,
            samples: 5000,
            dense_limit: DEFAULT_DENSE_LIMIT,
            out: None,
            json: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "--epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if self.samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "--samples must be at least 2, got {}",
                self.samples
            )));
        }
        if self.max_q < 1 {
            return Err(Error::InvalidArgument("--max-q must be positive".into()));
        }
        if self.dense_limit < 1 {
            return Err(Error::InvalidArgument(
                "--dense-limit must be positive".into(),
            ));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "--t-max must be positive and finite, got {}",
                self.t_max
            )));
        }
        Ok(())
    }

    pub fn transfer_options(&self) -> TransferOptions {
        TransferOptions {
            epsilon: self.epsilon,
            max_q: self.max_q,
            dense_limit: self.dense_limit,
            ..TransferOptions::default()
        }
    }
}

enum Outcome {
    Done,
    Exhausted(String),
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::Exhausted(msg)) => {
            eprintln!("nepswalk: search bound exhausted: {msg}");
            2
        }
        Err(Error::SearchBound(msg)) => {
            eprintln!("nepswalk: search bound exhausted: {msg}");
            2
        }
        Err(e) => {
            eprintln!("nepswalk: {e}");
            1
        }
    }
}

fn load_spec(path: &Path) -> Result<NepsSpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    NepsSpec::from_json(&text)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::InvalidArgument(format!("cannot write to stdout: {e}")))
        }
    }
}

fn search_config(args: &SearchArgs, dense_limit: usize) -> Result<RunConfig> {
    let config = RunConfig {
        epsilon: args.epsilon,
        max_q: args.max_q,
        dense_limit,
        out: args.out.clone(),
        ..RunConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn emit_report(report: &TransferReport, config: &RunConfig) -> Result<Outcome> {
    emit(config.out.as_deref(), &report.to_json())?;
    if report.search_exhausted {
        let reasons: Vec<String> = report
            .certificates
            .iter()
            .filter_map(|c| match &c.evidence {
                transfer::Evidence::Unknown {
                    reason,
                    guidance: Some(_),
                } => Some(reason.clone()),
                _ => None,
            })
            .collect();
        return Ok(Outcome::Exhausted(format!(
            "{} (raise --max-q or relax --epsilon)",
            reasons.join("; ")
        )));
    }
    Ok(Outcome::Done)
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    let dense_limit = cli.dense_limit;
    match cli.command {
        Command::Spectrum { input, out } => {
            let spec = load_spec(&input)?;
            let spectrum = TensorEigenbasis::new(&spec)?.distinct_spectrum();
            emit(out.as_deref(), &report::spectrum_json(&spectrum))?;
            Ok(Outcome::Done)
        }
        Command::Classify { input, search } => {
            let config = search_config(&search, dense_limit)?;
            let spec = load_spec(&input)?;
            let report = transfer::classify(&spec, &config.transfer_options())?;
            emit_report(&report, &config)
        }
        Command::Search { input, search } => {
            let config = search_config(&search, dense_limit)?;
            let spec = load_spec(&input)?;
            let report = transfer::search(&spec, &config.transfer_options())?;
            emit_report(&report, &config)
        }
        Command::Product { a, b, search } => {
            let config = search_config(&search, dense_limit)?;
            let (a, b) = (load_spec(&a)?, load_spec(&b)?);
            let report = transfer::analyze_product(&a, &b, &config.transfer_options())?;
            emit_report(&report, &config)
        }
        Command::Fidelity {
            input,
            from,
            to,
            t_max,
            samples,
            format,
            out,
        } => {
            let config = RunConfig {
                t_max,
                samples,
                dense_limit,
                out,
                json: format == Format::Json,
                ..RunConfig::default()
            };
            config.validate()?;
            let spec = load_spec(&input)?;
            let series = transfer::fidelity_sweep(&spec, &from, &to, config.t_max, config.samples)?;
            let text = if config.json {
                fidelity_json(&from, &to, &config, &series)
            } else {
                report::series_csv(&series)
            };
            emit(config.out.as_deref(), &text)?;
            Ok(Outcome::Done)
        }
        Command::OracleCheck { input, times, out } => {
            let spec = load_spec(&input)?;
            let check = oracle_check(&spec, times, dense_limit)?;
            emit(
                out.as_deref(),
                &serde_json::to_string_pretty(&check).expect("check serializes"),
            )?;
            if check.pass {
                Ok(Outcome::Done)
            } else {
                Err(Error::Internal(
                    "tensor engine and dense oracle disagree".into(),
                ))
            }
        }
    }
}

#[derive(Serialize)]
struct Sample {
    #[serde(serialize_with = "ser_f17")]
    t: f64,
    #[serde(serialize_with = "ser_f17")]
    fidelity: f64,
}

#[derive(Serialize)]
struct FidelitySeries<'a> {
    source: &'a Vertex,
    target: &'a Vertex,
    #[serde(serialize_with = "ser_f17")]
    t_max: f64,
    samples: usize,
    series: Vec<Sample>,
}

fn fidelity_json(from: &Vertex, to: &Vertex, config: &RunConfig, series: &[(f64, f64)]) -> String {
    let doc = FidelitySeries {
        source: from,
        target: to,
        t_max: config.t_max,
        samples: config.samples,
        series: series
            .iter()
            .map(|&(t, fidelity)| Sample { t, fidelity })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("series serializes")
}

/// Agreement between the tensor engine and the dense oracle on one spec.
#[derive(Debug, Serialize)]
pub struct OracleCheck {
    pub vertices: usize,
    #[serde(serialize_with = "ser_f17")]
    pub eigenvalue_gap: f64,
    #[serde(serialize_with = "ser_f17")]
    pub matrix_gap: f64,
    pub times: Vec<f64>,
    pub pass: bool,
}

/// Eigenvalues are compared after sorting; `H(t)` at `times` fixed,
/// irregularly spaced times.
pub fn oracle_check(spec: &NepsSpec, times: usize, dense_limit: usize) -> Result<OracleCheck> {
    let adjacency = adjacency_matrix_with_limit(spec, dense_limit)?.to_dense();
    let dense = nepswalk_oracle::jacobi_eigen(&adjacency, &Default::default())?;
    let basis = TensorEigenbasis::new(spec)?;
    let mut exact: Vec<f64> = basis.float_eigenvalues().to_vec();
    exact.sort_by(f64::total_cmp);
    let eigenvalue_gap = exact
        .iter()
        .zip(&dense.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let times: Vec<f64> = (0..times).map(|i| 0.37 + 1.618 * i as f64).collect();
    let mut matrix_gap: f64 = 0.0;
    for &t in &times {
        let oracle = nepswalk_oracle::expm_unitary(&adjacency, t)?;
        matrix_gap = matrix_gap.max(basis.transition_matrix(t).max_abs_diff(&oracle));
    }
    Ok(OracleCheck {
        vertices: spec.vertex_count(),
        eigenvalue_gap,
        matrix_gap,
        pass: eigenvalue_gap <= 1e-9 && matrix_gap <= 1e-8,
        times,
    })
}
