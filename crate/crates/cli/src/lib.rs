//! The `pisot` command line: argument model, config files, dispatch and
//! exit codes.

pub mod commands;
pub mod emit;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pisot_core::DEFAULT_PRECISION_BITS;

pub use emit::{emit_csv, emit_svg, render_svg, write_csv, Cell, PlotSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] pisot_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("writing output: {0}")]
    Write(#[from] std::io::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) if e.is_numeric() => EXIT_NUMERIC,
            CliError::Core(_) => EXIT_USAGE,
            CliError::Io { .. } | CliError::Write(_) | CliError::Csv(_) => EXIT_NUMERIC,
        }
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` must be positive"))
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("`{s}` must be a positive integer")),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("`{s}` must be a positive integer")),
    }
}

/// A parsed invocation: global options plus exactly one command.
#[derive(Debug, Clone, Parser)]
#[command(name = "pisot", version, about = "Refinable functions with Pisot dilations")]
pub struct RunConfig {
    /// Worker threads for scans and enumerations (output does not depend on it).
    #[arg(long, global = true, value_parser = positive_usize, allow_hyphen_values = true)]
    pub threads: Option<usize>,

    /// Working precision in bits for root certification.
    #[arg(long, global = true, env = "PISOT_PRECISION_BITS", default_value_t = DEFAULT_PRECISION_BITS)]
    pub precision_bits: u32,

    /// key = value file of default options; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// CSV destination (standard output when omitted).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Also write an SVG chart (default path `<command>.svg`).
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "")]
    pub svg: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct MaskArgs {
    /// Built-in mask: boxcar, dyadic, bernoulli, bernoulli(c0,...), golden_vector.
    #[arg(long, conflicts_with = "mask_file")]
    pub mask: Option<String>,
    /// Mask description file.
    #[arg(long)]
    pub mask_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanTarget {
    Symbol,
    Phihat,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Certify the dilation polynomial and list its roots.
    FieldCheck {
        /// Coefficients c0,...,c_{d-1} of the monic polynomial.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Tabulate the Fourier symbol on a grid.
    SymbolScan {
        #[command(flatten)]
        mask: MaskArgs,
        /// Interval a:b.
        #[arg(long, default_value = "0:128", allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 0.01, value_parser = positive_f64, allow_hyphen_values = true)]
        step: f64,
    },
    /// Evaluate the infinite product along lambda alpha^J.
    PhihatOrbit {
        #[command(flatten)]
        mask: MaskArgs,
        /// Field element as power-basis coordinates q0,q1,... (rationals allowed).
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        jmin: i64,
        #[arg(long, default_value_t = 40, allow_hyphen_values = true)]
        jmax: i64,
        #[arg(long, default_value_t = 1e-13, value_parser = positive_f64, allow_hyphen_values = true)]
        tol: f64,
    },
    /// Bernoulli convolution transform at alpha^J.
    Bernoulli {
        #[arg(long, default_value = "-1,-1", allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = 40)]
        jmax: i64,
        /// Most negative product index kept.
        #[arg(long, default_value_t = -200, allow_hyphen_values = true)]
        cutoff: i64,
    },
    /// Count Y(L) and compare with the predicted density.
    LatticeDensity {
        #[arg(long, default_value = "-1,-1", allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
        /// One value for all conjugates, or one per conjugate.
        #[arg(long, default_value = "0.1", value_delimiter = ',', value_parser = positive_f64, allow_hyphen_values = true)]
        eps: Vec<f64>,
        #[arg(long = "l", visible_alias = "L", default_value = "1000,10000,100000", value_delimiter = ',', value_parser = positive_f64, allow_hyphen_values = true)]
        l: Vec<f64>,
    },
    /// Near-zeros of the symbol or the transform on [0, L] and their density.
    ZerosScan {
        #[command(flatten)]
        mask: MaskArgs,
        #[arg(long, value_enum, default_value_t = ScanTarget::Phihat)]
        target: ScanTarget,
        #[arg(long = "l", visible_alias = "L", default_value_t = 64.0, value_parser = positive_f64, allow_hyphen_values = true)]
        l: f64,
        #[arg(long, default_value_t = 0.01, value_parser = positive_f64, allow_hyphen_values = true)]
        step: f64,
        /// Zero threshold (default 1e-8, or 1e-6 for infinite masks).
        #[arg(long, value_parser = positive_f64, allow_hyphen_values = true)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 1e-12, value_parser = positive_f64, allow_hyphen_values = true)]
        tol: f64,
        /// Also write the located points as CSV.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Does the transform vanish along lambda alpha^J?
    VanishingProbe {
        #[command(flatten)]
        mask: MaskArgs,
        /// Repeatable.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda: Vec<String>,
        #[arg(long, default_value_t = 40)]
        jmax: i64,
        #[arg(long, default_value_t = 1e-13, value_parser = positive_f64, allow_hyphen_values = true)]
        tol: f64,
        #[arg(long, value_parser = positive_f64, allow_hyphen_values = true)]
        delta: Option<f64>,
    },
    /// Distinct values of the norm form up to L.
    NormsCount {
        #[arg(long, default_value = "-1,-1", allow_hyphen_values = true)]
        poly: String,
        #[arg(long = "l", visible_alias = "L", default_value_t = 100_000, value_parser = positive_u64, allow_hyphen_values = true)]
        l: u64,
        /// Half-width of the integer box (default from L).
        #[arg(long = "box")]
        box_size: Option<u64>,
    },
    /// Star discrepancy of (y, y alpha, ..., y alpha^{n-1}) mod 1 for random y.
    Equidistribution {
        #[arg(long, default_value = "-1,-1", allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = 1, value_parser = positive_usize, allow_hyphen_values = true)]
        n: usize,
        #[arg(long, default_value_t = 10_000, value_parser = positive_usize, allow_hyphen_values = true)]
        samples: usize,
        #[arg(long, default_value = "0:1000", allow_hyphen_values = true)]
        range: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FieldCheck { .. } => "field-check",
            Command::SymbolScan { .. } => "symbol-scan",
            Command::PhihatOrbit { .. } => "phihat-orbit",
            Command::Bernoulli { .. } => "bernoulli",
            Command::LatticeDensity { .. } => "lattice-density",
            Command::ZerosScan { .. } => "zeros-scan",
            Command::VanishingProbe { .. } => "vanishing-probe",
            Command::NormsCount { .. } => "norms-count",
            Command::Equidistribution { .. } => "equidistribution",
        }
    }
}

pub const SUBCOMMANDS: [&str; 9] = [
    "field-check",
    "symbol-scan",
    "phihat-orbit",
    "bernoulli",
    "lattice-density",
    "zeros-scan",
    "vanishing-probe",
    "norms-count",
    "equidistribution",
];

/// Reads `key = value` lines. `#` starts a comment; `command = <name>`
/// selects the subcommand; `;` separates repeated values; `true`/`false`
/// toggle flags without a value.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: invalid key `{}`", i + 1, k.trim())));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn find_config_path(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn flag_present(args: &[String], key: &str) -> bool {
    let long = format!("--{key}");
    let eq = format!("--{key}=");
    args.iter().any(|a| *a == long || a.starts_with(&eq))
}

/// Merges config-file entries into the argument list. Entries whose flag is
/// already given on the command line are skipped.
pub fn merge_config(args: &[String], entries: &[(String, String)]) -> Vec<String> {
    let sub = args.iter().skip(1).position(|a| SUBCOMMANDS.contains(&a.as_str())).map(|p| p + 1);
    let mut extra = Vec::new();
    let mut command = None;
    for (k, v) in entries {
        if k == "command" {
            command = Some(v.clone());
            continue;
        }
        if flag_present(args, k) {
            continue;
        }
        match v.as_str() {
            "true" => extra.push(format!("--{k}")),
            "false" => {}
            _ => {
                for part in v.split(';') {
                    extra.push(format!("--{k}={}", part.trim()));
                }
            }
        }
    }
    let mut out: Vec<String> = Vec::with_capacity(args.len() + extra.len() + 1);
    match sub {
        Some(p) => {
            out.extend_from_slice(&args[..=p]);
            out.extend(extra);
            out.extend_from_slice(&args[p + 1..]);
        }
        None => {
            out.extend_from_slice(args);
            if let Some(c) = command {
                out.push(c);
            }
            out.extend(extra);
        }
    }
    out
}

/// Parses `args` (program name first), applying any `--config` file.
pub fn parse_args(args: &[String]) -> Result<RunConfig, clap::Error> {
    let merged = match find_config_path(args) {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| {
                clap::Error::raw(
                    clap::error::ErrorKind::ValueValidation,
                    format!("--config {}: {e}\n", path.display()),
                )
            })?;
            let entries = parse_config(&text).map_err(|e| {
                clap::Error::raw(clap::error::ErrorKind::ValueValidation, format!("--config: {e}\n"))
            })?;
            merge_config(args, &entries)
        }
        None => args.to_vec(),
    };
    RunConfig::try_parse_from(merged)
}

/// Runs one invocation and returns the process exit code.
pub fn run(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let config = match parse_args(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&config, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Executes a parsed configuration: computes the report, then writes the CSV,
/// the summary and the optional chart.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    let report = pool.install(|| commands::dispatch(config))?;
    match &config.output {
        Some(path) => emit_csv(&report.rows, &report.header, path)?,
        None => write_csv(&mut *stdout, &report.header, &report.rows)?,
    }
    for line in &report.summary {
        writeln!(stderr, "{line}")?;
    }
    if let Some(svg) = &config.svg {
        let plot = report
            .plot
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("--svg: {} has no chart", config.command.name())))?;
        let path = if svg.as_os_str().is_empty() {
            PathBuf::from(format!("{}.svg", config.command.name()))
        } else {
            svg.clone()
        };
        emit_svg(plot, &path)?;
    }
    Ok(())
}
