//! Argument parsing and the three subcommands.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::downturn::Variant;
use crate::econtests::Variable;
use crate::error::{Error, Result};
use crate::ingest::{
    read_series_path, resolve_endpoint, write_series_path, BcbClient, SeriesKind,
};
use crate::series::{align, MonthIndex};
use crate::synth::{generate, Role, SynthData, SynthSpec};

use super::{analyze, emit_plot_data, exit_code, AnalysisConfig, AnalysisReport};

#[derive(Debug, Parser)]
#[command(
    name = "dlgd",
    version,
    about = "Downturn LGD analysis of monthly loss-given-default and default-rate series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full analysis on an RD file and an LGD file.
    Analyze(AnalyzeArgs),
    /// Download a monthly series from the Central Bank of Brazil SGS service.
    FetchBcb(FetchBcbArgs),
    /// Generate synthetic series from a TOML spec file.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantChoice {
    Strict,
    Lenient,
    Both,
}

impl VariantChoice {
    pub fn variants(self) -> Vec<Variant> {
        match self {
            VariantChoice::Strict => vec![Variant::Strict],
            VariantChoice::Lenient => vec![Variant::Lenient],
            VariantChoice::Both => vec![Variant::Strict, Variant::Lenient],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StationaryChoice {
    Lgd,
    Rd,
    Both,
}

impl StationaryChoice {
    pub fn variables(self) -> Vec<Variable> {
        match self {
            StationaryChoice::Lgd => vec![Variable::Lgd],
            StationaryChoice::Rd => vec![Variable::Rd],
            StationaryChoice::Both => vec![Variable::Rd, Variable::Lgd],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// LGD series file (kind=lgd).
    #[arg(long)]
    pub lgd: PathBuf,
    /// Default-rate series file (kind=rd).
    #[arg(long)]
    pub rd: PathBuf,
    /// Shortest run of exceedance months that counts as a downturn.
    #[arg(long, default_value_t = crate::downturn::DEFAULT_MIN_WINDOW, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    pub min_window: usize,
    /// Largest Granger lag tested in each direction.
    #[arg(long, default_value_t = super::DEFAULT_MAX_LAG, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    pub max_lag: usize,
    /// Significance level for the ADF and Granger tests: 0.01, 0.05 or 0.10.
    #[arg(long, default_value_t = super::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = VariantChoice::Both)]
    pub variant: VariantChoice,
    /// Admit series to the Granger tests even if ADF keeps a unit root.
    #[arg(long, value_enum)]
    pub assume_stationary: Option<StationaryChoice>,
    /// Report destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for series.tsv, downturn.tsv and dlgd.tsv.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl AnalyzeArgs {
    pub fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            min_window: self.min_window,
            max_lag: self.max_lag,
            alpha: self.alpha,
            variants: self.variant.variants(),
            assume_stationary: self
                .assume_stationary
                .map(StationaryChoice::variables)
                .unwrap_or_default(),
            ..AnalysisConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FetchBcbArgs {
    /// SGS series code.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub series: u32,
    /// First month, YYYY-MM.
    #[arg(long)]
    pub start: MonthIndex,
    /// Last month, YYYY-MM (inclusive).
    #[arg(long)]
    pub end: MonthIndex,
    #[arg(long)]
    pub out: PathBuf,
    /// Endpoint base URL; defaults to $DLGD_BCB_ENDPOINT, then the public service.
    #[arg(long)]
    pub endpoint: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// TOML spec file.
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn load(path: &Path, flag: &str, kind: SeriesKind) -> Result<crate::series::MonthlySeries> {
    let file = read_series_path(path).map_err(|e| match e {
        Error::ParseError { line, reason } => Error::ParseError {
            line,
            reason: format!("{}: {reason}", path.display()),
        },
        other => other,
    })?;
    if file.header.kind != kind {
        return Err(Error::InvalidArgument(format!(
            "{} passed as --{flag} declares kind={}",
            path.display(),
            file.header.kind
        )));
    }
    Ok(file.series)
}

/// Reads both inputs, runs the analysis and writes the report (to `--out`
/// or `stdout`) and the optional plot data. Nothing is written on error.
pub fn cmd_analyze(args: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<AnalysisReport> {
    let rd = load(&args.rd, "rd", SeriesKind::Rd)?;
    let lgd = load(&args.lgd, "lgd", SeriesKind::Lgd)?;
    let pair = align(&rd, &lgd)?;
    let mut report = analyze(&pair, &args.config(), &file_label(&args.rd), &file_label(&args.lgd))?;
    if pair.len() < rd.len().max(lgd.len()) {
        report.warnings.push(format!(
            "inputs trimmed to their common period {} to {}",
            pair.start(),
            pair.end()
        ));
    }

    let rendered = match args.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    if let Some(dir) = &args.plot_data {
        emit_plot_data(&report, &pair, dir)?;
    }
    match &args.out {
        Some(path) => crate::atomic_write(path, rendered.as_bytes())?,
        None => stdout
            .write_all(rendered.as_bytes())
            .map_err(|e| Error::io("standard output", e))?,
    }
    Ok(report)
}

pub fn cmd_fetch_bcb(args: &FetchBcbArgs) -> Result<()> {
    if args.start > args.end {
        return Err(Error::InvalidArgument(format!(
            "--start {} is after --end {}",
            args.start, args.end
        )));
    }
    let endpoint = resolve_endpoint(args.endpoint.as_deref());
    let series = BcbClient::new(endpoint)?.fetch(args.series, args.start, args.end)?;
    write_series_path(&series, SeriesKind::Rd, &args.out)
}

/// Writes the generated data and returns the paths written plus the number
/// of clamped values.
pub fn cmd_synth(args: &SynthArgs) -> Result<(Vec<PathBuf>, usize)> {
    let spec = SynthSpec::from_toml_file(&args.spec)?;
    let output = generate(&spec)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(args.out.display(), e))?;
    let mut written = Vec::new();
    match &output.data {
        SynthData::Pair(pair) => {
            for (series, kind, file) in [
                (pair.rd(), SeriesKind::Rd, "rd.csv"),
                (pair.lgd(), SeriesKind::Lgd, "lgd.csv"),
            ] {
                let path = args.out.join(file);
                write_series_path(series, kind, &path)?;
                written.push(path);
            }
        }
        SynthData::Series(series) => {
            let kind = match spec.role {
                Role::Rd => SeriesKind::Rd,
                Role::Lgd => SeriesKind::Lgd,
            };
            let path = args.out.join(format!("{}.csv", series.name()));
            write_series_path(series, kind, &path)?;
            written.push(path);
        }
    }
    Ok((written, output.truncated))
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, stdout).map(|_| ()),
        Command::FetchBcb(a) => cmd_fetch_bcb(a),
        Command::Synth(a) => cmd_synth(a).map(|(_, truncated)| {
            if truncated > 0 {
                let _ = writeln!(stderr, "dlgd: warning: {truncated} value(s) clamped into [0, 1]");
            }
        }),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "dlgd: error: {e}");
            exit_code(&e)
        }
    }
}
