//! The command-line surface: the analysis pipeline, report rendering and
//! plot-data emission.

pub mod cli;
mod plot;
mod report;

pub use self::plot::{emit_plot_data, PLOT_FILES};
pub use self::report::{
    AdfEntry, AdfOutcome, AnalysisReport, AppliedDlgd, CorrelationReport, InputSeries, Inputs,
    Metadata, PairSummary, Parameters, Period, VariantAssessment, WindowAssessment,
    SCHEMA_VERSION,
};

use crate::dist::{t_two_sided_p, DeterministicTerms};
use crate::downturn::{
    assess, detect_downturns, downturn_lgd, DownturnLgd, render_formula, window_union, Variant,
    DEFAULT_MIN_WINDOW,
};
use crate::econtests::{
    adf_test, granger_grid, GrangerOutcome, StationarityGate, UnitRootVerdict, Variable,
    DEFAULT_MAX_LAGS,
};
use crate::error::{Error, Result};
use crate::series::{pearson, summary, AlignedPair, MonthlySeries};

pub const DEFAULT_MAX_LAG: usize = 8;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Process exit code for an error: 2 for input and usage problems, 3 for
/// analysis failures.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_input_error() {
        2
    } else {
        3
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub min_window: usize,
    pub max_lag: usize,
    /// Shared by the ADF and Granger tests; one of 0.01, 0.05, 0.10.
    pub alpha: f64,
    pub variants: Vec<Variant>,
    pub assume_stationary: Vec<Variable>,
    pub adf_model: DeterministicTerms,
    pub adf_max_lags: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            min_window: DEFAULT_MIN_WINDOW,
            max_lag: DEFAULT_MAX_LAG,
            alpha: DEFAULT_ALPHA,
            variants: vec![Variant::Strict, Variant::Lenient],
            assume_stationary: Vec::new(),
            adf_model: DeterministicTerms::Constant,
            adf_max_lags: DEFAULT_MAX_LAGS,
        }
    }
}

/// Insertion-ordered warning list that keeps each message once.
#[derive(Debug, Default)]
struct Warnings(Vec<String>);

impl Warnings {
    fn push(&mut self, msg: String) {
        if !self.0.contains(&msg) {
            self.0.push(msg);
        }
    }
}

fn input_series(file: &str, s: &MonthlySeries) -> InputSeries {
    InputSeries {
        file: file.to_string(),
        series: s.name().to_string(),
        start: s.start(),
        end: s.end(),
        months: s.len(),
        has_weights: s.weights().is_some(),
    }
}

/// Runs the full pipeline on an aligned pair. `rd_file` and `lgd_file` only
/// label the inputs in the report metadata.
///
/// ADF failures and infeasible Granger cells are recorded in the report;
/// correlation, downturn detection and assessment failures abort.
pub fn analyze(
    pair: &AlignedPair,
    config: &AnalysisConfig,
    rd_file: &str,
    lgd_file: &str,
) -> Result<AnalysisReport> {
    if config.variants.is_empty() {
        return Err(Error::InvalidArgument("at least one variant is required".into()));
    }
    crate::dist::Significance::from_alpha(config.alpha)?;
    let mut warnings = Warnings::default();

    let summary = PairSummary {
        rd: summary(pair.rd())?,
        lgd: summary(pair.lgd())?,
    };
    let correlation = correlation_report(pair, config.alpha)?;

    let mut adf = Vec::with_capacity(2);
    let mut admitted = [false; 2];
    for (slot, variable) in [Variable::Rd, Variable::Lgd].into_iter().enumerate() {
        let series = variable.of(pair);
        let outcome = match adf_test(series, config.adf_model, config.adf_max_lags, config.alpha) {
            Ok(r) => AdfOutcome::Computed(r),
            Err(e) => AdfOutcome::Failed {
                reason: e.to_string(),
            },
        };
        let stationary = matches!(&outcome, AdfOutcome::Computed(r) if r.verdict == UnitRootVerdict::Stationary);
        let assumed = config.assume_stationary.contains(&variable);
        let admission = if stationary {
            "admitted: ADF rejects a unit root".to_string()
        } else if assumed {
            warnings.push(format!(
                "stationarity of {} `{}` assumed by --assume-stationary; ADF did not reject a unit root",
                variable.label(),
                series.name()
            ));
            "admitted: stationarity assumed by --assume-stationary".to_string()
        } else {
            warnings.push(format!(
                "{} `{}` not shown stationary; Granger tests involving it are skipped (use --assume-stationary to override)",
                variable.label(),
                series.name()
            ));
            "excluded: ADF did not reject a unit root".to_string()
        };
        if let AdfOutcome::Failed { reason } = &outcome {
            warnings.push(format!("ADF test on {} failed: {reason}", variable.label()));
        }
        admitted[slot] = stationary || assumed;
        adf.push(AdfEntry {
            variable,
            outcome,
            granger_admitted: stationary || assumed,
            admission,
        });
    }

    let gate = StationarityGate::new(admitted[0], admitted[1]);
    let granger = granger_grid(pair, config.max_lag, config.alpha, gate)?;
    for cell in &granger {
        if let GrangerOutcome::Skipped { reason } = &cell.outcome {
            warnings.push(format!(
                "Granger {} -> {} at lag {} skipped: {reason}",
                cell.cause, cell.effect, cell.lag
            ));
        }
    }

    let downturns = detect_downturns(pair.rd(), config.min_window)?;
    if downturns.is_empty() {
        warnings.push(format!(
            "no downturn window of at least {} months; add-ons are 0 and dLGD = ELGD",
            config.min_window
        ));
    }
    let union = window_union(&downturns);
    let elgd = summary.lgd.weighted_mean;

    let mut assessments = Vec::with_capacity(config.variants.len());
    let mut final_formulas = Vec::with_capacity(config.variants.len());
    let mut applied = Vec::with_capacity(config.variants.len());
    for &variant in &config.variants {
        let pooled = if union.is_empty() {
            None
        } else {
            Some(assess(pair, &union, variant)?)
        };
        let mut per_window = Vec::with_capacity(downturns.len());
        for w in &downturns {
            let months: Vec<_> = w.months().collect();
            per_window.push(WindowAssessment {
                window_start: w.start,
                window_end: w.end,
                assessment: assess(pair, &months, variant)?,
            });
        }
        let va = VariantAssessment {
            variant,
            label: variant.label().to_string(),
            pooled,
            per_window,
        };
        let addon = va.addon();
        final_formulas.push(render_formula(variant.label(), addon));

        let dlgd = match &va.pooled {
            Some(a) => downturn_lgd(a, elgd)?,
            None if (0.0..=1.0).contains(&elgd) => DownturnLgd {
                value: elgd,
                capped: false,
            },
            None => return Err(Error::InvalidElgd(elgd)),
        };
        if dlgd.capped {
            warnings.push(format!(
                "{}: ELGD {elgd} plus add-on {addon} exceeds 1; capped at 1",
                variant.label()
            ));
        }
        applied.push(AppliedDlgd {
            variant,
            label: variant.label().to_string(),
            elgd,
            addon,
            dlgd,
        });
        assessments.push(va);
    }

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        metadata: Metadata {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Inputs {
                rd: input_series(rd_file, pair.rd()),
                lgd: input_series(lgd_file, pair.lgd()),
            },
            period: Period {
                start: pair.start(),
                end: pair.end(),
                months: pair.len(),
            },
            parameters: Parameters {
                min_window: config.min_window,
                max_lag: config.max_lag,
                alpha: config.alpha,
                variants: config.variants.clone(),
                assume_stationary: config.assume_stationary.clone(),
                adf_model: config.adf_model,
                adf_max_lags: config.adf_max_lags,
            },
        },
        summary,
        correlation,
        adf,
        granger,
        downturns,
        assessments,
        final_formulas,
        applied,
        warnings: warnings.0,
    })
}

fn correlation_report(pair: &AlignedPair, alpha: f64) -> Result<CorrelationReport> {
    let r = pearson(pair)?;
    let n = pair.len();
    let dof = (n - 2) as f64;
    let (t_statistic, p_value) = if r.abs() >= 1.0 {
        (None, 0.0)
    } else {
        let t = r * (dof / (1.0 - r * r)).sqrt();
        (Some(t), t_two_sided_p(t, dof)?)
    };
    let note = if p_value < alpha {
        format!("significantly different from zero at alpha {alpha} (two-sided t test, {} dof)", n - 2)
    } else {
        format!("not significantly different from zero at alpha {alpha} (two-sided t test, {} dof)", n - 2)
    };
    Ok(CorrelationReport {
        pearson: r,
        n,
        t_statistic,
        p_value,
        note,
    })
}
