//! Analysis report: a schema-versioned JSON document with a plain-text
//! rendering of the same content.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dist::DeterministicTerms;
use crate::downturn::{DownturnAssessment, DownturnLgd, DownturnWindow, Variant};
use crate::econtests::{AdfResult, GrangerCell, GrangerOutcome, Variable};
use crate::series::{MonthIndex, SummaryStats};

/// Bumped whenever a field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub metadata: Metadata,
    pub summary: PairSummary,
    pub correlation: CorrelationReport,
    pub adf: Vec<AdfEntry>,
    pub granger: Vec<GrangerCell>,
    pub downturns: Vec<DownturnWindow>,
    pub assessments: Vec<VariantAssessment>,
    pub final_formulas: Vec<String>,
    pub applied: Vec<AppliedDlgd>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub tool_version: String,
    pub inputs: Inputs,
    pub period: Period,
    pub parameters: Parameters,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inputs {
    pub rd: InputSeries,
    pub lgd: InputSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputSeries {
    /// File name without directories, so reports do not depend on where the
    /// inputs live.
    pub file: String,
    pub series: String,
    pub start: MonthIndex,
    pub end: MonthIndex,
    pub months: usize,
    pub has_weights: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Period {
    pub start: MonthIndex,
    pub end: MonthIndex,
    pub months: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Parameters {
    pub min_window: usize,
    pub max_lag: usize,
    pub alpha: f64,
    pub variants: Vec<Variant>,
    pub assume_stationary: Vec<Variable>,
    pub adf_model: DeterministicTerms,
    pub adf_max_lags: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSummary {
    pub rd: SummaryStats,
    pub lgd: SummaryStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub pearson: f64,
    pub n: usize,
    /// `r * sqrt((n - 2) / (1 - r^2))`; absent when `|r| = 1`.
    pub t_statistic: Option<f64>,
    pub p_value: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum AdfOutcome {
    Computed(AdfResult),
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdfEntry {
    pub variable: Variable,
    #[serde(flatten)]
    pub outcome: AdfOutcome,
    /// Whether the series entered the Granger tests, and why.
    pub granger_admitted: bool,
    pub admission: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowAssessment {
    pub window_start: MonthIndex,
    pub window_end: MonthIndex,
    pub assessment: DownturnAssessment,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantAssessment {
    pub variant: Variant,
    pub label: String,
    /// Assessment over the union of all window months; absent when no
    /// window was detected.
    pub pooled: Option<DownturnAssessment>,
    pub per_window: Vec<WindowAssessment>,
}

impl VariantAssessment {
    /// Add-on applied to ELGD: the pooled one, or 0 without a downturn.
    pub fn addon(&self) -> f64 {
        self.pooled.as_ref().map_or(0.0, |a| a.addon_absolute)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppliedDlgd {
    pub variant: Variant,
    pub label: String,
    /// Whole-period (exposure-weighted when available) mean LGD.
    pub elgd: f64,
    pub addon: f64,
    pub dlgd: DownturnLgd,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let md = &self.metadata;
        let _ = writeln!(out, "{} {} report (schema {})", md.tool, md.tool_version, self.schema_version);
        let _ = writeln!(
            out,
            "inputs: rd={} ({}), lgd={} ({})",
            md.inputs.rd.file, md.inputs.rd.series, md.inputs.lgd.file, md.inputs.lgd.series
        );
        let _ = writeln!(
            out,
            "period: {} to {} ({} months)",
            md.period.start, md.period.end, md.period.months
        );
        let p = &md.parameters;
        let _ = writeln!(
            out,
            "parameters: min_window={} max_lag={} alpha={} variants={} adf_model={} adf_max_lags={}",
            p.min_window,
            p.max_lag,
            p.alpha,
            p.variants.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
            p.adf_model.label(),
            p.adf_max_lags,
        );

        let _ = writeln!(out, "\nsummary");
        for (label, s) in [("rd", &self.summary.rd), ("lgd", &self.summary.lgd)] {
            let _ = writeln!(
                out,
                "  {label:<4} n={} mean={:.6} std={:.6} weighted_mean={:.6}",
                s.n, s.mean, s.std, s.weighted_mean,
            );
        }

        let c = &self.correlation;
        let _ = writeln!(out, "\ncorrelation");
        let _ = writeln!(
            out,
            "  pearson={:.4} n={} t={} p={:.4e}",
            c.pearson,
            c.n,
            c.t_statistic.map_or("n/a".to_string(), |t| format!("{t:.4}")),
            c.p_value
        );
        let _ = writeln!(out, "  {}", c.note);

        let _ = writeln!(out, "\nunit root (ADF)");
        for e in &self.adf {
            match &e.outcome {
                AdfOutcome::Computed(r) => {
                    let _ = writeln!(
                        out,
                        "  {:<4} stat={:.4} lags={} nobs={} cv(1/5/10%)={:.3}/{:.3}/{:.3} verdict={}",
                        e.variable.label(),
                        r.statistic,
                        r.lags_used,
                        r.nobs,
                        r.critical_values.one,
                        r.critical_values.five,
                        r.critical_values.ten,
                        match r.verdict {
                            crate::econtests::UnitRootVerdict::HasUnitRoot => "has-unit-root",
                            crate::econtests::UnitRootVerdict::Stationary => "stationary",
                        }
                    );
                }
                AdfOutcome::Failed { reason } => {
                    let _ = writeln!(out, "  {:<4} failed: {reason}", e.variable.label());
                }
            }
            let _ = writeln!(out, "       granger: {}", e.admission);
        }

        let _ = writeln!(out, "\nGranger causality");
        for cell in &self.granger {
            match &cell.outcome {
                GrangerOutcome::Computed(r) => {
                    let _ = writeln!(
                        out,
                        "  {} -> {} lag {:>2}: F={:.4} dof=({},{}) p={:.4} {}",
                        cell.cause,
                        cell.effect,
                        cell.lag,
                        r.f_statistic,
                        r.dof.0,
                        r.dof.1,
                        r.p_value,
                        match r.verdict {
                            crate::econtests::CausalityVerdict::Causes => "causes",
                            crate::econtests::CausalityVerdict::DoesNotCause => "does-not-cause",
                        }
                    );
                }
                GrangerOutcome::Skipped { reason } => {
                    let _ = writeln!(
                        out,
                        "  {} -> {} lag {:>2}: skipped ({reason})",
                        cell.cause, cell.effect, cell.lag
                    );
                }
            }
        }

        let _ = writeln!(out, "\ndownturn windows");
        if self.downturns.is_empty() {
            let _ = writeln!(out, "  none");
        }
        for w in &self.downturns {
            let _ = writeln!(
                out,
                "  {} to {} ({} months), threshold {:.6} = mean {:.6} + std {:.6}",
                w.start, w.end, w.length, w.threshold, w.long_run_mean, w.long_run_std
            );
        }

        let _ = writeln!(out, "\nassessments");
        for va in &self.assessments {
            match &va.pooled {
                Some(a) => {
                    let _ = writeln!(
                        out,
                        "  {} ({}): numerator={:.6} denominator={:.6} ratio={:.6} uplift={:.4}% base={:.6} addon={:.6}",
                        va.label,
                        va.variant,
                        a.numerator,
                        a.denominator,
                        a.ratio,
                        a.relative_uplift * 100.0,
                        a.base_elgd,
                        a.addon_absolute
                    );
                }
                None => {
                    let _ = writeln!(out, "  {} ({}): no downturn window", va.label, va.variant);
                }
            }
            if va.per_window.len() > 1 {
                for w in &va.per_window {
                    let _ = writeln!(
                        out,
                        "    window {} to {}: ratio={:.6} addon={:.6}",
                        w.window_start, w.window_end, w.assessment.ratio, w.assessment.addon_absolute
                    );
                }
            }
        }

        let _ = writeln!(out, "\nformulas");
        for f in &self.final_formulas {
            let _ = writeln!(out, "  {f}");
        }
        for a in &self.applied {
            let _ = writeln!(
                out,
                "  {} with ELGD {:.6}: {:.6}{}",
                a.label,
                a.elgd,
                a.dlgd.value,
                if a.dlgd.capped { " (capped at 1)" } else { "" }
            );
        }

        let _ = writeln!(out, "\nwarnings");
        if self.warnings.is_empty() {
            let _ = writeln!(out, "  none");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "  {w}");
        }
        out
    }
}
