use serde::Serialize;

use crate::dist::{critical_table, CriticalValues, DeterministicTerms, Significance};
use crate::error::{Error, Result};
use crate::regression::{ols_fit, DesignMatrix, OlsFit};
use crate::series::MonthlySeries;

pub const DEFAULT_MAX_LAGS: usize = 10;

/// Residual degrees of freedom kept on the common lag-selection sample; the
/// lag search is capped so every candidate regression retains them.
const MIN_SELECTION_DOF: usize = 10;

/// Extra observations beyond `max_lags` required by the test.
const MIN_EXTRA_OBS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitRootVerdict {
    HasUnitRoot,
    Stationary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdfResult {
    pub series_name: String,
    pub model: DeterministicTerms,
    pub lags_used: usize,
    /// Largest lag actually searched (may be below the requested maximum on
    /// short series).
    pub max_lags_searched: usize,
    pub nobs: usize,
    /// t-statistic on the lagged level.
    pub statistic: f64,
    pub critical_values: CriticalValues,
    pub verdict: UnitRootVerdict,
    pub alpha: f64,
}

/// Augmented Dickey-Fuller test with AIC lag selection over `0..=max_lags`.
///
/// Regresses `dy(t)` on the deterministic terms, `y(t-1)` and
/// `dy(t-1)..dy(t-k)`. All candidate lags are compared on the common sample
/// that the largest lag allows; the chosen lag is then refitted on its full
/// sample. `alpha` must be 0.01, 0.05 or 0.10.
pub fn adf_test(
    series: &MonthlySeries,
    model: DeterministicTerms,
    max_lags: usize,
    alpha: f64,
) -> Result<AdfResult> {
    let level = Significance::from_alpha(alpha)?;
    let y = series.values();
    let n = y.len();
    if n < max_lags + MIN_EXTRA_OBS {
        return Err(Error::InsufficientData {
            what: format!("ADF test on `{}` with max lag {max_lags}", series.name()),
            needed: max_lags + MIN_EXTRA_OBS,
            available: n,
        });
    }
    let det = deterministic_count(model);

    // rows on the common sample: (n - 1 - k) - (det + 1 + k) >= MIN_SELECTION_DOF
    let budget = (n - 1).saturating_sub(det + 1 + MIN_SELECTION_DOF);
    let searched = max_lags.min(budget / 2);
    if n - 1 < det + 1 + MIN_SELECTION_DOF {
        return Err(Error::InsufficientData {
            what: format!("ADF regression on `{}`", series.name()),
            needed: det + 2 + MIN_SELECTION_DOF,
            available: n,
        });
    }

    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let mut best: Option<(usize, f64)> = None;
    for k in 0..=searched {
        let fit = fit_regression(y, &dy, model, k, searched)?;
        let aic = fit.aic();
        if best.map_or(true, |(_, b)| aic < b) {
            best = Some((k, aic));
        }
    }
    let (lags_used, _) = best.expect("at least lag 0 is evaluated");

    let fit = fit_regression(y, &dy, model, lags_used, lags_used)?;
    let statistic = fit.tstats[det];
    if !statistic.is_finite() {
        return Err(Error::DegenerateSeries {
            series: series.name().to_string(),
            reason: "ADF regression fits exactly; the t-statistic is undefined".into(),
        });
    }
    let nobs = fit.nobs();
    let critical_values = critical_table(model).values(nobs)?;
    let verdict = if statistic < critical_values.at(level) {
        UnitRootVerdict::Stationary
    } else {
        UnitRootVerdict::HasUnitRoot
    };
    Ok(AdfResult {
        series_name: series.name().to_string(),
        model,
        lags_used,
        max_lags_searched: searched,
        nobs,
        statistic,
        critical_values,
        verdict,
        alpha,
    })
}

fn deterministic_count(model: DeterministicTerms) -> usize {
    match model {
        DeterministicTerms::None => 0,
        DeterministicTerms::Constant => 1,
        DeterministicTerms::ConstantTrend => 2,
    }
}

/// Fits the ADF regression with `k` difference lags on rows `first..dy.len()`.
fn fit_regression(
    y: &[f64],
    dy: &[f64],
    model: DeterministicTerms,
    k: usize,
    first: usize,
) -> Result<OlsFit> {
    let rows = first..dy.len();
    let mut columns = Vec::with_capacity(deterministic_count(model) + 1 + k);
    if model != DeterministicTerms::None {
        columns.push(("const".to_string(), vec![1.0; rows.len()]));
    }
    if model == DeterministicTerms::ConstantTrend {
        columns.push(("trend".to_string(), rows.clone().map(|i| (i + 1) as f64).collect()));
    }
    columns.push(("level_lag1".to_string(), rows.clone().map(|i| y[i]).collect()));
    for l in 1..=k {
        columns.push((format!("diff_lag{l}"), rows.clone().map(|i| dy[i - l]).collect()));
    }
    let target: Vec<f64> = rows.map(|i| dy[i]).collect();
    ols_fit(&DesignMatrix::from_columns(columns)?, &target)
}
