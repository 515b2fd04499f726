use serde::Serialize;

use crate::dist::f_sf;
use crate::error::{Error, Result};
use crate::regression::{lagged_design, ols_fit, ExtraLags};
use crate::series::AlignedPair;

use super::var::check_order;
use super::Variable;

/// Which series may enter a Granger test: either found stationary or
/// explicitly overridden by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StationarityGate {
    pub rd: bool,
    pub lgd: bool,
}

impl StationarityGate {
    pub fn new(rd: bool, lgd: bool) -> Self {
        Self { rd, lgd }
    }

    /// Admits both series unconditionally.
    pub fn open() -> Self {
        Self { rd: true, lgd: true }
    }

    pub fn admits(&self, variable: Variable) -> bool {
        match variable {
            Variable::Rd => self.rd,
            Variable::Lgd => self.lgd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CausalityVerdict {
    Causes,
    DoesNotCause,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrangerResult {
    pub cause: String,
    pub effect: String,
    pub cause_variable: Variable,
    pub lag: usize,
    pub f_statistic: f64,
    /// `(p, T_eff - 2p - 1)`.
    pub dof: (usize, usize),
    pub p_value: f64,
    pub verdict: CausalityVerdict,
    pub alpha: f64,
    pub rss_restricted: f64,
    pub rss_unrestricted: f64,
    pub t_eff: usize,
}

/// Nested-regression F statistic `((rss_r - rss_u) / p) / (rss_u / d2)`.
///
/// A restricted RSS below the unrestricted one can only be rounding noise
/// (the models are nested on identical rows) and yields zero.
pub fn f_statistic(rss_restricted: f64, rss_unrestricted: f64, p: usize, d2: usize) -> f64 {
    let gain = (rss_restricted - rss_unrestricted).max(0.0);
    if gain == 0.0 {
        0.0
    } else if rss_unrestricted == 0.0 {
        f64::INFINITY
    } else {
        (gain / p as f64) / (rss_unrestricted / d2 as f64)
    }
}

/// Tests whether `cause` Granger-causes the other series of the pair at `lag`.
///
/// Both models are fitted on the unrestricted model's rows `t = lag..T-1`:
/// unrestricted regresses the effect on a constant, its own lags and the
/// cause's lags; restricted drops the cause's lags.
pub fn granger_test(
    pair: &AlignedPair,
    cause: Variable,
    lag: usize,
    alpha: f64,
    gate: StationarityGate,
) -> Result<GrangerResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 1)")));
    }
    for v in [Variable::Rd, Variable::Lgd] {
        if !gate.admits(v) {
            return Err(Error::NonStationaryInput {
                series: v.of(pair).name().to_string(),
            });
        }
    }
    check_order(pair, lag)?;

    let effect = cause.other();
    let effect_values = effect.of(pair).values();
    let cause_values = cause.of(pair).values();

    let (full, target) = lagged_design(
        effect_values,
        lag,
        true,
        Some(ExtraLags {
            values: cause_values,
            lags: lag,
        }),
    )?;
    let (own_only, target_r) = lagged_design(effect_values, lag, true, None)?;
    debug_assert_eq!(target, target_r);

    let unrestricted = ols_fit(&full, &target)?;
    let restricted = ols_fit(&own_only, &target)?;

    let t_eff = target.len();
    let d2 = unrestricted.dof;
    debug_assert_eq!(d2, t_eff - 2 * lag - 1);
    let rss_unrestricted = unrestricted.rss;
    let rss_restricted = restricted.rss.max(rss_unrestricted);
    let f = f_statistic(rss_restricted, rss_unrestricted, lag, d2);
    let p_value = f_sf(f, lag as f64, d2 as f64)?;
    let verdict = if p_value < alpha {
        CausalityVerdict::Causes
    } else {
        CausalityVerdict::DoesNotCause
    };

    Ok(GrangerResult {
        cause: cause.of(pair).name().to_string(),
        effect: effect.of(pair).name().to_string(),
        cause_variable: cause,
        lag,
        f_statistic: f,
        dof: (lag, d2),
        p_value,
        verdict,
        alpha,
        rss_restricted,
        rss_unrestricted,
        t_eff,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum GrangerOutcome {
    Computed(GrangerResult),
    Skipped { reason: String },
}

/// One direction-and-lag cell of a Granger grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrangerCell {
    pub cause: String,
    pub effect: String,
    pub lag: usize,
    #[serde(flatten)]
    pub outcome: GrangerOutcome,
}

impl GrangerCell {
    pub fn result(&self) -> Option<&GrangerResult> {
        match &self.outcome {
            GrangerOutcome::Computed(r) => Some(r),
            GrangerOutcome::Skipped { .. } => None,
        }
    }
}

/// Both directions over lags `1..=max_lag`: RD as cause first, then LGD,
/// each in increasing lag order. Cells whose preconditions fail are kept as
/// skipped with the reason.
pub fn granger_grid(
    pair: &AlignedPair,
    max_lag: usize,
    alpha: f64,
    gate: StationarityGate,
) -> Result<Vec<GrangerCell>> {
    if max_lag == 0 {
        return Err(Error::InvalidArgument("max lag must be at least 1".into()));
    }
    let mut cells = Vec::with_capacity(2 * max_lag);
    for cause in [Variable::Rd, Variable::Lgd] {
        for lag in 1..=max_lag {
            let outcome = match granger_test(pair, cause, lag, alpha, gate) {
                Ok(r) => GrangerOutcome::Computed(r),
                Err(e) => GrangerOutcome::Skipped {
                    reason: e.to_string(),
                },
            };
            cells.push(GrangerCell {
                cause: cause.of(pair).name().to_string(),
                effect: cause.other().of(pair).name().to_string(),
                lag,
                outcome,
            });
        }
    }
    Ok(cells)
}
