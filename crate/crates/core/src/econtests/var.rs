use crate::error::{Error, Result};
use crate::regression::{lagged_design, ols_fit, ExtraLags, OlsFit};
use crate::series::AlignedPair;

use super::Variable;

/// Residual degrees of freedom each VAR equation must keep.
pub const MIN_RESIDUAL_DOF: usize = 10;

/// Shortest pair that supports a VAR (or Granger test) of order `p`:
/// `T - p` usable rows minus `2p + 1` coefficients must leave
/// [`MIN_RESIDUAL_DOF`].
pub fn min_len_for_order(p: usize) -> usize {
    3 * p + 1 + MIN_RESIDUAL_DOF
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarEquation {
    pub variable: Variable,
    /// Coefficients ordered `[const, rd lags 1..p, lgd lags 1..p]`.
    pub fit: OlsFit,
}

/// Bivariate VAR(p) with a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct VarModel {
    pub order: usize,
    /// RD equation first, then LGD.
    pub equations: [VarEquation; 2],
    pub t_eff: usize,
}

impl VarModel {
    pub fn equation(&self, variable: Variable) -> &VarEquation {
        match variable {
            Variable::Rd => &self.equations[0],
            Variable::Lgd => &self.equations[1],
        }
    }

    /// Lag-`lag` coefficient matrix `A` with rows `[rd, lgd]` (equations) and
    /// columns `[rd, lgd]` (regressors).
    pub fn lag_matrix(&self, lag: usize) -> [[f64; 2]; 2] {
        assert!(lag >= 1 && lag <= self.order, "lag {lag} outside 1..={}", self.order);
        let p = self.order;
        let row = |eq: &VarEquation| [eq.fit.coefficients[lag], eq.fit.coefficients[p + lag]];
        [row(&self.equations[0]), row(&self.equations[1])]
    }

    pub fn intercepts(&self) -> [f64; 2] {
        [
            self.equations[0].fit.coefficients[0],
            self.equations[1].fit.coefficients[0],
        ]
    }
}

/// Fits both VAR equations by OLS on the shared regressor stack
/// `[1, rd lags 1..p, lgd lags 1..p]`.
pub fn fit_var(pair: &AlignedPair, p: usize) -> Result<VarModel> {
    check_order(pair, p)?;
    let rd = pair.rd().values();
    let lgd = pair.lgd().values();
    let (design, rd_target) = lagged_design(rd, p, true, Some(ExtraLags { values: lgd, lags: p }))?;
    let lgd_target = lgd[p..].to_vec();
    let rd_fit = ols_fit(&design, &rd_target)?;
    let lgd_fit = ols_fit(&design, &lgd_target)?;
    Ok(VarModel {
        order: p,
        equations: [
            VarEquation {
                variable: Variable::Rd,
                fit: rd_fit,
            },
            VarEquation {
                variable: Variable::Lgd,
                fit: lgd_fit,
            },
        ],
        t_eff: pair.len() - p,
    })
}

pub(super) fn check_order(pair: &AlignedPair, p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidArgument("VAR order must be at least 1".into()));
    }
    let needed = min_len_for_order(p);
    if pair.len() < needed {
        return Err(Error::InsufficientData {
            what: format!("VAR of order {p}"),
            needed,
            available: pair.len(),
        });
    }
    Ok(())
}
