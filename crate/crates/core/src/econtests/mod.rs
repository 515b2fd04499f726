//! Unit-root testing, VAR estimation and bivariate Granger causality.

mod adf;
mod granger;
mod var;

use serde::Serialize;

use crate::series::{AlignedPair, MonthlySeries};

pub use adf::{adf_test, AdfResult, UnitRootVerdict, DEFAULT_MAX_LAGS};
pub use granger::{
    f_statistic, granger_grid, granger_test, CausalityVerdict, GrangerCell, GrangerOutcome,
    GrangerResult, StationarityGate,
};
pub use var::{fit_var, min_len_for_order, VarEquation, VarModel, MIN_RESIDUAL_DOF};

/// One of the two variables of an [`AlignedPair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Rd,
    Lgd,
}

impl Variable {
    pub fn other(self) -> Self {
        match self {
            Variable::Rd => Variable::Lgd,
            Variable::Lgd => Variable::Rd,
        }
    }

    pub fn of(self, pair: &AlignedPair) -> &MonthlySeries {
        match self {
            Variable::Rd => pair.rd(),
            Variable::Lgd => pair.lgd(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Variable::Rd => "rd",
            Variable::Lgd => "lgd",
        }
    }
}
