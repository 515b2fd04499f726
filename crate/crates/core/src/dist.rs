//! Student t and F distribution functions, and Dickey-Fuller critical values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BETA_CF_EPS: f64 = 1e-14;
const BETA_CF_MAX_ITER: usize = 300;
const FP_MIN: f64 = 1e-300;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let s = (std::f64::consts::PI * x).sin();
        return (std::f64::consts::PI / s).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "incomplete beta shape parameters must be positive, got ({a}, {b})"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "incomplete beta argument {x} outside [0, 1]"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((front * beta_continued_fraction(x, a, b)? / a).clamp(0.0, 1.0))
    } else {
        Ok((1.0 - front * beta_continued_fraction(1.0 - x, b, a)? / b).clamp(0.0, 1.0))
    }
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FP_MIN {
        d = FP_MIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FP_MIN {
            d = FP_MIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FP_MIN {
            c = FP_MIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FP_MIN {
            d = FP_MIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FP_MIN {
            c = FP_MIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETA_CF_EPS {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence {
        what: format!("incomplete beta continued fraction (x={x}, a={a}, b={b})"),
        iterations: BETA_CF_MAX_ITER,
    })
}

fn check_dof(dof: f64) -> Result<()> {
    if dof.is_finite() && dof > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDof(dof))
    }
}

/// `P(T <= x)` for Student's t with `dof` degrees of freedom.
pub fn t_cdf(x: f64, dof: f64) -> Result<f64> {
    check_dof(dof)?;
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("t statistic {x} is not finite")));
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    let tail = 0.5 * inc_beta(dof / (dof + x * x), 0.5 * dof, 0.5)?;
    Ok(if x > 0.0 { 1.0 - tail } else { tail })
}

/// Two-sided p-value of a t statistic.
pub fn t_two_sided_p(x: f64, dof: f64) -> Result<f64> {
    check_dof(dof)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    let x = x.abs();
    if x == 0.0 {
        return Ok(1.0);
    }
    inc_beta(dof / (dof + x * x), 0.5 * dof, 0.5)
}

fn check_f_args(x: f64, d1: f64, d2: f64) -> Result<()> {
    check_dof(d1)?;
    check_dof(d2)?;
    if x.is_nan() {
        return Err(Error::InvalidArgument("F statistic is NaN".into()));
    }
    if x < 0.0 {
        return Err(Error::NegativeStatistic(x));
    }
    Ok(())
}

/// `P(F <= x)` for the F distribution with `(d1, d2)` degrees of freedom.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_f_args(x, d1, d2)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    inc_beta(d1 * x / (d1 * x + d2), 0.5 * d1, 0.5 * d2)
}

/// Upper tail `P(F > x)`, evaluated directly so small p-values keep precision.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_f_args(x, d1, d2)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    inc_beta(d2 / (d2 + d1 * x), 0.5 * d2, 0.5 * d1)
}

/// Deterministic terms in a Dickey-Fuller regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeterministicTerms {
    None,
    Constant,
    ConstantTrend,
}

impl DeterministicTerms {
    pub fn label(self) -> &'static str {
        match self {
            DeterministicTerms::None => "none",
            DeterministicTerms::Constant => "constant",
            DeterministicTerms::ConstantTrend => "constant-trend",
        }
    }
}

/// Significance levels with tabulated Dickey-Fuller critical values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Significance {
    #[serde(rename = "1%")]
    One,
    #[serde(rename = "5%")]
    Five,
    #[serde(rename = "10%")]
    Ten,
}

impl Significance {
    pub fn from_percent(percent: u32) -> Result<Self> {
        match percent {
            1 => Ok(Significance::One),
            5 => Ok(Significance::Five),
            10 => Ok(Significance::Ten),
            other => Err(Error::UnsupportedLevel(format!("{other}%"))),
        }
    }

    /// Accepts 0.01, 0.05 and 0.10.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        for (level, a) in [
            (Significance::One, 0.01),
            (Significance::Five, 0.05),
            (Significance::Ten, 0.10),
        ] {
            if (alpha - a).abs() < 1e-12 {
                return Ok(level);
            }
        }
        Err(Error::UnsupportedLevel(format!("alpha = {alpha}")))
    }

    pub fn alpha(self) -> f64 {
        match self {
            Significance::One => 0.01,
            Significance::Five => 0.05,
            Significance::Ten => 0.10,
        }
    }

    fn column(self) -> usize {
        match self {
            Significance::One => 0,
            Significance::Five => 1,
            Significance::Ten => 2,
        }
    }
}

/// Critical values of the Dickey-Fuller tau statistic at (1%, 5%, 10%).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
}

impl CriticalValues {
    pub fn at(&self, level: Significance) -> f64 {
        match level {
            Significance::One => self.one,
            Significance::Five => self.five,
            Significance::Ten => self.ten,
        }
    }
}

/// Dickey-Fuller tau critical values by sample size, as tabulated by Fuller
/// (1976, Table 8.5.2) and reproduced in Hamilton (1994, Table B.6).
#[derive(Debug, Clone, Copy)]
pub struct CriticalValueTable {
    pub model: DeterministicTerms,
    /// Finite sample-size breakpoints; rows beyond them use `asymptotic`.
    pub sample_sizes: &'static [usize],
    pub rows: &'static [[f64; 3]],
    pub asymptotic: [f64; 3],
}

pub const MIN_CRITICAL_SAMPLE: usize = 10;

const SAMPLE_SIZES: [usize; 5] = [25, 50, 100, 250, 500];

const TABLE_NONE: CriticalValueTable = CriticalValueTable {
    model: DeterministicTerms::None,
    sample_sizes: &SAMPLE_SIZES,
    rows: &[
        [-2.66, -1.95, -1.60],
        [-2.62, -1.95, -1.61],
        [-2.60, -1.95, -1.61],
        [-2.58, -1.95, -1.62],
        [-2.58, -1.95, -1.62],
    ],
    asymptotic: [-2.58, -1.95, -1.62],
};

const TABLE_CONSTANT: CriticalValueTable = CriticalValueTable {
    model: DeterministicTerms::Constant,
    sample_sizes: &SAMPLE_SIZES,
    rows: &[
        [-3.75, -3.00, -2.63],
        [-3.58, -2.93, -2.60],
        [-3.51, -2.89, -2.58],
        [-3.46, -2.88, -2.57],
        [-3.44, -2.87, -2.57],
    ],
    asymptotic: [-3.43, -2.86, -2.57],
};

const TABLE_TREND: CriticalValueTable = CriticalValueTable {
    model: DeterministicTerms::ConstantTrend,
    sample_sizes: &SAMPLE_SIZES,
    rows: &[
        [-4.38, -3.60, -3.24],
        [-4.15, -3.50, -3.18],
        [-4.04, -3.45, -3.15],
        [-3.99, -3.43, -3.13],
        [-3.98, -3.42, -3.13],
    ],
    asymptotic: [-3.96, -3.41, -3.12],
};

pub fn critical_table(model: DeterministicTerms) -> &'static CriticalValueTable {
    match model {
        DeterministicTerms::None => &TABLE_NONE,
        DeterministicTerms::Constant => &TABLE_CONSTANT,
        DeterministicTerms::ConstantTrend => &TABLE_TREND,
    }
}

impl CriticalValueTable {
    /// Linear interpolation in `n` between breakpoints. Samples below the
    /// first breakpoint use its row; samples past the last use the
    /// asymptotic row.
    pub fn value(&self, n: usize, level: Significance) -> Result<f64> {
        if n < MIN_CRITICAL_SAMPLE {
            return Err(Error::InsufficientData {
                what: "Dickey-Fuller critical value".into(),
                needed: MIN_CRITICAL_SAMPLE,
                available: n,
            });
        }
        let col = level.column();
        let sizes = self.sample_sizes;
        if n <= sizes[0] {
            return Ok(self.rows[0][col]);
        }
        let last = sizes.len() - 1;
        if n > sizes[last] {
            return Ok(self.asymptotic[col]);
        }
        let i = sizes.iter().position(|&s| n <= s).expect("n within breakpoints");
        let (n0, n1) = (sizes[i - 1] as f64, sizes[i] as f64);
        let (v0, v1) = (self.rows[i - 1][col], self.rows[i][col]);
        let w = (n as f64 - n0) / (n1 - n0);
        Ok(v0 + w * (v1 - v0))
    }

    pub fn values(&self, n: usize) -> Result<CriticalValues> {
        Ok(CriticalValues {
            one: self.value(n, Significance::One)?,
            five: self.value(n, Significance::Five)?,
            ten: self.value(n, Significance::Ten)?,
        })
    }
}

/// Critical value for `model` at sample size `n` and `level_percent` in {1, 5, 10}.
pub fn df_critical(model: DeterministicTerms, n: usize, level_percent: u32) -> Result<f64> {
    let level = Significance::from_percent(level_percent)?;
    critical_table(model).value(n, level)
}
