//! Ordinary least squares via column-pivoted Householder QR, with the
//! classical residual diagnostics used by the unit-root and Granger tests.

use crate::error::{Error, Result};

/// Relative threshold on `|R[j][j]| / |R[0][0]|` below which a column is
/// treated as linearly dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Row-major regressor matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    col_labels: Vec<String>,
}

impl DesignMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>, col_labels: Vec<String>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "design matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "design matrix entries".into(),
                expected: rows * cols,
                found: values.len(),
            });
        }
        if col_labels.len() != cols {
            return Err(Error::DimensionMismatch {
                what: "design matrix labels".into(),
                expected: cols,
                found: col_labels.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::DomainError {
                context: format!("design matrix row {} column {}", pos / cols, pos % cols),
                reason: "entry is not finite".into(),
            });
        }
        Ok(Self {
            rows,
            cols,
            values,
            col_labels,
        })
    }

    /// Builds a matrix from labelled columns of equal length.
    pub fn from_columns(columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.1.len());
        if let Some((label, c)) = columns.iter().find(|c| c.1.len() != rows) {
            return Err(Error::DimensionMismatch {
                what: format!("column `{label}`"),
                expected: rows,
                found: c.len(),
            });
        }
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            values.extend(columns.iter().map(|c| c.1[r]));
        }
        let labels = columns.into_iter().map(|c| c.0).collect();
        Self::new(rows, cols, values, labels)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// Residual degrees of freedom, `T - k`.
    pub dof: usize,
    pub stderr: Vec<f64>,
    /// `coefficient / stderr`; NaN where the standard error is zero.
    pub tstats: Vec<f64>,
}

impl OlsFit {
    pub fn nobs(&self) -> usize {
        self.residuals.len()
    }

    /// Gaussian AIC up to a constant: `T ln(rss / T) + 2k`.
    pub fn aic(&self) -> f64 {
        let n = self.nobs() as f64;
        let k = self.coefficients.len() as f64;
        n * (self.rss / n).ln() + 2.0 * k
    }
}

/// Least-squares fit of `y` on the columns of `x`.
pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<OlsFit> {
    let (t, k) = (x.rows(), x.cols());
    if y.len() != t {
        return Err(Error::DimensionMismatch {
            what: "response vector".into(),
            expected: t,
            found: y.len(),
        });
    }
    if t <= k {
        return Err(Error::InsufficientData {
            what: "OLS fit (need more rows than regressors)".into(),
            needed: k + 1,
            available: t,
        });
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::DomainError {
            context: format!("response row {i}"),
            reason: "value is not finite".into(),
        });
    }

    let qr = PivotedQr::factor(x)?;
    let qty = qr.apply_qt(y);
    let beta_perm = qr.solve_upper(&qty[..k]);
    let mut coefficients = vec![0.0; k];
    for (j, &c) in qr.perm.iter().enumerate() {
        coefficients[c] = beta_perm[j];
    }

    let residuals: Vec<f64> = (0..t)
        .map(|r| {
            let fitted: f64 = x.row(r).iter().zip(&coefficients).map(|(a, b)| a * b).sum();
            y[r] - fitted
        })
        .collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let dof = t - k;
    let s2 = rss / dof as f64;

    let inv_diag = qr.inverse_gram_diagonal();
    let mut stderr = vec![0.0; k];
    for (j, &c) in qr.perm.iter().enumerate() {
        stderr[c] = (s2 * inv_diag[j]).sqrt();
    }
    let tstats = coefficients
        .iter()
        .zip(&stderr)
        .map(|(b, se)| if *se > 0.0 { b / se } else { f64::NAN })
        .collect();

    Ok(OlsFit {
        coefficients,
        residuals,
        rss,
        dof,
        stderr,
        tstats,
    })
}

/// Householder QR with column pivoting, stored column-major.
struct PivotedQr {
    rows: usize,
    cols: usize,
    /// Column-major working copy; upper triangle holds R after factoring.
    a: Vec<f64>,
    /// Householder vectors, one per column, each of length `rows - j`.
    reflectors: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl PivotedQr {
    fn factor(x: &DesignMatrix) -> Result<Self> {
        let (m, n) = (x.rows(), x.cols());
        let mut a = vec![0.0; m * n];
        for c in 0..n {
            for r in 0..m {
                a[c * m + r] = x.get(r, c);
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::with_capacity(n);
        let mut r00 = 0.0_f64;

        for j in 0..n {
            // pivot: largest remaining column norm
            let norm_below = |a: &[f64], c: usize| -> f64 {
                a[c * m + j..(c + 1) * m].iter().map(|v| v * v).sum::<f64>()
            };
            let mut best = j;
            let mut best_norm = norm_below(&a, j);
            for c in j + 1..n {
                let nc = norm_below(&a, c);
                if nc > best_norm {
                    best = c;
                    best_norm = nc;
                }
            }
            if best != j {
                for r in 0..m {
                    a.swap(j * m + r, best * m + r);
                }
                perm.swap(j, best);
            }

            let norm = best_norm.sqrt();
            if j == 0 {
                r00 = norm;
            }
            if norm == 0.0 || norm <= RANK_TOLERANCE * r00 {
                return Err(Error::RankDeficient { rank: j, cols: n });
            }

            let head = a[j * m + j];
            let alpha = if head >= 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = a[j * m + j..(j + 1) * m].to_vec();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|e| e * e).sum();
            if vnorm2 > 0.0 {
                for c in j + 1..n {
                    let col = &mut a[c * m + j..(c + 1) * m];
                    let dot: f64 = v.iter().zip(col.iter()).map(|(p, q)| p * q).sum();
                    let f = 2.0 * dot / vnorm2;
                    for (q, p) in col.iter_mut().zip(&v) {
                        *q -= f * p;
                    }
                }
            }
            a[j * m + j] = alpha;
            for r in j + 1..m {
                a[j * m + r] = 0.0;
            }
            reflectors.push(v);
        }

        Ok(Self {
            rows: m,
            cols: n,
            a,
            reflectors,
            perm,
        })
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        self.a[j * self.rows + i]
    }

    fn apply_qt(&self, y: &[f64]) -> Vec<f64> {
        let mut out = y.to_vec();
        for (j, v) in self.reflectors.iter().enumerate() {
            let vnorm2: f64 = v.iter().map(|e| e * e).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            let seg = &mut out[j..];
            let dot: f64 = v.iter().zip(seg.iter()).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / vnorm2;
            for (q, p) in seg.iter_mut().zip(v) {
                *q -= f * p;
            }
        }
        out
    }

    fn solve_upper(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.cols;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.r(i, j) * x[j]).sum();
            x[i] = (rhs[i] - s) / self.r(i, i);
        }
        x
    }

    /// Diagonal of `(R^T R)^-1`, i.e. row sums of squares of `R^-1`.
    fn inverse_gram_diagonal(&self) -> Vec<f64> {
        let n = self.cols;
        // R^-1 column by column: solve R z = e_c.
        let mut rinv = vec![0.0; n * n];
        for c in 0..n {
            for i in (0..=c).rev() {
                let e = if i == c { 1.0 } else { 0.0 };
                let s: f64 = (i + 1..=c).map(|j| self.r(i, j) * rinv[j * n + c]).sum();
                rinv[i * n + c] = (e - s) / self.r(i, i);
            }
        }
        (0..n)
            .map(|i| rinv[i * n..(i + 1) * n].iter().map(|v| v * v).sum())
            .collect()
    }
}

/// A secondary regressor series with its own lag count.
#[derive(Debug, Clone, Copy)]
pub struct ExtraLags<'a> {
    pub values: &'a [f64],
    pub lags: usize,
}

/// Stacks autoregressive regressors for `values`.
///
/// Rows run over `t = m..T-1` with `m = max(lags, extra.lags)`; columns are
/// `[1, y(t-1)..y(t-lags), x(t-1)..x(t-q)]` and the target is `y(t)`.
pub fn lagged_design(
    values: &[f64],
    lags: usize,
    include_const: bool,
    extra: Option<ExtraLags<'_>>,
) -> Result<(DesignMatrix, Vec<f64>)> {
    if lags == 0 {
        return Err(Error::InvalidArgument("lag count must be at least 1".into()));
    }
    let n = values.len();
    let mut max_lag = lags;
    if let Some(ex) = extra {
        if ex.values.len() != n {
            return Err(Error::DimensionMismatch {
                what: "lagged regressor series".into(),
                expected: n,
                found: ex.values.len(),
            });
        }
        if ex.lags == 0 {
            return Err(Error::InvalidArgument(
                "extra lag count must be at least 1".into(),
            ));
        }
        max_lag = max_lag.max(ex.lags);
    }
    if n <= max_lag {
        return Err(Error::InsufficientData {
            what: format!("lagged design with {max_lag} lags"),
            needed: max_lag + 1,
            available: n,
        });
    }

    let mut columns = Vec::new();
    let rows = n - max_lag;
    if include_const {
        columns.push(("const".to_string(), vec![1.0; rows]));
    }
    for l in 1..=lags {
        columns.push((format!("y_lag{l}"), (max_lag..n).map(|t| values[t - l]).collect()));
    }
    if let Some(ex) = extra {
        for l in 1..=ex.lags {
            columns.push((
                format!("x_lag{l}"),
                (max_lag..n).map(|t| ex.values[t - l]).collect(),
            ));
        }
    }
    let target = values[max_lag..].to_vec();
    Ok((DesignMatrix::from_columns(columns)?, target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::SplitMix64;

    #[test]
    fn intercept_only_is_mean() {
        let x = DesignMatrix::from_columns(vec![("c".into(), vec![1.0; 3])]).unwrap();
        let fit = ols_fit(&x, &[2.0, 4.0, 6.0]).unwrap();
        assert!((fit.coefficients[0] - 4.0).abs() < 1e-12);
        assert!((fit.rss - 8.0).abs() < 1e-12);
        assert_eq!(fit.dof, 2);
        // s^2 = 4, (X'X)^-1 = 1/3
        assert!((fit.stderr[0] - (4.0_f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn perfect_fit() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = xs.iter().map(|v| 1.5 - 2.0 * v).collect();
        let x = DesignMatrix::from_columns(vec![("c".into(), vec![1.0; 10]), ("x".into(), xs)])
            .unwrap();
        let fit = ols_fit(&x, &y).unwrap();
        assert!(fit.rss < 1e-18);
        assert!((fit.coefficients[0] - 1.5).abs() < 1e-9);
        assert!((fit.coefficients[1] + 2.0).abs() < 1e-9);
    }

    #[test]
    fn rank_deficiency_detected() {
        let a: Vec<f64> = (0..8).map(|i| f64::from(i) * 0.3).collect();
        let b: Vec<f64> = a.iter().map(|v| 2.0 * v).collect();
        let x = DesignMatrix::from_columns(vec![
            ("c".into(), vec![1.0; 8]),
            ("a".into(), a),
            ("b".into(), b),
        ])
        .unwrap();
        let err = ols_fit(&x, &[1.0; 8]).unwrap_err();
        assert_eq!(err, Error::RankDeficient { rank: 2, cols: 3 });
    }

    #[test]
    fn dimension_and_size_checks() {
        let x = DesignMatrix::from_columns(vec![("c".into(), vec![1.0; 3])]).unwrap();
        assert!(matches!(
            ols_fit(&x, &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        let square = DesignMatrix::from_columns(vec![
            ("c".into(), vec![1.0, 1.0]),
            ("x".into(), vec![0.0, 1.0]),
        ])
        .unwrap();
        assert!(matches!(
            ols_fit(&square, &[1.0, 2.0]),
            Err(Error::InsufficientData { .. })
        ));
        assert!(DesignMatrix::new(1, 1, vec![f64::INFINITY], vec!["c".into()]).is_err());
    }

    #[test]
    fn lagged_design_hand_case() {
        let (x, y) = lagged_design(&[1.0, 2.0, 3.0, 4.0], 1, true, None).unwrap();
        assert_eq!(x.rows(), 3);
        assert_eq!(x.cols(), 2);
        assert_eq!(x.col_labels(), &["const".to_string(), "y_lag1".to_string()]);
        assert_eq!(x.column(0), vec![1.0; 3]);
        assert_eq!(x.column(1), vec![1.0, 2.0, 3.0]);
        assert_eq!(y, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn lagged_design_boundary_and_extra() {
        let (x, y) = lagged_design(&[1.0, 2.0, 3.0, 4.0], 3, true, None).unwrap();
        assert_eq!(x.rows(), 1);
        assert_eq!(x.row(0), &[1.0, 3.0, 2.0, 1.0]);
        assert_eq!(y, vec![4.0]);
        assert!(matches!(
            lagged_design(&[1.0, 2.0, 3.0, 4.0], 4, true, None),
            Err(Error::InsufficientData { .. })
        ));

        let other = [10.0, 20.0, 30.0, 40.0, 50.0];
        let (x, y) = lagged_design(
            &[1.0, 2.0, 3.0, 4.0, 5.0],
            1,
            false,
            Some(ExtraLags { values: &other, lags: 2 }),
        )
        .unwrap();
        assert_eq!(x.rows(), 3);
        assert_eq!(x.row(0), &[2.0, 20.0, 10.0]);
        assert_eq!(y, vec![3.0, 4.0, 5.0]);
    }

    #[test]
    fn ar1_coefficient_recovered() {
        let mut rng = SplitMix64::new(20080101);
        let mut y = vec![0.0; 500];
        for t in 1..500 {
            y[t] = 0.5 * y[t - 1] + rng.next_normal();
        }
        let (x, target) = lagged_design(&y, 1, true, None).unwrap();
        let fit = ols_fit(&x, &target).unwrap();
        assert!((fit.coefficients[1] - 0.5).abs() < 0.1, "{:?}", fit.coefficients);
    }

    #[test]
    fn tstats_are_ratio_of_coef_and_stderr() {
        let mut rng = SplitMix64::new(7);
        let xs: Vec<f64> = (0..30).map(|_| rng.next_normal()).collect();
        let y: Vec<f64> = xs.iter().map(|v| 0.3 + 0.8 * v + 0.5 * rng.next_normal()).collect();
        let x = DesignMatrix::from_columns(vec![("c".into(), vec![1.0; 30]), ("x".into(), xs)])
            .unwrap();
        let fit = ols_fit(&x, &y).unwrap();
        for i in 0..2 {
            assert!((fit.tstats[i] - fit.coefficients[i] / fit.stderr[i]).abs() < 1e-12);
        }
        let rss: f64 = fit.residuals.iter().map(|e| e * e).sum();
        assert!((fit.rss - rss).abs() <= 1e-9 * rss);
    }
}
