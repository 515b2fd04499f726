//! Reference implementations that share no code with the library.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("representable")
}

fn mean_q(v: &[f64]) -> BigRational {
    let sum = v.iter().fold(BigRational::zero(), |acc, &x| acc + q(x));
    sum / BigRational::from_integer(BigInt::from(v.len()))
}

/// Exact sample variance of `v`, rounded once to f64.
pub fn variance_exact(v: &[f64]) -> f64 {
    let m = mean_q(v);
    let ss = v
        .iter()
        .fold(BigRational::zero(), |acc, &x| {
            let d = q(x) - &m;
            acc + &d * &d
        });
    to_f64(&(ss / BigRational::from_integer(BigInt::from(v.len() - 1))))
}

pub fn mean_exact(v: &[f64]) -> f64 {
    to_f64(&mean_q(v))
}

pub fn weighted_mean_exact(v: &[f64], w: &[f64]) -> f64 {
    let num = v
        .iter()
        .zip(w)
        .fold(BigRational::zero(), |acc, (&x, &wi)| acc + q(x) * q(wi));
    let den = w.iter().fold(BigRational::zero(), |acc, &wi| acc + q(wi));
    to_f64(&(num / den))
}

/// Pearson correlation from its exact square: `r^2 = sxy^2 / (sxx syy)`.
pub fn pearson_exact(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean_q(x), mean_q(y));
    let (mut sxy, mut sxx, mut syy) = (BigRational::zero(), BigRational::zero(), BigRational::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (q(a) - &mx, q(b) - &my);
        sxy += &dx * &dy;
        sxx += &dx * &dx;
        syy += &dy * &dy;
    }
    let r2 = &sxy * &sxy / (sxx * syy);
    let r = to_f64(&r2).sqrt();
    if sxy.is_negative() {
        -r
    } else {
        r
    }
}

/// Solves the normal equations `X'X b = X'y` exactly by Gauss-Jordan
/// elimination over the rationals. `x` is row-major with `k` columns.
/// Returns `(coefficients, rss)`.
pub fn ols_normal_equations(x: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let k = x[0].len();
    let xq: Vec<Vec<BigRational>> = x.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
    let yq: Vec<BigRational> = y.iter().map(|&v| q(v)).collect();
    // augmented [X'X | X'y]
    let mut a = vec![vec![BigRational::zero(); k + 1]; k];
    for (row, target) in xq.iter().zip(&yq) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += &row[i] * &row[j];
            }
            a[i][k] += &row[i] * target;
        }
    }
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !a[r][col].is_zero())
            .expect("design has full column rank");
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for j in col..=k {
            a[col][j] = &a[col][j] / &p;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..=k {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                }
            }
        }
    }
    let beta: Vec<BigRational> = (0..k).map(|i| a[i][k].clone()).collect();
    let mut rss = BigRational::zero();
    for (row, target) in xq.iter().zip(&yq) {
        let fitted = row
            .iter()
            .zip(&beta)
            .fold(BigRational::zero(), |acc, (xi, bi)| acc + xi * bi);
        let e = target - fitted;
        rss += &e * &e;
    }
    (beta.iter().map(to_f64).collect(), to_f64(&rss))
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

fn ln_beta(a: f64, b: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Student-t CDF by integrating the density from 0 to `x`.
pub fn t_cdf_quadrature(x: f64, nu: f64) -> f64 {
    let log_norm = -0.5 * nu.ln() - ln_beta(0.5, 0.5 * nu);
    let density = move |t: f64| (log_norm - 0.5 * (nu + 1.0) * (1.0 + t * t / nu).ln()).exp();
    let half = integrate(&density, 0.0, x.abs(), 1e-14);
    if x >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// F CDF by integrating the density in `u = s^2`, which removes the
/// singularity at 0 for `d1 = 1`.
pub fn f_cdf_quadrature(x: f64, d1: f64, d2: f64) -> f64 {
    let log_norm = 0.5 * d1 * (d1 / d2).ln() - ln_beta(0.5 * d1, 0.5 * d2);
    let integrand = move |s: f64| {
        if s == 0.0 {
            return if d1 == 1.0 { 2.0 * log_norm.exp() } else { 0.0 };
        }
        let u = s * s;
        2.0 * (log_norm + (d1 - 1.0) * s.ln() - 0.5 * (d1 + d2) * (1.0 + d1 * u / d2).ln()).exp()
    };
    integrate(&integrand, 0.0, x.sqrt(), 1e-14)
}

/// All maximal runs `(start, end_inclusive)` of strict exceedance of
/// `threshold` with length at least `min_window`, by enumerating every
/// subinterval.
pub fn brute_force_runs(values: &[f64], threshold: f64, min_window: usize) -> Vec<(usize, usize)> {
    let n = values.len();
    let above = |i: usize| values[i] > threshold;
    let mut runs = Vec::new();
    for i in 0..n {
        for j in i..n {
            let all = (i..=j).all(above);
            let left_closed = i == 0 || !above(i - 1);
            let right_closed = j == n - 1 || !above(j + 1);
            if all && left_closed && right_closed && j - i + 1 >= min_window {
                runs.push((i, j));
            }
        }
    }
    runs
}

/// Plain two-pass mean plus sample standard deviation.
pub fn threshold_two_pass(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    m + (ss / (n - 1.0)).sqrt()
}
