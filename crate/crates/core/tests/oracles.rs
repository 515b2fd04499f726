mod common;

use dlgd::dist::{f_cdf, t_cdf};
use dlgd::downturn::{detect_downturns, period_lgd_stats, PeriodTag};
use dlgd::regression::{ols_fit, DesignMatrix};
use dlgd::series::{correlation, summary, AlignedPair, MonthIndex, MonthlySeries};
use dlgd::synth::SplitMix64;

use common::oracles::*;
use common::crisis_fixture;

fn start() -> MonthIndex {
    MonthIndex::new(2008, 1).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn summary_and_pearson_match_exact_rationals() {
    let mut rng = SplitMix64::new(11);
    for _ in 0..100 {
        let n = 3 + (rng.next_u64() % 60) as usize;
        let x: Vec<f64> = (0..n).map(|_| rng.next_uniform()).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.3 * v + 0.2 * rng.next_uniform()).collect();
        let w: Vec<f64> = (0..n).map(|_| 1.0 + 1e6 * rng.next_uniform()).collect();
        let sx = MonthlySeries::new("x", start(), x.clone(), Some(w.clone()), true).unwrap();
        let sy = MonthlySeries::rate("y", start(), y.clone()).unwrap();

        let s = summary(&sx).unwrap();
        assert!(close(s.mean, mean_exact(&x), 1e-12));
        assert!(close(s.std, variance_exact(&x).sqrt(), 1e-12));
        assert!(close(s.weighted_mean, weighted_mean_exact(&x, &w), 1e-12));
        assert!(close(correlation(&sx, &sy).unwrap(), pearson_exact(&x, &y), 1e-12));
    }
}

#[test]
fn ols_matches_exact_normal_equations() {
    let mut rng = SplitMix64::new(12);
    for _ in 0..100 {
        let k = 1 + (rng.next_u64() % 4) as usize;
        let t = k + 2 + (rng.next_u64() % 40) as usize;
        let rows: Vec<Vec<f64>> = (0..t)
            .map(|_| {
                let mut r = vec![1.0];
                r.extend((1..k).map(|_| rng.next_normal()));
                r
            })
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().sum::<f64>() + rng.next_normal())
            .collect();
        let cols = (0..k)
            .map(|j| (format!("c{j}"), rows.iter().map(|r| r[j]).collect()))
            .collect();
        let fit = ols_fit(&DesignMatrix::from_columns(cols).unwrap(), &y).unwrap();
        let (beta, rss) = ols_normal_equations(&rows, &y);
        for (a, b) in fit.coefficients.iter().zip(&beta) {
            assert!(close(*a, *b, 1e-9), "{a} vs {b}");
        }
        assert!(close(fit.rss, rss, 1e-9));
    }
}

#[test]
fn t_and_f_cdfs_match_quadrature() {
    for &nu in &[1.0, 2.0, 3.5, 10.0, 47.0] {
        for &x in &[-6.0, -2.0, -0.7, 0.0, 0.4, 1.96, 5.0] {
            let q = t_cdf_quadrature(x, nu);
            assert!((t_cdf(x, nu).unwrap() - q).abs() < 1e-9, "t({x}, {nu})");
        }
    }
    for &(d1, d2) in &[(1.0, 1.0), (1.0, 30.0), (3.0, 7.0), (5.0, 36.0), (12.0, 100.0)] {
        for &x in &[0.05, 0.5, 1.0, 2.5, 8.0] {
            let q = f_cdf_quadrature(x, d1, d2);
            assert!((f_cdf(x, d1, d2).unwrap() - q).abs() < 1e-9, "F({x}; {d1}, {d2})");
        }
    }
}

#[test]
fn detection_matches_brute_force() {
    let mut rng = SplitMix64::new(13);
    for _ in 0..200 {
        let n = 10 + (rng.next_u64() % 50) as usize;
        let mut v: Vec<f64> = (0..n).map(|_| 0.01 + 0.01 * rng.next_uniform()).collect();
        let mut i = 0;
        while i < n {
            if rng.next_uniform() < 0.15 {
                let len = 1 + (rng.next_u64() % 10) as usize;
                for x in v.iter_mut().skip(i).take(len) {
                    *x = 0.05 + 0.02 * rng.next_uniform();
                }
                i += len;
            }
            i += 1;
        }
        let min_window = 1 + (rng.next_u64() % 8) as usize;
        let s = MonthlySeries::rate("rd", start(), v.clone()).unwrap();
        let got: Vec<(usize, usize)> = match detect_downturns(&s, min_window.min(n)) {
            Ok(w) => w
                .iter()
                .map(|w| {
                    let a = start().months_until(w.start) as usize;
                    (a, a + w.length - 1)
                })
                .collect(),
            Err(_) => continue,
        };
        assert_eq!(got, brute_force_runs(&v, threshold_two_pass(&v), min_window.min(n)));
    }
}

#[test]
fn whole_grid_stats_equal_summary() {
    let pair: AlignedPair = crisis_fixture();
    let months: Vec<_> = pair.months().collect();
    let stats = period_lgd_stats(&pair, &months, PeriodTag::Whole).unwrap();
    let s = summary(pair.lgd()).unwrap();
    assert!((stats.weighted_mean_lgd - s.weighted_mean).abs() < 1e-15);
    assert!((stats.std_lgd - s.std).abs() < 1e-15);
}
