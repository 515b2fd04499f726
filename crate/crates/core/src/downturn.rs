//! Downturn windows from the default-rate series and the downturn-LGD add-on.
//!
//! A downturn window is a maximal run of at least `min_window` months whose
//! default rate is strictly above the long-run mean plus one sample standard
//! deviation, both taken over the whole series.
//!
//! The add-on compares the downturn LGD (weighted mean plus one standard
//! deviation) with a reference LGD (mean minus one standard deviation):
//!
//! * strict: reference = months with default rate below its long-run mean;
//! * lenient: reference = the whole period.
//!
//! `ratio = numerator / denominator`, and the absolute add-on is
//! `(ratio - 1) * base_elgd`, where `base_elgd` is the reference mean before
//! the standard-deviation adjustment.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{mean, sample_std, weighted_mean, AlignedPair, MonthIndex, MonthlySeries};

pub const DEFAULT_MIN_WINDOW: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DownturnWindow {
    pub start: MonthIndex,
    /// Inclusive.
    pub end: MonthIndex,
    pub length: usize,
    pub threshold: f64,
    pub long_run_mean: f64,
    pub long_run_std: f64,
}

impl DownturnWindow {
    pub fn months(&self) -> impl Iterator<Item = MonthIndex> {
        let start = self.start;
        (0..self.length).map(move |i| start.offset(i as i64))
    }

    pub fn contains(&self, month: MonthIndex) -> bool {
        self.start <= month && month <= self.end
    }
}

/// Long-run mean and sample standard deviation of the default-rate series.
pub fn long_run_threshold(rd: &MonthlySeries) -> Result<(f64, f64)> {
    if rd.len() < 2 {
        return Err(Error::DegenerateSeries {
            series: rd.name().to_string(),
            reason: "threshold needs at least 2 observations".into(),
        });
    }
    let m = mean(rd.values());
    let s = sample_std(rd.values());
    if s == 0.0 {
        return Err(Error::DegenerateSeries {
            series: rd.name().to_string(),
            reason: "constant default rate, no month can exceed mean + std".into(),
        });
    }
    Ok((m, s))
}

pub fn detect_downturns(rd: &MonthlySeries, min_window: usize) -> Result<Vec<DownturnWindow>> {
    if min_window == 0 {
        return Err(Error::InvalidArgument("minimum window must be at least 1 month".into()));
    }
    if !rd.is_rate() {
        return Err(Error::InvalidArgument(format!(
            "series `{}` must be declared as a rate",
            rd.name()
        )));
    }
    if rd.len() < min_window {
        return Err(Error::InsufficientData {
            what: format!("downturn detection on `{}`", rd.name()),
            needed: min_window,
            available: rd.len(),
        });
    }
    let (long_run_mean, long_run_std) = long_run_threshold(rd)?;
    let threshold = long_run_mean + long_run_std;

    let mut windows = Vec::new();
    let mut run_start: Option<usize> = None;
    let values = rd.values();
    for i in 0..=values.len() {
        let above = i < values.len() && values[i] > threshold;
        match (above, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                let length = i - s;
                if length >= min_window {
                    windows.push(DownturnWindow {
                        start: rd.month_at(s),
                        end: rd.month_at(i - 1),
                        length,
                        threshold,
                        long_run_mean,
                        long_run_std,
                    });
                }
                run_start = None;
            }
            _ => {}
        }
    }
    Ok(windows)
}

/// Months whose default rate is strictly below the long-run mean.
pub fn low_default_months(rd: &MonthlySeries) -> Result<Vec<MonthIndex>> {
    if rd.len() < 2 {
        return Err(Error::DegenerateSeries {
            series: rd.name().to_string(),
            reason: "long-run mean needs at least 2 observations".into(),
        });
    }
    let m = mean(rd.values());
    let months: Vec<MonthIndex> = rd
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < m)
        .map(|(i, _)| rd.month_at(i))
        .collect();
    if months.is_empty() {
        return Err(Error::DegenerateSeries {
            series: rd.name().to_string(),
            reason: "no month is below the long-run mean".into(),
        });
    }
    Ok(months)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeriodTag {
    Downturn,
    LowDefault,
    Whole,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodLgdStats {
    pub period_tag: PeriodTag,
    pub months: Vec<MonthIndex>,
    /// Exposure-weighted when the LGD series carries weights.
    pub weighted_mean_lgd: f64,
    /// Unweighted sample standard deviation.
    pub std_lgd: f64,
}

/// LGD statistics over a set of months of the pair's grid. Months are
/// taken as a set: order and repeats do not matter.
pub fn period_lgd_stats(
    pair: &AlignedPair,
    months: &[MonthIndex],
    tag: PeriodTag,
) -> Result<PeriodLgdStats> {
    let lgd = pair.lgd();
    let set: BTreeSet<MonthIndex> = months.iter().copied().collect();
    let mut idx = Vec::with_capacity(set.len());
    for &m in &set {
        idx.push(lgd.index_of(m).ok_or(Error::MonthNotInGrid { month: m })?);
    }
    if idx.len() < 2 {
        return Err(Error::DegenerateSeries {
            series: lgd.name().to_string(),
            reason: format!(
                "{} period has {} month(s), standard deviation needs 2",
                tag_label(tag),
                idx.len()
            ),
        });
    }
    let values: Vec<f64> = idx.iter().map(|&i| lgd.values()[i]).collect();
    let weighted_mean_lgd = match lgd.weights() {
        Some(w) => {
            let ws: Vec<f64> = idx.iter().map(|&i| w[i]).collect();
            weighted_mean(&values, &ws).ok_or_else(|| Error::ZeroWeightSum {
                series: lgd.name().to_string(),
            })?
        }
        None => mean(&values),
    };
    Ok(PeriodLgdStats {
        period_tag: tag,
        months: set.into_iter().collect(),
        weighted_mean_lgd,
        std_lgd: sample_std(&values),
    })
}

fn tag_label(tag: PeriodTag) -> &'static str {
    match tag {
        PeriodTag::Downturn => "downturn",
        PeriodTag::LowDefault => "low-default",
        PeriodTag::Whole => "whole",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Reference period: months of below-average default (dLGD1).
    Strict,
    /// Reference period: the whole sample (dLGD2).
    Lenient,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::Strict => "dLGD1",
            Variant::Lenient => "dLGD2",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Strict => "strict",
            Variant::Lenient => "lenient",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DownturnAssessment {
    pub variant: Variant,
    /// Downturn weighted mean LGD plus its standard deviation.
    pub numerator: f64,
    /// Reference mean LGD minus its standard deviation.
    pub denominator: f64,
    pub ratio: f64,
    pub relative_uplift: f64,
    /// Reference mean LGD before the standard-deviation adjustment.
    pub base_elgd: f64,
    /// `relative_uplift * base_elgd`, unrounded.
    pub addon_absolute: f64,
    pub formula: String,
}

impl DownturnAssessment {
    /// Assembles an assessment from its three inputs.
    pub fn from_components(
        variant: Variant,
        numerator: f64,
        denominator: f64,
        base_elgd: f64,
    ) -> Result<Self> {
        if !(denominator > 0.0) {
            return Err(Error::NonPositiveDenominator {
                variant: variant.to_string(),
                mean: base_elgd,
                std: base_elgd - denominator,
                denominator,
            });
        }
        let ratio = numerator / denominator;
        let relative_uplift = ratio - 1.0;
        let addon_absolute = relative_uplift * base_elgd;
        Ok(Self {
            variant,
            numerator,
            denominator,
            ratio,
            relative_uplift,
            base_elgd,
            addon_absolute,
            formula: render_formula("dLGD", addon_absolute),
        })
    }
}

/// `"<label> = 0.0200 + ELGD"`; a negative add-on renders as `- 0.0100`.
pub fn render_formula(label: &str, addon: f64) -> String {
    let rounded = (addon * 1e4).round() / 1e4;
    if rounded < 0.0 {
        format!("{label} = ELGD - {:.4}", -rounded)
    } else {
        format!("{label} = {:.4} + ELGD", rounded.abs())
    }
}

/// Months of the reference period for `variant`.
pub fn reference_months(pair: &AlignedPair, variant: Variant) -> Result<Vec<MonthIndex>> {
    match variant {
        Variant::Strict => low_default_months(pair.rd()),
        Variant::Lenient => Ok(pair.months().collect()),
    }
}

pub fn assess(
    pair: &AlignedPair,
    window_months: &[MonthIndex],
    variant: Variant,
) -> Result<DownturnAssessment> {
    let reference = reference_months(pair, variant)?;
    let tag = match variant {
        Variant::Strict => PeriodTag::LowDefault,
        Variant::Lenient => PeriodTag::Whole,
    };
    assess_against(pair, window_months, &reference, tag, variant)
}

/// [`assess`] with an explicit reference period.
pub fn assess_against(
    pair: &AlignedPair,
    window_months: &[MonthIndex],
    reference_months: &[MonthIndex],
    reference_tag: PeriodTag,
    variant: Variant,
) -> Result<DownturnAssessment> {
    if window_months.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let downturn = period_lgd_stats(pair, window_months, PeriodTag::Downturn)?;
    let reference = period_lgd_stats(pair, reference_months, reference_tag)?;
    let numerator = downturn.weighted_mean_lgd + downturn.std_lgd;
    let base = reference.weighted_mean_lgd;
    let denominator = base - reference.std_lgd;
    if !(denominator > 0.0) {
        return Err(Error::NonPositiveDenominator {
            variant: variant.to_string(),
            mean: base,
            std: reference.std_lgd,
            denominator,
        });
    }
    DownturnAssessment::from_components(variant, numerator, denominator, base)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DownturnLgd {
    pub value: f64,
    /// Set when `elgd + addon` exceeded 1 and was capped.
    pub capped: bool,
}

/// `min(elgd + addon, 1)`.
pub fn downturn_lgd(assessment: &DownturnAssessment, elgd: f64) -> Result<DownturnLgd> {
    if !(0.0..=1.0).contains(&elgd) {
        return Err(Error::InvalidElgd(elgd));
    }
    let raw = elgd + assessment.addon_absolute;
    Ok(if raw > 1.0 {
        DownturnLgd {
            value: 1.0,
            capped: true,
        }
    } else {
        DownturnLgd {
            value: raw,
            capped: false,
        }
    })
}

/// Union of window months in chronological order.
pub fn window_union(windows: &[DownturnWindow]) -> Vec<MonthIndex> {
    let set: BTreeSet<MonthIndex> = windows.iter().flat_map(|w| w.months()).collect();
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(y: i32, mo: u32) -> MonthIndex {
        MonthIndex::new(y, mo).unwrap()
    }

    fn rd(values: &[f64]) -> MonthlySeries {
        MonthlySeries::rate("rd", m(2008, 1), values.to_vec()).unwrap()
    }

    fn pair(rd_v: &[f64], lgd_v: &[f64], w: Option<Vec<f64>>) -> AlignedPair {
        AlignedPair::new(
            rd(rd_v),
            MonthlySeries::new("lgd", m(2008, 1), lgd_v.to_vec(), w, true).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn crisis_shaped_prefix_window() {
        let mut v = vec![0.04; 8];
        v.extend(std::iter::repeat(0.01).take(39));
        let windows = detect_downturns(&rd(&v), 6).unwrap();
        assert_eq!(windows.len(), 1);
        let w = windows[0];
        assert_eq!((w.start, w.end, w.length), (m(2008, 1), m(2008, 8), 8));
        assert!(w.threshold < 0.04);
        assert!((w.threshold - (w.long_run_mean + w.long_run_std)).abs() < 1e-12);
    }

    #[test]
    fn constant_series_degenerate() {
        assert!(matches!(
            detect_downturns(&rd(&[0.02; 20]), 6),
            Err(Error::DegenerateSeries { .. })
        ));
    }

    #[test]
    fn short_run_ignored() {
        let mut v = vec![0.01; 20];
        for x in &mut v[3..8] {
            *x = 0.05;
        }
        assert!(detect_downturns(&rd(&v), 6).unwrap().is_empty());
        assert_eq!(detect_downturns(&rd(&v), 5).unwrap().len(), 1);
    }

    #[test]
    fn two_separate_runs() {
        let mut v = vec![0.01; 30];
        for x in &mut v[2..8] {
            *x = 0.08;
        }
        for x in &mut v[15..21] {
            *x = 0.09;
        }
        let w = detect_downturns(&rd(&v), 6).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!((w[0].start, w[0].end), (m(2008, 3), m(2008, 8)));
        assert_eq!((w[1].start, w[1].end), (m(2009, 4), m(2009, 9)));
    }

    #[test]
    fn non_rate_rejected() {
        let s = MonthlySeries::new("rd", m(2008, 1), vec![0.1; 10], None, false).unwrap();
        assert!(detect_downturns(&s, 6).is_err());
    }

    #[test]
    fn low_default_hand_case() {
        let months = low_default_months(&rd(&[0.01, 0.01, 0.05, 0.05])).unwrap();
        assert_eq!(months, vec![m(2008, 1), m(2008, 2)]);
        let inc = low_default_months(&rd(&[0.125, 0.25, 0.375, 0.5, 0.625])).unwrap();
        assert_eq!(inc, vec![m(2008, 1), m(2008, 2)]);
        assert!(low_default_months(&rd(&[0.02; 4])).is_err());
    }

    #[test]
    fn period_stats_weighted() {
        let p = pair(&[0.01, 0.02, 0.03], &[0.2, 0.4, 0.3], Some(vec![1.0, 3.0, 5.0]));
        let s = period_lgd_stats(&p, &[m(2008, 1), m(2008, 2)], PeriodTag::Downturn).unwrap();
        assert!((s.weighted_mean_lgd - 0.35).abs() < 1e-15);
        assert!((s.std_lgd - 0.2_f64.hypot(0.0) / 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            period_lgd_stats(&p, &[m(2008, 1)], PeriodTag::Downturn),
            Err(Error::DegenerateSeries { .. })
        ));
        assert!(matches!(
            period_lgd_stats(&p, &[m(2008, 1), m(2009, 1)], PeriodTag::Downturn),
            Err(Error::MonthNotInGrid { .. })
        ));
    }

    #[test]
    fn no_downturn_effect() {
        // identical LGD in both periods; the ratio is 1 only when the
        // within-period deviations vanish, since they enter with opposite signs
        let p = pair(&[0.05, 0.05, 0.01, 0.01], &[0.25; 4], None);
        let a = assess(&p, &[m(2008, 1), m(2008, 2)], Variant::Strict).unwrap();
        assert!((a.ratio - 1.0).abs() < 1e-12);
        assert!(a.relative_uplift.abs() < 1e-12);
        assert!(a.addon_absolute.abs() < 1e-12);
        assert_eq!(a.formula, "dLGD = 0.0000 + ELGD");
    }

    #[test]
    fn engineered_components() {
        let a = DownturnAssessment::from_components(Variant::Strict, 0.28, 0.26, 0.2587).unwrap();
        assert!((a.ratio - 1.076_923_076_923_077).abs() < 1e-12);
        assert!((a.addon_absolute - 0.019_900).abs() < 1e-6);
        assert_eq!(a.formula, "dLGD = 0.0199 + ELGD");
        assert_eq!(a.addon_absolute, a.relative_uplift * a.base_elgd);
    }

    #[test]
    fn non_positive_denominator() {
        // reference LGD so volatile that mean - std < 0
        let p = pair(&[0.05, 0.05, 0.01, 0.01, 0.01], &[0.3, 0.3, 0.0, 0.5, 0.0], None);
        let e = assess(&p, &[m(2008, 1), m(2008, 2)], Variant::Strict).unwrap_err();
        assert!(matches!(e, Error::NonPositiveDenominator { .. }), "{e}");
        assert!(matches!(
            DownturnAssessment::from_components(Variant::Lenient, 0.3, 0.0, 0.1),
            Err(Error::NonPositiveDenominator { .. })
        ));
    }

    #[test]
    fn empty_window() {
        let p = pair(&[0.05, 0.01, 0.01], &[0.3, 0.2, 0.2], None);
        assert_eq!(assess(&p, &[], Variant::Lenient).unwrap_err(), Error::EmptyWindow);
    }

    #[test]
    fn downturn_lgd_application_and_cap() {
        let a = DownturnAssessment::from_components(Variant::Strict, 0.28, 0.26, 0.26).unwrap();
        assert!((a.addon_absolute - 0.02).abs() < 1e-15);
        let d = downturn_lgd(&a, 0.25).unwrap();
        assert!((d.value - 0.27).abs() < 1e-15 && !d.capped);
        let d = downturn_lgd(&a, 0.995).unwrap();
        assert_eq!(d.value, 1.0);
        assert!(d.capped);
        let zero = DownturnAssessment::from_components(Variant::Strict, 0.26, 0.26, 0.26).unwrap();
        assert_eq!(downturn_lgd(&zero, 0.31).unwrap().value, 0.31);
        assert!(matches!(downturn_lgd(&a, 1.2), Err(Error::InvalidElgd(_))));
    }

    #[test]
    fn formula_rendering() {
        assert_eq!(render_formula("dLGD", 0.02), "dLGD = 0.0200 + ELGD");
        assert_eq!(render_formula("dLGD2", 0.0183), "dLGD2 = 0.0183 + ELGD");
        assert_eq!(render_formula("dLGD", -0.01), "dLGD = ELGD - 0.0100");
        assert_eq!(render_formula("dLGD", -0.00001), "dLGD = 0.0000 + ELGD");
    }
}
