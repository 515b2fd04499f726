//! Tab-separated plot data. Each file starts with a `#` line documenting its
//! columns, then a header row, then one row per month of the pair.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::downturn::{long_run_threshold, Variant};
use crate::error::{Error, Result};
use crate::series::AlignedPair;

use super::AnalysisReport;

pub const PLOT_FILES: [&str; 3] = ["series.tsv", "downturn.tsv", "dlgd.tsv"];

/// Writes `series.tsv`, `downturn.tsv` and `dlgd.tsv` into `dir` (created if
/// missing) and returns their paths.
///
/// `dlgd.tsv` carries `NA` in the column of a variant the report did not
/// compute.
pub fn emit_plot_data(report: &AnalysisReport, pair: &AlignedPair, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display(), e))?;
    let rd = pair.rd().values();
    let lgd = pair.lgd().values();

    let mut series = String::from(
        "# month: YYYY-MM; rd: default rate (fraction); lgd: loss given default (fraction)\n\
         month\trd\tlgd\n",
    );
    for (i, month) in pair.months().enumerate() {
        let _ = writeln!(series, "{month}\t{}\t{}", rd[i], lgd[i]);
    }

    let (mean, std) = long_run_threshold(pair.rd())?;
    let threshold = mean + std;
    let mut downturn = String::from(
        "# month: YYYY-MM; rd: default rate; threshold: long-run mean plus one sample standard deviation; \
         in_window: month lies in a detected downturn window\n\
         month\trd\tthreshold\tin_window\n",
    );
    for (i, month) in pair.months().enumerate() {
        let in_window = report.downturns.iter().any(|w| w.contains(month));
        let _ = writeln!(downturn, "{month}\t{}\t{threshold}\t{in_window}", rd[i]);
    }

    let column = |variant: Variant| {
        report
            .applied
            .iter()
            .find(|a| a.variant == variant)
            .map_or_else(|| "NA".to_string(), |a| a.dlgd.value.to_string())
    };
    let (dlgd1, dlgd2) = (column(Variant::Strict), column(Variant::Lenient));
    let elgd = report.summary.lgd.weighted_mean;
    let mut dlgd = String::from(
        "# month: YYYY-MM; lgd: observed loss given default; elgd: whole-period weighted mean LGD; \
         dlgd1: elgd plus the strict add-on; dlgd2: elgd plus the lenient add-on; both capped at 1, NA when not computed\n\
         month\tlgd\telgd\tdlgd1\tdlgd2\n",
    );
    for (i, month) in pair.months().enumerate() {
        let _ = writeln!(dlgd, "{month}\t{}\t{elgd}\t{dlgd1}\t{dlgd2}", lgd[i]);
    }

    let mut written = Vec::with_capacity(PLOT_FILES.len());
    for (name, body) in PLOT_FILES.iter().zip([series, downturn, dlgd]) {
        let path = dir.join(name);
        crate::atomic_write(&path, body.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
