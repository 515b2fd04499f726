//! The committed fixture files are generator output; this keeps them honest.
//! Set `DLGD_REGENERATE_FIXTURES=1` to rewrite them.

mod common;

use dlgd::ingest::{write_series_csv, SeriesKind};
use dlgd::synth::{crisis_shaped_pair, FIXTURE_DOWNTURN_MONTHS, FIXTURE_MONTHS};

use common::{crisis_fixture, crisis_fixture_paths, CRISIS_FIXTURE_SEED};

#[test]
fn crisis_fixture_regenerates_byte_identically() {
    let pair = crisis_shaped_pair(CRISIS_FIXTURE_SEED);
    let (rd_path, lgd_path) = crisis_fixture_paths();
    for (series, kind, path) in [
        (pair.rd(), SeriesKind::Rd, &rd_path),
        (pair.lgd(), SeriesKind::Lgd, &lgd_path),
    ] {
        let mut bytes = Vec::new();
        write_series_csv(series, kind, &mut bytes).unwrap();
        if std::env::var_os("DLGD_REGENERATE_FIXTURES").is_some() {
            std::fs::write(path, &bytes).unwrap();
        }
        let committed = std::fs::read(path).unwrap();
        assert!(committed == bytes, "{} differs from generator output", path.display());
    }
}

#[test]
fn crisis_fixture_shape() {
    let pair = crisis_fixture();
    assert_eq!(pair.len(), FIXTURE_MONTHS);
    assert_eq!(pair.start().to_string(), "2008-01");
    assert_eq!(pair.end().to_string(), "2011-11");
    let windows = dlgd::downturn::detect_downturns(pair.rd(), 6).unwrap();
    assert_eq!(windows.len(), 1);
    assert_eq!(windows[0].length, FIXTURE_DOWNTURN_MONTHS);
    assert_eq!(windows[0].start.to_string(), "2008-01");
    assert_eq!(windows[0].end.to_string(), "2008-08");
}
