//! Series files on disk and the Central Bank of Brazil SGS open-data client.
//!
//! Ingest is the validation boundary: everything it returns satisfies the
//! [`MonthlySeries`](crate::series::MonthlySeries) invariants.

mod bcb;
mod csv;

pub use self::bcb::{
    fetch_bcb_series, parse_sgs_payload, resolve_endpoint, series_url, BcbClient,
    DEFAULT_ENDPOINT, ENDPOINT_ENV,
};
pub use self::csv::{
    read_series, read_series_csv, read_series_path, write_series_csv, write_series_path,
    SeriesFile, SeriesFileHeader, SeriesKind, Unit,
};
