//! Downturn loss-given-default analysis for monthly LGD and default-rate series.
//!
//! The pipeline: align the two series, measure their correlation, test each
//! for a unit root, run bidirectional Granger tests over a lag grid, detect
//! downturn windows in the default rate, and turn the LGD behaviour inside
//! those windows into an additive downturn-LGD add-on.

pub mod app;
pub mod dist;
pub mod downturn;
pub mod econtests;
pub mod error;
pub mod ingest;
pub mod regression;
pub mod series;
pub mod synth;

pub use error::{Error, Result};

/// Writes `bytes` to a temporary file in the destination directory and
/// renames it over `path`, so readers never observe a partial file.
pub(crate) fn atomic_write(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    use std::io::Write;

    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => std::path::Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir.display(), e))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| Error::io(path.display(), e))?;
    tmp.persist(path)
        .map_err(|e| Error::io(path.display(), e.error))?;
    Ok(())
}
