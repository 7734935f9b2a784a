//! Sweep orchestration behind the `andreev` command line tool.
//!
//! Every driver takes a [`Resolved`] configuration, fans the independent
//! sweep points out over a bounded rayon pool and returns rows sorted by
//! their key, so the emitted CSV does not depend on scheduling.

pub mod compare;
pub mod config;
pub mod gnuplot;
pub mod spectrum;
pub mod table_d;
pub mod widths;

use serde::Serialize;
use std::path::Path;
use thiserror::Error;

use crate::direct::DirectError;
use crate::geometry::GeometryError;
use crate::semiclassical::SpectrumError;
use crate::special::SpecialFunctionError;

pub use compare::{compare_report, CompareReport};
pub use config::{ConfigError, Resolved, RunConfig};
pub use spectrum::{run_hardwall, run_spectrum, SpectrumRow};
pub use table_d::{table_d, TableDRow};
pub use widths::{run_widths, WidthFit, WidthRow, WidthsOutput};

#[derive(Error, Debug)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Direct(#[from] DirectError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Special(#[from] SpecialFunctionError),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl HarnessError {
    pub fn is_validation(&self) -> bool {
        matches!(self, HarnessError::Config(_))
    }
}

pub(crate) fn io_error(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Runs `f` inside a pool of `jobs` threads (0 means rayon's default).
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    Ok(pool.install(f))
}

/// Writes `rows` as CSV. The header is written even when `rows` is empty.
pub fn write_csv<R: Serialize>(path: &Path, header: &[&str], rows: &[R]) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| io_error(path, e))?;
    Ok(())
}

pub(crate) fn cmp_f64(a: f64, b: f64) -> std::cmp::Ordering {
    a.total_cmp(&b)
}
