use std::fs;
use std::path::Path;

use serde::Serialize;

use super::config::RunConfig;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Real number as emitted in CSV files: 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// A CSV table with a fixed header.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// One numeric assertion: `value <= tolerance` passes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Assertion {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    pub fn holds(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            value: if pass { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub version: String,
    pub wall_time_s: f64,
    /// Typed rows, mirroring the CSV table.
    pub results: serde_json::Value,
    pub assertions: Vec<Assertion>,
    /// Points that could not be computed, with the reason.
    pub failures: Vec<String>,
    #[serde(skip)]
    pub table: Table,
}

impl RunRecord {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_ASSERTION
        }
    }

    /// Write `<command>.csv` and `<command>.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let name = self.config.command.name();
        fs::write(dir.join(format!("{name}.csv")), self.table.to_csv()?)?;
        fs::write(dir.join(format!("{name}.json")), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// Exit code for an error raised before or during a run.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_)
        | Error::MatrixMarket(_)
        | Error::DimensionMismatch(_)
        | Error::InvalidParameter(_)
        | Error::InvalidKappa
        | Error::Overcritical { .. }
        | Error::RegimeViolation { .. }
        | Error::NotPositiveDefinite(_)
        | Error::DegenerateSplit { .. }
        | Error::AmbiguousSplit { .. }
        | Error::IndexOutOfRange { .. }
        | Error::DimensionLimit { .. } => EXIT_INPUT,
        _ => EXIT_ASSERTION,
    }
}

pub fn version() -> String {
    format!("gapminimax-{}", env!("CARGO_PKG_VERSION"))
}
