//! CSV result files. Floats are written with 17 significant digits so every
//! file parses back to the exact values that were written.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::oracle::{SignReport, SpectralResult, StoquasticityReport};
use crate::pimc::ObservableRecord;

pub const HEADER: [&str; 18] = [
    "workflow",
    "N",
    "beta",
    "tau",
    "Gamma",
    "gamma",
    "gamma_tilde",
    "m_x",
    "m_x_err",
    "m_z_abs",
    "m_z_abs_err",
    "energy_per_spin",
    "energy_err",
    "acceptance_rate",
    "sweeps_equil",
    "sweeps_meas",
    "seed",
    "converged",
];

pub const SIGN_HEADER: [&str; 11] = [
    "N",
    "Gamma",
    "gamma",
    "stoquastic",
    "max_offdiag",
    "i",
    "j",
    "tau",
    "beta",
    "min_transfer_entry",
    "average_sign",
];

/// One result row. Empty cells are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub workflow: String,
    pub n_spins: usize,
    pub beta: f64,
    pub tau: Option<usize>,
    pub transverse: f64,
    pub xx: f64,
    pub gamma_tilde: Option<f64>,
    pub m_x: f64,
    pub m_x_err: f64,
    pub m_z_abs: f64,
    pub m_z_abs_err: f64,
    pub energy_per_spin: f64,
    pub energy_err: f64,
    pub acceptance_rate: Option<f64>,
    pub sweeps_equil: Option<usize>,
    pub sweeps_meas: Option<usize>,
    pub seed: Option<u64>,
    pub converged: Option<bool>,
}

impl CsvRow {
    pub fn from_record(
        workflow: &str,
        transverse: f64,
        xx: f64,
        gamma_tilde: Option<f64>,
        record: &ObservableRecord,
        converged: Option<bool>,
    ) -> Self {
        CsvRow {
            workflow: workflow.to_string(),
            n_spins: record.n_spins,
            beta: record.beta,
            tau: Some(record.tau),
            transverse,
            xx,
            gamma_tilde,
            m_x: record.m_x.value,
            m_x_err: record.m_x.error,
            m_z_abs: record.m_z_abs.value,
            m_z_abs_err: record.m_z_abs.error,
            energy_per_spin: record.energy_per_spin.value,
            energy_err: record.energy_per_spin.error,
            acceptance_rate: Some(record.acceptance_rate),
            sweeps_equil: Some(record.equilibration_sweeps),
            sweeps_meas: Some(record.measurement_sweeps),
            seed: Some(record.seed),
            converged,
        }
    }

    pub fn from_exact(n_spins: usize, beta: f64, transverse: f64, xx: f64, r: &SpectralResult) -> Self {
        CsvRow {
            workflow: "exact".to_string(),
            n_spins,
            beta,
            tau: None,
            transverse,
            xx,
            gamma_tilde: None,
            m_x: r.m_x,
            m_x_err: 0.0,
            m_z_abs: r.m_z_abs,
            m_z_abs_err: 0.0,
            energy_per_spin: r.energy_per_spin,
            energy_err: 0.0,
            acceptance_rate: None,
            sweeps_equil: None,
            sweeps_meas: None,
            seed: None,
            converged: None,
        }
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.workflow.clone(),
            self.n_spins.to_string(),
            float(self.beta),
            opt(self.tau),
            float(self.transverse),
            float(self.xx),
            self.gamma_tilde.map(float).unwrap_or_default(),
            float(self.m_x),
            float(self.m_x_err),
            float(self.m_z_abs),
            float(self.m_z_abs_err),
            float(self.energy_per_spin),
            float(self.energy_err),
            self.acceptance_rate.map(float).unwrap_or_default(),
            opt(self.sweeps_equil),
            opt(self.sweeps_meas),
            opt(self.seed),
            opt(self.converged),
        ]
    }

    fn parse(record: &csv::StringRecord) -> Result<Self> {
        if record.len() != HEADER.len() {
            return Err(Error::Parse(format!("expected {} columns, got {}", HEADER.len(), record.len())));
        }
        let cell = |i: usize| &record[i];
        Ok(CsvRow {
            workflow: cell(0).to_string(),
            n_spins: value(cell(1), HEADER[1])?,
            beta: value(cell(2), HEADER[2])?,
            tau: optional(cell(3), HEADER[3])?,
            transverse: value(cell(4), HEADER[4])?,
            xx: value(cell(5), HEADER[5])?,
            gamma_tilde: optional(cell(6), HEADER[6])?,
            m_x: value(cell(7), HEADER[7])?,
            m_x_err: value(cell(8), HEADER[8])?,
            m_z_abs: value(cell(9), HEADER[9])?,
            m_z_abs_err: value(cell(10), HEADER[10])?,
            energy_per_spin: value(cell(11), HEADER[11])?,
            energy_err: value(cell(12), HEADER[12])?,
            acceptance_rate: optional(cell(13), HEADER[13])?,
            sweeps_equil: optional(cell(14), HEADER[14])?,
            sweeps_meas: optional(cell(15), HEADER[15])?,
            seed: optional(cell(16), HEADER[16])?,
            converged: optional(cell(17), HEADER[17])?,
        })
    }
}

/// Stoquasticity and naive-decomposition sign data for one (Γ, γ) point.
#[derive(Debug, Clone, PartialEq)]
pub struct SignRow {
    pub n_spins: usize,
    pub transverse: f64,
    pub xx: f64,
    pub stoquastic: StoquasticityReport,
    pub tau: usize,
    pub beta: f64,
    /// Absent above the transfer-matrix size limit.
    pub sign: Option<SignReport>,
}

impl SignRow {
    fn fields(&self) -> Vec<String> {
        vec![
            self.n_spins.to_string(),
            float(self.transverse),
            float(self.xx),
            self.stoquastic.stoquastic.to_string(),
            float(self.stoquastic.max_offdiagonal),
            self.stoquastic.entry.0.to_string(),
            self.stoquastic.entry.1.to_string(),
            self.tau.to_string(),
            float(self.beta),
            self.sign.as_ref().map(|s| float(s.min_transfer_entry)).unwrap_or_default(),
            self.sign.as_ref().map(|s| float(s.average_sign)).unwrap_or_default(),
        ]
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn value<T: std::str::FromStr>(s: &str, column: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| Error::Parse(format!("column {column}: {s:?}: {e}")))
}

fn optional<T: std::str::FromStr>(s: &str, column: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if s.is_empty() {
        Ok(None)
    } else {
        value(s, column).map(Some)
    }
}

fn render(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_parse = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(header).map_err(to_parse)?;
    for row in rows {
        w.write_record(&row).map_err(to_parse)?;
    }
    w.into_inner().map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_csv_string(rows: &[CsvRow]) -> Result<String> {
    let bytes = render(&HEADER, rows.iter().map(CsvRow::fields))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().ne(HEADER) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    reader
        .records()
        .map(|r| r.map_err(|e| Error::Parse(e.to_string())).and_then(|r| CsvRow::parse(&r)))
        .collect()
}

/// Writes to a temporary file in the target directory, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    write_atomic(path, to_csv_string(rows)?.as_bytes())
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}

pub fn write_sign_csv(path: &Path, rows: &[SignRow]) -> Result<()> {
    write_atomic(path, &render(&SIGN_HEADER, rows.iter().map(SignRow::fields))?)
}
