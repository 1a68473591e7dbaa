//! CSV outputs: per-step energy logs and convergence tables.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::schemes::EnergyRecord;

pub const ENERGY_HEADER: &str = "n,t,E_original,E_modified,r,E1,radicand,dissipation,clamped";
pub const RATE_HEADER: &str = "dt,err,rate";

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn energy_row(rec: &EnergyRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        rec.n,
        fmt_f64(rec.t),
        fmt_f64(rec.e_original),
        fmt_f64(rec.e_modified),
        fmt_f64(rec.r),
        fmt_f64(rec.e1),
        fmt_f64(rec.radicand),
        fmt_f64(rec.dissipation),
        u8::from(rec.clamped)
    )
}

pub struct EnergyCsv {
    out: BufWriter<File>,
}

impl EnergyCsv {
    pub fn create(path: &Path) -> io::Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{ENERGY_HEADER}")?;
        Ok(Self { out })
    }

    pub fn write(&mut self, rec: &EnergyRecord) -> io::Result<()> {
        writeln!(self.out, "{}", energy_row(rec))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

pub fn write_energy_csv(path: &Path, records: &[EnergyRecord]) -> io::Result<()> {
    let mut csv = EnergyCsv::create(path)?;
    for rec in records {
        csv.write(rec)?;
    }
    csv.finish()
}
