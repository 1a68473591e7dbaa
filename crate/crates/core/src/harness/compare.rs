//! Side-by-side SAV and NAEV convergence and energy comparison.

use std::path::PathBuf;

use rayon::prelude::*;

use crate::error::Result;
use crate::harness::config::RunConfig;
use crate::harness::convergence::{convergence_study, ConvergenceTable};
use crate::harness::driver::{run_simulation, ENERGY_FILE};

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeReport {
    /// `naev_cn` or `sav_cn(C=…)`.
    pub label: String,
    pub c: Option<f64>,
    pub table: ConvergenceTable,
    /// Energy log directory of the run at `config.dt`, if written.
    pub energy_csv: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub naev: SchemeReport,
    pub sav: Vec<SchemeReport>,
}

impl ComparisonReport {
    /// Relative error gap `(err_SAV − err_NAEV)/err_NAEV` at the finest `Δt`,
    /// one entry per SAV constant.
    pub fn finest_gaps(&self) -> Vec<(f64, f64)> {
        let naev = self.naev.table.rows.last().map_or(f64::NAN, |r| r.err);
        self.sav
            .iter()
            .map(|s| {
                let sav = s.table.rows.last().map_or(f64::NAN, |r| r.err);
                (s.c.unwrap_or(f64::NAN), (sav - naev) / naev)
            })
            .collect()
    }

    /// Rate table with one `Err`/`Rate` column pair per scheme.
    pub fn to_text(&self) -> String {
        let cols: Vec<&SchemeReport> = std::iter::once(&self.naev).chain(&self.sav).collect();
        let mut s = format!("{:>12}", "dt");
        for c in &cols {
            s.push_str(&format!(" | {:>22}", c.label));
        }
        s.push('\n');
        s.push_str(&format!("{:>12}", ""));
        for _ in &cols {
            s.push_str(&format!(" | {:>12} {:>9}", "err", "rate"));
        }
        s.push('\n');
        for (i, row) in self.naev.table.rows.iter().enumerate() {
            s.push_str(&format!("{:>12.4e}", row.dt));
            for c in &cols {
                let r = &c.table.rows[i];
                let rate = r.rate.map_or("-".into(), |v| format!("{v:.2}"));
                s.push_str(&format!(" | {:>12.4e} {:>9}", r.err, rate));
            }
            s.push('\n');
        }
        s.push('\n');
        for c in &cols {
            s.push_str(&format!(
                "{}: clamp events {}, min E1 {:.6e}\n",
                c.label,
                c.table.total_clamps(),
                c.table.min_e1()
            ));
        }
        s
    }
}

fn subdir(config: &RunConfig, name: &str) -> Option<PathBuf> {
    config.output_dir.as_ref().map(|d| d.join(name))
}

fn scheme_report(base: &RunConfig, c: Option<f64>, dts: &[f64]) -> Result<SchemeReport> {
    let (cfg, label, dir) = match c {
        Some(c) => (
            RunConfig {
                scheme: "sav_cn".into(),
                c,
                ..base.clone()
            },
            format!("sav_cn(C={c})"),
            format!("sav_cn_C{c}"),
        ),
        None => (
            RunConfig {
                scheme: "naev_cn".into(),
                ..base.clone()
            },
            "naev_cn".to_string(),
            "naev_cn".to_string(),
        ),
    };
    let table = convergence_study(&cfg, dts)?;
    let mut energy_csv = None;
    if let Some(dir) = subdir(base, &dir) {
        run_simulation(&RunConfig {
            output_dir: Some(dir.clone()),
            snapshot_times: Vec::new(),
            ..cfg
        })?;
        table.write_csv(&dir.join("rates.csv"))?;
        energy_csv = Some(dir.join(ENERGY_FILE));
    }
    Ok(SchemeReport {
        label,
        c,
        table,
        energy_csv,
    })
}

/// Runs `naev_cn` and `sav_cn` at every `C` in `c_list` over `dts`.
///
/// With an output directory each scheme gets a subdirectory holding the
/// energy log of the run at `config.dt` and its rate table.
pub fn compare_sav_naev(config: &RunConfig, c_list: &[f64], dts: &[f64]) -> Result<ComparisonReport> {
    let mut variants: Vec<Option<f64>> = vec![None];
    variants.extend(c_list.iter().copied().map(Some));
    let mut reports = variants
        .par_iter()
        .map(|&c| scheme_report(config, c, dts))
        .collect::<Result<Vec<_>>>()?;
    let naev = reports.remove(0);
    Ok(ComparisonReport { naev, sav: reports })
}
