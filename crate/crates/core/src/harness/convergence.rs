//! Temporal convergence studies by successive halving.
//!
//! For a halving sequence `Δt₀ > Δt₁ > …` the error of row `k` is
//! `‖Φ^{Δt_k} − Φ^{Δt_k/2}‖` at the final time, and the rate of row `k` is
//! `log₂(err_{k−1} / err_k)`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Field2D;
use crate::harness::config::RunConfig;
use crate::harness::driver::run_simulation;
use crate::harness::energy_log::{fmt_f64, RATE_HEADER};

/// Relative tolerance for "`Δt_{k+1} = Δt_k / 2`".
const HALVING_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateRow {
    pub dt: f64,
    pub err: f64,
    /// `None` in the first row and whenever a ratio is undefined.
    pub rate: Option<f64>,
}

/// Diagnostics of one run inside a study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSummary {
    pub dt: f64,
    pub clamp_count: usize,
    pub min_e1: f64,
    pub min_denominator: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<RateRow>,
    /// One entry per distinct `Δt` run, coarsest first.
    pub runs: Vec<RunSummary>,
}

impl ConvergenceTable {
    pub fn total_clamps(&self) -> usize {
        self.runs.iter().map(|r| r.clamp_count).sum()
    }

    pub fn min_e1(&self) -> f64 {
        self.runs.iter().map(|r| r.min_e1).fold(f64::INFINITY, f64::min)
    }

    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{RATE_HEADER}")?;
        for (i, row) in self.rows.iter().enumerate() {
            let rate = match row.rate {
                Some(r) => fmt_f64(r),
                None if i == 0 => String::new(),
                None => "NA".into(),
            };
            writeln!(out, "{},{},{}", fmt_f64(row.dt), fmt_f64(row.err), rate)?;
        }
        out.flush()
    }

    /// Fixed-width text table.
    pub fn to_text(&self) -> String {
        let mut s = format!("{:>12} {:>12} {:>8}\n", "dt", "err", "rate");
        for row in &self.rows {
            let rate = row.rate.map_or("-".to_string(), |r| format!("{r:.2}"));
            s.push_str(&format!("{:>12.4e} {:>12.4e} {:>8}\n", row.dt, row.err, rate));
        }
        s
    }
}

/// `log₂(prev / err)`, or `None` when either error is zero or not finite.
pub fn rate(prev: f64, err: f64) -> Option<f64> {
    let r = (prev / err).log2();
    (prev > 0.0 && err > 0.0 && r.is_finite()).then_some(r)
}

fn check_halving(dts: &[f64]) -> Result<()> {
    if dts.is_empty() {
        return Err(Error::InvalidConfig("empty time-step list".into()));
    }
    if let Some(&dt) = dts.iter().find(|dt| !(**dt > 0.0 && dt.is_finite())) {
        return Err(Error::InvalidConfig(format!("time step must be positive, got {dt}")));
    }
    for w in dts.windows(2) {
        if (w[1] - 0.5 * w[0]).abs() > HALVING_TOL * w[0] {
            return Err(Error::InvalidConfig(format!(
                "time steps must halve: {} does not follow {}",
                w[1], w[0]
            )));
        }
    }
    Ok(())
}

/// Final field and diagnostics of `config` at step `dt`, without writing files.
pub fn final_state(config: &RunConfig, dt: f64) -> Result<(Field2D, RunSummary)> {
    let cfg = RunConfig {
        dt,
        snapshot_times: Vec::new(),
        output_dir: None,
        ..config.clone()
    };
    let out = run_simulation(&cfg)?;
    let summary = RunSummary {
        dt,
        clamp_count: out.clamp_count,
        min_e1: out.min_e1,
        min_denominator: out.min_denominator,
    };
    Ok((out.state.phi().clone(), summary))
}

/// `‖Φ^{Δt} − Φ^{Δt/2}‖` computed from two fresh runs.
pub fn pair_error(config: &RunConfig, dt: f64) -> Result<f64> {
    let (coarse, _) = final_state(config, dt)?;
    let (fine, _) = final_state(config, 0.5 * dt)?;
    Ok(coarse.sub(&fine).norm_l2())
}

/// Runs every `Δt` in `dts` plus `Δt_last / 2` once, in parallel, and
/// differences neighbouring final fields.
pub fn convergence_study(config: &RunConfig, dts: &[f64]) -> Result<ConvergenceTable> {
    check_halving(dts)?;
    let mut all: Vec<f64> = dts.to_vec();
    all.push(0.5 * dts[dts.len() - 1]);
    for &dt in &all {
        RunConfig { dt, ..config.clone() }.validate()?;
    }
    let results = all
        .par_iter()
        .map(|&dt| final_state(config, dt))
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<RateRow> = Vec::with_capacity(dts.len());
    for (k, &dt) in dts.iter().enumerate() {
        let err = results[k].0.sub(&results[k + 1].0).norm_l2();
        let rate = rows.last().and_then(|prev| rate(prev.err, err));
        rows.push(RateRow { dt, err, rate });
    }
    Ok(ConvergenceTable {
        rows,
        runs: results.into_iter().map(|(_, s)| s).collect(),
    })
}

/// `Δt₀, Δt₀/2, …` with `count` entries.
pub fn halving_sequence(dt0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| dt0 / f64::powi(2.0, k as i32)).collect()
}
