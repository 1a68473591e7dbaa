use std::path::PathBuf;

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::harness::config::{steps_to, RunConfig};
use crate::harness::energy_log::EnergyCsv;
use crate::harness::snapshot::write_snapshot;
use crate::schemes::{EnergyRecord, InitPolicy, SchemeState, StepDiagnostics};

pub const ENERGY_FILE: &str = "energy.csv";

#[derive(Debug)]
pub struct RunOutcome {
    pub state: SchemeState,
    /// One record per time level, `n = 0..=N`.
    pub log: Vec<EnergyRecord>,
    pub snapshots: Vec<PathBuf>,
    pub clamp_count: usize,
    pub min_e1: f64,
    /// Smallest scalar-elimination denominator seen.
    pub min_denominator: f64,
}

pub fn snapshot_name(n: usize) -> String {
    format!("phi_{n:08}.bin")
}

fn merge(state: &SchemeState, diag: &StepDiagnostics) -> EnergyRecord {
    EnergyRecord {
        radicand: diag.radicand,
        dissipation: diag.dissipation,
        clamped: diag.radicand_clamped,
        ..state.energy_report()
    }
}

/// Runs `config` to `t_final`, calling `observe` after every time level.
///
/// With an output directory the energy log is written to `energy.csv` and
/// snapshots to `phi_<n>.bin`. A clamp under `abort_on_clamp` flushes the
/// log and returns [`Error::ClampAbort`].
pub fn run_simulation_with(
    config: &RunConfig,
    mut observe: impl FnMut(&SchemeState, &EnergyRecord),
) -> Result<RunOutcome> {
    let (model, phi0) = config.build()?;
    let kind = config.scheme_kind()?;
    let steps = config.step_count()?;
    let mut snap_steps = config
        .snapshot_times
        .iter()
        .map(|&t| steps_to(t, config.dt))
        .collect::<Result<Vec<_>>>()?;
    snap_steps.sort_unstable();
    snap_steps.dedup();

    let mut csv = match &config.output_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Some(EnergyCsv::create(&dir.join(ENERGY_FILE))?)
        }
        None => None,
    };

    let mut state = SchemeState::with_policy(model, phi0, config.dt, kind, InitPolicy::Clamp)?;
    let mut outcome_log = Vec::with_capacity(steps + 1);
    let mut snapshots = Vec::new();
    let mut clamp_count = 0;
    let mut min_denominator = f64::INFINITY;

    let mut record = state.energy_report();
    let mut raw_radicand = state.radicand_at(state.phi()).raw;
    let mut min_e1 = record.e1;
    loop {
        if let Some(csv) = csv.as_mut() {
            csv.write(&record)?;
        }
        if let (Some(dir), Ok(_)) = (&config.output_dir, snap_steps.binary_search(&state.n())) {
            let path = dir.join(snapshot_name(state.n()));
            write_snapshot(state.phi(), &path, state.time())?;
            snapshots.push(path);
        }
        observe(&state, &record);
        outcome_log.push(record);

        if record.clamped {
            clamp_count += 1;
            if config.abort_on_clamp {
                if let Some(csv) = csv.take() {
                    csv.finish()?;
                }
                warn!("radicand clamped at step {}, aborting", state.n());
                return Err(Error::ClampAbort {
                    step: state.n(),
                    radicand: raw_radicand,
                });
            }
        }
        if state.n() == steps {
            break;
        }
        let diag = state.step()?;
        min_denominator = min_denominator.min(diag.denominator);
        raw_radicand = diag.radicand_raw;
        record = merge(&state, &diag);
        min_e1 = min_e1.min(record.e1);
        if state.n() % 1000 == 0 {
            debug!(
                "step {} t={:.4} E={:.6e} Emod={:.6e}",
                state.n(),
                record.t,
                record.e_original,
                record.e_modified
            );
        }
    }
    if let Some(csv) = csv {
        csv.finish()?;
    }
    Ok(RunOutcome {
        state,
        log: outcome_log,
        snapshots,
        clamp_count,
        min_e1,
        min_denominator,
    })
}

pub fn run_simulation(config: &RunConfig) -> Result<RunOutcome> {
    run_simulation_with(config, |_, _| {})
}
