use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field2D, Grid2D};
use crate::harness::initial::InitialCondition;
use crate::models::{ModelKind, ModelParams, ModelSpec};
use crate::schemes::SchemeKind;

/// Everything needed to reproduce one simulation.
///
/// Field names double as keys of the TOML config file and as CLI flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelKind,
    pub epsilon: f64,
    pub g: f64,
    /// One of `sav_cn`, `naev_1st`, `naev_cn`, `naev_cn_imag`.
    pub scheme: String,
    /// SAV radicand shift.
    pub c: f64,
    pub kappa: f64,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub dt: f64,
    pub t_final: f64,
    /// One of `cospi2`, `two_bubble`, `sinpi64`, `rand_pfc`, `sh_smooth`,
    /// `rand_sh`, `constant`.
    pub ic: String,
    /// Bubble radius for `two_bubble`.
    pub radius: f64,
    /// Interface width for `two_bubble`; defaults to `epsilon`.
    pub width: Option<f64>,
    /// Value for the `constant` initial condition.
    pub ic_value: f64,
    pub seed: u64,
    pub snapshot_times: Vec<f64>,
    pub output_dir: Option<PathBuf>,
    pub abort_on_clamp: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::AllenCahn,
            epsilon: 0.2,
            g: 0.0,
            scheme: "naev_cn".into(),
            c: 0.0,
            kappa: 0.0,
            nx: 100,
            ny: 100,
            lx: 1.0,
            ly: 1.0,
            dt: 4e-4,
            t_final: 8e-3,
            ic: "cospi2".into(),
            radius: 0.19,
            width: None,
            ic_value: 1.0,
            seed: 0,
            snapshot_times: Vec::new(),
            output_dir: None,
            abort_on_clamp: false,
        }
    }
}

/// Names accepted by [`RunConfig::preset`].
pub const PRESETS: [&str; 8] = [
    "example1_ac",
    "example1_ch",
    "example2_ac",
    "example2_ch",
    "example3",
    "example4",
    "example5",
    "example6",
];

impl RunConfig {
    /// Setups of the six reference experiments.
    pub fn preset(name: &str) -> Result<Self> {
        let base = RunConfig::default();
        let cfg = match name {
            "example1_ac" | "example1_ch" => RunConfig {
                model: if name.ends_with("ac") {
                    ModelKind::AllenCahn
                } else {
                    ModelKind::CahnHilliard
                },
                ..base
            },
            "example2_ac" => RunConfig {
                epsilon: 0.01,
                nx: 128,
                ny: 128,
                dt: 0.1,
                t_final: 340.0,
                ic: "two_bubble".into(),
                snapshot_times: vec![0.0, 1.0, 3.0, 14.0, 60.0, 130.0, 240.0, 340.0],
                ..base
            },
            "example2_ch" => RunConfig {
                model: ModelKind::CahnHilliard,
                epsilon: 0.01,
                nx: 128,
                ny: 128,
                // larger steps let the explicit bulk term excite the
                // stiffest modes, which Crank-Nicolson does not damp
                dt: 2e-6,
                t_final: 1.0,
                ic: "two_bubble".into(),
                snapshot_times: vec![0.0, 8e-4, 4e-3, 0.02, 0.16, 0.4, 0.8, 1.0],
                ..base
            },
            "example3" => RunConfig {
                model: ModelKind::Pfc,
                epsilon: 0.25,
                nx: 128,
                ny: 128,
                lx: 128.0,
                ly: 128.0,
                dt: 1.0 / 64.0,
                t_final: 1.0,
                ic: "sinpi64".into(),
                ..base
            },
            "example4" => RunConfig {
                model: ModelKind::Pfc,
                epsilon: 0.025,
                nx: 128,
                ny: 128,
                lx: 100.0,
                ly: 100.0,
                dt: 0.1,
                t_final: 1000.0,
                ic: "rand_pfc".into(),
                snapshot_times: vec![4.0, 15.0, 100.0, 200.0, 400.0, 1000.0],
                ..base
            },
            "example5" => RunConfig {
                model: ModelKind::SwiftHohenbergQc,
                epsilon: 0.25,
                g: 2.0,
                nx: 128,
                ny: 128,
                lx: 128.0,
                ly: 128.0,
                dt: 1.0 / 64.0,
                t_final: 1.0,
                ic: "sh_smooth".into(),
                ..base
            },
            "example6" => RunConfig {
                model: ModelKind::SwiftHohenbergQc,
                epsilon: 0.25,
                g: 2.0,
                nx: 128,
                ny: 128,
                lx: 128.0,
                ly: 128.0,
                dt: 0.05,
                t_final: 120.0,
                ic: "rand_sh".into(),
                snapshot_times: vec![2.0, 10.0, 30.0, 40.0, 60.0, 120.0],
                ..base
            },
            _ => {
                return Err(Error::UnknownName {
                    kind: "preset",
                    name: name.to_string(),
                })
            }
        };
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        Ok(cfg)
    }

    /// Applies the keys present in `text` on top of `self`.
    pub fn with_toml_overrides(&self, text: &str) -> Result<Self> {
        let mut table = toml::Table::try_from(self)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let overrides: toml::Table = text.parse()?;
        table.extend(overrides);
        Ok(table.try_into()?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// The SAV shift for `sav_cn`, `κ` otherwise.
    pub fn scheme_kind(&self) -> Result<SchemeKind> {
        let shift = if self.scheme == "sav_cn" {
            self.c
        } else {
            self.kappa
        };
        SchemeKind::from_tag(&self.scheme, shift)
    }

    pub fn initial_condition(&self) -> Result<InitialCondition> {
        InitialCondition::from_name(
            &self.ic,
            self.radius,
            self.width.unwrap_or(self.epsilon),
            self.ic_value,
            self.seed,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "t_final must be positive, got {}",
                self.t_final
            )));
        }
        if let Some(t) = self
            .snapshot_times
            .iter()
            .find(|&&t| !(0.0..=self.t_final).contains(&t))
        {
            return Err(Error::InvalidConfig(format!(
                "snapshot time {t} outside [0, {}]",
                self.t_final
            )));
        }
        for &t in &self.snapshot_times {
            steps_to(t, self.dt)?;
        }
        self.scheme_kind()?;
        self.initial_condition()?;
        self.step_count()?;
        Ok(())
    }

    /// Number of steps to reach `t_final`; `t_final` must be a multiple of `dt`.
    pub fn step_count(&self) -> Result<usize> {
        steps_to(self.t_final, self.dt)
    }

    pub fn grid(&self) -> Result<Arc<Grid2D>> {
        Grid2D::new(self.nx, self.ny, self.lx, self.ly)
    }

    pub fn model_on(&self, grid: Arc<Grid2D>) -> Result<ModelSpec> {
        ModelSpec::new(
            self.model,
            ModelParams {
                epsilon: self.epsilon,
                g: self.g,
            },
            grid,
        )
    }

    /// Grid, model and initial field.
    pub fn build(&self) -> Result<(Arc<ModelSpec>, Field2D)> {
        self.validate()?;
        let grid = self.grid()?;
        let phi0 = self.initial_condition()?.generate(&grid);
        let model = Arc::new(self.model_on(grid)?);
        Ok((model, phi0))
    }
}

/// `round(t / dt)`, rejecting times that are not a multiple of `dt`.
pub fn steps_to(t: f64, dt: f64) -> Result<usize> {
    let n = (t / dt).round();
    if (n * dt - t).abs() > 1e-9 * t.abs().max(dt) {
        return Err(Error::InvalidConfig(format!(
            "time {t} is not a multiple of dt = {dt}"
        )));
    }
    Ok(n as usize)
}
