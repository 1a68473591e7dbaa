//! Gradient-flow models `φ_t = G δE/δφ` with `E(φ) = ½(φ, Lφ) + E₁(φ)`.
//!
//! Each model fixes a nonnegative linear operator `L`, a nonpositive
//! mobility `G` (both diagonal in the DFT basis), and a pointwise bulk
//! density `F` whose derivative `U = F'` drives the nonlinearity.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field2D, Grid2D, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `L = −ε²Δ`, `G = −I`, double-well bulk.
    AllenCahn,
    /// `L = −ε²Δ`, `G = Δ`, double-well bulk.
    CahnHilliard,
    /// Phase field crystal: `L = (1+Δ)²`, `G = Δ`, `F = ¼φ⁴ − ½εφ²`.
    Pfc,
    /// Swift–Hohenberg with quadratic-cubic bulk: `L = (1+Δ)²`, `G = −I`,
    /// `F = ¼φ⁴ − (g/3)φ³ − ½εφ²`.
    SwiftHohenbergQc,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::AllenCahn,
        ModelKind::CahnHilliard,
        ModelKind::Pfc,
        ModelKind::SwiftHohenbergQc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::AllenCahn => "allen_cahn",
            ModelKind::CahnHilliard => "cahn_hilliard",
            ModelKind::Pfc => "pfc",
            ModelKind::SwiftHohenbergQc => "swift_hohenberg_qc",
        }
    }

    /// True when the mobility is `Δ`, which conserves `(φ, 1)`.
    pub fn conserves_mass(self) -> bool {
        matches!(self, ModelKind::CahnHilliard | ModelKind::Pfc)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "model",
                name: s.to_string(),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Interface width (AC/CH) or bifurcation constant (PFC/SH).
    pub epsilon: f64,
    /// Cubic coefficient; only the Swift–Hohenberg model reads it.
    pub g: f64,
}

#[derive(Clone, Debug)]
pub struct ModelSpec {
    kind: ModelKind,
    params: ModelParams,
    grid: Arc<Grid2D>,
    l_symbol: Symbol,
    g_symbol: Symbol,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, params: ModelParams, grid: Arc<Grid2D>) -> Result<Self> {
        if !(params.epsilon > 0.0 && params.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                params.epsilon
            )));
        }
        if !(params.g >= 0.0 && params.g.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "g must be nonnegative, got {}",
                params.g
            )));
        }
        let eps2 = params.epsilon * params.epsilon;
        let l_symbol = match kind {
            ModelKind::AllenCahn | ModelKind::CahnHilliard => {
                Symbol::from_laplacian(&grid, |lam| -eps2 * lam)
            }
            ModelKind::Pfc | ModelKind::SwiftHohenbergQc => {
                Symbol::from_laplacian(&grid, |lam| (1.0 + lam) * (1.0 + lam))
            }
        };
        let g_symbol = match kind {
            ModelKind::AllenCahn | ModelKind::SwiftHohenbergQc => Symbol::constant(&grid, -1.0),
            ModelKind::CahnHilliard | ModelKind::Pfc => grid.lap_symbol().clone(),
        };
        debug_assert!(l_symbol.min() >= 0.0);
        debug_assert!(g_symbol.max() <= 0.0);
        Ok(Self {
            kind,
            params,
            grid,
            l_symbol,
            g_symbol,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    pub fn l_symbol(&self) -> &Symbol {
        &self.l_symbol
    }

    pub fn g_symbol(&self) -> &Symbol {
        &self.g_symbol
    }

    /// Bulk density `F(φ)`.
    pub fn bulk_density(&self, phi: f64) -> f64 {
        let eps = self.params.epsilon;
        match self.kind {
            ModelKind::AllenCahn | ModelKind::CahnHilliard => {
                let w = phi * phi - 1.0;
                0.25 * w * w
            }
            ModelKind::Pfc => 0.25 * phi.powi(4) - 0.5 * eps * phi * phi,
            ModelKind::SwiftHohenbergQc => {
                0.25 * phi.powi(4) - self.params.g / 3.0 * phi.powi(3) - 0.5 * eps * phi * phi
            }
        }
    }

    /// `U(φ) = F'(φ)`.
    pub fn bulk_derivative(&self, phi: f64) -> f64 {
        let eps = self.params.epsilon;
        match self.kind {
            ModelKind::AllenCahn | ModelKind::CahnHilliard => phi * phi * phi - phi,
            ModelKind::Pfc => phi * phi * phi - eps * phi,
            ModelKind::SwiftHohenbergQc => phi * phi * phi - self.params.g * phi * phi - eps * phi,
        }
    }

    /// `E₁(φ) = ∫ F(φ)`.
    pub fn e1_of(&self, phi: &Field2D) -> f64 {
        self.grid.cell_area()
            * phi
                .values()
                .iter()
                .map(|&v| self.bulk_density(v))
                .sum::<f64>()
    }

    pub fn u_of(&self, phi: &Field2D) -> Field2D {
        phi.map(|v| self.bulk_derivative(v))
    }

    pub fn apply_l(&self, phi: &Field2D) -> Field2D {
        phi.apply_symbol(&self.l_symbol)
    }

    pub fn apply_g(&self, phi: &Field2D) -> Field2D {
        phi.apply_symbol(&self.g_symbol)
    }

    /// `½(φ, Lφ)`, evaluated mode by mode so it is nonnegative exactly.
    pub fn quadratic_energy(&self, phi: &Field2D) -> f64 {
        0.5 * phi.to_spectrum().weighted_norm_sq(&self.l_symbol)
    }

    pub fn total_energy(&self, phi: &Field2D) -> f64 {
        self.quadratic_energy(phi) + self.e1_of(phi)
    }
}
