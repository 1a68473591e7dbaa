//! Linear, energy-stable auxiliary-variable time integrators.
//!
//! All four schemes share one step structure. With an explicit predictor
//! `φ̃`, radicand `S` and frozen coefficient `b = U(φ̃)/√S`, the update is
//!
//! ```text
//! (φⁿ⁺¹ − φⁿ)/Δt = G μ
//! μ             = L φ* + ½(rⁿ⁺¹ + rⁿ) b
//! rⁿ⁺¹ − rⁿ     = (σ/2) (b, φⁿ⁺¹ − φⁿ)
//! ```
//!
//! where `φ* = φⁿ⁺¹` (first order) or `½(φⁿ⁺¹ + φⁿ)` (Crank–Nicolson),
//! `σ = +1` for SAV (`S = E₁(φ̃) + C`) and `σ = −1` for the energy-variable
//! schemes (`S = E₀ − E₁(φ̃) + κ`). Substituting the `r` equation leaves a
//! rank-one perturbation of a constant-coefficient operator, which is
//! eliminated with two diagonal solves and one scalar equation for
//! `(b, φⁿ⁺¹)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{invert_symbol, Field2D, Symbol};
use crate::models::ModelSpec;

/// Threshold on `|1 − (σΔt/4)(b, q)|` below which elimination is refused.
pub const ELIMINATION_GUARD: f64 = 1e-12;

/// Relative floor for the radicand; see [`SchemeState::radicand_at`].
pub const RADICAND_GUARD: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum SchemeKind {
    /// Classical SAV Crank–Nicolson with radicand `E₁ + C`.
    SavCn { c: f64 },
    /// First-order (backward Euler) energy-variable scheme.
    Naev1st { kappa: f64 },
    /// Crank–Nicolson energy-variable scheme.
    NaevCn { kappa: f64 },
    /// Crank–Nicolson with `r = iρ`; only `ρ` is stored.
    NaevCnImag { kappa: f64 },
}

impl SchemeKind {
    pub fn tag(&self) -> &'static str {
        match self {
            SchemeKind::SavCn { .. } => "sav_cn",
            SchemeKind::Naev1st { .. } => "naev_1st",
            SchemeKind::NaevCn { .. } => "naev_cn",
            SchemeKind::NaevCnImag { .. } => "naev_cn_imag",
        }
    }

    /// Builds a kind from its tag; `shift` is `C` for SAV and `κ` otherwise.
    pub fn from_tag(tag: &str, shift: f64) -> Result<Self> {
        let kind = match tag {
            "sav_cn" => SchemeKind::SavCn { c: shift },
            "naev_1st" => SchemeKind::Naev1st { kappa: shift },
            "naev_cn" => SchemeKind::NaevCn { kappa: shift },
            "naev_cn_imag" => SchemeKind::NaevCnImag { kappa: shift },
            _ => {
                return Err(Error::UnknownName {
                    kind: "scheme",
                    name: tag.to_string(),
                })
            }
        };
        kind.validate()?;
        Ok(kind)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SchemeKind::SavCn { c } if !c.is_finite() => {
                Err(Error::InvalidConfig(format!("C must be finite, got {c}")))
            }
            SchemeKind::Naev1st { kappa }
            | SchemeKind::NaevCn { kappa }
            | SchemeKind::NaevCnImag { kappa }
                if !(kappa >= 0.0 && kappa.is_finite()) =>
            {
                Err(Error::InvalidConfig(format!(
                    "kappa must be finite and nonnegative, got {kappa}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn is_crank_nicolson(&self) -> bool {
        !matches!(self, SchemeKind::Naev1st { .. })
    }

    pub fn is_sav(&self) -> bool {
        matches!(self, SchemeKind::SavCn { .. })
    }

    /// `σ` in the `r` update.
    ///
    /// For the imaginary variant `r = iρ` and `√S` is replaced by `i√S`; the
    /// two factors of `i` meet in the `ρ` update and give `i·i = −1`.
    fn coupling_sign(&self) -> f64 {
        match self {
            SchemeKind::SavCn { .. } => 1.0,
            SchemeKind::Naev1st { .. } | SchemeKind::NaevCn { .. } => -1.0,
            SchemeKind::NaevCnImag { .. } => -1.0,
        }
    }

    /// Sign of `r²` in the modified energy `½‖φ‖²_L ± r²`.
    fn energy_sign(&self) -> f64 {
        if self.is_sav() {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SchemeKind::SavCn { c } => write!(f, "sav_cn(C={c})"),
            SchemeKind::Naev1st { kappa }
            | SchemeKind::NaevCn { kappa }
            | SchemeKind::NaevCnImag { kappa } => write!(f, "{}(kappa={kappa})", self.tag()),
        }
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    /// Parses a bare tag with the default shift (`C = 0`, `κ = 0`).
    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::from_tag(s, 0.0)
    }
}

/// What to do when the radicand at initialization is not positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InitPolicy {
    /// Return [`Error::NegativeInitialRadicand`].
    #[default]
    Strict,
    /// Clamp like [`SchemeState::radicand_at`] does and flag the event.
    Clamp,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radicand {
    pub value: f64,
    pub clamped: bool,
    /// The unclamped value.
    pub raw: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDiagnostics {
    /// Radicand used for `b`, after clamping.
    pub radicand: f64,
    pub radicand_clamped: bool,
    /// Radicand before clamping.
    pub radicand_raw: f64,
    /// `‖μ‖²` of the reconstructed chemical potential.
    pub mu_norm_sq: f64,
    /// `Δt (Gμ, μ)`; never positive.
    pub dissipation: f64,
    /// Modified energy after the step.
    pub modified_energy: f64,
    /// Scalar-elimination denominator `1 − (σΔt/4)(b, q)`.
    pub denominator: f64,
}

/// Per-step record of energies and auxiliary-variable diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyRecord {
    pub n: usize,
    pub t: f64,
    pub e_original: f64,
    pub e_modified: f64,
    pub r: f64,
    pub e1: f64,
    pub radicand: f64,
    pub dissipation: f64,
    pub clamped: bool,
    /// `½‖φ‖²_L + ρ²` for the imaginary-variable scheme. This is the SAV-form
    /// functional written with `|r|²`; it is not monotone in general and is
    /// kept for comparison only.
    pub sav_form_energy: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SchemeState {
    model: Arc<ModelSpec>,
    kind: SchemeKind,
    dt: f64,
    phi: Field2D,
    phi_prev: Option<Field2D>,
    r: f64,
    e0: f64,
    n: usize,
    init_clamped: bool,
}

impl SchemeState {
    pub fn new(model: Arc<ModelSpec>, phi0: Field2D, dt: f64, kind: SchemeKind) -> Result<Self> {
        Self::with_policy(model, phi0, dt, kind, InitPolicy::Strict)
    }

    pub fn with_policy(
        model: Arc<ModelSpec>,
        phi0: Field2D,
        dt: f64,
        kind: SchemeKind,
        policy: InitPolicy,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "time step must be positive, got {dt}"
            )));
        }
        kind.validate()?;
        assert_eq!(
            **phi0.grid(),
            **model.grid(),
            "initial field and model use different grids"
        );
        if !phi0.is_finite() {
            return Err(Error::NonFinite {
                what: "initial condition".into(),
            });
        }
        let e0 = model.total_energy(&phi0);
        let mut state = Self {
            model,
            kind,
            dt,
            phi: phi0,
            phi_prev: None,
            r: 0.0,
            e0,
            n: 0,
            init_clamped: false,
        };
        let rad = state.radicand_at(&state.phi);
        if rad.clamped && kind.is_sav() && policy == InitPolicy::Strict {
            return Err(Error::NegativeInitialRadicand { value: rad.raw });
        }
        // for the energy-variable kinds the raw value is ½(φ⁰, Lφ⁰) + κ ≥ 0
        state.r = if rad.clamped && !kind.is_sav() {
            rad.raw.max(0.0).sqrt()
        } else {
            rad.value.sqrt()
        };
        state.init_clamped = rad.clamped && kind.is_sav();
        Ok(state)
    }

    pub fn model(&self) -> &Arc<ModelSpec> {
        &self.model
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn phi(&self) -> &Field2D {
        &self.phi
    }

    pub fn phi_prev(&self) -> Option<&Field2D> {
        self.phi_prev.as_ref()
    }

    /// Auxiliary scalar; `ρ` for the imaginary-variable scheme.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Energy of the initial condition, frozen at construction.
    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn time(&self) -> f64 {
        self.n as f64 * self.dt
    }

    /// Whether the initial SAV radicand had to be clamped.
    pub fn init_clamped(&self) -> bool {
        self.init_clamped
    }

    fn radicand_floor(&self) -> f64 {
        RADICAND_GUARD * (1.0 + self.e0.abs())
    }

    /// Value under the square root at `phi_tilde`, clamped to
    /// `max(|S|, RADICAND_GUARD·(1 + |E₀|))` when it is not safely positive.
    pub fn radicand_at(&self, phi_tilde: &Field2D) -> Radicand {
        let e1 = self.model.e1_of(phi_tilde);
        let raw = match self.kind {
            SchemeKind::SavCn { c } => e1 + c,
            SchemeKind::Naev1st { kappa }
            | SchemeKind::NaevCn { kappa }
            | SchemeKind::NaevCnImag { kappa } => self.e0 - e1 + kappa,
        };
        let floor = self.radicand_floor();
        if raw <= floor || !raw.is_finite() {
            let value = if raw.is_finite() {
                raw.abs().max(floor)
            } else {
                floor
            };
            Radicand {
                value,
                clamped: true,
                raw,
            }
        } else {
            Radicand {
                value: raw,
                clamped: false,
                raw,
            }
        }
    }

    /// Linearly implicit predictor `(x − φ⁰)/τ = G(L x + U(φ⁰))`.
    fn implicit_predictor(&self, tau: f64) -> Result<Field2D> {
        let m = &self.model;
        let op = m
            .g_symbol()
            .zip_with(m.l_symbol(), |g, l| 1.0 - tau * g * l);
        let rhs = self.phi.axpy(tau, &m.apply_g(&m.u_of(&self.phi)));
        rhs.solve_diagonal(&op)
    }

    /// Start-up value `φ̃^{1/2}` for the Crank–Nicolson kinds.
    pub fn half_step_init(&self) -> Result<Field2D> {
        self.implicit_predictor(0.5 * self.dt)
    }

    /// Explicit predictor at which the nonlinearity is frozen.
    ///
    /// Crank–Nicolson kinds use `(3φⁿ − φⁿ⁻¹)/2` and first-order uses
    /// `2φⁿ − φⁿ⁻¹`. At `n = 0` both fall back to a linearly implicit
    /// start-up step over `Δt/2` or `Δt`, respectively.
    pub fn extrapolate(&self) -> Result<Field2D> {
        match (&self.phi_prev, self.kind.is_crank_nicolson()) {
            (Some(prev), true) => Ok(self.phi.zip_with(prev, |a, b| 1.5 * a - 0.5 * b)),
            (Some(prev), false) => Ok(self.phi.zip_with(prev, |a, b| 2.0 * a - b)),
            (None, true) => self.half_step_init(),
            (None, false) => self.implicit_predictor(self.dt),
        }
    }

    pub fn modified_energy(&self) -> f64 {
        self.model.quadratic_energy(&self.phi) + self.kind.energy_sign() * self.r * self.r
    }

    /// Energies of the current state. Dissipation is zero and the radicand
    /// is evaluated at `φⁿ`; the driver overwrites both with the values
    /// from the step that produced this state.
    pub fn energy_report(&self) -> EnergyRecord {
        let quad = self.model.quadratic_energy(&self.phi);
        let e1 = self.model.e1_of(&self.phi);
        let rad = self.radicand_at(&self.phi);
        EnergyRecord {
            n: self.n,
            t: self.time(),
            e_original: quad + e1,
            e_modified: quad + self.kind.energy_sign() * self.r * self.r,
            r: self.r,
            e1,
            radicand: rad.value,
            dissipation: 0.0,
            clamped: if self.n == 0 {
                self.init_clamped
            } else {
                rad.clamped
            },
            sav_form_energy: matches!(self.kind, SchemeKind::NaevCnImag { .. })
                .then(|| quad + self.r * self.r),
        }
    }

    /// Advances one step. On error the state is left untouched.
    pub fn step(&mut self) -> Result<StepDiagnostics> {
        let m = self.model.clone();
        let dt = self.dt;
        let sigma = self.kind.coupling_sign();
        let cn = self.kind.is_crank_nicolson();

        let predicted = self.extrapolate()?;
        let rad = self.radicand_at(&predicted);
        let b = m.u_of(&predicted).scale(1.0 / rad.value.sqrt());

        // A = I − θΔt·GL with θ = ½ (CN) or 1
        let theta = if cn { 0.5 } else { 1.0 };
        let gl = m.g_symbol().zip_with(m.l_symbol(), |g, l| g * l);
        let a_inv = invert_symbol(&gl.map(|v| 1.0 - theta * dt * v))?;
        let explicit = gl.map(|v| 1.0 + (1.0 - theta) * dt * v);

        let phi_hat = self.phi.to_spectrum();
        let gb_hat = b.to_spectrum().scale_by(m.g_symbol());
        let rhs_hat = phi_hat.scale_by(&explicit).axpy(dt * self.r, &gb_hat);
        let p_hat = rhs_hat.scale_by(&a_inv);
        let q_hat = gb_hat.scale_by(&a_inv);
        let p = p_hat.to_field();
        let q = q_hat.to_field();

        let c = sigma * dt / 4.0;
        let b_phi = b.inner_product(&self.phi);
        let b_p = b.inner_product(&p);
        let b_q = b.inner_product(&q);
        let denominator = 1.0 - c * b_q;
        if denominator.is_nan() || denominator.abs() < ELIMINATION_GUARD {
            return Err(Error::EliminationSingular {
                step: self.n,
                denominator,
            });
        }
        let gamma = (b_p - c * b_phi * b_q) / denominator;
        let coef = c * (gamma - b_phi);
        let phi_new = p.axpy(coef, &q);
        if !phi_new.is_finite() {
            return Err(Error::NonFinite {
                what: format!("solution at step {}", self.n + 1),
            });
        }
        let r_new = self.r + 0.5 * sigma * (b.inner_product(&phi_new) - b_phi);

        // μ from the second equation; CN evaluates it at the half step
        let phi_new_hat = p_hat.axpy(coef, &q_hat);
        let centered = if cn {
            phi_new_hat.axpy(1.0, &phi_hat).scale_by(&Symbol::constant(m.grid(), 0.5))
        } else {
            phi_new_hat
        };
        let mu_hat = centered
            .scale_by(m.l_symbol())
            .axpy(0.5 * (r_new + self.r), &b.to_spectrum());
        let dissipation = dt * mu_hat.weighted_norm_sq(m.g_symbol());
        let mu_norm_sq = mu_hat.norm_sq();
        debug_assert!(dissipation <= 1e-12 * (1.0 + mu_norm_sq));

        let prev = std::mem::replace(&mut self.phi, phi_new);
        self.phi_prev = Some(prev);
        self.r = r_new;
        self.n += 1;

        Ok(StepDiagnostics {
            radicand: rad.value,
            radicand_clamped: rad.clamped,
            radicand_raw: rad.raw,
            mu_norm_sq,
            dissipation,
            modified_energy: self.modified_energy(),
            denominator,
        })
    }

    /// Rebuilds a state mid-run, e.g. to replay a step against a reference.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        model: Arc<ModelSpec>,
        kind: SchemeKind,
        dt: f64,
        phi: Field2D,
        phi_prev: Option<Field2D>,
        r: f64,
        e0: f64,
        n: usize,
    ) -> Self {
        assert_eq!(n == 0, phi_prev.is_none(), "phi_prev is required exactly when n ≥ 1");
        Self {
            model,
            kind,
            dt,
            phi,
            phi_prev,
            r,
            e0,
            n,
            init_clamped: false,
        }
    }
}
