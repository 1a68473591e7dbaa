//! Linear, unconditionally energy-stable time integrators for 2D gradient
//! flows on periodic grids.
//!
//! A [`ModelSpec`] supplies the linear operator `L`, the mobility `G` and the
//! nonlinear bulk energy `E₁`; a [`SchemeState`] advances a field with one of
//! the auxiliary-variable schemes in [`SchemeKind`]. The [`harness`] module
//! runs configured experiments and writes energy logs, snapshots and
//! convergence tables.

pub mod error;
pub mod grid;
pub mod harness;
pub mod models;
pub mod schemes;

pub use error::{Error, Result};
pub use grid::{invert_symbol, Field2D, Grid2D, Spectrum, Symbol};
pub use models::{ModelKind, ModelParams, ModelSpec};
pub use schemes::{
    EnergyRecord, InitPolicy, Radicand, SchemeKind, SchemeState, StepDiagnostics,
};
