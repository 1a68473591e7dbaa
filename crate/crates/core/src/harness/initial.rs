use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Field2D, Grid2D};

/// Initial conditions of the reference experiments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialCondition {
    /// `cos(2πx) cos(2πy)`.
    Cospi2,
    /// Two tanh-profile bubbles centred at `(0.3, 0.5)` and `(0.7, 0.5)`.
    TwoBubble { radius: f64, width: f64 },
    /// `sin(2πx/64) sin(2πy/64)`.
    Sinpi64,
    /// `0.07 + 0.07·rand`.
    RandPfc { seed: u64 },
    /// Smooth trigonometric mixture on a period-32 lattice.
    ShSmooth,
    /// `0.1 + 0.1·rand`.
    RandSh { seed: u64 },
    Constant(f64),
}

impl InitialCondition {
    pub const NAMES: [&'static str; 7] = [
        "cospi2",
        "two_bubble",
        "sinpi64",
        "rand_pfc",
        "sh_smooth",
        "rand_sh",
        "constant",
    ];

    pub fn from_name(name: &str, radius: f64, width: f64, value: f64, seed: u64) -> Result<Self> {
        Ok(match name {
            "cospi2" => Self::Cospi2,
            "two_bubble" => {
                if !(radius > 0.0 && width > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "two_bubble needs positive radius and width, got {radius}, {width}"
                    )));
                }
                Self::TwoBubble { radius, width }
            }
            "sinpi64" => Self::Sinpi64,
            "rand_pfc" => Self::RandPfc { seed },
            "sh_smooth" => Self::ShSmooth,
            "rand_sh" => Self::RandSh { seed },
            "constant" => Self::Constant(value),
            _ => {
                return Err(Error::UnknownName {
                    kind: "initial condition",
                    name: name.to_string(),
                })
            }
        })
    }

    pub fn generate(&self, grid: &Arc<Grid2D>) -> Field2D {
        let grid = grid.clone();
        match *self {
            Self::Cospi2 => Field2D::from_fn(grid, |x, y| (2.0 * PI * x).cos() * (2.0 * PI * y).cos()),
            Self::TwoBubble { radius, width } => Field2D::from_fn(grid, |x, y| {
                let d1 = ((x - 0.3).powi(2) + (y - 0.5).powi(2)).sqrt();
                let d2 = ((x - 0.7).powi(2) + (y - 0.5).powi(2)).sqrt();
                let w = SQRT_2 * width;
                1.0 - ((d1 - radius) / w).tanh() - ((d2 - radius) / w).tanh()
            }),
            Self::Sinpi64 => Field2D::from_fn(grid, |x, y| {
                (2.0 * PI * x / 64.0).sin() * (2.0 * PI * y / 64.0).sin()
            }),
            Self::ShSmooth => Field2D::from_fn(grid, |x, y| {
                0.07 - 0.02 * (2.0 * PI * (x - 12.0) / 32.0).cos() * (2.0 * PI * (y - 1.0) / 32.0).sin()
                    + 0.02
                        * (PI * (x + 10.0) / 32.0).cos().powi(2)
                        * (PI * (y + 3.0) / 32.0).sin().powi(2)
                    - 0.01 * (4.0 * PI * x / 32.0).sin().powi(2) * (4.0 * PI * (y - 6.0) / 32.0).sin().powi(2)
            }),
            Self::RandPfc { seed } => centered_noise(&grid, seed).map(|v| 0.07 + 0.07 * v),
            Self::RandSh { seed } => centered_noise(&grid, seed).map(|v| 0.1 + 0.1 * v),
            Self::Constant(c) => Field2D::constant(grid, c),
        }
    }
}

/// Zero-mean noise with values in `[−1, 1]`.
///
/// Draws one uniform `[−1, 1]` sample per cell in storage order from a
/// ChaCha8 stream seeded with `seed`, subtracts the sample mean, then divides
/// by `max(1, max|v|)` so centering cannot push values outside `[−1, 1]`.
pub fn centered_noise(grid: &Arc<Grid2D>, seed: u64) -> Field2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-1.0, 1.0);
    let raw: Vec<f64> = (0..grid.len()).map(|_| dist.sample(&mut rng)).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let centered: Vec<f64> = raw.iter().map(|v| v - mean).collect();
    let peak = centered.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let values = centered.into_iter().map(|v| v / peak).collect();
    Field2D::new(grid.clone(), values).expect("noise is finite")
}
