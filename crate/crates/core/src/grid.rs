//! Uniform periodic 2D grids and the fields that live on them.
//!
//! Values are stored row-major: the value at cell `(i, j)`, located at
//! `(i·hx, j·hy)`, sits at index `i·ny + j`. Every constant-coefficient
//! operator used by the integrators is diagonal in the DFT basis of this
//! layout, so operators are carried around as per-mode [`Symbol`]s and
//! applied or inverted with one forward and one inverse transform.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Relative singularity guard for [`Field2D::solve_diagonal`].
pub const SOLVE_GUARD: f64 = 1e-14;

/// Geometry of a periodic `nx × ny` grid on `[0, lx) × [0, ly)`.
#[derive(Clone)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    hx: f64,
    hy: f64,
    lap_symbol: Symbol,
    fft_x: Arc<dyn Fft<f64>>,
    ifft_x: Arc<dyn Fft<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
    ifft_y: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid2D")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("lx", &self.lx)
            .field("ly", &self.ly)
            .finish()
    }
}

impl PartialEq for Grid2D {
    fn eq(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.lx == other.lx && self.ly == other.ly
    }
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Arc<Self>> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells per axis, got {nx}×{ny}"
            )));
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "side lengths must be positive and finite, got {lx}×{ly}"
            )));
        }
        let hx = lx / nx as f64;
        let hy = ly / ny as f64;
        let axis = |n: usize, h: f64| -> Vec<f64> {
            (0..n)
                .map(|k| (2.0 * (2.0 * PI * k as f64 / n as f64).cos() - 2.0) / (h * h))
                .collect()
        };
        let lam_x = axis(nx, hx);
        let lam_y = axis(ny, hy);
        let mut lap = Vec::with_capacity(nx * ny);
        for lx_k in &lam_x {
            for ly_k in &lam_y {
                lap.push(lx_k + ly_k);
            }
        }
        // cos(0) rounding can leave a tiny nonzero at the constant mode
        lap[0] = 0.0;

        let mut planner = FftPlanner::new();
        Ok(Arc::new(Self {
            nx,
            ny,
            lx,
            ly,
            hx,
            hy,
            lap_symbol: Symbol {
                nx,
                ny,
                values: lap,
            },
            fft_x: planner.plan_fft_forward(nx),
            ifft_x: planner.plan_fft_inverse(nx),
            fft_y: planner.plan_fft_forward(ny),
            ifft_y: planner.plan_fft_inverse(ny),
        }))
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn hx(&self) -> f64 {
        self.hx
    }

    pub fn hy(&self) -> f64 {
        self.hy
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one cell.
    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// DFT eigenvalues of the 5-point periodic Laplacian.
    pub fn lap_symbol(&self) -> &Symbol {
        &self.lap_symbol
    }

    /// Coordinates of cell `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.hx, j as f64 * self.hy)
    }

    fn transform(&self, data: &mut [Complex<f64>], inverse: bool) {
        let (fx, fy) = if inverse {
            (&self.ifft_x, &self.ifft_y)
        } else {
            (&self.fft_x, &self.fft_y)
        };
        let scratch_len = fx
            .get_inplace_scratch_len()
            .max(fy.get_inplace_scratch_len());
        let mut scratch = vec![Complex::new(0.0, 0.0); scratch_len];

        // rows are contiguous: rustfft processes the whole buffer as ny-chunks
        fy.process_with_scratch(data, &mut scratch);

        let (nx, ny) = (self.nx, self.ny);
        let mut cols = vec![Complex::new(0.0, 0.0); nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                cols[j * nx + i] = data[i * ny + j];
            }
        }
        fx.process_with_scratch(&mut cols, &mut scratch);
        let norm = if inverse { 1.0 / (nx * ny) as f64 } else { 1.0 };
        for i in 0..nx {
            for j in 0..ny {
                data[i * ny + j] = cols[j * nx + i] * norm;
            }
        }
    }
}

/// Per-mode real multiplier of a constant-coefficient periodic operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl Symbol {
    pub fn constant(grid: &Grid2D, value: f64) -> Self {
        Self {
            nx: grid.nx,
            ny: grid.ny,
            values: vec![value; grid.len()],
        }
    }

    /// Builds a symbol as a function of the Laplacian eigenvalue at each mode.
    pub fn from_laplacian(grid: &Grid2D, f: impl Fn(f64) -> f64) -> Self {
        grid.lap_symbol.map(f)
    }

    pub fn from_values(grid: &Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            nx: grid.nx,
            ny: grid.ny,
            values,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, kx: usize, ky: usize) -> f64 {
        self.values[kx * self.ny + ky]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            nx: self.nx,
            ny: self.ny,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Symbol, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.values.len(), other.values.len(), "symbol shape mismatch");
        Self {
            nx: self.nx,
            ny: self.ny,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// DFT coefficients of a real field (unnormalized forward transform).
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Arc<Grid2D>,
    coeffs: Vec<Complex<f64>>,
}

impl Spectrum {
    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<f64>] {
        &self.coeffs
    }

    pub fn scale_by(&self, symbol: &Symbol) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(symbol.values())
                .map(|(c, s)| c * s)
                .collect(),
        }
    }

    /// `self + alpha·other`, coefficient-wise.
    pub fn axpy(&self, alpha: f64, other: &Spectrum) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b * alpha)
                .collect(),
        }
    }

    /// Weighted quadratic form `Σ_k w_k |û_k|²` scaled to match [`Field2D::inner_product`].
    pub fn weighted_norm_sq(&self, weight: &Symbol) -> f64 {
        let scale = self.grid.cell_area() / self.grid.len() as f64;
        scale
            * self
                .coeffs
                .iter()
                .zip(weight.values())
                .map(|(c, w)| w * c.norm_sqr())
                .sum::<f64>()
    }

    pub fn norm_sq(&self) -> f64 {
        let scale = self.grid.cell_area() / self.grid.len() as f64;
        scale * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Inverse transform; the imaginary part is round-off and is dropped.
    pub fn to_field(&self) -> Field2D {
        let mut data = self.coeffs.clone();
        self.grid.transform(&mut data, true);
        Field2D {
            grid: self.grid.clone(),
            values: data.into_iter().map(|c| c.re).collect(),
        }
    }
}

/// Real scalar field on a [`Grid2D`].
#[derive(Clone, Debug)]
pub struct Field2D {
    grid: Arc<Grid2D>,
    values: Vec<f64>,
}

impl PartialEq for Field2D {
    fn eq(&self, other: &Self) -> bool {
        *self.grid == *other.grid && self.values == other.values
    }
}

impl Field2D {
    pub fn new(grid: Arc<Grid2D>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "field values".into(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Arc<Grid2D>, value: f64) -> Self {
        let values = vec![value; grid.len()];
        Self { grid, values }
    }

    pub fn zeros(grid: Arc<Grid2D>) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `f(x, y)` at every cell.
    pub fn from_fn(grid: Arc<Grid2D>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                let (x, y) = grid.point(i, j);
                values.push(f(x, y));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.ny + j]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn check_same_grid(&self, other: &Field2D) {
        assert!(
            Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid,
            "fields live on different grids: {:?} vs {:?}",
            self.grid,
            other.grid
        );
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field2D {
        Field2D {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Field2D, f: impl Fn(f64, f64) -> f64) -> Field2D {
        self.check_same_grid(other);
        Field2D {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, alpha: f64) -> Field2D {
        self.map(|v| alpha * v)
    }

    /// `self + alpha·other`.
    pub fn axpy(&self, alpha: f64, other: &Field2D) -> Field2D {
        self.zip_with(other, |a, b| a + alpha * b)
    }

    pub fn sub(&self, other: &Field2D) -> Field2D {
        self.zip_with(other, |a, b| a - b)
    }

    /// Uniform-weight quadrature `hx·hy·Σ f·g`.
    pub fn inner_product(&self, other: &Field2D) -> f64 {
        self.check_same_grid(other);
        self.grid.cell_area()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    /// Quadrature of the field, `(f, 1)`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_area() * self.values.iter().sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner_product(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// 5-point periodic Laplacian, evaluated directly on the stencil.
    pub fn laplacian(&self) -> Field2D {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let (ihx2, ihy2) = (
            1.0 / (self.grid.hx * self.grid.hx),
            1.0 / (self.grid.hy * self.grid.hy),
        );
        let v = &self.values;
        let mut out = Vec::with_capacity(v.len());
        for i in 0..nx {
            let ip = (i + 1) % nx;
            let im = (i + nx - 1) % nx;
            for j in 0..ny {
                let jp = (j + 1) % ny;
                let jm = (j + ny - 1) % ny;
                let c = v[i * ny + j];
                out.push(
                    (v[ip * ny + j] + v[im * ny + j] - 2.0 * c) * ihx2
                        + (v[i * ny + jp] + v[i * ny + jm] - 2.0 * c) * ihy2,
                );
            }
        }
        Field2D {
            grid: self.grid.clone(),
            values: out,
        }
    }

    pub fn to_spectrum(&self) -> Spectrum {
        let mut coeffs: Vec<Complex<f64>> =
            self.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.grid.transform(&mut coeffs, false);
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Applies the operator whose DFT symbol is `symbol`.
    pub fn apply_symbol(&self, symbol: &Symbol) -> Field2D {
        self.to_spectrum().scale_by(symbol).to_field()
    }

    /// Solves `symbol ⊙ DFT(x) = DFT(self)` for the periodic field `x`.
    pub fn solve_diagonal(&self, symbol: &Symbol) -> Result<Field2D> {
        let inverse = invert_symbol(symbol)?;
        Ok(self.to_spectrum().scale_by(&inverse).to_field())
    }
}

/// Reciprocal of a symbol, rejecting modes below `SOLVE_GUARD · max|symbol|`.
pub fn invert_symbol(symbol: &Symbol) -> Result<Symbol> {
    let guard = SOLVE_GUARD * symbol.max_abs();
    if let Some(k) = symbol
        .values
        .iter()
        .position(|v| v.abs() < guard || *v == 0.0)
    {
        return Err(Error::SingularSymbol {
            kx: k / symbol.ny,
            ky: k % symbol.ny,
            value: symbol.values[k],
            guard,
        });
    }
    Ok(symbol.map(|v| 1.0 / v))
}
