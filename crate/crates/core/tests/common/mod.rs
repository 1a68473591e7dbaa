//! Dense reference implementations shared by the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use naev::{Field2D, Grid2D, ModelKind, ModelParams, ModelSpec, SchemeKind, SchemeState};

/// Periodic 5-point Laplacian as a dense matrix in storage order `i·ny + j`.
pub fn dense_laplacian(grid: &Grid2D) -> DMatrix<f64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (ax, ay) = (1.0 / grid.hx().powi(2), 1.0 / grid.hy().powi(2));
    let idx = |i: usize, j: usize| i * ny + j;
    let mut d = DMatrix::zeros(nx * ny, nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let k = idx(i, j);
            d[(k, k)] -= 2.0 * ax + 2.0 * ay;
            d[(k, idx((i + 1) % nx, j))] += ax;
            d[(k, idx((i + nx - 1) % nx, j))] += ax;
            d[(k, idx(i, (j + 1) % ny))] += ay;
            d[(k, idx(i, (j + ny - 1) % ny))] += ay;
        }
    }
    d
}

/// Dense `L` and `G` of a model.
pub fn dense_operators(model: &ModelSpec) -> (DMatrix<f64>, DMatrix<f64>) {
    let d = dense_laplacian(model.grid());
    let n = d.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let eps = model.params().epsilon;
    match model.kind() {
        ModelKind::AllenCahn => (-eps * eps * &d, -id),
        ModelKind::CahnHilliard => (-eps * eps * &d, d),
        ModelKind::Pfc => {
            let a = &id + &d;
            (&a * &a, d)
        }
        ModelKind::SwiftHohenbergQc => {
            let a = &id + &d;
            (&a * &a, -id)
        }
    }
}

pub fn vec_of(f: &Field2D) -> DVector<f64> {
    DVector::from_column_slice(f.values())
}

pub fn field_of(grid: &Arc<Grid2D>, v: &DVector<f64>) -> Field2D {
    Field2D::new(grid.clone(), v.as_slice().to_vec()).unwrap()
}

pub fn model(kind: ModelKind, n: usize, l: f64, epsilon: f64, g: f64) -> Arc<ModelSpec> {
    let grid = Grid2D::new(n, n, l, l).unwrap();
    Arc::new(ModelSpec::new(kind, ModelParams { epsilon, g }, grid).unwrap())
}

/// A representative small setup for each model.
pub fn small_model(kind: ModelKind, n: usize) -> Arc<ModelSpec> {
    match kind {
        ModelKind::AllenCahn | ModelKind::CahnHilliard => model(kind, n, 1.0, 0.2, 0.0),
        ModelKind::Pfc => model(kind, n, 2.0 * n as f64, 0.25, 0.0),
        ModelKind::SwiftHohenbergQc => model(kind, n, 2.0 * n as f64, 0.25, 2.0),
    }
}

pub const ALL_KINDS: [SchemeKind; 4] = [
    SchemeKind::SavCn { c: 100.0 },
    SchemeKind::Naev1st { kappa: 0.0 },
    SchemeKind::NaevCn { kappa: 0.0 },
    SchemeKind::NaevCnImag { kappa: 0.0 },
];

pub const NAEV_KINDS: [SchemeKind; 3] = [
    SchemeKind::Naev1st { kappa: 0.0 },
    SchemeKind::NaevCn { kappa: 0.0 },
    SchemeKind::NaevCnImag { kappa: 0.0 },
];

/// One step of `state` computed by assembling and solving the coupled
/// `(φⁿ⁺¹, rⁿ⁺¹)` system densely. Returns the new field and scalar.
pub fn dense_step(state: &SchemeState) -> (DVector<f64>, f64) {
    let model = state.model();
    let grid = model.grid();
    let (l, g) = dense_operators(model);
    let n = l.nrows();
    let w = grid.cell_area();
    let dt = state.dt();
    let kind = state.kind();
    let cn = kind.is_crank_nicolson();
    let theta = if cn { 0.5 } else { 1.0 };
    let sigma = if kind.is_sav() { 1.0 } else { -1.0 };
    let phi = vec_of(state.phi());
    let gl = &g * &l;
    let id = DMatrix::<f64>::identity(n, n);

    let predicted = match state.phi_prev() {
        Some(prev) => {
            let prev = vec_of(prev);
            if cn {
                1.5 * &phi - 0.5 * prev
            } else {
                2.0 * &phi - prev
            }
        }
        None => {
            let tau = if cn { 0.5 * dt } else { dt };
            let u = vec_of(&model.u_of(state.phi()));
            let rhs = &phi + tau * (&g * u);
            (&id - tau * &gl).lu().solve(&rhs).unwrap()
        }
    };
    let predicted_field = field_of(grid, &predicted);
    let e1 = model.e1_of(&predicted_field);
    let s = match kind {
        SchemeKind::SavCn { c } => e1 + c,
        _ => state.e0() - e1 + kappa_of(kind),
    };
    assert!(s > 0.0, "oracle setups must not clamp");
    let b = vec_of(&model.u_of(&predicted_field)) / s.sqrt();
    let gb = &g * &b;

    let mut m = DMatrix::<f64>::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(&(&id - theta * dt * &gl));
    for k in 0..n {
        m[(k, n)] = -0.5 * dt * gb[k];
        m[(n, k)] = -0.5 * sigma * w * b[k];
    }
    m[(n, n)] = 1.0;
    let mut rhs = DVector::<f64>::zeros(n + 1);
    let top = &phi + (1.0 - theta) * dt * (&gl * &phi) + 0.5 * dt * state.r() * &gb;
    rhs.rows_mut(0, n).copy_from(&top);
    rhs[n] = state.r() - 0.5 * sigma * w * b.dot(&phi);
    let sol = m.lu().solve(&rhs).unwrap();
    (sol.rows(0, n).into_owned(), sol[n])
}

/// `½(φ, Lφ) + E₁(φ)` with a dense `L`.
pub fn dense_energy(model: &ModelSpec, phi: &Field2D) -> f64 {
    let (l, _) = dense_operators(model);
    let v = vec_of(phi);
    0.5 * model.grid().cell_area() * v.dot(&(l * &v)) + model.e1_of(phi)
}

fn kappa_of(kind: SchemeKind) -> f64 {
    match kind {
        SchemeKind::SavCn { .. } => 0.0,
        SchemeKind::Naev1st { kappa } | SchemeKind::NaevCn { kappa } | SchemeKind::NaevCnImag { kappa } => kappa,
    }
}

/// Number of 4-connected components of `{φ > 0}` on the periodic grid.
pub fn positive_components(f: &Field2D) -> usize {
    let grid = f.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut seen = vec![false; nx * ny];
    let mut count = 0;
    for start in 0..nx * ny {
        if seen[start] || f.values()[start] <= 0.0 {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(k) = stack.pop() {
            let (i, j) = (k / ny, k % ny);
            for (a, b) in [
                ((i + 1) % nx, j),
                ((i + nx - 1) % nx, j),
                (i, (j + 1) % ny),
                (i, (j + ny - 1) % ny),
            ] {
                let m = a * ny + b;
                if !seen[m] && f.values()[m] > 0.0 {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
    }
    count
}
