//! Finite-difference position-space reference solver.
//!
//! Three-point Laplacian on a uniform grid over `[-L, L]` with Dirichlet
//! walls just outside the end nodes; eigenvalues by Sturm-count bisection.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{potential_value, ModelSpec};

pub const DEFAULT_HALF_WIDTH: f64 = 8.0;
pub const DEFAULT_POINTS: usize = 2048;
const MIN_GRID_POINTS: usize = 64;
const MIN_SOLVE_POINTS: usize = 256;
const MAX_BOX_EXPANSIONS: usize = 2;
const EIG_TOL: f64 = 1e-12;

/// Uniform grid `x_i = -L + i·h`, `h = 2L/(m-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    pub half_width: f64,
    pub points: usize,
}

impl Grid1D {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidParameter(format!("half width must be positive, got {half_width}")));
        }
        if points < MIN_GRID_POINTS {
            return Err(Error::InvalidParameter(format!("grid needs >= {MIN_GRID_POINTS} points, got {points}")));
        }
        Ok(Grid1D { half_width, points })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        // symmetric by construction: node(m-1-i) = -node(i)
        let h = self.spacing();
        let mid = (self.points - 1) as f64 / 2.0;
        (i as f64 - mid) * h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    /// Same `L`, spacing halved.
    pub fn refined(&self) -> Self {
        Grid1D { half_width: self.half_width, points: 2 * self.points - 1 }
    }

    /// `L` doubled at fixed spacing.
    pub fn widened(&self) -> Self {
        Grid1D { half_width: 2.0 * self.half_width, points: 2 * self.points - 1 }
    }
}

/// Diagonal `1/h² + V(x_i)` and off-diagonal `-1/(2h²)`.
pub fn fd_hamiltonian(model: &ModelSpec, grid: &Grid1D) -> (Vec<f64>, Vec<f64>) {
    let h = grid.spacing();
    let kin = 1.0 / (h * h);
    let diag = grid.nodes().iter().map(|&x| kin + potential_value(model, x)).collect();
    let off = vec![-0.5 * kin; grid.points - 1];
    (diag, off)
}

/// Number of eigenvalues strictly below `x` (LDLᵀ sign count).
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 { f64::MIN_POSITIVE } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// `k` smallest eigenvalues of a symmetric tridiagonal matrix, ascending.
pub fn tridiag_eigen(diag: &[f64], off: &[f64], k: usize) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::InvalidParameter(format!(
            "inconsistent tridiagonal sizes: {} diagonal, {} off-diagonal",
            n,
            off.len()
        )));
    }
    if k < 1 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} must lie in [1, {n}]")));
    }
    // Gershgorin bounds
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let (mut a, mut b) = (lo, hi);
        while b - a > EIG_TOL {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(diag, off, mid) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        let v = 0.5 * (a + b);
        out.push(v);
        lo = a;
    }
    Ok(out)
}

/// Lowest `k` levels on one grid.
pub fn fd_levels(model: &ModelSpec, grid: &Grid1D, k: usize) -> Result<Vec<f64>> {
    let (d, e) = fd_hamiltonian(model, grid);
    tridiag_eigen(&d, &e, k)
}

/// Ground-state solve with its box and refinement diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdResult {
    pub energy: f64,
    /// Unrefined value on the final grid.
    pub coarse: f64,
    /// Value on the half-spacing grid, when refined.
    pub fine: Option<f64>,
    pub grid: Grid1D,
    pub box_expansions: usize,
}

fn wall_height(model: &ModelSpec, l: f64) -> f64 {
    potential_value(model, l).min(potential_value(model, -l))
}

/// Lowest `k` levels with automatic box expansion and optional Richardson step.
pub fn fd_spectrum(model: &ModelSpec, half_width: f64, points: usize, k: usize, refine: bool) -> Result<Vec<FdResult>> {
    if points < MIN_SOLVE_POINTS {
        return Err(Error::InvalidParameter(format!("need >= {MIN_SOLVE_POINTS} points, got {points}")));
    }
    let model = model.with_dim(1)?;
    let mut grid = Grid1D::new(half_width, points)?;
    let mut expansions = 0;
    let mut levels = fd_levels(&model, &grid, k)?;
    loop {
        let top = levels.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        if wall_height(&model, grid.half_width) >= 10.0 * top {
            break;
        }
        if expansions == MAX_BOX_EXPANSIONS {
            return Err(Error::BoxTooSmall(format!(
                "V(±{}) = {} is below 10 × {} after {} expansions",
                grid.half_width,
                wall_height(&model, grid.half_width),
                top,
                expansions
            )));
        }
        grid = grid.widened();
        expansions += 1;
        levels = fd_levels(&model, &grid, k)?;
    }
    let fine = if refine { Some(fd_levels(&model, &grid.refined(), k)?) } else { None };
    Ok((0..k)
        .map(|i| {
            let coarse = levels[i];
            let f = fine.as_ref().map(|v| v[i]);
            let energy = f.map_or(coarse, |f| (4.0 * f - coarse) / 3.0);
            FdResult { energy, coarse, fine: f, grid, box_expansions: expansions }
        })
        .collect())
}

pub fn fd_ground_detailed(model: &ModelSpec, half_width: f64, points: usize, refine: bool) -> Result<FdResult> {
    Ok(fd_spectrum(model, half_width, points, 1, refine)?.remove(0))
}

/// Single-mode ground energy on `[-L, L]` with `m` points.
pub fn fd_ground_energy(model: &ModelSpec, half_width: f64, points: usize, refine: bool) -> Result<f64> {
    Ok(fd_ground_detailed(model, half_width, points, refine)?.energy)
}

/// Ground energy with the default box and grid, refined.
pub fn fd_reference_energy(model: &ModelSpec) -> Result<f64> {
    fd_ground_energy(model, DEFAULT_HALF_WIDTH, DEFAULT_POINTS, true)
}
