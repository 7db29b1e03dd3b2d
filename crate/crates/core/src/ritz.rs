//! Linear Ritz method in the normalized monomial (Fock) basis `zⁿ/√n!`.
//!
//! The overlap is the identity in this basis, so the Ritz problem is a
//! standard symmetric eigenproblem. Matrix elements are the exact Galerkin
//! projection `⟨m|H|n⟩`: powers of `x` are applied to basis vectors in the
//! untruncated ladder algebra and only then restricted to the first `N`
//! states. That keeps every Ritz value an upper bound and makes the values
//! non-increasing in `N`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ModelSpec;

pub const START_TRUNCATION: usize = 32;
pub const MAX_TRUNCATION: usize = 4096;
/// Changes below this many ulps of the largest diagonal are round-off.
const NOISE_FACTOR: f64 = 64.0;

/// `x = (a + a†)/√2` applied to a coefficient vector over `|0⟩, |1⟩, …`.
fn apply_x(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len() + 1];
    for (n, &c) in v.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        if n > 0 {
            out[n - 1] += c * (n as f64 / 2.0).sqrt();
        }
        out[n + 1] += c * ((n + 1) as f64 / 2.0).sqrt();
    }
    out
}

/// `x^p |n⟩` in the full Fock space.
pub fn x_power_column(n: usize, p: u32) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    v[n] = 1.0;
    for _ in 0..p {
        v = apply_x(&v);
    }
    v
}

/// `H|n⟩` for the single-mode Hamiltonian, in the full Fock space.
fn hamiltonian_column(model: &ModelSpec, n: usize) -> Vec<f64> {
    let mut col = vec![0.0; n + 1];
    col[n] = n as f64 + 0.5;
    for (p, c) in model.anharmonic_terms() {
        let xp = x_power_column(n, p);
        if xp.len() > col.len() {
            col.resize(xp.len(), 0.0);
        }
        for (i, v) in xp.iter().enumerate() {
            col[i] += c * v;
        }
    }
    col
}

/// `⟨n|H|n⟩`, the monomial-state energy.
pub fn fock_expectation(model: &ModelSpec, n: usize) -> Result<f64> {
    Ok(hamiltonian_column(model, n)[n])
}

/// Truncated position matrix: zero diagonal, `X_{n,n+1} = √((n+1)/2)`.
pub fn position_matrix(size: usize) -> Result<DMatrix<f64>> {
    if size < 2 {
        return Err(Error::InvalidParameter(format!("truncation must be >= 2, got {size}")));
    }
    let mut x = DMatrix::zeros(size, size);
    for n in 0..size - 1 {
        let v = ((n + 1) as f64 / 2.0).sqrt();
        x[(n, n + 1)] = v;
        x[(n + 1, n)] = v;
    }
    Ok(x)
}

/// Ritz matrices at one truncation. The overlap is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct RitzMatrices {
    pub size: usize,
    pub h: DMatrix<f64>,
    pub model: ModelSpec,
}

impl RitzMatrices {
    pub fn overlap(&self) -> DMatrix<f64> {
        DMatrix::identity(self.size, self.size)
    }

    /// Largest `|m - n|` with a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0;
        for j in 0..self.size {
            for i in 0..self.size {
                if self.h[(i, j)] != 0.0 {
                    bw = bw.max(i.abs_diff(j));
                }
            }
        }
        bw
    }
}

/// Exact projection of the single-mode Hamiltonian onto the first `size` states.
pub fn hamiltonian_matrix(model: &ModelSpec, size: usize) -> Result<RitzMatrices> {
    if size < 1 {
        return Err(Error::InvalidParameter("truncation must be >= 1".into()));
    }
    let mut h = DMatrix::zeros(size, size);
    for n in 0..size {
        let col = hamiltonian_column(model, n);
        // upper triangle from the column, mirrored so H is exactly symmetric
        for m in 0..=n.min(col.len() - 1) {
            h[(m, n)] = col[m];
            h[(n, m)] = col[m];
        }
    }
    Ok(RitzMatrices { size, h, model: *model })
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..j {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// The `k` smallest eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigen(matrix: &DMatrix<f64>, k: usize) -> Result<Vec<f64>> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::InvalidParameter("matrix must be square".into()));
    }
    let n = matrix.nrows();
    if k < 1 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} must lie in [1, {n}]")));
    }
    let scale = matrix.amax().max(1.0);
    let asym = max_asymmetry(matrix);
    if asym > 1e-14 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = SymmetricEigen::try_new(matrix.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::NoConvergence("symmetric eigensolver".into()))?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals.truncate(k);
    Ok(vals)
}

/// One truncation level of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationStep {
    #[serde(rename = "N")]
    pub n: usize,
    pub values: Vec<f64>,
}

/// Lowest Ritz values with their truncation history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub model: ModelSpec,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub values: Vec<f64>,
    pub history: Vec<TruncationStep>,
}

/// Single-mode Ritz spectrum at truncation `size`.
pub fn ritz_values(model: &ModelSpec, size: usize, k: usize) -> Result<Vec<f64>> {
    if k > size {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds truncation {size}")));
    }
    let m = hamiltonian_matrix(model, size)?;
    symmetric_eigen(&m.h, k)
}

/// `k` lowest levels of the `d`-mode product Hamiltonian from single-mode levels.
///
/// The `k` lowest sums only involve the `k` lowest single-mode levels.
pub fn product_levels(single: &[f64], d: u32, k: usize) -> Vec<f64> {
    let mut levels = vec![0.0];
    for _ in 0..d {
        let mut next: Vec<f64> = levels.iter().flat_map(|a| single.iter().map(move |b| a + b)).collect();
        next.sort_by(f64::total_cmp);
        next.truncate(k);
        levels = next;
    }
    levels
}

/// Ritz spectrum at a fixed truncation, combined over `d` modes.
pub fn ritz_spectrum(model: &ModelSpec, size: usize, k: usize) -> Result<SpectrumResult> {
    let single = ritz_values(model, size, k)?;
    let values = product_levels(&single, model.d(), k);
    Ok(SpectrumResult {
        model: *model,
        n: size,
        k,
        values,
        history: vec![TruncationStep { n: size, values: single }],
    })
}

/// Doubles `N` from 32 until the tracked values move by less than `tol`.
///
/// Gives up at the cap, or earlier once the change between truncations is
/// at the round-off level and so cannot shrink further.
pub fn converged_spectrum(model: &ModelSpec, k: usize, tol: f64) -> Result<SpectrumResult> {
    converged_spectrum_capped(model, k, tol, MAX_TRUNCATION)
}

pub fn converged_spectrum_capped(model: &ModelSpec, k: usize, tol: f64, cap: usize) -> Result<SpectrumResult> {
    if !(tol >= 1e-12) {
        return Err(Error::InvalidParameter(format!("tolerance must be >= 1e-12, got {tol}")));
    }
    if k < 1 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let mut size = START_TRUNCATION;
    while size < 2 * k {
        size *= 2;
    }
    let mut history = vec![TruncationStep { n: size, values: ritz_values(model, size, k)? }];
    loop {
        let next = 2 * size;
        if next > cap {
            return Err(Error::SpectrumNotConverged { history });
        }
        let vals = ritz_values(model, next, k)?;
        let prev = &history.last().expect("history starts non-empty").values;
        let change = prev.iter().zip(&vals).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        history.push(TruncationStep { n: next, values: vals.clone() });
        // eigenvalue round-off grows with the largest diagonal entry
        let noise = NOISE_FACTOR * f64::EPSILON * fock_expectation(model, next - 1)?.abs();
        if change < tol {
            return Ok(SpectrumResult {
                model: *model,
                n: next,
                k,
                values: product_levels(&vals, model.d(), k),
                history,
            });
        }
        if change <= noise {
            return Err(Error::SpectrumNotConverged { history });
        }
        size = next;
    }
}

/// Converged single-mode ground energy at `tol`.
pub fn ground_energy(model: &ModelSpec, tol: f64) -> Result<f64> {
    let s = converged_spectrum(&model.with_dim(1)?, 1, tol)?;
    Ok(s.values[0])
}
