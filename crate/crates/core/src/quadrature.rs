//! Segal–Bargmann inner products by tensor Gauss–Hermite quadrature.
//!
//! `⟨f|g⟩ = (1/π) ∫ conj(f) g e^{-|z|²} d²z` with `z = x + iy`; the measure
//! `e^{-x²-y²}` is the Hermite weight on each axis. Every trial is held as
//! `Q(z)·exp(az² + bz)` with a polynomial `Q`, so `z` and `∂z` act exactly on
//! coefficients and no numerical differentiation is involved.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::trial::{check_admissible, hessian_determinant, TrialParams};

pub const MIN_ORDER: usize = 8;
/// Doubling is applied on top, so the finest rule used is twice this.
pub const MAX_ORDER: usize = 256;
pub const DEFAULT_ORDER: usize = 64;
/// Relative change under order doubling still accepted as converged.
pub const STABILITY_TOL: f64 = 1e-9;

/// Gauss–Hermite rule for the weight `e^{-x²}`.
///
/// `scaled[i] = weights[i]·e^{x_i²}`; the integrands fold the weight back in
/// as an exponent so large sub-Gaussian factors never overflow.
#[derive(Debug, Clone)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub scaled: Vec<f64>,
}

/// Golub-Welsch nodes, polished by Newton on the orthonormal recurrence.
pub fn hermite_rule(order: usize) -> Result<HermiteRule> {
    if order == 0 || order > 2 * MAX_ORDER {
        return Err(Error::InvalidParameter(format!("quadrature order {order} out of range")));
    }
    let n = order;
    let jacobi = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut guess = nalgebra::SymmetricEigen::new(jacobi).eigenvalues.as_slice().to_vec();
    guess.sort_by(|a, b| b.total_cmp(a));
    let mut x = vec![0.0; n];
    let mut scaled = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = 0.5 * (guess[i] - guess[n - 1 - i]);
        for _ in 0..20 {
            let (p1, pp) = hermite_eval(z, n);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        if n % 2 == 1 && i == m - 1 {
            z = 0.0;
        }
        let (_, pp) = hermite_eval(z, n);
        let damped = pp * (-0.5 * z * z).exp();
        x[i] = z;
        x[n - 1 - i] = -z;
        scaled[i] = 2.0 / (damped * damped);
        scaled[n - 1 - i] = scaled[i];
    }
    let weights = x.iter().zip(&scaled).map(|(xi, s)| s * (-xi * xi).exp()).collect();
    Ok(HermiteRule { nodes: x, weights, scaled })
}

/// Orthonormal Hermite polynomial of degree `n` at `z` and its derivative.
fn hermite_eval(z: f64, n: usize) -> (f64, f64) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    let (mut p1, mut p2) = (PIM4, 0.0f64);
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Tensor-product grid over ℂ with `order²` nodes.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub order: usize,
    pub rule: HermiteRule,
}

impl QuadratureGrid {
    pub fn new(order: usize) -> Result<Self> {
        if order < MIN_ORDER {
            return Err(Error::InvalidParameter(format!(
                "quadrature order {order} below minimum {MIN_ORDER}"
            )));
        }
        Ok(QuadratureGrid { order, rule: hermite_rule(order)? })
    }

    pub fn node_count(&self) -> usize {
        self.order * self.order
    }

    /// `Σ conj(f) g` over the grid, both given as (prefactor, exponent) per node.
    fn integrate<F>(&self, mut integrand: F) -> Complex64
    where
        F: FnMut(Complex64) -> (Complex64, Complex64),
    {
        let r = &self.rule;
        let mut total = Complex64::new(0.0, 0.0);
        for (i, &x) in r.nodes.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for (j, &y) in r.nodes.iter().enumerate() {
                let (pre, expo) = integrand(Complex64::new(x, y));
                let e = expo - (x * x + y * y);
                if e.re < -745.0 {
                    continue;
                }
                row += pre * e.exp() * r.scaled[j];
            }
            total += row * r.scaled[i];
        }
        total / PI
    }
}

/// A holomorphic trial `Q(z)·exp(a z² + b z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloTrial {
    /// Family point this function represents, when built from one.
    pub params: Option<TrialParams>,
    /// Coefficients of `Q`, lowest degree first.
    pub poly: Vec<Complex64>,
    pub a: Complex64,
    pub b: Complex64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl HoloTrial {
    pub fn exp_quadratic(a: Complex64, b: Complex64) -> Result<Self> {
        let det = hessian_determinant(a);
        if !(det > 0.0) {
            return Err(Error::NotNormalizable(format!("det(M)={det} <= 0 for a={a}")));
        }
        Ok(HoloTrial { params: None, poly: vec![c(1.0)], a, b })
    }

    pub fn monomial(n: u32) -> Self {
        let mut poly = vec![c(0.0); n as usize + 1];
        poly[n as usize] = c(1.0);
        HoloTrial { params: None, poly, a: c(0.0), b: c(0.0) }
    }

    /// Bargmann function of a trial point (unnormalized).
    pub fn from_params(t: &TrialParams) -> Result<Self> {
        check_admissible(t).into_result()?;
        let mut h = match *t {
            TrialParams::PositionGaussian { alpha, beta } => {
                let s = (1.0 - alpha) / (2.0 * (1.0 + alpha));
                let b = std::f64::consts::SQRT_2 * alpha * beta / (1.0 + alpha);
                HoloTrial::exp_quadratic(c(s), c(b))?
            }
            TrialParams::Coherent { gamma } => HoloTrial::exp_quadratic(c(0.0), gamma)?,
            TrialParams::BargmannSqueezed { alpha } => HoloTrial::exp_quadratic(c(alpha), c(0.0))?,
            TrialParams::Monomial { n } => HoloTrial::monomial(n),
            TrialParams::DisplacedMonomial { n, gamma } => {
                // (z - conj γ)^n by the binomial theorem
                let shift = -gamma.conj();
                let n = n as usize;
                let mut binom = 1.0f64;
                let poly = (0..=n)
                    .map(|k| {
                        let term = binom * shift.powu((n - k) as u32);
                        binom = binom * (n - k) as f64 / (k + 1) as f64;
                        term
                    })
                    .collect();
                HoloTrial { params: None, poly, a: c(0.0), b: gamma }
            }
        };
        h.params = Some(*t);
        Ok(h)
    }

    fn with_poly(&self, poly: Vec<Complex64>) -> Self {
        HoloTrial { params: None, poly, a: self.a, b: self.b }
    }

    fn trimmed(mut poly: Vec<Complex64>) -> Vec<Complex64> {
        while poly.len() > 1 && poly.last().is_some_and(|v| *v == c(0.0)) {
            poly.pop();
        }
        poly
    }

    /// Multiplication by `z` (the creation operator).
    pub fn mul_z(&self) -> Self {
        let mut poly = vec![c(0.0)];
        poly.extend_from_slice(&self.poly);
        self.with_poly(Self::trimmed(poly))
    }

    /// `∂z` (the annihilation operator): `Q' + Q·(2az + b)`.
    pub fn d_z(&self) -> Self {
        let q = &self.poly;
        let mut out = vec![c(0.0); q.len() + 1];
        for (k, &ck) in q.iter().enumerate() {
            if k > 0 {
                out[k - 1] += ck * k as f64;
            }
            out[k] += ck * self.b;
            out[k + 1] += ck * 2.0 * self.a;
        }
        self.with_poly(Self::trimmed(out))
    }

    fn combine(&self, other: &Self, sa: Complex64, sb: Complex64) -> Self {
        let n = self.poly.len().max(other.poly.len());
        let poly = (0..n)
            .map(|k| {
                sa * self.poly.get(k).copied().unwrap_or_default()
                    + sb * other.poly.get(k).copied().unwrap_or_default()
            })
            .collect();
        self.with_poly(Self::trimmed(poly))
    }

    /// `x = (z + ∂z)/√2`.
    pub fn apply_x(&self) -> Self {
        self.mul_z().combine(&self.d_z(), c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2))
    }

    /// `p = (z - ∂z)/(i√2)`.
    pub fn apply_p(&self) -> Self {
        let k = Complex64::new(0.0, -FRAC_1_SQRT_2);
        self.mul_z().combine(&self.d_z(), k, -k)
    }

    pub fn apply_x_pow(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.apply_x())
    }

    pub fn apply(&self, obs: &Observable) -> Self {
        match obs {
            Observable::Number => self.d_z().mul_z(),
            Observable::X => self.apply_x(),
            Observable::X2 => self.apply_x_pow(2),
            Observable::X3 => self.apply_x_pow(3),
            Observable::X4 => self.apply_x_pow(4),
            Observable::XPow(k) => self.apply_x_pow(*k),
            Observable::P2 => self.apply_p().apply_p(),
            Observable::ModelHamiltonian(model) => {
                let mut acc = self.d_z().mul_z().combine(self, c(1.0), c(0.5));
                for (p, coef) in model.anharmonic_terms() {
                    acc = acc.combine(&self.apply_x_pow(p), c(1.0), c(coef));
                }
                acc
            }
        }
    }

    pub fn eval_poly(&self, z: Complex64) -> Complex64 {
        self.poly.iter().rev().fold(c(0.0), |acc, &k| acc * z + k)
    }

    pub fn exponent(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) * z
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_poly(z) * self.exponent(z).exp()
    }
}

/// Quadrature of `⟨f|g⟩` at a fixed order.
pub fn bargmann_inner(f: &HoloTrial, g: &HoloTrial, order: usize) -> Result<Complex64> {
    let grid = QuadratureGrid::new(order)?;
    Ok(inner_on(&grid, f, g))
}

fn inner_on(grid: &QuadratureGrid, f: &HoloTrial, g: &HoloTrial) -> Complex64 {
    grid.integrate(|z| {
        let pre = f.eval_poly(z).conj() * g.eval_poly(z);
        (pre, f.exponent(z).conj() + g.exponent(z))
    })
}

/// Observables with closed-form actions on holomorphic trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// `z∂z`
    Number,
    X,
    X2,
    X3,
    X4,
    P2,
    XPow(u32),
    /// Single-mode `z∂z + ½ + V_anh((z+∂z)/√2)`.
    ModelHamiltonian(ModelSpec),
}

/// A quadrature value with its order-doubling check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    /// Value at `2·order`.
    pub value: f64,
    /// Value at `order`.
    pub coarse: f64,
    pub order: usize,
    pub stable: bool,
}

impl QuadResult {
    fn from_pair(coarse: f64, value: f64, order: usize) -> Self {
        let stable = (value - coarse).abs() <= STABILITY_TOL * value.abs().max(1.0);
        QuadResult { value, coarse, order, stable }
    }
}

pub fn require_stable(r: &QuadResult, what: &str) -> Result<()> {
    if r.stable {
        Ok(())
    } else {
        Err(Error::NoConvergence(format!(
            "{what}: quadrature changed from {} to {} between orders {} and {}",
            r.coarse,
            r.value,
            r.order,
            2 * r.order
        )))
    }
}

fn check_order(order: usize) -> Result<()> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "quadrature order must lie in [{MIN_ORDER}, {MAX_ORDER}], got {order}"
        )));
    }
    Ok(())
}

fn expectation_on(grid: &QuadratureGrid, psi: &HoloTrial, o_psi: &HoloTrial) -> f64 {
    // same exponent on both sides: conj(E) + E = 2 Re E
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    let r = &grid.rule;
    for (i, &x) in r.nodes.iter().enumerate() {
        let (mut rn, mut rd) = (c(0.0), c(0.0));
        for (j, &y) in r.nodes.iter().enumerate() {
            let z = Complex64::new(x, y);
            let e = 2.0 * psi.exponent(z).re - (x * x + y * y);
            if e < -745.0 {
                continue;
            }
            let w = e.exp() * r.scaled[j];
            let p = psi.eval_poly(z).conj();
            rn += p * o_psi.eval_poly(z) * w;
            rd += p * psi.eval_poly(z) * w;
        }
        num += rn * r.scaled[i];
        den += rd * r.scaled[i];
    }
    (num / den).re
}

/// `⟨t|O|t⟩/⟨t|t⟩` at `order` and `2·order`.
pub fn bargmann_expectation(obs: &Observable, t: &TrialParams, order: usize) -> Result<QuadResult> {
    let psi = HoloTrial::from_params(t)?;
    holo_expectation(obs, &psi, order)
}

pub fn holo_expectation(obs: &Observable, psi: &HoloTrial, order: usize) -> Result<QuadResult> {
    check_order(order)?;
    let o_psi = psi.apply(obs);
    let coarse = expectation_on(&QuadratureGrid::new(order)?, psi, &o_psi);
    let fine = expectation_on(&QuadratureGrid::new(2 * order)?, psi, &o_psi);
    Ok(QuadResult::from_pair(coarse, fine, order))
}

/// Squared norm `⟨t|t⟩` with the doubling check.
pub fn norm_squared_quadrature(psi: &HoloTrial, order: usize) -> Result<QuadResult> {
    check_order(order)?;
    let coarse = inner_on(&QuadratureGrid::new(order)?, psi, psi).re;
    let fine = inner_on(&QuadratureGrid::new(2 * order)?, psi, psi).re;
    Ok(QuadResult::from_pair(coarse, fine, order))
}

/// `⟨x²⟩ - ⟨p²⟩` for the squeezed state `e^{αz²}`.
pub fn anisotropy_quadrature(alpha: f64, order: usize) -> Result<QuadResult> {
    let t = TrialParams::squeezed(alpha);
    let x2 = bargmann_expectation(&Observable::X2, &t, order)?;
    let p2 = bargmann_expectation(&Observable::P2, &t, order)?;
    Ok(QuadResult {
        value: x2.value - p2.value,
        coarse: x2.coarse - p2.coarse,
        order,
        stable: x2.stable && p2.stable,
    })
}
