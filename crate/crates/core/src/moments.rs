//! First-principles position moments and trial energies.
//!
//! Gaussian states go through the Isserlis recursion. Fock states go through
//! exact ladder algebra ([`crate::ritz::fock_expectation`]). Squeezed and
//! displaced Fock states with `n ≥ 1` are handed to the quadrature engine.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::quadrature::{self, Observable};
use crate::ritz;
use crate::trial::{check_admissible, TrialParams};

/// `m!! = m(m-2)…1` for odd `m ≥ -1`; `(-1)!! = 1`.
pub fn double_factorial(m: i64) -> Result<u128> {
    if m < -1 || m % 2 == 0 {
        return Err(Error::InvalidParameter(format!("double factorial needs odd m >= -1, got {m}")));
    }
    let mut acc: u128 = 1;
    let mut k = m;
    while k > 1 {
        acc = acc
            .checked_mul(k as u128)
            .ok_or_else(|| Error::InvalidParameter(format!("{m}!! overflows u128")))?;
        k -= 2;
    }
    Ok(acc)
}

/// `(2n-1)!!` as a float, for moment formulas.
pub fn odd_double_factorial_f64(n: u32) -> f64 {
    (1..=n).map(|j| (2 * j - 1) as f64).product()
}

/// A one-dimensional Gaussian probability density in position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianState1D {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianState1D {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() || !mean.is_finite() {
            return Err(Error::InvalidParameter(format!("variance must be positive, got {variance}")));
        }
        Ok(GaussianState1D { mean, variance })
    }

    pub fn centered(variance: f64) -> Result<Self> {
        Self::new(0.0, variance)
    }
}

/// Raw moment `⟨x^k⟩` via `m_k = mean·m_{k-1} + (k-1)·var·m_{k-2}`.
pub fn gaussian_moment(g: &GaussianState1D, k: u32) -> f64 {
    let (mut prev, mut cur) = (1.0, g.mean);
    if k == 0 {
        return 1.0;
    }
    for j in 2..=k {
        let next = g.mean * cur + (j - 1) as f64 * g.variance * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Gaussian position density of a trial state, when it has one in closed form.
///
/// The position Gaussian has mean β and variance 1/(2α); a coherent state
/// `e^{γz}` has mean √2·Re γ and variance ½; the squeezed `e^{αz²}` is
/// centered with variance ½(1+2α)/(1-2α).
pub fn gaussian_state(t: &TrialParams) -> Option<GaussianState1D> {
    match *t {
        TrialParams::PositionGaussian { alpha, beta } if alpha > 0.0 => {
            Some(GaussianState1D { mean: beta, variance: 0.5 / alpha })
        }
        TrialParams::BargmannSqueezed { alpha } if alpha.abs() < 0.5 => {
            Some(GaussianState1D { mean: 0.0, variance: 0.5 * (1.0 + 2.0 * alpha) / (1.0 - 2.0 * alpha) })
        }
        _ => t.as_coherent().map(|g| GaussianState1D {
            mean: std::f64::consts::SQRT_2 * g.re,
            variance: 0.5,
        }),
    }
}

/// `⟨p²⟩` of a Gaussian trial state.
fn gaussian_p2(t: &TrialParams) -> Option<f64> {
    match *t {
        TrialParams::PositionGaussian { alpha, .. } => Some(0.5 * alpha),
        TrialParams::BargmannSqueezed { alpha } => Some(0.5 * (1.0 - 2.0 * alpha) / (1.0 + 2.0 * alpha)),
        _ => t.as_coherent().map(|g| 2.0 * g.im * g.im + 0.5),
    }
}

/// `⟨n|x⁴|n⟩ = (6n² + 6n + 3)/4`.
pub fn monomial_x4_moment(n: u32) -> f64 {
    let n = n as f64;
    (6.0 * n * n + 6.0 * n + 3.0) / 4.0
}

/// Position moment `⟨x^k⟩` of the state represented by `t`.
pub fn trial_moment(t: &TrialParams, k: u32) -> Result<f64> {
    check_admissible(t).into_result()?;
    if let Some(g) = gaussian_state(t) {
        return Ok(gaussian_moment(&g, k));
    }
    match *t {
        TrialParams::Monomial { n } => match k {
            0 => Ok(1.0),
            _ if k % 2 == 1 => Ok(0.0),
            2 => Ok(n as f64 + 0.5),
            4 => Ok(monomial_x4_moment(n)),
            _ => Err(Error::Unsupported(format!(
                "closed-form monomial moment only for k <= 4 (asked k={k})"
            ))),
        },
        TrialParams::DisplacedMonomial { .. } => {
            let r = quadrature::bargmann_expectation(&Observable::XPow(k), t, quadrature::DEFAULT_ORDER)?;
            quadrature::require_stable(&r, "trial moment")?;
            Ok(r.value)
        }
        _ => unreachable!("gaussian families handled above"),
    }
}

/// Single-mode energy `⟨H⟩` of a trial state, from first principles.
pub fn trial_energy(model: &ModelSpec, t: &TrialParams) -> Result<f64> {
    check_admissible(t).into_result()?;
    if let (Some(g), Some(p2)) = (gaussian_state(t), gaussian_p2(t)) {
        let x2 = gaussian_moment(&g, 2);
        let mut e = 0.5 * p2 + 0.5 * x2;
        for (p, c) in model.anharmonic_terms() {
            e += c * gaussian_moment(&g, p);
        }
        return Ok(e);
    }
    match *t {
        TrialParams::Monomial { n } => ritz::fock_expectation(model, n as usize),
        _ => {
            let obs = Observable::ModelHamiltonian(*model);
            let r = quadrature::bargmann_expectation(&obs, t, quadrature::DEFAULT_ORDER)?;
            quadrature::require_stable(&r, "trial energy")?;
            Ok(r.value)
        }
    }
}
