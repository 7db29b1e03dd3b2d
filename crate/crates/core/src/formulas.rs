//! Printed closed-form energy functionals, moments and expansions, evaluated
//! exactly as typeset.
//!
//! Several of these are known to disagree with first-principles evaluation
//! (squeezed `⟨x²⟩`, coherent `⟨x³⟩`, the displaced-Gaussian cross term, the
//! anisotropy identity and some expansion coefficients). They are kept
//! verbatim on purpose; [`crate::validation`] measures the disagreement.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Couplings, Family, ModelSpec};
use crate::moments::odd_double_factorial_f64;
use crate::trial::{check_admissible, TrialParams};

/// One printed formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormulaId {
    GaussQuartic,
    GaussPower2n,
    GaussDim,
    CoherentQuartic,
    SqueezedQuartic,
    MonomialQuartic,
    DisplacedGaussianQuartic,
    DisplacedCoherentCubicQuartic,
    AnisotropyPaper,
    NormSquaredPaper,
    ExpansionGaussQuartic,
    ExpansionAlphaPower,
    ExpansionE0Power,
    ExpansionDisplaced,
}

impl FormulaId {
    pub const ALL: [FormulaId; 14] = [
        FormulaId::GaussQuartic,
        FormulaId::GaussPower2n,
        FormulaId::GaussDim,
        FormulaId::CoherentQuartic,
        FormulaId::SqueezedQuartic,
        FormulaId::MonomialQuartic,
        FormulaId::DisplacedGaussianQuartic,
        FormulaId::DisplacedCoherentCubicQuartic,
        FormulaId::AnisotropyPaper,
        FormulaId::NormSquaredPaper,
        FormulaId::ExpansionGaussQuartic,
        FormulaId::ExpansionAlphaPower,
        FormulaId::ExpansionE0Power,
        FormulaId::ExpansionDisplaced,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FormulaId::GaussQuartic => "GaussQuartic",
            FormulaId::GaussPower2n => "GaussPower2n",
            FormulaId::GaussDim => "GaussDim",
            FormulaId::CoherentQuartic => "CoherentQuartic",
            FormulaId::SqueezedQuartic => "SqueezedQuartic",
            FormulaId::MonomialQuartic => "MonomialQuartic",
            FormulaId::DisplacedGaussianQuartic => "DisplacedGaussianQuartic",
            FormulaId::DisplacedCoherentCubicQuartic => "DisplacedCoherentCubicQuartic",
            FormulaId::AnisotropyPaper => "AnisotropyPaper",
            FormulaId::NormSquaredPaper => "NormSquaredPaper",
            FormulaId::ExpansionGaussQuartic => "ExpansionGaussQuartic",
            FormulaId::ExpansionAlphaPower => "ExpansionAlphaPower",
            FormulaId::ExpansionE0Power => "ExpansionE0Power",
            FormulaId::ExpansionDisplaced => "ExpansionDisplaced",
        }
    }

    pub fn is_energy(&self) -> bool {
        !matches!(self, FormulaId::AnisotropyPaper | FormulaId::NormSquaredPaper) && !self.is_expansion()
    }

    pub fn is_expansion(&self) -> bool {
        matches!(
            self,
            FormulaId::ExpansionGaussQuartic
                | FormulaId::ExpansionAlphaPower
                | FormulaId::ExpansionE0Power
                | FormulaId::ExpansionDisplaced
        )
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormulaId::ALL
            .iter()
            .copied()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown formula id '{s}'")))
    }
}

fn mismatch(id: FormulaId, reason: impl Into<String>) -> Error {
    Error::FormulaMismatch { formula: id.name().to_string(), reason: reason.into() }
}

/// `λ` for the quartic formulas; the harmonic model counts as `λ = 0`.
fn quartic_lambda(id: FormulaId, model: &ModelSpec) -> Result<f64> {
    match model.family() {
        Family::Harmonic => Ok(0.0),
        Family::Quartic => Ok(model.lambda()),
        other => Err(mismatch(id, format!("needs a quartic model, got {other}"))),
    }
}

/// `(n, λ)` for the `x^{2n}` formulas.
fn power_couplings(id: FormulaId, model: &ModelSpec) -> Result<(u32, f64)> {
    match model.family() {
        Family::Harmonic => Ok((2, 0.0)),
        Family::Quartic => Ok((2, model.lambda())),
        Family::Power2n => Ok((model.n(), model.lambda())),
        other => Err(mismatch(id, format!("needs an even power model, got {other}"))),
    }
}

fn centered_width(id: FormulaId, t: &TrialParams) -> Result<f64> {
    match *t {
        TrialParams::PositionGaussian { alpha, beta: 0.0 } => Ok(alpha),
        TrialParams::PositionGaussian { .. } => Err(mismatch(id, "formula is for a centered Gaussian (beta = 0)")),
        _ => Err(mismatch(id, format!("needs a position Gaussian, got {}", t.family_name()))),
    }
}

fn real_coherent(id: FormulaId, t: &TrialParams) -> Result<f64> {
    match t.as_coherent() {
        Some(g) if g.im == 0.0 => Ok(g.re),
        Some(_) => Err(mismatch(id, "printed functional assumes real gamma")),
        None => Err(mismatch(id, format!("needs a coherent state, got {}", t.family_name()))),
    }
}

/// `α/4 + 1/(4α) + λ(2n-1)!!/(2α)ⁿ`.
fn gauss_power_energy(alpha: f64, n: u32, lambda: f64) -> f64 {
    alpha / 4.0 + 1.0 / (4.0 * alpha) + lambda * odd_double_factorial_f64(n) / (2.0 * alpha).powi(n as i32)
}

/// `n + ½ + (3λ/4)(2n² + 2n + 1)`.
pub fn monomial_printed_energy(n: u32, lambda: f64) -> f64 {
    let nf = n as f64;
    nf + 0.5 + 0.75 * lambda * (2.0 * nf * nf + 2.0 * nf + 1.0)
}

/// Printed single-mode (or, for `GaussDim`, total) energy functional.
pub fn paper_energy(id: FormulaId, t: &TrialParams, model: &ModelSpec) -> Result<f64> {
    check_admissible(t).into_result()?;
    match id {
        FormulaId::GaussQuartic => {
            let alpha = centered_width(id, t)?;
            let lambda = quartic_lambda(id, model)?;
            Ok(alpha / 4.0 + 1.0 / (4.0 * alpha) + 3.0 * lambda / (4.0 * alpha * alpha))
        }
        FormulaId::GaussPower2n => {
            let alpha = centered_width(id, t)?;
            let (n, lambda) = power_couplings(id, model)?;
            Ok(gauss_power_energy(alpha, n, lambda))
        }
        FormulaId::GaussDim => {
            let alpha = centered_width(id, t)?;
            let (n, lambda) = power_couplings(id, model)?;
            Ok(model.d() as f64 * gauss_power_energy(alpha, n, lambda))
        }
        FormulaId::CoherentQuartic => {
            let g = real_coherent(id, t)?;
            let lambda = quartic_lambda(id, model)?;
            let g2 = g * g;
            Ok(g2 + 0.5 + lambda * (4.0 * g2 * g2 + 6.0 * g2 + 0.75))
        }
        FormulaId::SqueezedQuartic => {
            let TrialParams::BargmannSqueezed { alpha } = *t else {
                return Err(mismatch(id, format!("needs a squeezed state, got {}", t.family_name())));
            };
            let lambda = quartic_lambda(id, model)?;
            let q = squeeze_ratio(alpha);
            Ok(0.5 * q + lambda * 0.75 * q * q)
        }
        FormulaId::MonomialQuartic => {
            let TrialParams::Monomial { n } = *t else {
                return Err(mismatch(id, format!("needs a monomial, got {}", t.family_name())));
            };
            Ok(monomial_printed_energy(n, quartic_lambda(id, model)?))
        }
        FormulaId::DisplacedGaussianQuartic => {
            let TrialParams::PositionGaussian { alpha, beta } = *t else {
                return Err(mismatch(id, format!("needs a position Gaussian, got {}", t.family_name())));
            };
            let lambda = quartic_lambda(id, model)?;
            let b2 = beta * beta;
            Ok(alpha / 4.0
                + 1.0 / (4.0 * alpha)
                + 0.5 * b2
                + lambda * (3.0 / (4.0 * alpha * alpha) + 3.0 * b2 / (2.0 * alpha) + b2 * b2))
        }
        FormulaId::DisplacedCoherentCubicQuartic => {
            let g = real_coherent(id, t)?;
            if model.family() != Family::CubicQuartic {
                return Err(mismatch(id, format!("needs a cubic-quartic model, got {}", model.family())));
            }
            Ok(displaced_coherent_printed(g, model.lambda(), model.mu()))
        }
        other => Err(mismatch(other, "not an energy functional")),
    }
}

/// `γ² + ½ + λ(2√2γ³ + 3√2γ) + μ(4γ⁴ + 6γ² + ¾)` for real `γ`.
pub fn displaced_coherent_printed(g: f64, lambda: f64, mu: f64) -> f64 {
    let g2 = g * g;
    g2 + 0.5 + lambda * (2.0 * SQRT_2 * g2 * g + 3.0 * SQRT_2 * g) + mu * (4.0 * g2 * g2 + 6.0 * g2 + 0.75)
}

fn squeeze_ratio(alpha: f64) -> f64 {
    let a2 = 4.0 * alpha * alpha;
    (1.0 + a2) / (1.0 - a2)
}

fn require_squeezable(id: FormulaId, alpha: f64) -> Result<()> {
    if alpha.abs() < 0.5 {
        Ok(())
    } else {
        Err(Error::NotNormalizable(format!("{id}: |alpha| = {} must be < 1/2", alpha.abs())))
    }
}

/// Printed `⟨x²⟩ - ⟨p²⟩ = 8α²/(1 - 16α⁴)`.
pub fn paper_anisotropy(alpha: f64) -> Result<f64> {
    require_squeezable(FormulaId::AnisotropyPaper, alpha)?;
    let a2 = alpha * alpha;
    Ok(8.0 * a2 / (1.0 - 16.0 * a2 * a2))
}

/// Printed squeezed norm `(1 - 4α²)^{-1/2}`.
pub fn paper_norm_squared(alpha: f64) -> Result<f64> {
    require_squeezable(FormulaId::NormSquaredPaper, alpha)?;
    Ok((1.0 - 4.0 * alpha * alpha).powf(-0.5))
}

/// Printed squeezed-state moments.
pub mod squeezed {
    use super::*;

    /// `⟨z∂z⟩ = 4α²/(1 - 4α²)`
    pub fn number(alpha: f64) -> Result<f64> {
        require_squeezable(FormulaId::SqueezedQuartic, alpha)?;
        let a2 = 4.0 * alpha * alpha;
        Ok(a2 / (1.0 - a2))
    }

    /// `½(1 + 4α²)/(1 - 4α²)`
    pub fn x2(alpha: f64) -> Result<f64> {
        require_squeezable(FormulaId::SqueezedQuartic, alpha)?;
        Ok(0.5 * squeeze_ratio(alpha))
    }

    /// `¾((1 + 4α²)/(1 - 4α²))²`
    pub fn x4(alpha: f64) -> Result<f64> {
        require_squeezable(FormulaId::SqueezedQuartic, alpha)?;
        let q = squeeze_ratio(alpha);
        Ok(0.75 * q * q)
    }
}

/// Printed coherent-state moments for real `γ`.
pub mod coherent {
    use super::SQRT_2;

    pub fn x(g: f64) -> f64 {
        SQRT_2 * g
    }

    pub fn x2(g: f64) -> f64 {
        2.0 * g * g + 0.5
    }

    /// `2√2γ³ + 3√2γ`
    pub fn x3(g: f64) -> f64 {
        2.0 * SQRT_2 * g * g * g + 3.0 * SQRT_2 * g
    }

    pub fn x4(g: f64) -> f64 {
        let g2 = g * g;
        4.0 * g2 * g2 + 6.0 * g2 + 0.75
    }
}

/// Printed truncated series.
pub fn paper_expansion(id: FormulaId, couplings: &Couplings) -> Result<f64> {
    let Couplings { lambda, mu, n } = *couplings;
    match id {
        FormulaId::ExpansionGaussQuartic => Ok(0.5 + 0.75 * lambda - 21.0 / 8.0 * lambda * lambda),
        FormulaId::ExpansionAlphaPower => {
            let nf = n as f64;
            Ok(1.0 - nf * (2.0 * nf - 1.0) * lambda)
        }
        FormulaId::ExpansionE0Power => Ok(0.5 + lambda * odd_double_factorial_f64(n) / 2f64.powi(n as i32)),
        FormulaId::ExpansionDisplaced => Ok(0.5 + 0.75 * mu - 2.25 * lambda * lambda),
        other => Err(mismatch(other, "not a series expansion")),
    }
}

/// Printed leading displacement `γ_opt ≈ -(3/2)λ`.
pub fn printed_displacement_estimate(lambda: f64) -> f64 {
    -1.5 * lambda
}

/// A single printed series coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrintedCoefficient {
    pub formula: FormulaId,
    /// `a0`, `a1`, `a2`, `width_slope` or `displacement_slope`.
    pub quantity: &'static str,
    /// `headline` for the summary statement, `derivation` for the worked steps.
    pub source: &'static str,
    pub value: f64,
}

/// Every printed coefficient belonging to an expansion id.
pub fn printed_coefficients(id: FormulaId, couplings: &Couplings) -> Vec<PrintedCoefficient> {
    let pc = |quantity, source, value| PrintedCoefficient { formula: id, quantity, source, value };
    let nf = couplings.n as f64;
    match id {
        FormulaId::ExpansionGaussQuartic => vec![
            pc("a1", "headline", 0.75),
            pc("a2", "headline", -21.0 / 8.0),
            pc("a2", "derivation", -9.0 / 8.0),
            pc("width_slope", "derivation", 1.5),
        ],
        FormulaId::ExpansionAlphaPower => vec![pc("width_slope", "headline", -nf * (2.0 * nf - 1.0))],
        FormulaId::ExpansionE0Power => vec![pc(
            "a1",
            "headline",
            odd_double_factorial_f64(couplings.n) / 2f64.powi(couplings.n as i32),
        )],
        FormulaId::ExpansionDisplaced => vec![
            pc("a0", "headline", 0.5 + 0.75 * couplings.mu),
            pc("a2", "headline", -2.25),
            pc("displacement_slope", "headline", -1.5),
        ],
        _ => vec![],
    }
}
