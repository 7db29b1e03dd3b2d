//! Trial-wavefunction parameter sets and their admissibility.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One point of a trial family.
///
/// Position-space Gaussian: `ψ(x) ∝ exp(-α(x-β)²/2)`.
/// Holomorphic families are written as Bargmann functions of `z`:
/// coherent `e^{γz}`, squeezed `e^{αz²}`, monomial `zⁿ` and the displaced
/// Fock state `(z - γ̄)ⁿ e^{γz}` (which is the coherent state at `n = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum TrialParams {
    PositionGaussian {
        alpha: f64,
        beta: f64,
    },
    Coherent {
        #[serde(with = "complex_serde")]
        gamma: Complex64,
    },
    BargmannSqueezed {
        alpha: f64,
    },
    Monomial {
        n: u32,
    },
    DisplacedMonomial {
        n: u32,
        #[serde(with = "complex_serde")]
        gamma: Complex64,
    },
}

impl TrialParams {
    pub fn gaussian(alpha: f64) -> Self {
        TrialParams::PositionGaussian { alpha, beta: 0.0 }
    }

    pub fn coherent(gamma: f64) -> Self {
        TrialParams::Coherent { gamma: Complex64::new(gamma, 0.0) }
    }

    pub fn squeezed(alpha: f64) -> Self {
        TrialParams::BargmannSqueezed { alpha }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            TrialParams::PositionGaussian { .. } => "position_gaussian",
            TrialParams::Coherent { .. } => "coherent",
            TrialParams::BargmannSqueezed { .. } => "bargmann_squeezed",
            TrialParams::Monomial { .. } => "monomial",
            TrialParams::DisplacedMonomial { .. } => "displaced_monomial",
        }
    }

    /// Coherent displacement if this is a coherent state in disguise.
    pub fn as_coherent(&self) -> Option<Complex64> {
        match *self {
            TrialParams::Coherent { gamma } => Some(gamma),
            TrialParams::DisplacedMonomial { n: 0, gamma } => Some(gamma),
            _ => None,
        }
    }
}

/// `{"re": .., "im": ..}` encoding for complex numbers.
pub mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct ReIm {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        ReIm { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let v = ReIm::deserialize(d)?;
        Ok(Complex64::new(v.re, v.im))
    }
}

/// Admissibility verdict. `diagnostic` is set only when inadmissible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub admissible: bool,
    pub diagnostic: Option<String>,
}

impl Verdict {
    fn ok() -> Self {
        Verdict { admissible: true, diagnostic: None }
    }

    fn fail(msg: impl Into<String>) -> Self {
        Verdict { admissible: false, diagnostic: Some(msg.into()) }
    }

    pub fn into_result(self) -> Result<()> {
        match self.diagnostic {
            None => Ok(()),
            Some(d) => Err(Error::NotNormalizable(d)),
        }
    }
}

/// Real quadratic form of `|e^{αz²+βz}|² e^{-|z|²}` in `(x, y)`.
///
/// With `α = a + ib`, `β = c + i·dd` the exponent is `-uᵀMu + vᵀu` for
/// `M = [[1-2a, 2b], [2b, 1+2a]]` and `v = (2c, -2dd)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFormM {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub dd: f64,
}

impl QuadraticFormM {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        QuadraticFormM { a: alpha.re, b: alpha.im, c: beta.re, dd: beta.im }
    }

    pub fn m11(&self) -> f64 {
        1.0 - 2.0 * self.a
    }

    pub fn m12(&self) -> f64 {
        2.0 * self.b
    }

    pub fn m22(&self) -> f64 {
        1.0 + 2.0 * self.a
    }

    pub fn trace(&self) -> f64 {
        self.m11() + self.m22()
    }

    pub fn det(&self) -> f64 {
        1.0 - 4.0 * (self.a * self.a + self.b * self.b)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.det() > 0.0
    }

    pub fn v(&self) -> [f64; 2] {
        [2.0 * self.c, -2.0 * self.dd]
    }

    /// `¼ vᵀ M⁻¹ v`, the completed-square exponent.
    pub fn completed_square(&self) -> f64 {
        let [v1, v2] = self.v();
        let det = self.det();
        let q = self.m22() * v1 * v1 - 2.0 * self.m12() * v1 * v2 + self.m11() * v2 * v2;
        0.25 * q / det
    }
}

/// `det M = 1 - 4|α|²`; the linear coefficient never enters.
pub fn hessian_determinant(alpha: Complex64) -> f64 {
    1.0 - 4.0 * alpha.norm_sqr()
}

/// Admissibility of a trial point.
///
/// For complex squeezing, `Re(α e^{2iθ}) < ½ ∀θ` has supremum `|α|`, so it is
/// the same predicate as `|α| < ½`.
pub fn check_admissible(t: &TrialParams) -> Verdict {
    match *t {
        TrialParams::PositionGaussian { alpha, beta } => {
            if !(alpha > 0.0) || !alpha.is_finite() {
                Verdict::fail(format!("width must be positive (alpha={alpha})"))
            } else if !beta.is_finite() {
                Verdict::fail("displacement must be finite")
            } else {
                Verdict::ok()
            }
        }
        TrialParams::BargmannSqueezed { alpha } => {
            if !alpha.is_finite() {
                return Verdict::fail("squeeze coefficient must be finite");
            }
            let det = hessian_determinant(Complex64::new(alpha, 0.0));
            if det > 0.0 {
                Verdict::ok()
            } else {
                Verdict::fail(format!("det(M)={det} <= 0: |alpha| must be < 1/2"))
            }
        }
        TrialParams::Coherent { gamma } | TrialParams::DisplacedMonomial { gamma, .. } => {
            if gamma.re.is_finite() && gamma.im.is_finite() {
                Verdict::ok()
            } else {
                Verdict::fail("displacement must be finite")
            }
        }
        TrialParams::Monomial { .. } => Verdict::ok(),
    }
}

/// Closed-form squared Bargmann norm of `e^{αz²+βz}` for real `α`.
pub fn bargmann_norm_squared(alpha: f64, beta: Complex64) -> Result<f64> {
    bargmann_norm_squared_complex(Complex64::new(alpha, 0.0), beta)
}

/// `det(M)^{-1/2} exp(¼ vᵀM⁻¹v)` for complex `α`.
pub fn bargmann_norm_squared_complex(alpha: Complex64, beta: Complex64) -> Result<f64> {
    let form = QuadraticFormM::new(alpha, beta);
    let det = form.det();
    if !(det > 0.0) {
        return Err(Error::NotNormalizable(format!("det(M)={det} <= 0 for alpha={alpha}")));
    }
    Ok(form.completed_square().exp() / det.sqrt())
}

/// `r = atanh(2α)`, inverse of `α = ½ tanh r`.
pub fn squeeze_parameter(alpha: f64) -> Result<f64> {
    if !(alpha.abs() < 0.5) {
        return Err(Error::NotNormalizable(format!("|alpha| = {} must be < 1/2", alpha.abs())));
    }
    Ok((2.0 * alpha).atanh())
}
