//! Oscillator Hamiltonians.
//!
//! Every model is `H = -½ d²/dx² + ½x² + (anharmonic terms)` per coordinate,
//! in units ħ = m = ω = 1. A `d`-dimensional model is the sum of `d`
//! identical single-mode Hamiltonians.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Potential family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Harmonic,
    Quartic,
    /// `½x² + λx^{2n}`
    Power2n,
    /// `½x² + λx³ + μx⁴`
    CubicQuartic,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Harmonic => "harmonic",
            Family::Quartic => "quartic",
            Family::Power2n => "power2n",
            Family::CubicQuartic => "cubic-quartic",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "harmonic" => Ok(Family::Harmonic),
            "quartic" => Ok(Family::Quartic),
            "power2n" | "power" | "power-2n" => Ok(Family::Power2n),
            "cubic-quartic" | "cubicquartic" | "cubic_quartic" => Ok(Family::CubicQuartic),
            other => Err(Error::InvalidModel(format!("unknown model family '{other}'"))),
        }
    }
}

/// Raw couplings handed to [`make_model`]. Entries a family does not use are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub lambda: f64,
    pub mu: f64,
    pub n: u32,
}

impl Default for Couplings {
    fn default() -> Self {
        Couplings { lambda: 0.0, mu: 0.0, n: 2 }
    }
}

impl Couplings {
    pub fn lambda(lambda: f64) -> Self {
        Couplings { lambda, ..Default::default() }
    }
}

/// A validated oscillator Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct ModelSpec {
    family: Family,
    lambda: f64,
    mu: f64,
    n: u32,
    d: u32,
}

/// Flat JSON shape of a [`ModelSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelRepr {
    family: Family,
    #[serde(default)]
    lambda: f64,
    #[serde(default)]
    mu: f64,
    #[serde(default)]
    n: Option<u32>,
    #[serde(default = "one")]
    d: u32,
}

fn one() -> u32 {
    1
}

impl TryFrom<ModelRepr> for ModelSpec {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        let couplings = Couplings { lambda: r.lambda, mu: r.mu, n: r.n.unwrap_or(2) };
        make_model(r.family, couplings, r.d)
    }
}

impl From<ModelSpec> for ModelRepr {
    fn from(m: ModelSpec) -> Self {
        ModelRepr {
            family: m.family,
            lambda: m.lambda,
            mu: m.mu,
            n: (m.family == Family::Power2n).then_some(m.n),
            d: m.d,
        }
    }
}

/// Build a validated model.
///
/// Quartic and power couplings must be non-negative (zero degrades to the
/// harmonic oscillator). The cubic coefficient of `CubicQuartic` may have
/// either sign but its quartic coefficient must be strictly positive,
/// otherwise the spectrum is unbounded below.
pub fn make_model(family: Family, couplings: Couplings, d: u32) -> Result<ModelSpec> {
    if d < 1 {
        return Err(Error::InvalidModel(format!("dimension must be >= 1, got {d}")));
    }
    let Couplings { lambda, mu, n } = couplings;
    if !lambda.is_finite() || !mu.is_finite() {
        return Err(Error::InvalidModel("couplings must be finite".into()));
    }
    let spec = match family {
        Family::Harmonic => ModelSpec { family, lambda: 0.0, mu: 0.0, n: 1, d },
        Family::Quartic => {
            if lambda < 0.0 {
                return Err(Error::InvalidModel(format!("quartic coupling must be >= 0, got {lambda}")));
            }
            ModelSpec { family, lambda, mu: 0.0, n: 2, d }
        }
        Family::Power2n => {
            if n < 2 {
                return Err(Error::InvalidModel(format!("power index n must be >= 2, got {n}")));
            }
            if lambda < 0.0 {
                return Err(Error::InvalidModel(format!("power coupling must be >= 0, got {lambda}")));
            }
            ModelSpec { family, lambda, mu: 0.0, n, d }
        }
        Family::CubicQuartic => {
            if mu <= 0.0 {
                return Err(Error::InvalidModel(format!(
                    "cubic-quartic needs mu > 0 (spectrum unbounded below), got {mu}"
                )));
            }
            ModelSpec { family, lambda, mu, n: 2, d }
        }
    };
    Ok(spec)
}

impl ModelSpec {
    pub fn harmonic() -> Self {
        ModelSpec { family: Family::Harmonic, lambda: 0.0, mu: 0.0, n: 1, d: 1 }
    }

    pub fn quartic(lambda: f64) -> Result<Self> {
        make_model(Family::Quartic, Couplings::lambda(lambda), 1)
    }

    pub fn power(n: u32, lambda: f64) -> Result<Self> {
        make_model(Family::Power2n, Couplings { lambda, mu: 0.0, n }, 1)
    }

    pub fn cubic_quartic(lambda: f64, mu: f64) -> Result<Self> {
        make_model(Family::CubicQuartic, Couplings { lambda, mu, n: 2 }, 1)
    }

    /// Same Hamiltonian in `d` dimensions.
    pub fn with_dim(self, d: u32) -> Result<Self> {
        make_model(self.family, self.couplings(), d)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Power index; meaningful for `Power2n` (2 for the quartic families).
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn couplings(&self) -> Couplings {
        Couplings { lambda: self.lambda, mu: self.mu, n: self.n.max(2) }
    }

    /// Anharmonic part as `(power, coefficient)` pairs, zero coefficients dropped.
    pub fn anharmonic_terms(&self) -> Vec<(u32, f64)> {
        let terms = match self.family {
            Family::Harmonic => vec![],
            Family::Quartic => vec![(4, self.lambda)],
            Family::Power2n => vec![(2 * self.n, self.lambda)],
            Family::CubicQuartic => vec![(3, self.lambda), (4, self.mu)],
        };
        terms.into_iter().filter(|&(_, c)| c != 0.0).collect()
    }

    /// Highest power of x present in the potential (2 for the harmonic case).
    pub fn max_power(&self) -> u32 {
        self.anharmonic_terms().iter().map(|&(p, _)| p).max().unwrap_or(2)
    }

    /// Whether `V(x) = V(-x)`.
    pub fn is_even(&self) -> bool {
        self.anharmonic_terms().iter().all(|&(p, _)| p % 2 == 0)
    }
}

/// Single-coordinate potential `V(x)`; callers sum over coordinates.
pub fn potential_value(model: &ModelSpec, x: f64) -> f64 {
    let mut v = 0.5 * x * x;
    for (p, c) in model.anharmonic_terms() {
        v += c * x.powi(p as i32);
    }
    v
}

/// Total energy of a product state in `d` dimensions.
pub fn dimension_total_energy(d: u32, e1: f64) -> f64 {
    d as f64 * e1
}

/// Restores physical units for the harmonic solution.
///
/// All functionals are written with ħ = m = ω = 1. A dimensionless Gaussian
/// width α maps to `(mω/ħ)·α` and a dimensionless energy to `ħω·E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorUnits {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl OscillatorUnits {
    pub fn width(&self, alpha: f64) -> f64 {
        self.mass * self.omega / self.hbar * alpha
    }

    pub fn energy(&self, e: f64) -> f64 {
        self.hbar * self.omega * e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn make_model_examples() {
        assert!(make_model(Family::Harmonic, Couplings::default(), 1).is_ok());
        assert!(make_model(Family::Quartic, Couplings::lambda(0.1), 1).is_ok());
        let err = make_model(Family::CubicQuartic, Couplings { lambda: 0.05, mu: 0.0, n: 2 }, 1);
        assert!(matches!(err, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn make_model_rejections() {
        assert!(make_model(Family::Power2n, Couplings { lambda: 0.1, mu: 0.0, n: 1 }, 1).is_err());
        assert!(make_model(Family::Quartic, Couplings::lambda(0.1), 0).is_err());
        assert!(make_model(Family::Quartic, Couplings::lambda(-0.1), 1).is_err());
        assert!(make_model(Family::CubicQuartic, Couplings { lambda: 0.1, mu: -1.0, n: 2 }, 1).is_err());
        assert!(make_model(Family::Quartic, Couplings::lambda(f64::NAN), 1).is_err());
    }

    #[test]
    fn potential_examples() {
        assert_eq!(potential_value(&ModelSpec::harmonic(), 2.0), 2.0);
        assert!((potential_value(&ModelSpec::quartic(0.1).unwrap(), 1.0) - 0.6).abs() < 1e-15);
        let cq = ModelSpec::cubic_quartic(1.0, 1.0).unwrap();
        assert_eq!(potential_value(&cq, -1.0), 0.5);
        let p3 = ModelSpec::power(3, 0.5).unwrap();
        assert_eq!(potential_value(&p3, 2.0), 2.0 + 0.5 * 64.0);
    }

    #[test]
    fn zero_coupling_is_harmonic() {
        let q = ModelSpec::quartic(0.0).unwrap();
        assert!(q.anharmonic_terms().is_empty());
        assert_eq!(potential_value(&q, 1.7), potential_value(&ModelSpec::harmonic(), 1.7));
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dimension_total_energy(1, 0.5), 0.5);
        assert_eq!(dimension_total_energy(3, 0.5), 1.5);
        assert!((dimension_total_energy(2, 0.575) - 1.15).abs() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let m = ModelSpec::power(3, 0.05).unwrap();
        let v = serde_json::to_value(m).unwrap();
        assert_eq!(v["family"], "power2n");
        assert_eq!(v["n"], 3);
        assert_eq!(v["mu"], 0.0);
        let q = serde_json::to_value(ModelSpec::quartic(0.1).unwrap()).unwrap();
        assert!(q["n"].is_null());
        let back: ModelSpec = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
        let bad = serde_json::json!({"family": "cubic-quartic", "lambda": 0.1, "mu": 0.0, "d": 1});
        assert!(serde_json::from_value::<ModelSpec>(bad).is_err());
    }

    #[test]
    fn units_scale_map() {
        let u = OscillatorUnits { mass: 2.0, omega: 3.0, hbar: 0.5 };
        assert_eq!(u.width(1.0), 12.0);
        assert_eq!(u.energy(0.5), 0.75);
    }

    proptest! {
        #[test]
        fn parity_matches_family(x in -5.0f64..5.0, lam in -1.0f64..1.0, mu in 0.01f64..1.0) {
            let q = ModelSpec::quartic(lam.abs()).unwrap();
            prop_assert_eq!(potential_value(&q, x), potential_value(&q, -x));
            let p = ModelSpec::power(3, lam.abs()).unwrap();
            prop_assert_eq!(potential_value(&p, x), potential_value(&p, -x));
            let cq = ModelSpec::cubic_quartic(lam, mu).unwrap();
            let symmetric = potential_value(&cq, x) == potential_value(&cq, -x);
            prop_assert_eq!(symmetric, lam == 0.0 || x == 0.0);
            prop_assert_eq!(cq.is_even(), lam == 0.0);
        }

        #[test]
        fn dimension_rule_is_linear(d in 1u32..10, e in -10.0f64..10.0) {
            prop_assert_eq!(dimension_total_energy(d, e), d as f64 * dimension_total_energy(1, e));
        }
    }
}
