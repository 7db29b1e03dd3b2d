//! Stationarity solvers, scalar and alternating minimizers, series fits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::{self, FormulaId};
use crate::models::{Family, ModelSpec};
use crate::moments::{odd_double_factorial_f64, trial_energy};
use crate::trial::TrialParams;

pub const PARAM_TOL: f64 = 1e-10;
pub const GRAD_TOL: f64 = 1e-9;
pub const MAX_ITER: usize = 200;
const SCAN_POINTS: usize = 25;
const GOLDEN: f64 = 0.381_966_011_250_105_2; // (3 - √5)/2

/// Positive root of `α³ - α - 6λ = 0`.
///
/// For `9λ² ≥ 1/27` the surd form is used with the second cube root written
/// as `1/(3u)` to avoid cancellation; below that both surd arguments are
/// complex and the trigonometric form gives the real root.
pub fn cardano_root(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "cardano_root needs lambda > 0 (got {lambda}); use alpha = 1 at lambda = 0"
        )));
    }
    let disc = 9.0 * lambda * lambda - 1.0 / 27.0;
    let mut a = if disc >= 0.0 {
        let u = (3.0 * lambda + disc.sqrt()).cbrt();
        u + 1.0 / (3.0 * u)
    } else {
        let arg = (9.0 * 3f64.sqrt() * lambda).clamp(-1.0, 1.0);
        2.0 / 3f64.sqrt() * (arg.acos() / 3.0).cos()
    };
    // one Newton step cleans up the last ulps
    let f = a * a * a - a - 6.0 * lambda;
    a -= f / (3.0 * a * a - 1.0);
    Ok(a)
}

/// Plain bisection root of the same cubic on `[1, hi]`; reference for tests.
pub fn cubic_bisection(lambda: f64) -> f64 {
    let f = |a: f64| a * a * a - a - 6.0 * lambda;
    let (mut lo, mut hi) = (1.0, 2.0f64);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Gaussian energy `α/4 + 1/(4α) + λ(2n-1)!!/(2α)ⁿ` and its α-derivative.
pub fn power_energy(alpha: f64, n: u32, lambda: f64) -> (f64, f64) {
    let c = odd_double_factorial_f64(n);
    let e = alpha / 4.0 + 1.0 / (4.0 * alpha) + lambda * c / (2.0 * alpha).powi(n as i32);
    let de = 0.25 - 1.0 / (4.0 * alpha * alpha)
        - n as f64 * lambda * c / (2f64.powi(n as i32) * alpha.powi(n as i32 + 1));
    (e, de)
}

/// Stationary widths of the Gaussian `x^{2n}` functional.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryWidth {
    pub alpha: f64,
    pub energy: f64,
    /// All positive stationary points found in the bracket.
    pub roots: Vec<f64>,
    pub bracket: [f64; 2],
}

/// Global minimizer of the Gaussian `x^{2n}` functional over `α > 0`.
pub fn stationary_width(n: u32, lambda: f64) -> Result<f64> {
    Ok(stationary_width_detailed(n, lambda)?.alpha)
}

pub fn stationary_width_detailed(n: u32, lambda: f64) -> Result<StationaryWidth> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("power index n must be >= 2, got {n}")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("stationary_width needs lambda > 0, got {lambda}")));
    }
    let c = odd_double_factorial_f64(n);
    let lo = 1.0;
    let mut hi = 1.0
        + (6.0 * lambda).cbrt()
        + (2f64.powi(n as i32) * n as f64 * lambda * c).powf(1.0 / (n as f64 + 1.0))
        + 1.0;
    let d = |a: f64| power_energy(a, n, lambda).1;
    // dE/dα < 0 on (0, 1], so every stationary point lies above 1
    let mut expansions = 0;
    while d(hi) <= 0.0 {
        if expansions == 8 {
            return Err(Error::Bracket(format!(
                "dE/dalpha still negative at alpha = {hi} (n={n}, lambda={lambda})"
            )));
        }
        hi *= 2.0;
        expansions += 1;
    }
    let steps = 400;
    let mut roots = Vec::new();
    let mut minima = Vec::new();
    let mut prev = (lo, d(lo));
    for i in 1..=steps {
        let x = lo + (hi - lo) * i as f64 / steps as f64;
        let dx = d(x);
        if prev.1 < 0.0 && dx >= 0.0 {
            let r = bisect(&d, prev.0, x);
            roots.push(r);
            minima.push(r);
        } else if prev.1 > 0.0 && dx <= 0.0 {
            roots.push(bisect(&d, prev.0, x));
        }
        prev = (x, dx);
    }
    let best = minima
        .iter()
        .map(|&a| (a, power_energy(a, n, lambda).0))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .ok_or_else(|| Error::Bracket(format!("no stationary minimum in [{lo}, {hi}]")))?;
    Ok(StationaryWidth { alpha: best.0, energy: best.1, roots, bracket: [lo, hi] })
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Result of a one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarMinimum {
    pub x: f64,
    pub value: f64,
    /// Central-difference slope at `x`.
    pub gradient: f64,
    pub iterations: usize,
    pub bracket: [f64; 2],
    /// Interior local minima seen on the initial scan.
    pub local_minima: usize,
}

/// Golden-section search with a parabolic polish.
///
/// A 25-point scan locates the best grid point; if it sits on an end of the
/// bracket the function is taken to be monotone there and an error returned.
pub fn minimize_scalar(f: &dyn Fn(f64) -> f64, bracket: (f64, f64), tol: f64) -> Result<ScalarMinimum> {
    let (lo, hi) = bracket;
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Bracket(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let xs: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    if let Some(bad) = fs.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("objective is not finite at x = {}", xs[bad])));
    }
    let mut best = 0;
    for i in 1..SCAN_POINTS {
        if fs[i] < fs[best] {
            best = i;
        }
    }
    if best == 0 || best == SCAN_POINTS - 1 {
        return Err(Error::MonotoneOnBracket { lo, hi });
    }
    let local_minima = (1..SCAN_POINTS - 1).filter(|&i| fs[i] <= fs[i - 1] && fs[i] < fs[i + 1]).count();

    let (mut a, mut b) = (xs[best - 1], xs[best + 1]);
    let mut x1 = a + GOLDEN * (b - a);
    let mut x2 = b - GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut iterations = 0;
    while (b - a) > tol * 0.5 * (1.0 + xs[best].abs()) && iterations < MAX_ITER {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - GOLDEN * (b - a);
            f2 = f(x2);
        }
        iterations += 1;
    }
    let (mut x, mut fx) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    if fs[best] < fx {
        x = xs[best];
        fx = fs[best];
    }

    // golden section stalls near √ε; parabolic steps with shrinking h finish the job
    for scale in [1e-4, 1e-5, 1e-6] {
        let h = scale * x.abs().max(1.0);
        let (fm, fp) = (f(x - h), f(x + h));
        let curv = fp - 2.0 * fx + fm;
        if !(curv > 0.0) {
            break;
        }
        let xn = x - 0.5 * h * (fp - fm) / curv;
        if !(xn > lo && xn < hi) {
            break;
        }
        let fnew = f(xn);
        if fnew <= fx + 8.0 * f64::EPSILON * fx.abs() {
            x = xn;
            fx = fnew;
        }
        iterations += 1;
    }
    Ok(ScalarMinimum { x, value: fx, gradient: central_slope(f, x), iterations, bracket: [lo, hi], local_minima })
}

fn central_slope(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-6 * x.abs().max(1.0);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Which energy functional a minimization uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// The printed closed form for the family/model pair.
    Printed,
    /// First-principles moments.
    Moments,
}

impl Functional {
    pub fn as_str(&self) -> &'static str {
        match self {
            Functional::Printed => "printed",
            Functional::Moments => "moments",
        }
    }
}

/// Family searched by [`minimize_displaced`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DisplacedFamily {
    PositionGaussian,
    /// Displaced monomial with `n = 0`, i.e. a coherent state with real `γ`.
    DisplacedCoherent,
}

/// Optimum of a variational search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeResult {
    pub params_opt: TrialParams,
    pub energy_opt: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    /// One `[lo, hi]` per optimized parameter, in parameter order.
    pub bracket_used: Vec<[f64; 2]>,
    pub stationary_points: usize,
    pub provenance: String,
}

const LOG_ALPHA: (f64, f64) = (-3.912_023_005_428_146, 3.912_023_005_428_146); // ln 0.02, ln 50
const SHIFT: (f64, f64) = (-6.0, 6.0);

/// Energy of a displaced trial under the chosen functional.
pub fn displaced_energy(model: &ModelSpec, t: &TrialParams, functional: Functional) -> Result<f64> {
    match functional {
        Functional::Moments => trial_energy(model, t),
        Functional::Printed => {
            let id = match (t, model.family()) {
                (TrialParams::PositionGaussian { .. }, Family::Quartic | Family::Harmonic) => {
                    FormulaId::DisplacedGaussianQuartic
                }
                (_, Family::CubicQuartic) => FormulaId::DisplacedCoherentCubicQuartic,
                (_, Family::Quartic | Family::Harmonic) => FormulaId::CoherentQuartic,
                _ => {
                    return Err(Error::Unsupported(format!(
                        "no printed displaced functional for {} on a {} model",
                        t.family_name(),
                        model.family()
                    )))
                }
            };
            formulas::paper_energy(id, t, model)
        }
    }
}

/// Alternating coordinate minimization over the displaced families.
///
/// The Gaussian alternates `ln α` on `[ln 0.02, ln 50]` and `β` on `[-6, 6]`;
/// the coherent family has the single real parameter `γ` on `[-6, 6]`.
pub fn minimize_displaced(
    model: &ModelSpec,
    family: DisplacedFamily,
    init: &TrialParams,
    tol: f64,
    functional: Functional,
) -> Result<MinimizeResult> {
    crate::trial::check_admissible(init).into_result()?;
    let one = model.with_dim(1)?;
    let energy = |t: &TrialParams| displaced_energy(&one, t, functional);
    let provenance = format!("minimize_displaced/{}", functional.as_str());
    match family {
        DisplacedFamily::DisplacedCoherent => {
            let mk = |g: f64| TrialParams::DisplacedMonomial { n: 0, gamma: Complex64::new(g, 0.0) };
            let err = std::cell::RefCell::new(None);
            let f = |g: f64| match energy(&mk(g)) {
                Ok(v) => v,
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            };
            let m = minimize_scalar(&f, SHIFT, tol);
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            let m = m?;
            Ok(MinimizeResult {
                params_opt: mk(m.x),
                energy_opt: energy(&mk(m.x))?,
                gradient_norm: m.gradient.abs(),
                iterations: m.iterations,
                bracket_used: vec![[SHIFT.0, SHIFT.1]],
                stationary_points: m.local_minima,
                provenance,
            })
        }
        DisplacedFamily::PositionGaussian => {
            let (mut alpha, mut beta) = match *init {
                TrialParams::PositionGaussian { alpha, beta } => (alpha, beta),
                _ => (1.0, 0.0),
            };
            let err = std::cell::RefCell::new(None);
            let eval = |a: f64, b: f64| match energy(&TrialParams::PositionGaussian { alpha: a, beta: b }) {
                Ok(v) => v,
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            };
            let mut iterations = 0;
            let mut stationary_points = 1;
            let mut converged = false;
            for _sweep in 0..MAX_ITER {
                let ma = minimize_scalar(&|la: f64| eval(la.exp(), beta), LOG_ALPHA, tol);
                let ma = match (ma, err.borrow_mut().take()) {
                    (_, Some(e)) => return Err(e),
                    (r, None) => r?,
                };
                let new_alpha = ma.x.exp();
                let mb = minimize_scalar(&|b: f64| eval(new_alpha, b), SHIFT, tol);
                let mb = match (mb, err.borrow_mut().take()) {
                    (_, Some(e)) => return Err(e),
                    (r, None) => r?,
                };
                iterations += ma.iterations + mb.iterations;
                stationary_points = mb.local_minima.max(ma.local_minima);
                let da = (new_alpha - alpha).abs();
                let db = (mb.x - beta).abs();
                alpha = new_alpha;
                beta = mb.x;
                if da < sweep_tol(tol) * alpha.max(1.0) && db < sweep_tol(tol) * beta.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NoConvergence(format!(
                    "alternating search did not settle after {MAX_ITER} sweeps (alpha={alpha}, beta={beta})"
                )));
            }
            let t = TrialParams::PositionGaussian { alpha, beta };
            let ga = central_slope(&|a: f64| eval(a, beta), alpha);
            let gb = central_slope(&|b: f64| eval(alpha, b), beta);
            Ok(MinimizeResult {
                params_opt: t,
                energy_opt: energy(&t)?,
                gradient_norm: ga.hypot(gb),
                iterations,
                bracket_used: vec![[LOG_ALPHA.0.exp(), LOG_ALPHA.1.exp()], [SHIFT.0, SHIFT.1]],
                stationary_points,
                provenance,
            })
        }
    }
}

/// Trial family selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialFamily {
    /// Centered Gaussian, width only.
    Gaussian,
    DisplacedGaussian,
    /// `e^{γz}` with real `γ`.
    Coherent,
    /// `(z - γ̄)ⁿe^{γz}` with `n = 0`.
    #[serde(alias = "displaced-monomial")]
    DisplacedCoherent,
    /// `e^{αz²}`
    Squeezed,
    /// Fixed Fock state `zⁿ/√n!`; nothing to optimize.
    Monomial,
}

impl TrialFamily {
    pub const ALL: [TrialFamily; 6] = [
        TrialFamily::Gaussian,
        TrialFamily::DisplacedGaussian,
        TrialFamily::Coherent,
        TrialFamily::DisplacedCoherent,
        TrialFamily::Squeezed,
        TrialFamily::Monomial,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TrialFamily::Gaussian => "gaussian",
            TrialFamily::DisplacedGaussian => "displaced-gaussian",
            TrialFamily::Coherent => "coherent",
            TrialFamily::DisplacedCoherent => "displaced-coherent",
            TrialFamily::Squeezed => "squeezed",
            TrialFamily::Monomial => "monomial",
        }
    }
}

impl std::fmt::Display for TrialFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TrialFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        if s == "displaced-monomial" {
            return Ok(TrialFamily::DisplacedCoherent);
        }
        TrialFamily::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown trial family '{s}'")))
    }
}

const SQUEEZE: (f64, f64) = (-0.45, 0.45);

fn printed_id(family: TrialFamily, model: &ModelSpec) -> Result<FormulaId> {
    let id = match (family, model.family()) {
        (TrialFamily::Gaussian, Family::Harmonic | Family::Quartic) => FormulaId::GaussQuartic,
        (TrialFamily::Gaussian, Family::Power2n) => FormulaId::GaussPower2n,
        (TrialFamily::DisplacedGaussian, Family::Harmonic | Family::Quartic) => FormulaId::DisplacedGaussianQuartic,
        (TrialFamily::Coherent | TrialFamily::DisplacedCoherent, Family::Harmonic | Family::Quartic) => {
            FormulaId::CoherentQuartic
        }
        (TrialFamily::Coherent | TrialFamily::DisplacedCoherent, Family::CubicQuartic) => {
            FormulaId::DisplacedCoherentCubicQuartic
        }
        (TrialFamily::Squeezed, Family::Harmonic | Family::Quartic) => FormulaId::SqueezedQuartic,
        (TrialFamily::Monomial, Family::Harmonic | Family::Quartic) => FormulaId::MonomialQuartic,
        (f, m) => return Err(Error::Unsupported(format!("no printed functional for {f} on a {m} model"))),
    };
    Ok(id)
}

/// Single-mode variational optimum of `family` for `model`.
///
/// Centered Gaussians on even models use the stationarity root directly;
/// `degree` is the Fock index for [`TrialFamily::Monomial`].
pub fn minimize_family(
    model: &ModelSpec,
    family: TrialFamily,
    degree: u32,
    functional: Functional,
    tol: f64,
) -> Result<MinimizeResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let one = model.with_dim(1)?;
    let tag = functional.as_str();
    if functional == Functional::Printed {
        printed_id(family, &one)?;
    }
    match family {
        TrialFamily::Gaussian if one.is_even() => {
            let n = if one.family() == Family::Power2n { one.n() } else { 2 };
            let (alpha, energy) = gauss_power_minimum(n, one.lambda())?;
            let provenance = if one.lambda() == 0.0 {
                "harmonic_width"
            } else if n == 2 {
                "cardano_root"
            } else {
                "stationary_width"
            };
            Ok(MinimizeResult {
                params_opt: TrialParams::gaussian(alpha),
                energy_opt: energy,
                gradient_norm: power_energy(alpha, n, one.lambda()).1.abs(),
                iterations: 0,
                bracket_used: vec![],
                stationary_points: 1,
                provenance: format!("{provenance}/{tag}"),
            })
        }
        TrialFamily::Gaussian | TrialFamily::DisplacedGaussian => {
            minimize_displaced(&one, DisplacedFamily::PositionGaussian, &TrialParams::gaussian(1.0), tol, functional)
        }
        TrialFamily::Coherent | TrialFamily::DisplacedCoherent => {
            let mut r =
                minimize_displaced(&one, DisplacedFamily::DisplacedCoherent, &TrialParams::coherent(0.0), tol, functional)?;
            if family == TrialFamily::Coherent {
                if let Some(gamma) = r.params_opt.as_coherent() {
                    r.params_opt = TrialParams::Coherent { gamma };
                }
            }
            Ok(r)
        }
        TrialFamily::Squeezed => {
            let err = std::cell::RefCell::new(None);
            let f = |a: f64| {
                let t = TrialParams::squeezed(a);
                let e = match functional {
                    Functional::Printed => formulas::paper_energy(FormulaId::SqueezedQuartic, &t, &one),
                    Functional::Moments => trial_energy(&one, &t),
                };
                e.unwrap_or_else(|e| {
                    err.borrow_mut().get_or_insert(e);
                    f64::NAN
                })
            };
            let m = minimize_scalar(&f, SQUEEZE, tol);
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            let m = m?;
            Ok(MinimizeResult {
                params_opt: TrialParams::squeezed(m.x),
                energy_opt: m.value,
                gradient_norm: m.gradient.abs(),
                iterations: m.iterations,
                bracket_used: vec![[SQUEEZE.0, SQUEEZE.1]],
                stationary_points: m.local_minima,
                provenance: format!("minimize_scalar/{tag}"),
            })
        }
        TrialFamily::Monomial => {
            let t = TrialParams::Monomial { n: degree };
            let energy = match functional {
                Functional::Printed => formulas::paper_energy(FormulaId::MonomialQuartic, &t, &one)?,
                Functional::Moments => trial_energy(&one, &t)?,
            };
            Ok(MinimizeResult {
                params_opt: t,
                energy_opt: energy,
                gradient_norm: 0.0,
                iterations: 0,
                bracket_used: vec![],
                stationary_points: 0,
                provenance: format!("fixed_state/{tag}"),
            })
        }
    }
}

/// Sweep-to-sweep change that counts as settled; the scalar solves cannot
/// resolve parameters much below 1e-9 relative.
fn sweep_tol(tol: f64) -> f64 {
    tol.max(1e-9)
}

/// Least-squares power series in `λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesFit {
    /// `(order, coefficient)`; order 0 appears only without a baseline.
    pub coefficients: Vec<(u32, f64)>,
    pub lambda_grid: Vec<f64>,
    /// RMS of the fit residuals.
    pub residual: f64,
    /// Ratio of extreme singular values of the scaled design matrix.
    pub condition: f64,
    pub reliable: bool,
}

impl SeriesFit {
    pub fn coefficient(&self, order: u32) -> Option<f64> {
        self.coefficients.iter().find(|(o, _)| *o == order).map(|(_, v)| *v)
    }
}

pub const FIT_CONDITION_LIMIT: f64 = 1e10;
/// RMS residual allowed, relative to the largest sample magnitude.
pub const FIT_RESIDUAL_LIMIT: f64 = 1e-3;

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Default small-coupling fit grid: 25 points on `[1e-4, 1e-2]`.
pub fn default_fit_grid() -> Vec<f64> {
    log_grid(1e-4, 1e-2, 25)
}

/// Fit `f(λ) - baseline ≈ Σ_{k=1..max_order} a_k λ^k`.
///
/// Without a baseline an intercept `a_0` is fitted too. Columns are built in
/// `t = λ/max λ` and rescaled afterwards.
pub fn fit_series(
    f: &dyn Fn(f64) -> Result<f64>,
    grid: &[f64],
    max_order: u32,
    baseline: Option<f64>,
) -> Result<SeriesFit> {
    if !(1..=3).contains(&max_order) {
        return Err(Error::InvalidParameter(format!("max_order must be 1..=3, got {max_order}")));
    }
    if grid.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::InvalidParameter("fit grid must be strictly positive".into()));
    }
    let first = if baseline.is_some() { 1 } else { 0 };
    let orders: Vec<u32> = (first..=max_order).collect();
    if grid.len() <= orders.len() {
        return Err(Error::InvalidParameter(format!(
            "{} grid points cannot determine {} coefficients",
            grid.len(),
            orders.len()
        )));
    }
    let scale = grid.iter().copied().fold(0.0, f64::max);
    let mut ys = Vec::with_capacity(grid.len());
    for &l in grid {
        ys.push(f(l)? - baseline.unwrap_or(0.0));
    }
    let a = DMatrix::from_fn(grid.len(), orders.len(), |i, j| (grid[i] / scale).powi(orders[j] as i32));
    let y_max = ys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let y = DVector::from_vec(ys);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let sol = svd
        .solve(&y, 1e-14 * smax)
        .map_err(|e| Error::NoConvergence(format!("least squares: {e}")))?;
    let resid = &a * &sol - &y;
    let residual = (resid.norm_squared() / grid.len() as f64).sqrt();
    let coefficients = orders
        .iter()
        .zip(sol.iter())
        .map(|(&o, &c)| (o, c / scale.powi(o as i32)))
        .collect();
    Ok(SeriesFit {
        coefficients,
        lambda_grid: grid.to_vec(),
        residual,
        condition,
        reliable: condition < FIT_CONDITION_LIMIT && residual <= FIT_RESIDUAL_LIMIT * y_max,
    })
}

/// Second-order expansion of a stationary value `E*(λ) = min_p E(p, λ)`.
///
/// With all partials at `(p₀, 0)` and `E_p = 0` there:
/// `E* = E₀ + E_λ λ + ½(E_λλ - E_pλ²/E_pp) λ² + …` and `p* = p₀ - (E_pλ/E_pp) λ + …`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryExpansion {
    pub e0: f64,
    pub e_l: f64,
    pub e_ll: f64,
    pub e_pl: f64,
    pub e_pp: f64,
}

impl StationaryExpansion {
    pub fn first_order(&self) -> f64 {
        self.e_l
    }

    pub fn second_order(&self) -> f64 {
        0.5 * (self.e_ll - self.e_pl * self.e_pl / self.e_pp)
    }

    pub fn parameter_slope(&self) -> f64 {
        -self.e_pl / self.e_pp
    }

    /// Gaussian `x^{2n}` functional about `α = 1`.
    pub fn gauss_power(n: u32) -> Self {
        let m = odd_double_factorial_f64(n) / 2f64.powi(n as i32);
        StationaryExpansion { e0: 0.5, e_l: m, e_ll: 0.0, e_pl: -(n as f64) * m, e_pp: 0.5 }
    }

    /// Printed displaced-coherent functional in the cubic coupling about `γ = 0`.
    pub fn displaced_coherent_printed(mu: f64) -> Self {
        StationaryExpansion {
            e0: 0.5 + 0.75 * mu,
            e_l: 0.0,
            e_ll: 0.0,
            e_pl: 3.0 * std::f64::consts::SQRT_2,
            e_pp: 2.0 * (1.0 + 6.0 * mu),
        }
    }

    /// The same family with first-principles moments (`⟨x³⟩` linear term `3√2/2`).
    pub fn displaced_coherent_moments(mu: f64) -> Self {
        StationaryExpansion { e_pl: 1.5 * std::f64::consts::SQRT_2, ..Self::displaced_coherent_printed(mu) }
    }
}

/// Minimum of the Gaussian `x^{2n}` functional (Cardano for `n = 2`).
pub fn gauss_power_minimum(n: u32, lambda: f64) -> Result<(f64, f64)> {
    if lambda == 0.0 {
        return Ok((1.0, 0.5));
    }
    let alpha = if n == 2 { cardano_root(lambda)? } else { stationary_width(n, lambda)? };
    Ok((alpha, power_energy(alpha, n, lambda).0))
}

/// Minimum of the printed displaced-coherent functional over real `γ`, from
/// its cubic stationarity condition.
pub fn displaced_coherent_printed_minimum(lambda: f64, mu: f64) -> Result<(f64, f64)> {
    let f = |g: f64| formulas::displaced_coherent_printed(g, lambda, mu);
    // E'(γ) = 16μγ³ + 6√2λγ² + 2(1 + 6μ)γ + 3√2λ, increasing for small λ
    let d = |g: f64| {
        16.0 * mu * g * g * g + 6.0 * std::f64::consts::SQRT_2 * lambda * g * g + 2.0 * (1.0 + 6.0 * mu) * g
            + 3.0 * std::f64::consts::SQRT_2 * lambda
    };
    if lambda == 0.0 {
        return Ok((0.0, f(0.0)));
    }
    let (mut lo, mut hi) = (-1.0, 1.0);
    while d(lo) > 0.0 {
        lo *= 2.0;
    }
    while d(hi) < 0.0 {
        hi *= 2.0;
    }
    let g = bisect(&d, lo, hi);
    Ok((g, f(g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cardano_examples() {
        assert!((cardano_root(1.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((cardano_root(0.01).unwrap() - 1.028_748_413_235_918_6).abs() < 1e-12);
        let a = cardano_root(0.1).unwrap();
        assert!((a - 1.221_196_686_181_077_7).abs() < 1e-12);
        assert!((a * a * a - a - 0.6).abs() < 1e-12);
        assert!(cardano_root(0.0).is_err());
        assert!(cardano_root(-1.0).is_err());
    }

    #[test]
    fn cardano_both_branches_meet() {
        let switch = (1.0f64 / 243.0).sqrt();
        for l in [switch * (1.0 - 1e-9), switch, switch * (1.0 + 1e-9)] {
            let a = cardano_root(l).unwrap();
            assert!((a - cubic_bisection(l)).abs() < 1e-10);
        }
    }

    #[test]
    fn minimize_family_examples() {
        let h = ModelSpec::harmonic();
        for fam in [TrialFamily::Gaussian, TrialFamily::Coherent, TrialFamily::DisplacedGaussian, TrialFamily::Squeezed] {
            let r = minimize_family(&h, fam, 0, Functional::Moments, PARAM_TOL).unwrap();
            assert!((r.energy_opt - 0.5).abs() < 1e-10, "{fam}: {r:?}");
        }
        let q = ModelSpec::quartic(0.1).unwrap();
        let r = minimize_family(&q, TrialFamily::Gaussian, 0, Functional::Printed, PARAM_TOL).unwrap();
        assert_eq!(r.params_opt, TrialParams::gaussian(cardano_root(0.1).unwrap()));
        let r = minimize_family(&q, TrialFamily::Squeezed, 0, Functional::Printed, PARAM_TOL).unwrap();
        assert!((r.energy_opt - 0.575).abs() < 1e-12);
        // the true squeezed optimum coincides with the centered Gaussian one
        let r = minimize_family(&q, TrialFamily::Squeezed, 0, Functional::Moments, PARAM_TOL).unwrap();
        let TrialParams::BargmannSqueezed { alpha } = r.params_opt else { panic!() };
        assert!(alpha < 0.0);
        let g = gauss_power_minimum(2, 0.1).unwrap().1;
        assert!((r.energy_opt - g).abs() < 1e-8, "{} vs {g}", r.energy_opt);
        let r = minimize_family(&q, TrialFamily::Monomial, 1, Functional::Printed, PARAM_TOL).unwrap();
        assert!((r.energy_opt - 1.875).abs() < 1e-12);
        let p3 = ModelSpec::power(3, 0.1).unwrap();
        assert!(minimize_family(&p3, TrialFamily::Coherent, 0, Functional::Printed, PARAM_TOL).is_err());
        let r = minimize_family(&p3, TrialFamily::Coherent, 0, Functional::Moments, PARAM_TOL).unwrap();
        assert!(matches!(r.params_opt, TrialParams::Coherent { .. }));
        assert!("displaced-monomial".parse::<TrialFamily>().unwrap() == TrialFamily::DisplacedCoherent);
    }

    #[test]
    fn stationary_width_examples() {
        for l in [0.01, 0.1, 1.0] {
            assert!((stationary_width(2, l).unwrap() - cardano_root(l).unwrap()).abs() < 1e-10);
        }
        assert!((stationary_width(3, 1e-9).unwrap() - 1.0).abs() < 1e-7);
        assert!((stationary_width(3, 0.01).unwrap() - 1.0905055880666137).abs() < 1e-10);
        let a = stationary_width(3, 1e-4).unwrap();
        assert!(((a - 1.0) / 1e-4 - 11.25).abs() < 0.05);
        assert!(stationary_width(1, 0.1).is_err());
        assert!(stationary_width(3, 0.0).is_err());
        let d = stationary_width_detailed(4, 0.3).unwrap();
        assert_eq!(d.roots.len(), 1);
    }

    #[test]
    fn minimize_scalar_examples() {
        let q0 = ModelSpec::quartic(0.0).unwrap();
        let f = |a: f64| formulas::paper_energy(FormulaId::GaussQuartic, &TrialParams::gaussian(a), &q0).unwrap();
        let m = minimize_scalar(&f, (0.1, 10.0), PARAM_TOL).unwrap();
        assert!((m.x - 1.0).abs() < 1e-9, "{m:?}");
        assert!((m.value - 0.5).abs() < 1e-12);
        assert!(m.gradient.abs() < GRAD_TOL);

        let q = ModelSpec::quartic(0.1).unwrap();
        let f = |g: f64| formulas::paper_energy(FormulaId::CoherentQuartic, &TrialParams::coherent(g), &q).unwrap();
        let m = minimize_scalar(&f, (-2.0, 2.0), PARAM_TOL).unwrap();
        assert!(m.x.abs() < 1e-8 && (m.value - 0.575).abs() < 1e-12);

        let f = |a: f64| formulas::paper_energy(FormulaId::SqueezedQuartic, &TrialParams::squeezed(a), &q).unwrap();
        let m = minimize_scalar(&f, (-0.49, 0.49), PARAM_TOL).unwrap();
        assert!(m.x.abs() < 1e-8 && (m.value - 0.575).abs() < 1e-12);

        let err = minimize_scalar(&|x: f64| x, (0.0, 1.0), PARAM_TOL);
        assert!(matches!(err, Err(Error::MonotoneOnBracket { .. })));
    }

    #[test]
    fn displaced_examples() {
        let q = ModelSpec::quartic(0.1).unwrap();
        let init = TrialParams::PositionGaussian { alpha: 1.0, beta: 0.3 };
        for functional in [Functional::Moments, Functional::Printed] {
            let r = minimize_displaced(&q, DisplacedFamily::PositionGaussian, &init, PARAM_TOL, functional).unwrap();
            let TrialParams::PositionGaussian { alpha, beta } = r.params_opt else { panic!() };
            assert!(beta.abs() < 1e-8, "{r:?}");
            assert!((alpha - cardano_root(0.1).unwrap()).abs() < 1e-8, "{r:?}");
            assert!(r.gradient_norm < 1e-8);
        }

        let cq = ModelSpec::cubic_quartic(0.05, 0.1).unwrap();
        let init = TrialParams::coherent(0.0);
        let r = minimize_displaced(&cq, DisplacedFamily::DisplacedCoherent, &init, PARAM_TOL, Functional::Moments).unwrap();
        let g = r.params_opt.as_coherent().unwrap().re;
        assert!(g < 0.0);
        let e0 = trial_energy(&cq, &TrialParams::coherent(0.0)).unwrap();
        assert!(r.energy_opt < e0 - 1e-6);

        let even = ModelSpec::cubic_quartic(0.0, 0.1).unwrap();
        let r = minimize_displaced(&even, DisplacedFamily::DisplacedCoherent, &init, PARAM_TOL, Functional::Moments).unwrap();
        assert!(r.params_opt.as_coherent().unwrap().re.abs() < 1e-8);
        assert!((r.energy_opt - 0.575).abs() < 1e-12);
    }

    #[test]
    fn printed_displaced_minimum_matches_search() {
        let cq = ModelSpec::cubic_quartic(0.05, 0.1).unwrap();
        let r = minimize_displaced(&cq, DisplacedFamily::DisplacedCoherent, &TrialParams::coherent(0.0), PARAM_TOL, Functional::Printed).unwrap();
        let (g, e) = displaced_coherent_printed_minimum(0.05, 0.1).unwrap();
        assert!((r.params_opt.as_coherent().unwrap().re - g).abs() < 1e-8);
        assert!((r.energy_opt - e).abs() < 1e-13);
    }

    #[test]
    fn fit_examples() {
        let grid = default_fit_grid();
        let e = |l: f64| gauss_power_minimum(2, l).map(|r| r.1);
        let fit = fit_series(&e, &grid, 3, Some(0.5)).unwrap();
        assert!((fit.coefficient(1).unwrap() - 0.75).abs() < 1e-3);
        assert!(fit.reliable);
        let fit = fit_series(&|l| cardano_root(l), &grid, 3, Some(1.0)).unwrap();
        assert!((fit.coefficient(1).unwrap() - 3.0).abs() < 1e-3);
        let fit = fit_series(&|_| Ok(0.5), &grid, 2, None).unwrap();
        assert!((fit.coefficient(0).unwrap() - 0.5).abs() < 1e-14);
        assert!(fit.coefficient(1).unwrap().abs() < 1e-9 && fit.coefficient(2).unwrap().abs() < 1e-6);
        assert!(fit_series(&|_| Ok(0.0), &grid, 4, None).is_err());
        assert!(fit_series(&|_| Ok(0.0), &[0.0, 1.0, 2.0], 1, None).is_err());
    }

    #[test]
    fn fit_flags_ill_conditioning() {
        let grid = log_grid(1e-4, 1.0001e-4, 10);
        let fit = fit_series(&|l| Ok(l), &grid, 3, None).unwrap();
        assert!(!fit.reliable);
    }

    #[test]
    fn analytic_expansions() {
        let g = StationaryExpansion::gauss_power(2);
        assert_eq!(g.first_order(), 0.75);
        assert_eq!(g.second_order(), -2.25);
        assert_eq!(g.parameter_slope(), 3.0);
        assert_eq!(StationaryExpansion::gauss_power(3).parameter_slope(), 11.25);
        let d = StationaryExpansion::displaced_coherent_printed(0.1);
        assert!((d.second_order() + 2.8125).abs() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cardano_matches_bisection(l in 1e-3f64..10.0) {
            let a = cardano_root(l).unwrap();
            prop_assert!((a * a * a - a - 6.0 * l).abs() < 1e-12);
            prop_assert!((a - cubic_bisection(l)).abs() < 1e-10);
        }

        #[test]
        fn gauss_stationary_point(l in 1e-3f64..10.0) {
            let a = cardano_root(l).unwrap();
            prop_assert!(power_energy(a, 2, l).1.abs() < 1e-9);
        }

        #[test]
        fn displaced_search_symmetric_on_even_models(l in 0.01f64..1.0, b0 in -1.0f64..1.0) {
            let q = ModelSpec::quartic(l).unwrap();
            let r = minimize_displaced(&q, DisplacedFamily::PositionGaussian,
                &TrialParams::PositionGaussian { alpha: 1.0, beta: b0 }, PARAM_TOL, Functional::Moments).unwrap();
            let TrialParams::PositionGaussian { beta, .. } = r.params_opt else { unreachable!() };
            prop_assert!(beta.abs() < 1e-8);
        }
    }
}
