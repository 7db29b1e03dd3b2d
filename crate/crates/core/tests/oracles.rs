//! Library results against oracles written independently here: plain
//! Riemann sums over ℂ, position-space trapezoid integrals, Newton on the
//! stationarity cubic, and high-precision reference energies computed
//! outside this code base.

use std::f64::consts::PI;

use num_complex::Complex64;
use varwork::fd::{fd_ground_energy, fd_reference_energy};
use varwork::formulas::{self, FormulaId};
use varwork::moments::{trial_energy, trial_moment};
use varwork::optimize::{cardano_root, gauss_power_minimum, stationary_width};
use varwork::quadrature::{bargmann_expectation, Observable};
use varwork::ritz::ground_energy;
use varwork::{ModelSpec, TrialParams};

/// `(1/π)∫ conj(f) g e^{-|z|²}` by a midpoint rule on `[-r, r]²`.
fn riemann_inner(f: &dyn Fn(Complex64) -> Complex64, g: &dyn Fn(Complex64) -> Complex64) -> Complex64 {
    let (r, n) = (9.0, 900);
    let h = 2.0 * r / n as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let x = -r + (i as f64 + 0.5) * h;
        for j in 0..n {
            let y = -r + (j as f64 + 0.5) * h;
            let z = Complex64::new(x, y);
            s += f(z).conj() * g(z) * (-(x * x + y * y)).exp();
        }
    }
    s * h * h / PI
}

/// `⟨x²⟩` of `e^{αz²}` from `(a + a†)²/2` with `a = d/dz`, `a† = z`,
/// using the explicit derivatives `f' = 2αz f`, `f'' = (2α + 4α²z²) f`.
fn squeezed_x2_riemann(alpha: f64) -> f64 {
    let f = |z: Complex64| (z * z * alpha).exp();
    let f1 = |z: Complex64| z * 2.0 * alpha * f(z);
    let f2 = |z: Complex64| (2.0 * alpha + z * z * 4.0 * alpha * alpha) * f(z);
    let norm = riemann_inner(&f, &f).re;
    let aa = riemann_inner(&f, &f2);
    let ndag = riemann_inner(&f1, &f1).re;
    // ⟨(a + a†)²⟩ = ⟨a²⟩ + conj⟨a²⟩ + 2⟨a†a⟩ + ⟨f|f⟩
    0.5 * (2.0 * aa.re + 2.0 * ndag + norm) / norm
}

#[test]
fn squeezed_x2_against_riemann_oracle() {
    for a in [-0.2, 0.1, 0.2] {
        let oracle = squeezed_x2_riemann(a);
        let quad = bargmann_expectation(&Observable::X2, &TrialParams::squeezed(a), 64).unwrap();
        assert!((quad.value - oracle).abs() < 1e-8, "alpha={a}: {} vs {oracle}", quad.value);
        let printed = formulas::squeezed::x2(a).unwrap();
        if a != 0.0 {
            assert!((printed - oracle).abs() > 1e-3);
        }
    }
}

#[test]
fn norms_against_riemann_oracle() {
    for a in [0.1, 0.25] {
        let f = |z: Complex64| (z * z * a).exp();
        let oracle = riemann_inner(&f, &f).re;
        assert!((formulas::paper_norm_squared(a).unwrap() - oracle).abs() < 1e-8);
    }
    let g = Complex64::new(0.4, -0.3);
    let f = |z: Complex64| (z * g).exp();
    let oracle = riemann_inner(&f, &f).re;
    assert!((oracle - g.norm_sqr().exp()).abs() < 1e-9);
}

/// Position-space trapezoid rule for a real wavefunction.
fn position_expectation(psi: &dyn Fn(f64) -> f64, obs: &dyn Fn(f64) -> f64) -> f64 {
    let (l, n) = (14.0, 40_000);
    let h = 2.0 * l / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=n {
        let x = -l + i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let p2 = psi(x) * psi(x);
        num += w * p2 * obs(x);
        den += w * p2;
    }
    num / den
}

#[test]
fn coherent_moments_in_position_space() {
    // e^{γz} with real γ is a Gaussian of width ½ centered at √2γ
    for g in [-0.7, 0.3, 1.0] {
        let c = std::f64::consts::SQRT_2 * g;
        let psi = |x: f64| (-(x - c) * (x - c) / 2.0).exp();
        for k in 1..=4 {
            let oracle = position_expectation(&psi, &|x| x.powi(k as i32));
            let lib = trial_moment(&TrialParams::coherent(g), k).unwrap();
            assert!((lib - oracle).abs() < 1e-9 * (1.0 + oracle.abs()), "g={g} k={k}: {lib} vs {oracle}");
        }
        let printed_x3 = formulas::coherent::x3(g);
        let true_x3 = position_expectation(&psi, &|x| x.powi(3));
        assert!((printed_x3 - true_x3).abs() > 0.1);
    }
}

#[test]
fn gaussian_energy_in_position_space() {
    let model = ModelSpec::cubic_quartic(0.2, 0.1).unwrap();
    let (alpha, beta) = (1.3, -0.4);
    let psi = |x: f64| (-alpha * (x - beta) * (x - beta) / 2.0).exp();
    // ⟨T⟩ = ½∫ψ'² / ∫ψ² = α/4
    let v = position_expectation(&psi, &|x| 0.5 * x * x + 0.2 * x.powi(3) + 0.1 * x.powi(4));
    let oracle = alpha / 4.0 + v;
    let lib = trial_energy(&model, &TrialParams::PositionGaussian { alpha, beta }).unwrap();
    assert!((lib - oracle).abs() < 1e-10);
}

fn newton_cubic(lambda: f64) -> f64 {
    // α³ - α - 6λ = 0 from α = 1 + 2λ
    let mut a = 1.0 + 6.0 * lambda.cbrt().max(lambda);
    for _ in 0..200 {
        a -= (a * a * a - a - 6.0 * lambda) / (3.0 * a * a - 1.0);
    }
    a
}

#[test]
fn cardano_against_newton() {
    for l in [1e-3, 0.01, 0.1, 1.0, 10.0] {
        assert!((cardano_root(l).unwrap() - newton_cubic(l)).abs() < 1e-12);
    }
    // n = 2 general path agrees with the closed form
    assert!((stationary_width(2, 0.3).unwrap() - newton_cubic(0.3)).abs() < 1e-10);
}

// Ground energies from an external high-precision diagonalization.
const QUARTIC_E0: [(f64, f64); 4] = [
    (0.05, 0.532_642_754_771_858_9),
    (0.1, 0.559_146_327_183_519_6),
    (0.5, 0.696_175_820_765_145_8),
    (1.0, 0.803_770_651_234_268),
];
const GAUSS_EVAR: [(f64, f64); 4] = [
    (0.05, 0.533_101_808_775_987_2),
    (0.1, 0.560_307_371_138_663_4),
    (0.5, 0.701_661_642_885_292_3),
    (1.0, 0.8125),
];

#[test]
fn reference_energies() {
    for ((l, e0), (_, ev)) in QUARTIC_E0.iter().zip(GAUSS_EVAR) {
        let m = ModelSpec::quartic(*l).unwrap();
        assert!((ground_energy(&m, 1e-10).unwrap() - e0).abs() < 1e-10, "lambda={l}");
        assert!((fd_reference_energy(&m).unwrap() - e0).abs() < 1e-9, "lambda={l}");
        assert!((gauss_power_minimum(2, *l).unwrap().1 - ev).abs() < 1e-12);
    }
    let cq = ModelSpec::cubic_quartic(0.05, 0.1).unwrap();
    assert!((ground_energy(&cq, 1e-10).unwrap() - 0.557_760_980_576_084_9).abs() < 1e-10);
    let cq = ModelSpec::cubic_quartic(0.1, 0.2).unwrap();
    assert!((ground_energy(&cq, 1e-10).unwrap() - 0.598_961_864_260_409_8).abs() < 1e-10);
    let p3 = ModelSpec::power(3, 0.05).unwrap();
    assert!((ground_energy(&p3, 1e-10).unwrap() - 0.554_543_539_232_9).abs() < 1e-10);
}

#[test]
fn quartic_excited_levels() {
    let want = [0.559_146_33, 1.769_502_64, 3.138_624_31, 4.628_882_81];
    let s = varwork::ritz::converged_spectrum(&ModelSpec::quartic(0.1).unwrap(), 4, 1e-10).unwrap();
    for (a, b) in s.values.iter().zip(want) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn harmonic_fd_error_is_second_order() {
    // three-point stencil: E_h = ½ - (h²/24)⟨p⁴⟩ + O(h⁴) with ⟨p⁴⟩ = ¾
    for m in [1024, 2048] {
        let h = 16.0 / (m as f64 - 1.0);
        let e = fd_ground_energy(&ModelSpec::harmonic(), 8.0, m, false).unwrap();
        let predicted = 0.5 - h * h / 32.0;
        assert!((e - predicted).abs() < 1e-8, "m={m}: {e} vs {predicted}");
    }
    let e = fd_ground_energy(&ModelSpec::harmonic(), 8.0, 1024, true).unwrap();
    assert!((e - 0.5).abs() < 1e-9);
}

#[test]
fn printed_gauss_quartic_equals_isserlis_energy() {
    let m = ModelSpec::quartic(0.37).unwrap();
    for a in [0.3, 1.0, 2.5] {
        let t = TrialParams::gaussian(a);
        let p = formulas::paper_energy(FormulaId::GaussQuartic, &t, &m).unwrap();
        let psi = |x: f64| (-a * x * x / 2.0).exp();
        let oracle = a / 4.0 + position_expectation(&psi, &|x| 0.5 * x * x + 0.37 * x.powi(4));
        assert!((p - oracle).abs() < 1e-10);
    }
}
