//! Cross-module properties over random inputs.

use proptest::prelude::*;
use varwork::fd::fd_ground_energy;
use varwork::formulas::{self, FormulaId};
use varwork::moments::{monomial_x4_moment, trial_energy, trial_moment};
use varwork::quadrature::{bargmann_expectation, Observable};
use varwork::ritz::{ground_energy, position_matrix};
use varwork::{Complex64, ModelSpec, TrialParams};

fn quartic_e0(lambda: f64) -> f64 {
    ground_energy(&ModelSpec::quartic(lambda).unwrap(), 1e-10).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn printed_energies_respect_the_variational_bound(
        lambda in 0.01f64..1.0,
        alpha in 0.2f64..4.0,
        beta in -1.5f64..1.5,
        gamma in -1.5f64..1.5,
        s in -0.45f64..0.45,
        n in 0u32..6,
    ) {
        let m = ModelSpec::quartic(lambda).unwrap();
        let floor = quartic_e0(lambda) - 1e-9;
        let cases = [
            (FormulaId::GaussQuartic, TrialParams::gaussian(alpha)),
            (FormulaId::CoherentQuartic, TrialParams::coherent(gamma)),
            (FormulaId::MonomialQuartic, TrialParams::Monomial { n }),
            (FormulaId::DisplacedGaussianQuartic, TrialParams::PositionGaussian { alpha, beta }),
            (FormulaId::SqueezedQuartic, TrialParams::squeezed(s)),
        ];
        for (id, t) in cases {
            let e = formulas::paper_energy(id, &t, &m).unwrap();
            prop_assert!(e >= floor, "{id:?} {t:?}: {e} < {floor}");
            let truth = trial_energy(&m, &t).unwrap();
            prop_assert!(truth >= floor, "{t:?}: true energy {truth} < {floor}");
        }
    }

    #[test]
    fn closed_form_moments_match_quadrature(
        alpha in 0.3f64..3.0,
        beta in -1.0f64..1.0,
        re in -1.0f64..1.0,
        im in -1.0f64..1.0,
        s in -0.35f64..0.35,
        k in 1u32..=4,
    ) {
        let trials = [
            TrialParams::PositionGaussian { alpha, beta },
            TrialParams::Coherent { gamma: Complex64::new(re, im) },
            TrialParams::squeezed(s),
        ];
        for t in trials {
            let closed = trial_moment(&t, k).unwrap();
            let q = bargmann_expectation(&Observable::XPow(k), &t, 64).unwrap();
            prop_assert!(q.stable);
            prop_assert!((closed - q.value).abs() <= 1e-8 * closed.abs().max(1.0), "{t:?} k={k}: {closed} vs {}", q.value);
        }
    }

    #[test]
    fn gaussian_energy_is_convex_in_log_width(lambda in 0.0f64..2.0, a in 0.1f64..10.0) {
        // E(α) = α/4 + 1/(4α) + 3λ/(4α²): second difference in ln α is positive
        let m = ModelSpec::quartic(lambda).unwrap();
        let e = |x: f64| formulas::paper_energy(FormulaId::GaussQuartic, &TrialParams::gaussian(x.exp()), &m).unwrap();
        let (x, h) = (a.ln(), 1e-3);
        prop_assert!(e(x + h) + e(x - h) - 2.0 * e(x) > 0.0);
    }

    #[test]
    fn product_state_energy_is_additive(lambda in 0.0f64..1.0, alpha in 0.3f64..3.0, d in 1u32..=4) {
        let t = TrialParams::gaussian(alpha);
        let one = ModelSpec::quartic(lambda).unwrap();
        let e1 = formulas::paper_energy(FormulaId::GaussQuartic, &t, &one).unwrap();
        let ed = formulas::paper_energy(FormulaId::GaussDim, &t, &one.with_dim(d).unwrap()).unwrap();
        prop_assert!((ed - f64::from(d) * e1).abs() < 1e-12);
    }
}

#[test]
fn monomial_x4_is_the_fourth_power_diagonal() {
    let size = 40;
    let x = position_matrix(size).unwrap();
    let x4 = &x * &x * &x * &x;
    for n in 0..size - 4 {
        let diag = x4[(n, n)];
        assert!((monomial_x4_moment(n as u32) - diag).abs() < 1e-12 * diag.max(1.0), "n={n}");
    }
}

#[test]
fn fd_box_insensitivity_and_second_order() {
    let m = ModelSpec::quartic(0.1).unwrap();
    let a = fd_ground_energy(&m, 8.0, 1025, true).unwrap();
    let b = fd_ground_energy(&m, 16.0, 2049, true).unwrap();
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    let coarse = fd_ground_energy(&m, 8.0, 513, false).unwrap();
    let mid = fd_ground_energy(&m, 8.0, 1025, false).unwrap();
    let fine = fd_ground_energy(&m, 8.0, 2049, false).unwrap();
    let ratio = (coarse - mid) / (mid - fine);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}
