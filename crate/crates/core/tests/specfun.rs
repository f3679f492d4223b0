use approx::assert_abs_diff_eq;
use mgcp::specfun::*;
use proptest::prelude::*;

fn cfg() -> SeriesConfig {
    SeriesConfig::default()
}

// Reference values below come from 40-digit mpmath evaluations.

#[test]
fn mittag_leffler_half_order_at_minus_one() {
    // E_{1/2}(−1) = e·erfc(1)
    let v = mittag_leffler(0.5, 1.0, 1.0, -1.0, &cfg()).unwrap();
    assert_abs_diff_eq!(v.value, 0.427_583_576_155_807_004_4, epsilon = 1e-13);
    assert!(v.quality.is_clean());
}

#[test]
fn mittag_leffler_trivial_points() {
    assert_abs_diff_eq!(mittag_leffler(1.0, 1.0, 1.0, 1.0, &cfg()).unwrap().value, std::f64::consts::E, epsilon = 1e-15);
    assert_eq!(mittag_leffler(0.5, 1.0, 1.0, 0.0, &cfg()).unwrap().value, 1.0);
    assert_abs_diff_eq!(mittag_leffler(0.7, 2.0, 1.3, 0.0, &cfg()).unwrap().value, 1.0, epsilon = 1e-15);
}

#[test]
fn wright_with_pole_in_leading_denominator() {
    let v = wright_1_1(1.0, 0.6, 0.0, 0.6, -0.5, &cfg()).unwrap();
    assert_abs_diff_eq!(v.value, -0.181_959_197_913_790_027_1, epsilon = 1e-13);
}

#[test]
fn small_order_negative_argument_survives_cancellation() {
    // Γ(2.5)·E^{2.5}_{0.3,0.5}(−2): the largest term is about 1e6 times the value
    let want = -0.002_810_096_148_371_643_09;
    let w = wright_1_1(2.5, 1.0, 0.5, 0.3, -2.0, &cfg()).unwrap();
    let m = mittag_leffler(0.3, 0.5, 2.5, -2.0, &cfg()).unwrap();
    assert_abs_diff_eq!(w.value, want, epsilon = 1e-14);
    assert_abs_diff_eq!(gamma(2.5) * m.value, want, epsilon = 1e-14);
    assert!(w.max_term / w.value.abs() > 1e3);
}

#[test]
fn reciprocal_gamma_points() {
    assert_eq!(reciprocal_gamma(1.0), 1.0);
    assert_eq!(reciprocal_gamma(0.0), 0.0);
    assert_eq!(reciprocal_gamma(-3.0), 0.0);
    assert_abs_diff_eq!(reciprocal_gamma(0.5), 0.564_189_583_547_756_3, epsilon = 1e-15);
}

#[test]
fn incomplete_integrals() {
    assert_abs_diff_eq!(incomplete_beta(0.3, 1.0, 1.0).unwrap(), 0.3, epsilon = 1e-14);
    assert_abs_diff_eq!(incomplete_beta(0.5, 2.0, 1.0).unwrap(), 0.125, epsilon = 1e-14);
    // ∫₀^{1/2} t²/(1−t) dt = ln 2 − 5/8
    assert_abs_diff_eq!(incomplete_beta(0.5, 3.0, 0.0).unwrap(), 0.068_147_180_559_945_309_42, epsilon = 1e-13);
    assert!(incomplete_beta(1.0, 1.0, 1.0).is_err());

    assert_abs_diff_eq!(generalized_incomplete_gamma(1.0, 0.0, 1.0).unwrap(), 1.0 - (-1f64).exp(), epsilon = 1e-14);
    assert_abs_diff_eq!(generalized_incomplete_gamma(2.0, 0.0, 1.0).unwrap(), 1.0 - 2.0 * (-1f64).exp(), epsilon = 1e-14);
    assert_abs_diff_eq!(generalized_incomplete_gamma(1.5, 0.2, 0.8).unwrap(), 0.248_899_202_783_316_633_6, epsilon = 1e-14);
    assert!(generalized_incomplete_gamma(1.0, 0.5, 0.5).is_err());

    assert_abs_diff_eq!(generalized_sine_integral(1.0, 0.0, 1.0).unwrap(), 1.0 - 1f64.cos(), epsilon = 1e-14);
    assert_abs_diff_eq!(generalized_sine_integral(2.0, 0.0, 1.0).unwrap(), 1f64.sin() - 1f64.cos(), epsilon = 1e-14);
    assert_abs_diff_eq!(generalized_sine_integral(3.0, 0.1, 0.9).unwrap(), 0.149_679_327_338_923_897_5, epsilon = 1e-14);
}

#[test]
fn falling_factorial_points() {
    assert_eq!(falling_factorial(5.0, 3), 60.0);
    assert_eq!(falling_factorial(0.5, 2), -0.25);
    assert_eq!(falling_factorial(-7.3, 0), 1.0);
}

fn eigen_residual(beta: f64, step: f64) -> f64 {
    let samples: Vec<(f64, f64)> = (0..=(1.0 / step).round() as usize)
        .map(|k| {
            let t = k as f64 * step;
            (t, mittag_leffler(beta, 1.0, 1.0, -t.powf(beta), &cfg()).unwrap().value)
        })
        .collect();
    let d = caputo_derivative_numeric(&samples, beta, 1.0, step).unwrap();
    (d + samples.last().unwrap().1).abs()
}

#[test]
fn caputo_eigenfunction_residual_shrinks_with_step() {
    let coarse = eigen_residual(0.5, 1e-2);
    let fine = eigen_residual(0.5, 1e-3);
    assert!(fine < 5e-2);
    let order = (coarse / fine).log10();
    assert!(order >= 0.8, "observed order {order}");
}

#[test]
fn caputo_of_linear_and_constant() {
    let step = 1e-3;
    let line: Vec<(f64, f64)> = (0..=1000).map(|k| (k as f64 * step, k as f64 * step)).collect();
    assert_abs_diff_eq!(caputo_derivative_numeric(&line, 1.0, 1.0, step).unwrap(), 1.0, epsilon = 1e-9);
    let flat: Vec<(f64, f64)> = line.iter().map(|&(t, _)| (t, 3.0)).collect();
    assert_abs_diff_eq!(caputo_derivative_numeric(&flat, 0.4, 1.0, step).unwrap(), 0.0, epsilon = 1e-12);
}

proptest! {
    #[test]
    fn exponential_special_case(x in -5.0f64..5.0) {
        let v = mittag_leffler(1.0, 1.0, 1.0, x, &cfg()).unwrap().value;
        prop_assert!((v - x.exp()).abs() <= 1e-12 * x.exp().max(1.0));
    }

    #[test]
    fn wright_matches_scaled_mittag_leffler(
        g in 0.2f64..3.0, b in 0.2f64..2.0, a in 0.2f64..1.5, x in -2.5f64..2.5,
    ) {
        let w = wright_1_1(g, 1.0, b, a, x, &cfg()).unwrap();
        let e = mittag_leffler(a, b, g, x, &cfg()).unwrap();
        let m = gamma(g) * e.value;
        // flagged sums keep only an absolute accuracy proportional to their largest term
        let floor = if w.quality.is_clean() && e.quality.is_clean() {
            0.0
        } else {
            1e-26 * w.max_term.max(gamma(g) * e.max_term)
        };
        prop_assert!((w.value - m).abs() <= 1e-10 * m.abs().max(1.0) + floor, "{} vs {m}", w.value);
    }

    #[test]
    fn reciprocal_gamma_inverts_gamma(x in 0.1f64..10.0) {
        prop_assert!((reciprocal_gamma(x) * gamma(x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incomplete_beta_increases(x in 0.01f64..0.98, dx in 0.001f64..0.01, p in 0.2f64..4.0, q in 0.0f64..4.0) {
        let lo = incomplete_beta(x, p, q).unwrap();
        let hi = incomplete_beta(x + dx, p, q).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn incomplete_gamma_is_additive(x in 0.5f64..5.0, p in 0.0f64..0.3, m in 0.35f64..0.6, q in 0.65f64..1.0) {
        let whole = generalized_incomplete_gamma(x, p, q).unwrap();
        let parts = generalized_incomplete_gamma(x, p, m).unwrap() + generalized_incomplete_gamma(x, m, q).unwrap();
        prop_assert!((whole - parts).abs() < 1e-13);
    }
}
