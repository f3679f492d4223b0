use approx::assert_abs_diff_eq;
use mgcp::quadrature::{gauss_kronrod, semi_infinite, Tolerance};
use mgcp::subordinators::*;
use mgcp::SeriesConfig;

const LEVY: [SubordinatorSpec; 4] = [
    SubordinatorSpec::Stable { alpha: 0.7 },
    SubordinatorSpec::TemperedStable { alpha: 0.6, theta: 1.5 },
    SubordinatorSpec::Gamma { a: 2.0, b: 1.5 },
    SubordinatorSpec::InverseGaussian { delta: 1.0, gamma: 1.0 },
];

fn tol() -> Tolerance {
    Tolerance::new(1e-12, 1e-10)
}

/// ∫₀^∞ f(s) ds with s = u⁴ on (0, 1] to soften power singularities at the origin.
fn integrate(f: impl Fn(f64) -> f64) -> f64 {
    let near = gauss_kronrod(|u| f(u.powi(4)) * 4.0 * u.powi(3), 0.0, 1.0, tol()).unwrap().value;
    near + semi_infinite(&f, 1.0, tol()).unwrap().value
}

fn draws(spec: &SubordinatorSpec, t: f64, n: usize, stream: u64) -> Vec<f64> {
    let mut rng = RngSeed::new(11, stream).rng();
    (0..n).map(|_| sample(spec, t, &mut rng).unwrap()).collect()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn bernstein_representation_of_the_exponent() {
    for spec in LEVY {
        let f = integrate(|s| -(-s).exp_m1() * levy_density(&spec, s).unwrap());
        assert_abs_diff_eq!(f, laplace_exponent(&spec, 1.0).unwrap(), epsilon = 1e-7);
    }
}

#[test]
fn gamma_clock_density() {
    assert_abs_diff_eq!(integrate(|x| gamma_density(2.0, 1.5, x, 0.7)), 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(integrate(|x| x * gamma_density(2.0, 3.0, x, 1.0)), 1.5, epsilon = 1e-9);
}

#[test]
fn inverse_gaussian_clock_density() {
    assert_abs_diff_eq!(integrate(|x| ig_density(1.0, 1.0, x, 1.0)), 1.0, epsilon = 1e-9);
    let lt = integrate(|x| (-x).exp() * ig_density(1.0, 1.0, x, 1.0));
    assert_abs_diff_eq!(lt, (-(3f64.sqrt() - 1.0)).exp(), epsilon = 1e-9);
}

#[test]
fn inverse_stable_moment_points() {
    assert_abs_diff_eq!(inverse_stable_moment(0.5, 2, 2.0), 4.0, epsilon = 1e-14);
    assert_eq!(inverse_stable_moment(0.3, 0, 5.0), 1.0);
    assert_abs_diff_eq!(inverse_stable_moment(0.5, 1, 1.0), 2.0 / std::f64::consts::PI.sqrt(), epsilon = 1e-15);
}

#[test]
fn sampler_means() {
    let (m, se) = mean_and_se(&draws(&SubordinatorSpec::Gamma { a: 2.0, b: 3.0 }, 1.0, 100_000, 1));
    assert!((m - 1.5).abs() <= 3.0 * se, "{m} ± {se}");
    let (m, se) = mean_and_se(&draws(&SubordinatorSpec::InverseStable { beta: 0.5 }, 1.0, 100_000, 2));
    assert!((m - 2.0 / std::f64::consts::PI.sqrt()).abs() <= 3.0 * se, "{m} ± {se}");
    let e: Vec<f64> = draws(&SubordinatorSpec::Stable { alpha: 0.9 }, 1.0, 100_000, 3).iter().map(|d| (-d).exp()).collect();
    let (m, se) = mean_and_se(&e);
    assert!((m - (-1f64).exp()).abs() <= 3.0 * se, "{m} ± {se}");
}

#[test]
fn empirical_laplace_transforms() {
    let all = [
        LEVY[0],
        LEVY[1],
        LEVY[2],
        LEVY[3],
        SubordinatorSpec::InverseStable { beta: 0.6 },
        SubordinatorSpec::StableTimeInverseStable { alpha: 0.7, beta: 0.8 },
    ];
    for (k, spec) in all.iter().enumerate() {
        let d = draws(spec, 1.3, 100_000, 10 + k as u64);
        for s in [0.5, 1.0, 2.0] {
            let e: Vec<f64> = d.iter().map(|x| (-s * x).exp()).collect();
            let (m, se) = mean_and_se(&e);
            let want = laplace_transform(spec, s, 1.3, &SeriesConfig::default()).unwrap();
            assert!((m - want).abs() <= 4.0 * se, "{spec:?} s={s}: {m} vs {want} (se {se})");
        }
    }
}

#[test]
fn inverse_stable_empirical_moments() {
    for (k, beta) in [0.3, 0.5, 0.8].into_iter().enumerate() {
        let d = draws(&SubordinatorSpec::InverseStable { beta }, 1.0, 100_000, 20 + k as u64);
        for n in [1u32, 2] {
            let m = d.iter().map(|x| x.powi(n as i32)).sum::<f64>() / d.len() as f64;
            let want = inverse_stable_moment(beta, n, 1.0);
            assert!((m / want - 1.0).abs() < 0.02, "beta={beta} n={n}: {m} vs {want}");
        }
    }
}

fn ks_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn weak_tempering_approaches_stable() {
    let tempered = draws(&SubordinatorSpec::TemperedStable { alpha: 0.6, theta: 1e-4 }, 1.0, 10_000, 30);
    let stable = draws(&SubordinatorSpec::Stable { alpha: 0.6 }, 1.0, 10_000, 31);
    let d = ks_distance(tempered, stable);
    assert!(d < 0.05, "KS distance {d}");
}

#[test]
fn draws_are_reproducible() {
    for spec in LEVY {
        assert_eq!(draws(&spec, 0.8, 50, 5), draws(&spec, 0.8, 50, 5));
        assert_ne!(draws(&spec, 0.8, 50, 5), draws(&spec, 0.8, 50, 6));
    }
}

#[test]
fn parameters_are_validated() {
    assert!(SubordinatorSpec::Stable { alpha: 1.0 }.validate().is_err());
    assert!(SubordinatorSpec::Gamma { a: -1.0, b: 1.0 }.validate().is_err());
    assert!(laplace_exponent(&SubordinatorSpec::InverseStable { beta: 0.5 }, 1.0).is_err());
    assert!(levy_density(&SubordinatorSpec::Stable { alpha: 0.5 }, 0.0).is_err());
}
