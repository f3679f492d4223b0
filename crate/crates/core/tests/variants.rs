use approx::assert_abs_diff_eq;
use mgcp::gcp::{mgcp_pmf, pmf_box};
use mgcp::quadrature::{semi_infinite, Tolerance};
use mgcp::specfun::{falling_factorial, gamma, mittag_leffler};
use mgcp::subordinators::{gamma_density, laplace_exponent};
use mgcp::variants::*;
use mgcp::{RateMatrix, RngSeed, SeriesConfig, VariantSpec};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

fn fig1() -> RateMatrix {
    RateMatrix::new(vec![vec![0.5], vec![0.5, 0.5]]).unwrap()
}

fn cfg() -> SeriesConfig {
    SeriesConfig::default()
}

fn pmf(v: &VariantSpec, r: &RateMatrix, n: &[usize], t: f64) -> f64 {
    variant_pmf(v, r, n, t, &cfg()).unwrap().value
}

const LEVY: [VariantSpec; 4] = [
    VariantSpec::Mgsfcp { alpha: 0.7 },
    VariantSpec::Tempered { alpha: 0.6, theta: 1.5 },
    VariantSpec::Gamma { a: 2.0, b: 1.5 },
    VariantSpec::Ig { delta: 1.0, gamma: 1.0 },
];

const ALL: [VariantSpec; 7] = [
    VariantSpec::Mgcp,
    VariantSpec::Mgsfcp { alpha: 0.8 },
    VariantSpec::Mgfcp { beta: 0.5 },
    VariantSpec::Mgstfcp { alpha: 0.8, beta: 0.5 },
    VariantSpec::Tempered { alpha: 0.5, theta: 1.0 },
    VariantSpec::Gamma { a: 1.0, b: 1.0 },
    VariantSpec::Ig { delta: 1.0, gamma: 1.0 },
];

#[test]
fn gamma_clock_pmf_against_quadrature() {
    // ∫ 0.25x² e^{−1.5x} e^{−x} dx = 0.032
    let v = VariantSpec::Gamma { a: 1.0, b: 1.0 };
    assert_abs_diff_eq!(pmf(&v, &fig1(), &[1, 1], 1.0), 0.032, epsilon = 1e-14);
    let tol = Tolerance::new(1e-14, 1e-12);
    let oracle = semi_infinite(|x| mgcp_pmf(&fig1(), &[1, 1], x).unwrap() * gamma_density(1.0, 1.0, x, 1.0), 0.0, tol)
        .unwrap()
        .value;
    assert_abs_diff_eq!(pmf(&v, &fig1(), &[1, 1], 1.0), oracle, epsilon = 1e-8);
}

#[test]
fn origin_probabilities() {
    let lam: f64 = fig1().total();
    assert_abs_diff_eq!(pmf(&VariantSpec::Mgsfcp { alpha: 0.7 }, &fig1(), &[0, 0], 1.3), (-lam.powf(0.7) * 1.3).exp(), epsilon = 1e-15);
    let e = mittag_leffler(0.5, 1.0, 1.0, -lam * 2f64.sqrt(), &cfg()).unwrap().value;
    assert_abs_diff_eq!(pmf(&VariantSpec::Mgfcp { beta: 0.5 }, &fig1(), &[0, 0], 2.0), e, epsilon = 1e-15);
    for v in ALL {
        assert_eq!(pmf(&v, &fig1(), &[0, 0], 0.0), 1.0);
        assert_eq!(pmf(&v, &fig1(), &[1, 0], 0.0), 0.0);
    }
}

#[test]
fn single_size_matches_scalar_series() {
    // P(N = n) = ((−1)^n / n!) Σ_r (−λ^α t)^r / r! · (αr)(αr − 1)…(αr − n + 1)
    let (alpha, lam, t) = (0.6, 0.7f64, 1.0);
    let v = VariantSpec::Mgsfcp { alpha };
    let one = RateMatrix::new(vec![vec![lam]]).unwrap();
    let x = -lam.powf(alpha) * t;
    for n in 0..8usize {
        let mut sum = 0.0;
        let mut power = 1.0;
        for r in 0..80 {
            sum += power * falling_factorial(alpha * r as f64, n);
            power *= x / (r + 1) as f64;
        }
        let want = if n % 2 == 0 { sum } else { -sum } / gamma(n as f64 + 1.0);
        assert_abs_diff_eq!(pmf(&v, &one, &[n], t), want, epsilon = 1e-13);
    }
}

#[test]
fn wright_route_agrees() {
    for v in [VariantSpec::Mgsfcp { alpha: 0.7 }, VariantSpec::Tempered { alpha: 0.7, theta: 0.8 }] {
        for n in box_cells(&[4, 4]) {
            let w = variant_pmf_wright(&v, &fig1(), &n, 1.0, &cfg()).unwrap().value;
            assert_abs_diff_eq!(w, pmf(&v, &fig1(), &n, 1.0), epsilon = 1e-10);
        }
    }
}

#[test]
fn weak_tempering_reduces_to_stable() {
    let stable = VariantSpec::Mgsfcp { alpha: 0.7 };
    let tempered = VariantSpec::Tempered { alpha: 0.7, theta: 1e-8 };
    for n in box_cells(&[4, 4]) {
        assert_abs_diff_eq!(pmf(&tempered, &fig1(), &n, 1.0), pmf(&stable, &fig1(), &n, 1.0), epsilon = 1e-6);
    }
}

#[test]
fn unit_fractional_order_reduces_to_stable_clock() {
    let a = VariantSpec::Mgstfcp { alpha: 0.7, beta: 1.0 - 1e-7 };
    let b = VariantSpec::Mgsfcp { alpha: 0.7 };
    for n in box_cells(&[3, 3]) {
        assert_abs_diff_eq!(pmf(&a, &fig1(), &n, 1.0), pmf(&b, &fig1(), &n, 1.0), epsilon = 1e-6);
    }
}

#[test]
fn pgf_points() {
    for v in ALL {
        assert_abs_diff_eq!(variant_pgf(&v, &fig1(), &[1.0, 1.0], 1.7, &cfg()).unwrap().value, 1.0, epsilon = 1e-15);
        assert!(variant_pgf(&v, &fig1(), &[1.1, 0.0], 1.0, &cfg()).is_err());
    }
    let four = RateMatrix::new(vec![vec![4.0]]).unwrap();
    let t = 0.8;
    assert_abs_diff_eq!(
        variant_pgf(&VariantSpec::Mgsfcp { alpha: 0.5 }, &four, &[0.0], t, &cfg()).unwrap().value,
        (-2.0 * t).exp(),
        epsilon = 1e-15
    );
    let r = RateMatrix::new(vec![vec![0.5], vec![0.5, 0.5]]).unwrap();
    assert_abs_diff_eq!(
        variant_pgf(&VariantSpec::Ig { delta: 1.0, gamma: 1.0 }, &r, &[0.0, 0.0], 1.0, &cfg()).unwrap().value,
        (-1f64).exp(),
        epsilon = 1e-15
    );
}

#[test]
fn normalization_and_pgf_consistency() {
    let r = RateMatrix::new(vec![vec![0.4, 0.3], vec![0.6]]).unwrap();
    let base = pmf_box(&r, 2.0);
    for v in ALL {
        // heavy-tailed clocks need a wider box than the base process
        let upper: Vec<usize> = base.iter().map(|&b| 3 * b + 20).collect();
        let cells = variant_pmf_box(&v, &r, &upper, 1.0, &cfg()).unwrap();
        let mass: f64 = cells.iter().map(|(_, p)| p.value).sum();
        // stable clocks have power-law batch sizes, so a finite box keeps visible tail mass
        let floor = match v {
            VariantSpec::Mgsfcp { .. } | VariantSpec::Mgstfcp { .. } => 0.98,
            _ => 1.0 - 1e-4,
        };
        assert!(mass >= floor && mass <= 1.0 + 1e-10, "{v:?}: mass {mass}");
        let partial: f64 = cells.iter().map(|(n, p)| p.value * 0.3f64.powi((n[0] + n[1]) as i32)).sum();
        let pgf = variant_pgf(&v, &r, &[0.3, 0.3], 1.0, &cfg()).unwrap().value;
        assert!(partial <= pgf + 1e-12 && pgf - partial <= 1.0 - mass + 1e-12, "{v:?}: {partial} vs {pgf}");
    }
}

#[test]
fn pgf_evolution_equations() {
    let r = fig1();
    let u = [0.4, 0.7];
    let s = r.pgf_exponent(&u).unwrap();
    for v in LEVY {
        let f = laplace_exponent(&v.clock().unwrap(), s).unwrap();
        let g = |t: f64| variant_pgf(&v, &r, &u, t, &cfg()).unwrap().value;
        let h = 1e-4;
        let d = (g(1.0 + h) - g(1.0 - h)) / (2.0 * h);
        assert_abs_diff_eq!(d, -f * g(1.0), epsilon = 1e-8);
    }
}

#[test]
fn minimum_of_uniforms_representation() {
    // P{min_{l≤K} U_l^{1/α} ≥ s/λ} with K ~ Poisson(λ^α t) is the stable-clock pgf
    let (alpha, t) = (0.6, 1.0);
    let r = fig1();
    let u = [0.3, 0.6];
    let lam = r.total();
    let c = r.pgf_exponent(&u).unwrap() / lam;
    let pois = Poisson::new(lam.powf(alpha) * t).unwrap();
    let mut rng = RngSeed::new(99, 0).rng();
    let n = 100_000;
    let hits = (0..n)
        .filter(|_| {
            let k = pois.sample(&mut rng) as usize;
            (0..k).all(|_| rng.random::<f64>().powf(1.0 / alpha) >= c)
        })
        .count();
    let p_hat = hits as f64 / n as f64;
    let p = variant_pgf(&VariantSpec::Mgsfcp { alpha }, &r, &u, t, &cfg()).unwrap().value;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    assert!((p_hat - p).abs() <= 3.0 * se, "{p_hat} vs {p}");
}

#[test]
fn transition_rates() {
    let r = fig1();
    assert_eq!(variant_transition_rate(&VariantSpec::Mgcp, &r, &[0, 2]).unwrap(), 0.5);
    assert_eq!(variant_transition_rate(&VariantSpec::Mgcp, &r, &[1, 1]).unwrap(), 0.0);
    let one = RateMatrix::new(vec![vec![1.0]]).unwrap();
    assert_abs_diff_eq!(
        variant_transition_rate(&VariantSpec::Gamma { a: 1.0, b: 1.0 }, &one, &[2]).unwrap(),
        0.125,
        epsilon = 1e-15
    );
    for v in [VariantSpec::Mgfcp { beta: 0.5 }, VariantSpec::Mgstfcp { alpha: 0.5, beta: 0.5 }] {
        assert!(variant_transition_rate(&v, &r, &[1, 0]).is_err());
        assert!(holding_rate(&v, &r).is_err());
    }
}

#[test]
fn rates_sum_to_holding_rate() {
    let r = fig1();
    for v in [VariantSpec::Tempered { alpha: 0.6, theta: 1.5 }, VariantSpec::Gamma { a: 2.0, b: 1.5 }, VariantSpec::Ig { delta: 1.0, gamma: 1.0 }] {
        // every batch of at most 60 clock events lies inside the box
        let s: f64 = box_cells(&[60, 120]).skip(1).map(|m| variant_transition_rate(&v, &r, &m).unwrap()).sum();
        assert_abs_diff_eq!(s, holding_rate(&v, &r).unwrap(), epsilon = 1e-7);
    }
    // stable clock: a batch of X ≤ 15 events has total size ≤ 30, so the box misses at most
    // λ^α P(X > 15) of the mass, with P(X > n) = Π_{j≤n} (j − α)/j
    let alpha = 0.7;
    let v = VariantSpec::Mgsfcp { alpha };
    let s: f64 = box_cells(&[30, 30]).skip(1).map(|m| variant_transition_rate(&v, &r, &m).unwrap()).sum();
    let total = holding_rate(&v, &r).unwrap();
    let tail: f64 = (1..=15).map(|j| (j as f64 - alpha) / j as f64).product();
    assert!(s <= total + 1e-12 && total - s <= total * tail, "{s} vs {total}");
}

#[test]
fn levy_measures() {
    let one = RateMatrix::new(vec![vec![1.0]]).unwrap();
    for n in 1..10usize {
        let m = variant_levy_measure(&VariantSpec::Gamma { a: 1.0, b: 2.0 }, &one, &[n]).unwrap();
        assert_abs_diff_eq!(m, 2.0 * 0.5f64.powi(n as i32) / n as f64, epsilon = 1e-15);
        let alpha = 0.6;
        let lam: f64 = 1.0;
        let want = lam.powf(alpha) * alpha * gamma(n as f64 - alpha) / (gamma(1.0 - alpha) * gamma(n as f64 + 1.0));
        let got = variant_levy_measure(&VariantSpec::Mgsfcp { alpha }, &one, &[n]).unwrap();
        assert_abs_diff_eq!(got, want, epsilon = 1e-14);
    }
    assert!(variant_levy_measure(&VariantSpec::Mgcp, &one, &[0]).is_err());
    for v in LEVY {
        for m in box_cells(&[3, 3]).skip(1) {
            assert_abs_diff_eq!(
                variant_levy_measure(&v, &fig1(), &m).unwrap(),
                variant_transition_rate(&v, &fig1(), &m).unwrap(),
                epsilon = 1e-12
            );
        }
    }
}

#[test]
fn covariance_points() {
    let one = RateMatrix::new(vec![vec![1.0]]).unwrap();
    let g = gamma(1.5);
    let want = 1.0 / g + 2.0 - 1.0 / (g * g);
    assert_abs_diff_eq!(covariance(&VariantSpec::Mgfcp { beta: 0.5 }, &one, 0, 0, 1.0).unwrap(), want, epsilon = 1e-14);
    assert_abs_diff_eq!(want, 1.855_139_7, epsilon = 1e-7);
    assert_abs_diff_eq!(covariance(&VariantSpec::Mgfcp { beta: 1.0 }, &fig1(), 0, 1, 1.0).unwrap(), 0.0, epsilon = 1e-15);
    assert!(covariance(&VariantSpec::Gamma { a: 1.0, b: 1.0 }, &fig1(), 0, 1, 1.0).is_err());
}

#[test]
fn codifference_of_independent_components_vanishes() {
    let c = codifference(&VariantSpec::Mgfcp { beta: 1.0 }, &fig1(), 0, 1, 1.3, &cfg()).unwrap();
    assert!(c.value.norm() < 1e-14, "{:?}", c.value);
    let c = codifference(&VariantSpec::Mgfcp { beta: 0.6 }, &fig1(), 0, 1, 1.3, &cfg()).unwrap();
    assert!(c.value.norm() > 1e-3);
}

proptest! {
    #[test]
    fn pmf_is_a_probability(
        which in 0usize..7, n1 in 0usize..6, n2 in 0usize..6, t in 0.1f64..2.5,
    ) {
        let p = pmf(&ALL[which], &fig1(), &[n1, n2], t);
        prop_assert!((0.0..=1.0).contains(&p), "{p}");
    }

    #[test]
    fn stable_pgf_decreases_in_time(alpha in 0.1f64..1.0, u in 0.0f64..0.99, t in 0.1f64..3.0) {
        let v = VariantSpec::Mgsfcp { alpha };
        let a = variant_pgf(&v, &fig1(), &[u, u], t, &cfg()).unwrap().value;
        let b = variant_pgf(&v, &fig1(), &[u, u], t + 0.1, &cfg()).unwrap().value;
        prop_assert!(b < a);
    }
}
