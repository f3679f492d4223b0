/// `(ln|Γ(x)|, sign Γ(x))`; at the poles the sign is 0 and the log is `+∞`.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if is_pole(x) {
        return (f64::INFINITY, 0.0);
    }
    let (lg, s) = libm::lgamma_r(x);
    (lg, if s < 0 { -1.0 } else { 1.0 })
}

/// Γ(x); `NaN` at the poles.
pub fn gamma(x: f64) -> f64 {
    if is_pole(x) {
        return f64::NAN;
    }
    libm::tgamma(x)
}

/// 1/Γ(x), exactly zero at x ∈ {0, −1, −2, …}.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if is_pole(x) {
        return 0.0;
    }
    if x.abs() < 170.0 {
        return 1.0 / libm::tgamma(x);
    }
    let (lg, s) = ln_gamma_signed(x);
    s * (-lg).exp()
}

/// ln(n!).
pub fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Falling factorial (x)_k = x(x−1)…(x−k+1); (x)_0 = 1.
pub fn falling_factorial(x: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (x - i as f64))
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}
