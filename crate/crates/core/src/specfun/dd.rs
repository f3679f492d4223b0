//! Double-double arithmetic (about 31 significant digits), used to re-sum alternating
//! series whose largest term dwarfs the result.

use super::series::{SeriesConfig, SeriesMonitor};
use super::Evaluated;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

const LN2: Dd = Dd { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };
const HALF_LN_2PI: Dd = Dd { hi: 0.9189385332046728, lo: -3.8782941580672414e-17 };

/// B_{2k} / (2k(2k−1)) as exact numerator/denominator pairs.
const STIRLING: [(f64, f64); 13] = [
    (1.0, 12.0),
    (-1.0, 360.0),
    (1.0, 1260.0),
    (-1.0, 1680.0),
    (1.0, 1188.0),
    (-691.0, 360360.0),
    (1.0, 156.0),
    (-3617.0, 122400.0),
    (43867.0, 244188.0),
    (-174611.0, 125400.0),
    (77683.0, 5796.0),
    (-236364091.0, 1506960.0),
    (657931.0, 300.0),
];

/// Arguments are shifted up to at least this before the asymptotic series is used.
const STIRLING_MIN: f64 = 30.0;

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn exp(self) -> Self {
        if self.hi < -745.0 {
            return Self::default();
        }
        if self.hi > 709.0 {
            return Self::new(f64::INFINITY);
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * Self::new(k)).ldexp(-5);
        let mut term = Self::new(1.0);
        let mut sum = Self::new(1.0);
        for n in 1..=15 {
            term = term * r / Self::new(n as f64);
            sum = sum + term;
        }
        for _ in 0..5 {
            sum = sum * sum;
        }
        sum.ldexp(k as i32)
    }

    /// Natural log of a positive value; one Newton step from the f64 estimate.
    pub fn ln(self) -> Self {
        let y = Self::new(self.hi.ln());
        y + self * (-y).exp() - Self::new(1.0)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let s = two_sum(self.hi, y.hi);
        let t = two_sum(self.lo, y.lo);
        let u = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(u.hi, u.lo + t.lo)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let p = self.hi * y.hi;
        let e = self.hi.mul_add(y.hi, -p) + (self.hi * y.lo + self.lo * y.hi);
        quick_two_sum(p, e)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * Dd::new(q1);
        let q2 = r.hi / y.hi;
        let r = r - y * Dd::new(q2);
        let q3 = r.hi / y.hi;
        quick_two_sum(q1, q2) + Dd::new(q3)
    }
}

/// Largest-term / result ratio above which a series is re-summed in double-double.
pub(crate) const RESUM_RATIO: f64 = 1e2;

/// Σ_r term(r) in double-double, stopped against the double-double partial sum.
pub(crate) fn resum(cfg: &SeriesConfig, mut term: impl FnMut(usize) -> Dd) -> Evaluated<f64> {
    let mut monitor = SeriesMonitor::new(*cfg);
    let mut sum = Dd::default();
    for r in 0..cfg.max_terms {
        let t = term(r);
        sum = sum + t;
        if monitor.push(t.to_f64().abs(), sum.to_f64().abs()) {
            break;
        }
    }
    let v = sum.to_f64();
    monitor.finish(v, v.abs())
}

/// `a + b·r` without rounding the product.
pub(crate) fn affine(a: f64, b: f64, r: usize) -> Dd {
    Dd::new(a) + Dd::new(b) * Dd::new(r as f64)
}

/// `(ln|Γ(x)|, sign Γ(x))` in double-double; `sign = 0` at the poles.
pub(crate) fn ln_gamma_signed(x: Dd) -> (Dd, f64) {
    if x.lo == 0.0 && x.hi <= 0.0 && x.hi == x.hi.floor() {
        return (Dd::new(f64::INFINITY), 0.0);
    }
    // Γ(x) = Γ(x + n) / (x (x+1) … (x+n−1))
    let mut y = x;
    let mut prod = Dd::new(1.0);
    while y.hi < STIRLING_MIN {
        prod = prod * y;
        y = y + Dd::new(1.0);
    }
    let sign = prod.hi.signum();
    let abs_prod = if sign < 0.0 { -prod } else { prod };
    let inv = Dd::new(1.0) / y;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut tail = Dd::default();
    for (num, den) in STIRLING {
        tail = tail + pow * Dd::new(num) / Dd::new(den);
        pow = pow * inv2;
    }
    let ln_y = y.ln();
    let stirling = (y - Dd::new(0.5)) * ln_y - y + HALF_LN_2PI + tail;
    (stirling - abs_prod.ln(), sign)
}
