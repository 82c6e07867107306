//! Double-double ("extended") arithmetic.
//!
//! The occupancy and S-shaped formulas are alternating binomial sums whose
//! terms grow like `3^k` while the result stays in `[0, 1]`. Evaluating the
//! order-size PGF and accumulating those sums with ~106 significant bits keeps
//! the cancellation harmless well past the aisle counts used in practice.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// An unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub const fn new(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }

    /// Exact conversion of integers up to 2^106.
    pub fn from_u128(n: u128) -> Self {
        let hi = n as f64;
        // `hi` may round; the remainder is exactly representable.
        let rem = n as i128 - hi as i128;
        let (s, e) = quick_two_sum(hi, rem as f64);
        Dd { hi: s, lo: e }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Multiply by `2^e`, exact.
    pub fn ldexp(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn powi(self, mut n: u32) -> Self {
        let mut base = self;
        let mut acc = Dd::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    pub fn exp(self) -> Self {
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        // exp(a) = 2^m * exp(r)^(2^10), |r| <= ln2 / 2^11.
        let m = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(m)).ldexp(-10);
        // Taylor series; |r| < 3.4e-4 so 12 terms exceed double-double precision.
        let mut term = r;
        let mut sum = r;
        for i in 2..=12 {
            term = term * r / Dd::new(i as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        // expm1 doubling keeps the small result accurate: (1+s)^2 - 1 = s(2+s).
        for _ in 0..10 {
            sum = sum * (sum + Dd::new(2.0));
        }
        (sum + Dd::ONE).ldexp(m as i32)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Exact binomial coefficient for `n <= 128`.
pub fn binomial(n: u32, r: u32) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r as u128 {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

/// Running double-double sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct DdSum(Dd);

impl DdSum {
    pub fn add(&mut self, x: Dd) {
        self.0 = self.0 + x;
    }

    pub fn value(self) -> Dd {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_matches_f64_and_is_multiplicative() {
        for &x in &[-30.0, -5.5, -1.0, -1e-3, 0.0, 0.3, 2.0] {
            let e = Dd::new(x).exp();
            assert!((e.to_f64() - f64::exp(x)).abs() <= 2e-16 * f64::exp(x));
            let one = e * Dd::new(-x).exp();
            assert!((one - Dd::ONE).abs().hi < 1e-30, "x = {x}: {one:?}");
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Dd::new(1.0) / Dd::new(3.0);
        let back = a * Dd::new(3.0) - Dd::ONE;
        assert!(back.abs().hi < 1e-31);
        // 1/3 = 0.333... needs the low word to be nonzero
        assert!(a.lo != 0.0);
    }

    #[test]
    fn binomials_are_exact() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
        assert_eq!(binomial(3, 5), 0);
        let d = Dd::from_u128(binomial(64, 32));
        assert_eq!(d.hi as i128 + d.lo as i128, 1_832_624_140_942_590_534);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = Dd::new(0.7) / Dd::new(3.0);
        let mut p = Dd::ONE;
        for _ in 0..13 {
            p = p * x;
        }
        assert!((p - x.powi(13)).abs().hi < 1e-30 * p.hi);
    }
}
