//! Order-size distributions described by their probability generating function.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Geometric, Poisson};

use crate::error::{domain, Error, Result};
use crate::ext::Dd;

/// Law of the number of items `M >= 1` in an order.
///
/// Every variant is stored by its mean so that the textual form
/// (`geom:32`, `spois:4`, ...) survives a parse/display round trip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderSizeDistribution {
    /// `M = m` almost surely.
    Deterministic { m: u32 },
    /// `M = 1 + Poisson(mean - 1)`.
    ShiftedPoisson { mean: f64 },
    /// Geometric on `{1, 2, ...}` with success probability `1 / mean`.
    Geometric { mean: f64 },
    /// `r` plus the number of failures before the `r`-th success, success
    /// probability `r / mean`; supported on `{r, r + 1, ...}`.
    ShiftedNegBinomial { r: u32, mean: f64 },
}

impl OrderSizeDistribution {
    pub fn deterministic(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(domain("m", 0.0, "order size must be at least 1"));
        }
        Ok(Self::Deterministic { m })
    }

    pub fn shifted_poisson(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(domain("lambda", lambda, "must be finite and >= 0"));
        }
        Ok(Self::ShiftedPoisson { mean: lambda + 1.0 })
    }

    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(domain("p", p, "success probability must lie in (0, 1]"));
        }
        Ok(Self::Geometric { mean: 1.0 / p })
    }

    pub fn shifted_neg_binomial(r: u32, p: f64) -> Result<Self> {
        if r == 0 {
            return Err(domain("r", 0.0, "number of successes must be at least 1"));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(domain("p", p, "success probability must lie in (0, 1]"));
        }
        Ok(Self::ShiftedNegBinomial {
            r,
            mean: r as f64 / p,
        })
    }

    fn check_mean(mean: f64, min: f64) -> Result<()> {
        if !(mean.is_finite() && mean >= min) {
            return Err(domain("mean", mean, "order-size mean below the support minimum"));
        }
        Ok(())
    }

    pub fn shifted_poisson_with_mean(mean: f64) -> Result<Self> {
        Self::check_mean(mean, 1.0)?;
        Ok(Self::ShiftedPoisson { mean })
    }

    pub fn geometric_with_mean(mean: f64) -> Result<Self> {
        Self::check_mean(mean, 1.0)?;
        Ok(Self::Geometric { mean })
    }

    pub fn shifted_neg_binomial_with_mean(r: u32, mean: f64) -> Result<Self> {
        if r == 0 {
            return Err(domain("r", 0.0, "number of successes must be at least 1"));
        }
        Self::check_mean(mean, r as f64)?;
        Ok(Self::ShiftedNegBinomial { r, mean })
    }

    /// `E[M]`.
    pub fn mean(&self) -> f64 {
        match *self {
            Self::Deterministic { m } => m as f64,
            Self::ShiftedPoisson { mean }
            | Self::Geometric { mean }
            | Self::ShiftedNegBinomial { mean, .. } => mean,
        }
    }

    /// `(E[M], E[M(M-1)])`, i.e. `P'(1)` and `P''(1)`.
    pub fn moments(&self) -> (f64, f64) {
        let fact2 = match *self {
            Self::Deterministic { m } => {
                let m = m as f64;
                m * (m - 1.0)
            }
            Self::ShiftedPoisson { mean } => {
                let lam = mean - 1.0;
                lam * lam + 2.0 * lam
            }
            Self::Geometric { mean } => {
                let p = 1.0 / mean;
                2.0 * (1.0 - p) / (p * p)
            }
            Self::ShiftedNegBinomial { r, mean } => {
                let r = r as f64;
                let p = r / mean;
                (r * (r - 1.0) + 2.0 * r * (1.0 - p)) / (p * p)
            }
        };
        (self.mean(), fact2)
    }

    /// `E[M^2]`.
    pub fn second_moment(&self) -> f64 {
        let (m1, f2) = self.moments();
        f2 + m1
    }

    /// `E[x^M]` for `x` in `[0, 1]`.
    pub fn pgf(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        Ok(self.pgf_at(x))
    }

    /// `d/dx E[x^M]` for `x` in `[0, 1]`.
    pub fn pgf_prime(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        Ok(self.pgf_prime_at(x))
    }

    /// Unchecked PGF; callers guarantee `x` in `[0, 1]`.
    pub(crate) fn pgf_at(&self, x: f64) -> f64 {
        debug_assert!((-1e-12..=1.0 + 1e-12).contains(&x), "pgf argument {x}");
        if x == 1.0 {
            return 1.0;
        }
        match *self {
            Self::Deterministic { m } => x.powi(m as i32),
            Self::ShiftedPoisson { mean } => x * (-(mean - 1.0) * (1.0 - x)).exp(),
            Self::Geometric { mean } => {
                let p = 1.0 / mean;
                p * x / (1.0 - (1.0 - p) * x)
            }
            Self::ShiftedNegBinomial { r, mean } => {
                let p = r as f64 / mean;
                (p * x / (1.0 - (1.0 - p) * x)).powi(r as i32)
            }
        }
    }

    pub(crate) fn pgf_prime_at(&self, x: f64) -> f64 {
        debug_assert!((-1e-12..=1.0 + 1e-12).contains(&x), "pgf argument {x}");
        match *self {
            Self::Deterministic { m } => {
                if m == 1 {
                    1.0
                } else {
                    m as f64 * x.powi(m as i32 - 1)
                }
            }
            Self::ShiftedPoisson { mean } => {
                let lam = mean - 1.0;
                (-lam * (1.0 - x)).exp() * (1.0 + lam * x)
            }
            Self::Geometric { mean } => {
                let p = 1.0 / mean;
                let den = 1.0 - (1.0 - p) * x;
                p / (den * den)
            }
            Self::ShiftedNegBinomial { r, mean } => {
                let rf = r as f64;
                let p = rf / mean;
                let den = 1.0 - (1.0 - p) * x;
                let g = p * x / den;
                let g_prime = p / (den * den);
                if r == 1 {
                    g_prime
                } else {
                    rf * g.powi(r as i32 - 1) * g_prime
                }
            }
        }
    }

    /// PGF in double-double precision, for alternating binomial sums.
    pub(crate) fn pgf_dd(&self, x: Dd) -> Dd {
        match *self {
            Self::Deterministic { m } => x.powi(m),
            Self::ShiftedPoisson { mean } => {
                let lam = mean - 1.0;
                x * ((x - Dd::ONE).mul_f64(lam)).exp()
            }
            Self::Geometric { mean } => geom_dd(1.0 / mean, x),
            Self::ShiftedNegBinomial { r, mean } => geom_dd(r as f64 / mean, x).powi(r),
        }
    }

    pub(crate) fn pgf_prime_dd(&self, x: Dd) -> Dd {
        match *self {
            Self::Deterministic { m } => x.powi(m - 1).mul_f64(m as f64),
            Self::ShiftedPoisson { mean } => {
                let lam = mean - 1.0;
                ((x - Dd::ONE).mul_f64(lam)).exp() * (Dd::ONE + x.mul_f64(lam))
            }
            Self::Geometric { mean } => geom_prime_dd(1.0 / mean, x),
            Self::ShiftedNegBinomial { r, mean } => {
                let p = r as f64 / mean;
                geom_dd(p, x).powi(r - 1).mul_f64(r as f64) * geom_prime_dd(p, x)
            }
        }
    }

    /// `P(M = m)`.
    pub fn pmf(&self, m: u32) -> f64 {
        match *self {
            Self::Deterministic { m: d } => {
                if m == d {
                    1.0
                } else {
                    0.0
                }
            }
            Self::ShiftedPoisson { mean } => {
                if m == 0 {
                    return 0.0;
                }
                let lam = mean - 1.0;
                let n = m - 1;
                if lam == 0.0 {
                    return if n == 0 { 1.0 } else { 0.0 };
                }
                (-lam + n as f64 * lam.ln() - ln_factorial(n)).exp()
            }
            Self::Geometric { mean } => {
                if m == 0 {
                    return 0.0;
                }
                let p = 1.0 / mean;
                p * (1.0 - p).powi(m as i32 - 1)
            }
            Self::ShiftedNegBinomial { r, mean } => {
                if m < r {
                    return 0.0;
                }
                let p = r as f64 / mean;
                let q = 1.0 - p;
                let f = m - r;
                if q == 0.0 {
                    return if f == 0 { 1.0 } else { 0.0 };
                }
                let ln_choose = ln_factorial(m - 1) - ln_factorial(r - 1) - ln_factorial(f);
                (ln_choose + r as f64 * p.ln() + f as f64 * q.ln()).exp()
            }
        }
    }

    /// Draw one order size.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match *self {
            Self::Deterministic { m } => m,
            Self::ShiftedPoisson { mean } => {
                let lam = mean - 1.0;
                if lam <= 0.0 {
                    return 1;
                }
                let n: f64 = Poisson::new(lam)
                    .expect("validated Poisson rate")
                    .sample(rng);
                1 + n as u32
            }
            Self::Geometric { mean } => 1 + failures(1.0 / mean, rng),
            Self::ShiftedNegBinomial { r, mean } => {
                let p = r as f64 / mean;
                r + (0..r).map(|_| failures(p, rng)).sum::<u32>()
            }
        }
    }
}

fn failures<R: Rng + ?Sized>(p: f64, rng: &mut R) -> u32 {
    let g = Geometric::new(p).expect("validated success probability");
    g.sample(rng).min(u32::MAX as u64) as u32
}

fn geom_dd(p: f64, x: Dd) -> Dd {
    let q = 1.0 - p;
    x.mul_f64(p) / (Dd::ONE - x.mul_f64(q))
}

fn geom_prime_dd(p: f64, x: Dd) -> Dd {
    let den = Dd::ONE - x.mul_f64(1.0 - p);
    Dd::new(p) / (den * den)
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain("x", x, "PGF argument must lie in [0, 1]"))
    }
}

impl fmt::Display for OrderSizeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Deterministic { m } => write!(f, "det:{m}"),
            Self::ShiftedPoisson { mean } => write!(f, "spois:{mean}"),
            Self::Geometric { mean } => write!(f, "geom:{mean}"),
            Self::ShiftedNegBinomial { r, mean } => write!(f, "snbin:{r}:{mean}"),
        }
    }
}

impl FromStr for OrderSizeDistribution {
    type Err = Error;

    /// Parses `det:m`, `spois:mean`, `geom:mean` or `snbin:r:mean`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidParameter(format!("distribution `{s}`: {why}"));
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad("expected a number"));
        let int = |t: &str| t.parse::<u32>().map_err(|_| bad("expected a positive integer"));
        let wrap = |r: Result<Self>| r.map_err(|e| bad(&e.to_string()));
        match parts.as_slice() {
            ["det", m] => wrap(Self::deterministic(int(m)?)),
            ["spois", mean] => wrap(Self::shifted_poisson_with_mean(num(mean)?)),
            ["geom", mean] => wrap(Self::geometric_with_mean(num(mean)?)),
            ["snbin", r, mean] => wrap(Self::shifted_neg_binomial_with_mean(int(r)?, num(mean)?)),
            _ => Err(bad("expected det:m, spois:mean, geom:mean or snbin:r:mean")),
        }
    }
}
