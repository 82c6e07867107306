//! Independent oracles: exhaustive enumeration of item-to-aisle assignments
//! and closed-form spacing moments of uniform samples.

#![allow(dead_code)]

use pickmoments::OrderSizeDistribution;

/// Visit pattern of one assignment of `m` items to `k` aisles.
pub struct Assignment {
    pub counts: Vec<u32>,
}

impl Assignment {
    pub fn kplus(&self) -> u32 {
        self.counts.iter().rposition(|&c| c > 0).unwrap() as u32 + 1
    }

    pub fn kminus(&self) -> u32 {
        self.counts.iter().position(|&c| c > 0).unwrap() as u32 + 1
    }

    pub fn visited(&self) -> u32 {
        self.counts.iter().filter(|&&c| c > 0).count() as u32
    }
}

/// Calls `f` once per equally likely assignment of `m` items to `k` aisles
/// and returns the number of assignments.
pub fn enumerate(k: u32, m: u32, mut f: impl FnMut(&Assignment)) -> u64 {
    let total = (k as u64).pow(m);
    for code in 0..total {
        let mut counts = vec![0u32; k as usize];
        let mut c = code;
        for _ in 0..m {
            counts[(c % k as u64) as usize] += 1;
            c /= k as u64;
        }
        f(&Assignment { counts });
    }
    total
}

/// `E[g]` over all assignments of `m` items to `k` aisles.
pub fn enum_mean(k: u32, m: u32, g: impl Fn(&Assignment) -> f64) -> f64 {
    let mut s = 0.0;
    let n = enumerate(k, m, |a| s += g(a));
    s / n as f64
}

pub fn harmonic(n: u32) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

/// `E[D]` and `E[D^2]` for the largest of the `n + 1` spacings cut by `n`
/// uniform points, from the exponential representation of spacings.
pub fn max_spacing_moments(n: u32) -> (f64, f64) {
    let m = n + 1;
    let mf = m as f64;
    let h = harmonic(m);
    let h2: f64 = (1..=m).map(|i| 1.0 / (i as f64 * i as f64)).sum();
    (h / mf, (h2 + h * h) / (mf * (mf + 1.0)))
}

/// `P(N = n)` for `N ~ Bin(m, q)`.
pub fn binom_pmf(m: u32, q: f64, n: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..n {
        c *= (m - i) as f64 / (i + 1) as f64;
    }
    c * q.powi(n as i32) * (1.0 - q).powi((m - n) as i32)
}

/// `E[f(N_i)]` for one aisle out of `k` under order-size law `dist`,
/// summing the order-size pmf until the remaining mass is below `1e-15`.
pub fn aisle_count_mean(dist: &OrderSizeDistribution, k: u32, f: impl Fn(u32) -> f64) -> f64 {
    let q = 1.0 / k as f64;
    let mut total = 0.0;
    let mut mass = 0.0;
    let mut m = 1;
    while mass < 1.0 - 1e-15 && m < 20_000 {
        let p = dist.pmf(m);
        mass += p;
        if p > 0.0 {
            total += p * (0..=m).map(|n| binom_pmf(m, q, n) * f(n)).sum::<f64>();
        }
        m += 1;
    }
    total
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

/// Calls `f(counts, prob)` for every split of `m` items over `k` aisles,
/// with its multinomial probability under uniform storage.
pub fn for_each_split(k: u32, m: u32, mut f: impl FnMut(&[u32], f64)) {
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=m).scan(0.0, |s, i| {
            *s += (i as f64).ln();
            Some(*s)
        }))
        .collect();
    let base = ln_fact[m as usize] - m as f64 * (k as f64).ln();
    let mut counts = vec![0u32; k as usize];
    fn rec(i: usize, left: u32, counts: &mut Vec<u32>, lf: &[f64], base: f64, f: &mut dyn FnMut(&[u32], f64)) {
        if i + 1 == counts.len() {
            counts[i] = left;
            let lp = base - counts.iter().map(|&c| lf[c as usize]).sum::<f64>();
            f(counts, lp.exp());
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            rec(i + 1, left - c, counts, lf, base, f);
        }
    }
    rec(0, m, &mut counts, &ln_fact, base, &mut f);
}

/// Calls `f(m, pmf(m))` over the order-size support until the remaining
/// mass is below `tail`.
pub fn for_each_size(dist: &OrderSizeDistribution, tail: f64, mut f: impl FnMut(u32, f64)) {
    let mut mass = 0.0;
    let mut m = 1;
    while mass < 1.0 - tail {
        let p = dist.pmf(m);
        if p > 0.0 {
            f(m, p);
        }
        mass += p;
        m += 1;
    }
}

/// First two moments of the spacing containing `1/2` among `n` uniform points.
pub fn straddle_spacing_moments(n: u32) -> (f64, f64) {
    let nf = n as f64;
    let h1 = 0.5f64.powi(n as i32 + 1);
    let h2 = 0.5f64.powi(n as i32 + 2);
    let ex = (1.0 - h1) / (nf + 1.0);
    let ex2 = 2.0 * ((1.0 - h1) / (nf + 1.0) - (1.0 - h2) / (nf + 2.0));
    let exy = (1.0 - h1) / ((nf + 1.0) * (nf + 2.0));
    (2.0 * ex, 2.0 * ex2 + 2.0 * exy)
}

/// Route-time geometry for the exact oracle.
#[derive(Clone, Copy)]
pub struct Geometry {
    pub l: f64,
    pub w_a: f64,
    pub v: f64,
}

/// Which route equation the oracle evaluates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Route {
    Return,
    Midpoint,
    LargestGap,
    SShaped,
}

/// Conditional mean and variance of the aisle travel `W` (meters) given the
/// per-aisle counts. Aisles are independent given the counts.
fn travel_given_counts(route: Route, l: f64, c: &[u32]) -> (f64, f64) {
    let lo = c.iter().position(|&n| n > 0).unwrap();
    let hi = c.iter().rposition(|&n| n > 0).unwrap();
    let (mut mean, mut var) = (0.0, 0.0);
    let mut add = |m1: f64, m2: f64| {
        mean += m1;
        var += m2 - m1 * m1;
    };
    match route {
        Route::Return => {
            for &n in c {
                let nf = n as f64;
                add(2.0 * l * nf / (nf + 1.0), 4.0 * l * l * nf / (nf + 2.0));
            }
        }
        Route::Midpoint | Route::LargestGap => {
            add(2.0 * l, 4.0 * l * l);
            for &n in &c[(lo + 1).min(hi)..hi] {
                let (g1, g2) = if route == Route::Midpoint {
                    straddle_spacing_moments(n)
                } else {
                    max_spacing_moments(n)
                };
                add(2.0 * l * (1.0 - g1), 4.0 * l * l * (1.0 - 2.0 * g1 + g2));
            }
        }
        Route::SShaped => {
            let x = c.iter().filter(|&&n| n > 0).count() as f64;
            if x as u32 % 2 == 0 {
                add(l * x, l * l * x * x);
            } else {
                // l (x - 1 + 2A), A the maximum of n uniforms.
                let nf = c[hi] as f64;
                let (a1, a2) = (nf / (nf + 1.0), nf / (nf + 2.0));
                let b = x - 1.0;
                add(l * (b + 2.0 * a1), l * l * (b * b + 4.0 * b * a1 + 4.0 * a2));
            }
        }
    }
    (mean, var)
}

/// Exact `(E[T], E[T^2])` by summation over order sizes and count vectors.
/// `pick = (E[P], E[P^2])`.
pub fn exact_moments(
    route: Route,
    k: u32,
    g: Geometry,
    dist: &OrderSizeDistribution,
    pick: (f64, f64),
    tail: f64,
) -> (f64, f64) {
    let (ep, ep2) = pick;
    let (mut e1, mut e2) = (0.0, 0.0);
    for_each_size(dist, tail, |m, pm| {
        let mf = m as f64;
        let sp1 = mf * ep;
        let sp2 = mf * ep2 + mf * (mf - 1.0) * ep * ep;
        for_each_split(k, m, |c, pc| {
            let hi = c.iter().rposition(|&n| n > 0).unwrap();
            let (w1, wv) = travel_given_counts(route, g.l, c);
            let r1 = (w1 + 2.0 * g.w_a * hi as f64) / g.v;
            let r2 = wv / (g.v * g.v) + r1 * r1;
            let p = pm * pc;
            e1 += p * (sp1 + r1);
            e2 += p * (sp2 + 2.0 * sp1 * r1 + r2);
        });
    });
    (e1, e2)
}
