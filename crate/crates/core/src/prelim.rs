//! Building-block expectations shared by the routing formulas.
//!
//! Items land independently and uniformly over `k` aisles, so the aisle
//! counts `(N_1, ..., N_k)` are multinomial with a random number of trials
//! `M`. Everything below is a functional of the order-size PGF `P`:
//! discrete order statistics `k+`/`k-` of the visited aisles, the furthest
//! item `A_i` and largest gap `D_i` in an aisle, and occupancy quantities.
//!
//! Conditional quantities on the event `{k+ = j, k- = l}` only depend on
//! the distance `d = j - l`, so they are indexed by `d` alone.

use crate::error::{domain, Result};
use crate::ext::{binomial, Dd, DdSum};
use crate::orderdist::OrderSizeDistribution;
use crate::quadrature::{gap_kernel_cached, try_integrate, try_integrate_2d, QuadratureSettings};

/// Largest supported aisle count. Alternating binomial sums lose roughly
/// `3^k` ulps of double-double precision: about `1e-12` absolute at
/// `k = 48`, but `1e-5` at `k = 64`.
pub const MAX_AISLES: u32 = 48;

/// Width of the boundary layer where `(f(1) - f(x)) / (1 - x)` is replaced
/// by its limit `f'(1)`.
const REMOVABLE_LAYER: f64 = 1e-6;

/// Number of aisles together with the order-size law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AisleModel {
    pub k: u32,
    pub dist: OrderSizeDistribution,
    pub settings: QuadratureSettings,
}

/// Moments of the furthest visited aisle `k+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KplusMoments {
    /// `E[k+]`
    pub mean: f64,
    /// `E[(k+)^2]`
    pub second: f64,
    /// `E[M k+]`
    pub cross_m: f64,
}

/// Moments of the furthest item position in an aisle or half-aisle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarItemMoments {
    /// `E[A_i]`
    pub mean: f64,
    /// `E[A_i^2]`
    pub second: f64,
    /// `E[A_i A_j]` for two distinct (half-)aisles; `None` when only one exists.
    pub cross: Option<f64>,
}

/// Moments of `1 - D_i`, optionally jointly with `1{k+ = j, k- = l}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapMoments {
    /// `E[(1 - D_i) 1{.}]`
    pub mean_1md: f64,
    /// `E[(1 - D_i)^2 1{.}]`
    pub second_1md: f64,
    /// `E[(1 - D_i)(1 - D_m) 1{.}]` for distinct aisles; `None` when only one exists.
    pub cross_1md: Option<f64>,
}

/// Which aisle's item count is paired with an interior aisle `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountAisle {
    /// `N_i` itself.
    Same,
    /// `N_m` for another interior aisle `m`.
    OtherInterior,
    /// `N_l` or `N_j`, one of the two fully traversed end aisles.
    Endpoint,
}

/// Whether a conditional PGF describes half-aisles or full aisles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AisleMode {
    Half,
    Full,
}

/// Distribution of the number of visited aisles `ΣI_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyLaw {
    /// `pmf[j - 1] = P(ΣI = j)` for `j = 1..=k`.
    pub pmf: Vec<f64>,
    pub mean: f64,
    pub second: f64,
    /// `contiguous_prob[j - 1] = P(I = {1, ..., j})`.
    pub contiguous_prob: Vec<f64>,
}

/// Conditional half-aisle moments on `{k+ - k- = d}` used by midpoint routing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfAisleMoments {
    /// `P(k+ = j, k- = l)`
    pub prob: f64,
    /// `E[A^f 1{.}]`
    pub mean: f64,
    /// `E[(A^f)^2 1{.}]`
    pub second: f64,
    /// `E[A^f A^b 1{.}]`, both halves of one aisle (or any two interior halves).
    pub cross: f64,
    /// `E[N^f A^f 1{.}]`, same half-aisle.
    pub count_same: f64,
    /// `E[N' A^f 1{.}]` for another interior half-aisle.
    pub count_other: f64,
    /// `E[N_l A^f 1{.}]` for a (full) end aisle.
    pub count_endpoint: f64,
}

impl AisleModel {
    pub fn new(k: u32, dist: OrderSizeDistribution) -> Result<Self> {
        if k == 0 || k > MAX_AISLES {
            return Err(domain("k", k as f64, "aisle count must lie in 1..=48"));
        }
        Ok(Self {
            k,
            dist,
            settings: QuadratureSettings::default(),
        })
    }

    pub fn with_settings(mut self, settings: QuadratureSettings) -> Self {
        self.settings = settings;
        self
    }

    fn kf(&self) -> f64 {
        self.k as f64
    }

    /// `P_M(x)`, argument clamped to `[0, 1]` against rounding.
    pub(crate) fn p(&self, x: f64) -> f64 {
        self.dist.pgf_at(x.clamp(0.0, 1.0))
    }

    pub(crate) fn dp(&self, x: f64) -> f64 {
        self.dist.pgf_prime_at(x.clamp(0.0, 1.0))
    }

    fn p_dd(&self, num: u32) -> Dd {
        self.dist.pgf_dd(Dd::new(num as f64) / Dd::new(self.kf()))
    }

    fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        try_integrate(|x| Ok(f(x)), 0.0, 1.0, &self.settings).map(|r| r.0)
    }

    fn integrate_fallible<F: FnMut(f64) -> Result<f64>>(&self, f: F) -> Result<f64> {
        try_integrate(f, 0.0, 1.0, &self.settings).map(|r| r.0)
    }

    fn integrate_2d<F: Fn(f64, f64) -> f64>(&self, f: F) -> Result<f64> {
        try_integrate_2d(|x, y| Ok(f(x, y)), &self.settings).map(|r| r.0)
    }

    // ---- discrete order statistics -------------------------------------

    /// `P(k+ = j)`.
    pub fn kplus_pmf(&self, j: u32) -> f64 {
        if j == 0 || j > self.k {
            return 0.0;
        }
        let k = self.kf();
        self.p(j as f64 / k) - self.p((j - 1) as f64 / k)
    }

    pub fn kplus_moments(&self) -> KplusMoments {
        let k = self.kf();
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for j in 0..self.k {
            let x = j as f64 / k;
            let p = self.p(x);
            s0 += p;
            s1 += (2 * j + 1) as f64 * p;
            s2 += x * self.dp(x);
        }
        KplusMoments {
            mean: k - s0,
            second: k * k - s1,
            cross_m: k * self.dist.mean() - s2,
        }
    }

    /// `E[z^{N_i} 1{k+ = j}]`.
    pub fn cond_aisle_pgf(&self, z: f64, i: u32, j: u32) -> Result<f64> {
        self.check_aisle("i", i)?;
        self.check_aisle("j", j)?;
        check_unit("z", z)?;
        let k = self.kf();
        let (jf, zf) = (j as f64, z);
        Ok(match j.cmp(&i) {
            std::cmp::Ordering::Less => self.p(jf / k) - self.p((jf - 1.0) / k),
            std::cmp::Ordering::Equal => self.p((jf - 1.0 + zf) / k) - self.p((jf - 1.0) / k),
            std::cmp::Ordering::Greater => {
                self.p((jf - 1.0 + zf) / k) - self.p((jf - 2.0 + zf) / k)
            }
        })
    }

    fn check_aisle(&self, name: &'static str, i: u32) -> Result<()> {
        if i == 0 || i > self.k {
            return Err(domain(name, i as f64, "aisle index must lie in 1..=k"));
        }
        Ok(())
    }

    /// `P(k+ = j, k- = l)` for `d = j - l >= 0`.
    pub fn pair_event_prob(&self, d: u32) -> f64 {
        if d >= self.k {
            return 0.0;
        }
        let k = self.kf();
        let df = d as f64;
        if d == 0 {
            return self.p(1.0 / k);
        }
        self.p((df + 1.0) / k) - 2.0 * self.p(df / k) + self.p((df - 1.0) / k)
    }

    fn check_distance(&self, d: u32) -> Result<()> {
        if d < 2 {
            return Err(domain("d", d as f64, "no interior aisle unless k+ - k- >= 2"));
        }
        if d >= self.k {
            return Err(domain("d", d as f64, "distance must be below k"));
        }
        Ok(())
    }

    /// Conditional PGF on `{k+ - k- = d}` of an interior aisle pair.
    ///
    /// `Half`: `E[z^{N_i^f} y^{N_i^b} 1{.}]`. `Full`: `E[z^{N_i} y^{N_{i*}} 1{.}]`
    /// for two distinct interior aisles; `y = 1` gives the single-aisle PGF.
    pub fn cond_pair_pgf(&self, z: f64, y: f64, d: u32, mode: AisleMode) -> Result<f64> {
        self.check_distance(d)?;
        check_unit("z", z)?;
        check_unit("y", y)?;
        let (c, step, h) = self.pair_shift(d, mode, y)?;
        let s = z + y;
        Ok(self.p((c + s) * h) - 2.0 * self.p((c - step + s) * h)
            + self.p((c - 2.0 * step + s) * h))
    }

    /// `∂/∂z` of [`cond_pair_pgf`](Self::cond_pair_pgf).
    pub fn cond_pair_pgf_dz(&self, z: f64, y: f64, d: u32, mode: AisleMode) -> Result<f64> {
        self.check_distance(d)?;
        check_unit("z", z)?;
        check_unit("y", y)?;
        let (c, step, h) = self.pair_shift(d, mode, y)?;
        let s = z + y;
        Ok(h * (self.dp((c + s) * h) - 2.0 * self.dp((c - step + s) * h)
            + self.dp((c - 2.0 * step + s) * h)))
    }

    /// Offset, step and scale so that the three PGF arguments are
    /// `(c + s) h`, `(c - δ + s) h`, `(c - 2δ + s) h` with `s = z + y`.
    fn pair_shift(&self, d: u32, mode: AisleMode, y: f64) -> Result<(f64, f64, f64)> {
        let k = self.kf();
        let df = d as f64;
        match mode {
            AisleMode::Half => Ok((2.0 * df, 2.0, 0.5 / k)),
            AisleMode::Full => {
                if d < 3 && y < 1.0 {
                    return Err(domain("d", df, "two distinct interior aisles need d >= 3"));
                }
                Ok((df - 1.0, 1.0, 1.0 / k))
            }
        }
    }

    // ---- single-aisle conditional PGFs used by the heuristics ---------

    /// Single interior aisle PGF on the event, `P̂(x) = P((d+x)/k) - 2P((d-1+x)/k) + P((d-2+x)/k)`.
    fn full_hat(&self, d: u32, x: f64) -> f64 {
        let k = self.kf();
        let df = d as f64;
        self.p((df + x) / k) - 2.0 * self.p((df - 1.0 + x) / k) + self.p((df - 2.0 + x) / k)
    }

    fn full_hat_prime(&self, d: u32, x: f64) -> f64 {
        let k = self.kf();
        let df = d as f64;
        (self.dp((df + x) / k) - 2.0 * self.dp((df - 1.0 + x) / k) + self.dp((df - 2.0 + x) / k))
            / k
    }

    /// Two distinct interior aisles, depends on `x + y` only.
    fn full_hat2(&self, d: u32, s: f64) -> f64 {
        let k = self.kf();
        let df = d as f64;
        self.p((df - 1.0 + s) / k) - 2.0 * self.p((df - 2.0 + s) / k)
            + self.p((df - 3.0 + s) / k)
    }

    /// Single interior half-aisle PGF on the event.
    fn half_hat(&self, d: u32, z: f64) -> f64 {
        let h = 0.5 / self.kf();
        let df = d as f64;
        self.p((2.0 * df + 1.0 + z) * h) - 2.0 * self.p((2.0 * df - 1.0 + z) * h)
            + self.p((2.0 * df - 3.0 + z) * h)
    }

    fn half_hat_prime(&self, d: u32, z: f64) -> f64 {
        let h = 0.5 / self.kf();
        let df = d as f64;
        h * (self.dp((2.0 * df + 1.0 + z) * h) - 2.0 * self.dp((2.0 * df - 1.0 + z) * h)
            + self.dp((2.0 * df - 3.0 + z) * h))
    }

    /// Two interior half-aisles, depends on `z + y` only.
    fn half_hat2(&self, d: u32, s: f64) -> f64 {
        let h = 0.5 / self.kf();
        let df = d as f64;
        self.p((2.0 * df + s) * h) - 2.0 * self.p((2.0 * df - 2.0 + s) * h)
            + self.p((2.0 * df - 4.0 + s) * h)
    }

    // ---- furthest item ---------------------------------------------------

    /// Moments of `A_i` (`Full`) or `A_i^f` (`Half`).
    pub fn far_item_moments(&self, mode: AisleMode) -> Result<FarItemMoments> {
        let h = match mode {
            AisleMode::Full => 1.0 / self.kf(),
            AisleMode::Half => 0.5 / self.kf(),
        };
        let i0 = self.integrate(|x| self.p(1.0 - h + x * h))?;
        let i1 = self.integrate(|x| x * self.p(1.0 - h + x * h))?;
        let cross = if mode == AisleMode::Full && self.k == 1 {
            None
        } else {
            let i2 = self.integrate_2d(|x, y| self.p(1.0 - 2.0 * h + (x + y) * h))?;
            Some(1.0 - 2.0 * i0 + i2)
        };
        Ok(FarItemMoments {
            mean: 1.0 - i0,
            second: 1.0 - 2.0 * i1,
            cross,
        })
    }

    /// Tail terms `P(j/k) - ∫P((j-1+x)/k)dx` for `j = 1..k-1`, index `j`.
    fn kplus_tail_terms(&self) -> Result<Vec<f64>> {
        let k = self.kf();
        let mut t = vec![0.0; self.k as usize];
        for j in 1..self.k {
            let jf = j as f64;
            let int = self.integrate(|x| self.p((jf - 1.0 + x) / k))?;
            t[j as usize] = self.p(jf / k) - int;
        }
        Ok(t)
    }

    /// `E[A_i k+]`.
    pub fn far_item_kplus_cross(&self, i: u32) -> Result<f64> {
        self.check_aisle("i", i)?;
        let mean = self.far_item_moments_mean()?;
        let tail = self.kplus_tail_terms()?;
        Ok(self.kf() * mean - tail[i as usize..].iter().sum::<f64>())
    }

    /// `Σ_i E[A_i k+]`, each aisle with its own tail sum.
    pub fn far_item_kplus_cross_sum(&self) -> Result<f64> {
        let mean = self.far_item_moments_mean()?;
        let tail = self.kplus_tail_terms()?;
        let k = self.kf();
        let mut total = 0.0;
        for i in 1..=self.k as usize {
            total += k * mean - tail[i..].iter().sum::<f64>();
        }
        Ok(total)
    }

    fn far_item_moments_mean(&self) -> Result<f64> {
        let h = 1.0 / self.kf();
        Ok(1.0 - self.integrate(|x| self.p(1.0 - h + x * h))?)
    }

    /// `E[M A_i]`.
    pub fn m_far_cross(&self) -> Result<f64> {
        let k = self.kf();
        let h = 1.0 / k;
        let int = self.integrate(|x| self.p(1.0 - h + x * h))?;
        Ok(self.dist.mean() - k + (k - 1.0) * self.p(1.0 - h) + int)
    }

    // ---- largest gap -----------------------------------------------------

    /// Moments of `1 - D_i`; with `Some(d)`, jointly with `1{k+ - k- = d}`
    /// for an interior aisle.
    pub fn gap_moments(&self, conditional: Option<u32>) -> Result<GapMoments> {
        let log1m = |x: f64| (-x).ln_1p();
        match conditional {
            None => {
                let h = 1.0 / self.kf();
                let pn = |x: f64| self.p(1.0 - h + x * h);
                let e_d = -self.integrate(|x| pn(x) * log1m(x))?;
                let e_d2 = self.kernel_integral(pn)?;
                let cross = if self.k >= 2 {
                    let e_dd = self.integrate_2d(|x, y| {
                        self.p(1.0 - 2.0 * h + (x + y) * h) * log1m(x) * log1m(y)
                    })?;
                    Some(1.0 - 2.0 * e_d + e_dd)
                } else {
                    None
                };
                Ok(GapMoments {
                    mean_1md: 1.0 - e_d,
                    second_1md: 1.0 - 2.0 * e_d + e_d2,
                    cross_1md: cross,
                })
            }
            Some(d) => {
                self.check_distance(d)?;
                let prob = self.pair_event_prob(d);
                let lg = self.integrate(|x| self.full_hat(d, x) * log1m(x))?;
                let kern = self.kernel_integral(|x| self.full_hat(d, x))?;
                let cross = if d >= 3 {
                    let dbl = self.integrate_2d(|x, y| {
                        self.full_hat2(d, x + y) * log1m(x) * log1m(y)
                    })?;
                    Some(prob + 2.0 * lg + dbl)
                } else {
                    None
                };
                Ok(GapMoments {
                    mean_1md: prob + lg,
                    second_1md: prob + 2.0 * lg + kern,
                    cross_1md: cross,
                })
            }
        }
    }

    /// `∫_0^1 x f(x) g(x) dx` with `g` the largest-gap kernel.
    fn kernel_integral<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let s = self.settings;
        self.integrate_fallible(|x| Ok(x * f(x) * gap_kernel_cached(x, &s)?))
    }

    /// `E[N_m (1 - D_i) 1{k+ - k- = d}]` for interior aisle `i`.
    pub fn gap_count_cross(&self, d: u32, which: CountAisle) -> Result<f64> {
        self.check_distance(d)?;
        let k = self.kf();
        let df = d as f64;
        match which {
            CountAisle::Same => {
                let h1 = self.full_hat(d, 1.0);
                let hp1 = self.full_hat_prime(d, 1.0);
                let lg = self.integrate(|x| (-x).ln_1p() * self.full_hat(d, x))?;
                // (P̂(1) - x P̂(x))/(1 - x) = (P̂(1) - P̂(x))/(1 - x) + P̂(x)
                let q = self.integrate(|x| {
                    removable(|t| self.full_hat(d, t), h1, hp1, x) + self.full_hat(d, x)
                })?;
                Ok(hp1 - lg - q)
            }
            CountAisle::OtherInterior => {
                let h1 = self.full_hat(d, 1.0);
                let hp1 = self.full_hat_prime(d, 1.0);
                let q = self.integrate(|x| removable(|t| self.full_hat(d, t), h1, hp1, x))?;
                Ok(hp1 - q)
            }
            CountAisle::Endpoint => {
                let r = |x: f64| self.p((x + df) / k) - self.p((x + df - 1.0) / k);
                let r1 = r(1.0);
                let rp1 = (self.dp((df + 1.0) / k) - self.dp(df / k)) / k;
                let q = self.integrate(|x| removable(r, r1, rp1, x))?;
                Ok(rp1 - q)
            }
        }
    }

    // ---- half aisles (midpoint) -----------------------------------------

    /// Conditional half-aisle moments on `{k+ - k- = d}`.
    pub fn half_aisle_moments(&self, d: u32) -> Result<HalfAisleMoments> {
        self.check_distance(d)?;
        let k = self.kf();
        let df = d as f64;
        let prob = self.pair_event_prob(d);
        let i0 = self.integrate(|z| self.half_hat(d, z))?;
        let i1 = self.integrate(|z| z * self.half_hat(d, z))?;
        let i2 = self.integrate_2d(|z, y| self.half_hat2(d, z + y))?;
        let hp1 = self.half_hat_prime(d, 1.0);
        let h1 = self.half_hat(d, 1.0);
        let h0 = self.half_hat(d, 0.0);
        let two_k = 2.0 * k;
        let endpoint = (self.dp((df + 1.0) / k) - self.dp(df / k)) / k
            - 2.0
                * (self.p((df + 1.0) / k) - self.p((2.0 * df + 1.0) / two_k) - self.p(df / k)
                    + self.p((2.0 * df - 1.0) / two_k));
        Ok(HalfAisleMoments {
            prob,
            mean: prob - i0,
            second: prob - 2.0 * i1,
            cross: prob - 2.0 * i0 + i2,
            count_same: hp1 - h1 + i0,
            count_other: hp1 - h1 + h0,
            count_endpoint: endpoint,
        })
    }

    // ---- occupancy -------------------------------------------------------

    /// `P(ΣI = j)` for `j = 1..=k`, its first two moments, and the
    /// probabilities that exactly the first `j` aisles are visited.
    pub fn occupancy_law(&self) -> OccupancyLaw {
        let k = self.k;
        let table: Vec<Dd> = (0..=k).map(|l| self.p_dd(l)).collect();
        let mut pmf = Vec::with_capacity(k as usize);
        let mut contiguous = Vec::with_capacity(k as usize);
        for j in 1..=k {
            let c = forward_difference(&table[..=j as usize]);
            contiguous.push(c.to_f64());
            pmf.push((c * Dd::from_u128(binomial(k, j))).to_f64());
        }
        let kf = self.kf();
        let p1 = self.p(1.0 - 1.0 / kf);
        let p2 = if k >= 2 { self.p(1.0 - 2.0 / kf) } else { 0.0 };
        OccupancyLaw {
            pmf,
            mean: kf - kf * p1,
            second: kf * kf + kf * (1.0 - 2.0 * kf) * p1 + kf * (kf - 1.0) * p2,
            contiguous_prob: contiguous,
        }
    }

    /// `E[I_odd]`, the probability that an odd number of aisles is visited.
    pub fn iodd_mean(&self) -> f64 {
        let k = self.k;
        let mut acc = DdSum::default();
        for l in 0..k {
            let term = self.p_dd(l) * Dd::from_u128(binomial(k, l)) * Dd::ONE.ldexp((k - l - 1) as i32);
            acc.add(if l % 2 == 0 { -term } else { term });
        }
        let odd = if k % 2 == 1 { 1.0 } else { 0.0 };
        (acc.value() + Dd::new(odd)).to_f64()
    }

    /// `E[z^{N_j} 1{I = {1, ..., j}}]`, the PGF of the last of `j`
    /// contiguous visited aisles.
    pub fn contiguous_pgf(&self, z: f64, j: u32) -> Result<f64> {
        self.check_aisle("j", j)?;
        check_unit("z", z)?;
        let k = Dd::new(self.kf());
        let zd = Dd::new(z);
        let shifted: Vec<Dd> = (0..j)
            .map(|l| {
                let l = Dd::new(l as f64);
                self.dist.pgf_dd((zd + l) / k) - self.dist.pgf_dd(l / k)
            })
            .collect();
        Ok(forward_difference(&shifted).to_f64())
    }

    pub(crate) fn pgf_dd_at(&self, x: Dd) -> Dd {
        self.dist.pgf_dd(x)
    }

    pub(crate) fn pgf_dd_grid(&self, num: u32) -> Dd {
        self.p_dd(num)
    }

    pub(crate) fn integrate_unit<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        self.integrate(f)
    }
}

/// `Σ_l C(n, l) (-1)^{n-l} v[l]` with `n = v.len() - 1`, i.e. the `n`-th
/// forward difference at the first node.
pub(crate) fn forward_difference(v: &[Dd]) -> Dd {
    let n = v.len() as u32 - 1;
    let mut acc = DdSum::default();
    for (l, x) in v.iter().enumerate() {
        let term = *x * Dd::from_u128(binomial(n, l as u32));
        acc.add(if (n - l as u32) % 2 == 0 { term } else { -term });
    }
    acc.value()
}

/// `(f(1) - f(x)) / (1 - x)`, replaced by `f'(1)` next to `x = 1`.
fn removable<F: Fn(f64) -> f64>(f: F, f1: f64, fp1: f64, x: f64) -> f64 {
    let w = 1.0 - x;
    if w < REMOVABLE_LAYER {
        fp1
    } else {
        (f1 - f(x)) / w
    }
}

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain(name, x, "must lie in [0, 1]"))
    }
}
