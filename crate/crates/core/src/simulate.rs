//! Monte Carlo oracle: sample orders, evaluate the route-time equations
//! literally, and estimate `E[T]` and `E[T^2]` with standard errors.
//!
//! Replication `r` draws from a ChaCha8 stream keyed by `(seed, r)`, and
//! chunk statistics are merged in index order, so a given `(seed, n)` gives
//! bit-identical estimates regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::heuristics::{Heuristic, PickTimeModel, WarehouseConfig};
use crate::orderdist::OrderSizeDistribution;
use crate::prelim::AisleModel;

const CHUNK: u64 = 4096;

/// One order: its size and the `(aisle, position)` of every item.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledOrder {
    pub m: u32,
    /// Aisles are `1..=k`, positions are fractions of the aisle length.
    pub items: Vec<(u32, f64)>,
}

/// Monte Carlo estimate of the first two moments of `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub n: u64,
    pub mean_t: f64,
    pub se_mean: f64,
    pub mean_t2: f64,
    pub se_t2: f64,
}

/// Draw an order size and place every item uniformly over aisles and positions.
pub fn sample_order<R: Rng + ?Sized>(model: &AisleModel, rng: &mut R) -> SampledOrder {
    let m = model.dist.sample(rng);
    let items = (0..m)
        .map(|_| (rng.random_range(1..=model.k), rng.random::<f64>()))
        .collect();
    SampledOrder { m, items }
}

/// Per-aisle sorted item positions, reused across replications.
struct Aisles {
    pos: Vec<Vec<f64>>,
}

/// Aisle statistics consumed by the four route equations.
struct RouteStats {
    kplus: u32,
    /// `Σ_i A_i`
    sum_far: f64,
    /// `Σ_{k- < i < k+} (1 - straddling gap)`
    mid_inner: f64,
    /// `Σ_{k- < i < k+} (1 - D_i)`
    gap_inner: f64,
    /// Number of visited aisles.
    visited: u32,
    /// `A_{k+}`
    far_last: f64,
}

impl Aisles {
    fn new(k: u32) -> Self {
        Self {
            pos: vec![Vec::new(); k as usize],
        }
    }

    fn load(&mut self, items: &[(u32, f64)]) -> Result<()> {
        for a in &mut self.pos {
            a.clear();
        }
        for &(aisle, x) in items {
            let slot = self
                .pos
                .get_mut((aisle as usize).wrapping_sub(1))
                .ok_or_else(|| domain("aisle", aisle as f64, "item aisle outside 1..=k"))?;
            if !(0.0..=1.0).contains(&x) {
                return Err(domain("position", x, "item position outside [0, 1]"));
            }
            slot.push(x);
        }
        for a in &mut self.pos {
            a.sort_unstable_by(f64::total_cmp);
        }
        Ok(())
    }

    fn stats(&self) -> RouteStats {
        let visited: Vec<usize> = (0..self.pos.len())
            .filter(|&i| !self.pos[i].is_empty())
            .collect();
        let lo = visited[0];
        let hi = *visited.last().expect("order is non-empty");
        let mut s = RouteStats {
            kplus: hi as u32 + 1,
            sum_far: 0.0,
            mid_inner: 0.0,
            gap_inner: 0.0,
            visited: visited.len() as u32,
            far_last: *self.pos[hi].last().expect("visited aisle"),
        };
        for &i in &visited {
            s.sum_far += *self.pos[i].last().expect("visited aisle");
        }
        for a in &self.pos[lo + 1..hi.max(lo + 1)] {
            let (straddle, largest) = gaps(a);
            s.mid_inner += 1.0 - straddle;
            s.gap_inner += 1.0 - largest;
        }
        s
    }
}

/// Spacing containing the midpoint and the largest of the `n + 1`
/// spacings, for sorted positions `a`. An empty aisle is one gap of length 1.
fn gaps(a: &[f64]) -> (f64, f64) {
    let mut prev = 0.0;
    let mut largest: f64 = 0.0;
    let mut straddle = None;
    for &x in a.iter().chain(std::iter::once(&1.0)) {
        let g = x - prev;
        if g > largest {
            largest = g;
        }
        // Positions at exactly 1/2 count as back half.
        if straddle.is_none() && x >= 0.5 {
            straddle = Some(g);
        }
        prev = x;
    }
    (straddle.expect("closing boundary is at 1"), largest)
}

fn travel(cfg: &WarehouseConfig, h: Heuristic, s: &RouteStats) -> f64 {
    let l = cfg.l;
    let cross = 2.0 * cfg.w_a * (s.kplus - 1) as f64;
    let aisle = match h {
        Heuristic::Return => 2.0 * l * s.sum_far,
        Heuristic::Midpoint => 2.0 * l * s.mid_inner + 2.0 * l,
        Heuristic::LargestGap => 2.0 * l * s.gap_inner + 2.0 * l,
        Heuristic::SShaped => {
            let odd = if s.visited % 2 == 1 { 1.0 } else { 0.0 };
            l * (s.visited as f64 + odd * (2.0 * s.far_last - 1.0))
        }
    };
    (aisle + cross) / cfg.v
}

/// Picking time of one order under heuristic `h`: the route equation
/// evaluated on the sampled locations plus the given per-item pick times.
pub fn route_time(
    cfg: &WarehouseConfig,
    heuristic: Heuristic,
    order: &SampledOrder,
    pick_samples: &[f64],
) -> Result<f64> {
    if order.items.is_empty() {
        return Err(domain("m", 0.0, "order must contain at least one item"));
    }
    if pick_samples.len() != order.items.len() {
        return Err(Error::InvalidParameter(format!(
            "{} pick times for {} items",
            pick_samples.len(),
            order.items.len()
        )));
    }
    let mut aisles = Aisles::new(cfg.k);
    aisles.load(&order.items)?;
    let picks: f64 = pick_samples.iter().sum();
    Ok(picks + travel(cfg, heuristic, &aisles.stats()))
}

/// Sampler for the total pick time of `m` items, each gamma distributed
/// with the model's mean and SCV (constant when the SCV is zero).
#[derive(Debug, Clone, Copy)]
struct PickSampler {
    mean: f64,
    scv: f64,
}

impl PickSampler {
    fn new(pick: &PickTimeModel) -> Self {
        Self {
            mean: pick.mean,
            scv: pick.scv(),
        }
    }

    /// One pick time.
    pub fn one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.total(1, rng)
    }

    /// Sum of `m` independent pick times; the gamma family is closed under
    /// convolution with a common scale.
    fn total<R: Rng + ?Sized>(&self, m: u32, rng: &mut R) -> f64 {
        if self.mean == 0.0 || m == 0 {
            return 0.0;
        }
        if self.scv == 0.0 {
            return self.mean * m as f64;
        }
        let shape = m as f64 / self.scv;
        let scale = self.mean * self.scv;
        Gamma::new(shape, scale)
            .expect("positive gamma parameters")
            .sample(rng)
    }
}

/// Draw `m` individual pick times from the two-moment-matched gamma law.
pub fn sample_pick_times<R: Rng + ?Sized>(pick: &PickTimeModel, m: u32, rng: &mut R) -> Vec<f64> {
    let s = PickSampler::new(pick);
    (0..m).map(|_| s.one(rng)).collect()
}

/// Stream for replication `rep` under `seed`.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Running mean and centered sum of squares.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Welford) -> Welford {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        let (na, nb, nf) = (self.n as f64, o.n as f64, n as f64);
        Welford {
            n,
            mean: self.mean + d * nb / nf,
            m2: self.m2 + o.m2 + d * d * na * nb / nf,
        }
    }

    fn se(&self) -> f64 {
        (self.m2 / (self.n as f64 - 1.0) / self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    t: Welford,
    t2: Welford,
}

impl Moments {
    fn push(&mut self, t: f64) {
        self.t.push(t);
        self.t2.push(t * t);
    }

    fn merge(self, o: Moments) -> Moments {
        Moments {
            t: self.t.merge(o.t),
            t2: self.t2.merge(o.t2),
        }
    }

    fn estimate(&self) -> McEstimate {
        McEstimate {
            n: self.t.n,
            mean_t: self.t.mean,
            se_mean: self.t.se(),
            mean_t2: self.t2.mean,
            se_t2: self.t2.se(),
        }
    }
}

/// Simulate `n` orders once and evaluate every heuristic on each of them
/// with identical pick draws. Results follow [`Heuristic::ALL`].
pub fn run_replications_all(
    cfg: &WarehouseConfig,
    dist: &OrderSizeDistribution,
    pick: &PickTimeModel,
    n: u64,
    seed: u64,
) -> Result<[McEstimate; 4]> {
    if n < 2 {
        return Err(domain("n", n as f64, "at least two replications are needed"));
    }
    let model = AisleModel::new(cfg.k, *dist)?;
    let sampler = PickSampler::new(pick);
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<[Moments; 4]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = [Moments::default(); 4];
            let mut aisles = Aisles::new(cfg.k);
            for rep in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let mut rng = replication_rng(seed, rep);
                let order = sample_order(&model, &mut rng);
                let picks = sampler.total(order.m, &mut rng);
                aisles.load(&order.items).expect("sampled items are valid");
                let stats = aisles.stats();
                for (a, h) in acc.iter_mut().zip(Heuristic::ALL) {
                    a.push(picks + travel(cfg, h, &stats));
                }
            }
            acc
        })
        .collect();
    let total = partial
        .into_iter()
        .fold([Moments::default(); 4], |acc, p| {
            [
                acc[0].merge(p[0]),
                acc[1].merge(p[1]),
                acc[2].merge(p[2]),
                acc[3].merge(p[3]),
            ]
        });
    Ok(total.map(|m| m.estimate()))
}

/// Monte Carlo estimate of `E[T]` and `E[T^2]` for one heuristic.
pub fn run_replications(
    cfg: &WarehouseConfig,
    dist: &OrderSizeDistribution,
    pick: &PickTimeModel,
    heuristic: Heuristic,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    let all = run_replications_all(cfg, dist, pick, n, seed)?;
    let idx = Heuristic::ALL
        .iter()
        .position(|&h| h == heuristic)
        .expect("ALL lists every heuristic");
    Ok(all[idx])
}

/// Sample `n` orders and return `(T_midpoint, T_largest_gap)` per order with
/// shared pick draws.
pub fn paired_midpoint_largest_gap(
    cfg: &WarehouseConfig,
    dist: &OrderSizeDistribution,
    pick: &PickTimeModel,
    n: u64,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let model = AisleModel::new(cfg.k, *dist)?;
    let sampler = PickSampler::new(pick);
    let chunks = n.div_ceil(CHUNK);
    let out: Vec<Vec<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut aisles = Aisles::new(cfg.k);
            (c * CHUNK..((c + 1) * CHUNK).min(n))
                .map(|rep| {
                    let mut rng = replication_rng(seed, rep);
                    let order = sample_order(&model, &mut rng);
                    let picks = sampler.total(order.m, &mut rng);
                    aisles.load(&order.items).expect("sampled items are valid");
                    let s = aisles.stats();
                    (
                        picks + travel(cfg, Heuristic::Midpoint, &s),
                        picks + travel(cfg, Heuristic::LargestGap, &s),
                    )
                })
                .collect()
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(items: &[(u32, f64)]) -> SampledOrder {
        SampledOrder {
            m: items.len() as u32,
            items: items.to_vec(),
        }
    }

    #[test]
    fn route_equations_on_a_fixed_order() {
        let cfg = WarehouseConfig::new(3, 20.0, 2.5, 1.0).unwrap();
        let o = order(&[(1, 0.4), (3, 0.7)]);
        let picks = [0.0, 0.0];
        let t = |h| route_time(&cfg, h, &o, &picks).unwrap();
        assert!((t(Heuristic::Return) - 54.0).abs() < 1e-12);
        assert!((t(Heuristic::LargestGap) - 50.0).abs() < 1e-12);
        assert!((t(Heuristic::Midpoint) - 50.0).abs() < 1e-12);
        assert!((t(Heuristic::SShaped) - 50.0).abs() < 1e-12);
    }

    #[test]
    fn interior_aisle_gaps() {
        let cfg = WarehouseConfig::new(3, 10.0, 0.0, 1.0).unwrap();
        // Interior aisle 2 holds 0.1 and 0.8: straddling gap 0.7 = largest.
        let o = order(&[(1, 0.5), (2, 0.1), (2, 0.8), (3, 0.5)]);
        let picks = [0.0; 4];
        let mid = route_time(&cfg, Heuristic::Midpoint, &o, &picks).unwrap();
        let lg = route_time(&cfg, Heuristic::LargestGap, &o, &picks).unwrap();
        assert!((mid - (20.0 + 20.0 * 0.3)).abs() < 1e-12);
        assert!((lg - mid).abs() < 1e-12);
        // 0.3 and 0.4 both in the front half: straddle 0.6, largest 0.6.
        // 0.2, 0.45, 0.55: straddle 0.1, largest 0.45 (0.55..1).
        let o = order(&[(1, 0.5), (2, 0.2), (2, 0.45), (2, 0.55), (3, 0.5)]);
        let picks = [0.0; 5];
        let mid = route_time(&cfg, Heuristic::Midpoint, &o, &picks).unwrap();
        let lg = route_time(&cfg, Heuristic::LargestGap, &o, &picks).unwrap();
        assert!((mid - (20.0 + 20.0 * 0.9)).abs() < 1e-12);
        assert!((lg - (20.0 + 20.0 * 0.55)).abs() < 1e-12);
    }

    #[test]
    fn invalid_orders() {
        let cfg = WarehouseConfig::new(2, 10.0, 1.0, 1.0).unwrap();
        let empty = order(&[]);
        assert!(route_time(&cfg, Heuristic::Return, &empty, &[]).is_err());
        let o = order(&[(3, 0.5)]);
        assert!(route_time(&cfg, Heuristic::Return, &o, &[0.0]).is_err());
        let o = order(&[(1, 0.5)]);
        assert!(route_time(&cfg, Heuristic::Return, &o, &[]).is_err());
    }

    #[test]
    fn deterministic_for_a_seed() {
        let cfg = WarehouseConfig::new(4, 10.0, 2.0, 1.0).unwrap();
        let dist = OrderSizeDistribution::geometric(0.25).unwrap();
        let pick = PickTimeModel::from_scv(3.0, 0.5).unwrap();
        let a = run_replications_all(&cfg, &dist, &pick, 10_000, 9).unwrap();
        let b = run_replications_all(&cfg, &dist, &pick, 10_000, 9).unwrap();
        assert_eq!(a, b);
        assert!(run_replications_all(&cfg, &dist, &pick, 1, 9).is_err());
    }

    #[test]
    fn welford_merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.5).collect();
        let mut all = Welford::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Welford::default(), Welford::default());
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        let m = a.merge(b);
        assert!((m.mean - all.mean).abs() < 1e-12);
        assert!((m.m2 - all.m2).abs() < 1e-9 * all.m2);
    }
}
