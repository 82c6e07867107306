//! First and second moments of the total picking time `T` per routing heuristic.
//!
//! Every route decomposes as `T = ΣP + W + C`, where `ΣP` is the pick time
//! of the `M` items, `C = 2 w_a (k+ - 1) / v` the cross-aisle walk (shared by
//! all heuristics) and `W` the heuristic-specific aisle travel. Each module
//! supplies `E[W]`, `E[W^2]`, `E[M W]` and `E[k+ W]`; the second moment of
//! `T` then follows from independence of pick times and locations.

mod largest_gap;
mod midpoint;
mod return_route;
mod sshape;

use std::fmt;
use std::str::FromStr;

use log::debug;

use crate::error::{domain, Error, Result};
use crate::orderdist::OrderSizeDistribution;
use crate::prelim::{AisleModel, KplusMoments};
use crate::quadrature::QuadratureSettings;

pub use sshape::SShapeTerms;

/// Geometry of a single-block warehouse and the picker's walking speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarehouseConfig {
    /// Number of storage aisles.
    pub k: u32,
    /// Aisle length in meters.
    pub l: f64,
    /// Center-to-center aisle spacing in meters.
    pub w_a: f64,
    /// Walking speed in meters per second.
    pub v: f64,
}

impl WarehouseConfig {
    /// `w_a = 0` is accepted so that aisle travel can be studied in isolation.
    pub fn new(k: u32, l: f64, w_a: f64, v: f64) -> Result<Self> {
        if k == 0 || k > crate::prelim::MAX_AISLES {
            return Err(domain("k", k as f64, "aisle count must lie in 1..=48"));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(domain("l", l, "aisle length must be positive"));
        }
        if !(w_a >= 0.0 && w_a.is_finite()) {
            return Err(domain("w_a", w_a, "aisle spacing must be non-negative"));
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(domain("v", v, "walking speed must be positive"));
        }
        Ok(Self { k, l, w_a, v })
    }

    /// Same geometry with a different number of aisles and aisle length.
    pub fn reshaped(&self, k: u32, l: f64) -> Result<Self> {
        Self::new(k, l, self.w_a, self.v)
    }
}

/// First two moments of the time to pick one item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PickTimeModel {
    pub mean: f64,
    pub second_moment: f64,
}

impl PickTimeModel {
    /// A zero mean is allowed and removes picking from `T` entirely.
    pub fn new(mean: f64, second_moment: f64) -> Result<Self> {
        if !(mean >= 0.0 && mean.is_finite()) {
            return Err(domain("mean", mean, "pick time mean must be non-negative"));
        }
        if !(second_moment.is_finite() && second_moment >= mean * mean * (1.0 - 1e-12)) {
            return Err(domain(
                "second_moment",
                second_moment,
                "second moment below the squared mean",
            ));
        }
        Ok(Self {
            mean,
            second_moment: second_moment.max(mean * mean),
        })
    }

    /// From the mean and squared coefficient of variation.
    pub fn from_scv(mean: f64, scv: f64) -> Result<Self> {
        if !(scv >= 0.0 && scv.is_finite()) {
            return Err(domain("scv", scv, "squared coefficient of variation must be >= 0"));
        }
        Self::new(mean, mean * mean * (1.0 + scv))
    }

    pub fn variance(&self) -> f64 {
        (self.second_moment - self.mean * self.mean).max(0.0)
    }

    pub fn scv(&self) -> f64 {
        if self.mean == 0.0 {
            0.0
        } else {
            self.variance() / (self.mean * self.mean)
        }
    }
}

/// Moments of the picking time of one order, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub e_t: f64,
    pub e_t2: f64,
    pub var_t: f64,
    pub sd_t: f64,
    /// Within-aisle travel time `E[T_W]`.
    pub e_tw: f64,
    /// Total travel time `E[T_Tr]`.
    pub e_ttr: f64,
}

impl MomentReport {
    /// Squared coefficient of variation of `T`.
    pub fn scv(&self) -> f64 {
        self.var_t / (self.e_t * self.e_t)
    }
}

/// Routing heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Heuristic {
    Return,
    Midpoint,
    LargestGap,
    SShaped,
}

impl Heuristic {
    /// Tie-break order used when recommending a layout.
    pub const ALL: [Heuristic; 4] = [
        Heuristic::Return,
        Heuristic::Midpoint,
        Heuristic::LargestGap,
        Heuristic::SShaped,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::Return => "return",
            Heuristic::Midpoint => "midpoint",
            Heuristic::LargestGap => "largest-gap",
            Heuristic::SShaped => "s-shaped",
        }
    }

    /// Exact `E[T]`, `E[T^2]` with default quadrature settings.
    pub fn moments(
        self,
        cfg: &WarehouseConfig,
        dist: &OrderSizeDistribution,
        pick: &PickTimeModel,
    ) -> Result<MomentReport> {
        self.moments_with(cfg, dist, pick, &QuadratureSettings::default())
    }

    pub fn moments_with(
        self,
        cfg: &WarehouseConfig,
        dist: &OrderSizeDistribution,
        pick: &PickTimeModel,
        settings: &QuadratureSettings,
    ) -> Result<MomentReport> {
        let model = AisleModel::new(cfg.k, *dist)?.with_settings(*settings);
        let travel = match self {
            Heuristic::Return => return_route::travel(&model, cfg)?,
            Heuristic::Midpoint => midpoint::travel(&model, cfg)?,
            Heuristic::LargestGap => largest_gap::travel(&model, cfg)?,
            Heuristic::SShaped => sshape::travel(&model, cfg)?,
        };
        assemble(self, &model, cfg, pick, &travel)
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Heuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "return" => Ok(Heuristic::Return),
            "midpoint" => Ok(Heuristic::Midpoint),
            "largest-gap" | "largest_gap" | "largestgap" => Ok(Heuristic::LargestGap),
            "s-shaped" | "s_shaped" | "sshaped" | "s-shape" => Ok(Heuristic::SShaped),
            other => Err(Error::InvalidParameter(format!(
                "unknown heuristic `{other}` (expected return, midpoint, largest-gap or s-shaped)"
            ))),
        }
    }
}

pub fn return_moments(
    cfg: &WarehouseConfig,
    dist: &OrderSizeDistribution,
    pick: &PickTimeModel,
) -> Result<MomentReport> {
    Heuristic::Return.moments(cfg, dist, pick)
}

pub fn midpoint_moments(
    cfg: &WarehouseConfig,
    dist: &OrderSizeDistribution,
    pick: &PickTimeModel,
) -> Result<MomentReport> {
    Heuristic::Midpoint.moments(cfg, dist, pick)
}

pub fn largest_gap_moments(
    cfg: &WarehouseConfig,
    dist: &OrderSizeDistribution,
    pick: &PickTimeModel,
) -> Result<MomentReport> {
    Heuristic::LargestGap.moments(cfg, dist, pick)
}

pub fn sshaped_moments(
    cfg: &WarehouseConfig,
    dist: &OrderSizeDistribution,
    pick: &PickTimeModel,
) -> Result<MomentReport> {
    Heuristic::SShaped.moments(cfg, dist, pick)
}

/// `(E[T_W], E[T_Tr])`: travel without picking, and additionally without
/// the cross-aisle walk. The cross-aisle term is the same for every heuristic.
pub fn travel_decomposition(
    report: &MomentReport,
    cfg: &WarehouseConfig,
    dist: &OrderSizeDistribution,
    pick: &PickTimeModel,
) -> Result<(f64, f64)> {
    let model = AisleModel::new(cfg.k, *dist)?;
    let kp = model.kplus_moments();
    Ok(split_travel(report.e_t, cfg, dist, pick, &kp))
}

fn split_travel(
    e_t: f64,
    cfg: &WarehouseConfig,
    dist: &OrderSizeDistribution,
    pick: &PickTimeModel,
    kp: &KplusMoments,
) -> (f64, f64) {
    let e_ttr = e_t - dist.mean() * pick.mean;
    let e_tw = e_ttr - 2.0 * cfg.w_a / cfg.v * (kp.mean - 1.0);
    (e_tw, e_ttr)
}

/// Heuristic-specific aisle travel `W` in seconds.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Travel {
    /// `E[W]`
    pub mean: f64,
    /// `E[W^2]`
    pub second: f64,
    /// `E[M W]`
    pub cross_m: f64,
    /// `E[k+ W]`
    pub cross_k: f64,
}

/// Running named-term sum; each contribution is logged at debug level so a
/// discrepancy can be traced to a single expectation.
pub(crate) struct Terms {
    label: &'static str,
    total: f64,
}

impl Terms {
    pub fn new(label: &'static str) -> Self {
        Self { label, total: 0.0 }
    }

    pub fn add(&mut self, name: &str, value: f64) {
        debug!("{}: {name} = {value:.12e}", self.label);
        self.total += value;
    }

    pub fn total(&self) -> f64 {
        self.total
    }
}

fn assemble(
    heuristic: Heuristic,
    model: &AisleModel,
    cfg: &WarehouseConfig,
    pick: &PickTimeModel,
    w: &Travel,
) -> Result<MomentReport> {
    let (em, fm2) = model.dist.moments();
    let kp = model.kplus_moments();
    let (ep, ep2) = (pick.mean, pick.second_moment);
    let c = 2.0 * cfg.w_a / cfg.v;

    let mut first = Terms::new(heuristic.name());
    first.add("E[M]E[P]", em * ep);
    first.add("E[W]", w.mean);
    first.add("E[C]", c * (kp.mean - 1.0));
    let e_t = first.total();

    let mut second = Terms::new(heuristic.name());
    second.add("E[M(M-1)]E[P]^2 + E[M]E[P^2]", fm2 * ep * ep + em * ep2);
    second.add("E[W^2]", w.second);
    second.add("E[C^2]", c * c * (kp.second - 2.0 * kp.mean + 1.0));
    second.add("2E[P]E[MW]", 2.0 * ep * w.cross_m);
    second.add("2E[P]E[MC]", 2.0 * ep * c * (kp.cross_m - em));
    second.add("2E[WC]", 2.0 * c * (w.cross_k - w.mean));
    let e_t2 = second.total();

    let var = e_t2 - e_t * e_t;
    if var < -1e-9 * e_t2 {
        return Err(Error::Numerical(format!(
            "{heuristic}: negative variance {var:e} (E[T] = {e_t}, E[T^2] = {e_t2})"
        )));
    }
    let var_t = var.max(0.0);
    let (e_tw, e_ttr) = split_travel(e_t, cfg, &model.dist, pick, &kp);
    Ok(MomentReport {
        e_t,
        e_t2,
        var_t,
        sd_t: var_t.sqrt(),
        e_tw,
        e_ttr,
    })
}
