//! Layout sweep at fixed total aisle length `k * l`, and the layout and
//! heuristic that minimize a chosen metric.

use std::ops::RangeInclusive;

use log::warn;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::heuristics::{Heuristic, PickTimeModel, WarehouseConfig};
use crate::orderdist::OrderSizeDistribution;
use crate::queueing::{lead_time_estimate, QueueScenario};

/// One heuristic's results in a layout row; `None` marks NA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutCell {
    pub heuristic: Heuristic,
    pub e_t: Option<f64>,
    pub e_r: Option<f64>,
}

/// All requested heuristics for one warehouse shape.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutRow {
    pub k: u32,
    pub l: f64,
    pub cells: Vec<LayoutCell>,
}

impl LayoutRow {
    pub fn cell(&self, h: Heuristic) -> Option<&LayoutCell> {
        self.cells.iter().find(|c| c.heuristic == h)
    }
}

/// Quantity minimized by [`recommend`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    MeanPickTime,
    LeadTime,
}

impl Metric {
    fn of(self, cell: &LayoutCell) -> Option<f64> {
        match self {
            Metric::MeanPickTime => cell.e_t,
            Metric::LeadTime => cell.e_r,
        }
    }
}

fn cell(
    h: Heuristic,
    cfg: &WarehouseConfig,
    dist: &OrderSizeDistribution,
    pick: &PickTimeModel,
    scenario: Option<&QueueScenario>,
) -> LayoutCell {
    let report = match h.moments(cfg, dist, pick) {
        Ok(r) => r,
        Err(e) => {
            warn!("k = {}, {h}: {e}", cfg.k);
            return LayoutCell {
                heuristic: h,
                e_t: None,
                e_r: None,
            };
        }
    };
    let e_r = scenario.and_then(|s| match lead_time_estimate(&report, s) {
        Ok(lt) => lt.e_r,
        Err(e) => {
            warn!("k = {}, {h}: {e}", cfg.k);
            None
        }
    });
    LayoutCell {
        heuristic: h,
        e_t: Some(report.e_t),
        e_r,
    }
}

/// For each `k` in `ks`, set `l = total_length / k` (keeping `w_a` and `v`
/// from `base`) and evaluate every heuristic. Cells that fail are NA.
pub fn layout_sweep(
    total_length: f64,
    ks: RangeInclusive<u32>,
    base: &WarehouseConfig,
    dist: &OrderSizeDistribution,
    pick: &PickTimeModel,
    scenario: Option<&QueueScenario>,
    heuristics: &[Heuristic],
) -> Result<Vec<LayoutRow>> {
    if !(total_length > 0.0 && total_length.is_finite()) {
        return Err(domain("total_length", total_length, "total aisle length must be positive"));
    }
    if *ks.start() == 0 {
        return Err(domain("k", 0.0, "aisle count must be at least 1"));
    }
    if ks.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "empty aisle range {}..={}",
            ks.start(),
            ks.end()
        )));
    }
    let shapes = ks
        .map(|k| base.reshaped(k, total_length / k as f64).map(|c| (k, c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(shapes
        .into_par_iter()
        .map(|(k, cfg)| LayoutRow {
            k,
            l: cfg.l,
            cells: heuristics
                .iter()
                .map(|&h| cell(h, &cfg, dist, pick, scenario))
                .collect(),
        })
        .collect())
}

/// `(k, heuristic)` minimizing `metric` over all non-NA cells. Ties go to the
/// smaller `k`, then to the earlier heuristic in [`Heuristic::ALL`].
pub fn recommend(rows: &[LayoutRow], metric: Metric) -> Result<(u32, Heuristic)> {
    let mut best: Option<(f64, u32, Heuristic)> = None;
    for row in rows {
        for c in &row.cells {
            let Some(v) = metric.of(c) else { continue };
            let better = match best {
                None => true,
                Some((bv, bk, bh)) => (v, row.k, c.heuristic) < (bv, bk, bh),
            };
            if better {
                best = Some((v, row.k, c.heuristic));
            }
        }
    }
    best.map(|(_, k, h)| (k, h)).ok_or(Error::NoFeasibleLayout)
}
