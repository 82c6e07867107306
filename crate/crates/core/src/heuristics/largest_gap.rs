//! Largest-gap routing: the first and last visited aisles are traversed,
//! every aisle in between is entered from both cross-aisles up to its
//! largest gap between consecutive items.

use rayon::prelude::*;

use super::{Terms, Travel, WarehouseConfig};
use crate::error::Result;
use crate::prelim::{AisleModel, CountAisle};

struct PerDistance {
    mean: f64,
    second: f64,
    cross: f64,
    same: f64,
    other: f64,
    endpoint: f64,
}

fn per_distance(model: &AisleModel, d: u32) -> Result<PerDistance> {
    let g = model.gap_moments(Some(d))?;
    let other = if d >= 3 {
        model.gap_count_cross(d, CountAisle::OtherInterior)?
    } else {
        0.0
    };
    Ok(PerDistance {
        mean: g.mean_1md,
        second: g.second_1md,
        cross: g.cross_1md.unwrap_or(0.0),
        same: model.gap_count_cross(d, CountAisle::Same)?,
        other,
        endpoint: model.gap_count_cross(d, CountAisle::Endpoint)?,
    })
}

/// `W = (2l/v) Σ_{k- < i < k+} (1 - D_i) + 2l/v`.
pub(crate) fn travel(model: &AisleModel, cfg: &WarehouseConfig) -> Result<Travel> {
    let k = model.k;
    let kf = k as f64;
    // The distances are independent; collect in order so the sums below are
    // reduced deterministically.
    let parts: Vec<PerDistance> = (2..k)
        .into_par_iter()
        .map(|d| per_distance(model, d))
        .collect::<Result<_>>()?;

    let mut g_mean = Terms::new("largest-gap E[G]");
    let mut g_sq = Terms::new("largest-gap E[G^2]");
    let mut g_k = Terms::new("largest-gap E[k+ G]");
    let mut g_m = Terms::new("largest-gap E[M G]");
    for (d, p) in (2..k).zip(&parts) {
        let df = d as f64;
        let places = kf - df;
        let inner = df - 1.0;
        g_mean.add("(k-d)(d-1) E[(1-D) 1]", places * inner * p.mean);
        g_sq.add("(k-d)(d-1) E[(1-D)^2 1]", places * inner * p.second);
        g_sq.add(
            "(k-d)(d-1)(d-2) E[(1-D_i)(1-D_m) 1]",
            places * inner * (df - 2.0) * p.cross,
        );
        g_k.add(
            "(k-d)(k+d+1)(d-1)/2 E[(1-D) 1]",
            0.5 * places * (kf + df + 1.0) * inner * p.mean,
        );
        g_m.add("(k-d)(d-1) E[N_i(1-D_i) 1]", places * inner * p.same);
        g_m.add("(k-d)(d-1)(d-2) E[N_m(1-D_i) 1]", places * inner * (df - 2.0) * p.other);
        g_m.add("(k-d)(d-1) 2E[N_l(1-D_i) 1]", places * inner * 2.0 * p.endpoint);
    }
    let u = 2.0 * cfg.l / cfg.v;
    let e_g = g_mean.total();
    let kp = model.kplus_moments();
    Ok(Travel {
        mean: u * e_g + u,
        second: u * u * (g_sq.total() + 2.0 * e_g + 1.0),
        cross_m: u * (g_m.total() + model.dist.mean()),
        cross_k: u * (g_k.total() + kp.mean),
    })
}
