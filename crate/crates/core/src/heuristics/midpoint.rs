//! Midpoint routing: the first and last visited aisles are traversed, every
//! aisle in between is entered from both cross-aisles up to its midpoint.

use super::{Terms, Travel, WarehouseConfig};
use crate::error::Result;
use crate::prelim::AisleModel;

/// `W = (l/v) Σ_{k- < i < k+} (A_i^f + A_i^b) + 2l/v`.
pub(crate) fn travel(model: &AisleModel, cfg: &WarehouseConfig) -> Result<Travel> {
    let k = model.k;
    let kf = k as f64;
    let mut s_mean = Terms::new("midpoint E[S^f]");
    let mut s_sq = Terms::new("midpoint E[(S^f+S^b)^2]");
    let mut s_k = Terms::new("midpoint E[k+ S^f]");
    let mut s_m = Terms::new("midpoint E[M S^f]");
    for d in 2..k {
        let h = model.half_aisle_moments(d)?;
        let df = d as f64;
        let places = kf - df;
        let inner = df - 1.0;
        s_mean.add("(k-d)(d-1) E[A^f 1]", places * inner * h.mean);
        s_sq.add("(k-d)(2d-2) E[(A^f)^2 1]", places * 2.0 * inner * h.second);
        s_sq.add(
            "(k-d)(2d-2)(2d-3) E[A^f A^b 1]",
            places * 2.0 * inner * (2.0 * df - 3.0) * h.cross,
        );
        s_k.add(
            "(k-d)(k+d+1)(d-1)/2 E[A^f 1]",
            0.5 * places * (kf + df + 1.0) * inner * h.mean,
        );
        s_m.add("(k-d)(d-1) E[N^f A^f 1]", places * inner * h.count_same);
        s_m.add(
            "(k-d)(d-1)(2d-3) E[N' A^f 1]",
            places * inner * (2.0 * df - 3.0) * h.count_other,
        );
        s_m.add("(k-d)(d-1) 2E[N_l A^f 1]", places * inner * 2.0 * h.count_endpoint);
    }
    let u = cfg.l / cfg.v;
    let e_s = 2.0 * s_mean.total();
    let base = 2.0 * u;
    let kp = model.kplus_moments();
    Ok(Travel {
        mean: u * e_s + base,
        second: u * u * s_sq.total() + 2.0 * base * u * e_s + base * base,
        cross_m: u * 2.0 * s_m.total() + base * model.dist.mean(),
        cross_k: u * 2.0 * s_k.total() + base * kp.mean,
    })
}
