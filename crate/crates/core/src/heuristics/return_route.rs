//! Return routing: enter every visited aisle from the front, walk to the
//! furthest item and back.

use super::{Terms, Travel, WarehouseConfig};
use crate::error::Result;
use crate::prelim::{AisleMode, AisleModel};

/// `W = (2l/v) Σ_i A_i`.
pub(crate) fn travel(model: &AisleModel, cfg: &WarehouseConfig) -> Result<Travel> {
    let k = model.k as f64;
    let a = model.far_item_moments(AisleMode::Full)?;
    let u = 2.0 * cfg.l / cfg.v;

    let mut sq = Terms::new("return");
    sq.add("k E[A^2]", k * a.second);
    sq.add("k(k-1) E[A_i A_j]", k * (k - 1.0) * a.cross.unwrap_or(0.0));

    Ok(Travel {
        mean: u * k * a.mean,
        second: u * u * sq.total(),
        cross_m: u * k * model.m_far_cross()?,
        cross_k: u * model.far_item_kplus_cross_sum()?,
    })
}
