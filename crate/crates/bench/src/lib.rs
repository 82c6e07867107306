//! Shared fixtures for the benchmarks.

use pickmoments::{OrderSizeDistribution, PickTimeModel, WarehouseConfig};

/// Five aisles of 20 m, 2.5 m apart, walked at 3 km/h.
pub fn baseline(k: u32) -> WarehouseConfig {
    WarehouseConfig::new(k, 20.0, 2.5, 5.0 / 6.0).expect("valid warehouse")
}

pub fn orders(mean: f64) -> OrderSizeDistribution {
    OrderSizeDistribution::geometric_with_mean(mean).expect("valid mean")
}

pub fn picks() -> PickTimeModel {
    PickTimeModel::from_scv(5.0, 0.5).expect("valid pick model")
}
