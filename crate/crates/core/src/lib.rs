//! Exact first and second moments of order-picking time in a single-block
//! warehouse under random storage, for return, midpoint, largest-gap and
//! S-shaped routing, with general order-size distributions.
//!
//! Every analytic formula consumes the order size only through its
//! probability generating function. A Monte Carlo simulator evaluates the
//! route-time equations directly and serves as an independent oracle.
//!
//! ```
//! use pickmoments::{Heuristic, OrderSizeDistribution, PickTimeModel, WarehouseConfig};
//!
//! let cfg = WarehouseConfig::new(5, 20.0, 2.5, 3.0 / 3.6).unwrap();
//! let dist: OrderSizeDistribution = "geom:32".parse().unwrap();
//! let pick = PickTimeModel::new(5.0, 50.0).unwrap();
//! let lg = Heuristic::LargestGap.moments(&cfg, &dist, &pick).unwrap();
//! let mp = Heuristic::Midpoint.moments(&cfg, &dist, &pick).unwrap();
//! assert!(lg.e_t < mp.e_t);
//! ```

pub mod error;
pub mod ext;
pub mod heuristics;
pub mod layout;
pub mod orderdist;
pub mod prelim;
pub mod quadrature;
pub mod queueing;
pub mod simulate;

pub use error::{Error, Result};
pub use heuristics::{Heuristic, MomentReport, PickTimeModel, WarehouseConfig};
pub use layout::{layout_sweep, recommend, LayoutRow, Metric};
pub use orderdist::OrderSizeDistribution;
pub use prelim::AisleModel;
pub use quadrature::QuadratureSettings;
pub use queueing::{erlang_c_wait_prob, lead_time_estimate, LeadTimeReport, QueueScenario};
pub use simulate::{run_replications, McEstimate, SampledOrder};
