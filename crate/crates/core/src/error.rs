use thiserror::Error;

/// Errors raised by the analytic engine and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument `{name}` = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration failed after {subdivisions} subdivisions (partial value {value:e}, error estimate {err_est:e})")]
    Integration {
        value: f64,
        err_est: f64,
        subdivisions: usize,
    },

    #[error("unstable queue: utilization {rho} >= 1")]
    Unstable { rho: f64 },

    #[error("no feasible layout: every cell is NA for the requested metric")]
    NoFeasibleLayout,

    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}
