//! The warehouse as an M/G/c queue: `c` pickers serve Poisson order arrivals
//! FCFS, each order taking the picking time `T` of one tour.

use crate::error::{domain, Error, Result};
use crate::heuristics::MomentReport;

/// Number of pickers and order arrival rate (orders per second).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueScenario {
    pub c: u32,
    pub lambda: f64,
}

impl QueueScenario {
    pub fn new(c: u32, lambda: f64) -> Result<Self> {
        if c == 0 {
            return Err(domain("c", 0.0, "at least one picker is needed"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(domain("lambda", lambda, "arrival rate must be positive"));
        }
        Ok(Self { c, lambda })
    }

    /// Arrival rate given in orders per hour.
    pub fn per_hour(c: u32, lambda_per_hour: f64) -> Result<Self> {
        Self::new(c, lambda_per_hour / 3600.0)
    }
}

/// Utilization, probability of waiting and approximate mean order-lead time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadTimeReport {
    pub rho: f64,
    /// `None` when the system is unstable.
    pub q_wait: Option<f64>,
    /// Mean sojourn time in seconds; `None` when `rho >= 1`.
    pub e_r: Option<f64>,
}

impl LeadTimeReport {
    pub fn is_stable(&self) -> bool {
        self.e_r.is_some()
    }
}

/// Probability that an arrival waits in an M/M/c queue with utilization
/// `rho`, via the Erlang-B recurrence.
pub fn erlang_c_wait_prob(c: u32, rho: f64) -> Result<f64> {
    if c == 0 {
        return Err(domain("c", 0.0, "at least one server is needed"));
    }
    if !(rho >= 0.0) || rho.is_nan() {
        return Err(domain("rho", rho, "utilization must be non-negative"));
    }
    if rho >= 1.0 {
        return Err(Error::Unstable { rho });
    }
    let a = c as f64 * rho;
    let mut b = 1.0;
    for n in 1..=c {
        b = a * b / (n as f64 + a * b);
    }
    Ok(b / (1.0 - rho * (1.0 - b)))
}

/// Two-moment approximation
/// `E[R] = Q / (c (1 - rho)) * (1 + C_T^2) / 2 * E[T] + E[T]`.
pub fn lead_time_estimate(report: &MomentReport, scenario: &QueueScenario) -> Result<LeadTimeReport> {
    let e_t = report.e_t;
    if !(e_t > 0.0 && e_t.is_finite()) {
        return Err(domain("e_t", e_t, "mean picking time must be positive"));
    }
    let c = scenario.c as f64;
    let rho = scenario.lambda * e_t / c;
    if rho >= 1.0 {
        return Ok(LeadTimeReport {
            rho,
            q_wait: None,
            e_r: None,
        });
    }
    let q = erlang_c_wait_prob(scenario.c, rho)?;
    let scv = report.var_t / (e_t * e_t);
    let wait = q / (c * (1.0 - rho)) * 0.5 * (1.0 + scv) * e_t;
    Ok(LeadTimeReport {
        rho,
        q_wait: Some(q),
        e_r: Some(wait + e_t),
    })
}
