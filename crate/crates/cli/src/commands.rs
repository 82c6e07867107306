//! Subcommands. Every command writes one CSV table; numbers use Rust's
//! shortest round-trip formatting so identical inputs give identical bytes.

use std::io::Write;

use pickmoments::simulate::run_replications_all;
use pickmoments::{
    layout_sweep, lead_time_estimate, Error, Heuristic, MomentReport, OrderSizeDistribution, PickTimeModel,
    WarehouseConfig,
};

use crate::config::{ConfigError, RunConfig};

pub const MOMENTS_HEADER: &[&str] = &[
    "heuristic", "k", "l", "wa", "v", "dist", "E_T", "E_T2", "Var_T", "SD_T", "E_TW", "E_TTr",
];
pub const SIMULATE_HEADER: &[&str] = &[
    "heuristic", "k", "l", "wa", "v", "dist", "n", "seed", "E_T", "SE_E_T", "E_T2", "SE_E_T2",
];
pub const LEADTIME_EXTRA: &[&str] = &["c", "lambda", "rho", "Q", "E_R"];
pub const LAYOUT_HEADER: &[&str] = &["k", "l", "heuristic", "E_T", "E_R"];
pub const VALIDATE_HEADER: &[&str] = &["heuristic", "k", "dist", "quantity", "analytic", "mc", "se", "z"];
pub const ERROR_HEADER: &[&str] = &["kind", "key", "message"];

/// Sample size used by `validate` and `simulate` when none is configured.
pub const DEFAULT_SAMPLES: u64 = 100_000;
/// Largest `|z|` accepted by `validate`.
pub const Z_LIMIT: f64 = 4.0;
/// Distributions covered by `validate --grid`.
pub const GRID_DISTS: &[&str] = &["det:1", "det:3", "spois:4", "geom:8", "geom:32", "snbin:2:8"];
pub const GRID_KS: &[u32] = &[1, 2, 3, 5];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Moments,
    Simulate,
    LeadTime,
    Layout,
    /// Analytic against Monte Carlo; `grid` sweeps every built-in distribution
    /// and `k` in [`GRID_KS`] instead of the configured shape.
    Validate { grid: bool },
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Failure = 1,
    Invalid = 2,
    Unstable = 3,
    ZScore = 4,
}

/// A command that did not succeed.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("unstable queue for {heuristic} (utilization {rho}) and NA values are not allowed")]
    UnstableNotAllowed { heuristic: Heuristic, rho: f64 },
    #[error("{count} validation z-scores exceed {Z_LIMIT}")]
    ZScore { count: usize },
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Config(_) => ExitCode::Invalid,
            Failure::Model(Error::Domain { .. } | Error::InvalidParameter(_)) => ExitCode::Invalid,
            Failure::Model(Error::Unstable { .. }) | Failure::UnstableNotAllowed { .. } => ExitCode::Unstable,
            Failure::ZScore { .. } => ExitCode::ZScore,
            Failure::Model(_) | Failure::Io(_) | Failure::Csv(_) => ExitCode::Failure,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Config(_) => "config",
            Failure::Model(Error::Domain { .. } | Error::InvalidParameter(_)) => "domain",
            Failure::Model(Error::Integration { .. }) => "integration",
            Failure::Model(Error::Unstable { .. }) | Failure::UnstableNotAllowed { .. } => "unstable",
            Failure::Model(Error::NoFeasibleLayout) => "no-feasible-layout",
            Failure::Model(Error::Numerical(_)) => "numerical",
            Failure::ZScore { .. } => "validation",
            Failure::Io(_) | Failure::Csv(_) => "io",
        }
    }

    fn key(&self) -> String {
        match self {
            Failure::Config(e) => e.key.clone(),
            Failure::Model(Error::Domain { name, .. }) => name.to_string(),
            Failure::UnstableNotAllowed { heuristic, .. } => heuristic.to_string(),
            _ => String::new(),
        }
    }

    /// Machine-readable description: a header and one row.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(ERROR_HEADER)?;
        w.write_record([self.kind(), &self.key(), &self.to_string()])?;
        w.flush()?;
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn na(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), num)
}

fn shape_fields(h: Heuristic, cfg: &RunConfig) -> Vec<String> {
    vec![
        h.to_string(),
        cfg.k.to_string(),
        num(cfg.l),
        num(cfg.wa),
        num(cfg.v),
        cfg.dist.to_string(),
    ]
}

fn moment_fields(r: &MomentReport) -> [String; 6] {
    [r.e_t, r.e_t2, r.var_t, r.sd_t, r.e_tw, r.e_ttr].map(num)
}

fn all_moments(cfg: &RunConfig) -> Result<Vec<(Heuristic, MomentReport)>, Failure> {
    let wh = cfg.warehouse();
    let pick = cfg.pick();
    cfg.heuristics
        .iter()
        .map(|&h| Ok((h, h.moments(&wh, &cfg.dist, &pick)?)))
        .collect()
}

/// Run `cmd` and write its CSV table to `out`.
pub fn run<W: Write>(cmd: Command, cfg: &RunConfig, out: W) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    match cmd {
        Command::Moments => moments(cfg, &mut w)?,
        Command::Simulate => simulate(cfg, &mut w)?,
        Command::LeadTime => leadtime(cfg, &mut w)?,
        Command::Layout => layout(cfg, &mut w)?,
        Command::Validate { grid } => {
            let count = validate(cfg, grid, &mut w)?;
            w.flush()?;
            if count > 0 {
                return Err(Failure::ZScore { count });
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn moments<W: Write>(cfg: &RunConfig, w: &mut csv::Writer<W>) -> Result<(), Failure> {
    w.write_record(MOMENTS_HEADER)?;
    for (h, r) in all_moments(cfg)? {
        let mut row = shape_fields(h, cfg);
        row.extend(moment_fields(&r));
        w.write_record(&row)?;
    }
    Ok(())
}

fn simulate<W: Write>(cfg: &RunConfig, w: &mut csv::Writer<W>) -> Result<(), Failure> {
    let (n, seed) = cfg.mc.map_or((DEFAULT_SAMPLES, 0), |mc| (mc.samples, mc.seed));
    let est = run_replications_all(&cfg.warehouse(), &cfg.dist, &cfg.pick(), n, seed)?;
    w.write_record(SIMULATE_HEADER)?;
    for &h in &cfg.heuristics {
        let e = est[index(h)];
        let mut row = shape_fields(h, cfg);
        row.extend([n.to_string(), seed.to_string()]);
        row.extend([e.mean_t, e.se_mean, e.mean_t2, e.se_t2].map(num));
        w.write_record(&row)?;
    }
    Ok(())
}

fn leadtime<W: Write>(cfg: &RunConfig, w: &mut csv::Writer<W>) -> Result<(), Failure> {
    let Some(sc) = cfg.scenario else {
        return Err(ConfigError {
            origin: None,
            key: "pickers".into(),
            message: "`leadtime` needs `pickers` and `lambda`".into(),
        }
        .into());
    };
    let queue = sc.queue();
    let rows = all_moments(cfg)?
        .into_iter()
        .map(|(h, r)| Ok((h, r, lead_time_estimate(&r, &queue)?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    if !cfg.allow_na {
        if let Some((h, _, lt)) = rows.iter().find(|(_, _, lt)| !lt.is_stable()) {
            return Err(Failure::UnstableNotAllowed { heuristic: *h, rho: lt.rho });
        }
    }
    let header: Vec<&str> = MOMENTS_HEADER.iter().chain(LEADTIME_EXTRA).copied().collect();
    w.write_record(&header)?;
    for (h, r, lt) in rows {
        let mut row = shape_fields(h, cfg);
        row.extend(moment_fields(&r));
        row.extend([
            sc.pickers.to_string(),
            num(sc.lambda_per_hour),
            num(lt.rho),
            na(lt.q_wait),
            na(lt.e_r),
        ]);
        w.write_record(&row)?;
    }
    Ok(())
}

fn layout<W: Write>(cfg: &RunConfig, w: &mut csv::Writer<W>) -> Result<(), Failure> {
    let Some(spec) = cfg.layout else {
        return Err(ConfigError {
            origin: None,
            key: "total_length".into(),
            message: "`layout` needs `total_length`, `k_min` and `k_max`".into(),
        }
        .into());
    };
    let queue = cfg.scenario.map(|s| s.queue());
    let rows = layout_sweep(
        spec.total_length,
        spec.k_min..=spec.k_max,
        &cfg.warehouse(),
        &cfg.dist,
        &cfg.pick(),
        queue.as_ref(),
        &cfg.heuristics,
    )?;
    if !cfg.allow_na && queue.is_some() {
        for row in &rows {
            if let Some(c) = row.cells.iter().find(|c| c.e_t.is_some() && c.e_r.is_none()) {
                let rho = queue.map_or(f64::NAN, |q| q.lambda * c.e_t.unwrap_or(f64::NAN) / q.c as f64);
                return Err(Failure::UnstableNotAllowed { heuristic: c.heuristic, rho });
            }
        }
    }
    w.write_record(LAYOUT_HEADER)?;
    for row in rows {
        for c in row.cells {
            w.write_record([row.k.to_string(), num(row.l), c.heuristic.to_string(), na(c.e_t), na(c.e_r)])?;
        }
    }
    Ok(())
}

fn index(h: Heuristic) -> usize {
    Heuristic::ALL.iter().position(|&x| x == h).expect("ALL lists every heuristic")
}

/// One analytic-against-simulation comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ZRow {
    pub heuristic: Heuristic,
    pub k: u32,
    pub dist: OrderSizeDistribution,
    pub quantity: &'static str,
    pub analytic: f64,
    pub mc: f64,
    pub se: f64,
}

impl ZRow {
    pub fn z(&self) -> f64 {
        if self.se > 0.0 {
            (self.mc - self.analytic) / self.se
        } else if (self.mc - self.analytic).abs() <= 1e-9 * self.analytic.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Compare analytic `E[T]` and `E[T^2]` with a simulation of `n` orders for
/// every heuristic in `heuristics`.
pub fn compare(
    wh: &WarehouseConfig,
    dist: &OrderSizeDistribution,
    pick: &PickTimeModel,
    heuristics: &[Heuristic],
    n: u64,
    seed: u64,
) -> Result<Vec<ZRow>, Error> {
    let est = run_replications_all(wh, dist, pick, n, seed)?;
    let mut out = Vec::with_capacity(2 * heuristics.len());
    for &h in heuristics {
        let r = h.moments(wh, dist, pick)?;
        let e = est[index(h)];
        for (quantity, analytic, mc, se) in [("E_T", r.e_t, e.mean_t, e.se_mean), ("E_T2", r.e_t2, e.mean_t2, e.se_t2)] {
            out.push(ZRow {
                heuristic: h,
                k: wh.k,
                dist: *dist,
                quantity,
                analytic,
                mc,
                se,
            });
        }
    }
    Ok(out)
}

fn validate<W: Write>(cfg: &RunConfig, grid: bool, w: &mut csv::Writer<W>) -> Result<usize, Failure> {
    let (n, seed) = cfg.mc.map_or((DEFAULT_SAMPLES, 0), |mc| (mc.samples, mc.seed));
    let pick = cfg.pick();
    let cases: Vec<(WarehouseConfig, OrderSizeDistribution)> = if grid {
        let dists: Vec<OrderSizeDistribution> = GRID_DISTS.iter().map(|s| s.parse().expect("valid built-in")).collect();
        GRID_KS
            .iter()
            .flat_map(|&k| dists.iter().map(move |d| (k, *d)))
            .map(|(k, d)| Ok((cfg.warehouse().reshaped(k, cfg.l)?, d)))
            .collect::<Result<_, Error>>()?
    } else {
        vec![(cfg.warehouse(), cfg.dist)]
    };
    w.write_record(VALIDATE_HEADER)?;
    let mut failures = 0;
    for (i, (wh, dist)) in cases.iter().enumerate() {
        // Each case draws from its own seed so cases stay independent.
        let rows = compare(wh, dist, &pick, &cfg.heuristics, n, seed.wrapping_add(i as u64))?;
        for r in rows {
            let z = r.z();
            if !(z.abs() <= Z_LIMIT) {
                failures += 1;
            }
            w.write_record([
                r.heuristic.to_string(),
                r.k.to_string(),
                r.dist.to_string(),
                r.quantity.to_string(),
                num(r.analytic),
                num(r.mc),
                num(r.se),
                num(z),
            ])?;
        }
    }
    Ok(failures)
}
