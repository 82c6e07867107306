use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};
use pickmoments_cli::config::{apply_overrides, parse_entries, ConfigError};
use pickmoments_cli::{run, Command, ExitCode, Failure, RunConfig};

/// Picking-time moments, lead times and layouts for single-block warehouses.
#[derive(Parser)]
#[command(name = "pickmoments", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact E[T] and E[T^2] for every heuristic.
    Moments(Flags),
    /// Monte Carlo estimates with standard errors.
    Simulate(Flags),
    /// Mean order-lead time of the M/G/c approximation.
    Leadtime(Flags),
    /// Sweep the aisle count at fixed total aisle length.
    Layout(Flags),
    /// Compare analytic moments with simulation; exits 4 if any |z| > 4.
    Validate {
        #[command(flatten)]
        flags: Flags,
        /// Cover every built-in distribution at k = 1, 2, 3 and 5.
        #[arg(long)]
        grid: bool,
    },
}

#[derive(Args)]
struct Flags {
    /// Configuration file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    l: Option<String>,
    #[arg(long)]
    wa: Option<String>,
    #[arg(long)]
    v: Option<String>,
    /// det:M, spois:MEAN, geom:MEAN or snbin:R:MEAN
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    pick_mean: Option<String>,
    #[arg(long)]
    pick_scv: Option<String>,
    /// Comma-separated list, or `all`.
    #[arg(long)]
    heuristic: Option<String>,
    #[arg(long)]
    pickers: Option<String>,
    /// Orders per hour unless a unit is given.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    total_length: Option<String>,
    #[arg(long)]
    k_min: Option<String>,
    #[arg(long)]
    k_max: Option<String>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fail with exit code 3 instead of reporting unstable queues as NA.
    #[arg(long)]
    no_na: bool,
}

impl Flags {
    fn load(&self) -> Result<RunConfig, Failure> {
        let text = match &self.config {
            Some(p) => std::fs::read_to_string(p).map_err(|e| ConfigError {
                origin: None,
                key: "config".into(),
                message: format!("{}: {e}", p.display()),
            })?,
            None => String::new(),
        };
        let mut entries = parse_entries(&text)?;
        let pairs = [
            ("k", &self.k),
            ("l", &self.l),
            ("wa", &self.wa),
            ("v", &self.v),
            ("dist", &self.dist),
            ("pick_mean", &self.pick_mean),
            ("pick_scv", &self.pick_scv),
            ("heuristics", &self.heuristic),
            ("pickers", &self.pickers),
            ("lambda", &self.lambda),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("total_length", &self.total_length),
            ("k_min", &self.k_min),
            ("k_max", &self.k_max),
        ];
        let mut overrides: Vec<(&str, String)> = pairs
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
            .collect();
        if let Some(out) = &self.out {
            overrides.push(("out", out.display().to_string()));
        }
        if self.no_na {
            overrides.push(("na", "error".into()));
        }
        apply_overrides(&mut entries, &overrides);
        Ok(pickmoments_cli::config::from_entries(&entries)?)
    }
}

fn execute(cmd: Command, flags: &Flags) -> Result<(), Failure> {
    let cfg = flags.load()?;
    match &cfg.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            let result = run(cmd, &cfg, &mut f);
            f.flush()?;
            result
        }
        None => run(cmd, &cfg, io::stdout().lock()),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (cmd, flags) = match &cli.command {
        Cmd::Moments(f) => (Command::Moments, f),
        Cmd::Simulate(f) => (Command::Simulate, f),
        Cmd::Leadtime(f) => (Command::LeadTime, f),
        Cmd::Layout(f) => (Command::Layout, f),
        Cmd::Validate { flags, grid } => (Command::Validate { grid: *grid }, flags),
    };
    if let Err(e) = execute(cmd, flags) {
        let _ = e.write_csv(io::stderr().lock());
        let code = e.exit_code();
        debug_assert_ne!(code, ExitCode::Success);
        process::exit(code as i32);
    }
}
