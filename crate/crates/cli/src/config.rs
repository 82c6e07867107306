//! Line-oriented `key = value` run configuration.
//!
//! ```text
//! # baseline warehouse
//! k = 5
//! l = 20 m
//! wa = 2.5 m
//! v = 3 km/h
//! dist = geom:32
//! pick_mean = 5 s
//! pick_scv = 0.5
//! pickers = 5
//! lambda = 51 /h
//! ```
//!
//! Lengths accept `m`, `cm`, `mm` and `km`; speeds `m/s`, `m/min` and
//! `km/h`; times `s`, `ms` and `min`; rates `/h`, `/min` and `/s`. A bare
//! number is read in meters, meters per second, seconds or orders per hour.

use std::fmt;
use std::path::PathBuf;

use pickmoments::{Heuristic, OrderSizeDistribution, PickTimeModel, QueueScenario, WarehouseConfig};

/// Where a configuration value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
}

/// Parse or validation failure, naming the offending key.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub origin: Option<Origin>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.origin {
            Some(Origin::Line(n)) => write!(f, "line {n}, key `{}`: {}", self.key, self.message),
            Some(Origin::Flag) => write!(f, "flag for `{}`: {}", self.key, self.message),
            None => write!(f, "key `{}`: {}", self.key, self.message),
        }
    }
}

const KEYS: &[&str] = &[
    "k",
    "l",
    "wa",
    "v",
    "dist",
    "pick_mean",
    "pick_scv",
    "heuristics",
    "pickers",
    "lambda",
    "samples",
    "seed",
    "total_length",
    "k_min",
    "k_max",
    "out",
    "na",
];

/// Pickers and order arrival rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub pickers: u32,
    pub lambda_per_hour: f64,
}

impl Scenario {
    pub fn queue(&self) -> QueueScenario {
        QueueScenario::per_hour(self.pickers, self.lambda_per_hour).expect("validated at parse time")
    }
}

/// Monte Carlo sample size and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub samples: u64,
    pub seed: u64,
}

/// Layout sweep over `k_min..=k_max` at fixed total aisle length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutSpec {
    pub total_length: f64,
    pub k_min: u32,
    pub k_max: u32,
}

/// Fully validated run configuration, in SI units (rates per hour).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub k: u32,
    pub l: f64,
    pub wa: f64,
    pub v: f64,
    pub dist: OrderSizeDistribution,
    pub pick_mean: f64,
    pub pick_scv: f64,
    pub heuristics: Vec<Heuristic>,
    pub scenario: Option<Scenario>,
    pub mc: Option<MonteCarlo>,
    pub layout: Option<LayoutSpec>,
    pub out: Option<PathBuf>,
    /// Report unstable queues as NA instead of failing.
    pub allow_na: bool,
}

impl RunConfig {
    pub fn warehouse(&self) -> WarehouseConfig {
        WarehouseConfig::new(self.k, self.l, self.wa, self.v).expect("validated at parse time")
    }

    pub fn pick(&self) -> PickTimeModel {
        PickTimeModel::from_scv(self.pick_mean, self.pick_scv).expect("validated at parse time")
    }
}

/// One `key = value` assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub origin: Origin,
    pub key: String,
    pub value: String,
}

/// Split configuration text into entries; later duplicates are rejected.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let origin = Origin::Line(i + 1);
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError {
                origin: Some(origin),
                key: line.to_string(),
                message: "expected `key = value`".into(),
            });
        };
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError {
                origin: Some(origin),
                key,
                message: "unknown key".into(),
            });
        }
        if out.iter().any(|e| e.key == key) {
            return Err(ConfigError {
                origin: Some(origin),
                key,
                message: "key given twice".into(),
            });
        }
        out.push(Entry {
            origin,
            key,
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

/// Replace or add entries from command-line flags.
pub fn apply_overrides(entries: &mut Vec<Entry>, overrides: &[(&str, String)]) {
    for (key, value) in overrides {
        entries.retain(|e| e.key != *key);
        entries.push(Entry {
            origin: Origin::Flag,
            key: key.to_string(),
            value: value.clone(),
        });
    }
}

/// Parse and validate configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    from_entries(&parse_entries(text)?)
}

#[derive(Clone, Copy)]
enum Quantity {
    Length,
    Speed,
    Time,
    Rate,
}

fn split_unit(value: &str) -> (&str, &str) {
    let idx = value
        .char_indices()
        .find(|&(_, c)| c.is_ascii_alphabetic() && c != 'e' && c != 'E' || c == '/' || c.is_whitespace())
        .map(|(i, _)| i)
        .unwrap_or(value.len());
    (value[..idx].trim(), value[idx..].trim())
}

fn unit_factor(q: Quantity, unit: &str) -> Option<f64> {
    let u = unit.replace(' ', "").to_ascii_lowercase();
    Some(match (q, u.as_str()) {
        (Quantity::Length, "" | "m") => 1.0,
        (Quantity::Length, "cm") => 0.01,
        (Quantity::Length, "mm") => 0.001,
        (Quantity::Length, "km") => 1000.0,
        (Quantity::Speed, "" | "m/s") => 1.0,
        (Quantity::Speed, "m/min") => 1.0 / 60.0,
        (Quantity::Speed, "km/h") => 1000.0 / 3600.0,
        (Quantity::Time, "" | "s") => 1.0,
        (Quantity::Time, "ms") => 0.001,
        (Quantity::Time, "min") => 60.0,
        (Quantity::Rate, "" | "/h") => 1.0,
        (Quantity::Rate, "/min") => 60.0,
        (Quantity::Rate, "/s") => 3600.0,
        _ => return None,
    })
}

struct Reader<'a> {
    entries: &'a [Entry],
}

impl<'a> Reader<'a> {
    fn find(&self, key: &str) -> Option<&'a Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            origin: self.find(key).map(|e| e.origin.clone()),
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn required<T>(&self, key: &str, f: impl Fn(&Self, &str) -> Result<T, ConfigError>) -> Result<T, ConfigError> {
        if self.find(key).is_none() {
            return Err(self.err(key, "missing required key"));
        }
        f(self, key)
    }

    fn optional<T>(&self, key: &str, f: impl Fn(&Self, &str) -> Result<T, ConfigError>) -> Result<Option<T>, ConfigError> {
        match self.find(key) {
            Some(_) => f(self, key).map(Some),
            None => Ok(None),
        }
    }

    fn raw(&self, key: &str) -> &'a str {
        &self.find(key).expect("checked by caller").value
    }

    fn quantity(&self, key: &str, q: Quantity) -> Result<f64, ConfigError> {
        let (num, unit) = split_unit(self.raw(key));
        let x: f64 = num.parse().map_err(|_| self.err(key, format!("`{num}` is not a number")))?;
        let f = unit_factor(q, unit).ok_or_else(|| self.err(key, format!("unknown unit `{unit}`")))?;
        if !x.is_finite() {
            return Err(self.err(key, "value must be finite"));
        }
        Ok(x * f)
    }

    fn integer<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        let raw = self.raw(key);
        raw.parse().map_err(|_| self.err(key, format!("`{raw}` is not a non-negative integer")))
    }
}

pub fn from_entries(entries: &[Entry]) -> Result<RunConfig, ConfigError> {
    let r = Reader { entries };
    let length = |r: &Reader, key: &str| r.quantity(key, Quantity::Length);

    let k: u32 = r.required("k", |r, key| r.integer(key))?;
    let l = r.required("l", length)?;
    let wa = r.required("wa", length)?;
    let v = r.required("v", |r, key| r.quantity(key, Quantity::Speed))?;
    WarehouseConfig::new(k, l, wa, v).map_err(|e| {
        let key = match &e {
            pickmoments::Error::Domain { name, .. } => match *name {
                "w_a" => "wa",
                n => n,
            },
            _ => "k",
        };
        r.err(key, e.to_string())
    })?;

    let dist = r.required("dist", |r, key| {
        r.raw(key)
            .parse::<OrderSizeDistribution>()
            .map_err(|e| r.err(key, e.to_string()))
    })?;
    let pick_mean = r.optional("pick_mean", |r, key| r.quantity(key, Quantity::Time))?.unwrap_or(0.0);
    let pick_scv = r
        .optional("pick_scv", |r, key| {
            let raw = r.raw(key);
            raw.parse::<f64>().map_err(|_| r.err(key, format!("`{raw}` is not a number")))
        })?
        .unwrap_or(0.0);
    PickTimeModel::from_scv(pick_mean, pick_scv).map_err(|e| {
        let key = if pick_mean < 0.0 || !pick_mean.is_finite() { "pick_mean" } else { "pick_scv" };
        r.err(key, e.to_string())
    })?;

    let heuristics = r
        .optional("heuristics", |r, key| {
            let raw = r.raw(key);
            if raw.eq_ignore_ascii_case("all") {
                return Ok(Heuristic::ALL.to_vec());
            }
            let mut hs = Vec::new();
            for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let h: Heuristic = part.parse().map_err(|e: pickmoments::Error| r.err(key, e.to_string()))?;
                if !hs.contains(&h) {
                    hs.push(h);
                }
            }
            if hs.is_empty() {
                return Err(r.err(key, "no heuristic given"));
            }
            Ok(hs)
        })?
        .unwrap_or_else(|| Heuristic::ALL.to_vec());

    let scenario = match (r.find("pickers"), r.find("lambda")) {
        (None, None) => None,
        (Some(_), None) => return Err(r.err("lambda", "`pickers` needs an arrival rate")),
        (None, Some(_)) => return Err(r.err("pickers", "`lambda` needs a number of pickers")),
        (Some(_), Some(_)) => {
            let pickers: u32 = r.integer("pickers")?;
            let lambda_per_hour = r.quantity("lambda", Quantity::Rate)?;
            QueueScenario::per_hour(pickers, lambda_per_hour).map_err(|e| {
                r.err(if pickers == 0 { "pickers" } else { "lambda" }, e.to_string())
            })?;
            Some(Scenario { pickers, lambda_per_hour })
        }
    };

    let mc = match r.find("samples") {
        None if r.find("seed").is_some() => return Err(r.err("samples", "`seed` needs a sample size")),
        None => None,
        Some(_) => {
            let samples: u64 = r.integer("samples")?;
            if samples < 2 {
                return Err(r.err("samples", "at least two samples are needed"));
            }
            let seed = r.optional("seed", |r, key| r.integer(key))?.unwrap_or(0);
            Some(MonteCarlo { samples, seed })
        }
    };

    let layout_keys = ["total_length", "k_min", "k_max"];
    let present: Vec<&str> = layout_keys.iter().copied().filter(|k| r.find(k).is_some()).collect();
    let layout = match present.len() {
        0 => None,
        3 => {
            let total_length = length(&r, "total_length")?;
            if total_length <= 0.0 {
                return Err(r.err("total_length", "total aisle length must be positive"));
            }
            let k_min: u32 = r.integer("k_min")?;
            let k_max: u32 = r.integer("k_max")?;
            if k_min == 0 || k_min > pickmoments::prelim::MAX_AISLES {
                return Err(r.err("k_min", format!("must lie in 1..={}", pickmoments::prelim::MAX_AISLES)));
            }
            if k_max < k_min || k_max > pickmoments::prelim::MAX_AISLES {
                return Err(r.err("k_max", format!("must lie in k_min..={}", pickmoments::prelim::MAX_AISLES)));
            }
            Some(LayoutSpec { total_length, k_min, k_max })
        }
        _ => {
            let missing = layout_keys.iter().find(|k| r.find(k).is_none()).expect("some key missing");
            return Err(r.err(missing, "layout sweeps need total_length, k_min and k_max"));
        }
    };

    let out = r.optional("out", |r, key| Ok(PathBuf::from(r.raw(key))))?;
    let allow_na = r
        .optional("na", |r, key| match r.raw(key).to_ascii_lowercase().as_str() {
            "allow" => Ok(true),
            "error" => Ok(false),
            other => Err(r.err(key, format!("`{other}` is neither `allow` nor `error`"))),
        })?
        .unwrap_or(true);

    Ok(RunConfig {
        k,
        l,
        wa,
        v,
        dist,
        pick_mean,
        pick_scv,
        heuristics,
        scenario,
        mc,
        layout,
        out,
        allow_na,
    })
}

/// Configuration text that parses back to `cfg`.
pub fn render(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let mut line = |k: &str, v: String| {
        s.push_str(k);
        s.push_str(" = ");
        s.push_str(&v);
        s.push('\n');
    };
    line("k", cfg.k.to_string());
    line("l", format!("{} m", cfg.l));
    line("wa", format!("{} m", cfg.wa));
    line("v", format!("{} m/s", cfg.v));
    line("dist", cfg.dist.to_string());
    line("pick_mean", format!("{} s", cfg.pick_mean));
    line("pick_scv", cfg.pick_scv.to_string());
    let hs: Vec<&str> = cfg.heuristics.iter().map(|h| h.name()).collect();
    line("heuristics", hs.join(", "));
    if let Some(sc) = cfg.scenario {
        line("pickers", sc.pickers.to_string());
        line("lambda", format!("{} /h", sc.lambda_per_hour));
    }
    if let Some(mc) = cfg.mc {
        line("samples", mc.samples.to_string());
        line("seed", mc.seed.to_string());
    }
    if let Some(ly) = cfg.layout {
        line("total_length", format!("{} m", ly.total_length));
        line("k_min", ly.k_min.to_string());
        line("k_max", ly.k_max.to_string());
    }
    if let Some(out) = &cfg.out {
        line("out", out.display().to_string());
    }
    line("na", if cfg.allow_na { "allow" } else { "error" }.to_string());
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "k = 5\nl = 20 m\nwa = 2.5 m\nv = 3 km/h\ndist = geom:32\n";

    #[test]
    fn baseline() {
        let c = parse_config(BASE).unwrap();
        assert_eq!(c.k, 5);
        assert_eq!(c.l, 20.0);
        assert_eq!(c.wa, 2.5);
        assert!((c.v - 0.8333333333333334).abs() < 1e-15);
        assert_eq!(c.dist.mean(), 32.0);
        assert_eq!(c.heuristics, Heuristic::ALL.to_vec());
        assert!(c.scenario.is_none() && c.mc.is_none() && c.layout.is_none());
    }

    #[test]
    fn units() {
        let c = parse_config("k=2\nl=2000cm\nwa = 2500 mm\nv = 50 m/min\ndist=det:3\npick_mean = 0.1 min\npickers = 3\nlambda = 1 /min").unwrap();
        assert_eq!(c.l, 20.0);
        assert_eq!(c.wa, 2.5);
        assert!((c.v - 50.0 / 60.0).abs() < 1e-15);
        assert!((c.pick_mean - 6.0).abs() < 1e-12);
        assert_eq!(c.scenario.unwrap().lambda_per_hour, 60.0);
        let e = parse_config(&BASE.replace("3 km/h", "3 mph")).unwrap_err();
        assert_eq!(e.key, "v");
        assert_eq!(e.origin, Some(Origin::Line(4)));
    }

    #[test]
    fn errors_name_the_key() {
        let e = parse_config(&BASE.replace("v = 3 km/h\n", "")).unwrap_err();
        assert_eq!(e.key, "v");
        assert!(e.to_string().contains("`v`"));
        let e = parse_config(&BASE.replace("geom:32", "geom:0.5")).unwrap_err();
        assert_eq!(e.key, "dist");
        let e = parse_config(&format!("{BASE}colour = red\n")).unwrap_err();
        assert_eq!(e.key, "colour");
        assert_eq!(e.origin, Some(Origin::Line(6)));
        let e = parse_config(&format!("{BASE}pickers = 3\n")).unwrap_err();
        assert_eq!(e.key, "lambda");
        let e = parse_config(&format!("{BASE}k_min = 3\n")).unwrap_err();
        assert_eq!(e.key, "total_length");
        let e = parse_config(&format!("{BASE}k = 6\n")).unwrap_err();
        assert!(e.message.contains("twice"));
        let e = parse_config(&BASE.replace("k = 5", "k = 0")).unwrap_err();
        assert_eq!(e.key, "k");
        let e = parse_config(&BASE.replace("wa = 2.5 m", "wa = -1 m")).unwrap_err();
        assert_eq!(e.key, "wa");
        let e = parse_config(&format!("{BASE}heuristics = return, zigzag\n")).unwrap_err();
        assert_eq!(e.key, "heuristics");
    }

    #[test]
    fn comments_and_overrides() {
        let mut entries = parse_entries(&format!("# header\n{BASE}pick_mean = 5 # seconds\n")).unwrap();
        apply_overrides(&mut entries, &[("k", "7".into()), ("seed", "3".into())]);
        let e = from_entries(&entries).unwrap_err();
        assert_eq!(e.key, "samples");
        assert_eq!(e.origin, None);
        apply_overrides(&mut entries, &[("samples", "100".into())]);
        let c = from_entries(&entries).unwrap();
        assert_eq!(c.k, 7);
        assert_eq!(c.pick_mean, 5.0);
        assert_eq!(c.mc, Some(MonteCarlo { samples: 100, seed: 3 }));
    }

    #[test]
    fn render_round_trips() {
        let text = format!(
            "{BASE}pick_mean = 5\npick_scv = 0.25\nheuristics = s-shaped, return\npickers = 5\nlambda = 51\nsamples = 1000\nseed = 9\ntotal_length = 100 m\nk_min = 2\nk_max = 24\nout = x.csv\nna = error\n"
        );
        let c = parse_config(&text).unwrap();
        assert_eq!(parse_config(&render(&c)).unwrap(), c);
    }
}
