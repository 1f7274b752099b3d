//! Seeded experiment runners and their CSV/JSON output.
//!
//! Every runner returns plain rows; [`render`] turns rows plus a metadata
//! block into CSV (with `# meta:` comment lines) or JSON. Random draws come
//! from streams derived from `(seed, cell index)`, so results do not depend
//! on thread count or scheduling.

mod curves;
mod nfg;
mod sbg;
mod topology;

pub use curves::{emit_bound_curves, BoundRow};
pub use nfg::{resolve_nfg, run_tradeoff_nfg, NfgTradeoffConfig, NfgTradeoffRow};
pub use sbg::{
    resolve_sbg, run_tradeoff_sbg, SbgSetup, SbgSource, SbgTradeoffConfig, SbgTradeoffRow,
};
pub use topology::{run_topology, TopologyRow};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::{Error, Result};

/// z for a two-sided 95% normal interval.
pub const Z95: f64 = 1.959_963_984_540_054;
/// Empirical means further than this many standard errors from the exact
/// value are flagged.
pub const CONSISTENCY_SE: f64 = 4.0;

/// `a:b:step` (inclusive of `b` up to round-off) or a comma list.
pub fn parse_lambda_grid(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| {
        s.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad number `{s}` in grid `{text}`")))
    };
    let grid: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Invalid(format!("grid `{text}` is not start:stop:step")));
        }
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || b < a {
            return Err(Error::Invalid(format!("grid `{text}` needs step > 0 and stop ≥ start")));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        // Rounded to 12 decimals so 0.1 steps print as 0.3, not 0.30000000000000004.
        (0..=n).map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12).map(|x| if (x - b).abs() < 1e-9 { b } else { x }).collect()
    } else {
        text.split(',').map(num).collect::<Result<_>>()?
    };
    validate_lambdas(&grid)?;
    Ok(grid)
}

pub(crate) fn validate_lambdas(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Invalid("empty lambda grid".into()));
    }
    if let Some(l) = grid.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::Invalid(format!("lambda {l} outside [0, 1]")));
    }
    Ok(())
}

/// Mean, sample standard deviation and 95% half-width of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub ci: f64,
}

pub fn summarize(samples: &[f64]) -> Summary {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = if samples.len() > 1 {
        (samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Summary { mean, sd, ci: Z95 * sd / n.sqrt() }
}

/// Whether `exact` lies within [`CONSISTENCY_SE`] standard errors (plus
/// `slack`) of the empirical mean.
pub fn consistent(s: &Summary, n: usize, exact: f64, slack: f64) -> bool {
    (s.mean - exact).abs() <= CONSISTENCY_SE * s.sd / (n as f64).sqrt() + slack + 1e-12
}

/// Thread pool honoring `BELIEFSAFE_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("BELIEFSAFE_THREADS") {
        let n: usize = v.parse().map_err(|_| Error::Invalid(format!("BELIEFSAFE_THREADS=`{v}` is not a count")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Invalid(format!("thread pool: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Invalid(format!("unknown format `{other}`"))),
        }
    }
}

/// Key/value pairs written ahead of the rows.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Meta(pub BTreeMap<String, String>);

impl Meta {
    /// Tool version, seed, the config as JSON and (unless `deterministic`)
    /// the wall-clock time.
    pub fn new(command: &str, seed: Option<u64>, config: &impl Serialize, deterministic: bool) -> Result<Self> {
        let mut m = BTreeMap::new();
        m.insert("command".into(), command.into());
        m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        if let Some(seed) = seed {
            m.insert("seed".into(), seed.to_string());
        }
        m.insert("config".into(), serde_json::to_string(config)?);
        if !deterministic {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_err(|e| Error::Invalid(e.to_string()))?;
            let stamp = chrono::DateTime::from_timestamp(now.as_secs() as i64, 0)
                .map(|t| t.to_rfc3339())
                .unwrap_or_default();
            m.insert("timestamp".into(), stamp);
        }
        Ok(Self(m))
    }

    pub fn insert(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(key.into(), value.into());
    }
}

/// CSV with `# meta: key=value` lines ahead of the header, or a JSON
/// object `{ "meta": {...}, "rows": [...] }`.
pub fn render<T: Serialize>(rows: &[T], meta: &Meta, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let doc = serde_json::json!({ "meta": meta.0, "rows": rows });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        Format::Csv => {
            let mut out = String::new();
            for (k, v) in &meta.0 {
                out.push_str(&format!("# meta: {k}={}\n", v.replace('\n', " ")));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r)?;
            }
            let body = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
            out.push_str(&String::from_utf8(body).map_err(|e| Error::Invalid(e.to_string()))?);
            Ok(out)
        }
    }
}
