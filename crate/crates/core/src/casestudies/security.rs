//! Green security game on a 3×3 grid over seasonal elephant counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use chrono::{Datelike, NaiveDate, NaiveDateTime};
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::rng::stream;
use crate::sbg::StochasticGame;
use crate::{Error, Result};

pub const GRID_ROWS: usize = 3;
pub const GRID_COLS: usize = 3;
pub const CELLS: usize = GRID_ROWS * GRID_COLS;
pub const SEASON_STATES: usize = 16;
/// Fixed reward of an attacker caught in the defended cell.
pub const ATTACKER_CAUGHT: f64 = -2.0;
pub const DEFAULT_ADJACENCY_BOOST: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridBounds {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl Default for GridBounds {
    fn default() -> Self {
        Self { lat_min: -3.0, lat_max: -2.0, lon_min: 37.0, lon_max: 38.0 }
    }
}

impl GridBounds {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lat_min < self.lat_max
            && self.lon_min < self.lon_max
            && (-90.0..=90.0).contains(&self.lat_min)
            && (-90.0..=90.0).contains(&self.lat_max)
            && (-180.0..=180.0).contains(&self.lon_min)
            && (-180.0..=180.0).contains(&self.lon_max);
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("bad grid bounds {self:?}")))
        }
    }

    /// Row from latitude, column from longitude; `[lo, hi)` per cell with
    /// the last cell closed. `None` outside the bounds.
    pub fn cell(&self, lat: f64, lon: f64) -> Option<usize> {
        let bucket = |v: f64, lo: f64, hi: f64, n: usize| {
            if !(lo..=hi).contains(&v) {
                return None;
            }
            Some((((v - lo) / (hi - lo) * n as f64) as usize).min(n - 1))
        };
        let r = bucket(lat, self.lat_min, self.lat_max, GRID_ROWS)?;
        let c = bucket(lon, self.lon_min, self.lon_max, GRID_COLS)?;
        Some(r * GRID_COLS + c)
    }
}

/// Rainy seasons run October of `year` through March of `year + 1`; dry
/// seasons April–September. Orders chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Season {
    pub year: i32,
    pub rainy: bool,
}

impl Season {
    pub fn of(date: NaiveDate) -> Self {
        match date.month() {
            1..=3 => Self { year: date.year() - 1, rainy: true },
            4..=9 => Self { year: date.year(), rainy: false },
            _ => Self { year: date.year(), rainy: true },
        }
    }
}

impl std::fmt::Display for Season {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.year, if self.rainy { "rainy" } else { "dry" })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovementRecord {
    pub timestamp: NaiveDateTime,
    pub animal_id: String,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridWorld {
    pub bounds: GridBounds,
    pub seasons: Vec<Season>,
    /// Animals per cell, per season-state.
    pub counts: Vec<[u32; CELLS]>,
}

impl GridWorld {
    pub fn new(bounds: GridBounds, seasons: Vec<Season>, counts: Vec<[u32; CELLS]>) -> Result<Self> {
        bounds.validate()?;
        if seasons.len() != SEASON_STATES || counts.len() != SEASON_STATES {
            return Err(Error::Invalid(format!("a grid world has exactly {SEASON_STATES} season-states")));
        }
        Ok(Self { bounds, seasons, counts })
    }

    pub fn max_count(&self) -> u32 {
        self.counts.iter().flat_map(|c| c.iter().copied()).max().unwrap_or(0)
    }

    pub fn counts_f64(&self) -> Vec<Vec<f64>> {
        self.counts.iter().map(|c| c.iter().map(|&v| f64::from(v)).collect()).collect()
    }
}

/// A row that was skipped or a mean that fell outside the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestWarning {
    pub line: Option<u64>,
    pub message: String,
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    const FORMATS: [&str; 4] = ["%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M"];
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .or_else(|| chrono::DateTime::parse_from_rfc3339(s).ok().map(|d| d.naive_utc()))
        .or_else(|| NaiveDate::parse_from_str(s, "%Y-%m-%d").ok().and_then(|d| d.and_hms_opt(0, 0, 0)))
}

fn parse_record(row: &csv::StringRecord) -> std::result::Result<MovementRecord, String> {
    if row.len() != 4 {
        return Err(format!("expected 4 fields, found {}", row.len()));
    }
    let timestamp = parse_timestamp(&row[0]).ok_or_else(|| format!("bad timestamp `{}`", &row[0]))?;
    let animal_id = row[1].trim().to_string();
    if animal_id.is_empty() {
        return Err("empty animal id".into());
    }
    let num = |s: &str, name: &str| s.trim().parse::<f64>().map_err(|_| format!("bad {name} `{s}`"));
    let (lat, lon) = (num(&row[2], "lat")?, num(&row[3], "lon")?);
    if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
        return Err(format!("coordinates ({lat}, {lon}) out of range"));
    }
    Ok(MovementRecord { timestamp, animal_id, lat, lon })
}

/// Reads `timestamp,animal_id,lat,lon` records (header required), averages
/// each animal's position per season and counts the means per grid cell for
/// the first 16 seasons.
pub fn ingest_movement_csv(path: &Path, bounds: GridBounds) -> Result<(GridWorld, Vec<IngestWarning>)> {
    ingest_movement(std::fs::File::open(path)?, bounds)
}

/// [`ingest_movement_csv`] over any reader.
pub fn ingest_movement<R: std::io::Read>(input: R, bounds: GridBounds) -> Result<(GridWorld, Vec<IngestWarning>)> {
    bounds.validate()?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_ascii_lowercase()).collect();
    if header != ["timestamp", "animal_id", "lat", "lon"] {
        return Err(Error::Ingest(format!("expected header timestamp,animal_id,lat,lon, found {}", header.join(","))));
    }
    let mut warnings = Vec::new();
    // season → animal → positions
    let mut groups: BTreeMap<Season, BTreeMap<String, Vec<(f64, f64)>>> = BTreeMap::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line());
        match parse_record(&row) {
            Ok(r) => groups
                .entry(Season::of(r.timestamp.date()))
                .or_default()
                .entry(r.animal_id)
                .or_default()
                .push((r.lat, r.lon)),
            Err(message) => {
                log::warn!("line {line:?}: {message}; row skipped");
                warnings.push(IngestWarning { line, message });
            }
        }
    }
    if groups.len() < SEASON_STATES {
        let found: Vec<String> = groups.keys().map(Season::to_string).collect();
        return Err(Error::Ingest(format!(
            "need {SEASON_STATES} seasons, found {}: [{}]",
            groups.len(),
            found.join(", ")
        )));
    }
    let mut seasons = Vec::with_capacity(SEASON_STATES);
    let mut counts = Vec::with_capacity(SEASON_STATES);
    for (season, animals) in groups.into_iter().take(SEASON_STATES) {
        let mut cells = [0u32; CELLS];
        for (animal, mut pts) in animals {
            // Sorted sums keep the mean independent of row order.
            pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let n = pts.len() as f64;
            let lat = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let lon = pts.iter().map(|p| p.1).sum::<f64>() / n;
            match bounds.cell(lat, lon) {
                Some(c) => cells[c] += 1,
                None => {
                    let message = format!("{animal} in {season}: mean ({lat:.5}, {lon:.5}) outside the grid");
                    log::warn!("{message}");
                    warnings.push(IngestWarning { line: None, message });
                }
            }
        }
        seasons.push(season);
        counts.push(cells);
    }
    Ok((GridWorld::new(bounds, seasons, counts)?, warnings))
}

/// Defender (agent) and attacker views of the same stochastic game; both
/// are indexed `[state][defender cell][attacker cell]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityGame {
    pub defender: StochasticGame,
    pub attacker: StochasticGame,
    pub world: GridWorld,
}

/// Action-independent season transitions: zero mass on same-kind seasons,
/// uniform over the opposite kind, plus `boost` on the chronological
/// neighbours, renormalized.
pub fn season_transitions(seasons: &[Season], boost: f64) -> Result<Vec<Vec<f64>>> {
    if !(boost >= 0.0 && boost.is_finite()) {
        return Err(Error::Invalid(format!("adjacency boost {boost} must be ≥ 0")));
    }
    let n = seasons.len();
    (0..n)
        .map(|s| {
            let opposite: Vec<usize> = (0..n).filter(|&t| seasons[t].rainy != seasons[s].rainy).collect();
            if opposite.is_empty() {
                return Err(Error::Invalid(format!("no season of the other kind to leave {} for", seasons[s])));
            }
            let mut row = vec![0.0; n];
            for &t in &opposite {
                row[t] = 1.0 / opposite.len() as f64;
                if t + 1 == s || s + 1 == t {
                    row[t] += boost;
                }
            }
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= total);
            assert!(row.iter().all(|&p| p >= 0.0), "negative transition probability");
            Ok(row)
        })
        .collect()
}

pub fn build_green_security_game(world: &GridWorld, adjacency_boost: f64, gamma: f64) -> Result<SecurityGame> {
    let rows = season_transitions(&world.seasons, adjacency_boost)?;
    let n = world.seasons.len();
    let mut def = Vec::with_capacity(n * CELLS * CELLS);
    let mut att = Vec::with_capacity(n * CELLS * CELLS);
    let mut transition = Vec::with_capacity(n * CELLS * CELLS * n);
    for (s, counts) in world.counts.iter().enumerate() {
        for d in 0..CELLS {
            for a in 0..CELLS {
                if d == a {
                    def.push(f64::from(counts[d]));
                    att.push(ATTACKER_CAUGHT);
                } else {
                    def.push(-f64::from(counts[a]));
                    att.push(f64::from(counts[a]));
                }
                transition.extend_from_slice(&rows[s]);
            }
        }
    }
    let r_max = f64::from(world.max_count());
    // A world without animals still needs a positive reward scale.
    let defender_scale = if r_max > 0.0 { Some(r_max) } else { None };
    let defender = StochasticGame::from_flat(n, CELLS, CELLS, def, transition.clone(), gamma, defender_scale)?;
    let attacker = StochasticGame::from_flat(n, CELLS, CELLS, att, transition, gamma, Some(r_max.max(2.0)))?;
    Ok(SecurityGame { defender, attacker, world: world.clone() })
}

/// Seasonal random-walk tracks: every animal reports monthly in every one
/// of `2 · n_years` seasons starting April 2010, drifting around a
/// season-dependent home cell. Output is CSV text, identical per seed.
pub fn synth_movement_data(seed: u64, n_animals: usize, n_years: usize, bounds: GridBounds) -> Result<String> {
    bounds.validate()?;
    let (dlat, dlon) = (bounds.lat_max - bounds.lat_min, bounds.lon_max - bounds.lon_min);
    let step = Normal::new(0.0, 0.03).expect("positive sd");
    let mut out = String::from("timestamp,animal_id,lat,lon\n");
    for animal in 0..n_animals {
        let mut rng = stream(seed, &[animal as u64]);
        // Dry-season home in the southern half, rainy-season home in the north.
        let home = |rng: &mut crate::rng::Rng, rainy: bool| {
            let band = if rainy { 0.55..0.95 } else { 0.05..0.45 };
            (bounds.lat_min + dlat * rng.random_range(band), bounds.lon_min + dlon * rng.random_range(0.05..0.95))
        };
        let (dry_home, wet_home) = (home(&mut rng, false), home(&mut rng, true));
        let id = format!("E{:02}", animal + 1);
        for year in 0..n_years as i32 {
            for (rainy, months) in [(false, [4, 5, 6, 7, 8, 9]), (true, [10, 11, 12, 13, 14, 15])] {
                let (mut lat, mut lon) = if rainy { wet_home } else { dry_home };
                for m in months {
                    let (y, month) = (2010 + year + (m - 1) / 12, (m - 1) % 12 + 1);
                    lat = (lat + step.sample(&mut rng) * dlat).clamp(bounds.lat_min, bounds.lat_max);
                    lon = (lon + step.sample(&mut rng) * dlon).clamp(bounds.lon_min, bounds.lon_max);
                    writeln!(out, "{y:04}-{month:02}-15 12:00:00,{id},{lat:.6},{lon:.6}").expect("string write");
                }
            }
        }
    }
    Ok(out)
}
