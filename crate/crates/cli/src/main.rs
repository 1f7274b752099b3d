//! `beliefsafe` — seeded opportunity/risk experiments.
//!
//! Exit codes: 0 success, 1 configuration error (bad flags, unreadable or
//! inconsistent inputs), 2 failure while running.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use beliefsafe::casestudies::{synth_movement_data, GridBounds, DEFAULT_ADJACENCY_BOOST};
use beliefsafe::harness::{
    emit_bound_curves, parse_lambda_grid, render, resolve_nfg, resolve_sbg, run_topology, run_tradeoff_nfg,
    run_tradeoff_sbg, thread_pool, Format, Meta, NfgTradeoffConfig, SbgSource, SbgTradeoffConfig,
};
use beliefsafe::sbg::PolicyKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "beliefsafe", version, about = "Safe, exploitative and blended strategies under type beliefs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Output file (written atomically).
    #[arg(long)]
    out: PathBuf,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Omit the timestamp so equal inputs give byte-identical files.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args, Clone)]
struct Sweep {
    /// start:stop:step or a comma list, within [0, 1].
    #[arg(long, default_value = "0:1:0.1")]
    lambda_grid: String,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 100)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// λ-sweep on a normal-form game: exact and sampled opportunity/risk.
    TradeoffNfg {
        /// mp, amp or a game JSON file.
        #[arg(long)]
        game: String,
        /// full, pennies or a JSON list of distributions.
        #[arg(long)]
        theta: Option<String>,
        #[command(flatten)]
        sweep: Sweep,
        #[command(flatten)]
        out: Output,
    },
    /// λ-sweep on a stochastic game against every type in its type set.
    TradeoffSbg {
        /// pennies, amp-pennies or a game JSON file.
        #[arg(long)]
        game: String,
        /// Type-set JSON (game files only).
        #[arg(long)]
        theta: Option<PathBuf>,
        #[arg(long, default_value_t = 0.9)]
        gamma: f64,
        #[command(flatten)]
        policy: PolicyArgs,
        #[command(flatten)]
        sweep: Sweep,
        #[command(flatten)]
        out: Output,
    },
    /// Green security game built from movement data (synthetic when --data is absent).
    SecurityGame {
        /// timestamp,animal_id,lat,lon CSV.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_ADJACENCY_BOOST)]
        adjacency_boost: f64,
        #[arg(long, default_value_t = 0.9)]
        gamma: f64,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[command(flatten)]
        policy: PolicyArgs,
        #[command(flatten)]
        sweep: Sweep,
        #[command(flatten)]
        out: Output,
    },
    /// Stochastic-game bound envelopes over a (γ, λ) grid.
    Bounds {
        /// One or more discount factors, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        gamma: Vec<f64>,
        #[arg(long)]
        r_max: f64,
        #[arg(long)]
        nu: f64,
        #[arg(long, default_value = "0:1:0.1")]
        lambda_grid: String,
        #[command(flatten)]
        out: Output,
    },
    /// λ-sweep over all strictly ordinal 2×2 game classes.
    Topology {
        #[arg(long, default_value = "0:1:0.1")]
        lambda_grid: String,
        #[command(flatten)]
        out: Output,
    },
    /// Writes synthetic animal tracks in the ingest format.
    SynthData {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        animals: usize,
        #[arg(long, default_value_t = 8)]
        years: usize,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
struct PolicyArgs {
    /// safe-exploit or blend.
    #[arg(long, default_value = "safe-exploit")]
    policy: PolicyKind,
    /// Believed type (default: first stationary type).
    #[arg(long)]
    belief: Option<String>,
}

#[derive(Args, Clone)]
struct BoundsArgs {
    #[arg(long, default_value_t = GridBounds::default().lat_min, allow_negative_numbers = true)]
    lat_min: f64,
    #[arg(long, default_value_t = GridBounds::default().lat_max, allow_negative_numbers = true)]
    lat_max: f64,
    #[arg(long, default_value_t = GridBounds::default().lon_min, allow_negative_numbers = true)]
    lon_min: f64,
    #[arg(long, default_value_t = GridBounds::default().lon_max, allow_negative_numbers = true)]
    lon_max: f64,
}

impl BoundsArgs {
    fn bounds(&self) -> GridBounds {
        GridBounds { lat_min: self.lat_min, lat_max: self.lat_max, lon_min: self.lon_min, lon_max: self.lon_max }
    }
}

/// Failure with the exit code it maps to.
enum Failure {
    Config(String),
    Runtime(String),
}

fn config<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

/// Writes next to the target, then renames over it.
fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Failure::Config(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, text).map_err(runtime)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        runtime(e)
    })
}

fn emit<T: Serialize>(rows: &[T], mut meta: Meta, out: &Output) -> Result<usize, Failure> {
    meta.insert("git", env!("BELIEFSAFE_GIT_DESCRIBE"));
    let text = render(rows, &meta, out.format).map_err(runtime)?;
    write_atomic(&out.out, &text)?;
    Ok(rows.len())
}

fn meta(command: &str, seed: Option<u64>, cfg: &impl Serialize, out: &Output) -> Result<Meta, Failure> {
    Meta::new(command, seed, cfg, out.deterministic).map_err(runtime)
}

fn sbg_config(sweep: &Sweep, policy: &PolicyArgs) -> Result<SbgTradeoffConfig, Failure> {
    Ok(SbgTradeoffConfig {
        lambda_grid: parse_lambda_grid(&sweep.lambda_grid).map_err(config)?,
        runs: sweep.runs,
        horizon: sweep.horizon,
        seed: sweep.seed,
        policy: policy.policy,
        belief: policy.belief.clone(),
    })
}

fn check_counts(sweep: &Sweep) -> Result<(), Failure> {
    if sweep.runs == 0 || sweep.horizon == 0 {
        return Err(Failure::Config("--runs and --horizon must be at least 1".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct SbgEcho<'a> {
    source: &'a SbgSource,
    gamma: f64,
    #[serde(flatten)]
    run: &'a SbgTradeoffConfig,
}

fn run_sbg(name: &str, source: SbgSource, gamma: f64, sweep: &Sweep, policy: &PolicyArgs, out: &Output) -> Result<(usize, PathBuf), Failure> {
    check_counts(sweep)?;
    let cfg = sbg_config(sweep, policy)?;
    let setup = resolve_sbg(&source, gamma, sweep.seed).map_err(config)?;
    if let Some(b) = &cfg.belief {
        setup.model.kernel().index_of(b).map_err(config)?;
    }
    let rows = run_tradeoff_sbg(&setup, &cfg).map_err(runtime)?;
    let echo = SbgEcho { source: &source, gamma, run: &cfg };
    let n = emit(&rows, meta(name, Some(sweep.seed), &echo, out)?, out)?;
    Ok((n, out.out.clone()))
}

fn run(cli: Cli) -> Result<(usize, PathBuf), Failure> {
    match cli.command {
        Command::TradeoffNfg { game, theta, sweep, out } => {
            check_counts(&sweep)?;
            let cfg = NfgTradeoffConfig {
                lambda_grid: parse_lambda_grid(&sweep.lambda_grid).map_err(config)?,
                runs: sweep.runs,
                horizon: sweep.horizon,
                seed: sweep.seed,
            };
            let (matrix, theta_set) = resolve_nfg(&game, theta.as_deref()).map_err(config)?;
            let rows = run_tradeoff_nfg(&matrix, &theta_set, &cfg).map_err(runtime)?;
            let mut m = meta("tradeoff-nfg", Some(cfg.seed), &cfg, &out)?;
            m.insert("game", game);
            m.insert("theta", theta.unwrap_or_else(|| "default".into()));
            Ok((emit(&rows, m, &out)?, out.out))
        }
        Command::TradeoffSbg { game, theta, gamma, policy, sweep, out } => {
            let source = match game.as_str() {
                "pennies" | "amp-pennies" => {
                    if theta.is_some() {
                        return Err(Failure::Config("--theta applies to game files only".into()));
                    }
                    SbgSource::Pennies { adjusted: game == "amp-pennies" }
                }
                path => SbgSource::File { path: PathBuf::from(path), type_set: theta },
            };
            run_sbg("tradeoff-sbg", source, gamma, &sweep, &policy, &out)
        }
        Command::SecurityGame { data, adjacency_boost, gamma, bounds, policy, sweep, out } => {
            let source = SbgSource::Security { data, bounds: bounds.bounds(), adjacency_boost };
            run_sbg("security-game", source, gamma, &sweep, &policy, &out)
        }
        Command::Bounds { gamma, r_max, nu, lambda_grid, out } => {
            let grid = parse_lambda_grid(&lambda_grid).map_err(config)?;
            let rows = emit_bound_curves(&gamma, r_max, nu, &grid).map_err(config)?;
            #[derive(Serialize)]
            struct Echo<'a> {
                gamma: &'a [f64],
                r_max: f64,
                nu: f64,
                lambda_grid: &'a [f64],
            }
            let echo = Echo { gamma: &gamma, r_max, nu, lambda_grid: &grid };
            Ok((emit(&rows, meta("bounds", None, &echo, &out)?, &out)?, out.out))
        }
        Command::Topology { lambda_grid, out } => {
            let grid = parse_lambda_grid(&lambda_grid).map_err(config)?;
            let rows = run_topology(&grid).map_err(runtime)?;
            Ok((emit(&rows, meta("topology", None, &grid, &out)?, &out)?, out.out))
        }
        Command::SynthData { seed, animals, years, bounds, out } => {
            if animals == 0 || years == 0 {
                return Err(Failure::Config("--animals and --years must be at least 1".into()));
            }
            let text = synth_movement_data(seed, animals, years, bounds.bounds()).map_err(config)?;
            write_atomic(&out, &text)?;
            Ok((text.lines().count() - 1, out))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli)) {
        Ok((rows, path)) => {
            println!("wrote {rows} rows to {}", path.display());
            ExitCode::SUCCESS
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
