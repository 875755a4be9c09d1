//! Command-line interface.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use fhg_core::agents::{make_driver, AgentKind};
use fhg_core::gaze::{gaze_to_cell, GazeTracker, HandSample};
use fhg_core::session::csv_export::{write_metrics_csv, write_summary_csv};
use fhg_core::session::{
    aggregate, derive_seed, replay_session, run_games, run_protocol, run_segment, GameRunner,
    LoggedEvent, Scenario, SessionLog,
};

use crate::config::ServiceConfig;

#[derive(Debug, Parser)]
#[command(name = "fhg", version, about = "Foveated haptic gaze simulator")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Session seed; per-game seeds are derived from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tracker calibration box in millimetres.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub calib_x_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub calib_x_max: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub calib_y_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub calib_y_max: Option<f64>,
    /// Arbitrary override, e.g. `--set game.avatar_speed=1.0`. Repeatable.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Serve live sessions over websocket.
    Play {
        #[arg(long)]
        bind: Option<String>,
        #[arg(long)]
        log_dir: Option<PathBuf>,
        #[arg(long, value_parser = parse_scenario)]
        scenario: Option<Scenario>,
        /// Do not stream scene projections.
        #[arg(long)]
        no_scene: bool,
    },
    /// Run scripted-agent sessions and write per-game metrics as CSV.
    Headless {
        #[arg(long)]
        agent: AgentKind,
        #[arg(long)]
        games: Option<u32>,
        #[arg(long, default_value_t = 1)]
        sessions: u32,
        /// Skip the intro and demo segments.
        #[arg(long)]
        games_only: bool,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-game-index summary CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Write each session log here.
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
    /// Re-simulate a session log and verify it reproduces exactly.
    Replay { log: PathBuf },
    /// Run the demo room with an agent and print its events.
    Demo {
        #[arg(long, default_value = "oracle")]
        agent: AgentKind,
    },
    /// Map `x y [z] [valid]` samples from stdin to `u v col row fresh`.
    Calibrate {
        /// Print tracker bounds covering the samples instead.
        #[arg(long)]
        bounds: bool,
    },
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    match s {
        "intro" => Ok(Scenario::Intro),
        "demo" => Ok(Scenario::Demo),
        "hallway" => Ok(Scenario::Hallway),
        _ => Err(format!("unknown scenario {s:?} (intro, demo, hallway)")),
    }
}

impl GlobalOpts {
    pub fn resolve(&self) -> anyhow::Result<ServiceConfig> {
        let mut cfg = ServiceConfig::load(self.config.as_deref(), std::env::vars())?;
        let mut sets = Vec::new();
        let flags = [
            ("session.session_seed", self.seed.map(|v| v.to_string())),
            ("tracker.x_min", self.calib_x_min.map(|v| format!("{v:?}"))),
            ("tracker.x_max", self.calib_x_max.map(|v| format!("{v:?}"))),
            ("tracker.y_min", self.calib_y_min.map(|v| format!("{v:?}"))),
            ("tracker.y_max", self.calib_y_max.map(|v| format!("{v:?}"))),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                sets.push(format!("{key}={v}"));
            }
        }
        sets.extend(self.overrides.iter().cloned());
        cfg.apply_overrides(&sets)?;
        Ok(cfg)
    }
}

pub fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut cfg = cli.global.resolve()?;
    match cli.command {
        Command::Play {
            bind,
            log_dir,
            scenario,
            no_scene,
        } => {
            if let Some(b) = bind {
                cfg.server.bind = b;
            }
            if log_dir.is_some() {
                cfg.server.log_dir = log_dir;
            }
            if let Some(s) = scenario {
                cfg.server.scenario = s;
            }
            cfg.server.send_scene &= !no_scene;
            play(cfg)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Headless {
            agent,
            games,
            sessions,
            games_only,
            out,
            summary,
            log_dir,
        } => {
            if let Some(g) = games {
                cfg.sim.session.games = g;
            }
            headless(
                &cfg,
                agent,
                sessions,
                games_only,
                out.as_deref(),
                summary.as_deref(),
                log_dir.as_deref(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { log } => replay(&log),
        Command::Demo { agent } => {
            demo(&cfg, agent)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Calibrate { bounds } => {
            calibrate(
                &cfg,
                !bounds,
                std::io::stdin().lock(),
                std::io::stdout().lock(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn play(cfg: ServiceConfig) -> anyhow::Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&cfg.server.bind)
            .await
            .with_context(|| format!("binding {}", cfg.server.bind))?;
        eprintln!("listening on ws://{}/ws", listener.local_addr()?);
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        crate::server::serve(listener, cfg, shutdown).await?;
        Ok(())
    })
}

fn headless(
    cfg: &ServiceConfig,
    agent: AgentKind,
    sessions: u32,
    games_only: bool,
    out: Option<&Path>,
    summary: Option<&Path>,
    log_dir: Option<&Path>,
) -> anyhow::Result<()> {
    let base = cfg.sim.session.session_seed;
    let mut logs = Vec::new();
    for k in 0..u64::from(sessions) {
        let mut sim = cfg.sim.clone();
        sim.session.session_seed = base.wrapping_add(k);
        let id = format!("{}-{}", agent.name(), sim.session.session_seed);
        let mut driver = make_driver(
            agent,
            &sim,
            derive_seed(sim.session.session_seed, u64::MAX - 1),
        );
        let log = if games_only {
            run_games(&sim, driver.as_mut(), &id, agent.name())?
        } else {
            run_protocol(&sim, driver.as_mut(), &id, agent.name())?
        };
        if let Some(dir) = log_dir {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{id}.jsonl"));
            log.write_to(BufWriter::new(File::create(&path)?))
                .with_context(|| format!("writing {}", path.display()))?;
        }
        logs.push(log);
    }
    match out {
        Some(p) => write_metrics_csv(&logs, BufWriter::new(File::create(p)?))?,
        None => write_metrics_csv(&logs, std::io::stdout().lock())?,
    }
    if let Some(p) = summary {
        write_summary_csv(&aggregate(&logs), BufWriter::new(File::create(p)?))?;
    }
    Ok(())
}

fn replay(path: &Path) -> anyhow::Result<ExitCode> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let log = match SessionLog::read_from(BufReader::new(file)) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("replay failed: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    let mismatches = match replay_session(&log) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("replay failed: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    if mismatches.is_empty() {
        println!("ok: {} segments reproduced", log.segments.len());
        Ok(ExitCode::SUCCESS)
    } else {
        for m in &mismatches {
            println!("mismatch: {m}");
        }
        Ok(ExitCode::FAILURE)
    }
}

fn demo(cfg: &ServiceConfig, agent: AgentKind) -> anyhow::Result<()> {
    let seed = derive_seed(cfg.sim.session.session_seed, 1);
    let mut runner = GameRunner::new(Scenario::Demo, &cfg.sim, seed, None)?;
    let mut driver = make_driver(agent, &cfg.sim, seed);
    let end = run_segment(&mut runner, driver.as_mut(), &cfg.sim);
    let mut out = std::io::stdout().lock();
    for e in runner.events() {
        serde_json::to_writer(&mut out, e)?;
        writeln!(out)?;
    }
    let shots = runner
        .events()
        .iter()
        .filter(|e| matches!(e, LoggedEvent::Game(g) if g.kind.is_shot_outcome()))
        .count();
    eprintln!(
        "demo ended at tick {} ({end:?}), {shots} shots",
        runner.tick()
    );
    Ok(())
}

fn parse_sample(line: &str, tick: u64) -> Option<HandSample> {
    let mut parts = line.split_whitespace();
    let x: f64 = parts.next()?.parse().ok()?;
    let y: f64 = parts.next()?.parse().ok()?;
    let z: f64 = parts.next().map_or(Some(0.0), |s| s.parse().ok())?;
    let valid = parts.next().map_or(Some(true), |s| match s {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    })?;
    let mut s = HandSample::new(x, y, z, false, tick);
    s.valid = valid;
    Some(s)
}

/// Tracker bounds from a recorded sweep, or the mapped gaze per sample.
pub fn calibrate<R: BufRead, W: Write>(
    cfg: &ServiceConfig,
    map: bool,
    input: R,
    mut out: W,
) -> anyhow::Result<()> {
    let mut tracker = GazeTracker::from_config(&cfg.sim.tracker)?;
    let (mut xs, mut ys) = (
        (f64::INFINITY, f64::NEG_INFINITY),
        (f64::INFINITY, f64::NEG_INFINITY),
    );
    let mut tick = 0;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let sample = parse_sample(trimmed, tick)
            .with_context(|| format!("line {}: expected `x y [z] [valid]`", i + 1))?;
        tick += 1;
        if map {
            let g = tracker.update(&sample);
            let (col, row) = gaze_to_cell(&g, cfg.sim.game.grid_cols, cfg.sim.game.grid_rows);
            writeln!(
                out,
                "{:.4} {:.4} {col} {row} {}",
                g.u,
                g.v,
                u8::from(g.fresh)
            )?;
        } else if sample.valid && sample.x.is_finite() && sample.y.is_finite() {
            xs = (xs.0.min(sample.x), xs.1.max(sample.x));
            ys = (ys.0.min(sample.y), ys.1.max(sample.y));
        }
    }
    if map {
        return Ok(());
    }
    anyhow::ensure!(
        xs.0 < xs.1 && ys.0 < ys.1,
        "need valid samples spanning both axes"
    );
    writeln!(out, "[tracker]")?;
    writeln!(
        out,
        "x_min = {:?}\nx_max = {:?}\ny_min = {:?}\ny_max = {:?}",
        xs.0, xs.1, ys.0, ys.1
    )?;
    writeln!(
        out,
        "smoothing_alpha = {:?}",
        cfg.sim.tracker.smoothing_alpha
    )?;
    Ok(())
}
