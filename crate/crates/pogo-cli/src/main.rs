//! `pogo`: experiment driver for the jump co-design toolkit. Simulate single
//! designs, tune the jump command's pause, sweep the design box, train the
//! learner across seeds, and compare the two.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use pogo_core::sim::EventKind;
use pogo_core::sweep::DesignGrid;
use pogo_core::simulate;

mod artifacts;
mod config;
mod plot;
mod report;
mod runner;

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "pogo", version)]
#[command(about = "Co-design toolkit for a flexible vertical jumper")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one design under the configured jump command.
    Simulate {
        /// Experiment configuration (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Where trajectory.csv and events.csv go.
        #[arg(long)]
        out_dir: PathBuf,
        /// Spring constant; defaults to the configured space's nominal.
        #[arg(long)]
        alpha: Option<f64>,
        /// Damping ratio; defaults to the configured space's nominal.
        #[arg(long)]
        zeta: Option<f64>,
    },
    /// Scan the inter-stroke pause and report the apex-maximizing value.
    TuneCommand {
        #[arg(long)]
        config: PathBuf,
        /// Where tuning.csv goes.
        #[arg(long)]
        out_dir: PathBuf,
        /// Smallest pause to try [s].
        #[arg(long, default_value_t = 0.0)]
        min: f64,
        /// Largest pause to try [s].
        #[arg(long, default_value_t = 0.15)]
        max: f64,
        /// Pause grid spacing [s].
        #[arg(long, default_value_t = 0.005)]
        step: f64,
    },
    /// Brute-force the design box and write the apex surface.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Where surface.csv goes.
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 60)]
        n_alpha: usize,
        #[arg(long, default_value_t = 60)]
        n_zeta: usize,
        /// Worker threads; defaults to the config's `workers`.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Train the learner on every configured seed.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Where per-seed logs, policies, and final designs go.
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Override the configured episode count.
        #[arg(long)]
        episodes: Option<usize>,
    },
    /// Compare a training run against a swept surface.
    Report {
        /// Directory produced by `pogo train`.
        #[arg(long)]
        train_dir: PathBuf,
        /// surface.csv produced by `pogo sweep`.
        #[arg(long)]
        surface: PathBuf,
        /// Where the report goes (default: report.txt beside the run).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Score the run against this apex target [m].
        #[arg(long)]
        target_height: Option<f64>,
    },
    /// Draw overlaid learning curves for one or more training runs.
    Plot {
        /// Training run directories.
        #[arg(long, value_delimiter = ',', required = true)]
        run_dirs: Vec<PathBuf>,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate { config, out_dir, alpha, zeta } => {
            let config = ExperimentConfig::load(&config)?;
            let base = config.base_params();
            let params = base.with_design(
                alpha.unwrap_or(base.alpha),
                zeta.unwrap_or(base.zeta),
            );
            let command = config.jump_command()?;
            let traj = simulate(&params, &command, &config.sim)?;
            std::fs::create_dir_all(&out_dir)?;
            artifacts::write_trajectory(&out_dir.join("trajectory.csv"), &traj)?;
            artifacts::write_events(&out_dir.join("events.csv"), &traj)?;
            let liftoffs =
                traj.events.iter().filter(|e| e.kind == EventKind::Liftoff).count();
            println!(
                "alpha={:.6e} zeta={:.6e} apex={:.6e} events={} liftoffs={}",
                params.alpha,
                params.zeta,
                traj.apex_height()?,
                traj.events.len(),
                liftoffs,
            );
        }

        Command::TuneCommand { config, out_dir, min, max, step } => {
            let config = ExperimentConfig::load(&config)?;
            anyhow::ensure!(step > 0.0 && max >= min && min >= 0.0, "bad pause grid");
            let mut delays = Vec::new();
            let mut d = min;
            while d <= max + 1e-12 {
                delays.push(d);
                d += step;
            }
            let params = config.base_params();
            let scan = pogo_core::command::scan_delays(&params, &config.sim, &delays)?;
            std::fs::create_dir_all(&out_dir)?;
            artifacts::write_tuning(&out_dir.join("tuning.csv"), &scan)?;
            let best = pogo_core::command::best_delay(&scan);
            println!(
                "best delta_t={:.6} apex={:.6e} (over {} candidates)",
                best.delta_t,
                best.apex,
                scan.len(),
            );
        }

        Command::Sweep { config, out_dir, n_alpha, n_zeta, workers } => {
            let config = ExperimentConfig::load(&config)?;
            let space = config.design_space();
            let grid = DesignGrid::covering(&space, n_alpha, n_zeta)?;
            let surface = runner::parallel_sweep(
                &grid,
                &config.base_params(),
                &config.jump_command()?,
                &config.sim,
                workers.unwrap_or(config.workers),
            )?;
            std::fs::create_dir_all(&out_dir)?;
            artifacts::write_surface(&out_dir.join("surface.csv"), &surface)?;
            let best = surface.argmax_design()?;
            println!(
                "swept {} cells, fingerprint {}; best alpha={:.6e} zeta={:.6e} apex={:.6e}",
                grid.len(),
                surface.fingerprint,
                best.alpha,
                best.zeta,
                best.height,
            );
        }

        Command::Train { config, out_dir, workers, episodes } => {
            let config = ExperimentConfig::load(&config)?;
            std::fs::create_dir_all(&out_dir)?;
            // Echo the effective config for provenance.
            std::fs::write(
                out_dir.join("config.toml"),
                toml::to_string_pretty(&config).context("re-encoding config")?,
            )?;
            let finals = runner::train_all_seeds(
                &config,
                &out_dir,
                workers.unwrap_or(config.workers),
                episodes.unwrap_or(config.episodes),
            )?;
            let mean_apex =
                finals.iter().map(|f| f.apex).sum::<f64>() / finals.len() as f64;
            println!(
                "trained {} of {} seeds; mean final apex {:.6e}",
                finals.len(),
                config.seeds.len(),
                mean_apex,
            );
        }

        Command::Report { train_dir, surface, out, target_height } => {
            let out = out.unwrap_or_else(|| train_dir.join("report.txt"));
            let comparison =
                report::write_report(&train_dir, &surface, &out, target_height)?;
            print!("{}", comparison.render());
        }

        Command::Plot { run_dirs, out } => {
            plot::plot_runs(&run_dirs, &out)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}
