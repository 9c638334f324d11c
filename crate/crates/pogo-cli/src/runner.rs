//! Multi-seed training and multi-row sweeps over a scoped worker pool.
//! Workers pull task indices from a shared counter; every artifact is written
//! in task order afterwards, so the on-disk output is identical no matter how
//! many workers ran or how they interleaved.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};

use pogo_core::command::JumpCommand;
use pogo_core::sweep::{fingerprint, sweep, DesignGrid, PerformanceSurface};
use pogo_core::td3::train_run;
use pogo_core::{DesignParams, SimConfig};

use crate::artifacts::{
    write_final_designs, write_manifest, write_seed_episodes, FinalDesign, ManifestEntry, SeedRow,
};
use crate::config::ExperimentConfig;

/// Everything one seed produces.
struct SeedDone {
    rows: Vec<SeedRow>,
    final_design: FinalDesign,
    snapshot: String,
}

fn run_one_seed(config: &ExperimentConfig, seed: u64, episodes: usize) -> Result<SeedDone> {
    let mut env = config.design_env()?;
    let outcome = train_run(&mut env, config.td3.to_td3(seed), episodes)?;

    let rows: Vec<SeedRow> = outcome
        .records
        .iter()
        .zip(&env.outcomes)
        .map(|(r, o)| SeedRow {
            episode: r.episode,
            action_alpha: r.action[0],
            action_zeta: r.action[1],
            alpha: o.alpha,
            zeta: o.zeta,
            apex: o.apex,
            reward: r.reward,
            critic_loss: r.critic_loss,
            actor_loss: r.actor_loss,
        })
        .collect();

    // The final design: what the deterministic policy proposes at the blank
    // initial observation, re-simulated once.
    let action = outcome.agent.policy_action(&vec![0.0; 4]);
    let (alpha, zeta) = env.space.design_from_action(&action);
    let check = env.evaluate(alpha, zeta)?;
    let final_design = FinalDesign {
        seed,
        alpha,
        zeta,
        apex: check.apex,
        reward: check.reward,
    };

    Ok(SeedDone { rows, final_design, snapshot: outcome.agent.snapshot_text() })
}

/// Train every seed, write per-seed episode logs and policy snapshots, a
/// final-design table, and a completion manifest into `out_dir`. Seeds that
/// fail are recorded in the manifest and skipped in the other artifacts.
pub fn train_all_seeds(
    config: &ExperimentConfig,
    out_dir: &Path,
    workers: usize,
    episodes: usize,
) -> Result<Vec<FinalDesign>> {
    let seeds = &config.seeds;
    let results: Vec<Mutex<Option<Result<SeedDone>>>> =
        seeds.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = workers.max(1).min(seeds.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= seeds.len() {
                    break;
                }
                let done = run_one_seed(config, seeds[i], episodes);
                *results[i].lock().unwrap() = Some(done);
            });
        }
    });

    let fp = fingerprint(
        &config.base_params(),
        &config.jump_command()?,
        &config.sim,
    );

    let mut finals = Vec::new();
    let mut manifest = Vec::new();
    for (i, slot) in results.iter().enumerate() {
        let seed = seeds[i];
        let done = slot
            .lock()
            .unwrap()
            .take()
            .context("a worker vanished without reporting")?;
        match done {
            Ok(done) => {
                write_seed_episodes(
                    &out_dir.join(format!("seed_{seed:03}.csv")),
                    &fp,
                    &done.rows,
                )?;
                std::fs::write(
                    out_dir.join(format!("policy_{seed:03}.txt")),
                    &done.snapshot,
                )?;
                finals.push(done.final_design);
                manifest.push(ManifestEntry { seed, ok: true, detail: "-".into() });
            }
            Err(err) => {
                manifest.push(ManifestEntry { seed, ok: false, detail: format!("{err:#}") });
            }
        }
    }

    write_final_designs(&out_dir.join("final_designs.csv"), &fp, &finals)?;
    write_manifest(&out_dir.join("manifest.csv"), &manifest)?;

    if finals.is_empty() {
        bail!("every seed failed; see {}", out_dir.join("manifest.csv").display());
    }
    Ok(finals)
}

/// Sweep the grid with one fixed-damping row per task. Row sub-grids
/// reproduce the parent grid's cells bitwise, so the stitched surface equals
/// a single-threaded sweep exactly.
pub fn parallel_sweep(
    grid: &DesignGrid,
    base: &DesignParams,
    command: &JumpCommand,
    sim: &SimConfig,
    workers: usize,
) -> Result<PerformanceSurface> {
    let rows: Vec<Mutex<Option<Result<Vec<f64>, pogo_core::Error>>>> =
        (0..grid.n_zeta).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = workers.max(1).min(grid.n_zeta.max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                if j >= grid.n_zeta {
                    break;
                }
                let row = sweep(&grid.row(j), base, command, sim).map(|s| s.heights);
                *rows[j].lock().unwrap() = Some(row);
            });
        }
    });

    let mut heights = Vec::with_capacity(grid.len());
    for (j, slot) in rows.iter().enumerate() {
        let row = slot
            .lock()
            .unwrap()
            .take()
            .with_context(|| format!("sweep row {j} never finished"))?
            .with_context(|| format!("sweep row {j} failed"))?;
        heights.extend_from_slice(&row);
    }

    Ok(PerformanceSurface {
        grid: *grid,
        heights,
        fingerprint: fingerprint(base, command, sim),
    })
}
