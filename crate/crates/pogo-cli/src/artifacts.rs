//! Plain-text artifact files. Every float is written as `{:.16e}` (17
//! significant digits), which round-trips f64 exactly, so re-running an
//! experiment with the same config must reproduce every file byte for byte.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use pogo_core::command::DelayTuning;
use pogo_core::sweep::{DesignGrid, Fingerprint, PerformanceSurface};
use pogo_core::Trajectory;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(token: &str, what: &str) -> Result<f64> {
    token
        .trim()
        .parse()
        .with_context(|| format!("bad {what}: {token:?}"))
}

fn parse_usize(token: &str, what: &str) -> Result<usize> {
    token
        .trim()
        .parse()
        .with_context(|| format!("bad {what}: {token:?}"))
}

fn write_atomically(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

/// `t,height,vel,actuator_pos,actuator_vel` per sample.
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut out = String::from("t,height,vel,actuator_pos,actuator_vel\n");
    for s in &traj.samples {
        out.push_str(&fmt(s.t));
        for v in [s.height, s.vel, s.actuator_pos, s.actuator_vel] {
            out.push(',');
            out.push_str(&fmt(v));
        }
        out.push('\n');
    }
    write_atomically(path, &out)
}

/// `t,kind` per liftoff/touchdown/stop event.
pub fn write_events(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut out = String::from("t,kind\n");
    for e in &traj.events {
        out.push_str(&fmt(e.t));
        out.push(',');
        out.push_str(e.kind.label());
        out.push('\n');
    }
    write_atomically(path, &out)
}

/// `delta_t,apex` per scanned pause candidate.
pub fn write_tuning(path: &Path, scan: &[DelayTuning]) -> Result<()> {
    let mut out = String::from("delta_t,apex\n");
    for c in scan {
        out.push_str(&fmt(c.delta_t));
        out.push(',');
        out.push_str(&fmt(c.apex));
        out.push('\n');
    }
    write_atomically(path, &out)
}

/// Surface file: fingerprint and grid in `#` comment lines, then
/// `alpha,zeta,apex_height` rows in storage order (damping-major).
pub fn write_surface(path: &Path, surface: &PerformanceSurface) -> Result<()> {
    let g = &surface.grid;
    let mut out = format!("# fingerprint={}\n", surface.fingerprint);
    out.push_str(&format!(
        "# grid alpha_min={} alpha_max={} n_alpha={} zeta_min={} zeta_max={} n_zeta={}\n",
        fmt(g.alpha_min),
        fmt(g.alpha_max),
        g.n_alpha,
        fmt(g.zeta_min),
        fmt(g.zeta_max),
        g.n_zeta,
    ));
    out.push_str("alpha,zeta,apex_height\n");
    for j in 0..g.n_zeta {
        for i in 0..g.n_alpha {
            out.push_str(&fmt(g.alpha_at(i)));
            out.push(',');
            out.push_str(&fmt(g.zeta_at(j)));
            out.push(',');
            out.push_str(&fmt(surface.height_at(i, j)));
            out.push('\n');
        }
    }
    write_atomically(path, &out)
}

pub fn read_surface(path: &Path) -> Result<PerformanceSurface> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();

    let fp_line = lines.next().context("surface file is empty")?;
    let fingerprint = fp_line
        .strip_prefix("# fingerprint=")
        .context("expected `# fingerprint=` on line 1")?
        .trim()
        .to_string();

    let grid_line = lines
        .next()
        .and_then(|l| l.strip_prefix("# grid "))
        .context("expected `# grid` on line 2")?;
    let mut fields = std::collections::BTreeMap::new();
    for pair in grid_line.split_whitespace() {
        let (k, v) = pair.split_once('=').context("grid fields look like key=value")?;
        fields.insert(k.to_string(), v.to_string());
    }
    let get = |k: &str| fields.get(k).with_context(|| format!("grid field {k} missing"));
    let grid = DesignGrid::new(
        parse_f64(get("alpha_min")?, "alpha_min")?,
        parse_f64(get("alpha_max")?, "alpha_max")?,
        parse_usize(get("n_alpha")?, "n_alpha")?,
        parse_f64(get("zeta_min")?, "zeta_min")?,
        parse_f64(get("zeta_max")?, "zeta_max")?,
        parse_usize(get("n_zeta")?, "n_zeta")?,
    )?;

    match lines.next() {
        Some("alpha,zeta,apex_height") => {}
        other => bail!("expected surface header row, found {other:?}"),
    }

    let mut heights = Vec::with_capacity(grid.len());
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let alpha = parse_f64(cols.next().context("missing alpha column")?, "alpha")?;
        let zeta = parse_f64(cols.next().context("missing zeta column")?, "zeta")?;
        let height = parse_f64(cols.next().context("missing apex column")?, "apex_height")?;
        // Integrity: the coordinates must be the grid's own, bit for bit.
        let k = heights.len();
        let (i, j) = (k % grid.n_alpha, k / grid.n_alpha);
        if j >= grid.n_zeta || alpha != grid.alpha_at(i) || zeta != grid.zeta_at(j) {
            bail!("surface row {k} does not match its grid cell");
        }
        heights.push(height);
    }
    if heights.len() != grid.len() {
        bail!("surface has {} rows, grid wants {}", heights.len(), grid.len());
    }
    Ok(PerformanceSurface { grid, heights, fingerprint: Fingerprint(fingerprint) })
}

/// One training episode as logged per seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedRow {
    pub episode: usize,
    /// Physical action (offsets from the nominal design).
    pub action_alpha: f64,
    pub action_zeta: f64,
    /// Realized design after clamping.
    pub alpha: f64,
    pub zeta: f64,
    pub apex: f64,
    pub reward: f64,
    /// NaN before training starts / between delayed updates.
    pub critic_loss: f64,
    pub actor_loss: f64,
}

const SEED_HEADER: &str =
    "episode,action_alpha,action_zeta,alpha,zeta,apex,reward,critic_loss,actor_loss";

pub fn write_seed_episodes(path: &Path, fingerprint: &Fingerprint, rows: &[SeedRow]) -> Result<()> {
    let mut out = format!("# fingerprint={fingerprint}\n{SEED_HEADER}\n");
    for r in rows {
        out.push_str(&r.episode.to_string());
        for v in [
            r.action_alpha,
            r.action_zeta,
            r.alpha,
            r.zeta,
            r.apex,
            r.reward,
            r.critic_loss,
            r.actor_loss,
        ] {
            out.push(',');
            out.push_str(&fmt(v));
        }
        out.push('\n');
    }
    write_atomically(path, &out)
}

pub fn read_seed_episodes(path: &Path) -> Result<(Fingerprint, Vec<SeedRow>)> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let fingerprint = lines
        .next()
        .and_then(|l| l.strip_prefix("# fingerprint="))
        .context("expected `# fingerprint=` on line 1")?
        .trim()
        .to_string();
    match lines.next() {
        Some(SEED_HEADER) => {}
        other => bail!("expected episode header row, found {other:?}"),
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 9 {
            bail!("episode row has {} columns, want 9", cols.len());
        }
        rows.push(SeedRow {
            episode: parse_usize(cols[0], "episode")?,
            action_alpha: parse_f64(cols[1], "action_alpha")?,
            action_zeta: parse_f64(cols[2], "action_zeta")?,
            alpha: parse_f64(cols[3], "alpha")?,
            zeta: parse_f64(cols[4], "zeta")?,
            apex: parse_f64(cols[5], "apex")?,
            reward: parse_f64(cols[6], "reward")?,
            critic_loss: parse_f64(cols[7], "critic_loss")?,
            actor_loss: parse_f64(cols[8], "actor_loss")?,
        });
    }
    Ok((Fingerprint(fingerprint), rows))
}

/// The design a finished seed settles on, evaluated deterministically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalDesign {
    pub seed: u64,
    pub alpha: f64,
    pub zeta: f64,
    pub apex: f64,
    pub reward: f64,
}

const FINAL_HEADER: &str = "seed,alpha,zeta,apex,reward";

pub fn write_final_designs(
    path: &Path,
    fingerprint: &Fingerprint,
    rows: &[FinalDesign],
) -> Result<()> {
    let mut out = format!("# fingerprint={fingerprint}\n{FINAL_HEADER}\n");
    for r in rows {
        out.push_str(&r.seed.to_string());
        for v in [r.alpha, r.zeta, r.apex, r.reward] {
            out.push(',');
            out.push_str(&fmt(v));
        }
        out.push('\n');
    }
    write_atomically(path, &out)
}

pub fn read_final_designs(path: &Path) -> Result<(Fingerprint, Vec<FinalDesign>)> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let fingerprint = lines
        .next()
        .and_then(|l| l.strip_prefix("# fingerprint="))
        .context("expected `# fingerprint=` on line 1")?
        .trim()
        .to_string();
    match lines.next() {
        Some(FINAL_HEADER) => {}
        other => bail!("expected final-design header row, found {other:?}"),
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            bail!("final-design row has {} columns, want 5", cols.len());
        }
        rows.push(FinalDesign {
            seed: cols[0].trim().parse().with_context(|| format!("bad seed {:?}", cols[0]))?,
            alpha: parse_f64(cols[1], "alpha")?,
            zeta: parse_f64(cols[2], "zeta")?,
            apex: parse_f64(cols[3], "apex")?,
            reward: parse_f64(cols[4], "reward")?,
        });
    }
    Ok((Fingerprint(fingerprint), rows))
}

/// Per-seed completion status of a training run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub seed: u64,
    pub ok: bool,
    /// `-` when the seed completed, the error text otherwise.
    pub detail: String,
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let mut out = String::from("seed,status,detail\n");
    for e in entries {
        let status = if e.ok { "ok" } else { "failed" };
        // Keep the file one-line-per-seed even for multi-line errors.
        let detail = e.detail.replace(['\n', ','], " ");
        out.push_str(&format!("{},{},{}\n", e.seed, status, detail));
    }
    write_atomically(path, &out)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("seed,status,detail") => {}
        other => bail!("expected manifest header, found {other:?}"),
    }
    let mut entries = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.splitn(3, ',').collect();
        if cols.len() != 3 {
            bail!("manifest row has {} columns, want 3", cols.len());
        }
        entries.push(ManifestEntry {
            seed: cols[0].trim().parse().with_context(|| format!("bad seed {:?}", cols[0]))?,
            ok: cols[1] == "ok",
            detail: cols[2].to_string(),
        });
    }
    Ok(entries)
}
