//! Hand-rolled SVG learning curves: per-episode reward mean across seeds with
//! a +/- one standard deviation band, one color per run directory. No plotting
//! dependency, fully deterministic output.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use crate::artifacts::{read_seed_episodes, SeedRow};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 56.0;
const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// One run's aggregated reward trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Aggregate per-episode reward across seeds; seeds are truncated to the
/// shortest one so every episode averages the same number of runs.
pub fn curve_from_seeds(label: &str, per_seed: &[Vec<SeedRow>]) -> Result<Curve> {
    if per_seed.is_empty() || per_seed.iter().any(|s| s.is_empty()) {
        bail!("run {label} has no episode data");
    }
    let n = per_seed.iter().map(Vec::len).min().unwrap();
    let mut mean = Vec::with_capacity(n);
    let mut std = Vec::with_capacity(n);
    for e in 0..n {
        let rewards: Vec<f64> = per_seed.iter().map(|s| s[e].reward).collect();
        let mu = rewards.iter().sum::<f64>() / rewards.len() as f64;
        let var =
            rewards.iter().map(|r| (r - mu) * (r - mu)).sum::<f64>() / rewards.len() as f64;
        mean.push(mu);
        std.push(var.sqrt());
    }
    Ok(Curve { label: label.to_string(), mean, std })
}

/// All `seed_*.csv` files of a run directory, in file-name order.
pub fn load_run(dir: &Path) -> Result<Vec<Vec<SeedRow>>> {
    let mut names: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("seed_") && n.ends_with(".csv"))
        })
        .collect();
    names.sort();
    if names.is_empty() {
        bail!("{} holds no seed_*.csv files", dir.display());
    }
    names
        .iter()
        .map(|p| read_seed_episodes(p).map(|(_, rows)| rows))
        .collect()
}

fn fmt_px(x: f64) -> String {
    format!("{x:.2}")
}

fn fmt_tick(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.abs() >= 0.01 && x.abs() < 10000.0 {
        format!("{x:.4}")
    } else {
        format!("{x:.2e}")
    }
}

/// Render the curves into a standalone SVG document.
pub fn render_svg(curves: &[Curve]) -> Result<String> {
    if curves.is_empty() {
        bail!("nothing to plot");
    }
    let episodes = curves.iter().map(|c| c.mean.len()).max().unwrap();
    if episodes < 2 {
        bail!("need at least two episodes to draw a curve");
    }

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for c in curves {
        for (m, s) in c.mean.iter().zip(&c.std) {
            // min/max would silently skip a NaN sample, so reject it here.
            if !(m.is_finite() && s.is_finite()) {
                bail!("curve {} contains non-finite rewards", c.label);
            }
            lo = lo.min(m - s);
            hi = hi.max(m + s);
        }
    }
    if !(lo.is_finite() && hi.is_finite()) {
        bail!("curves contain non-finite rewards");
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);

    let x_of = |episode: f64| {
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) * episode / (episodes - 1) as f64
    };
    let y_of =
        |value: f64| HEIGHT - MARGIN_BOTTOM - (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) * (value - lo) / (hi - lo);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"monospace\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // Axes and ticks.
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    let n_ticks = 6;
    for k in 0..n_ticks {
        let frac = k as f64 / (n_ticks - 1) as f64;
        let ex = frac * (episodes - 1) as f64;
        let x = x_of(ex);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{y0}\" x2=\"{0}\" y2=\"{1}\" stroke=\"black\"/>\n\
             <text x=\"{0}\" y=\"{2}\" text-anchor=\"middle\">{3}</text>\n",
            fmt_px(x),
            fmt_px(y0 + 6.0),
            fmt_px(y0 + 22.0),
            ex.round() as usize,
        ));
        let v = lo + frac * (hi - lo);
        let y = y_of(v);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n\
             <text x=\"{3}\" y=\"{4}\" text-anchor=\"end\">{5}</text>\n",
            fmt_px(x0 - 6.0),
            fmt_px(y),
            fmt_px(x0),
            fmt_px(x0 - 10.0),
            fmt_px(y + 4.0),
            fmt_tick(v),
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">episode</text>\n",
        fmt_px((x0 + x1) / 2.0),
        fmt_px(HEIGHT - 12.0),
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">reward</text>\n",
        fmt_px((y0 + y1) / 2.0),
        fmt_px((y0 + y1) / 2.0),
    ));

    // Bands first so every mean line stays visible.
    for (c, color) in curves.iter().zip(PALETTE.iter().cycle()) {
        let mut points = String::new();
        for (e, (m, s)) in c.mean.iter().zip(&c.std).enumerate() {
            points.push_str(&format!("{},{} ", fmt_px(x_of(e as f64)), fmt_px(y_of(m + s))));
        }
        for (e, (m, s)) in c.mean.iter().zip(&c.std).enumerate().rev() {
            points.push_str(&format!("{},{} ", fmt_px(x_of(e as f64)), fmt_px(y_of(m - s))));
        }
        svg.push_str(&format!(
            "<polygon points=\"{}\" fill=\"{color}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n",
            points.trim_end(),
        ));
    }
    for (c, color) in curves.iter().zip(PALETTE.iter().cycle()) {
        let mut points = String::new();
        for (e, m) in c.mean.iter().enumerate() {
            points.push_str(&format!("{},{} ", fmt_px(x_of(e as f64)), fmt_px(y_of(*m))));
        }
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
            points.trim_end(),
        ));
    }

    // Legend, top-left inside the frame.
    for (k, (c, color)) in curves.iter().zip(PALETTE.iter().cycle()).enumerate() {
        let y = MARGIN_TOP + 18.0 + 20.0 * k as f64;
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"14\" height=\"14\" fill=\"{color}\"/>\n\
             <text x=\"{}\" y=\"{}\">{}</text>\n",
            fmt_px(x0 + 12.0),
            fmt_px(y - 11.0),
            fmt_px(x0 + 32.0),
            fmt_px(y),
            c.label,
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Aggregate each run directory and write one overlaid SVG.
pub fn plot_runs(run_dirs: &[PathBuf], out: &Path) -> Result<()> {
    let mut curves = Vec::new();
    for dir in run_dirs {
        let label = dir
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or("run")
            .to_string();
        let per_seed = load_run(dir)?;
        curves.push(curve_from_seeds(&label, &per_seed)?);
    }
    let svg = render_svg(&curves)?;
    if let Some(parent) = out.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(out, svg).with_context(|| format!("writing {}", out.display()))
}
