//! Compare a finished training run against the brute-force surface: how close
//! the learned designs came to the oracle optimum, how consistently the seeds
//! agreed, and where the oracle peak itself sits.

use std::path::Path;

use anyhow::{bail, Result};

use pogo_core::params::ALPHA_NOMINAL;

use crate::artifacts::{read_final_designs, read_manifest, read_surface, FinalDesign};

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

/// Population relative standard deviation sigma/|mu|.
pub fn relative_std(values: &[f64]) -> f64 {
    let mu = mean(values.iter().copied());
    let var = mean(values.iter().map(|v| (v - mu) * (v - mu)));
    var.sqrt() / mu.abs()
}

/// The analysis behind one report, exposed for tests and the acceptance gate.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub fingerprint: String,
    pub seeds: usize,
    /// Seeds the manifest marks as failed (0 when no manifest was found).
    pub failed_seeds: usize,
    pub mean_final_apex: f64,
    pub oracle_max_apex: f64,
    /// mean_final_apex / oracle_max_apex.
    pub learned_vs_oracle: f64,
    pub relstd_alpha: f64,
    pub relstd_zeta: f64,
    pub argmax_alpha: f64,
    pub argmax_zeta: f64,
    /// Oracle peak strictly inside the swept spring range?
    pub argmax_alpha_interior: bool,
    pub argmax_alpha_below_nominal: bool,
    /// Mean |apex - target| / target, when a target was given.
    pub target: Option<TargetSummary>,
}

#[derive(Debug, Clone, Copy)]
pub struct TargetSummary {
    pub target_height: f64,
    pub mean_rel_error: f64,
}

pub fn compare(
    finals: &[FinalDesign],
    surface: &pogo_core::sweep::PerformanceSurface,
    target_height: Option<f64>,
) -> Result<Comparison> {
    if finals.is_empty() {
        bail!("no completed seeds to report on");
    }
    let best = surface.argmax_design()?;
    let mean_final_apex = mean(finals.iter().map(|f| f.apex));
    let alphas: Vec<f64> = finals.iter().map(|f| f.alpha).collect();
    let zetas: Vec<f64> = finals.iter().map(|f| f.zeta).collect();

    let target = match target_height {
        Some(t) if t > 0.0 => Some(TargetSummary {
            target_height: t,
            mean_rel_error: mean(finals.iter().map(|f| (f.apex - t).abs() / t)),
        }),
        Some(t) => bail!("target height must be positive, got {t}"),
        None => None,
    };

    Ok(Comparison {
        fingerprint: surface.fingerprint.0.clone(),
        seeds: finals.len(),
        failed_seeds: 0,
        mean_final_apex,
        oracle_max_apex: best.height,
        learned_vs_oracle: mean_final_apex / best.height,
        relstd_alpha: relative_std(&alphas),
        relstd_zeta: relative_std(&zetas),
        argmax_alpha: best.alpha,
        argmax_zeta: best.zeta,
        argmax_alpha_interior: best.alpha > surface.grid.alpha_min
            && best.alpha < surface.grid.alpha_max,
        argmax_alpha_below_nominal: best.alpha < ALPHA_NOMINAL,
        target,
    })
}

impl Comparison {
    /// Key=value text, one fact per line.
    pub fn render(&self) -> String {
        let mut out = String::from("# co-design report\n");
        out.push_str(&format!("fingerprint={}\n", self.fingerprint));
        out.push_str(&format!("seeds={}\n", self.seeds));
        out.push_str(&format!("failed_seeds={}\n", self.failed_seeds));
        out.push_str(&format!("mean_final_apex={:.16e}\n", self.mean_final_apex));
        out.push_str(&format!("oracle_max_apex={:.16e}\n", self.oracle_max_apex));
        out.push_str(&format!("learned_vs_oracle={:.16e}\n", self.learned_vs_oracle));
        out.push_str(&format!("relstd_alpha={:.16e}\n", self.relstd_alpha));
        out.push_str(&format!("relstd_zeta={:.16e}\n", self.relstd_zeta));
        out.push_str(&format!("argmax_alpha={:.16e}\n", self.argmax_alpha));
        out.push_str(&format!("argmax_zeta={:.16e}\n", self.argmax_zeta));
        out.push_str(&format!("argmax_alpha_interior={}\n", self.argmax_alpha_interior));
        out.push_str(&format!(
            "argmax_alpha_below_nominal={}\n",
            self.argmax_alpha_below_nominal
        ));
        if let Some(t) = self.target {
            out.push_str(&format!("target_height={:.16e}\n", t.target_height));
            out.push_str(&format!("mean_target_rel_error={:.16e}\n", t.mean_rel_error));
        }
        out
    }
}

/// Load both artifact sets, refuse mismatched setups, and write the report.
pub fn write_report(
    train_dir: &Path,
    surface_path: &Path,
    out_path: &Path,
    target_height: Option<f64>,
) -> Result<Comparison> {
    let (train_fp, finals) = read_final_designs(&train_dir.join("final_designs.csv"))?;
    let surface = read_surface(surface_path)?;
    if train_fp != surface.fingerprint {
        bail!(
            "setup fingerprints differ: training ran under {train_fp} but the surface \
             was swept under {}; the comparison would be meaningless",
            surface.fingerprint
        );
    }
    let mut comparison = compare(&finals, &surface, target_height)?;
    let manifest_path = train_dir.join("manifest.csv");
    if manifest_path.exists() {
        comparison.failed_seeds =
            read_manifest(&manifest_path)?.iter().filter(|e| !e.ok).count();
    }
    std::fs::write(out_path, comparison.render())?;
    Ok(comparison)
}
