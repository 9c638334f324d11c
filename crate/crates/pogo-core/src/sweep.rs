//! Brute-force oracle over the design box: simulate every (spring constant,
//! damping ratio) pair on a rectangular grid and record the apex height each
//! achieves. The learner's answers are judged against this surface.
//!
//! Grid axes are plain linspaces. An axis may hold a single point (`n == 1`,
//! `min == max`), which makes a one-row sub-grid reproduce the parent grid's
//! values bitwise — that is what lets callers split a sweep across workers and
//! concatenate the rows without any cross-worker float drift.

use alloc::string::String;
use alloc::vec::Vec;

use sha2::{Digest, Sha256};

use crate::command::JumpCommand;
use crate::env::DesignSpace;
use crate::error::Error;
use crate::params::DesignParams;
use crate::sim::{simulate, SimConfig};

/// Rectangular grid over the design box. `heights` rows are fixed-damping
/// slices: cell `(i, j)` lives at index `j * n_alpha + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DesignGrid {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub n_alpha: usize,
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub n_zeta: usize,
}

fn check_axis(min: f64, max: f64, n: usize, what: &'static str) -> Result<(), Error> {
    if !(min.is_finite() && max.is_finite() && min > 0.0) {
        return Err(Error::InvalidGrid(what));
    }
    match n {
        0 => Err(Error::InvalidGrid("axis needs at least one point")),
        1 if min != max => Err(Error::InvalidGrid("single-point axis needs min == max")),
        _ if n >= 2 && !(min < max) => Err(Error::InvalidGrid("multi-point axis needs min < max")),
        _ => Ok(()),
    }
}

fn linspace_at(min: f64, max: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        min
    } else {
        min + (max - min) * (i as f64 / (n - 1) as f64)
    }
}

impl DesignGrid {
    pub fn new(
        alpha_min: f64,
        alpha_max: f64,
        n_alpha: usize,
        zeta_min: f64,
        zeta_max: f64,
        n_zeta: usize,
    ) -> Result<Self, Error> {
        check_axis(alpha_min, alpha_max, n_alpha, "spring-constant axis must be finite and positive")?;
        check_axis(zeta_min, zeta_max, n_zeta, "damping-ratio axis must be finite and positive")?;
        Ok(DesignGrid { alpha_min, alpha_max, n_alpha, zeta_min, zeta_max, n_zeta })
    }

    /// Grid spanning the whole reachable design box of `space`.
    pub fn covering(space: &DesignSpace, n_alpha: usize, n_zeta: usize) -> Result<Self, Error> {
        let (a_lo, a_hi) = space.alpha_range();
        let (z_lo, z_hi) = space.zeta_range();
        DesignGrid::new(a_lo, a_hi, n_alpha, z_lo, z_hi, n_zeta)
    }

    pub fn alpha_at(&self, i: usize) -> f64 {
        linspace_at(self.alpha_min, self.alpha_max, self.n_alpha, i)
    }

    pub fn zeta_at(&self, j: usize) -> f64 {
        linspace_at(self.zeta_min, self.zeta_max, self.n_zeta, j)
    }

    pub fn len(&self) -> usize {
        self.n_alpha * self.n_zeta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `j`-th fixed-damping row as a standalone single-row grid. Its cell
    /// values reproduce this grid's row `j` bitwise.
    pub fn row(&self, j: usize) -> DesignGrid {
        DesignGrid {
            alpha_min: self.alpha_min,
            alpha_max: self.alpha_max,
            n_alpha: self.n_alpha,
            zeta_min: self.zeta_at(j),
            zeta_max: self.zeta_at(j),
            n_zeta: 1,
        }
    }
}

/// One evaluated grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceCell {
    pub alpha: f64,
    pub zeta: f64,
    pub height: f64,
}

/// Apex height over the whole grid, plus the setup fingerprint it was
/// computed under.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceSurface {
    pub grid: DesignGrid,
    /// Row-major: `heights[j * n_alpha + i]` for cell `(i, j)`.
    pub heights: Vec<f64>,
    pub fingerprint: Fingerprint,
}

impl PerformanceSurface {
    pub fn height_at(&self, i: usize, j: usize) -> f64 {
        self.heights[j * self.grid.n_alpha + i]
    }

    pub fn cell(&self, i: usize, j: usize) -> SurfaceCell {
        SurfaceCell {
            alpha: self.grid.alpha_at(i),
            zeta: self.grid.zeta_at(j),
            height: self.height_at(i, j),
        }
    }

    /// Best cell; ties break toward smaller damping, then smaller spring
    /// constant.
    pub fn argmax_design(&self) -> Result<SurfaceCell, Error> {
        if self.heights.is_empty() {
            return Err(Error::InvalidGrid("cannot take the argmax of an empty surface"));
        }
        let mut best = self.cell(0, 0);
        for j in 0..self.grid.n_zeta {
            for i in 0..self.grid.n_alpha {
                let h = self.height_at(i, j);
                if h > best.height {
                    best = self.cell(i, j);
                }
            }
        }
        Ok(best)
    }

    /// Cells whose height is within `rel_tol` of `target`, relatively.
    pub fn target_band(&self, target: f64, rel_tol: f64) -> Result<Vec<SurfaceCell>, Error> {
        if !(target > 0.0 && target.is_finite()) {
            return Err(Error::InvalidTarget { target });
        }
        let mut cells = Vec::new();
        for j in 0..self.grid.n_zeta {
            for i in 0..self.grid.n_alpha {
                if (self.height_at(i, j) - target).abs() / target <= rel_tol {
                    cells.push(self.cell(i, j));
                }
            }
        }
        Ok(cells)
    }
}

/// Evaluate every grid cell. A non-finite state in any cell aborts the sweep
/// with the offending design attached.
pub fn sweep(
    grid: &DesignGrid,
    base: &DesignParams,
    command: &JumpCommand,
    sim: &SimConfig,
) -> Result<PerformanceSurface, Error> {
    let mut heights = Vec::with_capacity(grid.len());
    for j in 0..grid.n_zeta {
        let zeta = grid.zeta_at(j);
        for i in 0..grid.n_alpha {
            let alpha = grid.alpha_at(i);
            let params = base.with_design(alpha, zeta);
            let traj = simulate(&params, command, sim).map_err(|e| match e {
                Error::NonFiniteState { t } => Error::SweepCellDiverged { alpha, zeta, t },
                other => other,
            })?;
            heights.push(traj.apex_height()?);
        }
    }
    Ok(PerformanceSurface {
        grid: *grid,
        heights,
        fingerprint: fingerprint(base, command, sim),
    })
}

/// Short hash of everything a surface's validity depends on *except* the
/// swept design pair: platform constants, jump-command geometry, and the
/// integration window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint(pub String);

impl core::fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.0)
    }
}

/// First 16 hex digits of a SHA-256 over the canonical setup string.
pub fn fingerprint(base: &DesignParams, command: &JumpCommand, sim: &SimConfig) -> Fingerprint {
    let g = &command.geometry;
    let text = alloc::format!(
        "leg_mass={:.16e}\nactuator_mass={:.16e}\nbeta={:.16e}\ngravity={:.16e}\n\
         stroke_max={:.16e}\nvel_max={:.16e}\naccel_max={:.16e}\ncompression_limit={:.16e}\n\
         delta_1={:.16e}\ndelta_t={:.16e}\ndelta_2={:.16e}\naccel_mag={:.16e}\nx_a_0={:.16e}\n\
         dt={:.16e}\nt_f={:.16e}\n",
        base.leg_mass,
        base.actuator_mass,
        base.beta,
        base.gravity,
        base.stroke_max,
        base.vel_max,
        base.accel_max,
        base.compression_limit,
        g.delta_1,
        g.delta_t,
        g.delta_2,
        g.accel_mag,
        g.x_a_0,
        sim.dt,
        sim.t_f,
    );
    let digest = Sha256::digest(text.as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in &digest[..8] {
        for nibble in [byte >> 4, byte & 0xf] {
            hex.push(char::from_digit(nibble as u32, 16).unwrap());
        }
    }
    Fingerprint(hex)
}
