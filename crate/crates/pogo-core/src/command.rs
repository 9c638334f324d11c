//! Input-shaped stutter-jump command for the stroke-limited actuator.
//!
//! The commanded actuator acceleration is a step of height `accel_mag` shaped
//! by six impulses into two back-to-back bang-bang strokes separated by a
//! pause: a downward full stroke (drop the actuator), a pause `delta_t`, and an
//! upward full stroke that launches the jump. Each stroke covers `delta_i` in
//! minimum time `T_i = 2 sqrt(delta_i / accel_mag)`, reaching peak speed
//! `sqrt(accel_mag delta_i)`.
//!
//! Two redundant representations are kept deliberately: the impulse sequence
//! (amplitudes and instants) and the piecewise-constant phase profile that
//! [`JumpCommand::accel_at`] evaluates. [`convolution_check`] replays the
//! impulse convolution on a grid and confirms the two agree bitwise.

use alloc::vec::Vec;

use crate::error::Error;
use crate::params::DesignParams;
use crate::sim::{simulate, SimConfig};

/// The six shaping impulse amplitudes, in units of `accel_mag`.
pub const JUMP_AMPLITUDES: [f64; 6] = [-1.0, 2.0, -1.0, 1.0, -2.0, 1.0];

/// Impulse amplitudes and their application instants.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseSequence {
    /// Step multipliers, fixed to [`JUMP_AMPLITUDES`].
    pub amplitudes: [f64; 6],
    /// Application times [s], nondecreasing, starting at 0.
    pub times: [f64; 6],
}

/// Geometric description of one jump command.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CommandGeometry {
    /// Downward stroke length [m].
    pub delta_1: f64,
    /// Pause between strokes [s].
    pub delta_t: f64,
    /// Upward stroke length [m].
    pub delta_2: f64,
    /// Acceleration step magnitude [m/s^2].
    pub accel_mag: f64,
    /// Actuator start position along the stroke, 0 = bottom [m].
    pub x_a_0: f64,
}

impl CommandGeometry {
    /// Full-stroke geometry at the actuator limits: both strokes cover the
    /// whole stroke from the top, at maximum acceleration.
    pub fn full_stroke(params: &DesignParams, delta_t: f64) -> Self {
        CommandGeometry {
            delta_1: params.stroke_max,
            delta_t,
            delta_2: params.stroke_max,
            accel_mag: params.accel_max,
            x_a_0: params.stroke_max,
        }
    }
}

/// Impulse instants for the given stroke geometry.
pub fn times_from_geometry(
    delta_1: f64,
    delta_t: f64,
    delta_2: f64,
    accel_mag: f64,
) -> Result<ImpulseSequence, Error> {
    for v in [delta_1, delta_t, delta_2, accel_mag] {
        if !v.is_finite() {
            return Err(Error::InvalidCommand("geometry must be finite"));
        }
    }
    if !(accel_mag > 0.0) {
        return Err(Error::InvalidCommand("accel_mag must be positive"));
    }
    if !(delta_1 > 0.0) || !(delta_2 > 0.0) {
        return Err(Error::InvalidCommand("stroke deltas must be positive"));
    }
    if delta_t < 0.0 {
        return Err(Error::InvalidCommand("pause must be nonnegative"));
    }
    let t1 = 2.0 * libm::sqrt(delta_1 / accel_mag);
    let t2 = 2.0 * libm::sqrt(delta_2 / accel_mag);
    Ok(ImpulseSequence {
        amplitudes: JUMP_AMPLITUDES,
        times: [
            0.0,
            0.5 * t1,
            t1,
            t1 + delta_t,
            t1 + delta_t + 0.5 * t2,
            t1 + delta_t + t2,
        ],
    })
}

/// A validated jump command: impulse sequence plus the equivalent closed-form
/// phase profile used by the integrator.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpCommand {
    pub geometry: CommandGeometry,
    pub sequence: ImpulseSequence,
    /// Segment start times (= impulse instants), derived from geometry.
    phases: [f64; 6],
    /// Actuator position at each segment start [m].
    seg_pos: [f64; 6],
    /// Actuator velocity at each segment start [m/s].
    seg_vel: [f64; 6],
    /// Constant acceleration over each segment [m/s^2].
    seg_acc: [f64; 6],
}

impl JumpCommand {
    /// Validate the geometry against the actuator limits and build the command.
    pub fn new(params: &DesignParams, geometry: CommandGeometry) -> Result<Self, Error> {
        let sequence = times_from_geometry(
            geometry.delta_1,
            geometry.delta_t,
            geometry.delta_2,
            geometry.accel_mag,
        )?;
        if !geometry.x_a_0.is_finite() {
            return Err(Error::InvalidCommand("x_a_0 must be finite"));
        }
        if geometry.accel_mag > params.accel_max {
            return Err(Error::SaturationViolation {
                peak: geometry.accel_mag,
                limit: params.accel_max,
            });
        }
        for delta in [geometry.delta_1, geometry.delta_2] {
            let peak = libm::sqrt(geometry.accel_mag * delta);
            if peak > params.vel_max {
                return Err(Error::SaturationViolation { peak, limit: params.vel_max });
            }
        }
        let bottom = geometry.x_a_0 - geometry.delta_1;
        let top = bottom + geometry.delta_2;
        for reach in [geometry.x_a_0, bottom, top] {
            if reach < 0.0 || reach > params.stroke_max {
                return Err(Error::StrokeViolation {
                    excursion: reach,
                    stroke_max: params.stroke_max,
                });
            }
        }

        Ok(Self::assemble(geometry, sequence))
    }

    /// Zero command: no acceleration, actuator parked at `x_a_0`. Baseline for
    /// drop tests and statics.
    pub fn stationary(x_a_0: f64) -> Self {
        let geometry = CommandGeometry {
            delta_1: 0.0,
            delta_t: 0.0,
            delta_2: 0.0,
            accel_mag: 0.0,
            x_a_0,
        };
        let sequence = ImpulseSequence { amplitudes: JUMP_AMPLITUDES, times: [0.0; 6] };
        Self::assemble(geometry, sequence)
    }

    fn assemble(geometry: CommandGeometry, sequence: ImpulseSequence) -> Self {
        let phases = sequence.times;
        let a = geometry.accel_mag;
        let x0 = geometry.x_a_0;
        let bottom = x0 - geometry.delta_1;
        let top = bottom + geometry.delta_2;
        // Waypoints are pinned analytically so phase ends are exact: the first
        // stroke ends at `bottom` with zero velocity, the second at `top`.
        let half1 = phases[1] - phases[0];
        let half2 = phases[4] - phases[3];
        JumpCommand {
            geometry,
            sequence,
            phases,
            seg_pos: [x0, x0 - 0.5 * geometry.delta_1, bottom, bottom, bottom + 0.5 * geometry.delta_2, top],
            seg_vel: [0.0, -a * half1, 0.0, 0.0, a * half2, 0.0],
            seg_acc: [-a, a, 0.0, a, -a, 0.0],
        }
    }

    /// Index of the phase segment containing `t` (half-open `[t_i, t_{i+1})`).
    fn segment(&self, t: f64) -> usize {
        // Scan from the second boundary; anything at/after the last is the tail.
        for i in 1..6 {
            if t < self.phases[i] {
                return i - 1;
            }
        }
        5
    }

    /// Commanded actuator acceleration at time `t >= 0`.
    pub fn accel_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        self.seg_acc[self.segment(t)]
    }

    /// Commanded actuator position and velocity at time `t >= 0`.
    pub fn kinematics(&self, t: f64) -> (f64, f64) {
        if t < 0.0 {
            return (self.geometry.x_a_0, 0.0);
        }
        let i = self.segment(t);
        let tau = t - self.phases[i];
        let pos = self.seg_pos[i] + self.seg_vel[i] * tau + 0.5 * self.seg_acc[i] * tau * tau;
        let vel = self.seg_vel[i] + self.seg_acc[i] * tau;
        (pos, vel)
    }

    /// Time the command finishes (last impulse instant).
    pub fn end_time(&self) -> f64 {
        self.phases[5]
    }
}

/// Replay the impulse convolution on a `dt` grid and compare it bitwise with
/// the phase profile; grid points landing exactly on a switching instant are
/// skipped (the half-open convention is a representation choice, not physics).
pub fn convolution_check(command: &JumpCommand, dt: f64) -> bool {
    let seq = &command.sequence;
    let a = command.geometry.accel_mag;
    let mut horizon: f64 = command.end_time();
    for &t in &seq.times {
        horizon = horizon.max(t);
    }
    horizon += 0.05;

    let n = libm::ceil(horizon / dt) as usize;
    'grid: for k in 0..=n {
        let t = k as f64 * dt;
        for &instant in seq.times.iter().chain(command.phases.iter()) {
            if t == instant {
                continue 'grid;
            }
        }
        let mut conv = 0.0;
        for i in 0..6 {
            if t >= seq.times[i] {
                conv += seq.amplitudes[i] * a;
            }
        }
        if conv != command.accel_at(t) {
            return false;
        }
    }
    true
}

/// One candidate pause and the apex it produced at the nominal design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayTuning {
    pub delta_t: f64,
    pub apex: f64,
}

/// Simulate a full-stroke command at each candidate pause.
pub fn scan_delays(
    params: &DesignParams,
    sim: &SimConfig,
    delays: &[f64],
) -> Result<Vec<DelayTuning>, Error> {
    let mut out = Vec::with_capacity(delays.len());
    for &delta_t in delays {
        let command = JumpCommand::new(params, CommandGeometry::full_stroke(params, delta_t))?;
        let apex = simulate(params, &command, sim)?.apex_height()?;
        out.push(DelayTuning { delta_t, apex });
    }
    Ok(out)
}

/// Highest apex wins; exact ties go to the smaller pause.
pub fn best_delay(scan: &[DelayTuning]) -> DelayTuning {
    assert!(!scan.is_empty(), "delay grid must be non-empty");
    let mut best = scan[0];
    for &c in &scan[1..] {
        if c.apex > best.apex || (c.apex == best.apex && c.delta_t < best.delta_t) {
            best = c;
        }
    }
    best
}

/// Pick the pause maximizing the apex of the nominal design over a candidate
/// grid. The winner is meant to be committed to the experiment config, not
/// re-tuned per run.
pub fn tune_delay(
    params: &DesignParams,
    sim: &SimConfig,
    delays: &[f64],
) -> Result<DelayTuning, Error> {
    let scan = scan_delays(params, sim, delays)?;
    Ok(best_delay(&scan))
}
