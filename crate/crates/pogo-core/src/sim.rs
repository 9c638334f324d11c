//! Hybrid dynamics of the flexible jumper and its fixed-step RK4 integrator.
//!
//! The rod height `x` obeys
//!
//! ```text
//! x_ddot = (gamma / m_t) (alpha x + beta x^3 + c x_dot) - (m_a / m_t) u - g
//! ```
//!
//! where `gamma` is -1 in ground contact (`x <= 0`) and 0 in flight, `u` is the
//! commanded actuator acceleration, and a rigid, perfectly plastic stop caps
//! spring compression at `compression_limit`. The actuator (a mass sliding on
//! the rod) follows its commanded motion exactly and is advanced by closed-form
//! kinematics rather than integrated.

use alloc::vec::Vec;

use crate::command::JumpCommand;
use crate::error::Error;
use crate::params::DesignParams;

/// Full mechanical state at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PogoState {
    /// Time [s].
    pub t: f64,
    /// Rod height above rest contact [m]; negative values compress the spring.
    pub height: f64,
    /// Rod vertical velocity [m/s].
    pub vel: f64,
    /// Actuator position along the stroke, 0 = stroke bottom [m].
    pub actuator_pos: f64,
    /// Actuator velocity along the stroke [m/s].
    pub actuator_vel: f64,
}

impl PogoState {
    /// State with every component finite?
    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.height.is_finite()
            && self.vel.is_finite()
            && self.actuator_pos.is_finite()
            && self.actuator_vel.is_finite()
    }
}

/// Discrete happenings recorded while integrating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Contact indicator switched -1 -> 0.
    Liftoff,
    /// Contact indicator switched 0 -> -1.
    Touchdown,
    /// The compression stop engaged.
    StopHit,
}

impl EventKind {
    /// Stable lower-case label used in artifact files.
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::Liftoff => "liftoff",
            EventKind::Touchdown => "touchdown",
            EventKind::StopHit => "stop_hit",
        }
    }
}

/// One recorded event, stamped with the first sample time at/after the change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
}

/// Time-ordered samples of one simulation plus its event log.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample spacing [s].
    pub dt: f64,
    /// States at t0, t0 + dt, ..., t0 + n dt.
    pub samples: Vec<PogoState>,
    /// Liftoff / touchdown / stop events in time order.
    pub events: Vec<Event>,
}

impl Trajectory {
    /// Highest rod height reached over the trajectory.
    pub fn apex_height(&self) -> Result<f64, Error> {
        self.samples
            .iter()
            .map(|s| s.height)
            .reduce(f64::max)
            .ok_or(Error::EmptyTrajectory)
    }
}

/// Fixed-step integration window.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    /// Step size [s].
    pub dt: f64,
    /// Horizon [s]; must be a whole number of steps.
    pub t_f: f64,
}

impl SimConfig {
    pub fn new(dt: f64, t_f: f64) -> Result<Self, Error> {
        let cfg = SimConfig { dt, t_f };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig("dt must be positive and finite"));
        }
        if !(self.t_f > 0.0) || !self.t_f.is_finite() {
            return Err(Error::InvalidConfig("t_f must be positive and finite"));
        }
        let steps = self.t_f / self.dt;
        let rounded = libm::round(steps);
        if rounded < 1.0 || (steps - rounded).abs() > 1e-6 * rounded {
            return Err(Error::InvalidConfig("t_f must be a whole number of steps"));
        }
        Ok(())
    }

    /// Number of integration steps over the horizon.
    pub fn n_steps(&self) -> usize {
        libm::round(self.t_f / self.dt) as usize
    }
}

impl Default for SimConfig {
    /// 2 s horizon at 0.1 ms steps: long enough for the jump and several
    /// residual hops, fine enough that halving dt moves the apex < 1e-7 m.
    fn default() -> Self {
        SimConfig { dt: 1e-4, t_f: 2.0 }
    }
}

/// Contact indicator gamma: -1 while the foot loads the spring, 0 in flight.
pub fn contact_indicator(height: f64) -> f64 {
    if height <= 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Precomputed coefficients of the rod acceleration.
struct ForceModel {
    alpha: f64,
    beta: f64,
    damping: f64,
    inv_total_mass: f64,
    actuator_frac: f64,
    gravity: f64,
}

impl ForceModel {
    fn new(params: &DesignParams) -> Self {
        let m_t = params.total_mass();
        ForceModel {
            alpha: params.alpha,
            beta: params.beta,
            damping: params.damping_coefficient(),
            inv_total_mass: 1.0 / m_t,
            actuator_frac: params.actuator_mass / m_t,
            gravity: params.gravity,
        }
    }

    fn accel(&self, height: f64, vel: f64, actuator_accel: f64) -> f64 {
        let reaction = contact_indicator(height)
            * self.inv_total_mass
            * (self.alpha * height + self.beta * height * height * height + self.damping * vel);
        reaction - self.actuator_frac * actuator_accel - self.gravity
    }
}

/// Rod acceleration for a given state and commanded actuator acceleration.
pub fn rod_acceleration(state: &PogoState, actuator_accel: f64, params: &DesignParams) -> f64 {
    ForceModel::new(params).accel(state.height, state.vel, actuator_accel)
}

/// Apply the rigid, perfectly plastic compression stop.
///
/// Positions below the stop are clamped to it and any remaining downward
/// velocity is discarded; upward velocity and states above the stop pass
/// through unchanged.
pub fn enforce_stop(state: PogoState, params: &DesignParams) -> PogoState {
    let limit = -params.compression_limit;
    if state.height < limit {
        PogoState {
            height: limit,
            vel: state.vel.max(0.0),
            ..state
        }
    } else {
        state
    }
}

/// One RK4 step of (height, vel) with the contact indicator re-evaluated at
/// every stage, plus the actuator advanced by closed-form kinematics. No stop.
fn rk4_step(state: &PogoState, command: &JumpCommand, model: &ForceModel, dt: f64) -> PogoState {
    let t = state.t;
    let (x, v) = (state.height, state.vel);

    let u1 = command.accel_at(t);
    let u2 = command.accel_at(t + 0.5 * dt);
    let u4 = command.accel_at(t + dt);

    let k1x = v;
    let k1v = model.accel(x, v, u1);
    let k2x = v + 0.5 * dt * k1v;
    let k2v = model.accel(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v, u2);
    let k3x = v + 0.5 * dt * k2v;
    let k3v = model.accel(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v, u2);
    let k4x = v + dt * k3v;
    let k4v = model.accel(x + dt * k3x, v + dt * k3v, u4);

    let t_next = t + dt;
    let (actuator_pos, actuator_vel) = command.kinematics(t_next);
    PogoState {
        t: t_next,
        height: x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        vel: v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        actuator_pos,
        actuator_vel,
    }
}

/// Advance the state by one step: RK4, then the compression stop.
pub fn integrate_step(
    state: &PogoState,
    command: &JumpCommand,
    params: &DesignParams,
    dt: f64,
) -> Result<PogoState, Error> {
    let model = ForceModel::new(params);
    let raw = rk4_step(state, command, &model, dt);
    // Finiteness is checked before the stop: clamping an infinite state would
    // silently launder a divergence into a plausible-looking one.
    if !raw.is_finite() {
        return Err(Error::NonFiniteState { t: raw.t });
    }
    Ok(enforce_stop(raw, params))
}

/// Simulate from rest on the ground at `x = 0` with the actuator at the
/// command start position.
pub fn simulate(
    params: &DesignParams,
    command: &JumpCommand,
    config: &SimConfig,
) -> Result<Trajectory, Error> {
    let (actuator_pos, actuator_vel) = command.kinematics(0.0);
    let initial = PogoState {
        t: 0.0,
        height: 0.0,
        vel: 0.0,
        actuator_pos,
        actuator_vel,
    };
    simulate_from(initial, params, command, config)
}

/// Simulate from an arbitrary initial state.
///
/// Samples land on `t0 + k dt` exactly; events carry the first sample time at
/// or after the change they record.
pub fn simulate_from(
    initial: PogoState,
    params: &DesignParams,
    command: &JumpCommand,
    config: &SimConfig,
) -> Result<Trajectory, Error> {
    config.validate()?;
    params.validate()?;
    if !initial.is_finite() {
        return Err(Error::NonFiniteState { t: initial.t });
    }

    let model = ForceModel::new(params);
    let dt = config.dt;
    let n_steps = config.n_steps();
    let t0 = initial.t;

    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut events = Vec::new();
    let mut state = initial;
    let mut stopped = state.height <= -params.compression_limit;
    samples.push(state);

    for k in 0..n_steps {
        let raw = rk4_step(&state, command, &model, dt);
        let t_next = t0 + (k + 1) as f64 * dt;
        if !raw.is_finite() {
            return Err(Error::NonFiniteState { t: t_next });
        }
        let hit = raw.height < -params.compression_limit;
        let mut next = enforce_stop(raw, params);
        next.t = t_next;

        let gamma_prev = contact_indicator(state.height);
        let gamma_next = contact_indicator(next.height);
        if gamma_prev == -1.0 && gamma_next == 0.0 {
            events.push(Event { t: next.t, kind: EventKind::Liftoff });
        } else if gamma_prev == 0.0 && gamma_next == -1.0 {
            events.push(Event { t: next.t, kind: EventKind::Touchdown });
        }
        if hit && !stopped {
            events.push(Event { t: next.t, kind: EventKind::StopHit });
        }
        stopped = hit;

        debug_assert!(
            next.actuator_pos >= -1e-9 && next.actuator_pos <= params.stroke_max + 1e-9,
            "commanded actuator left the stroke",
        );

        state = next;
        samples.push(state);
    }

    Ok(Trajectory { dt, samples, events })
}
