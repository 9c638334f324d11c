//! Crate-wide error type.

use core::fmt;

/// Everything that can go wrong across the simulation, command, environment,
/// learner, and sweep layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A state component became non-finite during integration; carries the time.
    NonFiniteState { t: f64 },
    /// An operation needed at least one trajectory sample.
    EmptyTrajectory,
    /// A commanded actuator phase would exceed the velocity or acceleration limit.
    SaturationViolation { peak: f64, limit: f64 },
    /// The commanded actuator motion leaves the stroke range.
    StrokeViolation { excursion: f64, stroke_max: f64 },
    /// Command geometry is unusable (non-positive stroke delta, negative pause, ...).
    InvalidCommand(&'static str),
    /// A specified-height target must be positive.
    InvalidTarget { target: f64 },
    /// Replay buffer holds fewer transitions than one batch.
    BufferUnderflow { len: usize, batch: usize },
    /// Design parameters or simulation config violate their invariants.
    InvalidConfig(&'static str),
    /// A design grid is malformed or outside the realizable design box.
    InvalidGrid(&'static str),
    /// A sweep cell diverged; identifies the offending design.
    SweepCellDiverged { alpha: f64, zeta: f64, t: f64 },
    /// A serialized network snapshot has the wrong version tag or shape.
    MalformedSnapshot(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFiniteState { t } => {
                write!(f, "state became non-finite at t = {t}")
            }
            Error::EmptyTrajectory => write!(f, "trajectory has no samples"),
            Error::SaturationViolation { peak, limit } => {
                write!(f, "commanded peak {peak} exceeds actuator limit {limit}")
            }
            Error::StrokeViolation { excursion, stroke_max } => {
                write!(f, "commanded excursion {excursion} leaves stroke [0, {stroke_max}]")
            }
            Error::InvalidCommand(why) => write!(f, "invalid command geometry: {why}"),
            Error::InvalidTarget { target } => {
                write!(f, "target height must be positive, got {target}")
            }
            Error::BufferUnderflow { len, batch } => {
                write!(f, "replay buffer holds {len} transitions, batch needs {batch}")
            }
            Error::InvalidConfig(why) => write!(f, "invalid configuration: {why}"),
            Error::InvalidGrid(why) => write!(f, "invalid design grid: {why}"),
            Error::SweepCellDiverged { alpha, zeta, t } => {
                write!(f, "sweep cell (alpha = {alpha}, zeta = {zeta}) diverged at t = {t}")
            }
            Error::MalformedSnapshot(why) => write!(f, "malformed network snapshot: {why}"),
        }
    }
}

impl core::error::Error for Error {}
