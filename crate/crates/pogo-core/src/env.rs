//! One-step design environment: an action picks a (spring constant, damping
//! ratio) pair as an offset from the nominal design, one full jump is
//! simulated, and the reward scores the resulting trajectory. Every episode is
//! terminal — this is a contextual bandit over the design box, not a temporal
//! control problem.

use alloc::vec;
use alloc::vec::Vec;

use crate::command::JumpCommand;
use crate::error::Error;
use crate::params::DesignParams;
use crate::sim::{simulate, SimConfig, Trajectory};
use crate::td3::{EnvStep, Environment};

/// Rectangular design box around a nominal (spring constant, damping ratio).
///
/// Actions are offsets of up to ±0.9× the nominal in each coordinate, and
/// realized designs are clamped to [0.1, 1.9]× the nominal — the clamp only
/// bites for actions outside the cube the learner is supposed to emit.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DesignSpace {
    pub alpha_nominal: f64,
    pub zeta_nominal: f64,
}

/// Fraction of the nominal reachable on either side.
pub const DESIGN_SPAN: f64 = 0.9;

impl DesignSpace {
    pub fn new(alpha_nominal: f64, zeta_nominal: f64) -> Result<Self, Error> {
        if !(alpha_nominal > 0.0 && alpha_nominal.is_finite())
            || !(zeta_nominal > 0.0 && zeta_nominal.is_finite())
        {
            return Err(Error::InvalidConfig("design nominals must be positive and finite"));
        }
        Ok(DesignSpace { alpha_nominal, zeta_nominal })
    }

    /// Box around the lightly damped nominal design.
    pub fn narrow() -> Self {
        DesignSpace {
            alpha_nominal: crate::params::ALPHA_NOMINAL,
            zeta_nominal: crate::params::ZETA_NOMINAL_NARROW,
        }
    }

    /// Box around the heavily damped nominal design.
    pub fn broad() -> Self {
        DesignSpace {
            alpha_nominal: crate::params::ALPHA_NOMINAL,
            zeta_nominal: crate::params::ZETA_NOMINAL_BROAD,
        }
    }

    /// Physical half-width of each action dimension.
    pub fn action_bounds(&self) -> Vec<f64> {
        vec![DESIGN_SPAN * self.alpha_nominal, DESIGN_SPAN * self.zeta_nominal]
    }

    pub fn alpha_range(&self) -> (f64, f64) {
        ((1.0 - DESIGN_SPAN) * self.alpha_nominal, (1.0 + DESIGN_SPAN) * self.alpha_nominal)
    }

    pub fn zeta_range(&self) -> (f64, f64) {
        ((1.0 - DESIGN_SPAN) * self.zeta_nominal, (1.0 + DESIGN_SPAN) * self.zeta_nominal)
    }

    /// Map an action (offsets from nominal) to a realized design, clamped to
    /// the box.
    pub fn design_from_action(&self, action: &[f64]) -> (f64, f64) {
        let (a_lo, a_hi) = self.alpha_range();
        let (z_lo, z_hi) = self.zeta_range();
        let alpha = (self.alpha_nominal + action[0]).clamp(a_lo, a_hi);
        let zeta = (self.zeta_nominal + action[1]).clamp(z_lo, z_hi);
        (alpha, zeta)
    }
}

/// Trajectory summary fed to the learner: plain sums of each state component
/// over every sample. The learner divides by the sample count (via
/// [`Environment::obs_scale`]), turning them into trajectory means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub sum_height: f64,
    pub sum_vel: f64,
    pub sum_actuator_pos: f64,
    pub sum_actuator_vel: f64,
}

impl Observation {
    pub fn zeros() -> Self {
        Observation { sum_height: 0.0, sum_vel: 0.0, sum_actuator_pos: 0.0, sum_actuator_vel: 0.0 }
    }

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.sum_height, self.sum_vel, self.sum_actuator_pos, self.sum_actuator_vel]
    }
}

/// Sum each state component over the whole trajectory.
pub fn observe(traj: &Trajectory) -> Observation {
    let mut obs = Observation::zeros();
    for s in &traj.samples {
        obs.sum_height += s.height;
        obs.sum_vel += s.vel;
        obs.sum_actuator_pos += s.actuator_pos;
        obs.sum_actuator_vel += s.actuator_vel;
    }
    obs
}

/// Jump-as-high-as-possible score: the apex height itself.
pub fn reward_max_height(traj: &Trajectory) -> Result<f64, Error> {
    traj.apex_height()
}

/// Jump-exactly-this-high score, peaking at 1 when the apex meets the target:
/// `1 / (|apex - target| / target + 1)`.
pub fn reward_specified_height(traj: &Trajectory, target: f64) -> Result<f64, Error> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidTarget { target });
    }
    let apex = traj.apex_height()?;
    Ok(1.0 / ((apex - target).abs() / target + 1.0))
}

/// Which of the two scores an environment hands out.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RewardKind {
    MaxHeight,
    SpecifiedHeight { target: f64 },
}

impl RewardKind {
    pub fn score(&self, traj: &Trajectory) -> Result<f64, Error> {
        match *self {
            RewardKind::MaxHeight => reward_max_height(traj),
            RewardKind::SpecifiedHeight { target } => reward_specified_height(traj, target),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if let RewardKind::SpecifiedHeight { target } = *self {
            if !(target > 0.0 && target.is_finite()) {
                return Err(Error::InvalidTarget { target });
            }
        }
        Ok(())
    }
}

/// What one episode realized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeOutcome {
    pub alpha: f64,
    pub zeta: f64,
    pub apex: f64,
    pub reward: f64,
}

/// The bandit environment: fixed platform (masses, limits, gravity), fixed
/// jump command, one design evaluated per episode.
#[derive(Debug, Clone)]
pub struct DesignEnv {
    pub space: DesignSpace,
    pub base: DesignParams,
    pub command: JumpCommand,
    pub sim: SimConfig,
    pub reward: RewardKind,
    /// Every episode this environment has run, in order.
    pub outcomes: Vec<EpisodeOutcome>,
}

impl DesignEnv {
    pub fn new(
        space: DesignSpace,
        base: DesignParams,
        command: JumpCommand,
        sim: SimConfig,
        reward: RewardKind,
    ) -> Result<Self, Error> {
        base.validate()?;
        sim.validate()?;
        reward.validate()?;
        Ok(DesignEnv { space, base, command, sim, reward, outcomes: Vec::new() })
    }

    /// Simulate one design and score it. Stateless: does not touch
    /// [`DesignEnv::outcomes`].
    pub fn evaluate(&self, alpha: f64, zeta: f64) -> Result<EpisodeOutcome, Error> {
        let params = self.base.with_design(alpha, zeta);
        let traj = simulate(&params, &self.command, &self.sim)?;
        let apex = traj.apex_height()?;
        let reward = self.reward.score(&traj)?;
        Ok(EpisodeOutcome { alpha, zeta, apex, reward })
    }

    /// Run one action through the design map, simulation, and reward.
    pub fn episode(&self, action: &[f64]) -> Result<(Observation, EpisodeOutcome), Error> {
        let (alpha, zeta) = self.space.design_from_action(action);
        let params = self.base.with_design(alpha, zeta);
        let traj = simulate(&params, &self.command, &self.sim)?;
        let obs = observe(&traj);
        let apex = traj.apex_height()?;
        let reward = self.reward.score(&traj)?;
        Ok((obs, EpisodeOutcome { alpha, zeta, apex, reward }))
    }
}

impl Environment for DesignEnv {
    fn obs_dim(&self) -> usize {
        4
    }

    fn action_dim(&self) -> usize {
        2
    }

    fn action_bounds(&self) -> Vec<f64> {
        self.space.action_bounds()
    }

    /// Raw observations are sums over `n_steps + 1` samples; this turns them
    /// into means of order one.
    fn obs_scale(&self) -> f64 {
        1.0 / (self.sim.n_steps() + 1) as f64
    }

    fn reset(&mut self) -> Vec<f64> {
        Observation::zeros().to_vec()
    }

    fn step(&mut self, action: &[f64]) -> Result<EnvStep, Error> {
        let (obs, outcome) = self.episode(action)?;
        self.outcomes.push(outcome);
        Ok(EnvStep { obs: obs.to_vec(), reward: outcome.reward, done: true })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::command::CommandGeometry;
    use crate::params::{ALPHA_NOMINAL, ZETA_NOMINAL_BROAD, ZETA_NOMINAL_NARROW};
    use crate::sim::PogoState;
    use proptest::prelude::*;

    fn test_env(reward: RewardKind) -> DesignEnv {
        let base = DesignParams::nominal(ZETA_NOMINAL_NARROW);
        let geometry = CommandGeometry::full_stroke(&base, 0.075);
        let command = JumpCommand::new(&base, geometry).unwrap();
        // Short window keeps unit tests quick; the jump completes well within.
        let sim = SimConfig::new(1e-4, 0.5).unwrap();
        DesignEnv::new(DesignSpace::narrow(), base, command, sim, reward).unwrap()
    }

    #[test]
    fn named_spaces_use_the_nominal_designs() {
        let n = DesignSpace::narrow();
        assert_eq!(n.alpha_nominal, ALPHA_NOMINAL);
        assert_eq!(n.zeta_nominal, ZETA_NOMINAL_NARROW);
        let b = DesignSpace::broad();
        assert_eq!(b.zeta_nominal, ZETA_NOMINAL_BROAD);
    }

    #[test]
    fn action_bounds_are_ninety_percent_of_nominal() {
        let s = DesignSpace::narrow();
        assert_eq!(s.action_bounds(), vec![0.9 * ALPHA_NOMINAL, 0.9 * ZETA_NOMINAL_NARROW]);
    }

    #[test]
    fn zero_action_is_the_nominal_design() {
        let s = DesignSpace::broad();
        assert_eq!(s.design_from_action(&[0.0, 0.0]), (ALPHA_NOMINAL, ZETA_NOMINAL_BROAD));
    }

    #[test]
    fn out_of_cube_actions_clamp_to_the_box() {
        let s = DesignSpace::narrow();
        let (alpha, zeta) = s.design_from_action(&[1e9, -1.0]);
        assert_eq!(alpha, s.alpha_range().1);
        assert_eq!(zeta, s.zeta_range().0);
        assert!((alpha - 1.9 * ALPHA_NOMINAL).abs() < 1e-9);
        assert!((zeta - 0.1 * ZETA_NOMINAL_NARROW).abs() < 1e-12);
    }

    #[test]
    fn degenerate_nominals_are_rejected() {
        assert!(DesignSpace::new(0.0, 0.01).is_err());
        assert!(DesignSpace::new(5760.0, f64::NAN).is_err());
        assert!(DesignSpace::new(5760.0, -0.01).is_err());
    }

    #[test]
    fn observation_sums_each_component() {
        let mk = |h: f64, v: f64, ap: f64, av: f64| PogoState {
            t: 0.0,
            height: h,
            vel: v,
            actuator_pos: ap,
            actuator_vel: av,
        };
        let traj = Trajectory {
            dt: 0.1,
            samples: vec![mk(1.0, 2.0, 3.0, 4.0), mk(10.0, 20.0, 30.0, 40.0)],
            events: vec![],
        };
        let obs = observe(&traj);
        assert_eq!(obs.sum_height, 11.0);
        assert_eq!(obs.sum_vel, 22.0);
        assert_eq!(obs.sum_actuator_pos, 33.0);
        assert_eq!(obs.sum_actuator_vel, 44.0);
    }

    #[test]
    fn specified_height_reward_peaks_at_the_target() {
        let mk = |h: f64| PogoState { t: 0.0, height: h, vel: 0.0, actuator_pos: 0.0, actuator_vel: 0.0 };
        let traj = |apex: f64| Trajectory { dt: 0.1, samples: vec![mk(0.0), mk(apex)], events: vec![] };
        assert_eq!(reward_specified_height(&traj(0.01), 0.01).unwrap(), 1.0);
        // Exactly half a target away on either side: 1 / (0.5 + 1).
        let r_hi = reward_specified_height(&traj(0.015), 0.01).unwrap();
        let r_lo = reward_specified_height(&traj(0.005), 0.01).unwrap();
        assert!((r_hi - 2.0 / 3.0).abs() < 1e-15);
        assert!((r_lo - 2.0 / 3.0).abs() < 1e-15);
        // Farther off scores lower.
        assert!(reward_specified_height(&traj(0.02), 0.01).unwrap() < r_hi);
    }

    #[test]
    fn nonpositive_targets_are_invalid() {
        let mk = |h: f64| PogoState { t: 0.0, height: h, vel: 0.0, actuator_pos: 0.0, actuator_vel: 0.0 };
        let traj = Trajectory { dt: 0.1, samples: vec![mk(0.01)], events: vec![] };
        assert!(matches!(
            reward_specified_height(&traj, 0.0),
            Err(Error::InvalidTarget { .. })
        ));
        assert!(reward_specified_height(&traj, -1.0).is_err());
        assert!(RewardKind::SpecifiedHeight { target: 0.0 }.validate().is_err());
        assert!(RewardKind::MaxHeight.validate().is_ok());
    }

    #[test]
    fn nominal_episode_jumps_and_scores_its_apex() {
        let env = test_env(RewardKind::MaxHeight);
        let (obs, outcome) = env.episode(&[0.0, 0.0]).unwrap();
        assert_eq!(outcome.alpha, ALPHA_NOMINAL);
        assert_eq!(outcome.zeta, ZETA_NOMINAL_NARROW);
        assert!(outcome.apex > 0.005, "apex {} too low for a real jump", outcome.apex);
        assert_eq!(outcome.reward, outcome.apex);
        // The rod spends real time airborne, so the height sum is positive.
        assert!(obs.sum_height > 0.0);
    }

    #[test]
    fn episode_matches_direct_evaluation_bitwise() {
        let env = test_env(RewardKind::MaxHeight);
        let (_, from_action) = env.episode(&[100.0, 0.002]).unwrap();
        let direct = env
            .evaluate(ALPHA_NOMINAL + 100.0, ZETA_NOMINAL_NARROW + 0.002)
            .unwrap();
        assert_eq!(from_action, direct);
    }

    #[test]
    fn environment_steps_record_outcomes_and_terminate() {
        let mut env = test_env(RewardKind::SpecifiedHeight { target: 0.01 });
        assert_eq!(env.obs_dim(), 4);
        assert_eq!(env.action_dim(), 2);
        assert_eq!(env.reset(), vec![0.0; 4]);
        let step = env.step(&[0.0, 0.0]).unwrap();
        assert!(step.done);
        assert!(step.reward > 0.0 && step.reward <= 1.0);
        assert_eq!(env.outcomes.len(), 1);
        assert_eq!(env.outcomes[0].reward, step.reward);
    }

    #[test]
    fn obs_scale_turns_sums_into_means() {
        let env = test_env(RewardKind::MaxHeight);
        let n_samples = env.sim.n_steps() + 1;
        assert_eq!(env.obs_scale(), 1.0 / n_samples as f64);
        let (obs, _) = env.episode(&[0.0, 0.0]).unwrap();
        let mean_height = obs.sum_height * env.obs_scale();
        // A mean height far above the apex would mean the sum is wrong.
        assert!(mean_height > 0.0 && mean_height < 0.05);
    }

    proptest! {
        #[test]
        fn realized_designs_stay_in_the_box(
            da in -2.0f64..2.0,
            dz in -2.0f64..2.0,
        ) {
            let s = DesignSpace::narrow();
            let bounds = s.action_bounds();
            let (alpha, zeta) = s.design_from_action(&[da * bounds[0], dz * bounds[1]]);
            let (a_lo, a_hi) = s.alpha_range();
            let (z_lo, z_hi) = s.zeta_range();
            prop_assert!(alpha >= a_lo && alpha <= a_hi);
            prop_assert!(zeta >= z_lo && zeta <= z_hi);
        }
    }
}
