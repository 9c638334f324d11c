//! TOML experiment configuration: which design box and reward to train on,
//! the jump command geometry, the integration window, and the learner
//! hyperparameters. One file fully determines a run except for the seed list
//! entry each worker picks up.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use pogo_core::command::{CommandGeometry, JumpCommand};
use pogo_core::env::{DesignEnv, DesignSpace, RewardKind};
use pogo_core::params::{DesignParams, ZETA_NOMINAL_BROAD, ZETA_NOMINAL_NARROW};
use pogo_core::td3::Td3Config;
use pogo_core::SimConfig;

/// Which nominal design box to search around.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceName {
    Narrow,
    Broad,
}

/// Which score the environment hands out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardName {
    MaxHeight,
    SpecifiedHeight,
}

/// Learner hyperparameters as they appear in the config file. The seed is
/// deliberately absent: it comes from the experiment's seed list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSection {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub learning_starts: usize,
    pub batch_size: usize,
    pub tau: f64,
    pub discount: f64,
    pub train_freq: usize,
    pub gradient_steps: usize,
    pub policy_delay: usize,
    pub target_noise_std: f64,
    pub target_noise_clip: f64,
    pub replay_capacity: usize,
}

impl Default for LearnerSection {
    fn default() -> Self {
        let d = Td3Config::default();
        LearnerSection {
            hidden: d.hidden,
            learning_rate: d.learning_rate,
            learning_starts: d.learning_starts,
            batch_size: d.batch_size,
            tau: d.tau,
            discount: d.discount,
            train_freq: d.train_freq,
            gradient_steps: d.gradient_steps,
            policy_delay: d.policy_delay,
            target_noise_std: d.target_noise_std,
            target_noise_clip: d.target_noise_clip,
            replay_capacity: d.replay_capacity,
        }
    }
}

impl LearnerSection {
    pub fn to_td3(&self, seed: u64) -> Td3Config {
        Td3Config {
            hidden: self.hidden.clone(),
            learning_rate: self.learning_rate,
            learning_starts: self.learning_starts,
            batch_size: self.batch_size,
            tau: self.tau,
            discount: self.discount,
            train_freq: self.train_freq,
            gradient_steps: self.gradient_steps,
            policy_delay: self.policy_delay,
            target_noise_std: self.target_noise_std,
            target_noise_clip: self.target_noise_clip,
            replay_capacity: self.replay_capacity,
            seed,
        }
    }
}

/// Everything one experiment needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub space: SpaceName,
    pub reward: RewardName,
    /// Target apex for the specified-height reward [m].
    pub target_height: f64,
    /// Training episodes per seed.
    pub episodes: usize,
    pub seeds: Vec<u64>,
    /// Worker threads for multi-seed training and sweeps.
    pub workers: usize,
    pub command: CommandGeometry,
    pub sim: SimConfig,
    pub td3: LearnerSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let base = DesignParams::nominal(ZETA_NOMINAL_NARROW);
        ExperimentConfig {
            space: SpaceName::Narrow,
            reward: RewardName::MaxHeight,
            target_height: 0.01,
            episodes: 1000,
            seeds: (0..10).collect(),
            workers: 1,
            command: CommandGeometry::full_stroke(&base, 0.075),
            sim: SimConfig::default(),
            td3: LearnerSection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.td3.to_td3(0).validate()?;
        self.reward_kind().validate()?;
        if self.seeds.is_empty() {
            anyhow::bail!("the seed list is empty");
        }
        if self.workers == 0 {
            anyhow::bail!("workers must be at least 1");
        }
        // The command must be realizable on the platform.
        let _ = self.jump_command()?;
        Ok(())
    }

    /// Platform constants with the chosen box's nominal design.
    pub fn base_params(&self) -> DesignParams {
        match self.space {
            SpaceName::Narrow => DesignParams::nominal(ZETA_NOMINAL_NARROW),
            SpaceName::Broad => DesignParams::nominal(ZETA_NOMINAL_BROAD),
        }
    }

    pub fn design_space(&self) -> DesignSpace {
        match self.space {
            SpaceName::Narrow => DesignSpace::narrow(),
            SpaceName::Broad => DesignSpace::broad(),
        }
    }

    pub fn reward_kind(&self) -> RewardKind {
        match self.reward {
            RewardName::MaxHeight => RewardKind::MaxHeight,
            RewardName::SpecifiedHeight => RewardKind::SpecifiedHeight { target: self.target_height },
        }
    }

    pub fn jump_command(&self) -> Result<JumpCommand> {
        JumpCommand::new(&self.base_params(), self.command)
            .context("the configured jump command is not realizable")
    }

    pub fn design_env(&self) -> Result<DesignEnv> {
        Ok(DesignEnv::new(
            self.design_space(),
            self.base_params(),
            self.jump_command()?,
            self.sim,
            self.reward_kind(),
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn committed_default_config_matches_the_builtin_defaults() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("config/default.toml");
        let loaded = ExperimentConfig::load(&path).unwrap();
        assert_eq!(loaded, ExperimentConfig::default());
    }

    #[test]
    fn toml_round_trip_preserves_the_config() {
        let mut config = ExperimentConfig::default();
        config.space = SpaceName::Broad;
        config.reward = RewardName::SpecifiedHeight;
        config.seeds = vec![3, 5];
        let text = toml::to_string_pretty(&config).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut config = ExperimentConfig::default();
        config.seeds.clear();
        assert!(config.validate().is_err());

        let mut config = ExperimentConfig::default();
        config.workers = 0;
        assert!(config.validate().is_err());

        let mut config = ExperimentConfig::default();
        config.reward = RewardName::SpecifiedHeight;
        config.target_height = -0.01;
        assert!(config.validate().is_err());

        let mut config = ExperimentConfig::default();
        config.command.accel_mag = 1e9;
        assert!(config.validate().is_err(), "a saturating command must be rejected");
    }

    #[test]
    fn the_two_spaces_pick_their_nominal_damping() {
        let mut config = ExperimentConfig::default();
        config.space = SpaceName::Narrow;
        assert_eq!(config.base_params().zeta, ZETA_NOMINAL_NARROW);
        config.space = SpaceName::Broad;
        assert_eq!(config.base_params().zeta, ZETA_NOMINAL_BROAD);
        assert_eq!(config.design_space().zeta_nominal, ZETA_NOMINAL_BROAD);
    }
}
