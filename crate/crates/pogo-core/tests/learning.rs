//! Learner checks that cross module boundaries: analytic gradients against
//! finite differences at realistic network shapes, convergence on a toy
//! bandit, and full training runs through the jump physics.

use pogo_core::command::{CommandGeometry, JumpCommand};
use pogo_core::env::{DesignEnv, DesignSpace, RewardKind};
use pogo_core::mlp::{gradient_check, Mlp};
use pogo_core::params::ZETA_NOMINAL_NARROW;
use pogo_core::td3::{train_run, Environment, QuadraticBandit, Td3Config};
use pogo_core::{DesignParams, SimConfig};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn design_env(reward: RewardKind) -> DesignEnv {
    let base = DesignParams::nominal(ZETA_NOMINAL_NARROW);
    let geometry = CommandGeometry::full_stroke(&base, 0.075);
    let command = JumpCommand::new(&base, geometry).unwrap();
    let sim = SimConfig::new(1e-4, 0.5).unwrap();
    DesignEnv::new(DesignSpace::narrow(), base, command, sim, reward).unwrap()
}

#[test]
fn gradients_match_finite_differences_at_working_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    // Actor shape: 4 observations in, 2 action pre-activations out.
    let mut actor = Mlp::new(&[4, 64, 64, 2], &mut rng);
    let obs = [0.012, -0.4, 0.0041, 0.13];
    let err = gradient_check(&mut actor, &obs, &[0.5, -0.25]);
    assert!(err <= 1e-5, "actor-shaped gradient error {err:e}");

    // Critic shape: 4 observations + 2 actions in, scalar value out.
    let mut critic = Mlp::new(&[6, 64, 64, 1], &mut rng);
    let input = [0.012, -0.4, 0.0041, 0.13, 0.7, -0.2];
    let err = gradient_check(&mut critic, &input, &[0.3]);
    assert!(err <= 1e-5, "critic-shaped gradient error {err:e}");
}

#[test]
fn bandit_training_finds_the_peak_within_the_episode_budget() {
    let mut env = QuadraticBandit::new(vec![0.3, -0.2], vec![1.0, 1.0], 4);
    let out = train_run(&mut env, Td3Config::default(), 1000).unwrap();
    let a = out.agent.policy_action(&[0.0; 4]);
    let dist = ((a[0] - 0.3).powi(2) + (a[1] + 0.2).powi(2)).sqrt();
    assert!(dist < 0.05, "policy ended at ({}, {}), {dist} from the peak", a[0], a[1]);
}

#[test]
fn training_through_the_physics_records_sane_episodes() {
    let mut env = design_env(RewardKind::MaxHeight);
    let episodes = 140;
    let out = train_run(&mut env, Td3Config::default(), episodes).unwrap();

    assert_eq!(out.records.len(), episodes);
    assert_eq!(env.outcomes.len(), episodes);
    let bounds = env.action_bounds();
    for (r, o) in out.records.iter().zip(&env.outcomes) {
        assert!(r.reward.is_finite() && r.reward >= 0.0);
        assert_eq!(r.reward, o.reward);
        assert!(r.action[0].abs() <= bounds[0] + 1e-9);
        assert!(r.action[1].abs() <= bounds[1] + 1e-9);
        // Losses appear exactly when training is active.
        if r.episode < 100 {
            assert!(r.critic_loss.is_nan());
        } else {
            assert!(r.critic_loss.is_finite());
        }
    }

    // The final deterministic policy proposes a design inside the box.
    let action = out.agent.policy_action(&[0.0; 4]);
    let (alpha, zeta) = env.space.design_from_action(&action);
    let (a_lo, a_hi) = env.space.alpha_range();
    let (z_lo, z_hi) = env.space.zeta_range();
    assert!(alpha >= a_lo && alpha <= a_hi);
    assert!(zeta >= z_lo && zeta <= z_hi);
}

#[test]
fn physics_training_is_deterministic_end_to_end() {
    let run = |seed: u64| {
        let mut env = design_env(RewardKind::SpecifiedHeight { target: 0.01 });
        let cfg = Td3Config { seed, ..Td3Config::default() };
        let out = train_run(&mut env, cfg, 120).unwrap();
        (out.agent.snapshot_text(), env.outcomes)
    };
    let (snap_a, out_a) = run(5);
    let (snap_b, out_b) = run(5);
    assert_eq!(snap_a, snap_b);
    assert_eq!(out_a, out_b);

    let (snap_c, _) = run(6);
    assert_ne!(snap_a, snap_c);
}
