//! From-scratch TD3 for one-step design episodes: clipped double Q-learning,
//! delayed policy updates, and target-policy smoothing over the hand-rolled
//! [`Mlp`](crate::mlp::Mlp) stack.
//!
//! The learner works in a normalized action cube: the actor emits `tanh`
//! outputs in [-1, 1] per dimension, scaled by the per-dimension bounds only at
//! the environment boundary. Critics consume normalized actions, replay stores
//! normalized actions, and smoothing noise lives in normalized units — the raw
//! action dimensions here differ by five orders of magnitude, which would
//! otherwise drown the critic.
//!
//! One seeded ChaCha8 generator drives a run. Draw order: network
//! initialization (actor, critic A, critic B; per layer weights row-major then
//! biases), then per rollout episode one uniform in [-1, 1] per action
//! dimension, then per training step `batch_size` uniform indices followed by
//! one Box-Muller pair per sampled transition per two action dimensions.
//! Policy-phase action selection draws nothing (there is no exploration
//! noise).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::mlp::{Adam, Gradients, Mlp};

/// What an environment must provide to be trained on.
///
/// Episodes are one step long in this crate (`done` is always true for the
/// design environment), but the learner does not rely on that.
pub trait Environment {
    fn obs_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    /// Physical half-width of each action dimension; actions live in
    /// `[-bound, +bound]` per dimension.
    fn action_bounds(&self) -> Vec<f64>;
    /// Factor the learner applies to raw observations before they touch
    /// networks or the replay buffer.
    fn obs_scale(&self) -> f64 {
        1.0
    }
    /// Start an episode, returning the raw initial observation.
    fn reset(&mut self) -> Vec<f64>;
    /// Apply a physical action.
    fn step(&mut self, action: &[f64]) -> Result<EnvStep, Error>;
}

/// Result of one environment step (raw observation).
#[derive(Debug, Clone)]
pub struct EnvStep {
    pub obs: Vec<f64>,
    pub reward: f64,
    pub done: bool,
}

/// One stored interaction; observations scaled, action normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub obs: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_obs: Vec<f64>,
    pub done: bool,
}

/// Fixed-capacity FIFO replay store with uniform sampling (with replacement).
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Transition>,
    write_at: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer { capacity, items: Vec::new(), write_at: 0 }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Insert, overwriting the oldest transition once full.
    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.write_at] = t;
        }
        self.write_at = (self.write_at + 1) % self.capacity;
    }

    pub fn get(&self, index: usize) -> &Transition {
        &self.items[index]
    }

    /// Uniform indices with replacement.
    pub fn sample_indices<R: Rng>(&self, rng: &mut R, batch: usize) -> Result<Vec<usize>, Error> {
        if self.items.len() < batch {
            return Err(Error::BufferUnderflow { len: self.items.len(), batch });
        }
        Ok((0..batch).map(|_| rng.gen_range(0..self.items.len())).collect())
    }
}

/// Hyperparameters. Defaults follow the reference configuration used by the
/// experiments (two 64-unit hidden layers, Adam 1e-3, batch 100, tau 0.005,
/// discount 0.99, one gradient step per episode, policy delayed 1:2, target
/// noise 0.2 clipped at 0.5, no exploration noise, replay capacity 1000).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Td3Config {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    /// Episodes acted uniformly at random before any training.
    pub learning_starts: usize,
    pub batch_size: usize,
    /// Polyak averaging rate for target networks.
    pub tau: f64,
    pub discount: f64,
    /// Episodes between training rounds.
    pub train_freq: usize,
    /// Gradient steps per training round.
    pub gradient_steps: usize,
    /// Actor (and target) updates happen every `policy_delay`-th gradient step.
    pub policy_delay: usize,
    /// Target-policy smoothing noise, standard deviation in normalized units.
    pub target_noise_std: f64,
    /// Symmetric clip applied to the smoothing noise, normalized units.
    pub target_noise_clip: f64,
    pub replay_capacity: usize,
    pub seed: u64,
}

impl Default for Td3Config {
    fn default() -> Self {
        Td3Config {
            hidden: vec![64, 64],
            learning_rate: 1e-3,
            learning_starts: 100,
            batch_size: 100,
            tau: 0.005,
            discount: 0.99,
            train_freq: 1,
            gradient_steps: 1,
            policy_delay: 2,
            target_noise_std: 0.2,
            target_noise_clip: 0.5,
            replay_capacity: 1000,
            seed: 0,
        }
    }
}

impl Td3Config {
    pub fn validate(&self) -> Result<(), Error> {
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err(Error::InvalidConfig("hidden layers must be non-empty and positive"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig("learning_rate must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be positive"));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::InvalidConfig("tau must lie in (0, 1]"));
        }
        if !(self.discount >= 0.0 && self.discount <= 1.0) {
            return Err(Error::InvalidConfig("discount must lie in [0, 1]"));
        }
        if self.train_freq == 0 || self.gradient_steps == 0 || self.policy_delay == 0 {
            return Err(Error::InvalidConfig("train_freq, gradient_steps, policy_delay must be positive"));
        }
        if !(self.target_noise_std >= 0.0) || !(self.target_noise_clip >= 0.0) {
            return Err(Error::InvalidConfig("noise std and clip must be nonnegative"));
        }
        if self.replay_capacity < self.batch_size {
            return Err(Error::InvalidConfig("replay_capacity must hold at least one batch"));
        }
        Ok(())
    }
}

/// Policy network plus its output scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct Actor {
    pub net: Mlp,
    pub bounds: Vec<f64>,
}

impl Actor {
    /// `tanh` squashed action in the normalized cube.
    pub fn normalized_action(&self, obs: &[f64]) -> Vec<f64> {
        self.net.forward(obs).iter().map(|&z| libm::tanh(z)).collect()
    }

    /// Physical action: bounds ⊙ tanh(net(obs)).
    pub fn select(&self, obs: &[f64]) -> Vec<f64> {
        self.normalized_action(obs)
            .iter()
            .zip(&self.bounds)
            .map(|(a, b)| a * b)
            .collect()
    }
}

/// Q-network over concatenated (observation, normalized action).
#[derive(Debug, Clone, PartialEq)]
pub struct Critic {
    pub net: Mlp,
}

impl Critic {
    pub fn value(&self, obs: &[f64], action: &[f64]) -> f64 {
        let mut input = Vec::with_capacity(obs.len() + action.len());
        input.extend_from_slice(obs);
        input.extend_from_slice(action);
        self.net.forward(&input)[0]
    }
}

/// Diagnostics from one gradient step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainDiag {
    /// Mean of the two critics' MSE losses.
    pub critic_loss: f64,
    /// Present only on delayed (actor-updating) steps: mean of -Q.
    pub actor_loss: Option<f64>,
}

/// The agent: twin critics, delayed actor, target copies, one RNG.
#[derive(Debug, Clone)]
pub struct Td3 {
    pub config: Td3Config,
    pub actor: Actor,
    pub critic_a: Critic,
    pub critic_b: Critic,
    pub target_actor: Actor,
    pub target_critic_a: Critic,
    pub target_critic_b: Critic,
    pub buffer: ReplayBuffer,
    opt_actor: Adam,
    opt_critic_a: Adam,
    opt_critic_b: Adam,
    rng: ChaCha8Rng,
    obs_dim: usize,
    action_dim: usize,
    update_count: u64,
}

impl Td3 {
    pub fn new(obs_dim: usize, action_dim: usize, bounds: Vec<f64>, config: Td3Config) -> Result<Self, Error> {
        config.validate()?;
        if bounds.len() != action_dim || bounds.iter().any(|b| !(*b > 0.0)) {
            return Err(Error::InvalidConfig("action bounds must be positive, one per dimension"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

        let mut actor_dims = vec![obs_dim];
        actor_dims.extend_from_slice(&config.hidden);
        actor_dims.push(action_dim);
        let mut critic_dims = vec![obs_dim + action_dim];
        critic_dims.extend_from_slice(&config.hidden);
        critic_dims.push(1);

        let mut actor_net = Mlp::new(&actor_dims, &mut rng);
        // Start the policy near the zero action (the nominal design) so early
        // critic noise cannot fling it across the design box.
        actor_net.scale_output_layer(1e-3);
        let critic_a = Critic { net: Mlp::new(&critic_dims, &mut rng) };
        let critic_b = Critic { net: Mlp::new(&critic_dims, &mut rng) };
        let actor = Actor { net: actor_net, bounds };

        let opt_actor = Adam::new(&actor.net, config.learning_rate);
        let opt_critic_a = Adam::new(&critic_a.net, config.learning_rate);
        let opt_critic_b = Adam::new(&critic_b.net, config.learning_rate);
        let buffer = ReplayBuffer::new(config.replay_capacity);

        Ok(Td3 {
            target_actor: actor.clone(),
            target_critic_a: critic_a.clone(),
            target_critic_b: critic_b.clone(),
            actor,
            critic_a,
            critic_b,
            buffer,
            opt_actor,
            opt_critic_a,
            opt_critic_b,
            rng,
            obs_dim,
            action_dim,
            update_count: 0,
            config,
        })
    }

    /// Uniform normalized action in [-1, 1] per dimension (rollout phase).
    pub fn exploration_action(&mut self) -> Vec<f64> {
        (0..self.action_dim).map(|_| self.rng.gen_range(-1.0..1.0)).collect()
    }

    /// Deterministic physical action of the current policy.
    pub fn policy_action(&self, obs: &[f64]) -> Vec<f64> {
        self.actor.select(obs)
    }

    /// Smoothed target actions and TD targets for a sampled batch.
    fn td_targets(&mut self, indices: &[usize]) -> Vec<f64> {
        let cfg = &self.config;
        let mut targets = Vec::with_capacity(indices.len());
        for &i in indices {
            let tr = self.buffer.get(i);
            let mut a = self.target_actor.normalized_action(&tr.next_obs);
            let mut d = 0;
            while d < a.len() {
                let (z0, z1) = gauss_pair(&mut self.rng);
                a[d] = smooth(a[d], z0, cfg.target_noise_std, cfg.target_noise_clip);
                if d + 1 < a.len() {
                    a[d + 1] = smooth(a[d + 1], z1, cfg.target_noise_std, cfg.target_noise_clip);
                }
                d += 2;
            }
            let q = self
                .target_critic_a
                .value(&tr.next_obs, &a)
                .min(self.target_critic_b.value(&tr.next_obs, &a));
            let alive = if tr.done { 0.0 } else { 1.0 };
            targets.push(tr.reward + cfg.discount * alive * q);
        }
        targets
    }

    /// One gradient step: both critics on the TD targets, then (every
    /// `policy_delay`-th call) the actor and all three target networks.
    pub fn train_step(&mut self) -> Result<TrainDiag, Error> {
        let batch = self.config.batch_size;
        let indices = self.buffer.sample_indices(&mut self.rng, batch)?;
        let targets = self.td_targets(&indices);

        let loss_a = self.critic_step(true, &indices, &targets);
        let loss_b = self.critic_step(false, &indices, &targets);
        self.update_count += 1;

        let mut actor_loss = None;
        if self.update_count.is_multiple_of(self.config.policy_delay as u64) {
            actor_loss = Some(self.actor_step(&indices));
            let tau = self.config.tau;
            self.target_actor.net.soft_update_from(&self.actor.net, tau);
            self.target_critic_a.net.soft_update_from(&self.critic_a.net, tau);
            self.target_critic_b.net.soft_update_from(&self.critic_b.net, tau);
        }

        Ok(TrainDiag { critic_loss: 0.5 * (loss_a + loss_b), actor_loss })
    }

    fn critic_step(&mut self, first: bool, indices: &[usize], targets: &[f64]) -> f64 {
        let critic = if first { &self.critic_a } else { &self.critic_b };
        let mut grads = Gradients::zeros_like(&critic.net);
        let inv_batch = 1.0 / indices.len() as f64;
        let mut loss = 0.0;
        let mut input = vec![0.0; self.obs_dim + self.action_dim];
        for (&i, &y) in indices.iter().zip(targets) {
            let tr = self.buffer.get(i);
            input[..self.obs_dim].copy_from_slice(&tr.obs);
            input[self.obs_dim..].copy_from_slice(&tr.action);
            let trace = critic.net.forward_trace(&input);
            let err = trace.output()[0] - y;
            loss += err * err * inv_batch;
            critic.net.backward(&trace, &[2.0 * err * inv_batch], &mut grads);
        }
        if first {
            self.opt_critic_a.apply(&mut self.critic_a.net, &grads);
        } else {
            self.opt_critic_b.apply(&mut self.critic_b.net, &grads);
        }
        loss
    }

    fn actor_step(&mut self, indices: &[usize]) -> f64 {
        let mut grads = Gradients::zeros_like(&self.actor.net);
        let inv_batch = 1.0 / indices.len() as f64;
        let mut loss = 0.0;
        let mut input = vec![0.0; self.obs_dim + self.action_dim];
        for &i in indices {
            let tr = self.buffer.get(i);
            let trace = self.actor.net.forward_trace(&tr.obs);
            let a: Vec<f64> = trace.output().iter().map(|&z| libm::tanh(z)).collect();
            input[..self.obs_dim].copy_from_slice(&tr.obs);
            input[self.obs_dim..].copy_from_slice(&a);
            let ctrace = self.critic_a.net.forward_trace(&input);
            loss -= ctrace.output()[0] * inv_batch;
            let dq_dinput = self.critic_a.net.input_gradient(&ctrace, &[1.0]);
            // dL/dz = -(1/batch) dQ/da * (1 - tanh^2)
            let dz: Vec<f64> = a
                .iter()
                .zip(&dq_dinput[self.obs_dim..])
                .map(|(ai, g)| -inv_batch * g * (1.0 - ai * ai))
                .collect();
            self.actor.net.backward(&trace, &dz, &mut grads);
        }
        self.opt_actor.apply(&mut self.actor.net, &grads);
        loss
    }

    /// Version-tagged plain-text snapshot of all six networks plus the action
    /// bounds.
    pub fn snapshot_text(&self) -> String {
        let mut out = String::from("td3 v1\nbounds");
        for b in &self.actor.bounds {
            out.push_str(&format!(" {b:.16e}"));
        }
        out.push('\n');
        let sections = [
            ("actor", &self.actor.net),
            ("critic_a", &self.critic_a.net),
            ("critic_b", &self.critic_b.net),
            ("target_actor", &self.target_actor.net),
            ("target_critic_a", &self.target_critic_a.net),
            ("target_critic_b", &self.target_critic_b.net),
        ];
        for (name, net) in sections {
            out.push_str(name);
            out.push('\n');
            out.push_str(&net.to_text());
        }
        out
    }
}

/// Networks recovered from a [`Td3::snapshot_text`] dump.
#[derive(Debug, Clone, PartialEq)]
pub struct Td3Snapshot {
    pub bounds: Vec<f64>,
    pub actor: Mlp,
    pub critic_a: Mlp,
    pub critic_b: Mlp,
    pub target_actor: Mlp,
    pub target_critic_a: Mlp,
    pub target_critic_b: Mlp,
}

impl Td3Snapshot {
    pub fn from_text(text: &str) -> Result<Self, Error> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("td3 v1") {
            return Err(Error::MalformedSnapshot("expected `td3 v1` header"));
        }
        let bounds_line = lines.next().ok_or(Error::MalformedSnapshot("missing bounds"))?;
        let mut toks = bounds_line.split_whitespace();
        if toks.next() != Some("bounds") {
            return Err(Error::MalformedSnapshot("expected bounds line"));
        }
        let bounds: Vec<f64> = toks
            .map(|t| t.parse().map_err(|_| Error::MalformedSnapshot("bad bound")))
            .collect::<Result<_, _>>()?;

        let mut nets = Vec::new();
        for expected in [
            "actor",
            "critic_a",
            "critic_b",
            "target_actor",
            "target_critic_a",
            "target_critic_b",
        ] {
            if lines.next().map(str::trim) != Some(expected) {
                return Err(Error::MalformedSnapshot("missing network section"));
            }
            let header = lines.next().ok_or(Error::MalformedSnapshot("missing mlp header"))?;
            let widths = lines.next().ok_or(Error::MalformedSnapshot("missing layer widths"))?;
            let n_layers = widths.split_whitespace().count().saturating_sub(1);
            let mut section = String::new();
            section.push_str(header);
            section.push('\n');
            section.push_str(widths);
            section.push('\n');
            for _ in 0..2 * n_layers {
                let line = lines.next().ok_or(Error::MalformedSnapshot("missing parameter line"))?;
                section.push_str(line);
                section.push('\n');
            }
            nets.push(Mlp::from_text(&section)?);
        }
        let mut it = nets.into_iter();
        Ok(Td3Snapshot {
            bounds,
            actor: it.next().unwrap(),
            critic_a: it.next().unwrap(),
            critic_b: it.next().unwrap(),
            target_actor: it.next().unwrap(),
            target_critic_a: it.next().unwrap(),
            target_critic_b: it.next().unwrap(),
        })
    }
}

/// One training episode as logged.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub episode: usize,
    /// Physical action taken.
    pub action: Vec<f64>,
    pub reward: f64,
    /// NaN before training starts.
    pub critic_loss: f64,
    /// NaN on steps without an actor update.
    pub actor_loss: f64,
}

/// Everything a finished run hands back.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub records: Vec<EpisodeRecord>,
    pub agent: Td3,
}

/// Run the standard loop: `learning_starts` uniform episodes, then policy
/// episodes with one training round per `train_freq` episodes.
pub fn train_run<E: Environment>(
    env: &mut E,
    config: Td3Config,
    episodes: usize,
) -> Result<TrainOutcome, Error> {
    let bounds = env.action_bounds();
    let mut agent = Td3::new(env.obs_dim(), env.action_dim(), bounds.clone(), config)?;
    let scale = env.obs_scale();
    let mut records = Vec::with_capacity(episodes);

    for episode in 0..episodes {
        let mut obs = env.reset();
        scale_in_place(&mut obs, scale);

        let exploring = episode < agent.config.learning_starts;
        let action_norm = if exploring {
            agent.exploration_action()
        } else {
            agent.actor.normalized_action(&obs)
        };
        let action_phys: Vec<f64> =
            action_norm.iter().zip(&bounds).map(|(a, b)| a * b).collect();

        let step = env.step(&action_phys)?;
        let mut next_obs = step.obs;
        scale_in_place(&mut next_obs, scale);
        agent.buffer.push(Transition {
            obs,
            action: action_norm,
            reward: step.reward,
            next_obs,
            done: step.done,
        });

        let mut critic_loss = f64::NAN;
        let mut actor_loss = f64::NAN;
        let starts = agent.config.learning_starts;
        if episode >= starts && (episode - starts) % agent.config.train_freq == 0 {
            for _ in 0..agent.config.gradient_steps {
                let diag = agent.train_step()?;
                critic_loss = diag.critic_loss;
                if let Some(l) = diag.actor_loss {
                    actor_loss = l;
                }
            }
        }

        records.push(EpisodeRecord {
            episode,
            action: action_phys,
            reward: step.reward,
            critic_loss,
            actor_loss,
        });
    }

    Ok(TrainOutcome { records, agent })
}

fn scale_in_place(values: &mut [f64], factor: f64) {
    for v in values {
        *v *= factor;
    }
}

fn smooth(a: f64, z: f64, std: f64, clip: f64) -> f64 {
    let noise = (std * z).clamp(-clip, clip);
    (a + noise).clamp(-1.0, 1.0)
}

/// Standard normal pair via Box-Muller; consumes exactly two uniforms.
fn gauss_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    let r = libm::sqrt(-2.0 * libm::log(u1));
    let theta = 2.0 * core::f64::consts::PI * u2;
    (r * libm::cos(theta), r * libm::sin(theta))
}

/// Toy one-step environment with a quadratic reward peak; exercises the full
/// learner without any physics.
#[derive(Debug, Clone)]
pub struct QuadraticBandit {
    pub optimum: Vec<f64>,
    pub bounds: Vec<f64>,
    pub obs_dim: usize,
}

impl QuadraticBandit {
    pub fn new(optimum: Vec<f64>, bounds: Vec<f64>, obs_dim: usize) -> Self {
        QuadraticBandit { optimum, bounds, obs_dim }
    }
}

impl Environment for QuadraticBandit {
    fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    fn action_dim(&self) -> usize {
        self.optimum.len()
    }

    fn action_bounds(&self) -> Vec<f64> {
        self.bounds.clone()
    }

    fn reset(&mut self) -> Vec<f64> {
        vec![0.0; self.obs_dim]
    }

    fn step(&mut self, action: &[f64]) -> Result<EnvStep, Error> {
        let dist2: f64 = action
            .iter()
            .zip(&self.optimum)
            .map(|(a, o)| (a - o) * (a - o))
            .sum();
        Ok(EnvStep { obs: vec![0.0; self.obs_dim], reward: 1.0 - dist2, done: true })
    }
}
