//! Minimal dense network machinery for the learner: an f64 MLP with ReLU
//! hidden layers, reverse-mode gradients, Adam, and a finite-difference
//! gradient check.
//!
//! Everything is plain `Vec<f64>` math; the networks involved are a few
//! thousand parameters, far below the point where a tensor library would pay
//! for itself.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::Error;

/// One dense layer, weights row-major `[out_dim x in_dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub in_dim: usize,
    pub out_dim: usize,
}

impl Layer {
    /// Uniform init in +-1/sqrt(in_dim) for weights *and* biases. The nonzero
    /// bias init matters here: the design environment observes all-zero state
    /// sums at reset, and zero biases would silence every ReLU unit on that
    /// input.
    fn init<R: Rng>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let bound = 1.0 / libm::sqrt(in_dim as f64);
        let mut weights = Vec::with_capacity(in_dim * out_dim);
        for _ in 0..in_dim * out_dim {
            weights.push(rng.gen_range(-bound..bound));
        }
        let mut biases = Vec::with_capacity(out_dim);
        for _ in 0..out_dim {
            biases.push(rng.gen_range(-bound..bound));
        }
        Layer { weights, biases, in_dim, out_dim }
    }
}

/// Fully connected ReLU network; the output layer is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Layer>,
}

/// Post-activation values of every layer for one forward pass; index 0 is the
/// input itself.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub activations: Vec<Vec<f64>>,
}

impl ForwardTrace {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("trace holds at least the input")
    }
}

/// Per-layer gradient accumulator matching an [`Mlp`]'s shape.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Gradients {
            weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            biases: net.layers.iter().map(|l| vec![0.0; l.biases.len()]).collect(),
        }
    }

    pub fn reset(&mut self) {
        for w in &mut self.weights {
            w.fill(0.0);
        }
        for b in &mut self.biases {
            b.fill(0.0);
        }
    }
}

impl Mlp {
    /// Build with the given layer widths, e.g. `[4, 64, 64, 2]`.
    pub fn new<R: Rng>(dims: &[usize], rng: &mut R) -> Self {
        assert!(dims.len() >= 2, "network needs input and output dims");
        let layers = dims
            .windows(2)
            .map(|w| Layer::init(w[0], w[1], rng))
            .collect();
        Mlp { layers }
    }

    /// Shrink the output layer (weights and biases); used to start the actor
    /// near the zero action.
    pub fn scale_output_layer(&mut self, factor: f64) {
        let last = self.layers.last_mut().expect("at least one layer");
        for w in &mut last.weights {
            *w *= factor;
        }
        for b in &mut last.biases {
            *b *= factor;
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().expect("at least one layer").in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("at least one layer").out_dim
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    /// Forward pass returning only the output.
    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        let mut x = input.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut y = vec![0.0; layer.out_dim];
            for (j, yj) in y.iter_mut().enumerate() {
                let row = &layer.weights[j * layer.in_dim..(j + 1) * layer.in_dim];
                let mut acc = layer.biases[j];
                for (w, xi) in row.iter().zip(&x) {
                    acc += w * xi;
                }
                *yj = if i < last { acc.max(0.0) } else { acc };
            }
            x = y;
        }
        x
    }

    /// Forward pass keeping every activation for a later backward pass.
    pub fn forward_trace(&self, input: &[f64]) -> ForwardTrace {
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(input.to_vec());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let x = &activations[i];
            let mut y = vec![0.0; layer.out_dim];
            for (j, yj) in y.iter_mut().enumerate() {
                let row = &layer.weights[j * layer.in_dim..(j + 1) * layer.in_dim];
                let mut acc = layer.biases[j];
                for (w, xi) in row.iter().zip(x) {
                    acc += w * xi;
                }
                *yj = if i < last { acc.max(0.0) } else { acc };
            }
            activations.push(y);
        }
        ForwardTrace { activations }
    }

    /// Accumulate parameter gradients for one sample and return the loss
    /// gradient with respect to the input.
    ///
    /// `grad_output` is dL/d(output); ReLU derivatives are taken as 0 at the
    /// kink (activation == 0).
    pub fn backward(
        &self,
        trace: &ForwardTrace,
        grad_output: &[f64],
        grads: &mut Gradients,
    ) -> Vec<f64> {
        let mut delta = grad_output.to_vec();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let x = &trace.activations[i];
            let gw = &mut grads.weights[i];
            let gb = &mut grads.biases[i];
            let mut grad_input = vec![0.0; layer.in_dim];
            for (j, dj) in delta.iter().enumerate() {
                gb[j] += dj;
                let row = j * layer.in_dim;
                for (k, xi) in x.iter().enumerate() {
                    gw[row + k] += dj * xi;
                    grad_input[k] += layer.weights[row + k] * dj;
                }
            }
            if i > 0 {
                // Gate through the producing layer's ReLU.
                for (g, a) in grad_input.iter_mut().zip(&trace.activations[i]) {
                    if *a <= 0.0 {
                        *g = 0.0;
                    }
                }
            }
            delta = grad_input;
        }
        delta
    }

    /// Loss gradient with respect to the input only, leaving parameters alone.
    /// Same chain as [`Mlp::backward`] minus the parameter accumulation.
    pub fn input_gradient(&self, trace: &ForwardTrace, grad_output: &[f64]) -> Vec<f64> {
        let mut delta = grad_output.to_vec();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let mut grad_input = vec![0.0; layer.in_dim];
            for (j, dj) in delta.iter().enumerate() {
                let row = j * layer.in_dim;
                for (k, g) in grad_input.iter_mut().enumerate() {
                    *g += layer.weights[row + k] * dj;
                }
            }
            if i > 0 {
                for (g, a) in grad_input.iter_mut().zip(&trace.activations[i]) {
                    if *a <= 0.0 {
                        *g = 0.0;
                    }
                }
            }
            delta = grad_input;
        }
        delta
    }

    /// Polyak average `self <- tau * online + (1 - tau) * self`.
    pub fn soft_update_from(&mut self, online: &Mlp, tau: f64) {
        for (t, o) in self.layers.iter_mut().zip(&online.layers) {
            for (tw, ow) in t.weights.iter_mut().zip(&o.weights) {
                *tw += tau * (ow - *tw);
            }
            for (tb, ob) in t.biases.iter_mut().zip(&o.biases) {
                *tb += tau * (ob - *tb);
            }
        }
    }

    /// Serialize as a version-tagged plain-text snapshot: a `mlp v1` header,
    /// the layer widths, then one weights line and one biases line per layer
    /// (row-major, 17 significant digits).
    pub fn to_text(&self) -> String {
        let mut out = String::from("mlp v1\n");
        out.push_str(&format!("{}", self.input_dim()));
        for l in &self.layers {
            out.push_str(&format!(" {}", l.out_dim));
        }
        out.push('\n');
        for l in &self.layers {
            push_floats(&mut out, &l.weights);
            push_floats(&mut out, &l.biases);
        }
        out
    }

    /// Parse a [`Mlp::to_text`] snapshot.
    pub fn from_text(text: &str) -> Result<Self, Error> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("mlp v1") {
            return Err(Error::MalformedSnapshot("expected `mlp v1` header"));
        }
        let dims: Vec<usize> = lines
            .next()
            .ok_or(Error::MalformedSnapshot("missing layer widths"))?
            .split_whitespace()
            .map(|tok| tok.parse().map_err(|_| Error::MalformedSnapshot("bad layer width")))
            .collect::<Result<_, _>>()?;
        if dims.len() < 2 {
            return Err(Error::MalformedSnapshot("need at least two layer widths"));
        }
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for w in dims.windows(2) {
            let (in_dim, out_dim) = (w[0], w[1]);
            let weights = parse_floats(lines.next(), in_dim * out_dim)?;
            let biases = parse_floats(lines.next(), out_dim)?;
            layers.push(Layer { weights, biases, in_dim, out_dim });
        }
        Ok(Mlp { layers })
    }
}

fn push_floats(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&format!("{v:.16e}"));
    }
    out.push('\n');
}

fn parse_floats(line: Option<&str>, expect: usize) -> Result<Vec<f64>, Error> {
    let line = line.ok_or(Error::MalformedSnapshot("missing parameter line"))?;
    let values: Vec<f64> = line
        .split_whitespace()
        .map(|tok| tok.parse().map_err(|_| Error::MalformedSnapshot("bad float")))
        .collect::<Result<_, _>>()?;
    if values.len() != expect {
        return Err(Error::MalformedSnapshot("parameter line has wrong length"));
    }
    Ok(values)
}

/// Adam optimizer state for one [`Mlp`].
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: u64,
    m_weights: Vec<Vec<f64>>,
    v_weights: Vec<Vec<f64>>,
    m_biases: Vec<Vec<f64>>,
    v_biases: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(net: &Mlp, lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m_weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            v_weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            m_biases: net.layers.iter().map(|l| vec![0.0; l.biases.len()]).collect(),
            v_biases: net.layers.iter().map(|l| vec![0.0; l.biases.len()]).collect(),
        }
    }

    pub fn apply(&mut self, net: &mut Mlp, grads: &Gradients) {
        self.step += 1;
        let bc1 = 1.0 - libm::pow(self.beta1, self.step as f64);
        let bc2 = 1.0 - libm::pow(self.beta2, self.step as f64);
        for (i, layer) in net.layers.iter_mut().enumerate() {
            adam_update(
                &mut layer.weights,
                &grads.weights[i],
                &mut self.m_weights[i],
                &mut self.v_weights[i],
                self.lr, self.beta1, self.beta2, self.eps, bc1, bc2,
            );
            adam_update(
                &mut layer.biases,
                &grads.biases[i],
                &mut self.m_biases[i],
                &mut self.v_biases[i],
                self.lr, self.beta1, self.beta2, self.eps, bc1, bc2,
            );
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn adam_update(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    bc1: f64,
    bc2: f64,
) {
    for i in 0..params.len() {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        params[i] -= lr * m_hat / (libm::sqrt(v_hat) + eps);
    }
}

/// Compare analytic gradients of the squared-error loss
/// `L = 1/2 sum (net(input) - target)^2` against central finite differences.
///
/// Returns the maximum relative error over all parameters, with the
/// denominator floored at 1e-3 so finite-difference roundoff on near-zero
/// gradients cannot dominate.
pub fn gradient_check(net: &mut Mlp, input: &[f64], target: &[f64]) -> f64 {
    let h = 1e-6;
    let trace = net.forward_trace(input);
    let grad_out: Vec<f64> = trace.output().iter().zip(target).map(|(y, t)| y - t).collect();
    let mut grads = Gradients::zeros_like(net);
    net.backward(&trace, &grad_out, &mut grads);

    let loss = |net: &Mlp| -> f64 {
        net.forward(input)
            .iter()
            .zip(target)
            .map(|(y, t)| 0.5 * (y - t) * (y - t))
            .sum()
    };

    let mut max_rel = 0.0f64;
    for li in 0..net.layers.len() {
        let n_w = net.layers[li].weights.len();
        for k in 0..n_w {
            let orig = net.layers[li].weights[k];
            net.layers[li].weights[k] = orig + h;
            let plus = loss(net);
            net.layers[li].weights[k] = orig - h;
            let minus = loss(net);
            net.layers[li].weights[k] = orig;
            let numeric = (plus - minus) / (2.0 * h);
            let analytic = grads.weights[li][k];
            let rel = (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-3);
            max_rel = max_rel.max(rel);
        }
        let n_b = net.layers[li].biases.len();
        for k in 0..n_b {
            let orig = net.layers[li].biases[k];
            net.layers[li].biases[k] = orig + h;
            let plus = loss(net);
            net.layers[li].biases[k] = orig - h;
            let minus = loss(net);
            net.layers[li].biases[k] = orig;
            let numeric = (plus - minus) / (2.0 * h);
            let analytic = grads.biases[li][k];
            let rel = (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-3);
            max_rel = max_rel.max(rel);
        }
    }
    max_rel
}
