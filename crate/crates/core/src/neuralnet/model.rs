use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Normalizer;
use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, Real};

/// Hidden-layer nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Linear,
}

impl Activation {
    #[inline]
    fn apply<T: Real>(self, z: T) -> T {
        match self {
            Activation::Relu => z.max(T::zero()),
            Activation::Tanh => z.tanh(),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the activation output `a`.
    #[inline]
    fn derivative<T: Real>(self, a: T) -> T {
        match self {
            Activation::Relu => {
                if a > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Tanh => T::one() - a * a,
            Activation::Linear => T::one(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Linear => "linear",
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            "linear" => Ok(Activation::Linear),
            other => Err(Error::InvalidConfig(format!("unknown activation `{other}`"))),
        }
    }
}

/// Probabilities are floored here before taking the log.
pub const PROB_FLOOR: f64 = 1e-30;

pub fn cross_entropy<T: Real>(probs: &[T], label: usize) -> T {
    -probs[label].max(T::lit(PROB_FLOOR)).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel<T> {
    /// Number of candidates (equals the output width).
    pub zeta: usize,
    /// Interferers per candidate row in the feature layout.
    pub xi: usize,
    /// `[input, hidden..., output]`
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
    pub params: Vec<T>,
    pub normalizer: Normalizer<T>,
}

/// Mean gradient and loss over a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchGradient<T> {
    pub grads: Vec<T>,
    pub loss: T,
    /// Samples whose argmax matched the label before the update.
    pub correct: usize,
}

/// Samples per parallel work unit. Partial sums are combined in chunk order,
/// so results do not depend on the thread count.
const CHUNK: usize = 32;

impl<T: Real> MlpModel<T> {
    /// Glorot-uniform weights, zero biases, identity normalizer.
    pub fn new(layer_sizes: &[usize], activation: Activation, xi: usize, seed: u64) -> Result<Self> {
        if layer_sizes.len() < 2 || layer_sizes.iter().any(|&n| n == 0) {
            return Err(Error::InvalidConfig(format!("bad layer sizes {layer_sizes:?}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Vec::with_capacity(param_count(layer_sizes));
        for w in layer_sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            params.extend((0..fan_in * fan_out).map(|_| T::lit(rng.gen_range(-limit..limit))));
            params.extend(std::iter::repeat(T::zero()).take(fan_out));
        }
        let input = layer_sizes[0];
        Ok(Self {
            zeta: *layer_sizes.last().unwrap(),
            xi,
            layer_sizes: layer_sizes.to_vec(),
            activation,
            params,
            normalizer: Normalizer { means: vec![T::zero(); input], stds: vec![T::one(); input] },
        })
    }

    pub fn input_width(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn n_classes(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn n_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    /// Offset of layer `k`'s weights in `params`.
    fn offset(&self, k: usize) -> usize {
        self.layer_sizes.windows(2).take(k).map(|w| w[0] * w[1] + w[1]).sum()
    }

    /// `(weights, biases)` of layer `k`.
    pub fn layer(&self, k: usize) -> (&[T], &[T]) {
        let (n_in, n_out) = (self.layer_sizes[k], self.layer_sizes[k + 1]);
        let o = self.offset(k);
        let (w, rest) = self.params[o..].split_at(n_in * n_out);
        (w, &rest[..n_out])
    }

    pub fn layer_mut(&mut self, k: usize) -> (&mut [T], &mut [T]) {
        let (n_in, n_out) = (self.layer_sizes[k], self.layer_sizes[k + 1]);
        let o = self.offset(k);
        let (w, rest) = self.params[o..].split_at_mut(n_in * n_out);
        (w, &mut rest[..n_out])
    }

    fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.input_width() {
            return Err(Error::DimensionMismatch { context: "network input", expected: self.input_width(), found: x.len() });
        }
        Ok(())
    }

    /// Activations of every layer; the last entry holds the output logits.
    fn activations(&self, x: &[T]) -> Vec<Vec<T>> {
        let mut acts: Vec<Vec<T>> = Vec::with_capacity(self.layer_sizes.len());
        acts.push(x.to_vec());
        let last = self.n_layers() - 1;
        for k in 0..self.n_layers() {
            let (w, b) = self.layer(k);
            let n_in = self.layer_sizes[k];
            let prev = &acts[k];
            let mut z: Vec<T> = b.iter().zip(w.chunks_exact(n_in)).map(|(bi, row)| *bi + dot(row, prev)).collect();
            if k < last {
                z.iter_mut().for_each(|v| *v = self.activation.apply(*v));
            }
            acts.push(z);
        }
        acts
    }

    /// Output-layer logits for an already-normalized input.
    pub fn logits(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_input(x)?;
        Ok(self.activations(x).pop().unwrap())
    }

    /// Class probabilities for an already-normalized input.
    pub fn forward(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(softmax(&self.logits(x)?))
    }

    /// Probabilities for a raw feature vector, normalized with the stored stats.
    pub fn predict_proba(&self, raw: &[T]) -> Result<Vec<T>> {
        self.forward(&self.normalizer.normalize(raw)?)
    }

    /// Most probable class for a raw feature vector; lowest index wins ties.
    pub fn predict(&self, raw: &[T]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(raw)?))
    }

    /// Mean cross-entropy gradient over a batch of normalized inputs.
    pub fn backward(&self, inputs: &[&[T]], labels: &[usize]) -> Result<BatchGradient<T>> {
        if inputs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if inputs.len() != labels.len() {
            return Err(Error::DimensionMismatch { context: "batch labels", expected: inputs.len(), found: labels.len() });
        }
        for (x, &y) in inputs.iter().zip(labels) {
            self.check_input(x)?;
            if y >= self.n_classes() {
                return Err(Error::DimensionMismatch { context: "label", expected: self.n_classes(), found: y });
            }
        }
        let partials: Vec<BatchGradient<T>> = inputs
            .par_chunks(CHUNK)
            .zip(labels.par_chunks(CHUNK))
            .map(|(xs, ys)| self.chunk_gradient(xs, ys))
            .collect();

        let mut total = BatchGradient { grads: vec![T::zero(); self.params.len()], loss: T::zero(), correct: 0 };
        for p in &partials {
            axpy(T::one(), &p.grads, &mut total.grads);
            total.loss = total.loss + p.loss;
            total.correct += p.correct;
        }
        let n = T::from_usize(inputs.len()).unwrap();
        total.grads.iter_mut().for_each(|g| *g = *g / n);
        total.loss = total.loss / n;
        Ok(total)
    }

    /// Summed (not averaged) gradient over a few samples.
    fn chunk_gradient(&self, xs: &[&[T]], ys: &[usize]) -> BatchGradient<T> {
        let mut grads = vec![T::zero(); self.params.len()];
        let mut loss = T::zero();
        let mut correct = 0;
        let n_layers = self.n_layers();
        let offsets: Vec<usize> = (0..n_layers).map(|k| self.offset(k)).collect();

        for (x, &y) in xs.iter().zip(ys) {
            let acts = self.activations(x);
            let probs = softmax(&acts[n_layers]);
            loss = loss + cross_entropy(&probs, y);
            correct += (argmax(&probs) == y) as usize;

            let mut delta = probs;
            delta[y] = delta[y] - T::one();
            for k in (0..n_layers).rev() {
                let (n_in, n_out) = (self.layer_sizes[k], self.layer_sizes[k + 1]);
                let prev = &acts[k];
                let o = offsets[k];
                {
                    let (gw, gb) = grads[o..o + n_in * n_out + n_out].split_at_mut(n_in * n_out);
                    for (j, d) in delta.iter().enumerate() {
                        if *d != T::zero() {
                            axpy(*d, prev, &mut gw[j * n_in..(j + 1) * n_in]);
                        }
                        gb[j] = gb[j] + *d;
                    }
                }
                if k == 0 {
                    break;
                }
                let (w, _) = self.layer(k);
                let mut back = vec![T::zero(); n_in];
                for (j, d) in delta.iter().enumerate() {
                    if *d != T::zero() {
                        axpy(*d, &w[j * n_in..(j + 1) * n_in], &mut back);
                    }
                }
                for (b, a) in back.iter_mut().zip(prev) {
                    *b = *b * self.activation.derivative(*a);
                }
                delta = back;
            }
        }
        BatchGradient { grads, loss, correct }
    }

    /// Mean loss over a batch of normalized inputs without gradients.
    pub fn mean_loss(&self, inputs: &[&[T]], labels: &[usize]) -> Result<T> {
        let mut total = T::zero();
        for (x, &y) in inputs.iter().zip(labels) {
            total = total + cross_entropy(&self.forward(x)?, y);
        }
        Ok(total / T::from_usize(inputs.len().max(1)).unwrap())
    }

    /// Same architecture and values in another scalar type.
    pub fn cast<U: Real>(&self) -> MlpModel<U> {
        MlpModel {
            zeta: self.zeta,
            xi: self.xi,
            layer_sizes: self.layer_sizes.clone(),
            activation: self.activation,
            params: self.params.iter().map(|p| U::lit(p.as_f64())).collect(),
            normalizer: self.normalizer.cast(),
        }
    }
}

pub fn param_count(layer_sizes: &[usize]) -> usize {
    layer_sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

/// Numerically stable softmax.
pub fn softmax<T: Real>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|z| (*z - max).exp()).collect();
    let sum: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Index of the largest value; first wins ties.
pub fn argmax<T: Real>(v: &[T]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}
