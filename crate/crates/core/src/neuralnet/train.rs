use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::model::{argmax, Activation, MlpModel};
use super::AdaMaxState;
use crate::dataset::{Dataset, Normalizer};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seed::{derive_rng, derive_seed, Purpose};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Seeds the train/validation split, per-epoch shuffles and initial weights.
    pub shuffle_seed: u64,
    pub validation_fraction: f64,
    pub hidden_layers: Vec<usize>,
    pub activation: Activation,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-5,
            epochs: 200,
            batch_size: 32,
            shuffle_seed: 0,
            validation_fraction: 0.1,
            hidden_layers: vec![128, 64],
            activation: Activation::Relu,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.epochs == 0 {
            return bad("epochs must be >= 1");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1");
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad("validation_fraction must lie in (0, 1)");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.hidden_layers.iter().any(|&h| h == 0) {
            return bad("hidden layer widths must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// Mean loss over the epoch's mini-batches, each measured before its update.
    pub train_loss: f64,
    /// Share of training samples classified correctly during the epoch.
    pub train_accuracy: f64,
    pub validation_accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct Trained<T> {
    pub model: MlpModel<T>,
    pub metrics: Vec<EpochMetrics>,
    pub validation_indices: Vec<usize>,
}

/// Trains on a dataset; the input layer matches its feature width and the
/// output layer its candidate count.
pub fn train<T: Real>(dataset: &Dataset, config: &TrainConfig) -> Result<Trained<T>> {
    if dataset.samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    train_arrays(&dataset.inputs(), &dataset.labels(), dataset.zeta, dataset.xi, config)
}

/// Trains on raw (unnormalized) feature rows. The normalizer is fitted on
/// the training split only and stored in the returned model.
pub fn train_arrays<T: Real>(
    inputs: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    xi: usize,
    config: &TrainConfig,
) -> Result<Trained<T>> {
    config.validate()?;
    if inputs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if inputs.len() != labels.len() {
        return Err(Error::DimensionMismatch { context: "labels", expected: inputs.len(), found: labels.len() });
    }
    let n = inputs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut derive_rng(config.shuffle_seed, 0, Purpose::Split));
    let n_val = if n < 2 { 0 } else { ((config.validation_fraction * n as f64).round() as usize).clamp(1, n - 1) };
    let validation_indices = order[..n_val].to_vec();
    let train_indices = order[n_val..].to_vec();

    let cast = |row: &Vec<f64>| row.iter().map(|v| T::lit(*v)).collect::<Vec<T>>();
    let raw: Vec<Vec<T>> = inputs.iter().map(cast).collect();
    let normalizer = Normalizer::fit(train_indices.iter().map(|&i| raw[i].as_slice()))?;
    let z: Vec<Vec<T>> = raw.iter().map(|r| normalizer.normalize(r)).collect::<Result<_>>()?;

    let mut sizes = vec![inputs[0].len()];
    sizes.extend_from_slice(&config.hidden_layers);
    sizes.push(n_classes);
    let mut model = MlpModel::<T>::new(&sizes, config.activation, xi, derive_seed(config.shuffle_seed, 0, Purpose::Init))?;
    model.normalizer = normalizer;
    let mut opt = AdaMaxState::new(model.params.len(), T::lit(config.learning_rate));

    let mut metrics = Vec::with_capacity(config.epochs);
    let mut epoch_order = train_indices.clone();
    for epoch in 0..config.epochs {
        epoch_order.copy_from_slice(&train_indices);
        epoch_order.shuffle(&mut derive_rng(config.shuffle_seed, epoch as u64, Purpose::Shuffle));
        let mut loss_sum = 0.0;
        let mut correct = 0;
        for batch in epoch_order.chunks(config.batch_size) {
            let xs: Vec<&[T]> = batch.iter().map(|&i| z[i].as_slice()).collect();
            let ys: Vec<usize> = batch.iter().map(|&i| labels[i]).collect();
            let g = model.backward(&xs, &ys)?;
            opt.step(&mut model.params, &g.grads)?;
            loss_sum += g.loss.as_f64() * batch.len() as f64;
            correct += g.correct;
        }
        let val_correct = validation_indices
            .iter()
            .map(|&i| model.forward(&z[i]).map(|p| (argmax(&p) == labels[i]) as usize))
            .sum::<Result<usize>>()?;
        metrics.push(EpochMetrics {
            epoch,
            train_loss: loss_sum / train_indices.len() as f64,
            train_accuracy: correct as f64 / train_indices.len() as f64,
            validation_accuracy: if n_val == 0 { f64::NAN } else { val_correct as f64 / n_val as f64 },
        });
    }
    Ok(Trained { model, metrics, validation_indices })
}

/// Share of raw feature rows whose predicted class equals the label.
pub fn accuracy<T: Real>(model: &MlpModel<T>, inputs: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    if inputs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut hits = 0;
    for (x, &y) in inputs.iter().zip(labels) {
        let row: Vec<T> = x.iter().map(|v| T::lit(*v)).collect();
        hits += (model.predict(&row)? == y) as usize;
    }
    Ok(hits as f64 / inputs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn separable(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        while xs.len() < n {
            let a: f64 = rng.gen_range(-3.0..3.0);
            let b: f64 = rng.gen_range(-3.0..3.0);
            let margin = a + 0.5 * b;
            if margin.abs() < 0.3 {
                continue;
            }
            xs.push(vec![10.0 * a + 4.0, b]);
            ys.push((margin > 0.0) as usize);
        }
        (xs, ys)
    }

    #[test]
    fn separable_toy_is_learned() {
        let (xs, ys) = separable(400, 1);
        let cfg = TrainConfig {
            learning_rate: 0.02,
            epochs: 60,
            batch_size: 32,
            hidden_layers: vec![8, 8],
            ..TrainConfig::default()
        };
        let out = train_arrays::<f64>(&xs, &ys, 2, 0, &cfg).unwrap();
        let train_idx: Vec<usize> = (0..xs.len()).filter(|i| !out.validation_indices.contains(i)).collect();
        let tx: Vec<Vec<f64>> = train_idx.iter().map(|&i| xs[i].clone()).collect();
        let ty: Vec<usize> = train_idx.iter().map(|&i| ys[i]).collect();
        assert_eq!(accuracy(&out.model, &tx, &ty).unwrap(), 1.0);
        assert_eq!(out.metrics.len(), 60);
    }

    #[test]
    fn identical_seeds_are_bit_identical() {
        let (xs, ys) = separable(300, 2);
        let cfg = TrainConfig { learning_rate: 0.01, epochs: 5, batch_size: 16, hidden_layers: vec![6, 4], ..Default::default() };
        let a = train_arrays::<f64>(&xs, &ys, 2, 0, &cfg).unwrap();
        let b = train_arrays::<f64>(&xs, &ys, 2, 0, &cfg).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.metrics, b.metrics);
        let c = train_arrays::<f64>(&xs, &ys, 2, 0, &TrainConfig { shuffle_seed: 1, ..cfg }).unwrap();
        assert_ne!(a.model.params, c.model.params);
    }

    #[test]
    fn full_batch_loss_never_increases() {
        // one linear hidden unit: logistic regression in disguise
        let (xs, ys) = separable(200, 3);
        let cfg = TrainConfig {
            learning_rate: 1e-3,
            epochs: 300,
            batch_size: 10_000,
            hidden_layers: vec![1],
            activation: Activation::Linear,
            ..Default::default()
        };
        let out = train_arrays::<f64>(&xs, &ys, 2, 0, &cfg).unwrap();
        for w in out.metrics.windows(2) {
            assert!(w[1].train_loss <= w[0].train_loss + 1e-9, "{} -> {}", w[0].train_loss, w[1].train_loss);
        }
        assert!(out.metrics.last().unwrap().train_loss < out.metrics[0].train_loss);
    }

    #[test]
    fn single_precision_training_runs() {
        let (xs, ys) = separable(200, 4);
        let cfg = TrainConfig { learning_rate: 0.02, epochs: 30, batch_size: 32, hidden_layers: vec![8], ..Default::default() };
        let out = train_arrays::<f32>(&xs, &ys, 2, 0, &cfg).unwrap();
        assert!(accuracy(&out.model, &xs, &ys).unwrap() > 0.95);
    }

    #[test]
    fn rejects_bad_config_and_empty_data() {
        let (xs, ys) = separable(10, 5);
        let bad = TrainConfig { validation_fraction: 1.0, ..Default::default() };
        assert!(matches!(train_arrays::<f64>(&xs, &ys, 2, 0, &bad), Err(Error::InvalidConfig(_))));
        let bad = TrainConfig { epochs: 0, ..Default::default() };
        assert!(train_arrays::<f64>(&xs, &ys, 2, 0, &bad).is_err());
        assert!(matches!(train_arrays::<f64>(&[], &[], 2, 0, &TrainConfig::default()), Err(Error::EmptyDataset)));
        let empty = Dataset::new(2, 0, String::new(), 0);
        assert!(matches!(train::<f64>(&empty, &TrainConfig::default()), Err(Error::EmptyDataset)));
    }
}
