//! Feed-forward network trained by backpropagation with online gradient
//! descent, a three-way data split, validation-based early stopping and
//! MSE / regression-R reporting.
//!
//! The network is strictly feed-forward (no recurrent connections).
//! Hidden layers use the logistic sigmoid; the output layer is sigmoid by
//! default with a linear option. Training is per-sample: forward pass,
//! exact gradient by backpropagation, then `w <- w - lr * grad`. Every
//! epoch the three split MSEs are recorded; training stops once the
//! validation MSE has not improved for `patience` consecutive epochs and
//! the best-epoch weights are restored. Independent restarts rerun the
//! whole loop from different derived seeds and keep the best result.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq)]
pub enum MlpError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation needs a non-empty sample set")]
    EmptyData,
    #[error("network needs at least two layers with positive sizes")]
    BadArchitecture,
    #[error("cannot split {n} samples into fractions {fractions:?}")]
    SplitTooSmall { n: usize, fractions: (f64, f64, f64) },
    #[error("split fractions must sum to 1, got {0}")]
    BadFractions(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Sigmoid,
    Linear,
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Fully connected feed-forward network. `weights[k]` is the `out x in`
/// matrix of layer `k`, flattened row-major; `biases[k]` has one entry
/// per output unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub layer_sizes: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub output_activation: Activation,
}

/// Per-layer weight and bias gradients, shaped like the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

/// Weights and biases drawn uniformly from `[-1/sqrt(fan_in),
/// +1/sqrt(fan_in)]` in a fixed order (layer-major, row-major, weights
/// before biases) from a splitmix64 stream, so equal seeds give
/// bit-identical networks.
pub fn init_network(layer_sizes: &[usize], seed: u64) -> Result<Network, MlpError> {
    init_with_rng(layer_sizes, Activation::Sigmoid, &mut SplitMix64::new(seed))
}

fn init_with_rng(
    layer_sizes: &[usize],
    output_activation: Activation,
    rng: &mut SplitMix64,
) -> Result<Network, MlpError> {
    if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
        return Err(MlpError::BadArchitecture);
    }
    let mut weights = Vec::with_capacity(layer_sizes.len() - 1);
    let mut biases = Vec::with_capacity(layer_sizes.len() - 1);
    for pair in layer_sizes.windows(2) {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let bound = 1.0 / (fan_in as f64).sqrt();
        let w: Vec<f64> = (0..fan_in * fan_out).map(|_| rng.uniform(-bound, bound)).collect();
        let b: Vec<f64> = (0..fan_out).map(|_| rng.uniform(-bound, bound)).collect();
        weights.push(w);
        biases.push(b);
    }
    Ok(Network { layer_sizes: layer_sizes.to_vec(), weights, biases, output_activation })
}

impl Network {
    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    /// Checks the shape chain and that stored matrices match it.
    pub fn validate(&self) -> Result<(), MlpError> {
        if self.layer_sizes.len() < 2 || self.layer_sizes.contains(&0) {
            return Err(MlpError::BadArchitecture);
        }
        if self.weights.len() != self.layer_sizes.len() - 1
            || self.biases.len() != self.layer_sizes.len() - 1
        {
            return Err(MlpError::BadArchitecture);
        }
        for (k, pair) in self.layer_sizes.windows(2).enumerate() {
            if self.weights[k].len() != pair[0] * pair[1] {
                return Err(MlpError::DimensionMismatch {
                    expected: pair[0] * pair[1],
                    got: self.weights[k].len(),
                });
            }
            if self.biases[k].len() != pair[1] {
                return Err(MlpError::DimensionMismatch {
                    expected: pair[1],
                    got: self.biases[k].len(),
                });
            }
        }
        Ok(())
    }
}

/// Runs the input through every layer and keeps all activations;
/// `activations[0]` is the input itself, the last entry is the output.
pub fn forward(net: &Network, x: &[f64]) -> Result<Vec<Vec<f64>>, MlpError> {
    if x.len() != net.input_size() {
        return Err(MlpError::DimensionMismatch { expected: net.input_size(), got: x.len() });
    }
    let depth = net.weights.len();
    let mut activations = Vec::with_capacity(depth + 1);
    activations.push(x.to_vec());
    for k in 0..depth {
        let fan_in = net.layer_sizes[k];
        let fan_out = net.layer_sizes[k + 1];
        let prev = &activations[k];
        let mut next = Vec::with_capacity(fan_out);
        for o in 0..fan_out {
            let row = &net.weights[k][o * fan_in..(o + 1) * fan_in];
            let z: f64 =
                net.biases[k][o] + row.iter().zip(prev).map(|(w, a)| w * a).sum::<f64>();
            let last = k == depth - 1;
            let a = if last && net.output_activation == Activation::Linear {
                z
            } else {
                sigmoid(z)
            };
            next.push(a);
        }
        activations.push(next);
    }
    Ok(activations)
}

/// The network's output for one input.
pub fn output(net: &Network, x: &[f64]) -> Result<Vec<f64>, MlpError> {
    Ok(forward(net, x)?.pop().unwrap())
}

/// Mean over all samples and components of the squared output-target
/// difference.
pub fn mse(outputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64, MlpError> {
    if outputs.is_empty() || outputs.len() != targets.len() {
        return Err(MlpError::EmptyData);
    }
    let mut acc = 0.0;
    let mut count = 0usize;
    for (o, t) in outputs.iter().zip(targets) {
        if o.len() != t.len() {
            return Err(MlpError::DimensionMismatch { expected: t.len(), got: o.len() });
        }
        for (a, b) in o.iter().zip(t) {
            let d = a - b;
            acc += d * d;
        }
        count += o.len();
    }
    Ok(acc / count as f64)
}

/// Half the sum of squared errors of one sample; the quantity
/// [`backward`] differentiates.
pub fn sample_loss(net: &Network, x: &[f64], target: &[f64]) -> Result<f64, MlpError> {
    let out = output(net, x)?;
    if out.len() != target.len() {
        return Err(MlpError::DimensionMismatch { expected: out.len(), got: target.len() });
    }
    Ok(0.5 * out.iter().zip(target).map(|(o, t)| (o - t) * (o - t)).sum::<f64>())
}

/// Exact gradients of [`sample_loss`] by backpropagation. `activations`
/// must come from [`forward`] on the same input.
pub fn backward(
    net: &Network,
    activations: &[Vec<f64>],
    target: &[f64],
) -> Result<Gradients, MlpError> {
    let depth = net.weights.len();
    if activations.len() != depth + 1 {
        return Err(MlpError::DimensionMismatch { expected: depth + 1, got: activations.len() });
    }
    let out = activations.last().unwrap();
    if out.len() != target.len() || out.len() != net.output_size() {
        return Err(MlpError::DimensionMismatch { expected: net.output_size(), got: target.len() });
    }
    for (k, a) in activations.iter().enumerate() {
        if a.len() != net.layer_sizes[k] {
            return Err(MlpError::DimensionMismatch {
                expected: net.layer_sizes[k],
                got: a.len(),
            });
        }
    }

    // Output delta: (a - t), times the sigmoid derivative unless linear.
    let mut delta: Vec<f64> = out
        .iter()
        .zip(target)
        .map(|(a, t)| {
            let e = a - t;
            match net.output_activation {
                Activation::Sigmoid => e * a * (1.0 - a),
                Activation::Linear => e,
            }
        })
        .collect();

    let mut grad_w = vec![Vec::new(); depth];
    let mut grad_b = vec![Vec::new(); depth];
    for k in (0..depth).rev() {
        let prev = &activations[k];
        let fan_in = net.layer_sizes[k];
        let mut gw = Vec::with_capacity(delta.len() * fan_in);
        for d in &delta {
            for a in prev {
                gw.push(d * a);
            }
        }
        grad_w[k] = gw;
        grad_b[k] = delta.clone();

        if k > 0 {
            // delta_prev = (W^T delta) .* a .* (1 - a)
            let mut next_delta = vec![0.0; fan_in];
            for (o, d) in delta.iter().enumerate() {
                let row = &net.weights[k][o * fan_in..(o + 1) * fan_in];
                for (i, w) in row.iter().enumerate() {
                    next_delta[i] += w * d;
                }
            }
            for (i, nd) in next_delta.iter_mut().enumerate() {
                let a = prev[i];
                *nd *= a * (1.0 - a);
            }
            delta = next_delta;
        }
    }
    Ok(Gradients { weights: grad_w, biases: grad_b })
}

/// `w <- w - lr * grad` on every weight and bias, in place.
pub fn sgd_step(net: &mut Network, grads: &Gradients, learning_rate: f64) {
    for (w, g) in net.weights.iter_mut().zip(&grads.weights) {
        for (wi, gi) in w.iter_mut().zip(g) {
            *wi -= learning_rate * gi;
        }
    }
    for (b, g) in net.biases.iter_mut().zip(&grads.biases) {
        for (bi, gi) in b.iter_mut().zip(g) {
            *bi -= learning_rate * gi;
        }
    }
}

/// Compares [`backward`] against central finite differences on one
/// sample; returns the largest relative error over every parameter.
pub fn gradient_check(
    net: &Network,
    x: &[f64],
    target: &[f64],
    epsilon: f64,
) -> Result<f64, MlpError> {
    assert!(epsilon > 0.0);
    let activations = forward(net, x)?;
    let analytic = backward(net, &activations, target)?;

    let mut worst = 0.0f64;
    let mut probe = net.clone();
    for layer in 0..net.weights.len() {
        for i in 0..net.weights[layer].len() {
            let original = net.weights[layer][i];
            probe.weights[layer][i] = original + epsilon;
            let plus = sample_loss(&probe, x, target)?;
            probe.weights[layer][i] = original - epsilon;
            let minus = sample_loss(&probe, x, target)?;
            probe.weights[layer][i] = original;
            let numeric = (plus - minus) / (2.0 * epsilon);
            worst = worst.max(relative_error(analytic.weights[layer][i], numeric));
        }
        for i in 0..net.biases[layer].len() {
            let original = net.biases[layer][i];
            probe.biases[layer][i] = original + epsilon;
            let plus = sample_loss(&probe, x, target)?;
            probe.biases[layer][i] = original - epsilon;
            let minus = sample_loss(&probe, x, target)?;
            probe.biases[layer][i] = original;
            let numeric = (plus - minus) / (2.0 * epsilon);
            worst = worst.max(relative_error(analytic.biases[layer][i], numeric));
        }
    }
    Ok(worst)
}

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

/// Index partition of a sample set into train/validation/test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataSplit {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded Fisher-Yates permutation, then contiguous assignment:
/// `val = round(n * f_val)` indices first, `test = round(n * f_test)`
/// next, the remainder to train.
pub fn split_dataset(
    n: usize,
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<DataSplit, MlpError> {
    let (f_train, f_val, f_test) = fractions;
    let sum = f_train + f_val + f_test;
    if (sum - 1.0).abs() > 1e-9 || f_train < 0.0 || f_val < 0.0 || f_test < 0.0 {
        return Err(MlpError::BadFractions(sum));
    }
    if n < 1 {
        return Err(MlpError::EmptyData);
    }
    let round_count = |f: f64| ((n as f64 * f) + 0.5).floor() as usize;
    let n_val = round_count(f_val);
    let n_test = round_count(f_test);
    if n_val + n_test > n {
        return Err(MlpError::SplitTooSmall { n, fractions });
    }
    let n_train = n - n_val - n_test;
    for (fraction, size) in [(f_train, n_train), (f_val, n_val), (f_test, n_test)] {
        if fraction > 0.0 && size == 0 {
            return Err(MlpError::SplitTooSmall { n, fractions });
        }
    }

    let mut perm: Vec<usize> = (0..n).collect();
    SplitMix64::new(seed).shuffle(&mut perm);
    let val = perm[..n_val].to_vec();
    let test = perm[n_val..n_val + n_test].to_vec();
    let train = perm[n_val + n_test..].to_vec();
    Ok(DataSplit { train, val, test })
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    /// Train / validation / test fractions; must sum to 1.
    pub split: (f64, f64, f64),
    pub restarts: usize,
    pub hidden_sizes: Vec<usize>,
    pub seed: u64,
    pub shuffle_each_epoch: bool,
    pub output_activation: Activation,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            max_epochs: 1000,
            // Frequency-normalized histogram inputs keep early gradients
            // small; validation MSE can stall for ~45 epochs before the
            // hidden layer differentiates, so the window must outlast
            // that plateau.
            patience: 60,
            split: (0.70, 0.15, 0.15),
            restarts: 5,
            hidden_sizes: vec![16],
            seed: 42,
            shuffle_each_epoch: true,
            output_activation: Activation::Sigmoid,
        }
    }
}

/// MSE of the three splits after one epoch. Empty splits record NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub train_mse: f64,
    pub val_mse: f64,
    pub test_mse: f64,
}

/// Pearson correlation between flattened outputs and targets. A constant
/// side makes the statistic undefined; it is reported as 0 with the
/// degenerate flag set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionStat {
    pub r: f64,
    pub degenerate: bool,
    pub n: usize,
}

/// Everything recorded while training: the full curves of the chosen
/// restart, the early-stopping bookkeeping and the final statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub restart_index: usize,
    pub final_train_mse: f64,
    pub final_val_mse: f64,
    pub final_test_mse: f64,
    pub train_r: Option<RegressionStat>,
    pub val_r: Option<RegressionStat>,
    pub test_r: Option<RegressionStat>,
    pub split: DataSplit,
}

/// Pearson R over flattened (output, target) pairs.
pub fn regression_stat(
    outputs: &[Vec<f64>],
    targets: &[Vec<f64>],
) -> Result<RegressionStat, MlpError> {
    if outputs.is_empty() || outputs.len() != targets.len() {
        return Err(MlpError::EmptyData);
    }
    let xs: Vec<f64> = outputs.iter().flatten().copied().collect();
    let ys: Vec<f64> = targets.iter().flatten().copied().collect();
    if xs.len() != ys.len() {
        return Err(MlpError::DimensionMismatch { expected: ys.len(), got: xs.len() });
    }
    if xs.len() < 2 {
        return Err(MlpError::EmptyData);
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(RegressionStat { r: 0.0, degenerate: true, n: xs.len() });
    }
    Ok(RegressionStat { r: sxy / (sxx * syy).sqrt(), degenerate: false, n: xs.len() })
}

/// Trains with independent restarts and early stopping; returns the best
/// network and the report of its restart.
///
/// Restart `r` derives its seed as `seed + r` and runs: init, then per
/// epoch shuffle the training order, take one SGD step per sample, and
/// record the three split MSEs. The monitored value is the validation MSE
/// (training MSE when the validation split is empty); training stops once
/// it fails to improve for `patience` consecutive epochs, and the weights
/// of the best epoch are restored. The restart with the lowest monitored
/// minimum wins, ties to the lowest index.
pub fn train(
    data: &[(Vec<f64>, Vec<f64>)],
    config: &TrainConfig,
) -> Result<(Network, TrainReport), MlpError> {
    if data.len() < 3 {
        return Err(MlpError::EmptyData);
    }
    let input_size = data[0].0.len();
    let output_size = data[0].1.len();
    for (x, t) in data {
        if x.len() != input_size {
            return Err(MlpError::DimensionMismatch { expected: input_size, got: x.len() });
        }
        if t.len() != output_size {
            return Err(MlpError::DimensionMismatch { expected: output_size, got: t.len() });
        }
    }
    let mut layer_sizes = Vec::with_capacity(config.hidden_sizes.len() + 2);
    layer_sizes.push(input_size);
    layer_sizes.extend_from_slice(&config.hidden_sizes);
    layer_sizes.push(output_size);

    let split = split_dataset(data.len(), config.split, config.seed)?;

    let run_restart = |r: usize| -> Result<(Network, f64, Vec<EpochRecord>, usize), MlpError> {
        let derived = config.seed.wrapping_add(r as u64);
        let mut rng = SplitMix64::new(derived);
        let mut net = init_with_rng(&layer_sizes, config.output_activation, &mut rng)?;

        let mut order: Vec<usize> = split.train.clone();
        let mut records: Vec<EpochRecord> = Vec::new();
        let mut best_net = net.clone();
        let mut best_monitor = f64::INFINITY;
        let mut best_epoch = 0usize;
        let mut since_best = 0usize;

        for epoch in 0..config.max_epochs {
            if config.shuffle_each_epoch {
                rng.shuffle(&mut order);
            }
            for &i in &order {
                let (x, t) = &data[i];
                let activations = forward(&net, x)?;
                let grads = backward(&net, &activations, t)?;
                sgd_step(&mut net, &grads, config.learning_rate);
            }

            let record = EpochRecord {
                train_mse: split_mse(&net, data, &split.train)?,
                val_mse: split_mse(&net, data, &split.val)?,
                test_mse: split_mse(&net, data, &split.test)?,
            };
            records.push(record);

            let monitor = if split.val.is_empty() { record.train_mse } else { record.val_mse };
            if monitor < best_monitor {
                best_monitor = monitor;
                best_net = net.clone();
                best_epoch = epoch;
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= config.patience {
                    break;
                }
            }
        }
        Ok((best_net, best_monitor, records, best_epoch))
    };

    let restarts = config.restarts.max(1);
    let mut outcomes = Vec::with_capacity(restarts);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let results: Vec<_> = (0..restarts).into_par_iter().map(run_restart).collect();
        for r in results {
            outcomes.push(r?);
        }
    }
    #[cfg(not(feature = "parallel"))]
    for r in 0..restarts {
        outcomes.push(run_restart(r)?);
    }

    let mut chosen = 0usize;
    for (r, outcome) in outcomes.iter().enumerate() {
        if outcome.1 < outcomes[chosen].1 {
            chosen = r;
        }
    }
    let (net, _, records, best_epoch) = outcomes.swap_remove(chosen);

    type Gathered = (Vec<Vec<f64>>, Vec<Vec<f64>>);
    let gather = |idx: &[usize]| -> Result<Gathered, MlpError> {
        let mut outs = Vec::with_capacity(idx.len());
        let mut tgts = Vec::with_capacity(idx.len());
        for &i in idx {
            outs.push(output(&net, &data[i].0)?);
            tgts.push(data[i].1.clone());
        }
        Ok((outs, tgts))
    };
    let (train_o, train_t) = gather(&split.train)?;
    let (val_o, val_t) = gather(&split.val)?;
    let (test_o, test_t) = gather(&split.test)?;

    let report = TrainReport {
        best_epoch,
        restart_index: chosen,
        final_train_mse: mse(&train_o, &train_t).unwrap_or(f64::NAN),
        final_val_mse: mse(&val_o, &val_t).unwrap_or(f64::NAN),
        final_test_mse: mse(&test_o, &test_t).unwrap_or(f64::NAN),
        train_r: regression_stat(&train_o, &train_t).ok(),
        val_r: regression_stat(&val_o, &val_t).ok(),
        test_r: regression_stat(&test_o, &test_t).ok(),
        epochs: records,
        split,
    };
    Ok((net, report))
}

fn split_mse(
    net: &Network,
    data: &[(Vec<f64>, Vec<f64>)],
    idx: &[usize],
) -> Result<f64, MlpError> {
    if idx.is_empty() {
        return Ok(f64::NAN);
    }
    let mut acc = 0.0;
    let mut count = 0usize;
    for &i in idx {
        let (x, t) = &data[i];
        let out = output(net, x)?;
        for (o, tt) in out.iter().zip(t) {
            let d = o - tt;
            acc += d * d;
        }
        count += t.len();
    }
    Ok(acc / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_deterministic_and_bounded() {
        let a = init_network(&[768, 16, 3], 42).unwrap();
        let b = init_network(&[768, 16, 3], 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.weights[0].len(), 16 * 768);
        assert_eq!(a.weights[1].len(), 3 * 16);
        let bound0 = 1.0 / 768f64.sqrt();
        assert!(a.weights[0].iter().all(|w| w.abs() <= bound0));
        let c = init_network(&[768, 16, 3], 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn init_rejects_bad_architectures() {
        assert!(init_network(&[4], 1).is_err());
        assert!(init_network(&[4, 0, 2], 1).is_err());
    }

    #[test]
    fn forward_zero_network_gives_half() {
        let net = Network {
            layer_sizes: vec![3, 2, 2],
            weights: vec![vec![0.0; 6], vec![0.0; 4]],
            biases: vec![vec![0.0; 2], vec![0.0; 2]],
            output_activation: Activation::Sigmoid,
        };
        let acts = forward(&net, &[0.3, -0.7, 2.0]).unwrap();
        assert!(acts[1].iter().all(|&a| a == 0.5));
        assert!(acts[2].iter().all(|&a| a == 0.5));
    }

    #[test]
    fn forward_outputs_stay_in_unit_interval() {
        let net = init_network(&[5, 4, 2], 7).unwrap();
        let acts = forward(&net, &[10.0, -10.0, 3.0, 0.0, 1.0]).unwrap();
        for layer in &acts[1..] {
            assert!(layer.iter().all(|&a| a > 0.0 && a < 1.0));
        }
    }

    #[test]
    fn forward_single_unit() {
        let net = Network {
            layer_sizes: vec![1, 1],
            weights: vec![vec![1.0]],
            biases: vec![vec![0.0]],
            output_activation: Activation::Sigmoid,
        };
        assert_eq!(output(&net, &[0.0]).unwrap(), vec![0.5]);
    }

    #[test]
    fn forward_dimension_mismatch_errors() {
        let net = init_network(&[3, 2], 1).unwrap();
        assert!(forward(&net, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn mse_basic_cases() {
        assert_eq!(mse(&[vec![1.0, 2.0]], &[vec![1.0, 2.0]]).unwrap(), 0.0);
        assert_eq!(mse(&[vec![1.0]], &[vec![0.0]]).unwrap(), 1.0);
        assert!(mse(&[], &[]).is_err());
    }

    #[test]
    fn mse_matches_direct_recomputation() {
        let mut rng = SplitMix64::new(31);
        let outputs: Vec<Vec<f64>> =
            (0..10).map(|_| (0..4).map(|_| rng.next_f64()).collect()).collect();
        let targets: Vec<Vec<f64>> =
            (0..10).map(|_| (0..4).map(|_| rng.next_f64()).collect()).collect();
        let got = mse(&outputs, &targets).unwrap();
        // Independent route: accumulate per-sample sums first.
        let mut total = 0.0;
        for (o, t) in outputs.iter().zip(&targets) {
            let s: f64 = o.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum();
            total += s;
        }
        let expect = total / 40.0;
        assert!((got - expect).abs() < 1e-15);
    }

    #[test]
    fn backward_zero_error_gives_zero_gradients() {
        // Zero weights and biases give output 0.5; target 0.5 zeroes the
        // error and so every gradient.
        let net = Network {
            layer_sizes: vec![2, 2, 1],
            weights: vec![vec![0.0; 4], vec![0.0; 2]],
            biases: vec![vec![0.0; 2], vec![0.0]],
            output_activation: Activation::Sigmoid,
        };
        let acts = forward(&net, &[1.0, -1.0]).unwrap();
        let grads = backward(&net, &acts, &[0.5]).unwrap();
        assert!(grads.weights.iter().flatten().all(|&g| g == 0.0));
        assert!(grads.biases.iter().flatten().all(|&g| g == 0.0));
    }

    #[test]
    fn backward_matches_hand_chain_rule_on_1_1_1() {
        let net = Network {
            layer_sizes: vec![1, 1, 1],
            weights: vec![vec![0.7], vec![-0.4]],
            biases: vec![vec![0.1], vec![0.2]],
            output_activation: Activation::Sigmoid,
        };
        let (x, t) = (0.5, 0.3);
        let acts = forward(&net, &[x]).unwrap();
        let grads = backward(&net, &acts, &[t]).unwrap();

        // Chain rule, spelled out step by step.
        let a1 = sigmoid(0.7 * x + 0.1);
        let a2 = sigmoid(-0.4 * a1 + 0.2);
        let d2 = (a2 - t) * a2 * (1.0 - a2);
        let d1 = d2 * (-0.4) * a1 * (1.0 - a1);
        assert!((grads.weights[1][0] - d2 * a1).abs() < 1e-15);
        assert!((grads.biases[1][0] - d2).abs() < 1e-15);
        assert!((grads.weights[0][0] - d1 * x).abs() < 1e-15);
        assert!((grads.biases[0][0] - d1).abs() < 1e-15);
    }

    #[test]
    fn gradient_check_small_network() {
        let net = init_network(&[4, 3, 2], 99).unwrap();
        let x = [0.2, -0.4, 0.9, 0.1];
        let t = [0.7, 0.2];
        let err = gradient_check(&net, &x, &t, 1e-5).unwrap();
        assert!(err < 1e-6, "relative error {err}");
    }

    #[test]
    fn gradient_check_linear_output() {
        let mut net = init_network(&[3, 4, 2], 5).unwrap();
        net.output_activation = Activation::Linear;
        let err = gradient_check(&net, &[0.5, -1.0, 2.0], &[1.5, -0.5], 1e-5).unwrap();
        assert!(err < 1e-6, "relative error {err}");
    }

    #[test]
    fn gradient_check_degrades_with_large_epsilon() {
        let net = init_network(&[4, 4, 2], 3).unwrap();
        let x = [0.3, 0.1, -0.8, 0.5];
        let t = [0.9, 0.1];
        let fine = gradient_check(&net, &x, &t, 1e-5).unwrap();
        let coarse = gradient_check(&net, &x, &t, 0.1).unwrap();
        assert!(coarse > fine, "coarse {coarse} vs fine {fine}");
    }

    #[test]
    fn sgd_zero_gradient_is_identity() {
        let net = init_network(&[3, 2], 11).unwrap();
        let grads = Gradients { weights: vec![vec![0.0; 6]], biases: vec![vec![0.0; 2]] };
        let mut stepped = net.clone();
        sgd_step(&mut stepped, &grads, 0.5);
        assert_eq!(stepped, net);
    }

    #[test]
    fn sgd_zero_learning_rate_is_identity() {
        let net = init_network(&[3, 2], 11).unwrap();
        let grads = Gradients { weights: vec![vec![1.0; 6]], biases: vec![vec![1.0; 2]] };
        let mut stepped = net.clone();
        sgd_step(&mut stepped, &grads, 0.0);
        assert_eq!(stepped, net);
    }

    #[test]
    fn sgd_step_decreases_sample_loss() {
        let net = init_network(&[3, 4, 1], 13).unwrap();
        let x = [0.4, -0.2, 0.9];
        let t = [0.8];
        let before = sample_loss(&net, &x, &t).unwrap();
        let acts = forward(&net, &x).unwrap();
        let grads = backward(&net, &acts, &t).unwrap();
        let mut stepped = net.clone();
        sgd_step(&mut stepped, &grads, 0.05);
        let after = sample_loss(&stepped, &x, &t).unwrap();
        assert!(after < before, "{after} !< {before}");
    }

    #[test]
    fn split_sizes_follow_rounding_rule() {
        let split = split_dataset(20, (0.70, 0.15, 0.15), 42).unwrap();
        assert_eq!(split.train.len(), 14);
        assert_eq!(split.val.len(), 3);
        assert_eq!(split.test.len(), 3);
    }

    #[test]
    fn split_is_deterministic_disjoint_and_covering() {
        let a = split_dataset(37, (0.6, 0.2, 0.2), 7).unwrap();
        let b = split_dataset(37, (0.6, 0.2, 0.2), 7).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<usize> = a.train.iter().chain(&a.val).chain(&a.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..37).collect::<Vec<_>>());
    }

    #[test]
    fn split_too_small_errors() {
        assert!(split_dataset(4, (0.0, 0.5, 0.5), 1).is_ok());
        assert!(matches!(
            split_dataset(2, (0.9, 0.05, 0.05), 1),
            Err(MlpError::SplitTooSmall { .. })
        ));
        assert!(matches!(split_dataset(5, (0.5, 0.2, 0.2), 1), Err(MlpError::BadFractions(_))));
    }

    #[test]
    fn regression_perfect_and_inverted() {
        let outs = vec![vec![0.1], vec![0.5], vec![0.9]];
        let r = regression_stat(&outs, &outs).unwrap();
        assert!((r.r - 1.0).abs() < 1e-12);
        assert!(!r.degenerate);

        let flipped: Vec<Vec<f64>> = outs.iter().map(|v| vec![1.0 - v[0]]).collect();
        let r = regression_stat(&outs, &flipped).unwrap();
        assert!((r.r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn regression_constant_targets_degenerate() {
        let outs = vec![vec![0.1], vec![0.5], vec![0.9]];
        let consts = vec![vec![0.5], vec![0.5], vec![0.5]];
        let r = regression_stat(&outs, &consts).unwrap();
        assert_eq!(r.r, 0.0);
        assert!(r.degenerate);
    }

    #[test]
    fn regression_matches_kahan_oracle() {
        let mut rng = SplitMix64::new(61);
        let outs: Vec<Vec<f64>> = (0..50).map(|_| vec![rng.next_f64(), rng.next_f64()]).collect();
        let tgts: Vec<Vec<f64>> =
            outs.iter().map(|v| vec![v[0] * 0.8 + 0.05 * rng.next_f64(), rng.next_f64()]).collect();
        let got = regression_stat(&outs, &tgts).unwrap().r;

        // Independent route with Kahan-compensated sums.
        fn kahan_sum(items: impl Iterator<Item = f64>) -> f64 {
            let (mut sum, mut c) = (0.0f64, 0.0f64);
            for v in items {
                let y = v - c;
                let t = sum + y;
                c = (t - sum) - y;
                sum = t;
            }
            sum
        }
        let xs: Vec<f64> = outs.iter().flatten().copied().collect();
        let ys: Vec<f64> = tgts.iter().flatten().copied().collect();
        let n = xs.len() as f64;
        let mx = kahan_sum(xs.iter().copied()) / n;
        let my = kahan_sum(ys.iter().copied()) / n;
        let sxy = kahan_sum(xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)));
        let sxx = kahan_sum(xs.iter().map(|x| (x - mx) * (x - mx)));
        let syy = kahan_sum(ys.iter().map(|y| (y - my) * (y - my)));
        let expect = sxy / (sxx * syy).sqrt();
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn train_single_epoch_when_capped() {
        let data: Vec<(Vec<f64>, Vec<f64>)> = (0..10)
            .map(|i| (vec![i as f64 / 10.0, 1.0 - i as f64 / 10.0], vec![(i % 2) as f64]))
            .collect();
        let config = TrainConfig {
            max_epochs: 1,
            patience: usize::MAX,
            restarts: 1,
            hidden_sizes: vec![3],
            split: (0.8, 0.1, 0.1),
            ..TrainConfig::default()
        };
        let (_, report) = train(&data, &config).unwrap();
        assert_eq!(report.epochs.len(), 1);
        assert_eq!(report.best_epoch, 0);
    }

    #[test]
    fn best_epoch_attains_minimal_val_mse() {
        let mut rng = SplitMix64::new(17);
        let data: Vec<(Vec<f64>, Vec<f64>)> = (0..30)
            .map(|_| {
                let x = rng.next_f64();
                (vec![x, x * x], vec![if x > 0.5 { 1.0 } else { 0.0 }])
            })
            .collect();
        let config = TrainConfig {
            max_epochs: 60,
            patience: 8,
            restarts: 2,
            hidden_sizes: vec![4],
            ..TrainConfig::default()
        };
        let (_, report) = train(&data, &config).unwrap();
        let best = report.epochs[report.best_epoch].val_mse;
        for e in &report.epochs {
            assert!(best <= e.val_mse + 1e-15);
        }
        assert_eq!(report.final_val_mse, best);
    }

    #[test]
    fn xor_converges_with_all_train_split() {
        let data: Vec<(Vec<f64>, Vec<f64>)> = vec![
            (vec![0.0, 0.0], vec![0.0]),
            (vec![0.0, 1.0], vec![1.0]),
            (vec![1.0, 0.0], vec![1.0]),
            (vec![1.0, 1.0], vec![0.0]),
        ];
        let config = TrainConfig {
            learning_rate: 0.5,
            max_epochs: 10_000,
            patience: usize::MAX,
            split: (1.0, 0.0, 0.0),
            restarts: 1,
            hidden_sizes: vec![4],
            seed: 0,
            shuffle_each_epoch: true,
            output_activation: Activation::Sigmoid,
        };
        let (_, report) = train(&data, &config).unwrap();
        assert!(
            report.final_train_mse < 0.01,
            "XOR did not converge: {}",
            report.final_train_mse
        );
    }

    #[test]
    fn restored_network_reproduces_recorded_best_val_mse() {
        let mut rng = SplitMix64::new(29);
        let data: Vec<(Vec<f64>, Vec<f64>)> = (0..40)
            .map(|_| {
                let x = rng.next_f64();
                let y = rng.next_f64();
                (vec![x, y], vec![if x + y > 1.0 { 1.0 } else { 0.0 }])
            })
            .collect();
        let config = TrainConfig {
            max_epochs: 80,
            patience: 5,
            restarts: 1,
            hidden_sizes: vec![5],
            ..TrainConfig::default()
        };
        let (net, report) = train(&data, &config).unwrap();
        let recorded = report.epochs[report.best_epoch].val_mse;
        let recomputed = split_mse(&net, &data, &report.split.val).unwrap();
        assert_eq!(recorded, recomputed);
    }
}
