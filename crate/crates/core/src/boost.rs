//! AdaBoost over Haar-feature decision stumps and attentional-cascade
//! assembly.
//!
//! A stump thresholds one feature value; AdaBoost reweights samples toward
//! mistakes and combines stumps with votes `alpha = ln((1-eps)/eps)`. A
//! stage passes a window when the weighted vote sum reaches the stage
//! threshold, which is initialized at half the vote mass and then lowered
//! just enough to keep the stage's detection rate at its target. Stages
//! chain into a cascade: any failing stage rejects the window immediately,
//! and each stage trains only on the negatives that slipped through the
//! stages before it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::haar::{enumerate_features, HaarFeature};
use crate::imgio::GrayImage;
use crate::integral::{build_integral, IntegralImage, OutOfBounds};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error, PartialEq)]
pub enum BoostError {
    #[error("all labels identical; a stump needs both classes")]
    UniformLabels,
    #[error("weights must be non-negative and sum to 1, got sum {0}")]
    InvalidWeights(f64),
    #[error("sample set is empty")]
    EmptySamples,
    #[error("sample lengths disagree: {0}")]
    LengthMismatch(String),
    #[error("window {got_w}x{got_h} does not match the {base}x{base} base window")]
    WindowMismatch { got_w: u32, got_h: u32, base: u32 },
    #[error("no feature admits a decision boundary (all feature values constant)")]
    NoSplit,
    #[error(transparent)]
    Bounds(#[from] OutOfBounds),
}

/// One-feature threshold classifier plus its vote weight.
///
/// Predicts +1 when `polarity * (value - threshold) > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakClassifier {
    #[serde(rename = "feature")]
    pub feature_index: usize,
    pub threshold: f64,
    pub polarity: i8,
    pub alpha: f64,
}

impl WeakClassifier {
    #[inline]
    pub fn predicts_positive(&self, value: f64) -> bool {
        self.polarity as f64 * (value - self.threshold) > 0.0
    }
}

/// A strong classifier: weighted stump votes against a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    #[serde(rename = "threshold")]
    pub stage_threshold: f64,
    pub weaks: Vec<WeakClassifier>,
}

impl Stage {
    pub fn vote_sum(&self) -> f64 {
        self.weaks.iter().map(|w| w.alpha).sum()
    }

    /// Score of a window given a value lookup for each weak's feature.
    fn score_with(&self, mut value_of: impl FnMut(&WeakClassifier) -> f64) -> f64 {
        self.weaks
            .iter()
            .map(|w| if w.predicts_positive(value_of(w)) { w.alpha } else { 0.0 })
            .sum()
    }

    /// Evaluates the stage on a whole image treated as one base window.
    pub fn passes_image(&self, img: &GrayImage, features: &[HaarFeature]) -> bool {
        let ii = build_integral(img);
        let inv_sigma = ii
            .window_inv_sigma(0, 0, img.width, img.height)
            .expect("window is the whole image");
        let score = self.score_with(|w| {
            features[w.feature_index].eval_in_window(&ii, 0, 0, 1.0, img.width, inv_sigma)
        });
        score >= self.stage_threshold
    }
}

/// An ordered chain of stages over a shared feature table. A window is a
/// detection only if every stage passes it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cascade {
    pub base_window: u32,
    pub stages: Vec<Stage>,
    #[serde(rename = "features")]
    pub feature_table: Vec<HaarFeature>,
}

impl Cascade {
    /// A one-stage cascade with no features and a negative threshold: it
    /// accepts every window. Useful as a null detector and in tests.
    pub fn accept_all(base_window: u32) -> Self {
        Cascade {
            base_window,
            stages: vec![Stage { stage_threshold: -1.0, weaks: Vec::new() }],
            feature_table: Vec::new(),
        }
    }

    /// Evaluates stages in order at origin `(ox, oy)` with the window
    /// scaled by `ratio`. Returns whether the window was accepted and how
    /// many stages it passed; evaluation stops at the first failure.
    pub fn classify_window(
        &self,
        ii: &IntegralImage,
        ox: u32,
        oy: u32,
        ratio: f64,
    ) -> Result<(bool, usize), BoostError> {
        let window = self.scaled_window(ratio);
        let inv_sigma = ii.window_inv_sigma(ox, oy, window, window)?;
        for (passed, stage) in self.stages.iter().enumerate() {
            let score = stage.score_with(|w| {
                self.feature_table[w.feature_index]
                    .eval_in_window(ii, ox, oy, ratio, window, inv_sigma)
            });
            if score < stage.stage_threshold {
                return Ok((false, passed));
            }
        }
        Ok((true, self.stages.len()))
    }

    /// Window side length after scaling by `ratio`, rounded to nearest.
    pub fn scaled_window(&self, ratio: f64) -> u32 {
        ((self.base_window as f64 * ratio + 0.5).floor() as u32).max(1)
    }

    /// Classifies a full image as a single base-size window.
    pub fn accepts_image(&self, img: &GrayImage) -> Result<bool, BoostError> {
        if img.width != self.base_window || img.height != self.base_window {
            return Err(BoostError::WindowMismatch {
                got_w: img.width,
                got_h: img.height,
                base: self.base_window,
            });
        }
        let ii = build_integral(img);
        Ok(self.classify_window(&ii, 0, 0, 1.0)?.0)
    }
}

/// Per-stage training targets for cascade assembly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeTrainTargets {
    /// Minimum detection rate each stage must keep on validation positives.
    pub d_min: f64,
    /// Maximum false-positive rate each stage may leave on its negatives.
    pub f_max: f64,
    /// Overall false-positive target that ends cascade training.
    pub f_overall: f64,
    pub max_stages: usize,
    pub max_weaks_per_stage: usize,
}

impl CascadeTrainTargets {
    fn validate(&self) -> Result<(), BoostError> {
        let ok = self.d_min > 0.0
            && self.d_min <= 1.0
            && self.f_max > 0.0
            && self.f_max < 1.0
            && self.f_overall > 0.0
            && self.max_stages >= 1
            && self.max_weaks_per_stage >= 1;
        if ok {
            Ok(())
        } else {
            Err(BoostError::LengthMismatch("invalid cascade training targets".into()))
        }
    }
}

impl Default for CascadeTrainTargets {
    fn default() -> Self {
        CascadeTrainTargets {
            d_min: 0.995,
            f_max: 0.5,
            f_overall: 0.01,
            max_stages: 10,
            max_weaks_per_stage: 25,
        }
    }
}

/// Feature-major cache of stump inputs: `values[f][i]` is feature `f` on
/// sample `i`. Built once per stage so every boosting round is a linear
/// sweep instead of a fresh image pass.
pub struct SampleSet {
    values: Vec<Vec<f64>>,
    labels: Vec<i8>,
    /// Per-feature sample order, sorted by value once at construction.
    sorted: Vec<Vec<u32>>,
}

impl SampleSet {
    pub fn from_values(values: Vec<Vec<f64>>, labels: Vec<i8>) -> Result<Self, BoostError> {
        if labels.is_empty() || values.is_empty() {
            return Err(BoostError::EmptySamples);
        }
        if values.iter().any(|col| col.len() != labels.len()) {
            return Err(BoostError::LengthMismatch(
                "feature column length != label count".into(),
            ));
        }
        let sorted = sort_columns(&values);
        Ok(SampleSet { values, labels, sorted })
    }

    /// Evaluates every feature on every window (positives first, then
    /// negatives) at scale 1 with per-window variance normalization.
    pub fn from_windows(
        positives: &[GrayImage],
        negatives: &[GrayImage],
        features: &[HaarFeature],
        base: u32,
    ) -> Result<Self, BoostError> {
        if positives.is_empty() || negatives.is_empty() {
            return Err(BoostError::EmptySamples);
        }
        let mut prepped = Vec::with_capacity(positives.len() + negatives.len());
        let mut labels = Vec::with_capacity(positives.len() + negatives.len());
        for (imgs, label) in [(positives, 1i8), (negatives, -1i8)] {
            for img in imgs {
                if img.width != base || img.height != base {
                    return Err(BoostError::WindowMismatch {
                        got_w: img.width,
                        got_h: img.height,
                        base,
                    });
                }
                let ii = build_integral(img);
                let inv_sigma = ii.window_inv_sigma(0, 0, base, base)?;
                prepped.push((ii, inv_sigma));
                labels.push(label);
            }
        }

        let eval_column = |f: &HaarFeature| -> Vec<f64> {
            prepped
                .iter()
                .map(|(ii, inv_sigma)| f.eval_in_window(ii, 0, 0, 1.0, base, *inv_sigma))
                .collect()
        };
        #[cfg(feature = "parallel")]
        let values: Vec<Vec<f64>> = features.par_iter().map(eval_column).collect();
        #[cfg(not(feature = "parallel"))]
        let values: Vec<Vec<f64>> = features.iter().map(eval_column).collect();

        let sorted = sort_columns(&values);
        Ok(SampleSet { values, labels, sorted })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.values.len()
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn value(&self, feature: usize, sample: usize) -> f64 {
        self.values[feature][sample]
    }
}

fn sort_columns(values: &[Vec<f64>]) -> Vec<Vec<u32>> {
    let sort_one = |col: &Vec<f64>| -> Vec<u32> {
        let mut order: Vec<u32> = (0..col.len() as u32).collect();
        order.sort_by(|&a, &b| {
            col[a as usize]
                .partial_cmp(&col[b as usize])
                .expect("feature values are finite")
                .then(a.cmp(&b))
        });
        order
    };
    #[cfg(feature = "parallel")]
    {
        values.par_iter().map(sort_one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        values.iter().map(sort_one).collect()
    }
}

/// Best decision stump for one feature column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StumpFit {
    pub threshold: f64,
    pub polarity: i8,
    pub error: f64,
}

/// Exhaustive stump fit: minimizes the weighted misclassification over
/// every candidate threshold (midpoints between adjacent distinct sorted
/// values) and both polarities. Ties prefer the smallest threshold, then
/// polarity +1.
pub fn train_stump(values: &[f64], labels: &[i8], weights: &[f64]) -> Result<StumpFit, BoostError> {
    if values.len() != labels.len() || values.len() != weights.len() {
        return Err(BoostError::LengthMismatch(format!(
            "{} values, {} labels, {} weights",
            values.len(),
            labels.len(),
            weights.len()
        )));
    }
    validate_labels_and_weights(labels, weights)?;
    let mut order: Vec<u32> = (0..values.len() as u32).collect();
    order.sort_by(|&a, &b| {
        values[a as usize]
            .partial_cmp(&values[b as usize])
            .expect("values are finite")
            .then(a.cmp(&b))
    });
    Ok(stump_sweep(values, labels, weights, &order))
}

/// The shared sweep; `order` must sort `values` ascending.
fn stump_sweep(values: &[f64], labels: &[i8], weights: &[f64], order: &[u32]) -> StumpFit {
    let mut w_pos = 0.0;
    let mut w_neg = 0.0;
    for (&l, &w) in labels.iter().zip(weights) {
        if l > 0 {
            w_pos += w;
        } else {
            w_neg += w;
        }
    }

    let mut best = StumpFit { threshold: f64::NAN, polarity: 1, error: f64::INFINITY };
    let mut pos_left = 0.0;
    let mut neg_left = 0.0;
    for pair in order.windows(2) {
        let (i, j) = (pair[0] as usize, pair[1] as usize);
        if labels[i] > 0 {
            pos_left += weights[i];
        } else {
            neg_left += weights[i];
        }
        if values[i] == values[j] {
            continue; // no decision boundary inside a run of equal values
        }
        let threshold = 0.5 * (values[i] + values[j]);
        // Polarity +1 predicts +1 strictly right of the threshold.
        let err_pos = pos_left + (w_neg - neg_left);
        let err_neg = neg_left + (w_pos - pos_left);
        if err_pos < best.error {
            best = StumpFit { threshold, polarity: 1, error: err_pos };
        }
        if err_neg < best.error {
            best = StumpFit { threshold, polarity: -1, error: err_neg };
        }
    }
    best
}

fn validate_labels_and_weights(labels: &[i8], weights: &[f64]) -> Result<(), BoostError> {
    if labels.is_empty() {
        return Err(BoostError::EmptySamples);
    }
    if labels.iter().all(|&l| l > 0) || labels.iter().all(|&l| l <= 0) {
        return Err(BoostError::UniformLabels);
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(BoostError::InvalidWeights(sum));
    }
    Ok(())
}

const EPS_CLAMP: f64 = 1e-10;

/// One boosting round: picks the feature whose best stump has the lowest
/// weighted error (ties to the lowest feature index), reweights samples by
/// `beta^(1-e)` and renormalizes. Returns the voted weak classifier and
/// the updated weights.
pub fn adaboost_round(
    set: &SampleSet,
    weights: &[f64],
) -> Result<(WeakClassifier, Vec<f64>), BoostError> {
    validate_labels_and_weights(&set.labels, weights)?;
    if weights.len() != set.len() {
        return Err(BoostError::LengthMismatch(format!(
            "{} weights for {} samples",
            weights.len(),
            set.len()
        )));
    }

    let fit_one = |f: usize| -> (usize, StumpFit) {
        (f, stump_sweep(&set.values[f], &set.labels, weights, &set.sorted[f]))
    };
    let better = |a: &(usize, StumpFit), b: &(usize, StumpFit)| -> bool {
        (a.1.error, a.0) < (b.1.error, b.0)
    };
    #[cfg(feature = "parallel")]
    let (feature_index, fit) = (0..set.feature_count())
        .into_par_iter()
        .map(fit_one)
        .reduce_with(|a, b| if better(&a, &b) { a } else { b })
        .expect("at least one feature");
    #[cfg(not(feature = "parallel"))]
    let (feature_index, fit) = (0..set.feature_count())
        .map(fit_one)
        .reduce(|a, b| if better(&a, &b) { a } else { b })
        .expect("at least one feature");

    if !fit.error.is_finite() {
        return Err(BoostError::NoSplit);
    }
    let eps = fit.error.clamp(EPS_CLAMP, 0.5 - EPS_CLAMP);
    let beta = eps / (1.0 - eps);
    let alpha = (1.0 / beta).ln();
    let weak = WeakClassifier {
        feature_index,
        threshold: fit.threshold,
        polarity: fit.polarity,
        alpha,
    };

    let mut updated: Vec<f64> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let predicted = weak.predicts_positive(set.values[feature_index][i]);
            let correct = predicted == (set.labels[i] > 0);
            if correct {
                w * beta
            } else {
                w
            }
        })
        .collect();
    let total: f64 = updated.iter().sum();
    for w in &mut updated {
        *w /= total;
    }
    Ok((weak, updated))
}

/// Result of training one attentional stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedStage {
    pub stage: Stage,
    /// False-positive rate on the stage's training negatives.
    pub fpr: f64,
    /// Detection rate on the validation positives.
    pub detection_rate: f64,
    /// False when the weak-classifier budget ran out before `f_max`.
    pub reached_fpr_target: bool,
}

/// Trains a stage: boosting rounds are added until the stage's
/// false-positive rate on its negatives drops to `f_max`, with the stage
/// threshold lowered from half the vote mass just enough to keep the
/// detection rate on `val_positives` at `d_min`. Stops at
/// `max_weaks_per_stage` regardless, flagging the shortfall.
pub fn train_stage(
    positives: &[GrayImage],
    negatives: &[GrayImage],
    val_positives: &[GrayImage],
    features: &[HaarFeature],
    base: u32,
    targets: &CascadeTrainTargets,
) -> Result<TrainedStage, BoostError> {
    targets.validate()?;
    let set = SampleSet::from_windows(positives, negatives, features, base)?;
    let n = set.len();
    let n_pos = positives.len();

    // Validation windows are scored incrementally as weaks arrive; fall
    // back to the training positives if no separate validation set exists.
    let val_windows: &[GrayImage] = if val_positives.is_empty() { positives } else { val_positives };
    let mut val_prepped: Vec<(IntegralImage, f64)> = Vec::with_capacity(val_windows.len());
    for img in val_windows {
        if img.width != base || img.height != base {
            return Err(BoostError::WindowMismatch { got_w: img.width, got_h: img.height, base });
        }
        let ii = build_integral(img);
        let inv = ii.window_inv_sigma(0, 0, base, base)?;
        val_prepped.push((ii, inv));
    }

    let mut weights = vec![1.0 / n as f64; n];
    let mut weaks: Vec<WeakClassifier> = Vec::new();
    let mut neg_scores = vec![0.0f64; n - n_pos];
    let mut val_scores = vec![0.0f64; val_prepped.len()];
    let mut alpha_sum = 0.0;

    loop {
        let (weak, new_weights) = adaboost_round(&set, &weights)?;
        weights = new_weights;
        alpha_sum += weak.alpha;
        for (local, score) in neg_scores.iter_mut().enumerate() {
            let value = set.value(weak.feature_index, n_pos + local);
            if weak.predicts_positive(value) {
                *score += weak.alpha;
            }
        }
        let feature = &features[weak.feature_index];
        for ((ii, inv_sigma), score) in val_prepped.iter().zip(val_scores.iter_mut()) {
            let value = feature.eval_in_window(ii, 0, 0, 1.0, base, *inv_sigma);
            if weak.predicts_positive(value) {
                *score += weak.alpha;
            }
        }
        weaks.push(weak);

        let threshold = stage_threshold_for(&val_scores, targets.d_min, 0.5 * alpha_sum);
        let fpr = rate_at_or_above(&neg_scores, threshold);
        let detection_rate = rate_at_or_above(&val_scores, threshold);
        let reached = fpr <= targets.f_max;
        if reached || weaks.len() >= targets.max_weaks_per_stage {
            return Ok(TrainedStage {
                stage: Stage { stage_threshold: threshold, weaks },
                fpr,
                detection_rate,
                reached_fpr_target: reached,
            });
        }
    }
}

/// Largest threshold keeping at least `d_min` of the scores passing,
/// capped at `half_votes`. Passing means `score >= threshold`.
fn stage_threshold_for(val_scores: &[f64], d_min: f64, half_votes: f64) -> f64 {
    let n = val_scores.len();
    let needed = ((d_min * n as f64) - 1e-9).ceil().max(0.0) as usize;
    if needed == 0 {
        return half_votes;
    }
    let mut sorted = val_scores.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("scores are finite"));
    let quantile = sorted[needed.min(n) - 1];
    half_votes.min(quantile)
}

fn rate_at_or_above(scores: &[f64], threshold: f64) -> f64 {
    if scores.is_empty() {
        return 0.0;
    }
    scores.iter().filter(|&&s| s >= threshold).count() as f64 / scores.len() as f64
}

/// Per-stage record kept by cascade training.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageReport {
    pub weak_count: usize,
    pub fpr: f64,
    pub detection_rate: f64,
    pub stage_threshold: f64,
    pub reached_fpr_target: bool,
    /// Negatives surviving the cascade after this stage, over the
    /// original pool.
    pub cumulative_fpr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CascadeTrainReport {
    pub stages: Vec<StageReport>,
    /// Fraction of the original negative pool passing the whole cascade.
    pub overall_fpr: f64,
    /// Detection rate of the whole cascade on the validation positives.
    pub overall_detection_rate: f64,
    /// True when the negative pool emptied before other stop conditions:
    /// no false positives remain, which counts as early success.
    pub negatives_exhausted: bool,
}

/// Trains an attentional cascade. Stage `k` trains on the negatives that
/// pass stages `1..k`; training stops when the overall false-positive
/// rate on the original pool reaches `f_overall`, the stage budget runs
/// out, or the negative pool is exhausted.
pub fn train_cascade(
    positives: &[GrayImage],
    negatives: &[GrayImage],
    targets: &CascadeTrainTargets,
) -> Result<(Cascade, CascadeTrainReport), BoostError> {
    targets.validate()?;
    if positives.is_empty() || negatives.is_empty() {
        return Err(BoostError::EmptySamples);
    }
    let base = positives[0].width;
    if positives[0].height != base {
        return Err(BoostError::WindowMismatch {
            got_w: positives[0].width,
            got_h: positives[0].height,
            base,
        });
    }
    let features = enumerate_features(base);

    // Hold out the tail fifth of the positives for threshold validation;
    // tiny sets reuse the training positives.
    let (train_pos, val_pos): (&[GrayImage], &[GrayImage]) = if positives.len() >= 5 {
        positives.split_at(positives.len() - positives.len() / 5)
    } else {
        (positives, positives)
    };

    let total_negatives = negatives.len();
    let mut active: Vec<GrayImage> = negatives.to_vec();
    let mut cascade = Cascade { base_window: base, stages: Vec::new(), feature_table: features };
    let mut report = CascadeTrainReport {
        stages: Vec::new(),
        overall_fpr: 1.0,
        overall_detection_rate: 1.0,
        negatives_exhausted: false,
    };

    for _ in 0..targets.max_stages {
        let trained = train_stage(
            train_pos,
            &active,
            val_pos,
            &cascade.feature_table,
            base,
            targets,
        )?;
        active.retain(|img| trained.stage.passes_image(img, &cascade.feature_table));
        let cumulative_fpr = active.len() as f64 / total_negatives as f64;
        report.stages.push(StageReport {
            weak_count: trained.stage.weaks.len(),
            fpr: trained.fpr,
            detection_rate: trained.detection_rate,
            stage_threshold: trained.stage.stage_threshold,
            reached_fpr_target: trained.reached_fpr_target,
            cumulative_fpr,
        });
        cascade.stages.push(trained.stage);
        report.overall_fpr = cumulative_fpr;

        if active.is_empty() {
            report.negatives_exhausted = true;
            break;
        }
        if report.overall_fpr <= targets.f_overall {
            break;
        }
    }

    report.overall_detection_rate = val_pos
        .iter()
        .filter(|img| cascade.accepts_image(img).unwrap_or(false))
        .count() as f64
        / val_pos.len() as f64;
    Ok((cascade, report))
}
