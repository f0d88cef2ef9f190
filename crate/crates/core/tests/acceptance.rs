//! Acceptance suite: one test per release criterion, each printing a
//! single PASS line with its measurements (run with `-- --nocapture` to
//! see them). Tolerances and time budgets are pinned in the assertions.

use std::time::Instant;

use facekit::boost::{
    adaboost_round, train_cascade, train_stage, CascadeTrainTargets, SampleSet, WeakClassifier,
};
use facekit::features::{build_feature_vector, gray_histogram, split_halves, FeatureConfig};
use facekit::imgio::GrayImage;
use facekit::integral::build_integral;
use facekit::mlp::{
    self, gradient_check, init_network, split_dataset, Activation, TrainConfig,
};
use facekit::pipeline::{
    self, enroll, evaluate, model_from_json, model_to_json, recognize, ModelConfig, Recognition,
};
use facekit::rng::SplitMix64;
use facekit::synth::{self, FaceStyle};
use facekit::{Cascade, SplitAxis};

fn pass(criterion: u32, name: &str, details: &str) {
    println!("ACCEPTANCE {criterion:02} {name}: PASS ({details})");
}

fn random_image(w: u32, h: u32, rng: &mut SplitMix64) -> GrayImage {
    GrayImage::from_fn(w, h, |_, _| (rng.next_u64() % 256) as u8)
}

/// Criterion 1: integral-image rectangle sums are exact against brute
/// force on 200 random images and 1000 random rectangles, in under 5 s.
#[test]
fn acceptance_01_integral_exactness() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xACCE_0001);
    let mut rect_count = 0usize;
    for _ in 0..200 {
        let w = 2 + rng.below(63) as u32;
        let h = 2 + rng.below(63) as u32;
        let img = random_image(w, h, &mut rng);
        let ii = build_integral(&img);
        for _ in 0..5 {
            let x = rng.below(w as usize) as u32;
            let y = rng.below(h as usize) as u32;
            let rw = 1 + rng.below((w - x) as usize) as u32;
            let rh = 1 + rng.below((h - y) as usize) as u32;
            let mut brute = 0u64;
            for yy in y..y + rh {
                for xx in x..x + rw {
                    brute += img.pixel(xx, yy) as u64;
                }
            }
            assert_eq!(ii.rect_sum(x, y, rw, rh).unwrap(), brute);
            rect_count += 1;
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(rect_count, 1000);
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    pass(1, "integral-exactness", &format!("{rect_count} rectangles exact, {elapsed:?}"));
}

/// Criterion 2: backpropagation matches central finite differences to a
/// relative error below 1e-6 on 100 random networks and samples, < 30 s.
#[test]
fn acceptance_02_gradient_correctness() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xACCE_0002);
    let mut worst = 0.0f64;
    // Central differences carry ~5e-13 of absolute rounding noise, so a
    // fair relative comparison needs every true gradient component
    // bounded away from zero. The draws guarantee that structurally:
    // inputs and weights have magnitude floors, output weights and
    // biases are positive, and targets sit below every reachable
    // output, so no delta can cancel.
    for draw in 0..100u64 {
        let sizes = [2 + rng.below(7), 1 + rng.below(8), 1 + rng.below(5)];
        let mut net = init_network(&sizes, 0x9000 + draw).unwrap();
        let signed = |rng: &mut SplitMix64| {
            let sign = if rng.next_f64() < 0.5 { -1.0 } else { 1.0 };
            sign * rng.uniform(0.15, 0.35)
        };
        for w in &mut net.weights[0] {
            *w = signed(&mut rng);
        }
        for b in &mut net.biases[0] {
            *b = signed(&mut rng);
        }
        for w in &mut net.weights[1] {
            *w = rng.uniform(0.15, 0.35);
        }
        for b in &mut net.biases[1] {
            *b = rng.uniform(0.1, 0.3);
        }
        if draw % 3 == 0 {
            net.output_activation = Activation::Linear;
        }
        let x: Vec<f64> = (0..sizes[0])
            .map(|_| {
                let sign = if rng.next_f64() < 0.5 { -1.0 } else { 1.0 };
                sign * rng.uniform(0.25, 1.0)
            })
            .collect();
        let t: Vec<f64> = (0..sizes[2]).map(|_| rng.uniform(0.02, 0.12)).collect();
        let err = gradient_check(&net, &x, &t, 1e-5).unwrap();
        worst = worst.max(err);
    }
    let elapsed = start.elapsed();
    assert!(worst < 1e-6, "worst relative error {worst:e}");
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    pass(2, "gradient-correctness", &format!("max rel error {worst:.3e}, {elapsed:?}"));
}

/// Criterion 3: XOR training (hidden [4], lr 0.5, <= 10000 epochs)
/// reaches train MSE < 0.01 in at least 8 of 10 fixed seeds, < 10 s.
#[test]
fn acceptance_03_xor_convergence() {
    let start = Instant::now();
    let data: Vec<(Vec<f64>, Vec<f64>)> = vec![
        (vec![0.0, 0.0], vec![0.0]),
        (vec![0.0, 1.0], vec![1.0]),
        (vec![1.0, 0.0], vec![1.0]),
        (vec![1.0, 1.0], vec![0.0]),
    ];
    let mut converged = 0;
    for seed in 0..10u64 {
        let config = TrainConfig {
            learning_rate: 0.5,
            max_epochs: 10_000,
            patience: usize::MAX,
            split: (1.0, 0.0, 0.0),
            restarts: 1,
            hidden_sizes: vec![4],
            seed,
            shuffle_each_epoch: true,
            output_activation: Activation::Sigmoid,
        };
        let (_, report) = mlp::train(&data, &config).unwrap();
        if report.final_train_mse < 0.01 {
            converged += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(converged >= 8, "only {converged}/10 seeds converged");
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    pass(3, "xor-convergence", &format!("{converged}/10 seeds, {elapsed:?}"));
}

/// Criterion 4: AdaBoost on a 200-sample linearly separable set drives
/// the strong classifier's training error to zero within 10 rounds,
/// non-increasing round over round, < 10 s.
#[test]
fn acceptance_04_adaboost_sanity() {
    let start = Instant::now();
    // Separable by x + y > 1 with a margin; single axis-aligned stumps
    // cannot separate it, so boosting has to combine several.
    let mut rng = SplitMix64::new(0xACCE_0004 ^ 25u64.wrapping_mul(0x1234567));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut labels: Vec<i8> = Vec::new();
    while labels.len() < 200 {
        let x = rng.next_f64();
        let y = rng.next_f64();
        if (x + y - 1.0).abs() < 0.15 {
            continue;
        }
        xs.push(x);
        ys.push(y);
        labels.push(if x + y > 1.0 { 1 } else { -1 });
    }
    let set = SampleSet::from_values(vec![xs, ys], labels.clone()).unwrap();

    let strong_error = |weaks: &[WeakClassifier]| -> f64 {
        let alpha_sum: f64 = weaks.iter().map(|w| w.alpha).sum();
        let mistakes = (0..200)
            .filter(|&i| {
                let score: f64 = weaks
                    .iter()
                    .map(|w| {
                        if w.predicts_positive(set.value(w.feature_index, i)) {
                            w.alpha
                        } else {
                            0.0
                        }
                    })
                    .sum();
                (score >= 0.5 * alpha_sum) != (labels[i] > 0)
            })
            .count();
        mistakes as f64 / 200.0
    };

    let mut weights = vec![1.0 / 200.0; 200];
    let mut weaks = Vec::new();
    let mut errors = Vec::new();
    for _ in 0..10 {
        let (weak, updated) = adaboost_round(&set, &weights).unwrap();
        weights = updated;
        weaks.push(weak);
        errors.push(strong_error(&weaks));
        if *errors.last().unwrap() == 0.0 {
            break;
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(*errors.last().unwrap(), 0.0, "errors per round: {errors:?}");
    for pair in errors.windows(2) {
        assert!(pair[1] <= pair[0], "training error increased: {errors:?}");
    }
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    pass(
        4,
        "adaboost-sanity",
        &format!("zero error after {} rounds ({errors:?}), {elapsed:?}", errors.len()),
    );
}

fn split_in_half<T: Clone>(items: &[T]) -> (Vec<T>, Vec<T>) {
    let mid = items.len() / 2;
    (items[..mid].to_vec(), items[mid..].to_vec())
}

/// Criterion 5: a first stage capped at two weak classifiers reaches a
/// detection rate of at least 0.99 with a false-positive rate of at most
/// 0.50 on held-out halves of the synthetic corpus, < 60 s.
#[test]
fn acceptance_05_attentional_stage() {
    let start = Instant::now();
    let (faces, negatives) = synth::detector_corpus(12, 500, 2000, 0xACCE_0005);
    let (train_pos, held_pos) = split_in_half(&faces);
    let (train_neg, held_neg) = split_in_half(&negatives);

    let targets = CascadeTrainTargets {
        d_min: 0.995,
        f_max: 0.5,
        f_overall: 0.01,
        max_stages: 1,
        max_weaks_per_stage: 2,
    };
    let features = facekit::haar::enumerate_features(12);
    let trained =
        train_stage(&train_pos, &train_neg, &[], &features, 12, &targets).unwrap();
    assert!(trained.stage.weaks.len() <= 2);

    let detection = held_pos
        .iter()
        .filter(|img| trained.stage.passes_image(img, &features))
        .count() as f64
        / held_pos.len() as f64;
    let fpr = held_neg
        .iter()
        .filter(|img| trained.stage.passes_image(img, &features))
        .count() as f64
        / held_neg.len() as f64;

    let elapsed = start.elapsed();
    assert!(detection >= 0.99, "held-out detection {detection}");
    assert!(fpr <= 0.50, "held-out FPR {fpr}");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    pass(
        5,
        "attentional-stage",
        &format!(
            "{} weaks, held-out detection {detection:.4}, FPR {fpr:.4}, {elapsed:?}",
            trained.stage.weaks.len()
        ),
    );
}

/// Criterion 6: cascading multiplies per-stage rejection: a cascade
/// trained with per-stage f_max 0.5 for up to 6 stages reaches held-out
/// FPR <= 0.05 while keeping held-out detection >= 0.90, < 5 min.
#[test]
fn acceptance_06_cascade_multiplication() {
    let start = Instant::now();
    let (faces, negatives) = synth::detector_corpus(12, 500, 2000, 0xACCE_0006);
    let (train_pos, held_pos) = split_in_half(&faces);
    let (train_neg, held_neg) = split_in_half(&negatives);

    let targets = CascadeTrainTargets {
        d_min: 0.99,
        f_max: 0.5,
        f_overall: 0.001,
        max_stages: 6,
        max_weaks_per_stage: 2,
    };
    let (cascade, report) = train_cascade(&train_pos, &train_neg, &targets).unwrap();

    let detection = held_pos
        .iter()
        .filter(|img| cascade.accepts_image(img).unwrap())
        .count() as f64
        / held_pos.len() as f64;
    let fpr = held_neg
        .iter()
        .filter(|img| cascade.accepts_image(img).unwrap())
        .count() as f64
        / held_neg.len() as f64;

    let elapsed = start.elapsed();
    assert!(fpr <= 0.05, "held-out FPR {fpr}");
    assert!(detection >= 0.90, "held-out detection {detection}");
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    pass(
        6,
        "cascade-multiplication",
        &format!(
            "{} stages, held-out detection {detection:.4}, FPR {fpr:.4}, exhausted={}, {elapsed:?}",
            report.stages.len(),
            report.negatives_exhausted
        ),
    );
}

/// A face cascade for the recognition pipeline, trained on windows
/// rendered in all three identity styles.
fn identity_face_cascade(seed: u64) -> Cascade {
    let mut rng = SplitMix64::new(seed);
    let mut positives = Vec::new();
    for (_, style) in FaceStyle::identities() {
        for _ in 0..120 {
            positives.push(synth::face_window(12, &style, &mut rng));
        }
    }
    let negatives: Vec<GrayImage> =
        (0..1200).map(|_| synth::negative_window(12, &mut rng)).collect();
    let targets = CascadeTrainTargets {
        d_min: 0.995,
        f_max: 0.4,
        f_overall: 0.01,
        max_stages: 4,
        max_weaks_per_stage: 8,
    };
    train_cascade(&positives, &negatives, &targets).unwrap().0
}

type Corpus = Vec<(String, GrayImage)>;

fn identity_train_test_corpora(
    seed: u64,
    per_identity: usize,
    train_per_identity: usize,
) -> (Corpus, Corpus) {
    let corpus = synth::identity_corpus(per_identity, seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (label, img) in corpus {
        let seen = train.iter().filter(|(l, _): &&(String, GrayImage)| *l == label).count()
            + test.iter().filter(|(l, _): &&(String, GrayImage)| *l == label).count();
        if seen.rem_euclid(per_identity) < train_per_identity {
            train.push((label, img));
        } else {
            test.push((label, img));
        }
    }
    (train, test)
}

/// Criterion 7: the full pipeline on the synthetic 3-identity corpus
/// (20 images each, noise sigma 8, 15 train / 5 test per identity)
/// reaches test accuracy >= 0.85 with default enrollment, < 2 min.
#[test]
fn acceptance_07_end_to_end_recognition() {
    let start = Instant::now();
    let cascade = identity_face_cascade(0xACCE_0007);
    let (train_corpus, test_corpus) = identity_train_test_corpora(0xACCE_0107, 20, 15);
    assert_eq!(train_corpus.len(), 45);
    assert_eq!(test_corpus.len(), 15);

    let config = ModelConfig::with_cascade(cascade);
    let (model, report) = enroll(&train_corpus, &config, &TrainConfig::default()).unwrap();
    let eval = evaluate(&model, &test_corpus).unwrap();

    let elapsed = start.elapsed();
    assert!(
        eval.accuracy >= 0.85,
        "test accuracy {} (skipped {} at enroll, {} unknown at eval)",
        eval.accuracy,
        report.skipped.len(),
        eval.unknown_count
    );
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    pass(
        7,
        "end-to-end-recognition",
        &format!(
            "test accuracy {:.4} on 15 held-out images, {} skipped, {elapsed:?}",
            eval.accuracy,
            report.skipped.len()
        ),
    );
}

fn curves_csv(report: &facekit::TrainReport) -> String {
    let mut csv = String::from("epoch,train_mse,val_mse,test_mse\n");
    for (epoch, r) in report.epochs.iter().enumerate() {
        csv.push_str(&format!("{epoch},{},{},{}\n", r.train_mse, r.val_mse, r.test_mse));
    }
    csv
}

/// Criterion 8: enrollment is deterministic: identical corpus and seed
/// give bit-identical model JSON and curve CSVs, and a 4-thread pool
/// matches a 1-thread pool, < 2 min.
#[test]
fn acceptance_08_determinism() {
    let start = Instant::now();
    let cascade = identity_face_cascade(0xACCE_0008);
    let (train_corpus, _) = identity_train_test_corpora(0xACCE_0108, 8, 6);
    let config = ModelConfig::with_cascade(cascade);
    let train_config = TrainConfig { max_epochs: 60, ..TrainConfig::default() };

    let run = |threads: usize| -> (String, String) {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let (model, report) = enroll(&train_corpus, &config, &train_config).unwrap();
            (model_to_json(&model).unwrap(), curves_csv(&report.train))
        })
    };

    let (model_a, curves_a) = run(1);
    let (model_b, curves_b) = run(1);
    let (model_c, curves_c) = run(4);
    let elapsed = start.elapsed();

    assert_eq!(model_a, model_b, "same-thread reruns differ");
    assert_eq!(curves_a, curves_b);
    assert_eq!(model_a, model_c, "4-thread run differs from 1-thread run");
    assert_eq!(curves_a, curves_c);
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    pass(
        8,
        "determinism",
        &format!("{} model bytes identical across reruns and thread counts, {elapsed:?}", model_a.len()),
    );
}

/// Criterion 9: with noisy validation labels, training halts within
/// `patience` epochs of the recorded validation minimum, and the
/// restored network reproduces the recorded best validation MSE exactly.
#[test]
fn acceptance_09_early_stopping_contract() {
    let mut rng = SplitMix64::new(0xACCE_0009);
    let n = 60;
    let mut data: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .map(|_| {
            let x = rng.next_f64();
            let y = rng.next_f64();
            (vec![x, y], vec![if x > y { 1.0 } else { 0.0 }])
        })
        .collect();

    let config = TrainConfig {
        max_epochs: 400,
        patience: 6,
        restarts: 1,
        hidden_sizes: vec![6],
        split: (0.6, 0.2, 0.2),
        ..TrainConfig::default()
    };
    // Flip validation targets so validation MSE turns against training.
    let split = split_dataset(n, config.split, config.seed).unwrap();
    for &i in &split.val {
        data[i].1[0] = 1.0 - data[i].1[0];
    }

    let (net, report) = mlp::train(&data, &config).unwrap();
    let last_epoch = report.epochs.len() - 1;
    assert!(
        last_epoch - report.best_epoch <= config.patience,
        "halted {} epochs after the minimum (patience {})",
        last_epoch - report.best_epoch,
        config.patience
    );
    assert!(last_epoch + 1 < config.max_epochs, "patience never triggered");

    let recorded = report.epochs[report.best_epoch].val_mse;
    let mut outputs = Vec::new();
    let mut targets = Vec::new();
    for &i in &report.split.val {
        outputs.push(mlp::output(&net, &data[i].0).unwrap());
        targets.push(data[i].1.clone());
    }
    let recomputed = mlp::mse(&outputs, &targets).unwrap();
    assert_eq!(recorded, recomputed, "restored network does not reproduce best val MSE");
    pass(
        9,
        "early-stopping",
        &format!(
            "stopped {} epochs after best epoch {}, best val MSE reproduced exactly",
            last_epoch - report.best_epoch,
            report.best_epoch
        ),
    );
}

/// Criterion 10: save -> load -> recognize agrees with pre-save
/// recognize on 50 probe images, output for output.
#[test]
fn acceptance_10_persistence() {
    let cascade = identity_face_cascade(0xACCE_000A);
    let (train_corpus, _) = identity_train_test_corpora(0xACCE_010A, 20, 15);
    let config = ModelConfig::with_cascade(cascade);
    // Trained far enough that probes actually produce Known labels, so
    // the agreement check covers both result variants.
    let (model, _) = enroll(&train_corpus, &config, &TrainConfig::default()).unwrap();

    // Probes: fresh identity scenes plus pure-noise images.
    let mut probes: Vec<GrayImage> = Vec::new();
    let styles = FaceStyle::identities();
    for i in 0..50u64 {
        if i % 5 == 4 {
            let mut rng = SplitMix64::new(0xACCE_020A + i);
            probes.push(synth::negative_window(48, &mut rng));
        } else {
            let (_, style) = &styles[(i % 3) as usize];
            probes.push(synth::scene_with_face(48, 48, 30, style, 0xACCE_030A + i).image);
        }
    }

    let before: Vec<Recognition> =
        probes.iter().map(|img| recognize(&model, img).unwrap()).collect();

    let json = model_to_json(&model).unwrap();
    let reloaded = model_from_json(&json).unwrap();
    let after: Vec<Recognition> =
        probes.iter().map(|img| recognize(&reloaded, img).unwrap()).collect();

    assert_eq!(before, after, "recognition changed across save/load");
    let known = before.iter().filter(|r| matches!(r, Recognition::Known { .. })).count();
    pass(10, "persistence", &format!("50 probes agree output-for-output ({known} known)"));
}

/// Criterion 11: histogram identities: whole = left + right bin-wise on
/// 100 random images (exact), and every normalized block sums to 1
/// within 1e-9.
#[test]
fn acceptance_11_histogram_identities() {
    let mut rng = SplitMix64::new(0xACCE_000B);
    for round in 0..100 {
        let w = 2 + rng.below(40) as u32;
        let h = 1 + rng.below(40) as u32;
        let img = random_image(w, h, &mut rng);

        let (left, right) = split_halves(&img, SplitAxis::Vertical).unwrap();
        let whole = gray_histogram(&img);
        let l = gray_histogram(&left);
        let r = gray_histogram(&right);
        for bin in 0..256 {
            assert_eq!(whole.bins[bin], l.bins[bin] + r.bins[bin], "round {round} bin {bin}");
        }

        if h >= 2 {
            let config = FeatureConfig { use_binary: true, ..FeatureConfig::default() };
            let fv = build_feature_vector(&img, &config).unwrap();
            let mut offset = 0;
            for &(kind, len) in &fv.layout {
                let sum: f64 = fv.values[offset..offset + len].iter().sum();
                assert!((sum - 1.0).abs() < 1e-9, "block {kind:?} sums to {sum}");
                offset += len;
            }
        }
    }
    pass(11, "histogram-identities", "whole = left + right exact on 100 images; blocks sum to 1");
}

/// The model schema stays pinned: spot checks of the persisted JSON.
#[test]
fn model_json_schema_spot_checks() {
    let (train_corpus, _) = identity_train_test_corpora(0xACCE_0C0C, 4, 3);
    let mut config = ModelConfig::with_cascade(Cascade::accept_all(12));
    config.scan_params.min_neighbors = 1;
    let train_config = TrainConfig { max_epochs: 10, restarts: 1, ..TrainConfig::default() };
    let (model, _) = enroll(&train_corpus, &config, &train_config).unwrap();
    let json = model_to_json(&model).unwrap();
    assert!(json.starts_with("{\"format_version\":1,\"canonical_size\":[64,64],"));
    assert!(json.contains("\"accept_threshold\":0.5"));
    assert!(json.contains("\"labels\":[\"alice\",\"bob\",\"carol\"]"));
    assert!(json.contains("\"feature_config\":{\"use_whole\":true,\"use_halves\":true,\"use_binary\":false,\"axis\":\"vertical\"}"));
    assert!(json.contains("\"face_cascade\":{\"base_window\":12,\"stages\":["));
    assert!(json.contains("\"network\":{\"layer_sizes\":[768,16,3],\"weights\":[["));
    assert!(json.contains("\"output_activation\":\"sigmoid\""));

    let err = pipeline::model_from_json(&json.replace(
        "\"format_version\":1",
        "\"format_version\":999",
    ));
    assert!(matches!(err, Err(pipeline::ModelError::UnsupportedVersion(999))));
}
