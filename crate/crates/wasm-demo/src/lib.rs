//! Browser demo bindings. Three interactive operations, all running on
//! deterministic synthetic imagery so the page needs no uploads:
//!
//! 1. segmentation explorer - gray/binary views, half splits and their
//!    histograms at an adjustable threshold;
//! 2. detector playground - train a small cascade in the browser, then
//!    scan scenes with planted faces at adjustable scan parameters;
//! 3. recognizer trainer - enroll a three-identity corpus and return the
//!    per-epoch MSE curves, held-out accuracy and confusion matrix.
//!
//! Pixel buffers cross the boundary as flat `Uint8Array`s; structured
//! results cross as JSON strings.

use wasm_bindgen::prelude::*;

use facekit::boost::{train_cascade, Cascade, CascadeTrainTargets};
use facekit::detect::{detect_faces, scan, ScanParams};
use facekit::features::{binary_histogram, gray_histogram, split_halves, SplitAxis};
use facekit::imgio::{binarize, otsu_threshold};
use facekit::mlp::TrainConfig;
use facekit::pipeline::{enroll, evaluate, recognize, ModelConfig, Recognition, RecognizerModel};
use facekit::rng::SplitMix64;
use facekit::synth::{self, FaceStyle};

fn style_for(profile: usize) -> FaceStyle {
    let identities = FaceStyle::identities();
    match identities.into_iter().nth(profile) {
        Some((_, style)) => style,
        None => FaceStyle::generic(),
    }
}

fn stringify(err: impl std::fmt::Display) -> String {
    err.to_string()
}

#[wasm_bindgen]
pub struct Demo {
    detector: Option<Cascade>,
    recognizer: Option<RecognizerModel>,
}

impl Default for Demo {
    fn default() -> Self {
        Self::new()
    }
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Demo {
        Demo { detector: None, recognizer: None }
    }

    // --- operation 1: segmentation and histograms ---

    /// Renders one synthetic face (profile 0..=2, anything else generic)
    /// as a flat grayscale buffer.
    pub fn face_pixels(&self, profile: usize, seed: u64, size: u32) -> Vec<u8> {
        let mut rng = SplitMix64::new(seed);
        synth::face_window(size.max(8), &style_for(profile), &mut rng).data
    }

    /// Otsu threshold of the rendered face.
    pub fn face_otsu(&self, profile: usize, seed: u64, size: u32) -> u8 {
        let mut rng = SplitMix64::new(seed);
        let img = synth::face_window(size.max(8), &style_for(profile), &mut rng);
        otsu_threshold(&img)
    }

    /// Binary view at `threshold` (pass a negative value to use Otsu),
    /// scaled to 0/255 for direct display.
    pub fn face_binary_pixels(&self, profile: usize, seed: u64, size: u32, threshold: i32) -> Vec<u8> {
        let mut rng = SplitMix64::new(seed);
        let img = synth::face_window(size.max(8), &style_for(profile), &mut rng);
        let t = if threshold < 0 { otsu_threshold(&img) } else { threshold.min(255) as u8 };
        binarize(&img, t).data.into_iter().map(|v| v * 255).collect()
    }

    /// Gray and binary histograms of the whole face and its two halves:
    /// `{"otsu":..,"threshold":..,"whole":[..256],"left":[..],"right":[..],
    ///   "binary_whole":[2],"binary_left":[2],"binary_right":[2]}`.
    pub fn face_histograms(
        &self,
        profile: usize,
        seed: u64,
        size: u32,
        threshold: i32,
    ) -> Result<String, String> {
        let mut rng = SplitMix64::new(seed);
        let img = synth::face_window(size.max(8), &style_for(profile), &mut rng);
        let otsu = otsu_threshold(&img);
        let t = if threshold < 0 { otsu } else { threshold.min(255) as u8 };
        let (left, right) = split_halves(&img, SplitAxis::Vertical).map_err(stringify)?;
        let value = serde_json::json!({
            "otsu": otsu,
            "threshold": t,
            "whole": gray_histogram(&img).bins,
            "left": gray_histogram(&left).bins,
            "right": gray_histogram(&right).bins,
            "binary_whole": binary_histogram(&binarize(&img, t)).bins,
            "binary_left": binary_histogram(&binarize(&left, t)).bins,
            "binary_right": binary_histogram(&binarize(&right, t)).bins,
        });
        Ok(value.to_string())
    }

    // --- operation 2: detector playground ---

    /// Trains a small cascade on the jittered synthetic corpus and keeps
    /// it for scanning. Returns the per-stage training report.
    pub fn train_detector(
        &mut self,
        seed: u64,
        max_stages: usize,
        n_pos: usize,
        n_neg: usize,
    ) -> Result<String, String> {
        let (positives, negatives) =
            synth::detector_corpus(12, n_pos.clamp(40, 500), n_neg.clamp(160, 2000), seed);
        let targets = CascadeTrainTargets {
            d_min: 0.99,
            f_max: 0.5,
            f_overall: 0.001,
            max_stages: max_stages.clamp(1, 6),
            max_weaks_per_stage: 4,
        };
        let (cascade, report) = train_cascade(&positives, &negatives, &targets).map_err(stringify)?;
        self.detector = Some(cascade);
        let stages: Vec<serde_json::Value> = report
            .stages
            .iter()
            .map(|s| {
                serde_json::json!({
                    "weaks": s.weak_count,
                    "fpr": s.fpr,
                    "detection": s.detection_rate,
                    "cumulative_fpr": s.cumulative_fpr,
                })
            })
            .collect();
        Ok(serde_json::json!({
            "stages": stages,
            "overall_fpr": report.overall_fpr,
            "overall_detection": report.overall_detection_rate,
            "negatives_exhausted": report.negatives_exhausted,
        })
        .to_string())
    }

    /// A scene with one planted face, as flat grayscale pixels.
    pub fn scene_pixels(&self, seed: u64, w: u32, h: u32, face_size: u32) -> Vec<u8> {
        synth::scene_with_face(w.max(16), h.max(16), face_size.clamp(12, w.min(h).max(16)), &FaceStyle::generic(), seed)
            .image
            .data
    }

    /// Ground-truth rectangle of the planted face: `{"x":..,"y":..,"w":..,"h":..}`.
    pub fn scene_truth(&self, seed: u64, w: u32, h: u32, face_size: u32) -> String {
        let scene = synth::scene_with_face(
            w.max(16),
            h.max(16),
            face_size.clamp(12, w.min(h).max(16)),
            &FaceStyle::generic(),
            seed,
        );
        serde_json::json!({
            "x": scene.face.x, "y": scene.face.y, "w": scene.face.w, "h": scene.face.h,
        })
        .to_string()
    }

    /// Scans the scene with the trained cascade. Returns grouped
    /// detections and the raw window count:
    /// `{"raw":n,"detections":[{"x","y","w","h","neighbors"}]}`.
    pub fn detect_scene(
        &self,
        seed: u64,
        w: u32,
        h: u32,
        face_size: u32,
        scale_factor: f64,
        min_neighbors: usize,
    ) -> Result<String, String> {
        let cascade = self
            .detector
            .as_ref()
            .ok_or_else(|| "train the detector first".to_string())?;
        let scene = synth::scene_with_face(
            w.max(16),
            h.max(16),
            face_size.clamp(12, w.min(h).max(16)),
            &FaceStyle::generic(),
            seed,
        );
        let params = ScanParams {
            scale_factor: scale_factor.max(1.02),
            min_neighbors: min_neighbors.max(1),
            ..ScanParams::default()
        };
        let raw = scan(&scene.image, cascade, &params).len();
        let detections: Vec<serde_json::Value> = detect_faces(&scene.image, cascade, &params)
            .iter()
            .map(|d| {
                serde_json::json!({
                    "x": d.rect.x, "y": d.rect.y, "w": d.rect.w, "h": d.rect.h,
                    "neighbors": d.neighbors,
                })
            })
            .collect();
        Ok(serde_json::json!({ "raw": raw, "detections": detections }).to_string())
    }

    // --- operation 3: recognizer training ---

    /// Enrolls a synthetic three-identity corpus (using the trained
    /// detector, or a freshly trained one) and evaluates held-out images.
    /// Returns training curves and evaluation statistics.
    pub fn train_recognizer(
        &mut self,
        seed: u64,
        per_identity: usize,
        max_epochs: usize,
        restarts: usize,
    ) -> Result<String, String> {
        if self.detector.is_none() {
            self.train_detector(seed ^ 0x00DE_7EC7, 3, 240, 960)?;
        }
        let cascade = self.detector.clone().expect("just trained");

        let per_identity = per_identity.clamp(6, 30);
        let train_count = (per_identity * 3) / 4;
        let corpus = synth::identity_corpus(per_identity, seed);
        let mut train_set = Vec::new();
        let mut test_set = Vec::new();
        let mut seen = std::collections::BTreeMap::new();
        for (label, img) in corpus {
            let count = seen.entry(label.clone()).or_insert(0usize);
            if *count < train_count {
                train_set.push((label, img));
            } else {
                test_set.push((label, img));
            }
            *count += 1;
        }

        let config = ModelConfig::with_cascade(cascade);
        let train_config = TrainConfig {
            seed,
            max_epochs: max_epochs.clamp(20, 2000),
            restarts: restarts.clamp(1, 8),
            // Small corpora plateau longer than the library default
            // covers; the demo favors finishing the descent.
            patience: 150,
            ..TrainConfig::default()
        };
        let (model, report) = enroll(&train_set, &config, &train_config).map_err(stringify)?;
        let eval = evaluate(&model, &test_set).map_err(stringify)?;

        let curves: Vec<serde_json::Value> = report
            .train
            .epochs
            .iter()
            .map(|e| serde_json::json!([e.train_mse, e.val_mse, e.test_mse]))
            .collect();
        let result = serde_json::json!({
            "labels": model.labels,
            "curves": curves,
            "best_epoch": report.train.best_epoch,
            "restart": report.train.restart_index,
            "final_val_mse": report.train.final_val_mse,
            "regression_r": report.train.val_r.map(|r| r.r),
            "skipped": report.skipped.len(),
            "test_accuracy": eval.accuracy,
            "unknown": eval.unknown_count,
            "confusion": eval.confusion,
        });
        self.recognizer = Some(model);
        Ok(result.to_string())
    }

    /// Recognizes a fresh scene of the given identity profile with the
    /// enrolled model: `{"truth":..,"result":"label"|"unknown","confidence":..}`.
    pub fn recognize_scene(&self, profile: usize, seed: u64) -> Result<String, String> {
        let model = self
            .recognizer
            .as_ref()
            .ok_or_else(|| "train the recognizer first".to_string())?;
        let identities = FaceStyle::identities();
        let (truth, style) = identities
            .get(profile % identities.len())
            .cloned()
            .expect("profiles are non-empty");
        let scene = synth::scene_with_face(48, 48, 32, &style, seed);
        let answer = recognize(model, &scene.image).map_err(stringify)?;
        let value = match answer {
            Recognition::Known { label, confidence } => {
                serde_json::json!({ "truth": truth, "result": label, "confidence": confidence })
            }
            Recognition::Unknown { max_confidence } => {
                serde_json::json!({ "truth": truth, "result": "unknown", "confidence": max_confidence })
            }
        };
        Ok(value.to_string())
    }

    /// Pixels of a fresh identity scene, for drawing next to the
    /// recognition verdict.
    pub fn identity_scene_pixels(&self, profile: usize, seed: u64) -> Vec<u8> {
        let identities = FaceStyle::identities();
        let (_, style) = identities[profile % identities.len()].clone();
        synth::scene_with_face(48, 48, 32, &style, seed).image.data
    }
}

/// Crate version string for the page footer.
#[wasm_bindgen]
pub fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}
