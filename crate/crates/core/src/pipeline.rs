//! End-to-end orchestration: enrollment (detect, crop, featurize, train),
//! recognition, evaluation and model persistence.
//!
//! A [`RecognizerModel`] bundles everything recognition needs: the face
//! cascade (and optional part cascades), the canonical crop size, the
//! feature configuration, the trained network, the identity labels and
//! the acceptance threshold. Models persist as versioned JSON with
//! shortest round-trip number formatting, so save/load reproduces every
//! numeric field bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boost::Cascade;
use crate::detect::{detect_faces, DetectError, FacePart, Rect, ScanParams};
use crate::features::{build_feature_vector, FeatureConfig, FeatureError};
use crate::imgio::{resize_bilinear, GrayImage, ImageError};
use crate::mlp::{self, MlpError, Network, TrainConfig, TrainReport};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unsupported model format_version {0}")]
    UnsupportedVersion(u32),
    #[error("model file violates the schema: {0}")]
    Schema(String),
    #[error("model is dimensionally inconsistent: {0}")]
    Dimension(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("corpus is unusable: {0}")]
    BadCorpus(String),
    #[error("no usable face found for identity {0:?}")]
    NoUsableFaces(String),
    #[error("corpus label {0:?} is not among the model labels")]
    UnknownLabel(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Mlp(#[from] MlpError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Detect(#[from] DetectError),
}

/// Enrollment-time configuration; everything that ends up inside the
/// model plus the scan parameters used to find faces.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub face_cascade: Cascade,
    pub part_cascades: BTreeMap<FacePart, Cascade>,
    pub canonical_size: (u32, u32),
    pub feature_config: FeatureConfig,
    pub accept_threshold: f64,
    pub scan_params: ScanParams,
}

impl ModelConfig {
    pub fn with_cascade(face_cascade: Cascade) -> Self {
        ModelConfig {
            face_cascade,
            part_cascades: BTreeMap::new(),
            canonical_size: (64, 64),
            feature_config: FeatureConfig::default(),
            accept_threshold: 0.5,
            scan_params: ScanParams::default(),
        }
    }
}

/// The persisted recognizer bundle. Field order matches the on-disk
/// schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognizerModel {
    pub format_version: u32,
    pub canonical_size: (u32, u32),
    pub accept_threshold: f64,
    pub labels: Vec<String>,
    pub feature_config: FeatureConfig,
    pub face_cascade: Cascade,
    pub part_cascades: BTreeMap<FacePart, Cascade>,
    pub network: Network,
}

impl RecognizerModel {
    /// Structural checks beyond what serde enforces.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(ModelError::UnsupportedVersion(self.format_version));
        }
        if self.labels.is_empty() {
            return Err(ModelError::Schema("labels must be non-empty".into()));
        }
        let mut unique = self.labels.clone();
        unique.sort();
        unique.dedup();
        if unique.len() != self.labels.len() {
            return Err(ModelError::Schema("labels must be unique".into()));
        }
        if !(0.0..1.0).contains(&self.accept_threshold) {
            return Err(ModelError::Schema(format!(
                "accept_threshold {} outside [0, 1)",
                self.accept_threshold
            )));
        }
        self.network
            .validate()
            .map_err(|e| ModelError::Dimension(e.to_string()))?;
        let expected_input = self.feature_config.vector_len();
        if self.network.input_size() != expected_input {
            return Err(ModelError::Dimension(format!(
                "network input {} but feature config implies {}",
                self.network.input_size(),
                expected_input
            )));
        }
        if self.network.output_size() != self.labels.len() {
            return Err(ModelError::Dimension(format!(
                "network output {} but {} labels",
                self.network.output_size(),
                self.labels.len()
            )));
        }
        for (name, cascade) in std::iter::once(("face", &self.face_cascade))
            .chain(self.part_cascades.iter().map(|(p, c)| (p.label(), c)))
        {
            let features = cascade.feature_table.len();
            for stage in &cascade.stages {
                if stage.weaks.iter().any(|w| w.feature_index >= features) {
                    return Err(ModelError::Dimension(format!(
                        "{name} cascade references a feature outside its table"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One labeled image of a corpus.
pub type LabeledImage = (String, GrayImage);

/// Images skipped during enrollment because no face was detected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedImage {
    pub corpus_index: usize,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct EnrollReport {
    pub train: TrainReport,
    pub skipped: Vec<SkippedImage>,
}

/// Largest grouped detection; ties go to the topmost, then leftmost.
fn largest_face(img: &GrayImage, cascade: &Cascade, params: &ScanParams) -> Option<Rect> {
    let detections = detect_faces(img, cascade, params);
    detections
        .into_iter()
        .map(|d| d.rect)
        .max_by(|a, b| {
            a.area()
                .cmp(&b.area())
                .then(b.y.cmp(&a.y)) // prefer smaller y on equal area
                .then(b.x.cmp(&a.x))
        })
}

/// Detects the face, crops it (clamped to the image) and resizes to the
/// canonical size.
fn canonical_crop(
    img: &GrayImage,
    face: Rect,
    canonical: (u32, u32),
) -> Result<GrayImage, PipelineError> {
    let x = face.x.min(img.width - 1);
    let y = face.y.min(img.height - 1);
    let w = face.w.min(img.width - x).max(1);
    let h = face.h.min(img.height - y).max(1);
    let crop = img.crop(x, y, w, h)?;
    Ok(resize_bilinear(&crop, canonical.0, canonical.1)?)
}

/// Enrolls a labeled corpus: detects the largest face per image, builds
/// histogram features, trains the network on one-hot identity targets.
/// Images with no detected face are skipped and listed in the report; an
/// identity with zero usable faces aborts with an error naming it.
pub fn enroll(
    corpus: &[LabeledImage],
    config: &ModelConfig,
    train_config: &TrainConfig,
) -> Result<(RecognizerModel, EnrollReport), PipelineError> {
    let mut labels: Vec<String> = corpus.iter().map(|(l, _)| l.clone()).collect();
    labels.sort();
    labels.dedup();
    if labels.len() < 2 {
        return Err(PipelineError::BadCorpus(format!(
            "need at least 2 identities, got {}",
            labels.len()
        )));
    }
    for label in &labels {
        let count = corpus.iter().filter(|(l, _)| l == label).count();
        if count < 3 {
            return Err(PipelineError::BadCorpus(format!(
                "identity {label:?} has {count} images, need at least 3"
            )));
        }
    }

    let mut data: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(corpus.len());
    let mut usable = vec![0usize; labels.len()];
    let mut skipped = Vec::new();
    for (index, (label, img)) in corpus.iter().enumerate() {
        let Some(face) = largest_face(img, &config.face_cascade, &config.scan_params) else {
            skipped.push(SkippedImage { corpus_index: index, label: label.clone() });
            continue;
        };
        let crop = canonical_crop(img, face, config.canonical_size)?;
        let features = build_feature_vector(&crop, &config.feature_config)?;
        let class = labels.binary_search(label).expect("label set built from corpus");
        let mut target = vec![0.0; labels.len()];
        target[class] = 1.0;
        usable[class] += 1;
        data.push((features.values, target));
    }
    for (class, &count) in usable.iter().enumerate() {
        if count == 0 {
            return Err(PipelineError::NoUsableFaces(labels[class].clone()));
        }
    }

    let (network, train_report) = mlp::train(&data, train_config)?;
    let model = RecognizerModel {
        format_version: MODEL_FORMAT_VERSION,
        canonical_size: config.canonical_size,
        accept_threshold: config.accept_threshold,
        labels,
        feature_config: config.feature_config.clone(),
        face_cascade: config.face_cascade.clone(),
        part_cascades: config.part_cascades.clone(),
        network,
    };
    model.validate()?;
    Ok((model, EnrollReport { train: train_report, skipped }))
}

/// Outcome of recognizing one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum Recognition {
    Known { label: String, confidence: f64 },
    Unknown { max_confidence: f64 },
}

/// Recognizes with explicit scan parameters.
pub fn recognize_with(
    model: &RecognizerModel,
    img: &GrayImage,
    params: &ScanParams,
) -> Result<Recognition, PipelineError> {
    let Some(face) = largest_face(img, &model.face_cascade, params) else {
        return Ok(Recognition::Unknown { max_confidence: 0.0 });
    };
    let crop = canonical_crop(img, face, model.canonical_size)?;
    let features = build_feature_vector(&crop, &model.feature_config)?;
    let outputs = mlp::output(&model.network, &features.values)?;
    let mut winner = 0usize;
    for (i, &v) in outputs.iter().enumerate() {
        if v > outputs[winner] {
            winner = i;
        }
    }
    let confidence = outputs[winner];
    if confidence >= model.accept_threshold {
        Ok(Recognition::Known { label: model.labels[winner].clone(), confidence })
    } else {
        Ok(Recognition::Unknown { max_confidence: confidence })
    }
}

/// Detect, crop, featurize, classify. The winning identity is returned
/// only if its output reaches the acceptance threshold; otherwise the
/// result is unknown. No detected face gives unknown with confidence 0.
pub fn recognize(
    model: &RecognizerModel,
    img: &GrayImage,
) -> Result<Recognition, PipelineError> {
    recognize_with(model, img, &ScanParams::default())
}

/// Per-identity counts of an evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelStats {
    pub label: String,
    pub support: usize,
    pub precision: f64,
    pub recall: f64,
}

/// Evaluation summary: accuracy counts unknowns as incorrect; the
/// confusion matrix has one row per true label (model order) and one
/// column per predicted label plus a final unknown column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub total: usize,
    pub unknown_count: usize,
    pub per_label: Vec<LabelStats>,
    pub confusion: Vec<Vec<usize>>,
}

/// Runs [`recognize`] over a labeled corpus in input order.
pub fn evaluate(
    model: &RecognizerModel,
    corpus: &[LabeledImage],
) -> Result<EvalReport, PipelineError> {
    if corpus.is_empty() {
        return Err(PipelineError::BadCorpus("evaluation corpus is empty".into()));
    }
    let label_index = |label: &str| -> Result<usize, PipelineError> {
        model
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| PipelineError::UnknownLabel(label.to_string()))
    };

    let k = model.labels.len();
    let mut confusion = vec![vec![0usize; k + 1]; k];
    let mut correct = 0usize;
    let mut unknown_count = 0usize;
    for (label, img) in corpus {
        let truth = label_index(label)?;
        match recognize(model, img)? {
            Recognition::Known { label: predicted, .. } => {
                let p = label_index(&predicted).expect("prediction uses model labels");
                confusion[truth][p] += 1;
                if p == truth {
                    correct += 1;
                }
            }
            Recognition::Unknown { .. } => {
                confusion[truth][k] += 1;
                unknown_count += 1;
            }
        }
    }

    let per_label = model
        .labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let support: usize = confusion[i].iter().sum();
            let hits = confusion[i][i];
            let predicted: usize = confusion.iter().map(|row| row[i]).sum();
            LabelStats {
                label: label.clone(),
                support,
                precision: if predicted == 0 { 0.0 } else { hits as f64 / predicted as f64 },
                recall: if support == 0 { 0.0 } else { hits as f64 / support as f64 },
            }
        })
        .collect();

    Ok(EvalReport {
        accuracy: correct as f64 / corpus.len() as f64,
        total: corpus.len(),
        unknown_count,
        per_label,
        confusion,
    })
}

/// Serializes a model to its canonical JSON encoding.
pub fn model_to_json(model: &RecognizerModel) -> Result<String, ModelError> {
    serde_json::to_string(model).map_err(|e| ModelError::Schema(e.to_string()))
}

/// Parses and validates a model from JSON. The format version is checked
/// before the rest of the schema so old files fail with a version error.
pub fn model_from_json(json: &str) -> Result<RecognizerModel, ModelError> {
    #[derive(Deserialize)]
    struct VersionProbe {
        format_version: u32,
    }
    let probe: VersionProbe =
        serde_json::from_str(json).map_err(|e| ModelError::Schema(e.to_string()))?;
    if probe.format_version != MODEL_FORMAT_VERSION {
        return Err(ModelError::UnsupportedVersion(probe.format_version));
    }
    let model: RecognizerModel =
        serde_json::from_str(json).map_err(|e| ModelError::Schema(e.to_string()))?;
    model.validate()?;
    Ok(model)
}

pub fn save_model(model: &RecognizerModel, path: impl AsRef<Path>) -> Result<(), ModelError> {
    fs::write(path, model_to_json(model)?)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<RecognizerModel, ModelError> {
    let json = fs::read_to_string(path)?;
    model_from_json(&json)
}
