//! Face detection and recognition toolkit.
//!
//! The pipeline runs in two phases. Detection is a Viola-Jones cascade:
//! Haar-like features evaluated over integral images, decision stumps
//! boosted with AdaBoost and arranged into an attentional cascade that
//! rejects most windows after one or two cheap stages. Recognition crops
//! the detected face, splits it into halves, builds normalized gray and
//! binary histograms and feeds them to a feed-forward network trained with
//! backpropagation under a train/validation/test split with early stopping.
//!
//! Modules follow the data flow:
//!
//! * [`imgio`] — netpbm decode/encode, grayscale conversion, Otsu
//!   binarization.
//! * [`integral`] / [`haar`] — O(1) rectangle sums and Haar feature
//!   enumeration/evaluation.
//! * [`boost`] — decision-stump AdaBoost and cascade training.
//! * [`detect`] — multi-scale sliding-window scanning, detection grouping
//!   and region-constrained facial-feature detection.
//! * [`features`] — half-split segmentation and histogram feature vectors.
//! * [`mlp`] — the backpropagation network, training loop and reports.
//! * [`pipeline`] — enrollment, recognition, evaluation and model
//!   persistence.
//! * [`synth`] — deterministic synthetic corpora used by the test suites,
//!   benchmarks and the browser demo.
//!
//! Everything is deterministic: all randomness flows from explicit 64-bit
//! seeds through [`rng::SplitMix64`], and parallel code paths reduce in a
//! fixed order so thread count never changes a result.

pub mod boost;
pub mod detect;
pub mod features;
pub mod haar;
pub mod imgio;
pub mod integral;
pub mod mlp;
pub mod pipeline;
pub mod rng;
pub mod synth;

pub use boost::{Cascade, CascadeTrainReport, CascadeTrainTargets, Stage, WeakClassifier};
pub use detect::{Detection, FacePart, Rect, ScanParams};
pub use features::{FeatureConfig, FeatureVector, Histogram, SplitAxis};
pub use haar::{HaarFeature, HaarKind};
pub use imgio::{BinaryImage, GrayImage, RasterImage};
pub use integral::IntegralImage;
pub use mlp::{DataSplit, Network, TrainConfig, TrainReport};
pub use pipeline::{EvalReport, ModelConfig, RecognizerModel};
pub use rng::SplitMix64;
