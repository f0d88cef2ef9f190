//! Train a detector and a recognizer on synthetic corpora, end to end.

use facekit::boost::{train_cascade, CascadeTrainTargets};
use facekit::mlp::TrainConfig;
use facekit::pipeline::{enroll, recognize, ModelConfig};
use facekit::synth;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Synthetic corpora keep the example self-contained; swap in your
    // own windows and labeled images.
    let (faces, background) = synth::detector_corpus(12, 300, 1200, 7);
    let (cascade, _) =
        train_cascade(&faces, &background, &CascadeTrainTargets::default())?;

    let corpus = synth::identity_corpus(20, 42);
    let config = ModelConfig::with_cascade(cascade);
    let (model, _) = enroll(&corpus, &config, &TrainConfig::default())?;

    println!("{:?}", recognize(&model, &corpus[0].1)?);
    Ok(())
}
