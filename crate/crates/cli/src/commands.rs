//! Subcommand implementations. Every handler returns `Err(String)` for
//! domain errors, which `main` reports on stderr with exit code 1.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use facekit::boost::{train_cascade, Cascade, CascadeTrainTargets};
use facekit::detect::{detect_faces, detect_parts, ScanParams};
use facekit::features::{
    binary_histogram, gray_histogram, split_halves, FeatureConfig, Histogram,
};
use facekit::imgio::{binarize, otsu_threshold};
use facekit::mlp::{gradient_check, init_network, TrainConfig, TrainReport};
use facekit::pipeline::{
    self, load_model, model_from_json, save_model, ModelConfig, Recognition, RecognizerModel,
};
use facekit::rng::SplitMix64;
use facekit::SplitAxis;

use crate::corpus;

/// Either kind of model file `detect` accepts.
enum DetectorFile {
    Recognizer(Box<RecognizerModel>),
    Cascade(Box<Cascade>),
}

fn load_detector_file(path: &Path) -> Result<DetectorFile, String> {
    let json = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&json).map_err(|e| format!("{}: {e}", path.display()))?;
    if value.get("format_version").is_some() {
        let model = model_from_json(&json).map_err(|e| format!("{}: {e}", path.display()))?;
        Ok(DetectorFile::Recognizer(Box::new(model)))
    } else {
        let cascade: Cascade =
            serde_json::from_str(&json).map_err(|e| format!("{}: {e}", path.display()))?;
        Ok(DetectorFile::Cascade(Box::new(cascade)))
    }
}

pub fn detect(
    model_path: &Path,
    scale_factor: Option<f64>,
    min_neighbors: Option<usize>,
    images: &[PathBuf],
) -> Result<(), String> {
    let file = load_detector_file(model_path)?;
    let (face_cascade, part_cascades) = match &file {
        DetectorFile::Recognizer(m) => (&m.face_cascade, m.part_cascades.clone()),
        DetectorFile::Cascade(c) => (c.as_ref(), BTreeMap::new()),
    };
    let mut params = ScanParams::default();
    if let Some(f) = scale_factor {
        if f <= 1.0 {
            return Err(format!("--scale-factor must exceed 1, got {f}"));
        }
        params.scale_factor = f;
    }
    if let Some(n) = min_neighbors {
        params.min_neighbors = n;
    }

    let mut out = String::new();
    for path in images {
        let img = corpus::load_gray_image(path)?;
        writeln!(out, "# {}", path.display()).unwrap();
        for d in detect_faces(&img, face_cascade, &params) {
            writeln!(
                out,
                "face {} {} {} {} {}",
                d.rect.x, d.rect.y, d.rect.w, d.rect.h, d.neighbors
            )
            .unwrap();
            if !part_cascades.is_empty() {
                let parts = detect_parts(&img, d.rect, &part_cascades, &params)
                    .map_err(|e| e.to_string())?;
                for (part, found) in parts {
                    for p in found {
                        writeln!(
                            out,
                            "{} {} {} {} {} {}",
                            part.label(),
                            p.rect.x,
                            p.rect.y,
                            p.rect.w,
                            p.rect.h,
                            p.neighbors
                        )
                        .unwrap();
                    }
                }
            }
        }
    }
    print!("{out}");
    Ok(())
}

fn histogram_csv(hist: &Histogram) -> String {
    let mut csv = String::from("bin,count,frequency\n");
    for (bin, (&count, freq)) in hist.bins.iter().zip(hist.frequencies()).enumerate() {
        writeln!(csv, "{bin},{count},{freq}").unwrap();
    }
    csv
}

pub fn features(
    binary: bool,
    axis: SplitAxis,
    out_dir: Option<&Path>,
    image: &Path,
) -> Result<(), String> {
    let img = corpus::load_gray_image(image)?;
    let (first, second) = split_halves(&img, axis).map_err(|e| e.to_string())?;

    let mut blocks: Vec<(String, Histogram)> = vec![
        ("whole-gray".into(), gray_histogram(&img)),
        ("first-half-gray".into(), gray_histogram(&first)),
        ("second-half-gray".into(), gray_histogram(&second)),
    ];
    if binary {
        let t = otsu_threshold(&img);
        blocks.push(("whole-binary".into(), binary_histogram(&binarize(&img, t))));
        blocks.push(("first-half-binary".into(), binary_histogram(&binarize(&first, t))));
        blocks.push(("second-half-binary".into(), binary_histogram(&binarize(&second, t))));
    }

    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            for (name, hist) in &blocks {
                let path = dir.join(format!("{name}.csv"));
                fs::write(&path, histogram_csv(hist))
                    .map_err(|e| format!("{}: {e}", path.display()))?;
            }
        }
        None => {
            let mut out = String::new();
            for (name, hist) in &blocks {
                writeln!(out, "# {name}").unwrap();
                out.push_str(&histogram_csv(hist));
            }
            print!("{out}");
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn train_detector(
    positives: &Path,
    negatives: &Path,
    stages: usize,
    fmax: f64,
    dmin: f64,
    foverall: f64,
    max_weaks: usize,
    out: &Path,
) -> Result<(), String> {
    let pos = corpus::load_window_dir(positives)?;
    let neg = corpus::load_window_dir(negatives)?;
    let targets = CascadeTrainTargets {
        d_min: dmin,
        f_max: fmax,
        f_overall: foverall,
        max_stages: stages,
        max_weaks_per_stage: max_weaks,
    };
    let (cascade, report) = train_cascade(&pos, &neg, &targets).map_err(|e| e.to_string())?;

    for (i, stage) in report.stages.iter().enumerate() {
        eprintln!(
            "stage {}: {} weaks, fpr {:.4}, detection {:.4}, cumulative fpr {:.4}{}",
            i + 1,
            stage.weak_count,
            stage.fpr,
            stage.detection_rate,
            stage.cumulative_fpr,
            if stage.reached_fpr_target { "" } else { " (weak budget hit)" },
        );
    }
    eprintln!(
        "cascade: {} stages, overall fpr {:.4}, detection {:.4}{}",
        report.stages.len(),
        report.overall_fpr,
        report.overall_detection_rate,
        if report.negatives_exhausted { ", negative pool exhausted" } else { "" },
    );

    let json = serde_json::to_string(&cascade).map_err(|e| e.to_string())?;
    fs::write(out, json).map_err(|e| format!("{}: {e}", out.display()))?;
    Ok(())
}

pub struct EnrollArgs {
    pub corpus: PathBuf,
    pub model_out: PathBuf,
    pub face_cascade: Option<PathBuf>,
    pub hidden: Option<Vec<usize>>,
    pub lr: Option<f64>,
    pub epochs: Option<usize>,
    pub restarts: Option<usize>,
    pub patience: Option<usize>,
    pub seed: u64,
    pub binary: bool,
    pub no_halves: bool,
    pub axis: SplitAxis,
    pub accept_threshold: Option<f64>,
    pub curves_out: Option<PathBuf>,
    pub regression_out: Option<PathBuf>,
}

fn curves_csv(report: &TrainReport) -> String {
    let mut csv = String::from("epoch,train_mse,val_mse,test_mse\n");
    for (epoch, record) in report.epochs.iter().enumerate() {
        writeln!(csv, "{epoch},{},{},{}", record.train_mse, record.val_mse, record.test_mse)
            .unwrap();
    }
    csv
}

fn regression_csv(report: &TrainReport) -> String {
    let mut csv = String::from("split,R,n\n");
    for (name, stat) in
        [("train", &report.train_r), ("val", &report.val_r), ("test", &report.test_r)]
    {
        match stat {
            Some(s) => writeln!(csv, "{name},{},{}", s.r, s.n).unwrap(),
            None => writeln!(csv, "{name},NaN,0").unwrap(),
        }
    }
    csv
}

pub fn enroll(args: EnrollArgs) -> Result<(), String> {
    let corpus = corpus::load_labeled_corpus(&args.corpus)?;
    let face_cascade = match &args.face_cascade {
        Some(path) => {
            let json = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&json).map_err(|e| format!("{}: {e}", path.display()))?
        }
        // Permissive fallback for pre-cropped corpora.
        None => Cascade::accept_all(24),
    };

    let mut config = ModelConfig::with_cascade(face_cascade);
    config.feature_config = FeatureConfig {
        use_whole: true,
        use_halves: !args.no_halves,
        use_binary: args.binary,
        axis: args.axis,
    };
    if let Some(t) = args.accept_threshold {
        config.accept_threshold = t;
    }
    if args.face_cascade.is_none() {
        // Permissive cascade: every window matches, and the largest
        // grouped detection covers most of a pre-cropped face image.
        config.scan_params.min_neighbors = 1;
    }

    let mut train_config = TrainConfig { seed: args.seed, ..TrainConfig::default() };
    if let Some(hidden) = args.hidden {
        train_config.hidden_sizes = hidden;
    }
    if let Some(lr) = args.lr {
        train_config.learning_rate = lr;
    }
    if let Some(epochs) = args.epochs {
        train_config.max_epochs = epochs;
    }
    if let Some(restarts) = args.restarts {
        train_config.restarts = restarts;
    }
    if let Some(patience) = args.patience {
        train_config.patience = patience;
    }

    let (model, report) =
        pipeline::enroll(&corpus, &config, &train_config).map_err(|e| e.to_string())?;
    save_model(&model, &args.model_out).map_err(|e| e.to_string())?;

    for skip in &report.skipped {
        eprintln!("skipped image {} (identity {}): no face detected", skip.corpus_index, skip.label);
    }
    eprintln!(
        "enrolled {} identities from {} images; restart {}, best epoch {}, val mse {}",
        model.labels.len(),
        corpus.len(),
        report.train.restart_index,
        report.train.best_epoch,
        report.train.final_val_mse,
    );

    if let Some(path) = &args.curves_out {
        fs::write(path, curves_csv(&report.train)).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if let Some(path) = &args.regression_out {
        fs::write(path, regression_csv(&report.train))
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

pub fn recognize(model_path: &Path, image: &Path) -> Result<(), String> {
    let model = load_model(model_path).map_err(|e| format!("{}: {e}", model_path.display()))?;
    let img = corpus::load_gray_image(image)?;
    match pipeline::recognize(&model, &img).map_err(|e| e.to_string())? {
        Recognition::Known { label, confidence } => {
            println!("{label} {confidence:.6}");
            Ok(())
        }
        Recognition::Unknown { max_confidence } => {
            println!("unknown {max_confidence:.6}");
            if max_confidence == 0.0 {
                Err("no face detected".into())
            } else {
                Ok(())
            }
        }
    }
}

pub fn eval(model_path: &Path, corpus_dir: &Path, report_out: Option<&Path>) -> Result<(), String> {
    let model = load_model(model_path).map_err(|e| format!("{}: {e}", model_path.display()))?;
    let corpus = corpus::load_labeled_corpus(corpus_dir)?;
    let report = pipeline::evaluate(&model, &corpus).map_err(|e| e.to_string())?;

    let mut out = String::new();
    writeln!(out, "accuracy {:.4} ({} images, {} unknown)", report.accuracy, report.total, report.unknown_count).unwrap();
    for stats in &report.per_label {
        writeln!(
            out,
            "{}: support {} precision {:.4} recall {:.4}",
            stats.label, stats.support, stats.precision, stats.recall
        )
        .unwrap();
    }
    print!("{out}");

    if let Some(path) = report_out {
        let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        fs::write(path, json).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

/// Gradient check over a spread of seeded architectures; exits non-zero
/// when the worst relative error reaches 1e-5.
pub fn gradcheck(seed: u64) -> Result<(), String> {
    let mut rng = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let sizes = [
            2 + rng.below(6),
            1 + rng.below(8),
            1 + rng.below(4),
        ];
        let net = init_network(&sizes, seed.wrapping_add(i)).map_err(|e| e.to_string())?;
        let x: Vec<f64> = (0..sizes[0]).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let t: Vec<f64> = (0..sizes[2]).map(|_| rng.next_f64()).collect();
        let err = gradient_check(&net, &x, &t, 1e-5).map_err(|e| e.to_string())?;
        worst = worst.max(err);
    }
    println!("max relative error {worst:e}");
    if worst < 1e-5 {
        Ok(())
    } else {
        Err(format!("gradient check failed: {worst:e} >= 1e-5"))
    }
}
