//! Batch CLI for the face detection and recognition pipeline.
//!
//! Exit codes: 0 success, 1 domain error (unreadable image, unusable
//! corpus, no face where one is required), 2 usage error. Diagnostics go
//! to stderr; data goes to stdout or to files, and identical arguments
//! with identical inputs produce byte-identical outputs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod corpus;

#[derive(Debug, Parser)]
#[command(name = "facekit", version, about = "Face detection and recognition toolkit")]
struct Cli {
    /// Worker threads for scanning and training (1 = fully serial).
    /// Results are identical at any thread count.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    Vertical,
    Horizontal,
}

impl From<AxisArg> for facekit::SplitAxis {
    fn from(axis: AxisArg) -> Self {
        match axis {
            AxisArg::Vertical => facekit::SplitAxis::Vertical,
            AxisArg::Horizontal => facekit::SplitAxis::Horizontal,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect faces (and facial parts when the model has part cascades).
    ///
    /// Prints one `# path` line per image followed by one line per
    /// detection: `label x y w h neighbors`.
    Detect {
        /// Recognizer model JSON or bare cascade JSON.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        scale_factor: Option<f64>,
        #[arg(long)]
        min_neighbors: Option<usize>,
        #[arg(required = true)]
        images: Vec<PathBuf>,
    },
    /// Write histogram CSVs (`bin,count,frequency`) for one image.
    Features {
        /// Also emit two-bin binary histograms after Otsu thresholding.
        #[arg(long)]
        binary: bool,
        #[arg(long, value_enum, default_value = "vertical")]
        axis: AxisArg,
        /// Write one CSV file per histogram here instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        image: PathBuf,
    },
    /// Train a detection cascade from directories of window images.
    TrainDetector {
        /// Directory of positive windows (netpbm, all the same square size).
        #[arg(long)]
        positives: PathBuf,
        /// Directory of negative windows of the same size.
        #[arg(long)]
        negatives: PathBuf,
        #[arg(long, default_value_t = 10)]
        stages: usize,
        /// Per-stage false-positive ceiling.
        #[arg(long, default_value_t = 0.5)]
        fmax: f64,
        /// Per-stage detection-rate floor.
        #[arg(long, default_value_t = 0.995)]
        dmin: f64,
        /// Overall false-positive target that stops training early.
        #[arg(long, default_value_t = 0.005)]
        foverall: f64,
        #[arg(long, default_value_t = 25)]
        max_weaks: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enroll a labeled corpus (one subdirectory per identity) into a
    /// recognizer model.
    Enroll {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        model_out: PathBuf,
        /// Face cascade JSON; without it every image is treated as a
        /// pre-cropped face via a permissive cascade.
        #[arg(long)]
        face_cascade: Option<PathBuf>,
        /// Hidden layer sizes, comma separated.
        #[arg(long, value_delimiter = ',')]
        hidden: Option<Vec<usize>>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        patience: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Append binary histogram blocks to the feature vector.
        #[arg(long)]
        binary: bool,
        /// Use only the whole-face histogram, no halves.
        #[arg(long)]
        no_halves: bool,
        #[arg(long, value_enum, default_value = "vertical")]
        axis: AxisArg,
        #[arg(long)]
        accept_threshold: Option<f64>,
        /// Write per-epoch `epoch,train_mse,val_mse,test_mse` rows here.
        #[arg(long)]
        curves_out: Option<PathBuf>,
        /// Write per-split `split,R,n` rows here.
        #[arg(long)]
        regression_out: Option<PathBuf>,
    },
    /// Recognize the identity in one image.
    Recognize {
        #[arg(long)]
        model: PathBuf,
        image: PathBuf,
    },
    /// Evaluate a model over a labeled corpus.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        /// Write the full evaluation report as JSON.
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Check backpropagation gradients against finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(err) => {
            eprintln!("error: could not build thread pool: {err}");
            return ExitCode::from(1);
        }
    };

    let outcome = pool.install(|| match cli.command {
        Command::Detect { model, scale_factor, min_neighbors, images } => {
            commands::detect(&model, scale_factor, min_neighbors, &images)
        }
        Command::Features { binary, axis, out_dir, image } => {
            commands::features(binary, axis.into(), out_dir.as_deref(), &image)
        }
        Command::TrainDetector {
            positives,
            negatives,
            stages,
            fmax,
            dmin,
            foverall,
            max_weaks,
            out,
        } => commands::train_detector(
            &positives, &negatives, stages, fmax, dmin, foverall, max_weaks, &out,
        ),
        Command::Enroll {
            corpus,
            model_out,
            face_cascade,
            hidden,
            lr,
            epochs,
            restarts,
            patience,
            seed,
            binary,
            no_halves,
            axis,
            accept_threshold,
            curves_out,
            regression_out,
        } => commands::enroll(commands::EnrollArgs {
            corpus,
            model_out,
            face_cascade,
            hidden,
            lr,
            epochs,
            restarts,
            patience,
            seed,
            binary,
            no_halves,
            axis: axis.into(),
            accept_threshold,
            curves_out,
            regression_out,
        }),
        Command::Recognize { model, image } => commands::recognize(&model, &image),
        Command::Eval { model, corpus, report_out } => {
            commands::eval(&model, &corpus, report_out.as_deref())
        }
        Command::Gradcheck { seed } => commands::gradcheck(seed),
    });

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
