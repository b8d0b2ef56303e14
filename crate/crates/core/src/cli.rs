//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 for usage errors
//! and unreadable or invalid input. Outputs are written to temporary files
//! and renamed into place only once everything succeeded.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::boost::{fit, Algorithm, BoostConfig, MVMajorityVote};
use crate::data::write_all_atomic;
use crate::data::{load_idx, load_manifest, split_image_views, synth_multiview, write_manifest, ViewMode};
use crate::error::{Error, Result};
use crate::eval::one_vs_all_protocol;
use crate::measures::{bound_report, VoterWeighting};

#[derive(Debug, Parser)]
#[command(name = "pbmvboost", version, about = "Multiview boosting with PAC-Bayesian view weighting")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = positive_usize)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic multiview dataset.
    Synth(SynthArgs),
    /// Build a four-view dataset from MNIST IDX files.
    SplitMnist(SplitMnistArgs),
    /// Train a model; write it as JSON and optionally the per-round trace.
    Train(TrainArgs),
    /// Run the repeated one-vs-all protocol.
    Eval(EvalArgs),
    /// Print empirical C-Bound and generalization bounds of a model as JSON.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of examples.
    #[arg(long, default_value_t = 1000, value_parser = positive_usize)]
    pub n: usize,
    /// Label noise per view, comma separated, each in [0, 0.5).
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.35,0.4", value_parser = noise_level)]
    pub noise: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Manifest path; view and label CSVs are written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitMnistArgs {
    #[arg(long)]
    pub images: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// `quarters` or `center-overlap`.
    #[arg(long, default_value = "quarters")]
    pub mode: ViewMode,
    /// Digit mapped to +1; class ids are kept for one-vs-all evaluation.
    #[arg(long, default_value_t = 0)]
    pub positive_class: u8,
    /// Keep only the first N images.
    #[arg(long, value_parser = positive_usize)]
    pub limit: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BoostArgs {
    #[arg(long, default_value = "pb-mvboost")]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = 100, value_parser = positive_usize)]
    pub iterations: usize,
    #[arg(long, default_value_t = 2, value_parser = positive_usize)]
    pub depth: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Voter weighting inside each view's risk and disagreement.
    #[arg(long, default_value = "posterior", value_parser = parse_weighting)]
    pub weighting: VoterWeighting,
}

impl BoostArgs {
    fn config(&self) -> BoostConfig {
        BoostConfig {
            algorithm: self.algorithm,
            iterations: self.iterations,
            max_depth: self.depth,
            seed: self.seed,
            weighting: self.weighting,
            record_distributions: false,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training manifest.
    pub data: PathBuf,
    /// Optional test manifest, scored at every round in the trace.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[command(flatten)]
    pub boost: BoostArgs,
    /// Model JSON path.
    #[arg(long)]
    pub out: PathBuf,
    /// Trace CSV path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Classes to evaluate one-vs-all (default: every class in the training set).
    #[arg(long, value_delimiter = ',')]
    pub classes: Option<Vec<u32>>,
    #[command(flatten)]
    pub boost: BoostArgs,
    /// Training examples drawn per run.
    #[arg(long, default_value_t = 500, value_parser = positive_usize)]
    pub n: usize,
    #[arg(long, default_value_t = 20, value_parser = positive_usize)]
    pub runs: usize,
    /// Report JSON path.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-run CSV path (default: the report path with a `.csv` extension).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Dataset manifest the model is evaluated on.
    pub data: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 0.05, value_parser = confidence)]
    pub delta: f64,
    #[arg(long = "capital-c", default_value_t = 1.0, value_parser = positive_f64)]
    pub capital_c: f64,
    /// Also write the JSON to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn positive_usize(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("{s:?} is not a positive integer")),
    }
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

fn confidence(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v <= 1.0 => Ok(v),
        _ => Err(format!("{s:?} is not in (0, 1]")),
    }
}

fn noise_level(s: &str) -> std::result::Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if (0.0..0.5).contains(&v) => Ok(v),
        _ => Err(format!("{s:?} is not in [0, 0.5)")),
    }
}

fn parse_weighting(s: &str) -> std::result::Result<VoterWeighting, String> {
    match s {
        "posterior" => Ok(VoterWeighting::Posterior),
        "uniform" => Ok(VoterWeighting::Uniform),
        _ => Err(format!("{s:?} is not one of posterior, uniform")),
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| execute(&cli.command)),
        Err(e) => Err(Error::InvalidArgument(format!("thread pool: {e}"))),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                2
            } else {
                1
            }
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Synth(a) => cmd_synth(a),
        Command::SplitMnist(a) => cmd_split_mnist(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Bounds(a) => cmd_bounds(a),
    }
}

pub fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let ds = synth_multiview(a.n, a.noise.len(), &a.noise, a.seed)?;
    write_manifest(&ds, &a.out)
}

pub fn cmd_split_mnist(a: &SplitMnistArgs) -> Result<()> {
    let (mut images, mut labels) = load_idx(&a.images, &a.labels)?;
    if let Some(limit) = a.limit {
        let keep = limit.min(images.count);
        let size = images.rows * images.cols;
        images.pixels.truncate(keep * size);
        images.count = keep;
        labels.truncate(keep);
    }
    let ds = split_image_views(&images, &labels, a.positive_class, a.mode)?;
    write_manifest(&ds, &a.out)
}

pub fn cmd_train(a: &TrainArgs) -> Result<()> {
    let train = load_manifest(&a.data)?;
    let test = a.test.as_ref().map(load_manifest).transpose()?;
    let (model, trace) = fit(&train, &a.boost.config(), test.as_ref())?;
    let mut files = vec![(a.out.clone(), model.to_json()?)];
    if let Some(path) = &a.trace {
        files.push((path.clone(), trace.to_csv()));
    }
    write_all_atomic(&files)?;
    let last = trace.last().expect("at least one round");
    let summary = json!({
        "algorithm": a.boost.algorithm.name(),
        "iterations": model.iterations(),
        "rho": model.rho.as_slice(),
        "train_error": last.train_error,
        "train_f1": last.train_f1,
        "test_error": last.test_error,
        "test_f1": last.test_f1,
        "empirical_cbound": last.empirical_cbound,
    });
    println!("{summary}");
    Ok(())
}

pub fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let train = load_manifest(&a.train)?;
    let test = load_manifest(&a.test)?;
    let classes: Vec<u32> = match &a.classes {
        Some(c) => c.clone(),
        None => train
            .class_ids_or_binary()
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    let report = one_vs_all_protocol(&train, &test, &classes, a.n, a.runs, &a.boost.config(), a.boost.seed)?;
    let csv = a.csv.clone().unwrap_or_else(|| a.out.with_extension("csv"));
    report.write(&a.out, &csv)?;
    let summary = json!({
        "algorithm": a.boost.algorithm.name(),
        "classes": classes,
        "runs": a.runs,
        "macro_accuracy": report.macro_accuracy,
        "macro_f1": report.macro_f1,
    });
    println!("{summary}");
    Ok(())
}

pub fn cmd_bounds(a: &BoundsArgs) -> Result<()> {
    let model = MVMajorityVote::load(&a.model)?;
    let ds = load_manifest(&a.data)?;
    let report = bound_report(&model, &ds, a.delta, a.capital_c)?;
    let text = serde_json::to_string_pretty(&report)?;
    if let Some(out) = &a.out {
        write_all_atomic(&[(out.clone(), text.clone())])?;
    }
    println!("{text}");
    Ok(())
}
