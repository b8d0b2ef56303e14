//! Accuracy, F1 and the repeated one-vs-all protocol.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boost::{fit, BoostConfig};
use crate::data::write_all_atomic;
use crate::data::{Label, MultiviewDataset};
use crate::error::{Error, Result};

fn check_pair(preds: &[Label], labels: &[Label]) -> Result<()> {
    if preds.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} labels",
            preds.len(),
            labels.len()
        )));
    }
    if preds.is_empty() {
        return Err(Error::InvalidArgument("no predictions to score".into()));
    }
    Ok(())
}

pub fn accuracy(preds: &[Label], labels: &[Label]) -> Result<f64> {
    check_pair(preds, labels)?;
    let hits = preds.iter().zip(labels).filter(|(p, y)| p == y).count();
    Ok(hits as f64 / preds.len() as f64)
}

pub fn error_rate(preds: &[Label], labels: &[Label]) -> Result<f64> {
    check_pair(preds, labels)?;
    let misses = preds.iter().zip(labels).filter(|(p, y)| p != y).count();
    Ok(misses as f64 / preds.len() as f64)
}

/// F1 on the +1 class. `degenerate` is set when there are no true
/// positives, false positives or false negatives; the value is then 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1 {
    pub value: f64,
    pub degenerate: bool,
}

pub fn f1_score(preds: &[Label], labels: &[Label]) -> Result<F1> {
    check_pair(preds, labels)?;
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &y) in preds.iter().zip(labels) {
        match (p == 1, y == 1) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp + fp + fn_ == 0 {
        return Ok(F1 {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(F1 {
        value: 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64,
        degenerate: false,
    })
}

pub fn f1(preds: &[Label], labels: &[Label]) -> Result<f64> {
    Ok(f1_score(preds, labels)?.value)
}

/// Mean and sample standard deviation (0 for a single value).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub class: u32,
    pub run: usize,
    pub accuracy: f64,
    pub f1: f64,
    pub f1_degenerate: bool,
    /// Positive examples in the run's training subsample.
    pub train_positives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: u32,
    pub accuracy: Summary,
    pub f1: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: BoostConfig,
    pub n_per_run: usize,
    pub runs: usize,
    pub seed: u64,
    pub records: Vec<RunRecord>,
    pub per_class: Vec<ClassSummary>,
    /// Over runs, of the per-run average across classes.
    pub macro_accuracy: Summary,
    pub macro_f1: Summary,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per (class, run).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,run,accuracy,f1,f1_degenerate,train_positives\n");
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.class, r.run, r.accuracy, r.f1, r.f1_degenerate, r.train_positives
            )
            .unwrap();
        }
        out
    }

    pub fn write(&self, json_path: impl AsRef<Path>, csv_path: impl AsRef<Path>) -> Result<()> {
        write_all_atomic(&[
            (json_path.as_ref().to_path_buf(), self.to_json()?),
            (csv_path.as_ref().to_path_buf(), self.to_csv()),
        ])
    }
}

/// Training indices of one run: `n_per_run` draws without replacement,
/// sorted. Runs share the seed and differ by ChaCha stream.
pub fn run_subsample(n_total: usize, n_per_run: usize, seed: u64, run: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run as u64);
    let mut idx = rand::seq::index::sample(&mut rng, n_total, n_per_run).into_vec();
    idx.sort_unstable();
    idx
}

/// For each run, subsample the training set once; for each class, train
/// `config.algorithm` one-vs-all on the subsample and score it on the full
/// test set.
pub fn one_vs_all_protocol(
    full_train: &MultiviewDataset,
    full_test: &MultiviewDataset,
    classes: &[u32],
    n_per_run: usize,
    runs: usize,
    config: &BoostConfig,
    seed: u64,
) -> Result<RunReport> {
    config.validate()?;
    if classes.is_empty() {
        return Err(Error::InvalidArgument("no classes to evaluate".into()));
    }
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    if n_per_run == 0 || n_per_run > full_train.n_examples() {
        return Err(Error::InvalidArgument(format!(
            "n_per_run = {n_per_run} must lie in [1, {}]",
            full_train.n_examples()
        )));
    }
    if full_test.view_dims() != full_train.view_dims() {
        return Err(Error::Shape(format!(
            "test views {:?} differ from training views {:?}",
            full_test.view_dims(),
            full_train.view_dims()
        )));
    }
    let mut config = config.clone();
    config.seed = seed;
    config.record_distributions = false;

    let subsets: Vec<MultiviewDataset> = (0..runs)
        .map(|run| full_train.subset(&run_subsample(full_train.n_examples(), n_per_run, seed, run)))
        .collect();
    let tests: Vec<MultiviewDataset> = classes.iter().map(|&c| full_test.one_vs_all(c)).collect();
    let jobs: Vec<(usize, usize)> = (0..classes.len())
        .flat_map(|c| (0..runs).map(move |r| (c, r)))
        .collect();

    let records = jobs
        .par_iter()
        .map(|&(c, run)| {
            let train = subsets[run].one_vs_all(classes[c]);
            let (model, _) = fit(&train, &config, None)?;
            let preds = model.predict_dataset(&tests[c])?;
            let f1 = f1_score(&preds, tests[c].labels())?;
            Ok(RunRecord {
                class: classes[c],
                run,
                accuracy: accuracy(&preds, tests[c].labels())?,
                f1: f1.value,
                f1_degenerate: f1.degenerate,
                train_positives: train.labels().iter().filter(|&&y| y == 1).count(),
            })
        })
        .collect::<Result<Vec<RunRecord>>>()?;

    let per_class = classes
        .iter()
        .map(|&class| {
            let rows: Vec<&RunRecord> = records.iter().filter(|r| r.class == class).collect();
            let acc: Vec<f64> = rows.iter().map(|r| r.accuracy).collect();
            let f1: Vec<f64> = rows.iter().map(|r| r.f1).collect();
            ClassSummary {
                class,
                accuracy: Summary::of(&acc),
                f1: Summary::of(&f1),
            }
        })
        .collect();

    let mut by_run: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    for r in &records {
        let e = by_run.entry(r.run).or_default();
        e.0 += r.accuracy / classes.len() as f64;
        e.1 += r.f1 / classes.len() as f64;
    }
    let (run_acc, run_f1): (Vec<f64>, Vec<f64>) = by_run.into_values().unzip();

    Ok(RunReport {
        config,
        n_per_run,
        runs,
        seed,
        records,
        per_class,
        macro_accuracy: Summary::of(&run_acc),
        macro_f1: Summary::of(&run_f1),
    })
}
