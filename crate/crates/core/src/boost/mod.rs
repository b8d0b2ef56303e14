//! PB-MVBoost and the baseline multiview boosting learners.
//!
//! Every learner keeps, per view, the trained voters with their weights
//! `Q_v^t = 1/2 ln((1 - eps)/eps)` and running sums of their predictions, so
//! one round costs one tree fit plus O(n) work per view. Views are processed
//! in parallel within a round; results are gathered in view order, which
//! keeps runs bit-reproducible.

mod model;
mod trace;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use model::{sign, MVMajorityVote, MODEL_FORMAT};
pub use trace::{BoostTrace, TraceRecord};

use crate::cbound_opt::{optimize_view_weights, SimplexWeights};
use crate::data::{Label, MultiviewDataset};
use crate::error::{Error, Result};
use crate::eval::{error_rate, f1_score};
use crate::measures::{cbound_value, dot, ViewPosterior, VoterWeighting};
use crate::weak::{weighted_error_of, ExampleDistribution, TreeTrainer, WeakVoter};

/// Weighted errors are clamped to `[EPS_CLAMP, 1 - EPS_CLAMP]` before the
/// voter weight is computed.
pub const EPS_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "pb-mvboost")]
    PbMvBoost,
    /// PB-MVBoost with the view weights held uniform.
    #[serde(rename = "mvboost")]
    MvBoost,
    /// One AdaBoost per view with its own distribution, combined uniformly.
    #[serde(rename = "mv-adaboost")]
    MvAdaBoost,
    /// One voter per view on the uniform distribution, combined uniformly.
    #[serde(rename = "mv-mv")]
    MvMv,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Self::PbMvBoost, Self::MvBoost, Self::MvAdaBoost, Self::MvMv];

    pub fn name(self) -> &'static str {
        match self {
            Self::PbMvBoost => "pb-mvboost",
            Self::MvBoost => "mvboost",
            Self::MvAdaBoost => "mv-adaboost",
            Self::MvMv => "mv-mv",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub algorithm: Algorithm,
    pub iterations: usize,
    pub max_depth: usize,
    /// Seed of the run that produced the model. The learners themselves are
    /// deterministic; the seed drives data generation and subsampling.
    pub seed: u64,
    #[serde(default)]
    pub weighting: VoterWeighting,
    /// Keep every round's example distribution in the trace.
    #[serde(skip)]
    pub record_distributions: bool,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::PbMvBoost,
            iterations: 100,
            max_depth: 2,
            seed: 0,
            weighting: VoterWeighting::Posterior,
            record_distributions: false,
        }
    }
}

impl BoostConfig {
    pub fn new(algorithm: Algorithm, iterations: usize, max_depth: usize) -> Self {
        Self {
            algorithm,
            iterations,
            max_depth,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidArgument("iterations must be at least 1".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidArgument("tree depth must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn pb_mvboost(
    train: &MultiviewDataset,
    iterations: usize,
    max_depth: usize,
    eval_set: Option<&MultiviewDataset>,
) -> Result<(MVMajorityVote, BoostTrace)> {
    fit(train, &BoostConfig::new(Algorithm::PbMvBoost, iterations, max_depth), eval_set)
}

pub fn mvboost_uniform_rho(
    train: &MultiviewDataset,
    iterations: usize,
    max_depth: usize,
    eval_set: Option<&MultiviewDataset>,
) -> Result<(MVMajorityVote, BoostTrace)> {
    fit(train, &BoostConfig::new(Algorithm::MvBoost, iterations, max_depth), eval_set)
}

pub fn mv_adaboost(
    train: &MultiviewDataset,
    iterations: usize,
    max_depth: usize,
    eval_set: Option<&MultiviewDataset>,
) -> Result<(MVMajorityVote, BoostTrace)> {
    fit(train, &BoostConfig::new(Algorithm::MvAdaBoost, iterations, max_depth), eval_set)
}

pub fn mv_uniform_vote(train: &MultiviewDataset, max_depth: usize) -> Result<MVMajorityVote> {
    Ok(fit(train, &BoostConfig::new(Algorithm::MvMv, 1, max_depth), None)?.0)
}

/// Train `config.algorithm`. For `mv-mv` the iteration count is forced to 1.
pub fn fit(
    train: &MultiviewDataset,
    config: &BoostConfig,
    eval_set: Option<&MultiviewDataset>,
) -> Result<(MVMajorityVote, BoostTrace)> {
    config.validate()?;
    if let Some(test) = eval_set {
        if test.view_dims() != train.view_dims() {
            return Err(Error::Shape(format!(
                "evaluation views {:?} differ from training views {:?}",
                test.view_dims(),
                train.view_dims()
            )));
        }
    }
    let mut config = config.clone();
    let rules = match config.algorithm {
        Algorithm::PbMvBoost => Rules {
            optimize_rho: true,
            per_view_dist: false,
            unit_q: false,
        },
        Algorithm::MvBoost => Rules {
            optimize_rho: false,
            per_view_dist: false,
            unit_q: false,
        },
        Algorithm::MvAdaBoost => Rules {
            optimize_rho: false,
            per_view_dist: true,
            unit_q: false,
        },
        Algorithm::MvMv => {
            config.iterations = 1;
            Rules {
                optimize_rho: false,
                per_view_dist: false,
                unit_q: true,
            }
        }
    };
    Booster::new(train, eval_set, config, rules)?.run()
}

#[derive(Debug, Clone, Copy)]
struct Rules {
    optimize_rho: bool,
    per_view_dist: bool,
    unit_q: bool,
}

/// Voter weight `1/2 ln((1 - eps) / eps)` with `eps` clamped.
pub fn voter_weight(eps: f64) -> f64 {
    let e = eps.clamp(EPS_CLAMP, 1.0 - EPS_CLAMP);
    0.5 * ((1.0 - e) / e).ln()
}

struct ViewState<'a> {
    trainer: TreeTrainer<'a>,
    view_index: usize,
    voters: Vec<WeakVoter>,
    q: Vec<f64>,
    /// `sum_t Q_t h_t(x_i)` on the training set.
    score: Vec<f64>,
    /// `sum_t |Q_t| h_t(x_i)` and `sum_t |Q_t|`.
    abs_vote: Vec<f64>,
    abs_total: f64,
    /// `sum_t h_t(x_i)`.
    plain_vote: Vec<f64>,
    test_score: Option<Vec<f64>>,
    /// Own distribution, for independent per-view boosting.
    dist: Option<ExampleDistribution>,
}

struct Step {
    eps: f64,
    q: f64,
    preds: Vec<Label>,
    r: f64,
    d: f64,
}

impl ViewState<'_> {
    /// Expected vote `E_{h~Q_v} h(x_i)` for every training example.
    fn expected_vote(&self, weighting: VoterWeighting) -> Vec<f64> {
        match weighting {
            VoterWeighting::Posterior if self.abs_total > 0.0 => {
                self.abs_vote.iter().map(|s| s / self.abs_total).collect()
            }
            _ => {
                let t = self.voters.len() as f64;
                self.plain_vote.iter().map(|s| s / t).collect()
            }
        }
    }

    fn risk_and_disagreement(&self, labels: &[Label], dist: &[f64], weighting: VoterWeighting) -> (f64, f64) {
        let g = self.expected_vote(weighting);
        let mut r = 0.0;
        let mut d = 0.0;
        for ((&gi, &y), &w) in g.iter().zip(labels).zip(dist) {
            r += w * 0.5 * (1.0 - f64::from(y) * gi);
            d += w * 0.5 * (1.0 - gi * gi);
        }
        (r.clamp(0.0, 1.0), d.clamp(0.0, 1.0))
    }

    fn step(
        &mut self,
        train: &MultiviewDataset,
        test: Option<&MultiviewDataset>,
        shared: &ExampleDistribution,
        config: &BoostConfig,
        unit_q: bool,
    ) -> Result<Step> {
        let labels = train.labels();
        let dist = self.dist.as_ref().unwrap_or(shared);
        let h = self.trainer.fit(labels, dist, config.max_depth)?;
        let preds = h.predict_all(train.view(self.view_index))?;
        let eps = weighted_error_of(&preds, labels, dist.weights());
        let q = if unit_q { 1.0 } else { voter_weight(eps) };

        for (i, &p) in preds.iter().enumerate() {
            let p = f64::from(p);
            self.score[i] += q * p;
            self.abs_vote[i] += q.abs() * p;
            self.plain_vote[i] += p;
        }
        self.abs_total += q.abs();
        if let (Some(ts), Some(test)) = (self.test_score.as_mut(), test) {
            for (s, p) in ts.iter_mut().zip(h.predict_all(test.view(self.view_index))?) {
                *s += q * f64::from(p);
            }
        }
        self.voters.push(h);
        self.q.push(q);

        let (r, d) = self.risk_and_disagreement(labels, dist.weights(), config.weighting);
        Ok(Step { eps, q, preds, r, d })
    }
}

struct Booster<'a> {
    train: &'a MultiviewDataset,
    test: Option<&'a MultiviewDataset>,
    config: BoostConfig,
    rules: Rules,
    views: Vec<ViewState<'a>>,
    dist: ExampleDistribution,
    rho: SimplexWeights,
}

impl<'a> Booster<'a> {
    fn new(
        train: &'a MultiviewDataset,
        test: Option<&'a MultiviewDataset>,
        config: BoostConfig,
        rules: Rules,
    ) -> Result<Self> {
        let n = train.n_examples();
        let v = train.n_views();
        let views = (0..v)
            .map(|k| {
                Ok(ViewState {
                    trainer: TreeTrainer::new(k, train.view(k))?,
                    view_index: k,
                    voters: Vec::with_capacity(config.iterations),
                    q: Vec::with_capacity(config.iterations),
                    score: vec![0.0; n],
                    abs_vote: vec![0.0; n],
                    abs_total: 0.0,
                    plain_vote: vec![0.0; n],
                    test_score: test.map(|t| vec![0.0; t.n_examples()]),
                    dist: rules.per_view_dist.then(|| ExampleDistribution::uniform(n)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            train,
            test,
            config,
            rules,
            views,
            dist: ExampleDistribution::uniform(n),
            rho: SimplexWeights::uniform(v),
        })
    }

    fn run(mut self) -> Result<(MVMajorityVote, BoostTrace)> {
        let mut trace = BoostTrace::default();
        for t in 1..=self.config.iterations {
            if self.config.record_distributions {
                let snapshot = if self.rules.per_view_dist {
                    self.views
                        .iter()
                        .map(|s| s.dist.as_ref().expect("per-view distribution").weights().to_vec())
                        .collect()
                } else {
                    vec![self.dist.weights().to_vec()]
                };
                trace.distributions.push(snapshot);
            }
            let record = self.round(t)?;
            trace.records.push(record);
        }
        let per_view = self
            .views
            .into_iter()
            .map(|s| ViewPosterior::new(s.voters, s.q))
            .collect::<Result<Vec<_>>>()?;
        let model = MVMajorityVote::new(per_view, self.rho, self.train.view_dims(), self.config)?;
        Ok((model, trace))
    }

    fn round(&mut self, t: usize) -> Result<TraceRecord> {
        let (train, test, shared, config, unit_q) =
            (self.train, self.test, &self.dist, &self.config, self.rules.unit_q);
        let steps = self
            .views
            .par_iter_mut()
            .map(|s| s.step(train, test, shared, config, unit_q))
            .collect::<Result<Vec<Step>>>()?;

        let r: Vec<f64> = steps.iter().map(|s| s.r).collect();
        let d: Vec<f64> = steps.iter().map(|s| s.d).collect();
        if self.rules.optimize_rho {
            self.rho = optimize_view_weights(&r, &d, &self.rho)?.rho;
        }
        self.update_distributions(&steps)?;

        let labels = train.labels();
        let rho = self.rho.as_slice();
        let train_margin = combine(self.views.iter().map(|s| s.score.as_slice()), rho, train.n_examples());
        let (train_error, train_f1) = scores(&train_margin, labels)?;
        let (test_error, test_f1) = match test {
            Some(test) => {
                let m = combine(
                    self.views.iter().map(|s| s.test_score.as_deref().expect("test scores")),
                    rho,
                    test.n_examples(),
                );
                let (e, f) = scores(&m, test.labels())?;
                (Some(e), Some(f))
            }
            None => (None, None),
        };

        let uniform = vec![1.0 / train.n_examples() as f64; train.n_examples()];
        let (ru, du): (Vec<f64>, Vec<f64>) = self
            .views
            .iter()
            .map(|s| s.risk_and_disagreement(labels, &uniform, self.config.weighting))
            .unzip();
        let empirical_cbound = cbound_value(dot(rho, &ru), dot(rho, &du)).ok();

        Ok(TraceRecord {
            t,
            eps: steps.iter().map(|s| s.eps).collect(),
            q: steps.iter().map(|s| s.q).collect(),
            r,
            d,
            rho: rho.to_vec(),
            empirical_cbound,
            train_error,
            train_f1,
            test_error,
            test_f1,
        })
    }

    fn update_distributions(&mut self, steps: &[Step]) -> Result<()> {
        let labels = self.train.labels();
        if self.rules.per_view_dist {
            for (state, step) in self.views.iter_mut().zip(steps) {
                let dist = state.dist.as_ref().expect("per-view distribution");
                let masses = dist
                    .weights()
                    .iter()
                    .zip(labels)
                    .zip(&step.preds)
                    .map(|((&w, &y), &h)| w * (-f64::from(y) * step.q * f64::from(h)).exp())
                    .collect();
                state.dist = Some(ExampleDistribution::normalize(masses)?);
            }
        } else {
            let rho = self.rho.as_slice();
            let masses = (0..labels.len())
                .map(|i| {
                    let mut s = 0.0;
                    for (step, &rho_v) in steps.iter().zip(rho) {
                        s += rho_v * step.q * f64::from(step.preds[i]);
                    }
                    self.dist.weights()[i] * (-f64::from(labels[i]) * s).exp()
                })
                .collect();
            self.dist = ExampleDistribution::normalize(masses)?;
        }
        Ok(())
    }
}

/// `sum_v rho_v score_v[i]`, summed in view order like [`MVMajorityVote::margins`].
fn combine<'s>(scores: impl Iterator<Item = &'s [f64]>, rho: &[f64], n: usize) -> Vec<f64> {
    let mut margin = vec![0.0; n];
    for (score, &rho_v) in scores.zip(rho) {
        for (m, s) in margin.iter_mut().zip(score) {
            *m += rho_v * s;
        }
    }
    margin
}

fn scores(margin: &[f64], labels: &[Label]) -> Result<(f64, f64)> {
    let preds: Vec<Label> = margin.iter().map(|&m| sign(m)).collect();
    Ok((error_rate(&preds, labels)?, f1_score(&preds, labels)?.value))
}
