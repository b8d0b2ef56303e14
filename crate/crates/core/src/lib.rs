//! Multiview boosting with PAC-Bayesian view weighting.
//!
//! The crate learns a two-level weighted majority vote over several views of
//! the same examples: per-view weights over weak decision-tree voters, and a
//! distribution over views chosen by maximizing the multiview C-Bound
//! objective at every boosting round. It also computes the PAC-Bayesian
//! quantities (Gibbs risk, disagreement, margin moments, kl-inversions) and
//! the resulting generalization bounds.
//!
//! Modules:
//! - [`data`]: multiview datasets, manifests, IDX images, synthetic generator.
//! - [`weak`]: weighted decision-tree voters.
//! - [`measures`]: Gibbs risk, disagreement, C-Bound and bound machinery.
//! - [`cbound_opt`]: view-weight optimization on the probability simplex.
//! - [`boost`]: PB-MVBoost and baseline learners, the model and its trace.
//! - [`eval`]: metrics and the one-vs-all protocol.
//! - [`cli`]: the command-line front end.

pub mod boost;
pub mod cbound_opt;
pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod measures;
pub mod weak;

pub use boost::{
    mv_adaboost, mv_uniform_vote, mvboost_uniform_rho, pb_mvboost, Algorithm, BoostConfig,
    BoostTrace, MVMajorityVote,
};
pub use data::MultiviewDataset;
pub use error::{Error, Result};
pub use weak::{ExampleDistribution, WeakVoter};
