//! PAC-Bayesian quantities of a two-level majority vote.
//!
//! For ±1 voters, `1[h(x) != y] = (1 - y h(x)) / 2` and
//! `1[h(x) != h'(x)] = (1 - h(x) h'(x)) / 2`, so the Gibbs risk and the
//! expected disagreement are affine in the first and second moments of the
//! margin `M(x, y) = y * E_{v~rho} E_{h~Q_v} h(x^v)`. Per-view disagreement is
//! computed through that identity; [`multiview_disagreement`] keeps the
//! explicit pairwise sum.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::boost::MVMajorityVote;
use crate::data::{Label, MultiviewDataset};
use crate::error::{Error, Result};
use crate::weak::{ExampleDistribution, WeakVoter};

/// Probabilities fed to logarithms are kept at least this far from 0 and 1.
pub const PROB_CLAMP: f64 = 1e-12;

/// Absolute tolerance on the root of a kl inversion.
pub const KL_INVERSION_TOL: f64 = 1e-9;

/// How `E_{h ~ H_v}` weights the voters trained so far for one view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VoterWeighting {
    /// `|Q_v^t| / sum_s |Q_v^s|`.
    #[default]
    Posterior,
    /// Every trained voter counts the same.
    Uniform,
}

/// Voters of one view with their raw boosting weights `Q_v^t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewPosterior {
    pub voters: Vec<WeakVoter>,
    pub q_weights: Vec<f64>,
}

impl ViewPosterior {
    pub fn new(voters: Vec<WeakVoter>, q_weights: Vec<f64>) -> Result<Self> {
        let p = Self { voters, q_weights };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.voters.is_empty() || self.voters.len() != self.q_weights.len() {
            return Err(Error::Shape(format!(
                "posterior with {} voters and {} weights",
                self.voters.len(),
                self.q_weights.len()
            )));
        }
        if self.q_weights.iter().any(|q| !q.is_finite()) {
            return Err(Error::Shape("non-finite voter weight".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.voters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voters.is_empty()
    }

    /// `|Q_k| / sum |Q_j|`, uniform when every weight is zero.
    pub fn normalized_weights(&self) -> Vec<f64> {
        normalize_abs(&self.q_weights)
    }

    pub fn weights(&self, mode: VoterWeighting) -> Vec<f64> {
        match mode {
            VoterWeighting::Posterior => self.normalized_weights(),
            VoterWeighting::Uniform => vec![1.0 / self.len() as f64; self.len()],
        }
    }

    /// One prediction vector per voter on every row of `view`.
    pub fn predictions(&self, view: &Array2<f64>) -> Result<Vec<Vec<Label>>> {
        self.voters.iter().map(|h| h.predict_all(view)).collect()
    }
}

pub(crate) fn normalize_abs(q: &[f64]) -> Vec<f64> {
    let total: f64 = q.iter().map(|x| x.abs()).sum();
    if total > 0.0 {
        q.iter().map(|x| x.abs() / total).collect()
    } else {
        vec![1.0 / q.len() as f64; q.len()]
    }
}

/// Per-view Gibbs risks and disagreements with the view weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteStats {
    pub r: Vec<f64>,
    pub d: Vec<f64>,
    pub rho: Vec<f64>,
}

impl VoteStats {
    /// Lemma-1 (view-averaged) C-Bound of these statistics.
    pub fn cbound(&self) -> Result<f64> {
        mv_cbound(&self.rho, &self.r, &self.d)
    }

    pub fn expected_risk(&self) -> f64 {
        dot(&self.rho, &self.r)
    }

    pub fn expected_disagreement(&self) -> f64 {
        dot(&self.rho, &self.d)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Shape(format!("{what}: length {got}, expected {want}")));
    }
    Ok(())
}

/// `sum_i D_i sum_k w_k 1[h_k(x_i) != y_i]` from cached predictions.
pub fn gibbs_risk_from_predictions(preds: &[Vec<Label>], weights: &[f64], labels: &[Label], dist: &[f64]) -> f64 {
    let mut risk = 0.0;
    for (i, (&y, &di)) in labels.iter().zip(dist).enumerate() {
        let wrong: f64 = preds
            .iter()
            .zip(weights)
            .filter(|(p, _)| p[i] != y)
            .map(|(_, w)| w)
            .sum();
        risk += di * wrong;
    }
    risk
}

/// `sum_i D_i (1 - (sum_k w_k h_k(x_i))^2) / 2` from cached predictions.
pub fn disagreement_from_predictions(preds: &[Vec<Label>], weights: &[f64], dist: &[f64]) -> f64 {
    let mut dis = 0.0;
    for (i, &di) in dist.iter().enumerate() {
        let vote: f64 = preds.iter().zip(weights).map(|(p, w)| w * f64::from(p[i])).sum();
        dis += di * 0.5 * (1.0 - vote * vote);
    }
    dis.clamp(0.0, 1.0)
}

pub fn view_gibbs_risk(
    post: &ViewPosterior,
    view: &Array2<f64>,
    labels: &[Label],
    dist: &ExampleDistribution,
) -> Result<f64> {
    view_gibbs_risk_with(post, view, labels, dist, VoterWeighting::Posterior)
}

pub fn view_gibbs_risk_with(
    post: &ViewPosterior,
    view: &Array2<f64>,
    labels: &[Label],
    dist: &ExampleDistribution,
    mode: VoterWeighting,
) -> Result<f64> {
    post.validate()?;
    check_len("labels", labels.len(), view.nrows())?;
    check_len("distribution", dist.len(), view.nrows())?;
    let preds = post.predictions(view)?;
    Ok(gibbs_risk_from_predictions(&preds, &post.weights(mode), labels, dist.weights()))
}

/// Expected disagreement of two voters drawn independently from the posterior.
pub fn view_disagreement(post: &ViewPosterior, view: &Array2<f64>, dist: &ExampleDistribution) -> Result<f64> {
    view_disagreement_with(post, view, dist, VoterWeighting::Posterior)
}

pub fn view_disagreement_with(
    post: &ViewPosterior,
    view: &Array2<f64>,
    dist: &ExampleDistribution,
    mode: VoterWeighting,
) -> Result<f64> {
    post.validate()?;
    check_len("distribution", dist.len(), view.nrows())?;
    let preds = post.predictions(view)?;
    Ok(disagreement_from_predictions(&preds, &post.weights(mode), dist.weights()))
}

/// View-averaged multiview C-Bound `1 - (1 - 2 <rho,r>)^2 / (1 - 2 <rho,d>)`.
///
/// Fails with [`Error::Infeasible`] unless both `<rho,r>` and `<rho,d>` are
/// below 1/2. The value is clipped to [0, 1].
pub fn mv_cbound(rho: &[f64], r: &[f64], d: &[f64]) -> Result<f64> {
    check_len("r", r.len(), rho.len())?;
    check_len("d", d.len(), rho.len())?;
    let risk = dot(rho, r);
    let disagreement = dot(rho, d);
    cbound_value(risk, disagreement)
}

/// Single-level C-Bound `1 - (1 - 2 risk)^2 / (1 - 2 disagreement)`.
pub fn cbound_value(risk: f64, disagreement: f64) -> Result<f64> {
    if !(risk < 0.5 && disagreement < 0.5) {
        return Err(Error::Infeasible { risk, disagreement });
    }
    let value = 1.0 - (1.0 - 2.0 * risk).powi(2) / (1.0 - 2.0 * disagreement);
    Ok(value.clamp(0.0, 1.0))
}

/// Per-voter predictions of the whole model on `ds`, grouped by view.
fn model_predictions(vote: &MVMajorityVote, ds: &MultiviewDataset) -> Result<Vec<Vec<Vec<Label>>>> {
    vote.check_dataset(ds)?;
    vote.per_view
        .iter()
        .enumerate()
        .map(|(v, post)| post.predictions(ds.view(v)))
        .collect()
}

/// Per-view Gibbs risk and disagreement of `vote` on `ds` under `dist`.
pub fn vote_stats(vote: &MVMajorityVote, ds: &MultiviewDataset, dist: &ExampleDistribution) -> Result<VoteStats> {
    check_len("distribution", dist.len(), ds.n_examples())?;
    let preds = model_predictions(vote, ds)?;
    let mut r = Vec::with_capacity(preds.len());
    let mut d = Vec::with_capacity(preds.len());
    for (post, p) in vote.per_view.iter().zip(&preds) {
        let w = post.normalized_weights();
        r.push(gibbs_risk_from_predictions(p, &w, ds.labels(), dist.weights()));
        d.push(disagreement_from_predictions(p, &w, dist.weights()));
    }
    Ok(VoteStats {
        r,
        d,
        rho: vote.rho.as_slice().to_vec(),
    })
}

/// Posterior-weighted vote `E_{v~rho} E_{h~Q_v} h(x^v)` for every example.
fn expected_votes(vote: &MVMajorityVote, preds: &[Vec<Vec<Label>>], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for ((post, p), &rho_v) in vote.per_view.iter().zip(preds).zip(vote.rho.as_slice()) {
        for (w, h) in post.normalized_weights().iter().zip(p) {
            let c = rho_v * w;
            for (o, &hi) in out.iter_mut().zip(h) {
                *o += c * f64::from(hi);
            }
        }
    }
    out
}

/// First and second moments of the margin under `dist`.
pub fn margin_moments(vote: &MVMajorityVote, ds: &MultiviewDataset, dist: &ExampleDistribution) -> Result<(f64, f64)> {
    check_len("distribution", dist.len(), ds.n_examples())?;
    let preds = model_predictions(vote, ds)?;
    let votes = expected_votes(vote, &preds, ds.n_examples());
    let mut mu1 = 0.0;
    let mut mu2 = 0.0;
    for ((&m, &y), &di) in votes.iter().zip(ds.labels()).zip(dist.weights()) {
        let margin = f64::from(y) * m;
        mu1 += di * margin;
        mu2 += di * margin * margin;
    }
    Ok((mu1, mu2))
}

/// `E_{v~rho} R(G_{Q_v})`, the Gibbs risk of the whole vote.
pub fn multiview_gibbs_risk(vote: &MVMajorityVote, ds: &MultiviewDataset, dist: &ExampleDistribution) -> Result<f64> {
    Ok(vote_stats(vote, ds, dist)?.expected_risk())
}

/// Disagreement `d(rho)` over all voter pairs across all views, summed
/// pair by pair.
pub fn multiview_disagreement(vote: &MVMajorityVote, ds: &MultiviewDataset, dist: &ExampleDistribution) -> Result<f64> {
    check_len("distribution", dist.len(), ds.n_examples())?;
    let preds = model_predictions(vote, ds)?;
    let mut voters: Vec<(f64, &[Label])> = Vec::new();
    for ((post, p), &rho_v) in vote.per_view.iter().zip(&preds).zip(vote.rho.as_slice()) {
        for (w, h) in post.normalized_weights().iter().zip(p) {
            voters.push((rho_v * w, h.as_slice()));
        }
    }
    let mut total = 0.0;
    for (i, &di) in dist.weights().iter().enumerate() {
        let mut at_i = 0.0;
        for &(wa, ha) in &voters {
            for &(wb, hb) in &voters {
                if ha[i] != hb[i] {
                    at_i += wa * wb;
                }
            }
        }
        total += di * at_i;
    }
    Ok(total)
}

/// Weighted 0-1 error of `sign(E_{v~rho} E_{h~Q_v} h(x^v))`, ties to +1.
pub fn posterior_vote_error(vote: &MVMajorityVote, ds: &MultiviewDataset, dist: &ExampleDistribution) -> Result<f64> {
    check_len("distribution", dist.len(), ds.n_examples())?;
    let preds = model_predictions(vote, ds)?;
    let votes = expected_votes(vote, &preds, ds.n_examples());
    Ok(votes
        .iter()
        .zip(ds.labels())
        .zip(dist.weights())
        .filter(|((&m, &y), _)| (if m >= 0.0 { 1 } else { -1 }) != y)
        .map(|(_, &w)| w)
        .sum())
}

/// Bernoulli KL `q ln(q/p) + (1-q) ln((1-q)/(1-p))` with `0 ln 0 = 0`.
///
/// Returns `+inf` when `p` is 0 or 1 and `q` differs, and NaN outside [0, 1].
pub fn binary_kl(q: f64, p: f64) -> f64 {
    if !(0.0..=1.0).contains(&q) || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    let term = |a: f64, b: f64| -> f64 {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln()
        }
    };
    (term(q, p) + term(1.0 - q, 1.0 - p)).max(0.0)
}

fn check_kl_args(q: f64, budget: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!("q = {q} outside [0, 1]")));
    }
    if budget.is_nan() || budget < 0.0 {
        return Err(Error::InvalidArgument(format!("kl budget {budget} must be >= 0")));
    }
    Ok(())
}

/// Largest `r <= cap` with `kl(q || r) <= budget`, by bisection.
pub fn kl_sup_inverse(q: f64, budget: f64, cap: f64) -> Result<f64> {
    check_kl_args(q, budget)?;
    if !(cap > 0.0 && cap <= 1.0) {
        return Err(Error::InvalidArgument(format!("cap {cap} outside (0, 1]")));
    }
    if binary_kl(q, cap) <= budget {
        return Ok(cap);
    }
    if q > cap {
        return Err(Error::EmptyInterval { q, cap, budget });
    }
    if budget == 0.0 {
        return Ok(q);
    }
    // kl(q || .) is increasing on [q, cap]; lo stays feasible, hi infeasible.
    let (mut lo, mut hi) = (q, cap);
    for _ in 0..200 {
        if hi - lo <= KL_INVERSION_TOL * 1e-5 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if binary_kl(q, mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Smallest `d >= 0` with `kl(q || d) <= budget`, by bisection.
pub fn kl_inf_inverse(q: f64, budget: f64) -> Result<f64> {
    check_kl_args(q, budget)?;
    if binary_kl(q, 0.0) <= budget {
        return Ok(0.0);
    }
    if budget == 0.0 {
        return Ok(q);
    }
    let (mut lo, mut hi) = (0.0, q);
    for _ in 0..200 {
        if hi - lo <= KL_INVERSION_TOL * 1e-5 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if binary_kl(q, mid) <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `KL(w || uniform) = ln m - H(w)`.
pub fn kl_to_uniform(weights: &[f64]) -> f64 {
    let m = weights.len() as f64;
    let neg_entropy: f64 = weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let w = w.max(PROB_CLAMP);
            w * w.ln()
        })
        .sum();
    (m.ln() + neg_entropy).max(0.0)
}

/// Catoni-style bound on the Gibbs risk.
///
/// `1/(1 - e^-C) * (1 - exp(-(C g + (kl_views + kl_hyper + ln(1/delta)) / n)))`,
/// clipped to [0, 1].
pub fn catoni_bound(
    gibbs_empirical: f64,
    kl_views_expected: f64,
    kl_hyper: f64,
    n: usize,
    c: f64,
    delta: f64,
) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("C = {c} must be > 0")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!("delta = {delta} outside (0, 1]")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&gibbs_empirical) {
        return Err(Error::InvalidArgument(format!("Gibbs risk {gibbs_empirical} outside [0, 1]")));
    }
    if !(kl_views_expected >= 0.0 && kl_hyper >= 0.0) {
        return Err(Error::InvalidArgument("KL terms must be >= 0".into()));
    }
    let complexity = (kl_views_expected + kl_hyper + (1.0 / delta).ln()) / n as f64;
    let exponent = c * gibbs_empirical + complexity;
    let value = -(-exponent).exp_m1() / -(-c).exp_m1();
    Ok(value.clamp(0.0, 1.0))
}

/// Empirical per-view inputs to [`theorem_cbound_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewEmpirical {
    pub gibbs: f64,
    pub disagreement: f64,
    /// `KL(Q_v || P_v)`.
    pub kl: f64,
}

/// The kl-interval bound `sup r` / `inf d` of one view.
pub fn view_intervals(view: &ViewEmpirical, n: usize, delta: f64) -> Result<(Option<f64>, f64)> {
    if n == 0 || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!("n = {n}, delta = {delta}")));
    }
    let nf = n as f64;
    let log_term = (4.0 * nf.sqrt() / delta).ln();
    let r_budget = (view.kl + log_term) / nf;
    let d_budget = (2.0 * view.kl + log_term) / nf;
    let r_sup = match kl_sup_inverse(view.gibbs, r_budget, 0.5) {
        Ok(r) => Some(r),
        Err(Error::EmptyInterval { .. }) => None,
        Err(e) => return Err(e),
    };
    let d_inf = kl_inf_inverse(view.disagreement, d_budget)?;
    Ok((r_sup, d_inf))
}

/// C-Bound with every view's risk replaced by the top of its kl-interval and
/// every disagreement by the bottom of its interval. Returns 1 when vacuous.
pub fn theorem_cbound_bound(per_view: &[ViewEmpirical], rho: &[f64], n: usize, delta: f64) -> Result<f64> {
    check_len("rho", rho.len(), per_view.len())?;
    let mut risk = 0.0;
    let mut disagreement = 0.0;
    for (view, &w) in per_view.iter().zip(rho) {
        let (r_sup, d_inf) = view_intervals(view, n, delta)?;
        if w == 0.0 {
            continue;
        }
        match r_sup {
            Some(r) => risk += w * r,
            None => return Ok(1.0),
        }
        disagreement += w * d_inf;
    }
    match cbound_value(risk, disagreement) {
        Ok(v) => Ok(v),
        Err(Error::Infeasible { .. }) => Ok(1.0),
        Err(e) => Err(e),
    }
}

/// Empirical quantities and generalization bounds of a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub delta: f64,
    pub capital_c: f64,
    pub rho: Vec<f64>,
    pub view_gibbs_risk: Vec<f64>,
    pub view_disagreement: Vec<f64>,
    pub view_kl: Vec<f64>,
    /// `E_{v~rho} R(G_{Q_v})`.
    pub gibbs_risk: f64,
    /// `E_{v~rho} d(Q_v)`.
    pub disagreement: f64,
    /// Disagreement over all voter pairs across views.
    pub global_disagreement: f64,
    /// Error of the model's raw-weight vote.
    pub majority_vote_error: f64,
    /// Error of the normalized-posterior vote the bounds are about.
    pub posterior_vote_error: f64,
    /// View-averaged C-Bound; `None` when infeasible.
    pub empirical_cbound: Option<f64>,
    /// C-Bound from the global risk and disagreement; `None` when infeasible.
    pub global_cbound: Option<f64>,
    /// `min(1, 2 R(G_rho))`.
    pub factor2_bound: f64,
    pub kl_views_expected: f64,
    pub kl_hyper: f64,
    pub catoni_bound: f64,
    pub theorem_bound: f64,
}

/// Evaluate every bound of `vote` on `ds` (uniform example weights).
pub fn bound_report(vote: &MVMajorityVote, ds: &MultiviewDataset, delta: f64, capital_c: f64) -> Result<BoundReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!("delta = {delta} outside (0, 1]")));
    }
    if !(capital_c > 0.0 && capital_c.is_finite()) {
        return Err(Error::InvalidArgument(format!("C = {capital_c} must be > 0")));
    }
    let n = ds.n_examples();
    let dist = ExampleDistribution::uniform(n);
    let stats = vote_stats(vote, ds, &dist)?;
    let rho = vote.rho.as_slice();
    let view_kl: Vec<f64> = vote.per_view.iter().map(|p| kl_to_uniform(&p.normalized_weights())).collect();
    let kl_views_expected = dot(rho, &view_kl);
    let kl_hyper = kl_to_uniform(rho);
    let gibbs_risk = stats.expected_risk();
    let global_disagreement = multiview_disagreement(vote, ds, &dist)?;
    let preds = vote.predict_dataset(ds)?;
    let majority_vote_error =
        preds.iter().zip(ds.labels()).filter(|(p, y)| p != y).count() as f64 / n as f64;
    let per_view: Vec<ViewEmpirical> = stats
        .r
        .iter()
        .zip(&stats.d)
        .zip(&view_kl)
        .map(|((&gibbs, &disagreement), &kl)| ViewEmpirical {
            gibbs,
            disagreement,
            kl,
        })
        .collect();
    Ok(BoundReport {
        n,
        delta,
        capital_c,
        rho: rho.to_vec(),
        gibbs_risk,
        disagreement: stats.expected_disagreement(),
        global_disagreement,
        majority_vote_error,
        posterior_vote_error: posterior_vote_error(vote, ds, &dist)?,
        empirical_cbound: stats.cbound().ok(),
        global_cbound: cbound_value(gibbs_risk, global_disagreement).ok(),
        factor2_bound: (2.0 * gibbs_risk).min(1.0),
        catoni_bound: catoni_bound(gibbs_risk.clamp(0.0, 1.0), kl_views_expected, kl_hyper, n, capital_c, delta)?,
        theorem_bound: theorem_cbound_bound(&per_view, rho, n, delta)?,
        kl_views_expected,
        kl_hyper,
        view_gibbs_risk: stats.r,
        view_disagreement: stats.d,
        view_kl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn constant_posterior(labels: &[Label], q: &[f64]) -> ViewPosterior {
        ViewPosterior::new(labels.iter().map(|&l| WeakVoter::constant(0, l)).collect(), q.to_vec()).unwrap()
    }

    #[test]
    fn normalized_weights_rules() {
        let p = constant_posterior(&[1, -1, 1], &[1.0, -3.0, 0.0]);
        assert_eq!(p.normalized_weights(), vec![0.25, 0.75, 0.0]);
        let z = constant_posterior(&[1, 1], &[0.0, 0.0]);
        assert_eq!(z.normalized_weights(), vec![0.5, 0.5]);
        assert!(ViewPosterior::new(vec![], vec![]).is_err());
        assert!(ViewPosterior::new(vec![WeakVoter::constant(0, 1)], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn gibbs_risk_examples() {
        let x = array![[0.0], [1.0], [2.0]];
        let y = [1, 1, 1];
        let d = ExampleDistribution::uniform(3);
        assert_eq!(view_gibbs_risk(&constant_posterior(&[1], &[2.0]), &x, &y, &d).unwrap(), 0.0);
        let half = view_gibbs_risk(&constant_posterior(&[1, -1], &[1.0, 1.0]), &x, &y, &d).unwrap();
        assert_abs_diff_eq!(half, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn disagreement_examples() {
        let x = array![[0.0], [1.0]];
        let d = ExampleDistribution::uniform(2);
        assert_eq!(view_disagreement(&constant_posterior(&[1], &[1.0]), &x, &d).unwrap(), 0.0);
        let v = view_disagreement(&constant_posterior(&[1, -1], &[0.7, 0.7]), &x, &d).unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-15);
        // uniform weighting ignores Q
        let u = view_disagreement_with(&constant_posterior(&[1, -1], &[0.9, 0.1]), &x, &d, VoterWeighting::Uniform)
            .unwrap();
        assert_abs_diff_eq!(u, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn cbound_examples() {
        assert_eq!(mv_cbound(&[1.0], &[0.0], &[0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(mv_cbound(&[1.0], &[0.25], &[0.25]).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(
            mv_cbound(&[0.5, 0.5], &[0.5, 0.5], &[0.1, 0.1]),
            Err(Error::Infeasible { .. })
        ));
        assert!(mv_cbound(&[1.0], &[0.1], &[0.5]).is_err());
        assert!(mv_cbound(&[1.0], &[0.1, 0.2], &[0.1]).is_err());
    }

    #[test]
    fn binary_kl_examples() {
        assert_eq!(binary_kl(0.5, 0.5), 0.0);
        assert_abs_diff_eq!(binary_kl(0.0, 0.5), 2f64.ln(), epsilon = 1e-15);
        let want = 0.1 * (1.0f64 / 3.0).ln() + 0.9 * (0.9f64 / 0.7).ln();
        assert_abs_diff_eq!(binary_kl(0.1, 0.3), want, epsilon = 1e-15);
        assert_abs_diff_eq!(binary_kl(0.1, 0.3), 0.116_322, epsilon = 1e-6);
        assert_eq!(binary_kl(0.2, 0.0), f64::INFINITY);
        assert_eq!(binary_kl(0.2, 1.0), f64::INFINITY);
        assert_eq!(binary_kl(0.0, 0.0), 0.0);
        assert_eq!(binary_kl(1.0, 1.0), 0.0);
        assert!(binary_kl(1.2, 0.5).is_nan());
    }

    #[test]
    fn kl_sup_inverse_examples() {
        assert_eq!(kl_sup_inverse(0.2, 0.0, 0.5).unwrap(), 0.2);
        let r = kl_sup_inverse(0.2, 0.05, 0.5).unwrap();
        assert!(r > 0.2 && r < 0.5);
        assert!((binary_kl(0.2, r) - 0.05).abs() <= 1e-8);
        assert_eq!(kl_sup_inverse(0.2, 10.0, 0.5).unwrap(), 0.5);
        // q above the cap: kl(0.7 || 0.5) ~ 0.082
        assert!(matches!(kl_sup_inverse(0.7, 0.01, 0.5), Err(Error::EmptyInterval { .. })));
        assert_eq!(kl_sup_inverse(0.7, 0.1, 0.5).unwrap(), 0.5);
        assert!(kl_sup_inverse(0.2, -1.0, 0.5).is_err());
        assert!(kl_sup_inverse(0.2, 0.1, 0.0).is_err());
    }

    #[test]
    fn kl_inf_inverse_examples() {
        assert_eq!(kl_inf_inverse(0.3, 0.0).unwrap(), 0.3);
        let d = kl_inf_inverse(0.3, 0.05).unwrap();
        assert!(d < 0.3 && d > 0.0);
        assert!((binary_kl(0.3, d) - 0.05).abs() <= 1e-8);
        assert_eq!(kl_inf_inverse(0.0, 0.3).unwrap(), 0.0);
        let wide = kl_inf_inverse(0.3, 100.0).unwrap();
        assert!(wide < 1e-12 && binary_kl(0.3, wide) <= 100.0);
    }

    #[test]
    fn kl_to_uniform_values() {
        assert_abs_diff_eq!(kl_to_uniform(&[0.25; 4]), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(kl_to_uniform(&[1.0, 0.0, 0.0]), 3f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn catoni_examples() {
        // independent evaluation of the closed form
        let klsum: f64 = 0.5 + (1.0f64 / 0.05).ln();
        let want = (1.0 - (-(1.0 * 0.1 + klsum / 500.0)).exp()) / (1.0 - (-1.0f64).exp());
        let got = catoni_bound(0.1, 0.3, 0.2, 500, 1.0, 0.05).unwrap();
        assert_abs_diff_eq!(got, want, epsilon = 1e-14);

        let b: Vec<f64> = [10, 100, 1000].iter().map(|&n| catoni_bound(0.0, 0.0, 0.0, n, 1.0, 1.0).unwrap()).collect();
        assert!(b.iter().all(|&x| x == 0.0));
        let b: Vec<f64> = [10, 100, 1000].iter().map(|&n| catoni_bound(0.0, 1.0, 0.0, n, 1.0, 0.5).unwrap()).collect();
        assert!(b[0] > b[1] && b[1] > b[2]);

        assert!(catoni_bound(0.1, 0.0, 0.0, 10, 0.0, 0.05).is_err());
        assert!(catoni_bound(0.1, 0.0, 0.0, 10, 1.0, 0.0).is_err());
    }

    #[test]
    fn theorem_bound_limits() {
        let view = ViewEmpirical {
            gibbs: 0.2,
            disagreement: 0.3,
            kl: 0.0,
        };
        let emp = mv_cbound(&[1.0], &[0.2], &[0.3]).unwrap();
        let big = theorem_cbound_bound(&[view], &[1.0], 10_000_000, 0.05).unwrap();
        assert!(big >= emp && big - emp <= 0.01, "{big} vs {emp}");
        assert_eq!(theorem_cbound_bound(&[view], &[1.0], 10, 0.05).unwrap(), 1.0);
    }

    #[test]
    fn theorem_bound_matches_hand_composition() {
        let views = [
            ViewEmpirical { gibbs: 0.1, disagreement: 0.2, kl: 0.5 },
            ViewEmpirical { gibbs: 0.15, disagreement: 0.25, kl: 1.0 },
        ];
        let rho = [0.3, 0.7];
        let n = 5000usize;
        let delta = 0.05;
        let log_term = (4.0 * (n as f64).sqrt() / delta).ln();
        let mut er = 0.0;
        let mut ed = 0.0;
        for (v, w) in views.iter().zip(rho) {
            er += w * kl_sup_inverse(v.gibbs, (v.kl + log_term) / n as f64, 0.5).unwrap();
            ed += w * kl_inf_inverse(v.disagreement, (2.0 * v.kl + log_term) / n as f64).unwrap();
        }
        let want = 1.0 - (1.0 - 2.0 * er).powi(2) / (1.0 - 2.0 * ed);
        let got = theorem_cbound_bound(&views, &rho, n, delta).unwrap();
        assert_abs_diff_eq!(got, want, epsilon = 1e-15);
        assert!(got > mv_cbound(&rho, &[0.1, 0.15], &[0.2, 0.25]).unwrap());
    }
}
