//! Oracles shared by the integration tests. Everything here is written
//! against definitions, not against the library's internals.
#![allow(dead_code)]

use ndarray::Array2;
use pbmvboost::boost::BoostConfig;
use pbmvboost::cbound_opt::SimplexWeights;
use pbmvboost::measures::ViewPosterior;
use pbmvboost::weak::Node;
use pbmvboost::{ExampleDistribution, MVMajorityVote, MultiviewDataset, WeakVoter};
use rand::Rng;

pub const TIE: f64 = 1e-12;

fn stump_error(x: &Array2<f64>, y: &[i8], d: &[f64], f: usize, thr: f64, left: i8, right: i8) -> f64 {
    (0..y.len())
        .filter(|&i| (if x[[i, f]] <= thr { left } else { right }) != y[i])
        .map(|i| d[i])
        .sum()
}

fn separating_midpoint(a: f64, b: f64) -> f64 {
    let t = a + (b - a) / 2.0;
    if t < b {
        t
    } else {
        a
    }
}

/// Exhaustive 0-1 stump search. Candidates are visited as: constant +1,
/// constant -1, then per feature every midpoint between consecutive distinct
/// values in increasing order, with polarity (-1, +1) before (+1, -1). A
/// candidate wins only if it beats the incumbent by more than `TIE`.
pub fn oracle_stump(x: &Array2<f64>, y: &[i8], d: &[f64]) -> Node {
    let neg: f64 = (0..y.len()).filter(|&i| y[i] < 0).map(|i| d[i]).sum();
    let pos: f64 = (0..y.len()).filter(|&i| y[i] > 0).map(|i| d[i]).sum();
    let mut best = Node::Leaf { leaf: 1 };
    let mut best_err = neg;
    if pos < best_err - TIE {
        best = Node::Leaf { leaf: -1 };
        best_err = pos;
    }
    for f in 0..x.ncols() {
        let mut vals: Vec<f64> = x.column(f).to_vec();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.dedup();
        for w in vals.windows(2) {
            let thr = separating_midpoint(w[0], w[1]);
            for (l, r) in [(-1, 1), (1, -1)] {
                let err = stump_error(x, y, d, f, thr, l, r);
                if err < best_err - TIE {
                    best_err = err;
                    best = Node::Split {
                        feature: f,
                        threshold: thr,
                        left: Box::new(Node::Leaf { leaf: l }),
                        right: Box::new(Node::Leaf { leaf: r }),
                    };
                }
            }
        }
    }
    best
}

pub fn predict_node(node: &Node, row: ndarray::ArrayView1<'_, f64>) -> i8 {
    match node {
        Node::Leaf { leaf } => *leaf,
        Node::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            if row[*feature] <= *threshold {
                predict_node(left, row)
            } else {
                predict_node(right, row)
            }
        }
    }
}

pub struct AdaRound {
    pub stump: Node,
    pub alpha: f64,
    /// Distribution the stump was trained on.
    pub dist: Vec<f64>,
}

/// Textbook discrete AdaBoost on decision stumps.
pub fn adaboost_oracle(x: &Array2<f64>, y: &[i8], rounds: usize) -> Vec<AdaRound> {
    let n = y.len();
    let mut d = vec![1.0 / n as f64; n];
    let mut out = Vec::new();
    for _ in 0..rounds {
        let stump = oracle_stump(x, y, &d);
        let h: Vec<i8> = x.rows().into_iter().map(|row| predict_node(&stump, row)).collect();
        let eps: f64 = (0..n).filter(|&i| h[i] != y[i]).map(|i| d[i]).sum();
        let eps = eps.clamp(1e-10, 1.0 - 1e-10);
        let alpha = 0.5 * ((1.0 - eps) / eps).ln();
        let unnorm: Vec<f64> = (0..n)
            .map(|i| d[i] * (-(y[i] as f64) * alpha * h[i] as f64).exp())
            .collect();
        let z: f64 = unnorm.iter().sum();
        out.push(AdaRound {
            stump,
            alpha,
            dist: d.clone(),
        });
        d = unnorm.iter().map(|u| u / z).collect();
    }
    out
}

pub fn random_simplex(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k)
        .map(|_| if rng.gen_bool(0.15) { 0.0 } else { -rng.gen::<f64>().max(1e-300).ln() })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..k)] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// A random (model, dataset, distribution) triple. Feature 0 of every view
/// carries the label with probability `agreement`, and most voters are
/// stumps on it, so Gibbs risks below 1/2 are common.
pub fn random_triple(rng: &mut impl Rng, agreement: f64) -> (MVMajorityVote, MultiviewDataset, ExampleDistribution) {
    let v = rng.gen_range(1..=4);
    let n = rng.gen_range(5..=40);
    let dims: Vec<usize> = (0..v).map(|_| rng.gen_range(1..=3)).collect();
    let labels: Vec<i8> = (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    let views: Vec<Array2<f64>> = dims
        .iter()
        .map(|&dv| {
            Array2::from_shape_fn((n, dv), |(i, j)| {
                if j == 0 {
                    let s = if rng.gen_bool(agreement) { labels[i] } else { -labels[i] } as f64;
                    s * rng.gen_range(0.05..1.0)
                } else {
                    rng.gen_range(-1.0..1.0)
                }
            })
        })
        .collect();
    let names = (0..v).map(|k| format!("v{k}")).collect();
    let ds = MultiviewDataset::new(views, labels, names).unwrap();
    let t = rng.gen_range(1..=5);
    let per_view = (0..v)
        .map(|k| {
            let voters: Vec<WeakVoter> = (0..t)
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        WeakVoter::constant(k, if rng.gen_bool(0.5) { 1 } else { -1 })
                    } else if rng.gen_bool(0.8) {
                        WeakVoter::stump(k, 0, rng.gen_range(-0.3..0.3), -1, 1)
                    } else {
                        let f = rng.gen_range(0..dims[k]);
                        let l = if rng.gen_bool(0.5) { 1 } else { -1 };
                        WeakVoter::stump(k, f, rng.gen_range(-1.0..1.0), l, -l)
                    }
                })
                .collect();
            let q: Vec<f64> = (0..t)
                .map(|_| if rng.gen_bool(0.05) { 0.0 } else { rng.gen_range(-0.5..2.0) })
                .collect();
            ViewPosterior::new(voters, q).unwrap()
        })
        .collect();
    let rho = SimplexWeights::new(random_simplex(rng, v)).unwrap();
    let model = MVMajorityVote::new(per_view, rho, dims, BoostConfig::default()).unwrap();
    let dist = ExampleDistribution::from_weights(random_simplex(rng, n)).unwrap();
    (model, ds, dist)
}

/// Posterior weights of one view: `|q| / sum |q|`, uniform if all zero.
pub fn abs_normalized(q: &[f64]) -> Vec<f64> {
    let s: f64 = q.iter().map(|x| x.abs()).sum();
    if s == 0.0 {
        vec![1.0 / q.len() as f64; q.len()]
    } else {
        q.iter().map(|x| x.abs() / s).collect()
    }
}

/// Every voter of the model with its global weight `rho_v * w_{v,k}`.
pub fn flat_voters(model: &MVMajorityVote) -> Vec<(f64, &WeakVoter)> {
    let mut out = Vec::new();
    for (post, &r) in model.per_view.iter().zip(model.rho.as_slice()) {
        for (w, h) in abs_normalized(&post.q_weights).into_iter().zip(&post.voters) {
            out.push((r * w, h));
        }
    }
    out
}

pub fn voter_output(h: &WeakVoter, ds: &MultiviewDataset, i: usize) -> i8 {
    predict_node(&h.tree, ds.view(h.view_index).row(i))
}

/// `sum_i D_i sum_{(w,h)} w 1[h(x_i) != y_i]`.
pub fn oracle_gibbs(model: &MVMajorityVote, ds: &MultiviewDataset, dist: &ExampleDistribution) -> f64 {
    let voters = flat_voters(model);
    let mut total = 0.0;
    for i in 0..ds.n_examples() {
        let wrong: f64 = voters
            .iter()
            .filter(|(_, h)| voter_output(h, ds, i) != ds.labels()[i])
            .map(|(w, _)| w)
            .sum();
        total += dist.weights()[i] * wrong;
    }
    total
}

/// `sum_i D_i sum_{a,b} w_a w_b 1[h_a(x_i) != h_b(x_i)]` over all voter pairs.
pub fn oracle_disagreement(model: &MVMajorityVote, ds: &MultiviewDataset, dist: &ExampleDistribution) -> f64 {
    let voters = flat_voters(model);
    let mut total = 0.0;
    for i in 0..ds.n_examples() {
        let mut s = 0.0;
        for (wa, ha) in &voters {
            for (wb, hb) in &voters {
                if voter_output(ha, ds, i) != voter_output(hb, ds, i) {
                    s += wa * wb;
                }
            }
        }
        total += dist.weights()[i] * s;
    }
    total
}

/// Weighted error of `sign(sum w h)` with ties to +1.
pub fn oracle_vote_error(model: &MVMajorityVote, ds: &MultiviewDataset, dist: &ExampleDistribution) -> f64 {
    let voters = flat_voters(model);
    (0..ds.n_examples())
        .filter(|&i| {
            let m: f64 = voters.iter().map(|(w, h)| w * voter_output(h, ds, i) as f64).sum();
            (if m >= 0.0 { 1 } else { -1 }) != ds.labels()[i]
        })
        .map(|i| dist.weights()[i])
        .sum()
}

/// `F(rho) = (1 - 2<rho,r>)^2 / (1 - 2<rho,d>)`, `None` off the feasible set.
pub fn cbound_objective(rho: &[f64], r: &[f64], d: &[f64]) -> Option<f64> {
    let a: f64 = rho.iter().zip(r).map(|(x, y)| x * y).sum();
    let b: f64 = rho.iter().zip(d).map(|(x, y)| x * y).sum();
    (a < 0.5 - 1e-9 && b < 0.5 - 1e-9).then(|| (1.0 - 2.0 * a).powi(2) / (1.0 - 2.0 * b))
}

/// Maximum of `F` over the simplex grid with step 1/100, V = 3.
pub fn grid_max_v3(r: &[f64], d: &[f64]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..=100 {
        for j in 0..=100 - i {
            let rho = [i as f64 / 100.0, j as f64 / 100.0, (100 - i - j) as f64 / 100.0];
            if let Some(f) = cbound_objective(&rho, r, d) {
                best = Some(best.map_or(f, |b: f64| b.max(f)));
            }
        }
    }
    best
}
