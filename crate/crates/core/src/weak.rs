//! Weighted decision-tree weak voters on a single view.
//!
//! Depth-1 voters are exact minimizers of the weighted 0-1 error over every
//! (feature, threshold, polarity) triple plus the two constant voters. Deeper
//! trees are grown greedily with distribution-weighted Gini impurity and
//! weighted-majority leaves.

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};

/// Candidates whose criterion differs by less than this (relative to the node
/// mass) are ties, resolved by lowest feature index then lowest threshold.
pub const TIE_EPS: f64 = 1e-12;

/// Nonnegative example weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleDistribution {
    weights: Vec<f64>,
}

impl ExampleDistribution {
    pub const SUM_TOL: f64 = 1e-9;

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution over zero examples");
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Validate weights that already sum to one.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("empty distribution".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidArgument("distribution weights must be finite and >= 0".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidArgument(format!("distribution sums to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    /// Rescale nonnegative masses to sum to one.
    pub fn normalize(masses: Vec<f64>) -> Result<Self> {
        if masses.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidArgument("masses must be finite and >= 0".into()));
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument("masses sum to zero".into()));
        }
        Ok(Self {
            weights: masses.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// A binary tree: internal nodes send `x[feature] <= threshold` left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Leaf {
        leaf: Label,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> Label {
        let mut node = self;
        loop {
            match node {
                Node::Leaf { leaf } => return *leaf,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn max_feature(&self) -> Option<usize> {
        match self {
            Node::Leaf { .. } => None,
            Node::Split {
                feature, left, right, ..
            } => Some(
                (*feature)
                    .max(left.max_feature().unwrap_or(0))
                    .max(right.max_feature().unwrap_or(0)),
            ),
        }
    }

    fn leaves_valid(&self) -> bool {
        match self {
            Node::Leaf { leaf } => *leaf == 1 || *leaf == -1,
            Node::Split {
                threshold, left, right, ..
            } => threshold.is_finite() && left.leaves_valid() && right.leaves_valid(),
        }
    }
}

/// A depth-limited tree voter attached to one view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakVoter {
    pub view_index: usize,
    pub depth: usize,
    pub tree: Node,
}

impl WeakVoter {
    pub fn constant(view_index: usize, label: Label) -> Self {
        Self {
            view_index,
            depth: 1,
            tree: Node::Leaf { leaf: label },
        }
    }

    pub fn stump(view_index: usize, feature: usize, threshold: f64, left: Label, right: Label) -> Self {
        Self {
            view_index,
            depth: 1,
            tree: Node::Split {
                feature,
                threshold,
                left: Box::new(Node::Leaf { leaf: left }),
                right: Box::new(Node::Leaf { leaf: right }),
            },
        }
    }

    pub fn predict(&self, x: ArrayView1<'_, f64>) -> Label {
        self.tree.predict(x)
    }

    /// Predictions on every row of `view`.
    pub fn predict_all(&self, view: &Array2<f64>) -> Result<Vec<Label>> {
        self.check_dims(view.ncols())?;
        Ok(view.rows().into_iter().map(|x| self.tree.predict(x)).collect())
    }

    /// Check structural invariants against a view of dimension `dim`.
    pub fn check_dims(&self, dim: usize) -> Result<()> {
        if let Some(f) = self.tree.max_feature() {
            if f >= dim {
                return Err(Error::Shape(format!(
                    "voter uses feature {f} but view {} has {dim} features",
                    self.view_index
                )));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tree.leaves_valid() {
            return Err(Error::Shape("voter leaf not in {-1,+1} or non-finite threshold".into()));
        }
        if self.depth == 0 || self.tree.depth() > self.depth {
            return Err(Error::Shape(format!(
                "voter of declared depth {} has depth {}",
                self.depth,
                self.tree.depth()
            )));
        }
        Ok(())
    }
}

/// `sum_i dist_i * 1[h(x_i) != y_i]`.
pub fn weighted_error(
    voter: &WeakVoter,
    view: &Array2<f64>,
    labels: &[Label],
    dist: &ExampleDistribution,
) -> Result<f64> {
    check_lengths(view.nrows(), labels.len(), dist.len())?;
    let preds = voter.predict_all(view)?;
    Ok(weighted_error_of(&preds, labels, dist.weights()))
}

pub(crate) fn weighted_error_of(preds: &[Label], labels: &[Label], weights: &[f64]) -> f64 {
    preds
        .iter()
        .zip(labels)
        .zip(weights)
        .filter(|((h, y), _)| h != y)
        .map(|(_, w)| w)
        .sum()
}

fn check_lengths(rows: usize, labels: usize, dist: usize) -> Result<()> {
    if rows != labels || rows != dist {
        return Err(Error::Shape(format!(
            "{rows} rows, {labels} labels, {dist} distribution weights"
        )));
    }
    Ok(())
}

/// Train a tree of depth at most `max_depth` on one view (view index 0).
pub fn train_tree(
    view: &Array2<f64>,
    labels: &[Label],
    dist: &ExampleDistribution,
    max_depth: usize,
) -> Result<WeakVoter> {
    TreeTrainer::new(0, view)?.fit(labels, dist, max_depth)
}

/// Presorted feature columns of one view, reusable across boosting rounds.
#[derive(Debug, Clone)]
pub struct TreeTrainer<'a> {
    view_index: usize,
    view: &'a Array2<f64>,
    /// Per feature, example indices sorted by feature value (stable).
    order: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Copy)]
struct Mass {
    pos: f64,
    neg: f64,
}

impl Mass {
    fn total(self) -> f64 {
        self.pos + self.neg
    }

    /// Weighted-majority leaf; ties go to +1.
    fn majority(self) -> Label {
        if self.pos >= self.neg {
            1
        } else {
            -1
        }
    }

    /// Mass-weighted Gini impurity, `W * (1 - p^2 - q^2) = 2 pos neg / W`.
    fn weighted_gini(self) -> f64 {
        let w = self.total();
        if w > 0.0 {
            2.0 * self.pos * self.neg / w
        } else {
            0.0
        }
    }
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    criterion: f64,
}

impl<'a> TreeTrainer<'a> {
    pub fn new(view_index: usize, view: &'a Array2<f64>) -> Result<Self> {
        if view.nrows() == 0 {
            return Err(Error::Shape("cannot train on zero examples".into()));
        }
        if view.nrows() > u32::MAX as usize {
            return Err(Error::Shape("too many examples".into()));
        }
        let order = view
            .columns()
            .into_iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..view.nrows() as u32).collect();
                idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
                idx
            })
            .collect();
        Ok(Self {
            view_index,
            view,
            order,
        })
    }

    pub fn fit(&self, labels: &[Label], dist: &ExampleDistribution, max_depth: usize) -> Result<WeakVoter> {
        if max_depth == 0 {
            return Err(Error::InvalidArgument("max_depth must be at least 1".into()));
        }
        check_lengths(self.view.nrows(), labels.len(), dist.len())?;
        let w = dist.weights();
        let tree = if max_depth == 1 {
            self.best_stump(labels, w)
        } else {
            let members = vec![true; labels.len()];
            self.grow(labels, w, members, max_depth)
        };
        Ok(WeakVoter {
            view_index: self.view_index,
            depth: max_depth,
            tree,
        })
    }

    fn mass_of(labels: &[Label], w: &[f64], members: Option<&[bool]>) -> Mass {
        let mut m = Mass { pos: 0.0, neg: 0.0 };
        for i in 0..labels.len() {
            if members.is_none_or(|s| s[i]) {
                if labels[i] > 0 {
                    m.pos += w[i];
                } else {
                    m.neg += w[i];
                }
            }
        }
        m
    }

    /// Midpoint between consecutive distinct values that still separates them.
    fn midpoint(a: f64, b: f64) -> f64 {
        let t = a + (b - a) / 2.0;
        if t < b {
            t
        } else {
            a
        }
    }

    /// Visit every admissible threshold of `feature` among `members`,
    /// passing `(threshold, mass at or below threshold)`.
    fn scan(
        &self,
        feature: usize,
        labels: &[Label],
        w: &[f64],
        members: Option<&[bool]>,
        mut visit: impl FnMut(f64, Mass),
    ) {
        let col = self.view.column(feature);
        let mut left = Mass { pos: 0.0, neg: 0.0 };
        let mut prev: Option<f64> = None;
        for &i in &self.order[feature] {
            let i = i as usize;
            if !members.is_none_or(|s| s[i]) {
                continue;
            }
            let x = col[i];
            if let Some(p) = prev {
                if x > p {
                    visit(Self::midpoint(p, x), left);
                }
            }
            if labels[i] > 0 {
                left.pos += w[i];
            } else {
                left.neg += w[i];
            }
            prev = Some(x);
        }
    }

    fn best_stump(&self, labels: &[Label], w: &[f64]) -> Node {
        let total = Self::mass_of(labels, w, None);
        // Constant voters first: +1 errs on the negative mass.
        let mut best_err = total.neg;
        let mut best = Node::Leaf { leaf: 1 };
        if total.pos < best_err - TIE_EPS {
            best_err = total.pos;
            best = Node::Leaf { leaf: -1 };
        }
        for feature in 0..self.view.ncols() {
            self.scan(feature, labels, w, None, |threshold, left| {
                let right_pos = total.pos - left.pos;
                let right_neg = total.neg - left.neg;
                // left -1 / right +1, then the flipped polarity.
                let candidates = [(left.pos + right_neg, -1, 1), (left.neg + right_pos, 1, -1)];
                for (err, l, r) in candidates {
                    if err < best_err - TIE_EPS {
                        best_err = err;
                        best = Node::Split {
                            feature,
                            threshold,
                            left: Box::new(Node::Leaf { leaf: l }),
                            right: Box::new(Node::Leaf { leaf: r }),
                        };
                    }
                }
            });
        }
        best
    }

    fn best_gini_split(&self, labels: &[Label], w: &[f64], members: &[bool], node: Mass) -> Option<SplitChoice> {
        let tol = TIE_EPS * node.total().max(f64::MIN_POSITIVE);
        let mut best: Option<SplitChoice> = None;
        for feature in 0..self.view.ncols() {
            self.scan(feature, labels, w, Some(members), |threshold, left| {
                let right = Mass {
                    pos: node.pos - left.pos,
                    neg: node.neg - left.neg,
                };
                let criterion = left.weighted_gini() + right.weighted_gini();
                if best.as_ref().is_none_or(|b| criterion < b.criterion - tol) {
                    best = Some(SplitChoice {
                        feature,
                        threshold,
                        criterion,
                    });
                }
            });
        }
        best
    }

    fn grow(&self, labels: &[Label], w: &[f64], members: Vec<bool>, depth_left: usize) -> Node {
        let node = Self::mass_of(labels, w, Some(&members));
        if depth_left == 0 || node.pos <= 0.0 || node.neg <= 0.0 {
            return Node::Leaf { leaf: node.majority() };
        }
        let Some(split) = self.best_gini_split(labels, w, &members, node) else {
            return Node::Leaf { leaf: node.majority() };
        };
        let col = self.view.column(split.feature);
        let mut left_members = members.clone();
        let mut right_members = members;
        for i in 0..labels.len() {
            if right_members[i] {
                if col[i] <= split.threshold {
                    right_members[i] = false;
                } else {
                    left_members[i] = false;
                }
            }
        }
        Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(self.grow(labels, w, left_members, depth_left - 1)),
            right: Box::new(self.grow(labels, w, right_members, depth_left - 1)),
        }
    }
}
