//! View weights maximizing `F(rho) = (1 - 2<rho,r>)^2 / (1 - 2<rho,d>)` on
//! the probability simplex.
//!
//! `F` is the perspective of a square composed with affine maps, hence convex
//! on the feasible set, so maximizers sit at extreme points. The solver runs
//! projected-gradient ascent with Armijo backtracking from the uniform point,
//! the warm start and every vertex, and keeps the best feasible result.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::dot;

/// Both `<rho,r>` and `<rho,d>` must stay below `1/2 - FEASIBILITY_MARGIN`.
pub const FEASIBILITY_MARGIN: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 500;
/// A later start replaces the incumbent only if it beats it by more than this.
const TIE_TOL: f64 = 1e-12;
const ARMIJO: f64 = 1e-4;

/// A point on the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    pub const SUM_TOL: f64 = 1e-9;

    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::InvalidArgument("empty simplex vector".into()));
        }
        if rho.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidArgument(format!("{rho:?} has a negative or non-finite entry")));
        }
        let total: f64 = rho.iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidArgument(format!("{rho:?} sums to {total}")));
        }
        Ok(Self(rho))
    }

    pub fn uniform(v: usize) -> Self {
        assert!(v > 0, "uniform weights over zero views");
        Self(vec![1.0 / v as f64; v])
    }

    pub fn vertex(v: usize, at: usize) -> Self {
        let mut rho = vec![0.0; v];
        rho[at] = 1.0;
        Self(rho)
    }

    /// Euclidean projection of an arbitrary finite vector onto the simplex.
    pub fn project(y: &[f64]) -> Self {
        assert!(!y.is_empty(), "projection of an empty vector");
        let mut sorted = y.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut cumulative = 0.0;
        let mut theta = 0.0;
        for (k, &u) in sorted.iter().enumerate() {
            cumulative += u;
            let t = (cumulative - 1.0) / (k + 1) as f64;
            if u - t > 0.0 {
                theta = t;
            }
        }
        let mut x: Vec<f64> = y.iter().map(|&v| (v - theta).max(0.0)).collect();
        let total: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= total);
        Self(x)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for SimplexWeights {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SimplexWeights> for Vec<f64> {
    fn from(s: SimplexWeights) -> Self {
        s.0
    }
}

/// Result of [`optimize_view_weights`].
#[derive(Debug, Clone, PartialEq)]
pub struct ViewWeightFit {
    pub rho: SimplexWeights,
    /// `F(rho)`, or `None` when no feasible weights exist.
    pub objective: Option<f64>,
}

impl ViewWeightFit {
    pub fn feasible(&self) -> bool {
        self.objective.is_some()
    }
}

/// The objective `F` and its feasibility.
#[derive(Debug, Clone, Copy)]
struct Problem<'a> {
    r: &'a [f64],
    d: &'a [f64],
}

impl Problem<'_> {
    const LIMIT: f64 = 0.5 - FEASIBILITY_MARGIN;

    fn is_feasible(&self, rho: &[f64]) -> bool {
        dot(rho, self.r) < Self::LIMIT && dot(rho, self.d) < Self::LIMIT
    }

    fn value(&self, rho: &[f64]) -> f64 {
        let u = 1.0 - 2.0 * dot(rho, self.r);
        let w = 1.0 - 2.0 * dot(rho, self.d);
        u * u / w
    }

    fn gradient(&self, rho: &[f64]) -> Vec<f64> {
        let u = 1.0 - 2.0 * dot(rho, self.r);
        let w = 1.0 - 2.0 * dot(rho, self.d);
        self.r
            .iter()
            .zip(self.d)
            .map(|(&rv, &dv)| -4.0 * u * rv / w + 2.0 * u * u * dv / (w * w))
            .collect()
    }

    /// A feasible point with support at most two, if one exists.
    ///
    /// With two inequality constraints plus the simplex equality, a basic
    /// solution of `min t s.t. <rho,r> <= t, <rho,d> <= t` has at most two
    /// nonzero weights, so scanning all pairs is exhaustive.
    fn feasible_point(&self) -> Option<Vec<f64>> {
        let v = self.r.len();
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut consider = |lambda: f64, a: usize, b: usize| {
            let mut rho = vec![0.0; v];
            rho[a] += lambda;
            rho[b] += 1.0 - lambda;
            let worst = dot(&rho, self.r).max(dot(&rho, self.d));
            if best.as_ref().is_none_or(|(w, _)| worst < *w) {
                best = Some((worst, rho));
            }
        };
        for a in 0..v {
            for b in a..v {
                consider(1.0, a, b);
                consider(0.0, a, b);
                // crossing of the two affine functions of lambda
                let (dr, dd) = (self.r[a] - self.r[b], self.d[a] - self.d[b]);
                let denom = dr - dd;
                if denom != 0.0 {
                    let lambda = (self.d[b] - self.r[b]) / denom;
                    if (0.0..=1.0).contains(&lambda) {
                        consider(lambda, a, b);
                    }
                }
            }
        }
        best.filter(|(w, _)| *w < Self::LIMIT).map(|(_, rho)| rho)
    }

    fn ascend(&self, start: &[f64]) -> (Vec<f64>, f64) {
        let mut x = start.to_vec();
        let mut fx = self.value(&x);
        let mut step = 1.0;
        for _ in 0..MAX_ITERATIONS {
            let g = self.gradient(&x);
            let mut accepted = None;
            let mut eta = step;
            while eta > 1e-16 {
                let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + eta * gi).collect();
                let y = SimplexWeights::project(&trial).0;
                if self.is_feasible(&y) {
                    let fy = self.value(&y);
                    let predicted: f64 = g.iter().zip(y.iter().zip(&x)).map(|(gi, (yi, xi))| gi * (yi - xi)).sum();
                    if fy >= fx + ARMIJO * predicted {
                        accepted = Some((y, fy));
                        break;
                    }
                }
                eta *= 0.5;
            }
            let Some((y, fy)) = accepted else { break };
            let moved: f64 = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
            let gain = fy - fx;
            x = y;
            fx = fy;
            step = (eta * 2.0).min(1e6);
            if moved < 1e-15 || gain <= 1e-16 * fx.abs().max(1.0) {
                break;
            }
        }
        (x, fx)
    }
}

/// Maximize `F(rho)` on the feasible part of the simplex.
///
/// When no weights make both `<rho,r>` and `<rho,d>` smaller than 1/2, the
/// warm start is returned unchanged with `objective: None`.
pub fn optimize_view_weights(r: &[f64], d: &[f64], rho_init: &SimplexWeights) -> Result<ViewWeightFit> {
    let v = rho_init.len();
    if r.len() != v || d.len() != v {
        return Err(Error::Shape(format!(
            "{} risks, {} disagreements for {v} views",
            r.len(),
            d.len()
        )));
    }
    if r.iter().chain(d).any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidArgument(format!("r = {r:?}, d = {d:?} must lie in [0, 1]")));
    }
    let problem = Problem { r, d };

    let Some(fallback) = problem.feasible_point() else {
        return Ok(ViewWeightFit {
            rho: rho_init.clone(),
            objective: None,
        });
    };

    let mut starts = vec![SimplexWeights::uniform(v).0, rho_init.0.clone()];
    starts.extend((0..v).map(|k| SimplexWeights::vertex(v, k).0));
    starts.retain(|s| problem.is_feasible(s));
    if starts.is_empty() {
        starts.push(fallback);
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    for s in &starts {
        let (x, fx) = problem.ascend(s);
        if best.as_ref().is_none_or(|(_, fb)| fx > fb + TIE_TOL) {
            best = Some((x, fx));
        }
    }
    let (rho, objective) = best.expect("at least one feasible start");
    Ok(ViewWeightFit {
        rho: SimplexWeights(rho),
        objective: Some(objective),
    })
}
