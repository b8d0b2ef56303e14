use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::write_all_atomic;
use crate::error::Result;

/// Quantities of one boosting round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: usize,
    pub eps: Vec<f64>,
    pub q: Vec<f64>,
    /// Per-view Gibbs risk under the round's example distribution.
    pub r: Vec<f64>,
    /// Per-view disagreement under the round's example distribution.
    pub d: Vec<f64>,
    pub rho: Vec<f64>,
    /// View-averaged C-Bound on the training sample (uniform weights), `None`
    /// when infeasible.
    pub empirical_cbound: Option<f64>,
    pub train_error: f64,
    pub train_f1: f64,
    pub test_error: Option<f64>,
    pub test_f1: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoostTrace {
    pub records: Vec<TraceRecord>,
    /// Example distributions used at each round, when requested: one per
    /// round for shared-distribution learners, one per view and round for
    /// independent per-view AdaBoost. Indexed `[t][group][i]`.
    #[serde(skip)]
    pub distributions: Vec<Vec<Vec<f64>>>,
}

fn push_opt(row: &mut String, x: Option<f64>) {
    match x {
        Some(x) => write!(row, ",{x}").unwrap(),
        None => row.push_str(",nan"),
    }
}

impl BoostTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// CSV with columns `t, eps_v.., q_v.., r_v.., d_v.., rho_v.., cbound,
    /// train_err, train_f1[, test_err, test_f1]`. Infeasible bounds are `nan`.
    pub fn to_csv(&self) -> String {
        let Some(first) = self.records.first() else {
            return String::new();
        };
        let v = first.eps.len();
        let with_test = first.test_error.is_some();
        let mut out = String::from("t");
        for name in ["eps", "q", "r", "d", "rho"] {
            for k in 0..v {
                write!(out, ",{name}_{k}").unwrap();
            }
        }
        out.push_str(",cbound,train_err,train_f1");
        if with_test {
            out.push_str(",test_err,test_f1");
        }
        out.push('\n');
        for rec in &self.records {
            let mut row = rec.t.to_string();
            for col in [&rec.eps, &rec.q, &rec.r, &rec.d, &rec.rho] {
                for x in col {
                    write!(row, ",{x}").unwrap();
                }
            }
            push_opt(&mut row, rec.empirical_cbound);
            write!(row, ",{},{}", rec.train_error, rec.train_f1).unwrap();
            if with_test {
                push_opt(&mut row, rec.test_error);
                push_opt(&mut row, rec.test_f1);
            }
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_all_atomic(&[(path.as_ref().to_path_buf(), self.to_csv())])
    }
}
