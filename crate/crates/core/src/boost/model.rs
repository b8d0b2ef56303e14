use std::path::Path;

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use super::BoostConfig;
use crate::cbound_opt::SimplexWeights;
use crate::data::write_all_atomic;
use crate::data::{Label, MultiviewDataset};
use crate::error::{Error, Result};
use crate::measures::ViewPosterior;

pub const MODEL_FORMAT: u32 = 1;

/// `sign(sum_v rho_v sum_t Q_v^t h_v^t(x^v))` with `sign(0) = +1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct MVMajorityVote {
    pub per_view: Vec<ViewPosterior>,
    pub rho: SimplexWeights,
    pub view_dims: Vec<usize>,
    pub config: BoostConfig,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: u32,
    config: BoostConfig,
    iterations: usize,
    view_dims: Vec<usize>,
    rho: SimplexWeights,
    per_view: Vec<ViewPosterior>,
}

impl TryFrom<ModelFile> for MVMajorityVote {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        if f.format != MODEL_FORMAT {
            return Err(Error::InvalidArgument(format!(
                "model format {} is not supported (expected {MODEL_FORMAT})",
                f.format
            )));
        }
        let m = MVMajorityVote::new(f.per_view, f.rho, f.view_dims, f.config)?;
        if m.iterations() != f.iterations {
            return Err(Error::Shape(format!(
                "model declares {} iterations but holds {}",
                f.iterations,
                m.iterations()
            )));
        }
        Ok(m)
    }
}

impl From<MVMajorityVote> for ModelFile {
    fn from(m: MVMajorityVote) -> Self {
        ModelFile {
            format: MODEL_FORMAT,
            iterations: m.iterations(),
            config: m.config,
            view_dims: m.view_dims,
            rho: m.rho,
            per_view: m.per_view,
        }
    }
}

impl MVMajorityVote {
    pub fn new(
        per_view: Vec<ViewPosterior>,
        rho: SimplexWeights,
        view_dims: Vec<usize>,
        config: BoostConfig,
    ) -> Result<Self> {
        let v = per_view.len();
        if v == 0 || rho.len() != v || view_dims.len() != v {
            return Err(Error::Shape(format!(
                "{v} view posteriors, {} view weights, {} view dimensions",
                rho.len(),
                view_dims.len()
            )));
        }
        let t = per_view[0].len();
        for (k, post) in per_view.iter().enumerate() {
            post.validate()?;
            if post.len() != t {
                return Err(Error::Shape(format!("view {k} has {} voters, view 0 has {t}", post.len())));
            }
            for h in &post.voters {
                h.validate()?;
                if h.view_index != k {
                    return Err(Error::Shape(format!("voter of view {} stored under view {k}", h.view_index)));
                }
                h.check_dims(view_dims[k])?;
            }
        }
        Ok(Self {
            per_view,
            rho,
            view_dims,
            config,
        })
    }

    pub fn n_views(&self) -> usize {
        self.per_view.len()
    }

    /// Voters per view.
    pub fn iterations(&self) -> usize {
        self.per_view[0].len()
    }

    pub fn check_dataset(&self, ds: &MultiviewDataset) -> Result<()> {
        if ds.view_dims() != self.view_dims {
            return Err(Error::Shape(format!(
                "dataset view dimensions {:?} differ from model {:?}",
                ds.view_dims(),
                self.view_dims
            )));
        }
        Ok(())
    }

    fn check_example(&self, x: &[ArrayView1<'_, f64>]) -> Result<()> {
        let dims: Vec<usize> = x.iter().map(|xv| xv.len()).collect();
        if dims != self.view_dims {
            return Err(Error::Shape(format!(
                "example dimensions {dims:?} differ from model {:?}",
                self.view_dims
            )));
        }
        Ok(())
    }

    pub fn predict_margin(&self, x: &[ArrayView1<'_, f64>]) -> Result<f64> {
        self.check_example(x)?;
        let mut margin = 0.0;
        for ((post, &rho_v), xv) in self.per_view.iter().zip(self.rho.as_slice()).zip(x) {
            let mut s = 0.0;
            for (h, q) in post.voters.iter().zip(&post.q_weights) {
                s += q * f64::from(h.predict(xv.view()));
            }
            margin += rho_v * s;
        }
        Ok(margin)
    }

    pub fn predict(&self, x: &[ArrayView1<'_, f64>]) -> Result<Label> {
        Ok(sign(self.predict_margin(x)?))
    }

    /// Margins of every example, summed in the same order as [`Self::predict_margin`].
    pub fn margins(&self, ds: &MultiviewDataset) -> Result<Vec<f64>> {
        self.check_dataset(ds)?;
        let n = ds.n_examples();
        let mut margin = vec![0.0; n];
        for (v, (post, &rho_v)) in self.per_view.iter().zip(self.rho.as_slice()).enumerate() {
            let mut s = vec![0.0; n];
            for (h, q) in post.voters.iter().zip(&post.q_weights) {
                for (si, p) in s.iter_mut().zip(h.predict_all(ds.view(v))?) {
                    *si += q * f64::from(p);
                }
            }
            for (m, si) in margin.iter_mut().zip(s) {
                *m += rho_v * si;
            }
        }
        Ok(margin)
    }

    pub fn predict_dataset(&self, ds: &MultiviewDataset) -> Result<Vec<Label>> {
        Ok(self.margins(ds)?.into_iter().map(sign).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_all_atomic(&[(path.as_ref().to_path_buf(), self.to_json()?)])
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Sign with ties resolved to +1.
pub fn sign(m: f64) -> Label {
    if m >= 0.0 {
        1
    } else {
        -1
    }
}
