//! Multiview datasets: aligned per-view feature matrices plus ±1 labels.

mod manifest;
mod mnist;
mod synth;

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};

pub use manifest::{load_manifest, write_manifest, Manifest};
pub(crate) use manifest::write_all_atomic;
pub use mnist::{load_idx, split_image_views, ImageSet, ViewMode, IMAGE_SIDE, WINDOW_SIDE};
pub use synth::synth_multiview;

/// A binary label, always exactly -1 or +1.
pub type Label = i8;

/// `V` aligned views of the same `n` examples.
///
/// Row `i` of every view describes example `i`. An optional multiclass id per
/// example is carried along so one-vs-all relabeling can be done later.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiviewDataset {
    views: Vec<Array2<f64>>,
    labels: Vec<Label>,
    view_names: Vec<String>,
    class_ids: Option<Vec<u32>>,
}

impl MultiviewDataset {
    pub fn new(views: Vec<Array2<f64>>, labels: Vec<Label>, view_names: Vec<String>) -> Result<Self> {
        Self::with_classes(views, labels, view_names, None)
    }

    pub fn with_classes(
        views: Vec<Array2<f64>>,
        labels: Vec<Label>,
        view_names: Vec<String>,
        class_ids: Option<Vec<u32>>,
    ) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::Shape("a dataset needs at least one view".into()));
        }
        let n = labels.len();
        if n == 0 {
            return Err(Error::Shape("a dataset needs at least one example".into()));
        }
        if view_names.len() != views.len() {
            return Err(Error::Shape(format!(
                "{} view names for {} views",
                view_names.len(),
                views.len()
            )));
        }
        for (v, m) in views.iter().enumerate() {
            if m.nrows() != n {
                return Err(Error::RowMismatch {
                    what: format!("view {v} ({})", view_names[v]),
                    expected: n,
                    found: m.nrows(),
                });
            }
            if m.ncols() == 0 {
                return Err(Error::Shape(format!("view {v} has no features")));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
            return Err(Error::Shape(format!("label {bad} is not -1 or +1")));
        }
        if let Some(ids) = &class_ids {
            if ids.len() != n {
                return Err(Error::RowMismatch {
                    what: "class ids".into(),
                    expected: n,
                    found: ids.len(),
                });
            }
        }
        Ok(Self {
            views,
            labels,
            view_names,
            class_ids,
        })
    }

    pub fn n_examples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    pub fn view(&self, v: usize) -> &Array2<f64> {
        &self.views[v]
    }

    pub fn views(&self) -> &[Array2<f64>] {
        &self.views
    }

    pub fn view_dims(&self) -> Vec<usize> {
        self.views.iter().map(|m| m.ncols()).collect()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn view_names(&self) -> &[String] {
        &self.view_names
    }

    pub fn class_ids(&self) -> Option<&[u32]> {
        self.class_ids.as_deref()
    }

    /// Class ids if present, otherwise `1` for +1 and `0` for -1.
    pub fn class_ids_or_binary(&self) -> Vec<u32> {
        match &self.class_ids {
            Some(ids) => ids.clone(),
            None => self.labels.iter().map(|&y| u32::from(y > 0)).collect(),
        }
    }

    /// Example `i` as one feature row per view.
    pub fn example(&self, i: usize) -> Vec<ArrayView1<'_, f64>> {
        self.views.iter().map(|m| m.row(i)).collect()
    }

    /// Rows `indices` (in that order) of every view.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let views = self
            .views
            .iter()
            .map(|m| m.select(ndarray::Axis(0), indices))
            .collect();
        Self {
            views,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            view_names: self.view_names.clone(),
            class_ids: self
                .class_ids
                .as_ref()
                .map(|ids| indices.iter().map(|&i| ids[i]).collect()),
        }
    }

    /// Relabel one-vs-all: +1 iff the class id equals `positive`.
    pub fn one_vs_all(&self, positive: u32) -> Self {
        let ids = self.class_ids_or_binary();
        let labels = ids.iter().map(|&c| if c == positive { 1 } else { -1 }).collect();
        Self {
            views: self.views.clone(),
            labels,
            view_names: self.view_names.clone(),
            class_ids: Some(ids),
        }
    }

    /// Same examples with the views in a different order.
    pub fn permute_views(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_views()];
        for &v in order {
            if v >= self.n_views() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidArgument(format!("{order:?} is not a view permutation")));
            }
        }
        if order.len() != self.n_views() {
            return Err(Error::InvalidArgument(format!("{order:?} is not a view permutation")));
        }
        Ok(Self {
            views: order.iter().map(|&v| self.views[v].clone()).collect(),
            labels: self.labels.clone(),
            view_names: order.iter().map(|&v| self.view_names[v].clone()).collect(),
            class_ids: self.class_ids.clone(),
        })
    }

    /// Keep only the views in `keep`.
    pub fn select_views(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() || keep.iter().any(|&v| v >= self.n_views()) {
            return Err(Error::InvalidArgument(format!("invalid view selection {keep:?}")));
        }
        Ok(Self {
            views: keep.iter().map(|&v| self.views[v].clone()).collect(),
            labels: self.labels.clone(),
            view_names: keep.iter().map(|&v| self.view_names[v].clone()).collect(),
            class_ids: self.class_ids.clone(),
        })
    }
}

/// Default names `view0`, `view1`, ...
pub fn default_view_names(v: usize) -> Vec<String> {
    (0..v).map(|i| format!("view{i}")).collect()
}
