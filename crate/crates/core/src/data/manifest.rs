//! JSON manifest of per-view CSV files plus a labels file.
//!
//! ```json
//! {"views": ["v0.csv", "v1.csv"], "labels": "labels.csv", "names": ["view0", "view1"]}
//! ```
//!
//! Paths are relative to the manifest. An optional `"classes"` entry points to
//! a file of integer class ids, one per line, used by the one-vs-all protocol.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{default_view_names, Label, MultiviewDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub views: Vec<String>,
    pub labels: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<String>,
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<MultiviewDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Manifest {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if manifest.views.is_empty() {
        return Err(Error::Manifest {
            path: path.to_path_buf(),
            message: "no views listed".into(),
        });
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let labels_path = base.join(&manifest.labels);
    let labels = read_labels(&labels_path)?;

    let mut views = Vec::with_capacity(manifest.views.len());
    for (v, rel) in manifest.views.iter().enumerate() {
        let view_path = base.join(rel);
        let m = read_matrix(&view_path)?;
        if m.nrows() != labels.len() {
            return Err(Error::RowMismatch {
                what: format!("view {v} ({})", view_path.display()),
                expected: labels.len(),
                found: m.nrows(),
            });
        }
        views.push(m);
    }

    let names = match manifest.names {
        Some(names) if names.len() != views.len() => {
            return Err(Error::Manifest {
                path: path.to_path_buf(),
                message: format!("{} names for {} views", names.len(), views.len()),
            })
        }
        Some(names) => names,
        None => default_view_names(views.len()),
    };

    let class_ids = match &manifest.classes {
        Some(rel) => Some(read_class_ids(&base.join(rel))?),
        None => None,
    };

    MultiviewDataset::with_classes(views, labels, names, class_ids)
}

/// Write `ds` as a manifest at `path` with its CSV files alongside.
///
/// Data files are named after the manifest stem (`<stem>_view0.csv`,
/// `<stem>_labels.csv`, ...). Everything is written to temporary files first
/// and renamed into place only once all writes succeeded.
pub fn write_manifest(ds: &MultiviewDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();

    let mut files: Vec<(PathBuf, String)> = Vec::new();
    let mut manifest = Manifest {
        views: Vec::new(),
        labels: format!("{stem}_labels.csv"),
        names: Some(ds.view_names().to_vec()),
        classes: None,
    };

    for (v, m) in ds.views().iter().enumerate() {
        let name = format!("{stem}_view{v}.csv");
        files.push((base.join(&name), matrix_to_csv(m)));
        manifest.views.push(name);
    }
    let labels: String = ds
        .labels()
        .iter()
        .map(|&y| if y > 0 { "+1\n" } else { "-1\n" })
        .collect();
    files.push((base.join(&manifest.labels), labels));
    if let Some(ids) = ds.class_ids() {
        let name = format!("{stem}_classes.csv");
        files.push((base.join(&name), ids.iter().map(|c| format!("{c}\n")).collect()));
        manifest.classes = Some(name);
    }
    files.push((path.to_path_buf(), serde_json::to_string_pretty(&manifest)? + "\n"));

    write_all_atomic(&files)
}

/// Write every `(path, contents)` pair to a sibling temp file, then rename all.
pub(crate) fn write_all_atomic(files: &[(PathBuf, String)]) -> Result<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, contents) in files {
        let tmp = temp_sibling(path);
        if let Err(e) = fs::write(&tmp, contents) {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(Error::io(&tmp, e));
        }
        staged.push((tmp, path));
    }
    for (tmp, path) in &staged {
        fs::rename(tmp, path).map_err(|e| Error::io(*path, e))?;
    }
    Ok(())
}

fn temp_sibling(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(format!(".tmp{}", std::process::id()));
    path.with_file_name(name)
}

fn matrix_to_csv(m: &Array2<f64>) -> String {
    let mut out = String::with_capacity(m.len() * 8);
    for row in m.rows() {
        for (j, x) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            // Debug formatting is the shortest string that parses back to the same bits.
            out.push_str(&format!("{x:?}"));
        }
        out.push('\n');
    }
    out
}

fn read_matrix(path: &Path) -> Result<Array2<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Manifest {
                path: path.to_path_buf(),
                message: format!("{other:?}"),
            },
        })?;

    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if cols.is_none() {
            cols = Some(record.len());
        }
        for cell in record.iter() {
            let x: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                path: path.to_path_buf(),
                line: line + 1,
                cell: cell.to_string(),
            })?;
            if !x.is_finite() {
                return Err(Error::NonNumeric {
                    path: path.to_path_buf(),
                    line: line + 1,
                    cell: cell.to_string(),
                });
            }
            data.push(x);
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::Shape(e.to_string()))
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty())
        .collect())
}

fn read_labels(path: &Path) -> Result<Vec<Label>> {
    read_lines(path)?
        .into_iter()
        .map(|(line, token)| match token.as_str() {
            "-1" => Ok(-1),
            "1" | "+1" => Ok(1),
            _ => Err(Error::LabelDomain {
                path: path.to_path_buf(),
                line,
                token,
            }),
        })
        .collect()
}

fn read_class_ids(path: &Path) -> Result<Vec<u32>> {
    read_lines(path)?
        .into_iter()
        .map(|(line, token)| {
            token.parse().map_err(|_| Error::NonNumeric {
                path: path.to_path_buf(),
                line,
                cell: token,
            })
        })
        .collect()
}
