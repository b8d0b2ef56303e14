//! IDX image files and the four-view image splits.

use std::fs;
use std::path::Path;

use ndarray::Array2;

use super::MultiviewDataset;
use crate::error::{Error, Result};

pub const IMAGE_SIDE: usize = 28;
pub const WINDOW_SIDE: usize = 14;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

/// `count` single-channel images stored row-major, one after another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageSet {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl ImageSet {
    pub fn new(count: usize, rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != count * rows * cols {
            return Err(Error::Shape(format!(
                "{} pixels for {count} images of {rows}x{cols}",
                pixels.len()
            )));
        }
        Ok(Self {
            count,
            rows,
            cols,
            pixels,
        })
    }

    pub fn image(&self, i: usize) -> &[u8] {
        let size = self.rows * self.cols;
        &self.pixels[i * size..(i + 1) * size]
    }
}

/// How the 28x28 image is cut into four 14x14 views.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewMode {
    /// Four disjoint quadrants.
    Quarters,
    /// Four windows that all contain the central 8x8 block.
    CenterOverlap,
}

impl ViewMode {
    /// Top-left corners (row, col) of the four windows.
    pub fn corners(self) -> [(usize, usize); 4] {
        match self {
            ViewMode::Quarters => [(0, 0), (0, 14), (14, 0), (14, 14)],
            ViewMode::CenterOverlap => [(4, 4), (4, 10), (10, 4), (10, 10)],
        }
    }

    /// Flat pixel indices (row-major in the full image) covered by each view.
    pub fn pixel_indices(self) -> [Vec<usize>; 4] {
        self.corners().map(|(r0, c0)| {
            (r0..r0 + WINDOW_SIDE)
                .flat_map(|r| (c0..c0 + WINDOW_SIDE).map(move |c| r * IMAGE_SIDE + c))
                .collect()
        })
    }
}

impl std::str::FromStr for ViewMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quarters" => Ok(ViewMode::Quarters),
            "center-overlap" | "center_overlap" => Ok(ViewMode::CenterOverlap),
            _ => Err(Error::InvalidArgument(format!("unknown view mode {s:?}"))),
        }
    }
}

fn read_u32(bytes: &[u8], at: usize, what: &str) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::Truncated(format!("{what}: header ends at byte {}", bytes.len())))
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<ImageSet> {
    let magic = read_u32(bytes, 0, "images")?;
    if magic != IMAGES_MAGIC {
        return Err(Error::BadMagic {
            expected: IMAGES_MAGIC,
            found: magic,
        });
    }
    let count = read_u32(bytes, 4, "images")? as usize;
    let rows = read_u32(bytes, 8, "images")? as usize;
    let cols = read_u32(bytes, 12, "images")? as usize;
    let size = count * rows * cols;
    let body = &bytes[16..];
    if body.len() < size {
        return Err(Error::Truncated(format!(
            "images: expected {size} pixel bytes, found {}",
            body.len()
        )));
    }
    ImageSet::new(count, rows, cols, body[..size].to_vec())
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = read_u32(bytes, 0, "labels")?;
    if magic != LABELS_MAGIC {
        return Err(Error::BadMagic {
            expected: LABELS_MAGIC,
            found: magic,
        });
    }
    let count = read_u32(bytes, 4, "labels")? as usize;
    let body = &bytes[8..];
    if body.len() < count {
        return Err(Error::Truncated(format!(
            "labels: expected {count} bytes, found {}",
            body.len()
        )));
    }
    Ok(body[..count].to_vec())
}

/// Load an IDX image file and its IDX label file.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<(ImageSet, Vec<u8>)> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    let img_bytes = fs::read(images_path).map_err(|e| Error::io(images_path, e))?;
    let lbl_bytes = fs::read(labels_path).map_err(|e| Error::io(labels_path, e))?;
    let images = parse_idx_images(&img_bytes)?;
    let labels = parse_idx_labels(&lbl_bytes)?;
    if images.count != labels.len() {
        return Err(Error::CountMismatch {
            images: images.count,
            labels: labels.len(),
        });
    }
    Ok((images, labels))
}

/// Cut every image into four 14x14 views with pixels scaled to [0, 1].
///
/// Labels are +1 iff the class equals `positive_class`; the raw class ids are
/// kept on the dataset for later one-vs-all relabeling.
pub fn split_image_views(
    images: &ImageSet,
    labels_raw: &[u8],
    positive_class: u8,
    mode: ViewMode,
) -> Result<MultiviewDataset> {
    if images.rows != IMAGE_SIDE || images.cols != IMAGE_SIDE {
        return Err(Error::Shape(format!(
            "expected {IMAGE_SIDE}x{IMAGE_SIDE} images, got {}x{}",
            images.rows, images.cols
        )));
    }
    if images.count == 0 {
        return Err(Error::Shape("no images".into()));
    }
    if labels_raw.len() != images.count {
        return Err(Error::CountMismatch {
            images: images.count,
            labels: labels_raw.len(),
        });
    }

    let n = images.count;
    let views = mode
        .pixel_indices()
        .iter()
        .map(|idx| {
            let mut m = Array2::<f64>::zeros((n, idx.len()));
            for (i, mut row) in m.rows_mut().into_iter().enumerate() {
                let img = images.image(i);
                for (dst, &p) in row.iter_mut().zip(idx) {
                    *dst = f64::from(img[p]) / 255.0;
                }
            }
            m
        })
        .collect();
    let labels = labels_raw
        .iter()
        .map(|&c| if c == positive_class { 1 } else { -1 })
        .collect();
    let names = match mode {
        ViewMode::Quarters => ["top_left", "top_right", "bottom_left", "bottom_right"],
        ViewMode::CenterOverlap => ["center_tl", "center_tr", "center_bl", "center_br"],
    };
    MultiviewDataset::with_classes(
        views,
        labels,
        names.iter().map(|s| s.to_string()).collect(),
        Some(labels_raw.iter().map(|&c| u32::from(c)).collect()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn idx_images(count: u32, rows: u32, cols: u32, fill: impl Fn(usize) -> u8) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend(IMAGES_MAGIC.to_be_bytes());
        b.extend(count.to_be_bytes());
        b.extend(rows.to_be_bytes());
        b.extend(cols.to_be_bytes());
        b.extend((0..(count * rows * cols) as usize).map(fill));
        b
    }

    fn idx_labels(labels: &[u8]) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend(LABELS_MAGIC.to_be_bytes());
        b.extend((labels.len() as u32).to_be_bytes());
        b.extend(labels);
        b
    }

    #[test]
    fn decodes_header() {
        let set = parse_idx_images(&idx_images(2, 28, 28, |i| (i % 251) as u8)).unwrap();
        assert_eq!((set.count, set.rows, set.cols), (2, 28, 28));
        assert_eq!(set.image(1)[0], (784 % 251) as u8);
        assert_eq!(parse_idx_labels(&idx_labels(&[3, 5])).unwrap(), vec![3, 5]);
    }

    #[test]
    fn bad_magic_and_truncation() {
        let mut bytes = idx_images(2, 28, 28, |_| 0);
        bytes[3] = 0x01;
        assert!(matches!(
            parse_idx_images(&bytes).unwrap_err(),
            Error::BadMagic { found: 0x801, .. }
        ));
        let bytes = idx_images(2, 28, 28, |_| 0);
        assert!(matches!(
            parse_idx_images(&bytes[..bytes.len() - 1]).unwrap_err(),
            Error::Truncated(_)
        ));
        assert!(matches!(parse_idx_labels(&[0, 0]).unwrap_err(), Error::Truncated(_)));
    }

    #[test]
    fn load_detects_count_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let ip = dir.path().join("img");
        let lp = dir.path().join("lbl");
        fs::write(&ip, idx_images(2, 28, 28, |_| 0)).unwrap();
        fs::write(&lp, idx_labels(&[1, 2, 3])).unwrap();
        assert!(matches!(
            load_idx(&ip, &lp).unwrap_err(),
            Error::CountMismatch { images: 2, labels: 3 }
        ));
        fs::write(&lp, idx_labels(&[1, 2])).unwrap();
        let (set, labels) = load_idx(&ip, &lp).unwrap();
        assert_eq!(set.count, 2);
        assert_eq!(labels, vec![1, 2]);
    }

    #[test]
    fn quarter_zero_is_top_left_block() {
        let set = parse_idx_images(&idx_images(1, 28, 28, |i| (i % 256) as u8)).unwrap();
        let ds = split_image_views(&set, &[3], 3, ViewMode::Quarters).unwrap();
        assert_eq!(ds.n_views(), 4);
        let v0 = ds.view(0).row(0).to_vec();
        assert_eq!(v0.len(), 196);
        let expected: Vec<f64> = (0..14)
            .flat_map(|r| (0..14).map(move |c| ((r * 28 + c) % 256) as f64 / 255.0))
            .collect();
        assert_eq!(v0, expected);
        assert_eq!(ds.labels(), &[1]);
    }

    #[test]
    fn quarters_partition_pixels() {
        let sets = ViewMode::Quarters.pixel_indices();
        let mut all: Vec<usize> = sets.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..784).collect::<Vec<_>>());
    }

    #[test]
    fn center_windows_overlap_pairwise() {
        let sets: Vec<HashSet<usize>> = ViewMode::CenterOverlap
            .pixel_indices()
            .into_iter()
            .map(|v| v.into_iter().collect())
            .collect();
        for a in 0..4 {
            for b in a + 1..4 {
                assert!(sets[a].intersection(&sets[b]).count() > 0);
            }
        }
        // every window holds the central 8x8 block
        for s in &sets {
            for r in 10..18 {
                for c in 10..18 {
                    assert!(s.contains(&(r * 28 + c)));
                }
            }
        }
    }

    #[test]
    fn one_vs_all_labels_and_shape_errors() {
        let set = parse_idx_images(&idx_images(2, 28, 28, |_| 255)).unwrap();
        let ds = split_image_views(&set, &[3, 5], 3, ViewMode::CenterOverlap).unwrap();
        assert_eq!(ds.labels(), &[1, -1]);
        assert_eq!(ds.view(2)[[1, 5]], 1.0);

        let small = parse_idx_images(&idx_images(1, 14, 14, |_| 0)).unwrap();
        assert!(split_image_views(&small, &[0], 0, ViewMode::Quarters).is_err());
        let empty = ImageSet::new(0, 28, 28, vec![]).unwrap();
        assert!(split_image_views(&empty, &[], 0, ViewMode::Quarters).is_err());
    }
}
