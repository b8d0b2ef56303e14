//! Seeded synthetic multiview data.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{default_view_names, Label, MultiviewDataset};
use crate::error::{Error, Result};

/// Generate `n` examples described by `v` two-dimensional views.
///
/// Labels are drawn uniformly from {-1, +1}. In view `v`, feature 0 is
/// `s * (0.05 + m)` with `m ~ U[0, 1)` and `s` the label flipped with a
/// probability that falls linearly in `m` and averages to `noise[v]`, so
/// confident (large |feature 0|) points are cleaner than points near zero.
/// Feature 1 is uniform on [-1, 1) and carries no label information.
///
/// Since the flip probability never exceeds 1/2, the threshold at 0 on
/// feature 0 is the best single stump for the view and its error is
/// `noise[v]` in expectation.
pub fn synth_multiview(n: usize, v: usize, noise: &[f64], seed: u64) -> Result<MultiviewDataset> {
    if v == 0 {
        return Err(Error::InvalidArgument("need at least one view".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one example".into()));
    }
    if noise.len() != v {
        return Err(Error::InvalidArgument(format!(
            "{} noise levels for {v} views",
            noise.len()
        )));
    }
    if let Some(bad) = noise.iter().find(|&&p| !(0.0..0.5).contains(&p)) {
        return Err(Error::InvalidArgument(format!(
            "noise {bad} outside [0, 0.5): the view would be uninformative or adversarial"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<Label> = Vec::with_capacity(n);
    let mut data: Vec<Vec<f64>> = vec![Vec::with_capacity(2 * n); v];

    for _ in 0..n {
        let y: Label = if rng.gen_bool(0.5) { 1 } else { -1 };
        labels.push(y);
        for (view, &p) in data.iter_mut().zip(noise) {
            let m: f64 = rng.gen();
            let flip_p = flip_probability(p, m);
            let flipped = rng.gen::<f64>() < flip_p;
            let s = if flipped { -f64::from(y) } else { f64::from(y) };
            view.push(s * (0.05 + m));
            view.push(rng.gen_range(-1.0..1.0));
        }
    }

    let views = data
        .into_iter()
        .map(|d| Array2::from_shape_vec((n, 2), d).expect("n x 2 buffer"))
        .collect();
    MultiviewDataset::new(views, labels, default_view_names(v))
}

/// Linear in `m` on [0, 1), mean `noise`, range inside [0, 1/2].
fn flip_probability(noise: f64, m: f64) -> f64 {
    let slope = 2.0 * noise.min(0.5 - noise);
    noise + slope * (0.5 - m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flip_probability_stays_in_range() {
        for &p in &[0.0, 0.1, 0.25, 0.3, 0.45, 0.4999] {
            for k in 0..=100 {
                let m = k as f64 / 100.0;
                let f = flip_probability(p, m);
                assert!((0.0..=0.5).contains(&f), "p={p} m={m} f={f}");
            }
            // mean over a fine grid
            let mean: f64 = (0..10_000).map(|k| flip_probability(p, (k as f64 + 0.5) / 1e4)).sum::<f64>() / 1e4;
            assert!((mean - p).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_noise() {
        assert!(synth_multiview(10, 1, &[0.5], 0).is_err());
        assert!(synth_multiview(10, 1, &[-0.1], 0).is_err());
        assert!(synth_multiview(10, 2, &[0.1], 0).is_err());
        assert!(synth_multiview(0, 1, &[0.1], 0).is_err());
    }

    #[test]
    fn zero_noise_is_separable_at_zero() {
        let ds = synth_multiview(100, 3, &[0.0, 0.0, 0.0], 7).unwrap();
        for v in 0..3 {
            for (x, &y) in ds.view(v).column(0).iter().zip(ds.labels()) {
                assert_eq!(x.signum() as i8, y);
            }
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = synth_multiview(50, 3, &[0.1, 0.2, 0.3], 7).unwrap();
        let b = synth_multiview(50, 3, &[0.1, 0.2, 0.3], 7).unwrap();
        assert_eq!(a, b);
        let c = synth_multiview(50, 3, &[0.1, 0.2, 0.3], 8).unwrap();
        assert_ne!(a, c);
    }
}
