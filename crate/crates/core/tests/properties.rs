mod common;

use common::{cbound_objective, oracle_disagreement, oracle_gibbs, random_triple};
use pbmvboost::boost::{pb_mvboost, BoostTrace};
use pbmvboost::cbound_opt::{optimize_view_weights, SimplexWeights};
use pbmvboost::data::synth_multiview;
use pbmvboost::measures::{binary_kl, disagreement_from_predictions, kl_sup_inverse, margin_moments};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projection_lands_on_simplex(y in prop::collection::vec(-10.0..10.0f64, 1..8)) {
        let p = SimplexWeights::project(&y);
        let s: f64 = p.as_slice().iter().sum();
        prop_assert!((s - 1.0).abs() < 1e-9);
        prop_assert!(p.as_slice().iter().all(|&w| w >= 0.0));
        let again = SimplexWeights::project(p.as_slice());
        for (a, b) in again.as_slice().iter().zip(p.as_slice()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn optimizer_never_below_its_start(
        pairs in prop::collection::vec((0.0..0.5f64, 0.0..0.5f64), 1..5),
        raw in prop::collection::vec(0.01..1.0f64, 5),
    ) {
        let v = pairs.len();
        let r: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let d: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let total: f64 = raw[..v].iter().sum();
        let init = SimplexWeights::new(raw[..v].iter().map(|w| w / total).collect()).unwrap();
        let fit = optimize_view_weights(&r, &d, &init).unwrap();
        let s: f64 = fit.rho.as_slice().iter().sum();
        prop_assert!((s - 1.0).abs() < 1e-9);
        if let Some(f0) = cbound_objective(init.as_slice(), &r, &d) {
            let f = fit.objective.expect("feasible start implies feasible fit");
            prop_assert!(f >= f0 - 1e-12, "{} < {}", f, f0);
            let direct = cbound_objective(fit.rho.as_slice(), &r, &d).unwrap();
            prop_assert!((direct - f).abs() < 1e-9);
        }
    }

    #[test]
    fn kl_sup_inverse_is_monotone(q in unit(), b1 in 0.0..2.0f64, b2 in 0.0..2.0f64) {
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        let a = kl_sup_inverse(q, lo, 1.0).unwrap();
        let b = kl_sup_inverse(q, hi, 1.0).unwrap();
        prop_assert!(a <= b + 1e-12);
        prop_assert!(a >= q);
        prop_assert!(binary_kl(q, a) <= lo + 1e-9);
        prop_assert_eq!(kl_sup_inverse(q, 0.0, 1.0).unwrap(), q);
    }

    #[test]
    fn disagreement_ignores_order_and_splitting(
        voters in prop::collection::vec((prop::collection::vec(any::<bool>(), 6), 0.01..1.0f64), 1..6),
        dist_raw in prop::collection::vec(0.01..1.0f64, 6),
        split in 0.0..1.0f64,
    ) {
        let total_w: f64 = voters.iter().map(|v| v.1).sum();
        let preds: Vec<Vec<i8>> = voters.iter().map(|v| v.0.iter().map(|&b| if b { 1 } else { -1 }).collect()).collect();
        let w: Vec<f64> = voters.iter().map(|v| v.1 / total_w).collect();
        let total_d: f64 = dist_raw.iter().sum();
        let dist: Vec<f64> = dist_raw.iter().map(|x| x / total_d).collect();
        let base = disagreement_from_predictions(&preds, &w, &dist);

        let mut rp = preds.clone();
        let mut rw = w.clone();
        rp.reverse();
        rw.reverse();
        prop_assert!((disagreement_from_predictions(&rp, &rw, &dist) - base).abs() < 1e-12);

        let mut sp = preds.clone();
        let mut sw = w.clone();
        sp.push(preds[0].clone());
        sw.push(w[0] * (1.0 - split));
        sw[0] = w[0] * split;
        prop_assert!((disagreement_from_predictions(&sp, &sw, &dist) - base).abs() < 1e-12);

        // E_{h,h'} 1[h != h'] over ordered pairs
        let mut pairwise = 0.0;
        for (i, &di) in dist.iter().enumerate() {
            for (a, wa) in preds.iter().zip(&w) {
                for (b, wb) in preds.iter().zip(&w) {
                    if a[i] != b[i] {
                        pairwise += di * wa * wb;
                    }
                }
            }
        }
        prop_assert!((pairwise - base).abs() < 1e-12);
    }

    #[test]
    fn margin_moments_match_risk_and_disagreement(seed in any::<u64>(), agreement in 0.0..1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (model, ds, dist) = random_triple(&mut rng, agreement);
        let (mu1, mu2) = margin_moments(&model, &ds, &dist).unwrap();
        prop_assert!((oracle_gibbs(&model, &ds, &dist) - (1.0 - mu1) / 2.0).abs() < 1e-9);
        prop_assert!((oracle_disagreement(&model, &ds, &dist) - (1.0 - mu2) / 2.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn boosting_distributions_stay_normalized(seed in 0u64..1000, t in 1usize..6) {
        let ds = synth_multiview(60, 3, &[0.1, 0.25, 0.4], seed).unwrap();
        let mut config = pbmvboost::BoostConfig::new(pbmvboost::Algorithm::PbMvBoost, t, 1);
        config.record_distributions = true;
        let (_, trace): (_, BoostTrace) = pbmvboost::boost::fit(&ds, &config, None).unwrap();
        prop_assert_eq!(trace.distributions.len(), t);
        for round in &trace.distributions {
            for group in round {
                let s: f64 = group.iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-9);
                prop_assert!(group.iter().all(|&w| w > 0.0));
            }
        }
        let (plain, _) = pb_mvboost(&ds, t, 1, None).unwrap();
        let margins = plain.margins(&ds).unwrap();
        let preds = plain.predict_dataset(&ds).unwrap();
        for (m, p) in margins.iter().zip(preds) {
            prop_assert_eq!(p, if *m >= 0.0 { 1 } else { -1 });
        }
    }
}
