use std::collections::BTreeMap;

use bless::benchmark::{
    average_ranks, build_report, pearson, significance, spearman, BenchmarkRecord, Category,
    CorrelationReport, Database,
};
use bless::estimators::{fsim_maps, srsim_maps, weighted_pool, Assist, FusionConstants};
use bless::image::apply_gamma;
use bless::multiscale::{grouplet_forward, wavelet_forward, wavelet_inverse};
use bless::spatiochromatic::{
    ecsf_adjust, surround_contrast, ChannelClass, EcsfConfig, SurroundConfig,
};
use bless::{Assessor, ColorSpace, Config, Estimator, PlanarImage, Plane};
use proptest::prelude::*;

fn plane_strategy(w: usize, h: usize) -> impl Strategy<Value = Plane> {
    prop::collection::vec(-100.0f64..100.0, w * h)
        .prop_map(move |v| Plane::from_vec(w, h, v).unwrap())
}

fn unit_plane(w: usize, h: usize) -> impl Strategy<Value = Plane> {
    prop::collection::vec(0.0f64..=1.0, w * h).prop_map(move |v| Plane::from_vec(w, h, v).unwrap())
}

fn rel_err(a: &Plane, b: &Plane) -> f64 {
    let num: f64 = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).powi(2))
        .sum();
    (num / b.sum_squares()).sqrt()
}

fn rgb_image(w: usize, h: usize) -> impl Strategy<Value = PlanarImage> {
    (unit_plane(w, h), unit_plane(w, h), unit_plane(w, h))
        .prop_map(|(r, g, b)| PlanarImage::new(vec![r, g, b], ColorSpace::RgbSrgb).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn wavelet_reconstructs(x in plane_strategy(32, 32)) {
        let back = wavelet_inverse(&wavelet_forward(&x, 3).unwrap()).unwrap();
        prop_assert!(rel_err(&back, &x) < 1e-6);
    }

    #[test]
    fn wavelet_is_linear(x in plane_strategy(16, 16), y in plane_strategy(16, 16), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mix = x.zip_map(&y, |p, q| a * p + b * q).unwrap();
        let (px, py, pm) = (wavelet_forward(&x, 2).unwrap(), wavelet_forward(&y, 2).unwrap(), wavelet_forward(&mix, 2).unwrap());
        for ((s, o, m), ((_, _, u), (_, _, v))) in pm.iter().zip(px.iter().zip(py.iter())) {
            for k in 0..m.len() {
                let expect = a * u.as_slice()[k] + b * v.as_slice()[k];
                prop_assert!((m.as_slice()[k] - expect).abs() < 1e-10, "scale {s} {o:?}");
            }
        }
    }

    #[test]
    fn grouplet_is_linear(x in plane_strategy(16, 4), y in plane_strategy(16, 4), a in -3.0f64..3.0) {
        let mix = x.zip_map(&y, |p, q| a * p + q).unwrap();
        let (gx, gy, gm) = (grouplet_forward(&x, 3).unwrap(), grouplet_forward(&y, 3).unwrap(), grouplet_forward(&mix, 3).unwrap());
        for k in 1..=3 {
            let (lx, ly, lm) = (gx.level(k), gy.level(k), gm.level(k));
            for (u, v, m) in [
                (&lx.detail, &ly.detail, &lm.detail),
                (&lx.approximation, &ly.approximation, &lm.approximation),
            ] {
                for i in 0..m.len() {
                    let expect = a * u.as_slice()[i] + v.as_slice()[i];
                    prop_assert!((m.as_slice()[i] - expect).abs() < 1e-10, "level {k}");
                }
            }
        }
    }

    #[test]
    fn grouplet_approximation_is_window_mean(x in plane_strategy(32, 3)) {
        let st = grouplet_forward(&x, 4).unwrap();
        for k in 1..=4 {
            let span = 1usize << k;
            let a = &st.level(k).approximation;
            for y in 0..3 {
                for m in 0..a.width() {
                    let mean: f64 = (m * span..(m + 1) * span).map(|i| x.get(i, y)).sum::<f64>() / span as f64;
                    prop_assert!((a.get(m, y) - mean).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn grouplet_detail_of_constant_is_zero(v in -50.0f64..50.0) {
        let st = grouplet_forward(&Plane::filled(16, 2, v), 4).unwrap();
        for level in st.levels() {
            prop_assert!(level.detail.as_slice().iter().all(|&d| d == 0.0));
        }
    }

    #[test]
    fn surround_contrast_in_unit_interval(x in plane_strategy(24, 24), s in 1usize..4) {
        let z = surround_contrast(&x, s, &SurroundConfig::default());
        prop_assert!(z.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn ecsf_affine_increasing(z in unit_plane(8, 8), s in 1usize..8, chroma in any::<bool>()) {
        let class = if chroma { ChannelClass::Chromatic } else { ChannelClass::Achromatic };
        let cfg = EcsfConfig::default();
        let alpha = ecsf_adjust(&z, s, class, &cfg);
        let lo = ecsf_adjust(&Plane::filled(1, 1, 0.0), s, class, &cfg).get(0, 0);
        let hi = ecsf_adjust(&Plane::filled(1, 1, 1.0), s, class, &cfg).get(0, 0);
        prop_assert!(lo > 0.0 && hi >= lo);
        for (&zv, &av) in z.as_slice().iter().zip(alpha.as_slice()) {
            prop_assert!(av > 0.0);
            prop_assert!((av - (lo + zv * (hi - lo))).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0, g in 0.1f64..4.0) {
        let p = Plane::from_vec(2, 1, vec![a, b]).unwrap();
        let img = PlanarImage::new(vec![p.clone(), p.clone(), p], ColorSpace::RgbSrgb).unwrap();
        let out = apply_gamma(&img, g).unwrap();
        let (ga, gb) = (out.plane(0).get(0, 0), out.plane(0).get(1, 0));
        prop_assert_eq!(a < b, ga < gb);
        prop_assert!((ga - a.powf(g)).abs() < 1e-15);
    }

    #[test]
    fn spearman_bounded_and_rank_invariant(x in prop::collection::vec(-1e3f64..1e3, 3..40), seed in any::<u64>()) {
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| ((i as u64).wrapping_mul(seed | 1) % 97) as f64 + v * 0.01).collect();
        prop_assume!(spearman(&x, &y).is_ok());
        let r = spearman(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        let warped: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0 * v).collect();
        prop_assert!((spearman(&warped, &y).unwrap() - r).abs() < 1e-12);
        prop_assert!((spearman(&y, &x).unwrap() - r).abs() < 1e-12);
    }

    #[test]
    fn spearman_with_ties_is_pearson_on_ranks(x in prop::collection::vec(0u8..5, 5..30), y in prop::collection::vec(0u8..5, 5..30)) {
        let n = x.len().min(y.len());
        let xs: Vec<f64> = x[..n].iter().map(|&v| f64::from(v)).collect();
        let ys: Vec<f64> = y[..n].iter().map(|&v| f64::from(v)).collect();
        match spearman(&xs, &ys) {
            Ok(r) => {
                let p = pearson(&average_ranks(&xs), &average_ranks(&ys)).unwrap();
                prop_assert!((r - p).abs() < 1e-12);
            }
            Err(_) => prop_assert!(pearson(&average_ranks(&xs), &average_ranks(&ys)).is_err()),
        }
    }

    #[test]
    fn equal_correlations_are_not_significant(r in -0.99f64..0.99, n in 4usize..5000) {
        prop_assert!(!significance(r, r, n).unwrap());
    }

    #[test]
    fn assisted_pool_never_exceeds_unassisted(
        gm in unit_plane(6, 6), pc in unit_plane(6, 6), sr in unit_plane(6, 6),
        bless in unit_plane(6, 6), pr in unit_plane(6, 6), pd in unit_plane(6, 6),
        tr in unit_plane(6, 6), td in unit_plane(6, 6),
    ) {
        let bless = bless.map(|v| v.max(1e-3));
        let ones = Plane::filled(6, 6, 1.0);
        let pr = pr.map(|v| v + 1e-3);
        let tr = tr.map(|v| v + 1e-3);
        let fusion = FusionConstants::default();
        let with = Assist { bless: &bless, tau_ref: &tr, tau_dist: &td };
        let clamped = Assist { bless: &ones, tau_ref: &tr, tau_dist: &td };

        let (f1, w1) = fsim_maps(&gm, &pc, &pr, &pd, Some(with)).unwrap();
        let (f0, w0) = fsim_maps(&gm, &pc, &pr, &pd, Some(clamped)).unwrap();
        prop_assert!(weighted_pool(&f1, &w1).unwrap() <= weighted_pool(&f0, &w0).unwrap() + 1e-12);

        let (f1, w1) = srsim_maps(&sr, &gm, &pr, &pd, &fusion, Some(with)).unwrap();
        let (f0, w0) = srsim_maps(&sr, &gm, &pr, &pd, &fusion, Some(clamped)).unwrap();
        prop_assert!(weighted_pool(&f1, &w1).unwrap() <= weighted_pool(&f0, &w0).unwrap() + 1e-12);
    }

    #[test]
    fn report_json_round_trip(
        mos in prop::collection::vec(0.0f64..10.0, 6..20),
        noise in prop::collection::vec(-1.0f64..1.0, 20),
    ) {
        let records: Vec<BenchmarkRecord> = mos.iter().enumerate().map(|(i, &m)| {
            let mut scores = BTreeMap::new();
            scores.insert(Estimator::Fsim, m + noise[i]);
            scores.insert(Estimator::BlessFsim, m + 0.5 * noise[(i + 3) % 20]);
            BenchmarkRecord {
                pair_id: format!("CUSTOM:{i}"),
                database: Database::Custom,
                categories: vec![if i % 2 == 0 { Category::Blur } else { Category::Color }],
                mos: m,
                scores,
            }
        }).collect();
        let report = build_report(&records, &[(Estimator::Fsim, Estimator::BlessFsim)], 1.96).unwrap();
        let back = CorrelationReport::from_json(&report.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, report);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn estimators_symmetric_and_bounded(a in rgb_image(40, 40), b in rgb_image(40, 40)) {
        let assessor = Assessor::new(Config { downsample: false, ..Config::default() }).unwrap();
        let ab = assessor.assess(&a, &b, &Estimator::ALL).unwrap();
        let ba = assessor.assess(&b, &a, &Estimator::ALL).unwrap();
        for (x, y) in ab.iter().zip(&ba) {
            prop_assert!(x.score > 0.0 && x.score <= 1.0, "{} {}", x.estimator, x.score);
            prop_assert!((x.score - y.score).abs() < 1e-12, "{} {} {}", x.estimator, x.score, y.score);
            let pooled = weighted_pool(&x.feature_map, &x.weight_map).unwrap();
            prop_assert_eq!(pooled, x.score);
        }
    }
}
