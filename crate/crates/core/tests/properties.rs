use std::collections::BTreeSet;

use entroseg_core::entropy::{entropy_image, gray_histogram, histogram_equalize, probability_image, EntropyConfig, EntropyMode};
use entroseg_core::glcm::{glcm_of_window, GlcmConfig};
use entroseg_core::image::quantize_to_gray;
use entroseg_core::segmentation::{canny_edges, cluster_image, superimpose, CannyParams};
use entroseg_core::vq::{
    build_label_image, extract_training_vectors, kfcg_codebook, requantize_codebook, TrainingSet, MARGIN_LABEL,
};
use entroseg_core::{FloatImage, GrayImage};
use proptest::prelude::*;

fn gray(max_side: usize) -> impl Strategy<Value = GrayImage> {
    (1..=max_side, 1..=max_side)
        .prop_flat_map(|(w, h)| (Just(w), Just(h), proptest::collection::vec(any::<u8>(), w * h)))
        .prop_map(|(w, h, data)| GrayImage::new(w, h, data).unwrap())
}

fn few_levels(max_side: usize) -> impl Strategy<Value = GrayImage> {
    (1..=max_side, 1..=max_side, 2u8..6)
        .prop_flat_map(|(w, h, n)| (Just(w), Just(h), proptest::collection::vec(0..n, w * h)))
        .prop_map(|(w, h, data)| GrayImage::new(w, h, data.into_iter().map(|v| v * 50).collect()).unwrap())
}

fn points(dim: usize, max_len: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec((0i32..30).prop_map(f64::from), dim), 1..max_len)
}

proptest! {
    #[test]
    fn entropy_is_bounded(img in few_levels(14), window in prop_oneof![Just(3usize), Just(5)]) {
        let area = (window * window) as f64;
        let cfg = EntropyConfig::new(window, 2.0f64, EntropyMode::ProbabilitySum).unwrap();
        let bound = area * std::f64::consts::E.recip() * std::f64::consts::LOG2_E;
        for &h in entropy_image::<f64>(&img, &cfg).data() {
            prop_assert!(h.is_finite() && h >= 0.0 && h <= bound + 1e-12);
        }
        let cfg = EntropyConfig::new(window, 2.0f64, EntropyMode::LocalEmpirical).unwrap();
        for &h in entropy_image::<f64>(&img, &cfg).data() {
            prop_assert!(h.is_finite() && h >= 0.0 && h <= area.log2() + 1e-12);
        }
    }

    #[test]
    fn probability_reproduces_histogram(img in gray(20)) {
        let prob = probability_image::<f64>(&img);
        let hist = gray_histogram(&img);
        prop_assert_eq!(hist.total() as usize, img.len());
        let n = img.len() as f64;
        for (&g, &p) in img.data().iter().zip(prob.data()) {
            prop_assert_eq!((p * n).round() as u64, hist.bins()[g as usize]);
        }
    }

    #[test]
    fn equalization_is_monotone(img in gray(20)) {
        let eq = histogram_equalize(&img);
        let mut pairs: Vec<(u8, u8)> = img.data().iter().copied().zip(eq.data().iter().copied()).collect();
        pairs.sort();
        prop_assert!(pairs.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn quantized_entropy_spans_range(img in gray(12)) {
        let cfg = EntropyConfig::new(3, 2.0, EntropyMode::LocalEmpirical).unwrap();
        let h: FloatImage<f64> = entropy_image(&img, &cfg);
        let q = quantize_to_gray(&h);
        let (lo, hi) = h.min_max();
        if lo < hi {
            prop_assert!(q.data().contains(&0) && q.data().contains(&255));
        } else {
            prop_assert!(q.data().iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn codevectors_are_member_means(pts in points(3, 80), target in 1usize..40) {
        let ts = TrainingSet::from_vectors(3, pts).unwrap();
        let cb = kfcg_codebook(&ts, target).unwrap();
        prop_assert!(cb.size() <= target);
        for (c, members) in cb.codevectors().iter().zip(cb.members()) {
            prop_assert!(!members.is_empty());
            for (d, &cd) in c.iter().enumerate() {
                let mean = members.iter().map(|&i| ts.component(i, d)).sum::<f64>() / members.len() as f64;
                prop_assert!((cd - mean).abs() <= 1e-9 * mean.abs().max(1.0));
            }
        }
    }

    #[test]
    fn replay_and_determinism(pts in points(2, 60), target in 1usize..33) {
        let ts = TrainingSet::from_vectors(2, pts).unwrap();
        let cb = kfcg_codebook(&ts, target).unwrap();
        prop_assert_eq!(cb.replay(&ts), cb.assignment().to_vec());
        let again = kfcg_codebook(&ts, target).unwrap();
        prop_assert_eq!(again.assignment(), cb.assignment());
        prop_assert_eq!(again.codevectors(), cb.codevectors());
    }

    #[test]
    fn clusters_at_most_double_per_iteration(pts in points(4, 100), target in 1usize..64) {
        let ts = TrainingSet::from_vectors(4, pts).unwrap();
        let cb = kfcg_codebook(&ts, target).unwrap();
        let mut count = 1;
        for t in 1..=cb.iterations() {
            let splits = cb.splits().iter().filter(|s| s.iteration == t).count();
            prop_assert!(splits <= count);
            count += splits;
            prop_assert!(count <= target);
        }
        prop_assert_eq!(count, cb.size());
    }

    #[test]
    fn partition_ignores_vector_order(
        (xs, ys) in (64usize..128).prop_flat_map(|n| {
            let range: Vec<i32> = (0..n as i32).map(|v| v * 7).collect();
            (Just(range.clone()).prop_shuffle(), Just(range).prop_shuffle())
        }),
        target in prop_oneof![Just(1usize), Just(2), Just(4), Just(8), Just(16)],
        seed in any::<u64>(),
    ) {
        // every coordinate distinct within its dimension
        let forward: Vec<Vec<f64>> = xs.iter().zip(&ys).map(|(&x, &y)| vec![f64::from(x), f64::from(y)]).collect();
        let mut order: Vec<usize> = (0..forward.len()).collect();
        order.sort_by_key(|&i| (i as u64 ^ seed).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let shuffled: Vec<Vec<f64>> = order.iter().map(|&i| forward[i].clone()).collect();
        let a = kfcg_codebook(&TrainingSet::from_vectors(2, forward.clone()).unwrap(), target).unwrap();
        let b = kfcg_codebook(&TrainingSet::from_vectors(2, shuffled).unwrap(), target).unwrap();
        // a singleton cluster forces a partial iteration, which splits in index order
        let full = |cb: &entroseg_core::vq::Codebook<f64>| (1..=cb.iterations())
            .all(|t| cb.splits().iter().filter(|s| s.iteration == t).count() == 1 << (t - 1));
        prop_assume!(full(&a) && full(&b));
        let as_sets = |members: Vec<Vec<usize>>, map: &dyn Fn(usize) -> usize| -> BTreeSet<BTreeSet<usize>> {
            members.into_iter().map(|m| m.into_iter().map(map).collect()).collect()
        };
        prop_assert_eq!(as_sets(a.members(), &|i| i), as_sets(b.members(), &|i| order[i]));
    }

    #[test]
    fn cluster_images_tile_labels(img in gray(24), bw in 1usize..4, bh in 1usize..4, n in 1usize..6) {
        prop_assume!(bw <= img.width() && bh <= img.height());
        let ts = extract_training_vectors::<f64>(&img, bw, bh).unwrap();
        let cb = kfcg_codebook(&ts, 16).unwrap();
        let re = requantize_codebook(&cb, n.min(cb.size())).unwrap();
        let labels = build_label_image(&ts, &re.compose(&cb), img.width(), img.height(), bw, bh).unwrap();
        let source = img.map(|v| v.max(1));
        let mut owners = vec![0usize; img.len()];
        for id in 0..labels.num_clusters() {
            let ci = cluster_image(&source, &labels, id).unwrap();
            for (i, &v) in ci.image.data().iter().enumerate() {
                let l = labels.labels().data()[i];
                if v != 0 {
                    owners[i] += 1;
                    prop_assert_eq!(l as usize, id);
                } else {
                    prop_assert!(l as usize != id);
                }
            }
        }
        for (i, &o) in owners.iter().enumerate() {
            prop_assert_eq!(o, usize::from(labels.labels().data()[i] != MARGIN_LABEL));
        }
        // labels are constant over each block
        for y in 0..(img.height() / bh) * bh {
            for x in 0..(img.width() / bw) * bw {
                prop_assert_eq!(labels.label(x, y), labels.label(x - x % bw, y - y % bh));
            }
        }
    }

    #[test]
    fn superimpose_is_idempotent(img in gray(20)) {
        let edges = canny_edges(&img, &CannyParams::<f64>::default());
        let once = superimpose(&img, &edges).unwrap();
        prop_assert_eq!(superimpose(&once, &edges).unwrap(), once);
    }

    #[test]
    fn asymmetric_glcm_is_normalized(img in gray(10), dx in -2isize..=2, dy in -2isize..=2) {
        prop_assume!((dx, dy) != (0, 0));
        let cfg = GlcmConfig::new(5, (dx, dy), 4, false).unwrap();
        for y in 0..img.height() {
            for x in 0..img.width() {
                let m = glcm_of_window::<f64>(&img, (x, y), &cfg);
                let sum: f64 = m.entries().iter().sum();
                prop_assert!(sum == 0.0 || (sum - 1.0).abs() <= 1e-12);
            }
        }
    }
}
