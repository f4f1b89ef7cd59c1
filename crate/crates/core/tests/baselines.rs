use plof::baselines::{
    default_chunk_count, fastlof, fastlof_on_chunks, kmeans, ChunkAssignment, DevToMean,
    DEFAULT_MAX_ITERS,
};
use plof::lof::{lof_all, MinPts};
use plof::neighbors::Backend;
use plof::PointSet;
use plof_testkit::{random_rows, Rows, Texture};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn points(rows: &Rows) -> PointSet {
    PointSet::from_rows(rows).unwrap()
}

fn minpts(k: usize) -> MinPts {
    MinPts::new(k).unwrap()
}

fn gaussian_with_outliers(seed: u64, n: usize, outliers: usize) -> Rows {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Rows = (0..n)
        .map(|_| vec![normal.sample(&mut rng), normal.sample(&mut rng)])
        .collect();
    for i in 0..outliers {
        let a = i as f64 * 1.3;
        rows.push(vec![12.0 * a.cos(), 12.0 * a.sin()]);
    }
    rows
}

#[test]
fn single_chunk_is_plain_lof() {
    let rows = random_rows(&mut ChaCha8Rng::seed_from_u64(1), 140, 4, Texture::Continuous);
    let data = points(&rows);
    for backend in [Backend::BruteForce, Backend::KdTree] {
        let out = fastlof(&data, minpts(6), 1, 99, backend).unwrap();
        assert_eq!(out.scores, lof_all(&data, minpts(6), backend).unwrap());
    }
}

#[test]
fn neighbourhoods_stay_inside_chunks() {
    let data = points(&gaussian_with_outliers(4, 100, 5));
    let out = fastlof(&data, minpts(5), 4, 17, Backend::KdTree).unwrap();
    assert_eq!(out.chunks.chunk_count, 4);
    for (p, nb) in out.neighborhoods.iter().enumerate() {
        assert!(nb.len() >= 5);
        for &o in nb {
            assert_ne!(o, p);
            assert_eq!(out.chunks.chunk_of[o], out.chunks.chunk_of[p]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fastlof_locality_and_determinism(
        seed in any::<u64>(),
        n in 40usize..=200,
        chunks in 1usize..=4,
        k in 2usize..=5,
    ) {
        let rows = random_rows(&mut ChaCha8Rng::seed_from_u64(seed), n, 3, Texture::Continuous);
        let data = points(&rows);
        prop_assume!(n / chunks > 3 * (k + 1));
        let a = fastlof(&data, minpts(k), chunks, seed, Backend::KdTree).unwrap();
        let b = fastlof(&data, minpts(k), chunks, seed, Backend::KdTree).unwrap();
        prop_assert_eq!(&a.scores, &b.scores);
        for (p, nb) in a.neighborhoods.iter().enumerate() {
            prop_assert!(nb.iter().all(|&o| a.chunks.chunk_of[o] == a.chunks.chunk_of[p]));
        }
    }

    #[test]
    fn kmeans_inertia_never_increases(seed in any::<u64>(), c in 1usize..=8) {
        let rows = random_rows(&mut ChaCha8Rng::seed_from_u64(seed), 120, 3, Texture::Continuous);
        let model = kmeans(&points(&rows), c, seed, DEFAULT_MAX_ITERS).unwrap();
        for w in model.inertia_history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", model.inertia_history);
        }
    }
}

#[test]
fn mirrored_chunks_score_identically() {
    let half = random_rows(&mut ChaCha8Rng::seed_from_u64(2), 40, 3, Texture::Continuous);
    let mut rows = half.clone();
    rows.extend(half.iter().map(|r| r.iter().map(|v| -v).collect::<Vec<_>>()));
    let chunks = ChunkAssignment {
        chunk_of: (0..80).map(|i| i / 40).collect(),
        chunk_count: 2,
        seed: 0,
    };
    let out = fastlof_on_chunks(&points(&rows), minpts(4), chunks, Backend::KdTree).unwrap();
    let mut a: Vec<f64> = out.scores.as_slice()[..40].to_vec();
    let mut b: Vec<f64> = out.scores.as_slice()[40..].to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    assert_eq!(a, b);
}

#[test]
fn chunk_too_small_is_rejected() {
    let rows = random_rows(&mut ChaCha8Rng::seed_from_u64(3), 30, 2, Texture::Continuous);
    assert!(fastlof(&points(&rows), minpts(10), 5, 0, Backend::KdTree).is_err());
    let bad = ChunkAssignment {
        chunk_of: vec![0; 29],
        chunk_count: 1,
        seed: 0,
    };
    assert!(fastlof_on_chunks(&points(&rows), minpts(2), bad, Backend::KdTree).is_err());
}

#[test]
fn default_chunking_runs() {
    let data = points(&gaussian_with_outliers(5, 400, 8));
    let k = minpts(10);
    let chunks = default_chunk_count(data.len(), k);
    assert_eq!(chunks, 5);
    let out = fastlof(&data, k, chunks, 1, Backend::KdTree).unwrap();
    assert!(out.chunks.sizes().iter().all(|&s| s > 10));
}

#[test]
fn kmeans_separates_two_blobs() {
    let mut rows = random_rows(&mut ChaCha8Rng::seed_from_u64(6), 60, 2, Texture::Lattice);
    for (i, r) in rows.iter_mut().enumerate() {
        let off = if i < 30 { 0.0 } else { 100.0 };
        r[0] = r[0] * 0.1 + off;
        r[1] = r[1] * 0.1 + off;
    }
    let model = kmeans(&points(&rows), 2, 4, DEFAULT_MAX_ITERS).unwrap();
    // the blob split is the one induced by the largest pairwise gap
    let first = model.assignment[0];
    for (i, &a) in model.assignment.iter().enumerate() {
        assert_eq!(a == first, i < 30);
    }
}

#[test]
fn devtomean_threshold_zero_is_plain_lof() {
    let data = points(&gaussian_with_outliers(7, 150, 6));
    for backend in [Backend::BruteForce, Backend::KdTree] {
        let out = DevToMean {
            threshold: 0.0,
            backend,
            ..DevToMean::new(minpts(5))
        }
        .run(&data, 3)
        .unwrap();
        assert_eq!(out.scores, lof_all(&data, minpts(5), backend).unwrap());
    }
}

#[test]
fn devtomean_keeps_the_far_point() {
    let mut rows = gaussian_with_outliers(8, 80, 0);
    rows.push(vec![30.0, 30.0]);
    let data = points(&rows);
    let out = DevToMean {
        clusters: Some(1),
        ..DevToMean::new(minpts(5))
    }
    .run(&data, 0)
    .unwrap();

    // single centroid = global mean; check the ratio directly
    let n = rows.len() as f64;
    let mean = [
        rows.iter().map(|r| r[0]).sum::<f64>() / n,
        rows.iter().map(|r| r[1]).sum::<f64>() / n,
    ];
    let dist: Vec<f64> = rows
        .iter()
        .map(|r| ((r[0] - mean[0]).powi(2) + (r[1] - mean[1]).powi(2)).sqrt())
        .collect();
    let avg = dist.iter().sum::<f64>() / n;
    for (i, d) in dist.iter().enumerate() {
        assert!((out.deviation[i] - d / avg).abs() < 1e-9);
    }
    assert!(out.deviation[80] > 5.0);
    assert!(out.kept[80]);

    let full = lof_all(&data, minpts(5), Backend::KdTree).unwrap();
    for i in 0..rows.len() {
        if out.kept[i] {
            assert_eq!(out.scores[i], full[i]);
        } else {
            assert!(out.deviation[i] <= 1.0);
            assert_eq!(out.scores[i], 0.0);
        }
    }
    assert!(out.prune_rate() > 0.3);
}

#[test]
fn devtomean_is_seeded() {
    let data = points(&gaussian_with_outliers(9, 200, 5));
    let d = DevToMean::new(minpts(5));
    assert_eq!(d.run(&data, 11).unwrap().scores, d.run(&data, 11).unwrap().scores);
}
