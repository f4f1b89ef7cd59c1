use plof::lof::{lof_all, lrd, reach_dist, MinPts};
use plof::neighbors::{Backend, NeighborIndex};
use plof::PointSet;
use plof_testkit::{random_rows, NaiveLof, Rows, Texture};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use rand_chacha::ChaCha8Rng;

fn points(rows: &Rows) -> PointSet {
    PointSet::from_rows(rows).unwrap()
}

fn minpts(k: usize) -> MinPts {
    MinPts::new(k).unwrap()
}

fn continuous(seed: u64, n: usize, m: usize) -> Rows {
    random_rows(&mut ChaCha8Rng::seed_from_u64(seed), n, m, Texture::Continuous)
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        let ok = (x.is_infinite() && x == y) || (x - y).abs() <= tol;
        assert!(ok, "index {i}: {x} vs {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_naive_transcription(
        seed in any::<u64>(),
        n in 20usize..=150,
        m in 2usize..=10,
        k in prop::sample::select(vec![2usize, 5, 10]),
        tree in any::<bool>(),
    ) {
        let rows = continuous(seed, n, m);
        let backend = if tree { Backend::KdTree } else { Backend::BruteForce };
        let got = lof_all(&points(&rows), minpts(k), backend).unwrap();
        assert_close(got.as_slice(), &NaiveLof::new(&rows, k).lof, 1e-9);
    }

    #[test]
    fn reach_dist_bounds_and_positive_lrd(
        seed in any::<u64>(),
        n in 5usize..=60,
        k in 1usize..=4,
        lattice in any::<bool>(),
    ) {
        let texture = if lattice { Texture::Lattice } else { Texture::Continuous };
        let rows = random_rows(&mut ChaCha8Rng::seed_from_u64(seed), n, 3, texture);
        let data = points(&rows);
        let index = NeighborIndex::build(&data, Backend::BruteForce).unwrap();
        let nbhd = index.neighborhoods(k).unwrap();
        for p in 0..n {
            prop_assert!(lrd(&nbhd, p) > 0.0);
            for o in (0..n).filter(|&o| o != p) {
                let r = reach_dist(&nbhd, p, o).unwrap();
                prop_assert!(r >= data.distance(p, o));
                prop_assert!(r >= nbhd.k_distance(o));
            }
        }
    }

    #[test]
    fn permutation_equivariant(seed in any::<u64>(), n in 12usize..=80, shift in 1usize..11) {
        let rows = continuous(seed, n, 3);
        let perm: Vec<usize> = (0..n).map(|i| (i * 7 + shift) % n).collect();
        prop_assume!({ let mut p = perm.clone(); p.sort_unstable(); p.dedup(); p.len() == n });
        let permuted: Rows = perm.iter().map(|&i| rows[i].clone()).collect();
        let a = lof_all(&points(&rows), minpts(4), Backend::KdTree).unwrap();
        let b = lof_all(&points(&permuted), minpts(4), Backend::KdTree).unwrap();
        for (j, &i) in perm.iter().enumerate() {
            prop_assert!((a[i] - b[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn rigid_motion_invariant(
        seed in any::<u64>(),
        angle in 0.0f64..std::f64::consts::TAU,
        offset in -50.0f64..50.0,
    ) {
        let rows = continuous(seed, 60, 3);
        let (s, c) = angle.sin_cos();
        let moved: Rows = rows
            .iter()
            .map(|r| vec![c * r[0] - s * r[1] + offset, s * r[0] + c * r[1] - offset, r[2] + offset])
            .collect();
        let a = lof_all(&points(&rows), minpts(5), Backend::KdTree).unwrap();
        let b = lof_all(&points(&moved), minpts(5), Backend::KdTree).unwrap();
        assert_close(a.as_slice(), b.as_slice(), 1e-9);
    }
}

#[test]
fn lrd_matches_direct_evaluation() {
    let rows = continuous(30, 30, 4);
    let oracle = NaiveLof::new(&rows, 3);
    let data = points(&rows);
    let index = NeighborIndex::build(&data, Backend::KdTree).unwrap();
    let nbhd = index.neighborhoods(3).unwrap();
    let got: Vec<f64> = (0..30).map(|p| lrd(&nbhd, p)).collect();
    assert_close(&got, &oracle.lrd, 1e-12);
}

#[test]
fn far_point_between_two_tight_clusters_is_the_maximum() {
    let mut rows: Rows = Vec::new();
    for i in 0..7 {
        let t = f64::from(i) * 0.1;
        rows.push(vec![t, 0.05 * f64::from(i % 3)]);
        rows.push(vec![10.0 + t, 10.0 - 0.05 * f64::from(i % 2)]);
    }
    rows.push(vec![30.0, -20.0]);
    let oracle = NaiveLof::new(&rows, 3);
    let scores = lof_all(&points(&rows), minpts(3), Backend::BruteForce).unwrap();
    assert_close(scores.as_slice(), &oracle.lof, 1e-9);
    let far = rows.len() - 1;
    assert!(scores[far] > 1.0);
    assert!((0..far).all(|i| scores[i] < scores[far]));
}

#[test]
fn ten_point_grid_is_near_one() {
    let rows: Rows = (0..10)
        .map(|i| vec![f64::from(i / 5), f64::from(i % 5)])
        .collect();
    let scores = lof_all(&points(&rows), minpts(3), Backend::KdTree).unwrap();
    assert_close(scores.as_slice(), &NaiveLof::new(&rows, 3).lof, 1e-12);
    assert!(scores.iter().all(|s| (0.9..=1.1).contains(s)), "{scores:?}");
}

#[test]
fn planted_outlier_among_gaussians_is_argmax() {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut rows: Rows = (0..50)
        .map(|_| vec![normal.sample(&mut rng), normal.sample(&mut rng)])
        .collect();
    rows.push(vec![9.0, 9.0]);
    let oracle = NaiveLof::new(&rows, 5);
    let scores = lof_all(&points(&rows), minpts(5), Backend::KdTree).unwrap();
    assert_close(scores.as_slice(), &oracle.lof, 1e-9);
    assert_eq!(scores.argmax(), Some(50));
}

#[test]
fn uniform_spacing_gives_exactly_one() {
    // regular ring: every neighbourhood has identical reach distances
    let rows: Rows = (0..24)
        .map(|i| {
            let a = f64::from(i) * std::f64::consts::TAU / 24.0;
            vec![a.cos() * 5.0, a.sin() * 5.0]
        })
        .collect();
    let scores = lof_all(&points(&rows), minpts(2), Backend::BruteForce).unwrap();
    assert!(scores.iter().all(|&s| (s - 1.0).abs() < 1e-9), "{scores:?}");
}

#[test]
fn lattice_corpus_with_infinite_densities_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..40 {
        let rows = random_rows(&mut rng, 40, 2, Texture::Lattice);
        for k in [2, 5] {
            let got = lof_all(&points(&rows), minpts(k), Backend::KdTree).unwrap();
            assert_close(got.as_slice(), &NaiveLof::new(&rows, k).lof, 1e-9);
        }
    }
}
