use plof::{GroundTruth, PointSet};
use plof_bench::project_2pc;
use plof_bench::projection::write_projection_csv;
use plof_testkit::{random_rows, Rows, Texture};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn covariance(rows: &Rows) -> Vec<Vec<f64>> {
    let (n, m) = (rows.len(), rows[0].len());
    let mean: Vec<f64> = (0..m).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    rows.iter().map(|r| (r[a] - mean[a]) * (r[b] - mean[b])).sum::<f64>()
                        / (n as f64 - 1.0)
                })
                .collect()
        })
        .collect()
}

/// Leading eigenpair by power iteration, then deflation for the second.
fn top_two_eigenvalues(mut c: Vec<Vec<f64>>) -> [f64; 2] {
    let m = c.len();
    let mut out = [0.0; 2];
    for slot in &mut out {
        let mut v = vec![1.0; m];
        let mut lambda = 0.0;
        for _ in 0..5000 {
            let w: Vec<f64> = (0..m).map(|i| (0..m).map(|j| c[i][j] * v[j]).sum()).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            v = w.iter().map(|x| x / norm).collect();
            lambda = norm;
        }
        *slot = lambda;
        for i in 0..m {
            for j in 0..m {
                c[i][j] -= lambda * v[i] * v[j];
            }
        }
    }
    out
}

#[test]
fn projected_variances_are_the_leading_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..5 {
        // stretch the axes so the spectrum has a clear gap
        let rows: Rows = random_rows(&mut rng, 200, 5, Texture::Continuous)
            .into_iter()
            .map(|r| r.iter().enumerate().map(|(j, x)| x * (5 - j) as f64).collect())
            .collect();
        let p = project_2pc(&PointSet::from_rows(&rows).unwrap()).unwrap();
        let want = top_two_eigenvalues(covariance(&rows));
        for c in 0..2 {
            let coords: Vec<f64> = p.coords.iter().map(|x| x[c]).collect();
            let var = coords.iter().map(|x| x * x).sum::<f64>() / (rows.len() as f64 - 1.0);
            assert!((var - want[c]).abs() <= 1e-6 * want[0], "{var} vs {}", want[c]);
            assert!((p.explained_variance[c] - want[c]).abs() <= 1e-6 * want[0]);
            let first = p.components[c].iter().find(|&&x| x != 0.0).unwrap();
            assert!(*first > 0.0);
        }
    }
}

#[test]
fn planar_data_reconstructs_from_two_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (u, v) = ([1.0, 2.0, -1.0], [0.5, -1.0, 3.0]);
    let rows: Rows = (0..60)
        .map(|_| {
            let (a, b): (f64, f64) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            (0..3).map(|j| 4.0 + a * u[j] + b * v[j]).collect()
        })
        .collect();
    let p = project_2pc(&PointSet::from_rows(&rows).unwrap()).unwrap();
    for (row, c) in rows.iter().zip(&p.coords) {
        for j in 0..3 {
            let back = p.mean[j] + c[0] * p.components[0][j] + c[1] * p.components[1][j];
            assert!((back - row[j]).abs() <= 1e-9, "{back} vs {}", row[j]);
        }
    }
}

#[test]
fn projection_file_carries_labels() {
    let data = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.5], [2.0, 1.0], [9.0, -3.0]]).unwrap();
    let truth = GroundTruth::new(vec![false, false, false, true]);
    let p = project_2pc(&data).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pca.csv");
    write_projection_csv(&path, &p, &truth).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id,pc1,pc2,label");
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("3,") && lines[4].ends_with(",1"));
    assert!(write_projection_csv(&path, &p, &GroundTruth::new(vec![true])).is_err());
}
