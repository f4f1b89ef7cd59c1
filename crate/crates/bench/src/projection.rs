//! Two-component principal projection for scatter plots.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use plof::{GroundTruth, PointSet};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub mean: Vec<f64>,
    /// Unit loadings of the first and second component.
    pub components: [Vec<f64>; 2],
    /// Covariance eigenvalues (divisor N - 1) of the two components.
    pub explained_variance: [f64; 2],
    /// One `[pc1, pc2]` pair per point.
    pub coords: Vec<[f64; 2]>,
}

/// Centres the data and projects it onto the two leading eigenvectors of
/// the sample covariance. Each component is flipped so that its first
/// nonzero loading is positive.
pub fn project_2pc(data: &PointSet) -> Result<Projection> {
    let (n, m) = (data.len(), data.dims());
    if m < 2 {
        return Err(BenchError::Projection(format!("need at least 2 dimensions, got {m}")));
    }
    if n < 3 {
        return Err(BenchError::Projection(format!("need at least 3 points, got {n}")));
    }

    let mut mean = vec![0.0; m];
    for row in data.rows() {
        for (acc, v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= n as f64;
    }
    let centred = DMatrix::from_fn(n, m, |i, j| data.row(i)[j] - mean[j]);
    if centred.iter().all(|&v| v == 0.0) {
        return Err(BenchError::Projection("all points are identical".into()));
    }
    let cov = (centred.transpose() * &centred) / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let component = |k: usize| {
        let mut v: Vec<f64> = eig.eigenvectors.column(order[k]).iter().copied().collect();
        if v.iter().find(|&&x| x != 0.0).is_some_and(|&x| x < 0.0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    };
    let components = [component(0), component(1)];
    let explained_variance = [
        eig.eigenvalues[order[0]].max(0.0),
        eig.eigenvalues[order[1]].max(0.0),
    ];
    let coords = (0..n)
        .map(|i| {
            let row = centred.row(i);
            let dot = |c: &[f64]| row.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
            [dot(&components[0]), dot(&components[1])]
        })
        .collect();

    Ok(Projection {
        mean,
        components,
        explained_variance,
        coords,
    })
}

/// Writes `id,pc1,pc2,label` with label 1 for outliers.
pub fn write_projection_csv(path: &Path, proj: &Projection, truth: &GroundTruth) -> Result<()> {
    if truth.len() != proj.coords.len() {
        return Err(BenchError::Projection(format!(
            "{} labels for {} points",
            truth.len(),
            proj.coords.len()
        )));
    }
    let mut out = String::from("id,pc1,pc2,label\n");
    for (i, c) in proj.coords.iter().enumerate() {
        out.push_str(&format!("{i},{:?},{:?},{}\n", c[0], c[1], u8::from(truth[i])));
    }
    fs::write(path, out).map_err(|source| BenchError::Output {
        path: path.to_owned(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_aligned_data_is_a_permutation() {
        // centred, variance 8 along y and 2 along x
        let rows = [[1.0, 0.0], [-1.0, 0.0], [0.0, 2.0], [0.0, -2.0]];
        let p = project_2pc(&PointSet::from_rows(&rows).unwrap()).unwrap();
        for (c, r) in p.coords.iter().zip(&rows) {
            assert!((c[0] - r[1]).abs() < 1e-12 && (c[1] - r[0]).abs() < 1e-12, "{c:?}");
        }
        assert!(p.components.iter().all(|c| c.iter().find(|&&x| x != 0.0).unwrap() > &0.0));
    }

    #[test]
    fn rejects_degenerate_input() {
        let same = PointSet::from_rows(&[[1.0, 1.0]; 4]).unwrap();
        assert!(project_2pc(&same).is_err());
        let one_dim = PointSet::from_rows(&[[1.0], [2.0], [3.0]]).unwrap();
        assert!(project_2pc(&one_dim).is_err());
        let two = PointSet::from_rows(&[[1.0, 0.0], [2.0, 1.0]]).unwrap();
        assert!(project_2pc(&two).is_err());
    }
}
