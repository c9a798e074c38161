//! Small dense complex linear algebra on 5×5 matrices.

use crate::C64;
use nalgebra::{SMatrix, SVector};

pub type Mat5 = SMatrix<C64, 5, 5>;
pub type Vec5 = SVector<C64, 5>;

/// Eigenvalues closer than this are treated as one defective cluster.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Eigen-decomposition `m = V diag(mu) V⁻¹`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: [C64; 5],
    pub vectors: Mat5,
    /// `V⁻¹`, `None` when the eigenvector matrix is numerically singular.
    pub inverse: Option<Mat5>,
}

/// Complex Schur form followed by back-substitution on the triangular factor.
pub fn eigen(m: &Mat5) -> Eigen {
    let (q, t) = nalgebra::Schur::new(*m).unpack();
    let scale = m.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
    let mut y = Mat5::zeros();
    let mut values = [C64::new(0.0, 0.0); 5];
    for k in 0..5 {
        let lk = t[(k, k)];
        values[k] = lk;
        y[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lk;
            if d.norm() < 1e-14 * scale {
                d = C64::new(1e-14 * scale, 0.0);
            }
            y[(i, k)] = -s / d;
        }
    }
    let mut v = q * y;
    for k in 0..5 {
        let n = v.column(k).norm();
        if n > 0.0 {
            v.column_mut(k).unscale_mut(n);
        }
    }
    let inverse = v.try_inverse();
    Eigen { values, vectors: v, inverse }
}

/// Replace each cluster of eigenvalues (pairwise closer than [`CLUSTER_TOL`])
/// by its mean. Near an exceptional point the individual values carry
/// `O(sqrt(eps))` errors while the mean stays accurate.
pub fn merge_clusters(values: &mut [C64]) {
    let n = values.len();
    let mut group: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() < CLUSTER_TOL {
                let (gi, gj) = (group[i], group[j]);
                for g in group.iter_mut() {
                    if *g == gj {
                        *g = gi;
                    }
                }
            }
        }
    }
    for g in 0..n {
        let members: Vec<usize> = (0..n).filter(|&k| group[k] == g).collect();
        if members.len() > 1 {
            let mean = members.iter().map(|&k| values[k]).sum::<C64>() / members.len() as f64;
            for k in members {
                values[k] = mean;
            }
        }
    }
}

/// Solve `a x = b` by LU with partial pivoting. Returns the solution and a
/// cheap 1-norm condition estimate `‖a‖₁ ‖a⁻¹‖₁`.
pub fn solve(a: &Mat5, b: &Vec5) -> Option<(Vec5, f64)> {
    let inv = a.try_inverse()?;
    let cond = norm1(a) * norm1(&inv);
    Some((inv * b, cond))
}

pub fn norm1(a: &Mat5) -> f64 {
    (0..5)
        .map(|j| (0..5).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn identity() -> Mat5 {
    Mat5::identity()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let mut m = Mat5::zeros();
        for k in 0..5 {
            m[(k, k)] = C64::new(k as f64, -(k as f64));
        }
        let e = eigen(&m);
        let mut got: Vec<f64> = e.values.iter().map(|z| z.re).collect();
        got.sort_by(f64::total_cmp);
        assert_eq!(got, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn reconstructs_matrix() {
        let mut m = Mat5::zeros();
        for i in 0..5 {
            for j in 0..5 {
                m[(i, j)] = C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, (i as f64 - j as f64) * 0.3);
            }
        }
        let e = eigen(&m);
        let d = Mat5::from_diagonal(&Vec5::from_iterator(e.values.iter().copied()));
        let back = e.vectors * d * e.inverse.unwrap();
        assert!((back - m).norm() < 1e-12);
    }

    #[test]
    fn cluster_mean() {
        let mut v = [
            C64::new(1.0, 1e-9),
            C64::new(1.0, -1e-9),
            C64::new(2.0, 0.0),
        ];
        merge_clusters(&mut v);
        assert_eq!(v[0], v[1]);
        assert_eq!(v[0], C64::new(1.0, 0.0));
        assert_eq!(v[2], C64::new(2.0, 0.0));
    }
}
