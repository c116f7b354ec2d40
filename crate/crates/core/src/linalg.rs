//! Small dense-vector helpers over `&[f64]` plus the few matrix routines
//! (inverse, rank, least-norm solve) the lattice and distribution code needs.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `<a, s>` for a real vector `a` and a complex vector `s`.
pub fn dot_complex(a: &[f64], s: &[Complex64]) -> Complex64 {
    a.iter().zip(s).map(|(x, z)| z * *x).sum()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], k: f64) -> Vec<f64> {
    a.iter().map(|x| x * k).collect()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `sigma + i t` as a complex vector.
pub fn complexify(sigma: &[f64], t: &[f64]) -> Vec<Complex64> {
    sigma
        .iter()
        .zip(t)
        .map(|(&re, &im)| Complex64::new(re, im))
        .collect()
}

pub fn real_vector(sigma: &[f64]) -> Vec<Complex64> {
    sigma.iter().map(|&re| Complex64::new(re, 0.0)).collect()
}

/// Matrix whose rows are the given vectors.
pub fn rows_matrix(rows: &[Vec<f64>], cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

/// Numerical rank via singular values, relative threshold `tol`.
pub fn rank(rows: &[Vec<f64>], cols: usize, tol: f64) -> usize {
    if rows.is_empty() || cols == 0 {
        return 0;
    }
    let svd = rows_matrix(rows, cols).svd(false, false);
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, &s| m.max(s));
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > tol * smax.max(1.0))
        .count()
}

/// Least-norm solution `x` of `M x = rhs`, where `M` has the given rows.
/// Returns `None` when the rows are not linearly independent.
pub fn least_norm_solve(rows: &[Vec<f64>], cols: usize, rhs: &[f64]) -> Option<Vec<f64>> {
    let m = rows_matrix(rows, cols);
    let gram = &m * m.transpose();
    let inv = gram.try_inverse()?;
    let y = inv * nalgebra::DVector::from_column_slice(rhs);
    let x = m.transpose() * y;
    Some(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, -1.0]];
        assert_eq!(rank(&rows, 2, 1e-10), 2);
        assert_eq!(rank(&rows[..1], 2, 1e-10), 1);
        assert_eq!(rank(&[vec![1.0, 2.0], vec![2.0, 4.0]], 2, 1e-10), 1);
    }

    #[test]
    fn least_norm_recovers_minimum_norm_point() {
        // x + y = 2 has least-norm solution (1, 1).
        let x = least_norm_solve(&[vec![1.0, 1.0]], 2, &[2.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        assert!(least_norm_solve(&[vec![1.0, 1.0], vec![2.0, 2.0]], 2, &[1.0, 2.0]).is_none());
    }
}
