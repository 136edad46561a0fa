//! Small dense helpers on top of faer.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;

/// Solves `a·x = b` by LU with partial pivoting.
pub fn solve(a: &Mat<f64>, b: &[f64]) -> Vec<f64> {
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = a.partial_piv_lu().solve(&rhs);
    (0..b.len()).map(|i| x[(i, 0)]).collect()
}

pub fn solve_complex(a: &Mat<Complex64>, b: &[Complex64]) -> Vec<Complex64> {
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = a.partial_piv_lu().solve(&rhs);
    (0..b.len()).map(|i| x[(i, 0)]).collect()
}

/// Right singular vector of the smallest singular value.
pub fn null_vector(a: &Mat<Complex64>) -> Option<Vec<Complex64>> {
    let svd = a.svd().ok()?;
    let v = svd.V();
    let k = v.ncols() - 1;
    Some((0..v.nrows()).map(|i| v[(i, k)]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = Mat::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 + i as f64 });
        let x = [1.0, -2.0, 0.5];
        let b: Vec<f64> = (0..3)
            .map(|i| (0..3).map(|j| a[(i, j)] * x[j]).sum())
            .collect();
        let y = solve(&a, &b);
        for i in 0..3 {
            assert!((x[i] - y[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn null_vector_of_rank_deficient() {
        let a = Mat::from_fn(2, 2, |i, j| {
            Complex64::new((1 + i) as f64 * (1 + j) as f64, 0.0)
        });
        let v = null_vector(&a).unwrap();
        let r = a[(0, 0)] * v[0] + a[(0, 1)] * v[1];
        assert!(r.norm() < 1e-12);
        assert!((v[0].norm_sqr() + v[1].norm_sqr() - 1.0).abs() < 1e-12);
    }
}
