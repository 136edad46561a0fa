//! Banded (tridiagonal) matrices over real or complex scalars, with a
//! partially pivoted LU that can be reused across right-hand sides.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + PartialEq
    + std::fmt::Debug
{
    fn zero() -> Self;
    fn modulus(self) -> f64;
    fn from_real(x: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn from_real(x: f64) -> Self {
        x
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

/// `lower[i]` sits at (i+1, i), `upper[i]` at (i, i+1).
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiag<T> {
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> Tridiag<T> {
    pub fn zeros(n: usize) -> Self {
        Tridiag {
            lower: vec![T::zero(); n.saturating_sub(1)],
            diag: vec![T::zero(); n],
            upper: vec![T::zero(); n.saturating_sub(1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(n);
        t.diag.iter_mut().for_each(|d| *d = T::from_real(1.0));
        t
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i == j {
            self.diag[i]
        } else if i == j + 1 {
            self.lower[j]
        } else if j == i + 1 {
            self.upper[i]
        } else {
            T::zero()
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s = s + self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s = s + self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// `a·self + b·other`
    pub fn combine(&self, a: T, other: &Tridiag<T>, b: T) -> Tridiag<T> {
        let f = |x: &Vec<T>, y: &Vec<T>| x.iter().zip(y).map(|(&p, &q)| a * p + b * q).collect();
        Tridiag {
            lower: f(&self.lower, &other.lower),
            diag: f(&self.diag, &other.diag),
            upper: f(&self.upper, &other.upper),
        }
    }

    pub fn add_diag(&mut self, d: &[T]) {
        for (x, &y) in self.diag.iter_mut().zip(d) {
            *x = *x + y;
        }
    }

    /// Multiplies row i by `s[i]`.
    pub fn scale_rows(&self, s: &[T]) -> Tridiag<T> {
        let n = self.len();
        Tridiag {
            lower: (0..n.saturating_sub(1))
                .map(|i| s[i + 1] * self.lower[i])
                .collect(),
            diag: (0..n).map(|i| s[i] * self.diag[i]).collect(),
            upper: (0..n.saturating_sub(1))
                .map(|i| s[i] * self.upper[i])
                .collect(),
        }
    }

    /// Multiplies column j by `s[j]`.
    pub fn scale_cols(&self, s: &[T]) -> Tridiag<T> {
        let n = self.len();
        Tridiag {
            lower: (0..n.saturating_sub(1))
                .map(|i| self.lower[i] * s[i])
                .collect(),
            diag: (0..n).map(|i| self.diag[i] * s[i]).collect(),
            upper: (0..n.saturating_sub(1))
                .map(|i| self.upper[i] * s[i + 1])
                .collect(),
        }
    }

    /// Principal submatrix on rows/cols `lo..hi`.
    pub fn slice(&self, lo: usize, hi: usize) -> Tridiag<T> {
        Tridiag {
            lower: self.lower[lo..hi - 1].to_vec(),
            diag: self.diag[lo..hi].to_vec(),
            upper: self.upper[lo..hi - 1].to_vec(),
        }
    }

    pub fn lu(&self) -> Option<TridiagLu<T>> {
        TridiagLu::new(self)
    }

    pub fn solve(&self, rhs: &[T]) -> Option<Vec<T>> {
        let lu = self.lu()?;
        let mut b = rhs.to_vec();
        lu.solve_in_place(&mut b);
        Some(b)
    }
}

impl Tridiag<f64> {
    pub fn to_complex(&self) -> Tridiag<Complex64> {
        let c = |v: &Vec<f64>| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Tridiag {
            lower: c(&self.lower),
            diag: c(&self.diag),
            upper: c(&self.upper),
        }
    }

    pub fn to_dense(&self) -> faer::Mat<f64> {
        let n = self.len();
        faer::Mat::from_fn(n, n, |i, j| self.get(i, j))
    }
}

/// LU with partial pivoting in the layout of LAPACK's `gttrf`.
#[derive(Debug, Clone)]
pub struct TridiagLu<T> {
    dl: Vec<T>,
    d: Vec<T>,
    du: Vec<T>,
    du2: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Scalar> TridiagLu<T> {
    fn new(a: &Tridiag<T>) -> Option<Self> {
        let n = a.len();
        let mut dl = a.lower.clone();
        let mut d = a.diag.clone();
        let mut du = a.upper.clone();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].modulus() >= dl[i].modulus() {
                if d[i].modulus() != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] = d[i + 1] - fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d.iter()
            .any(|x| x.modulus() == 0.0 || !x.modulus().is_finite())
        {
            return None;
        }
        Some(TridiagLu {
            dl,
            d,
            du,
            du2,
            swapped,
        })
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - self.dl[i] * b[i];
            } else {
                b[i + 1] = b[i + 1] - self.dl[i] * b[i];
            }
        }
        b[n - 1] = b[n - 1] / self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let mut b = rhs.to_vec();
        self.solve_in_place(&mut b);
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> Tridiag<f64> {
        // deliberately not diagonally dominant so pivoting is exercised
        Tridiag {
            lower: (0..n - 1).map(|i| 3.0 + i as f64).collect(),
            diag: (0..n).map(|i| 0.1 * (i as f64) - 0.2).collect(),
            upper: (0..n - 1).map(|i| 1.0 - 0.5 * i as f64).collect(),
        }
    }

    #[test]
    fn solve_matches_dense() {
        for n in [1usize, 2, 3, 7, 20] {
            let mut a = sample(n.max(2));
            if n == 1 {
                a = Tridiag {
                    lower: vec![],
                    diag: vec![2.0],
                    upper: vec![],
                };
            }
            let n = a.len();
            let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin() + 0.3).collect();
            let b = a.matvec(&x);
            let y = a.solve(&b).unwrap();
            for i in 0..n {
                assert!((x[i] - y[i]).abs() < 1e-10, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn complex_solve() {
        let a = sample(9).to_complex().combine(
            Complex64::new(1.0, 0.0),
            &Tridiag::identity(9),
            Complex64::new(0.0, 0.7),
        );
        let x: Vec<Complex64> = (0..9)
            .map(|i| Complex64::new(i as f64, 1.0 - i as f64))
            .collect();
        let y = a.solve(&a.matvec(&x)).unwrap();
        for i in 0..9 {
            assert!((x[i] - y[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn singular_detected() {
        let a = Tridiag {
            lower: vec![1.0],
            diag: vec![1.0, 1.0],
            upper: vec![1.0],
        };
        assert!(a.solve(&[1.0, 2.0]).is_none());
    }

    #[test]
    fn row_col_scaling() {
        let a = sample(5);
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = a.scale_rows(&s);
        let c = a.scale_cols(&s);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(r.get(i, j), s[i] * a.get(i, j));
                assert_eq!(c.get(i, j), a.get(i, j) * s[j]);
            }
        }
    }
}
