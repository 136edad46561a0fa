//! Uniform grid on [0, L] with second-order operators and trapezoid quadrature.

use crate::error::{Error, Result};
use crate::tridiag::Tridiag;
use std::f64::consts::PI;
use std::ops::Range;

pub type Field = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    Neumann,
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    pub length: f64,
    pub n: usize,
    pub h: f64,
    pub bc: Bc,
}

pub const DEFAULT_N: usize = 201;

impl Grid1D {
    pub fn new(length: f64, n: usize, bc: Bc) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "length must be positive, got {length}"
            )));
        }
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "need at least 3 nodes, got {n}"
            )));
        }
        Ok(Grid1D {
            length,
            n,
            h: length / (n - 1) as f64,
            bc,
        })
    }

    /// [0, π] with the default resolution.
    pub fn standard(bc: Bc) -> Self {
        Self::new(PI, DEFAULT_N, bc).unwrap()
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.length
        } else {
            i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![self.h; self.n];
        w[0] = 0.5 * self.h;
        w[self.n - 1] = 0.5 * self.h;
        w
    }

    /// Indices of the unknowns: every node for Neumann, interior nodes for Dirichlet.
    pub fn dofs(&self) -> Range<usize> {
        match self.bc {
            Bc::Neumann => 0..self.n,
            Bc::Dirichlet => 1..self.n - 1,
        }
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Field {
        let mut v: Field = self.nodes().into_iter().map(f).collect();
        self.pin(&mut v);
        v
    }

    /// Zeroes boundary values under Dirichlet conditions.
    pub fn pin(&self, u: &mut [f64]) {
        if self.bc == Bc::Dirichlet {
            u[0] = 0.0;
            u[self.n - 1] = 0.0;
        }
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.n, "field length does not match grid");
        let inner: f64 = f[1..self.n - 1].iter().sum();
        self.h * (inner + 0.5 * (f[0] + f[self.n - 1]))
    }

    pub fn dot(&self, f: &[f64], g: &[f64]) -> f64 {
        let p: Vec<f64> = f.iter().zip(g).map(|(a, b)| a * b).collect();
        self.integrate(&p)
    }

    pub fn norm_l2(&self, f: &[f64]) -> f64 {
        self.dot(f, f).sqrt()
    }

    /// The n×n Laplacian. Under Dirichlet conditions boundary rows and the
    /// couplings to boundary columns are zero, so applying it to a pinned
    /// field reproduces the interior stencil.
    pub fn laplacian_matrix(&self) -> Tridiag<f64> {
        let n = self.n;
        let c = 1.0 / (self.h * self.h);
        let mut t = Tridiag {
            lower: vec![c; n - 1],
            diag: vec![-2.0 * c; n],
            upper: vec![c; n - 1],
        };
        match self.bc {
            Bc::Neumann => {
                t.upper[0] = 2.0 * c;
                t.lower[n - 2] = 2.0 * c;
            }
            Bc::Dirichlet => {
                t.diag[0] = 0.0;
                t.diag[n - 1] = 0.0;
                t.upper[0] = 0.0;
                t.lower[0] = 0.0;
                t.upper[n - 2] = 0.0;
                t.lower[n - 2] = 0.0;
            }
        }
        t
    }

    pub fn laplacian(&self, u: &[f64]) -> Field {
        let mut v = u.to_vec();
        self.pin(&mut v);
        self.laplacian_matrix().matvec(&v)
    }

    /// Face fluxes ½(uᵢ+uᵢ₊₁)(vᵢ₊₁−vᵢ)/h, one per cell.
    pub fn face_fluxes(&self, u: &[f64], v: &[f64]) -> Field {
        (0..self.n - 1)
            .map(|i| 0.5 * (u[i] + u[i + 1]) * (v[i + 1] - v[i]) / self.h)
            .collect()
    }

    /// Conservative ∇·(u∇v). Neumann boundary nodes own a half cell with a
    /// zero outer flux, so the result integrates to zero under the trapezoid
    /// rule and `cross_diffusion(1, v)` coincides with the Laplacian.
    pub fn cross_diffusion(&self, u: &[f64], v: &[f64]) -> Result<Field> {
        if u.len() != self.n || v.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "field lengths {} and {} do not match grid size {}",
                u.len(),
                v.len(),
                self.n
            )));
        }
        let (mut uu, mut vv) = (u.to_vec(), v.to_vec());
        self.pin(&mut uu);
        self.pin(&mut vv);
        let f = self.face_fluxes(&uu, &vv);
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 1..n - 1 {
            out[i] = (f[i] - f[i - 1]) / self.h;
        }
        if self.bc == Bc::Neumann {
            out[0] = f[0] / (0.5 * self.h);
            out[n - 1] = -f[n - 2] / (0.5 * self.h);
        }
        Ok(out)
    }

    /// Matrix of v ↦ ∇·(u∇v) for a fixed u.
    pub fn cross_diffusion_in_v(&self, u: &[f64]) -> Tridiag<f64> {
        let n = self.n;
        let h2 = self.h * self.h;
        let mut uu = u.to_vec();
        self.pin(&mut uu);
        let a: Vec<f64> = (0..n - 1).map(|i| 0.5 * (uu[i] + uu[i + 1]) / h2).collect();
        let mut t = Tridiag::zeros(n);
        for i in 1..n - 1 {
            t.lower[i - 1] = a[i - 1];
            t.upper[i] = a[i];
            t.diag[i] = -a[i - 1] - a[i];
        }
        match self.bc {
            Bc::Neumann => {
                t.diag[0] = -2.0 * a[0];
                t.upper[0] = 2.0 * a[0];
                t.diag[n - 1] = -2.0 * a[n - 2];
                t.lower[n - 2] = 2.0 * a[n - 2];
            }
            Bc::Dirichlet => {
                t.lower[0] = 0.0;
                t.upper[n - 2] = 0.0;
            }
        }
        t
    }

    /// Matrix of u ↦ ∇·(u∇v) for a fixed v.
    pub fn cross_diffusion_in_u(&self, v: &[f64]) -> Tridiag<f64> {
        let n = self.n;
        let h2 = self.h * self.h;
        let mut vv = v.to_vec();
        self.pin(&mut vv);
        let g: Vec<f64> = (0..n - 1).map(|i| 0.5 * (vv[i + 1] - vv[i]) / h2).collect();
        let mut t = Tridiag::zeros(n);
        for i in 1..n - 1 {
            // (F_{i+1/2} − F_{i−1/2})/h with F_{i+1/2} = (uᵢ+uᵢ₊₁)·gᵢ·h
            t.lower[i - 1] = -g[i - 1];
            t.diag[i] = g[i] - g[i - 1];
            t.upper[i] = g[i];
        }
        match self.bc {
            Bc::Neumann => {
                t.diag[0] = 2.0 * g[0];
                t.upper[0] = 2.0 * g[0];
                t.diag[n - 1] = -2.0 * g[n - 2];
                t.lower[n - 2] = -2.0 * g[n - 2];
            }
            Bc::Dirichlet => {
                t.lower[0] = 0.0;
                t.upper[n - 2] = 0.0;
            }
        }
        t
    }

    /// Discrete ∫φ|∇φ|² as a face sum; equals −∫φ∇·(φ∇φ) exactly.
    pub fn weighted_gradient_energy(&self, phi: &[f64]) -> f64 {
        (0..self.n - 1)
            .map(|i| {
                let g = (phi[i + 1] - phi[i]) / self.h;
                self.h * 0.5 * (phi[i] + phi[i + 1]) * g * g
            })
            .sum()
    }

    /// Discrete ∫|∇f|² as a face sum; equals −∫f·Δf exactly.
    pub fn gradient_energy(&self, f: &[f64]) -> f64 {
        (0..self.n - 1)
            .map(|i| {
                let g = (f[i + 1] - f[i]) / self.h;
                self.h * g * g
            })
            .sum()
    }

    pub fn mean(&self, f: &[f64]) -> f64 {
        self.integrate(f) / self.length
    }
}

pub fn sup_norm(f: &[f64]) -> f64 {
    f.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
}

pub fn sup_dist(f: &[f64], g: &[f64]) -> f64 {
    f.iter()
        .zip(g)
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
}
