//! Principal eigenpairs of −Δφ = λmφ and Δφ + λmφ = σφ, plus a dense
//! eigen-decomposition used as a brute-force reference.

use crate::error::{Error, Result};
use crate::expr::{CaseTag, GrowthProfile};
use crate::grid::{sup_norm, Bc, Field, Grid1D};
use num_complex::Complex64;

pub const TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 500;
pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone)]
pub struct PrincipalEig {
    pub lambda_star: f64,
    /// Positive, normalised to ∫φ² = 1.
    pub phi: Field,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SigmaEig {
    pub sigma1: f64,
    pub varphi1: Field,
    pub residual: f64,
}

/// Symmetric tridiagonal matrix given by diagonal `d` and off-diagonal `e`.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl SymTridiag {
    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut q = 1.0;
        let mut count = 0;
        for i in 0..self.d.len() {
            let e2 = if i == 0 {
                0.0
            } else {
                self.e[i - 1] * self.e[i - 1]
            };
            q = self.d[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.d[i].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// k-th largest eigenvalue (k = 0 is the largest) by Sturm bisection.
    pub fn eigenvalue_from_top(&self, k: usize) -> f64 {
        let n = self.d.len();
        let (mut lo, mut hi) = self.gershgorin();
        let target = n - 1 - k;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        (0..n)
            .map(|i| {
                let mut s = self.d[i] * x[i];
                if i > 0 {
                    s += self.e[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.e[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Eigenvector for an isolated eigenvalue by inverse iteration.
    pub fn eigenvector(&self, sigma: f64) -> Vec<f64> {
        let n = self.d.len();
        let scale = self
            .d
            .iter()
            .chain(&self.e)
            .fold(1.0f64, |a, &b| a.max(b.abs()));
        let mut shift = sigma + 1e-13 * scale;
        let mut y = vec![1.0; n];
        for _ in 0..6 {
            let t = crate::tridiag::Tridiag {
                lower: self.e.clone(),
                diag: self.d.iter().map(|d| d - shift).collect(),
                upper: self.e.clone(),
            };
            match t.solve(&y) {
                Some(z) => {
                    let nz = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                    y = z.iter().map(|v| v / nz).collect();
                }
                None => shift += 1e-12 * scale,
            }
        }
        y
    }
}

/// Symmetrised restriction of Δ + diag(c) to the unknowns, with the
/// quadrature weights used to build the similarity transform.
fn symmetrised(g: &Grid1D, c: &[f64]) -> (SymTridiag, Vec<f64>) {
    let dofs = g.dofs();
    let l = g.laplacian_matrix().slice(dofs.start, dofs.end);
    let w: Vec<f64> = g.weights()[dofs.clone()].to_vec();
    let d = l
        .diag
        .iter()
        .zip(&c[dofs.clone()])
        .map(|(a, b)| a + b)
        .collect();
    let e = (0..w.len() - 1)
        .map(|i| l.upper[i] * (w[i] / w[i + 1]).sqrt())
        .collect();
    (SymTridiag { d, e }, w)
}

/// Largest eigenpair of Δ + diag(c) under the grid's boundary condition.
fn top_pair(g: &Grid1D, c: &[f64]) -> (f64, Field) {
    let (s, w) = symmetrised(g, c);
    let sigma = s.eigenvalue_from_top(0);
    let y = s.eigenvector(sigma);
    let sy = s.matvec(&y);
    let sigma =
        y.iter().zip(&sy).map(|(a, b)| a * b).sum::<f64>() / y.iter().map(|a| a * a).sum::<f64>();
    let sign = if y.iter().sum::<f64>() < 0.0 {
        -1.0
    } else {
        1.0
    };
    let mut phi = vec![0.0; g.n];
    for (k, i) in g.dofs().enumerate() {
        phi[i] = sign * y[k] / w[k].sqrt();
    }
    let nrm = g.norm_l2(&phi);
    phi.iter_mut().for_each(|v| *v /= nrm);
    (sigma, phi)
}

fn residual(g: &Grid1D, phi: &[f64], c: &[f64], sigma: f64) -> f64 {
    let l = g.laplacian(phi);
    g.dofs()
        .map(|i| (l[i] + c[i] * phi[i] - sigma * phi[i]).abs())
        .fold(0.0, f64::max)
}

pub fn sigma_principal(g: &Grid1D, m: &GrowthProfile, lambda: f64) -> Result<SigmaEig> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    let c: Vec<f64> = m.samples.iter().map(|v| lambda * v).collect();
    let (sigma1, varphi1) = top_pair(g, &c);
    let residual = residual(g, &varphi1, &c, sigma1);
    Ok(SigmaEig {
        sigma1,
        varphi1,
        residual,
    })
}

/// Smallest positive λ for which −Δφ = λmφ has a positive eigenfunction.
pub fn principal_weighted(g: &Grid1D, m: &GrowthProfile) -> Result<PrincipalEig> {
    if g.bc == Bc::Neumann {
        match m.case {
            CaseTag::A2 | CaseTag::A2Constant => {
                let phi = vec![1.0 / g.length.sqrt(); g.n];
                return Ok(PrincipalEig {
                    lambda_star: 0.0,
                    phi,
                    residual: 0.0,
                });
            }
            CaseTag::Neither => {
                return Err(Error::UnsupportedProfile(
                    "m is neither (A1) nor (A2)".into(),
                ))
            }
            CaseTag::A1 => {}
        }
    }
    if !(m.max > 0.0) {
        return Err(Error::UnsupportedProfile("m has no positive part".into()));
    }
    let sigma = |lam: f64| {
        let c: Vec<f64> = m.samples.iter().map(|v| lam * v).collect();
        top_pair(g, &c)
    };
    let mut iters = 0;
    // bracket: σ₁ < 0 on (0, λ*) and σ₁ > 0 beyond
    let mut hi = 1.0 / m.max;
    while sigma(hi).0 <= 0.0 {
        hi *= 2.0;
        iters += 1;
        if iters > 200 {
            return Err(Error::SolverFailure(
                "no sign change of sigma_1 found".into(),
            ));
        }
    }
    let mut lo = match g.bc {
        Bc::Dirichlet => 0.0,
        Bc::Neumann => {
            let mut lo = hi;
            loop {
                lo *= 0.5;
                iters += 1;
                if sigma(lo).0 < 0.0 {
                    break lo;
                }
                if iters > 400 {
                    return Err(Error::SolverFailure("sigma_1 never negative".into()));
                }
            }
        }
    };
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if sigma(mid).0 > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iters += 1;
    }
    // Newton with dσ₁/dλ = ∫mφ²/∫φ²
    let mut lam = 0.5 * (lo + hi);
    let mut prev = f64::INFINITY;
    loop {
        let (s, phi) = sigma(lam);
        let slope = g.dot(&m.samples, &phi.iter().map(|p| p * p).collect::<Vec<_>>());
        let step = s / slope;
        lam -= step;
        iters += 1;
        // stop at 1e−13, or once steps stall at the roundoff level of σ₁
        let stalled = step.abs() >= 0.5 * prev && step.abs() < 1e-9 * (1.0 + lam.abs());
        prev = step.abs();
        if step.abs() <= 1e-13 * (1.0 + lam.abs()) || stalled {
            let (_, phi) = sigma(lam);
            let c: Vec<f64> = m.samples.iter().map(|v| lam * v).collect();
            let residual = residual(g, &phi, &c, 0.0);
            if !(lam > 0.0)
                || phi
                    .iter()
                    .enumerate()
                    .any(|(i, &p)| g.dofs().contains(&i) && p <= 0.0)
            {
                return Err(Error::SolverFailure(
                    "no positive principal eigenfunction".into(),
                ));
            }
            return Ok(PrincipalEig {
                lambda_star: lam,
                phi,
                residual,
            });
        }
        if iters > MAX_ITER {
            return Err(Error::SolverFailure(
                "principal eigenvalue iteration did not converge".into(),
            ));
        }
    }
}

/// Scales a positive eigenfunction to unit maximum.
pub fn sup_normalised(phi: &[f64]) -> Field {
    let s = sup_norm(phi);
    phi.iter().map(|v| v / s).collect()
}

pub type Spectrum = Vec<(Complex64, Vec<Complex64>)>;

/// Full eigen-decomposition, eigenvalues sorted by real part (descending).
pub fn dense_spectrum(a: &faer::Mat<f64>) -> Result<Spectrum> {
    let n = a.nrows();
    if n > DENSE_LIMIT || a.ncols() != n {
        return Err(Error::Refused(format!(
            "dense eigenproblem of size {n}x{} refused",
            a.ncols()
        )));
    }
    let evd = a
        .eigen()
        .map_err(|e| Error::SolverFailure(format!("{e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let vals = s.column_vector();
    let mut out: Spectrum = (0..n)
        .map(|j| (vals[j], (0..n).map(|i| u[(i, j)]).collect()))
        .collect();
    out.sort_by(|a, b| b.0.re.total_cmp(&a.0.re).then(b.0.im.total_cmp(&a.0.im)));
    Ok(out)
}

pub fn dense_eigenvalues(a: &faer::Mat<f64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if n > DENSE_LIMIT || a.ncols() != n {
        return Err(Error::Refused(format!(
            "dense eigenproblem of size {n}x{} refused",
            a.ncols()
        )));
    }
    let mut v = a
        .eigenvalues()
        .map_err(|e| Error::SolverFailure(format!("{e:?}")))?;
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(v)
}

/// Dense matrix of a tridiagonal operator restricted to the grid unknowns.
pub fn dofs_dense(g: &Grid1D, t: &crate::tridiag::Tridiag<f64>) -> faer::Mat<f64> {
    let r = g.dofs();
    t.slice(r.start, r.end).to_dense()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::profile_from_str;
    use std::f64::consts::PI;

    fn neumann(n: usize) -> Grid1D {
        Grid1D::new(PI, n, Bc::Neumann).unwrap()
    }

    #[test]
    fn principal_a1_cubic() {
        let g = neumann(201);
        let m = profile_from_str("-x^3+5", &g).unwrap();
        let e = principal_weighted(&g, &m).unwrap();
        assert!((e.lambda_star - 0.0560).abs() < 1e-3, "{}", e.lambda_star);
        assert!(e.phi.iter().all(|&p| p > 0.0));
        assert!((g.norm_l2(&e.phi) - 1.0).abs() < 1e-10);
        assert!(e.residual < TOL, "{}", e.residual);
    }

    #[test]
    fn principal_a2_is_zero() {
        let g = neumann(101);
        let m = profile_from_str("sin(x)+1", &g).unwrap();
        let e = principal_weighted(&g, &m).unwrap();
        assert_eq!(e.lambda_star, 0.0);
        assert!(e.phi.iter().all(|&p| (p - 1.0 / PI.sqrt()).abs() < 1e-15));
        let bad = profile_from_str("-1-x", &g).unwrap();
        assert!(matches!(
            principal_weighted(&g, &bad),
            Err(Error::UnsupportedProfile(_))
        ));
    }

    #[test]
    fn principal_dirichlet_constant() {
        let g = Grid1D::new(PI, 201, Bc::Dirichlet).unwrap();
        let m = profile_from_str("4", &g).unwrap();
        let e = principal_weighted(&g, &m).unwrap();
        // discrete value is (4/h²)sin²(h/2)/4
        let exact = (2.0 / g.h * (g.h / 2.0).sin()).powi(2) / 4.0;
        assert!((e.lambda_star - exact).abs() < 1e-12);
        assert!((e.lambda_star - 0.25).abs() < 1e-4);
        let s = g.sample(f64::sin);
        let scale = g.norm_l2(&s);
        for (p, q) in e.phi.iter().zip(&s) {
            assert!((p - q / scale).abs() < 1e-9);
        }
    }

    #[test]
    fn sigma_examples() {
        let g = neumann(101);
        let m = profile_from_str("-x^3+5", &g).unwrap();
        let s0 = sigma_principal(&g, &m, 0.0).unwrap();
        assert!(s0.sigma1.abs() < 1e-9);
        assert!(s0
            .varphi1
            .iter()
            .all(|&p| (p - 1.0 / PI.sqrt()).abs() < 1e-7));
        assert!(sigma_principal(&g, &m, 0.6).unwrap().sigma1 > 0.0);
        let c = profile_from_str("4", &g).unwrap();
        assert!((sigma_principal(&g, &c, 0.7).unwrap().sigma1 - 2.8).abs() < 1e-9);
    }

    #[test]
    fn sigma_increasing_past_lambda_star() {
        let g = neumann(101);
        let m = profile_from_str("-x^3+5", &g).unwrap();
        let e = principal_weighted(&g, &m).unwrap();
        assert!(sigma_principal(&g, &m, e.lambda_star).unwrap().sigma1.abs() < 1e-9);
        let mut prev = 0.0;
        for k in 1..8 {
            let s = sigma_principal(&g, &m, e.lambda_star + 0.05 * k as f64)
                .unwrap()
                .sigma1;
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn monotone_in_weight() {
        let g = neumann(101);
        let a = principal_weighted(&g, &profile_from_str("-x^3+5", &g).unwrap()).unwrap();
        let b = principal_weighted(&g, &profile_from_str("-x^3+5.1", &g).unwrap()).unwrap();
        assert!(b.lambda_star < a.lambda_star);
    }

    #[test]
    fn agrees_with_dense() {
        for bc in [Bc::Neumann, Bc::Dirichlet] {
            let g = Grid1D::new(PI, 121, bc).unwrap();
            let m = profile_from_str("-x^3+5", &g).unwrap();
            let lam = 0.6;
            let sig = sigma_principal(&g, &m, lam).unwrap();
            let mut op = g.laplacian_matrix();
            op.add_diag(&m.samples.iter().map(|v| lam * v).collect::<Vec<_>>());
            let spec = dense_spectrum(&dofs_dense(&g, &op)).unwrap();
            let top = spec[0].0;
            assert!(top.im.abs() < 1e-9);
            assert!((top.re - sig.sigma1).abs() < 1e-8 * sig.sigma1.abs().max(1.0));
            // eigenvector direction
            let v: Vec<f64> = spec[0].1.iter().map(|z| z.re).collect();
            let w: Vec<f64> = g.dofs().map(|i| sig.varphi1[i]).collect();
            let cos = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>()
                / (v.iter().map(|a| a * a).sum::<f64>() * w.iter().map(|a| a * a).sum::<f64>())
                    .sqrt();
            assert!((cos.abs() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn dense_examples() {
        let g = neumann(201);
        let spec = dense_eigenvalues(&g.laplacian_matrix().to_dense()).unwrap();
        for (k, v) in spec.iter().take(4).enumerate() {
            assert!((v.re + (k * k) as f64).abs() < 1e-2, "{v}");
        }
        let d = Grid1D::new(PI, 201, Bc::Dirichlet).unwrap();
        let spec = dense_eigenvalues(&dofs_dense(&d, &d.laplacian_matrix())).unwrap();
        for (k, v) in spec.iter().take(3).enumerate() {
            assert!((v.re + ((k + 1) * (k + 1)) as f64).abs() < 1e-2, "{v}");
        }
        let diag = faer::Mat::from_fn(5, 5, |i, j| if i == j { 2.5 } else { 0.0 });
        assert!(dense_eigenvalues(&diag)
            .unwrap()
            .iter()
            .all(|v| (v - 2.5).norm() < 1e-14));
        let big = faer::Mat::<f64>::zeros(2001, 2001);
        assert!(matches!(dense_spectrum(&big), Err(Error::Refused(_))));
    }
}
