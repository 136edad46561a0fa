//! Linear stability of u_λ under the delayed memory term.
//!
//! Perturbations ψe^{μt} satisfy T(μ)ψ = Aψ + e^{−μτ}Bψ − μψ = 0 with
//! A = Δ + D∇·(·∇u_λ) + λ(m − 2u_λ) and B = D∇·(u_λ∇·). Candidate roots come
//! from a Chebyshev collocation of the infinitesimal generator on a reduced
//! basis of Laplacian eigenmodes; every candidate is then polished by Newton
//! on the full-grid bordered system (T(μ)ψ = 0, ℓ·ψ = 1).

use crate::dense;
use crate::eigen::dense_eigenvalues;
use crate::error::{Error, Result};
use crate::expr::GrowthProfile;
use crate::grid::{Bc, Field, Grid1D};
use crate::steady::{solve_steady, SteadyState};
use crate::tridiag::Tridiag;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

type C = Complex64;

const FUNCTIONAL_SEED: u64 = 0x6d656d6f;
const NEWTON_STEPS: usize = 40;
pub const RESIDUAL_TOL: f64 = 1e-6;

/// Linearisation restricted to the grid unknowns.
#[derive(Debug, Clone)]
pub struct Linearization {
    pub grid: Grid1D,
    pub a: Tridiag<f64>,
    pub b: Tridiag<f64>,
    pub tau: f64,
}

pub fn linearize(
    g: &Grid1D,
    m: &GrowthProfile,
    lambda: f64,
    d: f64,
    u: &[f64],
    tau: f64,
) -> Linearization {
    let r = g.dofs();
    let mut a = g
        .laplacian_matrix()
        .combine(1.0, &g.cross_diffusion_in_u(u), d);
    a.add_diag(
        &(0..g.n)
            .map(|i| lambda * (m.samples[i] - 2.0 * u[i]))
            .collect::<Vec<_>>(),
    );
    let b = g
        .cross_diffusion_in_v(u)
        .combine(d, &Tridiag::zeros(g.n), 0.0);
    Linearization {
        grid: g.clone(),
        a: a.slice(r.start, r.end),
        b: b.slice(r.start, r.end),
        tau,
    }
}

pub fn assemble_linearization(
    g: &Grid1D,
    m: &GrowthProfile,
    steady: &SteadyState,
    tau: f64,
) -> Result<Linearization> {
    if !(steady.residual < 1e-6) {
        return Err(Error::InvalidArgument(format!(
            "steady residual {} too large",
            steady.residual
        )));
    }
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tau must be nonnegative, got {tau}"
        )));
    }
    Ok(linearize(g, m, steady.lambda, steady.d, &steady.u, tau))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub mu: C,
    /// ‖T(μ)ψ‖∞/‖ψ‖∞ after refinement.
    pub residual: f64,
    pub refined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Tau0Dense,
    Pseudospectral,
}

#[derive(Debug, Clone)]
pub struct RootSet {
    /// Sorted by real part, descending.
    pub roots: Vec<Root>,
    pub method: Method,
    pub order: usize,
    pub tau: f64,
    /// Rightmost root agreed between orders M and M+8.
    pub order_converged: bool,
}

impl RootSet {
    pub fn rightmost(&self) -> Option<Root> {
        self.roots
            .iter()
            .find(|r| r.refined)
            .copied()
            .or(self.roots.first().copied())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Chebyshev order M of the delay collocation.
    pub order: usize,
    /// Number of Laplacian eigenmodes in the reduced basis.
    pub modes: usize,
    /// Roots with Re μ ≤ −cutoff are discarded.
    pub cutoff: f64,
    /// Re-run at M+8 and compare the rightmost root.
    pub check_order: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            order: 24,
            modes: 24,
            cutoff: 2.0,
            check_order: true,
        }
    }
}

pub const MAX_DIMENSION: usize = 2000;

fn sort_desc(v: &mut [Root]) {
    v.sort_by(|a, b| {
        b.mu.re
            .total_cmp(&a.mu.re)
            .then(b.mu.im.total_cmp(&a.mu.im))
    });
}

/// Full spectrum of A + B (delay set to zero) by dense eigen-decomposition.
pub fn tau_zero_spectrum(lin: &Linearization) -> Result<RootSet> {
    let sum = lin.a.combine(1.0, &lin.b, 1.0);
    let vals = dense_eigenvalues(&sum.to_dense())?;
    let mut roots: Vec<Root> = vals
        .into_iter()
        .map(|mu| Root {
            mu,
            residual: 0.0,
            refined: true,
        })
        .collect();
    sort_desc(&mut roots);
    Ok(RootSet {
        roots,
        method: Method::Tau0Dense,
        order: 0,
        tau: 0.0,
        order_converged: true,
    })
}

/// W-orthonormal Laplacian eigenvectors on the unknowns (cosines under
/// Neumann, sines under Dirichlet); they are exact eigenvectors of the
/// discrete Laplacian.
pub fn mode_basis(g: &Grid1D, count: usize) -> Vec<Vec<f64>> {
    let r = g.dofs();
    let w = g.weights();
    let count = count.min(r.len());
    (0..count)
        .map(|k| {
            let freq = match g.bc {
                Bc::Neumann => k as f64,
                Bc::Dirichlet => (k + 1) as f64,
            } * PI
                / g.length;
            let v: Vec<f64> = r
                .clone()
                .map(|i| match g.bc {
                    Bc::Neumann => (freq * g.x(i)).cos(),
                    Bc::Dirichlet => (freq * g.x(i)).sin(),
                })
                .collect();
            let nrm = r
                .clone()
                .zip(&v)
                .map(|(i, x)| w[i] * x * x)
                .sum::<f64>()
                .sqrt();
            v.into_iter().map(|x| x / nrm).collect()
        })
        .collect()
}

fn project(g: &Grid1D, t: &Tridiag<f64>, basis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let r = g.dofs();
    let w: Vec<f64> = g.weights()[r].to_vec();
    let images: Vec<Vec<f64>> = basis.iter().map(|v| t.matvec(v)).collect();
    basis
        .iter()
        .map(|vi| {
            images
                .iter()
                .map(|tj| vi.iter().zip(tj).zip(&w).map(|((a, b), c)| a * b * c).sum())
                .collect()
        })
        .collect()
}

/// Chebyshev differentiation matrix on xⱼ = cos(jπ/M).
pub fn cheb_matrix(m: usize) -> Vec<Vec<f64>> {
    let x: Vec<f64> = (0..=m).map(|j| (j as f64 * PI / m as f64).cos()).collect();
    let c = |j: usize| {
        (if j == 0 || j == m { 2.0 } else { 1.0 }) * if j.is_multiple_of(2) { 1.0 } else { -1.0 }
    };
    let mut d = vec![vec![0.0; m + 1]; m + 1];
    for i in 0..=m {
        for j in 0..=m {
            if i != j {
                d[i][j] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
        d[i][i] = -(0..=m).filter(|&j| j != i).map(|j| d[i][j]).sum::<f64>();
    }
    d
}

/// Eigenvalues of the collocated infinitesimal generator for the reduced
/// pair (Â, B̂).
fn generator_eigenvalues(
    ah: &[Vec<f64>],
    bh: &[Vec<f64>],
    tau: f64,
    order: usize,
) -> Result<Vec<C>> {
    let k = ah.len();
    if tau == 0.0 {
        let s = faer::Mat::from_fn(k, k, |i, j| ah[i][j] + bh[i][j]);
        return dense_eigenvalues(&s);
    }
    let dim = k * (order + 1);
    if dim > MAX_DIMENSION {
        return Err(Error::Refused(format!(
            "generator dimension {dim} exceeds {MAX_DIMENSION}"
        )));
    }
    let dm = cheb_matrix(order);
    let scale = 2.0 / tau;
    let g = faer::Mat::from_fn(dim, dim, |row, col| {
        let (bi, i) = (row / k, row % k);
        let (bj, j) = (col / k, col % k);
        if bi == 0 {
            if bj == 0 {
                ah[i][j]
            } else if bj == order {
                bh[i][j]
            } else {
                0.0
            }
        } else if i == j {
            scale * dm[bi][bj]
        } else {
            0.0
        }
    });
    dense_eigenvalues(&g)
}

struct Refiner<'a> {
    a: Tridiag<C>,
    b: Tridiag<C>,
    tau: f64,
    ell: &'a [C],
}

impl Refiner<'_> {
    fn t(&self, mu: C) -> Tridiag<C> {
        let e = (-mu * self.tau).exp();
        let mut t = self.a.combine(C::new(1.0, 0.0), &self.b, e);
        t.diag.iter_mut().for_each(|d| *d -= mu);
        t
    }

    fn residual(&self, mu: C, psi: &[C]) -> f64 {
        let r = self.t(mu).matvec(psi);
        let num = r.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let den = psi.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        num / den
    }

    fn ell_dot(&self, x: &[C]) -> C {
        self.ell.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Newton on (T(μ)ψ = 0, ℓ·ψ = 1) from an approximate root.
    fn refine(&self, mu0: C) -> Root {
        let n = self.a.len();
        let mut mu = mu0;
        let mut t = self.t(mu);
        let mut lu = t.lu();
        if lu.is_none() {
            mu += C::new(1e-10, 1e-10);
            t = self.t(mu);
            lu = t.lu();
        }
        let Some(lu0) = lu else {
            return Root {
                mu: mu0,
                residual: f64::INFINITY,
                refined: false,
            };
        };
        // inverse iteration for a starting eigenvector
        let mut psi: Vec<C> = (0..n)
            .map(|i| C::new(1.0 + 0.1 * (i as f64).sin(), 0.0))
            .collect();
        for _ in 0..3 {
            psi = lu0.solve(&psi);
            let s = psi.iter().fold(0.0f64, |a, z| a.max(z.norm()));
            psi.iter_mut().for_each(|z| *z /= s);
        }
        let mut converged = false;
        for _ in 0..NEWTON_STEPS {
            let l = self.ell_dot(&psi);
            if l.norm() == 0.0 || !l.norm().is_finite() {
                break;
            }
            psi.iter_mut().for_each(|z| *z /= l);
            let t = self.t(mu);
            let Some(lu) = t.lu() else {
                converged = true;
                break;
            };
            let e = (-mu * self.tau).exp();
            let r: Vec<C> = t.matvec(&psi).into_iter().map(|z| -z).collect();
            let bp = self.b.matvec(&psi);
            let tp: Vec<C> = bp
                .iter()
                .zip(&psi)
                .map(|(b, p)| -self.tau * e * b - p)
                .collect();
            let x1 = lu.solve(&r);
            let x2 = lu.solve(&tp);
            let dmu = (self.ell_dot(&x1) + self.ell_dot(&psi) - 1.0) / self.ell_dot(&x2);
            if !dmu.norm().is_finite() {
                break;
            }
            for i in 0..n {
                psi[i] += x1[i] - dmu * x2[i];
            }
            mu += dmu;
            if dmu.norm() < 1e-13 * (1.0 + mu.norm()) {
                converged = true;
                break;
            }
        }
        let residual = self.residual(mu, &psi);
        if converged && residual < RESIDUAL_TOL && mu.re.is_finite() {
            Root {
                mu,
                residual,
                refined: true,
            }
        } else {
            Root {
                mu: mu0,
                residual,
                refined: false,
            }
        }
    }
}

fn functional(n: usize) -> Vec<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(FUNCTIONAL_SEED);
    (0..n)
        .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn close(a: C, b: C) -> bool {
    (a - b).norm() < 1e-7 * (1.0 + a.norm())
}

fn roots_at_order(
    lin: &Linearization,
    tau: f64,
    order: usize,
    opts: &SpectrumOptions,
    limit: Option<usize>,
) -> Result<Vec<Root>> {
    let g = &lin.grid;
    let basis = mode_basis(g, opts.modes);
    let ah = project(g, &lin.a, &basis);
    let bh = project(g, &lin.b, &basis);
    let mut cand: Vec<C> = generator_eigenvalues(&ah, &bh, tau, order)?
        .into_iter()
        .filter(|z| z.re > -opts.cutoff - 1.0 && z.im >= -1e-9)
        .collect();
    cand.sort_by(|a, b| b.re.total_cmp(&a.re));
    if let Some(l) = limit {
        cand.truncate(l);
    }
    let ell = functional(lin.a.len());
    let refiner = Refiner {
        a: lin.a.to_complex(),
        b: lin.b.to_complex(),
        tau,
        ell: &ell,
    };
    let mut out: Vec<Root> = vec![];
    for z in cand {
        let mut r = refiner.refine(z);
        if r.refined && r.mu.im.abs() < 1e-9 * (1.0 + r.mu.norm()) {
            r.mu.im = 0.0;
        }
        if r.mu.re <= -opts.cutoff || out.iter().any(|q| close(q.mu, r.mu)) {
            continue;
        }
        out.push(r);
        if r.mu.im != 0.0 {
            out.push(Root {
                mu: r.mu.conj(),
                ..r
            });
        }
    }
    sort_desc(&mut out);
    Ok(out)
}

fn delay_roots(
    lin: &Linearization,
    tau: f64,
    opts: &SpectrumOptions,
    limit: Option<usize>,
) -> Result<RootSet> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tau must be nonnegative, got {tau}"
        )));
    }
    if opts.order < 8 {
        return Err(Error::InvalidArgument(
            "collocation order must be at least 8".into(),
        ));
    }
    let mut order = opts.order;
    let mut roots = roots_at_order(lin, tau, order, opts, limit)?;
    let mut converged = !opts.check_order;
    if opts.check_order {
        for _ in 0..3 {
            let next = roots_at_order(lin, tau, order + 8, opts, limit)?;
            let agree = match (rightmost_refined(&roots), rightmost_refined(&next)) {
                (Some(a), Some(b)) => (a - b).norm() < 1e-6,
                (None, None) => true,
                _ => false,
            };
            roots = next;
            order += 8;
            if agree {
                converged = true;
                break;
            }
        }
    }
    Ok(RootSet {
        roots,
        method: Method::Pseudospectral,
        order,
        tau,
        order_converged: converged,
    })
}

fn rightmost_refined(v: &[Root]) -> Option<C> {
    v.iter().find(|r| r.refined).map(|r| r.mu)
}

/// Characteristic roots with Re μ > −cutoff at delay `tau`.
pub fn delay_rightmost(lin: &Linearization, tau: f64, opts: &SpectrumOptions) -> Result<RootSet> {
    delay_roots(lin, tau, opts, None)
}

/// Only the few rightmost candidates are polished; used for scans in τ.
pub fn rightmost_root(lin: &Linearization, tau: f64, opts: &SpectrumOptions) -> Result<Root> {
    let set = delay_roots(
        lin,
        tau,
        &SpectrumOptions {
            cutoff: f64::INFINITY,
            ..*opts
        },
        Some(6),
    )?;
    set.rightmost()
        .ok_or_else(|| Error::SolverFailure(format!("no characteristic root found at tau = {tau}")))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub tau0: f64,
    pub omega0: f64,
}

/// First τ in [0, τ_max] where the rightmost root enters the right half
/// plane: a scan with step τ_max/64 followed by bisection to 1e−3 relative.
pub fn find_crossing_lin(
    lin: &Linearization,
    tau_max: f64,
    opts: &SpectrumOptions,
) -> Result<Option<Crossing>> {
    let scan = SpectrumOptions {
        check_order: false,
        ..*opts
    };
    let re = |t: f64| rightmost_root(lin, t, &scan).map(|r| r.mu.re);
    if re(0.0)? > 0.0 {
        return Err(Error::HypothesisViolated(
            "steady state is already unstable at tau = 0".into(),
        ));
    }
    let step = tau_max / 64.0;
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=64 {
        let t = step * k as f64;
        if re(t)? > 0.0 {
            hi = Some(t);
            break;
        }
        lo = t;
    }
    let Some(mut hi) = hi else {
        return Ok(None);
    };
    while hi - lo > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        if re(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let tau0 = 0.5 * (lo + hi);
    let r = rightmost_root(lin, tau0, opts)?;
    Ok(Some(Crossing {
        tau0,
        omega0: r.mu.im.abs(),
    }))
}

pub fn find_crossing(
    g: &Grid1D,
    m: &GrowthProfile,
    lambda: f64,
    d: f64,
    tau_max: f64,
    opts: &SpectrumOptions,
) -> Result<Option<Crossing>> {
    let s = solve_steady(g, m, lambda, d)?;
    find_crossing_lin(&linearize(g, m, lambda, d, &s.u, 0.0), tau_max, opts)
}

/// Central difference of max Re μ across τ₀ ± δ; refused unless the
/// rightmost root changes sign across the interval.
pub fn transversality_lin(
    lin: &Linearization,
    tau0: f64,
    delta: f64,
    opts: &SpectrumOptions,
) -> Result<f64> {
    if !(tau0 > 0.0) || !(delta > 0.0) || delta >= tau0 {
        return Err(Error::Refused(format!(
            "no crossing to differentiate at tau0 = {tau0}"
        )));
    }
    let lo = rightmost_root(lin, tau0 - delta, opts)?;
    let hi = rightmost_root(lin, tau0 + delta, opts)?;
    if !lo.refined || !hi.refined {
        return Err(Error::SolverFailure(
            "rightmost root not refined near tau0".into(),
        ));
    }
    if (lo.mu.re > 0.0) == (hi.mu.re > 0.0) {
        return Err(Error::Refused(format!(
            "max Re mu does not change sign across tau0 = {tau0}"
        )));
    }
    Ok((hi.mu.re - lo.mu.re) / (2.0 * delta))
}

pub fn transversality(
    g: &Grid1D,
    m: &GrowthProfile,
    lambda: f64,
    d: f64,
    tau0: f64,
    delta: Option<f64>,
    opts: &SpectrumOptions,
) -> Result<f64> {
    let s = solve_steady(g, m, lambda, d)?;
    let lin = linearize(g, m, lambda, d, &s.u, tau0);
    transversality_lin(&lin, tau0, delta.unwrap_or(0.01 * tau0), opts)
}

/// Full-grid eigenvector of a refined root, normalised to unit sup-norm.
pub fn eigenvector(lin: &Linearization, mu: C, tau: f64) -> Option<Vec<C>> {
    let ell = functional(lin.a.len());
    let refiner = Refiner {
        a: lin.a.to_complex(),
        b: lin.b.to_complex(),
        tau,
        ell: &ell,
    };
    let t = refiner.t(mu + C::new(1e-9, 0.0));
    let lu = t.lu()?;
    let mut psi: Vec<C> = (0..lin.a.len())
        .map(|i| C::new(1.0 + 0.1 * (i as f64).sin(), 0.0))
        .collect();
    for _ in 0..4 {
        psi = lu.solve(&psi);
        let s = psi.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        psi.iter_mut().for_each(|z| *z /= s);
    }
    // rotate so the largest entry is real and positive
    let k = (0..psi.len()).max_by(|&i, &j| psi[i].norm().total_cmp(&psi[j].norm()))?;
    let ph = psi[k] / psi[k].norm();
    Some(psi.into_iter().map(|z| z / ph).collect())
}

/// Embeds a vector on the unknowns into a full grid field.
pub fn embed(g: &Grid1D, v: &[f64]) -> Field {
    let mut out = vec![0.0; g.n];
    for (k, i) in g.dofs().enumerate() {
        out[i] = v[k];
    }
    out
}

/// Null vector of the reduced characteristic matrix, for diagnostics.
pub fn reduced_null_vector(lin: &Linearization, mu: C, tau: f64, modes: usize) -> Option<Vec<C>> {
    let g = &lin.grid;
    let basis = mode_basis(g, modes);
    let ah = project(g, &lin.a, &basis);
    let bh = project(g, &lin.b, &basis);
    let e = (-mu * tau).exp();
    let k = ah.len();
    let t = faer::Mat::from_fn(k, k, |i, j| {
        C::new(ah[i][j], 0.0) + e * bh[i][j] - if i == j { mu } else { C::new(0.0, 0.0) }
    });
    dense::null_vector(&t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::profile_from_str;

    fn neumann(n: usize) -> Grid1D {
        Grid1D::new(PI, n, Bc::Neumann).unwrap()
    }

    #[test]
    fn cheb_differentiates_polynomials() {
        let m = 10;
        let d = cheb_matrix(m);
        let x: Vec<f64> = (0..=m).map(|j| (j as f64 * PI / m as f64).cos()).collect();
        for i in 0..=m {
            let v: f64 = (0..=m).map(|j| d[i][j] * x[j].powi(3)).sum();
            assert!((v - 3.0 * x[i] * x[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_state_linearisation() {
        let g = neumann(41);
        let m = profile_from_str("2", &g).unwrap();
        let u = vec![2.0; 41];
        let lin = linearize(&g, &m, 0.5, 0.3, &u, 1.0);
        let l = g.laplacian_matrix();
        for i in 0..41 {
            for j in 0..41 {
                let a = l.get(i, j) - if i == j { 1.0 } else { 0.0 };
                assert!((lin.a.get(i, j) - a).abs() < 1e-9);
                assert!((lin.b.get(i, j) - 0.6 * l.get(i, j)).abs() < 1e-9);
            }
        }
        let lin0 = linearize(&g, &m, 0.5, 0.0, &u, 1.0);
        assert!(lin0.b.diag.iter().chain(&lin0.b.upper).all(|&v| v == 0.0));
    }

    #[test]
    fn jacobian_consistency() {
        let g = neumann(101);
        let m = profile_from_str("-x^3+5", &g).unwrap();
        let s = solve_steady(&g, &m, 0.6, 0.3).unwrap();
        let lin = assemble_linearization(&g, &m, &s, 0.0).unwrap();
        let j = lin.a.combine(1.0, &lin.b, 1.0);
        let f = |u: &[f64]| crate::steady::residual_field(&g, &m, 0.6, 0.3, u);
        let mut worst: f64 = 0.0;
        let scale = j.diag.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        for col in [0usize, 1, 37, 50, 99, 100] {
            let eps = 1e-6;
            let mut up = s.u.clone();
            up[col] += eps;
            let mut dn = s.u.clone();
            dn[col] -= eps;
            let (fp, fm) = (f(&up), f(&dn));
            for row in 0..101 {
                let fd = (fp[row] - fm[row]) / (2.0 * eps);
                worst = worst.max((fd - j.get(row, col)).abs());
            }
        }
        assert!(worst / scale < 1e-5, "{}", worst / scale);
    }

    #[test]
    fn tau_zero_examples() {
        let g = neumann(101);
        let m = profile_from_str("-x^3+5", &g).unwrap();
        let s = solve_steady(&g, &m, 0.6, 0.3).unwrap();
        let lin = assemble_linearization(&g, &m, &s, 0.0).unwrap();
        assert!(tau_zero_spectrum(&lin).unwrap().roots[0].mu.re < 0.0);

        let c = profile_from_str("2", &g).unwrap();
        let (lam, d) = (0.5, 0.3);
        let lin = linearize(&g, &c, lam, d, &vec![2.0; 101], 0.0);
        let set = tau_zero_spectrum(&lin).unwrap();
        for k in 0..5 {
            let kappa = -(4.0 / (g.h * g.h)) * (0.5 * k as f64 * g.h).sin().powi(2);
            let expect = (1.0 + d * 2.0) * kappa - lam * 2.0;
            assert!((set.roots[k].mu.re - expect).abs() < 1e-8, "{k}");
        }
        let zero = Linearization {
            grid: g.clone(),
            a: Tridiag::zeros(101),
            b: Tridiag::zeros(101),
            tau: 0.0,
        };
        assert!(tau_zero_spectrum(&zero)
            .unwrap()
            .roots
            .iter()
            .all(|r| r.mu.norm() == 0.0));
    }

    #[test]
    fn delay_zero_matches_dense() {
        let g = neumann(101);
        let m = profile_from_str("-x^3+5", &g).unwrap();
        let s = solve_steady(&g, &m, 0.6, 0.3).unwrap();
        let lin = assemble_linearization(&g, &m, &s, 0.0).unwrap();
        let dense = tau_zero_spectrum(&lin).unwrap();
        let ps = delay_rightmost(&lin, 0.0, &SpectrumOptions::default()).unwrap();
        let want: Vec<C> = dense
            .roots
            .iter()
            .map(|r| r.mu)
            .filter(|z| z.re > -2.0)
            .collect();
        assert_eq!(ps.roots.len(), want.len());
        for (a, b) in ps.roots.iter().zip(&want) {
            assert!((a.mu - b).norm() < 1e-8, "{} {}", a.mu, b);
        }
    }

    #[test]
    fn conjugate_closed_and_residuals() {
        let g = Grid1D::new(PI, 81, Bc::Dirichlet).unwrap();
        let m = profile_from_str("4", &g).unwrap();
        let s = solve_steady(&g, &m, 0.35, 0.7).unwrap();
        let lin = assemble_linearization(&g, &m, &s, 2.0).unwrap();
        let set = delay_rightmost(&lin, 2.0, &SpectrumOptions::default()).unwrap();
        assert!(set.order_converged);
        assert!(set.roots[0].mu.re < 0.0);
        for r in &set.roots {
            assert!(set.roots.iter().any(|q| (q.mu - r.mu.conj()).norm() < 1e-8));
            assert!(!r.refined || r.residual < RESIDUAL_TOL);
            assert!(r.mu.norm() > 1e-4);
        }
    }
}
