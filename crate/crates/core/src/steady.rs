//! Positive steady states of Δu + D∇·(u∇u) + λu(m − u) = 0 and their
//! small-amplitude expansions.
//!
//! Discretely ∇·(u∇u) = ½Δ(u²), so the steady problem is LΦ(u) + f(u) = 0
//! with Φ(u) = u + Du²/2 and f(u) = λu(m − u). The monotone scheme iterates
//! on w = Φ(u), which is increasing on u ≥ 0 whenever 1 + D·max m > 0.

use crate::bifurcation::{compute_r, Normalization};
use crate::dense;
use crate::eigen::{principal_weighted, sigma_principal, sup_normalised};
use crate::error::{Error, Result};
use crate::expr::{CaseTag, GrowthProfile};
use crate::grid::{sup_dist, sup_norm, Bc, Field, Grid1D};
use crate::tridiag::Tridiag;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-10;
const NEWTON_SWITCH: f64 = 1e-3;
const MAX_PICARD: usize = 400_000;
const MAX_NEWTON: usize = 60;
const EPS_FLOOR_EXP: i32 = 40;

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub u: Field,
    pub lambda: f64,
    pub d: f64,
    pub residual: f64,
    pub bracket_low: Field,
    pub bracket_high: Field,
    /// Monotone sweeps plus Newton steps, lower branch.
    pub iterations: usize,
    /// Sup-distance between the limits reached from the two bracket ends.
    pub branch_gap: f64,
}

/// Discrete residual LΦ(u) + λu(m − u); zero at pinned boundary nodes.
pub fn residual_field(g: &Grid1D, m: &GrowthProfile, lambda: f64, d: f64, u: &[f64]) -> Field {
    let phi: Field = u.iter().map(|&v| v + 0.5 * d * v * v).collect();
    let mut r = g.laplacian(&phi);
    for i in g.dofs() {
        r[i] += lambda * u[i] * (m.samples[i] - u[i]);
    }
    g.pin(&mut r);
    r
}

pub fn residual_norm(g: &Grid1D, m: &GrowthProfile, lambda: f64, d: f64, u: &[f64]) -> f64 {
    sup_norm(&residual_field(g, m, lambda, d, u))
}

/// Assumption (O): D > −1/max m.
pub fn check_o(m: &GrowthProfile, d: f64) -> Result<()> {
    if m.max > 0.0 && !(1.0 + d * m.max > 0.0) {
        return Err(Error::AssumptionViolated(format!(
            "(O) D > -1/max m fails: D = {d}, -1/max m = {}",
            -1.0 / m.max
        )));
    }
    Ok(())
}

fn check_range(g: &Grid1D, m: &GrowthProfile, lambda: f64) -> Result<()> {
    if !(lambda > 0.0) {
        return Err(Error::OutOfRange(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if g.bc == Bc::Neumann {
        match m.case {
            CaseTag::Neither => {
                return Err(Error::UnsupportedProfile(
                    "m is neither (A1) nor (A2)".into(),
                ))
            }
            CaseTag::A2 | CaseTag::A2Constant => return Ok(()),
            CaseTag::A1 => {}
        }
    }
    let eig = principal_weighted(g, m)?;
    if lambda <= eig.lambda_star {
        return Err(Error::OutOfRange(format!(
            "lambda = {lambda} does not exceed lambda* = {}",
            eig.lambda_star
        )));
    }
    Ok(())
}

/// Sub- and supersolution (εφ₁, K) with K = max m and ε the largest power
/// of two, down to 2⁻⁴⁰, making εφ₁ a discrete subsolution.
pub fn bracket(g: &Grid1D, m: &GrowthProfile, lambda: f64, d: f64) -> Result<(Field, Field)> {
    check_o(m, d)?;
    check_range(g, m, lambda)?;
    let k = m.max;
    let mut high = vec![k; g.n];
    g.pin(&mut high);
    let phi1 = sup_normalised(&sigma_principal(g, m, lambda)?.varphi1);
    for e in 0..=EPS_FLOOR_EXP {
        let eps = 0.5f64.powi(e);
        if eps > k {
            continue;
        }
        let low: Field = phi1.iter().map(|p| eps * p).collect();
        let r = residual_field(g, m, lambda, d, &low);
        if g.dofs().all(|i| r[i] >= 0.0) {
            return Ok((low, high));
        }
    }
    Err(Error::SolverFailure(format!(
        "no subsolution eps*phi_1 with eps >= 2^-{EPS_FLOOR_EXP}"
    )))
}

struct Picard {
    lu: crate::tridiag::TridiagLu<f64>,
    c: f64,
    lo: usize,
    hi: usize,
}

impl Picard {
    /// Shift c ≥ max over [0, top] of −f′(u)/Φ′(u), so the sweep is order preserving.
    fn new(g: &Grid1D, m: &GrowthProfile, lambda: f64, d: f64, top: f64) -> Self {
        let mut c: f64 = 0.0;
        for &mi in &m.samples {
            for u in [0.0, top] {
                c = c.max(lambda * (2.0 * u - mi) / (1.0 + d * u));
            }
        }
        let c = c + 1e-12;
        let r = g.dofs();
        let a = Tridiag::identity(g.n)
            .combine(c, &g.laplacian_matrix(), -1.0)
            .slice(r.start, r.end);
        Picard {
            lu: a.lu().expect("shifted Laplacian is nonsingular"),
            c,
            lo: r.start,
            hi: r.end,
        }
    }

    fn sweep(&self, m: &GrowthProfile, lambda: f64, d: f64, u: &mut [f64]) {
        let rhs: Vec<f64> = (self.lo..self.hi)
            .map(|i| {
                let v = u[i];
                self.c * (v + 0.5 * d * v * v) + lambda * v * (m.samples[i] - v)
            })
            .collect();
        let w = self.lu.solve(&rhs);
        for (k, i) in (self.lo..self.hi).enumerate() {
            u[i] = phi_inverse(w[k], d);
        }
    }
}

fn phi_inverse(w: f64, d: f64) -> f64 {
    if d == 0.0 {
        w
    } else {
        // (−1 + √(1 + 2Dw))/D written without cancellation
        2.0 * w / (1.0 + (1.0 + 2.0 * d * w).max(0.0).sqrt())
    }
}

fn newton_floor(g: &Grid1D, d: f64, u: &[f64]) -> f64 {
    let top = sup_norm(u);
    64.0 * f64::EPSILON * 4.0 / (g.h * g.h) * (top + 0.5 * d.abs() * top * top)
}

/// Newton on the discrete residual. Returns (u, residual, steps).
pub fn newton(
    g: &Grid1D,
    m: &GrowthProfile,
    lambda: f64,
    d: f64,
    u0: &[f64],
) -> Result<(Field, f64, usize)> {
    let mut u = u0.to_vec();
    g.pin(&mut u);
    let r = g.dofs();
    let l = g.laplacian_matrix();
    let mut res = residual_norm(g, m, lambda, d, &u);
    for step in 0..MAX_NEWTON {
        let floor = newton_floor(g, d, &u).max(TOL);
        if res < floor {
            return Ok((u, res, step));
        }
        let dphi: Vec<f64> = u.iter().map(|v| 1.0 + d * v).collect();
        let mut j = l.scale_cols(&dphi);
        j.add_diag(
            &(0..g.n)
                .map(|i| lambda * (m.samples[i] - 2.0 * u[i]))
                .collect::<Vec<_>>(),
        );
        let f = residual_field(g, m, lambda, d, &u);
        let neg: Vec<f64> = f[r.clone()].iter().map(|v| -v).collect();
        let delta = j
            .slice(r.start, r.end)
            .solve(&neg)
            .ok_or_else(|| Error::SolverFailure("singular Newton Jacobian".into()))?;
        let mut t = 1.0;
        loop {
            let mut trial = u.clone();
            for (k, i) in r.clone().enumerate() {
                trial[i] += t * delta[k];
            }
            let tr = residual_norm(g, m, lambda, d, &trial);
            if tr < res || t < 1e-4 {
                if !(tr < res) && res < 1e-8 {
                    // stagnation at the roundoff floor
                    return Ok((u, res, step));
                }
                u = trial;
                res = tr;
                break;
            }
            t *= 0.5;
        }
        if !res.is_finite() {
            return Err(Error::SolverFailure("Newton diverged".into()));
        }
    }
    if res < 1e-8 {
        return Ok((u, res, MAX_NEWTON));
    }
    Err(Error::SolverFailure(format!(
        "Newton did not converge, residual {res:e}"
    )))
}

/// Shifted Picard sweeps from `u0` until the residual drops below the
/// Newton switch, then Newton. Returns (u, residual, iterations).
pub fn solve_from(
    g: &Grid1D,
    m: &GrowthProfile,
    lambda: f64,
    d: f64,
    u0: &[f64],
) -> Result<(Field, f64, usize)> {
    check_o(m, d)?;
    let top = m.max.max(sup_norm(u0));
    let picard = Picard::new(g, m, lambda, d, top);
    let mut u = u0.to_vec();
    g.pin(&mut u);
    let mut it = 0;
    // relative to the size of the reaction term, so that a tiny subsolution
    // is not handed to Newton next to the trivial state
    let switch = |u: &[f64]| NEWTON_SWITCH * (lambda * sup_norm(u) * sup_norm(u)).min(1.0);
    while residual_norm(g, m, lambda, d, &u) > switch(&u) {
        picard.sweep(m, lambda, d, &mut u);
        it += 1;
        if it >= MAX_PICARD || u.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverFailure(format!(
                "monotone iteration stalled after {it} sweeps"
            )));
        }
    }
    let (u, res, k) = newton(g, m, lambda, d, &u)?;
    Ok((u, res, it + k))
}

fn positivity(g: &Grid1D, u: &[f64]) -> Result<()> {
    let min = g.dofs().map(|i| u[i]).fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::PositivityFailure(min));
    }
    Ok(())
}

pub fn solve_steady(g: &Grid1D, m: &GrowthProfile, lambda: f64, d: f64) -> Result<SteadyState> {
    let (low, high) = bracket(g, m, lambda, d)?;
    let (u, residual, iterations) = solve_from(g, m, lambda, d, &low)?;
    let (v, _, _) = solve_from(g, m, lambda, d, &high)?;
    positivity(g, &u)?;
    Ok(SteadyState {
        branch_gap: sup_dist(&u, &v),
        u,
        lambda,
        d,
        residual,
        bracket_low: low,
        bracket_high: high,
        iterations,
    })
}

/// Smooth random positive field bounded by `top`.
pub fn random_field(g: &Grid1D, top: f64, rng: &mut impl Rng) -> Field {
    let a0: f64 = rng.gen_range(0.2..0.8);
    let modes: Vec<(f64, f64)> = (1..=4)
        .map(|k| (rng.gen_range(-0.2..0.2) / k as f64, rng.gen_range(0.0..6.3)))
        .collect();
    g.sample(|x| {
        let s = modes.iter().enumerate().fold(a0, |acc, (k, (a, p))| {
            acc + a * ((k + 1) as f64 * std::f64::consts::PI * x / g.length + p).cos()
        });
        let bump = if g.bc == Bc::Dirichlet {
            (std::f64::consts::PI * x / g.length).sin()
        } else {
            1.0
        };
        top * s.clamp(0.02, 1.0) * bump
    })
}

/// Solves from `count` seeded random positive fields and returns the
/// distinct limits found (sup-distance above 1e-6).
pub fn multi_start(
    g: &Grid1D,
    m: &GrowthProfile,
    lambda: f64,
    d: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<Field>> {
    check_o(m, d)?;
    check_range(g, m, lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut limits: Vec<Field> = vec![];
    for _ in 0..count {
        let u0 = random_field(g, m.max, &mut rng);
        let (u, _, _) = solve_from(g, m, lambda, d, &u0)?;
        if !limits.iter().any(|l| sup_dist(l, &u) < 1e-6) {
            limits.push(u);
        }
    }
    Ok(limits)
}

/// u_λ ≈ α*(λ−λ*)[φ + (λ−λ*)ξ*] near λ* in case (A1).
#[derive(Debug, Clone)]
pub struct ExpansionA1 {
    pub lambda_star: f64,
    pub alpha_star: f64,
    /// Unit-L² principal eigenfunction.
    pub phi: Field,
    pub xi_star: Field,
    pub lambda: f64,
    pub u_approx: Field,
}

impl ExpansionA1 {
    pub fn approx(&self, lambda: f64) -> Field {
        let s = lambda - self.lambda_star;
        self.phi
            .iter()
            .zip(&self.xi_star)
            .map(|(p, x)| self.alpha_star * s * (p + s * x))
            .collect()
    }
}

/// Solves `S·x = rhs` on the unknowns subject to ∫c·x = 0, where S is a
/// tridiagonal operator whose weighted form W·S is symmetric.
fn bordered_solve(g: &Grid1D, s: &Tridiag<f64>, c: &[f64], rhs: &[f64]) -> Result<Field> {
    let r = g.dofs();
    let w = g.weights();
    let k = r.len();
    let ws = s.scale_rows(&w).slice(r.start, r.end);
    let a = faer::Mat::from_fn(k + 1, k + 1, |i, j| {
        if i < k && j < k {
            ws.get(i, j)
        } else if i < k {
            w[r.start + i] * c[r.start + i]
        } else if j < k {
            w[r.start + j] * c[r.start + j]
        } else {
            0.0
        }
    });
    let mut b: Vec<f64> = r.clone().map(|i| w[i] * rhs[i]).collect();
    b.push(0.0);
    let x = dense::solve(&a, &b);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SolverFailure("singular bordered system".into()));
    }
    let mut out = vec![0.0; g.n];
    for (kk, i) in r.enumerate() {
        out[i] = x[kk];
    }
    Ok(out)
}

pub fn expansion_a1(g: &Grid1D, m: &GrowthProfile, d: f64, lambda: f64) -> Result<ExpansionA1> {
    let eig = principal_weighted(g, m)?;
    let rp = compute_r(g, m, d, Normalization::UnitL2)?;
    if !(rp.r1 - rp.r2 > 0.0) {
        return Err(Error::HypothesisViolated(format!(
            "(H1) r1 - r2 > 0 fails: {}",
            rp.r1 - rp.r2
        )));
    }
    let phi = eig.phi.clone();
    let ls = eig.lambda_star;
    let sq: Vec<f64> = phi.iter().map(|p| p * p).collect();
    let alpha = g.dot(&m.samples, &sq) / (rp.r1 - rp.r2);
    let cd = g.cross_diffusion(&phi, &phi)?;
    let rhs: Vec<f64> = (0..g.n)
        .map(|i| -(alpha * d * cd[i] + (m.samples[i] - ls * alpha * phi[i]) * phi[i]))
        .collect();
    let mut s = g.laplacian_matrix();
    s.add_diag(&m.samples.iter().map(|v| ls * v).collect::<Vec<_>>());
    let xi = bordered_solve(g, &s, &phi, &rhs)?;
    let mut e = ExpansionA1 {
        lambda_star: ls,
        alpha_star: alpha,
        phi,
        xi_star: xi,
        lambda,
        u_approx: vec![],
    };
    e.u_approx = e.approx(lambda);
    Ok(e)
}

/// u_λ ≈ m̄ + λ(ρ + C) + λ²(γ + K) for small λ in case (A2).
#[derive(Debug, Clone)]
pub struct ExpansionA2 {
    pub mean: f64,
    pub rho: Field,
    pub cm: f64,
    pub gamma: Field,
    pub km: f64,
    /// ∫f_γ, which vanishes by the choice of C(m).
    pub solvability: f64,
}

impl ExpansionA2 {
    pub fn approx(&self, lambda: f64) -> Field {
        self.rho
            .iter()
            .zip(&self.gamma)
            .map(|(r, q)| self.mean + lambda * (r + self.cm) + lambda * lambda * (q + self.km))
            .collect()
    }
}

pub fn expansion_a2(g: &Grid1D, m: &GrowthProfile, d: f64) -> Result<ExpansionA2> {
    if g.bc != Bc::Neumann
        || !matches!(m.case, CaseTag::A2 | CaseTag::A2Constant)
        || !(m.mean > 0.0)
    {
        return Err(Error::UnsupportedProfile(
            "needs an (A2) profile with positive mean, Neumann".into(),
        ));
    }
    let mb = m.mean;
    let k = 1.0 + d * mb;
    if !(k > 0.0) {
        return Err(Error::AssumptionViolated(format!(
            "1 + D*mean = {k} is not positive"
        )));
    }
    let area = g.length;
    let ones = vec![1.0; g.n];
    let lk = g.laplacian_matrix().combine(k, &Tridiag::zeros(g.n), 0.0);
    let rhs: Vec<f64> = m.samples.iter().map(|v| -mb * (v - mb)).collect();
    let rho = bordered_solve(g, &lk, &ones, &rhs)?;
    let cm = k * g.gradient_energy(&rho) / (mb * mb * area);
    let cd = g.cross_diffusion(&rho, &rho)?;
    let lrho = g.laplacian(&rho);
    let f: Vec<f64> = (0..g.n)
        .map(|i| d * cd[i] + d * cm * lrho[i] + (rho[i] + cm) * (m.samples[i] - 2.0 * mb))
        .collect();
    let solvability = g.integrate(&f);
    if solvability.abs() > 1e-6 {
        return Err(Error::Consistency(format!(
            "integral of f_gamma is {solvability:e}"
        )));
    }
    let gamma = bordered_solve(g, &lk, &ones, &f.iter().map(|v| -v).collect::<Vec<_>>())?;
    let dev: Vec<f64> = m.samples.iter().map(|v| v - mb).collect();
    let sq: Vec<f64> = rho.iter().map(|r| (r + cm) * (r + cm)).collect();
    let km = (g.dot(&gamma, &dev) - g.integrate(&sq)) / (mb * area);
    Ok(ExpansionA2 {
        mean: mb,
        rho,
        cm,
        gamma,
        km,
        solvability,
    })
}
