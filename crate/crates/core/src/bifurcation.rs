//! Scalar bifurcation quantities near λ*: r₁, r₂, the critical memory rate
//! D̄, the Hopf angle and frequency, the delay sequence τₙ and the region of
//! the (r₁, r₂) plane.

use crate::eigen::{principal_weighted, sup_normalised, PrincipalEig};
use crate::error::{Error, Result};
use crate::expr::{CaseTag, GrowthProfile};
use crate::grid::{Bc, Field, Grid1D};
use std::f64::consts::PI;
use std::fmt;

/// Scale of the principal eigenfunction. `UnitL2` has ∫φ² = 1; `Raw` has
/// max φ = 1, which is the scale of φ = sin x in the Dirichlet example and
/// the scale at which r₁ ≈ 0.0755 for m = −x³ + 5 under Neumann conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    UnitL2,
    Raw,
}

impl Normalization {
    pub fn label(self) -> &'static str {
        match self {
            Normalization::UnitL2 => "unit-l2",
            Normalization::Raw => "raw",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unit-l2" => Some(Normalization::UnitL2),
            "raw" => Some(Normalization::Raw),
            _ => None,
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn normalised(g: &Grid1D, phi: &[f64], norm: Normalization) -> Field {
    match norm {
        Normalization::Raw => sup_normalised(phi),
        Normalization::UnitL2 => {
            let s = g.norm_l2(phi);
            phi.iter().map(|v| v / s).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RPair {
    pub r1: f64,
    /// −D∫φ|∇φ|².
    pub r2: f64,
    /// D∫φ∇·(φ∇φ) by direct quadrature, for cross-checking `r2`.
    pub r2_direct: f64,
    /// ∫φ|∇φ|², so that r₂ = −D·grad_energy.
    pub grad_energy: f64,
    pub normalization: Normalization,
}

fn require_r_case(g: &Grid1D, m: &GrowthProfile) -> Result<()> {
    if g.bc == Bc::Neumann && m.case != CaseTag::A1 {
        return Err(Error::UnsupportedProfile(format!(
            "r1 and r2 need an (A1) profile under Neumann conditions, got {:?}",
            m.case
        )));
    }
    Ok(())
}

pub fn r_from_eig(g: &Grid1D, eig: &PrincipalEig, d: f64, norm: Normalization) -> RPair {
    let phi = normalised(g, &eig.phi, norm);
    let cube: Vec<f64> = phi.iter().map(|p| p * p * p).collect();
    let r1 = eig.lambda_star * g.integrate(&cube);
    let grad_energy = g.weighted_gradient_energy(&phi);
    let cd = g.cross_diffusion(&phi, &phi).expect("grid-aligned fields");
    let r2_direct = d * g.dot(&phi, &cd);
    RPair {
        r1,
        r2: -d * grad_energy,
        r2_direct,
        grad_energy,
        normalization: norm,
    }
}

pub fn compute_r(g: &Grid1D, m: &GrowthProfile, d: f64, norm: Normalization) -> Result<RPair> {
    require_r_case(g, m)?;
    let eig = principal_weighted(g, m)?;
    let r = r_from_eig(g, &eig, d, norm);
    if (r.r2 - r.r2_direct).abs() > 1e-6 * (1.0 + r.r2.abs()) {
        return Err(Error::Consistency(format!(
            "r2 by parts {} differs from direct quadrature {}",
            r.r2, r.r2_direct
        )));
    }
    Ok(r)
}

/// D̄ solving r₁ + r₂(D̄) = 0. Independent of the normalization because r₁
/// and r₂ both scale cubically with φ.
pub fn critical_d(g: &Grid1D, m: &GrowthProfile, norm: Normalization) -> Result<f64> {
    let r = compute_r(g, m, 1.0, norm)?;
    if !(r.grad_energy > 1e-14) {
        return Err(Error::DegenerateProfile("∫φ|∇φ|² vanishes".into()));
    }
    Ok(r.r1 / r.grad_energy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    I,
    II,
    III,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
        }
    }
}

pub fn region_of(r1: f64, r2: f64) -> Region {
    if r1 - r2 <= 0.0 {
        Region::III
    } else if r1 + r2 > 0.0 {
        Region::I
    } else {
        Region::II
    }
}

#[derive(Debug, Clone)]
pub struct HopfData {
    pub lambda_star: f64,
    pub lambda: f64,
    pub d: f64,
    pub r1: f64,
    pub r2: f64,
    pub dbar: f64,
    /// ∫mφ²/(r₁−r₂) at the same normalization.
    pub alpha_star: f64,
    pub theta_star: Option<f64>,
    pub h_star: Option<f64>,
    pub omega: Option<f64>,
    pub tau_list: Vec<f64>,
    pub region: Region,
    pub normalization: Normalization,
}

pub const DEFAULT_TAU_COUNT: usize = 6;

/// Leading-order Hopf data. Region I yields no delays; region III and
/// λ ≤ λ* are hypothesis violations.
pub fn hopf_quantities(
    g: &Grid1D,
    m: &GrowthProfile,
    d: f64,
    lambda: f64,
    norm: Normalization,
    n_tau: usize,
) -> Result<HopfData> {
    require_r_case(g, m)?;
    let eig = principal_weighted(g, m)?;
    let r = r_from_eig(g, &eig, d, norm);
    let phi = normalised(g, &eig.phi, norm);
    let sq: Vec<f64> = phi.iter().map(|p| p * p).collect();
    let m_phi2 = g.dot(&m.samples, &sq);
    let phi2 = g.integrate(&sq);
    let (r1, r2) = (r.r1, r.r2);
    let region = region_of(r1, r2);
    if region == Region::III {
        return Err(Error::HypothesisViolated(format!(
            "(H1) r1 - r2 > 0 fails: r1 - r2 = {}",
            r1 - r2
        )));
    }
    if !(lambda > eig.lambda_star) {
        return Err(Error::HypothesisViolated(format!(
            "lambda > lambda* fails: lambda = {lambda}, lambda* = {}",
            eig.lambda_star
        )));
    }
    let dbar = if r.grad_energy > 0.0 {
        r1 / r.grad_energy
    } else {
        f64::INFINITY
    };
    let mut out = HopfData {
        lambda_star: eig.lambda_star,
        lambda,
        d,
        r1,
        r2,
        dbar,
        alpha_star: m_phi2 / (r1 - r2),
        theta_star: None,
        h_star: None,
        omega: None,
        tau_list: vec![],
        region,
        normalization: norm,
    };
    if region == Region::II {
        let theta = (r1 / r2).acos();
        let h = ((r1 + r2) / (r2 - r1)).sqrt() * m_phi2 / phi2;
        let omega = h * (lambda - eig.lambda_star);
        out.tau_list = (0..n_tau)
            .map(|k| (theta + 2.0 * PI * k as f64) / omega)
            .collect();
        out.theta_star = Some(theta);
        out.h_star = Some(h);
        out.omega = Some(omega);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::profile_from_str;

    fn dirichlet4() -> (Grid1D, GrowthProfile) {
        let g = Grid1D::new(PI, 201, Bc::Dirichlet).unwrap();
        let m = profile_from_str("4", &g).unwrap();
        (g, m)
    }

    #[test]
    fn dirichlet_closed_form_values() {
        let (g, m) = dirichlet4();
        let r = compute_r(&g, &m, 0.7, Normalization::Raw).unwrap();
        assert!((r.r1 - 1.0 / 3.0).abs() < 1e-4, "{}", r.r1);
        assert!((r.r2 + 7.0 / 15.0).abs() < 1e-4, "{}", r.r2);
        assert!((r.r1 - r.r2 - 0.8).abs() < 1e-4);
        assert!((r.r1 + r.r2 + 2.0 / 15.0).abs() < 1e-4);
        assert!((critical_d(&g, &m, Normalization::Raw).unwrap() - 0.5).abs() < 1e-4);
    }

    #[test]
    fn dbar_is_normalization_free() {
        let g = Grid1D::new(PI, 201, Bc::Neumann).unwrap();
        let m = profile_from_str("-x^3+5", &g).unwrap();
        let a = critical_d(&g, &m, Normalization::Raw).unwrap();
        let b = critical_d(&g, &m, Normalization::UnitL2).unwrap();
        assert!((a - b).abs() < 1e-10 * a);
    }

    #[test]
    fn r2_vanishes_without_memory() {
        let g = Grid1D::new(PI, 101, Bc::Neumann).unwrap();
        let m = profile_from_str("-x^3+5", &g).unwrap();
        let r = compute_r(&g, &m, 0.0, Normalization::UnitL2).unwrap();
        assert_eq!(r.r2, 0.0);
        assert!(r.r1 > 0.0);
    }

    #[test]
    fn r2_cross_check_and_normalisation_scaling() {
        let g = Grid1D::new(PI, 151, Bc::Neumann).unwrap();
        let m = profile_from_str("-x^3+5", &g).unwrap();
        let a = compute_r(&g, &m, 0.8, Normalization::UnitL2).unwrap();
        let b = compute_r(&g, &m, 0.8, Normalization::Raw).unwrap();
        assert!((a.r2 - a.r2_direct).abs() < 1e-10);
        let eig = principal_weighted(&g, &m).unwrap();
        let s = crate::grid::sup_norm(&eig.phi);
        // both scale with the cube of the eigenfunction scale
        assert!((b.r1 * s.powi(3) - a.r1).abs() < 1e-10);
        assert!((b.r2 * s.powi(3) - a.r2).abs() < 1e-10);
    }

    #[test]
    fn dbar_matches_root_finder() {
        let g = Grid1D::new(PI, 101, Bc::Neumann).unwrap();
        for src in ["-x^3+5", "2*(-x^3+5)"] {
            let m = profile_from_str(src, &g).unwrap();
            let dbar = critical_d(&g, &m, Normalization::UnitL2).unwrap();
            let f = |d: f64| {
                let r = compute_r(&g, &m, d, Normalization::UnitL2).unwrap();
                r.r1 + r.r2
            };
            let (mut lo, mut hi) = (0.0, 10.0);
            assert!(f(lo) > 0.0 && f(hi) < 0.0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    lo = mid
                } else {
                    hi = mid
                }
            }
            assert!((0.5 * (lo + hi) - dbar).abs() < 1e-8);
        }
    }

    #[test]
    fn hopf_dirichlet_closed_form() {
        let (g, m) = dirichlet4();
        let h = hopf_quantities(&g, &m, 0.7, 0.35, Normalization::Raw, 6).unwrap();
        assert_eq!(h.region, Region::II);
        let theta = h.theta_star.unwrap();
        assert!((theta - (-5.0f64 / 7.0).acos()).abs() < 1e-4);
        assert!((h.h_star.unwrap() - 4.0 / 6.0f64.sqrt()).abs() < 1e-3);
        assert!((h.omega.unwrap() - 0.16330).abs() < 1e-3);
        assert!((h.tau_list[0] - 14.49).abs() < 0.05, "{}", h.tau_list[0]);
        assert!(theta > PI / 2.0 && theta < PI);
        for w in h.tau_list.windows(2) {
            assert!((w[1] - w[0] - 2.0 * PI / h.omega.unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn hopf_regions_for_cubic_profile() {
        let g = Grid1D::new(PI, 201, Bc::Neumann).unwrap();
        let m = profile_from_str("-x^3+5", &g).unwrap();
        let a = hopf_quantities(&g, &m, 0.3, 0.6, Normalization::Raw, 6).unwrap();
        assert_eq!(a.region, Region::I);
        assert!(a.tau_list.is_empty() && a.theta_star.is_none());
        let b = hopf_quantities(&g, &m, 0.8, 0.6, Normalization::Raw, 6).unwrap();
        assert_eq!(b.region, Region::II);
        assert!(b.tau_list[0] > 0.0);
        assert!(b.h_star.unwrap() > 0.0);
        // the leading-order angle and frequency do not depend on the scale of φ
        let c = hopf_quantities(&g, &m, 0.8, 0.6, Normalization::UnitL2, 6).unwrap();
        assert!((b.theta_star.unwrap() - c.theta_star.unwrap()).abs() < 1e-10);
        assert!((b.h_star.unwrap() - c.h_star.unwrap()).abs() < 1e-10);
        assert!(matches!(
            hopf_quantities(&g, &m, 0.8, 0.01, Normalization::Raw, 6),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn region_rules() {
        assert_eq!(region_of(1.0, 0.5), Region::I);
        assert_eq!(region_of(1.0, -0.5), Region::I);
        assert_eq!(region_of(1.0, -1.5), Region::II);
        assert_eq!(region_of(1.0, 1.5), Region::III);
    }
}
