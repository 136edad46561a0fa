//! Browser bindings: principal eigenvalue and bifurcation scalars for a
//! typed m(x), a space-time simulation rendered as SVG, and the rightmost
//! characteristic root as a function of τ.

// NaN must fail these checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use memodiff::bifurcation::{compute_r, critical_d, region_of, Normalization};
use memodiff::dynamics::{default_history, simulate, SimOptions};
use memodiff::eigen::principal_weighted;
use memodiff::expr::{profile_from_str, GrowthProfile};
use memodiff::grid::{sup_norm, Bc, Grid1D};
use memodiff::plot::heatmap_svg;
use memodiff::spectrum::{linearize, rightmost_root, SpectrumOptions};
use memodiff::steady::solve_steady;
use std::f64::consts::PI;
use wasm_bindgen::prelude::*;

const MAX_N: usize = 401;

fn setup(m: &str, bc: &str, n: usize) -> Result<(Grid1D, GrowthProfile), JsError> {
    let bc = match bc {
        "neumann" => Bc::Neumann,
        "dirichlet" => Bc::Dirichlet,
        other => {
            return Err(JsError::new(&format!(
                "unknown boundary condition {other:?}"
            )))
        }
    };
    if n > MAX_N {
        return Err(JsError::new(&format!(
            "n is limited to {MAX_N} in the browser"
        )));
    }
    let g = Grid1D::new(PI, n, bc).map_err(js)?;
    let p = profile_from_str(m, &g).map_err(js)?;
    Ok((g, p))
}

fn js(e: memodiff::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Scalars {
    pub lambda_star: f64,
    pub r1: f64,
    pub r2: f64,
    pub dbar: f64,
    case: String,
    region: String,
}

#[wasm_bindgen]
impl Scalars {
    #[wasm_bindgen(getter)]
    pub fn case(&self) -> String {
        self.case.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn region(&self) -> String {
        self.region.clone()
    }
}

/// λ*, r₁, r₂ and D̄ at the given normalization ("unit-l2" or "raw").
#[wasm_bindgen]
pub fn scalars(
    m: &str,
    bc: &str,
    n: usize,
    d: f64,
    normalization: &str,
) -> Result<Scalars, JsError> {
    let (g, p) = setup(m, bc, n)?;
    let norm = Normalization::parse(normalization)
        .ok_or_else(|| JsError::new("normalization must be unit-l2 or raw"))?;
    let e = principal_weighted(&g, &p).map_err(js)?;
    let r = compute_r(&g, &p, d, norm).map_err(js)?;
    let dbar = critical_d(&g, &p, norm).map_err(js)?;
    Ok(Scalars {
        lambda_star: e.lambda_star,
        r1: r.r1,
        r2: r.r2,
        dbar,
        case: format!("{:?}", p.case),
        region: region_of(r.r1, r.r2).label().to_string(),
    })
}

#[wasm_bindgen]
pub struct Run {
    svg: String,
    class: String,
    pub d_max_u: f64,
}

#[wasm_bindgen]
impl Run {
    #[wasm_bindgen(getter)]
    pub fn svg(&self) -> String {
        self.svg.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn class(&self) -> String {
        self.class.clone()
    }
}

/// Simulates from the default history and returns the space-time heatmap.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn run(
    m: &str,
    bc: &str,
    n: usize,
    lambda: f64,
    d: f64,
    tau: f64,
    t_end: f64,
    dt: f64,
) -> Result<Run, JsError> {
    let (g, p) = setup(m, bc, n)?;
    if !(t_end / dt <= 2e6) {
        return Err(JsError::new("too many time steps for the browser"));
    }
    let s = solve_steady(&g, &p, lambda, d).map_err(js)?;
    let init = default_history(&g, &s.u);
    let opts = SimOptions {
        t_end,
        dt,
        reference: Some(s.u.clone()),
        ..SimOptions::default_for(tau)
    };
    let tr = simulate(&g, &p, lambda, d, tau, &|_| init.clone(), &opts).map_err(js)?;
    let class = match tr.blowup {
        Some(t) => format!("instability detected at t = {t:.1}"),
        None => tr.classify(0.5 * t_end).class.label().to_string(),
    };
    let svg = heatmap_svg(&tr.snapshots, g.length, &format!("u(x,t): {class}"));
    Ok(Run {
        svg,
        class,
        d_max_u: d * sup_norm(&s.u),
    })
}

/// Rightmost root at `steps` + 1 equally spaced delays in [0, τ_max],
/// flattened as (τ, Re μ, Im μ) triples.
#[wasm_bindgen]
pub fn rightmost_curve(
    m: &str,
    bc: &str,
    n: usize,
    lambda: f64,
    d: f64,
    tau_max: f64,
    steps: usize,
) -> Result<Vec<f64>, JsError> {
    let (g, p) = setup(m, bc, n)?;
    if !(tau_max > 0.0) || steps == 0 || steps > 400 {
        return Err(JsError::new("need tau_max > 0 and 1 <= steps <= 400"));
    }
    let s = solve_steady(&g, &p, lambda, d).map_err(js)?;
    let lin = linearize(&g, &p, lambda, d, &s.u, 0.0);
    let opts = SpectrumOptions {
        check_order: false,
        ..Default::default()
    };
    let mut out = Vec::with_capacity(3 * (steps + 1));
    for k in 0..=steps {
        let tau = tau_max * k as f64 / steps as f64;
        let r = rightmost_root(&lin, tau, &opts).map_err(js)?;
        out.extend([tau, r.mu.re, r.mu.im.abs()]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_scalars() {
        let s = scalars("4", "dirichlet", 201, 0.7, "raw").ok().unwrap();
        assert!((s.lambda_star - 0.25).abs() < 1e-3);
        assert!((s.dbar - 0.5).abs() < 1e-3);
        assert_eq!(s.region(), "II");
    }

    #[test]
    fn curve_crosses_zero() {
        let c = rightmost_curve("4", "dirichlet", 41, 0.35, 0.7, 60.0, 6)
            .ok()
            .unwrap();
        assert_eq!(c.len(), 21);
        assert!(c[1] < 0.0 && c[19] > 0.0);
    }

    #[test]
    fn small_run_converges() {
        let r = run("sin(x)+1", "neumann", 41, 0.8, 0.3, 2.0, 200.0, 0.1)
            .ok()
            .unwrap();
        assert_eq!(r.class(), "converged");
        assert!(r.svg().starts_with("<svg"));
    }
}
