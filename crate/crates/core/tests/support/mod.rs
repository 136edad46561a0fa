//! Scalar oracles shared by the integration tests.
#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use num_complex::Complex64 as C;
use std::f64::consts::PI;

/// Solves w + ln w = ln z (principal logarithms) by Newton from several
/// starts; this is the principal Lambert-W branch without forming z, which
/// overflows for strongly damped modes.
pub fn lambert_w0_log(log_z: C) -> Option<C> {
    let starts = [
        log_z - log_z.ln(),
        log_z,
        C::new(1.0, 1.0),
        C::new(-1.0, 1.0),
        C::new(0.5, 0.0),
        C::new(-0.3, 0.0),
    ];
    let mut best: Option<C> = None;
    for &w0 in &starts {
        let mut w = w0;
        if !(w.norm() > 0.0) || !w.re.is_finite() {
            continue;
        }
        let mut ok = false;
        for _ in 0..200 {
            let f = w + w.ln() - log_z;
            let dw = f / (C::new(1.0, 0.0) + 1.0 / w);
            let mut next = w - dw;
            // keep the iterate off the branch cut of ln
            if next.norm() == 0.0 || !next.re.is_finite() {
                break;
            }
            if next.im == 0.0 && next.re < 0.0 && log_z.im != 0.0 {
                next.im = 1e-12;
            }
            w = next;
            if dw.norm() < 1e-15 * (1.0 + w.norm()) {
                ok = true;
                break;
            }
        }
        let res = (w + w.ln() - log_z).norm();
        if ok && res < 1e-10 * (1.0 + log_z.norm()) && best.is_none_or(|b| w.re > b.re) {
            best = Some(w);
        }
    }
    best
}

/// Eigenvalue of the discrete Neumann Laplacian for cosine mode k.
pub fn kappa(k: usize, h: f64) -> f64 {
    -(4.0 / (h * h)) * (0.5 * k as f64 * h).sin().powi(2)
}

/// Rightmost root of μ = a + b·e^{−μτ}: μ = a + W₀(bτe^{−aτ})/τ.
pub fn scalar_delay_root(a: f64, b: f64, tau: f64) -> C {
    if tau == 0.0 || b == 0.0 {
        return C::new(a + b, 0.0);
    }
    let bt = C::new(b * tau, 0.0);
    let log_z = bt.ln() - a * tau;
    let w = lambert_w0_log(log_z).expect("lambert W did not converge");
    a + w / tau
}

/// Constant m̄ linearised at u = m̄, mode k: a = κ − λm̄, b = Dm̄κ.
pub fn constant_mode_root(k: usize, h: f64, mbar: f64, lambda: f64, d: f64, tau: f64) -> C {
    let kap = kappa(k, h);
    scalar_delay_root(kap - lambda * mbar, d * mbar * kap, tau)
}

/// Residual of μ − a − b·e^{−μτ}.
pub fn scalar_residual(mu: C, a: f64, b: f64, tau: f64) -> f64 {
    (mu - a - b * (-mu * tau).exp()).norm()
}

pub fn neumann_h(n: usize) -> f64 {
    PI / (n - 1) as f64
}
