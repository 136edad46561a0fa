//! Time integration of uₜ = Δu + D∇·(u∇u_τ) + λu(m − u) and classification
//! of the long-time behaviour.
//!
//! IMEX Euler: (I − dt·Δ)uᵏ⁺¹ = uᵏ + dt·(D∇·(uᵏ∇uᵏ⁻ᴺ) + λuᵏ(m − uᵏ)) with
//! N = τ/dt, the delayed field read from a ring buffer.

use crate::error::{Error, Result};
use crate::expr::GrowthProfile;
use crate::grid::{sup_norm, Field, Grid1D};
use crate::tridiag::Tridiag;
use std::collections::VecDeque;

pub const BLOWUP: f64 = 1e6;
pub const MAX_SNAPSHOTS: usize = 512;
const NEGATIVE_TOL: f64 = -1e-8;
const FALLBACK_STEP_BUDGET: f64 = 2e6;

/// Past states on [t − τ, t] at spacing dt; the front is exactly at lag τ.
#[derive(Debug, Clone)]
pub struct History {
    buf: VecDeque<Field>,
}

impl History {
    pub fn new(lag_steps: usize, dt: f64, init: &dyn Fn(f64) -> Field) -> Self {
        let buf = (0..=lag_steps)
            .map(|j| init(-((lag_steps - j) as f64) * dt))
            .collect();
        History { buf }
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn lagged(&self) -> &Field {
        self.buf.front().unwrap()
    }

    pub fn current(&self) -> &Field {
        self.buf.back().unwrap()
    }

    pub fn push(&mut self, u: Field) {
        self.buf.push_back(u);
        self.buf.pop_front();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Converged,
    Oscillatory,
    Undecided,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::Converged => "converged",
            Classification::Oscillatory => "oscillatory",
            Classification::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attractor {
    pub class: Classification,
    pub period: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SimOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Steady state used as the reference for deviations.
    pub reference: Option<Field>,
    /// Position of the signed probe u(x_p, t) − u_λ(x_p).
    pub probe_x: Option<f64>,
    pub max_snapshots: usize,
    /// Retry with dt ≤ 0.25h²/(1+|D|max u) after a blow-up, within a step budget.
    pub stability_fallback: bool,
}

impl SimOptions {
    /// Horizon max(4τ, 400).
    pub fn default_for(tau: f64) -> Self {
        SimOptions {
            t_end: (4.0 * tau).max(400.0),
            dt: 0.05,
            reference: None,
            probe_x: None,
            max_snapshots: MAX_SNAPSHOTS,
            stability_fallback: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimTrace {
    pub dt: f64,
    pub lag_steps: usize,
    pub times: Vec<f64>,
    /// ‖u(·,t) − u_λ‖∞ (or ‖u‖∞ without a reference).
    pub deviation: Vec<f64>,
    pub probe: Vec<f64>,
    pub probe_x: f64,
    pub snapshots: Vec<(f64, Field)>,
    pub blowup: Option<f64>,
    pub first_negative: Option<f64>,
    pub fallback_used: bool,
    pub final_state: Field,
}

impl SimTrace {
    pub fn check(&self) -> Result<()> {
        match self.blowup {
            Some(t) => Err(Error::SolverFailure(format!(
                "instability detected at t = {t}"
            ))),
            None => Ok(()),
        }
    }

    pub fn classify(&self, t_transient: f64) -> Attractor {
        if self.blowup.is_some() {
            return Attractor {
                class: Classification::Undecided,
                period: None,
            };
        }
        classify_attractor(&self.times, &self.deviation, Some(&self.probe), t_transient)
    }
}

/// Step count and adjusted step so that τ/dt is an integer.
pub fn adjust_step(tau: f64, dt: f64) -> (usize, f64) {
    if tau == 0.0 {
        return (0, dt);
    }
    let n = (tau / dt - 1e-9).ceil().max(1.0) as usize;
    (n, tau / n as f64)
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    g: &Grid1D,
    m: &GrowthProfile,
    lambda: f64,
    d: f64,
    tau: f64,
    history0: &dyn Fn(f64) -> Field,
    opts: &SimOptions,
) -> Result<SimTrace> {
    if !(opts.dt > 0.0) || !(opts.t_end > 0.0) || !(tau >= 0.0) {
        return Err(Error::InvalidArgument(
            "need dt > 0, T > 0 and tau >= 0".into(),
        ));
    }
    let h0 = history0(0.0);
    if h0.len() != g.n {
        return Err(Error::InvalidArgument(
            "history field does not match grid".into(),
        ));
    }
    if g.dofs().any(|i| !(h0[i] > 0.0)) {
        return Err(Error::InvalidArgument(
            "initial history must be positive".into(),
        ));
    }
    let trace = run(g, m, lambda, d, tau, history0, opts, opts.dt)?;
    if trace.blowup.is_some() && opts.stability_fallback {
        let top = sup_norm(&h0).max(m.max);
        let dt = 0.25 * g.h * g.h / (1.0 + d.abs() * top);
        if dt < trace.dt && opts.t_end / dt <= FALLBACK_STEP_BUDGET {
            let mut t = run(g, m, lambda, d, tau, history0, opts, dt)?;
            t.fallback_used = true;
            return Ok(t);
        }
    }
    Ok(trace)
}

#[allow(clippy::too_many_arguments)]
fn run(
    g: &Grid1D,
    m: &GrowthProfile,
    lambda: f64,
    d: f64,
    tau: f64,
    history0: &dyn Fn(f64) -> Field,
    opts: &SimOptions,
    dt_req: f64,
) -> Result<SimTrace> {
    let (lag, dt) = adjust_step(tau, dt_req);
    let init = |t: f64| {
        let mut v = history0(t);
        g.pin(&mut v);
        v
    };
    let mut hist = History::new(lag, dt, &init);
    let r = g.dofs();
    let implicit = Tridiag::identity(g.n)
        .combine(1.0, &g.laplacian_matrix(), -dt)
        .slice(r.start, r.end)
        .lu()
        .ok_or_else(|| Error::SolverFailure("implicit diffusion matrix singular".into()))?;
    let nsteps = (opts.t_end / dt - 1e-9).ceil() as usize;
    let stride = nsteps.div_ceil(opts.max_snapshots.max(2) - 1).max(1);
    let probe_x = opts.probe_x.unwrap_or(0.2 * g.length);
    let pi = ((probe_x / g.h).round() as usize).min(g.n - 1);
    let zero = vec![0.0; g.n];
    let reference = opts.reference.as_ref().unwrap_or(&zero);
    let measure = |u: &Field| {
        let dev = u
            .iter()
            .zip(reference)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        (dev, u[pi] - reference[pi])
    };
    let mut trace = SimTrace {
        dt,
        lag_steps: lag,
        times: Vec::with_capacity(nsteps + 1),
        deviation: Vec::with_capacity(nsteps + 1),
        probe: Vec::with_capacity(nsteps + 1),
        probe_x: g.x(pi),
        snapshots: vec![],
        blowup: None,
        first_negative: None,
        fallback_used: false,
        final_state: vec![],
    };
    let (d0, p0) = measure(hist.current());
    trace.times.push(0.0);
    trace.deviation.push(d0);
    trace.probe.push(p0);
    trace.snapshots.push((0.0, hist.current().clone()));
    let mut rhs = vec![0.0; r.len()];
    for step in 1..=nsteps {
        let t = step as f64 * dt;
        let u = hist.current();
        let cd = g.cross_diffusion(u, hist.lagged())?;
        for (k, i) in r.clone().enumerate() {
            rhs[k] = u[i] + dt * (d * cd[i] + lambda * u[i] * (m.samples[i] - u[i]));
        }
        implicit.solve_in_place(&mut rhs);
        let mut next = vec![0.0; g.n];
        for (k, i) in r.clone().enumerate() {
            next[i] = rhs[k];
        }
        let bad = next.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP);
        if trace.first_negative.is_none() && next.iter().any(|&v| v < NEGATIVE_TOL) {
            trace.first_negative = Some(t);
        }
        if bad {
            trace.blowup = Some(t);
            break;
        }
        let (dv, pv) = measure(&next);
        trace.times.push(t);
        trace.deviation.push(dv);
        trace.probe.push(pv);
        if step % stride == 0 && trace.snapshots.len() < opts.max_snapshots {
            trace.snapshots.push((t, next.clone()));
        }
        hist.push(next);
    }
    trace.final_state = hist.current().clone();
    Ok(trace)
}

/// Default history u_λ(1 + 0.05cos(πx/L)), constant in time.
pub fn default_history(g: &Grid1D, steady: &[f64]) -> Field {
    let mut v: Field = (0..g.n)
        .map(|i| steady[i] * (1.0 + 0.05 * (std::f64::consts::PI * g.x(i) / g.length).cos()))
        .collect();
    g.pin(&mut v);
    v
}

/// Converged if the final deviation is below 1e−4 of the initial one;
/// oscillatory if at least five post-transient peaks of the signal (the
/// signed probe when given) have successive ratios in [0.98, 1.02] and
/// height above 1e−3; otherwise undecided. A peak is the maximum of one
/// complete excursion above the post-transient mean, so harmonics inside a
/// cycle do not count as separate peaks.
pub fn classify_attractor(
    times: &[f64],
    deviation: &[f64],
    probe: Option<&[f64]>,
    t_transient: f64,
) -> Attractor {
    let undecided = Attractor {
        class: Classification::Undecided,
        period: None,
    };
    let (Some(&t_end), Some(&first), Some(&last)) =
        (times.last(), deviation.first(), deviation.last())
    else {
        return undecided;
    };
    if t_end < 2.0 * t_transient || times.len() < 3 {
        return undecided;
    }
    if last < 1e-4 * first {
        return Attractor {
            class: Classification::Converged,
            period: None,
        };
    }
    let s = probe.unwrap_or(deviation);
    let start = times
        .iter()
        .position(|&t| t >= t_transient)
        .unwrap_or(times.len());
    let peaks = excursion_peaks(&times[start..], &s[start..]);
    if peaks.len() < 5 {
        return undecided;
    }
    let steady_heights = peaks.windows(2).all(|w| {
        let q = w[1].1 / w[0].1;
        (0.98..=1.02).contains(&q)
    });
    if steady_heights && peaks.iter().all(|p| p.1 > 1e-3) {
        let period = (peaks.last().unwrap().0 - peaks[0].0) / (peaks.len() - 1) as f64;
        return Attractor {
            class: Classification::Oscillatory,
            period: Some(period),
        };
    }
    undecided
}

/// (time, height above zero) of the maximum of each complete excursion
/// above the window mean.
fn excursion_peaks(times: &[f64], s: &[f64]) -> Vec<(f64, f64)> {
    if s.len() < 3 {
        return vec![];
    }
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    let mut peaks = vec![];
    let mut current: Option<(f64, f64)> = None;
    // an excursion already in progress at the window start is incomplete
    let mut complete = s[0] <= mean;
    for (&t, &v) in times.iter().zip(s) {
        if v > mean {
            let c = current.get_or_insert((t, v));
            if v > c.1 {
                *c = (t, v);
            }
        } else {
            if let Some(p) = current.take() {
                if complete && p.1 > 0.0 {
                    peaks.push(p);
                }
            }
            complete = true;
        }
    }
    peaks
}

/// Least-squares slope of ln s(t) over [t0, t1].
pub fn log_rate(times: &[f64], s: &[f64], t0: f64, t1: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(s)
        .filter(|(t, v)| **t >= t0 && **t <= t1 && **v > 0.0)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mt, my) = pts
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |a, p| {
        (a.0 + (p.0 - mt) * (p.1 - my), a.1 + (p.0 - mt).powi(2))
    });
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::profile_from_str;
    use crate::grid::Bc;
    use std::f64::consts::PI;

    #[test]
    fn step_adjustment() {
        let (n, dt) = adjust_step(10.0, 0.3);
        assert_eq!(n, 34);
        assert!((dt * n as f64 - 10.0).abs() < 1e-12 && dt <= 0.3);
        assert_eq!(adjust_step(0.0, 0.1), (0, 0.1));
        assert_eq!(adjust_step(1.0, 0.1).0, 10);
    }

    #[test]
    fn ring_buffer_lag() {
        let mut h = History::new(4, 0.5, &|t| vec![t]);
        assert_eq!(h.len(), 5);
        assert_eq!(h.lagged()[0], -2.0);
        assert_eq!(h.current()[0], 0.0);
        h.push(vec![0.5]);
        assert_eq!(h.lagged()[0], -1.5);
        assert_eq!(h.len(), 5);
    }

    #[test]
    fn equilibrium_is_preserved() {
        let g = Grid1D::new(PI, 51, Bc::Neumann).unwrap();
        let m = profile_from_str("4", &g).unwrap();
        let opts = SimOptions {
            t_end: 20.0,
            dt: 0.1,
            reference: Some(vec![4.0; 51]),
            ..SimOptions::default_for(3.0)
        };
        let tr = simulate(&g, &m, 0.7, 0.3, 3.0, &|_| vec![4.0; 51], &opts).unwrap();
        assert!(tr.deviation.iter().all(|&v| v < 1e-10));
        assert!(tr.final_state.iter().all(|&v| (v - 4.0).abs() < 1e-10));
        assert!(tr.snapshots.len() <= MAX_SNAPSHOTS);
    }

    #[test]
    fn mass_identity() {
        let g = Grid1D::new(PI, 41, Bc::Neumann).unwrap();
        let m = profile_from_str("sin(x)+1", &g).unwrap();
        let init = |t: f64| g.sample(|x| 1.0 + 0.3 * x.cos() + 0.1 * t);
        let opts = SimOptions {
            t_end: 0.5,
            dt: 0.01,
            max_snapshots: 1000,
            ..SimOptions::default_for(0.2)
        };
        let tr = simulate(&g, &m, 0.8, 0.3, 0.2, &init, &opts).unwrap();
        for w in tr.snapshots.windows(2) {
            let (u0, u1) = (&w[0].1, &w[1].1);
            let react: Vec<f64> = (0..41)
                .map(|i| 0.8 * u0[i] * (m.samples[i] - u0[i]))
                .collect();
            let lhs = (g.integrate(u1) - g.integrate(u0)) / tr.dt;
            assert!((lhs - g.integrate(&react)).abs() < 1e-9);
        }
    }

    #[test]
    fn classify_synthetic() {
        let t: Vec<f64> = (0..=4000).map(|k| k as f64 * 0.1).collect();
        let decay: Vec<f64> = t.iter().map(|s| (-0.05 * s).exp()).collect();
        assert_eq!(
            classify_attractor(&t, &decay, None, 200.0).class,
            Classification::Converged
        );
        let wave: Vec<f64> = t
            .iter()
            .map(|s| 0.1 * (2.0 * PI * s / 17.0).sin())
            .collect();
        let a = classify_attractor(
            &t,
            &wave.iter().map(|v| v.abs() + 0.05).collect::<Vec<_>>(),
            Some(&wave),
            200.0,
        );
        assert_eq!(a.class, Classification::Oscillatory);
        assert!((a.period.unwrap() - 17.0).abs() < 0.02 * 17.0);
        let a = classify_attractor(
            &t,
            &wave.iter().map(|v| v + 0.2).collect::<Vec<_>>(),
            None,
            200.0,
        );
        assert_eq!(a.class, Classification::Oscillatory);
        assert_eq!(
            classify_attractor(&t, &decay, None, 300.0).class,
            Classification::Undecided
        );
        // a third harmonic puts several local maxima in each cycle
        let rich: Vec<f64> = t
            .iter()
            .map(|s| (2.0 * PI * s / 23.0).sin() + 0.6 * (6.0 * PI * s / 23.0).sin())
            .collect();
        let a = classify_attractor(
            &t,
            &rich.iter().map(|v| v.abs()).collect::<Vec<_>>(),
            Some(&rich),
            200.0,
        );
        assert_eq!(a.class, Classification::Oscillatory);
        assert!((a.period.unwrap() - 23.0).abs() < 0.02 * 23.0);
        let slow: Vec<f64> = t
            .iter()
            .map(|s| (-0.001 * s).exp() * (0.3 * s).sin())
            .collect();
        assert_eq!(
            classify_attractor(
                &t,
                &slow.iter().map(|v| v.abs()).collect::<Vec<_>>(),
                Some(&slow),
                200.0
            )
            .class,
            Classification::Undecided
        );
    }

    #[test]
    fn fitted_rate() {
        let t: Vec<f64> = (0..100).map(|k| k as f64).collect();
        let s: Vec<f64> = t.iter().map(|x| 3.0 * (-0.02 * x).exp()).collect();
        assert!((log_rate(&t, &s, 10.0, 90.0).unwrap() + 0.02).abs() < 1e-12);
    }
}
