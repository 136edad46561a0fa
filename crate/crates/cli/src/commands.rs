//! One function per command. Each writes its CSV/SVG artifacts into the
//! output directory and returns a JSON summary for run.json.

use crate::output::{num, opt, Table};
use crate::scenario::{ConfigError, Scenario, Setup};
use memodiff::bifurcation::{hopf_quantities, normalised, DEFAULT_TAU_COUNT};
use memodiff::dynamics::{default_history, simulate, SimOptions, SimTrace};
use memodiff::eigen::principal_weighted;
use memodiff::grid::{sup_norm, Grid1D};
use memodiff::plot::heatmap_svg;
use memodiff::spectrum::{
    delay_rightmost, find_crossing_lin, linearize, transversality_lin, SpectrumOptions,
};
use memodiff::steady::{multi_start, solve_steady, SteadyState};
use memodiff::Error;
use serde_json::{json, Value};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Model(Error),
    Io(std::io::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 64,
            Failure::Model(Error::InvalidArgument(_)) => 64,
            Failure::Model(e) if e.is_hypothesis() => 2,
            Failure::Model(_) | Failure::Io(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Config(e) => format!("config error: {e}"),
            Failure::Model(e) => e.to_string(),
            Failure::Io(e) => format!("io error: {e}"),
        }
    }
}

/// Shared inputs for a command.
pub struct Context<'a> {
    pub scenario: &'a Scenario,
    pub setup: Setup,
    pub out: &'a Path,
    pub seed: u64,
    pub threads: usize,
}

impl Context<'_> {
    fn norm(&self) -> &'static str {
        self.setup.normalization.label()
    }

    fn spectrum_options(&self) -> SpectrumOptions {
        let d = SpectrumOptions::default();
        SpectrumOptions {
            order: self.scenario.order.unwrap_or(d.order),
            modes: self.scenario.modes.unwrap_or(d.modes),
            ..d
        }
    }
}

/// D·max u, the quantity bounded by one in the well-posedness hypothesis.
fn d_max_u(d: f64, u: &[f64]) -> f64 {
    d * sup_norm(u)
}

pub fn eigen(cx: &Context) -> Result<Value, Failure> {
    let Setup {
        grid: g,
        profile: m,
        normalization,
    } = &cx.setup;
    let e = principal_weighted(g, m)?;
    let phi = normalised(g, &e.phi, *normalization);
    let mut t = Table::new(&["quantity", "x", "value", "normalization"]);
    let n = cx.norm();
    t.row([
        "lambda_star".into(),
        String::new(),
        num(e.lambda_star),
        n.into(),
    ]);
    t.row(["residual".into(), String::new(), num(e.residual), n.into()]);
    for (i, p) in phi.iter().enumerate() {
        t.row(["phi".into(), num(g.x(i)), num(*p), n.into()]);
    }
    t.write(&cx.out.join("eigen.csv"))?;
    Ok(
        json!({ "lambda_star": e.lambda_star, "residual": e.residual, "case": format!("{:?}", m.case) }),
    )
}

fn steady_for(cx: &Context, lambda: f64, d: f64) -> Result<SteadyState, Failure> {
    Ok(solve_steady(&cx.setup.grid, &cx.setup.profile, lambda, d)?)
}

pub fn steady(cx: &Context) -> Result<Value, Failure> {
    let sc = cx.scenario;
    let lambda = sc.require("lambda", sc.lambda)?;
    let d = sc.require("D", sc.d)?;
    let Setup {
        grid: g,
        profile: m,
        ..
    } = &cx.setup;
    let s = steady_for(cx, lambda, d)?;
    let starts = sc.starts.unwrap_or(10);
    let limits = multi_start(g, m, lambda, d, starts, cx.seed)?;
    let n = cx.norm();
    let mut t = Table::new(&["quantity", "x", "value", "normalization"]);
    let scalars = [
        ("integral_u", g.integrate(&s.u)),
        ("integral_m", g.integrate(&m.samples)),
        ("residual", s.residual),
        ("branch_gap", s.branch_gap),
        ("d_max_u", d_max_u(d, &s.u)),
        ("distinct_states", limits.len() as f64),
    ];
    for (k, v) in scalars {
        t.row([k.into(), String::new(), num(v), n.into()]);
    }
    for (i, u) in s.u.iter().enumerate() {
        t.row(["u".into(), num(g.x(i)), num(*u), n.into()]);
    }
    t.write(&cx.out.join("steady.csv"))?;
    if limits.len() > 1 {
        let mut t = Table::new(&["state", "x", "u"]);
        for (k, l) in limits.iter().enumerate() {
            for (i, u) in l.iter().enumerate() {
                t.row([k.to_string(), num(g.x(i)), num(*u)]);
            }
        }
        t.write(&cx.out.join("steady_multi.csv"))?;
    }
    Ok(json!({
        "residual": s.residual,
        "iterations": s.iterations,
        "branch_gap": s.branch_gap,
        "d_max_u": d_max_u(d, &s.u),
        "starts": starts,
        "distinct_states": limits.len(),
    }))
}

pub fn bifurcate(cx: &Context) -> Result<Value, Failure> {
    let sc = cx.scenario;
    let Setup {
        grid: g,
        profile: m,
        normalization,
    } = &cx.setup;
    let d = sc.d.unwrap_or(0.0);
    let eig = principal_weighted(g, m)?;
    // the leading-order quantities do not depend on λ beyond ω
    let lambda = sc.lambda.unwrap_or(eig.lambda_star + 0.1);
    let h = hopf_quantities(
        g,
        m,
        d,
        lambda,
        *normalization,
        sc.tau_count.unwrap_or(DEFAULT_TAU_COUNT),
    )?;
    let n = cx.norm();
    let mut t = Table::new(&["quantity", "index", "value", "normalization"]);
    let scalars = [
        ("lambda_star", Some(h.lambda_star)),
        ("lambda", Some(h.lambda)),
        ("D", Some(h.d)),
        ("r1", Some(h.r1)),
        ("r2", Some(h.r2)),
        ("r1_minus_r2", Some(h.r1 - h.r2)),
        ("r1_plus_r2", Some(h.r1 + h.r2)),
        ("dbar", Some(h.dbar)),
        ("alpha_star", Some(h.alpha_star)),
        ("theta_star", h.theta_star),
        ("h_star", h.h_star),
        ("omega", h.omega),
    ];
    for (k, v) in scalars {
        t.row([k.into(), String::new(), opt(v), n.into()]);
    }
    t.row([
        "region".into(),
        String::new(),
        h.region.label().into(),
        n.into(),
    ]);
    for (k, tau) in h.tau_list.iter().enumerate() {
        t.row(["tau".into(), k.to_string(), num(*tau), n.into()]);
    }
    t.write(&cx.out.join("hopf.csv"))?;
    Ok(json!({
        "r1": h.r1,
        "r2": h.r2,
        "dbar": h.dbar,
        "region": h.region.label(),
        "tau0": h.tau_list.first(),
    }))
}

pub fn spectrum(cx: &Context) -> Result<Value, Failure> {
    let sc = cx.scenario;
    let lambda = sc.require("lambda", sc.lambda)?;
    let d = sc.require("D", sc.d)?;
    let Setup {
        grid: g,
        profile: m,
        ..
    } = &cx.setup;
    let s = steady_for(cx, lambda, d)?;
    let lin = linearize(g, m, lambda, d, &s.u, 0.0);
    let opts = cx.spectrum_options();
    let taus = sc
        .sweep_tau
        .clone()
        .unwrap_or_else(|| vec![sc.tau.unwrap_or(0.0)]);
    let n = cx.norm();
    let mut t = Table::new(&[
        "tau",
        "re",
        "im",
        "residual",
        "refined",
        "method",
        "order",
        "order_converged",
        "normalization",
    ]);
    let mut rightmost = vec![];
    for &tau in &taus {
        let set = delay_rightmost(&lin, tau, &opts)?;
        for r in &set.roots {
            t.row([
                num(tau),
                num(r.mu.re),
                num(r.mu.im),
                num(r.residual),
                r.refined.to_string(),
                "pseudospectral".into(),
                set.order.to_string(),
                set.order_converged.to_string(),
                n.into(),
            ]);
        }
        rightmost
            .push(json!({ "tau": tau, "rightmost": set.rightmost().map(|r| [r.mu.re, r.mu.im]) }));
    }
    t.write(&cx.out.join("roots.csv"))?;
    let mut crossing = Value::Null;
    if let Some(tau_max) = sc.tau_max {
        let c = find_crossing_lin(&lin, tau_max, &opts)?;
        let mut t = Table::new(&["tau0", "omega0", "transversality", "normalization"]);
        if let Some(c) = c {
            let slope = transversality_lin(&lin, c.tau0, 0.01 * c.tau0, &opts).ok();
            t.row([num(c.tau0), num(c.omega0), opt(slope), n.into()]);
            crossing = json!({ "tau0": c.tau0, "omega0": c.omega0, "transversality": slope });
        }
        t.write(&cx.out.join("crossing.csv"))?;
    }
    Ok(json!({ "rightmost": rightmost, "crossing": crossing, "d_max_u": d_max_u(d, &s.u) }))
}

struct SimRun {
    trace: SimTrace,
    class: &'static str,
    period: Option<f64>,
    d_max_u: f64,
}

fn run_simulation(cx: &Context, lambda: f64, d: f64, tau: f64) -> Result<SimRun, Failure> {
    let sc = cx.scenario;
    let Setup {
        grid: g,
        profile: m,
        ..
    } = &cx.setup;
    let s = steady_for(cx, lambda, d)?;
    let init = default_history(g, &s.u);
    let base = SimOptions::default_for(tau);
    let opts = SimOptions {
        t_end: sc.t_end.unwrap_or(base.t_end),
        dt: sc.dt.unwrap_or(base.dt),
        reference: Some(s.u.clone()),
        ..base
    };
    let trace = simulate(g, m, lambda, d, tau, &|_| init.clone(), &opts)?;
    let a = trace.classify(0.5 * opts.t_end);
    let class = if trace.blowup.is_some() {
        "blowup"
    } else {
        a.class.label()
    };
    Ok(SimRun {
        trace,
        class,
        period: a.period,
        d_max_u: d_max_u(d, &s.u),
    })
}

const MAX_TRACE_ROWS: usize = 100_000;

fn write_trace(dir: &Path, g: &Grid1D, run: &SimRun, n: &str) -> Result<(), Failure> {
    let tr = &run.trace;
    let stride = tr.times.len().div_ceil(MAX_TRACE_ROWS).max(1);
    let mut t = Table::new(&["t", "deviation_sup", "probe", "normalization"]);
    for i in (0..tr.times.len()).step_by(stride) {
        t.row([
            num(tr.times[i]),
            num(tr.deviation[i]),
            num(tr.probe[i]),
            n.into(),
        ]);
    }
    t.write(&dir.join("trace.csv"))?;
    let title = format!("u(x,t), {}", run.class);
    std::fs::write(
        dir.join("heatmap.svg"),
        heatmap_svg(&tr.snapshots, g.length, &title),
    )?;
    Ok(())
}

fn sim_summary(run: &SimRun) -> Value {
    json!({
        "classification": run.class,
        "period": run.period,
        "blowup_time": run.trace.blowup,
        "first_negative_time": run.trace.first_negative,
        "fallback_used": run.trace.fallback_used,
        "dt": run.trace.dt,
        "lag_steps": run.trace.lag_steps,
        "probe_x": run.trace.probe_x,
        "d_max_u": run.d_max_u,
    })
}

pub fn simulate_cmd(cx: &Context) -> Result<Value, Failure> {
    let sc = cx.scenario;
    let lambda = sc.require("lambda", sc.lambda)?;
    let d = sc.require("D", sc.d)?;
    let tau = sc.require("tau", sc.tau)?;
    let run = run_simulation(cx, lambda, d, tau)?;
    write_trace(cx.out, &cx.setup.grid, &run, cx.norm())?;
    let summary = sim_summary(&run);
    run.trace.check()?;
    Ok(summary)
}

struct Entry {
    lambda: f64,
    d: f64,
    tau: f64,
}

/// Simulates every (λ, D, τ) of the sweep grid on a bounded pool and
/// writes `sweep.csv` with the observed class next to the predicted region.
pub fn sweep(cx: &Context) -> Result<Value, Failure> {
    let sc = cx.scenario;
    let lambdas = sc
        .sweep_lambda
        .clone()
        .map(Ok)
        .unwrap_or_else(|| sc.require("lambda", sc.lambda).map(|v| vec![v]))?;
    let ds = sc
        .sweep_d
        .clone()
        .map(Ok)
        .unwrap_or_else(|| sc.require("D", sc.d).map(|v| vec![v]))?;
    let taus = sc
        .sweep_tau
        .clone()
        .map(Ok)
        .unwrap_or_else(|| sc.require("tau", sc.tau).map(|v| vec![v]))?;
    let mut entries = vec![];
    for &lambda in &lambdas {
        for &d in &ds {
            for &tau in &taus {
                entries.push(Entry { lambda, d, tau });
            }
        }
    }
    let rows: Vec<Mutex<Option<Vec<String>>>> = entries.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = cx.threads.clamp(1, entries.len());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(e) = entries.get(k) else { break };
                let row = sweep_entry(cx, k, e);
                *rows[k].lock().unwrap() = Some(row);
            });
        }
    });
    let mut t = Table::new(&[
        "entry",
        "lambda",
        "D",
        "tau",
        "classification",
        "period",
        "region",
        "tau0_predicted",
        "d_max_u",
        "note",
        "normalization",
    ]);
    let mut table = vec![];
    for r in rows {
        let r = r.into_inner().unwrap().unwrap_or_default();
        table.push(json!({ "entry": r[0], "classification": r[4], "region": r[6] }));
        t.row(r);
    }
    t.write(&cx.out.join("sweep.csv"))?;
    Ok(json!({ "entries": table.len(), "workers": workers, "rows": table }))
}

fn sweep_entry(cx: &Context, k: usize, e: &Entry) -> Vec<String> {
    let Setup {
        grid: g,
        profile: m,
        normalization,
    } = &cx.setup;
    let n = cx.norm().to_string();
    let (region, tau0) = match hopf_quantities(g, m, e.d, e.lambda, *normalization, 1) {
        Ok(h) => (
            h.region.label().to_string(),
            opt(h.tau_list.first().copied()),
        ),
        Err(err) => (format!("n/a ({})", short(&err.to_string())), String::new()),
    };
    let dir = cx.out.join(format!("entry_{k:03}"));
    let (class, period, dmu, note) = match std::fs::create_dir_all(&dir)
        .map_err(Failure::from)
        .and_then(|_| run_simulation(cx, e.lambda, e.d, e.tau))
    {
        Ok(run) => {
            let note = match (run.trace.blowup, write_trace(&dir, g, &run, &n)) {
                (_, Err(err)) => short(&err.message()),
                (Some(t), _) => format!("instability detected at t = {t:.3}"),
                (None, _) => String::new(),
            };
            (
                run.class.to_string(),
                opt(run.period),
                num(run.d_max_u),
                note,
            )
        }
        Err(err) => (
            "error".into(),
            String::new(),
            String::new(),
            short(&err.message()),
        ),
    };
    vec![
        k.to_string(),
        num(e.lambda),
        num(e.d),
        num(e.tau),
        class,
        period,
        region,
        tau0,
        dmu,
        note,
        n,
    ]
}

/// CSV-safe one-line message.
fn short(s: &str) -> String {
    s.replace([',', '\n', '"'], ";")
}
