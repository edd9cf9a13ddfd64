//! Runners for the pipe modules: the coupled solver, the div-curl
//! verification, wall tracing and the compatibility vectors.

use inflow_pipe::boundary::PipeBoundaryData;
use inflow_pipe::compat::{check_compatibility, CompatOptions};
use inflow_pipe::divcurl::{DivCurlOptions, DivCurlSolver};
use inflow_pipe::euler::{euler_solve, EulerConfig, EulerSolution};
use inflow_pipe::grid::{Grid3, VectorField3};
use inflow_pipe::presets::{compat_vectors, manufactured_divcurl, swirl_initial, wall_tangent_flow};
use inflow_pipe::profile::ShearProfile;
use inflow_pipe::trace::lateral_invariance_check;

use crate::config::{BoundaryConfig, ExperimentConfig, ProfileConfig};
use crate::error::Result;
use crate::report::{Check, Table, Verdict};
use crate::run::{grids_or, Outcome};

pub fn pipe3d(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.preset.as_str() {
        "compat-vectors" => compat(cfg),
        "divcurl-manufactured" => divcurl(cfg),
        _ => coupled(cfg),
    }
}

fn profile_of(cfg: &ExperimentConfig) -> ShearProfile {
    let default = if cfg.preset == "plug-pulse" {
        ProfileConfig::Plug { c: 1.0 }
    } else {
        ProfileConfig::ProductCosine { c: 2.0 }
    };
    match cfg.profile.unwrap_or(default) {
        ProfileConfig::Plug { c } => ShearProfile::Plug { c },
        ProfileConfig::CosineShear { c, m } => ShearProfile::CosineShear { c, m },
        ProfileConfig::ProductCosine { c } => ShearProfile::ProductCosine { c },
    }
}

/// Largest gap between two series sampled at the same times, relative to
/// the peak of the second.
pub fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    let peak = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let gap = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if peak > 0.0 {
        gap / peak
    } else {
        gap
    }
}

fn level_series(n: usize, s: &EulerSolution) -> Table {
    let mut t = Table::new(
        format!("norms_n{n}"),
        &["t", "v_w2p", "dtv_w1p", "div_omega", "omega_tangential", "momentum_residual"],
    );
    for d in &s.report.levels {
        t.push(&[d.t, d.v_w2p, d.dtv_w1p, d.div_omega, d.tangential, d.momentum]);
    }
    t
}

fn outer_table(n: usize, s: &EulerSolution) -> Table {
    let r = &s.report;
    let mut t = Table::new(
        format!("outer_n{n}"),
        &["iteration", "omega_distance", "velocity_distance", "outer_ratio", "inner_sweeps", "max_inner_ratio"],
    );
    for (i, (dw, dv)) in r.omega_distances.iter().zip(&r.velocity_distances).enumerate() {
        let ratio = if i == 0 { f64::NAN } else { r.outer_ratios[i - 1] };
        let inner = r.inner_ratios.get(i).map_or(&[][..], |v| &v[..]);
        let max_inner = inner.iter().copied().fold(0.0f64, f64::max);
        t.push(&[(i + 1) as f64, *dw, *dv, ratio, (inner.len() + 1) as f64, max_inner]);
    }
    t
}

fn monitor_table(n: usize, s: &EulerSolution) -> Table {
    let r = &s.report;
    let mut t = Table::new(format!("monitors_n{n}"), &["value", "tolerance", "passed"]);
    for (name, m) in [("div_omega", &r.div_omega), ("omega_tangential", &r.tangential), ("momentum", &r.momentum)] {
        t.push_labeled(name, &[m.value, m.tolerance, if m.passed { 1.0 } else { 0.0 }]);
    }
    t
}

/// The coupled perturbation problem on each grid. The finest grid decides
/// the monitors and the contraction; the W^{2,p} series of the two finest
/// grids are compared.
fn coupled(cfg: &ExperimentConfig) -> Result<Outcome> {
    let grids = grids_or(cfg, &[16, 32]);
    let amplitude = cfg.amplitude.unwrap_or(1e-3);
    let profile = profile_of(cfg);
    let swirl = cfg.preset != "plug-pulse";
    let base = EulerConfig::default();
    let ec = EulerConfig {
        horizon: cfg.horizon.unwrap_or(base.horizon),
        dt: cfg.dt.unwrap_or(base.dt),
        p: cfg.p.unwrap_or(base.p),
        tol: cfg.tol.unwrap_or(base.tol),
        ..base
    };
    let bdata = match cfg.boundary.unwrap_or(BoundaryConfig::Pulse) {
        BoundaryConfig::Pulse => PipeBoundaryData::pulse(amplitude),
        BoundaryConfig::Zero => PipeBoundaryData::zero(),
    };
    let mut out = Outcome { runtime_limit: Some(1800.0), ..Outcome::default() };
    let mut w2p = Vec::new();
    let mut last = None;
    let mut summary = Table::new(
        "summary",
        &["n", "outer_iterations", "converged", "max_outer_ratio", "estimate_constant", "data_norm", "smallness_holds"],
    );
    for &n in &grids {
        let g = Grid3::new(n);
        let (v0, omega0) = if swirl {
            swirl_initial(g, amplitude)
        } else {
            (VectorField3::zeros(g), VectorField3::zeros(g))
        };
        let s = euler_solve(&profile, &bdata, &v0, &omega0, &ec)?;
        let r = &s.report;
        summary.push(&[
            n as f64,
            r.outer_iterations as f64,
            if r.converged { 1.0 } else { 0.0 },
            r.max_outer_ratio,
            r.estimate_constant,
            r.data_norm,
            if r.smallness.holds { 1.0 } else { 0.0 },
        ]);
        out.series.push(level_series(n, &s));
        out.contraction.push(outer_table(n, &s));
        out.monitors.push(monitor_table(n, &s));
        w2p.push(r.levels.iter().map(|d| d.v_w2p).collect::<Vec<_>>());
        last = Some(s);
    }
    out.tables.push(summary);
    let s = last.expect("at least one grid");
    let r = &s.report;
    let mut checks = vec![
        Check::holds("converged", r.converged),
        Check::at_most("div_omega", r.div_omega.value, r.div_omega.tolerance),
        Check::at_most("omega_tangential", r.tangential.value, r.tangential.tolerance),
        Check::at_most("momentum_residual", r.momentum.value, r.momentum.tolerance),
        Check::at_most("max_outer_ratio", r.max_outer_ratio, 0.6),
    ];
    if w2p.len() > 1 {
        let gap = relative_gap(&w2p[w2p.len() - 2], &w2p[w2p.len() - 1]);
        checks.push(Check::at_most("w2p_grid_gap", gap, 0.1));
    }
    out.verdicts.push(Verdict::new(8, "coupled pipe stability", checks));
    Ok(out)
}

/// Manufactured div-curl problem on each grid, plus the uniqueness cases.
pub fn divcurl(cfg: &ExperimentConfig) -> Result<Outcome> {
    let grids = grids_or(cfg, &[16, 32]);
    let p = cfg.p.unwrap_or(4.0);
    let mut table = Table::new("refinement", &["n", "dx", "relative_error", "curl_residual", "div_residual", "order"]);
    let mut prev: Option<(f64, f64)> = None;
    let mut order = f64::NAN;
    let mut finest = (0.0, 0.0, 0.0);
    for &n in &grids {
        let g = Grid3::new(n);
        let (v, w) = manufactured_divcurl(g);
        let z = vec![0.0; n * n];
        let sol = DivCurlSolver::new(g, DivCurlOptions { p, ..DivCurlOptions::default() }).solve(&w, &z, &z)?;
        let err = sol.v.sub(&v).lp_norm(p) / v.lp_norm(p);
        let dx = g.dx();
        order = prev.map_or(f64::NAN, |(e0, dx0)| (e0 / err).ln() / (dx0 / dx).ln());
        table.push(&[n as f64, dx, err, sol.curl_residual, sol.div_residual, order]);
        prev = Some((err, dx));
        finest = (dx, sol.curl_residual, sol.div_residual);
    }
    // uniqueness: no vorticity and no flux gives zero, uniform flux a plug
    let g = Grid3::new(grids[0]);
    let solver = DivCurlSolver::new(g, DivCurlOptions { p, ..DivCurlOptions::default() });
    let zero = VectorField3::zeros(g);
    let (z, one) = (vec![0.0; g.n * g.n], vec![1.0; g.n * g.n]);
    let zero_gap = solver.solve(&zero, &z, &z)?.v.sup_norm();
    let plug = VectorField3::from_fn(g, |_| [1.0, 0.0, 0.0]);
    let plug_gap = solver.solve(&zero, &one, &one)?.v.sup_diff(&plug);
    let mut unique = Table::new("uniqueness", &["sup_gap"]);
    unique.push_labeled("zero", &[zero_gap]);
    unique.push_labeled("plug", &[plug_gap]);
    let (dx, curl, _) = finest;
    let mut checks = Vec::new();
    if grids.len() > 1 {
        checks.push(Check::within("observed_order", order, 1.7, 2.3));
    }
    checks.push(Check::at_most("curl_residual", curl, 5.0 * dx * dx));
    checks.push(Check::at_most("zero_case_gap", zero_gap, 1e-12));
    checks.push(Check::at_most("plug_case_gap", plug_gap, 1e-12));
    Ok(Outcome {
        tables: vec![table, unique],
        verdicts: vec![Verdict::new(7, "div-curl manufactured solution", checks)],
        runtime_limit: Some(120.0),
        ..Outcome::default()
    })
}

/// Forward traces from random wall points of a flow tangent to the walls.
pub fn trace(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    let samples = cfg.samples.unwrap_or(200);
    let horizon = cfg.horizon.unwrap_or(10.0);
    let r = lateral_invariance_check(&wall_tangent_flow, samples, horizon, 40, seed)?;
    let mut t = Table::new("wall_drift", &["t", "max_drift"]);
    for &(time, d) in &r.series {
        t.push(&[time, d]);
    }
    Ok(Outcome {
        series: vec![t],
        verdicts: vec![Verdict::new(
            6,
            "lateral invariance",
            vec![Check::at_most("max_drift", r.max_drift, 1e-8), Check::at_least("samples", samples as f64, 200.0)],
        )],
        runtime_limit: Some(10.0),
        ..Outcome::default()
    })
}

/// The hand-built compatibility vectors against their documented verdicts.
fn compat(cfg: &ExperimentConfig) -> Result<Outcome> {
    let g = Grid3::new(grids_or(cfg, &[16])[0]);
    let opts = CompatOptions { time_samples: 6, face_samples: 33, ..CompatOptions::default() };
    let mut table = Table::new("compat_vectors", &["expected_pass", "observed_pass", "deciding_residual"]);
    let mut checks = Vec::new();
    for v in compat_vectors(g) {
        let c = &v.case;
        let rep = check_compatibility(&c.profile, &c.bdata, &c.v0, &c.omega0, &opts);
        let observed = rep.passed();
        checks.push(Check::holds(format!("{}_verdict", v.name), observed == v.expect_pass));
        let mut residual = f64::NAN;
        if let Some((name, expected)) = v.condition {
            residual = rep.get(name).map_or(f64::NAN, |k| k.residual);
            checks.push(Check::at_most(format!("{}_residual_error", v.name), (residual - expected).abs(), 1e-12));
        }
        table.push_labeled(v.name, &[v.expect_pass as u8 as f64, observed as u8 as f64, residual]);
    }
    Ok(Outcome {
        tables: vec![table],
        verdicts: vec![Verdict::new(9, "compatibility checker", checks)],
        runtime_limit: Some(1.0),
        ..Outcome::default()
    })
}
