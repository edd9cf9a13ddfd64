//! Runners for the one-dimensional modules.

use std::f64::consts::PI;
use std::sync::Arc;

use inflow_core::characteristics::SpeedField1D;
use inflow_core::field::WeightParams;
use inflow_core::quasilinear::{burgers_small, linear2_small, outer_solve, psystem_small, periodic_shock_time, shock_contrast, SystemConfig, SystemReport, SystemSolution};
use inflow_core::transport::{check_weighted_sup_estimate, default_weight, solve_mild, TransportProblem1D};

use crate::config::{polynomial, polynomial_dx, ExperimentConfig, FnSpec};
use crate::error::Result;
use crate::report::{Check, Table, Verdict};
use crate::run::{grids_or, Outcome};

pub fn transport1d(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.preset.as_str() {
        "translation" => translation(cfg),
        _ => flush(cfg),
    }
}

pub fn hyp1d(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.preset.as_str() {
        "burgers-small" => burgers(cfg),
        _ => shock(cfg),
    }
}

fn wave(x: f64) -> f64 {
    (PI * x).sin() + 0.5 * (2.0 * PI * x).cos()
}

/// Unit speed with inflow data continuing a fixed wave, so the exact
/// solution is the translate `f0(x - t)`.
fn translation(cfg: &ExperimentConfig) -> Result<Outcome> {
    let n = grids_or(cfg, &[256])[0];
    let horizon = cfg.horizon.unwrap_or(2.0);
    let problem = TransportProblem1D::new(SpeedField1D::constant(1.0), wave, |t| wave(-1.0 - t));
    let mut table = Table::new("translation_error", &["t", "sup_error"]);
    let mut worst = 0.0f64;
    for k in 1..=20 {
        let t = horizon * k as f64 / 20.0;
        let sol = solve_mild(&problem, t, n)?;
        let err = (0..n)
            .map(|j| {
                let x = sol.field.grid.x(j);
                (sol.field.values[j] - wave(x - t)).abs()
            })
            .fold(0.0f64, f64::max);
        worst = worst.max(err);
        table.push(&[t, err]);
    }
    Ok(Outcome {
        series: vec![table],
        verdicts: vec![Verdict::new(1, "transport exactness", vec![Check::at_most("sup_error", worst, 1e-8)])],
        runtime_limit: Some(1.0),
        ..Outcome::default()
    })
}

fn shape(spec: &FnSpec) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
    match spec {
        FnSpec::Named(n) => match n.as_str() {
            "unit" => Arc::new(|_| 1.0),
            "quadratic" => Arc::new(|x| 1.0 + 0.5 * x * x),
            "wave" => Arc::new(wave),
            "flush" => Arc::new(|x| 1.0 + x + 0.5 * (3.0 * x).sin()),
            _ => Arc::new(|_| 0.0),
        },
        FnSpec::Coefficients(c) => {
            let c = c.clone();
            Arc::new(move |x| polynomial(&c, x))
        }
    }
}

/// Bounds of `|lambda|` and `|lambda'|` on [-1, 1] and the direction.
fn speed_field(spec: &FnSpec) -> SpeedField1D {
    match spec {
        FnSpec::Named(n) if n == "unit" => SpeedField1D::constant(1.0),
        FnSpec::Named(_) => SpeedField1D::new(|_, x| 1.0 + 0.5 * x * x, 1.0, 1.0, 1.0, true),
        FnSpec::Coefficients(c) => {
            let xs = (0..=2000).map(|j| -1.0 + j as f64 / 1000.0);
            let lambda_m = xs.clone().map(|x| polynomial(c, x).abs()).fold(f64::INFINITY, f64::min);
            let lip = xs.map(|x| polynomial_dx(c, x).abs()).fold(0.0f64, f64::max);
            let sign = polynomial(c, 0.0).signum();
            let c = c.clone();
            SpeedField1D::new(move |_, x| polynomial(&c, x), lambda_m, lip, sign, true)
        }
    }
}

/// The weighted sup estimate for configurable data; the defaults have zero
/// inflow and forcing, so the weighted norm decays at the predicted rate
/// and the domain is empty after two transit times.
fn flush(cfg: &ExperimentConfig) -> Result<Outcome> {
    let n = grids_or(cfg, &[256])[0];
    let horizon = cfg.horizon.unwrap_or(4.0);
    let named = |s: &str| FnSpec::Named(s.into());
    let speed = speed_field(cfg.speed.as_ref().unwrap_or(&named("quadratic")));
    let f0 = shape(cfg.f0.as_ref().unwrap_or(&named("flush")));
    let b_spec = cfg.b.clone().unwrap_or(named("zero"));
    let h_spec = cfg.h.clone().unwrap_or(named("zero"));
    let (b, h) = (shape(&b_spec), shape(&h_spec));
    let mut problem = TransportProblem1D::new(speed.clone(), move |x| f0(x), move |t| b(t));
    if !h_spec.is_zero() {
        problem = problem.with_forcing(move |_, x| h(x));
    }
    let weight = match cfg.alpha {
        Some(alpha) => WeightParams { alpha, lambda_m: speed.lambda_m },
        None => default_weight(&speed, horizon),
    };
    let rep = check_weighted_sup_estimate(&problem, &weight, horizon, n, 50)?;
    let rate = weight.alpha * weight.lambda_m;
    let t_flush = 2.0 / speed.lambda_m;
    let mut decay = Table::new("weighted_decay", &["t", "sup_wf", "bound_rhs", "flush_flag"]);
    let mut excess = 0.0f64;
    for &(t, lhs, env) in &rep.series {
        // max(e^{-rate t} |w f0|, |w b|) + (1 - e^{-rate t}) |w h| / rate
        let rhs = env.max(rep.boundary_norm) + (1.0 - (-rate * t).exp()) * rep.forcing_norm / rate;
        decay.push(&[t, lhs, rhs, if t > t_flush { 1.0 } else { 0.0 }]);
        if rhs > 0.0 {
            excess = excess.max(lhs / rhs - 1.0);
        } else if lhs > 0.0 {
            excess = f64::INFINITY;
        }
    }
    let mut checks = vec![Check::at_most("relative_envelope_excess", excess, 1e-6)];
    let mut series = vec![decay];
    if b_spec.is_zero() && h_spec.is_zero() {
        let mut flushed = Table::new("flush", &["t", "sup_abs"]);
        let mut residue = 0.0f64;
        if horizon > t_flush {
            for k in 1..=10 {
                let t = t_flush + (horizon - t_flush) * k as f64 / 10.0;
                let s = solve_mild(&problem, t, n)?.field.sup_norm();
                residue = residue.max(s);
                flushed.push(&[t, s]);
            }
        }
        checks.push(Check::at_most("sup_after_flush", residue, 1e-12));
        checks.push(Check::holds("horizon_covers_flush_time", horizon > t_flush));
        series.push(flushed);
    }
    Ok(Outcome {
        series,
        verdicts: vec![Verdict::new(2, "weighted decay", checks)],
        runtime_limit: Some(5.0),
        ..Outcome::default()
    })
}

fn sup_series(sol: &SystemSolution) -> Vec<(f64, f64)> {
    let v = &sol.v;
    (0..v.nt)
        .map(|k| {
            let m = (0..v.nx()).flat_map(|j| v.node(k, j).iter().map(|x| x.abs())).fold(0.0f64, f64::max);
            (v.time(k), m)
        })
        .collect()
}

fn contraction_table(name: String, report: &SystemReport) -> Table {
    let mut t = Table::new(name, &["level", "update_norm", "outer_ratio", "inner_sweeps", "max_inner_ratio"]);
    for l in &report.levels {
        let inner = l.inner.ratios.iter().skip(1).copied().fold(0.0f64, f64::max);
        t.push(&[l.level as f64, l.update_norm, l.ratio.unwrap_or(f64::NAN), l.inner.iterations as f64, inner]);
    }
    t
}

/// Small Burgers data. The first grid decides the contraction criterion;
/// with two grids the stability criterion compares them as well.
fn burgers(cfg: &ExperimentConfig) -> Result<Outcome> {
    let grids = grids_or(cfg, &[256, 512]);
    let amplitude = cfg.amplitude.unwrap_or(1e-2);
    let mut preset = match cfg.system.as_deref().unwrap_or("burgers") {
        "linear2" => linear2_small(amplitude),
        "psystem" => psystem_small(amplitude),
        _ => burgers_small(amplitude, cfg.mode.unwrap_or(1)),
    };
    if let Some(eps0) = cfg.eps0 {
        preset.problem.data_budget = eps0;
    }
    let mut out = Outcome { runtime_limit: Some(if grids.len() > 1 { 300.0 } else { 60.0 }), ..Outcome::default() };
    let mut sups = Vec::new();
    let mut stability = Vec::new();
    let mut first_ratios = (0.0, 0.0);
    for (i, &nx) in grids.iter().enumerate() {
        let sc = SystemConfig {
            nx,
            horizon: cfg.horizon.unwrap_or(50.0),
            dt: cfg.dt.unwrap_or(SystemConfig::default().dt),
            tol_outer: cfg.tol.unwrap_or(SystemConfig::default().tol_outer),
            max_outer: cfg.l_max.unwrap_or(SystemConfig::default().max_outer),
            delta: cfg.delta.unwrap_or(SystemConfig::default().delta),
            ..SystemConfig::default()
        };
        let (sol, rep) = outer_solve(&preset.problem, &sc)?;
        let sup = sup_series(&sol);
        let mut series = Table::new(format!("norms_n{nx}"), &["t", "sup_v", "stability_sum", "sup_dx_v"]);
        for ((s, a), g) in sup.iter().zip(&rep.series).zip(&rep.gradient_series) {
            series.push(&[s.0, s.1, a.1, g.1]);
        }
        out.series.push(series);
        out.contraction.push(contraction_table(format!("outer_n{nx}"), &rep));
        if i == 0 {
            first_ratios = (rep.max_outer_ratio(), rep.max_inner_ratio());
        }
        stability.push((nx, rep.stability_norm, rep.data_norm, rep.stability_holds, rep.converged_level.is_some()));
        sups.push(sup);
    }
    out.verdicts.push(Verdict::new(
        3,
        "contraction",
        vec![
            Check::at_most("max_outer_ratio", first_ratios.0, 0.6),
            Check::at_most("max_inner_ratio", first_ratios.1, 0.6),
        ],
    ));
    if grids.len() > 1 {
        let mut checks = Vec::new();
        for &(nx, norm, data, _, converged) in &stability {
            checks.push(Check::at_most(format!("stability_norm_n{nx}"), norm, 10.0 * data));
            checks.push(Check::holds(format!("converged_n{nx}"), converged));
        }
        let (a, b) = (&sups[sups.len() - 2], &sups[sups.len() - 1]);
        let diff = a.iter().zip(b).map(|(x, y)| (x.1 - y.1).abs()).fold(0.0f64, f64::max);
        checks.push(Check::at_most("resolution_sup_difference", diff, 1e-4));
        out.verdicts.push(Verdict::new(4, "global stability", checks));
    }
    Ok(out)
}

fn shock(cfg: &ExperimentConfig) -> Result<Outcome> {
    let nx = grids_or(cfg, &[128])[0];
    let amplitude = cfg.amplitude.unwrap_or(0.05);
    let t_star = periodic_shock_time(amplitude, 1, 1 << 14);
    let sc = SystemConfig {
        nx,
        horizon: cfg.horizon.unwrap_or(3.0 * t_star + SystemConfig::default().dt),
        delta: f64::INFINITY,
        ..SystemConfig::default()
    };
    let r = shock_contrast(amplitude, 1, &sc)?;
    let mut inflow = Table::new("inflow_gradient", &["t", "max_dx_v"]);
    for &(t, g) in &r.gradient_series {
        inflow.push(&[t, g]);
    }
    let mut periodic = Table::new("periodic_gradient", &["t", "max_dx_v"]);
    for &(t, g) in &r.periodic_gradient_series {
        periodic.push(&[t, g]);
    }
    let rel = (r.periodic_shock_time - r.predicted_shock_time).abs() / r.predicted_shock_time;
    let reach = r.gradient_series.last().map_or(0.0, |g| g.0) / r.periodic_shock_time;
    Ok(Outcome {
        series: vec![inflow, periodic],
        verdicts: vec![Verdict::new(
            5,
            "shock contrast",
            vec![
                Check::at_most("shock_time_relative_error", rel, 0.02),
                Check::at_most("inflow_gradient_growth", r.growth, 3.0),
                Check::at_least("horizon_over_shock_time", reach, 3.0 - 1e-9),
            ],
        )],
        runtime_limit: Some(120.0),
        ..Outcome::default()
    })
}
