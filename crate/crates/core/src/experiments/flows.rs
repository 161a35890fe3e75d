//! Mild solutions: oracle runs, blow-up, smoothing, bootstrap and dependence.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::config::Params;
use super::{log_grid, num, sub_seed, Builder, Check, Table};
use crate::calculus::sobolev_h_norm;
use crate::element::NCElement;
use crate::error::{Error, Result};
use crate::heat::{hessian_bound_ratio, sobolev_regularize};
use crate::lattice::{Mode, ThetaMatrix};
use crate::nonlinear::{growth_bound, lipschitz_bound, NCPolynomial};
use crate::solver::{
    bootstrap_regularity, local_existence_time, picard_solve, smoothing_monitor, solve_exp_euler, solve_until_blowup,
    InitialGuess, Scheme, SolutionTrajectory, SolverConfig, Status, CONTRACTION_LIMIT,
};
use crate::stats::loglog_fit;

enum Datum {
    Constant(f64),
    Random { radius: i64, decay: f64, norm: f64 },
}

struct Problem {
    theta: Arc<ThetaMatrix>,
    poly: NCPolynomial,
    u0: NCElement,
    cfg: SolverConfig,
}

fn problem(p: &Params, seed: u64, n: usize, cfg: SolverConfig, datum: Datum) -> Result<Problem> {
    let n = p.count("n", n)?;
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let theta = p.theta("theta", n)?;
    let cfg = p.solver(cfg)?;
    cfg.validate(n)?;
    let default = match datum {
        Datum::Constant(c) => NCElement::identity(theta.clone()).scale_real(c),
        Datum::Random { radius, decay, norm } => {
            let u = NCElement::random(theta.clone(), seed, radius, decay);
            let scale = norm / sobolev_h_norm(&u, cfg.k as f64)?;
            u.scale_real(scale)
        }
    };
    let u0 = p.initial("initial", &theta, cfg.k, seed, default)?;
    let poly = p.polynomial("polynomial", &theta)?;
    Ok(Problem { theta, poly, u0, cfg })
}

fn h(u: &NCElement, k: u32) -> f64 {
    sobolev_h_norm(u, k as f64).expect("integer orders are valid")
}

fn passed_check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        passed,
        value: if passed { 1.0 } else { 0.0 },
        limit: 1.0,
        detail: detail.into(),
    }
}

fn trajectory_table(name: &str, traj: &SolutionTrajectory) -> Table {
    let mut table = Table::new(name, &["t", "h_k_norm", "h_k1_norm", "residual", "shell_mass"]);
    for i in 0..traj.len() {
        table.push(vec![
            num(traj.times[i]),
            num(traj.h_k_norms[i]),
            num(traj.h_k1_norms[i]),
            num(traj.residuals[i]),
            num(traj.shell_mass[i]),
        ]);
    }
    table
}

fn windows_table(traj: &SolutionTrajectory) -> Table {
    let mut table = Table::new(
        "windows",
        &["start", "end", "start_norm", "radius", "growth", "lipschitz", "existence_time", "iterations", "max_contraction", "final_update", "converged"],
    );
    for w in &traj.windows {
        let q = w.contraction_factors.iter().copied().fold(0.0, f64::max);
        table.push(vec![
            num(w.start),
            num(w.end),
            num(w.start_norm),
            num(w.radius),
            num(w.growth),
            num(w.lipschitz),
            num(w.existence_time),
            w.iterations.to_string(),
            num(q),
            num(w.final_update),
            w.converged.to_string(),
        ]);
    }
    table
}

fn trajectory_files(out: &mut Builder, traj: &SolutionTrajectory, every: usize) {
    if every == 0 {
        return;
    }
    let last = traj.len() - 1;
    for i in (0..traj.len()).filter(|i| i % every == 0 || *i == last) {
        let text = format!("# t={:e}\n{}", traj.times[i], traj.states[i].to_text());
        out.file(format!("trajectory/state_{i:05}.txt"), text);
    }
}

fn run(prob: &Problem, cfg: &SolverConfig) -> Result<SolutionTrajectory> {
    match cfg.scheme {
        Scheme::Picard => picard_solve(&prob.u0, &prob.poly, cfg),
        Scheme::ExpEuler => solve_until_blowup(&prob.u0, &prob.poly, cfg),
    }
}

/// `[lower, upper]` for the maximal time; `upper` is `None` without a detected blow-up.
fn t_max_interval(traj: &SolutionTrajectory) -> (f64, Option<f64>) {
    match traj.blowup {
        Some(b) => (b.lower, Some(b.upper)),
        None => (traj.final_time(), None),
    }
}

/// One run of the configured scheme with optional oracle and convergence checks.
pub(super) fn solve(p: &Params, seed: u64, out: &mut Builder) -> Result<()> {
    let defaults = SolverConfig { k: 1, cutoff: 2, t_end: 0.9, ..Default::default() };
    let prob = problem(p, seed, 1, defaults, Datum::Constant(1.0))?;
    let save_every = p.count("save_every", 1)?;
    let oracle = p.string("oracle", "none")?;
    let oracle_tolerance = p.positive("oracle_tolerance", 1e-6)?;
    let expected_t_max = p.opt_f64("t_max")?;
    let steps = p.f64_list("convergence_steps", &[])?;
    let order_tolerance = p.positive("order_tolerance", 0.2)?;
    p.finish()?;
    if !matches!(oracle.as_str(), "none" | "riccati") {
        return Err(Error::param("oracle", format!("expected `none` or `riccati`, got `{oracle}`")));
    }
    let cfg = &prob.cfg;
    let k = cfg.k;
    let traj = run(&prob, cfg)?;

    out.check(passed_check("status", traj.status != Status::ToleranceFailure, traj.status.to_string()));
    if cfg.scheme == Scheme::Picard {
        let q = traj.max_contraction().unwrap_or(0.0);
        out.check(Check::at_most("contraction", q, CONTRACTION_LIMIT, "max Picard contraction factor"));
        let scale = traj.h_k_norms.iter().copied().fold(1.0, f64::max);
        let residual = traj.residuals.iter().copied().fold(0.0, f64::max);
        out.check(Check::at_most("residual", residual, cfg.tolerance * scale, "max ||u - Phi u||_{H^k}"));
    }
    if oracle == "riccati" {
        // u' = u^2 with constant datum c has u(t) = c / (1 - c t).
        let zero = Mode::zero(prob.theta.dim());
        let c = prob.u0.coeff(&zero).re;
        let mut worst: f64 = 0.0;
        for (t, u) in traj.times.iter().zip(&traj.states) {
            let exact = c / (1.0 - c * t);
            let exact_el = NCElement::identity(prob.theta.clone()).scale_real(exact);
            worst = worst.max(h(&u.sub(&exact_el)?, k) / exact.abs());
        }
        out.check(Check::at_most("riccati oracle", worst, oracle_tolerance, "max relative H^k error against c/(1 - c t)"));
        out.result("oracle_max_relative_error", worst);
    }
    let (lower, upper) = t_max_interval(&traj);
    if let Some(expected) = expected_t_max {
        let contains = lower <= expected && upper.is_some_and(|u| expected <= u);
        out.check(passed_check("t_max interval", contains, format!("[{lower}, {upper:?}] vs {expected}")));
    }
    if !steps.is_empty() {
        let reference = traj.final_state().clone();
        let errors = steps
            .par_iter()
            .map(|&step| {
                let c = SolverConfig { step, t_end: traj.final_time(), ..cfg.clone() };
                let e = solve_exp_euler(&prob.u0, &prob.poly, &c)?;
                Ok(h(&e.final_state().sub(&reference)?, k))
            })
            .collect::<Result<Vec<_>>>()?;
        let order = loglog_fit(&steps, &errors).map_or(f64::NAN, |f| f.slope);
        let mut table = Table::new("convergence", &["h", "error", "ratio_to_previous"]);
        for (i, (s, e)) in steps.iter().zip(&errors).enumerate() {
            let ratio = if i == 0 { String::new() } else { num(errors[i - 1] / e) };
            table.push(vec![num(*s), num(*e), ratio]);
        }
        out.table(table);
        let dev = (order - 1.0).abs();
        out.check(Check::at_most("exp-euler order", if dev.is_nan() { f64::INFINITY } else { dev }, order_tolerance, format!("measured order {order:.4}")));
        out.result("exp_euler_order", order);
    }

    out.result("status", traj.status);
    out.result("message", &traj.message);
    out.result("final_time", traj.final_time());
    out.result("t_max_interval", json!({ "lower": lower, "upper": upper }));
    out.result("blowup", traj.blowup);
    out.result("windows", traj.windows.len());
    out.result("max_contraction", traj.max_contraction());
    out.result("max_shell_mass", traj.max_shell_mass());
    out.result("truncation_warning", traj.truncation_warning());
    if let Some(w) = traj.windows.first() {
        out.result("first_window", json!({ "radius": w.radius, "growth_bound": w.growth, "lipschitz_bound": w.lipschitz, "existence_time": w.existence_time }));
    }
    out.table(trajectory_table("trajectory", &traj));
    if !traj.windows.is_empty() {
        out.table(windows_table(&traj));
    }
    trajectory_files(out, &traj, save_every);
    Ok(())
}

/// Threshold-crossing times for several thresholds.
pub(super) fn blowup(p: &Params, seed: u64, out: &mut Builder) -> Result<()> {
    let defaults = SolverConfig { k: 1, cutoff: 2, t_end: 10.0, scheme: Scheme::ExpEuler, ..Default::default() };
    let default_problem = !p.is_set("initial") && !p.is_set("polynomial");
    let prob = problem(p, seed, 1, defaults, Datum::Constant(1.0))?;
    let mut thresholds = p.f64_list("thresholds", &[1e2, 1e3, 1e4])?;
    let t_max = match p.opt_f64("t_max")? {
        Some(t) => Some(t),
        None if default_problem => Some(1.0),
        None => None,
    };
    let check_threshold = p.positive("check_threshold", 1e3)?;
    p.finish()?;
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let runs = thresholds
        .par_iter()
        .map(|&threshold| solve_until_blowup(&prob.u0, &prob.poly, &SolverConfig { threshold, ..prob.cfg.clone() }))
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new("blowup", &["threshold", "coarse", "fine", "extrapolated", "lower", "upper", "status"]);
    let mut extrapolated = Vec::new();
    for (threshold, traj) in thresholds.iter().zip(&runs) {
        let cells = match traj.blowup {
            Some(b) => {
                extrapolated.push(b.extrapolated);
                vec![num(b.coarse), num(b.fine), num(b.extrapolated), num(b.lower), num(b.upper)]
            }
            None => vec![String::new(); 5],
        };
        let mut row = vec![num(*threshold)];
        row.extend(cells);
        row.push(traj.status.to_string());
        table.push(row);
        out.check(passed_check(&format!("detected at {threshold:e}"), traj.blowup.is_some(), traj.message.clone().unwrap_or_default()));
    }
    let monotone = extrapolated.windows(2).all(|w| w[0] < w[1]);
    out.check(passed_check("monotone in threshold", monotone, "extrapolated crossing times increase with the threshold"));
    if let Some(t_max) = t_max {
        let worst = extrapolated.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        out.check(Check::at_most("bounded by t_max", worst, t_max, "largest extrapolated crossing time"));
        if let Some(i) = thresholds.iter().position(|&t| t == check_threshold) {
            let contains = runs[i].blowup.is_some_and(|b| b.contains(t_max));
            out.check(passed_check(&format!("interval contains t_max at {check_threshold:e}"), contains, format!("{:?}", runs[i].blowup)));
        }
        out.result("t_max", t_max);
    }
    out.result("estimates", runs.iter().map(|r| r.blowup).collect::<Vec<_>>());
    out.table(table);
    Ok(())
}

/// Smoothing ratio under refinement towards `t = 0`, plus the linear regularization ratios.
pub(super) fn smoothing(p: &Params, seed: u64, out: &mut Builder) -> Result<()> {
    let defaults = SolverConfig { k: 2, cutoff: 10, t_end: 0.02, ..Default::default() };
    let prob = problem(p, seed, 2, defaults, Datum::Random { radius: 4, decay: 2.0, norm: 0.5 })?;
    let first_steps = p.f64_list("first_steps", &[1e-3, 3e-4, 1e-4])?;
    let trend_window = p.positive("trend_window", 1e-3)?;
    let min_trend = p.f64("min_trend_slope", -0.1)?;
    let refinement_tolerance = p.positive("refinement_tolerance", 0.05)?;
    let regularization = p.flag("regularization", true)?;
    let reg = if regularization { Some(RegularizationParams::read(p)?) } else { None };
    p.finish()?;
    if first_steps.is_empty() {
        return Err(Error::param("first_steps", "must not be empty"));
    }

    let reports = first_steps
        .par_iter()
        .map(|&fs| {
            let cfg = SolverConfig { first_step: Some(fs), ..prob.cfg.clone() };
            let traj = picard_solve(&prob.u0, &prob.poly, &cfg)?;
            let report = smoothing_monitor(&traj, &prob.poly, Some(cfg.cutoff))?;
            Ok((traj, report))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new("smoothing", &["first_step", "t", "ratio"]);
    let mut maxima = Vec::new();
    for (fs, (traj, report)) in first_steps.iter().zip(&reports) {
        for (t, r) in report.times.iter().zip(&report.ratios) {
            table.push(vec![num(*fs), num(*t), num(*r)]);
        }
        maxima.push(report.max_ratio);
        out.check(passed_check(&format!("completed first_step={fs:e}"), traj.status == Status::Completed, traj.status.to_string()));
        out.check(passed_check(&format!("bounded first_step={fs:e}"), report.max_ratio.is_finite(), format!("max ratio {}", report.max_ratio)));
    }
    let growth = maxima.iter().copied().fold(f64::NEG_INFINITY, f64::max) / maxima[0] - 1.0;
    out.check(Check::at_most("refinement growth", growth, refinement_tolerance, "max ratio over refinements relative to the coarsest"));

    let finest = first_steps.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).expect("non-empty");
    let report = &reports[finest].1;
    let (ts, rs): (Vec<f64>, Vec<f64>) = report.times.iter().zip(&report.ratios).filter(|(t, _)| **t <= trend_window).map(|(t, r)| (*t, *r)).unzip();
    let trend = loglog_fit(&ts, &rs).map_or(f64::NAN, |f| f.slope);
    out.check(Check::at_least("no growth as t -> 0", if trend.is_nan() { f64::NEG_INFINITY } else { trend }, min_trend, "log-log slope of the ratio on the earliest times"));

    out.result("max_ratios", &maxima);
    out.result("first_steps", &first_steps);
    out.result("forcing_sup", report.forcing_sup);
    out.result("argmax", report.argmax);
    out.result("small_time_slope", trend);
    out.result("max_shell_mass", reports[finest].0.max_shell_mass());
    out.table(table);
    if let Some(reg) = reg {
        regularize(&reg, &prob.theta, seed, out)?;
    }
    Ok(())
}

struct RegularizationParams {
    cases: Vec<(u32, u32)>,
    radii: Vec<i64>,
    samples: usize,
    decay: (f64, f64),
    times: Vec<f64>,
    stability: f64,
}

impl RegularizationParams {
    fn read(p: &Params) -> Result<Self> {
        let cases = p
            .pairs("reg_cases", &[(1, 1), (1, 2)])?
            .into_iter()
            .map(|(k, r)| if k >= 0 && r >= 0 { Ok((k as u32, r as u32)) } else { Err(Error::param("reg_cases", "orders must be nonnegative")) })
            .collect::<Result<_>>()?;
        let radii = p.int_list("reg_radii", &[4, 8])?;
        if radii.is_empty() || radii.iter().any(|&r| r < 0) {
            return Err(Error::param("reg_radii", "expected nonnegative radii"));
        }
        let samples = p.count("reg_samples", 20)?.max(1);
        let decay = p.f64_list("reg_decay", &[5.0, 6.0])?;
        if decay.len() != 2 || decay[0] > decay[1] {
            return Err(Error::param("reg_decay", "expected [low, high]"));
        }
        let times = log_grid(p.positive("reg_t_min", 1e-4)?, p.positive("reg_t_max", 1.0)?, 4);
        let stability = p.positive("reg_stability", 0.05)?;
        Ok(RegularizationParams { cases, radii, samples, decay: (decay[0], decay[1]), times, stability })
    }
}

fn regularize(reg: &RegularizationParams, theta: &Arc<ThetaMatrix>, seed: u64, out: &mut Builder) -> Result<()> {
    let data = |radius: i64| -> Vec<NCElement> {
        (0..reg.samples)
            .map(|i| {
                let s = sub_seed(seed, 0x7e9, i as u64);
                let decay = reg.decay.0 + (reg.decay.1 - reg.decay.0) * (i as f64 + 0.5) / reg.samples as f64;
                NCElement::random(theta.clone(), s, radius, decay)
            })
            .collect()
    };
    // quantity label, radius, max ratio, argmax t
    let mut rows: Vec<(String, i64, f64, f64)> = Vec::new();
    for &radius in &reg.radii {
        let elements = data(radius);
        for &(k, r) in &reg.cases {
            let best = elements
                .par_iter()
                .map(|a| {
                    reg.times.iter().map(|&t| Ok((sobolev_regularize(a, k, r, t)?.1, t))).collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .fold((f64::NEG_INFINITY, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
            rows.push((format!("k={k} r={r}"), radius, best.0, best.1));
        }
        let best = elements
            .par_iter()
            .map(|a| reg.times.iter().map(|&t| Ok((hessian_bound_ratio(a, t)?, t))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .fold((f64::NEG_INFINITY, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
        rows.push(("hessian".into(), radius, best.0, best.1));
    }
    let mut table = Table::new("regularization", &["quantity", "radius", "max_ratio", "argmax_t"]);
    for (q, radius, m, t) in &rows {
        table.push(vec![q.clone(), radius.to_string(), num(*m), num(*t)]);
    }
    let labels: Vec<String> = {
        let mut l: Vec<String> = rows.iter().map(|r| r.0.clone()).collect();
        l.dedup();
        l.sort();
        l.dedup();
        l
    };
    for label in labels {
        let maxima: Vec<f64> = rows.iter().filter(|r| r.0 == label).map(|r| r.2).collect();
        out.check(passed_check(&format!("regularization finite {label}"), maxima.iter().all(|m| m.is_finite()), format!("{maxima:?}")));
        let base = maxima[0];
        let drift = maxima.iter().map(|m| (m / base - 1.0).abs()).fold(0.0, f64::max);
        out.check(Check::at_most(format!("regularization stable {label}"), drift, reg.stability, "relative change of the max ratio across box radii"));
    }
    out.table(table);
    Ok(())
}

/// Staged restarts in `H^{k+j}` under grid refinement.
pub(super) fn bootstrap(p: &Params, seed: u64, out: &mut Builder) -> Result<()> {
    // Certified windows in H^{k+j} shrink like A_{k+j,n}^{-4}, so the default stays small.
    let defaults = SolverConfig { k: 1, cutoff: 8, t_end: 3e-3, ..Default::default() };
    let prob = problem(p, seed, 1, defaults, Datum::Random { radius: 3, decay: 2.0, norm: 0.05 })?;
    let r = p.order("r", 2)?;
    let epsilon = p.positive("epsilon", 1e-3)?;
    let steps = p.f64_list("refinements", &[1e-4, 5e-5, 2.5e-5])?;
    let tolerance = p.positive("refinement_tolerance", 0.1)?;
    p.finish()?;
    if steps.is_empty() {
        return Err(Error::param("refinements", "must not be empty"));
    }
    let reports = steps
        .par_iter()
        .map(|&step| {
            let cfg = SolverConfig { grid_step: step, first_step: prob.cfg.first_step.map(|f| f.min(step)), ..prob.cfg.clone() };
            bootstrap_regularity(&prob.u0, &prob.poly, &cfg, r, epsilon)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("bootstrap", &["h", "stage", "t", "order", "norm"]);
    for (step, rep) in steps.iter().zip(&reports) {
        for (j, (t, v)) in rep.stage_times.iter().zip(&rep.stage_norms).enumerate() {
            table.push(vec![num(*step), (j + 1).to_string(), num(*t), (prob.cfg.k + j as u32 + 1).to_string(), num(*v)]);
        }
        let traj = &rep.trajectory;
        table.push(vec![num(*step), "final".into(), num(traj.final_time()), traj.k.to_string(), num(*traj.h_k_norms.last().expect("non-empty"))]);
        out.check(passed_check(&format!("completed h={step:e}"), traj.status == Status::Completed, traj.message.clone().unwrap_or_default()));
        out.check(passed_check(
            &format!("finite norms h={step:e}"),
            rep.stage_norms.iter().chain(traj.h_k_norms.iter()).all(|v| v.is_finite()),
            "",
        ));
    }
    let base = &reports[0];
    let mut drift: f64 = 0.0;
    for rep in &reports[1..] {
        for (a, b) in base.stage_norms.iter().zip(&rep.stage_norms) {
            drift = drift.max((b / a - 1.0).abs());
        }
        let (a, b) = (base.trajectory.h_k_norms.last().expect("non-empty"), rep.trajectory.h_k_norms.last().expect("non-empty"));
        drift = drift.max((b / a - 1.0).abs());
    }
    out.check(Check::at_most("refinement agreement", drift, tolerance, "max relative change of stage norms across grids"));
    let finest = reports.last().expect("non-empty");
    out.result("stage_times", &finest.stage_times);
    out.result("stage_norms", &finest.stage_norms);
    out.table(table);
    out.table(trajectory_table("trajectory", &finest.trajectory));
    Ok(())
}

/// Pairs of nearby data on the guaranteed interval: Gronwall bound and contraction.
pub(super) fn dependence(p: &Params, seed: u64, out: &mut Builder) -> Result<()> {
    let defaults = SolverConfig { k: 2, cutoff: 6, radius: Some(1.0), ..Default::default() };
    let n = p.count("n", 2)?;
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let theta = p.theta("theta", n)?;
    let cfg = p.solver(defaults)?;
    cfg.validate(n)?;
    let poly = p.polynomial("polynomial", &theta)?;
    let pairs = p.count("pairs", 100)?;
    let norm = p.positive("norm", 0.4)?;
    let perturbation = p.positive("perturbation", 1e-2)?;
    let data_radius = p.int("data_radius", 3)?;
    let decay = p.f64("decay", 2.0)?;
    p.finish()?;
    let radius = cfg.radius.ok_or_else(|| Error::param("radius", "dependence needs a fixed ball radius"))?;
    let k = cfg.k;
    let growth = growth_bound(&poly, k, radius)?;
    let lipschitz = lipschitz_bound(&poly, k, radius)?;

    let results = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 0xde9, i as u64));
            let u0 = NCElement::random_with(theta.clone(), &mut rng, data_radius, decay);
            let u0 = u0.scale_real(norm / h(&u0, k)).project(cfg.cutoff);
            let w = NCElement::random_with(theta.clone(), &mut rng, data_radius, decay);
            let v0 = u0.add(&w.scale_real(perturbation * norm / h(&w, k)))?.project(cfg.cutoff);
            let start = h(&u0, k).max(h(&v0, k));
            let t = local_existence_time(start, growth, lipschitz, radius, 1.0)?;
            let c = SolverConfig { t_end: t, ..cfg.clone() };
            let (u, v) = (picard_solve(&u0, &poly, &c)?, picard_solve(&v0, &poly, &c)?);
            let mut sup: f64 = 0.0;
            for (a, b) in u.states.iter().zip(&v.states) {
                sup = sup.max(h(&a.sub(b)?, k));
            }
            let bound = (lipschitz * t).exp() * h(&u0.sub(&v0)?, k);
            let q = u.max_contraction().unwrap_or(0.0).max(v.max_contraction().unwrap_or(0.0));
            let ok = u.status == Status::Completed && v.status == Status::Completed && u.windows.len() == 1 && v.len() == u.len();
            let uniqueness = if i == 0 {
                let zero = picard_solve(&u0, &poly, &SolverConfig { initial_guess: InitialGuess::Zero, ..c.clone() })?;
                let mut gap: f64 = 0.0;
                for (a, b) in u.states.iter().zip(&zero.states) {
                    gap = gap.max(h(&a.sub(b)?, k));
                }
                Some(gap / u.h_k_norms.iter().copied().fold(1.0, f64::max))
            } else {
                None
            };
            Ok((t, sup, bound, q, ok, uniqueness))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new("dependence", &["pair", "t", "sup_distance", "gronwall_bound", "max_contraction"]);
    let mut violations = 0;
    let mut worst_q: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    for (i, (t, sup, bound, q, ok, _)) in results.iter().enumerate() {
        table.push(vec![i.to_string(), num(*t), num(*sup), num(*bound), num(*q)]);
        violations += (sup > bound || !ok) as usize;
        worst_q = worst_q.max(*q);
        worst_ratio = worst_ratio.max(sup / bound);
    }
    out.check(Check::at_most("gronwall", violations as f64, 0.0, format!("worst sup/bound {worst_ratio:.4}")));
    out.check(Check::at_most("contraction", worst_q, CONTRACTION_LIMIT, "max Picard contraction factor"));
    if let Some(gap) = results.first().and_then(|r| r.5) {
        out.check(Check::at_most("uniqueness", gap, 10.0 * cfg.tolerance, "heat vs zero initial guess, relative sup distance"));
    }
    out.result("radius", radius);
    out.result("growth_bound", growth);
    out.result("lipschitz_bound", lipschitz);
    out.result("worst_ratio", worst_ratio);
    out.table(table);
    Ok(())
}
