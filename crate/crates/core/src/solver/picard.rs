use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::duhamel::{integrate_window, validate_grid};
use super::field::{BoxLayout, Field};
use super::{local_existence_time, SolutionTrajectory, SolverConfig, Status};
use crate::element::NCElement;
use crate::error::{Error, Result};
use crate::nonlinear::{growth_bound, lipschitz_bound, NCPolynomial};

/// Largest contraction factor accepted before a window is declared failed.
pub const CONTRACTION_LIMIT: f64 = 0.55;

/// Starting trajectory of the Picard iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialGuess {
    /// `u(t) = P_{t - t_0} u(t_0)`.
    Heat,
    /// `u(t) = 0` away from the window start.
    Zero,
}

impl std::str::FromStr for InitialGuess {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heat" => Ok(InitialGuess::Heat),
            "zero" => Ok(InitialGuess::Zero),
            other => Err(Error::param("initial_guess", format!("expected `heat` or `zero`, got `{other}`"))),
        }
    }
}

/// One continuation window `[start, end]` with its ball and constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PicardWindow {
    pub start: f64,
    pub end: f64,
    pub start_norm: f64,
    pub radius: f64,
    pub growth: f64,
    pub lipschitz: f64,
    pub existence_time: f64,
    pub iterations: usize,
    pub contraction_factors: Vec<f64>,
    pub final_update: f64,
    pub converged: bool,
}

struct WindowOutcome {
    states: Vec<Field>,
    residuals: Vec<f64>,
    iterations: usize,
    factors: Vec<f64>,
    final_update: f64,
    converged: bool,
}

fn nonlinear_values(layout: &BoxLayout, p: &NCPolynomial, states: &[Field], cutoff: i64) -> Result<Vec<Field>> {
    states
        .par_iter()
        .map(|f| Ok(layout.to_field(&p.evaluate_with(&layout.to_element(f)?, Some(cutoff))?)))
        .collect()
}

fn iterate(
    layout: &BoxLayout,
    p: &NCPolynomial,
    start: &[Complex64],
    grid: &[f64],
    cfg: &SolverConfig,
    k: u32,
) -> Result<WindowOutcome> {
    let mut current: Vec<Field> = match cfg.initial_guess {
        InitialGuess::Heat => grid.iter().map(|t| layout.heat(start, t - grid[0])).collect(),
        InitialGuess::Zero => {
            let mut v = vec![layout.zeros(); grid.len()];
            v[0] = start.to_vec();
            v
        }
    };
    let mut factors = Vec::new();
    let mut previous: Option<f64> = None;
    for iteration in 1..=cfg.max_iterations {
        let nonlinear = nonlinear_values(layout, p, &current, cfg.cutoff)?;
        let next = integrate_window(layout, start, &nonlinear, grid, cfg.rule);
        let update = next
            .iter()
            .zip(&current)
            .map(|(a, b)| layout.h_distance(a, b, k))
            .fold(0.0, f64::max);
        let scale = next.iter().map(|f| layout.h_norm(f, k)).fold(1.0, f64::max);
        if !update.is_finite() {
            return Err(Error::NonFinite { mode: Vec::new() });
        }
        if let Some(prev) = previous {
            if prev > 100.0 * f64::EPSILON * scale {
                factors.push(update / prev);
            }
        }
        previous = Some(update);
        current = next;
        if update <= cfg.tolerance * scale {
            let nonlinear = nonlinear_values(layout, p, &current, cfg.cutoff)?;
            let image = integrate_window(layout, start, &nonlinear, grid, cfg.rule);
            let residuals = image.iter().zip(&current).map(|(a, b)| layout.h_distance(a, b, k)).collect();
            return Ok(WindowOutcome {
                states: current,
                residuals,
                iterations: iteration,
                factors,
                final_update: update,
                converged: true,
            });
        }
    }
    Ok(WindowOutcome {
        residuals: vec![previous.unwrap_or(0.0); current.len()],
        states: current,
        iterations: cfg.max_iterations,
        factors,
        final_update: previous.unwrap_or(f64::INFINITY),
        converged: false,
    })
}

fn window_grid(t0: f64, end: f64, cfg: &SolverConfig) -> Vec<f64> {
    let mut grid = vec![t0];
    let mut t = t0;
    if let (Some(first), true) = (cfg.first_step, t0 == 0.0) {
        let mut target = first;
        while target < end && target - t <= cfg.grid_step && target < t0 + (end - t0) * 0.5 {
            grid.push(target);
            t = target;
            target *= 2.0;
        }
    }
    let mut pieces = ((end - t) / cfg.grid_step).ceil().max(1.0) as usize;
    if grid.len() + pieces < 3 {
        pieces = 2;
    }
    for j in 1..pieces {
        grid.push(t + (end - t) * j as f64 / pieces as f64);
    }
    grid.push(end);
    grid
}

/// Fixed point of the Duhamel map on a single grid.
#[derive(Clone, Debug)]
pub struct WindowSolution {
    pub states: Vec<NCElement>,
    pub residuals: Vec<f64>,
    pub contraction_factors: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Picard iteration for the Duhamel map on `grid` starting from `u_start` at
/// `grid[0]`, with distances measured in `H^k` for `k = cfg.k`.
pub fn picard_window(u_start: &NCElement, p: &NCPolynomial, grid: &[f64], cfg: &SolverConfig) -> Result<WindowSolution> {
    validate_grid(grid)?;
    let layout = BoxLayout::new(u_start.theta().clone(), cfg.cutoff);
    let out = iterate(&layout, p, &layout.to_field(u_start), grid, cfg, cfg.k)?;
    Ok(WindowSolution {
        states: out.states.iter().map(|f| layout.to_element(f)).collect::<Result<Vec<_>>>()?,
        residuals: out.residuals,
        contraction_factors: out.factors,
        iterations: out.iterations,
        converged: out.converged,
    })
}

/// Mild solution on `[0, t_end]` by Picard iteration, restarted on successive
/// windows whose length is the guaranteed existence time of the current datum.
///
/// A window fails, and the run stops with [`Status::ToleranceFailure`], if the
/// iteration does not converge or any contraction factor exceeds
/// [`CONTRACTION_LIMIT`]. The datum is projected to the Galerkin box.
pub fn picard_solve(u0: &NCElement, p: &NCPolynomial, cfg: &SolverConfig) -> Result<SolutionTrajectory> {
    let n = u0.dim();
    cfg.validate(n)?;
    if p.theta().as_ref() != u0.theta().as_ref() {
        return Err(Error::ThetaMismatch);
    }
    let layout = BoxLayout::new(u0.theta().clone(), cfg.cutoff);
    let u0 = u0.project(cfg.cutoff);
    let mut traj = SolutionTrajectory::start(&u0, cfg.k, cfg.cutoff);
    let mut start = layout.to_field(&u0);
    let mut t0 = 0.0;
    let horizon = cfg.t_end * (1.0 - 1e-14);
    while t0 < horizon {
        let norm = layout.h_norm(&start, cfg.k);
        let radius = match (cfg.radius, traj.windows.is_empty()) {
            (Some(r), true) => r,
            (Some(r), false) => r.max(SolverConfig::default_radius(norm)),
            (None, _) => SolverConfig::default_radius(norm),
        };
        let growth = growth_bound(p, cfg.k, radius)?;
        let lipschitz = lipschitz_bound(p, cfg.k, radius)?;
        let existence = local_existence_time(norm, growth, lipschitz, radius, cfg.t_end - t0)?;
        let end = (t0 + existence).min(cfg.t_end);
        if !(end > t0) {
            traj.fail(Status::ToleranceFailure, format!("existence time underflow at t = {t0:e}"));
            break;
        }
        let grid = window_grid(t0, end, cfg);
        let out = iterate(&layout, p, &start, &grid, cfg, cfg.k)?;
        for j in 1..grid.len() {
            traj.push(grid[j], layout.to_element(&out.states[j])?, out.residuals[j], cfg.cutoff);
        }
        let worst = out.factors.iter().copied().fold(0.0, f64::max);
        traj.windows.push(PicardWindow {
            start: t0,
            end,
            start_norm: norm,
            radius,
            growth,
            lipschitz,
            existence_time: existence,
            iterations: out.iterations,
            contraction_factors: out.factors,
            final_update: out.final_update,
            converged: out.converged,
        });
        if !out.converged {
            traj.fail(Status::ToleranceFailure, format!("Picard iteration did not converge on [{t0:e}, {end:e}]"));
            break;
        }
        if worst > CONTRACTION_LIMIT {
            traj.fail(
                Status::ToleranceFailure,
                format!("contraction factor {worst:.3} above {CONTRACTION_LIMIT} on [{t0:e}, {end:e}]; grid too coarse"),
            );
            break;
        }
        start = out.states.last().expect("non-empty grid").clone();
        t0 = end;
    }
    Ok(traj)
}
