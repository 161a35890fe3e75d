//! Mild solutions of `u' + L u = P(u)` on a Galerkin box.
//!
//! States live on the box `|m|_inf <= N`; nonlinear terms are evaluated
//! exactly and projected back once. The Duhamel integral is integrated
//! modewise against the exact propagator, so the stiff linear part never
//! constrains the step.

mod duhamel;
mod field;
mod monitor;
mod picard;
mod stepping;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::calculus::h_norm;
use crate::element::NCElement;
use crate::error::{Error, Result};
use crate::lattice::ThetaMatrix;

pub use duhamel::{duhamel_map, product_weights, DuhamelRule};
pub use monitor::{bootstrap_regularity, shell_mass, smoothing_monitor, BootstrapReport, SmoothingReport};
pub use picard::{picard_solve, picard_window, InitialGuess, PicardWindow, WindowSolution, CONTRACTION_LIMIT};
pub use stepping::{exp_euler_step, phi1, solve_exp_euler, solve_until_blowup, BlowupEstimate};

/// Relative outer-shell `H^k` mass above which a run carries a truncation warning.
pub const SHELL_WARNING: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Picard,
    ExpEuler,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "picard" => Ok(Scheme::Picard),
            "exp-euler" => Ok(Scheme::ExpEuler),
            other => Err(Error::param("scheme", format!("expected `picard` or `exp-euler`, got `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Sobolev order of the solution space `H^k`.
    pub k: u32,
    /// Galerkin box radius.
    pub cutoff: i64,
    /// Ball radius; `None` takes `max(2.5 ||u_0||_{H^k}, 1)` per window.
    pub radius: Option<f64>,
    /// Largest Picard grid step.
    pub grid_step: f64,
    /// Geometric grid refinement towards `t = 0` starting from this step.
    pub first_step: Option<f64>,
    pub rule: DuhamelRule,
    pub initial_guess: InitialGuess,
    /// Picard stops once the sup-in-time `H^k` update is below this, relative to the state size.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Exponential Euler step.
    pub step: f64,
    pub min_step: f64,
    /// Largest accepted relative `H^k` growth per step before halving.
    pub safety: f64,
    pub t_end: f64,
    /// Blow-up threshold on `||u||_{H^k}`.
    pub threshold: f64,
    pub scheme: Scheme,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k: 2,
            cutoff: 8,
            radius: None,
            grid_step: 1e-3,
            first_step: None,
            rule: DuhamelRule::PiecewiseQuadratic,
            initial_guess: InitialGuess::Heat,
            tolerance: 1e-12,
            max_iterations: 200,
            step: 1e-3,
            min_step: 1e-12,
            safety: 0.01,
            t_end: 0.1,
            threshold: 1e3,
            scheme: Scheme::Picard,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if 2 * self.k as usize <= n {
            return Err(Error::DivergentSeries { k: self.k, n });
        }
        if self.cutoff < 1 {
            return Err(Error::param("cutoff", "must be at least 1"));
        }
        if let Some(r) = self.radius {
            if !(r > 0.0) {
                return Err(Error::param("radius", "must be positive"));
            }
            if !(self.threshold > r) {
                return Err(Error::param("threshold", "must exceed the ball radius"));
            }
        }
        for (key, v) in [("grid_step", self.grid_step), ("step", self.step), ("min_step", self.min_step), ("safety", self.safety)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(key, "must be positive and finite"));
            }
        }
        if let Some(fs) = self.first_step {
            if !(fs > 0.0 && fs <= self.grid_step) {
                return Err(Error::param("first_step", "must lie in (0, grid_step]"));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::param("tolerance", "must be positive"));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::param("t_end", "must be positive and finite"));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::param("threshold", "must be positive"));
        }
        Ok(())
    }

    pub fn default_radius(u0_norm: f64) -> f64 {
        (2.5 * u0_norm).max(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Completed,
    BlowupDetected,
    ToleranceFailure,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Completed => "completed",
            Status::BlowupDetected => "blowup_detected",
            Status::ToleranceFailure => "tolerance_failure",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolutionTrajectory {
    pub theta: Arc<ThetaMatrix>,
    pub k: u32,
    pub times: Vec<f64>,
    pub states: Vec<NCElement>,
    pub h_k_norms: Vec<f64>,
    pub h_k1_norms: Vec<f64>,
    /// `||u(t) - (Phi u)(t)||_{H^k}` at the last Picard iterate; zero for time stepping.
    pub residuals: Vec<f64>,
    pub shell_mass: Vec<f64>,
    pub status: Status,
    pub windows: Vec<PicardWindow>,
    pub blowup: Option<BlowupEstimate>,
    pub message: Option<String>,
}

impl SolutionTrajectory {
    pub(crate) fn start(u0: &NCElement, k: u32, cutoff: i64) -> Self {
        let mut traj = SolutionTrajectory {
            theta: u0.theta().clone(),
            k,
            times: Vec::new(),
            states: Vec::new(),
            h_k_norms: Vec::new(),
            h_k1_norms: Vec::new(),
            residuals: Vec::new(),
            shell_mass: Vec::new(),
            status: Status::Completed,
            windows: Vec::new(),
            blowup: None,
            message: None,
        };
        traj.push(0.0, u0.clone(), 0.0, cutoff);
        traj
    }

    pub(crate) fn push(&mut self, t: f64, u: NCElement, residual: f64, cutoff: i64) {
        self.h_k_norms.push(h_norm(&u, self.k as f64));
        self.h_k1_norms.push(h_norm(&u, self.k as f64 + 1.0));
        self.shell_mass.push(shell_mass(&u, self.k, cutoff));
        self.residuals.push(residual);
        self.times.push(t);
        self.states.push(u);
    }

    pub(crate) fn fail(&mut self, status: Status, message: impl Into<String>) {
        self.status = status;
        self.message = Some(message.into());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectories start at t = 0")
    }

    pub fn final_state(&self) -> &NCElement {
        self.states.last().expect("trajectories start at t = 0")
    }

    /// State at a grid time, if `t` is one.
    pub fn state_at(&self, t: f64) -> Option<&NCElement> {
        let scale = t.abs().max(1.0);
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * scale)
            .map(|i| &self.states[i])
    }

    /// All recorded Picard contraction factors.
    pub fn contraction_factors(&self) -> impl Iterator<Item = f64> + '_ {
        self.windows.iter().flat_map(|w| w.contraction_factors.iter().copied())
    }

    pub fn max_contraction(&self) -> Option<f64> {
        self.contraction_factors().fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
    }

    pub fn max_shell_mass(&self) -> f64 {
        self.shell_mass.iter().copied().fold(0.0, f64::max)
    }

    pub fn truncation_warning(&self) -> bool {
        self.max_shell_mass() > SHELL_WARNING
    }

    /// CSV with header `t,h_k_norm,h_k1_norm,residual,shell_mass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,h_k_norm,h_k1_norm,residual,shell_mass\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e}\n",
                self.times[i], self.h_k_norms[i], self.h_k1_norms[i], self.residuals[i], self.shell_mass[i]
            ));
        }
        out
    }
}

/// `T = min((R - ||u_0||) / M_R, 1 / (2 L_R))`, so that the Duhamel map sends
/// the ball of radius `R` into itself and is a contraction with factor 1/2.
/// A vanishing denominator drops its constraint; if both vanish the result is
/// `cap`.
pub fn local_existence_time(u0_norm: f64, growth: f64, lipschitz: f64, radius: f64, cap: f64) -> Result<f64> {
    if !(radius > 2.0 * u0_norm) {
        return Err(Error::BallTooSmall { radius, norm: u0_norm });
    }
    let by_growth = if growth > 0.0 { (radius - u0_norm) / growth } else { f64::INFINITY };
    let by_lipschitz = if lipschitz > 0.0 { 0.5 / lipschitz } else { f64::INFINITY };
    let t = by_growth.min(by_lipschitz);
    Ok(if t.is_finite() { t } else { cap })
}
