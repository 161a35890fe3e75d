use serde::Serialize;

use super::picard::picard_solve;
use super::{SolutionTrajectory, SolverConfig, Status};
use crate::calculus::h_norm;
use crate::element::NCElement;
use crate::error::{Error, Result};
use crate::nonlinear::NCPolynomial;

/// `H^k` mass of the outer shell `|m|_inf in {N - 1, N}` relative to `||u||_{H^k}`.
pub fn shell_mass(u: &NCElement, k: u32, cutoff: i64) -> f64 {
    let total = h_norm(u, k as f64);
    if total == 0.0 {
        return 0.0;
    }
    let shell = u.weighted_l2_norm(|m| {
        if m.sup_norm() >= cutoff - 1 {
            crate::calculus::bracket(m).powi(2 * k as i32)
        } else {
            0.0
        }
    });
    shell / total
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothingReport {
    pub k: u32,
    /// `sup_s ||P(u(s))||_{H^k}` along the trajectory.
    pub forcing_sup: f64,
    pub initial_norm: f64,
    pub times: Vec<f64>,
    /// `||u(t)||_{H^{k+1}} / ((1 + t^{-1/2}) ||u_0||_{H^k} + M_T (t + t^{1/2}))`.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub argmax: f64,
}

/// Empirical constant of the smoothing estimate along a trajectory.
pub fn smoothing_monitor(traj: &SolutionTrajectory, p: &NCPolynomial, cutoff: Option<i64>) -> Result<SmoothingReport> {
    let k = traj.k as f64;
    let mut forcing_sup: f64 = 0.0;
    for u in &traj.states {
        forcing_sup = forcing_sup.max(h_norm(&p.evaluate_with(u, cutoff)?, k));
    }
    let initial_norm = traj.h_k_norms[0];
    let mut times = Vec::new();
    let mut ratios = Vec::new();
    for (t, u) in traj.times.iter().zip(&traj.states) {
        if *t <= 0.0 {
            continue;
        }
        let bound = (1.0 + t.powf(-0.5)) * initial_norm + forcing_sup * (t + t.sqrt());
        times.push(*t);
        ratios.push(if bound > 0.0 { h_norm(u, k + 1.0) / bound } else { 0.0 });
    }
    let (argmax, max_ratio) = times
        .iter()
        .zip(&ratios)
        .fold((0.0, 0.0), |acc, (t, r)| if *r > acc.1 { (*t, *r) } else { acc });
    Ok(SmoothingReport {
        k: traj.k,
        forcing_sup,
        initial_norm,
        times,
        ratios,
        max_ratio,
        argmax,
    })
}

#[derive(Clone, Debug)]
pub struct BootstrapReport {
    /// Whole run with norms in `H^{k+r}` and `H^{k+r+1}`.
    pub trajectory: SolutionTrajectory,
    /// Restart times `epsilon_j = j epsilon`.
    pub stage_times: Vec<f64>,
    /// `||u(epsilon_j)||_{H^{k+j}}`.
    pub stage_norms: Vec<f64>,
}

/// Solves on `[0, epsilon]` in `H^k`, then restarts at each `epsilon_j = j epsilon`
/// in `H^{k+j}` for `j = 1..=r`; the last stage runs to `cfg.t_end`.
pub fn bootstrap_regularity(
    u0: &NCElement,
    p: &NCPolynomial,
    cfg: &SolverConfig,
    r: u32,
    epsilon: f64,
) -> Result<BootstrapReport> {
    if r == 0 {
        return Ok(BootstrapReport {
            trajectory: picard_solve(u0, p, cfg)?,
            stage_times: Vec::new(),
            stage_norms: Vec::new(),
        });
    }
    if !(epsilon > 0.0) || !(r as f64 * epsilon < cfg.t_end) {
        return Err(Error::param("epsilon", "need 0 < r * epsilon < t_end"));
    }
    let top = cfg.k + r;
    let mut out = SolutionTrajectory::start(&u0.project(cfg.cutoff), top, cfg.cutoff);
    let mut stage_times = Vec::new();
    let mut stage_norms = Vec::new();
    let mut start = u0.clone();
    for j in 0..=r {
        let offset = j as f64 * epsilon;
        let duration = if j == r { cfg.t_end - offset } else { epsilon };
        let stage_cfg = SolverConfig {
            k: cfg.k + j,
            t_end: duration,
            first_step: if j == 0 { cfg.first_step } else { None },
            ..cfg.clone()
        };
        let traj = picard_solve(&start, p, &stage_cfg)?;
        for i in 1..traj.len() {
            out.push(offset + traj.times[i], traj.states[i].clone(), traj.residuals[i], cfg.cutoff);
        }
        out.windows.extend(traj.windows.iter().cloned().map(|mut w| {
            w.start += offset;
            w.end += offset;
            w
        }));
        if traj.status != Status::Completed {
            out.status = traj.status;
            out.message = traj.message.clone();
            break;
        }
        start = traj.final_state().clone();
        if j < r {
            stage_times.push(offset + epsilon);
            stage_norms.push(h_norm(&start, (cfg.k + j + 1) as f64));
        }
    }
    Ok(BootstrapReport {
        trajectory: out,
        stage_times,
        stage_norms,
    })
}
