use num_complex::Complex64;
use serde::Serialize;

use super::field::{axpy, BoxLayout, Field};
use super::{SolutionTrajectory, SolverConfig, Status};
use crate::element::NCElement;
use crate::error::{Error, Result};
use crate::heat::heat_apply;
use crate::lattice::Mode;
use crate::nonlinear::NCPolynomial;

/// `phi_1(z) = (1 - e^{-z}) / z`, with `1 - z/2 + z^2/6` for `|z| < 1e-8`.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - z / 2.0 + z * z / 6.0
    } else {
        -(-z).exp_m1() / z
    }
}

/// `u^+ = P_h u + h phi_1(h L) P(u)`, with `P(u)` projected to `cutoff` when given.
pub fn exp_euler_step(u: &NCElement, h: f64, p: &NCPolynomial, cutoff: Option<i64>) -> Result<NCElement> {
    let forcing = p.evaluate_with(u, cutoff)?;
    let lambda = |m: &Mode| crate::calculus::laplacian_symbol(m);
    let kick = forcing.apply_real_multiplier(|m| h * phi1(h * lambda(m)));
    heat_apply(u, h)?.add(&kick)
}

fn step_field(layout: &BoxLayout, p: &NCPolynomial, u: &[Complex64], h: f64, cutoff: i64) -> Result<Field> {
    let forcing = layout.to_field(&p.evaluate_with(&layout.to_element(u)?, Some(cutoff))?);
    let table: Vec<f64> = layout.shell_lambda.iter().map(|l| h * phi1(h * l)).collect();
    let mut next = layout.heat(u, h);
    axpy(&mut next, &layout.scale_by_shell(&forcing, &table));
    Ok(next)
}

/// Threshold-crossing times of the blow-up run under two refinements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlowupEstimate {
    pub threshold: f64,
    /// Crossing time with `(step, safety)`.
    pub coarse: f64,
    /// Crossing time with `(step / 2, safety / 2)`.
    pub fine: f64,
    /// `2 fine - coarse`.
    pub extrapolated: f64,
    pub lower: f64,
    pub upper: f64,
}

impl BlowupEstimate {
    fn new(threshold: f64, coarse: f64, fine: f64) -> Self {
        let extrapolated = 2.0 * fine - coarse;
        BlowupEstimate {
            threshold,
            coarse,
            fine,
            extrapolated,
            lower: coarse.min(fine).min(extrapolated),
            upper: coarse.max(fine).max(extrapolated),
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lower <= t && t <= self.upper
    }
}

struct March {
    traj: SolutionTrajectory,
    crossing: Option<f64>,
}

fn march(u0: &NCElement, p: &NCPolynomial, cfg: &SolverConfig, step: f64, safety: Option<f64>) -> Result<March> {
    cfg.validate(u0.dim())?;
    if p.theta().as_ref() != u0.theta().as_ref() {
        return Err(Error::ThetaMismatch);
    }
    let layout = BoxLayout::new(u0.theta().clone(), cfg.cutoff);
    let u0 = u0.project(cfg.cutoff);
    let mut traj = SolutionTrajectory::start(&u0, cfg.k, cfg.cutoff);
    let mut u = layout.to_field(&u0);
    let mut norm = layout.h_norm(&u, cfg.k);
    let mut t = 0.0;
    let mut dt = step;
    let horizon = cfg.t_end * (1.0 - 1e-14);
    while t < horizon {
        let h = dt.min(cfg.t_end - t);
        let next = step_field(&layout, p, &u, h, cfg.cutoff)?;
        let next_norm = layout.h_norm(&next, cfg.k);
        if let Some(safety) = safety {
            let too_fast = !next_norm.is_finite() || (norm > 0.0 && (next_norm - norm) / norm > safety);
            if too_fast {
                dt *= 0.5;
                if dt < cfg.min_step {
                    traj.fail(Status::ToleranceFailure, format!("step underflow below {:e} at t = {t:e}", cfg.min_step));
                    return Ok(March { traj, crossing: None });
                }
                continue;
            }
        }
        if !next_norm.is_finite() {
            traj.fail(Status::ToleranceFailure, format!("non-finite state at t = {:e}", t + h));
            return Ok(March { traj, crossing: None });
        }
        let t_next = t + h;
        traj.push(t_next, layout.to_element(&next)?, 0.0, cfg.cutoff);
        if next_norm > cfg.threshold {
            // 1/||u|| is close to linear in t near a blow-up time.
            let crossing = t + h * (1.0 / norm - 1.0 / cfg.threshold) / (1.0 / norm - 1.0 / next_norm);
            traj.status = Status::BlowupDetected;
            traj.message = Some(format!("||u||_H^{} exceeded {:e} at t = {crossing:.6}", cfg.k, cfg.threshold));
            return Ok(March { traj, crossing: Some(crossing) });
        }
        u = next;
        norm = next_norm;
        t = t_next;
    }
    Ok(March { traj, crossing: None })
}

/// Exponential Euler with the fixed step `cfg.step` on `[0, t_end]`; the run
/// stops with [`Status::BlowupDetected`] once the `H^k` norm exceeds the threshold.
pub fn solve_exp_euler(u0: &NCElement, p: &NCPolynomial, cfg: &SolverConfig) -> Result<SolutionTrajectory> {
    Ok(march(u0, p, cfg, cfg.step, None)?.traj)
}

/// Exponential Euler with step halving whenever one step grows the `H^k`
/// norm by more than `cfg.safety` relative. The run is repeated with step and
/// safety halved; when both cross the threshold the trajectory carries the
/// interval spanned by the two crossing times and their Richardson extrapolation.
pub fn solve_until_blowup(u0: &NCElement, p: &NCPolynomial, cfg: &SolverConfig) -> Result<SolutionTrajectory> {
    let coarse = march(u0, p, cfg, cfg.step, Some(cfg.safety))?;
    let fine = march(u0, p, cfg, 0.5 * cfg.step, Some(0.5 * cfg.safety))?;
    let mut traj = fine.traj;
    if let (Some(a), Some(b)) = (coarse.crossing, fine.crossing) {
        traj.blowup = Some(BlowupEstimate::new(cfg.threshold, a, b));
    } else if coarse.traj.status != traj.status && traj.status != Status::ToleranceFailure {
        traj.fail(Status::ToleranceFailure, "refinements disagree on whether the threshold is crossed");
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::calculus::h_norm;
    use crate::lattice::ThetaMatrix;

    fn scalar(theta: &Arc<ThetaMatrix>, c: f64) -> NCElement {
        NCElement::identity(theta.clone()).scale_real(c)
    }

    #[test]
    fn phi1_branches_agree_at_switch() {
        assert_eq!(phi1(0.0), 1.0);
        let z: f64 = 1e-8;
        let series = 1.0 - z / 2.0 + z * z / 6.0;
        let closed = -(-z).exp_m1() / z;
        assert!((series - closed).abs() < 1e-16);
        assert!((phi1(2.0) - (1.0 - (-2.0f64).exp()) / 2.0).abs() < 1e-16);
    }

    #[test]
    fn step_examples() {
        let theta = Arc::new(ThetaMatrix::golden(2));
        let u = NCElement::random(theta.clone(), 1, 2, 1.0);
        let zero = NCPolynomial::zero(theta.clone());
        let h = 0.01;
        let step = exp_euler_step(&u, h, &zero, None).unwrap();
        assert!(step.max_abs_diff(&heat_apply(&u, h).unwrap()) < 1e-16);

        let p = NCPolynomial::power(theta.clone(), 2, 1.0);
        let step = exp_euler_step(&u, h, &p, None).unwrap();
        let z = Mode::zero(2);
        let forced = u.coeff(&z) + h * p.evaluate(&u).unwrap().coeff(&z);
        assert!((step.coeff(&z) - forced).norm() < 1e-15);

        let layout = BoxLayout::new(theta.clone(), 4);
        let dense = layout.to_element(&step_field(&layout, &p, &layout.to_field(&u), h, 4).unwrap()).unwrap();
        assert!(dense.max_abs_diff(&exp_euler_step(&u, h, &p, Some(4)).unwrap()) < 1e-15);
    }

    #[test]
    fn scalar_ode_error_is_first_order() {
        let theta = Arc::new(ThetaMatrix::zero(1));
        let p = NCPolynomial::power(theta.clone(), 2, 1.0);
        let u0 = scalar(&theta, 1.0);
        let error = |h: f64| {
            let cfg = SolverConfig { k: 1, cutoff: 1, step: h, t_end: 0.5, ..Default::default() };
            let traj = solve_exp_euler(&u0, &p, &cfg).unwrap();
            (traj.final_state().coeff(&Mode::zero(1)).re - 2.0).abs()
        };
        let ratio = error(1e-3) / error(5e-4);
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn quadratic_blowup_is_bracketed() {
        let theta = Arc::new(ThetaMatrix::golden(1));
        let p = NCPolynomial::power(theta.clone(), 2, 1.0);
        let cfg = SolverConfig { k: 1, cutoff: 2, t_end: 5.0, threshold: 1e3, ..Default::default() };
        let traj = solve_until_blowup(&scalar(&theta, 1.0), &p, &cfg).unwrap();
        assert_eq!(traj.status, Status::BlowupDetected);
        let est = traj.blowup.unwrap();
        assert!(est.contains(1.0), "{est:?}");
        assert!(est.lower >= 0.99 && est.upper <= 1.01);
    }

    #[test]
    fn linear_and_dissipative_runs_complete() {
        let theta = Arc::new(ThetaMatrix::golden(2));
        let cfg = SolverConfig { k: 2, cutoff: 4, t_end: 0.5, step: 1e-2, ..Default::default() };
        let u0 = NCElement::random(theta.clone(), 5, 2, 2.0);
        let traj = solve_until_blowup(&u0, &NCPolynomial::zero(theta.clone()), &cfg).unwrap();
        assert_eq!(traj.status, Status::Completed);
        assert!(traj.blowup.is_none());

        let c = 0.3;
        let damped = NCPolynomial::power(theta.clone(), 3, -1.0);
        let traj = solve_until_blowup(&scalar(&theta, c), &damped, &cfg).unwrap();
        assert_eq!(traj.status, Status::Completed);
        assert!(traj.h_k_norms.windows(2).all(|w| w[1] <= w[0]));
        // u' = -u^3 gives u(t) = c / sqrt(1 + 2 c^2 t)
        let exact = c / (1.0 + 2.0 * c * c * 0.5f64).sqrt();
        assert!((traj.final_state().coeff(&Mode::zero(2)).re - exact).abs() < 1e-3);
        assert!(h_norm(traj.final_state(), 2.0) < c);
    }
}
