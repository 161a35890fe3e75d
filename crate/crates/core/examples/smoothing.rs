//! Parabolic smoothing on nonconstant 2D data, and exponential Euler converging to the Picard reference.

use std::sync::Arc;

use nctorus::calculus::sobolev_h_norm;
use nctorus::nonlinear::NCPolynomial;
use nctorus::solver::{picard_solve, smoothing_monitor, solve_exp_euler, SolverConfig};
use nctorus::stats::loglog_fit;
use nctorus::{NCElement, ThetaMatrix};

fn main() -> nctorus::Result<()> {
    let theta = Arc::new(ThetaMatrix::golden(2));
    let p = NCPolynomial::power(theta.clone(), 2, 1.0);
    let raw = NCElement::random(theta, 42, 4, 2.0);
    let u0 = raw.scale_real(0.5 / sobolev_h_norm(&raw, 2.0)?);
    let cfg = SolverConfig { k: 2, cutoff: 10, t_end: 0.02, first_step: Some(1e-4), ..Default::default() };

    let reference = picard_solve(&u0, &p, &cfg)?;
    let report = smoothing_monitor(&reference, &p, Some(cfg.cutoff))?;
    println!("smoothing ratio: max {:.4} at t = {:.2e} over {} times", report.max_ratio, report.argmax, report.times.len());
    for (t, r) in report.times.iter().zip(&report.ratios).step_by(8) {
        println!("  t = {t:.3e}  ratio {r:.4}");
    }

    let steps = [2e-3, 1e-3, 5e-4, 2.5e-4];
    let mut errors = Vec::new();
    for step in steps {
        let run = solve_exp_euler(&u0, &p, &SolverConfig { step, ..cfg.clone() })?;
        let err = sobolev_h_norm(&run.final_state().sub(reference.final_state())?, 2.0)?;
        println!("exp-euler h = {step:.1e}: H^2 error {err:.3e}");
        errors.push(err);
    }
    println!("measured order {:.3}", loglog_fit(&steps, &errors).expect("four points").slope);
    Ok(())
}
