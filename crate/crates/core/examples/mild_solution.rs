//! Picard iteration of the Duhamel map for `u' + L u = u^2` from the constant datum,
//! compared with the exact solution `1 / (1 - t)`.

use std::sync::Arc;

use nctorus::solver::{picard_solve, SolverConfig};
use nctorus::nonlinear::NCPolynomial;
use nctorus::{Mode, NCElement, ThetaMatrix};

fn main() -> nctorus::Result<()> {
    let theta = Arc::new(ThetaMatrix::golden(1));
    let p = NCPolynomial::power(theta.clone(), 2, 1.0);
    let u0 = NCElement::identity(theta);
    let cfg = SolverConfig { k: 1, cutoff: 2, grid_step: 1e-3, t_end: 0.9, ..Default::default() };
    let traj = picard_solve(&u0, &p, &cfg)?;

    println!("status {}, {} windows, {} nodes, max contraction {:.2e}", traj.status, traj.windows.len(), traj.len(), traj.max_contraction().unwrap_or(0.0));
    let mut worst: f64 = 0.0;
    for (t, u) in traj.times.iter().zip(&traj.states) {
        let exact = 1.0 / (1.0 - t);
        worst = worst.max((u.coeff(&Mode::zero(1)).re - exact).abs() / exact);
    }
    println!("max relative error against 1/(1-t): {worst:.2e}");
    for w in traj.windows.iter().take(3) {
        println!("{w:?}");
    }
    Ok(())
}
