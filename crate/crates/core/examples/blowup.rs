//! Exponential Euler with step halving up to the blow-up time of `u' + L u = u^2`, `u(0) = 1`.

use std::sync::Arc;

use nctorus::solver::{solve_until_blowup, Scheme, SolverConfig};
use nctorus::nonlinear::NCPolynomial;
use nctorus::{NCElement, ThetaMatrix};

fn main() -> nctorus::Result<()> {
    let theta = Arc::new(ThetaMatrix::zero(1));
    let p = NCPolynomial::power(theta.clone(), 2, 1.0);
    let u0 = NCElement::identity(theta);
    for threshold in [1e2, 1e3, 1e4] {
        let cfg = SolverConfig { k: 1, cutoff: 2, step: 1e-3, t_end: 5.0, threshold, scheme: Scheme::ExpEuler, ..Default::default() };
        let traj = solve_until_blowup(&u0, &p, &cfg)?;
        match traj.blowup {
            Some(b) => println!(
                "threshold {threshold:.0e}: coarse {:.6}, fine {:.6}, extrapolated {:.6}, interval [{:.6}, {:.6}] contains 1: {}",
                b.coarse, b.fine, b.extrapolated, b.lower, b.upper, b.contains(1.0)
            ),
            None => println!("threshold {threshold:.0e}: {}", traj.status),
        }
    }
    Ok(())
}
