//! Regularity bootstrap: restart the flow in `H^{k+j}` at `t = j epsilon`.

use std::sync::Arc;

use nctorus::calculus::sobolev_h_norm;
use nctorus::nonlinear::NCPolynomial;
use nctorus::solver::{bootstrap_regularity, SolverConfig};
use nctorus::{NCElement, ThetaMatrix};

fn main() -> nctorus::Result<()> {
    let theta = Arc::new(ThetaMatrix::golden(1));
    let p = NCPolynomial::power(theta.clone(), 2, 1.0);
    let raw = NCElement::random(theta, 7, 3, 2.0);
    let u0 = raw.scale_real(0.05 / sobolev_h_norm(&raw, 1.0)?);
    let cfg = SolverConfig { k: 1, cutoff: 8, t_end: 3e-3, grid_step: 1e-4, ..Default::default() };

    let report = bootstrap_regularity(&u0, &p, &cfg, 2, 1e-3)?;
    println!("status {}, {} nodes", report.trajectory.status, report.trajectory.len());
    for (j, (t, norm)) in report.stage_times.iter().zip(&report.stage_norms).enumerate() {
        println!("stage {}: ||u({t:.1e})||_H^{} = {norm:.6e}", j + 1, cfg.k + j as u32 + 1);
    }
    Ok(())
}
