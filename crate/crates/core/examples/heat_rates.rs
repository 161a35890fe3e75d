//! Exact `L^2` norms of `delta^alpha L^ell P_t`, their log-log slopes and the single-mode witness.

use std::sync::Arc;

use nctorus::heat::{l2_operator_norm, sharpness_witness};
use nctorus::stats::loglog_fit;
use nctorus::{MultiIndex, ThetaMatrix};

fn main() -> nctorus::Result<()> {
    let times: Vec<f64> = (6..=16).map(|j| 2f64.powi(-j)).collect();
    for (alpha, ell) in [(vec![1, 0], 0), (vec![2, 0], 0), (vec![0, 0], 1), (vec![1, 0], 1)] {
        let alpha = MultiIndex::new(&alpha);
        let norms = times.iter().map(|&t| l2_operator_norm(&alpha, ell, t)).collect::<nctorus::Result<Vec<_>>>()?;
        let fit = loglog_fit(&times, &norms).expect("enough points");
        let expected = -(ell as f64 + alpha.order() as f64 / 2.0);
        println!("alpha = {:?}, ell = {ell}: slope {:+.4} (expected {expected:+.2}), R^2 = {:.5}", alpha.entries(), fit.slope, fit.r_squared);
    }

    let theta = Arc::new(ThetaMatrix::golden(2));
    let alpha = MultiIndex::new(&[1, 0]);
    println!("\n{:>10} {:>6} {:>12} {:>12} {:>10}", "t", "k_t", "witness", "norm", "w t^{1/2}");
    for j in 0..=10 {
        let t = 10f64.powf(-7.5 + 0.5 * j as f64);
        let w = sharpness_witness(theta.clone(), &alpha, 0, t)?;
        let norm = l2_operator_norm(&alpha, 0, t)?;
        println!("{t:>10.3e} {:>6} {:>12.5e} {:>12.5e} {:>10.5}", w.k_t, w.value, norm, w.value * t.sqrt());
    }
    Ok(())
}
