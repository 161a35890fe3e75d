//! `P_t` gains `r` derivatives at cost `t^{-r/2}`, and `t Hess(P_t a)` stays bounded in `L^2`.

use std::sync::Arc;

use nctorus::heat::{hessian_bound_ratio, sobolev_regularize};
use nctorus::{NCElement, ThetaMatrix};

fn main() -> nctorus::Result<()> {
    let theta = Arc::new(ThetaMatrix::golden(2));
    let times: Vec<f64> = (0..=16).map(|j| 10f64.powf(-4.0 + 0.25 * j as f64)).collect();
    for radius in [4, 8] {
        let a = NCElement::random(theta.clone(), 3, radius, 5.0);
        for (k, r) in [(1, 1), (1, 2)] {
            let mut worst: f64 = 0.0;
            for &t in &times {
                worst = worst.max(sobolev_regularize(&a, k, r, t)?.1);
            }
            println!("box radius {radius}, k = {k}, r = {r}: max ratio {worst:.6}");
        }
        let hess = times.iter().map(|&t| hessian_bound_ratio(&a, t)).collect::<nctorus::Result<Vec<_>>>()?;
        println!("box radius {radius}: max t ||Hess P_t a|| / ||a|| = {:.6}", hess.iter().cloned().fold(0.0, f64::max));
    }
    Ok(())
}
