//! Certified algebra and embedding constants against random products, and the nonlinearity bounds.

use std::sync::Arc;

use nctorus::calculus::sobolev_h_norm;
use nctorus::nonlinear::{algebra_constant, algebra_ratio, embedding_constant, growth_bound, l1_coefficient_norm, lipschitz_bound, NCPolynomial};
use nctorus::{NCElement, ThetaMatrix};

fn main() -> nctorus::Result<()> {
    for (n, k) in [(1, 1), (2, 2), (3, 2)] {
        let theta = Arc::new(ThetaMatrix::golden(n));
        let (a_const, c_const) = (algebra_constant(k, n)?, embedding_constant(k, n)?);
        let mut worst_product: f64 = 0.0;
        let mut worst_l1: f64 = 0.0;
        for seed in 0..200 {
            let a = NCElement::random(theta.clone(), seed, 3, 1.0);
            let b = NCElement::random(theta.clone(), seed + 1000, 3, 1.0);
            worst_product = worst_product.max(algebra_ratio(&a, &b, k)?);
            worst_l1 = worst_l1.max(l1_coefficient_norm(&a) / sobolev_h_norm(&a, k as f64)?);
        }
        println!("n = {n}, k = {k}: A = {a_const:.4} (worst {worst_product:.4}), C = {c_const:.4} (worst {worst_l1:.4})");
    }

    match algebra_constant(1, 2) {
        Ok(_) => unreachable!(),
        Err(e) => println!("k = 1, n = 2: {e}"),
    }

    let theta = Arc::new(ThetaMatrix::golden(2));
    let cubic = NCPolynomial::power(theta, 3, 1.0);
    for r in [0.5, 1.0, 2.0] {
        println!("u^3 on the H^2 ball of radius {r}: M_R = {:.3e}, L_R = {:.3e}", growth_bound(&cubic, 2, r)?, lipschitz_bound(&cubic, 2, r)?);
    }
    Ok(())
}
