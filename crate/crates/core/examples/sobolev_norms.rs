//! Derivations, Sobolev norms and the equivalence of `H^k` and `W^{k,2}` on a box.

use std::sync::Arc;

use nctorus::calculus::{derivation, equivalence_constants, sobolev_h_norm, sobolev_seminorm, sobolev_w_norm};
use nctorus::{MultiIndex, NCElement, ThetaMatrix};

fn main() -> nctorus::Result<()> {
    let theta = Arc::new(ThetaMatrix::golden(2));
    let a = NCElement::random(theta, 5, 6, 2.0);

    for s in [0.0, 0.5, 1.0, 2.0, 3.0] {
        println!("||a||_H^{s:<3} = {:.6}", sobolev_h_norm(&a, s)?);
    }
    for k in 0..=3 {
        let (c, big_c) = equivalence_constants(k, 2, 6);
        let ratio = sobolev_w_norm(&a, k) / sobolev_h_norm(&a, k as f64)?;
        println!("k = {k}: |a|_k = {:10.4}, W/H = {ratio:.4} in [{c:.4}, {big_c:.4}]", sobolev_seminorm(&a, k));
    }

    let d1 = derivation(&a, &MultiIndex::new(&[1, 0]))?;
    let d2 = derivation(&a, &MultiIndex::new(&[0, 1]))?;
    let mixed = derivation(&d1, &MultiIndex::new(&[0, 1]))?;
    println!("delta_2 delta_1 a - delta^(1,1) a = {:.2e}", mixed.max_abs_diff(&derivation(&a, &MultiIndex::new(&[1, 1]))?));
    println!("||delta_1 a||^2 + ||delta_2 a||^2 = {:.6}", d1.l2_norm().powi(2) + d2.l2_norm().powi(2));
    println!("|a|_1^2                          = {:.6}", sobolev_seminorm(&a, 1).powi(2));
    Ok(())
}
