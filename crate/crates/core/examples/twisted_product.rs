//! Twisted convolution on the noncommutative torus: generators, cocycle, adjoint, trace.

use std::sync::Arc;

use nctorus::{cocycle, Mode, NCElement, ThetaMatrix};
use num_complex::Complex64;

fn main() -> nctorus::Result<()> {
    let theta = Arc::new(ThetaMatrix::golden(2));
    let one = Complex64::new(1.0, 0.0);
    let u1 = NCElement::monomial(theta.clone(), Mode::unit(2, 0), one);
    let u2 = NCElement::monomial(theta.clone(), Mode::unit(2, 1), one);

    // U_2 U_1 = e^{2 pi i theta_21} U_1 U_2
    let lhs = u2.multiply(&u1)?;
    let rhs = u1.multiply(&u2)?;
    let phase = lhs.coeff(&Mode::new(&[1, 1])) / rhs.coeff(&Mode::new(&[1, 1]));
    println!("theta_21 mod 1 = {:.6}, phase of U2 U1 / U1 U2 = {:.6}", theta.get(1, 0).rem_euclid(1.0), (phase.arg() / std::f64::consts::TAU).rem_euclid(1.0));

    let (r, s, t) = (Mode::new(&[3, -1]), Mode::new(&[-2, 5]), Mode::new(&[4, 4]));
    let left = cocycle(&theta, &r, &s)? * cocycle(&theta, &r.add(&s), &t)?;
    let right = cocycle(&theta, &r, &s.add(&t))? * cocycle(&theta, &s, &t)?;
    println!("cocycle identity defect: {:.2e}", (left - right).norm());

    let a = NCElement::random(theta.clone(), 1, 3, 1.0);
    let b = NCElement::random(theta.clone(), 2, 3, 1.0);
    let ab = a.multiply(&b)?;
    println!("support sizes: a {}, b {}, ab {}", a.support_len(), b.support_len(), ab.support_len());
    println!("tau(ab) - tau(ba) = {:.2e}", (ab.trace() - b.multiply(&a)?.trace()).norm());
    println!("(ab)* - b* a*     = {:.2e}", ab.adjoint().max_abs_diff(&b.adjoint().multiply(&a.adjoint())?));
    println!("tau(a* a) - |a|^2 = {:.2e}", (a.adjoint().multiply(&a)?.trace().re - a.l2_norm().powi(2)).abs());
    Ok(())
}
