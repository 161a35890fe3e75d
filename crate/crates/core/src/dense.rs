//! Box-backed product kernel used when products are projected to a Galerkin box.
//!
//! For fixed `r` the cocycle phase is linear in `s`, so
//! `omega(r, s) = prod_j e(c_j(r) s_j)` and each factor is read from a
//! per-axis table instead of evaluating a sine/cosine per pair.

use num_complex::Complex64;

use crate::element::NCElement;
use crate::error::Result;
use crate::lattice::{unit_phase, LatticeBox, Mode};

pub(crate) fn multiply_projected(a: &NCElement, b: &NCElement, bx: LatticeBox) -> Result<NCElement> {
    let n = a.dim();
    let theta = a.theta().clone();
    let flat = theta.is_zero();
    let b_radius = b.support_radius();
    let width = (2 * b_radius + 1) as usize;

    let rhs: Vec<(&Mode, Complex64)> = b.iter().map(|(m, c)| (m, *c)).collect();
    let mut acc = vec![Complex64::new(0.0, 0.0); bx.cardinality()];
    let mut touched = vec![false; bx.cardinality()];
    let mut tables = vec![Complex64::new(1.0, 0.0); n * width];
    let mut sum = vec![0i64; n];

    for (r, x) in a.iter() {
        let rc = r.coords();
        if !flat {
            let row = theta.phase_row(rc);
            for j in 0..n {
                for (i, s) in (-b_radius..=b_radius).enumerate() {
                    tables[j * width + i] = if row[j] == 0.0 || s == 0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        unit_phase(row[j] * s as f64)
                    };
                }
            }
        }
        for (s, y) in &rhs {
            let sc = s.coords();
            let mut inside = true;
            for j in 0..n {
                sum[j] = rc[j] + sc[j];
                if sum[j].abs() > bx.radius {
                    inside = false;
                    break;
                }
            }
            if !inside {
                continue;
            }
            let idx = bx.index_of(&sum).expect("inside box");
            let mut term = x * y;
            if !flat {
                for j in 0..n {
                    term *= tables[j * width + (sc[j] + b_radius) as usize];
                }
            }
            acc[idx] += term;
            touched[idx] = true;
        }
    }

    let entries = acc
        .into_iter()
        .enumerate()
        .filter(|(i, _)| touched[*i])
        .map(|(i, c)| (bx.mode_at(i), c));
    NCElement::from_coeffs(theta, entries)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::element::ProductPolicy;
    use crate::lattice::ThetaMatrix;

    #[test]
    fn dense_and_sparse_backends_agree() {
        for (n, theta) in [
            (1, ThetaMatrix::zero(1)),
            (2, ThetaMatrix::golden(2)),
            (3, ThetaMatrix::golden(3)),
        ] {
            let theta = Arc::new(theta);
            let a = NCElement::random(theta.clone(), 100 + n as u64, 3, 1.0);
            let b = NCElement::random(theta.clone(), 200 + n as u64, 2, 0.5);
            for radius in [2, 4, 5] {
                let bx = LatticeBox::new(n, radius);
                let dense = a.multiply_with(&b, ProductPolicy::ProjectToBox(radius)).unwrap();
                let sparse = a.convolve_sparse(&b, Some(bx));
                assert!(dense.max_abs_diff(&sparse) < 1e-13, "n={n} radius={radius}");
                assert!(dense.support_radius() <= radius);
            }
        }
    }

    #[test]
    fn large_indices_keep_unit_modulus() {
        let theta = Arc::new(ThetaMatrix::golden(2));
        let r = Mode::new(&[90, -70]);
        let s = Mode::new(&[-65, 82]);
        let ur = NCElement::monomial(theta.clone(), r.clone(), Complex64::new(1.0, 0.0));
        let us = NCElement::monomial(theta, s.clone(), Complex64::new(1.0, 0.0));
        let p = ur.multiply_with(&us, ProductPolicy::ProjectToBox(100)).unwrap();
        assert!((p.coeff(&r.add(&s)).norm() - 1.0).abs() < 1e-15);
    }
}
