use std::sync::Arc;

use num_complex::Complex64;

use crate::calculus::laplacian_symbol;
use crate::element::NCElement;
use crate::error::Result;
use crate::lattice::{LatticeBox, ThetaMatrix};

pub(crate) type Field = Vec<Complex64>;

/// Dense coefficient layout on a Galerkin box with the Laplacian eigenvalues
/// grouped by `|m|^2` so that modewise weights are computed once per shell.
pub(crate) struct BoxLayout {
    pub theta: Arc<ThetaMatrix>,
    pub bx: LatticeBox,
    pub shell_of: Vec<usize>,
    pub shell_lambda: Vec<f64>,
    lambda: Vec<f64>,
}

impl BoxLayout {
    pub fn new(theta: Arc<ThetaMatrix>, cutoff: i64) -> Self {
        let bx = LatticeBox::new(theta.dim(), cutoff);
        let keys: Vec<i64> = bx.iter().map(|m| m.coords().iter().map(|c| c * c).sum()).collect();
        let mut distinct = keys.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let shell_of = keys.iter().map(|k| distinct.binary_search(k).expect("present")).collect();
        let lambda = bx.iter().map(|m| laplacian_symbol(&m)).collect();
        let shell_lambda = distinct
            .iter()
            .map(|&k| 4.0 * std::f64::consts::PI * std::f64::consts::PI * k as f64)
            .collect();
        BoxLayout {
            theta,
            bx,
            shell_of,
            shell_lambda,
            lambda,
        }
    }

    pub fn len(&self) -> usize {
        self.shell_of.len()
    }

    pub fn zeros(&self) -> Field {
        vec![Complex64::new(0.0, 0.0); self.len()]
    }

    /// Coefficients inside the box; modes outside are dropped.
    pub fn to_field(&self, a: &NCElement) -> Field {
        let mut f = self.zeros();
        for (m, c) in a.iter() {
            if let Some(i) = self.bx.index_of(m.coords()) {
                f[i] = *c;
            }
        }
        f
    }

    pub fn to_element(&self, f: &[Complex64]) -> Result<NCElement> {
        NCElement::from_coeffs(
            self.theta.clone(),
            f.iter()
                .enumerate()
                .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
                .map(|(i, c)| (self.bx.mode_at(i), *c)),
        )
    }

    /// Multiplies mode `i` by `table[shell_of[i]]`.
    pub fn scale_by_shell(&self, f: &[Complex64], table: &[f64]) -> Field {
        f.iter().zip(&self.shell_of).map(|(c, &s)| c * table[s]).collect()
    }

    pub fn heat(&self, f: &[Complex64], t: f64) -> Field {
        let table: Vec<f64> = self.shell_lambda.iter().map(|l| (-l * t).exp()).collect();
        self.scale_by_shell(f, &table)
    }

    /// `(sum_m <m>^{2k} |c_m|^2)^{1/2}`.
    pub fn h_norm(&self, f: &[Complex64], k: u32) -> f64 {
        f.iter()
            .zip(&self.lambda)
            .map(|(c, l)| (1.0 + l).powi(k as i32) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn h_distance(&self, f: &[Complex64], g: &[Complex64], k: u32) -> f64 {
        f.iter()
            .zip(g)
            .zip(&self.lambda)
            .map(|((a, b), l)| (1.0 + l).powi(k as i32) * (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn axpy(acc: &mut [Complex64], w: &[Complex64]) {
    for (a, b) in acc.iter_mut().zip(w) {
        *a += b;
    }
}
