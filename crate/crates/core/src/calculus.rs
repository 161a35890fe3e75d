//! Canonical derivations, the Laplacian and the Sobolev scales `H^s` and `W^{k,2}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::element::NCElement;
use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, Mode, MultiIndex};

const TWO_PI: f64 = 2.0 * PI;

/// `(2 pi i)^k`.
fn two_pi_i_pow(k: u32) -> Complex64 {
    let mag = TWO_PI.powi(k as i32);
    match k % 4 {
        0 => Complex64::new(mag, 0.0),
        1 => Complex64::new(0.0, mag),
        2 => Complex64::new(-mag, 0.0),
        _ => Complex64::new(0.0, -mag),
    }
}

/// Laplacian eigenvalue `4 pi^2 |m|^2`.
pub fn laplacian_symbol(m: &Mode) -> f64 {
    4.0 * PI * PI * m.norm_sq()
}

/// `<m> = (1 + 4 pi^2 |m|^2)^{1/2}`.
pub fn bracket(m: &Mode) -> f64 {
    (1.0 + laplacian_symbol(m)).sqrt()
}

/// `delta^alpha a = (2 pi i)^{|alpha|} sum_m m^alpha c_m U^m`.
pub fn derivation(a: &NCElement, alpha: &MultiIndex) -> Result<NCElement> {
    if alpha.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: alpha.dim(),
        });
    }
    let factor = two_pi_i_pow(alpha.order());
    Ok(a.apply_multiplier(|m| factor * alpha.monomial(m.coords())))
}

pub fn laplacian(a: &NCElement) -> NCElement {
    a.apply_real_multiplier(laplacian_symbol)
}

/// `nabla^k a = (delta^alpha a)_{|alpha| = k}`.
#[derive(Clone, Debug)]
pub struct DerivativeFamily {
    pub order: u32,
    pub entries: Vec<(MultiIndex, NCElement)>,
}

/// `(delta_i delta_j a)_{i,j}`, row-major.
#[derive(Clone, Debug)]
pub struct HessianMatrix {
    pub n: usize,
    pub entries: Vec<NCElement>,
}

impl HessianMatrix {
    pub fn get(&self, i: usize, j: usize) -> &NCElement {
        &self.entries[i * self.n + j]
    }
}

pub fn gradient_family(a: &NCElement, k: u32) -> DerivativeFamily {
    let entries = MultiIndex::enumerate(a.dim(), k)
        .into_iter()
        .map(|alpha| {
            let d = derivation(a, &alpha).expect("index built from the element dimension");
            (alpha, d)
        })
        .collect();
    DerivativeFamily { order: k, entries }
}

pub fn hessian(a: &NCElement) -> HessianMatrix {
    let n = a.dim();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let alpha = MultiIndex::axis(n, i, 1).add(&MultiIndex::axis(n, j, 1));
            entries.push(derivation(a, &alpha).expect("dimension matches"));
        }
    }
    HessianMatrix { n, entries }
}

/// Entrywise `l^2` of `L^2` norms.
pub fn family_l2_norm(family: &DerivativeFamily) -> f64 {
    family
        .entries
        .iter()
        .map(|(_, e)| e.l2_norm().powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn hessian_l2_norm(h: &HessianMatrix) -> f64 {
    h.entries
        .iter()
        .map(|e| e.l2_norm().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `||a||_{H^s}^2 = sum_m <m>^{2s} |c_m|^2`.
pub fn sobolev_h_norm(a: &NCElement, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::param("s", format!("Sobolev order must be nonnegative, got {s}")));
    }
    Ok(h_norm(a, s))
}

pub(crate) fn h_norm(a: &NCElement, s: f64) -> f64 {
    a.weighted_l2_norm(|m| (1.0 + laplacian_symbol(m)).powf(s))
}

/// `|a|_{W^{j,2}} = ||nabla^j a||`.
pub fn sobolev_seminorm(a: &NCElement, j: u32) -> f64 {
    family_l2_norm(&gradient_family(a, j))
}

/// `||a||_{W^{k,2}} = sum_{j <= k} |a|_{W^{j,2}}`.
pub fn sobolev_w_norm(a: &NCElement, k: u32) -> f64 {
    (0..=k).map(|j| sobolev_seminorm(a, j)).sum()
}

/// `sum_{|alpha| <= k} (2 pi)^{2|alpha|} |m^alpha|^2`.
pub fn derivative_weight(m: &Mode, k: u32) -> f64 {
    (0..=k)
        .flat_map(|j| MultiIndex::enumerate(m.dim(), j))
        .map(|alpha| {
            let v = alpha.monomial(m.coords());
            TWO_PI.powi(2 * alpha.order() as i32) * v * v
        })
        .sum()
}

/// Extremes over the box of `derivative_weight(m, k) / <m>^{2k}`.
pub fn norm_equivalence_ratio(k: u32, n: usize, radius: i64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for m in LatticeBox::new(n, radius).iter() {
        let r = derivative_weight(&m, k) / (1.0 + laplacian_symbol(&m)).powi(k as i32);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (lo, hi)
}

/// Constants `(c, C)` with `c ||a||_{H^k} <= ||a||_{W^{k,2}} <= C ||a||_{H^k}`
/// for every `a` supported in the box.
///
/// With `Q(a)^2 = sum_j |a|_{W^{j,2}}^2` one has `Q <= ||a||_W <= sqrt(k+1) Q`,
/// and `Q^2` is the `derivative_weight` quadratic form.
pub fn equivalence_constants(k: u32, n: usize, radius: i64) -> (f64, f64) {
    let (lo, hi) = norm_equivalence_ratio(k, n, radius);
    (lo.sqrt(), ((k + 1) as f64 * hi).sqrt())
}

/// Sobolev orders for a report; numeric evaluation is only defined at `p = 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevParams {
    pub s: f64,
    pub k: u32,
    pub p: f64,
}

impl SobolevParams {
    pub fn new(s: f64, k: u32, p: f64) -> Result<Self> {
        if !(s >= 0.0) {
            return Err(Error::param("s", "must be nonnegative"));
        }
        if !(p >= 1.0) {
            return Err(Error::param("p", "Lebesgue exponent must be at least 1"));
        }
        Ok(SobolevParams { s, k, p })
    }

    fn require_hilbert(&self) -> Result<()> {
        if self.p != 2.0 {
            return Err(Error::param("p", "norms are only evaluated at p = 2"));
        }
        Ok(())
    }

    pub fn h_norm(&self, a: &NCElement) -> Result<f64> {
        self.require_hilbert()?;
        sobolev_h_norm(a, self.s)
    }

    pub fn w_norm(&self, a: &NCElement) -> Result<f64> {
        self.require_hilbert()?;
        Ok(sobolev_w_norm(a, self.k))
    }
}
