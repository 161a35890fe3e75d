//! The heat semigroup `P_t = e^{-tL}` and the mixed multipliers `delta^alpha L^ell P_t`.
//!
//! Every operator here is diagonal on the Fourier basis, so on `L^2` its
//! operator norm and its completely bounded norm both equal the supremum of
//! the symbol modulus over `Z^n`. None of the symbols involve `theta`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::calculus::{hessian, hessian_l2_norm, laplacian_symbol, sobolev_w_norm};
use crate::element::NCElement;
use crate::error::{Error, Result};
use crate::kernel;
use crate::lattice::{Mode, MultiIndex, ThetaMatrix};

fn require_positive(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTime {
            requirement: "positive",
            value: t,
        })
    }
}

/// Fourier symbol of `P_t` or of `delta^alpha L^ell P_t`.
#[derive(Clone, Debug, PartialEq)]
pub enum MultiplierSymbol {
    Heat { t: f64 },
    Mixed { alpha: MultiIndex, ell: u32, t: f64 },
}

impl MultiplierSymbol {
    pub fn eval(&self, m: &Mode) -> Complex64 {
        match self {
            MultiplierSymbol::Heat { t } => Complex64::new((-laplacian_symbol(m) * t).exp(), 0.0),
            MultiplierSymbol::Mixed { alpha, ell, t } => {
                let lam = laplacian_symbol(m);
                let k = alpha.order();
                let mag = (2.0 * PI).powi(k as i32)
                    * lam.powi(*ell as i32)
                    * alpha.monomial(m.coords())
                    * (-lam * t).exp();
                // (2 pi i)^k = (2 pi)^k i^k
                match k % 4 {
                    0 => Complex64::new(mag, 0.0),
                    1 => Complex64::new(0.0, mag),
                    2 => Complex64::new(-mag, 0.0),
                    _ => Complex64::new(0.0, -mag),
                }
            }
        }
    }

    pub fn modulus(&self, m: &Mode) -> f64 {
        self.eval(m).norm()
    }
}

/// `P_t a`; `t = 0` is the identity.
pub fn heat_apply(a: &NCElement, t: f64) -> Result<NCElement> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidTime {
            requirement: "nonnegative",
            value: t,
        });
    }
    if t == 0.0 {
        return Ok(a.clone());
    }
    Ok(a.apply_real_multiplier(|m| (-laplacian_symbol(m) * t).exp()))
}

/// `delta^alpha L^ell P_t a`.
pub fn mixed_apply(a: &NCElement, alpha: &MultiIndex, ell: u32, t: f64) -> Result<NCElement> {
    if alpha.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: alpha.dim(),
        });
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidTime {
            requirement: "nonnegative",
            value: t,
        });
    }
    let symbol = MultiplierSymbol::Mixed {
        alpha: alpha.clone(),
        ell,
        t,
    };
    Ok(a.apply_multiplier(|m| symbol.eval(m)))
}

/// Radial majorant `(2 pi)^{|alpha|} x^{|alpha|} (4 pi^2 x^2)^ell e^{-4 pi^2 x^2 t}`
/// of the mixed symbol modulus at `|m| = x`.
fn radial_profile(order: u32, ell: u32, t: f64, x: f64) -> f64 {
    let lam = 4.0 * PI * PI * x * x;
    (2.0 * PI * x).powi(order as i32) * lam.powi(ell as i32) * (-lam * t).exp()
}

/// Exact `sup_m |symbol(m)|` together with a maximizing mode.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorNorm {
    pub value: f64,
    pub argmax: Mode,
    pub search_radius: i64,
}

/// Exhaustive search over `|m|_inf <= R*` with
/// `R* = ceil(2 sqrt((ell + |alpha|/2) / (4 pi^2 t)) + 2)`. Outside the box
/// `|m| > R*` lies past the radial maximizer, where the majorant decreases;
/// the box is doubled until the majorant at its edge is below the maximum found.
/// The modulus only depends on `|m_j|`, so the nonnegative orthant suffices.
pub fn l2_operator_norm_search(alpha: &MultiIndex, ell: u32, t: f64) -> Result<OperatorNorm> {
    require_positive(t)?;
    let n = alpha.dim();
    let order = alpha.order();
    let peak_sq = (ell as f64 + 0.5 * order as f64) / (4.0 * PI * PI * t);
    let mut radius = (2.0 * peak_sq.sqrt() + 2.0).ceil() as i64;
    let exps = alpha.entries();
    let scale = (2.0 * PI).powi(order as i32);
    let modulus = |m: &[i64]| {
        let lam = 4.0 * PI * PI * m.iter().map(|&c| (c * c) as f64).sum::<f64>();
        let mono: f64 = m.iter().zip(exps).map(|(&c, &e)| (c as f64).powi(e as i32)).product();
        scale * mono * lam.powi(ell as i32) * (-lam * t).exp()
    };
    loop {
        assert!((radius as f64).powi(2) > peak_sq, "search edge must lie past the radial peak");
        let mut best = -1.0;
        let mut argmax = vec![0i64; n];
        let mut m = vec![0i64; n];
        'odometer: loop {
            let v = modulus(&m);
            if v > best {
                best = v;
                argmax.copy_from_slice(&m);
            }
            for j in (0..n).rev() {
                if m[j] < radius {
                    m[j] += 1;
                    continue 'odometer;
                }
                m[j] = 0;
            }
            break;
        }
        if radial_profile(order, ell, t, radius as f64) <= best {
            return Ok(OperatorNorm {
                value: best,
                argmax: Mode::new(&argmax),
                search_radius: radius,
            });
        }
        radius *= 2;
    }
}

/// `||delta^alpha L^ell P_t||` on `L^2`, equal to its cb norm.
pub fn l2_operator_norm(alpha: &MultiIndex, ell: u32, t: f64) -> Result<f64> {
    Ok(l2_operator_norm_search(alpha, ell, t)?.value)
}

/// `[sup |M_t^alpha|, ||d^alpha H_t||_{L^1(T^n)}]`: the exact `L^2` value and the
/// convolution-kernel majorant valid for every `p`.
pub fn cb_norm_bracket(alpha: &MultiIndex, t: f64) -> Result<(f64, f64)> {
    let lower = l2_operator_norm(alpha, 0, t)?;
    let upper = kernel::periodized_l1_norm(alpha, t)?;
    Ok((lower, upper))
}

/// Single-mode witness `U^{m_t}`, `m_t = (k_t, ..., k_t)`, `k_t = floor(1/sqrt(8 pi^2 n t))`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub element: NCElement,
    pub k_t: i64,
    /// `||delta^alpha L^ell P_t U^{m_t}||_{L^2}`.
    pub value: f64,
}

pub fn witness_index(n: usize, t: f64) -> Result<i64> {
    require_positive(t)?;
    let k = (1.0 / (8.0 * PI * PI * n as f64 * t).sqrt()).floor() as i64;
    if k == 0 {
        return Err(Error::WitnessUnavailable { t });
    }
    Ok(k)
}

pub fn sharpness_witness(
    theta: Arc<ThetaMatrix>,
    alpha: &MultiIndex,
    ell: u32,
    t: f64,
) -> Result<Witness> {
    let n = theta.dim();
    if alpha.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: alpha.dim(),
        });
    }
    let k = witness_index(n, t)?;
    let kf = k as f64;
    let lam = 4.0 * PI * PI * n as f64 * kf * kf;
    let order = alpha.order() as i32;
    let value = (2.0 * PI).powi(order) * lam.powi(ell as i32) * kf.powi(order) * (-lam * t).exp();
    let element = NCElement::monomial(theta, Mode::diagonal(n, k), Complex64::new(1.0, 0.0));
    Ok(Witness {
        element,
        k_t: k,
        value,
    })
}

/// `P_t a` and `||P_t a||_{W^{k+r,2}} / ((1 + t^{-r/2}) ||a||_{W^{k,2}})`.
pub fn sobolev_regularize(a: &NCElement, k: u32, r: u32, t: f64) -> Result<(NCElement, f64)> {
    require_positive(t)?;
    let image = heat_apply(a, t)?;
    let denom = (1.0 + t.powf(-0.5 * r as f64)) * sobolev_w_norm(a, k);
    let ratio = if denom == 0.0 {
        0.0
    } else {
        sobolev_w_norm(&image, k + r) / denom
    };
    Ok((image, ratio))
}

/// `t ||Hess(P_t a)|| / ||a||_{L^2}`.
pub fn hessian_bound_ratio(a: &NCElement, t: f64) -> Result<f64> {
    require_positive(t)?;
    let norm = a.l2_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(t * hessian_l2_norm(&hessian(&heat_apply(a, t)?)) / norm)
}
