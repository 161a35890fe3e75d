//! Euclidean and periodized Gaussian heat kernels and the `L^1` norms of their derivatives.
//!
//! `G_t(x) = (4 pi t)^{-n/2} e^{-|x|^2/(4t)}` and `d^alpha G_t` factor into
//! one-dimensional pieces, and so does the periodization
//! `H_t(x) = sum_k G_t(x + k)`. Every `L^1` norm below is therefore a product
//! of one-dimensional integrals.
//!
//! In one dimension `D^k g_t = p_k g_t` with
//! `p_{k+1} = -(x/2t) p_k - (k/2t) p_{k-1}`; up to scaling `p_k` is the
//! probabilists' Hermite polynomial `He_k(x / sqrt(2t))`, so the sign changes
//! of the integrand are known and the absolute value is integrated piecewise.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heat::MultiplierSymbol;
use crate::lattice::{Mode, MultiIndex};
use crate::quadrature::integrate;

/// Neglected periodization mass allowed per axis.
pub const TAIL_TOLERANCE: f64 = 1e-12;
const REL_TOL: f64 = 1e-13;

/// Parameters of a kernel `L^1` evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelQuery {
    pub alpha: MultiIndex,
    pub t: f64,
    /// Half-width of the Euclidean integration window in units of `sqrt(t)`.
    pub half_width: f64,
    /// Minimum number of periodic images on each side.
    pub min_images: i64,
}

impl KernelQuery {
    pub fn new(alpha: MultiIndex, t: f64) -> Result<Self> {
        let q = KernelQuery {
            alpha,
            t,
            half_width: 14.0,
            min_images: 3,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(Error::InvalidTime {
                requirement: "positive",
                value: self.t,
            });
        }
        if !(self.half_width >= 10.0) {
            return Err(Error::param("half_width", "must be at least 10"));
        }
        if self.min_images < 3 {
            return Err(Error::param("min_images", "must be at least 3"));
        }
        Ok(())
    }

    pub fn gaussian_l1(&self) -> Result<f64> {
        self.validate()?;
        Ok(self
            .alpha
            .entries()
            .iter()
            .map(|&k| gaussian_l1_1d(k, self.t, self.half_width))
            .product())
    }

    pub fn periodized_l1(&self) -> Result<f64> {
        self.validate()?;
        let mut total = 1.0;
        for &k in self.alpha.entries() {
            total *= periodized_l1_1d(k, self.t, self.min_images)?;
        }
        Ok(total)
    }
}

/// `D^k g_t(x)` with `g_t(x) = (4 pi t)^{-1/2} e^{-x^2/(4t)}`.
pub fn gaussian_derivative_1d(k: u32, t: f64, x: f64) -> f64 {
    let g = (-x * x / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
    let (mut prev, mut cur) = (0.0, g);
    for j in 0..k {
        let next = -(x / (2.0 * t)) * cur - (j as f64 / (2.0 * t)) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `d^alpha G_t(x)`.
pub fn gaussian_derivative_value(alpha: &MultiIndex, t: f64, x: &[f64]) -> Result<f64> {
    if x.len() != alpha.dim() {
        return Err(Error::DimensionMismatch {
            expected: alpha.dim(),
            found: x.len(),
        });
    }
    if !(t > 0.0) {
        return Err(Error::InvalidTime {
            requirement: "positive",
            value: t,
        });
    }
    Ok(alpha
        .entries()
        .iter()
        .zip(x)
        .map(|(&k, &xi)| gaussian_derivative_1d(k, t, xi))
        .product())
}

fn hermite_he(k: u32, y: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..k {
        let next = y * cur - j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign changes of `f` on `[a, b]` located by sampling with `samples` panels
/// and bisection.
fn sign_changes<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, samples: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (b - a) / samples as f64;
    let mut x0 = a;
    let mut f0 = f(a);
    for i in 1..=samples {
        let x1 = if i == samples { b } else { a + i as f64 * step };
        let f1 = f(x1);
        if f0 != 0.0 && f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            roots.push(bisect(f, x0, x1));
        } else if f1 == 0.0 && i < samples {
            roots.push(x1);
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// Zeros of `He_k`, ascending.
pub fn hermite_roots(k: u32) -> Vec<f64> {
    if k == 0 {
        return Vec::new();
    }
    let bound = 2.0 * (k as f64).sqrt() + 2.0;
    let roots = sign_changes(&|y| hermite_he(k, y), -bound, bound, 400 * k as usize + 1);
    debug_assert_eq!(roots.len(), k as usize);
    roots
}

/// `int_R |D^k g_t|` by piecewise adaptive quadrature on `|x| <= W sqrt(t)`.
pub fn gaussian_l1_1d(k: u32, t: f64, half_width: f64) -> f64 {
    let scale = (2.0 * t).sqrt();
    let edge = half_width * t.sqrt();
    let mut breaks = vec![-edge];
    breaks.extend(hermite_roots(k).into_iter().map(|y| y * scale));
    breaks.push(edge);
    let f = |x: f64| gaussian_derivative_1d(k, t, x).abs();
    breaks
        .windows(2)
        .map(|w| integrate(f, w[0], w[1], 0.0, REL_TOL))
        .sum()
}

/// `||d^alpha G_t||_{L^1(R^n)}`.
pub fn gaussian_l1_norm(alpha: &MultiIndex, t: f64) -> Result<f64> {
    KernelQuery::new(alpha.clone(), t)?.gaussian_l1()
}

/// `int_{|y| > a} |D^k g_t(y)| dy` for `a` beyond the largest zero.
///
/// For `k >= 1` the integrand has one sign past the last zero, so the tail is
/// `2 |D^{k-1} g_t(a)|`; for `k = 0` it is `erfc(a / 2 sqrt t) <= e^{-a^2/4t}`.
pub fn gaussian_tail_1d(k: u32, t: f64, a: f64) -> f64 {
    if k == 0 {
        (-a * a / (4.0 * t)).exp()
    } else {
        2.0 * gaussian_derivative_1d(k - 1, t, a).abs()
    }
}

/// Smallest image count `K >= min_images` whose neglected tail is below
/// [`TAIL_TOLERANCE`], together with that tail.
pub fn periodization_images(k: u32, t: f64, min_images: i64) -> Result<(i64, f64)> {
    let last_zero = hermite_roots(k).last().copied().unwrap_or(0.0) * (2.0 * t).sqrt();
    let mut images = min_images.max(3);
    loop {
        let a = images as f64 + 0.5;
        let tail = gaussian_tail_1d(k, t, a);
        if a > last_zero && tail < TAIL_TOLERANCE {
            return Ok((images, tail));
        }
        if images >= 200 {
            return Err(Error::TailTooLarge { tail, images });
        }
        images += 1;
    }
}

/// `D^k h_t(x) = sum_{|j| <= K} D^k g_t(x + j)`.
pub fn periodized_derivative_1d(k: u32, t: f64, images: i64, x: f64) -> f64 {
    (-images..=images)
        .map(|j| gaussian_derivative_1d(k, t, x + j as f64))
        .sum()
}

/// `int_{-1/2}^{1/2} |D^k h_t|`, split at the numerically located sign changes.
pub fn periodized_l1_1d(k: u32, t: f64, min_images: i64) -> Result<f64> {
    let (images, _) = periodization_images(k, t, min_images)?;
    let f = |x: f64| periodized_derivative_1d(k, t, images, x);
    let step = (1.0 / 4096.0f64).min(t.sqrt() / 16.0);
    let samples = (1.0 / step).ceil() as usize;
    let mut breaks = vec![-0.5];
    if k > 0 {
        breaks.extend(sign_changes(&f, -0.5, 0.5, samples));
    }
    breaks.push(0.5);
    let g = |x: f64| f(x).abs();
    Ok(breaks
        .windows(2)
        .map(|w| integrate(g, w[0], w[1], 0.0, REL_TOL))
        .sum())
}

/// `||d^alpha H_t||_{L^1(T^n)}`.
pub fn periodized_l1_norm(alpha: &MultiIndex, t: f64) -> Result<f64> {
    KernelQuery::new(alpha.clone(), t)?.periodized_l1()
}

/// `M_t^alpha(m) = (2 pi i)^{|alpha|} m^alpha e^{-4 pi^2 |m|^2 t}`.
pub fn torus_symbol(alpha: &MultiIndex, t: f64, m: &Mode) -> Complex64 {
    MultiplierSymbol::Mixed {
        alpha: alpha.clone(),
        ell: 0,
        t,
    }
    .eval(m)
}

/// Fourier coefficient of `d^alpha H_t` at `m` by the trapezoid rule on a
/// uniform grid of `points` nodes per axis.
pub fn kernel_fourier_coefficient(alpha: &MultiIndex, t: f64, m: &Mode, points: usize) -> Result<Complex64> {
    let mut total = Complex64::new(1.0, 0.0);
    for (&k, &mj) in alpha.entries().iter().zip(m.coords()) {
        let (images, _) = periodization_images(k, t, 3)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..points {
            let x = i as f64 / points as f64;
            let phase = Complex64::from_polar(1.0, -2.0 * PI * ((mj as f64 * x).fract()));
            acc += periodized_derivative_1d(k, t, images, x) * phase;
        }
        total *= acc / points as f64;
    }
    Ok(total)
}
