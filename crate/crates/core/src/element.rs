//! Finitely supported elements `a = sum_m c_m U^m` of the smooth noncommutative torus.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense;
use crate::error::{Error, Result};
use crate::lattice::{cocycle_unchecked, LatticeBox, Mode, ThetaMatrix};

/// What a product does with modes that land outside a lattice box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductPolicy {
    /// Keep the full twisted convolution.
    Grow,
    /// Galerkin projection: drop every mode with `|m|_inf > radius`.
    ProjectToBox(i64),
    /// Fail with [`Error::SupportOverflow`] if any product mode leaves the box.
    Reject(i64),
}

#[derive(Clone, Debug)]
pub struct NCElement {
    theta: Arc<ThetaMatrix>,
    coeffs: BTreeMap<Mode, Complex64>,
}

impl PartialEq for NCElement {
    fn eq(&self, other: &Self) -> bool {
        self.theta == other.theta && self.coeffs == other.coeffs
    }
}

impl NCElement {
    pub fn zero(theta: Arc<ThetaMatrix>) -> Self {
        NCElement {
            theta,
            coeffs: BTreeMap::new(),
        }
    }

    /// `U^0`.
    pub fn identity(theta: Arc<ThetaMatrix>) -> Self {
        let n = theta.dim();
        Self::monomial(theta, Mode::zero(n), Complex64::new(1.0, 0.0))
    }

    /// `c U^m`. Panics if `m` has the wrong dimension or `c` is not finite.
    pub fn monomial(theta: Arc<ThetaMatrix>, m: Mode, c: Complex64) -> Self {
        assert_eq!(m.dim(), theta.dim(), "mode dimension");
        assert!(c.is_finite(), "coefficient must be finite");
        let mut coeffs = BTreeMap::new();
        if c != Complex64::new(0.0, 0.0) {
            coeffs.insert(m, c);
        }
        NCElement { theta, coeffs }
    }

    pub fn from_coeffs<I>(theta: Arc<ThetaMatrix>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Mode, Complex64)>,
    {
        let n = theta.dim();
        let mut coeffs = BTreeMap::new();
        for (m, c) in entries {
            if m.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.dim(),
                });
            }
            if !c.is_finite() {
                return Err(Error::NonFinite {
                    mode: m.coords().to_vec(),
                });
            }
            *coeffs.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(NCElement { theta, coeffs })
    }

    /// Seeded element on the box of `radius` with
    /// `|c_m| = (1 + |m|^2)^{-decay/2}` and a uniformly random phase.
    pub fn random(theta: Arc<ThetaMatrix>, seed: u64, radius: i64, decay: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(theta, &mut rng, radius, decay)
    }

    pub fn random_with<R: Rng>(theta: Arc<ThetaMatrix>, rng: &mut R, radius: i64, decay: f64) -> Self {
        let bx = LatticeBox::new(theta.dim(), radius);
        let coeffs = bx
            .iter()
            .map(|m| {
                let amp = (1.0 + m.norm_sq()).powf(-0.5 * decay);
                let phase: f64 = rng.random();
                (m, Complex64::from_polar(amp, std::f64::consts::TAU * phase))
            })
            .collect();
        NCElement { theta, coeffs }
    }

    pub fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    /// Stored coefficient `c_m`, zero off the support.
    pub fn coeff(&self, m: &Mode) -> Complex64 {
        self.coeffs
            .get(m)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest `N` with the support inside the box of radius `N`.
    pub fn support_radius(&self) -> i64 {
        self.coeffs.keys().map(Mode::sup_norm).max().unwrap_or(0)
    }

    fn check_compatible(&self, other: &NCElement) -> Result<()> {
        if Arc::ptr_eq(&self.theta, &other.theta) || self.theta == other.theta {
            Ok(())
        } else if self.dim() != other.dim() {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        } else {
            Err(Error::ThetaMismatch)
        }
    }

    fn with_coeffs(&self, mut coeffs: BTreeMap<Mode, Complex64>) -> NCElement {
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        NCElement {
            theta: self.theta.clone(),
            coeffs,
        }
    }

    /// `self + lambda * other`.
    pub fn axpy(&self, lambda: Complex64, other: &NCElement) -> Result<NCElement> {
        self.check_compatible(other)?;
        let mut coeffs = self.coeffs.clone();
        for (m, c) in &other.coeffs {
            *coeffs.entry(m.clone()).or_insert(Complex64::new(0.0, 0.0)) += lambda * c;
        }
        Ok(self.with_coeffs(coeffs))
    }

    pub fn add(&self, other: &NCElement) -> Result<NCElement> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &NCElement) -> Result<NCElement> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn scale(&self, lambda: Complex64) -> NCElement {
        self.with_coeffs(self.coeffs.iter().map(|(m, c)| (m.clone(), c * lambda)).collect())
    }

    pub fn scale_real(&self, lambda: f64) -> NCElement {
        self.scale(Complex64::new(lambda, 0.0))
    }

    /// Twisted convolution `(ab)^(m) = sum_{r+s=m} omega(r,s) a(r) b(s)`
    /// with unbounded support growth.
    pub fn multiply(&self, other: &NCElement) -> Result<NCElement> {
        self.multiply_with(other, ProductPolicy::Grow)
    }

    pub fn multiply_with(&self, other: &NCElement, policy: ProductPolicy) -> Result<NCElement> {
        self.check_compatible(other)?;
        match policy {
            ProductPolicy::Grow => self.grow_product(other),
            ProductPolicy::Reject(radius) => {
                let bx = LatticeBox::new(self.dim(), radius);
                let escapes = self.support_radius() + other.support_radius() > radius
                    && self.coeffs.keys().any(|r| {
                        other.coeffs.keys().any(|s| !bx.contains(r.add(s).coords()))
                    });
                if escapes {
                    return Err(Error::SupportOverflow { radius });
                }
                self.grow_product(other)
            }
            ProductPolicy::ProjectToBox(radius) => {
                let bx = LatticeBox::new(self.dim(), radius);
                dense::multiply_projected(self, other, bx)
            }
        }
    }

    // The dense kernel is exact when its box holds the whole Minkowski sum;
    // it wins whenever that box is not much larger than the pair count.
    fn grow_product(&self, other: &NCElement) -> Result<NCElement> {
        let radius = self.support_radius() + other.support_radius();
        let bx = LatticeBox::new(self.dim(), radius);
        let pairs = self.coeffs.len().saturating_mul(other.coeffs.len());
        let cells = (2 * radius as u128 + 1).checked_pow(self.dim() as u32).unwrap_or(u128::MAX);
        if cells <= (4 * pairs as u128).min(1 << 22) {
            dense::multiply_projected(self, other, bx)
        } else {
            Ok(self.convolve_sparse(other, None))
        }
    }

    /// Reference product: exact cocycle per pair, sparse accumulation.
    pub(crate) fn convolve_sparse(&self, other: &NCElement, bx: Option<LatticeBox>) -> NCElement {
        let mut out: BTreeMap<Mode, Complex64> = BTreeMap::new();
        for (r, a) in &self.coeffs {
            for (s, b) in &other.coeffs {
                let m = r.add(s);
                if let Some(bx) = bx {
                    if !bx.contains(m.coords()) {
                        continue;
                    }
                }
                let w = cocycle_unchecked(&self.theta, r.coords(), s.coords());
                *out.entry(m).or_insert(Complex64::new(0.0, 0.0)) += w * a * b;
            }
        }
        self.with_coeffs(out)
    }

    /// `(a^*)^(p) = conj(a(-p)) conj(omega(-p, p))`.
    pub fn adjoint(&self) -> NCElement {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(m, c)| {
                let p = m.neg();
                let w = cocycle_unchecked(&self.theta, p.coords(), m.coords());
                (p, (c * w).conj())
            })
            .collect();
        self.with_coeffs(coeffs)
    }

    /// Canonical trace: the coefficient at the origin.
    pub fn trace(&self) -> Complex64 {
        self.coeff(&Mode::zero(self.dim()))
    }

    /// `tau((U^m)^* a)`, routed through the algebra operations.
    pub fn fourier_coefficient(&self, m: &Mode) -> Result<Complex64> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.dim(),
            });
        }
        let u = NCElement::monomial(self.theta.clone(), m.clone(), Complex64::new(1.0, 0.0));
        Ok(u.adjoint().multiply(self)?.trace())
    }

    /// `(sum_m |c_m|^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.weighted_l2_norm(|_| 1.0)
    }

    /// `(sum_m w(m) |c_m|^2)^{1/2}`.
    pub fn weighted_l2_norm<F: Fn(&Mode) -> f64>(&self, weight: F) -> f64 {
        self.coeffs
            .iter()
            .map(|(m, c)| weight(m) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `sum_m |c_m|`, an upper bound for the operator norm.
    pub fn linf_upper(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// Diagonal Fourier multiplier `U^m -> symbol(m) U^m`.
    pub fn apply_multiplier<F: Fn(&Mode) -> Complex64>(&self, symbol: F) -> NCElement {
        self.with_coeffs(
            self.coeffs
                .iter()
                .map(|(m, c)| (m.clone(), symbol(m) * c))
                .collect(),
        )
    }

    /// Real-valued multiplier, cheaper than [`Self::apply_multiplier`].
    pub fn apply_real_multiplier<F: Fn(&Mode) -> f64>(&self, symbol: F) -> NCElement {
        self.with_coeffs(
            self.coeffs
                .iter()
                .map(|(m, c)| (m.clone(), c * symbol(m)))
                .collect(),
        )
    }

    /// Drops every mode outside the box of `radius`.
    pub fn project(&self, radius: i64) -> NCElement {
        self.with_coeffs(
            self.coeffs
                .iter()
                .filter(|(m, _)| m.sup_norm() <= radius)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        )
    }

    /// `max_m |a(m) - b(m)|`.
    pub fn max_abs_diff(&self, other: &NCElement) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, c) in &self.coeffs {
            worst = worst.max((c - other.coeff(m)).norm());
        }
        for (m, c) in &other.coeffs {
            if !self.coeffs.contains_key(m) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// Line-oriented text form: header `n N`, then one row `m_1 .. m_n re im`
    /// per stored coefficient. Floats use the shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.dim(), self.support_radius());
        for (m, c) in &self.coeffs {
            for x in m.coords() {
                let _ = write!(out, "{x} ");
            }
            let _ = writeln!(out, "{:?} {:?}", c.re, c.im);
        }
        out
    }

    pub fn from_text(theta: Arc<ThetaMatrix>, text: &str) -> Result<NCElement> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "missing header `n N`".into(),
        })?;
        let head: Vec<&str> = header.split_whitespace().collect();
        let parse_err = |line, reason: String| Error::Parse { line, reason };
        if head.len() != 2 {
            return Err(parse_err(hline, "header must be `n N`".into()));
        }
        let n: usize = head[0]
            .parse()
            .map_err(|e| parse_err(hline, format!("dimension: {e}")))?;
        let radius: i64 = head[1]
            .parse()
            .map_err(|e| parse_err(hline, format!("radius: {e}")))?;
        if n != theta.dim() {
            return Err(Error::DimensionMismatch {
                expected: theta.dim(),
                found: n,
            });
        }
        let mut entries = Vec::new();
        for (line, row) in lines {
            let fields: Vec<&str> = row.split_whitespace().collect();
            if fields.len() != n + 2 {
                return Err(parse_err(line, format!("expected {} fields, found {}", n + 2, fields.len())));
            }
            let coords = fields[..n]
                .iter()
                .map(|f| f.parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| parse_err(line, format!("lattice index: {e}")))?;
            if coords.iter().any(|c| c.abs() > radius) {
                return Err(parse_err(line, format!("index outside declared radius {radius}")));
            }
            let re: f64 = fields[n]
                .parse()
                .map_err(|e| parse_err(line, format!("real part: {e}")))?;
            let im: f64 = fields[n + 1]
                .parse()
                .map_err(|e| parse_err(line, format!("imaginary part: {e}")))?;
            entries.push((Mode::from(coords), Complex64::new(re, im)));
        }
        NCElement::from_coeffs(theta, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::cocycle;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn golden2() -> Arc<ThetaMatrix> {
        Arc::new(ThetaMatrix::golden(2))
    }

    /// `sum_{r+s+t=m} omega(r,s) omega(r+s,t) a(r) b(s) c(t)`.
    fn triple_product_oracle(a: &NCElement, b: &NCElement, cc: &NCElement) -> BTreeMap<Mode, Complex64> {
        let theta = a.theta();
        let mut out = BTreeMap::new();
        for (r, x) in a.iter() {
            for (s, y) in b.iter() {
                let rs = r.add(s);
                let w1 = cocycle(theta, r, s).unwrap();
                for (t, z) in cc.iter() {
                    let w2 = cocycle(theta, &rs, t).unwrap();
                    *out.entry(rs.add(t)).or_insert(c(0.0, 0.0)) += w1 * w2 * x * y * z;
                }
            }
        }
        out
    }

    #[test]
    fn monomial_product_is_cocycle_times_sum() {
        let theta = golden2();
        let r = Mode::new(&[2, -1]);
        let s = Mode::new(&[-1, 3]);
        let ur = NCElement::monomial(theta.clone(), r.clone(), c(1.0, 0.0));
        let us = NCElement::monomial(theta.clone(), s.clone(), c(1.0, 0.0));
        let p = ur.multiply(&us).unwrap();
        assert_eq!(p.support_len(), 1);
        let w = cocycle(&theta, &r, &s).unwrap();
        assert!((p.coeff(&r.add(&s)) - w).norm() < 1e-15);
    }

    #[test]
    fn identity_is_two_sided_unit() {
        let theta = golden2();
        let a = NCElement::random(theta.clone(), 3, 2, 1.0);
        let one = NCElement::identity(theta);
        assert!(one.multiply(&a).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(a.multiply(&one).unwrap().max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn associativity_against_triple_sum() {
        let theta = golden2();
        let a = NCElement::random(theta.clone(), 11, 3, 1.0);
        let b = NCElement::random(theta.clone(), 12, 3, 1.0);
        let cc = NCElement::random(theta.clone(), 13, 3, 1.0);
        let oracle = triple_product_oracle(&a, &b, &cc);
        let left = a.multiply(&b.multiply(&cc).unwrap()).unwrap();
        let right = a.multiply(&b).unwrap().multiply(&cc).unwrap();
        for (m, v) in &oracle {
            assert!((left.coeff(m) - v).norm() < 1e-12);
            assert!((right.coeff(m) - v).norm() < 1e-12);
        }
    }

    #[test]
    fn adjoint_examples() {
        let theta = golden2();
        let one = NCElement::identity(theta.clone());
        assert_eq!(one.adjoint(), one);

        let flat = Arc::new(ThetaMatrix::zero(2));
        let a = NCElement::random(flat, 5, 2, 0.5);
        let adj = a.adjoint();
        for (m, v) in a.iter() {
            assert_eq!(adj.coeff(&m.neg()), v.conj());
        }

        let a = NCElement::random(theta.clone(), 6, 2, 0.5);
        let b = NCElement::random(theta, 7, 2, 0.5);
        assert!(a.adjoint().adjoint().max_abs_diff(&a) < 1e-12);
        let lhs = a.multiply(&b).unwrap().adjoint();
        let rhs = b.adjoint().multiply(&a.adjoint()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn trace_and_fourier_coefficients() {
        let theta = golden2();
        assert_eq!(NCElement::identity(theta.clone()).trace(), c(1.0, 0.0));
        let u = NCElement::monomial(theta.clone(), Mode::new(&[1, 0]), c(3.0, 0.0));
        assert_eq!(u.trace(), c(0.0, 0.0));
        assert_eq!(u.fourier_coefficient(&Mode::new(&[1, 0])).unwrap(), c(3.0, 0.0));
        assert_eq!(u.fourier_coefficient(&Mode::new(&[0, 1])).unwrap(), c(0.0, 0.0));

        let a = NCElement::random(theta, 21, 3, 1.5);
        for m in LatticeBox::new(2, 4).iter() {
            let routed = a.fourier_coefficient(&m).unwrap();
            assert!((routed - a.coeff(&m)).norm() < 1e-14);
        }
    }

    #[test]
    fn plancherel_and_norms() {
        let theta = golden2();
        let a = NCElement::random(theta.clone(), 8, 3, 1.0);
        let direct: f64 = a.iter().map(|(_, v)| v.norm_sqr()).sum();
        let via_trace = a.adjoint().multiply(&a).unwrap().trace();
        assert!((via_trace.re - direct).abs() < 1e-12 * direct);
        assert!(via_trace.im.abs() < 1e-12);
        assert!((a.l2_norm() - direct.sqrt()).abs() < 1e-14);

        let u = NCElement::monomial(theta.clone(), Mode::new(&[4, -2]), c(0.6, 0.8));
        assert!((u.l2_norm() - 1.0).abs() < 1e-15);
        assert!((u.linf_upper() - 1.0).abs() < 1e-15);

        let v = NCElement::monomial(theta.clone(), Mode::new(&[1, 1]), c(2.0, 0.0))
            .add(&NCElement::monomial(theta.clone(), Mode::new(&[0, 1]), c(0.0, 3.0)))
            .unwrap();
        assert_eq!(v.linf_upper(), 5.0);

        let b = NCElement::random(theta, 9, 2, 1.0);
        let lhs = a.add(&b).unwrap().l2_norm().powi(2) + a.sub(&b).unwrap().l2_norm().powi(2);
        let rhs = 2.0 * a.l2_norm().powi(2) + 2.0 * b.l2_norm().powi(2);
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn linear_structure() {
        let theta = golden2();
        let a = NCElement::random(theta.clone(), 1, 2, 1.0);
        assert!(a.add(&a.scale_real(-1.0)).unwrap().is_zero());
        let lam = c(0.25, -2.0);
        assert_eq!(NCElement::identity(theta).scale(lam).trace(), lam);
    }

    #[test]
    fn random_is_deterministic() {
        let theta = golden2();
        let a = NCElement::random(theta.clone(), 42, 3, 2.0);
        let b = NCElement::random(theta.clone(), 42, 3, 2.0);
        assert_eq!(a, b);
        assert_ne!(a, NCElement::random(theta, 43, 3, 2.0));
        assert_eq!(a.support_len(), 49);
    }

    #[test]
    fn theta_mismatch_rejected() {
        let a = NCElement::identity(golden2());
        let b = NCElement::identity(Arc::new(ThetaMatrix::zero(2)));
        assert!(matches!(a.multiply(&b), Err(Error::ThetaMismatch)));
        let c3 = NCElement::identity(Arc::new(ThetaMatrix::zero(3)));
        assert!(matches!(a.add(&c3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn reject_policy_reports_overflow() {
        let theta = golden2();
        let a = NCElement::random(theta.clone(), 1, 2, 1.0);
        assert!(matches!(
            a.multiply_with(&a, ProductPolicy::Reject(3)),
            Err(Error::SupportOverflow { radius: 3 })
        ));
        let ok = a.multiply_with(&a, ProductPolicy::Reject(4)).unwrap();
        assert!(ok.max_abs_diff(&a.multiply(&a).unwrap()) < 1e-15);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let theta = golden2();
        let a = NCElement::random(theta.clone(), 77, 3, 1.3).scale(c(1.0 / 3.0, 1e-300));
        let text = a.to_text();
        assert!(text.starts_with("2 3\n"));
        let back = NCElement::from_text(theta, &text).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn text_parse_errors_name_the_line() {
        let theta = golden2();
        let err = NCElement::from_text(theta.clone(), "2 1\n0 0 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = NCElement::from_text(theta.clone(), "2 1\n0 2 1.0 0.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(NCElement::from_text(theta.clone(), "3 1\n").is_err());
        assert!(NCElement::from_text(theta, "2 1\n0 0 NaN 0\n").is_err());
    }
}
