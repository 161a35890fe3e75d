//! Noncommutative polynomials `P(u) = sum_nu sum_mu b_0 u b_1 u ... u b_nu`,
//! the Sobolev algebra constant and the local growth and Lipschitz bounds.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::calculus::{h_norm, laplacian_symbol};
use crate::element::NCElement;
use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, Mode, ThetaMatrix};

/// `b_0 u b_1 u ... u b_nu`; the degree is one less than the number of
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    coeffs: Vec<NCElement>,
}

impl Monomial {
    pub fn new(coeffs: Vec<NCElement>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::param("coefficients", "a monomial needs at least b_0"));
        };
        for b in &coeffs[1..] {
            check_theta(first.theta(), b.theta())?;
        }
        Ok(Monomial { coeffs })
    }

    /// `c u^nu` with every coefficient a multiple of the identity.
    pub fn power(theta: Arc<ThetaMatrix>, degree: usize, c: Complex64) -> Self {
        let mut coeffs = vec![NCElement::identity(theta.clone()); degree + 1];
        coeffs[0] = NCElement::identity(theta).scale(c);
        Monomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[NCElement] {
        &self.coeffs
    }

    pub fn theta(&self) -> &Arc<ThetaMatrix> {
        self.coeffs[0].theta()
    }

    /// Left-to-right fold of exact products.
    pub fn evaluate(&self, u: &NCElement) -> Result<NCElement> {
        let mut acc = self.coeffs[0].clone();
        for b in &self.coeffs[1..] {
            acc = acc.multiply(u)?.multiply(b)?;
        }
        Ok(acc)
    }

    /// The `nu` terms `b_0 u ... b_{j-1} (u - v) b_j v ... v b_nu` whose sum is
    /// `M(u) - M(v)`.
    pub fn telescoped_terms(&self, u: &NCElement, v: &NCElement) -> Result<Vec<NCElement>> {
        let diff = u.sub(v)?;
        let nu = self.degree();
        let mut terms = Vec::with_capacity(nu);
        for j in 1..=nu {
            let mut acc = self.coeffs[0].clone();
            for (i, b) in self.coeffs[1..].iter().enumerate() {
                let slot = i + 1;
                let x = match slot.cmp(&j) {
                    std::cmp::Ordering::Less => u,
                    std::cmp::Ordering::Equal => &diff,
                    std::cmp::Ordering::Greater => v,
                };
                acc = acc.multiply(x)?.multiply(b)?;
            }
            terms.push(acc);
        }
        Ok(terms)
    }

    fn coefficient_norm_product(&self, k: u32) -> f64 {
        self.coeffs.iter().map(|b| h_norm(b, k as f64)).product()
    }
}

/// Finite sum of monomials over a common `theta`.
#[derive(Clone, Debug, PartialEq)]
pub struct NCPolynomial {
    theta: Arc<ThetaMatrix>,
    terms: Vec<Monomial>,
}

impl NCPolynomial {
    pub fn new(theta: Arc<ThetaMatrix>, terms: Vec<Monomial>) -> Result<Self> {
        for m in &terms {
            check_theta(&theta, m.theta())?;
        }
        Ok(NCPolynomial { theta, terms })
    }

    pub fn zero(theta: Arc<ThetaMatrix>) -> Self {
        NCPolynomial {
            theta,
            terms: Vec::new(),
        }
    }

    /// `c u^nu`.
    pub fn power(theta: Arc<ThetaMatrix>, degree: usize, c: f64) -> Self {
        let term = Monomial::power(theta.clone(), degree, Complex64::new(c, 0.0));
        NCPolynomial {
            theta,
            terms: vec![term],
        }
    }

    pub fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `q = max nu`, zero for the empty sum.
    pub fn degree(&self) -> usize {
        self.terms.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add(&self, other: &NCPolynomial) -> Result<NCPolynomial> {
        check_theta(&self.theta, &other.theta)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(NCPolynomial {
            theta: self.theta.clone(),
            terms,
        })
    }

    pub fn evaluate(&self, u: &NCElement) -> Result<NCElement> {
        check_theta(&self.theta, u.theta())?;
        let mut acc = NCElement::zero(self.theta.clone());
        for m in &self.terms {
            acc = acc.add(&m.evaluate(u)?)?;
        }
        Ok(acc)
    }

    /// Exact evaluation followed by a single projection to the box of `cutoff`.
    pub fn evaluate_with(&self, u: &NCElement, cutoff: Option<i64>) -> Result<NCElement> {
        let p = self.evaluate(u)?;
        Ok(match cutoff {
            Some(radius) => p.project(radius),
            None => p,
        })
    }
}

fn check_theta(a: &Arc<ThetaMatrix>, b: &Arc<ThetaMatrix>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else if a.dim() != b.dim() {
        Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        })
    } else {
        Err(Error::ThetaMismatch)
    }
}

fn require_convergent(k: u32, n: usize) -> Result<()> {
    if 2 * k as usize <= n {
        Err(Error::DivergentSeries { k, n })
    } else {
        Ok(())
    }
}

/// Upper bound for `sum_{|m|_inf > N} <m>^{-2k}`.
///
/// The shell `|m|_inf = j` has at most `2n 3^{n-1} j^{n-1}` points and
/// `<m>^2 >= 4 pi^2 j^2` on it; comparing the remaining sum with an integral
/// gives `2n 3^{n-1} (4 pi^2)^{-k} N^{n-2k} / (2k - n)`.
pub fn embedding_tail_bound(k: u32, n: usize, radius: i64) -> Result<f64> {
    require_convergent(k, n)?;
    if radius < 1 {
        return Err(Error::param("radius", "must be at least 1"));
    }
    let count = 2.0 * n as f64 * 3f64.powi(n as i32 - 1);
    let decay = (4.0 * PI * PI).powi(-(k as i32));
    let exponent = n as i32 - 2 * k as i32;
    Ok(count * decay * (radius as f64).powi(exponent) / (2 * k as usize - n) as f64)
}

/// `C_{k,n} = (sum_m <m>^{-2k})^{1/2}`: the box partial sum, plus the tail
/// bound when `tail` is set so that the result dominates the full series.
pub fn l1_embedding_constant(k: u32, n: usize, radius: i64, tail: bool) -> Result<f64> {
    require_convergent(k, n)?;
    let bx = LatticeBox::new(n, radius);
    // Neumaier summation leaves a rounding error of a few ulps; the inflation
    // below covers it with room to spare so the bound survives floating point.
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for m in bx.iter() {
        let x = (1.0 + laplacian_symbol(&m)).powi(-(k as i32));
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum += comp;
    if tail {
        sum += embedding_tail_bound(k, n, radius)?;
        sum *= 1.0 + 4.0 * f64::EPSILON * (bx.cardinality() as f64).sqrt().max(16.0);
    }
    Ok(sum.sqrt())
}

/// Box radius used by [`algebra_constant`]: about `10^6` lattice points.
pub fn default_embedding_radius(n: usize) -> i64 {
    let side = 1e6f64.powf(1.0 / n as f64);
    (((side - 1.0) / 2.0).floor() as i64).max(4)
}

/// Certified `C_{k,n}` on the default box, memoized per `(k, n)`.
pub fn embedding_constant(k: u32, n: usize) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, usize), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&c) = cache.lock().expect("cache lock").get(&(k, n)) {
        return Ok(c);
    }
    let c = l1_embedding_constant(k, n, default_embedding_radius(n), true)?;
    cache.lock().expect("cache lock").insert((k, n), c);
    Ok(c)
}

/// `A_{k,n} = 2 C_k C_{k,n}` with `C_k = 2^{k-1}`, from
/// `<r+s>^k <= (<r> + <s>)^k <= 2^{k-1} (<r>^k + <s>^k)`.
pub fn algebra_constant(k: u32, n: usize) -> Result<f64> {
    Ok(2f64.powi(k as i32) * embedding_constant(k, n)?)
}

/// `sum A^{2 nu} (prod_j ||b_j||_{H^k}) r^nu`, a bound for `||P(u)||_{H^k}` on
/// `||u||_{H^k} <= r`.
pub fn growth_bound(p: &NCPolynomial, k: u32, r: f64) -> Result<f64> {
    let a = algebra_constant(k, p.theta.dim())?;
    Ok(p.terms
        .iter()
        .map(|m| {
            let nu = m.degree() as i32;
            a.powi(2 * nu) * m.coefficient_norm_product(k) * r.powi(nu)
        })
        .sum())
}

/// `sum nu A^{2 nu} (prod_j ||b_j||_{H^k}) R^{nu-1}`, the Lipschitz constant of
/// `P` on the ball of radius `R` obtained from the telescoped terms.
pub fn lipschitz_bound(p: &NCPolynomial, k: u32, r: f64) -> Result<f64> {
    let a = algebra_constant(k, p.theta.dim())?;
    Ok(p.terms
        .iter()
        .filter(|m| m.degree() > 0)
        .map(|m| {
            let nu = m.degree() as i32;
            nu as f64 * a.powi(2 * nu) * m.coefficient_norm_product(k) * r.powi(nu - 1)
        })
        .sum())
}

/// `sum_m |c_m|`.
pub fn l1_coefficient_norm(a: &NCElement) -> f64 {
    a.iter().map(|(_, c)| c.norm()).sum()
}

/// Ratio `||ab||_{H^k} / (||a||_{H^k} ||b||_{H^k})`.
pub fn algebra_ratio(a: &NCElement, b: &NCElement, k: u32) -> Result<f64> {
    let ab = a.multiply(b)?;
    Ok(h_norm(&ab, k as f64) / (h_norm(a, k as f64) * h_norm(b, k as f64)))
}

/// `U^m` with unit coefficient.
pub fn unit_mode(theta: Arc<ThetaMatrix>, m: Mode) -> NCElement {
    NCElement::monomial(theta, m, Complex64::new(1.0, 0.0))
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::lattice::cocycle;

    fn golden(n: usize) -> Arc<ThetaMatrix> {
        Arc::new(ThetaMatrix::golden(n))
    }

    #[test]
    fn constant_polynomial_ignores_argument() {
        let theta = golden(2);
        let b0 = NCElement::random(theta.clone(), 1, 2, 1.0);
        let p = NCPolynomial::new(theta.clone(), vec![Monomial::new(vec![b0.clone()]).unwrap()]).unwrap();
        let u = NCElement::random(theta.clone(), 2, 3, 1.0);
        assert_eq!(p.evaluate(&u).unwrap(), b0);
        assert_eq!(lipschitz_bound(&p, 2, 5.0).unwrap(), 0.0);
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn square_of_mode_is_cocycle() {
        let theta = golden(3);
        let m = Mode::new(&[2, -1, 3]);
        let u = unit_mode(theta.clone(), m.clone());
        let sq = NCPolynomial::power(theta.clone(), 2, 1.0).evaluate(&u).unwrap();
        let w = cocycle(&theta, &m, &m).unwrap();
        assert_eq!(sq.support_len(), 1);
        assert!((sq.coeff(&m.add(&m)) - w).norm() < 1e-15);
    }

    /// Pointwise square on a uniform grid of `size^n` nodes, transformed back.
    fn classical_square(u: &NCElement, size: usize) -> Vec<(Mode, Complex64)> {
        let n = u.dim();
        let total = size.pow(n as u32);
        let node = |mut idx: usize| {
            let mut x = vec![0.0; n];
            for j in (0..n).rev() {
                x[j] = (idx % size) as f64 / size as f64;
                idx /= size;
            }
            x
        };
        let values: Vec<Complex64> = (0..total)
            .map(|i| {
                let x = node(i);
                let v: Complex64 = u
                    .iter()
                    .map(|(m, c)| {
                        let phase: f64 = m.coords().iter().zip(&x).map(|(&mj, xj)| mj as f64 * xj).sum();
                        c * Complex64::from_polar(1.0, 2.0 * PI * phase)
                    })
                    .sum();
                v * v
            })
            .collect();
        let radius = 2 * u.support_radius();
        LatticeBox::new(n, radius)
            .iter()
            .map(|m| {
                let c: Complex64 = values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let x = node(i);
                        let phase: f64 = m.coords().iter().zip(&x).map(|(&mj, xj)| mj as f64 * xj).sum();
                        v * Complex64::from_polar(1.0, -2.0 * PI * phase)
                    })
                    .sum();
                (m, c / total as f64)
            })
            .collect()
    }

    #[test]
    fn commutative_square_matches_pointwise_square() {
        for n in [1, 2] {
            let theta = Arc::new(ThetaMatrix::zero(n));
            let half = NCElement::random(theta.clone(), 10 + n as u64, 3, 1.0);
            let u = half.add(&half.adjoint()).unwrap();
            let sq = NCPolynomial::power(theta.clone(), 2, 1.0).evaluate(&u).unwrap();
            for (m, c) in classical_square(&u, 16) {
                assert!((sq.coeff(&m) - c).norm() < 1e-12, "n={n} m={m:?}");
            }
        }
    }

    #[test]
    fn evaluation_is_linear_in_the_polynomial() {
        let theta = golden(2);
        let mono = |seed: u64| {
            let bs = (0..3).map(|i| NCElement::random(theta.clone(), seed + i as u64, 1, 1.0)).collect();
            Monomial::new(bs).unwrap()
        };
        let p = NCPolynomial::new(theta.clone(), vec![mono(1)]).unwrap();
        let q = NCPolynomial::new(theta.clone(), vec![mono(7), Monomial::power(theta.clone(), 3, Complex64::new(0.0, 2.0))]).unwrap();
        let u = NCElement::random(theta.clone(), 99, 2, 1.0);
        let lhs = p.add(&q).unwrap().evaluate(&u).unwrap();
        let rhs = p.evaluate(&u).unwrap().add(&q.evaluate(&u).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);

        let m = &p.terms()[0];
        let b = m.coefficients();
        let folded = b[0].multiply(&u).unwrap().multiply(&b[1]).unwrap().multiply(&u).unwrap().multiply(&b[2]).unwrap();
        assert!(m.evaluate(&u).unwrap().max_abs_diff(&folded) < 1e-13);
    }

    #[test]
    fn theta_mismatch_is_an_error() {
        let p = NCPolynomial::power(golden(2), 2, 1.0);
        let u = NCElement::identity(Arc::new(ThetaMatrix::zero(2)));
        assert!(matches!(p.evaluate(&u), Err(Error::ThetaMismatch)));
        let other = Monomial::power(Arc::new(ThetaMatrix::zero(3)), 1, Complex64::new(1.0, 0.0));
        assert!(NCPolynomial::new(golden(2), vec![other]).is_err());
    }

    #[test]
    fn telescoping_identity() {
        let theta = golden(2);
        let bs = (0..4).map(|i| NCElement::random(theta.clone(), 20 + i, 1, 1.0)).collect();
        let m = Monomial::new(bs).unwrap();
        let u = NCElement::random(theta.clone(), 30, 2, 1.0);
        let v = NCElement::random(theta.clone(), 31, 2, 1.0);
        let terms = m.telescoped_terms(&u, &v).unwrap();
        assert_eq!(terms.len(), 3);
        let mut sum = NCElement::zero(theta.clone());
        for t in &terms {
            sum = sum.add(t).unwrap();
        }
        let diff = m.evaluate(&u).unwrap().sub(&m.evaluate(&v).unwrap()).unwrap();
        assert!(sum.max_abs_diff(&diff) < 1e-12);
    }

    #[test]
    fn divergent_series_rejected() {
        for (k, n) in [(1, 2), (1, 3), (2, 4), (0, 1)] {
            let err = l1_embedding_constant(k, n, 5, true).unwrap_err();
            assert!(err.to_string().contains("k must exceed n/2"));
            assert!(algebra_constant(k, n).is_err());
        }
    }

    #[test]
    fn one_dimensional_series_closed_form() {
        // sum_m 1/(1 + 4 pi^2 m^2) = coth(1/2) / 2
        let exact = 0.5 / 0.5f64.tanh();
        let c = l1_embedding_constant(1, 1, 1_000_000, true).unwrap();
        assert!(c * c >= exact);
        assert!(c * c - exact < 1e-7);
        let lower = l1_embedding_constant(1, 1, 1_000_000, false).unwrap();
        assert!(lower * lower <= exact);
    }

    #[test]
    fn constant_decreases_to_one_in_k() {
        let mut prev = f64::INFINITY;
        for k in 2..12 {
            let c = l1_embedding_constant(k, 2, 40, true).unwrap();
            assert!(c <= prev && c >= 1.0);
            prev = c;
        }
        assert!(prev - 1.0 < 1e-9);
    }

    #[test]
    fn tail_bound_dominates_partial_sums() {
        for (k, n) in [(1u32, 1usize), (2, 2), (2, 3)] {
            let near = l1_embedding_constant(k, n, 6, false).unwrap().powi(2);
            let far = l1_embedding_constant(k, n, 30, false).unwrap().powi(2);
            assert!(far - near <= embedding_tail_bound(k, n, 6).unwrap());
        }
    }

    #[test]
    fn embedding_and_algebra_bounds_hold_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (n, k) in [(1usize, 1u32), (2, 2), (3, 2)] {
            let cnk = embedding_constant(k, n).unwrap();
            let a_const = algebra_constant(k, n).unwrap();
            for theta in [Arc::new(ThetaMatrix::zero(n)), golden(n)] {
                for _ in 0..40 {
                    let radius = rng.random_range(0..5);
                    let decay = rng.random_range(0.0..3.0);
                    let a = NCElement::random_with(theta.clone(), &mut rng, radius, decay);
                    let b = NCElement::random_with(theta.clone(), &mut rng, radius, decay);
                    let ha = h_norm(&a, k as f64);
                    assert!(l1_coefficient_norm(&a) <= cnk * ha + 1e-10);
                    assert!(a.linf_upper() <= cnk * ha + 1e-10);
                    assert!(algebra_ratio(&a, &b, k).unwrap() < a_const);
                }
            }
            let one = NCElement::identity(golden(n));
            assert!((algebra_ratio(&one, &one, k).unwrap() - 1.0).abs() < 1e-15);
            assert!(a_const >= 1.0);
        }
    }

    #[test]
    fn growth_and_lipschitz_bounds() {
        let theta = golden(2);
        let k = 2;
        let a = algebra_constant(k, 2).unwrap();
        let sq = NCPolynomial::power(theta.clone(), 2, 1.0);
        assert!((lipschitz_bound(&sq, k, 3.0).unwrap() - 2.0 * a.powi(4) * 3.0).abs() < 1e-9);
        assert!((growth_bound(&sq, k, 3.0).unwrap() - a.powi(4) * 9.0).abs() < 1e-9);

        let cubic = NCPolynomial::power(theta.clone(), 3, -0.5).add(&sq).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let radius_ball = 2.0;
        let lip = lipschitz_bound(&cubic, k, radius_ball).unwrap();
        let growth = growth_bound(&cubic, k, radius_ball).unwrap();
        for _ in 0..30 {
            let mut u = NCElement::random_with(theta.clone(), &mut rng, 3, 1.5);
            let mut v = NCElement::random_with(theta.clone(), &mut rng, 3, 1.5);
            u = u.scale_real(rng.random_range(0.1..1.0) * radius_ball / h_norm(&u, 2.0));
            v = v.scale_real(rng.random_range(0.1..1.0) * radius_ball / h_norm(&v, 2.0));
            let pu = cubic.evaluate(&u).unwrap();
            let pv = cubic.evaluate(&v).unwrap();
            assert!(h_norm(&pu, 2.0) <= growth);
            let lhs = h_norm(&pu.sub(&pv).unwrap(), 2.0);
            assert!(lhs <= lip * h_norm(&u.sub(&v).unwrap(), 2.0));
        }
    }

    #[test]
    fn projection_after_exact_evaluation() {
        let theta = golden(2);
        let u = NCElement::random(theta.clone(), 3, 4, 1.0);
        let p = NCPolynomial::power(theta, 2, 1.0);
        let full = p.evaluate(&u).unwrap();
        let cut = p.evaluate_with(&u, Some(4)).unwrap();
        assert_eq!(cut, full.project(4));
        assert_eq!(full.support_radius(), 8);
    }
}
