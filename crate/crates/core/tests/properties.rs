use std::sync::Arc;

use nctorus::calculus::{derivation, laplacian, sobolev_h_norm};
use nctorus::heat::{heat_apply, l2_operator_norm, sharpness_witness, sobolev_regularize};
use nctorus::kernel::{gaussian_l1_norm, periodized_l1_norm};
use nctorus::nonlinear::{algebra_constant, embedding_constant, l1_coefficient_norm, Monomial};
use nctorus::solver::phi1;
use nctorus::{cocycle, Mode, MultiIndex, NCElement, ThetaMatrix};
use num_complex::Complex64;
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn skew(n: usize, upper: &[f64]) -> Arc<ThetaMatrix> {
    let mut entries = vec![0.0; n * n];
    let mut it = upper.iter();
    for j in 0..n {
        for k in j + 1..n {
            let x = *it.next().unwrap();
            entries[j * n + k] = x;
            entries[k * n + j] = -x;
        }
    }
    Arc::new(ThetaMatrix::new(n, entries).unwrap())
}

fn theta_strategy() -> impl Strategy<Value = Arc<ThetaMatrix>> {
    (1usize..=3).prop_flat_map(|n| prop::collection::vec(-1.0f64..1.0, 3).prop_map(move |u| skew(n, &u)))
}

fn element(theta: &Arc<ThetaMatrix>, seed: u64, radius: i64) -> NCElement {
    NCElement::random(theta.clone(), seed, radius, 1.5)
}

fn mode(n: usize, coords: &[i64]) -> Mode {
    Mode::new(&coords[..n])
}

fn scale(xs: &[&NCElement]) -> f64 {
    xs.iter().map(|x| l1_coefficient_norm(x)).product::<f64>().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cocycle_is_unimodular_and_associative(
        theta in theta_strategy(),
        r in prop::collection::vec(-10i64..=10, 3),
        s in prop::collection::vec(-10i64..=10, 3),
        t in prop::collection::vec(-10i64..=10, 3),
    ) {
        let n = theta.dim();
        let (r, s, t) = (mode(n, &r), mode(n, &s), mode(n, &t));
        let w = cocycle(&theta, &r, &s).unwrap();
        prop_assert!((w.norm() - 1.0).abs() < TOL);
        let lhs = w * cocycle(&theta, &r.add(&s), &t).unwrap();
        let rhs = cocycle(&theta, &r, &s.add(&t)).unwrap() * cocycle(&theta, &s, &t).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn commutation_relation_of_generators(theta in theta_strategy()) {
        let n = theta.dim();
        let one = Complex64::new(1.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                let uj = NCElement::monomial(theta.clone(), Mode::unit(n, j), one);
                let uk = NCElement::monomial(theta.clone(), Mode::unit(n, k), one);
                let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * theta.get(k, j));
                let lhs = uk.multiply(&uj).unwrap();
                let rhs = uj.multiply(&uk).unwrap().scale(phase);
                prop_assert!(lhs.max_abs_diff(&rhs) < TOL);
            }
        }
    }

    #[test]
    fn product_laws(theta in theta_strategy(), seed in any::<u64>(), radius in 0i64..=2) {
        let a = element(&theta, seed, radius);
        let b = element(&theta, seed ^ 1, radius);
        let c = element(&theta, seed ^ 2, radius);
        let ab = a.multiply(&b).unwrap();
        let assoc = ab.multiply(&c).unwrap().max_abs_diff(&a.multiply(&b.multiply(&c).unwrap()).unwrap());
        prop_assert!(assoc / scale(&[&a, &b, &c]) < TOL);
        let trace = (ab.trace() - b.multiply(&a).unwrap().trace()).norm();
        prop_assert!(trace / scale(&[&a, &b]) < TOL);
        let adjoint = ab.adjoint().max_abs_diff(&b.adjoint().multiply(&a.adjoint()).unwrap());
        prop_assert!(adjoint / scale(&[&a, &b]) < TOL);
        let plancherel = a.adjoint().multiply(&a).unwrap().trace().re;
        prop_assert!((plancherel - a.l2_norm().powi(2)).abs() <= TOL * a.l2_norm().powi(2).max(1.0));
    }

    #[test]
    fn derivations_satisfy_leibniz(theta in theta_strategy(), seed in any::<u64>(), j in 0usize..3) {
        let n = theta.dim();
        let alpha = MultiIndex::axis(n, j % n, 1);
        let a = element(&theta, seed, 2);
        let b = element(&theta, seed ^ 7, 2);
        let lhs = derivation(&a.multiply(&b).unwrap(), &alpha).unwrap();
        let rhs = derivation(&a, &alpha).unwrap().multiply(&b).unwrap()
            .add(&a.multiply(&derivation(&b, &alpha).unwrap()).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) / scale(&[&a, &b]).max(l1_coefficient_norm(&lhs)) < 1e-11);
    }

    #[test]
    fn heat_semigroup_law_and_contraction(
        theta in theta_strategy(),
        seed in any::<u64>(),
        t in 1e-4f64..0.1,
        s in 1e-4f64..0.1,
    ) {
        let a = element(&theta, seed, 3);
        let composed = heat_apply(&heat_apply(&a, s).unwrap(), t).unwrap();
        let direct = heat_apply(&a, t + s).unwrap();
        prop_assert!(composed.max_abs_diff(&direct) < TOL);
        prop_assert!(direct.l2_norm() <= a.l2_norm() * (1.0 + TOL));
        let d = 1e-6;
        let derivative = heat_apply(&a, t + d).unwrap().sub(&heat_apply(&a, t - d).unwrap()).unwrap().scale_real(0.5 / d);
        let generator = laplacian(&heat_apply(&a, t).unwrap());
        prop_assert!(derivative.add(&generator).unwrap().l2_norm() <= 1e-4 * generator.l2_norm().max(1.0));
    }

    #[test]
    fn sobolev_norms_increase_with_order(theta in theta_strategy(), seed in any::<u64>(), s in 0.0f64..3.0) {
        let a = element(&theta, seed, 3);
        let lo = sobolev_h_norm(&a, s).unwrap();
        let hi = sobolev_h_norm(&a, s + 0.5).unwrap();
        prop_assert!(lo <= hi * (1.0 + TOL));
        prop_assert!(sobolev_h_norm(&a, 0.0).unwrap() - a.l2_norm() <= TOL * a.l2_norm());
    }

    #[test]
    fn sobolev_algebra_and_embedding(seed in any::<u64>(), radius in 0i64..=4, golden in any::<bool>()) {
        for (n, k) in [(1usize, 1u32), (2, 2)] {
            let theta = Arc::new(if golden { ThetaMatrix::golden(n) } else { ThetaMatrix::zero(n) });
            let a = element(&theta, seed, radius);
            let b = element(&theta, seed ^ 3, radius);
            let kf = k as f64;
            let (na, nb) = (sobolev_h_norm(&a, kf).unwrap(), sobolev_h_norm(&b, kf).unwrap());
            let nab = sobolev_h_norm(&a.multiply(&b).unwrap(), kf).unwrap();
            prop_assert!(nab <= algebra_constant(k, n).unwrap() * na * nb * (1.0 + TOL));
            prop_assert!(l1_coefficient_norm(&a) <= embedding_constant(k, n).unwrap() * na * (1.0 + TOL));
        }
    }

    #[test]
    fn witness_never_exceeds_operator_norm(
        n in 1usize..=2,
        order in 0u32..=2,
        ell in 0u32..=1,
        log_t in -7.0f64..-3.0,
    ) {
        let t = 10f64.powf(log_t);
        let alpha = MultiIndex::axis(n, 0, order);
        let w = sharpness_witness(Arc::new(ThetaMatrix::zero(n)), &alpha, ell, t).unwrap();
        let norm = l2_operator_norm(&alpha, ell, t).unwrap();
        prop_assert!(w.value <= norm * (1.0 + TOL));
    }

    #[test]
    fn periodization_dominates_free_kernel(order in 1u32..=3, log_t in -4.0f64..-1.0) {
        let t = 10f64.powf(log_t);
        let alpha = MultiIndex::new(&[order]);
        let g = gaussian_l1_norm(&alpha, t).unwrap();
        let h = periodized_l1_norm(&alpha, t).unwrap();
        prop_assert!(h <= g * (1.0 + 1e-10) + 1e-12);
        if t <= 1e-3 {
            prop_assert!((h - g).abs() <= 1e-10 * g);
        }
    }

    #[test]
    fn telescoping_sums_to_difference(theta in theta_strategy(), seed in any::<u64>(), degree in 1usize..=3) {
        let coeffs: Vec<NCElement> = (0..=degree).map(|i| element(&theta, seed ^ (i as u64 + 11), 1)).collect();
        let m = Monomial::new(coeffs).unwrap();
        let u = element(&theta, seed ^ 101, 1);
        let v = element(&theta, seed ^ 202, 1);
        let mut sum = NCElement::zero(theta.clone());
        for term in m.telescoped_terms(&u, &v).unwrap() {
            sum = sum.add(&term).unwrap();
        }
        let diff = m.evaluate(&u).unwrap().sub(&m.evaluate(&v).unwrap()).unwrap();
        prop_assert!(sum.max_abs_diff(&diff) <= 1e-10 * l1_coefficient_norm(&diff).max(1.0));
    }

    #[test]
    fn regularization_ratio_is_finite(seed in any::<u64>(), r in 1u32..=2, log_t in -4.0f64..0.0) {
        let theta = Arc::new(ThetaMatrix::golden(2));
        let a = element(&theta, seed, 3);
        let (_, ratio) = sobolev_regularize(&a, 1, r, 10f64.powf(log_t)).unwrap();
        prop_assert!(ratio.is_finite() && ratio >= 0.0);
    }

    #[test]
    fn phi1_matches_closed_form(z in -50.0f64..50.0) {
        let expected = if z.abs() < 1e-3 { 1.0 - z / 2.0 + z * z / 6.0 } else { -(-z).exp_m1() / z };
        prop_assert!((phi1(z) - expected).abs() <= 1e-9 * expected.abs().max(1.0));
        prop_assert!(phi1(z) > 0.0);
    }

    #[test]
    fn text_form_round_trips(theta in theta_strategy(), seed in any::<u64>(), radius in 0i64..=3) {
        let a = element(&theta, seed, radius);
        let back = NCElement::from_text(theta.clone(), &a.to_text()).unwrap();
        prop_assert_eq!(a, back);
    }
}
