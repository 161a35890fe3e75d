use num_complex::Complex64;

use super::field::{axpy, BoxLayout, Field};
use crate::element::NCElement;
use crate::error::{Error, Result};
use crate::nonlinear::NCPolynomial;

/// Interpolation of `s -> N(u(s))` inside each grid interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DuhamelRule {
    /// Left endpoint value; first order.
    PiecewiseConstant,
    /// Quadratic through the interval endpoints and the previous node
    /// (the next node on the first interval); third order.
    PiecewiseQuadratic,
}

impl std::str::FromStr for DuhamelRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(DuhamelRule::PiecewiseConstant),
            "quadratic" => Ok(DuhamelRule::PiecewiseQuadratic),
            other => Err(Error::param("rule", format!("expected `constant` or `quadratic`, got `{other}`"))),
        }
    }
}

/// `g_p(z) = int_0^1 e^{-z x} x^p dx` for `p = 0, 1, 2`.
pub(crate) fn moments(z: f64) -> [f64; 3] {
    if z < 1.0 {
        let mut g = [0.0; 3];
        for (p, gp) in g.iter_mut().enumerate() {
            let mut term = 1.0;
            let mut j = 0usize;
            loop {
                let add = term / (p + j + 1) as f64;
                *gp += add;
                if add.abs() < 1e-18 * gp.abs() {
                    break;
                }
                j += 1;
                term *= -z / j as f64;
            }
        }
        g
    } else {
        let e = (-z).exp();
        let g0 = -(-z).exp_m1() / z;
        let g1 = (g0 - e) / z;
        let g2 = (2.0 * g1 - e) / z;
        [g0, g1, g2]
    }
}

/// Nodes and their `x`-coordinates for interval `i`, where `s = s_{i+1} - h x`.
fn stencil(rule: DuhamelRule, grid: &[f64], i: usize) -> Vec<(usize, f64)> {
    let h = grid[i + 1] - grid[i];
    match rule {
        DuhamelRule::PiecewiseConstant => vec![(i, 1.0)],
        DuhamelRule::PiecewiseQuadratic if grid.len() < 3 => vec![(i + 1, 0.0), (i, 1.0)],
        DuhamelRule::PiecewiseQuadratic if i == 0 => {
            vec![(1, 0.0), (0, 1.0), (2, -(grid[2] - grid[1]) / h)]
        }
        DuhamelRule::PiecewiseQuadratic => {
            vec![(i + 1, 0.0), (i, 1.0), (i - 1, 1.0 + (grid[i] - grid[i - 1]) / h)]
        }
    }
}

fn lagrange_weights(stencil: &[(usize, f64)], g: [f64; 3], h: f64) -> Vec<f64> {
    match stencil.len() {
        1 => vec![h * g[0]],
        2 => {
            let (x0, x1) = (stencil[0].1, stencil[1].1);
            // l_0(x) = (x - x1) / (x0 - x1), l_1(x) = (x - x0) / (x1 - x0)
            vec![h * (g[1] - x1 * g[0]) / (x0 - x1), h * (g[1] - x0 * g[0]) / (x1 - x0)]
        }
        _ => (0..3)
            .map(|a| {
                let xa = stencil[a].1;
                let (xb, xc) = (stencil[(a + 1) % 3].1, stencil[(a + 2) % 3].1);
                h * (g[2] - (xb + xc) * g[1] + xb * xc * g[0]) / ((xa - xb) * (xa - xc))
            })
            .collect(),
    }
}

/// Weights `w_j` with `int_{s_i}^{s_{i+1}} e^{-lambda (s_{i+1} - s)} N(s) ds ~ sum_j w_j N(s_j)`.
pub fn product_weights(rule: DuhamelRule, grid: &[f64], i: usize, lambda: f64) -> Vec<(usize, f64)> {
    let h = grid[i + 1] - grid[i];
    let st = stencil(rule, grid, i);
    let w = lagrange_weights(&st, moments(lambda * h), h);
    st.iter().zip(w).map(|((node, _), w)| (*node, w)).collect()
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::param("grid", "needs at least two times"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::param("grid", "times must be finite and strictly increasing"));
    }
    Ok(())
}

/// States `u(s_j) = P_{s_j - s_0} start + int_{s_0}^{s_j} P_{s_j - s} N(s) ds` from
/// the values of `N` at the grid nodes.
pub(crate) fn integrate_window(
    layout: &BoxLayout,
    start: &[Complex64],
    nonlinear: &[Field],
    grid: &[f64],
    rule: DuhamelRule,
) -> Vec<Field> {
    let shells = layout.shell_lambda.len();
    let mut states = Vec::with_capacity(grid.len());
    states.push(start.to_vec());
    let mut integral = layout.zeros();
    for i in 0..grid.len() - 1 {
        let h = grid[i + 1] - grid[i];
        let st = stencil(rule, grid, i);
        let mut decay = vec![0.0; shells];
        let mut tables = vec![vec![0.0; shells]; st.len()];
        for (s, &lambda) in layout.shell_lambda.iter().enumerate() {
            decay[s] = (-lambda * h).exp();
            for (j, w) in lagrange_weights(&st, moments(lambda * h), h).into_iter().enumerate() {
                tables[j][s] = w;
            }
        }
        integral = layout.scale_by_shell(&integral, &decay);
        for ((node, _), table) in st.iter().zip(&tables) {
            axpy(&mut integral, &layout.scale_by_shell(&nonlinear[*node], table));
        }
        let mut next = layout.heat(start, grid[i + 1] - grid[0]);
        axpy(&mut next, &integral);
        states.push(next);
    }
    states
}

/// `(Phi u)(s_j) = P_{s_j - s_0} u_0 + int_{s_0}^{s_j} P_{s_j - s} P(u(s)) ds` on the
/// Galerkin box of `cutoff`, for `u` sampled at the grid times.
pub fn duhamel_map(
    samples: &[NCElement],
    u0: &NCElement,
    p: &NCPolynomial,
    grid: &[f64],
    rule: DuhamelRule,
    cutoff: i64,
) -> Result<Vec<NCElement>> {
    validate_grid(grid)?;
    if samples.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: samples.len(),
        });
    }
    let layout = BoxLayout::new(u0.theta().clone(), cutoff);
    let nonlinear = samples
        .iter()
        .map(|u| Ok(layout.to_field(&p.evaluate_with(u, Some(cutoff))?)))
        .collect::<Result<Vec<_>>>()?;
    integrate_window(&layout, &layout.to_field(u0), &nonlinear, grid, rule)
        .iter()
        .map(|f| layout.to_element(f))
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::heat::heat_apply;
    use crate::lattice::{Mode, ThetaMatrix};
    use crate::quadrature::integrate;

    #[test]
    fn moments_match_quadrature_on_both_branches() {
        for z in [0.0, 1e-9, 0.3, 0.999, 1.0, 1.001, 7.5, 300.0] {
            let g = moments(z);
            for p in 0..3 {
                let q = integrate(|x: f64| (-z * x).exp() * x.powi(p as i32), 0.0, 1.0, 0.0, 1e-15);
                assert!((g[p] - q).abs() <= 1e-14 * q, "z={z} p={p}");
            }
        }
    }

    #[test]
    fn weights_integrate_quadratics_exactly() {
        let grid = [0.0, 0.1, 0.25, 0.3, 0.5];
        for rule in [DuhamelRule::PiecewiseQuadratic] {
            for i in 0..4 {
                for lambda in [0.0, 3.0, 400.0] {
                    let f = |s: f64| 1.0 - 2.0 * s + 5.0 * s * s;
                    let (a, b) = (grid[i], grid[i + 1]);
                    let exact = integrate(|s| (-lambda * (b - s)).exp() * f(s), a, b, 0.0, 1e-15);
                    let approx: f64 = product_weights(rule, &grid, i, lambda).iter().map(|(j, w)| w * f(grid[*j])).sum();
                    assert!((approx - exact).abs() < 1e-13, "i={i} lambda={lambda}");
                }
            }
        }
        let w = product_weights(DuhamelRule::PiecewiseConstant, &grid, 2, 0.0);
        assert_eq!(w.len(), 1);
        assert!((w[0].1 - 0.05).abs() < 1e-15);
    }

    #[test]
    fn zero_nonlinearity_gives_heat_flow() {
        let theta = Arc::new(ThetaMatrix::golden(2));
        let u0 = NCElement::random(theta.clone(), 4, 3, 1.0);
        let grid: Vec<f64> = (0..6).map(|i| 0.01 * i as f64).collect();
        let p = NCPolynomial::zero(theta);
        let samples = vec![u0.clone(); grid.len()];
        let out = duhamel_map(&samples, &u0, &p, &grid, DuhamelRule::PiecewiseQuadratic, 3).unwrap();
        for (t, u) in grid.iter().zip(&out) {
            assert!(u.max_abs_diff(&heat_apply(&u0, *t).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn constant_forcing_on_zero_mode_integrates_exactly() {
        let theta = Arc::new(ThetaMatrix::golden(2));
        let c = 0.7;
        let u0 = NCElement::zero(theta.clone());
        let p = NCPolynomial::power(theta.clone(), 0, c);
        let grid = [0.0, 0.013, 0.05, 0.051, 0.2];
        for rule in [DuhamelRule::PiecewiseConstant, DuhamelRule::PiecewiseQuadratic] {
            let out = duhamel_map(&vec![u0.clone(); grid.len()], &u0, &p, &grid, rule, 2).unwrap();
            for (t, u) in grid.iter().zip(&out) {
                assert!((u.coeff(&Mode::zero(2)).re - c * t).abs() < 1e-15);
                assert_eq!(u.support_len(), usize::from(*t > 0.0));
            }
        }
    }

    #[test]
    fn grid_and_sample_errors() {
        let theta = Arc::new(ThetaMatrix::zero(1));
        let u0 = NCElement::identity(theta.clone());
        let p = NCPolynomial::zero(theta);
        assert!(duhamel_map(&[u0.clone()], &u0, &p, &[0.0], DuhamelRule::PiecewiseConstant, 2).is_err());
        assert!(duhamel_map(&[u0.clone(), u0.clone()], &u0, &p, &[0.0, 0.0], DuhamelRule::PiecewiseConstant, 2).is_err());
        assert!(duhamel_map(&[u0.clone()], &u0, &p, &[0.0, 1.0], DuhamelRule::PiecewiseConstant, 2).is_err());
        assert!("cubic".parse::<DuhamelRule>().is_err());
    }
}
