//! Linear estimates: rate laws, witnesses and kernel bounds.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::config::{padded_alpha, Params};
use super::{alpha_label, log_grid, num, Builder, Check, Table};
use crate::error::{Error, Result};
use crate::heat::{cb_norm_bracket, l2_operator_norm, l2_operator_norm_search, sharpness_witness};
use crate::kernel::{gaussian_l1_1d, periodized_l1_norm, KernelQuery, TAIL_TOLERANCE};
use crate::lattice::{MultiIndex, ThetaMatrix};
use crate::stats::{loglog_fit, spread};

const SWEEP_COLUMNS: [&str; 9] = [
    "n",
    "alpha",
    "ell",
    "t",
    "l2_norm",
    "witness_value",
    "bracket_lower",
    "bracket_upper",
    "fitted_slope",
];

const RATE_CASES: [(&[u32], u32); 4] = [(&[1], 0), (&[2], 0), (&[], 1), (&[1], 1)];

struct Job {
    n: usize,
    alpha: MultiIndex,
    ell: u32,
}

impl Job {
    fn label(&self) -> String {
        format!("n={} alpha={} ell={}", self.n, alpha_label(self.alpha.entries()), self.ell)
    }

    fn rate(&self) -> f64 {
        self.ell as f64 + 0.5 * self.alpha.order() as f64
    }
}

fn jobs(p: &Params) -> Result<Vec<Job>> {
    let dims = p.dims("dims", &[1, 2])?;
    let cases = p.operator_cases("cases", &RATE_CASES)?;
    let mut jobs = Vec::new();
    for &n in &dims {
        for (alpha, ell) in &cases {
            jobs.push(Job { n, alpha: padded_alpha(alpha, n)?, ell: *ell });
        }
    }
    Ok(jobs)
}

fn blank() -> String {
    String::new()
}

/// Exact `L^2` norms of `delta^alpha L^ell P_t` on `t = 2^{-j}` and their log-log slopes.
pub(super) fn rates(p: &Params, out: &mut Builder) -> Result<()> {
    let jobs = jobs(p)?;
    let j_min = p.int("j_min", 6)?;
    let j_max = p.int("j_max", 16)?;
    let tolerance = p.positive("tolerance", 0.05)?;
    let min_r2 = p.f64("min_r_squared", 0.999)?;
    p.finish()?;
    if j_max < j_min + 1 {
        return Err(Error::param("j_max", "need at least two times"));
    }
    let times: Vec<f64> = (j_min..=j_max).map(|j| 2f64.powi(-(j as i32))).collect();
    let norms = jobs
        .par_iter()
        .map(|job| times.iter().map(|&t| l2_operator_norm_search(&job.alpha, job.ell, t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;

    let mut sweep = Table::new("rates", &SWEEP_COLUMNS);
    let mut fits = Table::new("rate_fits", &["n", "alpha", "ell", "expected_slope", "fitted_slope", "r_squared", "argmax_at_smallest_t"]);
    for (job, values) in jobs.iter().zip(&norms) {
        let ys: Vec<f64> = values.iter().map(|v| v.value).collect();
        let fit = loglog_fit(&times, &ys);
        let (slope, r2) = fit.map_or((f64::NAN, f64::NAN), |f| (f.slope, f.r_squared));
        for (t, v) in times.iter().zip(values) {
            sweep.push(vec![
                job.n.to_string(),
                alpha_label(job.alpha.entries()),
                job.ell.to_string(),
                num(*t),
                num(v.value),
                blank(),
                blank(),
                blank(),
                num(slope),
            ]);
        }
        let argmax = values.last().map(|v| format!("{:?}", v.argmax.coords())).unwrap_or_default().replace(',', ";");
        fits.push(vec![
            job.n.to_string(),
            alpha_label(job.alpha.entries()),
            job.ell.to_string(),
            num(-job.rate()),
            num(slope),
            num(r2),
            argmax,
        ]);
        let err = (slope + job.rate()).abs();
        out.check(Check::at_most(format!("slope {}", job.label()), if err.is_nan() { f64::INFINITY } else { err }, tolerance, format!("fitted {slope:.4}, expected {:.4}", -job.rate())));
        out.check(Check::at_least(format!("r_squared {}", job.label()), if r2.is_nan() { 0.0 } else { r2 }, min_r2, ""));
    }
    out.result("times", &times);
    out.table(sweep);
    out.table(fits);
    Ok(())
}

/// Single-mode witnesses against the exact norm over several decades of `t`.
pub(super) fn sharpness(p: &Params, out: &mut Builder) -> Result<()> {
    let jobs = jobs(p)?;
    let t_min = p.positive("t_min", 10f64.powf(-7.5))?;
    let decades = p.positive("decades", 5.0)?;
    let per_decade = p.count("points_per_decade", 2)?.max(1);
    let band = p.positive("band", 10.0)?;
    p.finish()?;
    let times = log_grid(t_min, t_min * 10f64.powf(decades), per_decade);
    let rows = jobs
        .par_iter()
        .map(|job| {
            let theta = std::sync::Arc::new(ThetaMatrix::golden(job.n));
            times
                .iter()
                .map(|&t| {
                    let w = sharpness_witness(theta.clone(), &job.alpha, job.ell, t)?;
                    Ok((w.value, l2_operator_norm(&job.alpha, job.ell, t)?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sweep = Table::new("sharpness", &SWEEP_COLUMNS);
    for (job, values) in jobs.iter().zip(&rows) {
        let witness: Vec<f64> = values.iter().map(|v| v.0).collect();
        let slope = loglog_fit(&times, &witness).map_or(f64::NAN, |f| f.slope);
        let scaled: Vec<f64> = times.iter().zip(&witness).map(|(t, w)| w * t.powf(job.rate())).collect();
        for (t, (w, exact)) in times.iter().zip(values) {
            sweep.push(vec![
                job.n.to_string(),
                alpha_label(job.alpha.entries()),
                job.ell.to_string(),
                num(*t),
                num(*exact),
                num(*w),
                blank(),
                blank(),
                num(slope),
            ]);
        }
        let band_ratio = spread(&scaled);
        out.check(Check::at_most(format!("band {}", job.label()), band_ratio, band, "max/min of witness * t^rate"));
        let worst = values.iter().map(|(w, e)| w / e).fold(0.0, f64::max);
        out.check(Check::at_most(format!("witness below norm {}", job.label()), worst, 1.0 + 1e-12, "max witness/norm"));
    }
    out.result("times", &times);
    out.table(sweep);
    Ok(())
}

fn kernel_times(p: &Params) -> Result<Vec<f64>> {
    let t_min = p.positive("t_min", 1e-4)?;
    let t_max = p.positive("t_max", 1e-1)?;
    let per_decade = p.count("points_per_decade", 4)?.max(1);
    if !(t_max > t_min) {
        return Err(Error::param("t_max", "must exceed t_min"));
    }
    Ok(log_grid(t_min, t_max, per_decade))
}

/// Euclidean and periodized kernel norms against `t^{-|alpha|/2}`.
pub(super) fn kernel_scaling(p: &Params, out: &mut Builder) -> Result<()> {
    let alphas = p.index_lists("alphas", &[&[1], &[2], &[3], &[1, 1], &[2, 1]])?;
    let times = kernel_times(p)?;
    let scaling_tolerance = p.positive("scaling_tolerance", 1e-6)?;
    let flat_tolerance = p.positive("flat_tolerance", 0.02)?;
    p.finish()?;
    let rows = alphas
        .par_iter()
        .map(|a| {
            let alpha = MultiIndex::new(a);
            times
                .iter()
                .map(|&t| {
                    let q = KernelQuery::new(alpha.clone(), t)?;
                    let (lower, _) = cb_norm_bracket(&alpha, t)?;
                    let mass = periodized_l1_norm(&MultiIndex::zero(a.len()), t)?;
                    Ok((q.gaussian_l1()?, q.periodized_l1()?, lower, mass))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(
        "kernel_scaling",
        &["n", "alpha", "t", "gaussian_l1", "periodized_l1", "product_with_t_power", "periodized_product", "symbol_sup"],
    );
    let mut worst_mass: f64 = 0.0;
    for (a, values) in alphas.iter().zip(&rows) {
        let order = a.iter().sum::<u32>() as f64;
        let label = alpha_label(a);
        let mut gauss_products = Vec::new();
        let mut per_products = Vec::new();
        let mut excess: f64 = f64::NEG_INFINITY;
        let mut small_t_gap: f64 = 0.0;
        let mut young: f64 = 0.0;
        for (t, (g, h, lower, mass)) in times.iter().zip(values) {
            let w = t.powf(0.5 * order);
            gauss_products.push(g * w);
            per_products.push(h * w);
            excess = excess.max((h - g - TAIL_TOLERANCE) / g);
            if *t <= 1e-3 {
                small_t_gap = small_t_gap.max((h - g).abs() / g);
            }
            young = young.max(lower / h);
            worst_mass = worst_mass.max((mass - 1.0).abs());
            table.push(vec![
                a.len().to_string(),
                label.clone(),
                num(*t),
                num(*g),
                num(*h),
                num(g * w),
                num(h * w),
                num(*lower),
            ]);
        }
        out.check(Check::at_most(format!("gaussian scaling alpha={label}"), spread(&gauss_products) - 1.0, scaling_tolerance, "max/min - 1 of gaussian_l1 * t^{|alpha|/2}"));
        out.check(Check::at_most(format!("periodized scaling alpha={label}"), spread(&per_products) - 1.0, flat_tolerance, "max/min - 1 of periodized_l1 * t^{|alpha|/2}"));
        out.check(Check::at_most(format!("periodization domination alpha={label}"), excess, 1e-12, "max (periodized - gaussian - tail tolerance) / gaussian"));
        out.check(Check::at_most(format!("small-t agreement alpha={label}"), small_t_gap, 1e-10, "relative gap for t <= 1e-3"));
        out.check(Check::at_most(format!("symbol below kernel alpha={label}"), young, 1.0, "max sup|M| / periodized_l1"));
    }
    out.check(Check::at_most("periodized mass", worst_mass, 1e-8, "max |periodized_l1(alpha = 0) - 1|"));
    out.result("times", &times);
    out.table(table);
    Ok(())
}

/// cb-norm bracket `[sup |M_t^alpha|, ||d^alpha H_t||_{L^1}]` in one dimension by default.
pub(super) fn bracket(p: &Params, out: &mut Builder) -> Result<()> {
    let a = p.int_list("alpha", &[1])?;
    let a: Vec<u32> = a
        .into_iter()
        .map(|x| u32::try_from(x).map_err(|_| Error::param("alpha", "entries must be nonnegative")))
        .collect::<Result<_>>()?;
    if a.is_empty() {
        return Err(Error::param("alpha", "must not be empty"));
    }
    let times = kernel_times(p)?;
    let flat_tolerance = p.positive("flat_tolerance", 0.02)?;
    p.finish()?;
    let alpha = MultiIndex::new(&a);
    let pairs = times.par_iter().map(|&t| cb_norm_bracket(&alpha, t)).collect::<Result<Vec<_>>>()?;
    let uppers: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let slope = loglog_fit(&times, &uppers).map_or(f64::NAN, |f| f.slope);
    let order = alpha.order() as f64;
    let mut table = Table::new("bracket", &SWEEP_COLUMNS);
    let mut products = Vec::new();
    let mut worst: f64 = 0.0;
    for (t, (lower, upper)) in times.iter().zip(&pairs) {
        products.push(upper * t.powf(0.5 * order));
        worst = worst.max(lower / upper);
        table.push(vec![
            a.len().to_string(),
            alpha_label(&a),
            "0".into(),
            num(*t),
            num(*lower),
            blank(),
            num(*lower),
            num(*upper),
            num(slope),
        ]);
    }
    out.check(Check::at_most("lower below upper", worst, 1.0, "max lower/upper"));
    out.check(Check::at_most(
        "upper scaling",
        spread(&products) - 1.0,
        flat_tolerance,
        "max/min - 1 of upper * t^{|alpha|/2}",
    ));
    let quad = gaussian_l1_1d(1, 1.0, 14.0);
    let exact = 1.0 / PI.sqrt();
    out.check(Check::at_most("gaussian first derivative at t = 1", (quad - exact).abs() / exact, 1e-6, format!("quadrature {quad:.15}")));
    out.result("upper_times_t_power", &products);
    out.result("fitted_upper_slope", slope);
    out.table(table);
    Ok(())
}
