//! Algebra constants and the algebraic identities of the twisted product.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{theta_by_name, Params};
use super::{num, sub_seed, Builder, Check, Table};
use crate::calculus::sobolev_h_norm;
use crate::element::NCElement;
use crate::error::{Error, Result};
use crate::lattice::{cocycle, Mode, ThetaMatrix};
use crate::nonlinear::{
    algebra_constant, default_embedding_radius, embedding_constant, embedding_tail_bound, l1_coefficient_norm,
    l1_embedding_constant,
};

/// Relative slack for comparisons against certified constants.
const ROUNDOFF: f64 = 1e-12;

struct Sampling {
    samples: usize,
    max_radius: i64,
    decay: (f64, f64),
}

fn sampling(p: &Params) -> Result<Sampling> {
    let samples = p.count("samples", 10_000)?;
    let max_radius = p.int("max_radius", 4)?;
    let decay = p.f64_list("decay", &[0.0, 3.0])?;
    if max_radius < 0 {
        return Err(Error::param("max_radius", "must be nonnegative"));
    }
    if decay.len() != 2 || decay[0] > decay[1] {
        return Err(Error::param("decay", "expected [low, high]"));
    }
    Ok(Sampling { samples, max_radius, decay: (decay[0], decay[1]) })
}

fn random_element(theta: &Arc<ThetaMatrix>, rng: &mut ChaCha8Rng, s: &Sampling) -> NCElement {
    let radius = rng.random_range(0..=s.max_radius);
    let decay = s.decay.0 + (s.decay.1 - s.decay.0) * rng.random::<f64>();
    let scale = 0.5 + rng.random::<f64>();
    NCElement::random_with(theta.clone(), rng, radius, decay).scale_real(scale)
}

fn cases(p: &Params) -> Result<Vec<(usize, u32)>> {
    p.pairs("cases", &[(1, 1), (2, 2)])?
        .into_iter()
        .map(|(n, k)| {
            if n < 1 || k < 0 {
                return Err(Error::param("cases", format!("invalid (n, k) = ({n}, {k})")));
            }
            Ok((n as usize, k as u32))
        })
        .collect()
}

/// Worst observed ratios of one `(n, k, theta)` sweep.
struct Sweep {
    algebra: f64,
    embedding: f64,
    sup: f64,
    algebra_violations: usize,
    embedding_violations: usize,
}

/// `a_const = None` skips the products.
fn sweep(theta: &Arc<ThetaMatrix>, k: u32, a_const: Option<f64>, c_const: f64, s: &Sampling, seed: u64, stream: u64) -> Result<Sweep> {
    let kf = k as f64;
    let per_sample = (0..s.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, stream, i as u64));
            let a = random_element(theta, &mut rng, s);
            let b = random_element(theta, &mut rng, s);
            let (na, nb) = (sobolev_h_norm(&a, kf)?, sobolev_h_norm(&b, kf)?);
            let alg = match a_const {
                Some(_) => sobolev_h_norm(&a.multiply(&b)?, kf)? / (na * nb),
                None => 0.0,
            };
            let emb = l1_coefficient_norm(&a) / na;
            let sup = a.linf_upper() / na;
            Ok((alg, emb, sup))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Sweep { algebra: 0.0, embedding: 0.0, sup: 0.0, algebra_violations: 0, embedding_violations: 0 };
    for (alg, emb, sup) in per_sample {
        out.algebra = out.algebra.max(alg);
        out.embedding = out.embedding.max(emb);
        out.sup = out.sup.max(sup);
        out.algebra_violations += a_const.is_some_and(|a| alg > a * (1.0 + ROUNDOFF)) as usize;
        out.embedding_violations += (emb > c_const * (1.0 + ROUNDOFF)) as usize;
    }
    Ok(out)
}

/// Random pairs against `||ab||_{H^k} <= A ||a|| ||b||` and `sum |c_m| <= C ||a||_{H^k}`,
/// followed by the algebraic laws.
pub(super) fn algebra(p: &Params, seed: u64, out: &mut Builder) -> Result<()> {
    let cases = cases(p)?;
    let thetas = p.string_list("thetas", &["zero", "golden"])?;
    let s = sampling(p)?;
    let law_cases = p.count("law_cases", 1000)?;
    let law_dims = p.dims("law_dims", &[1, 2, 3])?;
    let law_tolerance = p.positive("law_tolerance", 1e-12)?;
    p.finish()?;

    let mut table = Table::new(
        "algebra",
        &["n", "k", "theta", "samples", "algebra_constant", "worst_algebra_ratio", "algebra_violations", "embedding_constant", "worst_l1_ratio", "embedding_violations"],
    );
    let mut stream = 0;
    for &(n, k) in &cases {
        let a_const = algebra_constant(k, n)?;
        let c_const = embedding_constant(k, n)?;
        for name in &thetas {
            let theta = theta_by_name(name, n)?;
            let r = sweep(&theta, k, Some(a_const), c_const, &s, seed, stream)?;
            stream += 1;
            table.push(vec![
                n.to_string(),
                k.to_string(),
                name.clone(),
                s.samples.to_string(),
                num(a_const),
                num(r.algebra),
                r.algebra_violations.to_string(),
                num(c_const),
                num(r.embedding),
                r.embedding_violations.to_string(),
            ]);
            let label = format!("n={n} k={k} theta={name}");
            out.check(Check::at_most(format!("algebra {label}"), r.algebra_violations as f64, 0.0, format!("worst ratio {:.4} vs A = {a_const:.4}", r.algebra)));
            out.check(Check::at_most(format!("embedding {label}"), r.embedding_violations as f64, 0.0, format!("worst ratio {:.4} vs C = {c_const:.4}", r.embedding)));
        }
    }
    out.table(table);
    algebra_laws(law_cases, &law_dims, law_tolerance, seed, out)
}

fn random_theta(rng: &mut ChaCha8Rng, n: usize) -> Result<ThetaMatrix> {
    let mut entries = vec![0.0; n * n];
    for j in 0..n {
        for k in j + 1..n {
            let x = rng.random::<f64>() * 2.0 - 1.0;
            entries[j * n + k] = x;
            entries[k * n + j] = -x;
        }
    }
    ThetaMatrix::new(n, entries)
}

fn random_mode(rng: &mut ChaCha8Rng, n: usize, radius: i64) -> Mode {
    let coords: Vec<i64> = (0..n).map(|_| rng.random_range(-radius..=radius)).collect();
    Mode::new(&coords)
}

/// Cocycle identity, associativity, traciality, Plancherel and `(ab)^* = b^* a^*`.
fn algebra_laws(cases: usize, dims: &[usize], tolerance: f64, seed: u64, out: &mut Builder) -> Result<()> {
    const LAWS: [&str; 5] = ["cocycle", "associativity", "traciality", "plancherel", "adjoint"];
    let errors = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, u64::MAX, i as u64));
            let n = dims[i % dims.len()];
            let theta = Arc::new(random_theta(&mut rng, n)?);
            let (r, s, t) = (random_mode(&mut rng, n, 10), random_mode(&mut rng, n, 10), random_mode(&mut rng, n, 10));
            let lhs = cocycle(&theta, &r, &s)? * cocycle(&theta, &r.add(&s), &t)?;
            let rhs = cocycle(&theta, &r, &s.add(&t))? * cocycle(&theta, &s, &t)?;
            let cocycle_err = (lhs - rhs).norm();

            let sampling = Sampling { samples: 0, max_radius: 3, decay: (0.0, 2.0) };
            let a = random_element(&theta, &mut rng, &sampling);
            let b = random_element(&theta, &mut rng, &sampling);
            let c = random_element(&theta, &mut rng, &sampling);
            let scale = |xs: &[&NCElement]| xs.iter().map(|x| l1_coefficient_norm(x)).product::<f64>().max(f64::MIN_POSITIVE);
            let ab = a.multiply(&b)?;
            let assoc = ab.multiply(&c)?.max_abs_diff(&a.multiply(&b.multiply(&c)?)?) / scale(&[&a, &b, &c]);
            let trace = (ab.trace() - b.multiply(&a)?.trace()).norm() / scale(&[&a, &b]);
            let plancherel = (a.adjoint().multiply(&a)?.trace().re - a.l2_norm().powi(2)).abs() / a.l2_norm().powi(2).max(f64::MIN_POSITIVE);
            let adjoint = ab.adjoint().max_abs_diff(&b.adjoint().multiply(&a.adjoint())?) / scale(&[&a, &b]);
            Ok([cocycle_err, assoc, trace, plancherel, adjoint])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("laws", &["law", "cases", "max_error", "violations"]);
    for (j, law) in LAWS.iter().enumerate() {
        let worst = errors.iter().map(|e| e[j]).fold(0.0, f64::max);
        let violations = errors.iter().filter(|e| !(e[j] <= tolerance)).count();
        table.push(vec![law.to_string(), cases.to_string(), num(worst), violations.to_string()]);
        out.check(Check::at_most(format!("law {law}"), violations as f64, 0.0, format!("max error {worst:e}")));
    }
    out.table(table);
    Ok(())
}

/// The certified `l^1` embedding constant: partial sums, tail bounds and random data.
pub(super) fn embedding(p: &Params, seed: u64, out: &mut Builder) -> Result<()> {
    let cases = {
        let raw = p.pairs("cases", &[(1, 1), (2, 2), (3, 2)])?;
        raw.into_iter()
            .map(|(n, k)| if n >= 1 && k >= 0 { Ok((n as usize, k as u32)) } else { Err(Error::param("cases", "invalid (n, k)")) })
            .collect::<Result<Vec<_>>>()?
    };
    let thetas = p.string_list("thetas", &["zero", "golden"])?;
    let radii = p.int_list("radii", &[4, 16, 64])?;
    let s = sampling(p)?;
    p.finish()?;

    let mut partial = Table::new("embedding_partial_sums", &["n", "k", "radius", "partial_sum_sqrt", "tail_bound", "certified"]);
    let mut table = Table::new("embedding", &["n", "k", "theta", "samples", "constant", "worst_l1_ratio", "worst_sup_ratio", "violations"]);
    let mut stream = 1 << 32;
    for &(n, k) in &cases {
        let c_const = embedding_constant(k, n)?;
        for &r in radii.iter().chain(std::iter::once(&default_embedding_radius(n))) {
            partial.push(vec![
                n.to_string(),
                k.to_string(),
                r.to_string(),
                num(l1_embedding_constant(k, n, r, false)?),
                num(embedding_tail_bound(k, n, r)?),
                num(l1_embedding_constant(k, n, r, true)?),
            ]);
        }
        for name in &thetas {
            let theta = theta_by_name(name, n)?;
            let r = sweep(&theta, k, None, c_const, &s, seed, stream)?;
            stream += 1;
            table.push(vec![
                n.to_string(),
                k.to_string(),
                name.clone(),
                s.samples.to_string(),
                num(c_const),
                num(r.embedding),
                num(r.sup),
                r.embedding_violations.to_string(),
            ]);
            out.check(Check::at_most(
                format!("embedding n={n} k={k} theta={name}"),
                r.embedding_violations as f64,
                0.0,
                format!("worst ratio {:.4} vs C = {c_const:.4}", r.embedding),
            ));
        }
    }
    out.table(partial);
    out.table(table);
    Ok(())
}
