//! Typed access to experiment configs.
//!
//! Configs are TOML tables. Every getter records the key it read so that
//! misspelled keys are reported instead of silently ignored.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use toml::{Table, Value};

use crate::calculus::sobolev_h_norm;
use crate::element::NCElement;
use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, ThetaMatrix};
use crate::nonlinear::{Monomial, NCPolynomial};
use crate::solver::SolverConfig;

/// Keys read by the CLI itself rather than by a command.
const RESERVED: [&str; 2] = ["command", "seed"];

#[derive(Debug)]
pub struct Params {
    table: Table,
    base_dir: PathBuf,
    used: RefCell<BTreeSet<String>>,
}

fn bad(key: &str, reason: impl Into<String>) -> Error {
    Error::param(key, reason)
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        other => Err(bad(key, format!("expected a number, found {}", other.type_str()))),
    }
}

fn as_int(key: &str, v: &Value) -> Result<i64> {
    v.as_integer()
        .ok_or_else(|| bad(key, format!("expected an integer, found {}", v.type_str())))
}

fn as_array<'a>(key: &str, v: &'a Value) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| bad(key, format!("expected an array, found {}", v.type_str())))
}

impl Params {
    pub fn new(table: Table, base_dir: impl Into<PathBuf>) -> Self {
        Params {
            table,
            base_dir: base_dir.into(),
            used: RefCell::new(BTreeSet::new()),
        }
    }

    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count().max(1))
                .unwrap_or(0);
            Error::Parse {
                line,
                reason: e.message().to_string(),
            }
        })?;
        Ok(Params::new(table, base_dir))
    }

    pub fn empty() -> Self {
        Params::new(Table::new(), ".")
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.used.borrow_mut().insert(key.to_string());
        self.table.get(key)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key).map_or(Ok(default), |v| as_f64(key, v))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| as_f64(key, v)).transpose()
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.f64(key, default)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(bad(key, format!("must be positive and finite, got {v}")))
        }
    }

    pub fn int(&self, key: &str, default: i64) -> Result<i64> {
        self.get(key).map_or(Ok(default), |v| as_int(key, v))
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize> {
        let v = self.int(key, default as i64)?;
        usize::try_from(v).map_err(|_| bad(key, format!("must be nonnegative, got {v}")))
    }

    pub fn order(&self, key: &str, default: u32) -> Result<u32> {
        let v = self.int(key, default as i64)?;
        u32::try_from(v).map_err(|_| bad(key, format!("must be a nonnegative integer, got {v}")))
    }

    pub fn string(&self, key: &str, default: &str) -> Result<String> {
        match self.get(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(other) => Err(bad(key, format!("expected a string, found {}", other.type_str()))),
        }
    }

    pub fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Boolean(b)) => Ok(*b),
            Some(other) => Err(bad(key, format!("expected a boolean, found {}", other.type_str()))),
        }
    }

    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => as_array(key, v)?.iter().map(|x| as_f64(key, x)).collect(),
        }
    }

    pub fn int_list(&self, key: &str, default: &[i64]) -> Result<Vec<i64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => as_array(key, v)?.iter().map(|x| as_int(key, x)).collect(),
        }
    }

    pub fn dims(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        let raw = self.int_list(key, &default.iter().map(|&d| d as i64).collect::<Vec<_>>())?;
        raw.into_iter()
            .map(|d| if d >= 1 { Ok(d as usize) } else { Err(bad(key, format!("dimension must be at least 1, got {d}"))) })
            .collect()
    }

    pub fn string_list(&self, key: &str, default: &[&str]) -> Result<Vec<String>> {
        match self.get(key) {
            None => Ok(default.iter().map(|s| s.to_string()).collect()),
            Some(v) => as_array(key, v)?
                .iter()
                .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad(key, "expected an array of strings")))
                .collect(),
        }
    }

    /// Array of integer pairs such as `[[1, 1], [2, 2]]`.
    pub fn pairs(&self, key: &str, default: &[(i64, i64)]) -> Result<Vec<(i64, i64)>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => as_array(key, v)?
                .iter()
                .map(|p| {
                    let p = as_array(key, p)?;
                    if p.len() != 2 {
                        return Err(bad(key, "expected pairs of integers"));
                    }
                    Ok((as_int(key, &p[0])?, as_int(key, &p[1])?))
                })
                .collect(),
        }
    }

    /// Array of integer arrays such as `alphas = [[1], [2, 1]]`.
    pub fn index_lists(&self, key: &str, default: &[&[u32]]) -> Result<Vec<Vec<u32>>> {
        match self.get(key) {
            None => Ok(default.iter().map(|a| a.to_vec()).collect()),
            Some(v) => as_array(key, v)?
                .iter()
                .map(|a| {
                    as_array(key, a)?
                        .iter()
                        .map(|x| u32::try_from(as_int(key, x)?).map_err(|_| bad(key, "entries must be nonnegative")))
                        .collect()
                })
                .collect(),
        }
    }

    /// `cases = [{ alpha = [1], ell = 0 }, ...]`; `alpha` is padded with zeros to `n`.
    pub fn operator_cases(&self, key: &str, default: &[(&[u32], u32)]) -> Result<Vec<(Vec<u32>, u32)>> {
        match self.get(key) {
            None => Ok(default.iter().map(|(a, l)| (a.to_vec(), *l)).collect()),
            Some(v) => as_array(key, v)?
                .iter()
                .map(|case| {
                    let t = case.as_table().ok_or_else(|| bad(key, "expected tables with `alpha` and `ell`"))?;
                    let alpha = t
                        .get("alpha")
                        .map(|a| as_array(key, a)?.iter().map(|x| Ok(as_int(key, x)? as u32)).collect::<Result<Vec<_>>>())
                        .transpose()?
                        .unwrap_or_default();
                    let ell = t.get("ell").map(|l| as_int(key, l)).transpose()?.unwrap_or(0);
                    if ell < 0 {
                        return Err(bad(key, "`ell` must be nonnegative"));
                    }
                    Ok((alpha, ell as u32))
                })
                .collect(),
        }
    }

    /// `theta = "golden" | "zero" | [row-major entries]`.
    pub fn theta(&self, key: &str, n: usize) -> Result<Arc<ThetaMatrix>> {
        let theta = match self.get(key) {
            None => ThetaMatrix::golden(n),
            Some(Value::String(s)) => named_theta(key, s, n)?,
            Some(v) => {
                let entries = as_array(key, v)?.iter().map(|x| as_f64(key, x)).collect::<Result<Vec<_>>>()?;
                if entries.len() != n * n {
                    return Err(bad(key, format!("expected {} row-major entries for n = {n}, found {}", n * n, entries.len())));
                }
                ThetaMatrix::new(n, entries).map_err(|e| bad(key, e.to_string()))?
            }
        };
        Ok(Arc::new(theta))
    }

    fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn element_file(&self, key: &str, theta: &Arc<ThetaMatrix>, path: &str) -> Result<NCElement> {
        let full = self.resolve(path);
        let text = std::fs::read_to_string(&full).map_err(|e| bad(key, format!("cannot read {}: {e}", full.display())))?;
        NCElement::from_text(theta.clone(), &text).map_err(|e| bad(key, format!("{}: {e}", full.display())))
    }

    /// `polynomial = [{ coefficients = [c, "b1.txt", 1.0] }, ...]`: numbers are
    /// real multiples of `U^0`, strings are element files. Defaults to `u^2`.
    pub fn polynomial(&self, key: &str, theta: &Arc<ThetaMatrix>) -> Result<NCPolynomial> {
        let Some(v) = self.get(key) else {
            return Ok(NCPolynomial::power(theta.clone(), 2, 1.0));
        };
        let mut terms = Vec::new();
        for term in as_array(key, v)? {
            let t = term.as_table().ok_or_else(|| bad(key, "expected tables with `coefficients`"))?;
            let coeffs = t.get("coefficients").ok_or_else(|| bad(key, "monomial without `coefficients`"))?;
            let mut bs = Vec::new();
            for c in as_array(key, coeffs)? {
                bs.push(match c {
                    Value::String(path) => self.element_file(key, theta, path)?,
                    other => NCElement::identity(theta.clone()).scale(Complex64::new(as_f64(key, other)?, 0.0)),
                });
            }
            terms.push(Monomial::new(bs).map_err(|e| bad(key, e.to_string()))?);
        }
        NCPolynomial::new(theta.clone(), terms)
    }

    /// `initial = { kind = "constant", value = 1.0 }`,
    /// `{ kind = "random", radius = 4, decay = 2.0, norm = 0.5 }` (norm in `H^k`, optional)
    /// or `{ kind = "file", path = "u0.txt" }`. A missing key yields `default`.
    pub fn initial(&self, key: &str, theta: &Arc<ThetaMatrix>, k: u32, seed: u64, default: NCElement) -> Result<NCElement> {
        let Some(v) = self.get(key) else {
            return Ok(default);
        };
        let t = v.as_table().ok_or_else(|| bad(key, "expected a table with `kind`"))?;
        let field = |name: &str| t.get(name);
        let num = |name: &str, default: f64| field(name).map_or(Ok(default), |x| as_f64(key, x));
        match field("kind").and_then(Value::as_str).unwrap_or("constant") {
            "constant" => Ok(NCElement::identity(theta.clone()).scale_real(num("value", 1.0)?)),
            "random" => {
                let radius = field("radius").map_or(Ok(4), |x| as_int(key, x))?;
                let data_seed = field("seed").map_or(Ok(seed as i64), |x| as_int(key, x))? as u64;
                let u = NCElement::random(theta.clone(), data_seed, radius, num("decay", 2.0)?);
                match field("norm") {
                    Some(x) => {
                        let target = as_f64(key, x)?;
                        let current = sobolev_h_norm(&u, k as f64)?;
                        Ok(u.scale_real(target / current))
                    }
                    None => Ok(u),
                }
            }
            "file" => {
                let path = field("path").and_then(Value::as_str).ok_or_else(|| bad(key, "file datum needs `path`"))?;
                self.element_file(key, theta, path)
            }
            other => Err(bad(key, format!("unknown kind `{other}`"))),
        }
    }

    /// Solver settings shared by the flow commands.
    pub fn solver(&self, defaults: SolverConfig) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            k: self.order("k", defaults.k)?,
            cutoff: self.int("cutoff", defaults.cutoff)?,
            radius: self.opt_f64("radius")?.or(defaults.radius),
            grid_step: self.positive("h", defaults.grid_step)?,
            first_step: self.opt_f64("first_step")?.or(defaults.first_step),
            rule: self.string("rule", rule_name(defaults.rule))?.parse()?,
            initial_guess: self.string("initial_guess", "heat")?.parse()?,
            tolerance: self.positive("tolerance", defaults.tolerance)?,
            max_iterations: self.count("max_iterations", defaults.max_iterations)?,
            step: self.positive("step", defaults.step)?,
            min_step: self.positive("min_step", defaults.min_step)?,
            safety: self.positive("safety", defaults.safety)?,
            t_end: self.positive("t_end", defaults.t_end)?,
            threshold: self.positive("threshold", defaults.threshold)?,
            scheme: self.string("scheme", scheme_name(defaults.scheme))?.parse()?,
        };
        Ok(cfg)
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    /// Fails on keys no getter asked for.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        for key in self.table.keys() {
            if !used.contains(key) && !RESERVED.contains(&key.as_str()) {
                return Err(bad(key, "unknown key for this command"));
            }
        }
        Ok(())
    }
}

fn named_theta(key: &str, name: &str, n: usize) -> Result<ThetaMatrix> {
    match name {
        "golden" => Ok(ThetaMatrix::golden(n)),
        "zero" => Ok(ThetaMatrix::zero(n)),
        other => Err(bad(key, format!("expected `golden`, `zero` or an array, got `{other}`"))),
    }
}

pub(crate) fn theta_by_name(name: &str, n: usize) -> Result<Arc<ThetaMatrix>> {
    named_theta("thetas", name, n).map(Arc::new)
}

fn rule_name(rule: crate::solver::DuhamelRule) -> &'static str {
    match rule {
        crate::solver::DuhamelRule::PiecewiseConstant => "constant",
        crate::solver::DuhamelRule::PiecewiseQuadratic => "quadratic",
    }
}

fn scheme_name(scheme: crate::solver::Scheme) -> &'static str {
    match scheme {
        crate::solver::Scheme::Picard => "picard",
        crate::solver::Scheme::ExpEuler => "exp-euler",
    }
}

/// Pads `alpha` with zeros to dimension `n`.
pub fn padded_alpha(alpha: &[u32], n: usize) -> Result<MultiIndex> {
    if alpha.len() > n {
        return Err(bad("cases", format!("alpha {alpha:?} has more than n = {n} entries")));
    }
    let mut v = alpha.to_vec();
    v.resize(n, 0);
    Ok(MultiIndex::new(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn typed_getters_name_the_key() {
        let p = Params::parse("h = \"big\"\nk = 2\ntheta = [0.0, 0.5, -0.5, 0.0]\n", ".").unwrap();
        let err = p.positive("h", 1e-3).unwrap_err().to_string();
        assert!(err.contains("`h`"), "{err}");
        assert_eq!(p.order("k", 1).unwrap(), 2);
        assert_eq!(p.theta("theta", 2).unwrap().get(0, 1), 0.5);
        assert!(p.theta("theta", 3).unwrap_err().to_string().contains("`theta`"));
        p.finish().unwrap();
    }

    #[test]
    fn unknown_keys_are_reported() {
        let p = Params::parse("tend = 1.0\nseed = 3\n", ".").unwrap();
        p.f64("t_end", 0.5).unwrap();
        assert!(p.finish().unwrap_err().to_string().contains("`tend`"));
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = Params::parse("a = 1\nb = [1, 2\n", ".").unwrap_err();
        assert!(matches!(err, Error::Parse { line, .. } if line >= 2));
    }

    #[test]
    fn polynomial_and_initial_datum() {
        let dir = tempfile::tempdir().unwrap();
        let theta = Arc::new(ThetaMatrix::golden(2));
        let b = NCElement::random(theta.clone(), 1, 1, 1.0);
        std::fs::write(dir.path().join("b.txt"), b.to_text()).unwrap();
        let text = "polynomial = [{ coefficients = [2.0, \"b.txt\", 1] }, { coefficients = [0.5] }]\n\
                    initial = { kind = \"random\", radius = 2, norm = 0.25 }\n";
        let p = Params::parse(text, dir.path()).unwrap();
        let poly = p.polynomial("polynomial", &theta).unwrap();
        assert_eq!(poly.terms().len(), 2);
        assert_eq!(poly.degree(), 2);
        assert_eq!(poly.terms()[0].coefficients()[1], b);
        let u0 = p.initial("initial", &theta, 2, 9, NCElement::zero(theta.clone())).unwrap();
        assert!((sobolev_h_norm(&u0, 2.0).unwrap() - 0.25).abs() < 1e-14);
        assert_eq!(u0.support_radius(), 2);

        let missing = Params::parse("polynomial = [{ coefficients = [\"nope.txt\"] }]", dir.path()).unwrap();
        assert!(missing.polynomial("polynomial", &theta).unwrap_err().to_string().contains("`polynomial`"));
    }

    #[test]
    fn solver_settings() {
        let p = Params::parse("scheme = \"exp-euler\"\nstep = 0.01\nrule = \"constant\"\n", ".").unwrap();
        let cfg = p.solver(SolverConfig::default()).unwrap();
        assert_eq!(cfg.scheme, crate::solver::Scheme::ExpEuler);
        assert_eq!(cfg.step, 0.01);
        let p = Params::parse("scheme = \"rk4\"\n", ".").unwrap();
        assert!(p.solver(SolverConfig::default()).unwrap_err().to_string().contains("scheme"));
    }
}
