//! Experiment harness behind the `nctorus` binary.
//!
//! An [`ExperimentSpec`] names a command, its parameters and a seed. Running it
//! yields an [`Outcome`]: CSV tables, optional element files, named checks and
//! a JSON summary. Sweeps run in parallel and collect rows in input order, so
//! identical specs produce byte-identical files for any thread count.

mod analysis;
mod config;
mod flows;
mod laws;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use config::{padded_alpha, Params};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Rates,
    Sharpness,
    KernelScaling,
    Bracket,
    Algebra,
    Embedding,
    Solve,
    Blowup,
    Smoothing,
    Bootstrap,
    Dependence,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::Rates,
        Command::Sharpness,
        Command::KernelScaling,
        Command::Bracket,
        Command::Algebra,
        Command::Embedding,
        Command::Solve,
        Command::Blowup,
        Command::Smoothing,
        Command::Bootstrap,
        Command::Dependence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Rates => "rates",
            Command::Sharpness => "sharpness",
            Command::KernelScaling => "kernel-scaling",
            Command::Bracket => "bracket",
            Command::Algebra => "algebra",
            Command::Embedding => "embedding",
            Command::Solve => "solve",
            Command::Blowup => "blowup",
            Command::Smoothing => "smoothing",
            Command::Bootstrap => "bootstrap",
            Command::Dependence => "dependence",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::param("command", format!("unknown command `{s}`")))
    }
}

/// One pass/fail assertion of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: value <= limit,
            value,
            limit,
            detail: detail.into(),
        }
    }

    /// Passes when `value >= limit`.
    pub fn at_least(name: impl Into<String>, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: value >= limit,
            value,
            limit,
            detail: detail.into(),
        }
    }
}

/// A CSV table; cells are already formatted.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV text preceded by `# spec_sha256=` and `# seed=` comment lines.
    pub fn to_csv(&self, spec_hash: &str, seed: u64) -> String {
        let mut out = format!("# spec_sha256={spec_hash}\n# seed={seed}\n{}\n", self.columns.join(","));
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip scientific form.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn alpha_label(alpha: &[u32]) -> String {
    let parts: Vec<String> = alpha.iter().map(u32::to_string).collect();
    format!("({})", parts.join(";"))
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub command: Command,
    pub seed: u64,
    pub spec_hash: String,
    pub tables: Vec<Table>,
    /// Extra files relative to the output directory.
    pub files: Vec<(PathBuf, String)>,
    pub checks: Vec<Check>,
    pub results: Value,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn summary(&self) -> Value {
        json!({
            "command": self.command,
            "seed": self.seed,
            "spec_sha256": self.spec_hash,
            "passed": self.passed(),
            "checks": self.checks,
            "results": self.results,
        })
    }

    /// Writes `<table>.csv` files, the extra files and `summary.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for table in &self.tables {
            fs::write(dir.join(format!("{}.csv", table.name)), table.to_csv(&self.spec_hash, self.seed))?;
        }
        for (path, contents) in &self.files {
            let full = dir.join(path);
            if let Some(parent) = full.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(full, contents)?;
        }
        let summary = serde_json::to_string_pretty(&self.summary()).expect("summary serializes");
        fs::write(dir.join("summary.json"), summary + "\n")?;
        Ok(())
    }
}

pub(crate) struct Builder {
    tables: Vec<Table>,
    files: Vec<(PathBuf, String)>,
    checks: Vec<Check>,
    results: serde_json::Map<String, Value>,
}

impl Builder {
    pub(crate) fn new() -> Self {
        Builder {
            tables: Vec::new(),
            files: Vec::new(),
            checks: Vec::new(),
            results: serde_json::Map::new(),
        }
    }

    pub(crate) fn table(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub(crate) fn file(&mut self, path: impl Into<PathBuf>, contents: String) {
        self.files.push((path.into(), contents));
    }

    pub(crate) fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub(crate) fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.to_string(), serde_json::to_value(value).expect("result serializes"));
    }
}

#[derive(Debug)]
pub struct ExperimentSpec {
    pub command: Command,
    pub params: Params,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(command: Command, params: Params, seed: u64) -> Self {
        ExperimentSpec { command, params, seed }
    }

    /// Spec with default parameters.
    pub fn defaults(command: Command, seed: u64) -> Self {
        ExperimentSpec::new(command, Params::empty(), seed)
    }

    /// Reads a config file; `command` and `seed` may come from the file and are
    /// overridden by the arguments when given.
    pub fn from_file(path: &Path, command: Option<Command>, seed: Option<u64>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let params = Params::parse(&text, base)?;
        let command = match command {
            Some(c) => c,
            None => params.string("command", "")?.parse()?,
        };
        let seed = match seed {
            Some(s) => s,
            None => {
                let s = params.int("seed", 0)?;
                u64::try_from(s).map_err(|_| Error::param("seed", "must be nonnegative"))?
            }
        };
        Ok(ExperimentSpec::new(command, params, seed))
    }

    /// SHA-256 of the command, seed and canonical parameter table.
    pub fn hash(&self) -> String {
        let mut table = self.params.table().clone();
        table.remove("command");
        table.remove("seed");
        let canonical = format!("command={}\nseed={}\n{}", self.command, self.seed, toml::to_string(&table).unwrap_or_default());
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn run(&self) -> Result<Outcome> {
        let mut out = Builder::new();
        let p = &self.params;
        let seed = self.seed;
        match self.command {
            Command::Rates => analysis::rates(p, &mut out)?,
            Command::Sharpness => analysis::sharpness(p, &mut out)?,
            Command::KernelScaling => analysis::kernel_scaling(p, &mut out)?,
            Command::Bracket => analysis::bracket(p, &mut out)?,
            Command::Algebra => laws::algebra(p, seed, &mut out)?,
            Command::Embedding => laws::embedding(p, seed, &mut out)?,
            Command::Solve => flows::solve(p, seed, &mut out)?,
            Command::Blowup => flows::blowup(p, seed, &mut out)?,
            Command::Smoothing => flows::smoothing(p, seed, &mut out)?,
            Command::Bootstrap => flows::bootstrap(p, seed, &mut out)?,
            Command::Dependence => flows::dependence(p, seed, &mut out)?,
        }
        Ok(Outcome {
            command: self.command,
            seed,
            spec_hash: self.hash(),
            tables: out.tables,
            files: out.files,
            checks: out.checks,
            results: Value::Object(out.results),
        })
    }
}

/// Independent stream seed for sample `index` of sweep `stream`.
pub(crate) fn sub_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ index.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `points_per_decade` log-spaced values from `lo` to `hi`.
pub(crate) fn log_grid(lo: f64, hi: f64, points_per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let steps = (decades * points_per_decade as f64).round().max(1.0) as usize;
    (0..=steps)
        .map(|j| lo * 10f64.powf(decades * j as f64 / steps as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("plot".parse::<Command>().is_err());
    }

    #[test]
    fn hash_depends_on_every_input() {
        let a = ExperimentSpec::defaults(Command::Rates, 1);
        let b = ExperimentSpec::defaults(Command::Rates, 2);
        let c = ExperimentSpec::defaults(Command::Sharpness, 1);
        let d = ExperimentSpec::new(Command::Rates, Params::parse("tolerance = 0.1", ".").unwrap(), 1);
        let hashes = [a.hash(), b.hash(), c.hash(), d.hash()];
        for i in 0..4 {
            assert_eq!(hashes[i].len(), 64);
            for j in 0..i {
                assert_ne!(hashes[i], hashes[j]);
            }
        }
        assert_eq!(a.hash(), ExperimentSpec::defaults(Command::Rates, 1).hash());
    }

    #[test]
    fn csv_header_and_grid() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec![num(0.5), num(1e-7)]);
        assert_eq!(t.to_csv("ff", 3), "# spec_sha256=ff\n# seed=3\na,b\n5e-1,1e-7\n");
        let g = log_grid(1e-4, 1e-1, 2);
        assert_eq!(g.len(), 7);
        assert!((g[6] - 0.1).abs() < 1e-15 && g[0] == 1e-4);
        assert_ne!(sub_seed(1, 0, 0), sub_seed(1, 0, 1));
        assert_ne!(sub_seed(1, 0, 0), sub_seed(1, 1, 0));
    }
}
