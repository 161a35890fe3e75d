//! Runs experiments programmatically: one from defaults, one from an inline config.

use nctorus::experiments::{Command, ExperimentSpec, Params};

fn main() -> nctorus::Result<()> {
    let spec = ExperimentSpec::defaults(Command::Rates, 0);
    let outcome = spec.run()?;
    println!("{} (spec {}): {} checks, passed = {}", spec.command, &spec.hash()[..12], outcome.checks.len(), outcome.passed());
    let fits = outcome.table("rate_fits").expect("fit table");
    println!("{}", fits.columns.join(","));
    for row in &fits.rows {
        println!("{}", row.join(","));
    }

    let params = Params::parse(
        r#"
        n = 1
        k = 1
        cutoff = 2
        t_end = 0.5
        initial = { kind = "constant", value = 1.0 }
        oracle = "riccati"
        save_every = 0
        "#,
        ".",
    )?;
    let outcome = ExperimentSpec::new(Command::Solve, params, 0).run()?;
    for check in &outcome.checks {
        println!("{} {}: {:e}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.value);
    }

    let dir = std::env::temp_dir().join("nctorus-solve");
    outcome.write(&dir)?;
    println!("wrote {}", dir.display());
    Ok(())
}
