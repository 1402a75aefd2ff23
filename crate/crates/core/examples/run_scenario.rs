//! Run a bundled scenario from code and print its Markdown report.

use nullrig::scenario::{exit_code, run_scenario, RunOptions, Scenario};

fn main() -> nullrig::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "minkowski-null-plane".into());
    let s = Scenario::bundled(&name)?;
    let report = run_scenario(&s, RunOptions { seed: None, samples: Some(50), tolerance: None })?;
    println!("{}", report.to_markdown());
    println!("exit code {}", exit_code(&report));
    Ok(())
}
