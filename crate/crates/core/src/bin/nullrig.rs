use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nullrig::models::RIGGING_NAMES;
use nullrig::scenario::{describe, emit_report, exit_code, run_scenario, Format, RunOptions, Scenario, Suite, BUNDLED};

#[derive(Parser)]
#[command(name = "nullrig", version, about = "Rigged null hypersurface checks driven by scenario files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its report.
    Run {
        /// Scenario file, or the name of a bundled scenario.
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Default residual tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// List catalog names usable in scenario files.
    ListCatalog,
    /// Resolve a scenario and print what it describes.
    Describe {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn list_catalog() {
    println!("spacetime kinds (\"spacetime\": {{\"kind\": ...}}):");
    println!("  minkowski          dim");
    println!("  grw                warp, fiber");
    println!("  robertson_walker   c, warp");
    println!("warps (\"warp\": {{\"name\": ...}}):");
    println!("  one, exp, t2plus1, cosh, expr (expr in t, optional lo, hi)");
    println!("fibers (\"fiber\": {{\"kind\": ...}}):");
    println!("  flat (dim), sphere (c > 0, dim), hyperbolic (c < 0, dim)");
    println!("hypersurfaces (\"hypersurface\": {{\"kind\": ...}}):");
    println!("  null_plane         optional direction, s0");
    println!("  lightcone          optional vertex");
    println!("  grw_null_graph     profile (planar | radial | axial), optional s0, direction, extent");
    println!("riggings:");
    println!("  {}", RIGGING_NAMES.join(", "));
    println!("  or {{\"inline\": {{\"field\": [...]}}}} / {{\"inline\": {{\"gradient_of\": \"...\"}}}}, with optional \"flip\"");
    let suites: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
    println!("suites:");
    println!("  {}", suites.join(", "));
    println!("bundled scenarios (usable as --scenario <name>):");
    for (name, _) in BUNDLED {
        println!("  {name}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ListCatalog => {
            list_catalog();
            Ok(0)
        }
        Command::Describe { scenario } => Scenario::load(&scenario)
            .and_then(|s| describe(&s))
            .map(|text| {
                print!("{text}");
                0
            }),
        Command::Run {
            scenario,
            out,
            seed,
            samples,
            tol,
            format,
        } => Scenario::load(&scenario).and_then(|s| {
            let report = run_scenario(&s, RunOptions { seed, samples, tolerance: tol })?;
            for p in emit_report(&report, format, &out)? {
                println!("wrote {}", p.display());
            }
            for suite in &report.suites {
                println!("{:<20} {:?}", suite.suite, suite.status);
            }
            Ok(exit_code(&report))
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
