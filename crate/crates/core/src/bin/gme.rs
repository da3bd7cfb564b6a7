use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gme_core::config::{ScenarioConfig, ScenarioName};
use gme_core::runner::{self, OUTPUT_ENV};
use gme_core::Error;

#[derive(Parser)]
#[command(name = "gme", version, about = "Dissipative dynamics of ultrastrongly coupled hybrid quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a scenario and write one CSV per sweep point plus manifest.json.
    Run {
        /// rabi-temp-sweep, rabi-compare, dce, hu-failure or custom
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, env = OUTPUT_ENV)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Rerun with truncations raised by two levels and record the deviation.
        #[arg(long)]
        convergence: bool,
    },
    /// Dump eigenvalues, transition tables and the anticrossing doublet as JSON.
    Spectrum {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a configuration and list every problem found.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the configuration of a preset scenario.
    Preset { name: String },
}

fn load(scenario: Option<&str>, config: Option<&PathBuf>) -> Result<ScenarioConfig, Error> {
    match (scenario, config) {
        (_, Some(path)) => {
            let c = ScenarioConfig::load(path)?;
            if let Some(name) = scenario {
                let name = ScenarioName::parse(name)?;
                if name != c.scenario {
                    return Err(Error::Config(format!(
                        "--scenario {} does not match the config's scenario {}",
                        name.name(),
                        c.scenario.name()
                    )));
                }
            }
            Ok(c)
        }
        (Some(name), None) => ScenarioConfig::preset(ScenarioName::parse(name)?),
        (None, None) => Err(Error::Config("either --scenario or --config is required".into())),
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { scenario, config, out, jobs, convergence } => {
            let mut c = load(scenario.as_deref(), config.as_ref())?;
            c.convergence_check |= convergence;
            if let Some(o) = out {
                c.output = Some(o);
            }
            let dir = runner::default_output_dir(&c);
            let m = runner::run(&c, &dir, jobs)?;
            for r in &m.runs {
                eprintln!("{}: {} samples in {:.1}s -> {}", r.label, c.grid.n_samples, r.wall_seconds, dir.join(&r.file).display());
                if let Some(conv) = &r.convergence {
                    for (name, dev) in conv {
                        eprintln!("  convergence {name}: {dev:.3e}");
                    }
                }
            }
            Ok(())
        }
        Command::Spectrum { config, scenario, out } => {
            let c = load(scenario.as_deref(), config.as_ref())?;
            let report = runner::spectrum(&c)?;
            let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => println!("{text}"),
            }
            Ok(())
        }
        Command::Validate { config } => {
            let c = ScenarioConfig::load(&config)?;
            let problems = c.problems();
            if problems.is_empty() {
                println!("ok: {} runs", runner::run_points(&c).len());
                Ok(())
            } else {
                for p in &problems {
                    eprintln!("{p}");
                }
                Err(Error::Config(format!("{} problem(s)", problems.len())))
            }
        }
        Command::Preset { name } => {
            println!("{}", ScenarioConfig::preset(ScenarioName::parse(&name)?)?.to_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
