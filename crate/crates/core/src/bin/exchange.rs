use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use energy_exchange::constants::{ConstantsTable, CONSTANTS_ENV};
use energy_exchange::scenario::{bundled, execute, load, Overrides, ScenarioConfig, ScenarioError};

const EXIT_USAGE: u8 = 64;

/// Run and inspect radiation-detector energy-exchange scenarios.
#[derive(Debug, Parser)]
#[command(name = "exchange", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file or a bundled scenario by name and write its artifacts.
    Run {
        /// Path to a scenario TOML file, or the name of a bundled scenario.
        config: String,
        /// Output directory. Defaults to output.directory, then `out/<name>`.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Worker threads for scans. Defaults to the number of CPUs.
        #[arg(short, long)]
        workers: Option<usize>,
        /// Override evolution.dt.
        #[arg(long)]
        dt: Option<f64>,
        /// Override evolution.t_max.
        #[arg(long)]
        t_max: Option<f64>,
    },
    /// List the bundled scenarios.
    ListScenarios,
    /// Check scenarios against the schema and the physics domain without running them.
    /// With no arguments every bundled scenario is checked.
    Validate { configs: Vec<String> },
    /// Print the tool version and the hash of the constants table in use.
    Version,
}

fn constants() -> Result<ConstantsTable, ScenarioError> {
    Ok(ConstantsTable::from_env()?)
}

fn fail(e: &ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn run(config: &str, out: Option<PathBuf>, workers: Option<usize>, overrides: Overrides) -> Result<PathBuf, ScenarioError> {
    let (mut cfg, text) = load(config)?;
    cfg.apply(overrides);
    let k = constants()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(ScenarioError::Invalid("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| ScenarioError::Invalid(format!("cannot start worker pool: {e}")))?;
    let artifacts = pool.install(|| execute(&cfg, &text, &k))?;
    let dir = out
        .or_else(|| cfg.output.directory.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
    artifacts.write_to(&dir)?;
    Ok(dir)
}

fn validate(configs: &[String]) -> ExitCode {
    let k = match constants() {
        Ok(k) => k,
        Err(e) => return fail(&e),
    };
    let names: Vec<String> = if configs.is_empty() {
        bundled().iter().map(|b| b.name.to_string()).collect()
    } else {
        configs.to_vec()
    };
    let mut code = ExitCode::SUCCESS;
    for name in &names {
        let checked = load(name).and_then(|(cfg, _)| cfg.validate(&k).map(|_| cfg));
        match checked {
            Ok(cfg) => println!("ok      {name} ({})", cfg.model.tag()),
            Err(e) => {
                println!("invalid {name}: {e}");
                code = ExitCode::from(e.exit_code() as u8);
            }
        }
    }
    code
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Run {
            config,
            out,
            workers,
            dt,
            t_max,
        } => match run(&config, out, workers, Overrides { dt, t_max }) {
            Ok(dir) => {
                println!("wrote {}", dir.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::ListScenarios => {
            for b in bundled() {
                let description = ScenarioConfig::parse(b.text).map(|c| c.description).unwrap_or_default();
                println!("{:<38} {description}", b.name);
            }
            ExitCode::SUCCESS
        }
        Command::Validate { configs } => validate(&configs),
        Command::Version => match constants() {
            Ok(k) => {
                println!("exchange {}", env!("CARGO_PKG_VERSION"));
                println!("constants {} sha256:{}", k.version, k.hash());
                if std::env::var_os(CONSTANTS_ENV).is_some() {
                    println!("constants overridden by {CONSTANTS_ENV}");
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
    }
}
