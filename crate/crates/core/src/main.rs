use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use tiltrotor::harness::{self, load_scenario, metrics, metrics_from_csv, run, ScenarioError, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "tiltrotor", version, about = "Tilting-rotor UAV software-in-the-loop runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenarios, writing `<name>.csv` and `<name>.summary.json`.
    Run {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        /// Output directory.
        #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
        out: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the control/simulation rate.
        #[arg(long = "ticks-per-sec")]
        ticks_per_sec: Option<f64>,
    },
    /// Parse and validate a scenario file.
    Validate { scenario: PathBuf },
    /// Compute summary metrics from a CSV log.
    Metrics {
        log: PathBuf,
        /// Trailing window for steady-state figures, s.
        #[arg(long, default_value_t = 2.0)]
        window: f64,
    },
}

/// Error reported on stderr as a single JSON line.
struct CliError {
    kind: &'static str,
    message: String,
    field: Option<String>,
    tick: Option<u64>,
    code: u8,
}

impl CliError {
    fn new(kind: &'static str, message: impl ToString, code: u8) -> Self {
        Self { kind, message: message.to_string(), field: None, tick: None, code }
    }

    fn emit(&self) -> ExitCode {
        let line = json!({
            "error": self.kind,
            "message": self.message,
            "field": self.field,
            "tick": self.tick,
        });
        eprintln!("{line}");
        ExitCode::from(self.code)
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        let kind = match e {
            ScenarioError::Io { .. } => "io",
            ScenarioError::Parse(_) => "parse",
            ScenarioError::Validation { .. } => "validation",
        };
        let mut c = CliError::new(kind, &e, 2);
        c.field = e.field().map(str::to_string);
        c
    }
}

fn run_one(path: &Path, out: &Path, seed: Option<u64>, rate: Option<f64>) -> Result<String, CliError> {
    let mut scenario = load_scenario(path)?;
    if let Some(seed) = seed {
        scenario = scenario.with_seed(seed);
    }
    if let Some(rate) = rate {
        scenario = scenario.with_rate(rate)?;
    }
    let log = run(&scenario).map_err(|e| {
        let mut c = CliError::new("run", &e, 3);
        c.tick = Some(e.tick());
        c
    })?;
    let summary = metrics(&log.records, scenario.metrics_window).map_err(|e| CliError::new("metrics", e, 3))?;

    let csv_path = out.join(format!("{}.csv", scenario.name));
    let file = std::fs::File::create(&csv_path).map_err(|e| CliError::new("io", format!("{}: {e}", csv_path.display()), 4))?;
    log.write_csv(std::io::BufWriter::new(file))
        .map_err(|e| CliError::new("io", e, 4))?;
    let summary_path = out.join(format!("{}.summary.json", scenario.name));
    let body = serde_json::to_string_pretty(&summary).expect("summary serialises");
    std::fs::write(&summary_path, body + "\n").map_err(|e| CliError::new("io", format!("{}: {e}", summary_path.display()), 4))?;
    Ok(csv_path.display().to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<(), CliError> = match cli.command {
        Command::Run { scenarios, out, seed, ticks_per_sec } => (|| {
            std::fs::create_dir_all(&out).map_err(|e| CliError::new("io", format!("{}: {e}", out.display()), 4))?;
            // Independent scenarios run in parallel; each run is single-threaded.
            let results: Vec<Result<String, CliError>> = std::thread::scope(|s| {
                let handles: Vec<_> = scenarios
                    .iter()
                    .map(|p| {
                        let out = &out;
                        s.spawn(move || run_one(p, out, seed, ticks_per_sec))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
            });
            for r in results {
                println!("{}", r?);
            }
            Ok(())
        })(),
        Command::Validate { scenario } => load_scenario(&scenario).map_err(CliError::from).map(|s| {
            println!("ok: {} ({} ticks)", s.name, s.ticks());
        }),
        Command::Metrics { log, window } => (|| {
            let bytes = std::fs::read(&log).map_err(|e| CliError::new("io", format!("{}: {e}", log.display()), 4))?;
            let summary = metrics_from_csv(&bytes, window).map_err(|e| match e {
                harness::MetricsFromCsvError::Log(e) => CliError::new("parse", e, 2),
                harness::MetricsFromCsvError::Metrics(e) => CliError::new("metrics", e, 2),
            })?;
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serialises"));
            Ok(())
        })(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.emit(),
    }
}
