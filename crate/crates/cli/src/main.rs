use clap::{Args, Parser, Subcommand, ValueEnum};
use junta_core::boolfn::function_to_json;
use junta_core::harness::{
    build_instance, run_experiment_with, verify_suite, ExperimentConfig, TestReport, TesterKind,
    VerifyLevel,
};
use junta_core::sfm::SfmBackend;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "junta-lab",
    version,
    about = "Tolerant junta and isomorphism testing experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the instance described by a configuration and print it as JSON.
    Gen {
        #[command(flatten)]
        common: Common,
    },
    /// Run the configured tester; exits 0 when most trials accept.
    Test {
        #[command(flatten)]
        common: Common,
    },
    /// Run the isomorphism tester regardless of the configured tester.
    Iso {
        #[command(flatten)]
        common: Common,
    },
    /// Check the library against its reference computations.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: Level,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment with timing and print query and time statistics.
    Bench {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Fraction of the analysis constant used for sample counts.
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    sfm_backend: Option<SfmBackend>,
    /// Write per-set estimates (or isomorphism core samples) as CSV.
    #[arg(long)]
    dump_estimates: Option<PathBuf>,
    /// Report destination; a `.csv` extension selects CSV, anything else JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores. Results do not depend on this.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Fast,
    Full,
}

type CliResult<T> = Result<T, String>;

fn load(common: &Common) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| format!("cannot read {}: {e}", common.config.display()))?;
    let mut config = ExperimentConfig::from_json(&text).map_err(|e| e.to_string())?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(trials) = common.trials {
        config.trials = trials;
    }
    if let Some(scale) = common.scale {
        config.scale = scale;
    }
    if let Some(backend) = common.sfm_backend {
        config.sfm_backend = backend;
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn is_csv(path: Option<&Path>) -> bool {
    path.and_then(|p| p.extension())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn run(common: &Common, config: &ExperimentConfig) -> CliResult<TestReport> {
    let report = run_experiment_with(config, common.dump_estimates.is_some(), common.workers)
        .map_err(|e| e.to_string())?;
    if let Some(path) = &common.dump_estimates {
        let mut text = String::from(report.dump_header());
        text.push('\n');
        for row in &report.dump_rows {
            text.push_str(row);
            text.push('\n');
        }
        std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(report)
}

fn verdict(report: &TestReport) -> CliResult<u8> {
    if report.errors == report.trials.len() {
        let first = report.trials[0].error.clone().unwrap_or_default();
        return Err(format!("every trial failed: {first}"));
    }
    Ok(if 2 * report.accepted > report.trials.len() {
        0
    } else {
        1
    })
}

fn report_out(common: &Common, report: &TestReport) -> CliResult<()> {
    let out = common.out.as_deref();
    let text = if is_csv(out) {
        report.to_csv()
    } else {
        report.to_json()
    };
    emit(out, text.trim_end())
}

fn execute(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Gen { common } => {
            let config = load(&common)?;
            let instance = build_instance(&config).map_err(|e| e.to_string())?;
            let text = match &instance.g {
                None => function_to_json(&instance.f),
                Some(g) => {
                    let f: serde_json::Value =
                        serde_json::from_str(&function_to_json(&instance.f)).expect("valid JSON");
                    let g: serde_json::Value =
                        serde_json::from_str(&function_to_json(g)).expect("valid JSON");
                    serde_json::to_string_pretty(&serde_json::json!({ "f": f, "g": g }))
                        .expect("serializable")
                }
            };
            emit(common.out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Test { common } => {
            let config = load(&common)?;
            let report = run(&common, &config)?;
            report_out(&common, &report)?;
            verdict(&report)
        }
        Command::Iso { common } => {
            let mut config = load(&common)?;
            config.tester = TesterKind::Isomorphism;
            config.validate().map_err(|e| e.to_string())?;
            let report = run(&common, &config)?;
            report_out(&common, &report)?;
            verdict(&report)
        }
        Command::Verify { level, out } => {
            let level = match level {
                Level::Fast => VerifyLevel::Fast,
                Level::Full => VerifyLevel::Full,
            };
            let summary = verify_suite(level);
            for c in &summary.checks {
                let status = if c.passed { "pass" } else { "FAIL" };
                eprintln!("{status} {} ({} cases)", c.name, c.cases);
                if let Some(f) = &c.failure {
                    eprintln!("     {f}");
                }
            }
            emit(
                out.as_deref(),
                &serde_json::to_string_pretty(&summary).expect("serializable"),
            )?;
            Ok(if summary.passed { 0 } else { 1 })
        }
        Command::Bench { common } => {
            let mut config = load(&common)?;
            config.timing = true;
            let report = run(&common, &config)?;
            eprintln!(
                "{} trials, {} accepted, queries min {} median {} max {}, {} ms",
                report.trials.len(),
                report.accepted,
                report.queries.min,
                report.queries.median,
                report.queries.max,
                report.wall_time_ms.unwrap_or(0)
            );
            report_out(&common, &report)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
