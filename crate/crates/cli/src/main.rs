use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctswarm_core::combgen::for_each_combination;
use ctswarm_core::generator::{run_benchmark_on, BenchRun};
use ctswarm_core::suite_io::{read_suite, write_suite};
use ctswarm_core::{
    corpus, generate_with, verify, GenerateError, GenerateOptions, GenerationReport, SuiteFormat,
    SwarmConfig, SystemModel, TupleStore,
};

const USAGE: u8 = 1;
const STUCK: u8 = 2;
const TIMEOUT: u8 = 3;
const VERIFY_FAILED: u8 = 4;

fn version() -> String {
    format!(
        "{} (corpus {})",
        env!("CARGO_PKG_VERSION"),
        corpus::corpus_hash()
    )
}

/// Constrained covering-array generation with a multi-objective particle swarm.
#[derive(Parser)]
#[command(name = "ctswarm", version = version())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a test suite for a model file.
    Generate {
        model: PathBuf,
        #[command(flatten)]
        swarm: SwarmArgs,
        /// Give up after this many seconds and emit the partial suite.
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Check a suite against a model.
    Verify {
        model: PathBuf,
        suite: PathBuf,
        #[arg(long, value_enum)]
        report: Option<Report>,
    },
    /// Run a corpus benchmark repeatedly.
    Bench {
        /// Corpus name, e.g. spin-s or derived-07.
        name: String,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        /// Write one row per repetition to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        swarm: SwarmArgs,
    },
    /// List every t-tuple of a model with its state after pruning.
    Tuples { model: PathBuf },
    /// List all t-subsets of k parameters.
    Combinations {
        #[arg(short)]
        k: usize,
        #[arg(short)]
        t: usize,
    },
}

#[derive(Args)]
struct SwarmArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 80)]
    particles: usize,
    #[arg(long, default_value_t = 8)]
    workers: usize,
    #[arg(long, default_value_t = 0.7)]
    inertia: f64,
    #[arg(long, default_value_t = 1.5)]
    c1: f64,
    #[arg(long, default_value_t = 1.5)]
    c2: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 30)]
    stagnation: usize,
}

impl SwarmArgs {
    fn config(&self) -> SwarmConfig {
        SwarmConfig {
            particles: self.particles,
            workers: self.workers,
            inertia: self.inertia,
            cognitive: self.c1,
            social: self.c2,
            max_iterations: self.max_iters,
            stagnation_window: self.stagnation,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Plain,
    Csv,
    JsonLines,
}

impl From<Format> for SuiteFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Plain => SuiteFormat::Plain,
            Format::Csv => SuiteFormat::Csv,
            Format::JsonLines => SuiteFormat::JsonLines,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Json,
}

/// Error already reported to the user, carrying the exit code.
struct Exit(u8);

fn fail(message: impl std::fmt::Display) -> Exit {
    eprintln!("error: {message}");
    Exit(USAGE)
}

fn read_text(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<SystemModel, Exit> {
    SystemModel::parse(&read_text(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Exit> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| fail(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| fail(format!("stdout: {e}"))),
    }
}

fn summary(report: &GenerationReport) {
    eprintln!(
        "{} rows, {} of {} tuples covered ({} pruned), {} rounds, {:.2?}",
        report.rows,
        report.covered_tuples,
        report.initial_tuples - report.pruned_tuples,
        report.pruned_tuples,
        report.rounds,
        report.wall_time
    );
}

fn run(cli: Cli) -> Result<(), Exit> {
    match cli.command {
        Command::Generate {
            model,
            swarm,
            timeout,
            out,
            format,
        } => {
            let model = load_model(&model)?;
            let timeout = match timeout {
                Some(s) if s.is_finite() && s >= 0.0 => Some(Duration::from_secs_f64(s)),
                Some(s) => return Err(fail(format!("invalid timeout {s}"))),
                None => None,
            };
            let options = GenerateOptions {
                timeout,
                ..GenerateOptions::default()
            };
            match generate_with(&model, &swarm.config(), &options) {
                Ok(report) => {
                    summary(&report);
                    emit(&write_suite(&report.suite, format.into()), out.as_deref())
                }
                Err(e) => {
                    let code = match &e {
                        GenerateError::StuckTuples { .. } => STUCK,
                        GenerateError::Timeout { .. } => TIMEOUT,
                        _ => return Err(fail(e)),
                    };
                    let partial = e
                        .partial()
                        .expect("stuck and timeout carry a partial suite");
                    summary(partial);
                    emit(&write_suite(&partial.suite, format.into()), out.as_deref())?;
                    eprintln!("error: {e}");
                    Err(Exit(code))
                }
            }
        }
        Command::Verify {
            model,
            suite,
            report,
        } => {
            let model = load_model(&model)?;
            let text = read_text(&suite)?;
            let suite =
                read_suite(&text, &model).map_err(|e| fail(format!("{}: {e}", suite.display())))?;
            let result = verify::check(&suite, &model);
            match report {
                Some(Report::Json) => {
                    let json = serde_json::to_string_pretty(&result).expect("plain data");
                    emit(&format!("{json}\n"), None)?;
                }
                None => {
                    let mut text = format!(
                        "{}: {} rows, {} of {} tuples covered, {} violating rows\n",
                        if result.passed { "pass" } else { "fail" },
                        suite.len(),
                        result.covered,
                        result.valid_tuples,
                        result.violating_rows.len()
                    );
                    for t in &result.missing {
                        text.push_str(&format!("missing {t}\n"));
                    }
                    for (row, forbidden) in &result.violating_rows {
                        text.push_str(&format!("row {row} matches forbidden {forbidden}\n"));
                    }
                    emit(&text, None)?;
                }
            }
            if result.passed {
                Ok(())
            } else {
                Err(Exit(VERIFY_FAILED))
            }
        }
        Command::Bench {
            name,
            reps,
            csv,
            swarm,
        } => {
            let model = corpus::load(&name).map_err(fail)?;
            let mut writer = match &csv {
                Some(path) => Some(
                    csv::Writer::from_path(path)
                        .map_err(|e| fail(format!("{}: {e}", path.display())))?,
                ),
                None => None,
            };
            let mut write_error = None;
            let stats = run_benchmark_on(&name, &model, &swarm.config(), reps, |run: &BenchRun| {
                eprintln!(
                    "rep {} seed {}: {} rows in {} ms",
                    run.rep, run.seed, run.size, run.millis
                );
                if let Some(w) = writer.as_mut() {
                    if let Err(e) = w.serialize(run) {
                        write_error.get_or_insert(e);
                    }
                }
            });
            if let Some(e) = write_error {
                return Err(fail(e));
            }
            if let Some(mut w) = writer {
                w.flush().map_err(fail)?;
            }
            let stats = stats.map_err(|e| {
                let code = match &e {
                    ctswarm_core::generator::BenchError::Generate { source, .. } => match source {
                        GenerateError::StuckTuples { .. } => STUCK,
                        GenerateError::Timeout { .. } => TIMEOUT,
                        _ => USAGE,
                    },
                    _ => USAGE,
                };
                eprintln!("error: {e}");
                Exit(code)
            })?;
            emit(
                &format!(
                    "{} {} best {} mean {:.2} mean_ms {:.1}\n",
                    stats.name,
                    model.notation(),
                    stats.best_size,
                    stats.mean_size,
                    stats.mean_millis
                ),
                None,
            )?;
            if stats.runs.iter().all(|r| r.verified) {
                Ok(())
            } else {
                Err(Exit(VERIFY_FAILED))
            }
        }
        Command::Tuples { model } => {
            let model = load_model(&model)?;
            let mut store = TupleStore::build(&model).map_err(fail)?;
            store.prune_constrained(model.constraints());
            emit(&store.dump(), None)
        }
        Command::Combinations { k, t } => {
            let mut out = io::BufWriter::new(io::stdout().lock());
            let mut io_error = None;
            for_each_combination(k, t, |c| {
                if io_error.is_none() {
                    let line: Vec<String> = c.iter().map(|p| p.to_string()).collect();
                    if let Err(e) = writeln!(out, "{}", line.join(" ")) {
                        io_error = Some(e);
                    }
                }
            })
            .map_err(fail)?;
            match io_error.map_or_else(|| out.flush(), Err) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(fail(e)),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit(code)) => ExitCode::from(code),
    }
}
