use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use regretlab::io::{self, Overrides, ResolvedExperiment, SummaryFile, TraceTable};
use regretlab::montecarlo::{monte_carlo_regret_parallel, thread_count_from_env};
use regretlab::report;
use regretlab::verify;
use regretlab::{AppError, AppResult, DEFAULT_SEED};
use regretlab_core::adversaries::leader_set_matrix;
use regretlab_core::bounds::{leader_set_reference, tie_exploiter_reference};
use regretlab_core::learners::sfp_action_distribution;
use regretlab_core::smallball::{exact_expected_regret, SWITCH_GUARD};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "regretlab",
    version,
    about = "Sampled fictitious play experiments, bounds and exact oracles"
)]
struct Cli {
    /// Master seed; overrides the config file
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    TieExploiter,
    LeaderSet,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write trace.csv and summary.toml
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        reps: Option<u32>,
    },
    /// Print every bound at the given parameters
    Bounds {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        horizon: u32,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
    },
    /// Reproduce a linear-regret construction
    Counterexample {
        #[arg(value_enum)]
        name: Demo,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        horizon: Option<u32>,
        #[arg(long)]
        reps: Option<u32>,
        /// Also write trace.csv and summary.toml here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact next-round action distribution after a payoff sequence
    Distribution {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
    /// Run the invariant suite
    Verify {
        #[arg(long)]
        filter: Option<String>,
    },
    /// Turn a trace into whitespace-separated plot data
    Plot {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Summary holding the bound; defaults to summary.toml beside the trace
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Add a bound_value / t column
        #[arg(long)]
        overlay: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> AppResult<ExitCode> {
    let seed = cli.seed;
    match cli.command {
        Command::Simulate { config, out, reps } => {
            let resolved = io::load_experiment(
                &config,
                Overrides {
                    seed,
                    replications: reps,
                },
            )?;
            let summary = write_run(&resolved, &out)?;
            println!("seed = {}", resolved.config.master_seed);
            println!("mean_regret = {}", summary.summary.mean_regret);
            println!("std_error = {}", summary.summary.std_error);
            Ok(ExitCode::SUCCESS)
        }
        Command::Bounds {
            n,
            horizon,
            alpha,
            delta,
            format,
        } => {
            let rows = report::bounds_table(n as usize, u64::from(horizon), alpha, delta);
            match format {
                TableFormat::Text => print!("{}", report::format_bounds_text(&rows)),
                TableFormat::Csv => print!("{}", report::format_bounds_csv(&rows)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Counterexample {
            name,
            n,
            horizon,
            reps,
            out,
        } => counterexample(
            name,
            n,
            horizon,
            reps,
            out.as_deref(),
            seed.unwrap_or(DEFAULT_SEED),
        ),
        Command::Distribution { file, alpha } => distribution(&file, alpha),
        Command::Verify { filter } => {
            let seed = seed.unwrap_or(DEFAULT_SEED);
            let reports = verify::run(filter.as_deref(), seed);
            println!("seed = {seed}");
            print!("{}", verify::format_report(&reports, seed));
            Ok(if reports.iter().all(verify::PropertyReport::passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Plot {
            trace,
            out,
            summary,
            overlay,
        } => plot(&trace, &out, summary, overlay),
    }
}

fn write_run(resolved: &ResolvedExperiment, out: &Path) -> AppResult<SummaryFile> {
    let summary = monte_carlo_regret_parallel(&resolved.config, thread_count_from_env()?)?;
    fs::create_dir_all(out).map_err(|e| AppError::io(out, e))?;
    let file = SummaryFile::new(resolved, &summary);
    io::write_text(
        &out.join("trace.csv"),
        &io::format_trace(&TraceTable::from_summary(&summary)),
    )?;
    io::write_text(&out.join("summary.toml"), &io::format_summary(&file))?;
    Ok(file)
}

#[derive(Serialize)]
struct DemoReport {
    seed: u64,
    name: &'static str,
    mean_regret: f64,
    std_error: f64,
    reference: &'static str,
    reference_value: f64,
}

fn counterexample(
    name: Demo,
    n: Option<u32>,
    horizon: Option<u32>,
    reps: Option<u32>,
    out: Option<&Path>,
    seed: u64,
) -> AppResult<ExitCode> {
    let horizon = horizon.map(|h| h as usize);
    let (resolved, label, reference, reference_value) = match name {
        Demo::TieExploiter => {
            if n.is_some_and(|n| n != 2) {
                return Err(AppError::invalid(
                    "n",
                    "the tie exploiter is defined for n = 2 only",
                ));
            }
            let t = horizon.unwrap_or(report::TIE_EXPLOITER_HORIZON);
            let resolved =
                report::tie_exploiter_preset(t, reps.unwrap_or(report::TIE_EXPLOITER_REPS), seed)?;
            (
                resolved,
                "tie-exploiter",
                "0.225 T - 2",
                tie_exploiter_reference(t as u64),
            )
        }
        Demo::LeaderSet => {
            let n = n.map_or(report::LEADER_SET_N, |n| n as usize);
            let resolved = report::leader_set_preset(
                n,
                horizon,
                reps.unwrap_or(report::LEADER_SET_REPS),
                seed,
            )?;
            (resolved, "leader-set", "N/2 - H_N", leader_set_reference(n))
        }
    };
    let summary = match out {
        Some(dir) => {
            let file = write_run(&resolved, dir)?;
            if let Demo::LeaderSet = name {
                let matrix = leader_set_matrix(resolved.config.adversary.n)?;
                io::write_text(
                    &dir.join("leader_set.txt"),
                    &io::format_payoff_sequence(&matrix),
                )?;
            }
            file.summary
        }
        None => {
            let s = monte_carlo_regret_parallel(&resolved.config, thread_count_from_env()?)?;
            SummaryFile::new(&resolved, &s).summary
        }
    };
    let report = DemoReport {
        seed,
        name: label,
        mean_regret: summary.mean_regret,
        std_error: summary.std_error,
        reference,
        reference_value,
    };
    #[derive(Serialize)]
    struct Out<'a> {
        #[serde(flatten)]
        report: DemoReport,
        config: &'a io::ExperimentFile,
    }
    print!(
        "{}",
        toml::to_string(&Out {
            report,
            config: &resolved.file
        })
        .expect("report serializes")
    );
    Ok(ExitCode::SUCCESS)
}

fn distribution(path: &Path, alpha: f64) -> AppResult<ExitCode> {
    let rows = io::read_payoff_sequence(path)?;
    let n = rows.first().map_or(0, |g| g.len());
    let probabilities = sfp_action_distribution(&rows, alpha, n)?;
    #[derive(Serialize)]
    struct Out {
        alpha: f64,
        round: usize,
        probabilities: Vec<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        expected_regret: Option<f64>,
    }
    let expected_regret = if rows.len() <= SWITCH_GUARD {
        Some(exact_expected_regret(&rows, alpha)?)
    } else {
        None
    };
    let out = Out {
        alpha,
        round: rows.len() + 1,
        probabilities,
        expected_regret,
    };
    print!(
        "{}",
        toml::to_string(&out).expect("distribution serializes")
    );
    Ok(ExitCode::SUCCESS)
}

fn plot(
    trace_path: &Path,
    out: &Path,
    summary: Option<PathBuf>,
    overlay: bool,
) -> AppResult<ExitCode> {
    let trace = io::read_trace(trace_path)?;
    let bound = if overlay {
        let summary_path = summary.unwrap_or_else(|| {
            trace_path
                .parent()
                .unwrap_or(Path::new("."))
                .join("summary.toml")
        });
        let bound = if summary_path.exists() {
            io::parse_summary(&io::read_text(&summary_path)?)?
                .summary
                .bound_value
        } else {
            None
        };
        if bound.is_none() {
            eprintln!("warning: no bound attached to this run; overlay column omitted");
        }
        bound
    } else {
        None
    };
    io::write_text(out, &report::plot_data(&trace, bound))?;
    Ok(ExitCode::SUCCESS)
}
