use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use linsup::feasibility::{seek_feasible, RunError};
use linsup::generator::{generate, GenError, GenSpec};
use linsup::harness::{
    emit_report_dir, run_experiment, ExperimentSpec, HarnessError,
};
use linsup::problem::{
    format_f64, read_problem, write_problem, ConfigError, InitPolicy, ProblemError, RunReport,
    SolverConfig,
};
use linsup::simplex::{solve, solve_budgeted, SimplexError, SimplexResult};
use linsup::superiorization::linsup_run;

#[derive(Parser)]
#[command(name = "linsup", version, about = "Linear superiorization toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Feasibility,
    Linsup,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Nsweep,
    Task1,
    Task2,
    Suboptimal,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and write it as a problem file
    Generate {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Feasibility margin added to A*1 when building the right-hand side
        #[arg(long, default_value_t = 10.0)]
        slack: f64,
    },
    /// Run feasibility-seeking or superiorized iteration on a problem file
    Run {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "linsup")]
        mode: Mode,
        /// Step-size kernel
        #[arg(long, default_value_t = 0.99)]
        alpha: f64,
        /// Perturbation steps per sweep
        #[arg(long, default_value_t = 30)]
        n: usize,
        /// Projection relaxation parameter
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Proximity stopping threshold
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        /// Initialization: tens | random | file:PATH
        #[arg(long, default_value = "tens")]
        init: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200_000)]
        max_sweeps: usize,
        /// Optional relative iterate-change stopping threshold
        #[arg(long)]
        iterate_change_eps: Option<f64>,
        /// Write the per-sweep trace as CSV
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Solve a problem file with the simplex baseline
    Simplex {
        #[arg(long)]
        problem: PathBuf,
        /// Wall-clock budget in seconds; omit to run to optimality
        #[arg(long)]
        budget: Option<f64>,
        /// Pivots between trace samples
        #[arg(long, default_value_t = 25)]
        sample_every: usize,
        /// Write the pivot trace as CSV
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a predefined experiment and write its report set to a directory
    Experiment {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Comma-separated sizes like 80x100,200x250
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<String>>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        /// Perturbation counts for the calibration sweep
        #[arg(long, value_delimiter = ',')]
        n_values: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
        /// Override the proximity stopping threshold
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        budget_multiplier: Option<f64>,
        #[arg(long)]
        sample_every: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 1 usage, 2 numerical failure, 3 I/O.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(p) = cause.downcast_ref::<ProblemError>() {
            return match p {
                ProblemError::Io(_) | ProblemError::ParseError { .. } => 3,
                _ => 1,
            };
        }
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 1;
        }
        if let Some(h) = cause.downcast_ref::<HarnessError>() {
            return match h {
                HarnessError::InvalidSpec(_) => 1,
                HarnessError::Io(_) => 3,
                _ => 2,
            };
        }
        if let Some(g) = cause.downcast_ref::<GenError>() {
            return match g {
                GenError::InvalidSpec(_) => 1,
                GenError::EscalationFailed(_) => 2,
            };
        }
        if let Some(r) = cause.downcast_ref::<RunError>() {
            return match r {
                RunError::Config(_) | RunError::SuperiorizeEnabled => 1,
                RunError::Init(_) => 2,
            };
        }
        if cause.downcast_ref::<SimplexError>().is_some() {
            return 2;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 3;
        }
    }
    2
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            rows,
            cols,
            seed,
            out,
            slack,
        } => {
            let mut spec = GenSpec::new(rows, cols, seed);
            spec.slack = slack;
            let problem = generate(&spec)?;
            write_problem(&problem, &out)?;
            println!(
                "wrote {rows}x{cols} instance (seed {seed}) to {}",
                out.display()
            );
            Ok(())
        }
        Command::Run {
            problem,
            mode,
            alpha,
            n,
            lambda,
            eps,
            init,
            seed,
            max_sweeps,
            iterate_change_eps,
            trace,
        } => {
            let p = read_problem(&problem)?;
            let config = SolverConfig {
                alpha,
                inner_steps: n,
                relaxation: lambda,
                prox_epsilon: eps,
                max_sweeps,
                seed,
                init: parse_init(&init)?,
                superiorize: matches!(mode, Mode::Linsup),
                iterate_change_epsilon: iterate_change_eps,
                record_points: false,
            };
            let report = match mode {
                Mode::Linsup => linsup_run(&p, &config)?,
                Mode::Feasibility => seek_feasible(&p, &config)?,
            };
            println!(
                "stop={} sweeps={} phi={} prox={:e} beta_sum={} time_s={}",
                report.stop_reason,
                report.sweeps,
                report.final_phi(),
                report.final_prox(),
                report.beta_sum,
                report.total_time_s(),
            );
            if let Some(path) = trace {
                write_run_trace(&report, &path)?;
                println!("trace written to {}", path.display());
            }
            Ok(())
        }
        Command::Simplex {
            problem,
            budget,
            sample_every,
            trace,
        } => {
            let p = read_problem(&problem)?;
            let t0 = std::time::Instant::now();
            let result = match (budget, trace.is_some()) {
                (Some(b), _) => solve_budgeted(&p, b, sample_every)?,
                (None, true) => solve_budgeted(&p, f64::INFINITY, sample_every)?,
                (None, false) => solve(&p)?,
            };
            let elapsed = t0.elapsed().as_secs_f64();
            println!(
                "status={} pivots={} objective={} prox={:e} time_s={}",
                result.status,
                result.pivots,
                result.objective,
                linsup::metrics::proximity(&p, &result.x),
                elapsed,
            );
            if let Some(path) = trace {
                write_simplex_trace(&result, &path)?;
                println!("trace written to {}", path.display());
            }
            Ok(())
        }
        Command::Experiment {
            kind,
            sizes,
            reps,
            alphas,
            n_values,
            seed,
            out_dir,
            eps,
            budget_multiplier,
            sample_every,
        } => {
            let mut spec = match kind {
                KindArg::Task1 => ExperimentSpec::task1(seed),
                KindArg::Task2 => ExperimentSpec::task2(seed),
                KindArg::Nsweep => ExperimentSpec::nsweep(seed),
                KindArg::Suboptimal => ExperimentSpec::suboptimal(seed),
            };
            if let Some(sizes) = sizes {
                spec.sizes = sizes
                    .iter()
                    .map(|s| parse_size(s))
                    .collect::<Result<Vec<_>>>()?;
            }
            if let Some(reps) = reps {
                spec.reps = reps;
            }
            if let Some(alphas) = alphas {
                spec.alphas = alphas;
            }
            if let Some(n_values) = n_values {
                spec.n_values = n_values;
            }
            if let Some(eps) = eps {
                spec.base_config.prox_epsilon = eps;
            }
            if let Some(m) = budget_multiplier {
                spec.budget_multiplier = m;
            }
            if let Some(s) = sample_every {
                spec.sample_every = s;
            }

            let report = run_experiment(&spec)?;
            emit_report_dir(&report, &out_dir)?;
            println!(
                "{} report: {} rows, {} averaged cells",
                report.kind,
                report.rows.len(),
                report.averages.len()
            );
            for w in &report.win_fractions {
                println!(
                    "  {}x{}: superiorized lower target in {}/{} instances",
                    w.size.0, w.size.1, w.wins, w.total
                );
            }
            for a in &report.averages {
                let mut line = format!("  {}x{} {} ", a.size.0, a.size.1, a.arm);
                if let Some(alpha) = a.alpha {
                    line.push_str(&format!("alpha={alpha} "));
                }
                if let Some(n) = a.inner_steps {
                    line.push_str(&format!("n={n} "));
                }
                line.push_str(&format!(
                    "phi={:.6} time_s={:.4}",
                    a.mean_phi, a.mean_time_s
                ));
                if let Some(re) = a.mean_re {
                    line.push_str(&format!(" re={re:.6}"));
                }
                if let Some(tr) = a.mean_tr {
                    line.push_str(&format!(" tr={tr:.6}"));
                }
                println!("{line}");
            }
            println!("report set written to {}", out_dir.display());
            Ok(())
        }
    }
}

fn parse_init(text: &str) -> Result<InitPolicy> {
    match text {
        "tens" => Ok(InitPolicy::AllTens),
        "random" => Ok(InitPolicy::RandomEscalated),
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                let content = std::fs::read_to_string(path)
                    .with_context(|| format!("reading initialization point {path}"))?;
                let point: Vec<f64> = content
                    .split_whitespace()
                    .map(|tok| {
                        tok.parse::<f64>()
                            .map_err(|_| anyhow!("bad number {tok:?} in {path}"))
                    })
                    .collect::<Result<_>>()?;
                Ok(InitPolicy::Explicit(point))
            } else {
                Err(anyhow!(
                    "unknown init policy {other:?}; expected tens, random, or file:PATH"
                ))
            }
        }
    }
}

fn parse_size(text: &str) -> Result<(usize, usize)> {
    let (rows, cols) = text
        .split_once('x')
        .ok_or_else(|| anyhow!("bad size {text:?}; expected ROWSxCOLS like 80x100"))?;
    Ok((
        rows.trim().parse().context("size rows")?,
        cols.trim().parse().context("size cols")?,
    ))
}

fn write_run_trace(report: &RunReport, path: &Path) -> Result<()> {
    let mut out = String::from("sweep,k,elapsed_s,instrumentation_s,prox,phi\n");
    for s in &report.trace {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.sweep,
            s.sweep,
            format_f64(s.elapsed_s),
            format_f64(s.instrumentation_s),
            format_f64(s.prox),
            format_f64(s.phi),
        ));
    }
    std::fs::write(path, out).with_context(|| format!("writing trace {}", path.display()))
}

fn write_simplex_trace(result: &SimplexResult, path: &Path) -> Result<()> {
    let mut out = String::from("sweep,k,elapsed_s,instrumentation_s,prox,phi\n");
    for (idx, s) in result.trace.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            idx,
            s.pivots,
            format_f64(s.elapsed_s),
            format_f64(s.instrumentation_s),
            format_f64(s.prox),
            format_f64(s.objective),
        ));
    }
    std::fs::write(path, out).with_context(|| format!("writing trace {}", path.display()))
}
