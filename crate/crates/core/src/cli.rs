//! Command-line front end.
//!
//! Exit codes: 0 success, 1 infeasible input, 2 usage or input error,
//! 3 internal failure. Diagnostics go to the error stream only.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{gen_instance, run_benchmark, write_csv, BenchConfig, BenchMode, Constraints, GenSpec};
use crate::error::Error;
use crate::mda::solve;
use crate::model::io::{read_instance, sig12, InstanceDoc, SolutionDoc};
use crate::model::{check_feasibility, ContinuousMethod, Family, Mode, SolverConfig};
use crate::oracle::dp_solve;
use crate::reductions::{lot_sizing_to_rapnc, speed, speed_opt_to_rapnc, LotSizingDoc, SpeedDoc};
use crate::svorex::{predict, train, OrdinalDataset, SvorexConfig, SvorexModel, TrainError};

#[derive(Debug, Parser)]
#[command(name = "rapnc", version, about = "Separable convex allocation under nested constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Scaling,
    Bisection,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BenchModeArg {
    Scaled,
    Continuous,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReduceKind {
    Lotsizing,
    Speed,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance file and print the solution document.
    Solve {
        instance: PathBuf,
        /// Overrides the mode stored in the file.
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Scaling)]
        method: MethodArg,
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact integer solve by dynamic programming (small instances only).
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random feasible instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value = "linear")]
        family: Family,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time generated instances and fit runtime against size.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "linear")]
        families: Vec<Family>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        /// Fixed number of nested constraints instead of m = n.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum, default_value_t = BenchModeArg::Scaled)]
        mode: BenchModeArg,
        #[arg(long, default_value_t = 1e6)]
        scale: f64,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Solves faster than this many seconds are looped and averaged.
        #[arg(long, default_value_t = 1.0)]
        min_time: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Writes `family,ln_n,ln_t` rows for plotting.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Convert an application model into an instance document.
    Reduce {
        #[arg(long, value_enum)]
        kind: ReduceKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train an ordinal regression model.
    SvorexTrain {
        /// Samples, one per line: features then integer label.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        n_ws: usize,
        #[arg(long, default_value_t = 0.2)]
        gamma: f64,
        #[arg(long, default_value_t = 20)]
        n_grad: usize,
        #[arg(long, default_value_t = 10.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        #[arg(long, default_value_t = 1e-3)]
        kkt_tol: f64,
        #[arg(long, default_value_t = 200_000)]
        max_selections: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Standardize features before training.
        #[arg(long)]
        standardize: bool,
    },
    /// Predict classes with a trained model.
    SvorexPredict {
        #[arg(long)]
        model: PathBuf,
        /// The training samples the model was fitted on.
        #[arg(long)]
        train: PathBuf,
        /// Samples to classify; labels in this file are ignored but required.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        standardize: bool,
    },
}

/// Failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible { .. }
            | Error::ScaledInfeasible { .. }
            | Error::NegativeBound { .. }
            | Error::WindowInfeasible { .. } => 1,
            Error::Internal(_) | Error::InfeasibleSubproblem { .. } => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn write_text(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure { code: 3, message: e.to_string() }),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Failure { code: 3, message: e.to_string() })
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_dataset(path: &Path, standardize: bool) -> Result<OrdinalDataset, Failure> {
    let mut ds = OrdinalDataset::read(path)?;
    if standardize {
        ds.standardize();
    }
    Ok(ds)
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure { code: 3, message: e.to_string() };
    match cmd {
        Command::Solve { instance, mode, eps, method, parallel, out: path } => {
            let (inst, file_mode) = read_instance(&instance)?;
            let mode = mode.unwrap_or(file_mode);
            let cfg = SolverConfig {
                epsilon: eps,
                parallel,
                continuous_method: match method {
                    MethodArg::Scaling => ContinuousMethod::Scaling,
                    MethodArg::Bisection => ContinuousMethod::DirectBisection,
                },
                ..SolverConfig::default()
            };
            let alloc = solve(&inst, mode, &cfg)?;
            let tol = if mode == Mode::Integer { 0.0 } else { cfg.feasibility_tol };
            let doc = SolutionDoc::new(&alloc, check_feasibility(&inst, &alloc.x, tol));
            write_text(path.as_deref(), &to_json(&doc)?, out)
        }
        Command::Oracle { instance, out: path } => {
            let (inst, _) = read_instance(&instance)?;
            let alloc = dp_solve(&inst)?;
            let doc = SolutionDoc::new(&alloc, check_feasibility(&inst, &alloc.x, 0.0));
            write_text(path.as_deref(), &to_json(&doc)?, out)
        }
        Command::Gen { n, m, family, seed, out: path } => {
            let inst = gen_instance(GenSpec { n, m: m.unwrap_or(n), seed, family })?;
            let doc = InstanceDoc::from_instance(&inst, Mode::Continuous)?;
            write_text(path.as_deref(), &to_json(&doc)?, out)
        }
        Command::Bench { sizes, families, repeats, m, mode, scale, eps, seed, min_time, csv, plot } => {
            if !(min_time >= 0.0) {
                return Err(usage("--min-time must be >= 0"));
            }
            let cfg = BenchConfig {
                sizes,
                families,
                repeats,
                constraints: m.map_or(Constraints::EqualToN, Constraints::Fixed),
                mode: match mode {
                    BenchModeArg::Scaled => BenchMode::Scaled { scale },
                    BenchModeArg::Continuous => BenchMode::Continuous { epsilon: eps },
                },
                base_seed: seed,
                min_time: Duration::from_secs_f64(min_time),
            };
            let report = run_benchmark(&cfg, |r| {
                let _ = writeln!(err, "n={} m={} family={} seed={} time={:.6}s", r.n, r.m, r.family, r.seed, r.time_seconds);
            })?;
            let mut buf = Vec::new();
            write_csv(&mut buf, &report.records)?;
            match &csv {
                Some(p) => std::fs::write(p, &buf).map_err(|e| usage(format!("{}: {e}", p.display())))?,
                None => out.write_all(&buf).map_err(io)?,
            }
            if let Some(p) = plot {
                let mut text = String::from("family,ln_n,ln_t\n");
                for (f, x, y) in crate::bench::log_log_points(&report) {
                    text.push_str(&format!("{f},{},{}\n", sig12(x), sig12(y)));
                }
                std::fs::write(&p, text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            }
            for s in &report.summaries {
                writeln!(err, "{} n={}: median {:.6}s mean {:.6}s", s.family, s.n, s.median_seconds, s.mean_seconds).map_err(io)?;
            }
            for fit in &report.fits {
                writeln!(err, "{}: t = {:.4e} * n^{:.4}", fit.family, fit.alpha, fit.beta).map_err(io)?;
            }
            Ok(())
        }
        Command::Reduce { kind, input, out: path } => {
            let text = read_text(&input)?;
            let doc = match kind {
                ReduceKind::Lotsizing => {
                    let src: LotSizingDoc = serde_json::from_str(&text).map_err(|e| usage(format!("lot sizing input: {e}")))?;
                    let red = lot_sizing_to_rapnc(&src.to_instance()?)?;
                    let mut doc = InstanceDoc::from_instance(&red.instance, Mode::Continuous)?;
                    doc.value_offset = Some(crate::model::io::Dec(red.offset));
                    doc
                }
                ReduceKind::Speed => {
                    let src: SpeedDoc = serde_json::from_str(&text).map_err(|e| usage(format!("speed input: {e}")))?;
                    let so = src.to_instance()?;
                    let inst = speed_opt_to_rapnc(&so)?;
                    let shell = crate::model::NestedInstance { objective: crate::model::ObjectiveSpec::Linear { p: vec![0.0; inst.n()] }, ..inst };
                    let mut doc = InstanceDoc::from_instance(&shell, Mode::Continuous)?;
                    doc.objective = speed::voyage_objective_doc(&so)?;
                    doc
                }
            };
            write_text(path.as_deref(), &to_json(&doc)?, out)
        }
        Command::SvorexTrain { data, out: path, n_ws, gamma, n_grad, c, width, kkt_tol, max_selections, seed, standardize } => {
            let ds = read_dataset(&data, standardize)?;
            let cfg = SvorexConfig { c, width, gamma, n_grad, n_ws, kkt_tol, max_selections, check_samples: 0, seed };
            let (report, failure) = match train(&ds, &cfg) {
                Ok(r) => (r, None),
                Err(TrainError::IterationLimitExceeded { report }) => {
                    let msg = format!("no convergence after {} selections; writing the best model so far", report.model.selections);
                    (*report, Some(Failure { code: 3, message: msg }))
                }
                Err(TrainError::Solver(e)) => return Err(e.into()),
            };
            writeln!(err, "selections={} final_violation={:.3e} seconds={:.3}", report.model.selections, report.final_violation, report.seconds).map_err(io)?;
            write_text(path.as_deref(), &(report.model.to_json()? + "\n"), out)?;
            failure.map_or(Ok(()), Err)
        }
        Command::SvorexPredict { model, train: train_path, data, standardize } => {
            let model = SvorexModel::from_json(&read_text(&model)?)?;
            let train_ds = read_dataset(&train_path, standardize)?;
            if train_ds.len() != model.alpha.len() {
                return Err(usage(format!("model has {} samples, training file has {}", model.alpha.len(), train_ds.len())));
            }
            let ds = read_dataset(&data, standardize)?;
            for x in &ds.features {
                writeln!(out, "{}", predict(&model, &train_ds, x)).map_err(io)?;
            }
            Ok(())
        }
    }
}

/// Parses `args` (program name first) and runs one subcommand.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
