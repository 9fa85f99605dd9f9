//! Command-line front end.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 solver did not
//! converge (results are still written), 3 certification failed under
//! `--require-tight`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certify::{certify_tightness, mean_angular_error, DEFAULT_TOL_D, DEFAULT_TOL_X};
use crate::experiment::{generate_experiment, ExperimentSpec, Topology};
use crate::graph::Problem;
use crate::io::{
    id_list, load_problem, load_solution, save_problem, save_solution, to_json_string, SolutionFile,
};
use crate::solvers::{
    objective_original, solve_baseline, solve_local, solve_relaxation, SolverParams,
};
use crate::sphere::UnitVec3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_NOT_TIGHT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sphere-tikhonov", version, about = "Tikhonov smoothing and interpolation of sphere-valued graph signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Denoise a signal: minimize fidelity plus edge smoothness on the sphere.
    Smooth(SolveArgs),
    /// Fill in missing samples between nodes pinned with w = inf.
    Interpolate(SolveArgs),
    /// Solve the relaxation and report whether it certifies a global optimum.
    Certify(CertifyArgs),
    /// Generate a synthetic problem with von Mises–Fisher noise.
    Simulate(SimulateArgs),
    /// Run all solvers over a series of synthetic instances; writes CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    Sdp,
    Baseline,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TopologyKind {
    Chain,
    Grid2d,
    CustomFile,
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long, default_value_t = SolverParams::default().max_iters)]
    max_iters: usize,
    #[arg(long = "tol-feas", default_value_t = SolverParams::default().tol_feasibility)]
    tol_feas: f64,
    #[arg(long, default_value_t = SolverParams::default().tol_change)]
    tol_change: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ParamArgs {
    fn params(&self) -> SolverParams {
        SolverParams {
            max_iters: self.max_iters,
            tol_feasibility: self.tol_feas,
            tol_change: self.tol_change,
            seed: self.seed,
            ..SolverParams::default()
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverKind::Sdp)]
    solver: SolverKind,
    #[command(flatten)]
    params: ParamArgs,
    /// Exit with code 3 unless the result is a certified global optimum.
    #[arg(long)]
    require_tight: bool,
    /// Write objective and error metrics as JSON.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Ground-truth signal (solution-file format) for the metrics.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Candidate solution whose suboptimality should be bounded.
    #[arg(long)]
    solution: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    require_tight: bool,
    #[arg(long, default_value_t = DEFAULT_TOL_X)]
    tol_x: f64,
    #[arg(long, default_value_t = DEFAULT_TOL_D)]
    tol_d: f64,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long, value_enum, default_value_t = TopologyKind::Chain)]
    topology: TopologyKind,
    #[arg(long, default_value_t = 20)]
    length: usize,
    #[arg(long, default_value_t = 5)]
    rows: usize,
    #[arg(long, default_value_t = 5)]
    cols: usize,
    /// Graph for `--topology custom-file` (problem-file format).
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = 10.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    w: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    fixed_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ExperimentArgs {
    fn spec(&self, seed: u64) -> Result<ExperimentSpec, String> {
        let topology = match self.topology {
            TopologyKind::Chain => Topology::Chain { length: self.length },
            TopologyKind::Grid2d => Topology::Grid { rows: self.rows, cols: self.cols },
            TopologyKind::CustomFile => {
                let path = self.graph.as_ref().ok_or("--topology custom-file requires --graph PATH")?;
                Topology::Custom(load_problem(path).map_err(|e| e.to_string())?)
            }
        };
        Ok(ExperimentSpec {
            topology,
            kappa: self.kappa,
            w: self.w,
            lambda: self.lambda,
            fixed_fraction: self.fixed_fraction,
            seed,
        })
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the ground truth (solution-file format).
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, default_value_t = 10)]
    instances: usize,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = SolverParams::default().max_iters)]
    max_iters: usize,
}

/// Failure that maps to exit code 1.
struct Invalid(String);

impl<E: std::fmt::Display> From<E> for Invalid {
    fn from(e: E) -> Self {
        Invalid(e.to_string())
    }
}

struct Outcome {
    tight: bool,
    converged: bool,
}

impl Outcome {
    fn exit_code(&self, require_tight: bool) -> i32 {
        if require_tight && !self.tight {
            EXIT_NOT_TIGHT
        } else if !self.converged {
            EXIT_NOT_CONVERGED
        } else {
            EXIT_OK
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Invalid> {
    std::fs::write(path, text).map_err(|e| Invalid(format!("{}: {e}", path.display())))
}

fn load_truth(path: &Path, problem: &Problem) -> Result<Vec<UnitVec3>, Invalid> {
    let file = load_solution(path)?;
    file.signal_for(problem).map_err(|e| Invalid(format!("{}: {e}", path.display())))
}

/// Solves with the chosen method and builds the solution file.
fn solve(problem: &Problem, kind: SolverKind, params: &SolverParams) -> Result<(SolutionFile, Outcome), Invalid> {
    let mut diagnostics: Vec<String> = problem.diagnostics().to_vec();
    let (mut file, outcome) = match kind {
        SolverKind::Sdp => {
            let sol = solve_relaxation(problem, params)?;
            let report = certify_tightness(problem, &sol, DEFAULT_TOL_X, DEFAULT_TOL_D)?;
            diagnostics.extend(sol.diagnostics.iter().cloned());
            if !report.degenerate_nodes.is_empty() {
                diagnostics.push(format!(
                    "certify: degenerate relaxed values at {}; rounded to fallback",
                    id_list(&report.degenerate_nodes)
                ));
            }
            let mut file = SolutionFile::from_signal(problem, &report.rounded_x).with_report(&report);
            file.objective_original = Some(report.objective_rounded);
            file.converged = sol.converged;
            file.iterations = sol.iterations;
            (file, Outcome { tight: report.tight, converged: sol.converged })
        }
        SolverKind::Baseline => {
            let sol = solve_baseline(problem, params)?;
            diagnostics.extend(sol.diagnostics.iter().cloned());
            let mut file = SolutionFile::from_signal(problem, &sol.rounded);
            file.objective_original = Some(objective_original(problem, &sol.rounded)?);
            file.converged = sol.converged;
            file.iterations = sol.sweeps;
            (file, Outcome { tight: false, converged: sol.converged })
        }
        SolverKind::Local => {
            // Started from the baseline's rounded output.
            let start = solve_baseline(problem, params)?;
            let sol = solve_local(problem, &start.rounded, params)?;
            diagnostics.extend(sol.diagnostics.iter().cloned());
            let mut file = SolutionFile::from_signal(problem, &sol.x);
            file.objective_original = Some(objective_original(problem, &sol.x)?);
            file.converged = sol.converged;
            file.iterations = sol.sweeps;
            (file, Outcome { tight: false, converged: sol.converged })
        }
    };
    file.diagnostics = diagnostics;
    Ok((file, outcome))
}

fn run_solve(args: &SolveArgs, interpolate: bool) -> Result<i32, Invalid> {
    let problem = load_problem(&args.input)?;
    if interpolate && !(0..problem.num_nodes()).any(|i| problem.is_fixed(i)) {
        return Err(Invalid("interpolate: problem has no node with w = inf".into()));
    }
    let params = args.params.params();
    let (file, outcome) = solve(&problem, args.solver, &params)?;
    save_solution(&args.output, &file)?;

    let signal = file.signal_for(&problem).map_err(Invalid)?;
    if let Some(path) = &args.metrics {
        let truth = args.truth.as_deref().map(|t| load_truth(t, &problem)).transpose()?;
        let mae = truth.as_deref().map(|t| mean_angular_error(&signal, t)).transpose()?;
        let metrics = serde_json::json!({
            "objective_original": file.objective_original,
            "tight": file.tight,
            "mean_angular_error_deg": mae,
        });
        write_text(path, &to_json_string(&metrics))?;
    }
    println!(
        "objective_original={:.12e} tight={} converged={} iterations={}",
        file.objective_original.unwrap_or(f64::NAN),
        file.tight,
        file.converged,
        file.iterations
    );
    Ok(outcome.exit_code(args.require_tight))
}

fn run_certify(args: &CertifyArgs) -> Result<i32, Invalid> {
    let problem = load_problem(&args.input)?;
    let sol = solve_relaxation(&problem, &args.params.params())?;
    let report = certify_tightness(&problem, &sol, args.tol_x, args.tol_d)?;
    let mut file = SolutionFile::from_signal(&problem, &report.rounded_x).with_report(&report);
    file.objective_original = Some(report.objective_rounded);
    file.converged = sol.converged;
    file.iterations = sol.iterations;
    file.diagnostics = problem.diagnostics().to_vec();
    file.diagnostics.extend(sol.diagnostics.iter().cloned());

    if let Some(path) = &args.solution {
        let candidate = load_truth(path, &problem)?;
        let value = objective_original(&problem, &candidate)?;
        file.diagnostics.push(format!(
            "candidate: objective_original={value:.17e} bound={:.17e}",
            value - report.objective_relaxed
        ));
    }
    save_solution(&args.output, &file)?;
    println!(
        "tight={} gap={:.6e} max_norm_defect={:.3e} max_d_defect={:.3e}",
        report.tight, report.gap, report.max_norm_defect, report.max_d_defect
    );
    Ok(Outcome { tight: report.tight, converged: sol.converged }.exit_code(args.require_tight))
}

fn run_simulate(args: &SimulateArgs) -> Result<i32, Invalid> {
    let spec = args.experiment.spec(args.experiment.seed).map_err(Invalid)?;
    let (problem, truth) = generate_experiment(&spec)?;
    save_problem(&args.output, &problem)?;
    if let Some(path) = &args.truth {
        save_solution(path, &SolutionFile::from_signal(&problem, &truth))?;
    }
    Ok(EXIT_OK)
}

fn run_bench(args: &BenchArgs) -> Result<i32, Invalid> {
    let params = SolverParams { max_iters: args.max_iters, ..SolverParams::default() };
    let mut csv = String::from(
        "instance,seed,nodes,edges,relaxed,sdp,baseline,local,gap,tight,converged,iterations,\
         mae_sdp_deg,mae_baseline_deg,mae_local_deg\n",
    );
    let mut all_converged = true;
    for k in 0..args.instances {
        let seed = args.experiment.seed.wrapping_add(k as u64);
        let spec = args.experiment.spec(seed).map_err(Invalid)?;
        let (problem, truth) = generate_experiment(&spec)?;
        let sol = solve_relaxation(&problem, &params)?;
        let report = certify_tightness(&problem, &sol, DEFAULT_TOL_X, DEFAULT_TOL_D)?;
        let base = solve_baseline(&problem, &params)?;
        let local = solve_local(&problem, &base.rounded, &params)?;
        all_converged &= sol.converged;
        writeln!(
            csv,
            "{k},{seed},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{},{},{},{:.17e},{:.17e},{:.17e}",
            problem.num_nodes(),
            problem.num_edges(),
            report.objective_relaxed,
            report.objective_rounded,
            objective_original(&problem, &base.rounded)?,
            objective_original(&problem, &local.x)?,
            report.gap,
            report.tight,
            sol.converged,
            sol.iterations,
            mean_angular_error(&report.rounded_x, &truth)?,
            mean_angular_error(&base.rounded, &truth)?,
            mean_angular_error(&local.x, &truth)?,
        )
        .expect("writing to a String cannot fail");
    }
    write_text(&args.output, &csv)?;
    Ok(if all_converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = e.print();
            } else {
                eprintln!("error: {}", e.to_string().trim_start_matches("error: ").trim_end());
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Smooth(a) => run_solve(a, false),
        Command::Interpolate(a) => run_solve(a, true),
        Command::Certify(a) => run_certify(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(Invalid(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INVALID
        }
    }
}
