use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use ailfem_cli::config::{ConfigError, ExperimentConfig};
use ailfem_cli::mesh_dump::MeshDump;
use ailfem_cli::run::{execute, RunError};
use ailfem_core::adaptivity::RunStatus;
use ailfem_core::mesh::{Domain, Triangulation};
use ailfem_core::problem::{builtin_problem, BUILTIN_PROBLEMS};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ailfem", version, about = "Adaptive iteratively linearized FEM for semilinear elliptic problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write the per-step CSV and a JSON summary.
    Run(RunArgs),
    /// List the built-in problems.
    ListProblems,
    /// Write the initial mesh of a problem or domain as JSON.
    Mesh(MeshArgs),
}

/// Flags override values from `--config`.
#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file; keys are the long flag names.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// Polynomial degree.
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    c_mark: Option<String>,
    /// ib, ib_prime or ib_double_prime.
    #[arg(long)]
    stopping: Option<String>,
    /// Refinement of marked elements: bisec3 or nvb.
    #[arg(long)]
    refinement: Option<String>,
    /// idealized, practical or gailfem.
    #[arg(long)]
    driver: Option<String>,
    /// Fixed step size (idealized driver).
    #[arg(long)]
    delta: Option<String>,
    /// Initial Lipschitz guess of the adaptive step size.
    #[arg(long)]
    l0: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// Work budget in element-steps, e.g. 2e6.
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    eta_tol: Option<String>,
    #[arg(long)]
    max_levels: Option<String>,
    #[arg(long)]
    initial_refinements: Option<String>,
    /// Override the computed bound M.
    #[arg(long)]
    m_bound: Option<String>,
    /// Output directory (default: $AILFEM_OUTPUT_DIR, then ./results).
    #[arg(long)]
    out_dir: Option<String>,
    /// CSV file name inside the output directory.
    #[arg(long)]
    csv: Option<String>,
    /// Summary file name inside the output directory.
    #[arg(long)]
    summary: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Kernel threads (default: all cores).
    #[arg(long)]
    threads: Option<String>,
}

impl RunArgs {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("problem", &self.problem),
            ("m", &self.m),
            ("theta", &self.theta),
            ("lambda", &self.lambda),
            ("c_mark", &self.c_mark),
            ("stopping", &self.stopping),
            ("refinement", &self.refinement),
            ("driver", &self.driver),
            ("delta", &self.delta),
            ("l0", &self.l0),
            ("beta", &self.beta),
            ("budget", &self.budget),
            ("eta_tol", &self.eta_tol),
            ("max_levels", &self.max_levels),
            ("initial_refinements", &self.initial_refinements),
            ("m_bound", &self.m_bound),
            ("out_dir", &self.out_dir),
            ("csv", &self.csv),
            ("summary", &self.summary),
            ("seed", &self.seed),
            ("threads", &self.threads),
        ]
    }

    fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for (key, value) in self.pairs() {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.adaptive()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct MeshArgs {
    /// Built-in problem whose initial mesh is dumped.
    #[arg(long, conflicts_with = "domain")]
    problem: Option<String>,
    /// unit_square, unit_square_diagonal or goal.
    #[arg(long)]
    domain: Option<String>,
    /// Number of uniform refinements.
    #[arg(long, default_value_t = 0)]
    refine: usize,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: &RunArgs) -> Result<RunStatus, RunError> {
    let cfg = args.resolve()?;
    let csv_path = cfg.csv_path();
    let summary_path = cfg.summary_path();
    if let Some(dir) = csv_path.parent() {
        fs::create_dir_all(dir)?;
    }
    if let Some(dir) = summary_path.parent() {
        fs::create_dir_all(dir)?;
    }
    let finished = execute(&cfg, BufWriter::new(File::create(&csv_path)?))?;
    finished.csv.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    let mut out = BufWriter::new(File::create(&summary_path)?);
    serde_json::to_writer_pretty(&mut out, &finished.summary).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    let s = &finished.summary;
    eprintln!(
        "{}: {} levels, {} steps, eta {:.3e}, status {}",
        s.problem,
        s.levels,
        s.steps,
        s.final_state.as_ref().map_or(f64::NAN, |f| f.eta),
        s.status
    );
    eprintln!("wrote {} and {}", csv_path.display(), summary_path.display());
    Ok(finished.log.status)
}

fn list_problems() {
    for name in BUILTIN_PROBLEMS {
        let p = builtin_problem(name).expect("built-in");
        println!(
            "{:<22} eps = {:<8e} b(v) = {:<14} {}",
            p.name,
            p.epsilon(),
            p.nonlinearity.formula,
            p.description
        );
    }
}

fn mesh(args: &MeshArgs) -> Result<(), Box<dyn std::error::Error>> {
    let mut mesh = match (&args.problem, &args.domain) {
        (Some(p), _) => builtin_problem(p)?.initial_mesh(),
        (None, Some(d)) => Triangulation::initial(Domain::from_name(d)?),
        (None, None) => Triangulation::initial(Domain::UnitSquare),
    };
    for _ in 0..args.refine {
        mesh = mesh.uniform_refine();
    }
    let dump = MeshDump::from_mesh(&mesh);
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            serde_json::to_writer(&mut w, &dump)?;
            w.flush()?;
        }
        None => {
            serde_json::to_writer(io::stdout().lock(), &dump)?;
            println!();
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(&args) {
            Ok(RunStatus::Failed(e)) => {
                eprintln!("error: run failed: {e} (partial results written)");
                ExitCode::from(1)
            }
            Ok(_) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                if e.exit_code() == 2 {
                    eprintln!("usage: ailfem run --problem <name> [--config <file>] [--key value ...]; see `ailfem run --help`");
                }
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::ListProblems => {
            list_problems();
            ExitCode::SUCCESS
        }
        Command::Mesh(args) => match mesh(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
