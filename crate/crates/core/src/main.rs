use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use exact_fa::classify::{self, Algorithm, FitOptions};
use exact_fa::faml::{self, DecomposeOptions, FactorProblem, RationalMatrix};
use exact_fa::groebner::Budget;
use exact_fa::harness::{self, HarnessError, Mode, SimulationModel, StudyConfig};
use exact_fa::Rational;

#[derive(Parser)]
#[command(name = "exact-fa", version, about = "Exact and numeric maximum-likelihood factor analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CovArgs {
    /// Covariance matrix: CSV of decimals or a JSON array of "p/q" strings.
    #[arg(long)]
    cov: PathBuf,
    #[arg(long, default_value_t = 1)]
    factors: usize,
    /// Added to the diagonal before solving.
    #[arg(long, default_value = "0")]
    ridge: String,
}

#[derive(Args)]
struct BudgetArgs {
    /// Largest Groebner basis allowed in any branch.
    #[arg(long, default_value_t = Budget::default().max_basis)]
    budget: usize,
    #[arg(long, default_value_t = Budget::default().max_degree)]
    max_degree: u32,
    /// Required for the exact solver with two or more factors.
    #[arg(long)]
    i_have_time: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate every real solution of the likelihood equations.
    SolveExact {
        #[command(flatten)]
        cov: CovArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Multi-start numeric fit; prints the best fit.
    SolveNumeric {
        #[command(flatten)]
        cov: CovArgs,
        #[arg(long, value_enum, default_value = "jennrich")]
        algo: AlgoArg,
        #[arg(long, default_value_t = 100)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Proper / Improper / NoSolution verdict.
    Classify {
        #[command(flatten)]
        cov: CovArgs,
        #[arg(long, value_enum, default_value = "numeric")]
        mode: Mode,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 100)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample size used for the observed information.
        #[arg(long, default_value_t = 100.0)]
        n: f64,
    },
    /// Monte-Carlo pattern table; per-run CSV on stdout.
    Simulate {
        /// JSON model: {"loadings": [[..]], "psi"?, "n"?, "seed"?, "rounding"?}
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, value_enum, default_value = "numeric")]
        mode: Mode,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 100)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the pattern counts as CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Classify t*A + (1-t)*B on a grid of t; grid CSV on stdout.
    Interpolate {
        #[arg(long)]
        cov_a: PathBuf,
        #[arg(long)]
        cov_b: PathBuf,
        #[arg(long, default_value_t = 11)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        factors: usize,
        #[arg(long, value_enum, default_value = "numeric")]
        mode: Mode,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 100)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the pattern-change brackets as JSON.
        #[arg(long)]
        transitions: Option<PathBuf>,
        /// Write the discrepancy-versus-last-unique-variance curves as CSV.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum AlgoArg {
    Lawley,
    Jennrich,
    Em,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Lawley => Algorithm::Lawley,
            AlgoArg::Jennrich => Algorithm::Jennrich,
            AlgoArg::Em => Algorithm::Em,
        }
    }
}

enum Failure {
    Domain(String),
    Resource(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        if e.is_resource() {
            Failure::Resource(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

impl From<faml::FamlError> for Failure {
    fn from(e: faml::FamlError) -> Self {
        HarnessError::from(e).into()
    }
}

impl From<classify::ClassifyError> for Failure {
    fn from(e: classify::ClassifyError) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn load_cov(path: &Path) -> Result<RationalMatrix, Failure> {
    Ok(faml::parse_covariance(&read(path)?)?)
}

fn load_problem(a: &CovArgs) -> Result<FactorProblem, Failure> {
    let ridge: Rational = faml::parse_rational(&a.ridge)?;
    Ok(FactorProblem::new(load_cov(&a.cov)?, a.factors, ridge)?)
}

fn gate(exact: bool, k: usize, b: &BudgetArgs) -> Result<(), Failure> {
    if exact && k >= 2 && !b.i_have_time {
        return Err(Failure::Domain(
            "the exact solver with two or more factors can run for days; pass --i-have-time to proceed".into(),
        ));
    }
    Ok(())
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Domain(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn study(mode: Mode, b: &BudgetArgs, starts: usize, seed: u64) -> StudyConfig {
    StudyConfig { mode, starts, seed, max_basis: b.budget, max_degree: b.max_degree, ..StudyConfig::default() }
}

#[derive(Serialize)]
struct FitJson {
    algorithm: Algorithm,
    starts: usize,
    #[serde(rename = "L")]
    l: Vec<Vec<f64>>,
    psi: Vec<f64>,
    discrepancy: f64,
    converged: bool,
    iterations: usize,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::SolveExact { cov, budget, seed } => {
            let prob = load_problem(&cov)?;
            gate(true, prob.k(), &budget)?;
            let opts = DecomposeOptions {
                budget: Budget { max_basis: budget.budget, max_degree: budget.max_degree, ..Budget::default() },
                seed,
                ..DecomposeOptions::default()
            };
            let e = faml::enumerate_with(&prob, &opts)?;
            for err in &e.errors {
                eprintln!("warning: {err}");
            }
            print_json(&e.to_json())?;
            if e.hit_budget() {
                return Err(Failure::Resource("some branches exceeded the budget; output is partial".into()));
            }
        }
        Command::SolveNumeric { cov, algo, starts, seed } => {
            let prob = load_problem(&cov)?;
            let s = prob.s_f64();
            let fits = classify::multi_start(algo.into(), &s, prob.k(), starts, seed, &FitOptions::default());
            let best = classify::best_fit(&fits).ok_or_else(|| Failure::Domain("every fit failed".into()))?;
            print_json(&FitJson {
                algorithm: best.algorithm,
                starts,
                l: best.l.clone(),
                psi: best.psi.clone(),
                discrepancy: best.discrepancy,
                converged: best.converged,
                iterations: best.iterations,
            })?;
        }
        Command::Classify { cov, mode, budget, starts, seed, n } => {
            let prob = load_problem(&cov)?;
            gate(mode == Mode::Exact, prob.k(), &budget)?;
            let cfg = StudyConfig { n, ..study(mode, &budget, starts, seed) };
            let report = harness::classify_problem(&prob, &cfg)?;
            for d in &report.diagnostics {
                eprintln!("note: {d}");
            }
            print_json(&report.to_json())?;
        }
        Command::Simulate { model, runs, mode, budget, starts, seed, summary } => {
            let m: SimulationModel =
                serde_json::from_str(&read(&model)?).map_err(|e| Failure::Domain(format!("model: {e}")))?;
            gate(mode == Mode::Exact, m.k(), &budget)?;
            let table = harness::monte_carlo(&m, runs, &study(mode, &budget, starts, seed))?;
            print!("{}", table.to_csv()?);
            if let Some(path) = summary {
                write(&path, &table.counts_csv()?)?;
            }
        }
        Command::Interpolate { cov_a, cov_b, grid, factors, mode, budget, starts, seed, transitions, profile } => {
            gate(mode == Mode::Exact, factors, &budget)?;
            let (a, b) = (load_cov(&cov_a)?, load_cov(&cov_b)?);
            let st = harness::interpolate_study(&a, &b, factors, grid, &study(mode, &budget, starts, seed))?;
            print!("{}", st.grid_csv()?);
            for t in &st.transitions {
                eprintln!("transition {} -> {} in [{}, {}]", t.from, t.to, t.lower, t.upper);
            }
            if let Some(path) = transitions {
                let text = serde_json::to_string_pretty(&st.transitions).map_err(|e| Failure::Domain(e.to_string()))?;
                write(&path, &text)?;
            }
            if let Some(path) = profile {
                write(&path, &st.profile_csv()?)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
