//! `ssgm`: solve suite problems, check gradients, run benchmarks and build
//! performance profiles.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ssgm_bench::{
    emit_curves_csv, emit_profile_svg, full_dims, load_records_csv, performance_profile,
    run_matrix, FailurePolicy, Metric, RunRecord, SafeguardKind,
};
use ssgm_core::linesearch::EtaSchedule;
use ssgm_core::problem::DEFAULT_FD_STEP;
use ssgm_core::solver::{solve, GradNorm, SolverConfig};
use ssgm_core::suite::{self, ProblemSpec, DEFAULT_SCALABLE_N, GRADIENT_CHECK_TOL};
use ssgm_core::StepsizeRule;

#[derive(Parser)]
#[command(
    version,
    about = "Structured spectral gradient methods for nonlinear least squares"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem with one configuration and print the report.
    Solve {
        /// Problem id or slug, e.g. `21` or `extended-rosenbrock`.
        problem: String,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Print the per-iteration trace.
        #[arg(long)]
        trace: bool,
        /// Write the full report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare analytic gradients with central differences.
    CheckGrad {
        #[command(flatten)]
        selection: Selection,
        /// Dimension for scalable problems (default: each problem's default).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_FD_STEP)]
        h: f64,
        #[arg(long, default_value_t = GRADIENT_CHECK_TOL)]
        tol: f64,
    },
    /// Run the problem × dimension × solver matrix and write records as CSV.
    Bench {
        #[command(flatten)]
        selection: Selection,
        /// Dimensions for scalable problems.
        #[arg(long, value_delimiter = ',', default_values_t = [DEFAULT_SCALABLE_N])]
        dims: Vec<usize>,
        /// Every registered problem at n = 1000, 2000, …, 10000.
        #[arg(long)]
        full: bool,
        #[arg(long, value_delimiter = ',', default_values_t = [Rule::Ssgm1, Rule::Ssgm2])]
        rules: Vec<Rule>,
        #[arg(long, value_delimiter = ',', default_values_t = [Safeguard::Tau])]
        safeguards: Vec<Safeguard>,
        #[command(flatten)]
        solver: CommonArgs,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value = "records.csv")]
        out: PathBuf,
    },
    /// Turn a records CSV into performance-profile curves (CSV and SVG).
    Profile {
        records: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Iterations)]
        metric: MetricArg,
        /// Keep instances where some solver failed, counting the failure as
        /// an infinite ratio.
        #[arg(long)]
        keep_failures: bool,
        #[arg(long, default_value = "profile.csv")]
        out: PathBuf,
        /// SVG output (default: the CSV path with an .svg extension).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Selection {
    /// Comma-separated problem ids or slugs, or `core` / `all`.
    #[arg(long, default_value = "core")]
    problems: String,
}

impl Selection {
    fn resolve(&self) -> anyhow::Result<Vec<&'static ProblemSpec>> {
        match self.problems.as_str() {
            "core" => Ok(suite::core()),
            "all" => Ok(suite::list().iter().collect()),
            list => list
                .split(',')
                .map(|s| suite::find(s.trim()).map_err(Into::into))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Ssgm1,
    Ssgm2,
    Bb1,
    Bb2,
}

impl Rule {
    fn core(self) -> StepsizeRule {
        match self {
            Self::Ssgm1 => StepsizeRule::Ssgm1,
            Self::Ssgm2 => StepsizeRule::Ssgm2,
            Self::Bb1 => StepsizeRule::Bb1,
            Self::Bb2 => StepsizeRule::Bb2,
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.to_possible_value().unwrap().get_name())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Safeguard {
    Classical,
    Retard,
    Tau,
}

impl Safeguard {
    fn kind(self) -> SafeguardKind {
        match self {
            Self::Classical => SafeguardKind::Classical,
            Self::Retard => SafeguardKind::Retard,
            Self::Tau => SafeguardKind::Tau,
        }
    }
}

impl std::fmt::Display for Safeguard {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.kind().as_str())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Iterations,
    NResidual,
    Time,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Iterations => Metric::Iterations,
            MetricArg::NResidual => Metric::NResidual,
            MetricArg::Time => Metric::Time,
        }
    }
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = Rule::Ssgm2)]
    rule: Rule,
    #[arg(long, value_enum, default_value_t = Safeguard::Tau)]
    safeguard: Safeguard,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Gradient-norm tolerance.
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
    /// Norm used in the stopping test: `inf` or `euclidean`.
    #[arg(long, default_value = "inf")]
    norm: GradNorm,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// Residual-evaluation budget.
    #[arg(long, default_value_t = 2000)]
    max_fev: u64,
    /// `santos-silva` or `const:<value>`.
    #[arg(long, default_value = "santos-silva", value_parser = parse_eta)]
    eta: EtaSchedule,
    /// Reserved; every run is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

impl CommonArgs {
    fn config(&self, rule: StepsizeRule, safeguard: SafeguardKind) -> SolverConfig {
        SolverConfig {
            epsilon: self.eps,
            grad_norm: self.norm,
            max_iterations: self.max_iter,
            max_residual_evals: self.max_fev,
            eta_schedule: self.eta.clone(),
            ..SolverConfig::new(rule, safeguard.strategy())
        }
    }
}

fn parse_eta(s: &str) -> Result<EtaSchedule, String> {
    if s == "santos-silva" {
        return Ok(EtaSchedule::SantosSilva);
    }
    let v = s
        .strip_prefix("const:")
        .ok_or_else(|| format!("expected `santos-silva` or `const:<v>`, got `{s}`"))?;
    let v: f64 = v.parse().map_err(|e| format!("bad eta value `{v}`: {e}"))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("eta must lie in [0, 1], got {v}"));
    }
    Ok(EtaSchedule::Constant(v))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Solve {
            problem,
            n,
            solver,
            trace,
            out,
        } => {
            let spec = suite::find(&problem)?;
            let n = n.unwrap_or_else(|| spec.default_n());
            let problem = spec.instantiate(n)?;
            let config = solver
                .common
                .config(solver.rule.core(), solver.safeguard.kind());
            let report = solve(&problem, &config)?;
            if trace {
                println!(
                    "{:>5} {:>14} {:>11} {:>11} {:>4} {:>3}",
                    "k", "f", "|g|", "lambda", "nb", "sg"
                );
                for r in &report.trace {
                    println!(
                        "{:>5} {:>14.6e} {:>11.3e} {:>11.3e} {:>4} {:>3}",
                        r.k,
                        r.f_k,
                        r.grad_norm,
                        r.lambda_k,
                        r.n_backtracks.map_or(String::from("-"), |b| b.to_string()),
                        if r.safeguard_fired { "*" } else { "" }
                    );
                }
            }
            println!("problem     {} (n = {})", report.problem, report.n);
            println!("solver      {}", report.solver);
            println!("status      {}", report.status);
            println!("iterations  {}", report.iterations);
            println!("f           {:.6e}", report.f);
            println!("grad norm   {:.3e}", report.grad_norm);
            println!(
                "evaluations {} residual, {} jtv",
                report.counters.n_residual, report.counters.n_jtv
            );
            println!("safeguards  {}", report.safeguard_count);
            if let Some(msg) = &report.message {
                println!("message     {msg}");
            }
            if let Some(path) = out {
                std::fs::write(&path, report.to_json())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckGrad {
            selection,
            n,
            h,
            tol,
        } => {
            let specs = selection.resolve()?;
            let checks = suite::validate_suite(&specs, n, h);
            let mut bad = 0;
            for c in &checks {
                let (verdict, detail) = match &c.max_rel_error {
                    Ok(e) if *e <= tol => ("ok", format!("{e:.2e}")),
                    Ok(e) => ("FAIL", format!("{e:.2e}")),
                    Err(e) => ("FAIL", e.to_string()),
                };
                if verdict != "ok" {
                    bad += 1;
                }
                println!("{verdict:<4} {:<50} n={:<6} {detail}", c.name, c.n);
            }
            println!("{} checked, {bad} failed", checks.len());
            Ok(if bad == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Bench {
            selection,
            dims,
            full,
            rules,
            safeguards,
            solver,
            workers,
            out,
        } => {
            let (specs, dims) = if full {
                (suite::list().iter().collect(), full_dims())
            } else {
                (selection.resolve()?, dims)
            };
            if rules.is_empty() || safeguards.is_empty() {
                bail!("need at least one rule and one safeguard");
            }
            let configs: Vec<SolverConfig> = rules
                .iter()
                .flat_map(|r| safeguards.iter().map(|s| solver.config(r.core(), s.kind())))
                .collect();
            let records = run_matrix(&specs, &dims, &configs, workers)?;
            ssgm_bench::emit_records_csv(&records, &out)
                .with_context(|| format!("writing {}", out.display()))?;
            summarize(&records);
            println!("wrote {} records to {}", records.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Profile {
            records,
            metric,
            keep_failures,
            out,
            svg,
        } => {
            let recs = load_records_csv(&records)
                .with_context(|| format!("reading {}", records.display()))?;
            let policy = if keep_failures {
                FailurePolicy::CountFailuresAsCeiling
            } else {
                FailurePolicy::RemoveFailed
            };
            let metric = Metric::from(metric);
            let curves = performance_profile(&recs, metric, policy)?;
            emit_curves_csv(&curves, &out).with_context(|| format!("writing {}", out.display()))?;
            let svg = svg.unwrap_or_else(|| out.with_extension("svg"));
            emit_profile_svg(&curves, &format!("Performance profile: {metric}"), &svg)
                .with_context(|| format!("writing {}", svg.display()))?;
            for c in &curves {
                println!(
                    "{:<10} rho(1) = {:.3}  rho(max) = {:.3}",
                    c.label,
                    c.rho_at(1.0),
                    c.rho.last().copied().unwrap_or(0.0)
                );
            }
            println!("wrote {} and {}", out.display(), svg.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn summarize(records: &[RunRecord]) {
    let mut labels: Vec<&str> = records.iter().map(|r| r.solver.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    for label in labels {
        let runs: Vec<_> = records.iter().filter(|r| r.solver == label).collect();
        let ok = runs.iter().filter(|r| !r.failed).count();
        println!("{label:<8} {ok}/{} converged", runs.len());
        for r in runs.iter().filter(|r| r.failed) {
            println!(
                "    problem {:>2} n={:<6} {:?}",
                r.problem_id, r.n, r.status
            );
        }
    }
}
