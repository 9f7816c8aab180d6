use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use condorcet_core::boosting::sufficient_duels_two_arms;
use condorcet_core::input::EnvironmentDoc;
use condorcet_core::markov::analyze_chain;
use condorcet_core::tail::majority_probability;
use condorcet_core::QueryPolicy;
use condorcet_lab::config::{ExperimentConfig, ExperimentKind, DEFAULT_BUDGET_EPSILONS, DEFAULT_EPSILONS};
use condorcet_lab::error::{LabError, Result};
use condorcet_lab::runner::{default_output, run_experiment};
use condorcet_lab::schema::{write_csv, write_csv_to, BudgetRow, CsvRow, StationaryRow};
use condorcet_lab::{figures, selftest};

#[derive(Parser, Debug)]
#[command(name = "condorcet-lab", version, about = "Condorcet winner search experiments")]
struct Cli {
    /// Base seed; overrides `base_seed` in configs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; overrides `workers` in configs.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file, or directory for `figures` and `selftest`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a config and print it with defaults filled in.
    Validate { config: PathBuf },
    /// Run an experiment config.
    Run { config: PathBuf },
    /// Exact stationary distribution, bounds and mixing times of one chain.
    Stationary(ChainArgs),
    /// Exact and empirical TV-decay curves of one chain.
    Mixing {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        t_max: Option<usize>,
        #[arg(long)]
        mc_samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        replicates: u64,
    },
    /// Two-arm duel budgets: smallest odd x with majority success >= 1 - eps.
    Budget {
        /// Utility pair `u_i,u_j` with `u_i > u_j`; repeatable.
        #[arg(long = "pair", required = true, value_parser = parse_pair)]
        pairs: Vec<[f64; 2]>,
        /// Target error; repeatable. Defaults to 0.1, 0.05, 0.01.
        #[arg(long = "eps")]
        epsilons: Vec<f64>,
    },
    /// Regenerate the n-arm grid and the two-arm curve CSVs.
    Figures {
        #[arg(long, default_value_t = 100_000)]
        mc_samples: u64,
    },
    /// Small runs of every experiment kind plus reduced checks.
    Selftest,
}

#[derive(Args, Debug)]
struct ChainArgs {
    /// Environment JSON file (`matrix`, `utilities`, `uniform_gap` or `gamma`).
    #[arg(long, conflicts_with = "utilities", required_unless_present = "utilities")]
    env: Option<PathBuf>,
    /// Plackett-Luce utilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    utilities: Option<Vec<f64>>,
    /// Duels per query; odd.
    #[arg(long, default_value_t = 1)]
    x: u64,
    /// Mixing-time targets; repeatable.
    #[arg(long = "eps")]
    epsilons: Vec<f64>,
}

impl ChainArgs {
    fn environment(&self) -> Result<EnvironmentDoc> {
        match (&self.env, &self.utilities) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
                serde_json::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
            }
            (None, Some(u)) => Ok(EnvironmentDoc::from_utilities(u.clone())),
            (None, None) => Err(LabError::Config("one of --env or --utilities is required".into())),
        }
    }

    fn epsilons(&self) -> Vec<f64> {
        if self.epsilons.is_empty() {
            DEFAULT_EPSILONS.to_vec()
        } else {
            self.epsilons.clone()
        }
    }
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected `u_i,u_j`, got `{s}`"));
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok([num(parts[0])?, num(parts[1])?])
}

fn emit<T: CsvRow>(out: Option<&Path>, rows: &[T]) -> Result<()> {
    match out {
        Some(path) => {
            write_csv(path, rows)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => write_csv_to(std::io::stdout().lock(), rows),
    }
}

fn apply_overrides(cli: &Cli, config: &mut ExperimentConfig) {
    if let Some(seed) = cli.seed {
        config.base_seed = seed;
    }
    if let Some(w) = cli.workers {
        config.workers = Some(w);
    }
    if let Some(out) = &cli.out {
        config.output = Some(out.clone());
    }
}

fn run_config(config: &ExperimentConfig) -> Result<()> {
    let result = run_experiment(config)?;
    let path = config.output.clone().unwrap_or_else(|| default_output(config));
    for p in result.write(&path)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let Format::Csv = cli.format;
    match &cli.command {
        Command::Validate { config } => {
            let mut c = ExperimentConfig::load(config)?;
            apply_overrides(cli, &mut c);
            let plan = c.validate()?;
            let mut stdout = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, &c.resolved(&plan))?;
            writeln!(stdout).map_err(|e| LabError::io("<stdout>", e))?;
        }
        Command::Run { config } => {
            let mut c = ExperimentConfig::load(config)?;
            apply_overrides(cli, &mut c);
            run_config(&c)?;
        }
        Command::Stationary(chain) => {
            let env = chain.environment()?.resolve()?;
            let policy = QueryPolicy::new(chain.x)?;
            let rows: Vec<StationaryRow> = analyze_chain(&env.matrix, policy, &chain.epsilons())?
                .into_iter()
                .map(Into::into)
                .collect();
            emit(cli.out.as_deref(), &rows)?;
        }
        Command::Mixing {
            chain,
            t_max,
            mc_samples,
            replicates,
        } => {
            let config = ExperimentConfig {
                kind: ExperimentKind::Mixing,
                base_seed: cli.seed.unwrap_or(0),
                replicates: *replicates,
                output: Some(cli.out.clone().unwrap_or_else(|| PathBuf::from("out/mixing.csv"))),
                workers: cli.workers,
                environment: Some(chain.environment()?),
                x: Some(chain.x),
                epsilons: Some(chain.epsilons()),
                t_max: *t_max,
                mc_samples: *mc_samples,
                ..ExperimentConfig::empty(ExperimentKind::Mixing)
            };
            run_config(&config)?;
        }
        Command::Budget { pairs, epsilons } => {
            let epsilons = if epsilons.is_empty() {
                DEFAULT_BUDGET_EPSILONS.to_vec()
            } else {
                epsilons.clone()
            };
            let mut rows = Vec::new();
            for &[u_i, u_j] in pairs {
                for &eps in &epsilons {
                    let b = sufficient_duels_two_arms(u_i, u_j, eps)?;
                    rows.push(BudgetRow {
                        u_i,
                        u_j,
                        eps,
                        bound: b.bound,
                        x_recommended: b.recommended_x,
                        exact_success_prob: majority_probability(b.recommended_x, u_i / (u_i + u_j)),
                    });
                }
            }
            emit(cli.out.as_deref(), &rows)?;
        }
        Command::Figures { mc_samples } => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out/figures"));
            let pool = pool(cli.workers)?;
            let seed = cli.seed.unwrap_or(0);
            let mut written = pool.install(|| figures::reproduce_figure_narm_bounds(&dir, seed, *mc_samples))?;
            written.extend(figures::reproduce_appendix_figures(&dir)?);
            for p in written {
                println!("{}", p.display());
            }
        }
        Command::Selftest => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out/selftest"));
            let seed = cli.seed.unwrap_or(selftest::SELFTEST_SEED);
            let report = pool(cli.workers)?.install(|| selftest::run_selftest(&dir, seed))?;
            for p in &report.outputs {
                println!("{}", p.display());
            }
            for c in &report.checks {
                println!("{}", c.line());
            }
            if !report.passed() {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(LabError::Config("--workers must be at least 1".into()));
        }
        b = b.num_threads(w);
    }
    b.build().map_err(|e| LabError::Pool(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
