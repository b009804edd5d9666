//! `amhedge`: price, hedge and benchmark options on a binomial lattice.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use amhedge::config::MarketOverrides;
use amhedge::example::{worked_example, EXPIRES_IN_THE_MONEY, EXPIRES_WORTHLESS};
use amhedge::experiment::{write_convergence_csv, write_perf_csv, PerfReport};
use amhedge::hedge::Path;
use amhedge::{
    calibrate, convergence_sweep, exercise_boundary, gen_path, price, run_perf, simulate_dynamic,
    table_one, Error, ExercisePolicy, ExerciseStyle, MarketSpec, OptionKind, Rounding, StepParams,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "amhedge", version, about = "Binomial pricing and delta hedging of American options")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price an option and write the node-by-node value surface.
    Price {
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value = "surface.csv")]
        out: PathBuf,
    },
    /// Hedge a written option along one path and write the trace.
    Hedge {
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Explicit moves, e.g. `udd`, instead of a seeded path.
        #[arg(long)]
        path: Option<String>,
        /// `rational`, `expiry`, or a step number.
        #[arg(long, default_value = "rational")]
        exercise: String,
        #[arg(long, value_enum, default_value_t = RoundingArg::Full)]
        rounding: RoundingArg,
        #[arg(long, default_value = "trace.csv")]
        out: PathBuf,
    },
    /// Monte Carlo hedging performance, at one lattice size or over the table sizes.
    Perf {
        #[command(flatten)]
        market: MarketArgs,
        /// Lattice size; omit for 5, 10, 25, 50, 100, 250 and 500.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, default_value = "perf.csv")]
        out: PathBuf,
    },
    /// European lattice prices against the closed form.
    Converge {
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [50usize, 100, 250, 500])]
        ns: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, default_value = "convergence.csv")]
        out: PathBuf,
    },
    /// Step-by-step ledger of the three-step call example.
    Example {
        #[arg(long, value_enum, default_value_t = RoundingArg::ThreeDecimals)]
        rounding: RoundingArg,
    },
}

#[derive(Args, Clone, Default)]
struct MarketArgs {
    /// key=value market file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    s0: Option<f64>,
    #[arg(long)]
    strike: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    maturity: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    market_price: Option<f64>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long, value_enum)]
    style: Option<StyleArg>,
}

#[derive(Args, Clone, Default)]
struct LatticeArgs {
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Net down return per step; with --up and --step-rate replaces calibration.
    #[arg(long, allow_negative_numbers = true, requires_all = ["up", "step_rate"])]
    down: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires_all = ["down", "step_rate"])]
    up: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires_all = ["down", "up"])]
    step_rate: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Call,
    Put,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    American,
    European,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundingArg {
    Full,
    ThreeDecimals,
}

impl From<RoundingArg> for Rounding {
    fn from(r: RoundingArg) -> Self {
        match r {
            RoundingArg::Full => Rounding::Full,
            RoundingArg::ThreeDecimals => Rounding::ThreeDecimals,
        }
    }
}

impl MarketArgs {
    fn resolve(&self) -> amhedge::Result<MarketSpec> {
        let file = match &self.config {
            Some(path) => MarketOverrides::parse(&std::fs::read_to_string(path)?)?,
            None => MarketOverrides::default(),
        };
        let flags = MarketOverrides {
            s0: self.s0,
            strike: self.strike,
            sigma: self.sigma,
            rate: self.rate,
            maturity: self.maturity,
            mu: self.mu,
            market_price: self.market_price,
            kind: self.kind.map(|k| match k {
                KindArg::Call => OptionKind::Call,
                KindArg::Put => OptionKind::Put,
            }),
            style: self.style.map(|s| match s {
                StyleArg::American => ExerciseStyle::American,
                StyleArg::European => ExerciseStyle::European,
            }),
        };
        let market = file.merge(flags).apply(MarketSpec::twenty_week_call());
        market.validate()?;
        Ok(market)
    }
}

impl LatticeArgs {
    fn resolve(&self, market: &MarketSpec) -> amhedge::Result<StepParams> {
        match (self.down, self.up, self.step_rate) {
            (Some(down), Some(up), Some(rate)) => {
                let q = calibrate(market, self.steps).map(|p| p.q_up()).unwrap_or(0.5);
                StepParams::new(self.steps, down, up, rate, q)
            }
            _ => calibrate(market, self.steps),
        }
    }
}

fn create(path: &FsPath) -> amhedge::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn parse_policy(text: &str) -> amhedge::Result<ExercisePolicy> {
    match text.trim().to_ascii_lowercase().as_str() {
        "rational" => Ok(ExercisePolicy::Rational),
        "expiry" => Ok(ExercisePolicy::ExpiryOnly),
        other => other
            .parse()
            .map(ExercisePolicy::AtStep)
            .map_err(|_| Error::Config(format!("exercise must be rational, expiry or a step, got `{other}`"))),
    }
}

fn run(cli: Cli) -> amhedge::Result<()> {
    match cli.command {
        Command::Price { market, lattice, out } => {
            let market = market.resolve()?;
            let params = lattice.resolve(&market)?;
            let surface = price(&market, &params)?;
            surface.write_csv(create(&out)?)?;
            println!("{} {} {}, N = {}", market.style, market.kind, market.strike, params.steps());
            println!("root value: {:.4}", surface.root_value());
            let early: Vec<_> = exercise_boundary(&surface)[..params.steps()]
                .iter()
                .filter(|l| !l.is_empty())
                .map(|l| l.step)
                .collect();
            match early.first() {
                Some(first) => println!("early exercise region from step {first} ({} steps)", early.len()),
                None => println!("no early exercise before expiry"),
            }
            println!("surface written to {}", out.display());
        }
        Command::Hedge { market, lattice, seed, path, exercise, rounding, out } => {
            let market = market.resolve()?;
            let params = lattice.resolve(&market)?;
            let surface = price(&market, &params)?;
            let path = match path {
                Some(moves) => Path::from_moves(market.s0, &params, Path::parse_moves(&moves)?),
                None => gen_path(&params, market.s0, seed),
            };
            let trace = simulate_dynamic(&path, &surface, &market, parse_policy(&exercise)?, rounding.into())?;
            trace.write_csv(create(&out)?)?;
            println!("model price: {:.4}", surface.root_value());
            match trace.exercise_step {
                Some(step) => println!("exercise step: {step}"),
                None => println!("exercise step: none"),
            }
            println!("gain: {:.4}", trace.gain);
            if let Some(residual) = trace.residual() {
                println!("residual: {residual:.4} ({residual:.3e})");
            }
            println!("trace written to {}", out.display());
        }
        Command::Perf { market, steps, reps, seed, format, out } => {
            let market = market.resolve()?;
            let rows = match steps {
                Some(n) => vec![run_perf(&market, n, reps, seed)?],
                None => table_one(&market, reps, seed)?,
            };
            println!("{:>5} {:>8} {:>10} {:>12} {:>10} {:>8}", "N", "weeks", "mean gain", "var gain", "var/C0", "C0");
            for r in &rows {
                println!(
                    "{:>5} {:>8.3} {:>10.4} {:>12.4e} {:>10.4e} {:>8.4}",
                    r.n, r.step_weeks, r.mean_gain, r.var_gain, r.ratio_var, r.c0
                );
            }
            match format {
                Format::Csv => write_perf_csv(&rows, create(&out)?)?,
                Format::Json => {
                    let report = PerfReport { base_seed: seed, market, rows };
                    let mut w = create(&out)?;
                    serde_json::to_writer_pretty(&mut w, &report)?;
                    w.write_all(b"\n")?;
                    w.flush()?;
                }
            }
            println!("results written to {}", out.display());
        }
        Command::Converge { market, ns, format, out } => {
            let market = market.resolve()?;
            let rows = convergence_sweep(&market, &ns)?;
            for r in &rows {
                println!("N = {:>5}  binomial {:.6}  black-scholes {:.6}  error {:.2e}", r.n, r.binomial, r.black_scholes, r.abs_error);
            }
            match format {
                Format::Csv => write_convergence_csv(&rows, create(&out)?)?,
                Format::Json => {
                    let mut w = create(&out)?;
                    serde_json::to_writer_pretty(&mut w, &rows)?;
                    w.write_all(b"\n")?;
                    w.flush()?;
                }
            }
            println!("results written to {}", out.display());
        }
        Command::Example { rounding } => {
            let rounding = Rounding::from(rounding);
            let main = worked_example(&EXPIRES_WORTHLESS, rounding)?;
            println!("path up, down, down:");
            for line in &main.lines {
                println!("  {line}");
            }
            let residual = main.trace.residual().unwrap_or(0.0);
            println!("residual: {residual:.4} ({residual:.3e})");
            let alt = worked_example(&EXPIRES_IN_THE_MONEY, rounding)?;
            println!("alternative final move up:");
            for line in alt.lines.iter().filter(|l| l.starts_with("step 3")) {
                println!("  {line}");
            }
            let residual = alt.trace.residual().unwrap_or(0.0);
            println!("residual: {residual:.4} ({residual:.3e})");
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Arbitrage { .. } | Error::Io(_) | Error::Csv(_) | Error::Json(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
