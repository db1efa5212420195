use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use sqgame::game::{average_reward, Game};
use sqgame::json::{self as codec, EstimateReportRepr, GameRepr, PayoffReportRepr, ShotRepr, WitnessRepr};
use sqgame::optimize::{self, SeesawOptions};
use sqgame::protocol::{self, ProtocolOptions};
use sqgame::witness::decomposable_witness;
use sqgame::{oracle, Error, Result};

mod inputs;

#[derive(Parser)]
#[command(name = "sqgame", version, about = "Semiquantum witnessing games and entanglement measures")]
struct Cli {
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Cap on worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build entanglement witnesses.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Build games from witnesses.
    #[command(subcommand)]
    Game(GameCmd),
    /// Evaluate or optimize the average reward of a game.
    #[command(subcommand)]
    Payoff(PayoffCmd),
    /// Entanglement measures defined by optimal play.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Reference computations.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Simulate the referee with a finite number of shots.
    Simulate(SimulateArgs),
}

#[derive(Subcommand)]
enum WitnessCmd {
    /// `-D (|psi><psi|)^T_B0` for a source vector.
    Decomposable {
        /// JSON vector file, `bell:<phi+|phi-|psi+|psi->` or `maxent:<d>`.
        #[arg(long)]
        psi: String,
    },
    /// Minus the swap operator on `d x d`.
    Swap {
        #[arg(long)]
        d: usize,
    },
}

#[derive(Subcommand)]
enum GameCmd {
    FromWitness {
        /// JSON witness file, or a built-in source such as `bell:psi-` or `swap:2`.
        #[arg(long)]
        witness: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Product,
    Matched,
}

#[derive(Args)]
struct SeedArg {
    #[arg(long, env = "SQGAME_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Alice's branch count for matched strategies (default: her total dimension).
    #[arg(long)]
    branches: Option<usize>,
    #[command(flatten)]
    seed: SeedArg,
}

impl SearchArgs {
    fn options(&self) -> SeesawOptions {
        SeesawOptions {
            restarts: self.restarts,
            max_iter: self.max_iter,
            tol: self.tol,
            seed: self.seed.seed,
            branches: self.branches,
            ..SeesawOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum PayoffCmd {
    /// Exact average reward of a strategy.
    Evaluate {
        #[arg(long)]
        game: String,
        #[arg(long)]
        state: String,
        /// JSON strategy file, `bell-matched:<identity|twisted>`, `identity:<d>` or `never:<d>`.
        #[arg(long)]
        strategy: String,
    },
    /// Best strategy found by see-saw search.
    Optimize {
        #[arg(long)]
        game: String,
        #[arg(long)]
        state: String,
        #[arg(long, value_enum, default_value_t = Family::Matched)]
        family: Family,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Pay-off of a decomposable game, positive exactly on NPT states.
    Npt {
        #[arg(long)]
        state: String,
        /// Decomposable game; defaults to the maximally entangled witness.
        #[arg(long)]
        game: Option<String>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Best pay-off over decomposable games (a certified lower bound).
    Bullet {
        #[arg(long)]
        state: String,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    Negativity {
        #[arg(long)]
        state: String,
    },
    Ppt {
        #[arg(long)]
        state: String,
    },
    UpperBound {
        #[arg(long)]
        witness: String,
        #[arg(long)]
        state: String,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    game: String,
    #[arg(long)]
    state: String,
    #[arg(long)]
    strategy: String,
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[command(flatten)]
    seed: SeedArg,
    /// Independently seeded shot partitions.
    #[arg(long, default_value_t = 1)]
    partitions: usize,
    /// Also write every shot as a line of JSON to this file.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

fn emit<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    let mut text = codec::to_string(value);
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Validation(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Error::Validation(format!("cannot write output: {e}")))
        }
    }
}

fn default_game(rho: &sqgame::QuantumOperator) -> Result<Game> {
    let dims = rho.layout().dims();
    let layout = sqgame::SubsystemLayout::pair(("A0", dims[0]), ("B0", dims[1]))?;
    Game::from_witness(&decomposable_witness(&sqgame::StateVector::maximally_entangled(layout)?)?)
}

fn run(cli: Cli) -> Result<()> {
    let out = &cli.out;
    match cli.command {
        Command::Witness(WitnessCmd::Decomposable { psi }) => {
            let w = decomposable_witness(&inputs::source_vector(&psi)?)?;
            emit(out, &WitnessRepr::from(&w))
        }
        Command::Witness(WitnessCmd::Swap { d }) => {
            emit(out, &WitnessRepr::from(&sqgame::witness::swap_witness(d)?))
        }
        Command::Game(GameCmd::FromWitness { witness }) => {
            let g = Game::from_witness(&inputs::witness(&witness)?)?;
            emit(out, &GameRepr::from(&g))
        }
        Command::Payoff(PayoffCmd::Evaluate { game, state, strategy }) => {
            let g = inputs::game(&game)?;
            let value = average_reward(&g, &inputs::state(&state)?, &inputs::strategy(&strategy)?)?;
            emit(out, &json!({ "value": value }))
        }
        Command::Payoff(PayoffCmd::Optimize { game, state, family, search }) => {
            let g = inputs::game(&game)?;
            let rho = inputs::state(&state)?;
            let opts = search.options();
            let report = match family {
                Family::Product => optimize::seesaw_product(g.witness(), &rho, &opts)?,
                Family::Matched => optimize::seesaw_matched(g.witness(), &rho, &opts)?,
            };
            emit(out, &PayoffReportRepr::from(&report))
        }
        Command::Measure(MeasureCmd::Npt { state, game, search }) => {
            let rho = inputs::state(&state)?;
            let g = match game {
                Some(arg) => inputs::game(&arg)?,
                None => default_game(&rho)?,
            };
            let report = optimize::payoff_npt(g.witness(), &rho, &search.options())?;
            emit(out, &PayoffReportRepr::from(&report))
        }
        Command::Measure(MeasureCmd::Bullet { state, search }) => {
            let report = optimize::payoff_bullet(&inputs::state(&state)?, &search.options())?;
            emit(out, &PayoffReportRepr::from(&report))
        }
        Command::Oracle(OracleCmd::Negativity { state }) => {
            emit(out, &json!({ "negativity": oracle::negativity(&inputs::state(&state)?)? }))
        }
        Command::Oracle(OracleCmd::Ppt { state }) => {
            let lambda = oracle::ppt_min_eigenvalue(&inputs::state(&state)?)?;
            emit(out, &json!({ "ppt_min_eigenvalue": lambda, "ppt": lambda >= -optimize::PPT_TOL }))
        }
        Command::Oracle(OracleCmd::UpperBound { witness, state }) => {
            let w = inputs::witness(&witness)?;
            let rho = inputs::shared(&inputs::state(&state)?)?;
            emit(out, &json!({ "upper_bound": optimize::upper_bound_global(&w, &rho)? }))
        }
        Command::Simulate(args) => simulate(out, args),
    }
}

fn simulate(out: &Option<PathBuf>, args: SimulateArgs) -> Result<()> {
    let g = inputs::game(&args.game)?;
    let rho = inputs::state(&args.state)?;
    let s = inputs::strategy(&args.strategy)?;
    let opts = ProtocolOptions {
        partitions: args.partitions,
        transcript: args.transcript.is_some(),
        ..ProtocolOptions::default()
    };
    let report = protocol::run_with(&g, &rho, &s, args.shots, args.seed.seed, &opts)?;
    if let (Some(path), Some(shots)) = (&args.transcript, &report.transcript) {
        let mut text = String::new();
        for shot in shots {
            text.push_str(&serde_json::to_string(&ShotRepr::from(shot)).expect("plain record"));
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| Error::Validation(format!("cannot write `{}`: {e}", path.display())))?;
    }
    emit(out, &EstimateReportRepr::from(&report))
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(Error::Validation("--threads must be positive".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads(cli.threads).and_then(|()| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = if e.is_dimensional() { 3 } else { 2 };
            let body = json!({ "error": { "kind": e.kind(), "message": e.to_string(), "exit_code": code } });
            eprintln!("{body}");
            ExitCode::from(code)
        }
    }
}
