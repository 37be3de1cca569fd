use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qgt_cli::commands::{self, AssignmentChoice, EnvCheck};
use qgt_cli::parse::parse_angle;
use qgt_cli::{CliError, Report};

/// Games played with classical and quantum sources of correlation.
#[derive(Parser)]
#[command(name = "qgt", version)]
struct Cli {
    /// Print a single JSON object instead of the human table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pure (and with --mixed, mixed) Nash equilibria of a game file.
    Nash {
        game: PathBuf,
        #[arg(long)]
        mixed: bool,
    },
    /// Correlated-equilibrium check of the profile (X, Y).
    Correlated {
        game: PathBuf,
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Equilibrium check of (X, Y) in the game played with an environment.
    EnvNash {
        game: PathBuf,
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Checks on random instances that lifting commutes with adding an environment.
    CommuteCheck {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// A 2x2 game played with a maximally entangled pair and rotation strategies.
    QuantumEq {
        game: PathBuf,
        /// Player 1 angle, e.g. `pi/2`.
        #[arg(long, allow_hyphen_values = true, requires = "phi")]
        theta: Option<String>,
        /// Player 2 angle.
        #[arg(long, allow_hyphen_values = true, requires = "theta")]
        phi: Option<String>,
        /// Run the best-response search.
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = 16)]
        starts: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Private-information game with an entangled pair shared between the players.
    PrivateQuantum {
        #[arg(long, value_enum)]
        builtin: Builtin,
        /// `a`, `b`, or four angles: player 1 red,green then player 2 red,green.
        #[arg(long, allow_hyphen_values = true)]
        profile: Option<String>,
        /// Best value any classical environment can achieve.
        #[arg(long)]
        classical_bound: bool,
        /// Run the per-type best-response sweep.
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value_t = 16)]
        starts: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Chain inequality for four rotation angles on the entangled pair.
    Bell {
        #[arg(long, allow_hyphen_values = true, default_value = "0,pi/6,pi/3,pi/2")]
        angles: String,
    },
    /// Sequential penny-flip protocol on one penny.
    Pennyflip {
        /// Three moves: N, F, U, Uinv, or `[a,b,c,d]` complex entries.
        #[arg(long, allow_hyphen_values = true, required_unless_present = "check_meyer")]
        moves: Option<String>,
        /// Verify that U, then any Player 2 move, then U^-1 always returns H.
        #[arg(long, conflicts_with = "moves")]
        check_meyer: bool,
        /// Also sample the final measurement this many times.
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Quaternion form of the entangled 2x2 game.
    Ewl {
        #[arg(required_unless_present = "calibrate")]
        game: Option<PathBuf>,
        /// Player 1 mixture, e.g. "0.5*1 ; 0.5*i".
        #[arg(long, allow_hyphen_values = true)]
        p1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        p2: Option<String>,
        #[arg(long, value_enum, default_value_t = Assignment::Default)]
        assignment: Assignment,
        /// Derive and validate the operator-to-quaternion identification.
        #[arg(long, conflicts_with_all = ["p1", "p2", "search"])]
        calibrate: bool,
        /// Run the best-response search.
        #[arg(long, conflicts_with_all = ["p1", "p2"])]
        search: bool,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Iid1,
}

#[derive(Clone, Copy, ValueEnum)]
enum Assignment {
    Default,
    Paper,
}

fn usage(msg: &str) -> CliError {
    CliError::Validation(msg.into())
}

fn run(cmd: Command) -> Result<Report, CliError> {
    match cmd {
        Command::Nash { game, mixed } => commands::nash(&game, mixed),
        Command::Correlated { game, env, x, y } => commands::env_check(EnvCheck::Correlated, &game, &env, &x, &y),
        Command::EnvNash { game, env, x, y } => commands::env_check(EnvCheck::EnvNash, &game, &env, &x, &y),
        Command::CommuteCheck { trials, seed } => commands::commute_check(trials, seed),
        Command::QuantumEq { game, theta, phi, search, starts, seed } => {
            let angles = match (theta, phi) {
                (Some(t), Some(p)) => Some((parse_angle(&t)?, parse_angle(&p)?)),
                _ => None,
            };
            if angles.is_none() && !search {
                return Err(usage("give --theta and --phi, or --search"));
            }
            commands::quantum_eq(&game, angles, search.then_some((starts, seed)))
        }
        Command::PrivateQuantum { builtin: Builtin::Iid1, profile, classical_bound, sweep, starts, seed } => {
            commands::private_quantum(profile.as_deref(), classical_bound, sweep.then_some((starts, seed)))
        }
        Command::Bell { angles } => commands::bell(&angles),
        Command::Pennyflip { moves, check_meyer, shots, seed } => match moves {
            Some(m) if !check_meyer => commands::pennyflip_moves(&m, shots.map(|n| (n, seed))),
            _ => commands::pennyflip_meyer(),
        },
        Command::Ewl { game, p1, p2, assignment, calibrate, search, starts, seed } => {
            let asg = match assignment {
                Assignment::Default => AssignmentChoice::Default,
                Assignment::Paper => AssignmentChoice::Paper,
            };
            if calibrate {
                return commands::ewl_calibrate(asg, seed);
            }
            let game = game.ok_or_else(|| usage("a game file is required"))?;
            if search {
                return commands::ewl_search(&game, asg, starts, seed);
            }
            match (p1, p2) {
                (Some(a), Some(b)) => commands::ewl(&game, &a, &b, asg),
                _ => Err(usage("give --p1 and --p2, --search, or --calibrate")),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.json);
            } else {
                print!("{}", report.human);
            }
            ExitCode::from(report.exit)
        }
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::json!({"error": e.to_string(), "exit": e.exit_code()}));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
