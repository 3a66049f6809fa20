use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub const SEED_ENV: &str = "QRC_SEED";
pub const MAX_TRIALS: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "qrc", version, about = "Remote control of quantum states: protocol scenarios and bound checks")]
pub struct Cli {
    #[command(subcommand)]
    pub scenario: Scenario,

    /// RNG seed; the QRC_SEED environment variable takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..=MAX_TRIALS))]
    pub trials: u64,

    /// Fidelities below 1 - tolerance fail the run.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = parse_tolerance)]
    pub tolerance: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Emit a JSON-lines trace on stderr.
    #[arg(long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Scenario {
    /// Teleport Haar-random qubit states.
    TeleportState,
    /// Bidirectional teleportation of Haar-random unitaries.
    TeleportUnitary,
    /// Control-state teleportation of the Pauli set.
    ControlTeleport,
    /// Decode a remotely applied Pauli through a local Bell pair.
    DenseCoding,
    /// Entanglement Bob shares with Alice after a coherently controlled run.
    EbitBound,
    /// Overlap deficit ruling out a trivial first stage.
    NogoTrivialG1,
    /// The first stage moves Bob's state to Alice intact.
    G1Transfer,
    /// Leftover ancillas do not depend on the unitary or the input.
    Independence,
    /// Spread of the control overlap for non-proportional unitaries.
    OrthogonalityWitness,
    /// Pauli-basis decomposition round trip.
    Decompose,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::TeleportState => "teleport-state",
            Scenario::TeleportUnitary => "teleport-unitary",
            Scenario::ControlTeleport => "control-teleport",
            Scenario::DenseCoding => "dense-coding",
            Scenario::EbitBound => "ebit-bound",
            Scenario::NogoTrivialG1 => "nogo-trivial-g1",
            Scenario::G1Transfer => "g1-transfer",
            Scenario::Independence => "independence",
            Scenario::OrthogonalityWitness => "orthogonality-witness",
            Scenario::Decompose => "decompose",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub trials: u64,
    pub tolerance: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub verbose: bool,
}

impl RunConfig {
    /// `env_seed` is the raw value of `QRC_SEED`, if set.
    pub fn new(cli: Cli, env_seed: Option<String>) -> Result<Self, String> {
        let seed = match env_seed {
            Some(raw) => raw
                .trim()
                .parse()
                .map_err(|_| format!("{SEED_ENV}={raw:?} is not an unsigned integer"))?,
            None => cli.seed,
        };
        Ok(RunConfig {
            scenario: cli.scenario,
            seed,
            trials: cli.trials,
            tolerance: cli.tolerance,
            format: cli.format,
            output: cli.output,
            verbose: cli.verbose,
        })
    }
}

fn parse_tolerance(raw: &str) -> Result<f64, String> {
    let t: f64 = raw.parse().map_err(|e| format!("{e}"))?;
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err("tolerance must be a positive number".into())
    }
}
