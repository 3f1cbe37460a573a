use clap::{Parser, Subcommand};
use horseshoe::commands::{self, CmdOutput};
use horseshoe::json::to_canonical_json;
use horseshoe::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "horseshoe",
    about = "Saddle-node arcs inside a horseshoe: construction and hyperbolicity certification"
)]
struct Cli {
    /// Configuration file (JSON); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write output here instead of stdout (atomic: temp file + rename).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Random seed override for sampled checks.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Box-subdivision depth override.
    #[arg(long, global = true)]
    depth: Option<u32>,

    /// Worker threads for parallel phases (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Print the default configuration and exit.
    #[arg(long)]
    print_default_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the family and report every computed constant and invariant.
    Construct,
    /// Certify hyperbolicity of the maximal invariant set at one mu.
    Verify {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
    },
    /// Certification sweep over a parameter range.
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        mu_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        mu_max: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
    /// Passage-count scaling table (type-I intermittency).
    Intermittency {
        /// Parameter values, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        mu: Vec<f64>,
    },
    /// Export an orbit with its region itinerary as CSV.
    Orbit {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Export the box cover of the maximal invariant set as JSON.
    InvariantSet {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.print_default_config {
        print!("{}", to_canonical_json(&RunConfig::default()));
        return ExitCode::SUCCESS;
    }

    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .ok();
    }

    let cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => RunConfig::default(),
    };

    let out = match &cli.command {
        None => {
            eprintln!("error: no subcommand; see --help");
            return ExitCode::from(1);
        }
        Some(Command::Construct) => commands::cmd_construct(&cfg),
        Some(Command::Verify { mu }) => commands::cmd_verify(&cfg, *mu, cli.depth, cli.seed),
        Some(Command::Sweep {
            mu_min,
            mu_max,
            steps,
        }) => commands::cmd_sweep(&cfg, *mu_min, *mu_max, *steps, cli.depth, cli.seed),
        Some(Command::Intermittency { mu }) => commands::cmd_intermittency(&cfg, mu),
        Some(Command::Orbit { mu, x, y, steps }) => commands::cmd_orbit(&cfg, *mu, *x, *y, *steps),
        Some(Command::InvariantSet { mu }) => commands::cmd_invariant_set(&cfg, *mu, cli.depth),
    };

    emit(&cli.out, out)
}

fn emit(path: &Option<PathBuf>, out: CmdOutput) -> ExitCode {
    match path {
        Some(p) if out.exit == 0 => {
            if let Err(e) = commands::write_atomic(p, &out.text) {
                eprintln!("error writing {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        _ => print!("{}", out.text),
    }
    ExitCode::from(out.exit as u8)
}
