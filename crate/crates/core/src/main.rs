use clap::{Parser, Subcommand};
use respoisson::cli::{self, CliError, RunConfig, DEFAULT_CONFIG};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "respoisson",
    version,
    about = "Resonance trace formulas on exterior-ball models"
)]
struct Args {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search resonances and write them with a counting-function summary.
    Resonances,
    /// Compare the phase-side and resonance-side wave traces on a t-grid.
    VerifyPoisson,
    /// Heat trace and its long-time law.
    Heat,
    /// Long-time decay after removing the resonances below a logarithmic curve.
    Theorem4,
    /// Weierstrass factorization of the scattering determinant.
    Factorize,
    /// Print the default configuration.
    PrintDefaults,
}

fn run(args: Args) -> Result<cli::Outcome, CliError> {
    if let Some(n) = args.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = args.out {
        cfg.output.dir = d;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    match args.command {
        Command::Resonances => cli::cmd_resonances(&cfg),
        Command::VerifyPoisson => cli::cmd_verify_poisson(&cfg),
        Command::Heat => cli::cmd_heat(&cfg),
        Command::Theorem4 => cli::cmd_theorem4(&cfg),
        Command::Factorize => cli::cmd_factorize(&cfg),
        Command::PrintDefaults => {
            print!("{DEFAULT_CONFIG}");
            Ok(cli::Outcome {
                pass: true,
                files: Vec::new(),
                summary: String::new(),
            })
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let quiet = matches!(args.command, Command::PrintDefaults);
    match run(args) {
        Ok(out) => {
            if !quiet {
                println!("{}", out.summary);
                for f in &out.files {
                    println!("wrote {}", f.display());
                }
                println!("{}", if out.pass { "PASS" } else { "FAIL" });
            }
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
