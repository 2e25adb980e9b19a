use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ubblab::certifier::{CertifierConfig, UnextMode};
use ubblab::family::{build_ges_basis, build_ubb};
use ubblab::family_file::FamilyFile;
use ubblab::report::{RunConfig, Suite, VerificationReport};

const EXIT_IO: u8 = 2;
const EXIT_BAD_D: u8 = 3;

#[derive(Parser)]
#[command(name = "ubblab", version, about = "Build and verify four-party qudit biseparable bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Symbolic,
    Numeric,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Write the basis, the complement basis and the F states as JSON.
    Build {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run verification suites; the exit code carries the verdict.
    Verify {
        #[arg(long)]
        d: usize,
        /// orthogonality, biseparability, counts, ges, unextendibility,
        /// nonlocality, distillability or all (repeatable)
        #[arg(long = "suite", default_value = "all")]
        suites: Vec<String>,
        #[arg(long)]
        tol_rank: Option<f64>,
        #[arg(long)]
        tol_orth: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        /// Random combinations tested in the complement-basis suite.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
        #[arg(long)]
        long_running: bool,
        #[arg(long)]
        allow_warn: bool,
        #[arg(long)]
        allow_inconclusive: bool,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Suppress the human summary on stdout.
        #[arg(long)]
        quiet: bool,
    },
    /// Render a stored report. Always exits 0 if the file parses.
    Report {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

fn check_d(d: usize) -> Result<(), ExitCode> {
    if d < 3 {
        eprintln!("error: d >= 3 required (got {d})");
        return Err(ExitCode::from(EXIT_BAD_D));
    }
    Ok(())
}

fn build(d: usize, out: PathBuf) -> Result<ExitCode, ExitCode> {
    check_d(d)?;
    let built = build_ubb::<f64>(d).and_then(|mut f| {
        f.extend(build_ges_basis::<f64>(d)?)?;
        Ok(f)
    });
    let fam = built.map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })?;
    FamilyFile::from_family(&fam).write(&out).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_IO)
    })?;
    println!("wrote {} states for d = {d} to {}", fam.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::Build { d, out } => build(d, out),
        Command::Verify {
            d,
            suites,
            tol_rank,
            tol_orth,
            seed,
            restarts,
            trials,
            mode,
            long_running,
            allow_warn,
            allow_inconclusive,
            report,
            quiet,
        } => {
            check_d(d)?;
            let suites = Suite::expand(&suites).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_IO)
            })?;
            let defaults = CertifierConfig::default();
            let certifier = CertifierConfig {
                tol_rank: tol_rank.unwrap_or(defaults.tol_rank),
                tol_orth: tol_orth.unwrap_or(defaults.tol_orth),
                seed,
                restarts,
                random_trials: trials,
                ..defaults
            };
            let unext_mode = match mode {
                Mode::Symbolic => UnextMode::Symbolic,
                Mode::Numeric => UnextMode::Numeric,
                Mode::Both => UnextMode::Both,
            };
            let config = RunConfig { suites, certifier, unext_mode, long_running, allow_warn, allow_inconclusive };
            let rep = VerificationReport::run(d, config);
            if !quiet {
                print!("{}", rep.render_human());
            }
            if let Some(path) = report {
                rep.write(&path).map_err(|e| {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_IO)
                })?;
            }
            Ok(ExitCode::from(rep.exit_code() as u8))
        }
        Command::Report { report, format } => {
            let rep = VerificationReport::read(&report).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_IO)
            })?;
            match format {
                Format::Human => print!("{}", rep.render_human()),
                Format::Machine => print!("{}", rep.to_json()),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("UBBLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    run(Cli::parse()).unwrap_or_else(|code| code)
}
