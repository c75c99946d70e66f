use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use steerkit_cli::{
    cmd_basis, cmd_dims, cmd_render, default_check_reps, parse_group, resolve_seed, run_checks, BasisRequest,
    UsageError,
};

#[derive(Parser)]
#[command(name = "steerkit", version, about = "Steerable kernel bases for planar symmetry groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the analytic basis size for every irrep pair as CSV.
    Dims {
        /// so2 | o2 | cN | dN[:beta] | flip[:beta]
        #[arg(long)]
        group: String,
        /// Largest irrep frequency and largest |μ|.
        #[arg(long, default_value_t = 4)]
        max_freq: u32,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sample a steerable basis and write it as an STKT tensor plus a JSON sidecar.
    Basis {
        #[arg(long)]
        group: String,
        /// Comma list of triv | irrep:k | irrep:i,k | reg | quot:H | ind_so2:k
        #[arg(long)]
        rho_in: String,
        #[arg(long)]
        rho_out: String,
        #[arg(long, default_value_t = 5)]
        size: usize,
        /// default | uniform:SIGMA
        #[arg(long, default_value = "default")]
        profile: String,
        /// default | factor:F | rings:c0,c1,...
        #[arg(long, default_value = "default")]
        policy: String,
        #[arg(long)]
        output: PathBuf,
    },
    /// Write one PGM image per kernel entry of a basis element.
    Render {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long, default_value_t = 0)]
        element: usize,
        /// Images are written to {output}_{o}_{i}.pgm.
        #[arg(long)]
        output: PathBuf,
    },
    /// Run constraint, oracle and equivariance checks; exit 0 iff all pass.
    Check {
        #[arg(long)]
        group: String,
        #[arg(long)]
        rho_in: Option<String>,
        #[arg(long)]
        rho_out: Option<String>,
        /// Falls back to STEERKIT_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Dims { group, max_freq, output } => {
            cmd_dims(parse_group(&group)?, max_freq, output.as_deref())?;
        }
        Command::Basis {
            group,
            rho_in,
            rho_out,
            size,
            profile,
            policy,
            output,
        } => {
            let req = BasisRequest {
                group: parse_group(&group)?,
                rho_in: &rho_in,
                rho_out: &rho_out,
                size,
                profile: &profile,
                policy: &policy,
            };
            cmd_basis(&req, &output)?;
        }
        Command::Render { basis, element, output } => {
            let mut out = std::io::stdout().lock();
            for p in cmd_render(&basis, element, &output)? {
                writeln!(out, "{}", p.display())?;
            }
        }
        Command::Check {
            group,
            rho_in,
            rho_out,
            seed,
        } => {
            let g = parse_group(&group)?;
            let seed = resolve_seed(seed)?;
            let (di, dout) = default_check_reps(g);
            let lines = run_checks(g, rho_in.as_deref().unwrap_or(di), rho_out.as_deref().unwrap_or(dout), seed)?;
            let mut out = std::io::stdout().lock();
            for l in &lines {
                writeln!(out, "{l}")?;
            }
            return Ok(lines.iter().all(|l| l.passed()));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
