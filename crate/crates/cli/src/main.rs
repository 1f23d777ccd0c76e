use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fredholm_cli::commands::{self, Format, Output};
use fredholm_cli::parse::{parse_complex, parse_region};
use fredholm_cli::verify::Suite;
use fredholm_cli::{CliError, Result};
use fredholm_core::zeros::{Region, DEFAULT_TOL};
use num_complex::Complex64;

#[derive(Parser, Debug)]
#[command(name = "fredholm", version, about = "Certified numerics for f(z) = z + z^2 + z^4 + z^8 + ...")]
struct Cli {
    /// Top index N of the partial sum sum_{n=0}^{N} z^(2^n).
    #[arg(long, global = true, default_value_t = 13)]
    terms: usize,

    /// Newton tolerance for zero refinement.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,

    /// Search region: disk:cx,cy,r or rect:x0,y0,x1,y1.
    #[arg(long, global = true, default_value = "disk:0,0,0.996", value_parser = region_arg)]
    region: Region,

    /// Ramanujan parameter a (k = 2^a, q = 3^k).
    #[arg(long, global = true, default_value_t = 2)]
    a: u32,

    /// Worker threads.
    #[arg(long, global = true, env = "FREDHOLM_THREADS")]
    threads: Option<usize>,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named suite of checks; exit 1 if any fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Certified zero table of f in the region.
    Zeros,
    /// Zeroes of the partial sum in the unit disk as theta,rho,rho_rescaled CSV.
    Figure {
        /// Also write a scatter plot here.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Certified point near z = 1 where f takes the value v.
    Attain {
        /// Complex value such as 2+3i or -5i.
        #[arg(allow_hyphen_values = true, value_parser = complex_arg)]
        v: Complex64,
    },
    /// Enclosures of c_m, c(m), sigma_m, sigma(m) for |m| <= m_max.
    Constants {
        #[arg(long, default_value_t = 16)]
        m_max: u32,
    },
    /// Moments and large-value measure of s_n(theta) = sum_{m<n} e(2^m theta).
    Moments {
        #[arg(long, default_value_t = 8)]
        n: u32,
        #[arg(long, default_value_t = 1 << 16)]
        grid: usize,
    },
}

fn region_arg(s: &str) -> std::result::Result<Region, String> {
    parse_region(s).map_err(|e| e.to_string())
}

fn complex_arg(s: &str) -> std::result::Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let output: Output = match cli.command {
        Command::Verify { suite } => commands::verify(suite)?,
        Command::Zeros => commands::zeros(&cli.region, cli.terms, cli.tol, cli.format)?.0,
        Command::Figure { svg } => {
            let fig = commands::figure(cli.terms)?;
            if let Some(path) = svg {
                write_file(&path, &fig.svg)?;
            }
            fig.csv
        }
        Command::Attain { v } => commands::attain_cmd(v, cli.a)?.0,
        Command::Constants { m_max } => commands::constants(m_max)?,
        Command::Moments { n, grid } => commands::moments(n, grid)?,
    };
    emit(&cli.out, &output.text)?;
    for note in &output.notes {
        eprintln!("{note}");
    }
    Ok(output.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
