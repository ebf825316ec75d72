use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use expsum::cli::{
    phi_map_csv, reproduce, run_fit, write_text, CliError, FitOptions, GridRange, MapKind,
    PhiMapOptions, SignalSource,
};
use expsum::conjecture::{explore_conjecture, PairGrid};

#[derive(Parser)]
#[command(name = "expsum", version, about = "Approximate functions on [-pi, pi] by sums of complex exponentials")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the sign-function reference values; exit 1 on any miss.
    Reproduce {
        /// Offset added to the computed v0 (negative-control hook).
        #[arg(long, default_value_t = 0.0, hide = true, allow_negative_numbers = true)]
        perturb: f64,
    },
    /// Search for the best n frequencies and write a report.
    Fit {
        /// `sign` or `csv:PATH` (header `x,f_re,f_im`).
        #[arg(long, default_value = "sign")]
        signal: SignalSource,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 32)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report file (TOML); printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the objective on a (u, v) grid and write `u,v,phi` rows.
    PhiMap {
        #[arg(long, default_value = "sign")]
        signal: SignalSource,
        /// `1` for one frequency, `2cluster` for the double cluster {λ, λ}.
        #[arg(long, default_value = "1")]
        n: MapKind,
        /// MIN:MAX:STEPS
        #[arg(long, allow_hyphen_values = true)]
        u: GridRange,
        /// MIN:MAX:STEPS
        #[arg(long, allow_hyphen_values = true)]
        v: GridRange,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan two-frequency pairs near the double cluster at the origin.
    Explore {
        #[arg(long, default_value = "-1:1:21", allow_hyphen_values = true)]
        u: GridRange,
        #[arg(long, default_value = "-2:2:21", allow_hyphen_values = true)]
        v: GridRange,
    },
}

fn run(args: Args) -> Result<i32, CliError> {
    match args.command {
        Command::Reproduce { perturb } => {
            let table = reproduce(perturb)?;
            println!("{table}");
            Ok(table.exit_code())
        }
        Command::Fit {
            signal,
            n,
            starts,
            seed,
            out,
        } => {
            let report = run_fit(&FitOptions {
                signal,
                n,
                starts,
                seed,
            })?;
            let text = report.to_toml();
            match out {
                Some(path) => write_text(&path, &text)?,
                None => print!("{text}"),
            }
            println!("f_min = {:.10}", report.f_min);
            Ok(0)
        }
        Command::PhiMap {
            signal,
            n,
            u,
            v,
            out,
        } => {
            let csv = phi_map_csv(&PhiMapOptions {
                signal,
                kind: n,
                u,
                v,
            })?;
            match out {
                Some(path) => write_text(&path, &csv)?,
                None => print!("{csv}"),
            }
            Ok(0)
        }
        Command::Explore { u, v } => {
            let summary = explore_conjecture(&PairGrid {
                u_range: (u.min, u.max),
                v_range: (v.min, v.max),
                u_steps: u.steps,
                v_steps: v.steps,
            })?;
            print!("{}", summary.report());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code().clamp(0, 255) as u8)
        }
    }
}
