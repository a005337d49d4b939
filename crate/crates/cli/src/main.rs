//! `spectral-atlas`: compute, classify, and render the spectra of
//! non-self-adjoint quasi-periodic operators.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical-quality failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod cases;
mod commands;
mod config;
mod render;

use config::CliError;

#[derive(Parser)]
#[command(
    name = "spectral-atlas",
    version,
    about = "Spectra of non-self-adjoint quasi-periodic operators",
    disable_help_subcommand = true
)]
struct Cli {
    /// Worker threads (default: SPECTRAL_ATLAS_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continued-fraction machinery.
    Freq {
        #[command(subcommand)]
        cmd: FreqCmd,
    },
    /// Evaluate the logarithmic potential G.
    Gd {
        #[command(subcommand)]
        cmd: GdCmd,
    },
    /// Classify and extract spectral sets.
    Spectrum {
        #[command(subcommand)]
        cmd: SpectrumCmd,
    },
    /// Operator-level probes: Floquet clouds, Weyl residuals, truncations.
    Op {
        #[command(subcommand)]
        cmd: OpCmd,
    },
    /// Closed-form reference spectra.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Reproduce a solved-model figure.
    Gallery(GalleryArgs),
}

#[derive(Subcommand)]
enum FreqCmd {
    /// Expand a frequency into partial quotients and convergents.
    Expand {
        /// Frequency: literal in (0,1), `golden`, `silver`, or
        /// `liouville:<gamma>:<depth>`.
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 30)]
        terms: usize,
        /// Stop once a convergent denominator would exceed this.
        #[arg(long, default_value_t = 1_000_000_000_000)]
        q_cap: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GdCmd {
    /// G(z) at one point.
    Eval {
        #[arg(long)]
        potential: PathBuf,
        /// Evaluation point as "x,y".
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// jensen | quad | iterated (default: pick by representation).
        #[arg(long)]
        method: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SpectrumCmd {
    /// Rasterize, trace, and render S_λ over a box.
    Atlas {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long)]
        lambda: f64,
        /// Box as "x0,y0,x1,y1".
        #[arg(long = "box", allow_hyphen_values = true)]
        box_spec: String,
        #[arg(long, default_value_t = 201)]
        res: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum OpCmd {
    /// Dual Floquet root cloud at a rational frequency.
    Floquet {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long)]
        lambda: f64,
        /// Rational frequency "p/q" (comma-separated per coordinate for d = 2).
        #[arg(long)]
        freq: String,
        #[arg(long = "theta-grid", default_value_t = 16)]
        theta_grid: usize,
        #[arg(long = "phi-grid", default_value_t = 32)]
        phi_grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weyl-sequence residual ladder at a point.
    Weyl {
        #[arg(long)]
        potential: PathBuf,
        /// Point as "x,y".
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        lambda: f64,
        /// Frequency (literal, golden, silver, liouville:g:d).
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 100_000)]
        nmax: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues of a Dirichlet finite section.
    Truncate {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// primal | dual.
        #[arg(long, default_value = "dual")]
        model: String,
        /// Index window "start:end".
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Sample random points and compare classifier vs closed form.
    Check {
        /// Case tag: app2, two6, app3, two5, pwl, hn1d, hn2d.
        #[arg(long)]
        case: String,
        #[arg(long)]
        lambda: f64,
        /// Hopping asymmetry for the hn cases.
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Width of the boundary tube excluded from strict comparison.
        #[arg(long, default_value_t = 0.05)]
        tube: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GalleryArgs {
    /// Case tag: app2, two6, app3, two5, pwl, hn1d, hn2d.
    #[arg(long)]
    case: String,
    #[arg(long)]
    lambda: f64,
    /// Hopping asymmetry for the hn cases.
    #[arg(long, default_value_t = 1.0)]
    g: f64,
    #[arg(long, default_value_t = 201)]
    res: usize,
    /// Output directory (default: gallery-<case>/).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_threads(flag: Option<usize>) -> Result<(), CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("SPECTRAL_ATLAS_THREADS") {
            Ok(v) => Some(v.parse::<usize>().map_err(|_| {
                CliError::Usage(format!("SPECTRAL_ATLAS_THREADS={v} is not a thread count"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads(cli.threads)?;
    match cli.command {
        Command::Freq { cmd } => match cmd {
            FreqCmd::Expand {
                alpha,
                terms,
                q_cap,
                out,
            } => commands::freq_expand(&alpha, terms, q_cap, out.as_deref()),
        },
        Command::Gd { cmd } => match cmd {
            GdCmd::Eval {
                potential,
                z,
                method,
                eps,
                out,
            } => commands::gd_eval(&potential, &z, method.as_deref(), eps, out.as_deref()),
        },
        Command::Spectrum { cmd } => match cmd {
            SpectrumCmd::Atlas {
                potential,
                lambda,
                box_spec,
                res,
                out,
            } => commands::spectrum_atlas(&potential, lambda, &box_spec, res, &out),
        },
        Command::Op { cmd } => match cmd {
            OpCmd::Floquet {
                potential,
                lambda,
                freq,
                theta_grid,
                phi_grid,
                out,
            } => commands::op_floquet(&potential, lambda, &freq, theta_grid, phi_grid, out.as_deref()),
            OpCmd::Weyl {
                potential,
                z,
                lambda,
                alpha,
                theta,
                nmax,
                out,
            } => commands::op_weyl(&potential, &z, lambda, &alpha, theta, nmax, out.as_deref()),
            OpCmd::Truncate {
                potential,
                lambda,
                alpha,
                theta,
                model,
                range,
                out,
            } => commands::op_truncate(
                &potential,
                lambda,
                &alpha,
                theta,
                &model,
                &range,
                out.as_deref(),
            ),
        },
        Command::Oracle { cmd } => match cmd {
            OracleCmd::Check {
                case,
                lambda,
                g,
                samples,
                seed,
                tube,
                out,
            } => commands::oracle_check(&case, lambda, g, samples, seed, tube, out.as_deref()),
        },
        Command::Gallery(args) => {
            commands::gallery(&args.case, args.lambda, args.g, args.res, args.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are not errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
