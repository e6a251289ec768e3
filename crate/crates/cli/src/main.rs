mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{AssessArgs, Format, Pipeline, RationalArgs};

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Domain(String),
    Internal(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<wvctx::error::Error> for CliError {
    fn from(e: wvctx::error::Error) -> Self {
        use wvctx::error::Error as E;
        match e {
            E::InvalidInput(_) | E::DimensionMismatch(..) => CliError::Input(e.to_string()),
            E::Domain(_) => CliError::Domain(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "wvctx", version, about = "Weak-value statistics, noncontextuality bounds and ontological models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a measurement scheme (or sweep) and evaluate its bounds.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Smallest postselection sharpness C_S that certifies a violation.
    Assess {
        #[arg(long)]
        pminus: f64,
        #[arg(long)]
        pf: f64,
        #[arg(long)]
        pd: f64,
        #[arg(long, default_value_t = 0.5)]
        qstar: f64,
        #[arg(long)]
        ptilde: Option<f64>,
        /// Pointer-response strength; sets p_tilde = (1 + pm)/2.
        #[arg(long)]
        pm: Option<f64>,
    },
    /// Build and audit the classical models for a Gaussian-position config.
    Models {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact vertex and facet enumeration for a template inequality.
    Polytope {
        #[arg(long, value_enum)]
        pipeline: Pipeline,
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum allowed p_- over a (p_F, C_S) grid, as CSV.
    Tradeoff {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, default_value_t = 10)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Rationals as "a/b" or exact decimals.
#[derive(clap::Args)]
struct ParamFlags {
    #[arg(long)]
    pd: String,
    #[arg(long)]
    ptilde: Option<String>,
    #[arg(long)]
    q0: Option<String>,
    #[arg(long)]
    qstar: Option<String>,
}

impl From<ParamFlags> for RationalArgs {
    fn from(f: ParamFlags) -> Self {
        RationalArgs {
            p_d: f.pd,
            p_tilde: f.ptilde,
            q_0: f.q0,
            q_star: f.qstar,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, out, format } => commands::simulate(&config, out.as_deref(), format),
        Command::Assess {
            pminus,
            pf,
            pd,
            qstar,
            ptilde,
            pm,
        } => commands::assess(&AssessArgs {
            p_minus: pminus,
            p_f: pf,
            p_d: pd,
            q_star: qstar,
            p_tilde: ptilde,
            p_m: pm,
        })
        .map(|_| ()),
        Command::Models { config, out } => commands::models(&config, out.as_deref()).map(|_| ()),
        Command::Polytope { pipeline, params, out } => {
            commands::polytope(pipeline, &params.into(), out.as_deref()).map(|_| ())
        }
        Command::Tradeoff { params, grid, out } => commands::tradeoff(&params.into(), grid, out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wvctx: {e}");
            ExitCode::from(e.code())
        }
    }
}
