use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use unitality::cli::{
    cmd_check, cmd_demon, cmd_swap, cmd_sweep, CheckRequest, OutputFormat, EXIT_USAGE,
};
use unitality::sampler::EnvMode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EnvModeArg {
    Pure,
    Mixed,
    Maxmixed,
}

impl From<EnvModeArg> for EnvMode {
    fn from(m: EnvModeArg) -> Self {
        match m {
            EnvModeArg::Pure => EnvMode::Pure,
            EnvModeArg::Mixed => EnvMode::Mixed,
            EnvModeArg::Maxmixed => EnvMode::MaximallyMixed,
        }
    }
}

/// Quantum channel unitality analysis from bipartite dilations.
#[derive(Debug, Parser)]
#[command(name = "unitality", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the single-qubit Maxwell demon cycle and report its verdicts.
    Demon {
        /// Excited-state population after bath contact.
        #[arg(long = "rho-ee", default_value_t = 0.5)]
        rho_ee: f64,
        /// Bath temperature (k_B = 1).
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Display entropies in multiples of k_B ln 2 (text format only).
        #[arg(long = "kb-units", default_value_t = false)]
        kb_units: bool,
    },
    /// Run the two-qubit heating/cooling process and report its verdicts.
    Swap {
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Display entropies in multiples of k_B ln 2 (text format only).
        #[arg(long = "kb-units", default_value_t = false)]
        kb_units: bool,
    },
    /// Check unitality of a user-supplied dilation (JSON request file).
    Check {
        /// Path to a CheckRequest JSON file.
        request: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Overrides the request's verdict tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Random-dilation sweep cross-checking both defect methods and the
    /// entropy law for unital channels.
    Sweep {
        #[arg(long = "dim-sys", default_value_t = 2)]
        dim_sys: usize,
        #[arg(long = "dim-env", default_value_t = 2)]
        dim_env: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long = "env-mode", value_enum, default_value_t = EnvModeArg::Pure)]
        env_mode: EnvModeArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

fn run(cli: Cli) -> unitality::Result<(String, i32)> {
    match cli.command {
        Command::Demon {
            rho_ee,
            temperature,
            format,
            tol,
            kb_units,
        } => cmd_demon(rho_ee, temperature, tol, format.into(), kb_units),
        Command::Swap {
            format,
            tol,
            kb_units,
        } => cmd_swap(tol, format.into(), kb_units),
        Command::Check {
            request,
            format,
            tol,
        } => {
            let raw = fs::read_to_string(&request).map_err(|e| {
                unitality::Error::InvalidArgument(format!("cannot read {request}: {e}"))
            })?;
            let mut req: CheckRequest = serde_json::from_str(&raw).map_err(|e| {
                unitality::Error::InvalidArgument(format!("malformed JSON in {request}: {e}"))
            })?;
            if tol.is_some() {
                req.tol = tol;
            }
            cmd_check(&req, format.into())
        }
        Command::Sweep {
            dim_sys,
            dim_env,
            trials,
            env_mode,
            seed,
            format,
        } => cmd_sweep(dim_sys, dim_env, trials, env_mode.into(), seed, format.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((output, code)) => {
            use std::io::Write;
            // ignore broken pipes from downstream consumers like `head`
            let _ = writeln!(std::io::stdout(), "{output}");
            ExitCode::from(code as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
