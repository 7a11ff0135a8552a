use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slowlight_cli::commands::{self, GridOverrides, Options, Outcome};
use slowlight_cli::{CliError, Result};

#[derive(Parser)]
#[command(name = "slowlight", version, about = "Slow-light soliton on a switched control field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the exact solution on a grid and export it.
    Analytic(Shared),
    /// Integrate the Maxwell-Bloch equations from the exact boundary data.
    Simulate(Shared),
    /// Run the numerical self-checks; exits 2 if any check fails.
    Verify(Shared),
    /// Track the peak of an observable and fit its velocity.
    Track(Shared),
    /// Special-function spot checks.
    Bessel(Shared),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct Shared {
    /// key = value configuration file; missing keys take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_step: Option<f64>,
    #[arg(long)]
    zeta_max: Option<f64>,
    #[arg(long)]
    zeta_step: Option<f64>,
    /// fields, rho22 or rho33.
    #[arg(long, default_value = "fields")]
    observable: String,
    /// fig1, fig2 or fig3; all three when omitted.
    #[arg(long)]
    figure: Option<String>,
    /// Track the integrator output instead of the exact solution.
    #[arg(long)]
    numeric: bool,
}

impl Shared {
    fn options(self) -> Result<Options> {
        Ok(Options {
            config: self.config,
            out: self.out,
            grid: GridOverrides {
                tau_min: self.tau_min,
                tau_max: self.tau_max,
                tau_step: self.tau_step,
                zeta_max: self.zeta_max,
                zeta_step: self.zeta_step,
            },
            observable: self.observable.parse()?,
            figure: self.figure.as_deref().map(str::parse).transpose()?,
            numeric: self.numeric,
        })
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Analytic(a) => commands::run_analytic(&a.options()?),
        Command::Simulate(a) => commands::run_simulate(&a.options()?),
        Command::Verify(a) => commands::run_verify(&a.options()?),
        Command::Track(a) => commands::run_track(&a.options()?),
        Command::Bessel(a) => commands::run_bessel(&a.options()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(CliError::Usage(String::new()).exit_code())
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("{w}");
            }
            print!("{}", outcome.report.render());
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            if outcome.report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
