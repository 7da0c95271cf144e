use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use su_witness::report::{run, Command, Format, RawConfig};

#[derive(Parser)]
#[command(
    name = "su-witness",
    version,
    about = "Two-mode separability witnesses from su(2)/su(1,1) uncertainty relations"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Commutator, partial-transpose, rotation and beamsplitter checks.
    Verify(Opts),
    /// Exact witness values for one state.
    Witness(Opts),
    /// Sweep the two-photon family over theta.
    Scan(Opts),
    /// Phase-invariance of w14 over a phi grid.
    Invariance(Opts),
    /// Finite-shot simulation of the measurement protocol.
    Simulate(Opts),
}

#[derive(Args, Default)]
struct Opts {
    /// TOML file with flat keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    cutoff_a: Option<usize>,
    #[arg(long)]
    cutoff_b: Option<usize>,
    #[arg(long)]
    guard: Option<usize>,
    #[arg(long)]
    guard_tol: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    z_threshold: Option<f64>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n_a: Option<usize>,
    #[arg(long)]
    n_b: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Comma-separated phases for `invariance`.
    #[arg(long, value_delimiter = ',', num_args = 0.., allow_hyphen_values = true)]
    phi_grid: Option<Vec<f64>>,
    /// Comma-separated angles for `scan`.
    #[arg(long, value_delimiter = ',', num_args = 0.., allow_hyphen_values = true)]
    theta_grid: Option<Vec<f64>>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

impl Opts {
    fn into_config(self) -> su_witness::Result<RawConfig> {
        let base = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        let format = self.format.as_deref().map(str::parse::<Format>).transpose()?;
        let flags = RawConfig {
            cutoff_a: self.cutoff_a,
            cutoff_b: self.cutoff_b,
            guard: self.guard,
            guard_tol: self.guard_tol,
            tol: self.tol,
            z_threshold: self.z_threshold,
            family: self.family,
            theta: self.theta,
            r: self.r,
            n: self.n,
            n_a: self.n_a,
            n_b: self.n_b,
            alpha: self.alpha,
            beta: self.beta,
            components: None,
            phi_grid: self.phi_grid,
            theta_grid: self.theta_grid,
            shots: self.shots,
            seed: self.seed,
            out: self.out,
            format,
        };
        Ok(base.overlay(flags))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match cli.command {
        Cmd::Verify(o) => (Command::Verify, o),
        Cmd::Witness(o) => (Command::Witness, o),
        Cmd::Scan(o) => (Command::Scan, o),
        Cmd::Invariance(o) => (Command::Invariance, o),
        Cmd::Simulate(o) => (Command::Simulate, o),
    };
    let config = match opts.into_config().and_then(RawConfig::resolve) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    if let Err(e) = config.check_output() {
        return usage_error(&e);
    }
    let output = match run(command, &config) {
        Ok(o) => o,
        Err(e) => return usage_error(&e),
    };
    match &config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &output.text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", output.text),
    }
    ExitCode::from(output.status.code() as u8)
}

fn usage_error(e: &su_witness::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}
