use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use movewin::{Coupling, SimConfig};

mod commands;

/// Moving-window Fourier spectral solver for `i u_t + Δu = V u`.
#[derive(Debug, Parser)]
#[command(name = "movewin", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve one configuration and write snapshots and logs.
    Run(RunArgs),
    /// Spatial convergence sweep with L = sqrt(N).
    ConvSpace(SpaceArgs),
    /// Temporal convergence sweep.
    ConvTime(TimeArgs),
    /// Compare a small window with extension against a large fixed window.
    ExtendDemo(DemoArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Debug, Args)]
struct SpaceArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Comma-separated polynomial degrees, e.g. 128,256,512.
    #[arg(long, value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    #[command(flatten)]
    reference: ReferenceArgs,
}

#[derive(Debug, Args)]
struct TimeArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Comma-separated step sizes, e.g. 0.0625,0.03125,0.015625.
    #[arg(long, value_delimiter = ',', required = true)]
    taus: Vec<f64>,
    #[arg(long, value_enum, default_value_t = CouplingArg::FixedN)]
    coupling: CouplingArg,
    #[command(flatten)]
    reference: ReferenceArgs,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Half-width of the fixed comparison window (default 2 L).
    #[arg(long)]
    large_half_width: Option<f64>,
    /// Degree of the comparison run (default N scaled with the window).
    #[arg(long)]
    large_modes: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CouplingArg {
    FixedN,
    InverseTau,
}

impl From<CouplingArg> for Coupling {
    fn from(c: CouplingArg) -> Self {
        match c {
            CouplingArg::FixedN => Coupling::FixedN,
            CouplingArg::InverseTau => Coupling::InverseTau,
        }
    }
}

/// Reference resolution for a sweep. Without any of these flags the exact
/// solution is used when one is known, otherwise the smallest resolution
/// that passes the sweep's guards.
#[derive(Debug, Args)]
struct ReferenceArgs {
    #[arg(long)]
    ref_half_width: Option<f64>,
    #[arg(long)]
    ref_modes: Option<usize>,
    #[arg(long)]
    ref_tau: Option<f64>,
}

impl ReferenceArgs {
    fn any(&self) -> bool {
        self.ref_half_width.is_some() || self.ref_modes.is_some() || self.ref_tau.is_some()
    }
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// JSON configuration file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    half_width: Option<f64>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    /// zero, tunnel-bump, lattice or csv:<path>.
    #[arg(long)]
    potential: Option<String>,
    /// free-gaussian, tunnel-I, tunnel-II-H1, tunnel-III-H2, scatter-I, scatter-II-H2 or csv:<path>.
    #[arg(long)]
    initial: Option<String>,
    #[arg(long)]
    plateau_fraction: Option<f64>,
    #[arg(long)]
    extend_eps: Option<f64>,
    #[arg(long)]
    no_extend: bool,
    #[arg(long, overrides_with = "no_dealias")]
    dealias: bool,
    #[arg(long, overrides_with = "dealias")]
    no_dealias: bool,
    #[arg(long)]
    snapshot_every: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn resolve(&self) -> anyhow::Result<SimConfig> {
        let mut c = match &self.config {
            Some(p) => SimConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
            None => SimConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field {
                    c.$field = v.clone();
                })*
            };
        }
        set!(dim, half_width, modes, tau, tmax, potential, initial, plateau_fraction, extend_eps, snapshot_every, out, seed);
        if self.no_extend {
            c.extend = false;
        }
        if self.dealias {
            c.dealias = true;
        }
        if self.no_dealias {
            c.dealias = false;
        }
        c.validate()?;
        Ok(c)
    }
}

/// Process exit status for each failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Config = 2,
    NonFinite = 3,
    PartialSweep = 4,
    Other = 1,
}

fn classify(err: &anyhow::Error) -> Failure {
    use movewin::Error;
    if let Some(commands::PartialSweep) = err.downcast_ref() {
        return Failure::PartialSweep;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::NonFinite { .. }) => Failure::NonFinite,
        Some(
            Error::Dimension(_)
            | Error::InvalidParameter { .. }
            | Error::UnknownId { .. }
            | Error::Reference(_)
            | Error::Json(_),
        ) => Failure::Config,
        _ if err.chain().any(|e| e.downcast_ref::<serde_json::Error>().is_some()) => Failure::Config,
        _ => Failure::Other,
    }
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("MOVEWIN_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("MOVEWIN_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = init_threads().map_err(|e| (Failure::Config, e)).and_then(|()| {
        match &cli.command {
            Command::Run(a) => a.config.resolve().map_err(|e| (Failure::Config, e)).and_then(|c| {
                commands::run(&c).map_err(|e| (classify(&e), e))
            }),
            Command::ConvSpace(a) => a.config.resolve().map_err(|e| (Failure::Config, e)).and_then(|c| {
                commands::conv_space(&c, &a.ns, &a.reference).map_err(|e| (classify(&e), e))
            }),
            Command::ConvTime(a) => a.config.resolve().map_err(|e| (Failure::Config, e)).and_then(|c| {
                commands::conv_time(&c, &a.taus, a.coupling.into(), &a.reference)
                    .map_err(|e| (classify(&e), e))
            }),
            Command::ExtendDemo(a) => a.config.resolve().map_err(|e| (Failure::Config, e)).and_then(|c| {
                commands::extend_demo(&c, a.large_half_width, a.large_modes).map_err(|e| (classify(&e), e))
            }),
        }
    });
    match result {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err((code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code as u8)
        }
    }
}
