use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use resowave_cli::{run, Case, Command, RunConfig};

#[derive(Parser)]
#[command(name = "resowave", version, about = "Bifurcation profiles, certificates and Galerkin checks")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Sub {
    /// Closed-form zeroth-order profiles.
    Profile,
    /// Non-degeneracy certificates.
    Certify {
        /// profile.json from a previous run; computed from the config otherwise.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Galerkin Newton solutions against the closed forms.
    Oracle {
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Large-n development of the rescaled functional.
    Develop,
    /// Zeroth-order bifurcation solve followed by the range equation at `delta`.
    Range,
    /// Monte Carlo small-divisor sweep over `(0, delta_max)` and its halvings.
    Sweep,
}

#[derive(Args)]
struct Overrides {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    case: Option<Case>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    a2: Option<f64>,
    #[arg(long = "a3-mean", global = true, allow_negative_numbers = true)]
    a3_mean: Option<f64>,
    /// Two-column `x a3(x)` samples on [0, π].
    #[arg(long = "a3-file", global = true)]
    a3_file: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    a4: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    a5: Option<f64>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[arg(long = "s-star", global = true, allow_negative_numbers = true)]
    s_star: Option<i8>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long = "delta-max", global = true)]
    delta_max: Option<f64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    threshold: Option<f64>,
    #[arg(long, global = true)]
    modes: Option<usize>,
    #[arg(long = "base-modes", global = true)]
    base_modes: Option<usize>,
    #[arg(long = "eta-modes", global = true)]
    eta_modes: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long = "l-max", global = true)]
    l_max: Option<usize>,
    #[arg(long = "j-max", global = true)]
    j_max: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    ns: Option<Vec<usize>>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "out-dir", global = true, env = "RESOWAVE_OUT_DIR")]
    out_dir: Option<PathBuf>,
}

macro_rules! apply {
    ($cfg:expr, $o:expr, $($field:ident => $target:expr),* $(,)?) => {
        $(if let Some(v) = $o.$field.clone() { $target = v.into(); })*
    };
}

fn build_config(o: &Overrides) -> Result<RunConfig, resowave_cli::CliError> {
    let mut cfg = match &o.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    apply!(cfg, o,
        case => cfg.case,
        a2 => cfg.a2,
        a3_mean => cfg.a3_mean,
        a4 => cfg.a4,
        a5 => cfg.a5,
        delta => cfg.delta,
        delta_max => cfg.sweep.delta_max,
        samples => cfg.sweep.samples,
        threshold => cfg.sweep.threshold,
        modes => cfg.truncation.modes,
        base_modes => cfg.truncation.base_modes,
        eta_modes => cfg.truncation.eta_modes,
        n => cfg.truncation.n,
        l_max => cfg.truncation.l_max,
        j_max => cfg.truncation.j_max,
        ns => cfg.truncation.ns,
        seed => cfg.seed,
        out_dir => cfg.out_dir,
    );
    if o.a3_file.is_some() {
        cfg.a3_file = o.a3_file.clone();
    }
    if o.lambda.is_some() {
        cfg.lambda = o.lambda;
    }
    if o.s_star.is_some() {
        cfg.s_star = o.s_star;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (cmd, file) = match &cli.command {
        Sub::Profile => (Command::Profile, None),
        Sub::Certify { profile } => (Command::Certify, profile.as_deref()),
        Sub::Oracle { profile } => (Command::Oracle, profile.as_deref()),
        Sub::Develop => (Command::Develop, None),
        Sub::Range => (Command::Range, None),
        Sub::Sweep => (Command::Sweep, None),
    };
    ExitCode::from(run(&cfg, cmd, file) as u8)
}
