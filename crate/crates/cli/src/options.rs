use std::fs;
use std::path::PathBuf;

use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use trafficflow::dynamics::Velocity;
use trafficflow::{Boundary, Density};

use crate::Failure;

#[derive(Parser, Debug)]
#[command(name = "trafficflow", version, about = "Lattice traffic-flow experiments with CSV output")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Measured against predicted flux over a density grid.
    #[command(args_override_self = true)]
    FundamentalDiagram(FundamentalDiagramArgs),
    /// Predicted against simulated life-times for every minimal word.
    #[command(args_override_self = true)]
    Lifetime(LifetimeArgs),
    /// Distance to the free / hole-free attractor along Bernoulli trajectories.
    #[command(args_override_self = true)]
    Converge(ConvergeArgs),
    /// Trajectory of a passive tracer.
    #[command(args_override_self = true)]
    Tracer(TracerArgs),
    /// Exact cylinder probabilities after pushing a Bernoulli measure forward.
    #[command(args_override_self = true)]
    Pushforward(PushforwardArgs),
    /// Sawtooth split of a multilane configuration into binary lanes.
    #[command(args_override_self = true)]
    Redirect(RedirectArgs),
    /// Configuration after every step.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::FundamentalDiagram(a) => &a.common,
            Command::Lifetime(a) => &a.common,
            Command::Converge(a) => &a.common,
            Command::Tracer(a) => &a.common,
            Command::Pushforward(a) => &a.common,
            Command::Redirect(a) => &a.common,
            Command::Simulate(a) => &a.common,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Maximal velocity (a positive integer, or `inf` where supported).
    #[arg(long, value_parser = parse_velocity)]
    pub v: Option<Velocity>,
    #[arg(long)]
    pub lanes: Option<u32>,
    #[arg(long)]
    pub length: Option<usize>,
    /// Density as a decimal (`0.3`) or fraction (`3/10`).
    #[arg(long, value_parser = parse_rational)]
    pub density: Option<Density>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `ring` or `padded:LEFT:RIGHT`.
    #[arg(long, value_parser = parse_boundary)]
    pub boundary: Option<Boundary>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// File of `key = value` lines supplying defaults for the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FundamentalDiagramArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated velocities; defaults to `--v`.
    #[arg(long, value_delimiter = ',')]
    pub v_list: Vec<u32>,
    /// Comma-separated lane counts; defaults to `--lanes`.
    #[arg(long, value_delimiter = ',')]
    pub lanes_list: Vec<u32>,
    /// Comma-separated site densities in `[0, M]`; overrides the even grid.
    #[arg(long, value_delimiter = ',', value_parser = parse_rational)]
    pub densities: Vec<Density>,
    /// Points of the even density grid from 0 to M.
    #[arg(long, default_value_t = 25)]
    pub points: usize,
}

#[derive(Args, Debug)]
pub struct LifetimeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Largest half-length of the enumerated minimal words.
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of seeded samples.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// Report every this many steps.
    #[arg(long, default_value_t = 50)]
    pub every: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Along,
    Against,
}

#[derive(Args, Debug)]
pub struct TracerArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = DirectionArg::Along)]
    pub direction: DirectionArg,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub start: isize,
    /// Flow steps before the tracer starts; defaults to twice the length.
    #[arg(long)]
    pub warmup: Option<usize>,
    /// Initial ring as a digit string; sampled from `--density` otherwise.
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub every: usize,
}

#[derive(Args, Debug)]
pub struct PushforwardArgs {
    #[command(flatten)]
    pub common: Common,
    /// Target word such as `11`; every word of length `--k` when absent.
    #[arg(long)]
    pub word: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
}

#[derive(Args, Debug)]
pub struct RedirectArgs {
    #[command(flatten)]
    pub common: Common,
    /// Configuration as digits (`0210`) or comma-separated values.
    #[arg(long)]
    pub initial: String,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub anchor: isize,
    /// Emit one `site,slot,lane` row per particle (anchor 0) instead of the lanes.
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true", action = ArgAction::Set)]
    pub assignments: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Configuration as digits or comma-separated values; sampled from `--density` otherwise.
    #[arg(long)]
    pub initial: Option<String>,
}

fn parse_velocity(text: &str) -> Result<Velocity, String> {
    match text {
        "inf" | "infinite" => Ok(Velocity::Infinite),
        _ => match text.parse::<u32>() {
            Ok(0) | Err(_) => Err(format!("expected a positive integer or `inf`, got {text:?}")),
            Ok(v) => Ok(Velocity::Finite(v)),
        },
    }
}

/// Exact value of `a/b`, an integer, or a finite decimal.
pub fn parse_rational(text: &str) -> Result<Density, String> {
    let bad = || format!("expected a fraction or decimal, got {text:?}");
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Density::new(num, den));
    }
    let (whole, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let negative = whole.starts_with('-');
    let whole: i64 = match whole.trim_start_matches('-') {
        "" if !frac.is_empty() => 0,
        w => w.parse().map_err(|_| bad())?,
    };
    let scale = 10i64.pow(frac.len() as u32);
    let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let value = Density::new(whole * scale + frac, scale);
    Ok(if negative { -value } else { value })
}

fn parse_boundary(text: &str) -> Result<Boundary, String> {
    if text == "ring" {
        return Ok(Boundary::Ring);
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["padded", left, right] => {
            let left = left.parse().map_err(|_| format!("bad left fill in {text:?}"))?;
            let right = right.parse().map_err(|_| format!("bad right fill in {text:?}"))?;
            Ok(Boundary::Padded { left, right })
        }
        _ => Err(format!("expected `ring` or `padded:LEFT:RIGHT`, got {text:?}")),
    }
}

fn clap_failure(e: clap::Error) -> Failure {
    if e.use_stderr() {
        Failure::Usage(e.render().to_string())
    } else {
        Failure::Info(e.render().to_string())
    }
}

/// Path given by the last `--config` flag, if any.
fn config_path(args: &[String]) -> Option<PathBuf> {
    let mut found = None;
    let mut rest = args.iter();
    while let Some(arg) = rest.next() {
        if arg == "--config" {
            found = rest.next().map(PathBuf::from);
        } else if let Some(value) = arg.strip_prefix("--config=") {
            found = Some(PathBuf::from(value));
        }
    }
    found
}

/// Parses the command line with the config file's settings placed before the explicit flags,
/// so that the flags win.
pub fn parse(argv: &[String]) -> Result<Cli, Failure> {
    let command = Cli::command();
    let located = argv
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(at, a)| command.find_subcommand(a).map(|sub| (at, sub)));
    let Some((at, sub)) = located else {
        return Cli::try_parse_from(argv).map_err(clap_failure);
    };
    let Some(path) = config_path(&argv[at + 1..]) else {
        return Cli::try_parse_from(argv).map_err(clap_failure);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let known: Vec<&str> = sub
        .get_arguments()
        .filter_map(|a| a.get_long())
        .filter(|&l| !matches!(l, "config" | "help" | "version"))
        .collect();
    let mut from_file = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("{}:{}: expected key = value", path.display(), number + 1)))?;
        let key = key.trim();
        if !known.contains(&key) {
            return Err(Failure::Usage(format!("{}:{}: unknown key {key:?}", path.display(), number + 1)));
        }
        from_file.push(format!("--{key}={}", value.trim()));
    }
    let merged: Vec<String> = argv[..=at].iter().cloned().chain(from_file).chain(argv[at + 1..].iter().cloned()).collect();
    Cli::try_parse_from(merged).map_err(clap_failure)
}
