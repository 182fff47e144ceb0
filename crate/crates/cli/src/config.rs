//! Flags, the `key=value` config file and the element cap.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "asz", version, about = "Zero statistics of Artin-Schreier L-functions", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Family averages of T^r with their closed forms.
    AvgTrace,
    /// Family averages of T^r T^{±s}.
    PairTrace,
    /// Normalised zeros of every L_{f,ψ} in a family (or of one --f).
    Zeros,
    /// One-level statistic of a Fejér window, zero side and Fourier side.
    WindowStat,
    /// Two-level statistic of a product Fejér window.
    TwoLevel,
    /// Haar-random U(N) / USp(N) moments.
    RmtBaseline,
    /// L_χ = (1 - z) L_{f,ψ} over a family.
    DirichletVerify,
    /// Odd-family averages against the Dirichlet formula.
    OddFamily,
    /// Decompose h as g1(x^p) g2(x^2) modulo x^D.
    Decompose,
    /// Irreducibles that are members without being even.
    ConjectureProbe,
    /// Distribution of the number of trace zeros over monic polynomials.
    PointDist,
}

pub const COMMAND_NAMES: [&str; 11] = [
    "avg-trace",
    "pair-trace",
    "zeros",
    "window-stat",
    "two-level",
    "rmt-baseline",
    "dirichlet-verify",
    "odd-family",
    "decompose",
    "conjecture-probe",
    "point-dist",
];

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::AvgTrace => "avg-trace",
            Command::PairTrace => "pair-trace",
            Command::Zeros => "zeros",
            Command::WindowStat => "window-stat",
            Command::TwoLevel => "two-level",
            Command::RmtBaseline => "rmt-baseline",
            Command::DirichletVerify => "dirichlet-verify",
            Command::OddFamily => "odd-family",
            Command::Decompose => "decompose",
            Command::ConjectureProbe => "conjecture-probe",
            Command::PointDist => "point-dist",
        }
    }
}

/// Every flag is optional here; commands say which ones they need.
#[derive(Debug, Clone, Default, Args, serde::Serialize)]
pub struct Opts {
    #[arg(long, global = true)]
    pub p: Option<u32>,
    #[arg(long, global = true)]
    pub n: Option<u32>,
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// A power, a list `1,3,5` or an inclusive range `1..8`.
    #[arg(long, global = true)]
    pub r: Option<String>,
    #[arg(long, global = true)]
    pub s: Option<String>,
    /// `+`, `-` or `both`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sign: Option<String>,
    /// Character index a of ψ_a; all characters when absent.
    #[arg(long, global = true)]
    pub psi: Option<u32>,
    /// full, odd or monic.
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// `fejer:a`, or `fejer:a1,a2` for two-level.
    #[arg(long, global = true)]
    pub window: Option<String>,
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub cap: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Assert the exact identities; a mismatch exits with status 2.
    #[arg(long, global = true)]
    pub check: bool,
    /// A polynomial as comma-separated coefficients, constant term first.
    #[arg(long, global = true)]
    pub f: Option<String>,
    #[arg(long, global = true)]
    pub h: Option<String>,
    /// Modulus degree for `decompose`.
    #[arg(long = "D", global = true)]
    pub modulus: Option<usize>,
    /// unitary or usp.
    #[arg(long, global = true)]
    pub ensemble: Option<String>,
    /// Matrix size N.
    #[arg(long, global = true)]
    pub size: Option<usize>,
    /// poisson, gaussian_fixed_p or gaussian_growing_p.
    #[arg(long, global = true)]
    pub regime: Option<String>,
    /// Keep only the g(x^p) factor when decomposing.
    #[arg(long, global = true)]
    pub power_only: bool,
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub const DEFAULT_OUT: &str = "asz-out";

/// Resolved settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub opts: Opts,
    pub cap: u64,
    pub jobs: usize,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let cap = match cli.opts.cap {
            Some(c) => c,
            None => env_cap()?,
        };
        if cap == 0 {
            return Err(CliError::Usage("--cap must be positive".into()));
        }
        let jobs = cli.opts.jobs.unwrap_or(0);
        let out = cli.opts.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        Ok(RunConfig { command: cli.command, opts: cli.opts, cap, jobs, out })
    }

    /// For tests and in-process runs.
    pub fn parse<I, T>(args: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString>,
    {
        let args = with_config_file(args.into_iter().map(Into::into).collect())?;
        let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
        Self::from_cli(cli)
    }
}

fn env_cap() -> Result<u64, CliError> {
    match std::env::var("ASZ_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("ASZ_CAP={v:?} is not a positive integer"))),
        Err(_) => Ok(asz::DEFAULT_CAP),
    }
}

/// Splices `--key value` pairs from the file named by `--config` in front of
/// the command-line flags; clap keeps the last occurrence, so flags win.
pub fn with_config_file(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let pos = args.iter().position(|a| a == "--config");
    let inline = args.iter().find_map(|a| a.to_str().and_then(|s| s.strip_prefix("--config=")).map(PathBuf::from));
    let path = match (pos, inline) {
        (Some(i), _) => match args.get(i + 1) {
            Some(p) => PathBuf::from(p),
            None => return Err(CliError::Usage("--config needs a path".into())),
        },
        (None, Some(p)) => p,
        (None, None) => return Ok(args),
    };
    let from_file = config_args(&path)?;
    // right after the program name, so anything the user typed comes later
    let mut out: Vec<OsString> = args[..1].to_vec();
    out.extend(from_file);
    out.extend(args[1..].iter().cloned());
    Ok(out)
}

pub fn config_args(path: &Path) -> Result<Vec<OsString>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "config" {
            return Err(CliError::Usage("config files cannot include other config files".into()));
        }
        match (key, value) {
            ("check" | "power_only" | "power-only", "true") => out.push(format!("--{}", key.replace('_', "-")).into()),
            ("check" | "power_only" | "power-only", "false") => {}
            _ => {
                out.push(format!("--{}", key.replace('_', "-")).into());
                out.push(value.into());
            }
        }
    }
    Ok(out)
}

/// Parses `3`, `1,3,5` or `1..8` (inclusive).
pub fn parse_powers(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("bad power list {s:?}"));
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo == 0 || hi < lo {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    let v: Vec<usize> = s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    if v.is_empty() || v.contains(&0) {
        return Err(bad());
    }
    Ok(v)
}

/// `fejer:a` or `fejer:a1,a2`.
pub fn parse_window(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("window must be fejer:a or fejer:a1,a2, got {s:?}"));
    let rest = s.trim().strip_prefix("fejer:").ok_or_else(bad)?;
    let parts: Vec<f64> =
        rest.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_, _>>()?;
    match parts[..] {
        [a] => Ok((a, a)),
        [a1, a2] => Ok((a1, a2)),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_lists() {
        assert_eq!(parse_powers("3").unwrap(), vec![3]);
        assert_eq!(parse_powers("1,4").unwrap(), vec![1, 4]);
        assert_eq!(parse_powers("2..4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_powers("2..=4").unwrap(), vec![2, 3, 4]);
        assert!(parse_powers("0..3").is_err());
        assert!(parse_powers("x").is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(parse_window("fejer:0.5").unwrap(), (0.5, 0.5));
        assert_eq!(parse_window("fejer:0.25,0.125").unwrap(), (0.25, 0.125));
        assert!(parse_window("gauss:1").is_err());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "# comment\np = 3\nd=5\ncheck=true\nseed=9\n").unwrap();
        let cfg = RunConfig::parse(["asz", "avg-trace", "--config", path.to_str().unwrap(), "--d", "4"]).unwrap();
        assert_eq!(cfg.opts.p, Some(3));
        assert_eq!(cfg.opts.d, Some(4));
        assert_eq!(cfg.opts.seed, Some(9));
        assert!(cfg.opts.check);
        fs::write(&path, "bogus=1\n").unwrap();
        assert!(RunConfig::parse(["asz", "avg-trace", "--config", path.to_str().unwrap()]).is_err());
    }
}
