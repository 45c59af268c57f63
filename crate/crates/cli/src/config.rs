use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "lambda-sphere", version, about = "Shoot for the closing height of a rotational lambda-hypersurface of sphere type")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Residuals of the sphere, cylinder and plane solutions.
    Special,
    /// Trace one shot and write its path.
    Trace,
    /// Shoot once and report the class of the shot.
    Shoot,
    /// Scan, bisect and close the profile; write all artifacts.
    FindB0,
    /// Run the shape checks over a grid of initial heights.
    Verify,
    /// Find the closed profile and write only its surface of revolution.
    Mesh,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Special => "special",
            Command::Trace => "trace",
            Command::Shoot => "shoot",
            Command::FindB0 => "find-b0",
            Command::Verify => "verify",
            Command::Mesh => "mesh",
        }
    }

    fn formats(self) -> &'static [Format] {
        match self {
            Command::Special | Command::Verify | Command::Shoot => &[Format::Json],
            Command::Trace => &[Format::Csv, Format::Svg, Format::Json],
            Command::FindB0 => &[Format::Csv, Format::Svg, Format::Obj, Format::Json],
            Command::Mesh => &[Format::Obj, Format::Json],
        }
    }

    fn accepts(self, flag: &str) -> bool {
        let common = ["n", "lambda", "rel-tol", "abs-tol", "out", "jobs", "format"];
        let own: &[&str] = match self {
            Command::Special => &[],
            Command::Trace | Command::Shoot => &["b"],
            Command::FindB0 => &["b-min", "b-max", "grid", "tol-b", "tol-f", "segments"],
            Command::Mesh => &["b-min", "b-max", "grid", "tol-b", "tol-f", "segments"],
            Command::Verify => &["b", "b-min", "b-max", "grid"],
        };
        common.contains(&flag) || own.contains(&flag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Svg,
    Obj,
    Json,
}

/// Options as given on the command line or in a config file. The file is a
/// flat TOML table whose keys are the flag names.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Opts {
    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// Dimension of the hypersurface (at least 2).
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// The constant lambda (at most 0).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Initial height for trace and shoot, or a single height for verify.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Lower end of the scan or sweep range.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b_min: Option<f64>,
    /// Upper end of the scan or sweep range.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b_max: Option<f64>,
    /// Number of heights on the geometric scan or sweep grid.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Bracket width at which bisection stops.
    #[arg(long, global = true)]
    pub tol_b: Option<f64>,
    /// Largest |x(s2)| accepted at the junction.
    #[arg(long, global = true)]
    pub tol_f: Option<f64>,
    /// Relative tolerance of the integrator.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance of the integrator.
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    /// Angular segments of the mesh.
    #[arg(long, global = true)]
    pub segments: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Comma-separated artifact formats.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// Flat TOML file with defaults for any of the flags above.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Opts {
    fn given(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let mut push = |set: bool, name| {
            if set {
                v.push(name)
            }
        };
        push(self.n.is_some(), "n");
        push(self.lambda.is_some(), "lambda");
        push(self.b.is_some(), "b");
        push(self.b_min.is_some(), "b-min");
        push(self.b_max.is_some(), "b-max");
        push(self.grid.is_some(), "grid");
        push(self.tol_b.is_some(), "tol-b");
        push(self.tol_f.is_some(), "tol-f");
        push(self.rel_tol.is_some(), "rel-tol");
        push(self.abs_tol.is_some(), "abs-tol");
        push(self.segments.is_some(), "segments");
        push(self.out.is_some(), "out");
        push(self.jobs.is_some(), "jobs");
        push(self.format.is_some(), "format");
        v
    }

    /// Fields of `self`, falling back to `base`.
    fn or(self, base: Opts) -> Opts {
        Opts {
            command: self.command.or(base.command),
            n: self.n.or(base.n),
            lambda: self.lambda.or(base.lambda),
            b: self.b.or(base.b),
            b_min: self.b_min.or(base.b_min),
            b_max: self.b_max.or(base.b_max),
            grid: self.grid.or(base.grid),
            tol_b: self.tol_b.or(base.tol_b),
            tol_f: self.tol_f.or(base.tol_f),
            rel_tol: self.rel_tol.or(base.rel_tol),
            abs_tol: self.abs_tol.or(base.abs_tol),
            segments: self.segments.or(base.segments),
            out: self.out.or(base.out),
            jobs: self.jobs.or(base.jobs),
            format: self.format.or(base.format),
            config: self.config.or(base.config),
        }
    }

    pub fn from_toml(text: &str) -> Result<Opts, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Opts, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        Opts::from_toml(&text)
    }
}

/// A validated configuration for one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub command: Command,
    pub n: u32,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_max: Option<f64>,
    pub grid: usize,
    pub tol_b: f64,
    pub tol_f: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub segments: usize,
    pub out: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    pub format: Vec<Format>,
}

pub const DEFAULT_N: u32 = 2;
pub const DEFAULT_LAMBDA: f64 = -0.05;
pub const DEFAULT_TOL_B: f64 = 1e-12;
pub const DEFAULT_TOL_F: f64 = 1e-9;
pub const DEFAULT_SEGMENTS: usize = 128;
pub const SCAN_GRID: usize = 32;
pub const SWEEP_GRID: usize = 12;
pub const SWEEP_B_MIN: f64 = 1e-3;
pub const SWEEP_B_MAX: f64 = 0.3;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must be a positive number, got {v}")))
    }
}

impl RunConfig {
    /// Merges command-line options over the config file, fills defaults and
    /// rejects invalid combinations. Flags that do not apply to `command` are
    /// an error when given on the command line and ignored when they come
    /// from a file.
    pub fn resolve(command: Command, cli: Opts) -> Result<RunConfig, CliError> {
        if let Some(bad) = cli.given().into_iter().find(|f| !command.accepts(f)) {
            return Err(usage(format!("--{bad} does not apply to {}", command.name())));
        }
        let file = match &cli.config {
            Some(path) => Opts::load(path)?,
            None => Opts::default(),
        };
        RunConfig::from_opts(command, cli.or(file))
    }

    fn from_opts(command: Command, o: Opts) -> Result<RunConfig, CliError> {
        let keep = |flag: &str| command.accepts(flag);
        let defaults = lambda_sphere::Params64::new(DEFAULT_N, 0.0).expect("default params");
        let n = o.n.unwrap_or(DEFAULT_N);
        let format = match o.format {
            Some(mut f) => {
                f.sort();
                f.dedup();
                f
            }
            None => command.formats().iter().copied().filter(|f| *f != Format::Obj || n == 2).collect(),
        };
        let cfg = RunConfig {
            command,
            n,
            lambda: o.lambda.unwrap_or(DEFAULT_LAMBDA),
            b: o.b.filter(|_| keep("b")),
            b_min: o.b_min.filter(|_| keep("b-min")),
            b_max: o.b_max.filter(|_| keep("b-max")),
            grid: o.grid.filter(|_| keep("grid")).unwrap_or(match command {
                Command::Verify => SWEEP_GRID,
                _ => SCAN_GRID,
            }),
            tol_b: o.tol_b.unwrap_or(DEFAULT_TOL_B),
            tol_f: o.tol_f.unwrap_or(DEFAULT_TOL_F),
            rel_tol: o.rel_tol.unwrap_or(defaults.rel_tol),
            abs_tol: o.abs_tol.unwrap_or(defaults.abs_tol),
            segments: o.segments.unwrap_or(DEFAULT_SEGMENTS),
            out: o.out.unwrap_or_else(|| PathBuf::from("out")),
            jobs: o.jobs,
            format,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        positive("tol-b", self.tol_b)?;
        positive("tol-f", self.tol_f)?;
        if self.grid < 2 {
            return Err(usage(format!("--grid must be at least 2, got {}", self.grid)));
        }
        if self.segments < 3 {
            return Err(usage(format!("--segments must be at least 3, got {}", self.segments)));
        }
        if self.jobs == Some(0) {
            return Err(usage("--jobs must be at least 1"));
        }
        if self.format.is_empty() {
            return Err(usage("--format selects no artifacts"));
        }
        if let Some(f) = self.format.iter().find(|f| !self.command.formats().contains(f)) {
            return Err(usage(format!("format {f:?} is not produced by {}", self.command.name())));
        }
        if self.n != 2 && (self.command == Command::Mesh || self.format.contains(&Format::Obj)) {
            return Err(usage(format!("meshes are only built for n = 2, got n = {}", self.n)));
        }
        for (name, v) in [("b", self.b), ("b-min", self.b_min), ("b-max", self.b_max)] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        if let (Some(lo), Some(hi)) = (self.b_min, self.b_max) {
            if lo >= hi {
                return Err(usage(format!("--b-min {lo} must be below --b-max {hi}")));
            }
        }
        if matches!(self.command, Command::Trace | Command::Shoot) && self.b.is_none() {
            return Err(usage(format!("{} needs --b", self.command.name())));
        }
        if self.command == Command::Verify && self.b.is_some() && (self.b_min.is_some() || self.b_max.is_some()) {
            return Err(usage("verify takes either --b or a --b-min/--b-max range"));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<lambda_sphere::Params64, CliError> {
        positive("rel-tol", self.rel_tol)?;
        positive("abs-tol", self.abs_tol)?;
        lambda_sphere::Params64::new(self.n, self.lambda)
            .and_then(|p| p.with_tolerances(self.rel_tol, self.abs_tol))
            .map_err(|e| usage(e.to_string()))
    }

    pub fn wants(&self, f: Format) -> bool {
        self.format.contains(&f)
    }

    /// The flat TOML form read back by `--config`.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    #[cfg(test)]
    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        let opts = Opts::from_toml(text)?;
        let command = opts.command.ok_or_else(|| usage("config has no command"))?;
        RunConfig::from_opts(command, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> Opts {
        Opts { lambda: Some(-0.1), tol_f: Some(1e-8), format: Some(vec![Format::Json, Format::Csv]), ..Opts::default() }
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = RunConfig::resolve(Command::FindB0, opts()).unwrap();
        let text = cfg.to_toml();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg, "{text}");
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "n = 3\nlambda = -0.2\ngrid = 7\nb = 0.5\n").unwrap();
        let cli = Opts { lambda: Some(-0.01), config: Some(path), ..Opts::default() };
        let cfg = RunConfig::resolve(Command::FindB0, cli).unwrap();
        assert_eq!((cfg.n, cfg.lambda, cfg.grid, cfg.b), (3, -0.01, 7, None));
        assert!(!cfg.wants(Format::Obj));
    }

    #[test]
    fn invalid_combinations_are_rejected() {
        let bad = [
            (Command::Shoot, Opts::default()),
            (Command::Shoot, Opts { b: Some(0.1), grid: Some(4), ..Opts::default() }),
            (Command::FindB0, Opts { lambda: Some(0.1), ..Opts::default() }),
            (Command::FindB0, Opts { b_min: Some(1.0), b_max: Some(0.5), ..Opts::default() }),
            (Command::Mesh, Opts { n: Some(3), ..Opts::default() }),
            (Command::Special, Opts { format: Some(vec![Format::Obj]), ..Opts::default() }),
            (Command::Verify, Opts { b: Some(0.1), b_min: Some(0.01), ..Opts::default() }),
            (Command::FindB0, Opts { segments: Some(2), ..Opts::default() }),
        ];
        for (cmd, o) in bad {
            assert!(matches!(RunConfig::resolve(cmd, o.clone()), Err(CliError::Usage(_))), "{cmd:?} {o:?}");
        }
    }

    #[test]
    fn unknown_file_keys_are_rejected() {
        assert!(Opts::from_toml("lamda = -0.1\n").is_err());
    }
}
