//! Command-line front end for the `adsheat` kernels: grid evaluation, identity
//! tables and the verification suite, emitted as CSV or JSON.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod output;
pub mod params;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<adsheat::Error> for CliError {
    fn from(e: adsheat::Error) -> Self {
        match e {
            adsheat::Error::Convergence { .. } | adsheat::Error::Numerical(_) => {
                CliError::Compute(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Normalization {
    /// `e^{t∂θ²}p`, density against `dy/(1-|y|²)^{n+1} dθ/2π`.
    Series,
    /// The Gaussian-shift integral expression, the series value divided by `2π`.
    Theorem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Heat kernel of H^{2n+1}: rows (t, n, x, q).
    EvalHyperbolic,
    /// Heat kernel of the generalized Maass Laplacian.
    EvalMaass,
    /// Subelliptic heat kernel of the AdS fibration.
    EvalAds,
    /// Run a verification suite and emit a JSON report.
    Verify,
    /// Both sides of the theta and hypergeometric identities.
    Identity,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::EvalHyperbolic => "eval-hyperbolic",
            Command::EvalMaass => "eval-maass",
            Command::EvalAds => "eval-ads",
            Command::Verify => "verify",
            Command::Identity => "identity",
        }
    }
}

/// Lists accept `v`, `a,b,c` or `start:stop:count`; complex numbers are
/// written `a+bi`, point coordinates are separated by commas.
#[derive(Debug, Parser)]
#[command(name = "adsheat", version, about = "Heat kernels on the complex AdS fibration, the Bergman ball and H^{2n+1}")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Time values.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Dimensions (complex dimension of the ball; H^{2n+1} for eval-hyperbolic).
    #[arg(long, global = true)]
    pub n: Option<String>,
    /// Half-integer fiber parameters.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// Fiber angles in radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Hyperbolic distances d(w, y).
    #[arg(long, global = true)]
    pub d: Option<String>,
    /// First point, e.g. `0.1+0.2i,0.3`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub w: Option<String>,
    /// Second point.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Geodesic distances on H^{2n+1}.
    #[arg(long, global = true)]
    pub x: Option<String>,
    /// Identity variable u.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Hypergeometric orders m.
    #[arg(long, global = true)]
    pub m: Option<String>,
    /// The swept distance as `start:stop:count` (x, d or u by command).
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Verification suite.
    #[arg(long, global = true)]
    pub suite: Option<String>,
    #[arg(long = "abs-tol", global = true)]
    pub abs_tol: Option<String>,
    #[arg(long = "rel-tol", global = true)]
    pub rel_tol: Option<String>,
    #[arg(long = "max-nodes", global = true)]
    pub max_nodes: Option<String>,
    #[arg(long = "eps-tail", global = true)]
    pub eps_tail: Option<String>,
    /// Fixed truncation of sums over k.
    #[arg(long = "k-max", global = true)]
    pub k_max: Option<String>,
    #[arg(long, global = true, alias = "theta-convention", value_enum)]
    pub normalization: Option<Normalization>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed of the random operator samples.
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// File of `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

const CONFIG_KEYS: [&str; 20] = [
    "t",
    "n",
    "kappa",
    "theta",
    "d",
    "w",
    "y",
    "x",
    "u",
    "m",
    "grid",
    "suite",
    "abs-tol",
    "rel-tol",
    "max-nodes",
    "eps-tail",
    "k-max",
    "normalization",
    "format",
    "seed",
];

/// Flag values merged over the config file.
#[derive(Debug, Clone)]
pub struct Settings {
    pub command: Command,
    values: BTreeMap<String, String>,
    pub output: Option<PathBuf>,
}

impl Settings {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let mut values = match &cli.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                params::parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        if let Some(bad) = values.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
            return Err(CliError::Usage(format!("unknown config key '{bad}'")));
        }
        let flags: [(&str, Option<String>); 20] = [
            ("t", cli.t.clone()),
            ("n", cli.n.clone()),
            ("kappa", cli.kappa.clone()),
            ("theta", cli.theta.clone()),
            ("d", cli.d.clone()),
            ("w", cli.w.clone()),
            ("y", cli.y.clone()),
            ("x", cli.x.clone()),
            ("u", cli.u.clone()),
            ("m", cli.m.clone()),
            ("grid", cli.grid.clone()),
            ("suite", cli.suite.clone()),
            ("abs-tol", cli.abs_tol.clone()),
            ("rel-tol", cli.rel_tol.clone()),
            ("max-nodes", cli.max_nodes.clone()),
            ("eps-tail", cli.eps_tail.clone()),
            ("k-max", cli.k_max.clone()),
            (
                "normalization",
                cli.normalization.map(|v| match v {
                    Normalization::Series => "series".into(),
                    Normalization::Theorem => "theorem".into(),
                }),
            ),
            (
                "format",
                cli.format.map(|v| match v {
                    Format::Csv => "csv".into(),
                    Format::Json => "json".into(),
                }),
            ),
            ("seed", cli.seed.clone()),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                values.insert(key.to_string(), v);
            }
        }
        Ok(Self {
            command: cli.command,
            values,
            output: cli.output.clone(),
        })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn list(&self, key: &str, default: Option<&[f64]>) -> Result<Vec<f64>, CliError> {
        match (self.raw(key), default) {
            (Some(text), _) => params::parse_list(key, text),
            (None, Some(d)) => Ok(d.to_vec()),
            (None, None) => Err(CliError::Usage(format!(
                "{} needs --{key}",
                self.command.name()
            ))),
        }
    }

    /// The swept variable `key`, also reachable through `--grid`.
    pub fn swept(&self, key: &str, default: Option<&[f64]>) -> Result<Vec<f64>, CliError> {
        match (self.raw(key), self.raw("grid")) {
            (Some(_), Some(_)) => Err(CliError::Usage(format!(
                "--grid and --{key} both set the {key} values"
            ))),
            (None, Some(grid)) => params::parse_list("grid", grid),
            _ => self.list(key, default),
        }
    }

    pub fn scalar<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.raw(key)
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("--{key}: cannot parse '{v}'")))
            })
            .transpose()
    }

    pub fn format(&self) -> Result<Format, CliError> {
        match self.raw("format") {
            None if self.command == Command::Verify => Ok(Format::Json),
            None => Ok(Format::Csv),
            Some(v) => Format::from_str(v, true)
                .map_err(|_| CliError::Usage(format!("--format: unknown format '{v}'"))),
        }
    }

    pub fn normalization(&self) -> Result<Normalization, CliError> {
        match self.raw("normalization") {
            None => Ok(Normalization::Series),
            Some(v) => Normalization::from_str(v, true)
                .map_err(|_| CliError::Usage(format!("--normalization: unknown convention '{v}'"))),
        }
    }

    pub fn quadrature(&self) -> Result<adsheat::QuadratureConfig, CliError> {
        let mut cfg = adsheat::QuadratureConfig::default();
        if let Some(v) = self.scalar("abs-tol")? {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.scalar("rel-tol")? {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.scalar("max-nodes")? {
            cfg.max_nodes = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn series(&self) -> Result<adsheat::SeriesConfig, CliError> {
        let mut cfg = adsheat::SeriesConfig::default();
        if let Some(v) = self.scalar("eps-tail")? {
            cfg.eps_tail = v;
        }
        cfg.k_max_override = self.scalar("k-max")?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// What a run produced, before it is written out.
#[derive(Debug)]
pub enum Artifact {
    Table(output::Table),
    Report {
        json: serde_json::Value,
        csv: output::Table,
        passed: bool,
    },
}

impl Artifact {
    pub fn write<W: Write>(&self, format: Format, out: &mut W) -> Result<(), CliError> {
        match (self, format) {
            (Artifact::Table(t), Format::Csv) | (Artifact::Report { csv: t, .. }, Format::Csv) => {
                t.write_csv(out)?
            }
            (Artifact::Table(t), Format::Json) => {
                serde_json::to_writer_pretty(&mut *out, &t.to_json()).map_err(io::Error::from)?;
                writeln!(out)?;
            }
            (Artifact::Report { json, .. }, Format::Json) => {
                serde_json::to_writer_pretty(&mut *out, json).map_err(io::Error::from)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }

    /// Problems that make the exit status nonzero.
    pub fn failures(&self) -> Vec<String> {
        match self {
            Artifact::Table(t) => t
                .errors()
                .into_iter()
                .map(|(i, e)| format!("row {i}: {e}"))
                .collect(),
            Artifact::Report { json, passed, .. } => {
                if *passed {
                    Vec::new()
                } else {
                    json["checks"]
                        .as_array()
                        .into_iter()
                        .flatten()
                        .filter(|c| c["passed"] == false)
                        .map(|c| format!("check {} failed", c["name"].as_str().unwrap_or("?")))
                        .collect()
                }
            }
        }
    }
}

pub fn compute(settings: &Settings) -> Result<Artifact, CliError> {
    match settings.command {
        Command::EvalHyperbolic => commands::eval_hyperbolic(settings).map(Artifact::Table),
        Command::EvalMaass => commands::eval_maass(settings).map(Artifact::Table),
        Command::EvalAds => commands::eval_ads(settings).map(Artifact::Table),
        Command::Identity => commands::identity(settings).map(Artifact::Table),
        Command::Verify => commands::verify(settings),
    }
}

/// Parses, computes and writes; returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    match run_inner(cli) {
        Ok(failures) if failures.is_empty() => 0,
        Ok(failures) => {
            for f in failures {
                eprintln!("adsheat: {f}");
            }
            3
        }
        Err(e) => {
            eprintln!("adsheat: {e}");
            e.exit_code()
        }
    }
}

fn run_inner(cli: &Cli) -> Result<Vec<String>, CliError> {
    let settings = Settings::from_cli(cli)?;
    let format = settings.format()?;
    let artifact = compute(&settings)?;
    match &settings.output {
        Some(path) => {
            let mut out = BufWriter::new(fs::File::create(path)?);
            artifact.write(format, &mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            artifact.write(format, &mut out)?;
            out.flush()?;
        }
    }
    Ok(artifact.failures())
}
