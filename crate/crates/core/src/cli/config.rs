//! Settings shared by all subcommands.
//!
//! Each setting comes from the first source that provides it: a command-line
//! flag, an `NBBD_*` environment variable, the key=value file named by
//! `--config`, or the built-in default.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use crate::counterfactual::{ModelSpec, Sigma2Mode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// key=value settings file (flags and NBBD_* variables take precedence)
    #[arg(long, env = "NBBD_CONFIG", global = true)]
    pub config: Option<PathBuf>,
    /// Zero table: one ordinate per line, '#' comments (default: bundled 10^4 zeros)
    #[arg(long, env = "NBBD_ZEROS", global = true)]
    pub zeros: Option<PathBuf>,
    /// Re-locate every table ordinate on Z(t) before use
    #[arg(long, env = "NBBD_REFINE", global = true, num_args = 0..=1, default_missing_value = "true")]
    pub refine: Option<bool>,
    /// Integration cutoff in t (default depends on the subcommand)
    #[arg(long, env = "NBBD_TMAX", global = true)]
    pub tmax: Option<f64>,
    /// Absolute quadrature tolerance (default depends on the subcommand)
    #[arg(long, env = "NBBD_TOL", global = true)]
    pub tol: Option<f64>,
    /// Worker threads for the parallel maps
    #[arg(long, env = "NBBD_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Write the result here instead of standard output
    #[arg(long, env = "NBBD_OUT", global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "NBBD_FORMAT", global = true, value_enum)]
    pub format: Option<Format>,
    /// Directory of cached results keyed by the run hash
    #[arg(long, env = "NBBD_CACHE_DIR", global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, env = "NBBD_SIGMA0", global = true)]
    pub sigma0: Option<f64>,
    #[arg(long, env = "NBBD_GAMMA0", global = true)]
    pub gamma0: Option<f64>,
    /// Ordinates of the two zeros replaced by the off-line quadruplet, as a,b
    #[arg(long, env = "NBBD_REMOVED", global = true)]
    pub removed: Option<String>,
    /// Engineered zeros in the off-line residue sum: pair or quadruplet
    #[arg(long, env = "NBBD_MODE", global = true)]
    pub mode: Option<String>,
}

const KNOWN_KEYS: [&str; 12] = [
    "zeros", "refine", "tmax", "tol", "threads", "out", "format", "cache-dir", "sigma0", "gamma0", "removed", "mode",
];

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub zeros: Option<PathBuf>,
    pub refine: bool,
    pub tmax: Option<f64>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub cache_dir: Option<PathBuf>,
    pub model: ModelSpec,
    pub mode: Sigma2Mode,
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str, origin: &str) -> Result<BTreeMap<String, (String, usize)>> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: origin.to_string(),
            line: k + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected key=value, got {line:?}")))?;
        let key = key.trim().replace('_', "-");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(parse_err(format!("unknown key {key:?}")));
        }
        out.insert(key, (value.trim().to_string(), k + 1));
    }
    Ok(out)
}

pub fn parse_pair(raw: &str) -> Result<[f64; 2]> {
    let parts = parse_list::<f64>(raw)?;
    match parts[..] {
        [a, b] => Ok([a, b]),
        _ => Err(Error::InvalidParameter(format!("expected two values a,b, got {raw:?}"))),
    }
}

pub fn parse_list<T: std::str::FromStr>(raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse {p:?} in {raw:?}")))
        })
        .collect()
}

impl Settings {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let origin = path.display().to_string();
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(origin.clone(), e))?;
                parse_config(&text, &origin)?
            }
            None => BTreeMap::new(),
        };
        let origin = args
            .config
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_default();
        let from_file = |key: &str| file.get(key);
        fn typed<T: std::str::FromStr>(origin: &str, key: &str, entry: Option<&(String, usize)>) -> Result<Option<T>> {
            entry
                .map(|(v, line)| {
                    v.parse().map_err(|_| Error::Parse {
                        path: origin.to_string(),
                        line: *line,
                        message: format!("bad value {v:?} for {key}"),
                    })
                })
                .transpose()
        }

        let defaults = ModelSpec::default();
        let removed = match args.removed.clone().or(from_file("removed").map(|e| e.0.clone())) {
            Some(raw) => parse_pair(&raw)?,
            None => defaults.removed,
        };
        let sigma0 = args
            .sigma0
            .or(typed(&origin, "sigma0", from_file("sigma0"))?)
            .unwrap_or(defaults.sigma0);
        let gamma0 = args
            .gamma0
            .or(typed(&origin, "gamma0", from_file("gamma0"))?)
            .unwrap_or(defaults.gamma0);
        let mode = match args.mode.clone().or(from_file("mode").map(|e| e.0.clone())) {
            Some(raw) => raw.parse()?,
            None => Sigma2Mode::default(),
        };
        Ok(Self {
            zeros: args.zeros.clone().or(typed(&origin, "zeros", from_file("zeros"))?),
            refine: args
                .refine
                .or(typed(&origin, "refine", from_file("refine"))?)
                .unwrap_or(false),
            tmax: args.tmax.or(typed(&origin, "tmax", from_file("tmax"))?),
            tol: args.tol.or(typed(&origin, "tol", from_file("tol"))?),
            threads: args.threads.or(typed(&origin, "threads", from_file("threads"))?),
            out: args.out.clone().or(typed(&origin, "out", from_file("out"))?),
            format: args.format.or(typed(&origin, "format", from_file("format"))?),
            cache_dir: args
                .cache_dir
                .clone()
                .or(typed(&origin, "cache-dir", from_file("cache-dir"))?),
            model: ModelSpec::new(sigma0, gamma0, removed)?,
            mode,
        })
    }
}
