use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use opcalc::besov::DEFAULT_HALF_WIDTH;
use opcalc::sampling::DEFAULT_SEED;
use opcalc::SchattenIndex;

use crate::error::CliError;

pub const GRID_M_RANGE: std::ops::RangeInclusive<u32> = 10..=22;
pub const DEFAULT_GRID_M: u32 = 16;
pub const DEFAULT_TRIALS: usize = 200;
/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "OPCALC_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format {other:?}, expected csv or json")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OutputTarget {
    Stdout,
    File(PathBuf),
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_list: Vec<usize>,
    pub p_list: Vec<SchattenIndex>,
    pub seed: u64,
    pub grid_l: f64,
    pub grid_m: u32,
    pub format: OutputFormat,
    pub output: OutputTarget,
    pub trials: usize,
    pub strict: bool,
}

/// Raw settings as strings, keyed like the config file. Later layers
/// override earlier ones field by field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub n: Option<String>,
    pub p: Option<String>,
    pub seed: Option<String>,
    pub grid_l: Option<String>,
    pub grid_m: Option<String>,
    pub format: Option<String>,
    pub out: Option<String>,
    pub trials: Option<String>,
    pub strict: Option<String>,
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut s = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(
                    "config",
                    format!("line {}: expected key=value, got {raw:?}", lineno + 1),
                )
            })?;
            let value = Some(value.trim().to_string());
            match key.trim() {
                "N" | "N_list" => s.n = value,
                "p" | "p_list" => s.p = value,
                "seed" => s.seed = value,
                "grid_L" | "grid-L" => s.grid_l = value,
                "grid_m" | "grid-m" => s.grid_m = value,
                "format" | "output_format" => s.format = value,
                "out" | "output_path" => s.out = value,
                "trials" => s.trials = value,
                "strict" => s.strict = value,
                other => {
                    return Err(CliError::config(
                        "config",
                        format!("line {}: unknown key {other:?}", lineno + 1),
                    ))
                }
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::config("config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn overlay(self, top: Settings) -> Settings {
        Settings {
            n: top.n.or(self.n),
            p: top.p.or(self.p),
            seed: top.seed.or(self.seed),
            grid_l: top.grid_l.or(self.grid_l),
            grid_m: top.grid_m.or(self.grid_m),
            format: top.format.or(self.format),
            out: top.out.or(self.out),
            trials: top.trials.or(self.trials),
            strict: top.strict.or(self.strict),
        }
    }

    /// Validates and fills defaults. `default_n` applies when no `N` was
    /// given; `command` names the default output file under `OPCALC_OUT_DIR`.
    pub fn resolve(
        &self,
        default_n: &[usize],
        command: &str,
        out_dir: Option<&str>,
    ) -> Result<RunConfig, CliError> {
        let n_list = match &self.n {
            Some(v) => parse_list(v, "N", |t| match t.parse::<usize>() {
                Ok(0) | Err(_) => Err(format!("{t:?} is not a positive integer")),
                Ok(n) => Ok(n),
            })?,
            None => default_n.to_vec(),
        };
        let p_list = match &self.p {
            Some(v) => parse_list(v, "p", |t| {
                SchattenIndex::from_str(t)
                    .map_err(|_| format!("{t:?} is not a Schatten index (p ≥ 1 or inf)"))
            })?,
            None => default_p_list(),
        };
        let seed = parse_scalar(&self.seed, "seed", DEFAULT_SEED)?;
        let grid_l: f64 = parse_scalar(&self.grid_l, "grid_L", DEFAULT_HALF_WIDTH)?;
        if !(grid_l.is_finite() && grid_l > 0.0) {
            return Err(CliError::config(
                "grid_L",
                format!("{grid_l} must be positive"),
            ));
        }
        let grid_m: u32 = parse_scalar(&self.grid_m, "grid_m", DEFAULT_GRID_M)?;
        if !GRID_M_RANGE.contains(&grid_m) {
            return Err(CliError::config(
                "grid_m",
                format!(
                    "{grid_m} outside [{}, {}]",
                    GRID_M_RANGE.start(),
                    GRID_M_RANGE.end()
                ),
            ));
        }
        let format = match &self.format {
            Some(v) => v.parse().map_err(|e| CliError::config("format", e))?,
            None => OutputFormat::Csv,
        };
        let output = match (self.out.as_deref(), out_dir) {
            (Some("-"), _) => OutputTarget::Stdout,
            (Some(path), _) => OutputTarget::File(PathBuf::from(path)),
            (None, Some(dir)) if !dir.is_empty() => {
                OutputTarget::File(Path::new(dir).join(format!("{command}.{}", format.extension())))
            }
            (None, _) => OutputTarget::Stdout,
        };
        let trials = parse_scalar(&self.trials, "trials", DEFAULT_TRIALS)?;
        let strict = match self.strict.as_deref().map(str::trim) {
            None | Some("false") | Some("0") | Some("no") => false,
            Some("true") | Some("1") | Some("yes") => true,
            Some(other) => {
                return Err(CliError::config(
                    "strict",
                    format!("{other:?} is not a boolean"),
                ))
            }
        };
        Ok(RunConfig {
            n_list,
            p_list,
            seed,
            grid_l,
            grid_m,
            format,
            output,
            trials,
            strict,
        })
    }
}

pub fn default_p_list() -> Vec<SchattenIndex> {
    vec![
        SchattenIndex::ONE,
        SchattenIndex::Finite(1.5),
        SchattenIndex::TWO,
        SchattenIndex::Finite(3.0),
        SchattenIndex::Infinity,
    ]
}

fn parse_list<T>(
    raw: &str,
    field: &str,
    item: impl Fn(&str) -> Result<T, String>,
) -> Result<Vec<T>, CliError> {
    let values = raw
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| item(t).map_err(|e| CliError::config(field, e)))
        .collect::<Result<Vec<T>, CliError>>()?;
    if values.is_empty() {
        return Err(CliError::config(field, "list is empty".to_string()));
    }
    Ok(values)
}

fn parse_scalar<T: FromStr>(raw: &Option<String>, field: &str, default: T) -> Result<T, CliError> {
    match raw {
        None => Ok(default),
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::config(field, format!("cannot parse {v:?}"))),
    }
}
