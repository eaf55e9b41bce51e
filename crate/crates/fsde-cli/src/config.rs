//! Run configuration: defaults, overlaid by a `key=value` config file,
//! overlaid by command-line flags.  Precedence is flags > file > defaults,
//! field by field.

use crate::AppError;
use fsde::fbm::Generator;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Cholesky,
    Circulant,
}

impl GenKind {
    pub fn to_generator(self) -> Generator {
        match self {
            GenKind::Cholesky => Generator::Cholesky,
            GenKind::Circulant => Generator::Circulant,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GenKind::Cholesky => "cholesky",
            GenKind::Circulant => "circulant",
        }
    }
}

/// Fully resolved configuration every subcommand runs from.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub hurst: f64,
    pub alpha: f64,
    pub x0: f64,
    pub horizon: f64,
    pub steps: usize,
    pub seed: u64,
    pub n_list: Vec<u32>,
    pub generator: GenKind,
    pub out: PathBuf,
    pub gamma: f64,
    pub alpha_tilde: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            hurst: 0.75,
            alpha: 0.4,
            x0: 0.0,
            horizon: 1.0,
            steps: 4096,
            seed: 42,
            n_list: vec![8, 16, 32, 64, 128],
            generator: GenKind::Circulant,
            out: PathBuf::from("out"),
            gamma: 0.65,
            alpha_tilde: 0.45,
        }
    }
}

/// Command-line overrides, all optional.
#[derive(Debug, Clone, Default)]
pub struct Flags {
    pub config: Option<PathBuf>,
    pub hurst: Option<f64>,
    pub alpha: Option<f64>,
    pub x0: Option<f64>,
    pub horizon: Option<f64>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    pub n_list: Option<String>,
    pub generator: Option<String>,
    pub out: Option<PathBuf>,
    pub gamma: Option<f64>,
    pub alpha_tilde: Option<f64>,
}

/// Values read from a config file, all optional.
#[derive(Debug, Clone, Default)]
struct Partial {
    hurst: Option<f64>,
    alpha: Option<f64>,
    x0: Option<f64>,
    horizon: Option<f64>,
    steps: Option<usize>,
    seed: Option<u64>,
    n_list: Option<Vec<u32>>,
    generator: Option<GenKind>,
    out: Option<PathBuf>,
    gamma: Option<f64>,
    alpha_tilde: Option<f64>,
}

pub fn resolve(flags: &Flags) -> Result<RunConfig, AppError> {
    let file = match &flags.config {
        Some(path) => parse_file(path)?,
        None => Partial::default(),
    };
    let d = RunConfig::default();

    let n_list = match &flags.n_list {
        Some(raw) => parse_n_list(raw).map_err(|e| AppError::Usage(format!("--n-list: {e}")))?,
        None => file.n_list.unwrap_or(d.n_list),
    };
    let generator = match &flags.generator {
        Some(raw) => {
            parse_generator(raw).map_err(|e| AppError::Usage(format!("--generator: {e}")))?
        }
        None => file.generator.unwrap_or(d.generator),
    };

    Ok(RunConfig {
        hurst: flags.hurst.or(file.hurst).unwrap_or(d.hurst),
        alpha: flags.alpha.or(file.alpha).unwrap_or(d.alpha),
        x0: flags.x0.or(file.x0).unwrap_or(d.x0),
        horizon: flags.horizon.or(file.horizon).unwrap_or(d.horizon),
        steps: flags.steps.or(file.steps).unwrap_or(d.steps),
        seed: flags.seed.or(file.seed).unwrap_or(d.seed),
        n_list,
        generator,
        out: flags.out.clone().or(file.out).unwrap_or(d.out),
        gamma: flags.gamma.or(file.gamma).unwrap_or(d.gamma),
        alpha_tilde: flags.alpha_tilde.or(file.alpha_tilde).unwrap_or(d.alpha_tilde),
    })
}

/// Parse a `key = value` file with `#` comments.  Errors name the line
/// number and field so a typo in a 30-line file is findable.
fn parse_file(path: &std::path::Path) -> Result<Partial, AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        AppError::Usage(format!("cannot read config file '{}': {e}", path.display()))
    })?;
    let mut p = Partial::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            AppError::Usage(format!("config line {line_no}: expected key=value, got '{line}'"))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| {
            AppError::Usage(format!(
                "config line {line_no}: field '{key}': invalid {what} '{value}'"
            ))
        };
        match key {
            "hurst" => p.hurst = Some(value.parse().map_err(|_| bad("number"))?),
            "alpha" => p.alpha = Some(value.parse().map_err(|_| bad("number"))?),
            "x0" => p.x0 = Some(value.parse().map_err(|_| bad("number"))?),
            "horizon" => p.horizon = Some(value.parse().map_err(|_| bad("number"))?),
            "steps" => p.steps = Some(value.parse().map_err(|_| bad("integer"))?),
            "seed" => p.seed = Some(value.parse().map_err(|_| bad("integer"))?),
            "n_list" => p.n_list = Some(parse_n_list(value).map_err(|_| bad("index list"))?),
            "generator" => {
                p.generator = Some(parse_generator(value).map_err(|_| bad("generator"))?)
            }
            "out" => p.out = Some(PathBuf::from(value)),
            "gamma" => p.gamma = Some(value.parse().map_err(|_| bad("number"))?),
            "alpha_tilde" => p.alpha_tilde = Some(value.parse().map_err(|_| bad("number"))?),
            _ => {
                return Err(AppError::Usage(format!(
                    "config line {line_no}: unknown field '{key}'"
                )))
            }
        }
    }
    Ok(p)
}

fn parse_n_list(raw: &str) -> Result<Vec<u32>, String> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| format!("invalid index '{}' (want comma-separated positive integers)", s.trim()))
        })
        .collect()
}

fn parse_generator(raw: &str) -> Result<GenKind, String> {
    match raw {
        "cholesky" => Ok(GenKind::Cholesky),
        "circulant" => Ok(GenKind::Circulant),
        other => Err(format!("unknown generator '{other}' (want cholesky or circulant)")),
    }
}
