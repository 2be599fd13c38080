use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::estimator::Projection;
use crate::forms::Alpha;
use crate::space::ElementPair;
use crate::study::CaseId;

/// Keys accepted in config files. Flags use the same names with `-` for `_`.
pub const KNOWN_KEYS: &[&str] = &[
    "case",
    "pair",
    "alpha",
    "levels",
    "theta",
    "max_iters",
    "target_eta",
    "n",
    "mesh",
    "out",
    "seed",
    "projection",
    "min_angle",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    UniformStudy,
    AdaptiveStudy,
    Audit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::UniformStudy => "uniform-study",
            Command::AdaptiveStudy => "adaptive-study",
            Command::Audit => "audit",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Command::Solve,
            Command::UniformStudy,
            Command::AdaptiveStudy,
            Command::Audit,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub case: CaseId,
    /// Replaces the structured mesh of the case when set.
    pub mesh: Option<PathBuf>,
    pub pair: ElementPair,
    pub alpha: Alpha,
    pub levels: usize,
    pub theta: f64,
    pub max_iters: usize,
    pub target_eta: Option<f64>,
    /// Subdivisions of the structured starting mesh.
    pub n: usize,
    pub out: PathBuf,
    pub seed: u64,
    pub projection: Projection,
    /// Audit threshold in degrees.
    pub min_angle: f64,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            case: CaseId::SmoothSquare,
            mesh: None,
            pair: ElementPair::P1P1,
            alpha: Alpha::Auto,
            levels: 4,
            theta: 0.5,
            max_iters: 8,
            target_eta: None,
            n: 4,
            out: PathBuf::from("out"),
            seed: 0,
            projection: Projection::Global,
            min_angle: 5.0,
        }
    }

    /// Applies `key = value` pairs on top of the defaults.
    pub fn from_pairs(command: Command, pairs: &BTreeMap<String, String>) -> Result<Self, String> {
        let mut cfg = RunConfig::new(command);
        for (key, value) in pairs {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String>
        where
            T::Err: fmt::Display,
        {
            value
                .parse()
                .map_err(|e| format!("invalid value `{value}` for `{key}`: {e}"))
        }
        match key {
            "case" => self.case = parse(key, value)?,
            "pair" => self.pair = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "levels" => self.levels = parse(key, value)?,
            "theta" => self.theta = parse(key, value)?,
            "max_iters" => self.max_iters = parse(key, value)?,
            "target_eta" => self.target_eta = Some(parse(key, value)?),
            "n" => self.n = parse(key, value)?,
            "mesh" => self.mesh = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = parse(key, value)?,
            "projection" => {
                self.projection = match value {
                    "global" => Projection::Global,
                    "elementwise" => Projection::Elementwise,
                    _ => return Err(format!(
                        "invalid value `{value}` for `projection`: expected global or elementwise"
                    )),
                }
            }
            "min_angle" => self.min_angle = parse(key, value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), String> {
        if self.command == Command::UniformStudy && self.levels < 3 {
            return Err(format!("levels must be at least 3, got {}", self.levels));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(format!("theta must lie in (0, 1], got {}", self.theta));
        }
        if self.max_iters == 0 {
            return Err("max_iters must be positive".into());
        }
        if self.n == 0 {
            return Err("n must be positive".into());
        }
        if !(self.min_angle > 0.0 && self.min_angle < 60.0) {
            return Err(format!(
                "min_angle must lie in (0, 60), got {}",
                self.min_angle
            ));
        }
        Ok(())
    }
}

/// Parses a `key = value` file. Blank lines and lines starting with `#` are
/// skipped; repeated or unknown keys are errors.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut pairs = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {lineno}: expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(format!("line {lineno}: unknown key `{key}`"));
        }
        if value.is_empty() {
            return Err(format!("line {lineno}: empty value for `{key}`"));
        }
        if pairs.insert(key.to_string(), value.to_string()).is_some() {
            return Err(format!("line {lineno}: duplicate key `{key}`"));
        }
    }
    Ok(pairs)
}
