//! INI-style run configuration.
//!
//! ```text
//! [node_I]
//! theta1 = 1*pi
//! beta = 0.25*pi
//! L0 = 1.0
//! xi = 1.3
//! [sweep]
//! k_min = 0.1
//! ```
//!
//! Sections `[node_I]`, `[node_II]`, `[ring]`, `[sweep]`. Numbers may carry a
//! `*pi` suffix. Command-line overrides are applied on top of the file.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use qring_core::{EulerAngles, NodeParams, RingSystem};

use crate::output::Format;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing required key '{key}' in [{section}]")]
    MissingKey { section: String, key: String },
    #[error("{origin}: value for {section}.{key} is not a number: '{value}'")]
    NotANumber {
        section: String,
        key: String,
        value: String,
        origin: Origin,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] qring_core::Error),
}

pub type Result<T> = std::result::Result<T, ConfigError>;

/// Where a value came from, for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    CommandLine,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::CommandLine => write!(f, "command line"),
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    origin: Origin,
}

const SECTIONS: [&str; 4] = ["node_i", "node_ii", "ring", "sweep"];
const NODE_KEYS: [&str; 11] = [
    "theta1", "theta2", "theta3", "alpha", "beta", "gamma", "delta", "a", "b", "l0", "xi",
];
const RING_KEYS: [&str; 2] = ["d", "symmetric"];
const SWEEP_KEYS: [&str; 6] = ["k_min", "k_max", "points", "k", "flux_min", "flux_max"];

fn display_section(s: &str) -> &str {
    match s {
        "node_i" => "node_I",
        "node_ii" => "node_II",
        other => other,
    }
}

fn display_key(k: &str) -> &str {
    if k == "l0" {
        "L0"
    } else {
        k
    }
}

/// Parses a real number with an optional `*pi` suffix (`pi`, `-pi`,
/// `0.25*pi`, `-1.5*pi`).
pub fn parse_number(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    let lower: String = t
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase();
    let value = if let Some(coef) = lower.strip_suffix("*pi") {
        coef.parse::<f64>().map(|c| c * PI).ok()
    } else {
        match lower.as_str() {
            "pi" | "+pi" => Some(PI),
            "-pi" => Some(-PI),
            _ => lower.parse::<f64>().ok(),
        }
    };
    match value {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(format!("not a number: '{t}'")),
    }
}

/// Section → key → value, as read from the file plus overrides.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RawConfig::default();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split(['#', ';']).next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line,
                    message: format!("unterminated section header '{content}'"),
                })?;
                let name = name.trim().to_ascii_lowercase();
                if !SECTIONS.contains(&name.as_str()) {
                    return Err(ConfigError::Syntax {
                        line,
                        message: format!(
                            "unknown section [{name}] (expected node_I, node_II, ring or sweep)"
                        ),
                    });
                }
                cfg.sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("expected 'key = value', got '{content}'"),
            })?;
            let section = current.clone().ok_or_else(|| ConfigError::Syntax {
                line,
                message: "key outside of any section".into(),
            })?;
            cfg.insert(&section, key.trim(), value.trim(), Origin::Line(line))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    fn insert(&mut self, section: &str, key: &str, value: &str, origin: Origin) -> Result<()> {
        let key = key.to_ascii_lowercase();
        let allowed: &[&str] = match section {
            "node_i" | "node_ii" => &NODE_KEYS,
            "ring" => &RING_KEYS,
            "sweep" => &SWEEP_KEYS,
            _ => &[],
        };
        if !allowed.contains(&key.as_str()) {
            let msg = format!("unknown key '{key}' in [{}]", display_section(section));
            return Err(match origin {
                Origin::Line(line) => ConfigError::Syntax { line, message: msg },
                Origin::CommandLine => ConfigError::Invalid(msg),
            });
        }
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(
                key,
                Entry {
                    value: value.to_string(),
                    origin,
                },
            );
        Ok(())
    }

    /// Applies `section.key=value`.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let bad =
            || ConfigError::Invalid(format!("expected section.key=value, got '{assignment}'"));
        let (path, value) = assignment.split_once('=').ok_or_else(bad)?;
        let (section, key) = path.trim().split_once('.').ok_or_else(bad)?;
        let section = section.trim().to_ascii_lowercase();
        if !SECTIONS.contains(&section.as_str()) {
            return Err(ConfigError::Invalid(format!(
                "unknown section '{section}' in --set"
            )));
        }
        self.insert(&section, key.trim(), value.trim(), Origin::CommandLine)
    }

    fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section)?.get(key)
    }

    fn number(&self, section: &str, key: &str) -> Result<Option<f64>> {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        parse_number(&e.value)
            .map(Some)
            .map_err(|_| ConfigError::NotANumber {
                section: display_section(section).to_string(),
                key: display_key(key).to_string(),
                value: e.value.clone(),
                origin: e.origin,
            })
    }

    fn required(&self, section: &str, key: &str) -> Result<f64> {
        self.number(section, key)?
            .ok_or_else(|| ConfigError::MissingKey {
                section: display_section(section).to_string(),
                key: display_key(key).to_string(),
            })
    }

    fn flag(&self, section: &str, key: &str) -> Result<Option<bool>> {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        match e.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => Ok(Some(true)),
            "false" | "no" | "0" => Ok(Some(false)),
            other => Err(ConfigError::Invalid(format!(
                "{}: {section}.{key} must be true or false, got '{other}'",
                e.origin
            ))),
        }
    }

    fn node(&self, section: &str, xi: Option<f64>) -> Result<NodeParams> {
        let theta = [
            self.required(section, "theta1")?,
            self.required(section, "theta2")?,
            self.required(section, "theta3")?,
        ];
        let euler = EulerAngles {
            alpha: self.required(section, "alpha")?,
            beta: self.required(section, "beta")?,
            gamma: self.required(section, "gamma")?,
            delta: self.required(section, "delta")?,
            a: self.required(section, "a")?,
            b: self.required(section, "b")?,
        };
        let l0 = self.required(section, "l0")?;
        let xi = match xi {
            Some(x) => x,
            None => self.required(section, "xi")?,
        };
        Ok(NodeParams::new(theta, euler, l0, xi)?)
    }
}

/// Values supplied by dedicated command-line flags; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub symmetric: bool,
    pub d: Option<f64>,
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    pub points: Option<usize>,
    pub k: Option<f64>,
    pub flux_min: Option<f64>,
    pub flux_max: Option<f64>,
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepSpec {
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    pub points: Option<usize>,
    pub k: Option<f64>,
    pub flux_min: Option<f64>,
    pub flux_max: Option<f64>,
}

impl SweepSpec {
    /// `(k_min, k_max, points)` or an error naming what is missing.
    pub fn k_range(&self) -> Result<(f64, f64, usize)> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| ConfigError::MissingKey {
                section: "sweep".into(),
                key: name.into(),
            })
        };
        let points = self.points.ok_or_else(|| ConfigError::MissingKey {
            section: "sweep".into(),
            key: "points".into(),
        })?;
        Ok((
            need(self.k_min, "k_min")?,
            need(self.k_max, "k_max")?,
            points,
        ))
    }

    pub fn flux_range(&self) -> Result<(f64, f64, usize, f64)> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| ConfigError::MissingKey {
                section: "sweep".into(),
                key: name.into(),
            })
        };
        let points = self.points.ok_or_else(|| ConfigError::MissingKey {
            section: "sweep".into(),
            key: "points".into(),
        })?;
        Ok((
            need(self.flux_min, "flux_min")?,
            need(self.flux_max, "flux_max")?,
            points,
            need(self.k, "k")?,
        ))
    }

    fn validate(&self) -> Result<()> {
        for k in [self.k_min, self.k_max, self.k].into_iter().flatten() {
            if !(k > 0.0) {
                return Err(qring_core::Error::NonPositiveWavenumber(k).into());
            }
        }
        if let (Some(lo), Some(hi)) = (self.k_min, self.k_max) {
            if lo >= hi {
                return Err(ConfigError::Invalid(format!(
                    "k_min must be below k_max, got [{lo}, {hi}]"
                )));
            }
        }
        if let (Some(lo), Some(hi)) = (self.flux_min, self.flux_max) {
            if lo >= hi {
                return Err(ConfigError::Invalid(format!(
                    "flux_min must be below flux_max, got [{lo}, {hi}]"
                )));
            }
        }
        if let Some(p) = self.points {
            if p < 2 {
                return Err(ConfigError::Invalid(format!(
                    "points must be at least 2, got {p}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub ring: RingSystem,
    pub sweep: SweepSpec,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub verify: bool,
}

impl RunConfig {
    /// Reads `path` (if any), applies overrides and validates.
    pub fn load(
        path: Option<&Path>,
        ov: &Overrides,
        output: Option<PathBuf>,
        format: Format,
        verify: bool,
    ) -> Result<Self> {
        let mut raw = match path {
            Some(p) => RawConfig::from_file(p)?,
            None => RawConfig::default(),
        };
        for s in &ov.set {
            raw.set(s)?;
        }
        let (ring, sweep) = build(&raw, ov)?;
        Ok(RunConfig {
            ring,
            sweep,
            output,
            format,
            verify,
        })
    }
}

/// Ring and sweep from a parsed config plus overrides.
pub fn build(raw: &RawConfig, ov: &Overrides) -> Result<(RingSystem, SweepSpec)> {
    let mut sweep = SweepSpec {
        k_min: raw.number("sweep", "k_min")?,
        k_max: raw.number("sweep", "k_max")?,
        points: None,
        k: raw.number("sweep", "k")?,
        flux_min: raw.number("sweep", "flux_min")?,
        flux_max: raw.number("sweep", "flux_max")?,
    };
    if let Some(p) = raw.number("sweep", "points")? {
        if p.fract() != 0.0 || p < 0.0 {
            return Err(ConfigError::Invalid(format!(
                "points must be a whole number, got {p}"
            )));
        }
        sweep.points = Some(p as usize);
    }
    sweep.k_min = ov.k_min.or(sweep.k_min);
    sweep.k_max = ov.k_max.or(sweep.k_max);
    sweep.points = ov.points.or(sweep.points);
    sweep.k = ov.k.or(sweep.k);
    sweep.flux_min = ov.flux_min.or(sweep.flux_min);
    sweep.flux_max = ov.flux_max.or(sweep.flux_max);
    sweep.validate()?;

    let symmetric = ov.symmetric || raw.flag("ring", "symmetric")?.unwrap_or(false);
    let d = ov.d.or(raw.number("ring", "d")?);
    if let Some(d) = d {
        if !(d > 0.0) {
            return Err(ConfigError::Invalid(format!("d must be positive, got {d}")));
        }
    }
    if !raw.has_section("node_i") && raw.entry("node_i", "theta1").is_none() {
        return Err(ConfigError::MissingKey {
            section: "node_I".into(),
            key: "theta1".into(),
        });
    }
    let node_i = raw.node("node_i", d)?;
    let node_ii = if symmetric {
        let xi = match d {
            Some(_) => 0.0,
            None => raw.required("node_ii", "xi")?,
        };
        node_i.with_xi(xi)
    } else {
        raw.node("node_ii", d.map(|_| 0.0))?
    };
    Ok((RingSystem::new(node_i, node_ii)?, sweep))
}
