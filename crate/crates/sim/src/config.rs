//! Experiment configuration, read from TOML. Every field has a default, so
//! an empty file runs the standard sweep.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use star_ris::{AOConfig, Access, Scenario};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

/// Surface model of a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    /// STAR surface under the coupled phase model.
    Coupled,
    /// STAR surface with freely chosen phases.
    Independent,
    /// Half transmit-only, half reflect-only elements.
    Conventional,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::Coupled, SchemeKind::Independent, SchemeKind::Conventional];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Coupled => "coupled",
            SchemeKind::Independent => "independent",
            SchemeKind::Conventional => "conventional",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

/// A surface model paired with an access scheme, written `coupled-noma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Scheme {
    pub kind: SchemeKind,
    pub access: Access,
}

impl Scheme {
    pub fn new(kind: SchemeKind, access: Access) -> Self {
        Self { kind, access }
    }

    pub fn all() -> Vec<Scheme> {
        SchemeKind::ALL
            .into_iter()
            .flat_map(|k| [Access::Noma, Access::Oma].map(|a| Scheme::new(k, a)))
            .collect()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let access = match self.access {
            Access::Noma => "noma",
            Access::Oma => "oma",
        };
        write!(f, "{}-{}", self.kind.as_str(), access)
    }
}

impl TryFrom<String> for Scheme {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        let (kind, access) = lower
            .rsplit_once('-')
            .ok_or_else(|| format!("scheme `{s}` must look like `coupled-noma`"))?;
        let kind = SchemeKind::parse(kind).ok_or_else(|| format!("unknown surface model `{kind}` in `{s}`"))?;
        let access = match access {
            "noma" => Access::Noma,
            "oma" => Access::Oma,
            other => return Err(format!("unknown access scheme `{other}` in `{s}`")),
        };
        Ok(Scheme { kind, access })
    }
}

impl From<Scheme> for String {
    fn from(s: Scheme) -> String {
        s.to_string()
    }
}

/// A named pair of rate targets in bit/s/Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateProfile {
    pub name: String,
    pub rate_t: f64,
    pub rate_r: f64,
}

impl RateProfile {
    pub fn new(name: &str, rate_t: f64, rate_r: f64) -> Self {
        Self {
            name: name.to_string(),
            rate_t,
            rate_r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub realizations: usize,
    pub master_seed: u64,
    pub n_values: Vec<usize>,
    pub schemes: Vec<Scheme>,
    /// Start each independent-phase run from the coupled solution of the
    /// same channel, so it can never do worse.
    pub warm_start_independent: bool,
    /// Worker threads; 0 uses one per core.
    pub workers: usize,
    /// Default output directory when none is given on the command line.
    pub output_dir: Option<PathBuf>,
    pub profiles: Vec<RateProfile>,
    pub scenario: Scenario,
    pub ao: AOConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            realizations: 100,
            master_seed: 20230101,
            n_values: vec![10, 20, 40],
            schemes: Scheme::all(),
            warm_start_independent: true,
            workers: 0,
            output_dir: None,
            profiles: vec![
                RateProfile::new("symmetric", 2.0, 2.0),
                RateProfile::new("asymmetric", 5.0, 1.0),
            ],
            scenario: Scenario::default(),
            ao: AOConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Self::parse_with_path(text, Path::new("<inline>"))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_with_path(&text, path)
    }

    fn parse_with_path(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.realizations == 0 {
            return Err(invalid("realizations", "must be at least 1"));
        }
        if self.n_values.is_empty() {
            return Err(invalid("n_values", "must list at least one element count"));
        }
        if self.schemes.is_empty() {
            return Err(invalid("schemes", "must list at least one scheme"));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(invalid(format!("schemes[{i}]"), format!("`{s}` is listed twice")));
            }
        }
        let conventional = self.schemes.iter().any(|s| s.kind == SchemeKind::Conventional);
        for (i, &n) in self.n_values.iter().enumerate() {
            if n == 0 {
                return Err(invalid(format!("n_values[{i}]"), "must be positive"));
            }
            if conventional && n % 2 != 0 {
                return Err(invalid(
                    format!("n_values[{i}]"),
                    format!("{n} is odd but a conventional scheme is requested"),
                ));
            }
            if self.n_values[..i].contains(&n) {
                return Err(invalid(format!("n_values[{i}]"), format!("{n} is listed twice")));
            }
        }
        if self.profiles.is_empty() {
            return Err(invalid("profiles", "must list at least one rate profile"));
        }
        for (i, p) in self.profiles.iter().enumerate() {
            let field = |f: &str| format!("profiles[{i}].{f}");
            if p.name.is_empty() || p.name.contains([',', '"', '\n']) {
                return Err(invalid(field("name"), "must be non-empty without commas or quotes"));
            }
            if self.profiles[..i].iter().any(|q| q.name == p.name) {
                return Err(invalid(field("name"), format!("`{}` is used twice", p.name)));
            }
            for (f, r) in [("rate_t", p.rate_t), ("rate_r", p.rate_r)] {
                if !(r.is_finite() && r >= 0.0) {
                    return Err(invalid(field(f), "must be a finite non-negative rate"));
                }
            }
        }
        self.scenario
            .validate()
            .map_err(|e| invalid("scenario", e.to_string()))?;
        self.ao.validate().map_err(|e| {
            let msg = e.to_string();
            invalid("ao", msg.trim_start_matches("invalid scenario: ").to_string())
        })?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(
            ExperimentConfig::from_toml_str("").unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_toml_str(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn scheme_names() {
        let s: Scheme = "Independent-OMA".to_string().try_into().unwrap();
        assert_eq!(s, Scheme::new(SchemeKind::Independent, Access::Oma));
        assert_eq!(s.to_string(), "independent-oma");
        assert!(Scheme::try_from("star-noma".to_string()).is_err());
        assert!(Scheme::try_from("coupled".to_string()).is_err());
    }

    #[test]
    fn field_level_errors() {
        let err = ExperimentConfig::from_toml_str("realizations = 0").unwrap_err();
        assert_eq!(err.to_string(), "realizations: must be at least 1");

        let err = ExperimentConfig::from_toml_str("n_values = [10, 15]").unwrap_err();
        assert!(err.to_string().starts_with("n_values[1]: 15 is odd"));

        let ok = ExperimentConfig::from_toml_str("n_values = [3]\nschemes = [\"coupled-noma\"]");
        assert!(ok.is_ok());

        let err = ExperimentConfig::from_toml_str("[ao]\nrel_tolerance = -1.0").unwrap_err();
        assert!(err.to_string().starts_with("ao: "));

        let err = ExperimentConfig::from_toml_str("bogus = 1").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
    }
}
