//! Run configuration: a TOML file merged under command-line flags.

use std::path::{Path, PathBuf};

use doiforge::harness::{SuiteOptions, TheoremId};
use doiforge::NormSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Keys accepted in the config file; every one is optional.
///
/// ```toml
/// theorems = ["thm11", "cor12"]   # or ["all"]
/// seed = 42
/// trials = 100
/// n = 8
/// alpha = 1.0
/// theta = 0.5
/// p = 2.0
/// r = 1.5
/// norm = "schatten:2"
/// quick = false
/// tol = 1e-9
/// out = "reports"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub theorems: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub norm: Option<String>,
    pub quick: Option<bool>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// `other` wins wherever it has a value.
    pub fn overlay(self, other: FileConfig) -> FileConfig {
        FileConfig {
            theorems: other.theorems.or(self.theorems),
            seed: other.seed.or(self.seed),
            trials: other.trials.or(self.trials),
            n: other.n.or(self.n),
            alpha: other.alpha.or(self.alpha),
            theta: other.theta.or(self.theta),
            p: other.p.or(self.p),
            r: other.r.or(self.r),
            norm: other.norm.or(self.norm),
            quick: other.quick.or(self.quick),
            tol: other.tol.or(self.tol),
            out: other.out.or(self.out),
        }
    }
}

/// Fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub theorems: Vec<TheoremId>,
    pub options: SuiteOptions,
    pub out: PathBuf,
}

pub const DEFAULT_OUT: &str = "doiforge-out";

fn parse_ids(names: &[String]) -> Result<Vec<TheoremId>, CliError> {
    let mut ids = Vec::new();
    for name in names {
        if name.eq_ignore_ascii_case("all") {
            ids.extend(TheoremId::ALL);
        } else {
            ids.push(
                name.parse()
                    .map_err(|e: doiforge::Error| CliError::Config(e.to_string()))?,
            );
        }
    }
    ids.sort();
    ids.dedup();
    if ids.is_empty() {
        return Err(CliError::Config("no theorem selected".into()));
    }
    Ok(ids)
}

impl RunConfig {
    pub fn resolve(cfg: FileConfig) -> Result<Self, CliError> {
        let theorems = parse_ids(cfg.theorems.as_deref().unwrap_or(&["all".to_string()]))?;
        let norm = cfg
            .norm
            .as_deref()
            .map(|s| s.parse::<NormSpec>())
            .transpose()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let options = SuiteOptions {
            seed: cfg.seed.ok_or_else(|| {
                CliError::Config("a seed is required: pass --seed or set `seed`".into())
            })?,
            trials: cfg.trials,
            n: cfg.n,
            alpha: cfg.alpha,
            theta: cfg.theta,
            p: cfg.p,
            r: cfg.r,
            norm,
            quick: cfg.quick.unwrap_or(false),
            tol: cfg.tol,
        };
        options
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self {
            theorems,
            options,
            out: cfg.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: FileConfig =
            toml::from_str("seed = 3\ntrials = 10\nnorm = \"schatten:1\"").unwrap();
        let flags = FileConfig {
            seed: Some(9),
            ..FileConfig::default()
        };
        let run = RunConfig::resolve(file.overlay(flags)).unwrap();
        assert_eq!(run.options.seed, 9);
        assert_eq!(run.options.trials, Some(10));
        assert_eq!(run.options.norm, Some(NormSpec::Schatten(1.0)));
        assert_eq!(run.theorems.len(), TheoremId::ALL.len());
    }

    #[test]
    fn bad_values_are_config_errors() {
        assert!(toml::from_str::<FileConfig>("sed = 3").is_err());
        let seeded = FileConfig {
            seed: Some(1),
            ..FileConfig::default()
        };
        for bad in [
            FileConfig::default(),
            FileConfig {
                alpha: Some(0.0),
                ..seeded.clone()
            },
            FileConfig {
                norm: Some("schatten:0.5".into()),
                ..seeded.clone()
            },
            FileConfig {
                theorems: Some(vec!["thm99".into()]),
                ..seeded
            },
        ] {
            assert!(matches!(RunConfig::resolve(bad), Err(CliError::Config(_))));
        }
    }
}
