//! Run configuration: defaults, then an INI file, then command-line flags.

use std::path::{Path, PathBuf};

use grhcot_core::{Discriminant, PrecisionContext};
use ini::Ini;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub discriminant: i64,
    pub rel_tol: f64,
    pub threads: usize,
    pub cache: Option<PathBuf>,
    pub format: Format,
    /// Verbatim contents of the config file, if one was read.
    pub config_file: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            discriminant: -4,
            rel_tol: PrecisionContext::DEFAULT_REL_TOL,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cache: None,
            format: Format::Json,
            config_file: None,
        }
    }
}

/// Values given explicitly on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub discriminant: Option<i64>,
    pub rel_tol: Option<f64>,
    pub threads: Option<usize>,
    pub cache: Option<PathBuf>,
    pub format: Option<Format>,
}

fn bad(path: &Path, key: &str, value: &str) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: format!("invalid value {value:?} for {key}"),
    }
}

impl RunConfig {
    /// Flags win over the config file, which wins over `env_cache` and the defaults.
    pub fn resolve(config_path: Option<&Path>, env_cache: Option<PathBuf>, flags: Overrides) -> CliResult<Self> {
        let mut cfg = RunConfig {
            cache: env_cache,
            ..Default::default()
        };
        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let ini = Ini::load_from_str(&text).map_err(|e| CliError::Parse {
                path: path.to_path_buf(),
                line: e.line,
                message: e.msg.to_string(),
            })?;
            if let Some(section) = ini.sections().flatten().next() {
                return Err(CliError::Parse {
                    path: path.to_path_buf(),
                    line: 0,
                    message: format!("sections are not supported (found [{section}])"),
                });
            }
            for (key, value) in ini.general_section().iter() {
                match key {
                    "discriminant" => cfg.discriminant = value.parse().map_err(|_| bad(path, key, value))?,
                    "rel_tol" => cfg.rel_tol = value.parse().map_err(|_| bad(path, key, value))?,
                    "threads" => cfg.threads = value.parse().map_err(|_| bad(path, key, value))?,
                    "cache" => cfg.cache = Some(PathBuf::from(value)),
                    "format" => cfg.format = value.parse().map_err(|_| bad(path, key, value))?,
                    _ => {
                        return Err(CliError::Parse {
                            path: path.to_path_buf(),
                            line: 0,
                            message: format!("unknown key {key:?}"),
                        })
                    }
                }
            }
            cfg.config_file = Some(text);
        }
        if let Some(v) = flags.discriminant {
            cfg.discriminant = v;
        }
        if let Some(v) = flags.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = flags.threads {
            cfg.threads = v;
        }
        if let Some(v) = flags.cache {
            cfg.cache = Some(v);
        }
        if let Some(v) = flags.format {
            cfg.format = v;
        }
        if cfg.threads == 0 {
            return Err(CliError::Usage("threads must be positive".into()));
        }
        cfg.disc()?;
        cfg.context()?;
        Ok(cfg)
    }

    pub fn disc(&self) -> CliResult<Discriminant> {
        Ok(Discriminant::new(self.discriminant)?)
    }

    pub fn context(&self) -> CliResult<PrecisionContext> {
        Ok(PrecisionContext::default().with_rel_tol(self.rel_tol)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ini");
        std::fs::write(&path, "discriminant = -3\nrel_tol = 1e-9\ncache = from_file.cache\n").unwrap();
        let flags = Overrides {
            rel_tol: Some(1e-6),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Some(&path), Some("env.cache".into()), flags).unwrap();
        assert_eq!(cfg.discriminant, -3);
        assert_eq!(cfg.rel_tol, 1e-6);
        assert_eq!(cfg.cache, Some(PathBuf::from("from_file.cache")));
        assert!(cfg.config_file.unwrap().contains("rel_tol = 1e-9"));
        let cfg = RunConfig::resolve(None, Some("env.cache".into()), Overrides::default()).unwrap();
        assert_eq!(cfg.cache, Some(PathBuf::from("env.cache")));
        std::fs::write(&path, "discriminant = -5\n").unwrap();
        assert!(RunConfig::resolve(Some(&path), None, Overrides::default()).is_err());
        std::fs::write(&path, "colour = blue\n").unwrap();
        assert!(RunConfig::resolve(Some(&path), None, Overrides::default()).is_err());
    }
}
