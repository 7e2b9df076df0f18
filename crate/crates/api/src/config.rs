use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid value for {name}: {value:?}")]
    Env { name: &'static str, value: String },
    #[error("no storage path configured; set storage_path in the config file or TAAS_STORAGE_PATH")]
    MissingStoragePath,
}

/// Argon2 cost parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(default)]
pub struct HashCost {
    pub memory_kib: u32,
    pub iterations: u32,
}

impl Default for HashCost {
    fn default() -> Self {
        Self {
            memory_kib: 19 * 1024,
            iterations: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub listen: SocketAddr,
    pub storage_path: Option<PathBuf>,
    pub token_ttl_secs: u64,
    pub password_hash: HashCost,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            storage_path: None,
            token_ttl_secs: 24 * 60 * 60,
            password_hash: HashCost::default(),
        }
    }
}

impl Config {
    /// Reads `path` (when given) and applies `TAAS_LISTEN`,
    /// `TAAS_STORAGE_PATH` and `TAAS_TOKEN_TTL_SECS` from the environment.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut config = match path {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        config.apply_env(|name| std::env::var(name).ok())?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_owned(),
            message: e.message().to_owned(),
        })
    }

    pub fn apply_env(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(value) = var("TAAS_LISTEN") {
            self.listen = value.parse().map_err(|_| ConfigError::Env {
                name: "TAAS_LISTEN",
                value,
            })?;
        }
        if let Some(value) = var("TAAS_STORAGE_PATH") {
            self.storage_path = Some(PathBuf::from(value));
        }
        if let Some(value) = var("TAAS_TOKEN_TTL_SECS") {
            self.token_ttl_secs = value.parse().map_err(|_| ConfigError::Env {
                name: "TAAS_TOKEN_TTL_SECS",
                value,
            })?;
        }
        Ok(())
    }

    pub fn require_storage_path(&self) -> Result<&Path, ConfigError> {
        self.storage_path.as_deref().ok_or(ConfigError::MissingStoragePath)
    }
}
