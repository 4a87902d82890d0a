//! Run configuration loaded from TOML.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attribute::Tolerances;
use crate::catalog::{Catalog, CatalogError, FlagOverride, GlobalConstants, ProtocolId};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("run config: {0}")]
    Parse(String),
    #[error("run config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsOverride {
    pub delta: Option<u64>,
    pub sigma: Option<u64>,
    pub kappa: Option<u64>,
    pub memory_tolerance: Option<u64>,
}

impl ConstantsOverride {
    pub fn is_empty(&self) -> bool {
        *self == ConstantsOverride::default()
    }

    pub fn apply(&self, base: GlobalConstants) -> GlobalConstants {
        GlobalConstants {
            delta: self.delta.unwrap_or(base.delta),
            sigma: self.sigma.unwrap_or(base.sigma),
            kappa: self.kappa.unwrap_or(base.kappa),
        }
    }

    pub fn tolerances(&self, base: Tolerances) -> Tolerances {
        Tolerances {
            memory_bits: self.memory_tolerance.unwrap_or(base.memory_bits),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.delta == Some(0) || self.sigma == Some(0) {
            return Err(ConfigError::Invalid(
                "delta and sigma must be positive".into(),
            ));
        }
        if self.memory_tolerance == Some(0) {
            return Err(ConfigError::Invalid(
                "memory_tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Replacement catalog file; the embedded catalog otherwise.
    pub catalog: Option<PathBuf>,
    #[serde(default)]
    pub constants: ConstantsOverride,
    pub protocols: Option<Vec<ProtocolId>>,
    pub output_dir: Option<PathBuf>,
    pub port: Option<u16>,
    #[serde(default)]
    pub flags: BTreeMap<ProtocolId, FlagOverride>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = RunConfig::from_toml_str(&text)?;
        if let (Some(cat), Some(dir)) = (&cfg.catalog, path.parent()) {
            if cat.is_relative() {
                cfg.catalog = Some(dir.join(cat));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.constants.validate()?;
        if self.protocols.as_ref().is_some_and(|p| p.is_empty()) {
            return Err(ConfigError::Invalid(
                "protocols must not be empty when given".into(),
            ));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        self.constants.tolerances(Tolerances::default())
    }

    pub fn build_catalog(&self) -> Result<Catalog, ConfigError> {
        let mut catalog = match &self.catalog {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                    path: path.clone(),
                    source,
                })?;
                Catalog::from_toml_str(&text)?
            }
            None => Catalog::builtin(),
        };
        let constants = self.constants.apply(catalog.constants);
        catalog = catalog.with_constants(constants)?;
        for (&id, &flags) in &self.flags {
            catalog.override_flags(id, flags)?;
        }
        Ok(catalog)
    }

    pub fn enabled_protocols(&self, catalog: &Catalog) -> Vec<ProtocolId> {
        self.protocols
            .clone()
            .unwrap_or_else(|| catalog.protocols())
    }
}
