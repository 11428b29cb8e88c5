//! TOML experiment configuration.  Every field is optional; command-line
//! flags take precedence over the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "InstanceConfig::is_empty")]
    pub instance: InstanceConfig,
    #[serde(default, skip_serializing_if = "GridConfig::is_empty")]
    pub grids: GridConfig,
    #[serde(default, skip_serializing_if = "FamilyConfig::is_empty")]
    pub family: FamilyConfig,
    #[serde(default, skip_serializing_if = "OutputConfig::is_empty")]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "ToleranceConfig::is_empty")]
    pub tolerances: ToleranceConfig,
}

/// Graph spec, labeling and sampling seed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partitions: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub char_out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
}

macro_rules! all_none {
    ($ty:ident { $($field:ident),* }) => {
        impl $ty {
            fn is_empty(&self) -> bool {
                true $(&& self.$field.is_none())*
            }
        }
    };
}

all_none!(InstanceConfig { graph, labels, seed, samples });
all_none!(GridConfig { t, c, a, theta_points, partitions });
all_none!(FamilyConfig { p, sigma2 });
all_none!(OutputConfig { out, plot, char_out });
all_none!(ToleranceConfig { series_tol, max_t, max_n });

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Every grid that is present must be nonempty.
    pub fn validate(&self) -> Result<()> {
        let g = &self.grids;
        let empty = [
            ("t", g.t.as_ref().is_some_and(Vec::is_empty)),
            ("c", g.c.as_ref().is_some_and(Vec::is_empty)),
            ("a", g.a.as_ref().is_some_and(Vec::is_empty)),
            ("partitions", g.partitions.as_ref().is_some_and(Vec::is_empty)),
            ("theta_points", g.theta_points == Some(0)),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::InvalidArgument(format!("grid `{name}` is empty")));
        }
        if let Some(bad) = g.partitions.iter().flatten().find(|p| p.is_empty() || p.contains(&0)) {
            return Err(Error::InvalidArgument(format!("partition {bad:?} must have positive parts")));
        }
        Ok(())
    }
}
