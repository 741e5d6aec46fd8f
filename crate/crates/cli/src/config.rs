//! Run configuration. A report embeds the exact config it was produced with,
//! so a report plus the binary is enough to reproduce it.

use std::collections::BTreeMap;

use cba33::linalg::{DEFAULT_EIG_CAP, DEFAULT_EMBED_CAP};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Matrix identities: constraints, algebra relations, unitarity,
    /// regularity, transfer commutation, Bethe form.
    pub identity: f64,
    /// Multiset comparison of one-magnon predictions with exact spectra.
    pub eigen: f64,
    pub ybe: f64,
    /// Containment of Bethe energies in the exact two-particle spectrum.
    pub bethe: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-10,
            eigen: 1e-8,
            ybe: 1e-9,
            bethe: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Largest full-chain dimension built explicitly.
    pub embed: usize,
    /// Largest matrix handed to the eigenvalue solver.
    pub eig: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            embed: DEFAULT_EMBED_CAP,
            eig: DEFAULT_EIG_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Ybe,
    Spectrum,
    Reshetikhin,
    All,
}

/// What the Reshetikhin check is expected to find. `Report` makes it
/// informational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    #[default]
    Report,
    Holds,
    Fails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Text,
    Structured,
}

/// A catalog spec after parsing: every complex value as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogSpec {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, [f64; 2]>,
    pub m24: [f64; 2],
    pub m42: [f64; 2],
    #[serde(default)]
    pub free: BTreeMap<String, [f64; 2]>,
    pub branch: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSource {
    /// Nonzero entries of `h`, keyed `mIJ` (1-based).
    Inline {
        entries: BTreeMap<String, [f64; 2]>,
    },
    Catalog {
        spec: CatalogSpec,
    },
    /// Not yet read; replaced by one of the other variants before a run.
    File {
        path: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Random draws per randomized check.
    pub draws: usize,
    pub caps: Caps,
    /// Chain length `L`.
    pub len: usize,
    /// Particle number `M`.
    pub particles: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    #[serde(default)]
    pub reshetikhin_expect: Expectation,
    /// Hecke branch override for catalog specs (`0+`, `1-`, ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSource>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerances: Tolerances::default(),
            draws: 20,
            caps: Caps::default(),
            len: 6,
            particles: 2,
            suite: None,
            reshetikhin_expect: Expectation::Report,
            branch: None,
            model: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips() {
        let cfg = SuiteConfig {
            suite: Some(Suite::All),
            model: Some(ModelSource::Inline {
                entries: [("m11".to_string(), [1.0, -0.5])].into(),
            }),
            ..SuiteConfig::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: SuiteConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let mut v = serde_json::to_value(SuiteConfig::default()).unwrap();
        v["sead"] = 3.into();
        assert!(serde_json::from_value::<SuiteConfig>(v).is_err());
    }
}
