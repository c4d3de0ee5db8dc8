//! Versioned JSON configuration shared by the command-line verbs.

use serde::{Deserialize, Serialize};

use crate::equidist::{BumpProfile, DecayOptions};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    #[serde(default)]
    pub field_d: i64,
    /// Seed for the randomised probe points of `check`.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<String>,
    #[serde(default)]
    pub eval: EvalParams,
    #[serde(default)]
    pub check: CheckParams,
    #[serde(default)]
    pub equidist: EquidistParams,
}

fn default_seed() -> u64 {
    1
}

/// Parameters of `eval`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalParams {
    /// `[Re s, Im s]`.
    pub s: [f64; 2],
    /// One `[Re x, Im x, y]` per place; `Im x` is ignored at real places.
    pub z: Option<Vec<[f64; 3]>>,
    pub fourier_terms: u32,
    pub norm_bound: f64,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams { s: [2.0, 0.0], z: None, fourier_terms: 45, norm_bound: 1e6 }
    }
}

/// Parameters of `check`. A missing tolerance means the per-check default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckParams {
    pub tolerance: Option<f64>,
    /// `s` for Maass-Selberg and Rankin-Selberg.
    pub s: Option<[f64; 2]>,
    /// Second spectral parameter for Maass-Selberg.
    pub s2: [f64; 2],
    /// Truncation height for Maass-Selberg and the `M_T` volume identity.
    pub t: f64,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams { tolerance: None, s: None, s2: [1.25, 0.0], t: 3.0 }
    }
}

/// Parameters of `equidist`. Missing grid bounds fall back to `[3, 12]` for
/// `Q` and `[2, 8]` for quadratic fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquidistParams {
    pub k_min: Option<i32>,
    pub k_max: Option<i32>,
    pub profile: BumpProfile,
    pub refinement: DecayOptions,
    pub svg: bool,
}

impl Default for EquidistParams {
    fn default() -> Self {
        EquidistParams { k_min: None, k_max: None, profile: BumpProfile::standard(), refinement: DecayOptions::default(), svg: true }
    }
}

impl EquidistParams {
    pub fn grid(&self, degree: usize) -> (i32, i32) {
        let (a, b) = if degree == 1 { (3, 12) } else { (2, 8) };
        (self.k_min.unwrap_or(a), self.k_max.unwrap_or(b))
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema: SCHEMA_VERSION,
            field_d: 0,
            seed: default_seed(),
            output_path: None,
            eval: EvalParams::default(),
            check: CheckParams::default(),
            equidist: EquidistParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!("unsupported config schema {}", cfg.schema)));
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"schema": 1, "field_d": 5}"#).unwrap();
        assert_eq!(cfg.field_d, 5);
        assert_eq!(cfg.equidist.grid(2), (2, 8));
        assert_eq!(cfg.check.t, 3.0);
    }

    #[test]
    fn rejects_other_schemas_and_unknown_keys() {
        assert!(ExperimentConfig::from_json(r#"{"schema": 2}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"schema": 1, "feild_d": 5}"#).is_err());
    }

    #[test]
    fn nested_sections_may_be_partial() {
        let text = r#"{"schema": 1, "equidist": {"profile": {"width": 0.4}, "refinement": {"rel_tol": 0.1}}}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.equidist.profile.width, 0.4);
        assert_eq!(cfg.equidist.profile.t0, BumpProfile::standard().t0);
        assert_eq!(cfg.equidist.refinement.max_nodes, DecayOptions::default().max_nodes);
        assert!(ExperimentConfig::from_json(r#"{"schema": 1, "equidist": {"profile": {"wdth": 1}}}"#).is_err());
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }
}
