use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::spec::{Automation, LayoutCategory, LayoutType};
use super::DatasetError;
use crate::metrics::SvrWeights;

/// The configuration shipped with the crate.
pub const DEFAULT_CONFIG: &str = include_str!("../../config/default.toml");

pub const MAX_MACHINES: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineRange {
    pub min: usize,
    pub max: usize,
}

/// Relative weights per layer value. Missing layers are uniform.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Marginals {
    #[serde(default)]
    pub layout_type: BTreeMap<String, f64>,
    #[serde(default)]
    pub automation: BTreeMap<String, f64>,
    #[serde(default)]
    pub layout_category: BTreeMap<String, f64>,
    #[serde(default)]
    pub industry: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeRanges {
    pub normal_cv: [f64; 2],
    pub bounded_half_width: [f64; 2],
    pub lognormal_sigma: [f64; 2],
    pub weibull_shape: [f64; 2],
    pub gamma_shape: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndustryProfile {
    pub name: String,
    #[serde(default)]
    pub placeholder: bool,
    pub arrival_mean: [f64; 2],
    pub service_mean: [f64; 2],
    /// Multiplies the automation-level travel speed.
    pub speed_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scoring {
    pub cs_weight: f64,
    pub os_weight: f64,
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    pub version: u32,
    pub machines: MachineRange,
    #[serde(default)]
    pub marginals: Marginals,
    pub shape: ShapeRanges,
    pub automation_speed: BTreeMap<String, f64>,
    pub scoring: Scoring,
    #[serde(rename = "industry")]
    pub industries: Vec<IndustryProfile>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig::from_toml_str(DEFAULT_CONFIG).expect("bundled config is valid")
    }
}

fn range_ok(r: [f64; 2]) -> bool {
    r[0] > 0.0 && r[0] <= r[1] && r[1].is_finite()
}

impl GenConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, DatasetError> {
        let config: GenConfig =
            toml::from_str(text).map_err(|e| DatasetError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, DatasetError> {
        let text = std::fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn industry(&self, name: &str) -> Option<&IndustryProfile> {
        self.industries.iter().find(|p| p.name == name)
    }

    pub fn svr_weights(&self) -> Result<SvrWeights<f64>, DatasetError> {
        SvrWeights::new(self.scoring.cs_weight, self.scoring.os_weight)
            .map_err(|e| DatasetError::Config(e.to_string()))
    }

    /// Travel speed for `automation` in `industry`.
    pub fn travel_speed(&self, automation: Automation, industry: &IndustryProfile) -> f64 {
        self.automation_speed
            .get(automation.as_str())
            .map_or(0.0, |s| s * industry.speed_factor)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let fail = |msg: String| Err(DatasetError::Config(msg));
        let MachineRange { min, max } = self.machines;
        if min < 1 || min > max || max > MAX_MACHINES {
            return fail(format!("machine range [{min}, {max}] must lie within [1, {MAX_MACHINES}]"));
        }
        if self.industries.is_empty() {
            return fail("no industries configured".into());
        }
        for (i, p) in self.industries.iter().enumerate() {
            if self.industries[..i].iter().any(|q| q.name == p.name) {
                return fail(format!("industry `{}` listed twice", p.name));
            }
            if !range_ok(p.arrival_mean) || !range_ok(p.service_mean) {
                return fail(format!("industry `{}` has an empty or non-positive range", p.name));
            }
            if !(p.speed_factor > 0.0 && p.speed_factor.is_finite()) {
                return fail(format!("industry `{}` speed factor must be positive", p.name));
            }
        }
        let s = &self.shape;
        for (name, r) in [
            ("normal_cv", s.normal_cv),
            ("bounded_half_width", s.bounded_half_width),
            ("lognormal_sigma", s.lognormal_sigma),
            ("weibull_shape", s.weibull_shape),
            ("gamma_shape", s.gamma_shape),
        ] {
            if !range_ok(r) {
                return fail(format!("shape range `{name}` is empty or non-positive"));
            }
        }
        if s.normal_cv[1] > 0.25 {
            return fail("normal_cv above 0.25 risks negative service times".into());
        }
        if s.bounded_half_width[1] >= 1.0 {
            return fail("bounded_half_width must stay below 1".into());
        }
        for a in Automation::ALL.iter().filter(|a| **a != Automation::Manual) {
            match self.automation_speed.get(a.as_str()) {
                Some(v) if *v > 0.0 && v.is_finite() => {}
                _ => return fail(format!("missing or invalid speed for `{a}`")),
            }
        }
        check_weights(&self.marginals.layout_type, LayoutType::ALL.iter().map(|v| v.as_str()))?;
        check_weights(&self.marginals.automation, Automation::ALL.iter().map(|v| v.as_str()))?;
        check_weights(
            &self.marginals.layout_category,
            LayoutCategory::ALL.iter().map(|v| v.as_str()),
        )?;
        check_weights(
            &self.marginals.industry,
            self.industries.iter().map(|p| p.name.as_str()),
        )?;
        self.svr_weights()?;
        if !(self.scoring.horizon > 0.0 && self.scoring.horizon.is_finite()) {
            return fail("horizon must be positive".into());
        }
        Ok(())
    }

    pub(crate) fn weights<'a>(
        table: &BTreeMap<String, f64>,
        names: impl Iterator<Item = &'a str>,
    ) -> Vec<f64> {
        names
            .map(|n| if table.is_empty() { 1.0 } else { table.get(n).copied().unwrap_or(0.0) })
            .collect()
    }
}

fn check_weights<'a>(
    table: &BTreeMap<String, f64>,
    mut names: impl Iterator<Item = &'a str> + Clone,
) -> Result<(), DatasetError> {
    if table.is_empty() {
        return Ok(());
    }
    for (k, v) in table {
        if !names.clone().any(|n| n == k) {
            return Err(DatasetError::Config(format!("unknown marginal key `{k}`")));
        }
        if !(*v >= 0.0 && v.is_finite()) {
            return Err(DatasetError::Config(format!("marginal weight for `{k}` must be >= 0")));
        }
    }
    if !names.any(|n| table.get(n).is_some_and(|w| *w > 0.0)) {
        return Err(DatasetError::Config("marginal weights sum to zero".into()));
    }
    Ok(())
}
