//! Estimation parameters that are not part of the measured catalog.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::BaselineOverrides;
use crate::quantity::CarbonIntensity;

// Equivalency factors. Sources:
//   EPA Greenhouse Gas Equivalencies Calculator, "Calculations and References":
//     gasoline passenger vehicle, 3.93e-4 metric tons CO2e per mile driven;
//     urban tree seedling grown for 10 years, 0.060 metric tons CO2 sequestered.
//   The calculator has no air-travel entry, so the flight factor uses the EPA
//   GHG Emission Factors Hub business-travel value for medium-haul flights
//   (0.129 kg CO2 per passenger-mile) at an assumed 500 mph block speed.
// Recorded 2026-10-16.
const KM_PER_MILE: f64 = 1.609344;
const VEHICLE_KG_PER_MILE: f64 = 0.393;
const FLIGHT_KG_PER_PASSENGER_MILE: f64 = 0.129;
const FLIGHT_MILES_PER_HOUR: f64 = 500.0;
const TREE_SEEDLING_KG: f64 = 60.0;

pub const DEFAULT_CAR_KM_PER_KG: f64 = KM_PER_MILE / VEHICLE_KG_PER_MILE;
pub const DEFAULT_FLIGHT_MINUTES_PER_KG: f64 =
    60.0 / (FLIGHT_KG_PER_PASSENGER_MILE * FLIGHT_MILES_PER_HOUR);
pub const DEFAULT_TREE_SEEDLINGS_PER_KG: f64 = 1.0 / TREE_SEEDLING_KG;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config value `{field}` is out of range: {value}")]
    OutOfRange { field: String, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalencyFactors {
    pub car_km_per_kg: f64,
    pub flight_minutes_per_kg: f64,
    pub tree_seedlings_per_kg: f64,
}

impl Default for EquivalencyFactors {
    fn default() -> Self {
        Self {
            car_km_per_kg: DEFAULT_CAR_KM_PER_KG,
            flight_minutes_per_kg: DEFAULT_FLIGHT_MINUTES_PER_KG,
            tree_seedlings_per_kg: DEFAULT_TREE_SEEDLINGS_PER_KG,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingDefaults {
    pub device_power_watts: f64,
    pub pue: f64,
}

impl Default for TrainingDefaults {
    fn default() -> Self {
        Self {
            device_power_watts: 350.0,
            pue: 1.2,
        }
    }
}

/// Thresholds for the mitigation rule registry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HintThresholds {
    /// Unit count above which a data-collection entry counts as large-scale generation.
    pub large_generation_units: f64,
    /// Resolution factor above which an entry counts as high task load.
    pub resolution_factor: f64,
}

impl Default for HintThresholds {
    fn default() -> Self {
        Self {
            large_generation_units: 10_000.0,
            resolution_factor: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimationConfig {
    pub carbon_intensity: CarbonIntensity,
    pub equivalency_factors: EquivalencyFactors,
    pub training_defaults: TrainingDefaults,
    #[serde(skip_serializing_if = "BaselineOverrides::is_empty")]
    pub baselines: BaselineOverrides,
    pub hint_thresholds: HintThresholds,
    /// Free-form source notes for the constants above.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub provenance: BTreeMap<String, String>,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        let provenance = [
            (
                "carbon_intensity",
                "global average grid carbon intensity, Our World in Data",
            ),
            (
                "equivalency_factors",
                "EPA Greenhouse Gas Equivalencies Calculator (vehicle 3.93e-4 t/mile, \
                 tree seedling 0.060 t); flight from EPA Emission Factors Hub medium-haul \
                 0.129 kg/passenger-mile at 500 mph; recorded 2026-10-16",
            ),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
        Self {
            carbon_intensity: CarbonIntensity::GLOBAL_AVERAGE,
            equivalency_factors: EquivalencyFactors::default(),
            training_defaults: TrainingDefaults::default(),
            baselines: BaselineOverrides::default(),
            hint_thresholds: HintThresholds::default(),
            provenance,
        }
    }
}

impl EstimationConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("config serializes");
        out.push('\n');
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("carbon_intensity", self.carbon_intensity.0),
            (
                "equivalency_factors.car_km_per_kg",
                self.equivalency_factors.car_km_per_kg,
            ),
            (
                "equivalency_factors.flight_minutes_per_kg",
                self.equivalency_factors.flight_minutes_per_kg,
            ),
            (
                "equivalency_factors.tree_seedlings_per_kg",
                self.equivalency_factors.tree_seedlings_per_kg,
            ),
            (
                "training_defaults.device_power_watts",
                self.training_defaults.device_power_watts,
            ),
            (
                "hint_thresholds.resolution_factor",
                self.hint_thresholds.resolution_factor,
            ),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::OutOfRange {
                    field: field.to_string(),
                    value,
                });
            }
        }
        let pue = self.training_defaults.pue;
        if !(pue.is_finite() && pue >= 1.0) {
            return Err(ConfigError::OutOfRange {
                field: "training_defaults.pue".into(),
                value: pue,
            });
        }
        let large = self.hint_thresholds.large_generation_units;
        if !(large.is_finite() && large >= 0.0) {
            return Err(ConfigError::OutOfRange {
                field: "hint_thresholds.large_generation_units".into(),
                value: large,
            });
        }
        if let Some((name, value)) = self.baselines.invalid_field() {
            return Err(ConfigError::OutOfRange {
                field: format!("baselines.{name}"),
                value,
            });
        }
        Ok(())
    }
}
