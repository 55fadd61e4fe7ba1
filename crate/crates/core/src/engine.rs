//! Calculation kernel.
//!
//! A validated use case is aggregated into a unit count `N`, converted to
//! energy with the task's per-interaction constant (`E = N * E_p`) and to a
//! carbon mass with the grid intensity (`C = CI * E`). All functions here are
//! pure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{
    Catalog, FieldRole, Modality, ResearchPhase, Resolution, TaskKind, TaskType, ValidatedUseCase,
};
use crate::config::EstimationConfig;
use crate::quantity::{CarbonKg, EnergyKWh, UnitCount};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("no catalog task produces {0} output")]
    NoTaskForOutput(Modality),
    #[error("at least one input modality is required")]
    NoInputs,
    #[error("`{field}` is out of range: {value}")]
    OutOfRange { field: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Equivalencies {
    pub car_km: f64,
    pub flight_minutes: f64,
    pub tree_seedlings: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub unit_count: UnitCount,
    pub energy: EnergyKWh,
    pub carbon: CarbonKg,
    pub equivalencies: Equivalencies,
    pub assumptions: Vec<String>,
}

/// Estimate for one ledger entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryEstimate {
    pub entry_id: String,
    pub phase: ResearchPhase,
    pub kind: String,
    pub task: TaskKind,
    pub estimate: Estimate,
}

/// The three factors whose product is the unit count.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregation {
    pub base_count: f64,
    pub resolution_factor: f64,
    pub interaction_factor: f64,
    pub unit_count: UnitCount,
    pub assumptions: Vec<String>,
}

/// Baseline resolution of `task` after config overrides.
pub fn effective_baseline(task: &TaskType, config: &EstimationConfig) -> Option<Resolution> {
    task.baseline_resolution.map(|b| config.baselines.apply(b))
}

pub fn aggregate(entry: &ValidatedUseCase, config: &EstimationConfig) -> Aggregation {
    let baseline = effective_baseline(&entry.task, config);
    let mut assumptions: Vec<String> = entry
        .params
        .defaulted
        .iter()
        .map(|id| {
            format!(
                "{id} defaulted to {}",
                entry.params.get(id).unwrap_or_default()
            )
        })
        .collect();

    let mut base_count: f64 = entry
        .role_values(FieldRole::Usage)
        .map(|(_, v)| v)
        .product();
    if let Some(Resolution::Minutes { minutes }) = baseline {
        for (_, v) in entry.role_values(FieldRole::AudioMinutes) {
            base_count = base_count * v / minutes;
        }
    }
    if let Some(Resolution::Words { words }) = baseline {
        let mut item_words = entry.role_values(FieldRole::ItemWords).peekable();
        if item_words.peek().is_some() {
            assumptions.push(format!(
                "word counts scaled against a {words}-word baseline"
            ));
        }
        for (_, v) in item_words {
            base_count = base_count * v / words;
        }
    }

    let mut resolution_factor = 1.0;
    let mut resolution_supplied = false;
    match baseline {
        Some(Resolution::Words { words }) => {
            for (_, v) in entry.role_values(FieldRole::PromptWords) {
                resolution_factor *= v / words;
                resolution_supplied = true;
            }
        }
        Some(Resolution::Pixels { width, height }) => {
            let w = entry
                .role_values(FieldRole::ImageWidth)
                .next()
                .map(|(_, v)| v);
            let h = entry
                .role_values(FieldRole::ImageHeight)
                .next()
                .map(|(_, v)| v);
            if w.is_some() || h.is_some() {
                resolution_factor = (w.unwrap_or(width) * h.unwrap_or(height)) / (width * height);
                resolution_supplied = true;
            }
        }
        Some(Resolution::Seconds { seconds }) => {
            for (_, v) in entry.role_values(FieldRole::ClipSeconds) {
                resolution_factor *= v / seconds;
                resolution_supplied = true;
            }
        }
        Some(Resolution::Minutes { .. }) | None => {}
    }
    let has_resolution_fields = entry
        .kind
        .parameter_schema
        .iter()
        .any(|f| f.role.is_resolution() && f.role.applies_to(baseline));
    if !resolution_supplied && has_resolution_fields {
        if let Some(b) = baseline {
            assumptions.push(format!(
                "{} assumed at the measured baseline of {b}",
                entry.task.id
            ));
        }
    }

    let interaction_factor = if entry.kind.declares(FieldRole::TestRuns)
        || entry.kind.declares(FieldRole::Interactions)
    {
        entry
            .role_values(FieldRole::TestRuns)
            .chain(entry.role_values(FieldRole::Interactions))
            .map(|(_, v)| v)
            .sum()
    } else {
        1.0
    };

    Aggregation {
        base_count,
        resolution_factor,
        interaction_factor,
        unit_count: UnitCount(base_count * resolution_factor * interaction_factor),
        assumptions,
    }
}

/// Aggregated canonical unit count N of a use case.
pub fn unit_count(entry: &ValidatedUseCase, config: &EstimationConfig) -> UnitCount {
    aggregate(entry, config).unit_count
}

/// E = N * E_p, with E_p converted from Wh to kWh.
pub fn energy_for(task: &TaskType, n: UnitCount) -> EnergyKWh {
    task.energy_per_unit_kwh * n
}

/// C = CI * E.
pub fn footprint(energy: EnergyKWh, config: &EstimationConfig) -> CarbonKg {
    energy * config.carbon_intensity
}

pub fn equivalencies(carbon: CarbonKg, config: &EstimationConfig) -> Equivalencies {
    let f = &config.equivalency_factors;
    Equivalencies {
        car_km: carbon.0 * f.car_km_per_kg,
        flight_minutes: carbon.0 * f.flight_minutes_per_kg,
        tree_seedlings: carbon.0 * f.tree_seedlings_per_kg,
    }
}

/// Collapses a multi-modal request onto a single measured task.
///
/// The heaviest input modality is paired with `output`. If the catalog has no
/// such task, the task with the largest per-unit energy among those producing
/// `output` is chosen instead.
pub fn reduce_modality(
    inputs: &[Modality],
    output: Modality,
    catalog: &Catalog,
) -> Result<TaskKind, EstimationError> {
    let heaviest = inputs
        .iter()
        .copied()
        .max_by_key(|m| m.heaviness())
        .ok_or(EstimationError::NoInputs)?;
    if let Some(task) = catalog
        .tasks()
        .iter()
        .find(|t| t.id.input() == heaviest && t.id.output() == output)
    {
        return Ok(task.id);
    }
    catalog
        .tasks()
        .iter()
        .filter(|t| t.id.output() == output)
        .max_by(|a, b| a.energy_per_unit.0.total_cmp(&b.energy_per_unit.0))
        .map(|t| t.id)
        .ok_or(EstimationError::NoTaskForOutput(output))
}

fn carbon_intensity_note(config: &EstimationConfig) -> String {
    format!(
        "carbon intensity {} kgCO2e/kWh",
        config.carbon_intensity.value()
    )
}

/// Full estimate for one validated use case.
pub fn estimate_use_case(
    entry: &ValidatedUseCase,
    config: &EstimationConfig,
) -> Result<Estimate, EstimationError> {
    if entry.kind.declares(FieldRole::GpuHours) {
        return estimate_training_use_case(entry, config);
    }
    let agg = aggregate(entry, config);
    let energy = energy_for(&entry.task, agg.unit_count);
    let carbon = footprint(energy, config);
    let mut assumptions = vec![format!(
        "{} per {} for {} (proxy model {})",
        entry.task.energy_per_unit,
        entry.task.canonical_unit.as_str(),
        entry.task.id,
        entry.task.proxy_model
    )];
    assumptions.extend(agg.assumptions);
    assumptions.push(carbon_intensity_note(config));
    Ok(Estimate {
        unit_count: agg.unit_count,
        energy,
        carbon,
        equivalencies: equivalencies(carbon, config),
        assumptions,
    })
}

fn estimate_training_use_case(
    entry: &ValidatedUseCase,
    config: &EstimationConfig,
) -> Result<Estimate, EstimationError> {
    let value = |role| entry.role_values(role).next().map(|(_, v)| v);
    let gpu_hours = value(FieldRole::GpuHours).unwrap_or_default();
    let mut defaults = Vec::new();
    let watts = value(FieldRole::DevicePower).unwrap_or_else(|| {
        let w = config.training_defaults.device_power_watts;
        defaults.push(format!("device power defaulted to {w} W"));
        w
    });
    let pue = value(FieldRole::Pue).unwrap_or_else(|| {
        let p = config.training_defaults.pue;
        defaults.push(format!("PUE defaulted to {p}"));
        p
    });
    let mut estimate = estimate_training(gpu_hours, watts, pue, config)?;
    let tail = estimate.assumptions.split_off(1);
    estimate
        .assumptions
        .extend(entry.params.defaulted.iter().map(|id| {
            format!(
                "{id} defaulted to {}",
                entry.params.get(id).unwrap_or_default()
            )
        }));
    estimate.assumptions.extend(defaults);
    estimate.assumptions.extend(tail);
    Ok(estimate)
}

/// Energy from accelerator time: E = hours * watts / 1000 * PUE.
pub fn estimate_training(
    gpu_hours: f64,
    device_power_watts: f64,
    pue: f64,
    config: &EstimationConfig,
) -> Result<Estimate, EstimationError> {
    if !(gpu_hours.is_finite() && gpu_hours >= 0.0) {
        return Err(EstimationError::OutOfRange {
            field: "gpu_hours",
            value: gpu_hours,
        });
    }
    if !(device_power_watts.is_finite() && device_power_watts > 0.0) {
        return Err(EstimationError::OutOfRange {
            field: "device_power_watts",
            value: device_power_watts,
        });
    }
    if !(pue.is_finite() && pue >= 1.0) {
        return Err(EstimationError::OutOfRange {
            field: "pue",
            value: pue,
        });
    }
    let energy = EnergyKWh(gpu_hours * device_power_watts / 1000.0 * pue);
    let carbon = footprint(energy, config);
    Ok(Estimate {
        unit_count: UnitCount(gpu_hours),
        energy,
        carbon,
        equivalencies: equivalencies(carbon, config),
        assumptions: vec![
            format!(
                "hardware-parameter estimate: {gpu_hours} GPU-hours at {device_power_watts} W \
                 with PUE {pue}; unit count reports GPU-hours"
            ),
            carbon_intensity_note(config),
        ],
    })
}

/// Sums per-entry estimates in order. Equivalencies come from the summed
/// carbon; assumptions are deduplicated keeping first occurrence.
pub fn combine<'a>(
    parts: impl IntoIterator<Item = &'a EntryEstimate>,
    config: &EstimationConfig,
) -> Estimate {
    let mut unit_count = UnitCount::ZERO;
    let mut energy = EnergyKWh::ZERO;
    let mut carbon = CarbonKg::ZERO;
    let mut assumptions: Vec<String> = Vec::new();
    for part in parts {
        unit_count = unit_count + part.estimate.unit_count;
        energy = energy + part.estimate.energy;
        carbon = carbon + part.estimate.carbon;
        for a in &part.estimate.assumptions {
            if !assumptions.contains(a) {
                assumptions.push(a.clone());
            }
        }
    }
    Estimate {
        unit_count,
        energy,
        carbon,
        equivalencies: equivalencies(carbon, config),
        assumptions,
    }
}
