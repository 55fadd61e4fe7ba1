//! Rule-based mitigation hints.

use serde::{Deserialize, Serialize};

use crate::catalog::{FieldRole, ResearchPhase, ValidatedUseCase};
use crate::config::EstimationConfig;
use crate::engine::{self, Aggregation};
use crate::ledger::UseCaseEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Notable,
    Major,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Info => "info",
            Severity::Notable => "notable",
            Severity::Major => "major",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationHint {
    pub rule_id: String,
    pub severity: Severity,
    pub message: String,
    pub triggering_entries: Vec<String>,
}

/// Static description of a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub id: &'static str,
    pub severity: Severity,
    pub title: &'static str,
    pub message: &'static str,
}

/// The rule registry, in evaluation order.
pub const RULES: [Rule; 4] = [
    Rule {
        id: "R1",
        severity: Severity::Major,
        title: "Training and fine-tuning",
        message: "Training or fine-tuning models is the most energy-intensive use in a \
                  research pipeline. Consider whether an existing model, a smaller model, \
                  or fewer training runs would answer the research question.",
    },
    Rule {
        id: "R2",
        severity: Severity::Major,
        title: "Large-scale data generation",
        message: "Large-scale open-ended generation of datasets dominates footprints outside \
                  training. Consider generating a smaller sample first and scaling only if \
                  the analysis needs it.",
    },
    Rule {
        id: "R3",
        severity: Severity::Notable,
        title: "High task load",
        message: "Energy grows with prompt length, output resolution and clip duration. \
                  Check whether the high task load is necessary for the study.",
    },
    Rule {
        id: "R4",
        severity: Severity::Info,
        title: "Participant prompting",
        message: "Participants interact with GenAI during evaluation. Brief guidance on \
                  prompting for the study task can reduce repeated attempts and unused output.",
    },
];

/// Whether `rule` holds for one entry.
pub fn rule_applies(
    rule: &Rule,
    entry: &ValidatedUseCase,
    agg: &Aggregation,
    config: &EstimationConfig,
) -> bool {
    let t = &config.hint_thresholds;
    match rule.id {
        "R1" => entry.phase == ResearchPhase::TrainingFineTuning,
        "R2" => {
            entry.phase == ResearchPhase::DataCollection
                && agg.unit_count.value() > t.large_generation_units
        }
        "R3" => agg.resolution_factor > t.resolution_factor,
        "R4" => {
            entry.phase == ResearchPhase::EvaluationUserStudies
                && entry
                    .role_values(FieldRole::Interactions)
                    .any(|(_, v)| v > 0.0)
        }
        _ => false,
    }
}

/// Evaluates every rule over validated entries. Each rule fires at most once.
pub fn evaluate(
    entries: &[(&UseCaseEntry, ValidatedUseCase)],
    config: &EstimationConfig,
) -> Vec<MitigationHint> {
    let aggregations: Vec<Aggregation> = entries
        .iter()
        .map(|(_, v)| engine::aggregate(v, config))
        .collect();
    RULES
        .iter()
        .filter_map(|rule| {
            let triggering: Vec<String> = entries
                .iter()
                .zip(&aggregations)
                .filter(|((_, v), agg)| rule_applies(rule, v, agg, config))
                .map(|((e, _), _)| e.id.clone())
                .collect();
            (!triggering.is_empty()).then(|| MitigationHint {
                rule_id: rule.id.to_string(),
                severity: rule.severity,
                message: rule.message.to_string(),
                triggering_entries: triggering,
            })
        })
        .collect()
}
