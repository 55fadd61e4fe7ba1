//! Domain vocabulary: measured tasks, research phases and use-kind schemas.
//!
//! The built-in catalog is immutable. Additional use kinds and baseline
//! resolutions can be layered on through an overlay file, but the per-task
//! energy constants are fixed.

mod builtin;
mod overlay;
mod types;

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

pub use builtin::{
    BASELINE_AUDIO_MINUTES, BASELINE_CLIP_SECONDS, BASELINE_IMAGE_SIDE, BASELINE_WORDS_PER_PROMPT,
    WORDS_PER_ARTICLE,
};
pub use overlay::{CatalogOverlay, OverlayError};
pub use types::*;

/// Why a set of parameters was rejected for a use kind.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("unknown phase `{0}`")]
    UnknownPhase(String),
    #[error("unknown use kind `{0}`")]
    UnknownKind(String),
    #[error("unknown model type `{0}`")]
    UnknownTask(String),
    #[error("use kind `{kind}` belongs to phase `{expected}`, not `{found}`")]
    PhaseMismatch {
        kind: String,
        expected: ResearchPhase,
        found: ResearchPhase,
    },
    #[error("model type `{task}` is not allowed for `{kind}`; allowed: {}", join_tasks(.allowed))]
    TaskNotAllowed {
        kind: String,
        task: TaskKind,
        allowed: Vec<TaskKind>,
    },
    #[error("missing required field `{field}`")]
    MissingField { field: String },
    #[error("unknown field `{field}` for use kind `{kind}`")]
    UnknownField { field: String, kind: String },
    #[error("field `{field}` must be a finite number >= {minimum}, got {value}")]
    OutOfRange {
        field: String,
        value: f64,
        minimum: f64,
    },
    #[error("field `{field}` does not apply to model type `{task}`")]
    NotApplicable { field: String, task: TaskKind },
}

fn join_tasks(tasks: &[TaskKind]) -> String {
    tasks
        .iter()
        .map(|t| t.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

impl ValidationError {
    /// Name of the offending input field.
    pub fn field(&self) -> &str {
        match self {
            ValidationError::UnknownPhase(_) | ValidationError::PhaseMismatch { .. } => "phase",
            ValidationError::UnknownKind(_) => "kind",
            ValidationError::UnknownTask(_) | ValidationError::TaskNotAllowed { .. } => "task",
            ValidationError::MissingField { field }
            | ValidationError::UnknownField { field, .. }
            | ValidationError::OutOfRange { field, .. }
            | ValidationError::NotApplicable { field, .. } => field,
        }
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ValidationError::UnknownPhase(_) => "unknown-phase",
            ValidationError::UnknownKind(_) => "unknown-kind",
            ValidationError::UnknownTask(_) => "unknown-task",
            ValidationError::PhaseMismatch { .. } => "phase-mismatch",
            ValidationError::TaskNotAllowed { .. } => "task-not-allowed",
            ValidationError::MissingField { .. } => "missing-required-field",
            ValidationError::UnknownField { .. } => "unknown-field",
            ValidationError::OutOfRange { .. } => "out-of-range",
            ValidationError::NotApplicable { .. } => "field-not-applicable",
        }
    }
}

/// Parameters that passed validation, with schema defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedParams {
    pub values: BTreeMap<String, f64>,
    /// Field ids whose value came from the kind's defaults.
    pub defaulted: Vec<String>,
}

impl ValidatedParams {
    pub fn get(&self, id: &str) -> Option<f64> {
        self.values.get(id).copied()
    }
}

/// A use case resolved against the catalog and ready for estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedUseCase {
    pub phase: ResearchPhase,
    pub kind: UseKind,
    pub task: TaskType,
    pub params: ValidatedParams,
}

impl ValidatedUseCase {
    /// Values of every field with the given role, in schema order.
    pub fn role_values(&self, role: FieldRole) -> impl Iterator<Item = (&FieldSpec, f64)> + '_ {
        self.kind
            .parameter_schema
            .iter()
            .filter(move |f| f.role == role)
            .filter_map(|f| self.params.get(&f.id).map(|v| (f, v)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    tasks: Vec<TaskType>,
    kinds: Vec<UseKind>,
}

impl Catalog {
    /// The compiled-in catalog.
    pub fn builtin() -> Self {
        Self {
            tasks: builtin::tasks(),
            kinds: builtin::kinds(),
        }
    }

    pub fn tasks(&self) -> &[TaskType] {
        &self.tasks
    }

    pub fn task(&self, id: TaskKind) -> &TaskType {
        self.tasks
            .iter()
            .find(|t| t.id == id)
            .expect("catalog holds every task kind")
    }

    pub fn phases(&self) -> &'static [ResearchPhase] {
        &ResearchPhase::ALL
    }

    pub fn kinds(&self) -> &[UseKind] {
        &self.kinds
    }

    pub fn kind(&self, id: &str) -> Option<&UseKind> {
        self.kinds.iter().find(|k| k.id == id)
    }

    /// Kinds belonging to `phase`, in catalog order.
    pub fn kinds_for_phase(&self, phase: ResearchPhase) -> Vec<&UseKind> {
        self.kinds.iter().filter(|k| k.phase == phase).collect()
    }

    /// Like [`Catalog::kinds_for_phase`], for a phase identifier from external input.
    pub fn kinds_for_phase_id(&self, phase: &str) -> Result<Vec<&UseKind>, ValidationError> {
        let phase = phase
            .parse::<ResearchPhase>()
            .map_err(ValidationError::UnknownPhase)?;
        Ok(self.kinds_for_phase(phase))
    }

    /// Checks `params` against the kind's schema and fills defaults.
    pub fn validate_parameters(
        &self,
        kind: &UseKind,
        task: TaskKind,
        params: &BTreeMap<String, f64>,
    ) -> Result<ValidatedParams, ValidationError> {
        if !kind.allowed_tasks.contains(&task) {
            return Err(ValidationError::TaskNotAllowed {
                kind: kind.id.clone(),
                task,
                allowed: kind.allowed_tasks.clone(),
            });
        }
        if let Some(unknown) = params.keys().find(|k| kind.field(k).is_none()) {
            return Err(ValidationError::UnknownField {
                field: unknown.clone(),
                kind: kind.id.clone(),
            });
        }

        let baseline = self.task(task).baseline_resolution;
        let mut values = BTreeMap::new();
        let mut defaulted = Vec::new();
        for spec in &kind.parameter_schema {
            let value = match (params.get(&spec.id), kind.defaults.get(&spec.id)) {
                (Some(&v), _) => {
                    if !spec.role.applies_to(baseline) {
                        return Err(ValidationError::NotApplicable {
                            field: spec.id.clone(),
                            task,
                        });
                    }
                    v
                }
                (None, Some(&d)) => {
                    defaulted.push(spec.id.clone());
                    d
                }
                (None, None) if spec.required => {
                    return Err(ValidationError::MissingField {
                        field: spec.id.clone(),
                    })
                }
                (None, None) => continue,
            };
            if !value.is_finite() || value < spec.minimum {
                return Err(ValidationError::OutOfRange {
                    field: spec.id.clone(),
                    value,
                    minimum: spec.minimum,
                });
            }
            values.insert(spec.id.clone(), value);
        }
        Ok(ValidatedParams { values, defaulted })
    }

    /// Resolves identifiers and validates a complete use case. When `task`
    /// is `None` the kind's first allowed task is used.
    pub fn validate_use_case(
        &self,
        phase: ResearchPhase,
        kind_id: &str,
        task: Option<TaskKind>,
        params: &BTreeMap<String, f64>,
    ) -> Result<ValidatedUseCase, ValidationError> {
        let kind = self
            .kind(kind_id)
            .ok_or_else(|| ValidationError::UnknownKind(kind_id.to_string()))?;
        if kind.phase != phase {
            return Err(ValidationError::PhaseMismatch {
                kind: kind.id.clone(),
                expected: kind.phase,
                found: phase,
            });
        }
        let task = task.unwrap_or_else(|| kind.default_task());
        let params = self.validate_parameters(kind, task, params)?;
        Ok(ValidatedUseCase {
            phase,
            kind: kind.clone(),
            task: self.task(task).clone(),
            params,
        })
    }

    /// Layers an overlay on top of this catalog.
    pub fn with_overlay(mut self, overlay: CatalogOverlay) -> Result<Self, OverlayError> {
        let baselines = overlay.baselines.unwrap_or_default();
        if let Some((field, _)) = baselines.invalid_field() {
            return Err(OverlayError::InvalidBaseline(field.to_string()));
        }
        for task in &mut self.tasks {
            task.baseline_resolution = task.baseline_resolution.map(|b| baselines.apply(b));
        }

        let mut seen: HashSet<String> = self.kinds.iter().map(|k| k.id.clone()).collect();
        for kind in overlay.kinds {
            check_kind(&kind)?;
            if !seen.insert(kind.id.clone()) {
                return Err(OverlayError::DuplicateKind(kind.id));
            }
            self.kinds.push(kind);
        }
        Ok(self)
    }
}

impl Default for Catalog {
    fn default() -> Self {
        Self::builtin()
    }
}

fn check_kind(kind: &UseKind) -> Result<(), OverlayError> {
    let bad = |reason: String| OverlayError::InvalidKind {
        kind: kind.id.clone(),
        reason,
    };
    if kind.id.is_empty() {
        return Err(bad("empty id".into()));
    }
    if kind.allowed_tasks.is_empty() {
        return Err(bad("allowed_tasks is empty".into()));
    }
    if !kind.parameter_schema.iter().any(|f| {
        matches!(
            f.role,
            FieldRole::Usage | FieldRole::AudioMinutes | FieldRole::GpuHours
        )
    }) {
        return Err(bad("schema has no usage field".into()));
    }
    let mut ids = HashSet::new();
    for f in &kind.parameter_schema {
        if !ids.insert(f.id.as_str()) {
            return Err(bad(format!("duplicate field `{}`", f.id)));
        }
        if !(f.minimum.is_finite() && f.minimum >= 0.0) {
            return Err(bad(format!("field `{}` has a negative minimum", f.id)));
        }
    }
    if let Some(id) = kind.defaults.keys().find(|id| kind.field(id).is_none()) {
        return Err(bad(format!("default for undeclared field `{id}`")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    /// Defaults plus the minimum for every required field lacking one.
    fn minimal_params(kind: &UseKind) -> BTreeMap<String, f64> {
        kind.parameter_schema
            .iter()
            .filter(|f| f.required && !kind.defaults.contains_key(&f.id))
            .map(|f| (f.id.clone(), f.minimum))
            .collect()
    }

    #[test]
    fn energy_constants_match_table() {
        let cat = Catalog::builtin();
        assert_eq!(cat.tasks().len(), 13);
        assert_eq!(cat.task(TaskKind::TextToText).energy_per_unit.0, 0.004685);
        assert_eq!(cat.task(TaskKind::ImageToImage).energy_per_unit.0, 0.000885);
        assert_eq!(cat.task(TaskKind::AudioToText).energy_per_unit.0, 0.006335);
        assert_eq!(cat.task(TaskKind::AudioToAudio).energy_per_unit.0, 0.006335);
        assert!(cat.tasks().iter().all(|t| t.energy_per_unit.0 > 0.0));
        let ids: HashSet<_> = cat.tasks().iter().map(|t| t.id).collect();
        assert_eq!(ids.len(), 13);
    }

    #[test]
    fn seven_phases_each_with_kinds() {
        let cat = Catalog::builtin();
        assert_eq!(cat.phases().len(), 7);
        for &phase in cat.phases() {
            let kinds = cat.kinds_for_phase(phase);
            assert!(!kinds.is_empty(), "{phase} has no kinds");
            assert!(kinds.iter().all(|k| k.phase == phase));
        }
    }

    #[test]
    fn phase_lookup_contains_expected_kinds() {
        let cat = Catalog::builtin();
        let ids = |p| {
            cat.kinds_for_phase(p)
                .into_iter()
                .map(|k| k.id.as_str())
                .collect::<Vec<_>>()
        };
        assert!(ids(ResearchPhase::ResearchPlanning).contains(&"literature-review"));
        assert!(ids(ResearchPhase::TrainingFineTuning).contains(&"fine-tuning"));
        for expected in [
            "study-material-generation",
            "genai-prototype-integration",
            "code-generation",
            "user-evaluation",
            "dataset-generation",
            "transcription",
            "qualitative-analysis",
            "manuscript-text",
            "figure-generation",
            "model-training",
        ] {
            assert!(cat.kind(expected).is_some(), "missing {expected}");
        }
    }

    #[test]
    fn unknown_phase_identifier() {
        let err = Catalog::builtin()
            .kinds_for_phase_id("daydreaming")
            .unwrap_err();
        assert_eq!(err, ValidationError::UnknownPhase("daydreaming".into()));
        assert_eq!(err.field(), "phase");
    }

    #[test]
    fn kinds_partition_by_phase() {
        let cat = Catalog::builtin();
        let mut union: Vec<&str> = cat
            .phases()
            .iter()
            .flat_map(|&p| cat.kinds_for_phase(p))
            .map(|k| k.id.as_str())
            .collect();
        assert_eq!(union.len(), cat.kinds().len());
        union.sort_unstable();
        union.dedup();
        assert_eq!(union.len(), cat.kinds().len());
    }

    #[test]
    fn locked_kind_rejects_other_tasks() {
        let cat = Catalog::builtin();
        let chatbot = cat.kind("customized-chatbot").unwrap();
        assert!(chatbot.is_locked());
        let err = cat
            .validate_parameters(chatbot, TaskKind::TextToImage, &params(&[]))
            .unwrap_err();
        assert_eq!(err.field(), "task");
        assert_eq!(err.code(), "task-not-allowed");
        assert!(err.to_string().contains("text-to-text"));
    }

    #[test]
    fn literature_review_fills_article_length() {
        let cat = Catalog::builtin();
        let kind = cat.kind("literature-review").unwrap();
        let v = cat
            .validate_parameters(
                kind,
                TaskKind::TextToText,
                &params(&[("article_count", 10.0)]),
            )
            .unwrap();
        assert_eq!(v.get("words_per_article"), Some(6000.0));
        assert_eq!(v.defaulted, vec!["words_per_article".to_string()]);
    }

    #[test]
    fn negative_count_is_out_of_range() {
        let cat = Catalog::builtin();
        let kind = cat.kind("code-generation").unwrap();
        let err = cat
            .validate_parameters(
                kind,
                TaskKind::TextToText,
                &params(&[("prompt_count", -1.0)]),
            )
            .unwrap_err();
        assert!(
            matches!(err, ValidationError::OutOfRange { ref field, .. } if field == "prompt_count")
        );
        let err = cat
            .validate_parameters(
                kind,
                TaskKind::TextToText,
                &params(&[("prompt_count", f64::NAN)]),
            )
            .unwrap_err();
        assert_eq!(err.code(), "out-of-range");
    }

    #[test]
    fn missing_and_unknown_fields() {
        let cat = Catalog::builtin();
        let kind = cat.kind("transcription").unwrap();
        let err = cat
            .validate_parameters(kind, TaskKind::AudioToText, &params(&[]))
            .unwrap_err();
        assert_eq!(
            err,
            ValidationError::MissingField {
                field: "minutes".into()
            }
        );
        let err = cat
            .validate_parameters(
                kind,
                TaskKind::AudioToText,
                &params(&[("minutes", 3.0), ("speakers", 2.0)]),
            )
            .unwrap_err();
        assert_eq!(err.field(), "speakers");
    }

    #[test]
    fn resolution_field_must_match_task() {
        let cat = Catalog::builtin();
        let kind = cat.kind("dataset-generation").unwrap();
        let p = params(&[("generation_count", 5.0), ("image_width", 2048.0)]);
        assert!(cat
            .validate_parameters(kind, TaskKind::TextToImage, &p)
            .is_ok());
        let err = cat
            .validate_parameters(kind, TaskKind::TextToText, &p)
            .unwrap_err();
        assert_eq!(err.code(), "field-not-applicable");
        assert_eq!(err.field(), "image_width");
    }

    #[test]
    fn every_kind_validates_with_defaults_for_every_task() {
        let cat = Catalog::builtin();
        for kind in cat.kinds() {
            assert!(!kind.allowed_tasks.is_empty());
            assert!(kind.defaults.keys().all(|id| kind.field(id).is_some()));
            assert!(kind.parameter_schema.iter().all(|f| f.minimum >= 0.0));
            let p = minimal_params(kind);
            for &task in &kind.allowed_tasks {
                cat.validate_parameters(kind, task, &p)
                    .unwrap_or_else(|e| panic!("{} / {task}: {e}", kind.id));
            }
        }
    }

    #[test]
    fn phase_mismatch_is_rejected() {
        let cat = Catalog::builtin();
        let err = cat
            .validate_use_case(
                ResearchPhase::ResearchPlanning,
                "transcription",
                None,
                &params(&[("minutes", 1.0)]),
            )
            .unwrap_err();
        assert_eq!(err.code(), "phase-mismatch");
        let ok = cat
            .validate_use_case(
                ResearchPhase::DataCollection,
                "transcription",
                None,
                &params(&[("minutes", 1.0)]),
            )
            .unwrap();
        assert_eq!(ok.task.id, TaskKind::AudioToText);
    }

    #[test]
    fn identifiers_round_trip_through_strings() {
        for t in TaskKind::ALL {
            assert_eq!(t.as_str().parse::<TaskKind>().unwrap(), t);
            assert_eq!(serde_json::to_string(&t).unwrap(), format!("\"{t}\""));
        }
        for p in ResearchPhase::ALL {
            assert_eq!(p.as_str().parse::<ResearchPhase>().unwrap(), p);
            assert_eq!(serde_json::to_string(&p).unwrap(), format!("\"{p}\""));
        }
        for m in Modality::ALL {
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
    }
}
