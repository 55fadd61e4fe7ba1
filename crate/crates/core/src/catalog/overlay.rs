use std::path::Path;

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use super::types::{BaselineOverrides, UseKind};

pub const OVERLAY_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum OverlayError {
    #[error("cannot read catalog overlay {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid catalog overlay: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported catalog overlay format_version {0}")]
    UnsupportedVersion(u64),
    #[error("catalog overlay may not override energy constants (found `{0}`)")]
    EnergyOverride(String),
    #[error("use kind `{0}` already exists in the catalog")]
    DuplicateKind(String),
    #[error("use kind `{kind}` is invalid: {reason}")]
    InvalidKind { kind: String, reason: String },
    #[error("baseline `{0}` must be a positive finite number")]
    InvalidBaseline(String),
}

/// Additions layered on the built-in catalog.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogOverlay {
    #[serde(default)]
    pub kinds: Vec<UseKind>,
    #[serde(default)]
    pub baselines: Option<BaselineOverrides>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OverlayDocument {
    format_version: u64,
    catalog: Value,
}

impl CatalogOverlay {
    pub fn from_json(text: &str) -> Result<Self, OverlayError> {
        let doc: OverlayDocument = serde_json::from_str(text)?;
        if doc.format_version != u64::from(OVERLAY_FORMAT_VERSION) {
            return Err(OverlayError::UnsupportedVersion(doc.format_version));
        }
        if let Some(key) = find_energy_key(&doc.catalog) {
            return Err(OverlayError::EnergyOverride(key));
        }
        Ok(serde_json::from_value(doc.catalog)?)
    }

    pub fn load(path: &Path) -> Result<Self, OverlayError> {
        let text = std::fs::read_to_string(path).map_err(|source| OverlayError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}

fn find_energy_key(value: &Value) -> Option<String> {
    match value {
        Value::Object(map) => map.iter().find_map(|(k, v)| {
            if k == "tasks" || k.starts_with("energy") {
                Some(k.clone())
            } else {
                find_energy_key(v)
            }
        }),
        Value::Array(items) => items.iter().find_map(find_energy_key),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Catalog, ResearchPhase, Resolution, TaskKind};

    const EXTRA_KIND: &str = r#"{
        "format_version": 1,
        "catalog": {
            "kinds": [{
                "id": "slide-illustration",
                "display_name": "Slide illustrations",
                "phase": "dissemination-communication",
                "allowed_tasks": ["text-to-image"],
                "parameter_schema": [
                    {"id": "image_count", "label": "Images", "value_kind": "count",
                     "role": "usage", "required": true, "minimum": 0}
                ],
                "defaults": {"image_count": 3}
            }],
            "baselines": {"words_per_prompt": 250}
        }
    }"#;

    #[test]
    fn overlay_adds_kind_and_baseline() {
        let overlay = CatalogOverlay::from_json(EXTRA_KIND).unwrap();
        let cat = Catalog::builtin().with_overlay(overlay).unwrap();
        let kinds = cat.kinds_for_phase(ResearchPhase::DisseminationCommunication);
        assert!(kinds.iter().any(|k| k.id == "slide-illustration"));
        assert_eq!(
            cat.task(TaskKind::TextToText).baseline_resolution,
            Some(Resolution::Words { words: 250.0 })
        );
        // energy untouched
        assert_eq!(cat.task(TaskKind::TextToText).energy_per_unit.0, 0.004685);
    }

    #[test]
    fn energy_override_is_a_load_error() {
        let text = r#"{"format_version": 1, "catalog": {"tasks": [{"id": "text-to-text", "energy_per_unit": 1.0}]}}"#;
        assert!(matches!(
            CatalogOverlay::from_json(text),
            Err(OverlayError::EnergyOverride(k)) if k == "tasks"
        ));
        let text = r#"{"format_version": 1, "catalog": {"kinds": [{"energy_per_unit_wh": 2}]}}"#;
        assert!(matches!(
            CatalogOverlay::from_json(text),
            Err(OverlayError::EnergyOverride(_))
        ));
    }

    #[test]
    fn duplicate_and_malformed_kinds() {
        let dup = EXTRA_KIND.replace("slide-illustration", "literature-review");
        let overlay = CatalogOverlay::from_json(&dup).unwrap();
        assert!(matches!(
            Catalog::builtin().with_overlay(overlay),
            Err(OverlayError::DuplicateKind(_))
        ));

        let bad_default = EXTRA_KIND.replace(
            r#""defaults": {"image_count": 3}"#,
            r#""defaults": {"nope": 3}"#,
        );
        let overlay = CatalogOverlay::from_json(&bad_default).unwrap();
        assert!(matches!(
            Catalog::builtin().with_overlay(overlay),
            Err(OverlayError::InvalidKind { .. })
        ));

        let no_tasks = EXTRA_KIND.replace(r#"["text-to-image"]"#, "[]");
        let overlay = CatalogOverlay::from_json(&no_tasks).unwrap();
        assert!(Catalog::builtin().with_overlay(overlay).is_err());
    }

    #[test]
    fn version_and_baseline_checks() {
        let v2 = EXTRA_KIND.replace(r#""format_version": 1"#, r#""format_version": 2"#);
        assert!(matches!(
            CatalogOverlay::from_json(&v2),
            Err(OverlayError::UnsupportedVersion(2))
        ));
        let zero = EXTRA_KIND.replace("250", "0");
        let overlay = CatalogOverlay::from_json(&zero).unwrap();
        assert!(matches!(
            Catalog::builtin().with_overlay(overlay),
            Err(OverlayError::InvalidBaseline(f)) if f == "words_per_prompt"
        ));
    }
}
