//! Persistent record of stacked use cases.
//!
//! A ledger stores raw user inputs only. Estimates are recomputed from the
//! catalog and config every time, so updated constants apply retroactively.
//!
//! File layout (JSON):
//!
//! ```text
//! {"format_version": 1, "project": "...", "entries": [
//!   {"id": "...", "phase": "...", "kind": "...", "task": "...",
//!    "params": {"name": number, ...}, "note": "...", "created_at": "RFC 3339 UTC"}
//! ]}
//! ```

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, Utc};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, ResearchPhase, TaskKind, ValidatedUseCase, ValidationError};
use crate::config::EstimationConfig;
use crate::engine::{self, EntryEstimate, Estimate, EstimationError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("cannot access ledger {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error at line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported ledger format_version {0}")]
    UnsupportedVersion(u64),
    #[error("duplicate entry id `{0}`")]
    DuplicateId(String),
    #[error("unknown entry id `{0}`")]
    UnknownId(String),
    #[error("entry `{id}`: {source}")]
    InvalidEntry {
        id: String,
        #[source]
        source: ValidationError,
    },
    #[error("entry `{id}`: {source}")]
    Estimation {
        id: String,
        #[source]
        source: EstimationError,
    },
}

impl LedgerError {
    fn schema(err: serde_json::Error) -> Self {
        LedgerError::Schema {
            line: err.line(),
            column: err.column(),
            message: strip_position(&err.to_string()),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        LedgerError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(pos) => message[..pos].to_string(),
        None => message.to_string(),
    }
}

/// One recorded GenAI use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UseCaseEntry {
    pub id: String,
    pub phase: ResearchPhase,
    pub kind: String,
    pub task: TaskKind,
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub note: String,
    pub created_at: DateTime<Utc>,
}

impl UseCaseEntry {
    /// Creates an entry with a fresh random id.
    pub fn new(
        phase: ResearchPhase,
        kind: impl Into<String>,
        task: TaskKind,
        params: BTreeMap<String, f64>,
        note: impl Into<String>,
        created_at: DateTime<Utc>,
    ) -> Self {
        Self {
            id: generate_id(),
            phase,
            kind: kind.into(),
            task,
            params,
            note: note.into(),
            created_at,
        }
    }

    pub fn validate(&self, catalog: &Catalog) -> Result<ValidatedUseCase, LedgerError> {
        catalog
            .validate_use_case(self.phase, &self.kind, Some(self.task), &self.params)
            .map_err(|source| LedgerError::InvalidEntry {
                id: self.id.clone(),
                source,
            })
    }
}

/// Short random hex identifier.
pub fn generate_id() -> String {
    format!("{:012x}", rand::rng().random::<u64>() >> 16)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ledger {
    pub format_version: u32,
    pub project: String,
    pub entries: Vec<UseCaseEntry>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: Option<serde_json::Value>,
}

impl Ledger {
    pub fn new(project: impl Into<String>) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            project: project.into(),
            entries: Vec::new(),
        }
    }

    pub fn get(&self, id: &str) -> Option<&UseCaseEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Appends a validated entry. The ledger is unchanged on error.
    pub fn add_entry(&mut self, entry: UseCaseEntry, catalog: &Catalog) -> Result<(), LedgerError> {
        if self.get(&entry.id).is_some() {
            return Err(LedgerError::DuplicateId(entry.id));
        }
        entry.validate(catalog)?;
        self.entries.push(entry);
        Ok(())
    }

    pub fn remove_entry(&mut self, id: &str) -> Result<UseCaseEntry, LedgerError> {
        let pos = self
            .entries
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| LedgerError::UnknownId(id.to_string()))?;
        Ok(self.entries.remove(pos))
    }

    /// Validates every entry against the catalog, in order.
    pub fn validate(&self, catalog: &Catalog) -> Result<Vec<ValidatedUseCase>, LedgerError> {
        self.entries.iter().map(|e| e.validate(catalog)).collect()
    }

    /// Per-entry estimates in ledger order.
    pub fn breakdown(
        &self,
        catalog: &Catalog,
        config: &EstimationConfig,
    ) -> Result<Vec<EntryEstimate>, LedgerError> {
        self.entries
            .iter()
            .map(|entry| {
                let validated = entry.validate(catalog)?;
                let estimate = engine::estimate_use_case(&validated, config).map_err(|source| {
                    LedgerError::Estimation {
                        id: entry.id.clone(),
                        source,
                    }
                })?;
                Ok(EntryEstimate {
                    entry_id: entry.id.clone(),
                    phase: entry.phase,
                    kind: entry.kind.clone(),
                    task: entry.task,
                    estimate,
                })
            })
            .collect()
    }

    /// Sum of the per-entry estimates.
    pub fn total(
        &self,
        catalog: &Catalog,
        config: &EstimationConfig,
    ) -> Result<Estimate, LedgerError> {
        Ok(engine::combine(&self.breakdown(catalog, config)?, config))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("ledger serializes");
        out.push('\n');
        out
    }

    /// Parses a ledger document and checks its structural invariants.
    /// Catalog validation of entries is left to [`Ledger::validate`].
    pub fn from_json(text: &str) -> Result<Self, LedgerError> {
        let probe: VersionProbe = serde_json::from_str(text).map_err(LedgerError::schema)?;
        if let Some(version) = probe.format_version {
            match version.as_u64() {
                Some(v) if v == u64::from(FORMAT_VERSION) => {}
                Some(v) => return Err(LedgerError::UnsupportedVersion(v)),
                None => {
                    return Err(LedgerError::Schema {
                        line: 1,
                        column: 1,
                        message: format!("format_version must be an integer, got {version}"),
                    })
                }
            }
        }
        let ledger: Ledger = serde_json::from_str(text).map_err(LedgerError::schema)?;
        let mut seen = HashSet::new();
        for entry in &ledger.entries {
            if !seen.insert(entry.id.as_str()) {
                return Err(LedgerError::DuplicateId(entry.id.clone()));
            }
        }
        Ok(ledger)
    }

    pub fn load(path: &Path) -> Result<Self, LedgerError> {
        let text = std::fs::read_to_string(path).map_err(|e| LedgerError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Writes through a temporary file in the same directory, then renames.
    pub fn save(&self, path: &Path) -> Result<(), LedgerError> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let file_name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "ledger".into());
        let tmp = dir.join(format!(".{file_name}.{}.tmp", generate_id()));
        let write = || -> std::io::Result<()> {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(self.to_json().as_bytes())?;
            f.sync_all()?;
            std::fs::rename(&tmp, path)
        };
        write().map_err(|e| {
            let _ = std::fs::remove_file(&tmp);
            LedgerError::io(path, e)
        })
    }
}
