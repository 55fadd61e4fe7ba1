//! Energy and carbon estimation for generative-AI use in research pipelines.
//!
//! The crate is organised around five modules:
//!
//! - [`catalog`]: measured task types, research phases and use-kind schemas
//! - [`engine`]: unit aggregation, energy, carbon and equivalencies
//! - [`ledger`]: the persisted, stackable list of recorded use cases
//! - [`report`]: totals, mitigation hints and renderings
//! - [`config`]: estimation parameters (carbon intensity, factors, thresholds)

pub mod catalog;
pub mod config;
pub mod engine;
pub mod ledger;
pub mod quantity;
pub mod report;

pub use catalog::{Catalog, ResearchPhase, TaskKind, TaskType, UseKind};
pub use config::EstimationConfig;
pub use engine::{Equivalencies, Estimate};
pub use ledger::{Ledger, UseCaseEntry};
pub use report::Report;
