//! CLI and HTTP service for the co2st carbon ledger.

pub mod cli;
pub mod service;
