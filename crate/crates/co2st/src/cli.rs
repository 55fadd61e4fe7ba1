//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for invalid input (bad flags, parameters that
//! fail catalog validation), 2 for file errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::OpenOptions;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use chrono::{DateTime, Utc};
use clap::{Parser, Subcommand, ValueEnum};
use co2st_core::catalog::{
    Catalog, CatalogOverlay, OverlayError, ResearchPhase, TaskKind, ValidationError,
};
use co2st_core::config::{ConfigError, EstimationConfig};
use co2st_core::engine::{self, Estimate};
use co2st_core::ledger::{Ledger, LedgerError, UseCaseEntry};
use co2st_core::report::{self, sig4, RenderFormat};
use thiserror::Error;

use crate::service::{self, AppState};

pub const CONFIG_ENV: &str = "CO2ST_CONFIG";
pub const CATALOG_ENV: &str = "CO2ST_CATALOG";
/// RFC 3339 timestamp used instead of the wall clock (for reproducible output).
pub const NOW_ENV: &str = "CO2ST_NOW";

#[derive(Debug, Parser)]
#[command(
    name = "co2st",
    version,
    about = "Estimate the energy use and carbon footprint of generative-AI use in research"
)]
pub struct Cli {
    /// Estimation config file (JSON)
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Catalog overlay file adding use kinds or baselines (JSON)
    #[arg(long, global = true, env = CATALOG_ENV)]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct UseCaseArgs {
    #[arg(long)]
    phase: String,
    #[arg(long)]
    kind: String,
    /// Model type (task); defaults to the kind's first allowed task
    #[arg(long)]
    model: Option<String>,
    /// Parameter as key=value; repeatable
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Machine,
    Ethics,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EstimateFormat {
    Text,
    Machine,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List research phases
    Phases,
    /// List model types with their per-interaction energy
    Models,
    /// List use kinds for a phase
    Kinds {
        #[arg(long)]
        phase: String,
    },
    /// Append a use case to a ledger file (created if missing)
    Add {
        #[arg(long)]
        ledger: PathBuf,
        #[command(flatten)]
        use_case: UseCaseArgs,
        #[arg(long, default_value = "")]
        note: String,
        /// Project name when creating a new ledger
        #[arg(long)]
        project: Option<String>,
    },
    /// Remove a use case from a ledger file
    Remove {
        #[arg(long)]
        ledger: PathBuf,
        #[arg(long)]
        id: String,
    },
    /// Render a report for a ledger file
    Report {
        #[arg(long)]
        ledger: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Estimate a single use case without touching any file
    Estimate {
        #[command(flatten)]
        use_case: UseCaseArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: EstimateFormat,
    },
    /// Run the HTTP service
    Serve {
        #[arg(long, default_value = service::DEFAULT_BIND)]
        bind: IpAddr,
        #[arg(long, default_value_t = service::DEFAULT_PORT)]
        port: u16,
        /// Origin allowed to make cross-origin requests; repeatable
        #[arg(long = "cors-origin")]
        cors_origins: Vec<String>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("{0}")]
    File(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Invalid { .. } => 1,
            CliError::File(_) => 2,
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(err: ValidationError) -> Self {
        CliError::Invalid {
            field: err.field().to_string(),
            message: err.to_string(),
        }
    }
}

impl From<LedgerError> for CliError {
    fn from(err: LedgerError) -> Self {
        match err {
            LedgerError::InvalidEntry { ref source, .. } => CliError::Invalid {
                field: source.field().to_string(),
                message: err.to_string(),
            },
            LedgerError::DuplicateId(_) | LedgerError::UnknownId(_) => CliError::Invalid {
                field: "id".into(),
                message: err.to_string(),
            },
            LedgerError::Estimation { .. } => CliError::Usage(err.to_string()),
            LedgerError::Io { .. }
            | LedgerError::Schema { .. }
            | LedgerError::UnsupportedVersion(_) => CliError::File(err.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        CliError::File(err.to_string())
    }
}

impl From<OverlayError> for CliError {
    fn from(err: OverlayError) -> Self {
        CliError::File(err.to_string())
    }
}

/// Parses argv and runs the command, writing to the given streams.
/// Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "{first}");
            return 1;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn now() -> Result<DateTime<Utc>, CliError> {
    match std::env::var(NOW_ENV) {
        Ok(text) => DateTime::parse_from_rfc3339(&text)
            .map(|t| t.with_timezone(&Utc))
            .map_err(|e| CliError::Usage(format!("{NOW_ENV}: {e}"))),
        Err(_) => Ok(Utc::now()),
    }
}

fn load_catalog(path: Option<&Path>) -> Result<Catalog, CliError> {
    let catalog = Catalog::builtin();
    match path {
        Some(p) => Ok(catalog.with_overlay(CatalogOverlay::load(p)?)?),
        None => Ok(catalog),
    }
}

fn load_config(path: Option<&Path>) -> Result<EstimationConfig, CliError> {
    match path {
        Some(p) => Ok(EstimationConfig::load(p)?),
        None => Ok(EstimationConfig::default()),
    }
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut params = BTreeMap::new();
    for pair in raw {
        let (key, value) = pair.split_once('=').ok_or_else(|| CliError::Invalid {
            field: pair.clone(),
            message: format!("expected KEY=VALUE, got `{pair}`"),
        })?;
        let key = key.trim();
        let value: f64 = value.trim().parse().map_err(|_| CliError::Invalid {
            field: key.to_string(),
            message: format!("`{value}` is not a number"),
        })?;
        if params.insert(key.to_string(), value).is_some() {
            return Err(CliError::Invalid {
                field: key.to_string(),
                message: "given more than once".into(),
            });
        }
    }
    Ok(params)
}

struct ResolvedUseCase {
    phase: ResearchPhase,
    kind: String,
    task: TaskKind,
    params: BTreeMap<String, f64>,
}

fn resolve(args: &UseCaseArgs, catalog: &Catalog) -> Result<ResolvedUseCase, CliError> {
    let phase = args
        .phase
        .parse::<ResearchPhase>()
        .map_err(ValidationError::UnknownPhase)?;
    let task = args
        .model
        .as_deref()
        .map(|m| m.parse::<TaskKind>().map_err(ValidationError::UnknownTask))
        .transpose()?;
    let params = parse_params(&args.params)?;
    let validated = catalog.validate_use_case(phase, &args.kind, task, &params)?;
    Ok(ResolvedUseCase {
        phase,
        kind: args.kind.clone(),
        task: validated.task.id,
        params,
    })
}

/// Advisory lock held while a ledger file is rewritten.
struct LedgerLock(PathBuf);

impl LedgerLock {
    fn acquire(ledger: &Path) -> Result<Self, CliError> {
        let mut name = ledger.as_os_str().to_owned();
        name.push(".lock");
        let path = PathBuf::from(name);
        for _ in 0..50 {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut f) => {
                    let _ = writeln!(f, "{}", std::process::id());
                    return Ok(Self(path));
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    thread::sleep(Duration::from_millis(100));
                }
                Err(e) => {
                    return Err(CliError::File(format!(
                        "cannot lock {}: {e}",
                        path.display()
                    )))
                }
            }
        }
        Err(CliError::File(format!(
            "ledger is locked by another process (remove {} if stale)",
            path.display()
        )))
    }
}

impl Drop for LedgerLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

fn write_estimate_text(out: &mut dyn Write, est: &Estimate) -> std::io::Result<()> {
    writeln!(out, "N = {}", sig4(est.unit_count.value()))?;
    writeln!(out, "E = {} kWh", sig4(est.energy.value()))?;
    writeln!(out, "C = {} kg", sig4(est.carbon.value()))?;
    writeln!(out, "car: {} km", sig4(est.equivalencies.car_km))?;
    writeln!(
        out,
        "flight: {} min",
        sig4(est.equivalencies.flight_minutes)
    )?;
    writeln!(
        out,
        "trees: {} seedlings (10 years)",
        sig4(est.equivalencies.tree_seedlings)
    )?;
    for a in &est.assumptions {
        writeln!(out, "assumption: {a}")?;
    }
    Ok(())
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::File(format!("cannot write output: {e}"))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let catalog = load_catalog(cli.catalog.as_deref())?;
    let config = load_config(cli.config.as_deref())?;

    match cli.command {
        Command::Phases => {
            for phase in catalog.phases() {
                writeln!(out, "{} {}", phase.as_str(), phase.display_name()).map_err(io_err)?;
            }
        }
        Command::Models => {
            writeln!(
                out,
                "# task energy_wh_per_unit canonical_unit baseline proxy_model"
            )
            .map_err(io_err)?;
            for task in catalog.tasks() {
                let baseline = task
                    .baseline_resolution
                    .map(|b| b.to_string().replace(' ', ""))
                    .unwrap_or_else(|| "-".into());
                writeln!(
                    out,
                    "{} {} {} {} {}",
                    task.id,
                    task.energy_literal,
                    task.canonical_unit.as_str(),
                    baseline,
                    task.proxy_model
                )
                .map_err(io_err)?;
            }
        }
        Command::Kinds { phase } => {
            for kind in catalog.kinds_for_phase_id(&phase)? {
                let tasks: Vec<&str> = kind.allowed_tasks.iter().map(|t| t.as_str()).collect();
                let fields: Vec<String> = kind
                    .parameter_schema
                    .iter()
                    .map(|f| match kind.defaults.get(&f.id) {
                        Some(d) => format!("{}={d}", f.id),
                        None if f.required => format!("{}*", f.id),
                        None => f.id.clone(),
                    })
                    .collect();
                writeln!(
                    out,
                    "{} tasks={}{} fields={} ({})",
                    kind.id,
                    tasks.join(","),
                    if kind.is_locked() { " [locked]" } else { "" },
                    fields.join(","),
                    kind.display_name
                )
                .map_err(io_err)?;
            }
        }
        Command::Add {
            ledger: path,
            use_case,
            note,
            project,
        } => {
            let resolved = resolve(&use_case, &catalog)?;
            let created_at = now()?;
            let _lock = LedgerLock::acquire(&path)?;
            let mut ledger = if path.exists() {
                Ledger::load(&path)?
            } else {
                let name = project.unwrap_or_else(|| {
                    path.file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "project".into())
                });
                Ledger::new(name)
            };
            let entry = UseCaseEntry::new(
                resolved.phase,
                resolved.kind,
                resolved.task,
                resolved.params,
                note,
                created_at,
            );
            let id = entry.id.clone();
            ledger.add_entry(entry, &catalog)?;
            ledger.save(&path)?;
            writeln!(out, "{id}").map_err(io_err)?;
        }
        Command::Remove { ledger: path, id } => {
            let _lock = LedgerLock::acquire(&path)?;
            let mut ledger = Ledger::load(&path)?;
            ledger.remove_entry(&id)?;
            ledger.save(&path)?;
            writeln!(out, "{id}").map_err(io_err)?;
        }
        Command::Report {
            ledger: path,
            format,
        } => {
            let ledger = Ledger::load(&path)?;
            let built = report::build_report(&ledger, &catalog, &config, now()?)?;
            let text = match format {
                ReportFormat::Text => report::render(&built, RenderFormat::Text),
                ReportFormat::Machine => report::render(&built, RenderFormat::Machine),
                ReportFormat::Ethics => format!("{}\n", report::ethical_statement(&built)),
            };
            out.write_all(text.as_bytes()).map_err(io_err)?;
        }
        Command::Estimate { use_case, format } => {
            let resolved = resolve(&use_case, &catalog)?;
            let validated = catalog.validate_use_case(
                resolved.phase,
                &resolved.kind,
                Some(resolved.task),
                &resolved.params,
            )?;
            let est = engine::estimate_use_case(&validated, &config)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            match format {
                EstimateFormat::Text => write_estimate_text(out, &est).map_err(io_err)?,
                EstimateFormat::Machine => {
                    let text = serde_json::to_string_pretty(&est).expect("estimate serializes");
                    writeln!(out, "{text}").map_err(io_err)?;
                }
            }
        }
        Command::Serve {
            bind,
            port,
            cors_origins,
        } => {
            let runtime = tokio::runtime::Runtime::new()
                .map_err(|e| CliError::File(format!("cannot start runtime: {e}")))?;
            let state = AppState::new(catalog, config);
            runtime
                .block_on(service::serve(
                    state,
                    SocketAddr::new(bind, port),
                    &cors_origins,
                ))
                .map_err(|e| CliError::File(format!("cannot serve on {bind}:{port}: {e}")))?;
        }
    }
    Ok(())
}
