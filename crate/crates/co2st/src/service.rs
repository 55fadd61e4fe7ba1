//! HTTP facade over the estimation library.
//!
//! Estimation is stateless: every request carries the use case or the whole
//! ledger, and responses are computed from an immutable catalog and config.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use chrono::{DateTime, Utc};
use co2st_core::catalog::{Catalog, ResearchPhase, TaskKind, UseKind, ValidationError};
use co2st_core::config::EstimationConfig;
use co2st_core::engine;
use co2st_core::ledger::{Ledger, LedgerError};
use co2st_core::report::{self, RenderFormat};
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};

pub const MAX_BODY_BYTES: usize = 1 << 20;
pub const DEFAULT_BIND: &str = "127.0.0.1";
pub const DEFAULT_PORT: u16 = 8347;
const JSON: &str = "application/json";

#[derive(Clone)]
pub struct AppState {
    pub catalog: Arc<Catalog>,
    pub config: Arc<EstimationConfig>,
}

impl AppState {
    pub fn new(catalog: Catalog, config: EstimationConfig) -> Self {
        Self {
            catalog: Arc::new(catalog),
            config: Arc::new(config),
        }
    }
}

/// Error body returned by every endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub status: u16,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status: status.as_u16(),
            code: code.to_string(),
            message: message.into(),
            field: None,
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "malformed-body", message)
    }
}

impl From<ValidationError> for ApiError {
    fn from(err: ValidationError) -> Self {
        Self {
            status: StatusCode::UNPROCESSABLE_ENTITY.as_u16(),
            code: err.code().to_string(),
            field: Some(err.field().to_string()),
            message: err.to_string(),
        }
    }
}

impl From<LedgerError> for ApiError {
    fn from(err: LedgerError) -> Self {
        match err {
            LedgerError::InvalidEntry { ref source, .. } => Self {
                field: Some(source.field().to_string()),
                ..Self::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    source.code(),
                    err.to_string(),
                )
            },
            LedgerError::DuplicateId(_) => Self {
                field: Some("id".into()),
                ..Self::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    "duplicate-id",
                    err.to_string(),
                )
            },
            LedgerError::Estimation { .. } => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "estimation-failed",
                err.to_string(),
            ),
            LedgerError::UnsupportedVersion(_) => Self {
                field: Some("format_version".into()),
                ..Self::new(
                    StatusCode::BAD_REQUEST,
                    "unsupported-version",
                    err.to_string(),
                )
            },
            _ => Self::bad_request(err.to_string()),
        }
    }
}

impl From<BytesRejection> for ApiError {
    fn from(rejection: BytesRejection) -> Self {
        let status = rejection.status();
        let code = if status == StatusCode::PAYLOAD_TOO_LARGE {
            "body-too-large"
        } else {
            "unreadable-body"
        };
        Self::new(status, code, rejection.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        json_response(status, &self)
    }
}

fn json_response<T: Serialize>(status: StatusCode, body: &T) -> Response {
    let text = serde_json::to_string(body).expect("response serializes");
    (status, [(header::CONTENT_TYPE, JSON)], text).into_response()
}

fn ok<T: Serialize>(body: &T) -> Response {
    json_response(StatusCode::OK, body)
}

/// One use case as posted to `/estimate`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateRequest {
    pub phase: String,
    pub kind: String,
    #[serde(default)]
    pub task: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Serialize)]
struct PhaseView {
    id: ResearchPhase,
    display_name: &'static str,
}

#[derive(Serialize)]
struct KindView<'a> {
    #[serde(flatten)]
    kind: &'a UseKind,
    locked: bool,
}

/// Builds the `/api/v1` router. `cors_origins` lists origins allowed to make
/// cross-origin requests; empty disables CORS headers.
pub fn build_router(state: AppState, cors_origins: &[String]) -> Router {
    let api = Router::new()
        .route("/phases", get(phases))
        .route("/kinds", get(kinds))
        .route("/models", get(models))
        .route("/estimate", post(estimate))
        .route("/report", post(report_handler));
    let mut router = Router::new()
        .nest("/api/v1", api)
        .fallback(not_found)
        .method_not_allowed_fallback(method_not_allowed)
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state);
    let origins: Vec<HeaderValue> = cors_origins
        .iter()
        .filter_map(|o| HeaderValue::from_str(o).ok())
        .collect();
    if !origins.is_empty() {
        router = router.layer(
            CorsLayer::new()
                .allow_origin(AllowOrigin::list(origins))
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        );
    }
    router
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not-found", "no such route")
}

async fn method_not_allowed() -> ApiError {
    ApiError::new(
        StatusCode::METHOD_NOT_ALLOWED,
        "method-not-allowed",
        "method not allowed for this route",
    )
}

async fn phases(State(state): State<AppState>) -> Response {
    let list: Vec<PhaseView> = state
        .catalog
        .phases()
        .iter()
        .map(|&id| PhaseView {
            id,
            display_name: id.display_name(),
        })
        .collect();
    ok(&list)
}

async fn kinds(
    State(state): State<AppState>,
    Query(query): Query<HashMap<String, String>>,
) -> Response {
    let selected: Vec<&UseKind> = match query.get("phase") {
        Some(phase) => match state.catalog.kinds_for_phase_id(phase) {
            Ok(kinds) => kinds,
            Err(err) => return ApiError::from(err).into_response(),
        },
        None => state.catalog.kinds().iter().collect(),
    };
    let views: Vec<KindView> = selected
        .into_iter()
        .map(|kind| KindView {
            locked: kind.is_locked(),
            kind,
        })
        .collect();
    ok(&views)
}

async fn models(State(state): State<AppState>) -> Response {
    ok(&state.catalog.tasks())
}

fn parse_json<'a, T: Deserialize<'a>>(body: &'a [u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(e.to_string()))
}

/// Library call behind `/estimate`, exposed for contract tests.
pub fn estimate_request(
    catalog: &Catalog,
    config: &EstimationConfig,
    req: &EstimateRequest,
) -> Result<engine::Estimate, ApiError> {
    let phase = req
        .phase
        .parse::<ResearchPhase>()
        .map_err(ValidationError::UnknownPhase)?;
    let task = req
        .task
        .as_deref()
        .map(|t| t.parse::<TaskKind>().map_err(ValidationError::UnknownTask))
        .transpose()?;
    let validated = catalog.validate_use_case(phase, &req.kind, task, &req.params)?;
    engine::estimate_use_case(&validated, config).map_err(|e| {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "estimation-failed",
            e.to_string(),
        )
    })
}

async fn estimate(State(state): State<AppState>, body: Result<Bytes, BytesRejection>) -> Response {
    let result = body
        .map_err(ApiError::from)
        .and_then(|bytes| parse_json::<EstimateRequest>(&bytes))
        .and_then(|req| estimate_request(&state.catalog, &state.config, &req));
    match result {
        Ok(estimate) => ok(&estimate),
        Err(err) => err.into_response(),
    }
}

/// Reports are stamped with the newest entry timestamp so identical ledgers
/// yield identical responses.
pub fn report_timestamp(ledger: &Ledger) -> DateTime<Utc> {
    ledger
        .entries
        .iter()
        .map(|e| e.created_at)
        .max()
        .unwrap_or(DateTime::UNIX_EPOCH)
}

async fn report_handler(
    State(state): State<AppState>,
    body: Result<Bytes, BytesRejection>,
) -> Response {
    let result = body.map_err(ApiError::from).and_then(|bytes| {
        let text = std::str::from_utf8(&bytes).map_err(|e| ApiError::bad_request(e.to_string()))?;
        let ledger = Ledger::from_json(text)?;
        let report = report::build_report(
            &ledger,
            &state.catalog,
            &state.config,
            report_timestamp(&ledger),
        )?;
        Ok(report::render(&report, RenderFormat::Machine))
    });
    match result {
        Ok(text) => (StatusCode::OK, [(header::CONTENT_TYPE, JSON)], text).into_response(),
        Err(err) => err.into_response(),
    }
}

/// Binds and serves until Ctrl-C.
pub async fn serve(
    state: AppState,
    addr: SocketAddr,
    cors_origins: &[String],
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!(
        "co2st service listening on http://{}",
        listener.local_addr()?
    );
    axum::serve(listener, build_router(state, cors_origins))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
