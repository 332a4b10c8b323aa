//! HTTP API over a single [`Session`].
//!
//! Mutating requests hold the session lock for their whole duration, so they
//! are applied one at a time in arrival order. The session is written back to
//! the session file after every successful mutation.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::Mutex;
use tower_http::services::ServeDir;

use planwright_core::{Error as CoreError, Outcome, Session, Verdict};

use crate::CliError;

pub const PORT_ENV: &str = "PLANWRIGHT_PORT";
pub const DEFAULT_PORT: u16 = 8080;

pub struct AppState {
    pub session: Session,
    pub session_path: Option<PathBuf>,
}

pub type Shared = Arc<Mutex<AppState>>;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn malformed(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, code: "MALFORMED", message: message.into() }
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let (status, code) = match &e {
            CoreError::UnknownTest(_) => (StatusCode::NOT_FOUND, "UNKNOWN_TEST"),
            CoreError::AlreadyExecuted(_) => (StatusCode::CONFLICT, "ALREADY_EXECUTED"),
            CoreError::NotDroppable(_) => (StatusCode::CONFLICT, "NOT_DROPPABLE"),
            CoreError::InconsistentStatus => (StatusCode::UNPROCESSABLE_ENTITY, "INCONSISTENT_STATUS"),
            CoreError::Contradiction => (StatusCode::UNPROCESSABLE_ENTITY, "CONTRADICTION"),
            CoreError::Invalid(_) => (StatusCode::BAD_REQUEST, "INVALID"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL"),
        };
        ApiError { status, code, message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.code, "message": self.message }))).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let body: &[u8] = if body.iter().all(u8::is_ascii_whitespace) { b"{}" } else { body };
    serde_json::from_slice(body).map_err(|e| ApiError::malformed(e.to_string()))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("response serializes")
}

fn commit(state: &mut AppState, next: Session) -> Result<(), ApiError> {
    if let Some(path) = &state.session_path {
        save_session(path, &next).map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "IO",
            message: e.to_string(),
        })?;
    }
    state.session = next;
    Ok(())
}

pub fn save_session(path: &Path, session: &Session) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(session).expect("session serializes");
    text.push('\n');
    crate::write_file(path, &text)
}

pub fn load_session(path: &Path) -> Result<Session, CliError> {
    let text = crate::read_file(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn plan_view(s: &Session) -> Value {
    json!({
        "plan": s.plan,
        "dispositions": s.dispositions,
        "inferred": s.inferred,
        "next": s.next_test(),
        "conflicts": s.conflicts,
    })
}

async fn get_session(State(st): State<Shared>) -> ApiResult {
    Ok(Json(to_value(&st.lock().await.session)))
}

async fn get_plan(State(st): State<Shared>) -> ApiResult {
    Ok(Json(plan_view(&st.lock().await.session)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ResultBody {
    test: String,
    outcome: Outcome,
}

async fn post_result(State(st): State<Shared>, body: Bytes) -> ApiResult {
    let req: ResultBody = parse(&body)?;
    let mut st = st.lock().await;
    let next = st.session.record_result(&req.test, req.outcome)?;
    commit(&mut st, next)?;
    Ok(Json(to_value(&st.session)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpectationBody {
    test: String,
    verdict: Option<Verdict>,
}

async fn post_expectation(State(st): State<Shared>, body: Bytes) -> ApiResult {
    let req: ExpectationBody = parse(&body)?;
    let mut st = st.lock().await;
    let next = st.session.stage_expectation(&req.test, req.verdict)?;
    commit(&mut st, next)?;
    Ok(Json(json!({ "staged": st.session.staged, "expectation": st.session.staged_expectation() })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Empty {}

async fn post_replan(State(st): State<Shared>, body: Bytes) -> ApiResult {
    let _: Empty = parse(&body)?;
    let mut st = st.lock().await;
    let (next, diff) = st.session.replan_staged()?;
    commit(&mut st, next)?;
    Ok(Json(to_value(&diff)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DropBody {
    test: String,
}

async fn post_drop(State(st): State<Shared>, body: Bytes) -> ApiResult {
    let req: DropBody = parse(&body)?;
    let mut st = st.lock().await;
    let next = st.session.drop_test(&req.test)?;
    commit(&mut st, next)?;
    Ok(Json(plan_view(&st.session)))
}

/// Overrides are applied on top of the staged expectation; nothing is stored.
async fn post_whatif(State(st): State<Shared>, body: Bytes) -> ApiResult {
    let overrides: BTreeMap<String, Option<Verdict>> = parse(&body)?;
    let session = st.lock().await.session.clone();
    let mut x = session.staged_expectation();
    for (t, v) in overrides {
        session.disposition(&t)?;
        x.set(t, v);
    }
    let (preview, diff) = session.replan(x)?;
    Ok(Json(json!({
        "expectation": preview.expectation,
        "plan": preview.plan,
        "dispositions": preview.dispositions,
        "conflicts": preview.conflicts,
        "diff": diff,
    })))
}

async fn get_dependencies(State(st): State<Shared>) -> ApiResult {
    let session = st.lock().await.session.clone();
    let deps = session.dependencies()?;
    let report = session.preview(&session.expectation)?;
    Ok(Json(json!({
        "dependencies": deps.iter().map(|d| json!({
            "implication": d.to_string(),
            "clause": d.clause(),
            "tests": d.tests(),
        })).collect::<Vec<_>>(),
        "constraints": report.constraints,
        "satisfied": session.plan.satisfied,
        "dropped_constraints": session.plan.dropped_constraints,
        "immediately_redundant": session.plan.immediately_redundant,
    })))
}

/// API routes, plus static assets from `assets` for every other path.
pub fn router(state: Shared, assets: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/session", get(get_session))
        .route("/api/plan", get(get_plan))
        .route("/api/result", post(post_result))
        .route("/api/expectation", post(post_expectation))
        .route("/api/replan", post(post_replan))
        .route("/api/whatif", post(post_whatif))
        .route("/api/drop", post(post_drop))
        .route("/api/dependencies", get(get_dependencies))
        .with_state(state);
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub fn shared(session: Session, session_path: Option<PathBuf>) -> Shared {
    Arc::new(Mutex::new(AppState { session, session_path }))
}

/// `--port`, then the environment variable, then the default.
pub fn resolve_port(flag: Option<u16>) -> Result<u16, CliError> {
    if let Some(p) = flag {
        return Ok(p);
    }
    match std::env::var(PORT_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("{PORT_ENV}={v} is not a port number"))),
        Err(_) => Ok(DEFAULT_PORT),
    }
}

pub async fn serve(app: Router, port: u16) -> Result<(), CliError> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| CliError::Io(format!("{addr}: {e}")))?;
    eprintln!("planwright listening on http://{addr}");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| CliError::Io(e.to_string()))
}
