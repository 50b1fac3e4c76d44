//! Routes and handlers.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use chainnet::SenseRecord;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::auth::Tokens;
use crate::draft::{Draft, EditOp};
use crate::store::{Next, Revision, Store, StoreError, TaskId};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<RwLock<Store>>,
    pub tokens: Arc<Tokens>,
}

impl AppState {
    pub fn new(store: Store, tokens: Tokens) -> Self {
        AppState {
            store: Arc::new(RwLock::new(store)),
            tokens: Arc::new(tokens),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/tasks/next", get(next_task))
        .route("/tasks/{id}", get(get_task))
        .route("/tasks/{id}/check", post(check))
        .route("/tasks/{id}/edit", post(edit))
        .route("/tasks/{id}/submit", put(submit))
        .route("/tasks/{id}/history", get(history))
        .route("/gloss", get(gloss))
        .route("/export", get(export))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

pub enum ApiError {
    Unauthorized,
    BadRequest(String),
    Store(StoreError),
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        ApiError::Store(e)
    }
}

fn message(status: StatusCode, text: String) -> Response {
    (status, Json(json!({ "error": text }))).into_response()
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        match self {
            ApiError::Unauthorized => message(StatusCode::UNAUTHORIZED, "missing or unknown bearer token".into()),
            ApiError::BadRequest(m) => message(StatusCode::BAD_REQUEST, m),
            ApiError::Store(e) => match e {
                StoreError::NotFound(_) => message(StatusCode::NOT_FOUND, e.to_string()),
                StoreError::Conflict { .. } => message(StatusCode::CONFLICT, e.to_string()),
                StoreError::Edit(_) => message(StatusCode::BAD_REQUEST, e.to_string()),
                StoreError::Rejected(report) => (StatusCode::BAD_REQUEST, Json(*report)).into_response(),
                _ => message(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
            },
        }
    }
}

/// The caller's annotator id, from the bearer token.
pub struct Annotator(pub String);

impl FromRequestParts<AppState> for Annotator {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, ApiError> {
        parts
            .headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| state.tokens.authorize(v))
            .map(|who| Annotator(who.to_string()))
            .ok_or(ApiError::Unauthorized)
    }
}

async fn next_task(State(s): State<AppState>, Annotator(who): Annotator) -> Result<Response, ApiError> {
    let next = s.store.write().next(&who)?;
    Ok(match next {
        Next::Task(t) => Json(*t).into_response(),
        Next::Done => Json(json!({ "status": "done" })).into_response(),
    })
}

async fn get_task(State(s): State<AppState>, Annotator(who): Annotator, Path(id): Path<TaskId>) -> Result<Response, ApiError> {
    let store = s.store.read();
    Ok(Json(store.owned(id, &who)?).into_response())
}

/// Checks the posted draft, or the stored one when the body is empty.
async fn check(
    State(s): State<AppState>,
    Annotator(who): Annotator,
    Path(id): Path<TaskId>,
    body: axum::body::Bytes,
) -> Result<Response, ApiError> {
    let store = s.store.read();
    let task = store.owned(id, &who)?;
    let draft = if body.iter().all(u8::is_ascii_whitespace) {
        task.draft.clone()
    } else {
        serde_json::from_slice::<Draft>(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?
    };
    Ok(Json(draft.check_against(&task.inventory)).into_response())
}

#[derive(Deserialize)]
struct EditRequest {
    expected_version: u64,
    #[serde(flatten)]
    op: EditOp,
}

async fn edit(
    State(s): State<AppState>,
    Annotator(who): Annotator,
    Path(id): Path<TaskId>,
    Json(req): Json<EditRequest>,
) -> Result<Response, ApiError> {
    let mut store = s.store.write();
    let task = store.edit(id, &who, req.op, req.expected_version)?;
    Ok(Json(task).into_response())
}

#[derive(Deserialize)]
struct SubmitRequest {
    expected_version: u64,
    annotation: Draft,
}

async fn submit(
    State(s): State<AppState>,
    Annotator(who): Annotator,
    Path(id): Path<TaskId>,
    Json(req): Json<SubmitRequest>,
) -> Result<Response, ApiError> {
    let mut store = s.store.write();
    let task = store.submit(id, &who, req.annotation, req.expected_version)?;
    Ok(Json(task).into_response())
}

#[derive(Serialize)]
struct History<'a> {
    id: TaskId,
    word: &'a str,
    version: u64,
    submissions: &'a [Revision],
}

async fn history(State(s): State<AppState>, Annotator(who): Annotator, Path(id): Path<TaskId>) -> Result<Response, ApiError> {
    let store = s.store.read();
    let t = store.owned(id, &who)?;
    Ok(Json(History {
        id,
        word: &t.word,
        version: t.version,
        submissions: &t.submissions,
    })
    .into_response())
}

#[derive(Deserialize)]
struct GlossQuery {
    lemma: String,
}

#[derive(Serialize)]
struct Gloss<'a> {
    lemma: String,
    senses: &'a [SenseRecord],
}

async fn gloss(State(s): State<AppState>, _: Annotator, Query(q): Query<GlossQuery>) -> Response {
    let store = s.store.read();
    let raw = q.lemma.trim().replace('_', " ");
    let found = [raw.clone(), raw.to_lowercase()]
        .into_iter()
        .find_map(|l| store.inventory(&l).map(|senses| (l, senses)));
    match found {
        Some((lemma, senses)) => Json(Gloss { lemma, senses }).into_response(),
        None => message(StatusCode::NOT_FOUND, format!("no entry for `{}`", q.lemma)),
    }
}

async fn export(State(s): State<AppState>, _: Annotator) -> Result<Response, ApiError> {
    let records = s.store.read().export()?;
    let mut body = String::new();
    for r in &records {
        body.push_str(&serde_json::to_string(r).expect("annotation serializes"));
        body.push('\n');
    }
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
}
