//! HTTP/JSON front end for one acquisition session at a time.
//!
//! The session lives on a dedicated worker thread that runs bandit rounds and
//! waits for answers; handlers only read the views the worker publishes or send
//! it a message, so state reads never wait for a round to finish. A suggestion
//! that receives no answer within the timeout counts as a refusal.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::mpsc::{self, RecvTimeoutError};
use std::sync::{Arc, RwLock};
use std::thread;
use std::time::{Duration, Instant};

use anyhow::Result;
use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use demosuff::acquisition::{AcquisitionConfig, DemoSubmission, Round, Session, TeacherKind, Termination};
use demosuff::demonstration::DemoRequest;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::{oneshot, Mutex};

use crate::render::HeatmapView;

#[derive(Clone, Debug)]
pub struct ServiceOptions {
    pub suggestion_timeout: Duration,
    pub checkpoint: Option<PathBuf>,
}

impl Default for ServiceOptions {
    fn default() -> Self {
        Self { suggestion_timeout: Duration::from_secs(600), checkpoint: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    #[default]
    Idle,
    Evaluating,
    AwaitingDemo,
    Done,
}

/// Body of `GET /api/state`. Only `status` is present before a session starts.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iteration: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demo_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub teacher: Option<TeacherKind>,
    /// Per-cell failure estimates of the latest round.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_hat: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_arm: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminated: Option<Termination>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved_beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Default)]
struct Published {
    state: StateView,
    heatmap: Option<HeatmapView>,
    suggestion: Option<DemoRequest>,
    deadline: Option<Instant>,
}

enum Answer {
    Submission(DemoSubmission),
    Simulated,
}

enum AnswerError {
    /// The suggestion the client answered is no longer open.
    Stale,
    Rejected(String),
}

struct AnswerMsg {
    iteration: usize,
    answer: Answer,
    reply: oneshot::Sender<Result<(), AnswerError>>,
}

struct Inner {
    published: RwLock<Published>,
    worker: Mutex<Option<mpsc::Sender<AnswerMsg>>>,
    options: ServiceOptions,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(options: ServiceOptions) -> Self {
        Self(Arc::new(Inner { published: RwLock::default(), worker: Mutex::new(None), options }))
    }

    fn read<T>(&self, f: impl FnOnce(&Published) -> T) -> T {
        f(&self.0.published.read().unwrap_or_else(|e| e.into_inner()))
    }
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError(r.status(), r.body_text())
    }
}

type ApiResult<T> = std::result::Result<Json<T>, ApiError>;

fn publish(inner: &Inner, session: &Session, status: Status, deadline: Option<Instant>, error: Option<String>) {
    let s = session.state();
    let cfg = session.config();
    let last = s.history().last();
    let view = StateView {
        status,
        iteration: Some(s.iteration()),
        demo_count: Some(s.demo_count()),
        k: Some(cfg.k),
        epsilon: Some(cfg.epsilon),
        delta: Some(cfg.delta),
        beta: Some(cfg.beta),
        teacher: Some(cfg.teacher),
        mu_hat: last.map(|o| o.estimates.iter().map(|e| e.mu_hat()).collect()),
        best_arm: last.map(|o| o.best_arm),
        terminated: s.terminated(),
        achieved_beta: s.achieved_beta(),
        error,
    };
    let heatmap = HeatmapView::of(session.work_area(), s);
    let mut p = inner.published.write().unwrap_or_else(|e| e.into_inner());
    *p = Published { state: view, heatmap: Some(heatmap), suggestion: s.pending().cloned(), deadline };
}

fn save(inner: &Inner, session: &Session) {
    if let Some(path) = &inner.options.checkpoint {
        if let Err(e) = session.checkpoint().write(path) {
            log::error!("writing checkpoint {}: {e}", path.display());
        }
    }
}

/// Owns the session: alternates bandit rounds with waiting for the answer.
fn run_worker(inner: Arc<Inner>, mut session: Session, rx: mpsc::Receiver<AnswerMsg>) {
    let interactive = session.config().teacher == TeacherKind::Interactive;
    loop {
        publish(&inner, &session, Status::Evaluating, None, None);
        match session.evaluate() {
            Ok(Round::Terminated(how)) => {
                log::info!("session finished: {how:?}");
                save(&inner, &session);
                publish(&inner, &session, Status::Done, None, None);
                return;
            }
            Ok(Round::Request(req)) => log::info!("suggesting cell {} (iteration {})", req.arm_index, session.state().iteration()),
            Err(e) => {
                log::error!("bandit round failed: {e}");
                publish(&inner, &session, Status::Done, None, Some(e.to_string()));
                return;
            }
        }
        save(&inner, &session);
        if !interactive {
            if let Err(e) = session.answer_simulated() {
                publish(&inner, &session, Status::Done, None, Some(e.to_string()));
                return;
            }
            save(&inner, &session);
            if session.state().terminated().is_some() {
                publish(&inner, &session, Status::Done, None, None);
                return;
            }
            continue;
        }
        let iteration = session.state().iteration();
        let deadline = Instant::now() + inner.options.suggestion_timeout;
        publish(&inner, &session, Status::AwaitingDemo, Some(deadline), None);
        loop {
            match rx.recv_timeout(deadline.saturating_duration_since(Instant::now())) {
                Ok(msg) if msg.iteration != iteration => {
                    let _ = msg.reply.send(Err(AnswerError::Stale));
                }
                Ok(msg) => {
                    let result = match msg.answer {
                        Answer::Submission(s) => session.answer(s),
                        Answer::Simulated => session.answer_simulated(),
                    };
                    match result {
                        Ok(()) => {
                            let next = if session.state().terminated().is_some() { Status::Done } else { Status::Evaluating };
                            save(&inner, &session);
                            publish(&inner, &session, next, None, None);
                            let _ = msg.reply.send(Ok(()));
                            break;
                        }
                        // the suggestion stays open for another attempt
                        Err(e) => {
                            let _ = msg.reply.send(Err(AnswerError::Rejected(e.to_string())));
                        }
                    }
                }
                Err(RecvTimeoutError::Timeout) => {
                    log::warn!("suggestion {iteration} timed out; treating it as a refusal");
                    let refusal = DemoSubmission { anchor: None, waypoints_object_frame: vec![], refuse: true };
                    if let Err(e) = session.answer(refusal) {
                        publish(&inner, &session, Status::Done, None, Some(e.to_string()));
                        return;
                    }
                    save(&inner, &session);
                    break;
                }
                Err(RecvTimeoutError::Disconnected) => return,
            }
        }
        if session.state().terminated().is_some() {
            publish(&inner, &session, Status::Done, None, None);
            return;
        }
    }
}

async fn get_state(State(app): State<AppState>) -> Json<StateView> {
    Json(app.read(|p| p.state.clone()))
}

async fn get_heatmap(State(app): State<AppState>) -> ApiResult<HeatmapView> {
    app.read(|p| p.heatmap.clone())
        .map(Json)
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, "no session has been started".into()))
}

#[derive(Serialize)]
struct SuggestionView {
    suggestion: Option<DemoRequest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expires_in_ms: Option<u128>,
}

async fn get_suggestion(State(app): State<AppState>) -> Json<SuggestionView> {
    Json(app.read(|p| SuggestionView {
        suggestion: p.suggestion.clone().filter(|_| p.state.status == Status::AwaitingDemo),
        expires_in_ms: p.deadline.map(|d| d.saturating_duration_since(Instant::now()).as_millis()),
    }))
}

#[derive(Deserialize)]
struct StartRequest {
    config: AcquisitionConfig,
}

async fn post_start(State(app): State<AppState>, body: std::result::Result<Json<StartRequest>, JsonRejection>) -> ApiResult<StateView> {
    let Json(StartRequest { config }) = body?;
    let mut worker = app.0.worker.lock().await;
    let status = app.read(|p| p.state.status);
    if matches!(status, Status::Evaluating | Status::AwaitingDemo) {
        return Err(ApiError(StatusCode::CONFLICT, "a session is already running".into()));
    }
    let session = tokio::task::spawn_blocking(move || Session::new(config))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(|e| ApiError(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    publish(&app.0, &session, Status::Evaluating, None, None);
    let (tx, rx) = mpsc::channel();
    let inner = Arc::clone(&app.0);
    thread::Builder::new()
        .name("acquisition".into())
        .spawn(move || run_worker(inner, session, rx))
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    *worker = Some(tx);
    Ok(Json(app.read(|p| p.state.clone())))
}

async fn send_answer(app: &AppState, answer: Answer) -> ApiResult<StateView> {
    let (status, iteration) = app.read(|p| (p.state.status, p.state.iteration.unwrap_or(0)));
    let conflict = || ApiError(StatusCode::CONFLICT, "no suggestion is pending".into());
    if status != Status::AwaitingDemo {
        return Err(conflict());
    }
    let (reply, wait) = oneshot::channel();
    let sent = app.0.worker.lock().await.as_ref().is_some_and(|tx| tx.send(AnswerMsg { iteration, answer, reply }).is_ok());
    if !sent {
        return Err(conflict());
    }
    match wait.await {
        Ok(Ok(())) => Ok(Json(app.read(|p| p.state.clone()))),
        Ok(Err(AnswerError::Rejected(why))) => Err(ApiError(StatusCode::UNPROCESSABLE_ENTITY, why)),
        Ok(Err(AnswerError::Stale)) | Err(_) => Err(conflict()),
    }
}

async fn post_demonstration(
    State(app): State<AppState>,
    body: std::result::Result<Json<DemoSubmission>, JsonRejection>,
) -> ApiResult<StateView> {
    let Json(submission) = body?;
    send_answer(&app, Answer::Submission(submission)).await
}

/// Answers the open suggestion with the simulated teacher, so an interactive
/// session can be driven forward one round at a time without a human.
async fn post_step(State(app): State<AppState>) -> ApiResult<StateView> {
    send_answer(&app, Answer::Simulated).await
}

pub fn router(app: AppState) -> Router {
    Router::new()
        .route("/api/state", get(get_state))
        .route("/api/heatmap", get(get_heatmap))
        .route("/api/suggestion", get(get_suggestion))
        .route("/api/start", post(post_start))
        .route("/api/step", post(post_step))
        .route("/api/demonstration", post(post_demonstration))
        .with_state(app)
}

pub async fn serve(addr: SocketAddr, options: ServiceOptions) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(options))).await?;
    Ok(())
}
