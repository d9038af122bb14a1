//! Live operator service. One websocket session at a time drives a trial
//! under the live policy: network receipt and the tick loop meet in a
//! latest-wins mailbox that is drained once per tick.

use std::io;
use std::path::{Component, Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use socnav_core::{Condition, Layout, OperatorPolicy, ScenarioConfig, StickInput, Trial, TrialStatus};
use tokio::net::TcpListener;
use tokio::time::{Interval, MissedTickBehavior};

use crate::batch::{log_file_name, scenario_config};
use crate::logfile::TrialLog;
use crate::protocol::{EndReason, ErrorCode, WireMessage, PROTOCOL_VERSION};

#[derive(Debug, Clone)]
pub struct ServeOptions {
    /// Where finished trial logs are written.
    pub out_dir: PathBuf,
    /// Simulated seconds per wall-clock second; infinity runs unpaced.
    pub speed: f64,
    /// Wait for a fresh Input after every StateUpdate before ticking again.
    /// Meant for scripted clients that need a fixed one-tick input latency.
    pub lockstep: bool,
    /// Static files served under `/` for the browser client.
    pub assets: Option<PathBuf>,
}

impl Default for ServeOptions {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("logs"),
            speed: 1.0,
            lockstep: false,
            assets: None,
        }
    }
}

#[derive(Clone)]
struct AppState {
    opts: Arc<ServeOptions>,
    busy: Arc<AtomicBool>,
}

pub fn router(opts: ServeOptions) -> Router {
    let state = AppState {
        opts: Arc::new(opts),
        busy: Arc::new(AtomicBool::new(false)),
    };
    Router::new()
        .route("/ws", get(ws_handler))
        .route("/", get(index))
        .route("/{*path}", get(asset))
        .with_state(state)
}

/// Serves until the listener fails.
pub async fn serve(listener: TcpListener, opts: ServeOptions) -> io::Result<()> {
    tokio::fs::create_dir_all(&opts.out_dir).await?;
    tracing::info!(addr = ?listener.local_addr()?, "listening");
    axum::serve(listener, router(opts)).await
}

async fn ws_handler(ws: WebSocketUpgrade, State(app): State<AppState>) -> Response {
    ws.on_upgrade(move |socket| session(socket, app))
}

async fn index(State(app): State<AppState>) -> Response {
    serve_file(&app, "index.html").await
}

async fn asset(State(app): State<AppState>, UrlPath(path): UrlPath<String>) -> Response {
    serve_file(&app, &path).await
}

async fn serve_file(app: &AppState, rel: &str) -> Response {
    let Some(root) = &app.opts.assets else {
        return StatusCode::NOT_FOUND.into_response();
    };
    let rel = Path::new(rel);
    if !rel.components().all(|c| matches!(c, Component::Normal(_))) {
        return StatusCode::NOT_FOUND.into_response();
    }
    match tokio::fs::read(root.join(rel)).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, content_type(rel))], bytes).into_response(),
        Err(_) => StatusCode::NOT_FOUND.into_response(),
    }
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript",
        Some("css") => "text/css",
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        _ => "application/octet-stream",
    }
}

/// Releases the single-session slot when the session ends, however it ends.
struct BusyGuard(Arc<AtomicBool>);

impl Drop for BusyGuard {
    fn drop(&mut self) {
        self.0.store(false, Ordering::SeqCst);
    }
}

/// Latest-wins input slot. Inputs must carry strictly increasing sequence
/// numbers; stale ones are dropped.
#[derive(Debug, Default)]
pub struct Mailbox {
    last_seq: Option<u64>,
    pending: Option<StickInput>,
}

impl Mailbox {
    /// Returns whether the input was accepted.
    pub fn offer(&mut self, seq: u64, input: StickInput) -> bool {
        if self.last_seq.is_some_and(|last| seq <= last) {
            return false;
        }
        self.last_seq = Some(seq);
        self.pending = Some(input);
        true
    }

    pub fn take(&mut self) -> Option<StickInput> {
        self.pending.take()
    }
}

struct LiveTrial {
    trial: Trial,
    pace: Option<Interval>,
    awaiting_input: bool,
}

impl LiveTrial {
    async fn ready(&mut self) {
        match &mut self.pace {
            Some(i) => {
                i.tick().await;
            }
            None => tokio::task::yield_now().await,
        }
    }
}

enum Flow {
    Continue,
    Close,
}

async fn send(socket: &mut WebSocket, msg: &WireMessage) -> Result<(), axum::Error> {
    socket.send(Message::Text(msg.to_json().into())).await
}

async fn session(mut socket: WebSocket, app: AppState) {
    if app.busy.swap(true, Ordering::SeqCst) {
        let _ = send(&mut socket, &WireMessage::error(ErrorCode::Busy, "another operator session is active")).await;
        let _ = socket.send(Message::Close(None)).await;
        return;
    }
    let _guard = BusyGuard(app.busy.clone());
    match drive(&mut socket, &app).await {
        Ok(()) => tracing::info!("session closed"),
        Err(e) => tracing::warn!(error = %e, "session ended with a transport error"),
    }
    let _ = socket.send(Message::Close(None)).await;
}

async fn drive(socket: &mut WebSocket, app: &AppState) -> Result<(), axum::Error> {
    let mut live: Option<LiveTrial> = None;
    let mut mailbox = Mailbox::default();
    loop {
        let can_tick = live.as_ref().is_some_and(|l| !l.awaiting_input);
        tokio::select! {
            biased;
            msg = socket.recv() => {
                let Some(msg) = msg else { return Ok(()) };
                if let Flow::Close = on_message(msg?, socket, app, &mut live, &mut mailbox).await? {
                    return Ok(());
                }
            }
            _ = async { live.as_mut().expect("guarded by can_tick").ready().await }, if can_tick => {
                step(socket, app, &mut live, &mut mailbox).await?;
            }
        }
    }
}

async fn protocol_error(socket: &mut WebSocket, text: String) -> Result<Flow, axum::Error> {
    tracing::warn!(%text, "protocol error");
    send(socket, &WireMessage::error(ErrorCode::Protocol, text)).await?;
    Ok(Flow::Close)
}

async fn on_message(
    msg: Message,
    socket: &mut WebSocket,
    app: &AppState,
    live: &mut Option<LiveTrial>,
    mailbox: &mut Mailbox,
) -> Result<Flow, axum::Error> {
    let text = match msg {
        Message::Text(t) => t,
        Message::Binary(_) => return protocol_error(socket, "binary frames are not part of the protocol".into()).await,
        Message::Close(_) => return Ok(Flow::Close),
        Message::Ping(_) | Message::Pong(_) => return Ok(Flow::Continue),
    };
    let msg: WireMessage = match serde_json::from_str(text.as_str()) {
        Ok(m) => m,
        Err(e) => return protocol_error(socket, format!("malformed message: {e}")).await,
    };
    match msg {
        WireMessage::ClientHello { name, protocol } => {
            if protocol.is_some_and(|p| p != PROTOCOL_VERSION) {
                return protocol_error(socket, format!("protocol {} is not supported", protocol.unwrap_or(0))).await;
            }
            tracing::info!(%name, "operator connected");
            let hello = WireMessage::ServerHello {
                protocol: PROTOCOL_VERSION,
                server: format!("socnav-gateway/{}", env!("CARGO_PKG_VERSION")),
            };
            send(socket, &hello).await?;
        }
        WireMessage::StartTrial {
            scenario,
            layout,
            condition,
            seed,
            max_duration,
            ped_count,
        } => {
            if live.is_some() {
                send(socket, &WireMessage::error(ErrorCode::State, "a trial is already running")).await?;
                return Ok(Flow::Continue);
            }
            let cfg = scenario_config(scenario, layout.unwrap_or(Layout::HallA), seed, max_duration, ped_count);
            match start(cfg, condition, &app.opts) {
                Ok(t) => {
                    mailbox.take();
                    *live = Some(t);
                }
                Err(text) => send(socket, &WireMessage::error(ErrorCode::Config, text)).await?,
            }
        }
        WireMessage::Input {
            seq, axis_x, axis_y, ..
        } => {
            if !(axis_x.is_finite() && axis_y.is_finite()) {
                return protocol_error(socket, "input axes must be finite".into()).await;
            }
            if mailbox.offer(seq, StickInput::new(axis_x, axis_y)) {
                if let Some(l) = live.as_mut() {
                    l.awaiting_input = false;
                }
            }
        }
        other => {
            let tag = serde_json::to_value(&other).ok().and_then(|v| v["type"].as_str().map(str::to_string));
            return protocol_error(socket, format!("`{}` is sent by the server only", tag.unwrap_or_default())).await;
        }
    }
    Ok(Flow::Continue)
}

fn start(cfg: ScenarioConfig, condition: Condition, opts: &ServeOptions) -> Result<LiveTrial, String> {
    let period = cfg.dt / opts.speed;
    let trial = Trial::new(cfg, OperatorPolicy::Live, condition).map_err(|e| e.to_string())?;
    let pace = (period.is_finite() && period > 0.0).then(|| {
        let mut i = tokio::time::interval(Duration::from_secs_f64(period));
        i.set_missed_tick_behavior(MissedTickBehavior::Delay);
        i
    });
    tracing::info!(seed = trial.config().seed, condition = %condition, "trial started");
    Ok(LiveTrial {
        trial,
        pace,
        awaiting_input: false,
    })
}

async fn step(
    socket: &mut WebSocket,
    app: &AppState,
    live: &mut Option<LiveTrial>,
    mailbox: &mut Mailbox,
) -> Result<(), axum::Error> {
    let Some(l) = live.as_mut() else { return Ok(()) };
    let out = match l.trial.tick(mailbox.take()) {
        Ok(out) => out,
        Err(e) => {
            *live = None;
            return send(socket, &WireMessage::error(ErrorCode::Config, e.to_string())).await;
        }
    };
    l.awaiting_input = app.opts.lockstep;
    let update = WireMessage::StateUpdate {
        tick: out.record.tick,
        t: out.record.t,
        status: out.status,
        robot: out.record.robot,
        pedestrians: out.record.peds,
        assistance: out.assistance,
        metrics: l.trial.metrics(),
    };
    send(socket, &update).await?;

    let Some(reason) = EndReason::from_status(out.status) else {
        return Ok(());
    };
    let trial = live.take().expect("checked above").trial;
    let cfg = trial.config().clone();
    let condition = trial.condition();
    let policy = trial.policy().label();
    let outcome = trial.finish();
    debug_assert_ne!(outcome.status, TrialStatus::Running);
    let log = TrialLog::new(&cfg, condition, &policy, outcome);
    let log_file = match persist(&log, &app.opts.out_dir, &log_file_name(&cfg, condition, &policy)) {
        Ok(p) => Some(p.display().to_string()),
        Err(e) => {
            tracing::error!(error = %e, "could not write trial log");
            None
        }
    };
    let end = WireMessage::TrialEnd {
        metrics: log.header.metrics,
        reason,
        log_file,
    };
    send(socket, &end).await
}

/// Writes the log without clobbering an earlier trial of the same name.
fn persist(log: &TrialLog, dir: &Path, name: &str) -> Result<PathBuf, crate::logfile::LogError> {
    std::fs::create_dir_all(dir)?;
    let stem = name.trim_end_matches(".jsonl");
    let mut path = dir.join(name);
    let mut k = 1;
    while path.exists() {
        path = dir.join(format!("{stem}-{k}.jsonl"));
        k += 1;
    }
    log.save(&path)?;
    Ok(path)
}
