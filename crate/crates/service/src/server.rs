//! Websocket server. Each connection gets its own [`LiveSession`] ticked
//! on absolute wall-clock deadlines, so per-tick jitter never accumulates
//! into drift.

use std::future::Future;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;
use futures::{SinkExt, StreamExt};
use tokio::net::TcpListener;
use tokio::time::{interval_at, Instant, MissedTickBehavior};

use crate::config::ServiceConfig;
use crate::protocol::{encode, Encoded, ServerMessage};
use crate::session::{LiveSession, LogSink};

struct AppState {
    config: ServiceConfig,
    connections: AtomicU64,
}

pub fn router(config: ServiceConfig) -> Router {
    let state = Arc::new(AppState {
        config,
        connections: AtomicU64::new(0),
    });
    Router::new()
        .route("/ws", get(upgrade))
        .route("/health", get(|| async { "ok" }))
        .with_state(state)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    config: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(config))
        .with_graceful_shutdown(shutdown)
        .await
}

async fn upgrade(ws: WebSocketUpgrade, State(state): State<Arc<AppState>>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| async move {
        let n = state.connections.fetch_add(1, Ordering::Relaxed) + 1;
        if let Err(e) = run_connection(socket, &state.config, n).await {
            tracing::warn!(connection = n, "session ended with error: {e:#}");
        }
    })
}

fn log_path(config: &ServiceConfig, id: &str) -> Option<PathBuf> {
    config
        .server
        .log_dir
        .as_ref()
        .map(|d| d.join(format!("{id}.jsonl")))
}

fn to_ws(msg: &ServerMessage) -> Message {
    match encode(msg) {
        Encoded::Binary(b) => Message::Binary(b.into()),
        Encoded::Text(t) => Message::Text(t.into()),
    }
}

async fn run_connection(socket: WebSocket, config: &ServiceConfig, n: u64) -> anyhow::Result<()> {
    let id = format!("live-{}-{n}", std::process::id());
    let sink: Option<LogSink> = match log_path(config, &id) {
        Some(path) => {
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            Some(Box::new(std::io::BufWriter::new(std::fs::File::create(
                &path,
            )?)))
        }
        None => None,
    };
    let (mut session, hello) = LiveSession::start(
        config.sim.clone(),
        config.server.scenario,
        config.server.send_scene,
        sink.map(|s| (s, id.as_str(), config.server.participant.as_str())),
    )?;
    tracing::info!(session = %id, "client connected");

    let (mut tx, mut rx) = socket.split();
    let dt = Duration::from_secs_f64(config.sim.game.tick_seconds());
    let mut ticker = interval_at(Instant::now() + dt, dt);
    ticker.set_missed_tick_behavior(MissedTickBehavior::Burst);

    let mut outcome = send_all(&mut tx, &hello).await;
    while outcome.is_ok() {
        tokio::select! {
            biased;
            _ = ticker.tick() => {
                let out = session.tick();
                outcome = send_all(&mut tx, &out).await;
            }
            msg = rx.next() => match msg {
                Some(Ok(Message::Text(t))) => {
                    let out = session.handle(t.as_str());
                    outcome = send_all(&mut tx, &out).await;
                }
                Some(Ok(Message::Binary(_))) => {
                    outcome = send_all(&mut tx, &[ServerMessage::error("binary client messages are not supported")]).await;
                }
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                Some(Ok(_)) => {}
            },
        }
    }
    session.close()?;
    tracing::info!(session = %id, "client disconnected");
    Ok(())
}

async fn send_all<S>(tx: &mut S, msgs: &[ServerMessage]) -> Result<(), axum::Error>
where
    S: SinkExt<Message, Error = axum::Error> + Unpin,
{
    for m in msgs {
        tx.feed(to_ws(m)).await?;
    }
    tx.flush().await
}
