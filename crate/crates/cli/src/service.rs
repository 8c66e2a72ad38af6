//! HTTP service for interactive focal exploration.
//!
//! The session (graph, embedding, fitted d_max, overlay tables, label
//! index) is loaded once and read-only afterwards. Every focal request
//! runs its own BFS, focal correction, projection and rasterization.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use focalsphere_core::focal::{fit_dmax_from, fit_dmax_global, DEFAULT_ALPHA};
use focalsphere_core::graph::bfs_distances;
use focalsphere_core::layout::run_layout;
use focalsphere_core::render::{rasterize, view_from_distances, FocalView, FOCAL_STAMP};
use focalsphere_core::{FocalParams, Graph, OverlayMode, UnitVec3};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::commands::Overlays;
use crate::error::{CliError, CliResult};
use crate::input::{load_embedding, load_graph};
use crate::settings::Settings;

pub const DEFAULT_SERVICE_WIDTH: u32 = 512;
/// Largest image a request may ask for; bounds per-request raster memory.
pub const MAX_SERVICE_WIDTH: u32 = 2048;
pub const SEARCH_LIMIT: usize = 50;
/// Event-marked nodes returned as selectable, earliest first.
pub const MAX_EVENT_SELECTABLE: usize = 1_000;
pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";
pub const ADDR_ENV: &str = "FOCALSPHERE_ADDR";

pub struct Session {
    pub graph: Graph,
    pub positions: Vec<UnitVec3>,
    pub d_max: f64,
    pub overlays: Overlays,
    labels: Vec<String>,
    folded: Vec<String>,
    index: HashMap<String, u32>,
}

impl Session {
    /// Builds the search index and fits d_max (unless given).
    pub fn new(
        graph: Graph,
        positions: Vec<UnitVec3>,
        overlays: Overlays,
        d_max: Option<f64>,
        seed: u64,
    ) -> CliResult<Session> {
        if positions.len() != graph.node_count() {
            return Err(CliError::input("embedding and graph sizes differ"));
        }
        let d_max = match d_max {
            Some(d) => d,
            None => fit_dmax_global(&graph, &positions, seed)?,
        };
        let labels: Vec<String> = (0..graph.node_count())
            .map(|i| graph.label(i).into_owned())
            .collect();
        let folded = labels.iter().map(|l| l.to_lowercase()).collect();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u32))
            .collect();
        Ok(Session {
            graph,
            positions,
            d_max,
            overlays,
            labels,
            folded,
            index,
        })
    }

    /// Loads graph, embedding and overlays named by the flags. Without
    /// `--embedding` the layout is computed first.
    pub fn from_settings(s: &Settings) -> CliResult<Session> {
        let graph = load_graph(s)?;
        let positions = match s.embedding.as_deref() {
            Some(p) => load_embedding(p, &graph)?.positions,
            None => {
                log::info!("no embedding given; computing layout");
                run_layout(&graph, &s.layout_config(graph.node_count()))?.positions
            }
        };
        let overlays = Overlays::load(s, &graph)?;
        Session::new(graph, positions, overlays, s.d_max, s.seed())
    }

    pub fn lookup(&self, label: &str) -> Option<usize> {
        self.index.get(label).map(|&i| i as usize)
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Case-insensitive substring matches ordered by match position, then
    /// label, at most `limit`.
    pub fn search(&self, q: &str, limit: usize) -> Vec<usize> {
        let q = q.to_lowercase();
        let mut hits: Vec<(usize, &str, usize)> = self
            .folded
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.find(&q).map(|pos| (pos, self.labels[i].as_str(), i)))
            .collect();
        hits.sort_unstable();
        hits.into_iter().take(limit).map(|h| h.2).collect()
    }
}

/// Shared state; empty until the session has loaded.
#[derive(Clone, Default)]
pub struct AppState {
    session: Arc<OnceLock<Session>>,
}

impl AppState {
    pub fn empty() -> AppState {
        AppState::default()
    }

    pub fn loaded(session: Session) -> AppState {
        let s = AppState::empty();
        s.install(session);
        s
    }

    pub fn install(&self, session: Session) {
        if self.session.set(session).is_err() {
            log::warn!("session already loaded");
        }
    }

    fn get(&self) -> Result<&Session, Response> {
        self.session
            .get()
            .ok_or_else(|| error(StatusCode::SERVICE_UNAVAILABLE, "session is still loading"))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/meta", get(meta))
        .route("/focal/{label}", get(focal))
        .route("/focal/{label}/selectable", get(selectable))
        .route("/search", get(search))
        .with_state(state)
}

fn error(status: StatusCode, msg: impl Into<String>) -> Response {
    (status, Json(json!({ "error": msg.into() }))).into_response()
}

fn cli_error(e: CliError) -> Response {
    let status = match e {
        CliError::Argument(_) => StatusCode::BAD_REQUEST,
        CliError::Numeric(_) => StatusCode::UNPROCESSABLE_ENTITY,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    };
    error(status, e.to_string())
}

#[derive(Serialize)]
struct MetaBody {
    nodes: usize,
    edges: usize,
    d_max: f64,
    overlays: Vec<OverlayMode>,
    default_overlay: OverlayMode,
    colormaps: HashMap<&'static str, &'static str>,
    max_width: u32,
}

async fn meta(State(st): State<AppState>) -> Response {
    let s = match st.get() {
        Ok(s) => s,
        Err(r) => return r,
    };
    let mut overlays = vec![OverlayMode::None, OverlayMode::DistanceBands];
    if s.overlays.categories.is_some() {
        overlays.push(OverlayMode::Category);
    }
    if s.overlays.events.is_some() {
        overlays.push(OverlayMode::EventTime);
    }
    let colormaps = overlays
        .iter()
        .filter_map(|m| m.colormap_id().map(|id| (m.name(), id)))
        .collect();
    Json(MetaBody {
        nodes: s.graph.node_count(),
        edges: s.graph.edge_count(),
        d_max: s.d_max,
        default_overlay: s.overlays.default_mode(),
        overlays,
        colormaps,
        max_width: MAX_SERVICE_WIDTH,
    })
    .into_response()
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct FocalQuery {
    pub alpha: Option<f64>,
    pub width: Option<u32>,
    pub stamp: Option<u32>,
    pub overlay: Option<OverlayMode>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    /// Fit d_max from this focal node's distances instead of the session fit.
    pub refit: Option<bool>,
}

impl FocalQuery {
    fn alpha(&self) -> CliResult<f64> {
        let a = self.alpha.unwrap_or(DEFAULT_ALPHA);
        if !(0.0..=1.0).contains(&a) {
            return Err(CliError::arg(format!("alpha {a} outside [0, 1]")));
        }
        Ok(a)
    }

    fn width(&self) -> CliResult<u32> {
        let w = self.width.unwrap_or(DEFAULT_SERVICE_WIDTH);
        if !(focalsphere_core::render::MIN_WIDTH..=MAX_SERVICE_WIDTH).contains(&w) {
            return Err(CliError::arg(format!(
                "width {w} outside [{}, {MAX_SERVICE_WIDTH}]",
                focalsphere_core::render::MIN_WIDTH
            )));
        }
        Ok(w)
    }

    fn window(&self) -> [f64; 2] {
        [self.t0.unwrap_or(0.0), self.t1.unwrap_or(1.0)]
    }
}

struct Timed<T> {
    value: T,
    bfs_ms: f64,
    render_ms: f64,
    encode_ms: f64,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// BFS, d_max choice and focal view for one request.
fn focal_view(s: &Session, focal: usize, q: &FocalQuery) -> CliResult<(FocalView, f64, f64)> {
    let alpha = q.alpha()?;
    let t = Instant::now();
    let dist = bfs_distances(&s.graph, focal)?;
    let bfs_ms = ms(t);
    let t = Instant::now();
    let d_max = if q.refit.unwrap_or(false) {
        fit_dmax_from(&s.positions, &dist)?
    } else {
        s.d_max
    };
    let params = FocalParams { focal, alpha, d_max };
    params.validate()?;
    let view = view_from_distances(&s.positions, dist, &params)?;
    Ok((view, bfs_ms, ms(t)))
}

fn render_png(s: &Session, focal: usize, q: &FocalQuery) -> CliResult<Timed<Vec<u8>>> {
    let width = q.width()?;
    let mode = q.overlay.unwrap_or_else(|| s.overlays.default_mode());
    let spec = s.overlays.spec(mode, q.window());
    spec.validate(s.graph.node_count())?;
    let (view, bfs_ms, view_ms) = focal_view(s, focal, q)?;
    let t = Instant::now();
    let raster = rasterize(&view, &spec, width, q.stamp.unwrap_or(FOCAL_STAMP))?;
    let render_ms = view_ms + ms(t);
    let t = Instant::now();
    let png = raster.encode_png()?;
    Ok(Timed {
        value: png,
        bfs_ms,
        render_ms,
        encode_ms: ms(t),
    })
}

fn header_ms(v: f64) -> HeaderValue {
    HeaderValue::from_str(&format!("{v:.3}")).expect("ascii number")
}

async fn focal(
    State(st): State<AppState>,
    Path(label): Path<String>,
    q: Result<Query<FocalQuery>, QueryRejection>,
) -> Response {
    let Query(q) = match q {
        Ok(q) => q,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.body_text()),
    };
    let focal = match st.get() {
        Ok(s) => match s.lookup(&label) {
            Some(i) => i,
            None => return error(StatusCode::NOT_FOUND, format!("unknown node {label:?}")),
        },
        Err(r) => return r,
    };
    let joined = tokio::task::spawn_blocking(move || {
        let s = st.get().map_err(|_| CliError::input("session unloaded"))?;
        render_png(s, focal, &q)
    })
    .await;
    match joined {
        Ok(Ok(r)) => {
            let mut resp = r.value.into_response();
            let h = resp.headers_mut();
            h.insert(header::CONTENT_TYPE, HeaderValue::from_static("image/png"));
            h.insert("x-bfs-ms", header_ms(r.bfs_ms));
            h.insert("x-render-ms", header_ms(r.render_ms));
            h.insert("x-encode-ms", header_ms(r.encode_ms));
            resp
        }
        Ok(Err(e)) => cli_error(e),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selectable {
    pub label: String,
    pub u: f64,
    pub v: f64,
    /// Hop distance to the focal node; absent when unreachable.
    pub d: Option<u32>,
    pub t: Option<f64>,
}

/// The focal node, its neighbors and the earliest event-marked nodes in
/// the time window, with their plane coordinates.
fn selectable_nodes(s: &Session, focal: usize, q: &FocalQuery) -> CliResult<Vec<Selectable>> {
    let (view, _, _) = focal_view(s, focal, q)?;
    let mut ids: Vec<usize> = vec![focal];
    ids.extend(s.graph.neighbors(focal).iter().map(|&j| j as usize));
    if let Some(events) = &s.overlays.events {
        let [t0, t1] = q.window();
        let mut marked: Vec<(f64, usize)> = events
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.filter(|t| (t0..=t1).contains(t)).map(|t| (t, i)))
            .filter(|&(_, i)| i != focal && !s.graph.has_edge(focal, i))
            .collect();
        marked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        ids.extend(marked.into_iter().take(MAX_EVENT_SELECTABLE).map(|m| m.1));
    }
    Ok(ids
        .into_iter()
        .map(|i| Selectable {
            label: s.label(i).to_owned(),
            u: view.coords[i].u,
            v: view.coords[i].v,
            d: view.dist.get(i),
            t: s.overlays.events.as_ref().and_then(|e| e[i]),
        })
        .collect())
}

async fn selectable(
    State(st): State<AppState>,
    Path(label): Path<String>,
    q: Result<Query<FocalQuery>, QueryRejection>,
) -> Response {
    let Query(q) = match q {
        Ok(q) => q,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.body_text()),
    };
    let focal = match st.get() {
        Ok(s) => match s.lookup(&label) {
            Some(i) => i,
            None => return error(StatusCode::NOT_FOUND, format!("unknown node {label:?}")),
        },
        Err(r) => return r,
    };
    let joined = tokio::task::spawn_blocking(move || {
        let s = st.get().map_err(|_| CliError::input("session unloaded"))?;
        selectable_nodes(s, focal, &q)
    })
    .await;
    match joined {
        Ok(Ok(nodes)) => Json(nodes).into_response(),
        Ok(Err(e)) => cli_error(e),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

#[derive(Deserialize)]
struct SearchQuery {
    q: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub label: String,
    pub degree: usize,
}

async fn search(
    State(st): State<AppState>,
    q: Result<Query<SearchQuery>, QueryRejection>,
) -> Response {
    let s = match st.get() {
        Ok(s) => s,
        Err(r) => return r,
    };
    let q = match q {
        Ok(Query(SearchQuery { q: Some(q) })) if !q.is_empty() => q,
        Ok(_) => return error(StatusCode::BAD_REQUEST, "query parameter q must be non-empty"),
        Err(e) => return error(StatusCode::BAD_REQUEST, e.body_text()),
    };
    let hits: Vec<SearchHit> = s
        .search(&q, SEARCH_LIMIT)
        .into_iter()
        .map(|i| SearchHit {
            label: s.label(i).to_owned(),
            degree: s.graph.degree(i),
        })
        .collect();
    Json(hits).into_response()
}

/// Binds, then loads the session in the background; requests arriving
/// before the load completes get 503.
pub async fn serve(s: Settings) -> CliResult<()> {
    let addr = s
        .bind
        .clone()
        .or_else(|| std::env::var(ADDR_ENV).ok())
        .unwrap_or_else(|| DEFAULT_ADDR.to_owned());
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|e| CliError::arg(format!("cannot bind {addr}: {e}")))?;
    log::info!("listening on http://{}", listener.local_addr()?);
    let state = AppState::empty();
    let loader = state.clone();
    tokio::task::spawn_blocking(move || {
        let t = Instant::now();
        match Session::from_settings(&s) {
            Ok(session) => {
                log::info!(
                    "session loaded in {:.2} s: {} nodes, d_max {:.3}",
                    t.elapsed().as_secs_f64(),
                    session.graph.node_count(),
                    session.d_max
                );
                loader.install(session);
            }
            Err(e) => {
                log::error!("{e}");
                std::process::exit(e.exit_code() as i32);
            }
        }
    });
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
