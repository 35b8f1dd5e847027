//! HTTP API behind the rating interface.
//!
//! Data directory layout: `compositions/*.json`, `ratings.jsonl` (append
//! only) and an optional `model.json` predictor.

use super::dataset::load_corpus;
use super::predictor::Predictor;
use crate::error::{Error, Result};
use crate::scene::{rasterize, Composition};
use crate::targets::{append_jsonl, read_jsonl, rerate_queue, RatingRecord};
use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine;
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    pub rerate_subset: usize,
    pub rerate_rounds: usize,
}

impl ServiceConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig { data_dir: data_dir.into(), rerate_subset: 300, rerate_rounds: 3 }
    }

    pub fn ratings_path(&self) -> PathBuf {
        self.data_dir.join("ratings.jsonl")
    }

    pub fn model_path(&self) -> PathBuf {
        self.data_dir.join("model.json")
    }

    pub fn compositions_dir(&self) -> PathBuf {
        self.data_dir.join("compositions")
    }
}

type Key = (String, String, u32);

struct Ratings {
    records: Vec<RatingRecord>,
    keys: HashSet<Key>,
}

pub struct AppState {
    cfg: ServiceConfig,
    comps: BTreeMap<String, Composition>,
    ratings: Mutex<Ratings>,
    predictor: RwLock<Option<Arc<Predictor>>>,
    png_cache: Mutex<HashMap<String, Arc<Vec<u8>>>>,
}

fn key(r: &RatingRecord) -> Key {
    (r.composition_id.clone(), r.rater_id.clone(), r.round)
}

impl AppState {
    pub fn open(cfg: ServiceConfig) -> Result<Self> {
        let comps = load_corpus(&cfg.compositions_dir())?.into_iter().map(|c| (c.id.clone(), c)).collect();
        let records = read_jsonl(&cfg.ratings_path())?;
        let keys = records.iter().map(key).collect();
        let state = AppState {
            comps,
            ratings: Mutex::new(Ratings { records, keys }),
            predictor: RwLock::new(None),
            png_cache: Mutex::new(HashMap::new()),
            cfg,
        };
        state.reload_model()?;
        Ok(state)
    }

    /// Swaps in `model.json` if present (or clears the model). Returns
    /// whether a model is loaded.
    pub fn reload_model(&self) -> Result<bool> {
        let path = self.cfg.model_path();
        let next = if path.exists() { Some(Arc::new(Predictor::load(&path)?)) } else { None };
        let loaded = next.is_some();
        *self.predictor.write().expect("predictor lock") = next;
        Ok(loaded)
    }

    pub fn set_predictor(&self, p: Option<Predictor>) {
        *self.predictor.write().expect("predictor lock") = p.map(Arc::new);
    }

    pub fn records(&self) -> Vec<RatingRecord> {
        self.ratings.lock().expect("ratings lock").records.clone()
    }

    fn png(&self, id: &str) -> Result<Arc<Vec<u8>>> {
        if let Some(p) = self.png_cache.lock().expect("png lock").get(id) {
            return Ok(p.clone());
        }
        let c = &self.comps[id];
        let img = rasterize(c).to_gray_image(c.canvas.gray_level);
        let mut buf = std::io::Cursor::new(Vec::new());
        img.write_to(&mut buf, image::ImageFormat::Png)?;
        let bytes = Arc::new(buf.into_inner());
        self.png_cache.lock().expect("png lock").insert(id.to_string(), bytes.clone());
        Ok(bytes)
    }
}

fn err(status: StatusCode, msg: impl std::fmt::Display) -> Response {
    (status, Json(json!({ "error": msg.to_string() }))).into_response()
}

fn internal(e: Error) -> Response {
    err(StatusCode::INTERNAL_SERVER_ERROR, e)
}

#[derive(Deserialize)]
struct RaterQuery {
    rater_id: Option<String>,
}

fn require_rater(q: &RaterQuery) -> std::result::Result<&str, Response> {
    match q.rater_id.as_deref() {
        Some(r) if !r.is_empty() => Ok(r),
        _ => Err(err(StatusCode::BAD_REQUEST, "rater_id query parameter is required")),
    }
}

fn composition_payload(state: &AppState, id: &str, round: u32) -> Response {
    match state.png(id) {
        Ok(png) => Json(json!({
            "id": id,
            "round": round,
            "png_base64": base64::engine::general_purpose::STANDARD.encode(png.as_slice()),
        }))
        .into_response(),
        Err(e) => internal(e),
    }
}

fn next_rerate(state: &AppState, records: &[RatingRecord], rater: &str) -> Option<(String, u32)> {
    let queue = rerate_queue(records, state.cfg.rerate_subset, state.cfg.rerate_rounds, Some(rater));
    let id = queue.into_iter().next()?;
    let round = records
        .iter()
        .filter(|r| r.rater_id == rater && r.composition_id == id)
        .map(|r| r.round + 1)
        .max()
        .unwrap_or(1);
    Some((id, round))
}

async fn session_next(State(state): State<Arc<AppState>>, Query(q): Query<RaterQuery>) -> Response {
    let rater = match require_rater(&q) {
        Ok(r) => r,
        Err(resp) => return resp,
    };
    let records = state.records();
    let rated: HashSet<&str> = records
        .iter()
        .filter(|r| r.round == 0 && r.rater_id == rater)
        .map(|r| r.composition_id.as_str())
        .collect();
    if let Some(id) = state.comps.keys().find(|id| !rated.contains(id.as_str())) {
        return composition_payload(&state, id, 0);
    }
    match next_rerate(&state, &records, rater) {
        Some((id, round)) => composition_payload(&state, &id, round),
        None => err(StatusCode::NOT_FOUND, "nothing left to rate"),
    }
}

async fn rerate_next(State(state): State<Arc<AppState>>, Query(q): Query<RaterQuery>) -> Response {
    let rater = match require_rater(&q) {
        Ok(r) => r,
        Err(resp) => return resp,
    };
    match next_rerate(&state, &state.records(), rater) {
        Some((id, round)) => composition_payload(&state, &id, round),
        None => err(StatusCode::NOT_FOUND, "re-rate queue is empty"),
    }
}

#[derive(Deserialize)]
struct RatingInput {
    composition_id: String,
    rating: i64,
    #[serde(default)]
    round: u32,
    rater_id: String,
    timestamp: Option<chrono::DateTime<chrono::Utc>>,
}

async fn post_rating(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let input: RatingInput = match serde_json::from_slice(&body) {
        Ok(v) => v,
        Err(e) => return err(StatusCode::BAD_REQUEST, format!("malformed rating: {e}")),
    };
    if !(1..=5).contains(&input.rating) {
        return err(StatusCode::BAD_REQUEST, format!("rating {} outside 1..=5", input.rating));
    }
    if input.rater_id.is_empty() {
        return err(StatusCode::BAD_REQUEST, "rater_id must be non-empty");
    }
    if !state.comps.contains_key(&input.composition_id) {
        return err(StatusCode::NOT_FOUND, format!("unknown composition {}", input.composition_id));
    }
    let record = RatingRecord {
        composition_id: input.composition_id,
        rating: input.rating as u8,
        round: input.round,
        timestamp: input.timestamp.unwrap_or_else(chrono::Utc::now),
        rater_id: input.rater_id,
    };
    // the lock serializes appends, so the log and memory agree
    let mut ratings = state.ratings.lock().expect("ratings lock");
    let k = key(&record);
    if ratings.keys.contains(&k) {
        return err(StatusCode::CONFLICT, "rating for this composition, rater and round already exists");
    }
    if let Err(e) = append_jsonl(&state.cfg.ratings_path(), &record) {
        return internal(e);
    }
    ratings.keys.insert(k);
    ratings.records.push(record.clone());
    (StatusCode::CREATED, Json(record)).into_response()
}

async fn stats(State(state): State<Arc<AppState>>, Query(q): Query<RaterQuery>) -> Response {
    let records = state.records();
    let filtered: Vec<&RatingRecord> =
        records.iter().filter(|r| q.rater_id.as_deref().is_none_or(|id| r.rater_id == id)).collect();
    let mut per_class: BTreeMap<String, usize> = (1..=5).map(|c| (c.to_string(), 0)).collect();
    let mut per_round: BTreeMap<String, usize> = BTreeMap::new();
    let mut rated = HashSet::new();
    for r in &filtered {
        if r.round == 0 {
            *per_class.entry(r.rating.to_string()).or_default() += 1;
            rated.insert(r.composition_id.as_str());
        }
        *per_round.entry(r.round.to_string()).or_default() += 1;
    }
    Json(json!({
        "total": filtered.len(),
        "compositions": state.comps.len(),
        "rated_compositions": rated.len(),
        "per_class": per_class,
        "per_round": per_round,
        "model_loaded": state.predictor.read().expect("predictor lock").is_some(),
    }))
    .into_response()
}

async fn predict(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Response {
    let Some(p) = state.predictor.read().expect("predictor lock").clone() else {
        return err(StatusCode::NOT_FOUND, "no model loaded");
    };
    let Some(c) = state.comps.get(&id) else {
        return err(StatusCode::NOT_FOUND, format!("unknown composition {id}"));
    };
    let c = c.clone();
    let result = tokio::task::spawn_blocking(move || p.predict(std::slice::from_ref(&c))).await;
    match result {
        Ok(Ok(mut v)) => {
            let (label, scores) = v.remove(0);
            let scores: BTreeMap<String, f64> = scores.into_iter().map(|(c, s)| (c.to_string(), s)).collect();
            Json(json!({ "id": id, "label": label, "scores": scores })).into_response()
        }
        Ok(Err(e)) => internal(e),
        Err(e) => err(StatusCode::INTERNAL_SERVER_ERROR, e),
    }
}

async fn reload(State(state): State<Arc<AppState>>) -> Response {
    match state.reload_model() {
        Ok(loaded) => Json(json!({ "model_loaded": loaded })).into_response(),
        Err(e) => internal(e),
    }
}

async fn png(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Response {
    if !state.comps.contains_key(&id) {
        return err(StatusCode::NOT_FOUND, format!("unknown composition {id}"));
    }
    match state.png(&id) {
        Ok(bytes) => ([(header::CONTENT_TYPE, "image/png")], bytes.as_ref().clone()).into_response(),
        Err(e) => internal(e),
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/session/next", get(session_next))
        .route("/api/rerate/next", get(rerate_next))
        .route("/api/ratings", post(post_rating))
        .route("/api/stats", get(stats))
        .route("/api/predict/{id}", get(predict))
        .route("/api/model/reload", post(reload))
        .route("/api/compositions/{id}/png", get(png))
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(host: &str, port: u16, cfg: ServiceConfig) -> Result<()> {
    let state = Arc::new(AppState::open(cfg)?);
    let addr = format!("{host}:{port}");
    let listener = tokio::net::TcpListener::bind(&addr).await.map_err(|e| Error::io(Path::new(&addr), e))?;
    axum::serve(listener, router(state)).await.map_err(|e| Error::io(Path::new(&addr), e))
}

/// JSON body of a response, for callers that already hold one.
pub fn json_value(bytes: &[u8]) -> Option<Value> {
    serde_json::from_slice(bytes).ok()
}
