//! JSON HTTP API over a shared workspace.
//!
//! Parses take a read lock and run concurrently; database, stats and
//! config writes take the write lock. Scratch trees live in per-session
//! areas named by the `x-session` header (default `default`).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use ltag::derivation::OpKind;
use ltag::grammar::GornAddress;
use ltag::morph::{DbError, MorphField, Pattern};
use ltag::synt::SyntField;
use ltag::workbench::{
    export_derived, export_elementary, run_pipeline, ExportFormat, PipelineConfig, ScratchArea, ScratchError, Source,
    TaggerMode, Workspace,
};

use crate::report::{MorphRow, ParseReport, SyntRow};

pub const SESSION_HEADER: &str = "x-session";

pub struct AppState {
    pub workspace: RwLock<Workspace>,
    sessions: Mutex<HashMap<String, ScratchArea>>,
}

impl AppState {
    pub fn new(workspace: Workspace) -> Arc<Self> {
        Arc::new(AppState { workspace: RwLock::new(workspace), sessions: Mutex::new(HashMap::new()) })
    }
}

type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/parse", post(parse))
        .route("/db/{db}/entries", get(list_entries).post(insert_entry).put(update_entry).delete(delete_entry))
        .route("/db/{db}/search", get(search))
        .route("/grammar/trees", get(grammar_trees))
        .route("/workspace/scratch", get(scratch_list).post(scratch_create))
        .route("/workspace/scratch/{name}", get(scratch_get))
        .route("/workspace/combine", post(combine))
        .route("/workspace/undo", post(undo))
        .route("/export/{tree}", get(export))
        .route("/stats", get(stats))
        .route("/config", get(get_config).put(put_config))
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    feature_path: Option<Vec<String>>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into(), feature_path: None }
    }

    fn bad(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(p) = self.feature_path {
            body["feature_path"] = json!(p);
        }
        (self.status, Json(body)).into_response()
    }
}

impl From<DbError> for ApiError {
    fn from(e: DbError) -> Self {
        let status = match e {
            DbError::Duplicate(_) => StatusCode::CONFLICT,
            DbError::NotFound(_) => StatusCode::NOT_FOUND,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<ScratchError> for ApiError {
    fn from(e: ScratchError) -> Self {
        let status = match e {
            ScratchError::UnknownTree(_) | ScratchError::UnknownScratch(_) => StatusCode::NOT_FOUND,
            ScratchError::Duplicate(_) => StatusCode::CONFLICT,
            ScratchError::NothingToUndo => StatusCode::CONFLICT,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError { status, message: e.to_string(), feature_path: e.feature_path().map(<[String]>::to_vec) }
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn session(headers: &HeaderMap) -> String {
    headers.get(SESSION_HEADER).and_then(|v| v.to_str().ok()).filter(|s| !s.is_empty()).unwrap_or("default").to_string()
}

fn persist(ws: &Workspace) -> ApiResult<()> {
    if ws.root.is_some() {
        ws.save().map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    }
    Ok(())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParseRequest {
    pub sentence: String,
    pub start: Option<String>,
    pub tagger: Option<TaggerMode>,
    pub n_best: Option<usize>,
    pub top_k: Option<usize>,
    pub stats_filter: Option<bool>,
}

async fn parse(State(st): State<Shared>, Json(req): Json<ParseRequest>) -> ApiResult<Json<ParseReport>> {
    let ws = st.workspace.read().expect("lock");
    let mut cfg = ws.config.clone();
    if let Some(s) = req.start {
        cfg.start_category = s;
    }
    if let Some(m) = req.tagger {
        cfg.tagger_mode = m;
    }
    if let Some(n) = req.n_best {
        cfg.n_best = n;
    }
    if let Some(k) = req.top_k {
        cfg.top_k = k;
    }
    if let Some(f) = req.stats_filter {
        cfg.stats_filter = f;
    }
    let r = run_pipeline(&ws, &req.sentence, &cfg).map_err(|e| ApiError::bad(e.to_string()))?;
    Ok(Json(ParseReport::new(&r)))
}

enum Db {
    Morph,
    Synt,
}

fn which(db: &str) -> ApiResult<Db> {
    match db {
        "morph" => Ok(Db::Morph),
        "synt" => Ok(Db::Synt),
        _ => Err(ApiError::not_found(format!("no database `{db}`"))),
    }
}

#[derive(Debug, Deserialize)]
struct ListQuery {
    /// Morph: surface form; synt: root.
    word: Option<String>,
}

async fn list_entries(State(st): State<Shared>, Path(db): Path<String>, Query(q): Query<ListQuery>) -> ApiResult<Response> {
    let ws = st.workspace.read().expect("lock");
    Ok(match which(&db)? {
        Db::Morph => {
            let rows: Vec<MorphRow> = match &q.word {
                Some(w) => ws.morph.lookup(w).iter().map(MorphRow::from).collect(),
                None => ws.morph.entries().map(MorphRow::from).collect(),
            };
            Json(rows).into_response()
        }
        Db::Synt => {
            let rows: Vec<SyntRow> = match &q.word {
                Some(w) => ws.synt.entries().filter(|e| e.index_word == *w || e.words().first() == Some(&w.as_str())).map(SyntRow::from).collect(),
                None => ws.synt.entries().map(SyntRow::from).collect(),
            };
            Json(rows).into_response()
        }
    })
}

fn body<T: for<'de> Deserialize<'de>>(v: serde_json::Value) -> ApiResult<T> {
    serde_json::from_value(v).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))
}

async fn insert_entry(
    State(st): State<Shared>,
    Path(db): Path<String>,
    Json(v): Json<serde_json::Value>,
) -> ApiResult<(StatusCode, Json<serde_json::Value>)> {
    let mut ws = st.workspace.write().expect("lock");
    let echoed = match which(&db)? {
        Db::Morph => {
            let row: MorphRow = body(v)?;
            ws.morph.insert(row.entry())?;
            json!(row)
        }
        Db::Synt => {
            let row: SyntRow = body(v)?;
            let e = row.entry().map_err(|m| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, m))?;
            let ws = &mut *ws;
            ws.synt.insert(e.clone(), &ws.grammar)?;
            json!(SyntRow::from(&e))
        }
    };
    persist(&ws)?;
    Ok((StatusCode::CREATED, Json(echoed)))
}

#[derive(Debug, Deserialize)]
struct Update<T> {
    old: T,
    new: T,
}

async fn update_entry(
    State(st): State<Shared>,
    Path(db): Path<String>,
    Json(v): Json<serde_json::Value>,
) -> ApiResult<Json<serde_json::Value>> {
    let mut ws = st.workspace.write().expect("lock");
    let echoed = match which(&db)? {
        Db::Morph => {
            let u: Update<MorphRow> = body(v)?;
            ws.morph.update(&u.old.entry(), u.new.entry())?;
            json!(u.new)
        }
        Db::Synt => {
            let u: Update<SyntRow> = body(v)?;
            let bad = |m| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, m);
            let (old, new) = (u.old.entry().map_err(bad)?, u.new.entry().map_err(bad)?);
            let ws = &mut *ws;
            ws.synt.update(&old, new.clone(), &ws.grammar)?;
            json!(SyntRow::from(&new))
        }
    };
    persist(&ws)?;
    Ok(Json(echoed))
}

async fn delete_entry(State(st): State<Shared>, Path(db): Path<String>, Json(v): Json<serde_json::Value>) -> ApiResult<StatusCode> {
    let mut ws = st.workspace.write().expect("lock");
    match which(&db)? {
        Db::Morph => {
            let row: MorphRow = body(v)?;
            ws.morph.delete(&row.entry())?;
        }
        Db::Synt => {
            let row: SyntRow = body(v)?;
            ws.synt.delete(&row.entry().map_err(|m| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, m))?)?;
        }
    }
    persist(&ws)?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Deserialize)]
struct SearchQuery {
    field: String,
    pattern: String,
}

async fn search(State(st): State<Shared>, Path(db): Path<String>, Query(q): Query<SearchQuery>) -> ApiResult<Response> {
    let ws = st.workspace.read().expect("lock");
    let pattern = Pattern::parse(&q.pattern);
    Ok(match which(&db)? {
        Db::Morph => {
            let field: MorphField = q.field.parse().map_err(|e: DbError| ApiError::bad(e.to_string()))?;
            Json(ws.morph.search(field, &pattern).iter().map(MorphRow::from).collect::<Vec<_>>()).into_response()
        }
        Db::Synt => {
            let field: SyntField = q.field.parse().map_err(|e: DbError| ApiError::bad(e.to_string()))?;
            Json(ws.synt.search(field, &pattern, &ws.grammar).iter().map(SyntRow::from).collect::<Vec<_>>()).into_response()
        }
    })
}

#[derive(Debug, Serialize)]
struct TreeSummary {
    name: String,
    #[serde(rename = "type")]
    tree_type: &'static str,
    root: String,
    anchors: usize,
    families: Vec<String>,
}

async fn grammar_trees(State(st): State<Shared>) -> Json<Vec<TreeSummary>> {
    let ws = st.workspace.read().expect("lock");
    let g = &ws.grammar;
    Json(
        g.trees
            .values()
            .map(|t| TreeSummary {
                name: t.name.clone(),
                tree_type: if t.is_auxiliary() { "auxiliary" } else { "initial" },
                root: t.root.category.to_string(),
                anchors: t.anchors.len(),
                families: g.families_of(&t.name).into_iter().map(String::from).collect(),
            })
            .collect(),
    )
}

#[derive(Debug, Serialize)]
struct ScratchView {
    name: String,
    trees: Vec<String>,
    bracketed: String,
    derived: String,
    open_substitution_sites: Vec<String>,
    /// Whether top and bottom unify at every node, as a finished parse
    /// requires.
    complete: Completion,
    undo_depth: usize,
}

#[derive(Debug, Serialize)]
struct Completion {
    ok: bool,
    address: Option<String>,
    feature_path: Option<Vec<String>>,
    error: Option<String>,
}

fn scratch_view(area: &ScratchArea, name: &str) -> ApiResult<ScratchView> {
    let t = area.get(name).ok_or_else(|| ApiError::not_found(format!("no scratch tree `{name}`")))?;
    let resolved = t.resolved();
    Ok(ScratchView {
        name: name.to_string(),
        trees: t.trees.clone(),
        bracketed: resolved.bracketed(),
        derived: export_derived(&resolved, ExportFormat::Text),
        open_substitution_sites: t.root.open_substitution_sites().iter().map(|a| a.to_string()).collect(),
        complete: match t.finalized() {
            Ok(_) => Completion { ok: true, address: None, feature_path: None, error: None },
            Err(e) => Completion {
                ok: false,
                address: Some(e.address.to_string()),
                feature_path: Some(e.clash.path.clone()),
                error: Some(e.clash.to_string()),
            },
        },
        undo_depth: area.undo_depth(),
    })
}

async fn scratch_list(State(st): State<Shared>, headers: HeaderMap) -> Json<Vec<String>> {
    let sessions = st.sessions.lock().expect("lock");
    Json(sessions.get(&session(&headers)).map(|a| a.names().map(String::from).collect()).unwrap_or_default())
}

async fn scratch_get(State(st): State<Shared>, headers: HeaderMap, Path(name): Path<String>) -> ApiResult<Json<ScratchView>> {
    let sessions = st.sessions.lock().expect("lock");
    let area = sessions.get(&session(&headers)).ok_or_else(|| ApiError::not_found(format!("no scratch tree `{name}`")))?;
    Ok(Json(scratch_view(area, &name)?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    name: String,
    tree: String,
    #[serde(default)]
    lexemes: Vec<String>,
    #[serde(default)]
    equations: String,
}

async fn scratch_create(
    State(st): State<Shared>,
    headers: HeaderMap,
    Json(req): Json<CreateRequest>,
) -> ApiResult<(StatusCode, Json<ScratchView>)> {
    let ws = st.workspace.read().expect("lock");
    let mut sessions = st.sessions.lock().expect("lock");
    let area = sessions.entry(session(&headers)).or_default();
    area.create_with(&ws.grammar, &req.name, &req.tree, &req.lexemes, &req.equations)?;
    Ok((StatusCode::CREATED, Json(scratch_view(area, &req.name)?)))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Op {
    Substitution,
    Adjunction,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CombineRequest {
    target: String,
    address: String,
    source: Source,
    op: Op,
}

async fn combine(State(st): State<Shared>, headers: HeaderMap, Json(req): Json<CombineRequest>) -> ApiResult<Json<ScratchView>> {
    let address: GornAddress = req.address.parse().map_err(|e: ltag::grammar::AddressError| ApiError::bad(e.to_string()))?;
    let op = match req.op {
        Op::Substitution => OpKind::Substitution,
        Op::Adjunction => OpKind::Adjunction,
    };
    let ws = st.workspace.read().expect("lock");
    let mut sessions = st.sessions.lock().expect("lock");
    let area = sessions.entry(session(&headers)).or_default();
    area.combine(&ws.grammar, &req.target, &address, &req.source, op)?;
    Ok(Json(scratch_view(area, &req.target)?))
}

async fn undo(State(st): State<Shared>, headers: HeaderMap) -> ApiResult<Json<serde_json::Value>> {
    let mut sessions = st.sessions.lock().expect("lock");
    let area = sessions.entry(session(&headers)).or_default();
    let touched = area.undo()?;
    Ok(Json(json!({ "restored": touched, "undo_depth": area.undo_depth() })))
}

#[derive(Debug, Deserialize)]
struct ExportQuery {
    format: Option<String>,
}

/// A scratch tree of the caller's session if one has this name, otherwise
/// a grammar tree.
async fn export(
    State(st): State<Shared>,
    headers: HeaderMap,
    Path(tree): Path<String>,
    Query(q): Query<ExportQuery>,
) -> ApiResult<Response> {
    let format: ExportFormat = q.format.as_deref().unwrap_or("text").parse().map_err(ApiError::bad)?;
    let doc = {
        let sessions = st.sessions.lock().expect("lock");
        sessions.get(&session(&headers)).and_then(|a| a.get(&tree)).map(|t| export_derived(&t.resolved(), format))
    };
    let doc = match doc {
        Some(d) => d,
        None => {
            let ws = st.workspace.read().expect("lock");
            let t = ws.grammar.tree(&tree).ok_or_else(|| ApiError::not_found(format!("no tree `{tree}`")))?;
            export_elementary(t, format)
        }
    };
    Ok(([(header::CONTENT_TYPE, format.media_type())], doc).into_response())
}

#[derive(Debug, Serialize)]
struct StatsRow {
    pos: String,
    tree: String,
    count: u64,
}

async fn stats(State(st): State<Shared>) -> Json<Vec<StatsRow>> {
    let ws = st.workspace.read().expect("lock");
    Json(ws.stats.iter().map(|(p, t, c)| StatsRow { pos: p.to_string(), tree: t.to_string(), count: c }).collect())
}

async fn get_config(State(st): State<Shared>) -> Json<PipelineConfig> {
    Json(st.workspace.read().expect("lock").config.clone())
}

async fn put_config(State(st): State<Shared>, Json(v): Json<serde_json::Value>) -> ApiResult<Json<PipelineConfig>> {
    let cfg: PipelineConfig = body(v)?;
    cfg.validate().map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    let mut ws = st.workspace.write().expect("lock");
    ws.config = cfg.clone();
    persist(&ws)?;
    Ok(Json(cfg))
}
