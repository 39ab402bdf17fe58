//! HTTP authoring sessions over the constraint tree, with a server-sent event
//! stream of tree and hull changes after every committed mutation.

use std::collections::{BTreeMap, HashMap};
use std::convert::Infallible;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post, put};
use axum::{Json, Router};
use futures::Stream;
use hierasm_core::hull::{group_hulls, visible_hulls};
use hierasm_core::tree::OpOutput;
use hierasm_core::{ConstraintTree, GroupId, GroupNode, Hull, HullOptions, Op, Pose, SceneObject, SpecDocument, TreeError, Vec3};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::{broadcast, Mutex};

use crate::error::GatewayError;
use crate::formats::{parse_json, SceneFile};
use crate::pipeline::{Problem, Settings};

/// Change notification pushed after each committed mutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta {
    pub seq: u64,
    pub op: Op,
    /// Groups added or changed, with their new state.
    pub groups: BTreeMap<GroupId, GroupNode>,
    pub objects: BTreeMap<String, SceneObject>,
    pub removed_groups: Vec<GroupId>,
    pub hulls: BTreeMap<GroupId, Hull>,
    pub removed_hulls: Vec<GroupId>,
}

pub struct Session {
    data: Mutex<SessionData>,
    events: broadcast::Sender<Delta>,
}

struct SessionData {
    scene: SceneFile,
    tree: ConstraintTree,
    hulls: BTreeMap<GroupId, Hull>,
    log: Vec<Op>,
    exports: Vec<SpecDocument>,
}

#[derive(Default)]
pub struct AppState {
    sessions: std::sync::Mutex<HashMap<String, Arc<Session>>>,
    next: AtomicU64,
}

impl AppState {
    fn session(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        self.sessions
            .lock()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError(GatewayError::UnknownSession(id.to_string())))
    }
}

pub struct ApiError(pub GatewayError);

impl From<GatewayError> for ApiError {
    fn from(e: GatewayError) -> Self {
        ApiError(e)
    }
}

impl From<TreeError> for ApiError {
    fn from(e: TreeError) -> Self {
        ApiError(e.into())
    }
}

pub fn status_of(e: &GatewayError) -> StatusCode {
    match e {
        GatewayError::Schema(_) | GatewayError::Io(_) => StatusCode::BAD_REQUEST,
        GatewayError::UnknownSession(_) => StatusCode::NOT_FOUND,
        GatewayError::DuplicateId(_) => StatusCode::CONFLICT,
        GatewayError::Tree(t) => match t {
            TreeError::UnknownId(_) => StatusCode::NOT_FOUND,
            TreeError::DegenerateMesh(_) | TreeError::NegativePadding(_) | TreeError::InvalidSpec(_) => {
                StatusCode::BAD_REQUEST
            }
            _ => StatusCode::CONFLICT,
        },
        GatewayError::Hull(hierasm_core::HullError::UnknownId(_)) => StatusCode::NOT_FOUND,
        _ => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (status_of(&self.0), Json(self.0.to_json())).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

pub fn router() -> Router {
    Router::new()
        .route("/session", post(create_session))
        .route("/session/{s}/scene", get(get_scene))
        .route("/session/{s}/log", get(get_log))
        .route("/session/{s}/group", post(create_group))
        .route("/session/{s}/group/{g}", delete(delete_group))
        .route("/session/{s}/group/{g}/object", post(add_object))
        .route("/session/{s}/group/{g}/toggle", post(toggle))
        .route("/session/{s}/nest", post(nest))
        .route("/session/{s}/wrap", post(wrap))
        .route("/session/{s}/pose/{id}", put(set_pose))
        .route("/session/{s}/export/{g}", post(export))
        .route("/session/{s}/plan", post(plan))
        .route("/session/{s}/hulls", get(hulls))
        .route("/session/{s}/events", get(events))
        .with_state(Arc::new(AppState::default()))
}

fn body<T: for<'de> Deserialize<'de>>(bytes: &Bytes) -> Result<T, ApiError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ApiError(GatewayError::Schema(e.to_string())))?;
    Ok(parse_json(text)?)
}

fn hulls_of(tree: &ConstraintTree) -> Result<BTreeMap<GroupId, Hull>, ApiError> {
    Ok(group_hulls(tree, &HullOptions::default()).map_err(GatewayError::from)?)
}

fn diff<T: PartialEq + Clone>(before: &BTreeMap<String, T>, after: &BTreeMap<String, T>) -> (BTreeMap<String, T>, Vec<String>) {
    let changed = after
        .iter()
        .filter(|(k, v)| before.get(*k) != Some(v))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let removed = before.keys().filter(|k| !after.contains_key(*k)).cloned().collect();
    (changed, removed)
}

async fn create_session(State(st): State<Arc<AppState>>, bytes: Bytes) -> ApiResult {
    let scene: SceneFile = body(&bytes)?;
    let tree = scene.to_tree()?;
    let hulls = hulls_of(&tree)?;
    let id = format!("s{}", st.next.fetch_add(1, Ordering::SeqCst) + 1);
    let (events, _) = broadcast::channel(256);
    let session = Arc::new(Session {
        data: Mutex::new(SessionData {
            scene,
            tree,
            hulls,
            log: Vec::new(),
            exports: Vec::new(),
        }),
        events,
    });
    st.sessions.lock().expect("session map lock").insert(id.clone(), session);
    Ok(Json(json!({ "session": id })))
}

async fn get_scene(State(st): State<Arc<AppState>>, Path(s): Path<String>) -> ApiResult {
    let session = st.session(&s)?;
    let data = session.data.lock().await;
    Ok(Json(json!({ "tree": data.tree })))
}

async fn get_log(State(st): State<Arc<AppState>>, Path(s): Path<String>) -> ApiResult {
    let session = st.session(&s)?;
    let data = session.data.lock().await;
    Ok(Json(json!({ "ops": data.log })))
}

/// Applies `op` under the session lock, then logs it and pushes the delta.
async fn mutate(st: &AppState, s: &str, op: Op) -> Result<OpOutput, ApiError> {
    let session = st.session(s)?;
    let mut data = session.data.lock().await;
    let before_groups = data.tree.groups.clone();
    let before_objects = data.tree.objects.clone();
    let mut next = data.tree.clone();
    let out = next.apply(&op)?;
    let hulls = hulls_of(&next)?;
    let (groups, removed_groups) = diff(&before_groups, &next.groups);
    let (objects, _) = diff(&before_objects, &next.objects);
    let (changed_hulls, removed_hulls) = diff(&data.hulls, &hulls);
    data.tree = next;
    data.hulls = hulls;
    data.log.push(op.clone());
    if let OpOutput::Spec(doc) = &out {
        data.exports.push(doc.clone());
    }
    let delta = Delta {
        seq: data.log.len() as u64,
        op,
        groups,
        objects,
        removed_groups,
        hulls: changed_hulls,
        removed_hulls,
    };
    // No subscribers is fine.
    let _ = session.events.send(delta);
    Ok(out)
}

#[derive(Deserialize)]
struct Pair {
    a: String,
    b: String,
}

#[derive(Deserialize)]
struct ObjectBody {
    o: String,
}

#[derive(Deserialize)]
struct NestBody {
    first: String,
    second: String,
}

async fn create_group(State(st): State<Arc<AppState>>, Path(s): Path<String>, bytes: Bytes) -> ApiResult {
    let Pair { a, b } = body(&bytes)?;
    match mutate(&st, &s, Op::CreateGroup { a, b }).await? {
        OpOutput::Group(g) => Ok(Json(json!({ "group": g }))),
        _ => unreachable!("create_group yields a group id"),
    }
}

async fn add_object(State(st): State<Arc<AppState>>, Path((s, g)): Path<(String, String)>, bytes: Bytes) -> ApiResult {
    let ObjectBody { o } = body(&bytes)?;
    mutate(&st, &s, Op::AddObject { group: g, object: o }).await?;
    Ok(Json(json!({ "ok": true })))
}

async fn nest(State(st): State<Arc<AppState>>, Path(s): Path<String>, bytes: Bytes) -> ApiResult {
    let NestBody { first, second } = body(&bytes)?;
    mutate(&st, &s, Op::Nest { first, second }).await?;
    Ok(Json(json!({ "ok": true })))
}

async fn wrap(State(st): State<Arc<AppState>>, Path(s): Path<String>, bytes: Bytes) -> ApiResult {
    let Pair { a, b } = body(&bytes)?;
    match mutate(&st, &s, Op::Wrap { a, b }).await? {
        OpOutput::Group(g) => Ok(Json(json!({ "group": g }))),
        _ => unreachable!("wrap yields a group id"),
    }
}

async fn delete_group(State(st): State<Arc<AppState>>, Path((s, g)): Path<(String, String)>) -> ApiResult {
    mutate(&st, &s, Op::DeleteGroup { group: g }).await?;
    Ok(Json(json!({ "ok": true })))
}

async fn toggle(State(st): State<Arc<AppState>>, Path((s, g)): Path<(String, String)>) -> ApiResult {
    mutate(&st, &s, Op::ToggleMode { group: g.clone() }).await?;
    let session = st.session(&s)?;
    let mode = session.data.lock().await.tree.groups[&g].mode;
    Ok(Json(json!({ "mode": mode })))
}

async fn set_pose(State(st): State<Arc<AppState>>, Path((s, id)): Path<(String, String)>, bytes: Bytes) -> ApiResult {
    let pose: Pose = body(&bytes)?;
    mutate(&st, &s, Op::SetPose { target: id, pose }).await?;
    Ok(Json(json!({ "ok": true })))
}

async fn export(State(st): State<Arc<AppState>>, Path((s, g)): Path<(String, String)>) -> ApiResult {
    match mutate(&st, &s, Op::Export { group: g }).await? {
        OpOutput::Spec(doc) => Ok(Json(serde_json::to_value(doc).expect("spec serializes"))),
        _ => unreachable!("export yields a spec"),
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct PlanBody {
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    spec: Option<SpecDocument>,
}

async fn plan(State(st): State<Arc<AppState>>, Path(s): Path<String>, bytes: Bytes) -> ApiResult {
    let req: PlanBody = if bytes.is_empty() { PlanBody::default() } else { body(&bytes)? };
    let session = st.session(&s)?;
    let (scene, spec) = {
        let data = session.data.lock().await;
        let spec = req.spec.unwrap_or_else(|| SpecDocument::merge(data.exports.clone()));
        (data.scene.clone(), spec)
    };
    let settings = Settings {
        seed: req.seed,
        cell_size: None,
    };
    let plan = tokio::task::spawn_blocking(move || Problem::new(scene, &spec, None)?.plan(&settings))
        .await
        .map_err(|e| ApiError(GatewayError::Io(e.to_string())))??;
    Ok(Json(serde_json::to_value(plan).expect("plan serializes")))
}

#[derive(Deserialize)]
struct CursorQuery {
    cursor: Option<String>,
}

fn parse_cursor(s: &str) -> Result<Vec3, ApiError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| ApiError(GatewayError::Schema(format!("cursor: {e}"))))?;
    match parts.as_slice() {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(ApiError(GatewayError::Schema("cursor must be x,y,z".into()))),
    }
}

async fn hulls(State(st): State<Arc<AppState>>, Path(s): Path<String>, Query(q): Query<CursorQuery>) -> ApiResult {
    let session = st.session(&s)?;
    let data = session.data.lock().await;
    let visible = match q.cursor.as_deref() {
        Some(c) => visible_hulls(&data.tree, &parse_cursor(c)?, &HullOptions::default()).map_err(GatewayError::from)?,
        None => data.tree.roots.clone(),
    };
    let shown: BTreeMap<&GroupId, &Hull> = visible.iter().map(|g| (g, &data.hulls[g])).collect();
    Ok(Json(json!({ "visible": visible, "hulls": shown })))
}

async fn events(
    State(st): State<Arc<AppState>>,
    Path(s): Path<String>,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let session = st.session(&s)?;
    let rx = session.events.subscribe();
    let stream = futures::stream::unfold(rx, |mut rx| async move {
        loop {
            match rx.recv().await {
                Ok(delta) => {
                    let ev = Event::default()
                        .event("delta")
                        .json_data(&delta)
                        .unwrap_or_else(|_| Event::default().event("error"));
                    return Some((Ok(ev), rx));
                }
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => return None,
            }
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

/// Subscribes to a session's deltas directly (used by in-process clients).
pub async fn subscribe(router_state: &AppState, s: &str) -> Result<broadcast::Receiver<Delta>, GatewayError> {
    router_state.session(s).map(|x| x.events.subscribe()).map_err(|e| e.0)
}
