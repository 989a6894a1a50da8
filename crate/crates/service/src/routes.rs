use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use dragrepo_core::engine::{DragPhase, Point, PointerEvent, PointerKind, Step};
use dragrepo_core::repository::{ImportPolicy, RepoError};
use dragrepo_core::transfer::{decode_stream, encode_envelope, TransferItem, COMPONENT_MEDIA_TYPE};
use dragrepo_core::{Action, ActionSet, FeedbackSignal, NodeId};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::ApiError;
use crate::state::{locked, AppState, SessionEntry};
use crate::view::{component_json, tree_json};

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/tree", get(get_tree))
        .route("/folders", post(create_folder))
        .route("/components", post(upload_component))
        .route(
            "/components/{id}",
            patch(patch_component)
                .delete(delete_component)
                .get(get_component),
        )
        .route("/components/{id}/payload", get(download_payload))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/events", post(post_event))
        .route("/sessions/{id}/drop", post(post_drop))
        .with_state(state)
}

type ApiResult<T> = Result<T, ApiError>;

/// JSON body extractor whose rejections use the service's error shape.
struct Body<T>(T);

impl<S, T> axum::extract::FromRequest<S> for Body<T>
where
    T: serde::de::DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request(req: axum::extract::Request, state: &S) -> Result<Self, ApiError> {
        let bytes = Bytes::from_request(req, state)
            .await
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        serde_json::from_slice(&bytes)
            .map(Body)
            .map_err(|e| ApiError::bad_request(e.to_string()))
    }
}

fn parse_id(raw: &str) -> ApiResult<NodeId> {
    raw.parse()
        .map_err(|_| ApiError::bad_request(format!("bad id {raw:?}")))
}

async fn get_tree(State(state): State<AppState>) -> Json<Value> {
    Json(state.read(tree_json))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct NewFolder {
    #[serde(default)]
    parent_id: NodeId,
    name: String,
}

async fn create_folder(
    State(state): State<AppState>,
    Body(req): Body<NewFolder>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let id = state.write(|t| Ok(t.add_folder(req.parent_id, &req.name)?))?;
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))))
}

#[derive(Deserialize)]
struct FolderQuery {
    folder: Option<NodeId>,
}

/// Adds the components carried by an envelope body. A single component
/// envelope must land under its own name; anything else is imported with
/// the default policy and the report is returned.
async fn upload_component(
    State(state): State<AppState>,
    Query(q): Query<FolderQuery>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let folder = q.folder.unwrap_or(NodeId::ROOT);
    let mut items = decode_stream(&body)?;
    if items.is_empty() {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "MalformedEnvelope",
            "empty body",
        ));
    }
    if let [TransferItem::Component(_)] = items.as_slice() {
        let Some(TransferItem::Component(record)) = items.pop() else {
            unreachable!()
        };
        if !record.is_valid() {
            return Err(
                RepoError::MalformedInput(format!("invalid record {:?}", record.name)).into(),
            );
        }
        let id = state.write(|t| Ok(t.add_component(folder, record)?))?;
        return Ok((StatusCode::CREATED, Json(json!({ "id": id }))));
    }
    let report = state.write(|t| {
        Ok(t.import_drop(folder, items, Action::Copy, &mut ImportPolicy::default())?)
    })?;
    Ok((
        StatusCode::CREATED,
        Json(json!({ "ids": report.created, "importReport": report })),
    ))
}

async fn get_component(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<Value>> {
    let id = parse_id(&id)?;
    state.read(|t| {
        t.component(id)
            .map(|c| Json(component_json(c)))
            .ok_or_else(|| RepoError::UnknownComponent(id).into())
    })
}

async fn download_payload(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    let bytes = state.read(|t| {
        t.component(id)
            .map(|c| encode_envelope(c).to_bytes())
            .ok_or(RepoError::UnknownComponent(id))
    })?;
    Ok(([(header::CONTENT_TYPE, COMPONENT_MEDIA_TYPE)], bytes).into_response())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ComponentPatch {
    name: Option<String>,
    dnd_enabled: Option<bool>,
}

async fn patch_component(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Body(req): Body<ComponentPatch>,
) -> ApiResult<Json<Value>> {
    let id = parse_id(&id)?;
    let view = state.write(|t| {
        if t.component(id).is_none() {
            return Err(RepoError::UnknownComponent(id).into());
        }
        if let Some(name) = &req.name {
            t.rename_component(id, name)?;
        }
        if let Some(on) = req.dnd_enabled {
            t.set_dnd_enabled(id, on)?;
        }
        Ok(component_json(t.component(id).unwrap()))
    })?;
    Ok(Json(view))
}

async fn delete_component(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<StatusCode> {
    let id = parse_id(&id)?;
    state.write(|t| Ok(t.remove_component(id)?))?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct NewSession {
    source_component_ids: Vec<NodeId>,
    #[serde(default)]
    origin: Option<Point>,
    #[serde(default)]
    source_actions: Option<ActionSet>,
}

fn session_json(id: &str, entry: &SessionEntry) -> Value {
    let s = &entry.session;
    json!({
        "sessionId": id,
        "phase": s.phase().name(),
        "target": s.current_target(),
        "outcome": s.outcome().map(|o| o.to_string()),
        "sourceActions": s.source_actions(),
        "negotiatedAction": s.negotiated_action(),
        "createdAtMs": entry.created_at_ms,
        "expiresAtMs": entry.expires_at_ms(),
    })
}

async fn create_session(
    State(state): State<AppState>,
    Body(req): Body<NewSession>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let selection = req.source_component_ids;
    state.read(|t| t.check_draggable(&selection))?;
    let actions = req.source_actions.unwrap_or(ActionSet::COPY_OR_MOVE);
    let _ = req.origin;
    let (id, entry) = state.open_session(selection, actions);
    let entry = locked(&entry);
    Ok((StatusCode::CREATED, Json(session_json(&id, &entry))))
}

async fn get_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<Value>> {
    let entry = state.session(&id)?;
    let entry = locked(&entry);
    Ok(Json(session_json(&id, &entry)))
}

/// Pointer event body. Accepts both the long field names and the short
/// ones used in trace files.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EventBody {
    #[serde(alias = "ev", alias = "type")]
    kind: PointerKind,
    #[serde(default)]
    x: i32,
    #[serde(default)]
    y: i32,
    #[serde(alias = "t", alias = "timestampMs")]
    timestamp: u64,
    #[serde(default, alias = "over", alias = "hoverNode")]
    hover: Option<Value>,
}

fn hover_name(v: Option<Value>) -> ApiResult<Option<String>> {
    match v {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(Value::Number(n)) => Ok(Some(n.to_string())),
        Some(other) => Err(ApiError::bad_request(format!("bad hover node {other}"))),
    }
}

fn step_json(step: &Step, entry: &SessionEntry) -> Value {
    json!({
        "phase": step.phase.name(),
        "target": entry.session.current_target(),
        "outcome": entry.session.outcome().map(|o| o.to_string()),
        "feedback": step.feedback,
    })
}

async fn post_event(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Body(req): Body<EventBody>,
) -> ApiResult<Json<Value>> {
    let entry = state.session(&id)?;
    let mut entry = locked(&entry);
    let ev = PointerEvent {
        kind: req.kind,
        position: Point::new(req.x, req.y),
        timestamp_ms: req.timestamp,
        hover_node: hover_name(req.hover)?,
    };
    let step = entry.session.handle_pointer_event(&ev)?;
    entry.last_event_ms = ev.timestamp_ms;
    Ok(Json(step_json(&step, &entry)))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct DropBody {
    target_folder_id: NodeId,
    #[serde(default)]
    requested_action: Option<Action>,
}

/// Releases the drag over `targetFolderId` and runs the drop. The pointer is
/// first moved onto the folder if it is not already over it.
async fn post_drop(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Body(req): Body<DropBody>,
) -> ApiResult<Json<Value>> {
    let entry = state.session(&id)?;
    let mut guard = locked(&entry);
    let entry = &mut *guard;
    let target = req.target_folder_id.to_string();
    if state.read(|t| !t.is_folder(req.target_folder_id)) {
        return Err(RepoError::UnknownFolder(req.target_folder_id).into());
    }
    entry.session.targets_mut().request(req.requested_action);
    let mut feedback: Vec<FeedbackSignal> = Vec::new();
    let t = entry.last_event_ms;
    let at = Point::default();
    match entry.session.phase().clone() {
        DragPhase::Dragging => {
            let step = entry.session.handle_pointer_event(&PointerEvent::new(
                PointerKind::Move,
                at.x,
                at.y,
                t,
                Some(&target),
            ))?;
            feedback.extend(step.feedback);
        }
        DragPhase::OverTarget(current) if current != target => {
            let step = entry.session.handle_pointer_event(&PointerEvent::new(
                PointerKind::Move,
                at.x,
                at.y,
                t,
                Some(&target),
            ))?;
            feedback.extend(step.feedback);
        }
        DragPhase::Dropping if entry.session.current_target() != Some(target.as_str()) => {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "ProtocolViolation",
                format!(
                    "released over {}, not {target}",
                    entry.session.current_target().unwrap_or("nothing")
                ),
            ));
        }
        _ => {}
    }
    if matches!(entry.session.phase(), DragPhase::OverTarget(_)) {
        let step = entry.session.handle_pointer_event(&PointerEvent::new(
            PointerKind::Release,
            at.x,
            at.y,
            t,
            Some(&target),
        ))?;
        feedback.extend(step.feedback);
    }
    let drop = entry.session.perform_drop()?;
    feedback.extend(drop.feedback);
    let report = entry.session.targets().last_report().cloned();
    let removed = entry.session.source().removed().to_vec();
    drop_guard_then_persist(guard, &state)?;
    let mut body = json!({
        "result": drop.outcome.to_string(),
        "phase": "Done",
        "feedback": feedback,
        "removed": removed,
    });
    if let Some(report) = report {
        body["importReport"] = json!(report);
        body["created"] = json!(report.created);
    }
    Ok(Json(body))
}

fn drop_guard_then_persist(
    guard: std::sync::MutexGuard<'_, SessionEntry>,
    state: &AppState,
) -> ApiResult<()> {
    drop(guard);
    state.persist()
}
