//! Taxonomy, dimension, concept, relation, synonym, mapping and layout
//! editing.

use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::{Extension, Json};
use serde::Deserialize;
use serde_json::{json, Value};
use taas_core::taxonomy::TaxonomyHeader;
use taas_core::{
    ConceptId, ConceptKind, DimensionId, LayoutSnapshot, PaperId, Provenance, RelationId, RelationType,
    TaxonomyId,
};

use super::{expected_version, mutate, readable, with_version, Caller};
use crate::error::{ApiError, ApiResult};
use crate::extract::Body;
use crate::AppState;

pub async fn list(State(state): State<AppState>, Extension(caller): Extension<Caller>) -> Json<Vec<TaxonomyHeader>> {
    let anonymous = caller.0.is_none();
    Json(
        state
            .workspace
            .list()
            .iter()
            .filter(|t| !anonymous || t.is_public())
            .map(|t| t.header())
            .collect(),
    )
}

#[derive(Deserialize)]
pub struct CreateTaxonomy {
    name: String,
    #[serde(default)]
    public: bool,
}

pub async fn create(State(state): State<AppState>, Body(body): Body<CreateTaxonomy>) -> ApiResult<Response> {
    let mut tax = state.workspace.create(&body.name)?;
    if body.public {
        tax = state.workspace.mutate(tax.id(), None, |t| {
            t.set_public(true);
            Ok(())
        })?.1;
    }
    let response = (StatusCode::CREATED, Json(tax.to_document())).into_response();
    Ok(with_version(response, tax.version()))
}

pub async fn import(State(state): State<AppState>, body: String) -> ApiResult<Response> {
    let tax = state.workspace.import(&body)?;
    let response = (StatusCode::CREATED, Json(tax.header())).into_response();
    Ok(with_version(response, tax.version()))
}

pub async fn show(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    Path(tid): Path<String>,
) -> ApiResult<Response> {
    let tax = readable(&state, &caller, &tid)?;
    Ok(with_version(Json(tax.to_document()).into_response(), tax.version()))
}

#[derive(Deserialize)]
pub struct UpdateTaxonomy {
    name: Option<String>,
    public: Option<bool>,
}

pub async fn update(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    Body(body): Body<UpdateTaxonomy>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| {
        if let Some(name) = &body.name {
            t.rename(name)?;
        }
        if let Some(public) = body.public {
            t.set_public(public);
        }
        Ok(t.header())
    })
}

pub async fn remove(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(tid): Path<String>,
) -> ApiResult<StatusCode> {
    let id = TaxonomyId::from(tid);
    if let Some(expected) = expected_version(&headers)? {
        let actual = state.workspace.get(&id)?.version();
        if actual != expected {
            return Err(taas_core::Error::VersionConflict { expected, actual }.into());
        }
    }
    state.workspace.delete(&id)?;
    state.views.invalidate(&id);
    Ok(StatusCode::NO_CONTENT)
}

pub async fn export(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    Path(tid): Path<String>,
) -> ApiResult<Response> {
    let tax = readable(&state, &caller, &tid)?;
    let response = ([(header::CONTENT_TYPE, "application/json")], tax.to_json()).into_response();
    Ok(with_version(response, tax.version()))
}

pub async fn fork(State(state): State<AppState>, Path(tid): Path<String>) -> ApiResult<Response> {
    let tax = state.workspace.fork(&TaxonomyId::from(tid))?;
    let response = (StatusCode::CREATED, Json(tax.header())).into_response();
    Ok(with_version(response, tax.version()))
}

#[derive(Deserialize)]
pub struct MergeFork {
    fork_id: String,
}

pub async fn merge(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    Body(body): Body<MergeFork>,
) -> ApiResult<Response> {
    let (report, tax) = state.workspace.merge(
        &TaxonomyId::from(tid),
        &TaxonomyId::from(body.fork_id),
        expected_version(&headers)?,
    )?;
    let body = json!({ "version": tax.version(), "data": report });
    Ok(with_version(Json(body).into_response(), tax.version()))
}

#[derive(Deserialize)]
pub struct NewDimension {
    name: String,
    #[serde(default)]
    description: String,
}

pub async fn add_dimension(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    Body(body): Body<NewDimension>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| {
        let id = t.add_dimension(&body.name, &body.description)?;
        Ok(t.dimension(&id).cloned())
    })
}

#[derive(Deserialize)]
pub struct DimensionChange {
    name: Option<String>,
    description: Option<String>,
}

pub async fn update_dimension(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, did)): Path<(String, String)>,
    Body(body): Body<DimensionChange>,
) -> ApiResult<Response> {
    let id = DimensionId::from(did);
    mutate(&state, &headers, &tid, |t| {
        if let Some(name) = &body.name {
            t.rename_dimension(&id, name)?;
        }
        if let Some(description) = &body.description {
            t.set_dimension_description(&id, description)?;
        }
        Ok(t.dimension(&id).cloned())
    })
}

pub async fn remove_dimension(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, did)): Path<(String, String)>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| t.remove_dimension(&DimensionId::from(did)))
}

#[derive(Deserialize)]
pub struct NewConcept {
    dimension_id: String,
    name: String,
    #[serde(default)]
    kind: ConceptKind,
}

pub async fn add_concept(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    Body(body): Body<NewConcept>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| {
        let id = t.add_concept(&DimensionId::from(body.dimension_id.as_str()), &body.name, body.kind)?;
        Ok(t.concept(&id).cloned())
    })
}

#[derive(Deserialize)]
pub struct ConceptChange {
    name: Option<String>,
    kind: Option<ConceptKind>,
    notes: Option<String>,
}

pub async fn update_concept(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, cid)): Path<(String, String)>,
    Body(body): Body<ConceptChange>,
) -> ApiResult<Response> {
    let id = ConceptId::from(cid);
    mutate(&state, &headers, &tid, |t| {
        if let Some(name) = &body.name {
            t.rename_concept(&id, name)?;
        }
        if let Some(kind) = body.kind {
            t.set_concept_kind(&id, kind)?;
        }
        if let Some(notes) = &body.notes {
            t.set_concept_notes(&id, notes)?;
        }
        Ok(t.concept(&id).cloned())
    })
}

pub async fn remove_concept(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, cid)): Path<(String, String)>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| t.remove_concept(&ConceptId::from(cid)))
}

#[derive(Deserialize)]
pub struct MergeConcepts {
    absorbed_id: String,
}

pub async fn merge_concepts(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, cid)): Path<(String, String)>,
    Body(body): Body<MergeConcepts>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| {
        t.merge_concepts(&ConceptId::from(cid), &ConceptId::from(body.absorbed_id))
    })
}

#[derive(Deserialize)]
pub struct NewSynonym {
    term: String,
}

pub async fn add_synonym(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, cid)): Path<(String, String)>,
    Body(body): Body<NewSynonym>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| {
        let added = t.add_synonym(&ConceptId::from(cid), &body.term)?;
        Ok(json!({ "added": added }))
    })
}

pub async fn remove_synonym(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, cid, term)): Path<(String, String, String)>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| {
        let removed = t.remove_synonym(&ConceptId::from(cid), &term)?;
        Ok(json!({ "removed": removed }))
    })
}

#[derive(Deserialize)]
pub struct NewRelation {
    source_id: String,
    target_id: String,
    #[serde(default)]
    rel_type: RelationType,
    #[serde(default)]
    annotation: String,
}

pub async fn add_relation(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    Body(body): Body<NewRelation>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| {
        let id = t.add_relation(
            &ConceptId::from(body.source_id.as_str()),
            &ConceptId::from(body.target_id.as_str()),
            body.rel_type,
            &body.annotation,
        )?;
        Ok(t.relation(&id).cloned())
    })
}

#[derive(Deserialize)]
pub struct RelationChange {
    rel_type: Option<RelationType>,
    annotation: Option<String>,
}

pub async fn update_relation(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, rid)): Path<(String, String)>,
    Body(body): Body<RelationChange>,
) -> ApiResult<Response> {
    let id = RelationId::from(rid);
    mutate(&state, &headers, &tid, |t| {
        if let Some(rel_type) = body.rel_type {
            t.set_relation_type(&id, rel_type)?;
        }
        if let Some(annotation) = &body.annotation {
            t.annotate_relation(&id, annotation)?;
        }
        Ok(t.relation(&id).cloned())
    })
}

pub async fn remove_relation(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, rid)): Path<(String, String)>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| t.remove_relation(&RelationId::from(rid)))
}

pub async fn mappings(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    Path(tid): Path<String>,
) -> ApiResult<Response> {
    let tax = readable(&state, &caller, &tid)?;
    let list: Vec<_> = tax.mappings().cloned().collect();
    Ok(with_version(Json(list).into_response(), tax.version()))
}

#[derive(Deserialize)]
pub struct NewMapping {
    paper_id: String,
    concept_id: String,
}

pub async fn map_paper(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    Body(body): Body<NewMapping>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| {
        let outcome = t.map_paper(
            &PaperId::from(body.paper_id.as_str()),
            &ConceptId::from(body.concept_id.as_str()),
            Provenance::Manual,
            0,
        )?;
        Ok(json!({ "mapping": outcome.mapping, "changed": outcome.changed }))
    })
}

pub async fn unmap_paper(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, pid, cid)): Path<(String, String, String)>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| {
        let paper = PaperId::from(pid);
        let concept = ConceptId::from(cid);
        if t.mapping(&paper, &concept).is_none() {
            return Err(taas_core::Error::NotFound {
                kind: "mapping",
                id: format!("{paper}/{concept}"),
            });
        }
        Ok(t.unmap_paper(&paper, &concept))
    })
}

pub async fn layout(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    Path(tid): Path<String>,
) -> ApiResult<Response> {
    let tax = readable(&state, &caller, &tid)?;
    let positions: Value = json!({ "positions": tax.positions() });
    Ok(with_version(Json(positions).into_response(), tax.version()))
}

#[derive(Deserialize)]
pub struct LayoutBody {
    positions: LayoutSnapshot,
}

pub async fn save_layout(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    Body(body): Body<LayoutBody>,
) -> ApiResult<Response> {
    if body.positions.values().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(ApiError::bad_request("validation", "positions must be finite numbers"));
    }
    mutate(&state, &headers, &tid, |t| t.save_layout(body.positions))
}
