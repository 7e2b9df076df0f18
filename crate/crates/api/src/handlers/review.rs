//! Paper intake, voting, tagging and keyword matching.

use axum::extract::{Path, State};
use axum::http::HeaderMap;
use axum::response::{IntoResponse, Response};
use axum::{Extension, Json};
use serde::Deserialize;
use serde_json::json;
use taas_core::matcher::{suggest_for_taxonomy, MatchConfig, MatchMethod, MappingSuggestion};
use taas_core::review::{parse_bibtex, PaperRecord, VoteValue};
use taas_core::{DimensionId, PaperId};

use super::{mutate, readable, with_version, Caller};
use crate::error::{ApiError, ApiResult};
use crate::extract::{Body, Params};
use crate::AppState;

#[derive(Deserialize)]
pub struct ListQuery {
    min_votes: Option<usize>,
}

pub async fn list(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    Path(tid): Path<String>,
    Params(query): Params<ListQuery>,
) -> ApiResult<Response> {
    let tax = readable(&state, &caller, &tid)?;
    let papers: Vec<_> = match query.min_votes {
        Some(min) => tax.papers_by_min_votes(min).into_iter().cloned().collect(),
        None => tax.papers().cloned().collect(),
    };
    Ok(with_version(Json(papers).into_response(), tax.version()))
}

pub async fn import(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    Body(records): Body<Vec<PaperRecord>>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| Ok(t.import_papers(records)))
}

pub async fn import_bibtex(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    body: String,
) -> ApiResult<Response> {
    let records = parse_bibtex(&body)?;
    mutate(&state, &headers, &tid, |t| Ok(t.import_papers(records)))
}

pub async fn remove(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, pid)): Path<(String, String)>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| t.remove_paper(&PaperId::from(pid)))
}

#[derive(Deserialize)]
pub struct VoteBody {
    value: VoteValue,
    #[serde(default)]
    note: String,
}

pub async fn vote(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    headers: HeaderMap,
    Path((tid, pid)): Path<(String, String)>,
    Body(body): Body<VoteBody>,
) -> ApiResult<Response> {
    let reviewer = caller.user()?.id.clone();
    mutate(&state, &headers, &tid, |t| {
        let paper = PaperId::from(pid);
        let vote = t.cast_vote(&reviewer, &paper, body.value, &body.note)?;
        let positive = t.paper(&paper).map_or(0, |p| p.positive_votes());
        Ok(json!({ "vote": vote, "positive_votes": positive }))
    })
}

#[derive(Deserialize)]
pub struct TagBody {
    keyword: String,
    #[serde(default)]
    note: String,
}

pub async fn tag(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, pid)): Path<(String, String)>,
    Body(body): Body<TagBody>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| {
        let added = t.tag_paper(&PaperId::from(pid), &body.keyword, &body.note)?;
        Ok(json!({ "added": added }))
    })
}

pub async fn untag(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path((tid, pid, keyword)): Path<(String, String, String)>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| {
        let removed = t.untag_paper(&PaperId::from(pid), &keyword)?;
        Ok(json!({ "removed": removed }))
    })
}

#[derive(Deserialize)]
pub struct TagImportBody {
    dimension_id: String,
    #[serde(default = "one")]
    min_count: usize,
}

fn one() -> usize {
    1
}

pub async fn tag_import(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    Body(body): Body<TagImportBody>,
) -> ApiResult<Response> {
    mutate(&state, &headers, &tid, |t| {
        t.import_tags_as_concepts(&DimensionId::from(body.dimension_id), body.min_count)
    })
}

#[derive(Deserialize)]
pub struct MatchBody {
    method: MatchMethod,
    threshold: Option<f64>,
    moc: Option<u32>,
    #[serde(default = "yes")]
    use_synonyms: bool,
    paper_ids: Option<Vec<PaperId>>,
    /// `apply` only: restrict to these `(paper, concept)` suggestions.
    selected: Option<Vec<Selection>>,
}

#[derive(Deserialize, PartialEq)]
pub struct Selection {
    paper_id: String,
    concept_id: String,
}

fn yes() -> bool {
    true
}

impl MatchBody {
    fn config(&self) -> MatchConfig {
        let mut config = MatchConfig::new(self.method).with_synonyms(self.use_synonyms);
        if let Some(threshold) = self.threshold {
            config = config.with_threshold(threshold);
        }
        if let Some(moc) = self.moc {
            config = config.with_moc(moc);
        }
        config
    }
}

pub async fn suggest(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    Path(tid): Path<String>,
    Body(body): Body<MatchBody>,
) -> ApiResult<Response> {
    let tax = readable(&state, &caller, &tid)?;
    let config = body.config();
    let suggestions = tokio::task::spawn_blocking({
        let tax = tax.clone();
        move || suggest_for_taxonomy(&tax, &config, body.paper_ids.as_deref())
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    let entries: Vec<_> = suggestions
        .iter()
        .map(|s| {
            json!({
                "suggestion": s,
                "new": tax.mapping(&s.paper_id, &s.concept_id).is_none(),
            })
        })
        .collect();
    let body = json!({ "version": tax.version(), "config": config, "suggestions": entries });
    Ok(with_version(Json(body).into_response(), tax.version()))
}

pub async fn apply(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    Body(body): Body<MatchBody>,
) -> ApiResult<Response> {
    let config = body.config();
    mutate(&state, &headers, &tid, |t| {
        let mut suggestions: Vec<MappingSuggestion> = suggest_for_taxonomy(t, &config, body.paper_ids.as_deref())?;
        if let Some(selected) = &body.selected {
            suggestions.retain(|s| {
                selected
                    .iter()
                    .any(|sel| sel.paper_id == s.paper_id.as_str() && sel.concept_id == s.concept_id.as_str())
            });
        }
        let changed = t.apply_suggestions(&suggestions)?;
        Ok(json!({ "applied": suggestions.len(), "changed": changed }))
    })
}
