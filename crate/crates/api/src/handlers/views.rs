//! Cached analysis views. All of them are readable anonymously for public
//! taxonomies.

use std::collections::BTreeSet;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::{HeaderMap, HeaderValue};
use axum::response::{IntoResponse, Response};
use axum::{Extension, Json};
use serde::Deserialize;
use serde_json::json;
use taas_core::analysis::{
    build_matrix, build_surface, coverage_report, cropcircles_layout, effective_papers, CorrelationMatrix,
    Filter, SurfaceProperty,
};
use taas_core::store::{CacheKey, CacheMode, Cached};
use taas_core::{ConceptId, DimensionId, Taxonomy};

use super::{csv, readable, wants_csv, with_version, Caller, CACHE_HEADER};
use crate::error::{ApiError, ApiResult};
use crate::extract::Params;
use crate::AppState;

/// Query parameters shared by the analysis views. Lists are comma
/// separated.
#[derive(Deserialize, Default)]
pub struct ViewQuery {
    dimensions: Option<String>,
    roots: Option<String>,
    year_min: Option<i32>,
    year_max: Option<i32>,
    min_votes: Option<usize>,
    tag: Option<String>,
    min_cell: Option<u64>,
    format: Option<String>,
    /// `allow` serves a stale cached view while a rebuild is running.
    stale: Option<String>,
    property: Option<String>,
    a: Option<String>,
    b: Option<String>,
}

fn split_list(list: &Option<String>) -> Option<Vec<String>> {
    list.as_ref().map(|s| {
        s.split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(str::to_owned)
            .collect()
    })
}

impl ViewQuery {
    fn filter(&self) -> Filter {
        Filter {
            dimensions: split_list(&self.dimensions)
                .map(|ids| ids.into_iter().map(DimensionId::from).collect::<BTreeSet<_>>()),
            subtree_roots: split_list(&self.roots)
                .map(|ids| ids.into_iter().map(ConceptId::from).collect::<BTreeSet<_>>()),
            year_min: self.year_min,
            year_max: self.year_max,
            min_votes: self.min_votes,
            tag: self.tag.clone(),
            min_cell: self.min_cell.unwrap_or(0),
        }
    }

    fn mode(&self) -> ApiResult<CacheMode> {
        match self.stale.as_deref() {
            None | Some("deny") => Ok(CacheMode::Strict),
            Some("allow") => Ok(CacheMode::AllowStale),
            Some(other) => Err(ApiError::bad_request(
                "validation",
                format!("stale must be allow or deny, not {other:?}"),
            )),
        }
    }
}

fn cache_label<V>(cached: &Cached<V>) -> &'static str {
    match (cached.stale, cached.hit) {
        (true, _) => "stale",
        (false, true) => "hit",
        (false, false) => "miss",
    }
}

fn view_response<V>(response: Response, cached: &Cached<V>) -> Response {
    let mut response = with_version(response, cached.version);
    response
        .headers_mut()
        .insert(CACHE_HEADER, HeaderValue::from_static(cache_label(cached)));
    response
}

fn cached_matrix(
    state: &AppState,
    tax: &Arc<Taxonomy>,
    filter: &Filter,
    mode: CacheMode,
) -> ApiResult<Cached<CorrelationMatrix>> {
    let key = CacheKey::new(tax.id(), "matrix", &filter.fingerprint());
    Ok(state
        .views
        .matrix
        .get_or_build(&key, tax.version(), mode, || Ok(build_matrix(tax, filter)))?)
}

pub async fn matrix(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    Params(query): Params<ViewQuery>,
) -> ApiResult<Response> {
    let tax = readable(&state, &caller, &tid)?;
    let as_csv = wants_csv(&headers, query.format.as_deref())?;
    let cached = cached_matrix(&state, &tax, &query.filter(), query.mode()?)?;
    let response = if as_csv {
        csv(cached.value.to_csv())
    } else {
        Json(&*cached.value).into_response()
    };
    Ok(view_response(response, &cached))
}

/// Papers counted in one matrix cell.
pub async fn matrix_cell(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    Path(tid): Path<String>,
    Params(query): Params<ViewQuery>,
) -> ApiResult<Response> {
    let tax = readable(&state, &caller, &tid)?;
    let (Some(a), Some(b)) = (&query.a, &query.b) else {
        return Err(ApiError::bad_request("validation", "query parameters a and b are required"));
    };
    let filter = query.filter();
    let left = effective_papers(&tax, &ConceptId::from(a.as_str()))?;
    let right = effective_papers(&tax, &ConceptId::from(b.as_str()))?;
    let papers: Vec<_> = left
        .intersection(&right)
        .filter_map(|id| tax.paper(id))
        .filter(|p| filter.admits_paper(p))
        .map(|p| json!({ "id": p.id, "title": p.title, "year": p.year }))
        .collect();
    Ok(with_version(Json(papers).into_response(), tax.version()))
}

pub async fn surface(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    Path(tid): Path<String>,
    Params(query): Params<ViewQuery>,
) -> ApiResult<Response> {
    let tax = readable(&state, &caller, &tid)?;
    let property: SurfaceProperty = query.property.as_deref().unwrap_or("paper_count").parse()?;
    let filter = query.filter();
    let key = CacheKey::new(tax.id(), &format!("surface:{property}"), &filter.fingerprint());
    let cached = state
        .views
        .surface
        .get_or_build(&key, tax.version(), query.mode()?, || {
            let base = cached_matrix(&state, &tax, &filter, CacheMode::Strict)
                .map_err(|e| taas_core::Error::Builder(e.message))?;
            build_surface(&tax, &filter, property, &base.value)
        })?;
    Ok(view_response(Json(&*cached.value).into_response(), &cached))
}

pub async fn cropcircles(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    Path(tid): Path<String>,
    Params(query): Params<ViewQuery>,
) -> ApiResult<Response> {
    let tax = readable(&state, &caller, &tid)?;
    let key = CacheKey::new(tax.id(), "cropcircles", "");
    let cached = state
        .views
        .circles
        .get_or_build(&key, tax.version(), query.mode()?, || Ok(cropcircles_layout(&tax)))?;
    Ok(view_response(Json(&*cached.value).into_response(), &cached))
}

pub async fn coverage(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    headers: HeaderMap,
    Path(tid): Path<String>,
    Params(query): Params<ViewQuery>,
) -> ApiResult<Response> {
    let tax = readable(&state, &caller, &tid)?;
    let as_csv = wants_csv(&headers, query.format.as_deref())?;
    let key = CacheKey::new(tax.id(), "coverage", "");
    let cached = state
        .views
        .coverage
        .get_or_build(&key, tax.version(), query.mode()?, || Ok(coverage_report(&tax)))?;
    let response = if as_csv {
        let mut out = String::from("concept_id,concept,paper_count,depth,gap\n");
        for e in &cached.value.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.concept_id,
                csv_field(&e.name),
                e.paper_count,
                e.depth,
                e.paper_count == 0
            ));
        }
        csv(out)
    } else {
        Json(&*cached.value).into_response()
    };
    Ok(view_response(response, &cached))
}

fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_owned()
    }
}

pub async fn hierarchy(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    Path(tid): Path<String>,
) -> ApiResult<Response> {
    let tax = readable(&state, &caller, &tid)?;
    Ok(with_version(Json(tax.hierarchy()).into_response(), tax.version()))
}
