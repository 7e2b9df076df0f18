//! The route table. Every route declares its access class, and the guard
//! middleware enforces that class before any extractor runs.

use axum::extract::{Request, State};
use axum::http::{header, Method};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, patch, post, put, MethodRouter};
use axum::{Extension, Router};

use crate::error::ApiError;
use crate::handlers::{account, editing, experiments, review, views, Caller};
use crate::AppState;

pub const API_PREFIX: &str = "/api/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Access {
    /// No token needed and any presented token is ignored.
    Open,
    /// Anonymous callers may read public taxonomies.
    PublicRead,
    /// Requires a valid token; does not change state.
    GuardedRead,
    /// Requires a valid token; changes state.
    Mutating,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteSpec {
    pub method: Method,
    /// Path below [`API_PREFIX`] with `{name}` parameters.
    pub path: &'static str,
    pub access: Access,
}

struct Entry {
    spec: RouteSpec,
    handler: MethodRouter<AppState>,
}

fn entry(method: Method, path: &'static str, access: Access, handler: MethodRouter<AppState>) -> Entry {
    Entry {
        spec: RouteSpec { method, path, access },
        handler,
    }
}

fn table() -> Vec<Entry> {
    use Access::*;
    use Method as M;
    vec![
        entry(M::GET, "/health", Open, get(account::health)),
        entry(M::POST, "/auth/register", Open, post(account::register)),
        entry(M::POST, "/auth/login", Open, post(account::login)),
        entry(M::POST, "/auth/logout", Mutating, post(account::logout)),
        entry(M::GET, "/auth/me", GuardedRead, get(account::me)),
        // Taxonomies.
        entry(M::GET, "/taxonomies", PublicRead, get(editing::list)),
        entry(M::POST, "/taxonomies", Mutating, post(editing::create)),
        entry(M::POST, "/taxonomies/import", Mutating, post(editing::import)),
        entry(M::GET, "/taxonomies/{tid}", PublicRead, get(editing::show)),
        entry(M::PATCH, "/taxonomies/{tid}", Mutating, patch(editing::update)),
        entry(M::DELETE, "/taxonomies/{tid}", Mutating, delete(editing::remove)),
        entry(M::GET, "/taxonomies/{tid}/export", PublicRead, get(editing::export)),
        entry(M::POST, "/taxonomies/{tid}/fork", Mutating, post(editing::fork)),
        entry(M::POST, "/taxonomies/{tid}/merge", Mutating, post(editing::merge)),
        entry(M::GET, "/taxonomies/{tid}/hierarchy", PublicRead, get(views::hierarchy)),
        // Dimensions, concepts, relations, synonyms, mappings, layout.
        entry(M::POST, "/taxonomies/{tid}/dimensions", Mutating, post(editing::add_dimension)),
        entry(M::PATCH, "/taxonomies/{tid}/dimensions/{did}", Mutating, patch(editing::update_dimension)),
        entry(M::DELETE, "/taxonomies/{tid}/dimensions/{did}", Mutating, delete(editing::remove_dimension)),
        entry(M::POST, "/taxonomies/{tid}/concepts", Mutating, post(editing::add_concept)),
        entry(M::PATCH, "/taxonomies/{tid}/concepts/{cid}", Mutating, patch(editing::update_concept)),
        entry(M::DELETE, "/taxonomies/{tid}/concepts/{cid}", Mutating, delete(editing::remove_concept)),
        entry(M::POST, "/taxonomies/{tid}/concepts/{cid}/merge", Mutating, post(editing::merge_concepts)),
        entry(M::POST, "/taxonomies/{tid}/concepts/{cid}/synonyms", Mutating, post(editing::add_synonym)),
        entry(
            M::DELETE,
            "/taxonomies/{tid}/concepts/{cid}/synonyms/{term}",
            Mutating,
            delete(editing::remove_synonym),
        ),
        entry(M::POST, "/taxonomies/{tid}/relations", Mutating, post(editing::add_relation)),
        entry(M::PATCH, "/taxonomies/{tid}/relations/{rid}", Mutating, patch(editing::update_relation)),
        entry(M::DELETE, "/taxonomies/{tid}/relations/{rid}", Mutating, delete(editing::remove_relation)),
        entry(M::GET, "/taxonomies/{tid}/mappings", PublicRead, get(editing::mappings)),
        entry(M::POST, "/taxonomies/{tid}/mappings", Mutating, post(editing::map_paper)),
        entry(
            M::DELETE,
            "/taxonomies/{tid}/mappings/{pid}/{cid}",
            Mutating,
            delete(editing::unmap_paper),
        ),
        entry(M::GET, "/taxonomies/{tid}/layout", PublicRead, get(editing::layout)),
        entry(M::PUT, "/taxonomies/{tid}/layout", Mutating, put(editing::save_layout)),
        // Literature review.
        entry(M::GET, "/taxonomies/{tid}/papers", GuardedRead, get(review::list)),
        entry(M::POST, "/taxonomies/{tid}/papers", Mutating, post(review::import)),
        entry(M::POST, "/taxonomies/{tid}/papers/bibtex", Mutating, post(review::import_bibtex)),
        entry(M::DELETE, "/taxonomies/{tid}/papers/{pid}", Mutating, delete(review::remove)),
        entry(M::PUT, "/taxonomies/{tid}/papers/{pid}/vote", Mutating, put(review::vote)),
        entry(M::POST, "/taxonomies/{tid}/papers/{pid}/tags", Mutating, post(review::tag)),
        entry(
            M::DELETE,
            "/taxonomies/{tid}/papers/{pid}/tags/{keyword}",
            Mutating,
            delete(review::untag),
        ),
        entry(M::POST, "/taxonomies/{tid}/tag-import", Mutating, post(review::tag_import)),
        entry(M::POST, "/taxonomies/{tid}/match/suggest", GuardedRead, post(review::suggest)),
        entry(M::POST, "/taxonomies/{tid}/match/apply", Mutating, post(review::apply)),
        // Analyses.
        entry(M::GET, "/taxonomies/{tid}/matrix", PublicRead, get(views::matrix)),
        entry(M::GET, "/taxonomies/{tid}/matrix/cell", PublicRead, get(views::matrix_cell)),
        entry(M::GET, "/taxonomies/{tid}/surface", PublicRead, get(views::surface)),
        entry(M::GET, "/taxonomies/{tid}/cropcircles", PublicRead, get(views::cropcircles)),
        entry(M::GET, "/taxonomies/{tid}/coverage", PublicRead, get(views::coverage)),
        entry(M::POST, "/experiments/conformity", GuardedRead, post(experiments::conformity)),
        entry(M::POST, "/experiments/benchmark", GuardedRead, post(experiments::benchmark)),
    ]
}

/// Metadata of every route, in declaration order.
pub fn route_table() -> Vec<RouteSpec> {
    table().into_iter().map(|e| e.spec).collect()
}

fn bearer(req: &Request) -> Result<Option<&str>, ApiError> {
    match req.headers().get(header::AUTHORIZATION) {
        None => Ok(None),
        Some(value) => value
            .to_str()
            .ok()
            .and_then(|v| v.strip_prefix("Bearer "))
            .map(|t| Some(t.trim()))
            .ok_or_else(|| ApiError::unauthorized("malformed Authorization header")),
    }
}

async fn guard(
    State(state): State<AppState>,
    Extension(access): Extension<Access>,
    mut req: Request,
    next: Next,
) -> Response {
    let caller = if access == Access::Open {
        None
    } else {
        match bearer(&req) {
            Err(e) => return e.into_response(),
            Ok(None) => None,
            Ok(Some(token)) => match state.auth.authenticate(token) {
                Some(user) => Some(user),
                None => return ApiError::unauthorized("invalid or expired token").into_response(),
            },
        }
    };
    if caller.is_none() && matches!(access, Access::GuardedRead | Access::Mutating) {
        return ApiError::unauthorized("authentication required").into_response();
    }
    req.extensions_mut().insert(Caller(caller));
    next.run(req).await
}

async fn fallback() -> ApiError {
    ApiError::route_not_found()
}

pub fn router(state: AppState) -> Router {
    let mut router = Router::new();
    for Entry { spec, handler } in table() {
        let guarded = handler
            .route_layer(middleware::from_fn_with_state(state.clone(), guard))
            .route_layer(Extension(spec.access));
        router = router.route(&format!("{API_PREFIX}{}", spec.path), guarded);
    }
    router.fallback(fallback).with_state(state)
}
