//! Conformity experiment and matrix benchmark.

use axum::extract::State;
use axum::http::HeaderMap;
use axum::response::{IntoResponse, Response};
use axum::{Extension, Json};
use serde::Deserialize;
use taas_core::analysis::{random_matrix_benchmark, BenchConfig};
use taas_core::matcher::{run_conformity_experiment, CorpusDocument, PairSet, DEFAULT_MOC_VALUES};
use taas_core::{ConceptId, PaperId};

use super::{csv, readable, wants_csv, Caller};
use crate::error::{ApiError, ApiResult};
use crate::extract::{Body, Params};
use crate::AppState;

const MAX_BENCH_SIZE: usize = 1000;
const MAX_BENCH_REPETITIONS: usize = 100;

#[derive(Deserialize)]
pub struct FormatQuery {
    format: Option<String>,
}

#[derive(Deserialize)]
pub struct BaselinePair {
    paper_id: PaperId,
    concept_id: ConceptId,
}

#[derive(Deserialize)]
pub struct ConformityBody {
    taxonomy_id: String,
    baseline: Vec<BaselinePair>,
    moc_values: Option<Vec<u32>>,
    #[serde(default = "yes")]
    use_synonyms: bool,
}

fn yes() -> bool {
    true
}

async fn blocking<T: Send + 'static>(work: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(work)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))
}

/// Runs every method over the taxonomy's papers against a manual baseline.
pub async fn conformity(
    State(state): State<AppState>,
    Extension(caller): Extension<Caller>,
    headers: HeaderMap,
    Params(query): Params<FormatQuery>,
    Body(body): Body<ConformityBody>,
) -> ApiResult<Response> {
    let as_csv = wants_csv(&headers, query.format.as_deref())?;
    let tax = readable(&state, &caller, &body.taxonomy_id)?;
    let baseline: PairSet = body
        .baseline
        .into_iter()
        .map(|p| (p.paper_id, p.concept_id))
        .collect();
    let moc_values = body.moc_values.unwrap_or_else(|| DEFAULT_MOC_VALUES.to_vec());
    let use_synonyms = body.use_synonyms;
    let report = blocking(move || {
        let corpus: Vec<CorpusDocument> = tax
            .papers()
            .map(|p| CorpusDocument {
                paper_id: p.id.clone(),
                text: p.match_text(),
            })
            .collect();
        run_conformity_experiment(&corpus, &tax, &baseline, &moc_values, use_synonyms)
    })
    .await??;
    Ok(if as_csv {
        csv(report.to_csv())
    } else {
        Json(report).into_response()
    })
}

#[derive(Deserialize)]
pub struct BenchmarkBody {
    sizes: Option<Vec<usize>>,
    repetitions: Option<usize>,
    seed: Option<u64>,
}

pub async fn benchmark(
    headers: HeaderMap,
    Params(query): Params<FormatQuery>,
    Body(body): Body<BenchmarkBody>,
) -> ApiResult<Response> {
    let as_csv = wants_csv(&headers, query.format.as_deref())?;
    let mut config = BenchConfig::default();
    if let Some(sizes) = body.sizes {
        config.sizes = sizes;
    }
    if let Some(repetitions) = body.repetitions {
        config.repetitions = repetitions;
    }
    if let Some(seed) = body.seed {
        config.seed = seed;
    }
    if config.sizes.is_empty() || config.sizes.iter().any(|&n| n == 0 || n > MAX_BENCH_SIZE) {
        return Err(ApiError::bad_request(
            "validation",
            format!("sizes must be non-empty and each between 1 and {MAX_BENCH_SIZE}"),
        ));
    }
    if config.repetitions == 0 || config.repetitions > MAX_BENCH_REPETITIONS {
        return Err(ApiError::bad_request(
            "validation",
            format!("repetitions must be between 1 and {MAX_BENCH_REPETITIONS}"),
        ));
    }
    let report = blocking(move || random_matrix_benchmark(&config)).await?;
    Ok(if as_csv {
        csv(report.to_csv())
    } else {
        Json(report).into_response()
    })
}
