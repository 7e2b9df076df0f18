//! Python bindings. Structured results cross the boundary as plain Python
//! dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use taas_core::analysis::{self, BenchConfig, Filter, SurfaceProperty};
use taas_core::matcher::{self, synthetic, MatchConfig, MatchMethod};
use taas_core::review::{PaperRecord, VoteValue};
use taas_core::{ConceptId, ConceptKind, DimensionId, PaperId, Provenance, RelationId, RelationType};

create_exception!(taas, TaasError, PyValueError, "Raised for domain errors; `args[0]` is the error code.");

fn err(e: taas_core::Error) -> PyErr {
    TaasError::new_err((e.code(), e.to_string()))
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn parse<T: std::str::FromStr<Err = taas_core::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn filter_of(filter: Option<&Bound<'_, PyAny>>) -> PyResult<Filter> {
    filter.map_or_else(|| Ok(Filter::default()), from_py)
}

/// A taxonomy held in memory. Every state-changing call bumps `version`.
#[pyclass(module = "taas")]
pub struct Taxonomy {
    inner: taas_core::Taxonomy,
}

#[pymethods]
impl Taxonomy {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        taas_core::Taxonomy::new(name).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        taas_core::Taxonomy::from_json(text).map(|inner| Self { inner }).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id().to_string()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_owned()
    }

    #[getter]
    fn version(&self) -> u64 {
        self.inner.version()
    }

    fn dimensions<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.dimensions().collect::<Vec<_>>())
    }

    fn concepts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.concepts().collect::<Vec<_>>())
    }

    fn relations<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.relations().collect::<Vec<_>>())
    }

    fn papers<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.papers().collect::<Vec<_>>())
    }

    fn mappings<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.mappings().collect::<Vec<_>>())
    }

    fn hierarchy<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.hierarchy())
    }

    #[pyo3(signature = (name, description = ""))]
    fn add_dimension(&mut self, name: &str, description: &str) -> PyResult<String> {
        self.inner.add_dimension(name, description).map(|id| id.to_string()).map_err(err)
    }

    fn remove_dimension(&mut self, dimension_id: &str) -> PyResult<()> {
        self.inner.remove_dimension(&DimensionId::from(dimension_id)).map_err(err)
    }

    #[pyo3(signature = (dimension_id, name, kind = "node"))]
    fn add_concept(&mut self, dimension_id: &str, name: &str, kind: &str) -> PyResult<String> {
        let kind: ConceptKind = parse(kind)?;
        self.inner
            .add_concept(&DimensionId::from(dimension_id), name, kind)
            .map(|id| id.to_string())
            .map_err(err)
    }

    fn rename_concept(&mut self, concept_id: &str, name: &str) -> PyResult<()> {
        self.inner.rename_concept(&ConceptId::from(concept_id), name).map_err(err)
    }

    fn remove_concept(&mut self, concept_id: &str) -> PyResult<()> {
        self.inner.remove_concept(&ConceptId::from(concept_id)).map_err(err)
    }

    /// Merges `absorbed_id` into `survivor_id`.
    fn merge_concepts(&mut self, survivor_id: &str, absorbed_id: &str) -> PyResult<String> {
        self.inner
            .merge_concepts(&ConceptId::from(survivor_id), &ConceptId::from(absorbed_id))
            .map(|id| id.to_string())
            .map_err(err)
    }

    #[pyo3(signature = (source_id, target_id, rel_type = "unspecified", annotation = ""))]
    fn add_relation(&mut self, source_id: &str, target_id: &str, rel_type: &str, annotation: &str) -> PyResult<String> {
        let rel_type: RelationType = parse(rel_type)?;
        self.inner
            .add_relation(&ConceptId::from(source_id), &ConceptId::from(target_id), rel_type, annotation)
            .map(|id| id.to_string())
            .map_err(err)
    }

    fn remove_relation(&mut self, relation_id: &str) -> PyResult<()> {
        self.inner.remove_relation(&RelationId::from(relation_id)).map_err(err)
    }

    fn add_synonym(&mut self, concept_id: &str, term: &str) -> PyResult<bool> {
        self.inner.add_synonym(&ConceptId::from(concept_id), term).map_err(err)
    }

    /// Imports paper records (dicts with `id`, `title`, `abstract`, `year`,
    /// `citation_count`, `body_text`...). Returns `{created, rejected}`.
    fn import_papers<'py>(&mut self, py: Python<'py>, records: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let records: Vec<PaperRecord> = from_py(records)?;
        let outcome = self.inner.import_papers(records);
        to_py(py, &outcome)
    }

    /// Casts `include` or `exclude`; returns the paper's positive vote count.
    #[pyo3(signature = (reviewer, paper_id, value, note = ""))]
    fn vote(&mut self, reviewer: &str, paper_id: &str, value: &str, note: &str) -> PyResult<usize> {
        let value = match value {
            "include" => VoteValue::Include,
            "exclude" => VoteValue::Exclude,
            other => {
                return Err(err(taas_core::Error::UnknownVariant {
                    kind: "vote value",
                    value: other.to_owned(),
                }))
            }
        };
        let paper = PaperId::from(paper_id);
        self.inner.cast_vote(reviewer, &paper, value, note).map_err(err)?;
        Ok(self.inner.paper(&paper).map_or(0, |p| p.positive_votes()))
    }

    #[pyo3(signature = (paper_id, keyword, note = ""))]
    fn tag_paper(&mut self, paper_id: &str, keyword: &str, note: &str) -> PyResult<bool> {
        self.inner.tag_paper(&PaperId::from(paper_id), keyword, note).map_err(err)
    }

    /// Turns tags used at least `min_count` times into concepts of a dimension.
    #[pyo3(signature = (dimension_id, min_count = 1))]
    fn import_tags<'py>(&mut self, py: Python<'py>, dimension_id: &str, min_count: usize) -> PyResult<Bound<'py, PyAny>> {
        let imported = self
            .inner
            .import_tags_as_concepts(&DimensionId::from(dimension_id), min_count)
            .map_err(err)?;
        to_py(py, &imported)
    }

    fn map_paper(&mut self, paper_id: &str, concept_id: &str) -> PyResult<bool> {
        self.inner
            .map_paper(&PaperId::from(paper_id), &ConceptId::from(concept_id), Provenance::Manual, 0)
            .map(|o| o.changed)
            .map_err(err)
    }

    fn unmap_paper(&mut self, paper_id: &str, concept_id: &str) -> bool {
        self.inner.unmap_paper(&PaperId::from(paper_id), &ConceptId::from(concept_id))
    }

    /// Stores suggestions from [`suggest`] as automatic mappings. Returns how
    /// many mappings changed.
    fn apply_suggestions(&mut self, suggestions: &Bound<'_, PyAny>) -> PyResult<usize> {
        let suggestions: Vec<matcher::MappingSuggestion> = from_py(suggestions)?;
        self.inner.apply_suggestions(&suggestions).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Taxonomy(id={:?}, name={:?}, version={})",
            self.inner.id().as_str(),
            self.inner.name(),
            self.inner.version()
        )
    }
}

#[pyfunction]
fn levenshtein_distance(a: &str, b: &str) -> usize {
    matcher::levenshtein_distance(a, b)
}

#[pyfunction]
fn dice_similarity(a: &str, b: &str) -> f64 {
    matcher::dice_similarity(a, b)
}

fn match_config(method: &str, threshold: Option<f64>, moc: u32, use_synonyms: bool) -> PyResult<MatchConfig> {
    let mut config = MatchConfig::new(parse::<MatchMethod>(method)?)
        .with_moc(moc)
        .with_synonyms(use_synonyms);
    if let Some(threshold) = threshold {
        config = config.with_threshold(threshold);
    }
    config.validate().map_err(err)?;
    Ok(config)
}

/// Keyword-match suggestions for the taxonomy's papers.
#[pyfunction]
#[pyo3(signature = (taxonomy, method, threshold = None, moc = 3, use_synonyms = true, paper_ids = None))]
fn suggest<'py>(
    py: Python<'py>,
    taxonomy: &Taxonomy,
    method: &str,
    threshold: Option<f64>,
    moc: u32,
    use_synonyms: bool,
    paper_ids: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyAny>> {
    let config = match_config(method, threshold, moc, use_synonyms)?;
    let ids: Option<Vec<PaperId>> = paper_ids.map(|v| v.into_iter().map(PaperId::from).collect());
    let suggestions = matcher::suggest_for_taxonomy(&taxonomy.inner, &config, ids.as_deref()).map_err(err)?;
    to_py(py, &suggestions)
}

#[pyfunction]
#[pyo3(signature = (taxonomy, filter = None))]
fn correlation_matrix<'py>(
    py: Python<'py>,
    taxonomy: &Taxonomy,
    filter: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &analysis::build_matrix(&taxonomy.inner, &filter_of(filter)?))
}

#[pyfunction]
#[pyo3(signature = (taxonomy, property = "paper_count", filter = None))]
fn surface<'py>(
    py: Python<'py>,
    taxonomy: &Taxonomy,
    property: &str,
    filter: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let property: SurfaceProperty = parse(property)?;
    let filter = filter_of(filter)?;
    let base = analysis::build_matrix(&taxonomy.inner, &filter);
    let points = analysis::build_surface(&taxonomy.inner, &filter, property, &base).map_err(err)?;
    to_py(py, &points)
}

#[pyfunction]
fn cropcircles_layout<'py>(py: Python<'py>, taxonomy: &Taxonomy) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &analysis::cropcircles_layout(&taxonomy.inner))
}

#[pyfunction]
fn coverage_report<'py>(py: Python<'py>, taxonomy: &Taxonomy) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &analysis::coverage_report(&taxonomy.inner))
}

/// Matrix creation timings; returns a list of `{n, mean_ms, min_ms, max_ms}`.
#[pyfunction]
#[pyo3(signature = (sizes = None, repetitions = 10, seed = 42))]
fn matrix_benchmark<'py>(
    py: Python<'py>,
    sizes: Option<Vec<usize>>,
    repetitions: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let mut config = BenchConfig {
        repetitions,
        seed,
        ..BenchConfig::default()
    };
    if let Some(sizes) = sizes {
        config.sizes = sizes;
    }
    let report = py.detach(|| analysis::random_matrix_benchmark(&config));
    to_py(py, &report.rows)
}

/// Generates a seeded synthetic corpus and runs the conformity grid on it.
/// Returns `(taxonomy, rows)`.
#[pyfunction]
#[pyo3(signature = (seed = 42, papers = 50, concepts = 20, moc_values = None))]
fn synthetic_conformity<'py>(
    py: Python<'py>,
    seed: u64,
    papers: usize,
    concepts: usize,
    moc_values: Option<Vec<u32>>,
) -> PyResult<(Taxonomy, Bound<'py, PyAny>)> {
    let spec = synthetic::SyntheticSpec {
        papers,
        concepts,
        ..synthetic::SyntheticSpec::default()
    };
    let moc = moc_values.unwrap_or_else(|| matcher::DEFAULT_MOC_VALUES.to_vec());
    let (corpus, report) = py
        .detach(|| {
            let corpus = synthetic::generate(&spec, seed)?;
            let report = matcher::run_conformity_experiment(
                &corpus.corpus.documents(),
                &corpus.taxonomy,
                &corpus.baseline,
                &moc,
                true,
            )?;
            Ok((corpus, report))
        })
        .map_err(err)?;
    Ok((Taxonomy { inner: corpus.taxonomy }, to_py(py, &report.rows)?))
}

#[pymodule]
fn taas(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TaasError", m.py().get_type::<TaasError>())?;
    m.add_class::<Taxonomy>()?;
    m.add_function(wrap_pyfunction!(levenshtein_distance, m)?)?;
    m.add_function(wrap_pyfunction!(dice_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(suggest, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(surface, m)?)?;
    m.add_function(wrap_pyfunction!(cropcircles_layout, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_report, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_benchmark, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_conformity, m)?)?;
    Ok(())
}
