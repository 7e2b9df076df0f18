//! Matrix-creation timing over random taxonomies.

use std::time::Instant;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{build_matrix, Filter};
use crate::ids::{ConceptId, PaperId};
use crate::review::Paper;
use crate::taxonomy::{Concept, ConceptKind, Mapping, Provenance, Taxonomy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: (10..=200).step_by(10).collect(),
            repetitions: 10,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub mean_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// CSV with columns `n,mean_ms,min_ms,max_ms`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,mean_ms,min_ms,max_ms\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.6},{:.6},{:.6}\n", r.n, r.mean_ms, r.min_ms, r.max_ms));
        }
        out
    }
}

/// Flat taxonomy with `n` dummy concepts in which a random half of all
/// concept pairs share one dedicated paper.
pub fn benchmark_taxonomy(n: usize, seed: u64) -> Taxonomy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tax = Taxonomy::new(&format!("bench-{n}")).expect("valid name");
    let dimension_id = tax.dimensions().next().expect("default dimension").id.clone();
    let ids: Vec<ConceptId> = (0..n).map(|i| ConceptId::from(format!("c{i}"))).collect();
    tax.concepts = ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let concept = Concept {
                id: id.clone(),
                dimension_id: dimension_id.clone(),
                name: format!("Concept {i}"),
                kind: ConceptKind::Node,
                notes: String::new(),
            };
            (id.clone(), concept)
        })
        .collect();
    let mut papers = IndexMap::new();
    let mut mappings = IndexMap::new();
    for i in 0..n {
        for j in i + 1..n {
            if !rng.random_bool(0.5) {
                continue;
            }
            let paper_id = PaperId::from(format!("p{}", papers.len()));
            for concept in [&ids[i], &ids[j]] {
                let mapping = Mapping {
                    paper_id: paper_id.clone(),
                    concept_id: concept.clone(),
                    provenance: Provenance::Manual,
                    occurrence_count: 0,
                };
                mappings.insert((paper_id.clone(), concept.clone()), mapping);
            }
            let paper = Paper {
                id: paper_id.clone(),
                title: format!("Dummy {i}-{j}"),
                abstract_text: String::new(),
                authors: Vec::new(),
                year: None,
                doi: None,
                citation_count: 0,
                body_text: None,
                tags: Vec::new(),
                votes: Vec::new(),
            };
            papers.insert(paper_id, paper);
        }
    }
    tax.papers = papers;
    tax.mappings = mappings;
    tax
}

/// Times `build_matrix` on `repetitions` seeded random taxonomies per size.
pub fn random_matrix_benchmark(config: &BenchConfig) -> BenchReport {
    let mut report = BenchReport::default();
    let filter = Filter::default();
    for &n in &config.sizes {
        let mut times = Vec::with_capacity(config.repetitions);
        for rep in 0..config.repetitions {
            let seed = config.seed ^ ((n as u64) << 32) ^ rep as u64;
            let tax = benchmark_taxonomy(n, seed);
            let start = Instant::now();
            let matrix = build_matrix(&tax, &filter);
            let elapsed = start.elapsed().as_secs_f64() * 1000.0;
            std::hint::black_box(&matrix);
            times.push(elapsed);
        }
        if times.is_empty() {
            continue;
        }
        report.rows.push(BenchRow {
            n,
            mean_ms: times.iter().sum::<f64>() / times.len() as f64,
            min_ms: times.iter().copied().fold(f64::INFINITY, f64::min),
            max_ms: times.iter().copied().fold(0.0, f64::max),
        });
    }
    report
}
