use std::collections::BTreeSet;

use serde::Serialize;

use super::{CorpusDocument, MatchConfig, MatchMethod, Matcher};
use crate::error::{Error, Result};
use crate::ids::{ConceptId, PaperId};
use crate::taxonomy::Taxonomy;

/// Set of `(paper, concept)` mapping pairs.
pub type PairSet = BTreeSet<(PaperId, ConceptId)>;

pub const DEFAULT_MOC_VALUES: [u32; 4] = [10, 5, 3, 1];

/// Percentage of the manual baseline recovered by the automatic pairs.
pub fn conformity(auto: &PairSet, manual: &PairSet) -> Result<f64> {
    if manual.is_empty() {
        return Err(Error::UndefinedBaseline);
    }
    let hits = manual.intersection(auto).count();
    Ok(100.0 * hits as f64 / manual.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformityRow {
    pub method: MatchMethod,
    pub moc: u32,
    pub auto_pairs: usize,
    pub manual_pairs: usize,
    pub intersection: usize,
    pub conformity_pct: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConformityReport {
    pub rows: Vec<ConformityRow>,
}

impl ConformityReport {
    pub fn get(&self, method: MatchMethod, moc: u32) -> Option<&ConformityRow> {
        self.rows.iter().find(|r| r.method == method && r.moc == moc)
    }

    /// CSV with columns `method,moc,auto_pairs,manual_pairs,intersection,conformity_pct`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,moc,auto_pairs,manual_pairs,intersection,conformity_pct\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{:.2}\n",
                r.method, r.moc, r.auto_pairs, r.manual_pairs, r.intersection, r.conformity_pct
            ));
        }
        out
    }
}

/// Runs every method at its default threshold against `corpus` for each MOC
/// value and compares the automatic mappings with `baseline`.
pub fn run_conformity_experiment(
    corpus: &[CorpusDocument],
    taxonomy: &Taxonomy,
    baseline: &PairSet,
    moc_values: &[u32],
    use_synonyms: bool,
) -> Result<ConformityReport> {
    if baseline.is_empty() {
        return Err(Error::UndefinedBaseline);
    }
    let mut report = ConformityReport::default();
    for method in MatchMethod::ALL {
        let matcher = Matcher::new(taxonomy, MatchConfig::new(method).with_synonyms(use_synonyms))?;
        // Counts do not depend on MOC; compute them once per method.
        let counts: Vec<(PaperId, ConceptId, u32)> = corpus
            .iter()
            .flat_map(|doc| {
                matcher
                    .count_all(&doc.text)
                    .into_iter()
                    .map(|(concept, occ)| (doc.paper_id.clone(), concept, occ.total))
            })
            .collect();
        for &moc in moc_values {
            if moc < 1 {
                return Err(Error::validation("moc", "must be at least 1"));
            }
            let auto: PairSet = counts
                .iter()
                .filter(|(_, _, n)| *n >= moc)
                .map(|(p, c, _)| (p.clone(), c.clone()))
                .collect();
            report.rows.push(ConformityRow {
                method,
                moc,
                auto_pairs: auto.len(),
                manual_pairs: baseline.len(),
                intersection: baseline.intersection(&auto).count(),
                conformity_pct: conformity(&auto, baseline)?,
            });
        }
    }
    Ok(report)
}
