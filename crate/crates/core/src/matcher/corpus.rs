//! Corpus directories and baseline files.
//!
//! A corpus directory holds `manifest.json` (`{"papers": [<paper record>...]}`,
//! every record with an `id`) and one `<paper-id>.txt` file of extracted text
//! per paper. A missing text file means the paper is matched on its title and
//! abstract.
//!
//! Baseline files are CSV with a `paper_id` column and either a `concept_id`
//! or a `concept` (name) column.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PairSet;
use crate::error::{Error, Result};
use crate::ids::{ConceptId, PaperId};
use crate::review::PaperRecord;
use crate::taxonomy::{fold, Taxonomy};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Text of one paper to be matched.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub paper_id: PaperId,
    pub text: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub papers: Vec<PaperRecord>,
}

fn safe_file_stem(id: &str) -> bool {
    !id.is_empty()
        && id != "."
        && id != ".."
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

impl Corpus {
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        let mut corpus: Corpus = serde_json::from_str(&manifest).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: format!("{MANIFEST_FILE}: {e}"),
        })?;
        for record in &mut corpus.papers {
            let id = record
                .id
                .clone()
                .ok_or_else(|| Error::validation("manifest", "every paper needs an id"))?;
            if !safe_file_stem(&id) {
                return Err(Error::validation(
                    "manifest",
                    format!("paper id {id:?} is not usable as a file name"),
                ));
            }
            let path = dir.join(format!("{id}.txt"));
            if path.exists() {
                record.body_text = Some(fs::read_to_string(path)?);
            }
        }
        Ok(corpus)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut manifest = self.clone();
        for record in &mut manifest.papers {
            let id = record
                .id
                .clone()
                .ok_or_else(|| Error::validation("manifest", "every paper needs an id"))?;
            if !safe_file_stem(&id) {
                return Err(Error::validation(
                    "manifest",
                    format!("paper id {id:?} is not usable as a file name"),
                ));
            }
            if let Some(body) = record.body_text.take() {
                fs::write(dir.join(format!("{id}.txt")), body)?;
            }
        }
        fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }

    pub fn documents(&self) -> Vec<CorpusDocument> {
        self.papers
            .iter()
            .filter_map(|r| {
                let id = r.id.as_deref()?;
                let text = match r.body_text.as_deref() {
                    Some(body) if !body.trim().is_empty() => body.to_owned(),
                    _ => format!("{}\n{}", r.title.as_deref().unwrap_or(""), r.abstract_text),
                };
                Some(CorpusDocument {
                    paper_id: PaperId::from(id),
                    text,
                })
            })
            .collect()
    }
}

fn csv_error(e: csv::Error) -> Error {
    let (line, column) = e
        .position()
        .map(|p| (p.line() as usize, 1))
        .unwrap_or((0, 0));
    Error::Parse {
        line,
        column,
        message: e.to_string(),
    }
}

/// Reads a baseline CSV, resolving concept names against `taxonomy`.
pub fn read_baseline(text: &str, taxonomy: &Taxonomy) -> Result<PairSet> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_error)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let paper_col = col("paper_id").ok_or_else(|| Error::validation("baseline", "missing paper_id column"))?;
    let id_col = col("concept_id");
    let name_col = col("concept");
    if id_col.is_none() && name_col.is_none() {
        return Err(Error::validation("baseline", "missing concept_id or concept column"));
    }

    let mut by_name: BTreeMap<String, Vec<&ConceptId>> = BTreeMap::new();
    for c in taxonomy.concepts() {
        by_name.entry(fold(&c.name)).or_default().push(&c.id);
    }

    let mut pairs = PairSet::new();
    for row in reader.records() {
        let row = row.map_err(csv_error)?;
        let paper = PaperId::from(row.get(paper_col).unwrap_or_default());
        let by_id = id_col
            .and_then(|i| row.get(i))
            .filter(|s| !s.is_empty())
            .map(ConceptId::from)
            .filter(|id| taxonomy.concept(id).is_some());
        let concept = match by_id {
            Some(id) => id,
            None => {
                let wanted = name_col
                    .and_then(|i| row.get(i))
                    .or_else(|| id_col.and_then(|i| row.get(i)))
                    .unwrap_or_default();
                match by_name.get(&fold(wanted)).map(Vec::as_slice) {
                    Some([one]) => (*one).clone(),
                    Some(_) => {
                        return Err(Error::validation(
                            "baseline",
                            format!("concept name {wanted:?} is ambiguous"),
                        ))
                    }
                    None => return Err(Error::not_found("concept", wanted)),
                }
            }
        };
        pairs.insert((paper, concept));
    }
    Ok(pairs)
}

/// Writes pairs as `paper_id,concept_id,concept` CSV.
pub fn write_baseline(pairs: &PairSet, taxonomy: &Taxonomy) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["paper_id", "concept_id", "concept"])
        .expect("in-memory csv");
    for (paper, concept) in pairs {
        let name = taxonomy.concept(concept).map_or("", |c| c.name.as_str());
        writer
            .write_record([paper.as_str(), concept.as_str(), name])
            .expect("in-memory csv");
    }
    String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("utf-8 input")
}
