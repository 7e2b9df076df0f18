//! Collective literature screening.
//!
//! Papers live inside a taxonomy's metadata. Reviewers vote to include or
//! exclude them, tag them with free keywords, and frequently used tags can be
//! turned into concepts. Approval is never stored: it is recomputed from the
//! votes whenever [`Taxonomy::papers_by_min_votes`] is asked.

mod bibtex;

use std::collections::HashSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{ConceptId, DimensionId, PaperId};
use crate::taxonomy::{fold, ConceptKind, Mapping, Provenance, Taxonomy};

pub use bibtex::parse_bibtex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VoteValue {
    Include,
    Exclude,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vote {
    pub reviewer_id: String,
    pub value: VoteValue,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tag {
    pub keyword: String,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paper {
    pub id: PaperId,
    pub title: String,
    #[serde(rename = "abstract", default)]
    pub abstract_text: String,
    #[serde(default)]
    pub authors: Vec<String>,
    #[serde(default)]
    pub year: Option<i32>,
    #[serde(default)]
    pub doi: Option<String>,
    #[serde(default)]
    pub citation_count: u64,
    #[serde(default)]
    pub body_text: Option<String>,
    #[serde(default)]
    pub tags: Vec<Tag>,
    #[serde(default)]
    pub votes: Vec<Vote>,
}

impl Paper {
    pub fn positive_votes(&self) -> usize {
        self.votes
            .iter()
            .filter(|v| v.value == VoteValue::Include)
            .count()
    }

    pub fn has_tag(&self, keyword: &str) -> bool {
        let key = fold(keyword);
        self.tags.iter().any(|t| fold(&t.keyword) == key)
    }

    /// Text used for keyword matching: the full text when present, otherwise
    /// title and abstract.
    pub fn match_text(&self) -> String {
        match self.body_text.as_deref() {
            Some(body) if !body.trim().is_empty() => body.to_owned(),
            _ => format!("{}\n{}", self.title, self.abstract_text),
        }
    }
}

/// One entry of a bibliographic intake batch.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    /// Requested id; a fresh one is generated when absent.
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default)]
    pub title: Option<String>,
    #[serde(rename = "abstract", default)]
    pub abstract_text: String,
    #[serde(default)]
    pub authors: Vec<String>,
    #[serde(default)]
    pub year: Option<i32>,
    #[serde(default)]
    pub doi: Option<String>,
    #[serde(default)]
    pub citation_count: u64,
    #[serde(default)]
    pub body_text: Option<String>,
}

impl PaperRecord {
    pub fn titled(title: &str) -> Self {
        Self {
            title: Some(title.to_owned()),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rejection {
    /// Position of the record in the submitted batch.
    pub index: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ImportOutcome {
    pub created: Vec<PaperId>,
    pub rejected: Vec<Rejection>,
}

/// A concept produced or reused by tag import, with the mappings it received.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TagImport {
    pub keyword: String,
    pub concept_id: ConceptId,
    pub created: bool,
    pub mappings: Vec<Mapping>,
}

impl Taxonomy {
    /// Registers a batch of papers. Malformed and duplicate records are
    /// rejected individually; the rest of the batch still goes in.
    pub fn import_papers(&mut self, records: Vec<PaperRecord>) -> ImportOutcome {
        let mut outcome = ImportOutcome::default();
        let mut dois: HashSet<String> = self
            .papers
            .values()
            .filter_map(|p| p.doi.as_deref().map(fold))
            .collect();
        let mut titles: HashSet<String> = self.papers.values().map(|p| fold(&p.title)).collect();

        for (index, record) in records.into_iter().enumerate() {
            let reject = |reason: String| Rejection { index, reason };
            let title = match record.title.as_deref().map(str::trim) {
                Some(t) if !t.is_empty() => t.to_owned(),
                _ => {
                    outcome.rejected.push(reject("missing title".into()));
                    continue;
                }
            };
            let doi = record
                .doi
                .as_deref()
                .map(str::trim)
                .filter(|d| !d.is_empty())
                .map(str::to_owned);
            match &doi {
                Some(d) if dois.contains(&fold(d)) => {
                    outcome.rejected.push(reject(format!("duplicate doi {d}")));
                    continue;
                }
                None if titles.contains(&fold(&title)) => {
                    outcome
                        .rejected
                        .push(reject(format!("duplicate title {title:?}")));
                    continue;
                }
                _ => {}
            }
            let id = match record.id.as_deref().map(str::trim) {
                Some(id) if !id.is_empty() => PaperId::from(id),
                _ => PaperId::generate(),
            };
            if self.papers.contains_key(&id) {
                outcome.rejected.push(reject(format!("duplicate id {id}")));
                continue;
            }
            if let Some(d) = &doi {
                dois.insert(fold(d));
            }
            titles.insert(fold(&title));
            self.papers.insert(
                id.clone(),
                Paper {
                    id: id.clone(),
                    title,
                    abstract_text: record.abstract_text,
                    authors: record.authors,
                    year: record.year,
                    doi,
                    citation_count: record.citation_count,
                    body_text: record.body_text,
                    tags: Vec::new(),
                    votes: Vec::new(),
                },
            );
            outcome.created.push(id);
        }
        if !outcome.created.is_empty() {
            self.bump();
        }
        outcome
    }

    /// Deletes a paper together with its mappings.
    pub fn remove_paper(&mut self, paper: &PaperId) -> Result<()> {
        self.require_paper(paper)?;
        self.papers.shift_remove(paper);
        self.mappings.retain(|(p, _), _| p != paper);
        self.bump();
        Ok(())
    }

    /// Records `reviewer`'s vote, replacing any earlier vote by the same reviewer.
    pub fn cast_vote(
        &mut self,
        reviewer: &str,
        paper: &PaperId,
        value: VoteValue,
        note: &str,
    ) -> Result<Vote> {
        let reviewer = reviewer.trim();
        if reviewer.is_empty() {
            return Err(Error::validation("reviewer", "must not be empty"));
        }
        self.require_paper(paper)?;
        let vote = Vote {
            reviewer_id: reviewer.to_owned(),
            value,
            note: note.to_owned(),
        };
        let votes = &mut self.papers[paper].votes;
        let changed = match votes.iter_mut().find(|v| v.reviewer_id == reviewer) {
            Some(existing) if *existing == vote => false,
            Some(existing) => {
                *existing = vote.clone();
                true
            }
            None => {
                votes.push(vote.clone());
                true
            }
        };
        if changed {
            self.bump();
        }
        Ok(vote)
    }

    /// Papers with at least `min_positive` include votes, most-approved first,
    /// ties broken by title.
    pub fn papers_by_min_votes(&self, min_positive: usize) -> Vec<&Paper> {
        let mut out: Vec<(usize, &Paper)> = self
            .papers
            .values()
            .map(|p| (p.positive_votes(), p))
            .filter(|(n, _)| *n >= min_positive)
            .collect();
        out.sort_by(|(na, a), (nb, b)| {
            nb.cmp(na)
                .then_with(|| fold(&a.title).cmp(&fold(&b.title)))
                .then_with(|| a.title.cmp(&b.title))
                .then_with(|| a.id.cmp(&b.id))
        });
        out.into_iter().map(|(_, p)| p).collect()
    }

    /// Adds or updates a tag. Returns whether anything changed.
    pub fn tag_paper(&mut self, paper: &PaperId, keyword: &str, note: &str) -> Result<bool> {
        let keyword = keyword.trim();
        if keyword.is_empty() {
            return Err(Error::validation("keyword", "must not be empty"));
        }
        self.require_paper(paper)?;
        let key = fold(keyword);
        let tags = &mut self.papers[paper].tags;
        let changed = match tags.iter_mut().find(|t| fold(&t.keyword) == key) {
            Some(tag) if tag.note == note => false,
            Some(tag) => {
                tag.note = note.to_owned();
                true
            }
            None => {
                tags.push(Tag {
                    keyword: keyword.to_owned(),
                    note: note.to_owned(),
                });
                true
            }
        };
        if changed {
            self.bump();
        }
        Ok(changed)
    }

    pub fn untag_paper(&mut self, paper: &PaperId, keyword: &str) -> Result<bool> {
        self.require_paper(paper)?;
        let key = fold(keyword);
        let tags = &mut self.papers[paper].tags;
        let before = tags.len();
        tags.retain(|t| fold(&t.keyword) != key);
        let changed = tags.len() != before;
        if changed {
            self.bump();
        }
        Ok(changed)
    }

    /// Turns every keyword used on at least `min_tag_count` papers into a
    /// concept of `dimension` (reusing a same-named concept when one exists)
    /// and maps each tagged paper to it manually.
    pub fn import_tags_as_concepts(
        &mut self,
        dimension: &DimensionId,
        min_tag_count: usize,
    ) -> Result<Vec<TagImport>> {
        self.require_dimension(dimension)?;

        struct Usage {
            papers: Vec<PaperId>,
            casings: IndexMap<String, usize>,
        }
        let mut usage: IndexMap<String, Usage> = IndexMap::new();
        for paper in self.papers.values() {
            for tag in &paper.tags {
                let entry = usage.entry(fold(&tag.keyword)).or_insert_with(|| Usage {
                    papers: Vec::new(),
                    casings: IndexMap::new(),
                });
                if !entry.papers.contains(&paper.id) {
                    entry.papers.push(paper.id.clone());
                }
                *entry.casings.entry(tag.keyword.trim().to_owned()).or_default() += 1;
            }
        }

        let threshold = min_tag_count.max(1);
        let mut changed = false;
        let mut out = Vec::new();
        for (_, use_) in usage {
            if use_.papers.len() < threshold {
                continue;
            }
            // Most frequent casing; the first seen wins ties.
            let mut name = String::new();
            let mut best = 0;
            for (casing, count) in &use_.casings {
                if *count > best {
                    best = *count;
                    name = casing.clone();
                }
            }
            let (concept_id, created) = match self.concept_by_name(dimension, &name) {
                Some(existing) => (existing.id.clone(), false),
                None => {
                    let id = ConceptId::generate();
                    self.concepts.insert(
                        id.clone(),
                        crate::taxonomy::Concept {
                            id: id.clone(),
                            dimension_id: dimension.clone(),
                            name: name.clone(),
                            kind: ConceptKind::Node,
                            notes: String::new(),
                        },
                    );
                    changed = true;
                    (id, true)
                }
            };
            let mut mappings = Vec::new();
            for paper in use_.papers {
                let outcome = self.upsert_mapping(Mapping {
                    paper_id: paper,
                    concept_id: concept_id.clone(),
                    provenance: Provenance::Manual,
                    occurrence_count: 0,
                });
                changed |= outcome.changed;
                mappings.push(outcome.mapping);
            }
            out.push(TagImport {
                keyword: name,
                concept_id,
                created,
                mappings,
            });
        }
        if changed {
            self.bump();
        }
        Ok(out)
    }
}
