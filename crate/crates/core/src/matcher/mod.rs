//! Keyword matching for the literature importer.
//!
//! A paper is mapped to a concept when the concept's name (and, optionally,
//! its synonyms) occurs in the paper's text at least `moc` times. Four
//! occurrence tests are available: whole-word regular expressions, and
//! Dice / Levenshtein / fuzzy subsequence scoring over sliding token windows.

mod conformity;
mod corpus;
mod normalize;
mod similarity;
pub mod synthetic;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{ConceptId, PaperId};
use crate::review::Paper;
use crate::taxonomy::{fold, Mapping, Provenance, Taxonomy};

pub use conformity::{
    conformity, run_conformity_experiment, ConformityReport, ConformityRow, PairSet,
    DEFAULT_MOC_VALUES,
};
pub use corpus::{read_baseline, write_baseline, Corpus, CorpusDocument, MANIFEST_FILE};
pub use normalize::normalize;
pub use similarity::{dice_similarity, fuzzy_score, levenshtein_distance};

use similarity::{fuzzy_chars, levenshtein_chars, Bigrams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMethod {
    Regex,
    Dice,
    Levenshtein,
    Fuzzysort,
}

impl MatchMethod {
    pub const ALL: [MatchMethod; 4] = [
        MatchMethod::Regex,
        MatchMethod::Dice,
        MatchMethod::Levenshtein,
        MatchMethod::Fuzzysort,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MatchMethod::Regex => "regex",
            MatchMethod::Dice => "dice",
            MatchMethod::Levenshtein => "levenshtein",
            MatchMethod::Fuzzysort => "fuzzysort",
        }
    }

    /// Threshold used when the caller does not pick one.
    pub fn default_threshold(self) -> f64 {
        match self {
            MatchMethod::Regex => 0.0,
            MatchMethod::Dice => 0.9,
            MatchMethod::Levenshtein => 1.0,
            MatchMethod::Fuzzysort => -150.0,
        }
    }
}

impl fmt::Display for MatchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatchMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        MatchMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == wanted)
            .ok_or_else(|| Error::UnknownVariant {
                kind: "match method",
                value: s.to_owned(),
            })
    }
}

pub const DEFAULT_MOC: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub method: MatchMethod,
    /// Dice: minimum similarity in `[0, 1]`. Levenshtein: maximum distance.
    /// Fuzzysort: minimum score (`<= 0`). Ignored by regex.
    pub threshold: f64,
    /// Minimal occurrence count.
    pub moc: u32,
    pub use_synonyms: bool,
}

impl MatchConfig {
    pub fn new(method: MatchMethod) -> Self {
        Self {
            method,
            threshold: method.default_threshold(),
            moc: DEFAULT_MOC,
            use_synonyms: true,
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_moc(mut self, moc: u32) -> Self {
        self.moc = moc;
        self
    }

    pub fn with_synonyms(mut self, use_synonyms: bool) -> Self {
        self.use_synonyms = use_synonyms;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.moc < 1 {
            return Err(Error::validation("moc", "must be at least 1"));
        }
        let t = self.threshold;
        let ok = match self.method {
            MatchMethod::Regex => true,
            MatchMethod::Dice => (0.0..=1.0).contains(&t),
            MatchMethod::Levenshtein => t >= 0.0,
            MatchMethod::Fuzzysort => t <= 0.0,
        };
        if !ok || t.is_nan() {
            return Err(Error::validation(
                "threshold",
                format!("{t} is out of range for {}", self.method),
            ));
        }
        Ok(())
    }
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self::new(MatchMethod::Levenshtein)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCount {
    pub term: String,
    pub count: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrences {
    pub total: u32,
    pub matched_terms: Vec<TermCount>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingSuggestion {
    pub paper_id: PaperId,
    pub concept_id: ConceptId,
    pub occurrence_count: u32,
    pub matched_terms: Vec<TermCount>,
    pub method: MatchMethod,
}

/// Text prepared once and matched against many terms.
pub struct PreparedText<'a> {
    raw: &'a str,
    tokens: Vec<String>,
}

impl<'a> PreparedText<'a> {
    pub fn new(raw: &'a str) -> Self {
        Self {
            raw,
            tokens: normalize(raw),
        }
    }
}

/// One search term compiled for a given method.
struct CompiledTerm {
    term: String,
    regex: Option<regex::Regex>,
    width: usize,
    joined_chars: Vec<char>,
    bigrams: Bigrams,
}

impl CompiledTerm {
    fn new(term: &str, method: MatchMethod) -> Self {
        let tokens = normalize(term);
        let joined = tokens.join(" ");
        let regex = (method == MatchMethod::Regex)
            .then(|| phrase_regex(term))
            .flatten();
        Self {
            term: term.to_owned(),
            regex,
            width: tokens.len(),
            joined_chars: joined.chars().collect(),
            bigrams: Bigrams::new(&joined),
        }
    }

    fn count(&self, text: &PreparedText<'_>, config: &MatchConfig) -> u32 {
        if config.method == MatchMethod::Regex {
            return self
                .regex
                .as_ref()
                .map_or(0, |re| re.find_iter(text.raw).count() as u32);
        }
        let tokens = &text.tokens;
        if self.width == 0 || tokens.len() < self.width {
            return 0;
        }
        let mut hits = 0;
        let mut window = String::new();
        for start in 0..=tokens.len() - self.width {
            window.clear();
            for (k, tok) in tokens[start..start + self.width].iter().enumerate() {
                if k > 0 {
                    window.push(' ');
                }
                window.push_str(tok);
            }
            if self.window_matches(&window, config) {
                hits += 1;
            }
        }
        hits
    }

    fn window_matches(&self, window: &str, config: &MatchConfig) -> bool {
        match config.method {
            MatchMethod::Regex => unreachable!("regex terms are counted on raw text"),
            MatchMethod::Dice => Bigrams::new(window).dice(&self.bigrams) >= config.threshold,
            MatchMethod::Levenshtein => {
                let chars: Vec<char> = window.chars().collect();
                let diff = chars.len().abs_diff(self.joined_chars.len()) as f64;
                diff <= config.threshold
                    && levenshtein_chars(&chars, &self.joined_chars) as f64 <= config.threshold
            }
            MatchMethod::Fuzzysort => {
                let chars: Vec<char> = window.chars().collect();
                fuzzy_chars(&self.joined_chars, &chars)
                    .is_some_and(|score| score as f64 >= config.threshold)
            }
        }
    }
}

/// Case-insensitive whole-word pattern; whitespace inside the term matches
/// any whitespace run.
fn phrase_regex(term: &str) -> Option<regex::Regex> {
    let words: Vec<&str> = term.split_whitespace().collect();
    if words.is_empty() {
        return None;
    }
    let body = words
        .iter()
        .map(|w| regex::escape(w))
        .collect::<Vec<_>>()
        .join(r"\s+");
    let is_word = |c: Option<char>| c.is_some_and(|c| c.is_alphanumeric() || c == '_');
    let lead = if is_word(term.trim().chars().next()) { r"\b" } else { "" };
    let tail = if is_word(term.trim().chars().last()) { r"\b" } else { "" };
    regex::Regex::new(&format!("(?i){lead}{body}{tail}")).ok()
}

fn dedupe_terms<'a>(terms: impl IntoIterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = std::collections::HashSet::new();
    terms
        .into_iter()
        .filter(|t| !t.trim().is_empty() && seen.insert(fold(t)))
        .collect()
}

/// Counts how often any of `terms` occurs in `text`.
pub fn count_occurrences(text: &str, terms: &[&str], config: &MatchConfig) -> Occurrences {
    let prepared = PreparedText::new(text);
    let compiled: Vec<CompiledTerm> = dedupe_terms(terms.iter().copied())
        .into_iter()
        .map(|t| CompiledTerm::new(t, config.method))
        .collect();
    count_compiled(&compiled, &prepared, config)
}

fn count_compiled(terms: &[CompiledTerm], text: &PreparedText<'_>, config: &MatchConfig) -> Occurrences {
    let mut out = Occurrences::default();
    for term in terms {
        let count = term.count(text, config);
        if count > 0 {
            out.total += count;
            out.matched_terms.push(TermCount {
                term: term.term.clone(),
                count,
            });
        }
    }
    out
}

/// Compiled search terms for every concept of a taxonomy.
pub struct Matcher {
    config: MatchConfig,
    concepts: Vec<(ConceptId, Vec<CompiledTerm>)>,
}

impl Matcher {
    pub fn new(taxonomy: &Taxonomy, config: MatchConfig) -> Result<Self> {
        config.validate()?;
        let concepts = taxonomy
            .concepts()
            .map(|concept| {
                let mut terms = vec![concept.name.as_str()];
                if config.use_synonyms {
                    terms.extend(taxonomy.synonyms_of(&concept.id));
                }
                let compiled = dedupe_terms(terms)
                    .into_iter()
                    .map(|t| CompiledTerm::new(t, config.method))
                    .collect();
                (concept.id.clone(), compiled)
            })
            .collect();
        Ok(Self { config, concepts })
    }

    pub fn config(&self) -> &MatchConfig {
        &self.config
    }

    /// Occurrence counts for every concept, in taxonomy order, ignoring MOC.
    pub fn count_all(&self, text: &str) -> Vec<(ConceptId, Occurrences)> {
        let prepared = PreparedText::new(text);
        self.concepts
            .iter()
            .map(|(id, terms)| (id.clone(), count_compiled(terms, &prepared, &self.config)))
            .collect()
    }

    /// Suggestions for one text, most frequent first.
    pub fn suggest_text(&self, paper_id: &PaperId, text: &str) -> Vec<MappingSuggestion> {
        let mut out: Vec<MappingSuggestion> = self
            .count_all(text)
            .into_iter()
            .filter(|(_, occ)| occ.total >= self.config.moc)
            .map(|(concept_id, occ)| MappingSuggestion {
                paper_id: paper_id.clone(),
                concept_id,
                occurrence_count: occ.total,
                matched_terms: occ.matched_terms,
                method: self.config.method,
            })
            .collect();
        // Stable: equal counts keep taxonomy order.
        out.sort_by_key(|s| std::cmp::Reverse(s.occurrence_count));
        out
    }

    pub fn suggest(&self, paper: &Paper) -> Vec<MappingSuggestion> {
        self.suggest_text(&paper.id, &paper.match_text())
    }
}

/// Suggested concept mappings for one paper.
pub fn suggest_mappings(
    paper: &Paper,
    taxonomy: &Taxonomy,
    config: &MatchConfig,
) -> Result<Vec<MappingSuggestion>> {
    Ok(Matcher::new(taxonomy, *config)?.suggest(paper))
}

/// Suggestions for every paper of `taxonomy`, or only for `papers` when
/// given, ordered by paper id and then by descending occurrence count.
pub fn suggest_for_taxonomy(
    taxonomy: &Taxonomy,
    config: &MatchConfig,
    papers: Option<&[PaperId]>,
) -> Result<Vec<MappingSuggestion>> {
    let matcher = Matcher::new(taxonomy, *config)?;
    let mut selected: Vec<&Paper> = match papers {
        Some(ids) => ids
            .iter()
            .map(|id| taxonomy.require_paper(id))
            .collect::<Result<_>>()?,
        None => taxonomy.papers().collect(),
    };
    selected.sort_by(|a, b| a.id.cmp(&b.id));
    selected.dedup_by(|a, b| a.id == b.id);
    Ok(selected.into_iter().flat_map(|p| matcher.suggest(p)).collect())
}

impl Taxonomy {
    /// Stores suggestions as automatic mappings. Manual mappings are kept.
    /// Returns how many mappings changed.
    pub fn apply_suggestions(&mut self, suggestions: &[MappingSuggestion]) -> Result<usize> {
        for s in suggestions {
            self.require_paper(&s.paper_id)?;
            self.require_concept(&s.concept_id)?;
        }
        let mut changed = 0;
        for s in suggestions {
            let outcome = self.upsert_mapping(Mapping {
                paper_id: s.paper_id.clone(),
                concept_id: s.concept_id.clone(),
                provenance: Provenance::Auto(s.method),
                occurrence_count: s.occurrence_count,
            });
            changed += usize::from(outcome.changed);
        }
        if changed > 0 {
            self.bump();
        }
        Ok(changed)
    }

    /// Suggestions not yet reflected by an existing mapping.
    pub fn suggestion_delta<'a>(&self, suggestions: &'a [MappingSuggestion]) -> Vec<&'a MappingSuggestion> {
        suggestions
            .iter()
            .filter(|s| self.mapping(&s.paper_id, &s.concept_id).is_none())
            .collect()
    }
}
