//! Seeded synthetic corpora for matcher evaluation.
//!
//! Each paper's text is generic filler with a few concept names planted in
//! it. A fixed share of the planted occurrences carry a single-character typo
//! (substitution, deletion or insertion of a lowercase letter), which a
//! whole-word regular expression cannot see but edit-distance matchers can.
//! The planted `(paper, concept)` pairs form the manual baseline.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Corpus, PairSet};
use crate::error::{Error, Result};
use crate::ids::{ConceptId, PaperId};
use crate::review::PaperRecord;
use crate::taxonomy::{ConceptKind, Taxonomy};

/// Concept names drawn from software integrity protection.
pub const CONCEPT_NAMES: [&str; 24] = [
    "Code Obfuscation",
    "Remote Attestation",
    "Control Flow Integrity",
    "Software Guards",
    "Tamper Proofing",
    "Whitebox Cryptography",
    "Oblivious Hashing",
    "Code Virtualization",
    "Integrity Verification",
    "Binary Rewriting",
    "Reverse Engineering",
    "Dynamic Analysis",
    "Static Analysis",
    "Symbolic Execution",
    "Trusted Execution Environment",
    "Code Signing",
    "Software Diversity",
    "Self Checksumming",
    "Anti Debugging",
    "Hardware Security Module",
    "Return Oriented Programming",
    "Memory Safety",
    "License Checking",
    "Instruction Set Randomization",
];

const FILLER: [&str; 40] = [
    "the", "we", "propose", "approach", "results", "show", "that", "our", "method", "improves",
    "over", "prior", "work", "in", "terms", "of", "overhead", "and", "coverage", "this", "paper",
    "evaluates", "a", "prototype", "on", "several", "benchmarks", "with", "moderate", "cost",
    "experiments", "indicate", "practical", "deployment", "is", "feasible", "for", "real",
    "programs", "today",
];

const DIMENSIONS: [&str; 4] = ["Asset", "Attack", "Defense", "Tooling"];

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub papers: usize,
    pub concepts: usize,
    /// Share of planted occurrences that get a typo, in `[0, 1]`.
    pub typo_rate: f64,
    /// Planted occurrences per mapped pair, inclusive range.
    pub plants: (u32, u32),
    /// Concepts planted per paper, inclusive range.
    pub concepts_per_paper: (usize, usize),
    /// Filler words per paper.
    pub filler_words: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            papers: 50,
            concepts: 20,
            typo_rate: 0.3,
            plants: (4, 8),
            concepts_per_paper: (2, 4),
            filler_words: 150,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    /// Concepts and registered papers, without mappings.
    pub taxonomy: Taxonomy,
    pub corpus: Corpus,
    pub baseline: PairSet,
    pub planted: usize,
    pub typos: usize,
}

/// Applies one random single-character edit inside a word of at least four
/// letters.
fn typo(name: &str, rng: &mut impl Rng) -> String {
    let words: Vec<&str> = name.split(' ').collect();
    let candidates: Vec<usize> = (0..words.len()).filter(|&i| words[i].chars().count() >= 4).collect();
    let w = *candidates.choose(rng).expect("names contain a word of four letters");
    let mut chars: Vec<char> = words[w].chars().collect();
    let pos = rng.random_range(0..chars.len());
    fn letter(rng: &mut impl Rng) -> char {
        (b'a' + rng.random_range(0..26u8)) as char
    }
    match rng.random_range(0..3) {
        0 => {
            let original = chars[pos].to_ascii_lowercase();
            let mut c = letter(rng);
            while c == original {
                c = letter(rng);
            }
            chars[pos] = c;
        }
        1 => {
            chars.remove(pos);
        }
        _ => {
            let c = letter(rng);
            chars.insert(pos, c);
        }
    }
    let edited: String = chars.into_iter().collect();
    words
        .iter()
        .enumerate()
        .map(|(i, word)| if i == w { edited.as_str() } else { word })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn generate(spec: &SyntheticSpec, seed: u64) -> Result<SyntheticCorpus> {
    if spec.concepts == 0 || spec.concepts > CONCEPT_NAMES.len() {
        return Err(Error::validation(
            "concepts",
            format!("must be between 1 and {}", CONCEPT_NAMES.len()),
        ));
    }
    if !(0.0..=1.0).contains(&spec.typo_rate) {
        return Err(Error::validation("typo_rate", "must be within [0, 1]"));
    }
    let (lo, hi) = spec.concepts_per_paper;
    if lo == 0 || lo > hi || hi > spec.concepts || spec.plants.0 == 0 || spec.plants.0 > spec.plants.1 {
        return Err(Error::validation("spec", "inconsistent ranges"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taxonomy = Taxonomy::new("synthetic")?;
    let dims: Vec<_> = DIMENSIONS
        .iter()
        .map(|d| taxonomy.add_dimension(d, ""))
        .collect::<Result<_>>()?;
    let concepts: Vec<(ConceptId, &str)> = CONCEPT_NAMES[..spec.concepts]
        .iter()
        .enumerate()
        .map(|(i, name)| {
            taxonomy
                .add_concept(&dims[i % dims.len()], name, ConceptKind::Node)
                .map(|id| (id, *name))
        })
        .collect::<Result<_>>()?;

    // Build each paper as a list of segments; remember which are plants.
    let mut papers: Vec<(PaperId, Vec<String>)> = Vec::new();
    let mut plant_slots: Vec<(usize, usize, &str)> = Vec::new();
    let mut baseline = PairSet::new();
    for p in 0..spec.papers {
        let paper_id = PaperId::from(format!("p{:03}", p + 1));
        let mut segments: Vec<String> = (0..spec.filler_words)
            .map(|_| (*FILLER.choose(&mut rng).expect("non-empty")).to_owned())
            .collect();
        let k = rng.random_range(lo..=hi);
        let chosen: Vec<&(ConceptId, &str)> = concepts.choose_multiple(&mut rng, k).collect();
        let mut plants: Vec<&str> = Vec::new();
        for (concept, name) in chosen {
            baseline.insert((paper_id.clone(), concept.clone()));
            for _ in 0..rng.random_range(spec.plants.0..=spec.plants.1) {
                plants.push(name);
            }
        }
        for name in plants {
            let at = rng.random_range(0..=segments.len());
            let text = if rng.random_bool(0.5) {
                name.to_owned()
            } else {
                name.to_lowercase()
            };
            segments.insert(at, text);
            plant_slots.push((p, at, name));
            // Later inserts shift earlier slots of this paper.
            let len = plant_slots.len();
            for slot in plant_slots[..len - 1].iter_mut().filter(|s| s.0 == p && s.1 >= at) {
                slot.1 += 1;
            }
        }
        papers.push((paper_id, segments));
    }

    let typos = (spec.typo_rate * plant_slots.len() as f64).round() as usize;
    let mut order: Vec<usize> = (0..plant_slots.len()).collect();
    order.shuffle(&mut rng);
    for &slot in &order[..typos] {
        let (p, at, name) = plant_slots[slot];
        let original = papers[p].1[at].clone();
        let mut edited = typo(name, &mut rng);
        if original.chars().next().is_some_and(char::is_lowercase) {
            edited = edited.to_lowercase();
        }
        papers[p].1[at] = edited;
    }

    let records: Vec<PaperRecord> = papers
        .into_iter()
        .map(|(id, segments)| {
            let mut body = String::new();
            for (i, seg) in segments.iter().enumerate() {
                if i > 0 {
                    body.push_str(if i % 17 == 0 { ". " } else { " " });
                }
                body.push_str(seg);
            }
            body.push_str(".\n");
            PaperRecord {
                id: Some(id.to_string()),
                title: Some(format!("Synthetic study {id}")),
                year: Some(2010 + (id.as_str()[1..].parse::<i32>().unwrap_or(0) % 10)),
                body_text: Some(body),
                ..PaperRecord::default()
            }
        })
        .collect();
    taxonomy.import_papers(records.clone());

    Ok(SyntheticCorpus {
        taxonomy,
        corpus: Corpus { papers: records },
        baseline,
        planted: plant_slots.len(),
        typos,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::levenshtein_distance;

    #[test]
    fn typos_are_single_edits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in CONCEPT_NAMES {
            for _ in 0..50 {
                let t = typo(name, &mut rng);
                assert_eq!(levenshtein_distance(name, &t), 1, "{name} -> {t}");
                assert_eq!(t.split(' ').count(), name.split(' ').count());
            }
        }
    }

    #[test]
    fn generation_is_seeded() {
        let spec = SyntheticSpec::default();
        let a = generate(&spec, 11).unwrap();
        let b = generate(&spec, 11).unwrap();
        assert_eq!(a.corpus, b.corpus);
        assert_eq!(a.planted, b.planted);
        assert_eq!(a.typos, (0.3 * a.planted as f64).round() as usize);
        assert_eq!(a.taxonomy.papers().len(), 50);
        assert_eq!(a.taxonomy.concepts().len(), 20);
    }
}
