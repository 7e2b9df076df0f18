use std::collections::BTreeSet;

use proptest::prelude::*;
use taas_core::analysis::{build_matrix, coverage_report, Filter};
use taas_core::matcher::{
    conformity, count_occurrences, dice_similarity, fuzzy_score, levenshtein_distance, normalize, MatchConfig,
    MatchMethod, PairSet,
};
use taas_core::review::PaperRecord;
use taas_core::{ConceptId, ConceptKind, PaperId, Provenance, RelationType, Taxonomy};

fn short() -> impl Strategy<Value = String> {
    "[a-dA-D ]{0,12}"
}

type Shape = (usize, Vec<(usize, usize)>, Vec<(usize, usize)>);

/// Concept count, child-to-earlier-parent edges and paper-to-concept mappings.
fn shape() -> impl Strategy<Value = Shape> {
    (1usize..15).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((1..n.max(2), 0..n), 0..20),
            prop::collection::vec((0usize..8, 0..n), 0..25),
        )
    })
}

fn build(n: usize, edges: &[(usize, usize)], maps: &[(usize, usize)]) -> (Taxonomy, Vec<ConceptId>) {
    let mut tax = Taxonomy::new("prop").unwrap();
    let dim = tax.add_dimension("d", "").unwrap();
    let concepts: Vec<ConceptId> = (0..n)
        .map(|i| tax.add_concept(&dim, &format!("c{i}"), ConceptKind::Node).unwrap())
        .collect();
    for &(child, parent) in edges {
        if child < n {
            let parent = parent % child;
            let _ = tax.add_relation(&concepts[child], &concepts[parent], RelationType::Composition, "");
        }
    }
    tax.import_papers((0..8).map(|i| PaperRecord::titled(&format!("paper {i}"))).collect());
    let papers: Vec<PaperId> = tax.papers().map(|p| p.id.clone()).collect();
    for &(p, c) in maps {
        tax.map_paper(&papers[p], &concepts[c], Provenance::Manual, 0).unwrap();
    }
    (tax, concepts)
}

proptest! {
    #[test]
    fn dice_is_symmetric_and_bounded(a in short(), b in short()) {
        let d = dice_similarity(&a, &b);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, dice_similarity(&b, &a));
        prop_assert_eq!(dice_similarity(&a, &a.to_uppercase()), 1.0);
    }

    #[test]
    fn levenshtein_is_bounded_by_lengths(a in short(), b in short()) {
        let (la, lb) = (a.chars().count(), b.chars().count());
        let d = levenshtein_distance(&a, &b);
        prop_assert!(la.abs_diff(lb) <= d && d <= la.max(lb));
    }

    #[test]
    fn fuzzy_score_finds_subsequences(a in "[a-d]{1,6}", b in "[a-d]{0,12}") {
        prop_assert_eq!(fuzzy_score(&a, &a), Some(0));
        let mut rest = b.chars();
        let is_subsequence = a.chars().all(|c| rest.any(|d| d == c));
        prop_assert_eq!(fuzzy_score(&a, &b).is_some(), is_subsequence);
        if let Some(score) = fuzzy_score(&a, &b) {
            prop_assert!(score <= 0);
        }
    }

    #[test]
    fn normalize_is_stable(text in "[a-zA-Z0-9 .,;-]{0,40}") {
        let once = normalize(&text);
        prop_assert_eq!(normalize(&once.join(" ")), once.clone());
        prop_assert!(once.iter().all(|t| !t.is_empty() && t.chars().all(char::is_alphanumeric)));
    }

    #[test]
    fn exact_match_counts_agree(words in prop::collection::vec("(alpha|beta|gamma|delta)", 0..30)) {
        let text = words.join(" ");
        let want = words.iter().filter(|w| *w == "gamma").count() as u32;
        let configs = [
            MatchConfig::new(MatchMethod::Regex),
            MatchConfig::new(MatchMethod::Dice).with_threshold(1.0),
            MatchConfig::new(MatchMethod::Levenshtein).with_threshold(0.0),
            MatchConfig::new(MatchMethod::Fuzzysort).with_threshold(0.0),
        ];
        for config in configs {
            prop_assert_eq!(count_occurrences(&text, &["Gamma"], &config).total, want, "{}", config.method);
        }
    }

    #[test]
    fn conformity_is_a_percentage(
        auto in prop::collection::btree_set((0u8..5, 0u8..5), 0..15),
        manual in prop::collection::btree_set((0u8..5, 0u8..5), 1..15),
    ) {
        let to_pairs = |s: &BTreeSet<(u8, u8)>| -> PairSet {
            s.iter()
                .map(|(p, c)| (PaperId::from(format!("p{p}")), ConceptId::from(format!("c{c}"))))
                .collect()
        };
        let (auto, manual) = (to_pairs(&auto), to_pairs(&manual));
        let pct = conformity(&auto, &manual).unwrap();
        prop_assert!((0.0..=100.0).contains(&pct));
        prop_assert_eq!(conformity(&manual, &manual).unwrap(), 100.0);
    }

    #[test]
    fn documents_round_trip((n, edges, maps) in shape()) {
        let (tax, _) = build(n, &edges, &maps);
        let json = tax.to_json();
        let back = Taxonomy::from_json(&json).unwrap();
        prop_assert_eq!(back.to_json(), json);
        prop_assert_eq!(back.hierarchy(), tax.hierarchy());
    }

    #[test]
    fn matrix_rows_nest_under_parents((n, edges, maps) in shape()) {
        let (tax, concepts) = build(n, &edges, &maps);
        let m = build_matrix(&tax, &Filter::default());
        let h = tax.hierarchy();
        prop_assert_eq!(m.len(), n);
        for c in &concepts {
            if let Some(p) = h.parent(c) {
                // Every paper counted for a child is counted for its parent.
                prop_assert_eq!(m.cell(c, p), m.cell(c, c));
                prop_assert!(m.cell(c, c) <= m.cell(p, p));
            }
        }
        let coverage = coverage_report(&tax);
        for entry in &coverage.entries {
            prop_assert_eq!(Some(entry.paper_count), m.cell(&entry.concept_id, &entry.concept_id));
        }
    }

    #[test]
    fn merging_an_untouched_fork_adds_nothing((n, edges, maps) in shape()) {
        let (mut tax, _) = build(n, &edges, &maps);
        let fork = tax.fork();
        let before = tax.to_document();
        let report = tax.merge_fork(&fork).unwrap();
        prop_assert!(report.is_empty(), "{:?}", report);
        let mut after = tax.to_document();
        after.taxonomy.version = before.taxonomy.version;
        prop_assert_eq!(serde_json::to_string(&after).unwrap(), serde_json::to_string(&before).unwrap());
    }
}
