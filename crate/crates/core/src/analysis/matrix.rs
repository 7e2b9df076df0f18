use serde::Serialize;

use super::{paper_memberships, Filter};
use crate::ids::{ConceptId, TaxonomyId};
use crate::taxonomy::{Hierarchy, Taxonomy};

/// Hierarchy-matrix: cell `(i, j)` counts the papers in both
/// `papers*(axis[i])` and `papers*(axis[j])`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub taxonomy_id: TaxonomyId,
    pub taxonomy_version: u64,
    pub filter_fingerprint: String,
    /// Concept ids in depth-first hierarchy order.
    pub axis: Vec<ConceptId>,
    pub labels: Vec<String>,
    pub depths: Vec<usize>,
    pub cells: Vec<Vec<u64>>,
    pub axis_tree: Hierarchy,
}

impl CorrelationMatrix {
    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    pub fn index_of(&self, concept: &ConceptId) -> Option<usize> {
        self.axis.iter().position(|c| c == concept)
    }

    pub fn cell(&self, a: &ConceptId, b: &ConceptId) -> Option<u64> {
        Some(self.cells[self.index_of(a)?][self.index_of(b)?])
    }

    /// CSV with concept names as header row and first column.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let header = std::iter::once("").chain(self.labels.iter().map(String::as_str));
        writer.write_record(header).expect("in-memory write");
        for (label, row) in self.labels.iter().zip(&self.cells) {
            let record = std::iter::once(label.clone()).chain(row.iter().map(u64::to_string));
            writer.write_record(record).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

pub fn build_matrix(tax: &Taxonomy, filter: &Filter) -> CorrelationMatrix {
    let hierarchy = tax.hierarchy();
    let (axis, depths): (Vec<ConceptId>, Vec<usize>) = filter.axis(tax, &hierarchy).into_iter().unzip();
    let n = axis.len();
    let mut cells = vec![vec![0u64; n]; n];
    // Each paper adds one to every pair of axis concepts whose subtree holds it.
    for (_, slots) in paper_memberships(tax, &hierarchy, &axis, filter) {
        for (k, &i) in slots.iter().enumerate() {
            cells[i][i] += 1;
            for &j in &slots[k + 1..] {
                cells[i][j] += 1;
                cells[j][i] += 1;
            }
        }
    }
    if filter.min_cell > 0 {
        for value in cells.iter_mut().flatten() {
            if *value < filter.min_cell {
                *value = 0;
            }
        }
    }
    let labels = axis
        .iter()
        .map(|id| tax.concept(id).map(|c| c.name.clone()).unwrap_or_default())
        .collect();
    CorrelationMatrix {
        taxonomy_id: tax.id().clone(),
        taxonomy_version: tax.version(),
        filter_fingerprint: filter.fingerprint(),
        axis,
        labels,
        depths,
        cells,
        axis_tree: hierarchy,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::super::fixtures::*;
    use super::*;
    use crate::ids::DimensionId;
    use crate::taxonomy::ConceptKind;

    #[test]
    fn two_leaves() {
        let mut tax = Taxonomy::new("t").unwrap();
        papers(&mut tax, &[("p1", 0), ("p2", 0), ("p3", 0)]);
        let a = leaf(&mut tax, "A");
        let b = leaf(&mut tax, "B");
        map(&mut tax, "p1", &a);
        map(&mut tax, "p2", &a);
        map(&mut tax, "p2", &b);
        map(&mut tax, "p3", &b);
        let m = build_matrix(&tax, &Filter::default());
        assert_eq!(m.cells, vec![vec![2, 1], vec![1, 2]]);
        let m = build_matrix(
            &tax,
            &Filter {
                min_cell: 2,
                ..Filter::default()
            },
        );
        assert_eq!(m.cell(&a, &b), Some(0));
        assert_eq!(m.cell(&a, &a), Some(2));
    }

    #[test]
    fn single_concept_and_empty() {
        let mut tax = Taxonomy::new("t").unwrap();
        assert!(build_matrix(&tax, &Filter::default()).is_empty());
        papers(&mut tax, &[("p1", 0)]);
        let a = leaf(&mut tax, "A");
        map(&mut tax, "p1", &a);
        assert_eq!(build_matrix(&tax, &Filter::default()).cells, vec![vec![1]]);
    }

    #[test]
    fn axis_follows_hierarchy_and_filters() {
        let mut tax = Taxonomy::new("t").unwrap();
        let z = leaf(&mut tax, "Z");
        let root = leaf(&mut tax, "Root");
        let kid = child(&mut tax, &root, "Kid");
        let other_dim = tax.add_dimension("Other", "").unwrap();
        let x = tax.add_concept(&other_dim, "X", ConceptKind::Node).unwrap();
        // "Kid" was added after "Root" but still sits right below it; "Z" keeps
        // its place as the first root.
        let m = build_matrix(&tax, &Filter::default());
        assert_eq!(m.axis, vec![z.clone(), root.clone(), kid.clone(), x.clone()]);
        assert_eq!(m.depths, vec![0, 0, 1, 0]);

        let dims: BTreeSet<DimensionId> = [other_dim].into();
        let m = build_matrix(
            &tax,
            &Filter {
                dimensions: Some(dims),
                ..Filter::default()
            },
        );
        assert_eq!(m.axis, vec![x]);
        let m = build_matrix(
            &tax,
            &Filter {
                subtree_roots: Some([root.clone()].into()),
                ..Filter::default()
            },
        );
        assert_eq!(m.axis, vec![root, kid]);
    }

    #[test]
    fn csv_export_uses_names() {
        let mut tax = Taxonomy::new("t").unwrap();
        papers(&mut tax, &[("p1", 0)]);
        let a = leaf(&mut tax, "Alpha");
        leaf(&mut tax, "Beta, Gamma");
        map(&mut tax, "p1", &a);
        let csv = build_matrix(&tax, &Filter::default()).to_csv();
        assert_eq!(csv, ",Alpha,\"Beta, Gamma\"\nAlpha,1,0\n\"Beta, Gamma\",0,0\n");
    }
}
