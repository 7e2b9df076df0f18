//! Parent-child forest derived from inheritance, composition and aggregation
//! relations. Associations and unspecified relations are peer links and are
//! ignored here.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::Taxonomy;
use crate::ids::{ConceptId, DimensionId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HierarchyNode {
    pub concept_id: ConceptId,
    pub children: Vec<HierarchyNode>,
}

/// Root concepts of one dimension with their subtrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionTree {
    pub dimension_id: DimensionId,
    pub roots: Vec<HierarchyNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hierarchy {
    /// One entry per dimension, in taxonomy order.
    pub dimensions: Vec<DimensionTree>,
    /// Concepts with more than one parent. They are attached under the parent
    /// of the earliest inserted relation.
    pub multi_parent: Vec<ConceptId>,
    #[serde(skip)]
    parent: HashMap<ConceptId, ConceptId>,
}

impl Hierarchy {
    pub(crate) fn derive(tax: &Taxonomy) -> Self {
        let mut parent: HashMap<ConceptId, ConceptId> = HashMap::new();
        let mut children: HashMap<&ConceptId, Vec<&ConceptId>> = HashMap::new();
        let mut multi_parent = Vec::new();
        let mut flagged = HashSet::new();
        for relation in tax.relations.values() {
            if !relation.rel_type.is_hierarchical() {
                continue;
            }
            let child = &relation.source_id;
            if parent.contains_key(child) {
                if flagged.insert(child) {
                    multi_parent.push(child.clone());
                }
                continue;
            }
            parent.insert(child.clone(), relation.target_id.clone());
            children.entry(&relation.target_id).or_default().push(child);
        }

        fn build(id: &ConceptId, children: &HashMap<&ConceptId, Vec<&ConceptId>>) -> HierarchyNode {
            HierarchyNode {
                concept_id: id.clone(),
                children: children
                    .get(id)
                    .map(|kids| kids.iter().map(|k| build(k, children)).collect())
                    .unwrap_or_default(),
            }
        }

        let dimensions = tax
            .dimensions
            .values()
            .map(|dim| DimensionTree {
                dimension_id: dim.id.clone(),
                roots: tax
                    .concepts
                    .values()
                    .filter(|c| c.dimension_id == dim.id && !parent.contains_key(&c.id))
                    .map(|c| build(&c.id, &children))
                    .collect(),
            })
            .collect();

        Hierarchy {
            dimensions,
            multi_parent,
            parent,
        }
    }

    /// Parent of `concept` in the forest.
    pub fn parent(&self, concept: &ConceptId) -> Option<&ConceptId> {
        self.parent.get(concept)
    }

    /// Depth-first pre-order walk yielding `(node, depth)`, dimensions in
    /// taxonomy order.
    pub fn preorder(&self) -> Vec<(&HierarchyNode, usize)> {
        let mut out = Vec::new();
        let mut stack: Vec<(&HierarchyNode, usize)> = Vec::new();
        for tree in &self.dimensions {
            for root in tree.roots.iter().rev() {
                stack.push((root, 0));
            }
            while let Some((node, depth)) = stack.pop() {
                out.push((node, depth));
                for child in node.children.iter().rev() {
                    stack.push((child, depth + 1));
                }
            }
        }
        out
    }

    /// Depth-first concept order used for matrix axes.
    pub fn concept_order(&self) -> Vec<ConceptId> {
        self.preorder()
            .into_iter()
            .map(|(n, _)| n.concept_id.clone())
            .collect()
    }

    pub fn find(&self, concept: &ConceptId) -> Option<&HierarchyNode> {
        self.preorder()
            .into_iter()
            .map(|(n, _)| n)
            .find(|n| &n.concept_id == concept)
    }

    /// `concept` followed by all of its descendants.
    pub fn subtree(&self, concept: &ConceptId) -> Vec<ConceptId> {
        let mut out = Vec::new();
        if let Some(node) = self.find(concept) {
            let mut stack = vec![node];
            while let Some(n) = stack.pop() {
                out.push(n.concept_id.clone());
                stack.extend(n.children.iter().rev());
            }
        }
        out
    }

    /// `concept` followed by its ancestors up to the root.
    pub fn ancestors_inclusive<'a>(&'a self, concept: &'a ConceptId) -> Vec<&'a ConceptId> {
        let mut out = vec![concept];
        let mut cur = concept;
        while let Some(p) = self.parent.get(cur) {
            out.push(p);
            cur = p;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::{ConceptKind, RelationType};

    #[test]
    fn children_grouped_under_parent() {
        let mut tax = Taxonomy::new("t").unwrap();
        let dim = tax.dimensions().next().unwrap().id.clone();
        let a = tax.add_concept(&dim, "A", ConceptKind::Node).unwrap();
        let b = tax.add_concept(&dim, "B", ConceptKind::Node).unwrap();
        let c = tax.add_concept(&dim, "C", ConceptKind::Node).unwrap();
        tax.add_relation(&b, &a, RelationType::Inheritance, "").unwrap();
        tax.add_relation(&c, &a, RelationType::Inheritance, "").unwrap();
        let h = tax.hierarchy();
        assert_eq!(h.dimensions[0].roots.len(), 1);
        let root = &h.dimensions[0].roots[0];
        assert_eq!(root.concept_id, a);
        let kids: Vec<_> = root.children.iter().map(|n| n.concept_id.clone()).collect();
        assert_eq!(kids, vec![b, c]);
        assert!(h.multi_parent.is_empty());
    }

    #[test]
    fn associations_do_not_nest() {
        let mut tax = Taxonomy::new("t").unwrap();
        let dim = tax.dimensions().next().unwrap().id.clone();
        let a = tax.add_concept(&dim, "A", ConceptKind::Node).unwrap();
        let b = tax.add_concept(&dim, "B", ConceptKind::Node).unwrap();
        tax.add_relation(&a, &b, RelationType::Association, "").unwrap();
        let h = tax.hierarchy();
        assert_eq!(h.dimensions[0].roots.len(), 2);
        assert_eq!(h.concept_order(), vec![a, b]);
    }

    #[test]
    fn multi_parent_goes_under_first_parent() {
        // Oracle: hand-built 4-node graph. A and B are roots, C has parents A
        // (inserted first) then B, D is a child of C.
        let mut tax = Taxonomy::new("t").unwrap();
        let dim = tax.dimensions().next().unwrap().id.clone();
        let a = tax.add_concept(&dim, "A", ConceptKind::Node).unwrap();
        let b = tax.add_concept(&dim, "B", ConceptKind::Node).unwrap();
        let c = tax.add_concept(&dim, "C", ConceptKind::Node).unwrap();
        let d = tax.add_concept(&dim, "D", ConceptKind::Node).unwrap();
        tax.add_relation(&d, &c, RelationType::Composition, "").unwrap();
        tax.add_relation(&c, &a, RelationType::Inheritance, "").unwrap();
        tax.add_relation(&c, &b, RelationType::Aggregation, "").unwrap();
        let h = tax.hierarchy();
        assert_eq!(h.multi_parent, vec![c.clone()]);
        assert_eq!(h.parent(&c), Some(&a));
        let order: Vec<_> = h.preorder().iter().map(|(n, d)| (n.concept_id.clone(), *d)).collect();
        assert_eq!(order, vec![(a.clone(), 0), (c.clone(), 1), (d.clone(), 2), (b.clone(), 0)]);
        assert_eq!(h.subtree(&a), vec![a.clone(), c.clone(), d.clone()]);
        assert_eq!(h.ancestors_inclusive(&d), vec![&d, &c, &a]);
    }

    #[test]
    fn cross_dimension_child_lives_in_parent_tree() {
        let mut tax = Taxonomy::new("t").unwrap();
        let d0 = tax.dimensions().next().unwrap().id.clone();
        let d1 = tax.add_dimension("Other", "").unwrap();
        let a = tax.add_concept(&d0, "A", ConceptKind::Node).unwrap();
        let b = tax.add_concept(&d1, "B", ConceptKind::Node).unwrap();
        tax.add_relation(&b, &a, RelationType::Inheritance, "").unwrap();
        let h = tax.hierarchy();
        assert_eq!(h.dimensions[0].roots[0].children[0].concept_id, b);
        assert!(h.dimensions[1].roots.is_empty());
        assert_eq!(h.concept_order().len(), 2);
    }
}
