//! Nested-circle layout of the concept hierarchy.
//!
//! Every concept becomes a circle of radius `k[depth] * sqrt(1 + leaves)`,
//! where `leaves` is its number of leaf descendants. Children are packed
//! inside their parent along a golden-angle spiral: the i-th child travels
//! outwards along angle `i * GOLDEN_ANGLE` until it clears every sibling
//! already placed. The per-depth scale `k` is chosen bottom-up as the
//! smallest value that fits every packed child set at that depth. Root
//! circles of each dimension are packed the same way into a group, and the
//! groups sit left to right on the x axis.

use serde::Serialize;

use crate::ids::{ConceptId, DimensionId};
use crate::taxonomy::{HierarchyNode, Position, Taxonomy};

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
/// Extra room between a packed child set and its parent's rim.
const CONTAINMENT_PAD: f64 = 1.05;
/// Gap between sibling rims, relative to the smaller sibling.
const SIBLING_GAP: f64 = 0.05;
/// Gap between dimension groups, relative to the larger group.
const GROUP_GAP: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Circle {
    pub concept_id: ConceptId,
    pub dimension_id: DimensionId,
    pub center: Position,
    pub radius: f64,
    pub depth: usize,
}

/// Bounding circle of one dimension's root circles.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionGroup {
    pub dimension_id: DimensionId,
    pub center: Position,
    pub radius: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CircleLayout {
    /// Non-empty dimensions, left to right.
    pub groups: Vec<DimensionGroup>,
    /// One circle per concept, parents before children.
    pub circles: Vec<Circle>,
}

impl CircleLayout {
    pub fn circle(&self, concept: &ConceptId) -> Option<&Circle> {
        self.circles.iter().find(|c| &c.concept_id == concept)
    }
}

/// Flattened hierarchy node used during layout.
struct Slot<'a> {
    node: &'a HierarchyNode,
    depth: usize,
    children: Vec<usize>,
    leaves: usize,
    radius: f64,
    /// Child offsets relative to this node's centre, parallel to `children`.
    offsets: Vec<(f64, f64)>,
}

/// Places circles of the given radii around the origin without overlap.
/// Returns centre offsets in input order and the radius of the smallest
/// origin-centred circle enclosing them all.
fn pack(radii: &[f64]) -> (Vec<(f64, f64)>, f64) {
    let mut order: Vec<usize> = (0..radii.len()).collect();
    // Largest first packs tighter; ties keep input order.
    order.sort_by(|&a, &b| radii[b].total_cmp(&radii[a]));
    let mut centres = vec![(0.0, 0.0); radii.len()];
    let mut placed: Vec<usize> = Vec::with_capacity(radii.len());
    for (step, &i) in order.iter().enumerate() {
        let angle = step as f64 * GOLDEN_ANGLE;
        let (ux, uy) = (angle.cos(), angle.sin());
        // Each placed circle forbids an open interval of distances along the ray.
        let forbidden: Vec<(f64, f64)> = placed
            .iter()
            .filter_map(|&j| {
                let (px, py) = centres[j];
                let reach = radii[i] + radii[j] + SIBLING_GAP * radii[i].min(radii[j]);
                let b = ux * px + uy * py;
                let c = px * px + py * py - reach * reach;
                let disc = b * b - c;
                (disc > 0.0).then(|| (b - disc.sqrt(), b + disc.sqrt()))
            })
            .collect();
        let mut t: f64 = 0.0;
        while let Some(&(_, hi)) = forbidden.iter().find(|&&(lo, hi)| lo < t + 1e-12 && t < hi) {
            t = hi * (1.0 + 1e-12) + 1e-12;
        }
        centres[i] = (t * ux, t * uy);
        placed.push(i);
    }
    let enclosing = centres
        .iter()
        .zip(radii)
        .map(|(&(x, y), r)| x.hypot(y) + r)
        .fold(0.0, f64::max);
    (centres, enclosing)
}

pub fn cropcircles_layout(tax: &Taxonomy) -> CircleLayout {
    let hierarchy = tax.hierarchy();
    let mut slots: Vec<Slot> = Vec::new();
    let mut roots_by_dim: Vec<(DimensionId, Vec<usize>)> = Vec::new();
    for tree in &hierarchy.dimensions {
        let mut roots = Vec::new();
        for root in &tree.roots {
            roots.push(flatten(root, 0, &mut slots));
        }
        roots_by_dim.push((tree.dimension_id.clone(), roots));
    }
    if slots.is_empty() {
        return CircleLayout::default();
    }

    // Children always come after their parent in `slots`, so a reverse scan is
    // bottom-up.
    for i in (0..slots.len()).rev() {
        let leaves = if slots[i].children.is_empty() {
            0
        } else {
            slots[i]
                .children
                .iter()
                .map(|&c| slots[c].leaves.max(1))
                .sum()
        };
        slots[i].leaves = leaves;
    }
    let max_depth = slots.iter().map(|s| s.depth).max().unwrap_or(0);
    for depth in (0..=max_depth).rev() {
        let mut k: f64 = 1.0;
        let mut first = true;
        for i in 0..slots.len() {
            if slots[i].depth != depth || slots[i].children.is_empty() {
                continue;
            }
            let radii: Vec<f64> = slots[i].children.iter().map(|&c| slots[c].radius).collect();
            let (offsets, enclosing) = pack(&radii);
            let needed = enclosing * CONTAINMENT_PAD / (1.0 + slots[i].leaves as f64).sqrt();
            k = if first { needed } else { k.max(needed) };
            first = false;
            slots[i].offsets = offsets;
        }
        for slot in slots.iter_mut().filter(|s| s.depth == depth) {
            slot.radius = k * (1.0 + slot.leaves as f64).sqrt();
        }
    }

    let mut layout = CircleLayout::default();
    let mut cursor: Option<(f64, f64)> = None; // (centre x, radius) of the previous group
    for (dimension_id, roots) in roots_by_dim {
        if roots.is_empty() {
            continue;
        }
        let radii: Vec<f64> = roots.iter().map(|&r| slots[r].radius).collect();
        let (offsets, radius) = pack(&radii);
        let cx = match cursor {
            None => 0.0,
            Some((prev_x, prev_r)) => prev_x + prev_r + GROUP_GAP * prev_r.max(radius) + radius,
        };
        cursor = Some((cx, radius));
        layout.groups.push(DimensionGroup {
            dimension_id,
            center: Position { x: cx, y: 0.0 },
            radius,
        });
        for (&root, (dx, dy)) in roots.iter().zip(offsets) {
            place(&slots, root, (cx + dx, dy), tax, &mut layout.circles);
        }
    }
    layout
}

fn flatten<'a>(node: &'a HierarchyNode, depth: usize, slots: &mut Vec<Slot<'a>>) -> usize {
    let index = slots.len();
    slots.push(Slot {
        node,
        depth,
        children: Vec::new(),
        leaves: 0,
        radius: 0.0,
        offsets: Vec::new(),
    });
    let children: Vec<usize> = node
        .children
        .iter()
        .map(|child| flatten(child, depth + 1, slots))
        .collect();
    slots[index].children = children;
    index
}

fn place(slots: &[Slot], index: usize, centre: (f64, f64), tax: &Taxonomy, out: &mut Vec<Circle>) {
    let slot = &slots[index];
    let concept_id = slot.node.concept_id.clone();
    let dimension_id = tax
        .concept(&concept_id)
        .map(|c| c.dimension_id.clone())
        .expect("hierarchy nodes are concepts");
    out.push(Circle {
        concept_id,
        dimension_id,
        center: Position {
            x: centre.0,
            y: centre.1,
        },
        radius: slot.radius,
        depth: slot.depth,
    });
    for (&child, &(dx, dy)) in slot.children.iter().zip(&slot.offsets) {
        place(slots, child, (centre.0 + dx, centre.1 + dy), tax, out);
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::taxonomy::ConceptKind;

    fn dist(a: &Position, b: &Position) -> f64 {
        (a.x - b.x).hypot(a.y - b.y)
    }

    #[test]
    fn empty_and_single() {
        let mut tax = Taxonomy::new("t").unwrap();
        assert_eq!(cropcircles_layout(&tax), CircleLayout::default());
        let a = leaf(&mut tax, "A");
        let layout = cropcircles_layout(&tax);
        assert_eq!(layout.circles.len(), 1);
        let c = layout.circle(&a).unwrap();
        assert_eq!((c.center.x, c.center.y), (0.0, 0.0));
        assert!(c.radius > 0.0);
    }

    #[test]
    fn parent_with_two_children() {
        let mut tax = Taxonomy::new("t").unwrap();
        let p = leaf(&mut tax, "P");
        let a = child(&mut tax, &p, "A");
        let b = child(&mut tax, &p, "B");
        let layout = cropcircles_layout(&tax);
        let (cp, ca, cb) = (layout.circle(&p).unwrap(), layout.circle(&a).unwrap(), layout.circle(&b).unwrap());
        for kid in [ca, cb] {
            assert!(dist(&cp.center, &kid.center) + kid.radius < cp.radius);
            assert!(cp.radius > kid.radius);
            assert_eq!(kid.depth, 1);
        }
        assert!(dist(&ca.center, &cb.center) > ca.radius + cb.radius);
    }

    #[test]
    fn dimension_groups_left_to_right() {
        let mut tax = Taxonomy::new("t").unwrap();
        leaf(&mut tax, "Solo");
        let dim = tax.add_dimension("Second", "").unwrap();
        for name in ["X", "Y", "Z"] {
            tax.add_concept(&dim, name, ConceptKind::Node).unwrap();
        }
        let layout = cropcircles_layout(&tax);
        assert_eq!(layout.groups.len(), 2);
        let (g0, g1) = (&layout.groups[0], &layout.groups[1]);
        assert!(g0.center.x < g1.center.x);
        let gap = dist(&g0.center, &g1.center) - g0.radius - g1.radius;
        assert!(gap >= 0.1 * g0.radius.max(g1.radius) - 1e-9);
        for c in &layout.circles {
            let g = layout.groups.iter().find(|g| g.dimension_id == c.dimension_id).unwrap();
            assert!(dist(&g.center, &c.center) + c.radius <= g.radius + 1e-9);
        }
    }

    #[test]
    fn pack_separates_equal_circles() {
        let radii = vec![1.0; 12];
        let (centres, enclosing) = pack(&radii);
        for i in 0..12 {
            for j in i + 1..12 {
                let d = (centres[i].0 - centres[j].0).hypot(centres[i].1 - centres[j].1);
                assert!(d > 2.0, "{i} {j} {d}");
            }
        }
        assert!(enclosing < 6.0, "{enclosing}");
    }
}
