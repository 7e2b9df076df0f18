use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{paper_memberships, CorrelationMatrix, Filter};
use crate::error::{Error, Result};
use crate::ids::ConceptId;
use crate::taxonomy::Taxonomy;

/// Paper property aggregated on the z axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceProperty {
    CitationSum,
    CitationMax,
    PaperCount,
}

impl SurfaceProperty {
    pub const ALL: [SurfaceProperty; 3] = [
        SurfaceProperty::CitationSum,
        SurfaceProperty::CitationMax,
        SurfaceProperty::PaperCount,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SurfaceProperty::CitationSum => "citation_sum",
            SurfaceProperty::CitationMax => "citation_max",
            SurfaceProperty::PaperCount => "paper_count",
        }
    }
}

impl fmt::Display for SurfaceProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SurfaceProperty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        SurfaceProperty::ALL
            .into_iter()
            .find(|p| p.as_str() == wanted)
            .ok_or_else(|| Error::UnknownVariant {
                kind: "surface property",
                value: s.to_owned(),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfacePoint {
    pub x: ConceptId,
    pub y: ConceptId,
    pub z: u64,
}

/// One point per matrix cell, row-major over `base.axis`. Cells suppressed by
/// the filter's `min_cell` have `z = 0` for every property.
pub fn build_surface(
    tax: &Taxonomy,
    filter: &Filter,
    property: SurfaceProperty,
    base: &CorrelationMatrix,
) -> Result<Vec<SurfacePoint>> {
    if base.taxonomy_id != *tax.id()
        || base.taxonomy_version != tax.version()
        || base.filter_fingerprint != filter.fingerprint()
    {
        return Err(Error::StaleMatrix {
            matrix: base.taxonomy_version,
            taxonomy: tax.version(),
        });
    }
    let n = base.len();
    let mut z = vec![vec![0u64; n]; n];
    if property == SurfaceProperty::PaperCount {
        z.clone_from(&base.cells);
    } else {
        for (paper, slots) in paper_memberships(tax, &base.axis_tree, &base.axis, filter) {
            let value = paper.citation_count;
            for &i in &slots {
                for &j in &slots {
                    let cell = &mut z[i][j];
                    *cell = match property {
                        SurfaceProperty::CitationSum => *cell + value,
                        _ => (*cell).max(value),
                    };
                }
            }
        }
        for (i, row) in z.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if base.cells[i][j] == 0 {
                    *cell = 0;
                }
            }
        }
    }
    let mut points = Vec::with_capacity(n * n);
    for (i, row) in z.into_iter().enumerate() {
        for (j, value) in row.into_iter().enumerate() {
            points.push(SurfacePoint {
                x: base.axis[i].clone(),
                y: base.axis[j].clone(),
                z: value,
            });
        }
    }
    Ok(points)
}
