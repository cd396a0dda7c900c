//! JSON dumps of constellations, label tables and transforms.

use polarcm_core::channels::{Constellation, ConstellationKind, LabelingRule};
use polarcm_core::labeling::{qam_sp_to_gray, sp_to_gray_matrix};
use serde::Serialize;

use crate::error::Result;

/// A signal set with both labelings and the SP-to-Gray transform.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableDump {
    /// Tool and version.
    pub tool: String,
    /// `ask` or `qam`.
    pub modulation: String,
    /// Bits per symbol.
    pub bits: usize,
    /// Point coordinates (second coordinate zero on ASK).
    pub points: Vec<[f64; 2]>,
    /// Set-partitioning labels per point, `b_0` first.
    pub sp: Vec<Vec<u8>>,
    /// Gray labels per point.
    pub gray: Vec<Vec<u8>>,
    /// Matrix with `sp · transform = gray`.
    pub transform: Vec<Vec<u8>>,
    /// Minimum distance inside the subsets fixed by the lowest SP bits.
    pub sp_subset_distances: Vec<f64>,
}

/// Builds the dump for one constellation.
pub fn dump(c: &Constellation) -> Result<TableDump> {
    let sp = c.label_table(LabelingRule::SetPartition);
    let gray = c.label_table(LabelingRule::Gray);
    let transform = match c.kind() {
        ConstellationKind::Ask => sp_to_gray_matrix(c.bits()),
        ConstellationKind::Qam => qam_sp_to_gray(c.bits() / 2),
    };
    Ok(TableDump {
        tool: crate::output::tool_version(),
        modulation: match c.kind() {
            ConstellationKind::Ask => "ask".into(),
            ConstellationKind::Qam => "qam".into(),
        },
        bits: c.bits(),
        points: c.points().to_vec(),
        sp: sp.matrix().to_rows(),
        gray: gray.matrix().to_rows(),
        transform: transform.to_rows(),
        sp_subset_distances: c.subset_min_distances(&sp),
    })
}
