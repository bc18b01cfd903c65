//! JSON report of a sweep.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RayParity;
use crate::error::{Result, SweepError};
use crate::lift::SweepReport;

/// Mesh checks added to the sweep report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub vertices: usize,
    pub triangles: usize,
    pub boundary_edges: usize,
    pub winding_disagreements: usize,
    pub area: f64,
    pub ray_parity: RayParity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    #[serde(flatten)]
    pub sweep: SweepReport,
    pub mesh: Option<MeshSummary>,
}

impl ReportDocument {
    /// Copy with stage timings removed, for byte-stable comparisons.
    pub fn without_timings(&self) -> ReportDocument {
        let mut d = self.clone();
        d.sweep.timings.clear();
        d
    }
}

pub fn to_report_string(doc: &ReportDocument) -> Result<String> {
    serde_json::to_string_pretty(doc).map_err(|e| SweepError::Io(e.to_string()))
}

pub fn write_report(path: &Path, doc: &ReportDocument) -> Result<()> {
    Ok(std::fs::write(path, to_report_string(doc)?)?)
}
