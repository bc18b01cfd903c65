//! Lifting the input brep to the envelope brep.
//!
//! Stages run in order: swept vertices, edge contact curves with their
//! orientation, curves of contact at the end times, loops, contact faces,
//! end caps, assembly and audits.

pub mod assemble;
pub mod audit;
pub mod caps;
pub mod cocs;
pub mod coedges;
pub mod faces;
pub mod loops;
pub mod pipeline;
pub mod vertices;

use serde::{Deserialize, Serialize};

use crate::brep::{BrepSolid, CapSide, EdgeId, FaceId, VertexId};
use crate::config::SolverConfig;
use crate::error::{Result, SweepError};
use crate::motion::{Trajectory, Vec3};
use crate::surface::Sense;

pub use assemble::EnvelopeBrep;
pub use faces::eval_envelope_point;
pub use pipeline::{sweep_envelope, SweepReport};

/// Input of a sweep: a validated solid, its trajectory and solver settings.
#[derive(Debug, Clone)]
pub struct SweepInput {
    pub name: String,
    pub solid: BrepSolid,
    pub traj: Trajectory,
    pub config: SolverConfig,
}

impl CapSide {
    pub fn time(self, traj: &Trajectory) -> f64 {
        match self {
            CapSide::Left => traj.t0(),
            CapSide::Right => traj.t1(),
        }
    }

    pub const BOTH: [CapSide; 2] = [CapSide::Left, CapSide::Right];
}

/// Domain point of an input vertex on some face using it.
pub fn vertex_on_face(solid: &BrepSolid, z: VertexId) -> Result<(FaceId, [f64; 2])> {
    for c in 0..solid.coedges.len() {
        let Some(curve) = solid.coedge_curve(c) else { continue };
        let e = &solid.edges[solid.coedges[c].edge];
        let s = if e.start == z {
            0.0
        } else if e.end == z {
            1.0
        } else {
            continue;
        };
        return Ok((solid.face_of_coedge(c), curve.map.eval(s).0));
    }
    Err(SweepError::InvalidInput(format!("vertex {z} is not on any analytic co-edge")))
}

/// Position and outward normal of an input vertex.
pub fn vertex_frame(solid: &BrepSolid, z: VertexId) -> Result<(Vec3, Vec3)> {
    let (f, uv) = vertex_on_face(solid, z)?;
    let patch = solid.patch(f).ok_or_else(|| SweepError::InvalidInput(format!("face {f} is not a patch")))?;
    Ok((patch.eval(uv[0], uv[1])?, patch.unit_normal(uv[0], uv[1])?))
}

pub(crate) fn sense_sign(sense: Sense) -> i32 {
    match sense {
        Sense::Forward => 1,
        Sense::Reversed => -1,
    }
}

/// Endpoint of a traced curve after binding to envelope vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "kebab-case")]
pub enum CurveEndpoint {
    /// Swept vertex `root` of input vertex `z`.
    Swept { z: VertexId, root: usize },
    /// Point of edge `edge` at parameter `s` at an end time.
    Trim { edge: EdgeId, side: CapSide, s: f64 },
    /// Copy of input vertex `z` on an end cap.
    Cap { z: VertexId, side: CapSide },
    /// Start of a closed curve.
    Seam,
}
