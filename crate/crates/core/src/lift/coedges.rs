//! Contact curves of input edges: components of the edge funnel, bound to
//! swept vertices or end-time points, with their lifted orientation.

use super::vertices::SweptVertex;
use super::CurveEndpoint;
use crate::brep::{BrepSolid, CapSide, EdgeId};
use crate::config::SolverConfig;
use crate::contact::{orientation_sign, FunnelPoint};
use crate::error::{Result, SweepError};
use crate::motion::{Trajectory, Vec3};
use crate::solve::funnel::{edge_field, CurveEnd};
use crate::solve::{trace_edge_funnel, Side};

/// One component of an edge funnel and its swept image.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeComponent {
    pub edge: EdgeId,
    pub index: usize,
    /// `(s, t)` samples in traced order.
    pub params: Vec<[f64; 2]>,
    /// Funnel jets in the domain of the edge's first co-edge.
    pub points: Vec<FunnelPoint>,
    pub positions: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub start: CurveEndpoint,
    pub end: CurveEndpoint,
    /// `sign(-f_t) * sign(ds)` along the traced order. A co-edge of sense
    /// `k` traverses the samples forward iff this equals `k`.
    pub dir_sign: i32,
}

impl EdgeComponent {
    pub fn is_closed(&self) -> bool {
        self.start == CurveEndpoint::Seam
    }
}

/// Orientation of a component from the sample where `|f_t| |ds|` is largest.
pub fn orient_component(params: &[[f64; 2]], points: &[FunnelPoint], what: &str) -> Result<i32> {
    let mut best = (0.0, 0);
    for k in 0..params.len().saturating_sub(1) {
        let ds = params[k + 1][0] - params[k][0];
        let ft = 0.5 * (points[k].ft + points[k + 1].ft);
        let score = ft.abs() * ds.abs();
        let sign = orientation_sign(ft);
        if sign != 0 && score > best.0 {
            best = (score, sign * if ds > 0.0 { 1 } else { -1 });
        }
    }
    if best.1 == 0 {
        return Err(SweepError::OrientationUndetermined { entity: what.to_string() });
    }
    Ok(best.1)
}

/// All contact components of one edge, endpoints bound to the swept
/// vertices of its end vertices.
pub fn compute_coedges(solid: &BrepSolid, edge: EdgeId, traj: &Trajectory, cfg: &SolverConfig, swept: &[Vec<SweptVertex>]) -> Result<Vec<EdgeComponent>> {
    let curves = trace_edge_funnel(solid, edge, traj, cfg)?;
    let ef = edge_field(solid, edge, traj)?;
    let e = &solid.edges[edge];
    let bind_tol = cfg.coincidence_tol;
    let bind = |end: CurveEnd| -> Result<CurveEndpoint> {
        match end {
            CurveEnd::Closed => Ok(CurveEndpoint::Seam),
            CurveEnd::Boundary { point: [s, t], side } => {
                let z = match side {
                    Side::Bottom => return Ok(CurveEndpoint::Trim { edge, side: CapSide::Left, s }),
                    Side::Top => return Ok(CurveEndpoint::Trim { edge, side: CapSide::Right, s }),
                    Side::Left => e.start,
                    Side::Right => e.end,
                };
                let hits: Vec<&SweptVertex> = swept[z].iter().filter(|v| (v.t - t).abs() <= bind_tol).collect();
                match hits[..] {
                    [v] => Ok(CurveEndpoint::Swept { z, root: v.root }),
                    _ => Err(SweepError::EndpointMismatch {
                        location: format!("edge {edge} curve end (s={s}, t={t}) matches {} swept vertices of vertex {z}", hits.len()),
                    }),
                }
            }
        }
    };
    let mut out = Vec::with_capacity(curves.len());
    for (index, c) in curves.into_iter().enumerate() {
        let mut positions = Vec::with_capacity(c.points.len());
        let mut normals = Vec::with_capacity(c.points.len());
        for fp in &c.points {
            let sj = ef.funnel.sweep_map(fp.u, fp.v, fp.t)?;
            positions.push(sj.sigma);
            normals.push(ef.funnel.moved_normal(fp.u, fp.v, fp.t)?);
        }
        let dir_sign = orient_component(&c.params, &c.points, &format!("edge {edge} component {index}"))?;
        out.push(EdgeComponent { edge, index, start: bind(c.start)?, end: bind(c.end)?, params: c.params, points: c.points, positions, normals, dir_sign });
    }
    Ok(out)
}
