//! Curves of contact at the end times, one set per input face and side.

use super::coedges::EdgeComponent;
use super::CurveEndpoint;
use crate::brep::{BrepSolid, CapSide, CoedgeId, EdgeId, FaceId};
use crate::config::SolverConfig;
use crate::contact::{Funnel, FunnelPoint};
use crate::error::{Result, SweepError};
use crate::motion::{Trajectory, Vec3};
use crate::solve::funnel::CurveEnd;
use crate::solve::trace_p_coc;
use crate::surface::DomainCurve;

/// Domain distance below which a coc endpoint lies on an input co-edge.
const ON_BOUNDARY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct CocComponent {
    pub face: FaceId,
    pub side: CapSide,
    pub index: usize,
    pub points: Vec<FunnelPoint>,
    pub positions: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub start: CurveEndpoint,
    pub end: CurveEndpoint,
    /// Whether the traced order follows `beta = (-f_v, f_u)`.
    pub beta_forward: bool,
}

impl CocComponent {
    pub fn is_closed(&self) -> bool {
        self.start == CurveEndpoint::Seam
    }

    pub fn uv(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|p| [p.u, p.v]).collect()
    }
}

/// Closest point of a domain curve to `p`: `(s, distance)`.
pub fn project_on_curve(map: &DomainCurve, p: [f64; 2]) -> (f64, f64) {
    let d = |s: f64| {
        let q = map.eval(s).0;
        (q[0] - p[0]).hypot(q[1] - p[1])
    };
    if let DomainCurve::Line { from, to } = map {
        let e = [to[0] - from[0], to[1] - from[1]];
        let l2 = e[0] * e[0] + e[1] * e[1];
        let s = if l2 > 0.0 { (((p[0] - from[0]) * e[0] + (p[1] - from[1]) * e[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
        return (s, d(s));
    }
    let n = 128;
    let k = (0..=n).min_by(|&a, &b| d(a as f64 / n as f64).total_cmp(&d(b as f64 / n as f64))).unwrap_or(0);
    let (mut a, mut b) = (((k as f64 - 1.0) / n as f64).max(0.0), ((k as f64 + 1.0) / n as f64).min(1.0));
    for _ in 0..100 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if d(m1) < d(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let s = 0.5 * (a + b);
    (s, d(s))
}

/// Co-edges of `face` passing through the domain point `p`, with the edge
/// parameter there.
pub fn locate_on_boundary(solid: &BrepSolid, face: FaceId, p: [f64; 2]) -> Vec<(CoedgeId, EdgeId, f64)> {
    solid
        .face_coedges(face)
        .into_iter()
        .filter_map(|c| {
            let curve = solid.coedge_curve(c)?;
            let (s, d) = project_on_curve(&curve.map, p);
            (d < ON_BOUNDARY_TOL).then_some((c, solid.coedges[c].edge, s))
        })
        .collect()
}

/// Trim endpoints of the edge components, per `(edge, side)`.
pub fn trim_params(edges: &[Vec<EdgeComponent>], n_edges: usize) -> Vec<[Vec<f64>; 2]> {
    let mut out = vec![[Vec::new(), Vec::new()]; n_edges];
    for comps in edges {
        for c in comps {
            for end in [c.start, c.end] {
                if let CurveEndpoint::Trim { edge, side, s } = end {
                    out[edge][side as usize].push(s);
                }
            }
        }
    }
    for sides in &mut out {
        for v in sides.iter_mut() {
            v.sort_by(f64::total_cmp);
        }
    }
    out
}

/// The p-curves of contact of `face` at the `side` end time, endpoints
/// snapped to the trim points of the edge components.
pub fn compute_cocs(
    solid: &BrepSolid,
    face: FaceId,
    side: CapSide,
    traj: &Trajectory,
    cfg: &SolverConfig,
    trims: &[[Vec<f64>; 2]],
) -> Result<Vec<CocComponent>> {
    let patch = solid.patch(face).ok_or_else(|| SweepError::InvalidInput(format!("face {face} is not a patch")))?;
    let funnel = Funnel::new(face, patch, traj);
    let t = side.time(traj);
    let bind = |end: CurveEnd| -> Result<CurveEndpoint> {
        let CurveEnd::Boundary { point, .. } = end else { return Ok(CurveEndpoint::Seam) };
        for (_, edge, s) in locate_on_boundary(solid, face, point) {
            let hit = trims[edge][side as usize].iter().copied().filter(|x| (x - s).abs() < 1e-6).min_by(|a, b| (a - s).abs().total_cmp(&(b - s).abs()));
            if let Some(s) = hit {
                return Ok(CurveEndpoint::Trim { edge, side, s });
            }
        }
        Err(SweepError::EndpointMismatch { location: format!("coc of face {face} at t={t} ends at {point:?}") })
    };
    let curves = trace_p_coc(&funnel, t, cfg)?;
    let mut out = Vec::with_capacity(curves.len());
    for (index, c) in curves.into_iter().enumerate() {
        let mut positions = Vec::with_capacity(c.points.len());
        let mut normals = Vec::with_capacity(c.points.len());
        for fp in &c.points {
            positions.push(funnel.sweep_map(fp.u, fp.v, t)?.sigma);
            normals.push(funnel.moved_normal(fp.u, fp.v, t)?);
        }
        let mut best = 0.0f64;
        for w in c.points.windows(2) {
            let (du, dv) = (w[1].u - w[0].u, w[1].v - w[0].v);
            let along = -w[0].fv * du + w[0].fu * dv;
            if along.abs() > best.abs() {
                best = along;
            }
        }
        if best == 0.0 {
            return Err(SweepError::OrientationUndetermined { entity: format!("coc {index} of face {face} at t={t}") });
        }
        out.push(CocComponent { face, side, index, start: bind(c.start)?, end: bind(c.end)?, points: c.points, positions, normals, beta_forward: best > 0.0 });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brep::test_solids::ellipsoid;
    use crate::contact::fixtures::arc;
    use crate::lift::coedges::compute_coedges;
    use crate::lift::vertices::compute_vertices;
    use std::f64::consts::PI;

    #[test]
    fn projection_on_line_and_cubic() {
        let line = DomainCurve::Line { from: [0.0, 0.0], to: [2.0, 0.0] };
        let (s, d) = project_on_curve(&line, [0.5, 0.1]);
        assert!((s - 0.25).abs() < 1e-12 && (d - 0.1).abs() < 1e-12);
        let cubic = DomainCurve::Cubic { u: [0.0, 1.0, 0.0, 0.0], v: [0.0, 0.0, 1.0, 0.0] };
        let (s, d) = project_on_curve(&cubic, [0.3, 0.09]);
        assert!((s - 0.3).abs() < 1e-6 && d < 1e-9);
    }

    #[test]
    fn arc_sphere_cocs_bind_to_trims() {
        let solid = ellipsoid([1.0; 3]);
        let traj = arc(3.0, PI / 2.0);
        let cfg = SolverConfig::default();
        let swept: Vec<_> = (0..solid.vertices.len()).map(|z| compute_vertices(&solid, z, &traj, &cfg).unwrap()).collect();
        let edges: Vec<_> = (0..solid.edges.len()).map(|e| compute_coedges(&solid, e, &traj, &cfg, &swept).unwrap()).collect();
        let trims = trim_params(&edges, solid.edges.len());
        let n_trims: usize = trims.iter().map(|s| s[0].len() + s[1].len()).sum();
        assert_eq!(n_trims, 8);
        let mut total = 0;
        for f in 0..solid.faces.len() {
            for side in CapSide::BOTH {
                let cocs = compute_cocs(&solid, f, side, &traj, &cfg, &trims).unwrap();
                for c in &cocs {
                    assert!(!c.is_closed());
                    // the end-time coc is the great circle orthogonal to the velocity
                    let t = side.time(&traj);
                    let vel = Vec3::new(-t.sin(), t.cos(), 0.0);
                    let center = Vec3::new(3.0 * t.cos(), 3.0 * t.sin(), 0.0);
                    for p in &c.positions {
                        assert!((p - center).dot(&vel).abs() < 1e-8);
                    }
                }
                total += cocs.len();
            }
        }
        assert_eq!(total, 8);
    }
}
