//! Tracing of edge funnels in `(s, t)` and p-curves of contact in `(u, v)`,
//! and Newton polishing onto a face funnel.

use serde::{Deserialize, Serialize};

use super::trace::{trace_components, Curve2, EndTag, Rect, Side};
use crate::brep::{BrepSolid, EdgeId, FaceId};
use crate::config::SolverConfig;
use crate::contact::{Funnel, FunnelPoint};
use crate::error::{Result, SweepError};
use crate::motion::{Trajectory, Vec3};
use crate::surface::DomainCurve;

/// Largest total displacement accepted when polishing onto the funnel.
pub const REFINE_RADIUS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "owner", rename_all = "kebab-case")]
pub enum CurveOwner {
    /// Strip `[0, 1] x I` of an edge, coordinates `(s, t)`.
    EdgeStrip { edge: EdgeId },
    /// Slice of a face prism at fixed time, coordinates `(u, v)`.
    FaceSlice { face: FaceId, t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "end", rename_all = "kebab-case")]
pub enum CurveEnd {
    Boundary { point: [f64; 2], side: Side },
    Closed,
}

/// One traced component with its 2D coordinates and polished funnel jets.
#[derive(Debug, Clone, PartialEq)]
pub struct TracedCurve {
    pub owner: CurveOwner,
    pub params: Vec<[f64; 2]>,
    pub points: Vec<FunnelPoint>,
    pub start: CurveEnd,
    pub end: CurveEnd,
}

impl TracedCurve {
    pub fn is_closed(&self) -> bool {
        self.start == CurveEnd::Closed
    }

    pub fn arc_length(&self) -> f64 {
        let mut l: f64 = self.params.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum();
        if self.is_closed() {
            let (a, b) = (self.params[0], *self.params.last().unwrap());
            l += (a[0] - b[0]).hypot(a[1] - b[1]);
        }
        l
    }
}

fn end_of(tag: EndTag, out: &super::trace::TraceOutput) -> CurveEnd {
    match tag {
        EndTag::Boundary { root } => {
            let r = out.boundary_roots[root];
            CurveEnd::Boundary { point: r.point, side: r.side }
        }
        EndTag::Closed => CurveEnd::Closed,
    }
}

/// Edge funnel restricted to one edge: `f(delta(s), t)` and its gradient.
pub struct EdgeField<'a> {
    pub funnel: Funnel<'a>,
    pub map: &'a DomainCurve,
}

impl EdgeField<'_> {
    pub fn jet(&self, s: f64, t: f64) -> Result<(FunnelPoint, [f64; 2])> {
        let (uv, d) = self.map.eval(s);
        let fp = self.funnel.jet(uv[0], uv[1], t)?;
        Ok((fp, [fp.fu * d[0] + fp.fv * d[1], fp.ft]))
    }

    pub fn value(&self, s: f64, t: f64) -> Result<f64> {
        let (uv, _) = self.map.eval(s);
        self.funnel.value(uv[0], uv[1], t)
    }
}

/// The edge field through the edge's first co-edge.
pub fn edge_field<'a>(solid: &'a BrepSolid, edge: EdgeId, traj: &'a Trajectory) -> Result<EdgeField<'a>> {
    let c = solid.coedges.iter().position(|c| c.edge == edge).ok_or_else(|| SweepError::InvalidInput(format!("edge {edge} has no co-edge")))?;
    let face = solid.face_of_coedge(c);
    let patch = solid.patch(face).ok_or_else(|| SweepError::InvalidInput(format!("face {face} is not a patch")))?;
    let curve = solid.coedge_curve(c).ok_or_else(|| SweepError::InvalidInput(format!("co-edge {c} has no analytic curve")))?;
    Ok(EdgeField { funnel: Funnel::new(face, patch, traj), map: &curve.map })
}

/// All components of the edge funnel in `[0, 1] x I`.
pub fn trace_edge_funnel(solid: &BrepSolid, edge: EdgeId, traj: &Trajectory, cfg: &SolverConfig) -> Result<Vec<TracedCurve>> {
    let ef = edge_field(solid, edge, traj)?;
    let field = |p: [f64; 2]| ef.jet(p[0], p[1]).map(|(fp, g)| (fp.f, g));
    let rect = Rect::new([0.0, traj.t0()], [1.0, traj.t1()]);
    let out = trace_components(&field, &rect, cfg)?;
    out.curves
        .iter()
        .map(|c| {
            let points = c.points.iter().map(|p| ef.jet(p[0], p[1]).map(|j| j.0)).collect::<Result<Vec<_>>>()?;
            Ok(TracedCurve { owner: CurveOwner::EdgeStrip { edge }, params: c.points.clone(), points, start: end_of(c.start, &out), end: end_of(c.end, &out) })
        })
        .collect()
}

/// All components of the p-curve of contact of a face at time `t`.
pub fn trace_p_coc(funnel: &Funnel, t: f64, cfg: &SolverConfig) -> Result<Vec<TracedCurve>> {
    let field = |p: [f64; 2]| funnel.jet(p[0], p[1], t).map(|fp| (fp.f, [fp.fu, fp.fv]));
    let [[u0, u1], [v0, v1]] = funnel.patch.domain;
    let out = trace_components(&field, &Rect::new([u0, v0], [u1, v1]), cfg)?;
    out.curves.iter().map(|c| slice_curve(funnel, t, c, &out)).collect()
}

fn slice_curve(funnel: &Funnel, t: f64, c: &Curve2, out: &super::trace::TraceOutput) -> Result<TracedCurve> {
    let points = c.points.iter().map(|p| funnel.jet(p[0], p[1], t)).collect::<Result<Vec<_>>>()?;
    Ok(TracedCurve {
        owner: CurveOwner::FaceSlice { face: funnel.face, t },
        params: c.points.clone(),
        points,
        start: end_of(c.start, out),
        end: end_of(c.end, out),
    })
}

/// Newton projection `p -= f grad f / |grad f|^2` in the prism, clamped to
/// the prism, until `|f| <= 1e-12`. Returns the point and iteration count.
pub fn refine_onto_funnel(funnel: &Funnel, u: f64, v: f64, t: f64, cfg: &SolverConfig) -> Result<(FunnelPoint, usize)> {
    let start = Vec3::new(u, v, t);
    let mut p = start;
    let [[u0, u1], [v0, v1]] = funnel.patch.domain;
    let (t0, t1) = (funnel.traj.t0(), funnel.traj.t1());
    for k in 0..=cfg.max_newton_iters {
        let fp = funnel.jet(p[0], p[1], p[2])?;
        if fp.f.abs() <= 1e-12 {
            return Ok((fp, k));
        }
        let g = fp.grad();
        let g2 = g.norm_squared();
        if !(g2 > 0.0) {
            break;
        }
        p -= g * (fp.f / g2);
        p = Vec3::new(p[0].clamp(u0, u1), p[1].clamp(v0, v1), p[2].clamp(t0, t1));
        if (p - start).norm() > REFINE_RADIUS {
            break;
        }
    }
    Err(SweepError::NoConvergence { location: format!("funnel refine from ({u}, {v}, {t})") })
}

/// Newton in `(u, v)` at fixed `t`.
pub fn refine_in_slice(funnel: &Funnel, u: f64, v: f64, t: f64, cfg: &SolverConfig) -> Result<FunnelPoint> {
    let (mut a, mut b) = (u, v);
    for _ in 0..=cfg.max_newton_iters {
        let fp = funnel.jet(a, b, t)?;
        if fp.f.abs() <= 1e-12 {
            return Ok(fp);
        }
        let g2 = fp.fu * fp.fu + fp.fv * fp.fv;
        if !(g2 > 0.0) {
            break;
        }
        (a, b) = funnel.patch.clamp(a - fp.f * fp.fu / g2, b - fp.f * fp.fv / g2);
        if (a - u).hypot(b - v) > REFINE_RADIUS {
            break;
        }
    }
    Err(SweepError::NoConvergence { location: format!("slice refine at t={t} from ({u}, {v})") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brep::test_solids::ellipsoid;
    use crate::contact::fixtures::{arc, unit_sphere_face};
    use crate::solve::roots::roots_1d;
    use crate::surface::CubeFace;
    use std::f64::consts::PI;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn edge_funnels_on_arc_sphere() {
        let solid = ellipsoid([1.0; 3]);
        let traj = arc(3.0, PI / 2.0);
        let mut total = 0;
        for e in 0..solid.edges.len() {
            let curves = trace_edge_funnel(&solid, e, &traj, &cfg()).unwrap();
            let ef = edge_field(&solid, e, &traj).unwrap();
            for c in &curves {
                assert!(!c.is_closed());
                for (p, fp) in c.params.iter().zip(&c.points) {
                    assert!(fp.f.abs() <= 1e-8);
                    let x = ef.funnel.patch.eval(fp.u, fp.v).unwrap();
                    let t = p[1];
                    assert!((3.0 * (-x[0] * t.sin() + x[1] * t.cos())).abs() < 1e-8);
                }
            }
            total += curves.len();
        }
        // 8 edges carry a contact arc, the 4 vertical ones none
        assert_eq!(total, 10);
    }

    #[test]
    fn fiber_counts_match_roots() {
        let solid = ellipsoid([1.0, 0.8, 1.2]);
        let traj = crate::contact::fixtures::moving_trajectories().remove(1);
        for e in 0..solid.edges.len() {
            let curves = trace_edge_funnel(&solid, e, &traj, &cfg()).unwrap();
            let ef = edge_field(&solid, e, &traj).unwrap();
            for k in 0..10 {
                let s0 = (k as f64 + 0.5) / 10.0;
                let r = roots_1d(
                    |t| {
                        let (fp, g) = ef.jet(s0, t)?;
                        Ok((fp.f, g[1]))
                    },
                    traj.t0(),
                    traj.t1(),
                    &cfg(),
                )
                .unwrap();
                let crossings: usize = curves.iter().map(|c| c.params.windows(2).filter(|w| (w[0][0] - s0) * (w[1][0] - s0) < 0.0).count()).sum();
                assert_eq!(crossings, r.roots.len(), "edge {e} s0 {s0}");
            }
        }
    }

    #[test]
    fn p_coc_on_great_circle() {
        let traj = arc(3.0, PI / 2.0);
        let t: f64 = 0.3;
        let k = Vec3::new(-t.sin(), t.cos(), 0.0);
        let mut length = 0.0;
        for face in CubeFace::ALL {
            let patch = unit_sphere_face(face);
            let fun = Funnel::new(0, &patch, &traj);
            for c in trace_p_coc(&fun, t, &cfg()).unwrap() {
                let xs: Vec<Vec3> = c.params.iter().map(|p| patch.eval(p[0], p[1]).unwrap()).collect();
                for x in &xs {
                    assert!(x.dot(&k).abs() < 1e-8);
                }
                length += xs.windows(2).map(|w| (w[1] - w[0]).norm()).sum::<f64>();
            }
        }
        assert!((length - 2.0 * PI).abs() < 1e-4, "{length}");
    }

    #[test]
    fn p_coc_missing_face() {
        // at t = 0 the contact circle is x2 = 0, which misses the +y face
        let traj = arc(3.0, PI / 2.0);
        let patch = unit_sphere_face(CubeFace::PosY);
        assert!(trace_p_coc(&Funnel::new(0, &patch, &traj), 0.0, &cfg()).unwrap().is_empty());
    }

    #[test]
    fn refine_behaviour() {
        let traj = arc(3.0, PI / 2.0);
        let patch = unit_sphere_face(CubeFace::PosX);
        let fun = Funnel::new(0, &patch, &traj);
        let (fp, iters) = refine_onto_funnel(&fun, 0.0, 0.3, 0.0, &cfg()).unwrap();
        assert_eq!(iters, 0);
        assert_eq!((fp.u, fp.v, fp.t), (0.0, 0.3, 0.0));

        let (a, b) = (fun.jet(0.1, 0.2, 0.1).unwrap(), fun.jet(0.2, 0.2, 0.2).unwrap());
        let before = fun.value(0.15, 0.2, 0.15).unwrap().abs();
        assert!(a.f.abs() < 0.01 && b.f.abs() < 0.01 && before > 1e-6);
        let (fp, _) = refine_onto_funnel(&fun, 0.15, 0.2, 0.15, &cfg()).unwrap();
        assert!(fp.f.abs() <= 1e-12);

        let far = fun.value(0.5, 0.0, 0.0).unwrap();
        assert!(far.abs() > 0.5);
        assert!(matches!(refine_onto_funnel(&fun, 0.5, 0.0, 0.0, &cfg()), Err(SweepError::NoConvergence { .. })));
    }
}
