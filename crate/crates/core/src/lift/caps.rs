//! End caps: the parts of the solid at the end times that stay on the
//! envelope, bounded by end-time curves of contact and pieces of input edges.

use super::cocs::CocComponent;
use super::faces::PrismSample;
use super::CurveEndpoint;
use crate::brep::{signed_area, BrepSolid, CapSide, CoedgeId, EdgeId, FaceId};
use crate::config::SolverConfig;
use crate::error::{Result, SweepError};
use crate::motion::{Trajectory, Vec3};
use crate::solve::funnel::edge_field;

/// Samples per unit of edge parameter on a cap segment.
pub const SEGMENT_SAMPLES: usize = 33;

/// Whether a value of the grazing function lies on the cap side.
pub fn cap_sign(side: CapSide, g: f64) -> bool {
    match side {
        CapSide::Left => g < 0.0,
        CapSide::Right => g > 0.0,
    }
}

/// Part of an input edge on a cap, between two trim points or vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct CapSegment {
    pub edge: EdgeId,
    pub side: CapSide,
    pub index: usize,
    pub s0: f64,
    pub s1: f64,
    pub start: CurveEndpoint,
    pub end: CurveEndpoint,
    /// Edge parameters and moved points, ascending in `s`.
    pub params: Vec<f64>,
    pub positions: Vec<Vec3>,
    pub normals: Vec<Vec3>,
}

/// Cap segments of one edge at one end time.
pub fn cap_segments(solid: &BrepSolid, edge: EdgeId, side: CapSide, trims: &[f64], traj: &Trajectory) -> Result<Vec<CapSegment>> {
    let ef = edge_field(solid, edge, traj)?;
    let t = side.time(traj);
    let e = &solid.edges[edge];
    let mut breaks = vec![0.0];
    breaks.extend(trims.iter().copied().filter(|s| *s > 1e-12 && *s < 1.0 - 1e-12));
    breaks.push(1.0);
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        if s1 - s0 < 1e-12 || !cap_sign(side, ef.value(0.5 * (s0 + s1), t)?) {
            continue;
        }
        let point = |s: f64, vertex| {
            if s == 0.0 || s == 1.0 {
                CurveEndpoint::Cap { z: vertex, side }
            } else {
                CurveEndpoint::Trim { edge, side, s }
            }
        };
        let n = ((SEGMENT_SAMPLES as f64 * (s1 - s0)).ceil() as usize).max(4);
        let params: Vec<f64> = (0..=n).map(|i| if i == n { s1 } else { s0 + (s1 - s0) * i as f64 / n as f64 }).collect();
        let mut positions = Vec::with_capacity(params.len());
        let mut normals = Vec::with_capacity(params.len());
        for &s in &params {
            let uv = ef.map.eval(s).0;
            positions.push(ef.funnel.sweep_map(uv[0], uv[1], t)?.sigma);
            normals.push(ef.funnel.moved_normal(uv[0], uv[1], t)?);
        }
        out.push(CapSegment { edge, side, index: out.len(), s0, s1, start: point(s0, e.start), end: point(s1, e.end), params, positions, normals });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapPieceKind {
    /// Segment `index` of the edge of input co-edge `coedge`.
    Segment { coedge: CoedgeId, index: usize },
    /// Curve of contact `index` of the face at this end time.
    Coc { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapPiece {
    pub kind: CapPieceKind,
    pub forward: bool,
    pub start: CurveEndpoint,
    pub end: CurveEndpoint,
}

/// A cap face: an outer loop and its holes, as piece lists.
#[derive(Debug, Clone, PartialEq)]
pub struct CapFace {
    pub input_face: FaceId,
    pub side: CapSide,
    pub index: usize,
    pub pieces: Vec<CapPiece>,
    pub outer: Vec<usize>,
    pub inner: Vec<Vec<usize>>,
    /// Samples of each piece in traversal order, indexed like `pieces`.
    pub samples: Vec<Vec<PrismSample>>,
}

fn point_in_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]) {
            inside = !inside;
        }
    }
    inside
}

/// Cap faces of input face `face` at one end time.
pub fn build_caps(
    solid: &BrepSolid,
    face: FaceId,
    side: CapSide,
    segments: &[Vec<CapSegment>],
    cocs: &[CocComponent],
    traj: &Trajectory,
    _cfg: &SolverConfig,
) -> Result<Vec<CapFace>> {
    let t = side.time(traj);
    let mut pieces = Vec::new();
    let mut samples = Vec::new();
    for c in solid.face_coedges(face) {
        let ce = &solid.coedges[c];
        let curve = solid.coedge_curve(c).ok_or_else(|| SweepError::InvalidInput(format!("co-edge {c} has no analytic curve")))?;
        for seg in &segments[ce.edge] {
            let forward = ce.sense == crate::surface::Sense::Forward;
            let (start, end) = if forward { (seg.start, seg.end) } else { (seg.end, seg.start) };
            pieces.push(CapPiece { kind: CapPieceKind::Segment { coedge: c, index: seg.index }, forward, start, end });
            let mut s: Vec<PrismSample> = (0..seg.params.len())
                .map(|k| PrismSample { uv: curve.map.eval(seg.params[k]).0, t, position: seg.positions[k], normal: seg.normals[k] })
                .collect();
            if !forward {
                s.reverse();
            }
            samples.push(s);
        }
    }
    for coc in cocs {
        // the left cap runs along +beta, the right cap along -beta
        let forward = coc.beta_forward == (side == CapSide::Left);
        let (start, end) = if forward { (coc.start, coc.end) } else { (coc.end, coc.start) };
        pieces.push(CapPiece { kind: CapPieceKind::Coc { index: coc.index }, forward, start, end });
        let mut s: Vec<PrismSample> = (0..coc.points.len())
            .map(|k| PrismSample { uv: [coc.points[k].u, coc.points[k].v], t, position: coc.positions[k], normal: coc.normals[k] })
            .collect();
        if !forward {
            s.reverse();
        }
        samples.push(s);
    }
    let mut used = vec![false; pieces.len()];
    let mut loops: Vec<Vec<usize>> = Vec::new();
    for first in 0..pieces.len() {
        if used[first] {
            continue;
        }
        used[first] = true;
        let mut lp = vec![first];
        if pieces[first].start != CurveEndpoint::Seam {
            let mut cur = first;
            while pieces[cur].end != pieces[first].start {
                let free = pieces[cur].end;
                let cands: Vec<usize> = (0..pieces.len()).filter(|&k| !used[k] && pieces[k].start == free).collect();
                cur = match cands.as_slice() {
                    [k] => *k,
                    [] => return Err(SweepError::LoopNotClosed { partial: format!("cap of face {face} ({side:?}) stops at {free:?}") }),
                    _ => return Err(SweepError::AmbiguousCandidate { location: format!("cap of face {face} ({side:?}) at {free:?}") }),
                };
                used[cur] = true;
                lp.push(cur);
            }
        }
        loops.push(lp);
    }
    let polys: Vec<Vec<[f64; 2]>> = loops.iter().map(|lp| lp.iter().flat_map(|&k| samples[k][..samples[k].len() - 1].iter().map(|s| s.uv)).collect()).collect();
    let areas: Vec<f64> = polys.iter().map(|p| signed_area(p)).collect();
    let outers: Vec<usize> = (0..loops.len()).filter(|&i| areas[i] > 0.0).collect();
    let mut faces: Vec<CapFace> = outers
        .iter()
        .enumerate()
        .map(|(index, &i)| CapFace {
            input_face: face,
            side,
            index,
            pieces: pieces.clone(),
            outer: loops[i].clone(),
            inner: Vec::new(),
            samples: samples.clone(),
        })
        .collect();
    for i in (0..loops.len()).filter(|&i| areas[i] <= 0.0) {
        let probe = polys[i][0];
        // innermost containing outer loop
        let host = outers
            .iter()
            .enumerate()
            .filter(|(_, &o)| point_in_polygon(probe, &polys[o]))
            .min_by(|a, b| areas[*a.1].total_cmp(&areas[*b.1]))
            .map(|(k, _)| k)
            .ok_or(SweepError::OrphanLoop { face, loop_index: i })?;
        faces[host].inner.push(loops[i].clone());
    }
    Ok(faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brep::test_solids::ellipsoid;
    use crate::contact::fixtures::arc;
    use crate::lift::cocs::trim_params;
    use crate::lift::fixtures::stages;
    use std::f64::consts::PI;

    #[test]
    fn point_in_square() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(point_in_polygon([0.5, 0.5], &sq));
        assert!(!point_in_polygon([1.5, 0.5], &sq));
    }

    #[test]
    fn arc_sphere_caps() {
        let st = stages(ellipsoid([1.0; 3]), arc(3.0, PI / 2.0));
        let trims = trim_params(&st.edges, st.solid.edges.len());
        for side in CapSide::BOTH {
            let segs: Vec<Vec<CapSegment>> =
                (0..st.solid.edges.len()).map(|e| cap_segments(&st.solid, e, side, &trims[e][side as usize], &st.traj).unwrap()).collect();
            let n_seg: usize = segs.iter().map(Vec::len).sum();
            // 4 edges split at a trim point, 4 whole edges behind them
            assert_eq!(n_seg, 8);
            let mut n_faces = 0;
            let t = side.time(&st.traj);
            let vel = Vec3::new(-t.sin(), t.cos(), 0.0);
            let center = Vec3::new(3.0 * t.cos(), 3.0 * t.sin(), 0.0);
            for f in 0..st.solid.faces.len() {
                let caps = build_caps(&st.solid, f, side, &segs, &st.cocs[f][side as usize], &st.traj, &st.cfg).unwrap();
                for c in &caps {
                    assert!(c.inner.is_empty());
                    for &k in &c.outer {
                        for s in &c.samples[k] {
                            let g = (s.position - center).dot(&vel);
                            assert!(if side == CapSide::Left { g <= 1e-9 } else { g >= -1e-9 });
                        }
                    }
                }
                n_faces += caps.len();
            }
            assert_eq!(n_faces, 5);
        }
    }
}
