//! Contact faces: one per loop of a face prism, charted by `(t, q)` where
//! `q` runs across the face from the ascending boundary chain (`q = 0`) to
//! the descending one (`q = 1`). The geometry is a stack of polished curves
//! of contact at increasing times.

use super::cocs::CocComponent;
use super::coedges::EdgeComponent;
use super::loops::{FaceLoops, Piece, PieceKind};
use super::CurveEndpoint;
use crate::brep::{BrepSolid, ContactRow, EnvelopeFaceGeometry, FaceId};
use crate::config::SolverConfig;
use crate::contact::Funnel;
use crate::error::{Result, SweepError};
use crate::motion::{Trajectory, Vec3};
use crate::solve::funnel::refine_in_slice;
use crate::solve::trace_p_coc;

/// Band around the extreme times that counts as the bottom or top run.
pub const RUN_TOL: f64 = 1e-9;
/// Interior rows before adaptive refinement.
pub const BASE_ROWS: usize = 16;
/// Endpoint gap (summed over both ends) accepted when matching a curve of
/// contact to the boundary chains.
pub const ROW_MATCH_TOL: f64 = 1e-3;
/// Larger gap accepted when no other curve comes within ten times of it.
pub const ROW_MATCH_LOOSE: f64 = 5e-2;

/// A boundary sample of a contact face in its input face prism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrismSample {
    pub uv: [f64; 2],
    pub t: f64,
    pub position: Vec3,
    pub normal: Vec3,
}

/// One contact face before assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactFace {
    pub input_face: FaceId,
    /// Index of the loop in the face prism.
    pub loop_index: usize,
    /// Samples of each loop piece in traversal order, junctions repeated.
    pub piece_samples: Vec<Vec<PrismSample>>,
    /// `(t, q)` chart of the same samples.
    pub piece_charts: Vec<Vec<[f64; 2]>>,
    pub rows: Vec<ContactRow>,
}

impl ContactFace {
    pub fn t_range(&self) -> (f64, f64) {
        (self.rows[0].t, self.rows.last().map_or(self.rows[0].t, |r| r.t))
    }

    pub fn geometry(&self) -> EnvelopeFaceGeometry {
        EnvelopeFaceGeometry::Contact { input_face: self.input_face, rows: self.rows.clone() }
    }
}

/// Samples of a piece in traversal order, in the prism of the face owning
/// its co-edge.
pub fn piece_samples(
    solid: &BrepSolid,
    piece: &Piece,
    edges: &[Vec<EdgeComponent>],
    cocs: &[Vec<CocComponent>; 2],
    traj: &Trajectory,
) -> Result<Vec<PrismSample>> {
    let mut out = match piece.kind {
        PieceKind::Edge { coedge, comp } => {
            let comp = &edges[solid.coedges[coedge].edge][comp];
            let curve = solid.coedge_curve(coedge).ok_or_else(|| SweepError::InvalidInput(format!("co-edge {coedge} has no analytic curve")))?;
            (0..comp.params.len())
                .map(|k| PrismSample { uv: curve.map.eval(comp.params[k][0]).0, t: comp.params[k][1], position: comp.positions[k], normal: comp.normals[k] })
                .collect::<Vec<_>>()
        }
        PieceKind::Coc { side, index } => {
            let coc = &cocs[side as usize][index];
            let t = side.time(traj);
            (0..coc.points.len())
                .map(|k| PrismSample { uv: [coc.points[k].u, coc.points[k].v], t, position: coc.positions[k], normal: coc.normals[k] })
                .collect()
        }
    };
    if !piece.forward {
        out.reverse();
    }
    Ok(out)
}

fn unsupported(face: FaceId, reason: impl Into<String>) -> SweepError {
    SweepError::UnsupportedFaceTopology { face, reason: reason.into() }
}

/// Chart of a closed boundary given as a cyclic sample list.
#[derive(Debug, Clone, PartialEq)]
pub struct StripChart {
    /// `(t, q)` per sample.
    pub chart: Vec<[f64; 2]>,
    /// Samples of the `q = 0` and `q = 1` sides by ascending time, run
    /// junctions included.
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Fails unless the boundary is one bottom run, an ascending chain, one top
/// run and a descending chain.
pub fn strip_chart(face: FaceId, cyc: &[PrismSample]) -> Result<StripChart> {
    let n = cyc.len();
    if n < 3 {
        return Err(unsupported(face, "boundary has fewer than three samples"));
    }
    let t_min = cyc.iter().map(|s| s.t).fold(f64::INFINITY, f64::min);
    let t_max = cyc.iter().map(|s| s.t).fold(f64::NEG_INFINITY, f64::max);
    if !(t_max - t_min > 10.0 * RUN_TOL) {
        return Err(unsupported(face, "boundary spans no time interval"));
    }
    let at = |k: usize, level: f64| (cyc[k % n].t - level).abs() <= RUN_TOL;
    // runs as (first index, length), cyclic
    let runs = |level: f64| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..n {
            if at(k, level) && !at(k + n - 1, level) {
                let mut len = 1;
                while len < n && at(k + len, level) {
                    len += 1;
                }
                out.push((k, len));
            }
        }
        out
    };
    let (bottom, top) = (runs(t_min), runs(t_max));
    if bottom.len() != 1 || top.len() != 1 {
        return Err(unsupported(face, format!("{} bottom runs and {} top runs", bottom.len(), top.len())));
    }
    let (b0, bl) = bottom[0];
    let (t0, tl) = top[0];
    let mut chart = vec![[0.0, f64::NAN]; n];
    for (k, c) in chart.iter_mut().enumerate() {
        c[0] = cyc[k].t;
    }
    let mut place_run = |start: usize, len: usize, level: f64, descending: bool| {
        let idx: Vec<usize> = (0..len).map(|i| (start + i) % n).collect();
        let mut acc = vec![0.0];
        for w in idx.windows(2) {
            acc.push(acc.last().unwrap() + (cyc[w[1]].position - cyc[w[0]].position).norm());
        }
        let total = *acc.last().unwrap();
        for (i, &k) in idx.iter().enumerate() {
            let f = if total > 0.0 { acc[i] / total } else { 0.5 };
            chart[k] = [level, if descending { 1.0 - f } else { f }];
            if len == 1 {
                chart[k][1] = 0.5;
            }
        }
    };
    place_run(b0, bl, t_min, true);
    place_run(t0, tl, t_max, false);
    // ascending chain from the bottom run to the top run, then descending back
    let chain = |from: usize, to: usize| -> Vec<usize> {
        let mut out = Vec::new();
        let mut k = (from + 1) % n;
        while k != to {
            out.push(k);
            k = (k + 1) % n;
        }
        out
    };
    let left = chain((b0 + bl - 1) % n, t0);
    let right = chain((t0 + tl - 1) % n, b0);
    let monotone = |idx: &[usize], sign: f64| idx.windows(2).all(|w| sign * (cyc[w[1]].t - cyc[w[0]].t) >= -RUN_TOL);
    if !monotone(&left, 1.0) || !monotone(&right, -1.0) {
        return Err(unsupported(face, "boundary chain is not monotone in time"));
    }
    for &k in &left {
        chart[k] = [cyc[k].t.clamp(t_min, t_max), 0.0];
    }
    for &k in &right {
        chart[k] = [cyc[k].t.clamp(t_min, t_max), 1.0];
    }
    debug_assert!(chart.iter().all(|c| c[1].is_finite()));
    let mut left_all = vec![(b0 + bl - 1) % n];
    left_all.extend(&left);
    left_all.push(t0);
    let mut right_all = vec![b0];
    right_all.extend(right.iter().rev());
    right_all.push((t0 + tl - 1) % n);
    Ok(StripChart { chart, left: left_all, right: right_all })
}

/// Point of a chain (given by cyclic indices sorted by time) at time `t`.
fn chain_at(cyc: &[PrismSample], idx: &[usize], t: f64) -> [f64; 2] {
    let mut best = cyc[idx[0]].uv;
    for w in idx.windows(2) {
        let (a, b) = (&cyc[w[0]], &cyc[w[1]]);
        let (lo, hi) = (a.t.min(b.t), a.t.max(b.t));
        if t >= lo && t <= hi {
            let f = if hi > lo { (t - a.t) / (b.t - a.t) } else { 0.0 };
            return [a.uv[0] + f * (b.uv[0] - a.uv[0]), a.uv[1] + f * (b.uv[1] - a.uv[1])];
        }
        if (b.t - t).abs() < (cyc[idx[0]].t - t).abs() {
            best = b.uv;
        }
    }
    best
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Resample a polyline by arclength and polish each point onto the slice.
fn resample_row(funnel: &Funnel, t: f64, uv: &[[f64; 2]], n: usize, cfg: &SolverConfig, polish: bool) -> Result<ContactRow> {
    let mut acc = vec![0.0];
    for w in uv.windows(2) {
        acc.push(acc.last().unwrap() + dist2(w[0], w[1]));
    }
    let total = *acc.last().unwrap();
    let mut row = ContactRow { t, uv: Vec::with_capacity(n), points: Vec::with_capacity(n), normals: Vec::with_capacity(n) };
    let mut seg = 0;
    for i in 0..n {
        let target = total * i as f64 / (n - 1) as f64;
        while seg + 2 < acc.len() && acc[seg + 1] < target {
            seg += 1;
        }
        let mut p = if uv.len() == 1 || total == 0.0 {
            uv[0]
        } else {
            let span = acc[seg + 1] - acc[seg];
            let f = if span > 0.0 { ((target - acc[seg]) / span).clamp(0.0, 1.0) } else { 0.0 };
            [uv[seg][0] + f * (uv[seg + 1][0] - uv[seg][0]), uv[seg][1] + f * (uv[seg + 1][1] - uv[seg][1])]
        };
        if polish && i > 0 && i + 1 < n {
            let fp = refine_in_slice(funnel, p[0], p[1], t, cfg)?;
            p = [fp.u, fp.v];
        }
        row.uv.push(p);
        row.points.push(funnel.sweep_map(p[0], p[1], t)?.sigma.into());
        row.normals.push(funnel.moved_normal(p[0], p[1], t)?.into());
    }
    Ok(row)
}

/// Context for building the rows of one face prism.
pub struct RowBuilder<'a> {
    pub funnel: Funnel<'a>,
    pub cfg: &'a SolverConfig,
}

impl RowBuilder<'_> {
    /// The curve of contact at `t` running from `left` to `right`.
    pub fn row_between(&self, t: f64, left: [f64; 2], right: [f64; 2]) -> Result<ContactRow> {
        let arcs = trace_p_coc(&self.funnel, t, self.cfg)?;
        let mut scored: Vec<(f64, Vec<[f64; 2]>)> = Vec::new();
        for a in &arcs {
            if a.is_closed() {
                continue;
            }
            let (s, e) = (a.params[0], *a.params.last().unwrap());
            let fwd = dist2(s, left) + dist2(e, right);
            let bwd = dist2(e, left) + dist2(s, right);
            scored.push(if fwd <= bwd { (fwd, a.params.clone()) } else { (bwd, a.params.iter().rev().copied().collect()) });
        }
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        let Some((score, pts)) = scored.first().cloned() else {
            return Err(unsupported(self.funnel.face, format!("no curve of contact at t={t}")));
        };
        // chain points are interpolated in t, which loses accuracy where a
        // chain is nearly level; a looser match is kept when unambiguous
        let runner_up = scored.get(1).map_or(f64::INFINITY, |r| r.0);
        if score > ROW_MATCH_TOL && (score > ROW_MATCH_LOOSE || runner_up < 10.0 * score) {
            return Err(SweepError::TrimMismatch {
                face: self.funnel.face,
                reason: format!("curve of contact at t={t} misses the boundary chains by {score:e}"),
            });
        }
        resample_row(&self.funnel, t, &pts, self.cfg.row_samples, self.cfg, true)
    }
}

fn row_deviation(a: &ContactRow, m: &ContactRow, b: &ContactRow) -> f64 {
    m.points
        .iter()
        .zip(a.points.iter().zip(&b.points))
        .map(|(pm, (pa, pb))| (Vec3::from(*pm) - 0.5 * (Vec3::from(*pa) + Vec3::from(*pb))).norm())
        .fold(0.0, f64::max)
}

/// Build the contact face of loop `loop_index`.
pub fn build_contact_face(
    solid: &BrepSolid,
    fl: &FaceLoops,
    loop_index: usize,
    edges: &[Vec<EdgeComponent>],
    cocs: &[Vec<CocComponent>; 2],
    traj: &Trajectory,
    cfg: &SolverConfig,
) -> Result<ContactFace> {
    let face = fl.face;
    let patch = solid.patch(face).ok_or_else(|| SweepError::InvalidInput(format!("face {face} is not a patch")))?;
    let rb = RowBuilder { funnel: Funnel::new(face, patch, traj), cfg };
    let lp = &fl.loops[loop_index];
    let piece_samples = lp.iter().map(|&k| piece_samples(solid, &fl.pieces[k], edges, cocs, traj)).collect::<Result<Vec<_>>>()?;
    // cyclic list without the repeated junction samples
    let closed = fl.pieces[lp[0]].is_closed();
    let mut cyc = Vec::new();
    let mut offsets = Vec::new();
    for s in &piece_samples {
        offsets.push(cyc.len());
        cyc.extend_from_slice(&s[..if closed { s.len() } else { s.len() - 1 }]);
    }
    let StripChart { chart, left, right } = strip_chart(face, &cyc)?;
    let n = cyc.len();
    let piece_charts = piece_samples.iter().enumerate().map(|(i, s)| (0..s.len()).map(|j| chart[(offsets[i] + j) % n]).collect()).collect();
    let t_min = chart.iter().map(|c| c[0]).fold(f64::INFINITY, f64::min);
    let t_max = chart.iter().map(|c| c[0]).fold(f64::NEG_INFINITY, f64::max);
    let span = t_max - t_min;
    let run_row = |level: f64| -> Result<ContactRow> {
        let mut idx: Vec<usize> = (0..n).filter(|&k| (chart[k][0] - level).abs() <= RUN_TOL).collect();
        idx.sort_by(|&a, &b| chart[a][1].total_cmp(&chart[b][1]));
        let uv: Vec<[f64; 2]> = idx.iter().map(|&k| cyc[k].uv).collect();
        resample_row(&rb.funnel, level, &uv, cfg.row_samples, cfg, false)
    };
    // interior rows stay off the swept vertex times
    let vertex_times: Vec<f64> =
        lp.iter().zip(&piece_samples).filter(|(k, _)| matches!(fl.pieces[**k].start, CurveEndpoint::Swept { .. })).map(|(_, s)| s[0].t).collect();
    let nudge = |t: f64| {
        let mut t = t;
        for &tv in &vertex_times {
            if (t - tv).abs() < 1e-4 * span {
                t = tv + 1e-3 * span * if t >= tv { 1.0 } else { -1.0 };
            }
        }
        t.clamp(t_min + 1e-6 * span, t_max - 1e-6 * span)
    };
    let interior = |t: f64| rb.row_between(t, chain_at(&cyc, &left, t), chain_at(&cyc, &right, t));
    let mut rows = vec![run_row(t_min)?];
    for k in 1..=BASE_ROWS {
        let t = nudge(t_min + span * (k as f64 - 0.5) / BASE_ROWS as f64);
        rows.push(interior(t)?);
    }
    rows.push(run_row(t_max)?);
    // midpoint refinement until neighbouring rows are chordally close
    let mut i = 0;
    while i + 1 < rows.len() && rows.len() < cfg.max_coc_rows {
        let (a, b) = (&rows[i], &rows[i + 1]);
        let tm = 0.5 * (a.t + b.t);
        if b.t - a.t < 1e-6 * span {
            i += 1;
            continue;
        }
        let m = interior(nudge(tm))?;
        if row_deviation(a, &m, b) > cfg.coc_chordal_tol && m.t > a.t && m.t < b.t {
            rows.insert(i + 1, m);
        } else {
            i += 1;
        }
    }
    Ok(ContactFace { input_face: face, loop_index, piece_samples, piece_charts, rows })
}

/// Checks that every loop of a face prism bounds its own contact face.
/// Curves of contact at interior times link the loops their ends touch;
/// loops linked this way would bound one face with holes.
pub fn check_loop_groups(solid: &BrepSolid, fl: &FaceLoops, samples: &[Vec<PrismSample>], traj: &Trajectory, cfg: &SolverConfig) -> Result<()> {
    let n = fl.loops.len();
    if n < 2 {
        return Ok(());
    }
    let face = fl.face;
    let patch = solid.patch(face).ok_or_else(|| SweepError::InvalidInput(format!("face {face} is not a patch")))?;
    let funnel = Funnel::new(face, patch, traj);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let span = traj.t1() - traj.t0();
    let nearest = |uv: [f64; 2], t: f64| -> usize {
        let d = |s: &PrismSample| dist2(s.uv, uv).hypot((s.t - t) / span);
        (0..n)
            .min_by(|&a, &b| {
                let da = samples[a].iter().map(d).fold(f64::INFINITY, f64::min);
                let db = samples[b].iter().map(d).fold(f64::INFINITY, f64::min);
                da.total_cmp(&db)
            })
            .unwrap_or(0)
    };
    for k in 1..=7 {
        let t = traj.t0() + span * (k as f64 - 0.37) / 7.0;
        for arc in trace_p_coc(&funnel, t, cfg)? {
            if arc.is_closed() {
                continue;
            }
            let a = nearest(arc.params[0], t);
            let b = nearest(*arc.params.last().unwrap(), t);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    for i in 0..n {
        if find(&mut parent, i) != i {
            return Err(unsupported(face, format!("loop {i} shares a contact face with another loop")));
        }
    }
    Ok(())
}

/// Interpolated domain point of a row at `q`.
fn row_uv_at(row: &ContactRow, q: f64) -> [f64; 2] {
    let n = row.uv.len();
    if n == 1 {
        return row.uv[0];
    }
    let x = q * (n - 1) as f64;
    let i = (x.floor() as usize).min(n - 2);
    let f = x - i as f64;
    [row.uv[i][0] + f * (row.uv[i + 1][0] - row.uv[i][0]), row.uv[i][1] + f * (row.uv[i + 1][1] - row.uv[i][1])]
}

/// Point and unit normal of a contact face at chart coordinates `(q, t)`,
/// interpolated between rows and polished onto the curve of contact at `t`.
pub fn eval_envelope_point(solid: &BrepSolid, traj: &Trajectory, geom: &EnvelopeFaceGeometry, q: f64, t: f64, cfg: &SolverConfig) -> Result<(Vec3, Vec3)> {
    let EnvelopeFaceGeometry::Contact { input_face, rows } = geom else {
        return Err(SweepError::InvalidInput("chart evaluation needs a contact face".into()));
    };
    let (t_lo, t_hi) = (rows[0].t, rows.last().unwrap().t);
    if !(0.0..=1.0).contains(&q) || t < t_lo - RUN_TOL || t > t_hi + RUN_TOL {
        return Err(SweepError::OutsideTrim { q, t });
    }
    let patch = solid.patch(*input_face).ok_or_else(|| SweepError::InvalidInput(format!("face {input_face} is not a patch")))?;
    let funnel = Funnel::new(*input_face, patch, traj);
    let k = rows.partition_point(|r| r.t <= t).clamp(1, rows.len() - 1);
    let (a, b) = (&rows[k - 1], &rows[k]);
    let f = if b.t > a.t { ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0) } else { 0.0 };
    let (ua, ub) = (row_uv_at(a, q), row_uv_at(b, q));
    let uv = [ua[0] + f * (ub[0] - ua[0]), ua[1] + f * (ub[1] - ua[1])];
    let t = t.clamp(t_lo, t_hi);
    let on_boundary = q <= 0.0 || q >= 1.0 || f == 0.0 && (a.t - t_lo).abs() <= RUN_TOL || f == 1.0 && (b.t - t_hi).abs() <= RUN_TOL;
    let uv = if on_boundary {
        uv
    } else {
        let fp = refine_in_slice(&funnel, uv[0], uv[1], t, cfg)?;
        [fp.u, fp.v]
    };
    Ok((funnel.sweep_map(uv[0], uv[1], t)?.sigma, funnel.moved_normal(uv[0], uv[1], t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brep::test_solids::ellipsoid;
    use crate::contact::fixtures::arc;
    use crate::lift::fixtures::stages;
    use crate::lift::loops::{build_loops, face_pieces};
    use std::f64::consts::PI;

    fn sample(uv: [f64; 2], t: f64) -> PrismSample {
        PrismSample { uv, t, position: Vec3::new(uv[0], uv[1], t), normal: Vec3::z() }
    }

    #[test]
    fn chart_of_a_square_boundary() {
        // bottom run at t = 0 (q 1 -> 0), left chain up, top run, right chain down
        let cyc = vec![
            sample([1.0, 0.0], 0.0),
            sample([0.5, 0.0], 0.0),
            sample([0.0, 0.0], 0.0),
            sample([0.0, 0.0], 0.5),
            sample([0.0, 0.0], 1.0),
            sample([1.0, 0.0], 1.0),
            sample([1.0, 0.0], 0.5),
        ];
        let sc = strip_chart(0, &cyc).unwrap();
        assert_eq!(sc.chart, vec![[0.0, 1.0], [0.0, 0.5], [0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [1.0, 1.0], [0.5, 1.0]]);
        assert_eq!(sc.left, vec![2, 3, 4]);
        assert_eq!(sc.right, vec![0, 6, 5]);
        let poly: Vec<[f64; 2]> = sc.chart.clone();
        assert!(crate::brep::signed_area(&poly) > 0.0);
    }

    #[test]
    fn apex_and_non_monotone_boundaries() {
        let tri = vec![sample([1.0, 0.0], 0.0), sample([0.0, 0.0], 0.0), sample([0.5, 0.0], 1.0)];
        let sc = strip_chart(0, &tri).unwrap();
        assert_eq!(sc.chart[2], [1.0, 0.5]);
        let zig = vec![
            sample([1.0, 0.0], 0.0),
            sample([0.0, 0.0], 0.0),
            sample([0.0, 0.1], 0.6),
            sample([0.0, 0.2], 0.4),
            sample([0.0, 0.3], 1.0),
            sample([1.0, 0.3], 0.5),
        ];
        assert!(matches!(strip_chart(0, &zig), Err(SweepError::UnsupportedFaceTopology { .. })));
        let two_bottoms = vec![sample([1.0, 0.0], 0.0), sample([0.0, 0.0], 1.0), sample([0.0, 1.0], 0.0), sample([1.0, 1.0], 1.0)];
        assert!(strip_chart(0, &two_bottoms).is_err());
    }

    #[test]
    fn arc_sphere_faces_lie_on_the_envelope() {
        let st = stages(ellipsoid([1.0; 3]), arc(3.0, PI / 2.0));
        let mut ranges = Vec::new();
        for f in 0..st.solid.faces.len() {
            let fl = build_loops(&st.solid, f, face_pieces(&st.solid, f, &st.edges, &st.cocs[f])).unwrap();
            let cf = build_contact_face(&st.solid, &fl, 0, &st.edges, &st.cocs[f], &st.traj, &st.cfg).unwrap();
            ranges.push(cf.t_range());
            let geom = cf.geometry();
            for row in &cf.rows {
                for x in &row.points {
                    let r = x[0].hypot(x[1]);
                    assert!(((r - 3.0).powi(2) + x[2] * x[2] - 1.0).abs() < 1e-6);
                }
            }
            for (q, t) in [(0.3, 0.5), (0.7, 0.2), (0.5, 0.77)] {
                let (lo, hi) = cf.t_range();
                let t = lo + t * (hi - lo);
                let (x, n) = eval_envelope_point(&st.solid, &st.traj, &geom, q, t, &st.cfg).unwrap();
                let r = x[0].hypot(x[1]);
                assert!(((r - 3.0).powi(2) + x[2] * x[2] - 1.0).abs() < 1e-8);
                assert!((n.norm() - 1.0).abs() < 1e-9);
            }
            assert!(matches!(eval_envelope_point(&st.solid, &st.traj, &geom, 1.5, 0.1, &st.cfg), Err(SweepError::OutsideTrim { .. })));
        }
        ranges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let q = PI / 4.0;
        let expect = [(0.0, q), (0.0, q), (0.0, 2.0 * q), (0.0, 2.0 * q), (q, 2.0 * q), (q, 2.0 * q)];
        for (r, e) in ranges.iter().zip(expect) {
            assert!((r.0 - e.0).abs() < 1e-7 && (r.1 - e.1).abs() < 1e-7, "{r:?} vs {e:?}");
        }
    }
}
