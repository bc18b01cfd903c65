//! Constrained Delaunay tessellation of envelope faces in their charts.
//!
//! Contact faces are triangulated in `(t', q)` with `t'` the face time
//! rescaled to `[0, 1]`; caps in the patch domain. Boundary vertices are the
//! stored boundary samples, so neighbouring faces share them exactly and the
//! welded mesh closes up.

use std::collections::{HashMap, VecDeque};

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::Mesh;
use crate::brep::{BrepSolid, EnvelopeFaceGeometry, FaceGeometry};
use crate::config::SolverConfig;
use crate::error::{Result, SweepError};
use crate::lift::faces::{eval_envelope_point, PrismSample};
use crate::lift::EnvelopeBrep;
use crate::motion::{Trajectory, Vec3};

/// Triangles with smaller area are dropped.
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;
/// Vertices closer than this are merged across faces.
pub const WELD_TOL: f64 = 1e-6;
/// Chart triangles with `|2 area| <= SLIVER_FLATNESS * longest_edge^2` are flat.
const SLIVER_FLATNESS: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
struct ChartPoint {
    chart: [f64; 2],
    position: Vec3,
    normal: Vec3,
}

/// Boundary loops of one face in its chart; the first loop is outer.
struct FaceChart {
    loops: Vec<Vec<ChartPoint>>,
    interior: Vec<ChartPoint>,
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

fn segment_distance_2d(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let s = if l2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
    ((p[0] - a[0] - s * d[0]).powi(2) + (p[1] - a[1] - s * d[1]).powi(2)).sqrt()
}

fn polygon_distance(p: [f64; 2], poly: &[[f64; 2]]) -> f64 {
    (0..poly.len()).map(|i| segment_distance_2d(p, poly[i], poly[(i + 1) % poly.len()])).fold(f64::INFINITY, f64::min)
}

fn inside_region(p: [f64; 2], polys: &[Vec<[f64; 2]>]) -> bool {
    point_in_polygon(p, &polys[0]) && polys[1..].iter().all(|h| !point_in_polygon(p, h))
}

/// Concatenate piece samples into a closed loop, junctions once.
fn loop_points<'a>(pieces: impl Iterator<Item = (&'a [PrismSample], Vec<[f64; 2]>)>) -> Vec<ChartPoint> {
    let mut out: Vec<ChartPoint> = Vec::new();
    for (samples, chart) in pieces {
        for k in 0..samples.len() - 1 {
            let cp = ChartPoint { chart: chart[k], position: samples[k].position, normal: samples[k].normal };
            if out.last().is_none_or(|l| l.chart != cp.chart) {
                out.push(cp);
            }
        }
    }
    while out.len() > 1 && out[0].chart == out.last().unwrap().chart {
        out.pop();
    }
    out
}

fn contact_chart(env: &EnvelopeBrep, k: usize, density: usize) -> FaceChart {
    let cf = &env.stages.contact[k];
    let (t0, t1) = cf.t_range();
    let span = (t1 - t0).max(1e-300);
    let scale = |c: [f64; 2]| [(c[0] - t0) / span, c[1]];
    let outer = loop_points(cf.piece_samples.iter().zip(&cf.piece_charts).map(|(s, c)| (s.as_slice(), c.iter().map(|&x| scale(x)).collect())));
    let mut interior = Vec::new();
    let rows = &cf.rows;
    let inner_rows = rows.len().saturating_sub(2);
    let stride = inner_rows.div_ceil(density.max(1)).max(1);
    let poly: Vec<[f64; 2]> = outer.iter().map(|p| p.chart).collect();
    let dt = stride as f64 / rows.len().saturating_sub(1).max(1) as f64;
    for r in (1..rows.len().saturating_sub(1)).step_by(stride) {
        let row = &rows[r];
        let n = row.points.len();
        let col_stride = (n - 2).div_ceil(density.max(1)).max(1);
        let dq = col_stride as f64 / (n - 1) as f64;
        for j in (1..n - 1).step_by(col_stride) {
            let chart = [(row.t - t0) / span, j as f64 / (n - 1) as f64];
            if polygon_distance(chart, &poly) < 0.3 * dt.min(dq) {
                continue;
            }
            interior.push(ChartPoint { chart, position: Vec3::from(row.points[j]), normal: Vec3::from(row.normals[j]) });
        }
    }
    FaceChart { loops: vec![outer], interior }
}

fn cap_chart(env: &EnvelopeBrep, k: usize, face: usize, density: usize) -> Result<FaceChart> {
    let cap = &env.stages.caps[k];
    let FaceGeometry::Envelope(EnvelopeFaceGeometry::Cap { rotation, translation, patch, .. }) = &env.solid.faces[face].geometry else {
        return Err(SweepError::InvalidInput(format!("face {face} is not a cap")));
    };
    let lp = |ids: &[usize]| loop_points(ids.iter().map(|&i| (cap.samples[i].as_slice(), cap.samples[i].iter().map(|s| s.uv).collect())));
    let mut loops = vec![lp(&cap.outer)];
    loops.extend(cap.inner.iter().map(|l| lp(l)));
    let polys: Vec<Vec<[f64; 2]>> = loops.iter().map(|l| l.iter().map(|p| p.chart).collect()).collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &polys[0] {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let rot = nalgebra::Matrix3::from_fn(|i, j| rotation[i][j]);
    let tr = Vec3::from(*translation);
    let n = density.max(2);
    let h = ((hi[0] - lo[0]).max(hi[1] - lo[1]) / n as f64).max(1e-12);
    let mut interior = Vec::new();
    for i in 1..n {
        for j in 1..n {
            let uv = [lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64, lo[1] + (hi[1] - lo[1]) * j as f64 / n as f64];
            if !inside_region(uv, &polys) || polys.iter().any(|p| polygon_distance(uv, p) < 0.3 * h) {
                continue;
            }
            interior.push(ChartPoint { chart: uv, position: rot * patch.eval(uv[0], uv[1])? + tr, normal: rot * patch.unit_normal(uv[0], uv[1])? });
        }
    }
    Ok(FaceChart { loops, interior })
}

/// Twice the signed area of a chart triangle.
fn area2(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
}

/// Replace flat triangles (three nearly collinear boundary samples) by
/// splitting the neighbour across their longest edge at the middle vertex.
/// Chart orientation is counterclockwise throughout.
fn remove_slivers(tris: &mut Vec<[usize; 3]>, chart: &[[f64; 2]]) {
    let flat = |t: &[usize; 3]| {
        let [a, b, c] = t.map(|i| chart[i]);
        let l2 = [(a, b), (b, c), (c, a)].iter().map(|(p, q)| (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).fold(0.0, f64::max);
        area2(a, b, c).abs() <= SLIVER_FLATNESS * l2
    };
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for (k, t) in tris.iter().enumerate() {
        for i in 0..3 {
            edges.insert((t[i], t[(i + 1) % 3]), k);
        }
    }
    let mut alive = vec![true; tris.len()];
    let mut queue: Vec<usize> = (0..tris.len()).filter(|&k| flat(&tris[k])).collect();
    let mut budget = 4 * tris.len() + 16;
    while let Some(k) = queue.pop() {
        if !alive[k] || !flat(&tris[k]) || budget == 0 {
            continue;
        }
        budget -= 1;
        let t = tris[k];
        // rotate so that (p, q) is the longest edge and m the middle vertex
        let len2 = |i: usize| {
            let (p, q) = (chart[t[i]], chart[t[(i + 1) % 3]]);
            (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
        };
        let i = (0..3).max_by(|&a, &b| len2(a).total_cmp(&len2(b))).unwrap();
        let (p, q, m) = (t[i], t[(i + 1) % 3], t[(i + 2) % 3]);
        let Some(&n) = edges.get(&(q, p)).filter(|&&n| alive[n] && n != k) else {
            continue;
        };
        let nt = tris[n];
        let j = (0..3).find(|&j| nt[j] == q && nt[(j + 1) % 3] == p).unwrap();
        let x = nt[(j + 2) % 3];
        for tri in [t, nt] {
            for e in 0..3 {
                edges.remove(&(tri[e], tri[(e + 1) % 3]));
            }
        }
        alive[k] = false;
        tris[n] = [q, m, x];
        tris.push([m, p, x]);
        alive.push(true);
        for kk in [n, tris.len() - 1] {
            let tri = tris[kk];
            for e in 0..3 {
                edges.insert((tri[e], tri[(e + 1) % 3]), kk);
            }
            if flat(&tri) {
                queue.push(kk);
            }
        }
    }
    let mut k = 0;
    tris.retain(|_| {
        k += 1;
        alive[k - 1]
    });
}

/// Cosine between a triangle's geometric normal and its summed vertex normals.
fn winding_cos(mesh: &Mesh, t: [usize; 3]) -> f64 {
    let [a, b, c] = t.map(|i| mesh.vertex(i));
    let n = (b - a).cross(&(c - a));
    let m: Vec3 = t.iter().map(|&i| Vec3::from(mesh.normals[i])).sum();
    n.dot(&m) / (n.norm() * m.norm()).max(1e-300)
}

/// Flip interior edges of triangles that fold over in space, when the
/// flip improves the worse of the two triangles.
fn repair_winding(mesh: &Mesh, tris: &mut [[usize; 3]]) {
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for (k, t) in tris.iter().enumerate() {
        for i in 0..3 {
            edges.insert((t[i], t[(i + 1) % 3]), k);
        }
    }
    for _ in 0..64 {
        let mut changed = false;
        for k in 0..tris.len() {
            if winding_cos(mesh, tris[k]) > 0.0 {
                continue;
            }
            let t = tris[k];
            let mut best: Option<(f64, usize, [usize; 3], [usize; 3])> = None;
            for i in 0..3 {
                let (a, b, x) = (t[i], t[(i + 1) % 3], t[(i + 2) % 3]);
                let Some(&n) = edges.get(&(b, a)) else { continue };
                let nt = tris[n];
                let j = (0..3).find(|&j| nt[j] == b && nt[(j + 1) % 3] == a).unwrap();
                let y = nt[(j + 2) % 3];
                if x == y || edges.contains_key(&(x, y)) || edges.contains_key(&(y, x)) {
                    continue;
                }
                let (t1, t2) = ([a, y, x], [b, x, y]);
                let before = winding_cos(mesh, t).min(winding_cos(mesh, nt));
                let score = winding_cos(mesh, t1).min(winding_cos(mesh, t2));
                if score > before + 1e-9 && best.is_none_or(|bst| score > bst.0) {
                    best = Some((score, n, t1, t2));
                }
            }
            if let Some((_, n, t1, t2)) = best {
                for tri in [tris[k], tris[n]] {
                    for e in 0..3 {
                        edges.remove(&(tri[e], tri[(e + 1) % 3]));
                    }
                }
                tris[k] = t1;
                tris[n] = t2;
                for kk in [k, n] {
                    let tri = tris[kk];
                    for e in 0..3 {
                        edges.insert((tri[e], tri[(e + 1) % 3]), kk);
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

fn triangulate(face: usize, fc: &FaceChart) -> Result<Mesh> {
    let fail = |reason: String| SweepError::TrimTriangulationFailure { face, reason };
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut mesh = Mesh::default();
    let mut chart: Vec<[f64; 2]> = Vec::new();
    // spade vertex index -> mesh vertex
    let mut slot: Vec<Option<usize>> = Vec::new();
    let mut insert = |cdt: &mut ConstrainedDelaunayTriangulation<Point2<f64>>, mesh: &mut Mesh, chart: &mut Vec<[f64; 2]>, p: &ChartPoint| -> Result<_> {
        let h = cdt.insert(Point2::new(p.chart[0], p.chart[1])).map_err(|e| fail(format!("{e:?}")))?;
        if slot.len() <= h.index() {
            slot.resize(h.index() + 1, None);
        }
        if slot[h.index()].is_none() {
            slot[h.index()] = Some(mesh.push_vertex(p.position, p.normal));
            chart.push(p.chart);
        }
        Ok(h)
    };
    for lp in &fc.loops {
        let handles = lp.iter().map(|p| insert(&mut cdt, &mut mesh, &mut chart, p)).collect::<Result<Vec<_>>>()?;
        for i in 0..handles.len() {
            let (a, b) = (handles[i], handles[(i + 1) % handles.len()]);
            if a == b {
                continue;
            }
            if !cdt.can_add_constraint(a, b) {
                return Err(fail(format!("boundary segment {i} crosses another")));
            }
            cdt.add_constraint(a, b);
        }
    }
    let polys: Vec<Vec<[f64; 2]>> = fc.loops.iter().map(|l| l.iter().map(|p| p.chart).collect()).collect();
    for p in &fc.interior {
        if inside_region(p.chart, &polys) {
            insert(&mut cdt, &mut mesh, &mut chart, p)?;
        }
    }
    // inside = odd number of constraint crossings from the outer face
    let mut depth: HashMap<usize, u32> = HashMap::new();
    let mut queue: VecDeque<(usize, u32)> = VecDeque::new();
    let mut handles = HashMap::new();
    for f in cdt.inner_faces() {
        handles.insert(f.fix().index(), f);
    }
    for e in cdt.convex_hull() {
        for side in [e, e.rev()] {
            if let Some(f) = side.face().as_inner() {
                queue.push_back((f.fix().index(), u32::from(e.is_constraint_edge())));
            }
        }
    }
    while let Some((f, d)) = queue.pop_front() {
        if depth.get(&f).is_some_and(|&old| old <= d) {
            continue;
        }
        depth.insert(f, d);
        for e in handles[&f].adjacent_edges() {
            if let Some(nb) = e.rev().face().as_inner() {
                let c = u32::from(e.is_constraint_edge());
                let item = (nb.fix().index(), d + c);
                if c == 0 {
                    queue.push_front(item)
                } else {
                    queue.push_back(item)
                }
            }
        }
    }
    let mut tris: Vec<[usize; 3]> = Vec::new();
    for f in cdt.inner_faces() {
        if depth.get(&f.fix().index()).is_none_or(|d| d % 2 == 0) {
            continue;
        }
        let tri = f.vertices().map(|v| slot.get(v.fix().index()).copied().flatten());
        let [Some(a), Some(b), Some(c)] = tri else {
            return Err(fail("triangle vertex without a sample".into()));
        };
        tris.push([a, b, c]);
    }
    remove_slivers(&mut tris, &chart);
    // one flip for the whole face keeps neighbouring triangles consistent
    let agreement: f64 = tris
        .iter()
        .map(|t| {
            let n = (mesh.vertex(t[1]) - mesh.vertex(t[0])).cross(&(mesh.vertex(t[2]) - mesh.vertex(t[0])));
            n.dot(&t.iter().map(|&i| Vec3::from(mesh.normals[i])).sum::<Vec3>())
        })
        .sum();
    if agreement < 0.0 {
        for t in &mut tris {
            t.swap(1, 2);
        }
    }
    repair_winding(&mesh, &mut tris);
    for t in tris {
        let n = (mesh.vertex(t[1]) - mesh.vertex(t[0])).cross(&(mesh.vertex(t[2]) - mesh.vertex(t[0])));
        if 0.5 * n.norm() <= MIN_TRIANGLE_AREA {
            continue;
        }
        mesh.triangles.push(t);
        mesh.face_ids.push(face);
    }
    Ok(mesh)
}

/// Mesh of one face of the envelope, unwelded.
pub fn tessellate_face(env: &EnvelopeBrep, face: usize, density: usize) -> Result<Mesh> {
    let nc = env.stages.contact.len();
    let fc = if face < nc { contact_chart(env, face, density) } else { cap_chart(env, face - nc, face, density)? };
    triangulate(face, &fc)
}

/// Welded, outward-wound mesh of the whole envelope.
pub fn tessellate_envelope(env: &EnvelopeBrep, density: usize) -> Result<Mesh> {
    let mut mesh = Mesh::default();
    for f in 0..env.solid.faces.len() {
        mesh.append(tessellate_face(env, f, density)?);
    }
    Ok(mesh.weld(WELD_TOL))
}

/// Regular `n x n` node grid over the chart of a contact face, two triangles
/// per cell, evaluated through the face geometry.
pub fn tessellate_envelope_face(solid: &BrepSolid, traj: &Trajectory, geom: &EnvelopeFaceGeometry, n: usize, cfg: &SolverConfig) -> Result<Mesh> {
    let EnvelopeFaceGeometry::Contact { rows, .. } = geom else {
        return Err(SweepError::InvalidInput("grid tessellation needs a contact face".into()));
    };
    if n < 2 {
        return Err(SweepError::InvalidInput(format!("grid density {n} below 2")));
    }
    let (t0, t1) = (rows[0].t, rows.last().unwrap().t);
    let mut mesh = Mesh::default();
    for i in 0..n {
        let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let (p, nrm) = eval_envelope_point(solid, traj, geom, j as f64 / (n - 1) as f64, t, cfg)?;
            mesh.push_vertex(p, nrm);
        }
    }
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let (a, b, c, d) = (i * n + j, i * n + j + 1, (i + 1) * n + j + 1, (i + 1) * n + j);
            for mut tri in [[a, b, c], [a, c, d]] {
                let nr = (mesh.vertex(tri[1]) - mesh.vertex(tri[0])).cross(&(mesh.vertex(tri[2]) - mesh.vertex(tri[0])));
                let avg: Vec3 = tri.iter().map(|&k| Vec3::from(mesh.normals[k])).sum();
                if nr.dot(&avg) < 0.0 {
                    tri.swap(1, 2);
                }
                mesh.triangles.push(tri);
                mesh.face_ids.push(0);
            }
        }
    }
    Ok(mesh)
}
