//! Post-hoc audits of an envelope brep against its input and trajectory.

use serde::{Deserialize, Serialize};

use super::assemble::EnvelopeBrep;
use super::caps::cap_sign;
use super::faces::PrismSample;
use crate::brep::{BrepSolid, EntityKind, EnvelopeFaceGeometry, FaceGeometry, FaceId, SourceRole, VertexId};
use crate::config::SolverConfig;
use crate::contact::{orientation_sign, Funnel, FunnelPoint};
use crate::error::{Result, SweepError};
use crate::motion::{Trajectory, Vec3};
use crate::solve::funnel::{edge_field, refine_in_slice, refine_onto_funnel};
use crate::solve::roots_1d;
use crate::surface::SurfacePatch;

/// Outcome of one audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditResult {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    /// Worst measured value where the audit has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl AuditResult {
    fn new(name: &str, checked: usize, failures: usize) -> Self {
        AuditResult { name: name.into(), passed: failures == 0, checked, failures, metric: None, detail: String::new() }
    }

    fn with_metric(mut self, m: f64) -> Self {
        self.metric = Some(m);
        self
    }

    fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }
}

fn patch_of(solid: &BrepSolid, f: FaceId) -> Result<&SurfacePatch> {
    solid.patch(f).ok_or_else(|| SweepError::InvalidInput(format!("face {f} is not a patch")))
}

fn strictly_inside(patch: &SurfacePatch, u: f64, v: f64) -> bool {
    let [[u0, u1], [v0, v1]] = patch.domain;
    u > u0 && u < u1 && v > v0 && v < v1
}

/// Funnel points on the stored rows of every contact face.
pub fn row_points(input: &BrepSolid, traj: &Trajectory, env: &EnvelopeBrep) -> Result<Vec<FunnelPoint>> {
    let mut out = Vec::new();
    for cf in &env.stages.contact {
        let funnel = Funnel::new(cf.input_face, patch_of(input, cf.input_face)?, traj);
        for row in &cf.rows {
            for uv in &row.uv {
                out.push(funnel.jet(uv[0], uv[1], row.t)?);
            }
        }
    }
    Ok(out)
}

/// Sign of the projected frame determinant, from finite-difference
/// transport along the funnel. `None` when the stencil leaves the prism.
pub fn transported_det(funnel: &Funnel, fp: &FunnelPoint, cfg: &SolverConfig) -> Result<Option<f64>> {
    let fr = funnel.frame_and_theta(fp)?;
    let h = 1e-6;
    let p = fp.prism();
    let (t0, t1) = (funnel.traj.t0(), funnel.traj.t1());
    let mut cols = [[0.0; 2]; 2];
    for (i, dir) in [fr.alpha.normalize(), fr.beta.normalize()].into_iter().enumerate() {
        let mut uv = [[0.0; 2]; 2];
        for (j, sgn) in [1.0, -1.0].into_iter().enumerate() {
            let q = p + dir * (h * sgn);
            if !strictly_inside(funnel.patch, q[0], q[1]) || q[2] <= t0 || q[2] >= t1 {
                return Ok(None);
            }
            let (r, _) = refine_onto_funnel(funnel, q[0], q[1], q[2], cfg)?;
            uv[j] = [r.u, r.v];
        }
        cols[i] = [(uv[0][0] - uv[1][0]) / (2.0 * h), (uv[0][1] - uv[1][1]) / (2.0 * h)];
    }
    Ok(Some(cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0]))
}

/// The projection to the face domain preserves orientation exactly where
/// `-f_t > 0`.
pub fn audit_projection_orientation(input: &BrepSolid, traj: &Trajectory, env: &EnvelopeBrep, cfg: &SolverConfig) -> Result<AuditResult> {
    let mut checked = 0;
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    for fp in row_points(input, traj, env)? {
        if fp.ft.abs() <= 1e-4 {
            continue;
        }
        let funnel = Funnel::new(fp.face, patch_of(input, fp.face)?, traj);
        let Some(det) = transported_det(&funnel, &fp, cfg)? else { continue };
        checked += 1;
        let expect = orientation_sign(fp.ft) as f64;
        worst = worst.min(det * expect / (fp.fu * fp.fu + fp.fv * fp.fv) / fp.ft.abs());
        if det * expect <= 0.0 {
            failures += 1;
        }
    }
    let mut r = AuditResult::new("projection-orientation", checked, failures).with_metric(worst);
    if checked < 1000 {
        r.passed = false;
        r.detail = format!("only {checked} points with |f_t| > 1e-4");
    }
    Ok(r)
}

/// Points on the rows where `f_t` vanishes, located to `|f_t| < 1e-8`.
pub fn ft_zero_points(input: &BrepSolid, traj: &Trajectory, env: &EnvelopeBrep, cfg: &SolverConfig) -> Result<Vec<FunnelPoint>> {
    let mut out = Vec::new();
    for cf in &env.stages.contact {
        let funnel = Funnel::new(cf.input_face, patch_of(input, cf.input_face)?, traj);
        for row in &cf.rows[1..cf.rows.len() - 1] {
            let jets = row.uv.iter().map(|uv| funnel.jet(uv[0], uv[1], row.t)).collect::<Result<Vec<_>>>()?;
            for k in 1..jets.len().saturating_sub(2) {
                let (a, b) = (&jets[k], &jets[k + 1]);
                if a.ft * b.ft >= 0.0 {
                    continue;
                }
                let (mut lo, mut hi) = (0.0, 1.0);
                let mut best = *a;
                for _ in 0..80 {
                    let m = 0.5 * (lo + hi);
                    let fp = refine_in_slice(&funnel, a.u + m * (b.u - a.u), a.v + m * (b.v - a.v), row.t, cfg)?;
                    best = fp;
                    if fp.ft.abs() < 1e-12 {
                        break;
                    }
                    if (fp.ft > 0.0) == (a.ft > 0.0) {
                        lo = m;
                    } else {
                        hi = m;
                    }
                }
                if best.ft.abs() < 1e-8 {
                    out.push(best);
                }
            }
        }
    }
    Ok(out)
}

/// Preimage on the funnel of an envelope point near `p`: Gauss-Newton over
/// tangent coordinates `(a, b)` along the lifted frame.
fn pull_back(funnel: &Funnel, p: &FunnelPoint, y: Vec3, cfg: &SolverConfig) -> Result<FunnelPoint> {
    let fr = funnel.frame_unchecked(p)?;
    let (ea, eb) = (fr.alpha.normalize(), fr.beta.normalize());
    let base = p.prism();
    let at = |a: f64, b: f64| -> Result<(FunnelPoint, Vec3)> {
        let q = base + ea * a + eb * b;
        let (fp, _) = refine_onto_funnel(funnel, q[0], q[1], q[2], cfg)?;
        Ok((fp, funnel.sweep_map(fp.u, fp.v, fp.t)?.sigma))
    };
    let (mut a, mut b) = (0.0, 0.0);
    let d = 1e-7;
    for _ in 0..20 {
        let (fp, s) = at(a, b)?;
        let r = s - y;
        if r.norm() < 1e-13 {
            return Ok(fp);
        }
        let ja = (at(a + d, b)?.1 - at(a - d, b)?.1) / (2.0 * d);
        let jb = (at(a, b + d)?.1 - at(a, b - d)?.1) / (2.0 * d);
        let (g11, g12, g22) = (ja.dot(&ja), ja.dot(&jb), jb.dot(&jb));
        let (r1, r2) = (ja.dot(&r), jb.dot(&r));
        let det = g11 * g22 - g12 * g12;
        if !(det.abs() > 0.0) {
            break;
        }
        a -= (g22 * r1 - g12 * r2) / det;
        b -= (g11 * r2 - g12 * r1) / det;
    }
    Ok(at(a, b)?.0)
}

/// Where `f_t = 0` the domain part of the inverse sweep map kills the
/// velocity: `|J(V)| < 1e-3 |V|`.
pub fn audit_fold_velocity(input: &BrepSolid, traj: &Trajectory, env: &EnvelopeBrep, cfg: &SolverConfig) -> Result<AuditResult> {
    let pts = ft_zero_points(input, traj, env, cfg)?;
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for p in &pts {
        let funnel = Funnel::new(p.face, patch_of(input, p.face)?, traj);
        let sj = funnel.sweep_map(p.u, p.v, p.t)?;
        let vel = sj.st;
        let eps = 1e-5 / vel.norm();
        let plus = pull_back(&funnel, p, sj.sigma + vel * eps, cfg)?;
        let minus = pull_back(&funnel, p, sj.sigma - vel * eps, cfg)?;
        let j = ((plus.u - minus.u).powi(2) + (plus.v - minus.v).powi(2)).sqrt() / (2.0 * eps);
        let ratio = j / vel.norm();
        worst = worst.max(ratio);
        if ratio >= 1e-3 {
            failures += 1;
        }
    }
    let mut r = AuditResult::new("fold-velocity", pts.len(), failures).with_metric(worst);
    if pts.is_empty() {
        r = r.with_detail("no f_t = 0 points on the stored rows");
    }
    Ok(r)
}

fn source_face(out: &BrepSolid, f: FaceId) -> Option<FaceId> {
    let s = out.faces[f].source?;
    (s.kind == EntityKind::Face).then_some(s.entity)
}

/// Input faces adjacent across some edge, plus each face with itself.
fn input_adjacency(input: &BrepSolid) -> Vec<Vec<bool>> {
    let n = input.faces.len();
    let mut adj = vec![vec![false; n]; n];
    for (i, row) in adj.iter_mut().enumerate() {
        row[i] = true;
    }
    for uses in input.edge_uses() {
        for &a in &uses {
            for &b in &uses {
                let (fa, fb) = (input.face_of_coedge(a), input.face_of_coedge(b));
                adj[fa][fb] = true;
            }
        }
    }
    adj
}

/// Every output adjacency maps to an input adjacency, and every edge lies
/// over an input entity bounding both of its faces' sources.
pub fn audit_adjacency(input: &BrepSolid, env: &EnvelopeBrep) -> AuditResult {
    let out = &env.solid;
    let adj = input_adjacency(input);
    let mut checked = 0;
    let mut bad = Vec::new();
    for (e, uses) in out.edge_uses().iter().enumerate() {
        let faces: Vec<FaceId> = uses.iter().map(|&c| out.face_of_coedge(c)).collect();
        let srcs: Vec<Option<FaceId>> = faces.iter().map(|&f| source_face(out, f)).collect();
        for i in 0..srcs.len() {
            for j in i + 1..srcs.len() {
                checked += 1;
                match (srcs[i], srcs[j]) {
                    (Some(a), Some(b)) if adj[a][b] => {}
                    _ => bad.push(format!("edge {e}: faces {} and {}", faces[i], faces[j])),
                }
            }
        }
        if let Some(s) = out.edges[e].source {
            checked += 1;
            let ok = srcs.iter().all(|sf| match (s.kind, sf) {
                (EntityKind::Face, Some(f)) => *f == s.entity,
                (EntityKind::Edge, Some(f)) => input.face_coedges(*f).iter().any(|&c| input.coedges[c].edge == s.entity),
                _ => false,
            });
            if !ok {
                bad.push(format!("edge {e}: source {:?} does not bound its faces' sources", s.kind));
            }
        }
    }
    let r = AuditResult::new("adjacency", checked, bad.len());
    match bad.first() {
        Some(first) => r.with_detail(first.clone()),
        None => r,
    }
}

/// Prism samples of every output coedge, in traversal order.
fn coedge_samples(env: &EnvelopeBrep) -> Vec<(FaceId, Vec<&[PrismSample]>)> {
    let mut out = Vec::new();
    for (i, cf) in env.stages.contact.iter().enumerate() {
        out.push((i, cf.piece_samples.iter().map(Vec::as_slice).collect()));
    }
    let base = env.stages.contact.len();
    for (k, cap) in env.stages.caps.iter().enumerate() {
        let lists = std::iter::once(&cap.outer).chain(&cap.inner).flatten().map(|&p| cap.samples[p].as_slice()).collect();
        out.push((base + k, lists));
    }
    out
}

/// Outward normal crossed with the boundary tangent points into the face:
/// the pulled-back probe lands in the face's trimmed region.
pub fn audit_boundary_inward(input: &BrepSolid, traj: &Trajectory, env: &EnvelopeBrep) -> Result<AuditResult> {
    let (t0, t1) = (traj.t0(), traj.t1());
    let mut checked = 0;
    let mut bad = Vec::new();
    for (face, lists) in coedge_samples(env) {
        let geom = match &env.solid.faces[face].geometry {
            FaceGeometry::Envelope(g) => g,
            FaceGeometry::Patch(_) => continue,
        };
        let (input_face, cap) = match geom {
            EnvelopeFaceGeometry::Contact { input_face, .. } => (*input_face, None),
            EnvelopeFaceGeometry::Cap { input_face, side, .. } => (*input_face, Some(*side)),
        };
        let patch = patch_of(input, input_face)?;
        let funnel = Funnel::new(input_face, patch, traj);
        for samples in lists {
            let n = samples.len();
            if n < 3 {
                continue;
            }
            let on_time = |level: f64| samples.iter().all(|s| (s.t - level).abs() < 1e-12);
            let bottom = cap.is_none() && on_time(t0);
            let top = cap.is_none() && on_time(t1);
            for i in 1..=5 {
                let k = (i * (n - 1) / 6).clamp(1, n - 2);
                let s = &samples[k];
                let tau = samples[k + 1].position - samples[k - 1].position;
                let w = s.normal.cross(&tau);
                let sj = funnel.sweep_map(s.uv[0], s.uv[1], s.t)?;
                let (probe, ok) = match cap {
                    None => {
                        let fp = funnel.jet(s.uv[0], s.uv[1], s.t)?;
                        let fr = funnel.frame_unchecked(&fp)?;
                        let da = sj.su * fr.alpha[0] + sj.sv * fr.alpha[1] + sj.st * fr.alpha[2];
                        let db = sj.su * fr.beta[0] + sj.sv * fr.beta[1] + sj.st * fr.beta[2];
                        let (g11, g12, g22) = (da.dot(&da), da.dot(&db), db.dot(&db));
                        let det = g11 * g22 - g12 * g12;
                        let a = (g22 * da.dot(&w) - g12 * db.dot(&w)) / det;
                        let b = (g11 * db.dot(&w) - g12 * da.dot(&w)) / det;
                        let d = fr.alpha * a + fr.beta * b;
                        let q = Vec3::new(s.uv[0], s.uv[1], s.t) + d * (1e-5 / d.norm());
                        let inside = if bottom {
                            q[2] > t0
                        } else if top {
                            q[2] < t1
                        } else {
                            strictly_inside(patch, q[0], q[1])
                        };
                        (q, inside)
                    }
                    Some(side) => {
                        let (g11, g12, g22) = (sj.su.dot(&sj.su), sj.su.dot(&sj.sv), sj.sv.dot(&sj.sv));
                        let det = g11 * g22 - g12 * g12;
                        let a = (g22 * sj.su.dot(&w) - g12 * sj.sv.dot(&w)) / det;
                        let b = (g11 * sj.sv.dot(&w) - g12 * sj.su.dot(&w)) / det;
                        let l = a.hypot(b);
                        let q = Vec3::new(s.uv[0] + 1e-5 * a / l, s.uv[1] + 1e-5 * b / l, s.t);
                        let inside = strictly_inside(patch, q[0], q[1]) && cap_sign(side, funnel.value(q[0], q[1], s.t)?);
                        (q, inside)
                    }
                };
                checked += 1;
                if !ok {
                    bad.push(format!("face {face} probe {probe:?}"));
                }
            }
        }
    }
    let r = AuditResult::new("boundary-inward", checked, bad.len());
    Ok(match bad.first() {
        Some(first) => r.with_detail(first.clone()),
        None => r,
    })
}

/// Low-discrepancy fibre positions in (0, 1).
pub fn fibre_positions(n: usize) -> Vec<f64> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    (1..=n).map(|k| (0.5 + k as f64 * g).fract().clamp(1e-3, 1.0 - 1e-3)).collect()
}

/// Along fixed-`s` fibres of every edge with two or more components, the
/// stored orientation signs of consecutive crossings alternate.
pub fn audit_sign_alternation(input: &BrepSolid, traj: &Trajectory, env: &EnvelopeBrep, cfg: &SolverConfig, fibres: usize) -> Result<AuditResult> {
    let mut checked = 0;
    let mut failures = 0;
    let mut detail = String::new();
    for (e, comps) in env.stages.edges.iter().enumerate() {
        if comps.len() < 2 {
            continue;
        }
        let ef = edge_field(input, e, traj)?;
        for s0 in fibre_positions(fibres) {
            let roots = roots_1d(|t| ef.jet(s0, t).map(|(fp, _)| (fp.f, fp.ft)), traj.t0(), traj.t1(), cfg)?;
            // stored sign of the component crossing the fibre at each root
            let mut signs = Vec::new();
            for &t in &roots.roots {
                let mut best = (f64::INFINITY, 0);
                for c in comps {
                    for w in 0..c.params.len().saturating_sub(1) {
                        let (a, b) = (c.params[w], c.params[w + 1]);
                        if (a[0] - s0) * (b[0] - s0) > 0.0 || a[0] == b[0] {
                            continue;
                        }
                        let f = (s0 - a[0]) / (b[0] - a[0]);
                        let tt = a[1] + f * (b[1] - a[1]);
                        if (tt - t).abs() < best.0 {
                            best = ((tt - t).abs(), c.dir_sign * if b[0] > a[0] { 1 } else { -1 });
                        }
                    }
                }
                signs.push(best.1);
            }
            if signs.len() < 2 {
                continue;
            }
            checked += 1;
            let direct: Vec<i32> = roots.roots.iter().map(|&t| ef.jet(s0, t).map(|(fp, _)| orientation_sign(fp.ft))).collect::<Result<_>>()?;
            let alternates = signs.windows(2).all(|w| w[0] == -w[1] && w[0] != 0);
            if !alternates || signs != direct {
                failures += 1;
                if detail.is_empty() {
                    detail = format!("edge {e} fibre s={s0:.4}: stored {signs:?}, direct {direct:?}");
                }
            }
        }
    }
    Ok(AuditResult::new("sign-alternation", checked, failures).with_detail(detail))
}

/// Faces around vertex `v` in rotation order, following loop successors and
/// edge mates. `None` if the walk leaves a manifold neighbourhood.
pub fn faces_around(solid: &BrepSolid, v: VertexId) -> Option<Vec<FaceId>> {
    let uses = solid.edge_uses();
    let first = (0..solid.coedges.len()).find(|&c| solid.coedge_end(c) == v)?;
    let mut out = Vec::new();
    let mut c = first;
    for _ in 0..=solid.coedges.len() {
        out.push(solid.face_of_coedge(c));
        let lp = &solid.loops[solid.coedges[c].loop_id].coedges;
        let i = lp.iter().position(|&x| x == c)?;
        let next = lp[(i + 1) % lp.len()];
        let mate = *uses[solid.coedges[next].edge].iter().find(|&&m| m != next)?;
        if mate == first {
            return Some(out);
        }
        c = mate;
    }
    None
}

fn cyclic_eq(a: &[FaceId], b: &[FaceId]) -> bool {
    a.len() == b.len() && (0..a.len()).any(|k| (0..a.len()).all(|i| a[(i + k) % a.len()] == b[i]))
}

/// Around every swept vertex: valence equals the input valence, and the
/// rotation order of source faces is the input order where `-f_t > 0` and
/// its reverse otherwise.
pub fn audit_vertex_stars(input: &BrepSolid, env: &EnvelopeBrep) -> (AuditResult, AuditResult) {
    let out = &env.solid;
    let valence = |s: &BrepSolid, v: VertexId| s.edges.iter().map(|e| usize::from(e.start == v) + usize::from(e.end == v)).sum::<usize>();
    let (mut checked, mut val_bad, mut ord_bad) = (0, 0, 0);
    let (mut val_detail, mut ord_detail) = (String::new(), String::new());
    for (v, vert) in out.vertices.iter().enumerate() {
        let Some(src) = vert.source else { continue };
        if src.kind != EntityKind::Vertex || src.role != SourceRole::Contact {
            continue;
        }
        checked += 1;
        let z = src.entity;
        if valence(out, v) != valence(input, z) {
            val_bad += 1;
            if val_detail.is_empty() {
                val_detail = format!("vertex {v}: valence {} over input valence {}", valence(out, v), valence(input, z));
            }
        }
        let sw = &env.stages.swept[z][src.component];
        let lifted = faces_around(out, v).map(|fs| fs.iter().map(|&f| source_face(out, f)).collect::<Option<Vec<_>>>());
        let ok = match (lifted, faces_around(input, z)) {
            (Some(Some(l)), Some(mut i)) => {
                if orientation_sign(sw.ft) < 0 {
                    i.reverse();
                }
                cyclic_eq(&l, &i)
            }
            _ => false,
        };
        if !ok {
            ord_bad += 1;
            if ord_detail.is_empty() {
                ord_detail = format!("vertex {v} over input vertex {z}");
            }
        }
    }
    (
        AuditResult::new("vertex-valence", checked, val_bad).with_detail(val_detail),
        AuditResult::new("vertex-rotation", checked, ord_bad).with_detail(ord_detail),
    )
}

/// `V - E + 2F - L = 2 - 2g` on every shell.
pub fn audit_euler(env: &EnvelopeBrep) -> AuditResult {
    let s = &env.solid;
    let shells = s.shells();
    let mut bad = String::new();
    let mut failures = 0;
    for (k, faces) in shells.iter().enumerate() {
        let chi = s.shell_euler_poincare(faces);
        let expect = 2 - 2 * s.genus.get(k).copied().unwrap_or(0);
        if chi != expect {
            failures += 1;
            bad = format!("shell {k}: {chi} instead of {expect}");
        }
    }
    AuditResult::new("euler-poincare", shells.len(), failures).with_detail(bad)
}

/// Every audit that needs only the brep and the lifting record.
pub fn run_audits(input: &BrepSolid, traj: &Trajectory, env: &EnvelopeBrep, cfg: &SolverConfig) -> Result<Vec<AuditResult>> {
    let (valence, rotation) = audit_vertex_stars(input, env);
    let violations = env.solid.validate_solid(cfg.coincidence_tol);
    let mut validity = AuditResult::new("brep-validity", env.solid.faces.len(), violations.len());
    if let Some(v) = violations.first() {
        validity.detail = format!("{v:?}");
    }
    Ok(vec![
        validity,
        audit_euler(env),
        audit_adjacency(input, env),
        audit_projection_orientation(input, traj, env, cfg)?,
        audit_fold_velocity(input, traj, env, cfg)?,
        audit_boundary_inward(input, traj, env)?,
        audit_sign_alternation(input, traj, env, cfg, 50)?,
        valence,
        rotation,
    ])
}
