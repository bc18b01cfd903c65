//! Acceptance suite. Each test checks one criterion and prints a single
//! `PASS`/`FAIL` line straight to stdout, so the lines show without
//! `--nocapture`.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;
use std::time::Instant;

use common::{hausdorff, marching_squares, polyline_segments, scene_input};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sweepforge::brep::{CapSide, EntityKind, EnvelopeFaceGeometry, FaceGeometry, SourceRole};
use sweepforge::cli::{run, BUNDLED, PARITY_RAYS, SIMPLE_SCENES};
use sweepforge::lift::audit::{audit_sign_alternation, run_audits, AuditResult};
use sweepforge::lift::caps::CapPieceKind;
use sweepforge::lift::faces::eval_envelope_point;
use sweepforge::lift::{sweep_envelope, EnvelopeBrep, SweepInput, SweepReport};
use sweepforge::meshout::{ray_parity, tessellate_envelope, Mesh};
use sweepforge::motion::Vec3;
use sweepforge::solve::funnel::{edge_field, trace_edge_funnel};
use sweepforge::surface::Sense;

const TORUS_TOL: f64 = 1e-6;
const TORUS_RUNTIME_S: f64 = 30.0;
const SCENE_RUNTIME_S: f64 = 60.0;
const MIN_ORIENTATION_POINTS: usize = 1000;
const FOLD_RATIO: f64 = 1e-3;
const LOOP_CLOSURE_TOL: f64 = 1e-6;
const MS_GRID: usize = 2048;
const MS_HAUSDORFF: f64 = 1e-4;
const FIBRES: usize = 50;
const MESH_DENSITY: usize = 24;

struct Run {
    input: SweepInput,
    env: EnvelopeBrep,
    report: SweepReport,
    mesh: Mesh,
    seconds: f64,
}

impl Run {
    fn audit(&self, name: &str) -> &AuditResult {
        self.report.audits.iter().find(|a| a.name == name).unwrap_or_else(|| panic!("no audit {name}"))
    }
}

fn runs() -> &'static Vec<(&'static str, Run)> {
    static RUNS: OnceLock<Vec<(&'static str, Run)>> = OnceLock::new();
    RUNS.get_or_init(|| {
        SIMPLE_SCENES
            .iter()
            .map(|&name| {
                let input = scene_input(name);
                let start = Instant::now();
                let (env, mut report) = sweep_envelope(&input).unwrap_or_else(|e| panic!("{name}: {e}"));
                report.audits = run_audits(&input.solid, &input.traj, &env, &input.config).unwrap();
                let mesh = tessellate_envelope(&env, MESH_DENSITY).unwrap();
                let seconds = start.elapsed().as_secs_f64();
                (name, Run { input, env, report, mesh, seconds })
            })
            .collect()
    })
}

fn scene(name: &str) -> &'static Run {
    &runs().iter().find(|(n, _)| *n == name).unwrap().1
}

fn verdict(n: usize, what: &str, failures: &[String], detail: &str) {
    let line = if failures.is_empty() {
        format!("criterion {n:>2} {what}: PASS ({detail})\n")
    } else {
        format!("criterion {n:>2} {what}: FAIL ({detail}; {})\n", failures.join("; "))
    };
    std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
    assert!(failures.is_empty(), "{line}");
}

fn torus_residual(p: Vec3, major: f64, minor: f64) -> f64 {
    ((p.x.hypot(p.y) - major).hypot(p.z) - minor).abs()
}

#[test]
fn criterion_01_torus_oracle() {
    let r = scene("arc-sphere");
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut contact_pts, mut worst) = (0usize, 0.0f64);
    for (f, face) in r.env.solid.faces.iter().enumerate() {
        let FaceGeometry::Envelope(geom @ EnvelopeFaceGeometry::Contact { rows, .. }) = &face.geometry else { continue };
        let mut pts: Vec<Vec3> = rows.iter().flat_map(|row| row.points.iter().map(|&p| Vec3::from(p))).collect();
        let (t0, t1) = (rows[0].t, rows.last().unwrap().t);
        for _ in 0..200 {
            let (q, t) = (rng.random_range(0.0..=1.0), rng.random_range(t0..=t1));
            pts.push(eval_envelope_point(&r.input.solid, &r.input.traj, geom, q, t, &r.input.config).unwrap().0);
        }
        pts.extend((0..r.mesh.triangles.len()).filter(|&k| r.mesh.face_ids[k] == f).flat_map(|k| r.mesh.triangles[k]).map(|i| r.mesh.vertex(i)));
        for p in pts {
            worst = worst.max(torus_residual(p, 3.0, 1.0));
            contact_pts += 1;
        }
    }
    if worst >= TORUS_TOL {
        fails.push(format!("contact point off the torus by {worst:e}"));
    }
    // left circle lies in y = 0, right circle in x = 0
    let (mut circle_pts, mut circle_worst) = (0usize, 0.0f64);
    for cap in &r.env.stages.caps {
        let left = cap.side == CapSide::Left;
        for (piece, samples) in cap.pieces.iter().zip(&cap.samples) {
            if !matches!(piece.kind, CapPieceKind::Coc { .. }) {
                continue;
            }
            for s in samples {
                let plane = if left { s.position.y } else { s.position.x };
                circle_worst = circle_worst.max(torus_residual(s.position, 3.0, 1.0)).max(plane.abs());
                circle_pts += 1;
            }
        }
    }
    if circle_pts == 0 || circle_worst >= TORUS_TOL {
        fails.push(format!("cap circles: {circle_pts} samples, worst {circle_worst:e}"));
    }
    if r.seconds >= TORUS_RUNTIME_S {
        fails.push(format!("runtime {:.1} s", r.seconds));
    }
    verdict(
        1,
        "torus oracle",
        &fails,
        &format!("{contact_pts} contact points worst {worst:.1e}, {circle_pts} circle samples worst {circle_worst:.1e}, {:.1} s", r.seconds),
    );
}

#[test]
fn criterion_02_projection_orientation() {
    let mut fails = Vec::new();
    let mut counts = Vec::new();
    for (name, r) in runs() {
        let a = r.audit("projection-orientation");
        counts.push(format!("{name} {}", a.checked));
        if a.checked < MIN_ORIENTATION_POINTS || a.failures > 0 {
            fails.push(format!("{name}: {} checked, {} mismatched", a.checked, a.failures));
        }
    }
    verdict(2, "projection orientation sign(-f_t)", &fails, &counts.join(", "));
}

#[test]
fn criterion_03_fold_velocity() {
    let a = scene("arc-sphere").audit("fold-velocity");
    let worst = a.metric.unwrap_or(f64::INFINITY);
    let mut fails = Vec::new();
    if a.checked == 0 || a.failures > 0 || !(worst < FOLD_RATIO) {
        fails.push(format!("{} points, {} over ratio, worst {worst:e}", a.checked, a.failures));
    }
    verdict(3, "fold velocity on arc-sphere", &fails, &format!("{} points, worst ratio {worst:.1e}", a.checked));
}

#[test]
fn criterion_04_adjacency() {
    let mut fails = Vec::new();
    let mut total = 0;
    for (name, r) in runs() {
        let a = r.audit("adjacency");
        total += a.checked;
        if a.checked == 0 || a.failures > 0 {
            fails.push(format!("{name}: {} counterexamples of {} ({})", a.failures, a.checked, a.detail));
        }
    }
    verdict(4, "adjacency through source refs", &fails, &format!("{total} adjacencies checked"));
}

#[test]
fn criterion_05_simple_sweep_guards() {
    let mut fails = Vec::new();
    let mut detail = Vec::new();
    for (name, r) in runs() {
        let tol = r.input.config.coincidence_tol;
        detail.push(format!("{name} theta {:.2e} dist {:.2e}", r.report.theta_min, r.report.min_coc_distance));
        if r.report.theta_points == 0 || !(r.report.theta_min > 0.0) {
            fails.push(format!("{name}: theta_min {} over {} points", r.report.theta_min, r.report.theta_points));
        }
        if !(r.report.min_coc_distance > 10.0 * tol) {
            fails.push(format!("{name}: coc distance {} vs tol {tol}", r.report.min_coc_distance));
        }
    }
    match sweep_envelope(&scene_input("arc-sphere-r05")) {
        Err(e) if e.is_non_simple() => detail.push("r=0.5 rejected".into()),
        Err(e) => fails.push(format!("r=0.5 failed with another error: {e}")),
        Ok(_) => fails.push("r=0.5 accepted as simple".into()),
    }
    verdict(5, "simple-sweep guards", &fails, &detail.join(", "));
}

#[test]
fn criterion_06_brep_validity() {
    let mut fails = Vec::new();
    let mut detail = Vec::new();
    for (name, r) in runs() {
        let s = &r.env.solid;
        for a in ["brep-validity", "euler-poincare"] {
            if !r.audit(a).passed {
                fails.push(format!("{name}: {a} audit failed ({})", r.audit(a).detail));
            }
        }
        // each edge used by two co-edges of opposite sense
        for (e, uses) in s.edge_uses().iter().enumerate() {
            let senses: BTreeSet<_> = uses.iter().map(|&c| s.coedges[c].sense == Sense::Forward).collect();
            if uses.len() != 2 || senses.len() != 2 {
                fails.push(format!("{name}: edge {e} has {} uses", uses.len()));
            }
        }
        // loops close both in topology and in space
        let mut gap: f64 = 0.0;
        for lp in &s.loops {
            for (k, &c) in lp.coedges.iter().enumerate() {
                let next = lp.coedges[(k + 1) % lp.coedges.len()];
                if s.coedge_end(c) != s.coedge_start(next) {
                    fails.push(format!("{name}: loop of face {} breaks after co-edge {c}", lp.face));
                }
                let edge = &s.edges[s.coedges[c].edge];
                let end = if s.coedges[c].sense == Sense::Forward { edge.curve.eval(1.0) } else { edge.curve.eval(0.0) };
                gap = gap.max((end - Vec3::from(s.vertices[s.coedge_end(c)].position)).norm());
            }
        }
        if gap >= LOOP_CLOSURE_TOL {
            fails.push(format!("{name}: loop closure gap {gap:e}"));
        }
        let chi = s.vertices.len() as i64 - s.edges.len() as i64 + s.faces.len() as i64;
        if matches!(*name, "capsule-helix" | "arc-sphere") && chi != 2 {
            fails.push(format!("{name}: V - E + F = {chi}"));
        }
        let rp = ray_parity(&r.mesh, PARITY_RAYS);
        if !rp.ok() || r.mesh.boundary_edge_count() != 0 || r.mesh.winding_disagreements() != 0 {
            fails.push(format!("{name}: mesh open {} / winding {} / rays {rp:?}", r.mesh.boundary_edge_count(), r.mesh.winding_disagreements()));
        }
        detail.push(format!("{name} chi {chi} rays {}/{}", rp.hit_rays - rp.odd_crossings.max(rp.inward_first_hits), rp.hit_rays));
    }
    verdict(6, "brep validity", &fails, &detail.join(", "));
}

#[test]
fn criterion_07_one_face_two_components() {
    let r = scene("split-face");
    let comps: BTreeSet<usize> = r
        .env
        .solid
        .faces
        .iter()
        .filter_map(|f| f.source)
        .filter(|s| s.kind == EntityKind::Face && s.role == SourceRole::Contact && s.entity == 0)
        .map(|s| s.component)
        .collect();
    let input_faces = r.input.solid.faces.len();
    let matching =
        r.env.solid.faces.iter().filter(|f| matches!(&f.geometry, FaceGeometry::Envelope(EnvelopeFaceGeometry::Contact { input_face: 0, .. }))).count();
    let mut fails = Vec::new();
    if comps.len() != 2 || matching != 2 {
        fails.push(format!("components {comps:?}, contact faces over face 0: {matching}"));
    }
    verdict(7, "one input face, two envelope faces", &fails, &format!("face 0 of {input_faces} -> components {comps:?}"));
}

#[test]
fn criterion_08_marching_squares_equivalence() {
    let mut fails = Vec::new();
    let (mut edges, mut worst) = (0usize, 0.0f64);
    for (name, _) in BUNDLED {
        let input = scene_input(name);
        let (solid, traj, cfg) = (&input.solid, &input.traj, &input.config);
        for e in 0..solid.edges.len() {
            let traced = trace_edge_funnel(solid, e, traj, cfg).unwrap_or_else(|err| panic!("{name} edge {e}: {err}"));
            let ef = edge_field(solid, e, traj).unwrap();
            let brute = marching_squares(|s, t| ef.jet(s, t).unwrap().0.f, [0.0, traj.t0()], [1.0, traj.t1()], MS_GRID);
            edges += 1;
            if traced.len() != brute.len() {
                fails.push(format!("{name} edge {e}: traced {} components, grid {}", traced.len(), brute.len()));
                continue;
            }
            let mut used = vec![false; brute.len()];
            for c in &traced {
                let segs = polyline_segments(&c.params, c.is_closed());
                let (k, h) =
                    brute.iter().enumerate().map(|(k, b)| (k, hausdorff(&c.params, &segs, &b.points, &b.segments))).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
                worst = worst.max(h);
                if used[k] || h >= MS_HAUSDORFF {
                    fails.push(format!("{name} edge {e}: Hausdorff {h:e} to grid component {k}"));
                }
                used[k] = true;
            }
        }
    }
    verdict(
        8,
        "traced edge funnels vs marching squares",
        &fails,
        &format!("{edges} edges of {} scenes, grid {MS_GRID}^2, worst Hausdorff {worst:.1e}", BUNDLED.len()),
    );
}

#[test]
fn criterion_09_sign_alternation() {
    let mut fails = Vec::new();
    let mut detail = Vec::new();
    let mut total = 0;
    for (name, r) in runs() {
        let a = audit_sign_alternation(&r.input.solid, &r.input.traj, &r.env, &r.input.config, FIBRES).unwrap();
        total += a.checked;
        detail.push(format!("{name} {}", a.checked));
        if a.failures > 0 {
            fails.push(format!("{name}: {} of {} fibres ({})", a.failures, a.checked, a.detail));
        }
    }
    if total == 0 {
        fails.push("no fibre crosses two components".into());
    }
    verdict(9, "sign alternation along fibres", &fails, &format!("fibres checked: {}", detail.join(", ")));
}

fn read(dir: &Path, file: String) -> Vec<u8> {
    std::fs::read(dir.join(&file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

fn report_without_timings(bytes: &[u8]) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(bytes).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn criterion_10_scale_runtime_determinism() {
    let mut fails = Vec::new();
    let mut detail = Vec::new();
    for (name, _) in BUNDLED {
        let n = scene_input(name).solid.faces.len();
        if !(3..=8).contains(&n) {
            fails.push(format!("{name}: {n} input faces"));
        }
    }
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for name in SIMPLE_SCENES {
        let mut secs = [0.0; 2];
        for (k, (dir, jobs)) in dirs.iter().zip(["1", "4"]).enumerate() {
            let argv = ["sweepforge", "sweep", "--scene", &format!("builtin:{name}"), "--out-dir", dir.path().to_str().unwrap(), "--jobs", jobs];
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let start = Instant::now();
            let code = run(argv, &mut out, &mut err);
            secs[k] = start.elapsed().as_secs_f64();
            if code != 0 {
                fails.push(format!("{name}: exit {code}: {}", String::from_utf8_lossy(&err).trim()));
            }
        }
        if secs.iter().any(|&s| s >= SCENE_RUNTIME_S) {
            fails.push(format!("{name}: runtime {secs:?} s"));
        }
        for ext in ["brep.json", "obj"] {
            if read(dirs[0].path(), format!("{name}.{ext}")) != read(dirs[1].path(), format!("{name}.{ext}")) {
                fails.push(format!("{name}.{ext} differs between runs"));
            }
        }
        let reports = dirs.each_ref().map(|d| report_without_timings(&read(d.path(), format!("{name}.report.json"))));
        if reports[0] != reports[1] {
            fails.push(format!("{name}.report.json differs outside timings"));
        }
        detail.push(format!("{name} {:.1}/{:.1} s", secs[0], secs[1]));
    }
    verdict(10, "scale, runtime and determinism", &fails, &detail.join(", "));
}
