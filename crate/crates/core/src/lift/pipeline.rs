//! The full lift: vertices, edge curves, end-time curves, loops, faces, caps,
//! assembly and the simple-sweep guards.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::assemble::{assemble, EnvelopeBrep, EnvelopeCounts, LiftStages};
use super::caps::{build_caps, cap_segments};
use super::cocs::{compute_cocs, trim_params};
use super::coedges::compute_coedges;
use super::faces::{build_contact_face, check_loop_groups, piece_samples};
use super::loops::{build_loops, face_pieces};
use super::vertices::compute_vertices;
use super::SweepInput;
use crate::brep::{BrepSolid, CapSide, Violation};
use crate::config::SolverConfig;
use crate::contact::{Funnel, FunnelPoint};
use crate::error::{Result, SweepError};
use crate::motion::{Trajectory, Vec3};
use crate::solve::trace_p_coc;

/// Times at which curves of contact are compared pairwise.
pub const COC_PROBE_TIMES: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Summary of one sweep, audits included once run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: String,
    pub scene: String,
    pub counts: EnvelopeCounts,
    pub theta_min: f64,
    pub theta_points: usize,
    pub min_coc_distance: f64,
    pub tie_breaks: usize,
    pub rows: usize,
    pub violations: Vec<Violation>,
    pub audits: Vec<super::audit::AuditResult>,
    pub timings: Vec<StageTiming>,
}

pub const REPORT_SCHEMA: &str = "sweepforge-report/1";

struct Clock {
    last: Instant,
    out: Vec<StageTiming>,
}

impl Clock {
    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.out.push(StageTiming { stage: stage.into(), seconds: (now - self.last).as_secs_f64() });
        self.last = now;
    }
}

fn theta_at(solid: &BrepSolid, traj: &Trajectory, fp: &FunnelPoint) -> Result<f64> {
    let patch = solid.patch(fp.face).ok_or_else(|| SweepError::InvalidInput(format!("face {} is not a patch", fp.face)))?;
    Ok(Funnel::new(fp.face, patch, traj).frame_and_theta(fp)?.theta)
}

/// Smallest theta over every traced funnel point and row sample.
pub fn theta_scan(solid: &BrepSolid, traj: &Trajectory, st: &LiftStages) -> Result<(f64, usize)> {
    let mut pts: Vec<FunnelPoint> = Vec::new();
    for comps in &st.edges {
        for c in comps {
            pts.extend(&c.points);
        }
    }
    for sides in &st.cocs {
        for c in sides.iter().flatten() {
            pts.extend(&c.points);
        }
    }
    for cf in &st.contact {
        let patch = solid.patch(cf.input_face).ok_or_else(|| SweepError::InvalidInput("contact face without patch".into()))?;
        let funnel = Funnel::new(cf.input_face, patch, traj);
        for row in &cf.rows {
            for uv in &row.uv {
                pts.push(funnel.jet(uv[0], uv[1], row.t)?);
            }
        }
    }
    let thetas = pts.par_iter().map(|fp| theta_at(solid, traj, fp)).collect::<Result<Vec<f64>>>()?;
    Ok((thetas.iter().copied().fold(f64::INFINITY, f64::min), thetas.len()))
}

fn segment_distance(p0: Vec3, p1: Vec3, q0: Vec3, q1: Vec3) -> f64 {
    let (d1, d2, r) = (p1 - p0, q1 - q0, p0 - q0);
    let (a, e, f) = (d1.dot(&d1), d2.dot(&d2), d2.dot(&r));
    let (mut s, mut t);
    if a <= 1e-300 && e <= 1e-300 {
        return r.norm();
    }
    if a <= 1e-300 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= 1e-300 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            s = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
        }
    }
    ((p0 + d1 * s) - (q0 + d2 * t)).norm()
}

/// Minimum distance between curves of contact sampled at distinct times.
/// Probe times keep clear of `avoid`, where curves pass through corners.
pub fn min_coc_distance(solid: &BrepSolid, traj: &Trajectory, cfg: &SolverConfig, avoid: &[f64]) -> Result<f64> {
    let (t0, t1) = (traj.t0(), traj.t1());
    let span = t1 - t0;
    let times: Vec<f64> = (0..COC_PROBE_TIMES)
        .map(|k| {
            let t = t0 + span * (k as f64 + 0.5) / COC_PROBE_TIMES as f64;
            match avoid.iter().find(|a| (t - **a).abs() < 1e-3 * span) {
                Some(a) => a + 2e-3 * span * if t >= *a { 1.0 } else { -1.0 },
                None => t,
            }
        })
        .collect();
    let curves: Vec<Vec<Vec<Vec3>>> = times
        .par_iter()
        .map(|&t| {
            let mut out = Vec::new();
            for f in 0..solid.faces.len() {
                let Some(patch) = solid.patch(f) else { continue };
                let funnel = Funnel::new(f, patch, traj);
                for c in trace_p_coc(&funnel, t, cfg)? {
                    let mut pts = c.params.iter().map(|p| funnel.sweep_map(p[0], p[1], t).map(|j| j.sigma)).collect::<Result<Vec<_>>>()?;
                    if c.is_closed() {
                        pts.push(pts[0]);
                    }
                    out.push(pts);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..times.len()).flat_map(|i| (i + 1..times.len()).map(move |j| (i, j))).collect();
    let best = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut best = f64::INFINITY;
            for a in &curves[i] {
                for b in &curves[j] {
                    // nearest sample pair, then the segments around it
                    let mut near = (f64::INFINITY, 0, 0);
                    for (ka, pa) in a.iter().enumerate() {
                        for (kb, pb) in b.iter().enumerate() {
                            let d = (pa - pb).norm_squared();
                            if d < near.0 {
                                near = (d, ka, kb);
                            }
                        }
                    }
                    let (_, ka, kb) = near;
                    let sa = ka.saturating_sub(1)..(ka + 1).min(a.len() - 1).max(1);
                    let sb = kb.saturating_sub(1)..(kb + 1).min(b.len() - 1).max(1);
                    for x in sa {
                        for y in sb.clone() {
                            if x + 1 < a.len() && y + 1 < b.len() {
                                best = best.min(segment_distance(a[x], a[x + 1], b[y], b[y + 1]));
                            }
                        }
                    }
                    best = best.min(near.0.sqrt());
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

/// Lift the input solid to its envelope brep and report the guards.
pub fn sweep_envelope(input: &SweepInput) -> Result<(EnvelopeBrep, SweepReport)> {
    let SweepInput { name, solid, traj, config: cfg } = input;
    cfg.validate()?;
    let mut clock = Clock { last: Instant::now(), out: Vec::new() };
    let swept = (0..solid.vertices.len())
        .into_par_iter()
        .map(|z| compute_vertices(solid, z, traj, cfg))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at_stage("vertices"))?;
    clock.lap("vertices");
    let edges = (0..solid.edges.len())
        .into_par_iter()
        .map(|e| compute_coedges(solid, e, traj, cfg, &swept))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at_stage("coedges"))?;
    clock.lap("coedges");
    let trims = trim_params(&edges, solid.edges.len());
    let cocs = (0..solid.faces.len())
        .into_par_iter()
        .map(|f| -> Result<_> { Ok([compute_cocs(solid, f, CapSide::Left, traj, cfg, &trims)?, compute_cocs(solid, f, CapSide::Right, traj, cfg, &trims)?]) })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at_stage("cocs"))?;
    clock.lap("cocs");
    let loops = (0..solid.faces.len())
        .map(|f| build_loops(solid, f, face_pieces(solid, f, &edges, &cocs[f])))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at_stage("loops"))?;
    clock.lap("loops");
    let contact = loops
        .par_iter()
        .map(|fl| -> Result<Vec<_>> {
            let samples = fl
                .loops
                .iter()
                .map(|lp| -> Result<Vec<_>> {
                    let mut all = Vec::new();
                    for &k in lp {
                        all.extend(piece_samples(solid, &fl.pieces[k], &edges, &cocs[fl.face], traj)?);
                    }
                    Ok(all)
                })
                .collect::<Result<Vec<_>>>()?;
            check_loop_groups(solid, fl, &samples, traj, cfg)?;
            (0..fl.loops.len()).map(|i| build_contact_face(solid, fl, i, &edges, &cocs[fl.face], traj, cfg)).collect()
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at_stage("faces"))?
        .into_iter()
        .flatten()
        .collect();
    clock.lap("faces");
    let segments =
        CapSide::BOTH.map(|side| (0..solid.edges.len()).map(|e| cap_segments(solid, e, side, &trims[e][side as usize], traj)).collect::<Result<Vec<_>>>());
    let [l, r] = segments;
    let segments = [l.map_err(|e| e.at_stage("caps"))?, r.map_err(|e| e.at_stage("caps"))?];
    let mut caps = Vec::new();
    for side in CapSide::BOTH {
        for f in 0..solid.faces.len() {
            caps.extend(build_caps(solid, f, side, &segments[side as usize], &cocs[f][side as usize], traj, cfg).map_err(|e| e.at_stage("caps"))?);
        }
    }
    clock.lap("caps");
    let tie_breaks = loops.iter().map(|l| l.tie_breaks).sum();
    let st = LiftStages { swept, edges, trims, cocs, loops, contact, segments, caps };
    let (theta_min, theta_points) = theta_scan(solid, traj, &st).map_err(|e| e.at_stage("guards"))?;
    if !(theta_min > 0.0) {
        return Err(SweepError::NonSimpleSweepSuspected { reason: format!("theta reaches {theta_min:e} on a traced funnel point") }.at_stage("guards"));
    }
    let vertex_times: Vec<f64> = st.swept.iter().flatten().map(|v| v.t).collect();
    let min_coc_distance = min_coc_distance(solid, traj, cfg, &vertex_times).map_err(|e| e.at_stage("guards"))?;
    if min_coc_distance <= 10.0 * cfg.coincidence_tol {
        return Err(
            SweepError::NonSimpleSweepSuspected { reason: format!("curves of contact at distinct times come within {min_coc_distance:e}") }.at_stage("guards")
        );
    }
    clock.lap("guards");
    let rows = st.contact.iter().map(|c| c.rows.len()).sum();
    let env = assemble(solid, traj, st).map_err(|e| e.at_stage("assemble"))?;
    let violations = env.solid.validate_solid(cfg.coincidence_tol);
    clock.lap("assemble");
    let report = SweepReport {
        schema: REPORT_SCHEMA.into(),
        scene: name.clone(),
        counts: env.counts,
        theta_min,
        theta_points,
        min_coc_distance,
        tie_breaks,
        rows,
        violations,
        audits: Vec::new(),
        timings: clock.out,
    };
    Ok((env, report))
}
