//! Pointwise sweep quantities: grazing function, funnel jet, sweep map,
//! lifted frame and orientation classification.

use serde::{Deserialize, Serialize};

use crate::brep::FaceId;
use crate::error::{Result, SweepError};
use crate::motion::{Trajectory, Vec3};
use crate::surface::SurfacePatch;

/// Below this `|f_t|` the orientation sign is left undetermined.
pub const ORIENTATION_DEADBAND: f64 = 1e-10;

/// `<A N, A' x + b'>`.
pub fn grazing(traj: &Trajectory, normal: &Vec3, x: &Vec3, t: f64) -> Result<f64> {
    let pose = traj.eval_pose(t)?;
    Ok((pose.rotation * normal).dot(&pose.velocity(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunnelPoint {
    pub face: FaceId,
    pub u: f64,
    pub v: f64,
    pub t: f64,
    pub f: f64,
    pub fu: f64,
    pub fv: f64,
    pub ft: f64,
}

impl FunnelPoint {
    pub fn grad(&self) -> Vec3 {
        Vec3::new(self.fu, self.fv, self.ft)
    }

    pub fn prism(&self) -> Vec3 {
        Vec3::new(self.u, self.v, self.t)
    }

    /// sign(-f_t) with a deadband.
    pub fn orientation_sign(&self) -> i32 {
        orientation_sign(self.ft)
    }
}

pub fn orientation_sign(ft: f64) -> i32 {
    if ft.abs() < ORIENTATION_DEADBAND {
        0
    } else if ft < 0.0 {
        1
    } else {
        -1
    }
}

/// Sweep map value and partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepJet {
    pub sigma: Vec3,
    pub su: Vec3,
    pub sv: Vec3,
    pub st: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTheta {
    pub alpha: Vec3,
    pub beta: Vec3,
    pub n: f64,
    pub m: f64,
    pub theta: f64,
    /// `|sigma_t - n sigma_u - m sigma_v|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointClass {
    OnCoc,
    LeftCapCandidate,
    RightCapCandidate,
    InteriorSweep,
}

/// A face of the input solid moving along the trajectory.
#[derive(Debug, Clone, Copy)]
pub struct Funnel<'a> {
    pub face: FaceId,
    pub patch: &'a SurfacePatch,
    pub traj: &'a Trajectory,
}

impl<'a> Funnel<'a> {
    pub fn new(face: FaceId, patch: &'a SurfacePatch, traj: &'a Trajectory) -> Self {
        Funnel { face, patch, traj }
    }

    /// `f` and its partials in `(u, v, t)`.
    pub fn jet(&self, u: f64, v: f64, t: f64) -> Result<FunnelPoint> {
        let pose = self.traj.eval_pose(t)?;
        let s = self.patch.eval_jet2(u, v)?;
        let n = self.patch.unit_normal_jet(u, v)?;
        let a = &pose.rotation;
        let ad = &pose.rotation_dot;
        let an = a * n.n;
        let vel = pose.velocity(&s.s);
        Ok(FunnelPoint {
            face: self.face,
            u,
            v,
            t,
            f: an.dot(&vel),
            fu: (a * n.nu).dot(&vel) + an.dot(&(ad * s.su)),
            fv: (a * n.nv).dot(&vel) + an.dot(&(ad * s.sv)),
            ft: (ad * n.n).dot(&vel) + an.dot(&pose.acceleration(&s.s)),
        })
    }

    /// `f` alone.
    pub fn value(&self, u: f64, v: f64, t: f64) -> Result<f64> {
        let pose = self.traj.eval_pose(t)?;
        let x = self.patch.eval(u, v)?;
        let n = self.patch.unit_normal(u, v)?;
        Ok((pose.rotation * n).dot(&pose.velocity(&x)))
    }

    pub fn sweep_map(&self, u: f64, v: f64, t: f64) -> Result<SweepJet> {
        let pose = self.traj.eval_pose(t)?;
        let s = self.patch.eval_jet2(u, v)?;
        Ok(SweepJet { sigma: pose.apply(&s.s), su: pose.rotation * s.su, sv: pose.rotation * s.sv, st: pose.velocity(&s.s) })
    }

    /// Moved outward normal `A(t) N(u, v)`.
    pub fn moved_normal(&self, u: f64, v: f64, t: f64) -> Result<Vec3> {
        let pose = self.traj.eval_pose(t)?;
        Ok(pose.rotation * self.patch.unit_normal(u, v)?)
    }

    /// Lifted frame and theta; errors only when `(f_u, f_v)` vanishes.
    pub fn frame_and_theta(&self, fp: &FunnelPoint) -> Result<FrameTheta> {
        let ft = self.frame_unchecked(fp)?;
        let g2 = fp.fu * fp.fu + fp.fv * fp.fv;
        if g2 < 1e-14 {
            return Err(SweepError::FrameDegenerate { norm2: g2 });
        }
        Ok(ft)
    }

    /// Frame and theta without the degeneracy check.
    pub fn frame_unchecked(&self, fp: &FunnelPoint) -> Result<FrameTheta> {
        let sj = self.sweep_map(fp.u, fp.v, fp.t)?;
        let (n, m, residual) = tangent_coords(&sj);
        Ok(FrameTheta {
            alpha: Vec3::new(-fp.fu * fp.ft, -fp.fv * fp.ft, fp.fu * fp.fu + fp.fv * fp.fv),
            beta: Vec3::new(-fp.fv, fp.fu, 0.0),
            n,
            m,
            theta: n * fp.fu + m * fp.fv - fp.ft,
            residual,
        })
    }

    pub fn classify_point(&self, u: f64, v: f64, t: f64, tol: f64) -> Result<PointClass> {
        let f = self.value(u, v, t)?;
        let at = |x: f64| (t - x).abs() <= 1e-12;
        Ok(if f.abs() <= tol {
            PointClass::OnCoc
        } else if at(self.traj.t0()) && f <= tol {
            PointClass::LeftCapCandidate
        } else if at(self.traj.t1()) && f >= -tol {
            PointClass::RightCapCandidate
        } else {
            PointClass::InteriorSweep
        })
    }
}

/// Least-squares `(n, m)` with `sigma_t ~ n sigma_u + m sigma_v`, and the residual.
pub fn tangent_coords(sj: &SweepJet) -> (f64, f64, f64) {
    let (a, b, c) = (sj.su.dot(&sj.su), sj.su.dot(&sj.sv), sj.sv.dot(&sj.sv));
    let (p, q) = (sj.su.dot(&sj.st), sj.sv.dot(&sj.st));
    let det = a * c - b * b;
    let n = (c * p - b * q) / det;
    let m = (a * q - b * p) / det;
    let residual = (sj.st - sj.su * n - sj.sv * m).norm();
    (n, m, residual)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralPositionReport {
    pub face: FaceId,
    pub funnel_samples: usize,
    pub min_grad_norm: f64,
    /// Funnel samples with `|grad f| < 1e-7`.
    pub small_gradient: Vec<[f64; 3]>,
    /// Connected groups of samples where `(f_u, f_v)` nearly vanishes.
    pub uv_critical_clusters: usize,
    pub uv_critical_samples: usize,
    /// Share of funnel samples with `|f_t|` below `1e-9` of the gradient scale.
    pub ft_zero_fraction: f64,
    pub violations: Vec<String>,
}

impl GeneralPositionReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Funnel<'_> {
    /// Scan grid lines of the prism along each axis, polish sign changes to
    /// funnel points by bisection and check the nondegeneracy assumptions.
    pub fn general_position_report(&self, density: usize) -> Result<GeneralPositionReport> {
        let n = density.max(4);
        let [[u0, u1], [v0, v1]] = self.patch.domain;
        let (t0, t1) = (self.traj.t0(), self.traj.t1());
        let lo = [u0, v0, t0];
        let hi = [u1, v1, t1];
        // Grid lines are offset from the domain boundary to avoid sampling
        // exactly on edges, where symmetric scenes put their special points.
        let coord = |axis: usize, i: usize| lo[axis] + (hi[axis] - lo[axis]) * (i as f64 + 0.37) / n as f64;
        let mut samples: Vec<FunnelPoint> = Vec::new();
        let steps = 4 * n;
        for axis in 0..3 {
            let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
            for i in 0..n {
                for j in 0..n {
                    let mut p = [0.0; 3];
                    p[a1] = coord(a1, i);
                    p[a2] = coord(a2, j);
                    let at = |x: f64| {
                        let mut q = p;
                        q[axis] = x;
                        q
                    };
                    let eval = |q: [f64; 3]| self.value(q[0], q[1], q[2]);
                    let mut prev_x = lo[axis];
                    let mut prev_f = eval(at(prev_x))?;
                    for k in 1..=steps {
                        let x = lo[axis] + (hi[axis] - lo[axis]) * k as f64 / steps as f64;
                        let fx = eval(at(x))?;
                        if fx == 0.0 {
                            let q = at(x);
                            samples.push(self.jet(q[0], q[1], q[2])?);
                        } else if prev_f * fx < 0.0 {
                            let (mut a, mut b, mut fa) = (prev_x, x, prev_f);
                            for _ in 0..60 {
                                let mid = 0.5 * (a + b);
                                let fm = eval(at(mid))?;
                                if fm * fa <= 0.0 {
                                    b = mid;
                                } else {
                                    a = mid;
                                    fa = fm;
                                }
                            }
                            let q = at(0.5 * (a + b));
                            samples.push(self.jet(q[0], q[1], q[2])?);
                        }
                        prev_x = x;
                        prev_f = fx;
                    }
                }
            }
        }

        let scale = samples.iter().map(|s| s.grad().norm()).fold(0.0, f64::max);
        let min_grad_norm = samples.iter().map(|s| s.grad().norm()).fold(f64::INFINITY, f64::min);
        let small_gradient: Vec<[f64; 3]> = samples.iter().filter(|s| s.grad().norm() < 1e-7).map(|s| s.prism().into()).collect();
        let critical: Vec<Vec3> = samples.iter().filter(|s| s.fu.hypot(s.fv) < 1e-3 * scale).map(|s| s.prism()).collect();
        let link = 3.0 * ((hi[0] - lo[0]).max(hi[1] - lo[1]).max(hi[2] - lo[2])) / n as f64;
        let uv_critical_clusters = count_clusters(&critical, link);
        let flat = samples.iter().filter(|s| s.ft.abs() < 1e-9 * scale).count();
        let ft_zero_fraction = if samples.is_empty() { 0.0 } else { flat as f64 / samples.len() as f64 };

        let mut violations = Vec::new();
        if !small_gradient.is_empty() {
            violations.push(format!("{} funnel samples with vanishing gradient", small_gradient.len()));
        }
        if !samples.is_empty() && critical.len() * 10 > samples.len() {
            violations.push(format!("(f_u, f_v) nearly vanishes on {} of {} samples", critical.len(), samples.len()));
        }
        if ft_zero_fraction > 0.05 {
            violations.push(format!("f_t vanishes on a 2D region ({:.0}% of samples)", 100.0 * ft_zero_fraction));
        }
        Ok(GeneralPositionReport {
            face: self.face,
            funnel_samples: samples.len(),
            min_grad_norm,
            small_gradient,
            uv_critical_clusters,
            uv_critical_samples: critical.len(),
            ft_zero_fraction,
            violations,
        })
    }
}

fn count_clusters(points: &[Vec3], link: f64) -> usize {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if (points[i] - points[j]).norm() < link {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::motion::{Easing, Motion, Trajectory};
    use crate::surface::{CubeFace, PatchKind, StarShape, SurfacePatch};
    use std::f64::consts::PI;

    pub fn unit_sphere_face(face: CubeFace) -> SurfacePatch {
        SurfacePatch::new(PatchKind::CubeSphere { face, shape: StarShape::Ellipsoid { semi_axes: [1.0; 3] } }, [[-1.0, 1.0], [-1.0, 1.0]])
    }

    pub fn arc(radius: f64, t1: f64) -> Trajectory {
        Trajectory::new(Motion::CircularArc { center: [0.0; 3], radius, axis: [0.0, 0.0, 1.0], angular_rate: 1.0, phase: 0.0 }, 0.0, t1).unwrap()
    }

    pub fn moving_trajectories() -> Vec<Trajectory> {
        vec![
            arc(3.0, PI / 2.0),
            Trajectory::new(Motion::Screw { point: [0.5, 0.0, 0.0], axis: [0.0, 1.0, 0.0], pitch: 0.4, angular_rate: 1.0 }, 0.0, 2.0).unwrap(),
            Trajectory::new(
                Motion::Linear {
                    origin: [0.0; 3],
                    displacement: [3.0, 1.0, 0.0],
                    easing: Easing::Smoothstep,
                    spin_axis: Some([1.0, 0.0, 1.0]),
                    spin_rate: 0.8,
                },
                0.0,
                1.0,
            )
            .unwrap(),
        ]
    }
}
