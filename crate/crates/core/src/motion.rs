//! Rigid-motion trajectories `t -> (A(t), b(t))` with analytic first and
//! second derivatives.

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SweepError};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Slack on the interval test so that endpoints computed in floating point
/// (e.g. `pi / 2`) are accepted.
const DOMAIN_SLACK: f64 = 1e-12;

/// Pose at one instant together with its first and second time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseJet {
    pub rotation: Mat3,
    pub translation: Vec3,
    pub rotation_dot: Mat3,
    pub translation_dot: Vec3,
    pub rotation_ddot: Mat3,
    pub translation_ddot: Vec3,
}

impl PoseJet {
    pub fn apply(&self, x: &Vec3) -> Vec3 {
        self.rotation * x + self.translation
    }

    /// Velocity of the body point `x`.
    pub fn velocity(&self, x: &Vec3) -> Vec3 {
        self.rotation_dot * x + self.translation_dot
    }

    pub fn acceleration(&self, x: &Vec3) -> Vec3 {
        self.rotation_ddot * x + self.translation_ddot
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Easing {
    #[default]
    None,
    /// Cubic `3s^2 - 2s^3` over the interval.
    Smoothstep,
}

impl Easing {
    fn eval(self, s: f64) -> (f64, f64, f64) {
        match self {
            Easing::None => (s, 1.0, 0.0),
            Easing::Smoothstep => (s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s), 6.0 - 12.0 * s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub time: f64,
    /// Quaternion as `[w, x, y, z]`.
    pub rotation: [f64; 4],
    pub position: [f64; 3],
}

/// The family of motions. Angles are radians, pitch is length per radian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Motion {
    /// `b(t) = origin + ease(s) * displacement`, optionally spinning about
    /// `spin_axis` through the moving origin.
    Linear {
        origin: [f64; 3],
        displacement: [f64; 3],
        #[serde(default)]
        easing: Easing,
        #[serde(default)]
        spin_axis: Option<[f64; 3]>,
        #[serde(default)]
        spin_rate: f64,
    },
    /// Pure translation along a circle of `radius` about `axis` through `center`.
    CircularArc {
        #[serde(default)]
        center: [f64; 3],
        radius: f64,
        #[serde(default = "default_axis")]
        axis: [f64; 3],
        #[serde(default = "default_rate")]
        angular_rate: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Pure translation along a circular helix.
    Helix {
        #[serde(default)]
        center: [f64; 3],
        radius: f64,
        pitch: f64,
        #[serde(default = "default_axis")]
        axis: [f64; 3],
        #[serde(default = "default_rate")]
        angular_rate: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Rotation by `angular_rate * t` about the line through `point` along
    /// `axis`, combined with `pitch * angle` advance along the axis.
    Screw {
        #[serde(default)]
        point: [f64; 3],
        #[serde(default = "default_axis")]
        axis: [f64; 3],
        pitch: f64,
        angular_rate: f64,
    },
    /// C² spline through uniformly timed keyframes.
    KeyframeSpline { keys: Vec<Keyframe> },
}

fn default_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn default_rate() -> f64 {
    1.0
}

/// A motion restricted to its closed time interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    #[serde(flatten)]
    pub motion: Motion,
    pub interval: [f64; 2],
    #[serde(skip)]
    spline: Option<KeyframeSplineData>,
}

impl Trajectory {
    pub fn new(motion: Motion, t0: f64, t1: f64) -> Result<Self> {
        let mut traj = Trajectory { motion, interval: [t0, t1], spline: None };
        traj.prepare()?;
        Ok(traj)
    }

    /// Validate parameters and build derived data. Must be called after
    /// deserializing.
    pub fn prepare(&mut self) -> Result<()> {
        let [t0, t1] = self.interval;
        if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
            return Err(SweepError::InvalidInput(format!("bad interval [{t0}, {t1}]")));
        }
        match &self.motion {
            Motion::Linear { spin_axis, .. } => {
                if let Some(a) = spin_axis {
                    unit(a, "spin_axis")?;
                }
            }
            Motion::CircularArc { axis, radius, .. } | Motion::Helix { axis, radius, .. } => {
                unit(axis, "axis")?;
                if !(*radius > 0.0) {
                    return Err(SweepError::InvalidInput("radius must be positive".into()));
                }
            }
            Motion::Screw { axis, .. } => {
                unit(axis, "axis")?;
            }
            Motion::KeyframeSpline { keys } => {
                self.spline = Some(KeyframeSplineData::interpolating(keys)?);
                let first = keys[0].time;
                let last = keys[keys.len() - 1].time;
                if t0 < first - DOMAIN_SLACK || t1 > last + DOMAIN_SLACK {
                    return Err(SweepError::InvalidInput("interval exceeds keyframe range".into()));
                }
            }
        }
        Ok(())
    }

    pub fn t0(&self) -> f64 {
        self.interval[0]
    }

    pub fn t1(&self) -> f64 {
        self.interval[1]
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.interval[0] - DOMAIN_SLACK && t <= self.interval[1] + DOMAIN_SLACK
    }

    pub fn eval_pose(&self, t: f64) -> Result<PoseJet> {
        if !self.contains(t) {
            return Err(SweepError::TimeOutOfDomain { t, t0: self.interval[0], t1: self.interval[1] });
        }
        Ok(self.eval_unchecked(t))
    }

    /// Position and velocity of the body point `x`.
    pub fn point_trajectory(&self, x: &Vec3, t: f64) -> Result<(Vec3, Vec3)> {
        let pose = self.eval_pose(t)?;
        Ok((pose.apply(x), pose.velocity(x)))
    }

    fn eval_unchecked(&self, t: f64) -> PoseJet {
        match &self.motion {
            Motion::Linear { origin, displacement, easing, spin_axis, spin_rate } => {
                let [t0, t1] = self.interval;
                let span = t1 - t0;
                let (e, de, dde) = easing.eval((t - t0) / span);
                let d = v3(displacement);
                let (rotation, rotation_dot, rotation_ddot) = match spin_axis {
                    Some(axis) => spin(&v3(axis).normalize(), *spin_rate * (t - t0), *spin_rate, 0.0),
                    None => (Mat3::identity(), Mat3::zeros(), Mat3::zeros()),
                };
                PoseJet {
                    rotation,
                    translation: v3(origin) + d * e,
                    rotation_dot,
                    translation_dot: d * (de / span),
                    rotation_ddot,
                    translation_ddot: d * (dde / (span * span)),
                }
            }
            Motion::CircularArc { center, radius, axis, angular_rate, phase } => {
                let (e1, e2, _) = plane_basis(&v3(axis));
                let w = *angular_rate;
                let phi = w * t + phase;
                let (s, c) = phi.sin_cos();
                PoseJet {
                    rotation: Mat3::identity(),
                    translation: v3(center) + *radius * (c * e1 + s * e2),
                    rotation_dot: Mat3::zeros(),
                    translation_dot: *radius * w * (-s * e1 + c * e2),
                    rotation_ddot: Mat3::zeros(),
                    translation_ddot: -*radius * w * w * (c * e1 + s * e2),
                }
            }
            Motion::Helix { center, radius, pitch, axis, angular_rate, phase } => {
                let (e1, e2, n) = plane_basis(&v3(axis));
                let w = *angular_rate;
                let phi = w * t + phase;
                let (s, c) = phi.sin_cos();
                PoseJet {
                    rotation: Mat3::identity(),
                    translation: v3(center) + *radius * (c * e1 + s * e2) + *pitch * (w * t) * n,
                    rotation_dot: Mat3::zeros(),
                    translation_dot: *radius * w * (-s * e1 + c * e2) + *pitch * w * n,
                    rotation_ddot: Mat3::zeros(),
                    translation_ddot: -*radius * w * w * (c * e1 + s * e2),
                }
            }
            Motion::Screw { point, axis, pitch, angular_rate } => {
                let n = v3(axis).normalize();
                let p = v3(point);
                let w = *angular_rate;
                let (a, ad, add) = spin(&n, w * t, w, 0.0);
                PoseJet {
                    rotation: a,
                    translation: p - a * p + *pitch * (w * t) * n,
                    rotation_dot: ad,
                    translation_dot: -(ad * p) + *pitch * w * n,
                    rotation_ddot: add,
                    translation_ddot: -(add * p),
                }
            }
            Motion::KeyframeSpline { .. } => self.spline.as_ref().expect("keyframe spline not prepared").eval(t),
        }
    }

    /// Replace one spline control rotation without re-normalizing. Used to
    /// exercise validation on deliberately broken input.
    pub fn corrupt_spline_control(&mut self, index: usize, q: [f64; 4]) {
        if let Some(data) = self.spline.as_mut() {
            data.controls[index] = Quaternion::new(q[0], q[1], q[2], q[3]);
        }
    }
}

fn v3(a: &[f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn unit(a: &[f64; 3], name: &str) -> Result<Vec3> {
    let v = v3(a);
    let n = v.norm();
    if !(n > 1e-12) || !n.is_finite() {
        return Err(SweepError::InvalidInput(format!("{name} must be a nonzero vector")));
    }
    Ok(v / n)
}

/// Orthonormal `(e1, e2, n)` with `e1 x e2 = n`. Exact for coordinate axes.
fn plane_basis(axis: &Vec3) -> (Vec3, Vec3, Vec3) {
    let n = axis.normalize();
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (helper - n * n.dot(&helper)).normalize();
    let e2 = n.cross(&e1);
    (e1, e2, n)
}

pub(crate) fn skew(w: &Vec3) -> Mat3 {
    Mat3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Rodrigues rotation `exp([v]x)`.
pub(crate) fn rot_exp(v: &Vec3) -> Mat3 {
    let angle = v.norm();
    if angle < 1e-300 {
        return Mat3::identity();
    }
    let k = skew(&(v / angle));
    Mat3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

/// Rotation about unit `n` by `angle` with angular rate and acceleration.
fn spin(n: &Vec3, angle: f64, rate: f64, accel: f64) -> (Mat3, Mat3, Mat3) {
    let k = skew(n);
    let r = rot_exp(&(n * angle));
    let rd = k * r * rate;
    let rdd = k * r * accel + k * k * r * (rate * rate);
    (r, rd, rdd)
}

/// Rotation matrix of a quaternion without normalizing it; a quaternion of
/// norm `k` yields `k^2` times a rotation.
fn quat_matrix(q: &Quaternion<f64>) -> Mat3 {
    let (w, x, y, z) = (q.w, q.i, q.j, q.k);
    Mat3::new(
        w * w + x * x - y * y - z * z,
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        w * w - x * x + y * y - z * z,
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        w * w - x * x - y * y + z * z,
    )
}

/// Cumulative cubic B-spline on the rotation group plus a natural cubic
/// spline for translation. Control rotations are refined so the curve passes
/// through every keyframe.
#[derive(Debug, Clone, PartialEq)]
struct KeyframeSplineData {
    start: f64,
    spacing: f64,
    /// `controls[k]` is the control rotation with index `k - 1`.
    controls: Vec<Quaternion<f64>>,
    positions: Vec<Vec3>,
    /// Second derivatives of the position spline at the knots.
    position_m: Vec<Vec3>,
}

fn cumulative_basis(u: f64) -> [[f64; 3]; 3] {
    let u2 = u * u;
    let u3 = u2 * u;
    [
        [(5.0 + 3.0 * u - 3.0 * u2 + u3) / 6.0, (3.0 - 6.0 * u + 3.0 * u2) / 6.0, u - 1.0],
        [(1.0 + 3.0 * u + 3.0 * u2 - 2.0 * u3) / 6.0, (3.0 + 6.0 * u - 6.0 * u2) / 6.0, 1.0 - 2.0 * u],
        [u3 / 6.0, u2 / 2.0, u],
    ]
}

fn unit_of(q: &Quaternion<f64>) -> UnitQuaternion<f64> {
    UnitQuaternion::from_quaternion(*q)
}

impl KeyframeSplineData {
    fn interpolating(keys: &[Keyframe]) -> Result<Self> {
        if keys.len() < 2 {
            return Err(SweepError::InvalidInput("keyframe spline needs two keys".into()));
        }
        let start = keys[0].time;
        let spacing = keys[1].time - keys[0].time;
        if !(spacing > 0.0) {
            return Err(SweepError::InvalidInput("keyframe times must increase".into()));
        }
        for (i, k) in keys.iter().enumerate() {
            let expected = start + spacing * i as f64;
            if (k.time - expected).abs() > 1e-9 * spacing.max(1.0) {
                return Err(SweepError::InvalidInput("keyframe times must be uniformly spaced".into()));
            }
        }
        let mut targets: Vec<UnitQuaternion<f64>> = Vec::with_capacity(keys.len());
        for k in keys {
            let q = Quaternion::new(k.rotation[0], k.rotation[1], k.rotation[2], k.rotation[3]);
            if !(q.norm() > 1e-12) {
                return Err(SweepError::InvalidInput("zero keyframe quaternion".into()));
            }
            let mut uq = unit_of(&q);
            if let Some(prev) = targets.last() {
                if prev.quaternion().dot(uq.quaternion()) < 0.0 {
                    uq = UnitQuaternion::new_unchecked(-uq.into_inner());
                }
            }
            targets.push(uq);
        }
        let positions: Vec<Vec3> = keys.iter().map(|k| v3(&k.position)).collect();
        let position_m = natural_spline_moments(&positions, spacing);

        let n = keys.len();
        let mut inner: Vec<UnitQuaternion<f64>> = targets.clone();
        let mut data = KeyframeSplineData { start, spacing, controls: Vec::new(), positions, position_m };
        for _ in 0..200 {
            data.controls = with_reflected_ends(&inner);
            let mut worst: f64 = 0.0;
            for i in 0..n {
                let at = data.rotation_at(i as f64 * spacing + start);
                let err = (at.inverse() * targets[i]).scaled_axis();
                worst = worst.max(err.norm());
                inner[i] *= UnitQuaternion::from_scaled_axis(err);
            }
            if worst < 1e-14 {
                break;
            }
        }
        data.controls = with_reflected_ends(&inner);
        Ok(data)
    }

    fn rotation_at(&self, t: f64) -> UnitQuaternion<f64> {
        let (i, u) = self.segment(t);
        let mut q = unit_of(&self.controls[i]);
        let basis = cumulative_basis(u);
        for j in 0..3 {
            let delta = self.delta(i + j);
            q *= UnitQuaternion::from_scaled_axis(delta * basis[j][0]);
        }
        q
    }

    fn segment(&self, t: f64) -> (usize, f64) {
        let segments = self.positions.len() - 1;
        let x = ((t - self.start) / self.spacing).max(0.0);
        let i = (x.floor() as usize).min(segments - 1);
        (i, x - i as f64)
    }

    /// Rotation vector from control `k` to control `k + 1`.
    fn delta(&self, k: usize) -> Vec3 {
        let a = unit_of(&self.controls[k]);
        let b = unit_of(&self.controls[k + 1]);
        (a.inverse() * b).scaled_axis()
    }

    fn eval(&self, t: f64) -> PoseJet {
        let (i, u) = self.segment(t);
        let h = self.spacing;
        let basis = cumulative_basis(u);
        let mut e = [Mat3::identity(); 3];
        let mut ed = [Mat3::zeros(); 3];
        let mut edd = [Mat3::zeros(); 3];
        for j in 0..3 {
            let w = self.delta(i + j);
            let k = skew(&w);
            let b1 = basis[j][1] / h;
            let b2 = basis[j][2] / (h * h);
            e[j] = rot_exp(&(w * basis[j][0]));
            ed[j] = e[j] * k * b1;
            edd[j] = e[j] * (k * k * (b1 * b1) + k * b2);
        }
        let base = quat_matrix(&self.controls[i]);
        let p = e[0] * e[1] * e[2];
        let pd = ed[0] * e[1] * e[2] + e[0] * ed[1] * e[2] + e[0] * e[1] * ed[2];
        let pdd =
            edd[0] * e[1] * e[2] + e[0] * edd[1] * e[2] + e[0] * e[1] * edd[2] + (ed[0] * ed[1] * e[2] + ed[0] * e[1] * ed[2] + e[0] * ed[1] * ed[2]) * 2.0;

        let (b, bd, bdd) = self.position(i, u);
        PoseJet { rotation: base * p, translation: b, rotation_dot: base * pd, translation_dot: bd, rotation_ddot: base * pdd, translation_ddot: bdd }
    }

    fn position(&self, i: usize, u: f64) -> (Vec3, Vec3, Vec3) {
        let h = self.spacing;
        let (p0, p1) = (self.positions[i], self.positions[i + 1]);
        let (m0, m1) = (self.position_m[i], self.position_m[i + 1]);
        let a = 1.0 - u;
        let b = u;
        let pos = p0 * a + p1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / 6.0);
        let vel = (p1 - p0) / h + (m1 * (3.0 * b * b - 1.0) - m0 * (3.0 * a * a - 1.0)) * (h / 6.0);
        let acc = m0 * a + m1 * b;
        (pos, vel, acc)
    }
}

fn with_reflected_ends(inner: &[UnitQuaternion<f64>]) -> Vec<Quaternion<f64>> {
    let n = inner.len();
    let first = inner[0] * inner[1].inverse() * inner[0];
    let last = inner[n - 1] * inner[n - 2].inverse() * inner[n - 1];
    let mut out = Vec::with_capacity(n + 2);
    out.push(first.into_inner());
    out.extend(inner.iter().map(|q| q.into_inner()));
    out.push(last.into_inner());
    out
}

/// Second derivatives of the natural cubic spline through uniformly spaced
/// points (Thomas algorithm).
fn natural_spline_moments(points: &[Vec3], h: f64) -> Vec<Vec3> {
    let n = points.len();
    let mut m = vec![Vec3::zeros(); n];
    if n < 3 {
        return m;
    }
    let inner = n - 2;
    let mut diag = vec![4.0; inner];
    let mut rhs: Vec<Vec3> = (1..n - 1).map(|i| (points[i + 1] - points[i] * 2.0 + points[i - 1]) * (6.0 / (h * h))).collect();
    for i in 1..inner {
        let w = 1.0 / diag[i - 1];
        diag[i] -= w;
        let prev = rhs[i - 1];
        rhs[i] -= prev * w;
    }
    m[inner] = rhs[inner - 1] / diag[inner - 1];
    for i in (0..inner - 1).rev() {
        m[i + 1] = (rhs[i] - m[i + 2]) / diag[i];
    }
    m
}

/// One failed trajectory check at a sampled time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryViolation {
    pub t: f64,
    pub check: TrajectoryCheck,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryCheck {
    Orthogonality,
    Determinant,
    RotationDerivative,
    TranslationDerivative,
}

/// Check rotation validity and derivative consistency at `n_samples`
/// uniformly spaced times.
pub fn validate_trajectory(traj: &Trajectory, n_samples: usize) -> Vec<TrajectoryViolation> {
    let n = n_samples.max(2);
    let [t0, t1] = traj.interval;
    let h = 1e-5;
    let mut out = Vec::new();
    for k in 0..n {
        let t = t0 + (t1 - t0) * k as f64 / (n - 1) as f64;
        let pose = traj.eval_unchecked(t);
        let a = pose.rotation;
        let ortho = (a.transpose() * a - Mat3::identity()).abs().max();
        if !(ortho < 1e-10) {
            out.push(TrajectoryViolation { t, check: TrajectoryCheck::Orthogonality, value: ortho });
        }
        let det = a.determinant();
        if !((det - 1.0).abs() <= 1e-10) {
            out.push(TrajectoryViolation { t, check: TrajectoryCheck::Determinant, value: det });
        }
        if t - h >= t0 && t + h <= t1 {
            let lo = traj.eval_unchecked(t - h);
            let hi = traj.eval_unchecked(t + h);
            let fd_a = (hi.rotation - lo.rotation) / (2.0 * h);
            let fd_b = (hi.translation - lo.translation) / (2.0 * h);
            let err_a = (fd_a - pose.rotation_dot).norm() / pose.rotation_dot.norm().max(1.0);
            let err_b = (fd_b - pose.translation_dot).norm() / pose.translation_dot.norm().max(1.0);
            if !(err_a < 1e-6) {
                out.push(TrajectoryViolation { t, check: TrajectoryCheck::RotationDerivative, value: err_a });
            }
            if !(err_b < 1e-6) {
                out.push(TrajectoryViolation { t, check: TrajectoryCheck::TranslationDerivative, value: err_b });
            }
        }
    }
    out
}
