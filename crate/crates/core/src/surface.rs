//! Parametric surface patches over rectangular domains with exact 2-jets,
//! and co-edge curves in patch domains.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SweepError};
use crate::motion::Vec3;

/// Tolerance for accepting a parameter slightly outside the closed domain.
const DOMAIN_SLACK: f64 = 1e-9;

/// Value and first/second partials of a surface at a parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub s: Vec3,
    pub su: Vec3,
    pub sv: Vec3,
    pub suu: Vec3,
    pub suv: Vec3,
    pub svv: Vec3,
}

/// Unit outward normal and its partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalJet {
    pub n: Vec3,
    pub nu: Vec3,
    pub nv: Vec3,
}

/// One face of the cube used by the cube-sphere parametrization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CubeFace {
    PosX,
    NegX,
    PosY,
    NegY,
    PosZ,
    NegZ,
}

impl CubeFace {
    pub const ALL: [CubeFace; 6] = [CubeFace::PosX, CubeFace::NegX, CubeFace::PosY, CubeFace::NegY, CubeFace::PosZ, CubeFace::NegZ];

    /// `(a, b, n)` with `a x b = n`; the cube point is `n + u a + v b`.
    pub fn basis(self) -> (Vec3, Vec3, Vec3) {
        let (x, y, z) = (Vec3::x(), Vec3::y(), Vec3::z());
        match self {
            CubeFace::PosX => (y, z, x),
            CubeFace::NegX => (z, y, -x),
            CubeFace::PosY => (z, x, y),
            CubeFace::NegY => (x, z, -y),
            CubeFace::PosZ => (x, y, z),
            CubeFace::NegZ => (y, x, -z),
        }
    }
}

/// Star-shaped closed surfaces carried by the cube-sphere parametrization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StarShape {
    /// `S = diag(a, b, c) w`.
    Ellipsoid { semi_axes: [f64; 3] },
    /// The ellipsoid with semi-axes `core` offset outward by `offset`; the
    /// outward normal at the point generated by direction `w` is `w` itself.
    OffsetEllipsoid { core: [f64; 3], offset: f64 },
    /// `S = rho(w . axis) w` with `rho` a polynomial (ascending coefficients).
    Revolution { axis: [f64; 3], profile: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PatchKind {
    CubeSphere {
        face: CubeFace,
        shape: StarShape,
    },
    /// `(r cos u, r sin u, v)`.
    CylinderSegment {
        radius: f64,
    },
    /// `((R + r cos v) cos u, (R + r cos v) sin u, r sin v)`.
    TorusSegment {
        major: f64,
        minor: f64,
    },
    /// Tensor-product cubic Bezier over `[0,1]^2`; `control[i][j]` pairs
    /// `B_i(u) B_j(v)`.
    Bicubic {
        control: [[[f64; 3]; 4]; 4],
    },
}

/// A regular parametric patch. `reversed` flips the outward side relative
/// to `S_u x S_v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfacePatch {
    #[serde(flatten)]
    pub kind: PatchKind,
    /// `[[u_min, u_max], [v_min, v_max]]`.
    pub domain: [[f64; 2]; 2],
    #[serde(default)]
    pub reversed: bool,
    #[serde(default)]
    pub offset: [f64; 3],
}

impl SurfacePatch {
    pub fn new(kind: PatchKind, domain: [[f64; 2]; 2]) -> Self {
        SurfacePatch { kind, domain, reversed: false, offset: [0.0; 3] }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let [[u0, u1], [v0, v1]] = self.domain;
        u >= u0 - DOMAIN_SLACK && u <= u1 + DOMAIN_SLACK && v >= v0 - DOMAIN_SLACK && v <= v1 + DOMAIN_SLACK
    }

    /// Clamp a parameter point into the closed domain.
    pub fn clamp(&self, u: f64, v: f64) -> (f64, f64) {
        let [[u0, u1], [v0, v1]] = self.domain;
        (u.clamp(u0, u1), v.clamp(v0, v1))
    }

    pub fn center(&self) -> (f64, f64) {
        let [[u0, u1], [v0, v1]] = self.domain;
        (0.5 * (u0 + u1), 0.5 * (v0 + v1))
    }

    pub fn outward_sign(&self) -> f64 {
        if self.reversed {
            -1.0
        } else {
            1.0
        }
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<Vec3> {
        Ok(self.eval_jet2(u, v)?.s)
    }

    pub fn eval_jet2(&self, u: f64, v: f64) -> Result<Jet2> {
        if !self.contains(u, v) {
            return Err(SweepError::DomainViolation { u, v });
        }
        let mut jet = match &self.kind {
            PatchKind::CubeSphere { face, shape } => cube_sphere_jet(*face, shape, u, v),
            PatchKind::CylinderSegment { radius } => {
                let (s, c) = u.sin_cos();
                let r = *radius;
                Jet2 {
                    s: Vec3::new(r * c, r * s, v),
                    su: Vec3::new(-r * s, r * c, 0.0),
                    sv: Vec3::new(0.0, 0.0, 1.0),
                    suu: Vec3::new(-r * c, -r * s, 0.0),
                    suv: Vec3::zeros(),
                    svv: Vec3::zeros(),
                }
            }
            PatchKind::TorusSegment { major, minor } => {
                let (su, cu) = u.sin_cos();
                let (sv, cv) = v.sin_cos();
                let (big, r) = (*major, *minor);
                let w = big + r * cv;
                Jet2 {
                    s: Vec3::new(w * cu, w * su, r * sv),
                    su: Vec3::new(-w * su, w * cu, 0.0),
                    sv: Vec3::new(-r * sv * cu, -r * sv * su, r * cv),
                    suu: Vec3::new(-w * cu, -w * su, 0.0),
                    suv: Vec3::new(r * sv * su, -r * sv * cu, 0.0),
                    svv: Vec3::new(-r * cv * cu, -r * cv * su, -r * sv),
                }
            }
            PatchKind::Bicubic { control } => bicubic_jet(control, u, v),
        };
        jet.s += Vec3::new(self.offset[0], self.offset[1], self.offset[2]);
        Ok(jet)
    }

    pub fn is_regular_at(&self, u: f64, v: f64) -> Result<bool> {
        let j = self.eval_jet2(u, v)?;
        Ok(j.su.cross(&j.sv).norm() > 1e-9 * j.su.norm() * j.sv.norm())
    }

    pub fn unit_normal(&self, u: f64, v: f64) -> Result<Vec3> {
        Ok(self.unit_normal_jet(u, v)?.n)
    }

    /// Outward unit normal with exact partials.
    pub fn unit_normal_jet(&self, u: f64, v: f64) -> Result<NormalJet> {
        let j = self.eval_jet2(u, v)?;
        normal_jet_from(&j, self.outward_sign()).ok_or(SweepError::DegenerateTangentPlane { u, v })
    }
}

pub(crate) fn normal_jet_from(j: &Jet2, sign: f64) -> Option<NormalJet> {
    let n = j.su.cross(&j.sv);
    let len = n.norm();
    if !(len > 1e-9 * j.su.norm() * j.sv.norm()) {
        return None;
    }
    let nu = j.suu.cross(&j.sv) + j.su.cross(&j.suv);
    let nv = j.suv.cross(&j.sv) + j.su.cross(&j.svv);
    let inv = 1.0 / len;
    let unit = n * inv;
    let d = |dn: Vec3| (dn - unit * unit.dot(&dn)) * inv * sign;
    Some(NormalJet { n: unit * sign, nu: d(nu), nv: d(nv) })
}

/// Derivatives of a scalar along a 2-parameter family: value, d/du, d/dv,
/// d2/du2, d2/dudv, d2/dv2.
#[derive(Debug, Clone, Copy)]
struct ScalarJet([f64; 6]);

/// 2-jet of the unit direction `w = c / |c|` with `c = n + u a + v b`.
fn direction_jet(face: CubeFace, u: f64, v: f64) -> Jet2 {
    let (a, b, n) = face.basis();
    let c = n + a * u + b * v;
    let rho = c.dot(&c);
    let (ru, rv) = (2.0 * c.dot(&a), 2.0 * c.dot(&b));
    let (ruu, ruv, rvv) = (2.0 * a.dot(&a), 2.0 * a.dot(&b), 2.0 * b.dot(&b));
    let phi = inv_sqrt_jet(rho, ru, rv, ruu, ruv, rvv);
    let [p, pu, pv, puu, puv, pvv] = phi.0;
    Jet2 { s: c * p, su: a * p + c * pu, sv: b * p + c * pv, suu: a * (2.0 * pu) + c * puu, suv: a * pv + b * pu + c * puv, svv: b * (2.0 * pv) + c * pvv }
}

/// Jet of `q^(-1/2)` given the jet of `q`.
fn inv_sqrt_jet(q: f64, qu: f64, qv: f64, quu: f64, quv: f64, qvv: f64) -> ScalarJet {
    let p = q.powf(-0.5);
    let p3 = p * p * p;
    let p5 = p3 * p * p;
    ScalarJet([
        p,
        -0.5 * p3 * qu,
        -0.5 * p3 * qv,
        0.75 * p5 * qu * qu - 0.5 * p3 * quu,
        0.75 * p5 * qu * qv - 0.5 * p3 * quv,
        0.75 * p5 * qv * qv - 0.5 * p3 * qvv,
    ])
}

/// Product rule for `scalar * vector` 2-jets.
fn scale_jet(f: ScalarJet, w: &Jet2) -> Jet2 {
    let [p, pu, pv, puu, puv, pvv] = f.0;
    Jet2 {
        s: w.s * p,
        su: w.su * p + w.s * pu,
        sv: w.sv * p + w.s * pv,
        suu: w.suu * p + w.su * (2.0 * pu) + w.s * puu,
        suv: w.suv * p + w.su * pv + w.sv * pu + w.s * puv,
        svv: w.svv * p + w.sv * (2.0 * pv) + w.s * pvv,
    }
}

fn map_linear(w: &Jet2, f: impl Fn(&Vec3) -> Vec3) -> Jet2 {
    Jet2 { s: f(&w.s), su: f(&w.su), sv: f(&w.sv), suu: f(&w.suu), suv: f(&w.suv), svv: f(&w.svv) }
}

fn dot_jet(w: &Jet2, k: &Vec3) -> ScalarJet {
    ScalarJet([w.s.dot(k), w.su.dot(k), w.sv.dot(k), w.suu.dot(k), w.suv.dot(k), w.svv.dot(k)])
}

fn cube_sphere_jet(face: CubeFace, shape: &StarShape, u: f64, v: f64) -> Jet2 {
    let w = direction_jet(face, u, v);
    match shape {
        StarShape::Ellipsoid { semi_axes } => {
            let d = Vec3::new(semi_axes[0], semi_axes[1], semi_axes[2]);
            map_linear(&w, |x| x.component_mul(&d))
        }
        StarShape::OffsetEllipsoid { core, offset } => {
            let d2 = Vec3::new(core[0] * core[0], core[1] * core[1], core[2] * core[2]);
            let dw = map_linear(&w, |x| x.component_mul(&d2));
            // q = w^T D^2 w
            let q = w.s.dot(&dw.s);
            let qu = 2.0 * w.su.dot(&dw.s);
            let qv = 2.0 * w.sv.dot(&dw.s);
            let quu = 2.0 * (w.suu.dot(&dw.s) + w.su.dot(&dw.su));
            let quv = 2.0 * (w.suv.dot(&dw.s) + w.su.dot(&dw.sv));
            let qvv = 2.0 * (w.svv.dot(&dw.s) + w.sv.dot(&dw.sv));
            let core_part = scale_jet(inv_sqrt_jet(q, qu, qv, quu, quv, qvv), &dw);
            let r = *offset;
            Jet2 {
                s: w.s * r + core_part.s,
                su: w.su * r + core_part.su,
                sv: w.sv * r + core_part.sv,
                suu: w.suu * r + core_part.suu,
                suv: w.suv * r + core_part.suv,
                svv: w.svv * r + core_part.svv,
            }
        }
        StarShape::Revolution { axis, profile } => {
            let k = Vec3::new(axis[0], axis[1], axis[2]).normalize();
            let [c, cu, cv, cuu, cuv, cvv] = dot_jet(&w, &k).0;
            let (r0, r1, r2) = poly_eval(profile, c);
            let rho = ScalarJet([r0, r1 * cu, r1 * cv, r2 * cu * cu + r1 * cuu, r2 * cu * cv + r1 * cuv, r2 * cv * cv + r1 * cvv]);
            scale_jet(rho, &w)
        }
    }
}

/// Polynomial value with first and second derivative.
pub(crate) fn poly_eval(coeffs: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
    for &c in coeffs.iter().rev() {
        ddp = ddp * x + 2.0 * dp;
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp, ddp)
}

fn bernstein3(t: f64) -> [[f64; 4]; 3] {
    let s = 1.0 - t;
    [
        [s * s * s, 3.0 * t * s * s, 3.0 * t * t * s, t * t * t],
        [-3.0 * s * s, 3.0 * s * s - 6.0 * t * s, 6.0 * t * s - 3.0 * t * t, 3.0 * t * t],
        [6.0 * s, 6.0 * t - 12.0 * s, 6.0 * s - 12.0 * t, 6.0 * t],
    ]
}

fn bicubic_jet(control: &[[[f64; 3]; 4]; 4], u: f64, v: f64) -> Jet2 {
    let bu = bernstein3(u);
    let bv = bernstein3(v);
    let mut out = [Vec3::zeros(); 6];
    let orders = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
    for (i, row) in control.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            let p = Vec3::new(p[0], p[1], p[2]);
            for (slot, (du, dv)) in orders.iter().enumerate() {
                out[slot] += p * (bu[*du][i] * bv[*dv][j]);
            }
        }
    }
    Jet2 { s: out[0], su: out[1], sv: out[2], suu: out[3], suv: out[4], svv: out[5] }
}

/// Map from the edge parameter `s in [0, 1]` into a face domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "curve", rename_all = "kebab-case")]
pub enum DomainCurve {
    Line {
        from: [f64; 2],
        to: [f64; 2],
    },
    /// Cubic in power basis: `u(s) = sum u[k] s^k`, same for `v`.
    Cubic {
        u: [f64; 4],
        v: [f64; 4],
    },
}

impl DomainCurve {
    pub fn eval(&self, s: f64) -> ([f64; 2], [f64; 2]) {
        match self {
            DomainCurve::Line { from, to } => ([from[0] + s * (to[0] - from[0]), from[1] + s * (to[1] - from[1])], [to[0] - from[0], to[1] - from[1]]),
            DomainCurve::Cubic { u, v } => {
                let (pu, du, _) = poly_eval(u, s);
                let (pv, dv, _) = poly_eval(v, s);
                ([pu, pv], [du, dv])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sense {
    Forward,
    Reversed,
}

impl Sense {
    pub fn sign(self) -> f64 {
        match self {
            Sense::Forward => 1.0,
            Sense::Reversed => -1.0,
        }
    }

    pub fn flip(self) -> Sense {
        match self {
            Sense::Forward => Sense::Reversed,
            Sense::Reversed => Sense::Forward,
        }
    }
}

/// A co-edge's pre-image in its face domain. The curve is parametrized by
/// the owning edge's parameter `s in [0, 1]`; `sense` says whether the
/// co-edge runs with or against increasing `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoedgeCurve {
    pub map: DomainCurve,
    pub sense: Sense,
}

impl CoedgeCurve {
    /// Domain point at `s` and its derivative in the traversal direction.
    pub fn eval(&self, s: f64) -> Result<([f64; 2], [f64; 2])> {
        if !(-1e-12..=1.0 + 1e-12).contains(&s) {
            return Err(SweepError::ParamOutOfRange { s, s0: 0.0, s1: 1.0 });
        }
        let (p, d) = self.map.eval(s);
        let k = self.sense.sign();
        Ok((p, [d[0] * k, d[1] * k]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    pub(crate) fn sample_patches() -> Vec<SurfacePatch> {
        let cube = |face, shape: StarShape| SurfacePatch::new(PatchKind::CubeSphere { face, shape }, [[-1.0, 1.0], [-1.0, 1.0]]);
        let mut out = Vec::new();
        for face in CubeFace::ALL {
            out.push(cube(face, StarShape::Ellipsoid { semi_axes: [1.0, 0.7, 1.3] }));
            out.push(cube(face, StarShape::OffsetEllipsoid { core: [0.1, 0.1, 0.8], offset: 0.5 }));
            out.push(cube(face, StarShape::Revolution { axis: [1.0, 0.0, 0.0], profile: vec![0.6, 0.0, 0.5] }));
        }
        out.push(SurfacePatch::new(PatchKind::CylinderSegment { radius: 1.5 }, [[0.0, PI], [-1.0, 1.0]]));
        out.push(SurfacePatch::new(PatchKind::TorusSegment { major: 2.0, minor: 0.5 }, [[0.0, PI], [PI, 2.0 * PI]]));
        let mut control = [[[0.0; 3]; 4]; 4];
        for (i, row) in control.iter_mut().enumerate() {
            for (j, p) in row.iter_mut().enumerate() {
                *p = [i as f64, j as f64, ((i * j) as f64 * 0.7).sin()];
            }
        }
        out.push(SurfacePatch::new(PatchKind::Bicubic { control }, [[0.0, 1.0], [0.0, 1.0]]));
        out
    }

    fn grid(patch: &SurfacePatch, n: usize) -> Vec<(f64, f64)> {
        let [[u0, u1], [v0, v1]] = patch.domain;
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let a = (i as f64 + 0.5) / n as f64;
                let b = (j as f64 + 0.5) / n as f64;
                pts.push((u0 + a * (u1 - u0), v0 + b * (v1 - v0)));
            }
        }
        pts
    }

    fn rel(a: Vec3, b: Vec3) -> f64 {
        (a - b).norm() / b.norm().max(1.0)
    }

    #[test]
    fn sphere_patch_center() {
        for face in CubeFace::ALL {
            let p = SurfacePatch::new(PatchKind::CubeSphere { face, shape: StarShape::Ellipsoid { semi_axes: [1.0; 3] } }, [[-1.0, 1.0], [-1.0, 1.0]]);
            let j = p.eval_jet2(0.0, 0.0).unwrap();
            assert_relative_eq!(j.s.norm(), 1.0, epsilon = 1e-15);
            assert!(j.s.dot(&j.su).abs() < 1e-15 && j.s.dot(&j.sv).abs() < 1e-15);
            for (u, v) in grid(&p, 7) {
                let n = p.unit_normal(u, v).unwrap();
                assert_relative_eq!(n, p.eval(u, v).unwrap(), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn cylinder_second_partials() {
        let r = 1.5;
        let p = SurfacePatch::new(PatchKind::CylinderSegment { radius: r }, [[0.0, PI], [-1.0, 1.0]]);
        let (u, v) = (0.7, 0.2);
        let j = p.eval_jet2(u, v).unwrap();
        assert_relative_eq!(j.suu, -Vec3::new(r * u.cos(), r * u.sin(), 0.0), epsilon = 1e-15);
        assert_eq!(j.svv, Vec3::zeros());
        let n = p.unit_normal_jet(u, v).unwrap();
        assert_relative_eq!(n.n, Vec3::new(u.cos(), u.sin(), 0.0), epsilon = 1e-15);
        assert_relative_eq!(n.nv, Vec3::zeros(), epsilon = 1e-15);
    }

    #[test]
    fn torus_origin_point() {
        let p = SurfacePatch::new(PatchKind::TorusSegment { major: 2.0, minor: 0.5 }, [[0.0, PI], [0.0, PI]]);
        assert_relative_eq!(p.eval(0.0, 0.0).unwrap(), Vec3::new(2.5, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn reversed_patch_negates_normal_jet() {
        for patch in sample_patches() {
            let mut flipped = patch.clone();
            flipped.reversed = true;
            let (u, v) = patch.center();
            let a = patch.unit_normal_jet(u, v).unwrap();
            let b = flipped.unit_normal_jet(u, v).unwrap();
            assert_eq!(a.n, -b.n);
            assert_eq!(a.nu, -b.nu);
            assert_eq!(a.nv, -b.nv);
        }
    }

    #[test]
    fn jets_match_finite_differences() {
        let h = 1e-5;
        for patch in sample_patches() {
            for (u, v) in grid(&patch, 6) {
                let j = patch.eval_jet2(u, v).unwrap();
                let ju = |d: f64| patch.eval_jet2(u + d, v).unwrap();
                let jv = |d: f64| patch.eval_jet2(u, v + d).unwrap();
                assert!(rel((ju(h).s - ju(-h).s) / (2.0 * h), j.su) < 1e-5);
                assert!(rel((jv(h).s - jv(-h).s) / (2.0 * h), j.sv) < 1e-5);
                assert!(rel((ju(h).su - ju(-h).su) / (2.0 * h), j.suu) < 1e-5);
                assert!(rel((jv(h).su - jv(-h).su) / (2.0 * h), j.suv) < 1e-5);
                assert!(rel((ju(h).sv - ju(-h).sv) / (2.0 * h), j.suv) < 1e-5);
                assert!(rel((jv(h).sv - jv(-h).sv) / (2.0 * h), j.svv) < 1e-5);

                let n = patch.unit_normal_jet(u, v).unwrap();
                assert_relative_eq!(n.n.norm(), 1.0, epsilon = 1e-10);
                assert!(n.n.dot(&n.nu).abs() < 1e-10 && n.n.dot(&n.nv).abs() < 1e-10);
                let nu = (patch.unit_normal(u + h, v).unwrap() - patch.unit_normal(u - h, v).unwrap()) / (2.0 * h);
                let nv = (patch.unit_normal(u, v + h).unwrap() - patch.unit_normal(u, v - h).unwrap()) / (2.0 * h);
                assert!(rel(nu, n.nu) < 1e-5, "{:?}", patch.kind);
                assert!(rel(nv, n.nv) < 1e-5);
            }
        }
    }

    #[test]
    fn regular_on_dense_grid() {
        for patch in sample_patches() {
            let [[u0, u1], [v0, v1]] = patch.domain;
            for i in 0..50 {
                for j in 0..50 {
                    let u = u0 + (u1 - u0) * i as f64 / 49.0;
                    let v = v0 + (v1 - v0) * j as f64 / 49.0;
                    assert!(patch.is_regular_at(u, v).unwrap());
                }
            }
        }
    }

    #[test]
    fn cube_sphere_normals_point_outward() {
        for patch in sample_patches().into_iter().take(18) {
            for (u, v) in grid(&patch, 5) {
                let s = patch.eval(u, v).unwrap();
                assert!(patch.unit_normal(u, v).unwrap().dot(&s) > 0.0);
            }
        }
    }

    #[test]
    fn offset_ellipsoid_normal_is_direction() {
        let p = SurfacePatch::new(
            PatchKind::CubeSphere { face: CubeFace::PosY, shape: StarShape::OffsetEllipsoid { core: [0.2, 0.3, 1.0], offset: 0.4 } },
            [[-1.0, 1.0], [-1.0, 1.0]],
        );
        let (u, v) = (0.3, -0.6);
        let (a, b, n) = CubeFace::PosY.basis();
        let w = (n + a * u + b * v).normalize();
        assert_relative_eq!(p.unit_normal(u, v).unwrap(), w, epsilon = 1e-14);
    }

    #[test]
    fn outside_domain_rejected() {
        let p = &sample_patches()[0];
        assert!(matches!(p.eval_jet2(1.5, 0.0), Err(SweepError::DomainViolation { .. })));
    }

    #[test]
    fn degenerate_plane_reported() {
        let mut control = [[[0.0; 3]; 4]; 4];
        for (i, row) in control.iter_mut().enumerate() {
            for p in row.iter_mut() {
                *p = [i as f64, 0.0, 0.0];
            }
        }
        let p = SurfacePatch::new(PatchKind::Bicubic { control }, [[0.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(p.unit_normal_jet(0.5, 0.5), Err(SweepError::DegenerateTangentPlane { .. })));
    }

    #[test]
    fn coedge_line_and_sense() {
        let mut c = CoedgeCurve { map: DomainCurve::Line { from: [0.0, 0.0], to: [1.0, 0.0] }, sense: Sense::Forward };
        assert_eq!(c.eval(0.5).unwrap(), ([0.5, 0.0], [1.0, 0.0]));
        c.sense = Sense::Reversed;
        assert_eq!(c.eval(0.5).unwrap(), ([0.5, 0.0], [-1.0, 0.0]));
        assert!(matches!(c.eval(1.5), Err(SweepError::ParamOutOfRange { .. })));
    }

    #[test]
    fn coedge_arc_derivative() {
        // cubic approximation of a quarter arc
        let k = 0.5522847498;
        let c = CoedgeCurve {
            map: DomainCurve::Cubic { u: [1.0, 0.0, -3.0 * k, 3.0 * k - 1.0], v: [0.0, 3.0 * k, 3.0 - 6.0 * k, 3.0 * k - 2.0] },
            sense: Sense::Reversed,
        };
        let h = 1e-6;
        for i in 1..10 {
            let s = i as f64 / 10.0;
            let (_, d) = c.eval(s).unwrap();
            let (a, _) = c.eval(s + h).unwrap();
            let (b, _) = c.eval(s - h).unwrap();
            let fd = [-(a[0] - b[0]) / (2.0 * h), -(a[1] - b[1]) / (2.0 * h)];
            assert!((fd[0] - d[0]).abs() < 1e-6 && (fd[1] - d[1]).abs() < 1e-6);
        }
    }
}
