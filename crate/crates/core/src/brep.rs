//! Boundary representation shared by input solids and envelope outputs.
//!
//! Entity ids are indices into the owning tables.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SweepError};
use crate::motion::Vec3;
use crate::surface::{CoedgeCurve, DomainCurve, Sense, SurfacePatch};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type CoedgeId = usize;
pub type LoopId = usize;
pub type FaceId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntityKind {
    Face,
    Edge,
    Vertex,
}

impl EntityKind {
    pub fn dimension(self) -> usize {
        match self {
            EntityKind::Face => 2,
            EntityKind::Edge => 1,
            EntityKind::Vertex => 0,
        }
    }
}

/// How an envelope entity arises from its generator.
///
/// `Contact` entities are lifted from the contact set and have the same
/// dimension as the generator. Cap entities are copies of the generator at
/// an end time. `CocTrim` entities lie on a curve of contact at an end time
/// and have dimension one less than the generator (a coc arc on a face, or
/// the point where an edge's contact curve meets the end time).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceRole {
    Contact,
    LeftCap,
    RightCap,
    CocTrim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceRef {
    pub kind: EntityKind,
    pub entity: usize,
    pub component: usize,
    pub role: SourceRole,
}

impl SourceRef {
    pub fn new(kind: EntityKind, entity: usize, component: usize, role: SourceRole) -> Self {
        SourceRef { kind, entity, component, role }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub position: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceRef>,
}

/// Dense polyline through the curve, interpolated by Catmull-Rom segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCurve {
    pub samples: Vec<[f64; 3]>,
}

impl EdgeCurve {
    /// Point at `s in [0, 1]`, uniform in sample index.
    pub fn eval(&self, s: f64) -> Vec3 {
        let n = self.samples.len();
        let p = |i: usize| Vec3::from(self.samples[i.min(n - 1)]);
        if n == 1 {
            return p(0);
        }
        let x = s.clamp(0.0, 1.0) * (n - 1) as f64;
        let i = (x.floor() as usize).min(n - 2);
        let f = x - i as f64;
        let p1 = p(i);
        let p2 = p(i + 1);
        let p0 = if i == 0 { p1 * 2.0 - p2 } else { p(i - 1) };
        let p3 = if i + 2 >= n { p2 * 2.0 - p1 } else { p(i + 2) };
        let f2 = f * f;
        let f3 = f2 * f;
        (p1 * 2.0 + (p2 - p0) * f + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * f2 + (p1 * 3.0 - p0 - p2 * 3.0 + p3) * f3) * 0.5
    }

    pub fn length(&self) -> f64 {
        self.samples.windows(2).map(|w| (Vec3::from(w[1]) - Vec3::from(w[0])).norm()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub start: VertexId,
    pub end: VertexId,
    pub curve: EdgeCurve,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceRef>,
}

/// Pre-image of a co-edge in its face's 2D chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "pcurve", rename_all = "kebab-case")]
pub enum PCurve {
    /// Analytic curve in the patch domain, parametrized by the edge parameter.
    Analytic(CoedgeCurve),
    /// Chart polyline listed in traversal order.
    Sampled { points: Vec<[f64; 2]> },
}

impl PCurve {
    /// Chart points in traversal order.
    pub fn traversal_points(&self, n: usize) -> Vec<[f64; 2]> {
        match self {
            PCurve::Analytic(c) => (0..n)
                .map(|i| {
                    let mut s = i as f64 / (n - 1) as f64;
                    if c.sense == Sense::Reversed {
                        s = 1.0 - s;
                    }
                    c.map.eval(s).0
                })
                .collect(),
            PCurve::Sampled { points } => points.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coedge {
    pub edge: EdgeId,
    pub loop_id: LoopId,
    pub sense: Sense,
    pub pcurve: PCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Loop {
    pub coedges: Vec<CoedgeId>,
    pub face: FaceId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapSide {
    Left,
    Right,
}

/// One p-curve of contact at a fixed time, sampled uniformly in arclength of
/// its 3D image and oriented by the lifted frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactRow {
    pub t: f64,
    pub uv: Vec<[f64; 2]>,
    pub points: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "geometry", rename_all = "kebab-case")]
pub enum EnvelopeFaceGeometry {
    /// Swept image of a funnel strip; the chart is `(t, q)` with `q` the
    /// normalized arclength along each row.
    Contact { input_face: FaceId, rows: Vec<ContactRow> },
    /// The moved input face restricted to a trimmed region of its domain;
    /// the chart is the patch domain.
    Cap { input_face: FaceId, side: CapSide, time: f64, rotation: [[f64; 3]; 3], translation: [f64; 3], patch: SurfacePatch },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FaceGeometry {
    Patch(SurfacePatch),
    Envelope(EnvelopeFaceGeometry),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub geometry: FaceGeometry,
    pub outer: LoopId,
    #[serde(default)]
    pub inner: Vec<LoopId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceRef>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BrepSolid {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub coedges: Vec<Coedge>,
    pub loops: Vec<Loop>,
    pub faces: Vec<Face>,
    /// Declared genus per shell, shells ordered by smallest face id.
    /// Missing entries are taken as zero.
    #[serde(default)]
    pub genus: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    DanglingReference {
        entity: String,
    },
    EdgeUseCount {
        edge: EdgeId,
        count: usize,
    },
    /// Both uses of an edge run in the same direction.
    OrientationMismatch {
        edge: EdgeId,
    },
    LoopOpen {
        loop_id: LoopId,
        coedge: CoedgeId,
        gap: f64,
    },
    EdgeEndpointGap {
        edge: EdgeId,
        gap: f64,
    },
    LoopArea {
        face: FaceId,
        loop_id: LoopId,
        signed_area: f64,
        outer: bool,
    },
    Euler {
        shell: usize,
        characteristic: i64,
        expected: i64,
    },
    IsolatedVertex {
        vertex: VertexId,
    },
}

/// Polygon signed area (shoelace), positive for counterclockwise.
pub fn signed_area(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    let mut a = 0.0;
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

impl BrepSolid {
    pub fn coedge_start(&self, c: CoedgeId) -> VertexId {
        let ce = &self.coedges[c];
        let e = &self.edges[ce.edge];
        match ce.sense {
            Sense::Forward => e.start,
            Sense::Reversed => e.end,
        }
    }

    pub fn coedge_end(&self, c: CoedgeId) -> VertexId {
        let ce = &self.coedges[c];
        let e = &self.edges[ce.edge];
        match ce.sense {
            Sense::Forward => e.end,
            Sense::Reversed => e.start,
        }
    }

    /// Coedges referencing each edge.
    pub fn edge_uses(&self) -> Vec<Vec<CoedgeId>> {
        let mut uses = vec![Vec::new(); self.edges.len()];
        for (i, c) in self.coedges.iter().enumerate() {
            if c.edge < uses.len() {
                uses[c.edge].push(i);
            }
        }
        uses
    }

    /// Concatenated chart polyline of a loop.
    pub fn loop_chart_polygon(&self, l: LoopId) -> Vec<[f64; 2]> {
        let mut pts = Vec::new();
        for &c in &self.loops[l].coedges {
            let p = self.coedges[c].pcurve.traversal_points(33);
            let k = p.len();
            pts.extend_from_slice(&p[..k.saturating_sub(1)]);
        }
        pts
    }

    /// Faces grouped into connected shells, ordered by smallest face id.
    pub fn shells(&self) -> Vec<Vec<FaceId>> {
        let n = self.faces.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for uses in self.edge_uses() {
            let faces: Vec<FaceId> = uses.iter().map(|&c| self.loops[self.coedges[c].loop_id].face).collect();
            for w in faces.windows(2) {
                let a = find(&mut parent, w[0]);
                let b = find(&mut parent, w[1]);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<FaceId>> = Default::default();
        for f in 0..n {
            let r = find(&mut parent, f);
            groups.entry(r).or_default().push(f);
        }
        groups.into_values().collect()
    }

    /// V - E + F over the whole solid.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// The coedge following `c` at its end vertex `vertex`, or preceding it
    /// at its start vertex, within the same loop.
    pub fn adjacent_coedge(&self, c: CoedgeId, vertex: VertexId) -> Result<CoedgeId> {
        let not_incident = || SweepError::NotIncident { coedge: c, vertex };
        let ce = self.coedges.get(c).ok_or_else(not_incident)?;
        let lp = &self.loops[ce.loop_id];
        let pos = lp.coedges.iter().position(|&x| x == c).ok_or_else(not_incident)?;
        let n = lp.coedges.len();
        if self.coedge_end(c) == vertex {
            Ok(lp.coedges[(pos + 1) % n])
        } else if self.coedge_start(c) == vertex {
            Ok(lp.coedges[(pos + n - 1) % n])
        } else {
            Err(not_incident())
        }
    }

    fn check_references(&self, out: &mut Vec<Violation>) {
        let nv = self.vertices.len();
        let mut bad = |s: String| out.push(Violation::DanglingReference { entity: s });
        for (i, e) in self.edges.iter().enumerate() {
            if e.start >= nv || e.end >= nv || e.curve.samples.is_empty() {
                bad(format!("edge {i}"));
            }
        }
        for (i, c) in self.coedges.iter().enumerate() {
            if c.edge >= self.edges.len() || c.loop_id >= self.loops.len() {
                bad(format!("coedge {i}"));
            }
        }
        for (i, l) in self.loops.iter().enumerate() {
            if l.face >= self.faces.len() || l.coedges.is_empty() || l.coedges.iter().any(|&c| c >= self.coedges.len() || self.coedges[c].loop_id != i) {
                bad(format!("loop {i}"));
            }
        }
        for (i, f) in self.faces.iter().enumerate() {
            if std::iter::once(&f.outer).chain(&f.inner).any(|&l| l >= self.loops.len() || self.loops[l].face != i) {
                bad(format!("face {i}"));
            }
        }
    }

    /// All violated invariants; empty for a valid closed oriented solid.
    pub fn validate_solid(&self, tol: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        self.check_references(&mut out);
        if !out.is_empty() {
            return out;
        }

        for (e, uses) in self.edge_uses().iter().enumerate() {
            if uses.len() != 2 {
                out.push(Violation::EdgeUseCount { edge: e, count: uses.len() });
            } else if self.coedges[uses[0]].sense == self.coedges[uses[1]].sense {
                out.push(Violation::OrientationMismatch { edge: e });
            }
        }

        for (e, edge) in self.edges.iter().enumerate() {
            let a = Vec3::from(edge.curve.samples[0]) - Vec3::from(self.vertices[edge.start].position);
            let b = Vec3::from(*edge.curve.samples.last().unwrap()) - Vec3::from(self.vertices[edge.end].position);
            let gap = a.norm().max(b.norm());
            if !(gap < tol) {
                out.push(Violation::EdgeEndpointGap { edge: e, gap });
            }
        }

        for (l, lp) in self.loops.iter().enumerate() {
            let n = lp.coedges.len();
            for k in 0..n {
                let c = lp.coedges[k];
                let next = lp.coedges[(k + 1) % n];
                let (a, b) = (self.coedge_end(c), self.coedge_start(next));
                let gap = (Vec3::from(self.vertices[a].position) - Vec3::from(self.vertices[b].position)).norm();
                if a != b || !(gap < tol) {
                    out.push(Violation::LoopOpen { loop_id: l, coedge: c, gap });
                }
            }
        }

        for (f, face) in self.faces.iter().enumerate() {
            for (l, outer) in std::iter::once((face.outer, true)).chain(face.inner.iter().map(|&l| (l, false))) {
                let a = signed_area(&self.loop_chart_polygon(l));
                if (outer && !(a > 0.0)) || (!outer && !(a < 0.0)) {
                    out.push(Violation::LoopArea { face: f, loop_id: l, signed_area: a, outer });
                }
            }
        }

        let mut used = vec![false; self.vertices.len()];
        for e in &self.edges {
            used[e.start] = true;
            used[e.end] = true;
        }
        for (v, u) in used.iter().enumerate() {
            if !u {
                out.push(Violation::IsolatedVertex { vertex: v });
            }
        }

        for (s, faces) in self.shells().iter().enumerate() {
            let chi = self.shell_euler_poincare(faces);
            let expected = 2 - 2 * self.genus.get(s).copied().unwrap_or(0);
            if chi != expected {
                out.push(Violation::Euler { shell: s, characteristic: chi, expected });
            }
        }
        out
    }

    /// `V - E + 2F - L` over one shell, which equals `V - E + F` when every
    /// face has a single loop.
    pub fn shell_euler_poincare(&self, faces: &[FaceId]) -> i64 {
        let mut edges = std::collections::BTreeSet::new();
        let mut verts = std::collections::BTreeSet::new();
        let mut loops = 0;
        for &f in faces {
            let face = &self.faces[f];
            for l in std::iter::once(face.outer).chain(face.inner.iter().copied()) {
                loops += 1;
                for &c in &self.loops[l].coedges {
                    let e = self.coedges[c].edge;
                    edges.insert(e);
                    verts.insert(self.edges[e].start);
                    verts.insert(self.edges[e].end);
                }
            }
        }
        verts.len() as i64 - edges.len() as i64 + 2 * faces.len() as i64 - loops as i64
    }

    /// Build a solid from patches whose single loops are counterclockwise
    /// domain polygons joined by straight domain segments. Vertices are merged
    /// by position and edges by endpoints plus midpoint.
    pub fn from_patch_polygons(faces: Vec<(SurfacePatch, Vec<[f64; 2]>)>, genus: Vec<i64>, edge_samples: usize) -> Result<BrepSolid> {
        let merge_tol = 1e-9;
        let mut solid = BrepSolid { genus, ..Default::default() };
        let find_vertex = |solid: &mut BrepSolid, p: Vec3| -> VertexId {
            if let Some(i) = solid.vertices.iter().position(|v| (Vec3::from(v.position) - p).norm() < merge_tol) {
                return i;
            }
            solid.vertices.push(Vertex { position: p.into(), source: None });
            solid.vertices.len() - 1
        };
        for (patch, corners) in faces {
            let face_id = solid.faces.len();
            let loop_id = solid.loops.len();
            let n = corners.len();
            let mut coedges = Vec::with_capacity(n);
            for k in 0..n {
                let (a, b) = (corners[k], corners[(k + 1) % n]);
                let pa = patch.eval(a[0], a[1])?;
                let pb = patch.eval(b[0], b[1])?;
                let mid = patch.eval(0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]))?;
                let va = find_vertex(&mut solid, pa);
                let vb = find_vertex(&mut solid, pb);
                let existing = solid
                    .edges
                    .iter()
                    .position(|e| ((e.start == va && e.end == vb) || (e.start == vb && e.end == va)) && (e.curve.eval(0.5) - mid).norm() < 1e-6);
                let (edge, sense, map) = match existing {
                    Some(e) if solid.edges[e].start == vb => (e, Sense::Reversed, DomainCurve::Line { from: b, to: a }),
                    Some(e) => (e, Sense::Forward, DomainCurve::Line { from: a, to: b }),
                    None => {
                        let samples = (0..edge_samples)
                            .map(|i| {
                                let s = i as f64 / (edge_samples - 1) as f64;
                                patch.eval(a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])).map(|p| p.into())
                            })
                            .collect::<Result<Vec<[f64; 3]>>>()?;
                        solid.edges.push(Edge { start: va, end: vb, curve: EdgeCurve { samples }, source: None });
                        (solid.edges.len() - 1, Sense::Forward, DomainCurve::Line { from: a, to: b })
                    }
                };
                solid.coedges.push(Coedge { edge, loop_id, sense, pcurve: PCurve::Analytic(CoedgeCurve { map, sense }) });
                coedges.push(solid.coedges.len() - 1);
            }
            solid.loops.push(Loop { coedges, face: face_id });
            solid.faces.push(Face { geometry: FaceGeometry::Patch(patch), outer: loop_id, inner: Vec::new(), source: None });
        }
        Ok(solid)
    }

    pub fn patch(&self, f: FaceId) -> Option<&SurfacePatch> {
        match &self.faces[f].geometry {
            FaceGeometry::Patch(p) => Some(p),
            FaceGeometry::Envelope(_) => None,
        }
    }

    /// Analytic pre-image of an input coedge.
    pub fn coedge_curve(&self, c: CoedgeId) -> Option<&CoedgeCurve> {
        match &self.coedges[c].pcurve {
            PCurve::Analytic(curve) => Some(curve),
            PCurve::Sampled { .. } => None,
        }
    }

    pub fn face_of_coedge(&self, c: CoedgeId) -> FaceId {
        self.loops[self.coedges[c].loop_id].face
    }

    /// Coedges of a face in loop order, outer loop first.
    pub fn face_coedges(&self, f: FaceId) -> Vec<CoedgeId> {
        let face = &self.faces[f];
        std::iter::once(face.outer).chain(face.inner.iter().copied()).flat_map(|l| self.loops[l].coedges.iter().copied()).collect()
    }
}


#[cfg(test)]
mod tests {
    use super::test_solids::*;
    use super::*;

    #[test]
    fn ellipsoid_counts_and_valid() {
        let s = ellipsoid([1.0, 0.8, 1.2]);
        assert_eq!((s.faces.len(), s.edges.len(), s.vertices.len()), (6, 12, 8));
        assert_eq!(s.validate_solid(1e-6), vec![]);
        assert_eq!(s.euler_characteristic(), 2);
    }

    #[test]
    fn torus_counts_and_valid() {
        let s = torus();
        assert_eq!((s.faces.len(), s.edges.len(), s.vertices.len()), (4, 8, 4));
        assert_eq!(s.validate_solid(1e-6), vec![]);
        assert_eq!(s.euler_characteristic(), 0);
    }

    #[test]
    fn torus_without_declared_genus_fails_euler() {
        let mut s = torus();
        s.genus.clear();
        assert!(matches!(s.validate_solid(1e-6)[..], [Violation::Euler { characteristic: 0, expected: 2, .. }]));
    }

    #[test]
    fn flipped_sense_reported_on_edge() {
        let mut s = ellipsoid([1.0; 3]);
        let edge = s.coedges[3].edge;
        s.coedges[3].sense = s.coedges[3].sense.flip();
        let v = s.validate_solid(1e-6);
        assert!(v.contains(&Violation::OrientationMismatch { edge }));
    }

    #[test]
    fn adjacent_coedge_cycles_loop() {
        let s = ellipsoid([1.0; 3]);
        let start = s.loops[2].coedges[0];
        let mut c = start;
        for _ in 0..4 {
            c = s.adjacent_coedge(c, s.coedge_end(c)).unwrap();
        }
        assert_eq!(c, start);
        let prev = s.adjacent_coedge(start, s.coedge_start(start)).unwrap();
        assert_eq!(*s.loops[2].coedges.last().unwrap(), prev);
    }

    #[test]
    fn adjacent_coedge_not_incident() {
        let s = ellipsoid([1.0; 3]);
        let c = 0;
        let far = (0..s.vertices.len()).find(|&v| v != s.coedge_start(c) && v != s.coedge_end(c)).unwrap();
        assert!(matches!(s.adjacent_coedge(c, far), Err(SweepError::NotIncident { .. })));
    }

    #[test]
    fn adjacent_coedge_matches_incidence_scan() {
        for s in [ellipsoid([1.0, 2.0, 0.5]), torus()] {
            for c in 0..s.coedges.len() {
                for v in [s.coedge_start(c), s.coedge_end(c)] {
                    let lp = s.coedges[c].loop_id;
                    let brute: Vec<_> = (0..s.coedges.len())
                        .filter(|&o| o != c && s.coedges[o].loop_id == lp)
                        .filter(|&o| if v == s.coedge_end(c) { s.coedge_start(o) == v } else { s.coedge_end(o) == v })
                        .collect();
                    assert_eq!(brute, vec![s.adjacent_coedge(c, v).unwrap()]);
                }
            }
        }
    }

    #[test]
    fn two_shells_sum() {
        let a = ellipsoid([1.0; 3]);
        let mut b = torus();
        for f in &mut b.faces {
            if let FaceGeometry::Patch(p) = &mut f.geometry {
                p.offset = [10.0, 0.0, 0.0];
            }
        }
        let mut s = a.clone();
        let (nv, ne, nc, nl, nf) = (s.vertices.len(), s.edges.len(), s.coedges.len(), s.loops.len(), s.faces.len());
        s.vertices.extend(b.vertices.iter().cloned());
        s.edges.extend(b.edges.iter().map(|e| Edge { start: e.start + nv, end: e.end + nv, ..e.clone() }));
        s.coedges.extend(b.coedges.iter().map(|c| Coedge { edge: c.edge + ne, loop_id: c.loop_id + nl, ..c.clone() }));
        s.loops.extend(b.loops.iter().map(|l| Loop { coedges: l.coedges.iter().map(|c| c + nc).collect(), face: l.face + nf }));
        s.faces.extend(b.faces.iter().map(|f| Face { outer: f.outer + nl, ..f.clone() }));
        s.genus = vec![0, 1];
        assert_eq!(s.shells().len(), 2);
        assert_eq!(s.euler_characteristic(), a.euler_characteristic() + b.euler_characteristic());
        assert_eq!(s.validate_solid(1e-6), vec![]);
    }

    #[test]
    fn edge_curve_interpolates_samples() {
        let c = EdgeCurve { samples: vec![[0.0; 3], [1.0, 0.0, 0.0], [2.0, 1.0, 0.0]] };
        assert_eq!(c.eval(0.5), Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(c.eval(1.0), Vec3::new(2.0, 1.0, 0.0));
    }
}
