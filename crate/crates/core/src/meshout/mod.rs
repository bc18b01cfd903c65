//! Triangle meshes of envelope breps and the exported artifacts.

pub mod brepfile;
pub mod obj;
pub mod report;
pub mod tessellate;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::motion::Vec3;

pub use tessellate::{tessellate_envelope, tessellate_envelope_face};

/// Indexed triangle mesh with per-vertex normals and a source face per
/// triangle. Triangles wind counterclockwise about the normal.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub face_ids: Vec<usize>,
}

impl Mesh {
    pub fn push_vertex(&mut self, p: Vec3, n: Vec3) -> usize {
        self.vertices.push(p.into());
        self.normals.push(n.into());
        self.vertices.len() - 1
    }

    pub fn append(&mut self, other: Mesh) {
        let off = self.vertices.len();
        self.vertices.extend(other.vertices);
        self.normals.extend(other.normals);
        self.triangles.extend(other.triangles.into_iter().map(|t| t.map(|i| i + off)));
        self.face_ids.extend(other.face_ids);
    }

    pub fn vertex(&self, i: usize) -> Vec3 {
        Vec3::from(self.vertices[i])
    }

    /// Unnormalized geometric normal of a triangle.
    pub fn triangle_normal(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangles[t].map(|i| self.vertex(i));
        (b - a).cross(&(c - a))
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| 0.5 * self.triangle_normal(t).norm()).sum()
    }

    pub fn face_area(&self, face: usize) -> f64 {
        (0..self.triangles.len()).filter(|&t| self.face_ids[t] == face).map(|t| 0.5 * self.triangle_normal(t).norm()).sum()
    }

    /// Merge vertices closer than `tol`; triangles that collapse are dropped.
    /// Bitwise-equal positions always merge together, so faces sharing
    /// boundary samples stay stitched whatever the visiting order.
    pub fn weld(&self, tol: f64) -> Mesh {
        let cell = |p: &[f64; 3]| p.map(|x| (x / tol).floor() as i64);
        let mut exact: HashMap<[u64; 3], usize> = HashMap::new();
        let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        let mut remap = Vec::with_capacity(self.vertices.len());
        let mut out = Mesh::default();
        for (i, p) in self.vertices.iter().enumerate() {
            let key = p.map(f64::to_bits);
            if let Some(&j) = exact.get(&key) {
                remap.push(j);
                continue;
            }
            let c = cell(p);
            let mut found: Option<(f64, usize)> = None;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        for &j in grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]).into_iter().flatten() {
                            let d = (out.vertex(j) - Vec3::from(*p)).norm();
                            if d < tol && found.is_none_or(|f| d < f.0) {
                                found = Some((d, j));
                            }
                        }
                    }
                }
            }
            let j = match found {
                Some((_, j)) => j,
                None => {
                    let j = out.push_vertex(Vec3::from(*p), Vec3::from(self.normals[i]));
                    grid.entry(c).or_default().push(j);
                    j
                }
            };
            exact.insert(key, j);
            remap.push(j);
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            let m = tri.map(|i| remap[i]);
            if m[0] != m[1] && m[1] != m[2] && m[0] != m[2] {
                out.triangles.push(m);
                out.face_ids.push(self.face_ids[t]);
            }
        }
        out
    }

    /// Undirected edges used by exactly one triangle.
    pub fn boundary_edge_count(&self) -> usize {
        let mut uses: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *uses.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        uses.values().filter(|&&n| n == 1).count()
    }

    /// Triangles whose winding disagrees with their vertex normals.
    pub fn winding_disagreements(&self) -> usize {
        (0..self.triangles.len())
            .filter(|&t| {
                let n: Vec3 = self.triangles[t].iter().map(|&i| Vec3::from(self.normals[i])).sum();
                self.triangle_normal(t).dot(&n) <= 0.0
            })
            .count()
    }

    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in &self.vertices {
            let p = Vec3::from(*p);
            lo = lo.inf(&p);
            hi = hi.sup(&p);
        }
        (lo, hi)
    }
}

/// Ray/triangle hit distance (Moller-Trumbore).
pub fn ray_triangle(o: Vec3, d: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Option<f64> {
    let (e1, e2) = (b - a, c - a);
    let p = d.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv = 1.0 / det;
    let s = o - a;
    let u = s.dot(&p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = d.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(&q) * inv;
    (t > 1e-12).then_some(t)
}

/// Result of casting rays at a closed mesh from outside.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RayParity {
    pub rays: usize,
    pub hit_rays: usize,
    pub odd_crossings: usize,
    pub inward_first_hits: usize,
}

impl RayParity {
    pub fn ok(&self) -> bool {
        self.odd_crossings == 0 && self.inward_first_hits == 0 && self.hit_rays > 0
    }
}

/// Rays from `n` points on a sphere around the mesh, aimed near its centre.
/// Each must cross an even number of times and enter through a face whose
/// normal opposes the ray.
pub fn ray_parity(mesh: &Mesh, n: usize) -> RayParity {
    let (lo, hi) = mesh.bounding_box();
    let center = 0.5 * (lo + hi);
    let radius = (hi - lo).norm().max(1e-9);
    let g = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut out = RayParity { rays: n, ..Default::default() };
    for k in 0..n {
        // Fibonacci sphere origins, targets jittered off the centre
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
        let r = (1.0 - z * z).sqrt();
        let phi = g * k as f64;
        let o = center + Vec3::new(r * phi.cos(), r * phi.sin(), z) * (2.0 * radius);
        let jitter = Vec3::new((0.37 * k as f64).sin(), (0.53 * k as f64).cos(), (0.71 * k as f64).sin()) * (0.1 * radius);
        let d = (center + jitter - o).normalize();
        let mut hits: Vec<(f64, usize)> = Vec::new();
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let [a, b, c] = tri.map(|i| mesh.vertex(i));
            if let Some(s) = ray_triangle(o, d, a, b, c) {
                hits.push((s, t));
            }
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        // hits on a shared edge are counted once
        hits.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-9);
        if hits.is_empty() {
            continue;
        }
        out.hit_rays += 1;
        if hits.len() % 2 == 1 {
            out.odd_crossings += 1;
        }
        if mesh.triangle_normal(hits[0].1).dot(&d) >= 0.0 {
            out.inward_first_hits += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn octahedron() -> Mesh {
        let mut m = Mesh::default();
        let pts = [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
        for p in pts {
            m.push_vertex(Vec3::from(p), Vec3::from(p));
        }
        let tris = [[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4], [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]];
        for t in tris {
            m.triangles.push(t);
            m.face_ids.push(0);
        }
        m
    }

    #[test]
    fn octahedron_is_closed_and_outward() {
        let m = octahedron();
        assert_eq!(m.boundary_edge_count(), 0);
        assert_eq!(m.winding_disagreements(), 0);
        let rp = ray_parity(&m, 100);
        assert!(rp.ok(), "{rp:?}");
        // area of the regular octahedron with unit vertices: 4 sqrt(3)
        assert!((m.area() - 4.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn flipped_mesh_fails_parity() {
        let mut m = octahedron();
        for t in &mut m.triangles {
            t.swap(1, 2);
        }
        assert!(!ray_parity(&m, 50).ok());
        assert_eq!(m.winding_disagreements(), 8);
    }

    #[test]
    fn weld_merges_duplicates() {
        let mut m = Mesh::default();
        let a = m.push_vertex(Vec3::zeros(), Vec3::z());
        let b = m.push_vertex(Vec3::x(), Vec3::z());
        let c = m.push_vertex(Vec3::y(), Vec3::z());
        let d = m.push_vertex(Vec3::x() + Vec3::repeat(1e-9), Vec3::z());
        let e = m.push_vertex(Vec3::y() - Vec3::repeat(1e-9), Vec3::z());
        let f = m.push_vertex(Vec3::new(1.0, 1.0, 0.0), Vec3::z());
        m.triangles = vec![[a, b, c], [d, f, e]];
        m.face_ids = vec![0, 1];
        let w = m.weld(1e-6);
        assert_eq!(w.vertices.len(), 4);
        assert_eq!(w.boundary_edge_count(), 4);
    }

    #[test]
    fn ray_hits_triangle() {
        let t = ray_triangle(Vec3::new(0.2, 0.2, 1.0), -Vec3::z(), Vec3::zeros(), Vec3::x(), Vec3::y());
        assert_eq!(t, Some(1.0));
        assert!(ray_triangle(Vec3::new(0.8, 0.8, 1.0), -Vec3::z(), Vec3::zeros(), Vec3::x(), Vec3::y()).is_none());
    }
}
