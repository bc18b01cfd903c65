//! Wavefront OBJ output, one group per envelope face.

use std::fmt::Write as _;

use super::Mesh;
use crate::error::{Result, SweepError};

/// OBJ text for a mesh. Indices are 1-based and each vertex carries its own
/// normal (`f a//a b//b c//c`).
pub fn to_obj(mesh: &Mesh, name: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "o {name}");
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", v[0], v[1], v[2]);
    }
    for n in &mesh.normals {
        let _ = writeln!(s, "vn {} {} {}", n[0], n[1], n[2]);
    }
    let mut order: Vec<usize> = (0..mesh.triangles.len()).collect();
    order.sort_by_key(|&t| mesh.face_ids[t]);
    let mut group = None;
    for t in order {
        if group != Some(mesh.face_ids[t]) {
            group = Some(mesh.face_ids[t]);
            let _ = writeln!(s, "g face_{}", mesh.face_ids[t]);
        }
        let [a, b, c] = mesh.triangles[t].map(|i| i + 1);
        let _ = writeln!(s, "f {a}//{a} {b}//{b} {c}//{c}");
    }
    s
}

/// Parse OBJ text written by [`to_obj`].
pub fn from_obj(text: &str) -> Result<Mesh> {
    let bad = |line: usize, what: &str| SweepError::InvalidInput(format!("obj line {}: {what}", line + 1));
    let mut mesh = Mesh::default();
    let mut group = 0usize;
    for (ln, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let Some(tag) = it.next() else { continue };
        let rest: Vec<&str> = it.collect();
        match tag {
            "v" | "vn" => {
                let xs: Vec<f64> = rest.iter().map(|x| x.parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad(ln, "bad number"))?;
                let p: [f64; 3] = xs.try_into().map_err(|_| bad(ln, "expected three coordinates"))?;
                if tag == "v" {
                    mesh.vertices.push(p)
                } else {
                    mesh.normals.push(p)
                }
            }
            "g" => {
                group = rest.first().and_then(|g| g.strip_prefix("face_")).and_then(|g| g.parse().ok()).ok_or_else(|| bad(ln, "group name"))?;
            }
            "f" => {
                let idx: Vec<usize> = rest
                    .iter()
                    .map(|c| c.split("//").next().and_then(|i| i.parse::<usize>().ok()).filter(|&i| i >= 1).map(|i| i - 1))
                    .collect::<Option<_>>()
                    .ok_or_else(|| bad(ln, "bad face index"))?;
                let tri: [usize; 3] = idx.try_into().map_err(|_| bad(ln, "faces must be triangles"))?;
                mesh.triangles.push(tri);
                mesh.face_ids.push(group);
            }
            _ => {}
        }
    }
    if mesh.normals.len() != mesh.vertices.len() || mesh.triangles.iter().flatten().any(|&i| i >= mesh.vertices.len()) {
        return Err(SweepError::InvalidInput("obj indices out of range".into()));
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshout::tests::octahedron;

    #[test]
    fn obj_round_trip() {
        let mut m = octahedron();
        for (t, f) in m.face_ids.iter_mut().enumerate() {
            *f = t % 3;
        }
        let text = to_obj(&m, "oct");
        assert!(text.starts_with("o oct\nv 1 0 0\n"));
        assert_eq!(text.matches("\ng face_").count(), 3);
        let back = from_obj(&text).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.normals, m.normals);
        let mut a: Vec<_> = m.triangles.iter().zip(&m.face_ids).collect();
        let mut b: Vec<_> = back.triangles.iter().zip(&back.face_ids).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_quads() {
        assert!(from_obj("v 0 0 0\nvn 0 0 1\nf 1//1 1//1 1//1 1//1\n").is_err());
    }
}
