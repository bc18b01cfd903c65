//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use sweepforge::cli::bundled_scene;
use sweepforge::lift::SweepInput;

pub fn scene_input(name: &str) -> SweepInput {
    bundled_scene(name).unwrap_or_else(|| panic!("no bundled scene {name}")).input(Path::new(".")).unwrap()
}

/// Zero set of a sampled field on a rectangle, one polyline soup per
/// connected component.
#[derive(Debug, Clone)]
pub struct Contour {
    pub points: Vec<[f64; 2]>,
    pub segments: Vec<[[f64; 2]; 2]>,
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Marching squares on an `n x n` cell grid over `[lo, hi]`. Nodes with
/// `f > 0` are inside; saddle cells are resolved by the cell average.
pub fn marching_squares<F>(f: F, lo: [f64; 2], hi: [f64; 2], n: usize) -> Vec<Contour>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let x = |i: usize| lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64;
    let y = |j: usize| lo[1] + (hi[1] - lo[1]) * j as f64 / n as f64;
    let vals: Vec<Vec<f64>> = (0..=n).into_par_iter().map(|j| (0..=n).map(|i| f(x(i), y(j))).collect()).collect();
    let val = |i: usize, j: usize| vals[j][i];
    // grid edge ids: horizontal (i, j)-(i+1, j) then vertical (i, j)-(i, j+1)
    let h_id = |i: usize, j: usize| j * n + i;
    let v_id = |i: usize, j: usize| n * (n + 1) + j * (n + 1) + i;
    let total = 2 * n * (n + 1);
    let cross = |a: f64, b: f64| -a / (b - a);
    let mut point: HashMap<usize, [f64; 2]> = HashMap::new();
    let mut edge_point = |id: usize, p: [f64; 2]| {
        point.entry(id).or_insert(p);
        id
    };
    let mut parent: Vec<usize> = (0..total).collect();
    let mut segs: Vec<(usize, usize)> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let c = [val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)];
            let s = c.map(|v| v > 0.0);
            // crossed sides in counterclockwise order: bottom, right, top, left
            let mut hits = Vec::with_capacity(4);
            if s[0] != s[1] {
                hits.push(edge_point(h_id(i, j), [x(i) + cross(c[0], c[1]) * (x(i + 1) - x(i)), y(j)]));
            }
            if s[1] != s[2] {
                hits.push(edge_point(v_id(i + 1, j), [x(i + 1), y(j) + cross(c[1], c[2]) * (y(j + 1) - y(j))]));
            }
            if s[3] != s[2] {
                hits.push(edge_point(h_id(i, j + 1), [x(i) + cross(c[3], c[2]) * (x(i + 1) - x(i)), y(j + 1)]));
            }
            if s[0] != s[3] {
                hits.push(edge_point(v_id(i, j), [x(i), y(j) + cross(c[0], c[3]) * (y(j + 1) - y(j))]));
            }
            let pairs: Vec<(usize, usize)> = match hits.len() {
                2 => vec![(hits[0], hits[1])],
                4 => {
                    let center_in = c.iter().sum::<f64>() > 0.0;
                    // corner 0 is cut off together with its two sides unless the
                    // centre shares its state
                    if center_in == s[0] {
                        vec![(hits[0], hits[1]), (hits[2], hits[3])]
                    } else {
                        vec![(hits[0], hits[3]), (hits[1], hits[2])]
                    }
                }
                _ => vec![],
            };
            for (a, b) in pairs {
                union(&mut parent, a, b);
                segs.push((a, b));
            }
        }
    }
    let mut ids: Vec<usize> = point.keys().copied().collect();
    ids.sort_unstable();
    let mut comp_of: HashMap<usize, usize> = HashMap::new();
    let mut out: Vec<Contour> = Vec::new();
    for id in ids {
        let r = find(&mut parent, id);
        let k = *comp_of.entry(r).or_insert_with(|| {
            out.push(Contour { points: Vec::new(), segments: Vec::new() });
            out.len() - 1
        });
        out[k].points.push(point[&id]);
    }
    for (a, b) in segs {
        let k = comp_of[&find(&mut parent, a)];
        out[k].segments.push([point[&a], point[&b]]);
    }
    out
}

pub fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let s = if l2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - s * d[0]).hypot(p[1] - a[1] - s * d[1])
}

/// Largest distance from `points` to the segment set.
pub fn directed_distance(points: &[[f64; 2]], segments: &[[[f64; 2]; 2]]) -> f64 {
    points.par_iter().map(|&p| segments.iter().map(|s| point_segment_distance(p, s[0], s[1])).fold(f64::INFINITY, f64::min)).reduce(|| 0.0, f64::max)
}

/// Segments of an open or closed polyline.
pub fn polyline_segments(points: &[[f64; 2]], closed: bool) -> Vec<[[f64; 2]; 2]> {
    let mut s: Vec<_> = points.windows(2).map(|w| [w[0], w[1]]).collect();
    if closed && points.len() > 2 {
        s.push([points[points.len() - 1], points[0]]);
    }
    if s.is_empty() && !points.is_empty() {
        s.push([points[0], points[0]]);
    }
    s
}

pub fn hausdorff(a_pts: &[[f64; 2]], a_segs: &[[[f64; 2]; 2]], b_pts: &[[f64; 2]], b_segs: &[[[f64; 2]; 2]]) -> f64 {
    directed_distance(a_pts, b_segs).max(directed_distance(b_pts, a_segs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_is_one_component_close_to_truth() {
        let cs = marching_squares(|x, y| 0.25 - (x - 0.5).powi(2) - (y - 0.5).powi(2), [0.0, 0.0], [1.0, 1.0], 256);
        assert_eq!(cs.len(), 1);
        let worst = cs[0].points.iter().map(|p| ((p[0] - 0.5).hypot(p[1] - 0.5) - 0.5).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn two_vertical_lines_are_two_components() {
        let cs = marching_squares(|x, _| (x - 0.3) * (x - 0.7), [0.0, 0.0], [1.0, 2.0], 64);
        assert_eq!(cs.len(), 2);
    }

    #[test]
    fn saddle_level_does_not_merge_branches() {
        // hyperbola branches x y = 0.01 in opposite quadrants
        let cs = marching_squares(|x, y| x * y - 0.01, [-1.0, -1.0], [1.0, 1.0], 200);
        assert_eq!(cs.len(), 2);
    }

    #[test]
    fn hausdorff_of_offset_segments() {
        let a = [[0.0, 0.0], [1.0, 0.0]];
        let b = [[0.0, 0.1], [1.0, 0.1]];
        let h = hausdorff(&a, &polyline_segments(&a, false), &b, &polyline_segments(&b, false));
        assert!((h - 0.1).abs() < 1e-15);
    }
}
