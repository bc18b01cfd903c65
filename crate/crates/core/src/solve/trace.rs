//! Implicit curve tracing in a rectangle: boundary scan, grid seeding for
//! closed components, tangent predictor with Newton corrector.

use serde::{Deserialize, Serialize};

use super::roots::roots_1d;
use crate::config::SolverConfig;
use crate::error::{Result, SweepError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Rect {
    pub fn new(lo: [f64; 2], hi: [f64; 2]) -> Self {
        Rect { lo, hi }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.lo[0] && p[0] <= self.hi[0] && p[1] >= self.lo[1] && p[1] <= self.hi[1]
    }

    pub fn diameter(&self) -> f64 {
        (self.hi[0] - self.lo[0]).hypot(self.hi[1] - self.lo[1])
    }

    /// Point on a side at parameter `s in [0, 1]`, sides traversed
    /// counterclockwise.
    pub fn side_point(&self, side: Side, s: f64) -> [f64; 2] {
        let [x0, y0] = self.lo;
        let [x1, y1] = self.hi;
        match side {
            Side::Bottom => [x0 + s * (x1 - x0), y0],
            Side::Right => [x1, y0 + s * (y1 - y0)],
            Side::Top => [x1 - s * (x1 - x0), y1],
            Side::Left => [x0, y1 - s * (y1 - y0)],
        }
    }

    fn side_velocity(&self, side: Side) -> [f64; 2] {
        let dx = self.hi[0] - self.lo[0];
        let dy = self.hi[1] - self.lo[1];
        match side {
            Side::Bottom => [dx, 0.0],
            Side::Right => [0.0, dy],
            Side::Top => [-dx, 0.0],
            Side::Left => [0.0, -dy],
        }
    }

    /// Sum of inward normals of the sides the point lies on.
    fn inward(&self, p: [f64; 2]) -> [f64; 2] {
        let e = 1e-12 * self.diameter();
        let mut n = [0.0, 0.0];
        if (p[0] - self.lo[0]).abs() <= e {
            n[0] += 1.0;
        }
        if (p[0] - self.hi[0]).abs() <= e {
            n[0] -= 1.0;
        }
        if (p[1] - self.lo[1]).abs() <= e {
            n[1] += 1.0;
        }
        if (p[1] - self.hi[1]).abs() <= e {
            n[1] -= 1.0;
        }
        n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Right, Side::Top, Side::Left];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRoot {
    pub point: [f64; 2],
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "end", rename_all = "kebab-case")]
pub enum EndTag {
    /// Index into the boundary root list.
    Boundary {
        root: usize,
    },
    Closed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve2 {
    pub points: Vec<[f64; 2]>,
    pub start: EndTag,
    pub end: EndTag,
}

impl Curve2 {
    pub fn is_closed(&self) -> bool {
        self.start == EndTag::Closed
    }

    pub fn reversed(&self) -> Curve2 {
        let mut points = self.points.clone();
        points.reverse();
        Curve2 { points, start: self.end, end: self.start }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TraceOutput {
    pub curves: Vec<Curve2>,
    pub boundary_roots: Vec<BoundaryRoot>,
    /// Tangential boundary roots, reported and not traced.
    pub tangential: Vec<[f64; 2]>,
}

/// Scalar field with gradient.
pub trait Field2 {
    fn eval(&self, p: [f64; 2]) -> Result<(f64, [f64; 2])>;
}

impl<F: Fn([f64; 2]) -> Result<(f64, [f64; 2])>> Field2 for F {
    fn eval(&self, p: [f64; 2]) -> Result<(f64, [f64; 2])> {
        self(p)
    }
}

/// Transversal zeros of the field on the rectangle boundary, deduplicated
/// at corners.
pub fn boundary_roots<F: Field2>(field: &F, rect: &Rect, cfg: &SolverConfig) -> Result<(Vec<BoundaryRoot>, Vec<[f64; 2]>)> {
    let mut roots: Vec<BoundaryRoot> = Vec::new();
    let mut tangential = Vec::new();
    let dup = 1e-9 * rect.diameter();
    for side in Side::ALL {
        let vel = rect.side_velocity(side);
        let r = roots_1d(
            |s| {
                let (f, g) = field.eval(rect.side_point(side, s))?;
                Ok((f, g[0] * vel[0] + g[1] * vel[1]))
            },
            0.0,
            1.0,
            cfg,
        )?;
        for s in r.roots {
            let point = rect.side_point(side, s);
            if !roots.iter().any(|b| dist(b.point, point) < dup) {
                roots.push(BoundaryRoot { point, side });
            }
        }
        tangential.extend(r.tangential.into_iter().map(|s| rect.side_point(side, s)));
    }
    Ok((roots, tangential))
}

/// Every component of the zero set inside the rectangle.
pub fn trace_components<F: Field2>(field: &F, rect: &Rect, cfg: &SolverConfig) -> Result<TraceOutput> {
    let (roots, tangential) = boundary_roots(field, rect, cfg)?;
    let mut tracer = Tracer { field, rect, cfg, roots: &roots, used: vec![false; roots.len()] };
    let mut curves = Vec::new();
    for i in 0..roots.len() {
        if tracer.used[i] {
            continue;
        }
        tracer.used[i] = true;
        let start = roots[i].point;
        let dir = tracer.initial_direction(start)?;
        let (points, end) = tracer.march(start, dir, false)?;
        curves.push(Curve2 { points, start: EndTag::Boundary { root: i }, end });
    }
    tracer.seed_closed(&mut curves)?;
    Ok(TraceOutput { curves, boundary_roots: roots, tangential })
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn perp(g: [f64; 2]) -> [f64; 2] {
    let n = g[0].hypot(g[1]);
    [-g[1] / n, g[0] / n]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

struct Tracer<'a, F: Field2> {
    field: &'a F,
    rect: &'a Rect,
    cfg: &'a SolverConfig,
    roots: &'a [BoundaryRoot],
    used: Vec<bool>,
}

enum Correction {
    Converged([f64; 2], usize),
    Outside,
    Failed,
}

impl<F: Field2> Tracer<'_, F> {
    fn initial_direction(&self, p: [f64; 2]) -> Result<[f64; 2]> {
        let (_, g) = self.field.eval(p)?;
        let t = perp(g);
        let n = self.rect.inward(p);
        Ok(if dot(t, n) >= 0.0 { t } else { [-t[0], -t[1]] })
    }

    fn correct(&self, mut q: [f64; 2]) -> Result<Correction> {
        for k in 0..self.cfg.max_newton_iters.min(10) {
            if !self.rect.contains(q) {
                return Ok(Correction::Outside);
            }
            let (f, g) = self.field.eval(q)?;
            if f.abs() <= self.cfg.newton_tol {
                return Ok(Correction::Converged(q, k));
            }
            let g2 = g[0] * g[0] + g[1] * g[1];
            if !(g2 > 0.0) {
                return Ok(Correction::Failed);
            }
            q = [q[0] - f * g[0] / g2, q[1] - f * g[1] / g2];
        }
        Ok(Correction::Failed)
    }

    /// Nearest unused boundary root ahead of `p` within `reach`.
    fn exit_root(&self, p: [f64; 2], t: [f64; 2], reach: f64) -> Option<usize> {
        (0..self.roots.len())
            .filter(|&i| !self.used[i])
            .filter(|&i| {
                let r = self.roots[i].point;
                let d = dist(r, p);
                d <= reach && dot([r[0] - p[0], r[1] - p[1]], t) >= -1e-12 * reach
            })
            .min_by(|&a, &b| dist(self.roots[a].point, p).total_cmp(&dist(self.roots[b].point, p)))
    }

    fn collapse(&self, p: [f64; 2]) -> SweepError {
        SweepError::StepCollapse { location: format!("({:.6}, {:.6})", p[0], p[1]) }
    }

    /// March from `start` in direction `dir` until a boundary root or, when
    /// `closing`, a return to `start`.
    fn march(&mut self, start: [f64; 2], dir: [f64; 2], closing: bool) -> Result<(Vec<[f64; 2]>, EndTag)> {
        let cfg = self.cfg;
        let mut points = vec![start];
        let mut p = start;
        let mut tau = dir;
        let mut h = cfg.trace_step_init;
        let mut easy = 0;
        let mut travelled = 0.0;
        let limit = 2_000_000usize;
        loop {
            if points.len() > limit {
                return Err(SweepError::NoConvergence { location: format!("trace from ({}, {}) exceeded {limit} samples", start[0], start[1]) });
            }
            let (_, g) = self.field.eval(p)?;
            let mut t = perp(g);
            if !t[0].is_finite() || !t[1].is_finite() {
                return Err(self.collapse(p));
            }
            if dot(t, tau) < 0.0 {
                t = [-t[0], -t[1]];
            }
            if closing && travelled > 4.0 * h {
                let back = [start[0] - p[0], start[1] - p[1]];
                let d = dist(start, p);
                if d <= 1.5 * h && dot(back, t) > 0.0 {
                    return Ok((points, EndTag::Closed));
                }
            }
            let q0 = [p[0] + h * t[0], p[1] + h * t[1]];
            let outcome = if self.rect.contains(q0) { self.correct(q0)? } else { Correction::Outside };
            match outcome {
                Correction::Converged(q, iters) => {
                    let step = dist(p, q);
                    let (_, gq) = self.field.eval(q)?;
                    let tq = perp(gq);
                    let turn = dot(tq, t).abs();
                    if step > 2.0 * h || step < 0.25 * h || turn < 0.966 {
                        h *= 0.5;
                        easy = 0;
                        if h < cfg.trace_step_min {
                            return Err(self.collapse(p));
                        }
                        continue;
                    }
                    travelled += step;
                    points.push(q);
                    p = q;
                    tau = t;
                    if iters <= 2 {
                        easy += 1;
                        if easy >= 2 {
                            h = (2.0 * h).min(cfg.trace_step_max);
                            easy = 0;
                        }
                    } else {
                        easy = 0;
                    }
                }
                Correction::Outside => {
                    if let Some(i) = self.exit_root(p, t, 1.5 * h) {
                        self.used[i] = true;
                        points.push(self.roots[i].point);
                        return Ok((points, EndTag::Boundary { root: i }));
                    }
                    h *= 0.5;
                    easy = 0;
                    if h < cfg.trace_step_min {
                        if let Some(i) = self.exit_root(p, t, 100.0 * cfg.trace_step_min.max(1e-6)) {
                            self.used[i] = true;
                            points.push(self.roots[i].point);
                            return Ok((points, EndTag::Boundary { root: i }));
                        }
                        return Err(self.collapse(p));
                    }
                }
                Correction::Failed => {
                    h *= 0.5;
                    easy = 0;
                    if h < cfg.trace_step_min {
                        return Err(self.collapse(p));
                    }
                }
            }
        }
    }

    /// Find closed components from sign changes on an interior grid that
    /// are not already covered by traced curves.
    fn seed_closed(&mut self, curves: &mut Vec<Curve2>) -> Result<()> {
        let n = self.cfg.grid_seed_density.max(2);
        let rect = *self.rect;
        let dx = (rect.hi[0] - rect.lo[0]) / n as f64;
        let dy = (rect.hi[1] - rect.lo[1]) / n as f64;
        let node = |i: usize, j: usize| [rect.lo[0] + dx * i as f64, rect.lo[1] + dy * j as f64];
        let mut vals = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..=n {
            for j in 0..=n {
                vals[i * (n + 1) + j] = self.field.eval(node(i, j))?.0;
            }
        }
        let cover = dx.hypot(dy);
        let mut index = CoverIndex::new(&rect, cover);
        for c in curves.iter() {
            index.add(&c.points);
        }
        let mut seeds = Vec::new();
        for i in 0..=n {
            for j in 0..=n {
                let a = vals[i * (n + 1) + j];
                if i < n {
                    let b = vals[(i + 1) * (n + 1) + j];
                    if a * b < 0.0 {
                        seeds.push((node(i, j), node(i + 1, j), a));
                    }
                }
                if j < n {
                    let b = vals[i * (n + 1) + j + 1];
                    if a * b < 0.0 {
                        seeds.push((node(i, j), node(i, j + 1), a));
                    }
                }
            }
        }
        for (a, b, fa) in seeds {
            let seed = self.bisect_segment(a, b, fa)?;
            if index.near(seed, cover) || !rect.contains(seed) {
                continue;
            }
            let dir = perp(self.field.eval(seed)?.1);
            let (points, end) = self.march(seed, dir, true)?;
            let curve = if end == EndTag::Closed {
                Curve2 { points, start: EndTag::Closed, end: EndTag::Closed }
            } else {
                // an open component the boundary scan missed
                let (back, start_tag) = self.march(seed, [-dir[0], -dir[1]], false)?;
                let mut pts: Vec<[f64; 2]> = back.into_iter().rev().collect();
                pts.extend_from_slice(&points[1..]);
                Curve2 { points: pts, start: start_tag, end }
            };
            index.add(&curve.points);
            curves.push(curve);
        }
        Ok(())
    }

    fn bisect_segment(&self, mut a: [f64; 2], mut b: [f64; 2], mut fa: f64) -> Result<[f64; 2]> {
        for _ in 0..60 {
            let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let fm = self.field.eval(m)?.0;
            if fm == 0.0 {
                return Ok(m);
            }
            if fm * fa < 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        Ok([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])])
    }
}

/// Bucket grid over traced samples for proximity queries.
struct CoverIndex {
    lo: [f64; 2],
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<[f64; 2]>>,
}

impl CoverIndex {
    fn new(rect: &Rect, cell: f64) -> Self {
        let cols = (((rect.hi[0] - rect.lo[0]) / cell).ceil() as usize).max(1);
        let rows = (((rect.hi[1] - rect.lo[1]) / cell).ceil() as usize).max(1);
        CoverIndex { lo: rect.lo, cell, cols, rows, buckets: vec![Vec::new(); cols * rows] }
    }

    fn bucket(&self, p: [f64; 2]) -> (usize, usize) {
        let i = (((p[0] - self.lo[0]) / self.cell).floor().max(0.0) as usize).min(self.cols - 1);
        let j = (((p[1] - self.lo[1]) / self.cell).floor().max(0.0) as usize).min(self.rows - 1);
        (i, j)
    }

    fn add(&mut self, points: &[[f64; 2]]) {
        for &p in points {
            let (i, j) = self.bucket(p);
            self.buckets[i * self.rows + j].push(p);
        }
    }

    fn near(&self, p: [f64; 2], r: f64) -> bool {
        let (i, j) = self.bucket(p);
        for a in i.saturating_sub(1)..=(i + 1).min(self.cols - 1) {
            for b in j.saturating_sub(1)..=(j + 1).min(self.rows - 1) {
                if self.buckets[a * self.rows + b].iter().any(|&q| dist(p, q) < r) {
                    return true;
                }
            }
        }
        false
    }
}
