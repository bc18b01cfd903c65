//! Assembly of the lifted pieces into the envelope brep.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::caps::{CapFace, CapPieceKind, CapSegment};
use super::cocs::CocComponent;
use super::coedges::EdgeComponent;
use super::faces::ContactFace;
use super::loops::{FaceLoops, PieceKind};
use super::vertices::SweptVertex;
use super::CurveEndpoint;
use crate::brep::{
    BrepSolid, CapSide, Coedge, Edge, EdgeCurve, EdgeId, EntityKind, EnvelopeFaceGeometry, Face, FaceGeometry, FaceId, Loop, PCurve, SourceRef, SourceRole,
    Vertex, VertexId,
};
use crate::error::{Result, SweepError};
use crate::motion::{Trajectory, Vec3};
use crate::surface::Sense;

/// Everything computed by the lifting stages.
#[derive(Debug, Clone, Default)]
pub struct LiftStages {
    pub swept: Vec<Vec<SweptVertex>>,
    pub edges: Vec<Vec<EdgeComponent>>,
    pub trims: Vec<[Vec<f64>; 2]>,
    pub cocs: Vec<[Vec<CocComponent>; 2]>,
    pub loops: Vec<FaceLoops>,
    pub contact: Vec<ContactFace>,
    pub segments: [Vec<Vec<CapSegment>>; 2],
    pub caps: Vec<CapFace>,
}

/// Entity counts of the envelope by origin.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvelopeCounts {
    pub swept_vertices: usize,
    pub trim_vertices: usize,
    pub cap_vertices: usize,
    pub seam_vertices: usize,
    pub contact_edges: usize,
    pub coc_edges: usize,
    pub cap_edges: usize,
    pub contact_faces: usize,
    pub left_caps: usize,
    pub right_caps: usize,
}

impl EnvelopeCounts {
    pub fn vertices(&self) -> usize {
        self.swept_vertices + self.trim_vertices + self.cap_vertices + self.seam_vertices
    }

    pub fn edges(&self) -> usize {
        self.contact_edges + self.coc_edges + self.cap_edges
    }

    pub fn faces(&self) -> usize {
        self.contact_faces + self.left_caps + self.right_caps
    }
}

/// The envelope brep with the record of where its entities came from.
#[derive(Debug, Clone)]
pub struct EnvelopeBrep {
    pub solid: BrepSolid,
    pub counts: EnvelopeCounts,
    pub stages: LiftStages,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeKey {
    Contact(EdgeId, usize),
    Coc(FaceId, CapSide, usize),
    Segment(EdgeId, CapSide, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum VertexKey {
    Swept(VertexId, usize),
    Trim(EdgeId, CapSide, u64),
    Cap(VertexId, CapSide),
    Seam(EdgeKey),
}

fn cap_role(side: CapSide) -> SourceRole {
    match side {
        CapSide::Left => SourceRole::LeftCap,
        CapSide::Right => SourceRole::RightCap,
    }
}

struct Builder<'a> {
    input: &'a BrepSolid,
    traj: &'a Trajectory,
    st: &'a LiftStages,
    out: BrepSolid,
    vertices: HashMap<VertexKey, VertexId>,
    edges: HashMap<EdgeKey, EdgeId>,
    counts: EnvelopeCounts,
}

impl Builder<'_> {
    fn vertex(&mut self, ep: CurveEndpoint, owner: EdgeKey, near: Vec3) -> Result<VertexId> {
        let key = match ep {
            CurveEndpoint::Swept { z, root } => VertexKey::Swept(z, root),
            CurveEndpoint::Trim { edge, side, s } => VertexKey::Trim(edge, side, s.to_bits()),
            CurveEndpoint::Cap { z, side } => VertexKey::Cap(z, side),
            CurveEndpoint::Seam => VertexKey::Seam(owner),
        };
        if let Some(&v) = self.vertices.get(&key) {
            return Ok(v);
        }
        let (position, source) = match ep {
            CurveEndpoint::Swept { z, root } => {
                self.counts.swept_vertices += 1;
                (self.st.swept[z][root].position, SourceRef::new(EntityKind::Vertex, z, root, SourceRole::Contact))
            }
            CurveEndpoint::Trim { edge, side, s } => {
                self.counts.trim_vertices += 1;
                let left = &self.st.trims[edge][0];
                let list = &self.st.trims[edge][side as usize];
                let k = list
                    .iter()
                    .position(|x| *x == s)
                    .ok_or_else(|| SweepError::StitchFailure { reason: format!("trim point s={s} of edge {edge} is not recorded") })?;
                let idx = if side == CapSide::Left { k } else { left.len() + k };
                (near, SourceRef::new(EntityKind::Edge, edge, idx, SourceRole::CocTrim))
            }
            CurveEndpoint::Cap { z, side } => {
                self.counts.cap_vertices += 1;
                let pose = self.traj.eval_pose(side.time(self.traj))?;
                let p = pose.apply(&Vec3::from(self.input.vertices[z].position));
                (p, SourceRef::new(EntityKind::Vertex, z, 0, cap_role(side)))
            }
            CurveEndpoint::Seam => {
                self.counts.seam_vertices += 1;
                let source = match owner {
                    EdgeKey::Contact(e, j) => SourceRef::new(EntityKind::Edge, e, j, SourceRole::Contact),
                    EdgeKey::Coc(f, _, k) => SourceRef::new(EntityKind::Face, f, k, SourceRole::CocTrim),
                    EdgeKey::Segment(e, side, k) => SourceRef::new(EntityKind::Edge, e, k, cap_role(side)),
                };
                (near, source)
            }
        };
        self.out.vertices.push(Vertex { position: position.into(), source: Some(source) });
        let id = self.out.vertices.len() - 1;
        self.vertices.insert(key, id);
        Ok(id)
    }

    /// Edge for a stored curve; samples are in stored order.
    fn edge(&mut self, key: EdgeKey, start: CurveEndpoint, end: CurveEndpoint, positions: &[Vec3]) -> Result<EdgeId> {
        if let Some(&e) = self.edges.get(&key) {
            return Ok(e);
        }
        let closed = start == CurveEndpoint::Seam;
        let vs = self.vertex(start, key, positions[0])?;
        let ve = if closed { vs } else { self.vertex(end, key, *positions.last().unwrap())? };
        let mut samples: Vec<[f64; 3]> = positions.iter().map(|p| (*p).into()).collect();
        if closed {
            samples.push(samples[0]);
        }
        let source = match key {
            EdgeKey::Contact(e, j) => {
                self.counts.contact_edges += 1;
                SourceRef::new(EntityKind::Edge, e, j, SourceRole::Contact)
            }
            EdgeKey::Coc(f, side, k) => {
                self.counts.coc_edges += 1;
                let offset = if side == CapSide::Right { self.st.cocs[f][0].len() } else { 0 };
                SourceRef::new(EntityKind::Face, f, offset + k, SourceRole::CocTrim)
            }
            EdgeKey::Segment(e, side, k) => {
                self.counts.cap_edges += 1;
                SourceRef::new(EntityKind::Edge, e, k, cap_role(side))
            }
        };
        self.out.edges.push(Edge { start: vs, end: ve, curve: EdgeCurve { samples }, source: Some(source) });
        let id = self.out.edges.len() - 1;
        self.edges.insert(key, id);
        Ok(id)
    }

    fn push_loop(&mut self, face: FaceId, uses: Vec<(EdgeId, bool, Vec<[f64; 2]>)>) -> usize {
        let loop_id = self.out.loops.len();
        let mut coedges = Vec::with_capacity(uses.len());
        for (edge, forward, points) in uses {
            let sense = if forward { Sense::Forward } else { Sense::Reversed };
            self.out.coedges.push(Coedge { edge, loop_id, sense, pcurve: PCurve::Sampled { points } });
            coedges.push(self.out.coedges.len() - 1);
        }
        self.out.loops.push(Loop { coedges, face });
        loop_id
    }
}

fn closed_chart(mut pts: Vec<[f64; 2]>, closed: bool) -> Vec<[f64; 2]> {
    if closed {
        pts.push(pts[0]);
    }
    pts
}

/// Build the envelope brep from the lifted pieces.
pub fn assemble(input: &BrepSolid, traj: &Trajectory, st: LiftStages) -> Result<EnvelopeBrep> {
    let mut b = Builder {
        input,
        traj,
        st: &st,
        out: BrepSolid { genus: input.genus.clone(), ..Default::default() },
        vertices: HashMap::new(),
        edges: HashMap::new(),
        counts: EnvelopeCounts::default(),
    };
    for cf in &st.contact {
        let f = cf.input_face;
        let fl = st.loops.iter().find(|l| l.face == f).ok_or_else(|| SweepError::StitchFailure { reason: format!("no loops for face {f}") })?;
        let face_id = b.out.faces.len();
        let mut uses = Vec::new();
        for (i, &k) in fl.loops[cf.loop_index].iter().enumerate() {
            let piece = fl.pieces[k];
            let edge = match piece.kind {
                PieceKind::Edge { coedge, comp } => {
                    let e = input.coedges[coedge].edge;
                    let c = &st.edges[e][comp];
                    b.edge(EdgeKey::Contact(e, comp), c.start, c.end, &c.positions)?
                }
                PieceKind::Coc { side, index } => {
                    let c = &st.cocs[f][side as usize][index];
                    b.edge(EdgeKey::Coc(f, side, index), c.start, c.end, &c.positions)?
                }
            };
            uses.push((edge, piece.forward, closed_chart(cf.piece_charts[i].clone(), piece.is_closed())));
        }
        let outer = b.push_loop(face_id, uses);
        b.out.faces.push(Face {
            geometry: FaceGeometry::Envelope(cf.geometry()),
            outer,
            inner: Vec::new(),
            source: Some(SourceRef::new(EntityKind::Face, f, cf.loop_index, SourceRole::Contact)),
        });
        b.counts.contact_faces += 1;
    }
    for cap in &st.caps {
        let f = cap.input_face;
        let side = cap.side;
        let face_id = b.out.faces.len();
        let mut loop_ids = Vec::new();
        for lp in std::iter::once(&cap.outer).chain(&cap.inner) {
            let mut uses = Vec::new();
            for &k in lp {
                let piece = cap.pieces[k];
                let edge = match piece.kind {
                    CapPieceKind::Segment { coedge, index } => {
                        let e = input.coedges[coedge].edge;
                        let s = &st.segments[side as usize][e][index];
                        b.edge(EdgeKey::Segment(e, side, index), s.start, s.end, &s.positions)?
                    }
                    CapPieceKind::Coc { index } => {
                        let c = &st.cocs[f][side as usize][index];
                        b.edge(EdgeKey::Coc(f, side, index), c.start, c.end, &c.positions)?
                    }
                };
                let uv = cap.samples[k].iter().map(|s| s.uv).collect();
                uses.push((edge, piece.forward, closed_chart(uv, piece.start == CurveEndpoint::Seam)));
            }
            loop_ids.push(b.push_loop(face_id, uses));
        }
        let time = side.time(traj);
        let pose = traj.eval_pose(time)?;
        let patch = input.patch(f).ok_or_else(|| SweepError::InvalidInput(format!("face {f} is not a patch")))?.clone();
        let r = pose.rotation;
        b.out.faces.push(Face {
            geometry: FaceGeometry::Envelope(EnvelopeFaceGeometry::Cap {
                input_face: f,
                side,
                time,
                rotation: [[r[(0, 0)], r[(0, 1)], r[(0, 2)]], [r[(1, 0)], r[(1, 1)], r[(1, 2)]], [r[(2, 0)], r[(2, 1)], r[(2, 2)]]],
                translation: pose.translation.into(),
                patch,
            }),
            outer: loop_ids[0],
            inner: loop_ids[1..].to_vec(),
            source: Some(SourceRef::new(EntityKind::Face, f, cap.index, cap_role(side))),
        });
        match side {
            CapSide::Left => b.counts.left_caps += 1,
            CapSide::Right => b.counts.right_caps += 1,
        }
    }
    let (solid, counts) = (b.out, b.counts);
    Ok(EnvelopeBrep { solid, counts, stages: st })
}
