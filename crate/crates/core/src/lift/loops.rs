//! Boundary loops of the contact faces in each face prism.
//!
//! A loop alternates between lifted edge contact curves and end-time curves
//! of contact. The walk chooses the next piece at the free vertex of the
//! last one: after a coc take the edge piece leaving the trim vertex, after
//! an edge piece ending at a trim vertex take the coc leaving it, and after
//! an edge piece ending at a swept vertex move to the adjacent input co-edge.

use serde::{Deserialize, Serialize};

use super::cocs::CocComponent;
use super::coedges::EdgeComponent;
use super::{sense_sign, CurveEndpoint};
use crate::brep::{BrepSolid, CapSide, CoedgeId, FaceId};
use crate::error::{Result, SweepError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "piece", rename_all = "kebab-case")]
pub enum PieceKind {
    /// Edge component `comp` of the edge of input co-edge `coedge`.
    Edge { coedge: CoedgeId, comp: usize },
    /// Curve of contact `index` at the `side` end time.
    Coc { side: CapSide, index: usize },
}

/// A boundary curve of a contact face in traversal direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub kind: PieceKind,
    /// Whether the traversal follows the stored sample order.
    pub forward: bool,
    pub start: CurveEndpoint,
    pub end: CurveEndpoint,
}

impl Piece {
    pub fn is_closed(&self) -> bool {
        self.start == CurveEndpoint::Seam
    }
}

/// Pieces and loops found in one input face prism.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FaceLoops {
    pub face: FaceId,
    pub pieces: Vec<Piece>,
    pub loops: Vec<Vec<usize>>,
    /// Walk steps where the coc rule and the trim rule both applied.
    pub tie_breaks: usize,
}

/// All boundary pieces of face `face` with their traversal direction.
pub fn face_pieces(solid: &BrepSolid, face: FaceId, edges: &[Vec<EdgeComponent>], cocs: &[Vec<CocComponent>; 2]) -> Vec<Piece> {
    let mut out = Vec::new();
    for c in solid.face_coedges(face) {
        let ce = &solid.coedges[c];
        for comp in &edges[ce.edge] {
            let forward = comp.dir_sign == sense_sign(ce.sense);
            let (start, end) = if forward { (comp.start, comp.end) } else { (comp.end, comp.start) };
            out.push(Piece { kind: PieceKind::Edge { coedge: c, comp: comp.index }, forward, start, end });
        }
    }
    for side in CapSide::BOTH {
        for coc in &cocs[side as usize] {
            // bottom curves run along -beta, top curves along +beta
            let forward = coc.beta_forward == (side == CapSide::Right);
            let (start, end) = if forward { (coc.start, coc.end) } else { (coc.end, coc.start) };
            out.push(Piece { kind: PieceKind::Coc { side, index: coc.index }, forward, start, end });
        }
    }
    out
}

fn describe(face: FaceId, v: &CurveEndpoint) -> String {
    format!("face {face} vertex {v:?}")
}

/// Next piece after `cur`, following the three walk rules. `first` stays a
/// candidate so that the walk can close.
fn next_piece(solid: &BrepSolid, face: FaceId, pieces: &[Piece], used: &[bool], first: usize, cur: usize, tie_breaks: &mut usize) -> Result<usize> {
    let free = pieces[cur].end;
    let starting = |pred: &dyn Fn(&PieceKind) -> bool| -> Vec<usize> {
        (0..pieces.len()).filter(|&k| (!used[k] || k == first) && !pieces[k].is_closed() && pieces[k].start == free && pred(&pieces[k].kind)).collect()
    };
    let is_edge = |q: &PieceKind| matches!(q, PieceKind::Edge { .. });
    let is_coc = |q: &PieceKind| matches!(q, PieceKind::Coc { .. });
    let cands = match (pieces[cur].kind, free) {
        (PieceKind::Coc { .. }, CurveEndpoint::Trim { .. }) => {
            if !starting(&is_coc).is_empty() {
                *tie_breaks += 1;
            }
            starting(&is_edge)
        }
        (PieceKind::Edge { .. }, CurveEndpoint::Trim { .. }) => starting(&is_coc),
        (PieceKind::Edge { coedge, .. }, CurveEndpoint::Swept { z, .. }) => {
            let c2 = solid.adjacent_coedge(coedge, z)?;
            starting(&|q| matches!(q, PieceKind::Edge { coedge, .. } if *coedge == c2))
        }
        _ => Vec::new(),
    };
    match cands.as_slice() {
        [] => Err(SweepError::NoCandidate { location: describe(face, &free) }),
        [k] => Ok(*k),
        _ => Err(SweepError::AmbiguousCandidate { location: describe(face, &free) }),
    }
}

/// Walk all loops of one face from its pieces.
pub fn build_loops(solid: &BrepSolid, face: FaceId, pieces: Vec<Piece>) -> Result<FaceLoops> {
    let mut used = vec![false; pieces.len()];
    let mut loops = Vec::new();
    let mut tie_breaks = 0;
    for first in 0..pieces.len() {
        if used[first] {
            continue;
        }
        used[first] = true;
        if pieces[first].is_closed() {
            loops.push(vec![first]);
            continue;
        }
        let mut lp = vec![first];
        let mut cur = first;
        loop {
            let next = next_piece(solid, face, &pieces, &used, first, cur, &mut tie_breaks).map_err(|e| match e {
                SweepError::NoCandidate { location } => SweepError::LoopNotClosed { partial: format!("{location}, walked {lp:?}") },
                other => other,
            })?;
            if next == first {
                break;
            }
            if used[next] || lp.len() > pieces.len() {
                return Err(SweepError::LoopNotClosed { partial: format!("face {face} revisits piece {next} after {lp:?}") });
            }
            used[next] = true;
            lp.push(next);
            cur = next;
        }
        loops.push(lp);
    }
    Ok(FaceLoops { face, pieces, loops, tie_breaks })
}
