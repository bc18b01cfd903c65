//! Swept images of input vertices: one envelope vertex per root of `g(z, .)`.

use serde::{Deserialize, Serialize};

use super::vertex_frame;
use crate::brep::{BrepSolid, VertexId};
use crate::config::SolverConfig;
use crate::contact::grazing;
use crate::error::{Result, SweepError};
use crate::motion::{Trajectory, Vec3};
use crate::solve::roots_1d;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweptVertex {
    pub z: VertexId,
    pub root: usize,
    pub t: f64,
    pub position: Vec3,
    /// `f_t` at the root; its negative gives the orientation sign.
    pub ft: f64,
}

pub fn compute_vertices(solid: &BrepSolid, z: VertexId, traj: &Trajectory, cfg: &SolverConfig) -> Result<Vec<SweptVertex>> {
    let (x, n) = vertex_frame(solid, z)?;
    let phi = |t: f64| -> Result<(f64, f64)> {
        let pose = traj.eval_pose(t)?;
        let an = pose.rotation * n;
        let g = an.dot(&pose.velocity(&x));
        let gt = (pose.rotation_dot * n).dot(&pose.velocity(&x)) + an.dot(&pose.acceleration(&x));
        Ok((g, gt))
    };
    let r = roots_1d(phi, traj.t0(), traj.t1(), cfg)?;
    if let Some(&t) = r.tangential.first() {
        return Err(SweepError::DegenerateVertex { vertex: z, t });
    }
    r.roots
        .iter()
        .enumerate()
        .map(|(root, &t)| {
            let pose = traj.eval_pose(t)?;
            let ft = phi(t)?.1;
            debug_assert!(grazing(traj, &n, &x, t)?.abs() <= cfg.newton_tol * 10.0);
            Ok(SweptVertex { z, root, t, position: pose.apply(&x), ft })
        })
        .collect()
}
