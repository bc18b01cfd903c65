use serde::{Deserialize, Serialize};

use crate::error::{Result, SweepError};

/// Numerical knobs shared by the root finder, the curve tracers and the
/// assembler. Every field can be overridden from a scene file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Residual below which a Newton iterate is accepted.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub trace_step_init: f64,
    pub trace_step_min: f64,
    pub trace_step_max: f64,
    /// Samples per side when scanning a boundary for sign changes.
    pub boundary_scan_density: usize,
    /// Cells per side of the interior seeding grid used to find closed loops.
    pub grid_seed_density: usize,
    /// Global geometric coincidence tolerance (scene units).
    pub coincidence_tol: f64,
    /// Chordal deviation between consecutive curves of contact stored in a face.
    pub coc_chordal_tol: f64,
    pub max_coc_rows: usize,
    /// Samples per p-curve row in face geometry.
    pub row_samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            newton_tol: 1e-10,
            max_newton_iters: 30,
            trace_step_init: 0.005,
            trace_step_min: 1e-7,
            trace_step_max: 0.01,
            boundary_scan_density: 256,
            grid_seed_density: 64,
            coincidence_tol: 1e-6,
            coc_chordal_tol: 1e-3,
            max_coc_rows: 512,
            row_samples: 33,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("newton_tol", self.newton_tol),
            ("trace_step_init", self.trace_step_init),
            ("trace_step_min", self.trace_step_min),
            ("trace_step_max", self.trace_step_max),
            ("coincidence_tol", self.coincidence_tol),
            ("coc_chordal_tol", self.coc_chordal_tol),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SweepError::InvalidInput(format!("{name} must be positive")));
            }
        }
        if !(self.trace_step_min <= self.trace_step_init && self.trace_step_init <= self.trace_step_max) {
            return Err(SweepError::InvalidInput("trace steps must satisfy min <= init <= max".into()));
        }
        if self.max_newton_iters == 0 || self.boundary_scan_density < 2 || self.grid_seed_density < 2 || self.max_coc_rows < 2 || self.row_samples < 2 {
            return Err(SweepError::InvalidInput("sample counts too small".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SolverConfig::default().validate().unwrap();
    }

    #[test]
    fn step_ordering_enforced() {
        let cfg = SolverConfig { trace_step_min: 0.5, ..SolverConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn partial_override_from_toml() {
        let cfg: SolverConfig = toml::from_str("newton_tol = 1e-12\ngrid_seed_density = 32").unwrap();
        assert_eq!(cfg.newton_tol, 1e-12);
        assert_eq!(cfg.grid_seed_density, 32);
        assert_eq!(cfg.max_newton_iters, 30);
    }
}
