//! Scene files and the bundled solid generators.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::brep::BrepSolid;
use crate::config::SolverConfig;
use crate::error::{Result, SweepError};
use crate::lift::SweepInput;
use crate::meshout::brepfile::read_brep;
use crate::motion::Trajectory;
use crate::surface::{CubeFace, PatchKind, StarShape, SurfacePatch};

pub const SCENE_VERSION: &str = "sweepforge-scene/1";

/// Samples stored per edge of a generated solid.
const EDGE_SAMPLES: usize = 33;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SolidSpec {
    Ellipsoid {
        semi_axes: [f64; 3],
    },
    /// Smooth capsule along z: equator radius `radius`, tip to tip
    /// `length + 2 radius`.
    Capsule {
        radius: f64,
        length: f64,
    },
    Torus {
        major: f64,
        minor: f64,
    },
    /// Star-shaped solid of revolution, radius `profile(cos angle to axis)`.
    Revolve {
        profile: Vec<f64>,
        axis: [f64; 3],
    },
    /// A solid read from a brep file, relative to the scene file.
    Brep {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub brep: Option<String>,
    pub obj: Option<String>,
    pub report: Option<String>,
    pub mesh_density: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub version: String,
    pub name: String,
    /// Length unit of every coordinate; times are in the same scene units.
    pub units: String,
    pub solid: SolidSpec,
    pub trajectory: Trajectory,
    #[serde(default)]
    pub config: SolverConfig,
    #[serde(default)]
    pub output: OutputSpec,
}

fn bad(what: impl Into<String>) -> SweepError {
    SweepError::InvalidInput(what.into())
}

fn cube_sphere(shape: StarShape) -> Vec<(SurfacePatch, Vec<[f64; 2]>)> {
    CubeFace::ALL
        .iter()
        .map(|&face| {
            let patch = SurfacePatch::new(PatchKind::CubeSphere { face, shape: shape.clone() }, [[-1.0, 1.0], [-1.0, 1.0]]);
            (patch, vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
        })
        .collect()
}

fn unit_axis(a: [f64; 3]) -> Result<[f64; 3]> {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if !(n > 1e-12) {
        return Err(bad("axis must be nonzero"));
    }
    Ok(a.map(|x| x / n))
}

impl SolidSpec {
    pub fn build(&self, base: &Path) -> Result<BrepSolid> {
        let positive = |x: f64, what: &str| if x > 0.0 && x.is_finite() { Ok(()) } else { Err(bad(format!("{what} must be positive"))) };
        match self {
            SolidSpec::Ellipsoid { semi_axes } => {
                for a in semi_axes {
                    positive(*a, "semi-axis")?;
                }
                BrepSolid::from_patch_polygons(cube_sphere(StarShape::Ellipsoid { semi_axes: *semi_axes }), vec![0], EDGE_SAMPLES)
            }
            SolidSpec::Capsule { radius, length } => {
                positive(*radius, "radius")?;
                positive(*length, "length")?;
                // offset of a thin ellipsoid: smooth everywhere, nearly straight-sided
                let core = [0.2 * radius, 0.2 * radius, 0.5 * length + 0.2 * radius];
                BrepSolid::from_patch_polygons(cube_sphere(StarShape::OffsetEllipsoid { core, offset: 0.8 * radius }), vec![0], EDGE_SAMPLES)
            }
            SolidSpec::Torus { major, minor } => {
                positive(*minor, "minor radius")?;
                if !(major > minor) {
                    return Err(bad("major radius must exceed minor radius"));
                }
                let pi = std::f64::consts::PI;
                let mut faces = Vec::new();
                for i in 0..2 {
                    for j in 0..2 {
                        let (u0, v0) = (i as f64 * pi, j as f64 * pi - 0.5 * pi);
                        let patch = SurfacePatch::new(PatchKind::TorusSegment { major: *major, minor: *minor }, [[u0, u0 + pi], [v0, v0 + pi]]);
                        faces.push((patch, vec![[u0, v0], [u0 + pi, v0], [u0 + pi, v0 + pi], [u0, v0 + pi]]));
                    }
                }
                BrepSolid::from_patch_polygons(faces, vec![1], EDGE_SAMPLES)
            }
            SolidSpec::Revolve { profile, axis } => {
                let axis = unit_axis(*axis)?;
                if profile.is_empty() {
                    return Err(bad("empty profile"));
                }
                // the radius must stay positive over c in [-1, 1]
                let rho = |c: f64| profile.iter().rev().fold(0.0, |acc, k| acc * c + k);
                if (0..=200).map(|i| rho(-1.0 + i as f64 / 100.0)).any(|r| !(r > 0.0)) {
                    return Err(bad("revolve profile must be positive on [-1, 1]"));
                }
                BrepSolid::from_patch_polygons(cube_sphere(StarShape::Revolution { axis, profile: profile.clone() }), vec![0], EDGE_SAMPLES)
            }
            SolidSpec::Brep { path } => Ok(read_brep(&base.join(path))?.solid),
        }
    }
}

impl Scene {
    pub fn parse(text: &str) -> Result<Scene> {
        let mut scene: Scene = toml::from_str(text).map_err(|e| bad(format!("scene: {}", e.to_string().trim_end())))?;
        if scene.version != SCENE_VERSION {
            return Err(bad(format!("scene version {} (expected {SCENE_VERSION})", scene.version)));
        }
        scene.trajectory.prepare()?;
        scene.config.validate()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Scene> {
        let text = std::fs::read_to_string(path).map_err(|e| SweepError::Io(format!("{}: {e}", path.display())))?;
        Scene::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| bad(e.to_string()))
    }

    /// Solid, trajectory and configuration, with the solid validated.
    pub fn input(&self, base: &Path) -> Result<SweepInput> {
        let solid = self.solid.build(base)?;
        let violations = solid.validate_solid(self.config.coincidence_tol);
        if !violations.is_empty() {
            return Err(bad(format!("input solid invalid: {violations:?}")));
        }
        Ok(SweepInput { name: self.name.clone(), solid, traj: self.trajectory.clone(), config: self.config })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::Vec3;

    const ARC: &str = r#"
version = "sweepforge-scene/1"
name = "t"
units = "mm"
[solid]
generator = "ellipsoid"
semi_axes = [1.0, 1.0, 1.0]
[trajectory]
kind = "circular-arc"
radius = 3.0
interval = [0.0, 1.5]
[config]
row_samples = 17
"#;

    #[test]
    fn parse_and_round_trip() {
        let s = Scene::parse(ARC).unwrap();
        assert_eq!(s.config.row_samples, 17);
        assert_eq!(s.config.coincidence_tol, 1e-6);
        let back = Scene::parse(&s.to_toml().unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn load_errors_are_located() {
        assert!(Scene::parse(&ARC.replace("scene/1", "scene/7")).is_err());
        let e = Scene::parse(&ARC.replace("row_samples", "row_sample")).unwrap_err();
        assert!(e.to_string().contains("row_sample"), "{e}");
        assert!(Scene::parse(&ARC.replace("3.0", "-3.0")).is_err());
    }

    /// Largest angle between the normals of the two faces along each edge.
    fn crease(solid: &BrepSolid) -> f64 {
        let mut worst: f64 = 0.0;
        for uses in solid.edge_uses() {
            let normals: Vec<Vec<Vec3>> = uses
                .iter()
                .map(|&c| {
                    let curve = solid.coedge_curve(c).unwrap();
                    let patch = solid.patch(solid.face_of_coedge(c)).unwrap();
                    (0..=8)
                        .map(|i| {
                            let uv = curve.map.eval(i as f64 / 8.0).0;
                            patch.unit_normal(uv[0], uv[1]).unwrap()
                        })
                        .collect()
                })
                .collect();
            for i in 0..=8 {
                worst = worst.max((normals[0][i] - normals[1][i]).norm());
            }
        }
        worst
    }

    #[test]
    fn generators_are_valid_and_smooth() {
        let specs = [
            SolidSpec::Ellipsoid { semi_axes: [1.0, 0.7, 1.4] },
            SolidSpec::Capsule { radius: 0.5, length: 2.0 },
            SolidSpec::Torus { major: 2.0, minor: 0.5 },
            SolidSpec::Revolve { profile: vec![0.5, 0.0, 0.0, 0.0, 1.0], axis: [1.0, 0.0, 0.0] },
        ];
        for spec in specs {
            let s = spec.build(Path::new(".")).unwrap();
            assert_eq!(s.validate_solid(1e-6), vec![], "{spec:?}");
            assert!(crease(&s) < 1e-8, "{spec:?}: {}", crease(&s));
        }
    }

    #[test]
    fn capsule_dimensions() {
        let s = SolidSpec::Capsule { radius: 0.5, length: 2.0 }.build(Path::new(".")).unwrap();
        // +z face centre is the tip, +x face centre is on the equator
        let tip = s.patch(4).unwrap().eval(0.0, 0.0).unwrap();
        assert!((tip - Vec3::new(0.0, 0.0, 1.5)).norm() < 1e-12, "{tip}");
        let side = s.patch(0).unwrap().eval(0.0, 0.0).unwrap();
        assert!((side - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-12, "{side}");
    }

    #[test]
    fn bad_profile_rejected() {
        let spec = SolidSpec::Revolve { profile: vec![0.1, -1.0], axis: [0.0, 0.0, 1.0] };
        assert!(spec.build(Path::new(".")).is_err());
    }
}
