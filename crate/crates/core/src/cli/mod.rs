//! Command line: scene loading, bundled scenes and subcommands.
//!
//! Exit codes: 0 success, 1 load or input error, 2 non-simple sweep,
//! 3 solver or audit failure.

pub mod scene;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::contact::{Funnel, PointClass};
use crate::error::SweepError;
use crate::lift::audit::run_audits;
use crate::lift::{sweep_envelope, SweepInput};
use crate::meshout::brepfile::to_brep_string;
use crate::meshout::obj::to_obj;
use crate::meshout::report::{to_report_string, MeshSummary, ReportDocument};
use crate::meshout::{ray_parity, tessellate_envelope};
use crate::motion::validate_trajectory;
use scene::Scene;

pub const EXIT_OK: i32 = 0;
pub const EXIT_LOAD: i32 = 1;
pub const EXIT_NON_SIMPLE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Rays cast by the outward-normal parity check.
pub const PARITY_RAYS: usize = 100;
const DEFAULT_MESH_DENSITY: usize = 24;

/// Scenes shipped with the crate, addressed as `builtin:<name>`.
pub const BUNDLED: [(&str, &str); 7] = [
    ("arc-sphere", include_str!("../../scenes/arc-sphere.toml")),
    ("arc-sphere-r05", include_str!("../../scenes/arc-sphere-r05.toml")),
    ("capsule-helix", include_str!("../../scenes/capsule-helix.toml")),
    ("dumbbell-rotation", include_str!("../../scenes/dumbbell-rotation.toml")),
    ("cone-helix", include_str!("../../scenes/cone-helix.toml")),
    ("split-face", include_str!("../../scenes/split-face.toml")),
    ("const-translation", include_str!("../../scenes/const-translation.toml")),
];

/// Bundled scenes whose sweeps are simple.
pub const SIMPLE_SCENES: [&str; 5] = ["arc-sphere", "capsule-helix", "dumbbell-rotation", "cone-helix", "split-face"];

pub fn bundled_scene(name: &str) -> Option<Scene> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| Scene::parse(text).expect("bundled scene parses"))
}

#[derive(Debug, Parser)]
#[command(name = "sweepforge", version, about = "Envelope breps of smooth solids swept along rigid motions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the envelope and write brep, OBJ and report files.
    Sweep(CommonArgs),
    /// Check the input solid, trajectory and general position only.
    Validate(CommonArgs),
    /// Print the funnel jet and classification at one prism point.
    Probe {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        face: usize,
        #[arg(long, allow_negative_numbers = true)]
        u: f64,
        #[arg(long, allow_negative_numbers = true)]
        v: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scene file, or `builtin:<name>` for a bundled scene.
    #[arg(long)]
    pub scene: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Grid cells per side for cap interiors and row stride for contact faces.
    #[arg(long)]
    pub mesh_density: Option<usize>,
    /// Global coincidence tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Machine-readable output.
    #[arg(long)]
    pub porcelain: bool,
    /// Cells per side of the interior seeding grid.
    #[arg(long)]
    pub seed_density: Option<usize>,
}

struct Loaded {
    scene: Scene,
    input: SweepInput,
}

fn load(args: &CommonArgs) -> Result<Loaded, SweepError> {
    let (mut scene, base) = match args.scene.strip_prefix("builtin:") {
        Some(name) => (bundled_scene(name).ok_or_else(|| SweepError::InvalidInput(format!("no bundled scene {name}")))?, PathBuf::from(".")),
        None => {
            let path = Path::new(&args.scene);
            (Scene::load(path)?, path.parent().map(Path::to_path_buf).unwrap_or_default())
        }
    };
    if let Some(tol) = args.tol {
        scene.config.coincidence_tol = tol;
    }
    if let Some(d) = args.seed_density {
        scene.config.grid_seed_density = d;
    }
    scene.config.validate()?;
    let input = scene.input(&base)?;
    Ok(Loaded { scene, input })
}

fn exit_code(e: &SweepError) -> i32 {
    match e.root() {
        SweepError::NonSimpleSweepSuspected { .. } => EXIT_NON_SIMPLE,
        SweepError::InvalidInput(_) | SweepError::Io(_) => EXIT_LOAD,
        _ => EXIT_SOLVER,
    }
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

/// Paths of the three sweep outputs.
pub fn output_paths(scene: &Scene, out_dir: &Path) -> [PathBuf; 3] {
    let o = &scene.output;
    let pick = |p: &Option<String>, ext: &str| out_dir.join(p.clone().unwrap_or_else(|| format!("{}.{ext}", scene.name)));
    [pick(&o.brep, "brep.json"), pick(&o.obj, "obj"), pick(&o.report, "report.json")]
}

pub fn cmd_sweep(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let loaded = match load(args) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_LOAD;
        }
    };
    let Loaded { scene, input } = loaded;
    let density = args.mesh_density.or(scene.output.mesh_density).unwrap_or(DEFAULT_MESH_DENSITY);
    let result = with_jobs(args.jobs, || -> Result<_, SweepError> {
        let (env, mut report) = sweep_envelope(&input)?;
        report.audits = run_audits(&input.solid, &input.traj, &env, &input.config).map_err(|e| e.at_stage("audit"))?;
        let mesh = tessellate_envelope(&env, density).map_err(|e| e.at_stage("mesh"))?;
        Ok((env, report, mesh))
    });
    let (env, report, mesh) = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let summary = MeshSummary {
        vertices: mesh.vertices.len(),
        triangles: mesh.triangles.len(),
        boundary_edges: mesh.boundary_edge_count(),
        winding_disagreements: mesh.winding_disagreements(),
        area: mesh.area(),
        ray_parity: ray_parity(&mesh, PARITY_RAYS),
    };
    let doc = ReportDocument { sweep: report, mesh: Some(summary.clone()) };
    let [brep_path, obj_path, report_path] = output_paths(&scene, &args.out_dir);
    let written = (|| -> Result<(), SweepError> {
        std::fs::create_dir_all(&args.out_dir)?;
        std::fs::write(&brep_path, to_brep_string(&env.solid, &scene.name)?)?;
        std::fs::write(&obj_path, to_obj(&mesh, &scene.name))?;
        std::fs::write(&report_path, to_report_string(&doc)?)?;
        Ok(())
    })();
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_LOAD;
    }
    let failed: Vec<&str> = doc.sweep.audits.iter().filter(|a| !a.passed).map(|a| a.name.as_str()).collect();
    let mesh_ok = summary.boundary_edges == 0 && summary.winding_disagreements == 0 && summary.ray_parity.ok();
    let c = &doc.sweep.counts;
    if args.porcelain {
        let _ = writeln!(
            out,
            "scene={} vertices={} edges={} faces={} theta_min={:e} min_coc_distance={:e} failed_audits={} watertight={}",
            scene.name,
            c.vertices(),
            c.edges(),
            c.faces(),
            doc.sweep.theta_min,
            doc.sweep.min_coc_distance,
            failed.len(),
            mesh_ok
        );
    } else {
        let _ = writeln!(out, "{}: {} vertices, {} edges, {} faces", scene.name, c.vertices(), c.edges(), c.faces());
        let _ = writeln!(out, "  theta_min {:.6e}, min coc distance {:.6e}", doc.sweep.theta_min, doc.sweep.min_coc_distance);
        for a in &doc.sweep.audits {
            let _ = writeln!(out, "  audit {:<22} {} ({} checked, {} failures)", a.name, if a.passed { "pass" } else { "FAIL" }, a.checked, a.failures);
        }
        let _ = writeln!(
            out,
            "  mesh {} triangles, {} open edges, ray parity {}/{} clean",
            summary.triangles,
            summary.boundary_edges,
            summary.ray_parity.hit_rays - summary.ray_parity.odd_crossings.max(summary.ray_parity.inward_first_hits),
            summary.ray_parity.hit_rays
        );
        for p in [&brep_path, &obj_path, &report_path] {
            let _ = writeln!(out, "  wrote {}", p.display());
        }
    }
    if !failed.is_empty() || !mesh_ok {
        let _ = writeln!(err, "error: failed checks: {}{}", failed.join(", "), if mesh_ok { "" } else { " mesh" });
        return EXIT_SOLVER;
    }
    EXIT_OK
}

pub fn cmd_validate(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Loaded { input, .. } = match load(args) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_LOAD;
        }
    };
    let mut warnings: Vec<String> = validate_trajectory(&input.traj, 200).iter().map(|v| format!("trajectory: {v:?}")).collect();
    for f in 0..input.solid.faces.len() {
        let Some(patch) = input.solid.patch(f) else { continue };
        match Funnel::new(f, patch, &input.traj).general_position_report(input.config.grid_seed_density) {
            Ok(r) => warnings.extend(r.violations.iter().map(|v| format!("face {f}: {v}"))),
            Err(e) => warnings.push(format!("face {f}: {e}")),
        }
    }
    if args.porcelain {
        let _ = writeln!(out, "scene={} faces={} warnings={}", input.name, input.solid.faces.len(), warnings.len());
    } else {
        let _ = writeln!(out, "{}: solid valid, {} faces", input.name, input.solid.faces.len());
    }
    for w in &warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    EXIT_OK
}

#[derive(Debug, Serialize)]
struct ProbeOutput {
    face: usize,
    u: f64,
    v: f64,
    t: f64,
    f: f64,
    fu: f64,
    fv: f64,
    ft: f64,
    theta: Option<f64>,
    orientation_sign: i32,
    class: PointClass,
}

pub fn cmd_probe(args: &CommonArgs, face: usize, u: f64, v: f64, t: f64, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Loaded { input, .. } = match load(args) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_LOAD;
        }
    };
    let Some(patch) = input.solid.faces.get(face).and_then(|_| input.solid.patch(face)) else {
        let _ = writeln!(err, "error: no patch face {face}");
        return EXIT_LOAD;
    };
    let funnel = Funnel::new(face, patch, &input.traj);
    let probe = (|| -> Result<ProbeOutput, SweepError> {
        let fp = funnel.jet(u, v, t)?;
        Ok(ProbeOutput {
            face,
            u,
            v,
            t,
            f: fp.f,
            fu: fp.fu,
            fv: fp.fv,
            ft: fp.ft,
            theta: funnel.frame_and_theta(&fp).ok().map(|ft| ft.theta),
            orientation_sign: fp.orientation_sign(),
            class: funnel.classify_point(u, v, t, input.config.coincidence_tol)?,
        })
    })();
    let p = match probe {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_LOAD;
        }
    };
    if args.porcelain {
        let _ = writeln!(out, "{}", serde_json::to_string(&p).unwrap_or_default());
    } else {
        let class = serde_json::to_value(p.class).ok().and_then(|c| c.as_str().map(String::from)).unwrap_or_default();
        let _ = writeln!(out, "face {} at (u, v, t) = ({}, {}, {})", p.face, p.u, p.v, p.t);
        let _ = writeln!(out, "  f   {:+.12e}\n  f_u {:+.12e}\n  f_v {:+.12e}\n  f_t {:+.12e}", p.f, p.fu, p.fv, p.ft);
        match p.theta {
            Some(th) => {
                let _ = writeln!(out, "  theta {th:+.12e}");
            }
            None => {
                let _ = writeln!(out, "  theta undefined (f_u = f_v = 0)");
            }
        }
        let _ = writeln!(out, "  orientation sign {}\n  class {class}", p.orientation_sign);
    }
    EXIT_OK
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_LOAD;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match &cli.command {
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Validate(a) => cmd_validate(a, out, err),
        Command::Probe { common, face, u, v, t } => cmd_probe(common, *face, *u, *v, *t, out, err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("sweepforge").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn bundled_scenes_parse() {
        for (name, _) in BUNDLED {
            assert_eq!(bundled_scene(name).unwrap().name, name);
        }
    }

    #[test]
    fn missing_scene_exits_1() {
        let (code, _, err) = run_str(&["sweep", "--scene", "/nonexistent/scene.toml"]);
        assert_eq!(code, EXIT_LOAD);
        assert!(err.contains("nonexistent"), "{err}");
        assert_eq!(run_str(&["sweep", "--scene", "builtin:nope"]).0, EXIT_LOAD);
    }

    #[test]
    fn probe_top_point_on_coc() {
        // face 4 is +z; its centre is the north pole, where f = f_t = 0 at t = 0
        let (code, out, _) = run_str(&["probe", "--scene", "builtin:arc-sphere", "--face", "4", "--u", "0", "--v", "0", "--t", "0", "--porcelain"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["class"], "on-coc");
        assert_eq!(v["orientation_sign"], 0);
        assert!(v["f"].as_f64().unwrap().abs() < 1e-12 && v["ft"].as_f64().unwrap().abs() < 1e-12);
    }

    #[test]
    fn probe_classes() {
        // +y face centre (0, 1, 0): f = 3 at t = 0, interior of the sweep
        let (_, out, _) = run_str(&["probe", "--scene", "builtin:arc-sphere", "--face", "2", "--u", "0", "--v", "0", "--t", "0.5", "--porcelain"]);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["class"], "interior-sweep");
        // -y face centre (0, -1, 0) at t0: f = -3, behind the motion
        let (_, out, _) = run_str(&["probe", "--scene", "builtin:arc-sphere", "--face", "3", "--u", "0", "--v", "0", "--t", "0", "--porcelain"]);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["class"], "left-cap-candidate");
        assert!((v["f"].as_f64().unwrap() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn validate_exit_codes() {
        let (code, out, _) = run_str(&["validate", "--scene", "builtin:arc-sphere", "--porcelain"]);
        assert_eq!(code, 0);
        assert!(out.contains("warnings=0"), "{out}");
        let (code, out, _) = run_str(&["validate", "--scene", "builtin:const-translation", "--porcelain"]);
        assert_eq!(code, 0);
        assert!(!out.contains("warnings=0"), "{out}");
    }
}
