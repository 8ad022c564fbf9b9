use std::f64::consts::PI;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use capvar::bem::{assemble, spd_check, write_matrix_dump, QuadratureRule};
use capvar::capacitance::{bound_ledger, solve_capacitance, Solver};
use capvar::convergence::RefinementStudy;
use capvar::geometry::{
    build_panels, detect_stl_format, make_cube, make_ellipsoid, make_icosphere, read_obj, read_stl_ascii,
    read_stl_binary, write_obj, write_stl_binary, MeshError, MeshFormat, SurfaceMesh,
};
use capvar::varprinciple::{find_witness, verify_principle, MatrixInput};

use crate::args::{
    ConvergeArgs, FileFormat, GenerateArgs, MeshSource, NumericArgs, PrincipleArgs, Shape, ShapeParams, SolveArgs,
    SolverChoice,
};
use crate::error::CliError;
use crate::report::*;

fn solver(choice: SolverChoice) -> Solver {
    match choice {
        SolverChoice::Direct => Solver::Direct,
        SolverChoice::Cg => Solver::Cg,
        SolverChoice::Auto => Solver::Auto,
    }
}

fn shape_error(e: MeshError) -> CliError {
    match e {
        MeshError::InvalidParameter(msg) => CliError::Usage(msg),
        other => CliError::Mesh { source: other, path: None },
    }
}

/// Builds a generated shape. `level` is the subdivision count or the panels
/// per edge, depending on the shape.
pub fn make_shape(shape: Shape, params: &ShapeParams, level: usize) -> Result<(SurfaceMesh, MeshOrigin), CliError> {
    let subdiv = || u32::try_from(level).map_err(|_| CliError::Usage(format!("subdivision count {level} is too large")));
    let (mesh, origin) = match shape {
        Shape::Icosphere => {
            let subdiv = subdiv()?;
            (
                make_icosphere(params.radius, subdiv).map_err(shape_error)?,
                MeshOrigin::Shape {
                    shape: "icosphere".into(),
                    radius: Some(params.radius),
                    side: None,
                    semiaxes: None,
                    subdiv: Some(subdiv),
                    panels_per_edge: None,
                },
            )
        }
        Shape::Ellipsoid => {
            let subdiv = subdiv()?;
            let semiaxes: [f64; 3] = params
                .semiaxes
                .as_deref()
                .ok_or_else(|| CliError::Usage("--shape ellipsoid needs --semiaxes a,b,c".into()))?
                .try_into()
                .map_err(|_| CliError::Usage("--semiaxes takes exactly three values".into()))?;
            (
                make_ellipsoid(semiaxes, subdiv).map_err(shape_error)?,
                MeshOrigin::Shape {
                    shape: "ellipsoid".into(),
                    radius: None,
                    side: None,
                    semiaxes: Some(semiaxes),
                    subdiv: Some(subdiv),
                    panels_per_edge: None,
                },
            )
        }
        Shape::Cube => (
            make_cube(params.side, level).map_err(shape_error)?,
            MeshOrigin::Shape {
                shape: "cube".into(),
                radius: None,
                side: Some(params.side),
                semiaxes: None,
                subdiv: None,
                panels_per_edge: Some(level),
            },
        ),
    };
    Ok((mesh, origin))
}

fn format_of(path: &Path, format: Option<FileFormat>) -> Result<FileFormat, CliError> {
    if let Some(f) = format {
        return Ok(f);
    }
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("obj") => Ok(FileFormat::Obj),
        Some("stl") => Ok(FileFormat::Stl),
        _ => Err(CliError::Usage(format!(
            "cannot infer the mesh format of {}; pass --format obj|stl",
            path.display()
        ))),
    }
}

fn format_name(format: MeshFormat) -> &'static str {
    match format {
        MeshFormat::Obj => "obj",
        MeshFormat::StlAscii => "stl-ascii",
        MeshFormat::StlBinary => "stl-binary",
    }
}

/// Reads and validates a mesh file. STL files are told apart by content.
pub fn read_mesh_file(path: &Path, format: Option<FileFormat>) -> Result<(SurfaceMesh, MeshOrigin), CliError> {
    let format = format_of(path, format)?;
    let bytes = fs::read(path).map_err(CliError::io(path))?;
    let format = match format {
        FileFormat::Obj => MeshFormat::Obj,
        FileFormat::Stl => detect_stl_format(&bytes),
    };
    let mesh = match format {
        MeshFormat::Obj => read_obj(bytes.as_slice()),
        MeshFormat::StlAscii => read_stl_ascii(bytes.as_slice()),
        MeshFormat::StlBinary => read_stl_binary(bytes.as_slice()),
    }
    .map_err(|source| CliError::Mesh {
        source,
        path: Some(path.to_path_buf()),
    })?;
    let origin = MeshOrigin::File {
        path: path.display().to_string(),
        format: format_name(format).into(),
    };
    Ok((mesh, origin))
}

fn load_source(source: &MeshSource) -> Result<(SurfaceMesh, MeshOrigin), CliError> {
    match (&source.shape, &source.mesh) {
        (Some(shape), None) => {
            let level = match shape {
                Shape::Cube => source.panels_per_edge,
                _ => source.subdiv as usize,
            };
            make_shape(*shape, &source.params, level)
        }
        (None, Some(path)) => read_mesh_file(path, source.format),
        _ => Err(CliError::Usage("give exactly one of --shape and --mesh".into())),
    }
}

pub fn mesh_stats(mesh: &SurfaceMesh, total_area: f64) -> MeshStats {
    let (lo, hi) = mesh.bounding_box();
    MeshStats {
        panels: mesh.num_triangles(),
        vertices: mesh.num_vertices(),
        total_area,
        bounding_box: BoundingBox {
            min: lo.into(),
            max: hi.into(),
        },
    }
}

/// Writes `bytes` to `path`.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(CliError::io(path))
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<GenerateOutput, CliError> {
    let level = match args.shape {
        Shape::Cube => args.panels_per_edge,
        _ => args.subdiv as usize,
    };
    let (mesh, source) = make_shape(args.shape, &args.params, level)?;
    let format = format_of(&args.out, args.format)?;
    let file = fs::File::create(&args.out).map_err(CliError::io(&args.out))?;
    let mut out = BufWriter::new(file);
    match format {
        FileFormat::Obj => write_obj(&mesh, &mut out),
        FileFormat::Stl => write_stl_binary(&mesh, &mut out),
    }
    .and_then(|_| out.flush())
    .map_err(CliError::io(&args.out))?;
    Ok(GenerateOutput {
        schema: MESH_SCHEMA,
        path: args.out.display().to_string(),
        format: match format {
            FileFormat::Obj => "obj",
            FileFormat::Stl => "stl-binary",
        }
        .into(),
        source,
        mesh: mesh_stats(&mesh, build_panels(&mesh).total_area()),
    })
}

/// The full pipeline for one mesh: panels, assembly, positivity check,
/// solve and bound ledger.
pub fn solve_mesh(
    mesh: &SurfaceMesh,
    source: MeshOrigin,
    numeric: &NumericArgs,
    dump: Option<&Path>,
) -> Result<CapacitanceReport, CliError> {
    let rule = QuadratureRule::of_order(numeric.quad_order as usize)?;
    let mut timings = Timings::default();

    let t = Instant::now();
    let panels = build_panels(mesh);
    timings.mesh = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let system = assemble(&panels, &rule)?;
    timings.assembly = t.elapsed().as_secs_f64();
    if let Some(path) = dump {
        write_matrix_dump(&system, path, sidecar_path(path))?;
    }

    let t = Instant::now();
    let spd = spd_check(&system);
    timings.spd_check = t.elapsed().as_secs_f64();
    if !spd.is_spd() {
        return Err(CliError::NotSpd {
            min_eigenvalue: spd.min_eigenvalue,
        });
    }

    let t = Instant::now();
    let solution = solve_capacitance(&system, solver(numeric.solver))?;
    timings.solve = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let ledger = bound_ledger(&system, &solution)?;
    timings.bounds = t.elapsed().as_secs_f64();
    timings.total = timings.mesh + timings.assembly + timings.spd_check + timings.solve + timings.bounds;

    let c = solution.capacitance;
    Ok(CapacitanceReport {
        schema: CAPACITANCE_SCHEMA,
        config: SolveConfig {
            source,
            quad_order: numeric.quad_order,
            solver: solver(numeric.solver),
            seed: numeric.seed,
        },
        mesh: mesh_stats(mesh, system.total_area()),
        capacitance_c: c,
        c_over_4pi: c / (4.0 * PI),
        c_zeroth: ledger.c_zeroth,
        j: ledger.j,
        ledger_violations: ledger.violations(),
        subspace_bounds: ledger.subspace_bounds,
        gauss_value_at_sigma: ledger.gauss_value_at_sigma,
        total_charge: solution.total_charge,
        energy: solution.energy(&system),
        spd: SpdDiagnostics {
            min_eigenvalue: spd.min_eigenvalue,
            cholesky_succeeded: spd.cholesky_succeeded,
            asymmetry_norm: system.asymmetry_norm(),
            iterations: spd.iterations,
            converged: spd.converged,
        },
        residual_norm: solution.residual_norm,
        solver_used: solution.solver,
        solver_iterations: solution.iterations,
        timings,
    })
}

/// `<path>.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn cmd_solve(args: &SolveArgs) -> Result<CapacitanceReport, CliError> {
    let t = Instant::now();
    let (mesh, origin) = load_source(&args.source)?;
    let load = t.elapsed().as_secs_f64();
    let mut report = solve_mesh(&mesh, origin, &args.numeric, args.dump_matrix.as_deref())?;
    report.timings.mesh += load;
    report.timings.total += load;
    Ok(report)
}

/// Ratio between successive mesh widths for a list of levels.
fn refinement_ratio(shape: Shape, levels: &[usize]) -> Result<f64, CliError> {
    if levels.len() < 2 {
        return Err(CliError::Usage(format!(
            "a convergence study needs at least 2 refinement levels, got {}",
            levels.len()
        )));
    }
    match shape {
        // each subdivision halves the edges
        Shape::Icosphere | Shape::Ellipsoid => {
            if levels.windows(2).any(|w| w[1] != w[0] + 1) {
                return Err(CliError::Usage("subdivision levels must be consecutive, e.g. 2,3,4".into()));
            }
            Ok(2.0)
        }
        Shape::Cube => {
            let r = levels[1] as f64 / levels[0] as f64;
            let geometric = levels[0] > 0
                && levels.windows(2).all(|w| w[1] > w[0] && w[1] % w[0] == 0 && w[1] / w[0] == levels[1] / levels[0]);
            if !geometric {
                return Err(CliError::Usage(
                    "panels-per-edge levels must grow by a constant integer factor, e.g. 4,8,16".into(),
                ));
            }
            Ok(r)
        }
    }
}

pub fn cmd_converge(args: &ConvergeArgs) -> Result<ConvergenceReport, CliError> {
    let ratio = refinement_ratio(args.shape, &args.levels)?;
    let mut shape_origin = None;
    let mut results = Vec::new();
    let mut timings = Vec::new();
    for &level in &args.levels {
        let t = Instant::now();
        let (mesh, origin) = make_shape(args.shape, &args.params, level)?;
        let report = solve_mesh(&mesh, origin.clone(), &args.numeric, None)?;
        timings.push(t.elapsed().as_secs_f64());
        shape_origin.get_or_insert(origin);
        results.push(report);
    }
    let exact = (args.shape == Shape::Icosphere).then(|| 4.0 * PI * args.params.radius);
    let values: Vec<f64> = results.iter().map(|r| r.capacitance_c).collect();
    let study = RefinementStudy::new(&args.levels, &values, ratio, None, exact);
    let levels = results
        .iter()
        .zip(&study.rows)
        .map(|(r, row)| ConvergenceLevel {
            level: row.level,
            panels: r.mesh.panels,
            capacitance_c: r.capacitance_c,
            c_over_4pi: r.c_over_4pi,
            c_zeroth: r.c_zeroth,
            c_zeroth_over_4pi: r.c_zeroth / (4.0 * PI),
            error: row.error,
            relative_error: row.error.abs() / study.limit.abs(),
            order: row.order,
            extrapolated_over_4pi: row.extrapolated.map(|x| x / (4.0 * PI)),
        })
        .collect();
    // describe the family without the per-level parameter
    let shape = match shape_origin.expect("at least two levels") {
        MeshOrigin::Shape {
            shape,
            radius,
            side,
            semiaxes,
            ..
        } => MeshOrigin::Shape {
            shape,
            radius,
            side,
            semiaxes,
            subdiv: None,
            panels_per_edge: None,
        },
        other => other,
    };
    Ok(ConvergenceReport {
        schema: CONVERGENCE_SCHEMA,
        config: ConvergenceConfig {
            shape,
            levels: args.levels.clone(),
            quad_order: args.numeric.quad_order,
            solver: solver(args.numeric.solver),
            seed: args.numeric.seed,
        },
        exact,
        levels,
        limit_over_4pi: study.limit / (4.0 * PI),
        extrapolation_spread: study.extrapolation_spread(),
        study,
        timings,
    })
}

pub fn cmd_verify_principle(args: &PrincipleArgs) -> Result<PrincipleOutput, CliError> {
    let text = fs::read_to_string(&args.matrix).map_err(CliError::io(&args.matrix))?;
    let (form, u) = MatrixInput::from_json(&text)?.into_parts()?;
    let trials = usize::try_from(args.trials).map_err(|_| CliError::Usage("too many trials".into()))?;
    let report = verify_principle(&form, &u, trials, args.seed)?;
    let witness = find_witness(&form, &u, args.steps, args.approach_factor)?;
    let mut eigenvalues: Vec<f64> = form.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(PrincipleOutput {
        schema: PRINCIPLE_SCHEMA,
        input: args.matrix.display().to_string(),
        dimension: form.dim(),
        trials: args.trials,
        seed: args.seed,
        eigenvalues,
        report,
        sweep: SweepResult {
            steps: args.steps,
            approach_factor: args.approach_factor,
            witness,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios() {
        assert_eq!(refinement_ratio(Shape::Icosphere, &[2, 3, 4]).unwrap(), 2.0);
        assert_eq!(refinement_ratio(Shape::Cube, &[4, 8, 16]).unwrap(), 2.0);
        assert_eq!(refinement_ratio(Shape::Cube, &[2, 6]).unwrap(), 3.0);
        assert!(refinement_ratio(Shape::Cube, &[4, 8, 12]).is_err());
        assert!(refinement_ratio(Shape::Icosphere, &[2, 4]).is_err());
        assert!(matches!(refinement_ratio(Shape::Cube, &[4]), Err(CliError::Usage(_))));
    }

    #[test]
    fn extension_decides_format() {
        assert_eq!(format_of(Path::new("a.STL"), None).unwrap(), FileFormat::Stl);
        assert_eq!(format_of(Path::new("a.obj"), None).unwrap(), FileFormat::Obj);
        assert_eq!(format_of(Path::new("a.txt"), Some(FileFormat::Obj)).unwrap(), FileFormat::Obj);
        assert!(format_of(Path::new("a"), None).is_err());
    }

    #[test]
    fn sidecar_appends() {
        assert_eq!(sidecar_path(Path::new("/t/a.bin")), PathBuf::from("/t/a.bin.json"));
    }
}
