use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use capvar::geometry::{build_panels, load_mesh, make_cube, make_icosphere, MeshFormat};
use capvar_cli::error::exit;
use serde_json::Value;

fn capvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capvar")).args(args).output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_of(out: &Output, code: i32) -> Value {
    assert_eq!(out.status.code(), Some(code), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty(), "failure printed to stdout");
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["schema"], "caperror/1");
    assert_eq!(e["error"]["exitCode"], code);
    e
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let stl = dir.path().join("s.stl");
    let out = capvar(&["generate", "--shape", "icosphere", "--radius", "1", "--subdiv", "3", "--out", path_str(&stl)]);
    assert!(out.status.success());
    assert_eq!(load_mesh(&stl, MeshFormat::StlBinary).unwrap().num_triangles(), 1280);

    let obj = dir.path().join("c.obj");
    let report = json_of(&capvar(&[
        "generate", "--shape", "cube", "--side", "1", "--panels-per-edge", "8", "--out", path_str(&obj), "--json",
    ]));
    assert_eq!(report["schema"], "capmesh/1");
    assert_eq!(report["mesh"]["panels"], 768);
    assert_eq!(load_mesh(&obj, MeshFormat::Obj).unwrap().num_triangles(), 768);
}

#[test]
fn generated_files_reload_with_the_same_area() {
    let dir = tempfile::tempdir().unwrap();
    let (obj, stl) = (dir.path().join("s.obj"), dir.path().join("s.stl"));
    for p in [&obj, &stl] {
        assert!(capvar(&["generate", "--shape", "icosphere", "--subdiv", "2", "--out", path_str(p)]).status.success());
    }
    let mesh = make_icosphere(1.0, 2).unwrap();
    let area = |m: &capvar::geometry::SurfaceMesh| build_panels(m).total_area();
    let reloaded = |p: &Path| {
        json_of(&capvar(&["solve", "--mesh", path_str(p), "--json"]))["mesh"]["totalArea"]
            .as_f64()
            .unwrap()
    };
    assert!((reloaded(&obj) - area(&mesh)).abs() <= 1e-9);
    // binary STL stores single-precision coordinates
    let stl_area = reloaded(&stl);
    assert!((stl_area - area(&mesh.rounded_to_f32())).abs() <= 1e-9);
    assert!((stl_area - area(&mesh)).abs() <= 1e-6 * area(&mesh));
}

#[test]
fn solve_sphere_and_cube() {
    let sphere = json_of(&capvar(&["solve", "--shape", "icosphere", "--subdiv", "3", "--json"]));
    assert_eq!(sphere["schema"], "capreport/1");
    let c = sphere["capacitanceC"].as_f64().unwrap();
    assert!((c - 4.0 * PI).abs() < 0.02 * 4.0 * PI, "{c}");
    assert!(sphere["ledgerViolations"].as_array().unwrap().is_empty());
    assert_eq!(sphere["spd"]["choleskySucceeded"], true);
    assert_eq!(sphere["subspaceBounds"].as_array().unwrap().len(), 3);

    let cube = json_of(&capvar(&["solve", "--shape", "cube", "--side", "1", "--panels-per-edge", "8", "--json"]));
    let (c, c0) = (cube["capacitanceC"].as_f64().unwrap(), cube["cZeroth"].as_f64().unwrap());
    assert!(c0 < c && (c - c0) / c > 0.01, "{c0} vs {c}");
    assert_eq!(cube["mesh"]["totalArea"], 6.0);
    for key in ["mesh", "assembly", "spdCheck", "solve", "bounds", "total"] {
        assert!(cube["timings"][key].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = capvar(&["solve", "--shape", "cube", "--panels-per-edge", "2", "--json", "--out", path_str(&path)]);
    let stdout = json_of(&out);
    let file: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timings");
        v
    };
    assert_eq!(strip(stdout), strip(file));
}

#[test]
fn matrix_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.bin");
    json_of(&capvar(&["solve", "--shape", "cube", "--panels-per-edge", "2", "--json", "--dump-matrix", path_str(&path)]));
    assert_eq!(fs::metadata(&path).unwrap().len(), 8 * 48 * 48);
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a.bin.json")).unwrap()).unwrap();
    assert_eq!(sidecar["n"], 48);
    assert_eq!(sidecar["totalArea"], 6.0);
}

#[test]
fn open_surface_is_rejected_with_its_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fan.obj");
    fs::write(&path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nv -1 0 0\nf 1 2 3\nf 1 3 4\n").unwrap();
    let e = error_of(&capvar(&["solve", "--mesh", path_str(&path)]), exit::MESH);
    assert_eq!(e["error"]["kind"], "mesh-not-watertight");
    assert_eq!(e["error"]["boundaryEdges"].as_array().unwrap().len(), 4);
}

#[test]
fn error_exit_codes() {
    error_of(&capvar(&["solve", "--mesh", "/nonexistent/m.obj"]), exit::IO);
    error_of(&capvar(&["converge", "--shape", "cube", "--levels", "4"]), exit::USAGE);
    error_of(&capvar(&["solve", "--shape", "ellipsoid"]), exit::USAGE);
    error_of(&capvar(&["solve", "--shape", "icosphere", "--radius", "-1"]), exit::USAGE);
    error_of(&capvar(&["solve", "--shape", "ellipsoid", "--semiaxes", "1,-2,1"]), exit::USAGE);
    error_of(&capvar(&["solve", "--shape", "ellipsoid", "--semiaxes", "1,2"]), exit::USAGE);
    error_of(&capvar(&["solve", "--shape", "cube", "--panels-per-edge", "0"]), exit::USAGE);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"matrix\": [[1, 2], [3, 4]], \"u\": [1, 0]}").unwrap();
    error_of(&capvar(&["verify-principle", "--matrix", path_str(&bad)]), exit::MATRIX_INPUT);
    fs::write(&bad, "{\"matrix\": [[1, 0], [0, 1]], \"u\": [1, 0]}").unwrap();
    error_of(&capvar(&["verify-principle", "--matrix", path_str(&bad), "--approach-factor", "1.5"]), exit::USAGE);
    error_of(&capvar(&["verify-principle", "--matrix", path_str(&bad), "--steps", "0"]), exit::USAGE);
    fs::write(&bad, "{\"matrix\": [[1, 0], [0").unwrap();
    error_of(&capvar(&["verify-principle", "--matrix", path_str(&bad)]), exit::MATRIX_INPUT);

    let garbage = dir.path().join("g.obj");
    fs::write(&garbage, "v 0 0 zero\n").unwrap();
    error_of(&capvar(&["solve", "--mesh", path_str(&garbage)]), exit::MESH);

    // rejected by the argument parser
    for args in [
        &["solve", "--shape", "cube", "--quad-order", "8"][..],
        &["solve", "--shape", "cube", "--mesh", "a.obj"],
        &["solve"],
    ] {
        assert_eq!(capvar(args).status.code(), Some(exit::USAGE), "{args:?}");
    }
}

#[test]
fn converge_on_spheres() {
    let r = json_of(&capvar(&["converge", "--shape", "icosphere", "--levels", "2,3,4", "--json"]));
    assert_eq!(r["schema"], "capconverge/1");
    assert_eq!(r["exact"].as_f64().unwrap(), 4.0 * PI);
    let levels = r["levels"].as_array().unwrap();
    let errors: Vec<f64> = levels.iter().map(|l| l["relativeError"].as_f64().unwrap()).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    for l in &levels[1..] {
        assert!(l["order"].as_f64().unwrap() >= 1.0, "{l}");
    }
}

#[test]
fn converge_on_cubes() {
    let out = capvar(&["converge", "--shape", "cube", "--levels", "4,8,16"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5, "{text}");

    let r = json_of(&capvar(&["converge", "--shape", "cube", "--levels", "2,4,8", "--json"]));
    assert!(r["exact"].is_null());
    assert_eq!(r["study"]["ratio"], 2.0);
    let limit = r["limitOver4Pi"].as_f64().unwrap();
    assert!((0.655..=0.666).contains(&limit), "{limit}");
    // the reference cube meshes agree with the generator
    let c8 = r["levels"][2]["capacitanceC"].as_f64().unwrap();
    let direct = json_of(&capvar(&["solve", "--shape", "cube", "--panels-per-edge", "8", "--json"]));
    assert_eq!(direct["capacitanceC"].as_f64().unwrap(), c8);
    assert_eq!(make_cube(1.0, 8).unwrap().num_triangles(), r["levels"][2]["panels"].as_u64().unwrap() as usize);
}

fn principle(matrix: &str, u: &str) -> (Output, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    fs::write(&path, format!("{{\"schema\": \"symform/1\", \"matrix\": {matrix}, \"u\": {u}}}")).unwrap();
    let out = capvar(&["verify-principle", "--matrix", path_str(&path), "--json", "--seed", "4"]);
    let v = serde_json::from_slice(&out.stdout).unwrap();
    (out, v)
}

#[test]
fn verify_principle_examples() {
    let (out, r) = principle("[[2, 0], [0, 3]]", "[1, 1]");
    assert!(out.status.success());
    assert_eq!(r["schema"], "principlereport/1");
    assert_eq!(r["classification"], "nonneg");
    assert!((r["bestQuotient"].as_f64().unwrap() - 5.0).abs() < 1e-12);
    assert_eq!(r["attainedAtU"], true);
    assert!(r["witness"].is_null());

    let (out, r) = principle("[[1, 0], [0, -1]]", "[1, 1]");
    assert!(out.status.success());
    assert_eq!(r["classification"], "indefinite");
    assert!(r["witness"]["quotient"].as_f64().unwrap() > 10.0);
    assert!(r["sweep"]["witness"]["quotient"].as_f64().unwrap() > 10.0);

    let (out, r) = principle("[[0, 1], [1, 0]]", "[1, 0]");
    assert!(out.status.success());
    assert_eq!(r["classification"], "indefinite");
    assert_eq!(r["eigenvalues"], serde_json::json!([-1.0, 1.0]));
    assert!(!r["witness"].is_null());
}

#[test]
fn verify_principle_is_deterministic() {
    let run = || {
        let (_, mut r) = principle("[[3, 1, 0], [1, -2, 1], [0, 1, 1]]", "[1, 2, 3]");
        r.as_object_mut().unwrap().remove("input");
        r
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert_eq!(a["consistent"], true);
}
