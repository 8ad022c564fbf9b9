use capvar::bem::*;
use capvar::capacitance::{solve_capacitance, Solver};
use capvar::geometry::*;
use nalgebra::{DMatrix, DVector, Vector3};

fn test_meshes() -> Vec<(String, SurfaceMesh)> {
    let mut out = Vec::new();
    for s in 0..=2 {
        out.push((format!("icosphere/{s}"), make_icosphere(1.0, s).unwrap()));
        out.push((format!("ellipsoid 2:1:1/{s}"), make_ellipsoid([2.0, 1.0, 1.0], s).unwrap()));
    }
    for k in 1..=3 {
        out.push((format!("cube/{k}"), make_cube(1.0, k).unwrap()));
    }
    out
}

#[test]
fn every_generated_mesh_is_spd() {
    for (name, mesh) in test_meshes() {
        let sys = assemble(&build_panels(&mesh), &QuadratureRule::default()).unwrap();
        let report = spd_check(&sys);
        assert!(report.cholesky_succeeded, "{name}");
        assert!(report.min_eigenvalue > 0.0, "{name}: {}", report.min_eigenvalue);
        assert!(sys.matrix().diagonal().iter().all(|&d| d > 0.0), "{name}");
    }
}

#[test]
fn smallest_eigenvalue_matches_a_dense_eigensolve() {
    let sys = assemble(&build_panels(&make_cube(1.0, 2).unwrap()), &QuadratureRule::default()).unwrap();
    let exact = sys.matrix().clone().symmetric_eigenvalues().min();
    let report = spd_check(&sys);
    assert!((report.min_eigenvalue - exact).abs() <= 1e-6 * exact, "{} vs {exact}", report.min_eigenvalue);
}

#[test]
fn raw_asymmetry_is_small_for_orders_three_and_up() {
    let meshes = [
        make_icosphere(1.0, 1).unwrap(),
        make_icosphere(1.0, 2).unwrap(),
        make_ellipsoid([2.0, 1.0, 1.0], 1).unwrap(),
        make_cube(1.0, 2).unwrap(),
    ];
    for order in 3..=7 {
        let rule = QuadratureRule::of_order(order).unwrap();
        for mesh in &meshes {
            let sys = assemble(&build_panels(mesh), &rule).unwrap();
            let m = sys.matrix();
            assert_eq!(m, &m.transpose());
            assert!(
                sys.asymmetry_norm() <= 1e-6 * m.amax(),
                "order {order}: {:e}",
                sys.asymmetry_norm() / m.amax()
            );
        }
    }
}

#[test]
fn quadrature_error_is_below_discretisation_error() {
    let c = |subdiv, order| {
        let sys = assemble(
            &build_panels(&make_icosphere(1.0, subdiv).unwrap()),
            &QuadratureRule::of_order(order).unwrap(),
        )
        .unwrap();
        solve_capacitance(&sys, Solver::Direct).unwrap().capacitance
    };
    let base = c(2, DEFAULT_ORDER);
    let mesh_change = (c(3, DEFAULT_ORDER) - base).abs();
    for order in [5, 7] {
        assert!((c(2, order) - base).abs() < mesh_change);
    }
}

#[test]
fn assembly_is_independent_of_worker_count() {
    let panels = build_panels(&make_ellipsoid([1.5, 1.0, 0.7], 2).unwrap());
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| assemble(&panels, &QuadratureRule::default()).unwrap())
    };
    let (one, four) = (run(1), run(4));
    assert_eq!(one.matrix(), four.matrix());
    assert_eq!(one.asymmetry_norm().to_bits(), four.asymmetry_norm().to_bits());
}

#[test]
fn matrix_dump_round_trip() {
    let sys = assemble(&build_panels(&make_cube(1.0, 2).unwrap()), &QuadratureRule::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (bin, json) = (dir.path().join("a.bin"), dir.path().join("a.json"));
    write_matrix_dump(&sys, &bin, &json).unwrap();
    assert_eq!(std::fs::metadata(&bin).unwrap().len(), 8 * 48 * 48);
    let (matrix, areas, sidecar) = read_matrix_dump(&bin, &json).unwrap();
    assert_eq!(&areas, sys.areas());
    assert_eq!(&matrix, sys.matrix());
    assert_eq!(sidecar.n, 48);
    assert_eq!(sidecar.total_area, 6.0);
}

#[test]
fn flipped_two_by_two_fails_factorisation() {
    let sys = GalerkinSystem::from_parts(
        DMatrix::from_row_slice(2, 2, &[-1.0, 0.5, 0.5, -1.0]),
        DVector::from_element(2, 1.0),
        vec![Vector3::zeros(); 2],
    )
    .unwrap();
    let report = spd_check(&sys);
    assert!(!report.cholesky_succeeded);
    assert!(!report.is_spd());
}
