//! Built-in conductor shapes.
//!
//! All generators emit watertight meshes with outward orientation, and are
//! deterministic: identical arguments give bitwise-identical vertex arrays.

use std::collections::HashMap;

use nalgebra::Vector3;

use super::mesh::{edge_key, MeshError, SurfaceMesh};

/// Largest accepted icosphere subdivision level (20·4⁷ = 327 680 triangles).
pub const MAX_SUBDIVISIONS: u32 = 7;

fn check_positive(name: &str, value: f64) -> Result<(), MeshError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(MeshError::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

fn icosahedron() -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let vertices = raw
        .iter()
        .map(|p| Vector3::from(*p).normalize())
        .collect();
    let triangles = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (vertices, triangles)
}

/// Unit-radius icosphere: vertices and triangles before validation.
fn unit_icosphere(subdivisions: u32) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let (mut vertices, mut triangles) = icosahedron();
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<[usize; 2], usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vector3<f64>>| {
            *midpoints.entry(edge_key(a, b)).or_insert_with(|| {
                let m = ((vertices[a] + vertices[b]) * 0.5).normalize();
                vertices.push(m);
                vertices.len() - 1
            })
        };
        for &[a, b, c] in &triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        triangles = next;
    }
    (vertices, triangles)
}

fn check_subdivisions(subdivisions: u32) -> Result<(), MeshError> {
    if subdivisions > MAX_SUBDIVISIONS {
        return Err(MeshError::InvalidParameter(format!(
            "subdivisions must be in 0..={MAX_SUBDIVISIONS}, got {subdivisions}"
        )));
    }
    Ok(())
}

/// Icosahedron refined `subdivisions` times with every vertex projected onto
/// the sphere of the given radius. Has `20·4^subdivisions` triangles.
pub fn make_icosphere(radius: f64, subdivisions: u32) -> Result<SurfaceMesh, MeshError> {
    check_positive("radius", radius)?;
    check_subdivisions(subdivisions)?;
    let (vertices, triangles) = unit_icosphere(subdivisions);
    let vertices = vertices.into_iter().map(|v| v * radius).collect();
    SurfaceMesh::new(vertices, triangles)
}

/// Icosphere stretched by the semi-axes `(a, b, c)`.
pub fn make_ellipsoid(semiaxes: [f64; 3], subdivisions: u32) -> Result<SurfaceMesh, MeshError> {
    for (name, value) in ["a", "b", "c"].iter().zip(semiaxes) {
        check_positive(name, value)?;
    }
    check_subdivisions(subdivisions)?;
    let scale = Vector3::from(semiaxes);
    let (vertices, triangles) = unit_icosphere(subdivisions);
    let vertices = vertices
        .into_iter()
        .map(|v| v.component_mul(&scale))
        .collect();
    SurfaceMesh::new(vertices, triangles)
}

/// Axis-aligned cube centred at the origin. Each face is an
/// `panels_per_edge × panels_per_edge` grid of squares, each split into two
/// triangles.
pub fn make_cube(side: f64, panels_per_edge: usize) -> Result<SurfaceMesh, MeshError> {
    check_positive("side", side)?;
    if panels_per_edge == 0 {
        return Err(MeshError::InvalidParameter(
            "panels per edge must be at least 1".into(),
        ));
    }
    let k = panels_per_edge;
    let h = side / k as f64;
    let half = side / 2.0;

    let mut lattice: HashMap<[usize; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut vertex = |ijk: [usize; 3], vertices: &mut Vec<Vector3<f64>>| {
        *lattice.entry(ijk).or_insert_with(|| {
            vertices.push(Vector3::new(
                ijk[0] as f64 * h - half,
                ijk[1] as f64 * h - half,
                ijk[2] as f64 * h - half,
            ));
            vertices.len() - 1
        })
    };

    // (fixed axis, fixed lattice value, u axis, v axis) with u × v outward
    let faces = [
        (0, 0, 2, 1),
        (0, k, 1, 2),
        (1, 0, 0, 2),
        (1, k, 2, 0),
        (2, 0, 1, 0),
        (2, k, 0, 1),
    ];
    let mut triangles = Vec::with_capacity(12 * k * k);
    for (axis, value, u, v) in faces {
        let corner = |p: usize, q: usize| {
            let mut ijk = [0; 3];
            ijk[axis] = value;
            ijk[u] = p;
            ijk[v] = q;
            ijk
        };
        for p in 0..k {
            for q in 0..k {
                let c00 = vertex(corner(p, q), &mut vertices);
                let c10 = vertex(corner(p + 1, q), &mut vertices);
                let c11 = vertex(corner(p + 1, q + 1), &mut vertices);
                let c01 = vertex(corner(p, q + 1), &mut vertices);
                triangles.push([c00, c10, c11]);
                triangles.push([c00, c11, c01]);
            }
        }
    }
    SurfaceMesh::new(vertices, triangles)
}
