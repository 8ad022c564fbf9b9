use std::collections::HashMap;

use nalgebra::{Isometry3, Vector3};
use thiserror::Error;

/// Errors raised while building, validating or reading a surface mesh.
#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("triangle {triangle} references vertex {index}, but the mesh has {num_vertices} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        num_vertices: usize,
    },
    #[error("triangle {triangle} is degenerate (area {area:e} <= threshold {threshold:e})")]
    DegenerateTriangle {
        triangle: usize,
        area: f64,
        threshold: f64,
    },
    #[error(
        "surface is not watertight: {} boundary edge(s), {} non-manifold edge(s)",
        boundary_edges.len(),
        nonmanifold_edges.len()
    )]
    NotWatertight {
        /// Edges used by exactly one triangle.
        boundary_edges: Vec<[usize; 2]>,
        /// Edges used by more than two triangles.
        nonmanifold_edges: Vec<[usize; 2]>,
    },
    #[error("non-finite coordinate in vertex {vertex}")]
    NonFiniteVertex { vertex: usize },
    #[error("invalid shape parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("malformed binary STL: {0}")]
    BinaryStl(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Relative area threshold below which a triangle counts as degenerate,
/// measured against the squared bounding-box diagonal.
pub const DEGENERATE_AREA_TOLERANCE: f64 = 1e-14;

/// A closed triangulated surface.
///
/// Constructed meshes are always watertight (every undirected edge is used by
/// exactly two triangles), reference only existing vertices and contain no
/// degenerate triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    vertices: Vec<Vector3<f64>>,
    triangles: Vec<[usize; 3]>,
}

impl SurfaceMesh {
    /// Builds and validates a mesh.
    pub fn new(vertices: Vec<Vector3<f64>>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let mesh = Self {
            vertices,
            triangles,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Builds a mesh without any validation. Meant for single-panel or open
    /// test surfaces that never reach the solver through the normal path.
    pub fn new_unchecked(vertices: Vec<Vector3<f64>>, triangles: Vec<[usize; 3]>) -> Self {
        Self {
            vertices,
            triangles,
        }
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Corner coordinates of triangle `i`.
    pub fn triangle(&self, i: usize) -> [Vector3<f64>; 3] {
        let [a, b, c] = self.triangles[i];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, i: usize) -> f64 {
        let [a, b, c] = self.triangle(i);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounding_box(&self) -> (Vector3<f64>, Vector3<f64>) {
        bounding_box(&self.vertices)
    }

    pub fn bounding_box_diagonal(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }

    /// Returns a copy with every vertex multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        self.map_vertices(|v| v * s)
    }

    /// Returns a copy moved by the rigid motion `iso`.
    pub fn transformed(&self, iso: &Isometry3<f64>) -> Self {
        self.map_vertices(|v| iso.transform_vector(&v) + iso.translation.vector)
    }

    /// Returns a copy with every coordinate rounded to single precision, the
    /// resolution binary STL stores.
    pub fn rounded_to_f32(&self) -> Self {
        self.map_vertices(|v| v.map(|x| x as f32 as f64))
    }

    fn map_vertices(&self, f: impl Fn(Vector3<f64>) -> Vector3<f64>) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Use count of every undirected edge, keyed by `[min, max]` vertex index.
    pub fn edge_use_counts(&self) -> HashMap<[usize; 2], usize> {
        let mut counts = HashMap::with_capacity(self.triangles.len() * 3 / 2);
        for tri in &self.triangles {
            for k in 0..3 {
                *counts.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        counts
    }

    /// True when every directed edge appears once, so neighbouring triangles
    /// agree on orientation.
    pub fn is_orientation_consistent(&self) -> bool {
        let mut directed = HashMap::with_capacity(self.triangles.len() * 3);
        for tri in &self.triangles {
            for k in 0..3 {
                let e = (tri[k], tri[(k + 1) % 3]);
                if directed.insert(e, ()).is_some() {
                    return false;
                }
            }
        }
        true
    }

    /// Volume enclosed by the surface; positive when normals point outward.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|&[a, b, c]| {
                self.vertices[a].dot(&self.vertices[b].cross(&self.vertices[c])) / 6.0
            })
            .sum()
    }

    /// Checks index range, degeneracy and watertightness, in that order.
    pub fn validate(&self) -> Result<(), MeshError> {
        if self.triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        if let Some(vertex) = self
            .vertices
            .iter()
            .position(|v| !v.iter().all(|x| x.is_finite()))
        {
            return Err(MeshError::NonFiniteVertex { vertex });
        }
        let n = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if let Some(&index) = tri.iter().find(|&&i| i >= n) {
                return Err(MeshError::IndexOutOfRange {
                    triangle: t,
                    index,
                    num_vertices: n,
                });
            }
        }
        let diag = self.bounding_box_diagonal();
        let threshold = DEGENERATE_AREA_TOLERANCE * diag * diag;
        for t in 0..self.triangles.len() {
            let area = self.triangle_area(t);
            // a repeated corner index is degenerate regardless of geometry
            let [a, b, c] = self.triangles[t];
            if area <= threshold || a == b || b == c || a == c {
                return Err(MeshError::DegenerateTriangle {
                    triangle: t,
                    area,
                    threshold,
                });
            }
        }
        let mut boundary_edges = Vec::new();
        let mut nonmanifold_edges = Vec::new();
        for (edge, count) in self.edge_use_counts() {
            match count {
                2 => {}
                1 => boundary_edges.push(edge),
                _ => nonmanifold_edges.push(edge),
            }
        }
        if boundary_edges.is_empty() && nonmanifold_edges.is_empty() {
            Ok(())
        } else {
            boundary_edges.sort_unstable();
            nonmanifold_edges.sort_unstable();
            Err(MeshError::NotWatertight {
                boundary_edges,
                nonmanifold_edges,
            })
        }
    }
}

pub(crate) fn edge_key(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

pub(crate) fn bounding_box(points: &[Vector3<f64>]) -> (Vector3<f64>, Vector3<f64>) {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}
