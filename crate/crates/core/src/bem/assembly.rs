use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, Vector3};
use rayon::prelude::*;

use super::potential::TrianglePotential;
use super::quadrature::QuadratureRule;
use super::BemError;
use crate::geometry::PanelSystem;

/// Dense Galerkin discretisation of the single-layer operator with kernel
/// `1/(4π r)` over piecewise-constant panel densities.
///
/// `matrix[(i, j)] = ∫_{T_i} ∫_{T_j} dS dS' / (4π |s − s'|)` and `areas` is
/// the Galerkin image of the constant potential 1.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    matrix: DMatrix<f64>,
    areas: DVector<f64>,
    centroids: Vec<Vector3<f64>>,
    total_area: f64,
    asymmetry_norm: f64,
    factor: OnceLock<Option<Cholesky<f64, Dyn>>>,
}

impl GalerkinSystem {
    /// Wraps an externally built matrix. The matrix is symmetrised by
    /// averaging with its transpose; the pre-symmetrisation asymmetry is kept.
    pub fn from_parts(
        matrix: DMatrix<f64>,
        areas: DVector<f64>,
        centroids: Vec<Vector3<f64>>,
    ) -> Result<Self, BemError> {
        let n = matrix.nrows();
        if n == 0 {
            return Err(BemError::EmptySystem);
        }
        if matrix.ncols() != n || areas.len() != n || centroids.len() != n {
            return Err(BemError::DimensionMismatch(format!(
                "matrix {}x{}, {} areas, {} centroids",
                matrix.nrows(),
                matrix.ncols(),
                areas.len(),
                centroids.len()
            )));
        }
        if let Some((k, _)) = matrix.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(BemError::NonFiniteEntry { row: k % n, col: k / n });
        }
        let (matrix, asymmetry_norm) = symmetrize(n, |i, j| matrix[(i, j)]);
        Ok(Self::with_symmetric(matrix, areas, centroids, asymmetry_norm))
    }

    fn with_symmetric(
        matrix: DMatrix<f64>,
        areas: DVector<f64>,
        centroids: Vec<Vector3<f64>>,
        asymmetry_norm: f64,
    ) -> Self {
        let mut total_area = 0.0;
        for a in areas.iter() {
            total_area += a;
        }
        Self {
            matrix,
            areas,
            centroids,
            total_area,
            asymmetry_norm,
            factor: OnceLock::new(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Panel areas: the right-hand side `b` of `A_h σ = b`.
    pub fn areas(&self) -> &DVector<f64> {
        &self.areas
    }

    pub fn centroids(&self) -> &[Vector3<f64>] {
        &self.centroids
    }

    pub fn total_area(&self) -> f64 {
        self.total_area
    }

    /// `max |M − Mᵀ|` of the raw matrix before symmetrisation.
    pub fn asymmetry_norm(&self) -> f64 {
        self.asymmetry_norm
    }

    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }

    /// Frobenius norm of the matrix.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Cholesky factor, computed on first use. `None` when the matrix is not
    /// positive definite to working precision.
    pub fn cholesky(&self) -> Option<&Cholesky<f64, Dyn>> {
        self.factor
            .get_or_init(|| Cholesky::new(self.matrix.clone()))
            .as_ref()
    }
}

fn symmetrize(n: usize, raw: impl Fn(usize, usize) -> f64) -> (DMatrix<f64>, f64) {
    let mut asym = 0.0f64;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let (a, b) = (raw(i, j), raw(j, i));
            asym = asym.max((a - b).abs());
            m[(i, j)] = 0.5 * (a + b);
        }
    }
    (m, asym)
}

/// Near-field refinement of the outer quadrature.
///
/// The potential of panel `j` is analytic away from the closed triangle
/// itself, and within its own plane it is smooth except along its edges,
/// where it behaves like `d·ln d`. Outer integration over panel `i`
/// therefore subdivides (1:4, midpoint split) every piece whose centroid
/// lies within `admissibility` piece diameters of that singular set, down to
/// `max_depth` levels. The band narrows by `decay` per level, down to
/// [`MIN_ADMISSIBILITY`]. Well-separated pairs use the plain rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    pub max_depth: u32,
    pub admissibility: f64,
    pub decay: f64,
}

/// Smallest band width used at deep levels; still catches every piece that
/// touches the singular set (its centroid sits within a third of its
/// diameter of the touching edge or vertex).
pub const MIN_ADMISSIBILITY: f64 = 0.75;

impl AssemblyOptions {
    /// Band width at refinement level `depth`. Error from an unsplit piece
    /// falls with its size faster than the number of such pieces grows, so
    /// for rules of degree four and up deeper levels can use a narrower band.
    pub fn admissibility_at(&self, depth: u32) -> f64 {
        (self.admissibility * self.decay.powi(depth as i32)).max(MIN_ADMISSIBILITY)
    }

    /// Refinement that keeps the raw matrix symmetric to better than 1e-6 of
    /// its largest entry. Low-degree rules need a wider band and one more
    /// level.
    pub fn for_rule(rule: &QuadratureRule) -> Self {
        if rule.degree() <= 3 {
            Self {
                max_depth: 7,
                admissibility: 3.0,
                decay: 1.0,
            }
        } else {
            Self {
                max_depth: 6,
                admissibility: 2.0,
                decay: std::f64::consts::FRAC_1_SQRT_2,
            }
        }
    }

    /// No refinement: every entry uses the plain outer rule.
    pub fn plain() -> Self {
        Self {
            max_depth: 0,
            admissibility: 0.0,
            decay: 1.0,
        }
    }
}

struct SourcePanel {
    potential: TrianglePotential,
    centroid: Vector3<f64>,
    normal: Vector3<f64>,
    radius: f64,
}

impl SourcePanel {
    /// Distance from `x` to where the potential stops being smooth along
    /// the outer panel: the edges for points in the source plane, the whole
    /// triangle otherwise.
    fn singular_distance(&self, x: &Vector3<f64>) -> f64 {
        let v = self.potential.vertices();
        let edges = (0..3)
            .map(|k| segment_distance(x, &v[k], &v[(k + 1) % 3]))
            .fold(f64::INFINITY, f64::min);
        let h = (x - v[0]).dot(&self.normal);
        if h.abs() <= 1e-12 * self.radius {
            return edges;
        }
        let p = x - self.normal * h;
        let inside = (0..3).all(|k| {
            let e = v[(k + 1) % 3] - v[k];
            e.cross(&(p - v[k])).dot(&self.normal) >= 0.0
        });
        if inside {
            h.abs()
        } else {
            edges
        }
    }
}

fn segment_distance(x: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let e = b - a;
    let t = ((x - a).dot(&e) / e.norm_squared()).clamp(0.0, 1.0);
    (x - (a + e * t)).norm()
}

fn diameter(t: &[Vector3<f64>; 3]) -> f64 {
    (t[1] - t[0])
        .norm()
        .max((t[2] - t[1]).norm())
        .max((t[0] - t[2]).norm())
}

/// Relative half-width of the band around the admissibility threshold in
/// which the split and unsplit integrals are blended. A hard threshold would
/// make the matrix jump when round-off moves a piece across it, which breaks
/// exact invariance under scaling and rigid motions on regular meshes.
const BLEND: f64 = 0.1;

fn plain_integral(piece: &[Vector3<f64>; 3], area: f64, source: &SourcePanel, rule: &QuadratureRule) -> f64 {
    let mut sum = 0.0;
    for (l, w) in rule.points() {
        let x = piece[0] * l[0] + piece[1] * l[1] + piece[2] * l[2];
        sum += w * area * source.potential.potential(&x);
    }
    sum
}

/// `Σ_q w_q area V(x_q)` over `piece`, refined near the source's singular set.
fn refined_integral(
    piece: &[Vector3<f64>; 3],
    area: f64,
    depth: u32,
    source: &SourcePanel,
    rule: &QuadratureRule,
    options: &AssemblyOptions,
) -> f64 {
    if depth >= options.max_depth {
        return plain_integral(piece, area, source, rule);
    }
    let centroid = (piece[0] + piece[1] + piece[2]) / 3.0;
    let t = source.singular_distance(&centroid) / (options.admissibility_at(depth) * diameter(piece));
    if t >= 1.0 + BLEND {
        return plain_integral(piece, area, source, rule);
    }
    let [a, b, c] = *piece;
    let (ab, bc, ca) = ((a + b) * 0.5, (b + c) * 0.5, (c + a) * 0.5);
    let quarter = 0.25 * area;
    let split: f64 = [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
        .iter()
        .map(|sub| refined_integral(sub, quarter, depth + 1, source, rule, options))
        .sum();
    if t <= 1.0 - BLEND {
        return split;
    }
    let x = (1.0 + BLEND - t) / (2.0 * BLEND);
    let weight = x * x * (3.0 - 2.0 * x);
    weight * split + (1.0 - weight) * plain_integral(piece, area, source, rule)
}

/// Assembles the Galerkin matrix with [`AssemblyOptions::for_rule`].
pub fn assemble(panels: &PanelSystem, rule: &QuadratureRule) -> Result<GalerkinSystem, BemError> {
    assemble_with(panels, rule, &AssemblyOptions::for_rule(rule))
}

/// Assembles the Galerkin matrix. Each entry is
/// `(1/4π) Σ_q w_q area_i V_j(x_q)` with `x_q` the outer quadrature points
/// on panel `i` and `V_j` the analytic potential of panel `j`, so coincident
/// and touching panels need no special treatment beyond the outer
/// refinement described in [`AssemblyOptions`].
///
/// Rows are computed in parallel on the current rayon pool; every entry sums
/// its quadrature points in a fixed order, so the result does not depend on
/// the number of worker threads.
pub fn assemble_with(
    panels: &PanelSystem,
    rule: &QuadratureRule,
    options: &AssemblyOptions,
) -> Result<GalerkinSystem, BemError> {
    let n = panels.len();
    if n == 0 {
        return Err(BemError::EmptySystem);
    }
    let sources = panels
        .panels()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let potential = TrianglePotential::new(p.vertices).map_err(|_| BemError::DegeneratePanel {
                panel: i,
                area: p.area,
            })?;
            let radius = p
                .vertices
                .iter()
                .map(|v| (v - p.centroid).norm())
                .fold(0.0, f64::max);
            let [a, b, c] = p.vertices;
            Ok(SourcePanel {
                potential,
                centroid: p.centroid,
                normal: (b - a).cross(&(c - a)).normalize(),
                radius,
            })
        })
        .collect::<Result<Vec<_>, BemError>>()?;
    let outer: Vec<Vec<(Vector3<f64>, f64)>> = panels
        .panels()
        .iter()
        .map(|p| {
            let [a, b, c] = p.vertices;
            rule.points()
                .iter()
                .map(|(l, w)| (a * l[0] + b * l[1] + c * l[2], w * p.area))
                .collect()
        })
        .collect();
    let diameters: Vec<f64> = panels.panels().iter().map(|p| diameter(&p.vertices)).collect();

    let mut raw = vec![0.0; n * n];
    raw.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let panel = &panels.panels()[i];
        let reach = (1.0 + BLEND) * options.admissibility * diameters[i];
        for (entry, source) in row.iter_mut().zip(&sources) {
            let separated = options.max_depth == 0
                || (panel.centroid - source.centroid).norm() - source.radius >= reach;
            let sum = if separated {
                let mut sum = 0.0;
                for (x, w) in &outer[i] {
                    sum += w * source.potential.potential(x);
                }
                sum
            } else {
                refined_integral(&panel.vertices, panel.area, 0, source, rule, options)
            };
            *entry = sum / (4.0 * PI);
        }
    });
    if let Some(k) = raw.iter().position(|x| !x.is_finite()) {
        return Err(BemError::NonFiniteEntry { row: k / n, col: k % n });
    }

    let (matrix, asymmetry_norm) = symmetrize(n, |i, j| raw[i * n + j]);
    drop(raw);
    Ok(GalerkinSystem::with_symmetric(
        matrix,
        DVector::from_vec(panels.areas()),
        panels.centroids(),
        asymmetry_norm,
    ))
}
