//! Closed-form potential of a uniformly charged flat triangle.
//!
//! For a point `x` at signed height `h` above the triangle plane, with
//! in-plane projection `ρ`, every edge contributes
//!
//! ```text
//! t0 · ln((R⁺ + s⁺) / (R⁻ + s⁻))
//!   − |h| · [atan(t0 s⁺ / (R0² + |h| R⁺)) − atan(t0 s⁻ / (R0² + |h| R⁻))]
//! ```
//!
//! where `s⁻, s⁺` are the edge end positions measured along the edge from
//! the foot of the perpendicular from `ρ`, `t0` is the signed distance from
//! `ρ` to the edge line (positive on the inner side), `R±` the distances
//! from `x` to the edge ends and `R0² = t0² + h²`. The sum is `∫_T dS'/|x − s'|`.

use nalgebra::Vector3;

use super::BemError;

/// Precomputed geometry of one triangle for repeated potential evaluation.
#[derive(Debug, Clone)]
pub struct TrianglePotential {
    vertices: [Vector3<f64>; 3],
    normal: Vector3<f64>,
    tangents: [Vector3<f64>; 3],
    outward: [Vector3<f64>; 3],
    lengths: [f64; 3],
}

impl TrianglePotential {
    pub fn new(vertices: [Vector3<f64>; 3]) -> Result<Self, BemError> {
        let [a, b, c] = vertices;
        let cross = (b - a).cross(&(c - a));
        let scale = (b - a).norm_squared().max((c - a).norm_squared());
        let twice_area = cross.norm();
        if !(twice_area.is_finite() && twice_area > 1e-14 * scale) {
            return Err(BemError::DegenerateTriangle { area: 0.5 * twice_area });
        }
        let normal = cross / twice_area;
        let mut tangents = [Vector3::zeros(); 3];
        let mut outward = [Vector3::zeros(); 3];
        let mut lengths = [0.0; 3];
        for i in 0..3 {
            let e = vertices[(i + 1) % 3] - vertices[i];
            lengths[i] = e.norm();
            tangents[i] = e / lengths[i];
            outward[i] = tangents[i].cross(&normal);
        }
        Ok(Self {
            vertices,
            normal,
            tangents,
            outward,
            lengths,
        })
    }

    pub fn vertices(&self) -> &[Vector3<f64>; 3] {
        &self.vertices
    }

    /// `∫_T dS'/|x − s'|` for unit density. Finite everywhere, including on
    /// the triangle, its edges and its corners.
    pub fn potential(&self, x: &Vector3<f64>) -> f64 {
        let h = (x - self.vertices[0]).dot(&self.normal);
        let abs_h = h.abs();
        let rho = x - self.normal * h;
        let dist = [0, 1, 2].map(|i| (x - self.vertices[i]).norm());

        let mut sum = 0.0;
        for i in 0..3 {
            let j = (i + 1) % 3;
            let d = self.vertices[i] - rho;
            let t0 = d.dot(&self.outward[i]);
            let r0_sq = t0 * t0 + h * h;
            if t0 == 0.0 || r0_sq == 0.0 {
                // point lies on the edge's plane through the normal
                continue;
            }
            let s_minus = d.dot(&self.tangents[i]);
            let s_plus = s_minus + self.lengths[i];
            let (r_minus, r_plus) = (dist[i], dist[j]);
            let log_term = (r_plus_s(r_plus, s_plus, r0_sq) / r_plus_s(r_minus, s_minus, r0_sq)).ln();
            let mut term = t0 * log_term;
            if abs_h > 0.0 {
                term -= abs_h
                    * ((t0 * s_plus / (r0_sq + abs_h * r_plus)).atan()
                        - (t0 * s_minus / (r0_sq + abs_h * r_minus)).atan());
            }
            sum += term;
        }
        sum
    }
}

/// `R + s` without cancellation when `s` is negative: `R² = s² + R0²`.
fn r_plus_s(r: f64, s: f64, r0_sq: f64) -> f64 {
    if s >= 0.0 {
        r + s
    } else {
        r0_sq / (r - s)
    }
}

/// Single-layer potential `∫_T dS'/|x − s'|` of unit density on `triangle`.
pub fn triangle_potential(point: &Vector3<f64>, triangle: &[Vector3<f64>; 3]) -> Result<f64, BemError> {
    Ok(TrianglePotential::new(*triangle)?.potential(point))
}
