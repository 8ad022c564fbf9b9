//! Symmetric quadrature rules on triangles with positive weights.
//!
//! Rules are stated in barycentric coordinates with weights normalised to
//! sum to one, so `∫_T f ≈ area · Σ w_q f(x_q)`.

use super::BemError;

/// A quadrature rule on the reference triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points: Vec<([f64; 3], f64)>,
    degree: usize,
}

/// Default outer rule order for Galerkin assembly.
pub const DEFAULT_ORDER: usize = 4;

fn orbit3(a: f64, w: f64) -> [([f64; 3], f64); 3] {
    let b = 1.0 - 2.0 * a;
    [([a, a, b], w), ([a, b, a], w), ([b, a, a], w)]
}

fn orbit6(a: f64, b: f64, w: f64) -> [([f64; 3], f64); 6] {
    let c = 1.0 - a - b;
    [
        ([a, b, c], w),
        ([a, c, b], w),
        ([b, a, c], w),
        ([b, c, a], w),
        ([c, a, b], w),
        ([c, b, a], w),
    ]
}

impl QuadratureRule {
    /// Validates a user-supplied rule: positive weights summing to one and
    /// barycentric coordinates in `[0, 1]` summing to one.
    pub fn new(points: Vec<([f64; 3], f64)>, degree: usize) -> Result<Self, BemError> {
        if points.is_empty() {
            return Err(BemError::InvalidRule("rule has no points".into()));
        }
        let mut total = 0.0;
        for (i, (bary, w)) in points.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                return Err(BemError::InvalidRule(format!("weight {i} is {w}, must be > 0")));
            }
            if bary.iter().any(|&l| !(0.0..=1.0).contains(&l))
                || (bary.iter().sum::<f64>() - 1.0).abs() > 1e-12
            {
                return Err(BemError::InvalidRule(format!(
                    "point {i} has invalid barycentric coordinates {bary:?}"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(BemError::InvalidRule(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { points, degree })
    }

    /// Built-in rule exact for polynomials of total degree `order`
    /// (1 ≤ order ≤ 7). Order 7 uses the 16-point degree-8 rule because no
    /// positive-weight degree-7 rule of comparable size is in the table.
    pub fn of_order(order: usize) -> Result<Self, BemError> {
        let third = 1.0 / 3.0;
        let (points, degree): (Vec<_>, usize) = match order {
            1 => (vec![([third; 3], 1.0)], 1),
            2 => (orbit3(1.0 / 6.0, third).to_vec(), 2),
            3 => (
                orbit6(0.659_027_622_374_092, 0.231_933_368_553_031, 1.0 / 6.0).to_vec(),
                3,
            ),
            4 => (
                [
                    orbit3(0.445_948_490_915_965, 0.223_381_589_678_011),
                    orbit3(0.091_576_213_509_771, 0.109_951_743_655_322),
                ]
                .concat(),
                4,
            ),
            5 => {
                let mut p = vec![([third; 3], 0.225)];
                p.extend(orbit3(0.470_142_064_105_115, 0.132_394_152_788_506));
                p.extend(orbit3(0.101_286_507_323_456, 0.125_939_180_544_827));
                (p, 5)
            }
            6 => {
                let mut p = orbit3(0.249_286_745_170_910, 0.116_786_275_726_379).to_vec();
                p.extend(orbit3(0.063_089_014_491_502, 0.050_844_906_370_207));
                p.extend(orbit6(
                    0.053_145_049_844_817,
                    0.310_352_451_033_784,
                    0.082_851_075_618_374,
                ));
                (p, 6)
            }
            7 => {
                let mut p = vec![([third; 3], 0.144_315_607_677_787)];
                p.extend(orbit3(0.459_292_588_292_723, 0.095_091_634_267_285));
                p.extend(orbit3(0.170_569_307_751_760, 0.103_217_370_534_718));
                p.extend(orbit3(0.050_547_228_317_031, 0.032_458_497_623_198));
                p.extend(orbit6(
                    0.008_394_777_409_958,
                    0.263_112_829_634_638,
                    0.027_230_314_174_435,
                ));
                (p, 8)
            }
            _ => {
                return Err(BemError::InvalidRule(format!(
                    "quadrature order must be in 1..=7, got {order}"
                )))
            }
        };
        // tabulated weights carry 15 digits; renormalise to sum exactly to 1
        let total: f64 = points.iter().map(|(_, w)| w).sum();
        let points = points.into_iter().map(|(p, w)| (p, w / total)).collect();
        Self::new(points, degree)
    }

    pub fn points(&self) -> &[([f64; 3], f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total polynomial degree integrated exactly.
    pub fn degree(&self) -> usize {
        self.degree
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::of_order(DEFAULT_ORDER).expect("built-in rule")
    }
}
