use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::GalerkinSystem;

/// Iteration cap for the smallest-eigenvalue estimate.
pub const SPD_MAX_ITERATIONS: usize = 200;
/// Relative change of the eigenvalue estimate at which iteration stops.
pub const SPD_TOLERANCE: f64 = 1e-8;

/// Outcome of [`spd_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpdReport {
    /// Estimate of the smallest eigenvalue (a Rayleigh quotient, so never
    /// below the true value).
    pub min_eigenvalue: f64,
    pub cholesky_succeeded: bool,
    pub iterations: usize,
    pub converged: bool,
}

impl SpdReport {
    pub fn is_spd(&self) -> bool {
        self.cholesky_succeeded && self.min_eigenvalue > 0.0
    }
}

/// Positive-definiteness check of an assembled system.
///
/// Tries a Cholesky factorisation, then estimates the smallest eigenvalue by
/// inverse power iteration on that factor. When the factorisation fails the
/// estimate falls back to power iteration on `‖A‖_∞ I − A`. A failed
/// factorisation is reported, not raised.
pub fn spd_check(system: &GalerkinSystem) -> SpdReport {
    let a = system.matrix();
    let n = a.nrows();
    let mut x = start_vector(n);
    let mut estimate = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;

    match system.cholesky() {
        Some(factor) => {
            for it in 1..=SPD_MAX_ITERATIONS {
                iterations = it;
                let y = factor.solve(&x);
                let next = 1.0 / x.dot(&y);
                x = &y / y.norm();
                if (next - estimate).abs() <= SPD_TOLERANCE * next.abs() {
                    converged = true;
                    break;
                }
                estimate = next;
            }
        }
        None => {
            let shift = (0..n)
                .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max);
            for it in 1..=SPD_MAX_ITERATIONS {
                iterations = it;
                let y = &x * shift - a * &x;
                let norm = y.norm();
                if norm == 0.0 {
                    // x already lies in the top eigenspace of A
                    converged = true;
                    break;
                }
                let next = shift - x.dot(&y);
                x = y / norm;
                if (next - estimate).abs() <= SPD_TOLERANCE * next.abs().max(shift * f64::EPSILON) {
                    converged = true;
                    break;
                }
                estimate = next;
            }
        }
    }
    SpdReport {
        min_eigenvalue: rayleigh(a, &x),
        cholesky_succeeded: system.cholesky().is_some(),
        iterations,
        converged,
    }
}

fn rayleigh(a: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    x.dot(&(a * x)) / x.norm_squared()
}

fn start_vector(n: usize) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
    let norm: f64 = v.norm();
    v / norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    fn system(entries: &[f64], n: usize) -> GalerkinSystem {
        GalerkinSystem::from_parts(
            DMatrix::from_row_slice(n, n, entries),
            DVector::from_element(n, 1.0),
            vec![Vector3::zeros(); n],
        )
        .unwrap()
    }

    #[test]
    fn one_by_one() {
        let r = spd_check(&system(&[0.37], 1));
        assert!(r.cholesky_succeeded);
        assert_eq!(r.min_eigenvalue, 0.37);
    }

    #[test]
    fn flipped_signs_fail_factorisation() {
        let r = spd_check(&system(&[-2.0, 1.0, 1.0, -3.0], 2));
        assert!(!r.cholesky_succeeded);
        assert!(r.min_eigenvalue < 0.0);
        assert!(!r.is_spd());
    }

    #[test]
    fn indefinite_minimum_eigenvalue() {
        let r = spd_check(&system(&[1.0, 2.0, 2.0, 1.0], 2));
        assert!(!r.cholesky_succeeded);
        assert!((r.min_eigenvalue + 1.0).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn known_spectrum() {
        // eigenvalues 1 and 3
        let r = spd_check(&system(&[2.0, 1.0, 1.0, 2.0], 2));
        assert!(r.cholesky_succeeded && r.converged);
        assert!((r.min_eigenvalue - 1.0).abs() < 1e-10);
    }
}
