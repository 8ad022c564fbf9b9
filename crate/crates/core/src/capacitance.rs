//! Capacitance from the discretised single-layer equation and the
//! variational bounds around it.
//!
//! With `A_h` the Galerkin matrix and `b` the panel areas, the equilibrium
//! density solves `A_h σ = b` and the capacitance is `C = bᵀσ = σᵀA_hσ`
//! (unit potential, so charge and capacitance coincide). Every trial
//! density `v` gives the lower bound `(bᵀv)² / vᵀA_hv ≤ C`, and the Gauss
//! energy `vᵀA_hv / (bᵀv)²` is bounded below by `1/C`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::bem::GalerkinSystem;

/// Systems larger than this are solved with conjugate gradients under
/// [`Solver::Auto`].
pub const CG_THRESHOLD: usize = 8000;
/// Relative residual target for conjugate gradients.
pub const CG_TOLERANCE: f64 = 1e-10;
/// Relative threshold below which a quadratic form counts as zero.
pub const DEGENERACY_TOLERANCE: f64 = 1e-13;
/// Relative singular-value cutoff for trial families.
pub const RANK_CUTOFF: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CapacitanceError {
    #[error("Cholesky factorisation failed: the system is not positive definite (run spd_check)")]
    NotPositiveDefinite,
    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("vector has length {got}, system has {expected} panels")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("trial vector contains non-finite values")]
    NonFinite,
    #[error("total charge of the trial density is zero; the Gauss functional is undefined")]
    ZeroTotalCharge,
    #[error("trial family is empty")]
    EmptyFamily,
    #[error("trial family has numerical rank zero")]
    RankDeficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    /// Dense Cholesky.
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    Cg,
    /// Direct up to [`CG_THRESHOLD`] panels, CG above.
    Auto,
}

/// Equilibrium density of a conductor held at unit potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ChargeSolution {
    #[serde(skip)]
    pub sigma: DVector<f64>,
    /// `C = bᵀσ`.
    pub capacitance: f64,
    /// `Q = Σ area·σ`; equal to `capacitance` at unit potential.
    pub total_charge: f64,
    /// `‖A_hσ − b‖ / ‖b‖`.
    pub residual_norm: f64,
    /// CG iterations, or 0 for the direct solver.
    pub iterations: usize,
    pub solver: Solver,
}

impl ChargeSolution {
    /// `σᵀA_hσ`, the energy form of the capacitance.
    pub fn energy(&self, system: &GalerkinSystem) -> f64 {
        self.sigma.dot(&(system.matrix() * &self.sigma))
    }
}

/// Solves `A_h σ = b` and returns `C = bᵀσ`.
pub fn solve_capacitance(system: &GalerkinSystem, solver: Solver) -> Result<ChargeSolution, CapacitanceError> {
    let b = system.areas();
    let (sigma, iterations, solver) = match solver {
        Solver::Direct => (solve_direct(system)?, 0, Solver::Direct),
        Solver::Cg => {
            let (s, it) = solve_cg(system)?;
            (s, it, Solver::Cg)
        }
        Solver::Auto if system.len() > CG_THRESHOLD => {
            let (s, it) = solve_cg(system)?;
            (s, it, Solver::Cg)
        }
        Solver::Auto => (solve_direct(system)?, 0, Solver::Direct),
    };
    let residual = system.matrix() * &sigma - b;
    let capacitance = b.dot(&sigma);
    Ok(ChargeSolution {
        capacitance,
        total_charge: capacitance,
        residual_norm: residual.norm() / b.norm(),
        iterations,
        solver,
        sigma,
    })
}

fn solve_direct(system: &GalerkinSystem) -> Result<DVector<f64>, CapacitanceError> {
    let factor = system
        .cholesky()
        .ok_or(CapacitanceError::NotPositiveDefinite)?;
    let b = system.areas();
    let mut sigma = factor.solve(b);
    // one step of iterative refinement
    let r = b - system.matrix() * &sigma;
    sigma += factor.solve(&r);
    Ok(sigma)
}

fn solve_cg(system: &GalerkinSystem) -> Result<(DVector<f64>, usize), CapacitanceError> {
    let a = system.matrix();
    let b = system.areas();
    let n = b.len();
    let inv_diag = a.diagonal().map(|d| 1.0 / d);
    let b_norm = b.norm();
    let mut x = DVector::zeros(n);
    let mut r = b.clone();
    let mut z = r.component_mul(&inv_diag);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let max_iter = 10 * n;
    for it in 1..=max_iter {
        let ap = a * &p;
        let alpha = rz / p.dot(&ap);
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        if r.norm() <= CG_TOLERANCE * b_norm {
            return Ok((x, it));
        }
        z = r.component_mul(&inv_diag);
        let rz_next = r.dot(&z);
        p = &z + &p * (rz_next / rz);
        rz = rz_next;
    }
    Err(CapacitanceError::NotConverged {
        iterations: max_iter,
        residual: r.norm() / b_norm,
    })
}

fn check_vector(system: &GalerkinSystem, v: &DVector<f64>) -> Result<(), CapacitanceError> {
    if v.len() != system.len() {
        return Err(CapacitanceError::DimensionMismatch {
            expected: system.len(),
            got: v.len(),
        });
    }
    if !v.iter().all(|x| x.is_finite()) {
        return Err(CapacitanceError::NonFinite);
    }
    Ok(())
}

/// Value of the Rayleigh-type capacitance functional for one trial density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayleighValue {
    pub value: f64,
    /// Set when `vᵀA_hv` is zero to working precision; `value` is then 0.
    pub degenerate: bool,
}

/// `(bᵀv)² / vᵀA_hv`, a lower bound on `C` for every `v`.
pub fn rayleigh_bound(system: &GalerkinSystem, v: &DVector<f64>) -> Result<RayleighValue, CapacitanceError> {
    check_vector(system, v)?;
    let energy = v.dot(&(system.matrix() * v));
    if energy.abs() <= DEGENERACY_TOLERANCE * system.norm() * v.norm_squared() {
        return Ok(RayleighValue {
            value: 0.0,
            degenerate: true,
        });
    }
    let charge = system.areas().dot(v);
    Ok(RayleighValue {
        value: charge * charge / energy,
        degenerate: false,
    })
}

/// Gauss energy `vᵀA_hv / Q²` with `Q = bᵀv`; never below `1/C`.
pub fn gauss_functional(system: &GalerkinSystem, v: &DVector<f64>) -> Result<f64, CapacitanceError> {
    check_vector(system, v)?;
    let b = system.areas();
    let charge = b.dot(v);
    if charge.abs() <= DEGENERACY_TOLERANCE * b.norm() * v.norm() {
        return Err(CapacitanceError::ZeroTotalCharge);
    }
    Ok(v.dot(&(system.matrix() * v)) / (charge * charge))
}

/// Maximum of the Rayleigh functional over `span(family)`: `gᵀG⁻¹g` with
/// `g_i = bᵀv_i` and `G_ij = v_iᵀA_hv_j`.
///
/// The family is first replaced by an orthonormal basis of its numerical
/// range (singular values below [`RANK_CUTOFF`] relative are dropped), and
/// the projected system is pseudo-solved with the same relative cutoff.
pub fn subspace_bound(system: &GalerkinSystem, family: &[DVector<f64>]) -> Result<f64, CapacitanceError> {
    if family.is_empty() {
        return Err(CapacitanceError::EmptyFamily);
    }
    for v in family {
        check_vector(system, v)?;
    }
    let n = system.len();
    let columns: Vec<DVector<f64>> = family
        .iter()
        .filter_map(|v| {
            let norm = v.norm();
            (norm > 0.0).then(|| v / norm)
        })
        .collect();
    if columns.is_empty() {
        return Err(CapacitanceError::RankDeficient);
    }
    let basis = orthonormal_range(&DMatrix::from_columns(&columns));
    if basis.ncols() == 0 {
        return Err(CapacitanceError::RankDeficient);
    }
    debug_assert_eq!(basis.nrows(), n);
    let projected = basis.transpose() * (system.matrix() * &basis);
    let g = basis.transpose() * system.areas();
    Ok(pseudo_quadratic(projected, &g))
}

/// Orthonormal basis of the column span, by column-pivoted QR. Columns whose
/// pivot falls below the relative cutoff are treated as dependent.
fn orthonormal_range(v: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = v.clone().col_piv_qr();
    let r = qr.r();
    let lead = r[(0, 0)].abs();
    let rank = (0..r.nrows().min(r.ncols()))
        .take_while(|&k| r[(k, k)].abs() > RANK_CUTOFF * lead)
        .count();
    qr.q().columns(0, rank).into_owned()
}

/// `gᵀG⁺g` for symmetric `G`, dropping eigenvalues below the relative cutoff.
fn pseudo_quadratic(g_mat: DMatrix<f64>, g: &DVector<f64>) -> f64 {
    let eig = SymmetricEigen::new(g_mat);
    let top = eig.eigenvalues.amax();
    let mut sum = 0.0;
    for k in 0..eig.eigenvalues.len() {
        let mu = eig.eigenvalues[k];
        if mu > RANK_CUTOFF * top {
            let c = eig.eigenvectors.column(k).dot(g);
            sum += c * c / mu;
        }
    }
    sum
}

/// The constant-density bound and the double surface integral behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ZerothApproximation {
    /// `C⁰ = 4π|S|² / J`.
    pub c_zeroth: f64,
    /// `J = ∫_S∫_S ds dt / r = 4π · 1ᵀA_h1`.
    pub j: f64,
}

pub fn zeroth_capacitance(system: &GalerkinSystem) -> ZerothApproximation {
    let mut form = 0.0;
    for x in system.matrix().iter() {
        form += x;
    }
    let area = system.total_area();
    ZerothApproximation {
        c_zeroth: area * area / form,
        j: 4.0 * PI * form,
    }
}

/// Built-in nested trial families: monomials in the panel centroid
/// coordinates up to the given degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialFamily {
    /// `{1}`
    Constant,
    /// `{1, x, y, z}`
    Linear,
    /// `{1, x, y, z, x², y², z², xy, yz, zx}`
    Quadratic,
}

impl TrialFamily {
    pub const NESTED: [TrialFamily; 3] = [Self::Constant, Self::Linear, Self::Quadratic];

    pub fn name(self) -> &'static str {
        match self {
            Self::Constant => "{1}",
            Self::Linear => "{1,x,y,z}",
            Self::Quadratic => "{1,x,y,z,x2,y2,z2,xy,yz,zx}",
        }
    }

    /// Trial vectors evaluated at `centroids`. Coordinates are centred and
    /// scaled first, which leaves the span unchanged.
    pub fn vectors(self, centroids: &[Vector3<f64>]) -> Vec<DVector<f64>> {
        let n = centroids.len();
        let mean = centroids.iter().fold(Vector3::zeros(), |acc, c| acc + c) / n.max(1) as f64;
        let scale = centroids
            .iter()
            .map(|c| (c - mean).amax())
            .fold(0.0, f64::max);
        let scale = if scale > 0.0 { scale } else { 1.0 };
        let local: Vec<Vector3<f64>> = centroids.iter().map(|c| (c - mean) / scale).collect();
        let coord = |k: usize| DVector::from_iterator(n, local.iter().map(|p| p[k]));
        let product = |k: usize, l: usize| DVector::from_iterator(n, local.iter().map(|p| p[k] * p[l]));

        let mut out = vec![DVector::from_element(n, 1.0)];
        if matches!(self, Self::Linear | Self::Quadratic) {
            out.extend((0..3).map(coord));
        }
        if self == Self::Quadratic {
            out.extend((0..3).map(|k| product(k, k)));
            out.extend([product(0, 1), product(1, 2), product(2, 0)]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilyBound {
    pub family: String,
    pub dimension: usize,
    pub bound: f64,
}

/// Every variational quantity for one solved system.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundLedger {
    pub c_zeroth: f64,
    pub j: f64,
    pub subspace_bounds: Vec<FamilyBound>,
    pub gauss_value_at_sigma: f64,
    pub capacitance: f64,
}

impl BoundLedger {
    /// Human-readable list of broken ledger invariants; empty when all hold.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let c = self.capacitance;
        for fb in &self.subspace_bounds {
            if fb.bound > c * (1.0 + 1e-10) {
                out.push(format!("bound {} = {} exceeds C = {c}", fb.family, fb.bound));
            }
        }
        for pair in self.subspace_bounds.windows(2) {
            if pair[1].bound < pair[0].bound * (1.0 - 1e-12) {
                out.push(format!(
                    "bound decreases from {} ({}) to {} ({})",
                    pair[0].family, pair[0].bound, pair[1].family, pair[1].bound
                ));
            }
        }
        if let Some(first) = self.subspace_bounds.first() {
            if (first.bound - self.c_zeroth).abs() > 1e-12 * self.c_zeroth {
                out.push(format!(
                    "constant-family bound {} differs from C0 {}",
                    first.bound, self.c_zeroth
                ));
            }
        }
        out
    }
}

pub fn bound_ledger(system: &GalerkinSystem, solution: &ChargeSolution) -> Result<BoundLedger, CapacitanceError> {
    let zeroth = zeroth_capacitance(system);
    let subspace_bounds = TrialFamily::NESTED
        .iter()
        .map(|&family| {
            let vectors = family.vectors(system.centroids());
            Ok(FamilyBound {
                family: family.name().to_string(),
                dimension: vectors.len(),
                bound: subspace_bound(system, &vectors)?,
            })
        })
        .collect::<Result<Vec<_>, CapacitanceError>>()?;
    Ok(BoundLedger {
        c_zeroth: zeroth.c_zeroth,
        j: zeroth.j,
        subspace_bounds,
        gauss_value_at_sigma: gauss_functional(system, &solution.sigma)?,
        capacitance: solution.capacitance,
    })
}
