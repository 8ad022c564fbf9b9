//! Electrostatic capacitance of a perfect conductor by boundary elements,
//! and the max-quotient variational principle behind its bounds.
//!
//! The conductor surface `S` is a closed triangle mesh ([`geometry`]). The
//! single-layer operator `(Aσ)(s) = ∫_S σ(t) / (4π|s − t|) dt` is discretised
//! by Galerkin's method with one constant density per triangle ([`bem`]);
//! solving `A_h σ = b` for the unit-potential right-hand side gives the
//! capacitance, and a family of Rayleigh-type quotients bounds it from
//! below ([`capacitance`]). The abstract principle those bounds rest on is
//! exercised on plain symmetric matrices in [`varprinciple`].
//!
//! Units follow the kernel's `1/(4π)` normalisation, so a unit sphere has
//! `C = 4π`.
//!
//! ```
//! use capvar::bem::{assemble, QuadratureRule};
//! use capvar::capacitance::{solve_capacitance, Solver};
//! use capvar::geometry::{build_panels, make_icosphere};
//!
//! let mesh = make_icosphere(1.0, 2).unwrap();
//! let system = assemble(&build_panels(&mesh), &QuadratureRule::default()).unwrap();
//! let solution = solve_capacitance(&system, Solver::Direct).unwrap();
//! let rel = (solution.capacitance - 4.0 * std::f64::consts::PI).abs() / (4.0 * std::f64::consts::PI);
//! assert!(rel < 0.05);
//! ```

pub mod bem;
pub mod capacitance;
pub mod convergence;
pub mod geometry;
pub mod varprinciple;
