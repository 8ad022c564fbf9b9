//! Report types and their text renderings. JSON is the primary format;
//! everything outside `timings` is reproducible bit for bit.

use std::fmt::Write;

use capvar::capacitance::{FamilyBound, Solver};
use capvar::convergence::RefinementStudy;
use capvar::varprinciple::{IndefinitenessWitness, PrincipleReport};
use serde::Serialize;

pub const CAPACITANCE_SCHEMA: &str = "capreport/1";
pub const CONVERGENCE_SCHEMA: &str = "capconverge/1";
pub const PRINCIPLE_SCHEMA: &str = "principlereport/1";
pub const MESH_SCHEMA: &str = "capmesh/1";

/// Where the mesh came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum MeshOrigin {
    #[serde(rename_all = "camelCase")]
    Shape {
        shape: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        side: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        semiaxes: Option<[f64; 3]>,
        #[serde(skip_serializing_if = "Option::is_none")]
        subdiv: Option<u32>,
        #[serde(skip_serializing_if = "Option::is_none")]
        panels_per_edge: Option<usize>,
    },
    File { path: String, format: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MeshStats {
    pub panels: usize,
    pub vertices: usize,
    pub total_area: f64,
    pub bounding_box: BoundingBox,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundingBox {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveConfig {
    pub source: MeshOrigin,
    pub quad_order: u8,
    pub solver: Solver,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpdDiagnostics {
    pub min_eigenvalue: f64,
    pub cholesky_succeeded: bool,
    /// Max `|A_ij − A_ji|` before symmetrisation.
    pub asymmetry_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Wall-clock seconds per phase. Not reproducible.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Timings {
    pub mesh: f64,
    pub assembly: f64,
    pub spd_check: f64,
    pub solve: f64,
    pub bounds: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CapacitanceReport {
    pub schema: &'static str,
    pub config: SolveConfig,
    pub mesh: MeshStats,
    pub capacitance_c: f64,
    #[serde(rename = "cOver4Pi")]
    pub c_over_4pi: f64,
    pub c_zeroth: f64,
    pub j: f64,
    pub subspace_bounds: Vec<FamilyBound>,
    pub gauss_value_at_sigma: f64,
    pub total_charge: f64,
    /// `σᵀA_hσ`.
    pub energy: f64,
    pub spd: SpdDiagnostics,
    pub residual_norm: f64,
    pub solver_used: Solver,
    pub solver_iterations: usize,
    /// Broken bound-ledger invariants; empty on a healthy run.
    pub ledger_violations: Vec<String>,
    pub timings: Timings,
}

impl CapacitanceReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let m = &self.mesh;
        let _ = writeln!(s, "panels            {}", m.panels);
        let _ = writeln!(s, "surface area      {:.12}", m.total_area);
        let _ = writeln!(s, "C                 {:.12}", self.capacitance_c);
        let _ = writeln!(s, "C/(4π)            {:.12}", self.c_over_4pi);
        let _ = writeln!(s, "C⁰ (v = 1)        {:.12}", self.c_zeroth);
        let _ = writeln!(s, "J                 {:.12}", self.j);
        for fb in &self.subspace_bounds {
            let _ = writeln!(s, "bound {:<28} {:.12}  (dim {})", fb.family, fb.bound, fb.dimension);
        }
        let _ = writeln!(s, "Gauss at σ        {:.12e}  (1/C = {:.12e})", self.gauss_value_at_sigma, 1.0 / self.capacitance_c);
        let _ = writeln!(
            s,
            "SPD               {} (λmin ≈ {:.3e}, asymmetry {:.2e})",
            if self.spd.cholesky_succeeded { "yes" } else { "no" },
            self.spd.min_eigenvalue,
            self.spd.asymmetry_norm
        );
        let _ = writeln!(s, "residual          {:.2e}", self.residual_norm);
        for v in &self.ledger_violations {
            let _ = writeln!(s, "VIOLATION         {v}");
        }
        let _ = write!(s, "time              {:.2} s", self.timings.total);
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceLevel {
    pub level: usize,
    pub panels: usize,
    pub capacitance_c: f64,
    #[serde(rename = "cOver4Pi")]
    pub c_over_4pi: f64,
    pub c_zeroth: f64,
    #[serde(rename = "cZerothOver4Pi")]
    pub c_zeroth_over_4pi: f64,
    /// `C − limit`.
    pub error: f64,
    pub relative_error: f64,
    pub order: Option<f64>,
    #[serde(rename = "extrapolatedOver4Pi")]
    pub extrapolated_over_4pi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceConfig {
    pub shape: MeshOrigin,
    pub levels: Vec<usize>,
    pub quad_order: u8,
    pub solver: Solver,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceReport {
    pub schema: &'static str,
    pub config: ConvergenceConfig,
    /// Known continuum value, when there is one.
    pub exact: Option<f64>,
    pub levels: Vec<ConvergenceLevel>,
    pub study: RefinementStudy,
    #[serde(rename = "limitOver4Pi")]
    pub limit_over_4pi: f64,
    /// Relative disagreement of the last two Richardson values.
    pub extrapolation_spread: Option<f64>,
    /// Seconds per level. Not reproducible.
    pub timings: Vec<f64>,
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$}"))
}

impl ConvergenceReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>5} {:>7} {:>16} {:>12} {:>12} {:>11} {:>7} {:>12}",
            "level", "panels", "C", "C/4π", "C⁰/4π", "rel.error", "order", "richardson"
        );
        for l in &self.levels {
            let _ = writeln!(
                s,
                "{:>5} {:>7} {:>16.10} {:>12.8} {:>12.8} {:>11.3e} {:>7} {:>12}",
                l.level,
                l.panels,
                l.capacitance_c,
                l.c_over_4pi,
                l.c_zeroth_over_4pi,
                l.relative_error,
                opt(l.order, 3),
                opt(l.extrapolated_over_4pi, 8)
            );
        }
        let reference = if self.exact.is_some() { "exact" } else { "extrapolated" };
        let _ = write!(
            s,
            "limit C/4π = {:.8} ({reference}); Richardson order {:.3}",
            self.limit_over_4pi, self.study.assumed_order
        );
        if let Some(spread) = self.extrapolation_spread {
            let _ = write!(s, "; extrapolation spread {spread:.2e}");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepResult {
    pub steps: usize,
    pub approach_factor: f64,
    pub witness: Option<IndefinitenessWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PrincipleOutput {
    pub schema: &'static str,
    pub input: String,
    pub dimension: usize,
    pub trials: u64,
    pub seed: u64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    #[serde(flatten)]
    pub report: PrincipleReport,
    pub sweep: SweepResult,
}

impl PrincipleOutput {
    pub fn render_text(&self) -> String {
        let r = &self.report;
        let mut s = String::new();
        let _ = writeln!(s, "classification    {:?}", r.classification);
        let _ = writeln!(s, "(Au, u)           {:.12e}", r.quadratic_form_at_u);
        let _ = writeln!(s, "best quotient     {:.12e}  ({} probes, {} degenerate)", r.best_quotient, r.probes, r.degenerate_probes);
        let _ = writeln!(s, "attained at u     {}", r.attained_at_u);
        let _ = writeln!(s, "principle holds   {}", r.principle_holds);
        if let Some(w) = &r.witness {
            let _ = writeln!(s, "witness quotient  {:.6e} at λ* = {:.6e} ({:?})", w.quotient, w.lambda_star, w.source);
        }
        let _ = write!(s, "consistent        {}", r.consistent);
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GenerateOutput {
    pub schema: &'static str,
    pub path: String,
    pub format: String,
    pub source: MeshOrigin,
    pub mesh: MeshStats,
}
