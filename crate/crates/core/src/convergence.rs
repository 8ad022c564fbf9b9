//! Mesh-refinement bookkeeping: observed convergence order and Richardson
//! extrapolation for sequences refined by a constant ratio.

use serde::Serialize;

/// Order `p` implied by three successive values with refinement ratio `r`:
/// `p = ln(|c₁ − c₂| / |c₂ − c₃|) / ln r`.
pub fn observed_order(coarse: f64, medium: f64, fine: f64, ratio: f64) -> f64 {
    ((coarse - medium).abs() / (medium - fine).abs()).ln() / ratio.ln()
}

/// Order implied by errors against a known limit at two resolutions.
pub fn order_from_errors(coarse_error: f64, fine_error: f64, ratio: f64) -> f64 {
    (coarse_error.abs() / fine_error.abs()).ln() / ratio.ln()
}

/// Richardson extrapolation of a pair assuming error `∝ hᵖ`:
/// `fine + (fine − coarse) / (rᵖ − 1)`.
pub fn richardson(coarse: f64, fine: f64, ratio: f64, order: f64) -> f64 {
    fine + (fine - coarse) / (ratio.powf(order) - 1.0)
}

/// One row of a refinement study.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RefinementRow {
    pub level: usize,
    pub value: f64,
    /// Difference to the reference limit (known, or extrapolated).
    pub error: f64,
    /// Order from this level's and the previous level's errors.
    pub order: Option<f64>,
    /// Richardson value from this level and the previous one.
    pub extrapolated: Option<f64>,
}

/// Summary of a sequence of solutions refined by a constant ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RefinementStudy {
    pub ratio: f64,
    /// Order used for the pairwise extrapolations.
    pub assumed_order: f64,
    /// Order from the last three values, when at least three exist.
    pub observed_order: Option<f64>,
    /// Reference limit the errors are measured against.
    pub limit: f64,
    pub rows: Vec<RefinementRow>,
}

/// Order assumed when fewer than three values are available or the observed
/// order is not a positive finite number.
pub const FALLBACK_ORDER: f64 = 1.0;

impl RefinementStudy {
    /// Builds the study. Pairwise extrapolations use `order` when given,
    /// otherwise the order observed from the last three values (or
    /// [`FALLBACK_ORDER`]). Errors are measured against `exact` when given,
    /// otherwise against the finest pairwise Richardson value.
    ///
    /// Panics if fewer than two values are given.
    pub fn new(levels: &[usize], values: &[f64], ratio: f64, order: Option<f64>, exact: Option<f64>) -> Self {
        assert!(values.len() >= 2 && levels.len() == values.len());
        let n = values.len();
        let observed = (n >= 3).then(|| observed_order(values[n - 3], values[n - 2], values[n - 1], ratio));
        let assumed_order = order.unwrap_or(match observed {
            Some(p) if p.is_finite() && p > 0.0 => p,
            _ => FALLBACK_ORDER,
        });
        let extrapolated: Vec<Option<f64>> = (0..n)
            .map(|k| (k > 0).then(|| richardson(values[k - 1], values[k], ratio, assumed_order)))
            .collect();
        let limit = exact.unwrap_or_else(|| extrapolated[n - 1].unwrap());
        let errors: Vec<f64> = values.iter().map(|v| v - limit).collect();
        let rows = (0..n)
            .map(|k| RefinementRow {
                level: levels[k],
                value: values[k],
                error: errors[k],
                order: (k > 0).then(|| order_from_errors(errors[k - 1], errors[k], ratio)),
                extrapolated: extrapolated[k],
            })
            .collect();
        Self {
            ratio,
            assumed_order,
            observed_order: observed,
            limit,
            rows,
        }
    }

    /// Relative disagreement of the last two pairwise extrapolations.
    pub fn extrapolation_spread(&self) -> Option<f64> {
        let ex: Vec<f64> = self.rows.iter().filter_map(|r| r.extrapolated).collect();
        (ex.len() >= 2).then(|| {
            let (a, b) = (ex[ex.len() - 2], ex[ex.len() - 1]);
            (a - b).abs() / b.abs()
        })
    }
}
