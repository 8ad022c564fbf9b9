//! The max-quotient principle for symmetric operators in finite dimensions.
//!
//! For a symmetric `A` and a fixed `u`,
//!
//! ```text
//! (Au, u) = max_v |(Av, u)|² / (Av, v)
//! ```
//!
//! holds exactly when `A` is non-negative. The quotient is taken to be zero
//! wherever `(Av, v) = 0`. For non-negative `A` the bound is the Cauchy
//! inequality for the form `[x, y] = (Ax, y)`, with equality at `v = λu`.
//! For indefinite `A` this module builds an explicit family `v = λz + w`
//! along which the quotient is unbounded: with `a = (Az, z) > 0`,
//! `c = (Aw, w) < 0` and `b = (Az, w)`, the denominator
//! `q(λ) = aλ² + 2bλ + c` has roots `λ₁ < 0 < λ₂`, while the numerator
//! `p(λ) = (Au, λz + w)²` generally does not vanish there.
//!
//! ```
//! use capvar::varprinciple::{find_witness, quotient, SymmetricForm};
//! use nalgebra::DVector;
//!
//! let a = SymmetricForm::from_rows(&[vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
//! let u = DVector::from_vec(vec![1.0, 1.0]);
//! assert_eq!(quotient(&a, &u, &u).unwrap().value, 5.0);
//! assert!(find_witness(&a, &u, 40, 0.5).unwrap().is_none());
//! ```

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Band around zero, relative to `‖A‖·‖v‖²`, inside which `(Av, v)` counts
/// as zero and the quotient is defined as 0.
pub const DENOMINATOR_TOLERANCE: f64 = 1e-13;
/// Relative eigenvalue tolerance for sign classification.
pub const SPECTRAL_TOLERANCE: f64 = 1e-10;
/// Default relative asymmetry accepted by [`SymmetricForm::new`].
pub const DEFAULT_ASYMMETRY_TOLERANCE: f64 = 1e-12;
/// Default number of pole-approach steps in [`find_witness`].
pub const DEFAULT_SWEEP_STEPS: usize = 40;
/// Default ratio between successive pole distances in [`find_witness`].
pub const DEFAULT_APPROACH_FACTOR: f64 = 0.5;
/// Probe budget of the random fallback witness search.
pub const RANDOM_PROBE_BUDGET: usize = 10_000;

#[derive(Debug, Error)]
pub enum PrincipleError {
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("matrix is not symmetric: max |A - Aᵀ| = {asymmetry:e} exceeds {tolerance:e}")]
    Asymmetric { asymmetry: f64, tolerance: f64 },
    #[error("vector has dimension {got}, operator has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("symmetric eigendecomposition did not converge")]
    EigenFailure,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("malformed matrix input: {0}")]
    Input(String),
}

/// A real symmetric operator on `ℝⁿ`, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricForm {
    matrix: DMatrix<f64>,
    norm: f64,
}

impl SymmetricForm {
    /// Symmetrises `matrix` after checking that `max |A − Aᵀ|` is at most
    /// [`DEFAULT_ASYMMETRY_TOLERANCE`] times the largest entry.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self, PrincipleError> {
        Self::with_tolerance(matrix, DEFAULT_ASYMMETRY_TOLERANCE)
    }

    pub fn with_tolerance(matrix: DMatrix<f64>, tolerance: f64) -> Result<Self, PrincipleError> {
        let n = matrix.nrows();
        if n == 0 {
            return Err(PrincipleError::Empty);
        }
        if matrix.ncols() != n {
            return Err(PrincipleError::NotSquare {
                row: 0,
                len: matrix.ncols(),
                expected: n,
            });
        }
        if !matrix.iter().all(|x| x.is_finite()) {
            return Err(PrincipleError::NonFinite("matrix"));
        }
        let asymmetry = (&matrix - matrix.transpose()).amax();
        let allowed = tolerance * matrix.amax();
        if asymmetry > allowed {
            return Err(PrincipleError::Asymmetric {
                asymmetry,
                tolerance: allowed,
            });
        }
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        let norm = matrix.norm();
        Ok(Self { matrix, norm })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, PrincipleError> {
        let n = rows.len();
        if n == 0 {
            return Err(PrincipleError::Empty);
        }
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(PrincipleError::NotSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    /// `(Ax, y)`.
    pub fn form(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.apply(x).dot(y)
    }

    /// `tA`.
    pub fn scaled(&self, t: f64) -> Self {
        let matrix = &self.matrix * t;
        let norm = matrix.norm();
        Self { matrix, norm }
    }

    fn check(&self, v: &DVector<f64>, what: &'static str) -> Result<(), PrincipleError> {
        if v.len() != self.dim() {
            return Err(PrincipleError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        if !v.iter().all(|x| x.is_finite()) {
            return Err(PrincipleError::NonFinite(what));
        }
        Ok(())
    }

    fn eigen(&self) -> Result<SymmetricEigen<f64, nalgebra::Dyn>, PrincipleError> {
        SymmetricEigen::try_new(self.matrix.clone(), f64::EPSILON, 0).ok_or(PrincipleError::EigenFailure)
    }
}

/// The quotient `|(Av, u)|² / (Av, v)`.
///
/// `value` carries the sign of `(Av, v)`, so it is negative for directions
/// where the form is negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuotientValue {
    pub value: f64,
    /// `(Av, v)` was zero to working precision and `value` was set to 0.
    pub degenerate: bool,
}

/// Evaluates `|(Av, u)|² / (Av, v)`, or 0 (flagged degenerate) when
/// `|(Av, v)| ≤ 1e-13·‖A‖·‖v‖²`.
pub fn quotient(a: &SymmetricForm, u: &DVector<f64>, v: &DVector<f64>) -> Result<QuotientValue, PrincipleError> {
    a.check(u, "u")?;
    a.check(v, "v")?;
    Ok(quotient_unchecked(a, u, v))
}

fn quotient_unchecked(a: &SymmetricForm, u: &DVector<f64>, v: &DVector<f64>) -> QuotientValue {
    let av = a.apply(v);
    let denominator = av.dot(v);
    if denominator.abs() <= DENOMINATOR_TOLERANCE * a.norm() * v.norm_squared() {
        return QuotientValue {
            value: 0.0,
            degenerate: true,
        };
    }
    let numerator = av.dot(u);
    QuotientValue {
        value: numerator * numerator / denominator,
        degenerate: false,
    }
}

/// Sign class of a symmetric operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    /// `(Av, v) ≥ 0` for all `v`, and `A ≠ 0`.
    Nonneg,
    /// Both signs occur.
    Indefinite,
    /// `(Av, v) ≤ 0` for all `v`, and `A ≠ 0`.
    Nonpos,
    /// `A = 0`.
    Zero,
}

impl Classification {
    /// True for the classes on which the principle holds.
    pub fn is_nonnegative(self) -> bool {
        matches!(self, Self::Nonneg | Self::Zero)
    }
}

fn classify_spectrum(eigenvalues: &DVector<f64>) -> Classification {
    let scale = eigenvalues.amax();
    let tol = SPECTRAL_TOLERANCE * scale;
    let positive = eigenvalues.iter().any(|&l| l > tol);
    let negative = eigenvalues.iter().any(|&l| l < -tol);
    match (positive, negative) {
        (true, true) => Classification::Indefinite,
        (true, false) => Classification::Nonneg,
        (false, true) => Classification::Nonpos,
        (false, false) => Classification::Zero,
    }
}

/// Classifies by eigenvalue signs, with eigenvalues within
/// `1e-10·max|λ|` of zero treated as zero.
pub fn classify(a: &SymmetricForm) -> Result<Classification, PrincipleError> {
    Ok(classify_spectrum(&a.eigen()?.eigenvalues))
}

/// Where the directions `z`, `w` of a witness came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessSource {
    /// Extreme eigenvectors.
    Eigen,
    /// Random directions of opposite sign.
    Random,
}

/// A point `v* = λ*·z + w` near a pole of the quotient along the family
/// `v = λz + w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IndefinitenessWitness {
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    /// `(Az, z) > 0`
    pub a: f64,
    /// `(Az, w)`
    pub b: f64,
    /// `(Aw, w) < 0`
    pub c: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda_star: f64,
    pub v_star: Vec<f64>,
    pub quotient: f64,
    pub source: WitnessSource,
}

impl IndefinitenessWitness {
    /// `q(λ) = aλ² + 2bλ + c`.
    pub fn denominator_at(&self, lambda: f64) -> f64 {
        self.a * lambda * lambda + 2.0 * self.b * lambda + self.c
    }

    /// `λz + w`.
    pub fn direction(&self, lambda: f64) -> DVector<f64> {
        DVector::from_iterator(
            self.z.len(),
            self.z.iter().zip(&self.w).map(|(z, w)| lambda * z + w),
        )
    }
}

/// Flips `v` so that its largest-magnitude entry is positive.
fn canonical_sign(v: DVector<f64>) -> DVector<f64> {
    let k = v.iamax();
    if v[k] < 0.0 {
        -v
    } else {
        v
    }
}

/// Roots `λ₁ < λ₂` of `aλ² + 2bλ + c` for `a > 0 > c`, in the
/// cancellation-free form.
fn quadratic_roots(a: f64, b: f64, c: f64) -> (f64, f64) {
    let disc = (b * b - a * c).sqrt();
    let q = -(b + disc.copysign(b));
    let (r1, r2) = (q / a, c / q);
    (r1.min(r2), r1.max(r2))
}

fn sweep_family(
    a: &SymmetricForm,
    u: &DVector<f64>,
    z: &DVector<f64>,
    w: &DVector<f64>,
    sweep_steps: usize,
    approach_factor: f64,
    source: WitnessSource,
) -> Result<Option<IndefinitenessWitness>, PrincipleError> {
    let az = a.apply(z);
    let ca = az.dot(z);
    let cb = az.dot(w);
    let cc = a.form(w, w);
    if !(ca > 0.0 && cc < 0.0) {
        return Err(PrincipleError::Inconsistent(format!(
            "expected (Az,z) > 0 > (Aw,w), got {ca:e} and {cc:e}"
        )));
    }
    let (lambda1, lambda2) = quadratic_roots(ca, cb, cc);

    // p(λ) = (αλ + β)² with α = (Au, z), β = (Au, w)
    let au = a.apply(u);
    let (alpha, beta) = (au.dot(z), au.dot(w));
    let scale = a.norm() * u.norm();
    let vanishes = |l: f64| (alpha * l + beta).abs() <= 1e-12 * scale * (1.0 + l.abs());
    if vanishes(lambda1) && vanishes(lambda2) {
        return Ok(None);
    }

    let start = 0.5 * lambda1.abs().min(lambda2);
    let mut best: Option<(f64, f64, DVector<f64>)> = None;
    let mut delta = start;
    for _ in 0..sweep_steps {
        for lambda in [lambda1 - delta, lambda2 + delta] {
            let v = z * lambda + w;
            let q = quotient_unchecked(a, u, &v);
            if !q.degenerate && best.as_ref().is_none_or(|(bq, _, _)| q.value > *bq) {
                best = Some((q.value, lambda, v));
            }
        }
        delta *= approach_factor;
    }
    Ok(best.map(|(quotient, lambda_star, v_star)| IndefinitenessWitness {
        z: z.iter().copied().collect(),
        w: w.iter().copied().collect(),
        a: ca,
        b: cb,
        c: cc,
        lambda1,
        lambda2,
        lambda_star,
        v_star: v_star.iter().copied().collect(),
        quotient,
        source,
    }))
}

fn check_sweep(sweep_steps: usize, approach_factor: f64) -> Result<(), PrincipleError> {
    if sweep_steps == 0 {
        return Err(PrincipleError::InvalidArgument("sweep steps must be at least 1".into()));
    }
    if !(approach_factor > 0.0 && approach_factor < 1.0) {
        return Err(PrincipleError::InvalidArgument(format!(
            "approach factor must be in (0, 1), got {approach_factor}"
        )));
    }
    Ok(())
}

/// Builds an unboundedness witness for an indefinite `A`.
///
/// `z` and `w` are the unit eigenvectors of the largest and smallest
/// eigenvalues. The quotient is evaluated at `λ₁ − δ` and `λ₂ + δ` for
/// `δ = δ₀·r^k`, `k < sweep_steps`, with `δ₀ = min(|λ₁|, λ₂)/2` and
/// `r = approach_factor`; the largest value found is returned.
///
/// Returns `None` when `A` is not indefinite, or when `p` vanishes at both
/// roots of `q` (then the quotient stays bounded along this family).
pub fn find_witness(
    a: &SymmetricForm,
    u: &DVector<f64>,
    sweep_steps: usize,
    approach_factor: f64,
) -> Result<Option<IndefinitenessWitness>, PrincipleError> {
    a.check(u, "u")?;
    check_sweep(sweep_steps, approach_factor)?;
    let eig = a.eigen()?;
    if classify_spectrum(&eig.eigenvalues) != Classification::Indefinite {
        return Ok(None);
    }
    let top = eig.eigenvalues.imax();
    let bottom = eig.eigenvalues.imin();
    let z = canonical_sign(eig.eigenvectors.column(top).into_owned());
    let w = canonical_sign(eig.eigenvectors.column(bottom).into_owned());
    sweep_family(a, u, &z, &w, sweep_steps, approach_factor, WitnessSource::Eigen)
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let norm: f64 = v.norm();
        if norm > 0.0 {
            return v / norm;
        }
    }
}

/// Random-direction fallback: draws directions until one of each sign is
/// found, sweeps that pair, and repeats until the quotient exceeds
/// `(Au, u) + 1` or [`RANDOM_PROBE_BUDGET`] quotient evaluations are spent.
/// Returns the best witness seen.
pub fn random_witness(
    a: &SymmetricForm,
    u: &DVector<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<Option<IndefinitenessWitness>, PrincipleError> {
    a.check(u, "u")?;
    let n = a.dim();
    let target = a.form(u, u) + 1.0;
    let tol = SPECTRAL_TOLERANCE * a.norm();
    let mut spent = 0;
    let mut best: Option<IndefinitenessWitness> = None;
    let (mut pos, mut neg) = (None, None);
    while spent < RANDOM_PROBE_BUDGET {
        let x = random_unit(n, rng);
        spent += 1;
        let f = a.form(&x, &x);
        if f > tol {
            pos = Some(x);
        } else if f < -tol {
            neg = Some(x);
        }
        if let (Some(z), Some(w)) = (&pos, &neg) {
            spent += 2 * DEFAULT_SWEEP_STEPS;
            if let Some(wit) = sweep_family(
                a,
                u,
                z,
                w,
                DEFAULT_SWEEP_STEPS,
                DEFAULT_APPROACH_FACTOR,
                WitnessSource::Random,
            )? {
                if best.as_ref().is_none_or(|b| wit.quotient > b.quotient) {
                    best = Some(wit);
                }
            }
            if best.as_ref().is_some_and(|b| b.quotient >= target) {
                break;
            }
            pos = None;
            neg = None;
        }
    }
    Ok(best)
}

/// Outcome of probing the principle for one `(A, u)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PrincipleReport {
    pub classification: Classification,
    /// `(Au, u)`.
    pub quadratic_form_at_u: f64,
    /// Largest quotient over all probes.
    pub best_quotient: f64,
    /// `v = u` reproduces `(Au, u)` to `1e-10·(1 + |(Au, u)|)`.
    pub attained_at_u: bool,
    /// No probe exceeded `(Au, u)` beyond `1e-8` relative + `1e-12`, and
    /// the maximum was attained at `u`.
    pub principle_holds: bool,
    /// The observation agrees with the classification.
    pub consistent: bool,
    pub probes: usize,
    pub degenerate_probes: usize,
    pub witness: Option<IndefinitenessWitness>,
}

/// True when `value` does not exceed `(Au, u)` beyond the Cauchy-bound
/// tolerance.
pub fn within_cauchy_bound(value: f64, form_at_u: f64) -> bool {
    value <= form_at_u + 1e-8 * form_at_u.abs() + 1e-12
}

/// Probes the principle at `v = u`, at `random_trials` seeded random unit
/// vectors and, for indefinite `A`, at a witness point. Deterministic for a
/// fixed seed.
pub fn verify_principle(
    a: &SymmetricForm,
    u: &DVector<f64>,
    random_trials: usize,
    seed: u64,
) -> Result<PrincipleReport, PrincipleError> {
    a.check(u, "u")?;
    if random_trials == 0 {
        return Err(PrincipleError::InvalidArgument("random trials must be at least 1".into()));
    }
    let classification = classify(a)?;
    let form_at_u = a.form(u, u);

    let at_u = quotient_unchecked(a, u, u);
    let attained_at_u = (at_u.value - form_at_u).abs() <= 1e-10 * (1.0 + form_at_u.abs());
    let mut best = at_u.value;
    let mut probes = 1;
    let mut degenerate_probes = usize::from(at_u.degenerate);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_trials {
        let q = quotient_unchecked(a, u, &random_unit(a.dim(), &mut rng));
        probes += 1;
        degenerate_probes += usize::from(q.degenerate);
        best = best.max(q.value);
    }

    let mut witness = None;
    if classification == Classification::Indefinite {
        witness = find_witness(a, u, DEFAULT_SWEEP_STEPS, DEFAULT_APPROACH_FACTOR)?;
        if witness.as_ref().is_none_or(|w| w.quotient <= form_at_u + 1.0) {
            if let Some(fallback) = random_witness(a, u, &mut rng)? {
                if witness.as_ref().is_none_or(|w| fallback.quotient > w.quotient) {
                    witness = Some(fallback);
                }
            }
        }
        if let Some(w) = &witness {
            probes += 1;
            best = best.max(w.quotient);
        }
    }

    let principle_holds = attained_at_u && within_cauchy_bound(best, form_at_u);
    let consistent = match classification {
        Classification::Nonneg | Classification::Zero => principle_holds,
        Classification::Indefinite => witness.as_ref().is_some_and(|w| w.quotient > form_at_u),
        // for A ≤ 0 the principle fails at every u with Au ≠ 0
        Classification::Nonpos => !principle_holds || a.apply(u).amax() <= 1e-12 * a.norm() * u.norm(),
    };
    Ok(PrincipleReport {
        classification,
        quadratic_form_at_u: form_at_u,
        best_quotient: best,
        attained_at_u,
        principle_holds,
        consistent,
        probes,
        degenerate_probes,
        witness,
    })
}

/// Matrix-mode input: `{"schema": "symform/1", "matrix": [[...]], "u": [...]}`.
/// The `schema` tag is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub matrix: Vec<Vec<f64>>,
    pub u: Vec<f64>,
}

pub const MATRIX_INPUT_SCHEMA: &str = "symform/1";

impl MatrixInput {
    pub fn from_json(text: &str) -> Result<Self, PrincipleError> {
        let input: Self = serde_json::from_str(text).map_err(|e| PrincipleError::Input(e.to_string()))?;
        match input.schema.as_deref() {
            None | Some(MATRIX_INPUT_SCHEMA) => Ok(input),
            Some(other) => Err(PrincipleError::Input(format!(
                "unsupported schema `{other}`, expected `{MATRIX_INPUT_SCHEMA}`"
            ))),
        }
    }

    pub fn into_parts(self) -> Result<(SymmetricForm, DVector<f64>), PrincipleError> {
        let form = SymmetricForm::from_rows(&self.matrix)?;
        let u = DVector::from_vec(self.u);
        form.check(&u, "u")?;
        Ok((form, u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(rows: &[&[f64]]) -> SymmetricForm {
        SymmetricForm::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn vec(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    #[test]
    fn identity_quotient() {
        let a = form(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let q = quotient(&a, &vec(&[1.0, 0.0]), &vec(&[1.0, 0.0])).unwrap();
        assert_eq!(q, QuotientValue { value: 1.0, degenerate: false });
    }

    #[test]
    fn maximum_attained_at_u() {
        let a = form(&[&[2.0, 0.0], &[0.0, 3.0]]);
        let u = vec(&[1.0, 1.0]);
        assert_eq!(quotient(&a, &u, &u).unwrap().value, 5.0);
        assert_eq!(a.form(&u, &u), 5.0);
    }

    #[test]
    fn null_direction_is_degenerate() {
        let a = form(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let q = quotient(&a, &vec(&[1.0, 0.0]), &vec(&[1.0, 1.0])).unwrap();
        assert_eq!(q, QuotientValue { value: 0.0, degenerate: true });
    }

    #[test]
    fn quotient_input_errors() {
        let a = form(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(
            quotient(&a, &vec(&[1.0]), &vec(&[1.0, 0.0])),
            Err(PrincipleError::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(
            quotient(&a, &vec(&[1.0, 0.0]), &vec(&[f64::NAN, 0.0])),
            Err(PrincipleError::NonFinite("v"))
        ));
    }

    #[test]
    fn constructor_checks() {
        assert!(matches!(SymmetricForm::from_rows(&[]), Err(PrincipleError::Empty)));
        assert!(matches!(
            SymmetricForm::from_rows(&[vec![1.0, 2.0], vec![3.0]]),
            Err(PrincipleError::NotSquare { row: 1, .. })
        ));
        assert!(matches!(
            SymmetricForm::from_rows(&[vec![1.0, 2.0], vec![2.1, 1.0]]),
            Err(PrincipleError::Asymmetric { .. })
        ));
        let loose = SymmetricForm::with_tolerance(
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.1, 1.0]),
            0.1,
        )
        .unwrap();
        assert_eq!(loose.matrix()[(0, 1)], loose.matrix()[(1, 0)]);
        assert!(SymmetricForm::from_rows(&[vec![f64::INFINITY]]).is_err());
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            classify(&form(&[&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 3.0]])).unwrap(),
            Classification::Nonneg
        );
        assert_eq!(classify(&form(&[&[1.0, 0.0], &[0.0, -1.0]])).unwrap(), Classification::Indefinite);
        assert_eq!(classify(&form(&[&[0.0, 0.0], &[0.0, 0.0]])).unwrap(), Classification::Zero);
        assert_eq!(classify(&form(&[&[-1.0, 0.0], &[0.0, 0.0]])).unwrap(), Classification::Nonpos);
        // round-off sized negative eigenvalue does not make it indefinite
        assert_eq!(classify(&form(&[&[1.0, 0.0], &[0.0, -1e-14]])).unwrap(), Classification::Nonneg);
    }

    #[test]
    fn diagonal_witness_matches_hand_computation() {
        let a = form(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let w = find_witness(&a, &vec(&[1.0, 1.0]), 40, 0.5).unwrap().unwrap();
        assert_eq!(w.z, vec![1.0, 0.0]);
        assert_eq!(w.w, vec![0.0, 1.0]);
        assert_eq!((w.a, w.b, w.c), (1.0, 0.0, -1.0));
        assert_eq!((w.lambda1, w.lambda2), (-1.0, 1.0));
        // the pole at λ₁ = −1 is where p(λ) = (λ − 1)² stays away from zero
        assert!(w.lambda_star < -1.0);
        // δ is ~1e-12 here, so round-off in λ*² − 1 limits agreement to ~1e-4
        let delta = -1.0 - w.lambda_star;
        assert!((w.quotient - (2.0 / delta + 1.0)).abs() <= 1e-3 * w.quotient);
        assert!(w.quotient > 10.0);
        assert!(w.denominator_at(w.lambda_star) > 0.0);
    }

    #[test]
    fn witness_when_au_is_an_eigenvector() {
        let a = form(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let u = vec(&[1.0, 0.0]);
        let w = find_witness(&a, &u, 40, 0.5).unwrap().unwrap();
        assert!(w.quotient >= 100.0 * a.form(&u, &u));
    }

    #[test]
    fn no_witness_for_definite_or_orthogonal_cases() {
        let spd = form(&[&[1.0, 0.0], &[0.0, 2.0]]);
        assert!(find_witness(&spd, &vec(&[0.3, -2.0]), 40, 0.5).unwrap().is_none());
        // Au = 0: p vanishes identically
        let a = form(&[&[1.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert!(find_witness(&a, &vec(&[0.0, 0.0, 1.0]), 40, 0.5).unwrap().is_none());
    }

    #[test]
    fn sweep_arguments_are_validated() {
        let a = form(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let u = vec(&[1.0, 1.0]);
        assert!(find_witness(&a, &u, 0, 0.5).is_err());
        assert!(find_witness(&a, &u, 10, 1.0).is_err());
    }

    #[test]
    fn quadratic_roots_are_accurate() {
        let (l1, l2) = quadratic_roots(1e-8, 1.0, -1.0);
        for l in [l1, l2] {
            let q = 1e-8 * l * l + 2.0 * l - 1.0;
            assert!(q.abs() < 1e-9 * (1.0 + l.abs()), "{l}: {q}");
        }
        assert!(l1 < 0.0 && l2 > 0.0);
    }

    #[test]
    fn report_for_spd_matrix() {
        let a = form(&[&[2.0, 0.0], &[0.0, 3.0]]);
        let r = verify_principle(&a, &vec(&[1.0, 1.0]), 1000, 7).unwrap();
        assert_eq!(r.classification, Classification::Nonneg);
        assert!((r.best_quotient - 5.0).abs() <= 1e-8);
        assert!(r.attained_at_u && r.principle_holds && r.consistent);
        assert!(r.witness.is_none());
        assert_eq!(r.probes, 1001);
    }

    #[test]
    fn report_for_indefinite_matrix() {
        let a = form(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let r = verify_principle(&a, &vec(&[1.0, 1.0]), 100, 1).unwrap();
        assert_eq!(r.classification, Classification::Indefinite);
        assert!(r.witness.as_ref().unwrap().quotient > 10.0);
        assert!(!r.principle_holds && r.consistent);
    }

    #[test]
    fn report_for_zero_operator() {
        let a = form(&[&[0.0, 0.0], &[0.0, 0.0]]);
        let r = verify_principle(&a, &vec(&[1.0, 0.0]), 50, 3).unwrap();
        assert_eq!(r.classification, Classification::Zero);
        assert_eq!(r.best_quotient, 0.0);
        assert_eq!(r.quadratic_form_at_u, 0.0);
        assert_eq!(r.degenerate_probes, r.probes);
        assert!(r.principle_holds && r.consistent);
    }

    #[test]
    fn report_for_negative_operator() {
        let a = form(&[&[-2.0, 0.5], &[0.5, -1.0]]);
        let r = verify_principle(&a, &vec(&[1.0, 0.0]), 200, 3).unwrap();
        assert_eq!(r.classification, Classification::Nonpos);
        assert!(!r.principle_holds && r.consistent);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = form(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let u = vec(&[1.0, 0.0]);
        assert_eq!(
            verify_principle(&a, &u, 300, 42).unwrap(),
            verify_principle(&a, &u, 300, 42).unwrap()
        );
    }

    #[test]
    fn matrix_input_parsing() {
        let input = MatrixInput::from_json(r#"{"schema":"symform/1","matrix":[[0,1],[1,0]],"u":[1,0]}"#).unwrap();
        let (a, u) = input.into_parts().unwrap();
        assert_eq!(a.dim(), 2);
        assert_eq!(u.len(), 2);
        assert!(MatrixInput::from_json(r#"{"schema":"other/2","matrix":[[1]],"u":[1]}"#).is_err());
        assert!(MatrixInput::from_json(r#"{"matrix":[[1]]}"#).is_err());
        let bad_dim = MatrixInput::from_json(r#"{"matrix":[[1]],"u":[1,2]}"#).unwrap();
        assert!(bad_dim.into_parts().is_err());
    }
}
