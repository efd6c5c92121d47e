//! The alternating subset sum of Kronecker powers,
//!
//! ```text
//! L = Σ_{∅ ≠ S ⊆ {1..k}} (-1)^{k-|S|} ⊗^m (Σ_{i∈S} A_i),
//! ```
//!
//! its positivity, its equality with the surjective-word sum, and the
//! eigenvalue bracket for the three-matrix case.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Limits, ORACLE_TOL, PSD_TOL, ZERO_TOL};
use crate::matcore::{derive_seed, hermitian_eigenvalues, kron_power, random_psd_family, GeneralMatrix, HermitianMatrix};
use crate::words::{surjective_count, surjective_word_sum};
use crate::{Error, Result};

/// 2^k subset terms; beyond this the sum is never practical.
pub const MAX_TERMS_K: usize = 24;

/// An inclusion–exclusion operator together with the cancellation-aware scale
/// `max(1, largest |entry| among the subset tensors)`.
#[derive(Debug, Clone)]
pub struct InExOperator {
    pub operator: HermitianMatrix,
    pub scale: f64,
}

pub fn theorem2_operator(mats: &[HermitianMatrix], m: usize, limits: &Limits) -> Result<HermitianMatrix> {
    Ok(theorem2_operator_scaled(mats, m, limits)?.operator)
}

/// Accumulates the subset tensors in increasing subset size, then takes the
/// Hermitian part to drop asymmetric rounding.
pub fn theorem2_operator_scaled(mats: &[HermitianMatrix], m: usize, limits: &Limits) -> Result<InExOperator> {
    let k = mats.len();
    if k == 0 || k > MAX_TERMS_K {
        return Err(Error::InvalidInput(format!(
            "need between 1 and {MAX_TERMS_K} matrices, got {k}"
        )));
    }
    let n = mats[0].n();
    if let Some(bad) = mats.iter().find(|a| a.n() != n) {
        return Err(Error::DimensionMismatch(format!(
            "expected {n}x{n} matrices, found {0}x{0}",
            bad.n()
        )));
    }
    if m == 0 {
        return Err(Error::InvalidInput("tensor power must be >= 1".into()));
    }
    let dim = limits.check_power(n, m)?;

    let mut subsets: Vec<u32> = (1..(1u32 << k)).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));

    let mut acc = GeneralMatrix::zeros(dim, dim);
    let mut scale: f64 = 1.0;
    for subset in subsets {
        let mut partial = GeneralMatrix::zeros(n, n);
        for (i, a) in mats.iter().enumerate() {
            if subset & (1 << i) != 0 {
                partial = partial.add(a.as_general())?;
            }
        }
        let term = kron_power(&partial, m, limits)?;
        scale = scale.max(term.max_abs());
        let sign = if (k - subset.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc.add_scaled_assign(Complex64::new(sign, 0.0), &term)?;
    }
    Ok(InExOperator {
        operator: acc.hermitian_part()?,
        scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InExTolerances {
    pub psd: f64,
    pub oracle: f64,
    pub zero: f64,
}

impl Default for InExTolerances {
    fn default() -> Self {
        Self {
            psd: PSD_TOL,
            oracle: ORACLE_TOL,
            zero: ZERO_TOL,
        }
    }
}

/// One randomized trial of the alternating-sum checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InExReport {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub trial: u64,
    /// Seed the trial's matrices were drawn from.
    pub seed: u64,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub scale: Option<f64>,
    /// `max|L - oracle| / scale`; absent when the oracle leg was skipped.
    pub oracle_residual: Option<f64>,
    pub oracle_skipped: bool,
    /// `max|L| / scale`, recorded when `m < k`.
    pub zero_residual: Option<f64>,
    pub psd_pass: bool,
    pub oracle_pass: bool,
    /// Vacuously true when `m >= k`.
    pub zero_pass: bool,
    pub error: Option<String>,
}

impl InExReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.psd_pass && self.oracle_pass && self.zero_pass
    }
}

/// Runs `trials` seeded trials. Trial `i` draws its matrices from
/// `derive_seed(seed, i)`, so the reports do not depend on the worker pool.
pub fn theorem2_verify(
    n: usize,
    k: usize,
    m: usize,
    trials: u64,
    seed: u64,
    tol: &InExTolerances,
    limits: &Limits,
) -> Result<Vec<InExReport>> {
    if n == 0 || k == 0 || m == 0 {
        return Err(Error::InvalidInput("n, k and m must be >= 1".into()));
    }
    limits.check_power(n, m)?;
    Ok((0..trials)
        .into_par_iter()
        .map(|trial| theorem2_trial(n, k, m, trial, derive_seed(seed, trial), tol, limits))
        .collect())
}

fn theorem2_trial(n: usize, k: usize, m: usize, trial: u64, seed: u64, tol: &InExTolerances, limits: &Limits) -> InExReport {
    let mut report = InExReport {
        n,
        k,
        m,
        trial,
        seed,
        lambda_min: None,
        lambda_max: None,
        scale: None,
        oracle_residual: None,
        oracle_skipped: false,
        zero_residual: None,
        psd_pass: false,
        oracle_pass: false,
        zero_pass: false,
        error: None,
    };
    if let Err(e) = fill_trial(&mut report, tol, limits) {
        report.error = Some(e.to_string());
    }
    report
}

fn fill_trial(report: &mut InExReport, tol: &InExTolerances, limits: &Limits) -> Result<()> {
    let (k, m) = (report.k, report.m);
    let mats = random_psd_family(report.n, k, report.seed);
    let InExOperator { operator, scale } = theorem2_operator_scaled(&mats, m, limits)?;
    report.scale = Some(scale);

    let spectrum = hermitian_eigenvalues(&operator)?;
    report.lambda_min = Some(spectrum.min());
    report.lambda_max = Some(spectrum.max());
    report.psd_pass = spectrum.min() >= -tol.psd * scale;

    report.zero_pass = if m < k {
        let residual = operator.as_general().max_abs() / scale;
        report.zero_residual = Some(residual);
        residual <= tol.zero
    } else {
        true
    };

    if limits.check_words(k, m).is_ok() {
        let oracle = surjective_word_sum(&mats, m, limits)?;
        let residual = operator.as_general().max_abs_diff(oracle.as_general())? / scale;
        report.oracle_residual = Some(residual);
        report.oracle_pass = residual <= tol.oracle;
    } else {
        report.oracle_skipped = true;
        report.oracle_pass = true;
    }
    Ok(())
}

/// The seven-term difference for three matrices.
pub fn theorem1_difference(
    a1: &HermitianMatrix,
    a2: &HermitianMatrix,
    a3: &HermitianMatrix,
    m: usize,
    limits: &Limits,
) -> Result<HermitianMatrix> {
    theorem2_operator(&[a1.clone(), a2.clone(), a3.clone()], m, limits)
}

/// `3 (3^{m-1} - 2^m + 1)`, the number of surjective words on three letters.
pub fn theorem1_count(m: usize) -> Result<u128> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be >= 1".into()));
    }
    let overflow = || Error::Overflow(format!("theorem1_count({m})"));
    let exp = u32::try_from(m).map_err(|_| overflow())?;
    let three = 3i128.checked_pow(exp - 1).ok_or_else(overflow)?;
    let two = 2i128.checked_pow(exp).ok_or_else(overflow)?;
    let n = three.checked_sub(two).and_then(|d| d.checked_add(1)).and_then(|d| d.checked_mul(3));
    n.and_then(|n| u128::try_from(n).ok()).ok_or_else(overflow)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralBounds {
    pub lower: f64,
    pub upper: f64,
    pub count: u128,
}

/// `count · (min_i λ_min(A_i))^m` and `count · (max_i λ_max(A_i))^m` with the
/// closed-form count.
pub fn theorem1_bounds(a1: &HermitianMatrix, a2: &HermitianMatrix, a3: &HermitianMatrix, m: usize) -> Result<SpectralBounds> {
    bounds_with_count(&[a1, a2, a3], m, theorem1_count(m)?)
}

/// The same bracket for any `k`, with the surjective-word count in place of
/// the three-letter closed form. Not a proven statement for `k != 3`.
pub fn surjective_bounds(mats: &[HermitianMatrix], m: usize) -> Result<SpectralBounds> {
    let refs: Vec<&HermitianMatrix> = mats.iter().collect();
    bounds_with_count(&refs, m, surjective_count(mats.len(), m)?)
}

fn bounds_with_count(mats: &[&HermitianMatrix], m: usize, count: u128) -> Result<SpectralBounds> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for a in mats {
        let s = hermitian_eigenvalues(a)?;
        lo = lo.min(s.min());
        hi = hi.max(s.max());
    }
    let exp = i32::try_from(m).map_err(|_| Error::Overflow(format!("exponent {m}")))?;
    let c = count as f64;
    Ok(SpectralBounds {
        lower: c * lo.powi(exp),
        upper: c * hi.powi(exp),
        count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Inside,
    /// Outside the bracket by no more than the slack.
    NumericalMarginal,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub bounds: SpectralBounds,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Cancellation-aware scale of the operator; `slack = psd_tol * scale`.
    pub scale: f64,
    pub slack: f64,
    pub status: BoundStatus,
}

impl BoundCheck {
    pub fn passed(&self) -> bool {
        self.status != BoundStatus::Violation
    }
}

/// Checks that the spectrum of the three-matrix difference lies in
/// `[lower - slack, upper + slack]`, `slack = psd_tol * scale`.
pub fn theorem1_bound_check(
    a1: &HermitianMatrix,
    a2: &HermitianMatrix,
    a3: &HermitianMatrix,
    m: usize,
    psd_tol: f64,
    limits: &Limits,
) -> Result<BoundCheck> {
    let bounds = theorem1_bounds(a1, a2, a3, m)?;
    bound_check(&[a1.clone(), a2.clone(), a3.clone()], m, bounds, psd_tol, limits)
}

/// Bracket check against [`surjective_bounds`] for arbitrary `k`.
pub fn surjective_bound_check(mats: &[HermitianMatrix], m: usize, psd_tol: f64, limits: &Limits) -> Result<BoundCheck> {
    let bounds = surjective_bounds(mats, m)?;
    bound_check(mats, m, bounds, psd_tol, limits)
}

fn bound_check(mats: &[HermitianMatrix], m: usize, bounds: SpectralBounds, psd_tol: f64, limits: &Limits) -> Result<BoundCheck> {
    let InExOperator { operator, scale } = theorem2_operator_scaled(mats, m, limits)?;
    let spectrum = hermitian_eigenvalues(&operator)?;
    let slack = psd_tol * scale;
    let (lambda_min, lambda_max) = (spectrum.min(), spectrum.max());
    let status = if lambda_min >= bounds.lower && lambda_max <= bounds.upper {
        BoundStatus::Inside
    } else if lambda_min >= bounds.lower - slack && lambda_max <= bounds.upper + slack {
        BoundStatus::NumericalMarginal
    } else {
        BoundStatus::Violation
    };
    Ok(BoundCheck {
        bounds,
        lambda_min,
        lambda_max,
        scale,
        slack,
        status,
    })
}
