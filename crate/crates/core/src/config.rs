//! Tolerances and size limits shared by every module.
//!
//! All tolerances are relative: callers multiply them by a scale that is
//! at least one.

/// Conjugate-symmetry tolerance for Hermitian validation.
pub const HERM_TOL: f64 = 1e-12;
/// Eigenvalue accuracy, relative to `1 + spectral radius`.
pub const EIG_TOL: f64 = 1e-10;
/// Positivity slack on the smallest eigenvalue.
pub const PSD_TOL: f64 = 1e-8;
/// Max-norm agreement between the alternating sum and the word-sum oracle.
pub const ORACLE_TOL: f64 = 1e-9;
/// Entrywise threshold for operators that must vanish.
pub const ZERO_TOL: f64 = 1e-10;
/// Character-value tolerance (class function, degree, norm).
pub const CHAR_TOL: f64 = 1e-12;
/// Relative cutoff on the pivoted-QR rank profile of a symmetrizer.
pub const RANK_TOL: f64 = 1e-9;
/// Minimum ratio between the last kept and first dropped rank-profile entry.
pub const RANK_GAP: f64 = 1e3;

pub const DEFAULT_MAX_DIM: usize = 4096;
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;
/// 8!
pub const DEFAULT_ORDER_CAP: usize = 40_320;

/// Size guards applied to Kronecker powers, word enumeration and group closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Limits {
    pub max_dim: usize,
    pub enum_cap: u64,
    pub order_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_dim: DEFAULT_MAX_DIM,
            enum_cap: DEFAULT_ENUM_CAP,
            order_cap: DEFAULT_ORDER_CAP,
        }
    }
}

impl Limits {
    /// `Ok(n^m)` when the power fits under `max_dim`.
    pub fn check_power(&self, n: usize, m: usize) -> crate::Result<usize> {
        let dim = checked_pow(n as u128, m).unwrap_or(u128::MAX);
        self.check_dim(dim)
    }

    pub fn check_dim(&self, dim: u128) -> crate::Result<usize> {
        if dim > self.max_dim as u128 {
            return Err(crate::Error::SizeLimit {
                dim,
                max_dim: self.max_dim,
            });
        }
        Ok(dim as usize)
    }

    /// `Ok(k^m)` when the word count fits under `enum_cap`.
    pub fn check_words(&self, k: usize, m: usize) -> crate::Result<u64> {
        let count = checked_pow(k as u128, m).unwrap_or(u128::MAX);
        if count > self.enum_cap as u128 {
            return Err(crate::Error::CapExceeded {
                count,
                cap: self.enum_cap,
            });
        }
        Ok(count as u64)
    }
}

pub(crate) fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}
