//! Inclusion–exclusion inequalities for Kronecker powers of positive
//! semidefinite matrices, and the generalized matrix functions they bound.
//!
//! Module map:
//! - [`matcore`]: dense complex matrices, Kronecker products, Hermitian spectra.
//! - [`words`]: tensor words, surjective-word counting and sums.
//! - [`inexcl`]: the alternating subset-sum operator and its checks.
//! - [`symgroup`]: permutations, permutation groups, characters.
//! - [`gmf`]: generalized matrix functions and superadditivity gaps.
//! - [`induced`]: symmetry classes of tensors and induced operators.

pub mod config;
mod error;
pub mod gmf;
pub mod inexcl;
pub mod induced;
pub mod matcore;
pub mod symgroup;
pub mod words;

pub use error::{Error, Result};
pub use num_complex::Complex64;
