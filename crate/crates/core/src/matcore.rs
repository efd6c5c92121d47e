//! Dense complex matrices, Kronecker products and Hermitian spectra.
//!
//! Matrices are stored row-major. Kronecker products use the lexicographic
//! index convention with the left factor most significant: row `(i_a, i_b)`
//! of `A ⊗ B` is `i_a * rows(B) + i_b`. Every module that builds tensors on
//! `(C^n)^{⊗m}` relies on this convention.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::config::{Limits, HERM_TOL};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl GeneralMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = ONE;
        }
        out
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = f(i, j);
            }
        }
        out
    }

    /// Builds a matrix from nested real rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut out = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            out[(i, i)] = Complex64::new(v, 0.0);
        }
        out
    }

    /// Single-column matrix.
    pub fn column(values: &[Complex64]) -> Self {
        Self::from_fn(values.len(), 1, |i, _| values[i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// `self += c * other`
    pub fn add_scaled_assign(&mut self, c: Complex64, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(l)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise max-norm of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `(A + A^H) / 2`.
    pub fn hermitian_part(&self) -> Result<HermitianMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "hermitian part of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let sym = Self::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        Ok(HermitianMatrix(sym))
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for GeneralMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for GeneralMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

/// A square matrix equal to its conjugate transpose within `HERM_TOL * scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(GeneralMatrix);

impl HermitianMatrix {
    /// Validates conjugate symmetry; the stored matrix is the input unchanged.
    pub fn new(m: GeneralMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows, m.cols
            )));
        }
        let tol = HERM_TOL * m.max_abs().max(1.0);
        for i in 0..m.rows {
            for j in i..m.cols {
                let deviation = (m[(i, j)] - m[(j, i)].conj()).norm();
                if deviation > tol {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(GeneralMatrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(GeneralMatrix::zeros(n, n))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self(GeneralMatrix::diag_real(values))
    }

    pub fn n(&self) -> usize {
        self.0.rows
    }

    pub fn as_general(&self) -> &GeneralMatrix {
        &self.0
    }

    pub fn into_general(self) -> GeneralMatrix {
        self.0
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.add(&other.0)?))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.scale(Complex64::new(c, 0.0)))
    }

    /// `U A U^H`.
    pub fn conjugate_by(&self, u: &GeneralMatrix) -> Result<Self> {
        let out = u.matmul(&self.0)?.matmul(&u.adjoint())?;
        out.hermitian_part()
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

/// Real eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn source_dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn spectral_radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }
}

/// `A ⊗ B`, checked against `limits.max_dim` on both output dimensions.
pub fn kron(a: &GeneralMatrix, b: &GeneralMatrix, limits: &Limits) -> Result<GeneralMatrix> {
    let rows = limits.check_dim(a.rows as u128 * b.rows as u128)?;
    let cols = limits.check_dim(a.cols as u128 * b.cols as u128)?;
    let mut out = GeneralMatrix::zeros(rows, cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let s = a[(ia, ja)];
            if s == ZERO {
                continue;
            }
            for ib in 0..b.rows {
                let dst = (ia * b.rows + ib) * cols + ja * b.cols;
                for (o, &x) in out.data[dst..dst + b.cols].iter_mut().zip(b.row(ib)) {
                    *o = s * x;
                }
            }
        }
    }
    Ok(out)
}

/// `A ⊗ A ⊗ ... ⊗ A` (`m` factors, left-associated).
pub fn kron_power(a: &GeneralMatrix, m: usize, limits: &Limits) -> Result<GeneralMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Kronecker power of a non-square {}x{} matrix",
            a.rows, a.cols
        )));
    }
    if m == 0 {
        return Err(Error::InvalidInput("Kronecker power needs m >= 1".into()));
    }
    limits.check_power(a.rows, m)?;
    let mut acc = a.clone();
    for _ in 1..m {
        acc = kron(&acc, a, limits)?;
    }
    Ok(acc)
}

/// Kronecker product of vectors, same index convention as [`kron`].
pub fn kron_vec(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    x.iter().flat_map(|&a| y.iter().map(move |&b| a * b)).collect()
}

fn eigen_iteration_cap(n: usize) -> usize {
    1000 + 100 * n
}

fn symmetric_eigen(a: &HermitianMatrix) -> Result<nalgebra::SymmetricEigen<Complex64, nalgebra::Dyn>> {
    let n = a.n();
    nalgebra::SymmetricEigen::try_new(a.0.to_nalgebra(), f64::EPSILON, eigen_iteration_cap(n))
        .ok_or_else(|| {
            Error::NumericalFailure(format!(
                "Hermitian eigensolver did not converge for n = {n}"
            ))
        })
}

pub fn hermitian_eigenvalues(a: &HermitianMatrix) -> Result<Spectrum> {
    let eig = symmetric_eigen(a)?;
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
    }
    eigenvalues.sort_by(f64::total_cmp);
    Ok(Spectrum { eigenvalues })
}

/// Outcome of a positivity test.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdWitness {
    pub is_psd: bool,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Unit eigenvector for `lambda_min`, present only when the test fails.
    pub direction: Option<Vec<Complex64>>,
}

/// `λ_min(A) >= -tol * max(1, |λ|_max)`.
pub fn is_psd(a: &HermitianMatrix, tol: f64) -> Result<PsdWitness> {
    let eig = symmetric_eigen(a)?;
    let (imin, lambda_min) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("n >= 1");
    let lambda_max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lambda_min.is_finite() || !lambda_max.is_finite() {
        return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
    }
    let scale = lambda_min.abs().max(lambda_max.abs()).max(1.0);
    let is_psd = lambda_min >= -tol * scale;
    let direction = (!is_psd).then(|| eig.eigenvectors.column(imin).iter().copied().collect());
    Ok(PsdWitness {
        is_psd,
        lambda_min,
        lambda_max,
        direction,
    })
}

/// Fails with [`Error::NotPsd`] carrying the offending direction.
pub fn require_psd(a: &HermitianMatrix, tol: f64) -> Result<()> {
    let w = is_psd(a, tol)?;
    if w.is_psd {
        Ok(())
    } else {
        Err(Error::NotPsd {
            lambda_min: w.lambda_min,
            direction: w.direction.unwrap_or_default(),
        })
    }
}

/// `B B^H` with `B` an `n x rank` matrix of standard complex Gaussians
/// drawn from a ChaCha8 stream seeded by `seed`.
pub fn random_psd(n: usize, rank: usize, seed: u64) -> HermitianMatrix {
    assert!(n >= 1, "random_psd needs n >= 1");
    assert!(rank <= n, "rank {rank} exceeds dimension {n}");
    if rank == 0 {
        return HermitianMatrix::zeros(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = random_complex_gaussian(n, rank, &mut rng);
    let gram = GeneralMatrix::from_fn(n, n, |i, j| {
        b.row(i).iter().zip(b.row(j)).map(|(&x, &y)| x * y.conj()).sum()
    });
    HermitianMatrix(gram)
}

/// Child seed for stream `index` of `base`. Used so that trial `i` of a
/// campaign draws the same inputs regardless of scheduling.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    use rand::RngCore;
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    rng.next_u64()
}

/// `count` random PSD matrices of size `n`, each with a rank drawn from `1..=n`.
pub fn random_psd_family(n: usize, count: usize, seed: u64) -> Vec<HermitianMatrix> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let rank = rng.random_range(1..=n);
            random_psd(n, rank, derive_seed(seed, i as u64))
        })
        .collect()
}

/// Entries with independent `N(0, 1/2)` real and imaginary parts, row-major.
pub fn random_complex_gaussian<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> GeneralMatrix {
    let mut sample = || -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        z * FRAC_1_SQRT_2
    };
    GeneralMatrix::from_fn(rows, cols, |_, _| {
        let re = sample();
        let im = sample();
        Complex64::new(re, im)
    })
}

pub fn seeded_complex_gaussian(rows: usize, cols: usize, seed: u64) -> GeneralMatrix {
    random_complex_gaussian(rows, cols, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Householder QR with column pivoting, `A P = Q R`. Returns `|R_ii|`
/// (non-increasing, a rank profile) and the `rows x min(rows, cols)` factor
/// `Q` with orthonormal columns. The leading `r` columns of `Q` span the range
/// of `A` when `A` has rank `r`.
pub fn pivoted_qr(a: &GeneralMatrix) -> (Vec<f64>, GeneralMatrix) {
    let qr = a.to_nalgebra().col_piv_qr();
    let r = qr.r();
    let q = qr.q();
    let profile = (0..r.nrows().min(r.ncols())).map(|i| r[(i, i)].norm()).collect();
    (profile, GeneralMatrix::from_fn(q.nrows(), q.ncols(), |i, j| q[(i, j)]))
}

/// On-disk matrix format: `{"rows": r, "cols": c, "entries": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl From<&GeneralMatrix> for MatrixJson {
    fn from(m: &GeneralMatrix) -> Self {
        Self {
            rows: m.rows,
            cols: m.cols,
            entries: (0..m.rows)
                .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<MatrixJson> for GeneralMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
            return Err(Error::Parse(format!(
                "entries do not form a {}x{} array",
                j.rows, j.cols
            )));
        }
        let data: Vec<Complex64> = j
            .entries
            .iter()
            .flatten()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parse("non-finite matrix entry".into()));
        }
        GeneralMatrix::new(j.rows, j.cols, data)
    }
}

impl TryFrom<MatrixJson> for HermitianMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        HermitianMatrix::new(GeneralMatrix::try_from(j)?)
    }
}
