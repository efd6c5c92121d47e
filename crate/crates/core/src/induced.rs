//! Symmetry classes of tensors and induced operators.
//!
//! `P(σ)` permutes tensor factors, `P(σ)(x_1⊗…⊗x_m) = x_{σ⁻¹(1)}⊗…⊗x_{σ⁻¹(m)}`,
//! so `σ ↦ P(σ)` is a homomorphism. The symmetrizer
//! `T = (χ(e)/|G|) Σ_σ χ(σ) P(σ)` projects onto the symmetry class `V_χ(G)`,
//! and `K(A)` is the compression of `⊗^m A` to an orthonormal basis of it.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Limits, CHAR_TOL, RANK_GAP, RANK_TOL};
use crate::gmf::gmf_evaluate;
use crate::matcore::{kron_power, kron_vec, pivoted_qr, GeneralMatrix, HermitianMatrix};
use crate::symgroup::{validate_character, Character, Permutation, PermutationGroup};
use crate::{Error, Result};

/// Idempotency required of a matrix handed to [`symmetry_class_basis`].
pub const IDEMPOTENCY_TOL: f64 = 1e-8;

/// Lexicographic digits of `index` in base `n`, most significant first.
fn digits(mut index: usize, n: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0; m];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

fn undigits(d: &[usize], n: usize) -> usize {
    d.iter().fold(0, |acc, &x| acc * n + x)
}

/// Row of `P(σ)` holding the single 1 in column `index`.
fn permuted_index(sigma: &Permutation, n: usize, index: usize) -> usize {
    let m = sigma.degree();
    let from = digits(index, n, m);
    let mut to = vec![0; m];
    for (s, &d) in from.iter().enumerate() {
        to[sigma.apply(s)] = d;
    }
    undigits(&to, n)
}

pub fn permutation_operator(sigma: &Permutation, n: usize, limits: &Limits) -> Result<GeneralMatrix> {
    let dim = limits.check_power(n, sigma.degree())?;
    let mut p = GeneralMatrix::zeros(dim, dim);
    for i in 0..dim {
        p[(permuted_index(sigma, n, i), i)] = Complex64::new(1.0, 0.0);
    }
    Ok(p)
}

pub fn symmetrizer(group: &PermutationGroup, chi: &Character, n: usize, limits: &Limits) -> Result<GeneralMatrix> {
    chi.check_group(group)?;
    let dim = limits.check_power(n, group.degree())?;
    let weight = chi.degree() / group.order() as f64;
    let mut t = GeneralMatrix::zeros(dim, dim);
    for (sigma, &c) in group.elements().iter().zip(chi.values()) {
        let coeff = weight * c;
        for i in 0..dim {
            t[(permuted_index(sigma, n, i), i)] += coeff;
        }
    }
    Ok(t)
}

/// Orthonormal basis of the range of an idempotent matrix.
#[derive(Debug, Clone)]
pub struct ClassBasis {
    /// `dim x d` with orthonormal columns; `None` when `d = 0`.
    pub basis: Option<GeneralMatrix>,
    /// `|R_ii|` of the pivoted QR factorization, non-increasing.
    pub rank_profile: Vec<f64>,
}

impl ClassBasis {
    pub fn dimension(&self) -> usize {
        self.basis.as_ref().map_or(0, |b| b.cols())
    }
}

/// Range basis from a column-pivoted QR factorization, keeping the columns
/// whose `|R_ii|` exceeds `rank_tol * max(1, |R_11|)`. The floor keeps
/// rounding dust such as `exp(iπ) + 1` from passing as a one-dimensional
/// range. A kept/dropped ratio below [`RANK_GAP`] means there is no clean
/// rank and is reported as [`Error::DegenerateRank`].
pub fn symmetry_class_basis(t: &GeneralMatrix, rank_tol: f64) -> Result<ClassBasis> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch("symmetrizer must be square".into()));
    }
    let idem = t.matmul(t)?.max_abs_diff(t)?;
    if idem > IDEMPOTENCY_TOL * t.max_abs().max(1.0) {
        return Err(Error::InvalidInput(format!("matrix is not idempotent: |T² - T| = {idem:e}")));
    }
    let (profile, q) = pivoted_qr(t);
    let top = profile.first().copied().unwrap_or(0.0);
    let d = profile.iter().take_while(|&&r| r > rank_tol * top.max(1.0)).count();
    if d > 0 && d < profile.len() && profile[d - 1] < RANK_GAP * profile[d] {
        return Err(Error::DegenerateRank { profile });
    }
    let basis = (d > 0).then(|| GeneralMatrix::from_fn(t.rows(), d, |i, j| q[(i, j)]));
    if let Some(b) = &basis {
        let orth = b.adjoint().matmul(b)?.max_abs_diff(&GeneralMatrix::identity(d))?;
        let drift = t.matmul(b)?.max_abs_diff(b)?;
        if orth > 1e-10 || drift > IDEMPOTENCY_TOL {
            return Err(Error::NumericalFailure(format!(
                "class basis off by {orth:e} (orthonormality), {drift:e} (range)"
            )));
        }
    }
    Ok(ClassBasis {
        basis,
        rank_profile: profile,
    })
}

/// `V_χ(G)` inside `(C^n)^{⊗m}` with an orthonormal basis.
#[derive(Debug, Clone)]
pub struct SymmetryClass {
    n: usize,
    group: Arc<PermutationGroup>,
    character: Character,
    symmetrizer: GeneralMatrix,
    basis: ClassBasis,
}

impl SymmetryClass {
    pub fn new(group: Arc<PermutationGroup>, character: Character, n: usize, limits: &Limits) -> Result<Self> {
        let symmetrizer = symmetrizer(&group, &character, n, limits)?;
        let basis = symmetry_class_basis(&symmetrizer, RANK_TOL)?;
        Ok(Self {
            n,
            group,
            character,
            symmetrizer,
            basis,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.group.degree()
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    pub fn basis(&self) -> Option<&GeneralMatrix> {
        self.basis.basis.as_ref()
    }

    pub fn symmetrizer(&self) -> &GeneralMatrix {
        &self.symmetrizer
    }

    pub fn group(&self) -> &PermutationGroup {
        &self.group
    }

    pub fn character(&self) -> &Character {
        &self.character
    }
}

/// `K(A) = basis^H (⊗^m A) basis`, a `d x d` matrix.
pub fn induced_operator(a: &GeneralMatrix, class: &SymmetryClass, limits: &Limits) -> Result<GeneralMatrix> {
    if !a.is_square() || a.rows() != class.n {
        return Err(Error::DimensionMismatch(format!(
            "induced operator of a {}x{} matrix on a class over C^{}",
            a.rows(),
            a.cols(),
            class.n
        )));
    }
    let basis = class
        .basis()
        .ok_or_else(|| Error::InvalidInput("symmetry class is zero-dimensional".into()))?;
    let power = kron_power(a, class.m(), limits)?;
    basis.adjoint().matmul(&power.matmul(basis)?)
}

/// `K(A1+A2+A3) + K(A1) + K(A2) + K(A3) - K(A1+A2) - K(A1+A3) - K(A2+A3)`.
pub fn induced_difference3(
    a1: &HermitianMatrix,
    a2: &HermitianMatrix,
    a3: &HermitianMatrix,
    class: &SymmetryClass,
    limits: &Limits,
) -> Result<HermitianMatrix> {
    let k = |a: &HermitianMatrix| induced_operator(a.as_general(), class, limits);
    let a12 = a1.add(a2)?;
    let a13 = a1.add(a3)?;
    let a23 = a2.add(a3)?;
    let a123 = a12.add(a3)?;
    let mut acc = k(&a123)?;
    let one = Complex64::new(1.0, 0.0);
    for a in [a1, a2, a3] {
        acc.add_scaled_assign(one, &k(a)?)?;
    }
    for a in [&a12, &a13, &a23] {
        acc.add_scaled_assign(-one, &k(a)?)?;
    }
    acc.hermitian_part()
}

/// `T(G, χ)(x_1 ⊗ … ⊗ x_m)`, unnormalized.
pub fn star_tensor(vectors: &[Vec<Complex64>], group: &PermutationGroup, chi: &Character, limits: &Limits) -> Result<Vec<Complex64>> {
    chi.check_group(group)?;
    let m = group.degree();
    if vectors.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} vectors for a group of degree {m}",
            vectors.len()
        )));
    }
    let n = vectors[0].len();
    if n == 0 || vectors.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch("vectors must share a positive length".into()));
    }
    let dim = limits.check_power(n, m)?;
    let weight = chi.degree() / group.order() as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (sigma, &c) in group.elements().iter().zip(chi.values()) {
        let inv = sigma.inverse();
        let mut product = vectors[inv.apply(0)].clone();
        for t in 1..m {
            product = kron_vec(&product, &vectors[inv.apply(t)]);
        }
        let coeff = weight * c;
        for (o, p) in out.iter_mut().zip(&product) {
            *o += coeff * p;
        }
    }
    Ok(out)
}

/// `⟨u, v⟩ = Σ u_i conj(v_i)`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BridgingReport {
    /// `d_χ^G(Mᵀ)`.
    pub lhs: [f64; 2],
    /// `(|G| / χ(e)) ⟨(⊗^m M) e*, e*⟩`.
    pub rhs: [f64; 2],
    /// `|lhs - rhs| / max(1, |lhs|)`.
    pub residual: f64,
    /// `e*` vanished, so the right side carries no information.
    pub degenerate: bool,
    pub passed: bool,
}

/// Evaluates both sides of the identity linking the generalized matrix
/// function to the induced operator, with `e*` the symmetrized standard basis
/// of `C^m`.
pub fn bridging_identity_check(
    m_mat: &GeneralMatrix,
    group: &PermutationGroup,
    chi: &Character,
    tol: f64,
    limits: &Limits,
) -> Result<BridgingReport> {
    let m = group.degree();
    if !m_mat.is_square() || m_mat.rows() != m {
        return Err(Error::DimensionMismatch(format!(
            "bridging identity needs an {m}x{m} matrix, got {}x{}",
            m_mat.rows(),
            m_mat.cols()
        )));
    }
    let validation = validate_character(chi, group, CHAR_TOL)?;
    if !chi.claims_irreducible() || !validation.passed() {
        return Err(Error::InvalidInput(format!(
            "character {} is not a validated irreducible character",
            chi.label()
        )));
    }

    let lhs = gmf_evaluate(&m_mat.transpose(), group, chi)?;

    let basis: Vec<Vec<Complex64>> = (0..m)
        .map(|i| (0..m).map(|j| Complex64::new(f64::from(u8::from(i == j)), 0.0)).collect())
        .collect();
    let e_star = star_tensor(&basis, group, chi, limits)?;
    let degenerate = e_star.iter().all(|z| z.norm() == 0.0);
    let image = kron_power(m_mat, m, limits)?.mul_vec(&e_star)?;
    let rhs = inner(&image, &e_star) * (group.order() as f64) / chi.degree();

    let residual = (lhs - rhs).norm() / lhs.norm().max(1.0);
    Ok(BridgingReport {
        lhs: [lhs.re, lhs.im],
        rhs: [rhs.re, rhs.im],
        residual,
        degenerate,
        passed: !degenerate && residual <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DEFAULT_ORDER_CAP;
    use crate::gmf::determinant;
    use crate::matcore::{hermitian_eigenvalues, random_complex_gaussian, random_psd};
    use crate::symgroup::{builtin_character, builtin_group, CharSpec};
    use rand::SeedableRng;

    fn l() -> Limits {
        Limits::default()
    }

    fn setup(spec: &str, chi: CharSpec) -> (Arc<PermutationGroup>, Character) {
        let g = Arc::new(builtin_group(&spec.parse().unwrap(), None, DEFAULT_ORDER_CAP).unwrap());
        let c = builtin_character(&g, &chi).unwrap();
        (g, c)
    }

    fn e(n: usize, i: usize) -> Vec<Complex64> {
        (0..n).map(|j| Complex64::new(f64::from(u8::from(i == j)), 0.0)).collect()
    }

    #[test]
    fn identity_and_swap_operators() {
        let id = Permutation::identity(3);
        assert_eq!(permutation_operator(&id, 2, &l()).unwrap(), GeneralMatrix::identity(8));

        let swap = Permutation::from_images(&[2, 1]).unwrap();
        let p = permutation_operator(&swap, 2, &l()).unwrap();
        let out = p.mul_vec(&kron_vec(&e(2, 0), &e(2, 1))).unwrap();
        assert_eq!(out, kron_vec(&e(2, 1), &e(2, 0)));
    }

    #[test]
    fn operator_moves_factors() {
        // P(σ) puts factor s in slot σ(s).
        let sigma = Permutation::from_images(&[2, 3, 1]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let xs: Vec<Vec<Complex64>> = (0..3).map(|_| random_complex_gaussian(2, 1, &mut rng).col(0)).collect();
        let input = kron_vec(&kron_vec(&xs[0], &xs[1]), &xs[2]);
        let inv = sigma.inverse();
        let expected = kron_vec(&kron_vec(&xs[inv.apply(0)], &xs[inv.apply(1)]), &xs[inv.apply(2)]);
        let got = permutation_operator(&sigma, 2, &l()).unwrap().mul_vec(&input).unwrap();
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn homomorphism_on_s3() {
        let (g, _) = setup("sym:3", CharSpec::Trivial);
        for s in g.elements() {
            let ps = permutation_operator(s, 2, &l()).unwrap();
            assert_eq!(permutation_operator(&s.inverse(), 2, &l()).unwrap(), ps.transpose());
            for t in g.elements() {
                let lhs = permutation_operator(&s.compose(t).unwrap(), 2, &l()).unwrap();
                let rhs = ps.matmul(&permutation_operator(t, 2, &l()).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn symmetrizer_examples() {
        let (g, c) = setup("trivial:3", CharSpec::Trivial);
        assert_eq!(symmetrizer(&g, &c, 2, &l()).unwrap(), GeneralMatrix::identity(8));

        let (g, c) = setup("sym:2", CharSpec::Sign);
        let t = symmetrizer(&g, &c, 2, &l()).unwrap();
        assert!((t.trace() - 1.0).norm() < 1e-15);
        let class = symmetry_class_basis(&t, RANK_TOL).unwrap();
        assert_eq!(class.dimension(), 1);
        // span of e1⊗e2 - e2⊗e1
        let b = class.basis.unwrap().col(0);
        assert!(b[0].norm() < 1e-14 && b[3].norm() < 1e-14);
        assert!((b[1] + b[2]).norm() < 1e-14 && (b[1].norm() - 0.5f64.sqrt()).abs() < 1e-14);

        let (g, c) = setup("sym:3", CharSpec::Sign);
        let t = symmetrizer(&g, &c, 2, &l()).unwrap();
        assert!(t.max_abs() < 1e-15);
        assert_eq!(symmetry_class_basis(&t, RANK_TOL).unwrap().dimension(), 0);
    }

    #[test]
    fn basis_edge_cases() {
        let b = symmetry_class_basis(&GeneralMatrix::identity(4), RANK_TOL).unwrap();
        assert_eq!(b.dimension(), 4);
        assert!(symmetry_class_basis(&GeneralMatrix::diag_real(&[1.0, 0.5]), RANK_TOL).is_err());
        // idempotent but with a blurred gap
        let t = GeneralMatrix::diag_real(&[1.0, 1e-10]);
        assert_eq!(symmetry_class_basis(&t, RANK_TOL).unwrap().dimension(), 1);
        let t = GeneralMatrix::diag_real(&[1.0, 5e-9, 1e-9]);
        assert!(matches!(symmetry_class_basis(&t, RANK_TOL), Err(Error::DegenerateRank { .. })));
    }

    #[test]
    fn top_exterior_power_is_det() {
        for m in 2..=3 {
            let (g, c) = setup(&format!("sym:{m}"), CharSpec::Sign);
            let class = SymmetryClass::new(g, c, m, &l()).unwrap();
            assert_eq!(class.dimension(), 1);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(m as u64);
            let a = random_complex_gaussian(m, m, &mut rng);
            let k = induced_operator(&a, &class, &l()).unwrap();
            assert!((k[(0, 0)] - determinant(&a).unwrap()).norm() < 1e-9);
        }
        let (g, c) = setup("sym:2", CharSpec::Sign);
        let class = SymmetryClass::new(g, c, 2, &l()).unwrap();
        let a = GeneralMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let k = induced_operator(&a, &class, &l()).unwrap();
        assert!((k[(0, 0)] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn induced_identity_and_multiplicativity() {
        let (g, c) = setup("sym:2", CharSpec::Sign);
        let class = SymmetryClass::new(g, c, 2, &l()).unwrap();
        let d = class.dimension();
        let k = induced_operator(&GeneralMatrix::identity(2), &class, &l()).unwrap();
        assert!(k.max_abs_diff(&GeneralMatrix::identity(d)).unwrap() < 1e-12);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let a = random_complex_gaussian(2, 2, &mut rng);
        let b = random_complex_gaussian(2, 2, &mut rng);
        let ka_kb = induced_operator(&a, &class, &l()).unwrap().matmul(&induced_operator(&b, &class, &l()).unwrap()).unwrap();
        let kab = induced_operator(&a.matmul(&b).unwrap(), &class, &l()).unwrap();
        assert!(ka_kb.max_abs_diff(&kab).unwrap() < 1e-10);
    }

    #[test]
    fn empty_class_rejects_induced_operator() {
        let (g, c) = setup("sym:3", CharSpec::Sign);
        let class = SymmetryClass::new(g, c, 2, &l()).unwrap();
        assert_eq!(class.dimension(), 0);
        assert!(induced_operator(&GeneralMatrix::identity(2), &class, &l()).is_err());
    }

    #[test]
    fn star_tensor_examples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<Vec<Complex64>> = (0..2).map(|_| random_complex_gaussian(3, 1, &mut rng).col(0)).collect();
        let (g, c) = setup("trivial:2", CharSpec::Trivial);
        assert_eq!(star_tensor(&xs, &g, &c, &l()).unwrap(), kron_vec(&xs[0], &xs[1]));

        let (g, c) = setup("sym:2", CharSpec::Sign);
        let s = star_tensor(&[e(2, 0), e(2, 1)], &g, &c, &l()).unwrap();
        let expected = [0.0, 0.5, -0.5, 0.0];
        for (got, want) in s.iter().zip(expected) {
            assert!((got - want).norm() < 1e-15);
        }
        assert!((inner(&s, &s).re - 0.5).abs() < 1e-15);

        let z = star_tensor(&[e(2, 0), e(2, 0)], &g, &c, &l()).unwrap();
        assert!(z.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn bridging_calibration_det() {
        let (g, c) = setup("sym:2", CharSpec::Sign);
        let r = bridging_identity_check(&GeneralMatrix::identity(2), &g, &c, 1e-8, &l()).unwrap();
        assert!(r.passed);
        assert!((r.lhs[0] - 1.0).abs() < 1e-15 && (r.rhs[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bridging_permanent_2x2() {
        let (g, c) = setup("sym:2", CharSpec::Trivial);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let mm = random_complex_gaussian(2, 2, &mut rng);
        let per = mm[(0, 0)] * mm[(1, 1)] + mm[(0, 1)] * mm[(1, 0)];
        let r = bridging_identity_check(&mm, &g, &c, 1e-8, &l()).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((Complex64::new(r.lhs[0], r.lhs[1]) - per).norm() < 1e-12);
    }

    #[test]
    fn bridging_complex_character_needs_transpose() {
        let (g, c) = setup("cyclic:3", CharSpec::Omega(1));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mm = random_complex_gaussian(3, 3, &mut rng);
        let r = bridging_identity_check(&mm, &g, &c, 1e-8, &l()).unwrap();
        assert!(r.passed, "{r:?}");
        // Without the transpose the two sides differ for complex χ.
        let untransposed = gmf_evaluate(&mm, &g, &c).unwrap();
        assert!((untransposed - Complex64::new(r.rhs[0], r.rhs[1])).norm() > 1e-3);
    }

    #[test]
    fn bridging_rejects_reducible() {
        let (g, c) = setup("sym:2", CharSpec::Trivial);
        let reducible = c.scaled(2.0);
        assert!(bridging_identity_check(&GeneralMatrix::identity(2), &g, &reducible, 1e-8, &l()).is_err());
    }

    #[test]
    fn induced_difference_is_psd() {
        let (g, c) = setup("sym:3", CharSpec::Trivial);
        let class = SymmetryClass::new(g, c, 2, &l()).unwrap();
        for seed in 0..5 {
            let (a, b, d) = (random_psd(2, 2, seed), random_psd(2, 1, seed + 50), random_psd(2, 2, seed + 99));
            let diff = induced_difference3(&a, &b, &d, &class, &l()).unwrap();
            let s = hermitian_eigenvalues(&diff).unwrap();
            assert!(s.min() >= -1e-8 * s.spectral_radius().max(1.0));
        }
    }
}
