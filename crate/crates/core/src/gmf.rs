//! Generalized matrix functions `d_χ^G(X) = Σ_{σ∈G} χ(σ) Π_t x_{t,σ(t)}`
//! and the superadditivity gaps they satisfy on positive semidefinite inputs.

use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::CHAR_TOL;
use crate::matcore::{require_psd, GeneralMatrix, HermitianMatrix};
use crate::symgroup::{validate_character, CharSpec, Character, CheckOutcome, GroupKind, GroupSpec, PermutationGroup};
use crate::{Error, Result};

/// Ryser's sum visits 2^m subsets.
pub const MAX_PERMANENT_DIM: usize = 30;

fn check_square(x: &GeneralMatrix) -> Result<usize> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(x.rows())
}

/// The defining sum over the group elements.
pub fn gmf_evaluate(x: &GeneralMatrix, group: &PermutationGroup, chi: &Character) -> Result<Complex64> {
    let m = check_square(x)?;
    if m != group.degree() {
        return Err(Error::DimensionMismatch(format!(
            "{m}x{m} matrix against a group of degree {}",
            group.degree()
        )));
    }
    chi.check_group(group)?;
    let mut total = Complex64::new(0.0, 0.0);
    for (sigma, &c) in group.elements().iter().zip(chi.values()) {
        let product: Complex64 = (0..m).map(|t| x[(t, sigma.apply(t))]).product();
        total += c * product;
    }
    Ok(total)
}

/// Determinant by LU factorization with partial pivoting.
pub fn determinant(x: &GeneralMatrix) -> Result<Complex64> {
    let n = check_square(x)?;
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|i| x.row(i).to_vec()).collect();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .expect("non-empty range");
        if a[pivot][col].norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for row in col + 1..n {
            let factor = a[row][col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            let (top, bottom) = a.split_at_mut(row);
            for (dst, &v) in bottom[0][col + 1..].iter_mut().zip(&top[col][col + 1..]) {
                *dst -= factor * v;
            }
        }
    }
    Ok(det)
}

/// Permanent by Ryser's formula, walking subsets in Gray-code order so each
/// step updates the row sums by a single column.
pub fn permanent(x: &GeneralMatrix) -> Result<Complex64> {
    let n = check_square(x)?;
    if n > MAX_PERMANENT_DIM {
        return Err(Error::InvalidInput(format!(
            "permanent limited to {MAX_PERMANENT_DIM}x{MAX_PERMANENT_DIM}"
        )));
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut in_set = vec![false; n];
    let mut set_size = 0usize;
    let mut total = Complex64::new(0.0, 0.0);
    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize;
        let sign = if in_set[j] { -1.0 } else { 1.0 };
        in_set[j] = !in_set[j];
        if in_set[j] {
            set_size += 1;
        } else {
            set_size -= 1;
        }
        for (i, s) in row_sums.iter_mut().enumerate() {
            *s += x[(i, j)] * sign;
        }
        let product: Complex64 = row_sums.iter().product();
        if (n - set_size).is_multiple_of(2) {
            total += product;
        } else {
            total -= product;
        }
    }
    Ok(total)
}

/// A matrix functional accepted by the gap computations.
#[derive(Debug, Clone)]
pub enum MatrixFunctional {
    Det,
    Per,
    Gmf {
        group: Arc<PermutationGroup>,
        character: Character,
    },
}

impl MatrixFunctional {
    /// Validates the character: class function and integral degree always,
    /// irreducibility unless `allow_reducible`.
    pub fn gmf(group: Arc<PermutationGroup>, character: Character, allow_reducible: bool) -> Result<Self> {
        if !allow_reducible && !character.claims_irreducible() {
            return Err(Error::InvalidInput(format!(
                "character {} is not marked irreducible",
                character.label()
            )));
        }
        let report = validate_character(&character, &group, CHAR_TOL)?;
        let blocking = |c: &&CheckOutcome| !c.passed && !(allow_reducible && c.name == "irreducible");
        if let Some(failed) = report.checks.iter().find(blocking) {
            return Err(Error::InvalidInput(format!(
                "character {} failed the {} check (value {})",
                character.label(),
                failed.name,
                failed.value
            )));
        }
        Ok(Self::Gmf { group, character })
    }

    /// `None` for det and per, which accept any square size.
    pub fn arity(&self) -> Option<usize> {
        match self {
            Self::Det | Self::Per => None,
            Self::Gmf { group, .. } => Some(group.degree()),
        }
    }

    pub fn evaluate(&self, x: &GeneralMatrix) -> Result<Complex64> {
        match self {
            Self::Det => determinant(x),
            Self::Per => permanent(x),
            Self::Gmf { group, character } => gmf_evaluate(x, group, character),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Det => "det".into(),
            Self::Per => "per".into(),
            Self::Gmf { group, character } => {
                let kind = match group.kind() {
                    GroupKind::Symmetric => "sym",
                    GroupKind::Alternating => "alt",
                    GroupKind::Cyclic => "cyclic",
                    GroupKind::Trivial => "trivial",
                    GroupKind::Generated => "gens",
                };
                format!("gmf:{kind}:{}:{}", group.degree(), character.label())
            }
        }
    }
}

/// Where a character comes from before it is resolved against a group.
#[derive(Debug, Clone, PartialEq)]
pub enum CharSource {
    Builtin(CharSpec),
    TableFile(String),
}

/// Functional spec grammar: `det | per | gmf:GROUPSPEC:CHARSPEC`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionalSpec {
    Det,
    Per,
    Gmf { group: GroupSpec, character: CharSource },
}

impl FromStr for FunctionalSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "det" => return Ok(Self::Det),
            "per" => return Ok(Self::Per),
            _ => {}
        }
        let rest = s
            .trim()
            .strip_prefix("gmf:")
            .ok_or_else(|| Error::Parse(format!("unknown functional {s:?}")))?;
        let mut parts = rest.splitn(3, ':');
        let (kind, arg, chr) = match (parts.next(), parts.next(), parts.next()) {
            (Some(k), Some(a), Some(c)) => (k, a, c),
            _ => return Err(Error::Parse(format!("expected gmf:GROUP:CHAR, got {s:?}"))),
        };
        let group: GroupSpec = format!("{kind}:{arg}").parse()?;
        let character = match chr.strip_prefix("table:") {
            Some(path) => CharSource::TableFile(path.to_string()),
            None => CharSource::Builtin(CharSpec::parse_builtin(chr)?),
        };
        Ok(Self::Gmf { group, character })
    }
}

/// A gap value with its tolerance scale and imaginary residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap {
    /// Real part of the signed combination.
    pub gap: f64,
    /// Largest `|Im F(·)|` among the evaluations.
    pub imag_residual: f64,
    /// `max(1, largest |F(·)|)` among the evaluations.
    pub scale: f64,
}

impl Gap {
    fn from_terms(terms: &[(f64, Complex64)]) -> Self {
        let value: Complex64 = terms.iter().map(|&(s, v)| v * s).sum();
        Self {
            gap: value.re,
            imag_residual: terms.iter().map(|(_, v)| v.im.abs()).fold(0.0, f64::max),
            scale: terms.iter().map(|(_, v)| v.norm()).fold(1.0, f64::max),
        }
    }

    /// `gap >= -tol * scale`.
    pub fn nonnegative_within(&self, tol: f64) -> bool {
        self.gap >= -tol * self.scale
    }
}

fn check_inputs(f: &MatrixFunctional, mats: &[&HermitianMatrix], psd_tol: f64) -> Result<()> {
    let n = mats[0].n();
    if mats.iter().any(|a| a.n() != n) {
        return Err(Error::DimensionMismatch("inputs have different sizes".into()));
    }
    if let Some(m) = f.arity() {
        if m != n {
            return Err(Error::DimensionMismatch(format!(
                "functional of arity {m} applied to {n}x{n} matrices"
            )));
        }
    }
    for a in mats {
        require_psd(a, psd_tol)?;
    }
    Ok(())
}

/// `F(A1+A2+A3) + F(A1) + F(A2) + F(A3) - F(A1+A2) - F(A1+A3) - F(A2+A3)`.
pub fn superadditivity_gap3(
    f: &MatrixFunctional,
    a1: &HermitianMatrix,
    a2: &HermitianMatrix,
    a3: &HermitianMatrix,
    psd_tol: f64,
) -> Result<Gap> {
    check_inputs(f, &[a1, a2, a3], psd_tol)?;
    let eval = |a: &HermitianMatrix| f.evaluate(a.as_general());
    let a12 = a1.add(a2)?;
    let a13 = a1.add(a3)?;
    let a23 = a2.add(a3)?;
    let a123 = a12.add(a3)?;
    let terms = [
        (1.0, eval(&a123)?),
        (1.0, eval(a1)?),
        (1.0, eval(a2)?),
        (1.0, eval(a3)?),
        (-1.0, eval(&a12)?),
        (-1.0, eval(&a13)?),
        (-1.0, eval(&a23)?),
    ];
    Ok(Gap::from_terms(&terms))
}

/// `F(A+B) - F(A) - F(B)`.
pub fn superadditivity_gap2(f: &MatrixFunctional, a: &HermitianMatrix, b: &HermitianMatrix, psd_tol: f64) -> Result<Gap> {
    check_inputs(f, &[a, b], psd_tol)?;
    let terms = [
        (1.0, f.evaluate(a.add(b)?.as_general())?),
        (-1.0, f.evaluate(a.as_general())?),
        (-1.0, f.evaluate(b.as_general())?),
    ];
    Ok(Gap::from_terms(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{DEFAULT_ORDER_CAP, PSD_TOL};
    use crate::matcore::{random_complex_gaussian, random_psd};
    use crate::symgroup::{builtin_character, builtin_group};
    use rand::SeedableRng;

    fn group(spec: &str) -> Arc<PermutationGroup> {
        Arc::new(builtin_group(&spec.parse().unwrap(), None, DEFAULT_ORDER_CAP).unwrap())
    }

    fn functional(spec: &str, chi: CharSpec) -> MatrixFunctional {
        let g = group(spec);
        let c = builtin_character(&g, &chi).unwrap();
        MatrixFunctional::gmf(g, c, false).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn two_by_two_closed_forms() {
        let x = GeneralMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert!(close(determinant(&x).unwrap(), Complex64::new(-2.0, 0.0), 1e-14));
        assert!(close(permanent(&x).unwrap(), Complex64::new(10.0, 0.0), 1e-14));
        assert!(close(functional("sym:2", CharSpec::Sign).evaluate(&x).unwrap(), Complex64::new(-2.0, 0.0), 1e-14));
        assert!(close(functional("sym:2", CharSpec::Trivial).evaluate(&x).unwrap(), Complex64::new(10.0, 0.0), 1e-14));
    }

    #[test]
    fn trivial_group_is_diagonal_product() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let x = random_complex_gaussian(3, 3, &mut rng);
        let v = functional("trivial:3", CharSpec::Trivial).evaluate(&x).unwrap();
        assert!(close(v, x[(0, 0)] * x[(1, 1)] * x[(2, 2)], 1e-14));
    }

    #[test]
    fn cyclic_omega_on_identity() {
        let v = functional("cyclic:3", CharSpec::Omega(1)).evaluate(&GeneralMatrix::identity(3)).unwrap();
        assert!(close(v, Complex64::new(1.0, 0.0), 1e-15));
    }

    #[test]
    fn singular_and_pivoting_determinants() {
        let singular = GeneralMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(determinant(&singular).unwrap().norm() < 1e-14);
        let needs_pivot = GeneralMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(close(determinant(&needs_pivot).unwrap(), Complex64::new(-1.0, 0.0), 1e-15));
        let zero_col = GeneralMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 3.0]]);
        assert_eq!(determinant(&zero_col).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn fast_paths_match_naive_sum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for m in 1..=6 {
            let det_naive = functional(&format!("sym:{m}"), CharSpec::Sign);
            let per_naive = functional(&format!("sym:{m}"), CharSpec::Trivial);
            for _ in 0..5 {
                let x = random_complex_gaussian(m, m, &mut rng);
                let (d, p) = (det_naive.evaluate(&x).unwrap(), per_naive.evaluate(&x).unwrap());
                assert!(close(determinant(&x).unwrap(), d, 1e-10 * d.norm().max(1.0)), "det m={m}");
                assert!(close(permanent(&x).unwrap(), p, 1e-10 * p.norm().max(1.0)), "per m={m}");
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let f = functional("sym:3", CharSpec::Sign);
        assert!(f.evaluate(&GeneralMatrix::identity(2)).is_err());
        assert!(determinant(&GeneralMatrix::zeros(2, 3)).is_err());
        let i2 = HermitianMatrix::identity(2);
        assert!(superadditivity_gap2(&f, &i2, &i2, PSD_TOL).is_err());
    }

    #[test]
    fn functional_requires_valid_character() {
        let s3 = group("sym:3");
        let sum = builtin_character(&s3, &CharSpec::Trivial)
            .unwrap()
            .pointwise_sum(&builtin_character(&s3, &CharSpec::Sign).unwrap())
            .unwrap();
        assert!(MatrixFunctional::gmf(s3.clone(), sum.clone(), false).is_err());
        assert!(MatrixFunctional::gmf(s3.clone(), sum.clone(), true).is_ok());

        let claimed = Character::from_values(&s3, sum.values().to_vec(), true, "table").unwrap();
        assert!(MatrixFunctional::gmf(s3.clone(), claimed.clone(), false).is_err());
        assert!(MatrixFunctional::gmf(s3, claimed, true).is_ok());
    }

    #[test]
    fn functional_spec_grammar() {
        assert_eq!("det".parse::<FunctionalSpec>().unwrap(), FunctionalSpec::Det);
        assert_eq!(
            "gmf:cyclic:3:omega:2".parse::<FunctionalSpec>().unwrap(),
            FunctionalSpec::Gmf {
                group: GroupSpec::Cyclic(3),
                character: CharSource::Builtin(CharSpec::Omega(2)),
            }
        );
        assert_eq!(
            "gmf:gens:(1 2 3),(1 2):table:chars/x.json".parse::<FunctionalSpec>().unwrap(),
            FunctionalSpec::Gmf {
                group: "gens:(1 2 3),(1 2)".parse().unwrap(),
                character: CharSource::TableFile("chars/x.json".into()),
            }
        );
        for bad in ["gmf", "gmf:sym:3", "gmf:sym:3:bogus", "trace"] {
            assert!(bad.parse::<FunctionalSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn gap3_examples() {
        let s = |v: f64| HermitianMatrix::diag(&[v]);
        let g = superadditivity_gap3(&MatrixFunctional::Det, &s(1.0), &s(2.0), &s(5.0), PSD_TOL).unwrap();
        assert_eq!(g.gap, 0.0);

        let i3 = HermitianMatrix::identity(3);
        for f in [MatrixFunctional::Det, MatrixFunctional::Per] {
            let g = superadditivity_gap3(&f, &i3, &i3, &i3, PSD_TOL).unwrap();
            assert!((g.gap - 6.0).abs() < 1e-9, "{}", f.label());
            assert!(g.imag_residual == 0.0 && g.scale == 27.0);
        }

        for seed in 0..10 {
            let (a, b, c) = (random_psd(2, 2, seed), random_psd(2, 1, seed + 100), random_psd(2, 2, seed + 200));
            let g = superadditivity_gap3(&MatrixFunctional::Per, &a, &b, &c, PSD_TOL).unwrap();
            assert!(g.gap.abs() <= 1e-10 * g.scale, "{g:?}");
        }
    }

    #[test]
    fn gap2_examples() {
        let i2 = HermitianMatrix::identity(2);
        let g = superadditivity_gap2(&MatrixFunctional::Det, &i2, &i2, PSD_TOL).unwrap();
        assert!((g.gap - 2.0).abs() < 1e-12);

        let s = |v: f64| HermitianMatrix::diag(&[v]);
        assert_eq!(superadditivity_gap2(&MatrixFunctional::Per, &s(3.0), &s(4.0), PSD_TOL).unwrap().gap, 0.0);

        let ones = HermitianMatrix::new(GeneralMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap();
        let g = superadditivity_gap2(&MatrixFunctional::Per, &ones, &ones, PSD_TOL).unwrap();
        assert!((g.gap - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gap_rejects_non_psd() {
        let bad = HermitianMatrix::diag(&[1.0, -1.0]);
        let i2 = HermitianMatrix::identity(2);
        assert!(matches!(
            superadditivity_gap2(&MatrixFunctional::Det, &bad, &i2, PSD_TOL),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn transpose_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for m in 1..=5 {
            let x = random_complex_gaussian(m, m, &mut rng);
            let xt = x.transpose();
            assert!(close(determinant(&x).unwrap(), determinant(&xt).unwrap(), 1e-10));
            assert!(close(permanent(&x).unwrap(), permanent(&xt).unwrap(), 1e-10));
        }
    }
}
