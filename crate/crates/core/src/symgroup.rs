//! Permutations, permutation groups and characters stored as value tables.
//!
//! Points are 1-based at the boundary (cycle notation, `images_one_based`)
//! and 0-based internally.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self {
            image: (0..degree).collect(),
        }
    }

    /// `images[i - 1] = σ(i)` with 1-based points.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let m = images.len();
        if m == 0 {
            return Err(Error::InvalidInput("permutation degree must be >= 1".into()));
        }
        let mut seen = vec![false; m];
        let mut image = Vec::with_capacity(m);
        for &p in images {
            if p == 0 || p > m || seen[p - 1] {
                return Err(Error::InvalidInput(format!("{images:?} is not a bijection on 1..={m}")));
            }
            seen[p - 1] = true;
            image.push(p - 1);
        }
        Ok(Self { image })
    }

    /// Product of cycles (1-based points), rightmost applied first.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidInput("permutation degree must be >= 1".into()));
        }
        let mut acc = Self::identity(degree);
        for cycle in cycles {
            let mut image: Vec<usize> = (0..degree).collect();
            let mut seen = vec![false; degree];
            for (pos, &p) in cycle.iter().enumerate() {
                if p == 0 || p > degree || seen[p - 1] {
                    return Err(Error::InvalidInput(format!(
                        "cycle {cycle:?} is not a cycle on 1..={degree}"
                    )));
                }
                seen[p - 1] = true;
                image[p - 1] = cycle[(pos + 1) % cycle.len()] - 1;
            }
            acc = acc.compose(&Self { image })?;
        }
        Ok(acc)
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    /// `σ(i)` for a 0-based point.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn images_zero_based(&self) -> &[usize] {
        &self.image
    }

    pub fn images_one_based(&self) -> Vec<usize> {
        self.image.iter().map(|p| p + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(Error::DimensionMismatch(format!(
                "composing permutations of degree {} and {}",
                self.degree(),
                other.degree()
            )));
        }
        Ok(Self {
            image: other.image.iter().map(|&j| self.image[j]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut image = vec![0; self.degree()];
        for (i, &p) in self.image.iter().enumerate() {
            image[p] = i;
        }
        Self { image }
    }

    /// Disjoint cycles of length >= 2, as 1-based points, each starting at its
    /// smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p + 1);
                p = self.image[p];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// +1 or -1 by the parity of `degree - number of cycles`.
    pub fn sign(&self) -> i32 {
        let transpositions: usize = self.cycles().iter().map(|c| c.len() - 1).sum();
        if transpositions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

/// Parses `(1 2 3)(4 5)` into cycles.
pub fn parse_cycles(text: &str) -> Result<Vec<Vec<usize>>> {
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("expected '(' in {text:?}")))?;
        let close = body
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unclosed cycle in {text:?}")))?;
        let cycle = body[..close]
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad point {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        cycles.push(cycle);
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Symmetric,
    Alternating,
    Cyclic,
    Trivial,
    Generated,
}

/// Group spec grammar: `sym:m | alt:m | cyclic:m | trivial:m | gens:(a b c),(d e)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Symmetric(usize),
    Alternating(usize),
    Cyclic(usize),
    Trivial(usize),
    /// One entry per generator, each a product of cycles.
    Generators(Vec<Vec<Vec<usize>>>),
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("group spec {s:?} needs the form kind:arg")))?;
        let degree = || {
            tail.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad degree in {s:?}")))
                .and_then(|m| {
                    if m == 0 {
                        Err(Error::Parse("degree must be >= 1".into()))
                    } else {
                        Ok(m)
                    }
                })
        };
        match head.trim() {
            "sym" => Ok(Self::Symmetric(degree()?)),
            "alt" => Ok(Self::Alternating(degree()?)),
            "cyclic" => Ok(Self::Cyclic(degree()?)),
            "trivial" => Ok(Self::Trivial(degree()?)),
            "gens" => {
                let gens = split_top_level(tail)
                    .into_iter()
                    .filter(|g| !g.trim().is_empty())
                    .map(parse_cycles)
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::Generators(gens))
            }
            other => Err(Error::Parse(format!("unknown group kind {other:?}"))),
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

impl GroupSpec {
    /// The degree a spec pins down on its own; `gens` specs use the largest
    /// point mentioned.
    pub fn natural_degree(&self) -> usize {
        match self {
            Self::Symmetric(m) | Self::Alternating(m) | Self::Cyclic(m) | Self::Trivial(m) => *m,
            Self::Generators(gens) => gens.iter().flatten().flatten().copied().max().unwrap_or(1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PermutationGroup {
    degree: usize,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    generators: Vec<Permutation>,
    kind: GroupKind,
}

impl PermutationGroup {
    fn from_parts(degree: usize, elements: Vec<Permutation>, generators: Vec<Permutation>, kind: GroupKind) -> Self {
        let index = elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Self {
            degree,
            elements,
            index,
            generators,
            kind,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Elements in canonical order; the identity is first.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.index.contains_key(p)
    }
}

/// Closure of `generators` under composition: breadth-first from the
/// identity, multiplying discovered elements by generators on the right.
pub fn generate_group(degree: usize, generators: &[Permutation], order_cap: usize) -> Result<PermutationGroup> {
    if degree == 0 {
        return Err(Error::InvalidInput("group degree must be >= 1".into()));
    }
    if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
        return Err(Error::DimensionMismatch(format!(
            "generator {g} has degree {}, expected {degree}",
            g.degree()
        )));
    }
    let identity = Permutation::identity(degree);
    let mut elements = vec![identity.clone()];
    let mut seen: HashMap<Permutation, ()> = HashMap::from([(identity.clone(), ())]);
    let mut queue = VecDeque::from([identity]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = g.compose(s)?;
            if seen.insert(h.clone(), ()).is_none() {
                if elements.len() == order_cap {
                    return Err(Error::OrderCap { cap: order_cap });
                }
                elements.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(PermutationGroup::from_parts(degree, elements, generators.to_vec(), GroupKind::Generated))
}

fn factorial_capped(m: usize, cap: usize) -> Option<usize> {
    (1..=m).try_fold(1usize, |acc, i| acc.checked_mul(i).filter(|&v| v <= cap))
}

/// All permutations of `0..m` in lexicographic order.
fn lexicographic_permutations(m: usize) -> Vec<Permutation> {
    let mut current: Vec<usize> = (0..m).collect();
    let mut out = vec![Permutation { image: current.clone() }];
    loop {
        let Some(i) = (1..m).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..m).rev().find(|&j| current[j] > current[i - 1]).expect("pivot exists");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(Permutation { image: current.clone() });
    }
}

fn long_cycle(m: usize) -> Permutation {
    Permutation {
        image: (0..m).map(|i| (i + 1) % m).collect(),
    }
}

/// Builds a group from its spec. `degree` overrides the natural degree of a
/// `gens` spec (it must be at least the largest point used) and must match
/// the stated degree of the other kinds.
pub fn builtin_group(spec: &GroupSpec, degree: Option<usize>, order_cap: usize) -> Result<PermutationGroup> {
    let natural = spec.natural_degree();
    let m = degree.unwrap_or(natural);
    match spec {
        GroupSpec::Generators(_) if m < natural => {
            return Err(Error::DimensionMismatch(format!(
                "generators move point {natural} but the degree is {m}"
            )))
        }
        GroupSpec::Generators(_) => {}
        _ if m != natural => {
            return Err(Error::DimensionMismatch(format!("group of degree {natural} used at degree {m}")))
        }
        _ => {}
    }
    if m == 0 {
        return Err(Error::InvalidInput("group degree must be >= 1".into()));
    }
    let full_order = || factorial_capped(m, order_cap).ok_or(Error::OrderCap { cap: order_cap });
    let group = match spec {
        GroupSpec::Symmetric(_) => {
            full_order()?;
            let gens = if m >= 2 {
                vec![Permutation::from_cycles(m, &[vec![1, 2]])?, long_cycle(m)]
            } else {
                Vec::new()
            };
            PermutationGroup::from_parts(m, lexicographic_permutations(m), gens, GroupKind::Symmetric)
        }
        GroupSpec::Alternating(_) => {
            if m >= 2 {
                factorial_capped(m, order_cap.saturating_mul(2)).ok_or(Error::OrderCap { cap: order_cap })?;
            }
            let elements = lexicographic_permutations(m).into_iter().filter(|p| p.sign() == 1).collect();
            let gens = (3..=m)
                .map(|i| Permutation::from_cycles(m, &[vec![1, 2, i]]))
                .collect::<Result<Vec<_>>>()?;
            PermutationGroup::from_parts(m, elements, gens, GroupKind::Alternating)
        }
        GroupSpec::Cyclic(_) => {
            if m > order_cap {
                return Err(Error::OrderCap { cap: order_cap });
            }
            let c = long_cycle(m);
            let mut elements = vec![Permutation::identity(m)];
            for p in 1..m {
                elements.push(elements[p - 1].compose(&c)?);
            }
            let gens = if m >= 2 { vec![c] } else { Vec::new() };
            PermutationGroup::from_parts(m, elements, gens, GroupKind::Cyclic)
        }
        GroupSpec::Trivial(_) => PermutationGroup::from_parts(m, vec![Permutation::identity(m)], Vec::new(), GroupKind::Trivial),
        GroupSpec::Generators(gens) => {
            let gens = gens
                .iter()
                .map(|cycles| Permutation::from_cycles(m, cycles))
                .collect::<Result<Vec<_>>>()?;
            generate_group(m, &gens, order_cap)?
        }
    };
    Ok(group)
}

/// Character spec grammar: `trivial | sign | omega:j | table:FILE.json`.
/// Table specs arrive here already loaded.
#[derive(Debug, Clone, PartialEq)]
pub enum CharSpec {
    Trivial,
    Sign,
    Omega(i64),
    Table(Vec<Complex64>),
}

impl CharSpec {
    /// Parses the non-file forms; `table:` is resolved by the caller.
    pub fn parse_builtin(s: &str) -> Result<Self> {
        match s.trim() {
            "trivial" => Ok(Self::Trivial),
            "sign" => Ok(Self::Sign),
            other => match other.strip_prefix("omega:") {
                Some(j) => j
                    .trim()
                    .parse::<i64>()
                    .map(Self::Omega)
                    .map_err(|_| Error::Parse(format!("bad omega index in {s:?}"))),
                None => Err(Error::Parse(format!("unknown character spec {s:?}"))),
            },
        }
    }
}

/// On-disk character table: `{"values": [[re, im], ...]}` in canonical
/// element order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterTableJson {
    pub values: Vec<[f64; 2]>,
}

impl From<CharacterTableJson> for CharSpec {
    fn from(t: CharacterTableJson) -> Self {
        Self::Table(t.values.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }
}

/// A class function given by its values on the group's canonical element list.
#[derive(Debug, Clone, PartialEq)]
pub struct Character {
    values: Vec<Complex64>,
    irreducible: bool,
    label: String,
}

impl Character {
    /// `irreducible` records a claim; [`validate_character`] tests it.
    pub fn from_values(group: &PermutationGroup, values: Vec<Complex64>, irreducible: bool, label: impl Into<String>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::DimensionMismatch(format!(
                "character has {} values, group has order {}",
                values.len(),
                group.order()
            )));
        }
        Ok(Self {
            values,
            irreducible,
            label: label.into(),
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `χ(e)`.
    pub fn degree(&self) -> Complex64 {
        self.values[0]
    }

    pub fn claims_irreducible(&self) -> bool {
        self.irreducible
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn check_group(&self, group: &PermutationGroup) -> Result<()> {
        if self.values.len() != group.order() {
            return Err(Error::DimensionMismatch(format!(
                "character {} has {} values, group has order {}",
                self.label,
                self.values.len(),
                group.order()
            )));
        }
        Ok(())
    }

    /// Pointwise sum; never claims irreducibility.
    pub fn pointwise_sum(&self, other: &Self) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch("characters on different groups".into()));
        }
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            irreducible: false,
            label: format!("{}+{}", self.label, other.label),
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            irreducible: false,
            label: format!("{c}*{}", self.label),
        }
    }
}

pub fn builtin_character(group: &PermutationGroup, spec: &CharSpec) -> Result<Character> {
    let one = Complex64::new(1.0, 0.0);
    match spec {
        CharSpec::Trivial => Character::from_values(group, vec![one; group.order()], true, "trivial"),
        CharSpec::Sign => {
            let values = group
                .elements()
                .iter()
                .map(|p| Complex64::new(f64::from(p.sign()), 0.0))
                .collect();
            Character::from_values(group, values, true, "sign")
        }
        CharSpec::Omega(j) => {
            if *group.kind() != GroupKind::Cyclic {
                return Err(Error::InvalidInput("omega:j requires a cyclic:m group".into()));
            }
            let m = group.degree();
            // c^p sends point 0 to p
            let values = group
                .elements()
                .iter()
                .map(|p| {
                    let exponent = (*j).rem_euclid(m as i64) * p.apply(0) as i64 % m as i64;
                    Complex64::from_polar(1.0, TAU * exponent as f64 / m as f64)
                })
                .collect();
            Character::from_values(group, values, true, format!("omega:{j}"))
        }
        CharSpec::Table(values) => Character::from_values(group, values.clone(), true, "table"),
    }
}

/// `(1/|G|) Σ_σ χ1(σ) conj(χ2(σ))`.
pub fn character_inner_product(chi1: &Character, chi2: &Character, group: &PermutationGroup) -> Result<Complex64> {
    chi1.check_group(group)?;
    chi2.check_group(group)?;
    let sum: Complex64 = chi1.values.iter().zip(&chi2.values).map(|(a, b)| a * b.conj()).sum();
    Ok(sum / group.order() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Largest deviation observed, or the tested value.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacterValidation {
    pub checks: Vec<CheckOutcome>,
}

impl CharacterValidation {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Class-function, degree and (when claimed) irreducibility checks.
///
/// Invariance under conjugation is tested against the group's generators,
/// which is enough because conjugation by a product is a composite of
/// conjugations.
pub fn validate_character(chi: &Character, group: &PermutationGroup, tol: f64) -> Result<CharacterValidation> {
    chi.check_group(group)?;
    let mut worst: f64 = 0.0;
    for (i, sigma) in group.elements().iter().enumerate() {
        for tau in group.generators() {
            let conj = tau.compose(sigma)?.compose(&tau.inverse())?;
            let j = group
                .index_of(&conj)
                .ok_or_else(|| Error::InvalidInput(format!("group is not closed under conjugation by {tau}")))?;
            worst = worst.max((chi.values[j] - chi.values[i]).norm());
        }
    }
    let mut checks = vec![CheckOutcome {
        name: "class-function",
        passed: worst <= tol,
        value: worst,
    }];

    let d = chi.degree();
    let integral = d.re >= 1.0 - tol && (d.re - d.re.round()).abs() <= tol && d.im.abs() <= tol;
    checks.push(CheckOutcome {
        name: "degree",
        passed: integral,
        value: d.re,
    });

    if chi.irreducible {
        let norm = character_inner_product(chi, chi, group)?;
        checks.push(CheckOutcome {
            name: "irreducible",
            passed: (norm - 1.0).norm() <= tol,
            value: norm.re,
        });
    }
    Ok(CharacterValidation { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CHAR_TOL, DEFAULT_ORDER_CAP};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn cyc(m: usize, cycles: &[&[usize]]) -> Permutation {
        let owned: Vec<Vec<usize>> = cycles.iter().map(|c| c.to_vec()).collect();
        Permutation::from_cycles(m, &owned).unwrap()
    }

    fn group(spec: &str) -> PermutationGroup {
        builtin_group(&spec.parse().unwrap(), None, DEFAULT_ORDER_CAP).unwrap()
    }

    #[test]
    fn permutation_basics() {
        let t = cyc(3, &[&[1, 2]]);
        assert!(t.compose(&t).unwrap().is_identity());
        let c = cyc(3, &[&[1, 2, 3]]);
        assert_eq!(c.sign(), 1);
        assert_eq!(t.sign(), -1);
        assert_eq!(c.inverse(), cyc(3, &[&[1, 3, 2]]));
        assert_eq!(c.to_string(), "(1 2 3)");
        assert_eq!(Permutation::identity(4).to_string(), "()");
        assert_eq!(c.images_one_based(), vec![2, 3, 1]);
        assert!(c.compose(&Permutation::identity(4)).is_err());
    }

    #[test]
    fn compose_applies_right_factor_first() {
        let s = cyc(3, &[&[1, 2]]);
        let t = cyc(3, &[&[2, 3]]);
        // s(t(3)) = s(2) = 1
        assert_eq!(s.compose(&t).unwrap().apply(2), 0);
    }

    #[test]
    fn from_images_validates() {
        assert!(Permutation::from_images(&[2, 1, 3]).is_ok());
        assert!(Permutation::from_images(&[1, 1, 3]).is_err());
        assert!(Permutation::from_images(&[0, 1]).is_err());
        assert!(Permutation::from_cycles(3, &[vec![1, 4]]).is_err());
        assert!(Permutation::from_cycles(3, &[vec![1, 1]]).is_err());
    }

    #[test]
    fn parse_cycle_notation() {
        assert_eq!(parse_cycles("(1 2 3)(4 5)").unwrap(), vec![vec![1, 2, 3], vec![4, 5]]);
        assert_eq!(parse_cycles(" ( 1  2 ) ").unwrap(), vec![vec![1, 2]]);
        assert!(parse_cycles("(1 2").is_err());
        assert!(parse_cycles("1 2").is_err());
        assert!(parse_cycles("(1 x)").is_err());
    }

    #[test]
    fn group_spec_grammar() {
        assert_eq!("sym:3".parse::<GroupSpec>().unwrap(), GroupSpec::Symmetric(3));
        assert_eq!(
            "gens:(1 2 3),(1 2)".parse::<GroupSpec>().unwrap(),
            GroupSpec::Generators(vec![vec![vec![1, 2, 3]], vec![vec![1, 2]]])
        );
        assert_eq!(
            "gens:(1 2)(3 4)".parse::<GroupSpec>().unwrap(),
            GroupSpec::Generators(vec![vec![vec![1, 2], vec![3, 4]]])
        );
        for bad in ["sym", "sym:0", "sym:x", "foo:3", "gens:(1 2"] {
            assert!(bad.parse::<GroupSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn generated_groups() {
        let c3 = generate_group(3, &[cyc(3, &[&[1, 2, 3]])], 100).unwrap();
        assert_eq!(c3.order(), 3);
        let s3 = generate_group(3, &[cyc(3, &[&[1, 2]]), cyc(3, &[&[1, 2, 3]])], 100).unwrap();
        assert_eq!(s3.order(), 6);
        assert!(s3.elements()[0].is_identity());
        let e = generate_group(4, &[], 100).unwrap();
        assert_eq!(e.order(), 1);
        assert!(matches!(
            generate_group(4, &[cyc(4, &[&[1, 2]]), cyc(4, &[&[1, 2, 3, 4]])], 10),
            Err(Error::OrderCap { cap: 10 })
        ));
        assert!(generate_group(3, &[cyc(4, &[&[1, 2]])], 10).is_err());
    }

    #[test]
    fn builtin_orders() {
        assert_eq!(group("sym:3").order(), 6);
        assert_eq!(group("alt:4").order(), 12);
        assert_eq!(group("cyclic:5").order(), 5);
        assert_eq!(group("trivial:4").order(), 1);
        assert_eq!(group("sym:1").order(), 1);
        assert_eq!(group("alt:2").order(), 1);
        assert!(matches!(
            builtin_group(&GroupSpec::Symmetric(9), None, DEFAULT_ORDER_CAP),
            Err(Error::OrderCap { .. })
        ));
        assert_eq!(builtin_group(&GroupSpec::Symmetric(8), None, DEFAULT_ORDER_CAP).unwrap().order(), 40_320);
    }

    #[test]
    fn builtin_degree_override() {
        let spec: GroupSpec = "gens:(1 2)".parse().unwrap();
        assert_eq!(builtin_group(&spec, Some(4), 100).unwrap().degree(), 4);
        assert!(builtin_group(&spec, Some(1), 100).is_err());
        assert!(builtin_group(&GroupSpec::Symmetric(3), Some(4), 100).is_err());
    }

    #[test]
    fn builtin_groups_are_closed() {
        for spec in ["sym:4", "alt:4", "cyclic:4", "trivial:3", "gens:(1 2)(3 4),(1 3)"] {
            let g = group(spec);
            assert!(g.elements()[0].is_identity());
            for a in g.elements() {
                assert!(g.contains(&a.inverse()), "{spec}");
                for b in g.elements() {
                    assert!(g.contains(&a.compose(b).unwrap()), "{spec}");
                }
            }
        }
    }

    #[test]
    fn builtin_characters() {
        let s3 = group("sym:3");
        let sign = builtin_character(&s3, &CharSpec::Sign).unwrap();
        for (p, v) in s3.elements().iter().zip(sign.values()) {
            assert_eq!(v.re, f64::from(p.sign()));
        }
        let triv = builtin_character(&s3, &CharSpec::Trivial).unwrap();
        assert!(triv.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));

        let c3 = group("cyclic:3");
        let omega = builtin_character(&c3, &CharSpec::Omega(1)).unwrap();
        let w = Complex64::from_polar(1.0, TAU / 3.0);
        for (got, want) in omega.values().iter().zip([Complex64::new(1.0, 0.0), w, w * w]) {
            assert!((got - want).norm() < 1e-15);
        }
        assert!(builtin_character(&s3, &CharSpec::Omega(1)).is_err());
    }

    #[test]
    fn inner_products() {
        let s3 = group("sym:3");
        let sign = builtin_character(&s3, &CharSpec::Sign).unwrap();
        let triv = builtin_character(&s3, &CharSpec::Trivial).unwrap();
        assert!((character_inner_product(&sign, &sign, &s3).unwrap() - 1.0).norm() < 1e-15);
        assert!(character_inner_product(&triv, &sign, &s3).unwrap().norm() < 1e-15);
        let two = triv.scaled(2.0);
        assert!((character_inner_product(&two, &two, &s3).unwrap() - 4.0).norm() < 1e-15);
        assert!(character_inner_product(&sign, &sign, &group("sym:4")).is_err());
    }

    #[test]
    fn validation_reports() {
        let s4 = group("sym:4");
        let sign = builtin_character(&s4, &CharSpec::Sign).unwrap();
        assert!(validate_character(&sign, &s4, CHAR_TOL).unwrap().passed());

        let s3 = group("sym:3");
        let sum = builtin_character(&s3, &CharSpec::Trivial)
            .unwrap()
            .pointwise_sum(&builtin_character(&s3, &CharSpec::Sign).unwrap())
            .unwrap();
        let claimed = Character::from_values(&s3, sum.values().to_vec(), true, "sum").unwrap();
        let report = validate_character(&claimed, &s3, CHAR_TOL).unwrap();
        let irr = report.check("irreducible").unwrap();
        assert!(!irr.passed && (irr.value - 2.0).abs() < 1e-12);
        assert!(report.check("class-function").unwrap().passed);

        // Distinct values on the two 3-cycles of S_3.
        let mut values = vec![Complex64::new(1.0, 0.0); 6];
        let three_cycle = s3.elements().iter().position(|p| p.cycles().first().is_some_and(|c| c.len() == 3)).unwrap();
        values[three_cycle] = Complex64::new(0.5, 0.0);
        let broken = Character::from_values(&s3, values, false, "broken").unwrap();
        let report = validate_character(&broken, &s3, CHAR_TOL).unwrap();
        assert!(!report.check("class-function").unwrap().passed);
        assert!(report.check("irreducible").is_none());

        let bad_degree = Character::from_values(&s3, vec![Complex64::new(0.5, 0.0); 6], false, "half").unwrap();
        assert!(!validate_character(&bad_degree, &s3, CHAR_TOL).unwrap().check("degree").unwrap().passed);
    }

    #[test]
    fn all_builtin_characters_validate() {
        for spec in ["sym:1", "sym:2", "sym:3", "sym:4", "alt:3", "alt:4", "trivial:3", "cyclic:4"] {
            let g = group(spec);
            for c in [CharSpec::Trivial, CharSpec::Sign] {
                let chi = builtin_character(&g, &c).unwrap();
                assert!(validate_character(&chi, &g, CHAR_TOL).unwrap().passed(), "{spec} {c:?}");
            }
        }
        for m in 1..=5 {
            let g = group(&format!("cyclic:{m}"));
            for j in -1..=(m as i64) {
                let chi = builtin_character(&g, &CharSpec::Omega(j)).unwrap();
                assert!(validate_character(&chi, &g, CHAR_TOL).unwrap().passed(), "cyclic:{m} omega:{j}");
            }
        }
    }

    #[test]
    fn sign_is_multiplicative() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let mut a: Vec<usize> = (1..=6).collect();
            let mut b = a.clone();
            a.shuffle(&mut rng);
            b.shuffle(&mut rng);
            let (s, t) = (Permutation::from_images(&a).unwrap(), Permutation::from_images(&b).unwrap());
            assert_eq!(s.compose(&t).unwrap().sign(), s.sign() * t.sign());
        }
    }

    #[test]
    fn generated_order_divides_factorial() {
        let gens = [cyc(5, &[&[1, 2, 3]]), cyc(5, &[&[4, 5]])];
        let g = generate_group(5, &gens, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(120 % g.order(), 0);
        for a in &gens {
            for b in &gens {
                assert!(g.contains(&a.compose(b).unwrap()));
            }
        }
    }

    #[test]
    fn character_table_json() {
        let t: CharacterTableJson = serde_json::from_str(r#"{"values": [[1, 0], [-1, 0]]}"#).unwrap();
        let s2 = group("sym:2");
        let chi = builtin_character(&s2, &CharSpec::from(t)).unwrap();
        assert!(validate_character(&chi, &s2, CHAR_TOL).unwrap().passed());
        let short = CharSpec::Table(vec![Complex64::new(1.0, 0.0)]);
        assert!(builtin_character(&s2, &short).is_err());
    }
}
