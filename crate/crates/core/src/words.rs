//! Tensor words over the alphabet `{1..k}`.
//!
//! A word `(s_1, ..., s_m)` stands for the Kronecker product
//! `A_{s_1} ⊗ ... ⊗ A_{s_m}`. Its representatives are the distinct letters,
//! and a word is surjective when every letter of the alphabet occurs.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::config::Limits;
use crate::matcore::{kron, GeneralMatrix, HermitianMatrix};
use crate::{Error, Result};

/// Alphabets are tracked as `u64` bitmasks.
pub const MAX_ALPHABET: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<usize>,
    k: usize,
}

impl Word {
    /// `letters` are 1-based.
    pub fn new(letters: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 || k > MAX_ALPHABET {
            return Err(Error::InvalidInput(format!(
                "alphabet size must be in 1..={MAX_ALPHABET}, got {k}"
            )));
        }
        if letters.is_empty() {
            return Err(Error::InvalidInput("word must have length >= 1".into()));
        }
        if let Some(&bad) = letters.iter().find(|&&s| s == 0 || s > k) {
            return Err(Error::InvalidInput(format!("letter {bad} outside 1..={k}")));
        }
        Ok(Self { letters, k })
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn representatives(&self) -> BTreeSet<usize> {
        self.letters.iter().copied().collect()
    }

    /// Number of distinct letters.
    pub fn distinct(&self) -> usize {
        self.letter_mask().count_ones() as usize
    }

    pub fn is_surjective(&self) -> bool {
        self.distinct() == self.k
    }

    fn letter_mask(&self) -> u64 {
        self.letters.iter().fold(0, |acc, &s| acc | 1 << (s - 1))
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordFilter {
    All,
    Surjective,
}

/// Lexicographic stream of words of length `m` over `{1..k}`.
#[derive(Debug, Clone)]
pub struct Words {
    k: usize,
    filter: WordFilter,
    next: Option<Vec<usize>>,
}

impl Iterator for Words {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        loop {
            let current = self.next.take()?;
            self.next = successor(&current, self.k);
            let word = Word {
                letters: current,
                k: self.k,
            };
            if self.filter == WordFilter::All || word.is_surjective() {
                return Some(word);
            }
        }
    }
}

fn successor(letters: &[usize], k: usize) -> Option<Vec<usize>> {
    let mut out = letters.to_vec();
    for pos in (0..out.len()).rev() {
        if out[pos] < k {
            out[pos] += 1;
            return Some(out);
        }
        out[pos] = 1;
    }
    None
}

pub fn enumerate_words(k: usize, m: usize, filter: WordFilter, limits: &Limits) -> Result<Words> {
    if m == 0 {
        return Err(Error::InvalidInput("word length must be >= 1".into()));
    }
    Word::new(vec![1; m], k)?;
    limits.check_words(k, m)?;
    Ok(Words {
        k,
        filter,
        next: Some(vec![1; m]),
    })
}

/// Number of surjective words of length `m` over `k` letters,
/// `Σ_j (-1)^j C(k, j) (k - j)^m`, in exact integer arithmetic.
pub fn surjective_count(k: usize, m: usize) -> Result<u128> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidInput("surjective_count needs k, m >= 1".into()));
    }
    let overflow = || Error::Overflow(format!("surjective_count({k}, {m})"));
    let exp = u32::try_from(m).map_err(|_| overflow())?;
    let mut total: i128 = 0;
    let mut binom: i128 = 1;
    for j in 0..=k {
        let power = ((k - j) as i128).checked_pow(exp).ok_or_else(overflow)?;
        let term = binom.checked_mul(power).ok_or_else(overflow)?;
        total = if j % 2 == 0 {
            total.checked_add(term)
        } else {
            total.checked_sub(term)
        }
        .ok_or_else(overflow)?;
        binom = binom.checked_mul((k - j) as i128).ok_or_else(overflow)? / (j as i128 + 1);
    }
    u128::try_from(total).map_err(|_| overflow())
}

fn check_square_family(mats: &[GeneralMatrix]) -> Result<usize> {
    let n = mats
        .first()
        .ok_or_else(|| Error::InvalidInput("need at least one matrix".into()))?
        .rows();
    if let Some(bad) = mats.iter().find(|a| !a.is_square() || a.rows() != n) {
        return Err(Error::DimensionMismatch(format!(
            "expected {n}x{n} factors, found {}x{}",
            bad.rows(),
            bad.cols()
        )));
    }
    Ok(n)
}

/// `mats[s_1 - 1] ⊗ ... ⊗ mats[s_m - 1]`.
pub fn word_tensor(w: &Word, mats: &[GeneralMatrix], limits: &Limits) -> Result<GeneralMatrix> {
    if mats.len() != w.k {
        return Err(Error::DimensionMismatch(format!(
            "word over {} letters given {} matrices",
            w.k,
            mats.len()
        )));
    }
    let n = check_square_family(mats)?;
    limits.check_power(n, w.len())?;
    let mut acc = mats[w.letters[0] - 1].clone();
    for &s in &w.letters[1..] {
        acc = kron(&acc, &mats[s - 1], limits)?;
    }
    Ok(acc)
}

/// Sum of `word_tensor(w, mats)` over every surjective word of length `m`.
///
/// Walks the words lexicographically and reuses Kronecker prefixes shared
/// with the previous word. The result is the zero matrix when `m < k`.
pub fn surjective_word_sum(mats: &[HermitianMatrix], m: usize, limits: &Limits) -> Result<HermitianMatrix> {
    let general: Vec<GeneralMatrix> = mats.iter().map(|a| a.as_general().clone()).collect();
    let n = check_square_family(&general)?;
    let dim = limits.check_power(n, m)?;
    let k = mats.len();
    let mut total = GeneralMatrix::zeros(dim, dim);
    let one = Complex64::new(1.0, 0.0);

    // prefix[j] = mats[s_1] ⊗ ... ⊗ mats[s_{j+1}] for the last word seen
    let mut prefix: Vec<GeneralMatrix> = Vec::with_capacity(m);
    let mut prev: Option<Vec<usize>> = None;
    for word in enumerate_words(k, m, WordFilter::Surjective, limits)? {
        let letters = word.letters();
        let keep = match &prev {
            Some(p) => p.iter().zip(letters).take_while(|(a, b)| a == b).count(),
            None => 0,
        };
        prefix.truncate(keep);
        for &s in &letters[keep..] {
            let next = match prefix.last() {
                Some(acc) => kron(acc, &general[s - 1], limits)?,
                None => general[s - 1].clone(),
            };
            prefix.push(next);
        }
        total.add_scaled_assign(one, prefix.last().expect("m >= 1"))?;
        prev = Some(letters.to_vec());
    }
    HermitianMatrix::new(total)
}

/// Net coefficient of the word's tensor in the alternating subset sum over
/// `{1..k}`: `Σ (-1)^{k-|S|}` over index sets `S ⊇ representatives(w)`.
///
/// Computed by walking the supersets; agrees with `(1 - 1)^{k - t}`, so it is
/// 1 for surjective words and 0 otherwise.
pub fn inclusion_exclusion_coefficient(w: &Word) -> i64 {
    let k = w.k;
    let reps = w.letter_mask();
    let full: u64 = (1 << k) - 1;
    let free = full & !reps;

    let mut total: i64 = 0;
    let mut sub = free;
    loop {
        let size = (reps | sub).count_ones() as usize;
        total += if (k - size).is_multiple_of(2) { 1 } else { -1 };
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }

    let closed_form = i64::from(w.is_surjective());
    assert_eq!(total, closed_form, "superset sum disagrees with (1-1)^(k-t) for {w}");
    total
}
