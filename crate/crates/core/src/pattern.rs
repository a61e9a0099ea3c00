//! Relative-position patterns of two edges.
//!
//! An r-pattern is a word of length `2r` over `{A, B}` with `r` letters of each
//! kind and first letter `A`. It records how two disjoint r-sets interleave.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::partition::OrderedPartition;

const A: u8 = b'A';
const B: u8 = b'B';

/// An r-pattern stored as its uppercase word.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern(Box<[u8]>);

impl Pattern {
    pub fn new(word: &str) -> Result<Self> {
        let bytes = word.as_bytes();
        let invalid = |reason: &str| Error::InvalidPattern {
            word: word.to_string(),
            reason: reason.to_string(),
        };
        if bytes.is_empty() || !bytes.len().is_multiple_of(2) {
            return Err(invalid("length must be a positive even number"));
        }
        if bytes.iter().any(|&c| c != A && c != B) {
            return Err(invalid("letters must be A or B"));
        }
        if bytes[0] != A {
            return Err(invalid("first letter must be A"));
        }
        let a_count = bytes.iter().filter(|&&c| c == A).count();
        if 2 * a_count != bytes.len() {
            return Err(invalid("needs equally many A and B"));
        }
        Ok(Pattern(bytes.into()))
    }

    fn from_letters_unchecked(letters: Vec<u8>) -> Self {
        debug_assert!(Pattern::new(std::str::from_utf8(&letters).unwrap()).is_ok());
        Pattern(letters.into_boxed_slice())
    }

    /// The pattern formed by two disjoint sorted edges of equal size.
    ///
    /// The edge holding the smaller of the two minima plays the `A` role, so the
    /// result does not depend on argument order.
    pub fn of_pair(e: &[i64], f: &[i64]) -> Result<Self> {
        if e.len() != f.len() {
            return Err(Error::Arity(e.len(), f.len()));
        }
        if e.is_empty() {
            return Err(Error::Arity(0, 0));
        }
        let mut e = e.to_vec();
        let mut f = f.to_vec();
        e.sort_unstable();
        f.sort_unstable();
        let (first, second) = if e[0] < f[0] { (&e, &f) } else { (&f, &e) };
        let mut word = Vec::with_capacity(2 * e.len());
        let (mut i, mut j) = (0, 0);
        while i < first.len() || j < second.len() {
            if i < first.len() && j < second.len() && first[i] == second[j] {
                return Err(Error::Overlap(first[i]));
            }
            if j == second.len() || (i < first.len() && first[i] < second[j]) {
                word.push(A);
                i += 1;
            } else {
                word.push(B);
                j += 1;
            }
        }
        Ok(Pattern::from_letters_unchecked(word))
    }

    /// All r-patterns in lexicographic order.
    pub fn all(r: usize) -> Vec<Pattern> {
        let mut out = Vec::new();
        if r == 0 {
            return out;
        }
        let mut word = vec![A];
        fn rec(word: &mut Vec<u8>, a_left: usize, b_left: usize, out: &mut Vec<Pattern>) {
            if a_left == 0 && b_left == 0 {
                out.push(Pattern::from_letters_unchecked(word.clone()));
                return;
            }
            if a_left > 0 {
                word.push(A);
                rec(word, a_left - 1, b_left, out);
                word.pop();
            }
            if b_left > 0 {
                word.push(B);
                rec(word, a_left, b_left - 1, out);
                word.pop();
            }
        }
        rec(&mut word, r - 1, r, &mut out);
        out
    }

    pub fn uniformity(&self) -> usize {
        self.0.len() / 2
    }

    pub fn as_str(&self) -> &str {
        // Only ever holds ASCII 'A'/'B'.
        std::str::from_utf8(&self.0).expect("pattern is ASCII")
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    /// Block decomposition into runs `A^k B^k` / `B^k A^k`, read greedily.
    ///
    /// A block starting at position `p` must begin with the maximal run of its
    /// first letter, so the scan is forced; decompositions are unique.
    pub fn blocks(&self) -> Option<Vec<(usize, Sign)>> {
        let w = &self.0;
        let mut blocks = Vec::new();
        let mut p = 0;
        while p < w.len() {
            let c = w[p];
            let mut k = 0;
            while p + k < w.len() && w[p + k] == c {
                k += 1;
            }
            if p + 2 * k > w.len() || w[p + k..p + 2 * k].contains(&c) {
                return None;
            }
            blocks.push((k, if c == A { Sign::Plus } else { Sign::Minus }));
            p += 2 * k;
        }
        Some(blocks)
    }

    pub fn block_partition(&self) -> Option<OrderedPartition> {
        self.blocks()
            .map(|b| OrderedPartition::from_parts_unchecked(b.into_iter().map(|(k, _)| k).collect()))
    }

    /// The sign function τ with `self = P(λ, τ)`, when collectable.
    pub fn sign_function(&self) -> Option<SignFunction> {
        self.blocks()
            .map(|b| SignFunction(b.into_iter().map(|(_, s)| s).collect()))
    }

    pub fn is_collectable(&self) -> bool {
        self.blocks().is_some()
    }

    /// `P(λ, τ)`: block `i` reads `A^λi B^λi` when `τ(i) = +` and `B^λi A^λi` otherwise.
    pub fn from_blocks(partition: &OrderedPartition, signs: &SignFunction) -> Result<Self> {
        if partition.len() != signs.len() {
            return Err(Error::LengthMismatch {
                signs: signs.len(),
                parts: partition.len(),
            });
        }
        let mut word = Vec::with_capacity(2 * partition.total());
        for (&k, &s) in partition.parts().iter().zip(signs.signs()) {
            let (x, y) = match s {
                Sign::Plus => (A, B),
                Sign::Minus => (B, A),
            };
            word.extend(std::iter::repeat_n(x, k));
            word.extend(std::iter::repeat_n(y, k));
        }
        Ok(Pattern::from_letters_unchecked(word))
    }

    fn nth_position(&self, letter: u8, j: usize) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == letter)
            .nth(j - 1)
            .map(|(i, _)| i)
    }

    /// Duplicates the `j`-th `A` and the `j`-th `B` (1-based), raising the uniformity by one.
    pub fn double_letters(&self, j: usize) -> Result<Self> {
        let r = self.uniformity();
        if j == 0 || j > r {
            return Err(Error::IndexOutOfRange { index: j, max: r });
        }
        let pa = self.nth_position(A, j).expect("j <= r");
        let pb = self.nth_position(B, j).expect("j <= r");
        let mut word = Vec::with_capacity(self.0.len() + 2);
        for (i, &c) in self.0.iter().enumerate() {
            word.push(c);
            if i == pa || i == pb {
                word.push(c);
            }
        }
        Ok(Pattern::from_letters_unchecked(word))
    }

    /// Removes the `j`-th `A` and the `j`-th `B` (1-based).
    pub fn omit_letters(&self, j: usize) -> Result<Self> {
        let r = self.uniformity();
        if j == 0 || j > r {
            return Err(Error::IndexOutOfRange { index: j, max: r });
        }
        let pa = self.nth_position(A, j).expect("j <= r");
        let pb = self.nth_position(B, j).expect("j <= r");
        let word: Vec<u8> = self
            .0
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pa && i != pb)
            .map(|(_, &c)| c)
            .collect();
        if word.first() != Some(&A) {
            return Err(Error::InvalidResult(self.to_string()));
        }
        Ok(Pattern::from_letters_unchecked(word))
    }
}

/// All collectable patterns with block partition `λ`, one per sign function.
pub fn patterns_of(partition: &OrderedPartition) -> Vec<Pattern> {
    SignFunction::all(partition.len())
        .iter()
        .map(|tau| Pattern::from_blocks(partition, tau).expect("lengths agree"))
        .collect()
}

/// Collectable r-patterns, in lexicographic order.
pub fn collectable_patterns(r: usize) -> Vec<Pattern> {
    Pattern::all(r).into_iter().filter(Pattern::is_collectable).collect()
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({})", self.as_str())
    }
}

impl FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Pattern::new(s.trim())
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Pattern::new(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A map `{1..s} -> {+1, -1}` with first entry `+1`; written as `"++-"`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignFunction(Vec<Sign>);

impl SignFunction {
    pub fn new(signs: Vec<Sign>) -> Result<Self> {
        if signs.first() != Some(&Sign::Plus) {
            let s: String = signs.iter().map(|&x| sign_char(x)).collect();
            return Err(Error::InvalidSignFunction(s));
        }
        Ok(SignFunction(signs))
    }

    /// All `2^(s-1)` sign functions on `s` entries.
    ///
    /// Ordered by binary counting over entries `2..=s` with `+` before `-`
    /// (entry 2 most significant), which coincides with string order.
    pub fn all(s: usize) -> Vec<SignFunction> {
        if s == 0 {
            return Vec::new();
        }
        (0u64..1 << (s - 1))
            .map(|code| {
                let mut signs = vec![Sign::Plus];
                for k in 1..s {
                    let bit = (code >> (s - 1 - k)) & 1;
                    signs.push(if bit == 0 { Sign::Plus } else { Sign::Minus });
                }
                SignFunction(signs)
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Sign {
        self.0[i]
    }
}

fn sign_char(s: Sign) -> char {
    match s {
        Sign::Plus => '+',
        Sign::Minus => '-',
    }
}

impl fmt::Display for SignFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            write!(f, "{}", sign_char(s))?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignFunction({self})")
    }
}

impl FromStr for SignFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                _ => Err(Error::InvalidSignFunction(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        SignFunction::new(signs)
    }
}

impl Serialize for SignFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Bit-packed pattern word (bit `k` set when letter `k` is `B`), for hot loops.
///
/// Both slices must be sorted and disjoint with equal length at most 32.
pub(crate) fn pair_code(e: &[i64], f: &[i64]) -> u64 {
    let (first, second) = if e[0] < f[0] { (e, f) } else { (f, e) };
    let mut code = 0u64;
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < first.len() || j < second.len() {
        if j == second.len() || (i < first.len() && first[i] < second[j]) {
            i += 1;
        } else {
            code |= 1 << k;
            j += 1;
        }
        k += 1;
    }
    code
}

pub(crate) fn pattern_from_code(code: u64, r: usize) -> Pattern {
    let word = (0..2 * r)
        .map(|k| if code >> k & 1 == 1 { B } else { A })
        .collect();
    Pattern::from_letters_unchecked(word)
}

pub(crate) fn code_of(p: &Pattern) -> u64 {
    p.0.iter()
        .enumerate()
        .fold(0, |acc, (k, &c)| if c == B { acc | 1 << k } else { acc })
}
