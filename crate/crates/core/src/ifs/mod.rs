//! The four-map system, symbolic words and addresses, and the address map.

mod cover;

use std::fmt;
use std::str::FromStr;

use crate::numeric::{Params, Scalar, Span};
use crate::{Error, Result};

pub use cover::{covers_disjoint_at_depth, window_pieces, IntervalCover, SetTag};

/// A finite word over the letters `1..=4`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| !(1..=4).contains(&l)) {
            return Err(Error::BadLetter(bad));
        }
        Ok(Word(letters))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// `letter` repeated `count` times.
    pub fn repeat(letter: u8, count: usize) -> Result<Self> {
        Word::new(vec![letter; count])
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, letter: u8) -> Result<()> {
        if !(1..=4).contains(&letter) {
            return Err(Error::BadLetter(letter));
        }
        self.0.push(letter);
        Ok(())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Letter-wise image under the reflection `i ↦ i + 2 (mod 4)`.
    pub fn reflected(&self) -> Word {
        Word(self.0.iter().map(|&l| reflect_letter(l)).collect())
    }
}

fn reflect_letter(l: u8) -> u8 {
    (l + 1) % 4 + 1
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.0)
    }
}

fn write_letters(f: &mut fmt::Formatter<'_>, letters: &[u8]) -> fmt::Result {
    for (i, l) in letters.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

/// An eventually periodic infinite word, or a truncated one when the period
/// is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Address {
    pub preperiod: Word,
    pub period: Word,
}

impl Address {
    pub fn periodic(preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::NotPeriodic);
        }
        Ok(Address { preperiod, period })
    }

    pub fn truncated(word: Word) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::EmptyAddress);
        }
        Ok(Address {
            preperiod: word,
            period: Word::empty(),
        })
    }

    pub fn is_periodic(&self) -> bool {
        !self.period.is_empty()
    }

    /// Letter at position `k` (0-based); `None` past the end of a truncated address.
    pub fn letter(&self, k: usize) -> Option<u8> {
        let pre = self.preperiod.letters();
        if k < pre.len() {
            return Some(pre[k]);
        }
        let per = self.period.letters();
        if per.is_empty() {
            None
        } else {
            Some(per[(k - pre.len()) % per.len()])
        }
    }

    /// First `len` letters (fewer for a short truncated address).
    pub fn prefix(&self, len: usize) -> Word {
        Word((0..len).map_while(|k| self.letter(k)).collect())
    }

    /// Length of the longest common prefix; `None` if the addresses are equal
    /// as infinite words.
    pub fn common_prefix_len(&self, other: &Address) -> Option<usize> {
        let bound = self.preperiod.len().max(other.preperiod.len())
            + self.period.len().max(1) * other.period.len().max(1);
        for k in 0..=bound {
            match (self.letter(k), other.letter(k)) {
                (Some(a), Some(b)) if a == b => continue,
                (None, None) => return None,
                _ => return Some(k),
            }
        }
        None
    }

    /// Length of the shortest preperiod and period describing the same word.
    pub fn normalized(&self) -> Address {
        if self.period.is_empty() {
            return self.clone();
        }
        let per = self.period.letters();
        let mut period = per.to_vec();
        for d in 1..=per.len() {
            if per.len() % d == 0 && (0..per.len()).all(|i| per[i] == per[i % d]) {
                period = per[..d].to_vec();
                break;
            }
        }
        let mut pre = self.preperiod.letters().to_vec();
        while let Some(&last) = pre.last() {
            if last == period[period.len() - 1] {
                pre.pop();
                period.rotate_right(1);
            } else {
                break;
            }
        }
        Address {
            preperiod: Word(pre),
            period: Word(period),
        }
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, self.preperiod.letters())?;
        if !self.period.is_empty() {
            if !self.preperiod.is_empty() {
                f.write_str(",")?;
            }
            f.write_str("(")?;
            write_letters(f, self.period.letters())?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn parse_letters(s: &str, whole: &str) -> Result<Vec<u8>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            match tok.parse::<u8>() {
                Ok(l) if (1..=4).contains(&l) => Ok(l),
                Ok(l) => Err(Error::BadLetter(l)),
                Err(_) => Err(Error::ParseAddress(whole.to_string())),
            }
        })
        .collect()
}

impl FromStr for Address {
    type Err = Error;

    /// Parses `"4,1,(2)"`: comma-separated letters, optionally ending with a
    /// parenthesized period.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::EmptyAddress);
        }
        match t.find('(') {
            None => Address::truncated(Word(parse_letters(t, s)?)),
            Some(open) => {
                let body = t[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::ParseAddress(s.to_string()))?;
                let head = t[..open].trim_end();
                let head = match head.strip_suffix(',') {
                    Some(h) => h,
                    None if head.is_empty() => head,
                    None => return Err(Error::ParseAddress(s.to_string())),
                };
                let period = parse_letters(body, s)?;
                if period.is_empty() {
                    return Err(Error::ParseAddress(s.to_string()));
                }
                Address::periodic(Word(parse_letters(head, s)?), Word(period))
            }
        }
    }
}

/// `x ↦ scale·x + shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine<S> {
    pub scale: S,
    pub shift: S,
}

impl<S: Scalar> Affine<S> {
    pub fn identity() -> Self {
        Affine {
            scale: S::one(),
            shift: S::zero(),
        }
    }

    pub fn apply(&self, x: &S) -> S {
        self.scale.clone() * x.clone() + self.shift.clone()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Affine<S>) -> Affine<S> {
        Affine {
            scale: self.scale.clone() * inner.scale.clone(),
            shift: self.scale.clone() * inner.shift.clone() + self.shift.clone(),
        }
    }

    /// Image of a span; the scale is positive for every map of the system.
    pub fn apply_span(&self, s: &Span<S>) -> Span<S> {
        Span::new(self.apply(&s.lo), self.apply(&s.hi))
    }

    /// Fixed point of a contraction.
    pub fn fixed_point(&self) -> S {
        self.shift.clone() / (S::one() - self.scale.clone())
    }
}

/// `S1(x) = px`, `S2(x) = qx`, `S3(x) = px + 1 - p`, `S4(x) = qx + 1 - q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilaritySystem<S> {
    params: Params<S>,
}

impl<S: Scalar> SimilaritySystem<S> {
    pub fn new(params: Params<S>) -> Self {
        SimilaritySystem { params }
    }

    pub fn params(&self) -> &Params<S> {
        &self.params
    }

    /// The map with index `letter` (`1..=4`).
    pub fn map(&self, letter: u8) -> Affine<S> {
        let ratio = match letter {
            1 | 3 => self.params.p().clone(),
            2 | 4 => self.params.q().clone(),
            _ => panic!("letter {letter} outside 1..=4"),
        };
        let shift = if letter >= 3 {
            S::one() - ratio.clone()
        } else {
            S::zero()
        };
        Affine {
            scale: ratio,
            shift,
        }
    }

    /// `S_{j1} ∘ S_{j2} ∘ … ∘ S_{jn}`.
    pub fn word_map(&self, w: &Word) -> Affine<S> {
        w.letters()
            .iter()
            .fold(Affine::identity(), |acc, &l| acc.compose(&self.map(l)))
    }

    /// `S_{j1}(S_{j2}(…S_{jn}(x)))`.
    pub fn apply_word(&self, w: &Word, x: &S) -> S {
        w.letters()
            .iter()
            .rev()
            .fold(x.clone(), |acc, &l| self.map(l).apply(&acc))
    }

    /// The point `π(a)`. Periodic addresses give a degenerate span (a point
    /// enclosure in interval mode); truncated ones give `S_w([0, 1])`.
    pub fn address_point(&self, a: &Address) -> Result<Span<S>> {
        if a.preperiod.is_empty() && a.period.is_empty() {
            return Err(Error::EmptyAddress);
        }
        let head = self.word_map(&a.preperiod);
        if a.period.is_empty() {
            return Ok(head.apply_span(&Span::unit()));
        }
        let x = self.word_map(&a.period).fixed_point();
        Ok(Span::point(head.apply(&x)))
    }

    /// Largest contraction ratio, `max(p, q)`.
    pub fn lipschitz(&self) -> S {
        self.params.lipschitz()
    }

    /// Upper bound `δ / (1 - ρ)` on `|π(σ) - π'(σ)|` over all addresses, where
    /// `δ = sup |S_i - S'_i|` on `[0, 1]` and `ρ` is the largest ratio of both
    /// systems.
    pub fn displacement_bound(&self, other: &SimilaritySystem<S>) -> S {
        let dp = (self.params.p().clone() - other.params.p().clone()).magnitude();
        let dq = (self.params.q().clone() - other.params.q().clone()).magnitude();
        let delta = dp.max_with(&dq);
        let rho = self.lipschitz().max_with(&other.lipschitz());
        delta / (S::one() - rho)
    }

    /// The system with `p` and `q` exchanged.
    pub fn swapped(&self) -> Self {
        SimilaritySystem::new(self.params.swapped())
    }
}
