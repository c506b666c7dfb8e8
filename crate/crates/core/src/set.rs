//! Fixed-width bit sets over point indices.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub(crate) const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A subset of `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    n: usize,
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(n: usize) -> Self {
        PointSet { n, words: vec![0; words_for(n)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = PointSet { n, words: vec![!0; words_for(n)] };
        s.trim();
        s
    }

    pub fn singleton(n: usize, x: usize) -> Result<Self> {
        Self::from_indices(n, [x])
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Result<Self> {
        let mut s = Self::empty(n);
        for i in indices {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            s.insert(i);
        }
        Ok(s)
    }

    pub(crate) fn from_words(n: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(n));
        let mut s = PointSet { n, words };
        s.trim();
        s
    }

    fn trim(&mut self) {
        let rem = self.n % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Size of the ambient index set.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        x < self.n && self.words[x / WORD] >> (x % WORD) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, x: usize) {
        assert!(x < self.n, "index {x} out of range for {} points", self.n);
        self.words[x / WORD] |= 1 << (x % WORD);
    }

    #[inline]
    pub fn remove(&mut self, x: usize) {
        if x < self.n {
            self.words[x / WORD] &= !(1 << (x % WORD));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> Ones<'_> {
        Ones::new(&self.words)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> PointSet {
        let mut s = PointSet { n: self.n, words: self.words.iter().map(|w| !w).collect() };
        s.trim();
        s
    }

    pub fn union_with(&mut self, other: &PointSet) {
        or_into(&mut self.words, &other.words);
    }

    pub fn intersect_with(&mut self, other: &PointSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &PointSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        !self.is_disjoint(other)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Deserializes from an index list; the universe is taken as one past the largest index.
/// Callers that know the ambient size should rebuild with [`PointSet::from_indices`].
impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<usize> = Vec::deserialize(deserializer)?;
        let n = v.iter().max().map_or(0, |m| m + 1);
        PointSet::from_indices(n, v).map_err(serde::de::Error::custom)
    }
}

#[inline]
pub(crate) fn or_into(dst: &mut [u64], src: &[u64]) {
    for (a, b) in dst.iter_mut().zip(src) {
        *a |= b;
    }
}

/// Iterator over the set bits of a word slice.
pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> Ones<'a> {
    pub(crate) fn new(words: &'a [u64]) -> Self {
        Ones { words, idx: 0, cur: words.first().copied().unwrap_or(0) }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + t);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}
