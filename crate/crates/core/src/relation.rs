//! Relations on `0..n` stored as bit rows, and the set-valued calculus built on them.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scc::Condensation;
use crate::set::{or_into, words_for, Ones, PointSet, WORD};

/// Above this size `orbit` goes through the condensation instead of Warshall.
pub const WARSHALL_LIMIT: usize = 256;

/// Iteration guard for limit-set detection.
pub const LIMIT_SET_CAP: usize = 4 << 20;

const PAR_ROWS: usize = 512;

/// A relation `R ⊂ X × X` on `n` points; bit `(x, y)` is set iff `(x, y) ∈ R`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RelationRepr", into = "RelationRepr")]
pub struct Relation {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RelationRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<RelationRepr> for Relation {
    type Error = Error;

    fn try_from(r: RelationRepr) -> Result<Self> {
        Relation::from_edges(r.n, r.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<Relation> for RelationRepr {
    fn from(r: Relation) -> Self {
        RelationRepr { n: r.n, edges: r.edges().map(|(x, y)| [x, y]).collect() }
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Relation").field("n", &self.n).field("edges", &self.edges().collect::<Vec<_>>()).finish()
    }
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        let stride = words_for(n);
        Relation { n, stride, bits: vec![0; stride * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for x in 0..n {
            r.insert(x, x);
        }
        r
    }

    pub fn full(n: usize) -> Self {
        let full = PointSet::full(n);
        let mut r = Self::empty(n);
        for x in 0..n {
            r.row_mut(x).copy_from_slice(full.words());
        }
        r
    }

    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut r = Self::empty(n);
        for (x, y) in edges {
            for i in [x, y] {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
            }
            r.insert(x, y);
        }
        Ok(r)
    }

    /// Graph of a map given as an image array.
    pub fn from_map(map: &[usize]) -> Result<Self> {
        Self::from_edges(map.len(), map.iter().copied().enumerate())
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(n);
        for x in 0..n {
            for y in 0..n {
                if f(x, y) {
                    r.insert(x, y);
                }
            }
        }
        r
    }

    pub fn from_rows(rows: Vec<PointSet>) -> Result<Self> {
        let n = rows.len();
        let mut r = Self::empty(n);
        for (x, row) in rows.iter().enumerate() {
            if row.universe() != n {
                return Err(Error::DimensionMismatch { left: n, right: row.universe() });
            }
            r.row_mut(x).copy_from_slice(row.words());
        }
        Ok(r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.n && y < self.n && self.bits[x * self.stride + y / WORD] >> (y % WORD) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, x: usize, y: usize) {
        assert!(x < self.n && y < self.n, "edge ({x}, {y}) out of range for {} points", self.n);
        self.bits[x * self.stride + y / WORD] |= 1 << (y % WORD);
    }

    pub fn remove(&mut self, x: usize, y: usize) {
        if x < self.n && y < self.n {
            self.bits[x * self.stride + y / WORD] &= !(1 << (y % WORD));
        }
    }

    #[inline]
    pub(crate) fn row_words(&self, x: usize) -> &[u64] {
        &self.bits[x * self.stride..(x + 1) * self.stride]
    }

    #[inline]
    fn row_mut(&mut self, x: usize) -> &mut [u64] {
        &mut self.bits[x * self.stride..(x + 1) * self.stride]
    }

    /// Successors of `x` in increasing order.
    pub fn successors(&self, x: usize) -> Ones<'_> {
        Ones::new(self.row_words(x))
    }

    /// `R(x)` as a set.
    pub fn row(&self, x: usize) -> PointSet {
        PointSet::from_words(self.n, self.row_words(x).to_vec())
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |x| self.successors(x).map(move |y| (x, y)))
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.edge_count() == self.n * self.n
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|x| self.contains(x, x))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == inverse(self)
    }

    pub fn is_transitive(&self) -> bool {
        compose(self, self).map(|rr| rr.is_subset(self)).unwrap_or(false)
    }

    /// Graph of a permutation, if this relation is one.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        let mut map = Vec::with_capacity(self.n);
        let mut hit = PointSet::empty(self.n);
        for x in 0..self.n {
            let mut it = self.successors(x);
            let y = it.next()?;
            if it.next().is_some() || hit.contains(y) {
                return None;
            }
            hit.insert(y);
            map.push(y);
        }
        Some(map)
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        check_dims(self.n, other.n)?;
        let mut r = self.clone();
        or_into(&mut r.bits, &other.bits);
        Ok(r)
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        check_dims(self.n, other.n)?;
        let mut r = self.clone();
        for (a, b) in r.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
        Ok(r)
    }

    /// Restriction to `a × a`, reindexed by the increasing enumeration of `a`.
    pub fn restrict(&self, a: &PointSet) -> Relation {
        let idx: Vec<usize> = a.iter().collect();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &x) in idx.iter().enumerate() {
            pos[x] = i;
        }
        let mut r = Relation::empty(idx.len());
        for (i, &x) in idx.iter().enumerate() {
            for y in self.successors(x) {
                if pos[y] != usize::MAX {
                    r.insert(i, pos[y]);
                }
            }
        }
        r
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

fn check_set(r: &Relation, a: &PointSet) -> Result<()> {
    check_dims(r.n, a.universe())
}

/// `s ∘ r`: `(x, z)` is related iff `(x, y) ∈ r` and `(y, z) ∈ s` for some `y`.
pub fn compose(s: &Relation, r: &Relation) -> Result<Relation> {
    check_dims(s.n, r.n)?;
    let n = r.n;
    let mut out = Relation::empty(n);
    if n == 0 {
        return Ok(out);
    }
    let stride = out.stride;
    let gather = |(x, dst): (usize, &mut [u64])| {
        for y in r.successors(x) {
            or_into(dst, s.row_words(y));
        }
    };
    if n >= PAR_ROWS {
        out.bits.par_chunks_mut(stride).enumerate().for_each(gather);
    } else {
        out.bits.chunks_mut(stride).enumerate().for_each(gather);
    }
    Ok(out)
}

/// Transpose.
pub fn inverse(r: &Relation) -> Relation {
    let mut out = Relation::empty(r.n);
    for (x, y) in r.edges() {
        out.insert(y, x);
    }
    out
}

/// `R(A) = ⋃_{x ∈ A} R(x)`.
pub fn image(r: &Relation, a: &PointSet) -> Result<PointSet> {
    check_set(r, a)?;
    let mut out = vec![0u64; r.stride];
    for x in a.iter() {
        or_into(&mut out, r.row_words(x));
    }
    Ok(PointSet::from_words(r.n, out))
}

/// `R⁻¹(B)`, the points with at least one successor in `B`.
pub fn preimage(r: &Relation, b: &PointSet) -> Result<PointSet> {
    check_set(r, b)?;
    let mut out = PointSet::empty(r.n);
    for x in 0..r.n {
        if r.row_words(x).iter().zip(b.words()).any(|(p, q)| p & q != 0) {
            out.insert(x);
        }
    }
    Ok(out)
}

/// `R*(B) = {x : R(x) ⊂ B}`, computed as `X \ R⁻¹(X \ B)`.
pub fn star(r: &Relation, b: &PointSet) -> Result<PointSet> {
    Ok(preimage(r, &b.complement())?.complement())
}

/// Transitive closure `⋃_{k ≥ 1} Rᵏ`.
pub fn orbit(r: &Relation) -> Relation {
    if r.n > WARSHALL_LIMIT {
        orbit_condensed(r)
    } else {
        orbit_warshall(r)
    }
}

/// Warshall closure on bit rows.
pub fn orbit_warshall(r: &Relation) -> Relation {
    let mut c = r.clone();
    let stride = c.stride;
    for k in 0..c.n {
        let kw = k / WORD;
        let kb = 1u64 << (k % WORD);
        let row_k: Vec<u64> = c.row_words(k).to_vec();
        for (i, row) in c.bits.chunks_mut(stride).enumerate() {
            if i != k && row[kw] & kb != 0 {
                or_into(row, &row_k);
            }
        }
    }
    c
}

/// Closure through the strongly connected components and reachability on their DAG.
pub fn orbit_condensed(r: &Relation) -> Relation {
    let cond = Condensation::new(r);
    let n = r.n;
    let stride = words_for(n);
    let k = cond.components.len();
    let mut reach: Vec<Vec<u64>> = vec![Vec::new(); k];
    let mut seen = vec![usize::MAX; k];
    // Tarjan emits sinks first, so successors are finished before their predecessors.
    for c in 0..k {
        let mut acc = vec![0u64; stride];
        for &x in &cond.components[c] {
            or_into(&mut acc, r.row_words(x));
            for y in r.successors(x) {
                let d = cond.component_of[y];
                if d != c && seen[d] != c {
                    seen[d] = c;
                    or_into(&mut acc, &reach[d]);
                }
            }
        }
        if cond.cyclic[c] {
            for &x in &cond.components[c] {
                acc[x / WORD] |= 1 << (x % WORD);
            }
        }
        reach[c] = acc;
    }
    let mut out = Relation::empty(n);
    for x in 0..n {
        let c = cond.component_of[x];
        out.row_mut(x).copy_from_slice(&reach[c]);
    }
    out
}

/// `R_± = R ∪ 1 ∪ R⁻¹`.
pub fn rpm(r: &Relation) -> Relation {
    let mut out = inverse(r);
    or_into(&mut out.bits, &r.bits);
    for x in 0..r.n {
        out.insert(x, x);
    }
    out
}

/// Points related to themselves.
pub fn cyclic_set(r: &Relation) -> PointSet {
    let mut s = PointSet::empty(r.n);
    for x in 0..r.n {
        if r.contains(x, x) {
            s.insert(x);
        }
    }
    s
}

/// Eventually periodic behaviour of the sequence `Rⁿ(A)`, `n ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitSetResult {
    pub period: usize,
    pub tail_start: usize,
    pub limsup_set: PointSet,
}

/// Detects the periodic tail of `A, R(A), R²(A), …` and returns the union over one period.
pub fn omega_set(r: &Relation, a: &PointSet) -> Result<LimitSetResult> {
    check_set(r, a)?;
    let mut seen: HashMap<PointSet, usize> = HashMap::new();
    let mut history: Vec<PointSet> = Vec::new();
    let mut cur = a.clone();
    for step in 0..LIMIT_SET_CAP {
        if let Some(&start) = seen.get(&cur) {
            let mut limsup = PointSet::empty(r.n);
            for s in &history[start..] {
                limsup.union_with(s);
            }
            return Ok(LimitSetResult { period: step - start, tail_start: start, limsup_set: limsup });
        }
        let next = image(r, &cur)?;
        seen.insert(cur.clone(), step);
        history.push(cur);
        cur = next;
    }
    Err(Error::IterationCap(LIMIT_SET_CAP))
}

/// Row `x` is the limit set of `{x}`.
pub fn omega_relation(r: &Relation) -> Result<Relation> {
    let rows = (0..r.n)
        .map(|x| omega_set(r, &PointSet::singleton(r.n, x)?).map(|l| l.limsup_set))
        .collect::<Result<Vec<_>>>()?;
    Relation::from_rows(rows)
}

/// Limit superior of the powers `R, R², …`: the union of the powers on their periodic tail.
pub fn power_limsup(r: &Relation) -> Result<Relation> {
    let mut seen: HashMap<Relation, usize> = HashMap::new();
    let mut history: Vec<Relation> = Vec::new();
    let mut cur = r.clone();
    for step in 0..LIMIT_SET_CAP {
        if let Some(&start) = seen.get(&cur) {
            let mut out = Relation::empty(r.n);
            for p in &history[start..] {
                or_into(&mut out.bits, &p.bits);
            }
            return Ok(out);
        }
        let next = compose(r, &cur)?;
        seen.insert(cur.clone(), step);
        history.push(cur);
        cur = next;
    }
    Err(Error::IterationCap(LIMIT_SET_CAP))
}

/// `{k ≤ n_max : Rᵏ(U) ∩ V ≠ ∅}`.
pub fn hitting_times(r: &Relation, u: &PointSet, v: &PointSet, n_max: usize) -> Result<Vec<usize>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    check_set(r, u)?;
    check_set(r, v)?;
    let mut out = Vec::new();
    let mut cur = u.clone();
    for k in 1..=n_max {
        cur = image(r, &cur)?;
        if cur.intersects(v) {
            out.push(k);
        }
    }
    Ok(out)
}
