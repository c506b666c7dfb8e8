//! Chain relations at a fixed scale and everything derived from them.
//!
//! With tolerance `E` (the closed `ε`-ball relation unless given explicitly) the one-step
//! relation is `Q = E ∘ R ∘ E` and the chain relation is `C = O(Q)`, its transitive closure.
//! Inward sets, attractors and repellors are all taken with respect to `Q`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::relation::{compose, cyclic_set, image, inverse, orbit, rpm, Relation};
use crate::scc::Condensation;
use crate::set::PointSet;
use crate::space::{vbar, FiniteSpace, SystemModel};

/// Largest condensation for which the full attractor lattice is enumerated.
pub const ATTRACTOR_ENUMERATION_LIMIT: usize = 20;

/// Relation, tolerance, one-step relation and chain relation at one scale.
#[derive(Clone, Debug)]
pub struct ChainContext {
    eps: f64,
    relation: Relation,
    tolerance: Relation,
    step: Relation,
    chain: Relation,
}

/// Builds the chain context of `system` at scale `eps` with the closed-ball tolerance.
pub fn chain_relation(system: &SystemModel, eps: f64) -> Result<ChainContext> {
    ChainContext::new(&system.space, &system.relation, eps)
}

impl ChainContext {
    pub fn new(space: &FiniteSpace, relation: &Relation, eps: f64) -> Result<Self> {
        let tolerance = vbar(space, eps)?;
        Self::with_tolerance(relation, tolerance, eps)
    }

    /// Graph mode: `tolerance` replaces the ball relation and `eps` is kept only as a label.
    pub fn with_tolerance(relation: &Relation, tolerance: Relation, eps: f64) -> Result<Self> {
        if relation.n() != tolerance.n() {
            return Err(Error::DimensionMismatch { left: relation.n(), right: tolerance.n() });
        }
        if !tolerance.is_reflexive() || !tolerance.is_symmetric() {
            return Err(Error::InvalidTolerance);
        }
        let step = compose(&tolerance, &compose(relation, &tolerance)?)?;
        let chain = orbit(&step);
        Ok(ChainContext { eps, relation: relation.clone(), tolerance, step, chain })
    }

    pub fn n(&self) -> usize {
        self.relation.n()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn tolerance(&self) -> &Relation {
        &self.tolerance
    }

    /// `Q = E ∘ R ∘ E`.
    pub fn step(&self) -> &Relation {
        &self.step
    }

    /// `C = O(Q)`.
    pub fn chain(&self) -> &Relation {
        &self.chain
    }

    pub fn is_chain_transitive(&self) -> bool {
        self.chain.is_full()
    }

    pub fn is_chain_recurrent(&self) -> bool {
        cyclic_set(&self.chain).is_full()
    }

    pub fn chain_recurrent_set(&self) -> PointSet {
        cyclic_set(&self.chain)
    }

    pub fn chain_components(&self) -> ChainComponents {
        let condensation = Condensation::new(&self.step);
        let dag = condensation.dag_edges(&self.step);
        let mut classes: Vec<Vec<usize>> = condensation
            .components
            .iter()
            .zip(&condensation.cyclic)
            .filter(|(_, &c)| c)
            .map(|(comp, _)| comp.clone())
            .collect();
        classes.sort();
        ChainComponents { classes, condensation, dag }
    }

    /// Points whose forward orbit under `R` is `E`-dense.
    pub fn transitive_points(&self) -> PointSet {
        trans_orbit(&self.relation, &self.tolerance)
    }

    /// `Q(U) ⊂ U`.
    pub fn is_inward(&self, u: &PointSet) -> Result<bool> {
        Ok(image(&self.step, u)?.is_subset(u))
    }

    pub fn attractor_from_inward(&self, u: &PointSet) -> Result<AttractorRepellorPair> {
        let escaped = image(&self.step, u)?.difference(u);
        if !escaped.is_empty() {
            return Err(Error::NotInward(escaped.len()));
        }
        let attractor = decreasing_limit(&self.step, u)?;
        let repellor = decreasing_limit(&inverse(&self.step), &u.complement())?;
        Ok(AttractorRepellorPair { inward: u.clone(), attractor, repellor })
    }

    /// An attractor containing `x` but not `y`, built from `{x} ∪ C(x)`, or `None` when `y ∈ C(x)`.
    pub fn separating_attractor(&self, x: usize, y: usize) -> Result<Option<AttractorRepellorPair>> {
        let n = self.n();
        for i in [x, y] {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
        }
        if self.chain.contains(x, y) {
            return Ok(None);
        }
        let mut u = self.chain.row(x);
        u.insert(x);
        self.attractor_from_inward(&u).map(Some)
    }

    /// A split into two forward-invariant parts with no tolerance edge between them, if one exists.
    ///
    /// The parts are unions of classes of `O(E ∘ R_± ∘ E)`; no split exists iff that
    /// relation is full.
    pub fn decomposition_search(&self) -> Result<Option<(PointSet, PointSet)>> {
        let classes = decomposition_relation(&self.relation, &self.tolerance)?;
        if classes.is_full() {
            return Ok(None);
        }
        let first = classes.row(0);
        let rest = first.complement();
        Ok(Some((first, rest)))
    }

    /// Every attractor, from all inward unions of condensation components.
    pub fn attractors(&self) -> Result<Vec<AttractorRepellorPair>> {
        let cond = Condensation::new(&self.step);
        let k = cond.len();
        if k > ATTRACTOR_ENUMERATION_LIMIT {
            return Err(Error::TooManyComponents { count: k, limit: ATTRACTOR_ENUMERATION_LIMIT });
        }
        let mut succ = vec![0u32; k];
        for (c, d) in cond.dag_edges(&self.step) {
            succ[c] |= 1 << d;
        }
        let mut out: Vec<AttractorRepellorPair> = Vec::new();
        for mask in 0u32..(1u32 << k) {
            let closed = (0..k).all(|c| mask >> c & 1 == 0 || succ[c] & !mask == 0);
            if !closed {
                continue;
            }
            let u = PointSet::from_indices(
                self.n(),
                (0..k).filter(|c| mask >> c & 1 == 1).flat_map(|c| cond.components[c].iter().copied()),
            )?;
            let pair = self.attractor_from_inward(&u)?;
            if !out.iter().any(|p| p.attractor == pair.attractor) {
                out.push(pair);
            }
        }
        out.sort_by(|a, b| {
            a.attractor.len().cmp(&b.attractor.len()).then(a.attractor.to_vec().cmp(&b.attractor.to_vec()))
        });
        Ok(out)
    }

    pub fn report(&self) -> Result<AnalysisReport> {
        let components = self.chain_components().classes;
        let decomposition = self.decomposition_search()?.map(|(a, b)| (a.to_vec(), b.to_vec()));
        Ok(AnalysisReport {
            eps: self.eps,
            chain_transitive: self.is_chain_transitive(),
            chain_recurrent: self.is_chain_recurrent(),
            components,
            decomposition,
        })
    }

    /// Graphviz rendering of the condensation of `Q`. Components that no edge leaves are
    /// attractor-closed and drawn filled.
    pub fn condensation_dot(&self) -> String {
        let comps = self.chain_components();
        let cond = &comps.condensation;
        let mut has_out = vec![false; cond.len()];
        for &(c, _) in &comps.dag {
            has_out[c] = true;
        }
        let mut s = String::from("digraph condensation {\n  rankdir=TB;\n  node [shape=box];\n");
        for (c, members) in cond.components.iter().enumerate() {
            let label = member_label(members);
            let style = if !has_out[c] { ", style=filled, fillcolor=lightgray" } else { "" };
            let shape = if cond.cyclic[c] { "" } else { ", shape=ellipse" };
            let _ = writeln!(s, "  c{c} [label=\"{label}\"{style}{shape}];");
        }
        for &(c, d) in &comps.dag {
            let _ = writeln!(s, "  c{c} -> c{d};");
        }
        s.push_str("}\n");
        s
    }
}

fn member_label(members: &[usize]) -> String {
    const SHOWN: usize = 8;
    let head: Vec<String> = members.iter().take(SHOWN).map(|m| m.to_string()).collect();
    if members.len() > SHOWN {
        format!("{{{}, … ({} points)}}", head.join(", "), members.len())
    } else {
        format!("{{{}}}", head.join(", "))
    }
}

/// Iterates `A ↦ Q(A)` from an inward set until it stops shrinking.
fn decreasing_limit(step: &Relation, u: &PointSet) -> Result<PointSet> {
    let mut cur = u.clone();
    loop {
        let next = image(step, &cur)?;
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

/// `{x : E(O R(x)) = X}`.
pub fn trans_orbit(relation: &Relation, tolerance: &Relation) -> PointSet {
    let orb = orbit(relation);
    let mut out = PointSet::empty(relation.n());
    for x in 0..relation.n() {
        let thick = image(tolerance, &orb.row(x)).expect("dimensions checked by caller");
        if thick.is_full() {
            out.insert(x);
        }
    }
    out
}

/// `O(E ∘ R_± ∘ E)`, an equivalence relation whose classes are the finest invariant
/// tolerance-separated pieces.
pub fn decomposition_relation(relation: &Relation, tolerance: &Relation) -> Result<Relation> {
    Ok(orbit(&compose(tolerance, &compose(&rpm(relation), tolerance)?)?))
}

/// Whether `C R` and `C R_±` coincide at this tolerance.
pub fn symmetrized_chain_agrees(relation: &Relation, tolerance: &Relation) -> Result<bool> {
    let plain = ChainContext::with_tolerance(relation, tolerance.clone(), f64::NAN)?;
    let sym = ChainContext::with_tolerance(&rpm(relation), tolerance.clone(), f64::NAN)?;
    Ok(plain.chain == sym.chain)
}

/// Chain classes and the condensation of `Q`.
#[derive(Clone, Debug)]
pub struct ChainComponents {
    /// Mutual chain-reachability classes of the chain recurrent set, sorted.
    pub classes: Vec<Vec<usize>>,
    pub condensation: Condensation,
    pub dag: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttractorRepellorPair {
    pub inward: PointSet,
    pub attractor: PointSet,
    pub repellor: PointSet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub eps: f64,
    pub chain_transitive: bool,
    pub chain_recurrent: bool,
    pub components: Vec<Vec<usize>>,
    pub decomposition: Option<(Vec<usize>, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub chain_transitive: bool,
    pub chain_recurrent: bool,
    pub components: usize,
    pub decomposable: bool,
}

/// Verdicts over a strictly increasing list of scales, checking that the chain relations grow.
pub fn sweep(system: &SystemModel, eps_list: &[f64]) -> Result<Vec<SweepRow>> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("scale list is empty".into()));
    }
    for w in eps_list.windows(2) {
        if w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidParameter(format!(
                "scales must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let contexts = eps_list.par_iter().map(|&e| chain_relation(system, e)).collect::<Result<Vec<_>>>()?;
    for (i, w) in contexts.windows(2).enumerate() {
        if !w[0].chain.is_subset(&w[1].chain) {
            return Err(Error::MonotonicityViolated { lower: eps_list[i], upper: eps_list[i + 1] });
        }
    }
    contexts
        .iter()
        .map(|ctx| {
            Ok(SweepRow {
                eps: ctx.eps,
                chain_transitive: ctx.is_chain_transitive(),
                chain_recurrent: ctx.is_chain_recurrent(),
                components: ctx.chain_components().classes.len(),
                decomposable: ctx.decomposition_search()?.is_some(),
            })
        })
        .collect()
}
