//! Symmetries of a space at a fixed scale.
//!
//! The homeomorphism group is modelled by the automorphisms of the labelled tolerance graph:
//! permutations preserving the closed `ε`-ball relation and point labels. Every verdict here
//! is a statement about that graph, at that scale.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::chain::ChainContext;
use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::set::PointSet;
use crate::space::{vbar, FiniteSpace, SystemModel};

/// Default number of search-tree nodes per automorphism or isomorphism search.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "CHAINREC_BUDGET";

/// Graphs up to this size get hop-distance profiles as extra initial invariants.
const HOP_PROFILE_LIMIT: usize = 1024;

pub fn budget_from_env() -> u64 {
    std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

/// Undirected tolerance graph without loops, with a color per point taken from its label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToleranceGraph {
    adj: Vec<Vec<usize>>,
    colors: Vec<u32>,
}

fn label_colors(n: usize, labels: Option<&[String]>) -> Vec<u32> {
    match labels {
        None => vec![0; n],
        Some(l) => {
            let mut names: Vec<&str> = l.iter().map(String::as_str).collect();
            names.sort_unstable();
            names.dedup();
            l.iter().map(|s| names.binary_search(&s.as_str()).expect("label present") as u32).collect()
        }
    }
}

impl ToleranceGraph {
    /// From a reflexive symmetric relation.
    pub fn from_relation(e: &Relation, labels: Option<&[String]>) -> Result<Self> {
        if !e.is_reflexive() || !e.is_symmetric() {
            return Err(Error::InvalidTolerance);
        }
        let n = e.n();
        if let Some(l) = labels {
            if l.len() != n {
                return Err(Error::DimensionMismatch { left: n, right: l.len() });
            }
        }
        let adj = (0..n).map(|x| e.successors(x).filter(|&y| y != x).collect()).collect();
        Ok(ToleranceGraph { adj, colors: label_colors(n, labels) })
    }

    /// Closed `ε`-ball graph built without a dense relation; low-dimensional coordinates are
    /// bucketed into a grid of side `ε`.
    pub fn from_space(space: &FiniteSpace, eps: f64) -> Result<Self> {
        if eps.is_nan() || eps < 0.0 {
            return Err(Error::NegativeScale(eps));
        }
        let n = space.n();
        let mut adj = vec![Vec::new(); n];
        match space.coords() {
            Some(coords) if eps > 0.0 && coords[0].len() <= 3 && n > 512 => {
                let cell = |c: &[f64]| -> Vec<i64> { c.iter().map(|v| (v / eps).floor() as i64).collect() };
                let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
                for (x, c) in coords.iter().enumerate() {
                    grid.entry(cell(c)).or_default().push(x);
                }
                let dim = coords[0].len();
                let offsets: Vec<Vec<i64>> = (0..3usize.pow(dim as u32))
                    .map(|mut k| {
                        (0..dim)
                            .map(|_| {
                                let o = (k % 3) as i64 - 1;
                                k /= 3;
                                o
                            })
                            .collect()
                    })
                    .collect();
                for (x, c) in coords.iter().enumerate() {
                    let base = cell(c);
                    for off in &offsets {
                        let key: Vec<i64> = base.iter().zip(off).map(|(b, o)| b + o).collect();
                        if let Some(pts) = grid.get(&key) {
                            adj[x].extend(pts.iter().copied().filter(|&y| y != x && space.distance(x, y) <= eps));
                        }
                    }
                    adj[x].sort_unstable();
                }
            }
            _ => {
                for x in 0..n {
                    for y in x + 1..n {
                        if space.distance(x, y) <= eps {
                            adj[x].push(y);
                            adj[y].push(x);
                        }
                    }
                }
            }
        }
        Ok(ToleranceGraph { adj, colors: label_colors(n, space.labels()) })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adj[x]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Connected components, each sorted, ordered by smallest point.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                for &y in &self.adj[comp[i]] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph on `pts` (sorted), reindexed in that order; colors are kept.
    pub fn induced(&self, pts: &[usize]) -> ToleranceGraph {
        let index: HashMap<usize, usize> = pts.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let adj = pts.iter().map(|&p| self.adj[p].iter().filter_map(|q| index.get(q).copied()).collect()).collect();
        ToleranceGraph { adj, colors: pts.iter().map(|&p| self.colors[p]).collect() }
    }

    fn degree_key(&self) -> (usize, usize, Vec<(u32, usize)>) {
        let mut degs: Vec<(u32, usize)> = (0..self.n()).map(|x| (self.colors[x], self.adj[x].len())).collect();
        degs.sort_unstable();
        (self.n(), self.edge_count(), degs)
    }

    fn initial_signatures(&self) -> Vec<Vec<u64>> {
        let n = self.n();
        let mut sig: Vec<Vec<u64>> = (0..n).map(|x| vec![self.colors[x] as u64, self.adj[x].len() as u64]).collect();
        if n <= HOP_PROFILE_LIMIT {
            let mut dist = vec![usize::MAX; n];
            let mut queue = Vec::with_capacity(n);
            for (s, out) in sig.iter_mut().enumerate() {
                dist.iter_mut().for_each(|d| *d = usize::MAX);
                dist[s] = 0;
                queue.clear();
                queue.push(s);
                let mut i = 0;
                while i < queue.len() {
                    let v = queue[i];
                    i += 1;
                    for &w in &self.adj[v] {
                        if dist[w] == usize::MAX {
                            dist[w] = dist[v] + 1;
                            queue.push(w);
                        }
                    }
                }
                let depth = dist.iter().filter(|&&d| d != usize::MAX).max().copied().unwrap_or(0);
                let mut hist = vec![0u64; depth + 1];
                for &d in &dist {
                    if d != usize::MAX {
                        hist[d] += 1;
                    }
                }
                out.push((n - queue.len()) as u64);
                out.extend(hist);
            }
        }
        sig
    }
}

/// Joint canonical numbering of signatures across sides; `None` if the sides disagree on
/// any signature count.
fn canon<S: Ord + Clone>(sides: &[Vec<S>]) -> Option<Vec<Vec<u32>>> {
    let mut all: Vec<&S> = sides.iter().flatten().collect();
    all.sort_unstable();
    all.dedup();
    let ids: Vec<Vec<u32>> = sides
        .iter()
        .map(|s| s.iter().map(|v| all.binary_search(&v).expect("signature present") as u32).collect())
        .collect();
    let count = |c: &[u32]| {
        let mut h = vec![0usize; all.len()];
        for &v in c {
            h[v as usize] += 1;
        }
        h
    };
    let first = count(&ids[0]);
    if ids[1..].iter().any(|c| count(c) != first) {
        return None;
    }
    Some(ids)
}

fn color_count(c: &[u32]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Backtracking search for color-preserving isomorphisms between two graphs.
struct Searcher<'a> {
    g: [&'a ToleranceGraph; 2],
    nodes: u64,
    budget: u64,
}

struct Exhausted;

impl<'a> Searcher<'a> {
    fn new(g1: &'a ToleranceGraph, g2: &'a ToleranceGraph, budget: u64) -> Self {
        Searcher { g: [g1, g2], nodes: 0, budget }
    }

    fn initial(&self) -> Option<[Vec<u32>; 2]> {
        let ids = canon(&[self.g[0].initial_signatures(), self.g[1].initial_signatures()])?;
        let mut it = ids.into_iter();
        Some([it.next()?, it.next()?])
    }

    /// Color refinement of both sides in lockstep.
    fn refine(&self, cols: &mut [Vec<u32>; 2]) -> bool {
        let mut k = color_count(&cols[0]);
        loop {
            let sigs: Vec<Vec<Vec<u32>>> = (0..2)
                .map(|s| {
                    let (g, c) = (self.g[s], &cols[s]);
                    (0..g.n())
                        .map(|v| {
                            let mut sig = Vec::with_capacity(g.adj[v].len() + 1);
                            sig.push(c[v]);
                            let start = sig.len();
                            sig.extend(g.adj[v].iter().map(|&w| c[w]));
                            sig[start..].sort_unstable();
                            sig
                        })
                        .collect()
                })
                .collect();
            let Some(ids) = canon(&sigs) else { return false };
            let mut it = ids.into_iter();
            cols[0] = it.next().expect("two sides");
            cols[1] = it.next().expect("two sides");
            let k2 = color_count(&cols[0]);
            if k2 == k {
                return true;
            }
            k = k2;
        }
    }

    fn is_isomorphism(&self, p: &[usize]) -> bool {
        let (a, b) = (self.g[0], self.g[1]);
        (0..a.n()).all(|v| {
            if a.colors[v] != b.colors[p[v]] || a.adj[v].len() != b.adj[p[v]].len() {
                return false;
            }
            let mut img: Vec<usize> = a.adj[v].iter().map(|&w| p[w]).collect();
            img.sort_unstable();
            img == b.adj[p[v]]
        })
    }

    /// First isomorphism compatible with the given colorings.
    fn find(&mut self, mut cols: [Vec<u32>; 2]) -> std::result::Result<Option<Vec<usize>>, Exhausted> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Exhausted);
        }
        if !self.refine(&mut cols) {
            return Ok(None);
        }
        let n = self.g[0].n();
        let k = color_count(&cols[0]);
        if k == n {
            let mut by_color = vec![0; n];
            for (w, &c) in cols[1].iter().enumerate() {
                by_color[c as usize] = w;
            }
            let p: Vec<usize> = cols[0].iter().map(|&c| by_color[c as usize]).collect();
            return Ok(self.is_isomorphism(&p).then_some(p));
        }
        let Some((v, t)) = first_split(&cols[0]) else { return Ok(None) };
        for w in (0..n).filter(|&w| cols[1][w] == t) {
            let mut next = cols.clone();
            next[0][v] = k as u32;
            next[1][w] = k as u32;
            if let Some(p) = self.find(next)? {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }
}

/// First point of the smallest color class with more than one point.
fn first_split(c: &[u32]) -> Option<(usize, u32)> {
    let mut count: BTreeMap<u32, usize> = BTreeMap::new();
    for &v in c {
        *count.entry(v).or_default() += 1;
    }
    let t = count.into_iter().find(|&(_, m)| m > 1)?.0;
    Some((c.iter().position(|&v| v == t).expect("color present"), t))
}

/// Automorphisms found by the search, as generators.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AutomorphismGroup {
    #[serde(skip)]
    n: usize,
    /// Group order; `None` when the search stopped early or the order overflows.
    pub order: Option<u128>,
    pub complete: bool,
    pub generators: Vec<Vec<usize>>,
    /// Search-tree nodes visited.
    pub nodes: u64,
    #[serde(skip)]
    budget: u64,
}

impl AutomorphismGroup {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Orbit index of every point, numbered by smallest member.
    pub fn orbits(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for g in &self.generators {
            for (x, &y) in g.iter().enumerate() {
                let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut id = vec![usize::MAX; self.n];
        let mut next = 0;
        (0..self.n)
            .map(|x| {
                let r = find(&mut parent, x);
                if id[r] == usize::MAX {
                    id[r] = next;
                    next += 1;
                }
                id[r]
            })
            .collect()
    }

    /// All elements, or `None` if there are more than `limit`.
    pub fn elements(&self, limit: usize) -> Option<Vec<Vec<usize>>> {
        let id: Vec<usize> = (0..self.n).collect();
        let mut seen = std::collections::HashSet::new();
        seen.insert(id.clone());
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            for g in &self.generators {
                let p: Vec<usize> = out[i].iter().map(|&x| g[x]).collect();
                if seen.insert(p.clone()) {
                    if out.len() == limit {
                        return None;
                    }
                    out.push(p);
                }
            }
            i += 1;
        }
        out.sort();
        Some(out)
    }
}

/// Label-preserving automorphisms of `e` read as a graph on the points of `space`.
pub fn automorphisms(space: &FiniteSpace, e: &Relation, budget: u64) -> Result<AutomorphismGroup> {
    if space.n() != e.n() {
        return Err(Error::DimensionMismatch { left: space.n(), right: e.n() });
    }
    let g = ToleranceGraph::from_relation(e, space.labels())?;
    Ok(graph_automorphisms(&g, budget))
}

/// Generators and order from a stabilizer chain along the first branch of the search tree.
pub fn graph_automorphisms(g: &ToleranceGraph, budget: u64) -> AutomorphismGroup {
    let n = g.n();
    let mut s = Searcher::new(g, g, budget);
    let mut group = AutomorphismGroup { n, order: None, complete: false, generators: Vec::new(), nodes: 0, budget };
    let Some(mut cols) = s.initial() else { unreachable!("a graph agrees with itself") };
    s.refine(&mut cols);

    let mut levels: Vec<(usize, Vec<u32>)> = Vec::new();
    while let Some((b, _)) = first_split(&cols[0]) {
        let k = color_count(&cols[0]) as u32;
        levels.push((b, cols[0].clone()));
        cols[0][b] = k;
        cols[1][b] = k;
        s.refine(&mut cols);
    }

    let mut order: Option<u128> = Some(1);
    for (b, base) in levels.iter().rev() {
        let k = color_count(base) as u32;
        let mut orbit = orbit_of(*b, &group.generators, n);
        for c in (0..n).filter(|&c| base[c] == base[*b]) {
            if orbit[c] {
                continue;
            }
            let mut left = base.clone();
            let mut right = base.clone();
            left[*b] = k;
            right[c] = k;
            match s.find([left, right]) {
                Err(Exhausted) => {
                    group.nodes = s.nodes;
                    return group;
                }
                Ok(Some(p)) => {
                    group.generators.push(p);
                    orbit = orbit_of(*b, &group.generators, n);
                }
                Ok(None) => {}
            }
        }
        let size = orbit.iter().filter(|&&o| o).count() as u128;
        order = order.and_then(|o| o.checked_mul(size));
    }
    group.order = order;
    group.complete = true;
    group.nodes = s.nodes;
    group
}

fn orbit_of(x: usize, gens: &[Vec<usize>], n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut stack = vec![x];
    while let Some(y) = stack.pop() {
        for g in gens {
            if !seen[g[y]] {
                seen[g[y]] = true;
                stack.push(g[y]);
            }
        }
    }
    seen
}

/// A color-preserving isomorphism from `a` to `b`, if one exists.
pub fn isomorphism(a: &ToleranceGraph, b: &ToleranceGraph, budget: u64) -> Result<Option<Vec<usize>>> {
    if a.degree_key() != b.degree_key() {
        return Ok(None);
    }
    let mut s = Searcher::new(a, b, budget);
    let Some(cols) = s.initial() else { return Ok(None) };
    s.find(cols).map_err(|_| Error::BudgetExhausted(budget))
}

/// Union of the graphs of all group elements, i.e. the orbit equivalence.
pub fn hx_relation(g: &AutomorphismGroup) -> Result<Relation> {
    if !g.complete {
        return Err(Error::BudgetExhausted(g.budget));
    }
    let orbit = g.orbits();
    Ok(Relation::from_fn(g.n, |x, y| orbit[x] == orbit[y]))
}

/// Splits the space into two nonempty pieces invariant under every automorphism and more
/// than `ε` apart, if possible.
pub fn is_h_decomposable(system: &SystemModel, eps: f64, budget: u64) -> Result<Option<(PointSet, PointSet)>> {
    let e = vbar(&system.space, eps)?;
    let group = automorphisms(&system.space, &e, budget)?;
    let hx = hx_relation(&group)?;
    ChainContext::with_tolerance(&hx, e, eps)?.decomposition_search()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentInfo {
    #[serde(skip)]
    pub points: Vec<usize>,
    pub first: usize,
    pub size: usize,
    pub diameter: f64,
    pub class: usize,
}

/// Components that are isomorphic as labelled tolerance graphs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoClass {
    pub id: usize,
    pub count: usize,
    pub component_size: usize,
    /// Union of the points of every component in the class.
    #[serde(skip)]
    pub points: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Census {
    pub eps: f64,
    pub components: Vec<ComponentInfo>,
    pub classes: Vec<IsoClass>,
    /// Components of diameter greater than `ε`.
    pub large_components: usize,
}

/// Connected components of the tolerance graph, their diameters and isomorphism classes.
pub fn component_census(system: &SystemModel, eps: f64, budget: u64) -> Result<Census> {
    let space = &system.space;
    let graph = ToleranceGraph::from_space(space, eps)?;
    let mut components = Vec::new();
    let mut classes: Vec<IsoClass> = Vec::new();
    let mut reps: Vec<ToleranceGraph> = Vec::new();
    for comp in graph.components() {
        let sub = graph.induced(&comp);
        let mut class = None;
        for (id, rep) in reps.iter().enumerate() {
            if isomorphism(&sub, rep, budget)?.is_some() {
                class = Some(id);
                break;
            }
        }
        let class = match class {
            Some(id) => id,
            None => {
                reps.push(sub);
                classes.push(IsoClass { id: classes.len(), count: 0, component_size: comp.len(), points: Vec::new() });
                classes.len() - 1
            }
        };
        classes[class].count += 1;
        classes[class].points.extend(&comp);
        let set = PointSet::from_indices(space.n(), comp.iter().copied())?;
        components.push(ComponentInfo {
            first: comp[0],
            size: comp.len(),
            diameter: space.set_diameter(&set),
            class,
            points: comp,
        });
    }
    for c in &mut classes {
        c.points.sort_unstable();
    }
    let large_components = components.iter().filter(|c| c.diameter > eps).count();
    Ok(Census { eps, components, classes, large_components })
}

/// The involution `g` equal to `h` on `B = h⁻¹(a) \ a`, to `h⁻¹` on `h(B)` and the identity
/// elsewhere.
pub fn involution_from_clopen(h: &Relation, a: &PointSet) -> Result<Relation> {
    let p = h.as_permutation().ok_or(Error::NotPermutation)?;
    let n = p.len();
    if a.universe() != n {
        return Err(Error::DimensionMismatch { left: n, right: a.universe() });
    }
    if a.is_empty() || a.is_full() {
        return Err(Error::InvalidParameter("the set must be proper and nonempty".into()));
    }
    let b: Vec<usize> = (0..n).filter(|&x| a.contains(p[x]) && !a.contains(x)).collect();
    if b.is_empty() {
        return Err(Error::EmptySupport);
    }
    let mut g: Vec<usize> = (0..n).collect();
    for &x in &b {
        g[x] = p[x];
        g[p[x]] = x;
    }
    Relation::from_map(&g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> ToleranceGraph {
        let e = Relation::from_fn(n, |x, y| x.abs_diff(y) <= 1);
        ToleranceGraph::from_relation(&e, None).unwrap()
    }

    #[test]
    fn path_has_one_reflection() {
        let g = graph_automorphisms(&path(3), DEFAULT_BUDGET);
        assert!(g.complete);
        assert_eq!(g.order, Some(2));
        assert_eq!(g.elements(10).unwrap(), vec![vec![0, 1, 2], vec![2, 1, 0]]);
    }

    #[test]
    fn complete_graph_is_symmetric() {
        let g = ToleranceGraph::from_relation(&Relation::full(4), None).unwrap();
        let grp = graph_automorphisms(&g, DEFAULT_BUDGET);
        assert_eq!(grp.order, Some(24));
        assert_eq!(grp.elements(100).unwrap().len(), 24);
        assert!(hx_relation(&grp).unwrap().is_full());
    }

    #[test]
    fn labels_restrict_automorphisms() {
        let e = Relation::from_fn(3, |x, y| x.abs_diff(y) <= 1);
        let labels = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let g = ToleranceGraph::from_relation(&e, Some(&labels)).unwrap();
        let grp = graph_automorphisms(&g, DEFAULT_BUDGET);
        assert_eq!(grp.order, Some(1));
        assert_eq!(hx_relation(&grp).unwrap(), Relation::identity(3));
    }

    #[test]
    fn tiny_budget_gives_partial_group() {
        let g = ToleranceGraph::from_relation(&Relation::identity(6), None).unwrap();
        let grp = graph_automorphisms(&g, 2);
        assert!(!grp.complete);
        assert!(grp.order.is_none());
        assert!(matches!(hx_relation(&grp), Err(Error::BudgetExhausted(2))));
    }

    #[test]
    fn swap_involution() {
        let h = Relation::from_map(&[1, 0]).unwrap();
        let g = involution_from_clopen(&h, &PointSet::singleton(2, 0).unwrap()).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn invariant_set_has_no_involution() {
        let h = Relation::from_map(&[1, 0, 2]).unwrap();
        let a = PointSet::from_indices(3, [0, 1]).unwrap();
        assert!(matches!(involution_from_clopen(&h, &a), Err(Error::EmptySupport)));
    }

    #[test]
    fn grid_and_dense_graphs_agree() {
        let coords: Vec<Vec<f64>> = (0..600).map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()]).collect();
        let space = FiniteSpace::from_coords(coords).unwrap();
        let g = ToleranceGraph::from_space(&space, 0.05).unwrap();
        let dense = ToleranceGraph::from_relation(&vbar(&space, 0.05).unwrap(), None).unwrap();
        assert_eq!(g, dense);
    }
}
