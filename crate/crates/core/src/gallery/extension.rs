//! Extensions by isolated points and Cantor brushes.

use std::collections::VecDeque;

use super::{cells, cells_meeting, settle_eps};
use crate::chain::ChainContext;
use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::space::{FiniteSpace, Metric, SystemModel};

/// Endpoints of the level-`depth` middle-thirds intervals, as multiples of `3^-depth`.
pub fn cantor_endpoints(depth: u32) -> Vec<u64> {
    let mut intervals = vec![(0u64, 1u64)];
    for _ in 0..depth {
        intervals =
            intervals.into_iter().flat_map(|(l, r)| [(3 * l, 3 * l + (r - l)), (3 * r - (r - l), 3 * r)]).collect();
    }
    intervals.into_iter().flat_map(|(l, r)| [l, r]).collect()
}

/// Gaps `(a, b)` between consecutive level-`depth` intervals, as multiples of `3^-depth`.
pub fn cantor_gaps(depth: u32) -> Vec<(u64, u64)> {
    let e = cantor_endpoints(depth);
    e.chunks(2).zip(e.chunks(2).skip(1)).map(|(l, r)| (l[1], r[0])).collect()
}

/// Shortest path in `q` from `from` to `to`, excluding `from`; empty if `from == to`.
fn path(q: &Relation, from: usize, to: usize) -> Option<Vec<usize>> {
    if from == to {
        return Some(Vec::new());
    }
    let mut prev = vec![usize::MAX; q.n()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for y in q.successors(x) {
            if prev[y] == usize::MAX {
                prev[y] = x;
                if y == to {
                    let mut out = vec![to];
                    let mut c = to;
                    while prev[c] != from {
                        c = prev[c];
                        out.push(c);
                    }
                    out.reverse();
                    return Some(out);
                }
                queue.push_back(y);
            }
        }
    }
    None
}

/// Closed walk in the one-step chain relation visiting a greedy `ε`-net in index order.
fn net_walk(space: &FiniteSpace, q: &Relation, eps: f64) -> Vec<usize> {
    let mut net: Vec<usize> = Vec::new();
    for x in 0..space.n() {
        if net.iter().all(|&c| space.distance(c, x) > eps) {
            net.push(x);
        }
    }
    let mut walk = vec![net[0]];
    for &target in net[1..].iter().chain([&net[0]]) {
        let cur = *walk.last().expect("walk starts nonempty");
        walk.extend(path(q, cur, target).expect("chain transitive"));
    }
    if walk.len() > 1 {
        walk.pop();
    }
    walk
}

/// Height of the isolated point `y_k` above its base point.
fn height(k: i64) -> f64 {
    if k >= 0 {
        1.0 / (2 * k + 1) as f64
    } else {
        1.0 / (2 * k.unsigned_abs()) as f64
    }
}

/// Appends heights as an extra coordinate, or builds the ℓ² product matrix.
fn lift_space(base: &FiniteSpace, over: &[(usize, f64)]) -> Result<FiniteSpace> {
    let n = base.n();
    let pts: Vec<(usize, f64)> = (0..n).map(|x| (x, 0.0)).chain(over.iter().copied()).collect();
    match base.metric() {
        Metric::Coords { coords } => FiniteSpace::from_coords(
            pts.iter()
                .map(|&(x, h)| {
                    let mut c = coords[x].clone();
                    c.push(h);
                    c
                })
                .collect(),
        ),
        Metric::Matrix { distances } => FiniteSpace::from_matrix(
            pts.iter().map(|&(x, h)| pts.iter().map(|&(y, g)| distances[x][y].hypot(h - g)).collect()).collect(),
        ),
    }
}

/// Extends a chain transitive system by isolated points `y_k`, `|k| ≤ L`, hovering over a
/// closed chain `x_k` through an `ε`-net, with `y_k ↦ y_{k+1}`.
///
/// `y_L` maps to the images of `x_L`, and `x_{-L-1}` also maps to `y_{-L}`. Without an
/// explicit length, `L` is twice the walk period so the tail `k ≥ L/2` covers the net.
pub fn point_extension(system: &SystemModel, chain_len: Option<usize>) -> Result<SystemModel> {
    let ctx = ChainContext::new(&system.space, &system.relation, system.eps)?;
    if !ctx.is_chain_transitive() {
        return Err(Error::NotChainTransitive(system.eps));
    }
    let walk = net_walk(&system.space, ctx.step(), system.eps);
    let period = walk.len() as i64;
    let l = chain_len.unwrap_or(2 * walk.len()).max(1) as i64;
    let x = |k: i64| walk[k.rem_euclid(period) as usize];
    let over: Vec<(usize, f64)> = (-l..=l).map(|k| (x(k), height(k))).collect();
    let space = lift_space(&system.space, &over)?;
    let n = system.n();
    let y = |k: i64| n + (k + l) as usize;
    let total = n + over.len();
    let mut rel = Relation::empty(total);
    for (a, b) in system.relation.edges() {
        rel.insert(a, b);
    }
    for k in -l..l {
        rel.insert(y(k), y(k + 1));
    }
    for b in system.relation.successors(x(l)) {
        rel.insert(y(l), b);
    }
    rel.insert(x(-l - 1), y(-l));
    let eps = settle_eps(&space, system.eps);
    let tail: Vec<usize> = (-l..=l).filter(|&k| 2 * k >= l).map(y).collect();
    Ok(SystemModel::new(format!("{}-point-extension", system.name), space, rel, eps)?
        .with_group("base", (0..n).collect())
        .with_group("isolated", (n..total).collect())
        .with_group("tail", tail)
        .with_group("walk", walk))
}

/// Identity on a depth-`depth` Cantor sample plus isolated points `(a, ℓ/m)` and `(b, ℓ/m)`,
/// `m ≤ m_max`, over each gap `(a, b)` of length `ℓ`.
///
/// The `u` path climbs the even heights over `b`, jumps to `(a, ℓ)` and descends the odd
/// heights over `a`; the `v` path is its mirror. `b` maps into the start of `u`, the end of `u`
/// maps to `a`, and symmetrically for `v`.
pub fn cantor_gap_extension(depth: usize, m_max: usize) -> Result<SystemModel> {
    if depth < 2 || m_max < 2 {
        return Err(Error::InvalidParameter("depth and m_max must both be at least 2".into()));
    }
    let d = u32::try_from(depth)
        .ok()
        .filter(|&d| d <= 12)
        .ok_or_else(|| Error::InvalidParameter("depth above 12".into()))?;
    let unit = 3f64.powi(-(d as i32));
    let ends = cantor_endpoints(d);
    let gaps = cantor_gaps(d);
    let nb = ends.len();
    let mut coords: Vec<Vec<f64>> = ends.iter().map(|&e| vec![e as f64 * unit, 0.0]).collect();
    // Isolated point (side, m) of gap i sits at index nb + 2·m_max·i + 2·(m-1) + side.
    for &(a, b) in &gaps {
        let len = (b - a) as f64 * unit;
        for m in 1..=m_max {
            coords.push(vec![a as f64 * unit, len / m as f64]);
            coords.push(vec![b as f64 * unit, len / m as f64]);
        }
    }
    let total = coords.len();
    let base_of = |e: u64| ends.iter().position(|&x| x == e).expect("gap ends are Cantor points");
    let iso = |i: usize, side: usize, m: usize| nb + 2 * m_max * i + 2 * (m - 1) + side;
    let mut rel = Relation::from_edges(total, (0..nb).map(|x| (x, x)))?;
    let evens = m_max / 2;
    let odds = m_max.div_ceil(2);
    for (i, &(a, b)) in gaps.iter().enumerate() {
        let (pa, pb) = (base_of(a), base_of(b));
        // u: even m over b in decreasing m, then odd m over a in increasing m.
        for (first, second, from, to) in [(1, 0, pb, pa), (0, 1, pa, pb)] {
            let mut seq: Vec<usize> = (1..=evens).rev().map(|j| iso(i, first, 2 * j)).collect();
            seq.extend((0..odds).map(|j| iso(i, second, 2 * j + 1)));
            rel.insert(from, seq[0]);
            for w in seq.windows(2) {
                rel.insert(w[0], w[1]);
            }
            rel.insert(*seq.last().expect("m_max ≥ 2"), to);
        }
    }
    let space = FiniteSpace::from_coords(coords)?;
    let eps = settle_eps(&space, 1.5 * unit);
    Ok(SystemModel::new("cantor-gaps", space, rel, eps)?
        .with_group("cantor", (0..nb).collect())
        .with_group("isolated", (nb..total).collect()))
}

fn brush_depth(n: usize) -> Result<u32> {
    if n < 4 || !n.is_power_of_two() || n > 1 << 13 {
        return Err(Error::InvalidParameter(format!("bristle count {n} must be a power of two in 4..=8192")));
    }
    Ok(n.trailing_zeros() - 1)
}

struct Brush {
    coords: Vec<Vec<f64>>,
    /// `bristle[j][s]` is the sample at height `s/k` of bristle `j`; `s = 0` is its root.
    bristle: Vec<Vec<usize>>,
    base_unit: f64,
}

/// Cantor endpoints of the given depth with bristles of height `1/(j+1)` over point `j`,
/// each sampled at `k` equal steps above its root.
fn brush(depth: u32, k: usize) -> Brush {
    let unit = 3f64.powi(-(depth as i32));
    let ends = cantor_endpoints(depth);
    let mut coords: Vec<Vec<f64>> = ends.iter().map(|&e| vec![e as f64 * unit, 0.0]).collect();
    let mut bristle = Vec::new();
    for (j, &e) in ends.iter().enumerate() {
        let h = 1.0 / (j + 1) as f64;
        let mut col = vec![j];
        for s in 1..=k {
            col.push(coords.len());
            coords.push(vec![e as f64 * unit, h * s as f64 / k as f64]);
        }
        bristle.push(col);
    }
    Brush { coords, bristle, base_unit: unit }
}

fn check_samples(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter("bristles need at least 2 samples".into()));
    }
    Ok(())
}

/// `n` Cantor points cycled in increasing order, each carrying a bristle; bristles map onto
/// the next bristle linearly, sample to sample.
pub fn cantor_brush(n: usize, bristle_samples: usize) -> Result<SystemModel> {
    let depth = brush_depth(n)?;
    check_samples(bristle_samples)?;
    let b = brush(depth, bristle_samples);
    let total = b.coords.len();
    let mut rel = Relation::empty(total);
    for j in 0..n {
        for (s, &p) in b.bristle[j].iter().enumerate() {
            rel.insert(p, b.bristle[(j + 1) % n][s]);
        }
    }
    let space = FiniteSpace::from_coords(b.coords)?;
    let eps = settle_eps(&space, 1.5 / bristle_samples as f64);
    Ok(SystemModel::new("cantor-brush", space, rel, eps)?.with_group("base", (0..n).collect()))
}

/// As [`cantor_brush`], but the first Cantor point is fixed and its bristle moves by
/// `t ↦ t²`; the other points are cycled.
pub fn cantor_brush_squaring(n: usize, bristle_samples: usize) -> Result<SystemModel> {
    let depth = brush_depth(n)?;
    check_samples(bristle_samples)?;
    let k = bristle_samples;
    let b = brush(depth, k);
    let total = b.coords.len();
    let mut rel = Relation::empty(total);
    for j in 1..n {
        let next = if j + 1 == n { 1 } else { j + 1 };
        for (s, &p) in b.bristle[j].iter().enumerate() {
            rel.insert(p, b.bristle[next][s]);
        }
    }
    let params: Vec<f64> = (0..=k).map(|s| s as f64 / k as f64).collect();
    for (s, &(lo, hi)) in cells(&params).iter().enumerate() {
        for t in cells_meeting(&params, lo * lo, hi * hi) {
            rel.insert(b.bristle[0][s], b.bristle[0][t]);
        }
    }
    let tip = b.bristle[0][k];
    let space = FiniteSpace::from_coords(b.coords)?;
    let eps = settle_eps(&space, 1.5 * (1.0 / k as f64).max(b.base_unit));
    Ok(SystemModel::new("cantor-brush-squaring", space, rel, eps)?
        .with_group("base", (0..n).collect())
        .with_group("squared_bristle", b.bristle[0].clone())
        .with_group("tip", vec![tip]))
}

/// Identity on `C × [-1, 0]` plus bristles over the Cantor points in `[0, 1/3]`, sampled at
/// half the Cantor spacing so columns stay apart at the suggested scale.
pub fn cantor_brush_slab(n: usize, bristle_samples: usize) -> Result<SystemModel> {
    let depth = brush_depth(n)?;
    check_samples(bristle_samples)?;
    let unit = 3f64.powi(-(depth as i32));
    let step = 0.5 * unit;
    let ends = cantor_endpoints(depth);
    let mut coords: Vec<Vec<f64>> = ends.iter().map(|&e| vec![e as f64 * unit, 0.0]).collect();
    let slab_k = (1.0 / step).ceil() as usize;
    let mut bristled = Vec::new();
    for (j, &e) in ends.iter().enumerate() {
        let x = e as f64 * unit;
        for s in 1..=slab_k {
            coords.push(vec![x, -(s as f64) / slab_k as f64]);
        }
        if 3 * e <= 3u64.pow(depth) {
            bristled.push(j);
            let h = 1.0 / (j + 1) as f64;
            let kb = ((h / step).ceil() as usize).max(bristle_samples);
            for s in 1..=kb {
                coords.push(vec![x, h * s as f64 / kb as f64]);
            }
        }
    }
    let total = coords.len();
    let space = FiniteSpace::from_coords(coords)?;
    let eps = settle_eps(&space, 0.75 * unit);
    Ok(SystemModel::new("cantor-brush-slab", space, Relation::identity(total), eps)?
        .with_group("base", (0..n).collect())
        .with_group("bristled", bristled))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_arithmetic() {
        assert_eq!(cantor_endpoints(1), vec![0, 1, 2, 3]);
        assert_eq!(cantor_endpoints(2), vec![0, 1, 2, 3, 6, 7, 8, 9]);
        assert_eq!(cantor_gaps(2), vec![(1, 2), (3, 6), (7, 8)]);
        assert_eq!(cantor_gaps(4).len(), 15);
    }

    #[test]
    fn heights_follow_the_isolated_point_rule() {
        assert_eq!(height(0), 1.0);
        assert_eq!(height(2), 0.2);
        assert_eq!(height(-1), 0.5);
        assert_eq!(height(-3), 1.0 / 6.0);
    }

    #[test]
    fn path_is_shortest() {
        let q = Relation::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        assert_eq!(path(&q, 0, 3), Some(vec![2, 3]));
        assert_eq!(path(&q, 3, 0), None);
        assert_eq!(path(&q, 1, 1), Some(vec![]));
    }

    #[test]
    fn brush_counts_must_be_powers_of_two() {
        assert!(cantor_brush(6, 4).is_err());
        assert!(cantor_brush(2, 4).is_err());
        assert_eq!(cantor_brush(4, 3).unwrap().n(), 4 * 4);
    }
}
