//! Maps between systems: quotients, attachments, point extensions and chain lifting.

use serde::{Serialize, Serializer};

use crate::chain::ChainContext;
use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::set::PointSet;
use crate::space::FiniteSpace;

/// Surjection of a finite space onto the quotient by its fibers.
///
/// The target carries the largest metric below the source metric that vanishes inside
/// fibers: shortest paths where hops within a fiber cost nothing. Fibers that end up at
/// distance zero from each other are merged and listed in [`QuotientMap::merged`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientMap {
    assignment: Vec<usize>,
    target: FiniteSpace,
    merged: Vec<Vec<usize>>,
}

impl Serialize for QuotientMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.assignment.serialize(s)
    }
}

impl QuotientMap {
    /// `assignment[x]` is the fiber of source point `x`; fibers must be numbered `0..m`.
    pub fn new(source: &FiniteSpace, assignment: Vec<usize>) -> Result<Self> {
        let n = source.n();
        if assignment.len() != n {
            return Err(Error::DimensionMismatch { left: n, right: assignment.len() });
        }
        let m = assignment.iter().max().map_or(0, |&a| a + 1);
        let mut hit = vec![false; m];
        for &a in &assignment {
            hit[a] = true;
        }
        if let Some(missing) = hit.iter().position(|&h| !h) {
            return Err(Error::NotSurjective(missing));
        }

        let mut d = vec![vec![f64::INFINITY; m]; m];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        for x in 0..n {
            for y in x + 1..n {
                let (a, b) = (assignment[x], assignment[y]);
                let dxy = source.distance(x, y);
                if dxy < d[a][b] {
                    d[a][b] = dxy;
                    d[b][a] = dxy;
                }
            }
        }
        floyd_warshall(&mut d);

        // Distance-zero classes of the pseudo-metric, numbered by smallest fiber.
        let mut class = vec![usize::MAX; m];
        let mut merged = Vec::new();
        let mut reps = Vec::new();
        for a in 0..m {
            if class[a] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(a);
            let group: Vec<usize> = (a..m).filter(|&b| class[b] == usize::MAX && d[a][b] == 0.0).collect();
            for &b in &group {
                class[b] = id;
            }
            if group.len() > 1 {
                merged.push(group);
            }
        }
        let dist = reps.iter().map(|&a| reps.iter().map(|&b| d[a][b]).collect()).collect();
        let mut target = FiniteSpace::from_metric_matrix(dist)?;
        if let Some(labels) = source.labels() {
            let mut names: Vec<Vec<&str>> = vec![Vec::new(); reps.len()];
            for (x, l) in labels.iter().enumerate() {
                names[class[assignment[x]]].push(l);
            }
            let joined = names
                .into_iter()
                .map(|mut v| {
                    v.sort_unstable();
                    v.dedup();
                    v.join("+")
                })
                .collect();
            target = target.with_labels(joined)?;
        }
        let assignment = assignment.iter().map(|&a| class[a]).collect();
        Ok(QuotientMap { assignment, target, merged })
    }

    pub fn identity(source: &FiniteSpace) -> Result<Self> {
        Self::new(source, (0..source.n()).collect())
    }

    /// Collapses the points of `a` to one point (appended last); other points keep their order.
    pub fn smash(source: &FiniteSpace, a: &PointSet) -> Result<Self> {
        if a.universe() != source.n() {
            return Err(Error::DimensionMismatch { left: source.n(), right: a.universe() });
        }
        if a.is_empty() {
            return Err(Error::InvalidParameter("cannot smash an empty set".into()));
        }
        let rest = source.n() - a.len();
        let mut next = 0;
        let assignment = (0..source.n())
            .map(|x| {
                if a.contains(x) {
                    rest
                } else {
                    next += 1;
                    next - 1
                }
            })
            .collect();
        Self::new(source, assignment)
    }

    pub fn source_n(&self) -> usize {
        self.assignment.len()
    }

    pub fn target_n(&self) -> usize {
        self.target.n()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn target(&self) -> &FiniteSpace {
        &self.target
    }

    /// Groups of originally distinct fibers that were identified at distance zero.
    pub fn merged(&self) -> &[Vec<usize>] {
        &self.merged
    }

    pub fn fiber(&self, t: usize) -> PointSet {
        let n = self.source_n();
        PointSet::from_indices(n, (0..n).filter(|&x| self.assignment[x] == t)).expect("indices in range")
    }

    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut f = vec![Vec::new(); self.target_n()];
        for (x, &t) in self.assignment.iter().enumerate() {
            f[t].push(x);
        }
        f
    }

    fn check_dims(&self, r1: &Relation, r2: Option<&Relation>) -> Result<()> {
        if r1.n() != self.source_n() {
            return Err(Error::DimensionMismatch { left: self.source_n(), right: r1.n() });
        }
        if let Some(r2) = r2 {
            if r2.n() != self.target_n() {
                return Err(Error::DimensionMismatch { left: self.target_n(), right: r2.n() });
            }
        }
        Ok(())
    }
}

fn floyd_warshall(d: &mut [Vec<f64>]) {
    let m = d.len();
    for k in 0..m {
        for i in 0..m {
            let dik = d[i][k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..m {
                let via = dik + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let v = d[i][j].min(d[j][i]);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
}

/// The image `(π×π)(r1)`.
pub fn pushforward(pi: &QuotientMap, r1: &Relation) -> Result<Relation> {
    pi.check_dims(r1, None)?;
    let mut out = Relation::empty(pi.target_n());
    for (x, y) in r1.edges() {
        out.insert(pi.apply(x), pi.apply(y));
    }
    Ok(out)
}

/// Whether `π` maps `r1` into `r2`.
pub fn check_maps_to(pi: &QuotientMap, r1: &Relation, r2: &Relation) -> Result<bool> {
    pi.check_dims(r1, Some(r2))?;
    Ok(r1.edges().all(|(x, y)| r2.contains(pi.apply(x), pi.apply(y))))
}

/// Whether `π ∘ r1 = r2 ∘ π`, i.e. `π(r1(x)) = r2(π(x))` for every source point.
pub fn check_semiconjugacy(pi: &QuotientMap, r1: &Relation, r2: &Relation) -> Result<bool> {
    pi.check_dims(r1, Some(r2))?;
    let m = pi.target_n();
    for x in 0..pi.source_n() {
        let mut img = PointSet::empty(m);
        for y in r1.successors(x) {
            img.insert(pi.apply(y));
        }
        if img != r2.row(pi.apply(x)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Disjoint union with `x` first; points of different parts sit at distance
/// `max(diam x, diam b)`, or 1 when both are single points.
pub fn disjoint_union(x: &FiniteSpace, b: &FiniteSpace) -> Result<FiniteSpace> {
    let (nx, nb) = (x.n(), b.n());
    let mut gap = x.diameter().max(b.diameter());
    if gap == 0.0 {
        gap = 1.0;
    }
    let n = nx + nb;
    let mut d = vec![vec![gap; n]; n];
    for i in 0..nx {
        for j in 0..nx {
            d[i][j] = x.distance(i, j);
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            d[nx + i][nx + j] = b.distance(i, j);
        }
    }
    let mut s = FiniteSpace::from_metric_matrix(d)?;
    if let (Some(lx), Some(lb)) = (x.labels(), b.labels()) {
        s = s.with_labels(lx.iter().chain(lb).cloned().collect())?;
    }
    Ok(s)
}

/// Result of attaching `x` to `b` along `h : a → b`.
#[derive(Clone, Debug)]
pub struct Attachment {
    /// `x ⊔ b`, with the points of `x` first.
    pub union: FiniteSpace,
    /// Quotient of the union by `1 ∪ h̃⁻¹ ∘ h̃`.
    pub quotient: QuotientMap,
}

impl Attachment {
    /// Quotient point of a point of `x`.
    pub fn of_x(&self, x: usize) -> usize {
        self.quotient.apply(x)
    }

    /// Quotient point of a point of `b`.
    pub fn of_b(&self, nx: usize, b: usize) -> usize {
        self.quotient.apply(nx + b)
    }
}

/// Attaches `x` to `b` via `h`, where `h[i]` is the image of the `i`-th point of `a`.
///
/// Quotient points are the points of `x \ a` in order, then the points of `b`.
pub fn attach(x: &FiniteSpace, a: &PointSet, h: &[usize], b: &FiniteSpace) -> Result<Attachment> {
    let (nx, nb) = (x.n(), b.n());
    if a.universe() != nx {
        return Err(Error::DimensionMismatch { left: nx, right: a.universe() });
    }
    if h.len() != a.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: h.len() });
    }
    let mut hit = vec![false; nb];
    for &t in h {
        if t >= nb {
            return Err(Error::IndexOutOfRange { index: t, n: nb });
        }
        hit[t] = true;
    }
    if let Some(missing) = hit.iter().position(|&v| !v) {
        return Err(Error::NotSurjective(missing));
    }
    let rest = nx - a.len();
    let mut assignment = vec![0; nx + nb];
    let mut next = 0;
    let mut hi = h.iter();
    for (p, slot) in assignment.iter_mut().enumerate().take(nx) {
        if a.contains(p) {
            *slot = rest + hi.next().expect("h has one entry per point of a");
        } else {
            *slot = next;
            next += 1;
        }
    }
    for t in 0..nb {
        assignment[nx + t] = rest + t;
    }
    let union = disjoint_union(x, b)?;
    let quotient = QuotientMap::new(&union, assignment)?;
    Ok(Attachment { union, quotient })
}

/// A finite truncation of an isolated point extension: base points `0..base_n` followed by
/// isolated points in their enumeration order, each retracted to a nearest base point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointExtensionModel {
    space: FiniteSpace,
    base_n: usize,
    retraction: Vec<usize>,
}

impl PointExtensionModel {
    pub fn new(space: FiniteSpace, base_n: usize) -> Result<Self> {
        let n = space.n();
        if base_n == 0 || base_n > n {
            return Err(Error::InvalidParameter(format!("base size {base_n} out of 1..={n}")));
        }
        for i in base_n..n {
            for j in 0..i {
                if space.distance(i, j) <= 0.0 {
                    return Err(Error::InvalidParameter(format!("isolated point {i} coincides with point {j}")));
                }
            }
        }
        let retraction = (base_n..n)
            .map(|i| {
                let mut best = 0;
                for b in 1..base_n {
                    if space.distance(i, b) < space.distance(i, best) {
                        best = b;
                    }
                }
                best
            })
            .collect();
        Ok(PointExtensionModel { space, base_n, retraction })
    }

    /// Base in Euclidean coordinates with the `k`-th isolated point (from 1) at
    /// `(sequence[k-1], 1/k)` one dimension up.
    pub fn canonical(base: &FiniteSpace, sequence: &[usize]) -> Result<Self> {
        let coords =
            base.coords().ok_or_else(|| Error::InvalidMetric("canonical extension needs coordinates".into()))?;
        let mut pts: Vec<Vec<f64>> = coords.iter().map(|c| c.iter().copied().chain([0.0]).collect()).collect();
        for (k, &x) in sequence.iter().enumerate() {
            if x >= base.n() {
                return Err(Error::IndexOutOfRange { index: x, n: base.n() });
            }
            pts.push(coords[x].iter().copied().chain([1.0 / (k + 1) as f64]).collect());
        }
        Self::new(FiniteSpace::from_coords(pts)?, base.n())
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn base_n(&self) -> usize {
        self.base_n
    }

    pub fn isolated_count(&self) -> usize {
        self.retraction.len()
    }

    /// Base point nearest the `i`-th isolated point.
    pub fn retraction(&self, i: usize) -> usize {
        self.retraction[i]
    }

    /// Distance from the `i`-th isolated point to the base.
    pub fn depth(&self, i: usize) -> f64 {
        self.space.distance(self.base_n + i, self.retraction[i])
    }
}

/// One step of the back-and-forth matching.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchStep {
    /// Isolated point index in the first extension.
    pub a: usize,
    /// Isolated point index in the second extension.
    pub b: usize,
    /// Right-hand side of the strict inequality the pair had to satisfy.
    pub bound: f64,
    /// `bound − d''(r(a), r'(b))`; positive when the inequality holds.
    pub slack: f64,
    /// `max(d(a, X), d'(b, X))`.
    pub depth: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchReport {
    pub steps: Vec<MatchStep>,
    /// 1-based steps where no candidate met the strict inequality.
    pub flagged: Vec<usize>,
}

impl MatchReport {
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.steps.iter().map(|s| (s.a, s.b)).collect()
    }
}

/// Back-and-forth matching of the isolated points of two extensions of the same base.
///
/// Odd steps take the first unmatched `a` and the first unmatched `b` with
/// `d''(r(a), r'(b)) < bound`; even steps swap roles. The bound is `d(a, X)` at step 1,
/// `d'(b, X)` at step 2 and `max(d(a, X), d'(b, X))` afterwards, where `d''` is the
/// pointwise max of the two base metrics. When nothing qualifies the step is flagged and
/// the candidate with the largest slack is used.
pub fn lorch_match(p: &PointExtensionModel, q: &PointExtensionModel) -> Result<MatchReport> {
    if p.base_n != q.base_n {
        return Err(Error::DimensionMismatch { left: p.base_n, right: q.base_n });
    }
    let count = p.isolated_count();
    if count != q.isolated_count() {
        return Err(Error::CountMismatch { left: count, right: q.isolated_count() });
    }
    let base_d = |u: usize, v: usize| p.space.distance(u, v).max(q.space.distance(u, v));
    let mut used_a = vec![false; count];
    let mut used_b = vec![false; count];
    let mut steps = Vec::with_capacity(count);
    let mut flagged = Vec::new();

    for step in 1..=count {
        let forward = step % 2 == 1;
        let fixed = if forward { &used_a } else { &used_b }.iter().position(|&u| !u).expect("unmatched point remains");
        let pair = |c: usize| if forward { (fixed, c) } else { (c, fixed) };
        let bound = |a: usize, b: usize| match step {
            1 => p.depth(a),
            2 => q.depth(b),
            _ => p.depth(a).max(q.depth(b)),
        };
        let slack = |a: usize, b: usize| bound(a, b) - base_d(p.retraction[a], q.retraction[b]);
        let pool = if forward { &used_b } else { &used_a };
        let candidates = (0..count).filter(|&c| !pool[c]);
        let chosen = match candidates.clone().find(|&c| {
            let (a, b) = pair(c);
            slack(a, b) > 0.0
        }) {
            Some(c) => c,
            None => {
                flagged.push(step);
                let mut best = None::<(usize, f64)>;
                for c in candidates {
                    let (a, b) = pair(c);
                    let s = slack(a, b);
                    if best.is_none_or(|(_, bs)| s > bs) {
                        best = Some((c, s));
                    }
                }
                best.expect("unmatched candidate remains").0
            }
        };
        let (a, b) = pair(chosen);
        used_a[a] = true;
        used_b[b] = true;
        steps.push(MatchStep { a, b, bound: bound(a, b), slack: slack(a, b), depth: p.depth(a).max(q.depth(b)) });
    }
    Ok(MatchReport { steps, flagged })
}

/// How chain relations compare across a quotient map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainLiftReport {
    /// `(π×π)(C₁) ⊆ C₂`.
    pub forward_inclusion: bool,
    /// `C₂ = (π×π)(C₁)`.
    pub image_equality: bool,
    /// `C₁ = (π×π)⁻¹(C₂)`.
    pub preimage_equality: bool,
    pub source_decomposable: bool,
    pub target_decomposable: bool,
    /// Source and target are decomposable together or not at all.
    pub decomposability_agrees: bool,
}

/// Compares the chain relations of `r1` at `eps1` on the source and `r2` at `eps2` on the
/// quotient. Every fiber with more than one point must lie in a single chain class of `r1`.
pub fn chain_lift_check(
    source: &FiniteSpace,
    pi: &QuotientMap,
    r1: &Relation,
    eps1: f64,
    r2: &Relation,
    eps2: f64,
) -> Result<ChainLiftReport> {
    if source.n() != pi.source_n() {
        return Err(Error::DimensionMismatch { left: pi.source_n(), right: source.n() });
    }
    if !check_maps_to(pi, r1, r2)? {
        return Err(Error::InvalidParameter("the quotient map does not map r1 into r2".into()));
    }
    let c1 = ChainContext::new(source, r1, eps1)?;
    let c2 = ChainContext::new(pi.target(), r2, eps2)?;
    let chain1 = c1.chain();
    for (t, fiber) in pi.fibers().into_iter().enumerate() {
        if fiber.len() < 2 {
            continue;
        }
        let root = fiber[0];
        if !fiber.iter().all(|&y| chain1.contains(root, y) && chain1.contains(y, root)) {
            return Err(Error::FiberSplit { fiber: t, points: fiber });
        }
    }
    let image = pushforward(pi, chain1)?;
    let chain2 = c2.chain();
    let n = pi.source_n();
    let pulled = Relation::from_fn(n, |x, y| chain2.contains(pi.apply(x), pi.apply(y)));
    let source_decomposable = c1.decomposition_search()?.is_some();
    let target_decomposable = c2.decomposition_search()?.is_some();
    Ok(ChainLiftReport {
        forward_inclusion: image.is_subset(chain2),
        image_equality: &image == chain2,
        preimage_equality: &pulled == chain1,
        source_decomposable,
        target_decomposable,
        decomposability_agrees: source_decomposable == target_decomposable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> FiniteSpace {
        FiniteSpace::from_coords(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn quotient_metric_uses_free_hops_inside_fibers() {
        let s = line(&[0.0, 1.0, 5.0, 6.0]);
        let pi = QuotientMap::new(&s, vec![0, 1, 1, 2]).unwrap();
        assert_eq!(pi.target().distance(0, 2), 2.0);
        assert_eq!(pi.target().distance(0, 1), 1.0);
        assert!(pi.merged().is_empty());
    }

    #[test]
    fn coincident_fibers_are_merged() {
        let s = FiniteSpace::from_matrix(vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]).unwrap();
        let pi = QuotientMap::new(&s, vec![0, 1, 2]).unwrap();
        assert_eq!(pi.target_n(), 2);
        assert_eq!(pi.merged(), &[vec![0, 1]]);
        assert_eq!(pi.assignment(), &[0, 0, 1]);
    }

    #[test]
    fn gaps_in_fiber_numbering_are_rejected() {
        let s = line(&[0.0, 1.0]);
        assert!(matches!(QuotientMap::new(&s, vec![0, 2]), Err(Error::NotSurjective(1))));
    }

    #[test]
    fn collapsing_fixed_points_merges_loops() {
        let s = line(&[0.0, 1.0]);
        let pi = QuotientMap::new(&s, vec![0, 0]).unwrap();
        let r = pushforward(&pi, &Relation::identity(2)).unwrap();
        assert_eq!(r, Relation::identity(1));
        assert!(check_maps_to(&pi, &Relation::full(2), &Relation::full(1)).unwrap());
    }

    #[test]
    fn maps_to_without_semiconjugacy() {
        let s = line(&[0.0, 1.0]);
        let pi = QuotientMap::identity(&s).unwrap();
        let r1 = Relation::identity(2);
        assert!(check_maps_to(&pi, &r1, &Relation::full(2)).unwrap());
        assert!(!check_semiconjugacy(&pi, &r1, &Relation::full(2)).unwrap());
        assert!(check_semiconjugacy(&pi, &r1, &r1).unwrap());
    }

    #[test]
    fn attaching_to_a_point_is_smashing() {
        let x = line(&[0.0, 1.0, 2.0, 4.0]);
        let a = PointSet::from_indices(4, [1, 3]).unwrap();
        let att = attach(&x, &a, &[0, 0], &line(&[0.0])).unwrap();
        let sm = QuotientMap::smash(&x, &a).unwrap();
        assert_eq!(att.quotient.target().distance_matrix(), sm.target().distance_matrix());
        assert_eq!(&att.quotient.assignment()[..4], sm.assignment());
    }

    #[test]
    fn attach_requires_surjective_h() {
        let x = line(&[0.0, 1.0]);
        let a = PointSet::singleton(2, 0).unwrap();
        assert!(matches!(attach(&x, &a, &[0], &line(&[0.0, 3.0])), Err(Error::NotSurjective(1))));
    }

    #[test]
    fn matching_an_extension_with_itself_is_clean() {
        let base = FiniteSpace::from_coords(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let seq: Vec<usize> = (0..12).map(|k| k % 3).collect();
        let p = PointExtensionModel::canonical(&base, &seq).unwrap();
        let rep = lorch_match(&p, &p).unwrap();
        assert!(rep.flagged.is_empty());
        assert_eq!(rep.pairs(), (0..12).map(|k| (k, k)).collect::<Vec<_>>());
    }

    #[test]
    fn identity_lift_is_exact() {
        let s = line(&[0.0, 0.3, 1.0, 1.2]);
        let pi = QuotientMap::identity(&s).unwrap();
        let r = Relation::from_map(&[1, 0, 3, 3]).unwrap();
        let rep = chain_lift_check(&s, &pi, &r, 0.1, &r, 0.1).unwrap();
        assert!(rep.forward_inclusion && rep.image_equality && rep.preimage_equality && rep.decomposability_agrees);
    }

    #[test]
    fn split_fiber_is_rejected() {
        let s = line(&[0.0, 5.0]);
        let pi = QuotientMap::new(&s, vec![0, 0]).unwrap();
        let r = Relation::identity(2);
        let err = chain_lift_check(&s, &pi, &r, 0.1, &Relation::identity(1), 0.1).unwrap_err();
        assert!(matches!(err, Error::FiberSplit { fiber: 0, .. }));
    }
}
