//! Named verification cases. Randomized cases carry their own brute-force oracles on bit
//! masks; gallery cases compare verdicts with the expected booleans and can be rerun one
//! refinement step finer.

use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use chainrec::chain::trans_orbit;
use chainrec::gallery::{
    cantor_brush_squaring, cantor_gap_extension, comb, comb_family, oscillating_segments_refined, point_extension,
    quotient_x, tent_system, two_z_star_star_quotient, z_star, z_star_star,
};
use chainrec::random::{random_permutation, random_relation, random_space, random_system};
use chainrec::rng::SplitMix64;
use chainrec::symmetry::{automorphisms, component_census, involution_from_clopen, is_h_decomposable};
use chainrec::{
    chain_relation, compose, image, inverse, orbit, rpm, star, vbar, ChainContext, FiniteSpace, PointSet, Relation,
    SystemModel,
};
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub seed: u64,
    /// Node budget for automorphism searches.
    pub budget: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseReport {
    pub id: String,
    pub criterion: u8,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A boolean outcome of a gallery model with the value it should have.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub actual: bool,
    pub expected: bool,
}

fn verdict(name: impl Into<String>, actual: bool, expected: bool) -> Verdict {
    Verdict { name: name.into(), actual, expected }
}

/// Gallery verdicts at the base resolution, or one refinement step finer.
pub type Family = fn(&Settings, bool) -> Result<Vec<Verdict>>;

#[derive(Clone, Copy)]
enum Kind {
    Random(fn(&Settings) -> Result<Vec<Check>>),
    Gallery(Family),
    Stability,
}

#[derive(Clone, Copy)]
pub struct Case {
    pub id: &'static str,
    pub criterion: u8,
    pub summary: &'static str,
    pub time_limit: Duration,
    kind: Kind,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

/// Every case, sorted by id.
pub fn cases() -> Vec<Case> {
    use Kind::*;
    let mut v = vec![
        Case {
            id: "compactified-integers",
            criterion: 1,
            summary: "one- and two-point compactifications of the integer shift and their glued pair",
            time_limit: secs(1),
            kind: Gallery(compactified_integers),
        },
        Case {
            id: "decomposition-equivalence",
            criterion: 2,
            summary: "decomposition search finds nothing iff O(E∘R±∘E) is full",
            time_limit: secs(10),
            kind: Random(decomposition_equivalence),
        },
        Case {
            id: "inward-separation",
            criterion: 3,
            summary: "chain reachability against exhaustive inward sets",
            time_limit: secs(60),
            kind: Random(inward_separation),
        },
        Case {
            id: "identity-components",
            criterion: 4,
            summary: "chain components of the identity are the ε-connected components",
            time_limit: secs(5),
            kind: Random(identity_components),
        },
        Case {
            id: "relation-identities",
            criterion: 5,
            summary: "orbit idempotence, inverse duality, unrolling and star/image duality",
            time_limit: secs(5),
            kind: Random(relation_identities),
        },
        Case {
            id: "point-extension",
            criterion: 6,
            summary: "isolated-point extension of the tent map",
            time_limit: secs(5),
            kind: Gallery(point_extension_verdicts),
        },
        Case {
            id: "cantor-gaps",
            criterion: 7,
            summary: "isolated points filling the gaps of the Cantor set",
            time_limit: secs(5),
            kind: Gallery(cantor_gaps),
        },
        Case {
            id: "comb-stack",
            criterion: 8,
            summary: "stack of combs between C×{0} and C×{1}",
            time_limit: secs(10),
            kind: Gallery(comb_stack),
        },
        Case {
            id: "squaring-brush",
            criterion: 8,
            summary: "Cantor brush with one squared bristle",
            time_limit: secs(10),
            kind: Gallery(squaring_brush),
        },
        Case {
            id: "comb-automorphisms",
            criterion: 9,
            summary: "comb symmetries fix the three structural points",
            time_limit: secs(120),
            kind: Gallery(comb_automorphisms),
        },
        Case {
            id: "oscillating-census",
            criterion: 9,
            summary: "isomorphism census of the oscillating segments",
            time_limit: secs(120),
            kind: Gallery(oscillating_census),
        },
        Case {
            id: "tent-quotient-symmetry",
            criterion: 9,
            summary: "circle plus interval tent quotient splits under its symmetries",
            time_limit: secs(120),
            kind: Gallery(tent_quotient_symmetry),
        },
        Case {
            id: "comb-stack-plus-symmetry",
            criterion: 9,
            summary: "upper half of the comb stack does not split under its symmetries",
            time_limit: secs(120),
            kind: Gallery(comb_stack_plus_symmetry),
        },
        Case {
            id: "involution",
            criterion: 10,
            summary: "involutions built from a permutation and a set",
            time_limit: secs(1),
            kind: Random(involution),
        },
        Case {
            id: "stability",
            criterion: 11,
            summary: "gallery verdicts after one refinement step",
            time_limit: secs(300),
            kind: Stability,
        },
    ];
    v.sort_by_key(|c| c.id);
    v
}

/// Cases named by `ids`; an empty list or `all` selects every case.
pub fn select(ids: &[String]) -> Result<Vec<Case>> {
    let all = cases();
    if ids.is_empty() || ids.iter().any(|i| i == "all") {
        return Ok(all);
    }
    let mut out = Vec::new();
    for id in ids {
        match all.iter().find(|c| c.id == id) {
            Some(c) => out.push(*c),
            None => bail!("unknown verification case {id:?}"),
        }
    }
    out.sort_by_key(|c| c.id);
    out.dedup_by_key(|c| c.id);
    Ok(out)
}

impl Case {
    pub fn run(&self, settings: &Settings) -> (CaseReport, Duration) {
        let start = Instant::now();
        let outcome = match self.kind {
            Kind::Random(f) => f(settings),
            Kind::Gallery(f) => f(settings, false).map(|vs| vs.into_iter().map(verdict_check).collect()),
            Kind::Stability => stability(settings),
        };
        let elapsed = start.elapsed();
        let report = match outcome {
            Ok(checks) => CaseReport {
                id: self.id.to_string(),
                criterion: self.criterion,
                passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
                checks,
                error: None,
            },
            Err(e) => CaseReport {
                id: self.id.to_string(),
                criterion: self.criterion,
                passed: false,
                checks: Vec::new(),
                error: Some(format!("{e:#}")),
            },
        };
        (report, elapsed)
    }
}

/// Runs the cases in parallel; results come back in the order given.
pub fn run_cases(cases: &[Case], settings: &Settings) -> Vec<(CaseReport, Duration)> {
    cases.par_iter().map(|c| c.run(settings)).collect()
}

fn verdict_check(v: Verdict) -> Check {
    Check { passed: v.actual == v.expected, detail: format!("{} (expected {})", v.actual, v.expected), name: v.name }
}

fn tally(name: &str, agree: usize, total: usize) -> Check {
    Check { name: name.to_string(), passed: agree == total, detail: format!("{agree}/{total}") }
}

fn stream(settings: &Settings, salt: u64) -> SplitMix64 {
    SplitMix64::new(settings.seed).fork(salt)
}

// Bit-mask oracles for spaces of at most 32 points.

fn rows(r: &Relation) -> Vec<u32> {
    (0..r.n()).map(|x| r.successors(x).fold(0u32, |m, y| m | 1 << y)).collect()
}

fn ball_rows(space: &FiniteSpace, eps: f64) -> Vec<u32> {
    let n = space.n();
    (0..n).map(|x| (0..n).filter(|&y| space.distance(x, y) <= eps).fold(0u32, |m, y| m | 1 << y)).collect()
}

fn image_mask(rows: &[u32], u: u32) -> u32 {
    (0..rows.len()).filter(|&x| u >> x & 1 == 1).fold(0, |m, x| m | rows[x])
}

/// `x ↦ E(R(E(x)))`.
fn thicken(e: &[u32], r: &[u32]) -> Vec<u32> {
    e.iter().map(|&b| image_mask(e, image_mask(r, b))).collect()
}

/// Reachability in one or more steps.
fn closure(step: &[u32]) -> Vec<u32> {
    step.iter()
        .map(|&first| {
            let mut seen = first;
            let mut frontier = first;
            while frontier != 0 {
                frontier = image_mask(step, frontier) & !seen;
                seen |= frontier;
            }
            seen
        })
        .collect()
}

fn transpose(rows: &[u32]) -> Vec<u32> {
    let n = rows.len();
    (0..n).map(|y| (0..n).filter(|&x| rows[x] >> y & 1 == 1).fold(0, |m, x| m | 1 << x)).collect()
}

fn decomposition_equivalence(s: &Settings) -> Result<Vec<Check>> {
    let mut g = stream(s, 2);
    let total = 1000;
    let (mut agree, mut split) = (0, 0);
    for _ in 0..total {
        let sys = random_system(&mut g, 10);
        let full = (1u32 << sys.n()) - 1;
        let r = rows(&sys.relation);
        let rt = transpose(&r);
        let sym: Vec<u32> = r.iter().zip(&rt).enumerate().map(|(x, (a, b))| a | b | 1 << x).collect();
        let classes = closure(&thicken(&ball_rows(&sys.space, sys.eps), &sym));
        let oracle_full = classes.iter().all(|&m| m == full);
        let found = chain_relation(&sys, sys.eps)?.decomposition_search()?;
        if let Some((a, b)) = &found {
            split += 1;
            if a.is_empty() || b.is_empty() || !a.is_disjoint(b) {
                continue;
            }
        }
        agree += usize::from(found.is_none() == oracle_full);
    }
    let mut c = tally("no decomposition iff O(E∘R±∘E) is full", agree, total);
    c.detail.push_str(&format!(" ({split} decomposable)"));
    Ok(vec![c])
}

fn inward_separation(s: &Settings) -> Result<Vec<Check>> {
    let mut g = stream(s, 3);
    let (mut pairs, mut pairs_ok, mut diag, mut diag_ok, mut witness_ok) = (0, 0, 0, 0, 0);
    for _ in 0..200 {
        let sys = random_system(&mut g, 10);
        let n = sys.n();
        let full = (1u32 << n) - 1;
        let q = thicken(&ball_rows(&sys.space, sys.eps), &rows(&sys.relation));
        let qt = transpose(&q);
        let inward: Vec<u32> = (0..=full).filter(|&u| image_mask(&q, u) & !u == 0).collect();
        let limit = |step: &[u32], mut u: u32| loop {
            let next = image_mask(step, u);
            if next == u {
                return u;
            }
            u = next;
        };
        let covers: Vec<(u32, u32)> = inward.iter().map(|&u| (limit(&q, u), limit(&qt, full & !u))).collect();
        let ctx = chain_relation(&sys, sys.eps)?;
        for x in 0..n {
            for y in 0..n {
                let reaches = ctx.chain().contains(x, y);
                if x == y {
                    // Recurrent iff every attractor-repellor pair covers the point.
                    diag += 1;
                    let uncovered = covers.iter().any(|&(a, r)| (a | r) >> x & 1 == 0);
                    diag_ok += usize::from(reaches != uncovered);
                    continue;
                }
                pairs += 1;
                let separated = inward.iter().any(|&u| u >> x & 1 == 1 && u >> y & 1 == 0);
                pairs_ok += usize::from(reaches != separated);
                let pair = ctx.separating_attractor(x, y)?;
                let sound = match &pair {
                    Some(p) => p.inward.contains(x) && !p.inward.contains(y) && ctx.is_inward(&p.inward)?,
                    None => true,
                };
                witness_ok += usize::from(pair.is_some() == separated && sound);
            }
        }
    }
    Ok(vec![
        tally("distinct pairs: y ∈ C(x) iff no inward set holds x and misses y", pairs_ok, pairs),
        tally("diagonal: x ∈ C(x) iff every attractor-repellor pair covers x", diag_ok, diag),
        tally("separating attractor found exactly when one exists", witness_ok, pairs),
    ])
}

fn identity_components(s: &Settings) -> Result<Vec<Check>> {
    let mut g = stream(s, 4);
    let total = 200;
    let mut agree = 0;
    for _ in 0..total {
        let n = g.range(1, 16);
        let space = random_space(&mut g, n);
        let eps = space.diameter() * 0.6 * g.next_f64();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        for x in 0..n {
            for y in x + 1..n {
                if space.distance(x, y) <= eps {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let root = find(&mut parent, x);
            match comps.iter_mut().find(|c| find(&mut parent, c[0]) == root) {
                Some(c) => c.push(x),
                None => comps.push(vec![x]),
            }
        }
        comps.sort();
        let ctx = ChainContext::new(&space, &Relation::identity(n), eps)?;
        agree += usize::from(ctx.chain_components().classes == comps);
    }
    Ok(vec![tally("chain components of the identity equal ε-components", agree, total)])
}

fn random_set(g: &mut SplitMix64, n: usize) -> Result<PointSet> {
    Ok(PointSet::from_indices(n, (0..n).filter(|_| g.chance(0.5)).collect::<Vec<_>>())?)
}

fn relation_identities(s: &Settings) -> Result<Vec<Check>> {
    let mut g = stream(s, 5);
    let total = 500;
    let mut ok = [0usize; 4];
    for _ in 0..total {
        let n = g.range(1, 12);
        let density = 0.05 + 0.4 * g.next_f64();
        let q = random_relation(&mut g, n, density);
        let o = orbit(&q);
        ok[0] += usize::from(orbit(&o) == o);
        ok[1] += usize::from(orbit(&inverse(&q)) == inverse(&o));
        ok[2] += usize::from(q.union(&compose(&o, &q)?)? == o);
        let mut dual = true;
        for _ in 0..4 {
            let (a, b) = (random_set(&mut g, n)?, random_set(&mut g, n)?);
            dual &= image(&q, &a)?.is_subset(&b) == a.is_subset(&star(&q, &b)?);
        }
        ok[3] += usize::from(dual);
    }
    let names = [
        "orbit idempotence O(O(Q)) = O(Q)",
        "inverse duality O(Q⁻¹) = O(Q)⁻¹",
        "unrolling O(Q) = Q ∪ O(Q)∘Q",
        "star/image duality Q(A) ⊂ B iff A ⊂ Q*(B)",
    ];
    Ok(names.iter().zip(ok).map(|(name, k)| tally(name, k, total)).collect())
}

fn involution(s: &Settings) -> Result<Vec<Check>> {
    let mut g = stream(s, 10);
    let total = 100;
    let (mut square, mut nontrivial) = (0, 0);
    for _ in 0..total {
        let (n, p) = loop {
            let n = g.range(2, 12);
            let p = random_permutation(&mut g, n);
            if p.iter().enumerate().any(|(i, &j)| i != j) {
                break (n, p);
            }
        };
        // Force one point of h⁻¹(a) \ a so that a is valid.
        let moved: Vec<usize> = (0..n).filter(|&x| p[x] != x).collect();
        let x = moved[g.below(moved.len() as u64) as usize];
        let mut a: Vec<usize> = (0..n).filter(|&y| y != x && g.chance(0.5)).collect();
        if !a.contains(&p[x]) {
            a.push(p[x]);
        }
        let set = PointSet::from_indices(n, a)?;
        let inv = involution_from_clopen(&Relation::from_map(&p)?, &set)?;
        let m = inv.as_permutation().expect("involution is a permutation");
        square += usize::from((0..n).all(|y| m[m[y]] == y));
        nontrivial += usize::from((0..n).any(|y| m[y] != y));
    }
    Ok(vec![tally("g∘g = identity", square, total), tally("g ≠ identity", nontrivial, total)])
}

/// Forward and backward `Q`-reachability from point 0 over precomputed balls.
fn transitive_by_reachability(sys: &SystemModel, eps: f64) -> bool {
    let n = sys.n();
    let balls: Vec<Vec<usize>> =
        (0..n).map(|x| (0..n).filter(|&y| sys.space.distance(x, y) <= eps).collect()).collect();
    let succ: Vec<Vec<usize>> = (0..n).map(|x| sys.relation.successors(x).collect()).collect();
    let mut pred = vec![Vec::new(); n];
    for (x, ys) in succ.iter().enumerate() {
        for &y in ys {
            pred[y].push(x);
        }
    }
    let covers = |step: &[Vec<usize>]| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        let mut expanded = vec![false; n];
        while let Some(p) = stack.pop() {
            if std::mem::replace(&mut expanded[p], true) {
                continue;
            }
            for &b in &balls[p] {
                for &r in &step[b] {
                    for &c in &balls[r] {
                        if !seen[c] {
                            seen[c] = true;
                            stack.push(c);
                        }
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    covers(&succ) && covers(&pred)
}

fn compactified_integers(_: &Settings, refined: bool) -> Result<Vec<Verdict>> {
    let n = if refined { 24 } else { 20 };
    let eps = 0.2;
    let one = chain_relation(&z_star(n)?, eps)?.is_chain_transitive();
    let two = chain_relation(&z_star_star(n)?, eps)?.is_chain_transitive();
    let pair = two_z_star_star_quotient(n)?;
    let sym = ChainContext::new(&pair.space, &rpm(&pair.relation), eps)?;
    let ctx = ChainContext::new(&pair.space, &pair.relation, eps)?;
    let back = inverse(ctx.chain());
    let m = pair.n();
    let proper = (0..m).any(|x| (0..m).any(|y| x != y && !ctx.chain().contains(x, y) && !back.contains(x, y)));
    Ok(vec![
        verdict("one-point compactification chain transitive", one, true),
        verdict("two-point compactification chain transitive", two, false),
        verdict("glued pair: chain relation of f ∪ f⁻¹ is full", sym.is_chain_transitive(), true),
        verdict("glued pair: C(f) ∪ 1 ∪ C(f)⁻¹ is proper", proper, true),
    ])
}

fn point_extension_verdicts(_: &Settings, refined: bool) -> Result<Vec<Verdict>> {
    let base = tent_system(if refined { 128 } else { 64 })?;
    let sys = point_extension(&base, None)?;
    let ctx = chain_relation(&sys, sys.eps)?;
    let e = vbar(&sys.space, sys.eps)?;
    let iso = sys.group("isolated").expect("isolated group");
    let trans = trans_orbit(&rpm(&sys.relation), &e);
    let coords = sys.space.coords().expect("coordinate model");
    let dim = base.space.coords().expect("coordinate base")[0].len();
    let dense = (0..base.n()).all(|b| {
        sys.groups["tail"].iter().any(|&y| {
            let d2: f64 = (0..dim).map(|k| (coords[y][k] - coords[b][k]).powi(2)).sum();
            d2.sqrt() <= base.eps
        })
    });
    Ok(vec![
        verdict("chain transitive", ctx.is_chain_transitive(), true),
        verdict("chain transitive by independent reachability", transitive_by_reachability(&sys, sys.eps), true),
        verdict("f ∪ f⁻¹ has a transitive isolated point", trans.intersects(&iso), true),
        verdict("tail of isolated points projects ε-densely", dense, true),
    ])
}

fn cantor_gaps(_: &Settings, refined: bool) -> Result<Vec<Verdict>> {
    let depth = if refined { 5 } else { 4 };
    let eps = 1.5 * 3f64.powi(-(depth as i32));
    let sys = cantor_gap_extension(depth, 6)?;
    Ok(vec![
        verdict("chain transitive", chain_relation(&sys, eps)?.is_chain_transitive(), true),
        verdict("chain transitive by independent reachability", transitive_by_reachability(&sys, eps), true),
    ])
}

fn comb_stack(_: &Settings, refined: bool) -> Result<Vec<Verdict>> {
    let fam = comb_family(if refined { 12 } else { 8 })?;
    let s = &fam.stack;
    let ctx = chain_relation(s, s.eps)?;
    let (top, bottom) = (s.group("top").expect("top"), s.group("bottom").expect("bottom"));
    let pair = ctx.separating_attractor(top.first().expect("top point"), bottom.first().expect("bottom point"))?;
    let split = pair.is_some_and(|p| top.is_subset(&p.attractor) && bottom.is_subset(&p.repellor));
    Ok(vec![
        verdict("chain recurrent", ctx.is_chain_recurrent(), true),
        verdict("chain transitive", ctx.is_chain_transitive(), false),
        verdict("attractor holds C×{1}, repellor holds C×{0}", split, true),
        verdict("no ε-decomposition", ctx.decomposition_search()?.is_none(), true),
    ])
}

fn squaring_brush(_: &Settings, refined: bool) -> Result<Vec<Verdict>> {
    let sys = if refined { cantor_brush_squaring(32, 64)? } else { cantor_brush_squaring(16, 32)? };
    let ctx = chain_relation(&sys, sys.eps)?;
    let tip = sys.group("tip").and_then(|t| t.first()).expect("tip point");
    let pair = ctx.separating_attractor(0, tip)?;
    let traced = pair.is_some_and(|p| p.repellor.contains(tip) && p.attractor.contains(0));
    Ok(vec![
        verdict("chain transitive", ctx.is_chain_transitive(), false),
        verdict("repellor holds the bristle tip", traced, true),
    ])
}

fn comb_automorphisms(s: &Settings, refined: bool) -> Result<Vec<Verdict>> {
    let shift = if refined { 4 } else { 0 };
    (4..=6)
        .map(|k| {
            let n = k + shift;
            let c = comb(n)?;
            let group = automorphisms(&c.space, &vbar(&c.space, c.eps)?, s.budget)?;
            let points: Vec<usize> = ["e_minus", "e0", "e1"].iter().map(|g| c.groups[*g][0]).collect();
            let fixed = group.complete && group.generators.iter().all(|g| points.iter().all(|&p| g[p] == p));
            Ok(verdict(format!("{n} teeth: every automorphism fixes e₋₁, e₀, e₁"), fixed, true))
        })
        .collect()
}

fn oscillating_census(s: &Settings, refined: bool) -> Result<Vec<Verdict>> {
    let sys = oscillating_segments_refined(3, if refined { 2 } else { 1 })?;
    let census = component_census(&sys, sys.eps, s.budget)?;
    let class_of = |p: usize| census.components.iter().find(|c| c.points.contains(&p)).map(|c| c.class);
    let (c2, c3) = (class_of(sys.groups["x2"][0]), class_of(sys.groups["x3"][0]));
    Ok(vec![
        verdict("one component per segment", census.components.len() == 4, true),
        verdict("x2 and x3 in distinct isomorphism classes", c2.is_some() && c2 != c3, true),
    ])
}

fn tent_quotient_symmetry(s: &Settings, refined: bool) -> Result<Vec<Verdict>> {
    let q = quotient_x(if refined { 128 } else { 64 })?;
    Ok(vec![verdict("H-decomposable", is_h_decomposable(&q, q.eps, s.budget)?.is_some(), true)])
}

fn comb_stack_plus_symmetry(s: &Settings, refined: bool) -> Result<Vec<Verdict>> {
    let sys = comb_family(if refined { 9 } else { 5 })?.stack_plus;
    Ok(vec![verdict("H-decomposable", is_h_decomposable(&sys, sys.eps, s.budget)?.is_some(), false)])
}

/// Gallery families that take part in the stability check.
pub fn families() -> Vec<(&'static str, Family)> {
    vec![
        ("comb-automorphisms", comb_automorphisms as Family),
        ("comb-stack", comb_stack),
        ("comb-stack-plus-symmetry", comb_stack_plus_symmetry),
        ("compactified-integers", compactified_integers),
        ("cantor-gaps", cantor_gaps),
        ("oscillating-census", oscillating_census),
        ("point-extension", point_extension_verdicts),
        ("squaring-brush", squaring_brush),
        ("tent-quotient-symmetry", tent_quotient_symmetry),
    ]
}

fn stability(s: &Settings) -> Result<Vec<Check>> {
    families()
        .par_iter()
        .map(|(id, f)| {
            let (base, fine) = (f(s, false)?, f(s, true)?);
            let changed: Vec<&str> =
                base.iter().zip(&fine).filter(|(a, b)| a.actual != b.actual).map(|(a, _)| a.name.as_str()).collect();
            let passed = base.len() == fine.len() && changed.is_empty();
            let detail = if passed {
                format!("{} verdicts unchanged", base.len())
            } else {
                format!("changed: {}", changed.join("; "))
            };
            Ok(Check { name: id.to_string(), passed, detail })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_sorted() {
        let ids: Vec<&str> = cases().iter().map(|c| c.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn unknown_ids_are_rejected() {
        assert!(select(&["no-such-case".to_string()]).is_err());
        assert_eq!(select(&[]).unwrap().len(), cases().len());
        assert_eq!(select(&["involution".into(), "involution".into()]).unwrap().len(), 1);
    }

    #[test]
    fn mask_closure_of_a_cycle_is_full() {
        let step = vec![0b010, 0b100, 0b001];
        assert_eq!(closure(&step), vec![0b111; 3]);
        assert_eq!(transpose(&step), vec![0b100, 0b001, 0b010]);
    }
}
