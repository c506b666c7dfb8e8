#![allow(dead_code)]

use chainrec::{PointSet, Relation};
use proptest::prelude::*;

pub type Matrix = Vec<Vec<bool>>;

pub fn to_matrix(r: &Relation) -> Matrix {
    (0..r.n()).map(|x| (0..r.n()).map(|y| r.contains(x, y)).collect()).collect()
}

pub fn from_matrix(m: &Matrix) -> Relation {
    Relation::from_fn(m.len(), |x, y| m[x][y])
}

/// Boolean matrix product in relation order: `(s ∘ r)[x][z] = ∃y r[x][y] ∧ s[y][z]`.
pub fn matmul(s: &Matrix, r: &Matrix) -> Matrix {
    let n = r.len();
    let mut out = vec![vec![false; n]; n];
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if r[x][y] && s[y][z] {
                    out[x][z] = true;
                }
            }
        }
    }
    out
}

/// `⋃_{k=1..n} rᵏ` by repeated multiplication.
pub fn power_union(r: &Matrix) -> Matrix {
    let n = r.len();
    let mut acc = r.clone();
    let mut p = r.clone();
    for _ in 1..n.max(1) {
        p = matmul(r, &p);
        for x in 0..n {
            for y in 0..n {
                acc[x][y] |= p[x][y];
            }
        }
    }
    acc
}

/// Targets reachable from `x` in one or more steps, by breadth-first search.
pub fn bfs_reach(r: &Relation, x: usize) -> Vec<bool> {
    let n = r.n();
    let mut seen = vec![false; n];
    let mut queue: Vec<usize> = (0..n).filter(|&y| r.contains(x, y)).collect();
    for &y in &queue {
        seen[y] = true;
    }
    while let Some(y) = queue.pop() {
        for z in 0..n {
            if r.contains(y, z) && !seen[z] {
                seen[z] = true;
                queue.push(z);
            }
        }
    }
    seen
}

pub fn set_of(n: usize, bits: &[bool]) -> PointSet {
    PointSet::from_indices(n, bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)).unwrap()
}

pub fn arb_relation(max_n: usize) -> impl Strategy<Value = Relation> {
    (1..=max_n).prop_flat_map(|n| {
        (Just(n), 0.0f64..0.5, proptest::collection::vec(0.0f64..1.0, n * n))
            .prop_map(|(n, p, u)| Relation::from_fn(n, |x, y| u[x * n + y] < p))
    })
}

pub fn arb_pair(max_n: usize) -> impl Strategy<Value = (Relation, Relation)> {
    (1..=max_n).prop_flat_map(|n| {
        let cells = proptest::collection::vec(any::<bool>(), n * n);
        (cells.clone(), cells).prop_map(move |(a, b)| {
            (Relation::from_fn(n, |x, y| a[x * n + y]), Relation::from_fn(n, |x, y| b[x * n + y]))
        })
    })
}

pub fn arb_relation_and_set(max_n: usize) -> impl Strategy<Value = (Relation, PointSet)> {
    arb_relation(max_n).prop_flat_map(|r| {
        let n = r.n();
        (Just(r), proptest::collection::vec(any::<bool>(), n)).prop_map(move |(r, b)| (r, set_of(n, &b)))
    })
}

use chainrec::FiniteSpace;

/// One `ε`-step by definition: `d(x, a) ≤ ε`, `(a, b) ∈ R`, `d(b, y) ≤ ε`.
pub fn brute_step(space: &FiniteSpace, r: &Relation, eps: f64) -> Matrix {
    let n = r.n();
    let mut m = vec![vec![false; n]; n];
    for x in 0..n {
        for a in 0..n {
            if space.distance(x, a) > eps {
                continue;
            }
            for b in 0..n {
                if !r.contains(a, b) {
                    continue;
                }
                for (y, cell) in m[x].iter_mut().enumerate() {
                    if space.distance(b, y) <= eps {
                        *cell = true;
                    }
                }
            }
        }
    }
    m
}

/// Chain reachability by breadth-first search over `ε`-steps.
pub fn brute_chain(space: &FiniteSpace, r: &Relation, eps: f64) -> Matrix {
    let step = from_matrix(&brute_step(space, r, eps));
    (0..r.n()).map(|x| bfs_reach(&step, x)).collect()
}

/// Connected components of the `ε`-ball graph by union-find.
pub fn ball_components(space: &FiniteSpace, eps: f64) -> Vec<Vec<usize>> {
    let n = space.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    for x in 0..n {
        for y in x + 1..n {
            if space.distance(x, y) <= eps {
                let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in 0..n {
        let root = find(&mut parent, x);
        groups.entry(root).or_default().push(x);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}
