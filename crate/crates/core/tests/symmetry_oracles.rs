use chainrec::random::{random_permutation, random_relation, random_space};
use chainrec::rng::SplitMix64;
use chainrec::symmetry::*;
use chainrec::*;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn random_tolerance(g: &mut SplitMix64, n: usize) -> Relation {
    let density = 0.2 + 0.5 * g.next_f64();
    let r = random_relation(g, n, density);
    Relation::from_fn(n, |x, y| x == y || r.contains(x, y) || r.contains(y, x))
}

fn random_labels(g: &mut SplitMix64, n: usize) -> Option<Vec<String>> {
    g.chance(0.4).then(|| (0..n).map(|_| ["p", "q"][g.below(2) as usize].to_string()).collect())
}

fn preserves(e: &Relation, labels: Option<&[String]>, p: &[usize]) -> bool {
    let n = e.n();
    (0..n).all(|x| labels.is_none_or(|l| l[x] == l[p[x]]) && (0..n).all(|y| e.contains(x, y) == e.contains(p[x], p[y])))
}

#[test]
fn automorphisms_match_brute_force_enumeration() {
    let mut g = SplitMix64::new(400);
    for _ in 0..150 {
        let n = g.range(1, 7);
        let e = random_tolerance(&mut g, n);
        let labels = random_labels(&mut g, n);
        let graph = ToleranceGraph::from_relation(&e, labels.as_deref()).unwrap();
        let grp = graph_automorphisms(&graph, DEFAULT_BUDGET);
        assert!(grp.complete);
        let mut brute: Vec<Vec<usize>> =
            permutations(n).into_iter().filter(|p| preserves(&e, labels.as_deref(), p)).collect();
        brute.sort();
        assert_eq!(grp.order, Some(brute.len() as u128));
        assert_eq!(grp.elements(10_000).unwrap(), brute);
        let hx = hx_relation(&grp).unwrap();
        for x in 0..n {
            for y in 0..n {
                assert_eq!(hx.contains(x, y), brute.iter().any(|p| p[x] == y));
            }
        }
        assert!(hx.is_reflexive() && hx.is_symmetric() && hx.is_transitive());
    }
}

#[test]
fn isomorphism_matches_brute_force() {
    let mut g = SplitMix64::new(401);
    let mut found = 0;
    for _ in 0..200 {
        let n = g.range(1, 6);
        let e1 = random_tolerance(&mut g, n);
        let e2 = if g.chance(0.5) {
            let p = random_permutation(&mut g, n);
            Relation::from_fn(n, |x, y| e1.contains(p[x], p[y]))
        } else {
            random_tolerance(&mut g, n)
        };
        let a = ToleranceGraph::from_relation(&e1, None).unwrap();
        let b = ToleranceGraph::from_relation(&e2, None).unwrap();
        let brute = permutations(n)
            .into_iter()
            .any(|p| (0..n).all(|x| (0..n).all(|y| e1.contains(x, y) == e2.contains(p[x], p[y]))));
        let got = isomorphism(&a, &b, DEFAULT_BUDGET).unwrap();
        assert_eq!(got.is_some(), brute);
        if let Some(p) = got {
            found += 1;
            assert!((0..n).all(|x| (0..n).all(|y| e1.contains(x, y) == e2.contains(p[x], p[y]))));
        }
    }
    assert!(found > 50);
}

#[test]
fn symmetric_graphs_of_moderate_size() {
    // Disjoint union of 6 triangles: order 6! · 6⁶.
    let n = 18;
    let e = Relation::from_fn(n, |x, y| x / 3 == y / 3);
    let grp = graph_automorphisms(&ToleranceGraph::from_relation(&e, None).unwrap(), DEFAULT_BUDGET);
    assert_eq!(grp.order, Some(720 * 6u128.pow(6)));
    // Cycle of length 40: dihedral of order 80.
    let c = Relation::from_fn(40, |x, y| (x + 40 - y) % 40 <= 1 || (y + 40 - x) % 40 <= 1);
    let grp = graph_automorphisms(&ToleranceGraph::from_relation(&c, None).unwrap(), DEFAULT_BUDGET);
    assert_eq!(grp.order, Some(80));
    assert!(hx_relation(&grp).unwrap().is_full());
}

#[test]
fn homogeneous_cycle_is_h_indecomposable() {
    let n = 24;
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let space = FiniteSpace::from_coords(coords).unwrap();
    let sys = SystemModel::new("cycle", space, Relation::identity(n), 0.3).unwrap();
    assert!(is_h_decomposable(&sys, 0.3, DEFAULT_BUDGET).unwrap().is_none());
}

#[test]
fn h_decomposition_is_a_union_of_isomorphism_classes() {
    let mut g = SplitMix64::new(402);
    let mut split = 0;
    for _ in 0..120 {
        let n = g.range(2, 9);
        let space = random_space(&mut g, n);
        let eps = space.diameter() * 0.5 * g.next_f64();
        let sys = SystemModel::new("r", space, Relation::identity(n), eps).unwrap();
        let census = component_census(&sys, eps, DEFAULT_BUDGET).unwrap();
        if let Some((a, b)) = is_h_decomposable(&sys, eps, DEFAULT_BUDGET).unwrap() {
            split += 1;
            for class in &census.classes {
                let inside = class.points.iter().filter(|&&p| a.contains(p)).count();
                assert!(inside == 0 || inside == class.points.len());
            }
            assert!(sys.space.set_distance(&a, &b) > eps);
        } else {
            assert_eq!(census.classes.len(), 1);
        }
    }
    assert!(split > 10);
}

#[test]
fn census_of_a_single_component() {
    let space = FiniteSpace::from_coords(vec![vec![0.0], vec![0.5], vec![1.0]]).unwrap();
    let sys = SystemModel::new("seg", space, Relation::identity(3), 0.5).unwrap();
    let c = component_census(&sys, 0.5, DEFAULT_BUDGET).unwrap();
    assert_eq!(c.components.len(), 1);
    assert_eq!(c.classes.len(), 1);
    assert_eq!(c.components[0].diameter, sys.space.diameter());
}

#[test]
fn involutions_from_random_permutations() {
    let mut g = SplitMix64::new(403);
    let mut built = 0;
    for _ in 0..100 {
        let n = g.range(2, 12);
        let p = random_permutation(&mut g, n);
        let h = Relation::from_map(&p).unwrap();
        let a = PointSet::from_indices(n, (0..n).filter(|_| g.chance(0.5))).unwrap();
        if a.is_empty() || a.is_full() {
            assert!(involution_from_clopen(&h, &a).is_err());
            continue;
        }
        let b: Vec<usize> = (0..n).filter(|&x| a.contains(p[x]) && !a.contains(x)).collect();
        match involution_from_clopen(&h, &a) {
            Err(Error::EmptySupport) => assert!(b.is_empty()),
            Err(e) => panic!("{e}"),
            Ok(gr) => {
                built += 1;
                let q = gr.as_permutation().unwrap();
                assert!((0..n).all(|x| q[q[x]] == x));
                let moved: Vec<usize> = (0..n).filter(|&x| q[x] != x).collect();
                let mut support: Vec<usize> = b.iter().flat_map(|&x| [x, p[x]]).collect();
                support.sort_unstable();
                assert_eq!(moved, support);
            }
        }
    }
    assert!(built > 50);
}

#[test]
fn cycle_involution_swaps_across_the_arc_boundary() {
    for n in 3..12 {
        let p: Vec<usize> = (0..n).map(|x| (x + 1) % n).collect();
        let h = Relation::from_map(&p).unwrap();
        let a = PointSet::from_indices(n, 0..n / 2).unwrap();
        let g = involution_from_clopen(&h, &a).unwrap();
        // Only n-1 enters the arc {0..n/2}.
        let mut expected: Vec<usize> = (0..n).collect();
        expected.swap(n - 1, 0);
        assert_eq!(g.as_permutation().unwrap(), expected);
        let coords: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let space = FiniteSpace::from_coords(coords).unwrap();
        let eps = 0.5 * space.distance(0, 1);
        assert!(!ChainContext::new(&space, &g, eps).unwrap().is_chain_transitive());
    }
}
