mod common;

use chainrec::random::random_relation;
use chainrec::relation::{orbit_condensed, orbit_warshall, preimage};
use chainrec::rng::SplitMix64;
use chainrec::*;
use common::*;
use proptest::prelude::*;

fn edges(r: &Relation) -> Vec<(usize, usize)> {
    r.edges().collect()
}

#[test]
fn compose_seeded_instance() {
    let mut g = SplitMix64::new(1);
    let r = random_relation(&mut g, 8, 0.3);
    let s = random_relation(&mut g, 8, 0.3);
    let expected = vec![
        (1, 1),
        (1, 2),
        (1, 3),
        (1, 4),
        (1, 5),
        (1, 6),
        (2, 2),
        (2, 3),
        (2, 4),
        (2, 5),
        (2, 6),
        (2, 7),
        (3, 1),
        (3, 2),
        (3, 3),
        (3, 5),
        (3, 6),
        (3, 7),
        (4, 1),
        (4, 7),
        (5, 1),
        (5, 4),
        (5, 5),
        (5, 6),
        (5, 7),
        (6, 0),
        (6, 4),
        (6, 5),
        (6, 6),
        (6, 7),
        (7, 3),
        (7, 7),
    ];
    assert_eq!(edges(&compose(&s, &r).unwrap()), expected);
}

#[test]
fn orbit_seeded_instance() {
    let mut g = SplitMix64::new(2);
    let r = random_relation(&mut g, 10, 0.15);
    let expected = vec![
        (2, 0),
        (2, 1),
        (2, 3),
        (2, 7),
        (2, 8),
        (3, 1),
        (3, 7),
        (4, 0),
        (4, 1),
        (4, 2),
        (4, 3),
        (4, 7),
        (4, 8),
        (6, 0),
        (6, 1),
        (6, 2),
        (6, 3),
        (6, 4),
        (6, 7),
        (6, 8),
        (7, 1),
        (8, 1),
        (8, 3),
        (8, 7),
        (9, 1),
        (9, 3),
        (9, 7),
        (9, 8),
    ];
    assert_eq!(edges(&orbit(&r)), expected);
}

#[test]
fn omega_relation_seeded_instance() {
    let mut g = SplitMix64::new(3);
    let r = random_relation(&mut g, 8, 0.2);
    let expected: Vec<Vec<usize>> = vec![
        vec![0, 1, 3, 6],
        vec![],
        vec![0, 1, 2, 3, 5, 6, 7],
        vec![3],
        vec![0, 1, 3, 6],
        vec![0, 1, 3, 5, 6, 7],
        vec![],
        vec![0, 1, 3, 5, 6, 7],
    ];
    let w = omega_relation(&r).unwrap();
    for (x, row) in expected.iter().enumerate() {
        assert_eq!(&w.row(x).to_vec(), row, "row {x}");
    }
}

#[test]
fn condensed_and_warshall_closures_agree_above_threshold() {
    let mut g = SplitMix64::new(99);
    for n in [257usize, 300, 400] {
        let r = random_relation(&mut g, n, 2.0 / n as f64);
        assert_eq!(orbit_condensed(&r), orbit_warshall(&r), "n = {n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn compose_is_boolean_product((r, s) in arb_pair(8)) {
        let got = compose(&s, &r).unwrap();
        prop_assert_eq!(to_matrix(&got), matmul(&to_matrix(&s), &to_matrix(&r)));
    }

    #[test]
    fn inverse_reverses_composition((r, s) in arb_pair(8)) {
        let lhs = compose(&inverse(&r), &inverse(&s)).unwrap();
        let rhs = inverse(&compose(&s, &r).unwrap());
        prop_assert_eq!(&lhs, &rhs);
        // Transpose oracle.
        let m = to_matrix(&compose(&s, &r).unwrap());
        for x in 0..r.n() {
            for y in 0..r.n() {
                prop_assert_eq!(rhs.contains(y, x), m[x][y]);
            }
        }
        prop_assert_eq!(inverse(&inverse(&r)), r);
    }

    #[test]
    fn image_is_union_of_rows((r, a) in arb_relation_and_set(12)) {
        let got = image(&r, &a).unwrap();
        let n = r.n();
        let mut bits = vec![false; n];
        for x in a.iter() {
            for (y, b) in bits.iter_mut().enumerate() {
                *b |= r.contains(x, y);
            }
        }
        prop_assert_eq!(got, set_of(n, &bits));
    }

    #[test]
    fn star_is_row_containment((r, b) in arb_relation_and_set(12)) {
        let got = star(&r, &b).unwrap();
        for x in 0..r.n() {
            let inside = (0..r.n()).all(|y| !r.contains(x, y) || b.contains(y));
            prop_assert_eq!(got.contains(x), inside);
        }
    }

    #[test]
    fn orbit_is_union_of_powers(r in arb_relation(10)) {
        prop_assert_eq!(to_matrix(&orbit(&r)), power_union(&to_matrix(&r)));
        prop_assert_eq!(orbit_condensed(&r), orbit_warshall(&r));
    }

    #[test]
    fn cyclic_set_of_orbit_is_self_reachability(r in arb_relation(10)) {
        let cyc = cyclic_set(&orbit(&r));
        for x in 0..r.n() {
            prop_assert_eq!(cyc.contains(x), bfs_reach(&r, x)[x]);
        }
    }

    #[test]
    fn omega_set_of_forward_invariant_set_is_intersection((r, a) in arb_relation_and_set(10)) {
        // Close a forward so that R(a) ⊂ a.
        let mut inv = a.clone();
        loop {
            let next = inv.union(&image(&r, &inv).unwrap());
            if next == inv { break; }
            inv = next;
        }
        let mut meet = inv.clone();
        let mut cur = inv.clone();
        loop {
            cur = image(&r, &cur).unwrap();
            let next = meet.intersection(&cur);
            if next == meet { break; }
            meet = next;
        }
        let l = omega_set(&r, &inv).unwrap();
        prop_assert_eq!(&l.limsup_set, &meet);
        prop_assert_eq!(image(&r, &l.limsup_set).unwrap(), l.limsup_set);
    }

    #[test]
    fn limit_set_tail_is_periodic((r, a) in arb_relation_and_set(10)) {
        let l = omega_set(&r, &a).unwrap();
        let mut seq = vec![a.clone()];
        for _ in 0..(l.tail_start + 2 * l.period) {
            let next = image(&r, seq.last().unwrap()).unwrap();
            seq.push(next);
        }
        prop_assert_eq!(&seq[l.tail_start], &seq[l.tail_start + l.period]);
        let mut u = PointSet::empty(r.n());
        for s in &seq[l.tail_start..l.tail_start + l.period] {
            u.union_with(s);
        }
        prop_assert_eq!(u, l.limsup_set);
    }

    #[test]
    fn hitting_times_match_power_iteration((r, u) in arb_relation_and_set(8), seed in any::<u64>()) {
        let n = r.n();
        let mut g = SplitMix64::new(seed);
        let v = PointSet::from_indices(n, (0..n).filter(|_| g.chance(0.3))).unwrap();
        let m = to_matrix(&r);
        let mut p = m.clone();
        let mut expected = Vec::new();
        for k in 1..=6 {
            if k > 1 { p = matmul(&m, &p); }
            let hit = u.iter().any(|x| (0..n).any(|y| p[x][y] && v.contains(y)));
            if hit { expected.push(k); }
        }
        prop_assert_eq!(hitting_times(&r, &u, &v, 6).unwrap(), expected);
    }

    #[test]
    fn preimage_dual_of_image((r, b) in arb_relation_and_set(10)) {
        prop_assert_eq!(preimage(&r, &b).unwrap(), image(&inverse(&r), &b).unwrap());
    }
}
