mod common;

use chainrec::*;
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn orbit_is_idempotent(r in arb_relation(12)) {
        let o = orbit(&r);
        prop_assert_eq!(orbit(&o), o);
    }

    #[test]
    fn orbit_commutes_with_inverse(r in arb_relation(12)) {
        prop_assert_eq!(orbit(&inverse(&r)), inverse(&orbit(&r)));
    }

    #[test]
    fn orbit_is_monotone((r, s) in arb_pair(12)) {
        let small = r.intersection(&s).unwrap();
        prop_assert!(orbit(&small).is_subset(&orbit(&r)));
    }

    #[test]
    fn orbit_unrolls(q in arb_relation(12)) {
        let o = orbit(&q);
        let right = q.union(&compose(&o, &q).unwrap()).unwrap();
        let left = q.union(&compose(&q, &o).unwrap()).unwrap();
        prop_assert_eq!(&o, &right);
        prop_assert_eq!(&o, &left);
    }

    #[test]
    fn star_is_dual_to_inverse_image((r, b) in arb_relation_and_set(12)) {
        let dual = image(&inverse(&r), &b.complement()).unwrap().complement();
        prop_assert_eq!(star(&r, &b).unwrap(), dual);
    }

    #[test]
    fn rpm_is_reflexive_symmetric_superset(r in arb_relation(12)) {
        let p = rpm(&r);
        prop_assert!(p.is_reflexive());
        prop_assert!(p.is_symmetric());
        prop_assert!(r.is_subset(&p));
    }
}
