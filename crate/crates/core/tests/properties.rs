use abctile::itypes::{sign_canonical, successor_set, FourteenTile, NeighborSubset};
use abctile::partition::{is_regular, refines, QnBuilder, Schedule};
use abctile::{addr_cmp, Address, DigitSystem};
use proptest::prelude::*;
use std::sync::OnceLock;

fn tile124() -> &'static FourteenTile {
    static T: OnceLock<FourteenTile> = OnceLock::new();
    T.get_or_init(|| FourteenTile::new(&DigitSystem::new(1, 2, 4).unwrap()).unwrap())
}

proptest! {
    #[test]
    fn negation_is_an_involution(bits in 0u16..(1 << 14)) {
        let r = NeighborSubset(bits);
        prop_assert_eq!(-(-r), r);
        prop_assert_eq!((-r).len(), r.len());
        prop_assert_eq!(sign_canonical(-r), sign_canonical(r));
    }

    #[test]
    fn successors_respect_unions(a in 0u16..(1 << 14), b in 0u16..(1 << 14), d in 0u32..4) {
        let t = tile124();
        let (ra, rb) = (NeighborSubset(a), NeighborSubset(b));
        prop_assert_eq!(
            successor_set(t, ra.union(rb), d),
            successor_set(t, ra, d).union(successor_set(t, rb, d))
        );
    }

    #[test]
    fn order_is_stable_under_refinement(
        a in proptest::collection::vec(0u32..4, 1..6),
        b in proptest::collection::vec(0u32..4, 1..6),
        x in 0u32..4,
        y in 0u32..4,
    ) {
        let n = a.len().min(b.len());
        let (a, b) = (Address::new(a[..n].to_vec()), Address::new(b[..n].to_vec()));
        let before = addr_cmp(&a, &b).unwrap();
        if before.is_ne() {
            prop_assert_eq!(addr_cmp(&a.child(x), &b.child(y)).unwrap(), before);
        }
    }

    #[test]
    fn schedule_display_round_trips(first in 3usize..8, gaps in proptest::collection::vec(3usize..6, 0..3), repeat: bool) {
        let mut marks = vec![first];
        for g in gaps {
            marks.push(marks.last().unwrap() + g);
        }
        let step = repeat.then_some(3);
        let s = Schedule::new(marks, step).unwrap();
        prop_assert_eq!(Schedule::parse(&s.to_string()).unwrap().marks_up_to(40), s.marks_up_to(40));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn random_schedules_give_regular_refining_partitions(first in 3usize..5, gap in 3usize..5) {
        let t = tile124();
        let sched = Schedule::new(vec![first, first + gap], None).unwrap();
        let mut b = QnBuilder::new(t, sched);
        let mut prev: Option<Vec<Address>> = None;
        for i in 1..=6 {
            let cells = b.cells(i).unwrap();
            prop_assert!(is_regular(&cells, 4));
            if let Some(p) = &prev {
                prop_assert!(refines(&cells, p));
            }
            prev = Some(cells);
        }
    }
}
