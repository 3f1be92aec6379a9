use ost_shuffle::{Card, GroupElement, GroupIndex, GroupParams};
use proptest::prelude::*;

fn element(m: u32, n: u32) -> impl Strategy<Value = GroupElement> {
    let p = GroupParams::new(m, n).unwrap();
    (
        proptest::collection::vec(0..m, n as usize),
        Just((1..=n).collect::<Vec<u32>>()).prop_shuffle(),
    )
        .prop_map(move |(colors, perm)| GroupElement::new(p, colors, perm).unwrap())
}

fn triple() -> impl Strategy<Value = (GroupElement, GroupElement, GroupElement)> {
    (1u32..=5, 1u32..=9).prop_flat_map(|(m, n)| (element(m, n), element(m, n), element(m, n)))
}

proptest! {
    #[test]
    fn associative((a, b, c) in triple()) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_and_identity((a, _, _) in triple()) {
        let e = GroupElement::identity(a.params());
        prop_assert!(a.compose(&a.inverse()).unwrap().is_identity());
        prop_assert!(a.inverse().compose(&a).unwrap().is_identity());
        prop_assert_eq!(e.compose(&a).unwrap(), a.clone());
        prop_assert_eq!(a.inverse().inverse(), a);
    }

    #[test]
    fn projection_is_a_homomorphism((a, b, _) in triple()) {
        prop_assert_eq!(
            a.compose(&b).unwrap().project(),
            a.project().compose(&b.project()).unwrap()
        );
    }

    #[test]
    fn rank_round_trip((a, _, _) in triple()) {
        let p = a.params();
        let r = a.rank().unwrap();
        prop_assert!(r.get() < p.order().unwrap());
        prop_assert_eq!(GroupElement::unrank(p, r).unwrap(), a);
    }

    #[test]
    fn unrank_round_trip(m in 1u32..=4, n in 1u32..=7, x in any::<u64>()) {
        let p = GroupParams::new(m, n).unwrap();
        let r = GroupIndex(x as usize % p.order().unwrap());
        prop_assert_eq!(GroupElement::unrank(p, r).unwrap().rank().unwrap(), r);
    }

    #[test]
    fn acts_on_cards_from_the_right((a, b, _) in triple(), pos in 0u32..9, k in 0u32..5) {
        let p = a.params();
        let card = Card::new(pos % p.n() + 1, k % p.m());
        let ab = a.compose(&b).unwrap();
        prop_assert_eq!(
            ab.act_on_card(card).unwrap(),
            b.act_on_card(a.act_on_card(card).unwrap()).unwrap()
        );
    }

    #[test]
    fn text_form_round_trip((a, _, _) in triple()) {
        prop_assert_eq!(GroupElement::parse(a.params(), &a.to_string()).unwrap(), a);
    }
}
