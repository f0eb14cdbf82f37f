use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;

use qmodal::enumerate::{
    classify, count_family, count_theorem4_left, count_theorem4_right, rank, Composition, HalfBound, Strength,
};
use qmodal::genfun::{multimodal_gf, rank_u_gf, unimodal_gf, FamilyTag};
use qmodal::rootsofunity::{fg_closed, fg_direct, PeriodicTable};
use qmodal::series::BivariateSeries;
use qmodal::symbols::{poch_product, Sign};

fn tag_strategy() -> impl Strategy<Value = FamilyTag> {
    prop_oneof![
        Just(FamilyTag::Partition),
        Just(FamilyTag::PartitionDistinct),
        Just(FamilyTag::Composition),
        Just(FamilyTag::CompositionFirstMax),
        (1u32..=4).prop_map(FamilyTag::Unimodal),
        (1u32..=4).prop_map(FamilyTag::StronglyUnimodal),
        (1u32..=4).prop_map(FamilyTag::Multimodal),
        Just(FamilyTag::MultimodalAll),
        proptest::option::of(1u32..=3).prop_map(FamilyTag::StrongMultimodal),
        proptest::option::of(1u32..=3).prop_map(FamilyTag::SemistrongMultimodal),
        Just(FamilyTag::RankU),
    ]
}

fn series_strategy(order: usize) -> impl Strategy<Value = BivariateSeries> {
    proptest::collection::vec((0..=order, 0..=order, -5i64..=5), 0..12).prop_map(move |cells| {
        let terms = cells.into_iter().filter(|&(z, q, _)| z <= q).map(|(z, q, c)| (z, q, BigInt::from(c)));
        BivariateSeries::from_terms(order, terms).unwrap()
    })
}

fn table(values: Vec<(f64, f64)>) -> PeriodicTable {
    PeriodicTable::new(values.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classify_round_trips(parts in proptest::collection::vec(1u32..=6, 1..10)) {
        let c = Composition::new(parts).unwrap();
        if let Some(d) = classify(&c).unwrap() {
            prop_assert_eq!(d.reassemble(), c.clone());
            prop_assert_eq!(d.size(), c.size());
            prop_assert_eq!(d.peak, c.largest());
            prop_assert_eq!(d.k, c.parts().iter().filter(|&&p| p == d.peak).count());
        }
    }

    #[test]
    fn strength_matches_sides(parts in proptest::collection::vec(1u32..=5, 1..10)) {
        let c = Composition::new(parts).unwrap();
        if let Some(d) = classify(&c).unwrap() {
            let left_strict = d.left.is_distinct();
            let right_strict = d.right.is_distinct();
            let expected = match (left_strict, right_strict) {
                (true, true) => Strength::Strong,
                (true, false) => Strength::Semistrong,
                _ => Strength::Plain,
            };
            prop_assert_eq!(d.strength, expected);
        }
    }

    #[test]
    fn reversal_negates_rank(parts in proptest::collection::vec(1u32..=7, 1..8)) {
        let c = Composition::new(parts.clone()).unwrap();
        let mut rev = parts;
        rev.reverse();
        let r = Composition::new(rev).unwrap();
        if let (Some(a), Some(b)) = (classify(&c).unwrap(), classify(&r).unwrap()) {
            if let (Ok(x), Ok(y)) = (rank(&a), rank(&b)) {
                prop_assert_eq!(x, -y);
            }
        }
    }

    #[test]
    fn series_agree_with_oracle(tag in tag_strategy(), n in 1usize..=10) {
        let table = count_family(tag, n).unwrap();
        prop_assert!(table.diff_series(&tag.series(n)).is_empty());
    }

    #[test]
    fn generated_series_are_triangular(tag in tag_strategy(), n in 1usize..=16) {
        prop_assert!(tag.series(n).terms().iter().all(|(z, q, _)| z.unsigned_abs() as usize <= *q));
    }

    #[test]
    fn multiplication_is_commutative_and_associative(
        a in series_strategy(8), b in series_strategy(8), c in series_strategy(8)
    ) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn json_round_trips(a in series_strategy(10)) {
        prop_assert_eq!(BivariateSeries::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn poch_product_inverts(n in 0usize..=8, order in 1usize..=14) {
        let p = poch_product(n, Sign::Minus, order);
        prop_assert_eq!(&p.invert().unwrap() * &p, BivariateSeries::one(order));
    }

    #[test]
    fn unimodal_counts_stay_below_multimodal(k in 1u32..=5, order in 1usize..=14) {
        let (u, m) = (unimodal_gf(k, order), multimodal_gf(k, order));
        for (z, q, c) in u.terms() {
            prop_assert!(*c <= m.coeff(z, q).unwrap());
        }
    }

    #[test]
    fn closed_periodic_sum_matches_direct(
        phi in proptest::collection::vec((-1.2f64..1.2, -1.2f64..1.2), 2..=6),
        gseed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
        j in 0u32..=10,
        r in 0usize..6,
    ) {
        let m = phi.len();
        let r = r % m;
        let (phi, g) = (table(phi), table(gseed[..m].to_vec()));
        let n = m * j as usize + r;
        let direct = fg_direct(&phi, &g, n).unwrap();
        let closed = fg_closed(&phi, &g, j, r).unwrap();
        let mut f = Complex64::new(1.0, 0.0);
        let mut scale = f64::MIN_POSITIVE;
        for i in 1..=n {
            f *= phi.at(i);
            scale += (f * g.at(i)).norm();
        }
        prop_assert!((closed - direct).norm() <= 1e-9 * scale, "{closed} vs {direct}");
    }
}

#[test]
fn rank_series_is_symmetric() {
    for order in [0, 1, 5, 12] {
        let u = rank_u_gf(order);
        assert_eq!(u.reflect(), u);
    }
}

#[test]
fn peak_split_counts_match_hand_values() {
    // Independently tabulated for N = 1..12.
    let want = [1u64, 2, 4, 7, 13, 23, 40, 68, 115, 193, 323, 541];
    for (i, &w) in want.iter().enumerate() {
        let n = i + 1;
        assert_eq!(count_theorem4_left(n).unwrap(), w, "left N={n}");
        assert_eq!(count_theorem4_right(n, HalfBound::FloorHalfBelowPeak).unwrap(), w, "right N={n}");
    }
    // The literal bound floor(n/2) overcounts from N = 4.
    assert_eq!(count_theorem4_right(4, HalfBound::FloorHalfPeak).unwrap(), 8);
}
