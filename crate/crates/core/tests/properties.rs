//! Randomized property suites for the exact-arithmetic invariants.

use proptest::prelude::*;

use hilbres_core::hilbstrata::{is_subdivision, partitions, Partition};
use hilbres_core::linalg::{Matrix, Subspace};
use hilbres_core::numberfield::{format_rational, parse_rational, rat, NumberField};

fn small_rational() -> impl Strategy<Value = (i64, i64)> {
    (-40i64..=40, 1i64..=12)
}

fn rational_rows(k: usize, d: usize) -> impl Strategy<Value = Vec<Vec<(i64, i64)>>> {
    prop::collection::vec(prop::collection::vec(small_rational(), k), d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_format_round_trips((p, q) in small_rational()) {
        let r = rat(p, q);
        let back = parse_rational(&format_rational(&r)).unwrap();
        prop_assert_eq!(r, back);
    }

    #[test]
    fn rank_nullity(rows in rational_rows(5, 4)) {
        let rows: Vec<Vec<_>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|(p, q)| rat(p, q)).collect())
            .collect();
        let m = Matrix::from_rational_rows(rows);
        let rank = m.rref().rank;
        let nullity = m.kernel().dim();
        prop_assert_eq!(rank + nullity, m.cols());
    }

    #[test]
    fn subspace_dimension_formula(
        a_rows in rational_rows(4, 2),
        b_rows in rational_rows(4, 2),
    ) {
        let mk = |rows: Vec<Vec<(i64, i64)>>| {
            let rows: Vec<Vec<_>> = rows
                .into_iter()
                .map(|r| r.into_iter().map(|(p, q)| rat(p, q)).collect())
                .collect();
            Subspace::from_rational_rows(4, rows)
        };
        let a = mk(a_rows);
        let b = mk(b_rows);
        let sum = a.sum(&b).unwrap();
        let meet = a.intersect(&b).unwrap();
        prop_assert_eq!(a.dim() + b.dim(), sum.dim() + meet.dim());
        prop_assert!(sum.contains(&a).unwrap());
        prop_assert!(a.contains(&meet).unwrap());
    }

    #[test]
    fn rref_is_canonical(rows in rational_rows(4, 3), scale in 1i64..=7) {
        // Scaling the generators must not change the canonical basis.
        let rows: Vec<Vec<_>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|(p, q)| rat(p * scale, q)).collect())
            .collect();
        let unscaled: Vec<Vec<_>> = rows
            .iter()
            .map(|r| r.iter().map(|x| x / rat(scale, 1)).collect())
            .collect();
        let a = Subspace::from_rational_rows(4, rows);
        let b = Subspace::from_rational_rows(4, unscaled);
        prop_assert!(a.equal(&b).unwrap());
        prop_assert_eq!(a.basis().to_rational_rows().unwrap(),
                        b.basis().to_rational_rows().unwrap());
    }

    #[test]
    fn cyclotomic_inverse_round_trips(n in 1u32..=16, num in 1i64..=9, den in 1i64..=9) {
        let f = NumberField::cyclotomic(n, 64).unwrap();
        let x = f.generator().scale(&rat(num, den)).add(&f.one()).unwrap();
        if !x.is_zero() {
            let back = x.inverse().unwrap().mul(&x).unwrap();
            prop_assert!(back.is_one());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn subdivision_witness_is_sound(k in 1u64..=9, i in 0usize..20, j in 0usize..20) {
        let ps = partitions(k, 60).unwrap();
        let fine = &ps[i % ps.len()];
        let coarse = &ps[j % ps.len()];
        if let Some(grouping) = is_subdivision(fine, coarse).unwrap() {
            // The witness groups fine's parts into coarse's parts.
            prop_assert_eq!(grouping.len(), coarse.len());
            let mut used: Vec<u64> = Vec::new();
            for (block, &target) in grouping.iter().zip(coarse.parts()) {
                prop_assert_eq!(block.iter().sum::<u64>(), target);
                used.extend(block.iter().copied());
            }
            used.sort_unstable_by(|a, b| b.cmp(a));
            prop_assert_eq!(&Partition::new(used), fine);
        }
    }

    #[test]
    fn subdivision_respects_length(k in 1u64..=9, i in 0usize..20, j in 0usize..20) {
        let ps = partitions(k, 60).unwrap();
        let fine = &ps[i % ps.len()];
        let coarse = &ps[j % ps.len()];
        if is_subdivision(fine, coarse).unwrap().is_some() {
            prop_assert!(fine.len() >= coarse.len());
        }
    }
}
