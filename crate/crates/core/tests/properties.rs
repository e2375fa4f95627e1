use num_bigint::BigInt;
use proptest::prelude::*;

use clsets::classify::canonical_form;
use clsets::clkernel::{complement, full_check, parameter, point_pencil, Characterization, Family};
use clsets::exactla::{kernel_basis, mat_mul, mat_vec, rank_exact, rank_mod_prime, ExactMatrix};
use clsets::setcore::{binomial, colex_rank, colex_unrank, count_partitions, enumerate_partitions};

fn small_matrix() -> impl Strategy<Value = ExactMatrix> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..4, r * c).prop_map(move |v| ExactMatrix::from_fn(r, c, |i, j| v[i * c + j]))
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

/// (n, k) with k | n and small enough that full checks are quick.
fn divisible_pair() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(vec![(4, 2), (6, 2), (6, 3), (8, 2), (8, 4), (9, 3)])
}

fn family_on(n: usize, k: usize) -> impl Strategy<Value = Family> {
    let len = binomial(n, k) as usize;
    prop::collection::vec(any::<bool>(), len).prop_map(move |bits| {
        let mut f = Family::empty(n, k).unwrap();
        for (r, b) in bits.into_iter().enumerate() {
            if b {
                f.insert(r);
            }
        }
        f
    })
}

proptest! {
    #[test]
    fn colex_round_trip((n, k, seed) in (1usize..=64).prop_flat_map(|n| (Just(n), 1..=n, any::<u64>()))) {
        let total = binomial(n, k);
        let rank = seed % total;
        let s = colex_unrank(rank, n, k).unwrap();
        prop_assert_eq!(s.k(), k);
        prop_assert_eq!(colex_rank(&s), rank);
        prop_assert!(colex_unrank(total, n, k).is_err());
    }

    #[test]
    fn rank_is_transpose_invariant(m in small_matrix()) {
        prop_assert_eq!(rank_exact(&m), rank_exact(&m.transpose()));
        prop_assert!(rank_mod_prime(&m, 7) <= rank_exact(&m));
    }

    #[test]
    fn kernel_basis_annihilates(m in small_matrix()) {
        let basis = kernel_basis(&m);
        prop_assert_eq!(basis.len() + rank_exact(&m), m.cols());
        for b in &basis {
            prop_assert!(mat_vec(&m, b).unwrap().is_zero());
        }
    }

    #[test]
    fn product_matches_naive(a in small_matrix(), scale in 0u32..80) {
        // scaling pushes entries past i64 so every product path is exercised
        let big = BigInt::from(3).pow(scale);
        let entries = (0..a.rows()).flat_map(|r| (0..a.cols()).map(move |c| (r, c))).map(|(r, c)| a.get(r, c) * &big);
        let a = ExactMatrix::new(a.rows(), a.cols(), entries.collect()).unwrap();
        let b = a.transpose();
        let p = mat_mul(&a, &b).unwrap();
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let naive: BigInt = (0..a.cols()).map(|t| a.get(i, t) * b.get(t, j)).sum();
                prop_assert_eq!(p.get(i, j), &naive);
            }
        }
    }

    #[test]
    fn verdicts_invariant_under_relabeling(
        (f, perm) in divisible_pair().prop_flat_map(|(n, k)| (family_on(n, k), permutation(n)))
    ) {
        let g = f.relabel(&perm).unwrap();
        let (a, b) = (full_check(&f).unwrap(), full_check(&g).unwrap());
        prop_assert_eq!(a.verdicts, b.verdicts);
        prop_assert_eq!(a.parameter, b.parameter);
        prop_assert_eq!(canonical_form(&f).unwrap().canonical, canonical_form(&g).unwrap().canonical);
    }

    #[test]
    fn relabeled_pencils_are_classes(((n, k), p, perm) in divisible_pair()
        .prop_flat_map(|(n, k)| (Just((n, k)), 0..n, permutation(n))))
    {
        let f = point_pencil(n, k, p).unwrap().relabel(&perm).unwrap();
        prop_assert_eq!(&f, &point_pencil(n, k, perm[p]).unwrap());
        let r = full_check(&f).unwrap();
        prop_assert!(r.all_true());
    }

    #[test]
    fn complement_duality(f in divisible_pair().prop_flat_map(|(n, k)| family_on(n, k))) {
        let g = complement(&f);
        let (a, b) = (full_check(&f).unwrap(), full_check(&g).unwrap());
        prop_assert_eq!(a.is_cl(), b.is_cl());
        for c in [Characterization::Partitions, Characterization::Disjointness, Characterization::Kernel] {
            prop_assert_eq!(a.verdicts[&c], b.verdicts[&c]);
        }
        let m = (f.n() / f.k()) as u64;
        if let Some(x) = parameter(&f).as_integer() {
            prop_assert_eq!(parameter(&g).as_integer(), Some(m - x));
        }
    }
}

#[test]
fn partitions_are_valid_and_counted() {
    for (n, k) in [(6, 2), (8, 4), (9, 3), (10, 2), (12, 3)] {
        let mut count = 0u64;
        for p in enumerate_partitions(n, k).unwrap() {
            let union = p.blocks().iter().fold(0u64, |acc, b| {
                assert_eq!(acc & b.mask(), 0);
                acc | b.mask()
            });
            assert_eq!(union, (1 << n) - 1);
            count += 1;
        }
        assert_eq!(count_partitions(n, k).unwrap(), count.into());
    }
}
