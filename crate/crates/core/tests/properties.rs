use num_rational::BigRational;
use proptest::prelude::*;

use switchlab::lemmas::{count_x_bad, rank_delta_check};
use switchlab::linalg::rational::{is_zero_vector, mat_vec, vec_mat};
use switchlab::linalg::{self, modular, Side};
use switchlab::sampler::{sample, SamplerConfig};
use switchlab::switching::{self, Switch};
use switchlab::{rng, BiregularMatrix};

fn matrix(max_n: usize) -> impl Strategy<Value = BiregularMatrix> {
    (1..=max_n)
        .prop_flat_map(|n| (Just(n), 1..=n, any::<u64>()))
        .prop_map(|(n, d, seed)| {
            let cfg = SamplerConfig::mcmc(None, seed);
            sample(n, d, &cfg, &mut rng::seeded(seed)).unwrap()
        })
}

fn matrix_with_switch(max_n: usize) -> impl Strategy<Value = (BiregularMatrix, Switch)> {
    (matrix(max_n), any::<u64>()).prop_filter_map("no switching", |(a, seed)| {
        let all = switching::enumerate(&a);
        if all.is_empty() {
            return None;
        }
        let sw = all[(seed % all.len() as u64) as usize];
        Some((a, sw))
    })
}

fn small_vector(n: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-3i64..=3, 1i64..=3), n)
        .prop_map(|v| v.into_iter().map(|(p, q)| BigRational::new(p.into(), q.into())).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn serialize_parse_round_trip(a in matrix(12)) {
        let text = a.serialize();
        let b = BiregularMatrix::parse(&text).unwrap();
        prop_assert_eq!(&b, &a);
        prop_assert_eq!(b.serialize(), text);
        prop_assert_eq!(a.id().to_matrix().unwrap(), a);
    }

    #[test]
    fn apply_keeps_degrees_and_reverse_undoes((a, sw) in matrix_with_switch(10)) {
        let b = switching::apply(&a, sw).unwrap();
        for s in 0..a.n() {
            prop_assert_eq!(b.row(s).len(), a.d());
            prop_assert_eq!(b.col(s).len(), a.d());
        }
        prop_assert!(switching::can_perform(&b, sw.reverse()).unwrap());
        prop_assert_eq!(switching::apply(&b, sw.reverse()).unwrap(), a.clone());
        // the partner tuple performs the same transformation
        prop_assert_eq!(switching::apply(&a, sw.partner()).unwrap(), b);
    }

    #[test]
    fn switch_count_is_bounded_and_dedup_halves(a in matrix(9)) {
        let all = switching::enumerate(&a);
        let c = switching::count_with_bounds(&a).unwrap();
        prop_assert_eq!(c.total, all.len() as u64);
        prop_assert_eq!(all.len() % 2, 0);
        prop_assert_eq!(switching::dedup(&all).len() * 2, all.len());
        for sw in &all {
            prop_assert!(all.contains(&sw.partner()));
        }
    }

    #[test]
    fn kernels_annihilate_and_ranks_agree(a in matrix(14)) {
        let n = a.n();
        let rank = linalg::rank_rational(&a);
        let right = linalg::kernel(&a, Side::Right);
        let left = linalg::kernel(&a, Side::Left);
        prop_assert_eq!(right.vectors.len(), n - rank);
        prop_assert_eq!(left.vectors.len(), n - rank);
        for x in &right.vectors {
            prop_assert!(is_zero_vector(&mat_vec(&a, x)));
        }
        for y in &left.vectors {
            prop_assert!(is_zero_vector(&vec_mat(y, &a)));
        }
        prop_assert_eq!(linalg::rank_rational(&a.transpose()), rank);
        prop_assert!(modular::rank_mod_p(&a, 2) <= rank);
        prop_assert!(modular::rank_mod_p(&a, 3) <= rank);
        prop_assert_eq!(linalg::rank_exact(&a).rank, rank);
    }

    #[test]
    fn kernel_lies_in_every_f_perp(a in matrix(7)) {
        let ker = linalg::kernel(&a, Side::Right);
        for i in 0..a.n() {
            for j in 0..a.n() {
                if i != j {
                    prop_assert!(linalg::span_contains(&linalg::f_perp(&a, i, j).unwrap(), &ker));
                }
            }
        }
    }

    #[test]
    fn switching_preserves_f_and_moves_rank_by_at_most_one((a, sw) in matrix_with_switch(9)) {
        let b = switching::apply(&a, sw).unwrap();
        prop_assert!(linalg::spaces_equal(
            &linalg::f_perp(&a, sw.i, sw.j).unwrap(),
            &linalg::f_perp(&b, sw.i, sw.j).unwrap()
        ));
        let delta = rank_delta_check(&a, sw).unwrap();
        prop_assert!((-1..=1).contains(&delta));
        prop_assert_eq!(rank_delta_check(&b, sw.reverse()).unwrap(), -delta);
    }

    #[test]
    fn x_bad_chain_holds((a, x) in matrix(9).prop_flat_map(|a| { let n = a.n(); (Just(a), small_vector(n)) })) {
        // count_x_bad itself errors when the chain breaks
        let c = count_x_bad(&a, &x).unwrap();
        prop_assert!(c.count <= c.total_switches);
    }
}
