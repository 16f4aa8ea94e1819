//! Property tests for the structural invariants: generator monotonicity
//! and gap conditions, series reversion, cumulant symmetry, and engine
//! agreement on random small instances.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use lacunary::diophantine::{count_geometric_dp, count_signed_zero_sums, WorkBounds};
use lacunary::moments::{cos_power_expand, moments_to_cumulants};
use lacunary::sequences::{geometric, interleaved, large_gap, perturbed};
use lacunary::series::PowerSeries;

fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

proptest! {
    #[test]
    fn geometric_terms_increase_with_exact_ratio(q in 2u64..7, n in 1usize..30) {
        let seq = geometric(q, n).unwrap();
        prop_assert!(seq.terms().windows(2).all(|w| w[0] < w[1]));
        if n >= 2 {
            let qr = BigRational::from_integer(BigInt::from(q));
            prop_assert!(seq.gap_ratios().unwrap().iter().all(|r| *r == qr));
            prop_assert!(seq.hadamard_check(&qr).unwrap());
        }
    }

    #[test]
    fn large_gap_is_strictly_increasing(n in 1usize..15) {
        let seq = large_gap(n).unwrap();
        prop_assert!(seq.terms().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn interleaved_increases_and_keeps_hadamard(
        schedule in proptest::collection::vec((prop_oneof![Just(2u64), Just(3u64)], 1usize..5), 1..5)
    ) {
        let seq = interleaved(&schedule).unwrap();
        prop_assert!(seq.terms().windows(2).all(|w| w[0] < w[1]));
        if seq.len() >= 2 {
            prop_assert!(seq.hadamard_check(&rational(2, 1)).unwrap());
        }
    }

    #[test]
    fn perturbed_prefix_is_stable_under_extension(
        n in 1usize..25, extra in 1usize..10, seed in any::<u64>()
    ) {
        let short = perturbed(n, seed).unwrap();
        let long = perturbed(n + extra, seed).unwrap();
        prop_assert_eq!(&long.terms()[..n], short.terms());
    }

    #[test]
    fn sequence_json_round_trips(q in 2u64..5, n in 1usize..20) {
        let seq = geometric(q, n).unwrap();
        let back = lacunary::LacunarySequence::from_json(&seq.to_json()).unwrap();
        prop_assert_eq!(seq, back);
    }

    #[test]
    fn reversion_inverts_composition(coeffs in proptest::collection::vec((-6i64..7, 1i64..5), 2..7)) {
        // f = x * (c1 + c2 x + ...) with c1 != 0.
        let mut c: Vec<BigRational> = vec![BigRational::zero()];
        c.extend(coeffs.iter().map(|&(p, q)| rational(p, q)));
        prop_assume!(!c[1].is_zero());
        let f = PowerSeries::new(c);
        let g = f.revert().unwrap();
        prop_assert_eq!(f.compose(&g), PowerSeries::identity(f.order()));
    }

    #[test]
    fn symmetric_moments_have_zero_odd_cumulants(
        even in proptest::collection::vec((1i64..20, 1i64..9), 1..5)
    ) {
        // Moment list with vanishing odd entries.
        let mut moments = Vec::new();
        for &(p, q) in &even {
            moments.push(BigRational::zero());
            moments.push(rational(p, q));
        }
        let k = moments_to_cumulants(&moments).unwrap();
        for (i, c) in k.iter().enumerate() {
            if i % 2 == 0 {
                prop_assert!(c.is_zero(), "odd cumulant {} nonzero: {}", i + 1, c);
            }
        }
        // First cumulants are pinned: k_1 = mu_1, k_2 = mu_2 - mu_1^2.
        prop_assert_eq!(&k[1], &moments[1]);
    }

    #[test]
    fn cos_powers_sum_to_one(m in 0usize..26) {
        let total: BigRational = cos_power_expand(m).into_iter().sum();
        prop_assert_eq!(total, BigRational::one());
    }

    #[test]
    fn brute_force_agrees_with_dp(q in 2u64..4, m in 1usize..5, n in 1usize..5) {
        let seq = geometric(q, n).unwrap();
        let brute = count_signed_zero_sums(&seq, m, &WorkBounds::default()).unwrap();
        let dp = count_geometric_dp(q, m, n).unwrap();
        prop_assert_eq!(brute, dp);
    }
}
