use proptest::prelude::*;
use zeckmob::fib::FIB;
use zeckmob::golden::GoldenNum;
use zeckmob::morphic::parity_stream;
use zeckmob::quasi::{f_value, PqSpec};
use zeckmob::zeck::{
    decompose_indecomposable, digits, is_r_separated, reassemble, s_phi, s_phi_min_oracle,
    shift_s, v, zeck_decode, zeck_encode, SeparationSpec,
};

proptest! {
    #[test]
    fn encode_decode_round_trip(n in any::<u64>()) {
        let rep = zeck_encode(n);
        prop_assert_eq!(zeck_decode(rep.indices()).unwrap(), n);
        prop_assert!(rep.indices().windows(2).all(|w| w[0] >= w[1] + 2));
        prop_assert_eq!(rep.len() as u32, s_phi(n));
    }

    #[test]
    fn greedy_is_minimal(n in 0u64..1_000_000) {
        prop_assert_eq!(s_phi(n), s_phi_min_oracle(n).unwrap());
    }

    #[test]
    fn shift_preserves_digit_count(n in 0u64..FIB[80]) {
        let s = shift_s(n).unwrap();
        prop_assert_eq!(s_phi(s), s_phi(n));
        prop_assert_eq!(digits(s), digits(n) << 1);
    }

    #[test]
    fn separated_digit_sums_add(hi in 1u64..100_000, lo in 0u64..1000, r in 0u32..8) {
        // move hi far enough above lo to be separated
        let k = zeck_encode(lo).indices().first().copied().unwrap_or(2) + r + 1;
        let mut n2 = hi;
        while v(n2, k + r + 1) != 0 {
            n2 = shift_s(n2).unwrap();
        }
        let spec = SeparationSpec::new(r, k.max(2)).unwrap();
        prop_assume!(is_r_separated(lo, n2, spec));
        prop_assert_eq!(s_phi(lo + n2), s_phi(lo) + s_phi(n2));
        let pq = PqSpec::at_analytic_radius(2, 3).unwrap();
        if r >= pq.r {
            prop_assert_eq!(f_value(lo + n2, &pq).unwrap(), f_value(lo, &pq).unwrap() + f_value(n2, &pq).unwrap());
        }
    }

    #[test]
    fn decomposition_reassembles(n in 0u64..FIB[60], r in 1u32..6) {
        let parts = decompose_indecomposable(n, r);
        prop_assert_eq!(reassemble(&parts).unwrap(), n);
        let total: u32 = parts.iter().map(|p| s_phi(p.part)).sum();
        prop_assert_eq!(total, s_phi(n));
    }

    #[test]
    fn signed_distance_law(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000) {
        let x = GoldenNum::new(a, b).unwrap();
        let d = x.signed_dist();
        // x - d is an integer and |d| ≤ 1/2
        prop_assert!((x - d).is_integer());
        prop_assert!(d + d <= GoldenNum::ONE && -(d + d) <= GoldenNum::ONE);
        prop_assert_eq!(x.floor(), (x.to_f64()).floor() as i64);
    }
}

#[test]
fn morphic_parity_prefix_matches_digit_sums() {
    for (n, bit) in parity_stream().take(200_000).enumerate() {
        assert_eq!(bit as u32, s_phi(n as u64) % 2, "n = {n}");
    }
}
