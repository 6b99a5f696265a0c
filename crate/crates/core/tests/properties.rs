use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use camellia::camellia::sample_petal_containing;
use camellia::channel::SymmetricChannel;
use camellia::decoder::ExactDecoder;
use camellia::gf2::{random_invertible, BitVector};
use camellia::harness::stats::{format_float, wilson_interval};
use camellia::rm::{affine_permutation, permute, RmCode};

fn code_params() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=7).prop_flat_map(|m| (Just(m), 0..=m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encoding_is_linear((m, r) in code_params(), a in any::<u64>(), b in any::<u64>()) {
        let code = RmCode::new(m, r).unwrap();
        let k = code.dimension();
        let mask = |x: u64| BitVector::from_bits((0..k).map(|i| i < 64 && (x >> i) & 1 == 1));
        let (ma, mb) = (mask(a), mask(b));
        let sum = code.encode(&ma.xor(&mb)).unwrap();
        prop_assert_eq!(sum, code.encode(&ma).unwrap().xor(&code.encode(&mb).unwrap()));
    }

    #[test]
    fn affine_maps_preserve_the_code((m, r) in code_params(), seed in any::<u64>()) {
        let code = RmCode::new(m, r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_invertible(m, &mut rng);
        let shift = BitVector::from_bits((0..m).map(|i| (seed >> i) & 1 == 1));
        let perm = affine_permutation(m, &a, &shift).unwrap();
        for row in code.generator().rows() {
            let image = permute(row, &perm);
            prop_assert!(code.generator().row_space_contains(&image).unwrap());
        }
    }

    #[test]
    fn sampled_petals_contain_their_centre(m in 1usize..=10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 1 + (seed as usize) % m;
        let i = (seed as usize >> 8) % (1 << m);
        let petal = sample_petal_containing(m, d, i, &mut rng).unwrap();
        prop_assert_eq!(petal.members()[0], i);
        prop_assert_eq!(petal.members().len(), 1 << d);
        let mut sorted = petal.members().to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), 1 << d);
    }

    #[test]
    fn capacity_in_unit_interval(w in 0.0f64..=1.0, e1 in 0.0f64..=0.5, e2 in 0.0f64..=0.5) {
        let ch = SymmetricChannel::mixture(&[(w, e1), (1.0 - w, e2)]).unwrap();
        let c = ch.capacity();
        prop_assert!((0.0..=1.0).contains(&c));
    }

    #[test]
    fn wilson_brackets_the_estimate(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
        let k = ((trials as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(k, trials);
        let p = k as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }

    #[test]
    fn formatted_floats_round_trip_to_12_digits(x in -1e6f64..1e6) {
        let back: f64 = format_float(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs().max(1e-300));
    }

    #[test]
    fn noiseless_exact_decoding_recovers_every_bit((m, r) in (1usize..=4).prop_flat_map(|m| (Just(m), 0..=m)), msg in any::<u64>()) {
        let code = RmCode::new(m, r).unwrap();
        let message = BitVector::from_bits((0..code.dimension()).map(|i| (msg >> (i % 64)) & 1 == 1));
        let x = code.encode(&message).unwrap();
        let ch = SymmetricChannel::bsc(0.0).unwrap();
        let y: Vec<_> = x.iter().map(|b| ch.use_from_noise(b, camellia::channel::NoiseState { component: 0, flip: false })).collect();
        let dec = ExactDecoder::new(&code).unwrap();
        for i in 0..code.n() {
            prop_assert!(dec.bit_map(i, &y).unwrap().guess.is_correct(x.get(i)));
        }
    }
}
