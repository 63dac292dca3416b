use proptest::prelude::*;
use psc::channel::{inject_errors, random_message};
use psc::conv::{
    encode, partial_simplex_column_distance, partial_simplex_conv_generator, MessageSequence,
    PolyCodeword,
};
use psc::f2::{to_bipolar, BinaryVector, BipolarVector};
use psc::trellis::{ClassicViterbi, ImprovedViterbi, TieRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bipolar(r: &PolyCodeword) -> Vec<BipolarVector> {
    r.blocks.iter().map(to_bipolar).collect()
}

fn all_messages(k: usize, length: usize) -> impl Iterator<Item = MessageSequence> {
    (0..1u64 << (k * length)).map(move |m| {
        MessageSequence::new(
            (0..length)
                .map(|t| BinaryVector::from_msb_int((m >> (k * t)) & ((1 << k) - 1), k))
                .collect(),
        )
    })
}

fn random_word(blocks: usize, n: usize, rng: &mut ChaCha8Rng) -> PolyCodeword {
    PolyCodeword::new(
        (0..blocks)
            .map(|_| {
                BinaryVector::from_bits(
                    &(0..n).map(|_| rng.random_range(0..2u8)).collect::<Vec<_>>(),
                )
            })
            .collect(),
    )
}

#[test]
fn decoders_reach_the_exhaustive_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (k, delta, max_len) in [
        (1, 2, 4),
        (1, 1, 5),
        (2, 1, 3),
        (2, 2, 3),
        (1, 3, 4),
        (3, 1, 2),
    ] {
        let g = partial_simplex_conv_generator(k, delta).unwrap();
        let classic = ClassicViterbi::new(&g).unwrap();
        let improved = ImprovedViterbi::new(&g).unwrap();
        for length in 1..=max_len {
            let book: Vec<PolyCodeword> = all_messages(k, length)
                .map(|m| encode(&m, &g).unwrap())
                .collect();
            for _ in 0..40 {
                let r = random_word(length + g.mu(), g.n(), &mut rng);
                let best = book.iter().map(|c| c.distance(&r).unwrap()).min().unwrap();
                let a = classic.decode(&r, TieRule::LowestBranchRank).unwrap();
                let b = improved
                    .decode(&bipolar(&r), TieRule::LowestBranchRank)
                    .unwrap();
                assert_eq!(a.metric, best, "({k},{delta}) L={length}");
                assert_eq!(a.codeword.distance(&r).unwrap(), best);
                assert_eq!(encode(&a.message, &g).unwrap(), a.codeword);
                assert!(a.same_decision(&b));
            }
        }
    }
}

#[test]
fn seeded_ties_stay_optimal_and_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (k, delta) in [(1, 2), (2, 1), (2, 2)] {
        let g = partial_simplex_conv_generator(k, delta).unwrap();
        let classic = ClassicViterbi::new(&g).unwrap();
        let improved = ImprovedViterbi::new(&g).unwrap();
        for seed in 0..30u64 {
            let r = random_word(6 + g.mu(), g.n(), &mut rng);
            let base = classic.decode(&r, TieRule::LowestBranchRank).unwrap();
            let tie = TieRule::SeededRandom(seed);
            let a = classic.decode(&r, tie).unwrap();
            let b = improved.decode(&bipolar(&r), tie).unwrap();
            assert_eq!(a.metric, base.metric);
            assert_eq!(a.codeword.distance(&r).unwrap(), a.metric);
            assert!(a.same_decision(&b));
            assert_eq!(a, classic.decode(&r, tie).unwrap());
        }
    }
}

#[test]
fn planted_errors_below_half_free_distance_are_corrected() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for (k, delta) in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1), (2, 3)] {
        let g = partial_simplex_conv_generator(k, delta).unwrap();
        let dfree = partial_simplex_column_distance(k, delta, delta / k);
        let t = (dfree - 1) / 2;
        let classic = ClassicViterbi::new(&g).unwrap();
        let improved = ImprovedViterbi::new(&g).unwrap();
        for _ in 0..200 {
            let msg = random_message(k, rng.random_range(1..=12), &mut rng);
            let c = encode(&msg, &g).unwrap();
            let errs: Vec<usize> = (0..t).map(|_| rng.random_range(0..c.bit_len())).collect();
            let r = inject_errors(&c, &errs).unwrap();
            let a = classic.decode(&r, TieRule::LowestBranchRank).unwrap();
            let b = improved
                .decode(&bipolar(&r), TieRule::LowestBranchRank)
                .unwrap();
            assert_eq!(a.message, msg, "({k},{delta}) errors {errs:?}");
            assert_eq!(b.message, msg);
        }
    }
}

proptest! {
    #[test]
    fn noiseless_decoding_returns_the_message(
        params in prop::sample::select(vec![(1usize, 1usize), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1), (2, 3), (1, 5), (4, 1)]),
        length in 0usize..24,
        seed in any::<u64>(),
    ) {
        let (k, delta) = params;
        let g = partial_simplex_conv_generator(k, delta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let msg = random_message(k, length, &mut rng);
        let c = encode(&msg, &g).unwrap();
        let a = ClassicViterbi::new(&g).unwrap().decode(&c, TieRule::LowestBranchRank).unwrap();
        let b = ImprovedViterbi::new(&g).unwrap().decode(&bipolar(&c), TieRule::LowestBranchRank).unwrap();
        prop_assert_eq!(&a.message, &msg);
        prop_assert_eq!(a.metric, 0);
        prop_assert_eq!(&a.codeword, &c);
        prop_assert!(a.same_decision(&b));
    }
}
