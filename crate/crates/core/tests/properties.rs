mod oracles;

use glyphcrt::channel::{recognize_vector, ChannelParams};
use glyphcrt::crc::{
    crt_reconstruct, encode_phi, hamming_decode, hamming_distance, ml_decode, CodeVector,
    LikelihoodTable, MlScope, ModuliSet,
};
use glyphcrt::crypto::{Direction, PermutationKey};
use glyphcrt::fixtures;
use glyphcrt::pipeline::{
    capacity_report, choose_moduli, embed, extract, extract_trace, frame_message,
    simulate_document, unframe, CodecOptions, Layout, PlainMessage,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn coprime_set() -> impl Strategy<Value = ModuliSet> {
    (prop::collection::vec(2u32..=31, 5), 1usize..5).prop_filter_map("not coprime", |(p, k)| {
        let ok = (0..p.len())
            .all(|i| (i + 1..p.len()).all(|j| oracles::gcd(p[i] as u64, p[j] as u64) == 1));
        ok.then(|| ModuliSet::new(p, k).ok()).flatten()
    })
}

fn text_from_seed(seed: u64, letters: usize) -> String {
    fixtures::english_text(letters, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crt_round_trips(p in coprime_set(), frac in 0.0f64..1.0) {
        let m = (frac * p.payload_bound() as f64) as u64;
        let cw = encode_phi(m, &p).unwrap();
        prop_assert_eq!(crt_reconstruct(&cw.0, &p).unwrap(), m);
        prop_assert_eq!(oracles::brute_crt(&cw.0, p.moduli()), Some(m));
    }

    #[test]
    fn ml_never_worse_than_hamming(
        p in coprime_set(),
        frac in 0.0f64..1.0,
        noise in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 5),
        weights in prop::collection::vec(prop::collection::vec(0.01f64..1.0, 31), 5),
    ) {
        let m = (frac * p.payload_bound() as f64) as u64;
        let mut cv = encode_phi(m, &p).unwrap().0;
        for (j, &(flip, v)) in noise.iter().enumerate() {
            if flip < 0.3 {
                cv[j] = (v * p.moduli()[j] as f64) as u32 % p.moduli()[j];
            }
        }
        let rows: Vec<Vec<f64>> = weights
            .iter()
            .zip(p.moduli())
            .map(|(w, &q)| w[..q as usize].to_vec())
            .collect();
        let table = LikelihoodTable::new(rows).unwrap();
        let cv = CodeVector(cv);
        let h = hamming_decode(&cv, &p).unwrap();
        for scope in [MlScope::TiedMinimizers, MlScope::ListDecode] {
            let ml = ml_decode(&cv, &p, &table, scope).unwrap();
            if let Some(v) = ml.value {
                let d = hamming_distance(&encode_phi(v, &p).unwrap().0, &cv.0).unwrap();
                if scope == MlScope::TiedMinimizers {
                    prop_assert_eq!(d, h.min_hamming);
                }
                prop_assert!(d <= h.min_hamming + 1);
            }
        }
    }

    #[test]
    fn likelihood_ignores_row_scale(
        p in coprime_set(),
        frac in 0.0f64..1.0,
        obs in prop::collection::vec(0u32..31, 5),
        weights in prop::collection::vec(prop::collection::vec(0.01f64..1.0, 31), 5),
        scale in 0.001f64..1000.0,
        row in 0usize..5,
    ) {
        let m = (frac * p.payload_bound() as f64) as u64;
        let cw = encode_phi(m, &p).unwrap().0;
        let cv: Vec<u32> = obs.iter().zip(p.moduli()).map(|(&o, &q)| o % q).collect();
        let rows: Vec<Vec<f64>> = weights
            .iter()
            .zip(p.moduli())
            .map(|(w, &q)| w[..q as usize].to_vec())
            .collect();
        let mut scaled = rows.clone();
        for v in &mut scaled[row] {
            *v *= scale;
        }
        let a = LikelihoodTable::new(rows).unwrap().log_likelihood(&cv, &cw);
        let b = LikelihoodTable::new(scaled).unwrap().log_likelihood(&cv, &cw);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn framing_round_trips(bits in prop::collection::vec(any::<bool>(), 0..200)) {
        let m = PlainMessage::new(bits);
        let framed = frame_message(&m).unwrap();
        prop_assert_eq!(unframe(&framed).unwrap(), m);
    }

    #[test]
    fn embed_extract_round_trips(
        seed in any::<u64>(),
        letters in 60usize..200,
        bits in prop::collection::vec(any::<bool>(), 0..48),
        keyed in any::<bool>(),
    ) {
        let cb = fixtures::calibrated_codebook();
        let text = text_from_seed(seed, letters);
        let message = PlainMessage::new(bits);
        let key = keyed.then(|| PermutationKey::generate(&cb, seed));
        let opts = CodecOptions::default();
        match embed(&text, &cb, &message, key.as_ref(), &opts) {
            Ok(doc) => {
                prop_assert_eq!(&extract(&doc, &cb, key.as_ref(), &opts).unwrap(), &message);
                let trace = simulate_document(&doc, &cb, &ChannelParams::new(0.0, seed).unwrap()).unwrap();
                prop_assert_eq!(&extract_trace(&trace, &cb, key.as_ref(), &opts).unwrap(), &message);
            }
            Err(glyphcrt::Error::CapacityExceeded { needed, available }) => prop_assert!(needed > available),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn capacity_never_shrinks_when_letters_are_added(seed in any::<u64>(), a in 0usize..120, b in 1usize..40) {
        let cb = fixtures::calibrated_codebook();
        let text = text_from_seed(seed, a + b);
        let prefix: String = {
            let mut seen = 0;
            text.chars()
                .take_while(|c| {
                    if c.is_alphabetic() {
                        seen += 1;
                    }
                    seen <= a
                })
                .collect()
        };
        let short = capacity_report(&prefix, &cb, 5, 3).unwrap().total_bits;
        let long = capacity_report(&text, &cb, 5, 3).unwrap().total_bits;
        prop_assert!(long >= short);
    }

    #[test]
    fn layout_is_deterministic(seed in any::<u64>(), letters in 0usize..150) {
        let cb = fixtures::calibrated_codebook();
        let text = text_from_seed(seed, letters);
        let a = Layout::of_text(&text, &cb, 5, 3).unwrap();
        let b = Layout::of_text(&text, &cb, 5, 3).unwrap();
        prop_assert_eq!(a.describe(), b.describe());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn keys_invert(seed in any::<u64>()) {
        let cb = fixtures::calibrated_codebook();
        let k = PermutationKey::generate(&cb, seed);
        prop_assert!(k.compose(&k.inverse()).unwrap().is_identity());
        for e in cb.entries() {
            for i in 0..e.capacity() as u32 {
                let g = k.apply(e.character, i, Direction::Forward).unwrap();
                prop_assert_eq!(k.apply(e.character, g, Direction::Inverse).unwrap(), i);
            }
        }
    }

    #[test]
    fn recognition_is_scale_invariant(c in 0usize..26, glyph in 0usize..9, sx in 0.1f64..10.0, sy in 0.1f64..10.0) {
        let cb = fixtures::calibrated_codebook();
        let e = cb.entries().nth(c).unwrap();
        let f = &e.glyphs[glyph].outline;
        let a = recognize_vector(f, e).unwrap();
        let b = recognize_vector(&f.scaled(sx, sy), e).unwrap();
        prop_assert_eq!(a.argmax_index, glyph);
        prop_assert_eq!(b.argmax_index, glyph);
        prop_assert!((a.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn choose_moduli_matches_enumeration(caps in prop::collection::vec(1usize..=16, 2..=4), k in 1usize..4) {
        prop_assume!(k < caps.len());
        let lib = choose_moduli(&caps, k).unwrap();
        let caps32: Vec<u32> = caps.iter().map(|&c| c as u32).collect();
        let oracle = oracles::enumerate_moduli(&caps32, k);
        prop_assert_eq!(
            lib.as_ref().map(|p| p.payload_bound()),
            oracle.as_ref().map(|o| o.0)
        );
        if let (Some(p), Some(o)) = (lib, oracle) {
            prop_assert_eq!(p.moduli(), o.1.as_slice());
        }
    }
}

#[test]
fn choose_moduli_matches_enumeration_at_block_shape() {
    let mut cases = vec![
        vec![30; 5],
        vec![4; 5],
        vec![2, 3, 5, 7, 11],
        vec![13, 12, 11, 7, 5],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        use rand::Rng;
        cases.push((0..5).map(|_| rng.random_range(1..=20)).collect());
    }
    for caps in cases {
        let lib = choose_moduli(&caps, 3).unwrap();
        let caps32: Vec<u32> = caps.iter().map(|&c| c as u32).collect();
        let oracle = oracles::enumerate_moduli(&caps32, 3);
        assert_eq!(
            lib.as_ref().map(|p| p.payload_bound()),
            oracle.as_ref().map(|o| o.0),
            "capacities {caps:?}"
        );
    }
}
