use llhuncc::mceliece::*;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> Bits {
    let v: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
    Bits::from_bools(&v)
}

fn codeword_weights(pk: &PublicKey) -> Vec<u64> {
    let g = pk.generator();
    let rows: Vec<u64> = (0..g.rows()).map(|r| g.row(r).low_word()).collect();
    let mut hist = vec![0u64; g.cols() + 1];
    let mut cw = 0u64;
    hist[0] = 1;
    for i in 1u64..(1 << g.rows()) {
        cw ^= rows[i.trailing_zeros() as usize];
        hist[cw.count_ones() as usize] += 1;
    }
    hist
}

#[test]
fn desk_dimensions_and_rate() {
    let p = GoppaParams::desk();
    assert_eq!((p.n(), p.k(), p.t()), (32, 22, 2));
    assert_eq!(p.rate(), Ratio::new(22, 32));
    assert_eq!(GoppaParams::new(10, 0).unwrap().rate(), Ratio::from_integer(1));
}

#[test]
fn keygen_is_deterministic() {
    let a = keygen(GoppaParams::desk(), 77).unwrap();
    let b = keygen(GoppaParams::desk(), 77).unwrap();
    let c = keygen(GoppaParams::desk(), 78).unwrap();
    assert_eq!(a.public.to_bytes(), b.public.to_bytes());
    assert_eq!(a.secret.to_bytes(), b.secret.to_bytes());
    assert_ne!(a.public.to_bytes(), c.public.to_bytes());
}

#[test]
fn roundtrips_with_exact_error_weight() {
    let pair = keygen(GoppaParams::desk(), 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..2000u64 {
        let x = random_bits(&mut rng, 22);
        let c = pair.public.encrypt(&x, i).unwrap();
        let mut diff = pair.public.codeword(&x).unwrap();
        diff.xor_assign(&c);
        assert_eq!(diff.weight(), 2);
        assert_eq!(pair.secret.decrypt(&c).unwrap(), x);
    }
}

#[test]
fn degenerate_error_free_mode() {
    let pair = keygen(GoppaParams::desk(), 5).unwrap();
    let x = Bits::from_bytes(&[0x0f, 0xf0, 0x3f], 22);
    let c = pair.public.encrypt_with_errors(&x, &[]).unwrap();
    assert_eq!(c, pair.public.codeword(&x).unwrap());
    assert_eq!(pair.secret.decrypt(&c).unwrap(), x);
    let zero = Bits::zeros(22);
    let c0 = pair.public.encrypt(&zero, 0).unwrap();
    assert_eq!(pair.secret.decrypt(&c0).unwrap(), zero);
}

#[test]
fn length_mismatch_is_reported() {
    let pair = keygen(GoppaParams::desk(), 5).unwrap();
    assert!(matches!(
        pair.public.encrypt(&Bits::zeros(21), 0),
        Err(McElieceError::Length { expected: 22, got: 21 })
    ));
    assert!(matches!(
        pair.secret.decrypt(&Bits::zeros(33)),
        Err(McElieceError::Length { expected: 32, got: 33 })
    ));
}

// Every weight-3 pattern inside a weight-5 codeword lies at distance 2 from
// that codeword and is silently miscorrected; distinct weight-5 codewords
// share at most 2 positions, so exactly 10·A_5 patterns are affected.
#[test]
fn beyond_radius_failures_follow_weight_enumerator() {
    let pair = keygen(GoppaParams::desk(), 5).unwrap();
    let hist = codeword_weights(&pair.public);
    assert_eq!(hist[1..5].iter().sum::<u64>(), 0, "minimum distance below 5");
    let x = Bits::zeros(22);
    let mut silent = 0u64;
    for a in 0..32 {
        for b in a + 1..32 {
            for c in b + 1..32 {
                let ct = pair.public.encrypt_with_errors(&x, &[a, b, c]).unwrap();
                if pair.secret.decrypt(&ct).is_ok() {
                    silent += 1;
                }
            }
        }
    }
    assert_eq!(silent, 10 * hist[5]);
}

#[test]
fn weight_enumerator_sums_to_code_size() {
    let pair = keygen(GoppaParams::desk(), 9).unwrap();
    assert_eq!(codeword_weights(&pair.public).iter().sum::<u64>(), 1 << 22);
}

#[test]
fn modeled_cipher_expands_by_inverse_rate() {
    let m = CipherModel::modeled(GoppaParams::classic(), 4);
    assert_eq!(Ratio::new(m.cipher_bits() as i64, m.chunk_bits() as i64), GoppaParams::classic().rate().recip());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decrypt_inverts_encrypt(key_seed in 0u64..8, enc_seed in any::<u64>(), msg in any::<u32>()) {
        let pair = keygen(GoppaParams::desk(), key_seed).unwrap();
        let x = Bits::from_bytes(&msg.to_le_bytes(), 22);
        let c = pair.public.encrypt(&x, enc_seed).unwrap();
        prop_assert_eq!(pair.secret.decrypt(&c).unwrap(), x);
    }

    #[test]
    fn modeled_cipher_is_a_bijection(seed in any::<u64>(), idx in any::<u64>(), msg in prop::collection::vec(any::<u8>(), 66)) {
        let m = CipherModel::modeled(GoppaParams::classic(), seed);
        let x = Bits::from_bytes(&msg, 524);
        let c = m.encrypt_chunk(&x, idx).unwrap();
        prop_assert_eq!(c.len(), 1024);
        prop_assert_eq!(m.decrypt_chunk(&c, idx).unwrap(), x);
    }

    #[test]
    fn single_bit_tampering_within_radius_is_corrected(seed in any::<u64>(), pos in 0usize..32) {
        let pair = keygen(GoppaParams::desk(), 3).unwrap();
        let x = Bits::from_bytes(&seed.to_le_bytes(), 22);
        let mut c = pair.public.encrypt_with_errors(&x, &[pos]).unwrap();
        prop_assert_eq!(pair.secret.decrypt(&c).unwrap(), x.clone());
        c.flip((pos + 1) % 32);
        prop_assert_eq!(pair.secret.decrypt(&c).unwrap(), x);
    }
}
