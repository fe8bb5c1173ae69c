use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{keygen, Bits, GoppaParams, McElieceError, McElieceKeyPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CipherMode {
    Real,
    Modeled,
}

/// Chunk cipher mapping `k`-bit plaintext chunks to `n`-bit ciphertexts.
///
/// `Real` runs genuine McEliece encryption. `Modeled` keeps the sizes and
/// operation counts of the parameters but replaces encryption with a seeded
/// reversible transform: the chunk is extended with `n - k` pad bits and
/// XORed with a keystream, both derived from `(seed, chunk index)`.
#[derive(Clone, Debug)]
pub struct CipherModel {
    params: GoppaParams,
    seed: u64,
    keys: Option<Box<McElieceKeyPair>>,
}

impl CipherModel {
    pub fn real(params: GoppaParams, seed: u64) -> Result<Self, McElieceError> {
        Ok(CipherModel {
            params,
            seed,
            keys: Some(Box::new(keygen(params, seed)?)),
        })
    }

    pub fn modeled(params: GoppaParams, seed: u64) -> Self {
        CipherModel {
            params,
            seed,
            keys: None,
        }
    }

    pub fn mode(&self) -> CipherMode {
        if self.keys.is_some() {
            CipherMode::Real
        } else {
            CipherMode::Modeled
        }
    }

    pub fn params(&self) -> GoppaParams {
        self.params
    }

    /// Plaintext chunk length `k`.
    pub fn chunk_bits(&self) -> usize {
        self.params.k()
    }

    /// Ciphertext length `n`.
    pub fn cipher_bits(&self) -> usize {
        self.params.n()
    }

    pub fn encryption_ops(&self) -> u64 {
        self.params.encryption_ops()
    }

    pub fn decryption_ops(&self) -> u64 {
        self.params.decryption_ops()
    }

    pub fn encrypt_chunk(&self, x: &Bits, index: u64) -> Result<Bits, McElieceError> {
        if x.len() != self.chunk_bits() {
            return Err(McElieceError::Length {
                expected: self.chunk_bits(),
                got: x.len(),
            });
        }
        match &self.keys {
            Some(keys) => keys.public.encrypt(x, self.chunk_seed(index)),
            None => {
                let (stream, pad) = self.masks(index);
                let mut c = x.clone();
                c.extend_from(&pad);
                c.xor_assign(&stream);
                Ok(c)
            }
        }
    }

    pub fn decrypt_chunk(&self, c: &Bits, index: u64) -> Result<Bits, McElieceError> {
        if c.len() != self.cipher_bits() {
            return Err(McElieceError::Length {
                expected: self.cipher_bits(),
                got: c.len(),
            });
        }
        match &self.keys {
            Some(keys) => keys.secret.decrypt(c),
            None => {
                let (stream, pad) = self.masks(index);
                let mut y = c.clone();
                y.xor_assign(&stream);
                let k = self.chunk_bits();
                if y.slice(k, y.len() - k) != pad {
                    return Err(McElieceError::DecodeFailure);
                }
                Ok(y.slice(0, k))
            }
        }
    }

    fn chunk_seed(&self, index: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng.next_u64()
    }

    fn masks(&self, index: u64) -> (Bits, Bits) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let n = self.cipher_bits();
        let mut draw = |len: usize| {
            let mut bytes = vec![0u8; len.div_ceil(8)];
            rng.fill_bytes(&mut bytes);
            Bits::from_bytes(&bytes, len)
        };
        let stream = draw(n);
        let pad = draw(n - self.chunk_bits());
        (stream, pad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(len: usize, seed: u64) -> Bits {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bytes = vec![0u8; len.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        Bits::from_bytes(&bytes, len)
    }

    #[test]
    fn modeled_roundtrip_and_expansion() {
        let m = CipherModel::modeled(GoppaParams::classic(), 9);
        assert_eq!(m.mode(), CipherMode::Modeled);
        for i in 0..20 {
            let x = sample(524, i);
            let c = m.encrypt_chunk(&x, i).unwrap();
            assert_eq!(c.len(), 1024);
            assert_eq!(m.decrypt_chunk(&c, i).unwrap(), x);
        }
    }

    #[test]
    fn modeled_detects_wrong_index_and_tampering() {
        let m = CipherModel::modeled(GoppaParams::classic(), 1);
        let x = sample(524, 5);
        let mut c = m.encrypt_chunk(&x, 3).unwrap();
        assert_eq!(m.decrypt_chunk(&c, 4), Err(McElieceError::DecodeFailure));
        c.flip(1000);
        assert_eq!(m.decrypt_chunk(&c, 3), Err(McElieceError::DecodeFailure));
    }

    #[test]
    fn real_roundtrip() {
        let m = CipherModel::real(GoppaParams::desk(), 2).unwrap();
        assert_eq!(m.mode(), CipherMode::Real);
        for i in 0..50 {
            let x = sample(22, i);
            let c = m.encrypt_chunk(&x, i).unwrap();
            assert_eq!(m.decrypt_chunk(&c, i).unwrap(), x);
        }
    }

    #[test]
    fn length_checks() {
        let m = CipherModel::modeled(GoppaParams::desk(), 0);
        assert!(matches!(m.encrypt_chunk(&Bits::zeros(21), 0), Err(McElieceError::Length { .. })));
        assert!(matches!(m.decrypt_chunk(&Bits::zeros(31), 0), Err(McElieceError::Length { .. })));
    }
}
