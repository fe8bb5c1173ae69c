//! The security stage: mix ℓ substreams with the individually-secure code,
//! encrypt the first `c` of them, and the receiver-side inverse.
//!
//! Data is cut into packets of `packet_bits / 8` bytes; `ℓ` consecutive
//! packets form a mixing block whose byte columns are multiplied by `G` over
//! `F_{2^8}`. Substream `i` is the sequence of encodings `X_i` across blocks.
//! An encrypted substream is treated as one bitstream, cut into `k`-bit
//! chunks (the last one zero-padded), and each chunk becomes one `n`-bit
//! ciphertext unit.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{gf256, FieldSpec, OpCounter};
use crate::iscode::{IsCodeError, MixingCode};
use crate::mceliece::{Bits, CipherModel, GoppaParams, McElieceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HunccError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("framing error: {0}")]
    Framing(String),
    #[error("substream {substream} is missing unit {unit}")]
    IncompleteBlock { substream: usize, unit: usize },
    #[error(transparent)]
    Cipher(#[from] McElieceError),
    #[error(transparent)]
    Code(#[from] IsCodeError),
}

/// Security stage selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Security {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "mceliece-all")]
    McElieceAll,
    #[serde(rename = "huncc")]
    Huncc,
}

impl Security {
    pub const ALL: [Security; 3] = [Security::None, Security::McElieceAll, Security::Huncc];

    pub fn name(&self) -> &'static str {
        match self {
            Security::None => "none",
            Security::McElieceAll => "mceliece-all",
            Security::Huncc => "huncc",
        }
    }
}

impl fmt::Display for Security {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Security {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Security::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown security scheme `{s}` (expected none, mceliece-all or huncc)"))
    }
}

#[derive(Clone, Debug)]
pub struct HunccConfig {
    ell: usize,
    c: usize,
    cipher: CipherModel,
    code: MixingCode,
    packet_bits: usize,
}

impl HunccConfig {
    pub fn new(ell: usize, c: usize, cipher: CipherModel, packet_bits: usize) -> Result<Self, HunccError> {
        let code = MixingCode::build(ell, FieldSpec::gf256())?;
        Self::with_code(code, c, cipher, packet_bits)
    }

    pub fn with_code(code: MixingCode, c: usize, cipher: CipherModel, packet_bits: usize) -> Result<Self, HunccError> {
        let ell = code.ell();
        if code.spec() != FieldSpec::gf256() {
            return Err(HunccError::Config("mixing code must be over F_256".into()));
        }
        if c > ell {
            return Err(HunccError::Config(format!("c = {c} exceeds ell = {ell}")));
        }
        if packet_bits == 0 || !packet_bits.is_multiple_of(8) {
            return Err(HunccError::Config(format!("packet_bits = {packet_bits} is not a positive multiple of 8")));
        }
        if ell * packet_bits / 8 > u16::MAX as usize {
            return Err(HunccError::Config("mixing block too large for a 16-bit pad length".into()));
        }
        Ok(HunccConfig {
            ell,
            c,
            cipher,
            code,
            packet_bits,
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn c(&self) -> usize {
        self.c
    }

    /// Number of unencrypted substreams.
    pub fn w(&self) -> usize {
        self.ell - self.c
    }

    pub fn cipher(&self) -> &CipherModel {
        &self.cipher
    }

    pub fn code(&self) -> &MixingCode {
        &self.code
    }

    pub fn packet_bits(&self) -> usize {
        self.packet_bits
    }

    pub fn packet_bytes(&self) -> usize {
        self.packet_bits / 8
    }

    pub fn block_bytes(&self) -> usize {
        self.ell * self.packet_bytes()
    }

    /// Field multiplications charged for mixing or unmixing one block:
    /// `ℓ²` per byte column, i.e. `ℓ³` per ℓ×ℓ block of symbols.
    pub fn mults_per_block(&self) -> u64 {
        (self.ell * self.ell * self.packet_bytes()) as u64
    }
}

/// One payload unit on a substream; `None` marks a unit not (yet) received.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unit {
    pub payload: Option<Vec<u8>>,
    /// Mixing blocks whose bits this unit carries (inclusive range).
    pub first_block: usize,
    pub last_block: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecuredStream {
    /// `substreams[i]` holds the units of `X̃_{i+1}`.
    pub substreams: Vec<Vec<Unit>>,
    pub blocks: usize,
    /// Zero bytes appended to fill the last block.
    pub pad_bytes: u16,
}

impl SecuredStream {
    /// Units of every substream that carry bits of `block`.
    pub fn units_of_block(&self, block: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (s, units) in self.substreams.iter().enumerate() {
            let start = units.partition_point(|u| u.last_block < block);
            for (j, u) in units.iter().enumerate().skip(start) {
                if u.first_block > block {
                    break;
                }
                out.push((s, j));
            }
        }
        out
    }
}

/// `X = G·M` for one block given as ℓ packets.
pub(crate) fn mix(code: &MixingCode, packets: &[&[u8]]) -> Vec<Vec<u8>> {
    combine(code.generator(), packets)
}

pub(crate) fn unmix(code: &MixingCode, packets: &[&[u8]]) -> Vec<Vec<u8>> {
    combine(code.inverse(), packets)
}

fn combine(m: &crate::gf::Matrix, packets: &[&[u8]]) -> Vec<Vec<u8>> {
    let len = packets[0].len();
    (0..m.rows())
        .map(|i| {
            let mut out = vec![0u8; len];
            for (j, p) in packets.iter().enumerate() {
                gf256::axpy(&mut out, m.raw(i, j) as u8, p);
            }
            out
        })
        .collect()
}

/// Unit ranges of the `k`-bit chunks of a substream of `blocks · packet_bits` bits.
fn chunk_blocks(blocks: usize, packet_bits: usize, k: usize) -> Vec<(usize, usize)> {
    let total = blocks * packet_bits;
    (0..total.div_ceil(k))
        .map(|j| {
            let lo = j * k;
            let hi = ((j + 1) * k).min(total) - 1;
            (lo / packet_bits, hi / packet_bits)
        })
        .collect()
}

pub fn secure_encode(cfg: &HunccConfig, data: &[u8], ctr: &OpCounter) -> Result<SecuredStream, HunccError> {
    let bb = cfg.block_bytes();
    let pb = cfg.packet_bytes();
    let blocks = data.len().div_ceil(bb);
    let pad = blocks * bb - data.len();
    let mut padded = data.to_vec();
    padded.resize(blocks * bb, 0);

    let mut mixed: Vec<Vec<u8>> = vec![Vec::with_capacity(blocks * pb); cfg.ell];
    for block in padded.chunks(bb) {
        let packets: Vec<&[u8]> = block.chunks(pb).collect();
        for (s, x) in mix(&cfg.code, &packets).into_iter().enumerate() {
            mixed[s].extend(x);
        }
        ctr.charge(cfg.mults_per_block());
    }

    let mut substreams = Vec::with_capacity(cfg.ell);
    for (s, stream) in mixed.into_iter().enumerate() {
        if s < cfg.c {
            substreams.push(encrypt_substream(cfg, &stream, s, blocks)?);
        } else {
            substreams.push(
                stream
                    .chunks(pb)
                    .enumerate()
                    .map(|(b, x)| Unit {
                        payload: Some(x.to_vec()),
                        first_block: b,
                        last_block: b,
                    })
                    .collect(),
            );
        }
    }
    Ok(SecuredStream {
        substreams,
        blocks,
        pad_bytes: pad as u16,
    })
}

/// Cipher index of chunk `j` of substream `s`; distinct for every chunk of a
/// session so no two chunks share randomness.
fn chunk_index(substream: usize, j: usize) -> u64 {
    ((substream as u64) << 32) | j as u64
}

pub(crate) fn encrypt_substream(
    cfg: &HunccConfig,
    stream: &[u8],
    substream: usize,
    blocks: usize,
) -> Result<Vec<Unit>, HunccError> {
    encrypt_bytes(&cfg.cipher, stream, substream, blocks, cfg.packet_bits)
}

/// Chunks and encrypts substream `substream`, a byte stream of `blocks`
/// packets.
pub(crate) fn encrypt_bytes(
    cipher: &CipherModel,
    stream: &[u8],
    substream: usize,
    blocks: usize,
    packet_bits: usize,
) -> Result<Vec<Unit>, HunccError> {
    let k = cipher.chunk_bits();
    let total = blocks * packet_bits;
    let mut bits = Bits::from_bytes(stream, total);
    let ranges = chunk_blocks(blocks, packet_bits, k);
    bits.resize(ranges.len() * k);
    ranges
        .into_iter()
        .enumerate()
        .map(|(j, (first_block, last_block))| {
            let ct = cipher.encrypt_chunk(&bits.slice(j * k, k), chunk_index(substream, j))?;
            Ok(Unit {
                payload: Some(ct.to_bytes()),
                first_block,
                last_block,
            })
        })
        .collect()
}

pub(crate) fn decrypt_bytes(
    cipher: &CipherModel,
    units: &[Unit],
    substream: usize,
    blocks: usize,
    packet_bits: usize,
) -> Result<Vec<u8>, HunccError> {
    let k = cipher.chunk_bits();
    let n = cipher.cipher_bits();
    let total = blocks * packet_bits;
    if units.len() != total.div_ceil(k) {
        return Err(HunccError::Framing(format!(
            "substream {substream} has {} units, expected {}",
            units.len(),
            total.div_ceil(k)
        )));
    }
    let mut bits = Bits::zeros(0);
    for (j, u) in units.iter().enumerate() {
        let payload = u
            .payload
            .as_ref()
            .ok_or(HunccError::IncompleteBlock { substream, unit: j })?;
        if payload.len() != n.div_ceil(8) {
            return Err(HunccError::Framing(format!("cipher unit {j} has {} bytes", payload.len())));
        }
        bits.extend_from(&cipher.decrypt_chunk(&Bits::from_bytes(payload, n), chunk_index(substream, j))?);
    }
    bits.resize(total);
    Ok(bits.to_bytes())
}

pub fn secure_decode(cfg: &HunccConfig, stream: &SecuredStream, ctr: &OpCounter) -> Result<Vec<u8>, HunccError> {
    if stream.substreams.len() != cfg.ell {
        return Err(HunccError::Framing(format!(
            "{} substreams for ell = {}",
            stream.substreams.len(),
            cfg.ell
        )));
    }
    let pb = cfg.packet_bytes();
    let blocks = stream.blocks;
    let mut plain: Vec<Vec<u8>> = Vec::with_capacity(cfg.ell);
    for (s, units) in stream.substreams.iter().enumerate() {
        if s < cfg.c {
            plain.push(decrypt_bytes(&cfg.cipher, units, s, blocks, cfg.packet_bits)?);
        } else {
            if units.len() != blocks {
                return Err(HunccError::Framing(format!(
                    "substream {s} has {} units for {blocks} blocks",
                    units.len()
                )));
            }
            let mut bytes = Vec::with_capacity(blocks * pb);
            for (j, u) in units.iter().enumerate() {
                let p = u
                    .payload
                    .as_ref()
                    .ok_or(HunccError::IncompleteBlock { substream: s, unit: j })?;
                if p.len() != pb {
                    return Err(HunccError::Framing(format!("unit {j} of substream {s} has {} bytes", p.len())));
                }
                bytes.extend_from_slice(p);
            }
            plain.push(bytes);
        }
    }
    let mut out = Vec::with_capacity(blocks * cfg.block_bytes());
    for b in 0..blocks {
        let packets: Vec<&[u8]> = plain.iter().map(|s| &s[b * pb..(b + 1) * pb]).collect();
        for m in unmix(&cfg.code, &packets) {
            out.extend(m);
        }
        ctr.charge(cfg.mults_per_block());
    }
    let pad = stream.pad_bytes as usize;
    if pad > out.len() || (blocks > 0 && pad >= cfg.block_bytes()) {
        return Err(HunccError::Framing(format!("pad length {pad} exceeds one block")));
    }
    out.truncate(out.len() - pad);
    Ok(out)
}

/// `ℓ·η / (c + η·(ℓ − c))`: information per transmitted packet when each
/// encrypted substream expands by `1/η`.
pub fn huncc_rate_expansion(ell: usize, c: usize, eta: Ratio<i64>) -> Ratio<i64> {
    let l = Ratio::from_integer(ell as i64);
    let c = Ratio::from_integer(c as i64);
    l * eta / (c + eta * (l - c))
}

/// `(c·η + ℓ − c) / ℓ`: information per transmitted packet when encrypted
/// packets keep their size and carry `η` of it as information.
pub fn huncc_rate_payload(ell: usize, c: usize, eta: Ratio<i64>) -> Ratio<i64> {
    let l = Ratio::from_integer(ell as i64);
    let c = Ratio::from_integer(c as i64);
    (c * eta + l - c) / l
}

/// Packets transmitted for `info_packets` information packets of
/// `packet_bits` bits, with `c` of every `ℓ` substreams encrypted under
/// `params` (chunking continues across block boundaries).
pub fn transmitted_packets(info_packets: usize, ell: usize, c: usize, params: GoppaParams, packet_bits: usize) -> usize {
    let blocks = info_packets.div_ceil(ell);
    let encrypted_bits = blocks * packet_bits;
    let cipher_units = encrypted_bits.div_ceil(params.k());
    let cipher_packets = (cipher_units * params.n()).div_ceil(packet_bits);
    blocks * (ell - c) + c * cipher_packets
}

/// Transmitted packets under each security scheme for a frame of
/// `info_packets` information packets.
pub fn frame_packet_count(security: Security, info_packets: usize, ell: usize, c: usize, params: GoppaParams, packet_bits: usize) -> usize {
    match security {
        Security::None => info_packets,
        Security::McElieceAll => (info_packets * packet_bits)
            .div_ceil(params.k())
            .saturating_mul(params.n())
            .div_ceil(packet_bits),
        Security::Huncc => transmitted_packets(info_packets, ell, c, params, packet_bits),
    }
}

/// Binary operations for one mixing block under the accounting in which
/// each of the ℓ packets is a single symbol of `F_{2^packet_bits}`:
/// encoding and decoding are each one product of ℓ×ℓ matrices.
pub fn packet_symbol_mixing_ops(ell: usize, packet_bits: usize) -> u64 {
    2 * (ell as u64).pow(3) * packet_bits as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(ell: usize, c: usize) -> HunccConfig {
        HunccConfig::new(ell, c, CipherModel::modeled(GoppaParams::classic(), 7), 1024).unwrap()
    }

    #[test]
    fn roundtrip_small() {
        let ctr = OpCounter::new();
        for (ell, c) in [(1, 0), (1, 1), (2, 1), (4, 0), (4, 1), (4, 4)] {
            let cfg = cfg(ell, c);
            let data: Vec<u8> = (0..1000u32).map(|i| (i * 31 % 251) as u8).collect();
            let s = secure_encode(&cfg, &data, &ctr).unwrap();
            assert_eq!(secure_decode(&cfg, &s, &ctr).unwrap(), data, "ell={ell} c={c}");
        }
    }

    #[test]
    fn only_encrypted_substreams_expand() {
        let cfg = cfg(4, 1);
        let data = vec![0x5a; 512 * 25];
        let s = secure_encode(&cfg, &data, &OpCounter::new()).unwrap();
        assert_eq!(s.blocks, 25);
        assert_eq!(s.pad_bytes, 0);
        assert_eq!(s.substreams[0].len(), 49);
        for sub in &s.substreams[1..] {
            assert_eq!(sub.len(), 25);
        }
    }

    #[test]
    fn missing_unit_is_incomplete() {
        let cfg = cfg(4, 1);
        let data = vec![1u8; 2048];
        let ctr = OpCounter::new();
        let mut s = secure_encode(&cfg, &data, &ctr).unwrap();
        s.substreams[2][3].payload = None;
        assert_eq!(
            secure_decode(&cfg, &s, &ctr),
            Err(HunccError::IncompleteBlock { substream: 2, unit: 3 })
        );
        let mut s = secure_encode(&cfg, &data, &ctr).unwrap();
        s.substreams[0][0].payload = None;
        assert!(matches!(secure_decode(&cfg, &s, &ctr), Err(HunccError::IncompleteBlock { substream: 0, .. })));
    }

    #[test]
    fn units_of_block_cover_chunk_ranges() {
        let cfg = cfg(4, 1);
        let s = secure_encode(&cfg, &vec![0u8; 512 * 3], &OpCounter::new()).unwrap();
        // 3 blocks of 1024 bits = 3072 bits in 6 chunks of 524 bits
        let units = s.units_of_block(1);
        let cipher: Vec<usize> = units.iter().filter(|u| u.0 == 0).map(|u| u.1).collect();
        assert_eq!(cipher, vec![1, 2, 3]);
        assert_eq!(units.iter().filter(|u| u.0 != 0).count(), 3);
    }

    #[test]
    fn rates_at_boundaries() {
        let eta = Ratio::new(64, 125);
        assert_eq!(huncc_rate_expansion(4, 0, eta), Ratio::from_integer(1));
        assert_eq!(huncc_rate_expansion(4, 4, eta), eta);
        assert_eq!(huncc_rate_payload(4, 0, eta), Ratio::from_integer(1));
        assert_eq!(huncc_rate_payload(4, 4, eta), eta);
        assert_eq!(huncc_rate_expansion(4, 1, eta), Ratio::new(256, 317));
        assert_eq!(huncc_rate_payload(4, 1, eta), Ratio::new(439, 500));
    }

    #[test]
    fn frame_counts() {
        let p = GoppaParams::classic();
        assert_eq!(frame_packet_count(Security::None, 100, 4, 1, p, 1024), 100);
        assert_eq!(frame_packet_count(Security::Huncc, 100, 4, 1, p, 1024), 124);
        assert_eq!(frame_packet_count(Security::McElieceAll, 100, 4, 1, p, 1024), 196);
        assert_eq!(packet_symbol_mixing_ops(4, 1024), 131_072);
    }

    #[test]
    fn security_names_roundtrip() {
        for s in Security::ALL {
            assert_eq!(s.name().parse::<Security>().unwrap(), s);
        }
        assert!("aes".parse::<Security>().is_err());
    }
}
