//! Key encodings: a 16-byte header (4-byte magic, `n` as u16 LE, `m` u8,
//! `t` u8, seed u64 LE) followed by row-major bit matrices packed LSB-first.
//!
//! Public key body: `G'` (k×n). Secret key body: the Goppa polynomial
//! coefficients (`t + 1` u16 LE, lowest degree first), `S⁻¹` (k×k), then the
//! permutation as an n×n matrix with a one at `(j, perm[j])`.

use super::goppa::{PublicKey, SecretKey};
use super::{BitMatrix, Bits, GoppaParams, McElieceError};

const PUBLIC_MAGIC: &[u8; 4] = b"LLMP";
const SECRET_MAGIC: &[u8; 4] = b"LLMS";
const HEADER_LEN: usize = 16;

fn header(magic: &[u8; 4], params: GoppaParams, seed: u64) -> Vec<u8> {
    let mut out = magic.to_vec();
    out.extend_from_slice(&(params.n() as u16).to_le_bytes());
    out.push(params.m() as u8);
    out.push(params.t() as u8);
    out.extend_from_slice(&seed.to_le_bytes());
    out
}

fn parse_header(magic: &[u8; 4], bytes: &[u8]) -> Result<(GoppaParams, u64), McElieceError> {
    let bad = |msg: &str| McElieceError::Serialization(msg.to_string());
    if bytes.len() < HEADER_LEN {
        return Err(bad("truncated header"));
    }
    if &bytes[..4] != magic {
        return Err(bad("wrong magic"));
    }
    let n = u16::from_le_bytes([bytes[4], bytes[5]]) as usize;
    let params = GoppaParams::new(bytes[6] as u32, bytes[7] as u32)?;
    if params.n() != n {
        return Err(bad("n does not equal 2^m"));
    }
    let seed = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    Ok((params, seed))
}

fn pack(matrices: &[&BitMatrix]) -> Vec<u8> {
    let mut all = Bits::zeros(0);
    for m in matrices {
        for r in 0..m.rows() {
            all.extend_from(m.row(r));
        }
    }
    all.to_bytes()
}

fn unpack(body: &[u8], shapes: &[(usize, usize)]) -> Result<Vec<BitMatrix>, McElieceError> {
    let total: usize = shapes.iter().map(|&(r, c)| r * c).sum();
    if body.len() != total.div_ceil(8) {
        return Err(McElieceError::Serialization(format!(
            "body has {} bytes, expected {}",
            body.len(),
            total.div_ceil(8)
        )));
    }
    let all = Bits::from_bytes(body, total);
    let mut at = 0;
    Ok(shapes
        .iter()
        .map(|&(rows, cols)| {
            let rows = (0..rows)
                .map(|_| {
                    let r = all.slice(at, cols);
                    at += cols;
                    r
                })
                .collect();
            BitMatrix::from_rows(cols, rows)
        })
        .collect())
}

impl PublicKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = header(PUBLIC_MAGIC, self.params, self.seed);
        out.extend(pack(&[&self.generator]));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, McElieceError> {
        let (params, seed) = parse_header(PUBLIC_MAGIC, bytes)?;
        let mut m = unpack(&bytes[HEADER_LEN..], &[(params.k(), params.n())])?;
        Ok(PublicKey {
            params,
            seed,
            generator: m.remove(0),
        })
    }
}

impl SecretKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = header(SECRET_MAGIC, self.params, self.seed);
        for &c in &self.goppa_poly {
            out.extend_from_slice(&(c as u16).to_le_bytes());
        }
        let n = self.params.n();
        let mut p = BitMatrix::zeros(n, n);
        for (j, &pj) in self.perm.iter().enumerate() {
            p.set(j, pj, true);
        }
        out.extend(pack(&[&self.s_inv, &p]));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, McElieceError> {
        let (params, seed) = parse_header(SECRET_MAGIC, bytes)?;
        let (k, n) = (params.k(), params.n());
        let poly_end = HEADER_LEN + 2 * (params.t() as usize + 1);
        if bytes.len() < poly_end {
            return Err(McElieceError::Serialization("truncated polynomial".into()));
        }
        let goppa_poly: Vec<u32> = bytes[HEADER_LEN..poly_end]
            .chunks(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as u32)
            .collect();
        if goppa_poly.iter().any(|&c| c >= 1 << params.m()) {
            return Err(McElieceError::Serialization("coefficient outside the field".into()));
        }
        let mut mats = unpack(&bytes[poly_end..], &[(k, k), (n, n)])?;
        let p = mats.pop().expect("two matrices");
        let s_inv = mats.pop().expect("two matrices");
        let mut perm = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for j in 0..n {
            let row = p.row(j);
            let target = row.ones().next();
            match target {
                Some(c) if row.weight() == 1 && !seen[c] => {
                    seen[c] = true;
                    perm.push(c);
                }
                _ => return Err(McElieceError::Serialization("not a permutation matrix".into())),
            }
        }
        if s_inv.inverse().is_none() {
            return Err(McElieceError::Serialization("scrambler is singular".into()));
        }
        SecretKey::assemble(params, seed, goppa_poly, s_inv, perm)
    }
}
