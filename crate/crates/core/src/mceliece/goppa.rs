//! Binary Goppa codes and the McEliece key pair built on them.

use std::collections::HashMap;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bits::{BitMatrix, Bits};
use super::{GoppaParams, McElieceError};
use crate::gf::FieldSpec;

/// Largest syndrome table built for bounded-distance decoding.
pub const MAX_TABLE_ENTRIES: u64 = 1 << 21;

// Polynomials over F_{2^m}: coefficient vectors, lowest degree first, no
// trailing zeros (the zero polynomial is empty).
type Poly = Vec<u32>;

fn trim(mut p: Poly) -> Poly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn poly_eval(f: FieldSpec, p: &[u32], x: u32) -> u32 {
    p.iter()
        .rev()
        .fold(0, |acc, &c| f.raw_add(f.raw_mul(acc, x), c))
}

fn poly_rem(f: FieldSpec, a: &[u32], m: &[u32]) -> Poly {
    let mut a = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = f.raw_inv(m[dm]).expect("modulus is nonzero");
    while a.len() > dm {
        let shift = a.len() - 1 - dm;
        let c = f.raw_mul(*a.last().unwrap(), lead_inv);
        for (i, &mc) in m.iter().enumerate() {
            a[shift + i] = f.raw_add(a[shift + i], f.raw_mul(c, mc));
        }
        a = trim(a);
    }
    a
}

fn poly_mulmod(f: FieldSpec, a: &[u32], b: &[u32], m: &[u32]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.raw_add(out[i + j], f.raw_mul(x, y));
        }
    }
    poly_rem(f, &out, m)
}

fn poly_gcd(f: FieldSpec, a: &[u32], b: &[u32]) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(f, &a, &b);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or test: `g` of degree `t` is irreducible iff
/// `gcd(g, x^(q^i) - x) = 1` for `1 <= i <= t/2`, with `q = 2^m`.
pub(crate) fn is_irreducible(f: FieldSpec, g: &[u32]) -> bool {
    let t = g.len() - 1;
    if t == 0 {
        return false;
    }
    let m = f.mult_cost_bits();
    let x: Poly = vec![0, 1];
    let mut h = poly_rem(f, &x, g);
    for _ in 1..=t / 2 {
        for _ in 0..m {
            h = poly_mulmod(f, &h, &h, g);
        }
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = f.raw_add(diff[1], 1);
        let d = poly_gcd(f, g, &trim(diff));
        if d.len() != 1 {
            return false;
        }
    }
    true
}

/// Binary parity-check matrix of `Γ(L, g)` with `L` = all of `F_{2^m}` in
/// increasing order: row `i·m + b` holds bit `b` of `L_j^i / g(L_j)`.
fn parity_check(params: &GoppaParams, g: &[u32]) -> BitMatrix {
    let f = FieldSpec::binary(params.m()).expect("validated degree");
    let n = params.n();
    let t = params.t() as usize;
    let m = params.m() as usize;
    let mut h = BitMatrix::zeros(t * m, n);
    for j in 0..n {
        let alpha = j as u32;
        let mut v = f.raw_inv(poly_eval(f, g, alpha)).expect("g has no roots on L");
        for i in 0..t {
            for b in 0..m {
                if v >> b & 1 == 1 {
                    h.set(i * m + b, j, true);
                }
            }
            v = f.raw_mul(v, alpha);
        }
    }
    h
}

/// Public key: the scrambled generator `G' = S·G·P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub(crate) params: GoppaParams,
    pub(crate) seed: u64,
    pub(crate) generator: BitMatrix,
}

impl PublicKey {
    pub fn params(&self) -> GoppaParams {
        self.params
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    /// `x·G'` with no errors added.
    pub fn codeword(&self, x: &Bits) -> Result<Bits, McElieceError> {
        if x.len() != self.params.k() {
            return Err(McElieceError::Length {
                expected: self.params.k(),
                got: x.len(),
            });
        }
        Ok(self.generator.left_mul(x))
    }

    /// `x·G' + e` with `e` drawn uniformly among weight-`t` vectors.
    pub fn encrypt(&self, x: &Bits, seed: u64) -> Result<Bits, McElieceError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let errors = index::sample(&mut rng, self.params.n(), self.params.t() as usize).into_vec();
        self.encrypt_with_errors(x, &errors)
    }

    /// `x·G'` with the given bit positions flipped.
    pub fn encrypt_with_errors(&self, x: &Bits, errors: &[usize]) -> Result<Bits, McElieceError> {
        let mut c = self.codeword(x)?;
        for &e in errors {
            if e >= c.len() {
                return Err(McElieceError::Length {
                    expected: c.len(),
                    got: e,
                });
            }
            c.flip(e);
        }
        Ok(c)
    }
}

/// Secret key: `S⁻¹`, the permutation, and the Goppa decoder.
#[derive(Clone, Debug)]
pub struct SecretKey {
    pub(crate) params: GoppaParams,
    pub(crate) seed: u64,
    pub(crate) goppa_poly: Vec<u32>,
    pub(crate) s_inv: BitMatrix,
    /// Column `j` of the unscrambled code sits at position `perm[j]` of a ciphertext.
    pub(crate) perm: Vec<usize>,
    syndrome_cols: Vec<u64>,
    info_set: Vec<usize>,
    table: HashMap<u64, Vec<usize>>,
}

impl SecretKey {
    pub(crate) fn assemble(
        params: GoppaParams,
        seed: u64,
        goppa_poly: Vec<u32>,
        s_inv: BitMatrix,
        perm: Vec<usize>,
    ) -> Result<Self, McElieceError> {
        check_feasible(&params)?;
        let f = FieldSpec::binary(params.m()).expect("validated degree");
        if goppa_poly.len() != params.t() as usize + 1 || !is_irreducible(f, &goppa_poly) {
            return Err(McElieceError::Params("Goppa polynomial is not irreducible of degree t".into()));
        }
        let h = parity_check(&params, &goppa_poly);
        let (_, info_set) = h.null_space();
        if info_set.len() != params.k() {
            return Err(McElieceError::Params("parity-check matrix is rank deficient".into()));
        }
        let ht = h.transpose();
        let syndrome_cols: Vec<u64> = (0..params.n()).map(|j| ht.row(j).low_word()).collect();
        let table = syndrome_table(&syndrome_cols, params.t() as usize)?;
        Ok(SecretKey {
            params,
            seed,
            goppa_poly,
            s_inv,
            perm,
            syndrome_cols,
            info_set,
            table,
        })
    }

    pub fn params(&self) -> GoppaParams {
        self.params
    }

    pub fn goppa_poly(&self) -> &[u32] {
        &self.goppa_poly
    }

    /// Number of correctable error patterns stored (weights `0..=t`).
    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    pub fn decrypt(&self, c: &Bits) -> Result<Bits, McElieceError> {
        let n = self.params.n();
        if c.len() != n {
            return Err(McElieceError::Length {
                expected: n,
                got: c.len(),
            });
        }
        let mut y = Bits::zeros(n);
        let mut syndrome = 0u64;
        for j in 0..n {
            if c.get(self.perm[j]) {
                y.set(j, true);
                syndrome ^= self.syndrome_cols[j];
            }
        }
        let errors = self
            .table
            .get(&syndrome)
            .ok_or(McElieceError::DecodeFailure)?;
        for &e in errors {
            y.flip(e);
        }
        let u = Bits::from_bools(&self.info_set.iter().map(|&j| y.get(j)).collect::<Vec<_>>());
        Ok(self.s_inv.left_mul(&u))
    }
}

fn check_feasible(params: &GoppaParams) -> Result<(), McElieceError> {
    let n = params.n() as u64;
    let t = params.t() as u64;
    if t < 2 {
        return Err(McElieceError::Params("key generation needs t >= 2".into()));
    }
    if n > 1024 || t * params.m() as u64 > 64 {
        return Err(McElieceError::Params(format!(
            "n = {n}, t = {t} is beyond table decoding"
        )));
    }
    let mut entries = 1u64;
    let mut binom = 1u64;
    for w in 1..=t {
        binom = binom * (n - w + 1) / w;
        entries += binom;
        if entries > MAX_TABLE_ENTRIES {
            return Err(McElieceError::Params(format!(
                "syndrome table for n = {n}, t = {t} exceeds {MAX_TABLE_ENTRIES} entries"
            )));
        }
    }
    Ok(())
}

fn syndrome_table(cols: &[u64], t: usize) -> Result<HashMap<u64, Vec<usize>>, McElieceError> {
    fn fill(
        cols: &[u64],
        start: usize,
        left: usize,
        syn: u64,
        pattern: &mut Vec<usize>,
        table: &mut HashMap<u64, Vec<usize>>,
    ) -> Result<(), McElieceError> {
        if table.insert(syn, pattern.clone()).is_some() {
            return Err(McElieceError::Params("two correctable patterns share a syndrome".into()));
        }
        if left == 0 {
            return Ok(());
        }
        for j in start..cols.len() {
            pattern.push(j);
            fill(cols, j + 1, left - 1, syn ^ cols[j], pattern, table)?;
            pattern.pop();
        }
        Ok(())
    }
    let mut table = HashMap::new();
    fill(cols, 0, t, 0, &mut Vec::new(), &mut table)?;
    Ok(table)
}

#[derive(Clone, Debug)]
pub struct McElieceKeyPair {
    pub public: PublicKey,
    pub secret: SecretKey,
}

/// Deterministic key generation from `seed`.
pub fn keygen(params: GoppaParams, seed: u64) -> Result<McElieceKeyPair, McElieceError> {
    check_feasible(&params)?;
    let f = FieldSpec::binary(params.m()).expect("validated degree");
    let t = params.t() as usize;
    let n = params.n();
    let k = params.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (goppa_poly, generator) = (0..10_000)
        .find_map(|_| {
            let mut g: Vec<u32> = (0..t).map(|_| rng.gen_range(0..f.size() as u32)).collect();
            g.push(1);
            if !is_irreducible(f, &g) {
                return None;
            }
            let h = parity_check(&params, &g);
            let (basis, free) = h.null_space();
            (free.len() == k).then_some((g, basis))
        })
        .ok_or_else(|| McElieceError::Params("no usable Goppa polynomial found".into()))?;

    let (s, s_inv) = loop {
        let rows = (0..k)
            .map(|_| {
                let bools: Vec<bool> = (0..k).map(|_| rng.gen()).collect();
                Bits::from_bools(&bools)
            })
            .collect();
        let s = BitMatrix::from_rows(k, rows);
        if let Some(inv) = s.inverse() {
            break (s, inv);
        }
    };

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);

    let sg = s.mul(&generator);
    let mut public_gen = BitMatrix::zeros(k, n);
    for r in 0..k {
        for j in sg.row(r).ones() {
            public_gen.set(r, perm[j], true);
        }
    }

    let secret = SecretKey::assemble(params, seed, goppa_poly, s_inv, perm)?;
    Ok(McElieceKeyPair {
        public: PublicKey {
            params,
            seed,
            generator: public_gen,
        },
        secret,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility_matches_root_search_for_quadratics() {
        let f = FieldSpec::binary(5).unwrap();
        for c0 in 0..32u32 {
            for c1 in 0..32u32 {
                let g = vec![c0, c1, 1];
                let has_root = (0..32).any(|x| poly_eval(f, &g, x) == 0);
                assert_eq!(is_irreducible(f, &g), !has_root, "g = {g:?}");
            }
        }
    }

    #[test]
    fn irreducibility_of_known_polynomials() {
        let f = FieldSpec::binary(1).unwrap();
        // over F_2: x^2+x+1 irreducible, x^3+x+1 irreducible, x^4+x^2+1 = (x^2+x+1)^2
        assert!(is_irreducible(f, &[1, 1, 1]));
        assert!(is_irreducible(f, &[1, 1, 0, 1]));
        assert!(!is_irreducible(f, &[1, 0, 1, 0, 1]));
        assert!(!is_irreducible(f, &[1]));
    }

    #[test]
    fn parity_check_annihilates_generator() {
        let pair = keygen(GoppaParams::desk(), 3).unwrap();
        let h = parity_check(&pair.secret.params, &pair.secret.goppa_poly);
        let (g, _) = h.null_space();
        let ht = h.transpose();
        assert_eq!(g.rows(), 22);
        for r in 0..g.rows() {
            assert!(ht.left_mul(g.row(r)).is_zero());
        }
        assert_eq!(pair.secret.table_len(), 1 + 32 + 32 * 31 / 2);
    }

    #[test]
    fn infeasible_parameters() {
        assert!(keygen(GoppaParams::classic(), 0).is_err());
        assert!(keygen(GoppaParams::new(5, 1).unwrap(), 0).is_err());
        assert!(keygen(GoppaParams::new(5, 0).unwrap(), 0).is_err());
    }
}
