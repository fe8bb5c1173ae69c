//! Packed bit vectors and binary matrices.
//!
//! Bit `i` is stored little-endian: bit `i % 8` (LSB = 0) of byte `i / 8`.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "Bits[{s}]")
    }
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Takes the first `len` bits of `bytes`.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Self {
        assert!(len <= bytes.len() * 8, "not enough bytes for {len} bits");
        let mut out = Bits::zeros(len);
        for (w, chunk) in out.words.iter_mut().zip(bytes.chunks(8)) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            *w = u64::from_le_bytes(buf);
        }
        out.clear_tail();
        out
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Bits::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    /// `ceil(len / 8)` bytes; unused high bits of the last byte are zero.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        out.truncate(self.len.div_ceil(8));
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn slice(&self, start: usize, len: usize) -> Bits {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = Bits::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn extend_from(&mut self, other: &Bits) {
        let start = self.len;
        self.resize(start + other.len);
        for i in other.ones() {
            self.set(start + i, true);
        }
    }

    /// Grows with zeros or truncates.
    pub fn resize(&mut self, len: usize) {
        self.len = len;
        self.words.resize(len.div_ceil(64), 0);
        self.clear_tail();
    }

    /// First word, for syndromes of at most 64 bits.
    pub fn low_word(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Row-major binary matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<Bits>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![Bits::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Bits>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged bit matrix");
        BitMatrix { cols, rows }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &Bits {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.rows[r].set(c, v);
    }

    /// Row vector times matrix: `x · M`.
    pub fn left_mul(&self, x: &Bits) -> Bits {
        assert_eq!(x.len(), self.rows(), "vector length must equal row count");
        let mut out = Bits::zeros(self.cols);
        for i in x.ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows(), "inner dimensions differ");
        BitMatrix {
            cols: rhs.cols,
            rows: self.rows.iter().map(|r| rhs.left_mul(r)).collect(),
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows.len() {
                break;
            }
            let Some(p) = (r..self.rows.len()).find(|&i| self.rows[i].get(c)) else {
                continue;
            };
            self.rows.swap(p, r);
            let pivot_row = self.rows[r].clone();
            for i in 0..self.rows.len() {
                if i != r && self.rows[i].get(c) {
                    self.rows[i].xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.rows();
        if n != self.cols {
            return None;
        }
        // augment [A | I]
        let mut aug = BitMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for c in self.rows[i].ones() {
                aug.rows[i].set(c, true);
            }
            aug.rows[i].set(n + i, true);
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(BitMatrix {
            cols: n,
            rows: aug.rows.iter().map(|r| r.slice(n, n)).collect(),
        })
    }

    /// Basis of `{x : M·xᵀ = 0}` as rows, plus the free columns. Each basis
    /// vector is the unit vector on its free column restricted to the free
    /// columns, so the free columns form an information set.
    pub fn null_space(&self) -> (BitMatrix, Vec<usize>) {
        let mut red = self.clone();
        let pivots = red.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let basis = free
            .iter()
            .map(|&f| {
                let mut v = Bits::zeros(self.cols);
                v.set(f, true);
                for (r, &p) in pivots.iter().enumerate() {
                    if red.rows[r].get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect();
        (BitMatrix::from_rows(self.cols, basis), free)
    }
}
