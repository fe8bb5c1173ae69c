//! The ℓ×ℓ individually-secure mixing code.
//!
//! `G` is a row-normalised Cauchy matrix: every square submatrix of a Cauchy
//! matrix is invertible, and scaling rows by nonzero constants keeps that
//! property. As a consequence no proper subset of the encodings `X = G·M`
//! spans a unit vector, so an observer of fewer than ℓ encodings learns
//! nothing about any single message symbol. [`individual_security_oracle`]
//! checks this by exhaustive enumeration on small instances.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec, GfError, Matrix, OpCounter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsCodeError {
    #[error("field of size {q} is too small for a {ell}-stream Cauchy code (need q > 2*ell)")]
    FieldTooSmall { ell: usize, q: u64 },
    #[error("expected {expected} symbols, got {got}")]
    Length { expected: usize, got: usize },
    #[error("mixing matrix is not invertible")]
    NotInvertible,
    #[error("refusing to enumerate {size} message blocks")]
    TooLarge { size: u64 },
    #[error("stream index {0} out of range")]
    BadIndex(usize),
    #[error(transparent)]
    Gf(#[from] GfError),
}

/// Upper bound on `q^ℓ` for the brute-force oracle.
pub const ORACLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageBlock(pub Vec<FieldElement>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixingCode {
    ell: usize,
    g: Matrix,
    g_inv: Matrix,
}

impl MixingCode {
    /// Deterministic construction for `ell` streams over `spec`.
    pub fn build(ell: usize, spec: FieldSpec) -> Result<Self, IsCodeError> {
        if ell == 0 || spec.size() <= 2 * ell as u64 {
            return Err(IsCodeError::FieldTooSmall {
                ell,
                q: spec.size(),
            });
        }
        let x: Vec<FieldElement> = (0..ell).map(|i| spec.elem(i as u64)).collect::<Result<_, _>>()?;
        let y: Vec<FieldElement> = (0..ell)
            .map(|j| spec.elem((ell + j) as u64))
            .collect::<Result<_, _>>()?;
        let mut g = Matrix::zeros(spec, ell, ell);
        for (i, &xi) in x.iter().enumerate() {
            // scale row i by (x_i - y_0) so the first column is all ones
            let norm = xi.sub(y[0])?;
            for (j, &yj) in y.iter().enumerate() {
                let cauchy = xi.sub(yj)?.inv()?;
                g.set(i, j, norm.mul(cauchy)?)?;
            }
        }
        Self::from_matrix(g)
    }

    /// Wraps an arbitrary invertible matrix (used for test codes such as `I`).
    pub fn from_matrix(g: Matrix) -> Result<Self, IsCodeError> {
        if !g.is_square() {
            return Err(IsCodeError::NotInvertible);
        }
        let g_inv = g.inverse().map_err(|e| match e {
            GfError::Singular => IsCodeError::NotInvertible,
            other => IsCodeError::Gf(other),
        })?;
        Ok(MixingCode {
            ell: g.rows(),
            g,
            g_inv,
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn spec(&self) -> FieldSpec {
        self.g.spec()
    }

    pub fn generator(&self) -> &Matrix {
        &self.g
    }

    pub fn inverse(&self) -> &Matrix {
        &self.g_inv
    }

    /// `X = G·M`.
    pub fn encode(
        &self,
        block: &MessageBlock,
        ctr: &OpCounter,
    ) -> Result<Vec<FieldElement>, IsCodeError> {
        self.check_len(block.0.len())?;
        Ok(self.g.mul_vec(&block.0, ctr)?)
    }

    /// `M = G⁻¹·X`.
    pub fn decode(
        &self,
        x: &[FieldElement],
        ctr: &OpCounter,
    ) -> Result<MessageBlock, IsCodeError> {
        self.check_len(x.len())?;
        Ok(MessageBlock(self.g_inv.mul_vec(x, ctr)?))
    }

    fn check_len(&self, got: usize) -> Result<(), IsCodeError> {
        if got != self.ell {
            return Err(IsCodeError::Length {
                expected: self.ell,
                got,
            });
        }
        Ok(())
    }

    /// True when every square submatrix of `G` is invertible.
    pub fn all_square_submatrices_invertible(&self) -> bool {
        let subsets = index_subsets(self.ell);
        subsets.iter().all(|rows| {
            subsets
                .iter()
                .filter(|cols| cols.len() == rows.len())
                .all(|cols| self.g.submatrix(rows, cols).is_invertible())
        })
    }
}

/// All non-empty subsets of `0..n`, as sorted index lists.
pub fn index_subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..1 << n)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// `H(M_i | X_W)` for one message index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessageEntropy {
    pub bits: f64,
    /// Exact: the conditional law of `M_i` is uniform on the whole field for
    /// every observed value of `X_W`.
    pub conditionally_uniform: bool,
}

/// Computes `H(M_i | X_W)` for every `i` by enumerating all `q^ℓ` message
/// blocks under the uniform prior. `observed` holds 0-based stream indices.
pub fn individual_security_oracle(
    code: &MixingCode,
    observed: &[usize],
) -> Result<Vec<MessageEntropy>, IsCodeError> {
    let ell = code.ell;
    let spec = code.spec();
    let q = spec.size();
    let total = q
        .checked_pow(ell as u32)
        .filter(|&t| t <= ORACLE_LIMIT)
        .ok_or(IsCodeError::TooLarge {
            size: q.saturating_pow(ell as u32),
        })?;
    if let Some(&bad) = observed.iter().find(|&&w| w >= ell) {
        return Err(IsCodeError::BadIndex(bad));
    }

    // counts[i][x_w] = histogram of M_i given X_W = x_w
    let mut counts: Vec<HashMap<u64, Vec<u64>>> = vec![HashMap::new(); ell];
    let mut msg = vec![0u32; ell];
    for index in 0..total {
        let mut rest = index;
        for slot in msg.iter_mut() {
            *slot = (rest % q) as u32;
            rest /= q;
        }
        let mut key = 0u64;
        for &w in observed {
            let mut acc = 0u32;
            for (j, &m) in msg.iter().enumerate() {
                acc = spec.raw_add(acc, spec.raw_mul(code.g.raw(w, j), m));
            }
            key = key * q + acc as u64;
        }
        for (i, &m) in msg.iter().enumerate() {
            counts[i].entry(key).or_insert_with(|| vec![0; q as usize])[m as usize] += 1;
        }
    }

    Ok(counts
        .into_iter()
        .map(|per_key| {
            let mut uniform = true;
            // entropy value (as bits of f64) -> number of blocks contributing it
            let mut weights: BTreeMap<u64, u64> = BTreeMap::new();
            for hist in per_key.values() {
                let n: u64 = hist.iter().sum();
                uniform &= hist.iter().all(|&c| c * q == n);
                *weights.entry(histogram_entropy(hist).to_bits()).or_default() += n;
            }
            let bits = if weights.len() == 1 {
                f64::from_bits(*weights.keys().next().unwrap())
            } else {
                weights
                    .iter()
                    .map(|(&h, &n)| f64::from_bits(h) * n as f64)
                    .sum::<f64>()
                    / total as f64
            };
            MessageEntropy {
                bits,
                conditionally_uniform: uniform,
            }
        })
        .collect())
}

fn histogram_entropy(hist: &[u64]) -> f64 {
    let support: Vec<u64> = hist.iter().copied().filter(|&c| c > 0).collect();
    if support.windows(2).all(|w| w[0] == w[1]) {
        // uniform on its support
        return (support.len() as f64).log2();
    }
    let n: u64 = support.iter().sum();
    support
        .iter()
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}
