//! Exact arithmetic over prime fields `F_q` and binary extension fields `F_{2^m}`.
//!
//! Elements carry their [`FieldSpec`], so mixing elements of different fields is
//! reported as an error instead of silently producing garbage. Hot loops (RLNC
//! payload combination, mixing of byte symbols) use the table-driven
//! [`gf256`] routines instead, which agree with the generic path for
//! `F_{2^8}` (see the cross-check tests).

pub mod gf256;
mod matrix;

pub use matrix::Matrix;

use std::cell::Cell;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("operands belong to different fields ({0} vs {1})")]
    SpecMismatch(FieldSpec, FieldSpec),
    #[error("division by zero")]
    DivisionByZero,
    #[error("value {value} is outside the field of size {size}")]
    OutOfRange { value: u64, size: u64 },
    #[error("{0} is not a prime modulus")]
    NotPrime(u32),
    #[error("no reduction polynomial tabulated for extension degree {0}")]
    UnsupportedDegree(u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
}

/// Lexicographically-least irreducible polynomial of each degree `m` in
/// `1..=16`, bit `i` holding the coefficient of `x^i`.
pub const REDUCTION_POLYS: [u32; 16] = [
    0x2, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x203, 0x409, 0x805, 0x1009, 0x201b, 0x4021,
    0x8003, 0x1002b,
];

/// Identifies a finite field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldSpec {
    Prime { q: u32 },
    Binary { m: u32, poly: u32 },
}

impl FieldSpec {
    pub fn prime(q: u32) -> Result<Self, GfError> {
        if !is_prime(q) {
            return Err(GfError::NotPrime(q));
        }
        Ok(FieldSpec::Prime { q })
    }

    pub fn binary(m: u32) -> Result<Self, GfError> {
        if !(1..=16).contains(&m) {
            return Err(GfError::UnsupportedDegree(m));
        }
        Ok(FieldSpec::Binary {
            m,
            poly: REDUCTION_POLYS[m as usize - 1],
        })
    }

    /// The RLNC coefficient field and the byte-symbol mixing field.
    pub fn gf256() -> Self {
        FieldSpec::Binary {
            m: 8,
            poly: REDUCTION_POLYS[7],
        }
    }

    pub fn size(&self) -> u64 {
        match *self {
            FieldSpec::Prime { q } => q as u64,
            FieldSpec::Binary { m, .. } => 1u64 << m,
        }
    }

    /// Binary operations charged per multiplication: `m` for `F_{2^m}`,
    /// `ceil(log2 q)` for prime fields.
    pub fn mult_cost_bits(&self) -> u64 {
        match *self {
            FieldSpec::Prime { q } => 32 - (q - 1).leading_zeros() as u64,
            FieldSpec::Binary { m, .. } => m as u64,
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, FieldSpec::Binary { .. })
    }

    pub fn elem(&self, value: u64) -> Result<FieldElement, GfError> {
        if value >= self.size() {
            return Err(GfError::OutOfRange {
                value,
                size: self.size(),
            });
        }
        Ok(FieldElement {
            value: value as u32,
            spec: *self,
        })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            value: 0,
            spec: *self,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            value: 1,
            spec: *self,
        }
    }

    /// All elements in increasing order of their integer representation.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let spec = *self;
        (0..self.size()).map(move |v| FieldElement {
            value: v as u32,
            spec,
        })
    }

    pub(crate) fn raw_add(&self, a: u32, b: u32) -> u32 {
        match *self {
            FieldSpec::Prime { q } => ((a as u64 + b as u64) % q as u64) as u32,
            FieldSpec::Binary { .. } => a ^ b,
        }
    }

    pub(crate) fn raw_neg(&self, a: u32) -> u32 {
        match *self {
            FieldSpec::Prime { q } => {
                if a == 0 {
                    0
                } else {
                    q - a
                }
            }
            FieldSpec::Binary { .. } => a,
        }
    }

    pub(crate) fn raw_mul(&self, a: u32, b: u32) -> u32 {
        match *self {
            FieldSpec::Prime { q } => ((a as u64 * b as u64) % q as u64) as u32,
            FieldSpec::Binary { m, poly } => clmul_reduce(a, b, m, poly),
        }
    }

    pub(crate) fn raw_inv(&self, a: u32) -> Result<u32, GfError> {
        if a == 0 {
            return Err(GfError::DivisionByZero);
        }
        // a^(size-2) in the multiplicative group
        let mut exp = self.size() - 2;
        let mut base = a;
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            exp >>= 1;
        }
        Ok(acc)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime { q } => write!(f, "F_{q}"),
            FieldSpec::Binary { m, poly } => write!(f, "F_2^{m} (poly {poly:#x})"),
        }
    }
}

fn clmul_reduce(a: u32, b: u32, m: u32, poly: u32) -> u32 {
    let mut acc: u64 = 0;
    let mut a = a as u64;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        a <<= 1;
        b >>= 1;
    }
    let poly = poly as u64;
    for bit in (m..2 * m).rev() {
        if acc & (1 << bit) != 0 {
            acc ^= poly << (bit - m);
        }
    }
    acc as u32
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= q as u64 {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of a finite field.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    spec: FieldSpec,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[allow(clippy::should_implement_trait)]
impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &FieldElement) -> Result<(), GfError> {
        if self.spec != other.spec {
            return Err(GfError::SpecMismatch(self.spec, other.spec));
        }
        Ok(())
    }

    pub fn add(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        self.check(&rhs)?;
        Ok(FieldElement {
            value: self.spec.raw_add(self.value, rhs.value),
            spec: self.spec,
        })
    }

    pub fn neg(self) -> FieldElement {
        FieldElement {
            value: self.spec.raw_neg(self.value),
            spec: self.spec,
        }
    }

    pub fn sub(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        self.add(rhs.neg())
    }

    pub fn mul(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        self.check(&rhs)?;
        Ok(FieldElement {
            value: self.spec.raw_mul(self.value, rhs.value),
            spec: self.spec,
        })
    }

    pub fn inv(self) -> Result<FieldElement, GfError> {
        Ok(FieldElement {
            value: self.spec.raw_inv(self.value)?,
            spec: self.spec,
        })
    }

    pub fn div(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        self.check(&rhs)?;
        self.mul(rhs.inv()?)
    }
}

/// Counts field multiplications performed on behalf of one run.
///
/// Additions are free; each multiplication in `F_{2^m}` is charged `m`
/// binary operations when converted with [`OpCounter::binary_ops`].
#[derive(Debug, Default)]
pub struct OpCounter {
    mults: Cell<u64>,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        let r = a.mul(b)?;
        self.charge(1);
        Ok(r)
    }

    pub fn charge(&self, mults: u64) {
        self.mults.set(self.mults.get() + mults);
    }

    pub fn mults(&self) -> u64 {
        self.mults.get()
    }

    pub fn binary_ops(&self, spec: FieldSpec) -> u64 {
        self.mults() * spec.mult_cost_bits()
    }

    pub fn reset(&self) {
        self.mults.set(0);
    }
}
