//! McEliece public-key encryption over binary Goppa codes.
//!
//! Bits are packed little-endian throughout: bit 0 is the least significant
//! bit of byte 0.

pub mod bits;
mod cipher;
mod goppa;
mod keyfile;
mod params;

pub use bits::{BitMatrix, Bits};
pub use cipher::{CipherMode, CipherModel};
pub use goppa::{keygen, McElieceKeyPair, PublicKey, SecretKey, MAX_TABLE_ENTRIES};
pub use params::GoppaParams;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum McElieceError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("uncorrectable ciphertext")]
    DecodeFailure,
    #[error("malformed key encoding: {0}")]
    Serialization(String),
}
