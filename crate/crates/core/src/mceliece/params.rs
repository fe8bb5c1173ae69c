use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::McElieceError;

/// Binary Goppa code parameters `[n = 2^m, k = n - t·m]` correcting `t` errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GoppaParams {
    m: u32,
    t: u32,
}

impl GoppaParams {
    /// `t = 0` is accepted as a degenerate, error-free configuration; it can
    /// be used with the rate and cost formulas but not for key generation.
    pub fn new(m: u32, t: u32) -> Result<Self, McElieceError> {
        if !(2..=16).contains(&m) {
            return Err(McElieceError::Params(format!("extension degree {m} out of range")));
        }
        if (t as u64) * (m as u64) >= 1u64 << m {
            return Err(McElieceError::Params(format!(
                "t*m = {} leaves no message bits for n = {}",
                t * m,
                1u64 << m
            )));
        }
        Ok(GoppaParams { m, t })
    }

    /// Desk-scale default, `[32, 22]` correcting 2 errors.
    pub fn desk() -> Self {
        GoppaParams { m: 5, t: 2 }
    }

    /// The original McEliece parameters, `[1024, 524]` correcting 50 errors.
    pub fn classic() -> Self {
        GoppaParams { m: 10, t: 50 }
    }

    pub fn n(&self) -> usize {
        1 << self.m
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn k(&self) -> usize {
        self.n() - (self.t * self.m) as usize
    }

    /// `η_c = 1 - t·m / 2^m = k / n`, exactly.
    pub fn rate(&self) -> Ratio<i64> {
        Ratio::new(self.k() as i64, self.n() as i64)
    }

    /// `η_c·t·m·n / 2` binary operations, rounded to the nearest integer.
    pub fn encryption_ops(&self) -> u64 {
        let exact = self.rate() * Ratio::from_integer(self.tmn()) / 2;
        round_half_up(exact)
    }

    /// `(3 - 2·η_c)·t·m·n` binary operations, rounded to the nearest integer.
    pub fn decryption_ops(&self) -> u64 {
        let exact = (Ratio::from_integer(3) - self.rate() * 2) * self.tmn();
        round_half_up(exact)
    }

    fn tmn(&self) -> i64 {
        self.t as i64 * self.m as i64 * self.n() as i64
    }
}

fn round_half_up(r: Ratio<i64>) -> u64 {
    (r + Ratio::new(1, 2)).floor().to_integer() as u64
}
