//! Incremental Gaussian elimination over `F_{2^8}` for sliding-window RLNC.

use crate::gf::gf256;

struct Row {
    pivot: usize,
    /// Coefficients for units `base..base + coeffs.len()`.
    coeffs: Vec<u8>,
    payload: Vec<u8>,
}

/// Receiver state for one coded flow. Rows are kept in reduced row echelon
/// form over the undecoded units `>= base`; every decoded unit has a zero
/// column in every stored row.
pub struct RlncDecoder {
    n_units: usize,
    front: usize,
    base: usize,
    decoded: Vec<bool>,
    decoded_beyond_front: usize,
    payloads: Vec<Option<Vec<u8>>>,
    rows: Vec<Row>,
}

impl RlncDecoder {
    pub fn new(n_units: usize) -> Self {
        RlncDecoder {
            n_units,
            front: 0,
            base: 0,
            decoded: vec![false; n_units],
            decoded_beyond_front: 0,
            payloads: vec![None; n_units],
            rows: Vec::new(),
        }
    }

    /// Number of units decoded in order from the start.
    pub fn front(&self) -> usize {
        self.front
    }

    /// Pending independent equations.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Degrees of freedom held beyond the in-order front.
    pub fn dof_beyond_front(&self) -> usize {
        self.rows.len() + self.decoded_beyond_front
    }

    pub fn is_decoded(&self, id: usize) -> bool {
        self.decoded[id]
    }

    pub fn is_complete(&self) -> bool {
        self.front == self.n_units
    }

    pub fn payload(&self, id: usize) -> Option<&[u8]> {
        self.payloads[id].as_deref()
    }

    pub fn into_payloads(self) -> Vec<Option<Vec<u8>>> {
        self.payloads
    }

    /// Adds the combination `Σ coeffs[i]·unit[lo + i]`; returns the units
    /// decoded as a result, in increasing order. A combination dependent on
    /// what is already known leaves the state unchanged.
    pub fn receive(&mut self, lo: usize, coeffs: &[u8], payload: &[u8]) -> Vec<usize> {
        let hi = lo + coeffs.len();
        assert!(hi <= self.n_units, "combination beyond the flow");
        let width = hi.max(self.base) - self.base;
        let mut row = vec![0u8; width];
        let mut data = payload.to_vec();
        for (i, &c) in coeffs.iter().enumerate() {
            let id = lo + i;
            if c == 0 {
                continue;
            }
            if self.decoded[id] {
                gf256::axpy(&mut data, c, self.payloads[id].as_ref().expect("decoded unit has payload"));
            } else {
                row[id - self.base] = c;
            }
        }
        for r in &self.rows {
            let p = r.pivot - self.base;
            if p < row.len() && row[p] != 0 {
                let f = row[p];
                if r.coeffs.len() > row.len() {
                    row.resize(r.coeffs.len(), 0);
                }
                gf256::axpy(&mut row[..r.coeffs.len()], f, &r.coeffs);
                gf256::axpy(&mut data, f, &r.payload);
            }
        }
        let Some(p) = row.iter().position(|&c| c != 0) else {
            return Vec::new();
        };
        let inv = gf256::inv(row[p]);
        gf256::scale(&mut row, inv);
        gf256::scale(&mut data, inv);
        for r in &mut self.rows {
            if p < r.coeffs.len() && r.coeffs[p] != 0 {
                let f = r.coeffs[p];
                if row.len() > r.coeffs.len() {
                    r.coeffs.resize(row.len(), 0);
                }
                gf256::axpy(&mut r.coeffs[..row.len()], f, &row);
                gf256::axpy(&mut r.payload, f, &data);
            }
        }
        self.rows.push(Row {
            pivot: self.base + p,
            coeffs: row,
            payload: data,
        });
        self.collect_decoded()
    }

    fn collect_decoded(&mut self) -> Vec<usize> {
        let mut out = Vec::new();
        let base = self.base;
        let mut i = 0;
        while i < self.rows.len() {
            let r = &self.rows[i];
            let lone = r
                .coeffs
                .iter()
                .enumerate()
                .all(|(j, &c)| c == 0 || base + j == r.pivot);
            if lone {
                let r = self.rows.swap_remove(i);
                self.decoded[r.pivot] = true;
                self.payloads[r.pivot] = Some(r.payload);
                self.decoded_beyond_front += 1;
                out.push(r.pivot);
            } else {
                i += 1;
            }
        }
        while self.front < self.n_units && self.decoded[self.front] {
            self.front += 1;
            self.decoded_beyond_front -= 1;
        }
        if self.front > self.base {
            let shift = self.front - self.base;
            for r in &mut self.rows {
                r.coeffs.drain(..shift.min(r.coeffs.len()));
            }
            self.base = self.front;
        }
        self.rows.sort_by_key(|r| r.pivot);
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn combine(coeffs: &[u8], units: &[Vec<u8>]) -> Vec<u8> {
        let mut out = vec![0u8; units[0].len()];
        for (c, u) in coeffs.iter().zip(units) {
            gf256::axpy(&mut out, *c, u);
        }
        out
    }

    #[test]
    fn full_window_decodes_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let units: Vec<Vec<u8>> = (0..6).map(|_| (0..16).map(|_| rng.gen()).collect()).collect();
        let mut dec = RlncDecoder::new(6);
        let mut decoded = Vec::new();
        while !dec.is_complete() {
            let coeffs: Vec<u8> = (0..6).map(|_| rng.gen_range(1..=255)).collect();
            decoded.extend(dec.receive(0, &coeffs, &combine(&coeffs, &units)));
        }
        assert_eq!(decoded, (0..6).collect::<Vec<_>>());
        for (i, u) in units.iter().enumerate() {
            assert_eq!(dec.payload(i).unwrap(), u.as_slice());
        }
    }

    #[test]
    fn dependent_row_keeps_rank() {
        let units = vec![vec![1u8, 2], vec![3, 4], vec![5, 6]];
        let mut dec = RlncDecoder::new(3);
        assert!(dec.receive(0, &[1, 1, 1], &combine(&[1, 1, 1], &units)).is_empty());
        assert_eq!(dec.rank(), 1);
        assert!(dec.receive(0, &[2, 2, 2], &combine(&[2, 2, 2], &units)).is_empty());
        assert_eq!(dec.rank(), 1);
        assert_eq!(dec.receive(1, &[1], &units[1]), vec![1]);
        assert_eq!(dec.front(), 0);
        assert_eq!(dec.dof_beyond_front(), 2);
        assert!(dec.receive(0, &[7, 9], &combine(&[7, 9], &units[..2])) == vec![0, 2]);
        assert_eq!(dec.front(), 3);
        assert_eq!(dec.payload(2).unwrap(), &[5, 6]);
    }

    #[test]
    fn known_units_are_substituted() {
        let units = [vec![9u8], vec![4], vec![200]];
        let mut dec = RlncDecoder::new(3);
        assert_eq!(dec.receive(0, &[5], &combine(&[5], &units[..1])), vec![0]);
        assert_eq!(dec.receive(0, &[3, 8], &combine(&[3, 8], &units[..2])), vec![1]);
        assert_eq!(dec.payload(1).unwrap(), &[4]);
        assert!(dec.receive(0, &[1, 1], &combine(&[1, 1], &units[..2])).is_empty());
        assert_eq!(dec.dof_beyond_front(), 0);
    }
}
