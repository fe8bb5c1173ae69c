//! Table-driven `F_{2^8}` with reduction polynomial `x^8 + x^4 + x^3 + x + 1`
//! (0x11B, the first entry of the degree-8 row in [`super::REDUCTION_POLYS`]).

use std::sync::OnceLock;

struct Tables {
    mul: Vec<[u8; 256]>,
    inv: [u8; 256],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut mul = vec![[0u8; 256]; 256];
        for a in 0..256u32 {
            for b in 0..256u32 {
                mul[a as usize][b as usize] = slow_mul(a as u8, b as u8);
            }
        }
        let mut inv = [0u8; 256];
        for a in 1..256usize {
            inv[a] = (1..256usize).find(|&b| mul[a][b] == 1).unwrap() as u8;
        }
        Tables { mul, inv }
    })
}

fn slow_mul(a: u8, b: u8) -> u8 {
    let mut a = a as u16;
    let mut b = b;
    let mut acc = 0u16;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        a <<= 1;
        if a & 0x100 != 0 {
            a ^= 0x11b;
        }
        b >>= 1;
    }
    acc as u8
}

#[inline]
pub fn mul(a: u8, b: u8) -> u8 {
    tables().mul[a as usize][b as usize]
}

/// Multiplicative inverse. Panics on zero.
#[inline]
pub fn inv(a: u8) -> u8 {
    assert_ne!(a, 0, "inverse of zero in GF(256)");
    tables().inv[a as usize]
}

/// The row of the multiplication table for a fixed factor.
#[inline]
pub fn mul_row(c: u8) -> &'static [u8; 256] {
    &tables().mul[c as usize]
}

/// `dst += c * src`, element-wise.
pub fn axpy(dst: &mut [u8], c: u8, src: &[u8]) {
    debug_assert_eq!(dst.len(), src.len());
    match c {
        0 => {}
        1 => {
            for (d, s) in dst.iter_mut().zip(src) {
                *d ^= *s;
            }
        }
        _ => {
            let row = mul_row(c);
            for (d, s) in dst.iter_mut().zip(src) {
                *d ^= row[*s as usize];
            }
        }
    }
}

/// `buf *= c`, element-wise.
pub fn scale(buf: &mut [u8], c: u8) {
    if c == 1 {
        return;
    }
    let row = mul_row(c);
    for b in buf.iter_mut() {
        *b = row[*b as usize];
    }
}
