//! Binary digits of π from the Bailey–Borwein–Plouffe hex-digit formula.

use std::sync::OnceLock;

/// First 256 fractional bits of π (hex 243F6A88…), used to check the
/// digit-extraction routine before its output is trusted.
pub const PI_FRACTION_256: [u8; 32] = [
    0x24, 0x3F, 0x6A, 0x88, 0x85, 0xA3, 0x08, 0xD3, 0x13, 0x19, 0x8A, 0x2E, 0x03, 0x70, 0x73, 0x44,
    0xA4, 0x09, 0x38, 0x22, 0x29, 0x9F, 0x31, 0xD0, 0x08, 0x2E, 0xFA, 0x98, 0xEC, 0x4E, 0x6C, 0x89,
];

/// Hex digit of π at fractional position `pos` (0 is the first digit after
/// the point).
pub fn pi_hex_digit(pos: u64) -> u8 {
    let s = 4.0 * series(1, pos) - 2.0 * series(4, pos) - series(5, pos) - series(6, pos);
    let frac = s - s.floor();
    ((16.0 * frac).floor() as u8).min(15)
}

/// `frac(Σ_k 16^{pos−k} / (8k + j))`
fn series(j: u64, pos: u64) -> f64 {
    let mut s = 0.0;
    for k in 0..=pos {
        let denom = 8 * k + j;
        let term = pow_mod(16, pos - k, denom) as f64 / denom as f64;
        s += term;
        s -= s.floor();
    }
    let mut k = pos + 1;
    loop {
        let term = 16f64.powi(-((k - pos) as i32)) / (8 * k + j) as f64;
        if term < 1e-17 {
            break;
        }
        s += term;
        k += 1;
    }
    s - s.floor()
}

fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut result: u128 = 1;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    result as u64
}

fn verified() -> bool {
    static CHECK: OnceLock<bool> = OnceLock::new();
    *CHECK.get_or_init(|| {
        PI_FRACTION_256.iter().enumerate().all(|(i, byte)| {
            let hi = pi_hex_digit(2 * i as u64);
            let lo = pi_hex_digit(2 * i as u64 + 1);
            (hi << 4 | lo) == *byte
        })
    })
}

/// The first `count` fractional binary digits of π, most significant first.
///
/// Panics if the digit routine disagrees with [`PI_FRACTION_256`].
pub fn pi_fraction_bits(count: usize) -> Vec<bool> {
    assert!(
        verified(),
        "BBP digit extraction disagrees with the π reference constant"
    );
    let mut bits = Vec::with_capacity(count);
    let mut pos = 0u64;
    while bits.len() < count {
        let digit = if pos < 64 {
            let byte = PI_FRACTION_256[(pos / 2) as usize];
            if pos.is_multiple_of(2) {
                byte >> 4
            } else {
                byte & 0xF
            }
        } else {
            pi_hex_digit(pos)
        };
        for shift in (0..4).rev() {
            if bits.len() < count {
                bits.push(digit >> shift & 1 == 1);
            }
        }
        pos += 1;
    }
    bits
}
