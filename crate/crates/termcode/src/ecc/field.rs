//! Finite-field arithmetic for code-family evaluation.
//!
//! Supports prime fields GF(p) and binary extension fields GF(2^m) for
//! m <= 16. Elements are represented as integers below the field order;
//! the evaluation points used by the code family are simply 0, 1, 2, ...

use serde::{Deserialize, Serialize};

/// Fixed irreducible polynomials over GF(2), index m-1 for GF(2^m).
/// Bit m is the leading term, so reduction is a single conditional xor.
const IRREDUCIBLE: [u32; 16] = [
    0b11,      // m=1:  x + 1
    0b111,     // m=2:  x^2 + x + 1
    0b1011,    // m=3:  x^3 + x + 1
    0b10011,   // m=4:  x^4 + x + 1
    0b100101,  // m=5:  x^5 + x^2 + 1
    0b1000011, // m=6:  x^6 + x + 1
    0x89,      // m=7:  x^7 + x^3 + 1
    0x11b,     // m=8:  x^8 + x^4 + x^3 + x + 1
    0x211,     // m=9:  x^9 + x^4 + 1
    0x409,     // m=10: x^10 + x^3 + 1
    0x805,     // m=11: x^11 + x^2 + 1
    0x1053,    // m=12: x^12 + x^6 + x^4 + x + 1
    0x201b,    // m=13: x^13 + x^4 + x^3 + x + 1
    0x4443,    // m=14: x^14 + x^10 + x^6 + x + 1
    0x8003,    // m=15: x^15 + x + 1
    0x1100b,   // m=16: x^16 + x^12 + x^3 + x + 1
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum FieldKind {
    Prime,
    Binary { bits: u32, poly: u32 },
}

/// A finite field of order `q`, where `q` is prime or a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Field {
    order: u32,
    kind: FieldKind,
}

impl Field {
    /// Builds the field of the given order. `q` must be prime or 2^m with
    /// 1 <= m <= 16; other orders are not supported.
    pub fn new(q: u32) -> Option<Field> {
        if q >= 2 && q.is_power_of_two() {
            let bits = q.trailing_zeros();
            if bits as usize > IRREDUCIBLE.len() {
                return None;
            }
            return Some(Field {
                order: q,
                kind: FieldKind::Binary {
                    bits,
                    poly: IRREDUCIBLE[bits as usize - 1],
                },
            });
        }
        if is_prime(q) {
            return Some(Field {
                order: q,
                kind: FieldKind::Prime,
            });
        }
        None
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        match self.kind {
            FieldKind::Prime => ((a as u64 + b as u64) % self.order as u64) as u32,
            FieldKind::Binary { .. } => a ^ b,
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match self.kind {
            FieldKind::Prime => ((a as u64 * b as u64) % self.order as u64) as u32,
            FieldKind::Binary { bits, poly } => {
                let (mut acc, mut a, mut b) = (0u32, a, b);
                while b != 0 {
                    if b & 1 != 0 {
                        acc ^= a;
                    }
                    b >>= 1;
                    a <<= 1;
                    if (a >> bits) & 1 != 0 {
                        a ^= poly;
                    }
                }
                acc
            }
        }
    }

    /// Evaluates the polynomial with the given coefficients (constant term
    /// first) at `point`, by Horner's rule.
    pub fn eval(&self, coeffs: &[u32], point: u32) -> u32 {
        let mut acc = 0u32;
        for &c in coeffs.iter().rev() {
            acc = self.add(self.mul(acc, point), c);
        }
        acc
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime >= n (n <= 65521, the largest 16-bit prime).
pub fn next_prime(n: u32) -> Option<u32> {
    let mut c = n.max(2);
    while c <= 65521 {
        if is_prime(c) {
            return Some(c);
        }
        c += 1;
    }
    None
}
