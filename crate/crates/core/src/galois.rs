//! Arithmetic over GF(2^p) for p in 1..=8, backed by exp/log tables.
//!
//! Every matrix entry in this crate is a field element stored as a `u8`
//! value in `[0, q)` with `q = 2^p`. Addition is bitwise XOR (characteristic
//! 2, so subtraction equals addition); multiplication and inversion go
//! through the tables built once per field.

use thiserror::Error;

/// A field element value in `[0, q)`.
pub type FieldElement = u8;

/// Default reduction polynomial per extension degree, as a bitmask with the
/// leading term included (index p-1). All are primitive, so `x` generates
/// the multiplicative group and the exp table enumerates every nonzero
/// element.
///
/// p=1: x+1, p=2: x^2+x+1, p=3: x^3+x+1, p=4: x^4+x+1, p=5: x^5+x^2+1,
/// p=6: x^6+x+1, p=7: x^7+x+1, p=8: x^8+x^4+x^3+x^2+1.
pub const PRIMITIVE_POLYS: [u16; 8] = [
    0b11,
    0b111,
    0b1011,
    0b1_0011,
    0b10_0101,
    0b100_0011,
    0b1000_0011,
    0b1_0001_1101,
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaloisError {
    #[error("extension degree {0} outside supported range 1..=8")]
    DegreeOutOfRange(u32),
}

/// Precomputed arithmetic tables for GF(2^p).
///
/// Immutable after construction; share freely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTable {
    p: u32,
    q: u16,
    primitive_poly: u16,
    exp_table: Vec<u8>,
    log_table: Vec<u8>,
    inv_table: Vec<u8>,
}

/// Builds the GF(2^p) tables for the fixed documented polynomial.
pub fn build_field(p: u32) -> Result<FieldTable, GaloisError> {
    if !(1..=8).contains(&p) {
        return Err(GaloisError::DegreeOutOfRange(p));
    }
    let q = 1u16 << p;
    let poly = PRIMITIVE_POLYS[(p - 1) as usize];

    let order = (q - 1) as usize;
    let mut exp_table = vec![0u8; order];
    let mut log_table = vec![0u8; q as usize];
    let mut elem: u16 = 1;
    for (i, slot) in exp_table.iter_mut().enumerate() {
        *slot = elem as u8;
        log_table[elem as usize] = i as u8;
        // multiply by x and reduce
        elem <<= 1;
        if elem & q != 0 {
            elem ^= poly;
        }
    }
    // primitivity of the fixed polynomials means the cycle closes exactly here
    debug_assert_eq!(elem, 1, "reduction polynomial for p={p} is not primitive");

    let mut inv_table = vec![0u8; q as usize];
    for a in 1..q {
        let l = log_table[a as usize] as usize;
        inv_table[a as usize] = exp_table[(order - l) % order];
    }

    Ok(FieldTable {
        p,
        q,
        primitive_poly: poly,
        exp_table,
        log_table,
        inv_table,
    })
}

impl FieldTable {
    /// Extension degree p.
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Field order q = 2^p.
    pub fn q(&self) -> u16 {
        self.q
    }

    /// Whether this is the binary field GF(2).
    pub fn is_binary(&self) -> bool {
        self.q == 2
    }

    pub fn primitive_poly(&self) -> u16 {
        self.primitive_poly
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        a ^ b
    }

    /// Subtraction; identical to addition in characteristic 2.
    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a == 0 || b == 0 {
            return 0;
        }
        let order = (self.q - 1) as usize;
        let l = self.log_table[a as usize] as usize + self.log_table[b as usize] as usize;
        self.exp_table[l % order]
    }

    /// Multiplicative inverse of a nonzero element, or `None` for zero.
    ///
    /// A zero here always means a singular pivot upstream.
    #[inline]
    pub fn checked_inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a == 0 {
            None
        } else {
            Some(self.inv_table[a as usize])
        }
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: FieldElement) -> FieldElement {
        self.checked_inv(a)
            .expect("inverse of zero: singular pivot")
    }

    #[inline]
    pub fn div(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.mul(a, self.inv(b))
    }

    /// Iterator over the nonzero elements, in exp-table order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.exp_table.iter().copied()
    }
}
