//! Arithmetic in GF(q) for q a small prime or q = 2^e with 1 <= e <= 8.
//!
//! Elements are stored as integers in [0, q). For binary extension fields the
//! integer is the coefficient vector of the residue polynomial, least
//! significant coefficient in bit 0. Multiplication and inversion in extension
//! fields go through log/antilog tables; the zero cases are handled with
//! arithmetic masks rather than branches, which is the assurance level this
//! library targets for its constant-time contract (table lookups accepted).

use std::fmt;
use std::sync::Arc;

/// A field element, valid under some [`FieldSpec`].
pub type Fe = u16;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GfError {
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("unsupported field order {0}")]
    UnsupportedField(u64),
    #[error("modulus is reducible over GF(2)")]
    ReducibleModulus,
    #[error("modulus degree {got} does not match extension degree {want}")]
    ModulusDegree { got: u32, want: u32 },
}

/// Description of a supported finite field, with multiplication tables for
/// extension fields built at construction. Immutable and shareable.
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    /// Bitmask of the modulus polynomial, only for e > 1 (e.g. 0x13 for x^4+x+1).
    modulus: u32,
    /// log[a] for a in [1, q); log[0] holds a junk value masked out by callers.
    log: Vec<u16>,
    /// exp table of length 2(q-1) so that log sums need no reduction.
    exp: Vec<u16>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("q", &self.q)
            .field("modulus", &format_args!("{:#x}", self.modulus))
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}
impl Eq for FieldSpec {}

/// Default modulus bitmasks for GF(2^e), 2 <= e <= 8. GF(16) uses x^4 + x + 1.
const DEFAULT_MODULI: [u32; 7] = [0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11B];

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Carry-less multiply then reduce by `modulus` (degree `e`), all over GF(2).
fn clmul_reduce(a: u32, b: u32, modulus: u32, e: u32) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << e) != 0 {
            a ^= modulus;
        }
    }
    acc
}

/// Degree of a GF(2) polynomial bitmask, or 0 for the zero polynomial.
fn poly_deg(p: u32) -> u32 {
    31 - p.leading_zeros()
}

/// Remainder of GF(2) polynomial division.
fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_deg(b);
    while a != 0 && poly_deg(a) >= db {
        a ^= b << (poly_deg(a) - db);
    }
    a
}

fn is_irreducible(modulus: u32, e: u32) -> bool {
    // exhaustive trial division by every polynomial of degree 1..=e/2
    for d in 1..=e / 2 {
        for low in 0..(1u32 << d) {
            let cand = (1 << d) | low;
            if poly_rem(modulus, cand) == 0 {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// GF(p) for a small prime p <= 2^16.
    pub fn prime(p: u32) -> Result<Arc<Self>, GfError> {
        if !is_prime(p) || p > 1 << 16 {
            return Err(GfError::UnsupportedField(p as u64));
        }
        Ok(Arc::new(FieldSpec {
            p,
            e: 1,
            q: p,
            modulus: 0,
            log: Vec::new(),
            exp: Vec::new(),
        }))
    }

    /// GF(2^e) with an explicit modulus bitmask (bit e must be set).
    pub fn binary_ext(e: u32, modulus: u32) -> Result<Arc<Self>, GfError> {
        if e < 1 || e > 8 {
            return Err(GfError::UnsupportedField(1u64 << e));
        }
        if e == 1 {
            return Self::prime(2);
        }
        if poly_deg(modulus) != e {
            return Err(GfError::ModulusDegree {
                got: poly_deg(modulus),
                want: e,
            });
        }
        if !is_irreducible(modulus, e) {
            return Err(GfError::ReducibleModulus);
        }
        let q = 1u32 << e;
        // find a generator and build log/exp tables
        let mut log = vec![0u16; q as usize];
        let mut exp = vec![0u16; 2 * (q as usize - 1)];
        let mut found = false;
        for g in 2..q {
            let mut seen = vec![false; q as usize];
            let mut x = 1u32;
            let mut order = 0u32;
            loop {
                if seen[x as usize] {
                    break;
                }
                seen[x as usize] = true;
                order += 1;
                x = clmul_reduce(x, g, modulus, e);
                if x == 1 {
                    break;
                }
            }
            if order == q - 1 {
                let mut x = 1u32;
                for i in 0..(q - 1) {
                    exp[i as usize] = x as u16;
                    exp[(i + q - 1) as usize] = x as u16;
                    log[x as usize] = i as u16;
                    x = clmul_reduce(x, g, modulus, e);
                }
                found = true;
                break;
            }
        }
        debug_assert!(found, "irreducible modulus must yield a cyclic group");
        Ok(Arc::new(FieldSpec {
            p: 2,
            e,
            q,
            modulus,
            log,
            exp,
        }))
    }

    /// Field of order q with the default modulus (x^4 + x + 1 for GF(16)).
    pub fn of_order(q: u32) -> Result<Arc<Self>, GfError> {
        if q.is_power_of_two() && q > 2 {
            let e = q.trailing_zeros();
            if e > 8 {
                return Err(GfError::UnsupportedField(q as u64));
            }
            Self::binary_ext(e, DEFAULT_MODULI[(e - 2) as usize])
        } else {
            Self::prime(q)
        }
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn extension_degree(&self) -> u32 {
        self.e
    }

    /// Bits per element in the wire encoding: a nibble for q <= 16, a byte
    /// for q <= 256, two bytes for larger prime fields.
    pub fn encoded_bits(&self) -> u32 {
        if self.q <= 16 {
            4
        } else if self.q <= 256 {
            8
        } else {
            16
        }
    }

    /// Bits consumed from a PRG stream per element draw (before rejection).
    pub fn draw_bits(&self) -> u32 {
        if self.p == 2 {
            self.e
        } else {
            32 - (self.q - 1).leading_zeros()
        }
    }

    pub fn is_valid(&self, a: Fe) -> bool {
        (a as u32) < self.q
    }
}

/// 0xFFFF when x != 0, else 0, without a data-dependent branch.
#[inline(always)]
fn nz_mask(x: u16) -> u16 {
    let t = (x as u32) | (x as u32).wrapping_neg();
    ((t >> 31) as u16).wrapping_neg()
}

#[inline]
pub fn fe_add(a: Fe, b: Fe, f: &FieldSpec) -> Fe {
    debug_assert!(f.is_valid(a) && f.is_valid(b));
    if f.p == 2 {
        a ^ b
    } else {
        (((a as u32) + (b as u32)) % f.p) as Fe
    }
}

#[inline]
pub fn fe_neg(a: Fe, f: &FieldSpec) -> Fe {
    debug_assert!(f.is_valid(a));
    if f.p == 2 {
        a
    } else {
        ((f.p - a as u32) % f.p) as Fe
    }
}

#[inline]
pub fn fe_sub(a: Fe, b: Fe, f: &FieldSpec) -> Fe {
    fe_add(a, fe_neg(b, f), f)
}

#[inline]
pub fn fe_mul(a: Fe, b: Fe, f: &FieldSpec) -> Fe {
    debug_assert!(f.is_valid(a) && f.is_valid(b));
    if f.e == 1 {
        (((a as u32) * (b as u32)) % f.p) as Fe
    } else {
        let la = f.log[a as usize] as usize;
        let lb = f.log[b as usize] as usize;
        let prod = f.exp[la + lb];
        prod & nz_mask(a) & nz_mask(b)
    }
}

pub fn fe_inv(a: Fe, f: &FieldSpec) -> Result<Fe, GfError> {
    debug_assert!(f.is_valid(a));
    if a == 0 {
        return Err(GfError::ZeroInverse);
    }
    if f.e == 1 {
        // Fermat: a^(p-2); the exponent is public
        let mut acc = 1u64;
        let mut base = a as u64;
        let mut exp = (f.p - 2) as u64;
        let p = f.p as u64;
        while exp > 0 {
            if exp & 1 != 0 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        Ok(acc as Fe)
    } else {
        let la = f.log[a as usize] as usize;
        Ok(f.exp[(f.q as usize - 1) - la])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_supported_small_fields() -> Vec<Arc<FieldSpec>> {
        [2u32, 3, 4, 5, 7, 8, 11, 13, 16]
            .iter()
            .map(|&q| FieldSpec::of_order(q).unwrap())
            .collect()
    }

    #[test]
    fn gf16_uses_x4_x_1() {
        let f = FieldSpec::of_order(16).unwrap();
        assert_eq!(f.modulus, 0x13);
    }

    #[test]
    fn add_examples() {
        let f16 = FieldSpec::of_order(16).unwrap();
        for a in 0..16 {
            assert_eq!(fe_add(a, a, &f16), 0);
        }
        assert_eq!(fe_add(0x5, 0x3, &f16), 0x6);
        let f3 = FieldSpec::of_order(3).unwrap();
        assert_eq!(fe_add(2, 2, &f3), 1);
    }

    #[test]
    fn mul_examples() {
        let f16 = FieldSpec::of_order(16).unwrap();
        // x * x^3 = x^4 = x + 1
        assert_eq!(fe_mul(0x2, 0x8, &f16), 0x3);
        for f in all_supported_small_fields() {
            for b in 0..f.order() as Fe {
                assert_eq!(fe_mul(1, b, &f), b);
                assert_eq!(fe_mul(0, b, &f), 0);
            }
        }
    }

    #[test]
    fn inv_examples() {
        let f16 = FieldSpec::of_order(16).unwrap();
        assert_eq!(fe_inv(1, &f16).unwrap(), 1);
        assert_eq!(fe_inv(0x2, &f16).unwrap(), 0x9);
        assert_eq!(fe_inv(0, &f16), Err(GfError::ZeroInverse));
        let f3 = FieldSpec::of_order(3).unwrap();
        assert_eq!(fe_inv(2, &f3).unwrap(), 2);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in all_supported_small_fields() {
            let q = f.order() as Fe;
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(fe_add(a, b, &f), fe_add(b, a, &f));
                    assert_eq!(fe_mul(a, b, &f), fe_mul(b, a, &f));
                    assert_eq!(fe_add(a, fe_neg(a, &f), &f), 0);
                    for c in 0..q {
                        assert_eq!(
                            fe_add(fe_add(a, b, &f), c, &f),
                            fe_add(a, fe_add(b, c, &f), &f)
                        );
                        assert_eq!(
                            fe_mul(fe_mul(a, b, &f), c, &f),
                            fe_mul(a, fe_mul(b, c, &f), &f)
                        );
                        assert_eq!(
                            fe_mul(a, fe_add(b, c, &f), &f),
                            fe_add(fe_mul(a, b, &f), fe_mul(a, c, &f), &f)
                        );
                    }
                }
            }
            for a in 1..q {
                let inv = fe_inv(a, &f).unwrap();
                assert_eq!(fe_mul(a, inv, &f), 1);
                assert_eq!(fe_inv(inv, &f).unwrap(), a);
            }
        }
    }

    #[test]
    fn binary_add_is_xor() {
        for q in [2u32, 4, 8, 16] {
            let f = FieldSpec::of_order(q).unwrap();
            for a in 0..q as Fe {
                for b in 0..q as Fe {
                    assert_eq!(fe_add(a, b, &f), a ^ b);
                }
            }
        }
    }

    #[test]
    fn rejects_reducible_modulus() {
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2
        assert_eq!(FieldSpec::binary_ext(4, 0x15).unwrap_err(), GfError::ReducibleModulus);
    }

    #[test]
    fn larger_prime_field() {
        let f = FieldSpec::prime(65521).unwrap();
        assert_eq!(fe_mul(fe_inv(12345, &f).unwrap(), 12345, &f), 1);
        assert_eq!(f.encoded_bits(), 16);
    }
}
