//! Deterministic expansion of seeds into streams of field elements.
//!
//! The stream is SHAKE128 over seed || tag. Bits are consumed from each byte
//! least-significant first: GF(2^e) elements take e bits, prime-field elements
//! take ceil(log2 q) bits with rejection until the value is below q. The
//! normative description lives in FORMATS.md.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::{Shake128, Shake128Reader};

use crate::gf::{Fe, FieldSpec};
use crate::matgf::MatGF;
use std::sync::Arc;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SeedError {
    #[error("seed length {got} bytes does not match lambda = {lambda}")]
    LengthMismatch { got: usize, lambda: u32 },
}

/// A lambda-bit seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    bytes: Vec<u8>,
}

impl Seed {
    pub fn new(bytes: Vec<u8>, lambda: u32) -> Result<Self, SeedError> {
        if bytes.len() * 8 != lambda as usize {
            return Err(SeedError::LengthMismatch {
                got: bytes.len(),
                lambda,
            });
        }
        Ok(Seed { bytes })
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        Seed {
            bytes: bytes.to_vec(),
        }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bit_len(&self) -> u32 {
        (self.bytes.len() * 8) as u32
    }
}

/// A deterministic byte/bit stream keyed by (seed, tag).
pub struct PrgStream {
    reader: Shake128Reader,
    /// bits not yet consumed from the current byte, LSB-first
    bit_buf: u32,
    bit_count: u32,
    bytes_emitted: u64,
}

impl PrgStream {
    pub fn init(seed: &Seed, tag: &[u8]) -> Self {
        let mut hasher = Shake128::default();
        hasher.update(seed.bytes());
        hasher.update(tag);
        PrgStream {
            reader: hasher.finalize_xof(),
            bit_buf: 0,
            bit_count: 0,
            bytes_emitted: 0,
        }
    }

    /// Whole bytes, discarding any partially consumed byte first.
    pub fn next_bytes(&mut self, out: &mut [u8]) {
        self.bit_buf = 0;
        self.bit_count = 0;
        self.reader.read(out);
        self.bytes_emitted += out.len() as u64;
    }

    pub fn next_seed(&mut self, lambda: u32) -> Seed {
        let mut bytes = vec![0u8; lambda as usize / 8];
        self.next_bytes(&mut bytes);
        Seed { bytes }
    }

    fn next_bits(&mut self, n: u32) -> u32 {
        debug_assert!(n <= 16);
        while self.bit_count < n {
            let mut b = [0u8; 1];
            self.reader.read(&mut b);
            self.bytes_emitted += 1;
            self.bit_buf |= (b[0] as u32) << self.bit_count;
            self.bit_count += 8;
        }
        let v = self.bit_buf & ((1u32 << n) - 1);
        self.bit_buf >>= n;
        self.bit_count -= n;
        v
    }

    /// A uniform element of f. Power-of-two fields consume exactly e bits;
    /// prime fields rejection-sample ceil(log2 q) bits.
    pub fn next_fe(&mut self, f: &FieldSpec) -> Fe {
        let bits = f.draw_bits();
        loop {
            let v = self.next_bits(bits);
            if v < f.order() {
                return v as Fe;
            }
        }
    }

    /// An m x n matrix filled in column-major order (the vectorization order).
    pub fn next_matrix(&mut self, m: usize, n: usize, f: &Arc<FieldSpec>) -> MatGF {
        let mut mat = MatGF::zero(m, n, f);
        for j in 0..n {
            for i in 0..m {
                let v = self.next_fe(f);
                mat.set(i, j, v);
            }
        }
        mat
    }
}
