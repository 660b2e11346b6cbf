//! MinRank key generation with compressed public keys.
//!
//! The library provides:
//! - finite-field and matrix arithmetic over GF(q) ([`gf`], [`matgf`]),
//! - seeded deterministic expansion ([`prg`]),
//! - the three key-generation strategies and their decompression ([`keygen`]),
//! - canonical-form reduction of MinRank instances ([`canonical`]),
//! - counting formulas, probability bounds, and the Monte Carlo harness that
//!   checks them ([`stats`]).

pub mod canonical;
pub mod gf;
pub mod keygen;
pub mod matgf;
pub mod prg;
pub mod stats;
