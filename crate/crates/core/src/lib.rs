//! Broadcast-authenticated key establishment for wireless sensor networks.
//!
//! A base station (the [`trust_center`]) provisions every node with an ECDH
//! key pair and one one-time signature per cycle, `MAC_{K_DS,i}(public)`.
//! Each cycle the base station broadcasts `K_DS,i` encrypted under the
//! auth-chain key `K_Auth,i` and discloses `K_Auth,i` after a fixed delay.
//! Neighbours exchange tickets, authenticate them once the signature key is
//! known and derive a pairwise key from their Diffie-Hellman shares.
//!
//! Two variants are implemented:
//!
//! * [`Variant::Ba`] buffers every broadcast until the auth key is disclosed,
//!   which lets an attacker fill node memory and trigger network-wide
//!   re-broadcasts of garbage.
//! * [`Variant::Iba`] appends to each broadcast the hash of the next cycle's
//!   first part, so a node can check a broadcast the moment it arrives and
//!   drop forgeries before buffering or relaying them.
//!
//! The crate is `no_std` (with `alloc`). Simulation, file formats and the
//! command-line tooling live in the companion `wsnkm` crate.

#![no_std]
// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytics;
pub mod codec;
pub mod crypto;
pub mod energy;
pub mod protocol;
pub mod trust_center;

use core::fmt;

/// Two-octet node identifier.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeId(pub u16);

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which protocol a deployment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Variant {
    /// Delayed authentication: broadcasts are buffered until key disclosure.
    Ba,
    /// Immediate authentication through the hash anchor.
    Iba,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Ba => "BA",
            Variant::Iba => "iBA",
        })
    }
}

impl core::str::FromStr for Variant {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ba" | "basic" => Ok(Variant::Ba),
            "iba" | "i-ba" => Ok(Variant::Iba),
            _ => Err(UnknownName),
        }
    }
}

/// Returned by `FromStr` impls in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknownName;

impl fmt::Display for UnknownName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown name")
    }
}

impl core::error::Error for UnknownName {}
