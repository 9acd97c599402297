//! Wire layouts.
//!
//! Field widths: 10-bit cycle counter, 14-bit inter-cycle gap (whole
//! seconds), 128-bit keys and tags, 2-octet node ids. The counter and gap
//! share three octets, big-endian, counter in the top 10 bits.
//!
//! Encrypted plaintexts are zero padded to two cipher blocks and always
//! start with the counter, so scrambling either ciphertext block is caught by
//! the counter or the padding check on decryption:
//!
//! ```text
//! BA broadcast         : [i|delta (3)] [K_DS (16)] [0 x13]
//! iBA part 1           : [i|delta (3)] [K_DS (16)] [i (2)] [0 x11]
//! iBA part 2           : [i (2)] [mu (20)] [0 x10]
//! ```
//!
//! Radio framing: 32-octet payload fragments behind a 9-octet header.

use alloc::vec::Vec;
use core::fmt;

use crate::crypto::{self, Digest, SymKey, DIGEST_LEN, KEY_LEN, TAG_LEN};

pub const NODE_ID_LEN: usize = 2;
pub const CYCLE_LEN: usize = 2;
pub const MAX_CYCLE: u16 = (1 << 10) - 1;
pub const MAX_DELTA: u32 = (1 << 14) - 1;
pub const COUNTER_DELTA_LEN: usize = 3;

/// One encrypted part (two cipher blocks).
pub const SEALED_LEN: usize = 32;
pub const BA_MESSAGE_LEN: usize = SEALED_LEN;
pub const IBA_MESSAGE_LEN: usize = 2 * SEALED_LEN + CYCLE_LEN;
pub const DISCLOSURE_LEN: usize = CYCLE_LEN + KEY_LEN;
pub const ACK_LEN: usize = 2 * NODE_ID_LEN + CYCLE_LEN + TAG_LEN;

pub const PAYLOAD_LEN: usize = 32;
pub const HEADER_LEN: usize = 9;
pub const PACKET_LEN: usize = PAYLOAD_LEN + HEADER_LEN;

/// Ticket: sender id, cycle, public element, signature.
pub const fn ticket_len(public_len: usize) -> usize {
    NODE_ID_LEN + CYCLE_LEN + public_len + TAG_LEN
}

/// Number of radio packets needed for `len` payload octets (at least one).
pub const fn fragment_count(len: usize) -> usize {
    if len == 0 {
        1
    } else {
        len.div_ceil(PAYLOAD_LEN)
    }
}

/// Octets on the air for a message of `len` payload octets, headers included.
pub const fn on_air_len(len: usize) -> usize {
    len + HEADER_LEN * fragment_count(len)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodecError {
    CycleOutOfRange(u32),
    DeltaOutOfRange(u32),
    Length { expected: usize, found: usize },
    BadMagic,
    UnsupportedVersion(u8),
    UnknownBackend(u8),
    InvalidField(&'static str),
}

impl fmt::Display for CodecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodecError::CycleOutOfRange(i) => write!(f, "cycle {i} does not fit in 10 bits"),
            CodecError::DeltaOutOfRange(d) => write!(f, "cycle gap {d} s does not fit in 14 bits"),
            CodecError::Length { expected, found } => {
                write!(f, "expected {expected} octets, found {found}")
            }
            CodecError::BadMagic => f.write_str("bad magic"),
            CodecError::UnsupportedVersion(v) => write!(f, "unsupported version {v}"),
            CodecError::UnknownBackend(b) => write!(f, "unknown group backend tag {b}"),
            CodecError::InvalidField(name) => write!(f, "invalid field `{name}`"),
        }
    }
}

impl core::error::Error for CodecError {}

pub fn check_cycle(i: u32) -> Result<u16, CodecError> {
    if i > MAX_CYCLE as u32 {
        return Err(CodecError::CycleOutOfRange(i));
    }
    Ok(i as u16)
}

pub fn pack_counter_delta(cycle: u16, delta: u32) -> Result<[u8; COUNTER_DELTA_LEN], CodecError> {
    check_cycle(cycle as u32)?;
    if delta > MAX_DELTA {
        return Err(CodecError::DeltaOutOfRange(delta));
    }
    let word = ((cycle as u32) << 14) | delta;
    Ok([(word >> 16) as u8, (word >> 8) as u8, word as u8])
}

pub fn unpack_counter_delta(b: [u8; COUNTER_DELTA_LEN]) -> (u16, u16) {
    let word = ((b[0] as u32) << 16) | ((b[1] as u32) << 8) | b[2] as u32;
    ((word >> 14) as u16, (word & MAX_DELTA) as u16)
}

pub fn put_cycle(out: &mut Vec<u8>, cycle: u16) {
    out.extend_from_slice(&cycle.to_be_bytes());
}

/// Reads a 10-bit counter stored in two octets; the top six bits must be zero.
pub fn read_cycle(b: &[u8]) -> Result<u16, CodecError> {
    let v = u16::from_be_bytes([b[0], b[1]]);
    check_cycle(v as u32)
}

/// Contents of a BA broadcast or of iBA part 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyRelease {
    pub k_ds: SymKey,
    pub cycle: u16,
    /// Seconds since the previous cycle start.
    pub delta: u16,
}

/// Why a sealed part failed to open under a given auth key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpenError {
    /// The embedded counter is not the expected cycle.
    CounterMismatch { found: u16, expected: u16 },
    /// Padding or reserved bits are non-zero.
    Malformed,
}

impl fmt::Display for OpenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpenError::CounterMismatch { found, expected } => {
                write!(f, "embedded counter {found} != expected {expected}")
            }
            OpenError::Malformed => f.write_str("malformed plaintext"),
        }
    }
}

fn seal(key: &SymKey, plain: &[u8; SEALED_LEN]) -> [u8; SEALED_LEN] {
    let ct = crypto::encrypt(key, plain).expect("block aligned");
    let mut out = [0u8; SEALED_LEN];
    out.copy_from_slice(&ct);
    out
}

fn unseal(key: &SymKey, sealed: &[u8; SEALED_LEN]) -> [u8; SEALED_LEN] {
    let pt = crypto::decrypt(key, sealed).expect("block aligned");
    let mut out = [0u8; SEALED_LEN];
    out.copy_from_slice(&pt);
    out
}

fn release_prefix(r: &KeyRelease, buf: &mut [u8; SEALED_LEN]) -> Result<(), CodecError> {
    buf[..3].copy_from_slice(&pack_counter_delta(r.cycle, r.delta as u32)?);
    buf[3..19].copy_from_slice(&r.k_ds.0);
    Ok(())
}

fn read_release(pt: &[u8; SEALED_LEN], expected: u16) -> Result<KeyRelease, OpenError> {
    let (cycle, delta) = unpack_counter_delta([pt[0], pt[1], pt[2]]);
    if cycle != expected {
        return Err(OpenError::CounterMismatch { found: cycle, expected });
    }
    let mut k = [0u8; KEY_LEN];
    k.copy_from_slice(&pt[3..19]);
    Ok(KeyRelease { k_ds: SymKey(k), cycle, delta })
}

pub fn seal_ba(k_auth: &SymKey, r: &KeyRelease) -> Result<[u8; SEALED_LEN], CodecError> {
    let mut buf = [0u8; SEALED_LEN];
    release_prefix(r, &mut buf)?;
    Ok(seal(k_auth, &buf))
}

pub fn open_ba(k_auth: &SymKey, sealed: &[u8; SEALED_LEN], expected: u16) -> Result<KeyRelease, OpenError> {
    let pt = unseal(k_auth, sealed);
    let release = read_release(&pt, expected)?;
    if pt[19..].iter().any(|&b| b != 0) {
        return Err(OpenError::Malformed);
    }
    Ok(release)
}

pub fn seal_part1(k_auth: &SymKey, r: &KeyRelease) -> Result<[u8; SEALED_LEN], CodecError> {
    let mut buf = [0u8; SEALED_LEN];
    release_prefix(r, &mut buf)?;
    buf[19..21].copy_from_slice(&r.cycle.to_be_bytes());
    Ok(seal(k_auth, &buf))
}

pub fn open_part1(k_auth: &SymKey, sealed: &[u8; SEALED_LEN], expected: u16) -> Result<KeyRelease, OpenError> {
    let pt = unseal(k_auth, sealed);
    let release = read_release(&pt, expected)?;
    let trailer = u16::from_be_bytes([pt[19], pt[20]]);
    if trailer != expected {
        return Err(OpenError::CounterMismatch { found: trailer, expected });
    }
    if pt[21..].iter().any(|&b| b != 0) {
        return Err(OpenError::Malformed);
    }
    Ok(release)
}

pub fn seal_part2(k_auth: &SymKey, mu: &Digest, cycle: u16) -> Result<[u8; SEALED_LEN], CodecError> {
    check_cycle(cycle as u32)?;
    let mut buf = [0u8; SEALED_LEN];
    buf[..2].copy_from_slice(&cycle.to_be_bytes());
    buf[2..2 + DIGEST_LEN].copy_from_slice(&mu.0);
    Ok(seal(k_auth, &buf))
}

pub fn open_part2(k_auth: &SymKey, sealed: &[u8; SEALED_LEN], expected: u16) -> Result<Digest, OpenError> {
    let pt = unseal(k_auth, sealed);
    let found = u16::from_be_bytes([pt[0], pt[1]]);
    if found != expected {
        return Err(OpenError::CounterMismatch { found, expected });
    }
    if pt[2 + DIGEST_LEN..].iter().any(|&b| b != 0) {
        return Err(OpenError::Malformed);
    }
    let mut mu = [0u8; DIGEST_LEN];
    mu.copy_from_slice(&pt[2..2 + DIGEST_LEN]);
    Ok(Digest(mu))
}

/// Cursor over a byte slice used by the `from_bytes` impls.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.pos + n > self.buf.len() {
            return Err(CodecError::Length { expected: self.pos + n, found: self.buf.len() });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn array<const N: usize>(&mut self) -> Result<[u8; N], CodecError> {
        let mut a = [0u8; N];
        a.copy_from_slice(self.take(N)?);
        Ok(a)
    }

    pub(crate) fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16, CodecError> {
        Ok(u16::from_be_bytes(self.array()?))
    }

    pub(crate) fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_be_bytes(self.array()?))
    }

    pub(crate) fn finish(&self) -> Result<(), CodecError> {
        if self.pos != self.buf.len() {
            return Err(CodecError::Length { expected: self.pos, found: self.buf.len() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_delta_boundaries() {
        let packed = pack_counter_delta(MAX_CYCLE, MAX_DELTA).unwrap();
        assert_eq!(unpack_counter_delta(packed), (MAX_CYCLE, MAX_DELTA as u16));
        assert_eq!(pack_counter_delta(1, 1 << 14), Err(CodecError::DeltaOutOfRange(1 << 14)));
        assert_eq!(pack_counter_delta(1024, 5), Err(CodecError::CycleOutOfRange(1024)));
        // Counter occupies the top ten bits.
        assert_eq!(pack_counter_delta(1, 0).unwrap(), [0x00, 0x40, 0x00]);
        assert_eq!(pack_counter_delta(0, 1).unwrap(), [0x00, 0x00, 0x01]);
    }

    #[test]
    fn framing_sizes() {
        assert_eq!(PACKET_LEN, 41);
        assert_eq!(fragment_count(32), 1);
        assert_eq!(fragment_count(33), 2);
        assert_eq!(fragment_count(0), 1);
        assert_eq!(on_air_len(BA_MESSAGE_LEN), 41);
        assert_eq!(on_air_len(IBA_MESSAGE_LEN), 93);
        assert_eq!(ticket_len(21), 41);
    }

    #[test]
    fn sealed_parts_round_trip() {
        let k = SymKey([4; 16]);
        let r = KeyRelease { k_ds: SymKey([9; 16]), cycle: 7, delta: 600 };
        assert_eq!(open_ba(&k, &seal_ba(&k, &r).unwrap(), 7), Ok(r));
        assert_eq!(open_part1(&k, &seal_part1(&k, &r).unwrap(), 7), Ok(r));
        let mu = crypto::hash(b"next");
        assert_eq!(open_part2(&k, &seal_part2(&k, &mu, 7).unwrap(), 7), Ok(mu));
        assert_eq!(
            open_part2(&k, &seal_part2(&k, &mu, 7).unwrap(), 8),
            Err(OpenError::CounterMismatch { found: 7, expected: 8 })
        );
    }

    #[test]
    fn every_single_bit_tamper_of_part2_is_detected() {
        let k = SymKey([1; 16]);
        let mu = crypto::hash(b"anchor");
        let sealed = seal_part2(&k, &mu, 12).unwrap();
        for bit in 0..SEALED_LEN * 8 {
            let mut t = sealed;
            t[bit / 8] ^= 1 << (bit % 8);
            assert!(open_part2(&k, &t, 12).is_err(), "bit {bit} slipped through");
        }
    }

    #[test]
    fn wrong_key_garbles_counter() {
        let r = KeyRelease { k_ds: SymKey([2; 16]), cycle: 3, delta: 100 };
        let sealed = seal_part1(&SymKey([1; 16]), &r).unwrap();
        assert!(open_part1(&SymKey([5; 16]), &sealed, 3).is_err());
    }
}
