//! Symmetric primitives shared by both protocol variants.
//!
//! Hash is SHA-1, the MAC is HMAC-SHA1 truncated to 128 bits and the
//! cipher is AES-128 in CBC mode with an all-zero IV. Every auth-chain key
//! encrypts exactly one broadcast per cycle, so the fixed IV is never
//! reused under the same key.

mod group;

pub use group::{Backend, DhKeyPair, GroupParams, PrivateScalar};

use alloc::vec::Vec;
use core::fmt;

use aes::cipher::{generic_array::GenericArray, BlockDecrypt, BlockEncrypt, KeyInit};
use aes::Aes128;
use hmac::{Hmac, Mac};
use sha1::{Digest as _, Sha1};

use crate::NodeId;

/// Output length of the hash in octets.
pub const DIGEST_LEN: usize = 20;
/// Length of every symmetric key and MAC tag in octets.
pub const KEY_LEN: usize = 16;
/// Length of a truncated MAC tag.
pub const TAG_LEN: usize = 16;
/// Cipher block size.
pub const BLOCK_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CryptoError {
    InvalidLength { requested: usize },
    MalformedCiphertext { len: usize },
    InvalidPoint,
    InvalidScalar,
    InvalidGroup,
}

impl fmt::Display for CryptoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CryptoError::InvalidLength { requested } => {
                write!(f, "key chain length must be at least 1 (got {requested})")
            }
            CryptoError::MalformedCiphertext { len } => {
                write!(f, "ciphertext length {len} is not a positive multiple of {BLOCK_LEN}")
            }
            CryptoError::InvalidPoint => f.write_str("peer public element is not a valid group element"),
            CryptoError::InvalidScalar => f.write_str("private scalar out of range"),
            CryptoError::InvalidGroup => f.write_str("invalid group parameters"),
        }
    }
}

impl core::error::Error for CryptoError {}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Digest(pub [u8; DIGEST_LEN]);

impl Digest {
    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Digest(")?;
        write_hex(f, &self.0)?;
        f.write_str(")")
    }
}

/// 128-bit key material: auth-chain keys, signature-chain keys and pairwise keys.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymKey(pub [u8; KEY_LEN]);

impl SymKey {
    pub fn as_bytes(&self) -> &[u8; KEY_LEN] {
        &self.0
    }

    pub fn random<R: rand_core::RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut k = [0u8; KEY_LEN];
        rng.fill_bytes(&mut k);
        SymKey(k)
    }

    fn from_prefix(bytes: &[u8]) -> Self {
        let mut k = [0u8; KEY_LEN];
        k.copy_from_slice(&bytes[..KEY_LEN]);
        SymKey(k)
    }
}

impl fmt::Debug for SymKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SymKey(")?;
        write_hex(f, &self.0)?;
        f.write_str(")")
    }
}

pub type Tag = [u8; TAG_LEN];

fn write_hex(f: &mut fmt::Formatter<'_>, bytes: &[u8]) -> fmt::Result {
    for b in bytes {
        write!(f, "{b:02x}")?;
    }
    Ok(())
}

pub fn hash(message: &[u8]) -> Digest {
    Digest(Sha1::digest(message).into())
}

/// One step down a key chain: the first 16 octets of `hash(k)`.
pub fn derive_link(k: &SymKey) -> SymKey {
    SymKey::from_prefix(&hash(&k.0).0)
}

/// A one-way key chain. `links[n]` is the seed and `links[0]` the public
/// commitment; keys are disclosed from index 1 upwards.
#[derive(Clone, PartialEq, Eq)]
pub struct KeyChain {
    links: Vec<SymKey>,
}

impl KeyChain {
    /// Number of usable cycles.
    pub fn len(&self) -> usize {
        self.links.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn commitment(&self) -> SymKey {
        self.links[0]
    }

    pub fn link(&self, i: usize) -> Option<SymKey> {
        self.links.get(i).copied()
    }

    pub fn links(&self) -> &[SymKey] {
        &self.links
    }

    /// Checks `derive_link(links[i]) == links[i-1]` for every `i`.
    pub fn verify(&self) -> bool {
        self.links.windows(2).all(|w| derive_link(&w[1]) == w[0])
    }
}

impl fmt::Debug for KeyChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyChain").field("len", &self.len()).finish_non_exhaustive()
    }
}

pub fn gen_chain(seed: SymKey, n: usize) -> Result<KeyChain, CryptoError> {
    if n == 0 {
        return Err(CryptoError::InvalidLength { requested: n });
    }
    let mut links = alloc::vec![SymKey::default(); n + 1];
    links[n] = seed;
    for i in (1..=n).rev() {
        links[i - 1] = derive_link(&links[i]);
    }
    Ok(KeyChain { links })
}

/// Walks `key` down the chain `steps` times and compares with `anchor`.
pub fn chain_reaches(key: &SymKey, steps: usize, anchor: &SymKey) -> bool {
    let mut k = *key;
    for _ in 0..steps {
        k = derive_link(&k);
    }
    k == *anchor
}

type HmacSha1 = Hmac<Sha1>;

pub fn mac(key: &SymKey, message: &[u8]) -> Tag {
    mac_parts(key, &[message])
}

pub(crate) fn mac_parts(key: &SymKey, parts: &[&[u8]]) -> Tag {
    let mut m = <HmacSha1 as Mac>::new_from_slice(&key.0).expect("hmac accepts any key length");
    for p in parts {
        m.update(p);
    }
    let full = m.finalize().into_bytes();
    let mut tag = [0u8; TAG_LEN];
    tag.copy_from_slice(&full[..TAG_LEN]);
    tag
}

/// AES-128-CBC, zero IV. `plaintext` must already be block aligned.
pub fn encrypt(key: &SymKey, plaintext: &[u8]) -> Result<Vec<u8>, CryptoError> {
    if plaintext.is_empty() || !plaintext.len().is_multiple_of(BLOCK_LEN) {
        return Err(CryptoError::MalformedCiphertext { len: plaintext.len() });
    }
    let cipher = Aes128::new(GenericArray::from_slice(&key.0));
    let mut out = plaintext.to_vec();
    let mut prev = [0u8; BLOCK_LEN];
    for block in out.chunks_exact_mut(BLOCK_LEN) {
        for (b, p) in block.iter_mut().zip(prev.iter()) {
            *b ^= p;
        }
        cipher.encrypt_block(GenericArray::from_mut_slice(block));
        prev.copy_from_slice(block);
    }
    Ok(out)
}

pub fn decrypt(key: &SymKey, ciphertext: &[u8]) -> Result<Vec<u8>, CryptoError> {
    if ciphertext.is_empty() || !ciphertext.len().is_multiple_of(BLOCK_LEN) {
        return Err(CryptoError::MalformedCiphertext { len: ciphertext.len() });
    }
    let cipher = Aes128::new(GenericArray::from_slice(&key.0));
    let mut out = ciphertext.to_vec();
    let mut prev = [0u8; BLOCK_LEN];
    for block in out.chunks_exact_mut(BLOCK_LEN) {
        let mut this = [0u8; BLOCK_LEN];
        this.copy_from_slice(block);
        cipher.decrypt_block(GenericArray::from_mut_slice(block));
        for (b, p) in block.iter_mut().zip(prev.iter()) {
            *b ^= p;
        }
        prev = this;
    }
    Ok(out)
}

/// Pairwise key: first 16 octets of `hash(shared || cycle_be16)`.
pub fn kdf_pairwise(shared: &[u8], cycle: u16) -> SymKey {
    let mut h = Sha1::new();
    h.update(shared);
    h.update(cycle.to_be_bytes());
    SymKey::from_prefix(&h.finalize())
}

/// Key-confirmation tag sent from `from` to `to` once the pairwise key exists.
pub fn ack_token(k_ab: &SymKey, from: NodeId, to: NodeId) -> Tag {
    mac_parts(k_ab, &[b"ACK", &from.0.to_be_bytes(), &to.0.to_be_bytes()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unhex(s: &str) -> Vec<u8> {
        (0..s.len()).step_by(2).map(|i| u8::from_str_radix(&s[i..i + 2], 16).unwrap()).collect()
    }

    // Known-answer values below were produced with Python's hashlib/hmac and
    // the `cryptography` package, independently of this crate.
    #[test]
    fn sha1_known_answers() {
        assert_eq!(hash(b"").0.to_vec(), unhex("da39a3ee5e6b4b0d3255bfef95601890afd80709"));
        assert_eq!(hash(b"abc").0.to_vec(), unhex("a9993e364706816aba3e25717850c26c9cd0d89d"));
    }

    #[test]
    fn derive_link_of_zero_key() {
        let k = derive_link(&SymKey([0; 16]));
        assert_eq!(k.0.to_vec(), unhex("e129f27c5103bc5cc44bcdf0a15e160d"));
    }

    #[test]
    fn hmac_known_answer() {
        assert_eq!(mac(&SymKey([0; 16]), b"P_u").to_vec(), unhex("6c780c3ef340ecbd94d1e4169fb27021"));
    }

    #[test]
    fn aes_known_answer_block() {
        let ct = encrypt(&SymKey([0; 16]), &[0u8; 16]).unwrap();
        assert_eq!(ct, unhex("66e94bd4ef8a2c3b884cfa59ca342b2e"));
    }

    #[test]
    fn gen_chain_rejects_zero_length() {
        assert_eq!(gen_chain(SymKey([1; 16]), 0), Err(CryptoError::InvalidLength { requested: 0 }));
    }

    #[test]
    fn chain_of_one() {
        let c = gen_chain(SymKey([9; 16]), 1).unwrap();
        assert_eq!(c.links().len(), 2);
        assert_eq!(derive_link(&c.links()[1]), c.links()[0]);
    }

    #[test]
    fn chain_commitment_matches_iterated_hash() {
        let seed = SymKey([0x5a; 16]);
        let c = gen_chain(seed, 50).unwrap();
        assert!(c.verify());
        let mut k = seed;
        for _ in 0..50 {
            k = derive_link(&k);
        }
        assert_eq!(c.commitment(), k);
        assert!(chain_reaches(&c.link(50).unwrap(), 50, &c.commitment()));
    }

    #[test]
    fn chain_bit_flips_never_survive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = gen_chain(SymKey::random(&mut rng), 64).unwrap();
        let mut survived = 0;
        for trial in 0..10_000 {
            let i = 1 + (rng.next_u32() as usize % 64);
            let bit = trial % 128;
            let mut k = c.link(i).unwrap();
            k.0[bit / 8] ^= 1 << (bit % 8);
            if derive_link(&k) == c.link(i - 1).unwrap() {
                survived += 1;
            }
        }
        assert_eq!(survived, 0);
    }

    #[test]
    fn mac_differs_across_keys() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let msg = b"public parameter";
        for _ in 0..1000 {
            let a = SymKey::random(&mut rng);
            let b = SymKey::random(&mut rng);
            assert_ne!(mac(&a, msg), mac(&b, msg));
        }
    }

    #[test]
    fn cipher_round_trip_and_block_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let k = SymKey::random(&mut rng);
            let blocks = 1 + (rng.next_u32() as usize % 5);
            let mut p = alloc::vec![0u8; blocks * BLOCK_LEN];
            rng.fill_bytes(&mut p);
            let c = encrypt(&k, &p).unwrap();
            assert_eq!(decrypt(&k, &c).unwrap(), p);
        }
        assert_eq!(decrypt(&SymKey([0; 16]), &[0u8; 17]), Err(CryptoError::MalformedCiphertext { len: 17 }));
        assert!(decrypt(&SymKey([0; 16]), &[]).is_err());
    }

    #[test]
    fn kdf_is_deterministic_and_cycle_bound() {
        let shared = [7u8; 20];
        assert_eq!(kdf_pairwise(&shared, 3), kdf_pairwise(&shared, 3));
        let mut seen = alloc::collections::BTreeSet::new();
        for i in 0..1024u16 {
            assert!(seen.insert(kdf_pairwise(&shared, i)));
        }
    }

    #[test]
    fn ack_token_binds_key_and_direction() {
        let k = SymKey([3; 16]);
        let (a, b) = (NodeId(1), NodeId(2));
        let t = ack_token(&k, a, b);
        assert_eq!(t, ack_token(&k, a, b));
        assert_ne!(t, ack_token(&k, b, a));
        for bit in 0..128 {
            let mut k2 = k;
            k2.0[bit / 8] ^= 1 << (bit % 8);
            assert_ne!(t, ack_token(&k2, a, b));
        }
    }
}
