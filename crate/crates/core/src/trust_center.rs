//! Base-station side: key chains, node provisioning and per-cycle broadcasts.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::codec::{self, CodecError, KeyRelease, Reader, SEALED_LEN};
use crate::crypto::{self, CryptoError, Digest, DhKeyPair, GroupParams, KeyChain, PrivateScalar, SymKey, Tag};
use crate::{NodeId, Variant};

#[derive(Debug, Clone, PartialEq)]
pub enum TrustCenterError {
    Crypto(CryptoError),
    Codec(CodecError),
    /// Schedule must hold `n + 1` strictly increasing times with every gap
    /// larger than the disclosure delay and representable in 14 bits.
    InvalidSchedule,
    InsufficientChain { requested: usize, available: usize },
    ChainExhausted { cycle: u16 },
    TooEarly { cycle: u16, ready_at: f64 },
}

impl fmt::Display for TrustCenterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrustCenterError::Crypto(e) => write!(f, "{e}"),
            TrustCenterError::Codec(e) => write!(f, "{e}"),
            TrustCenterError::InvalidSchedule => f.write_str("invalid cycle schedule"),
            TrustCenterError::InsufficientChain { requested, available } => {
                write!(f, "requested {requested} signatures but the chain has {available} cycles")
            }
            TrustCenterError::ChainExhausted { cycle } => write!(f, "no key material for cycle {cycle}"),
            TrustCenterError::TooEarly { cycle, ready_at } => {
                write!(f, "cycle {cycle} key may not be disclosed before t = {ready_at} s")
            }
        }
    }
}

impl core::error::Error for TrustCenterError {}

impl From<CryptoError> for TrustCenterError {
    fn from(e: CryptoError) -> Self {
        TrustCenterError::Crypto(e)
    }
}

impl From<CodecError> for TrustCenterError {
    fn from(e: CodecError) -> Self {
        TrustCenterError::Codec(e)
    }
}

/// Base-station broadcast for one cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CycleMessage {
    /// Key release under the auth key. The counter travels only inside the
    /// ciphertext, so receivers cannot tell which cycle it claims.
    Ba { sealed: [u8; SEALED_LEN] },
    /// Part 1 carries the key release, part 2 the anchor for the next cycle;
    /// the cycle index is repeated in clear for routing.
    Iba { part1: [u8; SEALED_LEN], part2: [u8; SEALED_LEN], cycle: u16 },
}

impl CycleMessage {
    pub fn variant(&self) -> Variant {
        match self {
            CycleMessage::Ba { .. } => Variant::Ba,
            CycleMessage::Iba { .. } => Variant::Iba,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        match self {
            CycleMessage::Ba { sealed } => sealed.to_vec(),
            CycleMessage::Iba { part1, part2, cycle } => {
                let mut out = Vec::with_capacity(codec::IBA_MESSAGE_LEN);
                out.extend_from_slice(part1);
                out.extend_from_slice(part2);
                codec::put_cycle(&mut out, *cycle);
                out
            }
        }
    }

    pub fn decode(variant: Variant, bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = Reader::new(bytes);
        let msg = match variant {
            Variant::Ba => CycleMessage::Ba { sealed: r.array()? },
            Variant::Iba => {
                let part1 = r.array()?;
                let part2 = r.array()?;
                let cycle = codec::read_cycle(r.take(2)?)?;
                CycleMessage::Iba { part1, part2, cycle }
            }
        };
        r.finish()?;
        Ok(msg)
    }

    /// Duplicate-suppression id used by flooding.
    pub fn id(&self) -> Digest {
        crypto::hash(&self.encode())
    }
}

/// Release of the auth key of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DisclosureMessage {
    pub cycle: u16,
    pub key: SymKey,
}

impl DisclosureMessage {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(codec::DISCLOSURE_LEN);
        codec::put_cycle(&mut out, self.cycle);
        out.extend_from_slice(&self.key.0);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = Reader::new(bytes);
        let cycle = codec::read_cycle(r.take(2)?)?;
        let key = SymKey(r.array()?);
        r.finish()?;
        Ok(DisclosureMessage { cycle, key })
    }
}

/// Revoked node ids, tagged under the auth key of `cycle` before that key is
/// disclosed; receivers hold the list until the disclosure lets them check it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RevocationMessage {
    pub cycle: u16,
    pub ids: Vec<NodeId>,
    pub tag: Tag,
}

impl RevocationMessage {
    /// Octets covered by the tag: `"REV" || cycle || ids`.
    pub fn tag_input(cycle: u16, ids: &[NodeId]) -> Vec<u8> {
        let mut m = Vec::with_capacity(5 + 2 * ids.len());
        m.extend_from_slice(b"REV");
        m.extend_from_slice(&cycle.to_be_bytes());
        for id in ids {
            m.extend_from_slice(&id.0.to_be_bytes());
        }
        m
    }

    pub fn verify(&self, k_auth: &SymKey) -> bool {
        crypto::mac(k_auth, &Self::tag_input(self.cycle, &self.ids)) == self.tag
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + crypto::TAG_LEN + 2 * self.ids.len());
        codec::put_cycle(&mut out, self.cycle);
        out.extend_from_slice(&self.tag);
        for id in &self.ids {
            out.extend_from_slice(&id.0.to_be_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = Reader::new(bytes);
        let cycle = codec::read_cycle(r.take(2)?)?;
        let tag = r.array()?;
        let rest = &bytes[2 + crypto::TAG_LEN..];
        if !rest.len().is_multiple_of(2) {
            return Err(CodecError::InvalidField("revocation id list"));
        }
        let ids = rest.chunks_exact(2).map(|c| NodeId(u16::from_be_bytes([c[0], c[1]]))).collect();
        Ok(RevocationMessage { cycle, ids, tag })
    }
}

/// Everything preloaded into one node before deployment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeCredentials {
    pub id: NodeId,
    pub params: GroupParams,
    pub keypair: DhKeyPair,
    /// `signatures[i - 1]` is the one-time signature for cycle `i`.
    pub signatures: Vec<Tag>,
    /// Hash of the first part of the cycle-1 broadcast.
    pub mu0: Digest,
    pub k_auth0: SymKey,
}

const CRED_MAGIC: &[u8; 4] = b"WSNC";
const CRED_VERSION: u8 = 1;

impl NodeCredentials {
    pub fn signature(&self, cycle: u16) -> Option<&Tag> {
        (cycle as usize).checked_sub(1).and_then(|i| self.signatures.get(i))
    }

    /// Binary layout, integers big-endian:
    ///
    /// ```text
    /// "WSNC" | version u8 = 1
    /// group: tag u8 (1 = toy: modulus u64, generator u64 | 2 = ecc-160)
    /// node id u16
    /// public: len u8, bytes | private: len u8, bytes
    /// mu0 (20) | K_Auth0 (16)
    /// signature count u16 | signatures (16 each, cycle 1 first)
    /// ```
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(CRED_MAGIC);
        out.push(CRED_VERSION);
        match self.params {
            GroupParams::Toy { modulus, generator } => {
                out.push(1);
                out.extend_from_slice(&modulus.to_be_bytes());
                out.extend_from_slice(&generator.to_be_bytes());
            }
            GroupParams::Ecc160 => out.push(2),
        }
        out.extend_from_slice(&self.id.0.to_be_bytes());
        out.push(self.keypair.public.len() as u8);
        out.extend_from_slice(&self.keypair.public);
        out.push(self.keypair.private.0.len() as u8);
        out.extend_from_slice(&self.keypair.private.0);
        out.extend_from_slice(&self.mu0.0);
        out.extend_from_slice(&self.k_auth0.0);
        out.extend_from_slice(&(self.signatures.len() as u16).to_be_bytes());
        for s in &self.signatures {
            out.extend_from_slice(s);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = Reader::new(bytes);
        if r.take(4)? != CRED_MAGIC {
            return Err(CodecError::BadMagic);
        }
        let version = r.u8()?;
        if version != CRED_VERSION {
            return Err(CodecError::UnsupportedVersion(version));
        }
        let params = match r.u8()? {
            1 => {
                let modulus = r.u64()?;
                let generator = r.u64()?;
                GroupParams::toy(modulus, generator).map_err(|_| CodecError::InvalidField("group"))?
            }
            2 => GroupParams::Ecc160,
            other => return Err(CodecError::UnknownBackend(other)),
        };
        let id = NodeId(r.u16()?);
        let n = r.u8()? as usize;
        let public = r.take(n)?.to_vec();
        let n = r.u8()? as usize;
        let private = PrivateScalar(r.take(n)?.to_vec());
        let keypair = params
            .keypair_from_private(&private)
            .map_err(|_| CodecError::InvalidField("private scalar"))?;
        if keypair.public != public {
            return Err(CodecError::InvalidField("public element"));
        }
        let mu0 = Digest(r.array()?);
        let k_auth0 = SymKey(r.array()?);
        let count = r.u16()? as usize;
        let mut signatures = Vec::with_capacity(count);
        for _ in 0..count {
            signatures.push(r.array()?);
        }
        r.finish()?;
        Ok(NodeCredentials { id, params, keypair, signatures, mu0, k_auth0 })
    }
}

/// Base-station state.
#[derive(Debug, Clone)]
pub struct TrustCenter {
    params: GroupParams,
    auth: KeyChain,
    ds: KeyChain,
    schedule: Vec<f64>,
    delay: f64,
    current: u16,
    provisioned: BTreeSet<NodeId>,
}

impl TrustCenter {
    /// `schedule[0]` is the deployment epoch and `schedule[i]` the start of
    /// cycle `i` (seconds, base-station clock). Gaps are whole seconds.
    pub fn new<R: RngCore + ?Sized>(
        params: GroupParams,
        cycles: usize,
        delay: f64,
        schedule: Vec<f64>,
        rng: &mut R,
    ) -> Result<Self, TrustCenterError> {
        if cycles == 0 {
            return Err(CryptoError::InvalidLength { requested: 0 }.into());
        }
        codec::check_cycle(cycles as u32)?;
        if schedule.len() != cycles + 1 || !(delay > 0.0) {
            return Err(TrustCenterError::InvalidSchedule);
        }
        for w in schedule.windows(2) {
            let gap = w[1] - w[0];
            if !(gap > delay) || gap > codec::MAX_DELTA as f64 || gap.fract() != 0.0 {
                return Err(TrustCenterError::InvalidSchedule);
            }
        }
        let auth = crypto::gen_chain(SymKey::random(rng), cycles)?;
        let ds = crypto::gen_chain(SymKey::random(rng), cycles)?;
        Ok(TrustCenter { params, auth, ds, schedule, delay, current: 0, provisioned: BTreeSet::new() })
    }

    /// Evenly spaced schedule starting at `epoch`.
    pub fn uniform_schedule(epoch: f64, gap: f64, cycles: usize) -> Vec<f64> {
        (0..=cycles).map(|i| epoch + gap * i as f64).collect()
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn cycles(&self) -> usize {
        self.auth.len()
    }

    /// Last cycle for which a broadcast exists under `variant`.
    pub fn last_cycle(&self, variant: Variant) -> u16 {
        match variant {
            Variant::Ba => self.cycles() as u16,
            Variant::Iba => self.cycles() as u16 - 1,
        }
    }

    pub fn current_cycle(&self) -> u16 {
        self.current
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn cycle_start(&self, cycle: u16) -> Option<f64> {
        self.schedule.get(cycle as usize).copied()
    }

    pub fn auth_chain(&self) -> &KeyChain {
        &self.auth
    }

    pub fn ds_chain(&self) -> &KeyChain {
        &self.ds
    }

    pub fn k_ds(&self, cycle: u16) -> Option<SymKey> {
        (cycle >= 1).then(|| self.ds.link(cycle as usize)).flatten()
    }

    pub fn k_auth(&self, cycle: u16) -> Option<SymKey> {
        (cycle >= 1).then(|| self.auth.link(cycle as usize)).flatten()
    }

    fn release(&self, cycle: u16) -> Result<(SymKey, KeyRelease), TrustCenterError> {
        let exhausted = TrustCenterError::ChainExhausted { cycle };
        let k_auth = self.k_auth(cycle).ok_or(exhausted.clone())?;
        let k_ds = self.k_ds(cycle).ok_or(exhausted)?;
        let c = cycle as usize;
        let delta = (self.schedule[c] - self.schedule[c - 1]) as u16;
        Ok((k_auth, KeyRelease { k_ds, cycle, delta }))
    }

    fn part1(&self, cycle: u16) -> Result<[u8; SEALED_LEN], TrustCenterError> {
        let (k_auth, r) = self.release(cycle)?;
        Ok(codec::seal_part1(&k_auth, &r)?)
    }

    pub fn provision_node<R: RngCore + ?Sized>(
        &mut self,
        id: NodeId,
        signatures: usize,
        rng: &mut R,
    ) -> Result<NodeCredentials, TrustCenterError> {
        if signatures > self.cycles() {
            return Err(TrustCenterError::InsufficientChain { requested: signatures, available: self.cycles() });
        }
        let keypair = self.params.keygen(rng);
        let signatures = (1..=signatures)
            .map(|i| crypto::mac(&self.ds.links()[i], &keypair.public))
            .collect();
        self.provisioned.insert(id);
        Ok(NodeCredentials {
            id,
            params: self.params.clone(),
            keypair,
            signatures,
            mu0: crypto::hash(&self.part1(1)?),
            k_auth0: self.auth.commitment(),
        })
    }

    pub fn build_cycle_message(&mut self, cycle: u16, variant: Variant) -> Result<CycleMessage, TrustCenterError> {
        if cycle == 0 || cycle > self.last_cycle(variant) {
            return Err(TrustCenterError::ChainExhausted { cycle });
        }
        let (k_auth, r) = self.release(cycle)?;
        let msg = match variant {
            Variant::Ba => CycleMessage::Ba { sealed: codec::seal_ba(&k_auth, &r)? },
            Variant::Iba => {
                let mu = crypto::hash(&self.part1(cycle + 1)?);
                CycleMessage::Iba {
                    part1: codec::seal_part1(&k_auth, &r)?,
                    part2: codec::seal_part2(&k_auth, &mu, cycle)?,
                    cycle,
                }
            }
        };
        self.current = self.current.max(cycle);
        Ok(msg)
    }

    /// Earliest base-station time at which cycle `cycle`'s key may go out.
    pub fn disclosure_time(&self, cycle: u16) -> Option<f64> {
        self.cycle_start(cycle).filter(|_| cycle >= 1).map(|t| t + self.delay)
    }

    pub fn build_disclosure(&self, cycle: u16, now: f64) -> Result<DisclosureMessage, TrustCenterError> {
        let key = self.k_auth(cycle).ok_or(TrustCenterError::ChainExhausted { cycle })?;
        let ready_at = self.disclosure_time(cycle).ok_or(TrustCenterError::ChainExhausted { cycle })?;
        if now < ready_at {
            return Err(TrustCenterError::TooEarly { cycle, ready_at });
        }
        Ok(DisclosureMessage { cycle, key })
    }

    /// Revocation list verifiable once cycle `cycle`'s auth key is disclosed.
    pub fn build_revocation(&self, cycle: u16, ids: &[NodeId]) -> Result<RevocationMessage, TrustCenterError> {
        let key = self.k_auth(cycle).ok_or(TrustCenterError::ChainExhausted { cycle })?;
        let tag = crypto::mac(&key, &RevocationMessage::tag_input(cycle, ids));
        Ok(RevocationMessage { cycle, ids: ids.to_vec(), tag })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tc(cycles: usize) -> TrustCenter {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let schedule = TrustCenter::uniform_schedule(0.0, 600.0, cycles);
        TrustCenter::new(GroupParams::default_toy(), cycles, 60.0, schedule, &mut rng).unwrap()
    }

    #[test]
    fn schedule_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = GroupParams::default_toy();
        let bad = [
            vec![0.0, 100.0, 100.0],
            vec![0.0, 100.0, 150.0],
            vec![0.0, 100.0],
            vec![0.0, 100.0, 100.0 + (1 << 14) as f64],
            vec![0.0, 100.5, 300.0],
        ];
        for s in bad {
            assert_eq!(
                TrustCenter::new(g.clone(), 2, 60.0, s.clone(), &mut rng).unwrap_err(),
                TrustCenterError::InvalidSchedule,
                "{s:?}"
            );
        }
        assert!(TrustCenter::new(g.clone(), 0, 60.0, vec![0.0], &mut rng).is_err());
        assert!(TrustCenter::new(g, 2, 60.0, vec![0.0, 61.0, 122.0], &mut rng).is_ok());
    }

    #[test]
    fn single_cycle_chain() {
        let mut t = tc(1);
        assert_eq!(t.auth_chain().len(), 1);
        assert!(t.auth_chain().verify() && t.ds_chain().verify());
        assert!(t.build_cycle_message(1, Variant::Ba).is_ok());
        assert_eq!(t.build_cycle_message(2, Variant::Ba), Err(TrustCenterError::ChainExhausted { cycle: 2 }));
        // iBA needs the following cycle to compute the anchor.
        assert_eq!(t.build_cycle_message(1, Variant::Iba), Err(TrustCenterError::ChainExhausted { cycle: 1 }));
    }

    #[test]
    fn chains_share_no_link() {
        let t = tc(50);
        for a in t.auth_chain().links() {
            assert!(!t.ds_chain().links().contains(a));
        }
    }

    #[test]
    fn anchor_chaining_over_twenty_cycles() {
        let mut t = tc(21);
        let creds = t.provision_node(NodeId(1), 21, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let mut expected = creds.mu0;
        for i in 1..=20u16 {
            let CycleMessage::Iba { part1, part2, cycle } = t.build_cycle_message(i, Variant::Iba).unwrap() else {
                unreachable!()
            };
            assert_eq!(cycle, i);
            assert_eq!(crypto::hash(&part1), expected);
            let k = t.k_auth(i).unwrap();
            let r = codec::open_part1(&k, &part1, i).unwrap();
            assert_eq!((r.k_ds, r.delta), (t.k_ds(i).unwrap(), 600));
            expected = codec::open_part2(&k, &part2, i).unwrap();
        }
        assert_eq!(t.current_cycle(), 20);
    }

    #[test]
    fn ba_message_opens_to_release() {
        let mut t = tc(3);
        let CycleMessage::Ba { sealed } = t.build_cycle_message(2, Variant::Ba).unwrap() else { unreachable!() };
        let r = codec::open_ba(&t.k_auth(2).unwrap(), &sealed, 2).unwrap();
        assert_eq!(r, KeyRelease { k_ds: t.k_ds(2).unwrap(), cycle: 2, delta: 600 });
    }

    #[test]
    fn signatures_bind_to_their_cycle() {
        let mut t = tc(5);
        let c = t.provision_node(NodeId(4), 5, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        for i in 1..=5u16 {
            for j in 1..=5u16 {
                let ok = crypto::mac(&t.k_ds(j).unwrap(), &c.keypair.public) == *c.signature(i).unwrap();
                assert_eq!(ok, i == j);
            }
        }
        assert_eq!(
            t.provision_node(NodeId(5), 6, &mut ChaCha8Rng::seed_from_u64(3)),
            Err(TrustCenterError::InsufficientChain { requested: 6, available: 5 })
        );
        let empty = t.provision_node(NodeId(6), 0, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!(empty.signature(1).is_none());
    }

    #[test]
    fn distinct_nodes_get_distinct_keys() {
        let mut t = tc(2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = t.provision_node(NodeId(1), 2, &mut rng).unwrap();
        let b = t.provision_node(NodeId(2), 2, &mut rng).unwrap();
        assert_ne!(a.keypair, b.keypair);
    }

    #[test]
    fn disclosure_timing_and_chain() {
        let t = tc(4);
        assert_eq!(
            t.build_disclosure(2, 1259.0),
            Err(TrustCenterError::TooEarly { cycle: 2, ready_at: 1260.0 })
        );
        let d1 = t.build_disclosure(1, 660.0).unwrap();
        assert_eq!(crypto::derive_link(&d1.key), t.auth_chain().commitment());
        let d2 = t.build_disclosure(2, 5000.0).unwrap();
        assert_eq!(crypto::derive_link(&d2.key), d1.key);
        assert_eq!(t.build_disclosure(2, 5000.0).unwrap(), d2);
        assert_eq!(DisclosureMessage::decode(&d2.encode()).unwrap(), d2);
    }

    #[test]
    fn revocation_encoding() {
        let t = tc(2);
        let empty = t.build_revocation(1, &[]).unwrap();
        assert!(empty.verify(&t.k_auth(1).unwrap()));
        let ids: Vec<NodeId> = (0..16).map(NodeId).collect();
        let r = t.build_revocation(1, &ids).unwrap();
        assert_eq!(2 * ids.len(), codec::PAYLOAD_LEN);
        let back = RevocationMessage::decode(&r.encode()).unwrap();
        assert_eq!(back, r);
        assert!(back.verify(&t.k_auth(1).unwrap()));
        assert!(!back.verify(&t.k_auth(2).unwrap()));
    }

    #[test]
    fn credentials_round_trip() {
        for params in [GroupParams::default_toy(), GroupParams::ecc160()] {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let sched = TrustCenter::uniform_schedule(0.0, 600.0, 3);
            let mut t = TrustCenter::new(params, 3, 60.0, sched, &mut rng).unwrap();
            let c = t.provision_node(NodeId(77), 3, &mut rng).unwrap();
            let bytes = c.to_bytes();
            assert_eq!(NodeCredentials::from_bytes(&bytes).unwrap(), c);
            let mut bad = bytes.clone();
            bad[0] = b'X';
            assert_eq!(NodeCredentials::from_bytes(&bad), Err(CodecError::BadMagic));
            assert!(NodeCredentials::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        }
    }

    #[test]
    fn cycle_message_codec() {
        let mut t = tc(3);
        for v in [Variant::Ba, Variant::Iba] {
            let m = t.build_cycle_message(1, v).unwrap();
            assert_eq!(CycleMessage::decode(v, &m.encode()).unwrap(), m);
        }
        assert!(CycleMessage::decode(Variant::Iba, &[0u8; 65]).is_err());
    }
}
