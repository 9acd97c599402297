//! Per-node protocol state machine.
//!
//! A node buffers the cycle broadcast, its neighbours' tickets and any
//! revocation lists until the base station discloses the cycle's auth key.
//! The disclosure authenticates the buffered broadcast, which yields the
//! signature key `K_DS,i`; that key authenticates the tickets, and each
//! authenticated ticket gives a pairwise key confirmed by an ack.
//!
//! Under [`Variant::Iba`] the broadcast is admitted only if the hash of its
//! first part equals the anchor carried by the previous broadcast. A node that
//! lost the previous broadcast has no anchor and falls back to admitting
//! unverified messages for the next cycle only, until one is authenticated by
//! disclosure and the anchor chain resumes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::codec::{self, CodecError, OpenError, Reader};
use crate::crypto::{self, Digest, SymKey, Tag, TAG_LEN};
use crate::energy::OpCounts;
use crate::trust_center::{CycleMessage, DisclosureMessage, NodeCredentials, RevocationMessage};
use crate::{NodeId, Variant};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeConfig {
    pub variant: Variant,
    /// Octets available for buffered broadcasts, tickets and revocation lists.
    pub buffer_capacity: usize,
    /// Freshness tolerance in seconds.
    pub epsilon: f64,
}

impl Default for NodeConfig {
    fn default() -> Self {
        NodeConfig { variant: Variant::Iba, buffer_capacity: 4096, epsilon: 1.0 }
    }
}

/// A node's public element and its one-time signature for `cycle`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ticket {
    pub sender: NodeId,
    pub cycle: u16,
    pub public: Vec<u8>,
    pub signature: Tag,
}

impl Ticket {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(codec::ticket_len(self.public.len()));
        out.extend_from_slice(&self.sender.0.to_be_bytes());
        codec::put_cycle(&mut out, self.cycle);
        out.extend_from_slice(&self.public);
        out.extend_from_slice(&self.signature);
        out
    }

    pub fn decode(bytes: &[u8], public_len: usize) -> Result<Self, CodecError> {
        let mut r = Reader::new(bytes);
        let sender = NodeId(r.u16()?);
        let cycle = codec::read_cycle(r.take(2)?)?;
        let public = r.take(public_len)?.to_vec();
        let signature = r.array()?;
        r.finish()?;
        Ok(Ticket { sender, cycle, public, signature })
    }

    pub fn encoded_len(&self) -> usize {
        codec::ticket_len(self.public.len())
    }
}

/// Key confirmation from `from` to `to` for the key of `cycle`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ack {
    pub from: NodeId,
    pub to: NodeId,
    pub cycle: u16,
    pub tag: Tag,
}

impl Ack {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(codec::ACK_LEN);
        out.extend_from_slice(&self.from.0.to_be_bytes());
        out.extend_from_slice(&self.to.0.to_be_bytes());
        codec::put_cycle(&mut out, self.cycle);
        out.extend_from_slice(&self.tag);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = Reader::new(bytes);
        let from = NodeId(r.u16()?);
        let to = NodeId(r.u16()?);
        let cycle = codec::read_cycle(r.take(2)?)?;
        let tag: [u8; TAG_LEN] = r.array()?;
        r.finish()?;
        Ok(Ack { from, to, cycle, tag })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolError {
    /// No signature left for the requested cycle.
    Depleted,
    /// This node has been revoked by the base station.
    Revoked,
}

impl fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolError::Depleted => f.write_str("no one-time signature left"),
            ProtocolError::Revoked => f.write_str("node is revoked"),
        }
    }
}

impl core::error::Error for ProtocolError {}

/// Outcome of handing a message to a node before key disclosure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    /// Stored until disclosure. `verified` is set when the broadcast passed
    /// the anchor check and may be relayed.
    Buffered { verified: bool },
    /// An identical copy is already buffered.
    Duplicate,
    Rejected(Reject),
    /// Buffer capacity exceeded.
    Dropped,
}

impl Admission {
    pub fn is_buffered(self) -> bool {
        matches!(self, Admission::Buffered { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reject {
    /// Claims a cycle whose key is already public.
    Stale,
    /// Claims a cycle other than the one expected next.
    WrongCycle,
    /// Hash of the first part differs from the stored anchor.
    AnchorMismatch,
    Revoked,
    OwnTicket,
    WrongVariant,
}

/// Why a buffered broadcast was thrown away at disclosure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Discard {
    Open(OpenError),
    /// `|(T_x,i - T_x,i-1) - Delta_i|` exceeded the tolerance.
    Stale { observed: f64, claimed: u16 },
    /// Decrypted under none of the released keys.
    NoMatchingKey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisclosureVerdict {
    Accepted,
    /// Cycle not newer than the last verified disclosure.
    Stale,
    /// Key does not hash back to the stored checkpoint.
    ChainMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisclosureOutcome {
    pub verdict: DisclosureVerdict,
    /// Cycles whose signature key was recovered from a buffered broadcast.
    pub released: Vec<u16>,
    /// Ids of broadcasts that authenticated and passed the freshness check.
    pub accepted: Vec<Digest>,
    pub discarded: Vec<(Digest, Discard)>,
    /// Pairwise keys derived, by peer and cycle.
    pub new_keys: Vec<(NodeId, u16)>,
    /// Acks this node should now send.
    pub acks: Vec<Ack>,
    /// Peers confirmed by acks that had arrived ahead of the key.
    pub confirmed: Vec<NodeId>,
    pub revoked: Vec<NodeId>,
}

impl DisclosureOutcome {
    fn new(verdict: DisclosureVerdict) -> Self {
        DisclosureOutcome {
            verdict,
            released: Vec::new(),
            accepted: Vec::new(),
            discarded: Vec::new(),
            new_keys: Vec::new(),
            acks: Vec::new(),
            confirmed: Vec::new(),
            revoked: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AckVerdict {
    Verified,
    Mismatch,
    /// Key for that cycle not derived yet; held until it is.
    Early,
    /// Addressed to another node, from a revoked node, or for a cycle this
    /// node can no longer derive.
    Ignored,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PeerLink {
    pub keys: BTreeMap<u16, SymKey>,
    /// Latest cycle whose key the peer confirmed with a valid ack.
    pub confirmed: Option<u16>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NodeStats {
    pub broadcasts_buffered: u64,
    pub broadcasts_rejected: u64,
    pub broadcasts_duplicate: u64,
    pub broadcasts_dropped: u64,
    pub broadcasts_accepted: u64,
    pub broadcasts_discarded: u64,
    pub tickets_buffered: u64,
    pub tickets_rejected: u64,
    pub tickets_dropped: u64,
    pub tickets_verified: u64,
    pub tickets_failed: u64,
    pub disclosures_accepted: u64,
    pub disclosures_rejected: u64,
    pub keys_derived: u64,
    pub acks_verified: u64,
    pub acks_failed: u64,
    pub peak_buffered_octets: usize,
}

#[derive(Debug, Clone)]
struct Pending {
    msg: CycleMessage,
    id: Digest,
    len: usize,
    arrival: f64,
}

#[derive(Debug, Clone)]
pub struct Node {
    creds: NodeCredentials,
    config: NodeConfig,
    checkpoint: (u16, SymKey),
    anchor: (u16, Digest),
    last_accept: Option<(u16, f64)>,
    pending: Vec<Pending>,
    tickets: BTreeMap<(u16, NodeId), Ticket>,
    revocations: Vec<RevocationMessage>,
    buffered: usize,
    links: BTreeMap<NodeId, PeerLink>,
    early_acks: BTreeMap<(NodeId, u16), Tag>,
    revoked: BTreeSet<NodeId>,
    emitted: BTreeSet<u16>,
    stats: NodeStats,
    work: OpCounts,
}

impl Node {
    pub fn new(creds: NodeCredentials, config: NodeConfig) -> Self {
        Node {
            checkpoint: (0, creds.k_auth0),
            anchor: (1, creds.mu0),
            creds,
            config,
            last_accept: None,
            pending: Vec::new(),
            tickets: BTreeMap::new(),
            revocations: Vec::new(),
            buffered: 0,
            links: BTreeMap::new(),
            early_acks: BTreeMap::new(),
            revoked: BTreeSet::new(),
            emitted: BTreeSet::new(),
            stats: NodeStats::default(),
            work: OpCounts::default(),
        }
    }

    pub fn id(&self) -> NodeId {
        self.creds.id
    }

    pub fn variant(&self) -> Variant {
        self.config.variant
    }

    pub fn credentials(&self) -> &NodeCredentials {
        &self.creds
    }

    pub fn stats(&self) -> &NodeStats {
        &self.stats
    }

    /// Last cycle whose auth key this node has verified.
    pub fn checkpoint_cycle(&self) -> u16 {
        self.checkpoint.0
    }

    /// Whether the next broadcast can be checked against a stored anchor.
    pub fn in_sync(&self) -> bool {
        self.anchor.0 > self.checkpoint.0
    }

    pub fn buffered_octets(&self) -> usize {
        self.buffered
    }

    /// Ids and sizes of buffered broadcasts.
    pub fn buffered_broadcasts(&self) -> impl Iterator<Item = (Digest, usize)> + '_ {
        self.pending.iter().map(|p| (p.id, p.len))
    }

    pub fn links(&self) -> &BTreeMap<NodeId, PeerLink> {
        &self.links
    }

    pub fn pairwise_key(&self, peer: NodeId, cycle: u16) -> Option<SymKey> {
        self.links.get(&peer).and_then(|l| l.keys.get(&cycle)).copied()
    }

    pub fn is_established(&self, peer: NodeId) -> bool {
        self.links.get(&peer).is_some_and(|l| l.confirmed.is_some())
    }

    pub fn is_revoked(&self, id: NodeId) -> bool {
        self.revoked.contains(&id)
    }

    /// Signatures left for cycles after the latest one used.
    pub fn remaining_signatures(&self) -> usize {
        let used = self.emitted.last().copied().unwrap_or(0) as usize;
        self.creds.signatures.len().saturating_sub(used)
    }

    /// Drains the operation counters accumulated since the last call.
    pub fn take_work(&mut self) -> OpCounts {
        core::mem::take(&mut self.work)
    }

    fn reserve(&mut self, len: usize) -> bool {
        if self.buffered + len > self.config.buffer_capacity {
            return false;
        }
        self.buffered += len;
        self.stats.peak_buffered_octets = self.stats.peak_buffered_octets.max(self.buffered);
        true
    }

    fn release(&mut self, len: usize) {
        self.buffered -= len;
    }

    pub fn emit_ticket(&mut self, cycle: u16) -> Result<Ticket, ProtocolError> {
        if self.revoked.contains(&self.creds.id) {
            return Err(ProtocolError::Revoked);
        }
        let signature = *self.creds.signature(cycle).ok_or(ProtocolError::Depleted)?;
        if self.emitted.last().is_some_and(|&last| cycle < last) {
            // Signatures of skipped cycles are gone for good.
            return Err(ProtocolError::Depleted);
        }
        self.emitted.insert(cycle);
        Ok(Ticket { sender: self.creds.id, cycle, public: self.creds.keypair.public.clone(), signature })
    }

    /// Buffers a neighbour's ticket until its cycle's signature key is known.
    /// A second ticket from the same sender for the same cycle replaces the first.
    pub fn on_ticket(&mut self, ticket: Ticket) -> Admission {
        let reject = if ticket.sender == self.creds.id {
            Some(Reject::OwnTicket)
        } else if self.revoked.contains(&ticket.sender) {
            Some(Reject::Revoked)
        } else if ticket.cycle <= self.checkpoint.0 {
            Some(Reject::Stale)
        } else {
            None
        };
        if let Some(r) = reject {
            self.stats.tickets_rejected += 1;
            return Admission::Rejected(r);
        }
        let key = (ticket.cycle, ticket.sender);
        let len = ticket.encoded_len();
        let old = self.tickets.get(&key).map(Ticket::encoded_len).unwrap_or(0);
        self.release(old);
        if !self.reserve(len) {
            self.buffered += old;
            self.stats.tickets_dropped += 1;
            return Admission::Dropped;
        }
        self.tickets.insert(key, ticket);
        self.stats.tickets_buffered += 1;
        Admission::Buffered { verified: false }
    }

    /// Handles a base-station broadcast received at local time `now`.
    pub fn on_cycle_message(&mut self, msg: CycleMessage, now: f64) -> Admission {
        let verdict = self.admit(&msg);
        let admission = match verdict {
            Ok(verified) => {
                let len = msg.encode().len();
                let id = msg.id();
                if self.pending.iter().any(|p| p.id == id) {
                    Admission::Duplicate
                } else if !self.reserve(len) {
                    Admission::Dropped
                } else {
                    self.pending.push(Pending { msg, id, len, arrival: now });
                    Admission::Buffered { verified }
                }
            }
            Err(r) => Admission::Rejected(r),
        };
        match admission {
            Admission::Buffered { .. } => self.stats.broadcasts_buffered += 1,
            Admission::Duplicate => self.stats.broadcasts_duplicate += 1,
            Admission::Rejected(_) => self.stats.broadcasts_rejected += 1,
            Admission::Dropped => self.stats.broadcasts_dropped += 1,
        }
        admission
    }

    /// Admission policy; `Ok(true)` when the anchor vouches for the message.
    fn admit(&mut self, msg: &CycleMessage) -> Result<bool, Reject> {
        match (self.config.variant, msg) {
            (Variant::Ba, CycleMessage::Ba { .. }) => Ok(false),
            (Variant::Iba, CycleMessage::Iba { part1, cycle, .. }) => {
                let cycle = *cycle;
                if cycle <= self.checkpoint.0 {
                    return Err(Reject::Stale);
                }
                if self.in_sync() {
                    if cycle != self.anchor.0 {
                        return Err(Reject::WrongCycle);
                    }
                    self.work.sha1 += 1;
                    if crypto::hash(part1) != self.anchor.1 {
                        return Err(Reject::AnchorMismatch);
                    }
                    Ok(true)
                } else if cycle == self.checkpoint.0 + 1 {
                    Ok(false)
                } else {
                    Err(Reject::WrongCycle)
                }
            }
            _ => Err(Reject::WrongVariant),
        }
    }

    /// Buffers a revocation list until its cycle's auth key is disclosed.
    pub fn on_revocation(&mut self, rev: RevocationMessage) -> Admission {
        if rev.cycle <= self.checkpoint.0 {
            return Admission::Rejected(Reject::Stale);
        }
        if self.revocations.contains(&rev) {
            return Admission::Duplicate;
        }
        if !self.reserve(rev.encode().len()) {
            return Admission::Dropped;
        }
        self.revocations.push(rev);
        Admission::Buffered { verified: false }
    }

    /// Verifies a disclosed auth key and settles everything buffered for the
    /// cycles it releases. A disclosure may skip cycles whose own disclosure
    /// was lost; the skipped keys are recovered by walking the chain.
    pub fn on_disclosure(&mut self, d: &DisclosureMessage) -> DisclosureOutcome {
        let (last, checkpoint_key) = self.checkpoint;
        if d.cycle <= last {
            self.stats.disclosures_rejected += 1;
            return DisclosureOutcome::new(DisclosureVerdict::Stale);
        }
        let steps = (d.cycle - last) as usize;
        let mut keys = Vec::with_capacity(steps);
        let mut k = d.key;
        for _ in 0..steps {
            keys.push(k);
            k = crypto::derive_link(&k);
        }
        self.work.sha1 += steps as u64;
        if k != checkpoint_key {
            self.stats.disclosures_rejected += 1;
            return DisclosureOutcome::new(DisclosureVerdict::ChainMismatch);
        }
        keys.reverse();
        self.stats.disclosures_accepted += 1;
        self.checkpoint = (d.cycle, d.key);

        let mut out = DisclosureOutcome::new(DisclosureVerdict::Accepted);
        let pending = core::mem::take(&mut self.pending);
        let mut matched = alloc::vec![false; pending.len()];
        for (offset, k_auth) in keys.iter().enumerate() {
            let cycle = last + 1 + offset as u16;
            self.apply_revocations(cycle, k_auth, &mut out);
            let k_ds = self.settle_broadcasts(cycle, k_auth, &pending, &mut matched, &mut out);
            if let Some(k_ds) = k_ds {
                out.released.push(cycle);
                self.derive_keys(cycle, &k_ds, &mut out);
            }
        }
        for (p, m) in pending.into_iter().zip(matched) {
            let later = matches!(p.msg, CycleMessage::Iba { cycle, .. } if cycle > d.cycle);
            if later {
                self.pending.push(p);
                continue;
            }
            if !m {
                out.discarded.push((p.id, Discard::NoMatchingKey));
            }
            self.release(p.len);
        }
        self.stats.broadcasts_discarded += out.discarded.len() as u64;

        // Anything tagged for a released cycle is settled or useless now.
        let stale: Vec<_> = self.tickets.range(..=(d.cycle, NodeId(u16::MAX))).map(|(k, _)| *k).collect();
        for key in stale {
            if let Some(t) = self.tickets.remove(&key) {
                self.release(t.encoded_len());
            }
        }
        let cp = self.checkpoint.0;
        let mut freed = 0;
        self.revocations.retain(|r| {
            let keep = r.cycle > cp;
            if !keep {
                freed += r.encode().len();
            }
            keep
        });
        self.release(freed);
        self.early_acks.retain(|&(_, c), _| c > cp);
        out
    }

    fn apply_revocations(&mut self, cycle: u16, k_auth: &SymKey, out: &mut DisclosureOutcome) {
        for rev in self.revocations.iter().filter(|r| r.cycle == cycle) {
            self.work.hmac += 1;
            if !rev.verify(k_auth) {
                continue;
            }
            for &id in &rev.ids {
                if self.revoked.insert(id) {
                    out.revoked.push(id);
                    self.links.remove(&id);
                }
            }
        }
    }

    /// Authenticates buffered broadcasts for `cycle` and returns the released
    /// signature key, if any broadcast carried it.
    fn settle_broadcasts(
        &mut self,
        cycle: u16,
        k_auth: &SymKey,
        pending: &[Pending],
        matched: &mut [bool],
        out: &mut DisclosureOutcome,
    ) -> Option<SymKey> {
        let mut released = None;
        for (i, p) in pending.iter().enumerate() {
            if matched[i] {
                continue;
            }
            let opened = match &p.msg {
                CycleMessage::Ba { sealed } => {
                    self.work.aes += 1;
                    match codec::open_ba(k_auth, sealed, cycle) {
                        Ok(r) => Ok((r, None)),
                        // May belong to a later released cycle.
                        Err(OpenError::CounterMismatch { .. }) => continue,
                        Err(e) => Err(e),
                    }
                }
                CycleMessage::Iba { part1, part2, cycle: c } => {
                    if *c != cycle {
                        continue;
                    }
                    self.work.aes += 2;
                    codec::open_part1(k_auth, part1, cycle)
                        .and_then(|r| codec::open_part2(k_auth, part2, cycle).map(|mu| (r, Some(mu))))
                }
            };
            matched[i] = true;
            let (release, mu) = match opened {
                Ok(v) => v,
                Err(e) => {
                    out.discarded.push((p.id, Discard::Open(e)));
                    continue;
                }
            };
            if let Some((prev, t_prev)) = self.last_accept {
                if prev + 1 == cycle {
                    let observed = p.arrival - t_prev;
                    if libm::fabs(observed - release.delta as f64) > self.config.epsilon {
                        out.discarded.push((p.id, Discard::Stale { observed, claimed: release.delta }));
                        continue;
                    }
                }
            }
            out.accepted.push(p.id);
            self.stats.broadcasts_accepted += 1;
            if released.is_none() {
                released = Some(release.k_ds);
                self.last_accept = Some((cycle, p.arrival));
                if let Some(mu) = mu {
                    self.anchor = (cycle + 1, mu);
                }
            }
        }
        released
    }

    pub fn verify_ticket(&mut self, ticket: &Ticket, k_ds: &SymKey) -> bool {
        self.work.hmac += 1;
        !self.revoked.contains(&ticket.sender) && crypto::mac(k_ds, &ticket.public) == ticket.signature
    }

    fn derive_keys(&mut self, cycle: u16, k_ds: &SymKey, out: &mut DisclosureOutcome) {
        let me = self.creds.id;
        if !self.emitted.contains(&cycle) || self.revoked.contains(&me) {
            return;
        }
        let tickets: Vec<Ticket> = self.tickets.range((cycle, NodeId(0))..=(cycle, NodeId(u16::MAX))).map(|(_, t)| t.clone()).collect();
        for t in tickets {
            if !self.verify_ticket(&t, k_ds) {
                self.stats.tickets_failed += 1;
                continue;
            }
            self.stats.tickets_verified += 1;
            let Ok(shared) = self.creds.params.shared(&self.creds.keypair.private, &t.public) else {
                self.stats.tickets_failed += 1;
                continue;
            };
            self.work.dh += 1;
            let k = crypto::kdf_pairwise(&shared, cycle);
            let link = self.links.entry(t.sender).or_default();
            if link.keys.insert(cycle, k).is_none() {
                self.stats.keys_derived += 1;
                out.new_keys.push((t.sender, cycle));
            }
            out.acks.push(self.make_ack_with(t.sender, cycle, &k));
            if let Some(tag) = self.early_acks.remove(&(t.sender, cycle)) {
                let ack = Ack { from: t.sender, to: me, cycle, tag };
                if self.on_ack(&ack) == AckVerdict::Verified {
                    out.confirmed.push(t.sender);
                }
            }
        }
    }

    fn make_ack_with(&mut self, peer: NodeId, cycle: u16, k: &SymKey) -> Ack {
        self.work.hmac += 1;
        Ack { from: self.creds.id, to: peer, cycle, tag: crypto::ack_token(k, self.creds.id, peer) }
    }

    /// Ack for `peer` under the key derived in `cycle`, if there is one.
    pub fn make_ack(&mut self, peer: NodeId, cycle: u16) -> Option<Ack> {
        let k = self.pairwise_key(peer, cycle)?;
        Some(self.make_ack_with(peer, cycle, &k))
    }

    pub fn on_ack(&mut self, ack: &Ack) -> AckVerdict {
        if ack.to != self.creds.id || self.revoked.contains(&ack.from) {
            return AckVerdict::Ignored;
        }
        let Some(k) = self.pairwise_key(ack.from, ack.cycle) else {
            if ack.cycle > self.checkpoint.0 && self.emitted.contains(&ack.cycle) {
                self.early_acks.insert((ack.from, ack.cycle), ack.tag);
                return AckVerdict::Early;
            }
            return AckVerdict::Ignored;
        };
        self.work.hmac += 1;
        if crypto::ack_token(&k, ack.from, self.creds.id) != ack.tag {
            self.stats.acks_failed += 1;
            return AckVerdict::Mismatch;
        }
        self.stats.acks_verified += 1;
        let link = self.links.entry(ack.from).or_default();
        link.confirmed = Some(link.confirmed.map_or(ack.cycle, |c| c.max(ack.cycle)));
        AckVerdict::Verified
    }
}

/// `a` acks its key of `cycle` to `b`; true when `b` accepts it.
pub fn complete_ack(a: &mut Node, b: &mut Node, cycle: u16) -> bool {
    match a.make_ack(b.id(), cycle) {
        Some(ack) => b.on_ack(&ack) == AckVerdict::Verified,
        None => false,
    }
}
