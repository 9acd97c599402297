use std::cmp::Ordering;
use std::fmt;
use std::collections::{BinaryHeap, HashSet};
use std::rc::Rc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use wsnkm_core::codec;
use wsnkm_core::crypto::{self, Backend, Digest, GroupParams};
use wsnkm_core::energy::{Category, CostTable, EnergyLedger, OpCounts};
use wsnkm_core::protocol::{
    Ack, AckVerdict, Admission, Discard, DisclosureOutcome, DisclosureVerdict, Node, NodeConfig, Reject, Ticket,
};
use wsnkm_core::trust_center::{CycleMessage, DisclosureMessage, RevocationMessage, TrustCenter};
use wsnkm_core::{NodeId, Variant};

use super::flood::link_receive;
use super::graph::DeploymentGraph;
use crate::trace::{Trace, TraceNode, TraceRecord};
use crate::SimError;

/// How the base station reaches the nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BsMode {
    /// One transmission reaches every node (each link still lossy).
    #[default]
    Powerful,
    /// The base station sits at the field centre with the nodes' range and
    /// its broadcasts are blind-flooded.
    Multihop,
}

/// Unit of independent loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LossGranularity {
    /// Every packet on every link is lost independently.
    #[default]
    Packet,
    /// A whole message is lost or delivered on each link.
    Message,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub variant: Variant,
    pub backend: Backend,
    pub bs_mode: BsMode,
    pub loss: LossGranularity,
    /// Cycles the base station runs.
    pub cycles: u16,
    /// Seconds between cycle starts.
    pub delta_s: f64,
    /// Seconds from a cycle broadcast to its key disclosure.
    pub delay_s: f64,
    /// One-time signatures per node; defaults to one per cycle.
    pub signatures: Option<usize>,
    pub buffer_capacity: usize,
    pub epsilon_s: f64,
    pub hop_latency_s: f64,
    /// Node clocks are offset by a uniform draw from `[0, max)`.
    pub clock_offset_max_s: f64,
    pub costs: CostTable,
    /// Revocation broadcasts as (cycle, ids); each goes out before that
    /// cycle's disclosure.
    pub revocations: Vec<(u16, Vec<NodeId>)>,
    pub trace: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            variant: Variant::Iba,
            backend: Backend::ToyGroup,
            bs_mode: BsMode::Powerful,
            loss: LossGranularity::Packet,
            cycles: 1,
            delta_s: 600.0,
            delay_s: 60.0,
            signatures: None,
            buffer_capacity: 4096,
            epsilon_s: 1.0,
            hop_latency_s: 0.0,
            clock_offset_max_s: 0.0,
            costs: wsnkm_core::analytics::default_cost_table(),
            revocations: Vec::new(),
            trace: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Validation(m.into()));
        if self.cycles == 0 {
            return bad("at least one cycle is required");
        }
        if self.cycles > codec::MAX_CYCLE - 1 {
            return bad("cycle counter is 10 bits");
        }
        if !(self.delay_s > 0.0) || !(self.delta_s > self.delay_s) {
            return bad("need 0 < disclosure delay < cycle gap");
        }
        if self.delta_s.fract() != 0.0 || self.delta_s > codec::MAX_DELTA as f64 {
            return bad("cycle gap must be whole seconds below 16384");
        }
        if !(self.epsilon_s >= 0.0) || !(self.hop_latency_s >= 0.0) || !(self.clock_offset_max_s >= 0.0) {
            return bad("tolerances, latencies and offsets must be non-negative");
        }
        self.costs.validate().map_err(|e| SimError::Validation(e.to_string()))?;
        Ok(())
    }

    /// Base-station time at which cycle `c` starts.
    pub fn cycle_start(&self, c: u16) -> f64 {
        self.delta_s * c as f64
    }
}

/// What travels over the air.
#[derive(Debug, Clone, PartialEq)]
pub enum Msg {
    Cycle(CycleMessage),
    Disclosure(DisclosureMessage),
    Ticket(Ticket),
    Ack(Ack),
    Revocation(RevocationMessage),
}

impl Msg {
    pub fn kind(&self) -> &'static str {
        match self {
            Msg::Cycle(_) => "cycle",
            Msg::Disclosure(_) => "disclosure",
            Msg::Ticket(_) => "ticket",
            Msg::Ack(_) => "ack",
            Msg::Revocation(_) => "revocation",
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        match self {
            Msg::Cycle(m) => m.encode(),
            Msg::Disclosure(d) => d.encode(),
            Msg::Ticket(t) => t.encode(),
            Msg::Ack(a) => a.encode(),
            Msg::Revocation(r) => r.encode(),
        }
    }

    /// Cycle the message refers to, when it carries one in clear.
    pub fn cycle(&self) -> Option<u16> {
        match self {
            Msg::Cycle(CycleMessage::Iba { cycle, .. }) => Some(*cycle),
            Msg::Cycle(CycleMessage::Ba { .. }) => None,
            Msg::Disclosure(d) => Some(d.cycle),
            Msg::Ticket(t) => Some(t.cycle),
            Msg::Ack(a) => Some(a.cycle),
            Msg::Revocation(r) => Some(r.cycle),
        }
    }
}

/// Where the adversary transmits from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdversaryPosition {
    /// Directed at a single node.
    Target(u32),
    /// Broadcast from a point; every node in range hears it.
    At(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Injection {
    pub time_s: f64,
    pub from: AdversaryPosition,
    pub msg: Msg,
}

/// Forced loss of one message kind at one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Jam {
    pub node: u32,
    pub kind: &'static str,
    pub cycle: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sender {
    Node(u32),
    Bs,
    Adversary,
}

#[derive(Debug)]
enum EventKind {
    BsCycle(u16),
    Tickets(u16),
    BsDisclosure(u16),
    BsRevocation(usize),
    Inject(usize),
    Deliver { to: u32, msg: Rc<Msg>, id: Digest, adversarial: bool },
}

#[derive(Debug)]
struct Event {
    time_us: u64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        (self.time_us, self.seq) == (other.time_us, other.seq)
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // Min-heap on (time, insertion order).
    fn cmp(&self, other: &Self) -> Ordering {
        (other.time_us, other.seq).cmp(&(self.time_us, self.seq))
    }
}

fn to_us(t: f64) -> u64 {
    (t * 1e6).round() as u64
}

/// Energy and effects caused by adversary messages.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AttackImpact {
    /// Adversary messages admitted into some node's buffer.
    pub admitted: u64,
    /// Adversary messages a node authenticated at disclosure.
    pub authenticated: u64,
    /// Retransmissions of adversary messages by honest nodes.
    pub relays: u64,
    pub relay_tx_mj: f64,
    pub rx_mj: f64,
    pub processing_mj: f64,
}

impl AttackImpact {
    pub fn total_mj(&self) -> f64 {
        self.relay_tx_mj + self.rx_mj + self.processing_mj
    }
}

/// One replica of the network.
pub struct Simulation {
    config: SimConfig,
    graph: DeploymentGraph,
    tc: TrustCenter,
    nodes: Vec<Node>,
    offsets: Vec<f64>,
    ledger: EnergyLedger,
    rng: ChaCha8Rng,
    queue: BinaryHeap<Event>,
    seq: u64,
    now_us: u64,
    bs_reach: Vec<u32>,
    seen: Vec<HashSet<Digest>>,
    jams: HashSet<Jam>,
    injections: Vec<Injection>,
    revocations: Vec<RevocationMessage>,
    /// Broadcasts each node buffered from an adversary delivery.
    adversary_buffered: Vec<HashSet<Digest>>,
    impact: AttackImpact,
    peak_bogus: Vec<usize>,
    trace: Trace,
}

impl Simulation {
    pub fn new(config: SimConfig, graph: DeploymentGraph, mut rng: ChaCha8Rng) -> Result<Self, SimError> {
        config.validate()?;
        let params = GroupParams::for_backend(config.backend);
        let chain = config.cycles as usize + usize::from(config.variant == Variant::Iba);
        let schedule = TrustCenter::uniform_schedule(0.0, config.delta_s, chain);
        let mut tc = TrustCenter::new(params, chain, config.delay_s, schedule, &mut rng)?;
        let sigs = config.signatures.unwrap_or(config.cycles as usize);
        if sigs > chain {
            return Err(SimError::Validation(format!("{sigs} signatures exceed the {chain}-cycle chain")));
        }
        let node_config =
            NodeConfig { variant: config.variant, buffer_capacity: config.buffer_capacity, epsilon: config.epsilon_s };
        let mut nodes = Vec::with_capacity(graph.len());
        for i in 0..graph.len() {
            let creds = tc.provision_node(NodeId(i as u16), sigs, &mut rng)?;
            nodes.push(Node::new(creds, node_config));
        }
        let offsets = (0..graph.len())
            .map(|_| if config.clock_offset_max_s > 0.0 { rng.gen_range(0.0..config.clock_offset_max_s) } else { 0.0 })
            .collect();
        let bs_reach = match config.bs_mode {
            BsMode::Powerful => (0..graph.len() as u32).collect(),
            BsMode::Multihop => graph.in_range_of(graph.center()),
        };
        let revocations = config
            .revocations
            .iter()
            .map(|(c, ids)| tc.build_revocation(*c, ids))
            .collect::<Result<Vec<_>, _>>()?;
        let n = graph.len();
        let mut sim = Simulation {
            ledger: EnergyLedger::new(n),
            seen: vec![HashSet::new(); n],
            adversary_buffered: vec![HashSet::new(); n],
            peak_bogus: vec![0; n],
            trace: Trace::new(config.trace),
            config,
            graph,
            tc,
            nodes,
            offsets,
            rng,
            queue: BinaryHeap::new(),
            seq: 0,
            now_us: 0,
            bs_reach,
            jams: HashSet::new(),
            injections: Vec::new(),
            revocations,
            impact: AttackImpact::default(),
        };
        for c in 1..=sim.config.cycles {
            let t = sim.config.cycle_start(c);
            sim.push(to_us(t), EventKind::BsCycle(c));
            sim.push(to_us(t + sim.config.delay_s / 2.0), EventKind::Tickets(c));
            sim.push(to_us(t + sim.config.delay_s), EventKind::BsDisclosure(c));
        }
        for (k, r) in sim.revocations.clone().iter().enumerate() {
            let t = sim.config.cycle_start(r.cycle) + sim.config.delay_s / 4.0;
            sim.push(to_us(t), EventKind::BsRevocation(k));
        }
        Ok(sim)
    }

    fn push(&mut self, time_us: u64, kind: EventKind) {
        self.seq += 1;
        self.queue.push(Event { time_us, seq: self.seq, kind });
    }

    pub fn inject(&mut self, injection: Injection) {
        let idx = self.injections.len();
        let t = to_us(injection.time_s);
        self.injections.push(injection);
        self.push(t, EventKind::Inject(idx));
    }

    pub fn jam(&mut self, jam: Jam) {
        self.jams.insert(jam);
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn graph(&self) -> &DeploymentGraph {
        &self.graph
    }

    pub fn trust_center(&self) -> &TrustCenter {
        &self.tc
    }

    /// Mutable access for experiments that build messages ahead of time.
    pub fn trust_center_mut(&mut self) -> &mut TrustCenter {
        &mut self.tc
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    pub fn impact(&self) -> &AttackImpact {
        &self.impact
    }

    /// Highest number of adversary octets each node held at once.
    pub fn peak_bogus_octets(&self) -> &[usize] {
        &self.peak_bogus
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn into_trace(self) -> Trace {
        self.trace
    }

    pub fn now_s(&self) -> f64 {
        self.now_us as f64 / 1e6
    }

    /// Runs until no events remain.
    pub fn run(&mut self) -> Result<(), SimError> {
        self.run_until(f64::INFINITY)
    }

    /// Processes every event scheduled at or before `t_s`.
    pub fn run_until(&mut self, t_s: f64) -> Result<(), SimError> {
        let limit = if t_s.is_finite() { to_us(t_s) } else { u64::MAX };
        while self.queue.peek().is_some_and(|e| e.time_us <= limit) {
            let ev = self.queue.pop().expect("peeked");
            self.now_us = ev.time_us;
            self.handle(ev.kind)?;
        }
        Ok(())
    }

    fn handle(&mut self, kind: EventKind) -> Result<(), SimError> {
        match kind {
            EventKind::BsCycle(c) => {
                let msg = self.tc.build_cycle_message(c, self.config.variant)?;
                self.bs_send(Msg::Cycle(msg));
            }
            EventKind::Tickets(c) => {
                for i in 0..self.nodes.len() {
                    if let Ok(t) = self.nodes[i].emit_ticket(c) {
                        let to = self.graph.neighbors(i).to_vec();
                        self.transmit(Sender::Node(i as u32), &to, Rc::new(Msg::Ticket(t)), false);
                    }
                }
            }
            EventKind::BsDisclosure(c) => {
                let d = self.tc.build_disclosure(c, self.now_s())?;
                self.bs_send(Msg::Disclosure(d));
            }
            EventKind::BsRevocation(k) => {
                let r = self.revocations[k].clone();
                self.bs_send(Msg::Revocation(r));
            }
            EventKind::Inject(k) => {
                let inj = self.injections[k].clone();
                let to = match inj.from {
                    AdversaryPosition::Target(t) => vec![t],
                    AdversaryPosition::At(x, y) => self.graph.in_range_of((x, y)),
                };
                self.transmit(Sender::Adversary, &to, Rc::new(inj.msg), true);
            }
            EventKind::Deliver { to, msg, id, adversarial } => self.deliver(to, msg, id, adversarial),
        }
        Ok(())
    }

    fn bs_send(&mut self, msg: Msg) {
        let to = self.bs_reach.clone();
        self.transmit(Sender::Bs, &to, Rc::new(msg), false);
    }

    fn trace_node(s: Sender) -> TraceNode {
        match s {
            Sender::Node(i) => TraceNode::Node(i as u16),
            Sender::Bs => TraceNode::Bs,
            Sender::Adversary => TraceNode::Adversary,
        }
    }

    fn record(&mut self, node: TraceNode, event: fmt::Arguments<'_>, bytes: usize, energy: f64, verdict: &str) {
        if self.trace.enabled() {
            self.trace.push(TraceRecord {
                time_s: self.now_s(),
                node,
                event: event.to_string(),
                bytes: bytes as u64,
                energy_mj: energy,
                verdict: verdict.to_string(),
            });
        }
    }

    /// Sends `msg` from `sender` to each receiver over independent lossy links.
    fn transmit(&mut self, sender: Sender, receivers: &[u32], msg: Rc<Msg>, adversarial: bool) {
        let bytes = msg.encode();
        let id = crypto::hash(&bytes);
        let len = bytes.len();
        let on_air = codec::on_air_len(len);
        let kind = msg.kind();
        if let Sender::Node(i) = sender {
            let mj = on_air as f64 * self.config.costs.tx_per_octet;
            self.ledger.charge(i as usize, Category::Tx, mj).expect("non-negative");
            if adversarial {
                self.impact.relays += 1;
                self.impact.relay_tx_mj += mj;
            }
            self.record(Self::trace_node(sender), format_args!("tx_{kind}"), on_air, mj, "sent");
        } else {
            self.record(Self::trace_node(sender), format_args!("tx_{kind}"), on_air, 0.0, "sent");
        }
        // BA broadcasts carry no clear counter; jams key them by schedule.
        let cycle = msg.cycle().or_else(|| {
            let c = (self.now_s() / self.config.delta_s).floor();
            (c >= 1.0).then(|| c.min(self.config.cycles as f64) as u16)
        });
        let p = self.graph.p_loss;
        let at = self.now_us + to_us(self.config.hop_latency_s);
        for &to in receivers {
            if let (Some(c), false) = (cycle, adversarial) {
                if self.jams.contains(&Jam { node: to, kind, cycle: c }) {
                    self.record(TraceNode::Node(to as u16), format_args!("rx_{kind}"), 0, 0.0, "jammed");
                    continue;
                }
            }
            let (received, complete) = link_receive(len, p, self.config.loss, &mut self.rng);
            let mj = received as f64 * self.config.costs.rx_per_octet;
            if received > 0 {
                self.ledger.charge(to as usize, Category::Rx, mj).expect("non-negative");
                if adversarial {
                    self.impact.rx_mj += mj;
                }
            }
            let verdict = if complete { "delivered" } else { "lost" };
            self.record(TraceNode::Node(to as u16), format_args!("rx_{kind}"), received, mj, verdict);
            if complete {
                self.push(at, EventKind::Deliver { to, msg: Rc::clone(&msg), id, adversarial });
            }
        }
    }

    fn charge_work(&mut self, i: usize, adversarial: bool) {
        let ops: OpCounts = self.nodes[i].take_work();
        if ops.is_zero() {
            return;
        }
        let mj = self.config.costs.ops_cost(&ops);
        self.ledger.charge_ops(i, &ops, &self.config.costs).expect("non-negative");
        if adversarial {
            self.impact.processing_mj += mj;
        }
    }

    /// Attributes decryption attempts on adversary messages settled by a
    /// disclosure to the attack. The node's ledger was already charged.
    fn charge_discards(&mut self, i: usize, out: &DisclosureOutcome) {
        let mine = &mut self.adversary_buffered[i];
        if mine.is_empty() {
            return;
        }
        self.impact.authenticated += out.accepted.iter().filter(|id| mine.contains(*id)).count() as u64;
        let attempts: u64 = out
            .discarded
            .iter()
            .filter(|(id, _)| mine.contains(id))
            .map(|(_, why)| match (self.config.variant, why) {
                (Variant::Ba, _) => out.released.len().max(1) as u64,
                (Variant::Iba, Discard::NoMatchingKey) => 0,
                (Variant::Iba, _) => 2,
            })
            .sum();
        self.impact.processing_mj += attempts as f64 * self.config.costs.aes;
        let still: HashSet<Digest> = self.nodes[i].buffered_broadcasts().map(|(id, _)| id).collect();
        mine.retain(|id| still.contains(id));
    }

    fn update_bogus(&mut self, i: usize) {
        let mine = &self.adversary_buffered[i];
        if mine.is_empty() && self.peak_bogus[i] == 0 {
            return;
        }
        let octets: usize = self.nodes[i].buffered_broadcasts().filter(|(id, _)| mine.contains(id)).map(|(_, len)| len).sum();
        self.peak_bogus[i] = self.peak_bogus[i].max(octets);
        self.record(TraceNode::Node(i as u16), format_args!("bogus_buffer"), octets, 0.0, "");
    }

    fn relay(&mut self, i: usize, msg: Rc<Msg>, adversarial: bool) {
        let to = self.graph.neighbors(i).to_vec();
        self.transmit(Sender::Node(i as u32), &to, msg, adversarial);
    }

    fn deliver(&mut self, to: u32, msg: Rc<Msg>, id: Digest, adversarial: bool) {
        let i = to as usize;
        let local = self.now_s() + self.offsets[i];
        let multihop = self.config.bs_mode == BsMode::Multihop;
        let node_tag = TraceNode::Node(to as u16);
        match &*msg {
            Msg::Cycle(m) => {
                let fresh = self.seen[i].insert(id);
                let adm = self.nodes[i].on_cycle_message(m.clone(), local);
                if adversarial && adm.is_buffered() {
                    self.impact.admitted += 1;
                    self.adversary_buffered[i].insert(id);
                }
                self.record(node_tag, format_args!("admit_cycle"), 0, 0.0, admission_label(adm));
                self.charge_work(i, adversarial);
                self.update_bogus(i);
                let relay = match self.config.variant {
                    Variant::Ba => fresh,
                    Variant::Iba => adm == Admission::Buffered { verified: true },
                };
                if multihop && relay {
                    self.relay(i, msg, adversarial);
                }
            }
            Msg::Disclosure(d) => {
                let out = self.nodes[i].on_disclosure(d);
                let verdict = match out.verdict {
                    DisclosureVerdict::Accepted => "accepted",
                    DisclosureVerdict::Stale => "stale",
                    DisclosureVerdict::ChainMismatch => "chain_mismatch",
                };
                self.record(node_tag, format_args!("verify_disclosure"), 0, 0.0, verdict);
                if self.trace.enabled() {
                    for (peer, c) in &out.new_keys {
                        let label = format!("peer={peer} cycle={c}");
                        self.record(node_tag, format_args!("derive_key"), 0, 0.0, &label);
                    }
                }
                self.charge_work(i, adversarial);
                self.charge_discards(i, &out);
                self.update_bogus(i);
                if multihop && out.verdict == DisclosureVerdict::Accepted {
                    self.relay(i, Rc::clone(&msg), adversarial);
                }
                for ack in out.acks {
                    self.transmit(Sender::Node(to), &[ack.to.0 as u32], Rc::new(Msg::Ack(ack)), adversarial);
                }
            }
            Msg::Ticket(t) => {
                let adm = self.nodes[i].on_ticket(t.clone());
                if adversarial && adm.is_buffered() {
                    self.impact.admitted += 1;
                }
                self.record(node_tag, format_args!("admit_ticket"), 0, 0.0, admission_label(adm));
            }
            Msg::Ack(a) => {
                let v = self.nodes[i].on_ack(a);
                let label = match v {
                    AckVerdict::Verified => "verified",
                    AckVerdict::Mismatch => "mismatch",
                    AckVerdict::Early => "early",
                    AckVerdict::Ignored => "ignored",
                };
                self.record(node_tag, format_args!("verify_ack"), 0, 0.0, label);
                self.charge_work(i, adversarial);
            }
            Msg::Revocation(r) => {
                let fresh = self.seen[i].insert(id);
                let adm = self.nodes[i].on_revocation(r.clone());
                self.record(node_tag, format_args!("admit_revocation"), 0, 0.0, admission_label(adm));
                if multihop && fresh {
                    self.relay(i, msg, adversarial);
                }
            }
        }
    }

    /// Whether `i` and `j` hold an identical key for some common cycle.
    pub fn pair_shares_key(&self, i: usize, j: usize) -> bool {
        let (a, b) = (&self.nodes[i], &self.nodes[j]);
        let (ia, ib) = (a.id(), b.id());
        a.links()
            .get(&ib)
            .is_some_and(|l| l.keys.iter().any(|(c, k)| b.pairwise_key(ia, *c) == Some(*k)))
    }

    /// Shared key plus a verified ack in each direction.
    pub fn pair_established(&self, i: usize, j: usize) -> bool {
        let (a, b) = (&self.nodes[i], &self.nodes[j]);
        self.pair_shares_key(i, j) && a.is_established(b.id()) && b.is_established(a.id())
    }

    /// Fraction of adjacent pairs sharing a key; `None` without edges.
    pub fn shared_pair_fraction(&self) -> Option<f64> {
        let edges: Vec<_> = self.graph.edges().collect();
        if edges.is_empty() {
            return None;
        }
        let ok = edges.iter().filter(|&&(i, j)| self.pair_shares_key(i, j)).count();
        Some(ok as f64 / edges.len() as f64)
    }
}

fn admission_label(a: Admission) -> &'static str {
    match a {
        Admission::Buffered { verified: true } => "buffered_verified",
        Admission::Buffered { verified: false } => "buffered",
        Admission::Duplicate => "duplicate",
        Admission::Dropped => "dropped",
        Admission::Rejected(r) => match r {
            Reject::Stale => "rejected_stale",
            Reject::WrongCycle => "rejected_wrong_cycle",
            Reject::AnchorMismatch => "rejected_anchor",
            Reject::Revoked => "rejected_revoked",
            Reject::OwnTicket => "rejected_own",
            Reject::WrongVariant => "rejected_variant",
        },
    }
}
