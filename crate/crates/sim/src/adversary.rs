//! Attack injectors: forged-broadcast floods, bit tampering and replays.
//!
//! Forgeries are random ciphertext in valid framing, the strongest traffic an
//! attacker without chain keys can produce.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use wsnkm_core::codec::{self, SEALED_LEN};
use wsnkm_core::crypto;
use wsnkm_core::trust_center::CycleMessage;
use wsnkm_core::{NodeId, Variant};

use crate::netsim::{AdversaryPosition, Injection, Jam, Msg, SimConfig, Simulation};
use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    MemoryFlood,
    EnergyFlood,
    Tamper,
    Replay1,
    Replay2,
    Replay3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackPlan {
    pub kind: AttackKind,
    /// Upper end of the `[1, tau]` minute gap between memory-flood messages.
    #[serde(default = "default_tau")]
    pub tau_min: f64,
    /// Energy-flood injection window in seconds.
    #[serde(default = "default_window")]
    pub window_s: (f64, f64),
    /// Messages to inject; memory floods stop at the end of the run instead
    /// when this is zero.
    #[serde(default)]
    pub count: usize,
    /// Target node of memory floods, tampering and replays.
    #[serde(default)]
    pub target: u32,
}

fn default_tau() -> f64 {
    5.0
}

fn default_window() -> (f64, f64) {
    (0.0, 600.0)
}

impl AttackPlan {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.kind == AttackKind::MemoryFlood && !(self.tau_min > 1.0) {
            return Err(SimError::Validation("tau must exceed one minute".into()));
        }
        let (lo, hi) = self.window_s;
        if !(lo >= 0.0 && hi >= lo) {
            return Err(SimError::Validation("attack window must satisfy 0 <= start <= end".into()));
        }
        Ok(())
    }
}

/// Flips bit `bit` (most significant bit of octet 0 first).
pub fn tamper(message: &[u8], bit: usize) -> Vec<u8> {
    let mut out = message.to_vec();
    out[bit / 8] ^= 0x80 >> (bit % 8);
    out
}

/// Every single-bit variant of `msg`; `None` where the flipped octets no
/// longer decode and a receiver drops the frame.
pub fn bit_flips(msg: &CycleMessage) -> impl Iterator<Item = Option<CycleMessage>> {
    let bytes = msg.encode();
    let variant = msg.variant();
    (0..bytes.len() * 8).map(move |b| CycleMessage::decode(variant, &tamper(&bytes, b)).ok())
}

/// Random ciphertext framed as a broadcast of `variant` claiming `cycle`.
pub fn bogus_cycle_message<R: RngCore + ?Sized>(variant: Variant, cycle: u16, rng: &mut R) -> CycleMessage {
    let mut block = || {
        let mut b = [0u8; SEALED_LEN];
        rng.fill_bytes(&mut b);
        b
    };
    match variant {
        Variant::Ba => CycleMessage::Ba { sealed: block() },
        Variant::Iba => CycleMessage::Iba { part1: block(), part2: block(), cycle },
    }
}

/// Cycle a well-informed forger claims at time `t`: the one after the last
/// disclosed cycle, which is the cycle in-sync nodes expect next.
pub fn claimed_cycle(config: &SimConfig, t: f64) -> u16 {
    let disclosed = (1..=config.cycles).take_while(|&c| config.cycle_start(c) + config.delay_s <= t).count() as u16;
    (disclosed + 1).min(codec::MAX_CYCLE)
}

/// Memory flood at `plan.target`: inter-arrival gaps uniform on `[1, tau]`
/// minutes from time 0 until `horizon_s` or `plan.count` messages.
pub fn memory_flood<R: Rng + ?Sized>(config: &SimConfig, plan: &AttackPlan, horizon_s: f64, rng: &mut R) -> Vec<Injection> {
    let mut out = Vec::new();
    let mut t = 0.0;
    loop {
        t += rng.gen_range(1.0..plan.tau_min) * 60.0;
        if t > horizon_s || (plan.count > 0 && out.len() == plan.count) {
            return out;
        }
        let msg = bogus_cycle_message(config.variant, claimed_cycle(config, t), rng);
        out.push(Injection { time_s: t, from: AdversaryPosition::Target(plan.target), msg: Msg::Cycle(msg) });
    }
}

/// Energy flood: `plan.count` forgeries at times uniform on the plan window,
/// each sent from a uniformly random point of the `side x side` field.
pub fn energy_flood<R: Rng + ?Sized>(config: &SimConfig, plan: &AttackPlan, side: f64, rng: &mut R) -> Vec<Injection> {
    let (lo, hi) = plan.window_s;
    (0..plan.count)
        .map(|_| {
            let t = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            let at = AdversaryPosition::At(rng.gen_range(0.0..side), rng.gen_range(0.0..side));
            let msg = bogus_cycle_message(config.variant, claimed_cycle(config, t), rng);
            Injection { time_s: t, from: at, msg: Msg::Cycle(msg) }
        })
        .collect()
}

/// Outcome of one replay case against one target.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub case: u8,
    pub variant: Variant,
    /// Times the target authenticated the adversary's copy.
    pub authenticated: u64,
    /// Keys the target derived with its peer in the attacked cycle.
    pub keys_in_cycle: usize,
    pub link_established: bool,
    pub duplicate_keys: bool,
    pub passed: bool,
}

/// Cycle attacked by every replay case.
pub const REPLAY_CYCLE: u16 = 2;

/// Runs replay case 1, 2 or 3 on a two-node lossless network with node 0 as
/// the target.
///
/// 1. The cycle's own broadcast is resent before disclosure.
/// 2. The previous cycle's broadcast is resent during this cycle.
/// 3. The target's copies of the broadcast and disclosure are jammed. After
///    disclosure the attacker re-encrypts the broadcast with `Delta + t`,
///    delivers it late, then replays the disclosure.
pub fn replay(case: u8, variant: Variant, rng: rand_chacha::ChaCha8Rng) -> Result<ReplayReport, SimError> {
    if !(1..=3).contains(&case) {
        return Err(SimError::Validation(format!("replay case {case} does not exist")));
    }
    let c = REPLAY_CYCLE;
    let config = SimConfig { variant, cycles: 3, ..Default::default() };
    let graph = crate::netsim::DeploymentGraph::from_positions(vec![(0.0, 0.0), (10.0, 0.0)], 100.0, 30.0, 0.0)?;
    let mut sim = Simulation::new(config.clone(), graph, rng)?;
    let target = AdversaryPosition::Target(0);
    let t_c = config.cycle_start(c);
    let disclosed_at = t_c + config.delay_s;
    match case {
        1 => {
            let honest = sim.trust_center_mut().build_cycle_message(c, variant)?;
            let time_s = t_c + config.delay_s / 3.0;
            sim.inject(Injection { time_s, from: target, msg: Msg::Cycle(honest) });
        }
        2 => {
            let old = sim.trust_center_mut().build_cycle_message(c - 1, variant)?;
            let time_s = t_c + config.delay_s / 3.0;
            sim.inject(Injection { time_s, from: target, msg: Msg::Cycle(old) });
        }
        _ => {
            sim.jam(Jam { node: 0, kind: "cycle", cycle: c });
            sim.jam(Jam { node: 0, kind: "disclosure", cycle: c });
            let honest = sim.trust_center_mut().build_cycle_message(c, variant)?;
            let k_auth = sim.trust_center().k_auth(c).expect("cycle in chain");
            let forged = shift_delta(&honest, &k_auth, c, config.delay_s as u16)?;
            sim.inject(Injection { time_s: disclosed_at, from: target, msg: Msg::Cycle(forged) });
            let d = sim.trust_center().build_disclosure(c, disclosed_at)?;
            sim.inject(Injection { time_s: disclosed_at + 0.5, from: target, msg: Msg::Disclosure(d) });
        }
    }
    sim.run_until(disclosed_at + 1.0)?;
    let peer = NodeId(1);
    let node = &sim.nodes()[0];
    let keys_in_cycle = usize::from(node.pairwise_key(peer, c).is_some());
    let authenticated = sim.impact().authenticated;
    let duplicate_keys = node.stats().keys_derived as usize != node.links().get(&peer).map_or(0, |l| l.keys.len());
    sim.run()?;
    let link_established = sim.pair_established(0, 1);
    let passed = match case {
        1 => link_established && !duplicate_keys && keys_in_cycle == 1,
        2 => authenticated == 0 && link_established,
        _ => authenticated == 0 && keys_in_cycle == 0,
    };
    Ok(ReplayReport { case, variant, authenticated, keys_in_cycle, link_established, duplicate_keys, passed })
}

/// Re-seals a broadcast of `cycle` with its gap field increased by `extra`
/// seconds, as an attacker holding the disclosed auth key could.
fn shift_delta(msg: &CycleMessage, k_auth: &crypto::SymKey, cycle: u16, extra: u16) -> Result<CycleMessage, SimError> {
    let bad = |_| SimError::Validation("broadcast does not open under its own key".into());
    let codec_err = |e: codec::CodecError| SimError::Validation(e.to_string());
    Ok(match msg {
        CycleMessage::Ba { sealed } => {
            let mut r = codec::open_ba(k_auth, sealed, cycle).map_err(bad)?;
            r.delta += extra;
            CycleMessage::Ba { sealed: codec::seal_ba(k_auth, &r).map_err(codec_err)? }
        }
        CycleMessage::Iba { part1, part2, cycle } => {
            let mut r = codec::open_part1(k_auth, part1, *cycle).map_err(bad)?;
            r.delta += extra;
            CycleMessage::Iba { part1: codec::seal_part1(k_auth, &r).map_err(codec_err)?, part2: *part2, cycle: *cycle }
        }
    })
}
