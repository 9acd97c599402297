//! Experiment recipes. Each produces its artifacts in memory; the CLI writes
//! them to the output directory.
//!
//! | recipe | file | columns |
//! |---|---|---|
//! | `run` | `run.csv` | replica, nodes, mean_degree, edges, pairs_sharing, pairs_established, network_energy_mj, attack_admitted, attack_authenticated, attack_relays, attack_wasted_mj, target_peak_bogus_octets |
//! | `fig2` | `fig2.csv` | variant, tau_min, mean_peak_bogus_octets, std_error, mean_admitted |
//! | `fig3` | `fig3.csv` | variant, nodes, messages, mean_wasted_mj, std_error, mean_relay_tx_mj, mean_relays, mean_one_hop_bound_mj |
//! | `fig6` | `fig6.csv` | p_loss, m, p_r, p_share, sim_pairs_sharing, sim_std_error |
//! | `fig7` | `fig7.csv` | scheme, nodes, mean_degree, energy_mj |
//! | `table4` | `table4.csv` | scheme, tx_octets, rx_octets, sha1, aes, hmac, ecdh, cert, bloom, energy_mj, reference_mj |
//! | `table5` | `table5.csv` | scheme, max_network_size |
//! | `replay-suite` | `replay.csv` | variant, case, authenticated, keys_in_cycle, link_established, duplicate_keys, passed |
//! | `reception` | `reception.csv` | kind, k, p_loss, p_r, residual, sim_reception, sim_std_error |
//! | `calibrate` | `cost_table.toml` | |
//! | `provision` | `node-<id>.cred` | |
//!
//! `run` also writes `trace-<replica>.csv` when the scenario enables tracing.
//! Averages are over the scenario's replicas; every configuration inside a
//! recipe reuses the same replica seeds.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wsnkm_core::analytics::{self, default_cost_table};
use wsnkm_core::codec;
use wsnkm_core::crypto::GroupParams;
use wsnkm_core::energy::{scheme_cost, scheme_energy, Scheme};
use wsnkm_core::trust_center::TrustCenter;
use wsnkm_core::{NodeId, Variant};

use crate::adversary::{self, AttackKind, AttackPlan};
use crate::netsim::{
    blind_flood, deploy, run_replicas, AdversaryPosition, BsMode, FloodOrigin, FloodPolicy, Injection,
    LossGranularity, Msg, SimConfig, Simulation,
};
use crate::scenario::{cost_table_toml, Scenario};
use crate::trace::RunningMean;
use crate::{credentials, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recipe {
    Run,
    Fig2,
    Fig3,
    Fig6,
    Fig7,
    Table4,
    Table5,
    ReplaySuite,
    Reception,
    Calibrate,
    Provision,
}

impl Recipe {
    pub const ALL: [Recipe; 11] = [
        Recipe::Run,
        Recipe::Fig2,
        Recipe::Fig3,
        Recipe::Fig6,
        Recipe::Fig7,
        Recipe::Table4,
        Recipe::Table5,
        Recipe::ReplaySuite,
        Recipe::Reception,
        Recipe::Calibrate,
        Recipe::Provision,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Recipe::Run => "run",
            Recipe::Fig2 => "fig2",
            Recipe::Fig3 => "fig3",
            Recipe::Fig6 => "fig6",
            Recipe::Fig7 => "fig7",
            Recipe::Table4 => "table4",
            Recipe::Table5 => "table5",
            Recipe::ReplaySuite => "replay-suite",
            Recipe::Reception => "reception",
            Recipe::Calibrate => "calibrate",
            Recipe::Provision => "provision",
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Recipe {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Recipe::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| SimError::Validation(format!("unknown recipe {s:?}")))
    }
}

/// A file produced by a recipe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

fn csv_artifact<S: Serialize>(name: &str, rows: &[S]) -> Result<Artifact, SimError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| SimError::Io(e.into_error()))?;
    Ok(Artifact { name: name.into(), bytes })
}

pub fn run_recipe(recipe: Recipe, scenario: &Scenario) -> Result<Vec<Artifact>, SimError> {
    scenario.validate()?;
    match recipe {
        Recipe::Run => run(scenario),
        Recipe::Fig2 => Ok(vec![csv_artifact("fig2.csv", &fig2_rows(scenario)?)?]),
        Recipe::Fig3 => Ok(vec![csv_artifact("fig3.csv", &fig3_rows(scenario)?)?]),
        Recipe::Fig6 => Ok(vec![csv_artifact("fig6.csv", &fig6_rows(scenario, &FIG6_P_LOSS, FIG6_MAX_M)?)?]),
        Recipe::Fig7 => Ok(vec![csv_artifact("fig7.csv", &fig7_rows(scenario)?)?]),
        Recipe::Table4 => Ok(vec![csv_artifact("table4.csv", &table4_rows(scenario))?]),
        Recipe::Table5 => Ok(vec![csv_artifact("table5.csv", &table5_rows()?)?]),
        Recipe::ReplaySuite => Ok(vec![csv_artifact("replay.csv", &replay_rows(scenario.seed()?)?)?]),
        Recipe::Reception => Ok(vec![csv_artifact("reception.csv", &reception_rows(scenario)?)?]),
        Recipe::Calibrate => {
            let table = cost_table_toml(&default_cost_table());
            Ok(vec![Artifact { name: "cost_table.toml".into(), bytes: table.into_bytes() }])
        }
        Recipe::Provision => provision(scenario),
    }
}

fn mean_se(xs: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let m: RunningMean = xs.into_iter().collect();
    (m.mean(), m.std_error())
}

fn replica_sim(scenario: &Scenario, config: SimConfig, rng: &mut ChaCha8Rng) -> Result<Simulation, SimError> {
    let n = &scenario.network;
    let graph = deploy(n.nodes, n.side_m, n.range_m, n.p_loss, rng)?;
    Simulation::new(config, graph, ChaCha8Rng::from_rng(rng).expect("infallible"))
}

fn horizon(config: &SimConfig) -> f64 {
    config.cycle_start(config.cycles) + config.delay_s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRow {
    pub replica: usize,
    pub nodes: usize,
    pub mean_degree: f64,
    pub edges: usize,
    pub pairs_sharing: usize,
    pub pairs_established: usize,
    pub network_energy_mj: f64,
    pub attack_admitted: u64,
    pub attack_authenticated: u64,
    pub attack_relays: u64,
    pub attack_wasted_mj: f64,
    pub target_peak_bogus_octets: usize,
}

fn attack_injections(
    sim: &mut Simulation,
    plan: &AttackPlan,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Injection>, SimError> {
    let config = sim.config().clone();
    Ok(match plan.kind {
        AttackKind::MemoryFlood => adversary::memory_flood(&config, plan, horizon(&config), rng),
        AttackKind::EnergyFlood => adversary::energy_flood(&config, plan, sim.graph().side, rng),
        AttackKind::Tamper => {
            let honest = sim.trust_center_mut().build_cycle_message(1, config.variant)?;
            let at = config.cycle_start(1) + config.delay_s / 4.0;
            adversary::bit_flips(&honest)
                .flatten()
                .map(|m| Injection { time_s: at, from: AdversaryPosition::Target(plan.target), msg: Msg::Cycle(m) })
                .collect()
        }
        AttackKind::Replay1 | AttackKind::Replay2 | AttackKind::Replay3 => Vec::new(),
    })
}

fn run(scenario: &Scenario) -> Result<Vec<Artifact>, SimError> {
    if let Some(plan) = scenario.attack.as_ref().filter(|p| {
        matches!(p.kind, AttackKind::Replay1 | AttackKind::Replay2 | AttackKind::Replay3)
    }) {
        let case = match plan.kind {
            AttackKind::Replay1 => 1,
            AttackKind::Replay2 => 2,
            _ => 3,
        };
        let rows: Vec<_> = replay_rows(scenario.seed()?)?.into_iter().filter(|r| r.case == case).collect();
        return Ok(vec![csv_artifact("run.csv", &rows)?]);
    }
    let seed = scenario.seed()?;
    let results = run_replicas(seed, scenario.replicas, |r, mut rng| -> Result<_, SimError> {
        let mut sim = replica_sim(scenario, scenario.sim_config(), &mut rng)?;
        let target = scenario.attack.as_ref().map_or(0, |p| p.target as usize);
        if let Some(plan) = &scenario.attack {
            for inj in attack_injections(&mut sim, plan, &mut rng)? {
                sim.inject(inj);
            }
        }
        sim.run()?;
        let g = sim.graph();
        let edges: Vec<_> = g.edges().collect();
        let row = RunRow {
            replica: r,
            nodes: g.len(),
            mean_degree: g.mean_degree(),
            edges: edges.len(),
            pairs_sharing: edges.iter().filter(|&&(i, j)| sim.pair_shares_key(i, j)).count(),
            pairs_established: edges.iter().filter(|&&(i, j)| sim.pair_established(i, j)).count(),
            network_energy_mj: sim.ledger().total(),
            attack_admitted: sim.impact().admitted,
            attack_authenticated: sim.impact().authenticated,
            attack_relays: sim.impact().relays,
            attack_wasted_mj: sim.impact().total_mj(),
            target_peak_bogus_octets: sim.peak_bogus_octets()[target],
        };
        let mut trace = Vec::new();
        if sim.trace().enabled() {
            sim.trace().write_csv(&mut trace)?;
        }
        Ok((row, trace))
    });
    let mut rows = Vec::new();
    let mut artifacts = Vec::new();
    for (r, res) in results.into_iter().enumerate() {
        let (row, trace) = res?;
        rows.push(row);
        if scenario.protocol.trace {
            artifacts.push(Artifact { name: format!("trace-{r}.csv"), bytes: trace });
        }
    }
    artifacts.insert(0, csv_artifact("run.csv", &rows)?);
    Ok(artifacts)
}

pub const FIG2_TAUS: [f64; 4] = [2.0, 5.0, 10.0, 20.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig2Row {
    pub variant: String,
    pub tau_min: f64,
    pub mean_peak_bogus_octets: f64,
    pub std_error: f64,
    pub mean_admitted: f64,
}

/// Memory flood at one target for each tau and both variants.
pub fn fig2_rows(scenario: &Scenario) -> Result<Vec<Fig2Row>, SimError> {
    let seed = scenario.seed()?;
    let target = scenario.attack.as_ref().map_or(0, |p| p.target);
    let mut rows = Vec::new();
    for variant in [Variant::Ba, Variant::Iba] {
        for tau in FIG2_TAUS {
            let config = SimConfig { variant, ..scenario.sim_config() };
            let plan = AttackPlan { kind: AttackKind::MemoryFlood, tau_min: tau, window_s: (0.0, 0.0), count: 0, target };
            let out = run_replicas(seed, scenario.replicas, |_, mut rng| -> Result<_, SimError> {
                let mut sim = replica_sim(scenario, config.clone(), &mut rng)?;
                for inj in adversary::memory_flood(&config, &plan, horizon(&config), &mut rng) {
                    sim.inject(inj);
                }
                sim.run()?;
                Ok((sim.peak_bogus_octets()[target as usize] as f64, sim.impact().admitted as f64))
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
            let (mean, se) = mean_se(out.iter().map(|o| o.0));
            rows.push(Fig2Row {
                variant: variant.to_string(),
                tau_min: tau,
                mean_peak_bogus_octets: mean,
                std_error: se,
                mean_admitted: mean_se(out.iter().map(|o| o.1)).0,
            });
        }
    }
    Ok(rows)
}

pub const FIG3_NODES: [usize; 4] = [100, 250, 500, 1000];
/// Forgeries per energy-flood run when the scenario does not set a count.
pub const FIG3_DEFAULT_MESSAGES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig3Row {
    pub variant: String,
    pub nodes: usize,
    pub messages: usize,
    pub mean_wasted_mj: f64,
    pub std_error: f64,
    pub mean_relay_tx_mj: f64,
    pub mean_relays: f64,
    pub mean_one_hop_bound_mj: f64,
}

/// Energy flood over a multihop deployment for each size and both variants.
///
/// The one-hop bound charges every node in range of each injection point
/// for receiving the whole forgery and running one anchor check.
pub fn fig3_rows(scenario: &Scenario) -> Result<Vec<Fig3Row>, SimError> {
    let seed = scenario.seed()?;
    let base = scenario.attack.clone().filter(|p| p.kind == AttackKind::EnergyFlood);
    let messages = base.as_ref().map_or(FIG3_DEFAULT_MESSAGES, |p| p.count);
    let window_s = base.as_ref().map_or((0.0, 600.0), |p| p.window_s);
    let plan = AttackPlan { kind: AttackKind::EnergyFlood, tau_min: 2.0, window_s, count: messages, target: 0 };
    let mut rows = Vec::new();
    for variant in [Variant::Ba, Variant::Iba] {
        for nodes in FIG3_NODES {
            let mut sc = scenario.clone();
            sc.network.nodes = nodes;
            sc.network.bs_mode = BsMode::Multihop;
            let config = SimConfig { variant, cycles: 1, ..sc.sim_config() };
            let costs = config.costs;
            let out = run_replicas(seed, scenario.replicas, |_, mut rng| -> Result<_, SimError> {
                let mut sim = replica_sim(&sc, config.clone(), &mut rng)?;
                let injections = adversary::energy_flood(&config, &plan, sim.graph().side, &mut rng);
                let mut bound = 0.0;
                for inj in injections {
                    if let AdversaryPosition::At(x, y) = inj.from {
                        let heard = sim.graph().in_range_of((x, y)).len() as f64;
                        let len = codec::on_air_len(inj.msg.encode().len()) as f64;
                        bound += heard * (len * costs.rx_per_octet + costs.sha1);
                    }
                    sim.inject(inj);
                }
                sim.run()?;
                let i = *sim.impact();
                Ok((i.total_mj(), i.relay_tx_mj, i.relays as f64, bound))
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
            let (mean, se) = mean_se(out.iter().map(|o| o.0));
            rows.push(Fig3Row {
                variant: variant.to_string(),
                nodes,
                messages,
                mean_wasted_mj: mean,
                std_error: se,
                mean_relay_tx_mj: mean_se(out.iter().map(|o| o.1)).0,
                mean_relays: mean_se(out.iter().map(|o| o.2)).0,
                mean_one_hop_bound_mj: mean_se(out.iter().map(|o| o.3)).0,
            });
        }
    }
    Ok(rows)
}

pub const FIG6_P_LOSS: [f64; 3] = [0.05, 0.1, 0.2];
pub const FIG6_MAX_M: u16 = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig6Row {
    pub p_loss: f64,
    pub m: u16,
    pub p_r: f64,
    pub p_share: f64,
    pub sim_pairs_sharing: f64,
    pub sim_std_error: f64,
}

/// Probability of sharing a key after `m` cycles: the closed form with
/// `p_r = 1 - p_loss` next to the simulated fraction of adjacent pairs
/// holding a common key (powerful base station, whole-message loss).
pub fn fig6_rows(scenario: &Scenario, p_losses: &[f64], max_m: u16) -> Result<Vec<Fig6Row>, SimError> {
    let seed = scenario.seed()?;
    let mut rows = Vec::new();
    for &p_loss in p_losses {
        let mut sc = scenario.clone();
        sc.network.p_loss = p_loss;
        sc.network.bs_mode = BsMode::Powerful;
        sc.network.loss = LossGranularity::Message;
        let config = SimConfig { cycles: max_m.max(1), ..sc.sim_config() };
        let per_replica = run_replicas(seed, scenario.replicas, |_, mut rng| -> Result<_, SimError> {
            let mut sim = replica_sim(&sc, config.clone(), &mut rng)?;
            let mut fractions = Vec::with_capacity(max_m as usize);
            for m in 1..=max_m {
                sim.run_until(config.cycle_start(m) + config.delay_s + config.delay_s / 2.0)?;
                fractions.push(sim.shared_pair_fraction());
            }
            Ok(fractions)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        let p_r = 1.0 - p_loss;
        for m in 0..=max_m {
            let (mean, se) = if m == 0 {
                (0.0, 0.0)
            } else {
                mean_se(per_replica.iter().filter_map(|f| f[m as usize - 1]))
            };
            rows.push(Fig6Row {
                p_loss,
                m,
                p_r,
                p_share: analytics::p_share(m as u32, p_r),
                sim_pairs_sharing: mean,
                sim_std_error: se,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig7Row {
    pub scheme: String,
    pub nodes: usize,
    pub mean_degree: f64,
    pub energy_mj: f64,
}

/// Energy for every node to establish a key with each neighbour, using
/// the per-handshake cost of each scheme.
pub fn fig7_rows(scenario: &Scenario) -> Result<Vec<Fig7Row>, SimError> {
    let seed = scenario.seed()?;
    let table = scenario.sim_config().costs;
    let n = &scenario.network;
    let mut rows = Vec::new();
    for nodes in FIG3_NODES {
        let degree_sums = run_replicas(seed, scenario.replicas, |_, mut rng| {
            deploy(nodes, n.side_m, n.range_m, 0.0, &mut rng).map(|g| g.mean_degree() * g.len() as f64)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        let handshakes = mean_se(degree_sums).0;
        for scheme in Scheme::ALL {
            rows.push(Fig7Row {
                scheme: scheme.to_string(),
                nodes,
                mean_degree: handshakes / nodes as f64,
                energy_mj: handshakes * scheme_energy(&table, scheme),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table4Row {
    pub scheme: String,
    pub tx_octets: u64,
    pub rx_octets: u64,
    pub sha1: u64,
    pub aes: u64,
    pub hmac: u64,
    pub ecdh: u64,
    pub cert: u64,
    pub bloom: u64,
    pub energy_mj: f64,
    pub reference_mj: f64,
}

pub fn table4_rows(scenario: &Scenario) -> Vec<Table4Row> {
    let table = scenario.sim_config().costs;
    Scheme::ALL
        .into_iter()
        .map(|s| {
            let c = scheme_cost(s);
            Table4Row {
                scheme: s.to_string(),
                tx_octets: c.tx_octets,
                rx_octets: c.rx_octets,
                sha1: c.ops.sha1,
                aes: c.ops.aes,
                hmac: c.ops.hmac,
                ecdh: c.ops.dh,
                cert: c.ops.cert,
                bloom: c.ops.bloom,
                energy_mj: scheme_energy(&table, s),
                reference_mj: analytics::reference_energy(s),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table5Row {
    pub scheme: String,
    pub max_network_size: u64,
}

/// Network size limits with 64 KiB of memory and 2-octet ids.
pub fn table5_rows() -> Result<Vec<Table5Row>, SimError> {
    Scheme::ALL
        .into_iter()
        .map(|s| {
            Ok(Table5Row { scheme: s.to_string(), max_network_size: analytics::max_network_size(s, 65536, 2)? })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayRow {
    pub variant: String,
    pub case: u8,
    pub authenticated: u64,
    pub keys_in_cycle: usize,
    pub link_established: bool,
    pub duplicate_keys: bool,
    pub passed: bool,
}

/// All three replay cases under iBA, then under BA for contrast.
pub fn replay_rows(seed: u64) -> Result<Vec<ReplayRow>, SimError> {
    let mut rows = Vec::new();
    for variant in [Variant::Iba, Variant::Ba] {
        for case in 1..=3u8 {
            let r = adversary::replay(case, variant, crate::netsim::replica_rng(seed, case as u64))?;
            rows.push(ReplayRow {
                variant: variant.to_string(),
                case,
                authenticated: r.authenticated,
                keys_in_cycle: r.keys_in_cycle,
                link_established: r.link_established,
                duplicate_keys: r.duplicate_keys,
                passed: r.passed,
            });
        }
    }
    Ok(rows)
}

pub const RECEPTION_K: [f64; 6] = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
pub const RECEPTION_SIM_P_LOSS: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceptionRow {
    pub kind: &'static str,
    pub k: f64,
    pub p_loss: f64,
    pub p_r: f64,
    pub residual: f64,
    pub sim_reception: Option<f64>,
    pub sim_std_error: Option<f64>,
}

/// Solver grid (`kind = grid`) and multihop reception of a single-packet
/// base-station flood from the field centre (`kind = flood`), where `k` is
/// the expected degree of the scenario's deployment.
pub fn reception_rows(scenario: &Scenario) -> Result<Vec<ReceptionRow>, SimError> {
    let mut rows = Vec::new();
    for k in RECEPTION_K {
        for step in 0..=10 {
            let p_loss = step as f64 / 10.0;
            let p_r = analytics::solve_pr(k, p_loss);
            rows.push(ReceptionRow {
                kind: "grid",
                k,
                p_loss,
                p_r,
                residual: analytics::reception_residual(k, p_loss, p_r).abs(),
                sim_reception: None,
                sim_std_error: None,
            });
        }
    }
    for p_loss in RECEPTION_SIM_P_LOSS {
        let (k, mean, se) = flood_reception(scenario, p_loss)?;
        let p_r = analytics::solve_pr(k, p_loss);
        rows.push(ReceptionRow {
            kind: "flood",
            k,
            p_loss,
            p_r,
            residual: analytics::reception_residual(k, p_loss, p_r).abs(),
            sim_reception: Some(mean),
            sim_std_error: Some(se),
        });
    }
    Ok(rows)
}

/// Expected degree and mean per-node reception frequency of a blind flood
/// of one disclosure packet from a base station at the field centre.
pub fn flood_reception(scenario: &Scenario, p_loss: f64) -> Result<(f64, f64, f64), SimError> {
    let n = &scenario.network;
    let k = analytics::expected_degree(n.nodes, n.side_m, n.range_m)?;
    let rates = run_replicas(scenario.seed()?, scenario.replicas, |_, mut rng| -> Result<f64, SimError> {
        let g = deploy(n.nodes, n.side_m, n.range_m, p_loss, &mut rng)?;
        let (cx, cy) = g.center();
        let t = blind_flood(
            &g,
            FloodOrigin::Point(cx, cy),
            codec::DISCLOSURE_LEN,
            FloodPolicy::Ba,
            LossGranularity::Packet,
            &mut rng,
        );
        Ok(t.reception_rate())
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let (mean, se) = mean_se(rates);
    Ok((k, mean, se))
}

/// Credential files for every node of the scenario, from a trust center
/// seeded with the scenario seed.
fn provision(scenario: &Scenario) -> Result<Vec<Artifact>, SimError> {
    let config = scenario.sim_config();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed()?);
    let chain = config.cycles as usize + usize::from(config.variant == Variant::Iba);
    let schedule = TrustCenter::uniform_schedule(0.0, config.delta_s, chain);
    let params = GroupParams::for_backend(config.backend);
    let mut tc = TrustCenter::new(params, chain, config.delay_s, schedule, &mut rng)?;
    let sigs = config.signatures.unwrap_or(config.cycles as usize);
    (0..scenario.network.nodes)
        .map(|i| {
            let c = tc.provision_node(NodeId(i as u16), sigs, &mut rng)?;
            Ok(Artifact { name: credentials::file_name(&c), bytes: c.to_bytes() })
        })
        .collect()
}
