//! Scenario files.
//!
//! ```toml
//! seed = 7
//! replicas = 20
//!
//! [network]
//! nodes = 100
//! side_m = 500.0
//! range_m = 30.0
//! p_loss = 0.1
//! bs_mode = "powerful"      # or "multihop"
//! loss = "packet"           # or "message"
//!
//! [protocol]
//! variant = "iba"           # or "ba"
//! backend = "toy-group"     # or "ecc160"
//! cycles = 3
//! delta_s = 600.0
//! delay_s = 60.0
//! cost_table = "cost_table.toml"
//!
//! [attack]
//! kind = "memory-flood"
//! tau_min = 5.0
//! ```
//!
//! Relative `cost_table` paths resolve against the scenario file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wsnkm_core::crypto::Backend;
use wsnkm_core::energy::CostTable;
use wsnkm_core::{NodeId, Variant};

use crate::adversary::AttackPlan;
use crate::netsim::{BsMode, LossGranularity, SimConfig};
use crate::SimError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub nodes: usize,
    pub side_m: f64,
    pub range_m: f64,
    pub p_loss: f64,
    pub bs_mode: BsMode,
    pub loss: LossGranularity,
    pub hop_latency_s: f64,
    pub clock_offset_max_s: f64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        NetworkSection {
            nodes: 100,
            side_m: 500.0,
            range_m: 30.0,
            p_loss: 0.0,
            bs_mode: BsMode::Powerful,
            loss: LossGranularity::Packet,
            hop_latency_s: 0.0,
            clock_offset_max_s: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Revocation {
    pub cycle: u16,
    pub ids: Vec<u16>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolSection {
    pub variant: Variant,
    pub backend: Backend,
    pub cycles: u16,
    pub delta_s: f64,
    pub delay_s: f64,
    pub signatures: Option<usize>,
    pub buffer_octets: usize,
    pub epsilon_s: f64,
    pub cost_table: Option<PathBuf>,
    pub revocations: Vec<Revocation>,
    pub trace: bool,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        let d = SimConfig::default();
        ProtocolSection {
            variant: d.variant,
            backend: d.backend,
            cycles: 3,
            delta_s: d.delta_s,
            delay_s: d.delay_s,
            signatures: None,
            buffer_octets: d.buffer_capacity,
            epsilon_s: d.epsilon_s,
            cost_table: None,
            revocations: Vec::new(),
            trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: Option<u64>,
    #[serde(default = "one")]
    pub replicas: usize,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub attack: Option<AttackPlan>,
    /// Cost table loaded from `protocol.cost_table`, or the default.
    #[serde(skip)]
    pub costs: Option<CostTable>,
}

fn one() -> usize {
    1
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            seed: None,
            replicas: 1,
            network: NetworkSection::default(),
            protocol: ProtocolSection::default(),
            attack: None,
            costs: None,
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, SimError> {
        toml::from_str(text).map_err(|e| SimError::Parse(e.to_string()))
    }

    /// Reads a scenario file and the cost table it names.
    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::Parse(format!("{}: {e}", path.display())))?;
        let mut s = Scenario::parse(&text)?;
        if let Some(rel) = &s.protocol.cost_table {
            let full = path.parent().unwrap_or(Path::new(".")).join(rel);
            s.costs = Some(load_cost_table(&full)?);
        }
        Ok(s)
    }

    pub fn seed(&self) -> Result<u64, SimError> {
        self.seed.ok_or_else(|| SimError::Validation("a seed is required for reproducible runs".into()))
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.seed()?;
        if self.replicas == 0 {
            return Err(SimError::Validation("replica count must be at least 1".into()));
        }
        let n = &self.network;
        if n.nodes == 0 || n.nodes > u16::MAX as usize {
            return Err(SimError::Validation("node count must be in 1..=65535".into()));
        }
        if !(n.side_m > 0.0) || !(n.range_m >= 0.0) || !(0.0..=1.0).contains(&n.p_loss) {
            return Err(SimError::Validation("need side > 0, range >= 0 and p_loss in [0, 1]".into()));
        }
        if let Some(a) = &self.attack {
            a.validate()?;
            if a.target as usize >= n.nodes {
                return Err(SimError::Validation("attack target is not a deployed node".into()));
            }
        }
        if let Some(r) = self.protocol.revocations.iter().flat_map(|r| &r.ids).find(|&&id| id as usize >= n.nodes) {
            return Err(SimError::Validation(format!("revoked id {r} is not a deployed node")));
        }
        self.sim_config().validate()
    }

    pub fn sim_config(&self) -> SimConfig {
        let p = &self.protocol;
        SimConfig {
            variant: p.variant,
            backend: p.backend,
            bs_mode: self.network.bs_mode,
            loss: self.network.loss,
            cycles: p.cycles,
            delta_s: p.delta_s,
            delay_s: p.delay_s,
            signatures: p.signatures,
            buffer_capacity: p.buffer_octets,
            epsilon_s: p.epsilon_s,
            hop_latency_s: self.network.hop_latency_s,
            clock_offset_max_s: self.network.clock_offset_max_s,
            costs: self.costs.unwrap_or_else(wsnkm_core::analytics::default_cost_table),
            revocations: p.revocations.iter().map(|r| (r.cycle, r.ids.iter().map(|&i| NodeId(i)).collect())).collect(),
            trace: p.trace,
        }
    }
}

pub fn load_cost_table(path: &Path) -> Result<CostTable, SimError> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::Parse(format!("{}: {e}", path.display())))?;
    let table: CostTable = toml::from_str(&text).map_err(|e| SimError::Parse(e.to_string()))?;
    table.validate().map_err(|e| SimError::Validation(e.to_string()))?;
    Ok(table)
}

pub fn cost_table_toml(table: &CostTable) -> String {
    let mut s = String::from("# Energy per octet and per primitive invocation, in millijoules.\n");
    s.push_str(&toml::to_string(table).expect("plain numbers serialize"));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_sections() {
        let s = Scenario::parse("seed = 3").unwrap();
        assert_eq!(s.network, NetworkSection::default());
        assert_eq!(s.replicas, 1);
        s.validate().unwrap();
    }

    #[test]
    fn missing_seed_is_a_validation_error() {
        let s = Scenario::parse("replicas = 2").unwrap();
        assert_eq!(s.validate().unwrap_err().exit_code(), 3);
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        let e = Scenario::parse("seed = 1\n[network]\nnodez = 4").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn full_file_parses() {
        let s = Scenario::parse(
            r#"
            seed = 11
            replicas = 4
            [network]
            nodes = 50
            bs_mode = "multihop"
            loss = "message"
            [protocol]
            variant = "ba"
            backend = "ecc160"
            cycles = 2
            revocations = [{ cycle = 2, ids = [3] }]
            [attack]
            kind = "energy-flood"
            count = 5
            window_s = [0.0, 600.0]
            "#,
        )
        .unwrap();
        s.validate().unwrap();
        let c = s.sim_config();
        assert_eq!(c.variant, Variant::Ba);
        assert_eq!(c.bs_mode, BsMode::Multihop);
        assert_eq!(c.revocations, vec![(2, vec![NodeId(3)])]);
        assert_eq!(s.attack.unwrap().count, 5);
    }

    #[test]
    fn out_of_range_target_is_rejected() {
        let s = Scenario::parse("seed = 1\n[network]\nnodes = 3\n[attack]\nkind = \"tamper\"\ntarget = 3").unwrap();
        assert!(matches!(s.validate(), Err(SimError::Validation(_))));
    }

    #[test]
    fn cost_table_text_round_trips() {
        let t = wsnkm_core::analytics::default_cost_table();
        let back: CostTable = toml::from_str(&cost_table_toml(&t)).unwrap();
        assert_eq!(back, t);
    }
}
