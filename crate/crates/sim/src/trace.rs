//! Event traces and their aggregation into curves.
//!
//! CSV columns: `time_s,node_id,event,bytes,energy_mJ,verdict`. `node_id` is
//! a node number, `bs` or `adversary`. Events are `tx_<kind>` and
//! `rx_<kind>` for radio activity, `admit_<kind>`, `verify_disclosure`,
//! `verify_ack` and `derive_key` for protocol decisions, and `bogus_buffer`
//! for the adversary octets a node holds after each change.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceNode {
    Node(u16),
    Bs,
    Adversary,
}

impl fmt::Display for TraceNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceNode::Node(i) => write!(f, "{i}"),
            TraceNode::Bs => f.write_str("bs"),
            TraceNode::Adversary => f.write_str("adversary"),
        }
    }
}

impl FromStr for TraceNode {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bs" => Ok(TraceNode::Bs),
            "adversary" => Ok(TraceNode::Adversary),
            _ => s.parse().map(TraceNode::Node).map_err(|_| SimError::Parse(format!("bad node id {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub time_s: f64,
    pub node: TraceNode,
    pub event: String,
    pub bytes: u64,
    pub energy_mj: f64,
    pub verdict: String,
}

#[derive(Serialize, Deserialize)]
struct Row {
    time_s: f64,
    node_id: String,
    event: String,
    bytes: u64,
    #[serde(rename = "energy_mJ")]
    energy_mj: f64,
    verdict: String,
}

/// Ordered event records; a disabled trace stays empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    enabled: bool,
    records: Vec<TraceRecord>,
}

impl Trace {
    pub fn new(enabled: bool) -> Self {
        Trace { enabled, records: Vec::new() }
    }

    pub fn from_records(records: Vec<TraceRecord>) -> Self {
        Trace { enabled: true, records }
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    pub fn push(&mut self, record: TraceRecord) {
        if self.enabled {
            self.records.push(record);
        }
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SimError> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.records {
            out.serialize(Row {
                time_s: r.time_s,
                node_id: r.node.to_string(),
                event: r.event.clone(),
                bytes: r.bytes,
                energy_mj: r.energy_mj,
                verdict: r.verdict.clone(),
            })?;
        }
        if self.records.is_empty() {
            out.write_record(["time_s", "node_id", "event", "bytes", "energy_mJ", "verdict"])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, SimError> {
        let mut records = Vec::new();
        for row in csv::Reader::from_reader(r).deserialize::<Row>() {
            let row = row.map_err(|e| SimError::Parse(e.to_string()))?;
            records.push(TraceRecord {
                time_s: row.time_s,
                node: row.node_id.parse()?,
                event: row.event,
                bytes: row.bytes,
                energy_mj: row.energy_mj,
                verdict: row.verdict,
            });
        }
        Ok(Trace::from_records(records))
    }
}

/// Quantity a curve tracks over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Cumulative energy charged to nodes.
    Energy,
    /// Cumulative octets transmitted by nodes.
    TxOctets,
    /// Largest adversary buffer occupancy of any node so far.
    BogusOctets,
}

impl FromStr for Metric {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "energy" => Ok(Metric::Energy),
            "tx_octets" => Ok(Metric::TxOctets),
            "bogus_octets" => Ok(Metric::BogusOctets),
            _ => Err(SimError::Validation(format!("unknown metric {s:?}"))),
        }
    }
}

impl Metric {
    fn step(self, acc: f64, r: &TraceRecord) -> f64 {
        let from_node = matches!(r.node, TraceNode::Node(_));
        match self {
            Metric::Energy if from_node => acc + r.energy_mj,
            Metric::TxOctets if from_node && r.event.starts_with("tx_") => acc + r.bytes as f64,
            Metric::BogusOctets if r.event == "bogus_buffer" => acc.max(r.bytes as f64),
            _ => acc,
        }
    }
}

/// Incremental mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMean {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningMean {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance; zero with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for RunningMean {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = RunningMean::default();
        iter.into_iter().for_each(|x| m.push(x));
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub time_s: f64,
    pub mean: f64,
    pub std_error: f64,
}

/// Samples `metric` every `bin_s` seconds in each replica's trace and
/// averages across replicas. Traces without records give an empty series.
pub fn curve_from_trace(traces: &[Trace], metric: &str, bin_s: f64) -> Result<Vec<CurvePoint>, SimError> {
    let metric: Metric = metric.parse()?;
    if !(bin_s > 0.0) {
        return Err(SimError::Validation("bin width must be positive".into()));
    }
    let end = traces.iter().flat_map(|t| t.records.iter().map(|r| r.time_s)).fold(f64::NAN, f64::max);
    if end.is_nan() {
        return Ok(Vec::new());
    }
    let bins = (end / bin_s).ceil() as usize;
    let mut acc = vec![RunningMean::default(); bins + 1];
    for t in traces {
        let mut value = 0.0;
        let mut records = t.records.iter().peekable();
        for (k, slot) in acc.iter_mut().enumerate() {
            let edge = k as f64 * bin_s;
            while let Some(r) = records.next_if(|r| r.time_s <= edge) {
                value = metric.step(value, r);
            }
            slot.push(value);
        }
    }
    Ok(acc
        .iter()
        .enumerate()
        .map(|(k, m)| CurvePoint { time_s: k as f64 * bin_s, mean: m.mean(), std_error: m.std_error() })
        .collect())
}
