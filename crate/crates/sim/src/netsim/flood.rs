use std::collections::VecDeque;

use rand::Rng;
use wsnkm_core::codec::{self, HEADER_LEN, PAYLOAD_LEN};

use super::engine::LossGranularity;
use super::graph::DeploymentGraph;

/// Where a flood starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FloodOrigin {
    /// A deployed node; its transmission is counted.
    Node(u32),
    /// An outside transmitter (base station, adversary) with the nodes' range.
    Point(f64, f64),
}

/// Which copies a node retransmits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloodPolicy {
    /// Every new message is retransmitted once.
    Ba,
    /// Only messages passing the anchor check are retransmitted.
    Iba { authentic: bool },
}

impl FloodPolicy {
    fn relays(self) -> bool {
        match self {
            FloodPolicy::Ba => true,
            FloodPolicy::Iba { authentic } => authentic,
        }
    }
}

/// Per-node outcome of one flood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloodTrace {
    pub received: Vec<bool>,
    pub transmissions: Vec<u32>,
    pub tx_octets: Vec<u64>,
    pub rx_octets: Vec<u64>,
}

impl FloodTrace {
    pub fn reception_rate(&self) -> f64 {
        self.received.iter().filter(|&&r| r).count() as f64 / self.received.len() as f64
    }

    pub fn total_transmissions(&self) -> u64 {
        self.transmissions.iter().map(|&t| t as u64).sum()
    }
}

/// One link's view of a transmission of `len` octets: octets heard and
/// whether every fragment arrived.
pub(crate) fn link_receive<R: Rng + ?Sized>(len: usize, p_loss: f64, loss: LossGranularity, rng: &mut R) -> (usize, bool) {
    let frags = codec::fragment_count(len);
    match loss {
        LossGranularity::Message => {
            if p_loss > 0.0 && rng.gen::<f64>() < p_loss {
                (0, false)
            } else {
                (codec::on_air_len(len), true)
            }
        }
        LossGranularity::Packet => {
            let mut got = 0;
            let mut all = true;
            for f in 0..frags {
                let payload = if f + 1 == frags { len.saturating_sub(PAYLOAD_LEN * (frags - 1)) } else { PAYLOAD_LEN };
                if p_loss > 0.0 && rng.gen::<f64>() < p_loss {
                    all = false;
                } else {
                    got += HEADER_LEN + payload;
                }
            }
            (got, all)
        }
    }
}

/// Blind flooding of one `len`-octet message with duplicate suppression.
pub fn blind_flood<R: Rng + ?Sized>(
    graph: &DeploymentGraph,
    origin: FloodOrigin,
    len: usize,
    policy: FloodPolicy,
    loss: LossGranularity,
    rng: &mut R,
) -> FloodTrace {
    let n = graph.len();
    let mut trace = FloodTrace {
        received: vec![false; n],
        transmissions: vec![0; n],
        tx_octets: vec![0; n],
        rx_octets: vec![0; n],
    };
    let on_air = codec::on_air_len(len) as u64;
    let mut queue = VecDeque::new();
    let first = match origin {
        FloodOrigin::Node(o) => {
            trace.received[o as usize] = true;
            trace.transmissions[o as usize] += 1;
            trace.tx_octets[o as usize] += on_air;
            graph.neighbors(o as usize).to_vec()
        }
        FloodOrigin::Point(x, y) => graph.in_range_of((x, y)),
    };
    queue.push_back(first);
    while let Some(receivers) = queue.pop_front() {
        for to in receivers {
            let i = to as usize;
            let (heard, complete) = link_receive(len, graph.p_loss, loss, rng);
            trace.rx_octets[i] += heard as u64;
            if !complete || trace.received[i] {
                continue;
            }
            trace.received[i] = true;
            if policy.relays() {
                trace.transmissions[i] += 1;
                trace.tx_octets[i] += on_air;
                queue.push_back(graph.neighbors(i).to_vec());
            }
        }
    }
    trace
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line(n: usize, p_loss: f64) -> DeploymentGraph {
        let pos = (0..n).map(|i| (i as f64 * 10.0, 0.0)).collect();
        DeploymentGraph::from_positions(pos, 1000.0, 10.0, p_loss).unwrap()
    }

    #[test]
    fn lossless_ba_flood_reaches_all_once() {
        let g = line(20, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = blind_flood(&g, FloodOrigin::Node(0), 18, FloodPolicy::Ba, LossGranularity::Packet, &mut rng);
        assert!(t.received.iter().all(|&r| r));
        assert!(t.transmissions.iter().all(|&x| x == 1));
    }

    #[test]
    fn bogus_iba_flood_stops_after_one_hop() {
        let g = line(20, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = blind_flood(&g, FloodOrigin::Point(95.0, 0.0), 66, FloodPolicy::Iba { authentic: false }, LossGranularity::Packet, &mut rng);
        assert_eq!(t.total_transmissions(), 0);
        let heard: Vec<_> = (0..20).filter(|&i| t.rx_octets[i] > 0).collect();
        assert_eq!(heard, vec![9, 10]);
    }

    #[test]
    fn disconnected_component_never_receives() {
        let pos = vec![(0.0, 0.0), (5.0, 0.0), (500.0, 500.0)];
        let g = DeploymentGraph::from_positions(pos, 1000.0, 10.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = blind_flood(&g, FloodOrigin::Node(0), 18, FloodPolicy::Ba, LossGranularity::Packet, &mut rng);
        assert_eq!(t.received, vec![true, true, false]);
    }

    #[test]
    fn single_fragment_delivery_matches_binomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 10_000;
        for p in [0.1, 0.3, 0.5] {
            let ok = (0..trials).filter(|_| link_receive(18, p, LossGranularity::Packet, &mut rng).1).count();
            let q = 1.0 - p;
            let sigma = (trials as f64 * p * q).sqrt();
            assert!((ok as f64 - trials as f64 * q).abs() < 3.0 * sigma, "p={p}: {ok}");
        }
    }

    #[test]
    fn partial_reception_counts_heard_octets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (heard, complete) = link_receive(66, 0.5, LossGranularity::Packet, &mut rng);
            assert!(heard <= codec::on_air_len(66));
            assert_eq!(complete, heard == codec::on_air_len(66));
        }
    }
}
