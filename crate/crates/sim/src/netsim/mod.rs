//! Deployment graph, packet framing, flooding and the event loop.

mod engine;
mod flood;
mod graph;
mod packet;

pub use engine::{
    AdversaryPosition, AttackImpact, BsMode, Injection, Jam, LossGranularity, Msg, SimConfig, Simulation,
};
pub use flood::{blind_flood, FloodOrigin, FloodPolicy, FloodTrace};
pub use graph::{deploy, DeploymentGraph};
pub use packet::{fragment, reassemble, Packet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// RNG for replica `replica` of a run seeded with `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Runs `f` once per replica in parallel; results come back in replica order.
pub fn run_replicas<T, F>(seed: u64, replicas: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, ChaCha8Rng) -> T + Sync,
{
    (0..replicas).into_par_iter().map(|r| f(r, replica_rng(seed, r as u64))).collect()
}
