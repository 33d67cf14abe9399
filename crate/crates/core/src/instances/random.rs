use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TapError};
use crate::instance::AgentProfile;
use crate::network::{NodeId, RoadNetwork, UNBOUNDED};

/// Default population size: a third of the nodes, at least one.
pub fn default_population(net: &RoadNetwork) -> usize {
    (net.node_count() / 3).max(1)
}

/// `count` truthful agents with ids `1..=count`, origins and destinations
/// drawn independently and uniformly (with replacement) from the nodes.
pub fn random_population(net: &RoadNetwork, count: usize, seed: u64) -> Result<Vec<AgentProfile>> {
    let n = net.node_count() as u32;
    if n == 0 {
        return Err(TapError::InvalidArgument("network has no nodes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((1..=count)
        .map(|i| {
            let o = NodeId(rng.random_range(0..n));
            let d = NodeId(rng.random_range(0..n));
            AgentProfile::truthful(i.to_string(), o, d)
        })
        .collect())
}

/// Resource augmentation: every outgoing edge of `v` gets capacity
/// `round(γ · c_avg(v))`, with `c_avg(v)` the mean outgoing capacity before
/// the transform. Rounds half up; unbounded edges are left alone.
pub fn augment(net: &RoadNetwork, gamma: f64) -> Result<RoadNetwork> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(TapError::InvalidArgument(format!("gamma must be at least 1, got {gamma}")));
    }
    let mut caps = net.capacities();
    for v in net.nodes() {
        let out: Vec<_> =
            net.outgoing(v).iter().copied().filter(|&e| net.edge(e).capacity != UNBOUNDED).collect();
        if out.is_empty() {
            continue;
        }
        let sum: u64 = out.iter().map(|&e| net.edge(e).capacity as u64).sum();
        let target = gamma * sum as f64 / out.len() as f64;
        let mut c = (target + 0.5 + 1e-9).floor();
        if c < 1.0 {
            log::warn!("augmented capacity at `{}` rounds to 0; clamped to 1", net.name(v));
            c = 1.0;
        }
        let c = c.min((UNBOUNDED - 1) as f64) as u32;
        for e in out {
            caps[e.index()] = c;
        }
    }
    net.with_capacities(&caps)
}
