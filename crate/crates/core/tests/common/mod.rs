#![allow(dead_code)]

pub mod brute;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tapmech::network::{shortest_distances_from, NodeId};
use tapmech::{AgentProfile, Instance, RoadNetwork};

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_nodes: usize,
    pub max_agents: usize,
    pub max_weight: u32,
    pub max_capacity: u32,
    pub symmetric: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Self { max_nodes: 8, max_agents: 4, max_weight: 10, max_capacity: 2, symmetric: false }
    }
}

/// A random instance with integer weights in which every agent can reach
/// their destination. Retries internally until one is found.
pub fn random_instance(seed: u64, shape: Shape) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(inst) = attempt(&mut rng, shape) {
            return inst;
        }
    }
}

fn attempt(rng: &mut ChaCha8Rng, shape: Shape) -> Option<Instance> {
    let n = rng.random_range(3..=shape.max_nodes);
    let mut b = RoadNetwork::builder();
    for i in 0..n {
        b.add_node(format!("v{i}")).unwrap();
    }
    let density = rng.random_range(0.25..0.6);
    for u in 0..n {
        for v in 0..n {
            if u == v || (shape.symmetric && v < u) || !rng.random_bool(density) {
                continue;
            }
            let cap = rng.random_range(1..=shape.max_capacity);
            let w = rng.random_range(1..=shape.max_weight) as f64;
            let (u, v) = (NodeId(u as u32), NodeId(v as u32));
            if shape.symmetric {
                b.add_two_way(u, v, cap, w, 0).unwrap();
            } else {
                b.add_edge(u, v, cap, w, 0).unwrap();
            }
        }
    }
    if shape.symmetric {
        b.symmetric(true);
    }
    let net = b.build().ok()?;
    let agents_n = rng.random_range(1..=shape.max_agents);
    let mut agents = Vec::new();
    for i in 0..agents_n {
        let o = NodeId(rng.random_range(0..n as u32));
        let reachable: Vec<NodeId> = shortest_distances_from(&net, o)
            .iter()
            .enumerate()
            .filter(|&(v, d)| d.is_finite() && v != o.index())
            .map(|(v, _)| NodeId(v as u32))
            .collect();
        if reachable.is_empty() {
            return None;
        }
        let d = reachable[rng.random_range(0..reachable.len())];
        agents.push(AgentProfile::truthful((i + 1).to_string(), o, d));
    }
    Instance::new(net, agents).ok()
}
