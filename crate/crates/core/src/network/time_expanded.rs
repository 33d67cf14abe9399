//! Time-expanded networks: `T` copies of every node, one movement copy of
//! each edge per feasible departure time, and unbounded zero-weight holdover
//! edges that let an agent wait at a node.

use std::collections::BTreeMap;

use super::{hop_diameter, EdgeId, NetworkBuilder, NodeId, Path, RoadNetwork, UNBOUNDED};
use crate::error::{Result, TapError};
use crate::instance::{AgentProfile, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpandedEdgeKind {
    Movement { base: EdgeId, departure: u32 },
    Holdover { node: NodeId, time: u32 },
}

#[derive(Clone, Debug)]
pub struct TimeExpandedNetwork {
    horizon: u32,
    base_nodes: usize,
    network: RoadNetwork,
    kinds: Vec<ExpandedEdgeKind>,
    copies: Vec<u32>,
    unusable: Vec<EdgeId>,
}

/// Default horizon: agents × max transit × hop diameter, plus one layer so
/// the final arrival still has a node copy. Never below one.
pub fn default_horizon(net: &RoadNetwork, agents: usize) -> u32 {
    let span =
        (agents as u64).saturating_mul(net.max_transit() as u64).saturating_mul(hop_diameter(net) as u64);
    span.saturating_add(1).min(u32::MAX as u64 / 2) as u32
}

pub fn build_time_expanded(net: &RoadNetwork, horizon: u32) -> Result<TimeExpandedNetwork> {
    if horizon == 0 {
        return Err(TapError::InvalidArgument("time horizon must be at least 1".into()));
    }
    let n = net.node_count();
    let mut b = NetworkBuilder::new();
    for t in 0..horizon {
        for v in net.nodes() {
            b.add_node(format!("{}@{t}", net.name(v)))?;
        }
    }
    let layer = |v: NodeId, t: u32| NodeId(t * n as u32 + v.0);
    let mut kinds = Vec::new();
    let mut copies = vec![0u32; net.edge_count()];
    for t in 0..horizon {
        for e in net.edge_ids() {
            let edge = net.edge(e);
            let arrival = t as u64 + edge.transit as u64;
            if arrival >= horizon as u64 {
                continue;
            }
            b.add_edge(layer(edge.tail, t), layer(edge.head, arrival as u32), edge.capacity, edge.weight, 0)?;
            kinds.push(ExpandedEdgeKind::Movement { base: e, departure: t });
            copies[e.index()] += 1;
        }
        if t + 1 < horizon {
            for v in net.nodes() {
                b.add_edge(layer(v, t), layer(v, t + 1), UNBOUNDED, 0.0, 0)?;
                kinds.push(ExpandedEdgeKind::Holdover { node: v, time: t });
            }
        }
    }
    let unusable: Vec<EdgeId> = net.edge_ids().filter(|e| copies[e.index()] == 0).collect();
    if !unusable.is_empty() {
        log::warn!("horizon {horizon} leaves {} edge(s) without any movement copy", unusable.len());
    }
    Ok(TimeExpandedNetwork { horizon, base_nodes: n, network: b.build()?, kinds, copies, unusable })
}

impl TimeExpandedNetwork {
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn network(&self) -> &RoadNetwork {
        &self.network
    }

    /// Copy `v_t` of a base node.
    pub fn node(&self, base: NodeId, t: u32) -> NodeId {
        NodeId(t * self.base_nodes as u32 + base.0)
    }

    /// (base node, time) of an expanded node.
    pub fn base_of(&self, node: NodeId) -> (NodeId, u32) {
        let n = self.base_nodes as u32;
        (NodeId(node.0 % n), node.0 / n)
    }

    pub fn kind(&self, e: EdgeId) -> Option<ExpandedEdgeKind> {
        self.kinds.get(e.index()).copied()
    }

    pub fn movement_copies(&self, base: EdgeId) -> u32 {
        self.copies[base.index()]
    }

    pub fn holdover_count(&self) -> usize {
        self.kinds.iter().filter(|k| matches!(k, ExpandedEdgeKind::Holdover { .. })).count()
    }

    /// Base edges whose transit time does not fit in the horizon.
    pub fn unusable_edges(&self) -> &[EdgeId] {
        &self.unusable
    }

    /// An instance on the expanded network where each agent starts at
    /// `O_0` and heads for an arrival sink `D@*` reachable from every copy
    /// `D_t` through zero-weight unbounded edges.
    pub fn routing_instance(&self, instance: &Instance) -> Result<RoutingInstance> {
        let base = instance.network();
        if base.node_count() != self.base_nodes {
            return Err(TapError::InvalidArgument("instance does not match the expanded network".into()));
        }
        let mut b = NetworkBuilder::new();
        for v in self.network.nodes() {
            b.add_node(self.network.name(v))?;
        }
        for edge in self.network.edges() {
            b.add_edge(edge.tail, edge.head, edge.capacity, edge.weight, 0)?;
        }
        let mut sinks: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for a in instance.agents() {
            for d in [a.destination, a.declared] {
                if sinks.contains_key(&d) {
                    continue;
                }
                let sink = b.add_node(format!("{}@*", base.name(d)))?;
                for t in 0..self.horizon {
                    b.add_edge(self.node(d, t), sink, UNBOUNDED, 0.0, 0)?;
                }
                sinks.insert(d, sink);
            }
        }
        let agents = instance
            .agents()
            .iter()
            .map(|a| AgentProfile {
                id: a.id.clone(),
                origin: self.node(a.origin, 0),
                destination: sinks[&a.destination],
                declared: sinks[&a.declared],
            })
            .collect();
        Ok(RoutingInstance {
            instance: Instance::new(b.build()?, agents)?,
            expanded_edges: self.network.edge_count(),
        })
    }

    /// Movements of a path on the expanded network (or on a routing instance
    /// built from it), dropping holdovers and arrival edges.
    pub fn project(&self, path: &Path) -> Vec<ScheduledMove> {
        path.edges()
            .iter()
            .filter_map(|&e| match self.kind(e) {
                Some(ExpandedEdgeKind::Movement { base, departure }) => {
                    Some(ScheduledMove { edge: base, departure })
                }
                _ => None,
            })
            .collect()
    }

    pub fn project_all<'a>(&self, paths: impl IntoIterator<Item = &'a Path>) -> Schedule {
        let mut usage = BTreeMap::new();
        for p in paths {
            for m in self.project(p) {
                *usage.entry((m.edge, m.departure)).or_insert(0u32) += 1;
            }
        }
        Schedule { usage }
    }
}

#[derive(Clone, Debug)]
pub struct RoutingInstance {
    pub instance: Instance,
    /// Edges with id below this are expanded-network edges; the rest are
    /// arrival edges into sinks.
    pub expanded_edges: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScheduledMove {
    pub edge: EdgeId,
    pub departure: u32,
}

/// Number of agents entering each base edge at each time step.
#[derive(Clone, Debug, Default)]
pub struct Schedule {
    usage: BTreeMap<(EdgeId, u32), u32>,
}

impl Schedule {
    pub fn usage(&self, edge: EdgeId, t: u32) -> u32 {
        self.usage.get(&(edge, t)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (EdgeId, u32, u32)> + '_ {
        self.usage.iter().map(|(&(e, t), &c)| (e, t, c))
    }

    pub fn is_feasible(&self, base: &RoadNetwork) -> bool {
        self.usage.iter().all(|(&(e, _), &c)| c <= base.edge(e).capacity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(transit: u32) -> RoadNetwork {
        let mut b = RoadNetwork::builder();
        let a = b.add_node("a").unwrap();
        let c = b.add_node("b").unwrap();
        b.add_edge(a, c, 2, 1.0, transit).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn single_layer_is_the_static_graph() {
        let net = pair(0);
        let tx = build_time_expanded(&net, 1).unwrap();
        assert_eq!(tx.network().node_count(), 2);
        assert_eq!(tx.network().edge_count(), 1);
        assert_eq!(tx.holdover_count(), 0);
    }

    #[test]
    fn transit_two_horizon_five_gives_three_copies() {
        let net = pair(2);
        let tx = build_time_expanded(&net, 5).unwrap();
        assert_eq!(tx.movement_copies(EdgeId(0)), 3);
        let departures: Vec<_> = tx
            .network()
            .edge_ids()
            .filter_map(|e| match tx.kind(e) {
                Some(ExpandedEdgeKind::Movement { departure, .. }) => Some(departure),
                _ => None,
            })
            .collect();
        assert_eq!(departures, vec![0, 1, 2]);
    }

    #[test]
    fn holdovers_count_nodes_times_gaps() {
        let tx = build_time_expanded(&pair(1), 3).unwrap();
        assert_eq!(tx.holdover_count(), 4);
        assert_eq!(tx.network().node_count(), 6);
    }

    #[test]
    fn short_horizon_marks_edges_unusable() {
        let tx = build_time_expanded(&pair(4), 3).unwrap();
        assert_eq!(tx.unusable_edges(), &[EdgeId(0)]);
        assert!(build_time_expanded(&pair(0), 0).is_err());
    }
}
