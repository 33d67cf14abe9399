//! Capacitated road networks, flows, residual capacities and paths.
//!
//! Nodes and edges get dense integer ids in insertion order; the external
//! node names live in a side table on [`RoadNetwork`]. Edges carry an integer
//! capacity (simultaneous agents), a nonnegative real weight (distance) and an
//! integer transit time.

mod connectivity;
mod paths;
mod time_expanded;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Result, TapError};

pub use connectivity::{
    edge_connectivity, hop_diameter, is_k_edge_connected, is_strongly_connected, max_edge_disjoint_paths,
};
pub use paths::{k_shortest_paths, min_cost_path, shortest_distances_from, KShortestPaths};
pub use time_expanded::{
    build_time_expanded, default_horizon, ExpandedEdgeKind, RoutingInstance, Schedule, ScheduledMove,
    TimeExpandedNetwork,
};

/// Absolute/relative tolerance used for every weight comparison.
pub const WEIGHT_TOL: f64 = 1e-9;

/// Capacity value used for edges that never saturate (time-expanded holdovers).
pub const UNBOUNDED: u32 = u32::MAX;

/// `a == b` up to [`WEIGHT_TOL`], scaled for large magnitudes.
pub fn weight_eq(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= WEIGHT_TOL * 1f64.max(a.abs()).max(b.abs())
}

/// `a < b` by more than the tolerance.
pub fn weight_lt(a: f64, b: f64) -> bool {
    a < b && !weight_eq(a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: u32,
    pub weight: f64,
    pub transit: u32,
}

/// Directed road network. Immutable once built.
#[derive(Clone, Debug)]
pub struct RoadNetwork {
    names: Vec<String>,
    lookup: HashMap<String, NodeId>,
    edges: Vec<Edge>,
    outgoing: Vec<Vec<EdgeId>>,
    incoming: Vec<Vec<EdgeId>>,
    by_endpoints: HashMap<(NodeId, NodeId), EdgeId>,
    symmetric: bool,
}

/// Node names end up as whitespace-separated tokens in the instance file and
/// in path listings (`A>B,B>C`), so a few characters are reserved.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || matches!(c, ',' | '>' | '#'))
}

#[derive(Debug, Default)]
pub struct NetworkBuilder {
    names: Vec<String>,
    lookup: HashMap<String, NodeId>,
    edges: Vec<Edge>,
    by_endpoints: HashMap<(NodeId, NodeId), EdgeId>,
    symmetric: bool,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>) -> Result<NodeId> {
        let name = name.into();
        if !is_valid_name(&name) {
            return Err(TapError::InvalidNetwork(format!("invalid node name `{name}`")));
        }
        if self.lookup.contains_key(&name) {
            return Err(TapError::InvalidNetwork(format!("duplicate node `{name}`")));
        }
        let id = NodeId(self.names.len() as u32);
        self.lookup.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.lookup.get(name).copied()
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn add_edge(
        &mut self,
        tail: NodeId,
        head: NodeId,
        capacity: u32,
        weight: f64,
        transit: u32,
    ) -> Result<EdgeId> {
        let n = self.names.len() as u32;
        if tail.0 >= n || head.0 >= n {
            return Err(TapError::InvalidNetwork(format!(
                "edge ({}, {}) references an undeclared node",
                tail.0, head.0
            )));
        }
        if tail == head {
            return Err(TapError::InvalidNetwork(format!("self-loop on `{}`", self.names[tail.index()])));
        }
        if capacity == 0 {
            return Err(TapError::InvalidNetwork("edge capacity must be at least 1".into()));
        }
        if !weight.is_finite() || weight < 0.0 {
            return Err(TapError::InvalidNetwork(format!("invalid edge weight {weight}")));
        }
        if self.by_endpoints.contains_key(&(tail, head)) {
            return Err(TapError::InvalidNetwork(format!(
                "parallel edge `{}`>`{}`",
                self.names[tail.index()],
                self.names[head.index()]
            )));
        }
        let id = EdgeId(self.edges.len() as u32);
        self.by_endpoints.insert((tail, head), id);
        self.edges.push(Edge { tail, head, capacity, weight, transit });
        Ok(id)
    }

    pub fn add_edge_named(
        &mut self,
        tail: &str,
        head: &str,
        capacity: u32,
        weight: f64,
        transit: u32,
    ) -> Result<EdgeId> {
        let t = self.node_id(tail).ok_or_else(|| TapError::UnknownNode(tail.into()))?;
        let h = self.node_id(head).ok_or_else(|| TapError::UnknownNode(head.into()))?;
        self.add_edge(t, h, capacity, weight, transit)
    }

    /// Adds `tail -> head` and `head -> tail` with identical attributes.
    pub fn add_two_way(
        &mut self,
        a: NodeId,
        b: NodeId,
        capacity: u32,
        weight: f64,
        transit: u32,
    ) -> Result<(EdgeId, EdgeId)> {
        Ok((self.add_edge(a, b, capacity, weight, transit)?, self.add_edge(b, a, capacity, weight, transit)?))
    }

    pub fn symmetric(&mut self, flag: bool) -> &mut Self {
        self.symmetric = flag;
        self
    }

    pub fn build(self) -> Result<RoadNetwork> {
        let n = self.names.len();
        let mut outgoing = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            outgoing[e.tail.index()].push(EdgeId(i as u32));
            incoming[e.head.index()].push(EdgeId(i as u32));
        }
        let net = RoadNetwork {
            names: self.names,
            lookup: self.lookup,
            edges: self.edges,
            outgoing,
            incoming,
            by_endpoints: self.by_endpoints,
            symmetric: self.symmetric,
        };
        if net.symmetric {
            if let Some(e) = net.first_asymmetric_edge() {
                let edge = net.edge(e);
                return Err(TapError::InvalidNetwork(format!(
                    "network flagged symmetric but `{}`>`{}` has no matching reverse edge",
                    net.name(edge.tail),
                    net.name(edge.head)
                )));
            }
        }
        Ok(net)
    }
}

impl RoadNetwork {
    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::new()
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.names.len() as u32).map(NodeId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.index()]
    }

    pub fn name(&self, node: NodeId) -> &str {
        &self.names[node.index()]
    }

    pub fn node(&self, name: &str) -> Option<NodeId> {
        self.lookup.get(name).copied()
    }

    pub fn require_node(&self, name: &str) -> Result<NodeId> {
        self.node(name).ok_or_else(|| TapError::UnknownNode(name.to_string()))
    }

    /// Outgoing edges of `node`, in increasing edge id.
    pub fn outgoing(&self, node: NodeId) -> &[EdgeId] {
        &self.outgoing[node.index()]
    }

    pub fn incoming(&self, node: NodeId) -> &[EdgeId] {
        &self.incoming[node.index()]
    }

    pub fn find_edge(&self, tail: NodeId, head: NodeId) -> Option<EdgeId> {
        self.by_endpoints.get(&(tail, head)).copied()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn max_transit(&self) -> u32 {
        self.edges.iter().map(|e| e.transit).max().unwrap_or(0)
    }

    pub fn capacities(&self) -> Vec<u32> {
        self.edges.iter().map(|e| e.capacity).collect()
    }

    /// Same topology with new capacities; the symmetric flag is kept only if
    /// the result is still symmetric.
    pub fn with_capacities(&self, capacities: &[u32]) -> Result<RoadNetwork> {
        if capacities.len() != self.edges.len() {
            return Err(TapError::FlowShape { expected: self.edges.len(), found: capacities.len() });
        }
        if capacities.contains(&0) {
            return Err(TapError::InvalidNetwork("edge capacity must be at least 1".into()));
        }
        let mut net = self.clone();
        for (e, &c) in net.edges.iter_mut().zip(capacities) {
            e.capacity = c;
        }
        net.symmetric = net.symmetric && net.first_asymmetric_edge().is_none();
        Ok(net)
    }

    /// Checks whether every edge has a reverse twin with equal attributes.
    pub fn detect_symmetry(&self) -> bool {
        self.first_asymmetric_edge().is_none()
    }

    fn first_asymmetric_edge(&self) -> Option<EdgeId> {
        self.edge_ids().find(|&id| {
            let e = self.edge(id);
            match self.find_edge(e.head, e.tail) {
                Some(r) => {
                    let r = self.edge(r);
                    r.capacity != e.capacity || r.weight != e.weight || r.transit != e.transit
                }
                None => true,
            }
        })
    }

    pub fn edge_label(&self, id: EdgeId) -> String {
        let e = self.edge(id);
        format!("{}>{}", self.name(e.tail), self.name(e.head))
    }
}

/// Per-edge usage counts `f(e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowState {
    counts: Vec<u32>,
}

impl FlowState {
    pub fn zero(net: &RoadNetwork) -> Self {
        Self { counts: vec![0; net.edge_count()] }
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn from_paths<'a>(net: &RoadNetwork, paths: impl IntoIterator<Item = &'a Path>) -> Self {
        let mut flow = Self::zero(net);
        for p in paths {
            flow.add_path(p);
        }
        flow
    }

    pub fn add_path(&mut self, path: &Path) {
        for e in path.edges() {
            self.counts[e.index()] += 1;
        }
    }

    pub fn remove_path(&mut self, path: &Path) {
        for e in path.edges() {
            self.counts[e.index()] -= 1;
        }
    }

    pub fn count(&self, e: EdgeId) -> u32 {
        self.counts[e.index()]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn is_feasible(&self, net: &RoadNetwork) -> bool {
        self.counts.len() == net.edge_count()
            && net.edges().iter().zip(&self.counts).all(|(e, &f)| f <= e.capacity)
    }
}

/// Remaining capacity per edge, `c(e) - f(e)` (optionally with one agent's
/// own contribution given back).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    remaining: Vec<u32>,
}

impl Residual {
    pub fn full(net: &RoadNetwork) -> Self {
        Self { remaining: net.capacities() }
    }

    pub fn from_remaining(remaining: Vec<u32>) -> Self {
        Self { remaining }
    }

    pub fn remaining(&self, e: EdgeId) -> u32 {
        self.remaining[e.index()]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.remaining
    }

    pub fn is_usable(&self, e: EdgeId) -> bool {
        self.remaining[e.index()] >= 1
    }

    pub fn is_saturated(&self, e: EdgeId) -> bool {
        self.remaining[e.index()] == 0
    }

    pub fn saturated(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.remaining.iter().enumerate().filter(|(_, &r)| r == 0).map(|(i, _)| EdgeId(i as u32))
    }

    pub fn admits(&self, path: &Path) -> bool {
        path.edges().iter().all(|&e| self.is_usable(e))
    }

    /// Takes one unit along `path`. Fails without modifying anything if some
    /// edge is already saturated.
    pub fn consume(&mut self, path: &Path) -> Result<()> {
        if let Some(&e) = path.edges().iter().find(|&&e| self.is_saturated(e)) {
            return Err(TapError::OverCapacity { edge: e.index(), used: 1, capacity: 0 });
        }
        for e in path.edges() {
            let r = &mut self.remaining[e.index()];
            if *r != UNBOUNDED {
                *r -= 1;
            }
        }
        Ok(())
    }

    pub fn release(&mut self, path: &Path) {
        for e in path.edges() {
            let r = &mut self.remaining[e.index()];
            if *r != UNBOUNDED {
                *r += 1;
            }
        }
    }
}

/// Residual network `c(e) - f^{-i}(e)`: capacities of `net` minus `flow`,
/// with the edges of `exclude` (the agent's own path) given back.
pub fn residual(net: &RoadNetwork, flow: &FlowState, exclude: Option<&Path>) -> Result<Residual> {
    if flow.counts.len() != net.edge_count() {
        return Err(TapError::FlowShape { expected: net.edge_count(), found: flow.counts.len() });
    }
    let mut used = flow.counts.clone();
    if let Some(p) = exclude {
        for e in p.edges() {
            let slot = used
                .get_mut(e.index())
                .ok_or(TapError::FlowShape { expected: net.edge_count(), found: e.index() + 1 })?;
            *slot = slot.saturating_sub(1);
        }
    }
    let mut remaining = Vec::with_capacity(used.len());
    for (i, (edge, &u)) in net.edges().iter().zip(&used).enumerate() {
        if edge.capacity == UNBOUNDED {
            remaining.push(UNBOUNDED);
            continue;
        }
        if u > edge.capacity {
            return Err(TapError::OverCapacity { edge: i, used: u, capacity: edge.capacity });
        }
        remaining.push(edge.capacity - u);
    }
    Ok(Residual { remaining })
}

/// A simple path given by its origin and edge sequence.
#[derive(Clone, Debug)]
pub struct Path {
    origin: NodeId,
    edges: Vec<EdgeId>,
    weight: f64,
}

impl PartialEq for Path {
    fn eq(&self, other: &Self) -> bool {
        self.origin == other.origin && self.edges == other.edges
    }
}

impl Eq for Path {}

impl Path {
    pub fn empty(origin: NodeId) -> Self {
        Self { origin, edges: Vec::new(), weight: 0.0 }
    }

    /// Validates continuity and simplicity, and caches the total weight.
    pub fn from_edges(net: &RoadNetwork, origin: NodeId, edges: Vec<EdgeId>) -> Result<Self> {
        if origin.index() >= net.node_count() {
            return Err(TapError::UnknownNode(format!("#{}", origin.0)));
        }
        let mut seen = vec![false; net.node_count()];
        seen[origin.index()] = true;
        let mut at = origin;
        let mut weight = 0.0;
        for &e in &edges {
            if e.index() >= net.edge_count() {
                return Err(TapError::FlowShape { expected: net.edge_count(), found: e.index() + 1 });
            }
            let edge = net.edge(e);
            if edge.tail != at {
                return Err(TapError::InvalidArgument(format!(
                    "path is not contiguous at `{}`",
                    net.edge_label(e)
                )));
            }
            if seen[edge.head.index()] {
                return Err(TapError::InvalidArgument(format!("path revisits `{}`", net.name(edge.head))));
            }
            seen[edge.head.index()] = true;
            weight += edge.weight;
            at = edge.head;
        }
        Ok(Self { origin, edges, weight })
    }

    /// Builds a path from a node sequence.
    pub fn from_nodes(net: &RoadNetwork, nodes: &[NodeId]) -> Result<Self> {
        let origin = *nodes.first().ok_or_else(|| TapError::InvalidArgument("empty node sequence".into()))?;
        let edges = nodes
            .windows(2)
            .map(|w| {
                net.find_edge(w[0], w[1]).ok_or_else(|| {
                    TapError::InvalidArgument(format!("no edge `{}`>`{}`", net.name(w[0]), net.name(w[1])))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_edges(net, origin, edges)
    }

    pub fn from_names(net: &RoadNetwork, names: &[&str]) -> Result<Self> {
        let nodes = names.iter().map(|n| net.require_node(n)).collect::<Result<Vec<_>>>()?;
        Self::from_nodes(net, &nodes)
    }

    pub fn origin(&self) -> NodeId {
        self.origin
    }

    pub fn destination(&self, net: &RoadNetwork) -> NodeId {
        self.edges.last().map_or(self.origin, |&e| net.edge(e).head)
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn nodes(&self, net: &RoadNetwork) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        out.push(self.origin);
        out.extend(self.edges.iter().map(|&e| net.edge(e).head));
        out
    }

    pub fn uses(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    /// `A>F,F>E,E>D`, or `-` for the empty path.
    pub fn display<'a>(&'a self, net: &'a RoadNetwork) -> PathDisplay<'a> {
        PathDisplay { path: self, net }
    }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    net: &'a RoadNetwork,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            return f.write_str("-");
        }
        for (i, &e) in self.path.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&self.net.edge_label(e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> RoadNetwork {
        let mut b = RoadNetwork::builder();
        let a = b.add_node("a").unwrap();
        let bb = b.add_node("b").unwrap();
        let c = b.add_node("c").unwrap();
        b.add_edge(a, bb, 3, 1.0, 0).unwrap();
        b.add_edge(bb, c, 1, 2.5, 0).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn builder_rejects_bad_edges() {
        let mut b = RoadNetwork::builder();
        let a = b.add_node("a").unwrap();
        let c = b.add_node("c").unwrap();
        assert!(b.add_edge(a, a, 1, 1.0, 0).is_err());
        assert!(b.add_edge(a, c, 0, 1.0, 0).is_err());
        assert!(b.add_edge(a, c, 1, -1.0, 0).is_err());
        assert!(b.add_edge(a, NodeId(7), 1, 1.0, 0).is_err());
        b.add_edge(a, c, 1, 1.0, 0).unwrap();
        assert!(b.add_edge(a, c, 2, 1.0, 0).is_err());
        assert!(b.add_node("a").is_err());
        assert!(b.add_node("x y").is_err());
    }

    #[test]
    fn symmetric_flag_is_checked() {
        let mut b = RoadNetwork::builder();
        let a = b.add_node("a").unwrap();
        let c = b.add_node("c").unwrap();
        b.add_edge(a, c, 1, 1.0, 0).unwrap();
        b.symmetric(true);
        assert!(b.build().is_err());

        let mut b = RoadNetwork::builder();
        let a = b.add_node("a").unwrap();
        let c = b.add_node("c").unwrap();
        b.add_two_way(a, c, 2, 1.0, 1).unwrap();
        b.symmetric(true);
        assert!(b.build().unwrap().is_symmetric());
    }

    #[test]
    fn residual_of_empty_flow_is_capacity() {
        let net = line();
        let r = residual(&net, &FlowState::zero(&net), None).unwrap();
        assert_eq!(r.as_slice(), net.capacities().as_slice());
    }

    #[test]
    fn residual_single_decrement_and_exclusion() {
        let net = line();
        let p = Path::from_names(&net, &["a", "b"]).unwrap();
        let flow = FlowState::from_paths(&net, [&p]);
        let r = residual(&net, &flow, None).unwrap();
        assert_eq!(r.remaining(EdgeId(0)), 2);
        let r = residual(&net, &flow, Some(&p)).unwrap();
        assert_eq!(r.remaining(EdgeId(0)), 3);
    }

    #[test]
    fn residual_rejects_wrong_shape_and_overflow() {
        let net = line();
        assert!(matches!(
            residual(&net, &FlowState::from_counts(vec![0; 5]), None),
            Err(TapError::FlowShape { .. })
        ));
        assert!(matches!(
            residual(&net, &FlowState::from_counts(vec![0, 2]), None),
            Err(TapError::OverCapacity { .. })
        ));
    }

    #[test]
    fn path_validation() {
        let net = line();
        let p = Path::from_names(&net, &["a", "b", "c"]).unwrap();
        assert_eq!(p.weight(), 3.5);
        assert_eq!(p.display(&net).to_string(), "a>b,b>c");
        assert_eq!(p.destination(&net), NodeId(2));
        assert!(Path::from_edges(&net, NodeId(1), vec![EdgeId(0)]).is_err());
        assert_eq!(Path::empty(NodeId(1)).display(&net).to_string(), "-");
    }

    #[test]
    fn consume_refuses_saturated_edges() {
        let net = line();
        let p = Path::from_names(&net, &["a", "b", "c"]).unwrap();
        let mut r = Residual::full(&net);
        r.consume(&p).unwrap();
        assert!(r.is_saturated(EdgeId(1)));
        let before = r.clone();
        assert!(r.consume(&p).is_err());
        assert_eq!(r, before);
        r.release(&p);
        assert_eq!(r, Residual::full(&net));
    }
}
