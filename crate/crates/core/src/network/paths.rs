use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::{weight_eq, EdgeId, NodeId, Path, Residual, RoadNetwork};

#[derive(Clone, Copy, PartialEq)]
struct Label {
    dist: f64,
    hops: u32,
    node: u32,
}

impl Eq for Label {}

impl Ord for Label {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then(other.hops.cmp(&self.hops)).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Distance and hop labels towards `dest`, computed on the reversed graph
/// restricted to usable edges and unblocked nodes. Keys compare
/// lexicographically on (weight, hops).
fn labels_to(
    net: &RoadNetwork,
    dest: NodeId,
    usable: &dyn Fn(EdgeId) -> bool,
    blocked: &dyn Fn(NodeId) -> bool,
) -> (Vec<f64>, Vec<u32>) {
    let n = net.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut hops = vec![u32::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[dest.index()] = 0.0;
    hops[dest.index()] = 0;
    heap.push(Label { dist: 0.0, hops: 0, node: dest.0 });
    while let Some(Label { dist: d, hops: h, node }) = heap.pop() {
        let v = NodeId(node);
        if done[v.index()] {
            continue;
        }
        done[v.index()] = true;
        for &e in net.incoming(v) {
            if !usable(e) {
                continue;
            }
            let u = net.edge(e).tail;
            if done[u.index()] || blocked(u) {
                continue;
            }
            let nd = d + net.edge(e).weight;
            let nh = h + 1;
            let better = match nd.total_cmp(&dist[u.index()]) {
                Ordering::Less => true,
                Ordering::Equal => nh < hops[u.index()],
                Ordering::Greater => false,
            };
            if better {
                dist[u.index()] = nd;
                hops[u.index()] = nh;
                heap.push(Label { dist: nd, hops: nh, node: u.0 });
            }
        }
    }
    (dist, hops)
}

/// Minimum-weight path restricted by edge and node filters.
///
/// Ties: fewest edges first, then the lexicographically smallest edge-id
/// sequence. The walk only follows edges that are tight on weight and
/// decrease the remaining hop count by exactly one, so the result is simple
/// even in the presence of zero-weight cycles.
pub(crate) fn constrained_shortest(
    net: &RoadNetwork,
    origin: NodeId,
    dest: NodeId,
    usable: &dyn Fn(EdgeId) -> bool,
    blocked: &dyn Fn(NodeId) -> bool,
) -> Option<Path> {
    if origin == dest {
        return Some(Path::empty(origin));
    }
    if blocked(dest) {
        return None;
    }
    let (dist, hops) = labels_to(net, dest, usable, blocked);
    if !dist[origin.index()].is_finite() {
        return None;
    }
    let mut at = origin;
    let mut edges = Vec::with_capacity(hops[origin.index()] as usize);
    while at != dest {
        let du = dist[at.index()];
        let hu = hops[at.index()];
        let next = net.outgoing(at).iter().copied().find(|&e| {
            if !usable(e) {
                return false;
            }
            let edge = net.edge(e);
            let v = edge.head.index();
            dist[v].is_finite()
                && hops[v] != u32::MAX
                && hops[v] + 1 == hu
                && weight_eq(du, edge.weight + dist[v])
        })?;
        edges.push(next);
        at = net.edge(next).head;
    }
    // Labels guarantee a simple path; from_edges re-checks and sums weights.
    Path::from_edges(net, origin, edges).ok()
}

/// Minimum-weight path from `origin` to `dest` using only edges with
/// residual capacity at least one. `None` if `dest` is unreachable.
pub fn min_cost_path(net: &RoadNetwork, residual: &Residual, origin: NodeId, dest: NodeId) -> Option<Path> {
    constrained_shortest(net, origin, dest, &|e| residual.is_usable(e), &|_| false)
}

/// Plain Dijkstra distances from `source` over all edges.
pub fn shortest_distances_from(net: &RoadNetwork, source: NodeId) -> Vec<f64> {
    let n = net.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source.index()] = 0.0;
    heap.push(Label { dist: 0.0, hops: 0, node: source.0 });
    while let Some(Label { dist: d, node, .. }) = heap.pop() {
        let u = NodeId(node);
        if d > dist[u.index()] {
            continue;
        }
        for &e in net.outgoing(u) {
            let edge = net.edge(e);
            let nd = d + edge.weight;
            if nd < dist[edge.head.index()] {
                dist[edge.head.index()] = nd;
                heap.push(Label { dist: nd, hops: 0, node: edge.head.0 });
            }
        }
    }
    dist
}

#[derive(Clone)]
struct Candidate(Path);

impl Candidate {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.0.weight().total_cmp(&other.0.weight()).then_with(|| self.0.edges().cmp(other.0.edges()))
    }
}

/// Lazy enumeration of simple paths in nondecreasing weight (Yen's
/// algorithm) over the edges with residual capacity.
pub struct KShortestPaths<'a> {
    net: &'a RoadNetwork,
    usable: Vec<bool>,
    origin: NodeId,
    dest: NodeId,
    found: Vec<Path>,
    candidates: Vec<Candidate>,
    seen: HashSet<Vec<EdgeId>>,
    started: bool,
}

pub fn k_shortest_paths<'a>(
    net: &'a RoadNetwork,
    residual: &Residual,
    origin: NodeId,
    dest: NodeId,
) -> KShortestPaths<'a> {
    KShortestPaths {
        net,
        usable: net.edge_ids().map(|e| residual.is_usable(e)).collect(),
        origin,
        dest,
        found: Vec::new(),
        candidates: Vec::new(),
        seen: HashSet::new(),
        started: false,
    }
}

impl KShortestPaths<'_> {
    fn push_candidate(&mut self, path: Path) {
        if self.seen.insert(path.edges().to_vec()) {
            self.candidates.push(Candidate(path));
        }
    }

    fn spur_from_last(&mut self) {
        let last = match self.found.last() {
            Some(p) => p.clone(),
            None => return,
        };
        if last.is_empty() {
            return;
        }
        let net = self.net;
        let nodes = last.nodes(net);
        for i in 0..last.len() {
            let spur = nodes[i];
            let root = &last.edges()[..i];
            let banned_edges: HashSet<EdgeId> = self
                .found
                .iter()
                .filter(|p| p.len() > i && &p.edges()[..i] == root)
                .map(|p| p.edges()[i])
                .collect();
            let banned_nodes: HashSet<NodeId> = nodes[..i].iter().copied().collect();
            let usable = &self.usable;
            let spur_path = constrained_shortest(
                net,
                spur,
                self.dest,
                &|e| usable[e.index()] && !banned_edges.contains(&e),
                &|v| banned_nodes.contains(&v),
            );
            if let Some(sp) = spur_path {
                let mut edges = root.to_vec();
                edges.extend_from_slice(sp.edges());
                if let Ok(p) = Path::from_edges(net, self.origin, edges) {
                    self.push_candidate(p);
                }
            }
        }
    }
}

impl Iterator for KShortestPaths<'_> {
    type Item = Path;

    fn next(&mut self) -> Option<Path> {
        if !self.started {
            self.started = true;
            let usable = &self.usable;
            let first =
                constrained_shortest(self.net, self.origin, self.dest, &|e| usable[e.index()], &|_| false)?;
            self.seen.insert(first.edges().to_vec());
            self.found.push(first.clone());
            return Some(first);
        }
        self.spur_from_last();
        let best = self.candidates.iter().enumerate().min_by(|a, b| a.1.key_cmp(b.1)).map(|(i, _)| i)?;
        let Candidate(path) = self.candidates.swap_remove(best);
        self.found.push(path.clone());
        Some(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> RoadNetwork {
        // s -> a -> t (2), s -> b -> t (2), s -> t (5), a -> b (0)
        let mut b = RoadNetwork::builder();
        for n in ["s", "a", "b", "t"] {
            b.add_node(n).unwrap();
        }
        b.add_edge_named("s", "b", 1, 1.0, 0).unwrap();
        b.add_edge_named("s", "a", 1, 1.0, 0).unwrap();
        b.add_edge_named("a", "t", 1, 1.0, 0).unwrap();
        b.add_edge_named("b", "t", 1, 1.0, 0).unwrap();
        b.add_edge_named("s", "t", 1, 5.0, 0).unwrap();
        b.add_edge_named("a", "b", 1, 0.0, 0).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn origin_equals_destination() {
        let net = diamond();
        let p = min_cost_path(&net, &Residual::full(&net), NodeId(2), NodeId(2)).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.weight(), 0.0);
    }

    #[test]
    fn tie_break_prefers_smallest_edge_ids() {
        let net = diamond();
        let p = min_cost_path(&net, &Residual::full(&net), NodeId(0), NodeId(3)).unwrap();
        // s>b (id 0) beats s>a (id 1); s>a>b>t is also weight 2 but longer
        assert_eq!(p.edges(), &[EdgeId(0), EdgeId(3)]);
    }

    #[test]
    fn saturated_edges_are_skipped() {
        let net = diamond();
        let mut r = Residual::full(&net);
        r.consume(&Path::from_names(&net, &["s", "b"]).unwrap()).unwrap();
        let p = min_cost_path(&net, &r, NodeId(0), NodeId(3)).unwrap();
        assert_eq!(p.display(&net).to_string(), "s>a,a>t");
    }

    #[test]
    fn zero_weight_cycle_still_yields_simple_path() {
        let mut b = RoadNetwork::builder();
        for n in ["s", "x", "y", "t"] {
            b.add_node(n).unwrap();
        }
        b.add_edge_named("s", "x", 1, 0.0, 0).unwrap();
        b.add_edge_named("x", "y", 1, 0.0, 0).unwrap();
        b.add_edge_named("y", "x", 1, 0.0, 0).unwrap();
        b.add_edge_named("y", "s", 1, 0.0, 0).unwrap();
        b.add_edge_named("x", "t", 1, 0.0, 0).unwrap();
        let net = b.build().unwrap();
        let p = min_cost_path(&net, &Residual::full(&net), NodeId(0), NodeId(3)).unwrap();
        assert_eq!(p.display(&net).to_string(), "s>x,x>t");
    }

    #[test]
    fn yen_enumerates_all_simple_paths_in_order() {
        let net = diamond();
        let all: Vec<_> = k_shortest_paths(&net, &Residual::full(&net), NodeId(0), NodeId(3)).collect();
        let rendered: Vec<_> = all.iter().map(|p| p.display(&net).to_string()).collect();
        assert_eq!(rendered, vec!["s>b,b>t", "s>a,a>t", "s>a,a>b,b>t", "s>t"]);
        assert!(all.windows(2).all(|w| w[0].weight() <= w[1].weight()));
    }

    #[test]
    fn unreachable_gives_none() {
        let net = diamond();
        assert!(min_cost_path(&net, &Residual::full(&net), NodeId(3), NodeId(0)).is_none());
        assert_eq!(k_shortest_paths(&net, &Residual::full(&net), NodeId(3), NodeId(0)).count(), 0);
    }
}
