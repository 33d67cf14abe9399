use std::collections::VecDeque;

use super::{EdgeId, NodeId, RoadNetwork};

/// Maximum number of edge-disjoint directed paths from `s` to `t`, found by
/// unit-capacity augmenting paths. Stops early once `limit` is reached.
pub fn max_edge_disjoint_paths(net: &RoadNetwork, s: NodeId, t: NodeId, limit: u32) -> u32 {
    if s == t {
        return limit;
    }
    let n = net.node_count();
    let mut used = vec![false; net.edge_count()];
    let mut flow = 0;
    // parent: (edge, forward?)
    let mut parent: Vec<Option<(EdgeId, bool)>> = vec![None; n];
    while flow < limit {
        parent.iter_mut().for_each(|p| *p = None);
        let mut visited = vec![false; n];
        visited[s.index()] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &e in net.outgoing(u) {
                let v = net.edge(e).head;
                if !used[e.index()] && !visited[v.index()] {
                    visited[v.index()] = true;
                    parent[v.index()] = Some((e, true));
                    queue.push_back(v);
                }
            }
            for &e in net.incoming(u) {
                let v = net.edge(e).tail;
                if used[e.index()] && !visited[v.index()] {
                    visited[v.index()] = true;
                    parent[v.index()] = Some((e, false));
                    queue.push_back(v);
                }
            }
        }
        if !visited[t.index()] {
            break;
        }
        let mut at = t;
        while at != s {
            let (e, forward) = parent[at.index()].expect("bfs tree");
            used[e.index()] = forward;
            at = if forward { net.edge(e).tail } else { net.edge(e).head };
        }
        flow += 1;
    }
    flow
}

/// Directed edge connectivity, capped at `cap`. Uses the fact that the
/// minimum over all ordered pairs equals the minimum of `λ(r, v)` and
/// `λ(v, r)` over all `v` for any fixed root `r`.
pub fn edge_connectivity(net: &RoadNetwork, cap: u32) -> u32 {
    if net.node_count() <= 1 {
        return cap;
    }
    let root = NodeId(0);
    let mut best = cap;
    for v in net.nodes().skip(1) {
        best = best.min(max_edge_disjoint_paths(net, root, v, best));
        if best == 0 {
            break;
        }
        best = best.min(max_edge_disjoint_paths(net, v, root, best));
        if best == 0 {
            break;
        }
    }
    best
}

/// True iff every ordered pair of nodes is joined by at least `k`
/// edge-disjoint paths.
pub fn is_k_edge_connected(net: &RoadNetwork, k: u32) -> bool {
    edge_connectivity(net, k) >= k
}

fn reach_count(net: &RoadNetwork, start: NodeId, forward: bool) -> usize {
    let mut seen = vec![false; net.node_count()];
    seen[start.index()] = true;
    let mut stack = vec![start];
    let mut count = 1;
    while let Some(u) = stack.pop() {
        let next: Box<dyn Iterator<Item = NodeId>> = if forward {
            Box::new(net.outgoing(u).iter().map(|&e| net.edge(e).head))
        } else {
            Box::new(net.incoming(u).iter().map(|&e| net.edge(e).tail))
        };
        for v in next {
            if !seen[v.index()] {
                seen[v.index()] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count
}

pub fn is_strongly_connected(net: &RoadNetwork) -> bool {
    let n = net.node_count();
    n <= 1 || (reach_count(net, NodeId(0), true) == n && reach_count(net, NodeId(0), false) == n)
}

/// Largest finite BFS hop distance between any two nodes.
pub fn hop_diameter(net: &RoadNetwork) -> u32 {
    let n = net.node_count();
    let mut diameter = 0;
    let mut depth = vec![u32::MAX; n];
    for s in net.nodes() {
        depth.iter_mut().for_each(|d| *d = u32::MAX);
        depth[s.index()] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let du = depth[u.index()];
            diameter = diameter.max(du);
            for &e in net.outgoing(u) {
                let v = net.edge(e).head;
                if depth[v.index()] == u32::MAX {
                    depth[v.index()] = du + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    diameter
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> RoadNetwork {
        let mut b = RoadNetwork::builder();
        let ids: Vec<_> = (0..n).map(|i| b.add_node(format!("n{i}")).unwrap()).collect();
        for &u in &ids {
            for &v in &ids {
                if u != v {
                    b.add_edge(u, v, 1, 1.0, 0).unwrap();
                }
            }
        }
        b.build().unwrap()
    }

    fn cycle(n: usize) -> RoadNetwork {
        let mut b = RoadNetwork::builder();
        let ids: Vec<_> = (0..n).map(|i| b.add_node(format!("n{i}")).unwrap()).collect();
        for i in 0..n {
            b.add_edge(ids[i], ids[(i + 1) % n], 1, 1.0, 0).unwrap();
        }
        b.build().unwrap()
    }

    #[test]
    fn complete_graph_is_n_minus_one_connected() {
        let net = complete(4);
        assert!(is_k_edge_connected(&net, 3));
        assert!(!is_k_edge_connected(&net, 4));
    }

    #[test]
    fn directed_cycle_is_only_one_connected() {
        let net = cycle(4);
        assert!(is_k_edge_connected(&net, 1));
        assert!(!is_k_edge_connected(&net, 2));
        assert!(is_strongly_connected(&net));
        assert_eq!(hop_diameter(&net), 3);
    }

    #[test]
    fn disconnected_graph_has_zero_connectivity() {
        let mut b = RoadNetwork::builder();
        b.add_node("a").unwrap();
        b.add_node("b").unwrap();
        let net = b.build().unwrap();
        assert_eq!(edge_connectivity(&net, 5), 0);
        assert!(!is_strongly_connected(&net));
    }
}
