use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Result, TapError};
use crate::network::{is_strongly_connected, NetworkBuilder, NodeId, RoadNetwork};

/// How capacities are synthesised for DIMACS distance graphs, which carry
/// none.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CapacityPolicy {
    Constant(u32),
    /// `max(1, round(factor · outdeg(tail)))`.
    Degree(f64),
}

impl Default for CapacityPolicy {
    fn default() -> Self {
        CapacityPolicy::Constant(27)
    }
}

impl std::str::FromStr for CapacityPolicy {
    type Err = TapError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || TapError::InvalidArgument(format!("bad capacity policy `{s}`"));
        match s.split_once(':') {
            Some(("const", c)) => c.parse().ok().filter(|&c| c >= 1).map(Self::Constant).ok_or_else(bad),
            Some(("degree", f)) => {
                f.parse().ok().filter(|f: &f64| *f > 0.0).map(Self::Degree).ok_or_else(bad)
            }
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for CapacityPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CapacityPolicy::Constant(c) => write!(f, "const:{c}"),
            CapacityPolicy::Degree(x) => write!(f, "degree:{x}"),
        }
    }
}

/// Reads a DIMACS shortest-path file (`p sp n m`, `a u v w`, `c` comments).
/// Self-loops are dropped and parallel arcs collapse to the lightest one.
pub fn parse_dimacs_str(text: &str, policy: CapacityPolicy) -> Result<RoadNetwork> {
    let mut declared: Option<(usize, usize)> = None;
    let mut arcs: HashMap<(u32, u32), f64> = HashMap::new();
    let mut order: Vec<(u32, u32)> = Vec::new();
    let mut arc_lines = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let err = |message: String| TapError::Parse { line: i + 1, message };
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.as_slice() {
            [] | ["c", ..] => {}
            ["p", "sp", n, m] => {
                if declared.is_some() {
                    return Err(err("duplicate problem line".into()));
                }
                let n = n.parse().map_err(|_| err(format!("bad node count `{n}`")))?;
                let m = m.parse().map_err(|_| err(format!("bad arc count `{m}`")))?;
                declared = Some((n, m));
            }
            ["a", u, v, w] => {
                let (n, _) = declared.ok_or_else(|| err("arc before problem line".into()))?;
                let node = |s: &str| -> Result<u32> {
                    match s.parse::<u32>() {
                        Ok(x) if x >= 1 && x as usize <= n => Ok(x - 1),
                        _ => Err(err(format!("bad node `{s}`"))),
                    }
                };
                let (u, v) = (node(u)?, node(v)?);
                let w: f64 = w
                    .parse()
                    .ok()
                    .filter(|w: &f64| w.is_finite() && *w >= 0.0)
                    .ok_or_else(|| err(format!("bad weight `{w}`")))?;
                arc_lines += 1;
                if u == v {
                    continue;
                }
                match arcs.get_mut(&(u, v)) {
                    Some(old) => *old = old.min(w),
                    None => {
                        arcs.insert((u, v), w);
                        order.push((u, v));
                    }
                }
            }
            _ => return Err(err(format!("unrecognised line `{}`", raw.trim()))),
        }
    }
    let (n, m) = declared.ok_or(TapError::Parse { line: 1, message: "missing problem line".into() })?;
    if arc_lines != m {
        log::warn!("problem line announces {m} arcs, file has {arc_lines}");
    }
    let mut outdeg = vec![0u32; n];
    for &(u, _) in &order {
        outdeg[u as usize] += 1;
    }
    let mut b = NetworkBuilder::new();
    for v in 1..=n {
        b.add_node(v.to_string())?;
    }
    for (u, v) in order {
        let cap = match policy {
            CapacityPolicy::Constant(c) => c,
            CapacityPolicy::Degree(f) => ((f * outdeg[u as usize] as f64) + 0.5).floor().max(1.0) as u32,
        };
        b.add_edge(NodeId(u), NodeId(v), cap, arcs[&(u, v)], 0)?;
    }
    b.build()
}

pub fn parse_dimacs(path: impl AsRef<std::path::Path>, policy: CapacityPolicy) -> Result<RoadNetwork> {
    parse_dimacs_str(&std::fs::read_to_string(path)?, policy)
}

/// Structural statistics: `|V|`, `|E|`, mean out-degree, mean capacity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub outdeg_avg: f64,
    pub cap_avg: f64,
}

impl GraphStats {
    pub fn of(net: &RoadNetwork) -> Self {
        let nodes = net.node_count();
        let edges = net.edge_count();
        let cap_sum: f64 = net.edges().iter().map(|e| e.capacity as f64).sum();
        Self {
            nodes,
            edges,
            outdeg_avg: if nodes == 0 { 0.0 } else { edges as f64 / nodes as f64 },
            cap_avg: if edges == 0 { 0.0 } else { cap_sum / edges as f64 },
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, u32);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Keeps nodes `0..keep` and joins retained nodes `u → v` whenever `v` is
/// reachable from `u` through removed nodes only, with the weight of the
/// lightest such connection (or the direct edge, if lighter). A shortcut
/// inherits the smallest capacity and the summed transit time along it.
/// Distances among retained nodes are preserved.
pub fn extract_subgraph(net: &RoadNetwork, keep: usize) -> Result<RoadNetwork> {
    let n = net.node_count();
    if keep == 0 || keep > n {
        return Err(TapError::InvalidArgument(format!("cannot keep {keep} of {n} nodes")));
    }
    let mut b = NetworkBuilder::new();
    for v in 0..keep {
        b.add_node(net.name(NodeId(v as u32)))?;
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut cap = vec![0u32; n];
    let mut transit = vec![0u32; n];
    let mut touched = Vec::new();
    for s in 0..keep {
        for &v in &touched {
            dist[v] = f64::INFINITY;
        }
        touched.clear();
        dist[s] = 0.0;
        cap[s] = u32::MAX;
        transit[s] = 0;
        touched.push(s);
        let mut heap = BinaryHeap::from([Entry(0.0, s as u32)]);
        let mut found: Vec<usize> = Vec::new();
        while let Some(Entry(d, u)) = heap.pop() {
            let u = u as usize;
            if d > dist[u] {
                continue;
            }
            if u != s && u < keep {
                found.push(u);
                continue;
            }
            for &e in net.outgoing(NodeId(u as u32)) {
                let edge = net.edge(e);
                let v = edge.head.index();
                let nd = d + edge.weight;
                let better = nd < dist[v] || (nd == dist[v] && edge.capacity.min(cap[u]) > cap[v]);
                if better && v != s {
                    if dist[v].is_infinite() {
                        touched.push(v);
                    }
                    dist[v] = nd;
                    cap[v] = edge.capacity.min(cap[u]);
                    transit[v] = transit[u].saturating_add(edge.transit);
                    heap.push(Entry(nd, v as u32));
                }
            }
        }
        found.sort_unstable();
        found.dedup();
        for v in found {
            b.add_edge(NodeId(s as u32), NodeId(v as u32), cap[v], dist[v], transit[v])?;
        }
    }
    let sub = b.build()?;
    if !is_strongly_connected(&sub) {
        return Err(TapError::InvalidNetwork(format!(
            "subgraph on {keep} nodes is not strongly connected; try a larger node count"
        )));
    }
    Ok(sub)
}
