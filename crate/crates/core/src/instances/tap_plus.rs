//! Reduction from assignment of indivisible objects with ordinal
//! preferences to traffic assignment.
//!
//! A common origin `O` links to one node `x{j}` per object through a
//! unit-capacity edge of weight `ε`. Each preference order gets its own
//! destination node `D{k}`, reached from `x{j}` with weight equal to the
//! rank of object `j` in that order. Routing through `x{j}` means receiving
//! object `j`.

use std::collections::BTreeMap;

use crate::error::{Result, TapError};
use crate::instance::{AgentProfile, Instance};
use crate::network::{EdgeId, NetworkBuilder, NodeId, Path};

/// Weak orders over `m` objects as rank vectors (1 = most preferred).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceProfile {
    objects: usize,
    ranks: Vec<Vec<u32>>,
}

impl PreferenceProfile {
    /// Every row must use contiguous ranks starting at 1.
    pub fn new(objects: usize, ranks: Vec<Vec<u32>>) -> Result<Self> {
        if objects == 0 {
            return Err(TapError::InvalidArgument("need at least one object".into()));
        }
        for (i, row) in ranks.iter().enumerate() {
            if row.len() != objects {
                return Err(TapError::InvalidArgument(format!(
                    "agent {} ranks {} objects, expected {objects}",
                    i + 1,
                    row.len()
                )));
            }
            let mut distinct: Vec<u32> = row.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.iter().enumerate().any(|(k, &r)| r != k as u32 + 1) {
                return Err(TapError::InvalidArgument(format!(
                    "ranks of agent {} are not contiguous from 1",
                    i + 1
                )));
            }
        }
        Ok(Self { objects, ranks })
    }

    /// Strict orders given as object sequences, best first.
    pub fn from_strict_orders(objects: usize, orders: &[Vec<usize>]) -> Result<Self> {
        let ranks = orders
            .iter()
            .map(|o| {
                let mut r = vec![0u32; objects];
                for (pos, &x) in o.iter().enumerate() {
                    if x >= objects || r[x] != 0 {
                        return Err(TapError::InvalidArgument(format!("bad strict order {o:?}")));
                    }
                    r[x] = pos as u32 + 1;
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(objects, ranks)
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn agents(&self) -> usize {
        self.ranks.len()
    }

    pub fn rank(&self, agent: usize, object: usize) -> u32 {
        self.ranks[agent][object]
    }

    pub fn ranks(&self) -> &[Vec<u32>] {
        &self.ranks
    }
}

/// Rank vectors of all strict orders over `m` objects, in lexicographic
/// order of the object sequence (`x1 x2 … xm` first, reversed last).
pub fn all_strict_orders(m: usize) -> Vec<Vec<u32>> {
    fn rec(m: usize, seq: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if seq.len() == m {
            let mut r = vec![0u32; m];
            for (pos, &x) in seq.iter().enumerate() {
                r[x] = pos as u32 + 1;
            }
            out.push(r);
            return;
        }
        for x in 0..m {
            if !used[x] {
                used[x] = true;
                seq.push(x);
                rec(m, seq, used, out);
                seq.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(m, &mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct TapPlus {
    pub instance: Instance,
    /// Edge `O → x{j}` for every object `j`.
    pub object_edges: Vec<EdgeId>,
    /// Rank vector behind each destination node `D{k}`.
    pub destinations: Vec<(NodeId, Vec<u32>)>,
}

impl TapPlus {
    /// Object received by an agent routed along `path`.
    pub fn object_of(&self, path: &Path) -> Option<usize> {
        let first = *path.edges().first()?;
        self.object_edges.iter().position(|&e| e == first)
    }
}

/// Builds destination nodes only for the orders present in `profile`.
pub fn gen_tap_plus(profile: &PreferenceProfile, epsilon: f64) -> Result<TapPlus> {
    build(profile, epsilon, Vec::new())
}

/// Like [`gen_tap_plus`] but with a destination node for every strict order
/// over the objects (at most 6 objects).
pub fn gen_tap_plus_all_orders(profile: &PreferenceProfile, epsilon: f64) -> Result<TapPlus> {
    if profile.objects() > 6 {
        return Err(TapError::InvalidArgument("all strict orders need at most 6 objects".into()));
    }
    build(profile, epsilon, all_strict_orders(profile.objects()))
}

fn build(profile: &PreferenceProfile, epsilon: f64, mut orders: Vec<Vec<u32>>) -> Result<TapPlus> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(TapError::InvalidArgument("epsilon must be positive".into()));
    }
    for r in profile.ranks() {
        if !orders.contains(r) {
            orders.push(r.clone());
        }
    }
    let m = profile.objects();
    let mut b = NetworkBuilder::new();
    let o = b.add_node("O")?;
    let xs: Vec<NodeId> = (1..=m).map(|j| b.add_node(format!("x{j}"))).collect::<Result<_>>()?;
    let ds: Vec<NodeId> = (1..=orders.len()).map(|k| b.add_node(format!("D{k}"))).collect::<Result<_>>()?;
    let object_edges = xs.iter().map(|&x| b.add_edge(o, x, 1, epsilon, 0)).collect::<Result<Vec<_>>>()?;
    for (k, order) in orders.iter().enumerate() {
        for (j, &x) in xs.iter().enumerate() {
            b.add_edge(x, ds[k], 1, order[j] as f64, 0)?;
        }
    }
    let index: BTreeMap<&Vec<u32>, usize> = orders.iter().enumerate().map(|(k, r)| (r, k)).rev().collect();
    let agents = profile
        .ranks()
        .iter()
        .enumerate()
        .map(|(i, r)| AgentProfile::truthful(format!("{}", i + 1), o, ds[index[r]]))
        .collect();
    let destinations = ds.into_iter().zip(orders).collect();
    Ok(TapPlus { instance: Instance::new(b.build()?, agents)?, object_edges, destinations })
}

/// Serial dictatorship on objects: in `order`, each agent takes their best
/// remaining object (lowest index among equally ranked ones). `None` once
/// objects run out.
pub fn object_serial_dictatorship(profile: &PreferenceProfile, order: &[usize]) -> Vec<Option<usize>> {
    let mut taken = vec![false; profile.objects()];
    let mut out = vec![None; profile.agents()];
    for &a in order {
        let pick = (0..profile.objects()).filter(|&x| !taken[x]).min_by_key(|&x| (profile.rank(a, x), x));
        if let Some(x) = pick {
            taken[x] = true;
            out[a] = Some(x);
        }
    }
    out
}
