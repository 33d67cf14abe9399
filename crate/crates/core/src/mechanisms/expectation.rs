//! Expected social cost of RSD.
//!
//! SD treats agents with equal (origin, declared, true destination) alike,
//! so the cost of an ordering only depends on its sequence of agent types.
//! Every distinct type sequence stands for the same number of orderings,
//! and the exact expectation is the plain average over those sequences.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::serial::{serial_paths, uniform_order};
use super::{social_cost, AgentOrder};
use crate::error::{Result, TapError};
use crate::instance::Instance;
use crate::network::NodeId;

/// Maximum number of distinct orderings evaluated in exact mode (8!).
pub const EXACT_ORDERING_LIMIT: u128 = 40_320;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RsdMode {
    Exact,
    MonteCarlo { trials: u32, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RsdExpectation {
    pub mean: f64,
    /// Standard error of the mean; zero in exact mode.
    pub stderr: f64,
    pub orderings: usize,
}

type TypeKey = (NodeId, NodeId, NodeId);

fn type_classes(instance: &Instance) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<TypeKey, Vec<usize>> = BTreeMap::new();
    for (i, a) in instance.agents().iter().enumerate() {
        classes.entry((a.origin, a.declared, a.destination)).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = classes.into_values().collect();
    out.sort_by_key(|c| c[0]);
    out
}

fn multinomial(sizes: &[usize]) -> Option<u128> {
    let mut total: u128 = 1;
    let mut placed: u128 = 0;
    for &s in sizes {
        for k in 1..=s as u128 {
            placed += 1;
            total = total.checked_mul(placed)? / k;
        }
    }
    Some(total)
}

/// One representative ordering per distinct agent-type sequence; agents of
/// the same type appear in index order.
pub fn distinct_type_orders(instance: &Instance) -> Result<Vec<AgentOrder>> {
    let classes = type_classes(instance);
    let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
    let count = multinomial(&sizes).unwrap_or(u128::MAX);
    if count > EXACT_ORDERING_LIMIT {
        return Err(TapError::TooManyOrderings { orderings: count, limit: EXACT_ORDERING_LIMIT });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut left = sizes.clone();
    let mut seq = Vec::with_capacity(instance.agent_count());
    enumerate(&classes, &mut left, &mut seq, &mut out);
    Ok(out)
}

fn enumerate(classes: &[Vec<usize>], left: &mut [usize], seq: &mut Vec<usize>, out: &mut Vec<AgentOrder>) {
    if left.iter().all(|&l| l == 0) {
        let mut next = vec![0; classes.len()];
        let order = seq
            .iter()
            .map(|&c| {
                next[c] += 1;
                classes[c][next[c] - 1]
            })
            .collect();
        out.push(AgentOrder(order));
        return;
    }
    for c in 0..classes.len() {
        if left[c] == 0 {
            continue;
        }
        left[c] -= 1;
        seq.push(c);
        enumerate(classes, left, seq, out);
        seq.pop();
        left[c] += 1;
    }
}

fn sd_cost(instance: &Instance, order: &AgentOrder) -> Result<f64> {
    let paths = serial_paths(instance, order, |_| {})?;
    social_cost(instance, &paths)
}

/// Expected RSD social cost. Exact mode refuses instances with more than
/// [`EXACT_ORDERING_LIMIT`] distinct type sequences.
pub fn rsd_expected_cost(instance: &Instance, mode: RsdMode) -> Result<RsdExpectation> {
    let orders = match mode {
        RsdMode::Exact => distinct_type_orders(instance)?,
        RsdMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(TapError::InvalidArgument("monte-carlo needs at least one trial".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..trials).map(|_| uniform_order(instance.agent_count(), &mut rng)).collect()
        }
    };
    let costs = orders.par_iter().map(|o| sd_cost(instance, o)).collect::<Result<Vec<f64>>>()?;
    let k = costs.len() as f64;
    let mean = costs.iter().sum::<f64>() / k;
    let stderr = match mode {
        RsdMode::Exact => 0.0,
        RsdMode::MonteCarlo { .. } if costs.len() < 2 => 0.0,
        RsdMode::MonteCarlo { .. } => {
            let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        }
    };
    Ok(RsdExpectation { mean, stderr, orderings: costs.len() })
}
