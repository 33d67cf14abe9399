//! Exact optimum by depth-first branch and bound over agents, branching on
//! candidate paths in nondecreasing weight.
//!
//! The objective is the total weight of the assigned paths. At a minimiser
//! nobody has a cheaper reaction (it would yield a cheaper feasible
//! assignment), so this total is also the social cost of the optimum.

use std::cmp::Ordering;

use super::{Allocation, Mechanism};
use crate::error::{Result, TapError};
use crate::instance::Instance;
use crate::network::{k_shortest_paths, min_cost_path, shortest_distances_from, weight_eq, Path, Residual};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OptimalConfig {
    /// Maximum number of search nodes expanded.
    pub node_budget: u64,
    /// Candidate paths enumerated per agent and search node.
    pub path_cap: usize,
}

impl Default for OptimalConfig {
    fn default() -> Self {
        Self { node_budget: 2_000_000, path_cap: 64 }
    }
}

#[derive(Clone, Debug)]
pub struct OptimalOutcome {
    pub allocation: Allocation,
    /// False when the node budget ran out or a path cap was binding.
    pub certified: bool,
    pub nodes: u64,
}

/// Sum over agents of the unconstrained shortest-path weight to the declared
/// destination. Never exceeds the optimum.
pub fn opt_lower_bound(instance: &Instance) -> Result<f64> {
    let net = instance.network();
    let mut total = 0.0;
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; net.node_count()];
    for a in instance.agents() {
        let dist = cache[a.origin.index()].get_or_insert_with(|| shortest_distances_from(net, a.origin));
        let d = dist[a.declared.index()];
        if !d.is_finite() {
            return Err(TapError::Unreachable(a.id.clone()));
        }
        total += d;
    }
    Ok(total)
}

struct Search<'a> {
    instance: &'a Instance,
    config: OptimalConfig,
    /// Agents in branching order.
    agents: Vec<usize>,
    current: Vec<Option<Path>>,
    best: Option<(f64, Vec<Path>)>,
    nodes: u64,
    exhausted: bool,
    capped: bool,
}

fn lex_cmp(a: &[Path], b: &[Path]) -> Ordering {
    a.iter().map(Path::edges).cmp(b.iter().map(Path::edges))
}

impl Search<'_> {
    fn incumbent(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.0)
    }

    fn exceeds_incumbent(&self, bound: f64) -> bool {
        let inc = self.incumbent();
        inc.is_finite() && bound > inc && !weight_eq(bound, inc)
    }

    /// Admissible completion bound: each unassigned agent's cheapest path in
    /// the current residual. `None` if one of them cannot move at all.
    fn remaining_bound(&self, depth: usize, residual: &Residual) -> Option<f64> {
        let net = self.instance.network();
        self.agents[depth..].iter().try_fold(0.0, |acc, &i| {
            let a = self.instance.agent(i);
            min_cost_path(net, residual, a.origin, a.declared).map(|p| acc + p.weight())
        })
    }

    fn offer(&mut self, total: f64) {
        let paths: Vec<Path> = self.current.iter().map(|p| p.clone().expect("complete")).collect();
        let better = match &self.best {
            None => true,
            Some((w, best)) => {
                if weight_eq(total, *w) {
                    lex_cmp(&paths, best) == Ordering::Less
                } else {
                    total < *w
                }
            }
        };
        if better {
            self.best = Some((total, paths));
        }
    }

    fn dfs(&mut self, depth: usize, partial: f64, residual: &mut Residual) {
        if self.nodes >= self.config.node_budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        if depth == self.agents.len() {
            self.offer(partial);
            return;
        }
        let Some(rest) = self.remaining_bound(depth + 1, residual) else {
            return;
        };
        let i = self.agents[depth];
        let a = self.instance.agent(i);
        let net = self.instance.network();
        let candidates = k_shortest_paths(net, residual, a.origin, a.declared);
        for (taken, p) in candidates.enumerate() {
            if self.exceeds_incumbent(partial + p.weight() + rest) {
                break;
            }
            if taken == self.config.path_cap {
                self.capped = true;
                break;
            }
            if residual.consume(&p).is_err() {
                continue;
            }
            let w = p.weight();
            self.current[i] = Some(p);
            self.dfs(depth + 1, partial + w, residual);
            let p = self.current[i].take().expect("just set");
            residual.release(&p);
            if self.exhausted {
                return;
            }
        }
    }
}

/// Minimum total-weight feasible assignment of every agent to a path towards
/// their declared destination. Among optima the lexicographically smallest
/// (comparing agents' edge sequences in index order) is returned.
pub fn optimal_allocation(instance: &Instance, config: OptimalConfig) -> Result<OptimalOutcome> {
    let net = instance.network();
    let n = instance.agent_count();
    let full = Residual::full(net);
    let mut free = Vec::with_capacity(n);
    for a in instance.agents() {
        let p = min_cost_path(net, &full, a.origin, a.declared)
            .ok_or_else(|| TapError::Unreachable(a.id.clone()))?;
        free.push(p.weight());
    }
    let mut agents: Vec<usize> = (0..n).collect();
    agents.sort_by(|&x, &y| free[y].total_cmp(&free[x]).then(x.cmp(&y)));
    let mut search = Search {
        instance,
        config,
        agents,
        current: vec![None; n],
        best: None,
        nodes: 0,
        exhausted: false,
        capped: false,
    };
    let mut residual = full;
    search.dfs(0, 0.0, &mut residual);
    let certified = !search.exhausted && !search.capped;
    match search.best {
        Some((_, paths)) => {
            if !certified {
                log::warn!(
                    "optimum not certified after {} nodes (budget exhausted: {}, path cap hit: {})",
                    search.nodes,
                    search.exhausted,
                    search.capped
                );
            }
            Ok(OptimalOutcome {
                allocation: Allocation::new(instance, paths)?,
                certified,
                nodes: search.nodes,
            })
        }
        None if search.exhausted => Err(TapError::BudgetExhausted(config.node_budget)),
        None => Err(TapError::NoFeasibleAssignment),
    }
}

/// The optimal allocator used as a (non-strategyproof) mechanism.
#[derive(Clone, Copy, Debug, Default)]
pub struct OptimalMechanism {
    pub config: OptimalConfig,
}

impl Mechanism for OptimalMechanism {
    fn allocate(&self, instance: &Instance) -> Result<Allocation> {
        optimal_allocation(instance, self.config).map(|o| o.allocation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::AgentProfile;
    use crate::network::{NodeId, RoadNetwork};

    fn bottleneck() -> Instance {
        // s->t (1) and s->m->t (3 + 3), all unit capacity
        let mut b = RoadNetwork::builder();
        for n in ["s", "m", "t"] {
            b.add_node(n).unwrap();
        }
        b.add_edge_named("s", "t", 1, 1.0, 0).unwrap();
        b.add_edge_named("s", "m", 1, 3.0, 0).unwrap();
        b.add_edge_named("m", "t", 1, 3.0, 0).unwrap();
        let agents = vec![
            AgentProfile::truthful("1", NodeId(0), NodeId(2)),
            AgentProfile::truthful("2", NodeId(0), NodeId(2)),
        ];
        Instance::new(b.build().unwrap(), agents).unwrap()
    }

    #[test]
    fn ties_resolve_to_lexicographic_smallest() {
        let inst = bottleneck();
        let out = optimal_allocation(&inst, OptimalConfig::default()).unwrap();
        assert!(out.certified);
        assert_eq!(out.allocation.social_cost(), 7.0);
        assert_eq!(out.allocation.path(0).display(inst.network()).to_string(), "s>t");
    }

    #[test]
    fn lower_bound_is_admissible() {
        let inst = bottleneck();
        assert_eq!(opt_lower_bound(&inst).unwrap(), 2.0);
    }

    #[test]
    fn overloaded_instance_is_infeasible() {
        let inst = bottleneck();
        let mut agents = inst.agents().to_vec();
        agents.push(AgentProfile::truthful("3", NodeId(0), NodeId(2)));
        let inst = Instance::new(inst.shared_network(), agents).unwrap();
        assert!(matches!(
            optimal_allocation(&inst, OptimalConfig::default()),
            Err(TapError::NoFeasibleAssignment)
        ));
    }

    #[test]
    fn tiny_budget_is_reported() {
        let inst = bottleneck();
        let cfg = OptimalConfig { node_budget: 1, path_cap: 64 };
        assert!(matches!(optimal_allocation(&inst, cfg), Err(TapError::BudgetExhausted(1))));
    }
}
