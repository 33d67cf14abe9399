use crate::error::Result;
use crate::instance::Instance;
use crate::mechanisms::Allocation;
use crate::network::{k_shortest_paths, weight_eq, weight_lt, Path, Residual};

#[derive(Clone, Copy, Debug)]
pub struct ParetoConfig {
    pub node_budget: u64,
    pub path_cap: usize,
}

impl Default for ParetoConfig {
    fn default() -> Self {
        Self { node_budget: 1_000_000, path_cap: 64 }
    }
}

#[derive(Clone, Debug)]
pub struct ParetoVerdict {
    pub pareto_optimal: bool,
    /// False when the search was cut short; a `false` verdict with a
    /// dominating assignment is always certain.
    pub certified: bool,
    /// A feasible assignment (paths to the true destinations) that is at
    /// least as cheap for everyone and strictly cheaper for someone.
    pub dominating: Option<Vec<Path>>,
}

struct Search<'a> {
    instance: &'a Instance,
    bounds: &'a [f64],
    config: ParetoConfig,
    current: Vec<Option<Path>>,
    nodes: u64,
    cut: bool,
}

impl Search<'_> {
    fn dfs(&mut self, agent: usize, strict: bool, residual: &mut Residual) -> Option<Vec<Path>> {
        if self.nodes >= self.config.node_budget {
            self.cut = true;
            return None;
        }
        self.nodes += 1;
        let n = self.instance.agent_count();
        if agent == n {
            return strict.then(|| self.current.iter().map(|p| p.clone().expect("set")).collect());
        }
        let a = self.instance.agent(agent);
        let bound = self.bounds[agent];
        let net = self.instance.network();
        for (taken, p) in k_shortest_paths(net, residual, a.origin, a.destination).enumerate() {
            if p.weight() > bound && !weight_eq(p.weight(), bound) {
                break;
            }
            if taken == self.config.path_cap {
                self.cut = true;
                break;
            }
            let improves = weight_lt(p.weight(), bound);
            if residual.consume(&p).is_err() {
                continue;
            }
            self.current[agent] = Some(p);
            let found = self.dfs(agent + 1, strict || improves, residual);
            let p = self.current[agent].take().expect("set");
            residual.release(&p);
            if found.is_some() || self.cut {
                return found;
            }
        }
        None
    }
}

/// Searches for a feasible assignment in which every agent travels a path
/// to their true destination no heavier than their current cost, and someone's
/// is strictly lighter.
pub fn check_pareto_exhaustive(
    instance: &Instance,
    allocation: &Allocation,
    config: ParetoConfig,
) -> Result<ParetoVerdict> {
    let net = instance.network();
    let bounds = allocation.costs();
    let mut search = Search {
        instance,
        bounds,
        config,
        current: vec![None; instance.agent_count()],
        nodes: 0,
        cut: false,
    };
    let mut residual = Residual::full(net);
    let dominating = search.dfs(0, false, &mut residual);
    Ok(ParetoVerdict {
        pareto_optimal: dominating.is_none(),
        certified: dominating.is_some() || !search.cut,
        dominating,
    })
}
