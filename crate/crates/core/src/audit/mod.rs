//! Empirical checks of incentive and efficiency properties on concrete
//! instances: manipulations, Pareto optimality, non-bossiness, the
//! best-reaction condition, and the deviation-on-capacious-path condition.

mod docp;
mod manipulation;
mod pareto;

use crate::error::{Result, TapError};
use crate::instance::Instance;
use crate::mechanisms::{reaction_path, Allocation};
use crate::network::{weight_eq, Path};

pub use docp::{check_docp, check_docp_with, DocpReport, DocpWitness};
pub use manipulation::{
    check_non_bossy, find_manipulation, manipulation_csv, manipulation_sweep, manipulation_text,
    ManipulationReport,
};
pub use pareto::{check_pareto_exhaustive, ParetoConfig, ParetoVerdict};

/// Cheapest path from the agent's origin to their true destination using
/// capacity the other agents leave free.
pub fn best_reaction(instance: &Instance, allocation: &Allocation, agent: usize) -> Result<Path> {
    reaction_path(instance, allocation.paths(), allocation.flow(), agent)?
        .ok_or_else(|| TapError::EmptyReactionSet(instance.agent(agent).id.clone()))
}

/// Per agent: is the assigned path a cheapest element of their reaction set?
pub fn check_theorem1(instance: &Instance, allocation: &Allocation) -> Vec<bool> {
    debug_assert_eq!(instance.agent_count(), allocation.paths().len());
    allocation
        .paths()
        .iter()
        .zip(allocation.costs())
        .map(|(p, &c)| c.is_finite() && weight_eq(p.weight(), c))
        .collect()
}
