//! Deviation on capacious paths.
//!
//! When SD hands agent `a_i` something other than their path in the reference
//! optimum `P*`, some earlier agent `a_j` (who also deviated from `P*_j`)
//! filled an edge of `P*_i`. The alternative path `Γ_i^j` follows `P*_i` up
//! to `α` (first node of `P*_i` on `P_j`), walks `P_j` backwards to `O_j`,
//! follows `P*_j` to `D_j`, walks `P_j` backwards to `β` (last node of
//! `P*_i` on `P_j`), and finishes along `P*_i`. The condition asks that
//! every edge of `Γ_i^j` still has room for all agents after `a_j`.

use crate::error::Result;
use crate::instance::Instance;
use crate::mechanisms::{
    optimal_allocation, serial_dictatorship_traced, AgentOrder, Allocation, OptimalConfig, SerialTrace,
};
use crate::network::{EdgeId, NodeId, Path, RoadNetwork};

#[derive(Clone, Debug, PartialEq)]
pub struct DocpWitness {
    pub blocked: usize,
    /// `None` when no earlier deviating agent explains the blocking.
    pub blocker: Option<usize>,
    pub alpha: Option<NodeId>,
    pub beta: Option<NodeId>,
    /// Edge sequence of `Γ_i^j`; `None` if a reversed edge is missing.
    pub gamma: Option<Vec<EdgeId>>,
    /// Smallest residual capacity along `Γ_i^j` after `a_j`'s stage.
    pub min_residual: Option<u32>,
    /// Agents still to be served after `a_j`.
    pub required: u32,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct DocpReport {
    pub holds: bool,
    /// False when the reference optimum is not certified.
    pub certified: bool,
    pub witnesses: Vec<DocpWitness>,
}

/// Runs SD with `order`, computes the reference optimum, and checks the
/// condition for every blocked agent.
pub fn check_docp(instance: &Instance, order: &AgentOrder, config: OptimalConfig) -> Result<DocpReport> {
    let trace = serial_dictatorship_traced(instance, order)?;
    let opt = optimal_allocation(instance, config)?;
    let mut report = check_docp_with(instance, &trace, &opt.allocation);
    report.certified = opt.certified;
    Ok(report)
}

/// The condition against a given SD trace and reference allocation.
pub fn check_docp_with(instance: &Instance, trace: &SerialTrace, reference: &Allocation) -> DocpReport {
    let net = instance.network();
    let sd = &trace.allocation;
    let order = sd.order().cloned().unwrap_or_else(|| AgentOrder::natural(instance.agent_count()));
    let pos = order.positions();
    let n = instance.agent_count();
    let deviates = |k: usize| sd.path(k) != reference.path(k);
    let mut witnesses = Vec::new();
    for i in 0..n {
        let star_i = reference.path(i);
        if !deviates(i) || trace.residuals[pos[i]].admits(star_i) {
            continue;
        }
        let star_nodes = star_i.nodes(net);
        let blockers: Vec<usize> = order.as_slice()[..pos[i]]
            .iter()
            .copied()
            .filter(|&j| {
                deviates(j)
                    && shares_node(&star_nodes, &sd.path(j).nodes(net))
                    && star_i.edges().iter().any(|&e| trace.residuals[pos[j] + 1].is_saturated(e))
            })
            .collect();
        if blockers.is_empty() {
            witnesses.push(DocpWitness {
                blocked: i,
                blocker: None,
                alpha: None,
                beta: None,
                gamma: None,
                min_residual: None,
                required: 0,
                holds: false,
            });
            continue;
        }
        for j in blockers {
            let required = (n - pos[j] - 1) as u32;
            let residual = &trace.residuals[pos[j] + 1];
            let (alpha, beta, gamma) = alternative_path(net, star_i, sd.path(j), reference.path(j));
            let min_residual =
                gamma.as_ref().map(|g| g.iter().map(|&e| residual.remaining(e)).min().unwrap_or(u32::MAX));
            let holds = min_residual.is_some_and(|m| m >= required);
            witnesses.push(DocpWitness {
                blocked: i,
                blocker: Some(j),
                alpha: Some(alpha),
                beta: Some(beta),
                gamma,
                min_residual,
                required,
                holds,
            });
        }
    }
    DocpReport { holds: witnesses.iter().all(|w| w.holds), certified: true, witnesses }
}

fn shares_node(a: &[NodeId], b: &[NodeId]) -> bool {
    a.iter().any(|v| b.contains(v))
}

/// `(α, β, Γ)`; `Γ` is `None` when some edge of `P_j` has no reverse.
fn alternative_path(
    net: &RoadNetwork,
    star_i: &Path,
    p_j: &Path,
    star_j: &Path,
) -> (NodeId, NodeId, Option<Vec<EdgeId>>) {
    let si = star_i.nodes(net);
    let pj = p_j.nodes(net);
    let a_idx = si.iter().position(|v| pj.contains(v)).expect("paths share a node");
    let b_idx = si.iter().rposition(|v| pj.contains(v)).expect("paths share a node");
    let (alpha, beta) = (si[a_idx], si[b_idx]);
    let alpha_on_j = pj.iter().position(|&v| v == alpha).expect("on P_j");
    let beta_on_j = pj.iter().position(|&v| v == beta).expect("on P_j");
    let reversed = |edges: &[EdgeId]| -> Option<Vec<EdgeId>> {
        edges.iter().rev().map(|&e| net.find_edge(net.edge(e).head, net.edge(e).tail)).collect()
    };
    let mut gamma = star_i.edges()[..a_idx].to_vec();
    let back_to_origin = reversed(&p_j.edges()[..alpha_on_j]);
    let back_to_beta = reversed(&p_j.edges()[beta_on_j..]);
    let gamma = match (back_to_origin, back_to_beta) {
        (Some(x), Some(y)) => {
            gamma.extend(x);
            gamma.extend_from_slice(star_j.edges());
            gamma.extend(y);
            gamma.extend_from_slice(&star_i.edges()[b_idx..]);
            Some(gamma)
        }
        _ => None,
    };
    (alpha, beta, gamma)
}
