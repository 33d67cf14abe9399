use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::Result;
use crate::instance::Instance;
use crate::mechanisms::{fmt_cost, Mechanism};
use crate::network::{weight_lt, NodeId};

/// A profitable misreport: reporting `report` instead of their true
/// destination lowers the agent's cost (measured towards the true
/// destination) by `gain`.
#[derive(Clone, Debug, PartialEq)]
pub struct ManipulationReport {
    pub agent: usize,
    pub agent_id: String,
    pub report: NodeId,
    pub truthful_cost: f64,
    pub manipulated_cost: f64,
    pub gain: f64,
}

/// Runs `mechanism` with `agent` reporting truthfully and then once per
/// candidate report; returns the most profitable strict manipulation.
/// Reports under which the mechanism fails are skipped.
pub fn find_manipulation<M: Mechanism + ?Sized>(
    instance: &Instance,
    mechanism: &M,
    agent: usize,
    reports: &[NodeId],
) -> Result<Option<ManipulationReport>> {
    let a = instance.agent(agent);
    let truthful = instance.with_declared(agent, a.destination);
    let truthful_cost = mechanism.allocate(&truthful)?.cost(agent);
    let mut best: Option<ManipulationReport> = None;
    for &r in reports {
        if r == a.destination {
            continue;
        }
        let alloc = match mechanism.allocate(&instance.with_declared(agent, r)) {
            Ok(alloc) => alloc,
            Err(e) => {
                log::debug!("agent `{}` reporting node {}: {e}", a.id, r.0);
                continue;
            }
        };
        let cost = alloc.cost(agent);
        if !weight_lt(cost, truthful_cost) {
            continue;
        }
        let gain = truthful_cost - cost;
        if best.as_ref().is_none_or(|b| gain > b.gain) {
            best = Some(ManipulationReport {
                agent,
                agent_id: a.id.clone(),
                report: r,
                truthful_cost,
                manipulated_cost: cost,
                gain,
            });
        }
    }
    Ok(best)
}

/// [`find_manipulation`] for every agent over `reports` (all nodes when
/// `None`), agents audited in parallel.
pub fn manipulation_sweep<M: Mechanism + Sync + ?Sized>(
    instance: &Instance,
    mechanism: &M,
    reports: Option<&[NodeId]>,
) -> Result<Vec<ManipulationReport>> {
    let all: Vec<NodeId> = instance.network().nodes().collect();
    let reports = reports.unwrap_or(&all);
    let found = (0..instance.agent_count())
        .into_par_iter()
        .map(|i| find_manipulation(instance, mechanism, i, reports))
        .collect::<Result<Vec<_>>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// True iff no alternative report that leaves `agent`'s path unchanged
/// changes anybody else's path.
pub fn check_non_bossy<M: Mechanism + ?Sized>(
    instance: &Instance,
    mechanism: &M,
    agent: usize,
    reports: &[NodeId],
) -> Result<bool> {
    let base = mechanism.allocate(instance)?;
    for &r in reports {
        if r == instance.agent(agent).declared {
            continue;
        }
        let Ok(alt) = mechanism.allocate(&instance.with_declared(agent, r)) else {
            continue;
        };
        if alt.path(agent) == base.path(agent) && alt.paths() != base.paths() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn manipulation_text(instance: &Instance, reports: &[ManipulationReport]) -> String {
    let net = instance.network();
    if reports.is_empty() {
        return "no profitable manipulation\n".into();
    }
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(
            out,
            "manipulation agent {} reports {} truthful {} manipulated {} gain {}",
            r.agent_id,
            net.name(r.report),
            fmt_cost(r.truthful_cost),
            fmt_cost(r.manipulated_cost),
            fmt_cost(r.gain)
        );
    }
    out
}

pub fn manipulation_csv(instance: &Instance, reports: &[ManipulationReport]) -> String {
    let net = instance.network();
    let mut out = String::from("agent,report,truthful_cost,manipulated_cost,gain\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.agent_id,
            net.name(r.report),
            fmt_cost(r.truthful_cost),
            fmt_cost(r.manipulated_cost),
            fmt_cost(r.gain)
        );
    }
    out
}
