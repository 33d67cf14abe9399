//! Allocation mechanisms and social-cost accounting.
//!
//! An agent's cost is the weight of their best reaction: the cheapest path to
//! their true destination among those with spare capacity once every other
//! agent's assigned path is in place. Social cost sums these costs.

mod expectation;
mod optimal;
mod serial;

use std::fmt::Write as _;

use crate::error::{Result, TapError};
use crate::instance::Instance;
use crate::network::{min_cost_path, residual, FlowState, Path, RoadNetwork};

pub use expectation::{
    distinct_type_orders, rsd_expected_cost, RsdExpectation, RsdMode, EXACT_ORDERING_LIMIT,
};
pub use optimal::{opt_lower_bound, optimal_allocation, OptimalConfig, OptimalMechanism, OptimalOutcome};
pub use serial::{
    bipolar_serial_dictatorship, bsd_swaps, random_serial_dictatorship, serial_dictatorship,
    serial_dictatorship_traced, uniform_order, Bipartition, BipolarSerialDictatorship, SerialDictatorship,
    SerialTrace, SwapRule,
};

/// A permutation of agent indices; position 0 picks first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AgentOrder(Vec<usize>);

impl AgentOrder {
    pub fn new(order: Vec<usize>, agents: usize) -> Result<Self> {
        let mut seen = vec![false; agents];
        if order.len() != agents {
            return Err(TapError::InvalidArgument(format!(
                "ordering has {} entries for {agents} agents",
                order.len()
            )));
        }
        for &a in &order {
            if a >= agents || std::mem::replace(&mut seen[a], true) {
                return Err(TapError::InvalidArgument(format!("ordering is not a permutation (entry {a})")));
            }
        }
        Ok(Self(order))
    }

    pub fn natural(agents: usize) -> Self {
        Self((0..agents).collect())
    }

    /// Parses agent ids (as in the instance file) in priority order.
    pub fn from_ids<S: AsRef<str>>(instance: &Instance, ids: &[S]) -> Result<Self> {
        let order = ids.iter().map(|id| instance.agent_index(id.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::new(order, instance.agent_count())
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Stage (0-based) at which each agent picks.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (stage, &a) in self.0.iter().enumerate() {
            pos[a] = stage;
        }
        pos
    }

    pub fn ids(&self, instance: &Instance) -> Vec<String> {
        self.0.iter().map(|&a| instance.agent(a).id.clone()).collect()
    }
}

/// Best reaction of `agent` to the other agents' paths: the cheapest path to
/// their true destination over `c(e) - f^{-i}(e)`.
pub(crate) fn reaction_path(
    instance: &Instance,
    paths: &[Path],
    flow: &FlowState,
    agent: usize,
) -> Result<Option<Path>> {
    let net = instance.network();
    let a = instance.agent(agent);
    let r = residual(net, flow, Some(&paths[agent]))?;
    Ok(min_cost_path(net, &r, a.origin, a.destination))
}

/// A joint path assignment with its induced flow and per-agent costs.
#[derive(Clone, Debug)]
pub struct Allocation {
    paths: Vec<Path>,
    flow: FlowState,
    costs: Vec<f64>,
    social_cost: f64,
    order: Option<AgentOrder>,
}

impl Allocation {
    /// Checks endpoints (origin to declared destination) and joint
    /// feasibility, then recomputes every agent's reaction cost. An agent
    /// with an empty reaction set gets cost `+inf`.
    pub fn new(instance: &Instance, paths: Vec<Path>) -> Result<Self> {
        let net = instance.network();
        if paths.len() != instance.agent_count() {
            return Err(TapError::InvalidArgument(format!(
                "{} paths for {} agents",
                paths.len(),
                instance.agent_count()
            )));
        }
        for (a, p) in instance.agents().iter().zip(&paths) {
            if p.origin() != a.origin || p.destination(net) != a.declared {
                return Err(TapError::InvalidArgument(format!(
                    "path of agent `{}` does not join their origin to their declared destination",
                    a.id
                )));
            }
        }
        let flow = FlowState::from_paths(net, &paths);
        if let Some((i, (e, &f))) =
            net.edges().iter().zip(flow.counts()).enumerate().find(|(_, (e, &f))| f > e.capacity)
        {
            return Err(TapError::OverCapacity { edge: i, used: f, capacity: e.capacity });
        }
        let costs = (0..paths.len())
            .map(|i| {
                reaction_path(instance, &paths, &flow, i).map(|p| p.map_or(f64::INFINITY, |p| p.weight()))
            })
            .collect::<Result<Vec<_>>>()?;
        let social_cost = costs.iter().sum();
        Ok(Self { paths, flow, costs, social_cost, order: None })
    }

    pub fn with_order(mut self, order: AgentOrder) -> Self {
        self.order = Some(order);
        self
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn path(&self, agent: usize) -> &Path {
        &self.paths[agent]
    }

    pub fn flow(&self) -> &FlowState {
        &self.flow
    }

    /// Per-agent reaction costs `cost_i`.
    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn cost(&self, agent: usize) -> f64 {
        self.costs[agent]
    }

    pub fn social_cost(&self) -> f64 {
        self.social_cost
    }

    /// Sum of assigned path weights (an upper bound on the social cost).
    pub fn assigned_weight(&self) -> f64 {
        self.paths.iter().map(Path::weight).sum()
    }

    /// The ordering a serial mechanism used, when there was one.
    pub fn order(&self) -> Option<&AgentOrder> {
        self.order.as_ref()
    }

    pub fn to_text(&self, instance: &Instance) -> String {
        let net = instance.network();
        let mut out = String::new();
        if let Some(order) = &self.order {
            let _ = writeln!(out, "order {}", order.ids(instance).join(","));
        }
        for (a, (p, c)) in instance.agents().iter().zip(self.paths.iter().zip(&self.costs)) {
            let _ = writeln!(out, "assign {} {} {}", a.id, p.display(net), fmt_cost(*c));
        }
        let _ = writeln!(out, "sc {}", fmt_cost(self.social_cost));
        out
    }

    /// Reads `assign` lines back; costs are recomputed, not trusted.
    pub fn parse(text: &str, instance: &Instance) -> Result<Self> {
        let net = instance.network();
        let mut paths: Vec<Option<Path>> = vec![None; instance.agent_count()];
        let mut order = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| TapError::Parse { line: i + 1, message };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                ["assign", agent, edges, _cost] => {
                    let idx = instance.agent_index(agent).map_err(|e| err(e.to_string()))?;
                    let origin = instance.agent(idx).origin;
                    let path = parse_path(net, origin, edges).map_err(|e| err(e.to_string()))?;
                    paths[idx] = Some(path);
                }
                ["order", ids] => {
                    let ids: Vec<&str> = ids.split(',').collect();
                    order = Some(AgentOrder::from_ids(instance, &ids).map_err(|e| err(e.to_string()))?);
                }
                ["sc", _] => {}
                _ => return Err(err(format!("unrecognised allocation line `{line}`"))),
            }
        }
        let paths = paths
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| {
                    TapError::InvalidArgument(format!("no assignment for agent `{}`", instance.agent(i).id))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let alloc = Self::new(instance, paths)?;
        Ok(match order {
            Some(o) => alloc.with_order(o),
            None => alloc,
        })
    }
}

fn parse_path(net: &RoadNetwork, origin: crate::network::NodeId, text: &str) -> Result<Path> {
    if text == "-" {
        return Ok(Path::empty(origin));
    }
    let edges = text
        .split(',')
        .map(|pair| {
            let (t, h) = pair
                .split_once('>')
                .ok_or_else(|| TapError::InvalidArgument(format!("bad edge `{pair}`")))?;
            let (t, h) = (net.require_node(t)?, net.require_node(h)?);
            net.find_edge(t, h).ok_or_else(|| TapError::InvalidArgument(format!("no edge `{pair}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Path::from_edges(net, origin, edges)
}

/// Social cost of a set of assigned paths: the sum of best-reaction costs.
/// Errors if some agent has no feasible reaction.
pub fn social_cost(instance: &Instance, paths: &[Path]) -> Result<f64> {
    let alloc = Allocation::new(instance, paths.to_vec())?;
    if let Some(i) = alloc.costs().iter().position(|c| c.is_infinite()) {
        return Err(TapError::EmptyReactionSet(instance.agent(i).id.clone()));
    }
    Ok(alloc.social_cost())
}

/// Something that maps declared destinations to a joint assignment.
pub trait Mechanism {
    fn allocate(&self, instance: &Instance) -> Result<Allocation>;
}

impl<F> Mechanism for F
where
    F: Fn(&Instance) -> Result<Allocation>,
{
    fn allocate(&self, instance: &Instance) -> Result<Allocation> {
        self(instance)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceKind {
    Exact,
    /// Best assignment found when the search was cut short.
    UncertifiedOptimum,
    LowerBoundProxy,
}

impl ReferenceKind {
    pub fn parse(label: &str) -> Option<Self> {
        match label {
            "exact" => Some(ReferenceKind::Exact),
            "uncertified" => Some(ReferenceKind::UncertifiedOptimum),
            "proxy" => Some(ReferenceKind::LowerBoundProxy),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ReferenceKind::Exact => "exact",
            ReferenceKind::UncertifiedOptimum => "uncertified",
            ReferenceKind::LowerBoundProxy => "proxy",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxReport {
    pub mechanism_cost: f64,
    pub reference_cost: f64,
    pub reference: ReferenceKind,
    pub ratio: f64,
}

impl ApproxReport {
    pub fn new(mechanism_cost: f64, reference_cost: f64, reference: ReferenceKind) -> Self {
        Self { mechanism_cost, reference_cost, reference, ratio: ratio(mechanism_cost, reference_cost) }
    }
}

/// `num / den`, with `0 / 0 = 1`.
pub fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// Costs printed to nine decimals with trailing zeros trimmed.
pub fn fmt_cost(c: f64) -> String {
    if !c.is_finite() {
        return if c > 0.0 { "inf".into() } else { c.to_string() };
    }
    let s = format!("{c:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}
