use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AgentOrder, Allocation, Mechanism};
use crate::error::{Result, TapError};
use crate::instance::Instance;
use crate::network::{min_cost_path, EdgeId, Path, Residual};

/// Outcome of a serial run together with the residual capacities seen by
/// each stage: `residuals[k]` is the network left after the first `k` picks.
#[derive(Clone, Debug)]
pub struct SerialTrace {
    pub allocation: Allocation,
    pub residuals: Vec<Residual>,
}

pub(crate) fn serial_paths(
    instance: &Instance,
    order: &AgentOrder,
    mut on_stage: impl FnMut(&Residual),
) -> Result<Vec<Path>> {
    let net = instance.network();
    if order.len() != instance.agent_count() {
        return Err(TapError::InvalidArgument(format!(
            "ordering has {} entries for {} agents",
            order.len(),
            instance.agent_count()
        )));
    }
    let mut residual = Residual::full(net);
    let mut paths: Vec<Option<Path>> = vec![None; instance.agent_count()];
    for (stage, &i) in order.as_slice().iter().enumerate() {
        on_stage(&residual);
        let a = instance.agent(i);
        let p = min_cost_path(net, &residual, a.origin, a.declared)
            .ok_or_else(|| TapError::Infeasible { stage: stage + 1, agent: a.id.clone() })?;
        residual.consume(&p)?;
        paths[i] = Some(p);
    }
    on_stage(&residual);
    Ok(paths.into_iter().map(|p| p.expect("every agent picks once")).collect())
}

/// SD: agents pick, in order, a minimum-cost path to their declared
/// destination in the residual network left by their predecessors.
pub fn serial_dictatorship(instance: &Instance, order: &AgentOrder) -> Result<Allocation> {
    let paths = serial_paths(instance, order, |_| {})?;
    Ok(Allocation::new(instance, paths)?.with_order(order.clone()))
}

/// SD keeping the residual network before every stage.
pub fn serial_dictatorship_traced(instance: &Instance, order: &AgentOrder) -> Result<SerialTrace> {
    let mut residuals = Vec::with_capacity(order.len() + 1);
    let paths = serial_paths(instance, order, |r| residuals.push(r.clone()))?;
    let allocation = Allocation::new(instance, paths)?.with_order(order.clone());
    Ok(SerialTrace { allocation, residuals })
}

/// A uniformly random permutation of `n` agents.
pub fn uniform_order(n: usize, rng: &mut impl rand::Rng) -> AgentOrder {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    AgentOrder(order)
}

/// RSD: SD under an ordering drawn uniformly from a ChaCha8 stream seeded
/// with `seed`. The ordering is recorded on the allocation.
pub fn random_serial_dictatorship(instance: &Instance, seed: u64) -> Result<Allocation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = uniform_order(instance.agent_count(), &mut rng);
    serial_dictatorship(instance, &order)
}

/// Edge partition `{X_1, X_2}`; stored as membership in `X_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    in_x2: Vec<bool>,
}

impl Bipartition {
    pub fn new(edge_count: usize, x2: impl IntoIterator<Item = EdgeId>) -> Result<Self> {
        let mut in_x2 = vec![false; edge_count];
        for e in x2 {
            *in_x2
                .get_mut(e.index())
                .ok_or_else(|| TapError::InvalidArgument(format!("edge {} outside the network", e.0)))? =
                true;
        }
        Ok(Self { in_x2 })
    }

    pub fn from_mask(in_x2: Vec<bool>) -> Self {
        Self { in_x2 }
    }

    pub fn in_x2(&self, e: EdgeId) -> bool {
        self.in_x2[e.index()]
    }

    pub fn x1(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges(false)
    }

    pub fn x2(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges(true)
    }

    fn edges(&self, side: bool) -> impl Iterator<Item = EdgeId> + '_ {
        self.in_x2.iter().enumerate().filter(move |(_, &b)| b == side).map(|(i, _)| EdgeId(i as u32))
    }
}

/// How the two poles' best alternatives are compared.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SwapRule {
    /// Both poles have the same minimum path and every edge of it is in `X_2`.
    #[default]
    Path,
    /// The poles' minimum paths share at least one edge of `X_2`.
    Edge,
}

/// Whether BSD puts the second pole first.
pub fn bsd_swaps(
    instance: &Instance,
    poles: (usize, usize),
    bipartition: &Bipartition,
    rule: SwapRule,
) -> bool {
    let net = instance.network();
    let full = Residual::full(net);
    let best = |i: usize| {
        let a = instance.agent(i);
        min_cost_path(net, &full, a.origin, a.declared)
    };
    let (Some(p1), Some(p2)) = (best(poles.0), best(poles.1)) else {
        return false;
    };
    match rule {
        SwapRule::Path => p1 == p2 && p1.edges().iter().all(|&e| bipartition.in_x2(e)),
        SwapRule::Edge => p1.edges().iter().any(|&e| p2.uses(e) && bipartition.in_x2(e)),
    }
}

/// BSD: the first two agents of `order` are the poles `i_1 ≺ i_2`. When the
/// swap condition holds SD runs with `i_2` first, otherwise with `order`.
pub fn bipolar_serial_dictatorship(
    instance: &Instance,
    order: &AgentOrder,
    bipartition: &Bipartition,
    rule: SwapRule,
) -> Result<Allocation> {
    if order.len() < 2 {
        return serial_dictatorship(instance, order);
    }
    if bipartition.in_x2.len() != instance.network().edge_count() {
        return Err(TapError::InvalidArgument("bipartition does not cover every edge".into()));
    }
    let o = order.as_slice();
    if bsd_swaps(instance, (o[0], o[1]), bipartition, rule) {
        let mut swapped = o.to_vec();
        swapped.swap(0, 1);
        serial_dictatorship(instance, &AgentOrder(swapped))
    } else {
        serial_dictatorship(instance, order)
    }
}

/// SD as a [`Mechanism`]; natural agent order when none is given.
#[derive(Clone, Debug, Default)]
pub struct SerialDictatorship {
    pub order: Option<AgentOrder>,
}

impl Mechanism for SerialDictatorship {
    fn allocate(&self, instance: &Instance) -> Result<Allocation> {
        match &self.order {
            Some(o) => serial_dictatorship(instance, o),
            None => serial_dictatorship(instance, &AgentOrder::natural(instance.agent_count())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BipolarSerialDictatorship {
    pub order: Option<AgentOrder>,
    pub bipartition: Bipartition,
    pub rule: SwapRule,
}

impl Mechanism for BipolarSerialDictatorship {
    fn allocate(&self, instance: &Instance) -> Result<Allocation> {
        let natural;
        let order = match &self.order {
            Some(o) => o,
            None => {
                natural = AgentOrder::natural(instance.agent_count());
                &natural
            }
        };
        bipolar_serial_dictatorship(instance, order, &self.bipartition, self.rule)
    }
}
