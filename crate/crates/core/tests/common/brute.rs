//! Slow reference implementations: every simple path, every combination.

use tapmech::network::{EdgeId, NodeId};
use tapmech::{Instance, RoadNetwork};

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct RawPath {
    pub edges: Vec<EdgeId>,
    pub weight: f64,
}

pub fn simple_paths(net: &RoadNetwork, from: NodeId, to: NodeId) -> Vec<RawPath> {
    fn go(
        net: &RoadNetwork,
        at: NodeId,
        to: NodeId,
        seen: &mut Vec<bool>,
        stack: &mut Vec<EdgeId>,
        out: &mut Vec<RawPath>,
    ) {
        if at == to {
            let weight = stack.iter().map(|&e| net.edge(e).weight).sum();
            out.push(RawPath { edges: stack.clone(), weight });
            return;
        }
        for &e in net.outgoing(at) {
            let h = net.edge(e).head;
            if seen[h.index()] {
                continue;
            }
            seen[h.index()] = true;
            stack.push(e);
            go(net, h, to, seen, stack, out);
            stack.pop();
            seen[h.index()] = false;
        }
    }
    let mut seen = vec![false; net.node_count()];
    seen[from.index()] = true;
    let mut out = Vec::new();
    go(net, from, to, &mut seen, &mut Vec::new(), &mut out);
    out
}

fn fits(p: &RawPath, remaining: &[i64]) -> bool {
    p.edges.iter().all(|e| remaining[e.index()] >= 1)
}

fn take(p: &RawPath, remaining: &mut [i64], delta: i64) {
    for e in &p.edges {
        remaining[e.index()] -= delta;
    }
}

/// Preference order among equally eligible paths: weight, hops, edge ids.
fn better(a: &RawPath, b: &RawPath) -> bool {
    if (a.weight - b.weight).abs() > TOL * a.weight.abs().max(b.weight.abs()).max(1.0) {
        return a.weight < b.weight;
    }
    (a.edges.len(), &a.edges) < (b.edges.len(), &b.edges)
}

fn cheapest<'a>(paths: &'a [RawPath], remaining: &[i64]) -> Option<&'a RawPath> {
    let mut best: Option<&RawPath> = None;
    for p in paths.iter().filter(|p| fits(p, remaining)) {
        if best.is_none_or(|b| better(p, b)) {
            best = Some(p);
        }
    }
    best
}

fn capacities(net: &RoadNetwork) -> Vec<i64> {
    net.edges().iter().map(|e| e.capacity as i64).collect()
}

/// Serial dictatorship on declared destinations; `None` when some agent is
/// stuck.
pub fn serial(inst: &Instance, order: &[usize]) -> Option<Vec<RawPath>> {
    let net = inst.network();
    let mut remaining = capacities(net);
    let mut chosen: Vec<Option<RawPath>> = vec![None; inst.agent_count()];
    for &i in order {
        let a = inst.agent(i);
        let paths = simple_paths(net, a.origin, a.declared);
        let p = cheapest(&paths, &remaining)?.clone();
        take(&p, &mut remaining, 1);
        chosen[i] = Some(p);
    }
    Some(chosen.into_iter().map(Option::unwrap).collect())
}

/// Cheapest path to each agent's true destination given everyone else's
/// assigned flow.
pub fn reaction_costs(inst: &Instance, assigned: &[RawPath]) -> Vec<f64> {
    let net = inst.network();
    let mut remaining = capacities(net);
    for p in assigned {
        take(p, &mut remaining, 1);
    }
    (0..inst.agent_count())
        .map(|i| {
            take(&assigned[i], &mut remaining, -1);
            let a = inst.agent(i);
            let paths = simple_paths(net, a.origin, a.destination);
            let c = cheapest(&paths, &remaining).map_or(f64::INFINITY, |p| p.weight);
            take(&assigned[i], &mut remaining, 1);
            c
        })
        .collect()
}

/// Every capacity-feasible joint assignment, each agent routed towards the
/// node picked by `target`.
pub fn feasible_assignments(
    inst: &Instance,
    target: impl Fn(usize) -> NodeId,
    mut visit: impl FnMut(&[RawPath]),
) {
    let net = inst.network();
    let options: Vec<Vec<RawPath>> =
        (0..inst.agent_count()).map(|i| simple_paths(net, inst.agent(i).origin, target(i))).collect();
    fn go(
        depth: usize,
        options: &[Vec<RawPath>],
        remaining: &mut Vec<i64>,
        current: &mut Vec<RawPath>,
        visit: &mut dyn FnMut(&[RawPath]),
    ) {
        if depth == options.len() {
            visit(current);
            return;
        }
        for p in &options[depth] {
            if !fits(p, remaining) {
                continue;
            }
            take(p, remaining, 1);
            current.push(p.clone());
            go(depth + 1, options, remaining, current, visit);
            current.pop();
            take(p, remaining, -1);
        }
    }
    go(0, &options, &mut capacities(net), &mut Vec::new(), &mut visit);
}

/// Minimum total weight over all feasible assignments to declared
/// destinations, and the lexicographically smallest minimiser.
pub fn optimum(inst: &Instance) -> Option<(f64, Vec<Vec<EdgeId>>)> {
    let mut best: Option<(f64, Vec<Vec<EdgeId>>)> = None;
    feasible_assignments(
        inst,
        |i| inst.agent(i).declared,
        |paths| {
            let total: f64 = paths.iter().map(|p| p.weight).sum();
            let edges: Vec<Vec<EdgeId>> = paths.iter().map(|p| p.edges.clone()).collect();
            let replace = match &best {
                None => true,
                Some((w, e)) => {
                    if (total - w).abs() <= TOL * w.abs().max(1.0) {
                        edges < *e
                    } else {
                        total < *w
                    }
                }
            };
            if replace {
                best = Some((total, edges));
            }
        },
    );
    best
}

/// Whether some feasible assignment to true destinations gives every agent
/// a path no heavier than `costs`, one strictly lighter.
pub fn is_dominated(inst: &Instance, costs: &[f64]) -> bool {
    let mut dominated = false;
    feasible_assignments(
        inst,
        |i| inst.agent(i).destination,
        |paths| {
            let weakly = paths.iter().zip(costs).all(|(p, &c)| p.weight <= c + TOL);
            let strictly = paths.iter().zip(costs).any(|(p, &c)| p.weight < c - TOL);
            dominated |= weakly && strictly;
        },
    );
    dominated
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

/// Average social cost of serial dictatorship over all `n!` orders; `None`
/// if some order gets stuck.
pub fn rsd_expectation(inst: &Instance) -> Option<f64> {
    let perms = permutations(inst.agent_count());
    let mut total = 0.0;
    for order in &perms {
        let paths = serial(inst, order)?;
        total += reaction_costs(inst, &paths).iter().sum::<f64>();
    }
    Some(total / perms.len() as f64)
}
