use crate::error::{Result, TapError};
use crate::instance::{AgentProfile, Instance};
use crate::network::{NetworkBuilder, RoadNetwork};

/// `K = min{2, (10 - 4ε)/ε}`, read literally.
pub fn fig1_k_from_epsilon(epsilon: f64) -> f64 {
    (10.0 - 4.0 * epsilon) / epsilon
}

/// Seven-node lower-bound network with two agents at `A` heading to `D`
/// (agent `1`) and `G` (agent `2`). The only unit-capacity edge is `A→F`;
/// `B→C` weighs `K` and `F↔E` weighs `K−1`, everything else weighs 1.
pub fn gen_fig1(k: f64) -> Result<Instance> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(TapError::InvalidArgument(format!("K must be at least 1, got {k}")));
    }
    let net = fig1_network(k)?;
    let node = |n: &str| net.node(n).expect("fig1 node");
    let agents = vec![
        AgentProfile::truthful("1", node("A"), node("D")),
        AgentProfile::truthful("2", node("A"), node("G")),
    ];
    Instance::new(net, agents)
}

/// [`gen_fig1`] with `K = min{2, (10 - 4ε)/ε}`.
pub fn gen_fig1_eps(epsilon: f64) -> Result<Instance> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(TapError::InvalidArgument("epsilon must be positive".into()));
    }
    gen_fig1(fig1_k_from_epsilon(epsilon).min(2.0))
}

fn fig1_network(k: f64) -> Result<RoadNetwork> {
    let mut b = NetworkBuilder::new();
    for n in ["A", "B", "C", "D", "E", "F", "G"] {
        b.add_node(n)?;
    }
    for (t, h, c, w) in [
        ("A", "B", 2, 1.0),
        ("B", "C", 2, k),
        ("C", "D", 2, 1.0),
        ("C", "E", 2, 1.0),
        ("A", "F", 1, 1.0),
        ("F", "E", 2, k - 1.0),
        ("E", "F", 2, k - 1.0),
        ("E", "D", 2, 1.0),
        ("E", "G", 2, 1.0),
    ] {
        b.add_edge_named(t, h, c, w, 0)?;
    }
    b.build()
}

/// Weighted instances of the randomized lower bound: the [`gen_fig1`]
/// instance with `K = 2` (probability 2/3) and the same network where agent
/// `1` truly wants `F` (probability 1/3).
pub fn gen_yao_distribution() -> Result<Vec<(f64, Instance)>> {
    let base = gen_fig1(2.0)?;
    let f = base.network().require_node("F")?;
    let mut agents = base.agents().to_vec();
    agents[0].destination = f;
    agents[0].declared = f;
    let variant = Instance::new(base.shared_network(), agents)?;
    Ok(vec![(2.0 / 3.0, base), (1.0 / 3.0, variant)])
}

/// Unit-capacity instance on which SD in natural order pays `2^n − 1` while
/// the optimum pays `1 + nε`. Agent `i` starts at `v{i}`; everyone goes to
/// `D`. Agent `i`'s detour through `v{i+1}` costs `2^{i−1}`; agent `1`'s
/// direct edge costs `1 + ε`, every other direct edge `ε`. The last agent's
/// detour runs through the extra node `u`.
pub fn gen_sd_tight(n: usize, epsilon: f64) -> Result<Instance> {
    if n < 2 {
        return Err(TapError::InvalidArgument("need at least two agents".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(TapError::InvalidArgument("epsilon must lie in (0, 1)".into()));
    }
    let sizes = vec![1; n];
    chain_network(&sizes, epsilon, |_| 1)
}

/// Agents per level: one at `v1`, `2·3^{i−2}` at level `i ≥ 2`, so the
/// first `i` levels hold `3^{i−1}` agents.
pub fn chain_level_sizes(k: usize) -> Vec<usize> {
    (1..=k).map(|i| if i == 1 { 1 } else { 2 * 3usize.pow(i as u32 - 2) }).collect()
}

/// Level of every agent of [`gen_chain`], in agent index order (1-based).
pub fn chain_agent_levels(k: usize) -> Vec<usize> {
    chain_level_sizes(k).iter().enumerate().flat_map(|(l, &s)| std::iter::repeat_n(l + 1, s)).collect()
}

/// Chain-of-levels instance with `k` levels. Edges leaving level `i` have
/// capacity equal to the number of agents on that level; weights follow
/// the [`gen_sd_tight`] pattern with `ε = 0.01`.
pub fn gen_chain(k: usize) -> Result<Instance> {
    if k < 2 {
        return Err(TapError::InvalidArgument("need at least two levels".into()));
    }
    let sizes = chain_level_sizes(k);
    if sizes.iter().sum::<usize>() > 100_000 {
        return Err(TapError::InvalidArgument(format!("k = {k} gives too many agents")));
    }
    let caps = sizes.clone();
    chain_network(&sizes, 0.01, |l| caps[l] as u32)
}

fn chain_network(sizes: &[usize], eps: f64, capacity: impl Fn(usize) -> u32) -> Result<Instance> {
    let levels = sizes.len();
    let mut b = NetworkBuilder::new();
    let v: Vec<_> = (1..=levels).map(|i| b.add_node(format!("v{i}"))).collect::<Result<_>>()?;
    let u = b.add_node("u")?;
    let d = b.add_node("D")?;
    for l in 0..levels {
        let c = capacity(l);
        let direct = if l == 0 { 1.0 + eps } else { eps };
        b.add_edge(v[l], d, c, direct, 0)?;
        let detour = 2f64.powi(l as i32) - eps;
        let next = if l + 1 < levels { v[l + 1] } else { u };
        b.add_edge(v[l], next, c, detour, 0)?;
    }
    b.add_edge(u, d, capacity(levels - 1), eps, 0)?;
    let net = b.build()?;
    let mut agents = Vec::new();
    for (l, &s) in sizes.iter().enumerate() {
        for _ in 0..s {
            agents.push(AgentProfile::truthful(format!("{}", agents.len() + 1), v[l], d));
        }
    }
    Instance::new(net, agents)
}

/// Whether `order` (agent indices) has the chain-of-levels property: for
/// every level `i ≥ 2`, the last agent among levels `1..=i` sits on level `i`.
pub fn has_chain_property(levels: &[usize], order: &[usize]) -> bool {
    let top = levels.iter().copied().max().unwrap_or(0);
    let mut last = vec![usize::MAX; top + 1];
    for &a in order.iter().rev() {
        let l = levels[a];
        for slot in last.iter_mut().skip(l) {
            if *slot == usize::MAX {
                *slot = l;
            }
        }
    }
    (2..=top).all(|i| last[i] == i)
}

/// Exact probability of the chain-of-levels property under a uniform
/// ordering, as `(favourable, total)` over all `n!` orderings. Limited to
/// `n ≤ 10`.
pub fn chain_property_probability(k: usize) -> Result<(u64, u64)> {
    let levels = chain_agent_levels(k);
    let n = levels.len();
    if n > 10 {
        return Err(TapError::InvalidArgument(format!("{n} agents is too many to enumerate")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut favourable = 0u64;
    let mut total = 0u64;
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut visit = |o: &[usize]| {
        total += 1;
        if has_chain_property(&levels, o) {
            favourable += 1;
        }
    };
    visit(&order);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            visit(&order);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok((favourable, total))
}
