//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::brute;
use common::{random_instance, Shape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tapmech::audit::{check_docp, check_non_bossy, check_theorem1, find_manipulation, manipulation_sweep};
use tapmech::bench::{
    csv_string, extract_subgraph, parse_dimacs, parse_dimacs_str, rome_like_dimacs, run_experiment,
    CapacityPolicy, ExperimentConfig, Population, ReferenceMode, RsdSampling,
};
use tapmech::instances::{
    chain_agent_levels, chain_property_probability, gen_chain, gen_fig1, gen_sd_tight, gen_yao_distribution,
};
use tapmech::mechanisms::{
    bipolar_serial_dictatorship, distinct_type_orders, opt_lower_bound, optimal_allocation,
    rsd_expected_cost, serial_dictatorship, uniform_order, Bipartition, BipolarSerialDictatorship,
    OptimalConfig, OptimalMechanism, RsdMode, SerialDictatorship, SwapRule,
};
use tapmech::network::{build_time_expanded, default_horizon, EdgeId, NodeId};
use tapmech::{AgentOrder, AgentProfile, Allocation, Instance, Path, RoadNetwork};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn fig1_regression() -> Outcome {
    let inst = gen_fig1(2.0).map_err(|e| e.to_string())?;
    let opt = optimal_allocation(&inst, OptimalConfig::default()).map_err(|e| e.to_string())?;
    ensure!(opt.certified, "optimum not certified");
    let sd12 = serial_dictatorship(&inst, &AgentOrder::natural(2)).map_err(|e| e.to_string())?;
    let sd21 = serial_dictatorship(&inst, &AgentOrder::natural(2).reversed()).map_err(|e| e.to_string())?;
    let rsd = rsd_expected_cost(&inst, RsdMode::Exact).map_err(|e| e.to_string())?;
    let got = (opt.allocation.social_cost(), sd12.social_cost(), sd21.social_cost(), rsd.mean);
    ensure!(got == (7.0, 8.0, 7.0, 7.5), "opt/sd12/sd21/rsd = {got:?}");
    Ok(format!("opt {} sd(1,2) {} sd(2,1) {} E[rsd] {}", got.0, got.1, got.2, got.3))
}

fn opt_manipulable() -> Outcome {
    let inst = gen_fig1(2.0).map_err(|e| e.to_string())?;
    let net = inst.network();
    let f = net.require_node("F").map_err(|e| e.to_string())?;
    let mech = OptimalMechanism::default();
    let via_f = find_manipulation(&inst, &mech, 0, &[f]).map_err(|e| e.to_string())?;
    let r = via_f.ok_or("reporting F is not profitable")?;
    ensure!(r.gain == 1.0, "gain from F is {}", r.gain);
    ensure!(
        (r.truthful_cost, r.manipulated_cost) == (4.0, 3.0),
        "costs {} -> {}",
        r.truthful_cost,
        r.manipulated_cost
    );
    let all: Vec<NodeId> = net.nodes().collect();
    let best =
        find_manipulation(&inst, &mech, 0, &all).map_err(|e| e.to_string())?.ok_or("sweep found nothing")?;
    ensure!(best.gain == 1.0, "best gain over all reports is {}", best.gain);
    Ok(format!("agent 1 reports F: cost 4 -> 3, gain {}", r.gain))
}

fn sd_exponential_gap() -> Outcome {
    let mut detail = Vec::new();
    for n in 2..=6usize {
        let inst = gen_sd_tight(n, 0.01).map_err(|e| e.to_string())?;
        let sd = serial_dictatorship(&inst, &AgentOrder::natural(n)).map_err(|e| e.to_string())?;
        let opt = optimal_allocation(&inst, OptimalConfig::default()).map_err(|e| e.to_string())?;
        ensure!(opt.certified, "n={n}: optimum not certified");
        let want_sd = (1u64 << n) as f64 - 1.0;
        let want_opt = 1.0 + 0.01 * n as f64;
        let (got_sd, got_opt) = (sd.social_cost(), opt.allocation.social_cost());
        ensure!(close(got_sd, want_sd, 1e-9), "n={n}: sd {got_sd} != {want_sd}");
        ensure!(close(got_opt, want_opt, 1e-9), "n={n}: opt {got_opt} != {want_opt}");
        ensure!(close(got_sd / got_opt, want_sd / want_opt, 1e-9), "n={n}: ratio {}", got_sd / got_opt);
        detail.push(format!("{:.4}", got_sd / got_opt));
    }
    Ok(format!("ratios n=2..6: {}", detail.join(" ")))
}

/// Every ordering keeps SD feasible and satisfies the deviation condition.
fn docp_everywhere(inst: &Instance) -> bool {
    let Ok(orders) = distinct_type_orders(inst) else { return false };
    orders
        .iter()
        .all(|o| matches!(check_docp(inst, o, OptimalConfig::default()), Ok(r) if r.holds && r.certified))
}

fn rsd_bounds() -> Outcome {
    let shape = Shape { max_nodes: 6, max_agents: 4, max_weight: 10, max_capacity: 2, symmetric: true };
    let (mut accepted, mut tried, mut worst) = (0, 0u64, 0.0f64);
    while accepted < 200 {
        ensure!(tried < 20_000, "only {accepted} qualifying instances in {tried} draws");
        let inst = random_instance(50_000 + tried, shape);
        tried += 1;
        if !docp_everywhere(&inst) {
            continue;
        }
        accepted += 1;
        let n = inst.agent_count() as f64;
        let e = rsd_expected_cost(&inst, RsdMode::Exact).map_err(|e| e.to_string())?.mean;
        let opt = optimal_allocation(&inst, OptimalConfig::default()).map_err(|e| e.to_string())?;
        let opt = opt.allocation.social_cost();
        ensure!(e <= n * opt + 1e-9, "draw {}: E[rsd] {e} > {n} x {opt}", tried - 1);
        if opt > 0.0 {
            worst = worst.max(e / opt);
        }
    }
    for k in [2usize, 3] {
        let levels = chain_agent_levels(k);
        let inst = gen_chain(k).map_err(|e| e.to_string())?;
        ensure!(inst.agent_count() == levels.len(), "chain({k}) agent count mismatch");
        let (fav, total) = chain_property_probability(k).map_err(|e| e.to_string())?;
        let (num, den) = (1u64 << (k - 1), 3u64.pow(k as u32 - 1));
        ensure!(fav * den == total * num, "k={k}: {fav}/{total} != {num}/{den}");
        let (ofav, ototal) = chain_oracle(&levels);
        ensure!((ofav, ototal) == (fav, total), "k={k}: oracle {ofav}/{ototal} vs {fav}/{total}");
    }
    Ok(format!("200 instances ({tried} draws), worst E[rsd]/opt {worst:.4}; chain probabilities 2/3, 4/9"))
}

/// Counts orderings where, for every level `i ≥ 2`, the last level-`i`
/// agent comes after every agent of a lower level.
fn chain_oracle(levels: &[usize]) -> (u64, u64) {
    let top = *levels.iter().max().unwrap();
    let (mut fav, mut total) = (0, 0);
    for order in brute::permutations(levels.len()) {
        total += 1;
        let mut last_at = vec![0usize; top + 1];
        for (pos, &a) in order.iter().enumerate() {
            last_at[levels[a]] = last_at[levels[a]].max(pos + 1);
        }
        let ok = (2..=top).all(|i| (1..i).all(|l| last_at[l] < last_at[i]));
        fav += ok as u64;
    }
    (fav, total)
}

/// Cheapest social cost over feasible assignments (to true destinations)
/// in which agent `owner` holds edge `edge`.
fn best_with_owner(inst: &Instance, edge: EdgeId, owner: usize) -> f64 {
    let net = inst.network();
    let mut best = f64::INFINITY;
    brute::feasible_assignments(
        inst,
        |i| inst.agent(i).destination,
        |paths| {
            if !paths[owner].edges.contains(&edge) {
                return;
            }
            let paths = paths
                .iter()
                .enumerate()
                .map(|(i, p)| Path::from_edges(net, inst.agent(i).origin, p.edges.clone()).unwrap())
                .collect();
            best = best.min(Allocation::new(inst, paths).unwrap().social_cost());
        },
    );
    best
}

fn yao_distribution() -> Outcome {
    let dist = gen_yao_distribution().map_err(|e| e.to_string())?;
    let mut expected_opt = 0.0;
    for (w, inst) in &dist {
        let opt = optimal_allocation(inst, OptimalConfig::default()).map_err(|e| e.to_string())?;
        expected_opt += w * opt.allocation.social_cost();
    }
    ensure!(close(expected_opt, 20.0 / 3.0, 1e-9), "expected optimum {expected_opt}");
    let net = dist[0].1.network();
    let af = net.find_edge(net.require_node("A").unwrap(), net.require_node("F").unwrap()).ok_or("no A>F")?;
    let mut costs = Vec::new();
    for owner in 0..2 {
        let cost: f64 = dist.iter().map(|(w, inst)| w * best_with_owner(inst, af, owner)).sum();
        ensure!(close(cost, 22.0 / 3.0, 1e-9), "owner {owner}: expected cost {cost}");
        ensure!(close(cost / expected_opt, 1.1, 1e-9), "ratio {}", cost / expected_opt);
        costs.push(cost);
    }
    Ok(format!("E[opt] {expected_opt:.9}, A>F to agent 1: {:.9}, to agent 2: {:.9}", costs[0], costs[1]))
}

fn strategyproofness() -> Outcome {
    let shape = Shape { max_nodes: 8, max_agents: 4, max_weight: 10, max_capacity: 2, symmetric: false };
    let (mut checked, mut draw) = (0, 0u64);
    let (mut bsd_runs, mut bsd_bad) = ([0usize; 2], [0usize; 2]);
    let mut witness: Option<String> = None;
    while checked < 500 {
        let inst = random_instance(90_000 + draw, shape);
        let mut rng = ChaCha8Rng::seed_from_u64(draw);
        draw += 1;
        let n = inst.agent_count();
        let order = uniform_order(n, &mut rng);
        let Ok(sd) = serial_dictatorship(&inst, &order) else { continue };
        checked += 1;
        let mech = SerialDictatorship { order: Some(order.clone()) };
        let found = manipulation_sweep(&inst, &mech, None).map_err(|e| e.to_string())?;
        ensure!(found.is_empty(), "draw {}: SD manipulable: {:?}", draw - 1, found[0]);
        ensure!(
            check_theorem1(&inst, &sd).iter().all(|&ok| ok),
            "draw {}: SD path not a best reaction",
            draw - 1
        );
        let all: Vec<NodeId> = inst.network().nodes().collect();
        for i in 0..n {
            ensure!(
                check_non_bossy(&inst, &mech, i, &all).map_err(|e| e.to_string())?,
                "draw {}: agent {i} is bossy",
                draw - 1
            );
        }
        let mask: Vec<bool> = (0..inst.network().edge_count()).map(|_| rng.random_bool(0.5)).collect();
        let bipartition = Bipartition::from_mask(mask);
        for (k, rule) in [SwapRule::Path, SwapRule::Edge].into_iter().enumerate() {
            if bipolar_serial_dictatorship(&inst, &order, &bipartition, rule).is_err() {
                continue;
            }
            bsd_runs[k] += 1;
            let bsd = BipolarSerialDictatorship {
                order: Some(order.clone()),
                bipartition: bipartition.clone(),
                rule,
            };
            let found = manipulation_sweep(&inst, &bsd, None).map_err(|e| e.to_string())?;
            if let Some(m) = found.first() {
                bsd_bad[k] += 1;
                witness.get_or_insert_with(|| {
                    format!(
                        "draw {} ({rule:?} rule): agent {} reports {} and gains {}",
                        draw - 1,
                        m.agent_id,
                        inst.network().name(m.report),
                        m.gain
                    )
                });
            }
        }
    }
    let sd_summary = format!("SD clean on {checked} instances ({draw} draws)");
    ensure!(
        witness.is_none(),
        "{sd_summary}; BSD manipulable on {}/{} (path rule) and {}/{} (edge rule); first: {}",
        bsd_bad[0],
        bsd_runs[0],
        bsd_bad[1],
        bsd_runs[1],
        witness.unwrap_or_default()
    );
    Ok(format!("{sd_summary}; BSD clean on {} + {} runs", bsd_runs[0], bsd_runs[1]))
}

fn oracle_equivalence() -> Outcome {
    let shape = Shape { max_nodes: 7, max_agents: 3, max_weight: 10, max_capacity: 2, symmetric: false };
    let (mut compared, mut draw) = (0, 0u64);
    while compared < 100 {
        let inst = random_instance(130_000 + draw, shape);
        draw += 1;
        let brute = brute::optimum(&inst);
        let fast = optimal_allocation(&inst, OptimalConfig::default());
        let Some((w, edges)) = brute else {
            ensure!(fast.is_err(), "draw {}: infeasible by enumeration, solved by search", draw - 1);
            continue;
        };
        let out = fast.map_err(|e| format!("draw {}: {e}", draw - 1))?;
        ensure!(out.certified, "draw {}: not certified", draw - 1);
        let got: Vec<Vec<EdgeId>> = out.allocation.paths().iter().map(|p| p.edges().to_vec()).collect();
        ensure!(got == edges, "draw {}: different minimiser", draw - 1);
        ensure!(
            close(out.allocation.social_cost(), w, 1e-9),
            "draw {}: {} vs {w}",
            draw - 1,
            out.allocation.social_cost()
        );
        let lb = opt_lower_bound(&inst).map_err(|e| e.to_string())?;
        ensure!(lb <= w + 1e-9, "draw {}: lower bound {lb} > {w}", draw - 1);
        compared += 1;
    }
    Ok(format!("{compared} feasible instances ({draw} draws) identical"))
}

fn road_network() -> Result<(RoadNetwork, &'static str), String> {
    let policy = CapacityPolicy::default();
    match std::env::var("TAP_ROME99") {
        Ok(path) => Ok((parse_dimacs(&path, policy).map_err(|e| e.to_string())?, "rome99")),
        Err(_) => Ok((
            parse_dimacs_str(&rome_like_dimacs(0), policy).map_err(|e| e.to_string())?,
            "synthetic rome-sized grid",
        )),
    }
}

fn experiments() -> Outcome {
    let (full, source) = road_network()?;
    let net = Arc::new(extract_subgraph(&full, 300).map_err(|e| e.to_string())?);
    let config = ExperimentConfig {
        gammas: vec![1.0, 1.5, 2.0],
        trials: 20,
        seed: 2024,
        reference: ReferenceMode::Proxy,
        rsd: RsdSampling::MonteCarlo { orderings: 32 },
        ..ExperimentConfig::new(net, Population::Random { count: 100 })
    };
    let rows = run_experiment(&config).map_err(|e| e.to_string())?;
    let csv = csv_string(&rows);
    for r in &rows {
        ensure!(r.feasible_trials > 0, "gamma {}: no feasible trial", r.gamma);
        ensure!(r.ratio_sd.is_finite() && r.ratio_rsd.is_finite(), "gamma {}: non-finite ratio", r.gamma);
        let gap = (r.sc_sd - r.sc_rsd_mean).abs() / r.sc_rsd_mean;
        ensure!(
            gap <= 0.25,
            "gamma {}: sd {} vs rsd {} differ by {:.1}%",
            r.gamma,
            r.sc_sd,
            r.sc_rsd_mean,
            gap * 100.0
        );
    }
    let (lo, hi) = (&rows[0], &rows[rows.len() - 1]);
    ensure!(hi.ratio_sd <= lo.ratio_sd, "sd ratio rises: {} at 1 vs {} at 2", lo.ratio_sd, hi.ratio_sd);
    let again = csv_string(&run_experiment(&config).map_err(|e| e.to_string())?);
    ensure!(again == csv, "CSV differs between identical runs");
    Ok(format!(
        "{source}, 300 nodes, 100 agents, 20 trials: sd ratio {:.4} -> {:.4}, rsd ratio {:.4} -> {:.4}",
        lo.ratio_sd, hi.ratio_sd, lo.ratio_rsd, hi.ratio_rsd
    ))
}

fn timed_network(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.random_range(3..10u32);
    let mut b = RoadNetwork::builder();
    for i in 0..n {
        b.add_node(format!("n{i}")).unwrap();
    }
    for i in 0..n {
        b.add_edge(NodeId(i), NodeId((i + 1) % n), rng.random_range(1..3), 1.0, rng.random_range(0..4))
            .unwrap();
    }
    for _ in 0..2 * n {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if u != v {
            let w = rng.random_range(1..8) as f64;
            let _ = b.add_edge(NodeId(u), NodeId(v), rng.random_range(1..3), w, rng.random_range(0..4));
        }
    }
    let net = b.build().unwrap();
    let agents = (0..rng.random_range(1..6))
        .map(|i| {
            let o = rng.random_range(0..n);
            AgentProfile::truthful((i + 1).to_string(), NodeId(o), NodeId((o + rng.random_range(1..n)) % n))
        })
        .collect();
    Instance::new(net, agents).unwrap()
}

fn time_expansion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut graphs, mut routed) = (0, 0);
    for _ in 0..200 {
        let inst = timed_network(&mut rng);
        let net = inst.network();
        let horizon = rng.random_range(1..15);
        let tx = build_time_expanded(net, horizon).map_err(|e| e.to_string())?;
        for e in net.edge_ids() {
            let want = horizon.saturating_sub(net.edge(e).transit);
            ensure!(tx.movement_copies(e) == want, "movement copies {} != {want}", tx.movement_copies(e));
        }
        let holdovers = net.node_count() * (horizon as usize - 1);
        ensure!(tx.holdover_count() == holdovers, "holdovers {} != {holdovers}", tx.holdover_count());
        graphs += 1;

        let tx =
            build_time_expanded(net, default_horizon(net, inst.agent_count())).map_err(|e| e.to_string())?;
        let routing = tx.routing_instance(&inst).map_err(|e| e.to_string())?;
        if let Ok(alloc) = serial_dictatorship(&routing.instance, &AgentOrder::natural(inst.agent_count())) {
            let schedule = tx.project_all(alloc.paths());
            for (e, t, used) in schedule.entries() {
                ensure!(
                    used <= net.edge(e).capacity,
                    "edge {} at time {t} carries {used}",
                    net.edge_label(e)
                );
            }
            for (a, p) in inst.agents().iter().zip(alloc.paths()) {
                let moves = tx.project(p);
                let end = moves.last().map_or(a.origin, |m| net.edge(m.edge).head);
                ensure!(end == a.destination, "agent {} ends at {}", a.id, net.name(end));
            }
            routed += 1;
        }
    }
    ensure!(routed > 0, "no instance could be routed");
    Ok(format!("{graphs} graphs counted exactly, {routed} schedules capacity-feasible"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("fig1 regression", Duration::from_secs(1), fig1_regression),
        ("optimum is manipulable", Duration::from_secs(1), opt_manipulable),
        ("SD exponential gap", Duration::from_secs(5), sd_exponential_gap),
        ("RSD bounds", Duration::from_secs(60), rsd_bounds),
        ("Yao distribution", Duration::from_secs(1), yao_distribution),
        ("strategyproofness suite", Duration::from_secs(300), strategyproofness),
        ("oracle equivalence", Duration::from_secs(120), oracle_equivalence),
        ("road-network experiments", Duration::from_secs(300), experiments),
        ("time expansion", Duration::from_secs(30), time_expansion),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let result = match result {
            Ok(d) if took > limit => Err(format!("{d}; took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS {} {name}: {detail} ({took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} ({took:.2?})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
