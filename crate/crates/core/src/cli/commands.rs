use std::fmt::Write as _;
use std::io::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::load::{load_source, read_instance};
use super::{
    AuditArgs, BenchArgs, Check, Cli, Command, ExpandArgs, Format, GenKind, MechArgs, MechKind, RuleArg,
    SolveArgs, StatsArgs, YaoPart,
};
use tapmech::audit::{
    check_docp, check_non_bossy, check_pareto_exhaustive, check_theorem1, manipulation_csv,
    manipulation_sweep, manipulation_text, ParetoConfig,
};
use tapmech::bench::{
    csv_string, run_experiment, ExperimentConfig, GraphStats, Population, ReferenceMode, RsdSampling,
};
use tapmech::instances::{
    default_population, gen_chain, gen_fig1, gen_fig1_eps, gen_sd_tight, gen_tap_plus,
    gen_tap_plus_all_orders, gen_yao_distribution, random_population, PreferenceProfile,
};
use tapmech::mechanisms::{
    bipolar_serial_dictatorship, fmt_cost, optimal_allocation, rsd_expected_cost, serial_dictatorship,
    uniform_order, Bipartition, OptimalConfig, RsdMode, SwapRule,
};
use tapmech::network::{
    build_time_expanded, default_horizon, edge_connectivity, hop_diameter, is_strongly_connected,
};
use tapmech::{AgentOrder, Allocation, Instance, Mechanism, Result, TapError};

/// Runs one command, writing data to stdout. `Ok(false)` means the command
/// completed but its result is not certified.
pub fn run(cli: Cli) -> Result<bool> {
    let (text, certified) = match cli.command {
        Command::GenInstance(a) => (gen_instance(a.kind)?, true),
        Command::Solve(a) => solve(a)?,
        Command::Audit(a) => audit(a)?,
        Command::Bench(a) => (bench(a)?, true),
        Command::ExpandTime(a) => (expand_time(a)?, true),
        Command::Stats(a) => (stats(a)?, true),
    };
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(certified)
}

fn gen_instance(kind: GenKind) -> Result<String> {
    let inst = match kind {
        GenKind::Fig1 { k, eps } => match (k, eps) {
            (_, Some(e)) => gen_fig1_eps(e)?,
            (k, None) => gen_fig1(k.unwrap_or(2.0))?,
        },
        GenKind::SdTight { n, eps } => gen_sd_tight(n, eps)?,
        GenKind::Chain { k } => gen_chain(k)?,
        GenKind::TapPlus { profile, eps, all_orders } => {
            let ranks = profile
                .split(';')
                .map(|row| {
                    row.split(',')
                        .map(|r| {
                            r.trim()
                                .parse::<u32>()
                                .map_err(|_| TapError::InvalidArgument(format!("bad rank `{r}`")))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let m = ranks.first().map_or(0, Vec::len);
            let p = PreferenceProfile::new(m, ranks)?;
            if all_orders {
                gen_tap_plus_all_orders(&p, eps)?.instance
            } else {
                gen_tap_plus(&p, eps)?.instance
            }
        }
        GenKind::Yao { which } => {
            let mut parts = gen_yao_distribution()?;
            let idx = if which == YaoPart::Base { 0 } else { 1 };
            let (w, inst) = parts.swap_remove(idx);
            return Ok(format!("# probability {w}\n{}", inst.to_text()));
        }
        GenKind::Random { graph, count, seed, nodes, capacity } => {
            let src = load_source(&graph, &capacity, nodes)?;
            let count = count.unwrap_or_else(|| default_population(&src.network));
            let agents = random_population(&src.network, count, seed)?;
            let inst = Instance::new(src.network, agents)?;
            return Ok(format!("# random population, seed {seed}\n{}", inst.to_text()));
        }
    };
    Ok(inst.to_text())
}

/// A mechanism fixed by the command-line flags.
struct Configured {
    kind: MechKind,
    order: Option<AgentOrder>,
    bipartition: Option<Bipartition>,
    rule: SwapRule,
    seed: u64,
    opt: OptimalConfig,
}

impl Configured {
    fn new(args: &MechArgs, inst: &Instance) -> Result<Self> {
        let order = match &args.ordering {
            Some(ids) => Some(AgentOrder::from_ids(inst, ids)?),
            None => None,
        };
        if order.is_some() && matches!(args.mech, MechKind::Rsd | MechKind::Opt) {
            return Err(TapError::InvalidArgument("--ordering applies to sd and bsd only".into()));
        }
        let bipartition = match args.mech {
            MechKind::Bsd => {
                let net = inst.network();
                let edges = args
                    .x2
                    .iter()
                    .flatten()
                    .map(|label| {
                        let (t, h) = label
                            .split_once('>')
                            .ok_or_else(|| TapError::InvalidArgument(format!("bad edge `{label}`")))?;
                        net.find_edge(net.require_node(t)?, net.require_node(h)?)
                            .ok_or_else(|| TapError::InvalidArgument(format!("no edge `{label}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(Bipartition::new(net.edge_count(), edges)?)
            }
            _ => None,
        };
        Ok(Self {
            kind: args.mech,
            order,
            bipartition,
            rule: match args.swap_rule {
                RuleArg::Path => SwapRule::Path,
                RuleArg::Edge => SwapRule::Edge,
            },
            seed: args.seed,
            opt: OptimalConfig { node_budget: args.budget, ..OptimalConfig::default() },
        })
    }

    /// The ordering a serial mechanism uses on `inst`.
    fn serial_order(&self, inst: &Instance) -> AgentOrder {
        match (&self.order, self.kind) {
            (Some(o), _) => o.clone(),
            (None, MechKind::Rsd) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                uniform_order(inst.agent_count(), &mut rng)
            }
            _ => AgentOrder::natural(inst.agent_count()),
        }
    }

    fn run(&self, inst: &Instance) -> Result<(Allocation, bool)> {
        match self.kind {
            MechKind::Sd | MechKind::Rsd => Ok((serial_dictatorship(inst, &self.serial_order(inst))?, true)),
            MechKind::Bsd => Ok((
                bipolar_serial_dictatorship(
                    inst,
                    &self.serial_order(inst),
                    self.bipartition.as_ref().expect("bsd has a bipartition"),
                    self.rule,
                )?,
                true,
            )),
            MechKind::Opt => {
                let out = optimal_allocation(inst, self.opt)?;
                Ok((out.allocation, out.certified))
            }
        }
    }
}

impl Mechanism for Configured {
    fn allocate(&self, instance: &Instance) -> Result<Allocation> {
        self.run(instance).map(|(a, _)| a)
    }
}

fn parse_rsd_mode(spec: &str, seed: u64) -> Result<RsdMode> {
    match spec {
        "exact" => Ok(RsdMode::Exact),
        _ => spec
            .strip_prefix("mc:")
            .and_then(|k| k.parse().ok())
            .map(|trials| RsdMode::MonteCarlo { trials, seed })
            .ok_or_else(|| TapError::InvalidArgument(format!("bad rsd mode `{spec}`"))),
    }
}

fn solve(args: SolveArgs) -> Result<(String, bool)> {
    let inst = read_instance(&args.mech.instance)?;
    let mech = Configured::new(&args.mech, &inst)?;
    let (alloc, certified) = mech.run(&inst)?;
    let mut out = String::new();
    if args.mech.mech == MechKind::Rsd {
        let _ = writeln!(out, "# seed {}", args.mech.seed);
    }
    if !certified {
        let _ = writeln!(out, "# not certified");
    }
    out.push_str(&alloc.to_text(&inst));
    if let Some(spec) = &args.expect {
        let e = rsd_expected_cost(&inst, parse_rsd_mode(spec, args.mech.seed)?)?;
        let _ = writeln!(
            out,
            "expected {} stderr {} orderings {}",
            fmt_cost(e.mean),
            fmt_cost(e.stderr),
            e.orderings
        );
    }
    Ok((out, certified))
}

fn audit(args: AuditArgs) -> Result<(String, bool)> {
    let inst = read_instance(&args.mech.instance)?;
    let mech = Configured::new(&args.mech, &inst)?;
    let net = inst.network();
    let reports = match &args.reports {
        Some(names) => names.iter().map(|n| net.require_node(n)).collect::<Result<Vec<_>>>()?,
        None => net.nodes().collect(),
    };
    let agents: Vec<usize> = match &args.agent {
        Some(id) => vec![inst.agent_index(id)?],
        None => (0..inst.agent_count()).collect(),
    };
    let wants = |c: Check| args.check == c || args.check == Check::All;
    let mut out = String::new();
    let mut certified = true;
    if wants(Check::Manipulation) {
        let found: Vec<_> = manipulation_sweep(&inst, &mech, Some(&reports))?
            .into_iter()
            .filter(|r| agents.contains(&r.agent))
            .collect();
        match args.format {
            Format::Text => out.push_str(&manipulation_text(&inst, &found)),
            Format::Csv => out.push_str(&manipulation_csv(&inst, &found)),
        }
    }
    if args.format == Format::Csv {
        return Ok((out, certified));
    }
    let (alloc, cert) = mech.run(&inst)?;
    certified &= cert;
    if wants(Check::Theorem1) {
        for (i, ok) in check_theorem1(&inst, &alloc).into_iter().enumerate() {
            if agents.contains(&i) {
                let verdict = if ok { "ok" } else { "violated" };
                let _ = writeln!(out, "theorem1 agent {} {verdict}", inst.agent(i).id);
            }
        }
    }
    if wants(Check::Pareto) {
        let v = check_pareto_exhaustive(&inst, &alloc, ParetoConfig::default())?;
        certified &= v.certified;
        let verdict = if v.pareto_optimal { "optimal" } else { "dominated" };
        let _ = writeln!(out, "pareto {verdict}{}", if v.certified { "" } else { " (not certified)" });
        if let Some(paths) = v.dominating {
            for (a, p) in inst.agents().iter().zip(&paths) {
                let _ = writeln!(out, "  dominating {} {} {}", a.id, p.display(net), fmt_cost(p.weight()));
            }
        }
    }
    if wants(Check::NonBossy) {
        for &i in &agents {
            let ok = check_non_bossy(&inst, &mech, i, &reports)?;
            let _ = writeln!(out, "non-bossy agent {} {}", inst.agent(i).id, if ok { "yes" } else { "no" });
        }
    }
    if wants(Check::Docp) && mech.kind != MechKind::Opt {
        let order = mech.serial_order(&inst);
        let r = check_docp(&inst, &order, mech.opt)?;
        certified &= r.certified;
        let _ = writeln!(
            out,
            "docp {}{}",
            if r.holds { "holds" } else { "fails" },
            if r.certified { "" } else { " (not certified)" }
        );
        for w in &r.witnesses {
            let name = |v: Option<tapmech::NodeId>| v.map_or("-".to_string(), |v| net.name(v).to_string());
            let _ = writeln!(
                out,
                "  blocked {} by {} alpha {} beta {} residual {} required {} {}",
                inst.agent(w.blocked).id,
                w.blocker.map_or("-".to_string(), |j| inst.agent(j).id.clone()),
                name(w.alpha),
                name(w.beta),
                w.min_residual.map_or("-".to_string(), |m| m.to_string()),
                w.required,
                if w.holds { "ok" } else { "short" }
            );
        }
    }
    Ok((out, certified))
}

fn bench(args: BenchArgs) -> Result<String> {
    let src = load_source(&args.graph, &args.capacity, args.nodes)?;
    let population = match (args.agents, src.agents) {
        (Some(count), _) => Population::Random { count },
        (None, Some(agents)) => Population::Fixed(agents),
        (None, None) => Population::Random { count: default_population(&src.network) },
    };
    let reference = match args.reference.as_str() {
        "proxy" => ReferenceMode::Proxy,
        "exact" => ReferenceMode::Exact(OptimalConfig::default()),
        other => return Err(TapError::InvalidArgument(format!("bad reference `{other}`"))),
    };
    let rsd = match parse_rsd_mode(&args.rsd, 0)? {
        RsdMode::Exact => RsdSampling::Exact,
        RsdMode::MonteCarlo { trials, .. } => RsdSampling::MonteCarlo { orderings: trials },
    };
    let config = ExperimentConfig {
        gammas: args.gamma,
        trials: args.trials,
        seed: args.seed,
        reference,
        rsd,
        ..ExperimentConfig::new(src.network, population)
    };
    eprintln!("# seed {} trials {} capacity {}", args.seed, args.trials, args.capacity);
    let rows = run_experiment(&config)?;
    let csv = csv_string(&rows);
    match args.out {
        Some(path) => {
            std::fs::write(&path, &csv)?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

fn expand_time(args: ExpandArgs) -> Result<String> {
    let inst = read_instance(&args.instance)?;
    let net = inst.network();
    let horizon = args.horizon.unwrap_or_else(|| default_horizon(net, inst.agent_count()));
    let tx = build_time_expanded(net, horizon)?;
    let mut out = String::new();
    let _ = writeln!(out, "horizon {horizon}");
    let _ = writeln!(out, "nodes {}", tx.network().node_count());
    let _ = writeln!(out, "edges {}", tx.network().edge_count());
    let _ = writeln!(out, "holdovers {}", tx.holdover_count());
    for &e in tx.unusable_edges() {
        let _ = writeln!(out, "unusable {}", net.edge_label(e));
    }
    if inst.agent_count() == 0 {
        return Ok(out);
    }
    let routing = tx.routing_instance(&inst)?;
    let alloc = serial_dictatorship(&routing.instance, &AgentOrder::natural(inst.agent_count()))?;
    for (a, p) in inst.agents().iter().zip(alloc.paths()) {
        let moves: Vec<String> =
            tx.project(p).iter().map(|m| format!("{}@{}", net.edge_label(m.edge), m.departure)).collect();
        let moves = if moves.is_empty() { "-".to_string() } else { moves.join(",") };
        let _ = writeln!(out, "schedule {} {moves}", a.id);
    }
    let schedule = tx.project_all(alloc.paths());
    let _ = writeln!(out, "feasible {}", if schedule.is_feasible(net) { "yes" } else { "no" });
    let _ = writeln!(out, "sc {}", fmt_cost(alloc.social_cost()));
    Ok(out)
}

fn stats(args: StatsArgs) -> Result<String> {
    let src = load_source(&args.graph, &args.capacity, args.nodes)?;
    let net = &src.network;
    let s = GraphStats::of(net);
    let mut out = String::new();
    let _ = writeln!(out, "nodes {}", s.nodes);
    let _ = writeln!(out, "edges {}", s.edges);
    let _ = writeln!(out, "outdeg_avg {:.6}", s.outdeg_avg);
    let _ = writeln!(out, "cap_avg {:.6}", s.cap_avg);
    let _ = writeln!(out, "symmetric {}", net.detect_symmetry());
    let _ = writeln!(out, "strongly_connected {}", is_strongly_connected(net));
    let _ = writeln!(out, "hop_diameter {}", hop_diameter(net));
    if let Some(k) = args.k {
        let c = edge_connectivity(net, k);
        let _ = writeln!(out, "{k}_edge_connected {}", c >= k);
    }
    Ok(out)
}
