use std::sync::Arc;

use tapmech::bench::{extract_subgraph, parse_dimacs, parse_dimacs_str, rome_like_dimacs, CapacityPolicy};
use tapmech::instances::{gen_chain, gen_fig1, gen_sd_tight};
use tapmech::{AgentProfile, Instance, Result, RoadNetwork, TapError};

pub struct Source {
    pub network: Arc<RoadNetwork>,
    pub agents: Option<Vec<AgentProfile>>,
}

fn bad(spec: &str) -> TapError {
    TapError::InvalidArgument(format!("unknown graph source `{spec}`"))
}

fn from_instance(inst: Instance) -> Source {
    Source { network: inst.shared_network(), agents: Some(inst.agents().to_vec()) }
}

/// Resolves `gen:NAME[:ARG]`, a `.gr` DIMACS file, or a `.tap` instance,
/// optionally cut down to its first `nodes` nodes.
pub fn load_source(spec: &str, capacity: &str, nodes: Option<usize>) -> Result<Source> {
    let policy: CapacityPolicy = capacity.parse()?;
    let source = if let Some(rest) = spec.strip_prefix("gen:") {
        let (name, arg) = match rest.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (rest, None),
        };
        let num = |default: Option<u64>| -> Result<u64> {
            match arg {
                Some(a) => a.parse().map_err(|_| bad(spec)),
                None => default.ok_or_else(|| bad(spec)),
            }
        };
        match name {
            "rome" => {
                let seed = num(Some(0))?;
                log::info!("synthetic Rome-sized road grid, seed {seed}, capacities {policy}");
                let net = parse_dimacs_str(&rome_like_dimacs(seed), policy)?;
                Source { network: Arc::new(net), agents: None }
            }
            "fig1" => from_instance(gen_fig1(2.0)?),
            "sd-tight" => from_instance(gen_sd_tight(num(None)? as usize, 0.01)?),
            "chain" => from_instance(gen_chain(num(None)? as usize)?),
            _ => return Err(bad(spec)),
        }
    } else if spec.ends_with(".gr") {
        let net = parse_dimacs(spec, policy).map_err(|e| with_path(e, spec.as_ref()))?;
        Source { network: Arc::new(net), agents: None }
    } else {
        from_instance(read_instance(spec.as_ref())?)
    };
    match nodes {
        None => Ok(source),
        Some(keep) => {
            let network = Arc::new(extract_subgraph(&source.network, keep)?);
            let agents = source.agents.filter(|agents| {
                let fits = agents
                    .iter()
                    .all(|a| [a.origin, a.destination, a.declared].iter().all(|v| v.index() < keep));
                if !fits {
                    log::warn!("source agents leave the first {keep} nodes; dropping them");
                }
                fits
            });
            Ok(Source { network, agents })
        }
    }
}

fn with_path(e: TapError, path: &std::path::Path) -> TapError {
    match e {
        TapError::Io(io) => TapError::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    }
}

pub fn read_instance(path: &std::path::Path) -> Result<Instance> {
    Instance::read(path).map_err(|e| with_path(e, path))
}
