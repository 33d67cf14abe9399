//! Problem instances (network + agents) and the `tap 1` text format.
//!
//! ```text
//! tap 1
//! symmetric                     # optional
//! node <name>
//! edge <tail> <head> <capacity> <weight> <transit>
//! agent <id> <origin> <destination> [<declared>]
//! ```
//!
//! `#` starts a comment. Writing then parsing reproduces the instance, and
//! parsing then writing reproduces any canonically written file byte for byte.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Result, TapError};
use crate::network::{is_valid_name, NetworkBuilder, NodeId, RoadNetwork};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentProfile {
    pub id: String,
    pub origin: NodeId,
    /// True (private) destination.
    pub destination: NodeId,
    /// Destination reported to the mechanism.
    pub declared: NodeId,
}

impl AgentProfile {
    pub fn truthful(id: impl Into<String>, origin: NodeId, destination: NodeId) -> Self {
        Self { id: id.into(), origin, destination, declared: destination }
    }

    pub fn is_truthful(&self) -> bool {
        self.destination == self.declared
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    network: Arc<RoadNetwork>,
    agents: Vec<AgentProfile>,
}

impl Instance {
    pub fn new(network: impl Into<Arc<RoadNetwork>>, agents: Vec<AgentProfile>) -> Result<Self> {
        let network = network.into();
        let n = network.node_count();
        let mut ids = HashSet::new();
        for a in &agents {
            if !is_valid_name(&a.id) {
                return Err(TapError::InvalidArgument(format!("invalid agent id `{}`", a.id)));
            }
            if !ids.insert(a.id.as_str()) {
                return Err(TapError::InvalidArgument(format!("duplicate agent `{}`", a.id)));
            }
            for v in [a.origin, a.destination, a.declared] {
                if v.index() >= n {
                    return Err(TapError::UnknownNode(format!("#{}", v.0)));
                }
            }
        }
        Ok(Self { network, agents })
    }

    pub fn network(&self) -> &RoadNetwork {
        &self.network
    }

    pub fn shared_network(&self) -> Arc<RoadNetwork> {
        Arc::clone(&self.network)
    }

    pub fn agents(&self) -> &[AgentProfile] {
        &self.agents
    }

    pub fn agent(&self, index: usize) -> &AgentProfile {
        &self.agents[index]
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agent_index(&self, id: &str) -> Result<usize> {
        self.agents.iter().position(|a| a.id == id).ok_or_else(|| TapError::UnknownAgent(id.to_string()))
    }

    /// Same instance with agent `index` reporting `declared`.
    pub fn with_declared(&self, index: usize, declared: NodeId) -> Self {
        let mut agents = self.agents.clone();
        agents[index].declared = declared;
        Self { network: Arc::clone(&self.network), agents }
    }

    /// Same agents on a different network with identical node ids.
    pub fn with_network(&self, network: impl Into<Arc<RoadNetwork>>) -> Result<Self> {
        Self::new(network, self.agents.clone())
    }

    /// The public origin set `O`.
    pub fn origins(&self) -> Vec<NodeId> {
        let mut o: Vec<_> = self.agents.iter().map(|a| a.origin).collect();
        o.sort();
        o.dedup();
        o
    }

    pub fn to_text(&self) -> String {
        let net = &self.network;
        let mut out = String::from("tap 1\n");
        if net.is_symmetric() {
            out.push_str("symmetric\n");
        }
        for v in net.nodes() {
            let _ = writeln!(out, "node {}", net.name(v));
        }
        for e in net.edges() {
            let _ = writeln!(
                out,
                "edge {} {} {} {} {}",
                net.name(e.tail),
                net.name(e.head),
                e.capacity,
                e.weight,
                e.transit
            );
        }
        for a in &self.agents {
            let _ = write!(out, "agent {} {} {}", a.id, net.name(a.origin), net.name(a.destination));
            if !a.is_truthful() {
                let _ = write!(out, " {}", net.name(a.declared));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut builder = NetworkBuilder::new();
        let mut pending_agents: Vec<(usize, Vec<String>)> = Vec::new();
        let mut saw_header = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| TapError::Parse { line: line_no, message };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if !saw_header {
                if tokens != ["tap", "1"] {
                    return Err(err("expected header `tap 1`".into()));
                }
                saw_header = true;
                continue;
            }
            match tokens[0] {
                "symmetric" if tokens.len() == 1 => {
                    builder.symmetric(true);
                }
                "node" if tokens.len() == 2 => {
                    builder.add_node(tokens[1]).map_err(|e| err(e.to_string()))?;
                }
                "edge" if tokens.len() == 6 => {
                    let capacity: u32 =
                        tokens[3].parse().map_err(|_| err(format!("bad capacity `{}`", tokens[3])))?;
                    let weight: f64 =
                        tokens[4].parse().map_err(|_| err(format!("bad weight `{}`", tokens[4])))?;
                    let transit: u32 =
                        tokens[5].parse().map_err(|_| err(format!("bad transit time `{}`", tokens[5])))?;
                    builder
                        .add_edge_named(tokens[1], tokens[2], capacity, weight, transit)
                        .map_err(|e| err(e.to_string()))?;
                }
                "agent" if tokens.len() == 4 || tokens.len() == 5 => {
                    pending_agents.push((line_no, tokens[1..].iter().map(|s| s.to_string()).collect()));
                }
                other => {
                    return Err(err(format!("unrecognised line `{other}` with {} field(s)", tokens.len())))
                }
            }
        }
        if !saw_header {
            return Err(TapError::Parse { line: 1, message: "missing header `tap 1`".into() });
        }
        let network = builder.build()?;
        let mut agents = Vec::with_capacity(pending_agents.len());
        for (line, fields) in pending_agents {
            let lookup = |name: &str| {
                network
                    .node(name)
                    .ok_or_else(|| TapError::Parse { line, message: format!("unknown node `{name}`") })
            };
            let origin = lookup(&fields[1])?;
            let destination = lookup(&fields[2])?;
            let declared = match fields.get(3) {
                Some(d) => lookup(d)?,
                None => destination,
            };
            agents.push(AgentProfile { id: fields[0].clone(), origin, destination, declared });
        }
        Instance::new(network, agents)
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str =
        "tap 1\nnode a\nnode b\nnode c\nedge a b 2 1.5 0\nedge b c 1 0.01 3\nagent 1 a c\nagent 2 a c b\n";

    #[test]
    fn canonical_text_round_trips() {
        let inst = Instance::parse(SAMPLE).unwrap();
        assert_eq!(inst.to_text(), SAMPLE);
        assert!(!inst.agent(1).is_truthful());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header comment\ntap 1\n\nnode a # first\nnode b\nedge a b 1 2 0\nagent x a b\n";
        let inst = Instance::parse(text).unwrap();
        assert_eq!(inst.network().edge_count(), 1);
        assert_eq!(inst.agent_count(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = Instance::parse("tap 1\nnode a\nedge a z 1 1 0\n").unwrap_err();
        assert!(matches!(e, TapError::Parse { line: 3, .. }), "{e}");
        let e = Instance::parse("tap 2\n").unwrap_err();
        assert!(matches!(e, TapError::Parse { line: 1, .. }));
        let e = Instance::parse("tap 1\nnode a\nagent 1 a q\n").unwrap_err();
        assert!(matches!(e, TapError::Parse { line: 3, .. }));
        let e = Instance::parse("tap 1\nnode a\nnode b\nedge a b one 1 0\n").unwrap_err();
        assert!(matches!(e, TapError::Parse { line: 4, .. }));
    }

    #[test]
    fn duplicate_agents_rejected() {
        assert!(Instance::parse("tap 1\nnode a\nagent 1 a a\nagent 1 a a\n").is_err());
    }
}
