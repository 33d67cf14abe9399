//! Moneyless, strategyproof traffic assignment over capacitated road
//! networks.
//!
//! Agents at public origins hold private destinations. Mechanisms assign
//! each agent a path to their declared destination without exceeding edge
//! capacities; an agent's cost is the weight of their cheapest path to their
//! true destination given everyone else's assignment.
//!
//! - [`network`]: graphs, residual capacities, path search, time expansion
//! - [`mechanisms`]: serial dictatorship and variants, the exact optimum
//! - [`audit`]: manipulation, Pareto, non-bossiness and capacity checks
//! - [`instances`]: canonical and random instance generators
//! - [`bench`]: DIMACS ingestion and the capacity-augmentation sweep

pub mod audit;
pub mod bench;
pub mod error;
pub mod instance;
pub mod instances;
pub mod mechanisms;
pub mod network;

pub use error::{Result, TapError};
pub use instance::{AgentProfile, Instance};
pub use mechanisms::{AgentOrder, Allocation, Mechanism};
pub use network::{EdgeId, NodeId, Path, RoadNetwork};
