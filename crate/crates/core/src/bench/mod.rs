//! Road-network ingestion and the capacity-augmentation experiment.

mod experiment;
mod input;
mod output;
mod synthetic;

pub use experiment::{
    run_experiment, ExperimentConfig, Population, ReferenceMode, ResultRow, RsdSampling, DEFAULT_GAMMAS,
};
pub use input::{extract_subgraph, parse_dimacs, parse_dimacs_str, CapacityPolicy, GraphStats};
pub use output::{csv_string, emit_csv, parse_csv, CSV_HEADER};
pub use synthetic::{rome_like_dimacs, synthetic_road_dimacs, ROME_ARCS, ROME_NODES};
