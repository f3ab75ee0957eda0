//! Experiment runner: truth generation, verified sweeps, and result tables.

mod campaign;
mod truth;

pub use campaign::{
    emit, emit_to_path, run_campaign, run_seed, CampaignResult, CampaignRow, ExperimentConfig, OutputFormat,
};
pub use truth::{capped_partition, count_capped_partitions, random_partition, TruthModel};
