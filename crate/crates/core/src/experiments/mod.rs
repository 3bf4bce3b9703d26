//! Campaign runner: configuration, the seeded reproduction scenarios and
//! table output.

mod config;
mod scenarios;
mod table;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RfdaError};

pub use config::{ExperimentConfig, OffsetGrid, Scenario, TargetSpec};
pub use table::{emit, format_float, Column, ColumnData, OutputFormat, Table};

/// Everything needed to re-run a campaign bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub scenario: Scenario,
    pub seed: u64,
    pub code_version: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub tables: Vec<Table>,
    pub metadata: Metadata,
    pub wall_time_s: f64,
}

impl CampaignResult {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// Run the configured scenario on a pool of `config.threads` workers.
pub fn run(config: &ExperimentConfig) -> Result<CampaignResult> {
    config.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| RfdaError::Config(format!("cannot start worker pool: {e}")))?;
    let tables = pool.install(|| scenarios::dispatch(config))?;
    Ok(CampaignResult {
        tables,
        metadata: Metadata {
            scenario: config.scenario,
            seed: config.seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
        },
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
