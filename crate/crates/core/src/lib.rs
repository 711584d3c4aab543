//! Production-inventory avalanches on directed supplier-client networks.
//!
//! Firms hold integer inventories and split orders equally among their
//! suppliers. A single unit of external demand can cascade upstream through
//! the network; the total production it triggers is the avalanche size.
//!
//! - [`network`]: firm graphs, generators, edge-list ingestion, degree CCDFs.
//! - [`dynamics`]: one avalanche: batch production, loop avoidance, inventory renewal.
//! - [`simulation`]: repeated demand events, seeding, warm-up, replicas.
//! - [`stats`]: CCDFs, Hill exponent, industry means, involvement, correlation.
//! - [`iotable`]: Leontief inverse and sector multipliers.

pub mod config;
pub mod dynamics;
pub mod fmt;
pub mod iotable;
pub mod network;
pub mod simulation;
pub mod stats;

pub use dynamics::{
    production_amount, propagate_avalanche, propagate_avalanche_into, required_batches,
    AvalancheRecord, FirmStep, InventoryState, PropagationScratch,
};
pub use iotable::{IoTable, IoTableError, Reduction};
pub use network::{
    Degree, FirmId, FirmNetwork, IndustryId, IndustryTaxonomy, NetworkError, TaxonomyLevel,
    UNKNOWN_INDUSTRY,
};
pub use simulation::{
    run_experiment, InventoryInit, RecordMode, RunSummary, SimulationConfig, SimulationError,
    SourceMode,
};
pub use stats::StatsError;
