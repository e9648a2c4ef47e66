//! Analytic cost modelling of mobility management strategies, with a
//! built-in Monte-Carlo validator.
//!
//! The model starts from two matrices: a weighted adjacency matrix of the
//! serving network over its Mobility Agents, and a handover intensity matrix
//! describing aggregated mobile-node movement between Mobility Access
//! Points. From these the crate derives every descriptor the cost functions
//! need (average link weight, HA depth, handover distance, neighbor degree,
//! junction distance, paging-area statistics and the mobility ratio),
//! evaluates closed-form signalling / processing / air-interface costs for
//! seven strategy families, optimizes tracking chain lengths and vertical
//! handover willingness, and cross-checks every analytic number against a
//! discrete-event simulation of the same protocols.
//!
//! Start with [`pipeline::ScenarioModel`] to derive everything from the two
//! matrices, then [`cost::cost`] / [`cost::total_cost_curve`] for strategy
//! comparison, [`tracking::optimize_h`] and [`vho::sweep_nu`] for the two
//! optimizers, and [`sim::run`] for the empirical side. The `examples/`
//! directory has one runnable program per capability; the `mobcost` binary
//! exposes the same flows over config files.

pub mod cli;
pub mod config;
pub mod cost;
pub mod error;
pub mod graph;
mod linalg;
pub mod mobility;
pub mod paging;
pub mod params;
pub mod pipeline;
pub mod sim;
pub mod tracking;
pub mod validate;
pub mod vho;

pub use cost::{CostBreakdown, CostClassWeights, CostConstants, Strategy, StrategyInputs};
pub use error::{Error, Result};
pub use graph::{all_pairs_distances, average_weight, AveragingMode, DistanceMatrix, NetworkGraph};
pub use mobility::{
    mobility_rates, stationary, stationary_ctmc, to_transition_matrix, MobilityRates, RateMatrix,
    StationaryDistribution, TransitionMatrix,
};
pub use paging::{plan_areas, plan_from_assignment, PagingPlan};
pub use params::{DerivedParams, Overrides, Provenance};
pub use pipeline::ScenarioModel;
pub use sim::{run as simulate, SimConfig, SimReport};
pub use tracking::{chain_statistics, optimize_h, ChainStatistics, TrackingPolicy};
pub use vho::{choice_probability, compose, sweep_nu, ChoiceForm, CompositeScenario, VhoResult};
