//! Route planning for street-sprinkler fleets: multi-depot arc routing on
//! mixed road graphs (one-way and two-way demand streets), solved with an
//! adaptive large neighborhood search, plus mid-operation re-planning when
//! new sprinkling demands arrive with service windows.
//!
//! The crate is generic over its scalar type (see [`scalar::Scalar`]);
//! the aliases at the bottom pin everything to `f64`, which is what the
//! CLI uses.

pub mod alns;
pub mod config;
pub mod construct;
pub mod dynamic;
pub mod io;
pub mod network;
pub mod operators;
pub mod scalar;
pub mod solution;
pub mod verify;

pub use alns::{run_alns, AlnsOutcome};
pub use config::{SolverConfig, Variant};
pub use construct::{balance_workload, fleet_size, initial_solution};
pub use dynamic::{project_state, replan, DemandEvent, ReplanOutcome, ServiceLog};
pub use network::{build_network, LinkId, MixedNetwork, NetworkSpec, NodeId};
pub use scalar::Scalar;
pub use solution::{
    Direction, ObjectiveBreakdown, Route, ServiceTask, Solution, Stage, Violation,
};
pub use verify::{audit_solution, brute_force_optimum};

/// Default scalar for the CLI and the concrete aliases below.
pub type DefaultScalar = f64;

pub type NetworkF64 = network::MixedNetwork<DefaultScalar>;
pub type SolutionF64 = solution::Solution<DefaultScalar>;
pub type ConfigF64 = config::SolverConfig<DefaultScalar>;
pub type PlanDocumentF64 = io::PlanDocument<DefaultScalar>;
pub type DemandEventF64 = dynamic::DemandEvent<DefaultScalar>;
