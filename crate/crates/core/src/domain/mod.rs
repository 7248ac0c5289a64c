//! Entity types of the pickup-and-delivery MDP, feasibility rules and the
//! objective arithmetic shared by every policy and solver.

mod graph;
mod objective;
mod scenario;
mod state;

pub use graph::{shortest_path_closure, MatrixError, StationGraph};
pub use objective::{objective_value, SliceRecord};
pub use scenario::{FleetEntry, ProfitMode, Request, Scenario, ScenarioError};
pub use state::{
    DomainError, JointAction, RequestAction, RequestState, RequestStatus, Vehicle, WorldState,
};
