//! Workbench for the multi-vehicle dynamic pickup and delivery problem with
//! stochastic requests.
//!
//! - [`domain`]: stations, vehicles, requests, world state and feasibility.
//! - [`env`]: the per-slice scheduler (`reset`, `step`, masks, episodes).
//! - [`scenario`]: synthetic generator, request-log import, scenario files.
//! - [`prior`]: informative priors and the prior-sampling policy.
//! - [`solvers`]: nearest, SA, GA, exact oracle, rolling horizon.
//! - [`bench`]: batch runner and result tables.
//! - [`server`]: line-delimited JSON environment server.

pub mod bench;
pub mod domain;
pub mod env;
pub mod prior;
pub mod scenario;
pub mod server;
pub mod solvers;
