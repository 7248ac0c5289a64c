mod exact;
mod ga;
mod nearest;
mod plan;
mod rolling;
mod routing;
mod sa;
mod window;

pub use exact::{exact_solve, ExactError, ExactLimits};
pub use ga::{ga_solve, ga_solve_traced, GAParams};
pub use nearest::{nearest_act, NearestPolicy};
pub use plan::{Plan, PlanError, PlanStop, Totals};
pub use rolling::{Degradation, RhConfig, RollingHorizonPolicy, StaticSolver};
pub use routing::{decode, evaluate, Genome, Task, TaskKind};
pub use sa::{sa_solve, sa_solve_traced, ParamError, SAParams};
pub use window::{
    build_static_window, random_instance, InstanceError, StaticInstance, StaticRequest,
    StaticVehicle,
};
