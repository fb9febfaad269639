//! Exact optimisation of joint truck routing and driver scheduling on
//! time-expanded networks.

pub mod bnc;
pub mod cuts;
pub mod error;
pub mod formulation;
pub mod generate;
pub mod graph;
pub mod io;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod routes;
pub mod warmstart;

pub use error::{Error, Result};
pub use graph::{arc_correspondence, Arc, ArcId, ArcKey, ArcKind, Cargo, Flavor, GraphConfig, Graphs, Node, NodeId, TimeGraph};
pub use model::{example_instance, Horizon, Instance, Request, Service, Side, TimeWindow};
pub use routes::{check_driver_route, check_sync, check_truck_route, decompose_flow, Agent, CostBreakdown, Plan, Violation};
pub use formulation::{build_model, solution_to_plan, warm_start_assignment, BuildOptions, MilpModel, Precedence, Row, RowFamily, Sense, SyncMode, Var, VarKind};
pub use cuts::{min_duration, Cut, CutConfig, CutFamily, CutPool, DurationMode, Pd3Variant};
pub use bnc::{solve_milp, SolveResult, SolveStatus, SolverConfig};
pub use oracle::{enumerate_truck_routes, exhaustive_solve, sample_plans, OracleBudget, OracleOutcome};
pub use warmstart::greedy_warm_start;
pub use generate::{generate, GenSpec};
pub use io::{emit_lp, emit_solution, parse_solution, read_instance, read_plan, read_solution, write_instance, write_lp, write_plan, LpFile};
pub use pipeline::{relax, relax_model, root_experiment, root_gap, solve_instance, Relaxation, RootRow, Run, RunOptions};
