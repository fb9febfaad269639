//! End-to-end runs: build the graphs and model, tighten, warm start, solve
//! and decode. Shared by the command line, the benches and the tests.

use std::time::Instant as Clock;

use serde::{Deserialize, Serialize};

use crate::bnc::{solve_milp, SolveResult, SolverConfig};
use crate::cuts::{self, CutConfig, CutFamily, CutPool, Pd3Variant};
use crate::formulation::{build_model, solution_to_plan, warm_start_assignment, BuildOptions, MilpModel, Precedence};
use crate::graph::{Flavor, GraphConfig, Graphs};
use crate::lp::{LpParams, LpStatus, Simplex};
use crate::model::Instance;
use crate::routes::Plan;
use crate::warmstart::greedy_warm_start;
use crate::Result;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub build: BuildOptions,
    pub graph: GraphConfig,
    /// Families separated during the search.
    pub cuts: Option<CutConfig>,
    pub warm_start: bool,
    pub solver: SolverConfig,
}

impl RunOptions {
    pub fn new(flavor: Flavor) -> Self {
        RunOptions {
            build: BuildOptions::new(flavor),
            graph: GraphConfig::pruned(),
            cuts: None,
            warm_start: false,
            solver: SolverConfig::default(),
        }
    }
}

pub struct Run {
    pub graphs: Graphs,
    pub model: MilpModel,
    pub pool_size: usize,
    /// Cost of the greedy plan when one was requested and found.
    pub warm_start_cost: Option<i64>,
    pub result: SolveResult,
    pub plan: Option<Plan>,
}

/// Solves an instance with branch-and-cut.
pub fn solve_instance(inst: &Instance, opts: &RunOptions) -> Result<Run> {
    inst.validate()?;
    let graphs = Graphs::build(inst, opts.build.flavor, &opts.graph);
    let model = build_model(inst, &graphs, opts.build);
    let pool = match &opts.cuts {
        Some(cfg) => Some(cuts::generate(inst, &graphs, &model, cfg)?),
        None => None,
    };
    let mut solver = opts.solver.clone();
    let mut warm_start_cost = None;
    if opts.warm_start {
        match greedy_warm_start(inst, &graphs) {
            Some(plan) => match warm_start_assignment(&graphs, &model, &plan) {
                Ok(x) => {
                    warm_start_cost = Some(plan.cost(&graphs.lt, &graphs.ltx).total);
                    solver.incumbent = Some(x);
                }
                Err(e) => log::warn!("warm start does not fit the model: {e}"),
            },
            None => log::info!("greedy warm start found no plan"),
        }
    }
    let result = solve_milp(&model, pool.as_ref(), &solver);
    let plan = match &result.x {
        Some(x) => Some(solution_to_plan(inst, &graphs, &model, x)?),
        None => None,
    };
    Ok(Run {
        graphs,
        model,
        pool_size: pool.map_or(0, |p| p.len()),
        warm_start_cost,
        result,
        plan,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relaxation {
    pub status: LpStatus,
    pub value: f64,
    pub vars: usize,
    pub rows: usize,
    /// Inequalities added on top of the model rows.
    pub cuts: usize,
    pub iterations: usize,
}

/// LP relaxation of `model` with every inequality of `pool` added.
pub fn relax_model(model: &MilpModel, pool: Option<&CutPool>) -> Relaxation {
    let mut p = model.to_lp();
    let extra = pool.map(|p| p.rows()).unwrap_or_default();
    for r in &extra {
        let (lo, hi) = r.sense.bounds(r.rhs);
        p.add_row(r.coeffs.clone(), lo, hi);
    }
    let mut sx = Simplex::new(&p, LpParams::default());
    let status = sx.solve();
    Relaxation {
        status,
        value: if status == LpStatus::Optimal { sx.objective() } else { f64::NAN },
        vars: p.num_cols(),
        rows: p.num_rows(),
        cuts: extra.len(),
        iterations: sx.iterations(),
    }
}

/// Builds and relaxes in one go.
pub fn relax(inst: &Instance, build: BuildOptions, cuts: Option<&CutConfig>) -> Result<Relaxation> {
    inst.validate()?;
    let graphs = Graphs::build(inst, build.flavor, &GraphConfig::pruned());
    let model = build_model(inst, &graphs, build);
    let pool = match cuts {
        Some(cfg) => Some(cuts::generate(inst, &graphs, &model, cfg)?),
        None => None,
    };
    Ok(relax_model(&model, pool.as_ref()))
}

/// Relative gap in percent between an optimum and a lower bound. Gaps
/// below 1e-7 percent are LP round-off and reported as zero.
pub fn root_gap(optimum: f64, bound: f64) -> f64 {
    if optimum.abs() < 1e-9 {
        return 0.0;
    }
    let g = 100.0 * (optimum - bound) / optimum.abs();
    if g < 1e-7 {
        0.0
    } else {
        g
    }
}

/// One line of a root-node experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootRow {
    pub formulation: String,
    pub ineq_count: usize,
    pub time_s: f64,
    pub bound: f64,
}

/// Display name of a formulation with one cut family, e.g. `LTC + PD3-A`
/// or `LTR + SEC1-R3`.
pub fn formulation_label(build: &BuildOptions, family: Option<CutFamily>, cfg: &CutConfig) -> String {
    let mut s = build.flavor.name().to_string();
    if build.precedence == Precedence::Prec {
        s.push_str(" + PREC*");
    }
    if let Some(f) = family {
        let tag = match f {
            CutFamily::Pd3 => {
                let v = match cfg.pd3_variant {
                    Pd3Variant::A => "A",
                    Pd3Variant::B => "B",
                    Pd3Variant::Full => "F",
                };
                format!("PD3-V{}-{v}", cfg.pd3_k)
            }
            CutFamily::Sec1 | CutFamily::Sec2 => format!("{}-R{}", f.name().to_uppercase(), cfg.sec_k),
            _ => f.name().to_uppercase(),
        };
        s.push_str(" + ");
        s.push_str(&tag);
    }
    s
}

/// Root bound of a formulation with all inequalities of one family (or
/// none) added. The time covers graph and model construction, cut
/// generation and the LP.
pub fn root_experiment(inst: &Instance, build: BuildOptions, family: Option<CutFamily>, cfg: &CutConfig) -> Result<RootRow> {
    let t = Clock::now();
    let graphs = Graphs::build(inst, build.flavor, &GraphConfig::pruned());
    let model = build_model(inst, &graphs, build);
    let pool = match family {
        Some(f) => Some(cuts::generate(
            inst,
            &graphs,
            &model,
            &CutConfig {
                families: vec![f],
                ..cfg.clone()
            },
        )?),
        None => None,
    };
    let r = relax_model(&model, pool.as_ref());
    Ok(RootRow {
        formulation: formulation_label(&build, family, cfg),
        ineq_count: r.cuts,
        time_s: t.elapsed().as_secs_f64(),
        bound: r.value,
    })
}
