//! `longhaul`: generate, inspect and solve joint truck routing and driver
//! scheduling instances.

mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use longhaul_core::io::{self, instance_to_json, plan_from_json, read_instance, write_plan};
use longhaul_core::pipeline::formulation_label;
use longhaul_core::{
    build_model, cuts, exhaustive_solve, generate, root_experiment, root_gap, solve_instance, BuildOptions, CutConfig, CutFamily,
    Flavor, GenSpec, GraphConfig, Graphs, OracleBudget, OracleOutcome, Pd3Variant, Precedence, RunOptions, SolveStatus, SyncMode,
};

use report::{CompareRow, CsvOut, RootCsvRow, SolveRow};

#[derive(Parser)]
#[command(name = "longhaul", version, about = "Exact truck routing and driver scheduling on time-expanded networks")]
struct Cli {
    /// Report failures as a JSON object on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw a seeded instance.
    Generate(GenerateArgs),
    /// Check an instance, or a plan against its instance.
    Validate {
        file: PathBuf,
        /// Treat FILE as a plan for this instance.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Write the integer program as an LP file.
    Build {
        instance: PathBuf,
        #[command(flatten)]
        form: FormArgs,
        #[command(flatten)]
        cuts: CutArgs,
        /// Drop integrality.
        #[arg(long)]
        relaxed: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Solve the linear relaxation.
    Relax {
        instance: PathBuf,
        #[command(flatten)]
        form: FormArgs,
        #[command(flatten)]
        cuts: CutArgs,
    },
    /// Branch-and-cut; prints a CSV summary row.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        form: FormArgs,
        #[command(flatten)]
        cuts: CutArgs,
        #[command(flatten)]
        limits: LimitArgs,
        /// Start from the greedy plan.
        #[arg(long)]
        warm_start: bool,
        #[arg(long)]
        plan_out: Option<PathBuf>,
        #[arg(long)]
        result_out: Option<PathBuf>,
        /// Omit the CSV header line.
        #[arg(long)]
        no_header: bool,
    },
    /// Exhaustive search, for tiny instances.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        plan_out: Option<PathBuf>,
        #[arg(long, default_value_t = 5_000_000)]
        max_states: usize,
        /// Seconds.
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Root-node effect of cut families; one CSV row per family.
    Cuts {
        instance: PathBuf,
        #[command(flatten)]
        form: FormArgs,
        /// Comma-separated families (prec, pd1, pd2, pd3, sec1, sec2).
        #[arg(long, value_delimiter = ',', required = true)]
        families: Vec<String>,
        #[command(flatten)]
        params: CutParams,
        /// Known optimum; solved with branch-and-cut otherwise.
        #[arg(long)]
        optimum: Option<f64>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Solve instances with every formulation; one CSV row per formulation.
    Compare {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = SyncArg::TwoSided)]
        sync: SyncArg,
        #[command(flatten)]
        limits: LimitArgs,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// tiny, desk, s1, s2, s3, s4 or s5.
    #[arg(long, default_value = "desk")]
    preset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Full generator spec as JSON; overrides the preset.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    locations: Option<usize>,
    #[arg(long)]
    requests: Option<usize>,
    #[arg(long)]
    days: Option<usize>,
    #[arg(long)]
    instants_per_day: Option<usize>,
    #[arg(long)]
    trucks: Option<usize>,
    #[arg(long)]
    drivers: Option<usize>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Lt,
    Ltc,
    Ltr,
}

#[derive(Clone, Copy, ValueEnum)]
enum SyncArg {
    TwoSided,
    Sync1,
    Sync2,
}

impl From<SyncArg> for SyncMode {
    fn from(s: SyncArg) -> Self {
        match s {
            SyncArg::TwoSided => SyncMode::TwoSided,
            SyncArg::Sync1 => SyncMode::Sync1,
            SyncArg::Sync2 => SyncMode::Sync2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    A,
    B,
    Full,
}

#[derive(Args)]
struct FormArgs {
    #[arg(long, value_enum, default_value_t = FlavorArg::Ltr)]
    flavor: FlavorArg,
    #[arg(long, value_enum, default_value_t = SyncArg::TwoSided)]
    sync: SyncArg,
    /// Per-instant precedence rows instead of per-arc ones.
    #[arg(long)]
    prec: bool,
}

impl FormArgs {
    fn build(&self) -> BuildOptions {
        BuildOptions {
            flavor: match self.flavor {
                FlavorArg::Lt => Flavor::Lt,
                FlavorArg::Ltc => Flavor::Ltc,
                FlavorArg::Ltr => Flavor::Ltr,
            },
            precedence: if self.prec { Precedence::Prec } else { Precedence::Original },
            sync: self.sync.into(),
        }
    }
}

#[derive(Args)]
struct CutParams {
    /// Largest truck subset for pd3.
    #[arg(long, default_value_t = 2)]
    pd3_k: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::A)]
    pd3_variant: VariantArg,
    /// Largest request subset for sec1 and sec2.
    #[arg(long, default_value_t = 3)]
    sec_k: usize,
}

#[derive(Args)]
struct CutArgs {
    /// Comma-separated cut families to add (prec, pd1, pd2, pd3, sec1, sec2, all).
    #[arg(long, value_delimiter = ',')]
    cuts: Vec<String>,
    #[command(flatten)]
    params: CutParams,
}

#[derive(Args)]
struct LimitArgs {
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<usize>,
}

/// A failure with its exit code.
struct Fail {
    code: u8,
    msg: String,
}

impl Fail {
    fn input(msg: impl ToString) -> Fail {
        Fail { code: 4, msg: msg.to_string() }
    }
}

impl From<longhaul_core::Error> for Fail {
    fn from(e: longhaul_core::Error) -> Self {
        use longhaul_core::Error as E;
        match e {
            E::BudgetExceeded => Fail { code: 3, msg: e.to_string() },
            _ => Fail::input(e),
        }
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail::input(e)
    }
}

impl From<csv::Error> for Fail {
    fn from(e: csv::Error) -> Self {
        Fail::input(e)
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail::input(e)
    }
}

const INFEASIBLE: u8 = 2;
const LIMIT: u8 = 3;

fn main() -> ExitCode {
    // Usage errors are input errors; clap's own code would read as infeasible.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Fail::input("").code } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if cli.json_errors {
                eprintln!("{}", serde_json::json!({ "error": f.msg, "code": f.code }));
            } else {
                eprintln!("error: {}", f.msg);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Cmd) -> Result<u8, Fail> {
    match cmd {
        Cmd::Generate(a) => cmd_generate(a),
        Cmd::Validate { file, instance } => cmd_validate(&file, instance.as_deref()),
        Cmd::Build {
            instance,
            form,
            cuts,
            relaxed,
            out,
        } => cmd_build(&instance, &form, &cuts, relaxed, out.as_deref()),
        Cmd::Relax { instance, form, cuts } => cmd_relax(&instance, &form, &cuts),
        Cmd::Solve {
            instance,
            form,
            cuts,
            limits,
            warm_start,
            plan_out,
            result_out,
            no_header,
        } => cmd_solve(&instance, &form, &cuts, &limits, warm_start, plan_out.as_deref(), result_out.as_deref(), no_header),
        Cmd::Oracle {
            instance,
            plan_out,
            max_states,
            time_limit,
        } => cmd_oracle(&instance, plan_out.as_deref(), max_states, time_limit),
        Cmd::Cuts {
            instance,
            form,
            families,
            params,
            optimum,
            limits,
        } => cmd_cuts(&instance, &form, &families, &params, optimum, &limits),
        Cmd::Compare { instances, sync, limits } => cmd_compare(&instances, sync, &limits),
    }
}

fn output(path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn parse_families(names: &[String]) -> Result<Vec<CutFamily>, Fail> {
    let mut out = Vec::new();
    for n in names {
        if n.eq_ignore_ascii_case("all") {
            out.extend(CutFamily::ALL);
            continue;
        }
        out.push(CutFamily::parse(n).ok_or_else(|| Fail::input(format!("unknown cut family {n}")))?);
    }
    out.dedup();
    Ok(out)
}

fn cut_config(families: Vec<CutFamily>, p: &CutParams) -> CutConfig {
    CutConfig {
        families,
        pd3_k: p.pd3_k,
        pd3_variant: match p.pd3_variant {
            VariantArg::A => Pd3Variant::A,
            VariantArg::B => Pd3Variant::B,
            VariantArg::Full => Pd3Variant::Full,
        },
        sec_k: p.sec_k,
    }
}

fn optional_cuts(c: &CutArgs) -> Result<Option<CutConfig>, Fail> {
    let fams = parse_families(&c.cuts)?;
    Ok((!fams.is_empty()).then(|| cut_config(fams, &c.params)))
}

fn solver_limits(l: &LimitArgs) -> Result<(Option<Duration>, Option<usize>), Fail> {
    let t = match l.time_limit {
        Some(s) if !(s >= 0.0 && s.is_finite()) => return Err(Fail::input("time limit must be a nonnegative number of seconds")),
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    Ok((t, l.node_limit))
}

fn cmd_generate(a: GenerateArgs) -> Result<u8, Fail> {
    let mut spec = match &a.spec {
        Some(p) => serde_json::from_str::<GenSpec>(&std::fs::read_to_string(p)?)?,
        None => GenSpec::preset(&a.preset, a.seed)?,
    };
    let fields = [
        (a.locations, &mut spec.locations),
        (a.requests, &mut spec.requests),
        (a.days, &mut spec.days),
        (a.instants_per_day, &mut spec.instants_per_day),
        (a.trucks, &mut spec.trucks),
        (a.drivers, &mut spec.drivers),
    ];
    for (v, slot) in fields {
        if let Some(v) = v {
            *slot = v;
        }
    }
    let inst = generate(&spec)?;
    output(a.out.as_deref(), &instance_to_json(&inst)?)?;
    Ok(0)
}

fn cmd_validate(file: &Path, instance: Option<&Path>) -> Result<u8, Fail> {
    let Some(ip) = instance else {
        let inst = read_instance(file)?;
        println!(
            "ok: instance {} with {} locations, {} requests, {} trucks, {} drivers, {} instants",
            inst.name,
            inst.num_locations(),
            inst.num_requests(),
            inst.num_trucks(),
            inst.num_drivers(),
            inst.horizon.last() + 1
        );
        return Ok(0);
    };
    let inst = read_instance(ip)?;
    let plan = plan_from_json(&std::fs::read_to_string(file)?)?;
    let graphs = Graphs::build(&inst, Flavor::Lt, &GraphConfig::unpruned());
    let bad = plan.violations(&inst, &graphs.lt, &graphs.ltx);
    if bad.is_empty() {
        let c = plan.cost(&graphs.lt, &graphs.ltx);
        println!("ok: plan cost {} (trips {}, taxis {}, penalties {})", c.total, c.trips, c.taxis, c.penalties);
        return Ok(0);
    }
    for v in &bad {
        println!("violation: {v:?}");
    }
    Err(Fail {
        code: INFEASIBLE,
        msg: format!("plan has {} violations", bad.len()),
    })
}

fn cmd_build(path: &Path, form: &FormArgs, cut_args: &CutArgs, relaxed: bool, out: Option<&Path>) -> Result<u8, Fail> {
    let inst = read_instance(path)?;
    let graphs = Graphs::build(&inst, form.build().flavor, &GraphConfig::pruned());
    let mut model = build_model(&inst, &graphs, form.build());
    if relaxed {
        model = model.lp_relaxation();
    }
    let pool = match optional_cuts(cut_args)? {
        Some(cfg) => Some(cuts::generate(&inst, &graphs, &model, &cfg)?),
        None => None,
    };
    output(out, &io::emit_lp(&model, pool.as_ref()))?;
    Ok(0)
}

fn cmd_relax(path: &Path, form: &FormArgs, cut_args: &CutArgs) -> Result<u8, Fail> {
    let inst = read_instance(path)?;
    let r = longhaul_core::relax(&inst, form.build(), optional_cuts(cut_args)?.as_ref())?;
    println!("{}", serde_json::to_string(&r)?);
    Ok(match r.status {
        longhaul_core::lp::LpStatus::Optimal => 0,
        longhaul_core::lp::LpStatus::Infeasible => INFEASIBLE,
        _ => LIMIT,
    })
}

#[derive(Serialize)]
struct ResultFile<'a> {
    schema_version: u32,
    instance: &'a str,
    formulation: String,
    status: SolveStatus,
    objective: Option<f64>,
    bound: f64,
    root_lp: f64,
    root_bound: f64,
    nodes: usize,
    cuts_added: usize,
    pool_size: usize,
    lp_iterations: usize,
    warm_start_cost: Option<i64>,
    vars: usize,
    rows: usize,
}

fn status_code(s: SolveStatus) -> u8 {
    match s {
        SolveStatus::Optimal => 0,
        SolveStatus::Infeasible => INFEASIBLE,
        SolveStatus::Feasible | SolveStatus::LimitReached => LIMIT,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    path: &Path,
    form: &FormArgs,
    cut_args: &CutArgs,
    limits: &LimitArgs,
    warm_start: bool,
    plan_out: Option<&Path>,
    result_out: Option<&Path>,
    no_header: bool,
) -> Result<u8, Fail> {
    let inst = read_instance(path)?;
    let mut opts = RunOptions::new(form.build().flavor);
    opts.build = form.build();
    opts.cuts = optional_cuts(cut_args)?;
    opts.warm_start = warm_start;
    (opts.solver.time_limit, opts.solver.node_limit) = solver_limits(limits)?;
    let run = solve_instance(&inst, &opts)?;
    let r = &run.result;
    let formulation = match &opts.cuts {
        Some(c) => format!(
            "{} + {}",
            formulation_label(&opts.build, None, c),
            c.families.iter().map(|f| f.name().to_uppercase()).collect::<Vec<_>>().join(" + ")
        ),
        None => formulation_label(&opts.build, None, &CutConfig::default()),
    };
    if let (Some(p), Some(plan)) = (plan_out, &run.plan) {
        write_plan(p, plan)?;
    }
    if let Some(p) = result_out {
        let file = ResultFile {
            schema_version: io::SCHEMA_VERSION,
            instance: &inst.name,
            formulation: formulation.clone(),
            status: r.status,
            objective: r.objective,
            bound: r.bound,
            root_lp: r.root_lp,
            root_bound: r.root_bound,
            nodes: r.nodes,
            cuts_added: r.cuts_added,
            pool_size: run.pool_size,
            lp_iterations: r.lp_iterations,
            warm_start_cost: run.warm_start_cost,
            vars: run.model.num_vars(),
            rows: run.model.num_rows(),
        };
        std::fs::write(p, serde_json::to_string_pretty(&file)? + "\n")?;
    }
    let mut csv = CsvOut::stdout(!no_header);
    csv.row(&SolveRow {
        instance: inst.name.clone(),
        formulation,
        status: format!("{:?}", r.status),
        objective: r.objective,
        bound: r.bound,
        gap_pct: r.gap().map(|g| 100.0 * g),
        root_lp: r.root_lp,
        root_bound: r.root_bound,
        nodes: r.nodes,
        cuts_added: r.cuts_added,
        time_s: r.seconds,
    })?;
    csv.flush()?;
    Ok(status_code(r.status))
}

fn cmd_oracle(path: &Path, plan_out: Option<&Path>, max_states: usize, time_limit: Option<f64>) -> Result<u8, Fail> {
    let inst = read_instance(path)?;
    let budget = OracleBudget {
        max_states,
        time_limit: time_limit.map(Duration::from_secs_f64),
        ..OracleBudget::default()
    };
    let graphs = Graphs::build(&inst, Flavor::Lt, &GraphConfig::unpruned());
    let ub = longhaul_core::greedy_warm_start(&inst, &graphs).map(|p| p.cost(&graphs.lt, &graphs.ltx).total);
    match exhaustive_solve(&inst, &budget, ub)? {
        OracleOutcome::Optimal { value, plan } => {
            println!("optimal {value}");
            if let Some(p) = plan_out {
                write_plan(p, &plan)?;
            }
            Ok(0)
        }
        OracleOutcome::Infeasible => {
            println!("infeasible");
            Ok(INFEASIBLE)
        }
    }
}

/// Optimum used for root gaps: given, or branch-and-cut on LTR.
fn reference_optimum(inst: &longhaul_core::Instance, given: Option<f64>, limits: &LimitArgs) -> Result<(f64, bool), Fail> {
    if let Some(v) = given {
        return Ok((v, true));
    }
    let mut opts = RunOptions::new(Flavor::Ltr);
    opts.warm_start = true;
    (opts.solver.time_limit, opts.solver.node_limit) = solver_limits(limits)?;
    let run = solve_instance(inst, &opts)?;
    match (run.result.status, run.result.objective) {
        (SolveStatus::Infeasible, _) => Err(Fail {
            code: INFEASIBLE,
            msg: "instance is infeasible".into(),
        }),
        (s, Some(v)) => Ok((v, s == SolveStatus::Optimal)),
        (_, None) => Err(Fail {
            code: LIMIT,
            msg: "no feasible solution within the limits".into(),
        }),
    }
}

fn cmd_cuts(
    path: &Path,
    form: &FormArgs,
    families: &[String],
    params: &CutParams,
    optimum: Option<f64>,
    limits: &LimitArgs,
) -> Result<u8, Fail> {
    let inst = read_instance(path)?;
    let fams = parse_families(families)?;
    let (opt, proven) = reference_optimum(&inst, optimum, limits)?;
    if !proven {
        log::warn!("root gaps are relative to the best known value {opt}, not a proven optimum");
    }
    let cfg = cut_config(Vec::new(), params);
    let mut csv = CsvOut::stdout(true);
    let mut infeasible = false;
    for fam in std::iter::once(None).chain(fams.into_iter().map(Some)) {
        let row = root_experiment(&inst, form.build(), fam, &cfg)?;
        infeasible |= !row.bound.is_finite();
        csv.row(&RootCsvRow {
            instance: inst.name.clone(),
            formulation: row.formulation,
            ineq_count: row.ineq_count,
            time_s: row.time_s,
            root_gap: row.bound.is_finite().then(|| root_gap(opt, row.bound)),
        })?;
    }
    csv.flush()?;
    Ok(if infeasible {
        INFEASIBLE
    } else if proven {
        0
    } else {
        LIMIT
    })
}

fn cmd_compare(paths: &[PathBuf], sync: SyncArg, limits: &LimitArgs) -> Result<u8, Fail> {
    let insts = paths.iter().map(|p| read_instance(p)).collect::<Result<Vec<_>, _>>()?;
    let (time_limit, node_limit) = solver_limits(limits)?;
    let mut csv = CsvOut::stdout(true);
    for flavor in [Flavor::Lt, Flavor::Ltc, Flavor::Ltr] {
        let mut acc = report::CompareAcc::default();
        for inst in &insts {
            let mut opts = RunOptions::new(flavor);
            opts.build.sync = sync.into();
            opts.solver.time_limit = time_limit;
            opts.solver.node_limit = node_limit;
            let run = solve_instance(inst, &opts)?;
            acc.add(&run, time_limit.map(|t| t.as_secs_f64()));
        }
        csv.row(&CompareRow::from_acc(flavor.name(), &acc))?;
    }
    csv.flush()?;
    Ok(0)
}
