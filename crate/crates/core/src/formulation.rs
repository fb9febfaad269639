//! Integer programs over a truck graph (LT, LTC or LTR) and the driver graph.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::graph::{ArcId, ArcKey, ArcKind, Flavor, Graphs, TimeGraph};
use crate::lp::{LpProblem, INF};
use crate::model::{Instance, Side};
use crate::routes::{decompose_flow, lift_route, lower_route, Plan};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Precedence {
    /// One row per delivery arc: pickups finished by its start cover it.
    Original,
    /// One row per delivery instant, leaving time to travel to the delivery.
    Prec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SyncMode {
    /// One or two drivers on every truck activity.
    TwoSided,
    /// Exactly one driver on pickups and deliveries.
    Sync1,
    /// At least one driver on pickups and deliveries.
    Sync2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub flavor: Flavor,
    pub precedence: Precedence,
    pub sync: SyncMode,
}

impl BuildOptions {
    pub fn new(flavor: Flavor) -> Self {
        BuildOptions {
            flavor,
            precedence: Precedence::Original,
            sync: SyncMode::TwoSided,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    Truck { truck: usize, arc: ArcId },
    Flow { arc: ArcId },
    Driver { driver: usize, arc: ArcId },
    DayOff { driver: usize, day: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Var {
    pub kind: VarKind,
    pub name: String,
    pub cost: f64,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn bounds(self, rhs: f64) -> (f64, f64) {
        match self {
            Sense::Le => (-INF, rhs),
            Sense::Ge => (rhs, INF),
            Sense::Eq => (rhs, rhs),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowFamily {
    TruckFlow,
    DriverFlow,
    PickOnce,
    Unpaired,
    Precedence,
    Prec,
    Capacity,
    DailyRest,
    WeeklyRest,
    DayOff,
    SyncLower,
    SyncUpper,
    SyncEqual,
    Cut,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub family: RowFamily,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, v)| v * x[j]).sum()
    }

    /// Amount by which `x` violates the row (zero when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let a = self.activity(x);
        match self.sense {
            Sense::Le => (a - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - a).max(0.0),
            Sense::Eq => (a - self.rhs).abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MilpModel {
    pub options: BuildOptions,
    pub vars: Vec<Var>,
    pub rows: Vec<Row>,
    /// `truck_vars[v][arc]` for LT and LTC.
    pub truck_vars: Vec<Vec<Option<usize>>>,
    /// `flow_vars[arc]` for LTR.
    pub flow_vars: Vec<Option<usize>>,
    pub driver_vars: Vec<Vec<Option<usize>>>,
    pub dayoff_vars: Vec<Vec<usize>>,
}

impl MilpModel {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Variables carrying truck `v` (or the aggregated flow) on a truck-graph arc.
    pub fn truck_arc_vars(&self, arc: ArcId) -> Vec<usize> {
        if self.options.flavor == Flavor::Ltr {
            self.flow_vars[arc].into_iter().collect()
        } else {
            self.truck_vars.iter().filter_map(|t| t[arc]).collect()
        }
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.vars.iter().zip(x).map(|(v, x)| v.cost * x).sum()
    }

    /// First row (or bound) violated by more than `tol`.
    pub fn first_violation(&self, x: &[f64], tol: f64) -> Option<String> {
        for (v, &xv) in self.vars.iter().zip(x) {
            if xv < v.lower - tol || xv > v.upper + tol {
                return Some(format!("bounds of {}", v.name));
            }
            if v.integer && (xv - xv.round()).abs() > tol {
                return Some(format!("integrality of {}", v.name));
            }
        }
        self.rows
            .iter()
            .find(|r| r.violation(x) > tol)
            .map(|r| r.name.clone())
    }

    /// The LP relaxation as a solver problem.
    pub fn to_lp(&self) -> LpProblem {
        let mut p = LpProblem::default();
        for v in &self.vars {
            p.add_col(v.cost, v.lower, v.upper);
        }
        for r in &self.rows {
            let (lo, hi) = r.sense.bounds(r.rhs);
            p.add_row(r.coeffs.clone(), lo, hi);
        }
        p
    }

    /// Same model with integrality dropped.
    pub fn lp_relaxation(&self) -> MilpModel {
        let mut m = self.clone();
        for v in &mut m.vars {
            v.integer = false;
        }
        m
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }
}

struct Builder {
    vars: Vec<Var>,
    rows: Vec<Row>,
}

impl Builder {
    fn var(&mut self, kind: VarKind, name: String, cost: f64, upper: f64) -> usize {
        self.vars.push(Var {
            kind,
            name,
            cost,
            lower: 0.0,
            upper,
            integer: true,
        });
        self.vars.len() - 1
    }

    fn row(&mut self, name: String, family: RowFamily, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.rows.push(Row {
            name,
            family,
            coeffs,
            sense,
            rhs,
        });
    }
}

fn flow_rows(b: &mut Builder, g: &TimeGraph, vars: &[Option<usize>], name: &dyn Fn(usize) -> String, family: RowFamily) {
    for n in 0..g.num_nodes() {
        if n == g.source || n == g.sink {
            continue;
        }
        let mut coeffs = Vec::new();
        for &a in &g.in_arcs[n] {
            if let Some(j) = vars[a] {
                coeffs.push((j, 1.0));
            }
        }
        for &a in &g.out_arcs[n] {
            if let Some(j) = vars[a] {
                coeffs.push((j, -1.0));
            }
        }
        if !coeffs.is_empty() {
            b.row(name(n), family, coeffs, Sense::Eq, 0.0);
        }
    }
}

/// Builds the integer program for the given flavor and options.
pub fn build_model(inst: &Instance, graphs: &Graphs, opts: BuildOptions) -> MilpModel {
    let g = &graphs.truck;
    assert_eq!(g.flavor, opts.flavor, "graphs were built for another flavor");
    let ltx = &graphs.ltx;
    let h = inst.horizon;
    let ipd = h.instants_per_day;
    let nv = inst.num_trucks();
    let nd = inst.num_drivers();
    let nr = inst.num_requests();
    let mut b = Builder {
        vars: Vec::new(),
        rows: Vec::new(),
    };

    let mut truck_vars = vec![vec![None; g.num_arcs()]; if opts.flavor == Flavor::Ltr { 0 } else { nv }];
    let mut flow_vars = vec![None; if opts.flavor == Flavor::Ltr { g.num_arcs() } else { 0 }];
    if opts.flavor == Flavor::Ltr {
        for (a, slot) in flow_vars.iter_mut().enumerate() {
            let cap = g.ltr_capacity(inst, a) as f64;
            *slot = Some(b.var(VarKind::Flow { arc: a }, format!("X_a{a}"), g.arcs[a].weight as f64, cap));
        }
    } else {
        for (v, vars) in truck_vars.iter_mut().enumerate() {
            for a in g.agent_arcs(inst.trucks[v]) {
                vars[a] = Some(b.var(
                    VarKind::Truck { truck: v, arc: a },
                    format!("X_v{v}_a{a}"),
                    g.arcs[a].weight as f64,
                    1.0,
                ));
            }
        }
    }
    let mut driver_vars = vec![vec![None; ltx.num_arcs()]; nd];
    for (d, vars) in driver_vars.iter_mut().enumerate() {
        for a in ltx.agent_arcs(inst.drivers[d]) {
            vars[a] = Some(b.var(
                VarKind::Driver { driver: d, arc: a },
                format!("Y_d{d}_a{a}"),
                ltx.arcs[a].weight as f64,
                1.0,
            ));
        }
    }
    let dayoff_vars: Vec<Vec<usize>> = (0..nd)
        .map(|d| {
            (0..h.days)
                .map(|j| b.var(VarKind::DayOff { driver: d, day: j }, format!("W_d{d}_j{j}"), 0.0, 1.0))
                .collect()
        })
        .collect();

    // Sum of truck variables over a set of truck-graph arcs, all trucks.
    let all_trucks = |arcs: &mut dyn Iterator<Item = ArcId>| -> Vec<usize> {
        let mut out = Vec::new();
        for a in arcs {
            if opts.flavor == Flavor::Ltr {
                out.extend(flow_vars[a]);
            } else {
                out.extend(truck_vars.iter().filter_map(|t| t[a]));
            }
        }
        out
    };

    // Flow conservation.
    if opts.flavor == Flavor::Ltr {
        flow_rows(&mut b, g, &flow_vars, &|n| format!("flow_n{n}"), RowFamily::TruckFlow);
    } else {
        for (v, vars) in truck_vars.iter().enumerate() {
            flow_rows(&mut b, g, vars, &|n| format!("flow_v{v}_n{n}"), RowFamily::TruckFlow);
        }
    }
    for (d, vars) in driver_vars.iter().enumerate() {
        flow_rows(&mut b, ltx, vars, &|n| format!("dflow_d{d}_n{n}"), RowFamily::DriverFlow);
    }

    // Each request picked up once.
    for r in 0..nr {
        let coeffs = all_trucks(&mut g.pickup_arcs[r].iter().copied())
            .into_iter()
            .map(|j| (j, 1.0))
            .collect();
        b.row(format!("pick_once_r{r}"), RowFamily::PickOnce, coeffs, Sense::Eq, 1.0);
    }

    if opts.flavor != Flavor::Ltr {
        // Same truck picks up and delivers.
        for (v, vars) in truck_vars.iter().enumerate() {
            for r in 0..nr {
                let mut coeffs: Vec<(usize, f64)> =
                    g.pickup_arcs[r].iter().filter_map(|&a| vars[a]).map(|j| (j, 1.0)).collect();
                coeffs.extend(g.delivery_arcs[r].iter().filter_map(|&a| vars[a]).map(|j| (j, -1.0)));
                if !coeffs.is_empty() {
                    b.row(format!("unpaired_v{v}_r{r}"), RowFamily::Unpaired, coeffs, Sense::Eq, 0.0);
                }
            }
        }
        match opts.precedence {
            Precedence::Original => {
                for r in 0..nr {
                    for &e in &g.delivery_arcs[r] {
                        let start = g.start(e);
                        let mut coeffs: Vec<(usize, f64)> = all_trucks(
                            &mut g.pickup_arcs[r].iter().copied().filter(|&p| g.end(p) <= start),
                        )
                        .into_iter()
                        .map(|j| (j, 1.0))
                        .collect();
                        coeffs.extend(all_trucks(&mut std::iter::once(e)).into_iter().map(|j| (j, -1.0)));
                        b.row(format!("prec_r{r}_a{e}"), RowFamily::Precedence, coeffs, Sense::Ge, 0.0);
                    }
                }
            }
            Precedence::Prec => {
                for row in prec_rows(inst, g, &all_trucks) {
                    b.rows.push(row);
                }
            }
        }
        if opts.flavor == Flavor::Lt {
            // Load never exceeds one; it can only grow when a pickup completes.
            let mut checks: Vec<usize> = (0..nr)
                .flat_map(|r| g.pickup_arcs[r].iter().map(|&a| g.end(a)))
                .collect();
            checks.sort_unstable();
            checks.dedup();
            for (v, vars) in truck_vars.iter().enumerate() {
                for &i in &checks {
                    let mut coeffs = Vec::new();
                    for r in 0..nr {
                        for &a in &g.pickup_arcs[r] {
                            if g.end(a) <= i {
                                coeffs.extend(vars[a].map(|j| (j, 1.0)));
                            }
                        }
                        for &a in &g.delivery_arcs[r] {
                            if g.end(a) <= i {
                                coeffs.extend(vars[a].map(|j| (j, -1.0)));
                            }
                        }
                    }
                    b.row(format!("cap_v{v}_i{i}"), RowFamily::Capacity, coeffs, Sense::Le, 1.0);
                }
            }
        }
    }

    // Driver rest.
    for (d, vars) in driver_vars.iter().enumerate() {
        for i in 0..=ipd * (h.days - 1) {
            let coeffs: Vec<(usize, f64)> = ltx
                .rest_arcs
                .iter()
                .filter(|&&a| (i..i + ipd).contains(&ltx.start(a)))
                .filter_map(|&a| vars[a])
                .map(|j| (j, 1.0))
                .collect();
            b.row(format!("daily_d{d}_i{i}"), RowFamily::DailyRest, coeffs, Sense::Ge, (ipd / 2) as f64);
        }
        if h.days >= 7 {
            for j in 0..=h.days - 7 {
                let coeffs = (j..j + 7).map(|k| (dayoff_vars[d][k], 1.0)).collect();
                b.row(format!("weekly_d{d}_j{j}"), RowFamily::WeeklyRest, coeffs, Sense::Ge, 1.0);
            }
        }
        for j in 0..h.days {
            let mut coeffs: Vec<(usize, f64)> = ltx
                .rest_arcs
                .iter()
                .filter(|&&a| h.day(ltx.start(a)) == j)
                .filter_map(|&a| vars[a])
                .map(|k| (k, 1.0))
                .collect();
            coeffs.push((dayoff_vars[d][j], -(ipd as f64)));
            b.row(format!("dayoff_d{d}_j{j}"), RowFamily::DayOff, coeffs, Sense::Ge, 0.0);
        }
    }

    // Synchronisation on every LTX work arc.
    let work: Vec<ArcId> = (0..ltx.num_arcs()).filter(|&a| ltx.arcs[a].kind.is_truck_work()).collect();
    for e in work {
        let xs = all_trucks(&mut g.arcs_with_key(&ltx.key(e)).iter().copied());
        let ys: Vec<usize> = driver_vars.iter().filter_map(|t| t[e]).collect();
        let service = ltx.arcs[e].kind != ArcKind::Trip;
        let mode = if service { opts.sync } else { SyncMode::TwoSided };
        let diff = |kx: f64| -> Vec<(usize, f64)> {
            ys.iter().map(|&j| (j, 1.0)).chain(xs.iter().map(|&j| (j, kx))).collect()
        };
        match mode {
            SyncMode::TwoSided => {
                b.row(format!("sync_lo_a{e}"), RowFamily::SyncLower, diff(-1.0), Sense::Ge, 0.0);
                b.row(format!("sync_hi_a{e}"), RowFamily::SyncUpper, diff(-2.0), Sense::Le, 0.0);
            }
            SyncMode::Sync1 => {
                b.row(format!("sync_eq_a{e}"), RowFamily::SyncEqual, diff(-1.0), Sense::Eq, 0.0);
            }
            SyncMode::Sync2 => {
                b.row(format!("sync_lo_a{e}"), RowFamily::SyncLower, diff(-1.0), Sense::Ge, 0.0);
            }
        }
    }

    MilpModel {
        options: opts,
        vars: b.vars,
        rows: b.rows,
        truck_vars,
        flow_vars,
        driver_vars,
        dayoff_vars,
    }
}

/// Precedence rows that leave travel time between pickup and delivery.
/// Travel times are shortest-path closures so the rows stay valid when the
/// table violates the triangle inequality.
fn prec_rows(inst: &Instance, g: &TimeGraph, all_trucks: &dyn Fn(&mut dyn Iterator<Item = ArcId>) -> Vec<usize>) -> Vec<Row> {
    let travel = inst.truck_time_closure();
    let mut rows = Vec::new();
    for (r, req) in inst.requests.iter().enumerate() {
        let len = travel[req.pickup.location][req.delivery.location];
        for i in inst.service_start_instants(r, Side::Delivery) {
            let mut coeffs: Vec<(usize, f64)> = all_trucks(
                &mut g.pickup_arcs[r].iter().copied().filter(|&p| g.end(p) + len <= i),
            )
            .into_iter()
            .map(|j| (j, 1.0))
            .collect();
            coeffs.extend(
                all_trucks(&mut g.delivery_arcs[r].iter().copied().filter(|&e| g.start(e) <= i))
                    .into_iter()
                    .map(|j| (j, -1.0)),
            );
            rows.push(Row {
                name: format!("precx_r{r}_i{i}"),
                family: RowFamily::Prec,
                coeffs,
                sense: Sense::Ge,
                rhs: 0.0,
            });
        }
    }
    rows
}

/// Encodes a plan as a variable assignment and checks it against every row.
pub fn warm_start_assignment(graphs: &Graphs, model: &MilpModel, plan: &Plan) -> Result<Vec<f64>> {
    let mut x = vec![0.0; model.num_vars()];
    let g = &graphs.truck;
    for (v, route) in plan.trucks.iter().enumerate() {
        let lifted = lift_route(&graphs.lt, g, route)?;
        for a in lifted {
            let j = if model.options.flavor == Flavor::Ltr {
                model.flow_vars[a]
            } else {
                model.truck_vars[v][a]
            };
            let j = j.ok_or_else(|| Error::PlanMismatch(format!("truck {v} cannot use arc {a}")))?;
            x[j] += 1.0;
        }
    }
    for (d, route) in plan.drivers.iter().enumerate() {
        for &a in route {
            let j = model.driver_vars[d][a]
                .ok_or_else(|| Error::PlanMismatch(format!("driver {d} cannot use arc {a}")))?;
            x[j] += 1.0;
        }
    }
    for (d, days) in plan.days_off.iter().enumerate() {
        for (j, &off) in days.iter().enumerate() {
            if off {
                x[model.dayoff_vars[d][j]] = 1.0;
            }
        }
    }
    match model.first_violation(&x, 1e-9) {
        Some(row) => Err(Error::InfeasibleAssignment(row)),
        None => Ok(x),
    }
}

fn follow(g: &TimeGraph, used: &[bool]) -> Result<Vec<ArcId>> {
    if !used.iter().any(|&u| u) {
        return Ok(Vec::new());
    }
    let mut route = Vec::new();
    let mut node = g.source;
    while node != g.sink {
        let Some(&a) = g.out_arcs[node].iter().find(|&&a| used[a]) else {
            return Err(Error::Decomposition(format!("path stops at node {node}")));
        };
        route.push(a);
        node = g.arcs[a].head;
    }
    if route.len() != used.iter().filter(|&&u| u).count() {
        return Err(Error::Decomposition("support is not a single path".into()));
    }
    Ok(route)
}

/// Under one-sided synchronisation a driver may sit on a service arc no truck
/// uses. Such a driver is resting in effect, so the arc becomes a rest chain.
fn release_idle_service(graphs: &Graphs, trucks: &[Vec<ArcId>], drivers: &mut [Vec<ArcId>]) {
    let (lt, ltx) = (&graphs.lt, &graphs.ltx);
    let mut free: HashMap<ArcKey, usize> = HashMap::new();
    for r in trucks {
        for &a in r {
            if lt.arcs[a].kind.service().is_some() {
                *free.entry(lt.key(a)).or_default() += 1;
            }
        }
    }
    for route in drivers.iter_mut() {
        let mut out = Vec::with_capacity(route.len());
        for &a in route.iter() {
            if ltx.arcs[a].kind.service().is_none() {
                out.push(a);
                continue;
            }
            let slot = free.entry(ltx.key(a)).or_default();
            if *slot > 0 {
                *slot -= 1;
                out.push(a);
                continue;
            }
            let mut node = ltx.arcs[a].tail;
            while node != ltx.arcs[a].head {
                let rest = ltx.out_arcs[node]
                    .iter()
                    .copied()
                    .find(|&b| ltx.arcs[b].kind == ArcKind::Rest)
                    .expect("rest arc along a service arc");
                out.push(rest);
                node = ltx.arcs[rest].head;
            }
        }
        *route = out;
    }
}

/// Decodes an integral assignment into a plan.
pub fn solution_to_plan(inst: &Instance, graphs: &Graphs, model: &MilpModel, x: &[f64]) -> Result<Plan> {
    let g = &graphs.truck;
    let on = |j: Option<usize>| j.map_or(false, |j| x[j] > 0.5);
    let trucks = if model.options.flavor == Flavor::Ltr {
        let flow: Vec<i64> = model
            .flow_vars
            .iter()
            .map(|j| j.map_or(0, |j| x[j].round() as i64))
            .collect();
        decompose_flow(g, inst, &flow)?
    } else {
        model
            .truck_vars
            .iter()
            .map(|vars| follow(g, &vars.iter().map(|&j| on(j)).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?
    };
    let trucks = trucks
        .iter()
        .map(|r| lower_route(g, &graphs.lt, r))
        .collect::<Result<Vec<_>>>()?;
    let mut drivers = model
        .driver_vars
        .iter()
        .map(|vars| follow(&graphs.ltx, &vars.iter().map(|&j| on(j)).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    release_idle_service(graphs, &trucks, &mut drivers);
    let days_off = model
        .dayoff_vars
        .iter()
        .map(|days| days.iter().map(|&j| x[j] > 0.5).collect())
        .collect();
    Ok(Plan {
        trucks,
        drivers,
        days_off,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphConfig;
    use crate::model::example_instance;
    use crate::routes::tests::{example_drivers_passenger, example_drivers_taxi, example_trucks};

    fn setup(flavor: Flavor) -> (Instance, Graphs) {
        let inst = example_instance();
        let graphs = Graphs::build(&inst, flavor, &GraphConfig::pruned());
        (inst, graphs)
    }

    fn plan(graphs: &Graphs, taxi: bool) -> Plan {
        Plan {
            trucks: example_trucks(&graphs.lt),
            drivers: if taxi {
                example_drivers_taxi(&graphs.ltx)
            } else {
                example_drivers_passenger(&graphs.ltx)
            },
            days_off: vec![vec![false]; 2],
        }
    }

    #[test]
    fn example_plans_are_feasible_assignments() {
        for flavor in Flavor::TRUCK {
            for precedence in [Precedence::Original, Precedence::Prec] {
                for sync in [SyncMode::TwoSided, SyncMode::Sync1, SyncMode::Sync2] {
                    if flavor == Flavor::Ltr && precedence == Precedence::Prec {
                        continue;
                    }
                    let (inst, graphs) = setup(flavor);
                    let opts = BuildOptions { flavor, precedence, sync };
                    let model = build_model(&inst, &graphs, opts);
                    for taxi in [true, false] {
                        let p = plan(&graphs, taxi);
                        let x = warm_start_assignment(&graphs, &model, &p)
                            .unwrap_or_else(|e| panic!("{flavor:?} {precedence:?} {sync:?} taxi={taxi}: {e}"));
                        let cost = model.objective(&x);
                        assert_eq!(cost, if taxi { 4.0 } else { 2.0 });
                        let back = solution_to_plan(&inst, &graphs, &model, &x).unwrap();
                        assert_eq!(back, p);
                    }
                }
            }
        }
    }

    #[test]
    fn sync1_rejects_two_drivers_loading() {
        let (inst, graphs) = setup(Flavor::Lt);
        let mut p = plan(&graphs, false);
        // Second driver joins the pickup of r2 instead of resting.
        let steps = [
            (ArcKind::Rest, 1),
            (ArcKind::Rest, 1),
            (ArcKind::Delivery(0), 1),
            (ArcKind::Pickup(1), 1),
            (ArcKind::Trip, 0),
            (ArcKind::Delivery(1), 0),
        ];
        p.drivers[1] = crate::routes::tests::walk(&graphs.ltx, 1, &steps);
        let two = build_model(&inst, &graphs, BuildOptions::new(Flavor::Lt));
        assert!(warm_start_assignment(&graphs, &two, &p).is_ok());
        let opts = BuildOptions {
            sync: SyncMode::Sync1,
            ..BuildOptions::new(Flavor::Lt)
        };
        let one = build_model(&inst, &graphs, opts);
        let err = warm_start_assignment(&graphs, &one, &p).unwrap_err();
        assert!(matches!(err, Error::InfeasibleAssignment(ref r) if r.starts_with("sync_eq")));
    }

    #[test]
    fn sizes_grow_with_flavor() {
        let mut counts = Vec::new();
        for flavor in Flavor::TRUCK {
            let (inst, graphs) = setup(flavor);
            let m = build_model(&inst, &graphs, BuildOptions::new(flavor));
            counts.push((m.num_vars(), m.num_rows()));
            assert!(m.rows.iter().all(|r| r.coeffs.iter().all(|&(j, _)| j < m.num_vars())));
        }
        assert!(counts[0].0 < counts[1].0);
    }

    #[test]
    fn names_are_unique() {
        for flavor in Flavor::TRUCK {
            let (inst, graphs) = setup(flavor);
            let m = build_model(&inst, &graphs, BuildOptions::new(flavor));
            let mut names: Vec<&str> = m.vars.iter().map(|v| v.name.as_str()).collect();
            names.extend(m.rows.iter().map(|r| r.name.as_str()));
            let n = names.len();
            names.sort_unstable();
            names.dedup();
            assert_eq!(names.len(), n);
        }
    }

    #[test]
    fn excess_capacity_plan_rejected_in_lt() {
        let (inst, graphs) = setup(Flavor::Lt);
        let lt = &graphs.lt;
        use ArcKind::*;
        let mut p = plan(&graphs, false);
        p.trucks[0] = crate::routes::tests::walk(
            lt,
            0,
            &[(Pickup(0), 0), (Rest, 0), (Trip, 1), (Pickup(1), 1), (Trip, 0), (Delivery(1), 0), (Trip, 1), (Delivery(0), 1)],
        );
        p.trucks[1] = Vec::new();
        let model = build_model(&inst, &graphs, BuildOptions::new(Flavor::Lt));
        // Driver rows fail first or the capacity row does; either way it is rejected.
        assert!(warm_start_assignment(&graphs, &model, &p).is_err());
        let mut x = vec![0.0; model.num_vars()];
        for &a in &p.trucks[0] {
            x[model.truck_vars[0][a].unwrap()] = 1.0;
        }
        let cap: Vec<_> = model.rows.iter().filter(|r| r.family == RowFamily::Capacity).collect();
        assert!(cap.iter().any(|r| r.violation(&x) > 0.5));
    }
}
