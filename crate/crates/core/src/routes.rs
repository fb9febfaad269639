//! Plans, route feasibility checks and costs.
//!
//! A plan stores truck routes as arc ids of the plain (untagged) truck graph
//! and driver routes as arc ids of the driver graph. An empty truck route
//! means the truck is never used.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::graph::{ArcId, ArcKey, ArcKind, Cargo, Flavor, Graphs, TimeGraph};
use crate::model::{Instance, Side};
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub trucks: Vec<Vec<ArcId>>,
    pub drivers: Vec<Vec<ArcId>>,
    /// `days_off[d][j]` flags day `j` as a day off for driver `d`.
    pub days_off: Vec<Vec<bool>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Agent {
    Truck(usize),
    Driver(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    NotAPath { agent: Agent, position: usize },
    WrongArcKind { agent: Agent, arc: ArcId },
    RepeatedService { agent: Agent, request: usize, side: Side },
    UnpairedService { agent: Agent, request: usize },
    DisorderedService { agent: Agent, request: usize },
    ExcessCapacity { agent: Agent, instant: usize },
    DailyRest { driver: usize, window_start: usize, rest: usize },
    WeeklyRest { driver: usize, first_day: usize },
    DayOffNotRest { driver: usize, day: usize },
    Unsynchronised { key: String, trucks: usize, drivers: usize },
    Coverage { request: usize, pickups: usize },
    AgentCount { trucks: usize, drivers: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub trips: i64,
    pub penalties: i64,
    pub taxis: i64,
    pub total: i64,
}

fn check_path(g: &TimeGraph, agent: Agent, start_loc: usize, route: &[ArcId]) -> Option<Violation> {
    let bad = |position| Some(Violation::NotAPath { agent, position });
    let Some(&first) = route.first() else {
        return bad(0);
    };
    if route.iter().any(|&a| a >= g.num_arcs()) {
        let p = route.iter().position(|&a| a >= g.num_arcs()).unwrap();
        return bad(p);
    }
    if g.arcs[first].kind != ArcKind::Source || g.head_loc(first) != start_loc {
        return bad(0);
    }
    for (p, w) in route.windows(2).enumerate() {
        if g.arcs[w[0]].head != g.arcs[w[1]].tail {
            return bad(p + 1);
        }
    }
    if g.arcs[*route.last().unwrap()].head != g.sink {
        return bad(route.len() - 1);
    }
    None
}

/// Service-order violations of a sequence of arcs on one truck.
fn service_violations(g: &TimeGraph, agent: Agent, route: &[ArcId], nr: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut picked = vec![0usize; nr];
    let mut dropped = vec![0usize; nr];
    let mut load = 0i64;
    let mut over = false;
    for &a in route {
        match g.arcs[a].kind {
            ArcKind::Pickup(r) => {
                picked[r] += 1;
                if picked[r] == 2 {
                    out.push(Violation::RepeatedService {
                        agent,
                        request: r,
                        side: Side::Pickup,
                    });
                }
                load += 1;
                if load > 1 && !over {
                    over = true;
                    out.push(Violation::ExcessCapacity {
                        agent,
                        instant: g.start(a),
                    });
                }
            }
            ArcKind::Delivery(r) => {
                dropped[r] += 1;
                if dropped[r] == 2 {
                    out.push(Violation::RepeatedService {
                        agent,
                        request: r,
                        side: Side::Delivery,
                    });
                }
                if dropped[r] > picked[r]
                    && !out.iter().any(|v| {
                        matches!(v, Violation::DisorderedService { request, .. } if *request == r)
                    })
                {
                    out.push(Violation::DisorderedService { agent, request: r });
                }
                load -= 1;
            }
            _ => {}
        }
    }
    for r in 0..nr {
        if picked[r] != dropped[r] {
            out.push(Violation::UnpairedService { agent, request: r });
        }
    }
    out
}

/// Checks one truck route on a truck graph (LT, LTC or LTR). An empty route
/// is valid.
pub fn check_truck_route(g: &TimeGraph, truck: usize, start_loc: usize, route: &[ArcId]) -> Vec<Violation> {
    let agent = Agent::Truck(truck);
    if route.is_empty() {
        return Vec::new();
    }
    if let Some(v) = check_path(g, agent, start_loc, route) {
        return vec![v];
    }
    let mut out: Vec<Violation> = route
        .iter()
        .filter(|&&a| g.arcs[a].kind == ArcKind::Taxi)
        .map(|&arc| Violation::WrongArcKind { agent, arc })
        .collect();
    out.extend(service_violations(g, agent, route, g.num_requests));
    out
}

/// Rest instants of a driver route, indexed by instant.
pub fn rest_profile(ltx: &TimeGraph, route: &[ArcId]) -> Vec<bool> {
    let mut rest = vec![false; ltx.horizon.last()];
    for &a in route {
        if ltx.arcs[a].kind == ArcKind::Rest {
            rest[ltx.start(a)] = true;
        }
    }
    rest
}

/// Checks a driver route on the driver graph, including daily rest and, for
/// horizons of at least a week, the weekly day off.
pub fn check_driver_route(
    ltx: &TimeGraph,
    driver: usize,
    start_loc: usize,
    route: &[ArcId],
    days_off: &[bool],
) -> Vec<Violation> {
    let agent = Agent::Driver(driver);
    if let Some(v) = check_path(ltx, agent, start_loc, route) {
        return vec![v];
    }
    let h = ltx.horizon;
    let ipd = h.instants_per_day;
    let rest = rest_profile(ltx, route);
    let mut out = Vec::new();
    for i in 0..=ipd * (h.days - 1) {
        let count = rest[i..i + ipd].iter().filter(|&&x| x).count();
        if 2 * count < ipd {
            out.push(Violation::DailyRest {
                driver,
                window_start: i,
                rest: count,
            });
        }
    }
    let off = |j: usize| days_off.get(j).copied().unwrap_or(false);
    for j in 0..h.days {
        if off(j) && !rest[j * ipd..(j + 1) * ipd].iter().all(|&x| x) {
            out.push(Violation::DayOffNotRest { driver, day: j });
        }
    }
    if h.days >= 7 {
        for j in 0..=h.days - 7 {
            if !(j..j + 7).any(off) {
                out.push(Violation::WeeklyRest { driver, first_day: j });
            }
        }
    }
    out
}

fn key_label(k: &ArcKey) -> String {
    format!("{:?} {:?}->{:?}", k.kind, k.from, k.to)
}

/// Synchronisation between trucks and drivers plus request coverage.
pub fn check_sync(inst: &Instance, lt: &TimeGraph, ltx: &TimeGraph, plan: &Plan) -> Vec<Violation> {
    let mut trucks_on: HashMap<ArcKey, usize> = HashMap::new();
    let mut pickups = vec![0usize; inst.num_requests()];
    for route in &plan.trucks {
        for &a in route {
            if a >= lt.num_arcs() {
                continue;
            }
            if lt.arcs[a].kind.is_truck_work() {
                *trucks_on.entry(lt.key(a)).or_default() += 1;
            }
            if let ArcKind::Pickup(r) = lt.arcs[a].kind {
                pickups[r] += 1;
            }
        }
    }
    let mut drivers_on: HashMap<ArcKey, usize> = HashMap::new();
    for route in &plan.drivers {
        for &a in route {
            if a < ltx.num_arcs() && ltx.arcs[a].kind.is_truck_work() {
                *drivers_on.entry(ltx.key(a)).or_default() += 1;
            }
        }
    }
    let mut keys: Vec<ArcKey> = trucks_on.keys().chain(drivers_on.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    let mut out = Vec::new();
    for k in keys {
        let v = trucks_on.get(&k).copied().unwrap_or(0);
        let d = drivers_on.get(&k).copied().unwrap_or(0);
        if d < v || d > 2 * v {
            out.push(Violation::Unsynchronised {
                key: key_label(&k),
                trucks: v,
                drivers: d,
            });
        }
    }
    for (r, &p) in pickups.iter().enumerate() {
        if p != 1 {
            out.push(Violation::Coverage {
                request: r,
                pickups: p,
            });
        }
    }
    out
}

impl Plan {
    /// Every violation of the plan. Empty means the plan is feasible.
    pub fn violations(&self, inst: &Instance, lt: &TimeGraph, ltx: &TimeGraph) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.trucks.len() != inst.num_trucks() || self.drivers.len() != inst.num_drivers() {
            out.push(Violation::AgentCount {
                trucks: self.trucks.len(),
                drivers: self.drivers.len(),
            });
            return out;
        }
        for (v, route) in self.trucks.iter().enumerate() {
            out.extend(check_truck_route(lt, v, inst.trucks[v], route));
        }
        for (d, route) in self.drivers.iter().enumerate() {
            let off = self.days_off.get(d).map(|x| x.as_slice()).unwrap_or(&[]);
            out.extend(check_driver_route(ltx, d, inst.drivers[d], route, off));
        }
        if out.iter().any(|v| matches!(v, Violation::NotAPath { .. })) {
            return out;
        }
        out.extend(check_sync(inst, lt, ltx, self));
        out
    }

    pub fn is_feasible(&self, inst: &Instance, graphs: &Graphs) -> bool {
        self.violations(inst, &graphs.lt, &graphs.ltx).is_empty()
    }

    pub fn cost(&self, lt: &TimeGraph, ltx: &TimeGraph) -> CostBreakdown {
        let mut c = CostBreakdown::default();
        for route in &self.trucks {
            for &a in route {
                match lt.arcs[a].kind {
                    ArcKind::Trip => c.trips += lt.arcs[a].weight,
                    ArcKind::Delivery(_) => c.penalties += lt.arcs[a].weight,
                    _ => {}
                }
            }
        }
        for route in &self.drivers {
            for &a in route {
                if ltx.arcs[a].kind == ArcKind::Taxi {
                    c.taxis += ltx.arcs[a].weight;
                }
            }
        }
        c.total = c.trips + c.penalties + c.taxis;
        c
    }
}

/// Re-expresses an LT route on a tagged truck graph by tracking the cargo.
pub fn lift_route(lt: &TimeGraph, target: &TimeGraph, route: &[ArcId]) -> Result<Vec<ArcId>> {
    if target.flavor == Flavor::Lt {
        return Ok(route.to_vec());
    }
    let mut cargo = Cargo::Empty;
    let mut out = Vec::with_capacity(route.len());
    for &a in route {
        let key = lt.key(a);
        let found = target.arcs_with_key(&key).iter().copied().find(|&b| {
            let arc = &target.arcs[b];
            arc.kind == ArcKind::Source || target.cargo(arc.tail) == cargo
        });
        let Some(b) = found else {
            return Err(Error::PlanMismatch(format!(
                "no {} arc for {} with cargo {cargo:?}",
                target.flavor.name(),
                key_label(&key)
            )));
        };
        if target.arcs[b].head != target.sink {
            cargo = target.cargo(target.arcs[b].head);
        }
        out.push(b);
    }
    Ok(out)
}

/// Maps a route of any truck graph back to LT arc ids.
pub fn lower_route(g: &TimeGraph, lt: &TimeGraph, route: &[ArcId]) -> Result<Vec<ArcId>> {
    route
        .iter()
        .map(|&a| {
            let key = g.key(a);
            lt.arcs_with_key(&key)
                .first()
                .copied()
                .ok_or_else(|| Error::PlanMismatch(format!("no LT arc for {}", key_label(&key))))
        })
        .collect()
}

/// Splits an integral aggregated LTR flow into one route per truck.
///
/// Paths are peeled off one at a time, each the path with fewest arcs in the
/// remaining support (ties to smaller arc ids), and handed to trucks starting
/// at the path's first location in index order. Trucks without a path get an
/// empty route.
pub fn decompose_flow(g: &TimeGraph, inst: &Instance, flow: &[i64]) -> Result<Vec<Vec<ArcId>>> {
    if flow.len() != g.num_arcs() {
        return Err(Error::Decomposition("flow vector has wrong length".into()));
    }
    if let Some(a) = flow.iter().position(|&x| x < 0) {
        return Err(Error::Decomposition(format!("negative flow on arc {a}")));
    }
    for n in 0..g.num_nodes() {
        if n == g.source || n == g.sink {
            continue;
        }
        let inflow: i64 = g.in_arcs[n].iter().map(|&a| flow[a]).sum();
        let outflow: i64 = g.out_arcs[n].iter().map(|&a| flow[a]).sum();
        if inflow != outflow {
            return Err(Error::Decomposition(format!("flow not conserved at node {n}")));
        }
    }
    let mut rest = flow.to_vec();
    let mut routes: Vec<Vec<ArcId>> = vec![Vec::new(); inst.num_trucks()];
    loop {
        let total: i64 = g.source_arcs.iter().map(|&a| rest[a]).sum();
        if total == 0 {
            break;
        }
        // Node ids are topological, so a single sweep gives fewest-arc paths.
        let n = g.num_nodes();
        let mut dist = vec![usize::MAX; n];
        let mut pred = vec![usize::MAX; n];
        dist[g.source] = 0;
        for u in 0..n {
            if dist[u] == usize::MAX {
                continue;
            }
            for &a in &g.out_arcs[u] {
                if rest[a] == 0 {
                    continue;
                }
                let w = g.arcs[a].head;
                let cand = dist[u] + 1;
                if cand < dist[w] || (cand == dist[w] && a < pred[w]) {
                    dist[w] = cand;
                    pred[w] = a;
                }
            }
        }
        if dist[g.sink] == usize::MAX {
            return Err(Error::Decomposition("source flow does not reach the sink".into()));
        }
        let mut path = Vec::new();
        let mut u = g.sink;
        while u != g.source {
            let a = pred[u];
            path.push(a);
            u = g.arcs[a].tail;
        }
        path.reverse();
        for &a in &path {
            rest[a] -= 1;
        }
        let loc = g.head_loc(path[0]);
        let Some(v) = (0..inst.num_trucks()).find(|&v| inst.trucks[v] == loc && routes[v].is_empty()) else {
            return Err(Error::Decomposition(format!("more paths than trucks at location {loc}")));
        };
        routes[v] = path;
    }
    if let Some(a) = rest.iter().position(|&x| x != 0) {
        return Err(Error::Decomposition(format!("leftover flow on arc {a}")));
    }
    Ok(routes)
}
