//! Exhaustive reference solver for tiny instances.
//!
//! The search moves all trucks and drivers forward one instant at a time on
//! the LT and LTX graphs. A state holds, per truck, its location, the instant
//! it is next free and its cargo; per driver, its location, next free instant
//! and recent rest history; and which requests are picked and delivered.
//! Agents free at the current instant choose their next arc jointly, subject
//! to synchronisation on every work arc. Identical states are merged keeping
//! the cheapest, so the search is an exact dynamic program over plans.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{ArcId, ArcKey, ArcKind, Cargo, Flavor, GraphConfig, TimeGraph};
use crate::model::{Instance, Side};
use crate::routes::{check_truck_route, Plan};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    /// Truck routes produced by [`enumerate_truck_routes`].
    pub max_routes: usize,
    /// Joint states created over the whole search.
    pub max_states: usize,
    pub time_limit: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_routes: 1_000_000,
            max_states: 5_000_000,
            time_limit: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleOutcome {
    Optimal { value: i64, plan: Plan },
    Infeasible,
}

impl OracleOutcome {
    pub fn value(&self) -> Option<i64> {
        match self {
            OracleOutcome::Optimal { value, .. } => Some(*value),
            OracleOutcome::Infeasible => None,
        }
    }
}

/// All source-to-sink routes of a truck starting at `start_loc` that pass the
/// route checks, in depth-first order.
pub fn enumerate_truck_routes(g: &TimeGraph, start_loc: usize, max_routes: usize) -> Result<Vec<Vec<ArcId>>> {
    let mut out = Vec::new();
    let Some(first) = g.agent_source_arc(start_loc) else {
        return Ok(out);
    };
    let nr = g.num_requests;
    let mut route = vec![first];
    let mut picked = vec![false; nr];
    let mut dropped = vec![false; nr];
    let mut steps = 0usize;
    dfs(g, &mut route, &mut picked, &mut dropped, None, &mut out, max_routes, &mut steps)?;
    out.retain(|r| check_truck_route(g, 0, start_loc, r).is_empty());
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    g: &TimeGraph,
    route: &mut Vec<ArcId>,
    picked: &mut [bool],
    dropped: &mut [bool],
    onboard: Option<usize>,
    out: &mut Vec<Vec<ArcId>>,
    max_routes: usize,
    steps: &mut usize,
) -> Result<()> {
    *steps += 1;
    if *steps > max_routes.saturating_mul(64) {
        return Err(Error::BudgetExceeded);
    }
    let head = g.arcs[*route.last().unwrap()].head;
    if head == g.sink {
        if picked == dropped {
            if out.len() >= max_routes {
                return Err(Error::BudgetExceeded);
            }
            out.push(route.clone());
        }
        return Ok(());
    }
    for &a in &g.out_arcs[head] {
        let mut next = onboard;
        match g.arcs[a].kind {
            ArcKind::Taxi => continue,
            ArcKind::Pickup(r) => {
                // One request at a time, each picked once.
                if picked[r] || onboard.is_some() {
                    continue;
                }
                picked[r] = true;
                next = Some(r);
            }
            ArcKind::Delivery(r) => {
                if onboard != Some(r) {
                    continue;
                }
                dropped[r] = true;
                next = None;
            }
            ArcKind::Sink if onboard.is_some() => continue,
            _ => {}
        }
        route.push(a);
        let res = dfs(g, route, picked, dropped, next, out, max_routes, steps);
        route.pop();
        match g.arcs[a].kind {
            ArcKind::Pickup(r) => picked[r] = false,
            ArcKind::Delivery(r) => dropped[r] = false,
            _ => {}
        }
        res?;
    }
    Ok(())
}

const NONE: u8 = u8::MAX;
/// Most trucks (and most drivers) the search handles.
const MAX_AGENTS: usize = 4;
const NO_ARC: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
struct TruckSt {
    loc: u8,
    free_at: u16,
    cargo: u8,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
struct DriverSt {
    loc: u8,
    free_at: u16,
    /// Rest bits of the instants before `free_at`, newest in bit 0.
    hist: u64,
    /// Whether every instant of the current day so far is rest.
    today_rest: bool,
    /// Completed days since the last day off.
    run: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct State {
    trucks: [TruckSt; MAX_AGENTS],
    drivers: [DriverSt; MAX_AGENTS],
    picked: u64,
    delivered: u64,
}

impl State {
    /// The state with driver rest histories cleared.
    fn skeleton(&self) -> State {
        let mut s = *self;
        for d in &mut s.drivers {
            d.hist = 0;
        }
        s
    }
}

/// Arcs started at one instant, per truck and per driver.
#[derive(Clone, Copy, Debug)]
struct Moves {
    trucks: [u32; MAX_AGENTS],
    drivers: [u32; MAX_AGENTS],
}

const NO_MOVES: Moves = Moves {
    trucks: [NO_ARC; MAX_AGENTS],
    drivers: [NO_ARC; MAX_AGENTS],
};

struct Space<'a> {
    inst: &'a Instance,
    lt: TimeGraph,
    ltx: TimeGraph,
    nv: usize,
    nd: usize,
    last: usize,
    ipd: usize,
    weekly: bool,
    /// LT arc with the same key as a driver-graph work arc.
    twin: Vec<Option<ArcId>>,
    last_pick: Vec<Option<usize>>,
    last_drop: Vec<Option<usize>>,
    /// Cheapest penalty of a delivery starting at or after an instant.
    pen_from: Vec<Vec<Option<i64>>>,
    cost_closure: Vec<Vec<usize>>,
}

impl<'a> Space<'a> {
    fn new(inst: &'a Instance) -> Result<Self> {
        if inst.num_requests() > 64 || inst.num_trucks() > MAX_AGENTS || inst.num_drivers() > MAX_AGENTS {
            return Err(Error::BudgetExceeded);
        }
        if inst.horizon.instants_per_day > 64 || inst.horizon.last() >= u16::MAX as usize || inst.num_locations() >= NONE as usize {
            return Err(Error::BudgetExceeded);
        }
        let cfg = GraphConfig::unpruned();
        let lt = TimeGraph::build(inst, Flavor::Lt, &cfg);
        let ltx = TimeGraph::build(inst, Flavor::Ltx, &cfg);
        let twin = (0..ltx.num_arcs())
            .map(|a| {
                if ltx.arcs[a].kind.is_truck_work() {
                    lt.arcs_with_key(&ltx.key(a)).first().copied()
                } else {
                    None
                }
            })
            .collect();
        let last = inst.horizon.last();
        let nr = inst.num_requests();
        let mut last_pick = vec![None; nr];
        let mut last_drop = vec![None; nr];
        let mut pen_from = vec![vec![None; last + 2]; nr];
        for r in 0..nr {
            last_pick[r] = inst.service_start_instants(r, Side::Pickup).last().copied();
            let drops = inst.service_start_instants(r, Side::Delivery);
            last_drop[r] = drops.last().copied();
            for i in (0..=last).rev() {
                let here = drops.contains(&i).then(|| inst.delay_penalty(r, i));
                pen_from[r][i] = match (here, pen_from[r][i + 1]) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
            }
        }
        Ok(Space {
            inst,
            lt,
            ltx,
            nv: inst.num_trucks(),
            nd: inst.num_drivers(),
            last,
            ipd: inst.horizon.instants_per_day,
            weekly: inst.horizon.days >= 7,
            twin,
            last_pick,
            last_drop,
            pen_from,
            cost_closure: inst.truck_cost_closure(),
        })
    }

    fn initial(&self) -> State {
        let mut s = State {
            trucks: [TruckSt::default(); MAX_AGENTS],
            drivers: [DriverSt::default(); MAX_AGENTS],
            picked: 0,
            delivered: 0,
        };
        for (v, &l) in self.inst.trucks.iter().enumerate() {
            s.trucks[v] = TruckSt {
                loc: l as u8,
                free_at: 0,
                cargo: NONE,
            };
        }
        for (d, &l) in self.inst.drivers.iter().enumerate() {
            s.drivers[d] = DriverSt {
                loc: l as u8,
                free_at: 0,
                hist: 0,
                today_rest: true,
                run: 0,
            };
        }
        s
    }

    /// Admissible lower bound on the remaining cost, `None` if the state can
    /// no longer be completed.
    fn lower_bound(&self, s: &State, i: usize) -> Option<i64> {
        let mut lb = 0i64;
        for (r, req) in self.inst.requests.iter().enumerate() {
            if s.delivered >> r & 1 == 1 {
                continue;
            }
            let picked = s.picked >> r & 1 == 1;
            let from = if picked {
                let t = s.trucks[..self.nv].iter().find(|t| t.cargo as usize == r)?;
                if (t.free_at as usize) <= i && self.last_drop[r]? < i {
                    return None;
                }
                t.loc as usize
            } else {
                if self.last_pick[r]? < i {
                    return None;
                }
                req.pickup.location
            };
            lb += self.cost_closure[from][req.delivery.location] as i64;
            lb += self.pen_from[r][i.min(self.last)]?;
        }
        Some(lb)
    }

    /// Appends the rest bits of instants `from..to` to a driver's history.
    /// Returns false when a daily-rest window or the weekly rule fails.
    fn push_rest(&self, d: &mut DriverSt, from: usize, to: usize, rest: bool) -> bool {
        let ipd = self.ipd;
        let keep = if ipd >= 64 { u64::MAX } else { (1u64 << ipd) - 1 };
        for e in from..to {
            d.hist = ((d.hist << 1) | rest as u64) & keep;
            if e + 1 >= ipd && 2 * (d.hist.count_ones() as usize) < ipd {
                return false;
            }
            if self.weekly {
                if e % ipd == 0 {
                    d.today_rest = rest;
                } else {
                    d.today_rest &= rest;
                }
                if e % ipd == ipd - 1 {
                    d.run = if d.today_rest { 0 } else { d.run + 1 };
                    if d.run >= 7 {
                        return false;
                    }
                }
            }
        }
        // Only the last ipd - 1 bits matter from here on.
        d.hist &= keep >> 1;
        d.free_at = to as u16;
        true
    }

    /// Every joint move from `s` at instant `i`, with successor and cost.
    fn expand(&self, s: &State, i: usize, out: &mut Vec<(Moves, State, i64)>) {
        out.clear();
        let lt = &self.lt;
        let mut truck_opts: Vec<(usize, Vec<ArcId>)> = Vec::new();
        for (v, t) in s.trucks[..self.nv].iter().enumerate() {
            if t.free_at as usize != i {
                continue;
            }
            let node = lt.node_at(t.loc as usize, i, Cargo::None).unwrap();
            let opts = lt.out_arcs[node]
                .iter()
                .copied()
                .filter(|&a| match lt.arcs[a].kind {
                    ArcKind::Rest | ArcKind::Trip => true,
                    ArcKind::Pickup(r) => t.cargo == NONE && s.picked >> r & 1 == 0,
                    ArcKind::Delivery(r) => t.cargo as usize == r,
                    _ => false,
                })
                .collect();
            truck_opts.push((v, opts));
        }
        let free_drivers: Vec<usize> = (0..self.nd).filter(|&d| s.drivers[d].free_at as usize == i).collect();
        let mut tpick = vec![0usize; truck_opts.len()];
        loop {
            self.truck_combo(s, i, &truck_opts, &tpick, &free_drivers, out);
            if !odometer(&mut tpick, |k| truck_opts[k].1.len()) {
                break;
            }
        }
    }

    fn truck_combo(
        &self,
        s: &State,
        i: usize,
        truck_opts: &[(usize, Vec<ArcId>)],
        tpick: &[usize],
        free_drivers: &[usize],
        out: &mut Vec<(Moves, State, i64)>,
    ) {
        let (lt, ltx) = (&self.lt, &self.ltx);
        let mut ns = *s;
        let mut moves = NO_MOVES;
        let mut cost = 0i64;
        // Work arcs taken by trucks: (LT arc, trucks, drivers).
        let mut work: Vec<(ArcId, usize, usize)> = Vec::new();
        for (k, (v, opts)) in truck_opts.iter().enumerate() {
            let a = opts[tpick[k]];
            let arc = &lt.arcs[a];
            let t = &mut ns.trucks[*v];
            match arc.kind {
                ArcKind::Pickup(r) => {
                    if ns.picked >> r & 1 == 1 {
                        return;
                    }
                    ns.picked |= 1 << r;
                    t.cargo = r as u8;
                }
                ArcKind::Delivery(r) => {
                    ns.delivered |= 1 << r;
                    t.cargo = NONE;
                }
                _ => {}
            }
            t.loc = lt.head_loc(a) as u8;
            t.free_at = lt.end(a) as u16;
            cost += arc.weight;
            moves.trucks[*v] = a as u32;
            if arc.kind.is_truck_work() {
                match work.iter_mut().find(|w| w.0 == a) {
                    Some(w) => w.1 += 1,
                    None => work.push((a, 1, 0)),
                }
            }
        }
        let driver_opts: Vec<Vec<ArcId>> = free_drivers
            .iter()
            .map(|&d| {
                let st = &ns.drivers[d];
                let node = ltx.node_at(st.loc as usize, i, Cargo::None).unwrap();
                ltx.out_arcs[node]
                    .iter()
                    .copied()
                    .filter(|&a| match ltx.arcs[a].kind {
                        ArcKind::Rest | ArcKind::Taxi => true,
                        k if k.is_truck_work() => self.twin[a].is_some_and(|t| work.iter().any(|w| w.0 == t)),
                        _ => false,
                    })
                    .collect()
            })
            .collect();
        // Drivers needed on work arcs must come from the free drivers.
        let need: usize = work.iter().map(|w| w.1).sum();
        if need > free_drivers.len() {
            return;
        }
        let mut dpick = vec![0usize; free_drivers.len()];
        loop {
            let mut counts = work.clone();
            let mut ns2 = ns;
            let mut m2 = moves;
            let mut c2 = cost;
            let mut alive = true;
            for (k, &d) in free_drivers.iter().enumerate() {
                let a = driver_opts[k][dpick[k]];
                let arc = &ltx.arcs[a];
                if let Some(t) = self.twin[a] {
                    if let Some(w) = counts.iter_mut().find(|w| w.0 == t) {
                        w.2 += 1;
                    }
                }
                if arc.kind == ArcKind::Taxi {
                    c2 += arc.weight;
                }
                let st = &mut ns2.drivers[d];
                st.loc = ltx.head_loc(a) as u8;
                m2.drivers[d] = a as u32;
                if !self.push_rest(st, i, ltx.end(a), arc.kind == ArcKind::Rest) {
                    alive = false;
                    break;
                }
            }
            if alive && counts.iter().all(|&(_, v, d)| v <= d && d <= 2 * v) {
                out.push((m2, ns2, c2));
            }
            if !odometer(&mut dpick, |k| driver_opts[k].len()) {
                break;
            }
        }
    }

    fn source_sink(&self, g: &TimeGraph, start: usize, end: usize, body: Vec<ArcId>) -> Vec<ArcId> {
        let src = g.agent_source_arc(start).unwrap();
        let sink = g.arcs_with_key(&ArcKey {
            kind: ArcKind::Sink,
            from: Some((end, self.last)),
            to: None,
        })[0];
        let mut r = vec![src];
        r.extend(body);
        r.push(sink);
        r
    }

    /// Turns per-instant moves (oldest first) into a plan.
    fn plan(&self, steps: &[Moves], last_state: &State) -> Plan {
        let mut trucks = vec![Vec::new(); self.nv];
        let mut drivers = vec![Vec::new(); self.nd];
        for m in steps {
            for v in 0..self.nv {
                if m.trucks[v] != NO_ARC {
                    trucks[v].push(m.trucks[v] as ArcId);
                }
            }
            for d in 0..self.nd {
                if m.drivers[d] != NO_ARC {
                    drivers[d].push(m.drivers[d] as ArcId);
                }
            }
        }
        let trucks = trucks
            .into_iter()
            .enumerate()
            .map(|(v, body)| self.source_sink(&self.lt, self.inst.trucks[v], last_state.trucks[v].loc as usize, body))
            .collect();
        let drivers: Vec<Vec<ArcId>> = drivers
            .into_iter()
            .enumerate()
            .map(|(d, body)| self.source_sink(&self.ltx, self.inst.drivers[d], last_state.drivers[d].loc as usize, body))
            .collect();
        let days_off = drivers
            .iter()
            .map(|route| {
                let rest = crate::routes::rest_profile(&self.ltx, route);
                (0..self.inst.horizon.days)
                    .map(|j| self.weekly && rest[j * self.ipd..(j + 1) * self.ipd].iter().all(|&x| x))
                    .collect()
            })
            .collect();
        Plan {
            trucks,
            drivers,
            days_off,
        }
    }

    fn complete(&self, s: &State) -> bool {
        s.delivered.count_ones() as usize == self.inst.num_requests()
    }
}

/// Advances a mixed-radix counter; false once it wraps around.
fn odometer(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < radix(k) {
            return true;
        }
        digits[k] = 0;
    }
    false
}

/// Validates the instance. Requests without any admissible service instant
/// make it infeasible rather than malformed: `Ok(false)`.
fn well_posed(inst: &Instance) -> Result<bool> {
    match inst.validate() {
        Ok(()) => Ok(true),
        Err(Error::InvalidInstance(v)) if v.iter().all(|m| m.contains("no admissible")) => Ok(false),
        Err(e) => Err(e),
    }
}

struct Entry {
    state: State,
    cost: i64,
    parent: usize,
    moves: Moves,
    dead: bool,
}

/// Whether `a` is at least as good as `b`: same skeleton assumed, no higher
/// cost, and at least the rest of `b` in every driver history.
fn dominates(nd: usize, a: &Entry, b: &State, b_cost: i64) -> bool {
    a.cost <= b_cost && (0..nd).all(|d| a.state.drivers[d].hist & b.drivers[d].hist == b.drivers[d].hist)
}

/// Global optimum over all plans, by exhaustive dynamic programming.
/// `upper_bound`, if given, must be the cost of some feasible plan.
pub fn exhaustive_solve(inst: &Instance, budget: &OracleBudget, upper_bound: Option<i64>) -> Result<OracleOutcome> {
    let start = Instant::now();
    if !well_posed(inst)? {
        return Ok(OracleOutcome::Infeasible);
    }
    let sp = Space::new(inst)?;
    let init = sp.initial();
    let Some(lb0) = sp.lower_bound(&init, 0) else {
        return Ok(OracleOutcome::Infeasible);
    };
    if upper_bound.is_some_and(|ub| lb0 > ub) {
        return Ok(OracleOutcome::Infeasible);
    }
    let mut layers: Vec<Vec<Entry>> = vec![vec![Entry {
        state: init,
        cost: 0,
        parent: usize::MAX,
        moves: NO_MOVES,
        dead: false,
    }]];
    let mut created = 1usize;
    let mut buf = Vec::new();
    for i in 0..sp.last {
        let mut next: Vec<Entry> = Vec::new();
        let mut groups: HashMap<State, Vec<usize>> = HashMap::new();
        for pi in 0..layers[i].len() {
            let e = &layers[i][pi];
            if e.dead {
                continue;
            }
            let base = e.cost;
            sp.expand(&e.state, i, &mut buf);
            for &(moves, ns, dc) in &buf {
                let cost = base + dc;
                let Some(lb) = sp.lower_bound(&ns, i + 1) else { continue };
                if upper_bound.is_some_and(|ub| cost + lb > ub) {
                    continue;
                }
                let group = groups.entry(ns.skeleton()).or_default();
                if group.iter().any(|&k| dominates(sp.nd, &next[k], &ns, cost)) {
                    continue;
                }
                group.retain(|&k| {
                    let other = &next[k];
                    let beaten = cost <= other.cost
                        && (0..sp.nd).all(|d| ns.drivers[d].hist & other.state.drivers[d].hist == other.state.drivers[d].hist);
                    if beaten {
                        next[k].dead = true;
                    }
                    !beaten
                });
                group.push(next.len());
                next.push(Entry {
                    state: ns,
                    cost,
                    parent: pi,
                    moves,
                    dead: false,
                });
                created += 1;
                if created > budget.max_states {
                    return Err(Error::BudgetExceeded);
                }
            }
            if budget.time_limit.is_some_and(|t| start.elapsed() > t) {
                return Err(Error::BudgetExceeded);
            }
        }
        log::debug!("oracle instant {i}: {} states", next.iter().filter(|e| !e.dead).count());
        layers.push(next);
    }
    let best = layers[sp.last]
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.dead && sp.complete(&e.state))
        .min_by_key(|(k, e)| (e.cost, *k));
    let Some((mut k, best)) = best else {
        return Ok(OracleOutcome::Infeasible);
    };
    let value = best.cost;
    let last_state = best.state;
    let mut steps = Vec::new();
    for i in (1..=sp.last).rev() {
        let e = &layers[i][k];
        steps.push(e.moves);
        k = e.parent;
    }
    steps.reverse();
    Ok(OracleOutcome::Optimal {
        value,
        plan: sp.plan(&steps, &last_state),
    })
}

/// Draws `n` feasible plans by random walks on the full state graph, each
/// step restricted to moves that can still be completed. Empty when the
/// instance is infeasible.
pub fn sample_plans<R: Rng>(inst: &Instance, n: usize, rng: &mut R, budget: &OracleBudget) -> Result<Vec<Plan>> {
    if !well_posed(inst)? {
        return Ok(Vec::new());
    }
    let sp = Space::new(inst)?;
    let mut states: Vec<Vec<State>> = vec![vec![sp.initial()]];
    let mut edges: Vec<Vec<Vec<(Moves, usize)>>> = Vec::new();
    let mut created = 1usize;
    let mut buf = Vec::new();
    for i in 0..sp.last {
        let mut next: Vec<State> = Vec::new();
        let mut index: HashMap<State, usize> = HashMap::new();
        let mut layer_edges = Vec::new();
        for s in &states[i] {
            let mut es = Vec::new();
            sp.expand(s, i, &mut buf);
            for &(moves, ns, _) in &buf {
                if sp.lower_bound(&ns, i + 1).is_none() {
                    continue;
                }
                let k = *index.entry(ns).or_insert_with(|| {
                    next.push(ns);
                    next.len() - 1
                });
                es.push((moves, k));
            }
            created += es.len();
            if created > budget.max_states {
                return Err(Error::BudgetExceeded);
            }
            layer_edges.push(es);
        }
        states.push(next);
        edges.push(layer_edges);
    }
    // Backward pass: which states reach a complete final state.
    let mut alive: Vec<Vec<bool>> = states.iter().map(|l| vec![false; l.len()]).collect();
    for (k, s) in states[sp.last].iter().enumerate() {
        alive[sp.last][k] = sp.complete(s);
    }
    for i in (0..sp.last).rev() {
        for k in 0..states[i].len() {
            alive[i][k] = edges[i][k].iter().any(|(_, c)| alive[i + 1][*c]);
        }
    }
    if !alive[0][0] {
        return Ok(Vec::new());
    }
    let mut plans = Vec::with_capacity(n);
    for _ in 0..n {
        let mut k = 0;
        let mut steps = Vec::new();
        for i in 0..sp.last {
            let live: Vec<&(Moves, usize)> = edges[i][k].iter().filter(|(_, c)| alive[i + 1][*c]).collect();
            let (m, c) = live[rng.gen_range(0..live.len())];
            steps.push(*m);
            k = *c;
        }
        plans.push(sp.plan(&steps, &states[sp.last][k]));
    }
    Ok(plans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graphs;
    use crate::model::{example_instance, Request, Service, TimeWindow};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn example_optimum_uses_passenger() {
        let inst = example_instance();
        let out = exhaustive_solve(&inst, &OracleBudget::default(), None).unwrap();
        let OracleOutcome::Optimal { value, plan } = out else { panic!() };
        assert_eq!(value, 2);
        let graphs = Graphs::build(&inst, Flavor::Lt, &GraphConfig::pruned());
        assert!(plan.violations(&inst, &graphs.lt, &graphs.ltx).is_empty());
        let cost = plan.cost(&graphs.lt, &graphs.ltx);
        assert_eq!((cost.trips, cost.taxis, cost.penalties), (2, 0, 0));
        // The plan where d2 rides along as a passenger reaches the optimum too.
        let passenger = Plan {
            trucks: crate::routes::tests::example_trucks(&graphs.lt),
            drivers: crate::routes::tests::example_drivers_passenger(&graphs.ltx),
            days_off: vec![vec![false]; 2],
        };
        assert!(passenger.is_feasible(&inst, &graphs));
        assert_eq!(passenger.cost(&graphs.lt, &graphs.ltx).total, value);
    }

    #[test]
    fn upper_bound_keeps_optimum() {
        let inst = example_instance();
        for ub in [2, 4, 10] {
            let out = exhaustive_solve(&inst, &OracleBudget::default(), Some(ub)).unwrap();
            assert_eq!(out.value(), Some(2));
        }
    }

    #[test]
    fn no_requests_costs_nothing() {
        let mut inst = example_instance();
        inst.requests.clear();
        let out = exhaustive_solve(&inst, &OracleBudget::default(), None).unwrap();
        assert_eq!(out.value(), Some(0));
    }

    #[test]
    fn empty_delivery_set_is_infeasible() {
        let mut inst = example_instance();
        // A window that ends too late for the service to finish on the only day.
        inst.requests[0].delivery.window = TimeWindow::new(7, 7);
        inst.requests[0].delivery.duration = 2;
        let out = exhaustive_solve(&inst, &OracleBudget::default(), None).unwrap();
        assert_eq!(out, OracleOutcome::Infeasible);
    }

    #[test]
    fn budget_is_reported() {
        let inst = example_instance();
        let b = OracleBudget {
            max_states: 10,
            ..OracleBudget::default()
        };
        assert!(matches!(exhaustive_solve(&inst, &b, None), Err(Error::BudgetExceeded)));
        let g = TimeGraph::build(&inst, Flavor::Lt, &GraphConfig::pruned());
        assert!(matches!(enumerate_truck_routes(&g, 0, 3), Err(Error::BudgetExceeded)));
    }

    #[test]
    fn truck_routes_contain_example_route() {
        let inst = example_instance();
        let g = TimeGraph::build(&inst, Flavor::Lt, &GraphConfig::pruned());
        let routes = enumerate_truck_routes(&g, 0, 100_000).unwrap();
        let lt = &g;
        let trucks = crate::routes::tests::example_trucks(lt);
        assert!(routes.contains(&trucks[0]));
        for r in &routes {
            assert!(check_truck_route(&g, 0, 0, r).is_empty());
        }
        let ltc = TimeGraph::build(&inst, Flavor::Ltc, &GraphConfig::pruned());
        for r in enumerate_truck_routes(&ltc, 0, 100_000).unwrap() {
            assert!(check_truck_route(&ltc, 0, 0, &r).is_empty());
        }
    }

    #[test]
    fn unreachable_request_yields_no_route_serving_it() {
        let mut inst = example_instance();
        inst.requests = vec![Request {
            name: "far".into(),
            pickup: Service {
                location: 0,
                day: 0,
                window: TimeWindow::new(6, 6),
                duration: 1,
            },
            delivery: Service {
                location: 1,
                day: 0,
                window: TimeWindow::new(7, 7),
                duration: 1,
            },
            penalty: 1,
        }];
        // Pickup 6-7 leaves no time for the trip and the delivery.
        let out = exhaustive_solve(&inst, &OracleBudget::default(), None).unwrap();
        assert_eq!(out, OracleOutcome::Infeasible);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_plans(&inst, 3, &mut rng, &OracleBudget::default()).unwrap().is_empty());
    }

    #[test]
    fn sampled_plans_are_feasible() {
        let inst = example_instance();
        let graphs = Graphs::build(&inst, Flavor::Lt, &GraphConfig::pruned());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let plans = sample_plans(&inst, 30, &mut rng, &OracleBudget::default()).unwrap();
        assert_eq!(plans.len(), 30);
        let mut costs = Vec::new();
        for p in &plans {
            assert!(p.violations(&inst, &graphs.lt, &graphs.ltx).is_empty(), "{:?}", p.violations(&inst, &graphs.lt, &graphs.ltx));
            costs.push(p.cost(&graphs.lt, &graphs.ltx).total);
        }
        assert!(costs.iter().all(|&c| c >= 2));
    }
}
