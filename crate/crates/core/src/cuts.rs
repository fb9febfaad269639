//! Valid inequalities and the cut pool.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::formulation::{MilpModel, Row, RowFamily, Sense};
use crate::graph::{ArcId, ArcKind, Cargo, Flavor, Graphs, TimeGraph};
use crate::model::{Instance, Side};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CutFamily {
    Prec,
    Pd1,
    Pd2,
    Pd3,
    Sec1,
    Sec2,
}

impl CutFamily {
    pub const ALL: [CutFamily; 6] = [
        CutFamily::Prec,
        CutFamily::Pd1,
        CutFamily::Pd2,
        CutFamily::Pd3,
        CutFamily::Sec1,
        CutFamily::Sec2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CutFamily::Prec => "prec",
            CutFamily::Pd1 => "pd1",
            CutFamily::Pd2 => "pd2",
            CutFamily::Pd3 => "pd3",
            CutFamily::Sec1 => "sec1",
            CutFamily::Sec2 => "sec2",
        }
    }

    pub fn parse(s: &str) -> Option<CutFamily> {
        CutFamily::ALL.into_iter().find(|f| f.name().eq_ignore_ascii_case(s))
    }
}

/// Which (pickup, delivery) arc pairs anchor a PD3 inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pd3Variant {
    /// Pickup starts at the window opening and delivery starts at the window closing.
    A,
    /// At least one of the two anchors holds.
    B,
    /// Every admissible pair.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutConfig {
    pub families: Vec<CutFamily>,
    /// Largest truck subset for PD3.
    pub pd3_k: usize,
    pub pd3_variant: Pd3Variant,
    /// Largest request subset for the sequencing families.
    pub sec_k: usize,
}

impl Default for CutConfig {
    fn default() -> Self {
        CutConfig {
            families: CutFamily::ALL.to_vec(),
            pd3_k: 2,
            pd3_variant: Pd3Variant::A,
            sec_k: 3,
        }
    }
}

impl CutConfig {
    pub fn only(family: CutFamily) -> Self {
        CutConfig {
            families: vec![family],
            ..CutConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub family: CutFamily,
    /// Which generator parameters produced the cut.
    pub key: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Cut {
    pub fn row(&self, name: String) -> Row {
        Row {
            name,
            family: RowFamily::Cut,
            coeffs: self.coeffs.clone(),
            sense: self.sense,
            rhs: self.rhs,
        }
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        let a: f64 = self.coeffs.iter().map(|&(j, v)| v * x[j]).sum();
        match self.sense {
            Sense::Le => (a - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - a).max(0.0),
            Sense::Eq => (a - self.rhs).abs(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CutPool {
    pub cuts: Vec<Cut>,
    keys: HashSet<(CutFamily, String)>,
    shapes: HashSet<String>,
}

impl CutPool {
    pub fn new() -> Self {
        CutPool::default()
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// Adds a cut unless one with the same provenance or the same row is present.
    pub fn add(&mut self, mut cut: Cut) -> bool {
        cut.coeffs.sort_by_key(|e| e.0);
        cut.coeffs.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        cut.coeffs.retain(|e| e.1 != 0.0);
        if cut.coeffs.is_empty() {
            return false;
        }
        let shape = format!("{:?}|{:?}|{}", cut.coeffs, cut.sense, cut.rhs);
        if self.keys.contains(&(cut.family, cut.key.clone())) || self.shapes.contains(&shape) {
            return false;
        }
        self.keys.insert((cut.family, cut.key.clone()));
        self.shapes.insert(shape);
        self.cuts.push(cut);
        true
    }

    pub fn count(&self, family: CutFamily) -> usize {
        self.cuts.iter().filter(|c| c.family == family).count()
    }

    /// Indices of cuts violated by more than `tol`, most violated first,
    /// ties broken by pool order, at most `cap` of them.
    pub fn separate(&self, x: &[f64], tol: f64, cap: usize) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = self
            .cuts
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.violation(x)))
            .filter(|&(_, v)| v > tol)
            .collect();
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        out.truncate(cap);
        out
    }

    pub fn rows(&self) -> Vec<Row> {
        self.cuts
            .iter()
            .enumerate()
            .map(|(i, c)| c.row(format!("cut_{}_{}", c.family.name(), i)))
            .collect()
    }
}

/// Variable sets that stand for one truck: per-truck variables in LT and LTC,
/// the aggregated flow in LTR when there is a single truck.
fn truck_groups(inst: &Instance, model: &MilpModel) -> Vec<(String, Vec<Option<usize>>)> {
    if model.options.flavor == Flavor::Ltr {
        if inst.num_trucks() == 1 {
            vec![("v0".to_string(), model.flow_vars.clone())]
        } else {
            Vec::new()
        }
    } else {
        model
            .truck_vars
            .iter()
            .enumerate()
            .map(|(v, t)| (format!("v{v}"), t.clone()))
            .collect()
    }
}

fn sum(vars: &[Option<usize>], arcs: impl Iterator<Item = ArcId>, coef: f64) -> Vec<(usize, f64)> {
    arcs.filter_map(|a| vars[a]).map(|j| (j, coef)).collect()
}

/// Trips usable for leaving a pickup (or reaching a delivery) location.
fn carrying_trip(g: &TimeGraph, a: ArcId) -> bool {
    g.flavor != Flavor::Ltc || g.cargo(g.arcs[a].tail) == Cargo::Loaded
}

/// Builds a pool with every cut of the configured families.
pub fn generate(inst: &Instance, graphs: &Graphs, model: &MilpModel, cfg: &CutConfig) -> Result<CutPool> {
    let mut pool = CutPool::new();
    for &f in &cfg.families {
        let cuts = match f {
            CutFamily::Prec => gen_prec(inst, graphs, model),
            CutFamily::Pd1 => gen_pd12(inst, graphs, model, false),
            CutFamily::Pd2 => gen_pd12(inst, graphs, model, true),
            CutFamily::Pd3 => gen_pd3(inst, graphs, model, cfg.pd3_k, cfg.pd3_variant),
            CutFamily::Sec1 => gen_sec(inst, graphs, model, cfg.sec_k, false)?,
            CutFamily::Sec2 => gen_sec(inst, graphs, model, cfg.sec_k, true)?,
        };
        for c in cuts {
            pool.add(c);
        }
    }
    Ok(pool)
}

/// Pickups finished early enough to reach the delivery cover the deliveries
/// started so far.
pub fn gen_prec(inst: &Instance, graphs: &Graphs, model: &MilpModel) -> Vec<Cut> {
    let g = &graphs.truck;
    let travel = inst.truck_time_closure();
    let mut out = Vec::new();
    for (r, req) in inst.requests.iter().enumerate() {
        let len = travel[req.pickup.location][req.delivery.location];
        for i in inst.service_start_instants(r, Side::Delivery) {
            let mut coeffs = Vec::new();
            for &a in &g.pickup_arcs[r] {
                if g.end(a) + len <= i {
                    coeffs.extend(model.truck_arc_vars(a).into_iter().map(|j| (j, 1.0)));
                }
            }
            for &a in &g.delivery_arcs[r] {
                if g.start(a) <= i {
                    coeffs.extend(model.truck_arc_vars(a).into_iter().map(|j| (j, -1.0)));
                }
            }
            out.push(Cut {
                family: CutFamily::Prec,
                key: format!("r{r}_i{i}"),
                coeffs,
                sense: Sense::Ge,
                rhs: 0.0,
            });
        }
    }
    out
}

/// Every pickup at a location is followed by a trip leaving it, every
/// delivery preceded by a trip into it. With `timed`, only services from (or
/// up to) an instant and the trips that fit around them are counted.
pub fn gen_pd12(inst: &Instance, graphs: &Graphs, model: &MilpModel, timed: bool) -> Vec<Cut> {
    let g = &graphs.truck;
    let family = if timed { CutFamily::Pd2 } else { CutFamily::Pd1 };
    let mut out = Vec::new();
    for (vname, vars) in truck_groups(inst, model) {
        for l in 0..inst.num_locations() {
            for side in [Side::Pickup, Side::Delivery] {
                let reqs: Vec<usize> = (0..inst.num_requests())
                    .filter(|&r| inst.requests[r].service(side).location == l)
                    .collect();
                if reqs.is_empty() {
                    continue;
                }
                let trips: Vec<ArcId> = g
                    .trip_arcs
                    .iter()
                    .copied()
                    .filter(|&a| carrying_trip(g, a))
                    .filter(|&a| match side {
                        Side::Pickup => g.tail_loc(a) == l,
                        Side::Delivery => g.head_loc(a) == l,
                    })
                    .collect();
                let services: Vec<ArcId> = reqs
                    .iter()
                    .flat_map(|&r| g.service_arcs(r, side).iter().copied())
                    .collect();
                let tag = if side == Side::Pickup { "p" } else { "d" };
                if !timed {
                    let mut coeffs = sum(&vars, trips.iter().copied(), 1.0);
                    coeffs.extend(sum(&vars, services.iter().copied(), -1.0));
                    out.push(Cut {
                        family,
                        key: format!("{vname}_l{l}_{tag}"),
                        coeffs,
                        sense: Sense::Ge,
                        rhs: 0.0,
                    });
                    continue;
                }
                let min_s = reqs
                    .iter()
                    .map(|&r| inst.requests[r].service(side).duration)
                    .min()
                    .unwrap();
                let mut instants: Vec<usize> = reqs
                    .iter()
                    .flat_map(|&r| inst.service_start_instants(r, side))
                    .collect();
                instants.sort_unstable();
                instants.dedup();
                for i in instants {
                    let (t, s): (Vec<ArcId>, Vec<ArcId>) = match side {
                        Side::Pickup => (
                            trips.iter().copied().filter(|&a| g.start(a) >= i + min_s).collect(),
                            services.iter().copied().filter(|&a| g.start(a) >= i).collect(),
                        ),
                        Side::Delivery => (
                            trips.iter().copied().filter(|&a| g.end(a) <= i).collect(),
                            services.iter().copied().filter(|&a| g.start(a) <= i).collect(),
                        ),
                    };
                    let mut coeffs = sum(&vars, t.into_iter(), 1.0);
                    coeffs.extend(sum(&vars, s.into_iter(), -1.0));
                    out.push(Cut {
                        family,
                        key: format!("{vname}_l{l}_{tag}_i{i}"),
                        coeffs,
                        sense: Sense::Ge,
                        rhs: 0.0,
                    });
                }
            }
        }
    }
    out
}

fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let s: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if s.len() <= max {
            out.push(s);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// A truck subset serving a request inside a pickup/delivery arc pair must
/// travel between them.
pub fn gen_pd3(inst: &Instance, graphs: &Graphs, model: &MilpModel, k: usize, variant: Pd3Variant) -> Vec<Cut> {
    let g = &graphs.truck;
    let travel = inst.truck_time_closure();
    let ipd = inst.horizon.instants_per_day;
    let groups: Vec<(String, Vec<Vec<Option<usize>>>)> = if model.options.flavor == Flavor::Ltr {
        if inst.num_trucks() <= k {
            vec![("all".to_string(), vec![model.flow_vars.clone()])]
        } else {
            Vec::new()
        }
    } else {
        subsets(inst.num_trucks(), k)
            .into_iter()
            .map(|s| {
                let name = s.iter().map(|v| format!("v{v}")).collect::<Vec<_>>().join("");
                (name, s.iter().map(|&v| model.truck_vars[v].clone()).collect())
            })
            .collect()
    };
    let mut out = Vec::new();
    for (r, req) in inst.requests.iter().enumerate() {
        let (lp, ld) = (req.pickup.location, req.delivery.location);
        let len = travel[lp][ld];
        for &e1 in &g.pickup_arcs[r] {
            for &e2 in &g.delivery_arcs[r] {
                if g.end(e1) + len > g.start(e2) {
                    continue;
                }
                let a1 = g.start(e1) % ipd == req.pickup.window.open;
                let a2 = g.start(e2) % ipd == req.delivery.window.close;
                let keep = match variant {
                    Pd3Variant::A => a1 && a2,
                    Pd3Variant::B => a1 || a2,
                    Pd3Variant::Full => true,
                };
                if !keep {
                    continue;
                }
                let picks: Vec<ArcId> = g.pickup_arcs[r].iter().copied().filter(|&a| g.start(a) >= g.start(e1)).collect();
                let drops: Vec<ArcId> = g.delivery_arcs[r].iter().copied().filter(|&a| g.end(a) <= g.end(e2)).collect();
                for (side, tag, loc) in [(Side::Pickup, "p", lp), (Side::Delivery, "d", ld)] {
                    let trips: Vec<ArcId> = g
                        .trip_arcs
                        .iter()
                        .copied()
                        .filter(|&a| carrying_trip(g, a))
                        .filter(|&a| match side {
                            Side::Pickup => g.tail_loc(a) == loc,
                            Side::Delivery => g.head_loc(a) == loc,
                        })
                        .filter(|&a| g.start(a) >= g.end(e1) && g.end(a) <= g.start(e2))
                        .collect();
                    for (gname, vars) in &groups {
                        let mut coeffs = Vec::new();
                        for v in vars {
                            coeffs.extend(sum(v, picks.iter().copied(), 1.0));
                            coeffs.extend(sum(v, drops.iter().copied(), 1.0));
                            coeffs.extend(sum(v, trips.iter().copied(), -1.0));
                        }
                        out.push(Cut {
                            family: CutFamily::Pd3,
                            key: format!("r{r}_a{e1}_a{e2}_{tag}_{gname}"),
                            coeffs,
                            sense: Sense::Le,
                            rhs: 1.0,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Where a minimum-duration computation starts and which services it counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DurationMode {
    /// From instant 0 at a truck's start location until the last delivery ends.
    DeliverFromStart { location: usize },
    /// From instant 0 at a truck's start location until the last pickup ends.
    PickupFromStart { location: usize },
    /// From an instant, at no particular location, until the last delivery ends.
    /// The first request may already be on board.
    DeliverFromInstant { instant: usize },
    /// From an instant, at no particular location, until the last pickup ends.
    PickupFromInstant { instant: usize },
}

/// Shortest time for one truck to serve every request of `subset` (ignoring
/// drivers), over all service orders. `None` when no order fits the horizon.
pub fn min_duration(inst: &Instance, subset: &[usize], mode: DurationMode) -> Result<Option<usize>> {
    if subset.is_empty() || subset.len() > 7 {
        return Err(Error::SubsetSize(subset.len()));
    }
    if let Some(&r) = subset.iter().find(|&&r| r >= inst.num_requests()) {
        return Err(Error::UnknownRequest(r));
    }
    let travel = inst.truck_time_closure();
    let starts: Vec<[Vec<usize>; 2]> = (0..inst.num_requests())
        .map(|r| {
            [
                inst.service_start_instants(r, Side::Pickup),
                inst.service_start_instants(r, Side::Delivery),
            ]
        })
        .collect();
    let earliest = |r: usize, side: usize, t: usize| -> Option<usize> {
        let v = &starts[r][side];
        let k = v.partition_point(|&x| x < t);
        v.get(k).copied()
    };
    let origin = match mode {
        DurationMode::DeliverFromStart { .. } | DurationMode::PickupFromStart { .. } => 0,
        DurationMode::DeliverFromInstant { instant } | DurationMode::PickupFromInstant { instant } => instant,
    };
    let pickup_mode = matches!(
        mode,
        DurationMode::PickupFromStart { .. } | DurationMode::PickupFromInstant { .. }
    );

    // Completion time of an order, starting at (t, loc), with the first
    // request possibly already loaded.
    let run = |order: &[usize], mut t: usize, mut loc: usize, first_loaded: bool| -> Option<usize> {
        for (k, &r) in order.iter().enumerate() {
            let req = &inst.requests[r];
            if !(k == 0 && first_loaded) {
                t += travel[loc][req.pickup.location];
                let p = earliest(r, 0, t)?;
                t = p + req.pickup.duration;
                loc = req.pickup.location;
                if pickup_mode && k + 1 == order.len() {
                    return Some(t);
                }
            }
            t += travel[loc][req.delivery.location];
            let q = earliest(r, 1, t)?;
            t = q + req.delivery.duration;
            loc = req.delivery.location;
        }
        Some(t)
    };

    let mut best: Option<usize> = None;
    let mut order = subset.to_vec();
    order.sort_unstable();
    loop {
        let first = &inst.requests[order[0]];
        let mut cands = Vec::new();
        match mode {
            DurationMode::DeliverFromStart { location } | DurationMode::PickupFromStart { location } => {
                cands.push(run(&order, 0, location, false));
            }
            DurationMode::DeliverFromInstant { instant } => {
                cands.push(run(&order, instant, first.pickup.location, false));
                cands.push(run(&order, instant, first.delivery.location, true));
            }
            DurationMode::PickupFromInstant { instant } => {
                cands.push(run(&order, instant, first.pickup.location, false));
            }
        }
        for c in cands.into_iter().flatten() {
            let d = c - origin;
            best = Some(best.map_or(d, |b| b.min(d)));
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(best)
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Sequencing inequalities: a truck cannot serve all of a request subset
/// faster than its minimum duration.
pub fn gen_sec(inst: &Instance, graphs: &Graphs, model: &MilpModel, k: usize, from_instant: bool) -> Result<Vec<Cut>> {
    let g = &graphs.truck;
    let family = if from_instant { CutFamily::Sec2 } else { CutFamily::Sec1 };
    let groups = truck_groups(inst, model);
    let mut out = Vec::new();
    if groups.is_empty() {
        return Ok(out);
    }
    let nr = inst.num_requests();
    let subs: Vec<Vec<usize>> = subsets(nr, k.min(7)).into_iter().filter(|s| s.len() >= 2).collect();
    let last = inst.horizon.last();
    for s in &subs {
        let rhs = (s.len() - 1) as f64;
        let sname = s.iter().map(|r| format!("r{r}")).collect::<Vec<_>>().join("");
        for side in [Side::Pickup, Side::Delivery] {
            let tag = if side == Side::Pickup { "p" } else { "d" };
            let mut emit = |key: String, arcs: Vec<ArcId>, vars: &[Option<usize>]| {
                // Skip when some request has no counted arc: the row cannot bind.
                let covers = s.iter().all(|&r| arcs.iter().any(|&a| g.arcs[a].kind.service().map(|x| x.0) == Some(r) && vars[a].is_some()));
                if covers {
                    out.push(Cut {
                        family,
                        key,
                        coeffs: sum(vars, arcs.into_iter(), 1.0),
                        sense: Sense::Le,
                        rhs,
                    });
                }
            };
            if !from_instant {
                for (v, (vname, vars)) in groups.iter().enumerate() {
                    let location = inst.trucks[v];
                    let mode = match side {
                        Side::Pickup => DurationMode::PickupFromStart { location },
                        Side::Delivery => DurationMode::DeliverFromStart { location },
                    };
                    let dur = min_duration(inst, s, mode)?.unwrap_or(usize::MAX);
                    let arcs: Vec<ArcId> = s
                        .iter()
                        .flat_map(|&r| g.service_arcs(r, side).iter().copied())
                        .filter(|&a| g.end(a) < dur)
                        .collect();
                    emit(format!("{sname}_{tag}_{vname}"), arcs, vars);
                }
                continue;
            }
            for i in 0..last {
                let mode = match side {
                    Side::Pickup => DurationMode::PickupFromInstant { instant: i },
                    Side::Delivery => DurationMode::DeliverFromInstant { instant: i },
                };
                let dur = min_duration(inst, s, mode)?.map_or(usize::MAX, |d| i + d);
                let arcs: Vec<ArcId> = s
                    .iter()
                    .flat_map(|&r| g.service_arcs(r, side).iter().copied())
                    .filter(|&a| g.start(a) >= i && g.end(a) < dur)
                    .collect();
                for (vname, vars) in &groups {
                    emit(format!("{sname}_{tag}_{vname}_i{i}"), arcs.clone(), vars);
                }
            }
        }
    }
    Ok(out)
}

/// Arc kinds counted by a cut, for diagnostics.
pub fn cut_kinds(model: &MilpModel, g: &TimeGraph, cut: &Cut) -> Vec<ArcKind> {
    let mut kinds: Vec<ArcKind> = cut
        .coeffs
        .iter()
        .filter_map(|&(j, _)| match model.vars[j].kind {
            crate::formulation::VarKind::Truck { arc, .. } | crate::formulation::VarKind::Flow { arc } => Some(g.arcs[arc].kind),
            _ => None,
        })
        .collect();
    kinds.sort();
    kinds.dedup();
    kinds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulation::{build_model, warm_start_assignment, BuildOptions};
    use crate::graph::GraphConfig;
    use crate::model::example_instance;
    use crate::routes::tests::{example_drivers_passenger, example_trucks};
    use crate::routes::Plan;

    #[test]
    fn example_durations() {
        let inst = example_instance();
        let both = [0, 1];
        // Load r1 0-1, drive 1-2, unload 2-3, load r2 3-4, drive 4-5, unload 5-6.
        assert_eq!(min_duration(&inst, &both, DurationMode::DeliverFromStart { location: 0 }).unwrap(), Some(6));
        assert_eq!(min_duration(&inst, &both, DurationMode::PickupFromStart { location: 0 }).unwrap(), Some(4));
        // From l2 neither order fits: r1 cannot be delivered before r2's pickup window closes.
        assert_eq!(min_duration(&inst, &both, DurationMode::DeliverFromStart { location: 1 }).unwrap(), None);
        assert_eq!(min_duration(&inst, &[1], DurationMode::DeliverFromStart { location: 1 }).unwrap(), Some(6));
        // r2 already on board at instant 5: unload 5-6, then r1 cannot be loaded in time.
        assert_eq!(min_duration(&inst, &both, DurationMode::DeliverFromInstant { instant: 5 }).unwrap(), None);
        // r1 on board: unload 6-7.
        assert_eq!(min_duration(&inst, &[0], DurationMode::DeliverFromInstant { instant: 5 }).unwrap(), Some(2));
        assert!(min_duration(&inst, &[], DurationMode::DeliverFromInstant { instant: 0 }).is_err());
        assert!(min_duration(&inst, &[0, 5], DurationMode::DeliverFromInstant { instant: 0 }).is_err());
    }

    #[test]
    fn duration_monotone_in_subset() {
        let inst = example_instance();
        for loc in 0..2 {
            let mode = DurationMode::DeliverFromStart { location: loc };
            let pair = min_duration(&inst, &[0, 1], mode).unwrap().unwrap_or(usize::MAX);
            for r in 0..2 {
                assert!(pair >= min_duration(&inst, &[r], mode).unwrap().unwrap_or(usize::MAX));
            }
        }
    }

    #[test]
    fn example_plan_satisfies_every_cut() {
        let inst = example_instance();
        for flavor in Flavor::TRUCK {
            let graphs = Graphs::build(&inst, flavor, &GraphConfig::pruned());
            let model = build_model(&inst, &graphs, BuildOptions::new(flavor));
            let plan = Plan {
                trucks: example_trucks(&graphs.lt),
                drivers: example_drivers_passenger(&graphs.ltx),
                days_off: vec![vec![false]; 2],
            };
            let x = warm_start_assignment(&graphs, &model, &plan).unwrap();
            for variant in [Pd3Variant::A, Pd3Variant::B, Pd3Variant::Full] {
                let cfg = CutConfig {
                    pd3_variant: variant,
                    sec_k: 4,
                    ..CutConfig::default()
                };
                let pool = generate(&inst, &graphs, &model, &cfg).unwrap();
                assert!(!pool.is_empty());
                assert!(pool.separate(&x, 1e-9, usize::MAX).is_empty(), "{flavor:?}");
            }
        }
    }

    #[test]
    fn pool_dedupes_and_orders() {
        let mut pool = CutPool::new();
        let cut = |key: &str, rhs: f64| Cut {
            family: CutFamily::Pd1,
            key: key.into(),
            coeffs: vec![(0, 1.0), (1, 1.0)],
            sense: Sense::Le,
            rhs,
        };
        assert!(pool.add(cut("a", 1.0)));
        assert!(!pool.add(cut("a", 0.5)));
        assert!(!pool.add(cut("b", 1.0)));
        assert!(pool.add(cut("c", 0.5)));
        let sep = pool.separate(&[1.0, 0.8], 1e-6, 10);
        assert_eq!(sep.iter().map(|s| s.0).collect::<Vec<_>>(), vec![1, 0]);
        assert_eq!(pool.separate(&[1.0, 0.8], 1e-6, 1).len(), 1);
    }

    #[test]
    fn ltr_restrictions() {
        let inst = example_instance();
        let graphs = Graphs::build(&inst, Flavor::Ltr, &GraphConfig::pruned());
        let model = build_model(&inst, &graphs, BuildOptions::new(Flavor::Ltr));
        let pool = generate(&inst, &graphs, &model, &CutConfig::default()).unwrap();
        // Two trucks: per-truck families do not apply, PD3 only over both trucks.
        for f in [CutFamily::Pd1, CutFamily::Pd2, CutFamily::Sec1, CutFamily::Sec2] {
            assert_eq!(pool.count(f), 0, "{f:?}");
        }
        assert!(pool.count(CutFamily::Pd3) > 0);
        assert!(pool.count(CutFamily::Prec) > 0);
    }

    #[test]
    fn ltc_pd_uses_loaded_trips() {
        let inst = example_instance();
        let graphs = Graphs::build(&inst, Flavor::Ltc, &GraphConfig::pruned());
        let model = build_model(&inst, &graphs, BuildOptions::new(Flavor::Ltc));
        for cut in gen_pd12(&inst, &graphs, &model, false) {
            for &(j, c) in &cut.coeffs {
                if let crate::formulation::VarKind::Truck { arc, .. } = model.vars[j].kind {
                    if graphs.truck.arcs[arc].kind == ArcKind::Trip {
                        assert!(c > 0.0);
                        assert_eq!(graphs.truck.cargo(graphs.truck.arcs[arc].tail), Cargo::Loaded);
                    }
                }
            }
        }
    }
}
