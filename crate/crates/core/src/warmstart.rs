//! Greedy construction of a feasible plan.
//!
//! Each used truck gets one dedicated driver who rides along on every work
//! arc. Requests are taken by earliest delivery day and appended to the truck
//! that finishes them first. Work is only placed where the driver keeps at
//! least half of every day-long window as rest, and when the horizon spans a
//! week or more every seventh day is kept free as a day off.

use crate::graph::{ArcId, ArcKey, ArcKind, Graphs, TimeGraph};
use crate::model::{Instance, Side};
use crate::routes::Plan;

#[derive(Clone, Copy, Debug)]
struct Block {
    kind: ArcKind,
    from: usize,
    to: usize,
    start: usize,
    len: usize,
}

#[derive(Clone, Debug)]
struct Schedule {
    loc: usize,
    free_at: usize,
    /// Instants during which the driver works (taxi included).
    busy: Vec<bool>,
    blocks: Vec<Block>,
    driver: usize,
    taxi: Option<Block>,
}

struct Ctx<'a> {
    inst: &'a Instance,
    last: usize,
    ipd: usize,
    weekly: bool,
}

impl Ctx<'_> {
    /// Whether `[start, start + len)` can be worked on top of `busy`.
    fn fits(&self, busy: &[bool], start: usize, len: usize) -> bool {
        if start + len > self.last {
            return false;
        }
        if self.weekly && (start..start + len).any(|t| (t / self.ipd) % 7 == 6) {
            return false;
        }
        if (start..start + len).any(|t| busy[t]) {
            return false;
        }
        let lo = (start + 1).saturating_sub(self.ipd);
        let hi = (start + len - 1).min(self.last - self.ipd);
        (lo..=hi).all(|w| {
            let work = (w..w + self.ipd)
                .filter(|&t| busy[t] || (start..start + len).contains(&t))
                .count();
            2 * work <= self.ipd
        })
    }

    fn place(&self, busy: &mut [bool], earliest: usize, len: usize, allowed: Option<&[usize]>) -> Option<usize> {
        let start = match allowed {
            Some(list) => list.iter().copied().find(|&t| t >= earliest && self.fits(busy, t, len))?,
            None => (earliest..self.last).find(|&t| self.fits(busy, t, len))?,
        };
        for b in busy.iter_mut().skip(start).take(len) {
            *b = true;
        }
        Some(start)
    }

    /// Appends request `r` to a schedule. Returns the updated schedule.
    fn insert(&self, s: &Schedule, r: usize) -> Option<Schedule> {
        let inst = self.inst;
        let req = &inst.requests[r];
        let mut s = s.clone();
        let mut t = s.free_at;
        if s.blocks.is_empty() && s.taxi.is_none() {
            let dloc = inst.drivers[s.driver];
            if dloc != s.loc {
                let len = inst.taxi_time[dloc][s.loc] as usize;
                let start = self.place(&mut s.busy, 0, len, None)?;
                s.taxi = Some(Block {
                    kind: ArcKind::Taxi,
                    from: dloc,
                    to: s.loc,
                    start,
                    len,
                });
                t = t.max(start + len);
            }
        }
        let go = |s: &mut Schedule, t: &mut usize, to: usize| -> Option<()> {
            if s.loc != to {
                let len = inst.truck_time[s.loc][to] as usize;
                let start = self.place(&mut s.busy, *t, len, None)?;
                s.blocks.push(Block {
                    kind: ArcKind::Trip,
                    from: s.loc,
                    to,
                    start,
                    len,
                });
                s.loc = to;
                *t = start + len;
            }
            Some(())
        };
        for (side, kind) in [(Side::Pickup, ArcKind::Pickup(r)), (Side::Delivery, ArcKind::Delivery(r))] {
            let svc = req.service(side);
            go(&mut s, &mut t, svc.location)?;
            let allowed = inst.service_start_instants(r, side);
            let start = self.place(&mut s.busy, t, svc.duration, Some(&allowed))?;
            s.blocks.push(Block {
                kind,
                from: svc.location,
                to: svc.location,
                start,
                len: svc.duration,
            });
            t = start + svc.duration;
        }
        s.free_at = t;
        Some(s)
    }
}

fn arc(g: &TimeGraph, kind: ArcKind, from: Option<(usize, usize)>, to: Option<(usize, usize)>) -> ArcId {
    g.arcs_with_key(&ArcKey { kind, from, to })[0]
}

/// Fills the gaps between blocks with rest arcs and closes the route.
fn route(g: &TimeGraph, start_loc: usize, blocks: &[Block]) -> Vec<ArcId> {
    let last = g.horizon.last();
    let mut out = vec![arc(g, ArcKind::Source, None, Some((start_loc, 0)))];
    let (mut loc, mut t) = (start_loc, 0);
    let rest_until = |out: &mut Vec<ArcId>, loc: usize, t: &mut usize, until: usize| {
        while *t < until {
            out.push(arc(g, ArcKind::Rest, Some((loc, *t)), Some((loc, *t + 1))));
            *t += 1;
        }
    };
    for b in blocks {
        rest_until(&mut out, loc, &mut t, b.start);
        out.push(arc(g, b.kind, Some((b.from, b.start)), Some((b.to, b.start + b.len))));
        loc = b.to;
        t = b.start + b.len;
    }
    rest_until(&mut out, loc, &mut t, last);
    out.push(arc(g, ArcKind::Sink, Some((loc, last)), None));
    out
}

/// A feasible plan built greedily, or `None` when some request cannot be
/// placed.
pub fn greedy_warm_start(inst: &Instance, graphs: &Graphs) -> Option<Plan> {
    let ctx = Ctx {
        inst,
        last: inst.horizon.last(),
        ipd: inst.horizon.instants_per_day,
        weekly: inst.horizon.days >= 7,
    };
    // Pair trucks with drivers: same location first, then nearest by taxi.
    let mut taken = vec![false; inst.num_drivers()];
    let mut pairs: Vec<Option<usize>> = vec![None; inst.num_trucks()];
    for (v, &l) in inst.trucks.iter().enumerate() {
        if let Some(d) = (0..inst.num_drivers()).find(|&d| !taken[d] && inst.drivers[d] == l) {
            taken[d] = true;
            pairs[v] = Some(d);
        }
    }
    for (v, &l) in inst.trucks.iter().enumerate() {
        if pairs[v].is_some() {
            continue;
        }
        if let Some(d) = (0..inst.num_drivers())
            .filter(|&d| !taken[d])
            .min_by_key(|&d| (inst.taxi_time[inst.drivers[d]][l], d))
        {
            taken[d] = true;
            pairs[v] = Some(d);
        }
    }
    let mut scheds: Vec<Option<Schedule>> = pairs
        .iter()
        .enumerate()
        .map(|(v, d)| {
            d.map(|driver| Schedule {
                loc: inst.trucks[v],
                free_at: 0,
                busy: vec![false; ctx.last],
                blocks: Vec::new(),
                driver,
                taxi: None,
            })
        })
        .collect();

    let mut order: Vec<usize> = (0..inst.num_requests()).collect();
    order.sort_by_key(|&r| {
        let first = inst.service_start_instants(r, Side::Delivery).first().copied();
        (inst.requests[r].delivery.day, first, r)
    });
    for r in order {
        let best = scheds
            .iter()
            .enumerate()
            .filter_map(|(v, s)| s.as_ref().and_then(|s| ctx.insert(s, r)).map(|n| (v, n)))
            .min_by_key(|(v, n)| (n.free_at, *v))?;
        scheds[best.0] = Some(best.1);
    }

    let (lt, ltx) = (&graphs.lt, &graphs.ltx);
    let mut trucks = vec![Vec::new(); inst.num_trucks()];
    let mut drivers: Vec<Vec<ArcId>> = inst.drivers.iter().map(|&l| route(ltx, l, &[])).collect();
    for (v, s) in scheds.iter().enumerate() {
        let Some(s) = s else { continue };
        if s.blocks.is_empty() {
            continue;
        }
        trucks[v] = route(lt, inst.trucks[v], &s.blocks);
        let mut dblocks: Vec<Block> = s.taxi.into_iter().collect();
        dblocks.extend(s.blocks.iter().copied());
        drivers[s.driver] = route(ltx, inst.drivers[s.driver], &dblocks);
    }
    let days_off = drivers
        .iter()
        .map(|r| {
            let rest = crate::routes::rest_profile(ltx, r);
            (0..inst.horizon.days)
                .map(|j| ctx.weekly && rest[j * ctx.ipd..(j + 1) * ctx.ipd].iter().all(|&x| x))
                .collect()
        })
        .collect();
    let plan = Plan {
        trucks,
        drivers,
        days_off,
    };
    debug_assert!(plan.is_feasible(inst, graphs), "{:?}", plan.violations(inst, lt, ltx));
    Some(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Flavor, GraphConfig};
    use crate::model::example_instance;

    #[test]
    fn example_warm_start() {
        let inst = example_instance();
        let graphs = Graphs::build(&inst, Flavor::Lt, &GraphConfig::pruned());
        let plan = greedy_warm_start(&inst, &graphs).unwrap();
        assert!(plan.is_feasible(&inst, &graphs));
        assert!(plan.cost(&graphs.lt, &graphs.ltx).total >= 2);
    }

    #[test]
    fn no_requests_gives_empty_plan() {
        let mut inst = example_instance();
        inst.requests.clear();
        let graphs = Graphs::build(&inst, Flavor::Lt, &GraphConfig::pruned());
        let plan = greedy_warm_start(&inst, &graphs).unwrap();
        assert!(plan.trucks.iter().all(|t| t.is_empty()));
        assert_eq!(plan.cost(&graphs.lt, &graphs.ltx).total, 0);
        assert!(plan.is_feasible(&inst, &graphs));
    }

    #[test]
    fn driver_far_from_truck_takes_taxi() {
        let mut inst = example_instance();
        inst.drivers = vec![1, 1];
        let graphs = Graphs::build(&inst, Flavor::Lt, &GraphConfig::pruned());
        let plan = greedy_warm_start(&inst, &graphs).unwrap();
        assert!(plan.is_feasible(&inst, &graphs));
    }

    #[test]
    fn no_drivers_means_no_plan() {
        let mut inst = example_instance();
        inst.drivers.clear();
        let graphs = Graphs::build(&inst, Flavor::Lt, &GraphConfig::pruned());
        assert!(greedy_warm_start(&inst, &graphs).is_none());
    }
}
