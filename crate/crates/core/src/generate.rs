//! Seeded random instances on a synthetic planar network.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Horizon, Instance, Request, Service, Side, TimeWindow};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub name: String,
    pub seed: u64,
    pub locations: usize,
    pub requests: usize,
    pub days: usize,
    pub instants_per_day: usize,
    pub trucks: usize,
    pub drivers: usize,
    /// Width and height of the square area holding the locations, in km.
    pub box_km: (f64, f64),
    pub speed_kmh: f64,
    pub hours_per_instant: f64,
    pub service_hours: f64,
    /// Taxi cost per instant relative to the truck cost.
    pub taxi_cost_factor: i64,
    /// Penalties are drawn uniformly from `1..=max_penalty`.
    pub max_penalty: i64,
}

impl GenSpec {
    /// A one-day instance small enough for the exhaustive oracle.
    pub fn tiny(seed: u64) -> GenSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7419);
        GenSpec {
            name: format!("tiny-{seed}"),
            seed,
            locations: rng.gen_range(2..=3),
            requests: rng.gen_range(1..=3),
            days: 1,
            instants_per_day: 8,
            trucks: rng.gen_range(1..=2),
            drivers: 2,
            box_km: (400.0, 400.0),
            speed_kmh: 90.0,
            hours_per_instant: 3.0,
            service_hours: 1.0,
            taxi_cost_factor: 2,
            max_penalty: 3,
        }
    }

    /// The benchmark families with hourly instants, plus `desk`, a two-day
    /// shrink of S1. The request count (and for S5 the horizon) is drawn
    /// from the family's range using the seed.
    pub fn preset(name: &str, seed: u64) -> Result<GenSpec> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e75);
        let base = GenSpec {
            name: String::new(),
            seed,
            locations: 3,
            requests: 0,
            days: 7,
            instants_per_day: 24,
            trucks: 1,
            drivers: 2,
            box_km: (700.0, 700.0),
            speed_kmh: 90.0,
            hours_per_instant: 1.0,
            service_hours: 1.0,
            taxi_cost_factor: 2,
            max_penalty: 3,
        };
        let spec = match name.to_ascii_lowercase().as_str() {
            "tiny" => return Ok(GenSpec::tiny(seed)),
            // S1 shrunk to two days of eight three-hour instants.
            "desk" => GenSpec {
                requests: rng.gen_range(2..=3),
                days: 2,
                instants_per_day: 8,
                hours_per_instant: 3.0,
                ..base
            },
            "s1" => GenSpec {
                requests: rng.gen_range(4..=6),
                ..base
            },
            "s2" => GenSpec {
                requests: rng.gen_range(7..=9),
                ..base
            },
            "s3" => GenSpec {
                requests: rng.gen_range(8..=10),
                trucks: 2,
                drivers: 4,
                ..base
            },
            "s4" => GenSpec {
                locations: 6,
                requests: rng.gen_range(4..=6),
                ..base
            },
            "s5" => GenSpec {
                requests: *[40, 42].choose(&mut rng).unwrap(),
                days: *[40, 42].choose(&mut rng).unwrap(),
                drivers: 3,
                ..base
            },
            other => return Err(Error::Generator(format!("unknown preset {other}"))),
        };
        Ok(GenSpec {
            name: format!("{}-{seed}", name.to_ascii_uppercase()),
            ..spec
        })
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.locations < 2 {
            out.push("at least two locations are needed".into());
        }
        if self.days == 0 || self.instants_per_day == 0 {
            out.push("empty horizon".into());
        }
        if self.instants_per_day % 2 != 0 {
            out.push("instants per day must be even".into());
        }
        if self.trucks == 0 || self.drivers == 0 {
            out.push("at least one truck and one driver are needed".into());
        }
        if !(self.speed_kmh > 0.0 && self.hours_per_instant > 0.0 && self.service_hours > 0.0) {
            out.push("speed, discretisation and service time must be positive".into());
        }
        if !(self.box_km.0 >= 0.0 && self.box_km.1 >= 0.0) {
            out.push("negative area".into());
        }
        if self.taxi_cost_factor < 0 || self.max_penalty < 1 {
            out.push("taxi factor must be nonnegative and the penalty range nonempty".into());
        }
        out
    }
}

/// Instants needed to drive `km` at `speed_kmh` with instants of `hours` hours.
pub fn travel_instants(km: f64, speed_kmh: f64, hours: f64) -> usize {
    // Guard against 299.99999 style rounding pushing an exact fit up.
    ((km / speed_kmh / hours) - 1e-9).ceil().max(0.0) as usize
}

const TRIES: usize = 10_000;

/// Draws an instance. Deterministic in the spec.
pub fn generate(spec: &GenSpec) -> Result<Instance> {
    let bad = spec.violations();
    if !bad.is_empty() {
        return Err(Error::Generator(bad.join("; ")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let nl = spec.locations;
    let ipd = spec.instants_per_day;
    let horizon = Horizon::new(spec.days, ipd);

    // Locations, redrawn until every trip fits in half a day so a single
    // driver can make it without breaking the daily rest.
    let mut time = vec![vec![0i64; nl]; nl];
    let mut coords = Vec::new();
    let mut placed = false;
    for _ in 0..TRIES {
        coords = (0..nl)
            .map(|_| (rng.gen_range(0.0..=spec.box_km.0), rng.gen_range(0.0..=spec.box_km.1)))
            .collect::<Vec<(f64, f64)>>();
        for a in 0..nl {
            for b in 0..nl {
                if a != b {
                    let km = ((coords[a].0 - coords[b].0).powi(2) + (coords[a].1 - coords[b].1).powi(2)).sqrt();
                    time[a][b] = travel_instants(km, spec.speed_kmh, spec.hours_per_instant).max(1) as i64;
                }
            }
        }
        if time.iter().flatten().all(|&t| 2 * t as usize <= ipd) {
            placed = true;
            break;
        }
    }
    if !placed {
        return Err(Error::Generator("area too large for half-day trips".into()));
    }
    let taxi_cost: Vec<Vec<i64>> = time
        .iter()
        .map(|row| row.iter().map(|&t| spec.taxi_cost_factor * t).collect())
        .collect();
    let service = travel_instants(spec.service_hours, 1.0, spec.hours_per_instant).max(1);

    let mut inst = Instance {
        name: spec.name.clone(),
        horizon,
        locations: coords.iter().map(|c| format!("({:.0},{:.0})", c.0, c.1)).collect(),
        trucks: (0..spec.trucks).map(|_| rng.gen_range(0..nl)).collect(),
        drivers: (0..spec.drivers).map(|_| rng.gen_range(0..nl)).collect(),
        requests: Vec::new(),
        truck_time: time.clone(),
        truck_cost: time.clone(),
        taxi_time: time.clone(),
        taxi_cost,
        notes: vec![
            format!("seed {} spec {}", spec.seed, serde_json::to_string(spec)?),
            "locations uniform in the area; travel instants ceil(km / speed / hours), truck cost = time, taxi cost = factor * time".into(),
            "starts of trucks and drivers uniform over locations".into(),
            "request locations uniform and distinct; pickup day uniform over the horizon, delivery day uniform from the pickup day".into(),
            "window bounds uniform over the day (closing before opening wraps); penalty uniform in 1..=max_penalty".into(),
        ],
    };
    let closure = inst.truck_time_closure();
    for r in 0..spec.requests {
        let mut done = false;
        for _ in 0..TRIES {
            let lp = rng.gen_range(0..nl);
            let ld = (lp + rng.gen_range(1..nl)) % nl;
            let pday = rng.gen_range(0..spec.days);
            let dday = rng.gen_range(pday..spec.days);
            let window = |rng: &mut ChaCha8Rng| TimeWindow::new(rng.gen_range(0..ipd), rng.gen_range(0..ipd));
            let req = Request {
                name: format!("r{}", r + 1),
                pickup: Service {
                    location: lp,
                    day: pday,
                    window: window(&mut rng),
                    duration: service,
                },
                delivery: Service {
                    location: ld,
                    day: dday,
                    window: window(&mut rng),
                    duration: service,
                },
                penalty: rng.gen_range(1..=spec.max_penalty),
            };
            inst.requests.push(req);
            let ps = inst.service_start_instants(r, Side::Pickup);
            let ds = inst.service_start_instants(r, Side::Delivery);
            let servable = match (ps.first(), ds.last()) {
                (Some(&p), Some(&d)) => p + service + closure[lp][ld] <= d,
                _ => false,
            };
            if servable {
                done = true;
                break;
            }
            inst.requests.pop();
        }
        if !done {
            return Err(Error::Generator(format!("could not draw a servable request {}", r + 1)));
        }
    }
    inst.validate()?;
    Ok(inst)
}
