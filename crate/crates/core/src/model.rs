//! Problem data: horizon, requests, fleet and travel tables.

use serde::{Deserialize, Serialize};

/// Planning horizon of `days` days, each split into `instants_per_day` instants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Horizon {
    pub days: usize,
    pub instants_per_day: usize,
}

impl Horizon {
    pub fn new(days: usize, instants_per_day: usize) -> Self {
        Horizon {
            days,
            instants_per_day,
        }
    }

    /// Last instant of the horizon; instants run over `0..=last()`.
    pub fn last(&self) -> usize {
        self.days * self.instants_per_day
    }

    pub fn day(&self, instant: usize) -> usize {
        instant / self.instants_per_day
    }

    pub fn time(&self, instant: usize) -> usize {
        instant % self.instants_per_day
    }

    pub fn instant(&self, day: usize, time: usize) -> usize {
        day * self.instants_per_day + time
    }
}

/// Time window `[open, close]` of a day. If `open > close` the window wraps
/// past midnight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub open: usize,
    pub close: usize,
}

impl TimeWindow {
    pub fn new(open: usize, close: usize) -> Self {
        TimeWindow { open, close }
    }

    pub fn wraps(&self) -> bool {
        self.open > self.close
    }

    pub fn contains(&self, time: usize) -> bool {
        if self.wraps() {
            time >= self.open || time <= self.close
        } else {
            self.open <= time && time <= self.close
        }
    }
}

/// One end (pickup or delivery) of a request.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Service {
    pub location: usize,
    /// First day on which the service may take place.
    pub day: usize,
    pub window: TimeWindow,
    /// Number of instants the service occupies.
    pub duration: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Pickup,
    Delivery,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub name: String,
    pub pickup: Service,
    pub delivery: Service,
    /// Cost per day of delivery after `delivery.day`.
    pub penalty: i64,
}

impl Request {
    pub fn service(&self, side: Side) -> &Service {
        match side {
            Side::Pickup => &self.pickup,
            Side::Delivery => &self.delivery,
        }
    }
}

/// A square table indexed by `[from][to]`.
pub type Table = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub horizon: Horizon,
    pub locations: Vec<String>,
    /// Start location of each truck.
    pub trucks: Vec<usize>,
    /// Start location of each driver.
    pub drivers: Vec<usize>,
    pub requests: Vec<Request>,
    /// Truck travel time in instants.
    pub truck_time: Table,
    pub truck_cost: Table,
    /// Taxi travel time in instants.
    pub taxi_time: Table,
    pub taxi_cost: Table,
    /// Free-form provenance, e.g. the generator settings.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Instance {
    pub fn num_locations(&self) -> usize {
        self.locations.len()
    }

    pub fn num_trucks(&self) -> usize {
        self.trucks.len()
    }

    pub fn num_drivers(&self) -> usize {
        self.drivers.len()
    }

    pub fn num_requests(&self) -> usize {
        self.requests.len()
    }

    /// Locations where at least one truck starts, sorted and deduplicated.
    pub fn truck_locations(&self) -> Vec<usize> {
        let mut v = self.trucks.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn driver_locations(&self) -> Vec<usize> {
        let mut v = self.drivers.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn trucks_at(&self, loc: usize) -> usize {
        self.trucks.iter().filter(|&&l| l == loc).count()
    }

    /// Instants at which the given service may start: on or after its day,
    /// inside the window, and finishing by the end of the horizon.
    pub fn service_start_instants(&self, request: usize, side: Side) -> Vec<usize> {
        let s = self.requests[request].service(side);
        let h = &self.horizon;
        let first = h.instant(s.day, 0);
        (first..=h.last())
            .filter(|&i| s.window.contains(h.time(i)))
            .filter(|&i| i + s.duration <= h.last())
            .collect()
    }

    /// Delay penalty of a delivery starting at `instant`.
    pub fn delay_penalty(&self, request: usize, instant: usize) -> i64 {
        let r = &self.requests[request];
        let late = self.horizon.day(instant) as i64 - r.delivery.day as i64;
        r.penalty * late
    }

    /// All-pairs shortest truck travel times. Equal to `truck_time` when the
    /// table satisfies the triangle inequality.
    pub fn truck_time_closure(&self) -> Vec<Vec<usize>> {
        closure(&self.truck_time)
    }

    /// All-pairs cheapest truck travel costs.
    pub fn truck_cost_closure(&self) -> Vec<Vec<usize>> {
        closure(&self.truck_cost)
    }

    /// Every structural problem with the instance. Empty means valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let h = &self.horizon;
        let nl = self.num_locations();
        if h.days == 0 {
            out.push("horizon has zero days".to_string());
        }
        if h.instants_per_day < 2 || h.instants_per_day % 2 != 0 {
            out.push(format!(
                "instants per day must be even and at least 2, got {}",
                h.instants_per_day
            ));
        }
        if nl == 0 {
            out.push("no locations".to_string());
        }
        for (name, table) in [
            ("truck_time", &self.truck_time),
            ("truck_cost", &self.truck_cost),
            ("taxi_time", &self.taxi_time),
            ("taxi_cost", &self.taxi_cost),
        ] {
            if table.len() != nl || table.iter().any(|row| row.len() != nl) {
                out.push(format!("{name} is not a {nl}x{nl} table"));
                continue;
            }
            for (a, row) in table.iter().enumerate() {
                for (b, &x) in row.iter().enumerate() {
                    if x < 0 {
                        out.push(format!("{name}[{a}][{b}] is negative"));
                    }
                    if a != b && x == 0 && name.ends_with("time") {
                        out.push(format!("{name}[{a}][{b}] is zero between distinct locations"));
                    }
                }
            }
        }
        for (v, &l) in self.trucks.iter().enumerate() {
            if l >= nl {
                out.push(format!("truck {v} starts at unknown location {l}"));
            }
        }
        for (d, &l) in self.drivers.iter().enumerate() {
            if l >= nl {
                out.push(format!("driver {d} starts at unknown location {l}"));
            }
        }
        for (r, req) in self.requests.iter().enumerate() {
            for side in [Side::Pickup, Side::Delivery] {
                let s = req.service(side);
                let tag = format!("request {} ({r}) {side:?}", req.name);
                if s.location >= nl {
                    out.push(format!("{tag}: unknown location {}", s.location));
                }
                if s.day >= h.days.max(1) {
                    out.push(format!("{tag}: day {} outside horizon", s.day));
                }
                if s.window.open >= h.instants_per_day || s.window.close >= h.instants_per_day {
                    out.push(format!("{tag}: window outside the day"));
                }
                if s.duration == 0 {
                    out.push(format!("{tag}: zero service time"));
                }
            }
            if req.pickup.location == req.delivery.location {
                out.push(format!("request {} ({r}): pickup and delivery coincide", req.name));
            }
            if req.penalty < 0 {
                out.push(format!("request {} ({r}): negative penalty", req.name));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for r in 0..self.num_requests() {
            for side in [Side::Pickup, Side::Delivery] {
                if self.service_start_instants(r, side).is_empty() {
                    out.push(format!(
                        "request {} ({r}): no admissible {side:?} instant",
                        self.requests[r].name
                    ));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> crate::Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(crate::Error::InvalidInstance(v))
        }
    }
}

fn closure(table: &Table) -> Vec<Vec<usize>> {
    let n = table.len();
    let mut d: Vec<Vec<usize>> = table
        .iter()
        .map(|row| row.iter().map(|&x| x.max(0) as usize).collect())
        .collect();
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// The two-location, one-day instance used throughout the documentation:
/// eight instants, unit travel times, two trucks, two drivers, two requests.
pub fn example_instance() -> Instance {
    let unit = vec![vec![0, 1], vec![1, 0]];
    let service = |location, open, close| Service {
        location,
        day: 0,
        window: TimeWindow::new(open, close),
        duration: 1,
    };
    Instance {
        name: "example".to_string(),
        horizon: Horizon::new(1, 8),
        locations: vec!["l1".to_string(), "l2".to_string()],
        trucks: vec![0, 1],
        drivers: vec![0, 1],
        requests: vec![
            Request {
                name: "r1".to_string(),
                pickup: service(0, 0, 2),
                delivery: service(1, 6, 2),
                penalty: 1,
            },
            Request {
                name: "r2".to_string(),
                pickup: service(1, 3, 5),
                delivery: service(0, 3, 5),
                penalty: 1,
            },
        ],
        truck_time: unit.clone(),
        truck_cost: unit.clone(),
        taxi_time: unit,
        taxi_cost: vec![vec![0, 2], vec![2, 0]],
        notes: Vec::new(),
    }
}
