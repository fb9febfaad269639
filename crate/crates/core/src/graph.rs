//! Time-expanded digraphs.
//!
//! Every graph has a source, a sink and one node per (location, instant, cargo
//! tag). Node ids are assigned in order of instant, so they are a topological
//! order. The cargo tag depends on the flavor:
//!
//! * `Lt` / `Ltx`: no tag.
//! * `Ltc`: `Empty` or `Loaded`.
//! * `Ltr`: `Empty` or the request on board.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{Horizon, Instance, Side};

pub type NodeId = usize;
pub type ArcId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flavor {
    Lt,
    Ltc,
    Ltr,
    Ltx,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Lt => "LT",
            Flavor::Ltc => "LTC",
            Flavor::Ltr => "LTR",
            Flavor::Ltx => "LTX",
        }
    }

    pub fn parse(s: &str) -> Option<Flavor> {
        match s.to_ascii_uppercase().as_str() {
            "LT" => Some(Flavor::Lt),
            "LTC" => Some(Flavor::Ltc),
            "LTR" => Some(Flavor::Ltr),
            "LTX" => Some(Flavor::Ltx),
            _ => None,
        }
    }

    /// Flavors usable as the truck graph of a formulation.
    pub const TRUCK: [Flavor; 3] = [Flavor::Lt, Flavor::Ltc, Flavor::Ltr];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cargo {
    None,
    Empty,
    Loaded,
    Request(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Source,
    Sink,
    At {
        loc: usize,
        instant: usize,
        cargo: Cargo,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArcKind {
    Rest,
    Trip,
    Pickup(usize),
    Delivery(usize),
    Taxi,
    Source,
    Sink,
}

impl ArcKind {
    pub fn service(self) -> Option<(usize, Side)> {
        match self {
            ArcKind::Pickup(r) => Some((r, Side::Pickup)),
            ArcKind::Delivery(r) => Some((r, Side::Delivery)),
            _ => None,
        }
    }

    /// Trip, pickup and delivery arcs move a truck and need a driver on board.
    pub fn is_truck_work(self) -> bool {
        matches!(self, ArcKind::Trip | ArcKind::Pickup(_) | ArcKind::Delivery(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub kind: ArcKind,
    pub tail: NodeId,
    pub head: NodeId,
    pub weight: i64,
}

/// Identity of an arc with the cargo tags dropped. Arcs of different graphs
/// correspond when their keys are equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcKey {
    pub kind: ArcKind,
    pub from: Option<(usize, usize)>,
    pub to: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Default)]
pub struct GraphConfig {
    /// Remove nodes that lie on no source-to-sink path (LTC and LTR only).
    pub prune: bool,
    /// Optional adjacency matrix restricting trip arcs.
    pub adjacency: Option<Vec<Vec<bool>>>,
}

impl GraphConfig {
    pub fn pruned() -> Self {
        GraphConfig {
            prune: true,
            adjacency: None,
        }
    }

    pub fn unpruned() -> Self {
        GraphConfig {
            prune: false,
            adjacency: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TimeGraph {
    pub flavor: Flavor,
    pub horizon: Horizon,
    pub num_locations: usize,
    pub num_requests: usize,
    pub nodes: Vec<Node>,
    pub arcs: Vec<Arc>,
    pub out_arcs: Vec<Vec<ArcId>>,
    pub in_arcs: Vec<Vec<ArcId>>,
    pub source: NodeId,
    pub sink: NodeId,
    node_lookup: HashMap<(usize, usize, Cargo), NodeId>,
    key_lookup: HashMap<ArcKey, Vec<ArcId>>,
    pub rest_arcs: Vec<ArcId>,
    pub trip_arcs: Vec<ArcId>,
    pub taxi_arcs: Vec<ArcId>,
    pub source_arcs: Vec<ArcId>,
    pub sink_arcs: Vec<ArcId>,
    pub pickup_arcs: Vec<Vec<ArcId>>,
    pub delivery_arcs: Vec<Vec<ArcId>>,
}

impl TimeGraph {
    pub fn build(inst: &Instance, flavor: Flavor, cfg: &GraphConfig) -> TimeGraph {
        let raw = raw_arcs(inst, flavor, cfg);
        let pruning = cfg.prune && matches!(flavor, Flavor::Ltc | Flavor::Ltr);
        let keep = if pruning {
            live_nodes(&raw)
        } else {
            vec![true; raw.nodes.len()]
        };
        assemble(inst, flavor, raw, &keep)
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn node_at(&self, loc: usize, instant: usize, cargo: Cargo) -> Option<NodeId> {
        self.node_lookup.get(&(loc, instant, cargo)).copied()
    }

    /// Location and instant of a node, `None` for source and sink.
    pub fn point(&self, node: NodeId) -> Option<(usize, usize)> {
        match self.nodes[node] {
            Node::At { loc, instant, .. } => Some((loc, instant)),
            _ => None,
        }
    }

    pub fn cargo(&self, node: NodeId) -> Cargo {
        match self.nodes[node] {
            Node::At { cargo, .. } => cargo,
            _ => Cargo::None,
        }
    }

    pub fn key(&self, arc: ArcId) -> ArcKey {
        let a = &self.arcs[arc];
        ArcKey {
            kind: a.kind,
            from: self.point(a.tail),
            to: self.point(a.head),
        }
    }

    /// Arcs of this graph sharing `key`.
    pub fn arcs_with_key(&self, key: &ArcKey) -> &[ArcId] {
        self.key_lookup.get(key).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Tail location; for a source arc, the location it enters.
    pub fn tail_loc(&self, arc: ArcId) -> usize {
        let a = &self.arcs[arc];
        self.point(a.tail).or(self.point(a.head)).unwrap().0
    }

    /// Head location; for a sink arc, the location it leaves.
    pub fn head_loc(&self, arc: ArcId) -> usize {
        let a = &self.arcs[arc];
        self.point(a.head).or(self.point(a.tail)).unwrap().0
    }

    /// Start instant of an arc. Source arcs start at 0, sink arcs at the end.
    pub fn start(&self, arc: ArcId) -> usize {
        let a = &self.arcs[arc];
        match self.nodes[a.tail] {
            Node::At { instant, .. } => instant,
            _ => 0,
        }
    }

    pub fn end(&self, arc: ArcId) -> usize {
        let a = &self.arcs[arc];
        match self.nodes[a.head] {
            Node::At { instant, .. } => instant,
            _ => self.horizon.last(),
        }
    }

    pub fn service_arcs(&self, r: usize, side: Side) -> &[ArcId] {
        match side {
            Side::Pickup => &self.pickup_arcs[r],
            Side::Delivery => &self.delivery_arcs[r],
        }
    }

    /// Arcs available to an agent starting at `loc`: everything except the
    /// source arcs into other locations.
    pub fn agent_arcs(&self, loc: usize) -> Vec<ArcId> {
        (0..self.arcs.len())
            .filter(|&a| self.arcs[a].kind != ArcKind::Source || self.head_loc(a) == loc)
            .collect()
    }

    pub fn agent_source_arc(&self, loc: usize) -> Option<ArcId> {
        self.source_arcs
            .iter()
            .copied()
            .find(|&a| self.head_loc(a) == loc)
    }

    /// Upper bound on the aggregated truck flow through an arc of an LTR graph.
    pub fn ltr_capacity(&self, inst: &Instance, arc: ArcId) -> i64 {
        let a = &self.arcs[arc];
        if a.kind == ArcKind::Source {
            return inst.trucks_at(self.head_loc(arc)) as i64;
        }
        let tagged = |n: NodeId| matches!(self.cargo(n), Cargo::Request(_));
        if tagged(a.tail) || tagged(a.head) {
            1
        } else {
            inst.num_trucks() as i64
        }
    }

    /// A Graphviz rendering with nodes placed on a location/instant grid.
    pub fn to_dot(&self, inst: &Instance) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph {} {{", self.flavor.name());
        let _ = writeln!(s, "  rankdir=LR;");
        for (n, node) in self.nodes.iter().enumerate() {
            let label = match node {
                Node::Source => "source".to_string(),
                Node::Sink => "sink".to_string(),
                Node::At {
                    loc,
                    instant,
                    cargo,
                } => {
                    let tag = match cargo {
                        Cargo::None => String::new(),
                        Cargo::Empty => " o".to_string(),
                        Cargo::Loaded => " *".to_string(),
                        Cargo::Request(r) => format!(" {}", inst.requests[*r].name),
                    };
                    format!("{}@{}{}", inst.locations[*loc], instant, tag)
                }
            };
            let _ = writeln!(s, "  n{n} [label=\"{label}\"];");
        }
        for a in &self.arcs {
            let (label, style) = match a.kind {
                ArcKind::Rest => (String::new(), "dotted"),
                ArcKind::Trip => (format!("{}", a.weight), "solid"),
                ArcKind::Pickup(r) => (format!("P {}", inst.requests[r].name), "bold"),
                ArcKind::Delivery(r) => (format!("D {}", inst.requests[r].name), "bold"),
                ArcKind::Taxi => (format!("taxi {}", a.weight), "dashed"),
                ArcKind::Source | ArcKind::Sink => (String::new(), "dotted"),
            };
            let _ = writeln!(
                s,
                "  n{} -> n{} [label=\"{}\", style={}];",
                a.tail, a.head, label, style
            );
        }
        s.push_str("}\n");
        s
    }
}

struct RawGraph {
    nodes: Vec<Node>,
    arcs: Vec<Arc>,
}

fn tags(inst: &Instance, flavor: Flavor) -> Vec<Cargo> {
    match flavor {
        Flavor::Lt | Flavor::Ltx => vec![Cargo::None],
        Flavor::Ltc => vec![Cargo::Empty, Cargo::Loaded],
        Flavor::Ltr => std::iter::once(Cargo::Empty)
            .chain((0..inst.num_requests()).map(Cargo::Request))
            .collect(),
    }
}

fn raw_arcs(inst: &Instance, flavor: Flavor, cfg: &GraphConfig) -> RawGraph {
    let h = inst.horizon;
    let last = h.last();
    let nl = inst.num_locations();
    let tags = tags(inst, flavor);
    let nt = tags.len();
    let home = tags[0];

    // Node 0 is the source, then (instant, location, tag) in that order, then the sink.
    let mut nodes = vec![Node::Source];
    for instant in 0..=last {
        for loc in 0..nl {
            for &cargo in &tags {
                nodes.push(Node::At {
                    loc,
                    instant,
                    cargo,
                });
            }
        }
    }
    nodes.push(Node::Sink);
    let sink = nodes.len() - 1;
    let tag_index = |c: Cargo| tags.iter().position(|&t| t == c).unwrap();
    let id = |loc: usize, instant: usize, cargo: Cargo| 1 + (instant * nl + loc) * nt + tag_index(cargo);

    let mut arcs = Vec::new();
    let mut push = |kind, tail, head, weight| {
        arcs.push(Arc {
            kind,
            tail,
            head,
            weight,
        })
    };

    let sources: Vec<usize> = if flavor == Flavor::Ltx {
        inst.driver_locations()
    } else {
        inst.truck_locations()
    };
    for &l in &sources {
        push(ArcKind::Source, 0, id(l, 0, home), 0);
    }

    let pickups: Vec<Vec<usize>> = (0..inst.num_requests())
        .map(|r| inst.service_start_instants(r, Side::Pickup))
        .collect();
    let deliveries: Vec<Vec<usize>> = (0..inst.num_requests())
        .map(|r| inst.service_start_instants(r, Side::Delivery))
        .collect();
    let adjacent = |a: usize, b: usize| {
        cfg.adjacency
            .as_ref()
            .map_or(true, |m| m[a][b])
    };

    for i in 0..=last {
        for l in 0..nl {
            for &c in &tags {
                if i < last {
                    push(ArcKind::Rest, id(l, i, c), id(l, i + 1, c), 0);
                }
                for l2 in 0..nl {
                    if l2 == l || !adjacent(l, l2) {
                        continue;
                    }
                    let len = inst.truck_time[l][l2] as usize;
                    if i + len <= last {
                        push(
                            ArcKind::Trip,
                            id(l, i, c),
                            id(l2, i + len, c),
                            if flavor == Flavor::Ltx { 0 } else { inst.truck_cost[l][l2] },
                        );
                    }
                }
            }
            for (r, req) in inst.requests.iter().enumerate() {
                if req.pickup.location == l && pickups[r].contains(&i) {
                    let (from, to) = match flavor {
                        Flavor::Ltc => (Cargo::Empty, Cargo::Loaded),
                        Flavor::Ltr => (Cargo::Empty, Cargo::Request(r)),
                        _ => (Cargo::None, Cargo::None),
                    };
                    push(
                        ArcKind::Pickup(r),
                        id(l, i, from),
                        id(l, i + req.pickup.duration, to),
                        0,
                    );
                }
                if req.delivery.location == l && deliveries[r].contains(&i) {
                    let (from, to) = match flavor {
                        Flavor::Ltc => (Cargo::Loaded, Cargo::Empty),
                        Flavor::Ltr => (Cargo::Request(r), Cargo::Empty),
                        _ => (Cargo::None, Cargo::None),
                    };
                    push(
                        ArcKind::Delivery(r),
                        id(l, i, from),
                        id(l, i + req.delivery.duration, to),
                        if flavor == Flavor::Ltx { 0 } else { inst.delay_penalty(r, i) },
                    );
                }
            }
            if flavor == Flavor::Ltx {
                for l2 in 0..nl {
                    if l2 == l {
                        continue;
                    }
                    let len = inst.taxi_time[l][l2] as usize;
                    if i + len <= last {
                        push(
                            ArcKind::Taxi,
                            id(l, i, Cargo::None),
                            id(l2, i + len, Cargo::None),
                            inst.taxi_cost[l][l2],
                        );
                    }
                }
            }
        }
    }
    for l in 0..nl {
        push(ArcKind::Sink, id(l, last, home), sink, 0);
    }
    RawGraph { nodes, arcs }
}

/// Nodes reachable from the source and co-reachable to the sink.
fn live_nodes(raw: &RawGraph) -> Vec<bool> {
    let n = raw.nodes.len();
    let mut out = vec![Vec::new(); n];
    let mut inn = vec![Vec::new(); n];
    for a in &raw.arcs {
        out[a.tail].push(a.head);
        inn[a.head].push(a.tail);
    }
    let reach = |start: usize, adj: &Vec<Vec<usize>>| {
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut q = VecDeque::from([start]);
        while let Some(u) = q.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        seen
    };
    let fwd = reach(0, &out);
    let bwd = reach(n - 1, &inn);
    fwd.iter().zip(&bwd).map(|(&a, &b)| a && b).collect()
}

fn assemble(inst: &Instance, flavor: Flavor, raw: RawGraph, keep: &[bool]) -> TimeGraph {
    let mut remap = vec![usize::MAX; raw.nodes.len()];
    let mut nodes = Vec::new();
    for (old, node) in raw.nodes.iter().enumerate() {
        if keep[old] {
            remap[old] = nodes.len();
            nodes.push(*node);
        }
    }
    let arcs: Vec<Arc> = raw
        .arcs
        .iter()
        .filter(|a| keep[a.tail] && keep[a.head])
        .map(|a| Arc {
            tail: remap[a.tail],
            head: remap[a.head],
            ..*a
        })
        .collect();
    let nr = inst.num_requests();
    let mut g = TimeGraph {
        flavor,
        horizon: inst.horizon,
        num_locations: inst.num_locations(),
        num_requests: nr,
        out_arcs: vec![Vec::new(); nodes.len()],
        in_arcs: vec![Vec::new(); nodes.len()],
        source: 0,
        sink: nodes.len() - 1,
        node_lookup: HashMap::new(),
        key_lookup: HashMap::new(),
        rest_arcs: Vec::new(),
        trip_arcs: Vec::new(),
        taxi_arcs: Vec::new(),
        source_arcs: Vec::new(),
        sink_arcs: Vec::new(),
        pickup_arcs: vec![Vec::new(); nr],
        delivery_arcs: vec![Vec::new(); nr],
        nodes,
        arcs,
    };
    for (n, node) in g.nodes.iter().enumerate() {
        if let Node::At {
            loc,
            instant,
            cargo,
        } = *node
        {
            g.node_lookup.insert((loc, instant, cargo), n);
        }
    }
    for (id, a) in g.arcs.iter().enumerate() {
        g.out_arcs[a.tail].push(id);
        g.in_arcs[a.head].push(id);
        match a.kind {
            ArcKind::Rest => g.rest_arcs.push(id),
            ArcKind::Trip => g.trip_arcs.push(id),
            ArcKind::Taxi => g.taxi_arcs.push(id),
            ArcKind::Source => g.source_arcs.push(id),
            ArcKind::Sink => g.sink_arcs.push(id),
            ArcKind::Pickup(r) => g.pickup_arcs[r].push(id),
            ArcKind::Delivery(r) => g.delivery_arcs[r].push(id),
        }
    }
    for id in 0..g.arcs.len() {
        let k = g.key(id);
        g.key_lookup.entry(k).or_default().push(id);
    }
    g
}

/// The graphs a formulation works on: the truck graph of the chosen flavor,
/// the plain graph used for canonical truck routes, and the driver graph.
#[derive(Clone, Debug)]
pub struct Graphs {
    pub truck: TimeGraph,
    pub lt: TimeGraph,
    pub ltx: TimeGraph,
}

impl Graphs {
    pub fn build(inst: &Instance, flavor: Flavor, cfg: &GraphConfig) -> Graphs {
        assert!(flavor != Flavor::Ltx, "LTX is not a truck graph");
        let lt = TimeGraph::build(inst, Flavor::Lt, cfg);
        let truck = if flavor == Flavor::Lt {
            lt.clone()
        } else {
            TimeGraph::build(inst, flavor, cfg)
        };
        Graphs {
            truck,
            lt,
            ltx: TimeGraph::build(inst, Flavor::Ltx, cfg),
        }
    }
}

/// Arcs of `target` corresponding to a trip, pickup or delivery arc of an LTX
/// graph.
pub fn arc_correspondence<'a>(
    ltx: &TimeGraph,
    arc: ArcId,
    target: &'a TimeGraph,
) -> crate::Result<&'a [ArcId]> {
    if !ltx.arcs[arc].kind.is_truck_work() {
        return Err(crate::Error::NotWorkArc(arc));
    }
    Ok(target.arcs_with_key(&ltx.key(arc)))
}
