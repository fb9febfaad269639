//! LP-based branch-and-cut over a [`MilpModel`].
//!
//! One simplex instance is shared by the whole tree. Cuts are globally valid,
//! so they are appended as ordinary rows; each open node stores its bound
//! changes and the basis of its parent, which is reloaded before solving.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cuts::CutPool;
use crate::formulation::MilpModel;
use crate::lp::{Basis, LpParams, LpStatus, Simplex};

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Maximum number of nodes processed after the root. `Some(0)` stops after the root.
    pub node_limit: Option<usize>,
    pub time_limit: Option<Duration>,
    /// Separation rounds at the root.
    pub root_cut_rounds: usize,
    /// Separation rounds at other nodes.
    pub node_cut_rounds: usize,
    pub cuts_per_round: usize,
    pub cut_tol: f64,
    pub int_tol: f64,
    /// Absolute optimality gap; ignored when the objective is known to be integral.
    pub abs_gap: f64,
    /// A feasible assignment to start from.
    pub incumbent: Option<Vec<f64>>,
    /// Log a progress line every this many nodes (0 disables).
    pub log_every: usize,
    pub lp: LpParams,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            node_limit: None,
            time_limit: None,
            root_cut_rounds: 50,
            node_cut_rounds: 2,
            cuts_per_round: 200,
            cut_tol: 1e-6,
            int_tol: 1e-6,
            abs_gap: 1e-6,
            incumbent: None,
            log_every: 100,
            lp: LpParams::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    /// A limit was hit with an incumbent in hand.
    Feasible,
    Infeasible,
    /// A limit was hit before any feasible solution was found.
    LimitReached,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub x: Option<Vec<f64>>,
    /// Best proven lower bound.
    pub bound: f64,
    /// Root LP value before any cut.
    pub root_lp: f64,
    /// Root LP value after the cut loop.
    pub root_bound: f64,
    pub nodes: usize,
    pub cuts_added: usize,
    pub lp_iterations: usize,
    pub seconds: f64,
}

impl SolveResult {
    /// Relative gap between incumbent and bound, if there is an incumbent.
    pub fn gap(&self) -> Option<f64> {
        self.objective.map(|o| gap(o, self.bound))
    }
}

fn gap(inc: f64, bound: f64) -> f64 {
    ((inc - bound) / inc.abs().max(1.0)).max(0.0)
}

struct Node {
    bound: f64,
    depth: usize,
    id: usize,
    changes: Vec<(usize, f64, f64)>,
    basis: Basis,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap: smallest bound first, then deepest, then newest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(self.id.cmp(&other.id))
    }
}

struct Tree<'a> {
    model: &'a MilpModel,
    pool: Option<&'a CutPool>,
    cfg: &'a SolverConfig,
    sx: Simplex,
    root_lo: Vec<f64>,
    root_hi: Vec<f64>,
    in_lp: Vec<bool>,
    cuts_added: usize,
    integral_obj: bool,
}

impl Tree<'_> {
    fn apply(&mut self, changes: &[(usize, f64, f64)]) {
        for j in 0..self.root_lo.len() {
            let (lo, hi) = self.sx.col_bounds(j);
            if lo != self.root_lo[j] || hi != self.root_hi[j] {
                self.sx.set_col_bounds(j, self.root_lo[j], self.root_hi[j]);
            }
        }
        for &(j, lo, hi) in changes {
            let (l0, h0) = self.sx.col_bounds(j);
            self.sx.set_col_bounds(j, l0.max(lo), h0.min(hi));
        }
    }

    /// Solves the current LP, separating pool cuts for up to `rounds` rounds.
    fn solve(&mut self, rounds: usize) -> LpStatus {
        let mut st = self.sx.solve();
        let Some(pool) = self.pool else { return st };
        for _ in 0..rounds {
            if st != LpStatus::Optimal {
                break;
            }
            let violated = pool.separate(self.sx.x(), self.cfg.cut_tol, usize::MAX);
            let fresh: Vec<usize> = violated
                .into_iter()
                .map(|(i, _)| i)
                .filter(|&i| !self.in_lp[i])
                .take(self.cfg.cuts_per_round)
                .collect();
            if fresh.is_empty() {
                break;
            }
            let rows: Vec<_> = fresh
                .iter()
                .map(|&i| {
                    let c = &pool.cuts[i];
                    let (lo, hi) = c.sense.bounds(c.rhs);
                    (c.coeffs.clone(), lo, hi)
                })
                .collect();
            for &i in &fresh {
                self.in_lp[i] = true;
            }
            self.cuts_added += fresh.len();
            self.sx.add_rows(&rows);
            st = self.sx.solve();
        }
        st
    }

    fn node_bound(&self, obj: f64) -> f64 {
        if self.integral_obj {
            (obj - 1e-6).ceil()
        } else {
            obj
        }
    }

    fn prunes(&self, bound: f64, inc: Option<f64>) -> bool {
        match inc {
            None => false,
            Some(v) if self.integral_obj => bound > v - 0.5,
            Some(v) => bound >= v - self.cfg.abs_gap,
        }
    }

    /// Most fractional integer variable, lowest index on ties.
    fn branch_var(&self, x: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (j, v) in self.model.vars.iter().enumerate() {
            if !v.integer {
                continue;
            }
            let f = x[j] - x[j].floor();
            if f <= self.cfg.int_tol || f >= 1.0 - self.cfg.int_tol {
                continue;
            }
            let score = (f - 0.5).abs();
            if best.is_none_or(|(_, s)| score < s - 1e-12) {
                best = Some((j, score));
            }
        }
        best.map(|b| b.0)
    }

    fn rounded(&self, x: &[f64]) -> Vec<f64> {
        self.model
            .vars
            .iter()
            .zip(x)
            .map(|(v, &xv)| if v.integer { xv.round() } else { xv })
            .collect()
    }
}

/// Solves `model` to optimality (or until a limit), separating from `pool`.
pub fn solve_milp(model: &MilpModel, pool: Option<&CutPool>, cfg: &SolverConfig) -> SolveResult {
    let start = Instant::now();
    let p = model.to_lp();
    let integral_obj = model
        .vars
        .iter()
        .all(|v| v.cost == 0.0 || (v.integer && v.cost.fract() == 0.0));
    let mut tree = Tree {
        model,
        pool,
        cfg,
        sx: Simplex::new(&p, cfg.lp.clone()),
        root_lo: p.col_lower.clone(),
        root_hi: p.col_upper.clone(),
        in_lp: vec![false; pool.map_or(0, |p| p.len())],
        cuts_added: 0,
        integral_obj,
    };

    let mut inc: Option<(f64, Vec<f64>)> = None;
    if let Some(x) = &cfg.incumbent {
        if x.len() == model.num_vars() && model.first_violation(x, 1e-6).is_none() {
            inc = Some((model.objective(x), x.clone()));
        } else {
            log::warn!("ignoring infeasible warm start");
        }
    }

    let elapsed = |s: &Instant| s.elapsed().as_secs_f64();
    let finish = |status: SolveStatus, bound: f64, root_lp: f64, root_bound: f64, nodes: usize, inc: Option<(f64, Vec<f64>)>, tree: &Tree| SolveResult {
        status,
        objective: inc.as_ref().map(|i| i.0),
        x: inc.map(|i| i.1),
        bound,
        root_lp,
        root_bound,
        nodes,
        cuts_added: tree.cuts_added,
        lp_iterations: tree.sx.iterations(),
        seconds: elapsed(&start),
    };

    // Root.
    let st = tree.sx.solve();
    if st == LpStatus::Infeasible {
        return finish(SolveStatus::Infeasible, f64::INFINITY, f64::INFINITY, f64::INFINITY, 1, None, &tree);
    }
    if st != LpStatus::Optimal {
        log::warn!("root LP ended with {st:?}");
        let status = if inc.is_some() { SolveStatus::Feasible } else { SolveStatus::LimitReached };
        return finish(status, f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY, 1, inc, &tree);
    }
    let root_lp = tree.sx.objective();
    let st = tree.solve(cfg.root_cut_rounds);
    if st == LpStatus::Infeasible {
        return finish(SolveStatus::Infeasible, f64::INFINITY, root_lp, f64::INFINITY, 1, None, &tree);
    }
    let root_bound = tree.sx.objective();
    log::info!(
        "root lp={root_lp:.4} cut={root_bound:.4} cuts={} rows={}",
        tree.cuts_added,
        tree.sx.num_rows()
    );

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: tree.node_bound(root_bound),
        depth: 0,
        id: 0,
        changes: Vec::new(),
        basis: tree.sx.basis(),
    });
    let mut next_id = 1;
    let mut nodes = 0usize;
    let mut trouble = false;
    let mut first = true;

    while let Some(node) = heap.peek() {
        if tree.prunes(node.bound, inc.as_ref().map(|i| i.0)) {
            heap.clear();
            break;
        }
        let over_nodes = cfg.node_limit.is_some_and(|l| nodes >= l && !first);
        let over_time = cfg.time_limit.is_some_and(|t| start.elapsed() >= t);
        if over_nodes || over_time || (cfg.node_limit == Some(0) && !first) {
            break;
        }
        let node = heap.pop().unwrap();
        let (obj, x) = if first {
            first = false;
            (root_bound, tree.sx.x().to_vec())
        } else {
            nodes += 1;
            tree.apply(&node.changes);
            tree.sx.set_basis(&node.basis);
            let st = tree.solve(cfg.node_cut_rounds);
            match st {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => continue,
                other => {
                    log::warn!("node LP ended with {other:?}; node dropped");
                    trouble = true;
                    continue;
                }
            }
            (tree.sx.objective(), tree.sx.x().to_vec())
        };
        let bound = tree.node_bound(obj).max(node.bound);
        if tree.prunes(bound, inc.as_ref().map(|i| i.0)) {
            continue;
        }
        match tree.branch_var(&x) {
            None => {
                let xr = tree.rounded(&x);
                match model.first_violation(&xr, 1e-6) {
                    None => {
                        let val = model.objective(&xr);
                        if inc.as_ref().is_none_or(|i| val < i.0 - 1e-9) {
                            log::debug!("incumbent {val} at node {nodes}");
                            inc = Some((val, xr));
                        }
                    }
                    Some(row) => {
                        log::warn!("integral LP point violates {row}; node dropped");
                        trouble = true;
                    }
                }
            }
            Some(j) => {
                if cfg.node_limit == Some(0) {
                    heap.push(Node { bound, ..node });
                    break;
                }
                let basis = tree.sx.basis();
                let (lo, hi) = tree.sx.col_bounds(j);
                let down = (j, lo, x[j].floor());
                let up = (j, x[j].ceil(), hi);
                // Explore first the side the value is closer to.
                let order = if x[j] - x[j].floor() >= 0.5 { [down, up] } else { [up, down] };
                for ch in order {
                    let mut changes = node.changes.clone();
                    changes.push(ch);
                    heap.push(Node {
                        bound,
                        depth: node.depth + 1,
                        id: next_id,
                        changes,
                        basis: basis.clone(),
                    });
                    next_id += 1;
                }
            }
        }
        if cfg.log_every > 0 && nodes % cfg.log_every == 0 && nodes > 0 {
            let b = heap.peek().map_or(bound, |n| n.bound);
            let incv = inc.as_ref().map(|i| i.0);
            log::info!(
                "node={nodes} bound={b:.4} inc={} gap={} cuts={}",
                incv.map_or("-".to_string(), |v| format!("{v}")),
                incv.map_or("-".to_string(), |v| format!("{:.4}", gap(v, b))),
                tree.cuts_added
            );
        }
    }

    let open_bound = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let complete = heap.is_empty() && !trouble;
    let status = match (&inc, complete) {
        (Some(_), true) => SolveStatus::Optimal,
        (None, true) => SolveStatus::Infeasible,
        (Some(_), false) => SolveStatus::Feasible,
        (None, false) => SolveStatus::LimitReached,
    };
    let bound = match (&inc, heap.is_empty()) {
        (Some(i), true) => i.0,
        (None, true) => f64::INFINITY,
        (Some(i), false) => open_bound.min(i.0),
        (None, false) => open_bound,
    };
    finish(status, bound, root_lp, root_bound, nodes, inc, &tree)
}
