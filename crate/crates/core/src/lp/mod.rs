//! Bounded-variable revised simplex.
//!
//! Rows are written as `A x - s = 0` with one logical `s_i` per row carrying
//! the row bounds, so every basis of `[A, -I]` is square and the all-logical
//! basis is always available. The dual simplex is the main engine; a primal
//! simplex pass repairs dual infeasibility left over after cost shifting.
//! The basis is held as a sparse LU factorisation with eta updates and is
//! refactorised periodically.

mod lu;

use serde::{Deserialize, Serialize};

use lu::Factor;


pub const INF: f64 = f64::INFINITY;

/// Up to this many rows the steepest-edge weights are computed exactly.
const EXACT_DSE_ROWS: usize = 1500;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpProblem {
    pub obj: Vec<f64>,
    pub col_lower: Vec<f64>,
    pub col_upper: Vec<f64>,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub row_lower: Vec<f64>,
    pub row_upper: Vec<f64>,
}

impl LpProblem {
    pub fn num_cols(&self) -> usize {
        self.obj.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_col(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.obj.push(cost);
        self.col_lower.push(lower);
        self.col_upper.push(upper);
        self.obj.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, lower: f64, upper: f64) -> usize {
        self.rows.push(coeffs);
        self.row_lower.push(lower);
        self.row_upper.push(upper);
        self.rows.len() - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    pub cols: Vec<VarStatus>,
    pub rows: Vec<VarStatus>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpParams {
    pub primal_tol: f64,
    pub dual_tol: f64,
    pub zero_tol: f64,
    pub pivot_tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    pub max_iterations: usize,
    pub reinvert_every: usize,
    /// Relative size of the cost perturbation applied before the dual
    /// simplex; zero disables it. Degenerate duals stall without it.
    pub perturbation: f64,
}

impl Default for LpParams {
    fn default() -> Self {
        LpParams {
            primal_tol: 1e-7,
            dual_tol: 1e-9,
            zero_tol: 1e-11,
            pivot_tol: 1e-9,
            bland_after: 1000,
            max_iterations: 500_000,
            reinvert_every: 100,
            perturbation: 5e-7,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    pub row_activity: Vec<f64>,
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub basis: Basis,
    pub iterations: usize,
}

/// Solves an LP from scratch or from a stored basis.
pub fn solve_lp(problem: &LpProblem, warm: Option<&Basis>) -> LpSolution {
    let mut s = Simplex::new(problem, LpParams::default());
    if let Some(b) = warm {
        s.set_basis(b);
    }
    s.solve();
    s.solution()
}

pub struct Simplex {
    params: LpParams,
    n: usize,
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    rows: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    orig_cost: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    status: Vec<VarStatus>,
    head: Vec<usize>,
    x: Vec<f64>,
    d: Vec<f64>,
    factor: Factor,
    /// Row of the basis inverse for the current pivot, indexed by row.
    rho: Vec<f64>,
    dse: Vec<f64>,
    dse_valid: bool,
    updates: usize,
    shifted: bool,
    iterations: usize,
    last_status: LpStatus,
    // Scratch space for the pivot row.
    alpha: Vec<f64>,
    touched: Vec<usize>,
    mark: Vec<bool>,
}

impl Simplex {
    pub fn new(p: &LpProblem, params: LpParams) -> Simplex {
        let n = p.num_cols();
        let m = p.num_rows();
        let mut cols = vec![Vec::new(); n];
        let mut rows = Vec::with_capacity(m);
        for (i, r) in p.rows.iter().enumerate() {
            let mut merged: Vec<(usize, f64)> = r.clone();
            merged.sort_by_key(|e| e.0);
            merged.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
            merged.retain(|e| e.1 != 0.0);
            for &(j, v) in &merged {
                cols[j].push((i, v));
            }
            rows.push(merged);
        }
        let mut cost = p.obj.clone();
        cost.extend(std::iter::repeat(0.0).take(m));
        let mut lo = p.col_lower.clone();
        lo.extend_from_slice(&p.row_lower);
        let mut up = p.col_upper.clone();
        up.extend_from_slice(&p.row_upper);
        let mut s = Simplex {
            params,
            n,
            m,
            cols,
            rows,
            orig_cost: p.obj.clone(),
            cost,
            lo,
            up,
            status: vec![VarStatus::AtLower; n + m],
            head: (n..n + m).collect(),
            x: vec![0.0; n + m],
            d: vec![0.0; n + m],
            factor: Factor::default(),
            rho: Vec::new(),
            dse: vec![1.0; m],
            dse_valid: true,
            updates: 0,
            shifted: false,
            iterations: 0,
            last_status: LpStatus::IterationLimit,
            alpha: vec![0.0; n + m],
            touched: Vec::new(),
            mark: vec![false; n + m],
        };
        for j in 0..n {
            s.status[j] = s.natural_status(j, s.cost[j]);
        }
        for i in 0..m {
            s.status[n + i] = VarStatus::Basic;
        }
        s.try_invert().expect("logical basis is nonsingular");
        s.set_nonbasic_values();
        s.compute_primal();
        s.compute_dual();
        s
    }

    pub fn num_cols(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn status(&self) -> LpStatus {
        self.last_status
    }

    /// Nonbasic status that is dual feasible for reduced cost `dj`.
    fn natural_status(&self, j: usize, dj: f64) -> VarStatus {
        let (l, u) = (self.lo[j], self.up[j]);
        if l.is_finite() && (dj >= 0.0 || !u.is_finite()) {
            VarStatus::AtLower
        } else if u.is_finite() {
            VarStatus::AtUpper
        } else {
            VarStatus::Zero
        }
    }

    fn set_nonbasic_values(&mut self) {
        for j in 0..self.n + self.m {
            self.x[j] = match self.status[j] {
                VarStatus::Basic => self.x[j],
                VarStatus::AtLower => self.lo[j],
                VarStatus::AtUpper => self.up[j],
                VarStatus::Zero => 0.0,
            };
        }
    }

    fn for_col(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n {
            for &(i, v) in &self.cols[j] {
                f(i, v);
            }
        } else {
            f(j - self.n, -1.0);
        }
    }

    fn ftran_col(&self, j: usize) -> Vec<f64> {
        let mut a = vec![0.0; self.m];
        self.for_col(j, |k, v| a[k] += v);
        self.factor.ftran(a)
    }

    fn compute_primal(&mut self) {
        let m = self.m;
        let mut b = vec![0.0; m];
        for j in 0..self.n + m {
            if self.status[j] != VarStatus::Basic && self.x[j] != 0.0 {
                let xj = self.x[j];
                self.for_col(j, |i, v| b[i] -= v * xj);
            }
        }
        let xb = self.factor.ftran(b);
        for (p, v) in xb.into_iter().enumerate() {
            self.x[self.head[p]] = v;
        }
    }

    fn duals(&self) -> Vec<f64> {
        self.btran_costs(&self.cost)
    }

    fn btran_costs(&self, cost: &[f64]) -> Vec<f64> {
        let cb = self.head.iter().map(|&j| cost[j]).collect();
        self.factor.btran(cb)
    }

    /// Squared norm of row `p` of the basis inverse.
    fn inverse_row_norm(&self, p: usize) -> f64 {
        let mut e = vec![0.0; self.m];
        e[p] = 1.0;
        let r = self.factor.btran(e);
        r.iter().map(|v| v * v).sum::<f64>().max(1e-12)
    }

    fn compute_dual(&mut self) {
        let y = self.duals();
        for j in 0..self.n + self.m {
            if self.status[j] == VarStatus::Basic {
                self.d[j] = 0.0;
                continue;
            }
            let mut dj = self.cost[j];
            self.for_col(j, |i, v| dj -= y[i] * v);
            self.d[j] = dj;
        }
    }

    /// Exact weights cost one BTRAN per row, so large bases start from unit
    /// reference weights instead.
    fn recompute_dse(&mut self) {
        for p in 0..self.m {
            self.dse[p] = if self.m <= EXACT_DSE_ROWS { self.inverse_row_norm(p) } else { 1.0 };
        }
        self.dse_valid = true;
    }

    /// Rebuilds the inverse from scratch. Singular bases are repaired by
    /// swapping in logicals.
    fn reinvert(&mut self) {
        loop {
            match self.try_invert() {
                Ok(()) => break,
                Err(bad) => {
                    // Replace dependent structural columns by logicals of uncovered rows.
                    let (drop_pos, free_rows) = bad;
                    for (p, i) in drop_pos.into_iter().zip(free_rows) {
                        self.dse[p] = 1.0;
                        let j = self.head[p];
                        let near_upper = self.up[j].is_finite()
                            && (self.x[j] - self.up[j]).abs() < (self.x[j] - self.lo[j]).abs();
                        self.status[j] = if near_upper {
                            VarStatus::AtUpper
                        } else if self.lo[j].is_finite() {
                            VarStatus::AtLower
                        } else if self.up[j].is_finite() {
                            VarStatus::AtUpper
                        } else {
                            VarStatus::Zero
                        };
                        let l = self.n + i;
                        self.head[p] = l;
                        self.status[l] = VarStatus::Basic;
                    }
                    self.set_nonbasic_values();
                }
            }
        }
        self.updates = 0;
        self.compute_primal();
        self.compute_dual();
    }

    #[allow(clippy::type_complexity)]
    fn try_invert(&mut self) -> Result<(), (Vec<usize>, Vec<usize>)> {
        let n = self.n;
        let cols: Vec<Vec<(usize, f64)>> = self
            .head
            .iter()
            .map(|&j| if j < n { self.cols[j].clone() } else { vec![(j - n, -1.0)] })
            .collect();
        match Factor::new(self.m, &cols, 1e-9, self.params.zero_tol) {
            Ok(f) => {
                self.factor = f;
                Ok(())
            }
            Err(e) => Err((e.positions, e.rows)),
        }
    }

    /// Flips nonbasic variables to the bound matching their reduced cost and
    /// shifts costs where no such bound exists.
    fn make_dual_feasible(&mut self) {
        let tol = self.params.dual_tol;
        let mut flipped = false;
        for j in 0..self.n + self.m {
            let st = self.status[j];
            if st == VarStatus::Basic || self.lo[j] == self.up[j] {
                continue;
            }
            let dj = self.d[j];
            let wrong = match st {
                VarStatus::AtLower => dj < -tol,
                VarStatus::AtUpper => dj > tol,
                VarStatus::Zero => dj.abs() > tol,
                VarStatus::Basic => false,
            };
            if !wrong {
                continue;
            }
            let want = self.natural_status(j, dj);
            let ok = match want {
                VarStatus::AtLower => dj >= 0.0,
                VarStatus::AtUpper => dj <= 0.0,
                _ => false,
            };
            if ok && want != st {
                self.status[j] = want;
                flipped = true;
            } else {
                self.cost[j] -= dj;
                self.d[j] = 0.0;
                self.shifted = true;
            }
        }
        if flipped {
            self.set_nonbasic_values();
            self.compute_primal();
        }
    }

    fn infeasibility(&self, p: usize) -> f64 {
        let j = self.head[p];
        let v = self.x[j];
        if v < self.lo[j] - self.params.primal_tol {
            self.lo[j] - v
        } else if v > self.up[j] + self.params.primal_tol {
            v - self.up[j]
        } else {
            0.0
        }
    }

    fn choose_leaving(&self, bland: bool) -> Option<usize> {
        let mut best = None;
        let mut score = 0.0;
        for p in 0..self.m {
            let inf = self.infeasibility(p);
            if inf <= 0.0 {
                continue;
            }
            if bland {
                match best {
                    Some(b) if self.head[b] < self.head[p] => {}
                    _ => best = Some(p),
                }
                continue;
            }
            let s = inf * inf / self.dse[p];
            if s > score {
                score = s;
                best = Some(p);
            }
        }
        best
    }

    /// Fills `alpha` with row `r` of `B^{-1} [A, -I]` on the nonbasic columns.
    fn pivot_row(&mut self, r: usize) {
        for &j in &self.touched {
            self.alpha[j] = 0.0;
            self.mark[j] = false;
        }
        self.touched.clear();
        let n = self.n;
        let mut e = vec![0.0; self.m];
        e[r] = 1.0;
        self.rho = self.factor.btran(e);
        for k in 0..self.m {
            let rho = self.rho[k];
            if rho == 0.0 {
                continue;
            }
            for &(j, v) in &self.rows[k] {
                if !self.mark[j] {
                    self.mark[j] = true;
                    self.touched.push(j);
                }
                self.alpha[j] += rho * v;
            }
            let l = n + k;
            if !self.mark[l] {
                self.mark[l] = true;
                self.touched.push(l);
            }
            self.alpha[l] -= rho;
        }
    }

    /// Replaces the basic variable in position `r` by `q`, given the FTRAN
    /// column of `q`.
    fn update_inverse(&mut self, r: usize, col: &[f64]) {
        self.factor.update(r, col);
        self.updates += 1;
    }

    /// Dual steepest-edge update; expects `rho` from `pivot_row(r)` and
    /// the factorisation before the basis change.
    fn update_dse(&mut self, r: usize, col: &[f64]) {
        if !self.dse_valid {
            return;
        }
        let piv = col[r];
        let wr = self.rho.iter().map(|v| v * v).sum::<f64>();
        let tau = self.factor.ftran(self.rho.clone());
        for i in 0..self.m {
            if i == r || col[i] == 0.0 {
                continue;
            }
            let ratio = col[i] / piv;
            let w = self.dse[i] - 2.0 * ratio * tau[i] + ratio * ratio * wr;
            self.dse[i] = w.max(ratio * ratio).max(1e-12);
        }
        self.dse[r] = (wr / (piv * piv)).max(1e-12);
    }

    /// Runs the dual simplex from the current basis.
    pub fn solve(&mut self) -> LpStatus {
        if self.m == 0 {
            // Every variable sits at its best bound.
            for j in 0..self.n {
                let dj = self.cost[j];
                if (dj < 0.0 && !self.up[j].is_finite()) || (dj > 0.0 && !self.lo[j].is_finite()) {
                    self.last_status = LpStatus::Unbounded;
                    return self.last_status;
                }
                self.status[j] = self.natural_status(j, dj);
            }
            self.set_nonbasic_values();
            self.compute_dual();
            self.last_status = LpStatus::Optimal;
            return self.last_status;
        }
        let status = self.solve_inner();
        self.last_status = status;
        status
    }

    fn solve_inner(&mut self) -> LpStatus {
        self.perturb_costs();
        self.make_dual_feasible();
        if !self.dse_valid {
            self.recompute_dse();
        }
        let mut degenerate = 0usize;
        let mut confirmations = 0;
        loop {
            if self.iterations >= self.params.max_iterations {
                return LpStatus::IterationLimit;
            }
            if self.updates >= self.params.reinvert_every || self.factor.is_stale() {
                self.reinvert();
                self.make_dual_feasible();
            }
            let bland = degenerate >= self.params.bland_after;
            let Some(r) = self.choose_leaving(bland) else {
                // Confirm on a fresh factorisation before declaring optimality.
                if self.updates > 0 && confirmations < 3 {
                    confirmations += 1;
                    self.reinvert();
                    self.make_dual_feasible();
                    continue;
                }
                if self.shifted {
                    self.remove_shifts();
                    match self.primal() {
                        LpStatus::Optimal => {}
                        other => return other,
                    }
                    if self.choose_leaving(false).is_some() {
                        self.make_dual_feasible();
                        continue;
                    }
                }
                return LpStatus::Optimal;
            };
            match self.dual_iteration(r, bland) {
                Step::Done { degenerate: deg } => {
                    if deg {
                        degenerate += 1;
                    } else {
                        degenerate = 0;
                    }
                }
                Step::Retry => {
                    self.reinvert();
                    self.make_dual_feasible();
                }
                Step::NoEntering => {
                    if self.updates > 0 {
                        self.reinvert();
                        self.make_dual_feasible();
                        continue;
                    }
                    return LpStatus::Infeasible;
                }
            }
        }
    }

    fn dual_iteration(&mut self, r: usize, bland: bool) -> Step {
        let leaving = self.head[r];
        let xl = self.x[leaving];
        let to_upper = xl > self.up[leaving];
        let bound = if to_upper { self.up[leaving] } else { self.lo[leaving] };
        let sgn = if to_upper { 1.0 } else { -1.0 };
        self.pivot_row(r);

        let tol_d = self.params.dual_tol;
        let piv_tol = self.params.pivot_tol;
        // Candidates: (index, |alpha|, corrected reduced cost).
        let mut cands: Vec<(usize, f64, f64)> = Vec::new();
        for &j in &self.touched {
            let st = self.status[j];
            if st == VarStatus::Basic || self.lo[j] == self.up[j] {
                continue;
            }
            let a = self.alpha[j] * sgn;
            if a.abs() <= piv_tol {
                continue;
            }
            let ok = match st {
                VarStatus::AtLower => a > 0.0,
                VarStatus::AtUpper => a < 0.0,
                VarStatus::Zero => true,
                VarStatus::Basic => false,
            };
            if !ok {
                continue;
            }
            let dcorr = match st {
                VarStatus::AtLower => self.d[j].max(0.0),
                VarStatus::AtUpper => (-self.d[j]).max(0.0),
                _ => 0.0,
            };
            cands.push((j, a.abs(), dcorr));
        }
        if cands.is_empty() {
            return Step::NoEntering;
        }
        let q = if bland {
            let best = cands
                .iter()
                .map(|c| c.2 / c.1)
                .fold(INF, f64::min);
            cands
                .iter()
                .filter(|c| c.2 / c.1 <= best + 1e-12)
                .map(|c| c.0)
                .min()
                .unwrap()
        } else {
            let theta_max = cands
                .iter()
                .map(|c| (c.2 + tol_d) / c.1)
                .fold(INF, f64::min);
            let mut best = cands[0];
            let mut found = false;
            for &c in &cands {
                if c.2 / c.1 <= theta_max && (!found || c.1 > best.1 || (c.1 == best.1 && c.0 < best.0)) {
                    best = c;
                    found = true;
                }
            }
            best.0
        };

        let col = self.ftran_col(q);
        let arq = col[r];
        let check = self.alpha[q];
        if arq.abs() <= piv_tol || (arq - check).abs() > 1e-7 * (1.0 + arq.abs()) {
            return if self.updates > 0 { Step::Retry } else { Step::NoEntering };
        }

        // Keep d_q consistent with the sign the ratio test assumed.
        let mut dq = self.d[q];
        match self.status[q] {
            VarStatus::AtLower if dq < 0.0 => {
                self.cost[q] -= dq;
                self.shifted = true;
                dq = 0.0;
            }
            VarStatus::AtUpper if dq > 0.0 => {
                self.cost[q] -= dq;
                self.shifted = true;
                dq = 0.0;
            }
            _ => {}
        }
        let theta_d = dq / arq;
        for k in 0..self.touched.len() {
            let j = self.touched[k];
            if self.status[j] != VarStatus::Basic {
                self.d[j] -= theta_d * self.alpha[j];
            }
        }
        self.d[q] = 0.0;
        self.d[leaving] = -theta_d;

        let delta = (xl - bound) / arq;
        for (p, &c) in col.iter().enumerate() {
            if c != 0.0 {
                let j = self.head[p];
                self.x[j] -= delta * c;
            }
        }
        self.x[q] += delta;
        self.x[leaving] = bound;

        self.update_dse(r, &col);
        self.update_inverse(r, &col);
        self.head[r] = q;
        self.status[q] = VarStatus::Basic;
        self.status[leaving] = if to_upper && self.lo[leaving] != self.up[leaving] {
            VarStatus::AtUpper
        } else if to_upper {
            VarStatus::AtLower
        } else {
            VarStatus::AtLower
        };
        self.iterations += 1;
        Step::Done {
            degenerate: theta_d.abs() < 1e-12,
        }
    }

    /// Moves each structural cost away from zero reduced cost, in the
    /// direction that keeps its current bound dual feasible. The amounts are
    /// pseudo-random but fixed per column, so runs are reproducible.
    fn perturb_costs(&mut self) {
        let base = self.params.perturbation;
        if base <= 0.0 {
            return;
        }
        if self.shifted {
            // Left over from a solve that stopped early.
            self.remove_shifts();
        }
        for j in 0..self.n {
            let st = self.status[j];
            if st == VarStatus::Basic || self.lo[j] == self.up[j] {
                continue;
            }
            let mut h = (j as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
            h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            h ^= h >> 31;
            let u = (h >> 11) as f64 / (1u64 << 53) as f64;
            let delta = base * (1.0 + self.orig_cost[j].abs()) * (1.0 + u);
            let sign = match st {
                VarStatus::AtLower => 1.0,
                VarStatus::AtUpper => -1.0,
                _ => continue,
            };
            self.cost[j] += sign * delta;
            self.d[j] += sign * delta;
            self.shifted = true;
        }
    }

    fn remove_shifts(&mut self) {
        self.cost[..self.n].copy_from_slice(&self.orig_cost);
        for c in self.cost[self.n..].iter_mut() {
            *c = 0.0;
        }
        self.shifted = false;
        self.compute_dual();
    }

    /// Primal simplex from a primal feasible basis.
    fn primal(&mut self) -> LpStatus {
        let tol = self.params.dual_tol;
        let ptol = self.params.primal_tol;
        let piv_tol = self.params.pivot_tol;
        self.dse_valid = false;
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= self.params.max_iterations {
                return LpStatus::IterationLimit;
            }
            if self.updates >= self.params.reinvert_every || self.factor.is_stale() {
                self.reinvert();
                self.dse_valid = false;
            }
            let bland = degenerate >= self.params.bland_after;
            let mut q = usize::MAX;
            let mut best = 0.0;
            for j in 0..self.n + self.m {
                let st = self.status[j];
                if st == VarStatus::Basic || self.lo[j] == self.up[j] {
                    continue;
                }
                let dj = self.d[j];
                let gain = match st {
                    VarStatus::AtLower => -dj,
                    VarStatus::AtUpper => dj,
                    VarStatus::Zero => dj.abs(),
                    VarStatus::Basic => 0.0,
                };
                if gain > tol && (gain > best || (bland && q == usize::MAX)) {
                    best = gain;
                    q = j;
                    if bland {
                        break;
                    }
                }
            }
            if q == usize::MAX {
                return LpStatus::Optimal;
            }
            let dir = if self.d[q] < 0.0 { 1.0 } else { -1.0 };
            let col = self.ftran_col(q);
            // Harris two-pass ratio test on the basic variables.
            let mut theta_max = INF;
            for (p, &c) in col.iter().enumerate() {
                let delta = -dir * c;
                if delta.abs() <= piv_tol {
                    continue;
                }
                let j = self.head[p];
                let lim = if delta < 0.0 {
                    (self.x[j] - self.lo[j] + ptol) / -delta
                } else {
                    (self.up[j] - self.x[j] + ptol) / delta
                };
                theta_max = theta_max.min(lim);
            }
            let flip = self.up[q] - self.lo[q];
            if flip.is_finite() && flip <= theta_max {
                // Bound flip without basis change.
                let step = dir * flip;
                for (p, &c) in col.iter().enumerate() {
                    if c != 0.0 {
                        let j = self.head[p];
                        self.x[j] -= step * c;
                    }
                }
                self.status[q] = if dir > 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                self.x[q] = if dir > 0.0 { self.up[q] } else { self.lo[q] };
                self.iterations += 1;
                continue;
            }
            if !theta_max.is_finite() {
                return LpStatus::Unbounded;
            }
            let mut r = usize::MAX;
            let mut big = 0.0;
            for (p, &c) in col.iter().enumerate() {
                let delta = -dir * c;
                if delta.abs() <= piv_tol {
                    continue;
                }
                let j = self.head[p];
                let lim = if delta < 0.0 {
                    (self.x[j] - self.lo[j]) / -delta
                } else {
                    (self.up[j] - self.x[j]) / delta
                };
                if lim <= theta_max && (delta.abs() > big || (bland && self.head[p] < self.head[r.min(self.m - 1)])) {
                    big = delta.abs();
                    r = p;
                }
            }
            if r == usize::MAX {
                return LpStatus::Unbounded;
            }
            let leaving = self.head[r];
            let delta_r = -dir * col[r];
            let to_lower = delta_r < 0.0;
            let bound = if to_lower { self.lo[leaving] } else { self.up[leaving] };
            let t = ((self.x[leaving] - bound) / -delta_r).max(0.0);
            for (p, &c) in col.iter().enumerate() {
                if c != 0.0 {
                    let j = self.head[p];
                    self.x[j] -= dir * t * c;
                }
            }
            self.x[q] += dir * t;
            self.x[leaving] = bound;

            self.pivot_row(r);
            let arq = col[r];
            let theta_d = self.d[q] / arq;
            for k in 0..self.touched.len() {
                let j = self.touched[k];
                if self.status[j] != VarStatus::Basic {
                    self.d[j] -= theta_d * self.alpha[j];
                }
            }
            self.d[q] = 0.0;
            self.d[leaving] = -theta_d;
            self.update_inverse(r, &col);
            self.head[r] = q;
            self.status[q] = VarStatus::Basic;
            self.status[leaving] = if to_lower { VarStatus::AtLower } else { VarStatus::AtUpper };
            self.iterations += 1;
            if t < 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
        }
    }

    pub fn set_col_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lo[j] = lower;
        self.up[j] = upper;
        if self.status[j] != VarStatus::Basic {
            let st = match self.status[j] {
                VarStatus::AtUpper if upper.is_finite() => VarStatus::AtUpper,
                VarStatus::AtLower if lower.is_finite() => VarStatus::AtLower,
                _ => self.natural_status(j, self.d[j]),
            };
            self.status[j] = st;
            let old = self.x[j];
            self.x[j] = match st {
                VarStatus::AtLower => lower,
                VarStatus::AtUpper => upper,
                _ => 0.0,
            };
            let shift = self.x[j] - old;
            if shift != 0.0 {
                // x_B = -B^{-1} N x_N changes by -B^{-1} a_j * shift.
                let col = self.ftran_col(j);
                for (p, &c) in col.iter().enumerate() {
                    if c != 0.0 {
                        let h = self.head[p];
                        self.x[h] -= c * shift;
                    }
                }
            }
        }
    }

    pub fn col_bounds(&self, j: usize) -> (f64, f64) {
        (self.lo[j], self.up[j])
    }

    /// Appends rows with their logicals basic.
    pub fn add_rows(&mut self, new_rows: &[(Vec<(usize, f64)>, f64, f64)]) {
        if new_rows.is_empty() {
            return;
        }
        let (n, m0) = (self.n, self.m);
        let m = m0 + new_rows.len();
        for (t, (coeffs, lo, hi)) in new_rows.iter().enumerate() {
            let i = m0 + t;
            let mut merged = coeffs.clone();
            merged.sort_by_key(|e| e.0);
            merged.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
            merged.retain(|e| e.1 != 0.0);
            let mut act = 0.0;
            for &(j, v) in &merged {
                self.cols[j].push((i, v));
                act += v * self.x[j];
            }
            self.rows.push(merged);
            self.cost.push(0.0);
            self.lo.push(*lo);
            self.up.push(*hi);
            self.status.push(VarStatus::Basic);
            self.x.push(act);
            self.d.push(0.0);
            self.alpha.push(0.0);
            self.mark.push(false);
            self.head.push(n + i);
        }
        self.m = m;
        // The old basis stays nonsingular with the new logicals added.
        self.try_invert().expect("basis with new logicals is nonsingular");
        self.updates = 0;
        self.dse.resize(m, 1.0);
        for p in m0..m {
            self.dse[p] = self.inverse_row_norm(p);
        }
    }

    pub fn basis(&self) -> Basis {
        Basis {
            cols: self.status[..self.n].to_vec(),
            rows: self.status[self.n..].to_vec(),
        }
    }

    /// Loads a stored basis. Rows beyond the stored ones keep their logical
    /// basic. Returns false (and keeps the current basis) if the statuses do
    /// not describe a basis.
    pub fn set_basis(&mut self, b: &Basis) -> bool {
        if b.cols.len() != self.n || b.rows.len() > self.m {
            return false;
        }
        let mut status = b.cols.clone();
        status.extend_from_slice(&b.rows);
        status.extend(std::iter::repeat(VarStatus::Basic).take(self.m - b.rows.len()));
        let head: Vec<usize> = (0..self.n + self.m)
            .filter(|&j| status[j] == VarStatus::Basic)
            .collect();
        if head.len() != self.m {
            return false;
        }
        for j in 0..self.n + self.m {
            if status[j] == VarStatus::AtUpper && !self.up[j].is_finite()
                || status[j] == VarStatus::AtLower && !self.lo[j].is_finite()
            {
                status[j] = self.natural_status(j, 0.0);
            }
        }
        self.status = status;
        self.head = head;
        self.set_nonbasic_values();
        self.reinvert();
        true
    }

    pub fn objective(&self) -> f64 {
        self.orig_cost
            .iter()
            .zip(&self.x[..self.n])
            .map(|(c, x)| c * x)
            .sum()
    }

    pub fn x(&self) -> &[f64] {
        &self.x[..self.n]
    }

    pub fn solution(&self) -> LpSolution {
        let mut cost = self.orig_cost.clone();
        cost.extend(std::iter::repeat(0.0).take(self.m));
        let y = self.btran_costs(&cost);
        let mut rc = vec![0.0; self.n];
        for (j, r) in rc.iter_mut().enumerate() {
            if self.status[j] != VarStatus::Basic {
                let mut dj = cost[j];
                self.for_col(j, |i, v| dj -= y[i] * v);
                *r = dj;
            }
        }
        LpSolution {
            status: self.last_status,
            objective: self.objective(),
            x: self.x[..self.n].to_vec(),
            row_activity: self.x[self.n..].to_vec(),
            duals: y,
            reduced_costs: rc,
            basis: self.basis(),
            iterations: self.iterations,
        }
    }
}

enum Step {
    Done { degenerate: bool },
    Retry,
    NoEntering,
}

/// Lagrangian lower bound `min_{l<=x<=u} c x - y (A x - s)` for the given row
/// multipliers. Equals the optimum at an optimal dual solution.
pub fn dual_bound(p: &LpProblem, y: &[f64]) -> f64 {
    let mut d = p.obj.clone();
    for (i, row) in p.rows.iter().enumerate() {
        for &(j, v) in row {
            d[j] -= y[i] * v;
        }
    }
    let term = |dj: f64, lo: f64, up: f64| {
        if dj > 0.0 {
            dj * lo
        } else if dj < 0.0 {
            dj * up
        } else {
            0.0
        }
    };
    let mut total = 0.0;
    for j in 0..p.num_cols() {
        total += term(d[j], p.col_lower[j], p.col_upper[j]);
    }
    for i in 0..p.num_rows() {
        // Logical s_i has cost 0 and column -e_i, so its reduced cost is y_i.
        total += term(y[i], p.row_lower[i], p.row_upper[i]);
    }
    total
}
