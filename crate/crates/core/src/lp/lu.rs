//! Sparse LU factorisation of a basis matrix with product-form updates.
//!
//! Columns are eliminated left-looking in order of increasing length, which
//! keeps the many logical and short network columns of our models nearly
//! triangular. Pivots use threshold partial pivoting with a preference for
//! short rows. Basis changes are appended as eta columns until the next
//! refactorisation.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

const NONE: usize = usize::MAX;
/// Relative threshold for acceptable pivots.
const THRESHOLD: f64 = 0.1;

/// Columns without an acceptable pivot and rows left uncovered.
#[derive(Debug)]
pub(super) struct Singular {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
}

/// Compressed columns: entries of column `k` sit in `start[k]..start[k + 1]`.
#[derive(Default)]
struct Cols {
    start: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl Cols {
    fn new() -> Cols {
        Cols {
            start: vec![0],
            ..Cols::default()
        }
    }

    fn push(&mut self, i: usize, v: f64) {
        self.idx.push(i);
        self.val.push(v);
    }

    fn close(&mut self) {
        self.start.push(self.idx.len());
    }

    fn col(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.start[k]..self.start[k + 1];
        self.idx[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    fn is_empty_col(&self, k: usize) -> bool {
        self.start[k] == self.start[k + 1]
    }

    fn nnz(&self) -> usize {
        self.idx.len()
    }
}

#[derive(Default)]
pub(super) struct Factor {
    m: usize,
    piv_row: Vec<usize>,
    pos_of_step: Vec<usize>,
    /// Multipliers below the pivot, per step, indexed by row.
    l: Cols,
    /// Steps with a nonempty column of L, in order.
    l_steps: Vec<usize>,
    /// Entries above the diagonal, per step, indexed by earlier step.
    u: Cols,
    diag: Vec<f64>,
    /// Eta columns, indexed by basis position, with their pivots.
    etas: Cols,
    eta_pivot: Vec<(usize, f64)>,
    drop_tol: f64,
}

impl Factor {
    /// Factorises the matrix whose column `p` is `cols[p]` (row, value).
    pub fn new(m: usize, cols: &[Vec<(usize, f64)>], singular_tol: f64, drop_tol: f64) -> Result<Factor, Singular> {
        debug_assert_eq!(cols.len(), m);
        let mut row_count = vec![0usize; m];
        for c in cols {
            for &(i, _) in c {
                row_count[i] += 1;
            }
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| (cols[p].len(), p));

        let mut f = Factor {
            m,
            drop_tol,
            l: Cols::new(),
            u: Cols::new(),
            etas: Cols::new(),
            ..Factor::default()
        };
        let mut step_of_row = vec![NONE; m];
        let mut x = vec![0.0; m];
        let mut in_nz = vec![false; m];
        let mut nz: Vec<usize> = Vec::new();
        let mut queued: Vec<bool> = Vec::with_capacity(m);
        let mut heap: BinaryHeap<Reverse<usize>> = BinaryHeap::new();
        let mut bad = Vec::new();

        for &p in &order {
            for &(i, v) in &cols[p] {
                x[i] += v;
                if !in_nz[i] {
                    in_nz[i] = true;
                    nz.push(i);
                    let t = step_of_row[i];
                    if t != NONE && !queued[t] {
                        queued[t] = true;
                        heap.push(Reverse(t));
                    }
                }
            }
            // Forward solve with the columns of L built so far, in step order.
            while let Some(Reverse(t)) = heap.pop() {
                queued[t] = false;
                let xr = x[f.piv_row[t]];
                if xr == 0.0 {
                    continue;
                }
                for (i, l) in f.l.col(t) {
                    if !in_nz[i] {
                        in_nz[i] = true;
                        nz.push(i);
                        let s = step_of_row[i];
                        if s != NONE && !queued[s] {
                            queued[s] = true;
                            heap.push(Reverse(s));
                        }
                    }
                    x[i] -= l * xr;
                }
            }
            let mut amax = 0.0f64;
            for &i in &nz {
                if step_of_row[i] == NONE {
                    amax = amax.max(x[i].abs());
                }
            }
            if amax <= singular_tol {
                bad.push(p);
                for &i in &nz {
                    x[i] = 0.0;
                    in_nz[i] = false;
                }
                nz.clear();
                continue;
            }
            let mut best = NONE;
            for &i in &nz {
                if step_of_row[i] != NONE || x[i].abs() < THRESHOLD * amax {
                    continue;
                }
                if best == NONE || (row_count[i], i) < (row_count[best], best) {
                    best = i;
                }
            }
            let k = f.piv_row.len();
            let piv = x[best];
            for &i in &nz {
                let v = x[i];
                x[i] = 0.0;
                in_nz[i] = false;
                if i == best || v.abs() <= drop_tol {
                    continue;
                }
                match step_of_row[i] {
                    NONE => f.l.push(i, v / piv),
                    t => f.u.push(t, v),
                }
            }
            nz.clear();
            f.l.close();
            f.u.close();
            if !f.l.is_empty_col(k) {
                f.l_steps.push(k);
            }
            step_of_row[best] = k;
            f.piv_row.push(best);
            f.pos_of_step.push(p);
            f.diag.push(piv);
            queued.push(false);
        }
        if bad.is_empty() {
            Ok(f)
        } else {
            let rows = (0..m).filter(|&i| step_of_row[i] == NONE).collect();
            Err(Singular { positions: bad, rows })
        }
    }

    /// True once the eta file costs more per solve than the factors.
    pub fn is_stale(&self) -> bool {
        self.etas.nnz() > self.l.nnz() + self.u.nnz() + self.m
    }

    /// Solves `B z = b`; `b` is indexed by row, the result by basis position.
    pub fn ftran(&self, mut b: Vec<f64>) -> Vec<f64> {
        for &k in &self.l_steps {
            let xr = b[self.piv_row[k]];
            if xr != 0.0 {
                for (i, l) in self.l.col(k) {
                    b[i] -= l * xr;
                }
            }
        }
        let mut y: Vec<f64> = self.piv_row.iter().map(|&i| b[i]).collect();
        for k in (0..self.m).rev() {
            if y[k] == 0.0 {
                continue;
            }
            let z = y[k] / self.diag[k];
            y[k] = z;
            for (t, u) in self.u.col(k) {
                y[t] -= u * z;
            }
        }
        let out = &mut b;
        for (&p, &v) in self.pos_of_step.iter().zip(&y) {
            out[p] = v;
        }
        for (e, &(r, piv)) in self.eta_pivot.iter().enumerate() {
            let v = out[r];
            if v == 0.0 {
                continue;
            }
            let v = v / piv;
            out[r] = v;
            for (i, a) in self.etas.col(e) {
                out[i] -= a * v;
            }
        }
        self.clean(b)
    }

    /// Solves `B^T y = c`; `c` is indexed by basis position, the result by row.
    pub fn btran(&self, mut c: Vec<f64>) -> Vec<f64> {
        for (e, &(r, piv)) in self.eta_pivot.iter().enumerate().rev() {
            let mut s = c[r];
            for (i, a) in self.etas.col(e) {
                s -= a * c[i];
            }
            c[r] = s / piv;
        }
        let mut w: Vec<f64> = self.pos_of_step.iter().map(|&p| c[p]).collect();
        for k in 0..self.m {
            let mut s = w[k];
            for (t, u) in self.u.col(k) {
                s -= u * w[t];
            }
            w[k] = s / self.diag[k];
        }
        let y = &mut c;
        for k in (0..self.m).rev() {
            let mut s = w[k];
            for (i, l) in self.l.col(k) {
                s -= l * y[i];
            }
            y[self.piv_row[k]] = s;
        }
        self.clean(c)
    }

    fn clean(&self, mut v: Vec<f64>) -> Vec<f64> {
        for a in v.iter_mut() {
            if a.abs() < self.drop_tol {
                *a = 0.0;
            }
        }
        v
    }

    /// Records the replacement of the column in position `r`, given the
    /// FTRAN of the entering column.
    pub fn update(&mut self, r: usize, col: &[f64]) {
        for (i, &a) in col.iter().enumerate() {
            if i != r && a != 0.0 {
                self.etas.push(i, a);
            }
        }
        self.etas.close();
        self.eta_pivot.push((r, col[r]));
    }
}
