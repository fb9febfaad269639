//! CSV rows written by the subcommands. Column names are part of the
//! interface and checked by the golden tests.

use std::io::Stdout;

use serde::Serialize;

use longhaul_core::{Run, SolveStatus};

pub struct CsvOut {
    w: csv::Writer<Stdout>,
}

impl CsvOut {
    pub fn stdout(header: bool) -> CsvOut {
        CsvOut {
            w: csv::WriterBuilder::new().has_headers(header).from_writer(std::io::stdout()),
        }
    }

    pub fn row<T: Serialize>(&mut self, row: &T) -> csv::Result<()> {
        self.w.serialize(row)
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.w.flush()
    }
}

#[derive(Serialize)]
pub struct SolveRow {
    pub instance: String,
    pub formulation: String,
    pub status: String,
    pub objective: Option<f64>,
    pub bound: f64,
    pub gap_pct: Option<f64>,
    pub root_lp: f64,
    pub root_bound: f64,
    pub nodes: usize,
    pub cuts_added: usize,
    pub time_s: f64,
}

/// Root-node experiment; `root_gap` is in percent, empty when the
/// relaxation is infeasible.
#[derive(Serialize)]
pub struct RootCsvRow {
    pub instance: String,
    pub formulation: String,
    pub ineq_count: usize,
    pub time_s: f64,
    pub root_gap: Option<f64>,
}

/// Totals over a batch of runs of one formulation.
#[derive(Default)]
pub struct CompareAcc {
    runs: usize,
    vars: usize,
    rows: usize,
    solved: usize,
    time_all: f64,
    time_solved: f64,
    gap_all: f64,
    gap_unsolved: f64,
    nodes_solved: usize,
}

impl CompareAcc {
    /// Unsolved runs count with `time_limit` seconds when one was set.
    pub fn add(&mut self, run: &Run, time_limit: Option<f64>) {
        let r = &run.result;
        self.runs += 1;
        self.vars += run.model.num_vars();
        self.rows += run.model.num_rows();
        if matches!(r.status, SolveStatus::Optimal | SolveStatus::Infeasible) {
            self.solved += 1;
            self.time_all += r.seconds;
            self.time_solved += r.seconds;
            self.nodes_solved += r.nodes;
        } else {
            self.time_all += time_limit.unwrap_or(r.seconds);
            let gap = r.gap().map_or(100.0, |g| 100.0 * g);
            self.gap_all += gap;
            self.gap_unsolved += gap;
        }
    }
}

/// Averages per formulation; empty cells where nothing was averaged.
#[derive(Serialize)]
pub struct CompareRow {
    pub formulation: String,
    pub vars: f64,
    pub cons: f64,
    pub solved: usize,
    pub time_all_s: f64,
    pub time_solved_s: Option<f64>,
    pub gap_all_pct: f64,
    pub gap_unsolved_pct: Option<f64>,
    pub nodes_solved: Option<f64>,
}

impl CompareRow {
    pub fn from_acc(name: &str, a: &CompareAcc) -> CompareRow {
        let n = a.runs.max(1) as f64;
        let unsolved = a.runs - a.solved;
        let per = |x: f64, k: usize| (k > 0).then(|| x / k as f64);
        CompareRow {
            formulation: name.to_string(),
            vars: a.vars as f64 / n,
            cons: a.rows as f64 / n,
            solved: a.solved,
            time_all_s: a.time_all / n,
            time_solved_s: per(a.time_solved, a.solved),
            gap_all_pct: a.gap_all / n,
            gap_unsolved_pct: per(a.gap_unsolved, unsolved),
            nodes_solved: per(a.nodes_solved as f64, a.solved),
        }
    }
}
