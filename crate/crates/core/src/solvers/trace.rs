use std::collections::VecDeque;
use std::io::Write;

use serde::Serialize;

use crate::{io, Result};

/// Why a solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIter,
    /// A non-finite value or gradient was produced; the trace ends at the last
    /// finite iterate.
    NonFinite,
    /// Backtracking exceeded its cap within one iteration.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordedPoint {
    pub iter: usize,
    pub point: Vec<f64>,
}

/// Iterate history of one solver run.
///
/// `values[k]`, `grad_norms[k]` and `stepsizes[k]` all refer to iterate `k`;
/// `stepsizes[k]` is the stepsize in effect when leaving iterate `k` (for the
/// final iterate, the stepsize the solver would have tried next).
#[derive(Debug, Clone, Serialize)]
pub struct Trace {
    pub values: Vec<f64>,
    pub grad_norms: Vec<f64>,
    pub stepsizes: Vec<f64>,
    /// Iterates, decimated in the middle of long runs; the first and the final
    /// [`Trace::EDGE`] iterates are always present.
    pub iterates: Vec<RecordedPoint>,
    pub status: Status,
    pub backtrack_count: usize,
    /// Number of backtracks per iteration.
    pub backtracks: Vec<usize>,
    /// `decreases[k]` is the objective change from iterate `k` to `k + 1`,
    /// evaluated without cancellation where the solver supports it.
    pub decreases: Vec<f64>,
}

impl Trace {
    pub const EDGE: usize = 100;

    /// Number of steps taken.
    pub fn iterations(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn final_point(&self) -> &[f64] {
        &self
            .iterates
            .last()
            .expect("trace always holds the initial point")
            .point
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("trace always holds the initial value")
    }

    pub fn final_grad_norm(&self) -> f64 {
        *self.grad_norms.last().expect("trace always holds the initial gradient")
    }

    /// CSV with columns `iter,F,grad_norm,theta`.
    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<()> {
        let rows =
            (0..self.values.len()).map(|k| vec![k as f64, self.values[k], self.grad_norms[k], self.stepsizes[k]]);
        let h: &[&str] = &["iter", "F", "grad_norm", "theta"];
        io::write_rows(out, header.then_some(h), rows)
    }

    /// Recorded iterates as flat CSV rows prefixed by the iteration index.
    pub fn write_points_csv<W: Write>(&self, out: W) -> Result<()> {
        io::write_rows(
            out,
            None,
            self.iterates.iter().map(|r| {
                let mut row = vec![r.iter as f64];
                row.extend_from_slice(&r.point);
                row
            }),
        )
    }
}

/// Keeps the first and last [`Trace::EDGE`] iterates and every `every`-th one in between.
#[derive(Debug)]
pub(crate) struct Recorder {
    every: usize,
    kept: Vec<RecordedPoint>,
    tail: VecDeque<RecordedPoint>,
}

impl Recorder {
    pub fn new(every: usize) -> Self {
        Self {
            every: every.max(1),
            kept: Vec::new(),
            tail: VecDeque::with_capacity(Trace::EDGE),
        }
    }

    pub fn push(&mut self, iter: usize, point: Vec<f64>) {
        let rec = RecordedPoint { iter, point };
        if iter < Trace::EDGE || iter.is_multiple_of(self.every) {
            self.kept.push(rec.clone());
        }
        if self.tail.len() == Trace::EDGE {
            self.tail.pop_front();
        }
        self.tail.push_back(rec);
    }

    pub fn finish(mut self) -> Vec<RecordedPoint> {
        self.kept.extend(self.tail);
        self.kept.sort_by_key(|r| r.iter);
        self.kept.dedup_by_key(|r| r.iter);
        self.kept
    }
}
