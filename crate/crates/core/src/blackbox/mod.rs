//! Objective and constraint evaluation.
//!
//! [`Evaluator`] wraps a [`Blackbox`] with the evaluation cache, the budget
//! counter and the append-only [`History`]. Only cache misses consume budget.

mod external;
mod history;
pub mod problems;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, Point};
use crate::error::Result;

pub use external::{load_problem_file, ExternalBlackbox, ExternalConfig};
pub(crate) use history::{fmt_f64, parse_f64};
pub use history::{Entry, History};

/// Evaluation status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    HiddenFailure,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::HiddenFailure => "hidden_failure",
        })
    }
}

/// What a blackbox returns for one point.
#[derive(Debug, Clone, PartialEq)]
pub enum RawOutcome {
    Ok { f: f64, g: Vec<f64> },
    Fail,
}

/// Stored result of one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub f: f64,
    pub g: Vec<f64>,
    pub h: f64,
    pub status: Status,
    /// 1-based ordinal of the evaluation since launch.
    pub eval_index: u64,
}

impl EvalResult {
    pub fn from_raw(raw: RawOutcome, n_constraints: usize, eval_index: u64) -> Self {
        match raw {
            RawOutcome::Ok { f, g }
                if g.len() == n_constraints && !f.is_nan() && !g.iter().any(|x| x.is_nan()) =>
            {
                let h = violation_aggregate(&g);
                Self {
                    f,
                    g,
                    h,
                    status: Status::Ok,
                    eval_index,
                }
            }
            _ => Self::hidden_failure(n_constraints, eval_index),
        }
    }

    pub fn hidden_failure(n_constraints: usize, eval_index: u64) -> Self {
        Self {
            f: f64::INFINITY,
            g: vec![f64::INFINITY; n_constraints],
            h: f64::INFINITY,
            status: Status::HiddenFailure,
            eval_index,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.h == 0.0
    }

    /// Finite objective and finite violation: may become an incumbent.
    pub fn is_eligible(&self) -> bool {
        self.f.is_finite() && self.h.is_finite()
    }
}

/// Constraint violation `h = Σ max(0, g_j)²`. A positive part whose square
/// underflows contributes the smallest positive `f64`, so `h = 0` exactly
/// when every `g_j ≤ 0`.
pub fn violation_aggregate(g: &[f64]) -> f64 {
    g.iter()
        .map(|&gj| {
            let p = gj.max(0.0);
            let sq = p * p;
            if p > 0.0 && sq == 0.0 {
                f64::from_bits(1)
            } else {
                sq
            }
        })
        .fold(0.0, |acc, v| acc + v)
}

/// Anything that maps a point to an objective and constraint values.
pub trait Blackbox: Send + Sync {
    fn n_constraints(&self) -> usize;

    fn evaluate(&self, domain: &Domain, point: &Point) -> RawOutcome;
}

/// A problem: domain plus blackbox.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: Domain,
    pub blackbox: Arc<dyn Blackbox>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("n_constraints", &self.blackbox.n_constraints())
            .finish()
    }
}

impl ProblemSpec {
    pub fn new(name: impl Into<String>, domain: Domain, blackbox: Arc<dyn Blackbox>) -> Self {
        Self {
            name: name.into(),
            domain,
            blackbox,
        }
    }

    pub fn n_constraints(&self) -> usize {
        self.blackbox.n_constraints()
    }

    pub fn is_constrained(&self) -> bool {
        self.n_constraints() > 0
    }
}

/// Result of an evaluation request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    /// Freshly evaluated; history position.
    New(usize),
    /// Already known; history position.
    Cached(usize),
}

impl Lookup {
    pub fn index(self) -> usize {
        match self {
            Lookup::New(i) | Lookup::Cached(i) => i,
        }
    }

    pub fn is_new(self) -> bool {
        matches!(self, Lookup::New(_))
    }
}

/// Cache, history and budget around a blackbox.
pub struct Evaluator {
    problem: ProblemSpec,
    history: History,
    budget: u64,
}

impl Evaluator {
    pub fn new(problem: ProblemSpec, budget: u64) -> Self {
        let n_constraints = problem.n_constraints();
        Self {
            problem,
            history: History::new(n_constraints),
            budget,
        }
    }

    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    pub fn domain(&self) -> &Domain {
        &self.problem.domain
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn into_history(self) -> History {
        self.history
    }

    /// Evaluator invocations so far (cache misses).
    pub fn used(&self) -> u64 {
        self.history.len() as u64
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn remaining(&self) -> u64 {
        self.budget.saturating_sub(self.used())
    }

    pub fn exhausted(&self) -> bool {
        self.remaining() == 0
    }

    /// Evaluates `p`, or returns the cached result. `None` when the point is
    /// unknown and the budget is spent.
    pub fn evaluate(&mut self, p: &Point) -> Option<Lookup> {
        if let Some(i) = self.history.position(p) {
            return Some(Lookup::Cached(i));
        }
        if self.exhausted() {
            return None;
        }
        let raw = self.problem.blackbox.evaluate(&self.problem.domain, p);
        Some(Lookup::New(self.commit(p.clone(), raw)))
    }

    /// Evaluates a batch concurrently and commits results in order, stopping
    /// after the first result for which `stop` holds. Results past the stop
    /// point are discarded and consume no budget.
    pub fn evaluate_batch_parallel(
        &mut self,
        points: &[Point],
        mut stop: impl FnMut(&EvalResult) -> bool,
    ) -> Vec<Lookup> {
        let mut fresh: Vec<&Point> = Vec::new();
        for p in points {
            if self.history.position(p).is_none() && !fresh.contains(&p) {
                fresh.push(p);
            }
        }
        fresh.truncate(self.remaining() as usize);
        let bb = &self.problem.blackbox;
        let domain = &self.problem.domain;
        let raws: Vec<RawOutcome> = std::thread::scope(|s| {
            let handles: Vec<_> = fresh
                .iter()
                .map(|p| s.spawn(move || bb.evaluate(domain, p)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or(RawOutcome::Fail))
                .collect()
        });
        let mut raw_iter = fresh.into_iter().zip(raws);
        let mut pending: Option<(&Point, RawOutcome)> = raw_iter.next();
        let mut out = Vec::new();
        for p in points {
            if let Some(i) = self.history.position(p) {
                out.push(Lookup::Cached(i));
                if stop(&self.history.entries()[i].result) {
                    break;
                }
                continue;
            }
            match pending.take() {
                Some((q, raw)) if q == p => {
                    let i = self.commit(p.clone(), raw);
                    out.push(Lookup::New(i));
                    pending = raw_iter.next();
                    if stop(&self.history.entries()[i].result) {
                        break;
                    }
                }
                // budget ran out before this point
                _ => break,
            }
        }
        out
    }

    fn commit(&mut self, p: Point, raw: RawOutcome) -> usize {
        let idx = self.used() + 1;
        let result = EvalResult::from_raw(raw, self.problem.n_constraints(), idx);
        self.history.push(p, result)
    }
}

/// Registry helper re-exported for convenience.
pub fn make_problem(name: &str) -> Result<ProblemSpec> {
    problems::make_problem(name)
}
