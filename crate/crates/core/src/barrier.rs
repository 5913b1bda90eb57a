//! Progressive barrier: feasible and infeasible incumbents, the violation
//! threshold `h_max` and iteration classification.

use crate::blackbox::{EvalResult, History};
use crate::mesh::Outcome;

/// An incumbent, referenced by its history position.
#[derive(Debug, Clone, PartialEq)]
pub struct Incumbent {
    pub position: usize,
    pub result: EvalResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierState {
    pub feasible: Option<Incumbent>,
    pub infeasible: Option<Incumbent>,
    pub h_max: f64,
}

impl Default for BarrierState {
    fn default() -> Self {
        Self::new()
    }
}

impl BarrierState {
    /// Empty state with `h_max = +∞`.
    pub fn new() -> Self {
        Self {
            feasible: None,
            infeasible: None,
            h_max: f64::INFINITY,
        }
    }

    /// Extreme-barrier variant: `h_max ≡ 0`, so infeasible points are never kept.
    pub fn extreme() -> Self {
        Self {
            h_max: 0.0,
            ..Self::new()
        }
    }

    /// Incumbents of `history` under the given threshold.
    pub fn from_history(history: &History, h_max: f64) -> Self {
        let (feasible, infeasible) = select_incumbents(history, h_max);
        Self {
            feasible,
            infeasible,
            h_max,
        }
    }

    /// True when `r` would replace or install an incumbent.
    pub fn is_dominating(&self, r: &EvalResult) -> bool {
        if !r.is_eligible() {
            return false;
        }
        if r.is_feasible() {
            match &self.feasible {
                None => true,
                Some(inc) => dominates_f(r, &inc.result),
            }
        } else {
            if r.h > self.h_max {
                return false;
            }
            match &self.infeasible {
                None => true,
                Some(inc) => dominates_h(r, &inc.result),
            }
        }
    }

    /// True when `r` is an in-barrier point that lowers the violation of
    /// the infeasible incumbent.
    pub fn is_improving(&self, r: &EvalResult) -> bool {
        match &self.infeasible {
            Some(inc) => r.is_eligible() && r.h > 0.0 && r.h < inc.result.h,
            None => false,
        }
    }
}

/// `a ≺_f b` for feasible points.
pub fn dominates_f(a: &EvalResult, b: &EvalResult) -> bool {
    a.f < b.f
}

/// `a ≺_h b` for infeasible points: Pareto dominance on `(f, h)`.
pub fn dominates_h(a: &EvalResult, b: &EvalResult) -> bool {
    a.f <= b.f && a.h <= b.h && (a.f < b.f || a.h < b.h)
}

/// Feasible incumbent: least `f` with `h = 0`; infeasible incumbent: least
/// `f` with `0 < h ≤ h_max`, ties to the smaller `h`. Remaining ties go to
/// the earliest evaluation.
pub fn select_incumbents(history: &History, h_max: f64) -> (Option<Incumbent>, Option<Incumbent>) {
    let mut fea: Option<usize> = None;
    let mut inf: Option<usize> = None;
    let entries = history.entries();
    for (i, e) in entries.iter().enumerate() {
        let r = &e.result;
        if !r.is_eligible() {
            continue;
        }
        if r.is_feasible() {
            if fea.is_none_or(|j| r.f < entries[j].result.f) {
                fea = Some(i);
            }
        } else if r.h <= h_max {
            let better = inf.is_none_or(|j| {
                let b = &entries[j].result;
                r.f < b.f || (r.f == b.f && r.h < b.h)
            });
            if better {
                inf = Some(i);
            }
        }
    }
    let make = |i: usize| Incumbent {
        position: i,
        result: entries[i].result.clone(),
    };
    (fea.map(make), inf.map(make))
}

/// Classifies an iteration from the history positions of its candidates and
/// returns the updated barrier.
///
/// `state` must be the barrier at the start of the iteration and `history`
/// must already contain every candidate. An empty batch leaves the state as is.
pub fn classify_and_update(
    state: &BarrierState,
    history: &History,
    batch: &[usize],
) -> (Outcome, BarrierState) {
    if batch.is_empty() {
        return (Outcome::Unsuccessful, state.clone());
    }
    let entries = history.entries();
    let results = || batch.iter().map(|&i| &entries[i].result);

    if results().any(|r| state.is_dominating(r)) {
        let (feasible, infeasible) = select_incumbents(history, state.h_max);
        let h_max = infeasible.as_ref().map_or(state.h_max, |inc| inc.result.h);
        return (
            Outcome::Dominating,
            BarrierState {
                feasible,
                infeasible,
                h_max,
            },
        );
    }

    if results().any(|r| state.is_improving(r)) {
        let h_old = state
            .infeasible
            .as_ref()
            .expect("improving needs x_INF")
            .result
            .h;
        let h_max = entries
            .iter()
            .map(|e| &e.result)
            .filter(|r| r.is_eligible() && r.h > 0.0 && r.h < h_old)
            .map(|r| r.h)
            .fold(0.0, f64::max);
        let (feasible, infeasible) = select_incumbents(history, h_max);
        return (
            Outcome::Improving,
            BarrierState {
                feasible,
                infeasible,
                h_max,
            },
        );
    }

    let h_max = state
        .infeasible
        .as_ref()
        .map_or(state.h_max, |inc| inc.result.h);
    let (feasible, infeasible) = select_incumbents(history, h_max);
    (
        Outcome::Unsuccessful,
        BarrierState {
            feasible,
            infeasible,
            h_max,
        },
    )
}
