//! Convergence test and data profiles.

use crate::error::{Error, Result};
use crate::trace::{Provenance, TraceRecord};

use super::TraceStore;

/// First `eval_index` at which a feasible point satisfies
/// `f0 − f ≥ (1 − τ)(f0 − f*)`, or `None` if no point does.
pub fn convergence_test(
    trace: &[TraceRecord],
    f0: f64,
    fstar: f64,
    tau: f64,
) -> Result<Option<u64>> {
    if f0.is_nan() || fstar.is_nan() || f0 < fstar {
        return Err(Error::Config(format!("f0 = {f0} lies below f* = {fstar}")));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Config(format!("tau must lie in [0, 1], got {tau}")));
    }
    let need = (1.0 - tau) * (f0 - fstar);
    Ok(trace
        .iter()
        .filter(|r| r.h == 0.0 && r.f.is_finite() && f0 - r.f >= need)
        .map(|r| r.eval_index)
        .min())
}

/// Smallest objective value among the design points.
pub fn f0_unconstrained(trace: &[TraceRecord]) -> Option<f64> {
    trace
        .iter()
        .filter(|r| r.provenance == Provenance::Doe && r.f.is_finite())
        .map(|r| r.f)
        .min_by(f64::total_cmp)
}

/// Objective value of the first feasible point of a trace.
pub fn first_feasible(trace: &[TraceRecord]) -> Option<f64> {
    trace
        .iter()
        .filter(|r| r.h == 0.0 && r.f.is_finite())
        .min_by_key(|r| r.eval_index)
        .map(|r| r.f)
}

/// Least feasible objective value of a trace.
pub fn best_feasible(trace: &[TraceRecord]) -> Option<f64> {
    trace
        .iter()
        .filter(|r| r.h == 0.0 && r.f.is_finite())
        .map(|r| r.f)
        .min_by(f64::total_cmp)
}

/// Fraction of instances with `k / (n + 1) ≤ κ` for `κ = 0, ..., kappa_max`.
/// Each entry is `(n, k)`; `None` marks an unsolved instance.
pub fn data_profile(ks: &[(usize, Option<u64>)], kappa_max: u64) -> Vec<f64> {
    if ks.is_empty() {
        return vec![0.0; kappa_max as usize + 1];
    }
    (0..=kappa_max)
        .map(|kappa| {
            let solved = ks
                .iter()
                .filter(|(n, k)| k.is_some_and(|k| k <= kappa * (*n as u64 + 1)))
                .count();
            solved as f64 / ks.len() as f64
        })
        .collect()
}

/// `⌈max budget / (min n + 1)⌉`.
pub fn kappa_max(instances: &[(usize, u64)]) -> u64 {
    let Some(min_n) = instances.iter().map(|(n, _)| *n).min() else {
        return 0;
    };
    let max_budget = instances.iter().map(|(_, b)| *b).max().unwrap_or(0);
    max_budget.div_ceil(min_n as u64 + 1)
}

/// Reference values of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSummary {
    pub problem: String,
    pub seed: u64,
    pub n: usize,
    pub budget: u64,
    pub f0: f64,
    pub fstar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub tau: f64,
    pub solver: String,
    /// `fraction[κ]` for `κ = 0, ..., kappa_max`.
    pub fraction: Vec<f64>,
    /// `k_(p,s)` per included instance, aligned with [`ProfileSet::instances`].
    pub k: Vec<Option<u64>>,
}

impl ProfileCurve {
    pub fn solved(&self) -> usize {
        self.k.iter().filter(|k| k.is_some()).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSet {
    pub instances: Vec<InstanceSummary>,
    /// Instances without any feasible point, `(problem, seed)`.
    pub excluded: Vec<(String, u64)>,
    pub kappa_max: u64,
    pub curves: Vec<ProfileCurve>,
}

/// Computes `f0` and `f*` per instance and one profile curve per
/// `(τ, solver)`. `reference` supplies known optimal values.
pub fn data_profiles(
    store: &TraceStore,
    taus: &[f64],
    reference: &dyn Fn(&str) -> Option<f64>,
) -> Result<ProfileSet> {
    let solvers = store.solver_names();
    let mut instances = Vec::new();
    let mut excluded = Vec::new();
    for inst in &store.manifest.instances {
        let traces: Vec<&[TraceRecord]> = solvers
            .iter()
            .filter_map(|s| store.trace(s, &inst.problem, inst.seed))
            .collect();
        let f0 = if inst.constrained {
            traces
                .iter()
                .filter_map(|t| first_feasible(t))
                .max_by(f64::total_cmp)
        } else {
            traces
                .iter()
                .filter_map(|t| f0_unconstrained(t))
                .min_by(f64::total_cmp)
        };
        let best = traces
            .iter()
            .filter_map(|t| best_feasible(t))
            .chain(reference(&inst.problem))
            .min_by(f64::total_cmp);
        match (f0, best) {
            (Some(f0), Some(fstar)) if traces.iter().any(|t| best_feasible(t).is_some()) => {
                instances.push(InstanceSummary {
                    problem: inst.problem.clone(),
                    seed: inst.seed,
                    n: inst.n,
                    budget: inst.budget,
                    f0,
                    fstar: fstar.min(f0),
                })
            }
            _ => {
                log::warn!(
                    "{} seed {}: no feasible point in any trace, excluded",
                    inst.problem,
                    inst.seed
                );
                excluded.push((inst.problem.clone(), inst.seed));
            }
        }
    }
    let km = kappa_max(
        &instances
            .iter()
            .map(|i| (i.n, i.budget))
            .collect::<Vec<_>>(),
    );
    let mut curves = Vec::new();
    for &tau in taus {
        for s in &solvers {
            let mut k = Vec::with_capacity(instances.len());
            for i in &instances {
                k.push(match store.trace(s, &i.problem, i.seed) {
                    Some(t) => convergence_test(t, i.f0, i.fstar, tau)?,
                    None => None,
                });
            }
            let pairs: Vec<(usize, Option<u64>)> = instances
                .iter()
                .map(|i| i.n)
                .zip(k.iter().copied())
                .collect();
            curves.push(ProfileCurve {
                tau,
                solver: s.clone(),
                fraction: data_profile(&pairs, km),
                k,
            });
        }
    }
    Ok(ProfileSet {
        instances,
        excluded,
        kappa_max: km,
        curves,
    })
}
