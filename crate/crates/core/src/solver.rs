//! The optimization loop: design of experiments, weight tuning, then
//! iterations of search, poll, extended poll and barrier/mesh updates.

use std::fmt;
use std::io::Write;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::barrier::{classify_and_update, select_incumbents, BarrierState};
use crate::blackbox::{EvalResult, Evaluator, History, Lookup, ProblemSpec};
use crate::catdistance::{default_neighbors, tune_weights, CatWeights};
use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::mesh::{MeshState, Outcome};
use crate::poll::{
    categorical_poll, extended_poll, householder_directions, order_by_direction, quantitative_poll,
    select_extended, DominanceKind, ExtendedEnd, ExtendedEval, QntCandidate,
};
use crate::rng::{substream, Stream};
use crate::search::{lhs_doe, quadratic_search, speculative_search, DoeConfig, ModelTarget};
use crate::trace::{IterationRecord, Provenance, Trace, TraceRow};

/// Serde helper for extended reals: numbers, `"inf"` or `"-inf"`.
mod ext_real {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*x)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!(
                    "expected a number or \"inf\", got `{other}`"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Maximum blackbox evaluations; `None` means `250 · n`.
    pub budget: Option<u64>,
    pub doe_fraction: f64,
    /// Extended-poll trigger threshold; negative disables the extended poll.
    #[serde(with = "ext_real")]
    pub xi: f64,
    /// Neighborhood size override for the categorical poll.
    pub neighbors: Option<usize>,
    pub speculative_search: bool,
    pub quadratic_search: bool,
    pub extended_poll: bool,
    pub seed: u64,
    /// Minimum mesh size per quantitative coordinate (integers first).
    pub min_mesh: Vec<Option<f64>>,
    /// Evaluate each candidate group concurrently.
    pub parallel: bool,
    /// Reject infeasible points outright (`h_max = 0`).
    pub extreme_barrier: bool,
    /// Longest speculative chain per iteration.
    pub speculative_steps: usize,
    /// Extended-poll move cap per start, as a multiple of `n`.
    pub extended_cap_factor: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            budget: None,
            doe_fraction: 0.2,
            xi: 0.05,
            neighbors: None,
            speculative_search: true,
            quadratic_search: true,
            extended_poll: true,
            seed: 0,
            min_mesh: Vec::new(),
            parallel: false,
            extreme_barrier: false,
            speculative_steps: 8,
            extended_cap_factor: 10,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    /// Disables both searches and the extended poll.
    pub fn poll_only(mut self) -> Self {
        self.speculative_search = false;
        self.quadratic_search = false;
        self.extended_poll = false;
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("solver config: {e}")))
    }

    pub fn budget_for(&self, domain: &Domain) -> u64 {
        self.budget.unwrap_or(250 * domain.n() as u64)
    }

    /// Neighborhood size used by the categorical poll.
    pub fn neighbors_for(&self, domain: &Domain) -> Result<usize> {
        if domain.n_cat() == 0 {
            return Ok(0);
        }
        let card = domain.cat_cardinality();
        match self.neighbors {
            None => Ok(default_neighbors(card)),
            Some(m) if (m as u64) < card => Ok(m),
            Some(m) => Err(Error::Config(format!(
                "neighbors = {m} but only {} other categorical components exist",
                card - 1
            ))),
        }
    }

    /// Checks the configuration against `domain`; returns the budget and
    /// the design size.
    pub fn validate(&self, domain: &Domain) -> Result<(u64, usize)> {
        if self.xi.is_nan() {
            return Err(Error::Config("xi must not be NaN".into()));
        }
        if self.min_mesh.len() > domain.n_qnt() {
            return Err(Error::Config(format!(
                "min_mesh has {} entries for {} quantitative variables",
                self.min_mesh.len(),
                domain.n_qnt()
            )));
        }
        if let Some(v) = self
            .min_mesh
            .iter()
            .flatten()
            .find(|v| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::Config(format!(
                "min_mesh entries must be positive, got {v}"
            )));
        }
        if self.extended_cap_factor == 0 {
            return Err(Error::Config("extended_cap_factor must be positive".into()));
        }
        self.neighbors_for(domain)?;
        let budget = self.budget_for(domain);
        let count = DoeConfig {
            fraction: self.doe_fraction,
        }
        .count(budget)?;
        Ok((budget, count))
    }
}

/// The design of experiments a run with `config` starts from.
pub fn initial_design(domain: &Domain, config: &SolverConfig) -> Result<Vec<Point>> {
    let (_, count) = config.validate(domain)?;
    let mut rng = substream(config.seed, Stream::Doe);
    Ok(lhs_doe(domain, count, &mut rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Budget,
    MeshMinimum,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Budget => "budget",
            Termination::MeshMinimum => "mesh_minimum",
        })
    }
}

/// Anchor and displacement of the last quantitative success.
#[derive(Debug, Clone)]
struct Success {
    anchor: Point,
    displacement: Vec<i64>,
}

/// Evaluations of one candidate group.
#[derive(Debug, Default)]
struct Group {
    /// History positions, in commit order.
    positions: Vec<usize>,
    /// Index into the group of the first dominating candidate.
    success: Option<usize>,
    exhausted: bool,
}

fn record(trace: &mut Trace, history: &History, k: u64, prov: Provenance, lookup: Lookup) {
    if let Lookup::New(i) = lookup {
        trace.rows.push(TraceRow {
            eval_index: history.entries()[i].result.eval_index,
            iter: k,
            provenance: prov,
            position: i,
            outcome: None,
        });
    }
}

fn eval_group(
    evaluator: &mut Evaluator,
    trace: &mut Trace,
    parallel: bool,
    k: u64,
    prov: Provenance,
    points: &[Point],
    stop: impl Fn(&EvalResult) -> bool,
) -> Group {
    let mut g = Group::default();
    if parallel {
        let lookups = evaluator.evaluate_batch_parallel(points, &stop);
        for (j, l) in lookups.iter().enumerate() {
            record(trace, evaluator.history(), k, prov, *l);
            g.positions.push(l.index());
            if stop(&evaluator.history().entries()[l.index()].result) {
                g.success = Some(j);
            }
        }
        g.exhausted = g.success.is_none() && lookups.len() < points.len();
        return g;
    }
    for (j, p) in points.iter().enumerate() {
        let Some(l) = evaluator.evaluate(p) else {
            g.exhausted = true;
            break;
        };
        record(trace, evaluator.history(), k, prov, l);
        g.positions.push(l.index());
        if stop(&evaluator.history().entries()[l.index()].result) {
            g.success = Some(j);
            break;
        }
    }
    g
}

/// Solver state between iterations.
pub struct Solver {
    config: SolverConfig,
    domain: Domain,
    evaluator: Evaluator,
    weights: CatWeights,
    neighbors: usize,
    mesh: MeshState,
    barrier: BarrierState,
    dir_rng: ChaCha8Rng,
    last_success: Option<Success>,
    trace: Trace,
    k: u64,
    extended_cap: usize,
    termination: Option<Termination>,
}

impl Solver {
    /// Validates the configuration, evaluates the design of experiments,
    /// tunes the categorical weights and sets up the mesh and barrier.
    pub fn new(problem: ProblemSpec, config: SolverConfig) -> Result<Self> {
        let domain = problem.domain.clone();
        let (budget, _) = config.validate(&domain)?;
        let neighbors = config.neighbors_for(&domain)?;
        let doe = initial_design(&domain, &config)?;

        let mut evaluator = Evaluator::new(problem, budget);
        let mut trace = Trace::default();
        let g = eval_group(
            &mut evaluator,
            &mut trace,
            config.parallel,
            0,
            Provenance::Doe,
            &doe,
            |_| false,
        );
        let history = evaluator.history();
        if !history.entries().iter().any(|e| e.result.f.is_finite()) {
            return Err(Error::NoFiniteDoe);
        }

        let weights = if domain.n_cat() > 0 {
            tune_weights(&domain, history.entries(), config.seed)
        } else {
            CatWeights::uniform(&domain)
        };
        trace.weights = weights.describe(&domain);

        let base = if config.extreme_barrier {
            BarrierState::extreme()
        } else {
            BarrierState::new()
        };
        let (_, barrier) = classify_and_update(&base, history, &g.positions);
        let mesh = MeshState::initial(&domain).with_floors(&config.min_mesh);
        let extended_cap = config.extended_cap_factor * domain.n().max(1);
        let dir_rng = substream(config.seed, Stream::Directions);
        let termination = evaluator.exhausted().then_some(Termination::Budget);
        Ok(Self {
            config,
            domain,
            evaluator,
            weights,
            neighbors,
            mesh,
            barrier,
            dir_rng,
            last_success: None,
            trace,
            k: 0,
            extended_cap,
            termination,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn history(&self) -> &History {
        self.evaluator.history()
    }

    pub fn mesh(&self) -> &MeshState {
        &self.mesh
    }

    pub fn barrier(&self) -> &BarrierState {
        &self.barrier
    }

    pub fn weights(&self) -> &CatWeights {
        &self.weights
    }

    pub fn neighbors(&self) -> usize {
        self.neighbors
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    /// Completed iterations.
    pub fn iteration(&self) -> u64 {
        self.k
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluator.used()
    }

    pub fn termination(&self) -> Option<Termination> {
        self.termination
    }

    fn point_at(&self, position: usize) -> Point {
        self.evaluator.history().entries()[position].point.clone()
    }

    /// Runs one iteration. Returns `None` once the run has terminated.
    pub fn step(&mut self) -> Option<Outcome> {
        if self.termination.is_some() {
            return None;
        }
        self.k += 1;
        let k = self.k;
        let start = self.barrier.clone();
        let mesh_was_minimal = self.mesh.at_minimum();
        let first_row = self.trace.rows.len();
        let parallel = self.config.parallel;
        let previous = self.last_success.take();

        let mut batch: Vec<usize> = Vec::new();
        let mut success = false;
        let mut exhausted = false;
        let mut next_success: Option<Success> = None;
        let dominating = |r: &EvalResult| start.is_dominating(r);

        // speculative chain along the last quantitative success
        if self.config.speculative_search {
            if let Some(prev) = &previous {
                let mut mult = 2i64;
                for _ in 0..self.config.speculative_steps {
                    let Some(y) = speculative_search(
                        &self.domain,
                        &prev.anchor,
                        &prev.displacement,
                        mult,
                        &self.mesh,
                    ) else {
                        break;
                    };
                    let known = self.evaluator.history().position(&y).is_some();
                    let g = eval_group(
                        &mut self.evaluator,
                        &mut self.trace,
                        parallel,
                        k,
                        Provenance::Spec,
                        std::slice::from_ref(&y),
                        dominating,
                    );
                    batch.extend(&g.positions);
                    exhausted |= g.exhausted;
                    if g.success.is_none() || known {
                        break;
                    }
                    success = true;
                    let c = self.domain.to_quanta(&prev.anchor);
                    let displacement = self
                        .domain
                        .to_quanta(&y)
                        .iter()
                        .zip(&c)
                        .map(|(a, b)| a - b)
                        .collect();
                    next_success = Some(Success {
                        anchor: prev.anchor.clone(),
                        displacement,
                    });
                    mult *= 2;
                }
            }
        }

        // quadratic models around each incumbent
        if !success && !exhausted && self.config.quadratic_search {
            let targets = [
                (start.feasible.as_ref(), ModelTarget::Feasible),
                (
                    start.infeasible.as_ref(),
                    ModelTarget::Infeasible { h_max: start.h_max },
                ),
            ];
            for (inc, target) in targets {
                let Some(inc) = inc else { continue };
                let center = self.point_at(inc.position);
                let cand = quadratic_search(
                    &self.domain,
                    self.evaluator.history(),
                    &center,
                    &self.mesh,
                    target,
                );
                let Some(cand) = cand else { continue };
                let g = eval_group(
                    &mut self.evaluator,
                    &mut self.trace,
                    parallel,
                    k,
                    Provenance::Quad,
                    std::slice::from_ref(&cand.point),
                    dominating,
                );
                batch.extend(&g.positions);
                exhausted |= g.exhausted;
                if g.success.is_some() {
                    success = true;
                }
                if success || exhausted {
                    break;
                }
            }
        }

        // poll: quantitative then categorical, feasible before infeasible
        let mut cat_polled: Vec<(usize, EvalResult)> = Vec::new();
        if !success && !exhausted {
            let centers = [
                (
                    start.feasible.as_ref().map(|i| i.position),
                    Provenance::QntFea,
                    Provenance::CatFea,
                ),
                (
                    start.infeasible.as_ref().map(|i| i.position),
                    Provenance::QntInf,
                    Provenance::CatInf,
                ),
            ];
            let mut groups: Vec<(Provenance, Point, Vec<QntCandidate>)> = Vec::new();
            if self.domain.n_qnt() > 0 {
                for (pos, qnt, _) in &centers {
                    let Some(pos) = *pos else { continue };
                    let center = self.point_at(pos);
                    let dirs = householder_directions(&mut self.dir_rng, &self.mesh);
                    let mut cands = quantitative_poll(&self.domain, &center, &dirs, &self.mesh);
                    if let Some(prev) = &previous {
                        order_by_direction(&mut cands, &prev.displacement, &self.mesh);
                    }
                    groups.push((*qnt, center, cands));
                }
            }
            for (prov, center, cands) in &groups {
                let points: Vec<Point> = cands.iter().map(|c| c.point.clone()).collect();
                let g = eval_group(
                    &mut self.evaluator,
                    &mut self.trace,
                    parallel,
                    k,
                    *prov,
                    &points,
                    dominating,
                );
                batch.extend(&g.positions);
                exhausted |= g.exhausted;
                if let Some(j) = g.success {
                    success = true;
                    next_success = Some(Success {
                        anchor: center.clone(),
                        displacement: cands[j].displacement.clone(),
                    });
                }
                if success || exhausted {
                    break;
                }
            }
            if !success && !exhausted && self.neighbors > 0 {
                for (pos, _, cat) in &centers {
                    let Some(pos) = *pos else { continue };
                    let center = self.point_at(pos);
                    let points =
                        categorical_poll(&self.domain, &center, self.neighbors, &self.weights)
                            .expect("neighbor count validated at construction");
                    let g = eval_group(
                        &mut self.evaluator,
                        &mut self.trace,
                        parallel,
                        k,
                        *cat,
                        &points,
                        dominating,
                    );
                    let entries = self.evaluator.history().entries();
                    cat_polled.extend(g.positions.iter().map(|&i| (i, entries[i].result.clone())));
                    batch.extend(&g.positions);
                    exhausted |= g.exhausted;
                    if g.success.is_some() {
                        success = true;
                    }
                    if success || exhausted {
                        break;
                    }
                }
            }
        }

        // extended poll from near-incumbent categorical neighbors
        if !success
            && !exhausted
            && self.config.extended_poll
            && self.config.xi >= 0.0
            && self.domain.n_qnt() > 0
        {
            let starts = select_extended(&start, &cat_polled, self.config.xi);
            let Self {
                domain,
                evaluator,
                trace,
                mesh,
                dir_rng,
                ..
            } = self;
            for s in starts {
                let entry = &evaluator.history().entries()[s.position];
                let (y, y_result) = (entry.point.clone(), entry.result.clone());
                let h_max = match s.kind {
                    DominanceKind::Feasible => 0.0,
                    DominanceKind::Infeasible => start.h_max,
                };
                let out = extended_poll(
                    domain,
                    mesh,
                    dir_rng,
                    &y,
                    &y_result,
                    s.kind,
                    h_max,
                    self.extended_cap,
                    |p| match evaluator.evaluate(p) {
                        None => ExtendedEval::Exhausted,
                        Some(l) => {
                            record(trace, evaluator.history(), k, Provenance::Ext, l);
                            batch.push(l.index());
                            let result = evaluator.history().entries()[l.index()].result.clone();
                            let new_incumbent = start.is_dominating(&result);
                            ExtendedEval::Done {
                                result,
                                new_incumbent,
                            }
                        }
                    },
                );
                match out.end {
                    ExtendedEnd::NewIncumbent => {
                        success = true;
                        break;
                    }
                    ExtendedEnd::Exhausted => {
                        exhausted = true;
                        break;
                    }
                    ExtendedEnd::Cap => {
                        log::warn!("extended poll hit its cap of {} moves", self.extended_cap)
                    }
                    ExtendedEnd::NoImprovement => {}
                }
            }
        }

        let (outcome, barrier) = classify_and_update(&start, self.evaluator.history(), &batch);
        debug_assert_eq!(success, outcome == Outcome::Dominating);
        self.barrier = barrier;
        self.mesh = self.mesh.update(outcome);
        self.last_success = if outcome == Outcome::Dominating {
            next_success
        } else {
            None
        };
        for row in &mut self.trace.rows[first_row..] {
            row.outcome = Some(outcome);
        }
        let fea = self.barrier.feasible.as_ref();
        let inf = self.barrier.infeasible.as_ref();
        self.trace.iterations.push(IterationRecord {
            k,
            outcome,
            h_max: self.barrier.h_max,
            f_fea: fea.map(|i| i.result.f),
            f_inf: inf.map(|i| i.result.f),
            h_inf: inf.map(|i| i.result.h),
            mesh: self.mesh.describe(),
        });
        log::debug!(
            "iter {k}: {outcome}, evals {}, h_max {}, mesh {}",
            self.evaluator.used(),
            self.barrier.h_max,
            self.mesh.describe()
        );

        if exhausted || self.evaluator.exhausted() {
            self.termination = Some(Termination::Budget);
        } else if outcome == Outcome::Unsuccessful && mesh_was_minimal {
            self.termination = Some(Termination::MeshMinimum);
        }
        Some(outcome)
    }

    /// Iterates until termination.
    pub fn run(mut self) -> SolveResult {
        while self.step().is_some() {}
        self.finish()
    }

    /// Stops the run and packages the result.
    pub fn finish(self) -> SolveResult {
        let termination = self.termination.unwrap_or(Termination::Budget);
        let history = self.evaluator.into_history();
        let (fea, inf) = select_incumbents(&history, self.barrier.h_max);
        let pick =
            |i: crate::barrier::Incumbent| (history.entries()[i.position].point.clone(), i.result);
        SolveResult {
            best_feasible: fea.map(pick),
            best_infeasible: inf.map(pick),
            termination,
            iterations: self.k,
            evaluations: history.len() as u64,
            weights: self.weights,
            trace: self.trace,
            domain: self.domain,
            history,
        }
    }
}

/// Outcome of a complete run.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub best_feasible: Option<(Point, EvalResult)>,
    pub best_infeasible: Option<(Point, EvalResult)>,
    pub termination: Termination,
    pub iterations: u64,
    pub evaluations: u64,
    pub weights: CatWeights,
    pub trace: Trace,
    pub domain: Domain,
    pub history: History,
}

impl SolveResult {
    pub fn best_f(&self) -> Option<f64> {
        self.best_feasible.as_ref().map(|(_, r)| r.f)
    }

    pub fn write_trace<W: Write>(&self, w: W) -> Result<()> {
        self.trace.write_csv(&self.domain, &self.history, w)
    }

    pub fn trace_csv(&self) -> String {
        self.trace.to_csv_string(&self.domain, &self.history)
    }

    pub fn write_iterations<W: Write>(&self, w: W) -> Result<()> {
        self.trace.write_iterations(w)
    }
}

/// Runs the solver to termination.
pub fn solve(problem: ProblemSpec, config: SolverConfig) -> Result<SolveResult> {
    Ok(Solver::new(problem, config)?.run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::make_problem;
    use crate::trace::check_barrier_laws;

    #[test]
    fn config_json_round_trip() {
        let c = SolverConfig::default()
            .with_xi(f64::INFINITY)
            .with_budget(100);
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"xi\":\"inf\""));
        assert_eq!(SolverConfig::from_json(&s).unwrap(), c);
        let c = SolverConfig::from_json(r#"{"xi": -1, "seed": 4}"#).unwrap();
        assert_eq!(c.xi, -1.0);
        assert_eq!(c.seed, 4);
        assert!(SolverConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(SolverConfig::from_json(r#"{"xi": "lots"}"#).is_err());
    }

    #[test]
    fn invalid_configs_fail_before_evaluating() {
        let p = make_problem("convex-2d").unwrap();
        for c in [
            SolverConfig::default().with_budget(2),
            SolverConfig::default().with_xi(f64::NAN),
            SolverConfig {
                doe_fraction: 1.0,
                ..Default::default()
            },
            SolverConfig {
                min_mesh: vec![None, None, None],
                ..Default::default()
            },
        ] {
            assert!(matches!(Solver::new(p.clone(), c), Err(Error::Config(_))));
        }
        let cat = make_problem("cat-1").unwrap();
        let card = cat.domain.cat_cardinality() as usize;
        let c = SolverConfig {
            neighbors: Some(card),
            ..Default::default()
        };
        assert!(matches!(Solver::new(cat, c), Err(Error::Config(_))));
    }

    #[test]
    fn convex_problem_reaches_closed_form_minimum() {
        // (x1-1)^2 + 2(x2+0.5)^2 + 0.5 x1 x2: gradient zero at
        // 2(x1-1) + 0.5 x2 = 0, 4(x2+0.5) + 0.5 x1 = 0
        let det = 2.0 * 4.0 - 0.25;
        let x1 = (2.0 * 4.0 - 0.5 * -2.0) / det;
        let x2 = (2.0 * -2.0 - 0.5 * 2.0) / det;
        let fstar = (x1 - 1.0f64).powi(2) + 2.0 * (x2 + 0.5f64).powi(2) + 0.5 * x1 * x2;
        let r = solve(
            make_problem("convex-2d").unwrap(),
            SolverConfig::default().with_budget(500),
        )
        .unwrap();
        let best = r.best_f().unwrap();
        assert!(best - fstar <= 1e-6, "best {best} vs {fstar}");
        assert!(r.evaluations <= 500);
        check_barrier_laws(&r.trace.iterations).unwrap();
    }

    #[test]
    fn same_seed_same_trace() {
        let cfg = SolverConfig::default().with_budget(150).with_seed(7);
        let a = solve(make_problem("cat-3").unwrap(), cfg.clone()).unwrap();
        let b = solve(make_problem("cat-3").unwrap(), cfg).unwrap();
        assert_eq!(a.trace_csv(), b.trace_csv());
    }

    #[test]
    fn parallel_mode_matches_sequential() {
        let cfg = SolverConfig::default().with_budget(200).with_seed(3);
        let seq = solve(make_problem("cat-17").unwrap(), cfg.clone()).unwrap();
        let par = solve(
            make_problem("cat-17").unwrap(),
            SolverConfig {
                parallel: true,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(seq.trace_csv(), par.trace_csv());
    }

    #[test]
    fn negative_xi_never_extends() {
        let r = solve(
            make_problem("cat-2").unwrap(),
            SolverConfig::default().with_budget(300).with_xi(-1.0),
        )
        .unwrap();
        assert!(r
            .trace
            .rows
            .iter()
            .all(|row| row.provenance != Provenance::Ext));
    }

    #[test]
    fn unsuccessful_iterations_shrink_the_frame() {
        let mut s = Solver::new(
            make_problem("cat-5").unwrap(),
            SolverConfig::default().with_budget(400),
        )
        .unwrap();
        let mut seen = 0;
        loop {
            let before = s.mesh().clone();
            let Some(outcome) = s.step() else { break };
            match outcome {
                Outcome::Unsuccessful => {
                    seen += 1;
                    for i in 0..before.dim() {
                        if before.frame()[i] > before.floors()[i] {
                            assert!(s.mesh().frame()[i] < before.frame()[i], "axis {i}");
                        }
                    }
                }
                Outcome::Improving => assert_eq!(s.mesh(), &before),
                Outcome::Dominating => {}
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn improving_iterations_lower_the_threshold() {
        let r = solve(
            make_problem("cat-20").unwrap(),
            SolverConfig::default().with_budget(400).with_seed(1),
        )
        .unwrap();
        let its = &r.trace.iterations;
        for w in its.windows(2) {
            if w[1].outcome == Outcome::Improving {
                assert!(w[1].h_max < w[0].h_max);
            }
        }
        check_barrier_laws(its).unwrap();
    }

    #[test]
    fn search_success_skips_the_poll() {
        let r = solve(
            make_problem("convex-2d").unwrap(),
            SolverConfig::default().with_budget(300),
        )
        .unwrap();
        let mut by_iter: std::collections::BTreeMap<u64, Vec<Provenance>> = Default::default();
        for row in &r.trace.rows {
            by_iter.entry(row.iter).or_default().push(row.provenance);
        }
        let mut checked = 0;
        for (k, provs) in by_iter.iter().filter(|(k, _)| **k > 0) {
            let it = &r.trace.iterations[*k as usize - 1];
            let last = *provs.last().unwrap();
            if it.outcome == Outcome::Dominating
                && matches!(last, Provenance::Spec | Provenance::Quad)
            {
                assert!(
                    provs.iter().all(|p| !p.is_poll()),
                    "iteration {k}: {provs:?}"
                );
                checked += 1;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn stops_at_minimal_mesh_with_loose_floor() {
        let cfg = SolverConfig {
            min_mesh: vec![Some(0.1), Some(0.1)],
            ..SolverConfig::default().with_budget(5000)
        };
        let r = solve(make_problem("convex-2d").unwrap(), cfg).unwrap();
        assert_eq!(r.termination, Termination::MeshMinimum);
        assert!(r.evaluations < 5000);
    }
}
