//! Benchmark campaigns: multi-seed runs of several solver configurations,
//! a trace store on disk and data profiles built from it.

pub mod emit;
pub mod profile;
pub mod reference;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::blackbox::problems::problem_info;
use crate::blackbox::{make_problem, ProblemSpec};
use crate::error::{Error, Result};
use crate::solver::{solve, SolverConfig};
use crate::trace::{read_trace, TraceRecord};

/// One problem run with one seed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instance {
    pub problem: String,
    pub seed: u64,
    pub budget: u64,
}

/// Evaluation budget per instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetRule {
    /// `factor · n` evaluations.
    PerVariable(u64),
    Fixed(u64),
}

impl Default for BudgetRule {
    fn default() -> Self {
        BudgetRule::PerVariable(250)
    }
}

impl BudgetRule {
    pub fn budget(self, n: usize) -> u64 {
        match self {
            BudgetRule::PerVariable(f) => f * n as u64,
            BudgetRule::Fixed(b) => b,
        }
    }
}

/// A solver taking part in a campaign.
pub trait SolverAdapter: Send + Sync {
    /// Directory-safe identifier.
    fn name(&self) -> &str;

    /// Settings recorded in the campaign manifest.
    fn settings(&self) -> serde_json::Value;

    /// Runs one instance and returns its evaluation trace as CSV text.
    /// Adapters should start from [`crate::solver::initial_design`] so that
    /// all solvers of an instance share the same design of experiments.
    fn run(&self, problem: ProblemSpec, instance: &Instance) -> Result<String>;
}

/// The built-in solver under a named configuration.
#[derive(Debug, Clone)]
pub struct CatMads {
    pub name: String,
    pub config: SolverConfig,
}

impl CatMads {
    pub fn new(name: impl Into<String>, config: SolverConfig) -> Self {
        Self {
            name: name.into(),
            config,
        }
    }
}

impl SolverAdapter for CatMads {
    fn name(&self) -> &str {
        &self.name
    }

    fn settings(&self) -> serde_json::Value {
        serde_json::to_value(&self.config).expect("config serializes")
    }

    fn run(&self, problem: ProblemSpec, instance: &Instance) -> Result<String> {
        let config = self
            .config
            .clone()
            .with_seed(instance.seed)
            .with_budget(instance.budget);
        Ok(solve(problem, config)?.trace_csv())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunFailure {
    pub solver: String,
    pub problem: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverEntry {
    pub name: String,
    pub settings: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceEntry {
    pub problem: String,
    pub seed: u64,
    pub budget: u64,
    pub n: usize,
    pub constrained: bool,
}

/// `manifest.json` at the root of a trace store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub solvers: Vec<SolverEntry>,
    pub instances: Vec<InstanceEntry>,
    pub failures: Vec<RunFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub runs: usize,
    pub failures: Vec<RunFailure>,
    pub digest: String,
}

/// Seeds `campaign_seed, campaign_seed + 1, ...`.
pub fn instance_seeds(campaign_seed: u64, count: usize) -> Vec<u64> {
    (0..count as u64)
        .map(|i| campaign_seed.wrapping_add(i))
        .collect()
}

/// Path of one trace inside a store.
pub fn trace_path(root: &Path, solver: &str, problem: &str, seed: u64) -> PathBuf {
    root.join(solver).join(format!("{problem}__s{seed}.csv"))
}

fn check_solver_names(solvers: &[Box<dyn SolverAdapter>]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for s in solvers {
        let name = s.name();
        let safe = !name.is_empty()
            && name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
            && !name.starts_with('.');
        if !safe {
            return Err(Error::Config(format!(
                "solver name `{name}` is not directory-safe"
            )));
        }
        if !seen.insert(name) {
            return Err(Error::Config(format!("duplicate solver name `{name}`")));
        }
    }
    Ok(())
}

/// Runs every (solver, problem, seed) combination and writes the traces and
/// a manifest under `out`. Individual run failures are recorded and the
/// campaign continues.
pub fn run_campaign(
    problems: &[String],
    solvers: &[Box<dyn SolverAdapter>],
    seeds: &[u64],
    budget: BudgetRule,
    out: &Path,
) -> Result<CampaignReport> {
    check_solver_names(solvers)?;
    let mut instances = Vec::new();
    for p in problems {
        let spec = make_problem(p)?;
        let n = spec.domain.n();
        for &seed in seeds {
            instances.push(InstanceEntry {
                problem: spec.name.clone(),
                seed,
                budget: budget.budget(n),
                n,
                constrained: spec.is_constrained(),
            });
        }
    }
    fs::create_dir_all(out)?;
    for s in solvers {
        fs::create_dir_all(out.join(s.name()))?;
    }

    let jobs: Vec<(usize, &InstanceEntry)> = (0..solvers.len())
        .flat_map(|s| instances.iter().map(move |i| (s, i)))
        .collect();
    let results: Vec<Result<()>> = jobs
        .par_iter()
        .map(|&(s, inst)| {
            let solver = &solvers[s];
            let problem = make_problem(&inst.problem)?;
            let instance = Instance {
                problem: inst.problem.clone(),
                seed: inst.seed,
                budget: inst.budget,
            };
            let csv = solver.run(problem, &instance)?;
            fs::write(
                trace_path(out, solver.name(), &inst.problem, inst.seed),
                csv,
            )?;
            Ok(())
        })
        .collect();

    let mut failures = Vec::new();
    for (&(s, inst), r) in jobs.iter().zip(results) {
        if let Err(e) = r {
            log::warn!(
                "{} on {} seed {}: {e}",
                solvers[s].name(),
                inst.problem,
                inst.seed
            );
            failures.push(RunFailure {
                solver: solvers[s].name().to_string(),
                problem: inst.problem.clone(),
                seed: inst.seed,
                message: e.to_string(),
            });
        }
    }
    let manifest = Manifest {
        solvers: solvers
            .iter()
            .map(|s| SolverEntry {
                name: s.name().to_string(),
                settings: s.settings(),
            })
            .collect(),
        instances: instances.clone(),
        failures: failures.clone(),
    };
    fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    let digest = store_digest(out)?;
    Ok(CampaignReport {
        runs: jobs.len(),
        failures,
        digest,
    })
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<(String, PathBuf)>) -> Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else if path.extension().is_some_and(|e| e == "csv") {
            let rel = path
                .strip_prefix(root)
                .expect("walk stays under root")
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            out.push((rel, path));
        }
    }
    Ok(())
}

/// SHA-256 over every trace file of a store, in sorted path order.
pub fn store_digest(root: &Path) -> Result<String> {
    let mut files = Vec::new();
    collect_files(root, root, &mut files)?;
    files.sort();
    let mut h = Sha256::new();
    for (rel, path) in files {
        h.update(rel.as_bytes());
        h.update([0u8]);
        let bytes = fs::read(path)?;
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(&bytes);
    }
    Ok(hex::encode(h.finalize()))
}

/// A trace store loaded into memory.
#[derive(Debug, Clone)]
pub struct TraceStore {
    pub manifest: Manifest,
    /// Keyed by `(solver, problem, seed)`; failed runs are absent.
    pub traces: BTreeMap<(String, String, u64), Vec<TraceRecord>>,
}

impl TraceStore {
    pub fn load(root: &Path) -> Result<Self> {
        let text = fs::read_to_string(root.join("manifest.json"))
            .map_err(|e| Error::Config(format!("{}: {e}", root.join("manifest.json").display())))?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        let mut traces = BTreeMap::new();
        for s in &manifest.solvers {
            for inst in &manifest.instances {
                let path = trace_path(root, &s.name, &inst.problem, inst.seed);
                if !path.exists() {
                    continue;
                }
                let records = read_trace(fs::File::open(&path)?)?;
                traces.insert((s.name.clone(), inst.problem.clone(), inst.seed), records);
            }
        }
        Ok(Self { manifest, traces })
    }

    pub fn solver_names(&self) -> Vec<String> {
        self.manifest
            .solvers
            .iter()
            .map(|s| s.name.clone())
            .collect()
    }

    pub fn trace(&self, solver: &str, problem: &str, seed: u64) -> Option<&[TraceRecord]> {
        self.traces
            .get(&(solver.to_string(), problem.to_string(), seed))
            .map(Vec::as_slice)
    }
}

/// True if the registry knows `name` as a constrained problem.
pub fn is_constrained(name: &str) -> Option<bool> {
    problem_info(name).map(|i| i.dims.4 > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_rules() {
        assert_eq!(BudgetRule::default().budget(4), 1000);
        assert_eq!(BudgetRule::Fixed(77).budget(4), 77);
    }

    #[test]
    fn solver_names_must_be_safe_and_unique() {
        let a: Vec<Box<dyn SolverAdapter>> = vec![
            Box::new(CatMads::new("a", SolverConfig::default())),
            Box::new(CatMads::new("a", SolverConfig::default())),
        ];
        assert!(check_solver_names(&a).is_err());
        let b: Vec<Box<dyn SolverAdapter>> =
            vec![Box::new(CatMads::new("../x", SolverConfig::default()))];
        assert!(check_solver_names(&b).is_err());
    }

    #[test]
    fn trace_paths() {
        let p = trace_path(Path::new("/s"), "xi", "cat-ackley", 3);
        assert_eq!(p, Path::new("/s/xi/cat-ackley__s3.csv"));
    }
}
