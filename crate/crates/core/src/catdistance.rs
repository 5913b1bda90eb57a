//! Weighted one-hot distance between categorical components, inverse
//! distance weighting and cross-validated weight tuning.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::blackbox::Entry;
use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::rng::{substream, Stream};

/// Smallest admissible weight.
pub const WEIGHT_FLOOR: f64 = 1e-6;
/// Largest weight the tuner may return.
pub const WEIGHT_CEIL: f64 = 1e3;

const FOLDS: u64 = 3;
const STARTS: usize = 3;
const MAX_OBJECTIVE_EVALS: usize = 200;
const MIN_STEP: f64 = 1e-2;

/// One weight per (variable, category) pair in one-hot order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatWeights {
    theta: Vec<f64>,
}

impl CatWeights {
    pub fn uniform(domain: &Domain) -> Self {
        Self {
            theta: vec![1.0; domain.onehot_len()],
        }
    }

    pub fn new(domain: &Domain, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != domain.onehot_len() {
            return Err(Error::Structure(format!(
                "expected {} weights, got {}",
                domain.onehot_len(),
                theta.len()
            )));
        }
        if let Some(t) = theta.iter().find(|t| !t.is_finite() || **t < WEIGHT_FLOOR) {
            return Err(Error::OutOfRange(format!(
                "weight {t} is not finite or below {WEIGHT_FLOOR}"
            )));
        }
        Ok(Self { theta })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// `label=value` pairs, variable-qualified.
    pub fn describe(&self, domain: &Domain) -> String {
        let mut parts = Vec::with_capacity(self.theta.len());
        for v in 0..domain.n_cat() {
            let off = domain.onehot_offset(v);
            for (c, label) in domain.labels(v).iter().enumerate() {
                parts.push(format!("x{}:{}={:?}", v + 1, label, self.theta[off + c]));
            }
        }
        parts.join(" ")
    }
}

/// `Σ_c θ_c |onehot(u)_c − onehot(v)_c|`: each mismatched variable adds the
/// weights of both of its categories.
pub fn cat_distance(domain: &Domain, u: &[usize], v: &[usize], w: &CatWeights) -> f64 {
    let mut d = 0.0;
    for (i, (&a, &b)) in u.iter().zip(v).enumerate() {
        if a != b {
            let off = domain.onehot_offset(i);
            d += w.theta[off + a] + w.theta[off + b];
        }
    }
    d
}

/// Default neighbor count `max(2, ⌈√|X^cat|⌉)`, capped at `|X^cat| − 1`.
pub fn default_neighbors(cardinality: u64) -> usize {
    if cardinality <= 1 {
        return 0;
    }
    let mut r = (cardinality as f64).sqrt().ceil() as u64;
    while r * r < cardinality {
        r += 1;
    }
    while r > 1 && (r - 1) * (r - 1) >= cardinality {
        r -= 1;
    }
    r.max(2).min(cardinality - 1) as usize
}

/// The `m + 1` components closest to a center, closest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub center: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    pub distances: Vec<f64>,
}

impl Neighborhood {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members other than the center, in order.
    pub fn others(&self) -> &[Vec<usize>] {
        &self.members[1..]
    }
}

struct Ranked {
    d: f64,
    not_center: bool,
    comp: Vec<usize>,
}

impl Ranked {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.d
            .total_cmp(&other.d)
            .then(self.not_center.cmp(&other.not_center))
            .then_with(|| self.comp.cmp(&other.comp))
    }
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_cmp(other)
    }
}

/// Distance-induced neighborhood of `center`; ties break lexicographically.
pub fn neighborhood(
    domain: &Domain,
    center: &[usize],
    m: usize,
    w: &CatWeights,
) -> Result<Neighborhood> {
    let card = domain.cat_cardinality();
    if m as u64 >= card {
        return Err(Error::OutOfRange(format!(
            "neighbor count {m} must be below |X^cat| = {card}"
        )));
    }
    let keep = m + 1;
    let mut heap: BinaryHeap<Ranked> = BinaryHeap::with_capacity(keep + 1);
    for comp in domain.cat_components() {
        let r = Ranked {
            d: cat_distance(domain, center, &comp, w),
            not_center: comp.as_slice() != center,
            comp,
        };
        if heap.len() < keep {
            heap.push(r);
        } else if r < *heap.peek().expect("heap is full") {
            heap.pop();
            heap.push(r);
        }
    }
    let sorted = heap.into_sorted_vec();
    Ok(Neighborhood {
        center: center.to_vec(),
        distances: sorted.iter().map(|r| r.d).collect(),
        members: sorted.into_iter().map(|r| r.comp).collect(),
    })
}

/// Per-variable quantitative normalization: coordinates divided by range.
fn qnt_normalized(domain: &Domain, p: &Point) -> Vec<f64> {
    let bounds = domain.qnt_bounds();
    p.int
        .iter()
        .map(|&v| v as f64)
        .chain(p.cont.iter().copied())
        .zip(bounds)
        .map(|(x, (lb, ub))| if ub > lb { (x - lb) / (ub - lb) } else { 0.0 })
        .collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Inverse distance weighting with power 2.
pub fn idw_predict(
    domain: &Domain,
    data: &[(Point, f64)],
    w: &CatWeights,
    query: &Point,
) -> Result<f64> {
    let qn = qnt_normalized(domain, query);
    let mut num = 0.0;
    let mut den = 0.0;
    let mut any = false;
    for (p, f) in data {
        if !f.is_finite() {
            continue;
        }
        any = true;
        let dc = cat_distance(domain, &query.cat, &p.cat, w);
        let d2 = dc * dc + sq_dist(&qn, &qnt_normalized(domain, p));
        if d2 == 0.0 {
            return Ok(*f);
        }
        num += f / d2;
        den += 1.0 / d2;
    }
    if !any {
        return Err(Error::NoData(
            "interpolation needs a finite objective value".into(),
        ));
    }
    Ok(num / den)
}

/// Fold of a point in the cross-validation split.
pub fn fold_of(eval_index: u64, seed: u64) -> usize {
    (eval_index.wrapping_add(seed) % FOLDS) as usize
}

/// Precomputed pairwise data for repeated CV evaluations.
struct CvData {
    f: Vec<f64>,
    fold: Vec<usize>,
    qnt_d2: Vec<f64>,
    /// Mismatched one-hot index pairs per ordered pair (i, j).
    mismatch: Vec<Vec<(usize, usize)>>,
    n: usize,
}

impl CvData {
    fn new(domain: &Domain, entries: &[&Entry], seed: u64) -> Self {
        let n = entries.len();
        let norm: Vec<Vec<f64>> = entries
            .iter()
            .map(|e| qnt_normalized(domain, &e.point))
            .collect();
        let mut qnt_d2 = vec![0.0; n * n];
        let mut mismatch = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in 0..n {
                qnt_d2[i * n + j] = sq_dist(&norm[i], &norm[j]);
                let (a, b) = (&entries[i].point.cat, &entries[j].point.cat);
                mismatch[i * n + j] = (0..a.len())
                    .filter(|&v| a[v] != b[v])
                    .map(|v| {
                        let off = domain.onehot_offset(v);
                        (off + a[v], off + b[v])
                    })
                    .collect();
            }
        }
        Self {
            f: entries.iter().map(|e| e.result.f).collect(),
            fold: entries
                .iter()
                .map(|e| fold_of(e.result.eval_index, seed))
                .collect(),
            qnt_d2,
            mismatch,
            n,
        }
    }

    fn usable(&self) -> bool {
        let mut seen = [false; FOLDS as usize];
        for &k in &self.fold {
            seen[k] = true;
        }
        seen.iter().filter(|&&s| s).count() >= 2
    }

    /// Mean over non-empty folds of the held-out RMSE.
    fn rmse(&self, theta: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut folds = 0;
        for k in 0..FOLDS as usize {
            let mut se = 0.0;
            let mut count = 0usize;
            for i in (0..self.n).filter(|&i| self.fold[i] == k) {
                let mut num = 0.0;
                let mut den = 0.0;
                let mut exact = None;
                for j in (0..self.n).filter(|&j| self.fold[j] != k) {
                    let dc: f64 = self.mismatch[i * self.n + j]
                        .iter()
                        .map(|&(a, b)| theta[a] + theta[b])
                        .sum();
                    let d2 = dc * dc + self.qnt_d2[i * self.n + j];
                    if d2 == 0.0 {
                        exact = Some(self.f[j]);
                        break;
                    }
                    num += self.f[j] / d2;
                    den += 1.0 / d2;
                }
                let pred = match exact {
                    Some(v) => v,
                    None if den > 0.0 => num / den,
                    None => continue,
                };
                se += (pred - self.f[i]).powi(2);
                count += 1;
            }
            if count > 0 {
                total += (se / count as f64).sqrt();
                folds += 1;
            }
        }
        if folds == 0 {
            f64::INFINITY
        } else {
            total / folds as f64
        }
    }
}

fn usable_entries(entries: &[Entry]) -> Vec<&Entry> {
    entries.iter().filter(|e| e.result.f.is_finite()).collect()
}

/// Cross-validation RMSE of IDW under `w`; `None` when fewer than three
/// finite points or fewer than two non-empty folds are available.
pub fn cv_rmse(domain: &Domain, entries: &[Entry], w: &CatWeights, seed: u64) -> Option<f64> {
    let usable = usable_entries(entries);
    if usable.len() < 3 {
        return None;
    }
    let data = CvData::new(domain, &usable, seed);
    data.usable().then(|| data.rmse(w.as_slice()))
}

/// Outcome of weight tuning.
#[derive(Debug, Clone, PartialEq)]
pub struct Tuning {
    pub weights: CatWeights,
    /// CV-RMSE of the returned weights (`None` when tuning was skipped).
    pub cv_rmse: Option<f64>,
    /// CV-RMSE of the uniform start.
    pub uniform_cv_rmse: Option<f64>,
    pub objective_evals: usize,
}

/// Tunes weights on `entries`. See [`tune_weights_detailed`].
pub fn tune_weights(domain: &Domain, entries: &[Entry], seed: u64) -> CatWeights {
    tune_weights_detailed(domain, entries, seed).weights
}

/// Multi-start coordinate descent on `log θ` minimizing the 3-fold CV-RMSE
/// of IDW. The first start is uniform, so the result is never worse than
/// uniform weights.
pub fn tune_weights_detailed(domain: &Domain, entries: &[Entry], seed: u64) -> Tuning {
    let uniform = CatWeights::uniform(domain);
    let skipped = Tuning {
        weights: uniform.clone(),
        cv_rmse: None,
        uniform_cv_rmse: None,
        objective_evals: 0,
    };
    if domain.n_cat() == 0 {
        return skipped;
    }
    let usable = usable_entries(entries);
    if usable.len() < 3 {
        return skipped;
    }
    let data = CvData::new(domain, &usable, seed);
    if !data.usable() {
        return skipped;
    }

    let dim = domain.onehot_len();
    let (lo, hi) = (WEIGHT_FLOOR.ln(), WEIGHT_CEIL.ln());
    let mut rng = substream(seed, Stream::Tuning);
    let mut starts = vec![vec![0.0; dim]];
    for _ in 1..STARTS {
        starts.push(
            (0..dim)
                .map(|_| rng.random_range(0.1f64.ln()..10f64.ln()))
                .collect(),
        );
    }

    let objective = |z: &[f64]| {
        let theta: Vec<f64> = z.iter().map(|v| v.exp()).collect();
        data.rmse(&theta)
    };

    let mut evals = 0usize;
    let uniform_value = objective(&starts[0]);
    evals += 1;
    let mut best_z = starts[0].clone();
    let mut best_v = uniform_value;

    for (s, start) in starts.into_iter().enumerate() {
        let remaining = MAX_OBJECTIVE_EVALS.saturating_sub(evals);
        let share = remaining / (STARTS - s);
        let cap = evals + share;
        let mut z = start;
        let mut v = if s == 0 {
            uniform_value
        } else {
            if evals >= cap {
                break;
            }
            evals += 1;
            objective(&z)
        };
        let mut step = 1.0;
        'descent: while step >= MIN_STEP {
            let mut improved = false;
            for c in 0..dim {
                for sign in [1.0, -1.0] {
                    if evals >= cap {
                        break 'descent;
                    }
                    let trial = (z[c] + sign * step).clamp(lo, hi);
                    if trial == z[c] {
                        continue;
                    }
                    let old = z[c];
                    z[c] = trial;
                    evals += 1;
                    let tv = objective(&z);
                    if tv < v {
                        v = tv;
                        improved = true;
                        break;
                    }
                    z[c] = old;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if v < best_v {
            best_v = v;
            best_z = z;
        }
    }

    let theta = best_z
        .iter()
        .map(|v| v.exp().clamp(WEIGHT_FLOOR, WEIGHT_CEIL))
        .collect();
    let weights = CatWeights { theta };
    Tuning {
        cv_rmse: Some(data.rmse(weights.as_slice())),
        weights,
        uniform_cv_rmse: Some(uniform_value),
        objective_evals: evals,
    }
}
