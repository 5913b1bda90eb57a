//! Search steps: Latin hypercube design, speculative search along the last
//! successful direction and a quadratic model search.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::blackbox::{violation_aggregate, History};
use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::mesh::MeshState;

const DOE_REDRAWS: usize = 100;
const PENALTY: f64 = 1e6;
const GOLDEN_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoeConfig {
    pub fraction: f64,
}

impl Default for DoeConfig {
    fn default() -> Self {
        Self { fraction: 0.2 }
    }
}

impl DoeConfig {
    /// `max(2, ⌈fraction · budget⌉)`; the design must leave budget for
    /// at least one iteration.
    pub fn count(&self, budget: u64) -> Result<usize> {
        if !(self.fraction > 0.0 && self.fraction < 1.0) {
            return Err(Error::Config(format!(
                "DoE fraction must lie in (0, 1), got {}",
                self.fraction
            )));
        }
        let count = ((self.fraction * budget as f64).ceil() as u64).max(2);
        if count >= budget {
            return Err(Error::Config(format!(
                "budget {budget} leaves nothing after a DoE of {count} points"
            )));
        }
        Ok(count as usize)
    }
}

/// Stratified samples in `[lo, hi)`: one per stratum, shuffled.
fn stratified<R: Rng>(rng: &mut R, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut perm: Vec<usize> = (0..count).collect();
    perm.shuffle(rng);
    perm.into_iter()
        .map(|s| {
            let u: f64 = rng.random();
            lo + (hi - lo) * (s as f64 + u) / count as f64
        })
        .collect()
}

fn snap_cont(domain: &Domain, q: usize, x: f64, bounds: (i64, i64)) -> i64 {
    let e = domain.quantum_exponent(q);
    let v = (x * 10f64.powi(-e)).round() as i64;
    v.clamp(bounds.0, bounds.1)
}

/// Latin hypercube sample: continuous coordinates one per stratum,
/// integers stratified over `[lb − ½, ub + ½)` and rounded, categories
/// uniform. Duplicates are redrawn uniformly a bounded number of times.
pub fn lhs_doe<R: Rng>(domain: &Domain, count: usize, rng: &mut R) -> Vec<Point> {
    let n_int = domain.n_int();
    let bounds = domain.qnt_bounds_quanta();
    let real = domain.qnt_bounds();
    let counts = domain.category_counts();

    let mut columns: Vec<Vec<i64>> = Vec::with_capacity(domain.n_qnt());
    for q in 0..domain.n_qnt() {
        let (lo, hi) = real[q];
        let col = if q < n_int {
            stratified(rng, count, lo - 0.5, hi + 0.5)
                .into_iter()
                .map(|x| (x.round() as i64).clamp(bounds[q].0, bounds[q].1))
                .collect()
        } else {
            stratified(rng, count, lo, hi)
                .into_iter()
                .map(|x| snap_cont(domain, q, x, bounds[q]))
                .collect()
        };
        columns.push(col);
    }

    let mut seen: HashSet<Point> = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let cat: Vec<usize> = counts.iter().map(|&c| rng.random_range(0..c)).collect();
        let q: Vec<i64> = columns.iter().map(|c| c[i]).collect();
        let mut p = domain.from_quanta(cat, &q);
        let mut attempts = 0;
        while seen.contains(&p) && attempts < DOE_REDRAWS {
            attempts += 1;
            let cat: Vec<usize> = counts.iter().map(|&c| rng.random_range(0..c)).collect();
            let q: Vec<i64> = bounds
                .iter()
                .map(|&(l, u)| rng.random_range(l..=u))
                .collect();
            p = domain.from_quanta(cat, &q);
        }
        seen.insert(p.clone());
        out.push(p);
    }
    out
}

/// `last_success + multiplier · displacement`, re-expressed on the current
/// mesh around `last_success`. `None` when the candidate collapses onto
/// the anchor.
pub fn speculative_search(
    domain: &Domain,
    last_success: &Point,
    displacement: &[i64],
    multiplier: i64,
    state: &MeshState,
) -> Option<Point> {
    let c = domain.to_quanta(last_success);
    let z: Vec<i64> = displacement
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let delta = state.mesh_quanta(i) as f64;
            ((s as f64) * multiplier as f64 / delta).round() as i64
        })
        .collect();
    let y = state.mesh_point(&c, &z, &domain.qnt_bounds_quanta());
    (y != c).then(|| domain.from_quanta(last_success.cat.clone(), &y))
}

/// Which fit the quadratic search ended up using.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    Full,
    Diagonal,
}

/// Constraint treatment inside the model subproblem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelTarget {
    /// Model constraints `g_j ≤ 0`.
    Feasible,
    /// Model violation `≤ h_max`.
    Infeasible { h_max: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadCandidate {
    pub point: Point,
    pub fit: FitKind,
}

/// Quadratic basis evaluation at scaled coordinates `s`.
fn basis(s: &[f64], axes: &[usize], full: bool) -> Vec<f64> {
    let mut row = vec![1.0];
    row.extend(axes.iter().map(|&i| s[i]));
    if full {
        for (a, &i) in axes.iter().enumerate() {
            for &j in &axes[a..] {
                row.push(s[i] * s[j]);
            }
        }
    } else {
        row.extend(axes.iter().map(|&i| s[i] * s[i]));
    }
    row
}

struct Model {
    axes: Vec<usize>,
    full: bool,
    /// One coefficient vector per output (f then g_1..g_J).
    coeffs: Vec<DVector<f64>>,
}

impl Model {
    fn eval(&self, s: &[f64], out: usize) -> f64 {
        let b = basis(s, &self.axes, self.full);
        b.iter()
            .zip(self.coeffs[out].iter())
            .map(|(x, c)| x * c)
            .sum()
    }
}

fn fit(rows: &[Vec<f64>], outputs: &[Vec<f64>], axes: Vec<usize>, full: bool) -> Option<Model> {
    let design: Vec<Vec<f64>> = rows.iter().map(|s| basis(s, &axes, full)).collect();
    let p = design[0].len();
    if design.len() < p {
        return None;
    }
    let a = DMatrix::from_fn(design.len(), p, |r, c| design[r][c]);
    let svd = a.svd(true, true);
    let max = svd.singular_values.max();
    if max <= 0.0 || svd.singular_values.min() <= max * 1e-8 {
        return None;
    }
    let coeffs = outputs
        .iter()
        .map(|y| svd.solve(&DVector::from_column_slice(y), max * 1e-12).ok())
        .collect::<Option<Vec<_>>>()?;
    Some(Model { axes, full, coeffs })
}

fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_STEPS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Least-squares quadratic models of `f` and each `g_j` around `incumbent`,
/// minimized over the frame box; the minimizer is snapped to the mesh.
pub fn quadratic_search(
    domain: &Domain,
    history: &History,
    incumbent: &Point,
    state: &MeshState,
    target: ModelTarget,
) -> Option<QuadCandidate> {
    let n = domain.n_qnt();
    if n == 0 {
        return None;
    }
    let c = domain.to_quanta(incumbent);
    let frame: Vec<f64> = (0..n).map(|i| state.frame_quanta(i) as f64).collect();
    let mut rows = Vec::new();
    let n_out = history.n_constraints() + 1;
    let mut outputs: Vec<Vec<f64>> = vec![Vec::new(); n_out];
    for e in history.entries() {
        if e.point.cat != incumbent.cat
            || !e.result.f.is_finite()
            || e.result.g.iter().any(|g| !g.is_finite())
        {
            continue;
        }
        let q = domain.to_quanta(&e.point);
        let s: Vec<f64> = q
            .iter()
            .zip(&c)
            .zip(&frame)
            .map(|((a, b), d)| (a - b) as f64 / d)
            .collect();
        if s.iter().any(|v| v.abs() > 2.0) {
            continue;
        }
        rows.push(s);
        outputs[0].push(e.result.f);
        for (j, g) in e.result.g.iter().enumerate() {
            outputs[j + 1].push(*g);
        }
    }
    let needed = (n + 1) * (n + 2) / 2;
    if rows.len() < needed {
        return None;
    }

    let (model, kind) = match fit(&rows, &outputs, (0..n).collect(), true) {
        Some(m) => (m, FitKind::Full),
        None => {
            let axes: Vec<usize> = (0..n)
                .filter(|&i| {
                    let mut vals: Vec<i64> =
                        rows.iter().map(|r| (r[i] * 1e6).round() as i64).collect();
                    vals.sort_unstable();
                    vals.dedup();
                    vals.len() >= 3
                })
                .collect();
            if axes.is_empty() {
                return None;
            }
            (fit(&rows, &outputs, axes, false)?, FitKind::Diagonal)
        }
    };

    let bounds = domain.qnt_bounds_quanta();
    let lo: Vec<f64> = (0..n)
        .map(|i| ((bounds[i].0 - c[i]) as f64 / frame[i]).max(-1.0))
        .collect();
    let hi: Vec<f64> = (0..n)
        .map(|i| ((bounds[i].1 - c[i]) as f64 / frame[i]).min(1.0))
        .collect();
    let merit = |s: &[f64]| -> f64 {
        let f = model.eval(s, 0);
        let g: Vec<f64> = (1..n_out).map(|j| model.eval(s, j)).collect();
        let pen = match target {
            ModelTarget::Feasible => violation_aggregate(&g),
            ModelTarget::Infeasible { h_max } => (violation_aggregate(&g) - h_max).max(0.0).powi(2),
        };
        f + PENALTY * pen
    };
    let mut s = vec![0.0; n];
    let active: Vec<usize> = model.axes.clone();
    for t in 0..50 * n {
        let i = active[t % active.len()];
        if hi[i] <= lo[i] {
            continue;
        }
        let best = golden(
            |x| {
                let mut y = s.clone();
                y[i] = x;
                merit(&y)
            },
            lo[i],
            hi[i],
        );
        let mut y = s.clone();
        y[i] = best;
        if merit(&y) <= merit(&s) {
            s = y;
        }
    }
    let z: Vec<i64> = (0..n)
        .map(|i| (s[i] * frame[i] / state.mesh_quanta(i) as f64).round() as i64)
        .collect();
    let y = state.mesh_point(&c, &z, &bounds);
    (y != c).then(|| QuadCandidate {
        point: domain.from_quanta(incumbent.cat.clone(), &y),
        fit: kind,
    })
}
