//! Independent reference computations used by tests and fixture generation.

#![allow(dead_code)]

use std::f64::consts::PI;

use catmads::blackbox::{ProblemSpec, RawOutcome};
use catmads::domain::{Domain, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Objective value, `+∞` for failures.
pub fn objective(problem: &ProblemSpec, p: &Point) -> f64 {
    match problem.blackbox.evaluate(&problem.domain, p) {
        RawOutcome::Ok { f, .. } if f.is_finite() => f,
        _ => f64::INFINITY,
    }
}

fn clamp_box(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

/// Box-clamped Nelder-Mead.
pub fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    bounds: &[(f64, f64)],
    max_evals: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    if n == 0 {
        return (vec![], f(&[]));
    }
    let eval = |x: &mut Vec<f64>| {
        clamp_box(x, bounds);
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut start = x0.to_vec();
    let f0 = eval(&mut start);
    simplex.push((start.clone(), f0));
    for i in 0..n {
        let mut x = start.clone();
        let step = 0.1 * (bounds[i].1 - bounds[i].0);
        x[i] = if x[i] + step <= bounds[i].1 {
            x[i] + step
        } else {
            x[i] - step
        };
        let fx = eval(&mut x);
        simplex.push((x, fx));
    }
    let mut evals = n + 1;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size: f64 = (0..n)
            .map(|i| {
                simplex
                    .iter()
                    .map(|s| (s.0[i] - simplex[0].0[i]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.abs() < 1e-14 && size < 1e-10 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|s| s.0[i]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let mut xr = along(1.0);
        let fr = eval(&mut xr);
        evals += 1;
        if fr < simplex[0].1 {
            let mut xe = along(2.0);
            let fe = eval(&mut xe);
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let t = if fr < simplex[n].1 { 0.5 } else { -0.5 };
            let mut xc = along(t);
            let fc = eval(&mut xc);
            evals += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> =
                        s.0.iter()
                            .zip(&best)
                            .map(|(a, b)| b + 0.5 * (a - b))
                            .collect();
                    let fx = eval(&mut x);
                    *s = (x, fx);
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Alternates Nelder-Mead restarts on the continuous part with unit moves
/// on each integer, keeping the categorical part fixed.
pub fn polish(problem: &ProblemSpec, p: &Point) -> (Point, f64) {
    let d = &problem.domain;
    let cont_bounds: Vec<(f64, f64)> = (0..d.n_cont()).map(|i| d.cont_bounds(i)).collect();
    let mut best = p.clone();
    clamp_box(&mut best.cont, &cont_bounds);
    let mut fbest = objective(problem, &best);
    for _ in 0..60 {
        let before = fbest;
        if d.n_cont() > 0 {
            let cat = best.cat.clone();
            let int = best.int.clone();
            let f =
                |x: &[f64]| objective(problem, &Point::new(cat.clone(), int.clone(), x.to_vec()));
            for _ in 0..3 {
                let (x, fx) = nelder_mead(&f, &best.cont, &cont_bounds, 4000);
                if fx < fbest {
                    best.cont = x;
                    fbest = fx;
                }
            }
        }
        for i in 0..d.n_int() {
            let (lo, hi) = d.int_bounds(i);
            for step in [-1i64, 1] {
                loop {
                    let v = best.int[i] + step;
                    if v < lo || v > hi {
                        break;
                    }
                    let mut q = best.clone();
                    q.int[i] = v;
                    let fq = objective(problem, &q);
                    if fq < fbest {
                        best = q;
                        fbest = fq;
                    } else {
                        break;
                    }
                }
            }
        }
        if fbest.is_nan() || fbest >= before - 1e-15 {
            break;
        }
    }
    (best, fbest)
}

fn random_point(d: &Domain, cat: &[usize], rng: &mut ChaCha8Rng) -> Point {
    let int = (0..d.n_int())
        .map(|i| {
            let (lo, hi) = d.int_bounds(i);
            rng.random_range(lo..=hi)
        })
        .collect();
    let cont = (0..d.n_cont())
        .map(|i| {
            let (lo, hi) = d.cont_bounds(i);
            rng.random_range(lo..=hi)
        })
        .collect();
    Point::new(cat.to_vec(), int, cont)
}

/// Known good points of the unconstrained registry problems, derived from
/// the minimizers of their base functions.
pub fn hints(name: &str) -> Vec<Point> {
    let mut out = Vec::new();
    match name {
        "cat-ackley" => {
            for (a, s) in [0.0, 1.0, -1.0].into_iter().enumerate() {
                for (b, t) in [0.0, 1.0, -1.0].into_iter().enumerate() {
                    out.push(Point::new(vec![a, b], vec![t as i64; 2], vec![s; 4]));
                }
            }
        }
        "cat-beale" => {
            for (a, s) in [0.0, 0.5, -0.5].into_iter().enumerate() {
                for (b, t) in [2i64, 0, -2].into_iter().enumerate() {
                    out.push(Point::new(vec![a, b], vec![t, 1], vec![3.0 - s, 0.5, 3.0]));
                }
            }
        }
        "cat-branin" => {
            for a in 0..2 {
                for b in 0..2 {
                    for (u, v) in [(-PI, 12.275), (PI, 2.275), (9.42478, 2.475)] {
                        let v = if a == 0 { v } else { 15.0 - v };
                        out.push(Point::new(
                            vec![a, b],
                            vec![2, 1 + 2 * b as i64],
                            vec![u, v],
                        ));
                    }
                }
            }
        }
        "cat-bukin6" => {
            for (a, sc) in [1.0, 0.5].into_iter().enumerate() {
                for (b, sh) in [0.0, 1.0].into_iter().enumerate() {
                    out.push(Point::new(
                        vec![a, b],
                        vec![a as i64, -(b as i64)],
                        vec![-10.0, 1.0 / sc, -10.0, 1.0 + sh],
                    ));
                }
            }
        }
        "cat-goldstein" => {
            for (a, s1) in [0.0, 0.5, -0.5].into_iter().enumerate() {
                for (b, s2) in [0.0, 0.5, 1.0].into_iter().enumerate() {
                    out.push(Point::new(vec![a, b], vec![], vec![s1, -1.0 - s2]));
                }
            }
        }
        "cat-goldstein-price" => {
            for a in 0..4 {
                let (s, co) = (a as f64 * PI / 8.0).sin_cos();
                for b in 0..2 {
                    for c in 0..2 {
                        let (c1, c2) = (b as i64, c as i64);
                        out.push(Point::new(
                            vec![a, b, c],
                            vec![c1, -c2, c1 - c2],
                            vec![-s, -co],
                        ));
                    }
                }
            }
        }
        "cat-rastrigin" => {
            for (a, t) in [0i64, 1, -1].into_iter().enumerate() {
                for (b, s) in [0.0, 0.5, -0.5].into_iter().enumerate() {
                    out.push(Point::new(vec![a, b], vec![t; 2], vec![s; 8]));
                }
            }
        }
        "cat-rosenbrock" => {
            for (a, s) in [0.0, 0.5].into_iter().enumerate() {
                for b in 0..3 {
                    out.push(Point::new(vec![a, b], vec![1, 1], vec![1.0 + s; 4]));
                }
            }
        }
        "cat-rosen-suzuki" => {
            const SHIFT: [[f64; 4]; 4] = [
                [0.0, 0.0, 0.0, 0.0],
                [1.0, -1.0, 0.0, 0.0],
                [0.0, 0.0, -1.0, 1.0],
                [-1.0, 0.0, 1.0, 0.0],
            ];
            for (a, t) in [0i64, 2, -2, 1].into_iter().enumerate() {
                let y = [2.5, 2.5, 5.25, -3.5];
                let x = (0..4).map(|i| y[i] + SHIFT[a][i]).collect();
                out.push(Point::new(vec![a], vec![t], x));
            }
        }
        "cat-styblinski-tang" => {
            for (a, s) in [0.0, 0.5, -0.5, 1.0, -1.0].into_iter().enumerate() {
                out.push(Point::new(vec![a], vec![-3; 5], vec![s - 2.903534; 5]));
            }
        }
        "cat-toy-4" | "cat-toy-8" => {
            let dim = if name == "cat-toy-4" { 4 } else { 8 };
            for c in 0..10usize {
                let x = (0..dim)
                    .map(|i| (((3 * c + 7 * i) % 10) as f64 + 0.5) / 10.0)
                    .collect();
                out.push(Point::new(vec![c], vec![], x));
            }
        }
        "cat-wong1" => {
            const D: [[i64; 3]; 5] = [[0, 0, 0], [1, -1, 0], [-1, 1, 1], [2, 0, -1], [0, 2, 1]];
            for (a, d) in D.iter().enumerate() {
                out.push(Point::new(
                    vec![a],
                    vec![10 + d[0], 12 + d[1], 11 + d[2]],
                    vec![0.0, 0.0, 1.0, 1.5],
                ));
            }
        }
        "cat-zakharov" => {
            let t = [0i64, 1, -1];
            for (a, s) in [0.0, 0.5, -0.5].into_iter().enumerate() {
                for b in 0..3 {
                    out.push(Point::new(vec![a, b], vec![t[a], t[b]], vec![s; 4]));
                }
            }
        }
        _ => {}
    }
    out
}

/// Best point found by polishing the hints and `starts` random points per
/// categorical component.
pub fn brute_force_optimum(problem: &ProblemSpec, starts: usize, seed: u64) -> (Point, f64) {
    let d = &problem.domain;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Point, f64)> = None;
    let mut consider = |cand: (Point, f64)| {
        if best.as_ref().is_none_or(|b| cand.1 < b.1) {
            best = Some(cand);
        }
    };
    for h in hints(&problem.name) {
        consider(polish(problem, &h));
    }
    for cat in d.cat_components() {
        for _ in 0..starts {
            let p = random_point(d, &cat, &mut rng);
            consider(polish(problem, &p));
        }
    }
    best.expect("at least one categorical component")
}

/// Positive spanning check: every `±e_i` and every orthant vector `s ∈ {±1}^n`
/// must be a nonnegative combination of `dirs`. Each test is a small LP
/// solved by exhaustively trying supports of size `n`.
pub fn positively_spans(dirs: &[Vec<f64>]) -> bool {
    let n = dirs.first().map_or(0, Vec::len);
    if n == 0 {
        return false;
    }
    let mut targets: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            targets.push(e);
        }
    }
    for mask in 0..(1u32 << n) {
        targets.push(
            (0..n)
                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                .collect(),
        );
    }
    targets.iter().all(|t| nonnegative_combination(dirs, t))
}

/// Carathéodory: `t` is in the cone of `dirs` iff it is a nonnegative
/// combination of some linearly independent subset of at most `n` of them.
fn nonnegative_combination(dirs: &[Vec<f64>], t: &[f64]) -> bool {
    let n = t.len();
    let m = dirs.len();
    let mut idx: Vec<usize> = Vec::new();
    fn rec(
        dirs: &[Vec<f64>],
        t: &[f64],
        start: usize,
        idx: &mut Vec<usize>,
        n: usize,
        m: usize,
    ) -> bool {
        if !idx.is_empty() && solve_subset(dirs, t, idx) {
            return true;
        }
        if idx.len() == n {
            return false;
        }
        for j in start..m {
            idx.push(j);
            if rec(dirs, t, j + 1, idx, n, m) {
                return true;
            }
            idx.pop();
        }
        false
    }
    rec(dirs, t, 0, &mut idx, n, m)
}

/// Least squares on the chosen columns; accepts an exact, nonnegative fit.
fn solve_subset(dirs: &[Vec<f64>], t: &[f64], idx: &[usize]) -> bool {
    let n = t.len();
    let k = idx.len();
    let a = nalgebra::DMatrix::from_fn(n, k, |r, c| dirs[idx[c]][r]);
    let b = nalgebra::DVector::from_column_slice(t);
    let svd = a.clone().svd(true, true);
    if svd.singular_values.iter().any(|&s| s < 1e-9) {
        return false;
    }
    let Ok(x) = svd.solve(&b, 1e-12) else {
        return false;
    };
    let resid = (&a * &x - &b).norm();
    resid < 1e-8 && x.iter().all(|&v| v >= -1e-12)
}

/// Exhaustive neighborhood: sort every categorical component by
/// `(distance, is_not_center, index tuple)` and keep the first `m + 1`.
/// `theta` holds one weight per one-hot coordinate.
pub fn exhaustive_neighborhood(
    d: &Domain,
    center: &[usize],
    m: usize,
    theta: &[f64],
) -> Vec<Vec<usize>> {
    let c_hot = d.onehot(center).expect("valid center");
    let mut all: Vec<(f64, bool, Vec<usize>)> = d
        .cat_components()
        .map(|u| {
            let u_hot = d.onehot(&u).expect("valid component");
            let dist: f64 = u_hot
                .iter()
                .zip(&c_hot)
                .zip(theta)
                .map(|((a, b), w)| w * (f64::from(*a) - f64::from(*b)).abs())
                .sum();
            let not_center = u.as_slice() != center;
            (dist, not_center, u)
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    all.into_iter().take(m + 1).map(|x| x.2).collect()
}
