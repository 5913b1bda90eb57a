//! Built-in mixed-variable test problems.
//!
//! Each entry adapts a classic continuous function to mixed variables, either
//! by letting categories shift, scale or rotate the continuous arguments, or
//! by switching between cases of the function per category. Integer variables
//! enter as coordinates of the base function (possibly scaled). Dimensions
//! and constraint counts follow the usual mixed-variable benchmark tables:
//! `ℓ` there is the number of categorical components `|X^cat|`.

use std::f64::consts::{E, PI};
use std::sync::Arc;

use crate::domain::{Domain, Point, VariableSpec};
use crate::error::{Error, Result};

use super::{Blackbox, ProblemSpec, RawOutcome};

type EvalFn = fn(&[usize], &[f64], &[f64]) -> (f64, Vec<f64>);

/// Which benchmark suite a registry entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Unconstrained,
    Constrained,
    /// Small problems used by tests and examples.
    Extra,
}

/// Registry metadata.
#[derive(Debug, Clone, Copy)]
pub struct ProblemInfo {
    pub name: &'static str,
    pub alias: &'static str,
    pub original: &'static str,
    pub suite: Suite,
    pub smooth: bool,
    /// (n_cat, |X^cat|, n_int, n_cont, n_constraints)
    pub dims: (usize, u64, usize, usize, usize),
}

struct Analytic {
    n_constraints: usize,
    eval: EvalFn,
}

impl Blackbox for Analytic {
    fn n_constraints(&self) -> usize {
        self.n_constraints
    }

    fn evaluate(&self, _domain: &Domain, p: &Point) -> RawOutcome {
        let k: Vec<f64> = p.int.iter().map(|&v| v as f64).collect();
        let (f, g) = (self.eval)(&p.cat, &k, &p.cont);
        RawOutcome::Ok { f, g }
    }
}

struct Entry {
    info: ProblemInfo,
    cats: &'static [usize],
    ints: &'static [(i64, i64)],
    conts: &'static [(f64, f64)],
    eval: EvalFn,
}

const fn info(
    name: &'static str,
    alias: &'static str,
    original: &'static str,
    suite: Suite,
    smooth: bool,
    dims: (usize, u64, usize, usize, usize),
) -> ProblemInfo {
    ProblemInfo {
        name,
        alias,
        original,
        suite,
        smooth,
        dims,
    }
}

use Suite::{Constrained, Extra, Unconstrained};

const A5: (f64, f64) = (-5.0, 5.0);
const R3: (i64, i64) = (-3, 3);

static REGISTRY: &[Entry] = &[
    Entry {
        info: info(
            "cat-ackley",
            "cat-1",
            "Ackley",
            Unconstrained,
            false,
            (2, 9, 2, 4, 0),
        ),
        cats: &[3, 3],
        ints: &[R3, R3],
        conts: &[A5, A5, A5, A5],
        eval: ackley_mixed,
    },
    Entry {
        info: info(
            "cat-beale",
            "cat-2",
            "Beale",
            Unconstrained,
            false,
            (2, 9, 2, 3, 0),
        ),
        cats: &[3, 3],
        ints: &[(-4, 4), (-4, 4)],
        conts: &[(-4.5, 4.5), (-4.5, 4.5), (-4.5, 4.5)],
        eval: beale_mixed,
    },
    Entry {
        info: info(
            "cat-branin",
            "cat-3",
            "Augmented Branin",
            Unconstrained,
            true,
            (2, 4, 2, 2, 0),
        ),
        cats: &[2, 2],
        ints: &[(0, 4), (0, 4)],
        conts: &[(-5.0, 10.0), (0.0, 15.0)],
        eval: branin_mixed,
    },
    Entry {
        info: info(
            "cat-bukin6",
            "cat-4",
            "Bukin-6",
            Unconstrained,
            false,
            (2, 4, 2, 4, 0),
        ),
        cats: &[2, 2],
        ints: &[R3, R3],
        conts: &[(-15.0, -5.0), (-3.0, 3.0), (-15.0, -5.0), (-3.0, 3.0)],
        eval: bukin6_mixed,
    },
    Entry {
        info: info(
            "cat-evd52",
            "cat-5",
            "EVD-52",
            Unconstrained,
            true,
            (1, 6, 1, 3, 0),
        ),
        cats: &[6],
        ints: &[R3],
        conts: &[(-3.0, 3.0), (-3.0, 3.0), (-3.0, 3.0)],
        eval: evd52_mixed,
    },
    Entry {
        info: info(
            "cat-goldstein",
            "cat-6",
            "Goldstein",
            Unconstrained,
            true,
            (2, 9, 0, 2, 0),
        ),
        cats: &[3, 3],
        ints: &[],
        conts: &[(-2.0, 2.0), (-2.0, 2.0)],
        eval: goldstein_mixed,
    },
    Entry {
        info: info(
            "cat-goldstein-price",
            "cat-7",
            "Goldstein-Price",
            Unconstrained,
            false,
            (3, 16, 3, 2, 0),
        ),
        cats: &[4, 2, 2],
        ints: &[(-2, 2), (-2, 2), (-2, 2)],
        conts: &[(-2.0, 2.0), (-2.0, 2.0)],
        eval: goldstein_price_mixed,
    },
    Entry {
        info: info(
            "cat-hs78",
            "cat-8",
            "HS78",
            Unconstrained,
            true,
            (1, 4, 1, 5, 0),
        ),
        cats: &[4],
        ints: &[(-2, 2)],
        conts: &[
            (-2.3, 2.3),
            (-2.3, 2.3),
            (-2.3, 2.3),
            (-2.3, 2.3),
            (-2.3, 2.3),
        ],
        eval: hs78_mixed,
    },
    Entry {
        info: info(
            "cat-rastrigin",
            "cat-9",
            "Rastrigin",
            Unconstrained,
            false,
            (2, 9, 2, 8, 0),
        ),
        cats: &[3, 3],
        ints: &[R3, R3],
        conts: &[(-5.12, 5.12); 8],
        eval: rastrigin_mixed,
    },
    Entry {
        info: info(
            "cat-rosenbrock",
            "cat-10",
            "Rosenbrock",
            Unconstrained,
            false,
            (2, 6, 2, 4, 0),
        ),
        cats: &[2, 3],
        ints: &[(-2, 3), (-2, 3)],
        conts: &[(-2.0, 2.0); 4],
        eval: rosenbrock_mixed,
    },
    Entry {
        info: info(
            "cat-rosen-suzuki",
            "cat-11",
            "Rosen-Suzuki",
            Unconstrained,
            true,
            (1, 4, 1, 4, 0),
        ),
        cats: &[4],
        ints: &[(-5, 5)],
        conts: &[(-10.0, 10.0); 4],
        eval: rosen_suzuki_mixed,
    },
    Entry {
        info: info(
            "cat-styblinski-tang",
            "cat-12",
            "Styblinski-Tang",
            Unconstrained,
            false,
            (1, 5, 5, 5, 0),
        ),
        cats: &[5],
        ints: &[R3; 5],
        conts: &[A5; 5],
        eval: styblinski_tang_mixed,
    },
    Entry {
        info: info(
            "cat-toy-4",
            "cat-13",
            "Toy",
            Unconstrained,
            true,
            (1, 10, 0, 4, 0),
        ),
        cats: &[10],
        ints: &[],
        conts: &[(0.0, 1.0); 4],
        eval: toy4_mixed,
    },
    Entry {
        info: info(
            "cat-toy-8",
            "cat-14",
            "Toy",
            Unconstrained,
            false,
            (1, 10, 0, 8, 0),
        ),
        cats: &[10],
        ints: &[],
        conts: &[(0.0, 1.0); 8],
        eval: toy8_mixed,
    },
    Entry {
        info: info(
            "cat-wong1",
            "cat-15",
            "Wong-1",
            Unconstrained,
            true,
            (1, 5, 3, 4, 0),
        ),
        cats: &[5],
        ints: &[(5, 15), (5, 15), (5, 15)],
        conts: &[(-3.0, 3.0), (-2.0, 2.0), A5, A5],
        eval: wong1_mixed,
    },
    Entry {
        info: info(
            "cat-zakharov",
            "cat-16",
            "Zakharov",
            Unconstrained,
            false,
            (2, 9, 2, 4, 0),
        ),
        cats: &[3, 3],
        ints: &[R3, R3],
        conts: &[A5; 4],
        eval: zakharov_mixed,
    },
    Entry {
        info: info(
            "cat-beale-c",
            "cat-17",
            "Beale",
            Constrained,
            false,
            (2, 9, 2, 3, 3),
        ),
        cats: &[3, 3],
        ints: &[(-4, 4), (-4, 4)],
        conts: &[(-4.5, 4.5), (-4.5, 4.5), (-4.5, 4.5)],
        eval: beale_constrained,
    },
    Entry {
        info: info(
            "cat-branin-c",
            "cat-18",
            "Augmented Branin",
            Constrained,
            true,
            (2, 4, 2, 2, 1),
        ),
        cats: &[2, 2],
        ints: &[(0, 4), (0, 4)],
        conts: &[(-5.0, 10.0), (0.0, 15.0)],
        eval: branin_constrained,
    },
    Entry {
        info: info(
            "cat-bukin6-c",
            "cat-19",
            "Bukin-6",
            Constrained,
            false,
            (2, 9, 2, 4, 2),
        ),
        cats: &[3, 3],
        ints: &[R3, R3],
        conts: &[(-15.0, -5.0), (-3.0, 3.0), (-15.0, -5.0), (-3.0, 3.0)],
        eval: bukin6_constrained,
    },
    Entry {
        info: info(
            "cat-dembo5",
            "cat-20",
            "Dembo-5",
            Constrained,
            true,
            (1, 4, 4, 4, 3),
        ),
        cats: &[4],
        ints: &[(10, 1000); 4],
        conts: &[
            (100.0, 10000.0),
            (1000.0, 10000.0),
            (1000.0, 10000.0),
            (10.0, 1000.0),
        ],
        eval: dembo5_mixed,
    },
    Entry {
        info: info(
            "cat-evd52-c",
            "cat-21",
            "EVD-52",
            Constrained,
            false,
            (1, 6, 1, 3, 1),
        ),
        cats: &[6],
        ints: &[R3],
        conts: &[(-3.0, 3.0), (-3.0, 3.0), (-3.0, 3.0)],
        eval: evd52_constrained,
    },
    Entry {
        info: info(
            "cat-g09",
            "cat-22",
            "G-09",
            Constrained,
            true,
            (2, 9, 2, 3, 4),
        ),
        cats: &[3, 3],
        ints: &[(-10, 10), (-10, 10)],
        conts: &[(-10.0, 10.0); 3],
        eval: g09_mixed,
    },
    Entry {
        info: info(
            "cat-goldstein-c",
            "cat-23",
            "Goldstein",
            Constrained,
            true,
            (2, 9, 0, 2, 1),
        ),
        cats: &[3, 3],
        ints: &[],
        conts: &[(-2.0, 2.0), (-2.0, 2.0)],
        eval: goldstein_constrained,
    },
    Entry {
        info: info(
            "cat-himmelblau",
            "cat-24",
            "Himmelblau",
            Constrained,
            true,
            (2, 25, 2, 2, 2),
        ),
        cats: &[5, 5],
        ints: &[(-5, 5), (-5, 5)],
        conts: &[A5, A5],
        eval: himmelblau_mixed,
    },
    Entry {
        info: info(
            "cat-hs114",
            "cat-25",
            "HS-114",
            Constrained,
            true,
            (2, 4, 3, 5, 4),
        ),
        cats: &[2, 2],
        ints: &[(1, 20), (1, 12), (1, 50)],
        conts: &[
            (85.0, 93.0),
            (90.0, 95.0),
            (3.0, 12.0),
            (1.2, 4.0),
            (145.0, 162.0),
        ],
        eval: hs114_mixed,
    },
    Entry {
        info: info(
            "cat-pentagon",
            "cat-26",
            "Pentagon",
            Constrained,
            true,
            (1, 3, 2, 4, 6),
        ),
        cats: &[3],
        ints: &[(-2, 2), (-2, 2)],
        conts: &[(-1.5, 1.5); 4],
        eval: pentagon_mixed,
    },
    Entry {
        info: info(
            "cat-pressure-vessel",
            "cat-27",
            "Pressure-Vessel",
            Constrained,
            true,
            (1, 8, 2, 2, 3),
        ),
        cats: &[8],
        ints: &[(1, 99), (1, 99)],
        conts: &[(10.0, 200.0), (10.0, 200.0)],
        eval: pressure_vessel_mixed,
    },
    Entry {
        info: info(
            "cat-rc-beam",
            "cat-28",
            "Reinforced-Concrete-Beam",
            Constrained,
            true,
            (2, 25, 1, 2, 2),
        ),
        cats: &[5, 5],
        ints: &[(28, 40)],
        conts: &[(5.0, 10.0), (0.0, 1.0)],
        eval: rc_beam_mixed,
    },
    Entry {
        info: info(
            "cat-rosenbrock-c",
            "cat-29",
            "Rosenbrock",
            Constrained,
            false,
            (2, 6, 2, 4, 1),
        ),
        cats: &[2, 3],
        ints: &[(-2, 3), (-2, 3)],
        conts: &[(-2.0, 2.0); 4],
        eval: rosenbrock_constrained,
    },
    Entry {
        info: info(
            "cat-styblinski-tang-c",
            "cat-30",
            "Styblinski-Tang",
            Constrained,
            false,
            (1, 5, 2, 2, 2),
        ),
        cats: &[5],
        ints: &[(-5, 5), (-5, 5)],
        conts: &[A5, A5],
        eval: styblinski_tang_constrained,
    },
    Entry {
        info: info(
            "cat-toy-c",
            "cat-31",
            "Toy",
            Constrained,
            true,
            (1, 10, 0, 4, 2),
        ),
        cats: &[10],
        ints: &[],
        conts: &[(0.0, 1.0); 4],
        eval: toy_constrained,
    },
    Entry {
        info: info(
            "cat-wong2",
            "cat-32",
            "Wong-2",
            Constrained,
            true,
            (1, 6, 4, 6, 3),
        ),
        cats: &[6],
        ints: &[(0, 15), (0, 10), (0, 15), (0, 15)],
        conts: &[
            (-10.0, 10.0),
            (-10.0, 10.0),
            (-10.0, 10.0),
            (-10.0, 10.0),
            (-10.0, 10.0),
            (0.0, 15.0),
        ],
        eval: wong2_mixed,
    },
    Entry {
        info: info("sphere", "sphere", "Sphere", Extra, true, (1, 3, 1, 2, 0)),
        cats: &[3],
        ints: &[(-5, 5)],
        conts: &[(-1.0, 1.0), (-1.0, 1.0)],
        eval: sphere_mixed,
    },
    Entry {
        info: info(
            "convex-2d",
            "convex-2d",
            "Convex quadratic",
            Extra,
            true,
            (0, 1, 0, 2, 0),
        ),
        cats: &[],
        ints: &[],
        conts: &[A5, A5],
        eval: convex_2d,
    },
];

/// Every registered problem.
pub fn registry() -> Vec<ProblemInfo> {
    REGISTRY.iter().map(|e| e.info).collect()
}

/// Registry names of one suite.
pub fn suite(s: Suite) -> Vec<&'static str> {
    REGISTRY
        .iter()
        .filter(|e| e.info.suite == s)
        .map(|e| e.info.name)
        .collect()
}

pub fn problem_info(name: &str) -> Option<ProblemInfo> {
    find(name).map(|e| e.info)
}

fn find(name: &str) -> Option<&'static Entry> {
    let key = name.to_ascii_lowercase();
    REGISTRY
        .iter()
        .find(|e| e.info.name == key || e.info.alias == key)
}

/// Builds a registered problem by name (or `cat-N` alias).
pub fn make_problem(name: &str) -> Result<ProblemSpec> {
    let e = find(name).ok_or_else(|| Error::UnknownProblem {
        name: name.to_string(),
        available: REGISTRY.iter().map(|e| e.info.name.to_string()).collect(),
    })?;
    let mut vars = Vec::new();
    for (i, &count) in e.cats.iter().enumerate() {
        vars.push(VariableSpec::Categorical {
            labels: (0..count).map(|c| format!("c{}_{c}", i + 1)).collect(),
        });
    }
    for &(lb, ub) in e.ints {
        vars.push(VariableSpec::Integer { lb, ub });
    }
    for &(lb, ub) in e.conts {
        vars.push(VariableSpec::Continuous { lb, ub });
    }
    let domain = Domain::new(vars)?;
    let bb = Analytic {
        n_constraints: e.info.dims.4,
        eval: e.eval,
    };
    Ok(ProblemSpec::new(e.info.name, domain, Arc::new(bb)))
}

// ---------------------------------------------------------------------------
// Base functions

pub fn ackley(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let sq = z.iter().map(|v| v * v).sum::<f64>() / n;
    let cs = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
}

pub fn beale(u: f64, v: f64) -> f64 {
    (1.5 - u + u * v).powi(2) + (2.25 - u + u * v * v).powi(2) + (2.625 - u + u * v.powi(3)).powi(2)
}

pub fn branin(u: f64, v: f64) -> f64 {
    let b = 5.1 / (4.0 * PI * PI);
    let c = 5.0 / PI;
    let t = 1.0 / (8.0 * PI);
    (v - b * u * u + c * u - 6.0).powi(2) + 10.0 * (1.0 - t) * u.cos() + 10.0
}

pub fn bukin6(u: f64, v: f64) -> f64 {
    100.0 * (v - 0.01 * u * u).abs().sqrt() + 0.01 * (u + 10.0).abs()
}

/// Minimax of six smooth pieces.
pub fn evd52(x: &[f64]) -> f64 {
    let (a, b, c) = (x[0], x[1], x[2]);
    [
        a * a + b * b + c * c - 1.0,
        a * a + b * b + (c - 2.0).powi(2),
        a + b + c - 1.0,
        a + b - c + 1.0,
        2.0 * a.powi(3) + 6.0 * b * b + 2.0 * (5.0 * c - a + 1.0).powi(2),
        a * a - 9.0 * c,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max)
}

pub fn goldstein_price(u: f64, v: f64) -> f64 {
    let a = 1.0
        + (u + v + 1.0).powi(2)
            * (19.0 - 14.0 * u + 3.0 * u * u - 14.0 * v + 6.0 * u * v + 3.0 * v * v);
    let b = 30.0
        + (2.0 * u - 3.0 * v).powi(2)
            * (18.0 - 32.0 * u + 12.0 * u * u + 48.0 * v - 36.0 * u * v + 27.0 * v * v);
    a * b
}

pub fn rastrigin(z: &[f64], amplitude: f64) -> f64 {
    amplitude * z.len() as f64
        + z.iter()
            .map(|v| v * v - amplitude * (2.0 * PI * v).cos())
            .sum::<f64>()
}

pub fn rosenbrock(z: &[f64], coupling: f64) -> f64 {
    z.windows(2)
        .map(|w| coupling * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

pub fn styblinski_tang1(v: f64) -> f64 {
    0.5 * (v.powi(4) - 16.0 * v * v + 5.0 * v)
}

pub fn zakharov(z: &[f64], abs_terms: bool) -> f64 {
    let s1: f64 = z
        .iter()
        .map(|v| if abs_terms { v.abs() } else { v * v })
        .sum();
    let s2: f64 = z
        .iter()
        .enumerate()
        .map(|(i, v)| 0.5 * (i + 1) as f64 * v)
        .sum();
    s1 + s2 * s2 + s2.powi(4)
}

pub fn himmelblau(u: f64, v: f64) -> f64 {
    (u * u + v - 11.0).powi(2) + (u + v * v - 7.0).powi(2)
}

/// Seven-variable polynomial shared by Wong-1 and G-09.
pub fn hs100(x: &[f64; 7], c6: f64) -> f64 {
    (x[0] - 10.0).powi(2)
        + 5.0 * (x[1] - 12.0).powi(2)
        + x[2].powi(4)
        + 3.0 * (x[3] - 11.0).powi(2)
        + 10.0 * x[4].powi(6)
        + c6 * x[5] * x[5]
        + x[6].powi(4)
        - 4.0 * x[5] * x[6]
        - 10.0 * x[5]
        - 8.0 * x[6]
}

// ---------------------------------------------------------------------------
// Unconstrained suite

const ACKLEY_OFFSET: [[f64; 3]; 3] = [[0.8, 0.4, 1.0], [0.6, 0.0, 0.9], [1.2, 0.7, 0.3]];

fn ackley_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let s = [0.0, 1.0, -1.0][c[0]];
    let t = [0.0, 1.0, -1.0][c[1]];
    let mut z = vec![k[0] - t, k[1] - t];
    z.extend(x.iter().map(|v| v - s));
    (ackley(&z) + ACKLEY_OFFSET[c[0]][c[1]], vec![])
}

const BEALE_OFFSET: [[f64; 3]; 3] = [[0.5, 0.2, 0.9], [0.0, 0.6, 0.3], [0.7, 0.4, 1.1]];

fn beale_objective(c: &[usize], k: &[f64], x: &[f64]) -> f64 {
    let s = [0.0, 0.5, -0.5][c[0]];
    let target = [2.0, 0.0, -2.0][c[1]];
    beale(x[0] + s, x[1])
        + beale(x[2], 0.5 * k[1])
        + 0.25 * (k[0] - target).powi(2)
        + BEALE_OFFSET[c[0]][c[1]]
}

fn beale_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    (beale_objective(c, k, x), vec![])
}

fn branin_objective(c: &[usize], k: &[f64], x: &[f64]) -> f64 {
    let base = match c[0] {
        0 => branin(x[0], x[1]),
        // mirrored case: the valley pattern reflected in the second argument
        _ => branin(x[0], 15.0 - x[1]) + 0.05 * (x[0] - 2.5).powi(2),
    };
    let w = [1.0, 0.25][c[1]];
    let offset = [[0.0, 0.3], [0.15, 0.45]][c[0]][c[1]];
    base + w * (k[0] - 2.0).powi(2) + 0.5 * (k[1] - 1.0 - 2.0 * c[1] as f64).powi(2) + offset
}

fn branin_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    (branin_objective(c, k, x), vec![])
}

fn bukin6_objective(c: &[usize], k: &[f64], x: &[f64]) -> f64 {
    const SCALE: [f64; 3] = [1.0, 0.5, 2.0];
    const SHIFT: [f64; 3] = [0.0, 1.0, -1.0];
    const OFFSET: [[f64; 3]; 3] = [[0.2, 0.0, 0.35], [0.1, 0.3, 0.25], [0.4, 0.15, 0.5]];
    bukin6(x[0], x[1] * SCALE[c[0]])
        + bukin6(x[2], x[3] - SHIFT[c[1]])
        + (k[0] - c[0] as f64).abs()
        + 0.5 * (k[1] + c[1] as f64).abs()
        + OFFSET[c[0]][c[1]]
}

fn bukin6_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    (bukin6_objective(c, k, x), vec![])
}

fn evd52_objective(c: &[usize], k: &[f64], x: &[f64]) -> f64 {
    const A: [f64; 6] = [0.0, 0.5, -0.5, 1.0, -1.0, 0.25];
    const B: [f64; 6] = [0.0, -0.5, 0.5, 0.25, 0.0, -0.25];
    const SC: [f64; 6] = [1.0, 1.2, 0.8, 1.1, 0.9, 1.0];
    const T: [f64; 6] = [0.0, 1.0, -1.0, 2.0, -2.0, 0.0];
    const O: [f64; 6] = [0.5, 0.0, 0.8, 0.3, 0.6, 0.2];
    let i = c[0];
    SC[i] * evd52(&[x[0] - A[i], x[1], x[2] - B[i]]) + 0.5 * (k[0] - T[i]).powi(2) + O[i]
}

fn evd52_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    (evd52_objective(c, k, x), vec![])
}

const GOLD_SHIFT1: [f64; 3] = [0.0, 0.5, -0.5];
const GOLD_SHIFT2: [f64; 3] = [0.0, 0.5, 1.0];

fn goldstein_objective(c: &[usize], x: &[f64]) -> f64 {
    const SCALE: [f64; 3] = [1.0, 0.5, 2.0];
    const OFFSET: [[f64; 3]; 3] = [[0.3, 0.0, 0.5], [0.2, 0.4, 0.1], [0.6, 0.25, 0.35]];
    let u = (x[0] - GOLD_SHIFT1[c[0]]) * SCALE[c[0]];
    let v = x[1] + GOLD_SHIFT2[c[1]];
    (goldstein_price(u, v).ln() - 8.693) / 2.427 + OFFSET[c[0]][c[1]]
}

fn goldstein_mixed(c: &[usize], _k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    (goldstein_objective(c, x), vec![])
}

fn goldstein_price_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let theta = c[0] as f64 * PI / 8.0;
    let (s, co) = theta.sin_cos();
    let u = co * x[0] - s * x[1];
    let v = s * x[0] + co * x[1];
    let (c1, c2) = (c[1] as f64, c[2] as f64);
    let targets = [c1, -c2, c1 - c2];
    let ints: f64 = k.iter().zip(targets).map(|(a, t)| (a - t).powi(2)).sum();
    let offset = [0.5, 0.0, 1.0, 1.5][c[0]] + 2.0 * c2 + c1 * (1.0 - c2);
    (goldstein_price(u, v) + 10.0 * ints + offset, vec![])
}

fn hs78_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    const SHIFT: [[f64; 5]; 4] = [
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [0.3, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.3, 0.0, -0.3, 0.0],
        [0.0, 0.0, 0.3, 0.0, 0.3],
    ];
    const T: [f64; 4] = [0.0, 1.0, -1.0, 2.0];
    const O: [f64; 4] = [0.4, 0.0, 0.7, 0.2];
    let i = c[0];
    let y: Vec<f64> = x.iter().zip(SHIFT[i]).map(|(a, s)| a - s).collect();
    let prod: f64 = y.iter().product();
    let e1 = y.iter().map(|v| v * v).sum::<f64>() - 10.0;
    let e2 = y[1] * y[2] - 5.0 * y[3] * y[4];
    let e3 = y[0].powi(3) + y[1].powi(3) + 1.0;
    let f = prod + 10.0 * (e1 * e1 + e2 * e2 + e3 * e3) + 0.5 * (k[0] - T[i]).powi(2) + O[i];
    (f, vec![])
}

fn rastrigin_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    const O: [[f64; 3]; 3] = [[0.5, 1.0, 0.0], [0.7, 0.3, 0.9], [1.2, 0.4, 0.8]];
    let t = [0.0, 1.0, -1.0][c[0]];
    let amplitude = [10.0, 7.0, 4.0][c[0]];
    let s = [0.0, 0.5, -0.5][c[1]];
    let mut z = vec![k[0] - t, k[1] - t];
    z.extend(x.iter().map(|v| v - s));
    (rastrigin(&z, amplitude) + O[c[0]][c[1]], vec![])
}

fn rosenbrock_objective(c: &[usize], k: &[f64], x: &[f64]) -> f64 {
    const O: [[f64; 3]; 2] = [[0.3, 0.0, 0.6], [0.1, 0.5, 0.2]];
    let s = [0.0, 0.5][c[0]];
    let b = [100.0, 50.0, 10.0][c[1]];
    let mut z: Vec<f64> = x.iter().map(|v| v - s).collect();
    z.extend_from_slice(k);
    rosenbrock(&z, b) + O[c[0]][c[1]]
}

fn rosenbrock_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    (rosenbrock_objective(c, k, x), vec![])
}

fn rosen_suzuki_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    const SHIFT: [[f64; 4]; 4] = [
        [0.0, 0.0, 0.0, 0.0],
        [1.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, -1.0, 1.0],
        [-1.0, 0.0, 1.0, 0.0],
    ];
    const T: [f64; 4] = [0.0, 2.0, -2.0, 1.0];
    const O: [f64; 4] = [5.0, 0.0, 3.0, 8.0];
    let i = c[0];
    let y: Vec<f64> = x.iter().zip(SHIFT[i]).map(|(a, s)| a - s).collect();
    let rs = y[0] * y[0] + y[1] * y[1] + 2.0 * y[2] * y[2] + y[3] * y[3]
        - 5.0 * y[0]
        - 5.0 * y[1]
        - 21.0 * y[2]
        + 7.0 * y[3];
    (rs + (k[0] - T[i]).powi(2) + O[i], vec![])
}

fn styblinski_tang_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    const S: [f64; 5] = [0.0, 0.5, -0.5, 1.0, -1.0];
    const W: [f64; 5] = [1.0, 0.9, 1.1, 0.95, 1.05];
    const O: [f64; 5] = [0.0, 2.0, 5.0, 1.0, 3.0];
    let i = c[0];
    let ints: f64 = k.iter().map(|&v| styblinski_tang1(v)).sum();
    let conts: f64 = x.iter().map(|&v| styblinski_tang1(v - S[i])).sum();
    (ints + W[i] * conts + O[i], vec![])
}

fn toy_coeffs(c: usize, i: usize) -> (f64, f64) {
    let a = 1.0 + ((c + 2 * i) % 4) as f64;
    let b = (((3 * c + 7 * i) % 10) as f64 + 0.5) / 10.0;
    (a, b)
}

fn toy_offset(c: usize) -> f64 {
    ((7 * c) % 10) as f64 / 10.0
}

fn toy4_objective(c: &[usize], x: &[f64]) -> f64 {
    let i = c[0];
    let mut f = toy_offset(i);
    for (j, &v) in x.iter().enumerate() {
        let (a, b) = toy_coeffs(i, j);
        f += a * (v - b).powi(2);
    }
    let (_, b0) = toy_coeffs(i, 0);
    let (_, b1) = toy_coeffs(i, 1);
    let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    f + sign * 0.5 * (x[0] - b0) * (x[1] - b1)
}

fn toy4_mixed(c: &[usize], _k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    (toy4_objective(c, x), vec![])
}

fn toy8_mixed(c: &[usize], _k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let i = c[0];
    let mut f = toy_offset(i);
    for (j, &v) in x.iter().enumerate() {
        let (a, b) = toy_coeffs(i, j);
        f += a * (v - b).abs();
    }
    (f, vec![])
}

fn wong1_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    const D: [[f64; 3]; 5] = [
        [0.0, 0.0, 0.0],
        [1.0, -1.0, 0.0],
        [-1.0, 1.0, 1.0],
        [2.0, 0.0, -1.0],
        [0.0, 2.0, 1.0],
    ];
    const C6: [f64; 5] = [7.0, 6.0, 8.0, 5.0, 9.0];
    const O: [f64; 5] = [0.0, 1.5, 0.5, 2.0, 1.0];
    let i = c[0];
    let v = [
        k[0] - D[i][0],
        k[1] - D[i][1],
        x[0],
        k[2] - D[i][2],
        x[1],
        x[2],
        x[3],
    ];
    (hs100(&v, C6[i]) + O[i], vec![])
}

fn zakharov_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    const O: [[f64; 3]; 3] = [[0.4, 0.2, 0.7], [0.0, 0.5, 0.3], [0.6, 0.1, 0.8]];
    let t = [0.0, 1.0, -1.0];
    let s = [0.0, 0.5, -0.5][c[0]];
    let mut z = vec![k[0] - t[c[0]], k[1] - t[c[1]]];
    z.extend(x.iter().map(|v| v - s));
    (zakharov(&z, c[1] == 2) + O[c[0]][c[1]], vec![])
}

// ---------------------------------------------------------------------------
// Constrained suite

fn beale_constrained(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let f = beale_objective(c, k, x);
    let g = vec![
        x[0] + x[1] - 2.5,
        0.5 * (k[0] + k[1]) - 1.0,
        x[2] * x[2] - 4.0 - x[1] * x[1],
    ];
    (f, g)
}

fn branin_constrained(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let f = branin_objective(c, k, x);
    let u = (x[0] + 5.0) / 15.0;
    let v = x[1] / 15.0;
    (f, vec![0.2 - u * v])
}

fn bukin6_constrained(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let f = bukin6_objective(c, k, x);
    (f, vec![x[0] + x[2] + 21.0, k[0] + k[1] - x[1]])
}

fn dembo5_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    const W: [[f64; 3]; 4] = [
        [1.0, 1.0, 1.0],
        [1.2, 0.9, 1.0],
        [0.9, 1.1, 1.05],
        [1.0, 1.0, 0.85],
    ];
    let w = W[c[0]];
    let (x1, x2, x3, x8) = (x[0], x[1], x[2], x[3]);
    let (x4, x5, x6, x7) = (k[0], k[1], k[2], k[3]);
    let f = w[0] * x1 + w[1] * x2 + w[2] * x3;
    let g = vec![
        (-x1 * x6 + 833.332_52 * x4 + 100.0 * x1 - 83_333.333) / 1e5,
        (-x2 * x7 + 1250.0 * x5 + x2 * x4 - 1250.0 * x4) / 1e5,
        (-x3 * x8 + 1_250_000.0 + x3 * x5 - 2500.0 * x5) / 1e6,
    ];
    (f, g)
}

fn evd52_constrained(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    (evd52_objective(c, k, x), vec![x[0] + x[1] + x[2] + 0.5])
}

fn g09_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let x6 = [0.5, 1.0, 1.5][c[0]];
    let x7 = [1.0, 1.5, 2.0][c[1]];
    let v = [k[0], x[0], x[1], k[1], x[2], x6, x7];
    let f = hs100(&v, 7.0);
    let g = vec![
        -127.0 + 2.0 * v[0] * v[0] + 3.0 * v[1].powi(4) + v[2] + 4.0 * v[3] * v[3] + 5.0 * v[4],
        -282.0 + 7.0 * v[0] + 3.0 * v[1] + 10.0 * v[2] * v[2] + v[3] - v[4],
        -196.0 + 23.0 * v[0] + v[1] * v[1] + 6.0 * v[5] * v[5] - 8.0 * v[6],
        4.0 * v[0] * v[0] + v[1] * v[1] - 3.0 * v[0] * v[1] + 2.0 * v[2] * v[2] + 5.0 * v[5]
            - 11.0 * v[6],
    ];
    (f, g)
}

fn goldstein_constrained(c: &[usize], _k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let f = goldstein_objective(c, x);
    let du = x[0] - GOLD_SHIFT1[c[0]];
    let dv = x[1] + 1.0 + GOLD_SHIFT2[c[1]];
    (f, vec![0.25 - du * du - dv * dv])
}

fn himmelblau_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    const SHIFT: [f64; 5] = [0.0, 0.5, -0.5, 1.0, -1.0];
    let u = x[0] + SHIFT[c[0]];
    let v = x[1] + SHIFT[c[1]];
    let offset = 0.1 * ((3 * c[0] + 2 * c[1]) % 5) as f64;
    let f = himmelblau(u, v) + 0.1 * himmelblau(k[0], k[1]) + offset;
    let g = vec![
        (u - 0.05).powi(2) + (v - 2.5).powi(2) - 4.84,
        4.84 - u * u - (v - 2.5).powi(2),
    ];
    (f, g)
}

fn hs114_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let acid_cost = [10.0, 13.0][c[0]];
    let yield_gain = [0.13167, 0.145][c[0]];
    let price = [0.063, 0.07][c[1]];
    let x1 = 100.0 * k[0];
    let x3 = 10.0 * k[1];
    let x4 = 100.0 * k[2];
    let (x6, x7, x8, x9, x10) = (x[0], x[1], x[2], x[3], x[4]);
    let x5 = (1.22 * x4 - x1).max(0.0);
    let x2 = (x1 * x8 - x5).max(0.0);
    let f = 5.04 * x1 + 0.035 * x2 + acid_cost * x3 + 3.36 * x5 - price * x4 * x7;
    let strength = 98_000.0 * x3 / (x4 * x9 + 1000.0 * x3);
    let g = vec![
        (x6 - strength).abs() - 1.0,
        x7 / 0.99 - (57.425 + 1.098 * x8 - 0.038 * x8 * x8 + 0.325 * x6),
        133.0 - 3.0 * x7 + 0.99 * x10,
        (x4 / 0.99 - (1.12 * x1 + yield_gain * x1 * x8 - 0.006_67 * x1 * x8 * x8)) / 100.0,
    ];
    (f, g)
}

fn pentagon_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let rot = [0.0, PI / 10.0, PI / 5.0][c[0]];
    let p1 = (0.5 * k[0], 0.5 * k[1]);
    let p2 = (x[0], x[1]);
    let p3 = (x[2], x[3]);
    let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    let f = -dist(p1, p2) - dist(p2, p3) - dist(p3, p1);
    let face = |p: (f64, f64), j: usize| {
        let phi = 2.0 * PI * j as f64 / 5.0 + rot;
        p.0 * phi.cos() + p.1 * phi.sin() - 1.0
    };
    let mut g = Vec::with_capacity(6);
    for p in [p2, p3] {
        g.push(face(p, 0));
        g.push(face(p, 1));
        g.push(face(p, 2).max(face(p, 3)).max(face(p, 4)));
    }
    (f, g)
}

fn pressure_vessel_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    const COST: [f64; 8] = [1.0, 1.15, 0.9, 1.3, 1.05, 0.95, 1.2, 1.1];
    const STRENGTH: [f64; 8] = [1.0, 1.25, 0.85, 1.5, 1.1, 0.9, 1.35, 1.2];
    let i = c[0];
    let ts = 0.0625 * k[0];
    let th = 0.0625 * k[1];
    let (r, l) = (x[0], x[1]);
    let f = COST[i]
        * (0.6224 * ts * r * l + 1.7781 * th * r * r + 3.1661 * ts * ts * l + 19.84 * ts * ts * r);
    let g = vec![
        -ts + 0.0193 * r / STRENGTH[i],
        -th + 0.00954 * r / STRENGTH[i],
        (-PI * r * r * l - 4.0 / 3.0 * PI * r.powi(3) + 1_296_000.0) / 1e6,
    ];
    (f, g)
}

fn rc_beam_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    const AREA: [f64; 5] = [6.0, 6.16, 6.32, 6.6, 7.0];
    const GRADE_COST: [f64; 5] = [0.6, 0.65, 0.7, 0.75, 0.8];
    const GRADE_STRENGTH: [f64; 5] = [1.0, 1.1, 1.2, 1.3, 1.4];
    let a = AREA[c[0]];
    let b = k[0];
    let (h, d) = (x[0], x[1]);
    let f = 29.4 * a + GRADE_COST[c[1]] * b * h + 5.0 * d;
    let g = vec![
        b / h - 4.0,
        180.0 + 7.375 * a * a / (h * (0.9 + 0.1 * d)) - a * b * GRADE_STRENGTH[c[1]],
    ];
    (f, g)
}

fn rosenbrock_constrained(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let f = rosenbrock_objective(c, k, x);
    (f, vec![x.iter().map(|v| v * v).sum::<f64>() - 3.0])
}

fn styblinski_tang_constrained(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    const S: [f64; 5] = [0.0, 0.5, -0.5, 1.0, -1.0];
    const W: [f64; 5] = [1.0, 0.9, 1.1, 0.95, 1.05];
    const O: [f64; 5] = [0.0, 2.0, 5.0, 1.0, 3.0];
    let i = c[0];
    let f = styblinski_tang1(k[0])
        + styblinski_tang1(k[1])
        + W[i] * (styblinski_tang1(x[0] - S[i]) + styblinski_tang1(x[1] - S[i]))
        + O[i];
    (f, vec![-(x[0] + x[1]) - 4.0, -(k[0] + k[1]) - 5.0])
}

fn toy_constrained(c: &[usize], _k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let f = toy4_objective(c, x);
    (f, vec![x.iter().sum::<f64>() - 1.2, 0.4 - x[0] - x[1]])
}

fn wong2_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    const RHO: [f64; 6] = [4.0, 3.0, 5.0, 2.5, 6.0, 3.5];
    const O: [f64; 6] = [0.0, 1.0, 0.5, 2.0, 1.5, 0.25];
    let i = c[0];
    let (x1, x2, x5, x6, x7, x10) = (x[0], x[1], x[2], x[3], x[4], x[5]);
    let (x3, x4, x8, x9) = (k[0], k[1], k[2], k[3]);
    let f = x1 * x1 + x2 * x2 + x1 * x2 - 14.0 * x1 - 16.0 * x2
        + (x3 - 10.0).powi(2)
        + RHO[i] * (x4 - 5.0).powi(2)
        + (x5 - 3.0).powi(2)
        + 2.0 * (x6 - 1.0).powi(2)
        + 5.0 * x7 * x7
        + 7.0 * (x8 - 11.0).powi(2)
        + 2.0 * (x9 - 10.0).powi(2)
        + (x10 - 7.0).powi(2)
        + 45.0
        + O[i];
    let g = vec![
        -105.0 + 4.0 * x1 + 5.0 * x2 - 3.0 * x7 + 9.0 * x8,
        10.0 * x1 - 8.0 * x2 - 17.0 * x7 + 2.0 * x8,
        -8.0 * x1 + 2.0 * x2 + 5.0 * x9 - 2.0 * x10 - 12.0,
    ];
    (f, g)
}

// ---------------------------------------------------------------------------
// Extras

fn sphere_mixed(c: &[usize], k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let cat = if c[0] == 0 { 0.0 } else { 0.5 * c[0] as f64 };
    (
        cat + k[0] * k[0] + x.iter().map(|v| v * v).sum::<f64>(),
        vec![],
    )
}

fn convex_2d(_c: &[usize], _k: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let f = (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2) + 0.5 * x[0] * x[1];
    (f, vec![])
}
