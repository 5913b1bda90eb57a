//! Mixed-variable search space.
//!
//! A point is split into three components: categorical (category indices),
//! integer and continuous. The integer and continuous components together
//! form the quantitative part; quantitative coordinates are ordered integer
//! first, then continuous, each in declaration order.
//!
//! Continuous coordinates produced by the solver live on a fixed decimal
//! lattice (`10^quantum_exponent`) so that mesh arithmetic can be carried out
//! in exact integer "quanta" and cached points compare bitwise.

use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finest continuous lattice spacing, as a power of ten.
pub const CONT_QUANTUM_EXP: i32 = -9;

/// Largest quanta magnitude kept exactly representable as an `f64`.
const MAX_EXACT_QUANTA: f64 = 4.0e15;

/// One declared variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VariableSpec {
    Categorical { labels: Vec<String> },
    Integer { lb: i64, ub: i64 },
    Continuous { lb: f64, ub: f64 },
}

/// Kind of a quantitative coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QntKind {
    Integer,
    Continuous,
}

/// Ordered variable declarations with derived component maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    variables: Vec<VariableSpec>,
    cat_vars: Vec<usize>,
    int_vars: Vec<usize>,
    cont_vars: Vec<usize>,
    cat_cardinality: u64,
    onehot_offsets: Vec<usize>,
    quantum_exp: Vec<i32>,
}

impl Domain {
    pub fn new(variables: Vec<VariableSpec>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::Domain("at least one variable is required".into()));
        }
        let mut cat_vars = Vec::new();
        let mut int_vars = Vec::new();
        let mut cont_vars = Vec::new();
        let mut cat_cardinality: u64 = 1;
        let mut onehot_offsets = Vec::new();
        let mut onehot_len = 0usize;
        let mut cont_exp = Vec::new();
        for (i, v) in variables.iter().enumerate() {
            match v {
                VariableSpec::Categorical { labels } => {
                    if labels.len() < 2 {
                        return Err(Error::Domain(format!(
                            "categorical variable {i} needs at least two categories"
                        )));
                    }
                    for (a, la) in labels.iter().enumerate() {
                        if labels[..a].contains(la) {
                            return Err(Error::Domain(format!(
                                "categorical variable {i} has duplicate label `{la}`"
                            )));
                        }
                    }
                    cat_cardinality = cat_cardinality
                        .checked_mul(labels.len() as u64)
                        .ok_or_else(|| Error::Domain("categorical cardinality overflows".into()))?;
                    onehot_offsets.push(onehot_len);
                    onehot_len += labels.len();
                    cat_vars.push(i);
                }
                VariableSpec::Integer { lb, ub } => {
                    if lb > ub {
                        return Err(Error::Domain(format!("integer variable {i}: lb > ub")));
                    }
                    int_vars.push(i);
                }
                VariableSpec::Continuous { lb, ub } => {
                    if !lb.is_finite() || !ub.is_finite() {
                        return Err(Error::Domain(format!(
                            "continuous variable {i}: bounds must be finite"
                        )));
                    }
                    if lb > ub {
                        return Err(Error::Domain(format!("continuous variable {i}: lb > ub")));
                    }
                    let magnitude = lb.abs().max(ub.abs()).max(1.0);
                    let mut exp = CONT_QUANTUM_EXP;
                    while magnitude / 10f64.powi(exp) > MAX_EXACT_QUANTA {
                        exp += 1;
                    }
                    cont_exp.push(exp);
                    cont_vars.push(i);
                }
            }
        }
        onehot_offsets.push(onehot_len);
        let mut quantum_exp = vec![0; int_vars.len()];
        quantum_exp.extend(cont_exp);
        Ok(Self {
            variables,
            cat_vars,
            int_vars,
            cont_vars,
            cat_cardinality,
            onehot_offsets,
            quantum_exp,
        })
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn n(&self) -> usize {
        self.variables.len()
    }

    pub fn n_cat(&self) -> usize {
        self.cat_vars.len()
    }

    pub fn n_int(&self) -> usize {
        self.int_vars.len()
    }

    pub fn n_cont(&self) -> usize {
        self.cont_vars.len()
    }

    pub fn n_qnt(&self) -> usize {
        self.int_vars.len() + self.cont_vars.len()
    }

    /// |X^cat|, the number of distinct categorical components.
    pub fn cat_cardinality(&self) -> u64 {
        self.cat_cardinality
    }

    /// Number of categories ℓ_i of the i-th categorical variable.
    pub fn n_categories(&self, cat: usize) -> usize {
        self.onehot_offsets[cat + 1] - self.onehot_offsets[cat]
    }

    pub fn category_counts(&self) -> Vec<usize> {
        (0..self.n_cat()).map(|i| self.n_categories(i)).collect()
    }

    /// Position of the first one-hot bit of the i-th categorical variable.
    pub fn onehot_offset(&self, cat: usize) -> usize {
        self.onehot_offsets[cat]
    }

    pub fn onehot_len(&self) -> usize {
        *self.onehot_offsets.last().unwrap_or(&0)
    }

    pub fn labels(&self, cat: usize) -> &[String] {
        match &self.variables[self.cat_vars[cat]] {
            VariableSpec::Categorical { labels } => labels,
            _ => unreachable!("cat index maps to a categorical variable"),
        }
    }

    pub fn int_bounds(&self, i: usize) -> (i64, i64) {
        match self.variables[self.int_vars[i]] {
            VariableSpec::Integer { lb, ub } => (lb, ub),
            _ => unreachable!("int index maps to an integer variable"),
        }
    }

    pub fn cont_bounds(&self, i: usize) -> (f64, f64) {
        match self.variables[self.cont_vars[i]] {
            VariableSpec::Continuous { lb, ub } => (lb, ub),
            _ => unreachable!("cont index maps to a continuous variable"),
        }
    }

    /// Declared index of the i-th categorical / integer / continuous variable.
    pub fn declared_index(&self, component: Component, i: usize) -> usize {
        match component {
            Component::Categorical => self.cat_vars[i],
            Component::Integer => self.int_vars[i],
            Component::Continuous => self.cont_vars[i],
        }
    }

    pub fn qnt_kind(&self, q: usize) -> QntKind {
        if q < self.n_int() {
            QntKind::Integer
        } else {
            QntKind::Continuous
        }
    }

    /// Lattice exponent of quantitative coordinate `q` (0 for integers).
    pub fn quantum_exponent(&self, q: usize) -> i32 {
        self.quantum_exp[q]
    }

    /// Quantitative bounds expressed in quanta, inclusive and inside the
    /// declared real bounds.
    pub fn qnt_bounds_quanta(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(self.n_qnt());
        for i in 0..self.n_int() {
            out.push(self.int_bounds(i));
        }
        for i in 0..self.n_cont() {
            let (lb, ub) = self.cont_bounds(i);
            let e = self.quantum_exp[self.n_int() + i];
            let mut ql = quanta_of(lb, e);
            if real_of(ql, e) < lb {
                ql += 1;
            }
            let mut qu = quanta_of(ub, e);
            if real_of(qu, e) > ub {
                qu -= 1;
            }
            out.push((ql, qu.max(ql)));
        }
        out
    }

    /// Lower/upper real bounds of each quantitative coordinate.
    pub fn qnt_bounds(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.n_qnt());
        for i in 0..self.n_int() {
            let (l, u) = self.int_bounds(i);
            out.push((l as f64, u as f64));
        }
        for i in 0..self.n_cont() {
            out.push(self.cont_bounds(i));
        }
        out
    }

    /// Quantitative component of `p` in quanta.
    pub fn to_quanta(&self, p: &Point) -> Vec<i64> {
        let mut q = Vec::with_capacity(self.n_qnt());
        q.extend_from_slice(&p.int);
        for (i, &x) in p.cont.iter().enumerate() {
            q.push(quanta_of(x, self.quantum_exp[self.n_int() + i]));
        }
        q
    }

    /// Rebuilds a point from a categorical component and quanta.
    pub fn from_quanta(&self, cat: Vec<usize>, q: &[i64]) -> Point {
        let n_int = self.n_int();
        let int = q[..n_int].to_vec();
        let cont = q[n_int..]
            .iter()
            .enumerate()
            .map(|(i, &v)| real_of(v, self.quantum_exp[n_int + i]))
            .collect();
        Point { cat, int, cont }
    }

    /// Snaps continuous coordinates onto the lattice.
    pub fn snap(&self, p: &Point) -> Point {
        let q = self.to_quanta(p);
        self.from_quanta(p.cat.clone(), &q)
    }

    /// Checks `p` against declared bounds and categories.
    ///
    /// A component length mismatch is a structural error; bound and category
    /// violations are collected in the report.
    pub fn validate(&self, p: &Point) -> Result<ValidationReport> {
        if p.cat.len() != self.n_cat()
            || p.int.len() != self.n_int()
            || p.cont.len() != self.n_cont()
        {
            return Err(Error::Structure(format!(
                "expected (cat, int, cont) lengths ({}, {}, {}), got ({}, {}, {})",
                self.n_cat(),
                self.n_int(),
                self.n_cont(),
                p.cat.len(),
                p.int.len(),
                p.cont.len()
            )));
        }
        let mut violations = Vec::new();
        for (i, &c) in p.cat.iter().enumerate() {
            let count = self.n_categories(i);
            if c >= count {
                violations.push(Violation {
                    variable: self.cat_vars[i],
                    kind: ViolationKind::UnknownCategory { index: c, count },
                });
            }
        }
        for (i, &v) in p.int.iter().enumerate() {
            let (lb, ub) = self.int_bounds(i);
            if v < lb {
                violations.push(Violation {
                    variable: self.int_vars[i],
                    kind: ViolationKind::BelowLower,
                });
            } else if v > ub {
                violations.push(Violation {
                    variable: self.int_vars[i],
                    kind: ViolationKind::AboveUpper,
                });
            }
        }
        for (i, &v) in p.cont.iter().enumerate() {
            let (lb, ub) = self.cont_bounds(i);
            let kind = if !v.is_finite() {
                Some(ViolationKind::NotFinite)
            } else if v < lb {
                Some(ViolationKind::BelowLower)
            } else if v > ub {
                Some(ViolationKind::AboveUpper)
            } else {
                None
            };
            if let Some(kind) = kind {
                violations.push(Violation {
                    variable: self.cont_vars[i],
                    kind,
                });
            }
        }
        Ok(ValidationReport { violations })
    }

    /// One-hot encoding of a categorical component.
    pub fn onehot(&self, cat: &[usize]) -> Result<Vec<u8>> {
        if cat.len() != self.n_cat() {
            return Err(Error::Structure(format!(
                "expected {} categorical entries, got {}",
                self.n_cat(),
                cat.len()
            )));
        }
        let mut out = vec![0u8; self.onehot_len()];
        for (i, &c) in cat.iter().enumerate() {
            let count = self.n_categories(i);
            if c >= count {
                return Err(Error::CategoryIndex {
                    variable: self.cat_vars[i],
                    index: c,
                    count,
                });
            }
            out[self.onehot_offsets[i] + c] = 1;
        }
        Ok(out)
    }

    /// Inverse of [`Domain::onehot`]: argmax per block.
    pub fn decode_onehot(&self, bits: &[u8]) -> Result<Vec<usize>> {
        if bits.len() != self.onehot_len() {
            return Err(Error::Structure("one-hot length mismatch".into()));
        }
        Ok((0..self.n_cat())
            .map(|i| {
                let block = &bits[self.onehot_offsets[i]..self.onehot_offsets[i + 1]];
                block
                    .iter()
                    .enumerate()
                    .max_by_key(|(k, b)| (**b, std::cmp::Reverse(*k)))
                    .map(|(k, _)| k)
                    .unwrap_or(0)
            })
            .collect())
    }

    /// Enumerates X^cat in lexicographic order of index tuples.
    pub fn cat_components(&self) -> CatComponents {
        CatComponents {
            counts: self.category_counts(),
            next: Some(vec![0; self.n_cat()]),
        }
    }

    /// JSON wire form `{"cat":[labels],"int":[...],"cont":[...]}`.
    pub fn point_to_json(&self, p: &Point) -> String {
        let labels: Vec<&str> = p
            .cat
            .iter()
            .enumerate()
            .map(|(i, &c)| self.labels(i)[c].as_str())
            .collect();
        let enc = |v: serde_json::Result<String>| v.unwrap_or_else(|_| "[]".into());
        format!(
            "{{\"cat\":{},\"int\":{},\"cont\":{}}}",
            enc(serde_json::to_string(&labels)),
            enc(serde_json::to_string(&p.int)),
            enc(serde_json::to_string(&p.cont))
        )
    }

    pub fn point_from_json(&self, s: &str) -> Result<Point> {
        #[derive(Deserialize)]
        struct Wire {
            #[serde(default)]
            cat: Vec<String>,
            #[serde(default)]
            int: Vec<i64>,
            #[serde(default)]
            cont: Vec<f64>,
        }
        let w: Wire = serde_json::from_str(s)?;
        if w.cat.len() != self.n_cat() {
            return Err(Error::Structure("categorical length mismatch".into()));
        }
        let cat = w
            .cat
            .iter()
            .enumerate()
            .map(|(i, l)| {
                self.labels(i).iter().position(|x| x == l).ok_or_else(|| {
                    Error::Structure(format!("unknown label `{l}` for variable {i}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Point {
            cat,
            int: w.int,
            cont: w.cont,
        })
    }

    /// Center of the box, snapped to the lattice; first category everywhere.
    pub fn center(&self) -> Point {
        let cat = vec![0; self.n_cat()];
        let int = (0..self.n_int())
            .map(|i| {
                let (l, u) = self.int_bounds(i);
                l + (u - l) / 2
            })
            .collect();
        let cont = (0..self.n_cont())
            .map(|i| {
                let (l, u) = self.cont_bounds(i);
                0.5 * (l + u)
            })
            .collect();
        self.snap(&Point { cat, int, cont })
    }
}

/// Which component a variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Categorical,
    Integer,
    Continuous,
}

/// Lexicographic iterator over categorical components.
pub struct CatComponents {
    counts: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for CatComponents {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                self.next = None;
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.counts[pos] {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(current)
    }
}

/// A candidate point. Equality and hashing are exact (bitwise for reals).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Point {
    pub cat: Vec<usize>,
    pub int: Vec<i64>,
    pub cont: Vec<f64>,
}

impl Point {
    pub fn new(cat: Vec<usize>, int: Vec<i64>, cont: Vec<f64>) -> Self {
        Self { cat, int, cont }
    }

    pub fn continuous(cont: Vec<f64>) -> Self {
        Self {
            cat: Vec::new(),
            int: Vec::new(),
            cont,
        }
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.cat == other.cat
            && self.int == other.int
            && self.cont.len() == other.cont.len()
            && self
                .cont
                .iter()
                .zip(&other.cont)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl Eq for Point {}

impl Hash for Point {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.cat.hash(state);
        self.int.hash(state);
        for x in &self.cont {
            x.to_bits().hash(state);
        }
    }
}

/// Outcome of [`Domain::validate`]; empty iff the point lies in the domain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Declared index of the offending variable.
    pub variable: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    UnknownCategory { index: usize, count: usize },
    BelowLower,
    AboveUpper,
    NotFinite,
}

/// Problem definition file: variables plus the number of constraints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub variables: Vec<VariableSpec>,
    #[serde(default)]
    pub n_constraints: usize,
    /// Optional child command for subprocess blackboxes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
}

impl ProblemFile {
    pub fn domain(&self) -> Result<Domain> {
        Domain::new(self.variables.clone())
    }
}

pub(crate) fn quanta_of(x: f64, exp: i32) -> i64 {
    if exp < 0 {
        (x * 10f64.powi(-exp)).round() as i64
    } else {
        (x / 10f64.powi(exp)).round() as i64
    }
}

pub(crate) fn real_of(q: i64, exp: i32) -> f64 {
    if exp < 0 {
        q as f64 / 10f64.powi(-exp)
    } else {
        q as f64 * 10f64.powi(exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rgb() -> VariableSpec {
        VariableSpec::Categorical {
            labels: vec!["R".into(), "G".into(), "B".into()],
        }
    }

    #[test]
    fn validate_interior_and_bounds_inclusive() {
        let d = Domain::new(vec![VariableSpec::Continuous { lb: 0.0, ub: 1.0 }]).unwrap();
        assert!(d
            .validate(&Point::continuous(vec![0.5]))
            .unwrap()
            .is_empty());
        assert!(d
            .validate(&Point::continuous(vec![1.0]))
            .unwrap()
            .is_empty());
        assert!(d
            .validate(&Point::continuous(vec![0.0]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn validate_reports_integer_violation_with_index() {
        let d = Domain::new(vec![
            VariableSpec::Continuous { lb: 0.0, ub: 1.0 },
            VariableSpec::Integer { lb: 0, ub: 5 },
        ])
        .unwrap();
        let r = d.validate(&Point::new(vec![], vec![7], vec![0.2])).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].variable, 1);
        assert_eq!(r.violations[0].kind, ViolationKind::AboveUpper);
    }

    #[test]
    fn validate_length_mismatch_is_structural() {
        let d = Domain::new(vec![VariableSpec::Integer { lb: 0, ub: 5 }]).unwrap();
        let err = d.validate(&Point::new(vec![], vec![], vec![])).unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
    }

    #[test]
    fn onehot_examples() {
        let d = Domain::new(vec![rgb()]).unwrap();
        assert_eq!(d.onehot(&[0]).unwrap(), vec![1, 0, 0]);
        assert!(matches!(d.onehot(&[3]), Err(Error::CategoryIndex { .. })));

        let d2 = Domain::new(vec![
            VariableSpec::Categorical {
                labels: vec!["A".into(), "B".into()],
            },
            VariableSpec::Categorical {
                labels: vec!["X".into(), "Y".into(), "Z".into()],
            },
        ])
        .unwrap();
        assert_eq!(d2.onehot(&[1, 2]).unwrap(), vec![0, 1, 0, 0, 1]);
        assert_eq!(d2.decode_onehot(&[0, 1, 0, 0, 1]).unwrap(), vec![1, 2]);
    }

    #[test]
    fn rejects_bad_declarations() {
        assert!(Domain::new(vec![]).is_err());
        assert!(Domain::new(vec![VariableSpec::Categorical {
            labels: vec!["a".into()]
        }])
        .is_err());
        assert!(Domain::new(vec![VariableSpec::Categorical {
            labels: vec!["a".into(), "a".into()]
        }])
        .is_err());
        assert!(Domain::new(vec![VariableSpec::Integer { lb: 3, ub: 2 }]).is_err());
        assert!(Domain::new(vec![VariableSpec::Continuous {
            lb: 0.0,
            ub: f64::INFINITY
        }])
        .is_err());
    }

    #[test]
    fn cardinality_and_enumeration() {
        let d = Domain::new(vec![
            rgb(),
            VariableSpec::Integer { lb: 0, ub: 1 },
            VariableSpec::Categorical {
                labels: vec!["a".into(), "b".into()],
            },
        ])
        .unwrap();
        assert_eq!(d.cat_cardinality(), 6);
        let all: Vec<_> = d.cat_components().collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[5], vec![2, 1]);
        assert_eq!(d.n(), 3);
        assert_eq!(d.n_qnt(), 1);
    }

    #[test]
    fn json_round_trip_uses_labels() {
        let d = Domain::new(vec![
            rgb(),
            VariableSpec::Integer { lb: -3, ub: 3 },
            VariableSpec::Continuous { lb: -1.0, ub: 1.0 },
        ])
        .unwrap();
        let p = Point::new(vec![2], vec![-1], vec![0.25]);
        let s = d.point_to_json(&p);
        assert_eq!(s, r#"{"cat":["B"],"int":[-1],"cont":[0.25]}"#);
        assert_eq!(d.point_from_json(&s).unwrap(), p);
    }

    #[test]
    fn quanta_bounds_stay_inside() {
        let d = Domain::new(vec![VariableSpec::Continuous { lb: 0.1, ub: 0.7 }]).unwrap();
        let b = d.qnt_bounds_quanta()[0];
        assert_eq!(b, (100_000_000, 700_000_000));
        let p = d.from_quanta(vec![], &[b.0]);
        assert_eq!(p.cont[0], 0.1);
    }

    #[test]
    fn point_equality_is_bitwise() {
        let a = Point::continuous(vec![0.0]);
        let b = Point::continuous(vec![-0.0]);
        assert_ne!(a, b);
        assert_eq!(a, Point::continuous(vec![0.0]));
    }
}
