//! Granular quantitative mesh.
//!
//! Frame sizes Δ and mesh sizes δ take values on the `{1, 2, 5} × 10^b`
//! ladder, one pair per quantitative coordinate. All mesh arithmetic is done
//! on integer quanta (see [`crate::domain`]), which keeps mesh membership
//! exact.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, QntKind};

/// A value `a × 10^b` with `a ∈ {1, 2, 5}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ladder {
    pub a: u8,
    pub b: i32,
}

impl Ladder {
    pub const fn new(a: u8, b: i32) -> Self {
        assert!(a == 1 || a == 2 || a == 5);
        Self { a, b }
    }

    pub fn value(self) -> f64 {
        f64::from(self.a) * 10f64.powi(self.b)
    }

    /// Adjacent rung: `... 0.1, 0.2, 0.5, 1, 2, 5, 10 ...`.
    pub fn step(self, dir: Direction) -> Self {
        match (dir, self.a) {
            (Direction::Up, 1) => Self::new(2, self.b),
            (Direction::Up, 2) => Self::new(5, self.b),
            (Direction::Up, _) => Self::new(1, self.b + 1),
            (Direction::Down, 5) => Self::new(2, self.b),
            (Direction::Down, 2) => Self::new(1, self.b),
            (Direction::Down, _) => Self::new(5, self.b - 1),
        }
    }

    /// Rung nearest (in absolute value) to `x > 0`; ties go down.
    pub fn nearest(x: f64) -> Self {
        let mut lo = Self::floor(x);
        let hi = lo.step(Direction::Up);
        if (hi.value() - x).abs() < (x - lo.value()).abs() {
            lo = hi;
        }
        lo
    }

    /// Largest rung `≤ x`, for `x > 0`.
    pub fn floor(x: f64) -> Self {
        assert!(x > 0.0 && x.is_finite());
        let mut b = x.log10().floor() as i32;
        // log10 rounding; settle on exact comparison
        while Self::new(1, b).value() > x {
            b -= 1;
        }
        while Self::new(1, b + 1).value() <= x {
            b += 1;
        }
        for a in [5u8, 2, 1] {
            let c = Self::new(a, b);
            if c.value() <= x {
                return c;
            }
        }
        Self::new(1, b)
    }

    /// Largest rung `≤ self²`.
    pub fn floor_square(self) -> Self {
        match self.a {
            1 => Self::new(1, 2 * self.b),
            2 => Self::new(2, 2 * self.b),
            _ => Self::new(2, 2 * self.b + 1),
        }
    }

    /// The value in quanta of `10^unit_exp`, if representable.
    pub fn quanta(self, unit_exp: i32) -> Option<i64> {
        let shift = self.b - unit_exp;
        if shift < 0 {
            return None;
        }
        10i64
            .checked_pow(shift as u32)
            .and_then(|p| p.checked_mul(i64::from(self.a)))
    }
}

impl Ord for Ladder {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.b, self.a).cmp(&(other.b, other.a))
    }
}

impl PartialOrd for Ladder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

/// Mesh update trigger, shared with the barrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Dominating,
    Improving,
    Unsuccessful,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Dominating => "dominating",
            Outcome::Improving => "improving",
            Outcome::Unsuccessful => "unsuccessful",
        })
    }
}

/// Mesh size for a frame size: the largest rung `≤ min(Δ, Δ²)`, floored at
/// one quantum (continuous) or one (integer).
pub fn mesh_from_frame(frame: Ladder, kind: QntKind, unit_exp: i32) -> Ladder {
    floored_mesh(frame, default_floor(kind, unit_exp))
}

fn default_floor(kind: QntKind, unit_exp: i32) -> Ladder {
    match kind {
        QntKind::Continuous => Ladder::new(1, unit_exp),
        QntKind::Integer => Ladder::new(1, 0),
    }
}

fn floored_mesh(frame: Ladder, floor: Ladder) -> Ladder {
    frame.floor_square().min(frame).max(floor)
}

/// Per-coordinate frame and mesh sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshState {
    frame: Vec<Ladder>,
    mesh: Vec<Ladder>,
    initial: Vec<Ladder>,
    kinds: Vec<QntKind>,
    unit_exp: Vec<i32>,
    floor: Vec<Ladder>,
}

impl MeshState {
    /// Initial sizes from the bounds: Δ is the rung nearest a tenth of the
    /// range (continuous) or `max(1, floor rung of a tenth)` (integer).
    pub fn initial(domain: &Domain) -> Self {
        let bounds = domain.qnt_bounds();
        let mut initial = Vec::with_capacity(bounds.len());
        let mut kinds = Vec::with_capacity(bounds.len());
        let mut unit_exp = Vec::with_capacity(bounds.len());
        for (q, &(lb, ub)) in bounds.iter().enumerate() {
            let kind = domain.qnt_kind(q);
            let unit = domain.quantum_exponent(q);
            let tenth = (ub - lb) / 10.0;
            let frame = match kind {
                QntKind::Continuous => {
                    if tenth > 0.0 {
                        Ladder::nearest(tenth).max(Ladder::new(1, unit))
                    } else {
                        Ladder::new(1, unit)
                    }
                }
                QntKind::Integer => {
                    if tenth >= 1.0 {
                        Ladder::floor(tenth)
                    } else {
                        Ladder::new(1, 0)
                    }
                }
            };
            initial.push(frame);
            kinds.push(kind);
            unit_exp.push(unit);
        }
        Self::from_frames(initial, kinds, unit_exp)
    }

    /// Builds a state from explicit frame sizes (which also become the caps).
    pub fn from_frames(frame: Vec<Ladder>, kinds: Vec<QntKind>, unit_exp: Vec<i32>) -> Self {
        let floor: Vec<Ladder> = kinds
            .iter()
            .zip(&unit_exp)
            .map(|(&k, &u)| default_floor(k, u))
            .collect();
        let frame: Vec<Ladder> = frame.iter().zip(&floor).map(|(&f, &l)| f.max(l)).collect();
        let mesh = frame
            .iter()
            .zip(&floor)
            .map(|(&f, &l)| floored_mesh(f, l))
            .collect();
        Self {
            initial: frame.clone(),
            frame,
            mesh,
            kinds,
            unit_exp,
            floor,
        }
    }

    /// Raises the minimum mesh size of each coordinate to the ladder rung
    /// below the given value (`None` keeps the default). Frame sizes never
    /// drop below the mesh floor.
    pub fn with_floors(mut self, floors: &[Option<f64>]) -> Self {
        for (i, fl) in floors.iter().enumerate().take(self.dim()) {
            if let Some(v) = fl.filter(|v| *v > 0.0 && v.is_finite()) {
                self.floor[i] = self.floor[i].max(Ladder::floor(v));
                self.initial[i] = self.initial[i].max(self.floor[i]);
                self.frame[i] = self.frame[i].max(self.floor[i]);
                self.mesh[i] = floored_mesh(self.frame[i], self.floor[i]);
            }
        }
        self
    }

    /// Minimum mesh size per coordinate.
    pub fn floors(&self) -> &[Ladder] {
        &self.floor
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[Ladder] {
        &self.frame
    }

    pub fn mesh(&self) -> &[Ladder] {
        &self.mesh
    }

    pub fn kinds(&self) -> &[QntKind] {
        &self.kinds
    }

    /// δ_i in quanta.
    pub fn mesh_quanta(&self, i: usize) -> i64 {
        self.mesh[i]
            .quanta(self.unit_exp[i])
            .expect("mesh size is at least one quantum")
    }

    /// Δ_i in quanta.
    pub fn frame_quanta(&self, i: usize) -> i64 {
        self.frame[i]
            .quanta(self.unit_exp[i])
            .expect("frame size is at least one quantum")
    }

    /// Applies the outcome of an iteration.
    pub fn update(&self, outcome: Outcome) -> Self {
        let mut next = self.clone();
        match outcome {
            Outcome::Improving => return next,
            Outcome::Dominating => {
                for i in 0..self.dim() {
                    next.frame[i] = self.frame[i].step(Direction::Up).min(self.initial[i]);
                }
            }
            Outcome::Unsuccessful => {
                for i in 0..self.dim() {
                    next.frame[i] = self.frame[i].step(Direction::Down).max(self.floor[i]);
                }
            }
        }
        for i in 0..self.dim() {
            next.mesh[i] = floored_mesh(next.frame[i], self.floor[i]);
        }
        next
    }

    /// True when no mesh size can decrease further.
    pub fn at_minimum(&self) -> bool {
        (0..self.dim()).all(|i| match self.kinds[i] {
            QntKind::Integer => self.frame[i] == self.floor[i],
            QntKind::Continuous => self.mesh[i] == self.floor[i],
        })
    }

    /// `(a,b)` pairs for frame and mesh, `;`-separated per coordinate.
    pub fn describe(&self) -> String {
        self.frame
            .iter()
            .zip(&self.mesh)
            .map(|(f, m)| format!("{f}/{m}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// `center + diag(δ) z`, each coordinate projected onto the nearest
    /// in-bounds mesh point along its axis.
    pub fn mesh_point(&self, center: &[i64], z: &[i64], bounds: &[(i64, i64)]) -> Vec<i64> {
        center
            .iter()
            .zip(z)
            .zip(bounds)
            .enumerate()
            .map(|(i, ((&c, &zi), &(lb, ub)))| {
                let delta = i128::from(self.mesh_quanta(i));
                let c = i128::from(c);
                let mut y = c + delta * i128::from(zi);
                if y > i128::from(ub) {
                    y = c + delta * ((i128::from(ub) - c).div_euclid(delta));
                } else if y < i128::from(lb) {
                    y = c - delta * ((c - i128::from(lb)).div_euclid(delta));
                }
                y as i64
            })
            .collect()
    }

    /// Whether `y` lies on the mesh centered at `center`.
    pub fn on_mesh(&self, center: &[i64], y: &[i64]) -> bool {
        center.iter().zip(y).enumerate().all(|(i, (&c, &v))| {
            (i128::from(v) - i128::from(c)) % i128::from(self.mesh_quanta(i)) == 0
        })
    }
}
