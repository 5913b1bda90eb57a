//! Poll candidate generation: Householder directions on the mesh, the
//! categorical poll over a distance-induced neighborhood and the extended
//! poll.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::barrier::{dominates_f, dominates_h, BarrierState};
use crate::blackbox::EvalResult;
use crate::catdistance::{neighborhood, CatWeights};
use crate::domain::{Domain, Point};
use crate::error::Result;
use crate::mesh::MeshState;

const MAX_REDRAWS: usize = 100;

/// Extended real parameter of the extended-poll trigger.
pub type Xi = f64;

/// `2 n` integer directions in mesh units.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    pub dirs: Vec<Vec<i64>>,
    /// Householder vector (empty for the coordinate fallback).
    pub v: Vec<f64>,
}

/// Per-axis ratio `⌊Δ / δ⌋ ≥ 1`.
pub fn frame_ratio(state: &MeshState) -> Vec<i64> {
    (0..state.dim())
        .map(|i| (state.frame_quanta(i) / state.mesh_quanta(i)).max(1))
        .collect()
}

fn full_rank(cols: &[Vec<i64>]) -> bool {
    let n = cols.len();
    let m = DMatrix::from_fn(n, n, |r, c| cols[c][r] as f64);
    let sv = m.singular_values();
    let max = sv.max();
    max > 0.0 && sv.min() > max * 1e-10
}

/// Draws `v`, forms `H = I − 2 v vᵀ` and scales each column `h_j` to
/// `round(r ⊙ h_j / ‖h_j‖_∞)` with `r = ⌊Δ/δ⌋`, emitting `±d_j`.
/// Rank-deficient roundings are redrawn; after repeated failures the
/// coordinate directions `±r_j e_j` are used.
pub fn householder_directions<R: Rng>(rng: &mut R, state: &MeshState) -> DirectionSet {
    let n = state.dim();
    assert!(n >= 1, "no quantitative variables");
    let r = frame_ratio(state);
    for _ in 0..MAX_REDRAWS {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        let cols: Vec<Vec<i64>> = (0..n)
            .map(|j| {
                let h: Vec<f64> = (0..n)
                    .map(|i| f64::from(u8::from(i == j)) - 2.0 * v[i] * v[j])
                    .collect();
                let inf = h.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                h.iter()
                    .zip(&r)
                    .map(|(hi, &ri)| {
                        ((ri as f64) * hi / inf)
                            .round()
                            .clamp(-(ri as f64), ri as f64) as i64
                    })
                    .collect()
            })
            .collect();
        if full_rank(&cols) {
            let mut dirs = Vec::with_capacity(2 * n);
            for d in &cols {
                dirs.push(d.clone());
            }
            for d in &cols {
                dirs.push(d.iter().map(|x| -x).collect());
            }
            return DirectionSet { dirs, v };
        }
    }
    let mut dirs = Vec::with_capacity(2 * n);
    for sign in [1, -1] {
        for j in 0..n {
            let mut d = vec![0; n];
            d[j] = sign * r[j];
            dirs.push(d);
        }
    }
    DirectionSet {
        dirs,
        v: Vec::new(),
    }
}

/// A quantitative poll candidate and its displacement in quanta.
#[derive(Debug, Clone, PartialEq)]
pub struct QntCandidate {
    pub point: Point,
    pub displacement: Vec<i64>,
}

/// Mesh points `center + diag(δ) d`, projected into bounds; the center and
/// duplicates are dropped. The categorical component is kept.
pub fn quantitative_poll(
    domain: &Domain,
    center: &Point,
    dirs: &DirectionSet,
    state: &MeshState,
) -> Vec<QntCandidate> {
    let c = domain.to_quanta(center);
    let bounds = domain.qnt_bounds_quanta();
    let mut out: Vec<QntCandidate> = Vec::with_capacity(dirs.dirs.len());
    for d in &dirs.dirs {
        let y = state.mesh_point(&c, d, &bounds);
        if y == c {
            continue;
        }
        let point = domain.from_quanta(center.cat.clone(), &y);
        if out.iter().any(|q| q.point == point) {
            continue;
        }
        let displacement = y.iter().zip(&c).map(|(a, b)| a - b).collect();
        out.push(QntCandidate {
            point,
            displacement,
        });
    }
    out
}

/// Stable reorder by decreasing cosine with `reference`, both measured in
/// frame-size units.
pub fn order_by_direction(cands: &mut [QntCandidate], reference: &[i64], state: &MeshState) {
    let scale = |v: &[i64]| -> Vec<f64> {
        v.iter()
            .enumerate()
            .map(|(i, &x)| x as f64 / state.frame_quanta(i) as f64)
            .collect()
    };
    let r = scale(reference);
    let rn = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if rn == 0.0 {
        return;
    }
    let cosine = |c: &QntCandidate| {
        let s = scale(&c.displacement);
        let sn = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        if sn == 0.0 {
            return 0.0;
        }
        s.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() / (sn * rn)
    };
    cands.sort_by(|a, b| cosine(b).total_cmp(&cosine(a)));
}

/// The `m` closest other categorical components with the center's
/// quantitative part.
pub fn categorical_poll(
    domain: &Domain,
    center: &Point,
    m: usize,
    w: &CatWeights,
) -> Result<Vec<Point>> {
    if m == 0 || domain.n_cat() == 0 {
        return Ok(Vec::new());
    }
    let nb = neighborhood(domain, &center.cat, m, w)?;
    Ok(nb
        .others()
        .iter()
        .map(|cat| Point::new(cat.clone(), center.int.clone(), center.cont.clone()))
        .collect())
}

/// `0 ≤ f(y) − f(x) ≤ ξ |f(x)|`; never for `ξ < 0`; any `f(y) ≥ f(x)` for
/// `ξ = +∞`. Non-finite `f(y)` never passes.
pub fn extended_trigger(xi: Xi, incumbent_f: f64, y_f: f64) -> bool {
    if xi < 0.0 || xi.is_nan() || !y_f.is_finite() {
        return false;
    }
    let gap = y_f - incumbent_f;
    if xi == f64::INFINITY {
        return gap >= 0.0;
    }
    gap >= 0.0 && gap <= xi * incumbent_f.abs()
}

/// Which incumbent an extended-poll start is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceKind {
    Feasible,
    Infeasible,
}

/// A start point of an extended poll.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedStart {
    pub position: usize,
    pub kind: DominanceKind,
}

/// Selects the categorical-poll points that undergo an extended poll.
///
/// `polled` holds `(history position, result)` for every categorical poll
/// point of the iteration, in poll order.
pub fn select_extended(
    barrier: &BarrierState,
    polled: &[(usize, EvalResult)],
    xi: Xi,
) -> Vec<ExtendedStart> {
    let mut out: Vec<ExtendedStart> = Vec::new();
    for (pos, r) in polled {
        if out.iter().any(|s| s.position == *pos) || !r.is_eligible() {
            continue;
        }
        let start = if r.is_feasible() {
            barrier
                .feasible
                .as_ref()
                .filter(|x| extended_trigger(xi, x.result.f, r.f))
                .map(|_| DominanceKind::Feasible)
        } else if r.h <= barrier.h_max {
            barrier
                .infeasible
                .as_ref()
                .filter(|x| extended_trigger(xi, x.result.f, r.f))
                .map(|_| DominanceKind::Infeasible)
        } else {
            None
        };
        if let Some(kind) = start {
            out.push(ExtendedStart {
                position: *pos,
                kind,
            });
        }
    }
    out
}

/// What the evaluation callback reports for one extended-poll candidate.
#[derive(Debug, Clone)]
pub enum ExtendedEval {
    /// The candidate was evaluated (or found in the cache).
    Done {
        result: EvalResult,
        new_incumbent: bool,
    },
    /// The budget ran out.
    Exhausted,
}

/// How an extended poll sequence ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtendedEnd {
    NoImprovement,
    NewIncumbent,
    Cap,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedOutcome {
    /// The sequence `y_(0), y_(1), ...`.
    pub iterates: Vec<Point>,
    pub end: ExtendedEnd,
}

fn step_dominates(kind: DominanceKind, h_max: f64, cand: &EvalResult, cur: &EvalResult) -> bool {
    if !cand.is_eligible() {
        return false;
    }
    match kind {
        DominanceKind::Feasible => cand.is_feasible() && dominates_f(cand, cur),
        DominanceKind::Infeasible => {
            !cand.is_feasible() && cand.h <= h_max && dominates_h(cand, cur)
        }
    }
}

/// Runs successive quantitative polls from `start` under fixed mesh sizes.
/// Each iterate strictly dominates its predecessor. The sequence stops when
/// a poll yields no dominating point, when `eval` reports a new incumbent,
/// after `cap` moves, or when the budget runs out.
#[allow(clippy::too_many_arguments)]
pub fn extended_poll<R, F>(
    domain: &Domain,
    state: &MeshState,
    rng: &mut R,
    start: &Point,
    start_result: &EvalResult,
    kind: DominanceKind,
    h_max: f64,
    cap: usize,
    mut eval: F,
) -> ExtendedOutcome
where
    R: Rng,
    F: FnMut(&Point) -> ExtendedEval,
{
    let mut iterates = vec![start.clone()];
    let mut current = start.clone();
    let mut current_result = start_result.clone();
    loop {
        if iterates.len() > cap {
            return ExtendedOutcome {
                iterates,
                end: ExtendedEnd::Cap,
            };
        }
        let dirs = householder_directions(rng, state);
        let cands = quantitative_poll(domain, &current, &dirs, state);
        let mut moved = false;
        for c in cands {
            match eval(&c.point) {
                ExtendedEval::Exhausted => {
                    return ExtendedOutcome {
                        iterates,
                        end: ExtendedEnd::Exhausted,
                    }
                }
                ExtendedEval::Done {
                    result,
                    new_incumbent,
                } => {
                    if new_incumbent {
                        iterates.push(c.point);
                        return ExtendedOutcome {
                            iterates,
                            end: ExtendedEnd::NewIncumbent,
                        };
                    }
                    if step_dominates(kind, h_max, &result, &current_result) {
                        current = c.point;
                        current_result = result;
                        iterates.push(current.clone());
                        moved = true;
                        break;
                    }
                }
            }
        }
        if !moved {
            return ExtendedOutcome {
                iterates,
                end: ExtendedEnd::NoImprovement,
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::Status;
    use crate::domain::{QntKind, VariableSpec};
    use crate::mesh::Ladder;
    use crate::rng::{substream, Stream};

    fn cont_domain(n: usize) -> Domain {
        Domain::new(vec![
            VariableSpec::Continuous {
                lb: -10.0,
                ub: 10.0
            };
            n
        ])
        .unwrap()
    }

    fn state(frames: &[Ladder]) -> MeshState {
        MeshState::from_frames(
            frames.to_vec(),
            vec![QntKind::Continuous; frames.len()],
            vec![-9; frames.len()],
        )
    }

    #[test]
    fn one_dimensional_directions() {
        let s = state(&[Ladder::new(5, -1)]);
        let mut rng = substream(1, Stream::Directions);
        let d = householder_directions(&mut rng, &s);
        // Δ = 0.5, δ = 0.2, ratio 2
        let mut got = d.dirs.clone();
        got.sort();
        assert_eq!(got, vec![vec![-2], vec![2]]);
    }

    #[test]
    fn containment_and_symmetry() {
        let s = state(&[Ladder::new(1, -1), Ladder::new(2, 0), Ladder::new(5, -3)]);
        for seed in 0..50 {
            let mut rng = substream(seed, Stream::Directions);
            let d = householder_directions(&mut rng, &s);
            assert_eq!(d.dirs.len(), 6);
            for dir in &d.dirs {
                for (i, &x) in dir.iter().enumerate() {
                    assert!((x * s.mesh_quanta(i)).abs() <= s.frame_quanta(i));
                }
                let neg: Vec<i64> = dir.iter().map(|x| -x).collect();
                assert!(d.dirs.contains(&neg));
            }
        }
    }

    #[test]
    fn quantitative_poll_example() {
        let d = cont_domain(1);
        // δ = Δ = 0.5 through a mesh floor
        let s = state(&[Ladder::new(5, -1)]).with_floors(&[Some(0.5)]);
        assert_eq!(frame_ratio(&s), vec![1]);
        let dirs = DirectionSet {
            dirs: vec![vec![1], vec![-1]],
            v: vec![],
        };
        let center = Point::new(vec![], vec![], vec![0.0]);
        let c = quantitative_poll(&d, &center, &dirs, &s);
        let xs: Vec<f64> = c.iter().map(|q| q.point.cont[0]).collect();
        assert_eq!(xs, vec![0.5, -0.5]);
        assert!(c
            .iter()
            .all(|q| q.point.cat == center.cat && q.point.int == center.int));
    }

    #[test]
    fn projection_and_dropping_at_bound() {
        let d = Domain::new(vec![VariableSpec::Continuous { lb: 0.0, ub: 1.0 }]).unwrap();
        let s = MeshState::from_frames(
            vec![Ladder::new(1, -1)],
            vec![QntKind::Continuous],
            vec![-9],
        );
        let dirs = DirectionSet {
            dirs: vec![vec![10], vec![-10]],
            v: vec![],
        };
        let center = Point::continuous(vec![1.0]);
        let c = quantitative_poll(&d, &center, &dirs, &s);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].point.cont, vec![0.9]);
    }

    #[test]
    fn categorical_poll_sizes() {
        let d = Domain::new(vec![
            VariableSpec::Categorical {
                labels: vec!["a".into(), "b".into(), "c".into()],
            },
            VariableSpec::Continuous { lb: 0.0, ub: 1.0 },
        ])
        .unwrap();
        let w = CatWeights::uniform(&d);
        let center = Point::new(vec![1], vec![], vec![0.5]);
        assert!(categorical_poll(&d, &center, 0, &w).unwrap().is_empty());
        let all = categorical_poll(&d, &center, 2, &w).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all
            .iter()
            .all(|p| p.cont == center.cont && p.cat != center.cat));
        assert!(categorical_poll(&d, &center, 3, &w).is_err());
    }

    #[test]
    fn trigger_examples() {
        assert!(extended_trigger(0.05, 100.0, 104.0));
        assert!(!extended_trigger(0.05, 100.0, 106.0));
        assert!(!extended_trigger(-1.0, 100.0, 100.0));
        assert!(extended_trigger(f64::INFINITY, 1.0, 1e300));
        assert!(!extended_trigger(f64::INFINITY, 1.0, 0.5));
        assert!(!extended_trigger(0.05, 100.0, 99.0));
        assert!(!extended_trigger(f64::INFINITY, 1.0, f64::INFINITY));
    }

    fn res(f: f64, h: f64) -> EvalResult {
        EvalResult {
            f,
            g: vec![],
            h,
            status: Status::Ok,
            eval_index: 1,
        }
    }

    #[test]
    fn extended_selection() {
        let barrier = BarrierState {
            feasible: Some(crate::barrier::Incumbent {
                position: 0,
                result: res(10.0, 0.0),
            }),
            infeasible: Some(crate::barrier::Incumbent {
                position: 1,
                result: res(5.0, 1.0),
            }),
            h_max: 2.0,
        };
        let polled = vec![
            (2, res(10.4, 0.0)),
            (3, res(12.0, 0.0)),
            (4, res(5.1, 1.5)),
            (5, res(5.1, 3.0)),
            (2, res(10.4, 0.0)),
        ];
        let sel = select_extended(&barrier, &polled, 0.05);
        assert_eq!(
            sel,
            vec![
                ExtendedStart {
                    position: 2,
                    kind: DominanceKind::Feasible
                },
                ExtendedStart {
                    position: 4,
                    kind: DominanceKind::Infeasible
                }
            ]
        );
        assert!(select_extended(&barrier, &polled, -1.0).is_empty());
        assert_eq!(select_extended(&barrier, &polled, f64::INFINITY).len(), 3);
    }

    #[test]
    fn extended_poll_descends_and_terminates() {
        let d = cont_domain(2);
        let s = state(&[Ladder::new(1, 0), Ladder::new(1, 0)]);
        let mut rng = substream(3, Stream::Directions);
        let f = |p: &Point| (p.cont[0] - 3.0).powi(2) + (p.cont[1] + 2.0).powi(2);
        let start = Point::continuous(vec![0.0, 0.0]);
        let out = extended_poll(
            &d,
            &s,
            &mut rng,
            &start,
            &res(f(&start), 0.0),
            DominanceKind::Feasible,
            0.0,
            20,
            |p| ExtendedEval::Done {
                result: res(f(p), 0.0),
                new_incumbent: false,
            },
        );
        assert_ne!(out.end, ExtendedEnd::Cap);
        let values: Vec<f64> = out.iterates.iter().map(f).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        let mut pts = out.iterates.clone();
        pts.dedup();
        assert_eq!(pts.len(), out.iterates.len());
    }

    #[test]
    fn extended_poll_stops_on_new_incumbent() {
        let d = cont_domain(1);
        let s = state(&[Ladder::new(1, 0)]);
        let mut rng = substream(3, Stream::Directions);
        let start = Point::continuous(vec![0.0]);
        let out = extended_poll(
            &d,
            &s,
            &mut rng,
            &start,
            &res(1.0, 0.0),
            DominanceKind::Feasible,
            0.0,
            10,
            |_| ExtendedEval::Done {
                result: res(0.0, 0.0),
                new_incumbent: true,
            },
        );
        assert_eq!(out.end, ExtendedEnd::NewIncumbent);
        assert_eq!(out.iterates.len(), 2);
    }
}
