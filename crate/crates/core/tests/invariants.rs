//! Property tests over the public API.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use catmads::barrier::{classify_and_update, select_incumbents, BarrierState};
use catmads::blackbox::{
    make_problem, violation_aggregate, Blackbox, EvalResult, Evaluator, History, ProblemSpec,
    RawOutcome,
};
use catmads::catdistance::{cat_distance, neighborhood, CatWeights};
use catmads::domain::{Domain, Point, VariableSpec};
use catmads::mesh::{Direction, Ladder, MeshState, Outcome};
use catmads::poll::{categorical_poll, householder_directions, quantitative_poll, select_extended};
use catmads::solver::{solve, SolverConfig};
use catmads::trace::check_barrier_laws;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn variable() -> impl Strategy<Value = VariableSpec> {
    prop_oneof![
        (2usize..5).prop_map(|c| VariableSpec::Categorical {
            labels: (0..c).map(|j| format!("l{j}")).collect()
        }),
        (-20i64..5, 1i64..40).prop_map(|(lb, w)| VariableSpec::Integer { lb, ub: lb + w }),
        (-10.0f64..0.0, -2.0f64..2.5).prop_map(|(lb, e)| VariableSpec::Continuous {
            lb,
            ub: lb + 10f64.powf(e)
        }),
    ]
}

fn mixed_domain() -> impl Strategy<Value = Domain> {
    prop::collection::vec(variable(), 1..6).prop_filter_map("valid domain", |v| Domain::new(v).ok())
}

fn point_in(d: &Domain, seed: u64) -> Point {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cat = (0..d.n_cat())
        .map(|i| rng.random_range(0..d.n_categories(i)))
        .collect();
    let q: Vec<i64> = d
        .qnt_bounds_quanta()
        .iter()
        .map(|&(lb, ub)| rng.random_range(lb..=ub))
        .collect();
    d.from_quanta(cat, &q)
}

fn outcome() -> impl Strategy<Value = Outcome> {
    prop_oneof![
        Just(Outcome::Dominating),
        Just(Outcome::Improving),
        Just(Outcome::Unsuccessful)
    ]
}

struct Counting {
    calls: AtomicUsize,
}

impl Blackbox for Counting {
    fn n_constraints(&self) -> usize {
        1
    }

    fn evaluate(&self, _d: &Domain, p: &Point) -> RawOutcome {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let s: f64 = p.int.iter().map(|&v| v as f64).sum::<f64>() + p.cont.iter().sum::<f64>();
        RawOutcome::Ok {
            f: s * s,
            g: vec![s - 1.0],
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn onehot_round_trips(d in mixed_domain(), seed in any::<u64>()) {
        let p = point_in(&d, seed);
        let hot = d.onehot(&p.cat).unwrap();
        prop_assert_eq!(d.decode_onehot(&hot).unwrap(), p.cat.clone());
        prop_assert_eq!(d.validate(&p).unwrap(), d.validate(&p).unwrap());
        prop_assert!(d.validate(&p).unwrap().is_empty());
    }

    #[test]
    fn violation_zero_iff_feasible(g in prop::collection::vec(prop_oneof![-1e3f64..1e3, Just(0.0), Just(-0.0), 0.0f64..1e-160], 0..8)) {
        let h = violation_aggregate(&g);
        prop_assert_eq!(h == 0.0, g.iter().all(|&x| x <= 0.0));
        prop_assert!(h >= 0.0);
    }

    #[test]
    fn cache_is_transparent(seq in prop::collection::vec(0u8..12, 1..60)) {
        let d = Domain::new(vec![
            VariableSpec::Integer { lb: 0, ub: 3 },
            VariableSpec::Continuous { lb: 0.0, ub: 1.0 },
        ]).unwrap();
        let bb = Arc::new(Counting { calls: AtomicUsize::new(0) });
        let mut ev = Evaluator::new(ProblemSpec::new("c", d, bb.clone()), 1000);
        let mut distinct = std::collections::HashSet::new();
        for s in &seq {
            let p = Point::new(vec![], vec![i64::from(s % 4)], vec![f64::from(s / 4) * 0.25]);
            distinct.insert(p.clone());
            ev.evaluate(&p).unwrap();
        }
        prop_assert_eq!(bb.calls.load(Ordering::SeqCst), distinct.len());
        prop_assert_eq!(ev.used() as usize, distinct.len());
    }

    #[test]
    fn history_replay_preserves_incumbents(seed in 0u64..1000, h_max in prop_oneof![Just(f64::INFINITY), 0.0f64..5.0]) {
        let p = make_problem("cat-toy-c").unwrap();
        let mut history = History::new(p.n_constraints());
        for i in 0..40u64 {
            let pt = point_in(&p.domain, seed * 100 + i);
            if history.get(&pt).is_some() {
                continue;
            }
            let r = EvalResult::from_raw(p.blackbox.evaluate(&p.domain, &pt), p.n_constraints(), history.len() as u64 + 1);
            history.push(pt, r);
        }
        let mut buf = Vec::new();
        history.write_csv(&p.domain, &mut buf).unwrap();
        let back = History::read_csv(&p.domain, buf.as_slice()).unwrap();
        prop_assert_eq!(select_incumbents(&back, h_max), select_incumbents(&history, h_max));
    }

    #[test]
    fn ladder_steps_invert(a in prop::sample::select(vec![1u8, 2, 5]), b in -12i32..12) {
        let l = Ladder::new(a, b);
        prop_assert_eq!(l.step(Direction::Up).step(Direction::Down), l);
        prop_assert_eq!(l.step(Direction::Down).step(Direction::Up), l);
        prop_assert!(l.step(Direction::Up).value() > l.value());
    }

    #[test]
    fn mesh_never_exceeds_frame(d in mixed_domain(), outcomes in prop::collection::vec(outcome(), 0..60)) {
        prop_assume!(d.n_qnt() > 0);
        let mut s = MeshState::initial(&d);
        for o in outcomes {
            let next = s.update(o);
            for i in 0..s.dim() {
                prop_assert!(next.mesh_quanta(i) <= next.frame_quanta(i));
                if o == Outcome::Unsuccessful && d.qnt_kind(i) == catmads::domain::QntKind::Continuous && s.frame()[i].value() < 1.0
                    && next.mesh()[i] != next.floors()[i]
                {
                    let before = s.frame_quanta(i) as f64 / s.mesh_quanta(i) as f64;
                    let after = next.frame_quanta(i) as f64 / next.mesh_quanta(i) as f64;
                    prop_assert!(after >= before);
                }
            }
            s = next;
        }
    }

    #[test]
    fn polls_keep_the_other_component(d in mixed_domain(), seed in any::<u64>(), outcomes in prop::collection::vec(outcome(), 0..20)) {
        prop_assume!(d.n_qnt() > 0);
        let mut s = MeshState::initial(&d);
        for o in outcomes {
            s = s.update(o);
        }
        let center = point_in(&d, seed);
        let c = d.to_quanta(&center);
        let dirs = householder_directions(&mut ChaCha8Rng::seed_from_u64(seed), &s);
        for q in quantitative_poll(&d, &center, &dirs, &s) {
            prop_assert_eq!(&q.point.cat, &center.cat);
            prop_assert!(s.on_mesh(&c, &d.to_quanta(&q.point)));
        }
        if d.cat_cardinality() > 1 {
            let m = (d.cat_cardinality() - 1).min(3) as usize;
            for p in categorical_poll(&d, &center, m, &CatWeights::uniform(&d)).unwrap() {
                prop_assert_eq!(&p.int, &center.int);
                prop_assert_eq!(&p.cont, &center.cont);
                prop_assert_ne!(&p.cat, &center.cat);
            }
        }
    }

    #[test]
    fn distance_is_a_pseudometric(d in mixed_domain(), s in any::<u64>()) {
        prop_assume!(d.n_cat() > 0);
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let theta: Vec<f64> = (0..d.onehot_len()).map(|_| rng.random_range(1e-3..10.0)).collect();
        let w = CatWeights::new(&d, theta).unwrap();
        let (u, v, x) = (point_in(&d, s).cat, point_in(&d, s ^ 1).cat, point_in(&d, s ^ 2).cat);
        let duv = cat_distance(&d, &u, &v, &w);
        prop_assert!(duv >= 0.0);
        prop_assert_eq!(cat_distance(&d, &u, &u, &w), 0.0);
        prop_assert_eq!(duv, cat_distance(&d, &v, &u, &w));
        prop_assert!(duv <= cat_distance(&d, &u, &x, &w) + cat_distance(&d, &x, &v, &w) + 1e-12);
    }

    #[test]
    fn neighborhoods_nest(d in mixed_domain(), s in any::<u64>()) {
        let card = d.cat_cardinality() as usize;
        prop_assume!(d.n_cat() > 0 && card > 2);
        let w = CatWeights::uniform(&d);
        let center = point_in(&d, s).cat;
        let mut prev = neighborhood(&d, &center, 0, &w).unwrap().members;
        prop_assert_eq!(&prev[0], &center);
        for m in 1..card.min(12) {
            let next = neighborhood(&d, &center, m, &w).unwrap().members;
            prop_assert_eq!(&next[..prev.len()], &prev[..]);
            prev = next;
        }
    }

    #[test]
    fn extended_selection_extremes(fs in prop::collection::vec(-5.0f64..5.0, 1..10), inc in -5.0f64..5.0) {
        let mut history = History::new(0);
        for (i, f) in std::iter::once(inc).chain(fs.iter().copied()).enumerate() {
            let p = Point::continuous(vec![i as f64]);
            history.push(p, EvalResult::from_raw(RawOutcome::Ok { f, g: vec![] }, 0, i as u64 + 1));
        }
        let barrier = BarrierState::from_history(&History::new(0), f64::INFINITY);
        let (_, barrier) = classify_and_update(&barrier, &history, &[0]);
        let polled: Vec<(usize, EvalResult)> = (1..history.len()).map(|i| (i, history.entries()[i].result.clone())).collect();
        let best = barrier.feasible.as_ref().unwrap().result.f;
        let all = select_extended(&barrier, &polled, f64::INFINITY);
        prop_assert_eq!(all.len(), polled.iter().filter(|(_, r)| r.f >= best).count());
        prop_assert!(select_extended(&barrier, &polled, -1.0).is_empty());
    }
}

#[test]
fn empty_batch_is_unsuccessful() {
    let h = History::new(0);
    let s = BarrierState::new();
    let (o, next) = classify_and_update(&s, &h, &[]);
    assert_eq!(o, Outcome::Unsuccessful);
    assert_eq!(next, s);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_respects_budget_and_barrier(
        name in prop::sample::select(vec!["cat-toy-c", "cat-g09", "cat-branin", "sphere", "cat-pentagon"]),
        seed in 0u64..1000,
        budget in 30u64..250,
        searches in any::<bool>(),
    ) {
        let mut c = SolverConfig::default().with_seed(seed).with_budget(budget);
        if !searches {
            c = c.poll_only();
        }
        let r = solve(make_problem(name).unwrap(), c).unwrap();
        prop_assert!(r.evaluations <= budget);
        prop_assert_eq!(r.history.len() as u64, r.evaluations);
        prop_assert!(check_barrier_laws(&r.trace.iterations).is_ok());
        if !searches {
            prop_assert!(r.trace.rows.iter().all(|row| row.iter == 0 || row.provenance.is_poll()));
        }
    }
}
