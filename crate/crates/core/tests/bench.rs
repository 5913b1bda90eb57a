use std::path::Path;

use catmads::bench::emit::{svg, write_csv};
use catmads::bench::profile::data_profiles;
use catmads::bench::{
    instance_seeds, run_campaign, store_digest, BudgetRule, CatMads, SolverAdapter, TraceStore,
};
use catmads::solver::SolverConfig;

fn configs() -> Vec<Box<dyn SolverAdapter>> {
    vec![
        Box::new(CatMads::new("base", SolverConfig::default())),
        Box::new(CatMads::new(
            "no-ext",
            SolverConfig::default().with_xi(-1.0),
        )),
        Box::new(CatMads::new("poll", SolverConfig::default().poll_only())),
    ]
}

fn campaign(out: &Path) -> catmads::bench::CampaignReport {
    let problems = vec!["cat-branin".to_string(), "cat-toy-c".to_string()];
    run_campaign(
        &problems,
        &configs(),
        &instance_seeds(3, 5),
        BudgetRule::PerVariable(40),
        out,
    )
    .unwrap()
}

#[test]
fn campaign_cardinality_shared_doe_and_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let report = campaign(dir.path());
    assert_eq!(report.runs, 30);
    assert!(report.failures.is_empty());
    let store = TraceStore::load(dir.path()).unwrap();
    assert_eq!(store.traces.len(), 30);
    assert_eq!(store_digest(dir.path()).unwrap(), report.digest);

    for inst in &store.manifest.instances {
        let doe = (0.2 * inst.budget as f64).ceil() as usize;
        let first = |s: &str| -> Vec<String> {
            store.trace(s, &inst.problem, inst.seed).unwrap()[..doe]
                .iter()
                .map(|r| r.point_json.clone())
                .collect()
        };
        assert_eq!(first("base"), first("no-ext"));
        assert_eq!(first("base"), first("poll"));
    }

    let taus = [1e-1, 1e-3, 1e-5];
    let set = data_profiles(&store, &taus, &|_| None).unwrap();
    assert_eq!(set.curves.len(), 9);
    let mut csv = Vec::new();
    write_csv(&set.curves, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(
        text.lines().count() - 1,
        3 * 3 * (set.kappa_max as usize + 1)
    );
    for c in &set.curves {
        assert!(c.fraction.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(
            *c.fraction.last().unwrap(),
            c.solved() as f64 / set.instances.len() as f64
        );
    }
    // τ-solved sets grow with τ
    for s in ["base", "no-ext", "poll"] {
        let ks: Vec<&Vec<Option<u64>>> = set
            .curves
            .iter()
            .filter(|c| c.solver == s)
            .map(|c| &c.k)
            .collect();
        for i in 0..set.instances.len() {
            for w in ks.windows(2) {
                if let Some(tight) = w[1][i] {
                    assert!(w[0][i].is_some_and(|loose| loose <= tight));
                }
            }
        }
    }

    let doc = svg(&set.curves);
    let xml = roxmltree::Document::parse(&doc).expect("well-formed svg");
    let panels: Vec<_> = xml
        .descendants()
        .filter(|n| n.attribute("class") == Some("panel"))
        .collect();
    assert_eq!(panels.len(), 3);
    for p in panels {
        assert_eq!(
            p.descendants()
                .filter(|n| n.has_tag_name("polyline"))
                .count(),
            3
        );
    }
    assert!(doc.contains("groups of (n+1) evaluations"));
    assert!(doc.contains("portion of τ-solved instances"));
}

#[test]
fn campaign_digest_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(campaign(a.path()).digest, campaign(b.path()).digest);
}

#[test]
fn failing_runs_are_recorded() {
    struct Broken;
    impl SolverAdapter for Broken {
        fn name(&self) -> &str {
            "broken"
        }
        fn settings(&self) -> serde_json::Value {
            serde_json::Value::Null
        }
        fn run(
            &self,
            _p: catmads::blackbox::ProblemSpec,
            _i: &catmads::bench::Instance,
        ) -> catmads::Result<String> {
            Err(catmads::Error::External("refused".into()))
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let solvers: Vec<Box<dyn SolverAdapter>> = vec![
        Box::new(Broken),
        Box::new(CatMads::new("ok", SolverConfig::default())),
    ];
    let r = run_campaign(
        &["cat-branin".into()],
        &solvers,
        &[0, 1],
        BudgetRule::Fixed(60),
        dir.path(),
    )
    .unwrap();
    assert_eq!(r.runs, 4);
    assert_eq!(r.failures.len(), 2);
    let store = TraceStore::load(dir.path()).unwrap();
    assert_eq!(store.traces.len(), 2);
    assert_eq!(store.manifest.failures.len(), 2);
}
