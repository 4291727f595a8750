use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use susco::auction::{update_failure, DishReputation};
use susco::baselines::SchemeChoice;
use susco::constellation::{DishId, IslEdge, RoutePath, SatelliteId, TopologySnapshot, Vec3};
use susco::sim::{
    run_scenario, select_platform_satellite, write_outputs, ScenarioConfig, Simulation,
};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn telesat(intervals: u32) -> ScenarioConfig {
    let mut c = ScenarioConfig::from_file(&configs().join("telesat.toml")).unwrap();
    c.num_intervals = intervals;
    c
}

#[test]
fn same_seed_same_run() {
    let c = telesat(8);
    let a = run_scenario(&c).unwrap();
    let b = run_scenario(&c).unwrap();
    assert_eq!(a.metrics, b.metrics);
    assert_eq!(a.transcript, b.transcript);

    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    write_outputs(dirs[0].path(), &a, Some(&c)).unwrap();
    write_outputs(dirs[1].path(), &b, Some(&c)).unwrap();
    for f in ["metrics.csv", "transcript.csv"] {
        assert_eq!(
            std::fs::read(dirs[0].path().join(f)).unwrap(),
            std::fs::read(dirs[1].path().join(f)).unwrap()
        );
    }
}

#[test]
fn every_task_is_accounted_for() {
    for scheme in SchemeChoice::ALL {
        let mut c = telesat(10);
        c.scheme = scheme;
        let r = run_scenario(&c).unwrap();
        for m in &r.metrics {
            assert_eq!(m.tasks_offloaded + m.tasks_unserved, m.tasks_total, "{scheme} {}", m.interval);
            assert!(m.tasks_failed <= m.tasks_offloaded);
            assert!(m.total_payment <= m.total_budget * (1.0 + 1e-9));
            let rows = r.transcript.iter().filter(|t| t.interval == m.interval).count();
            assert_eq!(rows as u32, m.tasks_total);
        }
    }
}

#[test]
fn no_traffic_no_tasks() {
    let mut c = telesat(3);
    c.tasks.source_rate = 0.0;
    let r = run_scenario(&c).unwrap();
    assert!(r.transcript.is_empty());
    assert!(r.metrics.iter().all(|m| m.tasks_total == 0 && m.total_payment == 0.0));
}

#[test]
fn schemes_face_the_same_tasks() {
    let ids = |scheme| {
        let mut c = telesat(6);
        c.scheme = scheme;
        run_scenario(&c)
            .unwrap()
            .transcript
            .iter()
            .map(|t| (t.interval, t.task_id))
            .collect::<Vec<_>>()
    };
    let reference = ids(SchemeChoice::Susco);
    assert!(!reference.is_empty());
    for s in [SchemeChoice::Service, SchemeChoice::Smtsn, SchemeChoice::Falcon] {
        assert_eq!(ids(s), reference, "{s}");
    }
}

#[test]
fn each_source_sends_rate_times_interval() {
    let c = telesat(5);
    let sim = Simulation::new(c.clone()).unwrap();
    let per_source = c.tasks.source_rate * c.interval_length;
    assert_eq!(per_source, 18_000.0);
    for tau in 0..5 {
        let snap = sim.snapshot(tau).unwrap();
        let tasks = sim.tasks_for(&snap, 0);
        assert!(!tasks.is_empty());
        // consecutive tasks from one source share their endpoints
        let mut runs: Vec<f64> = Vec::new();
        let mut last = None;
        for t in &tasks {
            let pair = (t.source_endpoint, t.destination_endpoint);
            if last != Some(pair) {
                runs.push(0.0);
                last = Some(pair);
            }
            *runs.last_mut().unwrap() += t.task.data_amount;
        }
        for sum in runs {
            let k = (sum / per_source).round();
            assert!(k >= 1.0 && (sum - k * per_source).abs() < 1e-6, "run sums to {sum}");
        }
    }
}

fn reputations_from_transcript(sim: &Simulation) -> BTreeMap<DishId, DishReputation> {
    let mut reps: BTreeMap<DishId, DishReputation> = BTreeMap::new();
    for row in sim.transcript() {
        let failed: BTreeSet<u32> = match row.outcome.strip_prefix("failed:") {
            Some(list) => list.split('+').map(|d| d.parse().unwrap()).collect(),
            None if row.outcome == "success" => BTreeSet::new(),
            None => continue,
        };
        for d in row.winner_key.split('+') {
            let d: u32 = d.parse().unwrap();
            let rep = reps.entry(DishId(d)).or_default();
            *rep = update_failure(*rep, true, failed.contains(&d));
        }
    }
    reps
}

#[test]
fn always_failing_dishes_learn_full_failure() {
    let mut c = telesat(6);
    c.reliability.reliable_failure_rate = Some(1.0);
    let mut sim = Simulation::new(c).unwrap();
    sim.run().unwrap();
    let winners: BTreeSet<DishId> = reputations_from_transcript(&sim).keys().copied().collect();
    assert!(!winners.is_empty());
    for (id, rep) in &sim.state().reputations {
        if winners.contains(id) {
            assert_eq!(rep.failure_est, 1.0, "dish {id}");
            assert!(rep.win_count > 0);
        } else {
            assert_eq!(*rep, DishReputation::default());
        }
    }
    assert!(sim.transcript().iter().all(|r| !r.outcome.starts_with("success")));
}

#[test]
fn reputations_follow_the_transcript() {
    let mut c = telesat(15);
    c.reliability.unreliable_fraction = 0.3;
    c.reliability.unreliable_failure_rate = 0.5;
    let mut sim = Simulation::new(c).unwrap();
    sim.run().unwrap();
    let rebuilt = reputations_from_transcript(&sim);
    for (id, rep) in &sim.state().reputations {
        let want = rebuilt.get(id).copied().unwrap_or_default();
        assert_eq!(rep.win_count, want.win_count, "dish {id}");
        assert!((rep.failure_est - want.failure_est).abs() < 1e-12, "dish {id}");
    }
}

#[test]
fn platform_is_first_relay_that_sees_a_dish() {
    let n = 5;
    let mut vis = vec![BTreeSet::new(); n];
    vis[2].insert(DishId(0));
    vis[4].insert(DishId(0));
    let edges = (0..4)
        .map(|i| IslEdge { a: SatelliteId(i), b: SatelliteId(i + 1), latency_ms: 1.0 })
        .collect();
    let snap = TopologySnapshot::build_from_parts(
        0,
        0.0,
        vec![Vec3::new(7000.0, 0.0, 0.0); n],
        [(DishId(0), Vec3::new(6371.0, 0.0, 0.0))].into_iter().collect(),
        edges,
        vis,
        Vec3::new(1.0, 0.0, 0.0),
    )
    .unwrap();
    let path = |ids: &[u32]| RoutePath {
        sats: ids.iter().map(|&i| SatelliteId(i)).collect(),
        hop_latencies: vec![1.0; ids.len() - 1],
    };
    assert_eq!(select_platform_satellite(&path(&[0, 1, 2, 3, 4]), &snap), Some(SatelliteId(2)));
    // the destination itself never serves as platform
    assert_eq!(select_platform_satellite(&path(&[0, 1, 4]), &snap), None);
    assert_eq!(select_platform_satellite(&path(&[4, 3, 2]), &snap), Some(SatelliteId(4)));
    assert_eq!(select_platform_satellite(&path(&[2]), &snap), None);
}
