use std::path::PathBuf;

use tiltrotor::harness::{load_scenario, metrics, metrics_from_csv, parse_scenario, read_csv, run, Scenario};

const BUNDLED: [&str; 4] = ["hover", "step", "press", "waypoints"];

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"))
}

fn bundled(name: &str) -> Scenario {
    load_scenario(scenario_path(name)).unwrap()
}

fn t_end(seg: &tiltrotor::harness::SegmentFile) -> f64 {
    use tiltrotor::harness::SegmentFile::*;
    match seg {
        Hold { t_end, .. } | Ramp { t_end, .. } | Press { t_end, .. } => *t_end,
    }
}

fn short(name: &str, duration: f64) -> Scenario {
    let mut f = bundled(name).to_file();
    f.duration = duration;
    f.metrics_window = f.metrics_window.min(duration / 2.0);
    // Keep segments up to the first one that reaches the new duration.
    let keep = f.trajectory.iter().position(|seg| t_end(seg) >= duration).map_or(f.trajectory.len(), |i| i + 1);
    f.trajectory.truncate(keep);
    if let Some(last) = f.trajectory.last_mut() {
        use tiltrotor::harness::SegmentFile::*;
        match last {
            Hold { t_end, .. } | Ramp { t_end, .. } | Press { t_end, .. } => *t_end = t_end.min(duration),
        }
    }
    tiltrotor::harness::validate(&f).unwrap()
}

#[test]
fn bundled_scenarios_round_trip_through_json() {
    for name in BUNDLED {
        let s = bundled(name);
        let again = parse_scenario(&s.to_json()).unwrap();
        assert_eq!(s, again, "{name}");
    }
}

#[test]
fn metrics_from_reread_csv_equal_in_memory() {
    for s in [short("waypoints", 2.0), bundled("press")] {
        let name = &s.name;
        let log = run(&s).unwrap();
        let csv = log.to_csv_string();
        let reread = read_csv(csv.as_bytes()).unwrap();
        assert_eq!(reread, log.records, "{name}");
        let direct = metrics(&log.records, s.metrics_window).unwrap();
        assert_eq!(metrics_from_csv(csv.as_bytes(), s.metrics_window).unwrap(), direct);
    }
}

#[test]
fn seed_changes_noisy_runs_only() {
    let s = short("waypoints", 1.0);
    let a = run(&s).unwrap().to_csv_string();
    let b = run(&s.clone().with_seed(s.seed + 1)).unwrap().to_csv_string();
    assert_ne!(a, b);

    let quiet = short("step", 1.0);
    let c = run(&quiet).unwrap().to_csv_string();
    let d = run(&quiet.clone().with_seed(99)).unwrap().to_csv_string();
    assert_eq!(c, d);
}

#[test]
fn rate_override_changes_tick_count() {
    let s = short("hover", 1.0).with_rate(100.0).unwrap();
    let log = run(&s).unwrap();
    assert_eq!(log.records.len(), 100);
    assert_eq!(log.dt, 0.01);
    assert!(short("hover", 1.0).with_rate(0.0).is_err());
}

#[test]
fn first_ticks_use_truth_until_a_frame_arrives() {
    let s = short("waypoints", 0.5);
    let log = run(&s).unwrap();
    let latency_ticks = (s.perception.latency * s.rate_hz).round() as usize;
    assert!(log.records[..latency_ticks].iter().all(|r| r.perception_id.is_none()));
    assert!(log.records[latency_ticks..].iter().all(|r| r.perception_id.is_some()));
}

#[test]
fn press_holds_contact_only_after_approach() {
    let s = bundled("press");
    let log = run(&s).unwrap();
    let early = log.records.iter().take_while(|r| r.t < 1.0);
    assert!(early.into_iter().all(|r| r.contact_t.norm() == 0.0));
    assert!(log.records.last().unwrap().contact_t.norm() > 0.9);
    assert!(log.records.iter().all(|r| !r.saturated));
}

#[test]
fn fuzz_corpus_seeds_do_not_panic() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    for entry in std::fs::read_dir(root.join("scenario_parse")).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let s = parse_scenario(&text).unwrap();
        assert_eq!(parse_scenario(&s.to_json()).unwrap(), s);
    }
    for entry in std::fs::read_dir(root.join("log_csv")).unwrap() {
        let bytes = std::fs::read(entry.unwrap().path()).unwrap();
        let _ = metrics_from_csv(&bytes, 1.0);
    }
}
