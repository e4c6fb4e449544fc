use eigenbound::harness::report::{from_csv, to_csv, CSV_HEADER};
use eigenbound::harness::{exit_code, library, lookup, run_selection, RunSelection, Suite, Verdict};

fn small(name: &str, ladder: &[usize]) -> RunSelection {
    let mut sel = RunSelection::scenario(name, None);
    sel.ladder = Some(ladder.to_vec());
    sel
}

#[test]
fn every_library_scenario_validates() {
    for sc in library().unwrap() {
        sc.validate().unwrap_or_else(|e| panic!("{}: {e}", sc.name));
    }
}

#[test]
fn boundary_rejection_counts_only_in_suite_mode() {
    let single = run_selection(&small("equidistant-t0.5h", &[10, 20]), Some(1)).unwrap();
    let had: Vec<_> = single.reports.iter().filter(|r| r.check == "hadamard").collect();
    assert!(had.iter().all(|r| r.verdict == Verdict::Rejected && !r.expected_rejection));
    assert_eq!(single.exit_code(), 2);

    let mut sel = RunSelection::suite(Suite::Hadamard);
    sel.ladder = Some(vec![10, 20]);
    let suite = run_selection(&sel, Some(1)).unwrap();
    let boundary: Vec<_> = suite.reports.iter().filter(|r| r.scenario == "equidistant-t0.5h").collect();
    assert!(!boundary.is_empty());
    assert!(boundary.iter().all(|r| r.expected_rejection));
}

#[test]
fn radius_override_changes_the_ball() {
    let mut sel = small("cylinder", &[12, 24]);
    sel.radius = Some(0.4);
    let run = run_selection(&sel, Some(1)).unwrap();
    assert!(run.reports.iter().all(|r| r.radius.is_none() || r.radius == Some(0.4)));
    assert_eq!(run.exit_code(), 0, "{:#?}", run.reports);
}

#[test]
fn rejects_bad_selections() {
    assert!(run_selection(&small("interval", &[20, 10]), None).is_err());
    assert!(run_selection(&small("interval", &[2, 10]), None).is_err());
    assert!(run_selection(&RunSelection::scenario("no-such-scenario", None), None).is_err());
    let mut sel = RunSelection::suite(Suite::Ball);
    sel.radius = Some(1.0);
    assert!(run_selection(&sel, None).is_err());
    assert!(lookup("no-such-scenario").is_err());
}

#[test]
fn csv_round_trips_rows() {
    let run = run_selection(&small("interval", &[20, 40, 80]), Some(1)).unwrap();
    let csv = to_csv(&run.reports);
    assert!(csv.starts_with(CSV_HEADER));
    let rows = from_csv(&csv).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.scenario == "interval" && r.check == "calibration"));
    assert_eq!(exit_code(&run.reports), 0);
}

#[test]
fn thread_count_does_not_change_reports() {
    let mut sel = RunSelection::suite(Suite::Hessian);
    sel.ladder = None;
    let a = run_selection(&sel, Some(1)).unwrap().to_json().unwrap();
    let b = run_selection(&sel, Some(3)).unwrap().to_json().unwrap();
    assert_eq!(a, b);
}
