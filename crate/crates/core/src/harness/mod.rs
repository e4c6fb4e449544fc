//! Scenario library and verification pipelines: every closed-form bound is
//! confronted with an independently computed discrete `lambda_1`.

pub mod oracles;
pub mod report;
pub mod scenario;
pub mod suite;
pub mod verify;

pub use report::{exit_code, EigenBoundReport, RungReport, Verdict};
pub use scenario::{library, lookup, scenario_names, CheckKind, Geometry, HadamardData, Scenario};
pub use suite::{run_selection, RunSelection, Suite, SuiteRun, Timing};
pub use verify::{
    euclidean_nogo_scan, field_extremes, main_lemma_report, verify_ball_theorem, verify_calibration,
    verify_exhaustion, verify_hadamard_corollary, verify_hessian_comparison, verify_main_lemma, FieldKind,
};
