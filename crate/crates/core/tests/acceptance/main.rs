//! Acceptance suite. Every check prints one `PASS` or `FAIL` line; the
//! process exits nonzero if any check fails.

mod benchmark;
mod geweke;
mod invariants;
mod oracles;
mod planted;
mod quadrature;
mod report;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::Ordering;
use std::time::Instant;

fn main() {
    let checks: &[(&str, fn())] = &[
        ("quadrature rule", quadrature::quadrature_rule_integrates_known_functions),
        ("quadrature oracle", quadrature::inclusion_matches_quadrature),
        ("graph-metric oracles", oracles::graph_metric_oracles),
        ("AUC oracle", oracles::auc_oracle),
        ("flip count preservation", invariants::flip_count_preservation),
        ("double-exponential scale mixture", invariants::double_exponential_scale_mixture),
        ("logistic shift invariance", invariants::logistic_shift_invariance),
        ("BH monotonicity", invariants::bh_monotonicity),
        ("desk-scale benchmark", benchmark::structure_recovery),
        ("FDR control", benchmark::fdr_control),
        ("link robustness", benchmark::link_robustness),
        ("L1 error vs diagonal estimator", benchmark::l1_error_beats_diagonal_baseline),
        ("positive definiteness", invariants::positive_definite_every_sweep),
        ("planted differential edge", planted::planted_differential_edge),
        ("planted topology dominance", planted::planted_topology_dominance),
        ("prior recovery", geweke::prior_recovery),
    ];
    let start = Instant::now();
    for (name, check) in checks {
        let t = Instant::now();
        if catch_unwind(AssertUnwindSafe(check)).is_err() {
            report::verdict(name, false, "check panicked");
        }
        eprintln!("  ({name}: {:.1}s)", t.elapsed().as_secs_f64());
    }
    let failed = report::FAILED.load(Ordering::SeqCst);
    println!(
        "acceptance: {} checks, {failed} failed, {:.0}s",
        checks.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
