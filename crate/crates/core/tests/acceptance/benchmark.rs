//! Desk-scale Erdos-Renyi benchmark shared by the structure-recovery, FDR,
//! link-robustness and positive-definiteness criteria.

use std::sync::OnceLock;

use bjnl::simgen::{run_replicate, ReplicateResult, SimScenario};
use bjnl::{Hyperparams, Link};

use crate::report::verdict;

pub const REPLICATES: usize = 10;

pub struct Benchmark {
    pub logistic: Vec<ReplicateResult>,
    pub probit: Vec<ReplicateResult>,
}

fn run(link: Link) -> Vec<ReplicateResult> {
    let scenario = SimScenario::default();
    let hp = Hyperparams {
        n_burnin: 500,
        n_iter: 2000,
        link,
        ..Hyperparams::default()
    };
    (0..REPLICATES)
        .map(|r| run_replicate(&scenario, &hp, r).expect("replicate runs"))
        .collect()
}

pub fn benchmark() -> &'static Benchmark {
    static CELL: OnceLock<Benchmark> = OnceLock::new();
    CELL.get_or_init(|| {
        let scenario = SimScenario::default();
        assert_eq!(
            (scenario.p, scenario.n_conditions, scenario.flip_fraction, scenario.n_subjects, scenario.t_points),
            (40, 2, 0.5, 10, 100)
        );
        Benchmark { logistic: run(Link::Logistic), probit: run(Link::Probit) }
    })
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.into_iter().collect();
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn mean_auc(results: &[ReplicateResult]) -> f64 {
    mean(results.iter().map(|r| r.scores.mean_auc().expect("both classes present")))
}

pub fn structure_recovery() {
    let res = &benchmark().logistic;
    let auc = mean_auc(res);
    let tpr = mean(res.iter().map(|r| r.scores.differential[0].rates.tpr.expect("true differential edges")));
    let fpr = mean(res.iter().map(|r| r.scores.differential[0].rates.fpr.expect("non-differential pairs")));
    verdict(
        "desk-scale benchmark",
        auc >= 0.90 && tpr >= 0.70 && fpr <= 0.05,
        &format!("mean AUC {auc:.4} (>= 0.90), differential TPR {tpr:.4} (>= 0.70), FPR {fpr:.4} (<= 0.05)"),
    );
}

pub fn l1_error_beats_diagonal_baseline() {
    let res = &benchmark().logistic;
    let fitted = mean(res.iter().flat_map(|r| r.scores.l1.clone()));
    let diagonal = mean(res.iter().flat_map(|r| r.l1_diagonal.clone()));
    verdict(
        "L1 error vs diagonal estimator",
        fitted < diagonal,
        &format!("mean L1 x100: fitted {:.3}, diagonal {:.3}", 100.0 * fitted, 100.0 * diagonal),
    );
}

pub fn fdr_control() {
    let res = &benchmark().logistic;
    let estimated: Vec<f64> = res.iter().map(|r| r.estimated_fdr.rate().unwrap_or(0.0)).collect();
    let realized: Vec<f64> = res.iter().map(|r| r.realized_fdp.unwrap_or(0.0)).collect();
    let ok_est = estimated.iter().filter(|&&x| x <= 0.05).count();
    let ok_real = realized.iter().filter(|&&x| x <= 0.05).count();
    verdict(
        "FDR control",
        ok_est >= 9 && ok_real >= 9,
        &format!(
            "posterior FDR <= 0.05 in {ok_est}/10 (max {:.4}); false discovery proportion vs truth <= 0.05 in {ok_real}/10 (max {:.4})",
            estimated.iter().cloned().fold(0.0, f64::max),
            realized.iter().cloned().fold(0.0, f64::max)
        ),
    );
}

pub fn link_robustness() {
    let b = benchmark();
    let (lo, pr) = (mean_auc(&b.logistic), mean_auc(&b.probit));
    verdict(
        "link robustness",
        (lo - pr).abs() <= 0.02,
        &format!("mean AUC logistic {lo:.4}, probit {pr:.4}, difference {:.4} (<= 0.02)", (lo - pr).abs()),
    );
}
