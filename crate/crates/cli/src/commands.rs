use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bjnl::graphmetrics::{
    metric_posteriors, write_histograms_csv, write_tests_csv, Adjacency, Metric,
};
use bjnl::inference::output::{
    write_differential_csv, write_differential_json, write_estimate_csv, write_estimate_json,
    write_json, write_selection_json,
};
use bjnl::inference::{diagnose as run_diagnostics, differential_strength_test, select_edges};
use bjnl::ingest::{
    load_matrix, write_condition_data, write_matrix_csv, ConditionEntry, Manifest, MANIFEST_VERSION,
};
use bjnl::simgen::{score_precisions, simulate as run_simulation, FlipRecord, GroundTruth, SimScenario};
use bjnl::{run_chain, Hyperparams, Link, TraceArchive};
use serde::{Deserialize, Serialize};

use crate::args::{DiagnoseArgs, EvalArgs, FitArgs, GlobalArgs, LinkArg, MetricsArgs, SimulateArgs};
use crate::metadata::{FailureRecord, RunMetadata, FORMAT_VERSION};
use crate::Failure;

type CmdResult = Result<(), Failure>;

/// File-name-safe form of a condition label.
fn slug(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn out_dir(global: &GlobalArgs, fallback: Option<&Path>) -> Result<PathBuf, Failure> {
    let dir = match (&global.out, fallback) {
        (Some(d), _) => d.clone(),
        (None, Some(f)) => f.to_path_buf(),
        (None, None) => return Err(Failure::usage("--out is required")),
    };
    fs::create_dir_all(&dir).map_err(bjnl::Error::from)?;
    Ok(dir)
}

#[derive(Debug, Serialize, Deserialize)]
struct TruthFile {
    format_version: u32,
    labels: Vec<String>,
    flips: Vec<FlipRecord>,
}

pub fn simulate(global: &GlobalArgs, args: &SimulateArgs) -> CmdResult {
    let path = args
        .scenario
        .as_ref()
        .or(global.config.as_ref())
        .ok_or_else(|| Failure::usage("simulate needs a scenario file"))?;
    let mut scenario = SimScenario::from_path(path)?;
    let mut meta_overrides = Vec::new();
    if let Some(s) = global.seed {
        scenario.seed = s;
        meta_overrides.push(format!("seed={s}"));
    }
    let (truth, data) = run_simulation(&scenario)?;
    let dir = out_dir(global, None)?;

    let mut conditions = Vec::new();
    for (g, label) in truth.labels.iter().enumerate() {
        let s = slug(label);
        write_matrix_csv(&dir.join(format!("truth_{s}.csv")), &truth.precision[g])?;
        let data_name = format!("data_{s}.json");
        write_condition_data(&dir.join(&data_name), &data[g])?;
        conditions.push(ConditionEntry {
            label: label.clone(),
            data: Some(PathBuf::from(data_name)),
        });
    }
    let manifest = Manifest {
        format_version: MANIFEST_VERSION,
        conditions,
        blocks: Vec::new(),
        prewhiten: true,
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    write_json(
        &dir.join("truth.json"),
        &TruthFile {
            format_version: FORMAT_VERSION,
            labels: truth.labels.clone(),
            flips: truth.flips.clone(),
        },
    )?;
    let mut meta = RunMetadata::new("simulate", scenario.seed);
    meta.inputs.push(path.display().to_string());
    meta.overrides = meta_overrides;
    meta.scenario = Some(scenario.clone());
    meta.write(&dir)?;
    println!("{}", serde_json::json!({ "seed": scenario.seed, "out": dir.display().to_string() }));
    Ok(())
}

fn resolve_hyperparams(
    global: &GlobalArgs,
    args: &FitArgs,
) -> Result<(Hyperparams, Vec<String>), Failure> {
    let mut hp = match &global.config {
        Some(p) => Hyperparams::from_path(p)?,
        None => Hyperparams::default(),
    };
    let mut overrides = Vec::new();
    if let Some(s) = global.seed {
        hp.seed = s;
        overrides.push(format!("seed={s}"));
    }
    if let Some(l) = args.link {
        hp.link = match l {
            LinkArg::Logistic => Link::Logistic,
            LinkArg::Probit => Link::Probit,
        };
        overrides.push(format!("link={}", hp.link.name()));
    }
    if let Some(n) = args.burnin {
        hp.n_burnin = n;
        overrides.push(format!("n_burnin={n}"));
    }
    if let Some(n) = args.iter {
        hp.n_iter = n;
        overrides.push(format!("n_iter={n}"));
    }
    if let Some(n) = args.thin {
        hp.thin = n;
        overrides.push(format!("thin={n}"));
    }
    hp.validate()?;
    Ok((hp, overrides))
}

pub fn fit(global: &GlobalArgs, args: &FitArgs) -> CmdResult {
    let (hp, overrides) = resolve_hyperparams(global, args)?;
    let manifest = Manifest::from_path(&args.manifest)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let (data, warnings) = manifest.resolve(base)?;
    for w in &warnings {
        eprintln!("{}", serde_json::json!({ "warning": w }));
    }
    let dir = out_dir(global, None)?;

    let mut meta = RunMetadata::new("fit", hp.seed);
    meta.inputs.push(args.manifest.display().to_string());
    meta.config_file = global.config.as_ref().map(|p| p.display().to_string());
    meta.overrides = overrides;
    meta.hyperparameters = Some(hp.clone());

    let start = Instant::now();
    let archive = match run_chain(&data, &hp) {
        Ok(a) => a,
        Err(e) => {
            let _ = fs::remove_dir_all(dir.join("archive"));
            meta.status = "failed".into();
            meta.wall_time_secs = Some(start.elapsed().as_secs_f64());
            meta.failure = Some(FailureRecord {
                kind: e.kind().into(),
                message: e.to_string(),
            });
            meta.write(&dir)?;
            return Err(e.into());
        }
    };
    let archive_dir = dir.join("archive");
    archive.write_dir(&archive_dir)?;

    let (estimates, report) = select_edges(&archive, &hp, args.fdr_target)?;
    if let Some(w) = &report.warning {
        eprintln!("{}", serde_json::json!({ "warning": w }));
    }
    for (g, est) in estimates.iter().enumerate() {
        let s = slug(&est.label);
        write_estimate_json(&dir.join(format!("estimate_{s}.json")), est, g)?;
        write_estimate_csv(&dir.join(format!("estimate_{s}.csv")), est, g)?;
        write_matrix_csv(&dir.join(format!("precision_{s}.csv")), &est.mean_precision)?;
        write_matrix_csv(&dir.join(format!("inclusion_{s}.csv")), &est.inclusion_prob)?;
    }
    write_selection_json(&dir.join("selection.json"), &report)?;
    let mut n_diff = 0;
    for g in 0..estimates.len() {
        for h in g + 1..estimates.len() {
            let rep = differential_strength_test(&archive, g, h, args.level, args.ess_corrected)?
                .with_set_difference(&estimates)?;
            let stem = format!(
                "differential_{}_{}",
                slug(&estimates[g].label),
                slug(&estimates[h].label)
            );
            write_differential_json(&dir.join(format!("{stem}.json")), &rep)?;
            write_differential_csv(&dir.join(format!("{stem}.csv")), &rep)?;
            n_diff += 1;
        }
    }
    meta.iterations = Some(hp.n_burnin + hp.n_iter);
    meta.wall_time_secs = Some(start.elapsed().as_secs_f64());
    meta.write(&dir)?;
    println!(
        "{}",
        serde_json::json!({
            "conditions": estimates.len(),
            "stored_draws": archive.len(),
            "selected_edges": estimates.iter().map(|e| e.adjacency.n_edges()).collect::<Vec<_>>(),
            "realized_fdr": report.realized_fdr,
            "differential_reports": n_diff,
        })
    );
    Ok(())
}

fn read_truth(truth_dir: &Path) -> Result<GroundTruth, Failure> {
    let tf: TruthFile = bjnl::inference::output::read_json(&truth_dir.join("truth.json"))
        .map_err(|e| Failure::usage(format!("cannot read truth.json: {e}")))?;
    let mut precision = Vec::new();
    let mut adjacency = Vec::new();
    for label in &tf.labels {
        let m = load_matrix(&truth_dir.join(format!("truth_{}.csv", slug(label))))?;
        if !m.is_square() {
            return Err(Failure::usage(format!("truth matrix for '{label}' is not square")));
        }
        adjacency.push(Adjacency::threshold(&m, 0.0));
        precision.push(m);
    }
    Ok(GroundTruth { labels: tf.labels, adjacency, precision, flips: tf.flips })
}

#[derive(Serialize)]
struct EvalRow<'a> {
    metric: &'a str,
    condition: String,
    value: Option<f64>,
}

pub fn eval(global: &GlobalArgs, args: &EvalArgs) -> CmdResult {
    let truth = read_truth(&args.truth_dir)?;
    let mut estimates = Vec::new();
    for label in &truth.labels {
        let path = args.fit_dir.join(format!("precision_{}.csv", slug(label)));
        if !path.exists() {
            return Err(Failure::usage(format!("missing estimate {}", path.display())));
        }
        let m = load_matrix(&path)?;
        if m.shape() != truth.precision[0].shape() {
            return Err(Failure::usage(format!(
                "estimate for '{label}' is {:?}, truth is {:?}",
                m.shape(),
                truth.precision[0].shape()
            )));
        }
        estimates.push(m);
    }
    let threshold = args
        .threshold
        .or_else(|| {
            RunMetadata::read(&args.fit_dir)
                .and_then(|m| m.hyperparameters)
                .map(|h| h.edge_threshold)
        })
        .unwrap_or(Hyperparams::default().edge_threshold);
    let scores = score_precisions(&truth, &estimates, threshold)?;
    let dir = out_dir(global, Some(&args.fit_dir))?;

    let csv_err = |e: csv::Error| Failure::from(bjnl::Error::Format(e.to_string()));
    let mut w = csv::Writer::from_path(dir.join("eval.csv")).map_err(csv_err)?;
    for (g, label) in truth.labels.iter().enumerate() {
        w.serialize(EvalRow { metric: "auc", condition: label.clone(), value: scores.auc[g] })
            .map_err(csv_err)?;
        w.serialize(EvalRow {
            metric: "l1_error_x100",
            condition: label.clone(),
            value: Some(100.0 * scores.l1[g]),
        })
        .map_err(csv_err)?;
        let mut roc = csv::Writer::from_path(dir.join(format!("roc_{}.csv", slug(label)))).map_err(csv_err)?;
        roc.write_record(["fpr", "tpr"]).map_err(csv_err)?;
        for &(f, t) in &scores.roc[g] {
            roc.write_record([format!("{f:?}"), format!("{t:?}")]).map_err(csv_err)?;
        }
        roc.flush().map_err(bjnl::Error::from)?;
    }
    for d in &scores.differential {
        let pair = format!("{}-{}", truth.labels[d.g], truth.labels[d.h]);
        w.serialize(EvalRow { metric: "diff_tpr", condition: pair.clone(), value: d.rates.tpr })
            .map_err(csv_err)?;
        w.serialize(EvalRow { metric: "diff_fpr", condition: pair, value: d.rates.fpr })
            .map_err(csv_err)?;
    }
    w.flush().map_err(bjnl::Error::from)?;
    println!(
        "{}",
        serde_json::json!({
            "auc": scores.auc,
            "l1_error_x100": scores.l1.iter().map(|x| 100.0 * x).collect::<Vec<_>>(),
            "differential": scores.differential.iter().map(|d| d.rates).collect::<Vec<_>>(),
        })
    );
    Ok(())
}

fn read_archive(fit_dir: &Path) -> Result<TraceArchive, Failure> {
    let dir = fit_dir.join("archive");
    if !dir.join("archive.json").exists() {
        return Err(Failure::usage(format!("no trace archive in {}", fit_dir.display())));
    }
    Ok(TraceArchive::read_dir(&dir)?)
}

#[derive(Serialize)]
struct MetricSummary {
    metric: &'static str,
    condition: String,
    defined_draws: usize,
    excluded_draws: usize,
    mean: Option<f64>,
    sd: Option<f64>,
}

pub fn metrics(global: &GlobalArgs, args: &MetricsArgs) -> CmdResult {
    let archive = read_archive(&args.fit_dir)?;
    let threshold = RunMetadata::read(&args.fit_dir)
        .and_then(|m| m.hyperparameters)
        .map(|h| h.edge_threshold)
        .unwrap_or(Hyperparams::default().edge_threshold);
    let posteriors = metric_posteriors(&archive, threshold, &Metric::ALL)?;
    let dir = out_dir(global, Some(&args.fit_dir))?;
    write_histograms_csv(&dir.join("metric_histograms.csv"), &posteriors, args.bins)?;
    write_tests_csv(&dir.join("metric_tests.csv"), &posteriors)?;
    let mut summary = Vec::new();
    for mp in &posteriors {
        for (g, label) in mp.labels.iter().enumerate() {
            let v = mp.defined(g);
            let (mean, sd) = if v.is_empty() {
                (None, None)
            } else {
                let (m, var) = bjnl::inference::stats::mean_var(&v);
                (Some(m), Some(var.sqrt()))
            };
            summary.push(MetricSummary {
                metric: mp.metric.name(),
                condition: label.clone(),
                defined_draws: v.len(),
                excluded_draws: mp.excluded[g],
                mean,
                sd,
            });
        }
    }
    write_json(
        &dir.join("metric_summary.json"),
        &serde_json::json!({ "format_version": FORMAT_VERSION, "threshold": threshold, "metrics": summary }),
    )?;
    println!("{}", serde_json::json!({ "metrics": posteriors.len(), "draws": archive.len() }));
    Ok(())
}

pub fn diagnose(global: &GlobalArgs, args: &DiagnoseArgs) -> CmdResult {
    let archive = read_archive(&args.fit_dir)?;
    let report = run_diagnostics(&archive, global.seed.unwrap_or(0))?;
    let dir = out_dir(global, Some(&args.fit_dir))?;
    write_json(
        &dir.join("diagnostics.json"),
        &serde_json::json!({ "format_version": FORMAT_VERSION, "report": report }),
    )?;
    println!(
        "{}",
        serde_json::json!({
            "stationary": report.n_stationary,
            "total": report.n_total,
            "fraction": report.fraction_stationary(),
        })
    );
    Ok(())
}
