//! The subcommands. Each one is a pure function of its configuration and
//! input files and returns the paths it wrote.

use std::path::{Path, PathBuf};

use arbary::centroid::{derive_seed, CentroidProblem};
use arbary::classify::{evaluate, fit_centroids, metrics_table, LabeledPsdSet, Method};
use arbary::spectral::{arithmetic_mean_centroid, build_cost, make_grid};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{read_set, render_columns, render_set, write_file};
use crate::synth::synthesize;

fn required<'a>(path: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, CliError> {
    path.as_deref()
        .ok_or_else(|| CliError::Usage(format!("no {key} file given (--{key} or `{key} = ...`)")))
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn emit(cfg: &RunConfig, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let path = cfg.out_dir.join(name);
    write_file(&path, contents)?;
    written.push(path);
    Ok(())
}

fn problem(cfg: &RunConfig, set: &LabeledPsdSet) -> Result<CentroidProblem, CliError> {
    let grid = set.psds()[0].grid();
    Ok(CentroidProblem::new(set.psds(), &build_cost(&grid), &cfg.optimizer())?)
}

fn input_set(cfg: &RunConfig) -> Result<LabeledPsdSet, CliError> {
    let set = read_set(required(&cfg.input, "input")?)?;
    if set.is_empty() {
        return Err(CliError::Data("input set is empty".into()));
    }
    Ok(set)
}

/// Writes `train.json` (seed stream 0) and, unless `synth_test_per_class`
/// is zero, `test.json` (seed stream 1).
pub fn synth(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let grid = make_grid(cfg.n_bins)?;
    let mut written = Vec::new();
    let splits = [
        ("train.json", cfg.synth_train_per_class, 0),
        ("test.json", cfg.synth_test_per_class, 1),
    ];
    for (name, count, stream) in splits {
        if count == 0 {
            continue;
        }
        let set = synthesize(&cfg.synth_spec(count, derive_seed(cfg.seed, stream)), &grid)?;
        emit(cfg, name, &render_set(&set), &mut written)?;
    }
    Ok(written)
}

/// Arithmetic mean, free barycenter and (optionally) OT-P centroid of the
/// input set: `barycenter.csv` holds the spectra, `costs.csv` their average
/// entropic cost to the set.
pub fn barycenter(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let set = input_set(cfg)?;
    let prob = problem(cfg, &set)?;
    let grid = set.psds()[0].grid();
    let mean = arithmetic_mean_centroid(prob.targets())?;
    let free = prob.free_barycenter()?.psd.clone();
    let mean_cost = prob.solver().barycenter_objective(&mean, prob.targets())?.0;
    let free_cost = prob.free_barycenter_objective()?;

    let mut header = vec!["omega", "mean", "otbc"];
    let mut columns = vec![grid.points(), mean.mass().to_vec(), free.mass().to_vec()];
    let mut cost_header = vec!["mean", "otbc"];
    let mut costs = vec![vec![mean_cost], vec![free_cost]];
    let mut written = Vec::new();
    if cfg.barycenter_otp {
        let report = prob.multi_start_fit(&cfg.strategies()?)?;
        let best = report.best_run();
        header.push("otp");
        columns.push(best.psd.mass().to_vec());
        cost_header.push("otp");
        costs.push(vec![best.objective]);
        emit(cfg, "fit.json", &json_text(&report.to_json()), &mut written)?;
    }
    emit(cfg, "barycenter.csv", &render_columns(&header, &columns), &mut written)?;
    emit(cfg, "costs.csv", &render_columns(&cost_header, &costs), &mut written)?;
    Ok(written)
}

/// Average entropic cost against the model order: `sweep.csv` with columns
/// `P, cost_otbc, cost_ywinit, cost_otp`, plus every multi-start report in
/// `sweep.json`.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let set = input_set(cfg)?;
    let prob = problem(cfg, &set)?;
    let (rows, reports) = prob.order_sweep(&cfg.orders, &cfg.strategies()?)?;
    let columns = vec![
        rows.iter().map(|r| r.order as f64).collect(),
        rows.iter().map(|r| r.otbc).collect(),
        rows.iter().map(|r| r.yw_init).collect(),
        rows.iter().map(|r| r.otp).collect(),
    ];
    let mut written = Vec::new();
    emit(
        cfg,
        "sweep.csv",
        &render_columns(&["P", "cost_otbc", "cost_ywinit", "cost_otp"], &columns),
        &mut written,
    )?;
    let reports: Vec<_> = rows
        .iter()
        .zip(&reports)
        .map(|(r, rep)| json!({"order": r.order, "report": rep.to_json()}))
        .collect();
    emit(cfg, "sweep.json", &json_text(&json!(reports)), &mut written)?;
    Ok(written)
}

/// Multi-start OT-P fit of the input set: `fit.json` and the fitted
/// spectrum as `fit.csv`.
pub fn fit(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let set = input_set(cfg)?;
    let prob = problem(cfg, &set)?;
    let report = prob.multi_start_fit(&cfg.strategies()?)?;
    let mut written = Vec::new();
    emit(cfg, "fit.json", &json_text(&report.to_json()), &mut written)?;
    emit(cfg, "fit.csv", &crate::io::render_psd(&report.best_run().psd), &mut written)?;
    Ok(written)
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

/// Nearest-centroid classification with each configured method:
/// `report.json`, `table.txt` and `confusion_<method>.csv`.
pub fn classify(cfg: &RunConfig, allow_same: bool) -> Result<Vec<PathBuf>, CliError> {
    let train_path = required(&cfg.train, "train")?;
    let test_path = required(&cfg.test, "test")?;
    if !allow_same && same_file(train_path, test_path) {
        return Err(CliError::Usage(
            "train and test are the same file; pass --allow-same to proceed".into(),
        ));
    }
    let methods = cfg.methods()?;
    let classifier = cfg.classifier()?;
    let train = read_set(train_path)?;
    let test = read_set(test_path)?;
    if train.is_empty() || test.is_empty() {
        return Err(CliError::Data("train and test sets must be nonempty".into()));
    }
    if train.psds()[0].grid() != test.psds()[0].grid() {
        return Err(CliError::Data("train and test use different grids".into()));
    }
    let cost = build_cost(&train.psds()[0].grid());

    let mut reports = Vec::new();
    let mut entries = Vec::new();
    let mut written = Vec::new();
    for method in methods {
        let bank = fit_centroids(&train, method, &cost, &classifier)?;
        let report = evaluate(&test, &bank)?;
        let mut entry = report.to_json();
        if let Some(fits) = bank.fits() {
            entry["centroid_fits"] = json!(fits);
        }
        entries.push(entry);
        emit(cfg, &format!("confusion_{}.csv", method.name()), &report.confusion_csv(), &mut written)?;
        reports.push(report);
    }
    let table = metrics_table(&reports);
    emit(cfg, "table.txt", &table, &mut written)?;
    let doc = json!({
        "direction": classifier.direction,
        "model_order": cfg.model_order,
        "methods": reports.iter().map(|r| r.method.clone()).collect::<Vec<_>>(),
        "reports": entries,
    });
    emit(cfg, "report.json", &json_text(&doc), &mut written)?;
    Ok(written)
}

/// Name of every method, for help text.
pub fn method_names() -> String {
    Method::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
}
