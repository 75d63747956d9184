//! Nearest-centroid classification of spectra and the evaluation metrics.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ar::ArModel;
use crate::centroid::{CentroidProblem, InitStrategy, MultiStartReport, OptimizerConfig};
use crate::error::{Error, Result};
use crate::ot::Sinkhorn;
use crate::spectral::{arithmetic_mean_centroid, baseline_distance, BaselineKind, GroundCost, Psd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "IS")]
    Is,
    #[serde(rename = "KL")]
    Kl,
    #[serde(rename = "L2")]
    L2,
    #[serde(rename = "OT-BC")]
    OtBc,
    #[serde(rename = "OT-P")]
    OtP,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Is, Method::Kl, Method::L2, Method::OtBc, Method::OtP];

    pub fn name(self) -> &'static str {
        match self {
            Method::Is => "IS",
            Method::Kl => "KL",
            Method::L2 => "L2",
            Method::OtBc => "OT-BC",
            Method::OtP => "OT-P",
        }
    }

    fn baseline(self) -> Option<BaselineKind> {
        match self {
            Method::Is => Some(BaselineKind::Is),
            Method::Kl => Some(BaselineKind::Kl),
            Method::L2 => Some(BaselineKind::L2),
            Method::OtBc | Method::OtP => None,
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "is" => Ok(Method::Is),
            "kl" => Ok(Method::Kl),
            "l2" => Ok(Method::L2),
            "ot-bc" | "otbc" => Ok(Method::OtBc),
            "ot-p" | "otp" => Ok(Method::OtP),
            _ => Err(Error::invalid(format!(
                "unknown method '{s}' (expected IS, KL, L2, OT-BC or OT-P)"
            ))),
        }
    }
}

/// Argument order of the asymmetric baseline divergences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `D(test || centroid)`.
    #[default]
    TestToCentroid,
    /// `D(centroid || test)`.
    CentroidToTest,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "test_to_centroid" => Ok(Direction::TestToCentroid),
            "centroid_to_test" => Ok(Direction::CentroidToTest),
            _ => Err(Error::invalid(format!(
                "unknown direction '{s}' (expected test_to_centroid or centroid_to_test)"
            ))),
        }
    }
}

/// Spectra with class labels. Spectra are stored normalized; `classes`
/// lists the distinct labels in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPsdSet {
    psds: Vec<Psd>,
    labels: Vec<String>,
    classes: Vec<String>,
}

impl LabeledPsdSet {
    pub fn new(psds: Vec<Psd>, labels: Vec<String>) -> Result<Self> {
        if psds.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} spectra but {} labels",
                psds.len(),
                labels.len()
            )));
        }
        if let Some(first) = psds.first() {
            for p in &psds {
                first.check_same_grid(p)?;
            }
        }
        let psds = psds
            .iter()
            .map(Psd::normalize)
            .collect::<Result<Vec<_>>>()?;
        let mut classes: Vec<String> = Vec::new();
        for l in &labels {
            if !classes.contains(l) {
                classes.push(l.clone());
            }
        }
        Ok(Self {
            psds,
            labels,
            classes,
        })
    }

    pub fn len(&self) -> usize {
        self.psds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psds.is_empty()
    }

    pub fn psds(&self) -> &[Psd] {
        &self.psds
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn members(&self, class: &str) -> Vec<Psd> {
        self.psds
            .iter()
            .zip(&self.labels)
            .filter(|(_, l)| *l == class)
            .map(|(p, _)| p.clone())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    /// Solver and descent settings; `model_order` is the OT-P order.
    pub optimizer: OptimizerConfig,
    /// Multi-start portfolio for OT-P centroids.
    pub strategies: Vec<InitStrategy>,
    pub direction: Direction,
}

/// Summary of one OT-P class fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFit {
    pub model: ArModel,
    pub objective: f64,
    pub suboptimality_gap: f64,
}

#[derive(Debug, Clone)]
pub struct CentroidBank {
    method: Method,
    classes: Vec<String>,
    centroids: Vec<Psd>,
    fits: Option<Vec<ClassFit>>,
    reports: Option<Vec<MultiStartReport>>,
    config: ClassifierConfig,
    solver: Option<Sinkhorn>,
}

/// One centroid per class of `train`.
pub fn fit_centroids(
    train: &LabeledPsdSet,
    method: Method,
    cost: &GroundCost,
    config: &ClassifierConfig,
) -> Result<CentroidBank> {
    if train.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    let mut centroids = Vec::new();
    let mut fits = Vec::new();
    let mut reports = Vec::new();
    let solver = match method {
        Method::OtBc | Method::OtP => Some(Sinkhorn::new(cost, config.optimizer.sinkhorn)?),
        _ => None,
    };
    for class in train.classes() {
        let members = train.members(class);
        if members.is_empty() {
            return Err(Error::invalid(format!("class '{class}' has no training spectra")));
        }
        let centroid = match method {
            Method::Is | Method::Kl | Method::L2 => arithmetic_mean_centroid(&members)?,
            Method::OtBc => {
                let s = solver.as_ref().expect("OT methods carry a solver");
                s.free_barycenter(&members)?.psd
            }
            Method::OtP => {
                let prob = CentroidProblem::new(&members, cost, &config.optimizer)?;
                let report = prob.multi_start_fit(&config.strategies)?;
                let best = report.best_run();
                fits.push(ClassFit {
                    model: best.model.clone(),
                    objective: best.objective,
                    suboptimality_gap: report.suboptimality_gap,
                });
                let psd = best.psd.clone();
                reports.push(report);
                psd
            }
        };
        centroids.push(centroid);
    }
    Ok(CentroidBank {
        method,
        classes: train.classes().to_vec(),
        centroids,
        fits: (method == Method::OtP).then_some(fits),
        reports: (method == Method::OtP).then_some(reports),
        config: config.clone(),
        solver,
    })
}

impl CentroidBank {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn centroids(&self) -> &[Psd] {
        &self.centroids
    }

    /// Per-class AR fits (OT-P only).
    pub fn fits(&self) -> Option<&[ClassFit]> {
        self.fits.as_deref()
    }

    /// Full multi-start reports behind [`CentroidBank::fits`].
    pub fn reports(&self) -> Option<&[MultiStartReport]> {
        self.reports.as_deref()
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    /// Distance from `psd` to the centroid of class `c`.
    pub fn distance(&self, psd: &Psd, c: usize) -> Result<f64> {
        let centroid = &self.centroids[c];
        let test = psd.normalize()?;
        match (self.method.baseline(), &self.solver) {
            (Some(kind), _) => match self.config.direction {
                Direction::TestToCentroid => baseline_distance(kind, &test, centroid),
                Direction::CentroidToTest => baseline_distance(kind, centroid, &test),
            },
            (None, Some(solver)) => Ok(solver.solve(&test, centroid)?.cost),
            (None, None) => unreachable!("OT banks always carry a solver"),
        }
    }

    /// Negative distance to every class centroid.
    pub fn score(&self, psd: &Psd) -> Result<Vec<f64>> {
        (0..self.centroids.len())
            .map(|c| self.distance(psd, c).map(|d| -d))
            .collect()
    }

    /// Index of the best-scoring class (earliest class on ties).
    pub fn predict(&self, psd: &Psd) -> Result<usize> {
        Ok(argmax(&self.score(psd)?))
    }
}

/// First index of the maximum.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub method: String,
    pub classes: Vec<String>,
    pub acc: f64,
    pub bacc: f64,
    pub f1_macro: f64,
    pub auc_macro: f64,
    /// Rows are true classes, columns predicted classes.
    pub confusion: Vec<Vec<usize>>,
    pub direction: Direction,
}

/// Scores `test` against `bank` and summarizes the predictions.
pub fn evaluate(test: &LabeledPsdSet, bank: &CentroidBank) -> Result<MetricsReport> {
    if test.is_empty() {
        return Err(Error::invalid("test set is empty"));
    }
    let mut truth = Vec::with_capacity(test.len());
    for label in test.labels() {
        let c = bank
            .classes()
            .iter()
            .position(|k| k == label)
            .ok_or_else(|| Error::invalid(format!("test class '{label}' is not in the bank")))?;
        truth.push(c);
    }
    let scores = test
        .psds()
        .iter()
        .map(|p| bank.score(p))
        .collect::<Result<Vec<_>>>()?;
    let mut report = metrics_from_scores(&truth, &scores, bank.classes())?;
    report.method = bank.method().name().to_string();
    report.direction = bank.config().direction;
    Ok(report)
}

/// Metrics from true class indices and per-item score vectors; predictions
/// are the score argmax.
///
/// BACC averages recall over classes present in `truth`. Macro F1 averages
/// over classes that are present or predicted (a class never predicted has
/// F1 = 0). Macro AUC averages the one-vs-rest ROC area (ties count one
/// half) over classes with both positive and negative test items.
pub fn metrics_from_scores(
    truth: &[usize],
    scores: &[Vec<f64>],
    classes: &[String],
) -> Result<MetricsReport> {
    let k = classes.len();
    if truth.is_empty() || truth.len() != scores.len() {
        return Err(Error::invalid("need one score vector per test item"));
    }
    if truth.iter().any(|&t| t >= k) || scores.iter().any(|s| s.len() != k) {
        return Err(Error::invalid("class index or score length out of range"));
    }
    let predicted: Vec<usize> = scores.iter().map(|s| argmax(s)).collect();
    let mut confusion = vec![vec![0usize; k]; k];
    for (&t, &p) in truth.iter().zip(&predicted) {
        confusion[t][p] += 1;
    }
    let total = truth.len() as f64;
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    let row = |c: usize| confusion[c].iter().sum::<usize>();
    let col = |c: usize| (0..k).map(|r| confusion[r][c]).sum::<usize>();

    let present: Vec<usize> = (0..k).filter(|&c| row(c) > 0).collect();
    let bacc = present
        .iter()
        .map(|&c| confusion[c][c] as f64 / row(c) as f64)
        .sum::<f64>()
        / present.len() as f64;

    let active: Vec<usize> = (0..k).filter(|&c| row(c) > 0 || col(c) > 0).collect();
    let f1_macro = active
        .iter()
        .map(|&c| {
            let tp = confusion[c][c] as f64;
            let denom = (row(c) + col(c)) as f64;
            if tp == 0.0 {
                0.0
            } else {
                2.0 * tp / denom
            }
        })
        .sum::<f64>()
        / active.len() as f64;

    let mut aucs = Vec::new();
    for c in 0..k {
        let pos: Vec<f64> = (0..truth.len()).filter(|&i| truth[i] == c).map(|i| scores[i][c]).collect();
        let neg: Vec<f64> = (0..truth.len()).filter(|&i| truth[i] != c).map(|i| scores[i][c]).collect();
        if pos.is_empty() || neg.is_empty() {
            continue;
        }
        let mut wins = 0.0;
        for p in &pos {
            for n in &neg {
                wins += if p > n {
                    1.0
                } else if p == n {
                    0.5
                } else {
                    0.0
                };
            }
        }
        aucs.push(wins / (pos.len() * neg.len()) as f64);
    }
    let auc_macro = if aucs.is_empty() {
        f64::NAN
    } else {
        aucs.iter().sum::<f64>() / aucs.len() as f64
    };

    Ok(MetricsReport {
        method: String::new(),
        classes: classes.to_vec(),
        acc: correct as f64 / total,
        bacc,
        f1_macro,
        auc_macro,
        confusion,
        direction: Direction::default(),
    })
}

impl MetricsReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    /// Confusion matrix with a header row and a leading class column.
    pub fn confusion_csv(&self) -> String {
        let mut s = String::from("true\\pred");
        for c in &self.classes {
            let _ = write!(s, ",{c}");
        }
        s.push('\n');
        for (c, row) in self.classes.iter().zip(&self.confusion) {
            s.push_str(c);
            for v in row {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }
}

/// Aligned text table with one row per method.
pub fn metrics_table(reports: &[MetricsReport]) -> String {
    let width = reports
        .iter()
        .map(|r| r.method.len())
        .chain(std::iter::once(6))
        .max()
        .unwrap_or(6);
    let mut s = format!(
        "{:<width$}  {:>6}  {:>6}  {:>6}  {:>6}\n",
        "Method", "ACC", "BACC", "F1", "AUC"
    );
    for r in reports {
        let _ = writeln!(
            s,
            "{:<width$}  {:>6.4}  {:>6.4}  {:>6.4}  {:>6.4}",
            r.method, r.acc, r.bacc, r.f1_macro, r.auc_macro
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ar::{ar_to_psd, parcor_slice_to_ar};
    use crate::centroid::default_portfolio;
    use crate::ot::SinkhornConfig;
    use crate::spectral::{build_cost, make_grid, FrequencyGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|c| format!("c{c}")).collect()
    }

    fn one_hot(preds: &[usize], k: usize) -> Vec<Vec<f64>> {
        preds
            .iter()
            .map(|&p| (0..k).map(|c| if c == p { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    fn ar_psd(kappa: &[f64], grid: &FrequencyGrid) -> Psd {
        let model = ArModel::new(parcor_slice_to_ar(kappa).unwrap(), 1.0).unwrap();
        ar_to_psd(&model, grid).normalize().unwrap()
    }

    fn small_config(order: usize) -> ClassifierConfig {
        ClassifierConfig {
            optimizer: OptimizerConfig {
                model_order: order,
                max_outer_iters: 20,
                sinkhorn: SinkhornConfig::new(0.07, 10_000, 1e-10).unwrap(),
                ..OptimizerConfig::default()
            },
            strategies: default_portfolio(1)[..2].to_vec(),
            direction: Direction::TestToCentroid,
        }
    }

    #[test]
    fn perfect_predictions() {
        let truth = [0, 1, 2, 1, 0];
        let r = metrics_from_scores(&truth, &one_hot(&truth, 3), &names(3)).unwrap();
        assert_eq!((r.acc, r.bacc, r.f1_macro, r.auc_macro), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(r.confusion, vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn all_one_class_predictor() {
        let truth = [0, 0, 1, 1];
        let r = metrics_from_scores(&truth, &one_hot(&[0, 0, 0, 0], 2), &names(2)).unwrap();
        assert_eq!(r.acc, 0.5);
        assert_eq!(r.bacc, 0.5);
        assert!((r.f1_macro - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.auc_macro, 0.5);
    }

    #[test]
    fn confusion_rows_match_counts_and_metric_invariances() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let k = 4;
        let truth: Vec<usize> = (0..40).map(|i| i % k).collect();
        let scores: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..k).map(|_| rng.random_range(-1.0..0.0)).collect())
            .collect();
        let r = metrics_from_scores(&truth, &scores, &names(k)).unwrap();
        for c in 0..k {
            assert_eq!(r.confusion[c].iter().sum::<usize>(), 10);
        }
        let diag: usize = (0..k).map(|c| r.confusion[c][c]).sum();
        assert_eq!(r.acc, diag as f64 / 40.0);
        // balanced test set
        assert!((r.bacc - r.acc).abs() < 1e-15);
        // monotone transforms leave AUC alone, rescaling leaves predictions
        let moved: Vec<Vec<f64>> = scores.iter().map(|s| s.iter().map(|v| 2.0 * v + 7.0).collect()).collect();
        let r2 = metrics_from_scores(&truth, &moved, &names(k)).unwrap();
        assert_eq!(r.auc_macro, r2.auc_macro);
        assert_eq!(r.confusion, r2.confusion);
        let shifted: Vec<Vec<f64>> = scores
            .iter()
            .enumerate()
            .map(|(i, s)| s.iter().map(|v| 3.0 * v + i as f64).collect())
            .collect();
        assert_eq!(r.confusion, metrics_from_scores(&truth, &shifted, &names(k)).unwrap().confusion);
    }

    #[test]
    fn ties_go_to_the_first_class() {
        assert_eq!(argmax(&[-1.0, -1.0, -2.0]), 0);
        assert_eq!(argmax(&[-3.0, -1.0, -1.0]), 1);
    }

    #[test]
    fn method_names_parse() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("svm".parse::<Method>().is_err());
    }

    #[test]
    fn baseline_banks() {
        let grid = make_grid(16).unwrap();
        let cost = build_cost(&grid);
        let a = ar_psd(&[0.7], &grid);
        let b = ar_psd(&[-0.7], &grid);
        let train = LabeledPsdSet::new(vec![a.clone(), b.clone()], vec!["a".into(), "b".into()]).unwrap();
        let cfg = small_config(2);
        let bank = fit_centroids(&train, Method::L2, &cost, &cfg).unwrap();
        // single example per class: the centroid is that example
        assert_eq!(bank.centroids()[0].mass(), a.mass());
        let s = bank.score(&a).unwrap();
        assert_eq!(s[0], 0.0);
        assert_eq!(bank.predict(&a).unwrap(), 0);
        for m in [Method::Is, Method::Kl] {
            let bank = fit_centroids(&train, m, &cost, &cfg).unwrap();
            assert!(bank.score(&a).unwrap().iter().all(|v| v.is_finite()));
            assert_eq!(bank.predict(&b).unwrap(), 1);
        }
        let test = LabeledPsdSet::new(vec![a.clone()], vec!["zzz".into()]).unwrap();
        assert!(matches!(evaluate(&test, &bank), Err(Error::InvalidArgument(_))));
        let test = LabeledPsdSet::new(vec![a, b], vec!["a".into(), "b".into()]).unwrap();
        let r = evaluate(&test, &bank).unwrap();
        assert_eq!(r.acc, 1.0);
        assert!(r.confusion_csv().starts_with("true\\pred,a,b\n"));
        assert!(metrics_table(&[r]).contains("L2"));
    }

    #[test]
    fn ot_banks_duplicate_invariance_and_symmetry() {
        let grid = make_grid(32).unwrap();
        let cost = build_cost(&grid);
        let a = ar_psd(&[0.6, -0.5], &grid);
        let b = ar_psd(&[-0.5, 0.4], &grid);
        let labels = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let single = LabeledPsdSet::new(vec![a.clone(), b.clone()], labels(&["a", "b"])).unwrap();
        let double = LabeledPsdSet::new(
            vec![a.clone(), a.clone(), b.clone(), b.clone()],
            labels(&["a", "a", "b", "b"]),
        )
        .unwrap();
        let cfg = small_config(2);
        for m in [Method::L2, Method::OtBc, Method::OtP] {
            let one = fit_centroids(&single, m, &cost, &cfg).unwrap();
            let two = fit_centroids(&double, m, &cost, &cfg).unwrap();
            for (x, y) in one.centroids().iter().zip(two.centroids()) {
                let l1: f64 = x.mass().iter().zip(y.mass()).map(|(u, v)| (u - v).abs()).sum();
                assert!(l1 <= 1e-6, "{m:?}: {l1}");
            }
        }
        let bank = fit_centroids(&single, Method::OtP, &cost, &cfg).unwrap();
        let fits = bank.fits().unwrap();
        assert_eq!(fits.len(), 2);
        let test = ar_psd(&[0.3, -0.2], &grid);
        let solver = Sinkhorn::new(&cost, cfg.optimizer.sinkhorn).unwrap();
        for c in 0..2 {
            let forward = bank.distance(&test, c).unwrap();
            let backward = solver.solve(&bank.centroids()[c], &test).unwrap().cost;
            assert!((forward - backward).abs() <= 1e-8, "{forward} vs {backward}");
        }
    }

    #[test]
    fn one_bin_shift_keeps_its_class() {
        let grid = make_grid(32).unwrap();
        let cost = build_cost(&grid);
        let bump = |center: usize| {
            let mut v = vec![1e-4; 32];
            v[center] = 1.0;
            v[(center + 1) % 32] = 0.5;
            Psd::new(grid, v).unwrap().normalize().unwrap()
        };
        let train = LabeledPsdSet::new(vec![bump(4), bump(20)], vec!["low".into(), "high".into()]).unwrap();
        let bank = fit_centroids(&train, Method::OtBc, &cost, &small_config(2)).unwrap();
        let scores = bank.score(&bump(5)).unwrap();
        assert!(scores[0] > scores[1], "{scores:?}");
        assert_eq!(bank.predict(&bump(5)).unwrap(), 0);
    }
}
