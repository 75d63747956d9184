//! Run configuration: flat `key = value` text (a TOML subset). Every key is
//! optional; unknown keys are rejected.

use std::path::{Path, PathBuf};

use arbary::centroid::{derive_seed, InitKind, InitStrategy, OptimizerConfig};
use arbary::classify::{ClassifierConfig, Direction, Method};
use arbary::ot::SinkhornConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::synth::{default_templates, SynthSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_bins: usize,
    pub epsilon: f64,
    pub sinkhorn_tol: f64,
    pub sinkhorn_max_iters: usize,
    pub model_order: usize,
    pub max_outer_iters: usize,
    pub armijo_c1: f64,
    pub armijo_shrink: f64,
    pub step_init: f64,
    pub grad_tol: f64,
    pub jacobian_fd_step: f64,
    pub yw_start: bool,
    pub n_perturbed_yw: usize,
    pub perturbed_yw_scale: f64,
    pub n_parcor_random: usize,
    pub parcor_random_scale: f64,
    pub n_gaussian_theta: usize,
    pub gaussian_theta_scale: f64,
    pub seed: u64,
    pub direction: String,
    pub methods: Vec<String>,
    pub orders: Vec<usize>,
    pub barycenter_otp: bool,
    pub synth_classes: usize,
    pub synth_jitter: f64,
    pub synth_train_per_class: usize,
    pub synth_test_per_class: usize,
    pub synth_signal_len: usize,
    pub synth_burg_order: usize,
    pub input: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let opt = OptimizerConfig::default();
        let sk = SinkhornConfig::default();
        Self {
            n_bins: 128,
            epsilon: sk.epsilon,
            sinkhorn_tol: sk.tol,
            sinkhorn_max_iters: sk.max_iters,
            model_order: opt.model_order,
            max_outer_iters: opt.max_outer_iters,
            armijo_c1: opt.armijo_c1,
            armijo_shrink: opt.armijo_shrink,
            step_init: opt.step_init,
            grad_tol: opt.grad_tol,
            jacobian_fd_step: opt.jacobian_fd_step,
            yw_start: true,
            n_perturbed_yw: 3,
            perturbed_yw_scale: 0.2,
            n_parcor_random: 3,
            parcor_random_scale: 0.7,
            n_gaussian_theta: 3,
            gaussian_theta_scale: 0.5,
            seed: 0,
            direction: "test_to_centroid".into(),
            methods: Method::ALL.iter().map(|m| m.name().to_string()).collect(),
            orders: (2..=10).collect(),
            barycenter_otp: true,
            synth_classes: 5,
            synth_jitter: 0.1,
            synth_train_per_class: 50,
            synth_test_per_class: 50,
            synth_signal_len: 2048,
            synth_burg_order: 10,
            input: None,
            train: None,
            test: None,
            out_dir: PathBuf::from("."),
        }
    }
}

/// Help text listing every key, its default and meaning.
pub const CONFIG_HELP: &str = "\
CONFIG KEYS (flat `key = value` lines for --config; all optional)
  n_bins = 128                 frequency bins on [-pi, pi)
  epsilon = 0.07               entropic regularization
  sinkhorn_tol = 1e-9          L1 marginal violation at which Sinkhorn stops
  sinkhorn_max_iters = 10000   Sinkhorn iteration cap
  model_order = 10             AR order of OT-P centroids and fits
  max_outer_iters = 500        descent iterations per start
  armijo_c1 = 1e-4             sufficient-decrease constant
  armijo_shrink = 0.5          backtracking factor
  step_init = 1.0              initial step length
  grad_tol = 1e-6              gradient norm at which descent stops
  jacobian_fd_step = 1e-6      finite-difference step of the spectrum Jacobian
  yw_start = true              include the Yule-Walker start
  n_perturbed_yw = 3           starts at Yule-Walker plus Gaussian noise
  perturbed_yw_scale = 0.2     their noise standard deviation
  n_parcor_random = 3          starts with uniform random reflection coefficients
  parcor_random_scale = 0.7    their bound, in (0, 1)
  n_gaussian_theta = 3         starts with Gaussian shape parameters
  gaussian_theta_scale = 0.5   their standard deviation
  seed = 0                     root seed (overridden by --seed)
  direction = \"test_to_centroid\"  or \"centroid_to_test\" for IS/KL
  methods = [\"IS\", \"KL\", \"L2\", \"OT-BC\", \"OT-P\"]  classify methods
  orders = [2, 3, ..., 10]     model orders of sweep
  barycenter_otp = true        add the OT-P column to barycenter output
  synth_classes = 5            classes taken from the built-in templates (1-5)
  synth_jitter = 0.1           pole-angle standard deviation, radians
  synth_train_per_class = 50   spectra per class in train.json
  synth_test_per_class = 50    spectra per class in test.json (0 skips it)
  synth_signal_len = 2048      simulated samples per spectrum
  synth_burg_order = 10        order of the Burg estimate
  input = \"set.json\"           input set of barycenter, sweep and fit
  train = \"train.json\"         training set of classify
  test = \"test.json\"           test set of classify
  out_dir = \".\"                output directory (overridden by --out-dir)

EXIT CODES
  0 success, 2 usage, 3 convergence failure, 4 data error";

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |e: arbary::Error| CliError::Usage(e.to_string());
        if self.n_bins < 2 {
            return Err(CliError::Usage("n_bins must be at least 2".into()));
        }
        self.optimizer().validate().map_err(usage)?;
        self.strategies().map_err(usage)?;
        self.direction()?;
        self.methods()?;
        if self.orders.is_empty() || self.orders.contains(&0) {
            return Err(CliError::Usage("orders must be a nonempty list of positive orders".into()));
        }
        if self.synth_classes == 0 || self.synth_classes > default_templates().len() {
            return Err(CliError::Usage(format!(
                "synth_classes must lie in 1..={}",
                default_templates().len()
            )));
        }
        self.synth_spec(self.synth_train_per_class.max(1), 0)
            .validate()
            .map_err(usage)?;
        Ok(())
    }

    pub fn sinkhorn(&self) -> SinkhornConfig {
        SinkhornConfig {
            epsilon: self.epsilon,
            max_iters: self.sinkhorn_max_iters,
            tol: self.sinkhorn_tol,
        }
    }

    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            model_order: self.model_order,
            sinkhorn: self.sinkhorn(),
            max_outer_iters: self.max_outer_iters,
            armijo_c1: self.armijo_c1,
            armijo_shrink: self.armijo_shrink,
            step_init: self.step_init,
            grad_tol: self.grad_tol,
            jacobian_fd_step: self.jacobian_fd_step,
        }
    }

    /// The multi-start portfolio; start `i` gets seed `derive_seed(seed, i)`.
    pub fn strategies(&self) -> arbary::Result<Vec<InitStrategy>> {
        let mut kinds = Vec::new();
        if self.yw_start {
            kinds.push(InitKind::YuleWalker);
        }
        kinds.extend((0..self.n_perturbed_yw).map(|_| InitKind::PerturbedYuleWalker {
            scale: self.perturbed_yw_scale,
        }));
        kinds.extend((0..self.n_parcor_random).map(|_| InitKind::ParcorRandom {
            scale: self.parcor_random_scale,
        }));
        kinds.extend((0..self.n_gaussian_theta).map(|_| InitKind::GaussianTheta {
            scale: self.gaussian_theta_scale,
        }));
        if kinds.is_empty() {
            return Err(arbary::Error::InvalidArgument(
                "the multi-start portfolio is empty".into(),
            ));
        }
        kinds
            .into_iter()
            .enumerate()
            .map(|(i, kind)| InitStrategy::new(kind, derive_seed(self.seed, i as u64)))
            .collect()
    }

    pub fn direction(&self) -> Result<Direction, CliError> {
        self.direction.parse().map_err(|e: arbary::Error| CliError::Usage(e.to_string()))
    }

    pub fn methods(&self) -> Result<Vec<Method>, CliError> {
        if self.methods.is_empty() {
            return Err(CliError::Usage("methods must not be empty".into()));
        }
        let mut out: Vec<Method> = Vec::new();
        for name in &self.methods {
            let m: Method = name
                .parse()
                .map_err(|e: arbary::Error| CliError::Usage(e.to_string()))?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        Ok(out)
    }

    pub fn classifier(&self) -> Result<ClassifierConfig, CliError> {
        Ok(ClassifierConfig {
            optimizer: self.optimizer(),
            strategies: self.strategies()?,
            direction: self.direction()?,
        })
    }

    pub fn synth_spec(&self, samples_per_class: usize, seed: u64) -> SynthSpec {
        SynthSpec {
            classes: default_templates().into_iter().take(self.synth_classes).collect(),
            jitter: self.synth_jitter,
            samples_per_class,
            signal_len: self.synth_signal_len,
            order: self.synth_burg_order,
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_empty_file() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.n_bins, 128);
        assert_eq!(cfg.epsilon, 0.07);
        assert_eq!(cfg.model_order, 10);
        assert_eq!(cfg.strategies().unwrap().len(), 10);
        assert_eq!(cfg.methods().unwrap(), Method::ALL.to_vec());
    }

    #[test]
    fn overrides_and_rejections() {
        let cfg = RunConfig::parse("epsilon = 0.1\nmodel_order = 4\nmethods = [\"l2\", \"ot-p\"]\n")
            .unwrap();
        assert_eq!(cfg.epsilon, 0.1);
        assert_eq!(cfg.optimizer().model_order, 4);
        assert_eq!(cfg.methods().unwrap(), vec![Method::L2, Method::OtP]);
        for bad in [
            "no_such_key = 1",
            "epsilon = -1.0",
            "n_bins = 1",
            "methods = [\"XY\"]",
            "direction = \"sideways\"",
            "parcor_random_scale = 1.5",
            "yw_start = false\nn_perturbed_yw = 0\nn_parcor_random = 0\nn_gaussian_theta = 0",
            "synth_classes = 9",
            "epsilon = ",
        ] {
            let err = RunConfig::parse(bad).unwrap_err();
            assert_eq!(err.exit_code(), crate::error::EXIT_USAGE, "{bad}");
        }
    }

    #[test]
    fn help_lists_every_key() {
        let value = toml::Value::try_from(RunConfig::default()).unwrap();
        let mut keys: Vec<String> = value.as_table().unwrap().keys().cloned().collect();
        keys.extend(["input", "train", "test"].map(String::from));
        for k in keys {
            assert!(CONFIG_HELP.contains(&format!("  {k} = ")), "{k} undocumented");
        }
    }
}
