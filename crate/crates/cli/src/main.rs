use std::path::PathBuf;
use std::process::ExitCode;

use arbary_cli::commands;
use arbary_cli::config::{RunConfig, CONFIG_HELP};
use arbary_cli::error::{CliError, EXIT_USAGE};
use clap::{Args, Parser, Subcommand};

/// Entropic optimal-transport barycenters of power spectra, free and
/// constrained to stable all-pole models.
#[derive(Parser)]
#[command(name = "arbary", version, after_help = CONFIG_HELP)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Root seed; overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides `out_dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate labeled synthetic spectra (train.json, test.json).
    #[command(after_help = CONFIG_HELP)]
    Synth,
    /// Arithmetic mean, free barycenter and OT-P centroid of a set
    /// (barycenter.csv, costs.csv, fit.json).
    #[command(after_help = CONFIG_HELP)]
    Barycenter(Input),
    /// Average entropic cost of the free barycenter, the Yule-Walker start
    /// and the OT-P fit against model order (sweep.csv, sweep.json).
    #[command(after_help = CONFIG_HELP)]
    Sweep {
        #[command(flatten)]
        input: Input,
        /// Model orders, comma separated; overrides `orders`.
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<usize>>,
    },
    /// Nearest-centroid classification of a test set
    /// (report.json, table.txt, confusion_<method>.csv).
    #[command(after_help = CONFIG_HELP)]
    Classify {
        /// Training set; overrides `train`.
        #[arg(long, value_name = "PATH")]
        train: Option<PathBuf>,
        /// Test set; overrides `test`.
        #[arg(long, value_name = "PATH")]
        test: Option<PathBuf>,
        /// Methods, comma separated (IS, KL, L2, OT-BC, OT-P); overrides `methods`.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        /// OT-P model order; overrides `model_order` (default 10).
        #[arg(long)]
        order: Option<usize>,
        /// test_to_centroid or centroid_to_test; overrides `direction`.
        #[arg(long)]
        direction: Option<String>,
        /// Allow the same file as training and test set.
        #[arg(long)]
        allow_same: bool,
    },
    /// Multi-start OT-P fit of a set (fit.json, fit.csv).
    #[command(after_help = CONFIG_HELP)]
    Fit {
        #[command(flatten)]
        input: Input,
        /// Model order; overrides `model_order`.
        #[arg(long)]
        order: Option<usize>,
    },
}

#[derive(Args)]
struct Input {
    /// Input set; overrides `input`.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    set(&mut cfg.seed, cli.common.seed);
    set(&mut cfg.out_dir, cli.common.out_dir);
    match cli.command {
        Command::Synth => {
            cfg.validate()?;
            commands::synth(&cfg)
        }
        Command::Barycenter(input) => {
            set(&mut cfg.input, input.input.map(Some));
            cfg.validate()?;
            commands::barycenter(&cfg)
        }
        Command::Sweep { input, orders } => {
            set(&mut cfg.input, input.input.map(Some));
            set(&mut cfg.orders, orders);
            cfg.validate()?;
            commands::sweep(&cfg)
        }
        Command::Classify {
            train,
            test,
            methods,
            order,
            direction,
            allow_same,
        } => {
            set(&mut cfg.train, train.map(Some));
            set(&mut cfg.test, test.map(Some));
            set(&mut cfg.methods, methods);
            set(&mut cfg.model_order, order);
            set(&mut cfg.direction, direction);
            cfg.validate()?;
            let written = commands::classify(&cfg, allow_same)?;
            if let Ok(table) = std::fs::read_to_string(cfg.out_dir.join("table.txt")) {
                print!("{table}");
            }
            Ok(written)
        }
        Command::Fit { input, order } => {
            set(&mut cfg.input, input.input.map(Some));
            set(&mut cfg.model_order, order);
            cfg.validate()?;
            commands::fit(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(written) => {
            for path in written {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("arbary: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
