//! Command-line front end: argument parsing, dataset ingestion, study
//! dispatch and output emission for the `interpnn` binary.

mod csv_io;
mod emit;
mod svg;

pub use csv_io::{load_csv, read_csv, LabelColumn};
pub use emit::{emit_outputs, render, theory_csv, write_atomic, StudyOutput};

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use crate::data::Task;
use crate::error::{Error, Result};
use crate::estimator::FittedModel;
use crate::experiments::{
    run_cis_curve, run_rate_check, run_ratio_curve, run_real_data, ExperimentConfig, KGrid, KSelection, Study,
};
use crate::theory::theory_sweep;
use crate::weighting::WeightScheme;

#[derive(Debug, Parser)]
#[command(name = "interpnn", version, about = "Interpolated nearest-neighbor estimation and studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate asymptotic ratios against kNN over a gamma sweep.
    Theory(TheoryArgs),
    /// Optimal-k MSE and regret ratio curves on the mixture benchmark.
    Simulate(StudyArgs),
    /// Classification-instability ratio curves on the mixture benchmark.
    Cis(CisArgs),
    /// Optimal MSE and optimal k across training sizes.
    Ratecheck(RateArgs),
    /// Holdout gamma sweep over a binary classification CSV.
    Bench(BenchArgs),
    /// Fit on a CSV and predict for query points.
    Predict(PredictArgs),
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[arg(long)]
    pub d: usize,
    /// Largest gamma; defaults to the edge of the regime.
    #[arg(long)]
    pub gamma_max: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Write theory.csv and a plot here instead of printing to stdout.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KSelectionArg {
    Pooled,
    PerRep,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// JSON config used as the base; other flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Sets both regression and classification repetitions.
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub reps_regression: Option<usize>,
    #[arg(long)]
    pub reps_classification: Option<usize>,
    #[arg(long)]
    pub n_test: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated gamma/d grid; 0 is always included.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub gamma_over_d: Option<Vec<f64>>,
    #[arg(long)]
    pub allow_out_of_regime: bool,
    /// Largest k considered.
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, value_enum)]
    pub k_selection: Option<KSelectionArg>,
    #[arg(long, default_value = "interpnn-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CisArgs {
    #[command(flatten)]
    pub study: StudyArgs,
    /// Draw both training sets from one seed; every CIS is then zero.
    #[arg(long)]
    pub identical_trains: bool,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub study: StudyArgs,
    /// Comma-separated training sizes.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub n_grid: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub study: StudyArgs,
    /// Numeric CSV with a header row and a 0/1 label column.
    #[arg(long)]
    pub data: PathBuf,
    /// Label column name or 0-based index; defaults to the last column.
    #[arg(long)]
    pub label_column: Option<String>,
    /// Dataset name in the output table; defaults to the file stem.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub validation_fraction: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TaskArg {
    Regression,
    Classification,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Regression => Task::Regression,
            TaskArg::Classification => Task::Classification,
        }
    }
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Training CSV with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Query CSV with a header row; every column is a feature.
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long)]
    pub label_column: Option<String>,
    #[arg(long, value_enum, default_value = "regression")]
    pub task: TaskArg,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Process exit status for an error: 3 data, 4 model or regime, 5 I/O,
/// 2 bad configuration values, 1 anything else. Usage errors caught by
/// the argument parser also exit with 2.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConfigInvalid(_) | Error::EmptyGrid => 2,
        Error::InvalidDataset(_)
        | Error::EmptyDataset
        | Error::DimensionMismatch { .. }
        | Error::NonFiniteValue(_)
        | Error::NonBinaryLabel { .. }
        | Error::CsvParse { .. } => 3,
        Error::OutOfRegime { .. }
        | Error::KTooLarge { .. }
        | Error::ZeroK
        | Error::DegenerateSplit { .. }
        | Error::TaskMismatch { .. }
        | Error::SchemeMismatch
        | Error::EmptyQuerySet => 4,
        Error::Io { .. } => 5,
        Error::EmptyResult => 1,
    }
}

fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::ConfigInvalid(format!("{}: {e}", path.display())))
}

impl StudyArgs {
    /// The config file (or the study's defaults) with every given flag applied.
    pub fn resolve(&self, study: Study) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let cfg = read_config(path)?;
                if cfg.study != study {
                    return Err(Error::ConfigInvalid(format!(
                        "config file describes {:?}, command runs {study:?}",
                        cfg.study
                    )));
                }
                cfg
            }
            None => {
                let d = self.d.unwrap_or(2);
                match study {
                    Study::RatioCurve => ExperimentConfig::ratio_curve(d),
                    Study::CisCurve => ExperimentConfig::cis_curve(d),
                    Study::RateCheck => ExperimentConfig::rate_check(d),
                    Study::RealData => ExperimentConfig::real_data(),
                }
            }
        };
        if let Some(d) = self.d {
            cfg.d = d;
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(r) = self.reps {
            cfg.reps_regression = r;
            cfg.reps_classification = r;
        }
        if let Some(r) = self.reps_regression {
            cfg.reps_regression = r;
        }
        if let Some(r) = self.reps_classification {
            cfg.reps_classification = r;
        }
        if let Some(t) = self.n_test {
            cfg.n_test = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(g) = &self.gamma_over_d {
            cfg.gamma_over_d = g.clone();
        }
        if self.allow_out_of_regime {
            cfg.allow_out_of_regime = true;
        }
        if let Some(k) = self.k_max {
            cfg.k_grid = KGrid::All { k_max: Some(k) };
        }
        if let Some(sel) = self.k_selection {
            cfg.k_selection = match sel {
                KSelectionArg::Pooled => KSelection::Pooled,
                KSelectionArg::PerRep => KSelection::PerRep,
            };
        }
        Ok(cfg)
    }
}

/// Fully resolved configuration of a CLI run.
#[derive(Debug, Clone)]
pub enum Resolved {
    Theory { d: usize, gamma_max: f64, step: f64, out_dir: Option<PathBuf> },
    Study { cfg: ExperimentConfig, out_dir: PathBuf, data: Option<(PathBuf, LabelColumn, String)> },
    Predict(PredictPlan),
}

#[derive(Debug, Clone)]
pub struct PredictPlan {
    pub data: PathBuf,
    pub query: PathBuf,
    pub label: LabelColumn,
    pub task: Task,
    pub k: usize,
    pub gamma: f64,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct TheoryConfig {
    d: usize,
    gamma_max: f64,
    step: f64,
}

impl Cli {
    /// Applies defaults and checks every value, without running anything.
    pub fn resolve(&self) -> Result<Resolved> {
        let study = |args: &StudyArgs, s: Study| -> Result<(ExperimentConfig, PathBuf)> {
            Ok((args.resolve(s)?, args.out_dir.clone()))
        };
        let resolved = match &self.command {
            Command::Theory(a) => {
                if a.d == 0 {
                    return Err(Error::ConfigInvalid("d must be positive".into()));
                }
                Resolved::Theory {
                    d: a.d,
                    gamma_max: a.gamma_max.unwrap_or(a.d as f64 / 3.0),
                    step: a.step,
                    out_dir: a.out_dir.clone(),
                }
            }
            Command::Simulate(a) => {
                let (cfg, out_dir) = study(a, Study::RatioCurve)?;
                Resolved::Study { cfg, out_dir, data: None }
            }
            Command::Cis(a) => {
                let (mut cfg, out_dir) = study(&a.study, Study::CisCurve)?;
                cfg.identical_trains |= a.identical_trains;
                Resolved::Study { cfg, out_dir, data: None }
            }
            Command::Ratecheck(a) => {
                let (mut cfg, out_dir) = study(&a.study, Study::RateCheck)?;
                if let Some(g) = &a.n_grid {
                    cfg.n_grid = g.clone();
                }
                Resolved::Study { cfg, out_dir, data: None }
            }
            Command::Bench(a) => {
                let (mut cfg, out_dir) = study(&a.study, Study::RealData)?;
                if let Some(f) = a.train_fraction {
                    cfg.train_fraction = f;
                }
                if let Some(f) = a.validation_fraction {
                    cfg.validation_fraction = f;
                }
                let label = a.label_column.as_deref().map(LabelColumn::parse).unwrap_or_default();
                let name = a.name.clone().unwrap_or_else(|| {
                    a.data.file_stem().map_or_else(|| "data".into(), |s| s.to_string_lossy().into_owned())
                });
                Resolved::Study { cfg, out_dir, data: Some((a.data.clone(), label, name)) }
            }
            Command::Predict(a) => Resolved::Predict(PredictPlan {
                data: a.data.clone(),
                query: a.query.clone(),
                label: a.label_column.as_deref().map(LabelColumn::parse).unwrap_or_default(),
                task: a.task.into(),
                k: a.k,
                gamma: a.gamma,
                out: a.out.clone(),
            }),
        };
        if let Resolved::Study { cfg, data, .. } = &resolved {
            // the real-data dimension comes from the file, checked after loading
            if data.is_none() {
                cfg.validate()?;
            }
        }
        Ok(resolved)
    }
}

/// Runs a parsed command line to completion.
pub fn run(cli: &Cli) -> Result<()> {
    match cli.resolve()? {
        Resolved::Theory { d, gamma_max, step, out_dir } => {
            let rows = theory_sweep(d, gamma_max, step)?;
            let json = serde_json::to_string(&TheoryConfig { d, gamma_max, step }).expect("plain struct");
            info!("resolved config: {json}");
            match out_dir {
                Some(dir) => {
                    let paths = emit_outputs(&StudyOutput::Theory(rows), &dir, Some(&TheoryConfig { d, gamma_max, step }))?;
                    log_paths(&paths);
                }
                None => {
                    let bytes = theory_csv(&rows)?;
                    std::io::stdout().write_all(&bytes).map_err(|e| Error::io("<stdout>", e))?;
                }
            }
            Ok(())
        }
        Resolved::Study { mut cfg, out_dir, data } => {
            let output = match (cfg.study, data) {
                (Study::RealData, Some((path, label, name))) => {
                    let ds = load_csv(&path, &label, Task::Classification)?;
                    cfg.d = ds.dim();
                    cfg.validate()?;
                    log_config(&cfg);
                    StudyOutput::RealData(run_real_data(&name, &ds, &cfg)?)
                }
                (Study::RatioCurve, _) => {
                    log_config(&cfg);
                    StudyOutput::RatioCurve(run_ratio_curve(&cfg)?)
                }
                (Study::CisCurve, _) => {
                    log_config(&cfg);
                    StudyOutput::CisCurve(run_cis_curve(&cfg)?)
                }
                (Study::RateCheck, _) => {
                    log_config(&cfg);
                    StudyOutput::RateCheck(run_rate_check(&cfg)?)
                }
                (Study::RealData, None) => return Err(Error::ConfigInvalid("bench needs --data".into())),
            };
            let paths = emit_outputs(&output, &out_dir, Some(&cfg))?;
            log_paths(&paths);
            Ok(())
        }
        Resolved::Predict(plan) => predict(&plan),
    }
}

fn log_config(cfg: &ExperimentConfig) {
    info!("resolved config: {}", serde_json::to_string(cfg).expect("config serializes"));
}

fn log_paths(paths: &[PathBuf]) {
    for p in paths {
        info!("wrote {}", p.display());
    }
}

/// Reads a header-plus-rows CSV in which every column is numeric.
fn load_queries(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut out = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::CsvParse { row: r + 1, col: 0, msg: e.to_string() })?;
        let row = record
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::CsvParse {
                    row: r + 1,
                    col: c + 1,
                    msg: format!("{cell:?} is not a finite number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push(row);
    }
    if out.is_empty() {
        return Err(Error::EmptyQuerySet);
    }
    Ok(out)
}

fn predict(plan: &PredictPlan) -> Result<()> {
    if !(plan.gamma.is_finite() && plan.gamma >= 0.0) {
        return Err(Error::ConfigInvalid(format!("gamma {} must be finite and nonnegative", plan.gamma)));
    }
    let train = load_csv(&plan.data, &plan.label, plan.task)?;
    let queries = load_queries(&plan.query)?;
    let model = FittedModel::fit(train, WeightScheme::Interpolated { gamma: plan.gamma }, plan.k)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let enc = |e: csv::Error| Error::ConfigInvalid(format!("csv encoding failed: {e}"));
    w.write_record(["prediction"]).map_err(enc)?;
    for q in &queries {
        let v = match plan.task {
            Task::Regression => format!("{}", model.predict_regression(q)?),
            Task::Classification => model.predict_class(q)?.to_string(),
        };
        w.write_record([v]).map_err(enc)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::ConfigInvalid(format!("csv encoding failed: {e}")))?;
    match &plan.out {
        Some(path) => write_atomic(path, &bytes),
        None => std::io::stdout().write_all(&bytes).map_err(|e| Error::io("<stdout>", e)),
    }
}
