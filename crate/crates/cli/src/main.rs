//! `faultsel` command line: data generation, input selection, classifier
//! training and evaluation, and the full comparison pipeline.

mod model;
mod settings;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use faultsel::eval::{split_indices, ConfusionCounts, Task};
use faultsel::features::FeatureOrders;
use faultsel::linalg::Matrix;
use faultsel::pipeline::{evaluate_classifier, fit_fold, run_pipeline, train_classifier, Method, Selector};
use faultsel::report::{comparison_table_csv, detail_csv, trend_svg};
use faultsel::synthdata::{generate_cylinder, generate_gear, load_csv, to_csv_string, Dataset};
use model::SavedModel;
use settings::Settings;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "faultsel", version, about = "PCA and ARD input selection for vibration fault identification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset CSV.
    Generate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        /// Output file (default: <out-dir>/<dataset>.csv).
        #[arg(long)]
        out: Option<String>,
    },
    /// Fit one selector on the whole dataset and write the reduced inputs.
    Select {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        sel: SelectArgs,
        /// Seed for ARD network initialization.
        #[arg(long)]
        run_seed: Option<String>,
        /// Output file (default: <out-dir>/selected.csv).
        #[arg(long)]
        out: Option<String>,
    },
    /// Split, select inputs and train one classifier; save it.
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        sel: SelectArgs,
        #[command(flatten)]
        net: NetArgs,
        /// Split and initialization seed.
        #[arg(long)]
        run_seed: Option<String>,
        /// Model file (default: <out-dir>/model.txt).
        #[arg(long)]
        out: Option<String>,
    },
    /// Score a saved classifier on the held-out split of a dataset.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        /// Model file written by `train`.
        #[arg(long)]
        model: Option<String>,
        /// Split seed; use the one given to `train`.
        #[arg(long)]
        run_seed: Option<String>,
        /// Score every example instead of the held-out split.
        #[arg(long)]
        all: bool,
        /// Output file (default: <out-dir>/evaluation.csv).
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the full comparison and write the table, detail CSV and chart.
    Pipeline {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        sel: SelectArgs,
        #[command(flatten)]
        net: NetArgs,
        /// Comma-separated split/initialization seeds.
        #[arg(long)]
        seeds: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Flat key=value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<String>,
    /// Override any configuration key, e.g. `--set gear.noise_std=0.2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Args)]
struct DataArgs {
    /// `gear`, `cylinder`, or a dataset CSV path.
    #[arg(long)]
    dataset: Option<String>,
    /// Dataset CSV path; same as `--dataset <path>`.
    #[arg(long = "in", conflicts_with = "dataset")]
    input: Option<String>,
    /// Generator seed.
    #[arg(long)]
    seed: Option<String>,
}

#[derive(Args)]
struct SelectArgs {
    /// sof, time256, time64, freq or features62 (comma list for `pipeline`).
    #[arg(long)]
    route: Option<String>,
    /// pca, ard, or both (`pipeline` only).
    #[arg(long)]
    method: Option<String>,
    /// Number of inputs kept (comma list for `pipeline`).
    #[arg(long)]
    k: Option<String>,
}

#[derive(Args)]
struct NetArgs {
    /// Hidden units of the classifier.
    #[arg(long)]
    hidden: Option<String>,
    /// SCG iterations for the classifier.
    #[arg(long)]
    iters: Option<String>,
    /// Weight-decay precision of the classifier.
    #[arg(long)]
    alpha: Option<String>,
}

type Flags = Vec<(&'static str, Option<String>)>;

impl Common {
    fn settings(&self, mut flags: Flags) -> Result<Settings> {
        flags.push(("out_dir", self.out_dir.clone()));
        Settings::resolve(self.config.as_deref(), flags, &self.sets)
    }
}

impl DataArgs {
    fn flags(&self) -> Flags {
        vec![
            ("dataset", self.input.clone().or_else(|| self.dataset.clone())),
            ("seed", self.seed.clone()),
        ]
    }
}

impl SelectArgs {
    fn flags(&self) -> Flags {
        vec![("route", self.route.clone()), ("method", self.method.clone()), ("k", self.k.clone())]
    }
}

impl NetArgs {
    fn flags(&self) -> Flags {
        vec![("hidden", self.hidden.clone()), ("iters", self.iters.clone()), ("alpha", self.alpha.clone())]
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate { common, data, out } => {
            let mut flags = data.flags();
            flags.push(("out", out));
            generate(&common.settings(flags)?)
        }
        Command::Select {
            common,
            data,
            sel,
            run_seed,
            out,
        } => {
            let mut flags = data.flags();
            flags.extend(sel.flags());
            flags.push(("run_seed", run_seed));
            flags.push(("out", out));
            select(&common.settings(flags)?)
        }
        Command::Train {
            common,
            data,
            sel,
            net,
            run_seed,
            out,
        } => {
            let mut flags = data.flags();
            flags.extend(sel.flags());
            flags.extend(net.flags());
            flags.push(("run_seed", run_seed));
            flags.push(("out", out));
            train(&common.settings(flags)?)
        }
        Command::Evaluate {
            common,
            data,
            model,
            run_seed,
            all,
            out,
        } => {
            let mut flags = data.flags();
            flags.push(("model", model));
            flags.push(("run_seed", run_seed));
            flags.push(("out", out));
            evaluate(&common.settings(flags)?, all)
        }
        Command::Pipeline {
            common,
            data,
            sel,
            net,
            seeds,
        } => {
            let mut flags = data.flags();
            flags.extend(sel.flags());
            flags.extend(net.flags());
            flags.push(("seeds", seeds));
            pipeline(&common.settings(flags)?)
        }
    }
}

fn load_dataset(s: &Settings) -> Result<Dataset> {
    let seed = s.data_seed()?;
    let ds = match s.get("dataset") {
        "gear" => generate_gear(&s.gear_params()?, seed)?,
        "cylinder" => generate_cylinder(&s.cylinder_params()?, seed)?,
        path => load_csv(path).with_context(|| format!("loading dataset {path}"))?,
    };
    Ok(ds)
}

/// Writes `contents` to `path` and its manifest line to `<path>.manifest`.
fn emit(s: &Settings, command: &str, path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    let mut manifest = path.as_os_str().to_owned();
    manifest.push(".manifest");
    let line = s.manifest_line(command, path);
    std::fs::write(&manifest, line + "\n").with_context(|| format!("writing {}", PathBuf::from(&manifest).display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn matrix_csv(header: &[String], m: &Matrix) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn generate(s: &Settings) -> Result<()> {
    let ds = load_dataset(s)?;
    let path = s.out_path(&format!("{}.csv", ds.name));
    emit(s, "generate", &path, &to_csv_string(&ds))
}

fn select(s: &Settings) -> Result<()> {
    let ds = load_dataset(s)?;
    let route = s.single_route(ds.label_dim())?;
    let method = s.single_method()?;
    let k = s.single_k()?;
    let mut cfg = s.pipeline(route)?;
    cfg.k_list = vec![k];
    cfg.methods = vec![method];
    let x = route.transform(&ds.inputs, &FeatureOrders::default())?;
    let fold = fit_fold(&x, &ds.labels, method, &cfg, s.parse("run_seed")?)?;
    let reduced = fold.transform(&x, k)?;
    let names: Vec<String> = match &fold.selector {
        Selector::Pca(_) => (1..=k).map(|c| format!("pc{c}")).collect(),
        Selector::Ard { orderings, .. } => {
            let original = |j: usize| fold.sof_columns.as_ref().map_or(j, |cols| cols[j]);
            orderings[0].1.iter().map(|&j| format!("{route}_{}", original(j))).collect()
        }
    };
    emit(s, "select", &s.out_path("selected.csv"), &matrix_csv(&names, &reduced))
}

fn train(s: &Settings) -> Result<()> {
    let ds = load_dataset(s)?;
    let route = s.single_route(ds.label_dim())?;
    let method = s.single_method()?;
    let k = s.single_k()?;
    let mut cfg = s.pipeline(route)?;
    cfg.k_list = vec![k];
    cfg.methods = vec![method];
    let seed: u64 = s.parse("run_seed")?;
    let x = route.transform(&ds.inputs, &cfg.feature_orders)?;
    let split = split_indices(&ds, cfg.train_frac, seed)?;
    let (train_x, train_y) = (x.select_rows(&split.train), ds.labels.select_rows(&split.train));
    let fold = fit_fold(&train_x, &train_y, method, &cfg, seed)?;
    let reduced = fold.transform(&train_x, k)?;
    let (classifier_norm, network) = train_classifier(&reduced, &train_y, &cfg.classifier, seed)?;
    let c = evaluate_classifier(&classifier_norm, &network, &reduced, &train_y)?;
    println!("training accuracy {:.2}% on {} examples", c.accuracy(), split.train.len());
    let saved = SavedModel {
        route,
        method,
        k,
        fold,
        classifier_norm,
        network,
    };
    emit(s, "train", &s.out_path("model.txt"), &saved.to_text())
}

fn evaluate(s: &Settings, all: bool) -> Result<()> {
    if !s.is_set("model") {
        anyhow::bail!("invalid config: evaluate needs --model");
    }
    let text = std::fs::read_to_string(s.get("model")).with_context(|| format!("reading model {}", s.get("model")))?;
    let saved = SavedModel::from_text(&text)?;
    let ds = load_dataset(s)?;
    let rows: Vec<usize> = if all {
        (0..ds.len()).collect()
    } else {
        let train_frac = s.pipeline(saved.route)?.train_frac;
        split_indices(&ds, train_frac, s.parse("run_seed")?)?.test
    };
    let x = saved.route.transform(&ds.inputs, &FeatureOrders::default())?;
    let x = saved.fold.transform(&x.select_rows(&rows), saved.k)?;
    let c = evaluate_classifier(&saved.classifier_norm, &saved.network, &x, &ds.labels.select_rows(&rows))?;
    println!("accuracy {:.2}% on {} examples", c.accuracy(), rows.len());
    let task = Task::for_label_dim(ds.label_dim());
    emit(s, "evaluate", &s.out_path("evaluation.csv"), &evaluation_csv(&saved, task, rows.len(), &c))
}

fn evaluation_csv(m: &SavedModel, task: Task, examples: usize, c: &ConfusionCounts) -> String {
    let mut out = String::from(
        "route,method,k,task,examples,decisions,correct,accuracy,true_pos,true_neg,false_pos,false_neg,wrong_severity\n",
    );
    writeln!(
        out,
        "{},{},{},{task},{examples},{},{},{:.4},{},{},{},{},{}",
        m.route,
        m.method,
        m.k,
        c.total(),
        c.correct(),
        c.accuracy(),
        c.true_pos,
        c.true_neg,
        c.false_pos,
        c.false_neg,
        c.wrong_severity
    )
    .unwrap();
    out
}

fn pipeline(s: &Settings) -> Result<()> {
    let ds = load_dataset(s)?;
    for route in s.routes(ds.label_dim())? {
        let cfg = s.pipeline(route)?;
        let reports = run_pipeline(&ds, &cfg)?;
        let stem = format!("{}_{route}", ds.name);
        let dir = s.out_dir();
        emit(s, "pipeline", &dir.join(format!("{stem}_table.csv")), &comparison_table_csv(&reports))?;
        emit(s, "pipeline", &dir.join(format!("{stem}_detail.csv")), &detail_csv(&reports))?;
        let methods: Vec<&str> = cfg.methods.iter().map(Method::name).collect();
        let title = format!("{} {route}: {}", ds.name, methods.join(" vs ").to_uppercase());
        emit(s, "pipeline", &dir.join(format!("{stem}_trend.svg")), &trend_svg(&reports, &title))?;
    }
    Ok(())
}
