//! The comparison harness: for every route, method, reduction size and seed,
//! split, preprocess, select inputs on the training part only, train a
//! classifier with SCG and score it on the held-out part.

use crate::ard::{self, ArdOptions, ArdState};
use crate::error::{Error, Result};
use crate::eval::{
    classify, confusion, normalize_apply, normalize_fit, split_indices, ConfusionCounts, Normalizer, Task,
};
use crate::features::{feature_vector_with, FeatureOrders};
use crate::linalg::Matrix;
use crate::mlp::{init_network, Layout, Network, OutputKind, DEFAULT_HIDDEN};
use crate::pca::{fit_pca, project, PcaModel};
use crate::scg::ScgOptions;
use crate::signal::{decimate, dft_magnitude};
use crate::sof::{rank_by_sof, DEFAULT_SOF_K};
use crate::synthdata::Dataset;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    /// Raw modal vectors, SOF pre-selection on the training split.
    Sof,
    Time256,
    Time64,
    /// 128 one-sided magnitudes of the 256-point decimated record.
    Freq,
    Features62,
}

impl Route {
    pub const ALL: [Route; 5] = [Route::Sof, Route::Time256, Route::Time64, Route::Freq, Route::Features62];

    pub fn name(&self) -> &'static str {
        match self {
            Route::Sof => "sof",
            Route::Time256 => "time256",
            Route::Time64 => "time64",
            Route::Freq => "freq",
            Route::Features62 => "features62",
        }
    }

    /// Per-example transform; needs no fitted state.
    pub fn transform_example(&self, x: &[f64], orders: &FeatureOrders) -> Result<Vec<f64>> {
        match self {
            Route::Sof => Ok(x.to_vec()),
            Route::Time256 => decimate(x, 256),
            Route::Time64 => decimate(x, 64),
            Route::Freq => Ok(dft_magnitude(&decimate(x, 256)?)?.magnitudes),
            Route::Features62 => feature_vector_with(x, orders),
        }
    }

    pub fn transform(&self, inputs: &Matrix, orders: &FeatureOrders) -> Result<Matrix> {
        let rows = inputs
            .row_iter()
            .collect::<Vec<_>>()
            .par_iter()
            .enumerate()
            .map(|(i, x)| {
                self.transform_example(x, orders)
                    .map_err(|e| e.context(format!("{} preprocessing of example {i}", self.name())))
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        if rows.is_empty() {
            return Ok(Matrix::zeros(0, 0));
        }
        Matrix::from_rows(&rows)
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Route::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidOption(format!("unknown route `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Pca,
    Ard,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::Ard => "ard",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pca" => Ok(Method::Pca),
            "ard" => Ok(Method::Ard),
            other => Err(Error::InvalidOption(format!("unknown method `{other}`"))),
        }
    }
}

/// Training of the downstream classifier on the selected inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierOptions {
    pub n_hidden: usize,
    pub iters: usize,
    /// Shared weight-decay precision for every group.
    pub alpha: f64,
}

impl Default for ClassifierOptions {
    fn default() -> Self {
        ClassifierOptions {
            n_hidden: DEFAULT_HIDDEN,
            iters: 200,
            alpha: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub route: Route,
    pub methods: Vec<Method>,
    pub k_list: Vec<usize>,
    pub seeds: Vec<u64>,
    pub train_frac: f64,
    /// Indices kept by SOF pre-selection (route `sof`).
    pub sof_k: usize,
    pub feature_orders: FeatureOrders,
    pub classifier: ClassifierOptions,
    pub ard: ArdOptions,
    /// Hidden units of the ARD relevance network.
    pub ard_hidden: usize,
    /// Re-run ARD on the survivors before each smaller k instead of
    /// truncating one ordering.
    pub ard_per_k: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            route: Route::Time256,
            methods: vec![Method::Pca, Method::Ard],
            k_list: vec![3, 5, 7, 10],
            seeds: vec![1, 2, 3, 4, 5],
            train_frac: 2.0 / 3.0,
            sof_k: DEFAULT_SOF_K,
            feature_orders: FeatureOrders::default(),
            classifier: ClassifierOptions::default(),
            ard: ArdOptions::default(),
            ard_hidden: DEFAULT_HIDDEN,
            ard_per_k: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::InvalidOption("at least one seed is required".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidOption("at least one method is required".into()));
        }
        if self.k_list.is_empty() || self.k_list.contains(&0) {
            return Err(Error::InvalidK { k: 0, max: usize::MAX });
        }
        if self.classifier.n_hidden == 0 || self.classifier.iters == 0 || self.ard_hidden == 0 {
            return Err(Error::InvalidOption("network sizes and iteration counts must be positive".into()));
        }
        if !(self.classifier.alpha >= 0.0 && self.classifier.alpha.is_finite()) {
            return Err(Error::InvalidHyperparameter("classifier alpha must be nonnegative".into()));
        }
        self.ard.validate()
    }

    fn k_max(&self) -> usize {
        self.k_list.iter().copied().max().unwrap_or(0)
    }
}

/// Aggregated result of one (route, method, k) cell over all seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub method: Method,
    pub route: Route,
    pub k: usize,
    pub seeds: Vec<u64>,
    /// Test accuracy per seed, percent.
    pub accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub confusion: ConfusionCounts,
}

/// Input selector fitted on a training split.
#[derive(Debug, Clone, PartialEq)]
pub enum Selector {
    Pca(PcaModel),
    /// One ordering per requested k (identical prefixes unless re-run per k).
    Ard {
        state: ArdState,
        orderings: Vec<(usize, Vec<usize>)>,
    },
}

/// Everything fitted on the training split of one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedFold {
    /// SOF-selected column indices (route `sof` only).
    pub sof_columns: Option<Vec<usize>>,
    pub normalizer: Normalizer,
    pub selector: Selector,
}

/// Outcome of one (method, seed) cell: one confusion count per k.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub fitted: FittedFold,
    pub per_k: Vec<(usize, ConfusionCounts)>,
}

pub fn output_kind(task: Task) -> OutputKind {
    match task {
        Task::Multilabel => OutputKind::Logistic,
        Task::Graded => OutputKind::Linear,
    }
}

fn healthy_mask(labels: &Matrix) -> Vec<bool> {
    labels.row_iter().map(|r| r.iter().all(|&v| v == 0.0)).collect()
}

/// Fits SOF (when applicable), normalization and the selector on `train`.
pub fn fit_fold(train_x: &Matrix, train_y: &Matrix, method: Method, cfg: &PipelineConfig, seed: u64) -> Result<FittedFold> {
    let task = Task::for_label_dim(train_y.cols());
    let (sof_columns, x) = if cfg.route == Route::Sof {
        let healthy = healthy_mask(train_y);
        let h_rows: Vec<usize> = (0..train_x.rows()).filter(|&i| healthy[i]).collect();
        let d_rows: Vec<usize> = (0..train_x.rows()).filter(|&i| !healthy[i]).collect();
        let k = cfg.sof_k.min(train_x.cols());
        let ranking = rank_by_sof(&train_x.select_rows(&h_rows), &train_x.select_rows(&d_rows), k)
            .map_err(|e| e.context("SOF pre-selection"))?;
        let x = train_x.select_columns(&ranking.selected)?;
        (Some(ranking.selected), x)
    } else {
        (None, train_x.clone())
    };
    let normalizer = normalize_fit(&x)?;
    let x = normalize_apply(&x, &normalizer)?;
    let k_max = cfg.k_max();
    if k_max > x.cols() {
        return Err(Error::InvalidK { k: k_max, max: x.cols() });
    }
    let selector = match method {
        Method::Pca => Selector::Pca(fit_pca(&x, k_max)?),
        Method::Ard => {
            let layout = Layout::new(x.cols(), cfg.ard_hidden, train_y.cols(), output_kind(task))?;
            let (_, state) = ard::ard_train(&x, train_y, layout, &cfg.ard, seed)?;
            let mut ks: Vec<usize> = cfg.k_list.clone();
            ks.sort_unstable_by(|a, b| b.cmp(a));
            ks.dedup();
            let orderings = if cfg.ard_per_k {
                per_k_orderings(&x, train_y, &state, &ks, cfg, seed, task)?
            } else {
                ks.iter().map(|&k| (k, state.relevance[..k].to_vec())).collect()
            };
            Selector::Ard { state, orderings }
        }
    };
    Ok(FittedFold {
        sof_columns,
        normalizer,
        selector,
    })
}

/// Successive elimination: keep the top k of the previous survivors, then
/// re-run ARD on just those before choosing the next smaller k.
fn per_k_orderings(
    x: &Matrix,
    y: &Matrix,
    full: &ArdState,
    ks_desc: &[usize],
    cfg: &PipelineConfig,
    seed: u64,
    task: Task,
) -> Result<Vec<(usize, Vec<usize>)>> {
    let mut survivors: Vec<usize> = full.relevance.clone();
    let mut out = Vec::new();
    for (i, &k) in ks_desc.iter().enumerate() {
        if i > 0 {
            let sub = x.select_columns(&survivors)?;
            let layout = Layout::new(sub.cols(), cfg.ard_hidden, y.cols(), output_kind(task))?;
            let (_, st) = ard::ard_train(&sub, y, layout, &cfg.ard, seed)?;
            survivors = st.relevance.iter().map(|&j| survivors[j]).collect();
        }
        survivors.truncate(k);
        out.push((k, survivors.clone()));
    }
    Ok(out)
}

impl FittedFold {
    /// Applies every fitted stage; returns the k selected/projected columns.
    pub fn transform(&self, x: &Matrix, k: usize) -> Result<Matrix> {
        let x = match &self.sof_columns {
            Some(cols) => x.select_columns(cols)?,
            None => x.clone(),
        };
        let x = normalize_apply(&x, &self.normalizer)?;
        match &self.selector {
            Selector::Pca(model) => project(&model.truncate(k)?, &x),
            Selector::Ard { orderings, .. } => {
                let ordering = orderings
                    .iter()
                    .find(|(kk, _)| *kk == k)
                    .map(|(_, o)| o)
                    .ok_or(Error::InvalidK { k, max: x.cols() })?;
                x.select_columns(ordering)
            }
        }
    }
}

fn classifier_seed(seed: u64, method: Method, k: usize) -> u64 {
    seed.wrapping_mul(1_000_003)
        .wrapping_add(k as u64 * 7919)
        .wrapping_add(method as u64)
}

/// Trains the downstream classifier on already selected inputs.
pub fn train_classifier(x: &Matrix, y: &Matrix, opts: &ClassifierOptions, seed: u64) -> Result<(Normalizer, Network)> {
    let task = Task::for_label_dim(y.cols());
    let norm = normalize_fit(x)?;
    let xn = normalize_apply(x, &norm)?;
    let layout = Layout::new(x.cols(), opts.n_hidden, y.cols(), output_kind(task))?;
    let mut net = init_network(layout, seed);
    let alphas = vec![opts.alpha; layout.group_count()];
    let scg = ScgOptions {
        max_iters: opts.iters,
        ..ScgOptions::default()
    };
    ard::train_regularized(&mut net, &xn, y, &alphas, &scg)?;
    Ok((norm, net))
}

pub fn evaluate_classifier(norm: &Normalizer, net: &Network, x: &Matrix, y: &Matrix) -> Result<ConfusionCounts> {
    let task = Task::for_label_dim(y.cols());
    let out = net.predict(&normalize_apply(x, norm)?)?;
    confusion(&classify(&out, task), y, task)
}

/// One (method, seed) cell on preprocessed inputs.
pub fn run_cell(
    x: &Matrix,
    labels: &Matrix,
    train_rows: &[usize],
    test_rows: &[usize],
    method: Method,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<CellOutcome> {
    let (train_x, train_y) = (x.select_rows(train_rows), labels.select_rows(train_rows));
    let (test_x, test_y) = (x.select_rows(test_rows), labels.select_rows(test_rows));
    let fitted = fit_fold(&train_x, &train_y, method, cfg, seed)?;
    let per_k = cfg
        .k_list
        .iter()
        .map(|&k| {
            let tr = fitted.transform(&train_x, k)?;
            let te = fitted.transform(&test_x, k)?;
            let (norm, net) = train_classifier(&tr, &train_y, &cfg.classifier, classifier_seed(seed, method, k))?;
            Ok((k, evaluate_classifier(&norm, &net, &te, &test_y)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CellOutcome { fitted, per_k })
}

/// Runs every (method, k, seed) cell of one route on `ds` and aggregates one
/// report per (method, k), methods in config order and k ascending.
pub fn run_pipeline(ds: &Dataset, cfg: &PipelineConfig) -> Result<Vec<EvalReport>> {
    cfg.validate()?;
    ds.validate()?;
    let x = cfg.route.transform(&ds.inputs, &cfg.feature_orders)?;
    let splits = cfg
        .seeds
        .iter()
        .map(|&s| split_indices(ds, cfg.train_frac, s))
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(Method, usize)> = cfg
        .methods
        .iter()
        .flat_map(|&m| (0..cfg.seeds.len()).map(move |i| (m, i)))
        .collect();
    let outcomes = cells
        .par_iter()
        .map(|&(method, i)| {
            let seed = cfg.seeds[i];
            run_cell(&x, &ds.labels, &splits[i].train, &splits[i].test, method, cfg, seed)
                .map_err(|e| e.context(format!("route {} method {method} seed {seed}", cfg.route)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut ks = cfg.k_list.clone();
    ks.sort_unstable();
    ks.dedup();
    let mut reports = Vec::new();
    for &method in &cfg.methods {
        for &k in &ks {
            let mut accuracies = Vec::new();
            let mut total = ConfusionCounts::default();
            for (&(m, _), outcome) in cells.iter().zip(&outcomes) {
                if m != method {
                    continue;
                }
                let (_, c) = outcome.per_k.iter().find(|(kk, _)| *kk == k).expect("k evaluated");
                accuracies.push(c.accuracy());
                total.merge(c);
            }
            let mean_accuracy = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
            reports.push(EvalReport {
                method,
                route: cfg.route,
                k,
                seeds: cfg.seeds.clone(),
                accuracies,
                mean_accuracy,
                confusion: total,
            });
        }
    }
    Ok(reports)
}
