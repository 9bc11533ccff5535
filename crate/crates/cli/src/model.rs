//! Saved classifier: everything fitted by `train`, in one text file.
//!
//! `key=value` header lines, then `@selector` followed by the PCA model CSV
//! (ARD stores its ordering in the header instead), then `@network` followed
//! by the network CSV.

use anyhow::{anyhow, bail, Context, Result};
use faultsel::ard::ArdState;
use faultsel::eval::Normalizer;
use faultsel::mlp::Network;
use faultsel::pca::PcaModel;
use faultsel::pipeline::{FittedFold, Method, Route, Selector};
use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub struct SavedModel {
    pub route: Route,
    pub method: Method,
    pub k: usize,
    pub fold: FittedFold,
    pub classifier_norm: Normalizer,
    pub network: Network,
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn split<T: std::str::FromStr>(s: &str, key: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| t.trim().parse().map_err(|_| anyhow!("model file: bad value `{t}` in {key}")))
        .collect()
}

impl SavedModel {
    pub fn to_text(&self) -> String {
        let mut out = String::from("#faultsel-model\n");
        writeln!(out, "route={}\nmethod={}\nk={}", self.route, self.method, self.k).unwrap();
        if let Some(cols) = &self.fold.sof_columns {
            writeln!(out, "sof_columns={}", join(cols)).unwrap();
        }
        writeln!(out, "means={}", join(&self.fold.normalizer.means)).unwrap();
        writeln!(out, "stds={}", join(&self.fold.normalizer.stds)).unwrap();
        writeln!(out, "classifier_means={}", join(&self.classifier_norm.means)).unwrap();
        writeln!(out, "classifier_stds={}", join(&self.classifier_norm.stds)).unwrap();
        match &self.fold.selector {
            Selector::Pca(model) => {
                out.push_str("@selector\n");
                out.push_str(&model.to_csv());
            }
            Selector::Ard { orderings, .. } => {
                let (_, ordering) = orderings.iter().find(|(k, _)| *k == self.k).expect("ordering for k");
                writeln!(out, "ordering={}", join(ordering)).unwrap();
            }
        }
        out.push_str("@network\n");
        out.push_str(&self.network.to_csv());
        out
    }

    pub fn from_text(text: &str) -> Result<SavedModel> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("#faultsel-model") {
            bail!("model file: missing `#faultsel-model` header");
        }
        let mut header = std::collections::BTreeMap::new();
        let mut selector = String::new();
        let mut network = String::new();
        let mut section = "";
        for line in lines {
            match line.trim() {
                "@selector" => section = "selector",
                "@network" => section = "network",
                l => match section {
                    "selector" => writeln!(selector, "{l}").unwrap(),
                    "network" => writeln!(network, "{l}").unwrap(),
                    _ if l.is_empty() => {}
                    _ => {
                        let (k, v) = l.split_once('=').ok_or_else(|| anyhow!("model file: bad line `{l}`"))?;
                        header.insert(k.to_string(), v.to_string());
                    }
                },
            }
        }
        let field = |k: &str| {
            header
                .get(k)
                .map(String::as_str)
                .ok_or_else(|| anyhow!("model file: missing `{k}`"))
        };
        let route: Route = field("route")?.parse()?;
        let method: Method = field("method")?.parse()?;
        let k: usize = field("k")?.parse().context("model file: k")?;
        let sof_columns = match header.get("sof_columns") {
            Some(v) => Some(split(v, "sof_columns")?),
            None => None,
        };
        let normalizer = Normalizer {
            means: split(field("means")?, "means")?,
            stds: split(field("stds")?, "stds")?,
        };
        let classifier_norm = Normalizer {
            means: split(field("classifier_means")?, "classifier_means")?,
            stds: split(field("classifier_stds")?, "classifier_stds")?,
        };
        let selector = match method {
            Method::Pca => Selector::Pca(PcaModel::from_csv(&selector)?),
            Method::Ard => {
                let ordering: Vec<usize> = split(field("ordering")?, "ordering")?;
                let n = normalizer.means.len();
                Selector::Ard {
                    state: ArdState {
                        n_inputs: n,
                        alphas: Vec::new(),
                        gammas: Vec::new(),
                        group_sizes: Vec::new(),
                        relevance: ordering.clone(),
                    },
                    orderings: vec![(k, ordering)],
                }
            }
        };
        Ok(SavedModel {
            route,
            method,
            k,
            fold: FittedFold {
                sof_columns,
                normalizer,
                selector,
            },
            classifier_norm,
            network: Network::from_csv(&network)?,
        })
    }
}
