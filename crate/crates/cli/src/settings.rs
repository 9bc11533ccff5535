//! Resolved run configuration: built-in defaults, then the `--config` file,
//! then command-line flags.

use anyhow::{anyhow, bail, Context, Result};
use faultsel::ard::{ArdOptions, RankMode};
use faultsel::pipeline::{ClassifierOptions, Method, PipelineConfig, Route};
use faultsel::synthdata::{CylinderGenParams, GearGenParams, DEFAULT_DATA_SEED};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Every recognized key with its default. An empty default means unset.
const KEYS: &[(&str, &str)] = &[
    ("dataset", "gear"),
    ("seed", ""),
    ("route", ""),
    ("method", "both"),
    ("k", "3,5,7,10"),
    ("seeds", "1,2,3,4,5"),
    ("run_seed", "1"),
    ("train_frac", "0.6666666666666666"),
    ("sof_k", "50"),
    ("hidden", "8"),
    ("iters", "200"),
    ("alpha", "0.01"),
    ("ard_hidden", "8"),
    ("ard_cycles", "2"),
    ("ard_iters", "100"),
    ("ard_alpha_init", "0.1"),
    ("ard_rank", "variance"),
    ("ard_per_k", "false"),
    ("out_dir", "."),
    ("out", ""),
    ("model", ""),
    ("gear.revs_per_class", "100"),
    ("gear.points_per_rev", "1024"),
    ("gear.noise_std", "0.1"),
    ("gear.severity_gain", "1"),
    ("gear.pulse_width", "0.01"),
    ("gear.fault_angle", "0.3"),
    ("cylinder.cases", "264"),
    ("cylinder.fault_shift", "2"),
    ("cylinder.noise_std", "0.5"),
    ("cylinder.nuisance_factors", "5"),
    ("cylinder.nuisance_std", "1"),
];

#[derive(Debug, Clone)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

impl Settings {
    /// `flags` are (key, value) pairs from the command line, already in
    /// key form; they override the file.
    pub fn resolve(config: Option<&Path>, flags: Vec<(&str, Option<String>)>, sets: &[String]) -> Result<Settings> {
        let mut values: BTreeMap<String, String> =
            KEYS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = split_pair(line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
                values.insert(k, v);
            }
        }
        for s in sets {
            let (k, v) = split_pair(s).context("--set")?;
            values.insert(k, v);
        }
        for (k, v) in flags {
            if let Some(v) = v {
                values.insert(k.to_string(), v);
            }
        }
        Ok(Settings { values })
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn is_set(&self, key: &str) -> bool {
        !self.get(key).is_empty()
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.get(key);
        raw.trim()
            .parse()
            .map_err(|e| anyhow!("invalid config: {key} = `{raw}`: {e}"))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e| anyhow!("invalid config: {key} item `{s}`: {e}")))
            .collect()
    }

    /// Reduction sizes; every entry must be positive.
    pub fn k_list(&self) -> Result<Vec<usize>> {
        let ks: Vec<usize> = self.list("k")?;
        if ks.is_empty() {
            bail!("invalid k: empty list");
        }
        if let Some(bad) = ks.iter().find(|&&k| k == 0) {
            bail!("invalid k: {bad} (must be at least 1)");
        }
        Ok(ks)
    }

    pub fn single_k(&self) -> Result<usize> {
        match self.k_list()?.as_slice() {
            [k] => Ok(*k),
            _ => bail!("invalid k: `{}` (this command takes one value)", self.get("k")),
        }
    }

    pub fn methods(&self) -> Result<Vec<Method>> {
        match self.get("method") {
            "both" => Ok(vec![Method::Pca, Method::Ard]),
            m => Ok(vec![m.parse()?]),
        }
    }

    pub fn single_method(&self) -> Result<Method> {
        match self.methods()?.as_slice() {
            [m] => Ok(*m),
            _ => bail!("invalid config: this command takes `--method pca` or `--method ard`"),
        }
    }

    /// The configured routes, or the natural one for data with `label_dim`
    /// outputs: SOF for the multilabel cylinder data, time256 otherwise.
    pub fn routes(&self, label_dim: usize) -> Result<Vec<Route>> {
        if !self.is_set("route") {
            return Ok(vec![if label_dim > 1 { Route::Sof } else { Route::Time256 }]);
        }
        let routes: Vec<Route> = self.list("route")?;
        if routes.is_empty() {
            bail!("invalid config: empty route list");
        }
        Ok(routes)
    }

    pub fn single_route(&self, label_dim: usize) -> Result<Route> {
        match self.routes(label_dim)?.as_slice() {
            [r] => Ok(*r),
            _ => bail!("invalid config: this command takes one route"),
        }
    }

    pub fn data_seed(&self) -> Result<u64> {
        if self.is_set("seed") {
            self.parse("seed")
        } else {
            Ok(DEFAULT_DATA_SEED)
        }
    }

    pub fn gear_params(&self) -> Result<GearGenParams> {
        Ok(GearGenParams {
            revs_per_class: self.parse("gear.revs_per_class")?,
            points_per_rev: self.parse("gear.points_per_rev")?,
            noise_std: self.parse("gear.noise_std")?,
            severity_gain: self.parse("gear.severity_gain")?,
            pulse_width: self.parse("gear.pulse_width")?,
            fault_angle: self.parse("gear.fault_angle")?,
            ..GearGenParams::default()
        })
    }

    pub fn cylinder_params(&self) -> Result<CylinderGenParams> {
        Ok(CylinderGenParams {
            cases: self.parse("cylinder.cases")?,
            fault_shift: self.parse("cylinder.fault_shift")?,
            noise_std: self.parse("cylinder.noise_std")?,
            nuisance_factors: self.parse("cylinder.nuisance_factors")?,
            nuisance_std: self.parse("cylinder.nuisance_std")?,
            ..CylinderGenParams::default()
        })
    }

    pub fn classifier(&self) -> Result<ClassifierOptions> {
        Ok(ClassifierOptions {
            n_hidden: self.parse("hidden")?,
            iters: self.parse("iters")?,
            alpha: self.parse("alpha")?,
        })
    }

    pub fn ard(&self) -> Result<ArdOptions> {
        Ok(ArdOptions {
            cycles: self.parse("ard_cycles")?,
            iters_per_cycle: self.parse("ard_iters")?,
            alpha_init: self.parse("ard_alpha_init")?,
            rank_mode: self.parse::<RankMode>("ard_rank")?,
            ..ArdOptions::default()
        })
    }

    /// Pipeline configuration for one route; `k_list` and `methods` as
    /// configured.
    pub fn pipeline(&self, route: Route) -> Result<PipelineConfig> {
        let seeds: Vec<u64> = self.list("seeds")?;
        if seeds.is_empty() {
            bail!("invalid config: seeds must be nonempty");
        }
        let cfg = PipelineConfig {
            route,
            methods: self.methods()?,
            k_list: self.k_list()?,
            seeds,
            train_frac: self.parse("train_frac")?,
            sof_k: self.parse("sof_k")?,
            classifier: self.classifier()?,
            ard: self.ard()?,
            ard_hidden: self.parse("ard_hidden")?,
            ard_per_k: self.parse("ard_per_k")?,
            ..PipelineConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.get("out_dir"))
    }

    /// `--out` when given, else `default_name` inside the output directory.
    pub fn out_path(&self, default_name: &str) -> PathBuf {
        if self.is_set("out") {
            PathBuf::from(self.get("out"))
        } else {
            self.out_dir().join(default_name)
        }
    }

    /// One line recording every resolved key, in key order.
    pub fn manifest_line(&self, command: &str, file: &Path) -> String {
        let mut line = format!("file={} command={command}", file.display());
        for (k, v) in &self.values {
            line.push(' ');
            line.push_str(k);
            line.push('=');
            line.push_str(v);
        }
        line
    }
}

fn split_pair(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| anyhow!("invalid config: expected key=value, found `{s}`"))?;
    let k = k.trim().replace('-', "_");
    if !known(&k) {
        bail!("invalid config: unknown key `{k}`");
    }
    Ok((k, v.trim().to_string()))
}
