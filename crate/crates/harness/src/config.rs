//! Experiment configuration.
//!
//! A configuration file is TOML; every key is optional and command-line
//! flags override it. Relative model paths are resolved against the
//! directory of the configuration file.
//!
//! ```toml
//! model = "../models/angle2.toml"
//! order = 3
//! eps = [0.1, 0.05, 0.025]
//! t_end = 1.0
//! times = [0.5, 1.0]
//! out = "out/angle2"
//! seed = 7
//! mode = "exact"
//! beta = "letters"
//!
//! [tolerances]
//! numeric = 1e-8
//! control = 1e-10
//! ```

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;
use wordseries_core::Mode;

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    NormalForm,
    Invariants,
    Decompose,
    Drift,
    FlowCompare,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::NormalForm => "normal-form",
            Command::Invariants => "invariants",
            Command::Decompose => "decompose",
            Command::Drift => "drift",
            Command::FlowCompare => "flow-compare",
            Command::Verify => "verify",
        }
    }
}

/// Coefficients of the perturbation: every letter with weight one, or none.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BetaChoice {
    #[default]
    Letters,
    Zero,
}

/// Deliberate corruptions used to show that the checks can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mutation {
    /// Shift one entry of the frequency table.
    Frequency,
    /// Move the change of variables along a resonant direction without
    /// adjusting the normal form.
    Gauge,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance for float-mode coefficient identities.
    pub float: f64,
    /// Absolute tolerance for identities evaluated at sample points.
    pub numeric: f64,
    /// Bound on the drift of the control Hamiltonian.
    pub control: f64,
    /// Required margin of the flow error order over `N`.
    pub flow_margin: f64,
    /// Allowed distance of the fitted drift order from `N + 1`.
    pub drift_band: f64,
    /// Relative band on the drift ratio `2^{N+1}` per halving of `eps`.
    pub ratio_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { float: 1e-12, numeric: 1e-8, control: 1e-10, flow_margin: 0.7, drift_band: 1.0, ratio_band: 0.25 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub model: PathBuf,
    pub order: usize,
    pub eps: Vec<f64>,
    pub t_end: f64,
    /// Observation times of the flow comparison.
    pub times: Vec<f64>,
    /// Integrator step; `min(0.01, eps^{(N+1)/4})` when absent.
    pub step: Option<f64>,
    pub out: PathBuf,
    pub seed: u64,
    /// Arithmetic mode; exact when the model has an explicit `v`.
    pub mode: Option<Mode>,
    pub beta: BetaChoice,
    pub mutate: Option<Mutation>,
    /// Directory of a previous `normal-form` run to re-validate.
    pub input: Option<PathBuf>,
    /// Number of map iterations in the group normal form orbit check.
    pub iterates: usize,
    pub tolerances: Tolerances,
}

/// Keys of a configuration file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<PathBuf>,
    pub order: Option<usize>,
    pub eps: Option<Vec<f64>>,
    pub t_end: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub step: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub beta: Option<BetaChoice>,
    pub mutate: Option<Mutation>,
    pub input: Option<PathBuf>,
    pub iterates: Option<usize>,
    pub tolerances: Option<Tolerances>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
            match line {
                Some(l) => HarnessError::Validation(format!("line {l}: {}", e.message())),
                None => HarnessError::Validation(e.message().to_string()),
            }
        })
    }

    /// Reads a file and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut file = Self::parse(&text)
            .map_err(|e| HarnessError::Validation(format!("{}: {}", path.display(), strip_prefix(&e))))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut file.model, &mut file.out, &mut file.input].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(file)
    }

    /// Fills in defaults and validates.
    pub fn into_config(self, command: Command) -> Result<ExperimentConfig> {
        let model = self.model.ok_or_else(|| HarnessError::Validation("no model file given".into()))?;
        let t_end = self.t_end.unwrap_or(1.0);
        let cfg = ExperimentConfig {
            command,
            model,
            order: self.order.unwrap_or(3),
            eps: self.eps.unwrap_or_else(|| vec![0.1, 0.05, 0.025]),
            t_end,
            times: self.times.unwrap_or_else(|| vec![t_end / 2.0, t_end]),
            step: self.step,
            out: self.out.unwrap_or_else(|| PathBuf::from("out")),
            seed: self.seed.unwrap_or(0),
            mode: self.mode,
            beta: self.beta.unwrap_or_default(),
            mutate: self.mutate,
            input: self.input,
            iterates: self.iterates.unwrap_or(3),
            tolerances: self.tolerances.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn strip_prefix(e: &HarnessError) -> String {
    match e {
        HarnessError::Validation(m) => m.clone(),
        other => other.to_string(),
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Validation(m));
        if self.order < 1 {
            return bad("order must be at least 1".into());
        }
        if self.eps.is_empty() {
            return bad("eps list is empty".into());
        }
        if let Some(e) = self.eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return bad(format!("eps values must be positive, found {e}"));
        }
        if self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("eps values must be strictly descending, found {:?}", self.eps));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, found {}", self.t_end));
        }
        if self.times.is_empty() || self.times.iter().any(|t| !(*t > 0.0 && *t <= self.t_end)) {
            return bad(format!("times must lie in (0, t_end], found {:?}", self.times));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return bad(format!("times must be strictly ascending, found {:?}", self.times));
        }
        if let Some(h) = self.step {
            if !(h.is_finite() && h > 0.0) {
                return bad(format!("step must be positive, found {h}"));
            }
        }
        if self.iterates < 1 {
            return bad("iterates must be at least 1".into());
        }
        let t = &self.tolerances;
        for (name, x) in [
            ("float", t.float),
            ("numeric", t.numeric),
            ("control", t.control),
            ("drift_band", t.drift_band),
            ("ratio_band", t.ratio_band),
        ] {
            if !(x.is_finite() && x > 0.0) {
                return bad(format!("tolerance {name} must be positive, found {x}"));
            }
        }
        Ok(())
    }

    /// Integrator step for a given `eps`.
    pub fn step_for(&self, eps: f64) -> f64 {
        self.step.unwrap_or_else(|| 0.01f64.min(eps.powf((self.order as f64 + 1.0) / 4.0)))
    }
}
