//! Driver for word series computations on model files: normal forms,
//! commuting decompositions, formal invariants, numerical experiments and
//! the bundled verification suites.

pub mod config;
pub mod error;
pub mod experiments;
pub mod integrate;
pub mod reduce;
pub mod report;
pub mod verify;

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wordseries_core::scalar::gaussian;
use wordseries_core::serial::JsonScalar;
use wordseries_core::{CoeffMap, FreqTable, FreqVector, GaussianRational, Mode, Scalar, Word};
use wordseries_models::config::load_model;
use wordseries_models::Model;

pub use config::{BetaChoice, Command, ExperimentConfig, Mutation, Tolerances};
pub use error::{HarnessError, Result};
pub use report::Report;

/// Model, frequency vector and perturbation coefficients of a run.
#[derive(Clone, Debug)]
pub struct Setup<S> {
    pub model: Model<S>,
    pub v: FreqVector,
    pub beta: CoeffMap<S>,
}

impl<S: Scalar> Setup<S> {
    pub fn new(model: Model<S>, order: usize, choice: BetaChoice) -> Result<Self> {
        let v = model.v()?.clone();
        let a = model.alphabet();
        let beta = match choice {
            BetaChoice::Letters => CoeffMap::letters_indicator(a, order)?,
            BetaChoice::Zero => CoeffMap::zero(a, order)?,
        };
        Ok(Setup { model, v, beta })
    }

    pub fn table(&self) -> &FreqTable {
        &self.model.table
    }

    /// Letter names of a word, `∅` for the empty word.
    pub fn label(&self, w: &Word) -> String {
        word_label(&self.model, w)
    }
}

pub fn word_label<S>(model: &Model<S>, w: &Word) -> String {
    if w.is_empty() {
        return "∅".into();
    }
    w.letters().iter().map(|l| model.letters[l.index()].name.as_str()).collect::<Vec<_>>().join(" ")
}

/// Loads the model and applies a frequency mutation if requested.
pub fn load(cfg: &ExperimentConfig) -> Result<Model<GaussianRational>> {
    let mut model = load_model(&cfg.model)?;
    if cfg.mutate == Some(Mutation::Frequency) {
        mutate_frequency(&mut model, cfg.seed)?;
    }
    Ok(model)
}

/// Adds `i` to one seeded entry `nu_{j,l}` of the frequency table.
pub fn mutate_frequency<S>(model: &mut Model<S>, seed: u64) -> Result<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = model.table.d();
    let j = rng.gen_range(0..d);
    let l = rng.gen_range(0..model.table.alphabet());
    let mut rows: Vec<Vec<GaussianRational>> = (0..model.table.alphabet()).map(|k| model.table.letter(k).clone()).collect();
    rows[l][j] = rows[l][j].clone() + gaussian(0, 1);
    model.table = FreqTable::new(d, rows)?;
    Ok((j, l))
}

/// Exact unless the configuration asks otherwise or `v` is generic.
pub fn resolve_mode<S>(cfg: &ExperimentConfig, model: &Model<S>) -> Result<Mode> {
    let generic = matches!(model.v, Some(FreqVector::Generic(_)));
    match cfg.mode {
        Some(Mode::Exact) if generic => Err(HarnessError::Validation(
            "exact mode needs an explicit frequency vector; use --mode float".into(),
        )),
        Some(m) => Ok(m),
        None if generic => Ok(Mode::Float),
        None => Ok(Mode::Exact),
    }
}

/// Runs the configured command, writes its files and the summary into the
/// output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let model = load(cfg)?;
    let report = match resolve_mode(cfg, &model)? {
        Mode::Exact => run_in::<GaussianRational>(cfg, model)?,
        Mode::Float => run_in::<Complex64>(cfg, model.to_float())?,
    };
    report.write(&cfg.out)?;
    Ok(report)
}

fn run_in<S: JsonScalar>(cfg: &ExperimentConfig, model: Model<S>) -> Result<Report> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| HarnessError::io(&cfg.out, e))?;
    let setup = Setup::new(model, cfg.order, cfg.beta)?;
    match cfg.command {
        Command::NormalForm => reduce::normal_form(cfg, &setup),
        Command::Decompose => reduce::decompose(cfg, &setup),
        Command::Invariants => reduce::invariants(cfg, &setup),
        Command::Drift => experiments::drift(cfg, &setup),
        Command::FlowCompare => experiments::flow_compare(cfg, &setup),
        Command::Verify => verify::verify(cfg, &setup),
    }
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| HarnessError::io(&path, e))
}

/// Equality in exact mode, relative closeness in float mode.
pub fn maps_agree<S: Scalar>(a: &CoeffMap<S>, b: &CoeffMap<S>, tol: f64) -> bool {
    match S::MODE {
        Mode::Exact => a == b,
        Mode::Float => a.max_abs_diff(b) <= tol * a.max_abs().max(b.max_abs()).max(1.0),
    }
}

/// Zero in exact mode, negligible relative to `scale` in float mode.
pub fn map_vanishes<S: Scalar>(a: &CoeffMap<S>, scale: f64, tol: f64) -> bool {
    match S::MODE {
        Mode::Exact => a.is_zero(),
        Mode::Float => a.max_abs() <= tol * scale.max(1.0),
    }
}
