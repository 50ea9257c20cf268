//! Numerical experiments: drift of formal invariants along trajectories and
//! comparison of the extended word series with the integrated flow.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use wordseries_core::{CoeffMap, ExtCoeff, FreqVector, Membership, Scalar, Word};
use wordseries_models::hamiltonian::{assemble_hamiltonian, GradedHamiltonian};
use wordseries_models::jet::Jet;
use wordseries_models::series::eval_ext_series_jet;
use wordseries_models::{Model, VectorField, WordBasis};

use crate::config::{Command, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::integrate::{fitted_order, integrate, pairwise_orders};
use crate::reduce::compute_invariants;
use crate::report::{status, Report};
use crate::{write_file, Setup};

/// The perturbed field `g^v + eps sum_l beta_l f_l` split into its two
/// parts.
pub struct Ode {
    pub unperturbed: VectorField<Complex64>,
    pub perturbation: VectorField<Complex64>,
}

impl Ode {
    pub fn new<S: Scalar>(setup: &Setup<S>) -> Result<Self> {
        let model = setup.model.to_float();
        let unperturbed = model.g_v(&setup.v)?;
        let mut perturbation = VectorField::zero(model.dim, model.angles);
        for (l, spec) in model.letters.iter().enumerate() {
            let c = setup.beta.get(&Word::letter(l)).expect("letters present").to_c64();
            perturbation = perturbation.add(&spec.field.scale(&c))?;
        }
        Ok(Ode { unperturbed, perturbation })
    }

    pub fn rhs(&self, eps: f64) -> impl Fn(&[Complex64]) -> Vec<Complex64> + '_ {
        move |x| {
            let g = self.unperturbed.eval(x);
            let p = self.perturbation.eval(x);
            g.iter().zip(&p).map(|(a, b)| a + b * eps).collect()
        }
    }
}

/// Number of seeded initial points; errors and drifts are maxima over them.
pub const TRAJECTORIES: usize = 3;

fn initial_points<S: Scalar>(model: &Model<S>, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..TRAJECTORIES).map(|_| model.sample_point(&mut rng)).collect()
}

/// Runs `job` for every `eps` on its own thread, keeping the order.
fn per_eps<T: Send>(eps: &[f64], job: impl Fn(f64) -> Result<T> + Sync) -> Result<Vec<T>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = eps.iter().map(|&e| { let job = &job; s.spawn(move || job(e)) }).collect();
        handles.into_iter().map(|h| h.join().expect("experiment thread panicked")).collect()
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftRow {
    pub invariant: String,
    pub eps: f64,
    pub step: f64,
    pub max_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftFit {
    pub invariant: String,
    pub control: bool,
    /// Least-squares order over the whole ladder; absent for the control.
    pub order: Option<f64>,
    pub pairwise_orders: Vec<f64>,
    /// `drift(eps_i) / drift(eps_{i+1})` against `(eps_i / eps_{i+1})^{N+1}`.
    pub ratios: Vec<f64>,
    pub expected_ratios: Vec<f64>,
    pub ratios_within_band: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftReport {
    pub model: String,
    pub order: usize,
    pub expected_order: usize,
    pub x0: Vec<Vec<[f64; 2]>>,
    pub rows: Vec<DriftRow>,
    pub fits: Vec<DriftFit>,
    pub passed: bool,
}

impl DriftReport {
    pub fn fit(&self, invariant: &str) -> Option<&DriftFit> {
        self.fits.iter().find(|f| f.invariant == invariant)
    }

    pub fn control_max(&self) -> f64 {
        let names: Vec<&str> = self.fits.iter().filter(|f| f.control).map(|f| f.invariant.as_str()).collect();
        self.rows.iter().filter(|r| names.contains(&r.invariant.as_str())).map(|r| r.max_drift).fold(0.0, f64::max)
    }
}

pub const CONTROL: &str = "control H(v, beta)";

/// Integrates the full system for each `eps` and records the largest
/// excursion of each truncated invariant from its initial value.
pub fn drift_report<S: Scalar>(cfg: &ExperimentConfig, setup: &Setup<S>) -> Result<DriftReport> {
    let (invs, dec, basis) = compute_invariants(cfg, setup)?;
    let model = &setup.model;
    let mut functions: Vec<(String, bool, GradedHamiltonian<Complex64>)> =
        invs.iter().map(|i| (i.label.clone(), false, i.hamiltonian.to_float())).collect();
    let zero = FreqVector::zero(model.d());
    let bar = assemble_hamiltonian(model, &basis, &ExtCoeff::algebra(zero, dec.beta_bar.clone())?)?;
    functions.push(("H(0, beta_bar)".into(), false, bar.to_float()));
    let full = assemble_hamiltonian(model, &basis, &ExtCoeff::algebra(setup.v.clone(), setup.beta.clone())?)?;
    functions.push((CONTROL.into(), true, full.to_float()));

    let ode = Ode::new(setup)?;
    let points = initial_points(model, cfg.seed);
    let drifts = per_eps(&cfg.eps, |eps| {
        let mut worst = vec![0.0f64; functions.len()];
        let h = cfg.step_for(eps);
        for x0 in &points {
            let start: Vec<Complex64> = functions.iter().map(|(_, _, f)| f.eval(x0, eps)).collect();
            integrate(&ode.rhs(eps), x0, 0.0, cfg.t_end, h, |_, x| {
                for (k, (_, _, f)) in functions.iter().enumerate() {
                    worst[k] = worst[k].max((f.eval(x, eps) - start[k]).norm());
                }
            })
            .map_err(|e| match e {
                HarnessError::Property(m) => HarnessError::Property(format!("eps = {eps}: {m}")),
                other => other,
            })?;
        }
        Ok((h, worst))
    })?;

    let n1 = cfg.order as i32 + 1;
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for (k, (name, control, _)) in functions.iter().enumerate() {
        let errs: Vec<f64> = drifts.iter().map(|(_, w)| w[k]).collect();
        for (e, (h, w)) in cfg.eps.iter().zip(&drifts) {
            rows.push(DriftRow { invariant: name.clone(), eps: *e, step: *h, max_drift: w[k] });
        }
        let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
        let expected: Vec<f64> = cfg.eps.windows(2).map(|e| (e[0] / e[1]).powi(n1)).collect();
        let band = cfg.tolerances.ratio_band;
        let within = ratios.iter().zip(&expected).all(|(r, x)| (r / x - 1.0).abs() <= band);
        let (order, passed) = if *control {
            (None, errs.iter().all(|e| *e < cfg.tolerances.control))
        } else {
            let p = fitted_order(&cfg.eps, &errs);
            (Some(p), (p - n1 as f64).abs() <= cfg.tolerances.drift_band)
        };
        fits.push(DriftFit {
            invariant: name.clone(),
            control: *control,
            order,
            pairwise_orders: pairwise_orders(&cfg.eps, &errs),
            ratios,
            expected_ratios: expected,
            ratios_within_band: within,
            passed,
        });
    }
    let passed = fits.iter().all(|f| f.passed);
    Ok(DriftReport {
        model: model.name.clone(),
        order: cfg.order,
        expected_order: cfg.order + 1,
        x0: points.iter().map(|x| x.iter().map(|z| [z.re, z.im]).collect()).collect(),
        rows,
        fits,
        passed,
    })
}

pub fn drift<S: Scalar>(cfg: &ExperimentConfig, setup: &Setup<S>) -> Result<Report> {
    let report = drift_report(cfg, setup)?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    for row in &report.rows {
        csv.serialize(row).map_err(|e| HarnessError::Validation(e.to_string()))?;
    }
    let bytes = csv.into_inner().map_err(|e| HarnessError::Validation(e.to_string()))?;
    write_file(&cfg.out, "drift.csv", &String::from_utf8(bytes).expect("csv is utf-8"))?;
    let data = serde_json::to_value(&report).expect("report serializes");
    write_file(&cfg.out, "drift.json", &serde_json::to_string_pretty(&data).expect("json serializes"))?;

    let mut summary = format!(
        "invariant drift for model {} at order {} over t in [0, {}], eps = {:?}\n",
        report.model, report.order, cfg.t_end, cfg.eps
    );
    for f in &report.fits {
        let drifts: Vec<String> = report
            .rows
            .iter()
            .filter(|r| r.invariant == f.invariant)
            .map(|r| format!("{:.3e}", r.max_drift))
            .collect();
        match f.order {
            Some(p) => summary.push_str(&format!(
                "{}: drift [{}], fitted order {:.3} (expected {}), ratio band {}: {}\n",
                f.invariant,
                drifts.join(", "),
                p,
                report.expected_order,
                if f.ratios_within_band { "within" } else { "outside" },
                status(f.passed)
            )),
            None => summary.push_str(&format!(
                "{}: drift [{}] (bound {:e}): {}\n",
                f.invariant,
                drifts.join(", "),
                cfg.tolerances.control,
                status(f.passed)
            )),
        }
    }
    Ok(Report::new(Command::Drift, report.passed, summary, data))
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowRow {
    pub eps: f64,
    pub t: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitCheck {
    pub iterates: usize,
    pub max_difference: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    pub model: String,
    pub order: usize,
    pub rows: Vec<FlowRow>,
    /// Fitted order of the largest error over the observation times.
    pub fitted_order: f64,
    pub pairwise_orders: Vec<f64>,
    pub required_order: f64,
    pub orbit: OrbitCheck,
    pub passed: bool,
}

/// `x(t) = phi_{tv}(W_{alpha(t)}(x0))` against the integrated system, and
/// the orbit of the time-one map against its conjugated normal form.
pub fn flow_report<S: Scalar>(cfg: &ExperimentConfig, setup: &Setup<S>) -> Result<FlowReport> {
    let model = setup.model.to_float();
    let table = setup.table();
    let curve = table.ext_exp_curve(&ExtCoeff::algebra(setup.v.clone(), setup.beta.clone())?)?;
    let basis = WordBasis::from_model(&model, cfg.order)?;
    let ode = Ode::new(setup)?;
    let points = initial_points(&model, cfg.seed);
    let vs = setup.v.numeric();
    let alphas: Vec<(f64, CoeffMap<Complex64>)> = cfg.times.iter().map(|&t| (t, curve.at(t))).collect();

    let errors = per_eps(&cfg.eps, |eps| {
        let f = ode.rhs(eps);
        let mut out = vec![0.0f64; alphas.len()];
        for x0 in &points {
            let mut x = x0.clone();
            let mut t0 = 0.0;
            for (k, (t, alpha)) in alphas.iter().enumerate() {
                x = integrate(&f, &x, t0, *t, cfg.step_for(eps), |_, _| {})?;
                t0 = *t;
                let tv = FreqVector::Generic(vs.iter().map(|c| c * t).collect());
                let series = model.flow(&tv, &basis.eval(alpha, x0, eps)?);
                out[k] = out[k].max(series.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
            }
        }
        Ok(out)
    })?;

    let mut rows = Vec::new();
    for (eps, errs) in cfg.eps.iter().zip(&errors) {
        for ((t, _), e) in alphas.iter().zip(errs) {
            rows.push(FlowRow { eps: *eps, t: *t, error: *e });
        }
    }
    let worst: Vec<f64> = errors.iter().map(|e| e.iter().copied().fold(0.0, f64::max)).collect();
    let p = fitted_order(&cfg.eps, &worst);
    let required = cfg.order as f64 + cfg.tolerances.flow_margin;
    let orbit = orbit_check(cfg, setup, &model, &basis, &curve.at(1.0), &points[0])?;
    let passed = p >= required && orbit.passed;
    Ok(FlowReport {
        model: model.name.clone(),
        order: cfg.order,
        rows,
        fitted_order: p,
        pairwise_orders: pairwise_orders(&cfg.eps, &worst),
        required_order: required,
        orbit,
        passed,
    })
}

/// `Wbar_{(v, eta)}^k(x0)` against `W_kappa(Wbar_{(v, eta_hat)}^k(W_{kappa^{-1}}(x0)))`
/// as series in `eps` through the truncation order.
fn orbit_check<S: Scalar>(
    cfg: &ExperimentConfig,
    setup: &Setup<S>,
    model: &Model<Complex64>,
    basis: &WordBasis<Complex64>,
    eta: &CoeffMap<Complex64>,
    x0: &[Complex64],
) -> Result<OrbitCheck> {
    let gnf = setup.table().group_normal_form(&setup.v, eta)?;
    let ext = |delta: &CoeffMap<Complex64>| ExtCoeff { v: setup.v.clone(), delta: delta.clone(), class: Membership::Group };
    let (full, reduced) = (ext(eta), ext(&gnf.eta_hat));
    let start: Vec<Jet> = x0.iter().map(|&c| Jet::constant(c, cfg.order)).collect();
    let mut direct = start.clone();
    let mut conj = basis.eval_jet(&gnf.kappa.inverse()?, &start)?;
    for _ in 0..cfg.iterates {
        direct = eval_ext_series_jet(model, basis, &full, &direct)?;
        conj = eval_ext_series_jet(model, basis, &reduced, &conj)?;
    }
    let conj = basis.eval_jet(&gnf.kappa, &conj)?;
    let diff = direct.iter().zip(&conj).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max);
    let scale = direct.iter().map(Jet::max_abs).fold(1.0, f64::max);
    Ok(OrbitCheck { iterates: cfg.iterates, max_difference: diff, passed: diff <= cfg.tolerances.numeric * scale })
}

pub fn flow_compare<S: Scalar>(cfg: &ExperimentConfig, setup: &Setup<S>) -> Result<Report> {
    let report = flow_report(cfg, setup)?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    for row in &report.rows {
        csv.serialize(row).map_err(|e| HarnessError::Validation(e.to_string()))?;
    }
    let bytes = csv.into_inner().map_err(|e| HarnessError::Validation(e.to_string()))?;
    write_file(&cfg.out, "flow.csv", &String::from_utf8(bytes).expect("csv is utf-8"))?;
    let data = serde_json::to_value(&report).expect("report serializes");
    write_file(&cfg.out, "flow.json", &serde_json::to_string_pretty(&data).expect("json serializes"))?;
    let mut summary = format!(
        "flow comparison for model {} at order {}, times {:?}, eps = {:?}\n",
        report.model, report.order, cfg.times, cfg.eps
    );
    for row in &report.rows {
        summary.push_str(&format!("  eps {:<8} t {:<6} error {:.3e}\n", row.eps, row.t, row.error));
    }
    summary.push_str(&format!(
        "fitted order {:.3} (required >= {:.2}): {}\n",
        report.fitted_order,
        report.required_order,
        status(report.fitted_order >= report.required_order)
    ));
    summary.push_str(&format!(
        "group normal form orbit over {} iterates: max difference {:.3e}: {}\n",
        report.orbit.iterates,
        report.orbit.max_difference,
        status(report.orbit.passed)
    ));
    let data = json!({ "flow": data });
    Ok(Report::new(Command::FlowCompare, report.passed, summary, data))
}
