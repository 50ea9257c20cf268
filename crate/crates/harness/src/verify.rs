//! `verify`: every invariant suite on the configured model.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use wordseries_core::random::{left_nested_commutator, random_character, random_infinitesimal};
use wordseries_core::serial::JsonScalar;
use wordseries_core::{CoeffMap, ExtCoeff, FreqVector, Mode, Scalar};
use wordseries_models::checks::{
    act_numeric, act_symbolic, dynkin_symbolic, ext_composition_numeric, ext_composition_symbolic,
    field_bracket, hamiltonian_bracket_symbolic, xi_derivation_symbolic, Symbolic,
};
use wordseries_models::hamiltonian::HamiltonianBasis;
use wordseries_models::{Model, WordBasis};

use crate::config::{Command, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::reduce::{bracket_table, commuting_family, compute_decomposition, compute_normal_form, recursion_agreement};
use crate::report::{status, Report};
use crate::{map_vanishes, maps_agree, Setup};

/// Highest order of the field-level suites.
const FIELD_ORDER: usize = 3;
/// Highest order of the randomized algebra suites.
const ALGEBRA_ORDER: usize = 4;
const SAMPLES: usize = 4;
const POINTS: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Runs a suite; errors other than small divisors count as failures.
fn suite(out: &mut Vec<SuiteResult>, name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Result<()> {
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e @ HarnessError::SmallDivisor { .. }) => return Err(e),
        Err(e) => (false, format!("error: {e}")),
    };
    out.push(SuiteResult { name: name.into(), passed, detail });
    Ok(())
}

fn symbolic_holds<S: Scalar>(s: &Symbolic, tol: f64) -> bool {
    match S::MODE {
        Mode::Exact => s.exact_zero,
        Mode::Float => s.holds(tol),
    }
}

pub fn verify<S: JsonScalar>(cfg: &ExperimentConfig, setup: &Setup<S>) -> Result<Report> {
    let suites = run_suites(cfg, setup)?;
    let passed = suites.iter().all(|s| s.passed);
    let mut summary = format!(
        "verify model {} at order {} ({} mode, seed {})\n",
        setup.model.name,
        cfg.order,
        S::MODE,
        cfg.seed
    );
    for s in &suites {
        summary.push_str(&format!("{:<24} {:<7} {}\n", s.name, status(s.passed), s.detail));
    }
    summary.push_str(&format!(
        "{} of {} suites passed\n",
        suites.iter().filter(|s| s.passed).count(),
        suites.len()
    ));
    let data = json!({
        "model": setup.model.name,
        "mode": S::MODE,
        "order": cfg.order,
        "seed": cfg.seed,
        "suites": suites,
        "passed": passed,
    });
    Ok(Report::new(Command::Verify, passed, summary, data))
}

pub fn run_suites<S: JsonScalar>(cfg: &ExperimentConfig, setup: &Setup<S>) -> Result<Vec<SuiteResult>> {
    let mut out = Vec::new();
    let model = &setup.model;
    let table = setup.table();
    let tol = cfg.tolerances.float;
    let a = model.alphabet();

    suite(&mut out, "assumption", || {
        let r = model.verify_assumption(cfg.seed)?;
        Ok((r.passed(), format!("failing letters {:?}", r.failing_letters())))
    })?;
    if model.is_hamiltonian() {
        suite(&mut out, "hamiltonian-structure", || {
            let r = model.verify_hamiltonian()?;
            Ok((r.passed(), format!("{r:?}")))
        })?;
    }

    suite(&mut out, "algebra-laws", || algebra_laws::<S>(a, cfg.order.min(ALGEBRA_ORDER), cfg.seed, tol))?;

    let nf = compute_normal_form(cfg, setup)?;
    suite(&mut out, "normal-form", || {
        let r = table.check_normal_form(&nf, &setup.beta)?;
        let exact_zero = S::MODE == Mode::Float || table.normal_form_residual(&nf, &setup.beta)?.is_zero();
        Ok((
            r.passed() && exact_zero,
            format!(
                "max residual {:e}, residual violations {}, support violations {}, kappa character {}",
                r.max_residual,
                r.residual_violations.len(),
                r.support_violations.len(),
                r.kappa_is_character
            ),
        ))
    })?;

    suite(&mut out, "gauge-freedom", || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut ok = 0;
        for _ in 0..SAMPLES {
            let delta: CoeffMap<S> = resonant_character(setup, cfg.order, &mut rng)?;
            let moved = table.gauge_transform(&nf, &delta)?;
            ok += table.check_normal_form(&moved, &setup.beta)?.passed() as usize;
        }
        Ok((ok == SAMPLES, format!("{ok} of {SAMPLES} shifted solutions pass")))
    })?;

    suite(&mut out, "decomposition", || {
        let dec = compute_decomposition(cfg, setup)?;
        let rho: Vec<(FreqVector, CoeffMap<S>)> =
            dec.basis.iter().zip(&dec.rho).map(|(u, r)| (FreqVector::Explicit(u.clone()), r.clone())).collect();
        let ch = table.verify_unique_characterization(&setup.v, &setup.beta, &dec.beta_bar, &rho)?;
        let family = commuting_family(setup, &dec)?;
        let br = bracket_table(setup, &family, tol)?;
        let bad = br.iter().filter(|b| !b.vanishes).count();
        let rec = recursion_agreement(cfg, setup, &dec)?;
        let rec_ok = rec.as_ref().map_or(true, |(b, r)| *b && r.iter().all(|x| *x));
        Ok((
            ch.passed() && bad == 0 && rec_ok,
            format!(
                "dim V(v) = {}, characterization violations {}, nonvanishing brackets {bad} of {}, recursions {}",
                dec.basis.len(),
                ch.violations.len(),
                br.len(),
                match rec {
                    None => "n/a",
                    Some(_) if rec_ok => "agree",
                    Some(_) => "disagree",
                }
            ),
        ))
    })?;

    suite(&mut out, "json-roundtrip", || {
        let back = CoeffMap::<S>::from_json_str(&nf.kappa.to_json_string())?;
        let hat = CoeffMap::<S>::from_json_str(&nf.beta_hat.to_json_string())?;
        Ok((back == nf.kappa && hat == nf.beta_hat, "kappa and beta_hat reload bit-exact".into()))
    })?;

    if let Some(dir) = &cfg.input {
        suite(&mut out, "input-residual", || {
            let read = |name: &str| -> Result<CoeffMap<S>> {
                let path = dir.join(name);
                let text = std::fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
                Ok(CoeffMap::from_json_str(&text)?)
            };
            let mut loaded = nf.clone();
            loaded.kappa = read("kappa.json")?;
            loaded.beta_hat = read("beta_hat.json")?;
            let r = table.check_normal_form(&loaded, &setup.beta)?;
            Ok((r.passed(), format!("{}: max residual {:e}", dir.display(), r.max_residual)))
        })?;
    }

    let fmodel = model.to_float();
    let fbeta = setup.beta.to_float();
    suite(&mut out, "ext-exp-log", || {
        let x = ExtCoeff::algebra(setup.v.clone(), fbeta.clone())?;
        let g = fmodel.table.ext_exp(&x)?;
        let back = fmodel.table.ext_log(&g)?;
        let err = back.delta.max_abs_diff(&x.delta);
        Ok((err <= tol * x.delta.max_abs().max(1.0), format!("log(exp(v, beta)) error {err:.3e}")))
    })?;
    suite(&mut out, "group-normal-form", || {
        let eta = fmodel.table.ext_exp(&ExtCoeff::algebra(setup.v.clone(), fbeta.clone())?)?.delta;
        let gnf = fmodel.table.group_normal_form(&setup.v, &eta)?;
        let r = fmodel.table.check_group_normal_form(&gnf, &eta)?;
        Ok((r.passed(), format!("max residual {:e}", r.max_residual)))
    })?;

    let n = cfg.order.min(FIELD_ORDER);
    let basis = WordBasis::from_model(model, n)?;
    let points = sample_points(model, cfg.seed);
    let numeric = cfg.tolerances.numeric;
    suite(&mut out, "field-act", || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let g: CoeffMap<S> = random_character(a, n, &mut rng)?;
        let d: CoeffMap<S> = random_character(a, n, &mut rng)?;
        let s = act_symbolic(&basis, &g, &d)?;
        let e = act_numeric(&basis, &g, &d, &points)?;
        Ok((symbolic_holds::<S>(&s, numeric) && e <= numeric, format!("symbolic {:.3e}, numeric {e:.3e}", s.max_abs)))
    })?;
    suite(&mut out, "field-ext-composition", || {
        let fbasis = WordBasis::from_model(&fmodel, n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let d = fmodel.d();
        let pick = |rng: &mut ChaCha8Rng| -> Result<ExtCoeff<Complex64>> {
            let v = FreqVector::Generic(wordseries_core::random::random_letters::<Complex64, _>(d, rng));
            Ok(ExtCoeff::group(v, random_character(a, n, rng)?)?)
        };
        let (x, y) = (pick(&mut rng)?, pick(&mut rng)?);
        let s = ext_composition_symbolic(&fmodel, &fbasis, &x, &y)?;
        let e = ext_composition_numeric(&fmodel, &fbasis, &x, &y, &points)?;
        Ok((s.holds(numeric) && e <= numeric, format!("symbolic {:.3e}, numeric {e:.3e}", s.max_abs)))
    })?;
    suite(&mut out, "field-xi-derivation", || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let b: CoeffMap<S> = random_infinitesimal(a, n, &mut rng)?;
        let s = xi_derivation_symbolic(model, &basis, &setup.v, &b)?;
        Ok((symbolic_holds::<S>(&s, numeric), format!("max {:.3e}", s.max_abs)))
    })?;
    suite(&mut out, "field-dynkin", || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let b: CoeffMap<S> = random_infinitesimal(a, n, &mut rng)?;
        let s = dynkin_symbolic(&basis, &model.letter_fields(), &b)?;
        Ok((symbolic_holds::<S>(&s, numeric), format!("max {:.3e}", s.max_abs)))
    })?;
    suite(&mut out, "field-commutation", || {
        let low = ExperimentConfig { order: n, ..cfg.clone() };
        let low_setup = Setup::new(model.clone(), n, cfg.beta)?;
        let dec = compute_decomposition(&low, &low_setup)?;
        let family = commuting_family(&low_setup, &dec)?;
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for (i, (_, x)) in family.iter().enumerate() {
            for (_, y) in &family[i + 1..] {
                let s = field_bracket(model, &basis, x, y)?;
                worst = worst.max(s.max_abs);
                ok &= symbolic_holds::<S>(&s, numeric);
            }
        }
        Ok((ok, format!("{} elements through order {n}, max {worst:.3e}", family.len())))
    })?;
    if model.is_hamiltonian() {
        suite(&mut out, "hamiltonian-bracket", || {
            let hb = HamiltonianBasis::from_model(model, n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let x = ExtCoeff::algebra(setup.v.clone(), random_infinitesimal(a, n, &mut rng)?)?;
            let y = ExtCoeff::algebra(FreqVector::zero(model.d()), random_infinitesimal(a, n, &mut rng)?)?;
            let s = hamiltonian_bracket_symbolic(model, &hb, &x, &y)?;
            Ok((symbolic_holds::<S>(&s, numeric), format!("max {:.3e}", s.max_abs)))
        })?;
    }
    Ok(out)
}

fn sample_points<S: Scalar>(model: &Model<S>, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    (0..POINTS).map(|_| model.sample_point(&mut rng)).collect()
}

/// Associativity, closure, exp/log roundtrip and Jacobi on seeded random
/// coefficients.
pub fn algebra_laws<S: Scalar>(alphabet: usize, order: usize, seed: u64, tol: f64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..SAMPLES {
        let x: CoeffMap<S> = random_character(alphabet, order, &mut rng)?;
        let y: CoeffMap<S> = random_character(alphabet, order, &mut rng)?;
        let z: CoeffMap<S> = random_character(alphabet, order, &mut rng)?;
        if !maps_agree(&x.convolve(&y)?.convolve(&z)?, &x.convolve(&y.convolve(&z)?)?, tol) {
            failures.push("associativity");
        }
        if !x.convolve(&y)?.is_character() || !x.inverse()?.is_character() {
            failures.push("group closure");
        }
        let a: CoeffMap<S> = random_infinitesimal(alphabet, order, &mut rng)?;
        let b: CoeffMap<S> = random_infinitesimal(alphabet, order, &mut rng)?;
        let c: CoeffMap<S> = random_infinitesimal(alphabet, order, &mut rng)?;
        if !a.bracket(&b)?.is_infinitesimal() {
            failures.push("algebra closure");
        }
        if !maps_agree(&a.exp_star()?.log_star()?, &a, tol) || !maps_agree(&x.log_star()?.exp_star()?, &x, tol) {
            failures.push("exp/log roundtrip");
        }
        let jacobi = a
            .bracket(&b.bracket(&c)?)?
            .add(&b.bracket(&c.bracket(&a)?)?)?
            .add(&c.bracket(&a.bracket(&b)?)?)?;
        if !map_vanishes(&jacobi, a.max_abs().max(b.max_abs()).max(c.max_abs()), tol) {
            failures.push("jacobi");
        }
    }
    failures.dedup();
    let detail = if failures.is_empty() {
        format!("{SAMPLES} samples at order {order}")
    } else {
        format!("violated: {}", failures.join(", "))
    };
    Ok((failures.is_empty(), detail))
}

/// `exp(lambda)` for a random combination of left-nested commutators of
/// resonant words: a character with `xi_v delta = 0`.
pub fn resonant_character<S: Scalar, R: rand::Rng>(setup: &Setup<S>, order: usize, rng: &mut R) -> Result<CoeffMap<S>> {
    let a = setup.model.alphabet();
    let space = wordseries_core::WordSpace::new(a, order)?;
    let flags = setup.table().resonant_flags(&setup.v, &space)?;
    let mut values = vec![S::zero(); space.len()];
    for (i, w) in space.words().enumerate().skip(1) {
        if !flags[i] || rng.gen_bool(0.5) {
            continue;
        }
        let c = S::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3));
        for (u, k) in left_nested_commutator(&w) {
            let j = space.index(&u)?;
            values[j] = values[j].clone() + c.clone() * S::from_i64(k);
        }
    }
    Ok(CoeffMap::from_values(a, order, values)?.exp_star()?)
}
