//! Coefficient-level commands: `normal-form`, `decompose`, `invariants`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wordseries_core::linalg::Vector;
use wordseries_core::random::left_nested_commutator;
use wordseries_core::scalar::format_gaussian;
use wordseries_core::serial::JsonScalar;
use wordseries_core::{CoeffMap, Decomposition, ExtCoeff, FreqVector, NormalFormResult, Scalar, Word};
use wordseries_models::hamiltonian::{assemble_hamiltonian, GradedHamiltonian, HamiltonianBasis};

use crate::config::{BetaChoice, Command, ExperimentConfig, Mutation};
use crate::error::{HarnessError, Result};
use crate::report::{status, Report};
use crate::{map_vanishes, maps_agree, write_file, Setup};

/// Normal form of the configured `beta`, with the gauge mutation applied
/// when requested.
pub fn compute_normal_form<S: Scalar>(cfg: &ExperimentConfig, setup: &Setup<S>) -> Result<NormalFormResult<S>> {
    let mut nf = setup.table().normal_form(&setup.v, &setup.beta)?;
    if cfg.mutate == Some(Mutation::Gauge) {
        let delta = resonant_shift(setup, &nf, cfg.seed)?;
        nf.kappa = delta.convolve(&nf.kappa)?;
    }
    Ok(nf)
}

/// `exp(lambda)` for the left-nested commutator `lambda` of a seeded
/// resonant word. Words shorter than the order are preferred so that the
/// shift reaches the residual.
fn resonant_shift<S: Scalar>(setup: &Setup<S>, nf: &NormalFormResult<S>, seed: u64) -> Result<CoeffMap<S>> {
    let space = nf.kappa.space();
    let lie = |w: &Word| left_nested_commutator(w);
    let mut words: Vec<Word> = nf.resonant_words().into_iter().filter(|w| !lie(w).is_empty()).collect();
    if words.iter().any(|w| w.len() < nf.order) {
        words.retain(|w| w.len() < nf.order);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = words
        .choose(&mut rng)
        .ok_or_else(|| HarnessError::Validation(format!("model {} has no resonant word to shift", setup.model.name)))?;
    let mut values = vec![S::zero(); space.len()];
    for (u, k) in lie(w) {
        values[space.index(&u)?] = S::from_i64(k);
    }
    Ok(CoeffMap::from_values(space.alphabet(), space.order(), values)?.exp_star()?)
}

fn resonant_table<S: Scalar>(setup: &Setup<S>, nf: &NormalFormResult<S>) -> (String, usize) {
    let mut text = format!("# resonant words with nonzero beta_hat, model {}\n", setup.model.name);
    text.push_str("length\tword\tbeta_hat\n");
    let mut rows = 0;
    for w in nf.resonant_words() {
        let c = nf.beta_hat.get(&w).expect("same space");
        if c.is_zero() {
            continue;
        }
        rows += 1;
        text.push_str(&format!("{}\t{}\t{}\n", w.len(), setup.label(&w), c));
    }
    (text, rows)
}

pub fn normal_form<S: JsonScalar>(cfg: &ExperimentConfig, setup: &Setup<S>) -> Result<Report> {
    let nf = compute_normal_form(cfg, setup)?;
    let check = setup.table().check_normal_form(&nf, &setup.beta)?;
    write_file(&cfg.out, "kappa.json", &nf.kappa.to_json_string())?;
    write_file(&cfg.out, "beta_hat.json", &nf.beta_hat.to_json_string())?;
    let (table, rows) = resonant_table(setup, &nf);
    write_file(&cfg.out, "resonant_words.txt", &table)?;
    let data = json!({
        "model": setup.model.name,
        "mode": S::MODE,
        "metadata": nf.metadata(),
        "nonzero_resonant_entries": rows,
        "beta_hat_is_zero": rows == 0,
        "check": {
            "residual_violations": words(&check.residual_violations),
            "support_violations": words(&check.support_violations),
            "kappa_is_character": check.kappa_is_character,
            "beta_hat_is_infinitesimal": check.hat_in_class,
            "max_residual": check.max_residual,
        },
    });
    write_file(&cfg.out, "normal_form.json", &serde_json::to_string_pretty(&data).expect("json serializes"))?;
    let mut summary = format!(
        "normal form of model {} through order {} ({} mode)\n",
        setup.model.name, nf.order, S::MODE
    );
    summary.push_str(&format!("resonant words: {}\n", nf.resonant_word_count()));
    if rows == 0 {
        summary.push_str("beta_hat = 0\n");
    } else {
        summary.push_str(&format!("beta_hat nonzero on {rows} resonant words (see resonant_words.txt)\n"));
    }
    summary.push_str(&format!(
        "residual check: {} (max residual {:e}, {} residual and {} support violations)\n",
        status(check.passed()),
        check.max_residual,
        check.residual_violations.len(),
        check.support_violations.len()
    ));
    Ok(Report::new(Command::NormalForm, check.passed(), summary, data))
}

fn words(ws: &[Word]) -> Vec<String> {
    ws.iter().map(Word::to_string).collect()
}

pub(crate) fn vector_json(u: &Vector) -> Value {
    json!(u.iter().map(format_gaussian).collect::<Vec<_>>())
}

/// Named elements `(v, rho(v))`, `(u_i, rho(u_i))`, `(0, beta_bar)`.
pub fn commuting_family<S: Scalar>(setup: &Setup<S>, dec: &Decomposition<S>) -> Result<Vec<(String, ExtCoeff<S>)>> {
    let mut out = vec![("(v, rho(v))".to_string(), ExtCoeff::algebra(setup.v.clone(), dec.rho_v.clone())?)];
    for (i, (u, r)) in dec.basis.iter().zip(&dec.rho).enumerate() {
        out.push((format!("(u{}, rho(u{}))", i + 1, i + 1), ExtCoeff::algebra(FreqVector::Explicit(u.clone()), r.clone())?));
    }
    out.push((
        "(0, beta_bar)".to_string(),
        ExtCoeff::algebra(FreqVector::zero(setup.table().d()), dec.beta_bar.clone())?,
    ));
    Ok(out)
}

/// One entry of the pairwise bracket table.
#[derive(Clone, Debug)]
pub struct BracketEntry {
    pub left: String,
    pub right: String,
    pub max_abs: f64,
    pub vanishes: bool,
}

pub fn bracket_table<S: Scalar>(setup: &Setup<S>, family: &[(String, ExtCoeff<S>)], tol: f64) -> Result<Vec<BracketEntry>> {
    let mut out = Vec::new();
    for (i, (na, a)) in family.iter().enumerate() {
        for (nb, b) in &family[i + 1..] {
            let br = setup.table().ext_bracket(a, b)?;
            let scale = a.delta.max_abs().max(b.delta.max_abs());
            let vanishes = br.v.is_zero() && map_vanishes(&br.delta, scale, tol);
            out.push(BracketEntry { left: na.clone(), right: nb.clone(), max_abs: br.delta.max_abs(), vanishes });
        }
    }
    Ok(out)
}

/// Recursive `beta_bar` and `rho(u)` compared with the decomposition;
/// `None` when the recursions do not apply.
pub fn recursion_agreement<S: Scalar>(
    cfg: &ExperimentConfig,
    setup: &Setup<S>,
    dec: &Decomposition<S>,
) -> Result<Option<(bool, Vec<bool>)>> {
    if cfg.beta != BetaChoice::Letters || setup.table().zero_letter(&setup.v).is_err() {
        return Ok(None);
    }
    let table = setup.table();
    let bb: CoeffMap<S> = table.beta_bar_recursion(&setup.v, cfg.order)?;
    let bar_ok = maps_agree(&bb, &dec.beta_bar, cfg.tolerances.float);
    let mut rho_ok = Vec::new();
    for (u, r) in dec.basis.iter().zip(&dec.rho) {
        let rec: CoeffMap<S> = table.rho_recursion(&FreqVector::Explicit(u.clone()), &setup.v, cfg.order)?;
        rho_ok.push(maps_agree(&rec, r, cfg.tolerances.float));
    }
    Ok(Some((bar_ok, rho_ok)))
}

pub fn compute_decomposition<S: Scalar>(cfg: &ExperimentConfig, setup: &Setup<S>) -> Result<Decomposition<S>> {
    let nf = compute_normal_form(cfg, setup)?;
    let basis = setup.table().resonance_space(&setup.v, cfg.order)?;
    Ok(setup.table().decompose_from(&nf, &setup.beta, &basis)?)
}

pub fn decompose<S: JsonScalar>(cfg: &ExperimentConfig, setup: &Setup<S>) -> Result<Report> {
    let dec = compute_decomposition(cfg, setup)?;
    let table = setup.table();
    let rho: Vec<(FreqVector, CoeffMap<S>)> =
        dec.basis.iter().zip(&dec.rho).map(|(u, r)| (FreqVector::Explicit(u.clone()), r.clone())).collect();
    let characterization = table.verify_unique_characterization(&setup.v, &setup.beta, &dec.beta_bar, &rho)?;
    let family = commuting_family(setup, &dec)?;
    let brackets = bracket_table(setup, &family, cfg.tolerances.float)?;
    let recursions = recursion_agreement(cfg, setup, &dec)?;

    write_file(&cfg.out, "beta_bar.json", &dec.beta_bar.to_json_string())?;
    write_file(&cfg.out, "rho_v.json", &dec.rho_v.to_json_string())?;
    for (i, r) in dec.rho.iter().enumerate() {
        write_file(&cfg.out, &format!("rho_u{}.json", i + 1), &r.to_json_string())?;
    }
    let brackets_ok = brackets.iter().all(|b| b.vanishes);
    let rec_ok = recursions.as_ref().map_or(true, |(b, r)| *b && r.iter().all(|x| *x));
    let passed = characterization.passed() && brackets_ok && rec_ok;
    let data = json!({
        "model": setup.model.name,
        "mode": S::MODE,
        "order": cfg.order,
        "resonance_basis": dec.basis.iter().map(vector_json).collect::<Vec<_>>(),
        "characterization_violations": characterization
            .violations
            .iter()
            .map(|(rel, w)| json!({ "relation": rel, "word": w.to_string() }))
            .collect::<Vec<_>>(),
        "brackets": brackets
            .iter()
            .map(|b| json!({ "left": b.left, "right": b.right, "max_abs": b.max_abs, "vanishes": b.vanishes }))
            .collect::<Vec<_>>(),
        "recursions": recursions.as_ref().map(|(b, r)| json!({ "beta_bar": b, "rho": r })),
        "passed": passed,
    });
    write_file(&cfg.out, "decomposition.json", &serde_json::to_string_pretty(&data).expect("json serializes"))?;

    let mut summary = format!("commuting decomposition of model {} through order {}\n", setup.model.name, cfg.order);
    summary.push_str(&format!("dim V(v) = {}\n", dec.basis.len()));
    for (i, u) in dec.basis.iter().enumerate() {
        summary.push_str(&format!("  u{} = {}\n", i + 1, vector_json(u)));
    }
    summary.push_str(&format!(
        "characterization: {} ({} violations)\n",
        status(characterization.passed()),
        characterization.violations.len()
    ));
    summary.push_str(&format!("bracket table ({} pairs): {}\n", brackets.len(), status(brackets_ok)));
    for b in brackets.iter().filter(|b| !b.vanishes) {
        summary.push_str(&format!("  [{}, {}] max {:e}\n", b.left, b.right, b.max_abs));
    }
    match &recursions {
        Some(_) => summary.push_str(&format!("recursions: {}\n", status(rec_ok))),
        None => summary.push_str("recursions: not applicable\n"),
    }
    Ok(Report::new(Command::Decompose, passed, summary, data))
}

/// A formal invariant and its coefficients.
#[derive(Clone, Debug)]
pub struct Invariant<S> {
    pub label: String,
    pub u: FreqVector,
    pub rho: CoeffMap<S>,
    pub hamiltonian: GradedHamiltonian<S>,
}

/// Invariants `H_{(u, rho(u))}` for a basis of `V(v)`, after checking the
/// Hamiltonian structure of the model.
pub fn compute_invariants<S: Scalar>(
    cfg: &ExperimentConfig,
    setup: &Setup<S>,
) -> Result<(Vec<Invariant<S>>, Decomposition<S>, HamiltonianBasis<S>)> {
    let model = &setup.model;
    if !model.is_hamiltonian() {
        return Err(HarnessError::Validation(format!("model {} declares no Hamiltonians", model.name)));
    }
    let assumption = model.verify_assumption(cfg.seed)?;
    let structure = model.verify_hamiltonian()?;
    if !assumption.passed() || !structure.passed() {
        return Err(HarnessError::Property(format!(
            "model {} fails the commuting-field assumption: {assumption:?}, {structure:?}",
            model.name
        )));
    }
    let dec = compute_decomposition(cfg, setup)?;
    let basis = HamiltonianBasis::from_model(model, cfg.order)?;
    let mut out = Vec::new();
    for (i, (u, r)) in dec.basis.iter().zip(&dec.rho).enumerate() {
        let u = FreqVector::Explicit(u.clone());
        let h = assemble_hamiltonian(model, &basis, &ExtCoeff::algebra(u.clone(), r.clone())?)?;
        out.push(Invariant { label: format!("H(u{})", i + 1), u, rho: r.clone(), hamiltonian: h });
    }
    Ok((out, dec, basis))
}

pub fn invariants<S: JsonScalar>(cfg: &ExperimentConfig, setup: &Setup<S>) -> Result<Report> {
    let (invs, _, basis) = compute_invariants(cfg, setup)?;
    let flow = assemble_hamiltonian(&setup.model, &basis, &ExtCoeff::algebra(setup.v.clone(), setup.beta.clone())?)?;
    let mut entries = Vec::new();
    let mut summary = format!(
        "formal invariants of model {} through order {}: d' = {}\n",
        setup.model.name,
        cfg.order,
        invs.len()
    );
    let mut passed = true;
    for (i, inv) in invs.iter().enumerate() {
        let bracket = flow.poisson(&inv.hamiltonian)?;
        let commutes = match S::MODE {
            wordseries_core::Mode::Exact => bracket.is_zero(),
            wordseries_core::Mode::Float => bracket.is_negligible(inv.hamiltonian.max_abs().max(flow.max_abs())),
        };
        passed &= commutes;
        write_file(&cfg.out, &format!("rho_u{}.json", i + 1), &inv.rho.to_json_string())?;
        let levels: Vec<String> = inv.hamiltonian.levels().iter().map(|p| p.to_string()).collect();
        summary.push_str(&format!("{} with u = {}: Poisson bracket with H(v, beta) {}\n", inv.label, inv.u.to_json()["v"], status(commutes)));
        for (n, p) in levels.iter().enumerate() {
            summary.push_str(&format!("  eps^{n}: {p}\n"));
        }
        entries.push(json!({
            "label": inv.label,
            "u": inv.u.to_json(),
            "rho": format!("rho_u{}.json", i + 1),
            "levels": levels,
            "commutes_with_flow": commutes,
        }));
    }
    let data = json!({
        "model": setup.model.name,
        "mode": S::MODE,
        "order": cfg.order,
        "count": invs.len(),
        "invariants": entries,
    });
    write_file(&cfg.out, "invariants.json", &serde_json::to_string_pretty(&data).expect("json serializes"))?;
    write_file(&cfg.out, "invariants.txt", &summary)?;
    Ok(Report::new(Command::Invariants, passed, summary, data))
}
