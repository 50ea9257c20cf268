//! Field-level identities between word series and their coefficients.
//!
//! Symbolic checks return the largest coefficient of the difference of two
//! graded objects (exactly zero in exact mode when the identity holds).
//! Numeric checks evaluate both sides as series in `eps` at sample points
//! and return the largest coefficient-wise distance.

use num_complex::Complex64;
use wordseries_core::{CoeffMap, ExtCoeff, FreqVector, Result, Scalar};

use crate::field::{GradedField, VectorField};
use crate::hamiltonian::{assemble_hamiltonian, HamiltonianBasis};
use crate::jet::Jet;
use crate::model::Model;
use crate::series::{dynkin_field, eval_ext_series_jet, GradedMap, WordBasis};

/// Outcome of a symbolic comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Symbolic {
    pub exact_zero: bool,
    pub max_abs: f64,
    /// Size of the compared objects, for relative tolerances.
    pub scale: f64,
}

impl Symbolic {
    /// Exact zero in exact mode; `max_abs <= tol * max(1, scale)` otherwise.
    pub fn holds(&self, tol: f64) -> bool {
        self.exact_zero || self.max_abs <= tol * self.scale.max(1.0)
    }
}

fn max_jet_diff(a: &[Jet], b: &[Jet]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
}

fn constant_jets(x: &[Complex64], order: usize) -> Vec<Jet> {
    x.iter().map(|&c| Jet::constant(c, order)).collect()
}

/// `W_delta(W_gamma(x)) = W_{gamma ⋆ delta}(x)` as graded maps.
pub fn act_symbolic<S: Scalar>(basis: &WordBasis<S>, gamma: &CoeffMap<S>, delta: &CoeffMap<S>) -> Result<Symbolic> {
    let lhs = basis.series_map(delta)?.compose(&basis.series_map(gamma)?)?;
    let rhs = basis.series_map(&gamma.convolve(delta)?)?;
    let diff = lhs.sub(&rhs);
    Ok(Symbolic { exact_zero: diff.is_zero(), max_abs: diff.max_abs(), scale: rhs.max_abs() })
}

pub fn act_numeric<S: Scalar>(
    basis: &WordBasis<S>,
    gamma: &CoeffMap<S>,
    delta: &CoeffMap<S>,
    points: &[Vec<Complex64>],
) -> Result<f64> {
    let both = gamma.convolve(delta)?;
    let mut worst: f64 = 0.0;
    for x in points {
        let x0 = constant_jets(x, basis.order());
        let lhs = basis.eval_jet(delta, &basis.eval_jet(gamma, &x0)?)?;
        let rhs = basis.eval_jet(&both, &x0)?;
        worst = worst.max(max_jet_diff(&lhs, &rhs));
    }
    Ok(worst)
}

/// `Wbar_b(Wbar_a(x)) = Wbar_{a ⋆̄ b}(x)` symbolically; needs exponentials
/// of the flow rates, so it is meant for float models.
pub fn ext_composition_symbolic<S: Scalar>(
    model: &Model<S>,
    basis: &WordBasis<S>,
    a: &ExtCoeff<S>,
    b: &ExtCoeff<S>,
) -> Result<Symbolic> {
    let n = basis.order();
    let map = |e: &ExtCoeff<S>| -> Result<GradedMap<S>> {
        GradedMap::flow(model, &e.v, n)?.compose(&basis.series_map(&e.delta)?)
    };
    let lhs = map(b)?.compose(&map(a)?)?;
    let rhs = map(&model.table.ext_product(a, b)?)?;
    let diff = lhs.sub(&rhs);
    Ok(Symbolic { exact_zero: diff.is_zero(), max_abs: diff.max_abs(), scale: rhs.max_abs() })
}

pub fn ext_composition_numeric<S: Scalar>(
    model: &Model<S>,
    basis: &WordBasis<S>,
    a: &ExtCoeff<S>,
    b: &ExtCoeff<S>,
    points: &[Vec<Complex64>],
) -> Result<f64> {
    let ab = model.table.ext_product(a, b)?;
    let mut worst: f64 = 0.0;
    for x in points {
        let x0 = constant_jets(x, basis.order());
        let lhs = eval_ext_series_jet(model, basis, b, &eval_ext_series_jet(model, basis, a, &x0)?)?;
        let rhs = eval_ext_series_jet(model, basis, &ab, &x0)?;
        worst = worst.max(max_jet_diff(&lhs, &rhs));
    }
    Ok(worst)
}

/// `[g^v, W_beta] = W_{xi_v beta}`.
pub fn xi_derivation_symbolic<S: Scalar>(
    model: &Model<S>,
    basis: &WordBasis<S>,
    v: &FreqVector,
    beta: &CoeffMap<S>,
) -> Result<Symbolic> {
    let g = constant_level(model.g_v(v)?, basis.order());
    let lhs = g.bracket(&basis.series_field(beta)?)?;
    let rhs = basis.series_field(&model.table.small_xi(v, beta)?)?;
    let diff = lhs.sub(&rhs)?;
    Ok(Symbolic { exact_zero: diff.is_zero(), max_abs: diff.max_abs(), scale: rhs.max_abs() })
}

fn constant_level<S: Scalar>(f: VectorField<S>, order: usize) -> GradedField<S> {
    let mut g = GradedField::zero(f.dim(), f.angles(), order);
    g.set_level(0, f);
    g
}

/// `W_gamma(phi_v(x)) = phi_v(W_{Xi_v gamma}(x))`.
pub fn xi_conjugation_numeric<S: Scalar>(
    model: &Model<S>,
    basis: &WordBasis<S>,
    v: &FreqVector,
    gamma: &CoeffMap<S>,
    points: &[Vec<Complex64>],
) -> Result<f64> {
    let float_basis = float_basis(basis)?;
    let moved = model.table.big_xi_numeric(v, gamma)?;
    let gamma = gamma.to_float();
    let mut worst: f64 = 0.0;
    for x in points {
        let x0 = constant_jets(x, basis.order());
        let lhs = float_basis.eval_jet(&gamma, &model.flow_jet(v, &x0))?;
        let rhs = model.flow_jet(v, &float_basis.eval_jet(&moved, &x0)?);
        worst = worst.max(max_jet_diff(&lhs, &rhs));
    }
    Ok(worst)
}

fn float_basis<S: Scalar>(basis: &WordBasis<S>) -> Result<WordBasis<Complex64>> {
    let letters: Vec<VectorField<Complex64>> = (0..basis.space().alphabet())
        .map(|l| basis.field(&wordseries_core::Word::letter(l)).map(|f| f.expect("letter").to_float()))
        .collect::<Result<_>>()?;
    WordBasis::new(&letters, basis.order())
}

/// `g^v(W_gamma(x)) = W_gamma'(x) g^v(x) - W_{xi_v gamma}(x)`, the form of
/// the infinitesimal conjugation identity with the inverse Jacobian
/// multiplied out.
pub fn xi_infinitesimal_numeric<S: Scalar>(
    model: &Model<S>,
    basis: &WordBasis<S>,
    v: &FreqVector,
    gamma: &CoeffMap<S>,
    points: &[Vec<Complex64>],
) -> Result<f64> {
    let n = basis.order();
    let g = model.g_v(v)?;
    let map = basis.series_map(gamma)?;
    let xi = basis.series_field(&model.table.small_xi(v, gamma)?)?;
    // W_gamma' g = g + sum_n eps^n D_n' g
    let mut pushed = vec![g.clone()];
    for k in 1..=n {
        let d = VectorField::new((0..model.dim).map(|i| map.displacement(k, i).clone()).collect())?;
        pushed.push(d.jac_apply(&g)?);
    }
    let mut worst: f64 = 0.0;
    for x in points {
        let lhs = g.eval_jet(&map.eval_jet(x));
        let xi_vals = xi.eval(x);
        let pushed_vals: Vec<Vec<Complex64>> = pushed.iter().map(|f| f.eval(x)).collect();
        for (i, l) in lhs.iter().enumerate() {
            let rhs: Vec<Complex64> = (0..=n).map(|k| pushed_vals[k][i] - xi_vals[k][i]).collect();
            worst = worst.max(l.max_abs_diff(&Jet::from_coefficients(rhs)));
        }
    }
    Ok(worst)
}

/// Dynkin resummation `sum (beta_w/|w|) I_w = W_beta`.
pub fn dynkin_symbolic<S: Scalar>(basis: &WordBasis<S>, letters: &[VectorField<S>], beta: &CoeffMap<S>) -> Result<Symbolic> {
    let lhs = dynkin_field(letters, beta)?;
    let rhs = basis.series_field(beta)?;
    let diff = lhs.sub(&rhs)?;
    Ok(Symbolic { exact_zero: diff.is_zero(), max_abs: diff.max_abs(), scale: rhs.max_abs() })
}

/// The graded field `g^v + W_beta` of an element `(v, beta)` of the
/// extended algebra.
pub fn ext_field<S: Scalar>(model: &Model<S>, basis: &WordBasis<S>, a: &ExtCoeff<S>) -> Result<GradedField<S>> {
    let mut f = basis.series_field(&a.delta)?;
    f.set_level(0, f.level(0).add(&model.g_v(&a.v)?)?);
    Ok(f)
}

/// Bracket of the fields of two extended algebra elements.
pub fn field_bracket<S: Scalar>(
    model: &Model<S>,
    basis: &WordBasis<S>,
    a: &ExtCoeff<S>,
    b: &ExtCoeff<S>,
) -> Result<Symbolic> {
    let fa = ext_field(model, basis, a)?;
    let fb = ext_field(model, basis, b)?;
    let br = fa.bracket(&fb)?;
    Ok(Symbolic { exact_zero: br.is_zero(), max_abs: br.max_abs(), scale: fa.max_abs().max(fb.max_abs()) })
}

/// `{H_a, H_b} = H_{[a, b]}`.
pub fn hamiltonian_bracket_symbolic<S: Scalar>(
    model: &Model<S>,
    basis: &HamiltonianBasis<S>,
    a: &ExtCoeff<S>,
    b: &ExtCoeff<S>,
) -> Result<Symbolic> {
    let lhs = assemble_hamiltonian(model, basis, a)?.poisson(&assemble_hamiltonian(model, basis, b)?)?;
    let rhs = assemble_hamiltonian(model, basis, &model.table.ext_bracket(a, b)?)?;
    let diff = lhs.sub(&rhs);
    Ok(Symbolic { exact_zero: diff.is_zero(), max_abs: diff.max_abs(), scale: rhs.max_abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_model;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use wordseries_core::random::{random_character, random_infinitesimal};
    use wordseries_core::{GaussianRational as Q, Membership};

    const TOY: &str = r#"
name = "two-angle"
dim = 3
angles = 2

[frequency]
model = "explicit"
v = ["1", "1"]

[[commuting]]
rates = ["0", "1", "0"]

[[commuting]]
rates = ["0", "0", "1"]

[[letters]]
name = "0"
nu = ["0", "0"]
field = [[], [{ c = "1", e = [1, 0, 0] }], []]

[[letters]]
name = "k"
nu = ["i", "2i"]
field = [[{ c = "1/2", e = [1, 1, 2] }, { c = "1/2", e = [0, 1, 2] }], [{ c = "1/2", e = [0, 1, 2] }], []]

[[letters]]
name = "-k"
nu = ["-i", "-2i"]
field = [[{ c = "1/2", e = [1, -1, -2] }, { c = "1/2", e = [0, -1, -2] }], [{ c = "1/2", e = [0, -1, -2] }], []]
"#;

    fn points(model: &Model<Q>) -> Vec<Vec<Complex64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        (0..5).map(|_| model.sample_point(&mut rng)).collect()
    }

    #[test]
    fn angle_model_satisfies_the_conjugation_identities() {
        let model = parse_model(TOY).unwrap();
        let basis = WordBasis::from_model(&model, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = model.v().unwrap().clone();
        let beta: CoeffMap<Q> = random_infinitesimal(3, 3, &mut rng).unwrap();
        assert!(xi_derivation_symbolic(&model, &basis, &v, &beta).unwrap().exact_zero);
        let gamma: CoeffMap<Q> = random_character(3, 3, &mut rng).unwrap();
        let pts = points(&model);
        assert!(xi_conjugation_numeric(&model, &basis, &v, &gamma, &pts).unwrap() < 1e-8);
        assert!(xi_infinitesimal_numeric(&model, &basis, &v, &gamma, &pts).unwrap() < 1e-8);
    }

    #[test]
    fn extended_composition_on_the_angle_model() {
        let model = parse_model(TOY).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a: ExtCoeff<Q> = ExtCoeff::group(FreqVector::from_ints(&[1, 0]), random_character(3, 3, &mut rng).unwrap()).unwrap();
        let b: ExtCoeff<Q> = ExtCoeff::group(FreqVector::from_ints(&[2, -1]), random_character(3, 3, &mut rng).unwrap()).unwrap();
        let fm = model.to_float();
        let fb = WordBasis::from_model(&fm, 3).unwrap();
        let af = ExtCoeff { v: a.v.clone(), delta: a.delta.to_float(), class: Membership::Group };
        let bf = ExtCoeff { v: b.v.clone(), delta: b.delta.to_float(), class: Membership::Group };
        assert!(ext_composition_numeric(&fm, &fb, &af, &bf, &points(&model)).unwrap() < 1e-8);
        assert!(ext_composition_symbolic(&fm, &fb, &af, &bf).unwrap().holds(1e-10));
    }

    #[test]
    fn invariant_fields_commute_with_the_full_field() {
        let model = parse_model(TOY).unwrap();
        let basis = WordBasis::from_model(&model, 3).unwrap();
        let v = model.v().unwrap().clone();
        let beta = CoeffMap::<Q>::letters_indicator(3, 3).unwrap();
        let full = ExtCoeff::algebra(v.clone(), beta.clone()).unwrap();
        for u in model.table.resonance_space(&v, 3).unwrap() {
            let inv = model.table.invariant_coefficients(&FreqVector::Explicit(u), &v, &beta).unwrap();
            assert!(field_bracket(&model, &basis, &full, &inv).unwrap().exact_zero);
        }
    }
}
