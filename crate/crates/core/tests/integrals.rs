use num_complex::Complex64;
use wordseries_core::exppoly::iterated_integral;
use wordseries_core::{CoeffMap, ExpPoly, GaussianRational as Q, Word, WordSpace};
use wordseries_core::scalar::gaussian;

fn simpson<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Complex64 {
    let m = 0.5 * (a + b);
    let whole = (b - a) / 6.0 * (f(a) + f(m) * 4.0 + f(b));
    adaptive(f, a, b, whole, tol, depth)
}

fn adaptive<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, whole: Complex64, tol: f64, depth: u32) -> Complex64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let left = (m - a) / 6.0 * (f(a) + f(lm) * 4.0 + f(m));
    let right = (b - m) / 6.0 * (f(m) + f(rm) * 4.0 + f(b));
    if depth == 0 || (left + right - whole).norm() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    adaptive(f, a, m, left, tol / 2.0, depth - 1) + adaptive(f, m, b, right, tol / 2.0, depth - 1)
}

#[test]
fn two_letter_integral_matches_quadrature() {
    let nu = Complex64::new(0.0, 1.3);
    let nus = [nu, -nu];
    let p = iterated_integral(&Word::from_letters([0, 1]), &nus);
    let inner = |s: f64| simpson(&|t1: f64| (nu * t1).exp(), 0.0, s, 1e-14, 30);
    let outer = simpson(&|t2: f64| (-nu * t2).exp() * inner(t2), 0.0, 1.0, 1e-13, 30);
    assert!((p.eval_real(1.0) - outer).norm() < 1e-10, "{} vs {}", p.eval_real(1.0), outer);
}

#[test]
fn integration_matches_finite_differences() {
    let p = ExpPoly::term(gaussian(2, 1), 2, gaussian(0, 3)).add(&ExpPoly::term(gaussian(1, 0), 1, gaussian(-1, 0)));
    let q = p.integrate();
    assert_eq!(q.eval_at_zero(), gaussian(0, 0));
    let h = 1e-5;
    for t in [0.1, 0.4, 0.9] {
        let fd = (q.eval_real(t + h) - q.eval_real(t - h)) / (2.0 * h);
        assert!((fd - p.eval_real(t)).norm() < 1e-8);
    }
    assert_eq!(q.derivative(), p);
}

#[test]
fn closed_forms() {
    let one = ExpPoly::<Q>::one();
    assert_eq!(one.integrate(), ExpPoly::term(gaussian(1, 0), 1, gaussian(0, 0)));
    // t e^t integrates to (t - 1) e^t + 1
    let te = ExpPoly::term(gaussian(1, 0), 1, gaussian(1, 0));
    let expect = ExpPoly::term(gaussian(1, 0), 1, gaussian(1, 0))
        .add(&ExpPoly::term(gaussian(-1, 0), 0, gaussian(1, 0)))
        .add(&ExpPoly::constant(gaussian(1, 0)));
    assert_eq!(te.integrate(), expect);
    // all rates zero: t^n / n!
    let zero = [gaussian(0, 0)];
    let p = iterated_integral(&Word::from_letters([0, 0, 0]), &zero);
    assert_eq!(p, ExpPoly::term(wordseries_core::scalar::gaussian_ratio(1, 6), 3, gaussian(0, 0)));
}

#[test]
fn iterated_integrals_form_a_character() {
    // harmonics 0, 1, -1, 2, -2 with nu = i k
    let ks = [0i64, 1, -1, 2, -2];
    let nus: Vec<Complex64> = ks.iter().map(|&k| Complex64::new(0.0, k as f64)).collect();
    let space = WordSpace::new(5, 4).unwrap();
    let curves: Vec<ExpPoly<Complex64>> = space.words().map(|w| {
        if w.is_empty() { ExpPoly::one() } else { iterated_integral(&w, &nus) }
    }).collect();
    for t in [0.1, 0.5, 1.0] {
        let values = curves.iter().map(|p| p.eval_real(t)).collect();
        let alpha = CoeffMap::from_values(5, 4, values).unwrap();
        let report = alpha.character_report();
        assert!(report.passed(), "t = {t}: {report:?}");
        for w in space.words().skip(1) {
            assert!(curves[space.index(&w).unwrap()].eval_real(0.0).norm() < 1e-15);
        }
    }
}
