//! Vector fields with polynomial or Fourier-polynomial components.

use num_complex::Complex64;
use wordseries_core::{Error, Result, Scalar};

use crate::jet::Jet;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<S> {
    comps: Vec<Poly<S>>,
}

impl<S: Scalar> VectorField<S> {
    pub fn new(comps: Vec<Poly<S>>) -> Result<Self> {
        let Some(first) = comps.first() else {
            return Err(Error::Precondition("a vector field needs at least one component".into()));
        };
        let (n, a) = (first.nvars(), first.angles());
        if comps.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: comps.len() });
        }
        if comps.iter().any(|c| c.nvars() != n || c.angles() != a) {
            return Err(Error::Precondition("components over different variables".into()));
        }
        Ok(VectorField { comps })
    }

    pub fn zero(dim: usize, angles: usize) -> Self {
        VectorField { comps: vec![Poly::zero(dim, angles); dim] }
    }

    /// Constant field.
    pub fn constant(dim: usize, angles: usize, c: &[S]) -> Self {
        VectorField { comps: c.iter().map(|c| Poly::constant(dim, angles, c.clone())).collect() }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn angles(&self) -> usize {
        self.comps[0].angles()
    }

    pub fn components(&self) -> &[Poly<S>] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &Poly<S> {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn is_negligible(&self, scale: f64) -> bool {
        self.comps.iter().all(|c| c.is_negligible(scale))
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(Poly::max_abs).fold(0.0, f64::max)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() || self.angles() != other.angles() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(VectorField { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(VectorField { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect() })
    }

    pub fn scale(&self, c: &S) -> Self {
        VectorField { comps: self.comps.iter().map(|p| p.scale(c)).collect() }
    }

    /// `f'(x) g(x)` for `f = self`.
    pub fn jac_apply(&self, g: &Self) -> Result<Self> {
        self.check(g)?;
        let comps = self
            .comps
            .iter()
            .map(|fi| {
                let mut acc = Poly::zero(fi.nvars(), fi.angles());
                for (j, gj) in g.comps.iter().enumerate() {
                    if gj.is_zero() {
                        continue;
                    }
                    let d = fi.derivative(j);
                    if !d.is_zero() {
                        acc = acc.add(&d.mul(gj));
                    }
                }
                acc
            })
            .collect();
        Ok(VectorField { comps })
    }

    pub fn map_coefficients<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> VectorField<T> {
        VectorField { comps: self.comps.iter().map(|p| p.map_coefficients(&mut f)).collect() }
    }

    pub fn to_float(&self) -> VectorField<Complex64> {
        self.map_coefficients(|c| c.to_c64())
    }

    pub fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.comps.iter().map(|p| p.eval(x)).collect()
    }

    pub fn eval_jet(&self, x: &[Jet]) -> Vec<Jet> {
        self.comps.iter().map(|p| p.eval_jet(x)).collect()
    }
}

/// Lie–Jacobi bracket `[a, b] = b' a - a' b`.
pub fn lie_bracket<S: Scalar>(a: &VectorField<S>, b: &VectorField<S>) -> Result<VectorField<S>> {
    b.jac_apply(a)?.sub(&a.jac_apply(b)?)
}

/// Field series `sum_n eps^n F_n`, truncated at a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedField<S> {
    levels: Vec<VectorField<S>>,
}

impl<S: Scalar> GradedField<S> {
    pub fn zero(dim: usize, angles: usize, order: usize) -> Self {
        GradedField { levels: vec![VectorField::zero(dim, angles); order + 1] }
    }

    pub fn from_levels(levels: Vec<VectorField<S>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Precondition("graded field without levels".into()));
        }
        Ok(GradedField { levels })
    }

    pub fn order(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &VectorField<S> {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[VectorField<S>] {
        &self.levels
    }

    pub fn set_level(&mut self, n: usize, f: VectorField<S>) {
        self.levels[n] = f;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let levels = self.levels.iter().zip(&other.levels).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(GradedField { levels })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let levels = self.levels.iter().zip(&other.levels).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Ok(GradedField { levels })
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(VectorField::is_zero)
    }

    pub fn is_negligible(&self, scale: f64) -> bool {
        self.levels.iter().all(|f| f.is_negligible(scale))
    }

    pub fn max_abs(&self) -> f64 {
        self.levels.iter().map(VectorField::max_abs).fold(0.0, f64::max)
    }

    /// Graded bracket truncated at the common order.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        let n = self.order().min(other.order());
        let (dim, angles) = (self.levels[0].dim(), self.levels[0].angles());
        let mut levels = vec![VectorField::zero(dim, angles); n + 1];
        for i in 0..=n {
            if self.levels[i].is_zero() {
                continue;
            }
            for j in 0..=n - i {
                if other.levels[j].is_zero() {
                    continue;
                }
                levels[i + j] = levels[i + j].add(&lie_bracket(&self.levels[i], &other.levels[j])?)?;
            }
        }
        Ok(GradedField { levels })
    }

    /// Level-by-level value at a point.
    pub fn eval(&self, x: &[Complex64]) -> Vec<Vec<Complex64>> {
        self.levels.iter().map(|f| f.eval(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wordseries_core::scalar::gaussian;
    use wordseries_core::GaussianRational as Q;

    fn field1(p: Poly<Q>) -> VectorField<Q> {
        VectorField::new(vec![p]).unwrap()
    }

    #[test]
    fn bracket_of_field_with_itself_vanishes() {
        let x = Poly::<Q>::var(2, 0, 0);
        let y = Poly::<Q>::var(2, 0, 1);
        let f = VectorField::new(vec![x.mul(&y), y.pow(3)]).unwrap();
        assert!(lie_bracket(&f, &f).unwrap().is_zero());
    }

    #[test]
    fn quadratic_field_is_an_eigenvector_of_the_euler_field() {
        let x = Poly::<Q>::var(1, 0, 0);
        let g = field1(x.clone());
        let f = field1(x.mul(&x));
        assert_eq!(lie_bracket(&g, &f).unwrap(), f);
    }

    #[test]
    fn fourier_modes_are_eigenvectors_of_the_angle_advance() {
        let g = VectorField::<Q>::constant(2, 1, &[gaussian(0, 0), gaussian(1, 0)]);
        let mode = Poly::<Q>::monomial(2, 1, vec![1, 3], gaussian(1, 0));
        let f = VectorField::new(vec![mode.clone(), mode]).unwrap();
        assert_eq!(lie_bracket(&g, &f).unwrap(), f.scale(&gaussian(0, 3)));
    }

    #[test]
    fn graded_bracket_collects_orders() {
        let x = Poly::<Q>::var(1, 0, 0);
        let g = GradedField::from_levels(vec![field1(x.clone()), field1(Poly::zero(1, 0))]).unwrap();
        let f = GradedField::from_levels(vec![field1(Poly::zero(1, 0)), field1(x.mul(&x))]).unwrap();
        let b = g.bracket(&f).unwrap();
        assert!(b.level(0).is_zero());
        assert_eq!(b.level(1), &field1(x.mul(&x)));
    }
}
