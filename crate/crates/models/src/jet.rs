//! Truncated power series in `eps` with complex float coefficients.

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet(Vec<Complex64>);

impl Jet {
    pub fn zero(order: usize) -> Self {
        Jet(vec![Complex64::new(0.0, 0.0); order + 1])
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.0[0] = c;
        j
    }

    pub fn from_coefficients(c: Vec<Complex64>) -> Self {
        assert!(!c.is_empty(), "a jet has at least one coefficient");
        Jet(c)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.0
    }

    pub fn value(&self) -> Complex64 {
        self.0[0]
    }

    /// Sum of the series at a concrete `eps`.
    pub fn eval(&self, eps: f64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * eps + c)
    }

    pub fn add(&self, other: &Jet) -> Jet {
        Jet(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        Jet(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: Complex64) -> Jet {
        Jet(self.0.iter().map(|a| a * c).collect())
    }

    pub fn add_constant(&self, c: Complex64) -> Jet {
        let mut j = self.clone();
        j.0[0] += c;
        j
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.0.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, a) in self.0.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.0.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet(out)
    }

    pub fn powi(&self, k: u32) -> Jet {
        let mut out = Jet::constant(Complex64::new(1.0, 0.0), self.order());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Multiplies by `eps^k`.
    pub fn shift(&self, k: usize) -> Jet {
        let n = self.0.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n.saturating_sub(k) {
            out[i + k] = self.0[i];
        }
        Jet(out)
    }

    pub fn exp(&self) -> Jet {
        // y' = x' y, coefficient by coefficient
        let n = self.0.len();
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        y[0] = self.0[0].exp();
        for m in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=m {
                acc += self.0[k] * y[m - k] * k as f64;
            }
            y[m] = acc / m as f64;
        }
        Jet(y)
    }

    pub fn max_abs_diff(&self, other: &Jet) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}
