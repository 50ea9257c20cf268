//! Coefficient arithmetic in two modes: exact Gaussian rationals and
//! double-precision complex numbers.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex number with arbitrary-precision rational parts.
pub type GaussianRational = Complex<BigRational>;

/// Absolute tolerance used by float-mode zero tests.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::Parse(format!("unknown arithmetic mode `{other}`"))),
        }
    }
}

/// Field of coefficients. Implemented for [`GaussianRational`] (exact) and
/// [`Complex64`] (float).
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn from_gaussian(q: &GaussianRational) -> Self;

    /// Exact value if this scalar is a Gaussian rational. Always `Some` in
    /// exact mode; in float mode only for values that are exactly integers.
    fn to_gaussian(&self) -> Option<GaussianRational>;

    fn to_c64(&self) -> Complex64;

    /// Float values are representable only in float mode.
    fn from_c64(z: Complex64) -> Option<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_gaussian(&Complex::new(BigRational::from_integer(n.into()), BigRational::zero()))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_gaussian(&Complex::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        ))
    }

    /// Zero test: exact in exact mode, `|z| <= FLOAT_TOLERANCE` in float mode.
    fn is_negligible(&self) -> bool;

    /// `exp(self)` if representable in this mode. Exact mode can only
    /// represent `exp(0) = 1`.
    fn try_exp(&self) -> Option<Self>;

    /// Total order used for canonical sorting (real part, then imaginary).
    fn total_cmp(&self, other: &Self) -> Ordering;

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_negligible()
    }
}

impl Scalar for GaussianRational {
    const MODE: Mode = Mode::Exact;

    fn from_gaussian(q: &GaussianRational) -> Self {
        q.clone()
    }

    fn to_gaussian(&self) -> Option<GaussianRational> {
        Some(self.clone())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn from_c64(_: Complex64) -> Option<Self> {
        None
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn try_exp(&self) -> Option<Self> {
        self.is_zero().then(Self::one)
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl Scalar for Complex64 {
    const MODE: Mode = Mode::Float;

    fn from_gaussian(q: &GaussianRational) -> Self {
        Complex64::new(rational_to_f64(&q.re), rational_to_f64(&q.im))
    }

    fn to_gaussian(&self) -> Option<GaussianRational> {
        let part = |x: f64| {
            (x.fract() == 0.0 && x.is_finite())
                .then(|| BigRational::from_integer(BigInt::from(x as i64)))
        };
        Some(Complex::new(part(self.re)?, part(self.im)?))
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn from_c64(z: Complex64) -> Option<Self> {
        Some(z)
    }

    fn is_negligible(&self) -> bool {
        self.norm() <= FLOAT_TOLERANCE
    }

    fn try_exp(&self) -> Option<Self> {
        Some(self.exp())
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.re.total_cmp(&other.re).then_with(|| self.im.total_cmp(&other.im))
    }
}

/// Zero test relative to a magnitude: exact in exact mode, otherwise
/// `|z| <= FLOAT_TOLERANCE * max(1, scale)`.
pub fn negligible_at<S: Scalar>(z: &S, scale: f64) -> bool {
    match S::MODE {
        Mode::Exact => z.is_zero(),
        Mode::Float => z.to_c64().norm() <= FLOAT_TOLERANCE * scale.max(1.0),
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale down huge numerators/denominators before dividing.
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
            let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn gaussian(re: i64, im: i64) -> GaussianRational {
    Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

pub fn gaussian_ratio(num: i64, den: i64) -> GaussianRational {
    Complex::new(BigRational::new(num.into(), den.into()), BigRational::zero())
}

/// Parses Gaussian rationals such as `3`, `-1/2`, `0.25`, `2i`, `-i`,
/// `1/2+3/4i` or `1-2i`.
pub fn parse_gaussian(text: &str) -> Result<GaussianRational> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    // Split into at most two signed terms at a sign not following 'e'/'E'
    // and not at position 0.
    let bytes = s.as_bytes();
    let mut split = None;
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E' | b'/') {
            split = Some(i);
        }
    }
    let (first, second) = match split {
        Some(i) => (&s[..i], Some(&s[i..])),
        None => (s.as_str(), None),
    };
    let mut value = GaussianRational::zero();
    for term in std::iter::once(first).chain(second) {
        value = value + parse_term(term).map_err(|e| Error::Parse(format!("`{text}`: {e}")))?;
    }
    Ok(value)
}

fn parse_term(term: &str) -> std::result::Result<GaussianRational, String> {
    if let Some(real) = term.strip_suffix('i') {
        let coef = match real {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            r => parse_rational(r.strip_suffix('*').unwrap_or(r))?,
        };
        Ok(Complex::new(BigRational::zero(), coef))
    } else {
        Ok(Complex::new(parse_rational(term)?, BigRational::zero()))
    }
}

fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_decimal(n)?;
        let d = parse_decimal(d)?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(n / d)
    } else {
        parse_decimal(s)
    }
}

fn parse_decimal(s: &str) -> std::result::Result<BigRational, String> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("`{s}` is not a number"));
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("`{s}` is not a number"));
    }
    let numer: BigInt = digits.parse().map_err(|_| format!("`{s}` is not a number"))?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let value = BigRational::new(numer, denom);
    Ok(if neg { -value } else { value })
}

/// Formats a Gaussian rational in the syntax accepted by [`parse_gaussian`].
pub fn format_gaussian(q: &GaussianRational) -> String {
    match (q.re.is_zero(), q.im.is_zero()) {
        (_, true) => q.re.to_string(),
        (true, false) => format!("{}i", q.im),
        (false, false) => {
            let sign = if q.im.is_negative() { "-" } else { "+" };
            format!("{}{}{}i", q.re, sign, q.im.abs())
        }
    }
}
