//! Model files.
//!
//! A model file is TOML. Numbers that must be exact are strings in the
//! Gaussian-rational syntax (`"1/2"`, `"-3i"`, `"1+2i"`). A polynomial is a
//! list of terms `{ c = "...", e = [..] }` with one exponent per variable;
//! exponents of angle variables are Fourier indices.
//!
//! ```toml
//! name = "toy"
//! dim = 3
//! angles = 2
//!
//! [frequency]
//! model = "explicit"          # or "generic" with float values
//! v = ["1", "1"]
//!
//! [[commuting]]
//! rates = ["0", "1", "0"]
//!
//! [[letters]]
//! name = "k"
//! nu = ["i", "2i"]
//! field = [[{ c = "1/2", e = [0, 1, 2] }], [], []]
//! ```
//!
//! Instead of `commuting` and `letters` a file may give `[split]` with
//! `lambda` (diagonal of `L`) and a polynomial `field`; the letters then
//! come from [`eigen_split`](crate::model::eigen_split).

use std::path::Path;

use serde::Deserialize;
use toml::Spanned;
use wordseries_core::scalar::parse_gaussian;
use wordseries_core::{Error, FreqTable, FreqVector, GaussianRational, Result};

use crate::field::VectorField;
use crate::model::{eigen_split, symmetric_reduction, LetterSpec, Model};
use crate::poly::Poly;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    name: String,
    dim: usize,
    #[serde(default)]
    angles: usize,
    #[serde(default)]
    frequency: Option<Spanned<FrequencyFile>>,
    #[serde(default)]
    commuting: Vec<Spanned<CommutingFile>>,
    #[serde(default)]
    letters: Vec<Spanned<LetterFile>>,
    #[serde(default)]
    split: Option<Spanned<SplitFile>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrequencyFile {
    model: String,
    v: Vec<toml::Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CommutingFile {
    rates: Vec<String>,
    #[serde(default)]
    hamiltonian: Option<Vec<TermFile>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LetterFile {
    name: String,
    #[serde(default)]
    payload: Vec<i64>,
    nu: Vec<String>,
    #[serde(default)]
    field: Option<Vec<Vec<TermFile>>>,
    #[serde(default)]
    hamiltonian: Option<Vec<TermFile>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitFile {
    lambda: Vec<String>,
    field: Vec<Vec<TermFile>>,
    #[serde(default)]
    symmetric: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    c: String,
    e: Vec<i32>,
}

/// Maps byte offsets to 1-based line numbers.
struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn at(&self, offset: usize) -> usize {
        self.0[..offset.min(self.0.len())].matches('\n').count() + 1
    }

    fn err<T>(&self, offset: usize, msg: impl std::fmt::Display) -> Result<T> {
        Err(Error::Parse(format!("line {}: {msg}", self.at(offset))))
    }
}

fn poly(terms: &[TermFile], dim: usize, angles: usize) -> std::result::Result<Poly<GaussianRational>, String> {
    let m = dim - angles;
    let mut p = Poly::zero(dim, angles);
    for t in terms {
        if t.e.len() != dim {
            return Err(format!("term exponent {:?} has {} entries, expected {dim}", t.e, t.e.len()));
        }
        if t.e[..m].iter().any(|&x| x < 0) {
            return Err(format!("negative degree in {:?}", t.e));
        }
        p.add_term(t.e.clone(), parse_gaussian(&t.c).map_err(|e| e.to_string())?);
    }
    Ok(p)
}

fn field(comps: &[Vec<TermFile>], dim: usize, angles: usize) -> std::result::Result<VectorField<GaussianRational>, String> {
    if comps.len() != dim {
        return Err(format!("field has {} components, expected {dim}", comps.len()));
    }
    let ps = comps.iter().map(|c| poly(c, dim, angles)).collect::<std::result::Result<Vec<_>, _>>()?;
    VectorField::new(ps).map_err(|e| e.to_string())
}

fn numbers(xs: &[String]) -> std::result::Result<Vec<GaussianRational>, String> {
    xs.iter().map(|x| parse_gaussian(x).map_err(|e| e.to_string())).collect()
}

/// Parses and validates a model description.
pub fn parse_model(text: &str) -> Result<Model<GaussianRational>> {
    let file: ModelFile = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| Lines(text).at(s.start));
        match line {
            Some(l) => Error::Parse(format!("line {l}: {}", e.message())),
            None => Error::Parse(e.message().to_string()),
        }
    })?;
    let lines = Lines(text);
    if file.dim == 0 || file.angles > file.dim {
        return lines.err(0, format!("dim = {} with {} angles is not a valid state space", file.dim, file.angles));
    }
    let (dim, angles) = (file.dim, file.angles);
    let mut model = if let Some(split) = &file.split {
        if !file.letters.is_empty() || !file.commuting.is_empty() {
            return lines.err(split.span().start, "[split] excludes explicit letters and commuting fields");
        }
        if angles != 0 {
            return lines.err(split.span().start, "[split] needs a polynomial model without angles");
        }
        let at = split.span().start;
        let split = split.get_ref();
        let lambda = numbers(&split.lambda).or_else(|e| lines.err(at, e))?;
        if lambda.len() != dim {
            return lines.err(at, format!("lambda has {} entries, expected {dim}", lambda.len()));
        }
        let f = field(&split.field, dim, 0).or_else(|e| lines.err(at, e))?;
        let mut s = eigen_split(&lambda, &f).or_else(|e| lines.err(at, e))?;
        if split.symmetric {
            s = symmetric_reduction(&s).or_else(|e| lines.err(at, e))?;
        }
        let mut model = s.model;
        model.name = file.name.clone();
        model
    } else {
        if file.commuting.is_empty() || file.letters.is_empty() {
            return lines.err(0, "a model needs [[commuting]] and [[letters]] sections, or [split]");
        }
        let mut rates = Vec::new();
        let mut hj = Vec::new();
        for c in &file.commuting {
            let at = c.span().start;
            let r = numbers(&c.get_ref().rates).or_else(|e| lines.err(at, e))?;
            if r.len() != dim {
                return lines.err(at, format!("rates has {} entries, expected {dim}", r.len()));
            }
            rates.push(r);
            hj.push(match &c.get_ref().hamiltonian {
                Some(h) => Some(poly(h, dim, angles).or_else(|e| lines.err(at, e))?),
                None => None,
            });
        }
        let d = rates.len();
        let mut letters = Vec::new();
        let mut nu = Vec::new();
        for l in &file.letters {
            let at = l.span().start;
            let spec = l.get_ref();
            let n = numbers(&spec.nu).or_else(|e| lines.err(at, e))?;
            if n.len() != d {
                return lines.err(at, format!("letter {} has {} frequencies, expected {d}", spec.name, n.len()));
            }
            nu.push(n);
            let hamiltonian = match &spec.hamiltonian {
                Some(h) => Some(poly(h, dim, angles).or_else(|e| lines.err(at, e))?),
                None => None,
            };
            let f = match (&spec.field, &hamiltonian) {
                (Some(f), _) => field(f, dim, angles).or_else(|e| lines.err(at, e))?,
                (None, Some(h)) => crate::hamiltonian::hamiltonian_field(h).or_else(|e| lines.err(at, e))?,
                (None, None) => return lines.err(at, format!("letter {} needs a field or a Hamiltonian", spec.name)),
            };
            letters.push(LetterSpec { name: spec.name.clone(), payload: spec.payload.clone(), field: f, hamiltonian });
        }
        let commuting_hamiltonians = if hj.iter().all(Option::is_some) {
            Some(hj.into_iter().flatten().collect())
        } else if hj.iter().all(Option::is_none) {
            None
        } else {
            return lines.err(0, "either every commuting field has a Hamiltonian or none has");
        };
        Model {
            name: file.name.clone(),
            dim,
            angles,
            table: FreqTable::new(d, nu).or_else(|e| lines.err(0, e))?,
            letters,
            rates,
            commuting_hamiltonians,
            v: None,
        }
    };
    if let Some(freq) = &file.frequency {
        let at = freq.span().start;
        model.v = Some(frequency(freq.get_ref()).or_else(|e| lines.err(at, e))?);
    }
    model.validate().or_else(|e| lines.err(0, e))?;
    Ok(model)
}

fn frequency(f: &FrequencyFile) -> std::result::Result<FreqVector, String> {
    match f.model.as_str() {
        "explicit" => {
            let xs = f
                .v
                .iter()
                .map(|x| x.as_str().ok_or_else(|| format!("explicit entry {x} must be a string")))
                .map(|s| s.and_then(|s| parse_gaussian(s).map_err(|e| e.to_string())))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(FreqVector::Explicit(xs))
        }
        "generic" => {
            let xs = f
                .v
                .iter()
                .map(|x| match x {
                    toml::Value::Float(f) => Ok(num_complex::Complex64::new(*f, 0.0)),
                    toml::Value::Integer(i) => Ok(num_complex::Complex64::new(*i as f64, 0.0)),
                    toml::Value::Array(a) if a.len() == 2 => {
                        let part = |v: &toml::Value| v.as_float().or(v.as_integer().map(|i| i as f64));
                        match (part(&a[0]), part(&a[1])) {
                            (Some(re), Some(im)) => Ok(num_complex::Complex64::new(re, im)),
                            _ => Err(format!("generic entry {x} must be [re, im]")),
                        }
                    }
                    other => Err(format!("generic entry {other} must be a number or [re, im]")),
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(FreqVector::Generic(xs))
        }
        other => Err(format!("unknown frequency model `{other}`; expected explicit or generic")),
    }
}

pub fn load_model(path: &Path) -> Result<Model<GaussianRational>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}
