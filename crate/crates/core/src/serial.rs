//! JSON form of coefficient maps.
//!
//! ```json
//! {"alphabet_size": 2, "order": 1, "mode": "exact",
//!  "entries": [{"word": [], "num_re": 1, "den_re": 1, "num_im": 0, "den_im": 1}, ...]}
//! ```
//!
//! Entries are written in canonical word order. Exact integers that do not
//! fit in an `i64` are written as decimal strings; both forms are accepted on
//! input. Float entries carry `re`/`im` numbers, which round-trip exactly.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::coeff::CoeffMap;
use crate::error::{Error, Result};
use crate::scalar::{GaussianRational, Mode, Scalar};
use crate::word::{Word, WordSpace};

/// Scalars that know how to write themselves into a JSON entry.
pub trait JsonScalar: Scalar {
    fn write_entry(&self, entry: &mut Map<String, Value>);
    fn read_entry(entry: &Map<String, Value>) -> Result<Self>;
}

fn int_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn read_int(entry: &Map<String, Value>, key: &str) -> Result<BigInt> {
    match entry.get(key) {
        Some(Value::Number(n)) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("`{key}` is not an integer"))),
        Some(Value::String(s)) => s.parse().map_err(|_| Error::Parse(format!("`{key}` is not an integer"))),
        _ => Err(Error::Parse(format!("missing integer field `{key}`"))),
    }
}

fn read_rational(entry: &Map<String, Value>, num: &str, den: &str) -> Result<BigRational> {
    let d = read_int(entry, den)?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{den}`")));
    }
    Ok(BigRational::new(read_int(entry, num)?, d))
}

impl JsonScalar for GaussianRational {
    fn write_entry(&self, entry: &mut Map<String, Value>) {
        entry.insert("num_re".into(), int_value(self.re.numer()));
        entry.insert("den_re".into(), int_value(self.re.denom()));
        entry.insert("num_im".into(), int_value(self.im.numer()));
        entry.insert("den_im".into(), int_value(self.im.denom()));
    }

    fn read_entry(entry: &Map<String, Value>) -> Result<Self> {
        Ok(Complex::new(read_rational(entry, "num_re", "den_re")?, read_rational(entry, "num_im", "den_im")?))
    }
}

impl JsonScalar for Complex64 {
    fn write_entry(&self, entry: &mut Map<String, Value>) {
        entry.insert("re".into(), json!(self.re));
        entry.insert("im".into(), json!(self.im));
    }

    fn read_entry(entry: &Map<String, Value>) -> Result<Self> {
        let part = |k: &str| {
            entry
                .get(k)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Parse(format!("missing float field `{k}`")))
        };
        Ok(Complex64::new(part("re")?, part("im")?))
    }
}

impl<S: JsonScalar> CoeffMap<S> {
    pub fn to_json_value(&self) -> Value {
        let entries: Vec<Value> = self
            .iter()
            .map(|(w, c)| {
                let mut e = Map::new();
                let ids: Vec<u16> = w.letters().iter().map(|l| l.0).collect();
                e.insert("word".into(), json!(ids));
                c.write_entry(&mut e);
                Value::Object(e)
            })
            .collect();
        json!({
            "alphabet_size": self.alphabet(),
            "order": self.order(),
            "mode": S::MODE,
            "entries": entries,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("json values serialize")
    }

    pub fn from_json_value(value: &Value) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| Error::Parse("coefficient map must be an object".into()))?;
        let field = |k: &str| obj.get(k).ok_or_else(|| Error::Parse(format!("missing field `{k}`")));
        let alphabet = field("alphabet_size")?
            .as_u64()
            .ok_or_else(|| Error::Parse("`alphabet_size` must be a nonnegative integer".into()))? as usize;
        let order =
            field("order")?.as_u64().ok_or_else(|| Error::Parse("`order` must be a nonnegative integer".into()))? as usize;
        let mode: Mode = serde_json::from_value(field("mode")?.clone())?;
        if mode != S::MODE {
            return Err(Error::ModeMismatch { expected: S::MODE, found: mode });
        }
        let space = WordSpace::new(alphabet, order)?;
        let entries = field("entries")?.as_array().ok_or_else(|| Error::Parse("`entries` must be an array".into()))?;
        if entries.len() != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), found: entries.len() });
        }
        let mut values = Vec::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            let e = e.as_object().ok_or_else(|| Error::Parse(format!("entry {i} must be an object")))?;
            let ids = e
                .get("word")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("entry {i} lacks a `word` array")))?;
            let letters = ids
                .iter()
                .map(|x| x.as_u64().map(|v| v as usize))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Parse(format!("entry {i}: letters must be integers")))?;
            let word = Word::from_letters(letters);
            if space.index(&word)? != i {
                return Err(Error::Parse(format!("entry {i}: word {word} out of canonical order")));
            }
            values.push(S::read_entry(e)?);
        }
        CoeffMap::from_values(alphabet, order, values)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_json_value(&serde_json::from_str(text)?)
    }
}
