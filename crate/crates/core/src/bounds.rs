//! Labeled bound entries shared by the curvature, volume and report modules.

use serde::{Deserialize, Serialize};

/// The quantity a bound constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Alpha,
    AlphaEss,
    AlphaD,
    Lambda0,
    Lambda0Ess,
    Lambda0Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub name: String,
    pub target: Target,
    pub side: Side,
    #[serde(with = "real")]
    pub value: f64,
    /// Which inequality produced the value.
    pub source: String,
    pub applicable: bool,
    /// Why the bound is inapplicable, or how it was estimated.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Bound {
    pub fn new(name: &str, target: Target, side: Side, value: f64, source: &str) -> Self {
        Bound {
            name: name.to_string(),
            target,
            side,
            value,
            source: source.to_string(),
            applicable: true,
            note: String::new(),
        }
    }

    pub fn inapplicable(mut self, why: &str) -> Self {
        self.applicable = false;
        self.note = why.to_string();
        self
    }

    pub fn noted(mut self, note: &str) -> Self {
        self.note = note.to_string();
        self
    }

    /// `applicable` only when `cond` holds, otherwise tagged with `why`.
    pub fn gated(self, cond: bool, why: &str) -> Self {
        if cond {
            self
        } else {
            self.inapplicable(why)
        }
    }
}

/// A checked inequality `lhs <= rhs` (or equality) with its outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub rhs: f64,
}

/// Relative slack used for floating comparisons in verdicts.
pub const VERDICT_TOL: f64 = 1e-9;

impl Verdict {
    /// `lhs <= rhs` up to [`VERDICT_TOL`] relative slack.
    pub fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        Self::le_within(name, lhs, rhs, 0.0)
    }

    /// `lhs <= rhs` up to `rel` relative slack on top of [`VERDICT_TOL`].
    pub fn le_within(name: &str, lhs: f64, rhs: f64, rel: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        let slack = if scale.is_finite() { rel * scale + VERDICT_TOL * scale.max(1.0) } else { 0.0 };
        let pass = lhs <= rhs + slack || (lhs == f64::NEG_INFINITY) || rhs == f64::INFINITY;
        Verdict { name: name.to_string(), pass, lhs, rhs }
    }

    pub fn eq(name: &str, lhs: f64, rhs: f64) -> Self {
        let slack = VERDICT_TOL * lhs.abs().max(rhs.abs()).max(1.0);
        let pass = lhs == rhs || (lhs - rhs).abs() <= slack;
        Verdict { name: name.to_string(), pass, lhs, rhs }
    }

    pub fn check(name: &str, pass: bool) -> Self {
        let v = if pass { 1.0 } else { 0.0 };
        Verdict { name: name.to_string(), pass, lhs: v, rhs: 1.0 }
    }
}

/// JSON has no infinities or NaN: these are written as the strings
/// `"inf"`, `"-inf"` and `"nan"`.
pub mod real {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(x: f64) -> Repr {
        if x.is_finite() {
            Repr::Num(x)
        } else if x.is_nan() {
            Repr::Text("nan".into())
        } else if x > 0.0 {
            Repr::Text("inf".into())
        } else {
            Repr::Text("-inf".into())
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(E::custom(format!("expected a number, got {t:?}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    /// Same encoding for `(index, value)` sequences.
    pub mod seq {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[(usize, f64)], s: S) -> Result<S::Ok, S::Error> {
            let reprs: Vec<(usize, Repr)> = v.iter().map(|&(k, x)| (k, to_repr(x))).collect();
            reprs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(usize, f64)>, D::Error> {
            let reprs: Vec<(usize, Repr)> = Vec::deserialize(d)?;
            reprs.into_iter().map(|(k, r)| Ok((k, from_repr::<D::Error>(r)?))).collect()
        }
    }

    /// Same encoding for optional values.
    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            v.map(to_repr).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Option::<Repr>::deserialize(d)?.map(from_repr::<D::Error>).transpose()
        }
    }
}
