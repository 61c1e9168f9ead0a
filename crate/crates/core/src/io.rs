//! JSON mechanism documents.
//!
//! A document is either an explicit finite mechanism
//! `{"prior": [...], "channel": [[...], ...]}` or a family specification
//! `{"family": "rr" | "extremal" | "laplace_mean" | "gaussian", ...}`.
//! Probabilities may be JSON numbers or strings holding decimals or
//! fractions (`"1/3"`); in rational mode decimals are read exactly.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::mechanisms::{
    extremal_mechanism_ratio, randomized_response_ratio, GaussianPerturb, InputLaw, LaplaceMean,
};
use crate::oracles::scalar_json;
use crate::prob::{Channel, Joint, Pmf};
use crate::scalar::Scalar;

/// A parsed mechanism.
#[derive(Debug, Clone)]
pub enum Mechanism<S> {
    Finite(Joint<S>),
    LaplaceMean(LaplaceMean),
    Gaussian(GaussianPerturb),
}

impl<S> Mechanism<S> {
    pub fn family(&self) -> &'static str {
        match self {
            Mechanism::Finite(_) => "finite",
            Mechanism::LaplaceMean(_) => "laplace_mean",
            Mechanism::Gaussian(_) => "gaussian",
        }
    }

    pub fn into_finite(self) -> Result<Joint<S>> {
        match self {
            Mechanism::Finite(j) => Ok(j),
            other => Err(Error::InvalidParameter(format!(
                "a finite mechanism is required, found {}",
                other.family()
            ))),
        }
    }
}

fn parse_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        field: field.into(),
        message: message.into(),
    }
}

/// Parses a mechanism document.
pub fn parse_mechanism<S: Scalar>(text: &str) -> Result<Mechanism<S>> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        parse_err(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let Value::Object(obj) = value else {
        return Err(parse_err("document", "expected a JSON object"));
    };
    let doc = Doc { obj: &obj };
    match obj.get("family") {
        None => {
            doc.only(&["prior", "channel"])?;
            let prior = doc.prior::<S>()?;
            let channel = doc.matrix::<S>("channel")?;
            if channel.len() != prior.len() {
                return Err(parse_err(
                    "channel",
                    format!("{} rows for a prior on {} symbols", channel.len(), prior.len()),
                ));
            }
            wrap("channel", Channel::new(channel).and_then(|c| Joint::new(prior, c)))
                .map(Mechanism::Finite)
        }
        Some(Value::String(f)) => match f.as_str() {
            "rr" => {
                doc.only(&["family", "n", "eps", "r", "prior"])?;
                let n = doc.count("n")?;
                let r = doc.multiplier::<S>()?;
                let prior = match obj.get("prior") {
                    Some(_) => doc.prior::<S>()?,
                    None => wrap("n", Pmf::uniform(n))?,
                };
                let ch = wrap("n", randomized_response_ratio(n, &r))?;
                wrap("prior", Joint::new(prior, ch)).map(Mechanism::Finite)
            }
            "extremal" => {
                doc.only(&["family", "eps", "r", "prior"])?;
                let prior = doc.prior::<S>()?;
                let r = doc.multiplier::<S>()?;
                let ch = wrap("eps", extremal_mechanism_ratio(&prior, &r))?;
                wrap("prior", Joint::new(prior, ch)).map(Mechanism::Finite)
            }
            "laplace_mean" => {
                doc.only(&["family", "law", "n", "b"])?;
                let law = doc.law("law")?;
                let m = LaplaceMean::new(law, doc.count("n")?, doc.real("b")?);
                wrap("laplace_mean", m).map(Mechanism::LaplaceMean)
            }
            "gaussian" => {
                doc.only(&["family", "amplitude", "sigma", "law"])?;
                let a = doc.real("amplitude")?;
                let sigma = doc.real("sigma")?;
                let m = match obj.get("law") {
                    Some(_) => GaussianPerturb::new(a, sigma, doc.law("law")?),
                    None => GaussianPerturb::uniform(a, sigma),
                };
                wrap("gaussian", m).map(Mechanism::Gaussian)
            }
            other => Err(parse_err("family", format!("unknown family {other:?}"))),
        },
        Some(_) => Err(parse_err("family", "expected a string")),
    }
}

/// Relabels a construction error with the document field it came from.
fn wrap<T>(field: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => parse_err(field, other.to_string()),
    })
}

struct Doc<'a> {
    obj: &'a Map<String, Value>,
}

impl Doc<'_> {
    fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(parse_err(k.as_str(), "unknown field")),
            None => Ok(()),
        }
    }

    fn get(&self, field: &str) -> Result<&Value> {
        self.obj.get(field).ok_or_else(|| parse_err(field, "missing field"))
    }

    fn prior<S: Scalar>(&self) -> Result<Pmf<S>> {
        let weights = vector::<S>(self.get("prior")?, "prior")?;
        wrap("prior", Pmf::new(weights))
    }

    fn matrix<S: Scalar>(&self, field: &str) -> Result<Vec<Vec<S>>> {
        let Value::Array(rows) = self.get(field)? else {
            return Err(parse_err(field, "expected an array of rows"));
        };
        rows.iter()
            .enumerate()
            .map(|(i, r)| vector::<S>(r, &format!("{field}[{i}]")))
            .collect()
    }

    fn count(&self, field: &str) -> Result<usize> {
        self.get(field)?
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| parse_err(field, "expected a non-negative integer"))
    }

    fn real(&self, field: &str) -> Result<f64> {
        let v = number::<f64>(self.get(field)?, field)?;
        Ok(v)
    }

    /// `r` given directly, or `e^eps`.
    fn multiplier<S: Scalar>(&self) -> Result<S> {
        match (self.obj.get("r"), self.obj.get("eps")) {
            (Some(_), Some(_)) => Err(parse_err("eps", "give either eps or r, not both")),
            (Some(r), None) => number::<S>(r, "r"),
            (None, Some(e)) => {
                let eps = number::<f64>(e, "eps")?;
                if eps < 0.0 {
                    return Err(parse_err("eps", "must be non-negative"));
                }
                S::from_f64(eps.exp()).ok_or_else(|| parse_err("eps", "e^eps overflows"))
            }
            (None, None) => Err(parse_err("eps", "missing field")),
        }
    }

    fn law(&self, field: &str) -> Result<InputLaw> {
        let Value::Object(obj) = self.get(field)? else {
            return Err(parse_err(field, "expected an object"));
        };
        let inner = Doc { obj };
        let sub = |k: &str| format!("{field}.{k}");
        let real = |k: &str| number::<f64>(inner.get(k).map_err(|_| parse_err(sub(k), "missing field"))?, &sub(k));
        let kind = obj
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| parse_err(sub("type"), "expected a string"))?;
        let law = match kind {
            "uniform" => {
                inner.only(&["type", "lo", "hi"]).map_err(|e| prefix(field, e))?;
                InputLaw::uniform(real("lo")?, real("hi")?)
            }
            "truncated_exponential" => {
                inner.only(&["type", "lo", "hi", "rate"]).map_err(|e| prefix(field, e))?;
                InputLaw::truncated_exponential(real("lo")?, real("hi")?, real("rate")?)
            }
            other => return Err(parse_err(sub("type"), format!("unknown law {other:?}"))),
        };
        wrap(field, law)
    }
}

fn prefix(field: &str, e: Error) -> Error {
    match e {
        Error::Parse { field: f, message } => parse_err(format!("{field}.{f}"), message),
        other => other,
    }
}

fn vector<S: Scalar>(value: &Value, field: &str) -> Result<Vec<S>> {
    let Value::Array(items) = value else {
        return Err(parse_err(field, "expected an array"));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let f = format!("{field}[{i}]");
            let x = number::<S>(v, &f)?;
            if x < S::zero() {
                return Err(parse_err(f, format!("negative entry {x}")));
            }
            Ok(x)
        })
        .collect()
}

fn number<S: Scalar>(value: &Value, field: &str) -> Result<S> {
    let text = match value {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(parse_err(field, "expected a number")),
    };
    S::parse_literal(&text)
        .ok_or_else(|| parse_err(field, format!("{text:?} is not a finite number")))
}

/// Explicit document for a finite mechanism; rational entries become strings.
pub fn finite_document<S: Scalar>(joint: &Joint<S>) -> Value {
    let row = |r: &[S]| Value::Array(r.iter().map(scalar_json).collect());
    serde_json::json!({
        "prior": row(joint.prior().weights()),
        "channel": joint.channel().rows().iter().map(|r| row(r)).collect::<Vec<_>>(),
    })
}
