use std::collections::BTreeMap;

use serde_json::Value;

use super::{Experiment, HarnessError};
use crate::exact::{parse_rational, rat_to_string, Rational};
use crate::kernel::ModelWeights;

/// Keys each experiment accepts.
pub fn allowed_keys(e: Experiment) -> &'static [&'static str] {
    use Experiment::*;
    match e {
        Ktable => &["n", "weights"],
        Spectrum => &["n", "weights", "cutoff", "oracle_degree"],
        C1Identity => &["n", "weights", "f", "g", "trials", "degree", "seed"],
        FockVerify => &["n", "weights", "cutoff", "margin", "degree", "f", "g", "tolerance"],
        SphereNorm => &["f", "p", "rate_min", "rate_max", "richardson_tolerance"],
        SphereCommutator => &["f", "g", "p", "rate_min", "bound_factor"],
        SphereProduct => &["f", "g", "p", "rate_min", "bound_factor"],
        BergmanDiag => &["p", "points", "seed", "tolerance"],
        OrbifoldCommutator => &["k", "f", "g", "p", "lift_weight", "rate_min", "bound_factor"],
        OrbifoldBergman => &["k", "p", "lift_weight", "points", "tolerance", "cone_tolerance"],
    }
}

/// Validated parameters; getters fill in defaults and record the effective
/// values for the output provenance.
#[derive(Debug, Clone)]
pub struct Params {
    raw: BTreeMap<String, Value>,
    effective: BTreeMap<String, Value>,
}

fn bad(key: &str, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("parameter `{key}`: {msg}"))
}

impl Params {
    pub fn new(experiment: Experiment, raw: BTreeMap<String, Value>) -> Result<Self, HarnessError> {
        let allowed = allowed_keys(experiment);
        for key in raw.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(HarnessError::Config(format!(
                    "unknown parameter `{key}` for {}; accepted: {}",
                    experiment.name(),
                    allowed.join(", ")
                )));
            }
        }
        Ok(Self { raw, effective: BTreeMap::new() })
    }

    pub fn effective(&self) -> &BTreeMap<String, Value> {
        &self.effective
    }

    fn text(&self, key: &str) -> Option<String> {
        match self.raw.get(key)? {
            Value::String(s) => Some(s.clone()),
            Value::Number(n) => Some(n.to_string()),
            Value::Array(items) => Some(
                items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            other => Some(other.to_string()),
        }
    }

    pub fn uint(&mut self, key: &str, default: u64) -> Result<u64, HarnessError> {
        let v = match self.text(key) {
            None => default,
            Some(t) => t.trim().parse::<u64>().map_err(|_| bad(key, format!("expected a nonnegative integer, got `{t}`")))?,
        };
        self.effective.insert(key.to_string(), Value::from(v));
        Ok(v)
    }

    pub fn int(&mut self, key: &str, default: i64) -> Result<i64, HarnessError> {
        let v = match self.text(key) {
            None => default,
            Some(t) => t.trim().parse::<i64>().map_err(|_| bad(key, format!("expected an integer, got `{t}`")))?,
        };
        self.effective.insert(key.to_string(), Value::from(v));
        Ok(v)
    }

    pub fn float(&mut self, key: &str, default: f64) -> Result<f64, HarnessError> {
        let v = match self.text(key) {
            None => default,
            Some(t) => t.trim().parse::<f64>().map_err(|_| bad(key, format!("expected a number, got `{t}`")))?,
        };
        if !v.is_finite() {
            return Err(bad(key, "must be finite"));
        }
        self.effective.insert(key.to_string(), super::output::float_value(v));
        Ok(v)
    }

    pub fn optional_float(&mut self, key: &str) -> Result<Option<f64>, HarnessError> {
        if self.raw.contains_key(key) {
            return self.float(key, 0.0).map(Some);
        }
        Ok(None)
    }

    pub fn rational(&mut self, key: &str, default: &str) -> Result<Rational, HarnessError> {
        let t = self.text(key).unwrap_or_else(|| default.to_string());
        let r = parse_rational(&t).map_err(|e| bad(key, e))?;
        self.effective.insert(key.to_string(), Value::from(rat_to_string(&r)));
        Ok(r)
    }

    pub fn string(&mut self, key: &str, default: &str) -> String {
        let t = self.text(key).unwrap_or_else(|| default.to_string());
        self.effective.insert(key.to_string(), Value::from(t.clone()));
        t
    }

    pub fn optional_string(&mut self, key: &str) -> Option<String> {
        let t = self.text(key)?;
        self.effective.insert(key.to_string(), Value::from(t.clone()));
        Some(t)
    }

    /// `n` and `weights` together; `n` defaults to the number of weights,
    /// weights default to `2` in every coordinate.
    pub fn weights(&mut self) -> Result<ModelWeights, HarnessError> {
        let n_given = self.raw.contains_key("n");
        let list: Option<Vec<Rational>> = match self.text("weights") {
            None => None,
            Some(t) => Some(
                t.split(',')
                    .map(|s| parse_rational(s).map_err(|e| bad("weights", e)))
                    .collect::<Result<_, _>>()?,
            ),
        };
        let n = if n_given {
            self.uint("n", 1)? as usize
        } else {
            let n = list.as_ref().map(|l| l.len()).unwrap_or(1);
            self.effective.insert("n".into(), Value::from(n));
            n
        };
        if n == 0 {
            return Err(bad("n", "must be at least 1"));
        }
        let a = list.unwrap_or_else(|| vec![Rational::from_integer(2.into()); n]);
        if a.len() != n {
            return Err(bad("weights", format!("expected {n} values, got {}", a.len())));
        }
        let w = ModelWeights::new(a).map_err(|e| bad("weights", e))?;
        let shown: Vec<String> = w.a().iter().map(rat_to_string).collect();
        self.effective.insert("weights".into(), Value::from(shown.join(",")));
        Ok(w)
    }

    /// `a:b` (doubling from `a` to `b`), a comma list, or a single value.
    pub fn grid(&mut self, key: &str, default: &str) -> Result<Vec<u32>, HarnessError> {
        let t = self.text(key).unwrap_or_else(|| default.to_string());
        let grid = parse_grid(&t).map_err(|m| bad(key, m))?;
        self.effective.insert(key.to_string(), Value::from(t));
        Ok(grid)
    }
}

pub fn parse_grid(text: &str) -> Result<Vec<u32>, String> {
    let num = |s: &str| -> Result<u32, String> {
        let v: u32 = s.trim().parse().map_err(|_| format!("`{s}` is not a positive integer"))?;
        if v == 0 {
            return Err("p must be at least 1".into());
        }
        Ok(v)
    };
    if let Some((a, b)) = text.split_once(':') {
        let (a, b) = (num(a)?, num(b)?);
        if b < a {
            return Err(format!("empty range {a}:{b}"));
        }
        let mut out = vec![a];
        while *out.last().unwrap() < b {
            let next = out.last().unwrap().checked_mul(2).ok_or("range overflow")?;
            out.push(next);
        }
        if *out.last().unwrap() != b {
            return Err(format!("{b} is not reached from {a} by doubling"));
        }
        return Ok(out);
    }
    let mut out: Vec<u32> = text.split(',').map(num).collect::<Result<_, _>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("8:128").unwrap(), vec![8, 16, 32, 64, 128]);
        assert_eq!(parse_grid("64").unwrap(), vec![64]);
        assert_eq!(parse_grid("16,4").unwrap(), vec![4, 16]);
        assert!(parse_grid("8:100").is_err());
        assert!(parse_grid("0,4").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let raw: BTreeMap<String, Value> = [("flavor".to_string(), Value::from("x"))].into_iter().collect();
        assert!(Params::new(Experiment::Ktable, raw).is_err());
        let raw: BTreeMap<String, Value> = [("weights".to_string(), Value::from("2,6"))].into_iter().collect();
        let mut p = Params::new(Experiment::Spectrum, raw).unwrap();
        assert_eq!(p.weights().unwrap().n(), 2);
    }
}
