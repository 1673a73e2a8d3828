//! JSON description of a number field.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::NumberField;
use crate::arith::rat::{fmt_q, parse_q};
use crate::arith::QPoly;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    /// c0..cn as decimal strings, monic.
    pub min_poly: Vec<String>,
    /// Each basis element as power-basis coefficients (rational strings).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral_basis: Option<Vec<Vec<String>>>,
}

fn schema(field: &str, msg: impl Into<String>) -> Error {
    Error::Schema { artifact: "field".into(), field: field.into(), msg: msg.into() }
}

impl FieldSpec {
    pub fn from_i64(c: &[i64]) -> FieldSpec {
        FieldSpec { min_poly: c.iter().map(|x| x.to_string()).collect(), integral_basis: None }
    }

    pub fn gaussian() -> FieldSpec {
        Self::from_i64(&[1, 0, 1])
    }

    pub fn eisenstein() -> FieldSpec {
        Self::from_i64(&[1, 1, 1])
    }

    /// Parses JSON, naming the offending field on failure.
    pub fn from_json_str(s: &str) -> Result<FieldSpec> {
        let v: Value = serde_json::from_str(s).map_err(|e| schema("<root>", e.to_string()))?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<FieldSpec> {
        let obj = v.as_object().ok_or_else(|| schema("<root>", "expected an object"))?;
        let mp = obj.get("min_poly").ok_or_else(|| schema("min_poly", "missing"))?;
        let arr = mp.as_array().ok_or_else(|| schema("min_poly", "expected an array"))?;
        let mut min_poly = Vec::new();
        for (i, c) in arr.iter().enumerate() {
            let s = match c {
                Value::String(s) => s.clone(),
                Value::Number(n) if n.is_i64() => n.to_string(),
                _ => return Err(schema(&format!("min_poly[{i}]"), "expected an integer string")),
            };
            s.parse::<BigInt>().map_err(|_| schema(&format!("min_poly[{i}]"), format!("not an integer: {s}")))?;
            min_poly.push(s);
        }
        let integral_basis = match obj.get("integral_basis") {
            None | Some(Value::Null) => None,
            Some(b) => {
                let rows = b.as_array().ok_or_else(|| schema("integral_basis", "expected an array"))?;
                let mut out = Vec::new();
                for (i, r) in rows.iter().enumerate() {
                    let cs = r.as_array().ok_or_else(|| schema(&format!("integral_basis[{i}]"), "expected an array"))?;
                    let mut row = Vec::new();
                    for (j, c) in cs.iter().enumerate() {
                        let name = format!("integral_basis[{i}][{j}]");
                        let s = match c {
                            Value::String(s) => s.clone(),
                            Value::Number(n) if n.is_i64() => n.to_string(),
                            _ => return Err(schema(&name, "expected a rational string")),
                        };
                        parse_q(&s).map_err(|_| schema(&name, format!("not a rational: {s}")))?;
                        row.push(s);
                    }
                    out.push(row);
                }
                Some(out)
            }
        };
        Ok(FieldSpec { min_poly, integral_basis })
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn build(&self) -> Result<NumberField> {
        let mp: Vec<BigInt> = self
            .min_poly
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(|_| schema("min_poly", format!("not an integer: {s}"))))
            .collect::<Result<_>>()?;
        let basis = match &self.integral_basis {
            None => None,
            Some(rows) => Some(
                rows.iter()
                    .map(|r| r.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>().map(QPoly::new))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        NumberField::new(mp, basis)
    }
}

impl NumberField {
    /// The spec that rebuilds this field with its current basis.
    pub fn spec(&self) -> FieldSpec {
        let basis: Vec<Vec<String>> = (0..self.n).map(|i| self.basis_poly(i).0.iter().map(fmt_q).collect()).collect();
        FieldSpec { min_poly: self.min_poly.iter().map(|c| c.to_string()).collect(), integral_basis: Some(basis) }
    }
}
