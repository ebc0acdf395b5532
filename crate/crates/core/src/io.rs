//! Text formats: exact rationals as `"p/q"` strings, field elements as
//! coefficient arrays, matrices as row-major arrays of elements.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numfield::{AlgebraicNumber, ExtElement, NumberField, QuadExtension};
use crate::rational::{self, Rational};

pub fn parse_rational(s: &str) -> Result<Rational> {
    rational::parse(s).map_err(|e| Error::Parse(e.to_string()))
}

/// Accepts a JSON string (`"3/4"`) or integer.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(rational::int(n.as_i64().unwrap())),
        _ => Err(Error::Parse(format!("expected a rational, got {v}"))),
    }
}

pub fn element_to_json(x: &AlgebraicNumber) -> Value {
    Value::Array(
        x.coeffs()
            .iter()
            .map(|c| Value::String(rational::format(c)))
            .collect(),
    )
}

pub fn element_from_json(field: &NumberField, v: &Value) -> Result<AlgebraicNumber> {
    match v {
        Value::Array(items) => {
            let coeffs = items.iter().map(rational_from_json).collect::<Result<Vec<_>>>()?;
            if coeffs.len() > field.degree() {
                return Err(Error::Parse(format!(
                    "{} coefficients for a field of degree {}",
                    coeffs.len(),
                    field.degree()
                )));
            }
            Ok(field.element(coeffs))
        }
        other => Ok(field.element(vec![rational_from_json(other)?])),
    }
}

pub fn element_from_strings(field: &NumberField, coeffs: &[String]) -> Result<AlgebraicNumber> {
    element_from_json(
        field,
        &Value::Array(coeffs.iter().cloned().map(Value::String).collect()),
    )
}

/// `a + b s` as `[[a...], [b...]]`.
pub fn ext_to_json(x: &ExtElement) -> Value {
    json!([element_to_json(&x.a), element_to_json(&x.b)])
}

/// Accepts `[[a...], [b...]]`, or a bare base-field element.
pub fn ext_from_json(ext: &QuadExtension, v: &Value) -> Result<ExtElement> {
    let f = ext.base();
    if let Value::Array(items) = v {
        if items.len() == 2 && items.iter().all(Value::is_array) {
            return Ok(ext.make(
                element_from_json(f, &items[0])?,
                element_from_json(f, &items[1])?,
            ));
        }
    }
    Ok(ext.from_base(&element_from_json(f, v)?))
}

pub fn matrix_to_json<E: Clone>(m: &Matrix<E>, entry: impl Fn(&E) -> Value) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(&entry).collect()))
            .collect(),
    )
}

pub fn matrix_from_json<E: Clone>(v: &Value, entry: impl Fn(&Value) -> Result<E>) -> Result<Matrix<E>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    let parsed = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                .iter()
                .map(&entry)
                .collect::<Result<Vec<E>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m = Matrix::from_rows(parsed).ok_or_else(|| Error::Parse("ragged matrix".into()))?;
    if !m.is_square() {
        return Err(Error::Parse("matrix must be square".into()));
    }
    Ok(m)
}

pub fn ext_matrix_to_json(m: &Matrix<ExtElement>) -> Value {
    matrix_to_json(m, ext_to_json)
}

pub fn ext_matrix_from_json(ext: &QuadExtension, v: &Value) -> Result<Matrix<ExtElement>> {
    matrix_from_json(v, |e| ext_from_json(ext, e))
}

pub fn bigints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}
