//! Text and JSON formats shared by the library and the CLI.
//!
//! Sequence files hold one rational per line, line number = index. The first
//! line may be a `# n: value` header comment; blank lines are rejected.

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numkernel::{parse_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct SequenceError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub fn parse_sequence(text: &str) -> Result<Vec<Rational>, SequenceError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        if k == 0 && raw.trim_start().starts_with('#') {
            continue;
        }
        if raw.trim().is_empty() {
            return Err(SequenceError {
                line,
                column: 1,
                message: "blank lines are not allowed".into(),
            });
        }
        let column = raw.len() - raw.trim_start().len() + 1;
        let value = parse_rational(raw).map_err(|e| SequenceError {
            line,
            column,
            message: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn format_sequence(values: &[Rational]) -> String {
    let mut s = String::from("# n: value\n");
    for v in values {
        s.push_str(&v.to_string());
        s.push('\n');
    }
    s
}

pub fn ser_rational<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn ser_rationals<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    let strs: Vec<String> = xs.iter().map(ToString::to_string).collect();
    strs.serialize(s)
}

pub fn ser_rational_matrix<S: Serializer>(
    m: &crate::matrix::Matrix<Rational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    m.map(ToString::to_string).serialize(s)
}

pub fn ser_rational_matrices<S: Serializer>(
    ms: &[crate::matrix::Matrix<Rational>],
    s: S,
) -> Result<S::Ok, S::Error> {
    let v: Vec<_> = ms.iter().map(|m| m.map(ToString::to_string)).collect();
    v.serialize(s)
}

pub fn ser_display<T: std::fmt::Display, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}
