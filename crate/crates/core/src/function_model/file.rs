//! Function definition files.
//!
//! ```text
//! # comment lines start with '#'
//! lambda: 2.5                      # optional for expressions
//! expr: sqrt((1 + 0.5*cos(pi*x))/2)
//! ```
//!
//! or, for tabulated samples on the grid x_j = 2j/2ⁿ - 1:
//!
//! ```text
//! lambda: 1.0                      # required
//! values:
//! 0.51 0.52 0.53 0.54
//! ...                              # 2ⁿ whitespace-separated numbers
//! ```

use std::path::Path;

use super::{parse_function_expr, FunctionModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionDefinition {
    Expression { src: String, lambda: Option<f64> },
    Tabulated { values: Vec<f64>, lambda: f64 },
}

impl FunctionDefinition {
    pub fn into_model(self, k_max: u32) -> Result<FunctionModel> {
        match self {
            FunctionDefinition::Expression { src, lambda } => {
                let m = parse_function_expr(&src)?;
                match lambda {
                    Some(l) => m.with_lambda(l),
                    None if m.lambda.is_finite() => Ok(m),
                    None => m.with_estimated_lambda(k_max),
                }
            }
            FunctionDefinition::Tabulated { values, lambda } => FunctionModel::tabulated(values, lambda),
        }
    }
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("definition line {line}: {msg}"))
}

pub fn parse_definition(text: &str) -> Result<FunctionDefinition> {
    let mut lambda = None;
    let mut expr = None;
    let mut values: Option<Vec<f64>> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(vals) = values.as_mut() {
            for tok in line.split_whitespace() {
                vals.push(tok.parse().map_err(|_| bad(line_no, format!("bad value '{tok}'")))?);
            }
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| bad(line_no, "expected 'key: value'"))?;
        let rest = rest.trim();
        match key.trim() {
            "lambda" => {
                lambda = Some(
                    rest.parse::<f64>()
                        .map_err(|_| bad(line_no, format!("bad lambda '{rest}'")))?,
                )
            }
            "expr" => expr = Some(rest.to_string()),
            "values" => {
                let mut v = Vec::new();
                for tok in rest.split_whitespace() {
                    v.push(tok.parse().map_err(|_| bad(line_no, format!("bad value '{tok}'")))?);
                }
                values = Some(v);
            }
            other => return Err(bad(line_no, format!("unknown key '{other}'"))),
        }
    }
    match (expr, values) {
        (Some(src), None) => Ok(FunctionDefinition::Expression { src, lambda }),
        (None, Some(values)) => Ok(FunctionDefinition::Tabulated {
            values,
            lambda: lambda.ok_or_else(|| Error::Config("tabulated definition needs a 'lambda:' line".into()))?,
        }),
        (Some(_), Some(_)) => Err(Error::Config("definition has both 'expr' and 'values'".into())),
        (None, None) => Err(Error::Config("definition has neither 'expr' nor 'values'".into())),
    }
}

pub fn read_definition(path: impl AsRef<Path>) -> Result<FunctionDefinition> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_definition(&text)
}
