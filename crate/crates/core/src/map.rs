//! Coupled maps `F: X x X -> X`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::space::Point;

/// Where a map came from, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// `a*x + b*y + c`
    Linear { a: f64, b: f64, c: f64 },
    /// `(x + y) / divisor`
    ScaledSum { divisor: f64 },
    Constant { value: f64 },
    Expr { text: String },
    /// `F(i, j)` read from an index table of the given size.
    Table { size: usize },
    Custom { name: String },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Linear { a, b, c } => write!(f, "{a}*x + {b}*y + {c}"),
            Provenance::ScaledSum { divisor } => write!(f, "(x + y) / {divisor}"),
            Provenance::Constant { value } => write!(f, "{value}"),
            Provenance::Expr { text } => f.write_str(text),
            Provenance::Table { size } => write!(f, "table map on {size} points"),
            Provenance::Custom { name } => f.write_str(name),
        }
    }
}

type Eval = dyn Fn(Point, Point) -> Result<Point> + Send + Sync;

/// A deterministic evaluator for `F: X x X -> X`.
///
/// Whether `F(x, y)` lands in the carrier of a given space is checked by the
/// solver, not here.
#[derive(Clone)]
pub struct CoupledMap {
    eval: Arc<Eval>,
    provenance: Provenance,
}

impl fmt::Debug for CoupledMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoupledMap")
            .field("provenance", &self.provenance)
            .finish()
    }
}

fn real_args(x: Point, y: Point) -> Result<(f64, f64)> {
    match (x, y) {
        (Point::Real(a), Point::Real(b)) => Ok((a, b)),
        _ => Err(Error::InvalidArgument(format!(
            "real-valued map applied to ({x}, {y})"
        ))),
    }
}

fn real_map(provenance: Provenance, f: impl Fn(f64, f64) -> Result<f64> + Send + Sync + 'static) -> CoupledMap {
    CoupledMap {
        eval: Arc::new(move |x, y| {
            let (a, b) = real_args(x, y)?;
            let v = f(a, b)?;
            if v.is_finite() {
                Ok(Point::Real(v))
            } else {
                Err(Error::NonFiniteValue)
            }
        }),
        provenance,
    }
}

impl CoupledMap {
    pub fn linear(a: f64, b: f64, c: f64) -> Self {
        real_map(Provenance::Linear { a, b, c }, move |x, y| Ok(a * x + b * y + c))
    }

    pub fn scaled_sum(divisor: f64) -> Self {
        real_map(Provenance::ScaledSum { divisor }, move |x, y| Ok((x + y) / divisor))
    }

    pub fn constant(value: f64) -> Self {
        real_map(Provenance::Constant { value }, move |_, _| Ok(value))
    }

    pub fn from_expr(expr: Expr) -> Self {
        let text = expr.to_string();
        real_map(Provenance::Expr { text }, move |x, y| expr.eval(x, y))
    }

    /// Map on a tabulated carrier: `F(i, j) = table[i][j]`.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|row| row.len() != n) {
            return Err(Error::MalformedMatrix("map table must be square and nonempty".into()));
        }
        let eval = move |x: Point, y: Point| match (x, y) {
            (Point::Index(i), Point::Index(j)) if i < n && j < n => Ok(Point::Index(table[i][j])),
            _ => Err(Error::InvalidArgument(format!("table map applied to ({x}, {y})"))),
        };
        Ok(CoupledMap {
            eval: Arc::new(eval),
            provenance: Provenance::Table { size: n },
        })
    }

    /// Parses the plain-text index table format: `n`, then `n * n` indices.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let bad = |m: String| Error::MalformedMatrix(m);
        let n: usize = tokens
            .next()
            .ok_or_else(|| bad("empty input".into()))?
            .parse()
            .map_err(|e| bad(format!("bad size: {e}")))?;
        let mut rows = vec![Vec::with_capacity(n); n];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..n {
                let tok = tokens.next().ok_or_else(|| bad(format!("missing entry ({i}, {j})")))?;
                row.push(tok.parse().map_err(|e| bad(format!("entry ({i}, {j}) `{tok}`: {e}")))?);
            }
        }
        if tokens.next().is_some() {
            return Err(bad("trailing tokens".into()));
        }
        CoupledMap::from_table(rows)
    }

    /// Wraps an arbitrary real function.
    pub fn from_fn(name: &str, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        real_map(Provenance::Custom { name: name.to_string() }, move |x, y| Ok(f(x, y)))
    }

    pub fn apply(&self, x: Point, y: Point) -> Result<Point> {
        (self.eval)(x, y)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}
