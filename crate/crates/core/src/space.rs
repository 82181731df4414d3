//! Partial metric spaces.
//!
//! A partial metric `p` on a set `X` behaves like a metric except that the
//! self-distance `p(x, x)` may be positive. Three carrier kinds are built in:
//!
//! * [`Carrier::MaxHalfLine`]: `X = [0, +inf)` with `p(x, y) = max{x, y}`.
//! * [`Carrier::MetricLift`]: an ordinary metric on the reals, viewed as a
//!   partial metric with zero self-distance.
//! * [`Carrier::Tabulated`]: a finite set `{0, .., n-1}` with distances read
//!   from an `n x n` table. Tables are checked against all four axioms when
//!   the space is built.
//!
//! Every partial metric induces an ordinary metric
//! `p^s(x, y) = 2 p(x, y) - p(x, x) - p(y, y)`, see
//! [`PartialMetric::induced_metric`].

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::axioms;
use crate::error::{Error, Result};

/// Absolute tolerance used for the equality parts of the axioms when
/// validating tabulated spaces.
pub const AXIOM_TOL: f64 = 1e-12;

/// Element of a carrier set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    /// A point of a continuous carrier.
    Real(f64),
    /// A point of a tabulated carrier.
    Index(usize),
}

impl Point {
    pub fn as_real(self) -> Option<f64> {
        match self {
            Point::Real(v) => Some(v),
            Point::Index(_) => None,
        }
    }

    pub fn as_index(self) -> Option<usize> {
        match self {
            Point::Index(i) => Some(i),
            Point::Real(_) => None,
        }
    }
}

impl From<f64> for Point {
    fn from(v: f64) -> Self {
        Point::Real(v)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Real(v) => write!(f, "{v:?}"),
            Point::Index(i) => write!(f, "#{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CarrierKind {
    MaxHalfline,
    MetricLift,
    Tabulated,
}

impl fmt::Display for CarrierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CarrierKind::MaxHalfline => "MAX_HALFLINE",
            CarrierKind::MetricLift => "METRIC_LIFT",
            CarrierKind::Tabulated => "TABULATED",
        })
    }
}

/// Named ordinary metrics on the real line that can be lifted to partial
/// metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseMetric {
    /// `|x - y|`
    AbsDiff,
    /// `0` if `x == y`, `1` otherwise.
    Discrete,
}

impl BaseMetric {
    pub fn name(self) -> &'static str {
        match self {
            BaseMetric::AbsDiff => "abs_diff",
            BaseMetric::Discrete => "discrete",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "abs_diff" => Some(BaseMetric::AbsDiff),
            "discrete" => Some(BaseMetric::Discrete),
            _ => None,
        }
    }

    fn distance(self, x: f64, y: f64) -> f64 {
        match self {
            BaseMetric::AbsDiff => (x - y).abs(),
            BaseMetric::Discrete => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

/// Anything that claims to be a partial metric.
///
/// [`PartialMetricSpace`] is the validated implementation. The trait is also
/// implemented by [`Table`] (an unvalidated candidate) so that the axiom
/// checker can examine candidates that turn out not to be partial metrics.
pub trait PartialMetric {
    fn kind(&self) -> CarrierKind;

    /// Whether `p` belongs to the carrier.
    fn contains(&self, p: Point) -> bool;

    /// Raw distance. Only called with points accepted by [`contains`].
    ///
    /// [`contains`]: PartialMetric::contains
    fn distance(&self, x: Point, y: Point) -> f64;

    fn check_point(&self, p: Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::CarrierMismatch {
                point: p,
                expected: self.kind(),
            })
        }
    }

    /// `p(x, y)`, with carrier membership and finiteness checked.
    fn eval_p(&self, x: Point, y: Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        let d = self.distance(x, y);
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::NonFiniteDistance { x, y })
        }
    }

    /// `p^s(x, y) = 2 p(x, y) - p(x, x) - p(y, y)`.
    ///
    /// Evaluated as `(p(x,y) - p(x,x)) + (p(x,y) - p(y,y))`: each difference
    /// is taken between nearby values first, which makes `p^s(x, x)` exactly
    /// zero and, on the max space, `p^s(x, y)` exactly `|x - y|`.
    fn induced_metric(&self, x: Point, y: Point) -> Result<f64> {
        let pxy = self.eval_p(x, y)?;
        let pxx = self.eval_p(x, x)?;
        let pyy = self.eval_p(y, y)?;
        Ok((pxy - pxx) + (pxy - pyy))
    }
}

/// Square table of nonnegative finite distances over `{0, .., n-1}`.
///
/// A `Table` is only known to be well formed; whether it is a partial metric
/// is decided by [`make_space`] or by the checks in [`crate::axioms`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    n: usize,
    entries: Vec<f64>,
}

impl Table {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::MalformedMatrix("matrix has no rows".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::MalformedMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, v) in row.into_iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::MalformedMatrix(format!(
                        "entry ({i}, {j}) = {v} is not a finite nonnegative number"
                    )));
                }
                entries.push(v);
            }
        }
        Ok(Table { n, entries })
    }

    /// Parses the plain-text table format: the first token is `n`, followed
    /// by `n * n` whitespace-separated nonnegative decimals in row order.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or_else(|| Error::MalformedMatrix("empty input".into()))?
            .parse()
            .map_err(|e| Error::MalformedMatrix(format!("bad size: {e}")))?;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let tok = tokens.next().ok_or_else(|| {
                    Error::MalformedMatrix(format!("missing entry ({i}, {j})"))
                })?;
                let v: f64 = tok.parse().map_err(|e| {
                    Error::MalformedMatrix(format!("entry ({i}, {j}) `{tok}`: {e}"))
                })?;
                row.push(v);
            }
            rows.push(row);
        }
        if let Some(extra) = tokens.next() {
            return Err(Error::MalformedMatrix(format!(
                "trailing token `{extra}` after {n}x{n} entries"
            )));
        }
        Table::new(rows)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Table::parse(&text)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// All points of the carrier, in index order.
    pub fn points(&self) -> Vec<Point> {
        (0..self.n).map(Point::Index).collect()
    }
}

impl PartialMetric for Table {
    fn kind(&self) -> CarrierKind {
        CarrierKind::Tabulated
    }

    fn contains(&self, p: Point) -> bool {
        matches!(p, Point::Index(i) if i < self.n)
    }

    fn distance(&self, x: Point, y: Point) -> f64 {
        match (x, y) {
            (Point::Index(i), Point::Index(j)) => self.get(i, j),
            _ => unreachable!("membership checked by caller"),
        }
    }
}

/// Carrier descriptor accepted by [`make_space`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Carrier {
    MaxHalfline,
    MetricLift(BaseMetric),
    Tabulated(Table),
}

impl Carrier {
    pub fn kind(&self) -> CarrierKind {
        match self {
            Carrier::MaxHalfline => CarrierKind::MaxHalfline,
            Carrier::MetricLift(_) => CarrierKind::MetricLift,
            Carrier::Tabulated(_) => CarrierKind::Tabulated,
        }
    }
}

/// A validated partial metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialMetricSpace {
    carrier: Carrier,
}

impl PartialMetricSpace {
    /// `[0, +inf)` with `p(x, y) = max{x, y}`.
    pub fn max_halfline() -> Self {
        PartialMetricSpace {
            carrier: Carrier::MaxHalfline,
        }
    }

    pub fn metric_lift(base: BaseMetric) -> Self {
        PartialMetricSpace {
            carrier: Carrier::MetricLift(base),
        }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }
}

/// Builds a space from a descriptor.
///
/// Continuous carriers always succeed. A tabulated carrier is checked
/// exhaustively against (p1)-(p4) and the first violation is returned.
pub fn make_space(carrier: Carrier) -> Result<PartialMetricSpace> {
    if let Carrier::Tabulated(table) = &carrier {
        let report = axioms::check_axioms(table, &table.points(), AXIOM_TOL)?;
        if let Some(v) = report.violations.into_iter().next() {
            return Err(Error::AxiomViolation {
                axiom: v.axiom.to_string(),
                witness: v.witness,
                lhs: v.lhs,
                rhs: v.rhs,
            });
        }
    }
    Ok(PartialMetricSpace { carrier })
}

impl PartialMetric for PartialMetricSpace {
    fn kind(&self) -> CarrierKind {
        self.carrier.kind()
    }

    fn contains(&self, p: Point) -> bool {
        match (&self.carrier, p) {
            (Carrier::MaxHalfline, Point::Real(v)) => v.is_finite() && v >= 0.0,
            (Carrier::MetricLift(_), Point::Real(v)) => v.is_finite(),
            (Carrier::Tabulated(t), p) => t.contains(p),
            _ => false,
        }
    }

    fn distance(&self, x: Point, y: Point) -> f64 {
        match (&self.carrier, x, y) {
            (Carrier::MaxHalfline, Point::Real(a), Point::Real(b)) => a.max(b),
            (Carrier::MetricLift(m), Point::Real(a), Point::Real(b)) => m.distance(a, b),
            (Carrier::Tabulated(t), x, y) => t.distance(x, y),
            _ => unreachable!("membership checked by caller"),
        }
    }
}
