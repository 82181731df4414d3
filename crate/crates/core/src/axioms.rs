//! Sample-based validation of partial metric candidates.
//!
//! The checks enumerate every pair (and every ordered triple, repeats
//! included) of a finite sample and report each violation together with the
//! witness points and both sides of the failing relation. Violations are
//! listed per axiom, in sample-index order of the witness.
//!
//! Equalities are tested up to an absolute tolerance `tol`; inequalities
//! `lhs <= rhs` fail only when `lhs > rhs + tol`. For the identity-type
//! relations (`P1`, `ZERO_IMPLIES_EQUAL`, `PS_ZERO_IMPLIES_EQUAL`) the
//! reported `rhs` is `tol` itself and `lhs` is the quantity compared to it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{PartialMetric, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Axiom {
    /// `x = y <=> p(x,x) = p(x,y) = p(y,y)`
    P1,
    /// `p(x,x) <= p(x,y)`
    P2,
    /// `p(x,y) = p(y,x)`
    P3,
    /// `p(x,y) <= p(x,z) + p(z,y) - p(z,z)`
    P4,
    /// `p(x,y) = 0 => x = y`
    ZeroImpliesEqual,
    /// `p^s(x,y) = p^s(y,x)`
    PsSymmetry,
    /// `p^s(x,x) = 0`
    PsSelfZero,
    /// `p^s(x,y) = 0 => x = y`
    PsZeroImpliesEqual,
    /// `p^s(x,y) <= p^s(x,z) + p^s(z,y)`
    PsTriangle,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::P1 => "P1",
            Axiom::P2 => "P2",
            Axiom::P3 => "P3",
            Axiom::P4 => "P4",
            Axiom::ZeroImpliesEqual => "ZERO_IMPLIES_EQUAL",
            Axiom::PsSymmetry => "PS_SYMMETRY",
            Axiom::PsSelfZero => "PS_SELF_ZERO",
            Axiom::PsZeroImpliesEqual => "PS_ZERO_IMPLIES_EQUAL",
            Axiom::PsTriangle => "PS_TRIANGLE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<Point>,
    pub lhs: f64,
    pub rhs: f64,
}

impl Violation {
    /// Recomputes `(lhs, rhs)` from the space at the witness.
    pub fn reevaluate<S: PartialMetric + ?Sized>(&self, space: &S, tol: f64) -> Result<(f64, f64)> {
        sides(space, self.axiom, &self.witness, tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
    pub sample_size: usize,
}

impl AxiomReport {
    fn from_violations(violations: Vec<Violation>, sample_size: usize) -> Self {
        AxiomReport {
            passed: violations.is_empty(),
            violations,
            sample_size,
        }
    }

    /// Concatenates several reports over the same sample.
    pub fn combine(reports: impl IntoIterator<Item = AxiomReport>) -> Self {
        let mut violations = Vec::new();
        let mut sample_size = 0;
        for r in reports {
            sample_size = sample_size.max(r.sample_size);
            violations.extend(r.violations);
        }
        AxiomReport::from_violations(violations, sample_size)
    }
}

/// Both sides of `axiom` at `witness`. Shared by the checks and by
/// [`Violation::reevaluate`] so reported values reproduce bit for bit.
fn sides<S: PartialMetric + ?Sized>(
    space: &S,
    axiom: Axiom,
    w: &[Point],
    tol: f64,
) -> Result<(f64, f64)> {
    let arity = match axiom {
        Axiom::PsSelfZero => 1,
        Axiom::P4 | Axiom::PsTriangle => 3,
        _ => 2,
    };
    if w.len() != arity {
        return Err(Error::InvalidArgument(format!(
            "{axiom} needs a witness of {arity} points, got {}",
            w.len()
        )));
    }
    let p = |a: Point, b: Point| space.eval_p(a, b);
    let ps = |a: Point, b: Point| space.induced_metric(a, b);
    Ok(match axiom {
        Axiom::P1 => {
            let (pxx, pxy, pyy) = (p(w[0], w[0])?, p(w[0], w[1])?, p(w[1], w[1])?);
            ((pxy - pxx).abs().max((pxy - pyy).abs()), tol)
        }
        Axiom::P2 => (p(w[0], w[0])?, p(w[0], w[1])?),
        Axiom::P3 => (p(w[0], w[1])?, p(w[1], w[0])?),
        Axiom::P4 => (p(w[0], w[1])?, p(w[0], w[2])? + p(w[2], w[1])? - p(w[2], w[2])?),
        Axiom::ZeroImpliesEqual => (p(w[0], w[1])?, tol),
        Axiom::PsSymmetry => (ps(w[0], w[1])?, ps(w[1], w[0])?),
        Axiom::PsSelfZero => (ps(w[0], w[0])?, 0.0),
        Axiom::PsZeroImpliesEqual => (ps(w[0], w[1])?, tol),
        Axiom::PsTriangle => (ps(w[0], w[1])?, ps(w[0], w[2])? + ps(w[2], w[1])?),
    })
}

fn validate_sample<S: PartialMetric + ?Sized>(space: &S, sample: &[Point]) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    sample.iter().try_for_each(|&x| space.check_point(x))
}

struct Collector<'a, S: ?Sized> {
    space: &'a S,
    tol: f64,
    out: Vec<Violation>,
}

impl<S: PartialMetric + ?Sized> Collector<'_, S> {
    /// Evaluates `axiom` at `witness` and records it when `fails(lhs, rhs)`.
    fn test(&mut self, axiom: Axiom, witness: &[Point], fails: impl Fn(f64, f64) -> bool) -> Result<()> {
        let (lhs, rhs) = sides(self.space, axiom, witness, self.tol)?;
        if fails(lhs, rhs) {
            self.out.push(Violation {
                axiom,
                witness: witness.to_vec(),
                lhs,
                rhs,
            });
        }
        Ok(())
    }
}

/// Checks (p1)-(p4) on every pair and ordered triple of `sample`.
pub fn check_axioms<S: PartialMetric + ?Sized>(space: &S, sample: &[Point], tol: f64) -> Result<AxiomReport> {
    validate_sample(space, sample)?;
    let n = sample.len();
    let mut c = Collector {
        space,
        tol,
        out: Vec::new(),
    };
    let le = |lhs: f64, rhs: f64| lhs > rhs + tol;

    for i in 0..n {
        for j in i..n {
            let (x, y) = (sample[i], sample[j]);
            // both directions of the biconditional
            c.test(Axiom::P1, &[x, y], |spread, tol| (x == y) != (spread <= tol))?;
        }
    }
    for &x in sample {
        for &y in sample {
            c.test(Axiom::P2, &[x, y], le)?;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            c.test(Axiom::P3, &[sample[i], sample[j]], |a, b| (a - b).abs() > tol)?;
        }
    }
    for &x in sample {
        for &y in sample {
            for &z in sample {
                c.test(Axiom::P4, &[x, y, z], le)?;
            }
        }
    }
    Ok(AxiomReport::from_violations(c.out, n))
}

/// Reports every pair with `p(x, y) <= tol` whose points differ.
pub fn check_zero_implies_equal<S: PartialMetric + ?Sized>(
    space: &S,
    sample: &[Point],
    tol: f64,
) -> Result<AxiomReport> {
    validate_sample(space, sample)?;
    let mut c = Collector {
        space,
        tol,
        out: Vec::new(),
    };
    for &x in sample {
        for &y in sample {
            c.test(Axiom::ZeroImpliesEqual, &[x, y], |d, tol| d <= tol && x != y)?;
        }
    }
    Ok(AxiomReport::from_violations(c.out, sample.len()))
}

/// Checks that `p^s` is a metric on the sample: symmetric, zero on the
/// diagonal, zero only on the diagonal, and subject to the triangle
/// inequality.
pub fn check_induced_metric<S: PartialMetric + ?Sized>(
    space: &S,
    sample: &[Point],
    tol: f64,
) -> Result<AxiomReport> {
    validate_sample(space, sample)?;
    let n = sample.len();
    let mut c = Collector {
        space,
        tol,
        out: Vec::new(),
    };
    for &x in sample {
        c.test(Axiom::PsSelfZero, &[x], |d, _| d.abs() > tol)?;
    }
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (sample[i], sample[j]);
            c.test(Axiom::PsSymmetry, &[x, y], |a, b| (a - b).abs() > tol)?;
            c.test(Axiom::PsZeroImpliesEqual, &[x, y], |d, tol| d <= tol && x != y)?;
        }
    }
    for &x in sample {
        for &y in sample {
            for &z in sample {
                c.test(Axiom::PsTriangle, &[x, y, z], |a, b| a > b + tol)?;
            }
        }
    }
    Ok(AxiomReport::from_violations(c.out, n))
}

/// Runs all three checks and concatenates the results.
pub fn check_all<S: PartialMetric + ?Sized>(space: &S, sample: &[Point], tol: f64) -> Result<AxiomReport> {
    Ok(AxiomReport::combine([
        check_axioms(space, sample, tol)?,
        check_zero_implies_equal(space, sample, tol)?,
        check_induced_metric(space, sample, tol)?,
    ]))
}
