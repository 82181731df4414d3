//! Contractive conditions for coupled maps.
//!
//! Three inequalities are supported, each with constants `k, l >= 0`:
//!
//! | mode                 | right-hand side                       | constraint   | rate `delta`      |
//! |----------------------|---------------------------------------|--------------|-------------------|
//! | `MIXED_ARG`          | `k p(x,u) + l p(y,v)`                 | `k + l < 1`  | `k + l`           |
//! | `SELF_DISPLACEMENT`  | `k p(F(x,y),x) + l p(F(u,v),u)`       | `k + l < 1`  | `k / (1 - l)`     |
//! | `CROSS_DISPLACEMENT` | `k p(F(x,y),u) + l p(F(u,v),x)`       | `k + 2l < 1` | `l / (1 - l - k)` |
//!
//! and the left-hand side is always `p(F(x,y), F(u,v))`. Constraints are
//! strict and compared without tolerance: at `k + l = 1` a map may have
//! several coupled fixed points.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::CoupledMap;
use crate::sampling::Quadruple;
use crate::space::PartialMetric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    MixedArg,
    SelfDisplacement,
    CrossDisplacement,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::MixedArg, Mode::SelfDisplacement, Mode::CrossDisplacement];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::MixedArg => "MIXED_ARG",
            Mode::SelfDisplacement => "SELF_DISPLACEMENT",
            Mode::CrossDisplacement => "CROSS_DISPLACEMENT",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionSpec {
    pub mode: Mode,
    pub k: f64,
    pub l: f64,
}

impl ContractionSpec {
    /// Unchecked constructor; see [`ContractionSpec::validate`].
    pub fn new(mode: Mode, k: f64, l: f64) -> Self {
        ContractionSpec { mode, k, l }
    }

    /// `p(F(x,y),F(u,v)) <= k/2 (p(x,u) + p(y,v))` with `0 <= k < 1`.
    pub fn mixed_equal(k: f64) -> Result<Self> {
        Self::equal(Mode::MixedArg, k, 1.0)
    }

    /// `p(F(x,y),F(u,v)) <= k/2 (p(F(x,y),x) + p(F(u,v),u))` with `0 <= k < 1`.
    pub fn self_equal(k: f64) -> Result<Self> {
        Self::equal(Mode::SelfDisplacement, k, 1.0)
    }

    /// `p(F(x,y),F(u,v)) <= k/2 (p(F(x,y),u) + p(F(u,v),x))` with `0 <= k < 2/3`.
    pub fn cross_equal(k: f64) -> Result<Self> {
        Self::equal(Mode::CrossDisplacement, k, 2.0 / 3.0)
    }

    fn equal(mode: Mode, k: f64, bound: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 0.0 && k < bound) {
            return Err(Error::InvalidSpec(format!(
                "equal-constant {mode} needs 0 <= k < {bound}, got {k}"
            )));
        }
        let spec = ContractionSpec::new(mode, k / 2.0, k / 2.0);
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the mode's strict constraint.
    ///
    /// Also rejects the rare specs whose constraint holds but whose rate
    /// rounds to 1 in floating point.
    pub fn validate(&self) -> Result<()> {
        let (k, l) = (self.k, self.l);
        if !(k.is_finite() && l.is_finite() && k >= 0.0 && l >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "constants must be finite and nonnegative, got k = {k}, l = {l}"
            )));
        }
        match self.mode {
            Mode::MixedArg | Mode::SelfDisplacement if k + l >= 1.0 => {
                return Err(Error::InvalidSpec(format!(
                    "{} requires k + l < 1, got {}",
                    self.mode,
                    k + l
                )))
            }
            Mode::CrossDisplacement if k + 2.0 * l >= 1.0 => {
                return Err(Error::InvalidSpec(format!(
                    "{} requires k + 2l < 1, got {}",
                    self.mode,
                    k + 2.0 * l
                )))
            }
            _ => {}
        }
        let delta = self.raw_delta();
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidSpec(format!("rate {delta} is not below 1")));
        }
        Ok(())
    }

    fn raw_delta(&self) -> f64 {
        let (k, l) = (self.k, self.l);
        match self.mode {
            Mode::MixedArg => k + l,
            Mode::SelfDisplacement => k / (1.0 - l),
            Mode::CrossDisplacement => l / (1.0 - l - k),
        }
    }

    /// Geometric rate of the residuals of the Picard iteration.
    pub fn delta(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.raw_delta())
    }

    /// Same mode with both constants replaced by `(k + l) / 2`.
    ///
    /// For the two displacement modes any map satisfying the original
    /// inequality on a set of quadruples closed under `(x,y) <-> (u,v)`
    /// satisfies the symmetrized one. For `MIXED_ARG` only the rate and the
    /// summed two-sequence inequality carry over; see [`summed_mixed_check`].
    pub fn symmetrize(&self) -> Result<Self> {
        self.validate()?;
        let m = (self.k + self.l) / 2.0;
        let out = ContractionSpec::new(self.mode, m, m);
        out.validate()?;
        Ok(out)
    }

    /// Both sides of the inequality at quadruple `(x, y, u, v)`.
    fn sides<S: PartialMetric + ?Sized>(&self, map: &CoupledMap, space: &S, q: &Quadruple) -> Result<(f64, f64)> {
        let [x, y, u, v] = *q;
        let fxy = map.apply(x, y)?;
        let fuv = map.apply(u, v)?;
        let lhs = space.eval_p(fxy, fuv)?;
        let rhs = match self.mode {
            Mode::MixedArg => self.k * space.eval_p(x, u)? + self.l * space.eval_p(y, v)?,
            Mode::SelfDisplacement => self.k * space.eval_p(fxy, x)? + self.l * space.eval_p(fuv, u)?,
            Mode::CrossDisplacement => self.k * space.eval_p(fxy, u)? + self.l * space.eval_p(fuv, x)?,
        };
        Ok((lhs, rhs))
    }
}

pub fn validate_spec(spec: &ContractionSpec) -> Result<()> {
    spec.validate()
}

pub fn delta_of(spec: &ContractionSpec) -> Result<f64> {
    spec.delta()
}

pub fn symmetrize(spec: &ContractionSpec) -> Result<ContractionSpec> {
    spec.symmetrize()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionViolation {
    /// `(x, y, u, v)`
    pub quadruple: Quadruple,
    pub lhs: f64,
    pub rhs: f64,
}

/// Evaluates the spec's inequality on every quadruple and returns those where
/// `lhs > rhs + tol`, in input order.
pub fn verify_contraction<S: PartialMetric + ?Sized>(
    map: &CoupledMap,
    space: &S,
    spec: &ContractionSpec,
    quadruples: &[Quadruple],
    tol: f64,
) -> Result<Vec<ContractionViolation>> {
    spec.validate()?;
    let mut out = Vec::new();
    for q in quadruples {
        for &p in q {
            space.check_point(p)?;
        }
        let (lhs, rhs) = spec.sides(map, space, q)?;
        if lhs > rhs + tol {
            out.push(ContractionViolation {
                quadruple: *q,
                lhs,
                rhs,
            });
        }
    }
    Ok(out)
}

/// `(x, y, u, v) -> (u, v, x, y)`
pub fn swap(q: &Quadruple) -> Quadruple {
    [q[2], q[3], q[0], q[1]]
}

/// The two-sequence form of `MIXED_ARG` used for the residual recursion:
/// `p(F(x,y),F(u,v)) + p(F(y,x),F(v,u)) <= (k + l)(p(x,u) + p(y,v))`.
///
/// It follows from the pointwise inequality and depends on `k, l` only
/// through `k + l`, so it is shared by a spec and its symmetrization.
/// Returns the quadruples where it fails by more than `tol`.
pub fn summed_mixed_check<S: PartialMetric + ?Sized>(
    map: &CoupledMap,
    space: &S,
    spec: &ContractionSpec,
    quadruples: &[Quadruple],
    tol: f64,
) -> Result<Vec<ContractionViolation>> {
    spec.validate()?;
    if spec.mode != Mode::MixedArg {
        return Err(Error::InvalidSpec(format!("summed check applies to MIXED_ARG, got {}", spec.mode)));
    }
    let mut out = Vec::new();
    for q in quadruples {
        let [x, y, u, v] = *q;
        let lhs = space.eval_p(map.apply(x, y)?, map.apply(u, v)?)? + space.eval_p(map.apply(y, x)?, map.apply(v, u)?)?;
        let rhs = (spec.k + spec.l) * (space.eval_p(x, u)? + space.eval_p(y, v)?);
        if lhs > rhs + tol {
            out.push(ContractionViolation { quadruple: *q, lhs, rhs });
        }
    }
    Ok(out)
}
