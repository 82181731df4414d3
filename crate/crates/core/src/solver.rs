//! Coupled Picard iteration with convergence certificates.
//!
//! From a start `(x_0, y_0)` the solver iterates
//!
//! ```text
//! x_{n+1} = F(x_n, y_n),    y_{n+1} = F(y_n, x_n)
//! ```
//!
//! and records the residual `d_n = p(x_n, x_{n+1}) + p(y_n, y_{n+1})` together
//! with its induced-metric counterpart
//! `ps_step = p^s(x_n, x_{n+1}) + p^s(y_n, y_{n+1})`.
//!
//! There are two stopping rules, and they mean different things:
//!
//! * **Certified** (`CONVERGED`): a valid [`ContractionSpec`] was supplied and
//!   `d_n <= tol`. Under a contraction the limit has zero self-distance, so
//!   `d_n` itself goes to zero and `p(x_n, x_n) <= d_n` bounds the terminal
//!   self-distance.
//! * **Stationary** (`STATIONARY_NO_CERT`): `ps_step <= tol`. This detects
//!   coupled fixed points with positive self-distance, at which `d_n` stays
//!   bounded away from zero. No contraction claim is made. When a spec is
//!   supplied this rule only applies after some `d_n` has exceeded
//!   `delta^n d_0`, i.e. once the map has been caught violating the spec.
//!
//! Neither rule is a theorem about where to stop; both are heuristics built
//! on the residual.

use serde::{Deserialize, Serialize};

use crate::contraction::ContractionSpec;
use crate::error::{Error, Result};
use crate::map::CoupledMap;
use crate::space::{PartialMetric, Point};

/// Absolute slack used when auditing a trace against its geometric bounds.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub tol: f64,
    pub max_iters: usize,
    pub divergence_cap: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol: 1e-9,
            max_iters: 10_000,
            divergence_cap: 1e12,
        }
    }
}

impl SolveConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if self.divergence_cap.is_nan() || self.divergence_cap <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "divergence_cap must be positive, got {}",
                self.divergence_cap
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub n: usize,
    pub x_n: Point,
    pub y_n: Point,
    /// `p(x_n, x_{n+1}) + p(y_n, y_{n+1})`
    pub d_n: f64,
    /// `p^s(x_n, x_{n+1}) + p^s(y_n, y_{n+1})`
    pub ps_step: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Converged,
    StationaryNoCert,
    MaxIters,
    Diverging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCertificate {
    pub status: Status,
    /// The iterate `(x_n, y_n)` at which the run stopped, for `CONVERGED` and
    /// `STATIONARY_NO_CERT`.
    pub fixed_point: Option<(Point, Point)>,
    /// Index `n` of the stopping step, or the number of steps taken when the
    /// run ran out of iterations or diverged.
    pub iterations: usize,
    pub final_residual: f64,
    pub spec: Option<ContractionSpec>,
    pub delta: Option<f64>,
    pub a_priori_bound_iters: Option<u64>,
    pub d0: f64,
    /// Anomalies observed during the run, e.g. a residual above the
    /// geometric bound implied by the supplied spec.
    pub notes: Vec<String>,
}

/// One Picard step: `(F(x, y), F(y, x))`, both checked to lie in the carrier.
pub fn step<S: PartialMetric + ?Sized>(map: &CoupledMap, space: &S, x: Point, y: Point) -> Result<(Point, Point)> {
    space.check_point(x)?;
    space.check_point(y)?;
    let image = |a: Point, b: Point| -> Result<Point> {
        let img = map.apply(a, b)?;
        if space.contains(img) {
            Ok(img)
        } else {
            Err(Error::DomainEscape { x: a, y: b, image: img })
        }
    };
    Ok((image(x, y)?, image(y, x)?))
}

/// `p(x_n, x_next) + p(y_n, y_next)`
pub fn residual<S: PartialMetric + ?Sized>(space: &S, x_n: Point, x_next: Point, y_n: Point, y_next: Point) -> Result<f64> {
    Ok(space.eval_p(x_n, x_next)? + space.eval_p(y_n, y_next)?)
}

fn ps_residual<S: PartialMetric + ?Sized>(space: &S, x_n: Point, x_next: Point, y_n: Point, y_next: Point) -> Result<f64> {
    Ok(space.induced_metric(x_n, x_next)? + space.induced_metric(y_n, y_next)?)
}

/// Tail bound `delta^m * d0 / (1 - delta)` on `p(x_n, x_m) + p(y_n, y_m)`,
/// `n >= m`.
pub fn tail_bound(d0: f64, delta: f64, m: usize) -> f64 {
    geometric(delta, m) * d0 / (1.0 - delta)
}

/// `delta^n`, with `0^0 = 1`.
pub fn geometric(delta: f64, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        delta.powf(n as f64)
    }
}

/// Smallest `m >= 0` with `delta^m * d0 / (1 - delta) <= tol`.
pub fn a_priori_iters(d0: f64, delta: f64, tol: f64) -> Result<u64> {
    if !(d0.is_finite() && d0 >= 0.0) {
        return Err(Error::InvalidArgument(format!("d0 must be finite and nonnegative, got {d0}")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!("delta must lie in [0, 1), got {delta}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let fits = |m: u64| tail_bound(d0, delta, m as usize) <= tol;
    if fits(0) {
        return Ok(0);
    }
    if delta == 0.0 {
        return Ok(1);
    }
    // Log estimate, then walk to the exact boundary of the monotone predicate.
    let est = ((tol * (1.0 - delta) / d0).ln() / delta.ln()).ceil();
    let mut m = if est.is_finite() && est > 0.0 { est as u64 } else { 1 };
    while !fits(m) {
        m += 1;
    }
    while m > 1 && fits(m - 1) {
        m -= 1;
    }
    Ok(m)
}

/// Runs the coupled Picard iteration from `(x0, y0)`.
pub fn solve<S: PartialMetric + ?Sized>(
    map: &CoupledMap,
    space: &S,
    x0: Point,
    y0: Point,
    spec: Option<&ContractionSpec>,
    config: &SolveConfig,
) -> Result<(ConvergenceCertificate, IterationTrace)> {
    config.validate()?;
    let delta = spec.map(|s| s.delta()).transpose()?;
    space.check_point(x0)?;
    space.check_point(y0)?;

    let mut cert = ConvergenceCertificate {
        status: Status::MaxIters,
        fixed_point: None,
        iterations: config.max_iters,
        final_residual: f64::NAN,
        spec: spec.copied(),
        delta,
        a_priori_bound_iters: None,
        d0: f64::NAN,
        notes: Vec::new(),
    };
    let mut trace = IterationTrace::default();
    let (mut x, mut y) = (x0, y0);
    let mut bound_broken = false;

    for n in 0..config.max_iters {
        let (x_next, y_next) = step(map, space, x, y)?;
        let d_n = residual(space, x, x_next, y, y_next)?;
        let ps_step = ps_residual(space, x, x_next, y, y_next)?;
        if !(d_n.is_finite() && ps_step.is_finite()) {
            return Err(Error::NonFiniteDistance { x, y: x_next });
        }
        trace.steps.push(TraceStep { n, x_n: x, y_n: y, d_n, ps_step });
        cert.final_residual = d_n;

        if n == 0 {
            cert.d0 = d_n;
            if let Some(delta) = delta {
                cert.a_priori_bound_iters = Some(a_priori_iters(d_n, delta, config.tol)?);
            }
        }
        if let Some(delta) = delta {
            let bound = geometric(delta, n) * cert.d0 + BOUND_SLACK;
            if !bound_broken && d_n > bound {
                bound_broken = true;
                cert.notes.push(format!(
                    "d_{n} = {d_n} exceeds the geometric bound {bound}: the map does not satisfy the supplied contraction"
                ));
            }
        }

        if d_n > config.divergence_cap || ps_step > config.divergence_cap {
            cert.status = Status::Diverging;
            cert.iterations = n;
            return Ok((cert, trace));
        }
        if spec.is_some() && d_n <= config.tol {
            cert.status = Status::Converged;
            cert.fixed_point = Some((x, y));
            cert.iterations = n;
            return Ok((cert, trace));
        }
        // With a spec, stationarity is only accepted once the geometric bound
        // has failed; until then the certified criterion can still be met.
        if ps_step <= config.tol && (spec.is_none() || bound_broken) {
            if spec.is_some() {
                cert.notes.push(format!(
                    "stationary at ({x}, {y}) with residual {d_n} > tol: positive self-distance, no contraction certificate"
                ));
            }
            cert.status = Status::StationaryNoCert;
            cert.fixed_point = Some((x, y));
            cert.iterations = n;
            return Ok((cert, trace));
        }
        x = x_next;
        y = y_next;
    }
    Ok((cert, trace))
}

/// `F(x, y) = x` and `F(y, x) = y`, tested through the induced metric so that
/// positive self-distances do not get in the way.
pub fn verify_coupled_fixed_point<S: PartialMetric + ?Sized>(
    map: &CoupledMap,
    space: &S,
    x: Point,
    y: Point,
    tol: f64,
) -> Result<bool> {
    space.check_point(x)?;
    space.check_point(y)?;
    let fx = map.apply(x, y)?;
    let fy = map.apply(y, x)?;
    Ok(space.induced_metric(fx, x)? <= tol && space.induced_metric(fy, y)? <= tol)
}

/// `p^s(x, x') + p^s(y, y')`
pub fn pair_distance<S: PartialMetric + ?Sized>(space: &S, a: (Point, Point), b: (Point, Point)) -> Result<f64> {
    Ok(space.induced_metric(a.0, b.0)? + space.induced_metric(a.1, b.1)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub runs: Vec<ConvergenceCertificate>,
    /// Cluster of each run's terminal point; `None` for runs without one.
    pub cluster_of: Vec<Option<usize>>,
    /// One representative per cluster, in order of first appearance.
    pub distinct_points: Vec<(Point, Point)>,
    /// [`pair_distance`] between representatives.
    pub pairwise_ps: Vec<Vec<f64>>,
    pub cluster_radius: f64,
}

/// Radius used to merge terminal points: `2 tol / (1 - delta)` with a rate,
/// `2 tol` without.
pub fn cluster_radius(tol: f64, delta: Option<f64>) -> f64 {
    match delta {
        Some(d) => 2.0 * tol / (1.0 - d),
        None => 2.0 * tol,
    }
}

/// Solves from every start and clusters the terminal points.
///
/// A terminal point joins the first existing cluster whose representative
/// lies within [`cluster_radius`] in [`pair_distance`].
pub fn probe_uniqueness<S: PartialMetric + Sync + ?Sized>(
    map: &CoupledMap,
    space: &S,
    starts: &[(Point, Point)],
    spec: Option<&ContractionSpec>,
    config: &SolveConfig,
) -> Result<ProbeReport> {
    if starts.is_empty() {
        return Err(Error::InvalidArgument("probe needs at least one start".into()));
    }
    let delta = spec.map(|s| s.delta()).transpose()?;
    let radius = cluster_radius(config.tol, delta);

    let results: Vec<Result<ConvergenceCertificate>> = std::thread::scope(|scope| {
        let handles: Vec<_> = starts
            .iter()
            .map(|&(x0, y0)| scope.spawn(move || solve(map, space, x0, y0, spec, config).map(|(c, _)| c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut distinct_points: Vec<(Point, Point)> = Vec::new();
    let mut cluster_of = Vec::with_capacity(runs.len());
    for run in &runs {
        let Some(fp) = run.fixed_point else {
            cluster_of.push(None);
            continue;
        };
        let mut found = None;
        for (i, rep) in distinct_points.iter().enumerate() {
            if pair_distance(space, *rep, fp)? <= radius {
                found = Some(i);
                break;
            }
        }
        let idx = found.unwrap_or_else(|| {
            distinct_points.push(fp);
            distinct_points.len() - 1
        });
        cluster_of.push(Some(idx));
    }
    let pairwise_ps = distinct_points
        .iter()
        .map(|&a| distinct_points.iter().map(|&b| pair_distance(space, a, b)).collect())
        .collect::<Result<Vec<Vec<f64>>>>()?;

    Ok(ProbeReport {
        runs,
        cluster_of,
        distinct_points,
        pairwise_ps,
        cluster_radius: radius,
    })
}
