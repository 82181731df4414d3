//! Problem configuration files.
//!
//! A config is a flat list of `key = value` lines with dotted keys. Blank
//! lines and lines starting with `#` are ignored; values may be wrapped in
//! double quotes. Recognised keys:
//!
//! ```text
//! space.kind      = max_halfline | metric_lift | tabulated
//! space.base      = abs_diff | discrete          (metric_lift, default abs_diff)
//! space.matrix    = PATH                         (tabulated)
//! map.expr        = "(x + y) / 6"
//! map.builtin     = scaled_sum | linear | constant
//! map.divisor     = 6                            (scaled_sum)
//! map.a, map.b, map.c                            (linear: a*x + b*y + c; constant: c)
//! map.table       = PATH                         (index map on a tabulated carrier)
//! start           = 1, 2
//! starts          = 1, 2; 5, 0; 10, 10
//! spec.mode       = MIXED_ARG | SELF_DISPLACEMENT | CROSS_DISPLACEMENT
//! spec.k, spec.l
//! tol, max_iters, divergence_cap, seed, axiom_tol, sample.points, verify.quadruples
//! ```
//!
//! Constants in `spec.k` / `spec.l` are taken in the orientation written in
//! the inequality for the chosen mode: `k` multiplies the term built from the
//! first pair `(x, y)` (or `F(x, y)`), `l` the term built from `(u, v)`.
//!
//! Relative paths are resolved against the directory of the config file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::contraction::{ContractionSpec, Mode};
use crate::error::{Error, Result};
use crate::expr::parse_expr;
use crate::map::CoupledMap;
use crate::sampling::{DEFAULT_QUADRUPLES, DEFAULT_SAMPLE_POINTS, DEFAULT_SEED};
use crate::solver::SolveConfig;
use crate::space::{make_space, BaseMetric, Carrier, PartialMetricSpace, Point, Table, AXIOM_TOL};

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceConfig {
    MaxHalfline,
    MetricLift(BaseMetric),
    Tabulated(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapConfig {
    Expr(String),
    ScaledSum { divisor: f64 },
    Linear { a: f64, b: f64, c: f64 },
    Constant { c: f64 },
    Table(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub space: Option<SpaceConfig>,
    pub map: Option<MapConfig>,
    pub start: Option<(f64, f64)>,
    pub starts: Vec<(f64, f64)>,
    pub spec: Option<ContractionSpec>,
    pub tol: f64,
    pub max_iters: usize,
    pub divergence_cap: f64,
    pub seed: u64,
    pub axiom_tol: f64,
    pub sample_points: usize,
    pub quadruples: usize,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        let solve = SolveConfig::default();
        ProblemConfig {
            space: None,
            map: None,
            start: None,
            starts: Vec::new(),
            spec: None,
            tol: solve.tol,
            max_iters: solve.max_iters,
            divergence_cap: solve.divergence_cap,
            seed: DEFAULT_SEED,
            axiom_tol: AXIOM_TOL,
            sample_points: DEFAULT_SAMPLE_POINTS,
            quadruples: DEFAULT_QUADRUPLES,
        }
    }
}

fn cfg_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

struct Entries {
    map: BTreeMap<String, String>,
    base: PathBuf,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn num<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.take(key)
            .map(|v| v.parse::<T>().map_err(|e| cfg_err(key, format!("`{v}`: {e}"))))
            .transpose()
    }

    fn path(&mut self, key: &str) -> Option<PathBuf> {
        self.take(key).map(|v| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                self.base.join(p)
            }
        })
    }
}

fn parse_pair(key: &str, text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(cfg_err(key, format!("expected `a, b`, got `{text}`")));
    }
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s.parse().map_err(|e| cfg_err(key, format!("`{s}`: {e}")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(cfg_err(key, format!("`{s}` is not finite")))
        }
    };
    Ok((num(parts[0])?, num(parts[1])?))
}

impl ProblemConfig {
    /// Parses config text; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| cfg_err(&format!("line {}", lineno + 1), "expected `key = value`"))?;
            let key = key.trim().to_string();
            let mut value = value.trim();
            if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
                value = &value[1..value.len() - 1];
            }
            if map.insert(key.clone(), value.to_string()).is_some() {
                return Err(cfg_err(&key, "duplicate key"));
            }
        }
        let mut e = Entries {
            map,
            base: base_dir.to_path_buf(),
        };
        let mut cfg = ProblemConfig::default();

        cfg.space = match e.take("space.kind").as_deref() {
            None => None,
            Some("max_halfline") | Some("max") => Some(SpaceConfig::MaxHalfline),
            Some("metric_lift") => {
                let base = match e.take("space.base") {
                    None => BaseMetric::AbsDiff,
                    Some(name) => BaseMetric::from_name(&name)
                        .ok_or_else(|| cfg_err("space.base", format!("unknown base metric `{name}`")))?,
                };
                Some(SpaceConfig::MetricLift(base))
            }
            Some("tabulated") => Some(SpaceConfig::Tabulated(
                e.path("space.matrix")
                    .ok_or_else(|| cfg_err("space.matrix", "required for tabulated spaces"))?,
            )),
            Some(other) => return Err(cfg_err("space.kind", format!("unknown kind `{other}`"))),
        };

        let expr = e.take("map.expr");
        let builtin = e.take("map.builtin");
        let table = e.path("map.table");
        cfg.map = match (expr, builtin, table) {
            (None, None, None) => None,
            (Some(text), None, None) => {
                parse_expr(&text).map_err(|err| cfg_err("map.expr", err.to_string()))?;
                Some(MapConfig::Expr(text))
            }
            (None, Some(name), None) => Some(match name.as_str() {
                "scaled_sum" => MapConfig::ScaledSum {
                    divisor: e.num("map.divisor")?.ok_or_else(|| cfg_err("map.divisor", "required for scaled_sum"))?,
                },
                "linear" => MapConfig::Linear {
                    a: e.num("map.a")?.unwrap_or(0.0),
                    b: e.num("map.b")?.unwrap_or(0.0),
                    c: e.num("map.c")?.unwrap_or(0.0),
                },
                "constant" => MapConfig::Constant {
                    c: e.num("map.c")?.ok_or_else(|| cfg_err("map.c", "required for constant"))?,
                },
                other => return Err(cfg_err("map.builtin", format!("unknown family `{other}`"))),
            }),
            (None, None, Some(path)) => Some(MapConfig::Table(path)),
            _ => return Err(cfg_err("map", "give exactly one of map.expr, map.builtin, map.table")),
        };

        cfg.start = e.take("start").map(|v| parse_pair("start", &v)).transpose()?;
        if let Some(v) = e.take("starts") {
            cfg.starts = v
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse_pair("starts", s))
                .collect::<Result<_>>()?;
        }

        let mode = e.take("spec.mode");
        let k: Option<f64> = e.num("spec.k")?;
        let l: Option<f64> = e.num("spec.l")?;
        cfg.spec = match (mode, k, l) {
            (None, None, None) => None,
            (Some(m), Some(k), Some(l)) => {
                let mode: Mode = m.parse().map_err(|err: Error| cfg_err("spec.mode", err.to_string()))?;
                let spec = ContractionSpec::new(mode, k, l);
                spec.validate().map_err(|err| cfg_err("spec", err.to_string()))?;
                Some(spec)
            }
            _ => return Err(cfg_err("spec", "spec.mode, spec.k and spec.l go together")),
        };

        if let Some(v) = e.num("tol")? {
            cfg.tol = v;
        }
        if let Some(v) = e.num("max_iters")? {
            cfg.max_iters = v;
        }
        if let Some(v) = e.num("divergence_cap")? {
            cfg.divergence_cap = v;
        }
        if let Some(v) = e.num("seed")? {
            cfg.seed = v;
        }
        if let Some(v) = e.num("axiom_tol")? {
            cfg.axiom_tol = v;
        }
        if let Some(v) = e.num("sample.points")? {
            cfg.sample_points = v;
        }
        if let Some(v) = e.num("verify.quadruples")? {
            cfg.quadruples = v;
        }
        if let Some(key) = e.map.keys().next() {
            return Err(cfg_err(key, "unknown key"));
        }
        cfg.check_numerics()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|err| cfg_err("--config", format!("{}: {err}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        ProblemConfig::parse(&text, base)
    }

    pub fn check_numerics(&self) -> Result<()> {
        for (key, v) in [("tol", self.tol), ("axiom_tol", self.axiom_tol), ("divergence_cap", self.divergence_cap)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(cfg_err(key, format!("must be finite and positive, got {v}")));
            }
        }
        if self.max_iters == 0 {
            return Err(cfg_err("max_iters", "must be at least 1"));
        }
        Ok(())
    }

    /// Canonical text with every default filled in. Parsing the output gives
    /// back an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match &self.space {
            None => {}
            Some(SpaceConfig::MaxHalfline) => s.push_str("space.kind = max_halfline\n"),
            Some(SpaceConfig::MetricLift(base)) => {
                let _ = writeln!(s, "space.kind = metric_lift\nspace.base = {}", base.name());
            }
            Some(SpaceConfig::Tabulated(p)) => {
                let _ = writeln!(s, "space.kind = tabulated\nspace.matrix = {}", p.display());
            }
        }
        match &self.map {
            None => {}
            Some(MapConfig::Expr(t)) => {
                let _ = writeln!(s, "map.expr = \"{t}\"");
            }
            Some(MapConfig::ScaledSum { divisor }) => {
                let _ = writeln!(s, "map.builtin = scaled_sum\nmap.divisor = {divisor}");
            }
            Some(MapConfig::Linear { a, b, c }) => {
                let _ = writeln!(s, "map.builtin = linear\nmap.a = {a}\nmap.b = {b}\nmap.c = {c}");
            }
            Some(MapConfig::Constant { c }) => {
                let _ = writeln!(s, "map.builtin = constant\nmap.c = {c}");
            }
            Some(MapConfig::Table(p)) => {
                let _ = writeln!(s, "map.table = {}", p.display());
            }
        }
        if let Some((a, b)) = self.start {
            let _ = writeln!(s, "start = {a}, {b}");
        }
        if !self.starts.is_empty() {
            let list: Vec<String> = self.starts.iter().map(|(a, b)| format!("{a}, {b}")).collect();
            let _ = writeln!(s, "starts = {}", list.join("; "));
        }
        if let Some(spec) = &self.spec {
            let _ = writeln!(s, "spec.mode = {}\nspec.k = {}\nspec.l = {}", spec.mode, spec.k, spec.l);
        }
        let _ = writeln!(
            s,
            "tol = {}\nmax_iters = {}\ndivergence_cap = {}\nseed = {}\naxiom_tol = {}\nsample.points = {}\nverify.quadruples = {}",
            self.tol, self.max_iters, self.divergence_cap, self.seed, self.axiom_tol, self.sample_points, self.quadruples
        );
        s
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            tol: self.tol,
            max_iters: self.max_iters,
            divergence_cap: self.divergence_cap,
        }
    }

    /// The configured carrier as an unvalidated descriptor. Tabulated
    /// matrices are read from disk.
    pub fn carrier(&self) -> Result<Carrier> {
        match self.space.as_ref().ok_or_else(|| cfg_err("space.kind", "missing space section"))? {
            SpaceConfig::MaxHalfline => Ok(Carrier::MaxHalfline),
            SpaceConfig::MetricLift(b) => Ok(Carrier::MetricLift(*b)),
            SpaceConfig::Tabulated(path) => Table::read(path)
                .map(Carrier::Tabulated)
                .map_err(|err| cfg_err("space.matrix", err.to_string())),
        }
    }

    /// Builds and validates the space. Axiom failures are passed through
    /// unchanged so callers can tell them apart from config errors.
    pub fn build_space(&self) -> Result<PartialMetricSpace> {
        make_space(self.carrier()?)
    }

    pub fn build_map(&self) -> Result<CoupledMap> {
        match self.map.as_ref().ok_or_else(|| cfg_err("map", "missing map section"))? {
            MapConfig::Expr(t) => Ok(CoupledMap::from_expr(parse_expr(t).map_err(|err| cfg_err("map.expr", err.to_string()))?)),
            MapConfig::ScaledSum { divisor } => Ok(CoupledMap::scaled_sum(*divisor)),
            MapConfig::Linear { a, b, c } => Ok(CoupledMap::linear(*a, *b, *c)),
            MapConfig::Constant { c } => Ok(CoupledMap::constant(*c)),
            MapConfig::Table(path) => {
                let text = std::fs::read_to_string(path).map_err(|err| cfg_err("map.table", err.to_string()))?;
                CoupledMap::parse_table(&text).map_err(|err| cfg_err("map.table", err.to_string()))
            }
        }
    }

    /// Converts a configured coordinate pair into points of `space`'s
    /// carrier kind.
    pub fn to_points(&self, key: &str, pair: (f64, f64)) -> Result<(Point, Point)> {
        let conv = |v: f64| -> Result<Point> {
            match &self.space {
                Some(SpaceConfig::Tabulated(_)) => {
                    if v >= 0.0 && v.fract() == 0.0 && v < usize::MAX as f64 {
                        Ok(Point::Index(v as usize))
                    } else {
                        Err(cfg_err(key, format!("{v} is not a point index")))
                    }
                }
                _ => Ok(Point::Real(v)),
            }
        };
        Ok((conv(pair.0)?, conv(pair.1)?))
    }

    pub fn start_points(&self) -> Result<(Point, Point)> {
        let pair = self
            .start
            .or_else(|| self.starts.first().copied())
            .ok_or_else(|| cfg_err("start", "missing start"))?;
        self.to_points("start", pair)
    }

    /// Probe starts: `starts`, or the single `start`.
    pub fn probe_points(&self) -> Result<Vec<(Point, Point)>> {
        if self.starts.is_empty() {
            return Ok(vec![self.start_points()?]);
        }
        self.starts.iter().map(|&p| self.to_points("starts", p)).collect()
    }
}
