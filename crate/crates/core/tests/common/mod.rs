#![allow(dead_code)]

use coupled_pm::{CoupledMap, IterationTrace, PartialMetric, Point};

pub const SLACK: f64 = 1e-9;

pub fn r(v: f64) -> Point {
    Point::Real(v)
}

pub fn real(p: Point) -> f64 {
    p.as_real().expect("real point")
}

/// Iterates of the trace followed by the iterate after the last recorded
/// step, recomputed from the map.
pub fn iterates(map: &CoupledMap, trace: &IterationTrace) -> Vec<(Point, Point)> {
    let mut out: Vec<(Point, Point)> = trace.steps.iter().map(|s| (s.x_n, s.y_n)).collect();
    if let Some(last) = trace.steps.last() {
        out.push((map.apply(last.x_n, last.y_n).unwrap(), map.apply(last.y_n, last.x_n).unwrap()));
    }
    out
}

/// Re-evaluates the scheme and both residuals at every step; returns the
/// first mismatch.
pub fn audit_scheme<S: PartialMetric>(map: &CoupledMap, space: &S, trace: &IterationTrace) -> Result<(), String> {
    let it = iterates(map, trace);
    for (i, s) in trace.steps.iter().enumerate() {
        if s.n != i {
            return Err(format!("step {i} labelled {}", s.n));
        }
        let (xn, yn) = it[i];
        let (xa, ya) = it[i + 1];
        if map.apply(xn, yn).unwrap() != xa || map.apply(yn, xn).unwrap() != ya {
            return Err(format!("scheme broken at step {i}"));
        }
        let d = space.eval_p(xn, xa).unwrap() + space.eval_p(yn, ya).unwrap();
        if d.to_bits() != s.d_n.to_bits() {
            return Err(format!("d_{i} recorded {} recomputed {d}", s.d_n));
        }
        let ps = space.induced_metric(xn, xa).unwrap() + space.induced_metric(yn, ya).unwrap();
        if ps.to_bits() != s.ps_step.to_bits() {
            return Err(format!("ps_{i} recorded {} recomputed {ps}", s.ps_step));
        }
    }
    Ok(())
}

/// `d_n <= delta^n d0 + SLACK` for every recorded n.
pub fn audit_decay(trace: &IterationTrace, delta: f64) -> Result<(), String> {
    let d0 = trace.steps[0].d_n;
    for s in &trace.steps {
        let bound = delta.powi(s.n as i32) * d0 + SLACK;
        if s.d_n > bound {
            return Err(format!("d_{} = {} > {}", s.n, s.d_n, bound));
        }
    }
    Ok(())
}

/// `p(x_n, x_m) + p(y_n, y_m) <= delta^m d0 / (1 - delta) + SLACK` for all
/// recorded `m <= n`.
pub fn audit_tail<S: PartialMetric>(space: &S, trace: &IterationTrace, delta: f64) -> Result<(), String> {
    let d0 = trace.steps[0].d_n;
    let pts: Vec<_> = trace.steps.iter().map(|s| (s.x_n, s.y_n)).collect();
    for m in 0..pts.len() {
        let bound = delta.powi(m as i32) * d0 / (1.0 - delta) + SLACK;
        for n in m..pts.len() {
            let lhs = space.eval_p(pts[n].0, pts[m].0).unwrap() + space.eval_p(pts[n].1, pts[m].1).unwrap();
            if lhs > bound {
                return Err(format!("tail (n={n}, m={m}): {lhs} > {bound}"));
            }
        }
    }
    Ok(())
}

/// `p(x_n, x_{n+1}) <= delta^n p(x_0, x_1) + SLACK`, and the same for `y`.
pub fn audit_per_sequence<S: PartialMetric>(
    map: &CoupledMap,
    space: &S,
    trace: &IterationTrace,
    delta: f64,
) -> Result<(), String> {
    let it = iterates(map, trace);
    let px0 = space.eval_p(it[0].0, it[1].0).unwrap();
    let py0 = space.eval_p(it[0].1, it[1].1).unwrap();
    for n in 0..it.len() - 1 {
        let g = delta.powi(n as i32);
        let px = space.eval_p(it[n].0, it[n + 1].0).unwrap();
        let py = space.eval_p(it[n].1, it[n + 1].1).unwrap();
        if px > g * px0 + SLACK || py > g * py0 + SLACK {
            return Err(format!("per-sequence decay broken at n={n}: {px}, {py}"));
        }
    }
    Ok(())
}

/// Evaluates an expression string directly while scanning it, without
/// building a tree. Same grammar as the library parser.
pub struct DirectEval<'a> {
    s: &'a [u8],
    i: usize,
    x: f64,
    y: f64,
}

impl<'a> DirectEval<'a> {
    pub fn run(text: &'a str, x: f64, y: f64) -> Option<f64> {
        let mut d = DirectEval { s: text.as_bytes(), i: 0, x, y };
        let v = d.expr()?;
        d.ws();
        if d.i != d.s.len() || !v.is_finite() {
            return None;
        }
        Some(v)
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> Option<()> {
        if self.peek()? == c {
            self.i += 1;
            Some(())
        } else {
            None
        }
    }

    fn expr(&mut self) -> Option<f64> {
        let mut v = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    v += self.term()?;
                }
                Some(b'-') => {
                    self.i += 1;
                    v -= self.term()?;
                }
                _ => return Some(v),
            }
        }
    }

    fn term(&mut self) -> Option<f64> {
        let mut v = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    v *= self.unary()?;
                }
                Some(b'/') => {
                    self.i += 1;
                    let d = self.unary()?;
                    if d == 0.0 {
                        return None;
                    }
                    v /= d;
                }
                _ => return Some(v),
            }
        }
    }

    fn unary(&mut self) -> Option<f64> {
        if self.peek()? == b'-' {
            self.i += 1;
            return Some(-self.unary()?);
        }
        self.primary()
    }

    fn primary(&mut self) -> Option<f64> {
        let c = self.peek()?;
        if c == b'(' {
            self.i += 1;
            let v = self.expr()?;
            self.eat(b')')?;
            return Some(v);
        }
        if c.is_ascii_digit() || c == b'.' {
            let start = self.i;
            while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
                self.i += 1;
            }
            return std::str::from_utf8(&self.s[start..self.i]).ok()?.parse().ok();
        }
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_alphabetic() {
            self.i += 1;
        }
        match &self.s[start..self.i] {
            b"x" => Some(self.x),
            b"y" => Some(self.y),
            name @ (b"max" | b"min") => {
                let is_max = name == b"max";
                self.eat(b'(')?;
                let a = self.expr()?;
                self.eat(b',')?;
                let b = self.expr()?;
                self.eat(b')')?;
                Some(if is_max { a.max(b) } else { a.min(b) })
            }
            _ => None,
        }
    }
}
