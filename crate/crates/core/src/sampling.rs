//! Deterministic point and quadruple samples for the empirical checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::space::{Carrier, PartialMetricSpace, Point};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLE_POINTS: usize = 64;
pub const DEFAULT_QUADRUPLES: usize = 256;

/// Upper end of the range random real points are drawn from.
const REAL_SPAN: f64 = 10.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The fixed grid `{0, 0.5, .., 5}`, mirrored to negative values for the
/// metric lift, or every index of a tabulated carrier.
pub fn default_grid(space: &PartialMetricSpace) -> Vec<Point> {
    let halfline = (0..=10).map(|i| Point::Real(f64::from(i) * 0.5));
    match space.carrier() {
        Carrier::MaxHalfline => halfline.collect(),
        Carrier::MetricLift(_) => (-10..=10).map(|i| Point::Real(f64::from(i) * 0.5)).collect(),
        Carrier::Tabulated(t) => t.points(),
    }
}

/// `count` seeded pseudo-random points of the carrier.
pub fn random_points(space: &PartialMetricSpace, seed: u64, count: usize) -> Vec<Point> {
    let mut rng = rng(seed);
    (0..count).map(|_| random_point(space, &mut rng)).collect()
}

fn random_point(space: &PartialMetricSpace, rng: &mut impl Rng) -> Point {
    match space.carrier() {
        Carrier::MaxHalfline => Point::Real(rng.gen_range(0.0..REAL_SPAN)),
        Carrier::MetricLift(_) => Point::Real(rng.gen_range(-REAL_SPAN..REAL_SPAN)),
        Carrier::Tabulated(t) => Point::Index(rng.gen_range(0..t.size())),
    }
}

/// Default axiom-check sample: the grid, followed by `count` random points
/// for continuous carriers. Tabulated carriers are sampled exhaustively.
pub fn default_sample(space: &PartialMetricSpace, seed: u64, count: usize) -> Vec<Point> {
    let mut pts = default_grid(space);
    if !matches!(space.carrier(), Carrier::Tabulated(_)) {
        pts.extend(random_points(space, seed, count));
    }
    pts
}

pub type Quadruple = [Point; 4];

/// Default quadruples for contraction checks: every ordered quadruple of a
/// tabulated carrier, or `count` seeded random quadruples otherwise.
pub fn default_quadruples(space: &PartialMetricSpace, seed: u64, count: usize) -> Vec<Quadruple> {
    match space.carrier() {
        Carrier::Tabulated(t) => {
            let pts = t.points();
            let mut out = Vec::with_capacity(pts.len().pow(4));
            for &x in &pts {
                for &y in &pts {
                    for &u in &pts {
                        for &v in &pts {
                            out.push([x, y, u, v]);
                        }
                    }
                }
            }
            out
        }
        _ => {
            let mut rng = rng(seed);
            (0..count)
                .map(|_| {
                    [
                        random_point(space, &mut rng),
                        random_point(space, &mut rng),
                        random_point(space, &mut rng),
                        random_point(space, &mut rng),
                    ]
                })
                .collect()
        }
    }
}
