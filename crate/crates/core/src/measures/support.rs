//! Distance from a point of the manifold to the support of a measure.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use super::{moment_point, nearest::NearestGrid, Preset, ThinMeasure};
use crate::spectrum::{Manifold, Point};
use crate::sphere;
use crate::torus;
use crate::{Error, Result};

/// Largest point cloud built for curves without a distance formula.
pub const MAX_CLOUD: usize = 1 << 20;

#[derive(Debug, Clone)]
enum Kind {
    Subtorus { k: usize, offset: [f64; 3] },
    Segment { start: [f64; 3], end: [f64; 3] },
    Circle { theta: f64 },
    SpherePoints(Vec<[f64; 3]>),
    TorusPoints(NearestGrid),
    Moment { grid: NearestGrid, step: f64 },
}

/// Exact distance to the support, evaluated analytically for flat pieces
/// and circles and through a nearest-neighbour grid for point sets. The
/// moment curve is sampled on a parameter grid and each query is refined by
/// a local one-dimensional minimization.
#[derive(Debug, Clone)]
pub struct SupportDistance {
    d: usize,
    radius: f64,
    kind: Kind,
}

impl SupportDistance {
    /// Distances above `radius` may be reported as `+∞`.
    pub fn new(measure: &ThinMeasure, radius: f64) -> Result<Self> {
        if measure.is_empty() {
            return Err(Error::EmptySupport);
        }
        if !(radius > 0.0) {
            return Err(Error::Domain {
                name: "radius",
                value: radius,
            });
        }
        let d = measure.manifold().dim();
        let kind = match (measure.preset(), measure.manifold()) {
            (Preset::Subtorus { k, offset }, _) => Kind::Subtorus { k: *k, offset: *offset },
            (Preset::Segment { start, end }, _) => Kind::Segment {
                start: *start,
                end: *end,
            },
            (Preset::Equator | Preset::Latitude { .. }, _) => Kind::Circle {
                theta: measure.circle_colatitude(),
            },
            (Preset::MomentCurve, _) => {
                let speed = (1..=d).map(|i| (i * i) as f64).sum::<f64>().sqrt();
                let spacing = (radius / 4.0).min(0.05);
                let n = (speed / spacing).ceil() as usize + 1;
                if n > MAX_CLOUD {
                    return Err(Error::Resolution {
                        what: "support cloud points",
                        required: n,
                        available: MAX_CLOUD,
                    });
                }
                let step = 1.0 / (n - 1) as f64;
                let pts = (0..n).map(|i| moment_point(d, i as f64 * step)).collect();
                Kind::Moment {
                    grid: NearestGrid::new(d, pts, radius.max(spacing)),
                    step,
                }
            }
            (_, Manifold::Torus(_)) => {
                let pts = measure
                    .atoms()
                    .unwrap_or_default()
                    .iter()
                    .filter_map(|a| match a.point {
                        Point::Torus(c) => Some(c),
                        _ => None,
                    })
                    .collect();
                Kind::TorusPoints(NearestGrid::new(d, pts, radius))
            }
            (_, Manifold::Sphere) => Kind::SpherePoints(
                measure
                    .atoms()
                    .unwrap_or_default()
                    .iter()
                    .map(|a| a.point.unit_vector())
                    .collect(),
            ),
        };
        Ok(SupportDistance { d, radius, kind })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn distance(&self, x: &Point) -> f64 {
        match (&self.kind, x) {
            (Kind::Subtorus { k, offset }, Point::Torus(c)) => (*k..self.d)
                .map(|i| torus::wrap(c[i] - offset[i]).powi(2))
                .sum::<f64>()
                .sqrt(),
            (Kind::Segment { start, end }, Point::Torus(c)) => segment_distance(self.d, c, start, end),
            (Kind::Circle { theta }, Point::Sphere { theta: t, .. }) => (t - theta).abs(),
            (Kind::SpherePoints(pts), Point::Sphere { .. }) => {
                let u = x.unit_vector();
                pts.iter()
                    .map(|p| sphere::chord_to_angle(sphere::chord(&u, p)))
                    .fold(f64::INFINITY, f64::min)
            }
            (Kind::TorusPoints(grid), Point::Torus(c)) => {
                grid.nearest(c, self.radius).map_or(f64::INFINITY, |(_, v)| v)
            }
            (Kind::Moment { grid, step }, Point::Torus(c)) => match grid.nearest(c, self.radius + step * 4.0) {
                None => f64::INFINITY,
                Some((i, v)) => {
                    let t0 = i as f64 * step;
                    let f = |t: f64| torus::distance(self.d, c, &moment_point(self.d, t));
                    let (lo, hi) = ((t0 - step).max(0.0), (t0 + step).min(1.0));
                    v.min(golden_min(f, lo, hi))
                }
            },
            _ => f64::NAN,
        }
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    f1.min(f2).min(f(a)).min(f(b))
}

/// Distance from `x` to the projection of a straight segment of the cover.
fn segment_distance(d: usize, x: &[f64; 3], start: &[f64; 3], end: &[f64; 3]) -> f64 {
    let mut ranges = [(0i64, 0i64); 3];
    for c in 0..d {
        let y = x[c] - start[c];
        let lo = (end[c] - start[c]).min(0.0) - TAU / 2.0;
        let hi = (end[c] - start[c]).max(0.0) + TAU / 2.0;
        ranges[c] = (((lo - y) / TAU).floor() as i64, ((hi - y) / TAU).ceil() as i64);
    }
    let dir: Vec<f64> = (0..d).map(|c| end[c] - start[c]).collect();
    let len2: f64 = dir.iter().map(|v| v * v).sum();
    let mut best = f64::INFINITY;
    let mut k = [ranges[0].0, ranges[1].0, ranges[2].0];
    loop {
        let y: Vec<f64> = (0..d).map(|c| x[c] - start[c] + TAU * k[c] as f64).collect();
        let t = (y.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>() / len2).clamp(0.0, 1.0);
        let dist2: f64 = y.iter().zip(&dir).map(|(a, b)| (a - t * b).powi(2)).sum();
        best = best.min(dist2);
        let mut c = d;
        loop {
            if c == 0 {
                return best.sqrt();
            }
            c -= 1;
            k[c] += 1;
            if k[c] <= ranges[c].1 {
                break;
            }
            k[c] = ranges[c].0;
        }
    }
}
