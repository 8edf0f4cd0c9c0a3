//! Monte Carlo volumes of δ-neighbourhoods `E^δ` and the fitted exponent
//! in `|E^δ| ≈ C δ^{d-k}`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use super::{SupportDistance, ThinMeasure};
use crate::exec::Executor;
use crate::numeric::fit_line;
use crate::rng::Stream;
use crate::spectrum::{Manifold, Point};
use crate::{Error, Result};

pub const MIN_SAMPLES: usize = 10_000;
const CHUNK: usize = 4096;
/// Two-sided 95% normal quantile.
const Z95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeEstimate {
    pub deltas: Vec<f64>,
    pub counts: Vec<u64>,
    pub n_samples: usize,
    pub total_volume: f64,
    pub volumes: Vec<f64>,
    /// Half-widths of the 95% binomial intervals on `volumes`.
    pub half_widths: Vec<f64>,
    /// Fitted `d - k` (log-log least squares over radii with hits).
    pub exponent: f64,
    pub exponent_half_width: f64,
    /// Fitted `C` in `C δ^{d-k}`.
    pub constant: f64,
}

impl VolumeEstimate {
    /// Fitted dimension `k = d - exponent` for an ambient dimension `d`.
    pub fn dimension(&self, d: usize) -> f64 {
        d as f64 - self.exponent
    }

    pub fn fitted(&self, delta: f64) -> f64 {
        self.constant * delta.powf(self.exponent)
    }

    /// `|E^δ|`, interpolated log-log between sampled radii and extrapolated
    /// by the fit outside them.
    pub fn volume_at(&self, delta: f64) -> f64 {
        let pairs: Vec<(f64, f64)> = self
            .deltas
            .iter()
            .zip(&self.volumes)
            .filter(|(_, v)| **v > 0.0)
            .map(|(d, v)| (*d, *v))
            .collect();
        if let Some(i) = pairs.iter().position(|(d, _)| *d >= delta) {
            let (d1, v1) = pairs[i];
            if d1 == delta {
                return v1;
            }
            if i > 0 {
                let (d0, v0) = pairs[i - 1];
                let s = (delta.ln() - d0.ln()) / (d1.ln() - d0.ln());
                return (v0.ln() + s * (v1.ln() - v0.ln())).exp();
            }
        }
        self.fitted(delta).min(self.total_volume)
    }
}

fn uniform_point(manifold: &Manifold, rng: &mut Stream) -> Point {
    match manifold {
        Manifold::Torus(t) => {
            let mut c = [0.0; 3];
            for slot in c.iter_mut().take(t.dim()) {
                *slot = TAU * rng.uniform();
            }
            Point::Torus(c)
        }
        Manifold::Sphere => {
            let z = 2.0 * rng.uniform() - 1.0;
            Point::Sphere {
                theta: z.clamp(-1.0, 1.0).acos(),
                phi: TAU * rng.uniform(),
            }
        }
    }
}

/// Estimates `|E^δ|` for each radius from `n_samples` uniform points.
/// Chunk `c` draws from stream `c` of `seed`, so the counts do not depend
/// on the executor.
pub fn minkowski_volume<E: Executor>(
    measure: &ThinMeasure,
    deltas: &[f64],
    n_samples: usize,
    seed: u64,
    exec: &E,
) -> Result<VolumeEstimate> {
    if measure.is_empty() {
        return Err(Error::EmptySupport);
    }
    if n_samples < MIN_SAMPLES {
        return Err(Error::Resolution {
            what: "Monte Carlo samples",
            required: MIN_SAMPLES,
            available: n_samples,
        });
    }
    if deltas.len() < 2 {
        return Err(Error::arg("delta_grid", "need at least two radii"));
    }
    let manifold = measure.manifold();
    let mut deltas: Vec<f64> = deltas.to_vec();
    for d in &deltas {
        if !(*d > 0.0 && *d < manifold.injectivity_radius()) {
            return Err(Error::Domain {
                name: "delta",
                value: *d,
            });
        }
    }
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    let dmax = *deltas.last().unwrap_or(&1.0);
    let dist = SupportDistance::new(measure, dmax)?;
    let n_chunks = n_samples.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<u64>> = exec.map(n_chunks, |c| {
        let mut rng = Stream::new(seed, c as u64);
        let size = CHUNK.min(n_samples - c * CHUNK);
        let mut counts = alloc::vec![0u64; deltas.len()];
        for _ in 0..size {
            let x = uniform_point(&manifold, &mut rng);
            let r = dist.distance(&x);
            let first = deltas.partition_point(|d| *d < r);
            for slot in &mut counts[first..] {
                *slot += 1;
            }
        }
        counts
    });
    let mut counts = alloc::vec![0u64; deltas.len()];
    for chunk in &per_chunk {
        for (a, b) in counts.iter_mut().zip(chunk) {
            *a += b;
        }
    }
    let total_volume = manifold.volume();
    let n = n_samples as f64;
    let volumes: Vec<f64> = counts.iter().map(|c| total_volume * *c as f64 / n).collect();
    let half_widths: Vec<f64> = counts
        .iter()
        .map(|c| {
            let p = *c as f64 / n;
            total_volume * Z95 * (p * (1.0 - p) / n).sqrt()
        })
        .collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut vars = Vec::new();
    for ((d, v), c) in deltas.iter().zip(&volumes).zip(&counts) {
        if *c > 0 {
            let p = *c as f64 / n;
            xs.push(d.ln());
            ys.push(v.ln());
            vars.push((1.0 - p) / (n * p));
        }
    }
    let fit = fit_line(&xs, &ys).ok_or(Error::Resolution {
        what: "radii with Monte Carlo hits",
        required: 2,
        available: xs.len(),
    })?;
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    let slope_var: f64 = xs.iter().zip(&vars).map(|(x, v)| (x - mean).powi(2) * v).sum::<f64>() / (sxx * sxx);
    Ok(VolumeEstimate {
        deltas,
        counts,
        n_samples,
        total_volume,
        volumes,
        half_widths,
        exponent: fit.slope,
        exponent_half_width: Z95 * slope_var.sqrt(),
        constant: fit.intercept.exp(),
    })
}
