//! Seeded random inputs for property harnesses and batch runs.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::measures::{Atom, MeasureSpec, Preset};
use crate::rng::Stream;
use crate::spectrum::{CoefficientSet, Manifold, Point, SpectrumTable};

/// Gaussian coefficients on `active` distinct random lines of `table`.
pub fn random_band_limited(table: &Arc<SpectrumTable>, active: usize, rng: &mut Stream) -> CoefficientSet {
    let n = table.len();
    let active = active.clamp(1, n);
    let mut chosen: Vec<usize> = Vec::with_capacity(active);
    while chosen.len() < active {
        let i = (rng.uniform() * n as f64) as usize % n;
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    let mut c = CoefficientSet::zeros(table.clone());
    for i in chosen {
        for z in c.line_mut(i) {
            *z = Complex64::new(rng.normal(), rng.normal());
        }
    }
    c
}

/// Keeps the `k` largest coefficients (by modulus) of `f`.
pub fn k_term_approximation(f: &CoefficientSet, k: usize) -> CoefficientSet {
    let mut labels: Vec<(usize, usize, f64)> = f
        .values()
        .iter()
        .enumerate()
        .flat_map(|(i, v)| v.iter().enumerate().map(move |(j, z)| (i, j, z.norm())))
        .collect();
    labels.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut out = CoefficientSet::zeros(f.table().clone());
    for (i, j, _) in labels.into_iter().take(k) {
        out.line_mut(i)[j] = f.line(i)[j];
    }
    out
}

fn random_torus_point(d: usize, rng: &mut Stream) -> [f64; 3] {
    let mut c = [0.0; 3];
    for slot in c.iter_mut().take(d) {
        *slot = TAU * rng.uniform();
    }
    c
}

fn random_atoms(manifold: &Manifold, rng: &mut Stream) -> Vec<Atom> {
    let count = 1 + (rng.uniform() * 4.0) as usize;
    (0..count)
        .map(|_| {
            let point = match manifold {
                Manifold::Torus(t) => Point::Torus(random_torus_point(t.dim(), rng)),
                Manifold::Sphere => Point::sphere((2.0 * rng.uniform() - 1.0).acos(), TAU * rng.uniform()),
            };
            Atom {
                point,
                weight: 0.25 + rng.uniform(),
            }
        })
        .collect()
}

/// A thin measure with random geometry: segments or atoms on tori,
/// latitude circles or atoms on the sphere.
pub fn random_thin_measure(manifold: &Manifold, rng: &mut Stream) -> MeasureSpec {
    let curve = rng.uniform() < 0.5;
    let preset = match manifold {
        Manifold::Torus(t) if curve && t.dim() >= 2 => {
            let start = random_torus_point(t.dim(), rng);
            let len = 1.0 + 3.0 * rng.uniform();
            let mut dir = [0.0; 3];
            for slot in dir.iter_mut().take(t.dim()) {
                *slot = rng.normal();
            }
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut end = start;
            for c in 0..t.dim() {
                end[c] += len * dir[c] / norm;
            }
            Preset::Segment { start, end }
        }
        Manifold::Sphere if curve => Preset::Latitude {
            colatitude: 0.3 + (PI - 0.6) * rng.uniform(),
        },
        _ => Preset::Atoms(random_atoms(manifold, rng)),
    };
    MeasureSpec::new(*manifold, preset)
}

/// Heat-smoothed point mass at `x0`: coefficients `e^{-tλ²} conj(e_j(x0))`.
pub fn heat_bump(table: &Arc<SpectrumTable>, x0: &Point, t: f64) -> CoefficientSet {
    let manifold = table.manifold();
    let values = table
        .lines()
        .iter()
        .map(|line| {
            let damp = (-t * line.lambda * line.lambda).exp();
            line.basis.iter().map(|b| b.eval(&manifold, x0).conj() * damp).collect()
        })
        .collect();
    CoefficientSet::new(table.clone(), values).unwrap_or_else(|_| CoefficientSet::zeros(table.clone()))
}
