//! Flat torus `T^d = R^d / (2πZ)^d`, `d ∈ {1, 2, 3}`.
//!
//! Eigenfunctions are `e_j(x) = (2π)^{-d/2} e^{i j·x}` for `j ∈ Z^d`, with
//! frequency `λ = |j|`. Lattice vectors are stored as exact integers and
//! lines are keyed by the integer `|j|²`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Lattice label; coordinates beyond the model dimension are zero.
pub type LatticeVector = [i32; 3];

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusModel {
    d: usize,
}

impl TorusModel {
    pub fn new(d: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        Ok(TorusModel { d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `(2π)^d`.
    pub fn volume(&self) -> f64 {
        TAU.powi(self.d as i32)
    }

    /// `(2π)^{-d/2}`, the modulus of every eigenfunction.
    pub fn amplitude(&self) -> f64 {
        TAU.powf(-(self.d as f64) / 2.0)
    }

    /// Volume of the unit ball in `R^d`.
    pub fn unit_ball_volume(&self) -> f64 {
        match self.d {
            1 => 2.0,
            2 => PI,
            _ => 4.0 * PI / 3.0,
        }
    }

    pub fn eval(&self, j: &LatticeVector, x: &[f64]) -> Complex64 {
        eval_exponential(self.d, j, x)
    }
}

/// Largest integer `n` with `√n ≤ Λ`, allowing a few ulps of slack so that
/// `Λ = √n` computed in floating point still admits `n`.
pub(crate) fn max_norm_sq(lambda_max: f64) -> u64 {
    let admit = |n: u64| (n as f64).sqrt() <= lambda_max * (1.0 + 4.0 * f64::EPSILON);
    let mut n = (lambda_max * lambda_max).floor() as u64;
    while admit(n + 1) {
        n += 1;
    }
    while n > 0 && !admit(n) {
        n -= 1;
    }
    n
}

/// All lattice vectors with `|j|² ≤ Λ²`, grouped by `n = |j|²` in
/// increasing order. Within a group the vectors are lexicographically
/// sorted.
pub fn sum_of_squares_lines(d: usize, lambda_max: f64) -> Result<Vec<(u64, Vec<LatticeVector>)>> {
    TorusModel::new(d)?;
    if !(lambda_max >= 0.0) || !lambda_max.is_finite() {
        return Err(Error::arg("lambda_max", "must be finite and nonnegative"));
    }
    let n_max = max_norm_sq(lambda_max);
    let r = (n_max as f64).sqrt().floor() as i64 + 1;
    let r = (-r..=r).filter(|k| (k * k) as u64 <= n_max);
    let range: Vec<i64> = r.collect();
    let mut all: Vec<(u64, LatticeVector)> = Vec::new();
    let zero = [0i64];
    let ys: &[i64] = if d >= 2 { &range } else { &zero };
    let zs: &[i64] = if d >= 3 { &range } else { &zero };
    for &a in &range {
        for &b in ys {
            let ab = (a * a + b * b) as u64;
            if ab > n_max {
                continue;
            }
            for &c in zs {
                let n = ab + (c * c) as u64;
                if n <= n_max {
                    all.push((n, [a as i32, b as i32, c as i32]));
                }
            }
        }
    }
    all.sort_unstable();
    let mut groups: Vec<(u64, Vec<LatticeVector>)> = Vec::new();
    for (n, j) in all {
        match groups.last_mut() {
            Some((key, v)) if *key == n => v.push(j),
            _ => groups.push((n, alloc::vec![j])),
        }
    }
    Ok(groups)
}

/// `|j|²` in exact integer arithmetic.
pub fn norm_sq(j: &LatticeVector) -> u64 {
    j.iter().map(|&c| (c as i64 * c as i64) as u64).sum()
}

/// `e_j(x) = (2π)^{-d/2} e^{i j·x}`. Coordinates are reduced mod 2π first.
pub fn eval_exponential(d: usize, j: &LatticeVector, x: &[f64]) -> Complex64 {
    let mut phase = 0.0;
    for c in 0..d {
        let xc = rem_tau(x[c]);
        phase += j[c] as f64 * xc;
    }
    let amp = TAU.powf(-(d as f64) / 2.0);
    Complex64::from_polar(amp, phase)
}

/// `x mod 2π` in `[0, 2π)`.
pub(crate) fn rem_tau(x: f64) -> f64 {
    let r = x - TAU * (x / TAU).floor();
    if !(0.0..TAU).contains(&r) {
        0.0
    } else {
        r
    }
}

/// Wraps a coordinate difference into `[-π, π]`.
pub fn wrap(delta: f64) -> f64 {
    let r = rem_tau(delta + PI) - PI;
    if r < -PI {
        r + TAU
    } else {
        r
    }
}

/// Flat min-image distance between two points of `T^d`.
pub fn distance(d: usize, x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for c in 0..d {
        let t = wrap(x[c] - y[c]);
        s += t * t;
    }
    s.sqrt()
}
