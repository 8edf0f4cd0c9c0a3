//! Eigenfunction growth `A(λ) = sup_x Π_λ(x, x)^{1/2}`. Both models are
//! homogeneous, so the diagonal of the spectral kernel is constant:
//! `mult(λ)/(2π)^d` on the torus and `(2l+1)/(4π)` on the sphere.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::SampleGrid;
use crate::spectrum::{enumerate_spectrum, BasisLabel, Manifold, SpectrumTable};
use crate::sphere::{kernel_diagonal, LegendreTable};
use crate::torus;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRow {
    pub key: u64,
    pub lambda: f64,
    /// `A(λ)²`.
    pub a_sq: f64,
    pub a: f64,
    /// `max_{λ' ≤ λ} A(λ')`.
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthTable {
    pub manifold: Manifold,
    pub rows: Vec<GrowthRow>,
    pub band: f64,
    /// `A_R = max_{λ ≤ band} A(λ)`.
    pub a_r: f64,
}

pub fn growth_table(manifold: &Manifold, lambda_max: f64, band: f64) -> Result<GrowthTable> {
    if !(band >= 0.0) {
        return Err(Error::arg("band", "must be nonnegative"));
    }
    let table = enumerate_spectrum(manifold, lambda_max.max(band))?;
    let vol = manifold.volume();
    let mut envelope: f64 = 0.0;
    let mut a_r: f64 = 0.0;
    let rows = table
        .lines()
        .iter()
        .map(|line| {
            let a_sq = line.multiplicity() as f64 / vol;
            let a = a_sq.sqrt();
            envelope = envelope.max(a);
            if line.lambda <= band * (1.0 + 4.0 * f64::EPSILON) {
                a_r = a_r.max(a);
            }
            GrowthRow {
                key: line.key,
                lambda: line.lambda,
                a_sq,
                a,
                envelope,
            }
        })
        .collect();
    Ok(GrowthTable {
        manifold: *manifold,
        rows,
        band,
        a_r,
    })
}

/// `sup_{x ∈ grid} Σ_{λ_j = λ} |e_j(x)|²` per line of `table`, by direct
/// evaluation of the basis.
pub fn growth_grid_sup(table: &SpectrumTable, grid: &SampleGrid) -> Result<Vec<f64>> {
    if table.manifold() != grid.manifold() {
        return Err(Error::ManifoldMismatch);
    }
    let mut sup = alloc::vec![0.0f64; table.len()];
    match grid {
        SampleGrid::Torus { model, .. } => {
            for i in 0..grid.len() {
                let x = match grid.point(i) {
                    crate::spectrum::Point::Torus(c) => c,
                    _ => unreachable!(),
                };
                for (line, s) in table.lines().iter().zip(sup.iter_mut()) {
                    let v: f64 = line
                        .basis
                        .iter()
                        .map(|b| match b {
                            BasisLabel::Lattice(j) => torus::eval_exponential(model.dim(), j, &x).norm_sqr(),
                            _ => 0.0,
                        })
                        .sum();
                    *s = s.max(v);
                }
            }
        }
        SampleGrid::Sphere(q) => {
            let lmax = table.max_mode() as u32;
            for i in 0..q.n_theta() {
                let lt = LegendreTable::new(lmax, q.cos_theta()[i]);
                for (line, s) in table.lines().iter().zip(sup.iter_mut()) {
                    *s = s.max(kernel_diagonal(&lt, line.key as u32));
                }
            }
        }
    }
    Ok(sup)
}
