//! Sample grids with exact synthesis and analysis for band-limited
//! coefficient sets: the uniform `N^d` grid on the torus and the product
//! Gauss rule on the sphere.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::numeric::pairwise_sum;
use crate::spectrum::{BasisLabel, CoefficientSet, Manifold, Point, SpectrumTable};
use crate::sphere::{LegendreTable, SphereQuadrature};
use crate::torus::TorusModel;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum SampleGrid {
    /// `n` equispaced points per axis, weight `(2π/n)^d`.
    Torus {
        model: TorusModel,
        n: usize,
    },
    Sphere(SphereQuadrature),
}

impl SampleGrid {
    pub fn torus(d: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("n", "grid needs at least one point per axis"));
        }
        Ok(SampleGrid::Torus {
            model: TorusModel::new(d)?,
            n,
        })
    }

    pub fn sphere(degree: u32) -> Self {
        SampleGrid::Sphere(SphereQuadrature::new(degree))
    }

    /// Smallest grid resolving every mode of `table` exactly.
    pub fn for_table(table: &SpectrumTable) -> Self {
        match table.manifold() {
            Manifold::Torus(t) => SampleGrid::Torus {
                model: t,
                n: 2 * table.max_mode() + 2,
            },
            Manifold::Sphere => SampleGrid::sphere(table.max_mode() as u32),
        }
    }

    pub fn manifold(&self) -> Manifold {
        match self {
            SampleGrid::Torus { model, .. } => Manifold::Torus(*model),
            SampleGrid::Sphere(_) => Manifold::Sphere,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SampleGrid::Torus { model, n } => n.pow(model.dim() as u32),
            SampleGrid::Sphere(q) => q.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point `index` in row-major order.
    pub fn point(&self, index: usize) -> Point {
        match self {
            SampleGrid::Torus { model, n } => {
                let mut c = [0.0; 3];
                let mut rest = index;
                for axis in (0..model.dim()).rev() {
                    c[axis] = TAU * (rest % n) as f64 / *n as f64;
                    rest /= n;
                }
                Point::Torus(c)
            }
            SampleGrid::Sphere(q) => {
                let ((theta, phi), _) = q.node(index);
                Point::Sphere { theta, phi }
            }
        }
    }

    pub fn weight(&self, index: usize) -> f64 {
        match self {
            SampleGrid::Torus { model, n } => (TAU / *n as f64).powi(model.dim() as i32),
            SampleGrid::Sphere(q) => q.node(index).1,
        }
    }

    /// Checks that the grid integrates products of modes of `table`
    /// exactly.
    pub fn check_resolves(&self, table: &SpectrumTable) -> Result<()> {
        if table.manifold() != self.manifold() {
            return Err(Error::ManifoldMismatch);
        }
        let need = table.max_mode();
        match self {
            SampleGrid::Torus { n, .. } => {
                if *n <= 2 * need {
                    return Err(Error::Resolution {
                        what: "torus grid points per axis",
                        required: 2 * need + 1,
                        available: *n,
                    });
                }
            }
            SampleGrid::Sphere(q) => {
                if (q.degree() as usize) < need {
                    return Err(Error::Resolution {
                        what: "sphere quadrature degree",
                        required: need,
                        available: q.degree() as usize,
                    });
                }
            }
        }
        Ok(())
    }

    /// `∫ |f|²` by the grid rule.
    pub fn integrate_sq(&self, values: &[Complex64]) -> f64 {
        let terms: Vec<f64> = values
            .iter()
            .enumerate()
            .map(|(i, v)| self.weight(i) * v.norm_sqr())
            .collect();
        pairwise_sum(&terms)
    }

    /// Pointwise values of `Σ c_j e_j` on the grid.
    pub fn synthesize(&self, coeffs: &CoefficientSet) -> Result<Vec<Complex64>> {
        self.check_resolves(coeffs.table())?;
        match self {
            SampleGrid::Torus { model, n } => Ok(torus_synthesize(model, *n, coeffs)),
            SampleGrid::Sphere(q) => Ok(sphere_synthesize(q, coeffs)),
        }
    }

    /// Quadrature projection `⟨f, e_j⟩` of grid values onto `table`.
    pub fn analyze(&self, values: &[Complex64], table: Arc<SpectrumTable>) -> Result<CoefficientSet> {
        self.check_resolves(&table)?;
        if values.len() != self.len() {
            return Err(Error::arg("values", "one value per grid point required"));
        }
        match self {
            SampleGrid::Torus { model, n } => torus_analyze(model, *n, values, table),
            SampleGrid::Sphere(q) => sphere_analyze(q, values, table),
        }
    }
}

/// Applies `out[o, r, i] = Σ_c tw[r, c] · data[o, c, i]` along `axis`.
fn transform_axis(
    data: &[Complex64],
    shape: &mut [usize; 3],
    axis: usize,
    tw: &[Complex64],
    rows: usize,
) -> Vec<Complex64> {
    let cols = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); outer * rows * inner];
    for o in 0..outer {
        for r in 0..rows {
            let trow = &tw[r * cols..(r + 1) * cols];
            let dst = &mut out[(o * rows + r) * inner..(o * rows + r + 1) * inner];
            for (c, t) in trow.iter().enumerate() {
                let src = &data[(o * cols + c) * inner..(o * cols + c + 1) * inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += t * s;
                }
            }
        }
    }
    shape[axis] = rows;
    out
}

fn torus_synthesize(model: &TorusModel, n: usize, coeffs: &CoefficientSet) -> Vec<Complex64> {
    let d = model.dim();
    let j = coeffs.table().max_mode() as i64;
    let m = (2 * j + 1) as usize;
    let mut shape = [1usize; 3];
    for s in shape.iter_mut().take(d) {
        *s = m;
    }
    let mut dense = alloc::vec![Complex64::new(0.0, 0.0); m.pow(d as u32)];
    for (line, v) in coeffs.iter() {
        for (b, c) in line.basis.iter().zip(v) {
            if let BasisLabel::Lattice(l) = b {
                let idx = l[..d].iter().fold(0usize, |idx, c| idx * m + (*c as i64 + j) as usize);
                dense[idx] = *c;
            }
        }
    }
    // tw[r, c] = e^{i (c - J) x_r}
    let tw: Vec<Complex64> = (0..n)
        .flat_map(|r| {
            let x = TAU * r as f64 / n as f64;
            (0..m).map(move |c| Complex64::from_polar(1.0, (c as i64 - j) as f64 * x))
        })
        .collect();
    let mut data = dense;
    for axis in 0..d {
        data = transform_axis(&data, &mut shape, axis, &tw, n);
    }
    let amp = model.amplitude();
    data.iter_mut().for_each(|z| *z *= amp);
    data
}

fn torus_analyze(
    model: &TorusModel,
    n: usize,
    values: &[Complex64],
    table: Arc<SpectrumTable>,
) -> Result<CoefficientSet> {
    let d = model.dim();
    let j = table.max_mode() as i64;
    let m = (2 * j + 1) as usize;
    let mut shape = [1usize; 3];
    for s in shape.iter_mut().take(d) {
        *s = n;
    }
    let h = TAU / n as f64;
    // tw[c, r] = e^{-i (c - J) x_r} h
    let tw: Vec<Complex64> = (0..m)
        .flat_map(|c| (0..n).map(move |r| Complex64::from_polar(h, -(c as i64 - j) as f64 * TAU * r as f64 / n as f64)))
        .collect();
    let mut data = values.to_vec();
    for axis in 0..d {
        data = transform_axis(&data, &mut shape, axis, &tw, m);
    }
    let amp = model.amplitude();
    let out = table
        .lines()
        .iter()
        .map(|line| {
            line.basis
                .iter()
                .map(|b| match b {
                    BasisLabel::Lattice(l) => {
                        let idx = l[..d].iter().fold(0usize, |idx, c| idx * m + (*c as i64 + j) as usize);
                        data[idx] * amp
                    }
                    _ => Complex64::new(0.0, 0.0),
                })
                .collect()
        })
        .collect();
    CoefficientSet::new(table, out)
}

fn sphere_synthesize(q: &SphereQuadrature, coeffs: &CoefficientSet) -> Vec<Complex64> {
    let lmax = coeffs.table().max_mode() as u32;
    let n_phi = q.n_phi();
    let mut out = Vec::with_capacity(q.len());
    for i in 0..q.n_theta() {
        let t = LegendreTable::new(lmax, q.cos_theta()[i]);
        // g[m + lmax] = Σ_l c_{l,m} P̄_l^m
        let mut g = alloc::vec![Complex64::new(0.0, 0.0); 2 * lmax as usize + 1];
        for (line, v) in coeffs.iter() {
            for (b, c) in line.basis.iter().zip(v) {
                if let BasisLabel::Harmonic { l, m } = b {
                    g[(*m + lmax as i32) as usize] += c * t.signed(*l, *m);
                }
            }
        }
        for k in 0..n_phi {
            let phi = q.phi(k);
            let mut s = Complex64::new(0.0, 0.0);
            for (mi, gm) in g.iter().enumerate() {
                let m = mi as i64 - lmax as i64;
                s += gm * Complex64::from_polar(1.0, m as f64 * phi);
            }
            out.push(s);
        }
    }
    out
}

fn sphere_analyze(q: &SphereQuadrature, values: &[Complex64], table: Arc<SpectrumTable>) -> Result<CoefficientSet> {
    let lmax = table.max_mode() as u32;
    let n_phi = q.n_phi();
    let width = 2 * lmax as usize + 1;
    let mut out: Vec<Vec<Complex64>> = table
        .lines()
        .iter()
        .map(|l| alloc::vec![Complex64::new(0.0, 0.0); l.multiplicity()])
        .collect();
    for i in 0..q.n_theta() {
        let t = LegendreTable::new(lmax, q.cos_theta()[i]);
        let row = &values[i * n_phi..(i + 1) * n_phi];
        // ring Fourier coefficients h_m = Σ_k f e^{-imφ_k} Δφ
        let h: Vec<Complex64> = (0..width)
            .map(|mi| {
                let m = mi as i64 - lmax as i64;
                let mut s = Complex64::new(0.0, 0.0);
                for (k, f) in row.iter().enumerate() {
                    s += f * Complex64::from_polar(1.0, -(m as f64) * q.phi(k));
                }
                s * q.phi_weight()
            })
            .collect();
        let w = q.lat_weight(i);
        for (line, dst) in table.lines().iter().zip(out.iter_mut()) {
            for (b, o) in line.basis.iter().zip(dst.iter_mut()) {
                if let BasisLabel::Harmonic { l, m } = b {
                    *o += h[(*m + lmax as i32) as usize] * (w * t.signed(*l, *m));
                }
            }
        }
    }
    CoefficientSet::new(table, out)
}
