//! Cumulative Kuznecov sums `Σ_{λ_j ≤ λ} |⟨u, e_j⟩|²` for measures on the
//! sphere and the growth exponent read off them.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::measures::{coefficients, ThinMeasure};
use crate::numeric::{fit_log_log, LineFit};
use crate::spectrum::{enumerate_spectrum, Manifold};
use crate::{Error, Result};

/// Running-max slope below which `sup_λ ‖E_λ u‖` is called bounded.
pub const BOUNDED_SLOPE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct KuznecovFit {
    pub lambdas: Vec<f64>,
    /// `‖E_λ u‖` per line.
    pub norms: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// Lines with `λ ≥ fit_from` enter the fit.
    pub fit_from: f64,
    /// Slope of `log cumulative` against `log λ`.
    pub fit: LineFit,
    pub sup_norm: f64,
    /// Slope of the running maximum of `‖E_λ u‖` over the fit range.
    pub sup_slope: f64,
    pub bounded: bool,
}

impl KuznecovFit {
    pub fn exponent(&self) -> f64 {
        self.fit.slope
    }
}

/// Fits over `λ ∈ [fit_fraction·Λ, Λ]`.
pub fn kuznecov_fit(measure: &ThinMeasure, lambda_max: f64, fit_fraction: f64) -> Result<KuznecovFit> {
    if measure.manifold() != Manifold::Sphere {
        return Err(Error::arg("measure", "Kuznecov fits run on the sphere"));
    }
    if measure.nominal_dim() >= 2.0 {
        return Err(Error::NotThin {
            k: measure.nominal_dim(),
            d: 2,
        });
    }
    if !(fit_fraction > 0.0 && fit_fraction < 1.0) {
        return Err(Error::arg("fit_fraction", "must lie in (0, 1)"));
    }
    let table = Arc::new(enumerate_spectrum(&Manifold::Sphere, lambda_max)?);
    let c = coefficients(measure, &table)?;
    let lambdas: Vec<f64> = table.lines().iter().map(|l| l.lambda).collect();
    let norms = c.line_norms();
    let mut cumulative = Vec::with_capacity(norms.len());
    let mut acc = 0.0;
    for n in &norms {
        acc += n * n;
        cumulative.push(acc);
    }
    let fit_from = fit_fraction * lambda_max;
    let start = lambdas.partition_point(|l| *l < fit_from);
    let fit = fit_log_log(&lambdas[start..], &cumulative[start..]).ok_or(Error::Resolution {
        what: "lines in the Kuznecov fit range",
        required: 2,
        available: lambdas.len() - start,
    })?;
    let mut running = Vec::with_capacity(norms.len());
    let mut m: f64 = 0.0;
    for n in &norms {
        m = m.max(*n);
        running.push(m);
    }
    let sup_slope = fit_log_log(&lambdas[start..], &running[start..]).map_or(0.0, |f| f.slope);
    Ok(KuznecovFit {
        sup_norm: m,
        bounded: sup_slope < BOUNDED_SLOPE,
        sup_slope,
        fit_from,
        fit,
        lambdas,
        norms,
        cumulative,
    })
}
