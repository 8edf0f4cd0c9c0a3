//! Fourier ratios `FR(f) = ‖f‖_{ℓ̂¹}/‖f‖₂`, their windowed versions, and
//! the approximation and uncertainty statements phrased in terms of them.

mod growth;
mod kuznecov;
mod sparse;
mod uncertainty;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::numeric::pairwise_sum;
use crate::spectrum::CoefficientSet;
use crate::synthesis::{lowpass_apply, Window};
use crate::{Error, Result};

pub use growth::{growth_grid_sup, growth_table, GrowthRow, GrowthTable};
pub use kuznecov::{kuznecov_fit, KuznecovFit};
pub use sparse::{analytic_expected_error, sparse_approx, SparseApprox};
pub use uncertainty::{fr_lower_certificate, uncertainty_product, ChainStep, FrCertificate, UncertaintyCertificate};

/// Absolute rounding allowance on proof-step slacks, relative to the
/// larger side.
pub const SLACK_ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalRatio {
    pub r: f64,
    pub num_r: f64,
    pub d_r: f64,
    /// `FR_R = Num_R / D_R`.
    pub fr_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    pub l1_hat: f64,
    pub l2: f64,
    pub fr: f64,
    /// Cutoff of the table the sums run over.
    pub truncation: f64,
    /// Lines with nonzero mass.
    pub active_lines: usize,
    pub local: Option<LocalRatio>,
}

pub fn fourier_ratio(coeffs: &CoefficientSet) -> Result<RatioReport> {
    let norms = coeffs.line_norms();
    let l1_hat = pairwise_sum(&norms);
    let l2 = pairwise_sum(&norms.iter().map(|n| n * n).collect::<Vec<_>>()).sqrt();
    if !(l2 > 0.0) {
        return Err(Error::UndefinedRatio("f vanishes on the table"));
    }
    Ok(RatioReport {
        l1_hat,
        l2,
        fr: l1_hat / l2,
        truncation: coeffs.table().lambda_max(),
        active_lines: norms.iter().filter(|n| **n > 0.0).count(),
        local: None,
    })
}

pub fn local_fr(coeffs: &CoefficientSet, r: f64, window: &Window) -> Result<RatioReport> {
    let mut report = fourier_ratio(coeffs)?;
    let lp = lowpass_apply(coeffs, r, window)?;
    if !(lp.d_r > 0.0) {
        return Err(Error::UndefinedRatio("all windowed mass vanishes"));
    }
    report.local = Some(LocalRatio {
        r,
        num_r: lp.num_r,
        d_r: lp.d_r,
        fr_r: lp.num_r / lp.d_r,
    });
    Ok(report)
}

/// Outcome of testing `FR(f) ≤ (1+η)√k + η√N(Λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverseCheck {
    /// `‖f - P‖₂ / ‖f‖₂`.
    pub eta: f64,
    /// Number of eigenfunction labels carrying `P`.
    pub k: usize,
    /// `N(Λ)` of the table.
    pub n_lambda: usize,
    pub fr: f64,
    pub bound: f64,
    pub slack: f64,
}

pub fn converse_check(f: &CoefficientSet, p: &CoefficientSet) -> Result<ConverseCheck> {
    f.check_same_table(p)?;
    let ratio = fourier_ratio(f)?;
    let eta = f.sub(p)?.l2_norm() / ratio.l2;
    if !(eta < 1.0) {
        return Err(Error::Hypothesis(alloc::format!(
            "approximation error η = {eta} must be below 1"
        )));
    }
    let k = p.support_size();
    let n_lambda = f.table().weyl_count();
    let bound = (1.0 + eta) * (k as f64).sqrt() + eta * (n_lambda as f64).sqrt();
    Ok(ConverseCheck {
        eta,
        k,
        n_lambda,
        fr: ratio.fr,
        bound,
        slack: bound - ratio.fr,
    })
}
