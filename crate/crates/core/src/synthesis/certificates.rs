//! Numerical certificates for the `L²` stability of `P_R` on thin
//! supports and for the dyadic endpoint decomposition.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{lowpass_apply, lowpass_pairing, zero_line_energy, Window};
use crate::measures::VolumeEstimate;
use crate::numeric::{fit_log_log, pairwise_sum, LineFit};
use crate::spectrum::{vector_norm_sq, CoefficientSet};
use crate::{Error, Result};

/// A fitted log-log slope tested against an upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeCheck {
    /// `None` when the quantity vanishes on the whole grid.
    pub fit: Option<LineFit>,
    pub predicted: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SlopeCheck {
    fn upper(xs: &[f64], ys: &[f64], predicted: f64, tolerance: f64) -> Self {
        let fit = fit_log_log(xs, ys);
        let pass = fit.is_none_or(|f| f.slope <= predicted + tolerance);
        SlopeCheck {
            fit,
            predicted,
            tolerance,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRow {
    pub r: f64,
    /// `‖P_R u‖₂`.
    pub l2_norm: f64,
    /// `‖P_R u‖₂ / (R^{d/2-d/p} ‖u‖_{ℓ̂^p, ≤Λ})`.
    pub ratio: f64,
    /// `‖u‖_{ℓ̂^p}` over the lines `λ ≤ C_ψ R`.
    pub band_norm: f64,
    /// `|⟨P_R u, χ⟩|` per test function.
    pub pairings: Vec<f64>,
    /// Pairings divided by `band_norm`.
    pub normalized_pairings: Vec<f64>,
    /// `|E^{C₀/R}|`.
    pub support_volume: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCertificate {
    pub p: f64,
    pub d: usize,
    pub k: f64,
    pub lambda_max: f64,
    /// `‖u‖_{ℓ̂^p}` over the whole table.
    pub lp_norm: f64,
    /// `d/2 - d/p`.
    pub l2_exponent: f64,
    /// `k/2 - d/p`.
    pub pairing_exponent: f64,
    pub rows: Vec<StabilityRow>,
    /// `max ratio / min ratio` over the grid.
    pub ratio_spread: f64,
    pub l2_fit: Option<LineFit>,
    pub ratio_fit: Option<LineFit>,
    /// Slope of `|E^{C₀/R}|` against `R`; `-(d-k)` for a clean fit.
    pub volume_fit: Option<LineFit>,
    pub pairing_checks: Vec<SlopeCheck>,
}

/// Evaluates both ingredients of the stability bound on an `R`-grid:
/// the `L²` estimate `‖P_R u‖₂ ≲ R^{d/2-d/p}‖u‖_{ℓ̂^p}` and the support
/// volume `|E^{C₀/R}|`, then fits the pairing decay against `R^{k/2-d/p}`.
#[allow(clippy::too_many_arguments)]
pub fn stability_certificate(
    u: &CoefficientSet,
    k: f64,
    p: f64,
    r_grid: &[f64],
    tests: &[CoefficientSet],
    window: &Window,
    volume: &VolumeEstimate,
    tolerance: f64,
) -> Result<StabilityCertificate> {
    if !(p > 2.0) {
        return Err(Error::arg("p", "p must exceed 2"));
    }
    let table = u.table();
    let lambda_max = table.lambda_max();
    if r_grid.len() < 2 {
        return Err(Error::arg("r_grid", "need at least two radii"));
    }
    for r in r_grid {
        if !(*r >= 1.0 && *r <= lambda_max / 2.0) {
            return Err(Error::arg("r_grid", "every R must lie in [1, Λ/2]"));
        }
    }
    for chi in tests {
        u.check_same_table(chi)?;
    }
    let d = table.manifold().dim();
    let l2_exponent = d as f64 / 2.0 - d as f64 / p;
    let pairing_exponent = k / 2.0 - d as f64 / p;
    let powered: Vec<f64> = u.line_norms().iter().map(|n| n.powf(p)).collect();
    let lp_norm = pairwise_sum(&powered).powf(1.0 / p);
    let lambdas: Vec<f64> = table.lines().iter().map(|l| l.lambda).collect();
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let lp = lowpass_apply(u, r, window)?;
        let band = lambdas.partition_point(|l| *l <= window.width() * r);
        let band_norm = pairwise_sum(&powered[..band]).powf(1.0 / p);
        let pairings = tests
            .iter()
            .map(|chi| lowpass_pairing(u, chi, r, window).map(|z| z.norm()))
            .collect::<Result<Vec<_>>>()?;
        let normalized_pairings = pairings
            .iter()
            .map(|v| if band_norm > 0.0 { v / band_norm } else { 0.0 })
            .collect();
        rows.push(StabilityRow {
            r,
            l2_norm: lp.d_r,
            ratio: if lp_norm > 0.0 {
                lp.d_r / (r.powf(l2_exponent) * lp_norm)
            } else {
                0.0
            },
            band_norm,
            pairings,
            normalized_pairings,
            support_volume: volume.volume_at(super::C0 / r),
        });
    }
    let rs: Vec<f64> = rows.iter().map(|r| r.r).collect();
    let col = |f: &dyn Fn(&StabilityRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let ratios = col(&|r| r.ratio);
    let rmax = ratios.iter().cloned().fold(0.0, f64::max);
    let rmin = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let pairing_checks = (0..tests.len())
        .map(|i| SlopeCheck::upper(&rs, &col(&|r| r.normalized_pairings[i]), pairing_exponent, tolerance))
        .collect();
    Ok(StabilityCertificate {
        p,
        d,
        k,
        lambda_max,
        lp_norm,
        l2_exponent,
        pairing_exponent,
        ratio_spread: if rmin > 0.0 { rmax / rmin } else { f64::INFINITY },
        l2_fit: fit_log_log(&rs, &col(&|r| r.l2_norm)),
        ratio_fit: fit_log_log(&rs, &ratios),
        volume_fit: fit_log_log(&rs, &col(&|r| r.support_volume)),
        pairing_checks,
        rows,
    })
}

/// `a_j = sup_{τ ∈ (2^j, 2^{j+1}]} 2^{j·codim} |ψ(τ)|²` for `j = 0..=j_max`,
/// the sup taken over 512 samples per band.
pub fn window_decay(window: &Window, codim: f64, j_max: u32) -> Vec<f64> {
    (0..=j_max)
        .map(|j| {
            let lo = (2.0f64).powi(j as i32);
            let sup = (1..=512)
                .map(|i| window.eval(lo * (1.0 + i as f64 / 512.0)).powi(2))
                .fold(0.0, f64::max);
            (2.0f64).powf(j as f64 * codim) * sup
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointRow {
    pub r: f64,
    pub j: i32,
    /// The band is `λ/R ∈ (2^j, 2^{j+1}]`.
    pub lo: f64,
    pub hi: f64,
    /// `b_j(R) = (2^j R)^{k-d} Σ_band ‖E_λ u‖²`.
    pub b: f64,
    /// Whether the whole band lies below the table cutoff.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndpointDiagnostic {
    pub d: usize,
    pub k: f64,
    /// `p₀ = 2d/k`.
    pub p0: f64,
    /// `a_j`, `j = 0, 1, …`.
    pub a: Vec<f64>,
    /// `Σ_{i > j} a_i` over the computed range.
    pub a_tails: Vec<f64>,
    pub rows: Vec<EndpointRow>,
    /// `R^{k-d} |ψ(0)|² ‖E_0 u‖²` per `R`.
    pub zero_terms: Vec<f64>,
    /// `R^{k-d} ‖P_R u‖²` per `R`.
    pub energy_trend: Vec<f64>,
    /// Largest `b_j(R)` over complete bands.
    pub b_max: f64,
}

pub const ENDPOINT_J_MAX: u32 = 10;

pub fn endpoint_dyadic(u: &CoefficientSet, k: f64, r_grid: &[f64], window: &Window) -> Result<EndpointDiagnostic> {
    let table = u.table();
    let d = table.manifold().dim();
    if !(k > 0.0 && k < d as f64) {
        return Err(Error::NotThin { k, d });
    }
    let codim = d as f64 - k;
    let lambda_max = table.lambda_max();
    let a = window_decay(window, codim, ENDPOINT_J_MAX);
    let a_tails = (0..a.len()).map(|j| pairwise_sum(&a[j + 1..])).collect();
    let energies: Vec<(f64, f64)> = u.iter().map(|(l, v)| (l.lambda, vector_norm_sq(v))).collect();
    let smallest = energies.iter().map(|e| e.0).find(|l| *l > 0.0).unwrap_or(1.0);
    let mut rows = Vec::new();
    let mut zero_terms = Vec::new();
    let mut energy_trend = Vec::new();
    for &r in r_grid {
        if !(r >= 1.0) {
            return Err(Error::arg("r_grid", "every R must be at least 1"));
        }
        let mut j = (smallest / r).log2().floor() as i32 - 1;
        while (2.0f64).powi(j) * r < lambda_max {
            let lo = (2.0f64).powi(j) * r;
            let hi = 2.0 * lo;
            let mass: Vec<f64> = energies
                .iter()
                .filter(|(l, _)| *l > lo * (1.0 + 1e-12) && *l <= hi * (1.0 + 1e-12))
                .map(|e| e.1)
                .collect();
            if !mass.is_empty() {
                rows.push(EndpointRow {
                    r,
                    j,
                    lo,
                    hi,
                    b: lo.powf(-codim) * pairwise_sum(&mass),
                    complete: hi <= lambda_max,
                });
            }
            j += 1;
        }
        let zero = r.powf(-codim) * window.eval(0.0).powi(2) * zero_line_energy(u);
        zero_terms.push(zero);
        energy_trend.push(r.powf(-codim) * lowpass_apply(u, r, window)?.d_r.powi(2));
    }
    let b_max = rows.iter().filter(|r| r.complete).map(|r| r.b).fold(0.0, f64::max);
    Ok(EndpointDiagnostic {
        d,
        k,
        p0: 2.0 * d as f64 / k,
        a,
        a_tails,
        rows,
        zero_terms,
        energy_trend,
        b_max,
    })
}
