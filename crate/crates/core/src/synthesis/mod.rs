//! Windows `ψ` with `supp ψ̂ ⊂ [-1, 1]`, the low-pass multiplier
//! `P_R = ψ(√(-Δ)/R)` and the stability/endpoint certificates built on it.

mod certificates;

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::SampleGrid;
use crate::measures::{SupportDistance, ThinMeasure};
use crate::numeric::{gauss_legendre, gauss_legendre_on, pairwise_sum};
use crate::spectrum::{vector_norm_sq, CoefficientSet};
use crate::{Error, Result};

pub use certificates::{
    endpoint_dyadic, stability_certificate, window_decay, EndpointDiagnostic, EndpointRow, SlopeCheck,
    StabilityCertificate, StabilityRow,
};

/// Propagation constant: `supp P_R u ⊂ E^{C₀/R}` for unit-speed waves and
/// `supp ψ̂ ⊂ [-1, 1]`.
pub const C0: f64 = 1.0;

const PANEL_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowKind {
    /// `ψ̂(ξ) = exp(-1/(1-ξ²))` on `(-1, 1)`.
    #[default]
    Bump,
    /// `ψ̂(ξ) = (1 - |ξ|)_+`, so `ψ(t) = (sin(t/2)/(t/2))²`.
    Fejer,
}

impl WindowKind {
    pub fn name(&self) -> &'static str {
        match self {
            WindowKind::Bump => "bump",
            WindowKind::Fejer => "fejer",
        }
    }
}

/// An even window normalized by `ψ(0) = 1`.
#[derive(Debug, Clone)]
pub struct Window {
    kind: WindowKind,
    /// Single Gauss–Legendre rule on `[-1, 1]`, weights times `ψ̂ / ∫ψ̂`.
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panel: (Vec<f64>, Vec<f64>),
    c_psi: f64,
    width: f64,
}

fn bump_profile(xi: f64) -> f64 {
    let s = 1.0 - xi * xi;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

impl Window {
    pub fn new(kind: WindowKind) -> Self {
        let (nodes, weights) = match kind {
            WindowKind::Bump => {
                let mut n = 256;
                let mut prev = bump_rule(n);
                loop {
                    let next = bump_rule(2 * n);
                    let (z0, z1) = (pairwise_sum(&prev.1), pairwise_sum(&next.1));
                    if (z0 - z1).abs() <= 1e-12 * z1 || n >= 1 << 14 {
                        break next;
                    }
                    prev = next;
                    n *= 2;
                }
            }
            WindowKind::Fejer => (Vec::new(), Vec::new()),
        };
        let z = pairwise_sum(&weights);
        let weights = weights.iter().map(|w| w / z).collect();
        let mut w = Window {
            kind,
            nodes,
            weights,
            panel: gauss_legendre(PANEL_NODES),
            c_psi: 0.5,
            width: 0.0,
        };
        w.width = w.first_crossing(w.c_psi);
        w
    }

    pub fn bump() -> Self {
        Window::new(WindowKind::Bump)
    }

    pub fn fejer() -> Self {
        Window::new(WindowKind::Fejer)
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    /// Nodes in the base cosine-transform rule.
    pub fn nodes(&self) -> usize {
        self.nodes.len()
    }

    /// `c_ψ`: half of `max |ψ| = ψ(0)`.
    pub fn c_psi(&self) -> f64 {
        self.c_psi
    }

    /// `C_ψ`: `|ψ| ≥ c_ψ` on `[0, C_ψ]`, with equality at the right end.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// `sup |ψ| = ψ(0)` since `ψ̂ ≥ 0`.
    pub fn sup_abs(&self) -> f64 {
        1.0
    }

    /// `ψ(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        match self.kind {
            WindowKind::Fejer => {
                if t < 1e-4 {
                    1.0 - t * t / 12.0
                } else {
                    let s = (t / 2.0).sin() / (t / 2.0);
                    s * s
                }
            }
            WindowKind::Bump => {
                if t <= self.nodes.len() as f64 / 4.0 {
                    let terms: Vec<f64> = self
                        .nodes
                        .iter()
                        .zip(&self.weights)
                        .map(|(x, w)| w * (t * x).cos())
                        .collect();
                    pairwise_sum(&terms)
                } else {
                    self.eval_panels(t)
                }
            }
        }
    }

    /// Composite rule for large `t`: panels short enough that each sees a
    /// bounded number of oscillations.
    fn eval_panels(&self, t: f64) -> f64 {
        let panels = ((t / 4.0).ceil() as usize).max(8);
        let h = 2.0 / panels as f64;
        let (px, pw) = &self.panel;
        let mut terms = Vec::with_capacity(panels * PANEL_NODES);
        let mut z = Vec::with_capacity(panels * PANEL_NODES);
        for p in 0..panels {
            let a = -1.0 + h * p as f64;
            for (x, w) in px.iter().zip(pw) {
                let xi = a + h * (x + 1.0) / 2.0;
                let b = w * h / 2.0 * bump_profile(xi);
                terms.push(b * (t * xi).cos());
                z.push(b);
            }
        }
        pairwise_sum(&terms) / pairwise_sum(&z)
    }

    fn first_crossing(&self, level: f64) -> f64 {
        let step = 0.01;
        let mut hi = step;
        while self.eval(hi) >= level {
            hi += step;
        }
        let mut lo = hi - step;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) >= level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Checks `|ψ| ≥ c_ψ` on `samples` equispaced points of `[0, C_ψ]`.
    pub fn verify_plateau(&self, samples: usize) -> bool {
        (0..=samples).all(|i| self.eval(self.width * i as f64 / samples as f64).abs() >= self.c_psi)
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::bump()
    }
}

fn bump_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre_on(n, -1.0, 1.0);
    let w = x.iter().zip(&w).map(|(x, w)| w * bump_profile(*x)).collect();
    (x, w)
}

pub fn window_eval(window: &Window, t: f64) -> f64 {
    window.eval(t)
}

/// `P_R f` together with the byproducts of the multiplication.
#[derive(Debug, Clone, PartialEq)]
pub struct Lowpass {
    pub r: f64,
    /// `ψ(λ/R)` per line.
    pub multipliers: Vec<f64>,
    pub coeffs: CoefficientSet,
    /// `Num_R = Σ |ψ(λ/R)| ‖E_λ f‖`.
    pub num_r: f64,
    /// `D_R = (Σ |ψ(λ/R)|² ‖E_λ f‖²)^{1/2} = ‖P_R f‖₂`.
    pub d_r: f64,
}

pub fn lowpass_apply(coeffs: &CoefficientSet, r: f64, window: &Window) -> Result<Lowpass> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::arg("R", "must be a finite real >= 1"));
    }
    let multipliers: Vec<f64> = coeffs
        .table()
        .lines()
        .iter()
        .map(|l| window.eval(l.lambda / r))
        .collect();
    let norms = coeffs.line_norms();
    let num_r = pairwise_sum(
        &multipliers
            .iter()
            .zip(&norms)
            .map(|(m, n)| m.abs() * n)
            .collect::<Vec<_>>(),
    );
    let d_r = pairwise_sum(
        &multipliers
            .iter()
            .zip(&norms)
            .map(|(m, n)| (m * n).powi(2))
            .collect::<Vec<_>>(),
    )
    .sqrt();
    Ok(Lowpass {
        r,
        coeffs: coeffs.scale_lines(&multipliers),
        multipliers,
        num_r,
        d_r,
    })
}

/// Pointwise values of a (filtered) expansion on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridValues {
    pub values: Vec<Complex64>,
    /// Grid quadrature of `|v|²`.
    pub l2_sq: f64,
    pub sup: f64,
    pub argmax: usize,
    /// `∫_{outside E^ρ} |v|² / ∫ |v|²` when a support was given.
    pub leakage: Option<f64>,
    /// Grid measure of the complement of `E^ρ` over the total volume.
    pub outside_fraction: Option<f64>,
}

/// Synthesizes `coeffs` on `grid`; with `support = Some((u, ρ))` also
/// measures how much of the energy lies outside `E^ρ`.
pub fn lowpass_eval_grid(
    coeffs: &CoefficientSet,
    grid: &SampleGrid,
    support: Option<(&ThinMeasure, f64)>,
) -> Result<GridValues> {
    let values = grid.synthesize(coeffs)?;
    let energy: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, v)| grid.weight(i) * v.norm_sqr())
        .collect();
    let l2_sq = pairwise_sum(&energy);
    let (argmax, sup) = values
        .iter()
        .map(|v| v.norm())
        .enumerate()
        .fold((0, 0.0), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    let (leakage, outside_fraction) = match support {
        None => (None, None),
        Some((measure, rho)) => {
            let dist = SupportDistance::new(measure, 2.0 * rho)?;
            let mut out_energy = Vec::new();
            let mut out_weight = Vec::new();
            let mut all_weight = Vec::with_capacity(grid.len());
            for (i, e) in energy.iter().enumerate() {
                let w = grid.weight(i);
                all_weight.push(w);
                if dist.distance(&grid.point(i)) > rho {
                    out_energy.push(*e);
                    out_weight.push(w);
                }
            }
            let leak = if l2_sq > 0.0 {
                pairwise_sum(&out_energy) / l2_sq
            } else {
                0.0
            };
            (Some(leak), Some(pairwise_sum(&out_weight) / pairwise_sum(&all_weight)))
        }
    };
    Ok(GridValues {
        values,
        l2_sq,
        sup,
        argmax,
        leakage,
        outside_fraction,
    })
}

/// `⟨P_R u, χ⟩ = Σ_λ ψ(λ/R) ⟨E_λ u, E_λ χ⟩`.
pub fn lowpass_pairing(u: &CoefficientSet, chi: &CoefficientSet, r: f64, window: &Window) -> Result<Complex64> {
    u.check_same_table(chi)?;
    let terms: Vec<Complex64> = u
        .table()
        .lines()
        .iter()
        .zip(u.values().iter().zip(chi.values()))
        .map(|(line, (a, b))| {
            let inner: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
            inner * window.eval(line.lambda / r)
        })
        .collect();
    Ok(crate::spectrum::complex_sum(&terms))
}

/// `‖E_0 u‖²`, i.e. `|∫u|² / |M|`.
pub(crate) fn zero_line_energy(u: &CoefficientSet) -> f64 {
    u.iter()
        .find(|(line, _)| line.key == 0)
        .map_or(0.0, |(_, v)| vector_norm_sq(v))
}

#[cfg(test)]
mod tests;
