//! Certificates for the lower bound on `FR_R` and the uncertainty product
//! `M_R(Σ_R)·|E^{C₀/R}|`, each proof step evaluated on concrete data.

use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::growth::growth_table;
use super::SLACK_ROUNDING;
use crate::grid::SampleGrid;
use crate::numeric::pairwise_sum;
use crate::spectrum::{CoefficientSet, Manifold};
use crate::synthesis::{lowpass_apply, lowpass_eval_grid, Window};
use crate::{Error, Result};

/// One inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainStep {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    /// `slack ≥ 0` up to [`SLACK_ROUNDING`] relative rounding.
    pub pass: bool,
}

impl ChainStep {
    fn new(name: &'static str, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        ChainStep {
            name,
            lhs,
            rhs,
            slack,
            pass: slack.is_finite() && slack >= -SLACK_ROUNDING * lhs.abs().max(rhs.abs()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrCertificate {
    pub r: f64,
    /// `C_ψ R`.
    pub band: f64,
    pub num_r: f64,
    pub d_r: f64,
    pub fr_r: f64,
    /// `‖f‖₂`.
    pub l2: f64,
    /// `max |P_R f|` over an oversampled grid.
    pub sup: f64,
    pub a_r: f64,
    pub c_psi: f64,
    /// `(Σ_{λ ≤ C_ψR} ψ(λ/R)²)^{1/2} / R^{d/2}`.
    pub c3: f64,
    /// `c_ψ / C₃`.
    pub c0: f64,
    /// `|E^{C₀/R}|`.
    pub support_volume: f64,
    /// `c₀ / (A_R R^{d/2} √|E^{C₀/R}|)`.
    pub lower_bound: f64,
    pub steps: Vec<ChainStep>,
}

impl FrCertificate {
    pub fn pass(&self) -> bool {
        self.steps.iter().all(|s| s.pass)
    }
}

/// Grid fine enough to resolve twice the modes of `coeffs`.
fn oversampled_grid(coeffs: &CoefficientSet) -> Result<SampleGrid> {
    let table = coeffs.table();
    match table.manifold() {
        Manifold::Torus(t) => SampleGrid::torus(t.dim(), 4 * table.max_mode() + 4),
        Manifold::Sphere => Ok(SampleGrid::sphere(2 * table.max_mode() as u32 + 2)),
    }
}

/// Runs the chain for a band-limited `f` (`E_λ f = 0` for `λ > C_ψ R`)
/// whose reconstruction `P_R f` is carried by a set of volume
/// `support_volume`.
pub fn fr_lower_certificate(f: &CoefficientSet, r: f64, window: &Window, support_volume: f64) -> Result<FrCertificate> {
    let manifold = f.table().manifold();
    if !(support_volume > 0.0 && support_volume <= manifold.volume() * (1.0 + 1e-12)) {
        return Err(Error::Domain {
            name: "support_volume",
            value: support_volume,
        });
    }
    let band = window.width() * r;
    if f.band_limit() > band * (1.0 + 1e-12) {
        return Err(Error::Hypothesis(alloc::format!(
            "f carries frequency {} above C_ψR = {band}",
            f.band_limit()
        )));
    }
    let f = f.truncate(band);
    let l2 = f.l2_norm();
    if !(l2 > 0.0) {
        return Err(Error::UndefinedRatio("f vanishes"));
    }
    let d = manifold.dim() as f64;
    let lp = lowpass_apply(&f, r, window)?;
    let grid = oversampled_grid(&f)?;
    let sup = lowpass_eval_grid(&lp.coeffs, &grid, None)?.sup;
    let a_r = growth_table(&manifold, band, band)?.a_r;
    let c3 = pairwise_sum(&lp.multipliers.iter().map(|m| m * m).collect::<Vec<_>>()).sqrt() / r.powf(d / 2.0);
    let c_psi = window.c_psi();
    let c0 = c_psi / c3;
    let fr_r = lp.num_r / lp.d_r;
    let lower_bound = c0 / (a_r * r.powf(d / 2.0) * support_volume.sqrt());
    let steps = alloc::vec![
        ChainStep::new("sup |P_R f| <= A_R Num_R", sup, a_r * lp.num_r),
        ChainStep::new("Num_R <= C3 R^(d/2) ||f||", lp.num_r, c3 * r.powf(d / 2.0) * l2),
        ChainStep::new("c_psi ||f|| <= Num_R", c_psi * l2, lp.num_r),
        ChainStep::new("||P_R f|| <= sqrt|E| sup |P_R f|", lp.d_r, support_volume.sqrt() * sup),
        ChainStep::new("c0 / (A_R R^(d/2) sqrt|E|) <= FR_R", lower_bound, fr_r),
    ];
    Ok(FrCertificate {
        r,
        band,
        num_r: lp.num_r,
        d_r: lp.d_r,
        fr_r,
        l2,
        sup,
        a_r,
        c_psi,
        c3,
        c0,
        support_volume,
        lower_bound,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyCertificate {
    pub chain: FrCertificate,
    /// Keys of the selected lines `Σ_R`, in selection order.
    pub selected: Vec<u64>,
    pub selected_lambdas: Vec<f64>,
    /// `M_R(Σ_R)`: number of selected spectral parameters.
    pub m_r: usize,
    pub eta_target: f64,
    /// `Σ_{λ ∉ Σ_R} |ψ(λ/R)| ‖E_λ f‖ / Num_R`.
    pub eta: f64,
    /// `FR_R ≤ √M_R / (1 - η)`.
    pub upper: ChainStep,
    /// `c₀²(1-η)² / (A_R² R^d) ≤ M_R |E^{C₀/R}|`.
    pub product: ChainStep,
}

impl UncertaintyCertificate {
    pub fn pass(&self) -> bool {
        self.chain.pass() && self.upper.pass && self.product.pass
    }
}

/// Greedy `Σ_R`: lines by decreasing windowed mass `|ψ(λ/R)|‖E_λ f‖`
/// (ties to the smaller `λ`) until the uncaptured share drops to
/// `eta_target`.
pub fn uncertainty_product(
    f: &CoefficientSet,
    r: f64,
    window: &Window,
    support_volume: f64,
    eta_target: f64,
) -> Result<UncertaintyCertificate> {
    if !(0.0..1.0).contains(&eta_target) {
        return Err(Error::Hypothesis(alloc::format!(
            "concentration level η = {eta_target} must lie in [0, 1)"
        )));
    }
    let chain = fr_lower_certificate(f, r, window, support_volume)?;
    let f = f.truncate(chain.band);
    let table: &Arc<_> = f.table();
    let lp = lowpass_apply(&f, r, window)?;
    let mass: Vec<f64> = lp
        .multipliers
        .iter()
        .zip(f.line_norms())
        .map(|(m, n)| m.abs() * n)
        .collect();
    let mut order: Vec<usize> = (0..mass.len()).filter(|i| mass[*i] > 0.0).collect();
    order.sort_by(|a, b| mass[*b].total_cmp(&mass[*a]).then(a.cmp(b)));
    let target = (1.0 - eta_target) * lp.num_r;
    let mut taken = Vec::new();
    let mut captured = Vec::new();
    for i in order {
        if pairwise_sum(&captured) >= target * (1.0 - 1e-15) {
            break;
        }
        taken.push(i);
        captured.push(mass[i]);
    }
    let eta = (1.0 - pairwise_sum(&captured) / lp.num_r).max(0.0);
    let m_r = taken.len();
    let d = table.manifold().dim() as f64;
    let upper = ChainStep::new(
        "FR_R <= sqrt(M_R) / (1 - eta)",
        chain.fr_r,
        (m_r as f64).sqrt() / (1.0 - eta),
    );
    let product = ChainStep::new(
        "c0^2 (1 - eta)^2 / (A_R^2 R^d) <= M_R |E|",
        (chain.c0 * (1.0 - eta)).powi(2) / (chain.a_r.powi(2) * r.powf(d)),
        m_r as f64 * support_volume,
    );
    Ok(UncertaintyCertificate {
        selected: taken.iter().map(|i| table.lines()[*i].key).collect(),
        selected_lambdas: taken.iter().map(|i| table.lines()[*i].lambda).collect(),
        m_r,
        eta_target,
        eta,
        upper,
        product,
        chain,
    })
}
