//! Manifold-agnostic spectral bookkeeping: spectrum tables, coefficient
//! sets, line projections, `ℓ̂^p` sums and Weyl counts.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::measures::ThinMeasure;
use crate::numeric::{pairwise_sum, sum_by};
use crate::sphere::{self, LegendreTable};
use crate::torus::{self, LatticeVector, TorusModel};
use crate::{Error, Result};

/// One of the implemented model manifolds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifold {
    Torus(TorusModel),
    Sphere,
}

/// Tag form of [`Manifold`], used in reports.
pub type ManifoldId = Manifold;

impl Manifold {
    pub fn torus(d: usize) -> Result<Self> {
        Ok(Manifold::Torus(TorusModel::new(d)?))
    }

    pub fn sphere() -> Self {
        Manifold::Sphere
    }

    pub fn dim(&self) -> usize {
        match self {
            Manifold::Torus(t) => t.dim(),
            Manifold::Sphere => 2,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Manifold::Torus(t) => t.volume(),
            Manifold::Sphere => sphere::AREA,
        }
    }

    /// Distance beyond which the exponential map stops being injective.
    pub fn injectivity_radius(&self) -> f64 {
        core::f64::consts::PI
    }

    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (self, a, b) {
            (Manifold::Torus(t), Point::Torus(x), Point::Torus(y)) => torus::distance(t.dim(), x, y),
            (Manifold::Sphere, Point::Sphere { .. }, Point::Sphere { .. }) => {
                sphere::chord_to_angle(sphere::chord(&a.unit_vector(), &b.unit_vector()))
            }
            _ => f64::NAN,
        }
    }

    /// Leading Weyl term `(2π)^{-d}|M||B_d|Λ^d` for this model.
    pub fn weyl_leading(&self, lambda: f64) -> f64 {
        match self {
            Manifold::Torus(t) => t.unit_ball_volume() * lambda.powi(t.dim() as i32),
            Manifold::Sphere => lambda * lambda,
        }
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Manifold::Torus(t) => write!(f, "torus{}", t.dim()),
            Manifold::Sphere => f.write_str("sphere2"),
        }
    }
}

/// A point of a model manifold. Torus coordinates beyond the dimension are
/// ignored; sphere points use colatitude `theta` and longitude `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Torus([f64; 3]),
    Sphere { theta: f64, phi: f64 },
}

impl Point {
    pub fn torus(coords: &[f64]) -> Self {
        let mut c = [0.0; 3];
        for (dst, src) in c.iter_mut().zip(coords) {
            *dst = *src;
        }
        Point::Torus(c)
    }

    pub fn sphere(theta: f64, phi: f64) -> Self {
        Point::Sphere { theta, phi }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        match *self {
            Point::Sphere { theta, phi } => sphere::unit_vector(theta, phi),
            Point::Torus(c) => c,
        }
    }
}

/// Eigenfunction label: a lattice vector on the torus, `(l, m)` on the
/// sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisLabel {
    Lattice(LatticeVector),
    Harmonic { l: u32, m: i32 },
}

impl BasisLabel {
    /// Evaluates the eigenfunction at `x`.
    pub fn eval(&self, manifold: &Manifold, x: &Point) -> Complex64 {
        match (self, manifold, x) {
            (BasisLabel::Lattice(j), Manifold::Torus(t), Point::Torus(c)) => t.eval(j, c),
            (BasisLabel::Harmonic { l, m }, Manifold::Sphere, Point::Sphere { theta, phi }) => {
                let table = LegendreTable::new(*l, theta.cos());
                Complex64::from_polar(1.0, *m as f64 * phi) * table.signed(*l, *m)
            }
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    }
}

/// One distinct frequency with a full orthonormal eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    /// Exact grouping key: `|j|²` on the torus, `l` on the sphere.
    pub key: u64,
    pub lambda: f64,
    pub basis: Vec<BasisLabel>,
}

impl SpectralLine {
    pub fn multiplicity(&self) -> usize {
        self.basis.len()
    }

    /// The degree-`l` line of the sphere.
    pub fn sphere(l: u32) -> Self {
        SpectralLine {
            key: l as u64,
            lambda: sphere::frequency(l),
            basis: (-(l as i32)..=l as i32)
                .map(|m| BasisLabel::Harmonic { l, m })
                .collect(),
        }
    }
}

/// Ordered spectrum of `√(-Δ)` up to a cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    manifold: Manifold,
    lines: Vec<SpectralLine>,
    lambda_max: f64,
}

impl SpectrumTable {
    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn lines(&self) -> &[SpectralLine] {
        &self.lines
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// The lines with `λ ≤ lambda_max`, as a table of their own.
    pub fn truncated(&self, lambda_max: f64) -> SpectrumTable {
        let cut = lambda_max.min(self.lambda_max);
        let n = self
            .lines
            .partition_point(|l| l.lambda <= cut * (1.0 + 4.0 * f64::EPSILON));
        SpectrumTable {
            manifold: self.manifold,
            lines: self.lines[..n].to_vec(),
            lambda_max: cut,
        }
    }

    /// Weyl count `N(Λ)`: number of eigenvalues with multiplicity.
    pub fn weyl_count(&self) -> usize {
        self.lines.iter().map(|l| l.multiplicity()).sum()
    }

    pub fn line_index(&self, key: u64) -> Option<usize> {
        self.lines.binary_search_by_key(&key, |l| l.key).ok()
    }

    /// Largest `|j_c|` on the torus, largest `l` on the sphere.
    pub fn max_mode(&self) -> usize {
        match self.manifold {
            Manifold::Torus(_) => self
                .lines
                .iter()
                .flat_map(|l| l.basis.iter())
                .filter_map(|b| match b {
                    BasisLabel::Lattice(j) => j.iter().map(|c| c.unsigned_abs() as usize).max(),
                    _ => None,
                })
                .max()
                .unwrap_or(0),
            Manifold::Sphere => self.lines.last().map_or(0, |l| l.key as usize),
        }
    }
}

/// Distinct spectral parameters `≤ lambda_max` with full eigenspace bases.
pub fn enumerate_spectrum(manifold: &Manifold, lambda_max: f64) -> Result<SpectrumTable> {
    if !(lambda_max >= 0.0) || !lambda_max.is_finite() {
        return Err(Error::arg("lambda_max", "must be finite and nonnegative"));
    }
    let lines = match manifold {
        Manifold::Torus(t) => torus::sum_of_squares_lines(t.dim(), lambda_max)?
            .into_iter()
            .map(|(n, vs)| SpectralLine {
                key: n,
                lambda: (n as f64).sqrt(),
                basis: vs.into_iter().map(BasisLabel::Lattice).collect(),
            })
            .collect(),
        Manifold::Sphere => (0..=sphere::max_degree(lambda_max)).map(SpectralLine::sphere).collect(),
    };
    Ok(SpectrumTable {
        manifold: *manifold,
        lines,
        lambda_max,
    })
}

/// Per-line complex coefficients `⟨u, e_j⟩` against a spectrum table.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    table: Arc<SpectrumTable>,
    values: Vec<Vec<Complex64>>,
}

impl CoefficientSet {
    pub fn new(table: Arc<SpectrumTable>, values: Vec<Vec<Complex64>>) -> Result<Self> {
        if values.len() != table.len() {
            return Err(Error::arg("values", "one vector per spectral line required"));
        }
        for (line, v) in table.lines().iter().zip(&values) {
            if v.len() != line.multiplicity() {
                return Err(Error::arg("values", "vector length must equal line multiplicity"));
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::arg("values", "coefficients must be finite"));
            }
        }
        Ok(CoefficientSet { table, values })
    }

    pub fn zeros(table: Arc<SpectrumTable>) -> Self {
        let values = table
            .lines()
            .iter()
            .map(|l| alloc::vec![Complex64::new(0.0, 0.0); l.multiplicity()])
            .collect();
        CoefficientSet { table, values }
    }

    pub fn table(&self) -> &Arc<SpectrumTable> {
        &self.table
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    pub fn line(&self, index: usize) -> &[Complex64] {
        &self.values[index]
    }

    pub fn line_mut(&mut self, index: usize) -> &mut [Complex64] {
        &mut self.values[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SpectralLine, &[Complex64])> {
        self.table.lines().iter().zip(self.values.iter().map(|v| v.as_slice()))
    }

    /// `‖E_λ u‖` for every line.
    /// Restriction to the lines with `λ ≤ lambda_max`.
    pub fn truncate(&self, lambda_max: f64) -> CoefficientSet {
        let table = Arc::new(self.table.truncated(lambda_max));
        let values = self.values[..table.len()].to_vec();
        CoefficientSet { table, values }
    }

    pub fn line_norms(&self) -> Vec<f64> {
        self.values.iter().map(|v| vector_norm(v)).collect()
    }

    /// `‖u‖_{L²}` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| vector_norm_sq(v)).collect();
        pairwise_sum(&sq).sqrt()
    }

    /// `Σ_λ ‖E_λ u‖`.
    pub fn l1_hat(&self) -> f64 {
        pairwise_sum(&self.line_norms())
    }

    /// `Σ_j a_j conj(b_j)`.
    pub fn inner(&self, other: &CoefficientSet) -> Result<Complex64> {
        self.check_same_table(other)?;
        let terms: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y.conj()).sum())
            .collect();
        Ok(complex_sum(&terms))
    }

    pub fn check_same_table(&self, other: &CoefficientSet) -> Result<()> {
        if Arc::ptr_eq(&self.table, &other.table) || self.table == other.table {
            Ok(())
        } else {
            Err(Error::ManifoldMismatch)
        }
    }

    /// Multiplies line `i` by `factors[i]`.
    pub fn scale_lines(&self, factors: &[f64]) -> CoefficientSet {
        let values = self
            .values
            .iter()
            .zip(factors)
            .map(|(v, s)| v.iter().map(|z| z * *s).collect())
            .collect();
        CoefficientSet {
            table: self.table.clone(),
            values,
        }
    }

    /// `self - other`.
    pub fn sub(&self, other: &CoefficientSet) -> Result<CoefficientSet> {
        self.check_same_table(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(CoefficientSet {
            table: self.table.clone(),
            values,
        })
    }

    /// Largest frequency carrying a nonzero coefficient.
    pub fn band_limit(&self) -> f64 {
        self.iter()
            .filter(|(_, v)| v.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
            .map(|(l, _)| l.lambda)
            .fold(0.0, f64::max)
    }

    /// Number of eigenfunction labels carrying a nonzero coefficient.
    pub fn support_size(&self) -> usize {
        self.values
            .iter()
            .flat_map(|v| v.iter())
            .filter(|z| **z != Complex64::new(0.0, 0.0))
            .count()
    }

    pub fn profile(&self, provenance: Provenance) -> SpectralProfile {
        SpectralProfile {
            entries: self
                .iter()
                .map(|(line, v)| ProfileEntry {
                    key: line.key,
                    lambda: line.lambda,
                    norm: vector_norm(v),
                })
                .collect(),
            provenance,
        }
    }
}

pub(crate) fn vector_norm_sq(v: &[Complex64]) -> f64 {
    sum_by(v.iter(), |z| z.norm_sqr())
}

pub(crate) fn vector_norm(v: &[Complex64]) -> f64 {
    vector_norm_sq(v).sqrt()
}

pub(crate) fn complex_sum(v: &[Complex64]) -> Complex64 {
    let re: Vec<f64> = v.iter().map(|z| z.re).collect();
    let im: Vec<f64> = v.iter().map(|z| z.im).collect();
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
}

/// How a coefficient was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Quadrature,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Quadrature => "quadrature",
        })
    }
}

/// Requested coefficient route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Path {
    /// Closed form when the preset has one, quadrature otherwise.
    #[default]
    Auto,
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEntry {
    pub key: u64,
    pub lambda: f64,
    /// `‖E_λ u‖_{L²}`.
    pub norm: f64,
}

/// `(λ, ‖E_λ u‖)` pairs sorted by `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    pub entries: Vec<ProfileEntry>,
    pub provenance: Provenance,
}

impl SpectralProfile {
    pub fn from_norms(entries: Vec<ProfileEntry>, provenance: Provenance) -> Self {
        SpectralProfile { entries, provenance }
    }

    pub fn norms(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.norm).collect()
    }
}

/// Projects `measure` onto one spectral line. Returns the coefficient
/// vector `⟨u, e_j⟩` over the line basis and `‖E_λ u‖`.
pub fn project(measure: &ThinMeasure, line: &SpectralLine, path: Path) -> Result<(Vec<Complex64>, f64)> {
    let (v, _) = measure.line_coefficients(line, path)?;
    let norm = vector_norm(&v);
    Ok((v, norm))
}

/// One `(λ, ‖E_λ u‖)` pair per line `≤ lambda_max`.
pub fn spectral_profile(measure: &ThinMeasure, lambda_max: f64, path: Path) -> Result<SpectralProfile> {
    let table = Arc::new(enumerate_spectrum(&measure.manifold(), lambda_max)?);
    let (coeffs, provenance) = measure.coefficients_with_provenance(&table, path)?;
    Ok(coeffs.profile(provenance))
}

/// `ℓ̂^p` sum of a truncated profile together with partial sums at dyadic
/// cutoffs, so growth can be read off directly.
#[derive(Debug, Clone, PartialEq)]
pub struct LpHatNorm {
    pub p: f64,
    /// `(Σ_λ ‖E_λ u‖^p)^{1/p}` over the whole profile.
    pub value: f64,
    /// `(cutoff, Σ_{λ ≤ cutoff} ‖E_λ u‖^p)`, cutoffs ascending and dyadic
    /// fractions of the largest frequency in the profile.
    pub partial_sums: Vec<(f64, f64)>,
}

impl LpHatNorm {
    pub fn partial_at(&self, cutoff: f64) -> Option<f64> {
        self.partial_sums
            .iter()
            .find(|(c, _)| (c - cutoff).abs() <= 1e-9 * cutoff.max(1.0))
            .map(|(_, s)| *s)
    }
}

pub fn lp_hat_norm(profile: &SpectralProfile, p: f64) -> Result<LpHatNorm> {
    lp_hat_norm_with_cutoff(profile, p, None)
}

/// As [`lp_hat_norm`] with an explicit top cutoff for the dyadic ladder.
pub fn lp_hat_norm_with_cutoff(profile: &SpectralProfile, p: f64, top: Option<f64>) -> Result<LpHatNorm> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::arg("p", "must satisfy 1 <= p < ∞"));
    }
    let powered: Vec<f64> = profile.entries.iter().map(|e| e.norm.powf(p)).collect();
    let value = pairwise_sum(&powered).powf(1.0 / p);
    let top = top.unwrap_or_else(|| profile.entries.last().map_or(0.0, |e| e.lambda));
    let smallest = profile
        .entries
        .iter()
        .find(|e| e.lambda > 0.0)
        .map_or(top, |e| e.lambda);
    let mut cutoffs = Vec::new();
    let mut c = top;
    while c >= smallest && c > 0.0 {
        cutoffs.push(c);
        c /= 2.0;
    }
    cutoffs.reverse();
    let partial_sums = cutoffs
        .into_iter()
        .map(|c| {
            let n = profile.entries.partition_point(|e| e.lambda <= c * (1.0 + 1e-12));
            (c, pairwise_sum(&powered[..n]))
        })
        .collect();
    Ok(LpHatNorm { p, value, partial_sums })
}

/// Exact count against the Weyl leading term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylReport {
    pub count: usize,
    pub predicted: f64,
    /// `(N - predicted) / predicted`; zero when both vanish.
    pub relative_deviation: f64,
}

pub fn weyl_check(table: &SpectrumTable) -> WeylReport {
    let count = table.weyl_count();
    let predicted = table.manifold().weyl_leading(table.lambda_max());
    let relative_deviation = if predicted > 0.0 {
        (count as f64 - predicted) / predicted
    } else {
        0.0
    };
    WeylReport {
        count,
        predicted,
        relative_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn torus_two_up_to_root_five() {
        let t = enumerate_spectrum(&Manifold::torus(2).unwrap(), 5f64.sqrt()).unwrap();
        let mult: Vec<usize> = t.lines().iter().map(|l| l.multiplicity()).collect();
        assert_eq!(mult, vec![1, 4, 4, 4, 8]);
        let lambdas: Vec<f64> = t.lines().iter().map(|l| l.lambda).collect();
        let expect = [0.0, 1.0, 2f64.sqrt(), 2.0, 5f64.sqrt()];
        for (a, b) in lambdas.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(t.weyl_count(), 21);
    }

    #[test]
    fn sphere_up_to_four() {
        let t = enumerate_spectrum(&Manifold::sphere(), 4.0).unwrap();
        let mult: Vec<usize> = t.lines().iter().map(|l| l.multiplicity()).collect();
        assert_eq!(mult, vec![1, 3, 5, 7]);
        for (l, line) in t.lines().iter().enumerate() {
            assert!((line.lambda - ((l * (l + 1)) as f64).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_cutoff_is_constants_only() {
        for m in [
            Manifold::torus(1).unwrap(),
            Manifold::torus(3).unwrap(),
            Manifold::sphere(),
        ] {
            let t = enumerate_spectrum(&m, 0.0).unwrap();
            assert_eq!(t.len(), 1);
            assert_eq!(t.lines()[0].multiplicity(), 1);
            assert_eq!(t.lines()[0].lambda, 0.0);
            assert_eq!(weyl_check(&t).count, 1);
        }
    }

    #[test]
    fn negative_cutoff_rejected() {
        assert!(matches!(
            enumerate_spectrum(&Manifold::sphere(), -1.0),
            Err(Error::InvalidArgument { name: "lambda_max", .. })
        ));
    }

    #[test]
    fn lines_strictly_increasing() {
        let t = enumerate_spectrum(&Manifold::torus(3).unwrap(), 7.5).unwrap();
        assert!(t.lines().windows(2).all(|w| w[0].lambda < w[1].lambda));
        assert!(t.lines().iter().all(|l| l.multiplicity() >= 1));
    }

    fn profile(norms: &[(f64, f64)]) -> SpectralProfile {
        SpectralProfile::from_norms(
            norms
                .iter()
                .enumerate()
                .map(|(i, (l, n))| ProfileEntry {
                    key: i as u64,
                    lambda: *l,
                    norm: *n,
                })
                .collect(),
            Provenance::ClosedForm,
        )
    }

    #[test]
    fn lp_hat_single_line() {
        let p = profile(&[(3.0, 0.7)]);
        for q in [1.0, 2.0, 3.5, 10.0] {
            assert!((lp_hat_norm(&p, q).unwrap().value - 0.7).abs() < 1e-15);
        }
        assert!(lp_hat_norm(&p, 0.5).is_err());
    }

    #[test]
    fn lp_hat_partial_sums_are_dyadic() {
        let p = profile(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (3.0, 1.0), (4.0, 1.0)]);
        let n = lp_hat_norm(&p, 2.0).unwrap();
        let cut: Vec<f64> = n.partial_sums.iter().map(|c| c.0).collect();
        assert_eq!(cut, vec![1.0, 2.0, 4.0]);
        assert_eq!(n.partial_at(2.0), Some(3.0));
        assert_eq!(n.partial_at(4.0), Some(5.0));
    }

    #[test]
    fn weyl_gauss_circle_constant() {
        let t = enumerate_spectrum(&Manifold::torus(2).unwrap(), 100.0).unwrap();
        let w = weyl_check(&t);
        assert!((w.count as f64 / 1e4 - core::f64::consts::PI).abs() <= 0.05);
    }

    #[test]
    fn weyl_sphere_exact() {
        for l in [0u32, 1, 5, 30] {
            let t = enumerate_spectrum(&Manifold::sphere(), sphere::frequency(l)).unwrap();
            assert_eq!(t.weyl_count(), ((l + 1) * (l + 1)) as usize);
        }
    }

    #[test]
    fn coefficient_set_validation() {
        let t = Arc::new(enumerate_spectrum(&Manifold::sphere(), 2.0).unwrap());
        assert!(CoefficientSet::new(t.clone(), vec![vec![Complex64::new(1.0, 0.0)]]).is_err());
        let bad = vec![vec![Complex64::new(f64::NAN, 0.0)], vec![Complex64::new(0.0, 0.0); 3]];
        assert!(CoefficientSet::new(t.clone(), bad).is_err());
        let z = CoefficientSet::zeros(t);
        assert_eq!(z.l2_norm(), 0.0);
        assert_eq!(z.support_size(), 0);
    }
}
