//! Thinly supported measures: presets, coefficient routes and
//! δ-neighbourhood volumes.
//!
//! Curve measures use unnormalized arclength (total mass = length), so the
//! S² equator has mass `2π` and `⟨u, Y_l^0⟩ = 2π Y_l^0(π/2)`.

mod minkowski;
mod nearest;
mod support;

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::numeric::{gauss_legendre_on, pairwise_sum};
use crate::spectrum::{
    complex_sum, BasisLabel, CoefficientSet, Manifold, Path, Point, Provenance, SpectralLine, SpectrumTable,
};
use crate::sphere::{self, LegendreTable};
use crate::{Error, Result};

pub use minkowski::{minkowski_volume, VolumeEstimate, MIN_SAMPLES};
pub use nearest::NearestGrid;
pub use support::SupportDistance;

/// Successive quadrature refinements must agree to this absolute level
/// (scaled by the largest coefficient when that exceeds one).
pub const QUADRATURE_AGREEMENT: f64 = 1e-9;
/// Node budget for adaptive curve quadrature.
pub const MAX_QUADRATURE_NODES: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub point: Point,
    pub weight: f64,
}

/// Smooth density `1 + amplitude · cos(2π · frequency · s)` along a curve,
/// `s ∈ [0, 1]` the normalized curve parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density {
    pub amplitude: f64,
    pub frequency: u32,
}

impl Density {
    pub fn at(&self, s: f64) -> f64 {
        1.0 + self.amplitude * (TAU * self.frequency as f64 * s).cos()
    }

    /// `∫_0^1` of the density.
    fn mean(&self) -> f64 {
        if self.frequency == 0 {
            1.0 + self.amplitude
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    /// `{x : x_c = offset_c for c ≥ k}` with k-dimensional Lebesgue measure.
    Subtorus { k: usize, offset: [f64; 3] },
    /// Straight segment from `start` to `end` in the universal cover.
    Segment { start: [f64; 3], end: [f64; 3] },
    /// `{(t, t², …, t^d) : t ∈ [0, 1]}` with arclength.
    MomentCurve,
    /// Weighted point masses.
    Atoms(Vec<Atom>),
    /// Level-`level` product of middle-thirds Cantor sets on `[0, π]^d`,
    /// atoms at the left endpoints, equal weights summing to one.
    ProductCantor { level: u32 },
    /// The great circle `θ = π/2`.
    Equator,
    /// The circle `θ = colatitude`.
    Latitude { colatitude: f64 },
}

/// Descriptor accepted by [`make_measure`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub manifold: Manifold,
    pub preset: Preset,
    pub density: Option<Density>,
}

impl MeasureSpec {
    pub fn new(manifold: Manifold, preset: Preset) -> Self {
        MeasureSpec {
            manifold,
            preset,
            density: None,
        }
    }

    pub fn with_density(mut self, density: Density) -> Self {
        self.density = Some(density);
        self
    }
}

/// A measure carried by a thin set, with its nominal dimension and mass.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinMeasure {
    manifold: Manifold,
    preset: Preset,
    density: Option<Density>,
    nominal_dim: f64,
    total_mass: f64,
}

pub const MAX_CANTOR_ATOMS: usize = 1 << 16;

pub fn make_measure(spec: MeasureSpec) -> Result<ThinMeasure> {
    let MeasureSpec {
        manifold,
        preset,
        density,
    } = spec;
    let d = manifold.dim();
    let torus_only = |name: &'static str| -> Result<()> {
        match manifold {
            Manifold::Torus(_) => Ok(()),
            Manifold::Sphere => Err(Error::arg(name, "preset lives on the torus")),
        }
    };
    let nominal_dim = match &preset {
        Preset::Subtorus { k, .. } => {
            torus_only("subtorus")?;
            if *k == 0 {
                return Err(Error::arg("k", "subtorus dimension must be at least 1; use atoms"));
            }
            *k as f64
        }
        Preset::Segment { start, end } => {
            torus_only("segment")?;
            if start[..d] == end[..d] {
                return Err(Error::arg("segment", "endpoints must differ"));
            }
            1.0
        }
        Preset::MomentCurve => {
            torus_only("moment-curve")?;
            1.0
        }
        Preset::Atoms(atoms) => {
            for a in atoms {
                match (manifold, a.point) {
                    (Manifold::Torus(_), Point::Torus(_)) => {}
                    (Manifold::Sphere, Point::Sphere { theta, .. }) if (0.0..=PI).contains(&theta) => {}
                    _ => return Err(Error::arg("atoms", "atom point does not belong to the manifold")),
                }
                if !a.weight.is_finite() {
                    return Err(Error::arg("atoms", "weights must be finite"));
                }
            }
            0.0
        }
        Preset::ProductCantor { level } => {
            torus_only("product-cantor")?;
            if (1usize << (*level as usize * d).min(63)) > MAX_CANTOR_ATOMS {
                return Err(Error::arg("level", "too many Cantor atoms"));
            }
            d as f64 * 2f64.ln() / 3f64.ln()
        }
        Preset::Equator => {
            if manifold != Manifold::Sphere {
                return Err(Error::arg("equator", "preset lives on the sphere"));
            }
            1.0
        }
        Preset::Latitude { colatitude } => {
            if manifold != Manifold::Sphere {
                return Err(Error::arg("latitude", "preset lives on the sphere"));
            }
            if !(*colatitude > 0.0 && *colatitude < PI) {
                return Err(Error::arg("colatitude", "must lie strictly between 0 and π"));
            }
            1.0
        }
    };
    if nominal_dim >= d as f64 {
        return Err(Error::NotThin { k: nominal_dim, d });
    }
    if let Some(den) = &density {
        let curve = matches!(
            preset,
            Preset::Segment { .. } | Preset::MomentCurve | Preset::Equator | Preset::Latitude { .. }
        ) || matches!(preset, Preset::Subtorus { k: 1, .. });
        if !curve {
            return Err(Error::arg("density", "densities are supported on curves only"));
        }
        if !(den.amplitude.abs() < 1.0) {
            return Err(Error::arg(
                "density",
                "amplitude must lie in (-1, 1) to keep the density positive",
            ));
        }
    }
    let mut m = ThinMeasure {
        manifold,
        preset,
        density,
        nominal_dim,
        total_mass: 0.0,
    };
    m.total_mass = m.compute_total_mass();
    Ok(m)
}

/// `⟨u, e_j⟩` for every label of `table`, closed form when available.
pub fn coefficients(measure: &ThinMeasure, table: &Arc<SpectrumTable>) -> Result<CoefficientSet> {
    measure.coefficients_with_provenance(table, Path::Auto).map(|(c, _)| c)
}

impl ThinMeasure {
    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn preset(&self) -> &Preset {
        &self.preset
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    pub fn nominal_dim(&self) -> f64 {
        self.nominal_dim
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_empty(&self) -> bool {
        matches!(&self.preset, Preset::Atoms(a) if a.is_empty())
    }

    /// Whether a closed-form coefficient rule is attached.
    pub fn has_closed_form(&self) -> bool {
        self.density.is_none() && !matches!(self.preset, Preset::MomentCurve)
    }

    /// Point masses of an atomic preset (atoms and Cantor sets).
    pub fn atoms(&self) -> Option<Vec<Atom>> {
        match &self.preset {
            Preset::Atoms(a) => Some(a.clone()),
            Preset::ProductCantor { level } => Some(cantor_atoms(self.manifold.dim(), *level)),
            _ => None,
        }
    }

    /// Length of the curve (or `k`-volume of the subtorus); zero for atoms.
    pub fn support_size(&self) -> f64 {
        match &self.preset {
            Preset::Subtorus { k, .. } => TAU.powi(*k as i32),
            Preset::Segment { start, end } => seg_len(self.manifold.dim(), start, end),
            Preset::MomentCurve => moment_length(self.manifold.dim()),
            Preset::Equator => TAU,
            Preset::Latitude { colatitude } => TAU * colatitude.sin(),
            Preset::Atoms(_) | Preset::ProductCantor { .. } => 0.0,
        }
    }

    fn compute_total_mass(&self) -> f64 {
        if let Some(atoms) = self.atoms() {
            return pairwise_sum(&atoms.iter().map(|a| a.weight).collect::<Vec<_>>());
        }
        let base = self.support_size();
        match (&self.preset, &self.density) {
            (_, None) => base,
            (Preset::MomentCurve, Some(_)) => {
                let rule = self.curve_rule(4096);
                pairwise_sum(&rule.iter().map(|(_, w)| *w).collect::<Vec<_>>())
            }
            (_, Some(den)) => base * den.mean(),
        }
    }

    fn density_at(&self, s: f64) -> f64 {
        self.density.map_or(1.0, |d| d.at(s))
    }

    /// Nodes and weights of a quadrature rule along the support with
    /// resolution parameter `n` (nodes per unit direction).
    pub(crate) fn curve_rule(&self, n: usize) -> Vec<(Point, f64)> {
        let d = self.manifold.dim();
        match &self.preset {
            Preset::Subtorus { k, offset } => {
                let h = TAU / n as f64;
                let total = n.pow(*k as u32);
                (0..total)
                    .map(|mut idx| {
                        let mut c = *offset;
                        for axis in (0..*k).rev() {
                            c[axis] = h * (idx % n) as f64;
                            idx /= n;
                        }
                        let s = c[0] / TAU;
                        (Point::Torus(c), h.powi(*k as i32) * self.density_at(s))
                    })
                    .collect()
            }
            Preset::Segment { start, end } => {
                let len = seg_len(d, start, end);
                let (t, w) = gauss_legendre_on(n, 0.0, 1.0);
                t.iter()
                    .zip(&w)
                    .map(|(t, w)| {
                        let mut c = [0.0; 3];
                        for axis in 0..d {
                            c[axis] = start[axis] + t * (end[axis] - start[axis]);
                        }
                        (Point::Torus(c), w * len * self.density_at(*t))
                    })
                    .collect()
            }
            Preset::MomentCurve => {
                let (t, w) = gauss_legendre_on(n, 0.0, 1.0);
                t.iter()
                    .zip(&w)
                    .map(|(t, w)| {
                        (
                            Point::Torus(moment_point(d, *t)),
                            w * moment_speed(d, *t) * self.density_at(*t),
                        )
                    })
                    .collect()
            }
            Preset::Equator | Preset::Latitude { .. } => {
                let theta = self.circle_colatitude();
                let h = TAU / n as f64;
                (0..n)
                    .map(|i| {
                        let phi = h * i as f64;
                        (
                            Point::Sphere { theta, phi },
                            h * theta.sin() * self.density_at(phi / TAU),
                        )
                    })
                    .collect()
            }
            Preset::Atoms(_) | Preset::ProductCantor { .. } => self
                .atoms()
                .unwrap_or_default()
                .into_iter()
                .map(|a| (a.point, a.weight))
                .collect(),
        }
    }

    fn circle_colatitude(&self) -> f64 {
        match self.preset {
            Preset::Latitude { colatitude } => colatitude,
            _ => PI / 2.0,
        }
    }

    /// Initial resolution for a band reaching frequency `lambda`.
    fn initial_nodes(&self, lambda: f64) -> usize {
        let length = match &self.preset {
            Preset::Subtorus { .. } => TAU,
            _ => self.support_size(),
        };
        let n = (8.0 * lambda * length / TAU).ceil() as usize;
        let mode = lambda.floor() as usize;
        n.max(16).max(2 * mode + 2)
    }

    fn is_exact_sum(&self) -> bool {
        matches!(self.preset, Preset::Atoms(_) | Preset::ProductCantor { .. })
    }

    /// Coefficients for one line.
    pub fn line_coefficients(&self, line: &SpectralLine, path: Path) -> Result<(Vec<Complex64>, Provenance)> {
        self.check_labels(&line.basis)?;
        let use_closed = match path {
            Path::Auto => self.has_closed_form(),
            Path::ClosedForm => {
                if !self.has_closed_form() {
                    return Err(Error::arg("path", "preset has no closed-form coefficients"));
                }
                true
            }
            Path::Quadrature => false,
        };
        if use_closed {
            return Ok((self.closed_form(line), Provenance::ClosedForm));
        }
        let lines = core::slice::from_ref(line);
        let v = self.quadrature_lines(lines, line.lambda)?;
        Ok((v.into_iter().next().unwrap_or_default(), Provenance::Quadrature))
    }

    /// Coefficients over a whole table.
    pub fn coefficients_with_provenance(
        &self,
        table: &Arc<SpectrumTable>,
        path: Path,
    ) -> Result<(CoefficientSet, Provenance)> {
        if table.manifold() != self.manifold {
            return Err(Error::ManifoldMismatch);
        }
        let use_closed = match path {
            Path::Auto => self.has_closed_form(),
            Path::ClosedForm => {
                if !self.has_closed_form() {
                    return Err(Error::arg("path", "preset has no closed-form coefficients"));
                }
                true
            }
            Path::Quadrature => false,
        };
        let (values, prov) = if use_closed {
            let v = table.lines().iter().map(|l| self.closed_form(l)).collect();
            (v, Provenance::ClosedForm)
        } else {
            let lam = table.lines().last().map_or(0.0, |l| l.lambda);
            (self.quadrature_lines(table.lines(), lam)?, Provenance::Quadrature)
        };
        Ok((CoefficientSet::new(table.clone(), values)?, prov))
    }

    fn check_labels(&self, basis: &[BasisLabel]) -> Result<()> {
        let ok = basis.iter().all(|b| {
            matches!(
                (b, self.manifold),
                (BasisLabel::Lattice(_), Manifold::Torus(_)) | (BasisLabel::Harmonic { .. }, Manifold::Sphere)
            )
        });
        if ok {
            Ok(())
        } else {
            Err(Error::ManifoldMismatch)
        }
    }

    fn closed_form(&self, line: &SpectralLine) -> Vec<Complex64> {
        let d = self.manifold.dim();
        let zero = Complex64::new(0.0, 0.0);
        match (&self.preset, self.manifold) {
            (Preset::Subtorus { k, offset }, Manifold::Torus(t)) => {
                let scale = TAU.powi(*k as i32) * t.amplitude();
                line.basis
                    .iter()
                    .map(|b| match b {
                        BasisLabel::Lattice(j) if j[..*k].iter().all(|c| *c == 0) => {
                            let phase: f64 = (*k..d).map(|c| j[c] as f64 * offset[c]).sum();
                            Complex64::from_polar(scale, -phase)
                        }
                        _ => zero,
                    })
                    .collect()
            }
            (Preset::Segment { start, end }, Manifold::Torus(t)) => {
                let len = seg_len(d, start, end);
                line.basis
                    .iter()
                    .map(|b| match b {
                        BasisLabel::Lattice(j) => {
                            let a: f64 = (0..d).map(|c| j[c] as f64 * start[c]).sum();
                            let th: f64 = (0..d).map(|c| j[c] as f64 * (end[c] - start[c])).sum();
                            Complex64::from_polar(t.amplitude() * len, -a) * unit_interval_exp(th)
                        }
                        _ => zero,
                    })
                    .collect()
            }
            (Preset::Equator | Preset::Latitude { .. }, Manifold::Sphere) => {
                let theta = self.circle_colatitude();
                let zonal_coeff = TAU * theta.sin() * sphere::zonal(line.key as u32, theta.cos());
                line.basis
                    .iter()
                    .map(|b| match b {
                        BasisLabel::Harmonic { m: 0, .. } => Complex64::new(zonal_coeff, 0.0),
                        _ => zero,
                    })
                    .collect()
            }
            _ => {
                let atoms = self.atoms().unwrap_or_default();
                self.pair_with_nodes(
                    core::slice::from_ref(line),
                    &atoms.iter().map(|a| (a.point, a.weight)).collect::<Vec<_>>(),
                )
                .into_iter()
                .next()
                .unwrap_or_default()
            }
        }
    }

    /// `Σ_nodes w · conj(e_j(x))` for every label of `lines`.
    fn pair_with_nodes(&self, lines: &[SpectralLine], nodes: &[(Point, f64)]) -> Vec<Vec<Complex64>> {
        let zero = Complex64::new(0.0, 0.0);
        match self.manifold {
            Manifold::Torus(t) => {
                let d = t.dim();
                let jmax = lines
                    .iter()
                    .flat_map(|l| l.basis.iter())
                    .filter_map(|b| match b {
                        BasisLabel::Lattice(j) => j.iter().map(|c| c.unsigned_abs()).max(),
                        _ => None,
                    })
                    .max()
                    .unwrap_or(0) as i64;
                let width = (2 * jmax + 1) as usize;
                let mut terms: Vec<Vec<Vec<Complex64>>> = lines
                    .iter()
                    .map(|l| alloc::vec![Vec::with_capacity(nodes.len()); l.multiplicity()])
                    .collect();
                let mut tw = alloc::vec![zero; 3 * width];
                for (p, w) in nodes {
                    let x = match p {
                        Point::Torus(c) => c,
                        _ => continue,
                    };
                    for axis in 0..d {
                        for (i, slot) in tw[axis * width..(axis + 1) * width].iter_mut().enumerate() {
                            let jc = i as i64 - jmax;
                            *slot = Complex64::from_polar(1.0, -(jc as f64) * x[axis]);
                        }
                    }
                    for (line, dst) in lines.iter().zip(terms.iter_mut()) {
                        for (b, acc) in line.basis.iter().zip(dst.iter_mut()) {
                            if let BasisLabel::Lattice(j) = b {
                                let mut z = Complex64::new(*w * t.amplitude(), 0.0);
                                for axis in 0..d {
                                    z *= tw[axis * width + (j[axis] as i64 + jmax) as usize];
                                }
                                acc.push(z);
                            }
                        }
                    }
                }
                terms
                    .iter()
                    .map(|line| line.iter().map(|v| complex_sum(v)).collect())
                    .collect()
            }
            Manifold::Sphere => {
                let lmax = lines.iter().map(|l| l.key as u32).max().unwrap_or(0);
                let mut terms: Vec<Vec<Vec<Complex64>>> = lines
                    .iter()
                    .map(|l| alloc::vec![Vec::with_capacity(nodes.len()); l.multiplicity()])
                    .collect();
                for (p, w) in nodes {
                    let (theta, phi) = match p {
                        Point::Sphere { theta, phi } => (*theta, *phi),
                        _ => continue,
                    };
                    let table = LegendreTable::new(lmax, theta.cos());
                    for (line, dst) in lines.iter().zip(terms.iter_mut()) {
                        for (b, acc) in line.basis.iter().zip(dst.iter_mut()) {
                            if let BasisLabel::Harmonic { l, m } = b {
                                let r = table.signed(*l, *m) * *w;
                                acc.push(Complex64::from_polar(r, -(*m as f64) * phi));
                            }
                        }
                    }
                }
                terms
                    .iter()
                    .map(|line| line.iter().map(|v| complex_sum(v)).collect())
                    .collect()
            }
        }
    }

    /// Adaptive quadrature: double the node count until two successive
    /// refinements agree to [`QUADRATURE_AGREEMENT`].
    fn quadrature_lines(&self, lines: &[SpectralLine], lambda: f64) -> Result<Vec<Vec<Complex64>>> {
        for line in lines {
            self.check_labels(&line.basis)?;
        }
        if self.is_exact_sum() {
            let nodes = self.curve_rule(0);
            return Ok(self.pair_with_nodes(lines, &nodes));
        }
        let mut n = self.initial_nodes(lambda);
        let k = match self.preset {
            Preset::Subtorus { k, .. } => k as u32,
            _ => 1,
        };
        let mut prev = self.pair_with_nodes(lines, &self.curve_rule(n));
        loop {
            let next_n = 2 * n;
            if next_n.pow(k) > MAX_QUADRATURE_NODES {
                return Err(Error::Resolution {
                    what: "curve quadrature nodes",
                    required: next_n.pow(k),
                    available: MAX_QUADRATURE_NODES,
                });
            }
            let next = self.pair_with_nodes(lines, &self.curve_rule(next_n));
            let mut diff: f64 = 0.0;
            let mut scale: f64 = 1.0;
            for (a, b) in prev.iter().zip(&next) {
                for (x, y) in a.iter().zip(b) {
                    diff = diff.max((x - y).norm());
                    scale = scale.max(y.norm());
                }
            }
            if diff <= QUADRATURE_AGREEMENT * scale {
                return Ok(next);
            }
            prev = next;
            n = next_n;
        }
    }

    /// Points on the support, roughly uniform in arclength.
    pub fn support_sample(&self, count: usize) -> Vec<Point> {
        let d = self.manifold.dim();
        let count = count.max(1);
        match &self.preset {
            Preset::Subtorus { k, offset } => {
                let per = (count as f64).powf(1.0 / *k as f64).ceil().max(1.0) as usize;
                let total = per.pow(*k as u32);
                (0..total)
                    .map(|mut idx| {
                        let mut c = *offset;
                        for axis in (0..*k).rev() {
                            c[axis] = TAU * ((idx % per) as f64 + 0.5) / per as f64;
                            idx /= per;
                        }
                        Point::Torus(c)
                    })
                    .collect()
            }
            Preset::Segment { start, end } => (0..count)
                .map(|i| {
                    let t = (i as f64 + 0.5) / count as f64;
                    let mut c = [0.0; 3];
                    for axis in 0..d {
                        c[axis] = start[axis] + t * (end[axis] - start[axis]);
                    }
                    Point::Torus(c)
                })
                .collect(),
            Preset::MomentCurve => {
                let table = arclength_table(d, 4096);
                let total = *table.last().unwrap_or(&0.0);
                (0..count)
                    .map(|i| {
                        let target = total * (i as f64 + 0.5) / count as f64;
                        Point::Torus(moment_point(d, invert_arclength(&table, target)))
                    })
                    .collect()
            }
            Preset::Equator | Preset::Latitude { .. } => {
                let theta = self.circle_colatitude();
                (0..count)
                    .map(|i| Point::Sphere {
                        theta,
                        phi: TAU * (i as f64 + 0.5) / count as f64,
                    })
                    .collect()
            }
            Preset::Atoms(_) | Preset::ProductCantor { .. } => {
                self.atoms().unwrap_or_default().into_iter().map(|a| a.point).collect()
            }
        }
    }
}

fn seg_len(d: usize, a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..d).map(|c| (b[c] - a[c]).powi(2)).sum::<f64>().sqrt()
}

/// `∫_0^1 e^{-iθu} du`.
fn unit_interval_exp(theta: f64) -> Complex64 {
    if theta.abs() < 1e-4 {
        let t2 = theta * theta;
        Complex64::new(1.0 - t2 / 6.0 + t2 * t2 / 120.0, -theta / 2.0 + theta * t2 / 24.0)
    } else {
        (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -theta)) / Complex64::new(0.0, theta)
    }
}

pub(crate) fn moment_point(d: usize, t: f64) -> [f64; 3] {
    let mut c = [0.0; 3];
    let mut p = 1.0;
    for slot in c.iter_mut().take(d) {
        p *= t;
        *slot = p;
    }
    c
}

fn moment_speed(d: usize, t: f64) -> f64 {
    let mut s = 0.0;
    for i in 1..=d {
        let v = i as f64 * t.powi(i as i32 - 1);
        s += v * v;
    }
    s.sqrt()
}

fn moment_length(d: usize) -> f64 {
    let (t, w) = gauss_legendre_on(64, 0.0, 1.0);
    pairwise_sum(
        &t.iter()
            .zip(&w)
            .map(|(t, w)| w * moment_speed(d, *t))
            .collect::<Vec<_>>(),
    )
}

/// Cumulative arclength at `t = i / n`, `i = 0..=n`.
fn arclength_table(d: usize, n: usize) -> Vec<f64> {
    let (gt, gw) = gauss_legendre_on(8, 0.0, 1.0);
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for i in 0..n {
        let a = i as f64 / n as f64;
        let h = 1.0 / n as f64;
        let seg: f64 = gt
            .iter()
            .zip(&gw)
            .map(|(t, w)| w * h * moment_speed(d, a + h * t))
            .sum();
        acc += seg;
        out.push(acc);
    }
    out
}

fn invert_arclength(table: &[f64], target: f64) -> f64 {
    let n = table.len() - 1;
    let i = table.partition_point(|s| *s < target).clamp(1, n);
    let (s0, s1) = (table[i - 1], table[i]);
    let frac = if s1 > s0 { (target - s0) / (s1 - s0) } else { 0.0 };
    ((i - 1) as f64 + frac) / n as f64
}

fn cantor_points(level: u32) -> Vec<f64> {
    let mut pts = alloc::vec![0.0];
    let mut scale = PI;
    for _ in 0..level {
        scale /= 3.0;
        let shifted: Vec<f64> = pts.iter().map(|p| p + 2.0 * scale).collect();
        pts.extend(shifted);
    }
    pts.sort_by(f64::total_cmp);
    pts
}

fn cantor_atoms(d: usize, level: u32) -> Vec<Atom> {
    let axis = cantor_points(level);
    let count = axis.len().pow(d as u32);
    let weight = 1.0 / count as f64;
    (0..count)
        .map(|mut idx| {
            let mut c = [0.0; 3];
            for slot in c.iter_mut().take(d).rev() {
                *slot = axis[idx % axis.len()];
                idx /= axis.len();
            }
            Atom {
                point: Point::Torus(c),
                weight,
            }
        })
        .collect()
}
