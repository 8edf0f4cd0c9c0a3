//! The unit 2-sphere: Legendre functions, complex spherical harmonics and
//! a band-exact product quadrature.
//!
//! Harmonics are orthonormal for the surface measure (total area `4π`) and
//! carry the Condon–Shortley phase. Associated Legendre values are produced
//! by normalized recurrences so that degrees in the thousands stay finite.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::numeric::gauss_legendre;
use crate::{Error, Result};

pub const AREA: f64 = 4.0 * PI;

/// `λ_l = √(l(l+1))`.
pub fn frequency(l: u32) -> f64 {
    let l = l as f64;
    (l * (l + 1.0)).sqrt()
}

/// Largest degree whose frequency does not exceed `lambda_max`.
pub(crate) fn max_degree(lambda_max: f64) -> u32 {
    let admit = |l: u32| frequency(l) <= lambda_max * (1.0 + 4.0 * f64::EPSILON);
    let mut l = lambda_max.max(0.0).floor() as u32;
    while admit(l + 1) {
        l += 1;
    }
    while l > 0 && !admit(l) {
        l -= 1;
    }
    l
}

/// Legendre polynomial `P_l(x)` by the three-term recurrence.
pub fn legendre_p(l: u32, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain { name: "x", value: x });
    }
    if l == 0 {
        return Ok(1.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..l {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

/// Normalized zonal value `√((2l+1)/4π) P_l(x)`, i.e. `Y_l^0` at `cos θ = x`.
pub fn zonal(l: u32, x: f64) -> f64 {
    let mut p0 = 1.0 / AREA.sqrt();
    if l == 0 {
        return p0;
    }
    let mut p1 = 3.0f64.sqrt() * x * p0;
    for k in 2..=l {
        let kf = k as f64;
        let a = ((4.0 * kf * kf - 1.0) / (kf * kf)).sqrt();
        let km = kf - 1.0;
        let b = (km * km / (4.0 * km * km - 1.0)).sqrt();
        let p2 = a * (x * p1 - b * p0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Table of normalized associated Legendre values `P̄_l^m(x)` for
/// `0 ≤ m ≤ l ≤ L`, such that `Y_l^m(θ, φ) = P̄_l^m(cos θ) e^{imφ}`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    max_degree: u32,
    values: Vec<f64>,
}

impl LegendreTable {
    pub fn new(max_degree: u32, x: f64) -> Self {
        let lmax = max_degree as usize;
        let mut values = alloc::vec![0.0; (lmax + 1) * (lmax + 2) / 2];
        let s = (1.0 - x * x).max(0.0).sqrt();
        let mut pmm = 1.0 / AREA.sqrt();
        for m in 0..=lmax {
            if m > 0 {
                let mf = m as f64;
                pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
            }
            values[idx(m, m)] = pmm;
            if m == lmax {
                break;
            }
            let mf = m as f64;
            let mut p0 = pmm;
            let mut p1 = (2.0 * mf + 3.0).sqrt() * x * pmm;
            values[idx(m + 1, m)] = p1;
            for l in m + 2..=lmax {
                let lf = l as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let lm = lf - 1.0;
                let b = ((lm * lm - mf * mf) / (4.0 * lm * lm - 1.0)).sqrt();
                let p2 = a * (x * p1 - b * p0);
                values[idx(l, m)] = p2;
                p0 = p1;
                p1 = p2;
            }
        }
        LegendreTable { max_degree, values }
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// `P̄_l^m` for `0 ≤ m ≤ l`.
    pub fn get(&self, l: u32, m: u32) -> f64 {
        self.values[idx(l as usize, m as usize)]
    }

    /// Real factor of `Y_l^m` for signed `m`: `Y_l^m = factor · e^{imφ}`.
    pub fn signed(&self, l: u32, m: i32) -> f64 {
        let v = self.get(l, m.unsigned_abs());
        if m < 0 && m % 2 != 0 {
            -v
        } else {
            v
        }
    }
}

fn idx(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// `Y_l^m(θ, φ)` with `θ` the colatitude.
pub fn sph_harm(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::arg("m", "order must satisfy |m| <= l"));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::arg("theta", "colatitude must lie in [0, π]"));
    }
    let table = LegendreTable::new(l, theta.cos());
    let r = table.signed(l, m);
    Ok(Complex64::from_polar(1.0, m as f64 * phi) * r)
}

/// Unit vector of the point with colatitude `theta` and longitude `phi`.
pub fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    let s = theta.sin();
    [s * phi.cos(), s * phi.sin(), theta.cos()]
}

/// Great-circle distance between two points given as `(θ, φ)`.
pub fn great_circle(a: (f64, f64), b: (f64, f64)) -> f64 {
    let u = unit_vector(a.0, a.1);
    let v = unit_vector(b.0, b.1);
    chord_to_angle(chord(&u, &v))
}

pub(crate) fn chord(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    let dx = u[0] - v[0];
    let dy = u[1] - v[1];
    let dz = u[2] - v[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

pub(crate) fn chord_to_angle(c: f64) -> f64 {
    2.0 * (0.5 * c).min(1.0).asin()
}

/// Gauss–Legendre in `cos θ` times a uniform longitude grid. With `L + 1`
/// latitude nodes and `2L + 1` longitudes it integrates every product
/// `Y_l^m conj(Y_{l'}^{m'})` with `l, l' ≤ L` exactly.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    degree: u32,
    cos_theta: Vec<f64>,
    theta: Vec<f64>,
    lat_weights: Vec<f64>,
    n_phi: usize,
}

impl SphereQuadrature {
    pub fn new(degree: u32) -> Self {
        let (x, w) = gauss_legendre(degree as usize + 1);
        let theta = x.iter().map(|c| c.acos()).collect();
        SphereQuadrature {
            degree,
            cos_theta: x,
            theta,
            lat_weights: w,
            n_phi: 2 * degree as usize + 1,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_theta
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.theta[i]
    }

    pub fn phi(&self, k: usize) -> f64 {
        TAU * k as f64 / self.n_phi as f64
    }

    /// Longitude weight `2π / n_φ`.
    pub fn phi_weight(&self) -> f64 {
        TAU / self.n_phi as f64
    }

    pub fn lat_weight(&self, i: usize) -> f64 {
        self.lat_weights[i]
    }

    /// Node `(θ, φ)` and weight, row-major in `(θ, φ)`.
    pub fn node(&self, index: usize) -> ((f64, f64), f64) {
        let i = index / self.n_phi;
        let k = index % self.n_phi;
        ((self.theta[i], self.phi(k)), self.lat_weights[i] * self.phi_weight())
    }
}

/// Exactness-`L` product rule on the sphere.
pub fn sphere_quadrature(degree: u32) -> SphereQuadrature {
    SphereQuadrature::new(degree)
}

/// Diagonal of the degree-`l` projection kernel, `Σ_m |Y_l^m(x)|²`.
pub fn kernel_diagonal(table: &LegendreTable, l: u32) -> f64 {
    let mut s = table.get(l, 0).powi(2);
    for m in 1..=l {
        s += 2.0 * table.get(l, m).powi(2);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `(-1)^{l/2} (l-1)!!/l!!` as a product of ratios.
    fn p_at_zero(l: u32) -> f64 {
        if l % 2 == 1 {
            return 0.0;
        }
        let mut v = 1.0;
        for i in 1..=l / 2 {
            v *= (2 * i - 1) as f64 / (2 * i) as f64;
        }
        if (l / 2) % 2 == 1 {
            -v
        } else {
            v
        }
    }

    #[test]
    fn legendre_basic_values() {
        assert!((legendre_p(2, 0.0).unwrap() + 0.5).abs() < 1e-15);
        for l in 0..200 {
            assert!((legendre_p(l, 1.0).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(legendre_p(3, 1.5), Err(Error::Domain { .. })));
        assert!(legendre_p(3, f64::NAN).is_err());
    }

    #[test]
    fn legendre_at_zero_matches_double_factorial() {
        for l in (0..=2000).step_by(2) {
            let r = legendre_p(l, 0.0).unwrap();
            assert!((r - p_at_zero(l)).abs() < 1e-13, "l = {l}");
            let z = zonal(l, 0.0) * (AREA / (2.0 * l as f64 + 1.0)).sqrt();
            assert!((z - p_at_zero(l)).abs() < 1e-13, "zonal l = {l}");
        }
    }

    #[test]
    fn legendre_asymptotic_at_zero() {
        let l = 1000;
        let v = legendre_p(l, 0.0).unwrap().abs() * (PI * l as f64 / 2.0).sqrt();
        assert!((v - 1.0).abs() < 1e-3);
    }

    #[test]
    fn legendre_bounded_by_one() {
        for l in [0u32, 1, 5, 40, 300] {
            for i in 0..=200 {
                let x = -1.0 + i as f64 / 100.0;
                assert!(legendre_p(l, x).unwrap().abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn harmonic_values() {
        let y00 = sph_harm(0, 0, 1.1, 2.3).unwrap();
        assert!((y00.re - 1.0 / AREA.sqrt()).abs() < 1e-15 && y00.im == 0.0);
        let y20 = sph_harm(2, 0, PI / 2.0, 0.4).unwrap();
        assert!((y20.re - (5.0 / AREA).sqrt() * -0.5).abs() < 1e-15);
        // Y_1^1 = -sqrt(3/8π) sin θ e^{iφ}
        let y11 = sph_harm(1, 1, 0.7, 0.3).unwrap();
        let expect = Complex64::from_polar(1.0, 0.3) * (-(3.0 / (8.0 * PI)).sqrt() * 0.7f64.sin());
        assert!((y11 - expect).norm() < 1e-15);
        let ym = sph_harm(3, -2, 0.9, 1.4).unwrap();
        let yp = sph_harm(3, 2, 0.9, 1.4).unwrap();
        assert!((ym - yp.conj()).norm() < 1e-15);
        assert!(sph_harm(2, 3, 0.1, 0.1).is_err());
    }

    #[test]
    fn zonal_matches_table_column() {
        let x = 0.37;
        let t = LegendreTable::new(60, x);
        for l in 0..=60 {
            assert!((t.get(l, 0) - zonal(l, x)).abs() < 1e-14);
        }
    }

    #[test]
    fn quadrature_total_area() {
        let q = sphere_quadrature(0);
        let s: f64 = (0..q.len()).map(|i| q.node(i).1).sum();
        assert!((s - AREA).abs() < 1e-12);
    }

    #[test]
    fn latitude_circle_arclength() {
        // trapezoid on the θ = π/3 circle with the longitude grid of the rule
        let q = sphere_quadrature(16);
        let theta0 = PI / 3.0;
        let len: f64 = (0..q.n_phi()).map(|_| theta0.sin() * q.phi_weight()).sum();
        assert!((len - TAU * theta0.sin()).abs() < 1e-12);
    }

    #[test]
    fn addition_theorem_diagonal() {
        let mut s = crate::rng::Stream::new(11, 0);
        for _ in 0..20 {
            let theta = s.uniform() * PI;
            let t = LegendreTable::new(40, theta.cos());
            for l in [0u32, 1, 7, 40] {
                let d = kernel_diagonal(&t, l);
                assert!((d - (2.0 * l as f64 + 1.0) / AREA).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn deep_degree_stays_finite() {
        let t = LegendreTable::new(400, 0.3);
        for l in 0..=400 {
            for m in 0..=l {
                assert!(t.get(l, m).is_finite());
            }
        }
        assert!((kernel_diagonal(&t, 400) - 801.0 / AREA).abs() < 1e-9);
    }

    #[test]
    fn max_degree_cutoff() {
        assert_eq!(max_degree(4.0), 3);
        assert_eq!(max_degree(0.0), 0);
        assert_eq!(max_degree(frequency(10)), 10);
    }
}
