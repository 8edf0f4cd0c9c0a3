use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use synthlab_core::grid::SampleGrid;
use synthlab_core::numeric::gauss_legendre;
use synthlab_core::rng::Stream;
use synthlab_core::spectrum::Point;
use synthlab_core::sphere::{sph_harm, LegendreTable};
use synthlab_core::{enumerate_spectrum, BasisLabel, CoefficientSet, Complex64, Manifold};

#[test]
fn torus_gram_matrix_is_identity() {
    let m = Manifold::torus(2).unwrap();
    let t = enumerate_spectrum(&m, 10.0).unwrap();
    let labels: Vec<BasisLabel> = t.lines().iter().flat_map(|l| l.basis.iter().copied()).collect();
    assert_eq!(labels.len(), 317);
    // 24 points per axis integrate e^{ik·x} exactly for |k_c| ≤ 20
    let n = 24;
    let w = (TAU / n as f64).powi(2);
    let values: Vec<Vec<Complex64>> = labels
        .iter()
        .map(|b| {
            (0..n * n)
                .map(|i| {
                    let x = Point::torus(&[TAU * (i / n) as f64 / n as f64, TAU * (i % n) as f64 / n as f64]);
                    b.eval(&m, &x)
                })
                .collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for (a, va) in values.iter().enumerate() {
        for (b, vb) in values.iter().enumerate().skip(a) {
            let g: Complex64 = va.iter().zip(vb).map(|(x, y)| x * y.conj()).sum::<Complex64>() * w;
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn sphere_gram_matrix_is_identity() {
    // Y_l^m = P̄_l^m(cos θ) e^{imφ}; the φ integral is exact on 65 equispaced
    // points for |m - m'| ≤ 64, the cos θ integral on 33 Gauss nodes for
    // degree ≤ 65, so the Gram matrix factors into these two sums.
    let lmax = 32u32;
    let (x, wx) = gauss_legendre(33);
    let tables: Vec<LegendreTable> = x.iter().map(|x| LegendreTable::new(lmax, *x)).collect();
    let n_phi = 65;
    let phi_sum = |dm: i32| -> Complex64 {
        (0..n_phi)
            .map(|k| Complex64::from_polar(TAU / n_phi as f64, dm as f64 * TAU * k as f64 / n_phi as f64))
            .sum()
    };
    let labels: Vec<(u32, i32)> = (0..=lmax)
        .flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m)))
        .collect();
    assert_eq!(labels.len(), 33 * 33);
    let mut worst = 0.0f64;
    for &(l1, m1) in &labels {
        for &(l2, m2) in &labels {
            let theta: f64 = tables
                .iter()
                .zip(&wx)
                .map(|(t, w)| w * t.signed(l1, m1) * t.signed(l2, m2))
                .sum();
            let g = phi_sum(m1 - m2) * theta;
            let target = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn low_degree_harmonics_match_closed_forms() {
    let (theta, phi): (f64, f64) = (0.7, 1.3);
    let (c, s) = (theta.cos(), theta.sin());
    let e = |m: f64| Complex64::from_polar(1.0, m * phi);
    let cases = [
        (0, 0, Complex64::new((1.0 / (4.0 * PI)).sqrt(), 0.0)),
        (1, 0, Complex64::new((3.0 / (4.0 * PI)).sqrt() * c, 0.0)),
        (1, 1, -(3.0 / (8.0 * PI)).sqrt() * s * e(1.0)),
        (1, -1, (3.0 / (8.0 * PI)).sqrt() * s * e(-1.0)),
        (
            2,
            0,
            Complex64::new((5.0 / (16.0 * PI)).sqrt() * (3.0 * c * c - 1.0), 0.0),
        ),
        (2, 1, -(15.0 / (8.0 * PI)).sqrt() * s * c * e(1.0)),
        (2, 2, (15.0 / (32.0 * PI)).sqrt() * s * s * e(2.0)),
        (3, 3, -(35.0 / (64.0 * PI)).sqrt() * s * s * s * e(3.0)),
    ];
    let sphere = Manifold::sphere();
    for (l, m, want) in cases {
        let got = sph_harm(l, m, theta, phi).unwrap();
        assert!((got - want).norm() < 1e-14, "Y_{l}^{m}: {got} vs {want}");
        let via_label = BasisLabel::Harmonic { l, m }.eval(&sphere, &Point::sphere(theta, phi));
        assert!((via_label - want).norm() < 1e-14);
    }
}

fn random_coefficients(manifold: Manifold, lambda_max: f64, seed: u64) -> CoefficientSet {
    let t = Arc::new(enumerate_spectrum(&manifold, lambda_max).unwrap());
    let mut rng = Stream::new(seed, 0);
    let values = t
        .lines()
        .iter()
        .map(|l| {
            l.basis
                .iter()
                .map(|_| Complex64::new(rng.normal(), rng.normal()))
                .collect()
        })
        .collect();
    CoefficientSet::new(t, values).unwrap()
}

#[test]
fn parseval_round_trip() {
    for (manifold, lambda) in [
        (Manifold::torus(1).unwrap(), 40.0),
        (Manifold::torus(2).unwrap(), 12.0),
        (Manifold::torus(3).unwrap(), 5.0),
        (Manifold::sphere(), 30.0),
    ] {
        let c = random_coefficients(manifold, lambda, 9);
        let grid = SampleGrid::for_table(c.table());
        let values = grid.synthesize(&c).unwrap();
        let energy = grid.integrate_sq(&values);
        let l2sq = c.l2_norm().powi(2);
        assert!((energy - l2sq).abs() <= 1e-9 * l2sq, "{manifold:?}: {energy} vs {l2sq}");
        let back = grid.analyze(&values, c.table().clone()).unwrap();
        let err = back.sub(&c).unwrap().l2_norm();
        assert!(err <= 1e-9 * c.l2_norm(), "{manifold:?}: {err}");
    }
}

#[test]
fn too_coarse_grids_are_refused() {
    let c = random_coefficients(Manifold::torus(2).unwrap(), 6.0, 1);
    assert!(SampleGrid::torus(2, 12).unwrap().synthesize(&c).is_err());
    assert!(SampleGrid::torus(2, 13).unwrap().synthesize(&c).is_ok());
}
