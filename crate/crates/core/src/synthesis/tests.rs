use super::*;
use alloc::sync::Arc;
use core::f64::consts::{PI, TAU};

use crate::measures::{coefficients, make_measure, Atom, MeasureSpec, Preset};
use crate::spectrum::{enumerate_spectrum, Manifold, Point, SpectrumTable};

fn table(m: Manifold, lambda: f64) -> Arc<SpectrumTable> {
    Arc::new(enumerate_spectrum(&m, lambda).unwrap())
}

#[test]
fn bump_window_values() {
    let w = Window::bump();
    assert!((w.eval(0.0) - 1.0).abs() < 1e-12);
    assert_eq!(w.eval(3.7), w.eval(-3.7));
    // Independent evaluation: adaptive Simpson on the bump, computed offline.
    for (t, v) in [
        (1.0, 0.9231),
        (2.0, 0.7171),
        (4.0, 0.1861),
        (8.0, -0.0458),
        (16.0, -0.00235),
    ] {
        assert!((w.eval(t) - v).abs() < 1e-4, "{t}: {}", w.eval(t));
    }
    assert!((w.width() - 2.81).abs() < 0.01);
    assert!(w.verify_plateau(2000));
}

#[test]
fn panel_rule_continues_base_rule() {
    let w = Window::bump();
    let switch = w.nodes() as f64 / 4.0;
    for t in [switch * 0.5, switch * 0.9, switch * 0.99] {
        assert!((w.eval(t) - w.eval_panels(t)).abs() < 1e-13);
    }
}

#[test]
fn fejer_matches_its_cosine_transform() {
    let w = Window::fejer();
    assert!((w.eval(PI) - (2.0 / PI).powi(2)).abs() < 1e-15);
    // ψ(t) = ∫_{-1}^{1} cos(tξ)(1 - |ξ|) dξ / ∫(1 - |ξ|), by evenness on [0, 1].
    let (x, wt) = crate::numeric::gauss_legendre_on(64, 0.0, 1.0);
    for t in [0.3, 2.0, 7.5] {
        let q: f64 = x
            .iter()
            .zip(&wt)
            .map(|(x, w)| 2.0 * w * (t * x).cos() * (1.0 - x))
            .sum();
        assert!((q - w.eval(t)).abs() < 1e-12);
    }
}

#[test]
fn lowpass_byproducts_and_limits() {
    let t = table(Manifold::torus(2).unwrap(), 50.0);
    let m = make_measure(MeasureSpec::new(
        Manifold::torus(2).unwrap(),
        Preset::Segment {
            start: [0.0; 3],
            end: [PI, 0.0, 0.0],
        },
    ))
    .unwrap();
    let u = coefficients(&m, &t).unwrap();
    let w = Window::bump();
    let far = lowpass_apply(&u, 1e6, &w).unwrap();
    let gap = far
        .coeffs
        .values()
        .iter()
        .flatten()
        .zip(u.values().iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(gap < 1e-8);
    let lp = lowpass_apply(&u, 8.0, &w).unwrap();
    let at_r = t.line_index(64).unwrap();
    assert!((lp.multipliers[at_r] - w.eval(1.0)).abs() < 1e-15);
    assert!((lp.d_r - lp.coeffs.l2_norm()).abs() < 1e-12 * lp.d_r);
    assert!(lp.d_r <= u.l2_norm());
    assert!(lowpass_apply(&u, 0.5, &w).is_err());
}

#[test]
fn multiplier_is_diagonal_on_the_grid() {
    let s2 = Manifold::sphere();
    let t = table(s2, 20.0);
    let m = make_measure(MeasureSpec::new(
        s2,
        Preset::Atoms(alloc::vec![
            Atom {
                point: Point::sphere(0.4, 1.0),
                weight: 1.0
            },
            Atom {
                point: Point::sphere(2.0, 5.0),
                weight: -0.5
            },
        ]),
    ))
    .unwrap();
    let u = coefficients(&m, &t).unwrap();
    let w = Window::bump();
    let lp = lowpass_apply(&u, 6.0, &w).unwrap();
    let grid = SampleGrid::for_table(&t);
    let values = grid.synthesize(&lp.coeffs).unwrap();
    let back = grid.analyze(&values, t.clone()).unwrap();
    let gap = back.sub(&lp.coeffs).unwrap().l2_norm();
    assert!(gap < 1e-9);
    let ev = lowpass_eval_grid(&lp.coeffs, &grid, None).unwrap();
    assert!((ev.l2_sq - lp.d_r.powi(2)).abs() < 1e-9 * ev.l2_sq);
}

#[test]
fn pairing_is_symmetric() {
    let t2 = Manifold::torus(2).unwrap();
    let t = table(t2, 16.0);
    let a = coefficients(
        &make_measure(MeasureSpec::new(
            t2,
            Preset::Segment {
                start: [0.2, 0.0, 0.0],
                end: [2.0, 1.0, 0.0],
            },
        ))
        .unwrap(),
        &t,
    )
    .unwrap();
    let b = coefficients(&make_measure(MeasureSpec::new(t2, Preset::MomentCurve)).unwrap(), &t).unwrap();
    let w = Window::bump();
    let lhs = lowpass_pairing(&a, &b, 5.0, &w).unwrap();
    let rhs = lowpass_pairing(&b, &a, 5.0, &w).unwrap().conj();
    assert!((lhs - rhs).norm() < 1e-10);
    let pa = lowpass_apply(&a, 5.0, &w).unwrap().coeffs;
    assert!((pa.inner(&b).unwrap() - lhs).norm() < 1e-10);
}

#[test]
fn atom_reconstruction_peaks_at_the_atom() {
    let t2 = Manifold::torus(2).unwrap();
    let t = table(t2, 40.0);
    let grid = SampleGrid::for_table(&t);
    let x0 = grid.point(37 * 82 + 11);
    let m = make_measure(MeasureSpec::new(
        t2,
        Preset::Atoms(alloc::vec![Atom { point: x0, weight: 1.0 }]),
    ))
    .unwrap();
    let u = coefficients(&m, &t).unwrap();
    let lp = lowpass_apply(&u, 12.0, &Window::bump()).unwrap();
    let ev = lowpass_eval_grid(&lp.coeffs, &grid, Some((&m, 1.0 / 12.0))).unwrap();
    assert_eq!(grid.point(ev.argmax), x0);
}

#[test]
fn subtorus_reconstruction_stays_in_the_thickening() {
    let t2 = Manifold::torus(2).unwrap();
    let t = table(t2, 128.0);
    let m = make_measure(MeasureSpec::new(
        t2,
        Preset::Subtorus {
            k: 1,
            offset: [0.0, 1.0, 0.0],
        },
    ))
    .unwrap();
    let u = coefficients(&m, &t).unwrap();
    let lp = lowpass_apply(&u, 16.0, &Window::bump()).unwrap();
    let ev = lowpass_eval_grid(&lp.coeffs, &SampleGrid::for_table(&t), Some((&m, C0 / 16.0))).unwrap();
    assert!(ev.leakage.unwrap() <= 0.05, "{:?}", ev.leakage);
    // constants spread over the whole torus
    let mut c = CoefficientSet::zeros(table(t2, 3.0));
    c.line_mut(0)[0] = Complex64::new(1.0, 0.0);
    let ev = lowpass_eval_grid(&c, &SampleGrid::torus(2, 64).unwrap(), Some((&m, 0.25))).unwrap();
    assert!((ev.leakage.unwrap() - ev.outside_fraction.unwrap()).abs() < 1e-12);
    let exact = 1.0 - 0.5 / TAU;
    assert!((ev.outside_fraction.unwrap() - exact).abs() < 2.0 / 64.0);
}

#[test]
fn window_decay_is_summable() {
    let a = window_decay(&Window::bump(), 1.0, 10);
    let tail: f64 = a[7..].iter().sum();
    assert!(tail < 1e-8, "{a:?}");
    assert!(a[6] > 1e-8);
}

#[test]
fn subtorus_endpoint_bands_are_exact() {
    let t2 = Manifold::torus(2).unwrap();
    let t = table(t2, 256.0);
    let m = make_measure(MeasureSpec::new(t2, Preset::Subtorus { k: 1, offset: [0.0; 3] })).unwrap();
    let u = coefficients(&m, &t).unwrap();
    let e = endpoint_dyadic(&u, 1.0, &[8.0, 16.0, 32.0, 64.0, 128.0], &Window::bump()).unwrap();
    assert_eq!(e.p0, 4.0);
    // integer band edges count exactly 2^j R frequencies, two vectors each
    for row in e.rows.iter().filter(|r| r.complete && r.lo >= 1.0) {
        assert!((row.b - 2.0).abs() < 1e-12, "{row:?}");
    }
    assert!((e.b_max - 4.0).abs() < 1e-12);
    // |∫u|² / |M| = (2π)² / (2π)²
    assert!((e.zero_terms[0] - 1.0 / 8.0).abs() < 1e-12);
}

#[test]
fn single_line_has_one_band_per_radius() {
    let s2 = Manifold::sphere();
    let t = table(s2, 40.0);
    let mut c = CoefficientSet::zeros(t.clone());
    c.line_mut(12)[3] = Complex64::new(1.0, 0.0);
    let e = endpoint_dyadic(&c, 1.0, &[2.0, 3.0, 5.0], &Window::bump()).unwrap();
    for r in [2.0, 3.0, 5.0] {
        assert_eq!(e.rows.iter().filter(|row| row.r == r && row.b > 0.0).count(), 1);
    }
}
