use std::f64::consts::PI;

use num_complex::Complex;
use rand::Rng;

use super::norms::{l2_norm, lp_norm, ps_norm};
use super::transform::{gradient_squared, to_physical, to_spectral};
use super::{AxisFamily, Basis, SpectralField};
use crate::testutil::{random_field, rng};

const TWO_PI: f64 = 2.0 * PI;

fn dirichlet_1d(n: usize) -> Basis<f64> {
    Basis::dirichlet(&[PI], &[n])
}

fn neumann_1d(n: usize) -> Basis<f64> {
    Basis::neumann(&[PI], &[n])
}

#[test]
fn eigenvalues_match_wavenumbers() {
    let b = dirichlet_1d(4);
    assert_eq!(b.eigenvalue(0), 1.0);
    assert!((b.eigenvalue(2) - 9.0).abs() < 1e-12);
    let bn = neumann_1d(4);
    assert_eq!(bn.eigenvalue(0), 0.0);
    assert!((bn.eigenvalue(1) - 1.0).abs() < 1e-13);
    let b2 = Basis::dirichlet(&[PI, PI], &[3, 3]);
    let flat = b2.flat_of_wavenumbers(&[1, 2]);
    assert!((b2.eigenvalue(flat) - 5.0).abs() < 1e-12);
}

#[test]
fn basis_functions_satisfy_eigen_relation_on_grid() {
    // centered finite differences of phi_n reproduce -lambda phi_n
    let b = dirichlet_1d(3);
    let mut u = SpectralField::zero(b.clone(), 0, TWO_PI);
    u.set(0, 2, Complex::new(1.0, 0.0)); // n = 3
    let lam = b.eigenvalue(2);
    let h = 1e-5;
    for j in 0..7 {
        let x = (j as f64 + 0.5) * PI / 7.0;
        let d2 = (u.eval_point(0.0, &[x + h]) - 2.0 * u.eval_point(0.0, &[x])
            + u.eval_point(0.0, &[x - h]))
            / (h * h);
        assert!((d2 + lam * u.eval_point(0.0, &[x])).abs() < 1e-5);
    }
}

#[test]
fn to_physical_zero_field() {
    let u = SpectralField::zero(dirichlet_1d(4), 2, TWO_PI);
    let p = to_physical(&u, 1);
    assert!(p.values().iter().all(|&v| v == 0.0));
}

#[test]
fn to_physical_single_steady_mode_is_sine_values() {
    let mut u = SpectralField::zero(dirichlet_1d(4), 2, TWO_PI);
    u.set(0, 0, Complex::new(1.0, 0.0));
    let p = to_physical(&u, 1);
    for i in 0..p.nt() {
        for j in 0..p.spatial_sizes()[0] {
            let x = p.node(0, j);
            assert!((p.value(i, j) - x.sin()).abs() < 1e-14);
        }
    }
}

#[test]
fn round_trip_is_identity_on_in_band_fields() {
    let mut r = rng(7);
    for &n in &[3usize, 8] {
        for basis in [dirichlet_1d(n), neumann_1d(n)] {
            let u = random_field(&basis, 4, TWO_PI, &mut r, 1.0);
            for pad in [1usize, 2] {
                let p = to_physical(&u, pad);
                let back = to_spectral(&p, &basis).unwrap();
                let err = u.sub(&back).max_coeff();
                assert!(err < 1e-12, "round-trip error {err} (pad {pad})");
            }
        }
    }
}

#[test]
fn round_trip_2d() {
    let basis = Basis::dirichlet(&[PI, 1.7], &[4, 3]);
    let mut r = rng(8);
    let u = random_field(&basis, 2, TWO_PI, &mut r, 1.0);
    let p = to_physical(&u, 1);
    let back = to_spectral(&p, &basis).unwrap();
    assert!(u.sub(&back).max_coeff() < 1e-12);
}

#[test]
fn round_trip_3d_and_eigenvalues() {
    let basis = Basis::neumann(&[PI, 1.0, 2.0], &[2, 2, 1]);
    let flat = basis.flat_of_wavenumbers(&[1, 2, 1]);
    let expect = 1.0 + (2.0 * PI).powi(2) + (PI / 2.0).powi(2);
    assert!((basis.eigenvalue(flat) - expect).abs() < 1e-12);

    let mut r = rng(9);
    let u = random_field(&basis, 1, TWO_PI, &mut r, 1.0);
    let p = to_physical(&u, 1);
    let back = to_spectral(&p, &basis).unwrap();
    assert!(u.sub(&back).max_coeff() < 1e-12);
}

#[test]
fn to_spectral_rejects_coarse_grid() {
    let mut u = SpectralField::zero(dirichlet_1d(4), 2, TWO_PI);
    u.set(0, 0, Complex::new(1.0, 0.0));
    let p = to_physical(&u, 1);
    let wide = dirichlet_1d(32);
    assert!(to_spectral(&p, &wide).is_err());
}

#[test]
fn dt_of_steady_field_vanishes() {
    let mut r = rng(3);
    let u = random_field(&dirichlet_1d(4), 3, TWO_PI, &mut r, 1.0).project_steady();
    assert_eq!(u.dt(1).max_coeff(), 0.0);
}

#[test]
fn dt_second_derivative_of_cosine() {
    // u = cos(w t) phi_1 with w = 1: dt^2 u = -cos(w t) phi_1
    let mut u = SpectralField::zero(dirichlet_1d(2), 2, TWO_PI);
    u.add_real_mode(1, &[1], 1.0, 0.0);
    let d2 = u.dt(2);
    let expect = u.scale(-1.0);
    assert!(d2.sub(&expect).max_coeff() < 1e-15);
}

#[test]
fn dt_cubed_of_unit_coefficient() {
    let mut u = SpectralField::zero(dirichlet_1d(2), 1, TWO_PI);
    u.set(1, 0, Complex::new(1.0, 0.0));
    let d3 = u.dt(3);
    // (i)^3 = -i
    let got = d3.get(1, 0);
    assert!((got - Complex::new(0.0, -1.0)).norm() < 1e-15);
}

#[test]
fn laplacian_scales_by_eigenvalue() {
    let mut u = SpectralField::zero(dirichlet_1d(2), 1, TWO_PI);
    u.set(1, 0, Complex::new(2.0, 1.0));
    let lap = u.laplacian();
    assert!((lap.get(1, 0) - Complex::new(-2.0, -1.0)).norm() < 1e-14);

    let mut v = SpectralField::zero(neumann_1d(2), 1, TWO_PI);
    v.set(0, 0, Complex::new(5.0, 0.0)); // constant mode
    assert_eq!(v.laplacian().get(0, 0), Complex::new(0.0, 0.0)); // -0 keeps sign? norm check
}

#[test]
fn bilaplacian_is_squared_eigenvalue_with_plus_sign() {
    let mut u = SpectralField::zero(dirichlet_1d(3), 0, TWO_PI);
    u.set(0, 1, Complex::new(1.0, 0.0)); // n = 2, lambda = 4
    let l2 = u.laplacian().laplacian();
    assert!((l2.get(0, 1) - Complex::new(16.0, 0.0)).norm() < 1e-12);
}

#[test]
fn derivative_axis_moves_to_conjugate_family() {
    // d/dx sin(x) = cos(x)
    let mut u = SpectralField::zero(dirichlet_1d(3), 0, TWO_PI);
    u.set(0, 0, Complex::new(1.0, 0.0));
    let d = u.derivative_axis(0);
    assert_eq!(d.basis().families()[0], AxisFamily::Cosine);
    let flat = d.basis().flat_of_wavenumbers(&[1]);
    assert!((d.get(0, flat) - Complex::new(1.0, 0.0)).norm() < 1e-15);

    // d/dx cos(x) = -sin(x)
    let mut v = SpectralField::zero(neumann_1d(3), 0, TWO_PI);
    v.set(0, 1, Complex::new(1.0, 0.0));
    let dv = v.derivative_axis(0);
    assert_eq!(dv.basis().families()[0], AxisFamily::Sine);
    assert!((dv.get(0, 0) - Complex::new(-1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn gradient_squared_of_single_sine() {
    // u = sin(x): |grad u|^2 = cos^2(x)
    let mut u = SpectralField::zero(dirichlet_1d(4), 1, TWO_PI);
    u.set(0, 0, Complex::new(1.0, 0.0));
    let g = gradient_squared(&u);
    for i in 0..g.nt() {
        for j in 0..g.spatial_sizes()[0] {
            let x = g.node(0, j);
            assert!((g.value(i, j) - x.cos().powi(2)).abs() < 1e-13);
        }
    }
}

#[test]
fn gradient_squared_zero_and_two_mode_case() {
    let z = SpectralField::zero(dirichlet_1d(4), 1, TWO_PI);
    assert_eq!(gradient_squared(&z).max_abs(), 0.0);

    // u = sin(x) + sin(2x): values (cos x + 2 cos 2x)^2 at the nodes
    let mut u = SpectralField::zero(dirichlet_1d(4), 1, TWO_PI);
    u.set(0, 0, Complex::new(1.0, 0.0));
    u.set(0, 1, Complex::new(1.0, 0.0));
    let g = gradient_squared(&u);
    for j in 0..g.spatial_sizes()[0] {
        let x = g.node(0, j);
        let expect = (x.cos() + 2.0 * (2.0 * x).cos()).powi(2);
        assert!((g.value(0, j) - expect).abs() < 1e-12);
    }
}

#[test]
fn gradient_squared_is_nonnegative() {
    let mut r = rng(11);
    let u = random_field(&dirichlet_1d(5), 3, TWO_PI, &mut r, 2.0);
    let g = gradient_squared(&u);
    assert!(g.values().iter().all(|&v| v >= 0.0));
}

#[test]
fn projections_split_mean_and_oscillation() {
    // f = 3 + cos(w t) on a fixed spatial mode
    let mut f = SpectralField::zero(dirichlet_1d(2), 2, TWO_PI);
    f.add_real_mode(0, &[1], 3.0, 0.0);
    f.add_real_mode(1, &[1], 1.0, 0.0);
    let steady = f.project_steady();
    let osc = f.project_oscillatory();
    assert_eq!(steady.get(0, 0), Complex::new(3.0, 0.0));
    assert_eq!(steady.get(1, 0), Complex::new(0.0, 0.0));
    assert_eq!(osc.get(0, 0), Complex::new(0.0, 0.0));
    assert_eq!(osc.get(1, 0), Complex::new(0.5, 0.0));
    // complementary projections, exact on coefficients
    assert_eq!(steady.add(&osc), f);
    assert_eq!(steady.project_oscillatory().max_coeff(), 0.0);
    assert_eq!(osc.project_steady().max_coeff(), 0.0);
    assert_eq!(steady.project_steady(), steady);
}

#[test]
fn steady_projection_of_time_derivatives_vanishes() {
    let mut r = rng(5);
    let u = random_field(&dirichlet_1d(4), 3, TWO_PI, &mut r, 1.0);
    for order in 1..=3 {
        assert_eq!(u.dt(order).project_steady().max_coeff(), 0.0);
    }
}

#[test]
fn ps_norm_examples() {
    let z = SpectralField::zero(dirichlet_1d(2), 1, TWO_PI);
    assert_eq!(ps_norm(&z), 0.0);

    let mut u = SpectralField::zero(dirichlet_1d(2), 1, TWO_PI);
    u.set(0, 0, Complex::new(1.0, 0.0)); // m = 0, lambda = 1: weight 1
    assert!((ps_norm(&u) - 1.0).abs() < 1e-15);

    let mut v = SpectralField::zero(dirichlet_1d(2), 1, TWO_PI);
    v.set(1, 0, Complex::new(1.0, 0.0)); // w = 1, lambda = 1: weight 1 + 1 + 1
    assert!((ps_norm(&v) - 3.0).abs() < 1e-14);
}

#[test]
fn ps_norm_dominates_plain_l2() {
    let mut r = rng(17);
    let u = random_field(&dirichlet_1d(6), 4, TWO_PI, &mut r, 1.0);
    assert!(ps_norm(&u) >= l2_norm(&u));
}

#[test]
fn lp_norm_examples() {
    // constant field value 2, p = 4
    let mut u = SpectralField::zero(neumann_1d(2), 1, TWO_PI);
    u.set(0, 0, Complex::new(2.0, 0.0));
    let p = to_physical(&u, 1);
    assert!((lp_norm(&p, 4.0) - 2.0).abs() < 1e-13);
    assert!((lp_norm(&p, f64::INFINITY) - 2.0).abs() < 1e-13);

    // f = cos(w t), spatially constant, p = 2 -> sqrt(1/2)
    let mut v = SpectralField::zero(neumann_1d(2), 2, TWO_PI);
    v.add_real_mode(1, &[0], 1.0, 0.0);
    let pv = to_physical(&v, 1);
    assert!((lp_norm(&pv, 2.0) - 0.5f64.sqrt()).abs() < 1e-13);

    let z = SpectralField::zero(dirichlet_1d(2), 1, TWO_PI);
    for p_exp in [1.0, 2.0, 4.0, f64::INFINITY] {
        assert_eq!(lp_norm(&to_physical(&z, 1), p_exp), 0.0);
    }
}

#[test]
fn hermitian_symmetry_preserved_by_diagonal_ops() {
    let mut r = rng(23);
    let u = random_field(&dirichlet_1d(4), 3, TWO_PI, &mut r, 1.0);
    assert_eq!(u.hermitian_error(), 0.0);
    assert_eq!(u.laplacian().hermitian_error(), 0.0);
    assert_eq!(u.project_steady().hermitian_error(), 0.0);
    assert_eq!(u.project_oscillatory().hermitian_error(), 0.0);
    assert!(u.dt(1).hermitian_error() < 1e-16);
    assert!(u.dt(3).hermitian_error() < 1e-15);
}

#[test]
fn physical_values_of_real_fields_have_no_imaginary_leak() {
    let mut r = rng(29);
    let u = random_field(&neumann_1d(5), 4, TWO_PI, &mut r, 3.0);
    let p = to_physical(&u, 2);
    // spot-check against direct evaluation
    for &(i, j) in &[(0usize, 0usize), (3, 4), (7, 2)] {
        let direct = u.eval_point(p.time(i), &[p.node(0, j)]);
        assert!((p.value(i, j) - direct).abs() < 1e-12);
    }
}

#[test]
fn generic_scalar_smoke_f32() {
    let basis = Basis::<f32>::dirichlet(&[std::f32::consts::PI], &[3]);
    let mut u = SpectralField::zero(basis.clone(), 1, 2.0 * std::f32::consts::PI);
    u.set(0, 0, Complex::new(1.0f32, 0.0));
    let p = to_physical(&u, 1);
    let back = to_spectral(&p, &basis).unwrap();
    assert!(u.sub(&back).max_coeff() < 1e-5);
    assert!((ps_norm(&u) - 1.0).abs() < 1e-6);
}

mod properties {
    use proptest::prelude::*;

    use super::*;

    /// Hermitian field with M = 2, N = 4 built from 24 raw floats.
    fn field_from(raw: &[(f64, f64)]) -> SpectralField<f64> {
        let basis = Basis::dirichlet(&[PI], &[4]);
        let mut u = SpectralField::zero(basis, 2, TWO_PI);
        let mut it = raw.iter();
        for flat in 0..4 {
            let &(re, _) = it.next().unwrap();
            u.set(0, flat, Complex::new(re, 0.0));
            for m in 1..=2i64 {
                let &(re, im) = it.next().unwrap();
                u.set(m, flat, Complex::new(re, im));
                u.set(-m, flat, Complex::new(re, -im));
            }
        }
        u
    }

    proptest! {
        #[test]
        fn transforms_round_trip_in_band(
            raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12)
        ) {
            let u = field_from(&raw);
            for pad in [1usize, 2] {
                let back = to_spectral(&to_physical(&u, pad), u.basis()).unwrap();
                prop_assert!(u.sub(&back).max_coeff() < 1e-12);
            }
        }

        #[test]
        fn projections_are_complementary(
            raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12)
        ) {
            let u = field_from(&raw);
            let steady = u.project_steady();
            let osc = u.project_oscillatory();
            prop_assert_eq!(steady.add(&osc), u.clone());
            prop_assert_eq!(steady.project_steady(), steady.clone());
            prop_assert_eq!(steady.project_oscillatory().max_coeff(), 0.0);
            prop_assert_eq!(u.dt(2).project_steady().max_coeff(), 0.0);
        }

        #[test]
        fn diagonal_ops_preserve_realness(
            raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12)
        ) {
            let u = field_from(&raw);
            prop_assert_eq!(u.hermitian_error(), 0.0);
            prop_assert_eq!(u.laplacian().hermitian_error(), 0.0);
            prop_assert!(u.dt(1).hermitian_error() < 1e-15);
            prop_assert!(gradient_squared(&u).values().iter().all(|&v| v >= 0.0));
        }
    }
}

#[test]
fn random_padded_grids_stay_consistent() {
    let mut r = rng(31);
    let basis = dirichlet_1d(3);
    let u = random_field(&basis, 2, TWO_PI, &mut r, 1.0);
    let p1 = to_physical(&u, 1);
    let p2 = to_physical(&u, 2);
    // same point sampled through differently padded grids
    let x = p2.node(0, 3);
    let t = p2.time(4);
    let direct = u.eval_point(t, &[x]);
    assert!((p2.value(4, 3) - direct).abs() < 1e-12);
    let _ = p1;
    let _: f64 = r.gen();
}
