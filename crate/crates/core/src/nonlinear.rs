//! Pseudospectral evaluation of the quadratic nonlinearity
//! `d_t^2 (k (d_t u)^2 + s |grad u|^2)` and the steady/oscillatory cross
//! term, with exact dealiasing.
//!
//! Products of two band-limited fields are even in every axis and fit
//! exactly in the widened all-cosine basis, so the pipeline is: evaluate the
//! factors on a product-exact grid (double the minimal sizes), multiply
//! pointwise, transform to the wide cosine basis (exact), truncate the
//! temporal band, project onto the equation basis (exact Galerkin), and only
//! then apply `d_t^2` in the coefficient domain. The final `d_t^2` zeroes
//! the steady row identically, so the results are purely oscillatory by
//! construction.

use crate::error::SolveError;
use crate::linear::BoundaryLift;
use crate::model::ModelParams;
use crate::scalar::Scalar;
use crate::spectral::convert::project_to_basis;
use crate::spectral::transform::{analyze, to_physical_on};
use crate::spectral::{Basis, PhysicalField, SpectralField};

/// Product-exact grid sizes for quadratic terms of a field in `basis` with
/// temporal band `m_max`.
pub(crate) fn product_grid<T: Scalar>(basis: &Basis<T>, m_max: usize) -> (usize, Vec<usize>) {
    let nt = 2 * (2 * m_max + 1);
    let ng = (0..basis.dim())
        .map(|axis| 2 * basis.min_grid(axis))
        .collect();
    (nt, ng)
}

fn grid_values<T: Scalar>(field: &SpectralField<T>, nt: usize, ng: &[usize]) -> Vec<T> {
    to_physical_on(field, nt, ng, 2).values
}

/// Grid values of `d_t^{dt_order}` of the lifted part (1-D only).
fn lift_grid<T: Scalar>(
    lift: Option<&BoundaryLift<T>>,
    nt: usize,
    ng: &[usize],
    dt_order: u32,
    dx_order: usize,
) -> Option<Vec<T>> {
    lift.map(|l| {
        assert_eq!(ng.len(), 1, "boundary lifts exist only on intervals");
        l.eval_grid(nt, ng[0], dt_order, dx_order)
    })
}

fn add_into<T: Scalar>(acc: &mut [T], other: &[T]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a += *b;
    }
}

/// `w = d_t^2 (k (d_t u)^2 + s |grad u|^2)` truncated to the band of `u`,
/// with an optional boundary lift entering the pointwise factors through its
/// closed form.
pub fn eval_q_lifted<T: Scalar>(
    u: &SpectralField<T>,
    lift: Option<&BoundaryLift<T>>,
    params: &ModelParams<T>,
) -> SpectralField<T> {
    let basis = u.basis().clone();
    let m_max = u.m_max();
    let (nt, ng) = product_grid(&basis, m_max);
    let total = nt * ng.iter().product::<usize>();

    let mut w_vals = vec![T::zero(); total];

    // k (d_t u)^2
    if params.k != T::zero() {
        let mut dt_vals = grid_values(&u.dt(1), nt, &ng);
        if let Some(lv) = lift_grid(lift, nt, &ng, 1, 0) {
            add_into(&mut dt_vals, &lv);
        }
        for (w, v) in w_vals.iter_mut().zip(&dt_vals) {
            *w += params.k * *v * *v;
        }
    }

    // s |grad u|^2
    if params.s == 1 {
        for axis in 0..basis.dim() {
            let mut g_vals = grid_values(&u.derivative_axis(axis), nt, &ng);
            if axis == 0 {
                if let Some(lv) = lift_grid(lift, nt, &ng, 0, 1) {
                    add_into(&mut g_vals, &lv);
                }
            }
            for (w, v) in w_vals.iter_mut().zip(&g_vals) {
                *w += *v * *v;
            }
        }
    }

    let wide = basis.product_cosine_basis();
    let product = analyze(&w_vals, nt, &ng, &wide, 2 * m_max, u.period());
    // band first, then d_t^2 in the coefficient domain
    project_to_basis(&product, &basis, m_max).dt(2)
}

/// `w = d_t^2 (k (d_t u)^2 + s |grad u|^2)`, exactly quadratic in `u` and
/// purely oscillatory.
pub fn eval_q<T: Scalar>(u: &SpectralField<T>, params: &ModelParams<T>) -> SpectralField<T> {
    eval_q_lifted(u, None, params)
}

/// Cross term of the oscillatory problem, `2 s grad u_s . grad d_t^2 u_p`,
/// bilinear in `(u_s, u_p)` and purely oscillatory.
pub fn eval_cross<T: Scalar>(
    u_s: &SpectralField<T>,
    u_p: &SpectralField<T>,
    params: &ModelParams<T>,
) -> Result<SpectralField<T>, SolveError> {
    let steady_violation = u_s.project_oscillatory().max_coeff();
    if steady_violation > T::zero()
        && steady_violation > T::lit(16.0) * T::epsilon() * u_s.max_coeff()
    {
        return Err(SolveError::Parameter(
            "cross term requires a time-independent first factor".into(),
        ));
    }
    let basis = u_p.basis().clone();
    let m_max = u_p.m_max();
    if params.s == 0 {
        return Ok(SpectralField::zero(basis, m_max, u_p.period()));
    }
    let (nt, ng) = product_grid(&basis, m_max);
    let total = nt * ng.iter().product::<usize>();

    let d2 = u_p.dt(2);
    let mut acc = vec![T::zero(); total];
    for axis in 0..basis.dim() {
        let gs = grid_values(&u_s.derivative_axis(axis), nt, &ng);
        let gp = grid_values(&d2.derivative_axis(axis), nt, &ng);
        for ((a, s), p) in acc.iter_mut().zip(&gs).zip(&gp) {
            *a += *s * *p;
        }
    }
    let two_s = T::lit(2.0) * params.s_factor();
    for a in &mut acc {
        *a *= two_s;
    }

    let wide = basis.product_cosine_basis();
    let product = analyze(&acc, nt, &ng, &wide, 2 * m_max, u_p.period());
    // the steady row of the exact result is identically zero (the second
    // factor carries d_t^2); drop the rounding residue
    Ok(project_to_basis(&product, &basis, m_max).project_oscillatory())
}

/// The four pointwise products of the bilinear estimate, on the padded grid:
/// `d_t v d_t^3 u`, `d_t^2 v d_t^2 u`, `d_t grad v . d_t grad u`,
/// `grad v . d_t^2 grad u`.
pub fn bilinear_products<T: Scalar>(
    u: &SpectralField<T>,
    v: &SpectralField<T>,
) -> [PhysicalField<T>; 4] {
    u.checked_pair(v)
        .expect("product factors share basis and band");
    let basis = u.basis().clone();
    let m_max = u.m_max();
    let (nt, ng) = product_grid(&basis, m_max);
    let total = nt * ng.iter().product::<usize>();

    let make = |vals: Vec<T>| {
        PhysicalField::new(vals, nt, ng.clone(), basis.clone(), m_max, u.period(), 2)
    };

    // d_t v * d_t^3 u
    let p1 = {
        let a = grid_values(&v.dt(1), nt, &ng);
        let b = grid_values(&u.dt(3), nt, &ng);
        a.iter().zip(&b).map(|(&x, &y)| x * y).collect::<Vec<_>>()
    };
    // d_t^2 v * d_t^2 u
    let p2 = {
        let a = grid_values(&v.dt(2), nt, &ng);
        let b = grid_values(&u.dt(2), nt, &ng);
        a.iter().zip(&b).map(|(&x, &y)| x * y).collect::<Vec<_>>()
    };
    // d_t grad v . d_t grad u
    let mut p3 = vec![T::zero(); total];
    // grad v . d_t^2 grad u
    let mut p4 = vec![T::zero(); total];
    for axis in 0..basis.dim() {
        let dv = grid_values(&v.dt(1).derivative_axis(axis), nt, &ng);
        let du = grid_values(&u.dt(1).derivative_axis(axis), nt, &ng);
        for ((acc, &x), &y) in p3.iter_mut().zip(&dv).zip(&du) {
            *acc += x * y;
        }
        let gv = grid_values(&v.derivative_axis(axis), nt, &ng);
        let gu2 = grid_values(&u.dt(2).derivative_axis(axis), nt, &ng);
        for ((acc, &x), &y) in p4.iter_mut().zip(&gv).zip(&gu2) {
            *acc += x * y;
        }
    }

    [make(p1), make(p2), make(p3), make(p4)]
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex;

    use super::*;
    use crate::model::ModelParams;
    use crate::spectral::norms::{lp_norm, ps_norm};
    use crate::spectral::Basis;
    use crate::testutil::{random_field, rng};

    const TWO_PI: f64 = 2.0 * PI;

    fn defaults() -> ModelParams<f64> {
        ModelParams::new(1.0, 1.0, 1.0, 1, 1.0).unwrap()
    }

    fn dirichlet(n: usize) -> Basis<f64> {
        Basis::dirichlet(&[PI], &[n])
    }

    /// Sine-band Galerkin coefficients of sin^2(x) on [0, pi]:
    /// `-8 / (pi n (n^2 - 4))` for odd `n`, zero for even `n`.
    fn sin_squared_coeff(n: usize) -> f64 {
        if n.is_multiple_of(2) {
            0.0
        } else {
            -8.0 / (PI * n as f64 * ((n * n) as f64 - 4.0))
        }
    }

    #[test]
    fn sin_squared_closed_form_matches_quadrature() {
        for n in [1usize, 3, 5, 7] {
            let steps = 400_000;
            let h = PI / steps as f64;
            let mut acc = 0.0;
            for j in 0..steps {
                let x = (j as f64 + 0.5) * h;
                acc += x.sin().powi(2) * (n as f64 * x).sin();
            }
            let quad = 2.0 / PI * acc * h;
            assert!(
                (quad - sin_squared_coeff(n)).abs() < 1e-9,
                "n = {n}: {quad} vs {}",
                sin_squared_coeff(n)
            );
        }
    }

    #[test]
    fn eval_q_zero() {
        let u = SpectralField::zero(dirichlet(4), 2, TWO_PI);
        assert_eq!(eval_q(&u, &defaults()).max_coeff(), 0.0);
    }

    #[test]
    fn eval_q_second_harmonic_generation() {
        // u = eps cos(w t) sin(x), s = 0:
        // Q = 2 k eps^2 w^4 cos(2 w t) sin^2(x), banded
        let params = ModelParams::new(1.0, 1.0, 1.0, 0, 1.0).unwrap();
        assert_eq!(params.k, 1.5); // (1 - 0) + 1/2, c = 1
        let eps = 1e-2;
        let n_modes = 9;
        let mut u = SpectralField::zero(dirichlet(n_modes), 4, TWO_PI);
        u.add_real_mode(1, &[1], eps, 0.0);
        let q = eval_q(&u, &params);

        let scale = params.k * eps * eps; // omega = 1
        for n in 1..=n_modes {
            let want = scale * sin_squared_coeff(n);
            let got = q.get(2, n - 1);
            assert!(
                (got - Complex::new(want, 0.0)).norm() < 1e-12 * scale.max(1.0),
                "mode (2, {n}): {got} vs {want}"
            );
            // no content at |m| other than 2
            for m in [0i64, 1, 3, 4] {
                assert!(q.get(m, n - 1).norm() < 1e-16);
            }
        }
    }

    #[test]
    fn eval_q_is_exactly_quadratic() {
        let params = defaults();
        let mut r = rng(83);
        let u = random_field(&dirichlet(5), 3, TWO_PI, &mut r, 0.3);
        let q1 = eval_q(&u, &params);
        let q3 = eval_q(&u.scale(3.0), &params);
        let diff = q3.sub(&q1.scale(9.0));
        assert!(ps_norm(&diff) <= 1e-12 * ps_norm(&q3).max(1.0));
    }

    #[test]
    fn eval_q_steady_projection_vanishes_exactly() {
        let params = defaults();
        let mut r = rng(89);
        for _ in 0..5 {
            let u = random_field(&dirichlet(6), 4, TWO_PI, &mut r, 1.0);
            let q = eval_q(&u, &params);
            assert_eq!(q.steady_part_max(), 0.0);
            assert!(q.hermitian_error() < 1e-14 * q.max_coeff().max(1.0));
        }
    }

    #[test]
    fn dealiasing_matches_symbolic_result_for_lowest_mode() {
        // full Kuznetsov-type nonlinearity on u = eps cos(t) sin(x):
        // k (d_t u)^2 = k eps^2 sin^2 t sin^2 x
        // s |grad u|^2 = eps^2 cos^2 t cos^2 x
        // d_t^2 of the m = +-2 content:
        //   (d_t u)^2 part: -(k eps^2 / 4) e^{2it} sin^2 x -> x4w^2 ...
        // assembled below directly from the closed forms
        let params = defaults();
        let eps = 0.1;
        let n_modes = 8;
        let mut u = SpectralField::zero(dirichlet(n_modes), 3, TWO_PI);
        u.add_real_mode(1, &[1], eps, 0.0);
        let q = eval_q(&u, &params);

        // cos^2 x = (1 + cos 2x)/2 projected on sines:
        // b_n = (2/pi) (1/n + n/(n^2-4)) for odd n
        let cos_sq_coeff = |n: usize| {
            if n.is_multiple_of(2) {
                0.0
            } else {
                let nf = n as f64;
                (2.0 / PI) * (1.0 / nf + nf / (nf * nf - 4.0))
            }
        };
        // (d_t u)^2 has m=+-2 coefficient -eps^2/4 sin^2 x;
        // |grad u|^2 has m=+-2 coefficient +eps^2/4 cos^2 x;
        // d_t^2 multiplies by (2i)^2 = -4.
        for n in 1..=n_modes {
            let want = -4.0
                * (params.k * (-eps * eps / 4.0) * sin_squared_coeff(n)
                    + (eps * eps / 4.0) * cos_sq_coeff(n));
            let got = q.get(2, n - 1);
            assert!(
                (got - Complex::new(want, 0.0)).norm() < 1e-12,
                "mode (2, {n}): {got} vs {want}"
            );
        }
    }

    #[test]
    fn cross_term_switches_and_zeros() {
        let params_off = ModelParams::new(1.0, 1.0, 1.0, 0, 1.0).unwrap();
        let params_on = defaults();
        let basis = dirichlet(5);
        let mut r = rng(97);
        let u_s = random_field(&basis, 3, TWO_PI, &mut r, 1.0).project_steady();
        let u_p = random_field(&basis, 3, TWO_PI, &mut r, 1.0).project_oscillatory();

        assert_eq!(
            eval_cross(&u_s, &u_p, &params_off).unwrap().max_coeff(),
            0.0
        );
        let zero_s = SpectralField::zero(basis.clone(), 3, TWO_PI);
        assert_eq!(
            eval_cross(&zero_s, &u_p, &params_on).unwrap().max_coeff(),
            0.0
        );
        // oscillatory first factor is rejected
        assert!(eval_cross(&u_p, &u_p, &params_on).is_err());
    }

    #[test]
    fn cross_term_closed_form() {
        // u_s = sin x, u_p = cos(t) sin x:
        // 2 grad u_s . grad d_t^2 u_p = -2 cos^2 x cos t, banded
        let params = defaults();
        let n_modes = 8;
        let basis = dirichlet(n_modes);
        let mut u_s = SpectralField::zero(basis.clone(), 2, TWO_PI);
        u_s.add_real_mode(0, &[1], 1.0, 0.0);
        let mut u_p = SpectralField::zero(basis.clone(), 2, TWO_PI);
        u_p.add_real_mode(1, &[1], 1.0, 0.0);
        let cross = eval_cross(&u_s, &u_p, &params).unwrap();

        let proj = |n: usize| {
            if n.is_multiple_of(2) {
                0.0
            } else {
                let nf = n as f64;
                (2.0 / PI) * (2.0 * nf * nf - 4.0) / (nf * (nf * nf - 4.0))
            }
        };
        for n in 1..=n_modes {
            let want = -proj(n); // coefficient of e^{i t} (and conjugate)
            let got = cross.get(1, n - 1);
            assert!(
                (got - Complex::new(want, 0.0)).norm() < 1e-12,
                "mode (1, {n}): {got} vs {want}"
            );
        }
        assert_eq!(cross.steady_part_max(), 0.0);
    }

    #[test]
    fn cross_term_is_bilinear() {
        let params = defaults();
        let basis = dirichlet(4);
        let mut r = rng(101);
        let u_s = random_field(&basis, 2, TWO_PI, &mut r, 1.0).project_steady();
        let u_p = random_field(&basis, 2, TWO_PI, &mut r, 1.0).project_oscillatory();
        let scaled_s = eval_cross(&u_s.scale(2.5), &u_p, &params).unwrap();
        let scaled_p = eval_cross(&u_s, &u_p.scale(2.5), &params).unwrap();
        let base = eval_cross(&u_s, &u_p, &params).unwrap().scale(2.5);
        assert!(ps_norm(&scaled_s.sub(&base)) < 1e-12 * ps_norm(&base).max(1.0));
        assert!(ps_norm(&scaled_p.sub(&base)) < 1e-12 * ps_norm(&base).max(1.0));
    }

    #[test]
    fn bilinear_products_zero_and_closed_form() {
        let basis = dirichlet(4);
        let z = SpectralField::zero(basis.clone(), 2, TWO_PI);
        for p in bilinear_products(&z, &z) {
            assert_eq!(p.max_abs(), 0.0);
        }

        // u = v = cos(t) sin(x): d_t^2 v * d_t^2 u = cos^2 t sin^2 x
        let mut u = SpectralField::zero(basis, 2, TWO_PI);
        u.add_real_mode(1, &[1], 1.0, 0.0);
        let prods = bilinear_products(&u, &u);
        let p2 = &prods[1];
        for i in 0..p2.nt() {
            let t = p2.time(i);
            for j in 0..p2.spatial_sizes()[0] {
                let x = p2.node(0, j);
                let want = (t.cos() * x.sin()).powi(2);
                assert!((p2.value(i, j) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bilinear_ratio_is_finite_over_random_pairs() {
        // empirical shadow of the bilinear-estimate constant
        let basis = dirichlet(4);
        let mut r = rng(103);
        let p_exp = 3.0;
        let mut max_ratio: f64 = 0.0;
        for _ in 0..100 {
            let u = random_field(&basis, 2, TWO_PI, &mut r, 1.0);
            let v = random_field(&basis, 2, TWO_PI, &mut r, 1.0);
            let denom = ps_norm(&u) * ps_norm(&v);
            if denom == 0.0 {
                continue;
            }
            for prod in bilinear_products(&u, &v) {
                let ratio = lp_norm(&prod, p_exp) / denom;
                assert!(ratio.is_finite());
                max_ratio = max_ratio.max(ratio);
            }
        }
        assert!(max_ratio > 0.0 && max_ratio.is_finite());
    }
}
